//! Oracle construction shared by `build`, `verify` and `bench`.

use std::time::{Duration, Instant};

use anyhow::Result;
use clap::ValueEnum;
use dso::bottleneck::provider_from_naive;
use dso::compact::{build_compact, Mode, Params};
use dso::io::OracleKind;
use dso::par::Exec;
use dso::provider::{NaiveProvider, Provider};
use dso::reference::ReplacementTable;
use dso::sparse::BaselineOracle;
use dso::tree::AllPairs;
use dso::WeightedDigraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliMode {
    Baseline,
    Loglog,
    Full,
}

impl CliMode {
    pub const ALL: [CliMode; 3] = [CliMode::Baseline, CliMode::Loglog, CliMode::Full];

    pub fn name(self) -> &'static str {
        match self {
            CliMode::Baseline => "baseline",
            CliMode::Loglog => "loglog",
            CliMode::Full => "full",
        }
    }

    fn compact(self) -> Option<Mode> {
        match self {
            CliMode::Baseline => None,
            CliMode::Loglog => Some(Mode::Loglog),
            CliMode::Full => Some(Mode::Full),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProviderKind {
    Naive,
    Bottleneck,
}

/// What to build; `l` and `lp` override the size-dependent defaults.
#[derive(Debug, Clone, Copy)]
pub struct Recipe {
    pub mode: CliMode,
    pub l: Option<u32>,
    pub lp: Option<u32>,
    pub provider: ProviderKind,
}

impl Recipe {
    /// Rejects inconsistent overrides before any graph is read.
    pub fn check(&self) -> Result<()> {
        if let (Some(l), Some(lp)) = (self.l, self.lp) {
            Params { l, lp, mode: Mode::Full }.validate()?;
        }
        for v in [self.l, self.lp].into_iter().flatten() {
            anyhow::ensure!(v >= 2, "L and L' must be at least 2");
        }
        Ok(())
    }

    pub fn params(&self, n: usize) -> Result<Option<Params>> {
        match self.mode.compact() {
            None => Ok(None),
            Some(m) => Ok(Some(Params::new(n, m, self.l, self.lp)?)),
        }
    }
}

pub struct Built {
    pub oracle: OracleKind,
    pub elapsed: Duration,
}

fn with<P: Provider>(p: &P, params: Option<Params>) -> Result<OracleKind> {
    Ok(match params {
        None => OracleKind::Baseline(BaselineOracle::build(p, Exec::Parallel)?),
        Some(params) => OracleKind::Compact(build_compact(p, params, Exec::Parallel)?),
    })
}

pub fn build(g: &WeightedDigraph, recipe: &Recipe) -> Result<Built> {
    let params = recipe.params(g.n())?;
    let start = Instant::now();
    let ap = AllPairs::new(g, Exec::Parallel);
    let tab = ReplacementTable::build(g, &ap, Exec::Parallel);
    let oracle = match recipe.provider {
        ProviderKind::Naive => with(&NaiveProvider::new(g, &ap, &tab), params)?,
        ProviderKind::Bottleneck => with(&provider_from_naive(g, &ap, &tab, Exec::Parallel), params)?,
    };
    Ok(Built { oracle, elapsed: start.elapsed() })
}

/// Stored entries, counted the same way for every mode.
pub fn entries(o: &OracleKind) -> usize {
    match o {
        OracleKind::Baseline(b) => b.tables.entries(),
        OracleKind::Compact(c) => c.counts().total(),
    }
}
