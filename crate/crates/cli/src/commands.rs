use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use anyhow::{Context, Result};
use dso::io::{OracleKind, SavedOracle};
use dso::recover::recover_path;
use dso::reference::QueryAnswer;
use dso::{load_graph, Vertex, WeightedDigraph};

use crate::make::{self, Recipe};

pub fn read_graph(path: &Path) -> Result<WeightedDigraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    load_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn report(saved: &SavedOracle, out: &mut impl Write) -> io::Result<()> {
    let g = &saved.graph;
    writeln!(out, "graph: n={} m={}", g.n(), g.m())?;
    match &saved.oracle {
        OracleKind::Baseline(b) => {
            writeln!(out, "mode: baseline")?;
            writeln!(out, "sparse table entries: {}", b.tables.entries())?;
            writeln!(out, "level-ancestor words: {}", b.ap.la_words())?;
        }
        OracleKind::Compact(c) => {
            let k = c.counts();
            let mode = format!("{:?}", c.params.mode).to_lowercase();
            writeln!(out, "mode: {mode} (L={}, L'={})", c.params.l, c.params.lp)?;
            let rows = [
                ("level-1 entries", k.level1),
                ("capped sparse table entries", k.loglog),
                ("level-2 entries", k.level2),
                ("reduction entries", k.reduce),
                ("chain entries", k.chains),
                ("tabulation matrices", k.matrices),
                ("dictionary cells", k.dict_cells),
                ("pairwise entries", k.pairwise),
                ("total entries", k.total()),
                ("partition index words", k.index_words),
                ("level-ancestor words", k.la_words),
            ];
            for (name, v) in rows {
                writeln!(out, "{name}: {v}")?;
            }
        }
    }
    Ok(())
}

pub fn build(graph: &Path, recipe: &Recipe, out: &Path) -> Result<()> {
    let g = read_graph(graph)?;
    let built = make::build(&g, recipe)?;
    let saved = SavedOracle { graph: g, oracle: built.oracle };
    saved.save(out).with_context(|| format!("writing {}", out.display()))?;
    let mut stdout = io::stdout().lock();
    report(&saved, &mut stdout)?;
    writeln!(stdout, "entries: {}", make::entries(&saved.oracle))?;
    writeln!(stdout, "wall time: {:.3}s", built.elapsed.as_secs_f64())?;
    Ok(())
}

pub fn stats(oracle: &Path) -> Result<()> {
    let saved = SavedOracle::load(oracle).with_context(|| format!("loading {}", oracle.display()))?;
    report(&saved, &mut io::stdout().lock())?;
    Ok(())
}

/// A 1-based `s t f` line as 0-based ids, or `None` if malformed or out of range.
fn parse_triple(line: &str, n: usize) -> Option<(Vertex, Vertex, Vertex)> {
    let mut it = line.split_whitespace().map(|x| x.parse::<u64>().ok().filter(|&v| v >= 1 && v <= n as u64));
    let mut next = || it.next().flatten().map(|v| (v - 1) as Vertex);
    let triple = (next()?, next()?, next()?);
    it.next().is_none().then_some(triple)
}

fn answer_line(saved: &SavedOracle, line: &str, with_path: bool) -> String {
    let Some((s, t, f)) = parse_triple(line, saved.graph.n()) else {
        return QueryAnswer::Invalid.to_string();
    };
    let o = saved.oracle();
    if !with_path {
        return o.query(s, t, f).unwrap_or(QueryAnswer::Invalid).to_string();
    }
    match recover_path(o, &saved.graph, s, t, f) {
        Ok(r) => match r.path {
            Some(p) => {
                let ids: Vec<String> = p.iter().map(|v| (v + 1).to_string()).collect();
                format!("{}\t{}", r.answer, ids.join(" "))
            }
            None => r.answer.to_string(),
        },
        Err(_) => QueryAnswer::Invalid.to_string(),
    }
}

pub fn query(oracle: &Path, queries: Option<&Path>, with_path: bool) -> Result<()> {
    let saved = SavedOracle::load(oracle).with_context(|| format!("loading {}", oracle.display()))?;
    let input: Box<dyn BufRead> = match queries {
        Some(p) => Box::new(BufReader::new(File::open(p).with_context(|| format!("opening {}", p.display()))?)),
        None => Box::new(io::stdin().lock()),
    };
    let mut out = io::stdout().lock();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writeln!(out, "{}", answer_line(&saved, &line, with_path))?;
    }
    Ok(())
}
