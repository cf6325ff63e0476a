//! Per-query instrumentation: table probe counts and the set of query
//! branches taken.

/// Query branches, recorded as bits of [`Trace::route`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Route {
    Trivial,
    OffPath,
    BasePow2,
    BaseCases,
    LoglogPow2,
    LoglogBaseline,
    LoglogCases,
    SplitYX,
    MainNear,
    MainFar,
    TermMarkedFailure,
    TermCrossFromReverse,
    TermNoSecondInterval,
    SmallPathTab,
    SmallPathMain,
    ReduceToRoot,
    ReduceUnmarked,
    MarkedExact,
    MarkedCases,
    Tabulated,
    TabulatedFar,
    Level2Split,
}

impl Route {
    pub const ALL: [Route; 22] = [
        Route::Trivial,
        Route::OffPath,
        Route::BasePow2,
        Route::BaseCases,
        Route::LoglogPow2,
        Route::LoglogBaseline,
        Route::LoglogCases,
        Route::SplitYX,
        Route::MainNear,
        Route::MainFar,
        Route::TermMarkedFailure,
        Route::TermCrossFromReverse,
        Route::TermNoSecondInterval,
        Route::SmallPathTab,
        Route::SmallPathMain,
        Route::ReduceToRoot,
        Route::ReduceUnmarked,
        Route::MarkedExact,
        Route::MarkedCases,
        Route::Tabulated,
        Route::TabulatedFar,
        Route::Level2Split,
    ];
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Trace {
    pub probes: u32,
    pub route: u32,
}

impl Trace {
    #[inline]
    pub fn probe(&mut self, k: u32) {
        self.probes += k;
    }

    #[inline]
    pub fn hit(&mut self, r: Route) {
        self.route |= 1 << r as u32;
    }

    pub fn took(&self, r: Route) -> bool {
        self.route & (1 << r as u32) != 0
    }
}
