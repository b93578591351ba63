use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Work units per deterministic millisecond. Calibrated so one deterministic
/// millisecond is roughly one wall-clock millisecond of optimized search on a
/// single 3–4 GHz core.
pub const WORK_UNITS_PER_MS: u64 = 100_000;

/// How often (in clock ticks) the budget is actually re-checked.
const CHECK_EVERY: u32 = 64;

/// Wall-clock budgets follow real time. Work budgets count deterministic
/// work units instead, so a truncated search returns the same result on any
/// machine and under any load.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClockMode {
    #[default]
    Wall,
    Work,
}

impl std::str::FromStr for ClockMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "wall" => Ok(ClockMode::Wall),
            "work" => Ok(ClockMode::Work),
            other => Err(format!("unknown clock `{other}` (expected wall or work)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Budget {
    pub ms: u64,
    pub clock: ClockMode,
}

impl Budget {
    pub fn wall(ms: u64) -> Self {
        Budget {
            ms,
            clock: ClockMode::Wall,
        }
    }

    pub fn work(ms: u64) -> Self {
        Budget {
            ms,
            clock: ClockMode::Work,
        }
    }
}

#[derive(Debug)]
pub(crate) struct Clock {
    mode: ClockMode,
    started: Instant,
    work: u64,
    limit_ms: u64,
    ticks: u32,
    expired: bool,
}

impl Clock {
    pub(crate) fn start(budget: Budget) -> Self {
        Clock {
            mode: budget.clock,
            started: Instant::now(),
            work: 0,
            limit_ms: budget.ms,
            ticks: 0,
            expired: budget.ms == 0,
        }
    }

    #[inline]
    pub(crate) fn charge(&mut self, units: u64) {
        self.work += units;
    }

    pub(crate) fn elapsed_ms(&self) -> u64 {
        match self.mode {
            ClockMode::Wall => self.started.elapsed().as_millis() as u64,
            ClockMode::Work => self.work / WORK_UNITS_PER_MS,
        }
    }

    pub(crate) fn work(&self) -> u64 {
        self.work
    }

    /// Cheap periodic check; the budget is re-read every 64 ticks.
    #[inline]
    pub(crate) fn tick(&mut self) -> bool {
        self.ticks += 1;
        if self.ticks >= CHECK_EVERY {
            self.ticks = 0;
            self.expired = self.elapsed_ms() >= self.limit_ms;
        }
        self.expired
    }

    pub(crate) fn expired(&self) -> bool {
        self.expired
    }
}
