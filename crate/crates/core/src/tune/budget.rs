//! Round budgeting.
//!
//! With one timing run `t_G` on the original graph and a total budget `T`,
//! `R = ⌊T / t_G⌋` and the synopsis round count `r` is the largest integer
//! with
//!
//! ```text
//! (1 + ⌊R/2⌋)·t_G + r·t_G·ρ ≤ T
//! ```
//!
//! All arithmetic is exact: durations are integer nanoseconds and `ρ` is a
//! rational.

use std::fmt;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BudgetError {
    #[error("budget {total:?} is below two runs of {run:?}")]
    TooSmall { total: Duration, run: Duration },
    #[error("runtime ratio must lie in (0, 1], got {0}")]
    InvalidRatio(String),
    #[error("run time must be positive")]
    ZeroRunTime,
}

/// Exact non-negative rational `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    /// Nearest rational with denominator 2^40.
    pub fn approximate(x: f64) -> Self {
        const DEN: u64 = 1 << 40;
        Self::new((x * DEN as f64).round() as u64, DEN)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_unit_interval(self) -> bool {
        self.num > 0 && self.num <= self.den
    }

    /// `⌊d · self⌋` in nanoseconds.
    pub fn scale(self, d: Duration) -> Duration {
        let ns = d.as_nanos() * self.num as u128 / self.den as u128;
        nanos(ns)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn nanos(ns: u128) -> Duration {
    Duration::new((ns / 1_000_000_000) as u64, (ns % 1_000_000_000) as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TuningBudget {
    pub total: Duration,
    pub run_time: Duration,
    /// `R = ⌊T / t_G⌋`.
    pub original_rounds: u64,
    pub rho: Ratio,
    /// `r`, synopsis-phase rounds.
    pub synopsis_rounds: u64,
}

impl TuningBudget {
    /// `⌊R/2⌋`, the phase-1 validation rounds on the original graph.
    pub fn validation_rounds(&self) -> u64 {
        self.original_rounds / 2
    }

    /// `(1 + ⌊R/2⌋)·t_G + r·t_G·ρ` in nanoseconds, exact.
    pub fn accounted_nanos(&self) -> u128 {
        accounted(self.run_time.as_nanos(), self.validation_rounds(), self.synopsis_rounds, self.rho)
    }

    /// Time left after the accounted phase-1 work.
    pub fn phase2_reserve(&self) -> Duration {
        let accounted_ceil = {
            let t = self.run_time.as_nanos();
            let fixed = (1 + self.validation_rounds() as u128) * t;
            let syn = self.synopsis_rounds as u128 * t * self.rho.num as u128;
            fixed + syn.div_ceil(self.rho.den as u128)
        };
        nanos(self.total.as_nanos().saturating_sub(accounted_ceil))
    }

    /// Checks `accounted ≤ T < accounted + t_G·ρ` with exact arithmetic
    /// (everything multiplied through by `ρ.den`).
    pub fn satisfies_identity(&self) -> bool {
        let t = self.run_time.as_nanos();
        let den = self.rho.den as u128;
        let num = self.rho.num as u128;
        let fixed = (1 + self.validation_rounds() as u128) * t * den;
        let used = fixed + self.synopsis_rounds as u128 * t * num;
        let total = self.total.as_nanos() * den;
        used <= total && total < used + t * num
    }
}

fn accounted(t: u128, validation: u64, synopsis: u64, rho: Ratio) -> u128 {
    (1 + validation as u128) * t + synopsis as u128 * t * rho.num as u128 / rho.den as u128
}

/// Derives `R` and `r` from the budget, the measured run time and `ρ`.
pub fn compute_rounds(total: Duration, run_time: Duration, rho: Ratio) -> Result<TuningBudget, BudgetError> {
    if run_time.is_zero() {
        return Err(BudgetError::ZeroRunTime);
    }
    if !rho.is_unit_interval() {
        return Err(BudgetError::InvalidRatio(rho.to_string()));
    }
    let t = run_time.as_nanos();
    let big_t = total.as_nanos();
    if big_t < 2 * t {
        return Err(BudgetError::TooSmall {
            total,
            run: run_time,
        });
    }
    let original_rounds = (big_t / t) as u64;
    let fixed = (1 + (original_rounds / 2) as u128) * t;
    // r = ⌊(T − fixed) / (t·ρ)⌋ = ⌊(T − fixed)·den / (t·num)⌋
    let synopsis_rounds =
        ((big_t - fixed) * rho.den as u128 / (t * rho.num as u128)) as u64;
    Ok(TuningBudget {
        total,
        run_time,
        original_rounds,
        rho,
        synopsis_rounds,
    })
}

/// Serializable view of a [`TuningBudget`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetReport {
    pub total_secs: f64,
    pub run_time_secs: f64,
    pub original_rounds: u64,
    pub validation_rounds: u64,
    pub synopsis_rounds: u64,
    pub rho: f64,
    pub rho_exact: String,
    pub accounted_secs: f64,
}

impl From<&TuningBudget> for BudgetReport {
    fn from(b: &TuningBudget) -> Self {
        Self {
            total_secs: b.total.as_secs_f64(),
            run_time_secs: b.run_time.as_secs_f64(),
            original_rounds: b.original_rounds,
            validation_rounds: b.validation_rounds(),
            synopsis_rounds: b.synopsis_rounds,
            rho: b.rho.to_f64(),
            rho_exact: b.rho.to_string(),
            accounted_secs: b.accounted_nanos() as f64 * 1e-9,
        }
    }
}
