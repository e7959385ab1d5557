//! Convergence modes for sequences of integrable distributions: strong,
//! weak against test functions, weak against BV functions and quasi-uniform
//! convergence of primitives, with checkers for the sufficient conditions.

mod checks;
mod sequences;

use std::fmt;

pub use checks::{
    default_bv_battery, default_test_battery, n_ladder, quasi_uniform_check, strong_distance, strong_report, theorem_bv_checker,
    theorem_checkers, trend_verdict, weak_bv_report, weak_d_report, QuasiWitness, ReportOptions,
};
pub use sequences::{fixtures, DistributionSequence, FIXTURE_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

impl Verdict {
    /// Holds only if every part holds; fails if any part fails.
    pub fn all<I: IntoIterator<Item = Verdict>>(vs: I) -> Verdict {
        let mut out = Verdict::Holds;
        for v in vs {
            match v {
                Verdict::Fails => return Verdict::Fails,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                Verdict::Holds => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Strong,
    WeakD,
    WeakBv,
    QuasiUniform,
    Theorems,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strong => "strong",
            Mode::WeakD => "weak_d",
            Mode::WeakBv => "weak_bv",
            Mode::QuasiUniform => "quasi_uniform",
            Mode::Theorems => "theorems",
        })
    }
}

/// One numeric observation: the quantity tracked by a check at index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evidence {
    pub n: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub sequence: String,
    pub mode: Mode,
    pub n_range: (u32, u32),
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    pub witnesses: Vec<QuasiWitness>,
}

impl ConvergenceReport {
    pub fn check(&self, label: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.label == label)
    }
}
