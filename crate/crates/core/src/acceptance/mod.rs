//! Verification scenarios bundled behind a uniform pass/fail interface.
//!
//! Each criterion pins its tolerances and model parameters in code. The
//! `acceptance` integration test asserts every outcome; `ahsim check` prints
//! one line per criterion for command-line use.

pub mod oracles;

/// Outcome of one verification criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn summary_line(&self) -> String {
        format!(
            "criterion {:2} [{}]: {} ({})",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    vec![]
}
