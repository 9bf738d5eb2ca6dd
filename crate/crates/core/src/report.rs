//! Structured pass/fail records.
//!
//! Every verification predicate in this crate reports named residuals next
//! to the threshold each one was compared against, so a report is
//! self-contained evidence. `overall` is the conjunction of the per-check
//! flags.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport {
            checks: Vec::new(),
            notes: Vec::new(),
            overall: true,
        }
    }

    /// Record a check that passes iff `residual <= threshold`.
    ///
    /// Residuals may be negative (eigenvalue margins); a negative residual
    /// is a comfortable pass, not an error.
    pub fn push(&mut self, name: impl Into<String>, residual: f64, threshold: f64) -> bool {
        let pass = residual <= threshold && residual.is_finite();
        self.checks.push(Check {
            name: name.into(),
            residual,
            threshold,
            pass,
        });
        self.overall &= pass;
        pass
    }

    /// Record a PSD-style check: passes iff `min_eig >= -threshold`.
    pub fn push_min_eig(
        &mut self,
        name: impl Into<String>,
        min_eig: f64,
        threshold: f64,
    ) -> bool {
        self.push(name, -min_eig, threshold)
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Absorb another report, prefixing its check names.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for c in other.checks {
            self.checks.push(Check {
                name: format!("{prefix}.{}", c.name),
                ..c
            });
            self.overall &= self.checks.last().unwrap().pass;
        }
        for n in other.notes {
            self.notes.push(format!("{prefix}: {n}"));
        }
    }

    /// Largest recorded residual (`-inf` if no checks ran).
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.residual)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(5)
            .max(5);
        writeln!(f, "{:<width$}  {:>12}  {:>12}  status", "check", "residual", "threshold")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<width$}  {:>12.4e}  {:>12.4e}  {}",
                c.name,
                c.residual,
                c.threshold,
                if c.pass { "PASS" } else { "FAIL" }
            )?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        write!(f, "overall: {}", if self.overall { "PASS" } else { "FAIL" })
    }
}
