//! Named residual checks shared by the verification routines.

use std::fmt;

use crate::linalg::ComplexMatrix;

/// One residual compared against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tol,
        }
    }

    /// NaN residuals never pass.
    pub fn passed(&self) -> bool {
        self.residual <= self.tol
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<6} {:<40} residual {:.3e}  tol {:.1e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.residual,
            self.tol
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        self.checks.push(Check::new(name, residual, tol));
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.get(name).map(|c| c.residual)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Residual of an identity `Σ terms = 0`, scaled by the size of its terms.
///
/// Returns `‖diff‖_F / max(1, Σ‖term‖_F)`, so identities between large
/// matrices are judged relative to their magnitude and small ones absolutely.
pub fn scaled_residual(diff: &ComplexMatrix, terms: &[&ComplexMatrix]) -> f64 {
    let scale: f64 = terms.iter().map(|t| t.frobenius_norm()).sum();
    diff.frobenius_norm() / scale.max(1.0)
}

/// `‖a − b‖_F / max(1, ‖b‖_F)`.
pub fn relative_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.distance(b) / b.frobenius_norm().max(1.0)
}
