//! Registry of identity checks. Each check measures one residual over the
//! sampled points; the runner compares it with the tolerance of its class.

mod connection;
mod gauge;
mod npo;

use fivevec_core::forms::FormField;
use fivevec_core::pentavec::BasisKind;
use fivevec_core::sampling;
use fivevec_core::{ComplexExpression, Expression, Point};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scenario::{GaugeSector, NpoSector, Scenario, Tolerances};

pub type CheckError = Box<dyn std::error::Error + Send + Sync>;

/// Tolerance class of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Class {
    /// Symbolic zero; the residual counts nonzero entries.
    Exact,
    Algebraic,
    FirstDerivative,
    SecondDerivative,
}

impl Class {
    pub fn default_tolerance(self, t: &Tolerances) -> f64 {
        match self {
            Class::Exact => 0.0,
            Class::Algebraic => t.algebraic,
            Class::FirstDerivative => t.first_derivative,
            Class::SecondDerivative => t.second_derivative,
        }
    }
}

/// What a check needs from the scenario before it is enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requires {
    Nothing,
    StandardBasis,
    NormalizedRegularBasis,
    Gauge,
    Npo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub residual: f64,
    /// Points the residual was taken over; 0 for pointwise-free checks.
    pub points: usize,
}

pub type CheckFn = fn(&Context) -> Result<Measurement, CheckError>;

#[derive(Clone, Copy)]
pub struct Check {
    pub name: &'static str,
    /// The identity in formula form, shown on failure.
    pub identity: &'static str,
    pub class: Class,
    pub requires: Requires,
    pub run: CheckFn,
}

impl std::fmt::Debug for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Check").field("name", &self.name).finish()
    }
}

impl Check {
    pub fn enabled_for(&self, s: &Scenario) -> bool {
        match self.requires {
            Requires::Nothing => true,
            Requires::StandardBasis => s.basis.is_standard(),
            Requires::NormalizedRegularBasis => s.basis.kind == BasisKind::NormalizedRegular,
            Requires::Gauge => s.gauge.is_some(),
            Requires::Npo => s.npo.is_some(),
        }
    }
}

/// Inputs shared by every check of one run.
pub struct Context<'a> {
    pub scenario: &'a Scenario,
    pub points: &'a [Point],
    /// Seed for the random fields of this check only.
    pub seed: u64,
}

impl Context<'_> {
    pub fn rng(&self) -> ChaCha8Rng {
        sampling::rng(self.seed)
    }

    pub fn gauge(&self) -> Result<&GaugeSector, CheckError> {
        self.scenario.gauge.as_ref().ok_or_else(|| "scenario has no gauge sector".into())
    }

    pub fn npo(&self) -> Result<&NpoSector, CheckError> {
        self.scenario.npo.as_ref().ok_or_else(|| "scenario has no npo sector".into())
    }

    pub fn measured(&self, residual: f64) -> Result<Measurement, CheckError> {
        Ok(Measurement {
            residual,
            points: self.points.len(),
        })
    }
}

pub(crate) fn exact(nonzero: usize) -> Result<Measurement, CheckError> {
    Ok(Measurement {
        residual: nonzero as f64,
        points: 0,
    })
}

pub(crate) fn real_diffs(a: &[Expression], b: &[Expression]) -> Vec<Expression> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn complex_diffs(a: &[ComplexExpression], b: &[ComplexExpression]) -> Vec<ComplexExpression> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn nonzero_values(f: &FormField) -> usize {
    f.all_values().filter(|v| !v.is_zero()).count()
}

/// Every check, sorted by name.
pub fn registry() -> Vec<Check> {
    let mut all: Vec<Check> = connection::CHECKS
        .iter()
        .chain(gauge::CHECKS)
        .chain(npo::CHECKS)
        .copied()
        .collect();
    all.sort_by_key(|c| c.name);
    all
}

pub fn find(name: &str) -> Option<Check> {
    registry().into_iter().find(|c| c.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_sorted() {
        let names: Vec<&str> = registry().iter().map(|c| c.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names, sorted);
    }
}
