//! Cross-validation of the closed forms against the generic frame calculus.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    lifted_connection, lifted_curvature, lifted_frame_sampler, lifted_structure, nonholonomity,
    LiftedCurvature, PAIRS,
};
use crate::connection::{self, FrameSampler};
use crate::sampling::sample_points;
use crate::surface::{gauss_curvature, ConformalSurface};
use crate::{Error, Result};

/// Tolerance of the exact algebraic identities of the connection table.
const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance of `N + K = 0`.
const NONHOLONOMITY_TOL: f64 = 1e-9;

/// One compared quantity, worst case over the samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_deviation,
            tolerance,
            // NaN never passes
            passed: max_deviation <= tolerance,
        }
    }
}

/// Observed range of a quantity over the samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    fn empty() -> Self {
        Self {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn include(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }

    pub fn spread(&self) -> f64 {
        self.max - self.min
    }

    /// `"+"` or `"-"` when the whole range has one strict sign, `"mixed"` otherwise.
    pub fn sign(&self) -> &'static str {
        if self.min > 0.0 {
            "+"
        } else if self.max < 0.0 {
            "-"
        } else {
            "mixed"
        }
    }
}

/// Resolved sign of a frame-plane sectional curvature `⟨R(X,Y)Y,X⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectionalSigns {
    pub plane: String,
    pub range: Range,
    pub sign: &'static str,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub surface: String,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub checks: Vec<CheckResult>,
    /// Ranges of the six closed-form components `R̂_{abcd} = ⟨R(Ɛ_a,Ɛ_b)Ɛ_c,Ɛ_d⟩`.
    pub components: BTreeMap<String, Range>,
    pub sectional: Vec<SectionalSigns>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Compares closed forms with the generic frame calculus at `sample_count`
/// seeded points of the surface's sampling region.
pub fn verify_lift(
    surface: &ConformalSurface,
    sample_count: usize,
    seed: u64,
    tol: f64,
) -> Result<VerifyReport> {
    if sample_count == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be at least 1".into(),
        ));
    }
    let points = sample_points(surface, sample_count, seed)?;
    let sampler = lifted_frame_sampler(surface);
    let mut worst = [0.0f64; 8];
    let mut components = [Range::empty(); 6];
    let mut sectional = [Range::empty(); 3];
    for &x in &points {
        let structure = lifted_structure(surface, x)?;
        let sample = sampler.sample(x)?;
        let bracket = sample.structure_values();
        let gamma = lifted_connection(surface, x)?;
        let closed = lifted_curvature(surface, x)?;
        let closed_table = closed.to_table();
        let oracle = connection::curvature(&sampler, x)?;
        let n = nonholonomity(surface, x)?;
        let k = gauss_curvature(surface, x)?.k;
        let deviations = [
            structure.table.max_deviation(&bracket),
            gamma.max_deviation(&connection::connection_from_structure(&bracket)),
            LiftedCurvature::from_table(&oracle).max_deviation(&closed),
            closed_table.max_deviation(&oracle),
            oracle.defects().max(),
            gamma.metric_defect(),
            gamma.torsion_defect(&structure.table),
            (n + k).abs(),
        ];
        for (w, d) in worst.iter_mut().zip(deviations) {
            // NaN must surface in the report rather than vanish in `max`
            *w = if d.is_nan() { f64::NAN } else { w.max(d) };
        }
        for (r, v) in components.iter_mut().zip(closed.as_array()) {
            r.include(v);
        }
        for (r, (i, j)) in sectional.iter_mut().zip(PAIRS) {
            r.include(connection::sectional(&closed_table, i, j)?);
        }
    }
    let tolerances = [
        tol,
        tol,
        tol,
        tol,
        tol,
        IDENTITY_TOL,
        IDENTITY_TOL,
        NONHOLONOMITY_TOL,
    ];
    let names = [
        "structure_vs_brackets",
        "connection_vs_koszul",
        "curvature_components_vs_oracle",
        "curvature_table_vs_oracle",
        "curvature_identities",
        "metric_compatibility",
        "torsion",
        "nonholonomity_plus_curvature",
    ];
    let checks: Vec<CheckResult> = names
        .iter()
        .zip(worst)
        .zip(tolerances)
        .map(|((name, w), t)| CheckResult::new(*name, w, t))
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        surface: surface.name().to_string(),
        samples: sample_count,
        seed,
        tolerance: tol,
        checks,
        components: LiftedCurvature::NAMES
            .iter()
            .map(|n| n.to_string())
            .zip(components)
            .collect(),
        sectional: PAIRS
            .iter()
            .zip(sectional)
            .map(|(&(i, j), range)| SectionalSigns {
                plane: format!("E{}E{}", i + 1, j + 1),
                range,
                sign: range.sign(),
                stable: range.sign() != "mixed",
            })
            .collect(),
        passed,
    })
}
