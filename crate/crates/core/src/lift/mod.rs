//! Lift of the base metric to the orthonormal frame bundle.
//!
//! In the trivialization `(x¹, x², φ)` induced by the base frame, the
//! horizontal lifts of `e₁, e₂` are `e_a - c^a₁₂ ∂_φ`, and the lifted metric
//! `ĝ` is the one for which
//!
//! ```text
//! Ɛ₁ = e₁ - c¹₁₂ ∂_φ,   Ɛ₂ = e₂ - c²₁₂ ∂_φ,   Ɛ₃ = K ∂_φ
//! ```
//!
//! is orthonormal. `ĝ` degenerates over points with `K = 0`; every operation
//! that needs `ĝ` fails there with [`Error::SingularCurvature`].
//!
//! Frame indices are zero-based: `0, 1, 2` stand for `Ɛ₁, Ɛ₂, Ɛ₃`.

mod verify;

use serde::Serialize;

use crate::connection::{self, ConnectionTable, CoordinateFrame, CurvatureTable, StructureTable};
use crate::expr::{Jet, Var};
use crate::surface::{gauss_curvature, BaseGeometry, ConformalSurface};
use crate::{Error, Point, Result};

pub use verify::{verify_lift, CheckResult, Range, SectionalSigns, VerifyReport};

/// `|K|` below this makes the lifted metric singular.
pub const KAPPA_MIN: f64 = 1e-8;

/// Chart components of the lifted orthonormal frame at a base point.
///
/// Row `i` holds `Ɛ_i` in the basis `(∂₁, ∂₂, ∂_φ)`; nothing depends on `φ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LiftedFrame {
    pub point: Point,
    pub matrix: [[f64; 3]; 3],
}

impl LiftedFrame {
    pub fn determinant(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

/// Structure functions `ĉ^k_{ij}` of the lifted frame with the base data they came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftedStructure {
    pub table: StructureTable,
    pub base: BaseGeometry,
}

/// The six independent curvature components of `ĝ`, written
/// `R̂_{abcd} = ⟨R(Ɛ_a, Ɛ_b) Ɛ_c, Ɛ_d⟩` (one-based names).
///
/// With this convention the sectional curvature of the plane `Ɛ_a ∧ Ɛ_b` is `-R̂_{abab}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LiftedCurvature {
    pub r1212: f64,
    pub r1213: f64,
    pub r1223: f64,
    pub r1313: f64,
    pub r1323: f64,
    pub r2323: f64,
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

fn pair_index(a: usize, b: usize) -> Option<(usize, f64)> {
    let (lo, hi, sign) = match a.cmp(&b) {
        std::cmp::Ordering::Less => (a, b, 1.0),
        std::cmp::Ordering::Greater => (b, a, -1.0),
        std::cmp::Ordering::Equal => return None,
    };
    PAIRS.iter().position(|&p| p == (lo, hi)).map(|i| (i, sign))
}

impl LiftedCurvature {
    /// Symmetric matrix of the curvature operator on bivectors, basis `Ɛ₁₂, Ɛ₁₃, Ɛ₂₃`.
    fn pair_matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.r1212, self.r1213, self.r1223],
            [self.r1213, self.r1313, self.r1323],
            [self.r1223, self.r1323, self.r2323],
        ]
    }

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.r1212, self.r1213, self.r1223, self.r1313, self.r1323, self.r2323,
        ]
    }

    pub const NAMES: [&'static str; 6] = ["R1212", "R1213", "R1223", "R1313", "R1323", "R2323"];

    /// Full lowered table assembled through the curvature symmetries.
    pub fn to_table(&self) -> CurvatureTable {
        let m = self.pair_matrix();
        let mut table = CurvatureTable::zeros(3);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        if let (Some((p, s1)), Some((q, s2))) = (pair_index(a, b), pair_index(c, d))
                        {
                            table.set(d, a, b, c, s1 * s2 * m[p][q]);
                        }
                    }
                }
            }
        }
        table
    }

    pub fn from_table(table: &CurvatureTable) -> Self {
        let r = |a, b, c, d| table.form(a, b, c, d);
        Self {
            r1212: r(0, 1, 0, 1),
            r1213: r(0, 1, 0, 2),
            r1223: r(0, 1, 1, 2),
            r1313: r(0, 2, 0, 2),
            r1323: r(0, 2, 1, 2),
            r2323: r(1, 2, 1, 2),
        }
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn nonsingular(x: Point, base: &BaseGeometry) -> Result<()> {
    if base.k.abs() < KAPPA_MIN || base.second.is_none() {
        return Err(Error::SingularCurvature {
            point: x,
            curvature: base.k,
        });
    }
    Ok(())
}

/// Base geometry at a point where the lift is defined.
pub fn lift_base(surface: &ConformalSurface, x: Point) -> Result<BaseGeometry> {
    let base = gauss_curvature(surface, x)?;
    nonsingular(x, &base)?;
    Ok(base)
}

/// `Ɛ₁ = e₁ - c¹₁₂∂_φ`, `Ɛ₂ = e₂ - c²₁₂∂_φ`, `Ɛ₃ = K∂_φ` at `x`.
pub fn lifted_frame(surface: &ConformalSurface, x: Point) -> Result<LiftedFrame> {
    let f = surface.fields(x, 2)?;
    let k = f.nonsingular_curvature()?;
    let s = f.conformal.value();
    Ok(LiftedFrame {
        point: x,
        matrix: [
            [s, 0.0, -f.c112.value()],
            [0.0, s, -f.c212.value()],
            [0.0, 0.0, k],
        ],
    })
}

/// `∂_φ`-component of the vertical part of `[E^h₁, E^h₂]`, obtained by
/// bracketing the horizontal lifts and splitting off their horizontal span.
///
/// The bracket itself exists on flat charts, but like every lift operation
/// this refuses points where the lifted metric is undefined.
pub fn nonholonomity(surface: &ConformalSurface, x: Point) -> Result<f64> {
    let f = surface.fields(x, 2)?;
    f.nonsingular_curvature()?;
    let zero = Jet::constant(0.0, f.conformal.order());
    let h1 = [f.conformal, zero, -f.c112];
    let h2 = [zero, f.conformal, -f.c212];
    let apply = |v: &[Jet; 3], g: &Jet| v[0] * g.partial(Var::X1) + v[1] * g.partial(Var::X2);
    let bracket: [f64; 3] =
        std::array::from_fn(|mu| (apply(&h1, &h2[mu]) - apply(&h2, &h1[mu])).value());
    let s = f.conformal.value();
    let (a, b) = (bracket[0] / s, bracket[1] / s);
    Ok(bracket[2] + a * f.c112.value() + b * f.c212.value())
}

/// Closed-form `ĉ^k_{ij}` of the lifted frame.
pub fn lifted_structure(surface: &ConformalSurface, x: Point) -> Result<LiftedStructure> {
    let base = lift_base(surface, x)?;
    let table = structure_table(base.c112, base.c212, base.log_gradient());
    Ok(LiftedStructure { table, base })
}

/// `ĉ` from `c¹₁₂`, `c²₁₂` and `e_aK/K`.
pub(crate) fn structure_table(c112: f64, c212: f64, log_gradient: [f64; 2]) -> StructureTable {
    let mut table = StructureTable::zeros(3);
    table.set(0, 0, 1, c112);
    table.set(1, 0, 1, c212);
    table.set(2, 0, 1, -1.0);
    table.set(2, 0, 2, log_gradient[0]);
    table.set(2, 1, 2, log_gradient[1]);
    table
}

/// Levi-Civita coefficients `Γ̂^k_{ij}` of `ĝ` in the lifted frame, from the
/// closed-form structure functions.
pub fn lifted_connection(surface: &ConformalSurface, x: Point) -> Result<ConnectionTable> {
    Ok(connection::connection_from_structure(
        &lifted_structure(surface, x)?.table,
    ))
}

/// Closed-form curvature components of `ĝ` from base quantities.
///
/// The mixed components `R̂₁₂₁₃ = -e₁K/K` and `R̂₁₂₂₃ = -e₂K/K` carry the
/// sign that the generic frame calculus produces in the same convention as
/// `R̂₁₂₁₂ = ¾ - K`.
pub fn lifted_curvature_components(base: &BaseGeometry) -> Option<LiftedCurvature> {
    let s = base.second?;
    let [a, b] = base.log_gradient();
    Some(LiftedCurvature {
        r1212: 0.75 - base.k,
        r1213: -a,
        r1223: -b,
        r1313: -0.25 - s[0][0] - base.c112 * b + a * a,
        r1323: -s[0][1] + base.c112 * a + a * b,
        r2323: -0.25 - s[1][1] + base.c212 * a + b * b,
    })
}

pub fn lifted_curvature(surface: &ConformalSurface, x: Point) -> Result<LiftedCurvature> {
    let base = lift_base(surface, x)?;
    Ok(lifted_curvature_components(&base).expect("nonsingular base has second derivatives"))
}

/// Full curvature table of `ĝ` assembled from the closed-form components.
pub fn lifted_curvature_closed(surface: &ConformalSurface, x: Point) -> Result<CurvatureTable> {
    Ok(lifted_curvature(surface, x)?.to_table())
}

/// Sectional curvature `⟨R(Ɛ_i, Ɛ_j)Ɛ_j, Ɛ_i⟩` of a frame plane.
pub fn lifted_sectional(surface: &ConformalSurface, x: Point, i: usize, j: usize) -> Result<f64> {
    if i == j || i > 2 || j > 2 {
        return Err(Error::BadIndex { i, j, dim: 3 });
    }
    connection::sectional(&lifted_curvature_closed(surface, x)?, i, j)
}

/// Frame-plane sectional curvatures `(Ɛ₁Ɛ₂, Ɛ₁Ɛ₃, Ɛ₂Ɛ₃)`.
pub fn lifted_sectionals(surface: &ConformalSurface, x: Point) -> Result<[f64; 3]> {
    let table = lifted_curvature_closed(surface, x)?;
    let mut out = [0.0; 3];
    for (o, (i, j)) in out.iter_mut().zip(PAIRS) {
        *o = connection::sectional(&table, i, j)?;
    }
    Ok(out)
}

/// Generic frame sampler over the lifted frame's chart components: the
/// independent route to `ĉ`, `Γ̂` and `R̂`, sharing nothing with the closed forms
/// above beyond the jet of `λ`.
pub fn lifted_frame_sampler(
    surface: &ConformalSurface,
) -> CoordinateFrame<impl Fn(Point) -> Result<Vec<Vec<Jet>>> + '_> {
    CoordinateFrame::new(3, move |x| {
        let f = surface.fields(x, 4)?;
        f.nonsingular_curvature()?;
        let zero = Jet::constant(0.0, f.conformal.order());
        Ok(vec![
            vec![f.conformal, zero, -f.c112],
            vec![zero, f.conformal, -f.c212],
            vec![zero, zero, f.curvature],
        ])
    })
}
