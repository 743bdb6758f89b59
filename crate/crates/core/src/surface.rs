//! The base surface `(M, g)` in a conformal chart.
//!
//! With `g = e^{2λ}((dx¹)² + (dx²)²)` the frame `e_a = e^{-λ}∂_a` is
//! orthonormal, and its bracket `[e₁, e₂] = c¹₁₂e₁ + c²₁₂e₂` has
//! `c¹₁₂ = e^{-λ}∂₂λ`, `c²₁₂ = -e^{-λ}∂₁λ`. The Gaussian curvature is then
//! `K = e₁c²₁₂ - e₂c¹₁₂ - (c¹₁₂)² - (c²₁₂)²`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::connection::CoordinateFrame;
use crate::expr::{eval_jet, parse, Expr, Jet, Var};
use crate::lift::KAPPA_MIN;
use crate::{Error, Point, Result};

/// Chart-validity predicate.
#[derive(Clone, Debug, PartialEq)]
pub enum Guard {
    /// The whole plane.
    All,
    /// Points where the expression evaluates to a positive number.
    Positive(Expr),
}

impl Guard {
    /// Parses `all`, `x2>0`, or any `<expr> > 0`.
    pub fn parse(text: &str) -> Result<Guard> {
        let trimmed = text.trim();
        if trimmed == "all" {
            return Ok(Guard::All);
        }
        let invalid = || Error::InvalidGuard(text.to_string());
        let (lhs, rhs) = trimmed.rsplit_once('>').ok_or_else(invalid)?;
        if rhs.trim() != "0" {
            return Err(invalid());
        }
        Ok(Guard::Positive(parse(lhs)?))
    }

    pub fn holds(&self, x: Point) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self {
            Guard::All => true,
            Guard::Positive(e) => eval_jet(e, x, 0).is_ok_and(|v| v.value() > 0.0),
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::All => f.write_str("all"),
            Guard::Positive(e) => write!(f, "{e} > 0"),
        }
    }
}

/// Axis-aligned box that random sample points are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x1: [f64; 2],
    pub x2: [f64; 2],
}

impl Region {
    pub const fn new(x1: [f64; 2], x2: [f64; 2]) -> Self {
        Self { x1, x2 }
    }
}

impl Default for Region {
    fn default() -> Self {
        Self::new([-1.0, 1.0], [-1.0, 1.0])
    }
}

/// Surface configuration record, as stored in JSON files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub name: String,
    pub lambda: String,
    #[serde(default = "default_guard")]
    pub guard: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
}

fn default_guard() -> String {
    "all".into()
}

/// A 2-D metric `g = e^{2λ}((dx¹)² + (dx²)²)` on a guarded chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalSurface {
    name: String,
    lambda: Expr,
    guard: Guard,
    region: Region,
}

impl ConformalSurface {
    pub fn new(name: impl Into<String>, lambda: Expr, guard: Guard) -> Self {
        Self {
            name: name.into(),
            lambda,
            guard,
            region: Region::default(),
        }
    }

    pub fn with_region(mut self, region: Region) -> Self {
        self.region = region;
        self
    }

    pub fn from_config(config: &SurfaceConfig) -> Result<Self> {
        let surface = Self::new(
            config.name.clone(),
            parse(&config.lambda)?,
            Guard::parse(&config.guard)?,
        );
        Ok(match config.region {
            Some(region) => surface.with_region(region),
            None => surface,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: SurfaceConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("surface config: {e}")))?;
        Self::from_config(&config)
    }

    pub fn to_config(&self) -> SurfaceConfig {
        SurfaceConfig {
            name: self.name.clone(),
            lambda: self.lambda.to_string(),
            guard: self.guard.to_string(),
            region: Some(self.region),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lambda(&self) -> &Expr {
        &self.lambda
    }

    pub fn guard(&self) -> &Guard {
        &self.guard
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn contains(&self, x: Point) -> bool {
        self.guard.holds(x)
    }

    pub fn check(&self, x: Point) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideChart {
                surface: self.name.clone(),
                guard: self.guard.to_string(),
                point: x,
            })
        }
    }

    /// Jet of `λ` at a guarded point.
    pub fn lambda_jet(&self, x: Point, order: usize) -> Result<Jet> {
        self.check(x)?;
        eval_jet(&self.lambda, x, order)
    }

    /// Frame fields and curvature as jets, from a jet of `λ` of the given order.
    pub fn fields(&self, x: Point, order: usize) -> Result<BaseFields> {
        BaseFields::new(self, x, order)
    }

    /// Generic frame sampler for `e_a = e^{-λ}∂_a`; its structure functions come
    /// from brackets of the coordinate vector fields.
    pub fn frame_sampler(&self) -> CoordinateFrame<impl Fn(Point) -> Result<Vec<Vec<Jet>>> + '_> {
        CoordinateFrame::new(2, move |x| {
            let scale = (-self.lambda_jet(x, 4)?).exp();
            let zero = Jet::constant(0.0, scale.order());
            Ok(vec![vec![scale, zero], vec![zero, scale]])
        })
    }
}

/// Base-frame quantities as jets at one point.
#[derive(Clone, Copy, Debug)]
pub struct BaseFields {
    point: Point,
    /// `e^{-λ}`; the frame is `e_a = conformal · ∂_a`.
    pub conformal: Jet,
    pub c112: Jet,
    pub c212: Jet,
    /// Gaussian curvature, two orders below the `λ` jet.
    pub curvature: Jet,
}

impl BaseFields {
    fn new(surface: &ConformalSurface, x: Point, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument(format!(
                "curvature needs a jet of lambda of order >= 2, got {order}"
            )));
        }
        let lambda = surface.lambda_jet(x, order)?;
        let conformal = (-lambda).exp();
        let c112 = conformal * lambda.partial(Var::X2);
        let c212 = -(conformal * lambda.partial(Var::X1));
        let along = |var, f: &Jet| conformal * f.partial(var);
        let curvature = along(Var::X1, &c212) - along(Var::X2, &c112) - c112 * c112 - c212 * c212;
        let fields = Self {
            point: x,
            conformal,
            c112,
            c212,
            curvature,
        };
        if !curvature.is_finite() || !c112.is_finite() || !c212.is_finite() {
            return Err(Error::NonFinite {
                what: "frame field",
                point: x,
            });
        }
        Ok(fields)
    }

    pub fn point(&self) -> Point {
        self.point
    }

    /// `e_a f` for `a ∈ {0, 1}`.
    pub fn along(&self, a: usize, f: &Jet) -> Jet {
        let var = if a == 0 { Var::X1 } else { Var::X2 };
        self.conformal * f.partial(var)
    }

    /// Gaussian curvature value, failing below the singularity threshold.
    pub fn nonsingular_curvature(&self) -> Result<f64> {
        let k = self.curvature.value();
        if k.abs() < KAPPA_MIN {
            Err(Error::SingularCurvature {
                point: self.point,
                curvature: k,
            })
        } else {
            Ok(k)
        }
    }
}

/// Base-surface quantities at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BaseGeometry {
    pub c112: f64,
    pub c212: f64,
    /// Gaussian curvature `K`.
    pub k: f64,
    pub e1k: f64,
    pub e2k: f64,
    /// `second[i][j] = e_i(e_j K / K)`; absent where `|K|` is below the
    /// singularity threshold.
    pub second: Option<[[f64; 2]; 2]>,
}

impl BaseGeometry {
    /// `e_a K / K`.
    pub fn log_gradient(&self) -> [f64; 2] {
        [self.e1k / self.k, self.e2k / self.k]
    }
}

/// `(c¹₁₂, c²₁₂)` at `x`.
pub fn structure_functions(surface: &ConformalSurface, x: Point) -> Result<(f64, f64)> {
    let f = surface.fields(x, 2)?;
    Ok((f.c112.value(), f.c212.value()))
}

/// Gaussian curvature and the frame derivatives of `K` needed by the lift.
pub fn gauss_curvature(surface: &ConformalSurface, x: Point) -> Result<BaseGeometry> {
    let f = surface.fields(x, 4)?;
    let k = f.curvature;
    let grad = [f.along(0, &k), f.along(1, &k)];
    let second = if k.value().abs() >= KAPPA_MIN {
        let ratio = [grad[0].try_div(&k)?, grad[1].try_div(&k)?];
        Some(std::array::from_fn(|i| {
            std::array::from_fn(|j| f.along(i, &ratio[j]).value())
        }))
    } else {
        None
    };
    let geometry = BaseGeometry {
        c112: f.c112.value(),
        c212: f.c212.value(),
        k: k.value(),
        e1k: grad[0].value(),
        e2k: grad[1].value(),
        second,
    };
    let finite = [geometry.k, geometry.e1k, geometry.e2k]
        .into_iter()
        .chain(second.iter().flatten().flatten().copied())
        .all(f64::is_finite);
    if !finite {
        return Err(Error::NonFinite {
            what: "curvature",
            point: x,
        });
    }
    Ok(geometry)
}

/// Catalog names accepted by [`catalog`].
pub const CATALOG: [&str; 3] = ["sphere", "halfplane", "bump"];

/// Built-in surfaces: the round sphere in a stereographic chart, the Poincaré
/// half-plane, and a nonconstant negatively curved bump `λ = x1² + x2²`.
pub fn catalog(name: &str) -> Result<ConformalSurface> {
    let (lambda, guard, region) = match name {
        "sphere" => (
            "log(2) - log(1 + x1^2 + x2^2)",
            Guard::All,
            Region::new([-2.0, 2.0], [-2.0, 2.0]),
        ),
        "halfplane" => (
            "-log(x2)",
            Guard::Positive(Expr::Var(Var::X2)),
            Region::new([-2.0, 2.0], [0.25, 4.0]),
        ),
        "bump" => (
            "x1^2 + x2^2",
            Guard::All,
            Region::new([-1.0, 1.0], [-1.0, 1.0]),
        ),
        other => return Err(Error::UnknownSurface(other.to_string())),
    };
    Ok(
        ConformalSurface::new(name, parse(lambda).expect("catalog expression"), guard)
            .with_region(region),
    )
}
