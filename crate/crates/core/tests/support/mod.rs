//! Independent oracles shared by the integration tests and the acceptance suite.
//!
//! Derivatives here never touch jet arithmetic: expressions are evaluated in
//! 320-bit floating point and differentiated by central differences, so the
//! truncation error `O(h²)` and the cancellation loss `h^-n` both stay far
//! below `f64` resolution.

#![allow(dead_code)]

pub mod properties;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use rand::Rng;
use wagner_core::expr::{multi_indices, BinOp, Constant, Expr, Func, Var};
use wagner_core::Point;

const PRECISION: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;
/// Finite-difference step; the truncation error is about `h²·|f^(n+2)|`.
const FD_STEP: &str = "1e-12";

pub struct Oracle {
    cc: Consts,
}

impl Default for Oracle {
    fn default() -> Self {
        Self::new()
    }
}

impl Oracle {
    pub fn new() -> Self {
        Self {
            cc: Consts::new().expect("constant cache"),
        }
    }

    fn big(&mut self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, PRECISION)
    }

    fn parse(&mut self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, PRECISION, RM, &mut self.cc)
    }

    pub fn decimal(&mut self, v: &BigFloat) -> f64 {
        let s = v
            .format(Radix::Dec, RM, &mut self.cc)
            .expect("decimal formatting");
        s.parse().unwrap_or(f64::NAN)
    }

    /// Value of `expr` at `(x1, x2)`; `None` outside the domain of a function.
    pub fn eval(&mut self, expr: &Expr, x1: &BigFloat, x2: &BigFloat) -> Option<BigFloat> {
        let p = PRECISION;
        let v = match expr {
            Expr::Num(v) => self.big(*v),
            Expr::Var(Var::X1) => x1.clone(),
            Expr::Var(Var::X2) => x2.clone(),
            Expr::Const(Constant::Pi) => self.cc.pi(p, RM),
            Expr::Const(Constant::E) => self.cc.e(p, RM),
            Expr::Neg(e) => self.eval(e, x1, x2)?.neg(),
            Expr::Binary(op, l, r) => {
                let a = self.eval(l, x1, x2)?;
                if let (BinOp::Pow, Expr::Num(n)) = (op, r.as_ref()) {
                    if n.fract() == 0.0 && *n <= 64.0 {
                        return Some(a.powi(*n as usize, p, RM));
                    }
                }
                let b = self.eval(r, x1, x2)?;
                match op {
                    BinOp::Add => a.add(&b, p, RM),
                    BinOp::Sub => a.sub(&b, p, RM),
                    BinOp::Mul => a.mul(&b, p, RM),
                    BinOp::Div if b.is_zero() => return None,
                    BinOp::Div => a.div(&b, p, RM),
                    BinOp::Pow if !a.is_positive() => return None,
                    BinOp::Pow => a.pow(&b, p, RM, &mut self.cc),
                }
            }
            Expr::Call(f, e) => {
                let a = self.eval(e, x1, x2)?;
                let cc = &mut self.cc;
                match f {
                    Func::Sin => a.sin(p, RM, cc),
                    Func::Cos => a.cos(p, RM, cc),
                    Func::Tan => a.tan(p, RM, cc),
                    Func::Exp => a.exp(p, RM, cc),
                    Func::Log if !a.is_positive() => return None,
                    Func::Log => a.ln(p, RM, cc),
                    Func::Sqrt if !a.is_positive() => return None,
                    Func::Sqrt => a.sqrt(p, RM),
                    Func::Sinh => a.sinh(p, RM, cc),
                    Func::Cosh => a.cosh(p, RM, cc),
                    Func::Tanh => a.tanh(p, RM, cc),
                    Func::Atan => a.atan(p, RM, cc),
                }
            }
        };
        (!v.is_nan() && !v.is_inf()).then_some(v)
    }

    /// Raw partials `∂₁ᵃ∂₂ᵇ expr` at `x` for `a + b ≤ order`, listed in
    /// [`multi_indices`] order, from tensor-product central differences.
    pub fn derivatives(&mut self, expr: &Expr, x: Point, order: usize) -> Option<Vec<f64>> {
        let h = self.parse(FD_STEP);
        let x1 = self.big(x.x1);
        let x2 = self.big(x.x2);
        let mut out = Vec::new();
        for (a, b) in multi_indices(order) {
            let mut acc = self.big(0.0);
            for (i, wi) in stencil(a) {
                for (j, wj) in stencil(b) {
                    let s1 = self.shift(&x1, &h, i);
                    let s2 = self.shift(&x2, &h, j);
                    let f = self.eval(expr, &s1, &s2)?;
                    let w = self.big((wi * wj) as f64);
                    acc = acc.add(&f.mul(&w, PRECISION, RM), PRECISION, RM);
                }
            }
            let scale = h.powi(a + b, PRECISION, RM);
            let d = acc.div(&scale, PRECISION, RM);
            out.push(self.decimal(&d));
        }
        Some(out)
    }

    /// `x + (k/2)·h`.
    fn shift(&mut self, x: &BigFloat, h: &BigFloat, half_steps: i64) -> BigFloat {
        let k = self.big(half_steps as f64 / 2.0);
        x.add(&h.mul(&k, PRECISION, RM), PRECISION, RM)
    }
}

/// `n`-th central difference: offsets in half steps with binomial weights.
fn stencil(n: usize) -> Vec<(i64, i64)> {
    (0..=n)
        .map(|k| {
            let binom = (0..k).fold(1i64, |acc, m| acc * (n - m) as i64 / (m as i64 + 1));
            let sign = if k % 2 == 0 { 1 } else { -1 };
            (n as i64 - 2 * k as i64, sign * binom)
        })
        .collect()
}

/// `|jet - fd| ≤ rel · max(|fd|, 1)` for every listed derivative.
pub fn worst_relative(jet: &[f64], fd: &[f64]) -> f64 {
    jet.iter()
        .zip(fd)
        .map(|(j, f)| (j - f).abs() / f.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Random expression that is smooth (analytic) on the whole plane, written in
/// the surface-expression syntax.
pub fn smooth_expression<R: Rng>(rng: &mut R, depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..4) {
            0 => "x1".into(),
            1 => "x2".into(),
            2 => format!("{:.3}", rng.gen_range(0.1..2.0)),
            _ => ["pi", "e"][rng.gen_range(0..2)].into(),
        };
    }
    let sub = |rng: &mut R| smooth_expression(rng, depth - 1);
    match rng.gen_range(0..13) {
        0 => format!("({} + {})", sub(rng), sub(rng)),
        1 => format!("({} - {})", sub(rng), sub(rng)),
        2 | 3 => format!("({} * {})", sub(rng), sub(rng)),
        4 => format!("{} / (1 + ({})^2)", sub(rng), sub(rng)),
        5 => format!("sin({})", sub(rng)),
        6 => format!("cos({})", sub(rng)),
        7 => format!("exp(tanh({}))", sub(rng)),
        8 => format!("log(1 + ({})^2)", sub(rng)),
        9 => format!("sqrt(2 + sin({}))", sub(rng)),
        10 => format!("atan({})", sub(rng)),
        11 => format!("({})^{}", sub(rng), rng.gen_range(2..4)),
        _ => format!("-sinh(2 * sin({}))", sub(rng)),
    }
}
