//! Jet properties checked against rules computed here from raw derivatives.
//! Each returns a description of the first violation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wagner_core::expr::{multi_indices, BinOp, MAX_ORDER};
use wagner_core::{eval_jet, parse, Expr, Jet, Point};

use super::{smooth_expression, worst_relative, Oracle};

pub type Outcome = Result<(), String>;

pub fn expression(seed: u64) -> Expr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let text = smooth_expression(&mut rng, 3);
    parse(&text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn jet(e: &Expr, x: Point) -> Result<Jet, String> {
    eval_jet(e, x, MAX_ORDER).map_err(|err| format!("{e} at {x}: {err}"))
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, m| acc * (n - m) as f64 / (m + 1) as f64)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Every derivative of `f·g` equals the Leibniz sum.
pub fn product_rule(fs: u64, gs: u64, x: Point) -> Outcome {
    let (f, g) = (expression(fs), expression(gs));
    let product = jet(&Expr::binary(BinOp::Mul, f.clone(), g.clone()), x)?;
    let (jf, jg) = (jet(&f, x)?, jet(&g, x)?);
    for (a, b) in multi_indices(MAX_ORDER) {
        let mut leibniz = 0.0;
        for i in 0..=a {
            for j in 0..=b {
                leibniz +=
                    binom(a, i) * binom(b, j) * jf.derivative(i, j) * jg.derivative(a - i, b - j);
            }
        }
        let got = product.derivative(a, b);
        if !close(got, leibniz, 1e-10) {
            return Err(format!(
                "({a},{b}) of ({f})*({g}) at {x}: {got} vs {leibniz}"
            ));
        }
    }
    Ok(())
}

/// First and second derivatives of `h∘f` for `h` = sin, exp, atan.
pub fn chain_rule(fs: u64, x: Point) -> Outcome {
    let f = expression(fs);
    let jf = jet(&f, x)?;
    let v = jf.value();
    let d = |a, b| jf.derivative(a, b);
    let cases = [
        ("sin", v.sin(), v.cos(), -v.sin()),
        ("exp", v.exp(), v.exp(), v.exp()),
        (
            "atan",
            v.atan(),
            1.0 / (1.0 + v * v),
            -2.0 * v / (1.0 + v * v).powi(2),
        ),
    ];
    for (name, h0, h1, h2) in cases {
        let text = format!("{name}({f})");
        let parsed = parse(&text).map_err(|e| e.to_string())?;
        if !h0.is_finite() {
            // overflow must be reported, not returned
            return match eval_jet(&parsed, x, MAX_ORDER) {
                Err(_) => Ok(()),
                Ok(j) => Err(format!("{text} at {x}: overflow returned {}", j.value())),
            };
        }
        let composed = jet(&parsed, x)?;
        // h'(f)·∂f at first order, h''(f)·∂f·∂f + h'(f)·∂∂f at second
        let want = [
            ((0, 0), h0),
            ((1, 0), h1 * d(1, 0)),
            ((0, 1), h1 * d(0, 1)),
            ((2, 0), h2 * d(1, 0) * d(1, 0) + h1 * d(2, 0)),
            ((1, 1), h2 * d(1, 0) * d(0, 1) + h1 * d(1, 1)),
            ((0, 2), h2 * d(0, 1) * d(0, 1) + h1 * d(0, 2)),
        ];
        for ((a, b), w) in want {
            let got = composed.derivative(a, b);
            if !close(got, w, 1e-10) {
                return Err(format!("{text} ({a},{b}) at {x}: {got} vs {w}"));
            }
        }
    }
    Ok(())
}

/// A polynomial of degree ≤ 4 with coefficients `c_{ab}` in
/// [`multi_indices`] order is differentiated exactly.
pub fn polynomial_exact(coeffs: &[f64], x: Point) -> Outcome {
    let terms: Vec<String> = multi_indices(MAX_ORDER)
        .zip(coeffs)
        .map(|((a, b), c)| format!("({c:.17}) * x1^{a} * x2^{b}"))
        .collect();
    let p = parse(&terms.join(" + ")).map_err(|e| e.to_string())?;
    let jp = jet(&p, x)?;
    let falling = |n: usize, k: usize| (0..k).fold(1.0, |acc, m| acc * (n - m) as f64);
    for (da, db) in multi_indices(MAX_ORDER) {
        let mut want = 0.0;
        for ((a, b), c) in multi_indices(MAX_ORDER).zip(coeffs) {
            if a >= da && b >= db {
                want += c
                    * falling(a, da)
                    * falling(b, db)
                    * x.x1.powi((a - da) as i32)
                    * x.x2.powi((b - db) as i32);
            }
        }
        let got = jp.derivative(da, db);
        if (got - want).abs() > 1e-11 * want.abs().max(1.0) {
            return Err(format!("({da},{db}) at {x}: {got} vs {want}"));
        }
    }
    Ok(())
}

/// Arbitrary input either fails to parse or evaluates to a value or an
/// error; a panic is the only failure.
pub fn fuzz(text: &str, x: Point, order: usize) -> Outcome {
    if let Ok(e) = parse(text) {
        let _ = eval_jet(&e, x, order);
        if parse(&e.to_string()).as_ref() != Ok(&e) {
            return Err(format!("`{text}` does not round-trip through `{e}`"));
        }
    }
    Ok(())
}

/// Worst relative disagreement `|jet - fd| / max(|fd|, 1)` over all
/// derivatives of order ≤ 4 of `count` random smooth expressions.
pub fn finite_difference_agreement(count: usize, seed: u64) -> Result<f64, String> {
    let mut oracle = Oracle::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let text = smooth_expression(&mut rng, 3);
        let e = parse(&text).map_err(|e| format!("{text}: {e}"))?;
        let x = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let fd = oracle
            .derivatives(&e, x, MAX_ORDER)
            .ok_or_else(|| format!("oracle failed on #{i} {text}"))?;
        worst = worst.max(worst_relative(&jet(&e, x)?.derivatives(), &fd));
    }
    Ok(worst)
}
