//! The lifted geometry recomputed in coordinates `(x1, x2, φ)`.
//!
//! The oracle builds the lifted frame from high-precision derivatives of `λ`,
//! forms the coordinate metric, and differentiates it numerically. The
//! connection comes from a least-squares solve of the compatibility and
//! torsion equations, the curvature from coordinate Christoffel symbols. Only
//! the definition of the frame is shared with the library.

#![allow(clippy::needless_range_loop)]

mod support;

use nalgebra::{DMatrix, DVector, Matrix3};
use wagner_core::connection::sectional;
use wagner_core::lift::{
    lifted_connection, lifted_curvature, lifted_frame, lifted_structure, nonholonomity,
};
use wagner_core::sampling::sample_points;
use wagner_core::surface::gauss_curvature;
use wagner_core::{catalog, ConformalSurface, Point};

/// Step of the `f64` differences taken on oracle quantities.
const H: f64 = 1e-3;

struct Coordinates<'a> {
    surface: &'a ConformalSurface,
    oracle: support::Oracle,
}

/// `[λ, λ₁, λ₂, λ₁₁, λ₁₂, λ₂₂]` and the base quantities built from them.
struct Base {
    lambda: [f64; 6],
}

impl Base {
    fn scale(&self) -> f64 {
        (-self.lambda[0]).exp()
    }

    fn c112(&self) -> f64 {
        self.scale() * self.lambda[2]
    }

    fn c212(&self) -> f64 {
        -self.scale() * self.lambda[1]
    }

    fn k(&self) -> f64 {
        -(-2.0 * self.lambda[0]).exp() * (self.lambda[3] + self.lambda[5])
    }
}

impl<'a> Coordinates<'a> {
    fn new(surface: &'a ConformalSurface) -> Self {
        Self {
            surface,
            oracle: support::Oracle::new(),
        }
    }

    fn base(&mut self, x: Point) -> Base {
        let d = self
            .oracle
            .derivatives(self.surface.lambda(), x, 2)
            .expect("lambda defined");
        Base {
            lambda: d.try_into().unwrap(),
        }
    }

    /// Rows are the coordinate components of `Ɛ₁, Ɛ₂, Ɛ₃`.
    fn frame(&mut self, x: Point) -> Matrix3<f64> {
        let b = self.base(x);
        let s = b.scale();
        Matrix3::new(s, 0.0, -b.c112(), 0.0, s, -b.c212(), 0.0, 0.0, b.k())
    }

    fn metric(&mut self, x: Point) -> Matrix3<f64> {
        let coframe = self.frame(x).transpose().try_inverse().expect("frame");
        coframe.transpose() * coframe
    }

    /// First and second coordinate derivatives by fourth-order differences;
    /// nothing depends on `φ`.
    fn derivatives<T>(
        &mut self,
        x: Point,
        f: impl Fn(&mut Self, Point) -> T,
    ) -> (T, [T; 3], [[T; 3]; 3])
    where
        T: Copy
            + Default
            + std::ops::Add<Output = T>
            + std::ops::Sub<Output = T>
            + std::ops::Mul<f64, Output = T>,
    {
        let at = |me: &mut Self, a: f64, b: f64| f(me, Point::new(x.x1 + a * H, x.x2 + b * H));
        let center = at(self, 0.0, 0.0);
        let w1 = [(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)];
        let mut first = [T::default(); 3];
        let mut second = [[T::default(); 3]; 3];
        for axis in 0..2 {
            let shift = |k: f64| if axis == 0 { (k, 0.0) } else { (0.0, k) };
            let vals: Vec<T> = [2.0, 1.0, -1.0, -2.0]
                .iter()
                .map(|&k| {
                    let (a, b) = shift(k);
                    at(self, a, b)
                })
                .collect();
            let mut d1 = T::default();
            for (v, (_, w)) in vals.iter().zip(w1) {
                d1 = d1 + *v * w;
            }
            first[axis] = d1 * (1.0 / (12.0 * H));
            let d2 = (vals[1] + vals[2]) * 16.0 - (vals[0] + vals[3]) - center * 30.0;
            second[axis][axis] = d2 * (1.0 / (12.0 * H * H));
        }
        let mut mixed = T::default();
        for (a, wa) in w1 {
            for (b, wb) in w1 {
                mixed = mixed + at(self, a, b) * (wa * wb);
            }
        }
        mixed = mixed * (1.0 / (144.0 * H * H));
        second[0][1] = mixed;
        second[1][0] = mixed;
        (center, first, second)
    }

    /// `c^k_{ij}` from coordinate brackets of the frame fields.
    fn structure(&mut self, x: Point) -> [[[f64; 3]; 3]; 3] {
        let (frame, d, _) = self.derivatives(x, |me, p| me.frame(p));
        let coframe = frame.transpose().try_inverse().expect("frame");
        let apply = |v: usize, w: usize, mu: usize| -> f64 {
            (0..3).map(|nu| frame[(v, nu)] * d[nu][(w, mu)]).sum()
        };
        let mut c = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for mu in 0..3 {
                    let bracket = apply(i, j, mu) - apply(j, i, mu);
                    for (k, ck) in c.iter_mut().enumerate() {
                        ck[i][j] += coframe[(k, mu)] * bracket;
                    }
                }
            }
        }
        c
    }

    /// `⟨R(Ɛa,Ɛb)Ɛc,Ɛd⟩` from coordinate Christoffel symbols.
    fn curvature(&mut self, x: Point) -> [[[[f64; 3]; 3]; 3]; 3] {
        let (g, dg, ddg) = self.derivatives(x, |me, p| me.metric(p));
        let frame = self.frame(x);
        let gi = g.try_inverse().expect("metric");
        // lowered Γ_{κμν} = ½(∂_μ g_κν + ∂_ν g_κμ - ∂_κ g_μν) and its derivatives
        let lower = |k: usize, m: usize, n: usize, d: &[Matrix3<f64>; 3]| {
            0.5 * (d[m][(k, n)] + d[n][(k, m)] - d[k][(m, n)])
        };
        let mut gamma = [[[0.0; 3]; 3]; 3];
        let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3];
        for r in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    for k in 0..3 {
                        gamma[r][m][n] += gi[(r, k)] * lower(k, m, n, &dg);
                    }
                    for s in 0..3 {
                        let dgi = -gi * dg[s] * gi;
                        for k in 0..3 {
                            dgamma[s][r][m][n] += dgi[(r, k)] * lower(k, m, n, &dg)
                                + gi[(r, k)] * lower(k, m, n, &ddg[s]);
                        }
                    }
                }
            }
        }
        // R^ρ_{σμν} = ∂_μΓ^ρ_{νσ} - ∂_νΓ^ρ_{μσ} + Γ^ρ_{μλ}Γ^λ_{νσ} - Γ^ρ_{νλ}Γ^λ_{μσ}
        let mut riemann = [[[[0.0; 3]; 3]; 3]; 3];
        for r in 0..3 {
            for s in 0..3 {
                for m in 0..3 {
                    for n in 0..3 {
                        let mut v = dgamma[m][r][n][s] - dgamma[n][r][m][s];
                        for l in 0..3 {
                            v += gamma[r][m][l] * gamma[l][n][s] - gamma[r][n][l] * gamma[l][m][s];
                        }
                        riemann[r][s][m][n] = v;
                    }
                }
            }
        }
        let mut out = [[[[0.0; 3]; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        let mut v = 0.0;
                        for m in 0..3 {
                            for n in 0..3 {
                                for s in 0..3 {
                                    for r in 0..3 {
                                        let lowered: f64 =
                                            (0..3).map(|k| g[(k, r)] * frame[(d, k)]).sum();
                                        v += frame[(a, m)]
                                            * frame[(b, n)]
                                            * frame[(c, s)]
                                            * lowered
                                            * riemann[r][s][m][n];
                                    }
                                }
                            }
                        }
                        out[a][b][c][d] = v;
                    }
                }
            }
        }
        out
    }
}

/// Solves `Γ^k_{ij} + Γ^j_{ik} = 0` and `Γ^k_{ij} - Γ^k_{ji} = c^k_{ij}` in the
/// least-squares sense.
fn connection_by_least_squares(c: &[[[f64; 3]; 3]; 3]) -> [[[f64; 3]; 3]; 3] {
    let idx = |k: usize, i: usize, j: usize| (k * 3 + i) * 3 + j;
    let mut a = DMatrix::zeros(54, 27);
    let mut rhs = DVector::zeros(54);
    let mut row = 0;
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                a[(row, idx(k, i, j))] += 1.0;
                a[(row, idx(j, i, k))] += 1.0;
                row += 1;
                a[(row, idx(k, i, j))] += 1.0;
                a[(row, idx(k, j, i))] -= 1.0;
                rhs[row] = c[k][i][j];
                row += 1;
            }
        }
    }
    let solution = a.svd(true, true).solve(&rhs, 1e-12).expect("svd");
    std::array::from_fn(|k| {
        std::array::from_fn(|i| std::array::from_fn(|j| solution[idx(k, i, j)]))
    })
}

fn surfaces() -> Vec<ConformalSurface> {
    ["sphere", "halfplane", "bump"]
        .into_iter()
        .map(|n| catalog(n).unwrap())
        .collect()
}

#[test]
fn base_quantities_match_oracle() {
    for s in surfaces() {
        let mut coords = Coordinates::new(&s);
        for x in sample_points(&s, 10, 3).unwrap() {
            let b = coords.base(x);
            let g = gauss_curvature(&s, x).unwrap();
            let scale = g.k.abs().max(1.0);
            assert!((g.c112 - b.c112()).abs() < 1e-10 * scale, "{x}");
            assert!((g.c212 - b.c212()).abs() < 1e-10 * scale, "{x}");
            assert!(
                (g.k - b.k()).abs() < 1e-10 * scale,
                "{x}: {} vs {}",
                g.k,
                b.k()
            );
            // frame derivatives of K by differencing the oracle K
            let (_, dk, _) = coords.derivatives(x, |me, p| me.base(p).k());
            let e = b.scale();
            let grad_scale = g.e1k.abs().max(g.e2k.abs()).max(1.0);
            assert!((g.e1k - e * dk[0]).abs() < 1e-7 * grad_scale, "{x}");
            assert!((g.e2k - e * dk[1]).abs() < 1e-7 * grad_scale, "{x}");
        }
    }
}

#[test]
fn frame_matches_definition() {
    for s in surfaces() {
        let mut coords = Coordinates::new(&s);
        for x in sample_points(&s, 5, 4).unwrap() {
            let want = coords.frame(x);
            let got = lifted_frame(&s, x).unwrap();
            for a in 0..3 {
                for m in 0..3 {
                    assert!((got.matrix[a][m] - want[(a, m)]).abs() < 1e-10 * want.amax().max(1.0));
                }
            }
        }
    }
}

#[test]
fn structure_connection_and_nonholonomity_match_oracle() {
    for s in surfaces() {
        let mut coords = Coordinates::new(&s);
        for x in sample_points(&s, 8, 5).unwrap() {
            let c = coords.structure(x);
            let scale = c
                .iter()
                .flatten()
                .flatten()
                .fold(1.0f64, |m, v| m.max(v.abs()));
            let structure = lifted_structure(&s, x).unwrap();
            let gamma_oracle = connection_by_least_squares(&c);
            let gamma = lifted_connection(&s, x).unwrap();
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let dc = (structure.table.get(k, i, j) - c[k][i][j]).abs();
                        assert!(dc < 1e-7 * scale, "{} c{k}{i}{j} at {x}: {dc:e}", s.name());
                        let dg = (gamma.get(k, i, j) - gamma_oracle[k][i][j]).abs();
                        assert!(dg < 1e-7 * scale, "{} Γ{k}{i}{j} at {x}: {dg:e}", s.name());
                    }
                }
            }
            // the ∂φ coefficient of the vertical part of [Ɛ₁, Ɛ₂]
            let k = coords.base(x).k();
            let vertical = c[2][0][1] * k;
            assert!((nonholonomity(&s, x).unwrap() - vertical).abs() < 1e-7 * k.abs().max(1.0));
        }
    }
}

#[test]
fn curvature_matches_coordinate_oracle() {
    for s in surfaces() {
        let mut coords = Coordinates::new(&s);
        for x in sample_points(&s, 6, 6).unwrap() {
            let oracle = coords.curvature(x);
            let closed = lifted_curvature(&s, x).unwrap();
            let scale = closed.as_array().iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let pairs = [(0, 1), (0, 2), (1, 2)];
            let mut k = 0;
            for (p, &(a, b)) in pairs.iter().enumerate() {
                for &(c, d) in &pairs[p..] {
                    let want = oracle[a][b][c][d];
                    let got = closed.as_array()[k];
                    assert!(
                        (got - want).abs() < 1e-6 * scale,
                        "{} {} at {x}: {got} vs {want}",
                        s.name(),
                        wagner_core::LiftedCurvature::NAMES[k]
                    );
                    k += 1;
                }
            }
        }
    }
}

/// The mixed components carry a minus sign: the positive forms `e1K/K` and
/// `e2K/K` disagree with the oracle wherever `grad K ≠ 0`.
#[test]
fn positive_mixed_component_sign_disagrees() {
    let s = catalog("bump").unwrap();
    let mut coords = Coordinates::new(&s);
    let x = Point::new(0.4, -0.3);
    let g = gauss_curvature(&s, x).unwrap();
    let oracle = coords.curvature(x);
    let positive_1213 = g.e1k / g.k;
    let positive_1223 = g.e2k / g.k;
    assert!(positive_1213.abs() > 0.1 && positive_1223.abs() > 0.1);
    assert!((oracle[0][1][0][2] + positive_1213).abs() < 1e-6);
    assert!((oracle[0][1][1][2] + positive_1223).abs() < 1e-6);
    assert!((oracle[0][1][0][2] - positive_1213).abs() > 0.2);
}

/// The half-plane frame has constant structure constants, so its curvature is
/// that of a left-invariant metric: `R(X,Y) = [∇_X, ∇_Y] - ∇_{[X,Y]}` with
/// `∇_X Y = ½([X,Y] - ad*_X Y - ad*_Y X)`, all as 3×3 matrices.
#[test]
fn half_plane_left_invariant_curvature() {
    let s = catalog("halfplane").unwrap();
    let x = Point::new(0.3, 1.7);
    let c = lifted_structure(&s, x).unwrap().table;
    // structure constants are the same at a second point
    let other = lifted_structure(&s, Point::new(-2.0, 0.4)).unwrap().table;
    assert!(c.max_deviation(&other) < 1e-14);
    let ad: Vec<Matrix3<f64>> = (0..3)
        .map(|i| Matrix3::from_fn(|k, j| c.get(k, i, j)))
        .collect();
    let e = |i: usize| Matrix3::<f64>::identity().column(i).into_owned();
    let nabla: Vec<Matrix3<f64>> = (0..3)
        .map(|i| {
            Matrix3::from_columns(&[0, 1, 2].map(|j| {
                0.5 * (ad[i] * e(j) - ad[i].transpose() * e(j) - ad[j].transpose() * e(i))
            }))
        })
        .collect();
    let curvature = |i: usize, j: usize| {
        let bracket = ad[i] * e(j);
        let mut nabla_bracket = Matrix3::zeros();
        for (k, n) in nabla.iter().enumerate() {
            nabla_bracket += bracket[k] * n;
        }
        nabla[i] * nabla[j] - nabla[j] * nabla[i] - nabla_bracket
    };
    let sec = |i: usize, j: usize| (curvature(i, j) * e(j)).dot(&e(i));
    assert!((sec(0, 1) + 1.75).abs() < 1e-14);
    assert!((sec(0, 2) - 0.25).abs() < 1e-14);
    assert!((sec(1, 2) - 0.25).abs() < 1e-14);
    let table = lifted_curvature(&s, x).unwrap().to_table();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        assert!((sectional(&table, i, j).unwrap() - sec(i, j)).abs() < 1e-14);
    }
    // the whole curvature operator agrees, not only the sectional values
    for a in 0..3 {
        for b in 0..3 {
            for cc in 0..3 {
                for d in 0..3 {
                    let want = (curvature(a, b) * e(cc)).dot(&e(d));
                    assert!((table.form(a, b, cc, d) - want).abs() < 1e-14);
                }
            }
        }
    }
}
