//! Levi-Civita calculus for orthonormal frames in dimension 2 or 3.
//!
//! Everything here is expressed through structure functions
//! `[e_i, e_j] = c^k_{ij} e_k` and frame derivatives of scalar jets, so the
//! same code handles the base surface, the lifted frame on the bundle and
//! constant-structure frames on Lie groups. Indices are zero-based.

use std::ops::{Add, Mul};

use serde::Serialize;

use crate::expr::{Jet, Var};
use crate::{Error, Point, Result};

/// Structure functions `c^k_{ij}` at a point, antisymmetric in `(i, j)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureTable {
    dim: usize,
    data: Vec<f64>,
}

impl StructureTable {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.dim + i) * self.dim + j
    }

    /// `c^k_{ij}`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(k, i, j)]
    }

    /// Sets `c^k_{ij} = value` and `c^k_{ji} = -value`.
    pub fn set(&mut self, k: usize, i: usize, j: usize, value: f64) {
        let a = self.idx(k, i, j);
        let b = self.idx(k, j, i);
        self.data[a] = value;
        self.data[b] = -value;
    }

    fn from_raw(dim: usize, data: Vec<f64>) -> Self {
        Self { dim, data }
    }

    /// Largest `|c^k_{ij} + c^k_{ji}|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((self.get(k, i, j) + self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }

    /// Largest entrywise difference to another table of the same dimension.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }
}

/// Connection coefficients `Γ^k_{ij}`, defined by `∇_{e_i} e_j = Γ^k_{ij} e_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnectionTable {
    dim: usize,
    gamma: Vec<f64>,
}

impl ConnectionTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^k_{ij}`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.dim + i) * self.dim + j]
    }

    /// Largest `|Γ^k_{ij} + Γ^j_{ik}|`; zero for a metric connection in an orthonormal frame.
    pub fn metric_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((self.get(k, i, j) + self.get(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Largest `|Γ^k_{ij} - Γ^k_{ji} - c^k_{ij}|`; zero for a torsion-free connection.
    pub fn torsion_defect(&self, c: &StructureTable) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let t = self.get(k, i, j) - self.get(k, j, i) - c.get(k, i, j);
                    worst = worst.max(t.abs());
                }
            }
        }
        worst
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        max_abs_diff(&self.gamma, &other.gamma)
    }
}

/// Lowered curvature components `R_{lijk} = ⟨R(e_i, e_j) e_k, e_l⟩` with
/// `R(X, Y) = ∇_X∇_Y - ∇_Y∇_X - ∇_{[X,Y]}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureTable {
    dim: usize,
    r: Vec<f64>,
}

/// Worst violations of the algebraic curvature identities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureDefects {
    /// `R_{lijk} + R_{ljik}`
    pub antisymmetry_ij: f64,
    /// `R_{lijk} + R_{kijl}`
    pub antisymmetry_lk: f64,
    /// `R_{lijk} + R_{ljki} + R_{lkij}`
    pub bianchi: f64,
    /// `R_{lijk} - R_{jkli}`
    pub pair: f64,
}

impl CurvatureDefects {
    pub fn max(&self) -> f64 {
        self.antisymmetry_ij
            .max(self.antisymmetry_lk)
            .max(self.bianchi)
            .max(self.pair)
    }
}

impl CurvatureTable {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            r: vec![0.0; dim.pow(4)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, l: usize, i: usize, j: usize, k: usize) -> usize {
        ((l * self.dim + i) * self.dim + j) * self.dim + k
    }

    /// `R_{lijk} = ⟨R(e_i, e_j) e_k, e_l⟩`.
    pub fn get(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        self.r[self.idx(l, i, j, k)]
    }

    pub fn set(&mut self, l: usize, i: usize, j: usize, k: usize, value: f64) {
        let at = self.idx(l, i, j, k);
        self.r[at] = value;
    }

    /// `⟨R(e_a, e_b) e_c, e_d⟩`, argument order as written.
    pub fn form(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.get(d, a, b, c)
    }

    pub fn defects(&self) -> CurvatureDefects {
        let n = self.dim;
        let mut d = CurvatureDefects {
            antisymmetry_ij: 0.0,
            antisymmetry_lk: 0.0,
            bianchi: 0.0,
            pair: 0.0,
        };
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let r = self.get(l, i, j, k);
                        d.antisymmetry_ij = d.antisymmetry_ij.max((r + self.get(l, j, i, k)).abs());
                        d.antisymmetry_lk = d.antisymmetry_lk.max((r + self.get(k, i, j, l)).abs());
                        let b = r + self.get(l, j, k, i) + self.get(l, k, i, j);
                        d.bianchi = d.bianchi.max(b.abs());
                        d.pair = d.pair.max((r - self.get(j, k, l, i)).abs());
                    }
                }
            }
        }
        d
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        max_abs_diff(&self.r, &other.r)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "tables of different dimension");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Sectional curvature `⟨R(e_i, e_j) e_j, e_i⟩` of the plane spanned by two frame vectors.
pub fn sectional(table: &CurvatureTable, i: usize, j: usize) -> Result<f64> {
    let dim = table.dim();
    if i == j || i >= dim || j >= dim {
        return Err(Error::BadIndex { i, j, dim });
    }
    Ok(table.get(i, i, j, j))
}

/// Jets of an orthonormal frame's structure functions at one point, together
/// with the frame's action on scalar jets.
#[derive(Clone, Debug)]
pub struct FrameSample {
    dim: usize,
    structure: Vec<Jet>,
    /// Components of each frame vector along `∂₁`, `∂₂`. Every field handled
    /// here is independent of any further chart coordinate.
    base_components: Vec<[Jet; 2]>,
}

impl FrameSample {
    pub fn new(dim: usize, structure: Vec<Jet>, base_components: Vec<[Jet; 2]>) -> Self {
        assert_eq!(structure.len(), dim * dim * dim);
        assert_eq!(base_components.len(), dim);
        Self {
            dim,
            structure,
            base_components,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c^k_{ij}` as a jet.
    pub fn structure_jet(&self, k: usize, i: usize, j: usize) -> &Jet {
        &self.structure[(k * self.dim + i) * self.dim + j]
    }

    pub fn structure_values(&self) -> StructureTable {
        StructureTable::from_raw(self.dim, self.structure.iter().map(Jet::value).collect())
    }

    /// `e_i f`.
    pub fn derive(&self, i: usize, f: &Jet) -> Jet {
        let [a, b] = &self.base_components[i];
        *a * f.partial(Var::X1) + *b * f.partial(Var::X2)
    }
}

/// Source of orthonormal-frame data at chart points.
pub trait FrameSampler {
    fn dim(&self) -> usize;

    fn sample(&self, x: Point) -> Result<FrameSample>;
}

/// Frame with constant structure functions, e.g. left-invariant fields on a Lie group.
#[derive(Clone, Debug)]
pub struct ConstantFrame {
    table: StructureTable,
}

impl ConstantFrame {
    pub fn new(table: StructureTable) -> Self {
        Self { table }
    }
}

impl FrameSampler for ConstantFrame {
    fn dim(&self) -> usize {
        self.table.dim()
    }

    fn sample(&self, _x: Point) -> Result<FrameSample> {
        let order = 1;
        let n = self.table.dim();
        let structure = self
            .table
            .data
            .iter()
            .map(|&c| Jet::constant(c, order))
            .collect();
        let zero = Jet::constant(0.0, order);
        Ok(FrameSample::new(n, structure, vec![[zero, zero]; n]))
    }
}

/// Frame given by its vector-field components in a chart; the structure
/// functions are obtained by bracketing the fields and re-expanding the
/// brackets in the frame.
///
/// `fields(x)[i][μ]` is the `μ`-th chart component of `e_i`. Chart
/// coordinates past the first two are ignorable: no field depends on them.
/// Component jets need order ≥ 2 for [`curvature`] to be available.
pub struct CoordinateFrame<F> {
    dim: usize,
    fields: F,
}

impl<F> CoordinateFrame<F>
where
    F: Fn(Point) -> Result<Vec<Vec<Jet>>>,
{
    pub fn new(dim: usize, fields: F) -> Self {
        Self { dim, fields }
    }
}

impl<F> FrameSampler for CoordinateFrame<F>
where
    F: Fn(Point) -> Result<Vec<Vec<Jet>>>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, x: Point) -> Result<FrameSample> {
        let n = self.dim;
        let fields = (self.fields)(x)?;
        assert!(fields.len() == n && fields.iter().all(|row| row.len() == n));
        let apply = |i: usize, f: &Jet| {
            fields[i][0] * f.partial(Var::X1) + fields[i][1] * f.partial(Var::X2)
        };
        let inverse = invert(&fields)?;
        let mut structure = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut c: Option<Jet> = None;
                    for mu in 0..n {
                        let bracket = apply(i, &fields[j][mu]) - apply(j, &fields[i][mu]);
                        let term = bracket * inverse[mu][k];
                        c = Some(match c {
                            Some(acc) => acc + term,
                            None => term,
                        });
                    }
                    structure.push(c.expect("dim >= 1"));
                }
            }
        }
        let base_components = fields.iter().map(|row| [row[0], row[1]]).collect();
        Ok(FrameSample::new(n, structure, base_components))
    }
}

/// Gauss-Jordan inverse of a small matrix of jets, pivoting on value terms.
fn invert(m: &[Vec<Jet>]) -> Result<Vec<Vec<Jet>>> {
    let n = m.len();
    let order = m.iter().flatten().map(Jet::order).min().unwrap_or(0);
    let mut a: Vec<Vec<Jet>> = m.to_vec();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Jet::constant(if i == j { 1.0 } else { 0.0 }, order))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].value().abs().total_cmp(&a[q][col].value().abs()))
            .expect("non-empty");
        if a[pivot][col].value() == 0.0 {
            return Err(Error::DivisionByZero);
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].recip()?;
        for j in 0..n {
            a[col][j] = a[col][j] * p;
            inv[col][j] = inv[col][j] * p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col];
            for j in 0..n {
                a[row][j] = a[row][j] - factor * a[col][j];
                inv[row][j] = inv[row][j] - factor * inv[col][j];
            }
        }
    }
    Ok(inv)
}

/// `Γ^k_{ij} = ½ (c^k_{ij} + c^j_{ki} + c^i_{kj})`, the Koszul formula for an
/// orthonormal frame. Works on plain values and on jets alike.
fn koszul_table<T>(dim: usize, c: impl Fn(usize, usize, usize) -> T) -> Vec<T>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    let mut out = Vec::with_capacity(dim * dim * dim);
    for k in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                out.push((c(k, i, j) + c(j, k, i) + c(i, k, j)) * 0.5);
            }
        }
    }
    out
}

/// Levi-Civita coefficients of an orthonormal frame with the given structure functions.
pub fn connection_from_structure(c: &StructureTable) -> ConnectionTable {
    ConnectionTable {
        dim: c.dim(),
        gamma: koszul_table(c.dim(), |k, i, j| c.get(k, i, j)),
    }
}

/// Levi-Civita coefficients of the sampled frame at `x`.
pub fn koszul(frame: &dyn FrameSampler, x: Point) -> Result<ConnectionTable> {
    let sample = frame.sample(x)?;
    Ok(connection_from_structure(&sample.structure_values()))
}

/// Full lowered curvature table of the sampled frame at `x`.
///
/// `R^l_{ijk} = e_iΓ^l_{jk} - e_jΓ^l_{ik} + Γ^l_{is}Γ^s_{jk} - Γ^l_{js}Γ^s_{ik} - c^s_{ij}Γ^l_{sk}`,
/// with the frame derivatives taken exactly on jets of `Γ`.
pub fn curvature(frame: &dyn FrameSampler, x: Point) -> Result<CurvatureTable> {
    let sample = frame.sample(x)?;
    let n = sample.dim();
    let gamma = koszul_table(n, |k, i, j| *sample.structure_jet(k, i, j));
    if gamma.iter().any(|g| g.order() == 0) {
        return Err(Error::InvalidArgument(
            "frame sampler must supply structure jets of order >= 1".into(),
        ));
    }
    let g = |k: usize, i: usize, j: usize| gamma[(k * n + i) * n + j].value();
    let c = sample.structure_values();
    let mut table = CurvatureTable::zeros(n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut r = sample.derive(i, &gamma[(l * n + j) * n + k]).value()
                        - sample.derive(j, &gamma[(l * n + i) * n + k]).value();
                    for s in 0..n {
                        r += g(l, i, s) * g(s, j, k)
                            - g(l, j, s) * g(s, i, k)
                            - c.get(s, i, j) * g(l, s, k);
                    }
                    table.set(l, i, j, k, r);
                }
            }
        }
    }
    Ok(table)
}
