//! Fixed-size 4×4 linear algebra and index bookkeeping for spacetime tensors.
//!
//! Storage is row-major. For vierbein matrices the row is the local (Latin)
//! index and the column the global (Greek) index, so `h[k][mu]` is `h_k^mu`.
//! The metric signature is `(+, -, -, -)`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative degeneracy threshold: `|det| <= DEGENERACY_REL * max|entry|^4`.
pub const DEGENERACY_REL: f64 = 1e-10;

/// Components of a rank-3 object with all indices in 0..4, e.g. `A[k][l][mu]`.
pub type Rank3 = [[[f64; 4]; 4]; 4];
/// Components of a rank-4 object, e.g. `R[k][l][mu][nu]`.
pub type Rank4 = [[[[f64; 4]; 4]; 4]; 4];

pub const fn zero_rank3() -> Rank3 {
    [[[0.0; 4]; 4]; 4]
}

pub const fn zero_rank4() -> Rank4 {
    [[[[0.0; 4]; 4]; 4]; 4]
}

/// Diagonal of the Minkowski metric.
pub const ETA_DIAG: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Matrix4(pub [[f64; 4]; 4]);

impl Matrix4 {
    pub const fn zeros() -> Self {
        Matrix4([[0.0; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::diag([1.0; 4])
    }

    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    /// Builds a matrix, rejecting NaN or infinite entries.
    pub fn try_new(rows: [[f64; 4]; 4]) -> Result<Self> {
        if rows.iter().flatten().all(|v| v.is_finite()) {
            Ok(Matrix4(rows))
        } else {
            Err(Error::InvalidTensor("non-finite matrix entry".into()))
        }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_fn(|i, j| k * self.0[i][j])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn apply(&self, v: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix4) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.max_abs_diff(&self.transpose())
    }
}

impl Index<usize> for Matrix4 {
    type Output = [f64; 4];
    fn index(&self, i: usize) -> &[f64; 4] {
        &self.0[i]
    }
}

impl IndexMut<usize> for Matrix4 {
    fn index_mut(&mut self, i: usize) -> &mut [f64; 4] {
        &mut self.0[i]
    }
}

impl Mul for Matrix4 {
    type Output = Matrix4;
    fn mul(self, o: Matrix4) -> Matrix4 {
        Matrix4::from_fn(|i, j| (0..4).map(|k| self.0[i][k] * o.0[k][j]).sum())
    }
}

impl Add for Matrix4 {
    type Output = Matrix4;
    fn add(self, o: Matrix4) -> Matrix4 {
        Matrix4::from_fn(|i, j| self.0[i][j] + o.0[i][j])
    }
}

impl Sub for Matrix4 {
    type Output = Matrix4;
    fn sub(self, o: Matrix4) -> Matrix4 {
        Matrix4::from_fn(|i, j| self.0[i][j] - o.0[i][j])
    }
}

/// The local Lorentz metric `diag(+1, -1, -1, -1)`.
pub fn minkowski_eta() -> Matrix4 {
    Matrix4::diag(ETA_DIAG)
}

/// Determinant by LU elimination with partial pivoting.
pub fn det4(m: &Matrix4) -> f64 {
    det_generic(m.0)
}

fn degeneracy_threshold(m: &Matrix4) -> f64 {
    DEGENERACY_REL * m.max_abs().powi(4)
}

/// Inverse of a 4×4 matrix. Fails with [`Error::Degenerate`] when
/// `|det| <= 1e-10 * max|entry|^4`.
pub fn invert4(m: &Matrix4) -> Result<Matrix4> {
    let det = det4(m);
    let threshold = degeneracy_threshold(m);
    if !(det.abs() > threshold) {
        return Err(Error::Degenerate { det, threshold });
    }
    inverse_generic(m.0).map(Matrix4).ok_or(Error::Degenerate { det, threshold })
}

/// LU determinant over any [`Scalar`]; pivots on primal values.
pub fn det_generic<T: Scalar>(mut a: [[T; 4]; 4]) -> T {
    let mut det = T::one();
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].value().abs().total_cmp(&a[j][col].value().abs()))
            .unwrap_or(col);
        if a[pivot][col].value() == 0.0 {
            return T::zero();
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det = det * p;
        for row in col + 1..4 {
            let f = a[row][col] / p;
            for k in col..4 {
                let sub = f * a[col][k];
                a[row][k] -= sub;
            }
        }
    }
    det
}

/// Gauss–Jordan inverse over any [`Scalar`]. Returns `None` on an exactly
/// zero pivot; callers apply their own conditioning checks.
pub fn inverse_generic<T: Scalar>(m: [[T; 4]; 4]) -> Option<[[T; 4]; 4]> {
    let mut a = m;
    let mut inv = [[T::zero(); 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = T::one();
    }
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].value().abs().total_cmp(&a[j][col].value().abs()))?;
        if a[pivot][col].value() == 0.0 {
            return None;
        }
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let p = a[col][col];
        for k in 0..4 {
            a[col][k] = a[col][k] / p;
            inv[col][k] = inv[col][k] / p;
        }
        for row in 0..4 {
            if row == col {
                continue;
            }
            let f = a[row][col];
            for k in 0..4 {
                let s1 = f * a[col][k];
                let s2 = f * inv[col][k];
                a[row][k] -= s1;
                inv[row][k] -= s2;
            }
        }
    }
    Some(inv)
}

/// Solves the dense square system `a x = b` by Gaussian elimination with
/// partial pivoting. Fails with [`Error::SingularSystem`] when a pivot falls
/// below `rel_tol` times the largest coefficient.
pub fn solve_dense<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>, rel_tol: f64) -> Result<Vec<T>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("non-square linear system".into()));
    }
    let scale = a
        .iter()
        .flatten()
        .fold(0.0_f64, |m, v| m.max(v.value().abs()));
    if scale == 0.0 {
        return Err(Error::SingularSystem);
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].value().abs().total_cmp(&a[j][col].value().abs()))
            .unwrap_or(col);
        if a[pivot][col].value().abs() <= rel_tol * scale {
            return Err(Error::SingularSystem);
        }
        a.swap(pivot, col);
        b.swap(pivot, col);
        let p = a[col][col];
        for row in col + 1..n {
            // a zero primal value may still carry a derivative part
            let f = a[row][col] / p;
            for k in col..n {
                let sub = f * a[col][k];
                a[row][k] -= sub;
            }
            let sub = f * b[col];
            b[row] -= sub;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Signature of a symmetric matrix as (positive, negative) eigenvalue
/// counts; eigenvalues within `1e-12 * max|entry|` of zero count as neither.
pub fn signature(m: &Matrix4) -> (usize, usize) {
    let sym = nalgebra::Matrix4::from_fn(|i, j| 0.5 * (m.0[i][j] + m.0[j][i]));
    let eig = sym.symmetric_eigenvalues();
    let tol = 1e-12 * m.max_abs().max(f64::MIN_POSITIVE);
    let pos = eig.iter().filter(|&&e| e > tol).count();
    let neg = eig.iter().filter(|&&e| e < -tol).count();
    (pos, neg)
}

/// Index slot classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    GlobalUpper,
    GlobalLower,
    LocalUpper,
    LocalLower,
}

impl Variance {
    pub fn flipped(self) -> Self {
        match self {
            Variance::GlobalUpper => Variance::GlobalLower,
            Variance::GlobalLower => Variance::GlobalUpper,
            Variance::LocalUpper => Variance::LocalLower,
            Variance::LocalLower => Variance::LocalUpper,
        }
    }

    pub fn is_local(self) -> bool {
        matches!(self, Variance::LocalUpper | Variance::LocalLower)
    }

    pub fn is_upper(self) -> bool {
        matches!(self, Variance::GlobalUpper | Variance::LocalUpper)
    }
}

/// A rank 1..=4 tensor with per-slot variance tags. Components are stored
/// row-major: the first slot varies slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedTensor {
    variance: Vec<Variance>,
    components: Vec<f64>,
}

impl IndexedTensor {
    pub fn new(variance: Vec<Variance>, components: Vec<f64>) -> Result<Self> {
        let rank = variance.len();
        if !(1..=4).contains(&rank) {
            return Err(Error::InvalidTensor(format!("rank {rank} outside 1..=4")));
        }
        if components.len() != 4usize.pow(rank as u32) {
            return Err(Error::InvalidTensor(format!(
                "rank {rank} needs {} components, got {}",
                4usize.pow(rank as u32),
                components.len()
            )));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidTensor("non-finite component".into()));
        }
        Ok(Self { variance, components })
    }

    pub fn vector(variance: Variance, v: [f64; 4]) -> Self {
        Self { variance: vec![variance], components: v.to_vec() }
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    fn stride(&self, slot: usize) -> usize {
        4usize.pow((self.rank() - 1 - slot) as u32)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        let flat = idx.iter().enumerate().map(|(s, &i)| i * self.stride(s)).sum::<usize>();
        self.components[flat]
    }

    /// Contracts `matrix[a][b]` with slot `slot` (`t'[..a..] = sum_b m[a][b] t[..b..]`)
    /// and sets that slot's tag.
    pub fn contract_slot(&self, slot: usize, matrix: &Matrix4, tag: Variance) -> Result<Self> {
        if slot >= self.rank() {
            return Err(Error::InvalidTensor(format!("slot {slot} >= rank {}", self.rank())));
        }
        let stride = self.stride(slot);
        let mut out = vec![0.0; self.components.len()];
        for (flat, o) in out.iter_mut().enumerate() {
            let a = (flat / stride) % 4;
            let base = flat - a * stride;
            *o = (0..4).map(|b| matrix.0[a][b] * self.components[base + b * stride]).sum();
        }
        let mut variance = self.variance.clone();
        variance[slot] = tag;
        Ok(Self { variance, components: out })
    }
}

/// Raises or lowers one slot with `metric` and flips that slot's tag.
/// The caller supplies the metric matching the slot's family (η for local
/// slots, `g_{mu nu}` / `g^{mu nu}` for global ones).
pub fn reindex(t: &IndexedTensor, slot: usize, metric: &Matrix4) -> Result<IndexedTensor> {
    let tag = t
        .variance
        .get(slot)
        .copied()
        .ok_or_else(|| Error::InvalidTensor(format!("slot {slot} >= rank {}", t.rank())))?;
    t.contract_slot(slot, metric, tag.flipped())
}

/// Constant Lorentz matrix `exp(omega · eta)` for an antisymmetric generator
/// `omega^{kl}`; the result `L` satisfies `L^T eta L = eta`.
pub fn lorentz_from_generator(omega: &Matrix4) -> Matrix4 {
    let eta = minkowski_eta();
    let gen = *omega * eta;
    let mut term = Matrix4::identity();
    let mut sum = Matrix4::identity();
    for n in 1..40 {
        term = (term * gen).scale(1.0 / n as f64);
        sum = sum + term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_conventions() {
        let eta = minkowski_eta();
        assert_eq!(eta[0][0], 1.0);
        assert_eq!(eta[1][1], -1.0);
        assert_eq!(eta * eta, Matrix4::identity());
        assert_eq!(eta.max_asymmetry(), 0.0);
    }

    #[test]
    fn inverse_of_simple_matrices() {
        assert_eq!(invert4(&Matrix4::identity()).unwrap(), Matrix4::identity());
        let m = Matrix4::diag([2.0, -1.0, -1.0, -1.0]);
        assert_eq!(invert4(&m).unwrap(), Matrix4::diag([0.5, -1.0, -1.0, -1.0]));
    }

    #[test]
    fn degenerate_matrix_is_rejected() {
        let m = Matrix4::diag([1.0, 1.0, 1.0, 0.0]);
        assert!(matches!(invert4(&m), Err(Error::Degenerate { .. })));
        // scale-aware: a tiny but well-conditioned matrix is fine
        let small = Matrix4::identity().scale(1e-6);
        assert!(invert4(&small).is_ok());
    }

    #[test]
    fn determinant_of_diagonal_and_permutation() {
        assert_eq!(det4(&Matrix4::identity()), 1.0);
        assert_eq!(det4(&Matrix4::diag([2.0, 3.0, 5.0, 7.0])), 210.0);
        let mut p = Matrix4::zeros();
        p[0][1] = 1.0;
        p[1][0] = 1.0;
        p[2][2] = 1.0;
        p[3][3] = 1.0;
        assert_eq!(det4(&p), -1.0);
    }

    #[test]
    fn reindex_with_eta() {
        let eta = minkowski_eta();
        let t = IndexedTensor::vector(Variance::LocalUpper, [1.0, 0.0, 0.0, 0.0]);
        let low = reindex(&t, 0, &eta).unwrap();
        assert_eq!(low.components(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(low.variance(), &[Variance::LocalLower]);
        let t = IndexedTensor::vector(Variance::LocalUpper, [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(reindex(&t, 0, &eta).unwrap().components(), &[0.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn reindex_addresses_the_requested_slot() {
        let comps: Vec<f64> = (0..16).map(|v| v as f64).collect();
        let t = IndexedTensor::new(vec![Variance::LocalUpper, Variance::GlobalUpper], comps).unwrap();
        let low = reindex(&t, 1, &minkowski_eta()).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(low.get(&[a, b]), ETA_DIAG[b] * t.get(&[a, b]));
            }
        }
        assert_eq!(low.variance()[1], Variance::GlobalLower);
        assert!(reindex(&t, 2, &minkowski_eta()).is_err());
    }

    #[test]
    fn tensor_shape_is_validated() {
        assert!(IndexedTensor::new(vec![Variance::LocalUpper], vec![0.0; 3]).is_err());
        assert!(IndexedTensor::new(vec![], vec![]).is_err());
        assert!(IndexedTensor::new(vec![Variance::LocalUpper], vec![f64::NAN, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn dense_solver_detects_rank_deficiency() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(solve_dense(a, vec![1.0, 2.0], 1e-12), Err(Error::SingularSystem)));
        let a = vec![vec![0.0, 2.0], vec![3.0, 1.0]];
        let x = solve_dense(a, vec![4.0, 5.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn boost_generator_preserves_eta() {
        let mut omega = Matrix4::zeros();
        omega[0][1] = 0.7;
        omega[1][0] = -0.7;
        omega[2][3] = 0.3;
        omega[3][2] = -0.3;
        let l = lorentz_from_generator(&omega);
        let eta = minkowski_eta();
        assert!((l.transpose() * eta * l).max_abs_diff(&eta) < 1e-13);
        assert!((l * eta * l.transpose()).max_abs_diff(&eta) < 1e-13);
    }

    #[test]
    fn signature_counts() {
        assert_eq!(signature(&minkowski_eta()), (1, 3));
        assert_eq!(signature(&Matrix4::diag([1.0, 1.0, -1.0, -1.0])), (2, 2));
        assert_eq!(signature(&Matrix4::diag([1.0, 0.0, -1.0, -1.0])), (1, 2));
    }
}
