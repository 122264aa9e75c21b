//! Dirac gamma matrices, spinors and spinor bilinears.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{Matrix4, Rank3, ETA_DIAG};

pub const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Complex 4×4 matrix acting on Dirac spinors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMatrix4(pub [[Complex64; 4]; 4]);

impl Default for CMatrix4 {
    fn default() -> Self {
        CMatrix4::zeros()
    }
}

impl CMatrix4 {
    pub const fn zeros() -> Self {
        CMatrix4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    /// 4×4 matrix from 2×2 blocks `[[a, b], [c, d]]`.
    pub fn from_blocks(blocks: [[[[Complex64; 2]; 2]; 2]; 2]) -> Self {
        Self::from_fn(|i, j| blocks[i / 2][j / 2][i % 2][j % 2])
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::from_fn(|i, j| k * self.0[i][j])
    }

    pub fn scale_re(&self, k: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * k)
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_abs_diff(&self, o: &CMatrix4) -> f64 {
        (*self - *o).max_abs()
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.0[i][j] * v.0[j]).sum();
        }
        Spinor(out)
    }

    /// Row vector times matrix.
    pub fn apply_left(&self, row: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|i| row[i] * self.0[i][j]).sum();
        }
        out
    }
}

impl Index<usize> for CMatrix4 {
    type Output = [Complex64; 4];
    fn index(&self, i: usize) -> &[Complex64; 4] {
        &self.0[i]
    }
}

impl IndexMut<usize> for CMatrix4 {
    fn index_mut(&mut self, i: usize) -> &mut [Complex64; 4] {
        &mut self.0[i]
    }
}

impl Mul for CMatrix4 {
    type Output = CMatrix4;
    fn mul(self, o: CMatrix4) -> CMatrix4 {
        CMatrix4::from_fn(|i, j| (0..4).map(|k| self.0[i][k] * o.0[k][j]).sum())
    }
}

impl Add for CMatrix4 {
    type Output = CMatrix4;
    fn add(self, o: CMatrix4) -> CMatrix4 {
        CMatrix4::from_fn(|i, j| self.0[i][j] + o.0[i][j])
    }
}

impl Sub for CMatrix4 {
    type Output = CMatrix4;
    fn sub(self, o: CMatrix4) -> CMatrix4 {
        CMatrix4::from_fn(|i, j| self.0[i][j] - o.0[i][j])
    }
}

/// A Dirac spinor value `psi[alpha]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Spinor(pub [Complex64; 4]);

impl Spinor {
    pub fn zero() -> Self {
        Spinor([ZERO; 4])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn add(&self, o: &Spinor) -> Spinor {
        Spinor(std::array::from_fn(|a| self.0[a] + o.0[a]))
    }

    pub fn sub(&self, o: &Spinor) -> Spinor {
        Spinor(std::array::from_fn(|a| self.0[a] - o.0[a]))
    }

    pub fn scale(&self, k: Complex64) -> Spinor {
        Spinor(self.0.map(|c| c * k))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

/// Row-vector norm helper for adjoint spinors.
pub fn row_norm(row: &[Complex64; 4]) -> f64 {
    row.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `row · m · col` as a complex number.
pub fn bilinear(row: &[Complex64; 4], m: &CMatrix4, col: &Spinor) -> Complex64 {
    let mut acc = ZERO;
    for i in 0..4 {
        for j in 0..4 {
            acc += row[i] * m.0[i][j] * col.0[j];
        }
    }
    acc
}

/// `row · col`.
pub fn dot(row: &[Complex64; 4], col: &Spinor) -> Complex64 {
    (0..4).map(|a| row[a] * col.0[a]).sum()
}

fn pauli() -> [[[Complex64; 2]; 2]; 3] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    [
        [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
    ]
}

fn neg2(m: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    m.map(|r| r.map(|v| -v))
}

const Z2: [[Complex64; 2]; 2] = [[ZERO; 2]; 2];
const I2: [[Complex64; 2]; 2] = [[ONE, ZERO], [ZERO, ONE]];

/// Local-frame gamma matrices `gamma^k` with the derived lowered matrices
/// `gamma_k = eta_{kl} gamma^l` and the products `gamma_k gamma_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSet {
    upper: [CMatrix4; 4],
    lower: [CMatrix4; 4],
    lower_pairs: [[CMatrix4; 4]; 4],
}

impl GammaSet {
    pub fn from_upper(upper: [CMatrix4; 4]) -> Self {
        let lower: [CMatrix4; 4] = std::array::from_fn(|k| upper[k].scale_re(ETA_DIAG[k]));
        let lower_pairs = std::array::from_fn(|k| std::array::from_fn(|l| lower[k] * lower[l]));
        GammaSet { upper, lower, lower_pairs }
    }

    /// Dirac representation: `gamma^0 = diag(1, 1, -1, -1)`,
    /// `gamma^i = [[0, sigma_i], [-sigma_i, 0]]`.
    pub fn dirac() -> Self {
        let s = pauli();
        let g0 = CMatrix4::from_blocks([[I2, Z2], [Z2, neg2(I2)]]);
        let gi = |i: usize| CMatrix4::from_blocks([[Z2, s[i]], [neg2(s[i]), Z2]]);
        Self::from_upper([g0, gi(0), gi(1), gi(2)])
    }

    /// Weyl (chiral) representation: `gamma^0 = [[0, 1], [1, 0]]`,
    /// `gamma^i = [[0, sigma_i], [-sigma_i, 0]]`.
    pub fn weyl() -> Self {
        let s = pauli();
        let g0 = CMatrix4::from_blocks([[Z2, I2], [I2, Z2]]);
        let gi = |i: usize| CMatrix4::from_blocks([[Z2, s[i]], [neg2(s[i]), Z2]]);
        Self::from_upper([g0, gi(0), gi(1), gi(2)])
    }

    /// `gamma^k`.
    pub fn upper(&self, k: usize) -> &CMatrix4 {
        &self.upper[k]
    }

    /// `gamma_k = eta_{kl} gamma^l`.
    pub fn lower(&self, k: usize) -> &CMatrix4 {
        &self.lower[k]
    }

    /// `gamma_k gamma_l`.
    pub fn lower_pair(&self, k: usize, l: usize) -> &CMatrix4 {
        &self.lower_pairs[k][l]
    }

    /// `S_{kl} = 1/2 gamma_k gamma_l` (plain product, not antisymmetrized).
    pub fn sigma(&self, k: usize, l: usize) -> CMatrix4 {
        self.lower_pairs[k][l].scale_re(0.5)
    }

    /// Largest entry of `{gamma^k, gamma^l} - 2 eta^{kl} I` over all pairs.
    pub fn clifford_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..4 {
            for l in 0..4 {
                let anti = self.upper[k] * self.upper[l] + self.upper[l] * self.upper[k];
                let eta = if k == l { 2.0 * ETA_DIAG[k] } else { 0.0 };
                worst = worst.max(anti.max_abs_diff(&CMatrix4::identity().scale_re(eta)));
            }
        }
        worst
    }

    /// `psi-bar = psi^dagger gamma^0`.
    pub fn adjoint(&self, psi: &Spinor) -> [Complex64; 4] {
        let conj = psi.0.map(|c| c.conj());
        self.upper[0].apply_left(&conj)
    }

    /// Global gammas `gamma^mu = h_k^mu gamma^k` for a vierbein `h[k][mu]`.
    pub fn global(&self, h: &Matrix4) -> [CMatrix4; 4] {
        std::array::from_fn(|mu| {
            let mut g = CMatrix4::zeros();
            for k in 0..4 {
                g = g + self.upper[k].scale_re(h[k][mu]);
            }
            g
        })
    }

    /// The spin density `S^mu_{kl} = (i/8) psi-bar (gamma^mu gamma_k gamma_l - gamma_l gamma_k gamma^mu) psi`
    /// with `gamma^mu = h_k^mu gamma^k`, returned as `S[mu][k][l]`.
    pub fn spin_density(&self, psi: &Spinor, h: &Matrix4) -> Result<Rank3> {
        let bar = self.adjoint(psi);
        let gmu = self.global(h);
        let mut out = [[[0.0; 4]; 4]; 4];
        let mut residue = 0.0_f64;
        for (mu, g) in gmu.iter().enumerate() {
            for k in 0..4 {
                for l in 0..4 {
                    let m = *g * self.lower_pairs[k][l] - self.lower_pairs[l][k] * *g;
                    let v = I.scale(0.125) * bilinear(&bar, &m, psi);
                    residue = residue.max(v.im.abs());
                    out[mu][k][l] = v.re;
                }
            }
        }
        let norm = psi.norm().powi(2) * h.max_abs().max(1.0);
        if residue > 1e-10 * norm.max(f64::MIN_POSITIVE) {
            return Err(Error::NonRealDensity { residue });
        }
        Ok(out)
    }

    /// Spinor representation `S = exp(1/4 omega^{kl} gamma_k gamma_l)` of the
    /// constant Lorentz transformation [`crate::tensor::lorentz_from_generator`]`(omega)`.
    /// It satisfies `S^{-1} gamma^k S = L[k][l] gamma^l`.
    pub fn spinor_transform(&self, omega: &Matrix4) -> CMatrix4 {
        let mut gen = CMatrix4::zeros();
        for k in 0..4 {
            for l in 0..4 {
                gen = gen + self.lower_pairs[k][l].scale_re(0.25 * omega[k][l]);
            }
        }
        let mut term = CMatrix4::identity();
        let mut sum = CMatrix4::identity();
        for n in 1..60 {
            term = (term * gen).scale_re(1.0 / n as f64);
            sum = sum + term;
            if term.max_abs() < 1e-18 {
                break;
            }
        }
        sum
    }
}

pub fn standard_gammas() -> GammaSet {
    GammaSet::dirac()
}

/// `S_{kl} = 1/2 gamma_k gamma_l` in the standard representation.
pub fn sigma(gammas: &GammaSet, k: usize, l: usize) -> CMatrix4 {
    gammas.sigma(k, l)
}

pub fn adjoint(gammas: &GammaSet, psi: &Spinor) -> [Complex64; 4] {
    gammas.adjoint(psi)
}

pub fn spin_density(gammas: &GammaSet, psi: &Spinor, h: &Matrix4) -> Result<Rank3> {
    gammas.spin_density(psi, h)
}
