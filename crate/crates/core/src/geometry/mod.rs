//! Vierbein bundles, the gravitational, S-field and composite metrics,
//! local and global affine connections, torsion and curvature.
//!
//! Index conventions used throughout:
//!
//! | quantity            | storage              | meaning                     |
//! |---------------------|----------------------|-----------------------------|
//! | vierbein            | `h[k][mu]`           | `h_k^mu`                    |
//! | inverse vierbein    | `inv[k][mu]`         | `h^k_mu`                    |
//! | metric              | `g[mu][nu]`          | `g^{mu nu} = eta^{kl} h_k^mu h_l^nu` |
//! | vierbein gradient   | `grad[k][mu][a]`     | `d_a h_k^mu`                |
//! | local connection    | `a[k][l][mu]`        | `A^{kl}_mu`                 |
//! | connection gradient | `da[k][l][mu][nu]`   | `d_nu A^{kl}_mu`            |
//! | global connection   | `gamma[nu][rho][mu]` | `Gamma^nu_{rho mu}`, `mu` is the derivative slot |
//! | curvature           | `r[k][l][mu][nu]`    | `R^{kl}_{mu nu}`            |
//!
//! The volume density is `h = det(h^k_mu) = 1 / det(h_k^mu)`, which equals
//! `sqrt|det g_{mu nu}|`.

mod connection;
mod curvature;

pub use connection::{
    global_connection, levi_civita_connection, local_connection, postulate_residual, torsion,
    ConnectionField, ConnectionJet, DirectConnection, FrameField, FRAME_TOLERANCE, PAIRS,
};
pub use curvature::{
    curvature, curvature_from_jet, einstein_tensor_b, ricci_scalar_lagrangian, Curvature,
    PointGeometry,
};

use crate::error::{Error, Result};
use crate::expr::{parse_expression, Constants, Expression, Jet2, Point4};
use crate::scalar::{Dual4, Scalar};
use crate::tensor::{
    det4, invert4, signature, zero_rank3, zero_rank4, IndexedTensor, Matrix4, Rank3, Rank4,
    Variance, DEGENERACY_REL, ETA_DIAG,
};

/// Vierbein value with first and second coordinate derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VierbeinJet {
    pub value: Matrix4,
    /// `grad[k][mu][a] = d_a h_k^mu`
    pub grad: Rank3,
    /// `hess[k][mu][a][b] = d_a d_b h_k^mu`
    pub hess: Rank4,
}

impl VierbeinJet {
    pub fn constant(value: Matrix4) -> Self {
        VierbeinJet { value, grad: zero_rank3(), hess: zero_rank4() }
    }

    /// `h_k^mu` as first-order jets.
    pub fn dual(&self) -> [[Dual4; 4]; 4] {
        std::array::from_fn(|k| std::array::from_fn(|mu| Dual4::new(self.value[k][mu], self.grad[k][mu])))
    }

    /// `d_a h_k^mu` as first-order jets, indexed `[k][mu][a]`.
    pub fn dual_grad(&self) -> [[[Dual4; 4]; 4]; 4] {
        std::array::from_fn(|k| {
            std::array::from_fn(|mu| std::array::from_fn(|a| Dual4::new(self.grad[k][mu][a], self.hess[k][mu][a])))
        })
    }
}

/// Anything that yields a vierbein jet at a point.
pub trait VierbeinField: Send + Sync {
    fn jet(&self, p: &Point4) -> Result<VierbeinJet>;

    fn value(&self, p: &Point4) -> Result<Matrix4> {
        Ok(self.jet(p)?.value)
    }
}

/// Determinant of a vierbein matrix after the relative degeneracy check.
pub fn checked_det(h: &Matrix4) -> Result<f64> {
    let det = det4(h);
    let threshold = DEGENERACY_REL * h.max_abs().powi(4);
    if det.abs() > threshold && det.is_finite() {
        Ok(det)
    } else {
        Err(Error::Degenerate { det, threshold })
    }
}

/// `g^{mu nu} = eta^{kl} h_k^mu h_l^nu`.
pub fn metric_from_vierbein(h: &Matrix4) -> Matrix4 {
    Matrix4::from_fn(|mu, nu| (0..4).map(|k| ETA_DIAG[k] * h[k][mu] * h[k][nu]).sum())
}

/// The 16 expressions `h_k^mu(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VierbeinBundle {
    entries: [[Expression; 4]; 4],
}

impl VierbeinBundle {
    pub fn new(entries: [[Expression; 4]; 4]) -> Self {
        VierbeinBundle { entries }
    }

    pub fn parse(rows: &[[&str; 4]; 4], constants: &Constants) -> Result<Self> {
        let mut out: [[Expression; 4]; 4] = Default::default();
        for k in 0..4 {
            for mu in 0..4 {
                out[k][mu] = parse_expression(rows[k][mu], constants)?;
            }
        }
        Ok(VierbeinBundle { entries: out })
    }

    pub fn identity() -> Self {
        Self::constant(&Matrix4::identity())
    }

    pub fn constant(m: &Matrix4) -> Self {
        VierbeinBundle {
            entries: std::array::from_fn(|k| std::array::from_fn(|mu| Expression::constant(m[k][mu]))),
        }
    }

    pub fn entry(&self, k: usize, mu: usize) -> &Expression {
        &self.entries[k][mu]
    }

    pub fn entries(&self) -> &[[Expression; 4]; 4] {
        &self.entries
    }
}

impl VierbeinField for VierbeinBundle {
    fn jet(&self, p: &Point4) -> Result<VierbeinJet> {
        let mut jet = VierbeinJet::constant(Matrix4::zeros());
        for k in 0..4 {
            for mu in 0..4 {
                let j: Jet2 = self.entries[k][mu].eval_jet2(p)?;
                jet.value[k][mu] = j.value;
                jet.grad[k][mu] = j.grad;
                jet.hess[k][mu] = j.hess;
            }
        }
        Ok(jet)
    }

    fn value(&self, p: &Point4) -> Result<Matrix4> {
        let mut m = Matrix4::zeros();
        for k in 0..4 {
            for mu in 0..4 {
                m[k][mu] = self.entries[k][mu].eval(p)?;
            }
        }
        Ok(m)
    }
}

/// The scalar S-field `phi` and its coupling `lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct SFieldConfig {
    pub phi: Expression,
    pub lambda: f64,
}

impl SFieldConfig {
    pub fn new(phi: Expression, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("coupling must be finite and >= 0, got {lambda}")));
        }
        Ok(SFieldConfig { phi, lambda })
    }

    pub fn off() -> Self {
        SFieldConfig { phi: Expression::zero(), lambda: 0.0 }
    }
}

/// `g-hat^{mu nu}` of the gravitational bundle.
pub fn gravity_metric(hg: &dyn VierbeinField, p: &Point4) -> Result<Matrix4> {
    let h = hg.value(p)?;
    checked_det(&h)?;
    Ok(metric_from_vierbein(&h))
}

/// `lambda^2 d^mu phi d^nu phi`, indices raised with the gravitational metric.
pub fn sfield_metric(s: &SFieldConfig, hg: &dyn VierbeinField, p: &Point4) -> Result<Matrix4> {
    if s.lambda == 0.0 {
        return Ok(Matrix4::zeros());
    }
    let ghat = metric_from_vierbein(&hg.value(p)?);
    let dphi = s.phi.eval_jet2(p)?.grad;
    let up = ghat.apply(dphi);
    let l2 = s.lambda * s.lambda;
    Ok(Matrix4::from_fn(|mu, nu| l2 * up[mu] * up[nu]))
}

/// Composite metric `g^{mu nu}` and its inverse `g_{mu nu}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompositeMetric {
    pub upper: Matrix4,
    pub lower: Matrix4,
}

/// `g = g-hat + g-underline`, checked for degeneracy and Lorentz signature.
pub fn composite_metric(hg: &dyn VierbeinField, s: &SFieldConfig, p: &Point4) -> Result<CompositeMetric> {
    let upper = gravity_metric(hg, p)? + sfield_metric(s, hg, p)?;
    let lower = invert4(&upper)?;
    check_lorentzian(&upper)?;
    Ok(CompositeMetric { upper, lower })
}

fn check_lorentzian(g: &Matrix4) -> Result<()> {
    let (positive, negative) = signature(g);
    if (positive, negative) != (1, 3) {
        return Err(Error::WrongSignature { positive, negative });
    }
    Ok(())
}

/// A vierbein `h` with `h^T eta h = g`.
///
/// When `g^{00} > 0` the gauge is the triangular one from `g = L D L^T`
/// (`L` unit lower triangular), so that diagonal metrics give diagonal
/// vierbeins. Otherwise the gauge comes from the symmetric
/// eigendecomposition with the positive eigenvalue placed in row 0.
pub fn composite_vierbein(g: &Matrix4) -> Result<Matrix4> {
    if !g.is_finite() {
        return Err(Error::InvalidTensor("non-finite metric".into()));
    }
    if g.max_asymmetry() > 1e-12 * g.max_abs() {
        return Err(Error::InvalidTensor("metric is not symmetric".into()));
    }
    check_lorentzian(g)?;
    if let Some(h) = ldl_vierbein(g) {
        return Ok(h);
    }
    let sym = nalgebra::Matrix4::from_fn(|i, j| g[i][j]);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut h = Matrix4::zeros();
    for (row, &i) in order.iter().enumerate() {
        let scale = eig.eigenvalues[i].abs().sqrt();
        for mu in 0..4 {
            h[row][mu] = scale * eig.eigenvectors[(mu, i)];
        }
    }
    Ok(h)
}

fn ldl_vierbein(g: &Matrix4) -> Option<Matrix4> {
    let mut l = Matrix4::identity();
    let mut d = [0.0; 4];
    for j in 0..4 {
        let mut dj = g[j][j];
        for k in 0..j {
            dj -= l[j][k] * l[j][k] * d[k];
        }
        if dj.signum() != ETA_DIAG[j] || dj.abs() <= 1e-14 * g.max_abs() {
            return None;
        }
        d[j] = dj;
        for i in j + 1..4 {
            let mut v = g[i][j];
            for k in 0..j {
                v -= l[i][k] * l[j][k] * d[k];
            }
            l[i][j] = v / dj;
        }
    }
    // rows are local indices: h = |D|^{1/2} L^T
    Some(Matrix4::from_fn(|k, mu| d[k].abs().sqrt() * l[mu][k]))
}

/// The local linear map `A_i^j` with `h-hat_i^mu = A_i^j h_j^mu`.
pub fn bundle_relation(hg: &dyn VierbeinField, hs: &Matrix4, p: &Point4) -> Result<Matrix4> {
    let inv = invert4(hs)?;
    Ok(hg.value(p)? * inv)
}

/// Outcome of the equal-volume-element diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeElementReport {
    pub gravity_det: f64,
    /// Rank of `lambda^2 d^mu phi d^nu phi`: 0 or 1.
    pub sfield_rank: usize,
    /// Whether equal determinants of the two bundles is achievable.
    pub satisfiable: bool,
}

/// Compares the gravitational bundle determinant with that of the S-field
/// contribution. The gradient coupling is at most rank one, so its own
/// vierbein determinant vanishes and equal volume elements cannot hold.
pub fn volume_element_check(hg: &dyn VierbeinField, s: &SFieldConfig, p: &Point4) -> Result<VolumeElementReport> {
    let h = hg.value(p)?;
    let gravity_det = det4(&h);
    let sm = sfield_metric(s, hg, p)?;
    let tol = 1e-12 * metric_from_vierbein(&h).max_abs().max(1.0);
    let sfield_rank = if sm.max_abs() > tol { 1 } else { 0 };
    Ok(VolumeElementReport { gravity_det, sfield_rank, satisfiable: gravity_det == 0.0 })
}

/// Converts a rank-1 tensor between local and global components:
/// `A^mu = h_k^mu A^k`, `A^k = h^k_nu A^nu`, and the lower-index analogues.
pub fn local_global_convert(t: &IndexedTensor, hb: &dyn VierbeinField, p: &Point4) -> Result<IndexedTensor> {
    if t.rank() != 1 {
        return Err(Error::InvalidArgument("conversion is defined for rank-1 tensors".into()));
    }
    let h = hb.value(p)?;
    let inv = invert4(&h)?; // inv[mu][k] = h^k_mu
    let c = t.components();
    let v = |f: &dyn Fn(usize, usize) -> f64| -> [f64; 4] {
        std::array::from_fn(|out| (0..4).map(|i| f(out, i) * c[i]).sum())
    };
    let (variance, comps) = match t.variance()[0] {
        Variance::LocalUpper => (Variance::GlobalUpper, v(&|mu, k| h[k][mu])),
        Variance::GlobalUpper => (Variance::LocalUpper, v(&|k, mu| inv[mu][k])),
        Variance::LocalLower => (Variance::GlobalLower, v(&|mu, k| inv[mu][k])),
        Variance::GlobalLower => (Variance::LocalLower, v(&|k, mu| h[k][mu])),
    };
    Ok(IndexedTensor::vector(variance, comps))
}

/// Vierbein of the composite metric `g-hat + lambda^2 v v^T`, built
/// smoothly as `h_k^mu = h-hat_k^mu + alpha w_k v^mu` with
/// `w_k = h-hat_k^nu d_nu phi`, `v^mu = g-hat^{mu nu} d_nu phi` and
/// `alpha = lambda^2 / (1 + sqrt(1 + lambda^2 w.w))`.
///
/// Gradients are exact. Second derivatives need third derivatives of `phi`
/// and are taken by central differences of the exact gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeVierbein {
    pub gravity: VierbeinBundle,
    pub sfield: SFieldConfig,
    pub hessian_step: f64,
}

impl CompositeVierbein {
    pub fn new(gravity: VierbeinBundle, sfield: SFieldConfig) -> Self {
        CompositeVierbein { gravity, sfield, hessian_step: 1e-4 }
    }

    fn first_order(&self, p: &Point4) -> Result<(Matrix4, Rank3)> {
        let base = self.gravity.jet(p)?;
        if self.sfield.lambda == 0.0 {
            return Ok((base.value, base.grad));
        }
        let phi = self.sfield.phi.eval_jet2(p)?;
        let hd = base.dual();
        let dphi: [Dual4; 4] = std::array::from_fn(|nu| phi.partial(nu));
        let h = composite_generic(&hd, &dphi, self.sfield.lambda).map_err(|e| self.refine(e, p))?;
        let value = Matrix4::from_fn(|k, mu| h[k][mu].re);
        let grad = std::array::from_fn(|k| std::array::from_fn(|mu| h[k][mu].eps));
        Ok((value, grad))
    }

    fn refine(&self, e: Error, p: &Point4) -> Error {
        match composite_metric(&self.gravity, &self.sfield, p) {
            Err(inner) => inner,
            Ok(_) => e,
        }
    }
}

/// `h-hat + alpha w v` over any scalar type.
pub fn composite_generic<T: Scalar>(hhat: &[[T; 4]; 4], dphi: &[T; 4], lambda: f64) -> Result<[[T; 4]; 4]> {
    let w: [T; 4] = std::array::from_fn(|k| {
        let mut acc = T::zero();
        for nu in 0..4 {
            acc += hhat[k][nu] * dphi[nu];
        }
        acc
    });
    let mut s = T::zero();
    for k in 0..4 {
        s += (w[k] * w[k]).scale(ETA_DIAG[k]);
    }
    let v: [T; 4] = std::array::from_fn(|mu| {
        let mut acc = T::zero();
        for a in 0..4 {
            acc += (hhat[a][mu] * w[a]).scale(ETA_DIAG[a]);
        }
        acc
    });
    let l2 = lambda * lambda;
    let q = T::one() + s.scale(l2);
    if q.value() <= 0.0 {
        return Err(Error::Degenerate { det: q.value(), threshold: 0.0 });
    }
    let alpha = T::from_f64(l2) / (T::one() + q.sqrt());
    Ok(std::array::from_fn(|k| std::array::from_fn(|mu| hhat[k][mu] + alpha * w[k] * v[mu])))
}

impl VierbeinField for CompositeVierbein {
    fn jet(&self, p: &Point4) -> Result<VierbeinJet> {
        if self.sfield.lambda == 0.0 {
            return self.gravity.jet(p);
        }
        let (value, grad) = self.first_order(p)?;
        let s = self.hessian_step;
        let mut hess = zero_rank4();
        for b in 0..4 {
            let (_, gp) = self.first_order(&p.shifted(b, s))?;
            let (_, gm) = self.first_order(&p.shifted(b, -s))?;
            for k in 0..4 {
                for mu in 0..4 {
                    for a in 0..4 {
                        hess[k][mu][a][b] = (gp[k][mu][a] - gm[k][mu][a]) / (2.0 * s);
                    }
                }
            }
        }
        for row in hess.iter_mut().flatten() {
            for a in 0..4 {
                for b in a + 1..4 {
                    let m = 0.5 * (row[a][b] + row[b][a]);
                    row[a][b] = m;
                    row[b][a] = m;
                }
            }
        }
        Ok(VierbeinJet { value, grad, hess })
    }

    fn value(&self, p: &Point4) -> Result<Matrix4> {
        Ok(self.first_order(p)?.0)
    }
}

/// Applies a constant local Lorentz matrix to the local index:
/// `h_i^mu -> L_i^j h_j^mu`.
#[derive(Clone, Debug)]
pub struct Transformed<'a> {
    pub inner: &'a dyn VierbeinField,
    pub lorentz: Matrix4,
}

impl VierbeinField for Transformed<'_> {
    fn jet(&self, p: &Point4) -> Result<VierbeinJet> {
        let j = self.inner.jet(p)?;
        let l = &self.lorentz;
        let mut out = VierbeinJet::constant(*l * j.value);
        for i in 0..4 {
            for mu in 0..4 {
                for a in 0..4 {
                    out.grad[i][mu][a] = (0..4).map(|k| l[i][k] * j.grad[k][mu][a]).sum();
                    for b in 0..4 {
                        out.hess[i][mu][a][b] = (0..4).map(|k| l[i][k] * j.hess[k][mu][a][b]).sum();
                    }
                }
            }
        }
        Ok(out)
    }
}

impl std::fmt::Debug for dyn VierbeinField + '_ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("VierbeinField")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{lorentz_from_generator, minkowski_eta};

    fn consts() -> Constants {
        Constants::new()
    }

    #[test]
    fn gravity_metric_examples() {
        let p = Point4::origin();
        assert_eq!(gravity_metric(&VierbeinBundle::identity(), &p).unwrap(), minkowski_eta());
        let hb = VierbeinBundle::constant(&Matrix4::diag([1.0, 0.5, 0.5, 0.5]));
        assert_eq!(gravity_metric(&hb, &p).unwrap(), Matrix4::diag([1.0, -0.25, -0.25, -0.25]));
        let sing = VierbeinBundle::constant(&Matrix4::diag([1.0, 0.0, 1.0, 1.0]));
        assert!(matches!(gravity_metric(&sing, &p), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn sfield_metric_examples() {
        let p = Point4::new(0.3, 0.2, -0.1, 0.5);
        let hb = VierbeinBundle::identity();
        let c = consts();
        let s = SFieldConfig::new(parse_expression("x1", &c).unwrap(), 0.1).unwrap();
        let sm = sfield_metric(&s, &hb, &p).unwrap();
        let mut expected = Matrix4::zeros();
        expected[1][1] = 0.01;
        assert!(sm.max_abs_diff(&expected) < 1e-17);
        let g = composite_metric(&hb, &s, &p).unwrap();
        assert!((g.upper[1][1] + 0.99).abs() < 1e-15);
        assert!((g.upper * g.lower).max_abs_diff(&Matrix4::identity()) < 1e-12);
        let off = SFieldConfig::new(parse_expression("x1", &c).unwrap(), 0.0).unwrap();
        assert_eq!(sfield_metric(&off, &hb, &p).unwrap(), Matrix4::zeros());
        assert!(SFieldConfig::new(Expression::zero(), -1.0).is_err());
    }

    #[test]
    fn composite_vierbein_gauge() {
        assert_eq!(composite_vierbein(&minkowski_eta()).unwrap(), Matrix4::identity());
        let h = composite_vierbein(&Matrix4::diag([4.0, -1.0, -1.0, -1.0])).unwrap();
        assert_eq!(h, Matrix4::diag([2.0, 1.0, 1.0, 1.0]));
        assert!(matches!(
            composite_vierbein(&Matrix4::diag([1.0, 1.0, -1.0, -1.0])),
            Err(Error::WrongSignature { positive: 2, negative: 2 })
        ));
        // g^{00} < 0 forces the eigen gauge
        let g = Matrix4([
            [-0.5, 1.0, 0.0, 0.0],
            [1.0, -0.5, 0.0, 0.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
        ]);
        let h = composite_vierbein(&g).unwrap();
        assert!(metric_from_vierbein(&h).max_abs_diff(&g) < 1e-12);
    }

    #[test]
    fn bundle_relation_examples() {
        let p = Point4::origin();
        let hb = VierbeinBundle::constant(&Matrix4::diag([2.0, 1.0, 3.0, 1.0]));
        let a = bundle_relation(&hb, &Matrix4::diag([2.0, 1.0, 3.0, 1.0]), &p).unwrap();
        assert!(a.max_abs_diff(&Matrix4::identity()) < 1e-15);
        assert!(bundle_relation(&hb, &Matrix4::diag([1.0, 0.0, 1.0, 1.0]), &p).is_err());
    }

    #[test]
    fn volume_element_flags() {
        let p = Point4::origin();
        let hb = VierbeinBundle::identity();
        let r = volume_element_check(&hb, &SFieldConfig::off(), &p).unwrap();
        assert_eq!((r.gravity_det, r.sfield_rank, r.satisfiable), (1.0, 0, false));
        let s = SFieldConfig::new(parse_expression("x1", &consts()).unwrap(), 0.1).unwrap();
        assert_eq!(volume_element_check(&hb, &s, &p).unwrap().sfield_rank, 1);
    }

    #[test]
    fn convert_examples() {
        let p = Point4::origin();
        let hb = VierbeinBundle::constant(&Matrix4::diag([2.0, 1.0, 1.0, 1.0]));
        let t = IndexedTensor::vector(Variance::LocalUpper, [1.0, 0.0, 0.0, 0.0]);
        let g = local_global_convert(&t, &hb, &p).unwrap();
        assert_eq!(g.components(), &[2.0, 0.0, 0.0, 0.0]);
        let back = local_global_convert(&g, &hb, &p).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn composite_field_reproduces_metric() {
        let c = consts();
        let gravity = VierbeinBundle::parse(
            &[
                ["1 + 0.1*x1", "0.05*x2", "0", "0"],
                ["0", "exp(-0.2*x0)", "0.1*sin(x3)", "0"],
                ["0", "0", "1/(1+0.1*x0^2)", "0"],
                ["0.02*x3", "0", "0", "1"],
            ],
            &c,
        )
        .unwrap();
        let s = SFieldConfig::new(parse_expression("0.7*x1 + 0.3*sin(x0) + 0.2*x2*x3", &c).unwrap(), 0.4).unwrap();
        let field = CompositeVierbein::new(gravity.clone(), s.clone());
        let p = Point4::new(0.2, -0.4, 0.3, 0.6);
        let h = field.value(&p).unwrap();
        let g = composite_metric(&gravity, &s, &p).unwrap().upper;
        assert!(metric_from_vierbein(&h).max_abs_diff(&g) < 1e-12);
        // gradient against central differences of the value
        let jet = field.jet(&p).unwrap();
        let step = 1e-5;
        for a in 0..4 {
            let hp = field.value(&p.shifted(a, step)).unwrap();
            let hm = field.value(&p.shifted(a, -step)).unwrap();
            for k in 0..4 {
                for mu in 0..4 {
                    let fd = (hp[k][mu] - hm[k][mu]) / (2.0 * step);
                    assert!((fd - jet.grad[k][mu][a]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn lorentz_transformed_bundle_keeps_metric() {
        let mut omega = Matrix4::zeros();
        omega[0][1] = 0.3;
        omega[1][0] = -0.3;
        omega[2][3] = 0.8;
        omega[3][2] = -0.8;
        let l = lorentz_from_generator(&omega);
        let hb = VierbeinBundle::constant(&Matrix4::diag([1.0, 2.0, 0.5, 1.5]));
        let t = Transformed { inner: &hb, lorentz: l };
        let p = Point4::origin();
        let g0 = gravity_metric(&hb, &p).unwrap();
        let g1 = gravity_metric(&t, &p).unwrap();
        assert!(g0.max_abs_diff(&g1) < 1e-12);
    }
}
