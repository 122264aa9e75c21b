use super::connection::{global_from_jets, levi_civita_jet};
use super::{checked_det, ConnectionField, ConnectionJet, VierbeinField, VierbeinJet};
use crate::error::Result;
use crate::expr::Point4;
use crate::tensor::{invert4, zero_rank4, Matrix4, Rank3, Rank4, ETA_DIAG};

/// Everything about the background needed at one point: the vierbein jet,
/// its inverse, the volume density with its gradient, the local connection
/// jet and the global connection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointGeometry {
    pub point: Point4,
    pub vierbein: VierbeinJet,
    /// `inverse[k][mu] = h^k_mu`
    pub inverse: Matrix4,
    /// `h = det(h^k_mu)`
    pub density: f64,
    /// `d_a h`
    pub density_grad: [f64; 4],
    pub connection: ConnectionJet,
    /// `Gamma^nu_{rho mu}`
    pub christoffel: Rank3,
}

impl PointGeometry {
    pub fn new(h: &dyn VierbeinField, c: &ConnectionField, p: &Point4) -> Result<Self> {
        let vierbein = h.jet(p)?;
        let connection = match c {
            ConnectionField::LeviCivita => levi_civita_jet(&vierbein)?,
            other => other.jet(h, p)?,
        };
        Self::from_jets(*p, vierbein, connection)
    }

    pub fn from_jets(point: Point4, vierbein: VierbeinJet, connection: ConnectionJet) -> Result<Self> {
        let det = checked_det(&vierbein.value)?;
        let inverse = invert4(&vierbein.value)?.transpose();
        let density = 1.0 / det;
        // Jacobi: d ln det(h_k^mu) = h^k_mu d h_k^mu
        let density_grad = std::array::from_fn(|a| {
            let mut tr = 0.0;
            for k in 0..4 {
                for mu in 0..4 {
                    tr += inverse[k][mu] * vierbein.grad[k][mu][a];
                }
            }
            -density * tr
        });
        let christoffel = global_from_jets(&vierbein, &connection.value)?;
        Ok(PointGeometry { point, vierbein, inverse, density, density_grad, connection, christoffel })
    }

    /// `h_k^mu`
    pub fn h(&self) -> &Matrix4 {
        &self.vierbein.value
    }

    pub fn curvature(&self) -> Curvature {
        Curvature::new(&self.vierbein.value, self.density, &self.connection)
    }
}

/// Curvature tensor and its contractions at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Curvature {
    /// `R^{kl}_{mu nu}`
    pub riemann: Rank4,
    /// `R^l_mu = h_k^nu R^{kl}_{mu nu}`, stored `[l][mu]`
    pub ricci: Matrix4,
    /// `R = h_l^mu R^l_mu`
    pub scalar: f64,
    /// `h R`
    pub lagrangian: f64,
    /// `R^mu_nu = h_l^mu R^l_nu`
    pub mixed_ricci: Matrix4,
    /// `B^mu_nu = R^mu_nu - 1/2 delta^mu_nu R`
    pub einstein: Matrix4,
}

impl Curvature {
    pub fn new(h: &Matrix4, density: f64, connection: &ConnectionJet) -> Self {
        let riemann = curvature_from_jet(connection);
        let mut ricci = Matrix4::zeros();
        for l in 0..4 {
            for mu in 0..4 {
                let mut v = 0.0;
                for k in 0..4 {
                    for nu in 0..4 {
                        v += h[k][nu] * riemann[k][l][mu][nu];
                    }
                }
                ricci[l][mu] = v;
            }
        }
        let mut scalar = 0.0;
        for l in 0..4 {
            for mu in 0..4 {
                scalar += h[l][mu] * ricci[l][mu];
            }
        }
        let mixed_ricci = Matrix4::from_fn(|mu, nu| (0..4).map(|l| h[l][mu] * ricci[l][nu]).sum());
        let einstein = Matrix4::from_fn(|mu, nu| mixed_ricci[mu][nu] - if mu == nu { 0.5 * scalar } else { 0.0 });
        Curvature { riemann, ricci, scalar, lagrangian: density * scalar, mixed_ricci, einstein }
    }
}

/// `R^{kl}_{mu nu} = d_nu A^{kl}_mu - d_mu A^{kl}_nu
///   + A^{km}_nu eta_mm A^{ml}_mu - A^{km}_mu eta_mm A^{ml}_nu`.
///
/// With this ordering `1/4 R^{kl}_{mu nu} gamma_k gamma_l` is exactly the
/// spinor part of the commutator of two covariant derivatives.
pub fn curvature_from_jet(c: &ConnectionJet) -> Rank4 {
    let a = &c.value;
    let mut r = zero_rank4();
    for k in 0..4 {
        for l in 0..4 {
            for mu in 0..4 {
                for nu in 0..4 {
                    let mut v = c.grad[k][l][mu][nu] - c.grad[k][l][nu][mu];
                    for m in 0..4 {
                        v += ETA_DIAG[m] * (a[k][m][nu] * a[m][l][mu] - a[k][m][mu] * a[m][l][nu]);
                    }
                    r[k][l][mu][nu] = v;
                }
            }
        }
    }
    r
}

/// `R^{kl}_{mu nu}` at a point.
pub fn curvature(c: &ConnectionField, h: &dyn VierbeinField, p: &Point4) -> Result<Rank4> {
    Ok(curvature_from_jet(&c.jet(h, p)?))
}

/// `(R^l_mu, R, h R)`.
pub fn ricci_scalar_lagrangian(h: &dyn VierbeinField, c: &ConnectionField, p: &Point4) -> Result<(Matrix4, f64, f64)> {
    let cv = PointGeometry::new(h, c, p)?.curvature();
    Ok((cv.ricci, cv.scalar, cv.lagrangian))
}

/// `B^mu_nu`.
pub fn einstein_tensor_b(h: &dyn VierbeinField, c: &ConnectionField, p: &Point4) -> Result<Matrix4> {
    Ok(PointGeometry::new(h, c, p)?.curvature().einstein)
}
