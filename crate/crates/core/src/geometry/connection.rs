use super::{checked_det, VierbeinField, VierbeinJet};
use crate::error::{Error, Result};
use crate::expr::{parse_expression, Constants, Expression, Point4};
use crate::scalar::Scalar;
use crate::tensor::{inverse_generic, solve_dense, zero_rank3, zero_rank4, Rank3, Rank4, ETA_DIAG};

/// Ordered local index pairs `k < l`; the position in this list is the
/// pair index used by [`DirectConnection`] and the Levi-Civita solver.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Largest allowed `|a eta a^T - eta|` for a frame field.
pub const FRAME_TOLERANCE: f64 = 1e-6;

/// Local Lorentz frame `a^k_j(x)`, stored `a[k][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameField {
    entries: [[Expression; 4]; 4],
}

impl FrameField {
    pub fn new(entries: [[Expression; 4]; 4]) -> Self {
        FrameField { entries }
    }

    pub fn parse(rows: &[[&str; 4]; 4], constants: &Constants) -> Result<Self> {
        let mut out: [[Expression; 4]; 4] = Default::default();
        for k in 0..4 {
            for j in 0..4 {
                out[k][j] = parse_expression(rows[k][j], constants)?;
            }
        }
        Ok(FrameField { entries: out })
    }

    pub fn entries(&self) -> &[[Expression; 4]; 4] {
        &self.entries
    }

    /// `A^{kl}_mu = -a^k_j eta^{jj} d_mu a^l_j` and its gradient from the
    /// frame Hessian.
    fn jet(&self, p: &Point4) -> Result<ConnectionJet> {
        let mut jets = [[crate::expr::Jet2::default(); 4]; 4];
        for k in 0..4 {
            for j in 0..4 {
                jets[k][j] = self.entries[k][j].eval_jet2(p)?;
            }
        }
        let mut residual = 0.0_f64;
        for k in 0..4 {
            for l in 0..4 {
                let s: f64 = (0..4).map(|j| jets[k][j].value * ETA_DIAG[j] * jets[l][j].value).sum();
                let target = if k == l { ETA_DIAG[k] } else { 0.0 };
                residual = residual.max((s - target).abs());
            }
        }
        if !(residual <= FRAME_TOLERANCE) {
            return Err(Error::FrameNotOrthonormal { residual });
        }
        let mut out = ConnectionJet::zero();
        for k in 0..4 {
            for l in 0..4 {
                for mu in 0..4 {
                    let mut v = 0.0;
                    for j in 0..4 {
                        v -= jets[k][j].value * ETA_DIAG[j] * jets[l][j].grad[mu];
                    }
                    out.value[k][l][mu] = v;
                    for nu in 0..4 {
                        let mut d = 0.0;
                        for j in 0..4 {
                            d -= ETA_DIAG[j]
                                * (jets[k][j].grad[nu] * jets[l][j].grad[mu]
                                    + jets[k][j].value * jets[l][j].hess[mu][nu]);
                        }
                        out.grad[k][l][mu][nu] = d;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `A^{kl}_mu` given directly for `k < l`; the diagonal is zero and `k > l`
/// follows by antisymmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectConnection {
    /// `pairs[P][mu]` for the pair `PAIRS[P]`.
    pairs: [[Expression; 4]; 6],
}

impl DirectConnection {
    pub fn new(pairs: [[Expression; 4]; 6]) -> Self {
        DirectConnection { pairs }
    }

    pub fn zero() -> Self {
        DirectConnection { pairs: Default::default() }
    }

    /// Builds the connection from `(k, l)` keyed component lists.
    pub fn from_components(components: &[((usize, usize), [Expression; 4])]) -> Result<Self> {
        let mut c = Self::zero();
        for ((k, l), exprs) in components {
            let idx = PAIRS
                .iter()
                .position(|&pq| pq == (*k, *l))
                .ok_or_else(|| Error::InvalidArgument(format!("connection pair ({k},{l}) must satisfy k < l <= 3")))?;
            c.pairs[idx] = exprs.clone();
        }
        Ok(c)
    }

    pub fn component(&self, pair: usize, mu: usize) -> &Expression {
        &self.pairs[pair][mu]
    }

    fn jet(&self, p: &Point4) -> Result<ConnectionJet> {
        let mut out = ConnectionJet::zero();
        for (idx, &(k, l)) in PAIRS.iter().enumerate() {
            for mu in 0..4 {
                let j = self.pairs[idx][mu].eval_jet2(p)?;
                out.value[k][l][mu] = j.value;
                out.value[l][k][mu] = -j.value;
                for nu in 0..4 {
                    out.grad[k][l][mu][nu] = j.grad[nu];
                    out.grad[l][k][mu][nu] = -j.grad[nu];
                }
            }
        }
        Ok(out)
    }
}

/// The local affine connection of a configuration.
#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum ConnectionField {
    Derived(FrameField),
    Direct(DirectConnection),
    /// Torsion-free connection of the vierbein in use.
    LeviCivita,
}

/// `A^{kl}_mu` and `d_nu A^{kl}_mu` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionJet {
    pub value: Rank3,
    pub grad: Rank4,
}

impl ConnectionJet {
    pub const fn zero() -> Self {
        ConnectionJet { value: zero_rank3(), grad: zero_rank4() }
    }

    /// Largest `|A^{kl}_mu + A^{lk}_mu|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut m = 0.0_f64;
        for k in 0..4 {
            for l in 0..4 {
                for mu in 0..4 {
                    m = m.max((self.value[k][l][mu] + self.value[l][k][mu]).abs());
                }
            }
        }
        m
    }
}

impl ConnectionField {
    /// The vierbein is only consulted by the Levi-Civita variant.
    pub fn jet(&self, h: &dyn VierbeinField, p: &Point4) -> Result<ConnectionJet> {
        match self {
            ConnectionField::Derived(frame) => frame.jet(p),
            ConnectionField::Direct(direct) => direct.jet(p),
            ConnectionField::LeviCivita => levi_civita_jet(&h.jet(p)?),
        }
    }

    pub fn is_levi_civita(&self) -> bool {
        matches!(self, ConnectionField::LeviCivita)
    }
}

/// `A^{kl}_mu` at a point.
pub fn local_connection(c: &ConnectionField, h: &dyn VierbeinField, p: &Point4) -> Result<Rank3> {
    Ok(c.jet(h, p)?.value)
}

/// `Gamma^nu_{sigma mu} = -h^j_sigma (d_mu h_j^nu + eta_jj A^{jl}_mu h_l^nu)`,
/// the solution of the vanishing total covariant derivative of the vierbein.
pub(crate) fn christoffel_generic<T: Scalar>(
    h: &[[T; 4]; 4],
    inv: &[[T; 4]; 4],
    dh: &[[[T; 4]; 4]; 4],
    a: &[[[T; 4]; 4]; 4],
) -> [[[T; 4]; 4]; 4] {
    let mut out = [[[T::zero(); 4]; 4]; 4];
    for nu in 0..4 {
        for sigma in 0..4 {
            for mu in 0..4 {
                let mut acc = T::zero();
                for j in 0..4 {
                    let mut inner = dh[j][nu][mu];
                    for l in 0..4 {
                        inner += (a[j][l][mu] * h[l][nu]).scale(ETA_DIAG[j]);
                    }
                    acc -= inv[sigma][j] * inner;
                }
                out[nu][sigma][mu] = acc;
            }
        }
    }
    out
}

fn inverse_of(h: &VierbeinJet) -> Result<[[f64; 4]; 4]> {
    let det = checked_det(&h.value)?;
    inverse_generic(h.value.0).ok_or(Error::Degenerate { det, threshold: 0.0 })
}

/// `Gamma^nu_{rho mu}` stored `[nu][rho][mu]`.
pub fn global_connection(h: &dyn VierbeinField, c: &ConnectionField, p: &Point4) -> Result<Rank3> {
    let jet = h.jet(p)?;
    let a = match c {
        ConnectionField::LeviCivita => levi_civita_jet(&jet)?,
        other => other.jet(h, p)?,
    };
    global_from_jets(&jet, &a.value)
}

pub(crate) fn global_from_jets(jet: &VierbeinJet, a: &Rank3) -> Result<Rank3> {
    let inv = inverse_of(jet)?;
    Ok(christoffel_generic(&jet.value.0, &inv, &jet.grad, a))
}

/// `T^nu_{rho mu} = Gamma^nu_{rho mu} - Gamma^nu_{mu rho}`.
pub fn torsion(gamma: &Rank3) -> Rank3 {
    let mut t = zero_rank3();
    for nu in 0..4 {
        for rho in 0..4 {
            for mu in 0..4 {
                t[nu][rho][mu] = gamma[nu][rho][mu] - gamma[nu][mu][rho];
            }
        }
    }
    t
}

/// Residual `d_mu h^{k nu} + A^{kl}_mu h_l^nu + Gamma^nu_{rho mu} h^{k rho}`
/// with `h^{k nu} = eta^{kk} h_k^nu`, stored `[k][nu][mu]`.
pub fn postulate_residual(jet: &VierbeinJet, a: &Rank3, gamma: &Rank3) -> Rank3 {
    let h = &jet.value;
    let mut r = zero_rank3();
    for k in 0..4 {
        for nu in 0..4 {
            for mu in 0..4 {
                let mut v = ETA_DIAG[k] * jet.grad[k][nu][mu];
                for l in 0..4 {
                    v += a[k][l][mu] * h[l][nu];
                }
                for rho in 0..4 {
                    v += gamma[nu][rho][mu] * ETA_DIAG[k] * h[k][rho];
                }
                r[k][nu][mu] = v;
            }
        }
    }
    r
}

/// Torsion-free `A^{kl}_mu` for the vierbein at `p`.
pub fn levi_civita_connection(h: &dyn VierbeinField, p: &Point4) -> Result<Rank3> {
    Ok(levi_civita_jet(&h.jet(p)?)?.value)
}

/// Solves the 24 zero-torsion equations for the 24 independent components
/// `A^{kl}_mu` (`k < l`). The system is solved over first-order jets so the
/// gradient `d_nu A^{kl}_mu` comes out exactly from the vierbein Hessian.
pub(crate) fn levi_civita_jet(jet: &VierbeinJet) -> Result<ConnectionJet> {
    checked_det(&jet.value)?;
    let h = jet.dual();
    let dh = jet.dual_grad();
    let a = levi_civita_generic(&h, &dh)?;
    let mut out = ConnectionJet::zero();
    for k in 0..4 {
        for l in 0..4 {
            for mu in 0..4 {
                out.value[k][l][mu] = a[k][l][mu].re;
                out.grad[k][l][mu] = a[k][l][mu].eps;
            }
        }
    }
    Ok(out)
}

pub(crate) fn levi_civita_generic<T: Scalar>(
    h: &[[T; 4]; 4],
    dh: &[[[T; 4]; 4]; 4],
) -> Result<[[[T; 4]; 4]; 4]> {
    let inv = inverse_generic(*h).ok_or(Error::SingularSystem)?;
    // inv[sigma][j] = h^j_sigma
    let mut rows = Vec::with_capacity(24);
    let mut rhs = Vec::with_capacity(24);
    for nu in 0..4 {
        for sigma in 0..4 {
            for mu in sigma + 1..4 {
                let mut row = vec![T::zero(); 24];
                let mut c = T::zero();
                for j in 0..4 {
                    c -= inv[sigma][j] * dh[j][nu][mu];
                    c += inv[mu][j] * dh[j][nu][sigma];
                }
                for (pi, &(j, l)) in PAIRS.iter().enumerate() {
                    let at_mu = (inv[sigma][j] * h[l][nu]).scale(ETA_DIAG[j])
                        - (inv[sigma][l] * h[j][nu]).scale(ETA_DIAG[l]);
                    let at_sigma = (inv[mu][j] * h[l][nu]).scale(ETA_DIAG[j])
                        - (inv[mu][l] * h[j][nu]).scale(ETA_DIAG[l]);
                    row[pi * 4 + mu] -= at_mu;
                    row[pi * 4 + sigma] += at_sigma;
                }
                rows.push(row);
                rhs.push(-c);
            }
        }
    }
    let x = solve_dense(rows, rhs, 1e-12)?;
    let mut a = [[[T::zero(); 4]; 4]; 4];
    for (pi, &(k, l)) in PAIRS.iter().enumerate() {
        for mu in 0..4 {
            a[k][l][mu] = x[pi * 4 + mu];
            a[l][k][mu] = -x[pi * 4 + mu];
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::VierbeinBundle;
    use crate::tensor::Matrix4;

    fn c() -> Constants {
        Constants::new()
    }

    #[test]
    fn constant_frame_gives_zero() {
        let f = FrameField::parse(
            &[["1", "0", "0", "0"], ["0", "0", "1", "0"], ["0", "-1", "0", "0"], ["0", "0", "0", "1"]],
            &c(),
        )
        .unwrap();
        let a = local_connection(&ConnectionField::Derived(f), &VierbeinBundle::identity(), &Point4::origin()).unwrap();
        assert!(a.iter().flatten().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn rotation_frame_block() {
        let f = FrameField::parse(
            &[
                ["1", "0", "0", "0"],
                ["0", "cos(x0)", "-sin(x0)", "0"],
                ["0", "sin(x0)", "cos(x0)", "0"],
                ["0", "0", "0", "1"],
            ],
            &c(),
        )
        .unwrap();
        let p = Point4::new(0.7, 0.1, 0.2, 0.3);
        let a = local_connection(&ConnectionField::Derived(f), &VierbeinBundle::identity(), &p).unwrap();
        for k in 0..4 {
            for l in 0..4 {
                for mu in 0..4 {
                    let expected = match (k, l, mu) {
                        (1, 2, 0) => 1.0,
                        (2, 1, 0) => -1.0,
                        _ => 0.0,
                    };
                    assert!((a[k][l][mu] - expected).abs() < 1e-15, "{k}{l}{mu}");
                }
            }
        }
    }

    #[test]
    fn non_orthonormal_frame_rejected() {
        let f = FrameField::parse(
            &[["2", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
            &c(),
        )
        .unwrap();
        let r = local_connection(&ConnectionField::Derived(f), &VierbeinBundle::identity(), &Point4::origin());
        assert!(matches!(r, Err(Error::FrameNotOrthonormal { .. })));
    }

    #[test]
    fn torsion_example() {
        let mut g = zero_rank3();
        g[0][1][2] = 1.0;
        let t = torsion(&g);
        assert_eq!(t[0][1][2], 1.0);
        assert_eq!(t[0][2][1], -1.0);
        let sym = {
            let mut s = zero_rank3();
            s[1][0][2] = 0.5;
            s[1][2][0] = 0.5;
            s
        };
        assert!(torsion(&sym).iter().flatten().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn flat_levi_civita_is_zero() {
        let hb = VierbeinBundle::constant(&Matrix4::diag([1.0, 2.0, 3.0, 0.5]));
        let a = levi_civita_connection(&hb, &Point4::origin()).unwrap();
        assert!(a.iter().flatten().flatten().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn frw_christoffels() {
        let hb = VierbeinBundle::parse(
            &[["1", "0", "0", "0"], ["0", "exp(-x0)", "0", "0"], ["0", "0", "exp(-x0)", "0"], ["0", "0", "0", "exp(-x0)"]],
            &c(),
        )
        .unwrap();
        let p = Point4::new(0.3, 0.1, -0.2, 0.4);
        let g = global_connection(&hb, &ConnectionField::LeviCivita, &p).unwrap();
        let a2 = (2.0 * 0.3_f64).exp();
        assert!((g[0][1][1] - a2).abs() < 1e-12);
        assert!((g[1][0][1] - 1.0).abs() < 1e-12);
        assert!((g[1][1][0] - 1.0).abs() < 1e-12);
        assert!(torsion(&g).iter().flatten().flatten().all(|&v| v.abs() < 1e-12));
    }
}
