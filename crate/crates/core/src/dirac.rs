//! Classical Dirac field on the bimetric background: covariant derivatives,
//! the Lagrangian, Euler-Lagrange residuals, spin density and stress-energy
//! sources, field-equation residuals, the covariant-derivative commutator
//! and conservation diagnostics.
//!
//! Spinor-valued quantities carry a local-frame index through the gamma
//! matrices: `gamma^mu = h_k^mu gamma^k` is the global gamma and
//! `Omega_mu = 1/4 A^{kl}_mu gamma_k gamma_l` the spinor connection.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{parse_expression, ComplexExpression, Constants, Point4};
use crate::gamma::{bilinear, dot, row_norm, CMatrix4, GammaSet, Spinor, I};
use crate::geometry::{ConnectionField, ConnectionJet, Curvature, PointGeometry, VierbeinField};
use crate::scalar::{Dual4, Scalar};
use crate::tensor::{det_generic, inverse_generic, lorentz_from_generator, minkowski_eta, Matrix4, Rank3, ETA_DIAG};

type Row = [Complex64; 4];

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Sign of the connection term in the adjoint covariant derivative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum AdjointSignConvention {
    /// `psi-bar_{;mu} = psi-bar_{,mu} + 1/4 A^{kl}_mu psi-bar gamma_k gamma_l`
    #[default]
    AsPrinted,
    /// `psi-bar_{;mu} = psi-bar_{,mu} - 1/4 A^{kl}_mu psi-bar gamma_k gamma_l`,
    /// the Dirac adjoint of the spinor covariant derivative.
    Standard,
}

impl AdjointSignConvention {
    pub fn sign(self) -> f64 {
        match self {
            AdjointSignConvention::AsPrinted => 1.0,
            AdjointSignConvention::Standard => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AdjointSignConvention::AsPrinted => "as-printed",
            AdjointSignConvention::Standard => "standard",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "as-printed" => Some(AdjointSignConvention::AsPrinted),
            "standard" => Some(AdjointSignConvention::Standard),
            _ => None,
        }
    }
}

/// Four complex component expressions and a mass.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracField {
    pub psi: [ComplexExpression; 4],
    pub mass: f64,
}

/// Spinor value and its coordinate gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinorJet {
    pub value: Spinor,
    /// `grad[mu] = d_mu psi`
    pub grad: [Spinor; 4],
}

impl DiracField {
    pub fn new(psi: [ComplexExpression; 4], mass: f64) -> Result<Self> {
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be finite and >= 0, got {mass}")));
        }
        Ok(DiracField { psi, mass })
    }

    pub fn zero(mass: f64) -> Result<Self> {
        Self::new(Default::default(), mass)
    }

    pub fn jet(&self, p: &Point4) -> Result<SpinorJet> {
        let mut value = Spinor::zero();
        let mut grad = [Spinor::zero(); 4];
        for (a, c) in self.psi.iter().enumerate() {
            let re = c.re.eval_jet2(p)?;
            let im = c.im.eval_jet2(p)?;
            value.0[a] = Complex64::new(re.value, im.value);
            for mu in 0..4 {
                grad[mu].0[a] = Complex64::new(re.grad[mu], im.grad[mu]);
            }
        }
        Ok(SpinorJet { value, grad })
    }

    pub fn value(&self, p: &Point4) -> Result<Spinor> {
        let mut s = Spinor::zero();
        for (a, c) in self.psi.iter().enumerate() {
            s.0[a] = Complex64::new(c.re.eval(p)?, c.im.eval(p)?);
        }
        Ok(s)
    }
}

impl Default for ComplexExpression {
    fn default() -> Self {
        ComplexExpression::zero()
    }
}

/// Amplitude `u` with `(gamma^mu k_mu - m) u = 0` for a momentum with
/// `eta^{mu nu} k_mu k_nu = m^2`. Since `(gamma.k - m)(gamma.k + m) = k^2 - m^2`,
/// every column of `gamma.k + m` lies in the null space; the largest one is
/// returned with unit norm.
pub fn plane_wave_amplitude(gammas: &GammaSet, k: [f64; 4], mass: f64) -> Result<Spinor> {
    let k2: f64 = (0..4).map(|mu| ETA_DIAG[mu] * k[mu] * k[mu]).sum();
    let scale = k.iter().fold(mass * mass, |m, v| m.max(v * v)).max(1.0);
    if (k2 - mass * mass).abs() > 1e-12 * scale {
        return Err(Error::InvalidArgument(format!("momentum is off shell: k^2 = {k2}, m^2 = {}", mass * mass)));
    }
    let mut slash = CMatrix4::identity().scale_re(mass);
    for mu in 0..4 {
        // gamma^mu k_mu with the flat vierbein
        slash = slash + gammas.upper(mu).scale_re(k[mu]);
    }
    let best = (0..4)
        .map(|j| Spinor(std::array::from_fn(|i| slash[i][j])))
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or_default();
    let n = best.norm();
    if n == 0.0 {
        return Err(Error::InvalidArgument("no plane-wave amplitude for the zero momentum".into()));
    }
    Ok(best.scale(Complex64::new(1.0 / n, 0.0)))
}

/// The field `u exp(i k_mu x^mu)` as component expressions.
pub fn plane_wave_field(gammas: &GammaSet, k: [f64; 4], mass: f64) -> Result<DiracField> {
    let u = plane_wave_amplitude(gammas, k, mass)?;
    let phase = format!("(({:?})*x0 + ({:?})*x1 + ({:?})*x2 + ({:?})*x3)", k[0], k[1], k[2], k[3]);
    let consts = Constants::new();
    let mut psi: [ComplexExpression; 4] = Default::default();
    for (a, c) in u.0.iter().enumerate() {
        let re = format!("({:?})*cos{phase} - ({:?})*sin{phase}", c.re, c.im);
        let im = format!("({:?})*sin{phase} + ({:?})*cos{phase}", c.re, c.im);
        psi[a] = ComplexExpression::new(parse_expression(&re, &consts)?, parse_expression(&im, &consts)?);
    }
    DiracField::new(psi, mass)
}

/// A full configuration: background, connection, matter and conventions.
#[derive(Clone, Copy)]
pub struct Configuration<'a> {
    pub vierbein: &'a dyn VierbeinField,
    pub connection: &'a ConnectionField,
    pub dirac: &'a DiracField,
    pub gammas: &'a GammaSet,
    pub adjoint: AdjointSignConvention,
}

impl<'a> Configuration<'a> {
    pub fn new(
        vierbein: &'a dyn VierbeinField,
        connection: &'a ConnectionField,
        dirac: &'a DiracField,
        gammas: &'a GammaSet,
    ) -> Self {
        Configuration { vierbein, connection, dirac, gammas, adjoint: AdjointSignConvention::default() }
    }

    pub fn with_adjoint(mut self, adjoint: AdjointSignConvention) -> Self {
        self.adjoint = adjoint;
        self
    }

    pub fn geometry(&self, p: &Point4) -> Result<PointGeometry> {
        PointGeometry::new(self.vierbein, self.connection, p)
    }

    pub fn at(&self, p: &Point4) -> Result<DiracPoint<'a>> {
        DiracPoint::new(self.gammas, self.geometry(p)?, self.dirac.jet(p)?, self.dirac.mass, self.adjoint)
    }
}

/// All Dirac quantities at one point.
#[derive(Clone, Debug)]
pub struct DiracPoint<'a> {
    pub gammas: &'a GammaSet,
    pub geometry: PointGeometry,
    pub psi: SpinorJet,
    pub mass: f64,
    pub adjoint: AdjointSignConvention,
    /// `gamma^mu = h_k^mu gamma^k`
    pub global_gammas: [CMatrix4; 4],
    /// `Omega_mu = 1/4 A^{kl}_mu gamma_k gamma_l`
    pub omega: [CMatrix4; 4],
    bar: Row,
    bar_grad: [Row; 4],
}

/// Both lines of the Euler-Lagrange equations at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracResidual {
    /// Adjoint equation (row spinor).
    pub adjoint: Row,
    /// Spinor equation.
    pub spinor: Spinor,
}

impl DiracResidual {
    pub fn max_abs(&self) -> f64 {
        self.adjoint.iter().chain(self.spinor.0.iter()).fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn max_abs_diff(&self, o: &DiracResidual) -> f64 {
        let a = self.adjoint.iter().zip(o.adjoint.iter());
        let s = self.spinor.0.iter().zip(o.spinor.0.iter());
        a.chain(s).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    fn scaled(&self, k: f64) -> DiracResidual {
        DiracResidual { adjoint: self.adjoint.map(|c| c * k), spinor: self.spinor.scale(Complex64::new(k, 0.0)) }
    }
}

/// Outcome of the on-shell vanishing check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OnShellCheck {
    /// `|2 L_D|`
    pub two_lagrangian: f64,
    /// `(|res_adjoint| + |res_spinor|) |psi|`
    pub bound: f64,
    /// `|2 L_D - Re(res_adjoint psi + psi-bar res_spinor)|`
    pub identity_residual: f64,
    /// Imaginary part of `res_adjoint psi + psi-bar res_spinor`.
    pub imaginary_part: f64,
    /// Magnitude of the individual terms, for relative tolerances.
    pub scale: f64,
}

impl OnShellCheck {
    pub fn bound_holds(&self) -> bool {
        self.two_lagrangian <= self.bound * (1.0 + 1e-8) + 1e-14 * self.scale
    }
}

/// Stress-energy `T^l_mu` with the imaginary part of the unsymmetrized form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StressEnergy {
    pub tensor: Matrix4,
    pub verbatim_imaginary: f64,
}

/// Adjoint-sign hermiticity report for one convention.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjointDiagnostic {
    pub convention: AdjointSignConvention,
    /// `max |(Psi_{;mu})^dagger gamma^0 - psi-bar_{;mu}|`
    pub adjoint_consistency: f64,
    /// `|Im L|` of the covariantized special-relativistic Lagrangian.
    pub covariant_lagrangian_imaginary: f64,
    /// `|L_cov - L_D|` against the real symmetrized Lagrangian.
    pub covariant_vs_symmetrized: f64,
    /// `|L_cov - L_expanded|` against the antisymmetric expanded form.
    pub covariant_vs_expanded: f64,
    /// `|L_expanded - L_D|`; independent of the convention.
    pub expanded_vs_symmetrized: f64,
}

/// Current `J^mu = h psi-bar gamma^mu psi` and its divergence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Current {
    pub j: [f64; 4],
    pub divergence: f64,
    pub scale: f64,
}

/// Left and right side of the covariant-derivative commutator identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
}

fn row_apply(row: &Row, m: &CMatrix4) -> Row {
    m.apply_left(row)
}

fn row_add(a: &Row, b: &Row) -> Row {
    std::array::from_fn(|i| a[i] + b[i])
}

fn row_scale(a: &Row, k: Complex64) -> Row {
    a.map(|c| c * k)
}

impl<'a> DiracPoint<'a> {
    pub fn new(
        gammas: &'a GammaSet,
        geometry: PointGeometry,
        psi: SpinorJet,
        mass: f64,
        adjoint: AdjointSignConvention,
    ) -> Result<Self> {
        let global_gammas = gammas.global(geometry.h());
        let a = &geometry.connection.value;
        let omega = std::array::from_fn(|mu| {
            let mut m = CMatrix4::zeros();
            for k in 0..4 {
                for l in 0..4 {
                    if a[k][l][mu] != 0.0 {
                        m = m + gammas.lower_pair(k, l).scale_re(0.25 * a[k][l][mu]);
                    }
                }
            }
            m
        });
        let bar = gammas.adjoint(&psi.value);
        let bar_grad = std::array::from_fn(|mu| gammas.adjoint(&psi.grad[mu]));
        Ok(DiracPoint { gammas, geometry, psi, mass, adjoint, global_gammas, omega, bar, bar_grad })
    }

    /// The same point after a constant local Lorentz transformation
    /// `L = lorentz_from_generator(omega)`: `h_k^mu -> L_k^j h_j^mu`, upper local
    /// indices of the connection with `eta L eta`, and the spinor with the
    /// matching spinor representation.
    pub fn lorentz_transformed(&self, omega: &Matrix4) -> Result<DiracPoint<'a>> {
        let eta = minkowski_eta();
        let lower = lorentz_from_generator(omega);
        let upper = eta * lower * eta;
        let v0 = &self.geometry.vierbein;
        let mut v = *v0;
        v.value = lower * v0.value;
        for k in 0..4 {
            for mu in 0..4 {
                for a in 0..4 {
                    v.grad[k][mu][a] = (0..4).map(|j| lower[k][j] * v0.grad[j][mu][a]).sum();
                    for b in 0..4 {
                        v.hess[k][mu][a][b] = (0..4).map(|j| lower[k][j] * v0.hess[j][mu][a][b]).sum();
                    }
                }
            }
        }
        let a0 = &self.geometry.connection;
        let mut c = ConnectionJet::zero();
        for k in 0..4 {
            for l in 0..4 {
                for m in 0..4 {
                    for n in 0..4 {
                        let w = upper[k][m] * upper[l][n];
                        if w == 0.0 {
                            continue;
                        }
                        for mu in 0..4 {
                            c.value[k][l][mu] += w * a0.value[m][n][mu];
                            for nu in 0..4 {
                                c.grad[k][l][mu][nu] += w * a0.grad[m][n][mu][nu];
                            }
                        }
                    }
                }
            }
        }
        let geometry = PointGeometry::from_jets(self.geometry.point, v, c)?;
        let t = self.gammas.spinor_transform(&(eta * *omega * eta));
        let psi = SpinorJet { value: t.apply(&self.psi.value), grad: self.psi.grad.map(|s| t.apply(&s)) };
        DiracPoint::new(self.gammas, geometry, psi, self.mass, self.adjoint)
    }

    pub fn psi_bar(&self) -> Row {
        self.bar
    }

    /// `(Psi_{;mu}, psi-bar_{;mu})` for every `mu`.
    pub fn covariant_derivative(&self) -> ([Spinor; 4], [Row; 4]) {
        let s = Complex64::new(self.adjoint.sign(), 0.0);
        let dpsi = std::array::from_fn(|mu| self.psi.grad[mu].add(&self.omega[mu].apply(&self.psi.value)));
        let dbar = std::array::from_fn(|mu| {
            row_add(&self.bar_grad[mu], &row_scale(&row_apply(&self.bar, &self.omega[mu]), s))
        });
        (dpsi, dbar)
    }

    /// Kinetic part `i/2 [psi-bar gamma^mu psi_{,mu} - psi-bar_{,mu} gamma^mu psi]`.
    fn kinetic(&self, gmat: impl Fn(usize) -> CMatrix4, deriv: usize) -> Complex64 {
        let g = gmat(deriv);
        let a = bilinear(&self.bar, &g, &self.psi.grad[deriv]);
        let b = bilinear(&self.bar_grad[deriv], &g, &self.psi.value);
        I * 0.5 * (a - b)
    }

    /// Complex value of the symmetrized Lagrangian; its real part is `L_D`.
    fn lagrangian_complex(&self) -> Complex64 {
        let psi = &self.psi.value;
        let mut l = bilinear(&self.bar, &CMatrix4::identity(), psi) * self.mass;
        for mu in 0..4 {
            let g = self.global_gammas[mu];
            l += self.kinetic(|m| self.global_gammas[m], mu);
            let sym = g * self.omega[mu] + self.omega[mu] * g;
            l += I * 0.5 * bilinear(&self.bar, &sym, psi);
        }
        l
    }

    /// `L_D = m psi-bar psi + i/2 [psi-bar gamma^mu psi_{,mu} - psi-bar_{,mu} gamma^mu psi]
    ///   + i/8 A^{kl}_mu psi-bar (gamma^mu gamma_k gamma_l + gamma_k gamma_l gamma^mu) psi`.
    pub fn lagrangian(&self) -> Result<f64> {
        let l = self.lagrangian_complex();
        if l.im.abs() > 1e-10 * self.scale() {
            return Err(Error::NonRealLagrangian { residue: l.im.abs() });
        }
        Ok(l.re)
    }

    /// Special-relativistic Lagrangian with covariant derivatives substituted,
    /// using the configured adjoint sign.
    pub fn covariant_lagrangian(&self) -> Complex64 {
        let (dpsi, dbar) = self.covariant_derivative();
        let psi = &self.psi.value;
        let mut l = dot(&self.bar, psi) * self.mass;
        for mu in 0..4 {
            let g = &self.global_gammas[mu];
            l += I * 0.5 * (bilinear(&self.bar, g, &dpsi[mu]) - bilinear(&dbar[mu], g, psi));
        }
        l
    }

    /// Expanded form with antisymmetric connection coupling
    /// `m psi-bar psi + i/2 [...] + i/8 psi-bar gamma^mu A gamma_k gamma_l psi - i/8 A psi-bar gamma_k gamma_l gamma^mu psi`.
    pub fn expanded_lagrangian(&self) -> Complex64 {
        let psi = &self.psi.value;
        let mut l = dot(&self.bar, psi) * self.mass;
        for mu in 0..4 {
            let g = self.global_gammas[mu];
            l += self.kinetic(|m| self.global_gammas[m], mu);
            l += I * 0.5 * bilinear(&self.bar, &(g * self.omega[mu] - self.omega[mu] * g), psi);
        }
        l
    }

    /// `(1/h) d_mu (h h_k^mu) gamma^k`.
    fn density_term(&self) -> CMatrix4 {
        let g = &self.geometry;
        let h = g.h();
        let mut out = CMatrix4::zeros();
        for k in 0..4 {
            let mut c = 0.0;
            for mu in 0..4 {
                c += g.density_grad[mu] / g.density * h[k][mu] + g.vierbein.grad[k][mu][mu];
            }
            out = out + self.gammas.upper(k).scale_re(c);
        }
        out
    }

    /// `sum_mu gamma^mu Omega_mu = 1/4 A^{kl}_mu gamma^mu gamma_k gamma_l`.
    fn connection_coupling(&self) -> CMatrix4 {
        let mut c = CMatrix4::zeros();
        for mu in 0..4 {
            c = c + self.global_gammas[mu] * self.omega[mu];
        }
        c
    }

    /// Euler-Lagrange equations divided by the density:
    /// `m psi-bar - i psi-bar_{,mu} gamma^mu + i/4 A psi-bar gamma^mu gamma_k gamma_l - i/2 psi-bar D`
    /// and `m psi + i gamma^mu psi_{,mu} + i/4 A gamma^mu gamma_k gamma_l psi + i/2 D psi`
    /// with `D = (1/h) d_mu(h h_k^mu) gamma^k`.
    pub fn residual(&self) -> DiracResidual {
        let psi = &self.psi.value;
        let d = self.density_term();
        let c = self.connection_coupling();
        let mut adj = row_scale(&self.bar, Complex64::new(self.mass, 0.0));
        let mut sp = psi.scale(Complex64::new(self.mass, 0.0));
        for mu in 0..4 {
            let g = &self.global_gammas[mu];
            adj = row_add(&adj, &row_scale(&row_apply(&self.bar_grad[mu], g), -I));
            sp = sp.add(&g.apply(&self.psi.grad[mu]).scale(I));
        }
        adj = row_add(&adj, &row_scale(&row_apply(&self.bar, &c), I));
        adj = row_add(&adj, &row_scale(&row_apply(&self.bar, &d), -I * 0.5));
        sp = sp.add(&c.apply(psi).scale(I));
        sp = sp.add(&d.apply(psi).scale(I * 0.5));
        DiracResidual { adjoint: adj, spinor: sp }
    }

    /// The undivided density form
    /// `h[m psi-bar - i/2 psi-bar_{,mu} gamma^mu + ...] - i/2 (h psi-bar gamma^mu)_{,mu}`,
    /// with `d_mu h` taken from the determinant of the jet-valued inverse vierbein.
    pub fn density_residual(&self) -> Result<DiracResidual> {
        let jet = &self.geometry.vierbein;
        let inv = inverse_generic(jet.dual()).ok_or(Error::Degenerate { det: 0.0, threshold: 0.0 })?;
        let hd: Dual4 = det_generic(inv);
        let (h, dh) = (hd.value(), hd.eps);
        let psi = &self.psi.value;
        let c = self.connection_coupling();
        let mut adj = row_scale(&self.bar, Complex64::new(h * self.mass, 0.0));
        let mut sp = psi.scale(Complex64::new(h * self.mass, 0.0));
        adj = row_add(&adj, &row_scale(&row_apply(&self.bar, &c), I * h));
        sp = sp.add(&c.apply(psi).scale(I * h));
        for mu in 0..4 {
            let g = &self.global_gammas[mu];
            let mut dg = CMatrix4::zeros();
            for k in 0..4 {
                dg = dg + self.gammas.upper(k).scale_re(jet.grad[k][mu][mu]);
            }
            // (h psi-bar gamma^mu)_{,mu}
            let mut div_row = row_scale(&row_apply(&self.bar, g), Complex64::new(dh[mu], 0.0));
            div_row = row_add(&div_row, &row_scale(&row_apply(&self.bar_grad[mu], g), Complex64::new(h, 0.0)));
            div_row = row_add(&div_row, &row_scale(&row_apply(&self.bar, &dg), Complex64::new(h, 0.0)));
            // (h gamma^mu psi)_{,mu}
            let div_col = g
                .apply(psi)
                .scale(Complex64::new(dh[mu], 0.0))
                .add(&g.apply(&self.psi.grad[mu]).scale(Complex64::new(h, 0.0)))
                .add(&dg.apply(psi).scale(Complex64::new(h, 0.0)));
            adj = row_add(&adj, &row_scale(&row_apply(&self.bar_grad[mu], g), -I * 0.5 * h));
            adj = row_add(&adj, &row_scale(&div_row, -I * 0.5));
            sp = sp.add(&g.apply(&self.psi.grad[mu]).scale(I * 0.5 * h));
            sp = sp.add(&div_col.scale(I * 0.5));
        }
        Ok(DiracResidual { adjoint: adj, spinor: sp })
    }

    /// `max |density_residual / h - residual|`.
    pub fn density_form_mismatch(&self) -> Result<f64> {
        let d = self.density_residual()?.scaled(1.0 / self.geometry.density);
        Ok(d.max_abs_diff(&self.residual()))
    }

    /// Typical magnitude of the Lagrangian terms at this point.
    pub fn scale(&self) -> f64 {
        let n = self.psi.value.norm();
        let hmax = self.geometry.h().max_abs();
        let amax = self.geometry.connection.value.iter().flatten().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
        let dh: f64 = self.geometry.vierbein.grad.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()));
        let dpsi: f64 = self.psi.grad.iter().map(|s| s.norm()).sum();
        let dlog: f64 = self.geometry.density_grad.iter().map(|v| v.abs()).sum::<f64>() / self.geometry.density.abs();
        1.0 + n * n * (self.mass + 16.0 * hmax * (amax + dlog) + 16.0 * dh) + 4.0 * hmax * n * dpsi
    }

    pub fn onshell_check(&self) -> Result<OnShellCheck> {
        let l = self.lagrangian()?;
        let r = self.residual();
        let psi = &self.psi.value;
        let combo = dot(&r.adjoint, psi) + dot(&self.bar, &r.spinor);
        let n = psi.norm();
        Ok(OnShellCheck {
            two_lagrangian: (2.0 * l).abs(),
            bound: (row_norm(&r.adjoint) + r.spinor.norm()) * n,
            identity_residual: (2.0 * l - combo.re).abs(),
            imaginary_part: combo.im,
            scale: self.scale(),
        })
    }

    /// `S^mu_{kl}` stored `[mu][k][l]`.
    pub fn spin_density(&self) -> Result<Rank3> {
        self.gammas.spin_density(&self.psi.value, self.geometry.h())
    }

    /// `T^l_mu = i/2 [psi-bar gamma^l psi_{,mu} - psi-bar_{,mu} gamma^l psi]
    ///   + i/8 A^{kj}_mu psi-bar (gamma^l gamma_k gamma_j + gamma_k gamma_j gamma^l) psi`
    /// with the local `gamma^l`.
    pub fn stress_energy(&self) -> Result<StressEnergy> {
        let psi = &self.psi.value;
        let mut tensor = Matrix4::zeros();
        let mut residue = 0.0_f64;
        let mut verbatim_imaginary = 0.0_f64;
        for l in 0..4 {
            let gl = *self.gammas.upper(l);
            for mu in 0..4 {
                let kin = self.kinetic(|_| gl, mu);
                let om = self.omega[mu];
                let sym = I * 0.5 * bilinear(&self.bar, &(gl * om + om * gl), psi);
                let verbatim = I * bilinear(&self.bar, &(gl * om), psi);
                let t = kin + sym;
                residue = residue.max(t.im.abs());
                verbatim_imaginary = verbatim_imaginary.max((kin + verbatim).im.abs());
                tensor[l][mu] = t.re;
            }
        }
        if residue > 1e-10 * self.scale() {
            return Err(Error::NonRealTensor { residue });
        }
        Ok(StressEnergy { tensor, verbatim_imaginary })
    }

    /// Connection field equation minus the spin source, `[mu][k][l]`:
    /// `d_a F^{a mu}_{kl} - F^{a mu}_{ml} A^m_{k a} + F^{a mu}_{km} A_l^m_a - h S^mu_{kl}`
    /// with `F^{a mu}_{kl} = h (h_k^a h_l^mu - h_k^mu h_l^a)`.
    pub fn connection_equation_residual(&self) -> Result<Rank3> {
        let s = self.spin_density()?;
        let mut lhs = connection_equation_lhs(&self.geometry);
        let h = self.geometry.density;
        for mu in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    lhs[mu][k][l] -= h * s[mu][k][l];
                }
            }
        }
        Ok(lhs)
    }

    /// `h (h^l_mu R - 2 R^l_mu) + T^l_mu`, stored `[l][mu]`.
    pub fn vierbein_equation_residual(&self, curvature: &Curvature) -> Result<Matrix4> {
        let t = self.stress_energy()?.tensor;
        Ok(vierbein_equation_lhs(&self.geometry, curvature) + t)
    }

    /// `J^mu = h psi-bar gamma^mu psi` and `d_mu J^mu` from the exact jets.
    pub fn current(&self) -> Result<Current> {
        let g = &self.geometry;
        let psi = &self.psi.value;
        let mut j = [0.0; 4];
        let mut residue = 0.0_f64;
        let mut div = C0;
        let mut scale = 0.0_f64;
        for mu in 0..4 {
            let gm = &self.global_gammas[mu];
            let b = bilinear(&self.bar, gm, psi);
            residue = residue.max(b.im.abs());
            j[mu] = g.density * b.re;
            let mut dg = CMatrix4::zeros();
            for k in 0..4 {
                dg = dg + self.gammas.upper(k).scale_re(g.vierbein.grad[k][mu][mu]);
            }
            let terms = [
                b * g.density_grad[mu],
                bilinear(&self.bar_grad[mu], gm, psi) * g.density,
                bilinear(&self.bar, &dg, psi) * g.density,
                bilinear(&self.bar, gm, &self.psi.grad[mu]) * g.density,
            ];
            for t in terms {
                div += t;
                scale = scale.max(t.norm());
            }
        }
        if residue > 1e-10 * (1.0 + psi.norm().powi(2) * g.h().max_abs()) {
            return Err(Error::NonRealCurrent { residue });
        }
        Ok(Current { j, divergence: div.re, scale })
    }

    pub fn adjoint_diagnostic(&self) -> Result<[AdjointDiagnostic; 2]> {
        let l21 = self.lagrangian()?;
        let conventions = [AdjointSignConvention::AsPrinted, AdjointSignConvention::Standard];
        Ok(conventions.map(|convention| {
            let mut p = self.clone();
            p.adjoint = convention;
            let (dpsi, dbar) = p.covariant_derivative();
            let mut consistency = 0.0_f64;
            for mu in 0..4 {
                let from_spinor = self.gammas.adjoint(&dpsi[mu]);
                for a in 0..4 {
                    consistency = consistency.max((from_spinor[a] - dbar[mu][a]).norm());
                }
            }
            let lc = p.covariant_lagrangian();
            let le = p.expanded_lagrangian();
            AdjointDiagnostic {
                convention,
                adjoint_consistency: consistency,
                covariant_lagrangian_imaginary: lc.im.abs(),
                covariant_vs_symmetrized: (lc - l21).norm(),
                covariant_vs_expanded: (lc - le).norm(),
                expanded_vs_symmetrized: (le - l21).norm(),
            }
        }))
    }
}

/// Left side of the connection field equation, stored `[mu][k][l]`.
pub fn connection_equation_lhs(g: &PointGeometry) -> Rank3 {
    let h = g.h();
    let rho = g.density;
    let a = &g.connection.value;
    // F[a][mu][k][l] and its divergence over a
    let f = |al: usize, mu: usize, k: usize, l: usize| rho * (h[k][al] * h[l][mu] - h[k][mu] * h[l][al]);
    // d_al (rho h_k^al h_l^mu)
    let d_term = |al: usize, k: usize, l: usize, mu: usize| {
        g.density_grad[al] * h[k][al] * h[l][mu]
            + rho * g.vierbein.grad[k][al][al] * h[l][mu]
            + rho * h[k][al] * g.vierbein.grad[l][mu][al]
    };
    let mut out = [[[0.0; 4]; 4]; 4];
    for mu in 0..4 {
        for k in 0..4 {
            for l in 0..4 {
                let mut v = 0.0;
                for al in 0..4 {
                    v += d_term(al, k, l, mu) - d_term(al, l, k, mu);
                    for m in 0..4 {
                        // A^m_{k al} = A^{mk}_al eta_kk ; A_l^m_al = eta_ll A^{lm}_al
                        v -= f(al, mu, m, l) * a[m][k][al] * ETA_DIAG[k];
                        v += f(al, mu, k, m) * ETA_DIAG[l] * a[l][m][al];
                    }
                }
                out[mu][k][l] = v;
            }
        }
    }
    out
}

/// `h (h^l_mu R - 2 R^l_mu)`, stored `[l][mu]`.
pub fn vierbein_equation_lhs(g: &PointGeometry, c: &Curvature) -> Matrix4 {
    Matrix4::from_fn(|l, mu| g.density * (g.inverse[l][mu] * c.scalar - 2.0 * c.ricci[l][mu]))
}

/// Covariant divergence `d_mu X^mu_nu + Gamma^mu_{l mu} X^l_nu - Gamma^l_{nu mu} X^mu_l`
/// with the outer derivative from central differences of `field`.
pub fn covariant_divergence(
    p: &Point4,
    gamma: &Rank3,
    step: f64,
    field: impl Fn(&Point4) -> Result<Matrix4>,
) -> Result<[f64; 4]> {
    let x = field(p)?;
    let mut div = [0.0; 4];
    for mu in 0..4 {
        let (pp, pm) = (p.shifted(mu, step), p.shifted(mu, -step));
        let (xp, xm) = (field(&pp)?, field(&pm)?);
        let width = pp.0[mu] - pm.0[mu];
        for nu in 0..4 {
            div[nu] += (xp[mu][nu] - xm[mu][nu]) / width;
        }
    }
    for (nu, d) in div.iter_mut().enumerate() {
        for mu in 0..4 {
            for l in 0..4 {
                *d += gamma[mu][l][mu] * x[l][nu] - gamma[l][nu][mu] * x[mu][l];
            }
        }
    }
    Ok(div)
}

/// Pointwise checks that need neighbouring points.
impl Configuration<'_> {
    /// `T^mu_nu = h_l^mu T^l_nu`.
    pub fn global_stress_energy(&self, p: &Point4) -> Result<Matrix4> {
        let d = self.at(p)?;
        let t = d.stress_energy()?.tensor;
        let h = d.geometry.h();
        Ok(Matrix4::from_fn(|mu, nu| (0..4).map(|l| h[l][mu] * t[l][nu]).sum()))
    }

    /// `T^mu_{nu;mu}`; generally nonzero.
    pub fn stress_energy_divergence(&self, p: &Point4, step: f64) -> Result<[f64; 4]> {
        let gamma = self.geometry(p)?.christoffel;
        covariant_divergence(p, &gamma, step, |q| self.global_stress_energy(q))
    }

    /// `B^mu_{nu;mu}`.
    pub fn einstein_divergence(&self, p: &Point4, step: f64) -> Result<[f64; 4]> {
        b_divergence(self.vierbein, self.connection, p, step)
    }

    /// `Psi_{;mu;nu} - Psi_{;nu;mu}` built from central differences of the
    /// first covariant derivative, against `1/4 R^{kl}_{mu nu} gamma_k gamma_l Psi
    /// - (Gamma^rho_{mu nu} - Gamma^rho_{nu mu}) Psi_{;rho}`.
    pub fn commutator_check(&self, p: &Point4, step: f64) -> Result<CommutatorCheck> {
        let first = |q: &Point4| -> Result<([Spinor; 4], [CMatrix4; 4])> {
            let d = self.at(q)?;
            let dpsi = std::array::from_fn(|mu| d.psi.grad[mu].add(&d.omega[mu].apply(&d.psi.value)));
            Ok((dpsi, d.omega))
        };
        let here = self.at(p)?;
        let (phi, omega) = first(p)?;
        let gamma = &here.geometry.christoffel;
        // d_nu Phi_mu stored [nu][mu]
        let mut dphi = [[Spinor::zero(); 4]; 4];
        for nu in 0..4 {
            let (pp, pm) = (p.shifted(nu, step), p.shifted(nu, -step));
            let ((fp, _), (fm, _)) = (first(&pp)?, first(&pm)?);
            let width = Complex64::new(1.0 / (pp.0[nu] - pm.0[nu]), 0.0);
            for mu in 0..4 {
                dphi[nu][mu] = fp[mu].sub(&fm[mu]).scale(width);
            }
        }
        let riemann = here.geometry.curvature().riemann;
        let second = |mu: usize, nu: usize| {
            let mut v = dphi[nu][mu].add(&omega[nu].apply(&phi[mu]));
            for rho in 0..4 {
                v = v.sub(&phi[rho].scale(Complex64::new(gamma[rho][mu][nu], 0.0)));
            }
            v
        };
        let (mut lhs_max, mut rhs_max, mut diff) = (0.0_f64, 0.0_f64, 0.0_f64);
        for mu in 0..4 {
            for nu in 0..4 {
                let lhs = second(mu, nu).sub(&second(nu, mu));
                let mut r = CMatrix4::zeros();
                for k in 0..4 {
                    for l in 0..4 {
                        r = r + self.gammas.lower_pair(k, l).scale_re(0.25 * riemann[k][l][mu][nu]);
                    }
                }
                let mut rhs = r.apply(&here.psi.value);
                for rho in 0..4 {
                    let t = gamma[rho][mu][nu] - gamma[rho][nu][mu];
                    rhs = rhs.sub(&phi[rho].scale(Complex64::new(t, 0.0)));
                }
                lhs_max = lhs_max.max(lhs.max_abs());
                rhs_max = rhs_max.max(rhs.max_abs());
                diff = diff.max(lhs.sub(&rhs).max_abs());
            }
        }
        Ok(CommutatorCheck { lhs: lhs_max, rhs: rhs_max, diff })
    }
}

/// `B^mu_{nu;mu}` for a background alone.
pub fn b_divergence(h: &dyn VierbeinField, c: &ConnectionField, p: &Point4, step: f64) -> Result<[f64; 4]> {
    let gamma = PointGeometry::new(h, c, p)?.christoffel;
    covariant_divergence(p, &gamma, step, |q| Ok(PointGeometry::new(h, c, q)?.curvature().einstein))
}

/// Constant-time slice for the four-momentum integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slice {
    pub x0: f64,
    /// `[lo, hi]` for x1, x2, x3.
    pub bounds: [[f64; 2]; 3],
    pub n: usize,
}

/// `P_mu = sum h h_j^nu B^j_mu d sigma_nu` over a constant-`x0` slice,
/// which reduces to `sum h B^0_mu dV`, by the midpoint rule.
pub fn four_momentum(h: &dyn VierbeinField, c: &ConnectionField, slice: &Slice) -> Result<[f64; 4]> {
    if slice.n == 0 {
        return Err(Error::InvalidArgument("slice needs at least one cell per axis".into()));
    }
    let n = slice.n;
    let widths: [f64; 3] = std::array::from_fn(|i| (slice.bounds[i][1] - slice.bounds[i][0]) / n as f64);
    let dv = widths[0] * widths[1] * widths[2];
    let mut p = [0.0; 4];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mid = |axis: usize, idx: usize| slice.bounds[axis][0] + (idx as f64 + 0.5) * widths[axis];
                let x = Point4::new(slice.x0, mid(0, i), mid(1, j), mid(2, k));
                let g = PointGeometry::new(h, c, &x)?;
                let b = g.curvature().einstein;
                for (mu, pm) in p.iter_mut().enumerate() {
                    *pm += g.density * b[0][mu] * dv;
                }
            }
        }
    }
    Ok(p)
}

/// Free-function forms over the standard gamma matrices.
pub fn covariant_spinor_derivative(
    d: &DiracField,
    h: &dyn VierbeinField,
    c: &ConnectionField,
    conv: AdjointSignConvention,
    gammas: &GammaSet,
    p: &Point4,
) -> Result<([Spinor; 4], [Row; 4])> {
    Ok(Configuration::new(h, c, d, gammas).with_adjoint(conv).at(p)?.covariant_derivative())
}

pub fn dirac_lagrangian(d: &DiracField, h: &dyn VierbeinField, c: &ConnectionField, gammas: &GammaSet, p: &Point4) -> Result<f64> {
    Configuration::new(h, c, d, gammas).at(p)?.lagrangian()
}

pub fn dirac_residual(
    d: &DiracField,
    h: &dyn VierbeinField,
    c: &ConnectionField,
    gammas: &GammaSet,
    p: &Point4,
) -> Result<DiracResidual> {
    Ok(Configuration::new(h, c, d, gammas).at(p)?.residual())
}

pub fn current_and_divergence(d: &DiracField, h: &dyn VierbeinField, gammas: &GammaSet, p: &Point4) -> Result<Current> {
    // the current does not involve the connection
    let c = ConnectionField::Direct(crate::geometry::DirectConnection::zero());
    Configuration::new(h, &c, d, gammas).at(p)?.current()
}
