use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use thiserror::Error;

use super::report::{CheckRecord, CheckReport, Environment, Status};
use super::{Expectations, SampleMode, Scenario};
use crate::dirac::{connection_equation_lhs, AdjointDiagnostic, AdjointSignConvention, Configuration};
use crate::error::Error;
use crate::expr::Point4;
use crate::gamma::GammaSet;
use crate::geometry::{
    composite_metric, gravity_metric, metric_from_vierbein, postulate_residual, CompositeVierbein, Transformed,
    VierbeinField,
};
use crate::oracles::{christoffel_fd, naive_inverse};
use crate::tensor::{lorentz_from_generator, Matrix4};

/// How a check affects the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    /// Always pass/fail.
    Required,
    /// Pass/fail only when the scenario declares the field equation solved.
    Expected,
    /// Pass/fail only for the torsion-free connection.
    TorsionFree,
    /// Reported, never fails.
    Informational,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckSpec {
    pub name: &'static str,
    pub tolerance: Option<f64>,
    pub kind: CheckKind,
    /// Uses finite differences and enters convergence studies.
    pub finite_difference: bool,
    pub description: &'static str,
}

const fn spec(name: &'static str, tolerance: Option<f64>, kind: CheckKind, fd: bool, description: &'static str) -> CheckSpec {
    CheckSpec { name, tolerance, kind, finite_difference: fd, description }
}

use CheckKind::*;

/// Every check, in report order.
pub const CHECKS: [CheckSpec; 20] = [
    spec("metric_inverse", Some(1e-12), Required, false, "max |g^{mu a} g_{a nu} - delta|"),
    spec("composite_reconstruction", Some(1e-10), Required, false, "composite frame squares to the composite metric"),
    spec("lorentz_invariance", Some(1e-9), Required, false, "metrics, Lagrangians and psi-bar psi under a fixed Lorentz transformation"),
    spec("volume_element", None, Informational, false, "equal volume elements of the two bundles"),
    spec("connection_antisymmetry", Some(1e-8), Required, false, "max |A^{kl} + A^{lk}|"),
    spec("vierbein_postulate", Some(1e-10), Required, false, "total covariant derivative of the vierbein"),
    spec("christoffel_oracle", Some(1e-6), TorsionFree, true, "global connection against the textbook metric formula"),
    spec("adjoint_sign", None, Informational, false, "adjoint covariant derivative against the Dirac adjoint"),
    spec("density_form", Some(1e-10), Required, false, "density form of the field equations divided by h"),
    spec("dirac_equation", Some(1e-10), Expected, false, "Euler-Lagrange residual of the Dirac field"),
    spec("lagrangian_identity", Some(1e-10), Required, false, "2 L_D against the bilinear of the field equations"),
    spec("commutator", Some(1e-5), Required, true, "commutator of covariant derivatives against curvature and torsion"),
    spec("curvature_antisymmetry", Some(1e-10), Required, false, "antisymmetry of R^{kl}_{mu nu} in both pairs"),
    spec("spin_source_antisymmetry", Some(1e-10), Required, false, "antisymmetry of the connection equation in k, l"),
    spec("connection_equation", Some(1e-8), Expected, false, "connection field equation with spin source"),
    spec("vierbein_equation", Some(1e-8), Expected, false, "vierbein field equation with stress-energy source"),
    spec("stress_energy_reality", None, Informational, false, "imaginary part of the unsymmetrized stress-energy"),
    spec("stress_energy_divergence", None, Informational, true, "covariant divergence of T^mu_nu"),
    spec("bianchi", Some(1e-6), TorsionFree, true, "covariant divergence of B^mu_nu"),
    spec("current_conservation", Some(1e-8), Expected, false, "divergence of the Dirac current"),
];

const N: usize = CHECKS.len();

/// Equation tag of a check.
pub fn tag(name: &str) -> &'static str {
    static TAGS: OnceLock<BTreeMap<String, String>> = OnceLock::new();
    let tags = TAGS.get_or_init(|| toml::from_str(include_str!("../../data/check_tags.toml")).expect("valid tag table"));
    tags.get(name).map(String::as_str).unwrap_or("")
}

/// A numerical failure at a specific sample point.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("at point {point:?}: {error}")]
pub struct RunError {
    pub point: [f64; 4],
    pub error: Error,
}

/// Generator of the fixed spot-check transformation: a boost of rapidity
/// 0.3 along x1 composed with a rotation of 0.2 in the x2-x3 plane.
pub fn spot_check_generator() -> Matrix4 {
    let mut w = Matrix4::zeros();
    w[0][1] = 0.3;
    w[1][0] = -0.3;
    w[2][3] = 0.2;
    w[3][2] = -0.2;
    w
}

#[derive(Clone, Debug)]
struct PointOutcome {
    residuals: [f64; N],
    volume_flagged: bool,
    adjoint: [AdjointDiagnostic; 2],
}

fn max_abs3(t: &[[[f64; 4]; 4]; 4]) -> f64 {
    t.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

fn rel(diff: f64, size: f64) -> f64 {
    diff / size.abs().max(1.0)
}

struct Context<'a> {
    scenario: &'a Scenario,
    vierbein: CompositeVierbein,
    gammas: GammaSet,
    only: Option<&'a [usize]>,
}

impl Context<'_> {
    fn wants(&self, i: usize) -> bool {
        self.only.is_none_or(|o| o.contains(&i))
    }

    fn evaluate(&self, p: &Point4) -> crate::Result<PointOutcome> {
        let s = self.scenario;
        let cfg = Configuration::new(&self.vierbein, &s.connection, &s.dirac, &self.gammas).with_adjoint(s.adjoint);
        let pt = cfg.at(p)?;
        let geo = &pt.geometry;
        let cv = geo.curvature();
        let mut r = [0.0; N];
        let mut volume_flagged = false;
        let mut adjoint = [zero_diag(); 2];

        for (i, check) in CHECKS.iter().enumerate() {
            if !self.wants(i) {
                continue;
            }
            r[i] = match check.name {
                "metric_inverse" => {
                    let cm = composite_metric(&s.gravity, &s.sfield, p)?;
                    (cm.upper * cm.lower).max_abs_diff(&Matrix4::identity())
                }
                "composite_reconstruction" => {
                    let cm = composite_metric(&s.gravity, &s.sfield, p)?;
                    rel(metric_from_vierbein(geo.h()).max_abs_diff(&cm.upper), cm.upper.max_abs())
                }
                "lorentz_invariance" => self.lorentz(&pt, p)?,
                "volume_element" => {
                    let v = crate::geometry::volume_element_check(&s.gravity, &s.sfield, p)?;
                    volume_flagged = v.sfield_rank == 1 && !v.satisfiable;
                    if volume_flagged {
                        1.0
                    } else {
                        0.0
                    }
                }
                "connection_antisymmetry" => geo.connection.max_asymmetry(),
                "vierbein_postulate" => {
                    let res = postulate_residual(&geo.vierbein, &geo.connection.value, &geo.christoffel);
                    let size = geo.h().max_abs() * (max_abs3(&geo.connection.value) + max_abs3(&geo.christoffel))
                        + max_abs3(&geo.vierbein.grad);
                    rel(max_abs3(&res), size)
                }
                "christoffel_oracle" => {
                    let lower = |q: &Point4| {
                        let h = self.vierbein.value(q)?;
                        let mut up = [[0.0; 4]; 4];
                        for (mu, row) in up.iter_mut().enumerate() {
                            for (nu, x) in row.iter_mut().enumerate() {
                                *x = h[0][mu] * h[0][nu] - (1..4).map(|k| h[k][mu] * h[k][nu]).sum::<f64>();
                            }
                        }
                        naive_inverse(&up)
                    };
                    let oracle = christoffel_fd(&lower, p, s.outer_step)?;
                    let mut d = 0.0_f64;
                    for a in 0..4 {
                        for b in 0..4 {
                            for c in 0..4 {
                                d = d.max((oracle[a][b][c] - geo.christoffel[a][b][c]).abs());
                            }
                        }
                    }
                    rel(d, max_abs3(&geo.christoffel))
                }
                "adjoint_sign" => {
                    adjoint = pt.adjoint_diagnostic()?;
                    adjoint[if s.adjoint == AdjointSignConvention::AsPrinted { 0 } else { 1 }].adjoint_consistency
                }
                "density_form" => pt.density_form_mismatch()? / pt.scale(),
                "dirac_equation" => pt.residual().max_abs() / pt.scale(),
                "lagrangian_identity" => {
                    let c = pt.onshell_check()?;
                    let excess = if c.bound_holds() { 0.0 } else { c.two_lagrangian - c.bound };
                    c.identity_residual.max(excess) / c.scale
                }
                "commutator" => cfg.commutator_check(p, s.nested_step)?.diff,
                "curvature_antisymmetry" => {
                    let rm = &cv.riemann;
                    let (mut d, mut size) = (0.0_f64, 0.0_f64);
                    for k in 0..4 {
                        for l in 0..4 {
                            for m in 0..4 {
                                for n in 0..4 {
                                    size = size.max(rm[k][l][m][n].abs());
                                    d = d.max((rm[k][l][m][n] + rm[l][k][m][n]).abs());
                                    d = d.max((rm[k][l][m][n] + rm[k][l][n][m]).abs());
                                }
                            }
                        }
                    }
                    rel(d, size)
                }
                "spin_source_antisymmetry" => {
                    let res = pt.connection_equation_residual()?;
                    let mut d = 0.0_f64;
                    for row in &res {
                        for k in 0..4 {
                            for l in 0..4 {
                                d = d.max((row[k][l] + row[l][k]).abs());
                            }
                        }
                    }
                    rel(d, max_abs3(&res))
                }
                "connection_equation" => {
                    let res = pt.connection_equation_residual()?;
                    rel(max_abs3(&res), max_abs3(&connection_equation_lhs(geo)))
                }
                "vierbein_equation" => {
                    let res = pt.vierbein_equation_residual(&cv)?;
                    rel(res.max_abs(), geo.density * (cv.scalar.abs() + cv.ricci.max_abs()))
                }
                "stress_energy_reality" => pt.stress_energy()?.verbatim_imaginary,
                "stress_energy_divergence" => {
                    cfg.stress_energy_divergence(p, s.outer_step)?.iter().fold(0.0, |m, v| m.max(v.abs()))
                }
                "bianchi" => {
                    let div = cfg.einstein_divergence(p, s.outer_step)?;
                    rel(div.iter().fold(0.0, |m, v| m.max(v.abs())), cv.einstein.max_abs())
                }
                "current_conservation" => {
                    let c = pt.current()?;
                    rel(c.divergence.abs(), c.scale)
                }
                other => unreachable!("unhandled check {other}"),
            };
        }
        Ok(PointOutcome { residuals: r, volume_flagged, adjoint })
    }

    fn lorentz(&self, pt: &crate::dirac::DiracPoint, p: &Point4) -> crate::Result<f64> {
        let s = self.scenario;
        let w = spot_check_generator();
        let moved = Transformed { inner: &s.gravity, lorentz: lorentz_from_generator(&w) };
        let mut worst = 0.0_f64;
        let (g0, g1) = (gravity_metric(&s.gravity, p)?, gravity_metric(&moved, p)?);
        worst = worst.max(rel(g0.max_abs_diff(&g1), g0.max_abs()));
        let (c0, c1) = (composite_metric(&s.gravity, &s.sfield, p)?, composite_metric(&moved, &s.sfield, p)?);
        worst = worst.max(rel(c0.upper.max_abs_diff(&c1.upper), c0.upper.max_abs()));
        let q = pt.lorentz_transformed(&w)?;
        let (k0, k1) = (pt.geometry.curvature(), q.geometry.curvature());
        let (l0, l1) = (pt.lagrangian()?, q.lagrangian()?);
        let bar = |d: &crate::dirac::DiracPoint| crate::gamma::dot(&d.psi_bar(), &d.psi.value);
        let (b0, b1) = (bar(pt), bar(&q));
        for (a, b) in [(l0, l1), (k0.scalar, k1.scalar), (k0.lagrangian, k1.lagrangian), (b0.re, b1.re), (b0.im, b1.im)] {
            worst = worst.max(rel(a - b, a.abs().max(pt.scale())));
        }
        Ok(worst)
    }
}

fn pool(threads: Option<usize>) -> Option<rayon::ThreadPool> {
    threads.map(|n| rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().expect("thread pool"))
}

/// Worker count from `SFIELD_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("SFIELD_THREADS").ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

/// Per-check maxima and the index of the worst point.
pub(crate) struct Aggregate {
    pub maxima: [f64; N],
    pub worst: [Option<usize>; N],
    pub volume_flagged: usize,
    pub adjoint: [AdjointDiagnostic; 2],
}

pub(crate) fn evaluate_points(s: &Scenario, points: &[Point4], only: Option<&[usize]>) -> Result<Aggregate, RunError> {
    let ctx = Context { scenario: s, vierbein: s.vierbein(), gammas: GammaSet::dirac(), only };
    let run = || points.par_iter().map(|p| ctx.evaluate(p)).collect::<Vec<_>>();
    let outcomes = match pool(threads_from_env()) {
        Some(pool) => pool.install(run),
        None => run(),
    };
    let mut agg = Aggregate { maxima: [0.0; N], worst: [None; N], volume_flagged: 0, adjoint: [zero_diag(); 2] };
    agg.adjoint[1].convention = AdjointSignConvention::Standard;
    for (idx, (p, o)) in points.iter().zip(outcomes).enumerate() {
        let o = o.map_err(|error| RunError { point: p.0, error })?;
        for i in 0..N {
            let (v, cur) = (o.residuals[i], agg.maxima[i]);
            // a NaN residual is the worst possible value and sticks
            if agg.worst[i].is_none() || (!cur.is_nan() && (v.is_nan() || v > cur)) {
                agg.maxima[i] = v;
                agg.worst[i] = Some(idx);
            }
        }
        agg.volume_flagged += o.volume_flagged as usize;
        for (a, b) in agg.adjoint.iter_mut().zip(o.adjoint.iter()) {
            a.adjoint_consistency = a.adjoint_consistency.max(b.adjoint_consistency);
            a.covariant_lagrangian_imaginary = a.covariant_lagrangian_imaginary.max(b.covariant_lagrangian_imaginary);
            a.covariant_vs_symmetrized = a.covariant_vs_symmetrized.max(b.covariant_vs_symmetrized);
            a.covariant_vs_expanded = a.covariant_vs_expanded.max(b.covariant_vs_expanded);
            a.expanded_vs_symmetrized = a.expanded_vs_symmetrized.max(b.expanded_vs_symmetrized);
        }
    }
    Ok(agg)
}

fn zero_diag() -> AdjointDiagnostic {
    AdjointDiagnostic {
        convention: AdjointSignConvention::AsPrinted,
        adjoint_consistency: 0.0,
        covariant_lagrangian_imaginary: 0.0,
        covariant_vs_symmetrized: 0.0,
        covariant_vs_expanded: 0.0,
        expanded_vs_symmetrized: 0.0,
    }
}

fn gated(kind: CheckKind, name: &str, s: &Scenario) -> bool {
    let e: &Expectations = &s.expect;
    match kind {
        Required => true,
        Informational => false,
        TorsionFree => s.is_torsion_free(),
        Expected => match name {
            "dirac_equation" => e.dirac_equation,
            "connection_equation" => e.connection_equation,
            "vierbein_equation" => e.vierbein_equation,
            "current_conservation" => e.current_conservation,
            _ => false,
        },
    }
}

const IDENTITY_THRESHOLD: f64 = 1e-10;

fn adjoint_note(d: &[AdjointDiagnostic; 2]) -> String {
    let holds = |v: f64| if v <= IDENTITY_THRESHOLD { "holds" } else { "fails" };
    d.iter()
        .map(|x| {
            format!(
                "{}: adjoint consistency {} ({:.3e}), real covariant Lagrangian {} ({:.3e}), equals symmetrized form {} ({:.3e}), equals antisymmetric expanded form {} ({:.3e})",
                x.convention.name(),
                holds(x.adjoint_consistency),
                x.adjoint_consistency,
                holds(x.covariant_lagrangian_imaginary),
                x.covariant_lagrangian_imaginary,
                holds(x.covariant_vs_symmetrized),
                x.covariant_vs_symmetrized,
                holds(x.covariant_vs_expanded),
                x.covariant_vs_expanded,
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Runs every check over the scenario's sample points.
pub fn run_all_checks(s: &Scenario) -> Result<CheckReport, RunError> {
    let points = s.sampling.points();
    run_all_checks_with(s, &points)
}

/// Runs every check over explicit points.
pub fn run_all_checks_with(s: &Scenario, points: &[Point4]) -> Result<CheckReport, RunError> {
    let agg = evaluate_points(s, points, None)?;
    let mut checks = Vec::with_capacity(N);
    for (i, c) in CHECKS.iter().enumerate() {
        let enforced = gated(c.kind, c.name, s);
        let tolerance = if enforced { s.tolerance(c) } else { None };
        let max = agg.maxima[i];
        let status = match tolerance {
            None => Status::Informational,
            Some(t) if max <= t => Status::Pass,
            Some(_) => Status::Fail,
        };
        let note = match c.name {
            "volume_element" => Some(format!(
                "rank-one S-field metric makes equal volume elements unsatisfiable at {} of {} points",
                agg.volume_flagged,
                points.len()
            )),
            "adjoint_sign" => Some(adjoint_note(&agg.adjoint)),
            _ if c.kind == Expected && !enforced => Some("not declared in [expect]; reported only".to_string()),
            _ if c.kind == TorsionFree && !enforced => Some("connection is not the torsion-free one; reported only".to_string()),
            _ => None,
        };
        checks.push(CheckRecord {
            name: c.name.to_string(),
            equation: tag(c.name).to_string(),
            description: c.description.to_string(),
            points: points.len(),
            max_residual: max,
            worst_point: agg.worst[i].map(|k| points[k].0),
            tolerance,
            status,
            note,
        });
    }
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    Ok(CheckReport {
        scenario: s.name.clone(),
        environment: Environment {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: s.sampling.seed,
            sample_mode: match s.sampling.mode {
                SampleMode::Random => "random".into(),
                SampleMode::Grid => "grid".into(),
            },
            points: points.len(),
            fd_nested_step: s.nested_step,
            fd_outer_step: s.outer_step,
            adjoint_sign: s.adjoint.name().to_string(),
        },
        timestamp: None,
        checks,
        passed,
    })
}

pub(crate) fn fd_check_indices(s: &Scenario) -> Vec<usize> {
    CHECKS
        .iter()
        .enumerate()
        .filter(|(_, c)| c.finite_difference && c.kind != Informational && gated(c.kind, c.name, s))
        .map(|(i, _)| i)
        .collect()
}
