//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#![allow(clippy::needless_range_loop)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use bimetric::dirac::{b_divergence, connection_equation_lhs, plane_wave_field, vierbein_equation_lhs, Configuration};
use bimetric::geometry::{
    composite_metric, composite_vierbein, gravity_metric, postulate_residual, sfield_metric, ConnectionField,
    DirectConnection, PointGeometry, Transformed, VierbeinBundle,
};
use bimetric::oracles::{christoffel_from_metric, frw_exponential_metric, metric_oracle, schwarzschild_metric};
use bimetric::scenario::{fitted_order, load_scenario, run_all_checks, CheckReport, Order, Status};
use bimetric::tensor::{lorentz_from_generator, Rank3, ETA_DIAG};
use bimetric::{minkowski_eta, parse_expression, Constants, GammaSet, Matrix4, Point4};
use common::random::{self, rng};
use common::*;
use rand::Rng;

const METRIC_INVERSE_TOL: f64 = 1e-12;
const METRIC_LORENTZ_TOL: f64 = 1e-12;
const RECONSTRUCTION_TOL: f64 = 1e-10;
const ANTISYMMETRY_TOL: f64 = 1e-8;
const POSTULATE_TOL: f64 = 1e-10;
const CHRISTOFFEL_TOL: f64 = 1e-8;
const CURVATURE_ANTISYMMETRY_TOL: f64 = 1e-10;
const SCALAR_ORACLE_TOL: f64 = 1e-8;
const COMMUTATOR_TOL: f64 = 1e-5;
const COMMUTATOR_STEP: f64 = 1e-4;
const MIN_ORDER: f64 = 1.8;
const PLANE_WAVE_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-10;
const DENSITY_FORM_TOL: f64 = 1e-10;
const CURRENT_TOL: f64 = 1e-8;
const SPIN_SOURCE_TOL: f64 = 1e-10;
const SOURCELESS_TOL: f64 = 1e-8;
const VACUUM_TOL: f64 = 1e-8;
const BIANCHI_TOL: f64 = 1e-6;
const BIANCHI_STEP: f64 = 1e-5;
const FUZZ_GRADIENT_TOL: f64 = 1e-5;
const FUZZ_STEP: f64 = 1e-5;
const HESSIAN_SYMMETRY_TOL: f64 = 1e-12;

const METRIC_CONFIGS: usize = 200;
const LORENTZ_SAMPLES: usize = 20;
const FRAMES: usize = 50;
const OFF_SHELL_CONFIGS: usize = 100;
const FUZZ_CORPUS: usize = 1000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, what: &str, value: f64, tol: f64) -> Result<(), String> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(format!("{what}: {value:.3e} exceeds {tol:.1e}"))
    }
}

fn bound(what: &str, value: f64, tol: f64) -> Result<(), String> {
    ensure(value < tol, what, value, tol)
}

fn max3(t: &Rank3) -> f64 {
    t.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

fn rel(a: &Matrix4, b: &Matrix4) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(f64::MIN_POSITIVE)
}

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn clifford() -> Outcome {
    let mut worst = 0.0_f64;
    for (name, g) in [("dirac", GammaSet::dirac()), ("weyl", GammaSet::weyl())] {
        if g.clifford_residual() != 0.0 {
            return Err(format!("{name}: anticommutators off by {:.3e}", g.clifford_residual()));
        }
        for k in 0..4 {
            worst = worst.max(g.upper(k).trace().norm());
            for l in 0..4 {
                let want = if k == l { 4.0 * ETA_DIAG[k] } else { 0.0 };
                worst = worst.max(((*g.upper(k) * *g.upper(l)).trace() - want).norm());
                for m in 0..4 {
                    worst = worst.max((*g.upper(k) * *g.upper(l) * *g.upper(m)).trace().norm());
                }
            }
        }
        // gamma_k gamma_l gamma_m gamma_n is totally antisymmetric for distinct indices
        let reference = *g.lower(0) * *g.lower(1) * *g.lower(2) * *g.lower(3);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let p = [a, b, c, d];
                        if !(0..4).all(|i| p.contains(&i)) {
                            continue;
                        }
                        let inversions = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
                        let prod = *g.lower(a) * *g.lower(b) * *g.lower(c) * *g.lower(d);
                        worst = worst.max(prod.max_abs_diff(&reference.scale_re(sign)));
                    }
                }
            }
        }
    }
    if worst != 0.0 {
        return Err(format!("trace or antisymmetry identity off by {worst:.3e}"));
    }
    Ok("16 anticommutators exact, traces and 24 orderings exact, both representations".into())
}

fn metrics() -> Outcome {
    let mut r = rng(0xA11CE);
    let (mut inv, mut rec, mut lor) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut configs = Vec::with_capacity(METRIC_CONFIGS);
    for _ in 0..METRIC_CONFIGS {
        let (h, s, p) = (random::vierbein(&mut r), random::sfield(&mut r), random::point(&mut r, 1.0));
        let g = composite_metric(&h, &s, &p).map_err(|e| e.to_string())?;
        inv = inv.max((g.upper * g.lower).max_abs_diff(&Matrix4::identity()));
        let hat = gravity_metric(&h, &p).map_err(|e| e.to_string())?;
        inv = inv.max((hat * bimetric::invert4(&hat).map_err(|e| e.to_string())?).max_abs_diff(&Matrix4::identity()));
        let hc = composite_vierbein(&g.upper).map_err(|e| e.to_string())?;
        rec = rec.max(rel(&g.upper, &(hc.transpose() * minkowski_eta() * hc)));
        configs.push((h, s, p));
    }
    for (h, s, p) in configs.iter().take(LORENTZ_SAMPLES) {
        let moved = Transformed { inner: h, lorentz: lorentz_from_generator(&random::generator(&mut r, 0.8)) };
        let e = |x: bimetric::Result<Matrix4>| x.map_err(|e| e.to_string());
        lor = lor.max(rel(&e(gravity_metric(h, p))?, &e(gravity_metric(&moved, p))?));
        let (s0, s1) = (e(sfield_metric(s, h, p))?, e(sfield_metric(s, &moved, p))?);
        lor = lor.max(s0.max_abs_diff(&s1) / s0.max_abs().max(1.0));
        let (c0, c1) = (composite_metric(h, s, p).map_err(|e| e.to_string())?, composite_metric(&moved, s, p).map_err(|e| e.to_string())?);
        lor = lor.max(rel(&c0.upper, &c1.upper));
    }
    bound("inverse identity", inv, METRIC_INVERSE_TOL)?;
    bound("lorentz invariance", lor, METRIC_LORENTZ_TOL)?;
    bound("vierbein reconstruction", rec, RECONSTRUCTION_TOL)?;
    Ok(format!("inverse {inv:.1e}, lorentz {lor:.1e}, reconstruction {rec:.1e}"))
}

fn connections() -> Outcome {
    let mut r = rng(0xC0FFEE);
    let (mut asym, mut post) = (0.0_f64, 0.0_f64);
    for i in 0..FRAMES {
        let (h, frame) = (random::vierbein(&mut r), ConnectionField::Derived(random::frame(&mut r)));
        let other = if i % 2 == 0 { random::direct_connection(&mut r) } else { ConnectionField::LeviCivita };
        let p = random::point(&mut r, 1.0);
        let fg = PointGeometry::new(&h, &frame, &p).map_err(|e| e.to_string())?;
        asym = asym.max(fg.connection.max_asymmetry());
        for geo in [fg, PointGeometry::new(&h, &other, &p).map_err(|e| e.to_string())?] {
            post = post.max(max3(&postulate_residual(&geo.vierbein, &geo.connection.value, &geo.christoffel)));
        }
    }
    let mut chr = 0.0_f64;
    let cases = [
        (frw(), frw_exponential_metric().unwrap(), vec![Point4::new(0.3, -0.2, 0.5, 0.1), Point4::new(-0.7, 0.4, 0.0, 0.9)]),
        (schwarzschild(), schwarzschild_metric(1.0).unwrap(), vec![schwarzschild_point(), Point4::new(1.0, 6.5, 2.0, -1.0)]),
    ];
    for (h, g, points) in cases {
        for p in points {
            let engine = PointGeometry::new(&h, &ConnectionField::LeviCivita, &p).map_err(|e| e.to_string())?.christoffel;
            let oracle = christoffel_from_metric(&g, &p).map_err(|e| e.to_string())?;
            for (a, b) in engine.iter().flatten().flatten().zip(oracle.iter().flatten().flatten()) {
                chr = chr.max((a - b).abs());
            }
        }
    }
    bound("frame connection antisymmetry", asym, ANTISYMMETRY_TOL)?;
    bound("vierbein postulate", post, POSTULATE_TOL)?;
    bound("christoffel vs metric", chr, CHRISTOFFEL_TOL)?;
    Ok(format!("{FRAMES} frames: antisymmetry {asym:.1e}, postulate {post:.1e}; christoffel {chr:.1e}"))
}

fn curvature() -> Outcome {
    let mut r = rng(0xBEEF);
    let mut anti = 0.0_f64;
    for _ in 0..50 {
        let (h, c, p) = (random::vierbein(&mut r), random::direct_connection(&mut r), random::point(&mut r, 1.0));
        let rm = PointGeometry::new(&h, &c, &p).map_err(|e| e.to_string())?.curvature().riemann;
        for k in 0..4 {
            for l in 0..4 {
                for m in 0..4 {
                    for n in 0..4 {
                        anti = anti.max((rm[k][l][m][n] + rm[l][k][m][n]).abs());
                        anti = anti.max((rm[k][l][m][n] + rm[k][l][n][m]).abs());
                    }
                }
            }
        }
    }
    let mut scalar = 0.0_f64;
    let g = frw_exponential_metric().unwrap();
    for p in [Point4::new(0.4, 0.1, -0.3, 0.2), Point4::new(-1.0, 0.0, 0.5, 0.5), Point4::new(1.2, -0.8, 0.3, 0.0)] {
        let engine = PointGeometry::new(&frw(), &ConnectionField::LeviCivita, &p).map_err(|e| e.to_string())?.curvature().scalar;
        let oracle = metric_oracle(&g, &p).map_err(|e| e.to_string())?.scalar;
        scalar = scalar.max((engine - oracle).abs());
    }
    let (mut diff, mut order) = (0.0_f64, f64::INFINITY);
    let gammas = GammaSet::dirac();
    let lc = ConnectionField::LeviCivita;
    let twisted = twisted_connection();
    let mut cases: Vec<(VierbeinBundle, ConnectionField, bimetric::dirac::DiracField, Point4)> = vec![
        (wavy(), twisted.clone(), wavy_spinor(1.0), Point4::new(0.2, 0.1, 0.0, -0.4)),
        (wavy(), lc.clone(), wavy_spinor(1.0), Point4::new(-0.3, 0.5, 0.2, 0.1)),
    ];
    for _ in 0..3 {
        let (h, c, d, p) = (random::vierbein(&mut r), random::direct_connection(&mut r), random::spinor(&mut r, 1.0), random::point(&mut r, 1.0));
        cases.push((h, c, d, p));
    }
    let steps = [2e-3, 1e-3, 5e-4];
    for (h, c, d, p) in &cases {
        let cfg = Configuration::new(h, c, d, &gammas);
        diff = diff.max(cfg.commutator_check(p, COMMUTATOR_STEP).map_err(|e| e.to_string())?.diff);
        let ladder: Vec<f64> = steps.iter().map(|&s| cfg.commutator_check(p, s).map(|c| c.diff)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        if let Order::Observed(q) = fitted_order(&steps, &ladder) {
            order = order.min(q);
        }
    }
    bound("curvature antisymmetry", anti, CURVATURE_ANTISYMMETRY_TOL)?;
    bound("scalar vs metric oracle", scalar, SCALAR_ORACLE_TOL)?;
    bound("commutator", diff, COMMUTATOR_TOL)?;
    ensure(order >= MIN_ORDER, "commutator order", order, MIN_ORDER)?;
    Ok(format!("antisymmetry {anti:.1e}, scalar {scalar:.1e}, commutator {diff:.1e}, order {order:.2}"))
}

fn dirac() -> Outcome {
    let mut r = rng(0xD1AC);
    let flat = VierbeinBundle::identity();
    let zero = ConnectionField::Direct(DirectConnection::zero());
    let (mut wave, mut current) = (0.0_f64, 0.0_f64);
    for g in [GammaSet::dirac(), GammaSet::weyl()] {
        for _ in 0..10 {
            let mass = r.gen_range(0.1..2.0);
            let k3: [f64; 3] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
            let k0 = (mass * mass + k3.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let d = plane_wave_field(&g, [k0, k3[0], k3[1], k3[2]], mass).map_err(|e| e.to_string())?;
            let pt = Configuration::new(&flat, &zero, &d, &g).at(&random::point(&mut r, 1.0)).map_err(|e| e.to_string())?;
            wave = wave.max(pt.residual().max_abs() / pt.scale());
            let c = pt.current().map_err(|e| e.to_string())?;
            current = current.max(c.divergence.abs());
        }
    }
    let (mut ident, mut density) = (0.0_f64, 0.0_f64);
    for i in 0..OFF_SHELL_CONFIGS {
        let g = if i % 2 == 0 { GammaSet::dirac() } else { GammaSet::weyl() };
        let mass = r.gen_range(0.0..2.0);
        let (h, c, d) = (random::vierbein(&mut r), random::direct_connection(&mut r), random::spinor(&mut r, mass));
        let pt = Configuration::new(&h, &c, &d, &g).at(&random::point(&mut r, 1.0)).map_err(|e| e.to_string())?;
        let chk = pt.onshell_check().map_err(|e| e.to_string())?;
        if !chk.bound_holds() {
            return Err(format!("config {i}: 2L exceeds the residual bilinear"));
        }
        ident = ident.max(chk.identity_residual / chk.scale);
        density = density.max(pt.density_form_mismatch().map_err(|e| e.to_string())? / pt.scale());
    }
    bound("plane wave residual", wave, PLANE_WAVE_TOL)?;
    bound("lagrangian identity", ident, IDENTITY_TOL)?;
    bound("density form", density, DENSITY_FORM_TOL)?;
    bound("current divergence", current, CURRENT_TOL)?;
    Ok(format!("plane wave {wave:.1e}, identity {ident:.1e} over {OFF_SHELL_CONFIGS}, density form {density:.1e}, current {current:.1e}"))
}

fn field_equations() -> Outcome {
    let mut r = rng(0xF1E1D);
    let gammas = GammaSet::dirac();
    let mut spin = 0.0_f64;
    for _ in 0..30 {
        let (h, c, d) = (random::vierbein(&mut r), random::direct_connection(&mut r), random::spinor(&mut r, 1.0));
        let pt = Configuration::new(&h, &c, &d, &gammas).at(&random::point(&mut r, 1.0)).map_err(|e| e.to_string())?;
        let res = pt.connection_equation_residual().map_err(|e| e.to_string())?;
        for row in &res {
            for k in 0..4 {
                for l in 0..4 {
                    spin = spin.max((row[k][l] + row[l][k]).abs());
                }
            }
        }
    }
    let lc = ConnectionField::LeviCivita;
    let mut backgrounds: Vec<(VierbeinBundle, Point4)> = vec![
        (wavy(), Point4::new(0.1, 0.2, -0.3, 0.4)),
        (frw(), Point4::new(0.3, 0.1, 0.2, 0.5)),
        (schwarzschild(), schwarzschild_point()),
    ];
    for _ in 0..10 {
        backgrounds.push((random::vierbein(&mut r), random::point(&mut r, 1.0)));
    }
    let (mut sourceless, mut bianchi) = (0.0_f64, 0.0_f64);
    for (i, (h, p)) in backgrounds.iter().enumerate() {
        let geo = PointGeometry::new(h, &lc, p).map_err(|e| e.to_string())?;
        sourceless = sourceless.max(max3(&connection_equation_lhs(&geo)));
        if i < 6 {
            let div = b_divergence(h, &lc, p, BIANCHI_STEP).map_err(|e| e.to_string())?;
            bianchi = bianchi.max(div.iter().fold(0.0, |m, v| m.max(v.abs())));
        }
    }
    // the free vierbein equation is -2h times the Einstein tensor of the metric
    let mut vacuum = 0.0_f64;
    for (h, g, p) in [
        (schwarzschild(), schwarzschild_metric(1.0).unwrap(), schwarzschild_point()),
        (schwarzschild(), schwarzschild_metric(1.0).unwrap(), Point4::new(0.0, 4.0, 0.7, 1.1)),
        (frw(), frw_exponential_metric().unwrap(), Point4::new(0.2, 0.3, -0.1, 0.4)),
    ] {
        let geo = PointGeometry::new(&h, &lc, &p).map_err(|e| e.to_string())?;
        let lhs = vierbein_equation_lhs(&geo, &geo.curvature());
        let oracle = metric_oracle(&g, &p).map_err(|e| e.to_string())?;
        for rho in 0..4 {
            for mu in 0..4 {
                let global: f64 = (0..4).map(|l| geo.h()[l][rho] * lhs[l][mu]).sum();
                vacuum = vacuum.max((global + 2.0 * geo.density * oracle.einstein[rho][mu]).abs());
            }
        }
    }
    bound("spin source antisymmetry", spin, SPIN_SOURCE_TOL)?;
    bound("sourceless connection equation", sourceless, SOURCELESS_TOL)?;
    bound("free vierbein equation", vacuum, VACUUM_TOL)?;
    bound("bianchi", bianchi, BIANCHI_TOL)?;
    Ok(format!("spin source {spin:.1e}, sourceless {sourceless:.1e}, free vierbein {vacuum:.1e}, bianchi {bianchi:.1e}"))
}

fn parser() -> Outcome {
    let mut r = rng(0x5EED);
    let c = Constants::new();
    let (mut grad, mut sym) = (0.0_f64, 0.0_f64);
    for i in 0..FUZZ_CORPUS {
        let text = random::fuzz_expression(&mut r, 4);
        let e = parse_expression(&text, &c).map_err(|e| format!("#{i} `{text}`: {e}"))?;
        let again = parse_expression(&e.to_string(), &c).map_err(|e| format!("#{i} reprint: {e}"))?;
        if again != e || again.to_string() != e.to_string() {
            return Err(format!("#{i} `{text}` does not round-trip"));
        }
        let p = random::point(&mut r, 1.5);
        let jet = e.eval_jet2_raw(&p).map_err(|e| format!("#{i}: {e}"))?;
        let fd = e.fd_gradient(&p, FUZZ_STEP).map_err(|e| format!("#{i}: {e}"))?;
        let scale = jet.grad.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for mu in 0..4 {
            grad = grad.max((jet.grad[mu] - fd[mu]).abs() / scale);
        }
        let hscale = jet.hess.iter().flatten().fold(1.0_f64, |m, v| m.max(v.abs()));
        sym = sym.max(jet.max_asymmetry() / hscale);
    }
    bound("jet gradient vs central differences", grad, FUZZ_GRADIENT_TOL)?;
    ensure(sym <= HESSIAN_SYMMETRY_TOL, "hessian asymmetry", sym, HESSIAN_SYMMETRY_TOL)?;
    Ok(format!("{FUZZ_CORPUS} expressions: gradient {grad:.1e}, hessian asymmetry {sym:.1e}, round trips stable"))
}

fn strip_timestamp(report: &CheckReport) -> String {
    report.to_json().lines().filter(|l| !l.trim_start().starts_with("\"timestamp\"")).collect::<Vec<_>>().join("\n")
}

fn reproducibility() -> Outcome {
    let s = load_scenario(scenario_path("sfield_torsion.toml")).map_err(|e| e.to_string())?;
    std::env::set_var("SFIELD_THREADS", "1");
    let a = run_all_checks(&s).map_err(|e| e.to_string())?.stamped();
    std::env::set_var("SFIELD_THREADS", "3");
    let b = run_all_checks(&s).map_err(|e| e.to_string())?.stamped();
    std::env::remove_var("SFIELD_THREADS");
    if strip_timestamp(&a) != strip_timestamp(&b) {
        return Err("reports differ between runs".into());
    }
    let code = |file: &str| {
        Command::new(env!("CARGO_BIN_EXE_bimetric"))
            .args(["check", scenario_path(file).to_str().unwrap()])
            .output()
            .map(|o| o.status.code())
            .map_err(|e| e.to_string())
    };
    let (pass, fail) = (code("plane_wave.toml")?, code("off_shell.toml")?);
    if pass != Some(0) || fail != Some(1) {
        return Err(format!("exit codes {pass:?} / {fail:?}, expected 0 / 1"));
    }
    Ok("identical reports across thread counts; exit 0 on pass scenario, 1 on fail scenario".into())
}

fn diagnostics() -> Outcome {
    let report = run_all_checks(&load_scenario(scenario_path("sfield_torsion.toml")).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let vol = report.check("volume_element").ok_or("volume_element missing")?;
    if vol.status != Status::Informational || vol.max_residual != 1.0 || !report.passed {
        return Err(format!("rank-one S-field scenario: volume check {:?}, report passed {}", vol.status, report.passed));
    }
    let plain = run_all_checks(&load_scenario(scenario_path("frw.toml")).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if plain.check("volume_element").map(|c| c.max_residual) != Some(0.0) {
        return Err("scenario without S-field was flagged".into());
    }
    let adj = report.check("adjoint_sign").ok_or("adjoint_sign missing")?;
    let note = adj.note.clone().unwrap_or_default();
    if adj.status != Status::Informational || !note.contains("as-printed") || !note.contains("standard") {
        return Err(format!("adjoint note incomplete: {note}"));
    }
    let g = GammaSet::dirac();
    let (h, c, d) = (wavy(), twisted_connection(), wavy_spinor(1.0));
    let pt = Configuration::new(&h, &c, &d, &g).at(&Point4::new(0.2, 0.1, 0.0, -0.4)).map_err(|e| e.to_string())?;
    let [printed, standard] = pt.adjoint_diagnostic().map_err(|e| e.to_string())?;
    let standard_holds = standard.adjoint_consistency < 1e-12 && standard.covariant_lagrangian_imaginary < 1e-12;
    let printed_differs = printed.adjoint_consistency > 1e-6 && printed.covariant_vs_expanded < 1e-12;
    if !(standard_holds && printed_differs) {
        return Err(format!("unexpected adjoint pattern: {printed:?} / {standard:?}"));
    }
    Ok(format!("volume flagged at {} points as informational; {note}", vol.points))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("clifford algebra", clifford),
        ("metrics", metrics),
        ("connections", connections),
        ("curvature", curvature),
        ("dirac", dirac),
        ("field equations", field_equations),
        ("parser and jets", parser),
        ("reproducibility", reproducibility),
        ("diagnostics", diagnostics),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name:<18} {secs:>6.2}s  {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name:<18} {secs:>6.2}s  {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
