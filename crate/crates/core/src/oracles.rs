//! Naive reference implementations for cross-checking the main path.
//!
//! Everything here is written from textbook formulas over raw arrays and
//! uses only the expression evaluator; nothing is shared with the geometry,
//! tensor or gamma modules.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{Expression, Point4};

pub type Raw4 = [[f64; 4]; 4];
pub type Raw3 = [[[f64; 4]; 4]; 4];
pub type Raw44 = [[[[f64; 4]; 4]; 4]; 4];

/// Index pairs of the 10 independent metric components, in input order.
pub const METRIC_PAIRS: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

fn minor3(m: &Raw4, row: usize, col: usize) -> f64 {
    let mut s = [[0.0; 3]; 3];
    let mut r = 0;
    for i in 0..4 {
        if i == row {
            continue;
        }
        let mut c = 0;
        for j in 0..4 {
            if j == col {
                continue;
            }
            s[r][c] = m[i][j];
            c += 1;
        }
        r += 1;
    }
    s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1]) - s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0])
        + s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0])
}

/// Laplace expansion along the first row.
pub fn cofactor_det(m: &Raw4) -> f64 {
    (0..4).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * m[0][j] * minor3(m, 0, j)).sum()
}

/// Adjugate over determinant.
pub fn naive_inverse(m: &Raw4) -> Result<Raw4> {
    let det = cofactor_det(m);
    let scale = m.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()));
    if det.abs() <= 1e-12 * scale.powi(4) || !det.is_finite() {
        return Err(Error::Degenerate { det, threshold: 1e-12 * scale.powi(4) });
    }
    let mut inv = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            inv[j][i] = sign * minor3(m, i, j) / det;
        }
    }
    Ok(inv)
}

/// Christoffel symbols, curvature and contractions of a metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricOracleResult {
    /// `Gamma^nu_{rho mu}` stored `[nu][rho][mu]`
    pub christoffel: Raw3,
    /// `R^rho_{sigma mu nu}`
    pub riemann: Raw44,
    /// `R_{sigma nu} = R^rho_{sigma rho nu}`
    pub ricci: Raw4,
    pub scalar: f64,
    /// `G^mu_nu = g^{mu a} R_{a nu} - 1/2 delta R`
    pub einstein: Raw4,
}

/// Values, first and second derivatives of the lower metric; `dg[a][b][c] = d_c g_ab`.
fn metric_values(g: &[Expression; 10], p: &Point4) -> Result<(Raw4, Raw3, Raw44)> {
    let mut val = [[0.0; 4]; 4];
    let mut der = [[[0.0; 4]; 4]; 4];
    let mut hess = [[[[0.0; 4]; 4]; 4]; 4];
    for (e, &(a, b)) in g.iter().zip(METRIC_PAIRS.iter()) {
        let j = e.eval_jet2(p)?;
        for (x, y) in [(a, b), (b, a)] {
            val[x][y] = j.value;
            der[x][y] = j.grad;
            hess[x][y] = j.hess;
        }
    }
    Ok((val, der, hess))
}

fn christoffel_from_parts(g: &Raw4, dg: &Raw3) -> Result<Raw3> {
    let gi = naive_inverse(g)?;
    let mut out = [[[0.0; 4]; 4]; 4];
    for nu in 0..4 {
        for rho in 0..4 {
            for mu in 0..4 {
                let mut s = 0.0;
                for l in 0..4 {
                    s += gi[nu][l] * (dg[l][rho][mu] + dg[l][mu][rho] - dg[rho][mu][l]);
                }
                out[nu][rho][mu] = 0.5 * s;
            }
        }
    }
    Ok(out)
}

/// `Gamma^nu_{rho mu} = 1/2 g^{nu l} (d_mu g_{l rho} + d_rho g_{l mu} - d_l g_{rho mu})`
/// from the 10 lower metric components, with jet derivatives.
pub fn christoffel_from_metric(g: &[Expression; 10], p: &Point4) -> Result<Raw3> {
    let (val, der, _) = metric_values(g, p)?;
    christoffel_from_parts(&val, &der)
}

/// Same formula with metric derivatives from central differences of
/// an arbitrary lower-metric function.
pub fn christoffel_fd(g: &dyn Fn(&Point4) -> Result<Raw4>, p: &Point4, step: f64) -> Result<Raw3> {
    let val = g(p)?;
    let mut der = [[[0.0; 4]; 4]; 4];
    for c in 0..4 {
        let mut xp = *p;
        let mut xm = *p;
        xp.0[c] += step;
        xm.0[c] -= step;
        let (gp, gm) = (g(&xp)?, g(&xm)?);
        for a in 0..4 {
            for b in 0..4 {
                der[a][b][c] = (gp[a][b] - gm[a][b]) / (xp.0[c] - xm.0[c]);
            }
        }
    }
    christoffel_from_parts(&val, &der)
}

/// Christoffels, Riemann, Ricci, scalar and Einstein tensor, all from
/// exact first and second metric derivatives.
pub fn metric_oracle(g: &[Expression; 10], p: &Point4) -> Result<MetricOracleResult> {
    let (val, dg, ddg) = metric_values(g, p)?;
    let gi = naive_inverse(&val)?;
    let gam = christoffel_from_parts(&val, &dg)?;
    // d_c g^{al} = -g^{am} d_c g_mn g^{nl}
    let mut dgi = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for l in 0..4 {
            for c in 0..4 {
                let mut v = 0.0;
                for m in 0..4 {
                    for n in 0..4 {
                        v -= gi[a][m] * dg[m][n][c] * gi[n][l];
                    }
                }
                dgi[a][l][c] = v;
            }
        }
    }
    // dgam[a][b][d][c] = d_c Gamma^a_{bd}
    let mut dgam = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for d in 0..4 {
                for c in 0..4 {
                    let mut v = 0.0;
                    for l in 0..4 {
                        v += dgi[a][l][c] * (dg[l][b][d] + dg[l][d][b] - dg[b][d][l]);
                        v += gi[a][l] * (ddg[l][b][d][c] + ddg[l][d][b][c] - ddg[b][d][l][c]);
                    }
                    dgam[a][b][d][c] = 0.5 * v;
                }
            }
        }
    }
    let mut riemann = [[[[0.0; 4]; 4]; 4]; 4];
    for r in 0..4 {
        for s in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    let mut v = dgam[r][n][s][m] - dgam[r][m][s][n];
                    for l in 0..4 {
                        v += gam[r][m][l] * gam[l][n][s] - gam[r][n][l] * gam[l][m][s];
                    }
                    riemann[r][s][m][n] = v;
                }
            }
        }
    }
    let mut ricci = [[0.0; 4]; 4];
    for s in 0..4 {
        for n in 0..4 {
            ricci[s][n] = (0..4).map(|r| riemann[r][s][r][n]).sum();
        }
    }
    let mut scalar = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            scalar += gi[a][b] * ricci[a][b];
        }
    }
    let mut einstein = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            einstein[mu][nu] = (0..4).map(|a| gi[mu][a] * ricci[a][nu]).sum::<f64>()
                - if mu == nu { 0.5 * scalar } else { 0.0 };
        }
    }
    Ok(MetricOracleResult { christoffel: gam, riemann, ricci, scalar, einstein })
}

/// Lower metric `g_{mu nu}` of a vierbein `h_k^mu` given as expressions:
/// the naive inverse of `sum_k eta_kk h_k^mu h_k^nu`.
pub fn lower_metric_from_vierbein(h: &[[Expression; 4]; 4], p: &Point4) -> Result<Raw4> {
    let eta = [1.0, -1.0, -1.0, -1.0];
    let mut hv = [[0.0; 4]; 4];
    for k in 0..4 {
        for mu in 0..4 {
            hv[k][mu] = h[k][mu].eval(p)?;
        }
    }
    let mut upper = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            upper[mu][nu] = (0..4).map(|k| eta[k] * hv[k][mu] * hv[k][nu]).sum();
        }
    }
    naive_inverse(&upper)
}

/// Closed-form Christoffels of `dx0^2 - e^{2 x0} dx_i^2`.
pub fn frw_exponential_christoffel(x0: f64) -> Raw3 {
    let mut c = [[[0.0; 4]; 4]; 4];
    let a2 = (2.0 * x0).exp();
    for i in 1..4 {
        c[0][i][i] = a2;
        c[i][0][i] = 1.0;
        c[i][i][0] = 1.0;
    }
    c
}

/// Closed-form Christoffels of the Schwarzschild metric in `(t, r, theta, phi)`.
pub fn schwarzschild_christoffel(r: f64, theta: f64, m: f64) -> Raw3 {
    let mut c = [[[0.0; 4]; 4]; 4];
    let f = r - 2.0 * m;
    let (s, co) = theta.sin_cos();
    let mut sym = |a: usize, b: usize, d: usize, v: f64| {
        c[a][b][d] = v;
        c[a][d][b] = v;
    };
    sym(0, 0, 1, m / (r * f));
    sym(1, 0, 0, m * f / r.powi(3));
    sym(1, 1, 1, -m / (r * f));
    sym(1, 2, 2, -f);
    sym(1, 3, 3, -f * s * s);
    sym(2, 1, 2, 1.0 / r);
    sym(2, 3, 3, -s * co);
    sym(3, 1, 3, 1.0 / r);
    sym(3, 2, 3, co / s);
    c
}

/// Lower components of the Schwarzschild metric, in [`METRIC_PAIRS`] order.
pub fn schwarzschild_metric(m: f64) -> Result<[Expression; 10]> {
    let c = crate::expr::Constants::from([("M".to_string(), m)]);
    let mut out: [Expression; 10] = Default::default();
    out[0] = crate::expr::parse_expression("1 - 2*M/x1", &c)?;
    out[4] = crate::expr::parse_expression("-1/(1 - 2*M/x1)", &c)?;
    out[7] = crate::expr::parse_expression("-x1^2", &c)?;
    out[9] = crate::expr::parse_expression("-x1^2*sin(x2)^2", &c)?;
    Ok(out)
}

/// Lower components of `dx0^2 - e^{2 x0} dx_i^2`.
pub fn frw_exponential_metric() -> Result<[Expression; 10]> {
    let c = crate::expr::Constants::new();
    let mut out: [Expression; 10] = Default::default();
    out[0] = crate::expr::parse_expression("1", &c)?;
    for i in [4, 7, 9] {
        out[i] = crate::expr::parse_expression("-exp(2*x0)", &c)?;
    }
    Ok(out)
}

/// `psibar M_1 M_2 ... M_n psi` by explicit index sums, applying the
/// rightmost matrix first.
pub fn gamma_product_expand(matrices: &[[[Complex64; 4]; 4]], psi: &[Complex64; 4], psibar: &[Complex64; 4]) -> Complex64 {
    let mut v = *psi;
    for m in matrices.iter().rev() {
        let mut w = [Complex64::new(0.0, 0.0); 4];
        for i in 0..4 {
            for j in 0..4 {
                w[i] += m[i][j] * v[j];
            }
        }
        v = w;
    }
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        s += psibar[i] * v[i];
    }
    s
}
