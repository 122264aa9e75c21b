#![allow(dead_code)]

use bimetric::dirac::DiracField;
use bimetric::geometry::{ConnectionField, DirectConnection, VierbeinBundle};
use bimetric::{parse_expression, ComplexExpression, Constants, Point4};

pub fn consts() -> Constants {
    Constants::new()
}

pub fn bundle(rows: [[&str; 4]; 4]) -> VierbeinBundle {
    VierbeinBundle::parse(&rows, &consts()).unwrap()
}

/// A smooth, non-diagonal vierbein close to the identity.
pub fn wavy() -> VierbeinBundle {
    bundle([
        ["1 + 0.1*sin(x1)", "0.05*x2", "0", "0.02*x3"],
        ["0.03*cos(x0)", "exp(-0.2*x0)", "0.01*x1*x2", "0"],
        ["0", "0.02*sin(x3)", "1 + 0.1*x1^2", "0"],
        ["0.01*x0", "0", "0.03*x2", "1/(1 + 0.1*x0^2)"],
    ])
}

/// FRW with scale factor `exp(x0)`.
pub fn frw() -> VierbeinBundle {
    bundle([
        ["1", "0", "0", "0"],
        ["0", "exp(-x0)", "0", "0"],
        ["0", "0", "exp(-x0)", "0"],
        ["0", "0", "0", "exp(-x0)"],
    ])
}

/// Schwarzschild with mass parameter 1 in (t, r, theta, phi).
pub fn schwarzschild() -> VierbeinBundle {
    bundle([
        ["1/sqrt(1 - 2/x1)", "0", "0", "0"],
        ["0", "sqrt(1 - 2/x1)", "0", "0"],
        ["0", "0", "1/x1", "0"],
        ["0", "0", "0", "1/(x1*sin(x2))"],
    ])
}

pub fn schwarzschild_point() -> Point4 {
    Point4::new(0.3, 10.0, 1.0, 0.4)
}

/// A torsionful connection given directly, smooth in all coordinates.
pub fn twisted_connection() -> ConnectionField {
    let c = consts();
    let e = |s: &str| parse_expression(s, &c).unwrap();
    let comps = [
        ((0, 1), [e("0.1*x1"), e("0.2"), e("0.05*sin(x2)"), e("0")]),
        ((0, 2), [e("0"), e("0.03*x0*x3"), e("0.1"), e("0.02*x1")]),
        ((1, 2), [e("0.3*cos(x0)"), e("0"), e("0.04*x3"), e("0.1*x2")]),
        ((1, 3), [e("0.02"), e("0.1*x0"), e("0"), e("0.05*exp(-x1^2)")]),
        ((2, 3), [e("0.07*x2*x1"), e("0"), e("0.02*x3"), e("0.01")]),
    ];
    ConnectionField::Direct(DirectConnection::from_components(&comps).unwrap())
}

/// An off-shell spinor with varying phase and amplitude.
pub fn wavy_spinor(mass: f64) -> DiracField {
    let c = consts();
    let psi = [
        ("0.5*cos(x0 + 0.3*x1)", "0.5*sin(x0 + 0.3*x1)"),
        ("0.2 + 0.1*x2", "-0.3*x3"),
        ("0.4*exp(-0.1*x1^2)", "0.1*cos(x2)"),
        ("-0.1*x0", "0.3 + 0.05*sin(x3)"),
    ]
    .map(|(r, i)| ComplexExpression::parse(r, i, &c).unwrap());
    DiracField::new(psi, mass).unwrap()
}

pub fn sample_points() -> Vec<Point4> {
    vec![
        Point4::new(0.1, 0.2, -0.3, 0.4),
        Point4::new(-0.5, 0.7, 0.1, -0.2),
        Point4::new(0.9, -0.4, 0.6, 0.3),
    ]
}

pub mod random {
    //! Seeded generators of smooth random configurations.

    use bimetric::dirac::DiracField;
    use bimetric::geometry::{ConnectionField, DirectConnection, FrameField, SFieldConfig, VierbeinBundle, PAIRS};
    use bimetric::tensor::Matrix4;
    use bimetric::{parse_expression, ComplexExpression, Expression, Point4};
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::SplitMix64;

    use super::consts;

    pub type Gen = SplitMix64;

    pub fn rng(seed: u64) -> Gen {
        SplitMix64::seed_from_u64(seed)
    }

    fn num(r: &mut Gen, lo: f64, hi: f64) -> String {
        format!("{:.4}", r.gen_range(lo..hi))
    }

    fn coord(r: &mut Gen) -> String {
        format!("x{}", r.gen_range(0..4))
    }

    /// `a*sin(b*xi + c)`, `a*xi*xj` or `a*exp(-b*xi^2)`.
    pub fn smooth_term(r: &mut Gen, amp: f64) -> String {
        let a = num(r, -amp, amp);
        match r.gen_range(0..3) {
            0 => format!("({a})*sin({}*{} + {})", num(r, 0.2, 1.5), coord(r), num(r, -1.0, 1.0)),
            1 => format!("({a})*{}*{}", coord(r), coord(r)),
            _ => format!("({a})*exp(-{}*{}^2)", num(r, 0.1, 1.0), coord(r)),
        }
    }

    fn expr(s: &str) -> Expression {
        parse_expression(s, &consts()).unwrap_or_else(|e| panic!("`{s}`: {e}"))
    }

    /// A random expression string that is smooth and finite on `[-1.5, 1.5]^4`.
    pub fn fuzz_expression(r: &mut Gen, depth: u32) -> String {
        if depth == 0 || r.gen_bool(0.25) {
            return if r.gen_bool(0.5) {
                coord(r)
            } else {
                let v = r.gen_range(-2.0..2.0_f64);
                if v < 0.0 {
                    format!("({v:.3})")
                } else {
                    format!("{v:.3}")
                }
            };
        }
        let mut sub = || fuzz_expression(r, depth - 1);
        let (a, b) = (sub(), sub());
        match r.gen_range(0..15) {
            0 => format!("{a} + {b}"),
            1 => format!("{a} - ({b})"),
            2 => format!("({a})*({b})"),
            3 => format!("({a})/(2 + sin({b}))"),
            4 => format!("sin({a})"),
            5 => format!("cos({a})"),
            6 => format!("tanh({a})"),
            7 => format!("exp(0.5*tanh({a}))"),
            8 => format!("log(2 + cos({a}))"),
            9 => format!("sqrt(1.5 + sin({a}))"),
            10 => format!("sin({a})^2"),
            11 => format!("(1.2 + cos({a}))^0.7"),
            12 => format!("tan(0.5*tanh({a}))"),
            13 => format!("sinh(tanh({a}))"),
            _ => format!("-cosh(0.5*sin({a}))*({b})"),
        }
    }

    pub fn point(r: &mut Gen, half_width: f64) -> Point4 {
        Point4(std::array::from_fn(|_| r.gen_range(-half_width..half_width)))
    }

    /// Diagonal `(1 +- 0.2)` plus small smooth perturbations everywhere.
    pub fn vierbein(r: &mut Gen) -> VierbeinBundle {
        let rows: [[String; 4]; 4] = std::array::from_fn(|k| {
            std::array::from_fn(|mu| {
                let base = if k == mu { num(r, 0.8, 1.2) } else { "0".into() };
                format!("{base} + {}", smooth_term(r, 0.08))
            })
        });
        VierbeinBundle::new(rows.map(|row| row.map(|s| expr(&s))))
    }

    pub fn sfield(r: &mut Gen) -> SFieldConfig {
        let phi = format!("{}*{} + {}", num(r, -0.8, 0.8), coord(r), smooth_term(r, 0.5));
        SFieldConfig::new(expr(&phi), r.gen_range(0.0..0.5)).unwrap()
    }

    pub fn direct_connection(r: &mut Gen) -> ConnectionField {
        let pairs: [[Expression; 4]; 6] =
            std::array::from_fn(|_| std::array::from_fn(|_| expr(&format!("{} + {}", num(r, -0.2, 0.2), smooth_term(r, 0.2)))));
        ConnectionField::Direct(DirectConnection::new(pairs))
    }

    pub fn spinor(r: &mut Gen, mass: f64) -> DiracField {
        let psi: [ComplexExpression; 4] = std::array::from_fn(|_| {
            let re = format!("{} + {}", num(r, -0.6, 0.6), smooth_term(r, 0.4));
            let im = format!("{} + {}", num(r, -0.6, 0.6), smooth_term(r, 0.4));
            ComplexExpression::new(expr(&re), expr(&im))
        });
        DiracField::new(psi, mass).unwrap()
    }

    /// Antisymmetric generator with entries in `[-size, size]`.
    pub fn generator(r: &mut Gen, size: f64) -> Matrix4 {
        let mut w = Matrix4::zeros();
        for &(k, l) in PAIRS.iter() {
            let x = r.gen_range(-size..size);
            w[k][l] = x;
            w[l][k] = -x;
        }
        w
    }

    type SymMatrix = [[Option<String>; 4]; 4];

    fn sym_identity() -> SymMatrix {
        std::array::from_fn(|i| std::array::from_fn(|j| (i == j).then(|| "1".to_string())))
    }

    fn sym_mul(a: &SymMatrix, b: &SymMatrix) -> SymMatrix {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let terms: Vec<String> = (0..4)
                    .filter_map(|m| match (&a[i][m], &b[m][j]) {
                        (Some(x), Some(y)) => Some(format!("({x})*({y})")),
                        _ => None,
                    })
                    .collect();
                (!terms.is_empty()).then(|| terms.join(" + "))
            })
        })
    }

    fn sym_boost(axis: usize, rapidity: &str) -> SymMatrix {
        let mut m = sym_identity();
        m[0][0] = Some(format!("cosh({rapidity})"));
        m[axis][axis] = Some(format!("cosh({rapidity})"));
        m[0][axis] = Some(format!("sinh({rapidity})"));
        m[axis][0] = Some(format!("sinh({rapidity})"));
        m
    }

    fn sym_rotation(i: usize, j: usize, angle: &str) -> SymMatrix {
        let mut m = sym_identity();
        m[i][i] = Some(format!("cos({angle})"));
        m[j][j] = Some(format!("cos({angle})"));
        m[i][j] = Some(format!("-sin({angle})"));
        m[j][i] = Some(format!("sin({angle})"));
        m
    }

    /// A position-dependent Lorentz frame: boost, rotation, boost with
    /// smooth random parameters.
    pub fn frame(r: &mut Gen) -> FrameField {
        let b1 = sym_boost(r.gen_range(1..4), &smooth_term(r, 0.5));
        let (i, j) = [(1, 2), (1, 3), (2, 3)][r.gen_range(0..3)];
        let rot = sym_rotation(i, j, &format!("{} + {}", num(r, -1.0, 1.0), smooth_term(r, 0.8)));
        let b2 = sym_boost(r.gen_range(1..4), &smooth_term(r, 0.5));
        let m = sym_mul(&sym_mul(&b1, &rot), &b2);
        FrameField::new(m.map(|row| row.map(|e| expr(e.as_deref().unwrap_or("0")))))
    }
}
