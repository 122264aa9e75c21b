use super::{integral_exponent, BinOp, Node, Point4};
use crate::error::{Error, Result};
use crate::scalar::Dual4;

/// Value, gradient `d_mu f` and Hessian `d_mu d_nu f` at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; 4],
    pub hess: [[f64; 4]; 4],
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Jet2 { value, ..Default::default() }
    }

    pub fn coordinate(i: usize, x: f64) -> Self {
        let mut j = Jet2::constant(x);
        j.grad[i] = 1.0;
        j
    }

    /// First-order truncation.
    pub fn dual(&self) -> Dual4 {
        Dual4::new(self.value, self.grad)
    }

    /// `d_mu f` as a first-order jet (its gradient is row `mu` of the Hessian).
    pub fn partial(&self, mu: usize) -> Dual4 {
        Dual4::new(self.grad[mu], self.hess[mu])
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.hess[i][j] - self.hess[j][i]).abs());
            }
        }
        m
    }

    pub fn symmetrize(&mut self) {
        for i in 0..4 {
            for j in i + 1..4 {
                let s = 0.5 * (self.hess[i][j] + self.hess[j][i]);
                self.hess[i][j] = s;
                self.hess[j][i] = s;
            }
        }
    }

    fn neg(&self) -> Jet2 {
        Jet2 {
            value: -self.value,
            grad: self.grad.map(|g| -g),
            hess: self.hess.map(|r| r.map(|h| -h)),
        }
    }

    fn add(&self, o: &Jet2, sign: f64) -> Jet2 {
        let mut out = *self;
        out.value += sign * o.value;
        for i in 0..4 {
            out.grad[i] += sign * o.grad[i];
            for j in 0..4 {
                out.hess[i][j] += sign * o.hess[i][j];
            }
        }
        out
    }

    fn mul(&self, o: &Jet2) -> Jet2 {
        let mut out = Jet2::constant(self.value * o.value);
        for i in 0..4 {
            out.grad[i] = self.grad[i] * o.value + self.value * o.grad[i];
            for j in 0..4 {
                out.hess[i][j] = self.hess[i][j] * o.value
                    + self.value * o.hess[i][j]
                    + self.grad[i] * o.grad[j]
                    + o.grad[i] * self.grad[j];
            }
        }
        out
    }

    /// `f(self)` given `f`, `f'`, `f''` at `self.value`.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet2 {
        let mut out = Jet2::constant(f0);
        for i in 0..4 {
            out.grad[i] = f1 * self.grad[i];
            for j in 0..4 {
                out.hess[i][j] = f2 * self.grad[i] * self.grad[j] + f1 * self.hess[i][j];
            }
        }
        out
    }

    fn recip(&self) -> Result<Jet2> {
        if self.value == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        let r = 1.0 / self.value;
        Ok(self.chain(r, -r * r, 2.0 * r * r * r))
    }

    fn checked(self) -> Result<Jet2> {
        let finite = self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().flatten().all(|h| h.is_finite());
        if finite {
            Ok(self)
        } else {
            Err(Error::Domain("non-finite derivative".into()))
        }
    }
}

pub(super) fn eval(node: &Node, p: &Point4) -> Result<Jet2> {
    let j = match node {
        Node::Num(v) => Jet2::constant(*v),
        Node::Coord(i) => Jet2::coordinate(*i, p.0[*i]),
        Node::Const { value, .. } => Jet2::constant(*value),
        Node::Neg(a) => eval(a, p)?.neg(),
        Node::Binary { op, lhs, rhs } => {
            let a = eval(lhs, p)?;
            match op {
                BinOp::Add => a.add(&eval(rhs, p)?, 1.0),
                BinOp::Sub => a.add(&eval(rhs, p)?, -1.0),
                BinOp::Mul => a.mul(&eval(rhs, p)?),
                BinOp::Div => a.mul(&eval(rhs, p)?.recip()?),
                BinOp::Pow => pow(&a, rhs, p)?,
            }
        }
        Node::Call { func, arg } => {
            let a = eval(arg, p)?;
            let (f0, f1, f2) = func.derivatives(a.value)?;
            a.chain(f0, f1, f2)
        }
    };
    j.checked()
}

fn pow(base: &Jet2, exponent: &Node, p: &Point4) -> Result<Jet2> {
    if exponent.is_constant() {
        let c = exponent.eval(p)?;
        if c == 0.0 {
            return Ok(Jet2::constant(1.0));
        }
        if c == 1.0 {
            return Ok(*base);
        }
        let u = base.value;
        if let Some(n) = integral_exponent(c) {
            if u == 0.0 && n < 0 {
                return Err(Error::Domain("zero raised to a negative power".into()));
            }
            let nf = n as f64;
            return Ok(base.chain(u.powi(n), nf * u.powi(n - 1), nf * (nf - 1.0) * u.powi(n - 2)));
        }
        if u <= 0.0 {
            return Err(Error::Domain(format!("power with base {u} and non-integer exponent")));
        }
        return Ok(base.chain(u.powf(c), c * u.powf(c - 1.0), c * (c - 1.0) * u.powf(c - 2.0)));
    }
    // u^v = exp(v ln u)
    if base.value <= 0.0 {
        return Err(Error::Domain(format!("power with base {} and variable exponent", base.value)));
    }
    let u = base.value;
    let ln_u = base.chain(u.ln(), 1.0 / u, -1.0 / (u * u));
    let prod = eval(exponent, p)?.mul(&ln_u);
    let e = prod.value.exp();
    Ok(prod.chain(e, e, e))
}
