//! Analytic scalar fields of the coordinates `x0..x3`.
//!
//! Every field in a configuration (vierbein entries, frame fields, the
//! S-field potential, spinor components) is an [`Expression`] parsed from
//! text. Expressions evaluate to plain values ([`Expression::eval`]) or to
//! second-order jets ([`Expression::eval_jet2`]).

mod jet;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub use jet::Jet2;

/// A spacetime point `(x0, x1, x2, x3)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point4(pub [f64; 4]);

impl Point4 {
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Point4([x0, x1, x2, x3])
    }

    pub const fn origin() -> Self {
        Point4([0.0; 4])
    }

    /// `self + step * e_axis`.
    pub fn shifted(&self, axis: usize, step: f64) -> Self {
        let mut p = *self;
        p.0[axis] += step;
        p
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Value, first and second derivative at `x`.
    fn derivatives(self, x: f64) -> Result<(f64, f64, f64)> {
        let out = match self {
            Func::Sin => (x.sin(), x.cos(), -x.sin()),
            Func::Cos => (x.cos(), -x.sin(), -x.cos()),
            Func::Tan => {
                let t = x.tan();
                let s = 1.0 + t * t;
                (t, s, 2.0 * t * s)
            }
            Func::Exp => {
                let e = x.exp();
                (e, e, e)
            }
            Func::Log => {
                if x <= 0.0 {
                    return Err(Error::Domain(format!("log of non-positive argument {x}")));
                }
                (x.ln(), 1.0 / x, -1.0 / (x * x))
            }
            Func::Sqrt => {
                if x <= 0.0 {
                    return Err(Error::Domain(format!("sqrt derivative at non-positive argument {x}")));
                }
                let s = x.sqrt();
                (s, 0.5 / s, -0.25 / (s * x))
            }
            Func::Sinh => (x.sinh(), x.cosh(), x.sinh()),
            Func::Cosh => (x.cosh(), x.sinh(), x.cosh()),
            Func::Tanh => {
                let t = x.tanh();
                let s = 1.0 - t * t;
                (t, s, -2.0 * t * s)
            }
        };
        Ok(out)
    }

    fn value(self, x: f64) -> Result<f64> {
        match self {
            Func::Log if x <= 0.0 => Err(Error::Domain(format!("log of non-positive argument {x}"))),
            Func::Sqrt if x < 0.0 => Err(Error::Domain(format!("sqrt of negative argument {x}"))),
            Func::Sqrt => Ok(x.sqrt()),
            _ => self.derivatives(x).map(|d| d.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

/// Expression tree node.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(f64),
    Coord(usize),
    /// A named constant bound when the expression was parsed.
    Const { name: String, value: f64 },
    Neg(Box<Node>),
    Binary { op: BinOp, lhs: Box<Node>, rhs: Box<Node> },
    Call { func: Func, arg: Box<Node> },
}

const PREC_NEG: u8 = 3;
const PREC_ATOM: u8 = 5;

impl Node {
    fn precedence(&self) -> u8 {
        match self {
            Node::Num(_) | Node::Coord(_) | Node::Const { .. } | Node::Call { .. } => PREC_ATOM,
            Node::Neg(_) => PREC_NEG,
            Node::Binary { op, .. } => op.precedence(),
        }
    }

    /// True when the subtree does not depend on any coordinate.
    pub fn is_constant(&self) -> bool {
        match self {
            Node::Num(_) | Node::Const { .. } => true,
            Node::Coord(_) => false,
            Node::Neg(a) | Node::Call { arg: a, .. } => a.is_constant(),
            Node::Binary { lhs, rhs, .. } => lhs.is_constant() && rhs.is_constant(),
        }
    }

    fn eval(&self, p: &Point4) -> Result<f64> {
        let v = match self {
            Node::Num(v) => *v,
            Node::Coord(i) => p.0[*i],
            Node::Const { value, .. } => *value,
            Node::Neg(a) => -a.eval(p)?,
            Node::Binary { op, lhs, rhs } => {
                let a = lhs.eval(p)?;
                let b = rhs.eval(p)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(Error::Domain("division by zero".into()));
                        }
                        a / b
                    }
                    BinOp::Pow => pow_value(a, b, rhs.is_constant())?,
                }
            }
            Node::Call { func, arg } => func.value(arg.eval(p)?)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("non-finite intermediate value in `{self}`")))
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn integral_exponent(b: f64) -> Option<i32> {
    (b.fract() == 0.0 && b.abs() <= i32::MAX as f64).then_some(b as i32)
}

fn pow_value(a: f64, b: f64, constant_exponent: bool) -> Result<f64> {
    if constant_exponent {
        if let Some(n) = integral_exponent(b) {
            if a == 0.0 && n < 0 {
                return Err(Error::Domain("zero raised to a negative power".into()));
            }
            return Ok(a.powi(n));
        }
    }
    if a < 0.0 || (a == 0.0 && !constant_exponent) {
        return Err(Error::Domain(format!("power with base {a} and non-integer exponent")));
    }
    Ok(a.powf(b))
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(v) => {
                if *v < 0.0 {
                    write!(f, "({v})")
                } else {
                    write!(f, "{v}")
                }
            }
            Node::Coord(i) => write!(f, "x{i}"),
            Node::Const { name, .. } => f.write_str(name),
            Node::Neg(a) => {
                f.write_str("-")?;
                a.fmt_child(f, a.precedence() < PREC_NEG)
            }
            Node::Binary { op: BinOp::Pow, lhs, rhs } => {
                lhs.fmt_child(f, lhs.precedence() < PREC_ATOM)?;
                f.write_str("^")?;
                rhs.fmt_child(f, rhs.precedence() < PREC_NEG)
            }
            Node::Binary { op, lhs, rhs } => {
                let prec = op.precedence();
                lhs.fmt_child(f, lhs.precedence() < prec)?;
                write!(f, " {} ", op.symbol())?;
                rhs.fmt_child(f, rhs.precedence() <= prec)
            }
            Node::Call { func, arg } => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// A parsed scalar function of the four coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    root: Node,
}

impl Default for Expression {
    fn default() -> Self {
        Expression::zero()
    }
}

impl Expression {
    pub fn from_node(root: Node) -> Self {
        Expression { root }
    }

    pub fn constant(v: f64) -> Self {
        if v < 0.0 {
            Expression { root: Node::Neg(Box::new(Node::Num(-v))) }
        } else {
            Expression { root: Node::Num(v) }
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn coordinate(i: usize) -> Self {
        assert!(i < 4, "coordinate index out of range");
        Expression { root: Node::Coord(i) }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn is_constant(&self) -> bool {
        self.root.is_constant()
    }

    /// IEEE evaluation at `p`.
    pub fn eval(&self, p: &Point4) -> Result<f64> {
        self.root.eval(p)
    }

    /// Value, gradient and Hessian at `p` by forward-mode jet arithmetic.
    pub fn eval_jet2(&self, p: &Point4) -> Result<Jet2> {
        let mut j = self.eval_jet2_raw(p)?;
        j.symmetrize();
        Ok(j)
    }

    /// Jet evaluation without the final Hessian symmetrization step.
    pub fn eval_jet2_raw(&self, p: &Point4) -> Result<Jet2> {
        jet::eval(&self.root, p)
    }

    /// Central-difference gradient `(e(p + s e_mu) - e(p - s e_mu)) / 2s`.
    pub fn fd_gradient(&self, p: &Point4, step: f64) -> Result<[f64; 4]> {
        fd_gradient(self, p, step)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

/// Named constants available to the parser.
pub type Constants = BTreeMap<String, f64>;

/// Parses `text` against the expression grammar. Identifiers other than
/// `x0..x3`, the function names and the keys of `constants` are rejected.
/// `pi` is bound unless `constants` overrides it.
pub fn parse_expression(text: &str, constants: &Constants) -> Result<Expression> {
    parse::Parser::new(text, constants).parse().map(Expression::from_node)
}

pub fn eval(e: &Expression, p: &Point4) -> Result<f64> {
    e.eval(p)
}

pub fn eval_jet2(e: &Expression, p: &Point4) -> Result<Jet2> {
    e.eval_jet2(p)
}

pub fn fd_gradient(e: &Expression, p: &Point4, step: f64) -> Result<[f64; 4]> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {step}")));
    }
    let mut g = [0.0; 4];
    for (mu, gm) in g.iter_mut().enumerate() {
        let (xp, xm) = (p.shifted(mu, step), p.shifted(mu, -step));
        // divide by the step actually taken between representable points
        *gm = (e.eval(&xp)? - e.eval(&xm)?) / (xp.0[mu] - xm.0[mu]);
    }
    Ok(g)
}

/// A complex-valued field `re + i im`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexExpression {
    pub re: Expression,
    pub im: Expression,
}

impl ComplexExpression {
    pub fn new(re: Expression, im: Expression) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Expression::zero(), Expression::zero())
    }

    pub fn parse(re: &str, im: &str, constants: &Constants) -> Result<Self> {
        Ok(Self::new(parse_expression(re, constants)?, parse_expression(im, constants)?))
    }
}
