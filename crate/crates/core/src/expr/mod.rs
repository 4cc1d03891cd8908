//! Symbolic scalar fields on the chart.
//!
//! An [`Expression`] is a closed-form function of the chart coordinates
//! `(x, y, z)` built from constants, the coordinates themselves, the unary
//! operations `neg, sin, cos, exp, sqrt`, the arithmetic operations
//! `+ - * /`, and powers with constant integer exponents. The grammar is
//! closed under differentiation, so exterior derivatives downstream are
//! exact: the only error anywhere in the pipeline is floating-point
//! rounding at evaluation time.
//!
//! Subtrees are shared through `Arc`, which keeps composite expressions
//! (metric inverses, derivative chains) compact and makes cached
//! evaluation over the shared structure cheap. Expressions are immutable
//! after construction and safe to evaluate from multiple threads.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::chart::{Point, Var};
use crate::scalar::Scalar;

mod parse;
pub use parse::{parse, ParseError};

/// Unary operations of the expression grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Sqrt,
}

/// Binary arithmetic operations. Integer powers are a separate node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, PartialEq)]
enum Node<T> {
    Const(T),
    Var(Var),
    Unary(UnaryOp, Expression<T>),
    Binary(BinaryOp, Expression<T>, Expression<T>),
    Pow(Expression<T>, i32),
}

/// A symbolic scalar field on the chart. Cheap to clone (shared subtrees).
pub struct Expression<T> {
    node: Arc<Node<T>>,
}

impl<T> Clone for Expression<T> {
    fn clone(&self) -> Self {
        Expression {
            node: Arc::clone(&self.node),
        }
    }
}

impl<T: PartialEq> PartialEq for Expression<T> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.node, &other.node) || self.node == other.node
    }
}

/// Evaluation failure, carrying a rendering of the offending subexpression.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("square root of a negative value in `{0}`")]
    NegativeSqrt(String),
    #[error("non-finite value produced by `{0}`")]
    NonFinite(String),
}

/// Per-point memo table for evaluating expressions that share subtrees.
///
/// A cache is only valid for a single evaluation point; callers that sweep
/// over a sample set must [`clear`](EvalCache::clear) it between points.
#[derive(Debug, Default)]
pub struct EvalCache<T> {
    map: HashMap<usize, T>,
}

impl<T> EvalCache<T> {
    pub fn new() -> Self {
        EvalCache {
            map: HashMap::new(),
        }
    }

    pub fn clear(&mut self) {
        self.map.clear();
    }
}

// Constructor names mirror the grammar operations (`add`, `mul`, ...);
// they are associated functions taking both operands, not operator impls.
#[allow(clippy::should_implement_trait)]
impl<T: Scalar> Expression<T> {
    fn wrap(node: Node<T>) -> Self {
        Expression {
            node: Arc::new(node),
        }
    }

    /// A finite constant. Panics on NaN or infinity, which the grammar
    /// cannot represent.
    pub fn constant(c: T) -> Self {
        assert!(c.is_finite(), "expression constants must be finite");
        Self::wrap(Node::Const(c))
    }

    /// One of the chart coordinates.
    pub fn var(v: Var) -> Self {
        Self::wrap(Node::Var(v))
    }

    // Raw constructors preserve the exact tree shape; the parser uses them
    // so that parsed structure mirrors the input text.
    pub(crate) fn raw_unary(op: UnaryOp, e: Expression<T>) -> Self {
        Self::wrap(Node::Unary(op, e))
    }

    pub(crate) fn raw_binary(op: BinaryOp, a: Expression<T>, b: Expression<T>) -> Self {
        Self::wrap(Node::Binary(op, a, b))
    }

    pub(crate) fn raw_pow(e: Expression<T>, n: i32) -> Self {
        Self::wrap(Node::Pow(e, n))
    }

    fn direct_const(&self) -> Option<T> {
        match &*self.node {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Sum with the identities `0 + e = e + 0 = e` and constant folding.
    pub fn add(a: Expression<T>, b: Expression<T>) -> Self {
        match (a.direct_const(), b.direct_const()) {
            (Some(ca), Some(cb)) if (ca + cb).is_finite() => Self::constant(ca + cb),
            (Some(ca), _) if ca == T::zero() => b,
            (_, Some(cb)) if cb == T::zero() => a,
            _ => Self::raw_binary(BinaryOp::Add, a, b),
        }
    }

    /// Difference with `e - 0 = e`, `0 - e = -e`, `e - e = 0` for
    /// structurally identical subtrees, and constant folding.
    pub fn sub(a: Expression<T>, b: Expression<T>) -> Self {
        match (a.direct_const(), b.direct_const()) {
            (Some(ca), Some(cb)) if (ca - cb).is_finite() => return Self::constant(ca - cb),
            (_, Some(cb)) if cb == T::zero() => return a,
            (Some(ca), _) if ca == T::zero() => return Self::neg(b),
            _ => {}
        }
        if a == b {
            return Self::constant(T::zero());
        }
        Self::raw_binary(BinaryOp::Sub, a, b)
    }

    /// Product with `0 * e = 0`, `1 * e = e` and constant folding.
    pub fn mul(a: Expression<T>, b: Expression<T>) -> Self {
        match (a.direct_const(), b.direct_const()) {
            (Some(ca), Some(cb)) if (ca * cb).is_finite() => Self::constant(ca * cb),
            (Some(ca), _) if ca == T::zero() => Self::constant(T::zero()),
            (Some(ca), _) if ca == T::one() => b,
            (_, Some(cb)) if cb == T::zero() => Self::constant(T::zero()),
            (_, Some(cb)) if cb == T::one() => a,
            _ => Self::raw_binary(BinaryOp::Mul, a, b),
        }
    }

    /// Quotient with `e / 1 = e` and constant folding away from zero denominators.
    pub fn div(a: Expression<T>, b: Expression<T>) -> Self {
        match (a.direct_const(), b.direct_const()) {
            (Some(ca), Some(cb)) if cb != T::zero() && (ca / cb).is_finite() => {
                Self::constant(ca / cb)
            }
            (_, Some(cb)) if cb == T::one() => a,
            _ => Self::raw_binary(BinaryOp::Div, a, b),
        }
    }

    pub fn neg(e: Expression<T>) -> Self {
        if let Some(c) = e.direct_const() {
            return Self::constant(-c);
        }
        if let Node::Unary(UnaryOp::Neg, inner) = &*e.node {
            return inner.clone();
        }
        Self::raw_unary(UnaryOp::Neg, e)
    }

    pub fn sin(e: Expression<T>) -> Self {
        match e.direct_const() {
            Some(c) if c.sin().is_finite() => Self::constant(c.sin()),
            _ => Self::raw_unary(UnaryOp::Sin, e),
        }
    }

    pub fn cos(e: Expression<T>) -> Self {
        match e.direct_const() {
            Some(c) if c.cos().is_finite() => Self::constant(c.cos()),
            _ => Self::raw_unary(UnaryOp::Cos, e),
        }
    }

    pub fn exp(e: Expression<T>) -> Self {
        match e.direct_const() {
            Some(c) if c.exp().is_finite() => Self::constant(c.exp()),
            _ => Self::raw_unary(UnaryOp::Exp, e),
        }
    }

    pub fn sqrt(e: Expression<T>) -> Self {
        match e.direct_const() {
            Some(c) if c >= T::zero() && c.sqrt().is_finite() => Self::constant(c.sqrt()),
            _ => Self::raw_unary(UnaryOp::Sqrt, e),
        }
    }

    /// Integer power with `e^0 = 1`, `e^1 = e` and constant folding.
    pub fn powi(e: Expression<T>, n: i32) -> Self {
        if n == 0 {
            return Self::constant(T::one());
        }
        if n == 1 {
            return e;
        }
        if let Some(c) = e.direct_const() {
            let v = c.powi(n);
            if v.is_finite() {
                return Self::constant(v);
            }
        }
        Self::raw_pow(e, n)
    }

    /// Folds a variable-free expression to its value. Returns `None` if any
    /// coordinate occurs or if folding would leave the domain.
    pub fn fold_constant(&self) -> Option<T> {
        match &*self.node {
            Node::Const(c) => Some(*c),
            Node::Var(_) => None,
            Node::Unary(op, e) => {
                let v = e.fold_constant()?;
                let r = match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Sin => v.sin(),
                    UnaryOp::Cos => v.cos(),
                    UnaryOp::Exp => v.exp(),
                    UnaryOp::Sqrt => {
                        if v < T::zero() {
                            return None;
                        }
                        v.sqrt()
                    }
                };
                r.is_finite().then_some(r)
            }
            Node::Binary(op, a, b) => {
                let va = a.fold_constant()?;
                let vb = b.fold_constant()?;
                let r = match op {
                    BinaryOp::Add => va + vb,
                    BinaryOp::Sub => va - vb,
                    BinaryOp::Mul => va * vb,
                    BinaryOp::Div => {
                        if vb == T::zero() {
                            return None;
                        }
                        va / vb
                    }
                };
                r.is_finite().then_some(r)
            }
            Node::Pow(e, n) => {
                let v = e.fold_constant()?.powi(*n);
                v.is_finite().then_some(v)
            }
        }
    }

    /// Partial derivative with respect to one chart coordinate. The result
    /// stays inside the grammar; light identities are applied as the tree
    /// is built so derivative chains do not balloon.
    pub fn differentiate(&self, var: Var) -> Self {
        match &*self.node {
            Node::Const(_) => Self::constant(T::zero()),
            Node::Var(v) => {
                if *v == var {
                    Self::constant(T::one())
                } else {
                    Self::constant(T::zero())
                }
            }
            Node::Unary(op, e) => {
                let de = e.differentiate(var);
                match op {
                    UnaryOp::Neg => Self::neg(de),
                    UnaryOp::Sin => Self::mul(Self::cos(e.clone()), de),
                    UnaryOp::Cos => Self::neg(Self::mul(Self::sin(e.clone()), de)),
                    UnaryOp::Exp => Self::mul(Self::exp(e.clone()), de),
                    UnaryOp::Sqrt => Self::div(
                        de,
                        Self::mul(
                            Self::constant(T::from_f64_lossy(2.0)),
                            Self::sqrt(e.clone()),
                        ),
                    ),
                }
            }
            Node::Binary(op, a, b) => {
                let da = a.differentiate(var);
                let db = b.differentiate(var);
                match op {
                    BinaryOp::Add => Self::add(da, db),
                    BinaryOp::Sub => Self::sub(da, db),
                    BinaryOp::Mul => Self::add(
                        Self::mul(da, b.clone()),
                        Self::mul(a.clone(), db),
                    ),
                    BinaryOp::Div => Self::div(
                        Self::sub(
                            Self::mul(da, b.clone()),
                            Self::mul(a.clone(), db),
                        ),
                        Self::powi(b.clone(), 2),
                    ),
                }
            }
            Node::Pow(e, n) => {
                let de = e.differentiate(var);
                let factor = Self::mul(
                    Self::constant(T::from_f64_lossy(f64::from(*n))),
                    Self::powi(e.clone(), n - 1),
                );
                Self::mul(factor, de)
            }
        }
    }

    /// Value-preserving cleanup: bottom-up constant folding plus the
    /// identities baked into the smart constructors (`0 + e`, `0 * e`,
    /// `1 * e`, `e - e`, ...). No trigonometric rewriting.
    pub fn simplify(&self) -> Self {
        match &*self.node {
            Node::Const(_) | Node::Var(_) => self.clone(),
            Node::Unary(op, e) => {
                let se = e.simplify();
                match op {
                    UnaryOp::Neg => Self::neg(se),
                    UnaryOp::Sin => Self::sin(se),
                    UnaryOp::Cos => Self::cos(se),
                    UnaryOp::Exp => Self::exp(se),
                    UnaryOp::Sqrt => Self::sqrt(se),
                }
            }
            Node::Binary(op, a, b) => {
                let sa = a.simplify();
                let sb = b.simplify();
                match op {
                    BinaryOp::Add => Self::add(sa, sb),
                    BinaryOp::Sub => Self::sub(sa, sb),
                    BinaryOp::Mul => Self::mul(sa, sb),
                    BinaryOp::Div => Self::div(sa, sb),
                }
            }
            Node::Pow(e, n) => Self::powi(e.simplify(), *n),
        }
    }

    /// Evaluates at a point. Domain violations (division by zero, square
    /// root of a negative, non-finite intermediates) are reported with the
    /// offending subexpression.
    pub fn evaluate(&self, p: &Point<T>) -> Result<T, EvalError> {
        self.eval_plain(p)
    }

    fn eval_plain(&self, p: &Point<T>) -> Result<T, EvalError> {
        let v = match &*self.node {
            Node::Const(c) => *c,
            Node::Var(var) => p.coord(*var),
            Node::Unary(op, e) => apply_unary(*op, e.eval_plain(p)?, e)?,
            Node::Binary(op, a, b) => {
                apply_binary(*op, a.eval_plain(p)?, b.eval_plain(p)?, self)?
            }
            Node::Pow(e, n) => e.eval_plain(p)?.powi(*n),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite(self.excerpt()))
        }
    }

    /// Evaluates with a per-point memo table. Shared subtrees (metric
    /// determinants, inverse entries) are computed once per point.
    pub fn evaluate_cached(
        &self,
        p: &Point<T>,
        cache: &mut EvalCache<T>,
    ) -> Result<T, EvalError> {
        let key = Arc::as_ptr(&self.node) as usize;
        let composite = matches!(&*self.node, Node::Unary(..) | Node::Binary(..) | Node::Pow(..));
        if composite {
            if let Some(v) = cache.map.get(&key) {
                return Ok(*v);
            }
        }
        let v = match &*self.node {
            Node::Const(c) => *c,
            Node::Var(var) => p.coord(*var),
            Node::Unary(op, e) => apply_unary(*op, e.evaluate_cached(p, cache)?, e)?,
            Node::Binary(op, a, b) => {
                let va = a.evaluate_cached(p, cache)?;
                let vb = b.evaluate_cached(p, cache)?;
                apply_binary(*op, va, vb, self)?
            }
            Node::Pow(e, n) => e.evaluate_cached(p, cache)?.powi(*n),
        };
        if !v.is_finite() {
            return Err(EvalError::NonFinite(self.excerpt()));
        }
        if composite {
            cache.map.insert(key, v);
        }
        Ok(v)
    }

    /// Number of nodes in the tree (shared subtrees counted each time).
    pub fn node_count(&self) -> usize {
        match &*self.node {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Unary(_, e) => 1 + e.node_count(),
            Node::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
            Node::Pow(e, _) => 1 + e.node_count(),
        }
    }

    /// Short rendering for error messages.
    fn excerpt(&self) -> String {
        let s = self.to_string();
        if s.len() > 96 {
            format!("{}…", &s[..96])
        } else {
            s
        }
    }
}

fn apply_unary<T: Scalar>(op: UnaryOp, v: T, arg: &Expression<T>) -> Result<T, EvalError> {
    Ok(match op {
        UnaryOp::Neg => -v,
        UnaryOp::Sin => v.sin(),
        UnaryOp::Cos => v.cos(),
        UnaryOp::Exp => v.exp(),
        UnaryOp::Sqrt => {
            if v < T::zero() {
                return Err(EvalError::NegativeSqrt(arg.excerpt()));
            }
            v.sqrt()
        }
    })
}

fn apply_binary<T: Scalar>(
    op: BinaryOp,
    a: T,
    b: T,
    whole: &Expression<T>,
) -> Result<T, EvalError> {
    Ok(match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => {
            if b == T::zero() {
                return Err(EvalError::DivisionByZero(whole.excerpt()));
            }
            a / b
        }
    })
}

// Printing uses the same precedence table as the parser, so the printed
// form re-parses to a value-identical expression.
const PREC_ADD: u8 = 10;
const PREC_MUL: u8 = 20;
const PREC_NEG: u8 = 25;
const PREC_POW: u8 = 30;

impl<T: Scalar> Expression<T> {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        match &*self.node {
            Node::Const(c) => {
                if *c < T::zero() && ctx > 0 {
                    write!(f, "({})", c)
                } else {
                    write!(f, "{}", c)
                }
            }
            Node::Var(v) => f.write_str(v.name()),
            Node::Unary(UnaryOp::Neg, e) => {
                let parens = ctx > PREC_NEG;
                if parens {
                    f.write_str("(")?;
                }
                f.write_str("-")?;
                e.fmt_prec(f, PREC_NEG + 1)?;
                if parens {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Node::Unary(op, e) => {
                let name = match op {
                    UnaryOp::Sin => "sin",
                    UnaryOp::Cos => "cos",
                    UnaryOp::Exp => "exp",
                    UnaryOp::Sqrt => "sqrt",
                    UnaryOp::Neg => unreachable!(),
                };
                write!(f, "{}(", name)?;
                e.fmt_prec(f, 0)?;
                f.write_str(")")
            }
            Node::Binary(op, a, b) => {
                let (sym, prec) = match op {
                    BinaryOp::Add => ("+", PREC_ADD),
                    BinaryOp::Sub => ("-", PREC_ADD),
                    BinaryOp::Mul => ("*", PREC_MUL),
                    BinaryOp::Div => ("/", PREC_MUL),
                };
                let parens = ctx > prec;
                if parens {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, prec)?;
                write!(f, " {} ", sym)?;
                b.fmt_prec(f, prec + 1)?;
                if parens {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Node::Pow(e, n) => {
                let parens = ctx > PREC_POW;
                if parens {
                    f.write_str("(")?;
                }
                e.fmt_prec(f, PREC_POW + 1)?;
                if *n < 0 {
                    write!(f, "^({})", n)?;
                } else {
                    write!(f, "^{}", n)?;
                }
                if parens {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl<T: Scalar> fmt::Display for Expression<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl<T: fmt::Debug> fmt::Debug for Expression<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.node, f)
    }
}
