//! Forward-mode second-order jets: value, gradient and Hessian propagated
//! exactly through the expression tree. No finite differences anywhere.

use super::expr::{ExprAst, Func};
use crate::{Error, Result};

/// Value, gradient and (symmetric) Hessian of a scalar function at a point.
#[derive(Debug, Clone)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major n x n, kept symmetric by construction.
    pub hess: Vec<f64>,
}

impl Jet2 {
    fn constant(v: f64, n: usize) -> Self {
        Self {
            value: v,
            grad: vec![0.0; n],
            hess: vec![0.0; n * n],
        }
    }

    fn variable(v: f64, k: usize, n: usize) -> Self {
        let mut j = Self::constant(v, n);
        j.grad[k] = 1.0;
        j
    }

    fn dim(&self) -> usize {
        self.grad.len()
    }

    fn add(&self, o: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value + o.value,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a + b).collect(),
            hess: self.hess.iter().zip(&o.hess).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub(&self, o: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value - o.value,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a - b).collect(),
            hess: self.hess.iter().zip(&o.hess).map(|(a, b)| a - b).collect(),
        }
    }

    fn neg(&self) -> Jet2 {
        Jet2 {
            value: -self.value,
            grad: self.grad.iter().map(|a| -a).collect(),
            hess: self.hess.iter().map(|a| -a).collect(),
        }
    }

    fn mul(&self, o: &Jet2) -> Jet2 {
        let n = self.dim();
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            grad[i] = self.grad[i] * o.value + self.value * o.grad[i];
        }
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = self.hess[i * n + j] * o.value
                    + self.grad[i] * o.grad[j]
                    + self.grad[j] * o.grad[i]
                    + self.value * o.hess[i * n + j];
            }
        }
        Jet2 {
            value: self.value * o.value,
            grad,
            hess,
        }
    }

    /// Chain rule through a scalar map g with g'(v), g''(v).
    fn compose(&self, g0: f64, g1: f64, g2: f64) -> Jet2 {
        let n = self.dim();
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            grad[i] = g1 * self.grad[i];
        }
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = g1 * self.hess[i * n + j] + g2 * self.grad[i] * self.grad[j];
            }
        }
        Jet2 {
            value: g0,
            grad,
            hess,
        }
    }

    fn recip(&self) -> Result<Jet2> {
        if self.value.abs() < 1e-300 {
            return Err(Error::Domain("division by zero"));
        }
        let v = self.value;
        Ok(self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)))
    }
}

/// Evaluate just the value.
pub fn eval_value(ast: &ExprAst, x: &[f64]) -> Result<f64> {
    Ok(match ast {
        ExprAst::Const(v) => *v,
        ExprAst::Var(k) => x[*k],
        ExprAst::Add(a, b) => eval_value(a, x)? + eval_value(b, x)?,
        ExprAst::Sub(a, b) => eval_value(a, x)? - eval_value(b, x)?,
        ExprAst::Mul(a, b) => eval_value(a, x)? * eval_value(b, x)?,
        ExprAst::Div(a, b) => {
            let d = eval_value(b, x)?;
            if d.abs() < 1e-300 {
                return Err(Error::Domain("division by zero"));
            }
            eval_value(a, x)? / d
        }
        ExprAst::Neg(a) => -eval_value(a, x)?,
        ExprAst::Pow(a, k) => eval_value(a, x)?.powi(*k),
        ExprAst::Apply(f, a) => {
            let v = eval_value(a, x)?;
            match f {
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(Error::Domain("sqrt of negative"));
                    }
                    v.sqrt()
                }
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Exp => v.exp(),
                Func::Log => {
                    if v <= 0.0 {
                        return Err(Error::Domain("log of non-positive"));
                    }
                    v.ln()
                }
            }
        }
    })
}

/// Evaluate value, gradient and Hessian at `x`.
pub fn eval_jet2(ast: &ExprAst, x: &[f64]) -> Result<Jet2> {
    let n = x.len();
    let jet = eval_rec(ast, x, n)?;
    Ok(symmetrized(jet))
}

fn symmetrized(mut j: Jet2) -> Jet2 {
    let n = j.grad.len();
    for i in 0..n {
        for k in i + 1..n {
            let m = 0.5 * (j.hess[i * n + k] + j.hess[k * n + i]);
            j.hess[i * n + k] = m;
            j.hess[k * n + i] = m;
        }
    }
    j
}

fn eval_rec(ast: &ExprAst, x: &[f64], n: usize) -> Result<Jet2> {
    Ok(match ast {
        ExprAst::Const(v) => Jet2::constant(*v, n),
        ExprAst::Var(k) => Jet2::variable(x[*k], *k, n),
        ExprAst::Add(a, b) => eval_rec(a, x, n)?.add(&eval_rec(b, x, n)?),
        ExprAst::Sub(a, b) => eval_rec(a, x, n)?.sub(&eval_rec(b, x, n)?),
        ExprAst::Mul(a, b) => eval_rec(a, x, n)?.mul(&eval_rec(b, x, n)?),
        ExprAst::Div(a, b) => eval_rec(a, x, n)?.mul(&eval_rec(b, x, n)?.recip()?),
        ExprAst::Neg(a) => eval_rec(a, x, n)?.neg(),
        ExprAst::Pow(a, k) => {
            let base = eval_rec(a, x, n)?;
            let v = base.value;
            let k = *k;
            if k < 0 && v.abs() < 1e-300 {
                return Err(Error::Domain("negative power of zero"));
            }
            let g0 = v.powi(k);
            let g1 = k as f64 * v.powi(k - 1);
            let g2 = (k as f64) * (k as f64 - 1.0) * v.powi(k - 2);
            base.compose(g0, g1, g2)
        }
        ExprAst::Apply(f, a) => {
            let inner = eval_rec(a, x, n)?;
            let v = inner.value;
            match f {
                Func::Sqrt => {
                    if v <= 0.0 {
                        return Err(Error::Domain("sqrt of non-positive"));
                    }
                    let s = v.sqrt();
                    inner.compose(s, 0.5 / s, -0.25 / (s * v))
                }
                Func::Sin => inner.compose(v.sin(), v.cos(), -v.sin()),
                Func::Cos => inner.compose(v.cos(), -v.sin(), -v.cos()),
                Func::Exp => {
                    let e = v.exp();
                    inner.compose(e, e, e)
                }
                Func::Log => {
                    if v <= 0.0 {
                        return Err(Error::Domain("log of non-positive"));
                    }
                    inner.compose(v.ln(), 1.0 / v, -1.0 / (v * v))
                }
            }
        }
    })
}
