use crate::expr::ast::{BinOp, Expr, Func, Var};
use crate::expr::jet::{Jet, MAX_ORDER};
use crate::{Error, Point, Result};

/// Integer exponents up to this magnitude are expanded by repeated multiplication.
const MAX_INTEGER_POWER: f64 = 8.0;

/// Evaluates `expr` at `point` as a jet carrying all partial derivatives up to `order`.
pub fn eval_jet(expr: &Expr, point: Point, order: usize) -> Result<Jet> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooHigh(order));
    }
    let ctx = Context {
        x1: Jet::variable(Var::X1, point.x1, order),
        x2: Jet::variable(Var::X2, point.x2, order),
        order,
    };
    let jet = ctx.eval(expr)?;
    if !jet.is_finite() {
        return Err(Error::NonFinite {
            what: "expression value",
            point,
        });
    }
    Ok(jet)
}

struct Context {
    x1: Jet,
    x2: Jet,
    order: usize,
}

impl Context {
    fn eval(&self, expr: &Expr) -> Result<Jet> {
        Ok(match expr {
            Expr::Num(v) => Jet::constant(*v, self.order),
            Expr::Const(c) => Jet::constant(c.value(), self.order),
            Expr::Var(Var::X1) => self.x1,
            Expr::Var(Var::X2) => self.x2,
            Expr::Neg(e) => -self.eval(e)?,
            Expr::Binary(op, l, r) => {
                let lhs = self.eval(l)?;
                match op {
                    BinOp::Add => lhs + self.eval(r)?,
                    BinOp::Sub => lhs - self.eval(r)?,
                    BinOp::Mul => lhs * self.eval(r)?,
                    BinOp::Div => lhs.try_div(&self.eval(r)?)?,
                    BinOp::Pow => self.pow(lhs, r)?,
                }
            }
            Expr::Call(func, arg) => {
                let u = self.eval(arg)?;
                match func {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Tan => u.tan()?,
                    Func::Exp => u.exp(),
                    Func::Log => u.ln()?,
                    Func::Sqrt => u.sqrt()?,
                    Func::Sinh => u.sinh(),
                    Func::Cosh => u.cosh(),
                    Func::Tanh => u.tanh(),
                    Func::Atan => u.atan(),
                }
            }
        })
    }

    fn pow(&self, base: Jet, exponent: &Expr) -> Result<Jet> {
        let e = self.eval(exponent)?;
        if exponent.is_constant() {
            let n = e.value();
            if n.fract() == 0.0 && n.abs() <= MAX_INTEGER_POWER {
                return base.powi(n as i32);
            }
        }
        base.powf(&e)
    }
}
