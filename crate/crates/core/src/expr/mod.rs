//! Expressions for the conformal factor and their exact derivatives.

mod ast;
mod eval;
mod jet;
mod parse;

pub use ast::{BinOp, Constant, Expr, Func, Var};
pub use eval::eval_jet;
pub use jet::{coefficient_count, multi_indices, Jet, MAX_ORDER};
pub use parse::parse;

impl std::str::FromStr for Expr {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Expr> {
        parse(s)
    }
}
