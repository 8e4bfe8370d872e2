//! Time-indexed integer programs for the four planning problems, LP text
//! export and import, and verification of external solver output.
//!
//! Variables are `q` (MCC only), `y<i>` (subsidize node `i`) and `x<i>_<t>`
//! (node `i` Green at time `t`). Adoption variables may lag the true
//! dynamics; they are only bounded from above by the update rule.

mod build;
mod lp;
mod oracle;
mod verify;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::optimize::OptimizeError;
use crate::scalar::Scalar;

pub use build::{build_fd_bmc, build_fd_mcc, build_model, build_temp_bmc, build_temp_mcc};
pub use lp::{export_lp, parse_lp, write_lp, LpMode};
pub use oracle::{enumerate_optimum, ORACLE_Y_LIMIT};
pub use verify::{decode_and_verify, parse_solution, read_solution, IpSolution, VerificationReport};

#[derive(Debug, Error)]
pub enum IpError {
    #[error("expected {expected} per-node values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fixed-duration models need d >= 1")]
    ZeroDuration,
    #[error("coefficient of `{0}` has no exact rational form")]
    NotRational(String),
    #[error("{message} at line {line}")]
    Parse { line: usize, message: String },
    #[error("variable `{0}` is not binary within 1e-6")]
    NotBinary(String),
    #[error("constraint `{0}` is violated")]
    Violated(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable<T> {
    pub name: String,
    pub kind: VarKind,
    pub lower: T,
    /// `None` means unbounded above.
    pub upper: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub name: String,
    /// `(coefficient, variable index)` pairs.
    pub terms: Vec<(T, usize)>,
    pub sense: Sense,
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Objective<T> {
    pub sense: ObjectiveSense,
    pub terms: Vec<(T, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IpModel<T> {
    pub variables: Vec<Variable<T>>,
    pub constraints: Vec<Constraint<T>>,
    pub objective: Objective<T>,
}

impl<T: Scalar> IpModel<T> {
    pub(crate) fn new(sense: ObjectiveSense) -> Self {
        IpModel { variables: Vec::new(), constraints: Vec::new(), objective: Objective { sense, terms: Vec::new() } }
    }

    pub(crate) fn add_variable(&mut self, name: String, kind: VarKind) -> usize {
        let (lower, upper) = match kind {
            VarKind::Binary => (T::zero(), Some(T::one())),
            _ => (T::zero(), None),
        };
        self.variables.push(Variable { name, kind, lower, upper });
        self.variables.len() - 1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn name_index(&self) -> HashMap<&str, usize> {
        self.variables.iter().enumerate().map(|(i, v)| (v.name.as_str(), i)).collect()
    }

    fn row_value(terms: &[(T, usize)], values: &[T]) -> T {
        terms.iter().fold(T::zero(), |acc, (c, v)| acc + c.clone() * values[*v].clone())
    }

    pub fn objective_value(&self, values: &[T]) -> T {
        Self::row_value(&self.objective.terms, values)
    }

    /// Name of the first violated constraint or bound, if any. `values` is
    /// indexed like `variables`.
    pub fn first_violation(&self, values: &[T]) -> Option<String> {
        for (var, value) in self.variables.iter().zip(values) {
            let out_of_bounds = *value < var.lower || var.upper.as_ref().is_some_and(|u| value > u);
            let fractional = var.kind != VarKind::Continuous && value.to_rational().is_none_or(|r| !r.is_integer());
            if out_of_bounds || fractional {
                return Some(var.name.clone());
            }
        }
        self.constraints
            .iter()
            .find(|c| {
                let lhs = Self::row_value(&c.terms, values);
                match c.sense {
                    Sense::Le => lhs > c.rhs,
                    Sense::Ge => lhs < c.rhs,
                    Sense::Eq => lhs != c.rhs,
                }
            })
            .map(|c| c.name.clone())
    }

    pub fn check(&self, values: &[T]) -> Result<(), IpError> {
        match self.first_violation(values) {
            Some(name) => Err(IpError::Violated(name)),
            None => Ok(()),
        }
    }

    pub fn binary_count(&self) -> usize {
        self.variables.iter().filter(|v| v.kind == VarKind::Binary).count()
    }
}

/// Parses `x<i>_<t>` into `(i, t)`.
pub(crate) fn parse_x_name(name: &str) -> Option<(usize, usize)> {
    let (i, t) = name.strip_prefix('x')?.split_once('_')?;
    Some((i.parse().ok()?, t.parse().ok()?))
}

/// Parses `y<i>` into `i`.
pub(crate) fn parse_y_name(name: &str) -> Option<usize> {
    name.strip_prefix('y')?.parse().ok()
}
