use crate::scalar::{intransigent_alpha, Scalar};

use super::GraphError;

/// Utility model behind a node's threshold: a non-decreasing, piecewise
/// constant moral benefit `f(p)` of the Green fraction `p`, a private
/// environmental benefit, the personal cost of adopting and a subsidy value.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityProfile<T> {
    moral_benefit: Vec<(T, T)>,
    env_benefit: T,
    cost: T,
    subsidy: T,
}

/// Result of converting a utility profile into a threshold.
#[derive(Debug, Clone, PartialEq)]
pub enum Susceptibility<T> {
    /// Smallest fraction at which adoption pays off.
    Fraction(T),
    /// No fraction of Green neighbors makes adoption worthwhile.
    Intransigent,
}

impl<T: Scalar> Susceptibility<T> {
    /// Alpha to feed into threshold derivation.
    pub fn to_alpha(&self) -> T {
        match self {
            Susceptibility::Fraction(a) => a.clone(),
            Susceptibility::Intransigent => intransigent_alpha(),
        }
    }
}

impl<T: Scalar> UtilityProfile<T> {
    /// `moral_benefit` holds `(breakpoint, value)` pairs; breakpoints must be
    /// strictly increasing in `[0, 1]` starting at 0, values non-negative and
    /// non-decreasing.
    pub fn new(moral_benefit: Vec<(T, T)>, env_benefit: T, cost: T, subsidy: T) -> Result<Self, GraphError> {
        let invalid = |m: &str| Err(GraphError::InvalidUtility(m.to_string()));
        let Some((first, _)) = moral_benefit.first() else {
            return invalid("moral benefit function has no breakpoints");
        };
        if !first.is_zero() {
            return invalid("first breakpoint must be at p = 0");
        }
        for w in moral_benefit.windows(2) {
            if w[1].0 <= w[0].0 {
                return invalid("breakpoints must be strictly increasing");
            }
            if w[1].1 < w[0].1 {
                return invalid("moral benefit must be non-decreasing");
            }
        }
        if moral_benefit.iter().any(|(p, v)| *p > T::one() || v.is_negative()) {
            return invalid("breakpoints must lie in [0, 1] with non-negative values");
        }
        if env_benefit.is_negative() || cost.is_negative() || subsidy.is_negative() {
            return invalid("benefit, cost and subsidy must be non-negative");
        }
        Ok(UtilityProfile { moral_benefit, env_benefit, cost, subsidy })
    }

    /// `f(p)`: value of the last breakpoint at or below `p`.
    pub fn moral_benefit_at(&self, p: &T) -> T {
        self.moral_benefit
            .iter()
            .take_while(|(bp, _)| bp <= p)
            .last()
            .map(|(_, v)| v.clone())
            .unwrap_or_else(T::zero)
    }

    /// Whether the subsidy alone makes adoption worthwhile at zero adoption.
    pub fn subsidy_forces_adoption(&self) -> bool {
        self.moral_benefit_at(&T::zero()) + self.env_benefit.clone() + self.subsidy.clone() > self.cost
    }
}

/// `argmin_p { p : f(p) + beta > c }` over the breakpoints of `f`.
pub fn alpha_from_utility<T: Scalar>(u: &UtilityProfile<T>) -> Susceptibility<T> {
    u.moral_benefit
        .iter()
        .find(|(_, v)| v.clone() + u.env_benefit.clone() > u.cost)
        .map(|(p, _)| Susceptibility::Fraction(p.clone()))
        .unwrap_or(Susceptibility::Intransigent)
}
