//! Numeric parameters derived from the accuracy `eps`.

use std::fmt;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamsError {
    #[error("epsilon {0} is not 1/k for an integer k >= 2")]
    BadEpsilon(Rational),
    #[error("parameter {name} = {value}: {reason}")]
    OutOfRange {
        name: &'static str,
        value: Rational,
        reason: &'static str,
    },
    #[error("unknown parameter `{0}` (expected gamma, alpha, gamma_prime, beta or h_eps)")]
    UnknownName(String),
}

/// Thresholds used throughout the decomposition, rounding and DP.
///
/// `gamma` bounds component demand, `gamma_prime` separates big from small
/// terminals and bounds cluster demand, `alpha` is the minimum per-component
/// load of a tour, `beta` controls adaptive rounding (`1/beta` groups) and
/// `h_eps` bounds the number of distance bands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    pub eps: Rational,
    pub gamma: Rational,
    pub alpha: Rational,
    pub gamma_prime: Rational,
    pub beta: Rational,
    pub h_eps: Rational,
}

fn inverse_of(eps: &Rational) -> Result<u32, ParamsError> {
    if !eps.is_positive() {
        return Err(ParamsError::BadEpsilon(eps.clone()));
    }
    let inv = eps.recip();
    if !inv.is_integer() {
        return Err(ParamsError::BadEpsilon(eps.clone()));
    }
    match inv.to_u64() {
        Some(k) if (2..=64).contains(&k) => Ok(k as u32),
        _ => Err(ParamsError::BadEpsilon(eps.clone())),
    }
}

impl Params {
    /// The exact values from the analysis. They are astronomically small for
    /// any useful `eps` but valid.
    pub fn theoretical(eps: &Rational) -> Result<Self, ParamsError> {
        let k = inverse_of(eps)?;
        let gamma = Rational::from_integer(12) * eps.recip();
        let alpha = eps.pow(k + 1);
        let gamma_prime = eps * &alpha / &gamma;
        let beta = Rational::new(1, 4) * eps.pow(4 * k + 1);
        let h_eps = Rational::from_integer(k as i64).pow(2 * k + 1);
        let p = Params {
            eps: eps.clone(),
            gamma,
            alpha,
            gamma_prime,
            beta,
            h_eps,
        };
        p.validate()?;
        Ok(p)
    }

    /// Desk-scale values: `gamma = 2`, `gamma_prime = alpha = 1/16`,
    /// `beta = 1/128`, and a band bound consistent with bounded distances.
    pub fn relaxed(eps: &Rational) -> Result<Self, ParamsError> {
        let k = inverse_of(eps)?;
        let alpha = Rational::new(1, 16);
        let spread = Rational::from_integer(k as i64).pow(k - 1);
        let h = (spread / (&alpha * eps)).ceil();
        let p = Params {
            eps: eps.clone(),
            gamma: Rational::from_integer(2),
            gamma_prime: Rational::new(1, 16),
            alpha,
            beta: Rational::new(1, 128),
            h_eps: Rational::from_bigint(h),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn inv_eps(&self) -> u32 {
        inverse_of(&self.eps).expect("validated")
    }

    /// `1/beta`, the number of rounding groups.
    pub fn inv_beta(&self) -> usize {
        self.beta.recip().to_u64().expect("validated") as usize
    }

    /// Replaces one named value, leaving the others untouched.
    pub fn set(&mut self, name: &str, value: Rational) -> Result<(), ParamsError> {
        match name {
            "gamma" => self.gamma = value,
            "alpha" => self.alpha = value,
            "gamma_prime" => self.gamma_prime = value,
            "beta" => self.beta = value,
            "h_eps" => self.h_eps = value,
            other => return Err(ParamsError::UnknownName(other.to_string())),
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        inverse_of(&self.eps)?;
        let one = Rational::one();
        let check = |name, value: &Rational, ok: bool, reason| {
            if ok {
                Ok(())
            } else {
                Err(ParamsError::OutOfRange {
                    name,
                    value: value.clone(),
                    reason,
                })
            }
        };
        check(
            "gamma",
            &self.gamma,
            self.gamma >= one,
            "must be at least 1",
        )?;
        check(
            "alpha",
            &self.alpha,
            self.alpha.is_positive() && self.alpha <= one,
            "must lie in (0,1]",
        )?;
        check(
            "gamma_prime",
            &self.gamma_prime,
            self.gamma_prime.is_positive(),
            "must be positive",
        )?;
        check(
            "gamma_prime",
            &self.gamma_prime,
            self.gamma_prime <= self.gamma,
            "must not exceed gamma",
        )?;
        check(
            "beta",
            &self.beta,
            self.beta.is_positive() && self.beta <= one && self.beta.recip().is_integer(),
            "must be 1/m for a positive integer m",
        )?;
        check(
            "h_eps",
            &self.h_eps,
            self.h_eps >= one && self.h_eps.is_integer(),
            "must be a positive integer",
        )?;
        Ok(())
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "eps={} gamma={} alpha={} gamma_prime={} beta={} h_eps={}",
            self.eps, self.gamma, self.alpha, self.gamma_prime, self.beta, self.h_eps
        )
    }
}
