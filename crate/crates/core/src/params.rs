use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{parse_rational, serde_rational, to_f64, Rational};

/// Model parameters: cluster size `n`, cluster count `k`, cross-coupling `ε`,
/// external field `h` and inverse temperature `β`.
///
/// `ε` and `h` are kept as exact rationals so that regime boundaries such as
/// `h = −ε` are detected without rounding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    n: usize,
    k: usize,
    #[serde(with = "serde_rational")]
    epsilon: Rational,
    #[serde(with = "serde_rational")]
    h: Rational,
    beta: f64,
}

impl Params {
    /// Two clusters, `β = 1`.
    pub fn new(n: usize, epsilon: Rational, h: Rational) -> Result<Self> {
        Params { n, k: 2, epsilon, h, beta: 1.0 }.validated()
    }

    /// Same as [`Params::new`] with `ε` and `h` given as decimal strings.
    pub fn parse(n: usize, epsilon: &str, h: &str) -> Result<Self> {
        Self::new(n, parse_rational(epsilon)?, parse_rational(h)?)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = beta;
        self.validated()
    }

    pub fn with_clusters(mut self, k: usize) -> Result<Self> {
        self.k = k;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::Domain(format!("n must be at least 2, got {}", self.n)));
        }
        if self.k < 2 {
            return Err(Error::Domain(format!("k must be at least 2, got {}", self.k)));
        }
        if self.epsilon < -Rational::one() || self.epsilon > Rational::one() {
            return Err(Error::Domain(format!("epsilon must lie in [-1, 1], got {}", self.epsilon)));
        }
        if self.h < Rational::zero() || self.h > Rational::one() {
            return Err(Error::Domain(format!("h must lie in [0, 1], got {}", self.h)));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::Domain(format!("beta must be positive, got {}", self.beta)));
        }
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    pub fn h(&self) -> Rational {
        self.h
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn epsilon_f64(&self) -> f64 {
        to_f64(self.epsilon)
    }

    pub fn h_f64(&self) -> f64 {
        to_f64(self.h)
    }

    pub(crate) fn require_two_clusters(&self) -> Result<()> {
        if self.k == 2 {
            Ok(())
        } else {
            Err(Error::NeedsTwoClusters(self.k))
        }
    }
}
