//! Rational polynomials and exact bisection root isolation.

use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("polynomial has the same sign at both ends of [{lo}, {hi}]")]
    NoSignChange { lo: Rational, hi: Rational },
    #[error("bracket [{lo}, {hi}] is empty")]
    EmptyBracket { lo: Rational, hi: Rational },
    #[error("requested width must be positive")]
    NonPositiveWidth,
}

/// Polynomial with coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        Polynomial::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    pub fn scale(&self, k: &Rational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&Rational::from_integer(-1)))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::new(Vec::new());
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Polynomial::new(out)
    }

    /// Narrows `[lo, hi]` by exact bisection until it is at most `width`
    /// wide while still containing a sign change. An exact root hit during
    /// bisection is returned as the degenerate bracket `[r, r]`.
    pub fn isolate_root(
        &self,
        lo: &Rational,
        hi: &Rational,
        width: &Rational,
    ) -> Result<(Rational, Rational), RootError> {
        if self.is_zero() {
            return Err(RootError::ZeroPolynomial);
        }
        if !width.is_positive() {
            return Err(RootError::NonPositiveWidth);
        }
        if lo > hi {
            return Err(RootError::EmptyBracket { lo: lo.clone(), hi: hi.clone() });
        }
        let (mut lo, mut hi) = (lo.clone(), hi.clone());
        let s_lo = self.eval(&lo).signum();
        let s_hi = self.eval(&hi).signum();
        if s_lo == 0 {
            return Ok((lo.clone(), lo));
        }
        if s_hi == 0 {
            return Ok((hi.clone(), hi));
        }
        if s_lo == s_hi {
            return Err(RootError::NoSignChange { lo, hi });
        }
        let two = Rational::from_integer(2);
        while &hi - &lo > *width {
            let mid = &(&lo + &hi) / &two;
            match self.eval(&mid).signum() {
                0 => return Ok((mid.clone(), mid)),
                s if s == s_lo => lo = mid,
                _ => hi = mid,
            }
        }
        Ok((lo, hi))
    }
}

/// Free-function form of [`Polynomial::isolate_root`] over ascending coefficients.
pub fn isolate_root(
    coeffs: &[Rational],
    bracket: (&Rational, &Rational),
    width: &Rational,
) -> Result<(Rational, Rational), RootError> {
    Polynomial::new(coeffs.to_vec()).isolate_root(bracket.0, bracket.1, width)
}
