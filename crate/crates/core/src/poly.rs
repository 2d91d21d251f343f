//! Real polynomials in the Laplace variable `s` and rational functions built
//! from them.
//!
//! Coefficients are stored in ascending degree order. Only exact zeros are
//! trimmed; no tolerance-based cleanup happens anywhere in this module.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("denominator is identically zero")]
    ZeroDenominator,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(alloc::vec![c])
    }

    /// `c * s^k`
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = alloc::vec![0.0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<f64> {
        self.coeffs.last().copied()
    }

    /// Multiplicity of the root at `s = 0`; `None` for the zero polynomial.
    pub fn origin_multiplicity(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0.0)
    }

    /// Divides by `s^k`. The caller guarantees the low `k` coefficients are zero.
    fn shift_down(&self, k: usize) -> Self {
        debug_assert!(self.coeffs.iter().take(k).all(|&c| c == 0.0));
        Self::new(self.coeffs.iter().skip(k).copied().collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    fn div_scalar(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|a| a / c).collect())
    }

    pub fn add(&self, rhs: &Polynomial) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &Polynomial, i: usize| p.coeffs.get(i).copied().unwrap_or(0.0);
        Self::new((0..n).map(|i| get(self, i) + get(rhs, i)).collect())
    }

    pub fn sub(&self, rhs: &Polynomial) -> Self {
        self.add(&rhs.scale(-1.0))
    }

    pub fn mul(&self, rhs: &Polynomial) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = alloc::vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0.0 { " - " } else { " + " })?;
            }
            first = false;
            let coef = format_number(mag);
            match k {
                0 => f.write_str(&coef)?,
                _ if mag == 1.0 => write_power(f, k)?,
                _ => {
                    f.write_str(&coef)?;
                    f.write_str(" ")?;
                    write_power(f, k)?;
                }
            }
        }
        Ok(())
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, k: usize) -> fmt::Result {
    if k == 1 {
        f.write_str("s")
    } else {
        write!(f, "s^{k}")
    }
}

/// Renders a coefficient rounded to 12 significant digits, without exponent
/// notation and without trailing zeros.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return String::from("0");
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

/// A ratio of polynomials with a nonzero denominator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RationalTF {
    num: Polynomial,
    den: Polynomial,
}

impl RationalTF {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(Self { num, den })
    }

    /// `gain / s^k`, already normalized.
    pub fn integrator_chain(gain: f64, k: usize) -> Self {
        Self {
            num: Polynomial::constant(gain),
            den: Polynomial::monomial(1.0, k),
        }
        .normalized()
    }

    pub fn zero() -> Self {
        Self {
            num: Polynomial::zero(),
            den: Polynomial::constant(1.0),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels common powers of `s` and scales the denominator to be monic.
    /// A zero numerator normalizes to `0 / 1`.
    pub fn normalized(&self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        // den is nonzero by construction, num just checked
        let k = self
            .num
            .origin_multiplicity()
            .unwrap_or(0)
            .min(self.den.origin_multiplicity().unwrap_or(0));
        let num = self.num.shift_down(k);
        let den = self.den.shift_down(k);
        let lead = den.leading().unwrap_or(1.0);
        Self {
            num: num.div_scalar(lead),
            den: den.div_scalar(lead),
        }
    }

    pub fn is_normalized(&self) -> bool {
        if self.num.is_zero() {
            return self.den == Polynomial::constant(1.0);
        }
        let monic = self.den.leading() == Some(1.0);
        let coprime_in_s =
            self.num.origin_multiplicity() == Some(0) || self.den.origin_multiplicity() == Some(0);
        monic && coprime_in_s
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.num.eval(s) / self.den.eval(s)
    }

    /// `num=[..] den=[..]` with ascending coefficients, full precision.
    pub fn coeff_string(&self) -> String {
        let list = |p: &Polynomial| {
            // adding 0.0 turns -0.0 into 0.0
            let items: Vec<String> = p
                .coeffs()
                .iter()
                .map(|c| format!("{:?}", c + 0.0))
                .collect();
            format!("[{}]", items.join(", "))
        };
        format!("num={} den={}", list(&self.num), list(&self.den))
    }
}

impl fmt::Display for RationalTF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_zero() {
            return f.write_str("0");
        }
        let wrap = |p: &Polynomial| {
            let terms = p.coeffs().iter().filter(|&&c| c != 0.0).count();
            if terms > 1 {
                format!("({p})")
            } else {
                format!("{p}")
            }
        };
        if self.den == Polynomial::constant(1.0) {
            return write!(f, "{}", self.num);
        }
        write!(f, "{} / {}", wrap(&self.num), wrap(&self.den))
    }
}
