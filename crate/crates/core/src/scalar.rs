//! Coefficient fields for the circle algebra: exact Gaussian rationals and
//! hardware complex doubles behind one trait, so every construction downstream
//! (conormal equations, symbol matrices, winding numbers) can run in both.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// A field with conjugation that embeds in C. Exactly two implementors:
/// [`GRat`] (Q(i), exact) and [`Complex64`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + 'static {
    /// True when arithmetic is exact; drives zero-pruning and certification modes.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn i() -> Self;
    fn from_i64(n: i64) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Division; panics on an exact zero divisor (a programming error in every caller).
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Complex conjugate.
    fn conj(&self) -> Self;

    fn is_zero(&self) -> bool;
    fn to_c64(&self) -> Complex64;

    fn scale_i64(&self, n: i64) -> Self {
        self.mul(&Self::from_i64(n))
    }
}

/// Gaussian rational: an element of Q(i) with big-integer rational parts.
#[derive(Clone, PartialEq, Eq)]
pub struct GRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GRat {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// p/q as a real Gaussian rational.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        GRat {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    pub fn from_parts(re_p: i64, re_q: i64, im_p: i64, im_q: i64) -> Self {
        assert!(re_q != 0 && im_q != 0, "zero denominator");
        GRat {
            re: BigRational::new(BigInt::from(re_p), BigInt::from(re_q)),
            im: BigRational::new(BigInt::from(im_p), BigInt::from(im_q)),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// |z|^2 as a rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; panics at zero.
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "inverting zero Gaussian rational");
        GRat {
            re: &self.re / &n,
            im: -&self.im / &n,
        }
    }
}

/// Renders a rational without the `/1` noise integers would otherwise carry.
fn fmt_rat(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}i", fmt_rat(&self.im));
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(f, "{}{}{}i", fmt_rat(&self.re), sign, fmt_rat(&self.im.abs()))
    }
}

impl fmt::Debug for GRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Parses an exact real rational: "3", "-7/4". Used by configs that must not
/// round (a float 1/3 breaks exact certification downstream).
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| format!("bad numerator {p:?}: {e}"))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| format!("bad denominator {q:?}: {e}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(BigRational::new(p, q))
    } else {
        let p = BigInt::from_str(s).map_err(|e| format!("bad integer {s:?}: {e}"))?;
        Ok(BigRational::from_integer(p))
    }
}

impl Coeff for GRat {
    const EXACT: bool = true;

    fn zero() -> Self {
        GRat::from_int(0)
    }
    fn one() -> Self {
        GRat::from_int(1)
    }
    fn i() -> Self {
        GRat {
            re: BigRational::zero(),
            im: BigRational::from_integer(BigInt::from(1)),
        }
    }
    fn from_i64(n: i64) -> Self {
        GRat::from_int(n)
    }

    fn add(&self, rhs: &Self) -> Self {
        GRat {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        GRat {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        GRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
    fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inv())
    }
    fn neg(&self) -> Self {
        GRat {
            re: -&self.re,
            im: -&self.im,
        }
    }
    fn conj(&self) -> Self {
        GRat {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().expect("rational out of f64 range"),
            self.im.to_f64().expect("rational out of f64 range"),
        )
    }
}

impl Coeff for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    // Exact-zero test only: canonical-form pruning must never round floats away.
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_field_ops() {
        let a = GRat::from_parts(1, 2, -3, 4); // 1/2 - 3/4 i
        let b = GRat::from_parts(2, 1, 1, 3); // 2 + 1/3 i
        let prod = a.mul(&b);
        // (1/2 - 3/4 i)(2 + 1/3 i) = 1 + 1/4 + (1/6 - 3/2) i
        assert_eq!(prod, GRat::from_parts(5, 4, -4, 3));
        let back = prod.div(&b);
        assert_eq!(back, a);
        assert_eq!(a.mul(&a.conj()), GRat::new(a.norm_sqr(), num_traits::Zero::zero()));
        assert_eq!(GRat::i().mul(&GRat::i()), GRat::from_int(-1));
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("3").unwrap(), BigRational::from_integer(3.into()));
        assert_eq!(
            parse_rational("-7/4").unwrap(),
            BigRational::new((-7).into(), 4.into())
        );
        assert_eq!(parse_rational(" 1 / 3 ").unwrap(), BigRational::new(1.into(), 3.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(GRat::from_int(5).to_string(), "5");
        assert_eq!(GRat::from_parts(0, 1, -1, 3).to_string(), "-1/3i");
        assert_eq!(GRat::from_parts(1, 2, 1, 1).to_string(), "1/2+1i");
    }
}
