//! Laurent polynomials on the unit circle.
//!
//! Everything on the boundary circle lives here: finite sums `Σ c_n Z^n` with
//! n ranging over the integers, stored sparsely in canonical form (no explicit
//! zero coefficients). The conjugate of such a sum *on the circle* is again a
//! Laurent polynomial — `conj(Z) = Z^-1` — which is what [`LaurentPoly::circle_conj`]
//! computes, and what makes exact certification of boundary identities possible.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::scalar::Coeff;

#[derive(Clone, PartialEq)]
pub struct LaurentPoly<S: Coeff> {
    terms: BTreeMap<i64, S>,
}

impl<S: Coeff> LaurentPoly<S> {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i64, c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        LaurentPoly { terms }
    }

    /// `1 - Z`, the ubiquitous boundary factor.
    pub fn one_minus_zeta() -> Self {
        Self::from_terms([(0, S::one()), (1, S::from_i64(-1))])
    }

    /// Builds from (exponent, coefficient) pairs, summing duplicates.
    pub fn from_terms(pairs: impl IntoIterator<Item = (i64, S)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in pairs {
            p.add_term(e, &c);
        }
        p
    }

    fn add_term(&mut self, exp: i64, c: &S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(slot) => {
                let s = slot.add(c);
                if s.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *slot = s;
                }
            }
            None => {
                self.terms.insert(exp, c.clone());
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> S {
        self.terms.get(&exp).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &S)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in rhs.iter() {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in rhs.iter() {
            out.add_term(e, &c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (e, c) in self.iter() {
            out.add_term(e, &c.mul(s));
        }
        out
    }

    pub fn mul_monomial(&self, exp: i64, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (e, c) in self.iter() {
            out.add_term(e + exp, &c.mul(s));
        }
        out
    }

    /// Multiply by `Z^exp`.
    pub fn shift(&self, exp: i64) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e + exp, c.clone())).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in self.iter() {
            for (e2, c2) in rhs.iter() {
                out.add_term(e1 + e2, &c1.mul(c2));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        result
    }

    /// Conjugation restricted to the circle: `Σ c_n Z^n  ->  Σ conj(c_n) Z^-n`.
    pub fn circle_conj(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (-e, c.conj())).collect(),
        }
    }

    /// Conjugates coefficients without touching exponents. This is *not* the
    /// circle conjugate; it shows up when conjugation has already been pushed
    /// through symbolically and only the constants remain.
    pub fn conj_coeffs(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c.conj())).collect(),
        }
    }

    /// True when the polynomial is real-valued on the circle, i.e. equals its
    /// circle conjugate. Floats get a relative tolerance instead of equality.
    pub fn is_hermitian(&self) -> bool {
        if S::EXACT {
            return *self == self.circle_conj();
        }
        let diff = self.sub(&self.circle_conj());
        diff.linf_norm() <= 1e-9 * (1.0 + self.linf_norm())
    }

    pub fn to_float(&self) -> LaurentPoly<Complex64> {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c.to_c64())).collect(),
        }
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in self.iter() {
            acc += c.to_c64() * z.powi(e as i32);
        }
        acc
    }

    pub fn linf_norm(&self) -> f64 {
        self.iter().map(|(_, c)| c.to_c64().norm()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.iter().map(|(_, c)| c.to_c64().norm_sqr()).sum::<f64>().sqrt()
    }

    /// Long division by `d`, eliminating from the top exponent down. Returns
    /// `(q, r)` with `self = q*d + r`. The loop stops once further quotient
    /// terms would drop below `self.min_exp - d.min_exp`, which is where the
    /// quotient of an *exact* division must end; so divisibility is exactly
    /// `r == 0` (exact scalars) or `r` negligible (floats — caller's call).
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let (d_top, d_bot) = match (d.max_exp(), d.min_exp()) {
            (Some(t), Some(b)) => (t, b),
            _ => panic!("division by zero polynomial"),
        };
        let d_lead = d.coeff(d_top);
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let q_floor = match self.min_exp() {
            Some(m) => m - d_bot,
            None => return (Self::zero(), Self::zero()),
        };
        while let Some(r_top) = rem.max_exp() {
            let q_exp = r_top - d_top;
            if q_exp < q_floor {
                break;
            }
            let q_c = rem.coeff(r_top).div(&d_lead);
            quot.add_term(q_exp, &q_c);
            rem = rem.sub(&d.mul_monomial(q_exp, &q_c));
        }
        (quot, rem)
    }

    /// Exact quotient, or `None` if `d` does not divide `self`. Only
    /// meaningful on the exact backend; float callers want [`Self::div_rem`]
    /// plus their own remainder tolerance.
    pub fn divide_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Order of vanishing at the boundary point 1: the largest `m` such that
    /// `(1 - Z)^m` divides. `None` for the zero polynomial. Exact scalars
    /// divide exactly; floats accept a remainder below `1e-9` of the original
    /// size.
    pub fn order_at_one(&self) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let omz = Self::one_minus_zeta();
        let scale = self.linf_norm();
        let mut cur = self.clone();
        let mut order = 0;
        loop {
            let (q, r) = cur.div_rem(&omz);
            let divides = if S::EXACT {
                r.is_zero()
            } else {
                r.linf_norm() <= 1e-9 * scale
            };
            if !divides || q.is_zero() {
                return Some(order);
            }
            cur = q;
            order += 1;
        }
    }
}

/// Holomorphic extension of a real boundary function: given a Hermitian
/// `p = Σ u_n Z^n` (so `u_{-n} = conj(u_n)`), returns the polynomial
/// `H = u_0 + 2 Σ_{n>=1} u_n Z^n`, the unique holomorphic function with
/// `Re H = p` on the circle and `Im H(0) = 0`.
pub fn riesz_holo<S: Coeff>(p: &LaurentPoly<S>) -> LaurentPoly<S> {
    assert!(p.is_hermitian(), "riesz_holo input is not real on the circle");
    let two = S::from_i64(2);
    let mut out = LaurentPoly::zero();
    for (e, c) in p.iter() {
        if e == 0 {
            // Hermitian forces u_0 real; averaging kills float dust.
            out.add_term(0, &c.add(&c.conj()).div(&two));
        } else if e > 0 {
            out.add_term(e, &c.mul(&two));
        }
    }
    out
}

impl<S: Coeff> fmt::Display for LaurentPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "({})", c)?,
                1 => write!(f, "({})*Z", c)?,
                _ => write!(f, "({})*Z^{}", c, e)?,
            }
        }
        Ok(())
    }
}

impl<S: Coeff> fmt::Debug for LaurentPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
