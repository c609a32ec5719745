//! Polynomial expressions in the eight jet variables and their conjugates,
//! with Laurent-polynomial coefficients in the circle parameter.
//!
//! The boundary conditions cutting out conormal lifts are real polynomials in
//! `z_1, z_2, w_1, w_2` (ambient) and `zt_1, zt_2, wt_1, wt_2` (fiber), their
//! conjugates, and the circle variable `Z`. Representing them symbolically
//! buys two things: Wirtinger derivatives for the boundary linearization come
//! from the same object that defines the equations (no hand-copied matrices),
//! and evaluation along a disc boundary — substituting each variable by a
//! Laurent polynomial and each conjugate by its circle conjugate — produces the
//! exact residues that certify stationarity.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::laurent::LaurentPoly;
use crate::scalar::Coeff;

pub const NVARS: usize = 8;

// variable indices
pub const Z1: usize = 0;
pub const Z2: usize = 1;
pub const W1: usize = 2;
pub const W2: usize = 3;
pub const ZT1: usize = 4;
pub const ZT2: usize = 5;
pub const WT1: usize = 6;
pub const WT2: usize = 7;

pub const VAR_NAMES: [&str; NVARS] = ["z1", "z2", "w1", "w2", "zt1", "zt2", "wt1", "wt2"];

/// A monomial: exponents of the eight variables and of their conjugates.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Mono {
    pub v: [u8; NVARS],
    pub c: [u8; NVARS],
}

impl Mono {
    pub const ONE: Mono = Mono { v: [0; NVARS], c: [0; NVARS] };

    fn mul(&self, rhs: &Mono) -> Mono {
        let mut out = *self;
        for i in 0..NVARS {
            out.v[i] += rhs.v[i];
            out.c[i] += rhs.c[i];
        }
        out
    }

    /// Swap each variable with its conjugate.
    fn swapped(&self) -> Mono {
        Mono { v: self.c, c: self.v }
    }

    pub fn total_degree(&self) -> u32 {
        self.v.iter().chain(self.c.iter()).map(|&e| e as u32).sum()
    }
}

#[derive(Clone, PartialEq)]
pub struct CPoly<S: Coeff> {
    terms: BTreeMap<Mono, LaurentPoly<S>>,
}

impl<S: Coeff> CPoly<S> {
    pub fn zero() -> Self {
        CPoly { terms: BTreeMap::new() }
    }

    pub fn constant(p: LaurentPoly<S>) -> Self {
        let mut out = Self::zero();
        out.add_term(Mono::ONE, &p);
        out
    }

    pub fn scalar(s: S) -> Self {
        Self::constant(LaurentPoly::constant(s))
    }

    pub fn one() -> Self {
        Self::scalar(S::one())
    }

    pub fn var(i: usize) -> Self {
        let mut m = Mono::ONE;
        m.v[i] = 1;
        let mut out = Self::zero();
        out.add_term(m, &LaurentPoly::one());
        out
    }

    pub fn cvar(i: usize) -> Self {
        let mut m = Mono::ONE;
        m.c[i] = 1;
        let mut out = Self::zero();
        out.add_term(m, &LaurentPoly::one());
        out
    }

    /// `z_i^a * conj(z_i)^b` as a building block.
    pub fn var_power(i: usize, a: u8, b: u8) -> Self {
        let mut m = Mono::ONE;
        m.v[i] = a;
        m.c[i] = b;
        let mut out = Self::zero();
        out.add_term(m, &LaurentPoly::one());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &LaurentPoly<S>)> + '_ {
        self.terms.iter()
    }

    pub fn coeff_of(&self, m: &Mono) -> LaurentPoly<S> {
        self.terms.get(m).cloned().unwrap_or_else(LaurentPoly::zero)
    }

    fn add_term(&mut self, m: Mono, p: &LaurentPoly<S>) {
        if p.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                let s = slot.add(p);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *slot = s;
                }
            }
            None => {
                self.terms.insert(m, p.clone());
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, p) in rhs.iter() {
            out.add_term(*m, p);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, p) in rhs.iter() {
            out.add_term(*m, &p.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        CPoly {
            terms: self.terms.iter().map(|(m, p)| (*m, p.neg())).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, p1) in self.iter() {
            for (m2, p2) in rhs.iter() {
                out.add_term(m1.mul(m2), &p1.mul(p2));
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

    /// Multiply through by a circle-parameter polynomial.
    pub fn scale_poly(&self, p: &LaurentPoly<S>) -> Self {
        if p.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (m, q) in self.iter() {
            out.add_term(*m, &q.mul(p));
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        self.scale_poly(&LaurentPoly::constant(s.clone()))
    }

    /// Wirtinger partial with respect to variable `i`.
    pub fn d_var(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (m, p) in self.iter() {
            let e = m.v[i];
            if e == 0 {
                continue;
            }
            let mut m2 = *m;
            m2.v[i] -= 1;
            out.add_term(m2, &p.scale(&S::from_i64(e as i64)));
        }
        out
    }

    /// Wirtinger partial with respect to the conjugate of variable `i`.
    pub fn d_cvar(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (m, p) in self.iter() {
            let e = m.c[i];
            if e == 0 {
                continue;
            }
            let mut m2 = *m;
            m2.c[i] -= 1;
            out.add_term(m2, &p.scale(&S::from_i64(e as i64)));
        }
        out
    }

    /// Formal conjugation on the circle: swaps every variable with its
    /// conjugate and circle-conjugates the coefficients, so that evaluating
    /// along a disc boundary commutes with pointwise conjugation.
    pub fn fcc(&self) -> Self {
        CPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, p)| (m.swapped(), p.circle_conj()))
                .collect(),
        }
    }

    /// Real-valued on every disc boundary?
    pub fn is_formally_real(&self) -> bool {
        *self == self.fcc()
    }

    /// `(self + fcc(self)) / 2`: the realification used for defining equations.
    pub fn real_part(&self) -> Self {
        let half = S::one().div(&S::from_i64(2));
        self.add(&self.fcc()).scale(&half)
    }

    /// Substitute variable `i` by `comps[i]` and its conjugate by the circle
    /// conjugate of `comps[i]` — the boundary trace along a disc.
    pub fn eval(&self, comps: &[LaurentPoly<S>; NVARS]) -> LaurentPoly<S> {
        let conj: Vec<LaurentPoly<S>> = comps.iter().map(|p| p.circle_conj()).collect();
        let mut acc = LaurentPoly::zero();
        for (m, p) in self.iter() {
            let mut prod = p.clone();
            for i in 0..NVARS {
                for _ in 0..m.v[i] {
                    prod = prod.mul(&comps[i]);
                }
                for _ in 0..m.c[i] {
                    prod = prod.mul(&conj[i]);
                }
            }
            acc = acc.add(&prod);
        }
        acc
    }

    pub fn to_float(&self) -> CPoly<Complex64> {
        CPoly {
            terms: self.terms.iter().map(|(m, p)| (*m, p.to_float())).collect(),
        }
    }

    /// Numeric evaluation at one boundary point: variable `i` takes the value
    /// `vals[i]`, its conjugate takes `conj(vals[i])`, and the circle
    /// parameter takes `zeta`. Consistent with [`CPoly::eval`] when `vals`
    /// are boundary values of the substituted disc and `|zeta| = 1`.
    pub fn eval_at(&self, vals: &[Complex64; NVARS], zeta: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, p) in self.iter() {
            let mut prod = p.eval_c64(zeta);
            for i in 0..NVARS {
                if m.v[i] > 0 {
                    prod *= vals[i].powi(m.v[i] as i32);
                }
                if m.c[i] > 0 {
                    prod *= vals[i].conj().powi(m.c[i] as i32);
                }
            }
            acc += prod;
        }
        acc
    }

    /// Largest total degree over all monomials (0 for the zero polynomial).
    pub fn max_total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }
}

impl<S: Coeff> fmt::Display for CPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, p) in self.iter() {
            if !first {
                write!(f, "  +  ")?;
            }
            first = false;
            write!(f, "[{}]", p)?;
            for i in 0..NVARS {
                match m.v[i] {
                    0 => {}
                    1 => write!(f, " {}", VAR_NAMES[i])?,
                    e => write!(f, " {}^{}", VAR_NAMES[i], e)?,
                }
                match m.c[i] {
                    0 => {}
                    1 => write!(f, " ~{}", VAR_NAMES[i])?,
                    e => write!(f, " ~{}^{}", VAR_NAMES[i], e)?,
                }
            }
        }
        Ok(())
    }
}

impl<S: Coeff> fmt::Debug for CPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GRat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_cpoly(rng: &mut ChaCha8Rng) -> CPoly<GRat> {
        let mut p = CPoly::zero();
        for _ in 0..rng.gen_range(1..=5) {
            let mut m = Mono::ONE;
            for _ in 0..rng.gen_range(0..=3) {
                let i = rng.gen_range(0..NVARS);
                if rng.gen_bool(0.5) {
                    m.v[i] += 1;
                } else {
                    m.c[i] += 1;
                }
            }
            let coeff = LaurentPoly::from_terms([(
                rng.gen_range(-3i64..=3),
                GRat::from_parts(rng.gen_range(-4..=4), 1, rng.gen_range(-4..=4), 1),
            )]);
            p = p.add(&CPoly {
                terms: [(m, coeff)].into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            });
        }
        p
    }

    fn rand_disc(rng: &mut ChaCha8Rng) -> [LaurentPoly<GRat>; NVARS] {
        std::array::from_fn(|_| {
            LaurentPoly::from_terms((0..rng.gen_range(1..=3)).map(|_| {
                (
                    rng.gen_range(-2i64..=2),
                    GRat::from_parts(rng.gen_range(-3..=3), 1, rng.gen_range(-3..=3), 1),
                )
            }))
        })
    }

    #[test]
    fn ring_laws_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x11);
        for _ in 0..25 {
            let (a, b, c) = (rand_cpoly(&mut rng), rand_cpoly(&mut rng), rand_cpoly(&mut rng));
            assert_eq!(a.mul(&b), b.mul(&a));
            assert_eq!(a.mul(&b.mul(&c)), a.mul(&b).mul(&c));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            assert_eq!(a.sub(&a), CPoly::zero());
        }
    }

    #[test]
    fn wirtinger_product_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x22);
        for _ in 0..25 {
            let a = rand_cpoly(&mut rng);
            let b = rand_cpoly(&mut rng);
            let i = rng.gen_range(0..NVARS);
            let lhs = a.mul(&b).d_var(i);
            let rhs = a.d_var(i).mul(&b).add(&a.mul(&b.d_var(i)));
            assert_eq!(lhs, rhs);
            let lhs = a.mul(&b).d_cvar(i);
            let rhs = a.d_cvar(i).mul(&b).add(&a.mul(&b.d_cvar(i)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn wirtinger_basics() {
        for i in 0..NVARS {
            assert_eq!(CPoly::<GRat>::var(i).d_var(i), CPoly::one());
            assert_eq!(CPoly::<GRat>::var(i).d_cvar(i), CPoly::zero());
            assert_eq!(CPoly::<GRat>::cvar(i).d_cvar(i), CPoly::one());
            assert_eq!(CPoly::<GRat>::cvar(i).d_var(i), CPoly::zero());
        }
    }

    #[test]
    fn conjugation_commutes_with_boundary_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x33);
        for _ in 0..25 {
            let e = rand_cpoly(&mut rng);
            let f = rand_disc(&mut rng);
            assert_eq!(e.fcc().fcc(), e);
            assert_eq!(e.fcc().eval(&f), e.eval(&f).circle_conj());
            // realification really is real
            assert!(e.real_part().is_formally_real());
        }
    }

    #[test]
    fn trace_is_a_ring_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x44);
        for _ in 0..15 {
            let a = rand_cpoly(&mut rng);
            let b = rand_cpoly(&mut rng);
            let f = rand_disc(&mut rng);
            assert_eq!(a.mul(&b).eval(&f), a.eval(&f).mul(&b.eval(&f)));
            assert_eq!(a.add(&b).eval(&f), a.eval(&f).add(&b.eval(&f)));
        }
    }

    #[test]
    fn point_evaluation_agrees_with_symbolic_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x66);
        for _ in 0..10 {
            let e = rand_cpoly(&mut rng);
            let f = rand_disc(&mut rng);
            let traced = e.eval(&f).to_float();
            let ef = e.to_float();
            for g in 0..7 {
                let ang = 2.0 * std::f64::consts::PI * g as f64 / 7.0;
                let zeta = Complex64::new(ang.cos(), ang.sin());
                let vals: [Complex64; NVARS] = std::array::from_fn(|i| f[i].to_float().eval_c64(zeta));
                let direct = ef.eval_at(&vals, zeta);
                assert!(
                    (direct - traced.eval_c64(zeta)).norm() < 1e-9,
                    "point evaluation drifted from the symbolic trace"
                );
            }
        }
    }

    #[test]
    fn float_and_exact_traces_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x55);
        for _ in 0..10 {
            let e = rand_cpoly(&mut rng);
            let f = rand_disc(&mut rng);
            let exact = e.eval(&f).to_float();
            let ff: [LaurentPoly<Complex64>; NVARS] = std::array::from_fn(|i| f[i].to_float());
            let float = e.to_float().eval(&ff);
            // integer-valued data: must agree exactly
            assert_eq!(exact, float);
        }
    }
}
