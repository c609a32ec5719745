//! Decoupled two-codimensional models and their conormal boundary systems.
//!
//! A model is a pair of real scalar equations `Re w_l = P_l(z_l, conj z_l)`,
//! each `P_l` a Hermitian-symmetric bihomogeneous polynomial of degree `d_l`
//! whose holomorphic z-power runs up to `k_l` (so `d_l/2 <= k_l <= d_l - 1`).
//! Perturbed manifolds add weighted-higher-order real terms. The conormal
//! system below encodes, as eight real polynomial equations on the jet
//! variables, the requirement that a disc boundary stays on the manifold and
//! that the fiber components trace a (positively scaled) conormal direction —
//! the geometric content of stationarity.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{CPoly, Mono, NVARS, W1, W2, Z1, Z2, ZT1, WT1};
use crate::laurent::LaurentPoly;
use crate::scalar::Coeff;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("need d/2 <= k <= d-1, got d={d}, k={k}")]
    DegreeRange { d: u32, k: u32 },
    #[error("coefficient index {j} outside the band [{lo}, {hi}]")]
    CoefficientRange { j: u32, lo: u32, hi: u32 },
    #[error("top coefficient (index k={k}) must be nonzero")]
    TopCoefficientZero { k: u32 },
    #[error("middle coefficient (index d/2) must be real")]
    MiddleNotReal,
    #[error("conormal scale c_{l} must be real and nonzero")]
    BadScale { l: usize },
    #[error("perturbation term uses a fiber variable")]
    PerturbationUsesFiber,
    #[error("perturbation monomial has weighted order {got}, need at least {need}")]
    PerturbationWeight { got: u32, need: u32 },
}

/// Hermitian bihomogeneous polynomial: `sum_j alpha_j z^j conj(z)^{d-j}` over
/// `d-k <= j <= k`, with `alpha_{d-j} = conj(alpha_j)` so values are real.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogPoly<S: Coeff> {
    pub d: u32,
    pub k: u32,
    alpha: BTreeMap<u32, S>,
}

impl<S: Coeff> HomogPoly<S> {
    /// Builds from the upper-half coefficients: `alpha_j` for `ceil(d/2) <= j <= k`.
    /// The lower half is forced by Hermitian symmetry.
    pub fn new(d: u32, k: u32, upper: impl IntoIterator<Item = (u32, S)>) -> Result<Self, ModelError> {
        if !(2 * k >= d && k <= d.saturating_sub(1) && d >= 2) {
            return Err(ModelError::DegreeRange { d, k });
        }
        let lo = d.div_ceil(2);
        let mut alpha = BTreeMap::new();
        for (j, a) in upper {
            if j < lo || j > k {
                return Err(ModelError::CoefficientRange { j, lo, hi: k });
            }
            if a.is_zero() {
                continue;
            }
            if 2 * j == d && a.conj() != a {
                return Err(ModelError::MiddleNotReal);
            }
            if 2 * j != d {
                alpha.insert(d - j, a.conj());
            }
            alpha.insert(j, a);
        }
        if !alpha.contains_key(&k) {
            return Err(ModelError::TopCoefficientZero { k });
        }
        Ok(HomogPoly { d, k, alpha })
    }

    pub fn alpha(&self, j: u32) -> S {
        self.alpha.get(&j).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (u32, &S)> + '_ {
        self.alpha.iter().map(|(j, a)| (*j, a))
    }

    /// The polynomial as an expression in variable `var` and its conjugate.
    pub fn cpoly(&self, var: usize) -> CPoly<S> {
        let mut out = CPoly::zero();
        for (&j, a) in &self.alpha {
            out = out.add(&CPoly::var_power(var, j as u8, (self.d - j) as u8).scale(a));
        }
        out
    }

    pub fn to_float(&self) -> HomogPoly<num_complex::Complex64> {
        HomogPoly {
            d: self.d,
            k: self.k,
            alpha: self.alpha.iter().map(|(j, a)| (*j, a.to_c64())).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model<S: Coeff> {
    pub p: [HomogPoly<S>; 2],
    /// Conormal scales: the real nonzero weights combining the two gradients.
    pub c: [S; 2],
}

impl<S: Coeff> Model<S> {
    pub fn new(p1: HomogPoly<S>, p2: HomogPoly<S>, c: [S; 2]) -> Result<Self, ModelError> {
        for (l, cl) in c.iter().enumerate() {
            if cl.is_zero() || cl.conj() != *cl {
                return Err(ModelError::BadScale { l: l + 1 });
            }
        }
        Ok(Model { p: [p1, p2], c })
    }

    pub fn k0(&self) -> u32 {
        self.p[0].k.max(self.p[1].k)
    }

    pub fn degrees(&self) -> [u32; 2] {
        [self.p[0].d, self.p[1].d]
    }

    pub fn to_float(&self) -> Model<num_complex::Complex64> {
        Model {
            p: [self.p[0].to_float(), self.p[1].to_float()],
            c: [self.c[0].to_c64(), self.c[1].to_c64()],
        }
    }
}

/// Real higher-order terms added to the two defining equations. Stored
/// already realified; construction symmetrizes and validates weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation<S: Coeff> {
    pub theta: [CPoly<S>; 2],
}

/// Weighted order: z-variables weigh 1, each power of `w_m` weighs `d_m`.
fn weighted_order(m: &Mono, degrees: [u32; 2]) -> u32 {
    let zsum = (m.v[Z1] + m.c[Z1] + m.v[Z2] + m.c[Z2]) as u32;
    let w1 = (m.v[W1] + m.c[W1]) as u32;
    let w2 = (m.v[W2] + m.c[W2]) as u32;
    zsum + w1 * degrees[0] + w2 * degrees[1]
}

impl<S: Coeff> Perturbation<S> {
    pub fn none() -> Self {
        Perturbation { theta: [CPoly::zero(), CPoly::zero()] }
    }

    pub fn is_zero(&self) -> bool {
        self.theta[0].is_zero() && self.theta[1].is_zero()
    }

    /// `raw[l]` is an arbitrary ambient polynomial; the stored term is
    /// `Re(raw[l])`, and every monomial must have weighted order > d_l.
    pub fn from_raw(raw: [CPoly<S>; 2], degrees: [u32; 2]) -> Result<Self, ModelError> {
        for (l, t) in raw.iter().enumerate() {
            for (m, _) in t.iter() {
                if (ZT1..NVARS).any(|i| m.v[i] > 0 || m.c[i] > 0) {
                    return Err(ModelError::PerturbationUsesFiber);
                }
                let w = weighted_order(m, degrees);
                if w < degrees[l] + 1 {
                    return Err(ModelError::PerturbationWeight { got: w, need: degrees[l] + 1 });
                }
            }
        }
        Ok(Perturbation {
            theta: [raw[0].real_part(), raw[1].real_part()],
        })
    }

    pub fn to_float(&self) -> Perturbation<num_complex::Complex64> {
        Perturbation {
            theta: [self.theta[0].to_float(), self.theta[1].to_float()],
        }
    }
}

/// The eight real boundary equations whose common zero locus is the conormal
/// lift condition, polynomial in all jet variables and the circle parameter.
pub struct ConormalSystem<S: Coeff> {
    pub eqs: [CPoly<S>; 8],
    pub k0: u32,
    /// The defining functions `r_1, r_2` the system was built from.
    pub r: [CPoly<S>; 2],
}

/// Builds the conormal system for `model` perturbed by `eps * pert`.
///
/// The fiber scales are eliminated polynomially: with `V[l][m]` the Wirtinger
/// `w_m`-gradient matrix of the defining functions, `delta = det V^T`, and
/// `mu_m = wt_m Z^{-k0}`, the candidate scales are `ct = adj(V^T) mu`. The
/// equations multiply the conormal conditions through by `4 delta` (and the
/// reality conditions by `8 conj(delta)`), which changes nothing where
/// `delta != 0` (at the model point `V = I/2`, `delta = 1/4`) and normalizes
/// the zero-perturbation limit to equal the plain model system exactly.
pub fn conormal_system<S: Coeff>(
    model: &Model<S>,
    pert: &Perturbation<S>,
    eps: &S,
) -> ConormalSystem<S> {
    let k0 = model.k0();
    let half = S::one().div(&S::from_i64(2));
    let four = S::from_i64(4);
    let eight = S::from_i64(8);
    let i = S::i();

    // defining functions r_l = Re(w_l) - P_l - eps * theta_l
    let r: [CPoly<S>; 2] = std::array::from_fn(|l| {
        CPoly::var(W1 + l)
            .add(&CPoly::cvar(W1 + l))
            .scale(&half)
            .sub(&model.p[l].cpoly(Z1 + l))
            .sub(&pert.theta[l].scale(eps))
    });

    // V[l][m] = d r_l / d w_m
    let v: [[CPoly<S>; 2]; 2] = std::array::from_fn(|l| std::array::from_fn(|m| r[l].d_var(W1 + m)));
    // delta = det V^T = det V
    let delta = v[0][0].mul(&v[1][1]).sub(&v[1][0].mul(&v[0][1]));
    // mu_m = wt_m Z^{-k0}
    let mu: [CPoly<S>; 2] = std::array::from_fn(|m| {
        CPoly::var(WT1 + m).scale_poly(&LaurentPoly::monomial(-(k0 as i64), S::one()))
    });
    // ct = adj(V^T) mu; adj([[a,c],[b,d]]) = [[d,-c],[-b,a]] for V^T[m][l] = V[l][m]
    let ct: [CPoly<S>; 2] = [
        v[1][1].mul(&mu[0]).sub(&v[1][0].mul(&mu[1])),
        v[0][0].mul(&mu[1]).sub(&v[0][1].mul(&mu[0])),
    ];

    // tangency: e1, e2
    let e1 = r[0].clone();
    let e2 = r[1].clone();

    // z-conormal: E_m = 4 delta zt_m - 4 Z^{k0} sum_l ct_l d r_l / d z_m
    let zeta_k0 = LaurentPoly::monomial(k0 as i64, S::one());
    let e_m: [CPoly<S>; 2] = std::array::from_fn(|m| {
        let grad = ct[0]
            .mul(&r[0].d_var(Z1 + m))
            .add(&ct[1].mul(&r[1].d_var(Z1 + m)));
        CPoly::var(ZT1 + m)
            .mul(&delta)
            .scale(&four)
            .sub(&grad.scale_poly(&zeta_k0).scale(&four))
    });
    let e3 = e_m[0].add(&e_m[0].fcc());
    let e4 = e_m[0].sub(&e_m[0].fcc()).scale(&i);
    let e5 = e_m[1].add(&e_m[1].fcc());
    let e6 = e_m[1].sub(&e_m[1].fcc()).scale(&i);

    // reality of the recovered scales: N_l = 8 ct_l conj(delta)
    let delta_conj = delta.fcc();
    let n: [CPoly<S>; 2] = std::array::from_fn(|l| ct[l].mul(&delta_conj).scale(&eight));
    let e7 = n[0].sub(&n[0].fcc()).scale(&i);
    let e8 = n[1].sub(&n[1].fcc()).scale(&i);

    ConormalSystem {
        eqs: [e1, e2, e3, e4, e5, e6, e7, e8],
        k0,
        r,
    }
}
