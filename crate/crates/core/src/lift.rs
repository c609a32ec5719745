//! The explicit initial disc and its conormal lift, with certification.
//!
//! For the unperturbed model there is a closed-form stationary disc: both
//! z-components are `1 - Z`, the w-components are the holomorphic extensions
//! of the boundary traces of the two defining polynomials (normalized to
//! vanish at `Z = 1`), and the fiber components come from scaling the conormal
//! gradient by `Z^{k0}`. Certification is literal: evaluate all eight boundary
//! equations along the disc and demand exact zero (or float dust).

use num_complex::Complex64;

use crate::expr::{NVARS, W1, Z1, ZT1, WT1};
use crate::laurent::{riesz_holo, LaurentPoly};
use crate::model::{ConormalSystem, Model};
use crate::scalar::Coeff;

/// An analytic disc in the cotangent jet space: eight boundary components,
/// indexed like the expression variables (`z1, z2, w1, w2, zt1, zt2, wt1, wt2`).
#[derive(Clone, Debug, PartialEq)]
pub struct Disc<S: Coeff> {
    pub comps: [LaurentPoly<S>; NVARS],
}

impl<S: Coeff> Disc<S> {
    pub fn to_float(&self) -> Disc<Complex64> {
        Disc {
            comps: std::array::from_fn(|i| self.comps[i].to_float()),
        }
    }

    /// Residuals of a boundary system along this disc, one Laurent polynomial
    /// per equation; the disc satisfies the system iff all eight vanish.
    pub fn residuals(&self, sys: &ConormalSystem<S>) -> [LaurentPoly<S>; 8] {
        std::array::from_fn(|i| sys.eqs[i].eval(&self.comps))
    }

    /// Largest power of `(1 - Z)` dividing each component.
    pub fn orders_at_one(&self) -> [Option<u32>; NVARS] {
        std::array::from_fn(|i| self.comps[i].order_at_one())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StationarityCertificate {
    /// Exact backend: all residuals are identically zero.
    pub exact_zero: bool,
    /// Largest residual coefficient magnitude across all eight equations.
    pub residual_linf: f64,
    pub per_equation: [f64; 8],
}

pub fn certify_stationary<S: Coeff>(disc: &Disc<S>, sys: &ConormalSystem<S>) -> StationarityCertificate {
    let res = disc.residuals(sys);
    let per_equation: [f64; 8] = std::array::from_fn(|i| res[i].linf_norm());
    StationarityCertificate {
        exact_zero: S::EXACT && res.iter().all(|r| r.is_zero()),
        residual_linf: per_equation.iter().cloned().fold(0.0, f64::max),
        per_equation,
    }
}

/// The closed-form stationary disc of the unperturbed model.
///
/// Components: `z_l = 1 - Z`; `w_l` = holomorphic extension of the boundary
/// trace of `P_l` shifted by a purely imaginary constant so `w_l(1) = 0`;
/// `zt_l = -c_l Z^{k0} (dP_l/dz_l)(1-Z, 1-conj Z)`; `wt_l = (c_l/2) Z^{k0}`.
pub fn initial_lift<S: Coeff>(model: &Model<S>) -> Disc<S> {
    let k0 = model.k0() as i64;
    let omz = LaurentPoly::<S>::one_minus_zeta();
    let two = S::from_i64(2);

    let mut comps: [LaurentPoly<S>; NVARS] = std::array::from_fn(|_| LaurentPoly::zero());
    comps[Z1] = omz.clone();
    comps[Z1 + 1] = omz;

    for l in 0..2 {
        let p = model.p[l].cpoly(Z1 + l);

        // w_l: Re(w_l) = P_l on the boundary, pinned to 0 at Z = 1. The
        // extension already has Im w_l(0) = 0; subtracting i Im(w_l(1)) (a
        // constant that exists iff the coefficients are not all real) moves the
        // pin to the boundary point without changing the real part.
        let trace = p.eval(&comps);
        let mut g = riesz_holo(&trace);
        let at_one = g.iter().fold(S::zero(), |acc, (_, c)| acc.add(c));
        let imag_const = at_one.sub(&at_one.conj()).div(&two); // = i Im(g(1))
        g = g.sub(&LaurentPoly::monomial(0, imag_const));
        comps[W1 + l] = g;

        // fiber components from the conormal gradient
        let pz_trace = p.d_var(Z1 + l).eval(&comps);
        comps[ZT1 + l] = pz_trace.mul_monomial(k0, &model.c[l].neg());
        comps[WT1 + l] = LaurentPoly::monomial(k0, model.c[l].div(&two));
    }
    Disc { comps }
}

/// Initial-disc data bundled for reporting: the disc, its certificate against
/// the unperturbed system, and the vanishing orders at the boundary point.
pub struct InitialLiftReport<S: Coeff> {
    pub disc: Disc<S>,
    pub certificate: StationarityCertificate,
    pub orders_at_one: [Option<u32>; NVARS],
}

pub fn build_and_certify<S: Coeff>(model: &Model<S>) -> InitialLiftReport<S> {
    use crate::model::{conormal_system, Perturbation};
    let disc = initial_lift(model);
    let sys = conormal_system(model, &Perturbation::none(), &S::zero());
    let certificate = certify_stationary(&disc, &sys);
    let orders_at_one = disc.orders_at_one();
    InitialLiftReport { disc, certificate, orders_at_one }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::CPoly;
    use crate::model::{conormal_system, Perturbation};
    use crate::samples;
    use crate::scalar::GRat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gr(n: i64, d: i64) -> GRat {
        GRat::from_ratio(n, d)
    }

    #[test]
    fn reference_pair_closed_forms() {
        let model = samples::quartic_sextic();
        let disc = initial_lift(&model);
        let omz = LaurentPoly::<GRat>::one_minus_zeta();

        // w-extensions of |1-Z|^4 and |1-Z|^6
        assert_eq!(
            disc.comps[W1],
            LaurentPoly::from_terms([(0, gr(6, 1)), (1, gr(-8, 1)), (2, gr(2, 1))])
        );
        assert_eq!(
            disc.comps[W1 + 1],
            LaurentPoly::from_terms([
                (0, gr(20, 1)),
                (1, gr(-30, 1)),
                (2, gr(12, 1)),
                (3, gr(-2, 1)),
            ])
        );
        // zt1 = -Z(1-Z)^3, zt2 = (1-Z)^5
        assert_eq!(disc.comps[ZT1], omz.pow(3).mul_monomial(1, &gr(-1, 1)));
        assert_eq!(disc.comps[ZT1 + 1], omz.pow(5));
        // wt = (Z^3/4, Z^3/6)
        assert_eq!(disc.comps[WT1], LaurentPoly::monomial(3, gr(1, 4)));
        assert_eq!(disc.comps[WT1 + 1], LaurentPoly::monomial(3, gr(1, 6)));
    }

    #[test]
    fn reference_pair_is_exactly_stationary() {
        let model = samples::quartic_sextic();
        let rep = build_and_certify(&model);
        assert!(rep.certificate.exact_zero);
        assert_eq!(rep.certificate.residual_linf, 0.0);
        // boundary vanishing orders: z to 1, zt to d_l - 1
        assert_eq!(rep.orders_at_one[Z1], Some(1));
        assert_eq!(rep.orders_at_one[ZT1], Some(3));
        assert_eq!(rep.orders_at_one[ZT1 + 1], Some(5));
        // wt components do not vanish at 1
        assert_eq!(rep.orders_at_one[WT1], Some(0));
    }

    #[test]
    fn random_models_are_exactly_stationary() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5417);
        for trial in 0..40 {
            let model = samples::random_model(&mut rng);
            let rep = build_and_certify(&model);
            assert!(
                rep.certificate.exact_zero,
                "trial {trial}: residuals nonzero for {:?}",
                model
            );
            for l in 0..2 {
                assert_eq!(
                    rep.orders_at_one[ZT1 + l],
                    Some(model.p[l].d - 1),
                    "trial {trial}: fiber order wrong"
                );
                assert_eq!(rep.orders_at_one[Z1 + l], Some(1));
                // w vanishes at 1 (that is what the imaginary shift buys)
                let w = &rep.disc.comps[W1 + l];
                let at_one = w.iter().fold(GRat::zero(), |acc, (_, c)| acc.add(c));
                assert!(at_one.is_zero(), "trial {trial}: w_l(1) = {at_one}");
            }
        }
    }

    #[test]
    fn float_backend_matches() {
        let model = samples::quartic_sextic().to_float();
        let disc = initial_lift(&model);
        let sys = conormal_system(&model, &Perturbation::none(), &num_complex::Complex64::new(0.0, 0.0));
        let cert = certify_stationary(&disc, &sys);
        assert!(cert.residual_linf < 1e-12, "float residual {}", cert.residual_linf);
    }

    #[test]
    fn perturbed_system_sees_nonzero_residual() {
        // the initial disc solves the model system, not the perturbed one;
        // a perturbation of weighted order d+1 whose trace survives must show up
        let model = samples::quartic_sextic();
        let raw = [CPoly::<GRat>::var(Z1).pow(5), CPoly::zero()];
        let pert = Perturbation::from_raw(raw, model.degrees()).unwrap();
        let disc = initial_lift(&model);
        let sys = conormal_system(&model, &pert, &gr(1, 100));
        let res = disc.residuals(&sys);
        assert!(res.iter().any(|r| !r.is_zero()));
    }
}
