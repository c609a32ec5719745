//! Model and perturbation generators: the worked reference pair plus seeded
//! random families for property-style tests and demos.

use rand::Rng;

use crate::expr::{CPoly, W1, Z1};
use crate::laurent::LaurentPoly;
use crate::model::{HomogPoly, Model, Perturbation};
use crate::scalar::{Coeff, GRat};
use crate::winding::winding_exact;

/// The worked example used throughout: `P_1 = |z1|^4`, `P_2 = |z2|^6`,
/// conormal scales `(1/2, 1/3)`. Everything about it is known in closed form.
pub fn quartic_sextic() -> Model<GRat> {
    let p1 = HomogPoly::new(4, 2, [(2, GRat::from_int(1))]).unwrap();
    let p2 = HomogPoly::new(6, 3, [(3, GRat::from_int(1))]).unwrap();
    Model::new(p1, p2, [GRat::from_ratio(1, 2), GRat::from_ratio(1, 3)]).unwrap()
}

fn random_rational(rng: &mut impl Rng) -> GRat {
    GRat::from_ratio(rng.gen_range(-4i64..=4), rng.gen_range(1i64..=3))
}

fn random_complex(rng: &mut impl Rng) -> GRat {
    GRat::from_parts(
        rng.gen_range(-4i64..=4),
        rng.gen_range(1i64..=3),
        rng.gen_range(-4i64..=4),
        rng.gen_range(1i64..=3),
    )
}

fn random_homog(rng: &mut impl Rng, d: u32, k: u32) -> HomogPoly<GRat> {
    loop {
        let lo = d.div_ceil(2);
        let mut upper = vec![];
        for j in lo..=k {
            let a = if 2 * j == d { random_rational(rng) } else { random_complex(rng) };
            upper.push((j, a));
        }
        // top coefficient must survive
        if upper.last().map(|(_, a)| a.is_zero()).unwrap_or(true) {
            continue;
        }
        if let Ok(p) = HomogPoly::new(d, k, upper) {
            return p;
        }
    }
}

/// A structurally valid model: admissible (d, k) pairs, Hermitian coefficient
/// bands, real nonzero scales. Degrees are drawn even — an odd-degree equation
/// can never satisfy the trace-nondegeneracy hypothesis (its mixed second
/// derivative is an odd-degree real homogeneous function, which must change
/// sign on the circle), so odd degrees would starve the downstream samplers.
pub fn random_model(rng: &mut impl Rng) -> Model<GRat> {
    loop {
        let mut pk = |max_d: u32| {
            let d = 2 * rng.gen_range(1..=max_d / 2);
            let k = rng.gen_range(d / 2..=d - 1);
            random_homog(rng, d, k)
        };
        let p1 = pk(6);
        let p2 = pk(6);
        let c = [(); 2].map(|_| loop {
            let c = random_rational(rng);
            if !c.is_zero() {
                break c;
            }
        });
        if let Ok(m) = Model::new(p1, p2, c) {
            return m;
        }
    }
}

/// The trace-nondegeneracy certificate for one equation: the reduced mixed
/// second derivative along the initial disc,
/// `u(Z) = sum_j j (d-j) alpha_j (-1)^{j-1} Z^{j-1}`,
/// must not vanish on the circle.
pub fn trace_nondegenerate(p: &HomogPoly<GRat>) -> bool {
    let mut u = LaurentPoly::zero();
    for (j, a) in p.coeffs() {
        if j == 0 || j == p.d {
            continue;
        }
        let sign = if j % 2 == 1 { 1 } else { -1 };
        let factor = GRat::from_int(sign * (j as i64) * ((p.d - j) as i64));
        u = u.add(&LaurentPoly::monomial(j as i64 - 1, a.mul(&factor)));
    }
    winding_exact(&u).is_ok()
}

/// A model passing the trace-nondegeneracy hypothesis in both equations
/// (rejection-sampled; even degrees make this terminate fast).
pub fn random_nondegenerate_model(rng: &mut impl Rng) -> Model<GRat> {
    loop {
        let m = random_model(rng);
        if trace_nondegenerate(&m.p[0]) && trace_nondegenerate(&m.p[1]) {
            return m;
        }
    }
}

/// Random admissible perturbation: a few ambient monomials per equation with
/// weighted order a little above the threshold.
pub fn random_perturbation(rng: &mut impl Rng, degrees: [u32; 2]) -> Perturbation<GRat> {
    let raw: [CPoly<GRat>; 2] = std::array::from_fn(|l| {
        let mut t = CPoly::zero();
        for _ in 0..rng.gen_range(1..=2) {
            let target = degrees[l] + rng.gen_range(1..=3);
            let mut budget = target;
            let mut mono = CPoly::one();
            // maybe spend d_m of the budget on one w factor
            for m in 0..2 {
                if budget > degrees[m] && rng.gen_bool(0.3) {
                    mono = mono.mul(&CPoly::var(W1 + m));
                    budget -= degrees[m];
                }
            }
            // spend the rest on z-variables, conjugated or not
            while budget > 0 {
                let i = Z1 + rng.gen_range(0..2);
                mono = mono.mul(&if rng.gen_bool(0.5) { CPoly::var(i) } else { CPoly::cvar(i) });
                budget -= 1;
            }
            t = t.add(&mono.scale(&random_complex(rng)));
        }
        t
    });
    Perturbation::from_raw(raw, degrees).unwrap_or_else(|_| Perturbation::none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_produce_valid_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9a);
        for _ in 0..30 {
            let m = random_model(&mut rng);
            for l in 0..2 {
                let (d, k) = (m.p[l].d, m.p[l].k);
                assert!(d % 2 == 0 && 2 * k >= d && k <= d - 1);
                assert!(!m.p[l].alpha(k).is_zero());
            }
            let pert = random_perturbation(&mut rng, m.degrees());
            for t in &pert.theta {
                assert!(t.is_formally_real());
            }
        }
    }

    #[test]
    fn nondegenerate_filter_accepts_reference_pair() {
        let m = quartic_sextic();
        assert!(trace_nondegenerate(&m.p[0]));
        assert!(trace_nondegenerate(&m.p[1]));
        let mut rng = ChaCha8Rng::seed_from_u64(0x9b);
        for _ in 0..10 {
            let m = random_nondegenerate_model(&mut rng);
            assert!(trace_nondegenerate(&m.p[0]) && trace_nondegenerate(&m.p[1]));
        }
    }
}
