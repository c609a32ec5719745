//! Numerical solver for the perturbed boundary system: Gauss-Newton iteration
//! on trigonometric-polynomial discs, with homotopy in the perturbation size.
//!
//! Unknown discs carry their boundary behaviour structurally: component `i` is
//! parameterized as `(1 - Z)^{w_i} (c_0 + c_1 Z + ... + c_N Z^N)`, where the
//! weight is `1` on the four ambient components, `d_l - 1` on `zt_l`, and `0`
//! on `wt_l`. The initial lift lives in this family exactly, every iterate
//! keeps the vanishing orders by construction, and the Jacobian kernel at the
//! unperturbed solution is the same space the index formulas count — see
//! [`tangent_basis`].
//!
//! Residuals are sampled on an equispaced circle grid chosen strictly finer
//! than the Laurent bandwidth of the residual, so a grid residual of zero
//! certifies the zero function rather than small values between samples. The
//! Newton step is the minimum-norm least-squares solution (SVD with a relative
//! cutoff), which leaves the step orthogonal to the tangent space of the
//! solution family instead of drifting along it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{CPoly, NVARS, ZT1, ZT2};
use crate::laurent::LaurentPoly;
use crate::lift::{initial_lift, Disc};
use crate::model::{conormal_system, Model, Perturbation};
use crate::scalar::{Coeff, GRat};

/// Relative singular-value threshold below which a direction counts as kernel
/// (for [`tangent_basis`]) and is excluded from the Newton step.
const KERNEL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("component {comp} of the initial lift needs degree {need}, budget is {budget}")]
    ModeBudget { comp: usize, need: i64, budget: usize },
    #[error("Newton stalled at eps = {eps:.3e} with residual {residual:.3e}")]
    Stalled { eps: f64, residual: f64 },
    #[error("homotopy exhausted: reached eps = {reached:.3e} of {target:.3e}")]
    ContinuationExhausted { reached: f64, target: f64 },
    #[error("linear algebra failure: {0}")]
    Linear(String),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Polynomial degree budget per component (on top of the built-in factor).
    pub n_modes: usize,
    /// Newton iterations allowed per homotopy stage.
    pub max_newton: usize,
    /// Convergence target for the sup of the grid residual.
    pub tol: f64,
}

impl SolveOptions {
    /// Defaults sized for the model: the degree budget grows with the degrees
    /// and the reference exponent, which is where both the initial lift and
    /// the perturbative corrections live.
    pub fn for_model<S: Coeff>(model: &Model<S>) -> Self {
        let dmax = model.degrees()[0].max(model.degrees()[1]);
        SolveOptions {
            n_modes: 8 * (dmax + model.k0()) as usize,
            max_newton: 30,
            tol: 1e-11,
        }
    }
}

/// One accepted homotopy stage.
#[derive(Clone, Debug)]
pub struct ContinuationStep {
    pub eps: f64,
    pub newton_iters: usize,
    /// Kernel count of the last Jacobian factored during this stage (`None`
    /// when the stage converged without factoring one). The count staying
    /// constant across stages is the expected picture: the solution manifold
    /// keeps its dimension throughout the continuation.
    pub kernel_dim: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub disc: Disc<Complex64>,
    pub eps: f64,
    /// Accepted homotopy stages, ending in `eps` (empty for `eps == 0`).
    pub trace: Vec<ContinuationStep>,
    pub newton_iters: usize,
    pub n_modes: usize,
    /// Number of circle samples the residual was driven to zero on.
    pub grid: usize,
    /// Sup of the residual norms on a four-fold refinement of that grid.
    pub residual_sup: f64,
    /// Coefficient sup-distance to the unperturbed disc, each mode weighted
    /// by `1 + n` so the value also controls first derivatives at the fixed
    /// truncation.
    pub distance: f64,
    /// Kernel count of a fresh Jacobian at the returned disc (`None` for the
    /// zero-size continuation, which factors nothing).
    pub kernel_dim: Option<usize>,
}

/// Vanishing order at `Z = 1` built into each component, indexed by variable.
/// Any disc the solver returns satisfies these orders by construction, and a
/// disc certified from outside must meet them for the structure to hold.
pub fn component_weights<S: Coeff>(model: &Model<S>) -> [u32; NVARS] {
    let [d1, d2] = model.degrees();
    let mut w = [1u32; NVARS];
    w[ZT1] = d1 - 1;
    w[ZT2] = d2 - 1;
    w[6] = 0;
    w[7] = 0;
    w
}

/// Largest Laurent exponent the residual of a budgeted disc can reach in a
/// given equation set: each monomial contributes its variable degrees times
/// the component degree caps, plus its own circle-parameter exponent.
fn bandwidth(eqs: &[CPoly<Complex64>; 8], deg: &[i64; NVARS]) -> i64 {
    let mut b = 0i64;
    for eq in eqs {
        for (m, p) in eq.iter() {
            let mut t = 0i64;
            for i in 0..NVARS {
                t += (m.v[i] as i64 + m.c[i] as i64) * deg[i];
            }
            let ex = match (p.min_exp(), p.max_exp()) {
                (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
                _ => 0,
            };
            b = b.max(t + ex);
        }
    }
    b
}

/// One discretization of the boundary system: fixed grid, fixed degree
/// budget, equations and their Wirtinger derivatives evaluated numerically.
struct Frame {
    n_modes: usize,
    weights: [u32; NVARS],
    grid: usize,
    zeta: Vec<Complex64>,
    /// `(1 - zeta_g)^{w_i}` for each grid point and component.
    base: Vec<[Complex64; NVARS]>,
    eqs: [CPoly<Complex64>; 8],
    /// `d eqs[j] / d f_i`; the conjugate partials are determined by realness.
    dv: Vec<Vec<CPoly<Complex64>>>,
}

impl Frame {
    fn new(model: &Model<GRat>, pert: &Perturbation<GRat>, eps: f64, n_modes: usize) -> Frame {
        let sys = conormal_system(&model.to_float(), &pert.to_float(), &Complex64::new(eps, 0.0));
        let weights = component_weights(model);
        let deg: [i64; NVARS] = std::array::from_fn(|i| n_modes as i64 + weights[i] as i64);
        let grid = (2 * bandwidth(&sys.eqs, &deg) + 17) as usize;

        let zeta: Vec<Complex64> = (0..grid)
            .map(|g| {
                let ang = 2.0 * std::f64::consts::PI * (g as f64 + 0.5) / grid as f64;
                Complex64::new(ang.cos(), ang.sin())
            })
            .collect();
        let base = zeta
            .iter()
            .map(|&z| std::array::from_fn(|i| (Complex64::new(1.0, 0.0) - z).powi(weights[i] as i32)))
            .collect();

        let dv = (0..8)
            .map(|j| (0..NVARS).map(|i| sys.eqs[j].d_var(i)).collect())
            .collect();

        Frame { n_modes, weights, grid, zeta, base, eqs: sys.eqs, dv }
    }

    fn ncoef(&self) -> usize {
        self.n_modes + 1
    }

    fn nreal(&self) -> usize {
        2 * NVARS * self.ncoef()
    }

    /// Boundary values of the parameterized disc at every grid point.
    fn comp_values(&self, v: &DVector<f64>) -> Vec<[Complex64; NVARS]> {
        let nc = self.ncoef();
        (0..self.grid)
            .map(|g| {
                let z = self.zeta[g];
                std::array::from_fn(|i| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in (0..nc).rev() {
                        let c = Complex64::new(v[2 * (i * nc + k)], v[2 * (i * nc + k) + 1]);
                        acc = acc * z + c;
                    }
                    acc * self.base[g][i]
                })
            })
            .collect()
    }

    /// Stacked residual: equation index fastest, grid index slowest. The
    /// equations are formally real, so the imaginary part of the evaluation
    /// is rounding noise and only the real part is kept.
    fn residual(&self, v: &DVector<f64>) -> DVector<f64> {
        let vals = self.comp_values(v);
        let mut r = DVector::zeros(8 * self.grid);
        for g in 0..self.grid {
            for j in 0..8 {
                r[8 * g + j] = self.eqs[j].eval_at(&vals[g], self.zeta[g]).re;
            }
        }
        r
    }

    /// Real Jacobian of [`Frame::residual`]. For a real equation `E` the
    /// variation along `delta f_i = c b_i(Z) Z^k` is `2 Re((dE/df_i) c b_i Z^k)`,
    /// which gives the two columns for the real and imaginary parts of `c`.
    fn jacobian(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let vals = self.comp_values(v);
        let nc = self.ncoef();
        let mut jac = DMatrix::zeros(8 * self.grid, self.nreal());
        let mut pw = vec![Complex64::new(0.0, 0.0); nc];
        for g in 0..self.grid {
            let z = self.zeta[g];
            for i in 0..NVARS {
                pw[0] = self.base[g][i];
                for k in 1..nc {
                    pw[k] = pw[k - 1] * z;
                }
                for j in 0..8 {
                    if self.dv[j][i].is_zero() {
                        continue;
                    }
                    let d = self.dv[j][i].eval_at(&vals[g], z);
                    let row = 8 * g + j;
                    for (k, &p) in pw.iter().enumerate() {
                        let dp = d * p;
                        jac[(row, 2 * (i * nc + k))] = 2.0 * dp.re;
                        jac[(row, 2 * (i * nc + k) + 1)] = -2.0 * dp.im;
                    }
                }
            }
        }
        jac
    }

    /// The disc the coefficient vector stands for.
    fn assemble(&self, v: &DVector<f64>) -> Disc<Complex64> {
        let nc = self.ncoef();
        Disc {
            comps: std::array::from_fn(|i| {
                let poly = LaurentPoly::from_terms(
                    (0..nc).map(|k| (k as i64, Complex64::new(v[2 * (i * nc + k)], v[2 * (i * nc + k) + 1]))),
                );
                let factor = LaurentPoly::<Complex64>::one_minus_zeta().pow(self.weights[i]);
                poly.mul(&factor)
            }),
        }
    }

    /// Sup of the residual norms over a grid `refine` times finer than the
    /// solve grid, evaluated from the assembled disc rather than the
    /// coefficient vector.
    fn refined_sup(&self, disc: &Disc<Complex64>, refine: usize) -> f64 {
        let n = refine * self.grid;
        let mut sup: f64 = 0.0;
        for g in 0..n {
            let ang = 2.0 * std::f64::consts::PI * (g as f64 + 0.25) / n as f64;
            let z = Complex64::new(ang.cos(), ang.sin());
            let vals: [Complex64; NVARS] = std::array::from_fn(|i| disc.comps[i].eval_c64(z));
            for eq in &self.eqs {
                sup = sup.max(eq.eval_at(&vals, z).norm());
            }
        }
        sup
    }

    /// Gauss-Newton with backtracking; `v` is advanced in place. Returns the
    /// number of iterations spent and the kernel count of the last Jacobian
    /// factored (`None` when none was needed).
    fn newton(
        &self,
        v: &mut DVector<f64>,
        eps: f64,
        opts: &SolveOptions,
    ) -> Result<(usize, Option<usize>), SolveError> {
        let mut sup = self.residual(v).amax();
        let mut kernel_dim = None;
        for it in 0..=opts.max_newton {
            if sup < opts.tol {
                return Ok((it, kernel_dim));
            }
            if it == opts.max_newton {
                break;
            }
            let r = self.residual(v);
            let svd = self.jacobian(v).svd(true, true);
            let smax = svd.singular_values.amax();
            kernel_dim = Some(
                svd.singular_values.iter().filter(|&&s| s < KERNEL_TOL * smax).count(),
            );
            let step = svd
                .solve(&(-&r), KERNEL_TOL * smax)
                .map_err(|e| SolveError::Linear(e.to_string()))?;

            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..9 {
                let cand = &*v + &step * lambda;
                let cand_sup = self.residual(&cand).amax();
                if cand_sup < sup {
                    *v = cand;
                    sup = cand_sup;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                return Err(SolveError::Stalled { eps, residual: sup });
            }
        }
        Err(SolveError::Stalled { eps, residual: sup })
    }
}

/// Coefficient vector of the initial lift in the weighted parameterization.
/// The lift's components vanish at 1 to at least the built-in orders, so the
/// division is exact; what can fail is the degree budget.
fn embed(model: &Model<GRat>, weights: &[u32; NVARS], n_modes: usize) -> Result<DVector<f64>, SolveError> {
    let f0 = initial_lift(model);
    let nc = n_modes + 1;
    let mut v = DVector::zeros(2 * NVARS * nc);
    for i in 0..NVARS {
        let factor = LaurentPoly::<GRat>::one_minus_zeta().pow(weights[i]);
        let q = f0.comps[i]
            .divide_exact(&factor)
            .expect("initial lift must vanish to the built-in order")
            .to_float();
        if let Some(hi) = q.max_exp() {
            if hi > n_modes as i64 {
                return Err(SolveError::ModeBudget { comp: i, need: hi, budget: n_modes });
            }
        }
        for (e, c) in q.iter() {
            v[2 * (i * nc + e as usize)] = c.re;
            v[2 * (i * nc + e as usize) + 1] = c.im;
        }
    }
    Ok(v)
}

/// Solves the boundary system of `model` perturbed by `eps * pert`, starting
/// from the unperturbed solution and ramping the perturbation up in as few
/// homotopy stages as Newton tolerates (halving the stride on failure).
///
/// At `eps == 0` the initial lift is already exact and is returned unchanged,
/// with no iteration.
pub fn solve(
    model: &Model<GRat>,
    pert: &Perturbation<GRat>,
    eps: f64,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    if eps == 0.0 {
        let frame = Frame::new(model, pert, 0.0, opts.n_modes);
        let disc = initial_lift(model).to_float();
        let residual_sup = frame.refined_sup(&disc, 4);
        return Ok(SolveReport {
            disc,
            eps: 0.0,
            trace: vec![],
            newton_iters: 0,
            n_modes: opts.n_modes,
            grid: frame.grid,
            residual_sup,
            distance: 0.0,
            kernel_dim: None,
        });
    }

    let weights = component_weights(model);
    let mut v = embed(model, &weights, opts.n_modes)?;
    let mut reached = 0.0f64;
    let mut frac = 1.0f64;
    let mut trace: Vec<ContinuationStep> = vec![];
    let mut newton_iters = 0;
    let mut frame;

    loop {
        let attempt = if frac >= 1.0 { eps } else { reached + (eps - reached) * frac };
        if attempt == reached {
            return Err(SolveError::ContinuationExhausted { reached, target: eps });
        }
        frame = Frame::new(model, pert, attempt, opts.n_modes);
        let mut trial = v.clone();
        match frame.newton(&mut trial, attempt, opts) {
            Ok((iters, stage_kernel)) => {
                v = trial;
                newton_iters += iters;
                reached = attempt;
                trace.push(ContinuationStep {
                    eps: attempt,
                    newton_iters: iters,
                    kernel_dim: stage_kernel,
                });
                if reached == eps {
                    let disc = frame.assemble(&v);
                    let residual_sup = frame.refined_sup(&disc, 4);
                    let distance = weighted_distance(&disc, &initial_lift(model).to_float());
                    let kernel_dim = Some(kernel_count(&frame, &v));
                    return Ok(SolveReport {
                        disc,
                        eps,
                        trace,
                        newton_iters,
                        n_modes: opts.n_modes,
                        grid: frame.grid,
                        residual_sup,
                        distance,
                        kernel_dim,
                    });
                }
                frac = (2.0 * frac).min(1.0);
            }
            Err(SolveError::Stalled { .. }) => {
                frac *= 0.5;
                if frac < 1e-9 {
                    return Err(SolveError::ContinuationExhausted { reached, target: eps });
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// Coefficient sup-distance between two discs with mode `n` weighted by
/// `1 + n`; see [`SolveReport::distance`].
fn weighted_distance(a: &Disc<Complex64>, b: &Disc<Complex64>) -> f64 {
    let mut d = 0.0f64;
    for i in 0..NVARS {
        for (e, c) in a.comps[i].sub(&b.comps[i]).iter() {
            d = d.max((1.0 + e.max(0) as f64) * c.norm());
        }
    }
    d
}

/// Kernel count of the Jacobian at `v` (singular values below the rank
/// cutoff), factored fresh.
fn kernel_count(frame: &Frame, v: &DVector<f64>) -> usize {
    let svd = frame.jacobian(v).svd(false, false);
    let smax = svd.singular_values.amax();
    svd.singular_values.iter().filter(|&&s| s < KERNEL_TOL * smax).count()
}

/// Orthonormal basis of the numerical kernel of the linearized system at the
/// unperturbed solution, returned as discs in the weighted parameterization.
/// Its length is the discretized count the index formulas predict; see
/// [`crate::indices::kernel_dimension`].
pub fn tangent_basis(model: &Model<GRat>, n_modes: usize) -> Result<Vec<Disc<Complex64>>, SolveError> {
    let weights = component_weights(model);
    let v0 = embed(model, &weights, n_modes)?;
    let frame = Frame::new(model, &Perturbation::none(), 0.0, n_modes);
    let svd = frame.jacobian(&v0).svd(false, true);
    let smax = svd.singular_values.amax();
    let v_t = svd.v_t.ok_or_else(|| SolveError::Linear("SVD did not return V^T".into()))?;

    let mut basis = vec![];
    for (row, &s) in svd.singular_values.iter().enumerate() {
        if s < KERNEL_TOL * smax {
            let dir = DVector::from_iterator(v_t.ncols(), v_t.row(row).iter().cloned());
            basis.push(frame.assemble(&dir));
        }
    }
    Ok(basis)
}

/// Dimension of the numerical kernel of the discretized linearization.
pub fn linearization_kernel_dim(model: &Model<GRat>, n_modes: usize) -> Result<usize, SolveError> {
    Ok(tangent_basis(model, n_modes)?.len())
}
