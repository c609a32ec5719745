//! The boundary linearization: an 8x8 matrix of Laurent polynomials, its
//! singular-factor structure, and the associated Riemann-Hilbert symbols.
//!
//! Everything is computed, never transcribed: the matrix `G` has entries
//! `dE_i / d conj(v_j)` — Wirtinger partials of the eight conormal equations —
//! evaluated along the initial disc. The theory then predicts (and this module
//! certifies, by exact division and equality checks) a block upper triangular
//! shape with diagonal `(I/2, G2, -i Z^{k0} I)`, z-columns of `G2` carrying the
//! singular factor `(1 - conj Z)^{d_l - 2}`, and a de-factored middle block
//! that is block-diagonal in the reduced scalar data `(Q_l, S_l)`.

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{NVARS, W1, W2, Z1, Z2, ZT1, ZT2, WT1, WT2};
use crate::laurent::LaurentPoly;
use crate::lift::initial_lift;
use crate::model::{conormal_system, Model, Perturbation};
use crate::scalar::Coeff;
use crate::winding::WindingError;

/// Column order of the linearized system (and of every symbol built from it).
pub const COLUMN_VARS: [usize; 8] = [W1, W2, Z1, Z2, ZT1, ZT2, WT1, WT2];

pub const COL_W1: usize = 0;
pub const COL_W2: usize = 1;
pub const COL_Z1: usize = 2;
pub const COL_Z2: usize = 3;
pub const COL_ZT1: usize = 4;
pub const COL_ZT2: usize = 5;
pub const COL_WT1: usize = 6;
pub const COL_WT2: usize = 7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("entry ({row},{col}) is not divisible by the predicted singular factor")]
    NotDivisible { row: usize, col: usize },
    #[error("structural mismatch: {0}")]
    Structure(String),
    #[error("matrix is singular (zero determinant polynomial)")]
    Singular,
    #[error("reduced data violates its degree window: {0}")]
    DegreeWindow(String),
    #[error(transparent)]
    Winding(#[from] WindingError),
}

/// Square matrix of Laurent polynomials, row-major.
#[derive(Clone, PartialEq)]
pub struct MatPoly<S: Coeff> {
    pub n: usize,
    rows: Vec<Vec<LaurentPoly<S>>>,
}

impl<S: Coeff> MatPoly<S> {
    pub fn zero(n: usize) -> Self {
        MatPoly {
            n,
            rows: vec![vec![LaurentPoly::zero(); n]; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.rows[i][i] = LaurentPoly::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<LaurentPoly<S>>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "not square");
        MatPoly { n, rows }
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly<S> {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly<S>) {
        self.rows[i][j] = p;
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let mut out = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = LaurentPoly::zero();
                for k in 0..self.n {
                    acc = acc.add(&self.rows[i][k].mul(&rhs.rows[k][j]));
                }
                out.rows[i][j] = acc;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.rows[i][j] = out.rows[i][j].add(&rhs.rows[i][j]);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map(|p| p.neg())
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly<S>) -> LaurentPoly<S>) -> Self {
        MatPoly {
            n: self.n,
            rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }

    /// Entrywise circle conjugation.
    pub fn cc(&self) -> Self {
        self.map(|p| p.circle_conj())
    }

    pub fn scale_poly(&self, p: &LaurentPoly<S>) -> Self {
        self.map(|q| q.mul(p))
    }

    pub fn to_float(&self) -> MatPoly<Complex64> {
        MatPoly {
            n: self.n,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|p| p.to_float()).collect())
                .collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.rows[j][i] = self.rows[i][j].clone();
            }
        }
        out
    }

    /// Smallest exponent appearing in any entry (None for the zero matrix).
    pub fn min_exp(&self) -> Option<i64> {
        self.rows.iter().flatten().filter_map(|p| p.min_exp()).min()
    }

    /// Largest exponent appearing in any entry (None for the zero matrix).
    pub fn max_exp(&self) -> Option<i64> {
        self.rows.iter().flatten().filter_map(|p| p.max_exp()).max()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let rows = rows
            .iter()
            .map(|&i| cols.iter().map(|&j| self.rows[i][j].clone()).collect())
            .collect();
        MatPoly { n: cols.len(), rows }
    }

    pub fn eval_c64(&self, z: Complex64) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.rows[i][j].eval_c64(z))
    }

    pub fn max_norm(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|p| p.linf_norm())
            .fold(0.0, f64::max)
    }

    /// Fraction-free (Bareiss) determinant. Exact backend only: every division
    /// the algorithm performs is exact by construction, and we insist on it.
    pub fn det(&self) -> LaurentPoly<S> {
        assert!(S::EXACT, "symbolic determinant requires the exact backend");
        let n = self.n;
        if n == 0 {
            return LaurentPoly::one();
        }
        let mut m = self.rows.clone();
        let mut sign = false;
        let mut prev = LaurentPoly::<S>::one();
        for k in 0..n.saturating_sub(1) {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = !sign;
                    }
                    None => return LaurentPoly::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                    m[i][j] = num
                        .divide_exact(&prev)
                        .expect("fraction-free elimination divided inexactly");
                }
                m[i][k] = LaurentPoly::zero();
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if sign {
            d.neg()
        } else {
            d
        }
    }

    /// Adjugate via cofactors (exact backend).
    pub fn adjugate(&self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        let all: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let rows: Vec<usize> = all.iter().copied().filter(|&r| r != i).collect();
            for j in 0..n {
                let cols: Vec<usize> = all.iter().copied().filter(|&c| c != j).collect();
                let minor = self.submatrix(&rows, &cols).det();
                let cof = if (i + j) % 2 == 0 { minor } else { minor.neg() };
                // adjugate transposes the cofactor matrix
                out.rows[j][i] = cof;
            }
        }
        out
    }
}

impl<S: Coeff> std::fmt::Debug for MatPoly<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for row in &self.rows {
            for (j, p) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " | ")?;
                }
                write!(f, "{}", p)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Scale-aware equality: exact backends compare exactly, floats within a
/// relative tolerance.
pub fn poly_eq<S: Coeff>(a: &LaurentPoly<S>, b: &LaurentPoly<S>) -> bool {
    if S::EXACT {
        a == b
    } else {
        a.sub(b).linf_norm() <= 1e-9 * (1.0 + a.linf_norm().max(b.linf_norm()))
    }
}

/// Division that must succeed: exact backends demand a zero remainder, floats
/// a relatively negligible one.
pub fn poly_div<S: Coeff>(a: &LaurentPoly<S>, d: &LaurentPoly<S>) -> Option<LaurentPoly<S>> {
    let (q, r) = a.div_rem(d);
    let ok = if S::EXACT {
        r.is_zero()
    } else {
        r.linf_norm() <= 1e-9 * (1.0 + a.linf_norm())
    };
    ok.then_some(q)
}

/// The linearized boundary system along the initial disc.
pub struct BoundaryLinearization<S: Coeff> {
    /// Raw 8x8 matrix, rows = equations, columns in [`COLUMN_VARS`] order.
    pub g: MatPoly<S>,
    pub k0: u32,
    pub degrees: [u32; 2],
}

/// Differentiates the conormal system at the unperturbed model and evaluates
/// along the initial disc.
pub fn linearize<S: Coeff>(model: &Model<S>) -> BoundaryLinearization<S> {
    let sys = conormal_system(model, &Perturbation::none(), &S::zero());
    let f0 = initial_lift(model);
    let mut g = MatPoly::zero(8);
    for (i, eq) in sys.eqs.iter().enumerate() {
        for (jc, &v) in COLUMN_VARS.iter().enumerate() {
            g.set(i, jc, eq.d_cvar(v).eval(&f0.comps));
        }
    }
    BoundaryLinearization { g, k0: model.k0(), degrees: model.degrees() }
}

impl<S: Coeff> BoundaryLinearization<S> {
    /// Block upper triangular in the (w | z, zt | wt) grouping?
    pub fn is_block_upper(&self) -> bool {
        let zero = LaurentPoly::zero();
        let mut ok = true;
        for i in 2..8 {
            for j in 0..2 {
                ok &= poly_eq(self.g.get(i, j), &zero);
            }
        }
        for i in 6..8 {
            for j in 2..6 {
                ok &= poly_eq(self.g.get(i, j), &zero);
            }
        }
        ok
    }

    /// The two scalar diagonal blocks have their predicted closed forms?
    pub fn diagonal_blocks_canonical(&self) -> bool {
        let half = LaurentPoly::constant(S::one().div(&S::from_i64(2)));
        let neg_izk = LaurentPoly::monomial(self.k0 as i64, S::i().neg());
        let zero = LaurentPoly::zero();
        let mut ok = true;
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { &half } else { &zero };
                ok &= poly_eq(self.g.get(i, j), expect);
                let expect = if i == j { &neg_izk } else { &zero };
                ok &= poly_eq(self.g.get(6 + i, 6 + j), expect);
            }
        }
        ok
    }

    /// Raw middle 4x4 block (rows e3..e6, columns z1, z2, zt1, zt2).
    pub fn middle_raw(&self) -> MatPoly<S> {
        self.g.submatrix(&[2, 3, 4, 5], &[COL_Z1, COL_Z2, COL_ZT1, COL_ZT2])
    }

    /// Full 8x8 matrix with the singular column factors divided out of the
    /// z-columns: column `z_l` must be divisible by `(1 - conj Z)^{d_l - 2}`.
    pub fn defactored(&self) -> Result<MatPoly<S>, SymbolError> {
        let mut out = self.g.clone();
        for l in 0..2 {
            let col = COL_Z1 + l;
            let factor = LaurentPoly::<S>::one_minus_zeta()
                .circle_conj()
                .pow(self.degrees[l] - 2);
            for i in 0..8 {
                let q = poly_div(self.g.get(i, col), &factor)
                    .ok_or(SymbolError::NotDivisible { row: i, col })?;
                out.set(i, col, q);
            }
        }
        Ok(out)
    }

    /// De-factored middle block.
    pub fn middle_defactored(&self) -> Result<MatPoly<S>, SymbolError> {
        Ok(self
            .defactored()?
            .submatrix(&[2, 3, 4, 5], &[COL_Z1, COL_Z2, COL_ZT1, COL_ZT2]))
    }

    /// First variation of the eight boundary equations in the direction of
    /// the disc `delta` (indexed by variable, not by column): since the
    /// equations are real and the stored entries are the conjugate Wirtinger
    /// derivatives, the variation is `g cc(delta) + cc(g cc(delta))`.
    pub fn apply(&self, delta: &[LaurentPoly<S>; NVARS]) -> [LaurentPoly<S>; 8] {
        std::array::from_fn(|i| {
            let mut act = LaurentPoly::zero();
            for (jc, &v) in COLUMN_VARS.iter().enumerate() {
                act = act.add(&self.g.get(i, jc).mul(&delta[v].circle_conj()));
            }
            act.add(&act.circle_conj())
        })
    }
}

/// The reduced scalar data of one de-factored middle block: for each equation
/// pair, `Q_l` (holomorphic side) and `S_l` (the reflected anti-holomorphic
/// side), with `T_l = Z^{-(d-2)} circle_conj(S_l)` the raw second piece.
#[derive(Clone, Debug, PartialEq)]
pub struct QsData<S: Coeff> {
    pub q: [LaurentPoly<S>; 2],
    pub s: [LaurentPoly<S>; 2],
    pub k0: u32,
    pub degrees: [u32; 2],
    pub kk: [u32; 2],
}

/// Extracts `(Q_l, S_l)` from the linearization and certifies the block
/// structure on the way: the two rows of each equation pair must combine to
/// `(Q + T)` and `i (Q - T)` over the common singular factor, the zt-columns
/// must be the constants `1` and `-i`, and the cross-component entries vanish.
pub fn extract_qs<S: Coeff>(
    lin: &BoundaryLinearization<S>,
    model: &Model<S>,
) -> Result<QsData<S>, SymbolError> {
    let zero = LaurentPoly::zero();
    let one = LaurentPoly::one();
    let neg_i = LaurentPoly::constant(S::i().neg());
    let mut q_out: [LaurentPoly<S>; 2] = [zero.clone(), zero.clone()];
    let mut s_out: [LaurentPoly<S>; 2] = [zero.clone(), zero.clone()];

    for l in 0..2 {
        let d = lin.degrees[l];
        let (row_re, row_im) = (2 + 2 * l, 3 + 2 * l);
        let (col_z, col_zt) = (COL_Z1 + l, COL_ZT1 + l);
        let (col_z_other, col_zt_other) = (COL_Z1 + (1 - l), COL_ZT1 + (1 - l));

        // cross-component decoupling
        for row in [row_re, row_im] {
            if !poly_eq(lin.g.get(row, col_z_other), &zero)
                || !poly_eq(lin.g.get(row, col_zt_other), &zero)
            {
                return Err(SymbolError::Structure(format!(
                    "equation pair {} touches the other component",
                    l + 1
                )));
            }
        }
        // zt-columns are the defining constants
        if !poly_eq(lin.g.get(row_re, col_zt), &one) || !poly_eq(lin.g.get(row_im, col_zt), &neg_i)
        {
            return Err(SymbolError::Structure(format!(
                "zt-column of pair {} is not (1, -i)",
                l + 1
            )));
        }

        let factor = LaurentPoly::<S>::one_minus_zeta().circle_conj().pow(d - 2);
        let q_plus_t = poly_div(lin.g.get(row_re, col_z), &factor)
            .ok_or(SymbolError::NotDivisible { row: row_re, col: col_z })?;
        let i_q_minus_t = poly_div(lin.g.get(row_im, col_z), &factor)
            .ok_or(SymbolError::NotDivisible { row: row_im, col: col_z })?;
        let q_minus_t = i_q_minus_t.scale(&S::i().neg());
        let half = S::one().div(&S::from_i64(2));
        let q = q_plus_t.add(&q_minus_t).scale(&half);
        let t = q_plus_t.sub(&q_minus_t).scale(&half);
        let s = t.circle_conj().shift(d as i64 - 2);

        // degree windows certify the reduction really happened:
        // Z^{k0-k+d-1} | Q, deg Q <= k0+k-1; Z^{k0-k+d-2} | S, deg S <= k0+k-2
        let k = model.p[l].k;
        let k0 = lin.k0;
        let q_lo = (k0 + d - 1) as i64 - k as i64;
        let q_hi = (k0 + k - 1) as i64;
        let s_lo = (k0 + d - 2) as i64 - k as i64;
        let s_hi = (k0 + k) as i64 - 2;
        let window = |p: &LaurentPoly<S>, lo: i64, hi: i64, name: &str| {
            if let (Some(mn), Some(mx)) = (p.min_exp(), p.max_exp()) {
                if mn < lo || mx > hi {
                    return Err(SymbolError::DegreeWindow(format!(
                        "{name}_{} support [{mn},{mx}] outside [{lo},{hi}]",
                        l + 1
                    )));
                }
            }
            Ok(())
        };
        window(&q, q_lo, q_hi, "Q")?;
        window(&s, s_lo, s_hi, "S")?;
        q_out[l] = q;
        s_out[l] = s;
    }

    Ok(QsData {
        q: q_out,
        s: s_out,
        k0: lin.k0,
        degrees: lin.degrees,
        kk: [model.p[0].k, model.p[1].k],
    })
}

impl<S: Coeff> QsData<S> {
    /// `B_l`: the de-factored 2x2 block in (z_l, zt_l) columns,
    /// `[[Q + t conj(S), 1], [i(Q - t conj(S)), -i]]` with `t = Z^{d-2}`.
    pub fn block_b(&self, l: usize) -> MatPoly<S> {
        let d = self.degrees[l] as i64;
        let t_sbar = self.s[l].circle_conj().shift(d - 2);
        let q = &self.q[l];
        let i = S::i();
        MatPoly::from_rows(vec![
            vec![q.add(&t_sbar), LaurentPoly::one()],
            vec![
                q.sub(&t_sbar).scale(&i),
                LaurentPoly::constant(i.neg()),
            ],
        ])
    }

    /// Winding of `Q_l` — the partial index of each middle-block pair.
    pub fn q_winding(&self, l: usize) -> Result<i64, WindingError>
    where
        S: crate::winding::Wind,
    {
        crate::winding::winding(&self.q[l])
    }
}

/// Certifies that the de-factored middle block, permuted to component-major
/// column order `(z1, zt1, z2, zt2)`, is exactly `blockdiag(B_1, B_2)`.
pub fn certify_middle_structure<S: Coeff>(
    lin: &BoundaryLinearization<S>,
    qs: &QsData<S>,
) -> Result<(), SymbolError> {
    let mid = lin.middle_defactored()?;
    // middle columns are (z1, z2, zt1, zt2) -> permute to (z1, zt1, z2, zt2)
    let perm = mid.submatrix(&[0, 1, 2, 3], &[0, 2, 1, 3]);
    let b1 = qs.block_b(0);
    let b2 = qs.block_b(1);
    for i in 0..4 {
        for j in 0..4 {
            let expect = match (i / 2, j / 2) {
                (0, 0) => b1.get(i, j).clone(),
                (1, 1) => b2.get(i - 2, j - 2).clone(),
                _ => LaurentPoly::zero(),
            };
            if !poly_eq(perm.get(i, j), &expect) {
                return Err(SymbolError::Structure(format!(
                    "middle block entry ({i},{j}) differs from the reduced form"
                )));
            }
        }
    }
    Ok(())
}

/// A matrix of Laurent polynomials over a common scalar Laurent denominator.
#[derive(Clone, Debug)]
pub struct RationalSymbol<S: Coeff> {
    pub num: MatPoly<S>,
    pub den: LaurentPoly<S>,
}

impl<S: Coeff> RationalSymbol<S> {
    pub fn n(&self) -> usize {
        self.num.n
    }

    pub fn cc(&self) -> Self {
        RationalSymbol { num: self.num.cc(), den: self.den.circle_conj() }
    }

    /// The defining involution `cc(M) * M = I`, checked exactly:
    /// `cc(num) * num == cc(den) * den * I`.
    pub fn involution_ok(&self) -> bool {
        let lhs = self.num.cc().mul(&self.num);
        let scalar = self.den.circle_conj().mul(&self.den);
        let rhs = MatPoly::identity(self.num.n).scale_poly(&scalar);
        (0..self.num.n).all(|i| (0..self.num.n).all(|j| poly_eq(lhs.get(i, j), rhs.get(i, j))))
    }

    /// `det M` as a (numerator, denominator-power) pair: `det(num) / den^n`.
    pub fn det_pair(&self) -> (LaurentPoly<S>, LaurentPoly<S>) {
        (self.num.det(), self.den.pow(self.num.n as u32))
    }

    pub fn eval_c64(&self, z: Complex64) -> nalgebra::DMatrix<Complex64> {
        let d = self.den.eval_c64(z);
        self.num.eval_c64(z).map(|v| v / d)
    }

    pub fn to_float(&self) -> RationalSymbol<Complex64> {
        RationalSymbol { num: self.num.to_float(), den: self.den.to_float() }
    }
}

/// The Riemann-Hilbert symbol of a linear boundary condition with matrix `A`:
/// `-cc(A)^{-1} A`, as numerator `-adj(cc A) * A` over denominator `det(cc A)`.
/// Exact backend.
pub fn symbol_of<S: Coeff>(a: &MatPoly<S>) -> Result<RationalSymbol<S>, SymbolError> {
    let cca = a.cc();
    let den = cca.det();
    if den.is_zero() {
        return Err(SymbolError::Singular);
    }
    let num = cca.adjugate().mul(a).neg();
    Ok(RationalSymbol { num, den })
}
