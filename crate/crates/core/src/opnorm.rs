//! Operator norms of linear maps between ℓ_p and S_p^{sa} spaces.
//!
//! Matrices act on frame coordinates (see [`crate::spaces`]); for ℓ_p spaces
//! these are the standard coordinates. Every result is a [`NormBracket`]:
//! the lower end is attained by a stored witness, the upper end comes only
//! from exact norms composed with exact embedding constants.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{GaugeError, Result};
use crate::linalg;
use crate::seeds;
use crate::spaces::{
    id_embedding_norm, lp_norm, norming_functional, sign_vector, Exponent, Family, ScalarField,
    SpaceDescriptor, ENUM_CUTOFF,
};

/// A linear map `E → F` as a `dim F × dim E` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<f64>,
    pub domain: SpaceDescriptor,
    pub codomain: SpaceDescriptor,
}

impl OperatorMatrix {
    pub fn new(matrix: DMatrix<f64>, domain: SpaceDescriptor, codomain: SpaceDescriptor) -> Result<Self> {
        if matrix.ncols() != domain.real_dimension() {
            return Err(GaugeError::DimensionMismatch { expected: domain.real_dimension(), got: matrix.ncols() });
        }
        if matrix.nrows() != codomain.real_dimension() {
            return Err(GaugeError::DimensionMismatch { expected: codomain.real_dimension(), got: matrix.nrows() });
        }
        Ok(OperatorMatrix { matrix, domain, codomain })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = self.matrix.nrows();
        let mut out = vec![0.0; m];
        for (j, xj) in x.iter().enumerate() {
            if *xj == 0.0 {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.matrix[(i, j)] * xj;
            }
        }
        out
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let n = self.matrix.ncols();
        (0..n)
            .map(|j| (0..y.len()).map(|i| self.matrix[(i, j)] * y[i]).sum())
            .collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        OperatorMatrix { matrix: &self.matrix * c, domain: self.domain, codomain: self.codomain }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ExactEnum,
    Spectral,
    AltMax,
    BallInclusion,
    ExactFormula,
}

impl Method {
    pub fn is_exact(self) -> bool {
        matches!(self, Method::ExactEnum | Method::Spectral | Method::ExactFormula)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::ExactEnum => "EXACT_ENUM",
            Method::Spectral => "SPECTRAL",
            Method::AltMax => "ALT_MAX",
            Method::BallInclusion => "BALL_INCLUSION",
            Method::ExactFormula => "EXACT_FORMULA",
        }
    }
}

/// What certifies the lower end of a bracket.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    None,
    /// `x ∈ E` and `y ∈ F*` (frame coordinates); the value is
    /// ⟨y, Ax⟩ / (‖x‖·‖y‖).
    Pair { x: Vec<f64>, y: Vec<f64> },
    /// A dual tensor `w ∈ E*⊗F*` together with the sound upper bound on its
    /// injective norm used as the denominator.
    DualTensor { w: DMatrix<f64>, w_norm_upper: f64 },
    /// Two operators whose composition (or pairing) attains the value.
    Operators { a: DMatrix<f64>, b: DMatrix<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub witness: Witness,
    pub method: Method,
    pub upper_method: Method,
    pub iterations: usize,
    pub restarts: usize,
}

impl NormBracket {
    pub fn exact(value: f64, witness: Witness, method: Method) -> Self {
        NormBracket { lower: value, upper: value, witness, method, upper_method: method, iterations: 0, restarts: 0 }
    }

    pub fn is_exact(&self) -> bool {
        self.method.is_exact() && self.lower == self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone)]
pub struct OpnormOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    /// Use exact routes whenever one applies.
    pub use_exact: bool,
    /// Largest side for which enumeration is used inside upper-bound chains.
    pub chain_enum_cutoff: usize,
}

impl Default for OpnormOptions {
    fn default() -> Self {
        OpnormOptions { restarts: 32, max_iter: 10_000, tol: 1e-10, seed: 0, use_exact: true, chain_enum_cutoff: 10 }
    }
}

fn is_lp(s: &SpaceDescriptor, p: Exponent) -> bool {
    s.family == Family::Lp && s.p == p
}

fn is_real(s: &SpaceDescriptor) -> bool {
    s.field == ScalarField::Real
}

fn is_two(s: &SpaceDescriptor) -> bool {
    s.p.is_two()
}

/// ⟨y, Ax⟩ / (‖x‖_E · ‖y‖_{F*}).
pub fn pair_value(a: &OperatorMatrix, x: &[f64], y: &[f64]) -> f64 {
    let nx = a.domain.frame_norm(x);
    let ny = a.codomain.dual().frame_norm(y);
    if nx == 0.0 || ny == 0.0 {
        return 0.0;
    }
    linalg::dot(y, &a.apply(x)) / (nx * ny)
}

/// Re-evaluates a pair witness.
pub fn witness_value(a: &OperatorMatrix, b: &NormBracket) -> Option<f64> {
    match &b.witness {
        Witness::Pair { x, y } => Some(pair_value(a, x, y)),
        _ => None,
    }
}

fn sign_pm(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Returns the mask maximizing `eval(Ms)` over sign vectors `s` with
/// `s_0 = +1`, ties going to the smallest mask (lexicographically smallest s).
/// `M` has one column per sign coordinate.
fn enumerate_signs(m: &DMatrix<f64>, eval: &(dyn Fn(&[f64]) -> f64 + Sync)) -> u64 {
    let n = m.ncols();
    let rows = m.nrows();
    if n == 0 {
        return 0;
    }
    let total: u64 = 1 << (n - 1);
    let resync = 4096;
    // Split the Gray-code walk into chunks so large enumerations use all cores;
    // each chunk is reduced independently and merged in index order.
    let chunk: u64 = (total / 64).max(resync);
    let chunks = total.div_ceil(chunk);
    let results: Vec<(f64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(total);
            let mut best = (f64::NEG_INFINITY, u64::MAX);
            let mut v = vec![0.0; rows];
            let mut s = vec![0.0; n];
            for k in start..end {
                let g = k ^ (k >> 1);
                if k == start || (k - start) % resync == 0 {
                    s = sign_vector(g, n);
                    for (i, vi) in v.iter_mut().enumerate() {
                        *vi = (0..n).map(|j| m[(i, j)] * s[j]).sum();
                    }
                } else {
                    let flipped = (g ^ ((k - 1) ^ ((k - 1) >> 1))).trailing_zeros() as usize;
                    let j = n - 1 - flipped;
                    let delta = -2.0 * s[j];
                    s[j] = -s[j];
                    for (i, vi) in v.iter_mut().enumerate() {
                        *vi += delta * m[(i, j)];
                    }
                }
                let val = eval(&v);
                let tol = 1e-11 * best.0.abs().max(1e-300);
                if val > best.0 + tol || ((val - best.0).abs() <= tol && g < best.1) {
                    best = (val.max(best.0), g);
                }
            }
            best
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, u64::MAX);
    for (val, g) in results {
        let tol = 1e-11 * best.0.abs().max(1e-300);
        if val > best.0 + tol || ((val - best.0).abs() <= tol && g < best.1) {
            best = (val.max(best.0), g);
        }
    }
    best.1
}

/// Exact ‖A‖_{ℓ_∞^n → ℓ_1^m} by sign enumeration.
pub fn opnorm_inf_to_one(a: &OperatorMatrix) -> Result<NormBracket> {
    if !(is_lp(&a.domain, Exponent::INFINITY) && is_lp(&a.codomain, Exponent::ONE)) {
        return Err(GaugeError::WrongSpacePair(format!("{} -> {}", a.domain, a.codomain)));
    }
    if !is_real(&a.domain) || !is_real(&a.codomain) {
        return Err(GaugeError::UnsupportedSpace("complex sign enumeration".into()));
    }
    let size = a.matrix.ncols().max(a.matrix.nrows());
    if size > ENUM_CUTOFF {
        return Err(GaugeError::SizeOverCutoff { size, cutoff: ENUM_CUTOFF });
    }
    let n = a.matrix.ncols();
    let mask = enumerate_signs(&a.matrix, &|v| v.iter().map(|x| x.abs()).sum());
    let s = sign_vector(mask, n);
    let as_ = a.apply(&s);
    let t: Vec<f64> = as_.iter().map(|&x| sign_pm(x)).collect();
    let value = linalg::dot(&t, &as_);
    Ok(NormBracket::exact(value, Witness::Pair { x: s, y: t }, Method::ExactEnum))
}

/// Exact ‖A‖_{ℓ_1 → ℓ_∞} = max |a_ij|.
pub fn opnorm_one_to_inf(a: &OperatorMatrix) -> Result<NormBracket> {
    if !(is_lp(&a.domain, Exponent::ONE) && is_lp(&a.codomain, Exponent::INFINITY)) {
        return Err(GaugeError::WrongSpacePair(format!("{} -> {}", a.domain, a.codomain)));
    }
    let (m, n) = a.matrix.shape();
    let (mut bi, mut bj) = (0, 0);
    for i in 0..m {
        for j in 0..n {
            if a.matrix[(i, j)].abs() > a.matrix[(bi, bj)].abs() {
                bi = i;
                bj = j;
            }
        }
    }
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; m];
    x[bj] = 1.0;
    y[bi] = sign_pm(a.matrix[(bi, bj)]);
    let value = a.matrix[(bi, bj)].abs();
    Ok(NormBracket::exact(value, Witness::Pair { x, y }, Method::ExactFormula))
}

/// Exact ‖A‖_{2 → 2}: the largest singular value.
pub fn opnorm_spectral(a: &OperatorMatrix) -> Result<NormBracket> {
    if !(is_two(&a.domain) && is_two(&a.codomain)) {
        return Err(GaugeError::WrongSpacePair(format!("{} -> {}", a.domain, a.codomain)));
    }
    let (s, u, v) = linalg::top_singular(&a.matrix);
    Ok(NormBracket::exact(s, Witness::Pair { x: v.as_slice().to_vec(), y: u.as_slice().to_vec() }, Method::Spectral))
}

/// The transpose, viewed as a map `F* → E*`.
pub fn adjoint(a: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix { matrix: a.matrix.transpose(), domain: a.codomain.dual(), codomain: a.domain.dual() }
}

fn max_column(a: &OperatorMatrix) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for j in 0..a.matrix.ncols() {
        let col: Vec<f64> = a.matrix.column(j).iter().copied().collect();
        let v = a.codomain.frame_norm(&col);
        if v > best.1 {
            best = (j, v);
        }
    }
    best
}

fn max_row(a: &OperatorMatrix) -> (usize, f64) {
    let dual = a.domain.dual();
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..a.matrix.nrows() {
        let row: Vec<f64> = a.matrix.row(i).iter().copied().collect();
        let v = dual.frame_norm(&row);
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

fn is_diagonal(m: &DMatrix<f64>) -> bool {
    m.is_square() && m.iter().enumerate().all(|(k, &x)| x == 0.0 || k % (m.nrows() + 1) == 0)
}

/// Exact value with a witness, when some closed form or enumeration applies.
pub fn exact_norm(a: &OperatorMatrix, enum_cutoff: usize) -> Option<NormBracket> {
    let (dom, cod) = (&a.domain, &a.codomain);
    let (m, n) = a.matrix.shape();
    if m == 0 || n == 0 {
        return Some(NormBracket::exact(0.0, Witness::None, Method::ExactFormula));
    }
    let real = is_real(dom) && is_real(cod);
    if real && is_lp(dom, Exponent::INFINITY) && is_lp(cod, Exponent::ONE) && n.max(m) <= enum_cutoff {
        return opnorm_inf_to_one(a).ok();
    }
    if is_lp(dom, Exponent::ONE) && is_lp(cod, Exponent::INFINITY) {
        return opnorm_one_to_inf(a).ok();
    }
    if is_two(dom) && is_two(cod) {
        return opnorm_spectral(a).ok();
    }
    if is_lp(dom, Exponent::ONE) {
        let (j, v) = max_column(a);
        let mut x = vec![0.0; n];
        x[j] = 1.0;
        let col: Vec<f64> = a.matrix.column(j).iter().copied().collect();
        let y = norming_functional(cod, &col);
        return Some(NormBracket::exact(v, Witness::Pair { x, y }, Method::ExactFormula));
    }
    if is_lp(cod, Exponent::INFINITY) {
        let (i, v) = max_row(a);
        let mut y = vec![0.0; m];
        y[i] = 1.0;
        let row: Vec<f64> = a.matrix.row(i).iter().copied().collect();
        let x = norming_functional(&dom.dual(), &row);
        return Some(NormBracket::exact(v, Witness::Pair { x, y }, Method::ExactFormula));
    }
    if real && is_lp(dom, Exponent::INFINITY) && n <= enum_cutoff {
        let cod = *cod;
        let mask = enumerate_signs(&a.matrix, &|v| cod.frame_norm(v));
        let x = sign_vector(mask, n);
        let y = norming_functional(&cod, &a.apply(&x));
        let value = pair_value(a, &x, &y);
        return Some(NormBracket::exact(value, Witness::Pair { x, y }, Method::ExactEnum));
    }
    if real && is_lp(cod, Exponent::ONE) && m <= enum_cutoff {
        let dual = dom.dual();
        let at = a.matrix.transpose();
        let mask = enumerate_signs(&at, &|v| dual.frame_norm(v));
        let y = sign_vector(mask, m);
        let x = norming_functional(&dual, &a.apply_transpose(&y));
        let value = pair_value(a, &x, &y);
        return Some(NormBracket::exact(value, Witness::Pair { x, y }, Method::ExactEnum));
    }
    if dom.family == Family::Lp && cod.family == Family::Lp && is_diagonal(&a.matrix) {
        return Some(diagonal_norm(a));
    }
    if dom.family == cod.family && dom.n == cod.n && is_scalar(&a.matrix) {
        return Some(scalar_norm(a));
    }
    rank_one_norm(a)
}

fn is_scalar(m: &DMatrix<f64>) -> bool {
    is_diagonal(m) && (0..m.nrows()).all(|i| m[(i, i)] == m[(0, 0)])
}

fn diagonal_norm(a: &OperatorMatrix) -> NormBracket {
    let d: Vec<f64> = a.matrix.diagonal().iter().copied().collect();
    let (p, q) = (a.domain.p, a.codomain.p);
    let n = d.len();
    let x: Vec<f64> = if p.reciprocal() >= q.reciprocal() {
        let k = crate::spaces::argmax_abs(&d);
        let mut x = vec![0.0; n];
        x[k] = 1.0;
        x
    } else {
        // ‖diag(d)‖_{p→q} = ‖d‖_r with 1/r = 1/q − 1/p, attained at |x_i| ∝ |d_i|^{r/p}.
        let r = 1.0 / (q.reciprocal() - p.reciprocal());
        let e = r * p.reciprocal();
        d.iter().map(|di| di.abs().powf(e)).collect()
    };
    let y = norming_functional(&a.codomain, &a.apply(&x));
    let value = pair_value(a, &x, &y);
    let formula = if p.reciprocal() >= q.reciprocal() {
        lp_norm(&d, Exponent::INFINITY)
    } else {
        lp_norm(&d, Exponent::from_reciprocal(q.reciprocal() - p.reciprocal()))
    };
    NormBracket {
        lower: value.min(formula),
        upper: formula.max(value),
        witness: Witness::Pair { x, y },
        method: Method::ExactFormula,
        upper_method: Method::ExactFormula,
        iterations: 0,
        restarts: 0,
    }
}

fn scalar_norm(a: &OperatorMatrix) -> NormBracket {
    let c = a.matrix[(0, 0)];
    let (dom, cod) = (&a.domain, &a.codomain);
    let d = dom.real_dimension();
    let emb = id_embedding_norm(dom.p, cod.p, dom.n);
    let mut x = vec![0.0; d];
    if emb == 1.0 {
        x[0] = 1.0;
    } else {
        for xi in x.iter_mut().take(dom.n) {
            *xi = 1.0;
        }
    }
    let y = norming_functional(cod, &a.apply(&x));
    let value = pair_value(a, &x, &y);
    let formula = c.abs() * emb;
    NormBracket {
        lower: value.min(formula),
        upper: formula.max(value),
        witness: Witness::Pair { x, y },
        method: Method::ExactFormula,
        upper_method: Method::ExactFormula,
        iterations: 0,
        restarts: 0,
    }
}

/// ‖id: X → X₂‖ where X₂ is the 2-version of X (Euclidean frame).
fn to_two(s: &SpaceDescriptor) -> f64 {
    id_embedding_norm(s.p, Exponent::TWO, s.n)
}

fn from_two(s: &SpaceDescriptor) -> f64 {
    id_embedding_norm(Exponent::TWO, s.p, s.n)
}

fn rank_one_norm(a: &OperatorMatrix) -> Option<NormBracket> {
    let sv = linalg::singular_values(&a.matrix);
    let s1 = sv[0];
    let s2 = sv.get(1).copied().unwrap_or(0.0);
    if s1 == 0.0 || s2 > 1e-13 * s1 {
        return None;
    }
    let (s, u, v) = linalg::top_singular(&a.matrix);
    let (u, v) = (u.as_slice().to_vec(), v.as_slice().to_vec());
    let x = norming_functional(&a.domain.dual(), &v);
    let y = norming_functional(&a.codomain, &u);
    let value = pair_value(a, &x, &y);
    let formula = s * a.codomain.frame_norm(&u) * a.domain.dual().frame_norm(&v);
    let slack = s2 * sv.len() as f64 * to_two(&a.domain) * from_two(&a.codomain);
    Some(NormBracket {
        lower: value,
        upper: (formula + slack).max(value),
        witness: Witness::Pair { x, y },
        method: Method::ExactFormula,
        upper_method: Method::ExactFormula,
        iterations: 0,
        restarts: 0,
    })
}

/// Exact value of `A` between the `r`- and `s`-versions of its spaces, when
/// a route exists. No witness is built.
fn exact_value(a: &DMatrix<f64>, dom: &SpaceDescriptor, cod: &SpaceDescriptor, enum_cutoff: usize) -> Option<f64> {
    let (m, n) = a.shape();
    let real = is_real(dom) && is_real(cod);
    if is_lp(dom, Exponent::ONE) && is_lp(cod, Exponent::INFINITY) {
        return Some(a.iter().fold(0.0_f64, |mx, x| mx.max(x.abs())));
    }
    if is_two(dom) && is_two(cod) {
        return Some(linalg::singular_values(a).first().copied().unwrap_or(0.0));
    }
    if is_lp(dom, Exponent::ONE) {
        return Some((0..n).map(|j| cod.frame_norm(a.column(j).as_slice())).fold(0.0, f64::max));
    }
    if is_lp(cod, Exponent::INFINITY) {
        let dual = dom.dual();
        return Some(
            (0..m)
                .map(|i| dual.frame_norm(&a.row(i).iter().copied().collect::<Vec<_>>()))
                .fold(0.0, f64::max),
        );
    }
    if real && is_lp(dom, Exponent::INFINITY) && n <= enum_cutoff {
        let cod = *cod;
        let mask = enumerate_signs(a, &|v| cod.frame_norm(v));
        let s = sign_vector(mask, n);
        return Some(cod.frame_norm((a * nalgebra::DVector::from_vec(s)).as_slice()));
    }
    if real && is_lp(cod, Exponent::ONE) && m <= enum_cutoff {
        let dual = dom.dual();
        let at = a.transpose();
        let mask = enumerate_signs(&at, &|v| dual.frame_norm(v));
        let t = sign_vector(mask, m);
        return Some(dual.frame_norm((at * nalgebra::DVector::from_vec(t)).as_slice()));
    }
    None
}

fn chain_exponents(s: &SpaceDescriptor) -> Vec<Exponent> {
    let mut v = match s.family {
        Family::Lp => vec![Exponent::ONE, Exponent::TWO, Exponent::INFINITY],
        Family::SchattenSa => vec![Exponent::TWO],
    };
    if !v.contains(&s.p) {
        v.push(s.p);
    }
    v
}

/// Certified upper bound on the complex ‖A‖_{ℓ_∞→ℓ_1} (hence on the real
/// one) from a dual feasible point of the semidefinite relaxation
/// max ⟨M, X⟩ over correlation matrices X, M = [[0, A], [Aᵀ, 0]] / 2:
/// any `d` with Diag(d) ⪰ M gives the bound Σ d_i. The point is read off a
/// low-rank primal solution found by the mixing method and then shifted by
/// the smallest eigenvalue so that feasibility holds exactly.
pub fn sdp_inf_to_one_upper(a: &DMatrix<f64>, seed: u64) -> f64 {
    let (m, n) = a.shape();
    let big = m + n;
    if big == 0 || a.iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    let mut mm = DMatrix::zeros(big, big);
    for i in 0..m {
        for j in 0..n {
            mm[(i, m + j)] = a[(i, j)] / 2.0;
            mm[(m + j, i)] = a[(i, j)] / 2.0;
        }
    }
    let k = ((2.0 * big as f64).sqrt().ceil() as usize + 1).min(big);
    let mut rng = seeds::stream_rng(seed, seeds::TAG_BETA, 0);
    let mut v = DMatrix::from_vec(k, big, seeds::gaussian_vec(&mut rng, k * big));
    for i in 0..big {
        let nv = v.column(i).norm();
        v.column_mut(i).scale_mut(1.0 / nv);
    }
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..500 {
        for i in 0..big {
            // M has a zero diagonal, so g_i = Σ_{j≠i} M_ij v_j.
            let g = &v * mm.column(i);
            let gn = g.norm();
            if gn > 0.0 {
                v.column_mut(i).copy_from(&(g / gn));
            }
        }
        let val = linalg::frob_inner(&mm, &(v.transpose() * &v));
        if val - prev <= 1e-12 * val.abs() {
            break;
        }
        prev = val;
    }
    let gram = v.transpose() * &v;
    let mut d: Vec<f64> = (0..big).map(|i| (0..big).map(|j| mm[(i, j)] * gram[(i, j)]).sum()).collect();
    let mut s = -mm.clone();
    for i in 0..big {
        s[(i, i)] += d[i];
    }
    let lmin = linalg::min_eigenvalue(&s);
    let guard = 1e-12 * linalg::frob_norm(&s) * big as f64;
    let shift = (-lmin).max(0.0) + guard;
    for di in d.iter_mut() {
        *di += shift;
    }
    d.iter().sum()
}

/// Complex interpolation between the spectral point (1/2, 1/2) and the
/// point where the ray through (1/p, 1/q) leaves the unit square. On the
/// column-norm edge (domain ℓ_1) and the row-norm edge (codomain ℓ_∞) the
/// real and complex norms coincide; on the other two edges the complex norm
/// is at most ‖A‖_{ℓ_∞→ℓ_1}, bounded through the relaxation above.
fn interpolation_bound(a: &DMatrix<f64>, dom: &SpaceDescriptor, cod: &SpaceDescriptor, seed: u64) -> Option<f64> {
    if dom.family != Family::Lp || cod.family != Family::Lp || !is_real(dom) || !is_real(cod) {
        return None;
    }
    let eps = 1e-15;
    let (x, y) = (dom.p.reciprocal(), cod.p.reciprocal());
    let (dx, dy) = (x - 0.5, y - 0.5);
    if dx.abs() < eps && dy.abs() < eps {
        return None;
    }
    let exit = |d: f64| if d.abs() < eps { f64::INFINITY } else { 0.5 / d.abs() };
    let t = exit(dx).min(exit(dy));
    let qx = (0.5 + t * dx).clamp(0.0, 1.0);
    let qy = (0.5 + t * dy).clamp(0.0, 1.0);
    let theta = 1.0 / t;
    let m0 = linalg::singular_values(a).first().copied().unwrap_or(0.0);
    let (m, n) = a.shape();
    let m1 = if qx >= 1.0 - 1e-12 {
        let q = Exponent::from_reciprocal(qy);
        (0..n).map(|j| lp_norm(a.column(j).as_slice(), q)).fold(0.0, f64::max)
    } else if qy <= 1e-12 {
        let r = Exponent::from_reciprocal(qx).conjugate();
        (0..m)
            .map(|i| lp_norm(&a.row(i).iter().copied().collect::<Vec<_>>(), r))
            .fold(0.0, f64::max)
    } else {
        sdp_inf_to_one_upper(a, seed)
    };
    Some(m0.powf(1.0 - theta) * m1.powf(theta))
}

/// Sound upper bound without any ascent.
pub fn opnorm_upper(a: &OperatorMatrix, opts: &OpnormOptions) -> (f64, Method) {
    let (dom, cod) = (&a.domain, &a.codomain);
    let mut best = (f64::INFINITY, Method::BallInclusion);
    if opts.use_exact {
        if let Some(b) = exact_norm(a, opts.chain_enum_cutoff.min(ENUM_CUTOFF)) {
            best = (b.upper, b.upper_method);
        }
    }
    for r in chain_exponents(dom) {
        for s in chain_exponents(cod) {
            let d2 = dom.with_p(r);
            let c2 = cod.with_p(s);
            let cutoff = if opts.use_exact { opts.chain_enum_cutoff } else { 0 };
            if let Some(v) = exact_value(&a.matrix, &d2, &c2, cutoff) {
                let bound = id_embedding_norm(dom.p, r, dom.n) * v * id_embedding_norm(s, cod.p, cod.n);
                if bound < best.0 {
                    let method = if r == dom.p && s == cod.p { exact_method(&d2, &c2) } else { Method::BallInclusion };
                    best = (bound, method);
                }
            }
        }
    }
    if let Some(v) = interpolation_bound(&a.matrix, dom, cod, opts.seed) {
        if v < best.0 {
            best = (v, Method::BallInclusion);
        }
    }
    let corner = is_lp(dom, Exponent::INFINITY) && is_lp(cod, Exponent::ONE) && is_real(dom) && is_real(cod);
    if corner && !best.1.is_exact() {
        let v = sdp_inf_to_one_upper(&a.matrix, opts.seed);
        if v < best.0 {
            best = (v, Method::BallInclusion);
        }
    }
    best
}

fn exact_method(dom: &SpaceDescriptor, cod: &SpaceDescriptor) -> Method {
    if is_two(dom) && is_two(cod) {
        Method::Spectral
    } else if is_lp(dom, Exponent::ONE) || is_lp(cod, Exponent::INFINITY) {
        Method::ExactFormula
    } else {
        Method::ExactEnum
    }
}

struct AscentResult {
    value: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    iterations: usize,
}

fn ascend_from(a: &OperatorMatrix, mut x: Vec<f64>, opts: &OpnormOptions) -> AscentResult {
    let dom_dual = a.domain.dual();
    let nx = a.domain.frame_norm(&x);
    if nx > 0.0 {
        x.iter_mut().for_each(|v| *v /= nx);
    }
    let mut y = norming_functional(&a.codomain, &a.apply(&x));
    let mut value = linalg::dot(&y, &a.apply(&x));
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        let aty = a.apply_transpose(&y);
        let x_new = norming_functional(&dom_dual, &aty);
        let ax = a.apply(&x_new);
        let y_new = norming_functional(&a.codomain, &ax);
        let v_new = linalg::dot(&y_new, &ax);
        if v_new <= value * (1.0 + opts.tol) {
            if v_new > value {
                x = x_new;
                y = y_new;
            }
            break;
        }
        x = x_new;
        y = y_new;
        value = v_new;
    }
    let value = pair_value(a, &x, &y);
    AscentResult { value, x, y, iterations }
}

/// Alternating maximization of ⟨y, Ax⟩ over the unit spheres of `E` and
/// `F*`. Restart 0 starts from the top right singular vector, the others
/// from seeded Gaussian directions. Returns the best run, ties going to the
/// lowest restart index.
pub fn alt_max(a: &OperatorMatrix, opts: &OpnormOptions) -> NormBracket {
    let d = a.domain.real_dimension();
    let restarts = opts.restarts.max(1);
    let runs: Vec<AscentResult> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = if r == 0 {
                linalg::top_singular(&a.matrix).2.as_slice().to_vec()
            } else {
                let mut rng = seeds::stream_rng(opts.seed, seeds::TAG_ALT_MAX, r as u64);
                seeds::gaussian_vec(&mut rng, d)
            };
            ascend_from(a, x0, opts)
        })
        .collect();
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = k;
        }
    }
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let r = &runs[best];
    NormBracket {
        lower: r.value.max(0.0),
        upper: f64::INFINITY,
        witness: Witness::Pair { x: r.x.clone(), y: r.y.clone() },
        method: Method::AltMax,
        upper_method: Method::BallInclusion,
        iterations,
        restarts,
    }
}

/// Certified bracket for ‖A‖_{E→F}.
pub fn opnorm_bracket(a: &OperatorMatrix, opts: &OpnormOptions) -> NormBracket {
    if opts.use_exact {
        if let Some(b) = exact_norm(a, ENUM_CUTOFF) {
            return b;
        }
    }
    let mut b = alt_max(a, opts);
    let (upper, method) = opnorm_upper(a, opts);
    b.upper = upper.max(b.lower);
    b.upper_method = method;
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lp(n: usize, p: f64) -> SpaceDescriptor {
        let e = if p.is_infinite() { Exponent::INFINITY } else { Exponent::new(p).unwrap() };
        SpaceDescriptor::lp(n, e)
    }

    fn op(rows: usize, cols: usize, data: &[f64], p: f64, q: f64) -> OperatorMatrix {
        OperatorMatrix::new(DMatrix::from_row_slice(rows, cols, data), lp(cols, p), lp(rows, q)).unwrap()
    }

    const INF: f64 = f64::INFINITY;

    #[test]
    fn inf_to_one_examples() {
        let b = opnorm_inf_to_one(&op(2, 2, &[1.0, 0.0, 0.0, 1.0], INF, 1.0)).unwrap();
        assert_eq!(b.lower, 2.0);
        assert_eq!(b.witness, Witness::Pair { x: vec![1.0, 1.0], y: vec![1.0, 1.0] });
        let b = opnorm_inf_to_one(&op(2, 2, &[1.0, 1.0, 1.0, -1.0], INF, 1.0)).unwrap();
        assert_eq!(b.lower, 2.0);
        let ones = OperatorMatrix::new(DMatrix::from_element(5, 5, 1.0), lp(5, INF), lp(5, 1.0)).unwrap();
        assert_eq!(opnorm_inf_to_one(&ones).unwrap().upper, 25.0);
        assert!(matches!(
            opnorm_inf_to_one(&op(1, 1, &[1.0], 2.0, 1.0)),
            Err(GaugeError::WrongSpacePair(_))
        ));
        let big = OperatorMatrix::new(DMatrix::zeros(21, 2), lp(2, INF), lp(21, 1.0)).unwrap();
        assert!(matches!(opnorm_inf_to_one(&big), Err(GaugeError::SizeOverCutoff { .. })));
    }

    #[test]
    fn one_to_inf_and_spectral_examples() {
        assert_eq!(opnorm_one_to_inf(&op(2, 2, &[1.0, 2.0, 3.0, 4.0], 1.0, INF)).unwrap().lower, 4.0);
        assert_eq!(opnorm_one_to_inf(&op(2, 2, &[1.0, 0.0, 0.0, 1.0], 1.0, INF)).unwrap().lower, 1.0);
        assert_eq!(opnorm_one_to_inf(&op(2, 2, &[0.0; 4], 1.0, INF)).unwrap().lower, 0.0);
        assert_relative_eq!(opnorm_spectral(&op(2, 2, &[3.0, 0.0, 0.0, 1.0], 2.0, 2.0)).unwrap().lower, 3.0, epsilon = 1e-14);
        assert_relative_eq!(opnorm_spectral(&op(2, 2, &[0.0, 1.0, 0.0, 0.0], 2.0, 2.0)).unwrap().lower, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn identity_embeddings() {
        let opts = OpnormOptions::default();
        let id = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let b = opnorm_bracket(&op(3, 3, &id, 1.0, 2.0), &opts);
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        let b = opnorm_bracket(&op(3, 3, &id, 2.0, 1.0), &opts);
        assert_relative_eq!(b.lower, 3f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(b.upper, 3f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn adjoint_examples() {
        let a = op(2, 2, &[1.0, 2.0, 3.0, 4.0], INF, 1.0);
        let t = adjoint(&a);
        assert_eq!(t.matrix, DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 2.0, 4.0]));
        assert_eq!(t.domain, lp(2, INF));
        assert_eq!(t.codomain, lp(2, 1.0));
        assert_eq!(adjoint(&t), a);
        assert_eq!(opnorm_inf_to_one(&a).unwrap().lower, opnorm_inf_to_one(&t).unwrap().lower);
    }

    #[test]
    fn alt_max_matches_enumeration_on_small_case() {
        let a = op(3, 3, &[1.0, -2.0, 0.5, 0.3, 1.0, -1.0, 2.0, 0.1, 0.7], INF, 1.0);
        let exact = opnorm_inf_to_one(&a).unwrap().lower;
        let am = alt_max(&a, &OpnormOptions::default());
        assert!(am.lower <= exact + 1e-12);
        assert_relative_eq!(am.lower, exact, max_relative = 1e-9);
    }

    #[test]
    fn general_pair_bracket_is_sound() {
        let a = op(3, 3, &[1.0, -2.0, 0.5, 0.3, 1.0, -1.0, 2.0, 0.1, 0.7], 3.0, 3.0);
        let b = opnorm_bracket(&a, &OpnormOptions::default());
        assert!(b.lower <= b.upper);
        assert_relative_eq!(witness_value(&a, &b).unwrap(), b.lower, max_relative = 1e-9);
        assert!(b.upper < 1.5 * b.lower);
    }

    #[test]
    fn diagonal_formula() {
        // ℓ_∞ → ℓ_1 of diag(d) is Σ|d|; here through the general diagonal route ℓ_4 → ℓ_2.
        let a = op(3, 3, &[1.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 3.0], 4.0, 2.0);
        let b = exact_norm(&a, 20).unwrap();
        // 1/r = 1/2 − 1/4, r = 4.
        let expect = (1.0f64 + 16.0 + 81.0).powf(0.25);
        assert_relative_eq!(b.upper, expect, max_relative = 1e-12);
        assert_relative_eq!(b.lower, expect, max_relative = 1e-12);
    }

    #[test]
    fn relaxation_bound_is_sound() {
        let a = op(3, 3, &[1.0, -2.0, 0.5, 0.3, 1.0, -1.0, 2.0, 0.1, 0.7], INF, 1.0);
        let exact = opnorm_inf_to_one(&a).unwrap().lower;
        let sdp = sdp_inf_to_one_upper(&a.matrix, 0);
        assert!(sdp >= exact - 1e-12);
        assert!(sdp <= 1.8 * exact);
        let id = linalg::eye(4, 4);
        assert_relative_eq!(sdp_inf_to_one_upper(&id, 0), 4.0, max_relative = 1e-8);
    }

    #[test]
    fn interpolation_beats_chain_for_mixed_exponents() {
        let a = op(2, 2, &[1.0, 1.0, 1.0, -1.0], 1.5, 3.0);
        let v = interpolation_bound(&a.matrix, &a.domain, &a.codomain, 0).unwrap();
        let b = alt_max(&a, &OpnormOptions::default());
        assert!(b.lower <= v + 1e-12);
    }
}
