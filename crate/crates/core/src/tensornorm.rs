//! Injective, projective and nuclear norms of two-fold tensors, and the
//! ratio constants ρ(E, F) and ρ⁺(E).
//!
//! A tensor `z ∈ E⊗F` is stored as its `dim E × dim F` coefficient matrix in
//! frame coordinates; as a map `E* → F` it acts by the transpose.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{GaugeError, Result};
use crate::linalg;
use crate::opnorm::{
    alt_max, opnorm_bracket, opnorm_upper, Method, NormBracket, OperatorMatrix, OpnormOptions, Witness,
};
use crate::seeds;
use crate::spaces::{id_embedding_norm, norming_functional, Exponent, Family, SpaceDescriptor};

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2 {
    pub coeffs: DMatrix<f64>,
    pub left: SpaceDescriptor,
    pub right: SpaceDescriptor,
}

impl Tensor2 {
    pub fn new(coeffs: DMatrix<f64>, left: SpaceDescriptor, right: SpaceDescriptor) -> Result<Self> {
        if coeffs.nrows() != left.real_dimension() {
            return Err(GaugeError::DimensionMismatch { expected: left.real_dimension(), got: coeffs.nrows() });
        }
        if coeffs.ncols() != right.real_dimension() {
            return Err(GaugeError::DimensionMismatch { expected: right.real_dimension(), got: coeffs.ncols() });
        }
        Ok(Tensor2 { coeffs, left, right })
    }

    /// The map `E* → F`.
    pub fn as_operator(&self) -> OperatorMatrix {
        OperatorMatrix { matrix: self.coeffs.transpose(), domain: self.left.dual(), codomain: self.right }
    }

    /// Σ e_i ⊗ e_i over the first `min(dim E, dim F)` frame vectors.
    pub fn identity(left: SpaceDescriptor, right: SpaceDescriptor) -> Self {
        let (a, b) = (left.real_dimension(), right.real_dimension());
        Tensor2 { coeffs: linalg::eye(a, b), left, right }
    }
}

/// Injective norm of a dual tensor `w ∈ E*⊗F*`, as the map `E → F*`.
fn dual_operator(w: &DMatrix<f64>, left: &SpaceDescriptor, right: &SpaceDescriptor) -> OperatorMatrix {
    OperatorMatrix { matrix: w.transpose(), domain: *left, codomain: right.dual() }
}

/// A finite representation z = Σ e_k ⊗ f_k (frame coordinates).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Decomposition {
    pub terms: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Decomposition {
    pub fn value(&self, left: &SpaceDescriptor, right: &SpaceDescriptor) -> f64 {
        self.terms.iter().map(|(e, f)| left.frame_norm(e) * right.frame_norm(f)).sum()
    }

    pub fn resum(&self, rows: usize, cols: usize) -> DMatrix<f64> {
        let mut z = DMatrix::zeros(rows, cols);
        for (e, f) in &self.terms {
            for i in 0..rows {
                if e[i] == 0.0 {
                    continue;
                }
                for j in 0..cols {
                    z[(i, j)] += e[i] * f[j];
                }
            }
        }
        z
    }

    fn push(&mut self, e: Vec<f64>, f: Vec<f64>) {
        if e.iter().any(|&x| x != 0.0) && f.iter().any(|&x| x != 0.0) {
            self.terms.push((e, f));
        }
    }
}

#[derive(Debug, Clone)]
pub struct TensorOptions {
    pub opnorm: OpnormOptions,
    /// Term cap for greedy peeling.
    pub max_terms: usize,
    /// Relative Frobenius residual at which peeling stops.
    pub residual_floor: f64,
    /// Rounds of coordinate ascent in the dual-witness search.
    pub ascent_rounds: usize,
    /// Restarts of the inner rank-one searches.
    pub inner_restarts: usize,
}

impl Default for TensorOptions {
    fn default() -> Self {
        TensorOptions { opnorm: OpnormOptions::default(), max_terms: 200, residual_floor: 1e-10, ascent_rounds: 2, inner_restarts: 4 }
    }
}

impl TensorOptions {
    fn inner(&self) -> OpnormOptions {
        OpnormOptions { restarts: self.inner_restarts, max_iter: 500, ..self.opnorm.clone() }
    }
}

pub fn injective_norm(z: &Tensor2, opts: &TensorOptions) -> NormBracket {
    opnorm_bracket(&z.as_operator(), &opts.opnorm)
}

pub fn injective_upper(z: &Tensor2, opts: &TensorOptions) -> f64 {
    opnorm_upper(&z.as_operator(), &opts.opnorm).0
}

fn frame_basis(dim: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    e
}

/// z = Σ_i b_i ⊗ row_i.
pub fn row_decomposition(z: &DMatrix<f64>) -> Decomposition {
    let mut d = Decomposition::default();
    for i in 0..z.nrows() {
        d.push(frame_basis(z.nrows(), i), z.row(i).iter().copied().collect());
    }
    d
}

/// z = Σ_j col_j ⊗ b_j.
pub fn column_decomposition(z: &DMatrix<f64>) -> Decomposition {
    let mut d = Decomposition::default();
    for j in 0..z.ncols() {
        d.push(z.column(j).iter().copied().collect(), frame_basis(z.ncols(), j));
    }
    d
}

/// z = Σ σ_k u_k ⊗ v_k.
pub fn svd_decomposition(z: &DMatrix<f64>) -> Decomposition {
    let mut d = Decomposition::default();
    if z.is_empty() {
        return d;
    }
    let svd = z.clone().svd(true, true);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    for k in 0..svd.singular_values.len() {
        let s = svd.singular_values[k];
        if s == 0.0 {
            continue;
        }
        d.push(u.column(k).iter().map(|x| x * s).collect(), vt.row(k).iter().copied().collect());
    }
    d
}

/// Greedy rank-one peeling. For ℓ_1 on either side the dictionary is the
/// basis of that side, which reproduces the exact row or column formula;
/// otherwise each step takes the rank-one direction found by alternating
/// maximization on the residual and projects the residual onto it. Any
/// residual left at the term cap is absorbed by its row decomposition.
pub fn greedy_peeling(z: &Tensor2, opts: &TensorOptions) -> Decomposition {
    let (left, right) = (&z.left, &z.right);
    let scale = linalg::frob_norm(&z.coeffs);
    let mut d = Decomposition::default();
    if scale == 0.0 {
        return d;
    }
    let mut r = z.coeffs.clone();
    let left_l1 = left.family == Family::Lp && left.p.is_one();
    let right_l1 = right.family == Family::Lp && right.p.is_one();
    let inner = opts.inner();
    for step in 0..opts.max_terms {
        if linalg::frob_norm(&r) <= opts.residual_floor * scale {
            break;
        }
        let (e, f) = if left_l1 {
            let i = (0..r.nrows())
                .max_by(|&a, &b| {
                    let na = right.frame_norm(&r.row(a).iter().copied().collect::<Vec<_>>());
                    let nb = right.frame_norm(&r.row(b).iter().copied().collect::<Vec<_>>());
                    na.partial_cmp(&nb).unwrap().then(b.cmp(&a))
                })
                .unwrap();
            (frame_basis(r.nrows(), i), r.row(i).iter().copied().collect::<Vec<_>>())
        } else if right_l1 {
            let j = (0..r.ncols())
                .max_by(|&a, &b| {
                    let na = left.frame_norm(r.column(a).as_slice());
                    let nb = left.frame_norm(r.column(b).as_slice());
                    na.partial_cmp(&nb).unwrap().then(b.cmp(&a))
                })
                .unwrap();
            (r.column(j).iter().copied().collect::<Vec<_>>(), frame_basis(r.ncols(), j))
        } else {
            let op = OperatorMatrix { matrix: r.transpose(), domain: left.dual(), codomain: *right };
            let o = OpnormOptions { seed: seeds::child_seed(inner.seed, seeds::TAG_PROJECTIVE, step as u64), ..inner.clone() };
            let b = alt_max(&op, &o);
            let (x, y) = match b.witness {
                Witness::Pair { x, y } => (x, y),
                _ => unreachable!(),
            };
            // Candidate 1: e = R y, f = Rᵀe/‖e‖². Candidate 2: f = Rᵀx, e = R f/‖f‖².
            let cand = |e: Vec<f64>| -> Option<(Vec<f64>, Vec<f64>, f64)> {
                let ee = linalg::dot(&e, &e);
                if ee == 0.0 {
                    return None;
                }
                let f: Vec<f64> = (0..r.ncols()).map(|j| (0..r.nrows()).map(|i| r[(i, j)] * e[i]).sum::<f64>() / ee).collect();
                let gain = linalg::dot(&f, &f) * ee;
                let cost = left.frame_norm(&e) * right.frame_norm(&f);
                Some((e, f, if cost > 0.0 { gain / cost } else { 0.0 }))
            };
            let cand_r = |f: Vec<f64>| -> Option<(Vec<f64>, Vec<f64>, f64)> {
                let ff = linalg::dot(&f, &f);
                if ff == 0.0 {
                    return None;
                }
                let e: Vec<f64> = (0..r.nrows()).map(|i| (0..r.ncols()).map(|j| r[(i, j)] * f[j]).sum::<f64>() / ff).collect();
                let gain = linalg::dot(&e, &e) * ff;
                let cost = left.frame_norm(&e) * right.frame_norm(&f);
                Some((e, f, if cost > 0.0 { gain / cost } else { 0.0 }))
            };
            let ry: Vec<f64> = (0..r.nrows()).map(|i| (0..r.ncols()).map(|j| r[(i, j)] * y[j]).sum()).collect();
            let rtx: Vec<f64> = (0..r.ncols()).map(|j| (0..r.nrows()).map(|i| r[(i, j)] * x[i]).sum()).collect();
            let c1 = cand(ry);
            let c2 = cand_r(rtx);
            match (c1, c2) {
                (Some(a), Some(b)) => {
                    if b.2 > a.2 {
                        (b.0, b.1)
                    } else {
                        (a.0, a.1)
                    }
                }
                (Some(a), None) => (a.0, a.1),
                (None, Some(b)) => (b.0, b.1),
                (None, None) => break,
            }
        };
        for i in 0..r.nrows() {
            for j in 0..r.ncols() {
                r[(i, j)] -= e[i] * f[j];
            }
        }
        d.push(e, f);
    }
    if linalg::frob_norm(&r) > 0.0 {
        for t in row_decomposition(&r).terms {
            d.terms.push(t);
        }
    }
    d
}

fn rank_one_decomposition(z: &DMatrix<f64>) -> Option<Decomposition> {
    let sv = linalg::singular_values(z);
    let s1 = *sv.first()?;
    let s2 = sv.get(1).copied().unwrap_or(0.0);
    if s1 == 0.0 || s2 > 1e-13 * s1 {
        return None;
    }
    Some(svd_decomposition(z))
}

/// Sound upper bound on ‖z‖_∧ with a decomposition attaining it.
pub fn projective_upper(z: &Tensor2, opts: &TensorOptions) -> (f64, Decomposition) {
    let (left, right) = (&z.left, &z.right);
    let mut cands = vec![row_decomposition(&z.coeffs), column_decomposition(&z.coeffs), svd_decomposition(&z.coeffs)];
    if let Some(d) = rank_one_decomposition(&z.coeffs) {
        cands.push(d);
    }
    let left_l1 = left.family == Family::Lp && left.p.is_one();
    let right_l1 = right.family == Family::Lp && right.p.is_one();
    let both_two = left.p.is_two() && right.p.is_two();
    if !(left_l1 || right_l1 || both_two) {
        cands.push(greedy_peeling(z, opts));
    }
    let mut best: Option<(f64, Decomposition)> = None;
    for d in cands {
        let v = d.value(left, right);
        if best.as_ref().map_or(true, |b| v < b.0) {
            best = Some((v, d));
        }
    }
    best.unwrap()
}

/// ⟨z, w⟩ divided by a sound upper bound on ‖w‖_∨ in E*⊗F*.
pub fn dual_ratio(z: &Tensor2, w: &DMatrix<f64>, opts: &OpnormOptions) -> (f64, f64) {
    let u = opnorm_upper(&dual_operator(w, &z.left, &z.right), opts).0;
    let pair = linalg::frob_inner(&z.coeffs, w);
    if u == 0.0 {
        return (0.0, 0.0);
    }
    (pair / u, u)
}

fn dual_candidates(z: &Tensor2, opts: &TensorOptions) -> Vec<DMatrix<f64>> {
    let c = &z.coeffs;
    let (rows, cols) = c.shape();
    let mut out = vec![c.clone(), c.map(|x| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 })];
    out.push(linalg::polar(c));
    let mut rn = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        let row: Vec<f64> = c.row(i).iter().copied().collect();
        if row.iter().any(|&x| x != 0.0) {
            let u = norming_functional(&z.right, &row);
            for j in 0..cols {
                rn[(i, j)] = u[j];
            }
        }
    }
    out.push(rn);
    let mut cn = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        let col: Vec<f64> = c.column(j).iter().copied().collect();
        if col.iter().any(|&x| x != 0.0) {
            let u = norming_functional(&z.left, &col);
            for i in 0..rows {
                cn[(i, j)] = u[i];
            }
        }
    }
    out.push(cn);
    for alpha in [0.5, 2.0] {
        out.push(c.map(|x| x.signum() * x.abs().powf(alpha)));
    }
    let b = alt_max(&z.as_operator(), &opts.inner());
    if let Witness::Pair { x, y } = b.witness {
        out.push(DMatrix::from_fn(rows, cols, |i, j| x[i] * y[j]));
    }
    out.retain(|w| w.iter().any(|&x| x != 0.0) && w.iter().all(|x| x.is_finite()));
    out
}

/// Certified lower bound on ‖z‖_∧ through a dual tensor `w`: ⟨z, w⟩ / U
/// with U a sound upper bound on ‖w‖_∨. The search scores a pool of
/// structured candidates and then runs coordinate ascent over their
/// combinations.
pub fn projective_lower(z: &Tensor2, opts: &TensorOptions) -> NormBracket {
    let rows = z.coeffs.nrows();
    let cols = z.coeffs.ncols();
    if linalg::frob_norm(&z.coeffs) == 0.0 {
        return NormBracket {
            lower: 0.0,
            upper: f64::INFINITY,
            witness: Witness::DualTensor { w: DMatrix::zeros(rows, cols), w_norm_upper: 0.0 },
            method: Method::AltMax,
            upper_method: Method::BallInclusion,
            iterations: 0,
            restarts: 0,
        };
    }
    let pool = dual_candidates(z, opts);
    let scores: Vec<(f64, f64)> = pool.par_iter().map(|w| dual_ratio(z, w, &opts.opnorm)).collect();
    let mut bi = 0;
    for k in 0..pool.len() {
        if scores[k].0 > scores[bi].0 {
            bi = k;
        }
    }
    let mut w = pool[bi].clone();
    let (mut best, mut best_u) = scores[bi];
    let mut iterations = 0;
    for _ in 0..opts.ascent_rounds {
        let mut improved = false;
        for c in &pool {
            let scale = linalg::frob_norm(&w) / linalg::frob_norm(c);
            for t in [0.5, 0.2, 0.05, -0.05] {
                iterations += 1;
                let cand = &w + c * (t * scale);
                let (v, u) = dual_ratio(z, &cand, &opts.opnorm);
                if v > best * (1.0 + 1e-12) {
                    best = v;
                    best_u = u;
                    w = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    NormBracket {
        lower: best.max(0.0),
        upper: f64::INFINITY,
        witness: Witness::DualTensor { w, w_norm_upper: best_u },
        method: Method::AltMax,
        upper_method: Method::BallInclusion,
        iterations,
        restarts: pool.len(),
    }
}

/// Re-evaluates a dual-tensor witness: ⟨z, w⟩ / U.
pub fn dual_witness_value(z: &Tensor2, b: &NormBracket) -> Option<f64> {
    match &b.witness {
        Witness::DualTensor { w, w_norm_upper } if *w_norm_upper > 0.0 => {
            Some(linalg::frob_inner(&z.coeffs, w) / w_norm_upper)
        }
        Witness::DualTensor { .. } => Some(0.0),
        _ => None,
    }
}

fn is_exact_projective_pair(z: &Tensor2) -> bool {
    let left_l1 = z.left.family == Family::Lp && z.left.p.is_one();
    let right_l1 = z.right.family == Family::Lp && z.right.p.is_one();
    left_l1 || right_l1 || (z.left.p.is_two() && z.right.p.is_two()) || rank_one_decomposition(&z.coeffs).is_some()
}

/// Lower and upper bounds on ‖z‖_∧ together.
pub fn projective_bracket(z: &Tensor2, opts: &TensorOptions) -> (NormBracket, Decomposition) {
    let mut b = projective_lower(z, opts);
    let (u, d) = projective_upper(z, opts);
    b.upper = u.max(b.lower);
    b.upper_method = if is_exact_projective_pair(z) { Method::ExactFormula } else { Method::BallInclusion };
    (b, d)
}

/// Nuclear norm of `A: E → F`, the projective norm of its tensor in E*⊗F.
/// The dual witness `w` is the trace-duality operator `C: F → E` with
/// tr(CA) = ⟨z, w⟩.
pub fn nuclear_tensor(a: &OperatorMatrix) -> Tensor2 {
    Tensor2 { coeffs: a.matrix.transpose(), left: a.domain.dual(), right: a.codomain }
}

pub fn nuclear_norm(a: &OperatorMatrix, opts: &TensorOptions) -> NormBracket {
    projective_bracket(&nuclear_tensor(a), opts).0
}

/// Banach–Mazur distance between ℓ_p^n and ℓ_q^n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceKind {
    Exact,
    UpperOnly,
}

pub fn banach_mazur_lp(p: Exponent, q: Exponent, n: usize) -> (f64, DistanceKind) {
    let (a, b) = (p.reciprocal(), q.reciprocal());
    let same_side = (a >= 0.5 && b >= 0.5) || (a <= 0.5 && b <= 0.5);
    let nf = n as f64;
    if same_side {
        (nf.powf((a - b).abs()), DistanceKind::Exact)
    } else {
        (nf.powf((a - 0.5).abs()) * nf.powf((0.5 - b).abs()), DistanceKind::UpperOnly)
    }
}

/// Sound upper bound on d(X, Y) for spaces of one family and size, through
/// the identity map.
fn distance_upper(x: &SpaceDescriptor, y: &SpaceDescriptor) -> f64 {
    id_embedding_norm(x.p, y.p, x.n) * id_embedding_norm(y.p, x.p, x.n)
}

/// Known values of ρ on anchor pairs.
fn rho_anchor(g: &SpaceDescriptor, h: &SpaceDescriptor) -> Option<f64> {
    let (dg, dh) = (g.real_dimension(), h.real_dimension());
    if g.p.is_two() && h.p.is_two() {
        return Some(dg.min(dh) as f64);
    }
    let lp_pair = g.family == Family::Lp && h.family == Family::Lp && g.n == h.n;
    if !lp_pair {
        return None;
    }
    let end = |s: &SpaceDescriptor| s.p.is_one() || s.p.is_infinite();
    let inner = |s: &SpaceDescriptor| !(s.p.is_one() || s.p.is_infinite());
    let q = if end(g) && inner(h) {
        h.p
    } else if end(h) && inner(g) {
        g.p
    } else {
        return None;
    };
    let e = q.reciprocal().max(q.conjugate().reciprocal());
    Some((g.n as f64).powf(e))
}

fn anchor_candidates(s: &SpaceDescriptor) -> Vec<SpaceDescriptor> {
    let mut v = vec![*s, s.with_p(Exponent::TWO)];
    if s.family == Family::Lp {
        v.push(s.with_p(Exponent::ONE));
        v.push(s.with_p(Exponent::INFINITY));
    }
    v
}

/// Sound upper bound on ρ(E, F): d(E,G)·d(F,H)·ρ(G,H) over anchor pairs,
/// together with the bound min(dim E, dim F).
pub fn rho_upper(e: &SpaceDescriptor, f: &SpaceDescriptor) -> f64 {
    let mut best = e.real_dimension().min(f.real_dimension()) as f64;
    for g in anchor_candidates(e) {
        for h in anchor_candidates(f) {
            if let Some(r) = rho_anchor(&g, &h) {
                best = best.min(distance_upper(e, &g) * distance_upper(f, &h) * r);
            }
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct RhoOptions {
    pub tensor: TensorOptions,
    /// Cap on dim E · dim F.
    pub cap: usize,
    pub gaussian_starts: usize,
    pub refine_steps: usize,
    pub seed: u64,
}

impl Default for RhoOptions {
    fn default() -> Self {
        RhoOptions { tensor: TensorOptions::default(), cap: 64, gaussian_starts: 8, refine_steps: 40, seed: 0 }
    }
}

/// Witness of a ratio bound: tensor, dual tensor and the two certified
/// norms used.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioWitness {
    pub z: DMatrix<f64>,
    pub w: DMatrix<f64>,
    pub w_norm_upper: f64,
    pub z_injective_upper: f64,
}

impl RatioWitness {
    pub fn value(&self) -> f64 {
        linalg::frob_inner(&self.z, &self.w) / (self.w_norm_upper * self.z_injective_upper)
    }
}

/// Certified ratio ‖z‖_∧,lower / ‖z‖_∨,upper.
pub fn certified_ratio(z: &Tensor2, opts: &TensorOptions) -> (f64, RatioWitness) {
    let inj = injective_upper(z, opts);
    let pl = projective_lower(z, opts);
    let (w, u) = match pl.witness {
        Witness::DualTensor { w, w_norm_upper } => (w, w_norm_upper),
        _ => unreachable!(),
    };
    let wit = RatioWitness { z: z.coeffs.clone(), w, w_norm_upper: u, z_injective_upper: inj };
    let v = if inj > 0.0 && u > 0.0 { wit.value() } else { 0.0 };
    (v, wit)
}

#[derive(Debug, Clone)]
pub struct RatioBracket {
    pub bracket: NormBracket,
    pub witness: RatioWitness,
}

fn structured_tensors(e: &SpaceDescriptor, f: &SpaceDescriptor) -> Vec<DMatrix<f64>> {
    let (a, b) = (e.real_dimension(), f.real_dimension());
    let mut v = vec![linalg::eye(a, b)];
    if a == b {
        if let Some(h) = linalg::hadamard(a) {
            v.push(h);
        }
        let n = a as f64;
        v.push(DMatrix::from_fn(a, a, |j, k| (2.0 * std::f64::consts::PI * (j * k) as f64 / n).cos()));
    }
    v
}

/// Bracket for ρ(E, F).
pub fn rho_bracket(e: &SpaceDescriptor, f: &SpaceDescriptor, opts: &RhoOptions) -> Result<RatioBracket> {
    let size = e.real_dimension() * f.real_dimension();
    if size > opts.cap {
        return Err(GaugeError::CapExceeded { size, cap: opts.cap });
    }
    let (a, b) = (e.real_dimension(), f.real_dimension());
    let mut starts = structured_tensors(e, f);
    for k in 0..opts.gaussian_starts {
        let mut rng = seeds::stream_rng(opts.seed, seeds::TAG_RHO, k as u64);
        starts.push(DMatrix::from_vec(a, b, seeds::gaussian_vec(&mut rng, a * b)));
    }
    let evals: Vec<(f64, RatioWitness)> = starts
        .par_iter()
        .map(|z| certified_ratio(&Tensor2 { coeffs: z.clone(), left: *e, right: *f }, &opts.tensor))
        .collect();
    let mut bi = 0;
    for k in 0..evals.len() {
        if evals[k].0 > evals[bi].0 {
            bi = k;
        }
    }
    let (mut best, mut wit) = evals[bi].clone();
    let upper = rho_upper(e, f);
    for step in 0..opts.refine_steps {
        if best >= upper * (1.0 - 1e-12) {
            break;
        }
        let mut rng = seeds::stream_rng(opts.seed, seeds::TAG_RHO, 1_000_000 + step as u64);
        let dir = DMatrix::from_vec(a, b, seeds::gaussian_vec(&mut rng, a * b));
        let t = 0.3 * linalg::frob_norm(&wit.z) / linalg::frob_norm(&dir) / (1.0 + step as f64 / 10.0);
        let cand = &wit.z + dir * t;
        let (v, w) = certified_ratio(&Tensor2 { coeffs: cand, left: *e, right: *f }, &opts.tensor);
        if v > best {
            best = v;
            wit = w;
        }
    }
    let lower = best.min(upper);
    let method = if (upper - lower).abs() <= 1e-12 * upper { Method::ExactFormula } else { Method::AltMax };
    Ok(RatioBracket {
        bracket: NormBracket {
            lower,
            upper: upper.max(best),
            witness: Witness::DualTensor { w: wit.w.clone(), w_norm_upper: wit.w_norm_upper },
            method,
            upper_method: Method::BallInclusion,
            iterations: opts.refine_steps,
            restarts: starts.len(),
        },
        witness: wit,
    })
}

#[derive(Debug, Clone)]
pub struct RhoPlusOptions {
    pub tensor: TensorOptions,
    /// Number of search candidates evaluated; larger budgets extend the
    /// same candidate sequence.
    pub budget: usize,
    pub seed: u64,
}

impl Default for RhoPlusOptions {
    fn default() -> Self {
        RhoPlusOptions { tensor: TensorOptions::default(), budget: 24, seed: 0 }
    }
}

/// The real DFT matrix B_n, b_jk = cos(2πjk/n)/√n, and A_n = B_n + I.
pub fn dft_real_matrix(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let nf = n as f64;
    let b = DMatrix::from_fn(n, n, |j, k| (2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / nf).cos() / nf.sqrt());
    let a = &b + linalg::eye(n, n);
    (b, a)
}

/// Lower bound on ρ⁺(E) over non-negative tensors z = GGᵀ.
pub fn rho_plus_lower(e: &SpaceDescriptor, opts: &RhoPlusOptions) -> RatioBracket {
    let d = e.real_dimension();
    let tensor = |z: DMatrix<f64>| Tensor2 { coeffs: z, left: *e, right: *e };
    let mut best: Option<(f64, RatioWitness)> = None;
    let mut seq: Vec<DMatrix<f64>> = vec![linalg::eye(d, d), dft_real_matrix(d).1];
    for k in 0..opts.budget.saturating_sub(2) {
        let mut rng = seeds::stream_rng(opts.seed, seeds::TAG_RHO, k as u64);
        let rank = 1 + k % d;
        let g = DMatrix::from_vec(d, rank, seeds::gaussian_vec(&mut rng, d * rank));
        seq.push(&g * g.transpose());
    }
    seq.truncate(opts.budget.max(1));
    for z in seq {
        let (v, w) = certified_ratio(&tensor(z), &opts.tensor);
        if best.as_ref().map_or(true, |b| v > b.0) {
            best = Some((v, w));
        }
    }
    let (v, w) = best.unwrap();
    RatioBracket {
        bracket: NormBracket {
            lower: v,
            upper: f64::INFINITY,
            witness: Witness::DualTensor { w: w.w.clone(), w_norm_upper: w.w_norm_upper },
            method: Method::AltMax,
            upper_method: Method::BallInclusion,
            iterations: 0,
            restarts: opts.budget,
        },
        witness: w,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lp(n: usize, p: f64) -> SpaceDescriptor {
        let e = if p.is_infinite() { Exponent::INFINITY } else { Exponent::new(p).unwrap() };
        SpaceDescriptor::lp(n, e)
    }

    #[test]
    fn injective_examples() {
        let opts = TensorOptions::default();
        let mut c = DMatrix::zeros(2, 2);
        c[(0, 0)] = 1.0;
        let z = Tensor2::new(c, lp(2, 2.0), lp(2, 2.0)).unwrap();
        assert_relative_eq!(injective_norm(&z, &opts).lower, 1.0, epsilon = 1e-14);
        let z = Tensor2::identity(lp(4, 2.0), lp(4, 2.0));
        assert_relative_eq!(injective_norm(&z, &opts).upper, 1.0, epsilon = 1e-14);
        for p in [1.5, 2.0, 3.0] {
            let z = Tensor2::identity(lp(5, 1.0), lp(5, p));
            let b = injective_norm(&z, &opts);
            assert_relative_eq!(b.lower, 5f64.powf(1.0 / p), max_relative = 1e-12);
            assert_relative_eq!(b.upper, 5f64.powf(1.0 / p), max_relative = 1e-12);
        }
    }

    #[test]
    fn projective_examples() {
        let opts = TensorOptions::default();
        let z = Tensor2::identity(lp(4, 2.0), lp(4, 2.0));
        assert_relative_eq!(projective_upper(&z, &opts).0, 4.0, max_relative = 1e-12);
        assert_relative_eq!(projective_lower(&z, &opts).lower, 4.0, max_relative = 1e-12);
        let z = Tensor2::identity(lp(4, 1.0), lp(4, 3.0));
        assert_relative_eq!(projective_upper(&z, &opts).0, 4.0, max_relative = 1e-12);
        assert_relative_eq!(projective_lower(&z, &opts).lower, 4.0, max_relative = 1e-12);
        let e = [1.0, -2.0, 0.5];
        let f = [0.3, 1.0];
        let z = Tensor2::new(DMatrix::from_fn(3, 2, |i, j| e[i] * f[j]), lp(3, 1.5), lp(2, 3.0)).unwrap();
        let expect = lp(3, 1.5).frame_norm(&e) * lp(2, 3.0).frame_norm(&f);
        assert_relative_eq!(projective_upper(&z, &opts).0, expect, max_relative = 1e-12);
    }

    #[test]
    fn nuclear_examples() {
        let opts = TensorOptions::default();
        let a = OperatorMatrix::new(linalg::eye(3, 3), lp(3, f64::INFINITY), lp(3, 1.0)).unwrap();
        let b = nuclear_norm(&a, &opts);
        assert_relative_eq!(b.lower, 3.0, max_relative = 1e-12);
        assert_relative_eq!(b.upper, 3.0, max_relative = 1e-12);
        let a = OperatorMatrix::new(linalg::eye(3, 3), lp(3, 2.0), lp(3, 2.0)).unwrap();
        let b = nuclear_norm(&a, &opts);
        assert_relative_eq!(b.lower, 3.0, max_relative = 1e-12);
        assert_relative_eq!(b.upper, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn banach_mazur_examples() {
        let (d, k) = banach_mazur_lp(Exponent::TWO, Exponent::new(4.0).unwrap(), 16);
        assert_relative_eq!(d, 2.0, max_relative = 1e-14);
        assert_eq!(k, DistanceKind::Exact);
        assert_eq!(banach_mazur_lp(Exponent::new(3.0).unwrap(), Exponent::new(3.0).unwrap(), 7).0, 1.0);
        let (d, k) = banach_mazur_lp(Exponent::ONE, Exponent::INFINITY, 9);
        assert_relative_eq!(d, 9.0, max_relative = 1e-14);
        assert_eq!(k, DistanceKind::UpperOnly);
    }

    #[test]
    fn rho_l2_and_l1_lp() {
        let opts = RhoOptions::default();
        for n in 1..=4 {
            let r = rho_bracket(&lp(n, 2.0), &lp(n, 2.0), &opts).unwrap();
            assert_relative_eq!(r.bracket.lower, n as f64, max_relative = 1e-10);
            assert_relative_eq!(r.bracket.upper, n as f64, max_relative = 1e-10);
        }
        let r = rho_bracket(&lp(4, 1.0), &lp(4, 3.0), &opts).unwrap();
        assert_relative_eq!(r.bracket.lower, 4f64.powf(2.0 / 3.0), max_relative = 1e-10);
        assert!(rho_bracket(&lp(9, 1.0), &lp(9, 1.0), &opts).is_err());
    }

    #[test]
    fn dft_matrix_sums() {
        let (b, a) = dft_real_matrix(4);
        assert_relative_eq!(b.iter().map(|x| x.abs()).sum::<f64>(), 6.0, max_relative = 1e-14);
        assert_relative_eq!(a.iter().map(|x| x.abs()).sum::<f64>(), 10.0, max_relative = 1e-14);
    }
}
