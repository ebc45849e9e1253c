//! Grothendieck-type constants K_G(E,F), K_G⁺(E,F) and γ(E) as certified
//! brackets.
//!
//! A K_G witness is a triple of operators A: E → E*, B: E* → F and
//! C: F → E, each scaled by a sound upper bound on its norm; its value is
//! tr(CBA) ≤ N(BA) ≤ K_G(E,F). A γ witness is a pair of positive
//! semidefinite A: E → E*, B: E* → E with value tr(AB).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::elliptope::{self, BetaOptions, ComplexMatrix, CorrelationFactor};
use crate::error::{GaugeError, Result};
use crate::opnorm::{opnorm_upper, Method, NormBracket, OperatorMatrix, OpnormOptions, Witness};
use crate::seeds;
use crate::spaces::{Exponent, SpaceDescriptor};
use crate::tensornorm::{self, rho_upper, TensorOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantName {
    Kg,
    KgPlus,
    Gamma,
    Rho,
    RhoPlus,
    Beta,
}

impl ConstantName {
    pub fn name(self) -> &'static str {
        match self {
            ConstantName::Kg => "KG",
            ConstantName::KgPlus => "KG_PLUS",
            ConstantName::Gamma => "GAMMA",
            ConstantName::Rho => "RHO",
            ConstantName::RhoPlus => "RHO_PLUS",
            ConstantName::Beta => "BETA",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstantWitness {
    None,
    /// Normalized A: E → E*, B: E* → F, C: F → E.
    Triple { a: OperatorMatrix, b: OperatorMatrix, c: OperatorMatrix },
    /// Normalized positive A: E → E*, B: E* → E.
    PsdPair { a: OperatorMatrix, b: OperatorMatrix },
}

impl ConstantWitness {
    pub fn value(&self) -> Option<f64> {
        match self {
            ConstantWitness::None => None,
            ConstantWitness::Triple { a, b, c } => Some(triple_value(&a.matrix, &b.matrix, &c.matrix)),
            ConstantWitness::PsdPair { a, b } => Some((&a.matrix * &b.matrix).trace()),
        }
    }

    /// Largest certified norm upper bound among the witness operators.
    pub fn max_norm_upper(&self, opts: &OpnormOptions) -> f64 {
        let ops: Vec<&OperatorMatrix> = match self {
            ConstantWitness::None => vec![],
            ConstantWitness::Triple { a, b, c } => vec![a, b, c],
            ConstantWitness::PsdPair { a, b } => vec![a, b],
        };
        ops.iter().map(|o| opnorm_upper(o, opts).0).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantEstimate {
    pub name: ConstantName,
    pub pair: (SpaceDescriptor, Option<SpaceDescriptor>),
    pub bracket: NormBracket,
    pub witness: ConstantWitness,
}

#[derive(Debug, Clone)]
pub struct KgOptions {
    pub opnorm: OpnormOptions,
    pub tensor: TensorOptions,
    pub gaussian_starts: usize,
    pub rounds: usize,
    pub seed: u64,
    /// Cap on dim E and dim F.
    pub cap: usize,
}

impl Default for KgOptions {
    fn default() -> Self {
        let tensor = TensorOptions { ascent_rounds: 1, ..TensorOptions::default() };
        KgOptions { opnorm: OpnormOptions::default(), tensor, gaussian_starts: 3, rounds: 4, seed: 0, cap: 8 }
    }
}

fn triple_value(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
    (c * b * a).trace()
}

fn normalized(m: DMatrix<f64>, dom: SpaceDescriptor, cod: SpaceDescriptor, opts: &OpnormOptions) -> Option<OperatorMatrix> {
    if !m.iter().all(|x| x.is_finite()) {
        return None;
    }
    let op = OperatorMatrix { matrix: m, domain: dom, codomain: cod };
    let u = opnorm_upper(&op, opts).0;
    if u > 0.0 && u.is_finite() {
        Some(op.scaled(1.0 / u))
    } else {
        None
    }
}

/// Scales `A: E → E*` down by a certified norm upper bound so the result
/// is contractive. Operators already certified contractive are returned
/// unchanged.
pub fn contraction_projection(e: &SpaceDescriptor, a: &DMatrix<f64>, opts: &OpnormOptions) -> Result<OperatorMatrix> {
    let op = OperatorMatrix::new(a.clone(), *e, e.dual())?;
    let u = opnorm_upper(&op, opts).0;
    if u == 0.0 {
        return Err(GaugeError::ZeroOperator);
    }
    Ok(op.scaled(1.0 / u.max(1.0)))
}

fn nuclear_witness(t: &OperatorMatrix, opts: &TensorOptions) -> Option<DMatrix<f64>> {
    match tensornorm::projective_lower(&tensornorm::nuclear_tensor(t), opts).witness {
        Witness::DualTensor { w, .. } if w.iter().any(|&x| x != 0.0) => Some(w),
        _ => None,
    }
}

fn psd_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    let s = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);
    let lam = eig.eigenvalues.map(|l| l.max(0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&lam) * eig.eigenvectors.transpose()
}

fn top_rank_one(m: &DMatrix<f64>) -> DMatrix<f64> {
    let s = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);
    let mut k = 0;
    for i in 0..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > eig.eigenvalues[k] {
            k = i;
        }
    }
    let v = eig.eigenvectors.column(k);
    &v * v.transpose()
}

/// Positive semidefinite candidates for maximizing tr(M A).
fn psd_candidates(m: &DMatrix<f64>, current: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
    let p = psd_part(m);
    let mut out = vec![p.clone(), top_rank_one(m)];
    let scale = current.norm() / p.norm().max(1e-300);
    for eta in [0.1, 0.5, 2.0] {
        out.push(psd_part(&(current + &p * (eta * scale))));
    }
    let sym = (m + m.transpose()) * 0.5;
    let mut signs = sym.map(|x| if x >= 0.0 { 1.0 } else { -1.0 });
    for i in 0..signs.nrows() {
        signs[(i, i)] = 1.0;
    }
    out.push(psd_part(&signs));
    // Maximizer over correlation matrices, exact for E = ℓ_1 where the
    // positive contractions are the PSD matrices with diagonal ≤ 1.
    let bopts = BetaOptions { restarts: 2, max_sweeps: 2000, complex: false, ..BetaOptions::default() };
    out.push(elliptope::correlation_max(&ComplexMatrix::real(sym), m.nrows(), &bopts).factor.gram().re);
    out
}

#[derive(Debug, Clone)]
struct Triple {
    a: OperatorMatrix,
    b: OperatorMatrix,
    c: OperatorMatrix,
    value: f64,
}

impl Triple {
    fn build(a: OperatorMatrix, b: OperatorMatrix, c: OperatorMatrix) -> Self {
        let value = triple_value(&a.matrix, &b.matrix, &c.matrix);
        Triple { a, b, c, value }
    }
}

fn c_step(t: &Triple, f: &SpaceDescriptor, e: &SpaceDescriptor, opts: &KgOptions) -> Option<Triple> {
    let ba = OperatorMatrix { matrix: &t.b.matrix * &t.a.matrix, domain: *e, codomain: *f };
    let w = nuclear_witness(&ba, &opts.tensor)?;
    let c = normalized(w, *f, *e, &opts.opnorm)?;
    Some(Triple::build(t.a.clone(), t.b.clone(), c))
}

fn a_step(t: &Triple, e: &SpaceDescriptor, positive: bool, opts: &KgOptions) -> Option<Triple> {
    let m = &t.c.matrix * &t.b.matrix;
    let cands: Vec<DMatrix<f64>> = if positive {
        psd_candidates(&m.transpose(), &t.a.matrix)
    } else {
        let mop = OperatorMatrix { matrix: m.clone(), domain: e.dual(), codomain: *e };
        nuclear_witness(&mop, &opts.tensor).into_iter().collect()
    };
    cands
        .into_iter()
        .filter_map(|a| normalized(a, *e, e.dual(), &opts.opnorm))
        .map(|a| Triple::build(a, t.b.clone(), t.c.clone()))
        .max_by(|x, y| x.value.partial_cmp(&y.value).unwrap())
}

fn b_step(t: &Triple, e: &SpaceDescriptor, f: &SpaceDescriptor, opts: &KgOptions) -> Option<Triple> {
    let ac = OperatorMatrix { matrix: &t.a.matrix * &t.c.matrix, domain: *f, codomain: e.dual() };
    let w = nuclear_witness(&ac, &opts.tensor)?;
    let b = normalized(w, e.dual(), *f, &opts.opnorm)?;
    Some(Triple::build(t.a.clone(), b, t.c.clone()))
}

/// Alternating ascent on tr(CBA) from a starting pair (A, B).
fn ascend_triple(
    e: &SpaceDescriptor,
    f: &SpaceDescriptor,
    a0: DMatrix<f64>,
    b0: DMatrix<f64>,
    positive: bool,
    opts: &KgOptions,
) -> Option<Triple> {
    let a = normalized(a0, *e, e.dual(), &opts.opnorm)?;
    let b = normalized(b0, e.dual(), *f, &opts.opnorm)?;
    let zero_c = OperatorMatrix {
        matrix: DMatrix::zeros(e.real_dimension(), f.real_dimension()),
        domain: *f,
        codomain: *e,
    };
    let mut best = c_step(&Triple::build(a, b, zero_c), f, e, opts)?;
    for _ in 0..opts.rounds {
        let before = best.value;
        for step in 0..3 {
            let next = match step {
                0 => a_step(&best, e, positive, opts),
                1 => b_step(&best, e, f, opts),
                _ => c_step(&best, f, e, opts),
            };
            if let Some(n) = next {
                if n.value > best.value {
                    best = n;
                }
            }
        }
        if best.value <= before * (1.0 + 1e-9) {
            break;
        }
    }
    Some(best)
}

/// Witness for (E, F*) from one for (E, F): (Aᵀ, Cᵀ, Bᵀ) with the same
/// trace. Each transpose has the same norm as the contraction it comes
/// from, so it is rescaled only when its own certified bound is below 1.
fn transfer_dual(t: &Triple, e: &SpaceDescriptor, f: &SpaceDescriptor, opts: &OpnormOptions) -> Triple {
    let fd = f.dual();
    let lift = |m: DMatrix<f64>, dom: SpaceDescriptor, cod: SpaceDescriptor| {
        let op = OperatorMatrix { matrix: m, domain: dom, codomain: cod };
        let u = opnorm_upper(&op, opts).0;
        if u > 0.0 && u < 1.0 {
            op.scaled(1.0 / u)
        } else {
            op
        }
    };
    let a = lift(t.a.matrix.transpose(), *e, e.dual());
    let b = lift(t.c.matrix.transpose(), e.dual(), fd);
    let c = lift(t.b.matrix.transpose(), fd, *e);
    Triple::build(a, b, c)
}

fn start_pairs(e: &SpaceDescriptor, f: &SpaceDescriptor, positive: bool, opts: &KgOptions) -> Vec<(DMatrix<f64>, DMatrix<f64>)> {
    let (de, df) = (e.real_dimension(), f.real_dimension());
    let eye_b = crate::linalg::eye(df, de);
    let mut out = vec![(DMatrix::identity(de, de), eye_b.clone())];
    if let Some(h) = crate::linalg::hadamard(de) {
        let a = if positive { &h * h.transpose() } else { h.clone() };
        out.push((a, eye_b.clone()));
    }
    if positive {
        // Unit vectors equally spaced on a circle.
        let cyc = DMatrix::from_fn(de, de, |i, j| (2.0 * std::f64::consts::PI * (i as f64 - j as f64) / de as f64).cos());
        out.push((cyc, eye_b.clone()));
    }
    for k in 0..opts.gaussian_starts {
        let mut rng = seeds::stream_rng(opts.seed, seeds::TAG_KG, k as u64);
        let g = DMatrix::from_vec(de, de, seeds::gaussian_vec(&mut rng, de * de));
        let b = DMatrix::from_vec(df, de, seeds::gaussian_vec(&mut rng, df * de));
        // Low-rank correlation starts escape the identity-like fixed point.
        let a = if positive { elliptope::random_correlation(de, 2 + k % 2, seeds::child_seed(opts.seed, seeds::TAG_KG, k as u64)) } else { g };
        out.push((a, b));
    }
    out
}

fn best_triple(cands: Vec<Triple>) -> Option<Triple> {
    cands.into_iter().max_by(|x, y| x.value.partial_cmp(&y.value).unwrap())
}

fn check_cap(e: &SpaceDescriptor, f: &SpaceDescriptor, cap: usize) -> Result<()> {
    for s in [e, f] {
        if s.real_dimension() > cap {
            return Err(GaugeError::CapExceeded { size: s.real_dimension(), cap });
        }
    }
    Ok(())
}

fn triple_estimate(name: ConstantName, e: &SpaceDescriptor, f: &SpaceDescriptor, t: Option<Triple>, upper: f64, restarts: usize) -> ConstantEstimate {
    let (lower, witness) = match t {
        Some(t) => (t.value.max(0.0), ConstantWitness::Triple { a: t.a, b: t.b, c: t.c }),
        None => (0.0, ConstantWitness::None),
    };
    ConstantEstimate {
        name,
        pair: (*e, Some(*f)),
        bracket: NormBracket {
            lower,
            upper: upper.max(lower),
            witness: Witness::None,
            method: Method::AltMax,
            upper_method: Method::BallInclusion,
            iterations: 0,
            restarts,
        },
        witness,
    }
}

fn kg_search(e: &SpaceDescriptor, f: &SpaceDescriptor, positive: bool, extra: Vec<(DMatrix<f64>, DMatrix<f64>)>, opts: &KgOptions) -> Vec<Triple> {
    let mut starts = start_pairs(e, f, positive, opts);
    starts.extend(extra);
    starts.into_par_iter().filter_map(|(a, b)| ascend_triple(e, f, a, b, positive, opts)).collect()
}

/// Lower bound on K_G(E, F) by alternating ascent over (A, B, C). Searches
/// run for both F and F*, and each result is transferred to the other side.
pub fn kg_lower(e: &SpaceDescriptor, f: &SpaceDescriptor, opts: &KgOptions) -> Result<ConstantEstimate> {
    check_cap(e, f, opts.cap)?;
    let fd = f.dual();
    // Positive witnesses are feasible for K_G as well.
    let mut cands = kg_search(e, f, false, vec![], opts);
    cands.extend(kg_search(e, f, true, positive_extra_starts(e, f, opts), opts));
    let restarts = cands.len();
    let mut dual = kg_search(e, &fd, false, vec![], opts);
    dual.extend(kg_search(e, &fd, true, positive_extra_starts(e, &fd, opts), opts));
    let from_dual: Vec<Triple> = dual
        .iter()
        .map(|t| transfer_dual(t, e, &fd, &opts.opnorm))
        .collect();
    cands.extend(from_dual);
    Ok(triple_estimate(ConstantName::Kg, e, f, best_triple(cands), kg_upper(e, f), restarts))
}

/// min(ρ(E,F), ρ(E,F*)) upper endpoints.
pub fn kg_upper(e: &SpaceDescriptor, f: &SpaceDescriptor) -> f64 {
    rho_upper(e, f).min(rho_upper(e, &f.dual()))
}

/// Rank-m factor H of a PSD matrix from its top eigenpairs.
fn psd_factor(b: &DMatrix<f64>, m: usize) -> DMatrix<f64> {
    let eig = SymmetricEigen::new((b + b.transpose()) * 0.5);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap().then(i.cmp(&j)));
    let n = b.nrows();
    DMatrix::from_fn(n, m, |r, k| match idx.get(k) {
        Some(&i) => eig.eigenvectors[(r, i)] * eig.eigenvalues[i].max(0.0).sqrt(),
        None => 0.0,
    })
}

fn is_hilbert(f: &SpaceDescriptor) -> bool {
    f.is_lp() && f.p.is_two()
}

/// For F = ℓ_2^m, the γ search seeds (A, Hᵀ) with H a rank-m factor of
/// its B.
fn positive_extra_starts(e: &SpaceDescriptor, f: &SpaceDescriptor, opts: &KgOptions) -> Vec<(DMatrix<f64>, DMatrix<f64>)> {
    let mut extra = Vec::new();
    if is_hilbert(f) {
        if let Some(p) = gamma_search(e, opts) {
            let h = psd_factor(&p.b.matrix, f.n);
            extra.push((p.a.matrix.clone(), h.transpose()));
        }
    }
    extra
}

/// Lower bound on K_G⁺(E, F): the K_G search with A restricted to
/// positive semidefinite maps.
pub fn kg_plus_lower(e: &SpaceDescriptor, f: &SpaceDescriptor, opts: &KgOptions) -> Result<ConstantEstimate> {
    check_cap(e, f, opts.cap)?;
    let cands = kg_search(e, f, true, positive_extra_starts(e, f, opts), opts);
    let restarts = cands.len();
    Ok(triple_estimate(ConstantName::KgPlus, e, f, best_triple(cands), kg_upper(e, f), restarts))
}

/// Continues the K_G⁺ ascent from a given positive A.
pub fn kg_plus_from(e: &SpaceDescriptor, f: &SpaceDescriptor, a0: &DMatrix<f64>, opts: &KgOptions) -> Result<ConstantEstimate> {
    check_cap(e, f, opts.cap)?;
    let b0 = crate::linalg::eye(f.real_dimension(), e.real_dimension());
    let t = ascend_triple(e, f, psd_part(a0), b0, true, opts);
    Ok(triple_estimate(ConstantName::KgPlus, e, f, t, kg_upper(e, f), 1))
}

#[derive(Debug, Clone)]
struct PsdPair {
    a: OperatorMatrix,
    b: OperatorMatrix,
    value: f64,
}

fn pair_build(a: OperatorMatrix, b: OperatorMatrix) -> PsdPair {
    let value = (&a.matrix * &b.matrix).trace();
    PsdPair { a, b, value }
}

fn gamma_ascend(e: &SpaceDescriptor, a0: DMatrix<f64>, b0: DMatrix<f64>, opts: &KgOptions) -> Option<PsdPair> {
    let ed = e.dual();
    let mut best = pair_build(normalized(a0, *e, ed, &opts.opnorm)?, normalized(b0, ed, *e, &opts.opnorm)?);
    for _ in 0..opts.rounds.max(1) * 2 {
        let before = best.value;
        for a in psd_candidates(&best.b.matrix, &best.a.matrix) {
            if let Some(a) = normalized(a, *e, ed, &opts.opnorm) {
                let c = pair_build(a, best.b.clone());
                if c.value > best.value {
                    best = c;
                }
            }
        }
        for b in psd_candidates(&best.a.matrix, &best.b.matrix) {
            if let Some(b) = normalized(b, ed, *e, &opts.opnorm) {
                let c = pair_build(best.a.clone(), b);
                if c.value > best.value {
                    best = c;
                }
            }
        }
        if best.value <= before * (1.0 + 1e-9) {
            break;
        }
    }
    Some(best)
}

fn gamma_search(e: &SpaceDescriptor, opts: &KgOptions) -> Option<PsdPair> {
    let d = e.real_dimension();
    let mut starts = vec![(DMatrix::identity(d, d), DMatrix::identity(d, d))];
    if let Some(h) = crate::linalg::hadamard(d) {
        let hh = &h * h.transpose();
        starts.push((hh.clone(), DMatrix::identity(d, d)));
        starts.push((DMatrix::identity(d, d), hh));
    }
    for k in 0..opts.gaussian_starts {
        let mut rng = seeds::stream_rng(opts.seed, seeds::TAG_GAMMA, k as u64);
        let g = DMatrix::from_vec(d, d, seeds::gaussian_vec(&mut rng, d * d));
        let h = DMatrix::from_vec(d, d, seeds::gaussian_vec(&mut rng, d * d));
        starts.push((&g * g.transpose(), &h * h.transpose()));
    }
    starts
        .into_par_iter()
        .filter_map(|(a, b)| gamma_ascend(e, a, b, opts))
        .max_by(|x, y| x.value.partial_cmp(&y.value).unwrap())
}

/// Value of the identity pair A = id/‖id: E → E*‖, B = id/‖id: E* → E‖.
pub fn gamma_identity_witness(e: &SpaceDescriptor, opts: &OpnormOptions) -> ConstantWitness {
    let d = e.real_dimension();
    let a = normalized(DMatrix::identity(d, d), *e, e.dual(), opts).expect("identity is nonzero");
    let b = normalized(DMatrix::identity(d, d), e.dual(), *e, opts).expect("identity is nonzero");
    ConstantWitness::PsdPair { a, b }
}

/// Bracket for γ(E). The lower endpoint is the best of the alternating
/// search, the identity pair and the transfer of the K_G⁺(E, ℓ_2^{dim E})
/// triple (B′, C) ↦ CCᵀ or B′ᵀB′. The upper endpoint uses
/// tr(AB) ≤ rank(AB)·‖AB‖ ≤ dim E and the K_G chain.
pub fn gamma_bracket(e: &SpaceDescriptor, opts: &KgOptions) -> Result<ConstantEstimate> {
    let d = e.real_dimension();
    if d > opts.cap {
        return Err(GaugeError::CapExceeded { size: d, cap: opts.cap });
    }
    let ell2 = SpaceDescriptor::lp(d, Exponent::TWO);
    let mut cands: Vec<PsdPair> = gamma_search(e, opts).into_iter().collect();
    if let ConstantWitness::PsdPair { a, b } = gamma_identity_witness(e, &opts.opnorm) {
        cands.push(pair_build(a, b));
    }
    let kp = kg_plus_lower(e, &ell2, opts)?;
    if let ConstantWitness::Triple { a, b, c } = &kp.witness {
        for bb in [&c.matrix * c.matrix.transpose(), b.matrix.transpose() * &b.matrix] {
            if let Some(bn) = normalized(bb, e.dual(), *e, &opts.opnorm) {
                cands.push(pair_build(a.clone(), bn));
            }
        }
    }
    let best = cands.into_iter().max_by(|x, y| x.value.partial_cmp(&y.value).unwrap()).expect("identity pair");
    let upper = (d as f64).min(kg_upper(e, &ell2));
    let lower = best.value;
    Ok(ConstantEstimate {
        name: ConstantName::Gamma,
        pair: (*e, None),
        bracket: NormBracket {
            lower,
            upper: upper.max(lower),
            witness: Witness::None,
            method: Method::AltMax,
            upper_method: Method::BallInclusion,
            iterations: 0,
            restarts: opts.gaussian_starts,
        },
        witness: ConstantWitness::PsdPair { a: best.a, b: best.b },
    })
}

/// Both sides of the identity ‖(A ⊗ id)(z_B)‖_∧ = N(BAᵀ) for A: ℓ_∞ⁿ → ℓ_1ⁿ
/// and B: ℓ_1ⁿ → ℓ_1^m, where z_B = Σ_j e_j ⊗ Be_j ∈ ℓ_∞ⁿ ⊗ ℓ_1^m. Both
/// norms are exact since the left factor is ℓ_1.
pub fn factorization_identity(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(f64, f64)> {
    let n = a.nrows();
    if a.ncols() != n || b.ncols() != n {
        return Err(GaugeError::DimensionMismatch { expected: n, got: b.ncols() });
    }
    let m = b.nrows();
    let l1n = SpaceDescriptor::lp(n, Exponent::ONE);
    let linf = SpaceDescriptor::lp(n, Exponent::INFINITY);
    let l1m = SpaceDescriptor::lp(m, Exponent::ONE);
    let opts = TensorOptions::default();
    let mut image = DMatrix::zeros(n, m);
    for j in 0..n {
        image += a.column(j) * b.column(j).transpose();
    }
    let lhs = tensornorm::projective_bracket(&tensornorm::Tensor2::new(image, l1n, l1m)?, &opts).0;
    let bat = OperatorMatrix::new(b * a.transpose(), linf, l1m)?;
    let rhs = tensornorm::nuclear_norm(&bat, &opts);
    for b in [&lhs, &rhs] {
        if b.upper - b.lower > 1e-12 * b.upper {
            return Err(GaugeError::InvalidArgument("projective bracket did not close".into()));
        }
    }
    Ok((lhs.upper, rhs.upper))
}

#[derive(Debug, Clone)]
pub struct ComplexPlusOptions {
    pub candidates: usize,
    pub seed: u64,
    pub max_cells: usize,
}

impl Default for ComplexPlusOptions {
    fn default() -> Self {
        ComplexPlusOptions { candidates: 16, seed: 0, max_cells: 2_000_000 }
    }
}

/// Lower bound on the complex K_G⁺(ℓ_∞ⁿ, ℓ_2^m) as the best ratio
/// β_m(A)/‖A‖_{ℓ_∞→ℓ_1} over positive A, the denominator certified by
/// branch and bound.
pub fn kg_plus_complex_inf(n: usize, m: usize, opts: &ComplexPlusOptions) -> Result<ConstantEstimate> {
    let mut mats = vec![ComplexMatrix::real(DMatrix::identity(n, n))];
    for k in 0..opts.candidates {
        mats.push(elliptope::random_psd(n, seeds::child_seed(opts.seed, seeds::TAG_KG, k as u64), true));
    }
    let bopts = BetaOptions { restarts: 8, seed: opts.seed, ..BetaOptions::default() };
    let vals: Vec<f64> = mats
        .par_iter()
        .map(|a| {
            let beta = elliptope::beta_bm(a, m, &bopts).map(|b| b.lower).unwrap_or(0.0);
            let ub = elliptope::complex_inf_to_one_certified(a, 1e-10, opts.max_cells).upper;
            if ub > 0.0 {
                beta / ub
            } else {
                0.0
            }
        })
        .collect();
    let lower = vals.iter().copied().fold(0.0, f64::max);
    let e = SpaceDescriptor::lp(n, Exponent::INFINITY).complex();
    let f = SpaceDescriptor::lp(m, Exponent::TWO).complex();
    Ok(ConstantEstimate {
        name: ConstantName::KgPlus,
        pair: (e, Some(f)),
        bracket: NormBracket {
            lower,
            upper: f64::INFINITY,
            witness: Witness::None,
            method: Method::AltMax,
            upper_method: Method::BallInclusion,
            iterations: 0,
            restarts: mats.len(),
        },
        witness: ConstantWitness::None,
    })
}

#[derive(Debug, Clone)]
pub struct VnOptions {
    pub delta: f64,
    pub restarts: usize,
    pub rounds: usize,
    pub seed: u64,
    pub max_cells: usize,
}

impl Default for VnOptions {
    fn default() -> Self {
        VnOptions { delta: 0.01, restarts: 4, rounds: 3, seed: 0, max_cells: 4_000_000 }
    }
}

#[derive(Debug, Clone)]
pub struct VnWitness {
    pub estimate: ConstantEstimate,
    /// Positive A with certified ‖A‖_{ℓ_∞⁴→ℓ_1⁴} ≤ 1.
    pub a: ComplexMatrix,
    pub a_norm_upper: f64,
    /// Rank-two correlation matrix D = VV*.
    pub factor: CorrelationFactor,
    pub value: f64,
    /// The 4×4 tuple with row k of V at positions (0,2), (0,3).
    pub tuple: Vec<ComplexMatrix>,
    pub success: bool,
}

/// Four unit vectors in ℂ² forming a regular tetrahedron on the Bloch
/// sphere: (1, 0) and (1/√3, √(2/3)·e^{2πik/3}) for k = 0, 1, 2.
pub fn tetrahedral_factor() -> CorrelationFactor {
    let mut v = DMatrix::from_element(4, 2, Complex64::new(0.0, 0.0));
    v[(0, 0)] = Complex64::new(1.0, 0.0);
    for k in 0..3 {
        v[(k + 1, 0)] = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
        v[(k + 1, 1)] = Complex64::from_polar((2.0 / 3.0f64).sqrt(), 2.0 * std::f64::consts::PI * k as f64 / 3.0);
    }
    CorrelationFactor { v: ComplexMatrix::from_complex(&v) }
}

/// The commuting tuple: each matrix is zero except row 0, columns 2 and 3.
pub fn commuting_tuple(factor: &CorrelationFactor) -> Vec<ComplexMatrix> {
    let v = factor.v.to_complex();
    (0..v.nrows())
        .map(|k| {
            let mut t = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
            t[(0, 2)] = v[(k, 0)];
            t[(0, 3)] = v[(k, 1)];
            ComplexMatrix::from_complex(&t)
        })
        .collect()
}

/// Searches for positive A on ℂ⁴ and a rank-two correlation D with
/// Re⟨A, D⟩ > ‖A‖_{ℓ_∞→ℓ_1}, alternating A ← D and D ← rank-two optimizer
/// of ⟨A, ·⟩. The value is certified by the branch-and-bound upper bound
/// on ‖A‖_{ℓ_∞→ℓ_1}.
pub fn vn_witness_search(opts: &VnOptions) -> Result<VnWitness> {
    let mut starts = vec![tetrahedral_factor()];
    for k in 0..opts.restarts {
        let mut rng = seeds::stream_rng(opts.seed, seeds::TAG_VN, k as u64);
        let g = seeds::gaussian_vec(&mut rng, 16);
        let mut v = DMatrix::from_fn(4, 2, |i, j| Complex64::new(g[2 * i + j], g[8 + 2 * i + j]));
        for i in 0..4 {
            let nr = v.row(i).norm();
            v.row_mut(i).unscale_mut(nr);
        }
        starts.push(CorrelationFactor { v: ComplexMatrix::from_complex(&v) });
    }
    let bopts = BetaOptions { restarts: 8, seed: opts.seed, ..BetaOptions::default() };
    let runs: Vec<(f64, ComplexMatrix, f64, CorrelationFactor)> = starts
        .into_par_iter()
        .map(|start| {
            let mut factor = start;
            let mut best: Option<(f64, ComplexMatrix, f64, CorrelationFactor)> = None;
            for _ in 0..opts.rounds.max(1) {
                let d = factor.gram();
                let ub = elliptope::complex_inf_to_one_certified(&d, 1e-10, opts.max_cells).upper;
                let a = d.scale(1.0 / ub);
                let value = a.trace_pairing(&d);
                if best.as_ref().map_or(true, |b| value > b.0) {
                    best = Some((value, a.clone(), 1.0, factor.clone()));
                }
                match elliptope::beta_bm(&a, 2, &bopts) {
                    Ok(b) if b.lower > value * (1.0 + 1e-9) => factor = b.factor,
                    _ => break,
                }
            }
            best.expect("at least one round")
        })
        .collect();
    let (value, a, _, factor) = runs.into_iter().max_by(|x, y| x.0.partial_cmp(&y.0).unwrap()).unwrap();
    let a_norm_upper = elliptope::complex_inf_to_one_certified(&a, 1e-10, opts.max_cells).upper;
    let value = value / a_norm_upper.max(1.0);
    let e = SpaceDescriptor::lp(4, Exponent::INFINITY).complex();
    let f = SpaceDescriptor::lp(2, Exponent::TWO).complex();
    let estimate = ConstantEstimate {
        name: ConstantName::KgPlus,
        pair: (e, Some(f)),
        bracket: NormBracket {
            lower: value,
            upper: f64::INFINITY,
            witness: Witness::None,
            method: Method::AltMax,
            upper_method: Method::BallInclusion,
            iterations: opts.rounds,
            restarts: opts.restarts + 1,
        },
        witness: ConstantWitness::None,
    };
    Ok(VnWitness {
        estimate,
        tuple: commuting_tuple(&factor),
        a,
        a_norm_upper,
        factor,
        value,
        success: value >= 1.0 + opts.delta,
    })
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
    fn kg_hilbert_is_dimension() {
        let opts = KgOptions::default();
        for n in 1..=4 {
            let k = kg_lower(&lp(n, 2.0), &lp(n, 2.0), &opts).unwrap();
            assert_relative_eq!(k.bracket.lower, n as f64, max_relative = 1e-9);
            assert_relative_eq!(k.bracket.upper, n as f64, max_relative = 1e-12);
        }
    }

    #[test]
    fn kg_linf_two_dim() {
        let k = kg_lower(&lp(2, f64::INFINITY), &lp(2, 2.0), &KgOptions::default()).unwrap();
        assert!(k.bracket.lower >= 2f64.sqrt() - 1e-6, "{}", k.bracket.lower);
        assert_relative_eq!(k.witness.value().unwrap(), k.bracket.lower, max_relative = 1e-12);
        assert!(k.witness.max_norm_upper(&OpnormOptions::default()) <= 1.0 + 1e-8);
    }

    #[test]
    fn kg_dual_symmetry() {
        let opts = KgOptions::default();
        let e = lp(3, 1.5);
        let f = lp(3, 3.0);
        let a = kg_lower(&e, &f, &opts).unwrap().bracket.lower;
        let b = kg_lower(&e, &f.dual(), &opts).unwrap().bracket.lower;
        assert!((a - b).abs() <= 1e-3 * a.max(b), "{a} {b}");
    }

    #[test]
    fn contraction_projection_examples() {
        let e = lp(3, 2.0);
        let opts = OpnormOptions::default();
        let p = contraction_projection(&e, &(DMatrix::identity(3, 3) * 2.0), &opts).unwrap();
        assert_relative_eq!((p.matrix - DMatrix::identity(3, 3)).norm(), 0.0, epsilon = 1e-14);
        let half = DMatrix::identity(3, 3) * 0.5;
        assert_eq!(contraction_projection(&e, &half, &opts).unwrap().matrix, half);
        assert!(matches!(contraction_projection(&e, &DMatrix::zeros(3, 3), &opts), Err(GaugeError::ZeroOperator)));
    }

    #[test]
    fn gamma_identity_values() {
        let opts = OpnormOptions::default();
        for p in [1.0, 1.5, 2.0] {
            for n in 2..=5 {
                let e = lp(n, p);
                let v = gamma_identity_witness(&e, &opts).value().unwrap();
                let q = Exponent::new(p).unwrap().conjugate().reciprocal();
                assert_relative_eq!(v, (n as f64).powf(2.0 * q), max_relative = 1e-10);
            }
        }
        for n in [2, 3] {
            let s = SpaceDescriptor::schatten_sa(n, Exponent::ONE);
            assert_relative_eq!(gamma_identity_witness(&s, &opts).value().unwrap(), n as f64, max_relative = 1e-10);
        }
    }

    #[test]
    fn gamma_and_kg_plus_agree() {
        let opts = KgOptions::default();
        let e = lp(3, 1.0);
        let g = gamma_bracket(&e, &opts).unwrap();
        let kp = kg_plus_lower(&e, &lp(3, 2.0), &opts).unwrap();
        assert!((g.bracket.lower - kp.bracket.lower).abs() <= 1e-3 * g.bracket.lower);
        assert!(g.bracket.lower <= g.bracket.upper);
    }

    #[test]
    fn factorization_identity_holds() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.5, 3.0]);
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, -1.0, 2.0, 0.25, 1.0]);
        let (l, r) = factorization_identity(&a, &b).unwrap();
        assert_relative_eq!(l, r, max_relative = 1e-12);
    }

    #[test]
    fn tetrahedral_tuple() {
        let f = tetrahedral_factor();
        assert!(f.row_norm_error() < 1e-15);
        let t = commuting_tuple(&f);
        for x in &t {
            for y in &t {
                let p = x.to_complex() * y.to_complex();
                assert!(p.iter().all(|z| z.norm() == 0.0));
            }
        }
    }

    #[test]
    fn complex_three_point_is_one() {
        let opts = ComplexPlusOptions { candidates: 4, ..Default::default() };
        let k = kg_plus_complex_inf(3, 3, &opts).unwrap();
        assert!((k.bracket.lower - 1.0).abs() <= 1e-4, "{}", k.bracket.lower);
    }
}
