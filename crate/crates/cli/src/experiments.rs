//! Registered experiments. Criteria 1 to 13 form the acceptance suite;
//! the rest are exploratory runs over user-chosen sizes.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::{json, Value};

use tensor_gauge::constants::{self, ComplexPlusOptions, ConstantEstimate, KgOptions, VnOptions};
use tensor_gauge::elliptope::{self, BetaOptions, ComplexMatrix};
use tensor_gauge::opnorm::{self, OperatorMatrix, OpnormOptions};
use tensor_gauge::randomized::{self, GaussianBasis, GrowthConstant, GrowthOptions, NormKind};
use tensor_gauge::seeds;
use tensor_gauge::spaces::{self, Exponent, SpaceDescriptor};
use tensor_gauge::tensornorm::{self, RhoOptions, Tensor2, TensorOptions};

use crate::config::Config;
use crate::report::{num, Check, ExperimentReport, Quantity};
use crate::CliError;

/// Agreement with a closed form.
pub const TOL_EXACT: f64 = 1e-8;
/// Witness re-evaluation, relative.
pub const TOL_WITNESS: f64 = 1e-9;
/// Agreement of the rank-constrained optimizer with the exact small-n value.
pub const TOL_BETA: f64 = 1e-5;
/// Relative gap between K_G(E, F) and K_G(E, F*).
pub const TOL_SYMMETRY: f64 = 1e-3;
/// Slack on the K_G(ℓ_∞², ℓ_2²) ≥ √2 bound.
pub const TOL_SQRT2: f64 = 1e-6;
/// Threshold above the real Grothendieck constant.
pub const KG_THRESHOLD: f64 = 1.783;
/// Monte Carlo checks allow this many standard errors.
pub const Z_LIMIT: f64 = 3.0;

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub quantities: Vec<Quantity>,
    pub checks: Vec<Check>,
    pub details: Value,
}

pub struct Experiment {
    pub id: &'static str,
    pub claim: &'static str,
    pub criterion: Option<u8>,
    pub run: fn(&Config) -> Result<Outcome, CliError>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Fast,
    Full,
}

pub const FAST_CRITERIA: [u8; 7] = [1, 2, 6, 9, 10, 12, 13];

pub static REGISTRY: &[Experiment] = &[
    Experiment { id: "rho-l2-identity", claim: "ρ(ℓ_2ⁿ, ℓ_2ⁿ) = n", criterion: Some(1), run: rho_l2_identity },
    Experiment { id: "rho-l1-lp", claim: "ρ(ℓ_1ⁿ, ℓ_pⁿ) = n^{1/p′}", criterion: Some(2), run: rho_l1_lp },
    Experiment { id: "beta-rank-one", claim: "β(A) = ‖A‖_{ℓ_∞→ℓ_1} for complex PSD A, n ≤ 3", criterion: Some(3), run: beta_rank_one },
    Experiment { id: "vn-witness", claim: "complex K_G⁺(ℓ_∞⁴, ℓ_2²) > 1", criterion: Some(4), run: vn_witness },
    Experiment { id: "dft-growth", claim: "ρ⁺(ℓ_1ⁿ) ≥ c·√n from the real DFT matrix", criterion: Some(5), run: dft_growth },
    Experiment { id: "gamma-identity", claim: "γ(ℓ_pⁿ) ≥ n^{2/p′}, γ(S_1ⁿ) ≥ n", criterion: Some(6), run: gamma_identity },
    Experiment { id: "kg-plus-l1-linf", claim: "K_G⁺(ℓ_1ⁿ, ℓ_∞ⁿ) ≤ K_G < 1.783", criterion: Some(7), run: kg_plus_l1_linf },
    Experiment {
        id: "kg-symmetry",
        claim: "K_G(E, F) = K_G(E, F*), K_G⁺ ≤ K_G ≤ ρ, K_G(E, E) = ρ(E, E)",
        criterion: Some(8),
        run: kg_symmetry,
    },
    Experiment { id: "kg-linf-l2", claim: "K_G(ℓ_∞², ℓ_2²) ≥ √2", criterion: Some(9), run: kg_linf_l2 },
    Experiment { id: "chevet", claim: "𝔼‖z‖_∨ ≤ ‖T‖𝔼‖Σg_i y_i‖ + ‖S‖𝔼‖Σg_i x_i‖", criterion: Some(10), run: chevet },
    Experiment { id: "growth-windows", claim: "growth exponent of ρ(ℓ_pⁿ, ℓ_pⁿ)", criterion: Some(11), run: growth_windows },
    Experiment { id: "bracket-soundness", claim: "norm brackets are sound", criterion: Some(12), run: bracket_soundness },
    Experiment { id: "factorization-identity", claim: "‖(A ⊗ id)z_B‖_∧ = N(BAᵀ)", criterion: Some(13), run: factorization_identity },
    Experiment { id: "rho-bracket", claim: "bracket for ρ(ℓ_pⁿ, ℓ_pⁿ)", criterion: None, run: rho_bracket },
    Experiment { id: "gamma-bracket", claim: "bracket for γ(ℓ_pⁿ)", criterion: None, run: gamma_bracket },
    Experiment { id: "kg-bracket", claim: "brackets for K_G and K_G⁺ on (ℓ_pⁿ, ℓ_2ⁿ)", criterion: None, run: kg_bracket },
    Experiment {
        id: "key-inequality",
        claim: "𝔼(Σg_ij²)^{1/2} ≤ (𝔼‖z‖_{X⊗̂X} 𝔼‖z‖_{X*⊗̌X*})^{1/2}",
        criterion: None,
        run: key_inequality,
    },
    Experiment { id: "lp-moment", claim: "𝔼‖g‖_p ≤ (𝔼|g|^p)^{1/p} n^{1/p}", criterion: None, run: lp_moment },
    Experiment { id: "kg-plus-complex", claim: "complex K_G⁺(ℓ_∞ⁿ, ℓ_2ⁿ) = 1 for n ≤ 3", criterion: None, run: kg_plus_complex },
];

pub fn find(id: &str) -> Result<&'static Experiment, CliError> {
    REGISTRY.iter().find(|e| e.id == id).ok_or_else(|| CliError::UnknownExperiment(id.to_string()))
}

/// Registered criteria in suite order.
pub fn criteria(suite: Suite) -> Vec<&'static Experiment> {
    let mut v: Vec<&Experiment> = REGISTRY
        .iter()
        .filter(|e| match (suite, e.criterion) {
            (_, None) => false,
            (Suite::Full, Some(_)) => true,
            (Suite::Fast, Some(c)) => FAST_CRITERIA.contains(&c),
        })
        .collect();
    v.sort_by_key(|e| e.criterion);
    v
}

pub fn run(exp: &Experiment, cfg: &Config) -> Result<ExperimentReport, CliError> {
    let start = Instant::now();
    let out = (exp.run)(cfg)?;
    let timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(ExperimentReport {
        experiment: exp.id.to_string(),
        claim: exp.claim.to_string(),
        config: cfg.echo(),
        quantities: out.quantities,
        checks: out.checks,
        details: out.details,
        timestamp_unix,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

/// One summary line: criterion, id, verdict, claim and the tightest check.
pub fn summary_row(exp: &Experiment, report: &Result<ExperimentReport, CliError>) -> String {
    let c = exp.criterion.map(|c| format!("{c:>2}")).unwrap_or_else(|| " -".into());
    match report {
        Ok(r) => {
            let head = r.headline().map(|h| h.to_string()).unwrap_or_else(|| "no checks".into());
            let verdict = if r.pass() { "PASS" } else { "FAIL" };
            format!("[{c}] {verdict} {:<24} {} | {head} [{:.1}s]", exp.id, exp.claim, r.wall_time_seconds)
        }
        Err(e) => format!("[{c}] FAIL {:<24} {} | error: {e}", exp.id, exp.claim),
    }
}

fn exponent(p: f64) -> Result<Exponent, CliError> {
    if p == f64::INFINITY {
        return Ok(Exponent::INFINITY);
    }
    Exponent::new(p).map_err(|e| CliError::Config(e.to_string()))
}

fn lp(n: usize, p: f64) -> SpaceDescriptor {
    SpaceDescriptor::lp(n, exponent(p).expect("built-in exponent"))
}

fn p_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

/// `--n` as a single size, else `--ns`, else the default list.
fn sizes(cfg: &Config, default: &[usize]) -> Result<Vec<usize>, CliError> {
    let v = match (&cfg.n, &cfg.ns) {
        (Some(n), _) => vec![*n],
        (None, Some(ns)) => ns.clone(),
        _ => default.to_vec(),
    };
    if v.is_empty() || v.contains(&0) {
        return Err(CliError::Config("sizes must be positive".into()));
    }
    Ok(v)
}

fn exponents(cfg: &Config, default: &[f64]) -> Result<Vec<f64>, CliError> {
    let v = cfg.p.map(|p| vec![p]).unwrap_or_else(|| default.to_vec());
    for &p in &v {
        exponent(p)?;
    }
    Ok(v)
}

/// |a − b| / |b|, treating 0/0 as 0.
fn rel_err(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / b.abs().max(f64::MIN_POSITIVE)
    }
}

fn fmax(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn gaussian_matrix(seed: u64, tag: u64, idx: u64, r: usize, c: usize) -> DMatrix<f64> {
    let mut rng = seeds::stream_rng(seed, tag, idx);
    DMatrix::from_vec(r, c, seeds::gaussian_vec(&mut rng, r * c))
}

fn kg_options(cfg: &Config, seed: u64) -> KgOptions {
    let d = KgOptions::default();
    KgOptions { seed, gaussian_starts: cfg.restarts.unwrap_or(d.gaussian_starts), ..d }
}

/// Witness re-evaluation error and largest witness norm bound.
fn witness_audit(est: &ConstantEstimate, opts: &OpnormOptions) -> (f64, f64) {
    let v = est.witness.value().unwrap_or(f64::NAN);
    (rel_err(v, est.bracket.lower), est.witness.max_norm_upper(opts))
}

fn rho_l2_identity(cfg: &Config) -> Result<Outcome, CliError> {
    let t = cfg.tamper_nuclear.unwrap_or(1.0);
    let ropts = RhoOptions { seed: cfg.seed(), ..RhoOptions::default() };
    let topts = TensorOptions::default();
    let mut out = Outcome::default();
    for n in sizes(cfg, &[1, 2, 3, 4, 5, 6])? {
        let e = lp(n, 2.0);
        let r = tensornorm::rho_bracket(&e, &e, &ropts)?;
        let nuc = tensornorm::nuclear_norm(&OperatorMatrix::new(DMatrix::identity(n, n), e, e)?, &topts);
        // The lower endpoint of ρ is a nuclear norm over an injective norm of 1.
        let (lo, hi) = (r.bracket.lower * t, r.bracket.upper);
        let want = n as f64;
        out.quantities.push(Quantity::bracket(format!("rho(l2^{n},l2^{n})"), lo, hi));
        out.quantities.push(Quantity::bracket(format!("N(id_l2^{n})"), nuc.lower * t, nuc.upper * t));
        out.checks.push(Check::near(format!("rho lower n={n}"), lo, want, TOL_EXACT));
        out.checks.push(Check::near(format!("rho upper n={n}"), hi, want, TOL_EXACT));
        out.checks.push(Check::near(format!("nuclear norm of id n={n}"), nuc.lower * t, want, TOL_EXACT));
    }
    out.details = json!({ "witness": "identity tensor" });
    Ok(out)
}

fn rho_l1_lp(cfg: &Config) -> Result<Outcome, CliError> {
    let ropts = RhoOptions { seed: cfg.seed(), ..RhoOptions::default() };
    let topts = TensorOptions::default();
    let mut out = Outcome::default();
    for p in exponents(cfg, &[2.0, 3.0, 4.0])? {
        for n in sizes(cfg, &[2, 3, 4, 5, 6])? {
            let (e, f) = (lp(n, 1.0), SpaceDescriptor::lp(n, exponent(p)?));
            let want = (n as f64).powf(f.p.conjugate().reciprocal());
            let (diag, _) = tensornorm::certified_ratio(&Tensor2::identity(e, f), &topts);
            let r = tensornorm::rho_bracket(&e, &f, &ropts)?;
            let pl = p_label(p);
            out.quantities.push(Quantity::value(format!("diagonal ratio l1^{n},l{pl}^{n}"), diag));
            out.quantities.push(Quantity::bracket(format!("rho(l1^{n},l{pl}^{n})"), r.bracket.lower, r.bracket.upper));
            out.checks.push(Check::near(format!("diagonal witness p={pl} n={n}"), diag, want, TOL_EXACT));
            out.checks.push(Check::at_least(format!("rho lower >= diagonal p={pl} n={n}"), r.bracket.lower, diag, TOL_EXACT * want));
            out.checks.push(Check::at_most(format!("rho lower <= upper p={pl} n={n}"), r.bracket.lower, r.bracket.upper, TOL_EXACT * want));
            if p == 2.0 {
                out.checks.push(Check::at_most(format!("upper / n^(1/p') p=2 n={n}"), r.bracket.upper / want, 1.01, 0.0));
            }
        }
    }
    Ok(out)
}

fn beta_rank_one(cfg: &Config) -> Result<Outcome, CliError> {
    let count = cfg.samples.unwrap_or(200);
    let seed = cfg.seed();
    let restarts = cfg.restarts.unwrap_or(BetaOptions::default().restarts);
    let rows: Vec<Result<(usize, f64, f64, usize), CliError>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let n = cfg.n.unwrap_or(2 + i % 2);
            if n > 3 {
                return Err(CliError::Config(format!("exact reference needs n <= 3, got {n}")));
            }
            let s = seeds::child_seed(seed, seeds::TAG_EXPERIMENT, i as u64);
            let a = elliptope::random_psd(n, s, true);
            let b = elliptope::beta_bm(&a, n, &BetaOptions { restarts, seed: s, ..BetaOptions::default() })?;
            let exact = elliptope::beta_exact_small(&a)?;
            let rank = elliptope::rank_probe(&b.factor.gram(), 1e-6)?;
            Ok((n, b.lower, exact, rank))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let gap = fmax(rows.iter().map(|r| rel_err(r.1, r.2)));
    let not_rank_one = rows.iter().filter(|r| r.3 != 1).count();
    let mut out = Outcome::default();
    out.quantities.push(Quantity::value("max relative gap", gap));
    out.quantities.push(Quantity::value("instances", count as f64));
    out.checks.push(Check::at_most("max |beta_n - exact| / exact", gap, 0.0, TOL_BETA));
    out.checks.push(Check::at_most("optimizers with rank != 1", not_rank_one as f64, 0.0, 0.0));
    out.details = json!({
        "rank_tolerance": num(1e-6),
        "first": rows.iter().take(5).map(|r| json!({"n": r.0, "beta": num(r.1), "exact": num(r.2), "rank": r.3})).collect::<Vec<_>>(),
    });
    Ok(out)
}

fn complex_json(m: &ComplexMatrix) -> Value {
    let row = |i: usize| (0..m.ncols()).map(|j| json!([num(m.re[(i, j)]), num(m.im[(i, j)])])).collect::<Vec<_>>();
    Value::Array((0..m.nrows()).map(|i| Value::Array(row(i))).collect())
}

/// Structural checks on a tuple: exact zero products, exact commutation
/// and spectral norms at most one.
fn tuple_checks(label: &str, tuple: &[ComplexMatrix], out: &mut Outcome) {
    let mats: Vec<_> = tuple.iter().map(|t| t.to_complex()).collect();
    let mut zero = true;
    let mut commute = true;
    for a in &mats {
        for b in &mats {
            let ab = a * b;
            zero &= ab.iter().all(|z| z.re == 0.0 && z.im == 0.0);
            commute &= ab == b * a;
        }
    }
    let norm = fmax(mats.iter().map(|m| m.singular_values().max()));
    out.checks.push(Check::holds(format!("{label} pairwise products are exactly zero"), zero));
    out.checks.push(Check::holds(format!("{label} pairwise commute exactly"), commute));
    out.checks.push(Check::at_most(format!("{label} max spectral norm"), norm, 1.0, TOL_EXACT));
    out.quantities.push(Quantity::value(format!("{label} max spectral norm"), norm));
}

fn vn_witness(cfg: &Config) -> Result<Outcome, CliError> {
    let d = VnOptions::default();
    let opts = VnOptions { seed: cfg.seed(), restarts: cfg.restarts.unwrap_or(d.restarts), ..d };
    let w = constants::vn_witness_search(&opts)?;
    let dm = w.factor.gram();
    let recomputed = w.a.trace_pairing(&dm) / w.a_norm_upper.max(1.0);
    let a_cert = elliptope::complex_inf_to_one_certified(&w.a, 1e-10, opts.max_cells);
    let psd = elliptope::check_psd(&w.a).is_ok();
    let rank = elliptope::rank_probe(&dm, TOL_EXACT).ok();
    // (T_i T_j*)[0][0] = ⟨v_i, v_j⟩ = D_ij, so the tuple reproduces Re tr(AD).
    let mats: Vec<_> = w.tuple.iter().map(|t| t.to_complex()).collect();
    let ac = w.a.to_complex();
    let mut via_tuple = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            via_tuple += (ac[(i, j)] * (&mats[j] * mats[i].adjoint())[(0, 0)]).re;
        }
    }
    let truncated: Vec<ComplexMatrix> = w
        .tuple
        .iter()
        .map(|t| {
            let c = t.to_complex();
            ComplexMatrix::from_complex(&c.view((0, 1), (3, 3)).into_owned())
        })
        .collect();
    let mut out = Outcome::default();
    out.quantities.push(Quantity::value("K_G+ lower", w.value));
    out.quantities.push(Quantity::bracket("||A||_(inf->1)", a_cert.lower, a_cert.upper));
    out.checks.push(Check::at_least("certified value", w.value, 1.01, 0.0));
    out.checks.push(Check::near("value re-evaluation", recomputed, w.value, TOL_EXACT));
    out.checks.push(Check::near("value via tuple", via_tuple / w.a_norm_upper.max(1.0), w.value, TOL_EXACT));
    out.checks.push(Check::at_most("||A||_(inf->1) upper", a_cert.upper, 1.0, TOL_EXACT));
    out.checks.push(Check::holds("A is positive semidefinite", psd));
    out.checks.push(Check::at_most("max |row norm of V - 1|", w.factor.row_norm_error(), 0.0, TOL_EXACT));
    out.checks.push(Check::holds("D = VV* has rank <= 2", rank.is_some_and(|r| r <= 2)));
    tuple_checks("4x4 tuple", &w.tuple, &mut out);
    tuple_checks("3x3 tuple", &truncated, &mut out);
    out.details = json!({
        "A": complex_json(&w.a),
        "V": complex_json(&w.factor.v),
        "tuple_4x4": w.tuple.iter().map(complex_json).collect::<Vec<_>>(),
        "tuple_3x3": truncated.iter().map(complex_json).collect::<Vec<_>>(),
        "branch_and_bound_cells": a_cert.cells,
    });
    Ok(out)
}

fn dft_growth(cfg: &Config) -> Result<Outcome, CliError> {
    let ns = sizes(cfg, &[64, 128, 256, 512, 1024])?;
    let mut out = Outcome::default();
    let rep = randomized::dft_growth_experiment(&ns)?;
    for p in &rep.points {
        out.quantities.push(Quantity::value(format!("rho+ lower n={}", p.n), p.lower));
    }
    out.quantities.push(Quantity::value("slope", rep.fit.slope));
    if ns.len() >= 2 {
        out.checks.push(Check::at_least("log-log slope", rep.fit.slope, 0.4, 0.0));
        out.checks.push(Check::at_most("log-log slope", rep.fit.slope, 0.6, 0.0));
    }
    let worst_dip = fmax(rep.points.windows(2).map(|w| 1.0 - w[1].lower / w[0].lower));
    if rep.points.len() >= 2 {
        out.checks.push(Check::at_most("largest relative decrease", worst_dip, 0.05, 0.0));
    }
    let small: Vec<(usize, f64, f64, f64, f64)> = (1..=16usize)
        .into_par_iter()
        .map(|n| {
            let (b, a) = tensornorm::dft_real_matrix(n);
            let den = randomized::dft_exact_denominator(n).unwrap_or(f64::INFINITY);
            let spec = tensor_gauge::linalg::singular_values(&b).into_iter().fold(0.0, f64::max);
            let min_eig = tensor_gauge::linalg::min_eigenvalue(&a);
            let slack = a.iter().map(|x| x.abs()).sum::<f64>() - (b.iter().map(|x| x.abs()).sum::<f64>() - n as f64);
            (n, den, spec, min_eig, slack)
        })
        .collect();
    let excess = fmax(small.iter().map(|s| s.1 - 2.0 * s.0 as f64));
    out.checks.push(Check::at_most("max ||A_n||_(inf->1) - 2n, n <= 16", excess, 0.0, 1e-9));
    out.checks.push(Check::at_most("max ||B_n||_op, n <= 16", fmax(small.iter().map(|s| s.2)), 1.0, 1e-9));
    out.checks.push(Check::at_least("min eigenvalue of A_n, n <= 16", small.iter().map(|s| s.3).fold(f64::INFINITY, f64::min), 0.0, 1e-9));
    out.checks.push(Check::at_least("min sum|a| - (sum|b| - n), n <= 16", small.iter().map(|s| s.4).fold(f64::INFINITY, f64::min), 0.0, 1e-9));
    out.details = json!({
        "slope_ci95": num(rep.fit.slope_ci),
        "exact_denominators": small.iter().map(|s| json!({"n": s.0, "norm": num(s.1)})).collect::<Vec<_>>(),
    });
    Ok(out)
}

fn gamma_identity(cfg: &Config) -> Result<Outcome, CliError> {
    let base = kg_options(cfg, cfg.seed());
    let mut out = Outcome::default();
    let mut spaces_: Vec<(String, SpaceDescriptor, f64)> = Vec::new();
    for p in exponents(cfg, &[1.0, 1.5, 2.0])? {
        for n in sizes(cfg, &[1, 2, 3, 4, 5, 6])? {
            let e = SpaceDescriptor::lp(n, exponent(p)?);
            let want = (n as f64).powf(2.0 * e.p.conjugate().reciprocal());
            spaces_.push((format!("l{}^{n}", p_label(p)), e, want));
        }
    }
    let schatten: Vec<usize> = match cfg.n {
        Some(n) if n <= 3 => vec![n],
        Some(_) => vec![],
        None => vec![2, 3],
    };
    if cfg.p.is_none() {
        for n in schatten {
            spaces_.push((format!("S1^{n}"), SpaceDescriptor::schatten_sa(n, Exponent::ONE), n as f64));
        }
    }
    let rows: Vec<Result<(f64, ConstantEstimate), CliError>> = spaces_
        .par_iter()
        .map(|(_, e, _)| {
            let opts = KgOptions { cap: base.cap.max(e.real_dimension()), ..base.clone() };
            let v = constants::gamma_identity_witness(e, &opts.opnorm).value().unwrap_or(f64::NAN);
            Ok((v, constants::gamma_bracket(e, &opts)?))
        })
        .collect();
    for ((label, _, want), row) in spaces_.iter().zip(rows) {
        let (v, g) = row?;
        out.quantities.push(Quantity::value(format!("identity pair {label}"), v));
        out.quantities.push(Quantity::bracket(format!("gamma({label})"), g.bracket.lower, g.bracket.upper));
        out.checks.push(Check::near(format!("identity pair {label}"), v, *want, TOL_EXACT));
        out.checks.push(Check::at_least(format!("gamma lower {label}"), g.bracket.lower, *want, TOL_EXACT * want));
        out.checks.push(Check::at_most(format!("gamma lower <= upper {label}"), g.bracket.lower, g.bracket.upper, TOL_EXACT * want));
    }
    Ok(out)
}

fn kg_plus_l1_linf(cfg: &Config) -> Result<Outcome, CliError> {
    let count = cfg.samples.unwrap_or(500);
    let seed = cfg.seed();
    let run_one = |n: usize, s: u64, start: Option<DMatrix<f64>>| -> Result<(usize, f64, f64, f64), CliError> {
        let (e, f) = (lp(n, 1.0), lp(n, f64::INFINITY));
        let opts = kg_options(cfg, s);
        let est = match start {
            Some(a0) => {
                let a = constants::contraction_projection(&e, &a0, &opts.opnorm)?;
                constants::kg_plus_from(&e, &f, &a.matrix, &opts)?
            }
            None => constants::kg_plus_lower(&e, &f, &opts)?,
        };
        let (err, norm) = witness_audit(&est, &opts.opnorm);
        Ok((n, est.bracket.lower, err, norm))
    };
    let mut rows: Vec<Result<_, CliError>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let n = cfg.n.unwrap_or(2 + i % 5);
            let s = seeds::child_seed(seed, seeds::TAG_EXPERIMENT, i as u64);
            let rank = 2 + (i / 5) % n.saturating_sub(1).max(1);
            run_one(n, s, Some(elliptope::random_correlation(n, rank, s)))
        })
        .collect();
    let searched: Vec<usize> = cfg.n.map(|n| vec![n]).unwrap_or_else(|| (2..=6).collect());
    rows.extend(searched.into_par_iter().map(|n| run_one(n, seed, None)).collect::<Vec<_>>());
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut out = Outcome::default();
    let max = fmax(rows.iter().map(|r| r.1));
    let mut sizes_seen: Vec<usize> = rows.iter().map(|r| r.0).collect();
    sizes_seen.sort_unstable();
    sizes_seen.dedup();
    for n in sizes_seen {
        out.quantities.push(Quantity::value(format!("max K_G+ lower n={n}"), fmax(rows.iter().filter(|r| r.0 == n).map(|r| r.1))));
    }
    out.checks.push(Check::at_most("max K_G+(l1^n,l_inf^n) lower", max, KG_THRESHOLD, 0.0));
    out.checks.push(Check::at_most("max witness re-evaluation error", fmax(rows.iter().map(|r| r.2)), 0.0, TOL_WITNESS));
    out.checks.push(Check::at_most("max witness operator norm", fmax(rows.iter().map(|r| r.3)), 1.0, TOL_EXACT));
    out.details = json!({ "random_starts": count, "searched_sizes": rows.len() - count });
    Ok(out)
}

const SYMMETRY_EXPONENTS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];

struct SymmetryRow {
    label: String,
    kg: f64,
    kg_dual: f64,
    plus: f64,
    upper: f64,
    upper_dual: f64,
    rho: Option<(f64, f64)>,
    witness_err: f64,
    witness_norm: f64,
}

fn kg_symmetry(cfg: &Config) -> Result<Outcome, CliError> {
    let count = cfg.samples.unwrap_or(50);
    let seed = cfg.seed();
    let pairs: Vec<(SpaceDescriptor, SpaceDescriptor)> = (0..count)
        .map(|i| {
            let h = seeds::child_seed(seed, seeds::TAG_EXPERIMENT, i as u64);
            let n = cfg.n.unwrap_or(2 + (h % 2) as usize);
            let e = lp(n, SYMMETRY_EXPONENTS[((h >> 8) % 5) as usize]);
            let f = if i % 5 == 0 { e } else { lp(n, SYMMETRY_EXPONENTS[((h >> 16) % 5) as usize]) };
            (e, f)
        })
        .collect();
    let rows: Vec<Result<SymmetryRow, CliError>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (e, f))| {
            let opts = kg_options(cfg, seeds::child_seed(seed, seeds::TAG_KG, i as u64));
            let fd = f.dual();
            let a = constants::kg_lower(e, f, &opts)?;
            let b = constants::kg_lower(e, &fd, &opts)?;
            let plus = constants::kg_plus_lower(e, f, &opts)?;
            let rho = if e == f {
                let r = tensornorm::rho_bracket(e, e, &RhoOptions { seed: opts.seed, ..RhoOptions::default() })?;
                Some((r.bracket.lower, r.bracket.upper))
            } else {
                None
            };
            let audits = [witness_audit(&a, &opts.opnorm), witness_audit(&b, &opts.opnorm), witness_audit(&plus, &opts.opnorm)];
            Ok(SymmetryRow {
                label: format!("(l{}^{}, l{}^{})", p_label(e.p.value()), e.n, p_label(f.p.value()), f.n),
                kg: a.bracket.lower,
                kg_dual: b.bracket.lower,
                plus: plus.bracket.lower,
                upper: a.bracket.upper,
                upper_dual: b.bracket.upper,
                rho,
                witness_err: fmax(audits.iter().map(|x| x.0)),
                witness_norm: fmax(audits.iter().map(|x| x.1)),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let sym = fmax(rows.iter().map(|r| (r.kg - r.kg_dual).abs() / r.kg.max(r.kg_dual)));
    let over_upper = fmax(rows.iter().flat_map(|r| [r.kg - r.upper, r.kg_dual - r.upper_dual]));
    let plus_over = fmax(rows.iter().map(|r| r.plus - r.kg));
    let with_rho: Vec<&SymmetryRow> = rows.iter().filter(|r| r.rho.is_some()).collect();
    let kg_over_rho = fmax(with_rho.iter().map(|r| r.kg - r.rho.unwrap().1));
    let rho_over_kg = fmax(with_rho.iter().map(|r| r.rho.unwrap().0 - r.upper));
    let mut out = Outcome::default();
    for r in &rows {
        out.quantities.push(Quantity::bracket(format!("K_G{}", r.label), r.kg, r.upper));
    }
    out.checks.push(Check::at_most("max |K_G(E,F) - K_G(E,F*)| / value", sym, 0.0, TOL_SYMMETRY));
    out.checks.push(Check::at_most("max K_G lower - K_G upper", over_upper, 0.0, TOL_EXACT));
    out.checks.push(Check::at_most("max K_G+ lower - K_G lower", plus_over, 0.0, TOL_EXACT));
    if !with_rho.is_empty() {
        out.checks.push(Check::at_most("max K_G lower - rho upper, E = F", kg_over_rho, 0.0, TOL_EXACT));
        out.checks.push(Check::at_most("max rho lower - K_G upper, E = F", rho_over_kg, 0.0, TOL_EXACT));
    }
    out.checks.push(Check::at_most("max witness re-evaluation error", fmax(rows.iter().map(|r| r.witness_err)), 0.0, TOL_WITNESS));
    out.checks.push(Check::at_most("max witness operator norm", fmax(rows.iter().map(|r| r.witness_norm)), 1.0, TOL_EXACT));
    out.details = json!({ "pairs": count, "diagonal_pairs": with_rho.len() });
    Ok(out)
}

fn kg_linf_l2(cfg: &Config) -> Result<Outcome, CliError> {
    let n = cfg.n.unwrap_or(2);
    let (e, f) = (lp(n, f64::INFINITY), lp(n, 2.0));
    let opts = kg_options(cfg, cfg.seed());
    let est = constants::kg_lower(&e, &f, &opts)?;
    let (err, norm) = witness_audit(&est, &opts.opnorm);
    let mut out = Outcome::default();
    out.quantities.push(Quantity::bracket(format!("K_G(l_inf^{n},l2^{n})"), est.bracket.lower, est.bracket.upper));
    out.checks.push(Check::at_least("K_G lower", est.bracket.lower, 2f64.sqrt(), TOL_SQRT2));
    out.checks.push(Check::at_most("K_G lower <= upper", est.bracket.lower, est.bracket.upper, TOL_EXACT));
    out.checks.push(Check::at_most("witness re-evaluation error", err, 0.0, TOL_WITNESS));
    out.checks.push(Check::at_most("witness operator norm", norm, 1.0, TOL_EXACT));
    Ok(out)
}

fn chevet(cfg: &Config) -> Result<Outcome, CliError> {
    let samples = cfg.samples.unwrap_or(200);
    let seed = cfg.seed();
    let topts = TensorOptions::default();
    let mut cases = Vec::new();
    for n in sizes(cfg, &[4, 8])? {
        for p in [1.0, 2.0, 3.0] {
            for q in [1.0, 2.0, 3.0] {
                cases.push((n, p, q));
            }
        }
    }
    let rows: Vec<Result<_, CliError>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(n, p, q))| {
            let x = GaussianBasis::standard(lp(n, p));
            let y = GaussianBasis::standard(lp(n, q));
            let s = seeds::child_seed(seed, seeds::TAG_EXPERIMENT, i as u64);
            let lhs = randomized::expected_norm_mc(&x, &y, NormKind::InjectiveUpper, samples, s, &topts)?;
            let rhs = randomized::chevet_rhs(&x, &y, samples, s)?;
            Ok((n, p, q, lhs, rhs))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut out = Outcome::default();
    let mut worst = f64::NEG_INFINITY;
    for (n, p, q, lhs, rhs) in &rows {
        let label = format!("l{p}^{n} x l{q}^{n}");
        let se = lhs.stderr.hypot(rhs.stderr);
        worst = worst.max((lhs.mean - rhs.rhs) / se);
        out.quantities.push(Quantity::estimate(format!("E||z||_inj upper {label}"), lhs.mean, lhs.stderr));
        out.quantities.push(Quantity::estimate(format!("Chevet bound {label}"), rhs.rhs, rhs.stderr));
    }
    out.checks.push(Check::at_most("max (lhs - rhs) / stderr", worst, Z_LIMIT, 0.0));
    out.details = json!({ "samples": samples, "lhs": "upper endpoint of the injective bracket" });
    Ok(out)
}

fn growth_windows(cfg: &Config) -> Result<Outcome, CliError> {
    let ns = sizes(cfg, &[4, 8, 16, 32, 64])?;
    let gopts = GrowthOptions { seed: cfg.seed(), gaussian_samples: cfg.samples.unwrap_or(3), ..GrowthOptions::default() };
    let mut out = Outcome::default();
    let mut details = Vec::new();
    let mut runs = Vec::new();
    for p in exponents(cfg, &[1.0, 1.5])? {
        runs.push((GrowthConstant::RhoLp, p, ns.clone()));
    }
    if cfg.n.is_none() && cfg.ns.is_none() {
        for p in exponents(cfg, &[1.0, 1.5])? {
            runs.push((GrowthConstant::RhoSchatten, p, vec![2, 3]));
        }
    }
    for (constant, p, ns) in runs {
        let rep = randomized::growth_fit(constant, p, &ns, &gopts)?;
        let name = match constant {
            GrowthConstant::RhoLp => format!("l{}", p_label(p)),
            GrowthConstant::RhoSchatten => format!("S{}", p_label(p)),
        };
        for pt in &rep.points {
            out.quantities.push(Quantity::bracket(format!("rho({name}^{}) lower", pt.n), pt.lower, pt.lower));
        }
        if let Some(fit) = &rep.fit {
            out.quantities.push(Quantity::value(format!("slope {name}"), fit.slope));
            if rep.asserted {
                out.checks.push(Check::at_least(format!("slope {name}"), fit.slope, rep.window.0, 0.0));
                out.checks.push(Check::at_most(format!("slope {name}"), fit.slope, rep.window.1, 0.0));
            }
        }
        details.push(json!({
            "space": name,
            "window": [num(rep.window.0), num(rep.window.1)],
            "asserted": rep.asserted,
            "slope_ci95": rep.fit.as_ref().map(|f| num(f.slope_ci)),
            "gaussian_only_slope": rep.gaussian_fit.as_ref().map(|f| num(f.slope)),
            "gaussian_lower": rep.points.iter().map(|q| num(q.gaussian_lower)).collect::<Vec<_>>(),
        }));
    }
    out.details = Value::Array(details);
    Ok(out)
}

/// Violation counts for one randomized soundness instance.
#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    checks: usize,
    order: usize,
    witness: usize,
    invariant: usize,
    worst_witness: f64,
}

impl Tally {
    fn order(&mut self, lower: f64, upper: f64) {
        self.checks += 1;
        if lower > upper * (1.0 + TOL_WITNESS) + 1e-12 {
            self.order += 1;
        }
    }

    fn witness(&mut self, value: f64, claimed: f64) {
        self.checks += 1;
        let e = (value - claimed).abs() / claimed.abs().max(1e-12);
        self.worst_witness = self.worst_witness.max(e);
        if !(e <= TOL_WITNESS) {
            self.witness += 1;
        }
    }

    fn invariant(&mut self, ok: bool) {
        self.checks += 1;
        if !ok {
            self.invariant += 1;
        }
    }

    fn add(self, o: Tally) -> Tally {
        Tally {
            checks: self.checks + o.checks,
            order: self.order + o.order,
            witness: self.witness + o.witness,
            invariant: self.invariant + o.invariant,
            worst_witness: self.worst_witness.max(o.worst_witness),
        }
    }
}

fn random_space(h: u64, max_n: usize) -> SpaceDescriptor {
    let n = 1 + (h % max_n as u64) as usize;
    let p = match (h >> 8) % 6 {
        5 => 1.1 + ((h >> 16) % 490) as f64 / 100.0,
        k => SYMMETRY_EXPONENTS[k as usize],
    };
    if (h >> 32) % 8 == 0 {
        SpaceDescriptor::schatten_sa(1 + n % 2, exponent(p).expect("valid exponent"))
    } else {
        lp(n, p)
    }
}

fn soundness_instance(i: usize, seed: u64, opts: &OpnormOptions) -> Result<Tally, CliError> {
    let h = seeds::child_seed(seed, seeds::TAG_EXPERIMENT, i as u64);
    let h2 = seeds::child_seed(h, seeds::TAG_EXPERIMENT, 1);
    let mut t = Tally::default();
    let opts = OpnormOptions { seed: h, ..opts.clone() };
    let (e, f) = (random_space(h, 4), random_space(h2, 4));
    let g = gaussian_matrix(h, seeds::TAG_EXPERIMENT, 2, f.real_dimension(), e.real_dimension());
    match i % 5 {
        0 => {
            let a = OperatorMatrix::new(g, e, f)?;
            let b = opnorm::opnorm_bracket(&a, &opts);
            t.order(b.lower, b.upper);
            if let Some(v) = opnorm::witness_value(&a, &b) {
                t.witness(v, b.lower);
            }
        }
        1 => {
            let a = OperatorMatrix::new(g, e, f)?;
            let c = 0.1 + (h2 % 1000) as f64 / 200.0;
            let b = opnorm::opnorm_bracket(&a, &opts);
            let bs = opnorm::opnorm_bracket(&a.scaled(c), &opts);
            let adj = opnorm::opnorm_bracket(&opnorm::adjoint(&a), &opts);
            t.order(bs.lower, c * b.upper);
            t.order(c * b.lower, bs.upper);
            t.order(adj.lower, b.upper);
            t.order(b.lower, adj.upper);
        }
        2 => {
            let z = Tensor2::new(g.transpose(), e, f)?;
            let topts = TensorOptions { opnorm: opts.clone(), ..TensorOptions::default() };
            let inj = tensornorm::injective_norm(&z, &topts);
            let (proj, _) = tensornorm::projective_bracket(&z, &topts);
            t.order(inj.lower, inj.upper);
            t.order(proj.lower, proj.upper);
            t.order(inj.lower, proj.upper);
            if let Some(v) = tensornorm::dual_witness_value(&z, &proj) {
                t.witness(v, proj.lower);
            }
            let (r, w) = tensornorm::certified_ratio(&z, &topts);
            if r > 0.0 {
                t.witness(w.value(), r);
            }
        }
        3 => {
            let n = 2 + (h2 % 3) as usize;
            let a = elliptope::random_psd(n, h, true);
            let bopts = BetaOptions { restarts: 8, seed: h, ..BetaOptions::default() };
            let mut prev = f64::NEG_INFINITY;
            for k in 1..=n {
                let b = elliptope::beta_bm(&a, k, &bopts)?;
                t.witness(b.factor.objective(&a), b.lower);
                t.invariant(b.lower >= prev * (1.0 - TOL_WITNESS));
                t.invariant(b.factor.row_norm_error() <= TOL_WITNESS);
                if k == 1 {
                    let c = elliptope::complex_inf_to_one_certified(&a, 1e-10, 1_000_000);
                    t.order(c.lower, c.upper);
                    t.order(b.lower, c.upper);
                }
                prev = b.lower;
            }
        }
        _ => {
            let x: Vec<f64> = g.column(0).iter().copied().collect();
            let d = x.len();
            let s = if e.is_lp() { SpaceDescriptor::lp(d, e.p) } else { e };
            let ps = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
            let norms: Vec<f64> = ps.iter().map(|&p| spaces::lp_norm(&x, exponent(p).expect("valid"))).collect();
            t.invariant(norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
            // ‖A: E → ℓ_q‖ is non-increasing in q.
            let m = e.real_dimension().min(4);
            let a = gaussian_matrix(h2, seeds::TAG_EXPERIMENT, 3, m, s.real_dimension());
            let brackets: Vec<_> = ps
                .iter()
                .map(|&q| OperatorMatrix::new(a.clone(), s, lp(m, q)).map(|op| opnorm::opnorm_bracket(&op, &opts)))
                .collect::<Result<_, _>>()?;
            for w in brackets.windows(2) {
                t.order(w[1].lower, w[0].upper);
            }
        }
    }
    Ok(t)
}

fn bracket_soundness(cfg: &Config) -> Result<Outcome, CliError> {
    let count = cfg.samples.unwrap_or(1000);
    let seed = cfg.seed();
    let opts = OpnormOptions { restarts: cfg.restarts.unwrap_or(8), max_iter: 2000, ..OpnormOptions::default() };
    let tallies: Vec<Result<Tally, CliError>> = (0..count).into_par_iter().map(|i| soundness_instance(i, seed, &opts)).collect();
    let total = tallies.into_iter().try_fold(Tally::default(), |acc, t| t.map(|t| acc.add(t)))?;
    let mut out = Outcome::default();
    out.quantities.push(Quantity::value("instances", count as f64));
    out.quantities.push(Quantity::value("comparisons", total.checks as f64));
    out.quantities.push(Quantity::value("max witness re-evaluation error", total.worst_witness));
    out.checks.push(Check::at_most("lower > upper violations", total.order as f64, 0.0, 0.0));
    out.checks.push(Check::at_most("witness re-evaluation violations", total.witness as f64, 0.0, 0.0));
    out.checks.push(Check::at_most("invariant violations", total.invariant as f64, 0.0, 0.0));
    out.details = json!({ "relative_tolerance": num(TOL_WITNESS) });
    Ok(out)
}

fn factorization_identity(cfg: &Config) -> Result<Outcome, CliError> {
    let count = cfg.samples.unwrap_or(100);
    let seed = cfg.seed();
    let rows: Vec<Result<(usize, usize, f64, f64), CliError>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let h = seeds::child_seed(seed, seeds::TAG_EXPERIMENT, i as u64);
            let n = cfg.n.unwrap_or(1 + (h % 5) as usize);
            let m = 1 + ((h >> 8) % 5) as usize;
            let a = gaussian_matrix(h, seeds::TAG_EXPERIMENT, 0, n, n);
            let b = gaussian_matrix(h, seeds::TAG_EXPERIMENT, 1, m, n);
            let (lhs, rhs) = constants::factorization_identity(&a, &b)?;
            Ok((n, m, lhs, rhs))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let worst = fmax(rows.iter().map(|r| rel_err(r.2, r.3)));
    let mut out = Outcome::default();
    out.quantities.push(Quantity::value("max relative difference", worst));
    out.checks.push(Check::at_most("max |lhs - rhs| / rhs", worst, 0.0, TOL_EXACT));
    out.details = json!({
        "first": rows.iter().take(5).map(|r| json!({"n": r.0, "m": r.1, "lhs": num(r.2), "rhs": num(r.3)})).collect::<Vec<_>>(),
    });
    Ok(out)
}

fn rho_bracket(cfg: &Config) -> Result<Outcome, CliError> {
    let ropts = RhoOptions { seed: cfg.seed(), gaussian_starts: cfg.restarts.unwrap_or(8), ..RhoOptions::default() };
    let mut out = Outcome::default();
    for p in exponents(cfg, &[1.5])? {
        for n in sizes(cfg, &[3])? {
            let e = SpaceDescriptor::lp(n, exponent(p)?);
            let r = tensornorm::rho_bracket(&e, &e, &ropts)?;
            let label = format!("rho(l{}^{n},l{}^{n})", p_label(p), p_label(p));
            out.quantities.push(Quantity::bracket(&label, r.bracket.lower, r.bracket.upper));
            out.checks.push(Check::at_most(format!("{label} lower <= upper"), r.bracket.lower, r.bracket.upper, TOL_EXACT));
            out.checks.push(Check::near(format!("{label} witness"), r.witness.value(), r.bracket.lower, TOL_EXACT));
        }
    }
    Ok(out)
}

fn gamma_bracket(cfg: &Config) -> Result<Outcome, CliError> {
    let opts = kg_options(cfg, cfg.seed());
    let mut out = Outcome::default();
    for p in exponents(cfg, &[1.5])? {
        for n in sizes(cfg, &[3])? {
            let e = SpaceDescriptor::lp(n, exponent(p)?);
            let g = constants::gamma_bracket(&e, &opts)?;
            let label = format!("gamma(l{}^{n})", p_label(p));
            let (err, norm) = witness_audit(&g, &opts.opnorm);
            out.quantities.push(Quantity::bracket(&label, g.bracket.lower, g.bracket.upper));
            out.checks.push(Check::at_most(format!("{label} lower <= upper"), g.bracket.lower, g.bracket.upper, TOL_EXACT));
            out.checks.push(Check::at_most(format!("{label} witness re-evaluation error"), err, 0.0, TOL_WITNESS));
            out.checks.push(Check::at_most(format!("{label} witness operator norm"), norm, 1.0, TOL_EXACT));
        }
    }
    Ok(out)
}

fn kg_bracket(cfg: &Config) -> Result<Outcome, CliError> {
    let opts = kg_options(cfg, cfg.seed());
    let mut out = Outcome::default();
    for p in exponents(cfg, &[1.0])? {
        for n in sizes(cfg, &[3])? {
            let (e, f) = (SpaceDescriptor::lp(n, exponent(p)?), lp(n, 2.0));
            let kg = constants::kg_lower(&e, &f, &opts)?;
            let plus = constants::kg_plus_lower(&e, &f, &opts)?;
            let label = format!("(l{}^{n},l2^{n})", p_label(p));
            out.quantities.push(Quantity::bracket(format!("K_G{label}"), kg.bracket.lower, kg.bracket.upper));
            out.quantities.push(Quantity::bracket(format!("K_G+{label}"), plus.bracket.lower, plus.bracket.upper));
            out.checks.push(Check::at_most(format!("K_G{label} lower <= upper"), kg.bracket.lower, kg.bracket.upper, TOL_EXACT));
            out.checks.push(Check::at_most(format!("K_G+{label} <= K_G"), plus.bracket.lower, kg.bracket.lower, TOL_EXACT));
            for (name, est) in [("K_G", &kg), ("K_G+", &plus)] {
                let (err, norm) = witness_audit(est, &opts.opnorm);
                out.checks.push(Check::at_most(format!("{name}{label} witness re-evaluation error"), err, 0.0, TOL_WITNESS));
                out.checks.push(Check::at_most(format!("{name}{label} witness operator norm"), norm, 1.0, TOL_EXACT));
            }
        }
    }
    Ok(out)
}

fn key_inequality(cfg: &Config) -> Result<Outcome, CliError> {
    let samples = cfg.samples.unwrap_or(200);
    let mut out = Outcome::default();
    for p in exponents(cfg, &[1.0, 2.0])? {
        for n in sizes(cfg, &[4])? {
            let e = SpaceDescriptor::lp(n, exponent(p)?);
            let r = randomized::key_inequality_check(&e, samples, cfg.seed())?;
            let label = format!("l{}^{n}", p_label(p));
            out.quantities.push(Quantity::value(format!("lhs {label}"), r.lhs));
            out.quantities.push(Quantity::estimate(format!("rhs {label}"), r.rhs, r.rhs_stderr));
            out.checks.push(Check::at_most(format!("(lhs - rhs) / stderr {label}"), r.gap / r.rhs_stderr.max(f64::MIN_POSITIVE), Z_LIMIT, 0.0));
        }
    }
    Ok(out)
}

fn lp_moment(cfg: &Config) -> Result<Outcome, CliError> {
    let samples = cfg.samples.unwrap_or(2000);
    let mut out = Outcome::default();
    for p in exponents(cfg, &[3.0])? {
        for n in sizes(cfg, &[4, 16, 64])? {
            let m = randomized::lp_gaussian_moment(p, n, samples, cfg.seed())?;
            let label = format!("l{}^{n}", p_label(p));
            out.quantities.push(Quantity::estimate(format!("E||g||_p {label}"), m.estimate.mean, m.estimate.stderr));
            out.quantities.push(Quantity::value(format!("reference {label}"), m.reference));
            let z = (m.estimate.mean - m.reference) / m.estimate.stderr;
            out.checks.push(Check::at_most(format!("(mean - reference) / stderr {label}"), z, Z_LIMIT, 0.0));
        }
    }
    Ok(out)
}

fn kg_plus_complex(cfg: &Config) -> Result<Outcome, CliError> {
    let d = ComplexPlusOptions::default();
    let opts = ComplexPlusOptions { seed: cfg.seed(), candidates: cfg.samples.unwrap_or(d.candidates), ..d };
    let mut out = Outcome::default();
    for n in sizes(cfg, &[3])? {
        let est = constants::kg_plus_complex_inf(n, n, &opts)?;
        out.quantities.push(Quantity::bracket(format!("complex K_G+(l_inf^{n},l2^{n})"), est.bracket.lower, est.bracket.upper));
        if n <= 3 {
            out.checks.push(Check::near(format!("lower n={n}"), est.bracket.lower, 1.0, 1e-4));
        }
    }
    Ok(out)
}
