//! Linear optimization over correlation matrices (the elliptope) and rank
//! probes of its extreme points.
//!
//! Complex matrices are kept as real/imaginary part pairs and converted to
//! `Complex64` only inside eigen-solvers and factor updates. For a Hermitian
//! `A` and a factor `V` with unit rows the objective is
//! ⟨A, VV*⟩ = tr(A VV*) = Σ_ij a_ij ⟨v_j, v_i⟩.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{GaugeError, Result};
use crate::opnorm::Method;
use crate::seeds;
use crate::spaces::{sign_vector, ENUM_CUTOFF};

type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl ComplexMatrix {
    pub fn real(re: DMatrix<f64>) -> Self {
        let im = DMatrix::zeros(re.nrows(), re.ncols());
        ComplexMatrix { re, im }
    }

    pub fn from_complex(m: &CMat) -> Self {
        ComplexMatrix { re: m.map(|z| z.re), im: m.map(|z| z.im) }
    }

    pub fn to_complex(&self) -> CMat {
        DMatrix::from_fn(self.re.nrows(), self.re.ncols(), |i, j| Complex64::new(self.re[(i, j)], self.im[(i, j)]))
    }

    pub fn nrows(&self) -> usize {
        self.re.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.re.ncols()
    }

    pub fn is_real(&self) -> bool {
        self.im.iter().all(|&x| x == 0.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        ComplexMatrix { re: &self.re * c, im: &self.im * c }
    }

    /// Re tr(A B) for square matrices of equal size.
    pub fn trace_pairing(&self, b: &ComplexMatrix) -> f64 {
        let n = self.nrows();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.re[(i, j)] * b.re[(j, i)] - self.im[(i, j)] * b.im[(j, i)];
            }
        }
        s
    }

    /// Σ |a_ij|.
    pub fn entry_abs_sum(&self) -> f64 {
        self.re.iter().zip(self.im.iter()).map(|(a, b)| a.hypot(*b)).sum()
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_spectrum(a: &ComplexMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(a.to_complex()).eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v
}

fn op_norm_hermitian(a: &ComplexMatrix) -> f64 {
    hermitian_spectrum(a).iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Errors unless the minimum eigenvalue is ≥ −1e-10·‖A‖_op.
pub fn check_psd(a: &ComplexMatrix) -> Result<()> {
    let spec = hermitian_spectrum(a);
    let top = spec.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let min = spec.first().copied().unwrap_or(0.0);
    if min < -1e-10 * top.max(f64::MIN_POSITIVE) {
        return Err(GaugeError::NotPsd { min_eigenvalue: min });
    }
    Ok(())
}

/// An `n × k` factor with unit rows; its Gram matrix is a correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFactor {
    pub v: ComplexMatrix,
}

impl CorrelationFactor {
    pub fn gram(&self) -> ComplexMatrix {
        let v = self.v.to_complex();
        ComplexMatrix::from_complex(&(&v * v.adjoint()))
    }

    pub fn rank_cap(&self) -> usize {
        self.v.ncols()
    }

    /// Largest deviation of a row norm from 1.
    pub fn row_norm_error(&self) -> f64 {
        let v = self.v.to_complex();
        (0..v.nrows()).map(|i| (v.row(i).norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn objective(&self, a: &ComplexMatrix) -> f64 {
        a.trace_pairing(&self.gram())
    }
}

#[derive(Debug, Clone)]
pub struct BetaOptions {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub gradient_steps: usize,
    pub tol: f64,
    pub seed: u64,
    /// Optimize over complex factors even for a real objective.
    pub complex: bool,
}

impl Default for BetaOptions {
    fn default() -> Self {
        BetaOptions { restarts: 32, max_sweeps: 10_000, gradient_steps: 50, tol: 1e-15, seed: 0, complex: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaEstimate {
    pub lower: f64,
    pub factor: CorrelationFactor,
    pub method: Method,
    pub sweeps: usize,
}

fn objective(a: &CMat, v: &CMat) -> f64 {
    let av = a * v;
    let mut s = 0.0;
    for i in 0..v.nrows() {
        for k in 0..v.ncols() {
            s += (av[(i, k)] * v[(i, k)].conj()).re;
        }
    }
    s
}

fn normalize_rows(v: &mut CMat) {
    for i in 0..v.nrows() {
        let n = v.row(i).norm();
        if n > 0.0 {
            v.row_mut(i).unscale_mut(n);
        } else {
            v.row_mut(i).fill(Complex64::new(0.0, 0.0));
            v[(i, 0)] = Complex64::new(1.0, 0.0);
        }
    }
}

/// Riemannian gradient ascent with Armijo backtracking, then block
/// coordinate (mixing) sweeps v_i ← h_i/‖h_i‖, h_i = Σ_{j≠i} a_ij v_j.
fn ascend(a: &CMat, mut v: CMat, opts: &BetaOptions) -> (f64, CMat, usize) {
    let n = v.nrows();
    let mut f = objective(a, &v);
    let mut step = 1.0 / (a.norm() + 1e-300);
    for _ in 0..opts.gradient_steps {
        let g = (a * &v) * Complex64::new(2.0, 0.0);
        let mut t = g.clone();
        for i in 0..n {
            let proj: f64 = (0..v.ncols()).map(|k| (g[(i, k)] * v[(i, k)].conj()).re).sum();
            for k in 0..v.ncols() {
                t[(i, k)] -= v[(i, k)] * proj;
            }
        }
        let tn2 = t.norm_squared();
        if tn2 <= 1e-30 {
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let mut cand = &v + &t * Complex64::new(step, 0.0);
            normalize_rows(&mut cand);
            let fc = objective(a, &cand);
            if fc >= f + 1e-4 * step * tn2 {
                v = cand;
                f = fc;
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let mut av = a * &v;
    let mut sweeps = 0;
    for s in 0..opts.max_sweeps {
        sweeps = s + 1;
        for i in 0..n {
            let aii = a[(i, i)];
            let h: Vec<Complex64> = (0..v.ncols()).map(|k| av[(i, k)] - aii * v[(i, k)]).collect();
            let hn = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if hn == 0.0 {
                continue;
            }
            for k in 0..v.ncols() {
                let new = h[k] / hn;
                let delta = new - v[(i, k)];
                if delta != Complex64::new(0.0, 0.0) {
                    for r in 0..n {
                        av[(r, k)] += a[(r, i)] * delta;
                    }
                }
                v[(i, k)] = new;
            }
        }
        let fnew = objective(a, &v);
        av = a * &v;
        let gain = fnew - f;
        f = fnew.max(f);
        if gain <= opts.tol * f.abs().max(1.0) {
            break;
        }
    }
    (objective(a, &v), v, sweeps)
}

/// Exact max of sᵀAs over sign vectors (real symmetric A).
fn sign_quadratic_max(a: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let n = a.nrows();
    let total: u64 = 1 << (n - 1);
    let quad = |mask: u64| {
        let s = nalgebra::DVector::from_vec(sign_vector(mask, n));
        s.dot(&(a * &s))
    };
    let mut best = (quad(0), 0u64);
    for mask in 1..total {
        let v = quad(mask);
        if v > best.0 + 1e-12 * best.0.abs() {
            best = (v, mask);
        }
    }
    (best.0, sign_vector(best.1, n))
}

/// Lower bound on β_k(A) = sup ⟨A, B⟩ over correlation matrices of rank ≤ k.
pub fn beta_bm(a: &ComplexMatrix, k: usize, opts: &BetaOptions) -> Result<BetaEstimate> {
    check_psd(a)?;
    Ok(correlation_max(a, k, opts))
}

/// Best ⟨A, B⟩ found over correlation matrices B of rank ≤ k, for any
/// Hermitian `A`. The mixing sweeps ascend whether or not A is positive.
pub fn correlation_max(a: &ComplexMatrix, k: usize, opts: &BetaOptions) -> BetaEstimate {
    let n = a.nrows();
    let k = k.max(1).min(n.max(1));
    let complex = opts.complex || !a.is_real();
    if !complex && k == 1 && n <= ENUM_CUTOFF {
        let (value, s) = sign_quadratic_max(&a.re);
        let v = ComplexMatrix::real(DMatrix::from_vec(n, 1, s));
        return BetaEstimate { lower: value, factor: CorrelationFactor { v }, method: Method::ExactEnum, sweeps: 0 };
    }
    let ac = a.to_complex();
    let runs: Vec<(f64, CMat, usize)> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = seeds::stream_rng(opts.seed, seeds::TAG_BETA, r as u64);
            let re = seeds::gaussian_vec(&mut rng, n * k);
            let im = if complex { seeds::gaussian_vec(&mut rng, n * k) } else { vec![0.0; n * k] };
            let mut v = DMatrix::from_fn(n, k, |i, j| Complex64::new(re[i * k + j], im[i * k + j]));
            normalize_rows(&mut v);
            ascend(&ac, v, opts)
        })
        .collect();
    let mut bi = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.0 > runs[bi].0 {
            bi = i;
        }
    }
    let sweeps = runs.iter().map(|r| r.2).sum();
    let (value, v, _) = runs.into_iter().nth(bi).unwrap();
    BetaEstimate {
        lower: value,
        factor: CorrelationFactor { v: ComplexMatrix::from_complex(&v) },
        method: Method::AltMax,
        sweeps,
    }
}

/// f(θ) = z*Az with z_i = e^{iθ_i}, θ_0 = 0, as Σ a_ii + 2 Σ_{i<j} r_ij cos(θ_j − θ_i + φ_ij).
struct PhaseForm {
    n: usize,
    diag: f64,
    pairs: Vec<(usize, usize, f64, f64)>,
}

impl PhaseForm {
    fn new(a: &ComplexMatrix) -> Self {
        let n = a.nrows();
        let diag = (0..n).map(|i| a.re[(i, i)]).sum();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let (re, im) = (a.re[(i, j)], a.im[(i, j)]);
                pairs.push((i, j, re.hypot(im), im.atan2(re)));
            }
        }
        PhaseForm { n, diag, pairs }
    }

    fn value(&self, th: &[f64]) -> f64 {
        self.diag + self.pairs.iter().map(|&(i, j, r, p)| 2.0 * r * (th[j] - th[i] + p).cos()).sum::<f64>()
    }

    fn gradient(&self, th: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        for &(i, j, r, p) in &self.pairs {
            let s = 2.0 * r * (th[j] - th[i] + p).sin();
            g[j] -= s;
            g[i] += s;
        }
        g
    }

    fn hessian(&self, th: &[f64]) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.n, self.n);
        for &(i, j, r, p) in &self.pairs {
            let c = 2.0 * r * (th[j] - th[i] + p).cos();
            h[(i, i)] -= c;
            h[(j, j)] -= c;
            h[(i, j)] += c;
            h[(j, i)] += c;
        }
        h
    }

    /// Newton ascent on θ_1.. with θ_0 fixed; falls back to gradient steps
    /// when the Hessian is not negative definite.
    fn refine(&self, mut th: Vec<f64>) -> (f64, Vec<f64>) {
        let m = self.n - 1;
        let mut f = self.value(&th);
        for _ in 0..100 {
            let g = self.gradient(&th);
            let gf = nalgebra::DVector::from_iterator(m, g[1..].iter().copied());
            if gf.norm() < 1e-15 * (1.0 + f.abs()) {
                break;
            }
            let h = self.hessian(&th).view((1, 1), (m, m)).into_owned();
            let newton = (-h.clone()).cholesky().map(|c| c.solve(&gf));
            let dir = newton.unwrap_or_else(|| gf.clone());
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let mut cand = th.clone();
                for k in 0..m {
                    cand[k + 1] += t * dir[k];
                }
                let fc = self.value(&cand);
                if fc >= f {
                    moved = fc > f || t == 1.0;
                    th = cand;
                    f = fc;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
        (f, th)
    }
}

/// sup_{|z_i| = 1} z*Az for complex `A` with n ≤ 3, by a 2° phase grid
/// followed by Newton refinement of the best grid points.
pub fn beta_exact_small(a: &ComplexMatrix) -> Result<f64> {
    let n = a.nrows();
    if n > 3 {
        return Err(GaugeError::InvalidArgument(format!("beta_exact_small needs n <= 3, got {n}")));
    }
    let pf = PhaseForm::new(a);
    if n <= 1 {
        return Ok(pf.diag);
    }
    let steps = 180;
    let h = 2.0 * std::f64::consts::PI / steps as f64;
    let mut grid: Vec<(f64, Vec<f64>)> = Vec::new();
    if n == 2 {
        for s in 0..steps {
            let th = vec![0.0, s as f64 * h];
            grid.push((pf.value(&th), th));
        }
    } else {
        for s in 0..steps {
            for t in 0..steps {
                let th = vec![0.0, s as f64 * h, t as f64 * h];
                grid.push((pf.value(&th), th));
            }
        }
    }
    grid.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let mut best = f64::NEG_INFINITY;
    for (_, th) in grid.into_iter().take(8) {
        best = best.max(pf.refine(th).0);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedValue {
    pub lower: f64,
    pub upper: f64,
    /// Phases attaining `lower`.
    pub phases: Vec<f64>,
    pub cells: usize,
}

#[derive(PartialEq)]
struct Cell {
    upper: f64,
    center: Vec<f64>,
    half: f64,
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.partial_cmp(&other.upper).unwrap_or(Ordering::Equal)
    }
}

/// Certified bracket for sup_{|z_i|=1} z*Az, which equals the complex
/// ‖A‖_{ℓ_∞→ℓ_1} for positive semidefinite `A`. Branch and bound over the
/// phase torus; a cell of half-width h around c is bounded by
/// f(c) + ‖∇f(c)‖₁ h + Σ_{i<j} r_ij (δ_j − δ_i)²_max, the last term coming
/// from |∂²/∂t² cos| ≤ 1 along the segment.
pub fn complex_inf_to_one_certified(a: &ComplexMatrix, rel_tol: f64, max_cells: usize) -> CertifiedValue {
    let n = a.nrows();
    let pf = PhaseForm::new(a);
    if n <= 1 {
        return CertifiedValue { lower: pf.diag, upper: pf.diag, phases: vec![0.0; n], cells: 0 };
    }
    let m = n - 1;
    let bound = |c: &[f64], half: f64| -> (f64, f64) {
        let f = pf.value(c);
        let g = pf.gradient(c);
        let g1: f64 = g[1..].iter().map(|x| x.abs()).sum();
        let curv: f64 = pf
            .pairs
            .iter()
            .map(|&(i, _, r, _)| r * if i == 0 { half * half } else { 4.0 * half * half })
            .sum();
        (f, f + g1 * half + curv)
    };
    let per_axis = 8usize;
    let half0 = std::f64::consts::PI / per_axis as f64;
    let mut heap = BinaryHeap::new();
    let mut lower = f64::NEG_INFINITY;
    let mut phases = vec![0.0; n];
    let total = per_axis.pow(m as u32);
    for idx in 0..total {
        let mut c = vec![0.0; n];
        let mut r = idx;
        for k in 0..m {
            c[k + 1] = (2 * (r % per_axis) + 1) as f64 * half0;
            r /= per_axis;
        }
        let (f, u) = bound(&c, half0);
        if f > lower {
            lower = f;
            phases = c.clone();
        }
        heap.push(Cell { upper: u, center: c, half: half0 });
    }
    let (f0, th0) = pf.refine(phases.clone());
    if f0 > lower {
        lower = f0;
        phases = th0;
    }
    let mut cells = total;
    while let Some(top) = heap.peek() {
        if top.upper <= lower + rel_tol * lower.abs().max(1e-300) || cells >= max_cells {
            break;
        }
        let cell = heap.pop().unwrap();
        let h = cell.half / 2.0;
        for corner in 0..(1usize << m) {
            let mut c = cell.center.clone();
            for k in 0..m {
                c[k + 1] += if (corner >> k) & 1 == 1 { h } else { -h };
            }
            let (f, u) = bound(&c, h);
            if f > lower {
                let (fr, tr) = pf.refine(c.clone());
                if fr > f {
                    lower = fr;
                    phases = tr;
                } else {
                    lower = f;
                    phases = c.clone();
                }
            }
            if u > lower {
                heap.push(Cell { upper: u, center: c, half: h });
            }
            cells += 1;
        }
    }
    let upper = heap.peek().map_or(lower, |c| c.upper.max(lower));
    CertifiedValue { lower, upper, phases, cells }
}

/// Numerical rank of a correlation matrix: eigenvalues above tol·‖B‖_op.
pub fn rank_probe(b: &ComplexMatrix, tol: f64) -> Result<usize> {
    let n = b.nrows();
    for i in 0..n {
        if (b.re[(i, i)] - 1.0).abs() > tol || b.im[(i, i)].abs() > tol {
            return Err(GaugeError::OutsideElliptope(format!("diagonal entry {i} is not 1")));
        }
        for j in 0..n {
            if (b.re[(i, j)] - b.re[(j, i)]).abs() > tol || (b.im[(i, j)] + b.im[(j, i)]).abs() > tol {
                return Err(GaugeError::OutsideElliptope("not Hermitian".into()));
            }
        }
    }
    let spec = hermitian_spectrum(b);
    let top = spec.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if spec.first().copied().unwrap_or(0.0) < -tol * top {
        return Err(GaugeError::OutsideElliptope("negative eigenvalue".into()));
    }
    Ok(spec.iter().filter(|&&l| l > tol * top).count())
}

/// Clips negative eigenvalues and rescales to unit diagonal, repeating at
/// most 50 times until both hold within 1e-10.
pub fn project_to_elliptope(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.nrows();
    let mut cur = m.to_complex();
    for _ in 0..50 {
        let eig = SymmetricEigen::new(cur.clone());
        let needs_clip = eig.eigenvalues.iter().any(|&l| l < -1e-10);
        if needs_clip {
            let lam = eig.eigenvalues.map(|l| Complex64::new(l.max(0.0), 0.0));
            let u = &eig.eigenvectors;
            cur = u * CMat::from_diagonal(&lam) * u.adjoint();
        }
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let di = cur[(i, i)].re;
            if di <= 0.0 {
                return Err(GaugeError::ZeroDiagonal(i));
            }
            d.push(di.sqrt());
        }
        let off = d.iter().map(|x| (x * x - 1.0).abs()).fold(0.0, f64::max);
        if off > 0.0 {
            for i in 0..n {
                for j in 0..n {
                    cur[(i, j)] /= d[i] * d[j];
                }
            }
        }
        if !needs_clip && off <= 1e-10 {
            break;
        }
    }
    for i in 0..n {
        cur[(i, i)] = Complex64::new(1.0, 0.0);
    }
    Ok(ComplexMatrix::from_complex(&cur))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearReport {
    pub bilinear: f64,
    pub quadratic: f64,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn bilinear_value(a: &CMat, x: &CMat, y: &CMat) -> f64 {
    // Re Σ_ij a_ij ⟨y_j, x_i⟩ = Re tr(A Y X*).
    let m = a * y * x.adjoint();
    (0..a.nrows()).map(|i| m[(i, i)].re).sum()
}

/// Compares sup over pairs (x_i, y_j) of Re Σ a_ij ⟨y_j, x_i⟩ with the
/// symmetric sup over x_i = y_i, for positive semidefinite `A`.
pub fn quadratic_equals_bilinear_check(a: &ComplexMatrix, seed: u64) -> Result<BilinearReport> {
    let n = a.nrows();
    if n > 6 {
        return Err(GaugeError::InvalidArgument(format!("n = {n} exceeds 6")));
    }
    check_psd(a)?;
    let ac = a.to_complex();
    let opts = BetaOptions { restarts: 16, seed, ..BetaOptions::default() };
    let quad = beta_bm(a, n, &opts)?;
    let k = n;
    let runs: Vec<(f64, CMat, CMat)> = (0..17)
        .into_par_iter()
        .map(|r| {
            let (mut x, mut y) = if r == 0 {
                let v = quad.factor.v.to_complex();
                (v.clone(), v)
            } else {
                let mut rng = seeds::stream_rng(seed, seeds::TAG_BILINEAR, r as u64);
                let g = seeds::gaussian_vec(&mut rng, 4 * n * k);
                let mut x = DMatrix::from_fn(n, k, |i, j| Complex64::new(g[i * k + j], g[n * k + i * k + j]));
                let mut y = DMatrix::from_fn(n, k, |i, j| Complex64::new(g[2 * n * k + i * k + j], g[3 * n * k + i * k + j]));
                normalize_rows(&mut x);
                normalize_rows(&mut y);
                (x, y)
            };
            let mut f = bilinear_value(&ac, &x, &y);
            for _ in 0..10_000 {
                // y_j ← normalize(Σ_i a_ji x_i), x_i ← normalize(Σ_j a_ij y_j).
                y = &ac * &x;
                normalize_rows(&mut y);
                x = &ac * &y;
                normalize_rows(&mut x);
                let fnew = bilinear_value(&ac, &x, &y);
                if fnew - f <= 1e-15 * fnew.abs().max(1.0) {
                    f = fnew.max(f);
                    break;
                }
                f = fnew;
            }
            (f, x, y)
        })
        .collect();
    let mut bi = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.0 > runs[bi].0 {
            bi = i;
        }
    }
    let (bil, x, y) = runs[bi].clone();
    // PSD A gives Re Σ a_ij ⟨y_j, x_i⟩ ≤ max(Q(x), Q(y)); polish the better side.
    let mut quadv = quad.lower;
    for v in [x, y] {
        let (fv, _, _) = ascend(&ac, v, &opts);
        quadv = quadv.max(fv);
    }
    let discrepancy = (bil - quadv).abs();
    let tolerance = 1e-6 * quadv.abs().max(bil.abs());
    Ok(BilinearReport { bilinear: bil, quadratic: quadv, discrepancy, tolerance, pass: discrepancy <= tolerance })
}

/// Random complex PSD matrix G G* with an `n × n` Gaussian G.
pub fn random_psd(n: usize, seed: u64, complex: bool) -> ComplexMatrix {
    let mut rng = seeds::stream_rng(seed, seeds::TAG_EXPERIMENT, n as u64);
    let re = seeds::gaussian_vec(&mut rng, n * n);
    let im = if complex { seeds::gaussian_vec(&mut rng, n * n) } else { vec![0.0; n * n] };
    let g = DMatrix::from_fn(n, n, |i, j| Complex64::new(re[i * n + j], im[i * n + j]));
    let mut a = &g * g.adjoint();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    ComplexMatrix::from_complex(&a)
}

/// Real correlation matrix VVᵀ with the rows of an `n × rank` Gaussian V
/// normalized.
pub fn random_correlation(n: usize, rank: usize, seed: u64) -> DMatrix<f64> {
    let rank = rank.clamp(1, n.max(1));
    let mut rng = seeds::stream_rng(seed, seeds::TAG_EXPERIMENT, ((n as u64) << 16) + rank as u64);
    let mut v = DMatrix::from_vec(n, rank, seeds::gaussian_vec(&mut rng, n * rank));
    for i in 0..n {
        let nr = v.row(i).norm();
        if nr > 0.0 {
            v.row_mut(i).unscale_mut(nr);
        }
    }
    &v * v.transpose()
}

/// ‖A‖_op of a Hermitian matrix.
pub fn hermitian_op_norm(a: &ComplexMatrix) -> f64 {
    op_norm_hermitian(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ones(n: usize) -> ComplexMatrix {
        ComplexMatrix::real(DMatrix::from_element(n, n, 1.0))
    }

    fn eye(n: usize) -> ComplexMatrix {
        ComplexMatrix::real(DMatrix::identity(n, n))
    }

    #[test]
    fn beta_bm_examples() {
        let opts = BetaOptions { restarts: 4, ..BetaOptions::default() };
        assert_relative_eq!(beta_bm(&eye(4), 4, &opts).unwrap().lower, 4.0, max_relative = 1e-12);
        let b = beta_bm(&ones(2), 2, &opts).unwrap();
        assert_relative_eq!(b.lower, 4.0, max_relative = 1e-12);
        assert!(b.factor.row_norm_error() < 1e-12);
        let not_psd = ComplexMatrix::real(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert!(matches!(beta_bm(&not_psd, 2, &opts), Err(GaugeError::NotPsd { .. })));
    }

    #[test]
    fn exact_small_examples() {
        let d = ComplexMatrix::real(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.5])));
        assert_relative_eq!(beta_exact_small(&d).unwrap(), 6.5, max_relative = 1e-12);
        assert_relative_eq!(beta_exact_small(&ones(3)).unwrap(), 9.0, max_relative = 1e-12);
        assert!(beta_exact_small(&eye(4)).is_err());
    }

    #[test]
    fn bm_matches_exact_on_random_complex() {
        let a = random_psd(3, 11, true);
        let bm = beta_bm(&a, 3, &BetaOptions { restarts: 8, ..Default::default() }).unwrap();
        let ex = beta_exact_small(&a).unwrap();
        assert_relative_eq!(bm.lower, ex, max_relative = 1e-6);
        assert_eq!(rank_probe(&bm.factor.gram(), 1e-6).unwrap(), 1);
    }

    #[test]
    fn certified_bracket_contains_exact() {
        let a = random_psd(3, 5, true);
        let ex = beta_exact_small(&a).unwrap();
        let c = complex_inf_to_one_certified(&a, 1e-10, 2_000_000);
        assert!(c.lower <= ex * (1.0 + 1e-9));
        assert!(c.upper >= ex * (1.0 - 1e-9));
        assert!(c.upper - c.lower <= 1e-9 * c.lower);
    }

    #[test]
    fn rank_probe_examples() {
        assert_eq!(rank_probe(&ones(3), 1e-9).unwrap(), 1);
        assert_eq!(rank_probe(&eye(3), 1e-9).unwrap(), 3);
        assert!(rank_probe(&ones(2).scale(2.0), 1e-9).is_err());
    }

    #[test]
    fn projection_examples() {
        let p = project_to_elliptope(&ones(3)).unwrap();
        assert_relative_eq!((p.re - ones(3).re).norm(), 0.0, epsilon = 1e-12);
        let d = ComplexMatrix::real(DMatrix::from_diagonal_element(2, 2, 2.0));
        assert_relative_eq!((project_to_elliptope(&d).unwrap().re - DMatrix::identity(2, 2)).norm(), 0.0, epsilon = 1e-14);
        let z = ComplexMatrix::real(DMatrix::zeros(2, 2));
        assert!(matches!(project_to_elliptope(&z), Err(GaugeError::ZeroDiagonal(0))));
    }

    #[test]
    fn bilinear_examples() {
        let r = quadratic_equals_bilinear_check(&eye(3), 1).unwrap();
        assert!(r.pass);
        assert_relative_eq!(r.quadratic, 3.0, max_relative = 1e-9);
        let r = quadratic_equals_bilinear_check(&ones(4), 1).unwrap();
        assert!(r.pass);
        assert_relative_eq!(r.bilinear, 16.0, max_relative = 1e-9);
    }

    #[test]
    fn real_rank_one_matches_enumeration() {
        let a = random_psd(6, 3, false);
        let opts = BetaOptions { complex: false, ..Default::default() };
        let b = beta_bm(&a, 1, &opts).unwrap();
        assert_eq!(b.method, Method::ExactEnum);
        assert_relative_eq!(b.lower, b.factor.objective(&a), max_relative = 1e-12);
    }

    #[test]
    fn correlation_max_handles_indefinite_objectives() {
        let c = random_correlation(5, 2, 4);
        for i in 0..5 {
            assert_relative_eq!(c[(i, i)], 1.0, epsilon = 1e-14);
        }
        assert!(c.clone().symmetric_eigenvalues().iter().all(|&l| l > -1e-12));
        // Off-diagonal −1 on three points: the optimum puts the vectors at
        // 120°, giving 3 + 6·(1/2) = 6.
        let s = ComplexMatrix::real(DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { -1.0 }));
        assert!(beta_bm(&s, 3, &BetaOptions::default()).is_err());
        let b = correlation_max(&s, 3, &BetaOptions { complex: false, ..Default::default() });
        assert_relative_eq!(b.lower, 3.0, max_relative = 1e-9);
    }
}
