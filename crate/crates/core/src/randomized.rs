//! Gaussian random tensors, Monte Carlo norm estimates and growth-exponent
//! fits.
//!
//! Sample `i` of an estimate draws from its own counter-derived stream, and
//! the per-sample values are reduced in index order, so results do not
//! depend on the number of threads.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::gamma::ln_gamma;

use crate::error::{GaugeError, Result};
use crate::linalg;
use crate::opnorm::{opnorm_inf_to_one, opnorm_upper, OperatorMatrix, OpnormOptions};
use crate::seeds;
use crate::spaces::{Exponent, Family, SpaceDescriptor};
use crate::tensornorm::{self, certified_ratio, dft_real_matrix, Tensor2, TensorOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl MonteCarloEstimate {
    /// Mean and standard error (sample standard deviation over √samples).
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(GaugeError::InvalidArgument(format!("need at least 2 samples, got {n}")));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        Ok(MonteCarloEstimate { mean, stderr: (var / n as f64).sqrt(), samples: n, seed })
    }
}

/// Evaluates `f(i)` for every sample index in parallel and collects the
/// results in index order.
fn sample_values<F: Fn(usize) -> f64 + Sync + Send>(samples: usize, f: F) -> Vec<f64> {
    (0..samples).into_par_iter().map(f).collect()
}

/// Vectors x_1, …, x_m of a space, as frame-coordinate columns.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBasis {
    pub space: SpaceDescriptor,
    pub elements: DMatrix<f64>,
}

impl GaussianBasis {
    /// Standard basis for ℓ_p; for S_p^{n,sa} the frame basis, which is a
    /// Hilbert–Schmidt orthonormal basis of Hermitian matrices.
    pub fn standard(space: SpaceDescriptor) -> Self {
        let d = space.real_dimension();
        GaussianBasis { space, elements: DMatrix::identity(d, d) }
    }

    pub fn len(&self) -> usize {
        self.elements.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.ncols() == 0
    }

    /// T: ℓ_2^m → X, e_i ↦ x_i.
    pub fn synthesis(&self) -> OperatorMatrix {
        OperatorMatrix {
            matrix: self.elements.clone(),
            domain: SpaceDescriptor::lp(self.len(), Exponent::TWO),
            codomain: self.space,
        }
    }
}

/// z = Σ g_ij x_i ⊗ y_j with coefficient matrix X G Yᵀ.
pub fn gaussian_tensor(left: &GaussianBasis, right: &GaussianBasis, seed: u64) -> Tensor2 {
    let (m, n) = (left.len(), right.len());
    let mut rng = seeds::stream_rng(seed, seeds::TAG_GAUSSIAN, 0);
    let g = DMatrix::from_vec(m, n, seeds::gaussian_vec(&mut rng, m * n));
    Tensor2 { coeffs: &left.elements * g * right.elements.transpose(), left: left.space, right: right.space }
}

fn sample_tensor(left: &GaussianBasis, right: &GaussianBasis, seed: u64, i: usize) -> Tensor2 {
    gaussian_tensor(left, right, seeds::child_seed(seed, seeds::TAG_MC, i as u64))
}

/// Monte Carlo estimate of 𝔼‖Σ g_i x_i‖_X.
pub fn gaussian_sum_norm(basis: &GaussianBasis, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    let m = basis.len();
    let values = sample_values(samples, |i| {
        let mut rng = seeds::stream_rng(seed, seeds::TAG_GAUSSIAN, 1 + i as u64);
        let g = DVector::from_vec(seeds::gaussian_vec(&mut rng, m));
        let v = &basis.elements * g;
        basis.space.frame_norm(v.as_slice())
    });
    MonteCarloEstimate::from_values(&values, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChevetBound {
    pub rhs: f64,
    pub stderr: f64,
    pub t_norm_upper: f64,
    pub s_norm_upper: f64,
    pub x_sum: MonteCarloEstimate,
    pub y_sum: MonteCarloEstimate,
}

/// ‖T‖ 𝔼‖Σ g_i y_i‖_Y + ‖S‖ 𝔼‖Σ g_i x_i‖_X with upper bounds for ‖T‖, ‖S‖.
pub fn chevet_rhs(left: &GaussianBasis, right: &GaussianBasis, samples: usize, seed: u64) -> Result<ChevetBound> {
    let opts = OpnormOptions { seed, ..OpnormOptions::default() };
    let t = opnorm_upper(&left.synthesis(), &opts).0;
    let s = opnorm_upper(&right.synthesis(), &opts).0;
    let x_sum = gaussian_sum_norm(left, samples, seeds::child_seed(seed, seeds::TAG_GAUSSIAN, 1))?;
    let y_sum = gaussian_sum_norm(right, samples, seeds::child_seed(seed, seeds::TAG_GAUSSIAN, 2))?;
    Ok(ChevetBound {
        rhs: t * y_sum.mean + s * x_sum.mean,
        stderr: (t * y_sum.stderr).hypot(s * x_sum.stderr),
        t_norm_upper: t,
        s_norm_upper: s,
        x_sum,
        y_sum,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// Lower endpoint of the injective bracket.
    Injective,
    InjectiveUpper,
    ProjectiveUpper,
    ProjectiveLower,
}

/// Mean ± stderr of one norm endpoint over seeded Gaussian tensors.
pub fn expected_norm_mc(
    left: &GaussianBasis,
    right: &GaussianBasis,
    kind: NormKind,
    samples: usize,
    seed: u64,
    opts: &TensorOptions,
) -> Result<MonteCarloEstimate> {
    let values = sample_values(samples, |i| {
        let z = sample_tensor(left, right, seed, i);
        match kind {
            NormKind::Injective => tensornorm::injective_norm(&z, opts).lower,
            NormKind::InjectiveUpper => tensornorm::injective_upper(&z, opts),
            NormKind::ProjectiveUpper => tensornorm::projective_upper(&z, opts).0,
            NormKind::ProjectiveLower => tensornorm::projective_lower(&z, opts).lower,
        }
    });
    MonteCarloEstimate::from_values(&values, seed)
}

/// 𝔼 χ_k = √2 Γ((k+1)/2) / Γ(k/2).
pub fn chi_mean(k: usize) -> f64 {
    let k = k as f64;
    2f64.sqrt() * (ln_gamma((k + 1.0) / 2.0) - ln_gamma(k / 2.0)).exp()
}

/// 𝔼|g|^p = 2^{p/2} Γ((p+1)/2) / √π.
pub fn abs_gaussian_moment(p: f64) -> f64 {
    (0.5 * p * 2f64.ln() + ln_gamma((p + 1.0) / 2.0) - 0.5 * std::f64::consts::PI.ln()).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyInequalityReport {
    pub lhs: f64,
    pub projective: MonteCarloEstimate,
    pub injective_dual: MonteCarloEstimate,
    pub rhs: f64,
    pub rhs_stderr: f64,
    pub gap: f64,
    pub violation: bool,
}

/// Compares 𝔼(Σ g_ij²)^{1/2} with √(𝔼‖z‖_{X⊗̂X}) √(𝔼‖z‖_{X*⊗̌X*}), using upper
/// endpoints on the right, so a violation beyond 3 stderr is a real defect.
pub fn key_inequality_check(space: &SpaceDescriptor, samples: usize, seed: u64) -> Result<KeyInequalityReport> {
    let limit = if space.family == Family::Lp { 8 } else { 3 };
    if space.n > limit {
        return Err(GaugeError::SizeOverCutoff { size: space.n, cutoff: limit });
    }
    let d = space.real_dimension();
    let lhs = chi_mean(d * d);
    let opts = TensorOptions::default();
    let x = GaussianBasis::standard(*space);
    let xd = GaussianBasis::standard(space.dual());
    let projective = expected_norm_mc(&x, &x, NormKind::ProjectiveUpper, samples, seed, &opts)?;
    let injective_dual = expected_norm_mc(&xd, &xd, NormKind::InjectiveUpper, samples, seed, &opts)?;
    let (a, b) = (projective.mean, injective_dual.mean);
    let rhs = (a * b).sqrt();
    // d√(ab) = (b da + a db) / (2√(ab)).
    let rhs_stderr = if rhs > 0.0 { (b * projective.stderr).hypot(a * injective_dual.stderr) / (2.0 * rhs) } else { 0.0 };
    Ok(KeyInequalityReport {
        lhs,
        projective,
        injective_dual,
        rhs,
        rhs_stderr,
        gap: lhs - rhs,
        violation: lhs > rhs + 3.0 * rhs_stderr,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    /// Half-width of the 95% confidence interval for the slope; infinite
    /// with two or fewer points.
    pub slope_ci: f64,
}

/// Ordinary least squares y = a + b x.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(GaugeError::InvalidArgument("need at least two points".into()));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(GaugeError::InvalidArgument("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - intercept - slope * a).collect();
    let slope_ci = if n > 2 {
        let s2 = residuals.iter().map(|r| r * r).sum::<f64>() / (n - 2) as f64;
        let t = StudentsT::new(0.0, 1.0, (n - 2) as f64).map(|d| d.inverse_cdf(0.975)).unwrap_or(f64::INFINITY);
        t * (s2 / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(LinearFit { slope, intercept, residuals, slope_ci })
}

/// log-log fit of `values` against `ns`.
pub fn loglog_fit(ns: &[usize], values: &[f64]) -> Result<LinearFit> {
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    least_squares(&x, &y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DftPoint {
    pub n: usize,
    pub abs_sum: f64,
    /// Σ|a_jk| / (2n).
    pub lower: f64,
    /// Exact ‖A_n‖_{ℓ_∞→ℓ_1} when n ≤ 16.
    pub exact_denominator: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DftGrowthReport {
    pub points: Vec<DftPoint>,
    pub fit: LinearFit,
}

/// Exact ‖A_n‖_{ℓ_∞→ℓ_1} by sign enumeration.
pub fn dft_exact_denominator(n: usize) -> Result<f64> {
    let a = dft_real_matrix(n).1;
    let op = OperatorMatrix::new(a, SpaceDescriptor::lp(n, Exponent::INFINITY), SpaceDescriptor::lp(n, Exponent::ONE))?;
    Ok(opnorm_inf_to_one(&op)?.lower)
}

/// Certified lower bounds Σ|a_jk|/(2n) for ρ⁺(ℓ_1ⁿ) with A_n = B_n + I,
/// and their log-log slope.
pub fn dft_growth_experiment(ns: &[usize]) -> Result<DftGrowthReport> {
    let points: Vec<DftPoint> = ns
        .par_iter()
        .map(|&n| {
            let a = dft_real_matrix(n).1;
            let abs_sum: f64 = a.iter().map(|x| x.abs()).sum();
            let exact_denominator = if n <= 16 { dft_exact_denominator(n).ok() } else { None };
            DftPoint { n, abs_sum, lower: abs_sum / (2.0 * n as f64), exact_denominator }
        })
        .collect();
    let vals: Vec<f64> = points.iter().map(|p| p.lower).collect();
    let fit = loglog_fit(ns, &vals)?;
    Ok(DftGrowthReport { points, fit })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentPoint {
    pub n: usize,
    pub estimate: MonteCarloEstimate,
    /// (𝔼|g|^p)^{1/p} n^{1/p}.
    pub reference: f64,
}

/// Monte Carlo 𝔼‖g‖_p for a standard Gaussian vector g ∈ ℝⁿ.
pub fn lp_gaussian_moment(p: f64, n: usize, samples: usize, seed: u64) -> Result<MomentPoint> {
    if !p.is_finite() || p < 1.0 {
        return Err(GaugeError::InvalidArgument(format!("p must be finite and ≥ 1, got {p}")));
    }
    let e = Exponent::new(p)?;
    let basis = GaussianBasis::standard(SpaceDescriptor::lp(n, e));
    let estimate = gaussian_sum_norm(&basis, samples, seed)?;
    let reference = abs_gaussian_moment(p).powf(1.0 / p) * (n as f64).powf(1.0 / p);
    Ok(MomentPoint { n, estimate, reference })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthConstant {
    RhoLp,
    RhoSchatten,
}

#[derive(Debug, Clone)]
pub struct GrowthOptions {
    pub tensor: TensorOptions,
    pub gaussian_samples: usize,
    pub seed: u64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions { tensor: TensorOptions::default(), gaussian_samples: 3, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthPoint {
    pub n: usize,
    /// Best certified ratio over all candidates.
    pub lower: f64,
    /// Best certified ratio over Gaussian tensors only.
    pub gaussian_lower: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub constant: GrowthConstant,
    pub p: f64,
    pub points: Vec<GrowthPoint>,
    pub fit: Option<LinearFit>,
    pub gaussian_fit: Option<LinearFit>,
    /// Lower and upper growth exponents, each widened by 0.25.
    pub window: (f64, f64),
    /// False when the fit is too degenerate to assert.
    pub asserted: bool,
}

impl GrowthReport {
    pub fn pass(&self) -> Option<bool> {
        if !self.asserted {
            return None;
        }
        self.fit.as_ref().map(|f| f.slope >= self.window.0 && f.slope <= self.window.1)
    }
}

/// Exponent window for ρ(X, X): ℓ_p gives [3/2 − 1/p, 1/2 + 1/(2p)] (and
/// exactly 1/2 at p = 1); S_p gives [5/2 − 1/p, 3/2 + 1/(2p)]. Each side is
/// widened by 0.25.
pub fn growth_window(constant: GrowthConstant, p: f64) -> (f64, f64) {
    let r = 1.0 / p;
    let (lo, hi) = match constant {
        GrowthConstant::RhoLp if p == 1.0 => (0.5, 0.5),
        GrowthConstant::RhoLp => (1.5 - r, 0.5 + 0.5 * r),
        GrowthConstant::RhoSchatten => (2.5 - r, 1.5 + 0.5 * r),
    };
    if constant == GrowthConstant::RhoLp && p == 1.0 {
        (0.4, 0.6)
    } else {
        (lo - 0.25, hi + 0.25)
    }
}

fn growth_point(space: &SpaceDescriptor, opts: &GrowthOptions) -> GrowthPoint {
    let d = space.real_dimension();
    let mut structured = vec![linalg::eye(d, d)];
    if let Some(h) = linalg::hadamard(d) {
        structured.push(h);
    }
    let gaussian: Vec<DMatrix<f64>> = (0..opts.gaussian_samples)
        .map(|k| {
            let mut rng = seeds::stream_rng(opts.seed, seeds::TAG_EXPERIMENT, ((d as u64) << 16) + k as u64);
            DMatrix::from_vec(d, d, seeds::gaussian_vec(&mut rng, d * d))
        })
        .collect();
    let ratio = |z: &DMatrix<f64>| certified_ratio(&Tensor2 { coeffs: z.clone(), left: *space, right: *space }, &opts.tensor).0;
    let g: Vec<f64> = gaussian.par_iter().map(ratio).collect();
    let s: Vec<f64> = structured.par_iter().map(ratio).collect();
    let gaussian_lower = g.iter().copied().fold(0.0, f64::max);
    let lower = s.iter().copied().fold(gaussian_lower, f64::max);
    GrowthPoint { n: space.n, lower, gaussian_lower }
}

/// Certified ρ(X, X) lower bounds over `ns` and their fitted growth
/// exponent. Each point is the best certified ratio over Gaussian tensors
/// and structured tensors (identity, Hadamard).
pub fn growth_fit(constant: GrowthConstant, p: f64, ns: &[usize], opts: &GrowthOptions) -> Result<GrowthReport> {
    let e = Exponent::new(p)?;
    let points: Vec<GrowthPoint> = ns
        .iter()
        .map(|&n| {
            let s = match constant {
                GrowthConstant::RhoLp => SpaceDescriptor::lp(n, e),
                GrowthConstant::RhoSchatten => SpaceDescriptor::schatten_sa(n, e),
            };
            growth_point(&s, opts)
        })
        .collect();
    let fit = loglog_fit(ns, &points.iter().map(|q| q.lower).collect::<Vec<_>>()).ok();
    let gaussian_fit = loglog_fit(ns, &points.iter().map(|q| q.gaussian_lower).collect::<Vec<_>>()).ok();
    let asserted = constant == GrowthConstant::RhoLp && ns.len() >= 3;
    Ok(GrowthReport { constant, p, points, fit, gaussian_fit, window: growth_window(constant, p), asserted })
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
    fn tensor_is_reproducible_and_standard() {
        let b = GaussianBasis::standard(lp(3, 1.0));
        let z1 = gaussian_tensor(&b, &b, 7);
        let z2 = gaussian_tensor(&b, &b, 7);
        assert_eq!(z1, z2);
        let mut rng = seeds::stream_rng(7, seeds::TAG_GAUSSIAN, 0);
        let g = DMatrix::from_vec(3, 3, seeds::gaussian_vec(&mut rng, 9));
        assert_eq!(z1.coeffs, g);
    }

    #[test]
    fn coefficient_moments() {
        let b = GaussianBasis::standard(lp(100, 2.0));
        let z = gaussian_tensor(&b, &b, 1);
        let m = z.coeffs.iter().sum::<f64>() / 1e4;
        let v = z.coeffs.iter().map(|x| x * x).sum::<f64>() / 1e4;
        assert!(m.abs() < 0.04);
        assert!((v - 1.0).abs() < 0.04);
    }

    #[test]
    fn chi_and_moments() {
        assert_relative_eq!(chi_mean(1), (2.0 / std::f64::consts::PI).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(chi_mean(2), (std::f64::consts::PI / 2.0).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(abs_gaussian_moment(2.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(abs_gaussian_moment(1.0), (2.0 / std::f64::consts::PI).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn chevet_hilbert_and_l1() {
        let b = GaussianBasis::standard(lp(6, 2.0));
        let c = chevet_rhs(&b, &b, 2000, 3).unwrap();
        assert!((c.rhs - 2.0 * chi_mean(6)).abs() < 4.0 * c.stderr);
        let b = GaussianBasis::standard(lp(6, 1.0));
        let c = chevet_rhs(&b, &b, 2000, 3).unwrap();
        // ‖T: ℓ_2 → ℓ_1‖ = √n multiplies 𝔼‖g‖₁ = n√(2/π).
        assert_relative_eq!(c.t_norm_upper, 6f64.sqrt(), max_relative = 1e-12);
        let expect = 2.0 * 6f64.sqrt() * 6.0 * (2.0 / std::f64::consts::PI).sqrt();
        assert!((c.rhs - expect).abs() < 4.0 * c.stderr);
    }

    #[test]
    fn projective_l1_mean() {
        let b = GaussianBasis::standard(lp(4, 1.0));
        let est = expected_norm_mc(&b, &b, NormKind::ProjectiveUpper, 400, 5, &TensorOptions::default()).unwrap();
        let expect = 16.0 * (2.0 / std::f64::consts::PI).sqrt();
        assert!((est.mean - expect).abs() < 4.0 * est.stderr);
    }

    #[test]
    fn dft_values() {
        let (b, a) = dft_real_matrix(4);
        assert_relative_eq!(b.iter().map(|x| x.abs()).sum::<f64>(), 6.0, max_relative = 1e-12);
        assert!(a.iter().map(|x| x.abs()).sum::<f64>() >= 6.0 - 4.0);
        for n in [4, 8, 12, 16] {
            assert!(dft_exact_denominator(n).unwrap() <= 2.0 * n as f64 + 1e-9);
        }
    }

    #[test]
    fn dft_slope() {
        let r = dft_growth_experiment(&[64, 128, 256, 512, 1024]).unwrap();
        assert!(r.fit.slope > 0.4 && r.fit.slope < 0.6, "{}", r.fit.slope);
    }

    #[test]
    fn least_squares_exact_line() {
        let f = least_squares(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert_relative_eq!(f.slope, 2.0, epsilon = 1e-12);
        assert_relative_eq!(f.intercept, 1.0, epsilon = 1e-12);
        assert!(least_squares(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn mc_needs_two_samples() {
        assert!(MonteCarloEstimate::from_values(&[1.0], 0).is_err());
    }
}
