//! Property-based invariants of norms, brackets and the elliptope.

use nalgebra::DMatrix;
use proptest::prelude::*;
use tensor_gauge::elliptope::{self, BetaOptions, ComplexMatrix};
use tensor_gauge::opnorm::{self, OperatorMatrix, OpnormOptions};
use tensor_gauge::randomized::{self, GaussianBasis, NormKind};
use tensor_gauge::spaces::{self, Element, Exponent, SpaceDescriptor};
use tensor_gauge::tensornorm::{self, Tensor2, TensorOptions};

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        Just(Exponent::ONE),
        Just(Exponent::TWO),
        Just(Exponent::INFINITY),
        (1.1f64..6.0).prop_map(|p| Exponent::new(p).unwrap()),
    ]
}

fn space() -> impl Strategy<Value = SpaceDescriptor> {
    prop_oneof![
        3 => (1usize..5, exponent()).prop_map(|(n, p)| SpaceDescriptor::lp(n, p)),
        1 => (1usize..3, exponent()).prop_map(|(n, p)| SpaceDescriptor::schatten_sa(n, p)),
    ]
}

fn vector(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, len)
}

fn space_and_vectors() -> impl Strategy<Value = (SpaceDescriptor, Vec<f64>, Vec<f64>)> {
    space().prop_flat_map(|s| {
        let d = s.real_dimension();
        (Just(s), vector(d), vector(d))
    })
}

fn operator() -> impl Strategy<Value = OperatorMatrix> {
    (space(), space()).prop_flat_map(|(e, f)| {
        let (r, c) = (f.real_dimension(), e.real_dimension());
        vector(r * c).prop_map(move |v| OperatorMatrix::new(DMatrix::from_vec(r, c, v), e, f).unwrap())
    })
}

fn fast_opts() -> OpnormOptions {
    OpnormOptions { restarts: 4, max_iter: 200, ..OpnormOptions::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_axioms((s, x, y) in space_and_vectors(), c in -4.0f64..4.0) {
        let nx = s.frame_norm(&x);
        let ny = s.frame_norm(&y);
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(s.frame_norm(&sum) <= (nx + ny) * (1.0 + 1e-12) + 1e-12);
        let scaled: Vec<f64> = x.iter().map(|a| c * a).collect();
        prop_assert!((s.frame_norm(&scaled) - c.abs() * nx).abs() <= 1e-10 * (1.0 + nx));
    }

    #[test]
    fn duality_pairing((s, x, y) in space_and_vectors()) {
        let pair: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        prop_assert!(pair.abs() <= s.frame_norm(&x) * s.dual().frame_norm(&y) * (1.0 + 1e-10) + 1e-10);
        let f = spaces::norming_functional(&s, &x);
        let attained: f64 = f.iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert!((attained - s.frame_norm(&x)).abs() <= 1e-9 * (1.0 + s.frame_norm(&x)));
        prop_assert!((s.dual().frame_norm(&f) - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn coordinates_round_trip((s, x, _y) in space_and_vectors()) {
        let e = spaces::from_frame(&s, &x);
        let back = spaces::to_frame(&s, &e);
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        prop_assert!((spaces::norm(&s, &Element::new(e.coords.clone())).unwrap() - s.frame_norm(&x)).abs() <= 1e-10 * (1.0 + s.frame_norm(&x)));
    }

    #[test]
    fn lp_norm_nonincreasing_in_p(x in vector(4), p in 1.0f64..5.0, dp in 0.0f64..3.0) {
        let a = spaces::lp_norm(&x, Exponent::new(p).unwrap());
        let b = spaces::lp_norm(&x, Exponent::new(p + dp).unwrap());
        prop_assert!(b <= a * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn opnorm_bracket_is_sound(a in operator()) {
        let opts = fast_opts();
        let b = opnorm::opnorm_bracket(&a, &opts);
        prop_assert!(b.lower <= b.upper * (1.0 + 1e-9) + 1e-12);
        if let Some(v) = opnorm::witness_value(&a, &b) {
            prop_assert!((v - b.lower).abs() <= 1e-9 * (1.0 + b.lower.abs()));
        }
    }

    #[test]
    fn opnorm_scales_and_adjoints(a in operator(), c in 0.1f64..5.0) {
        let opts = fast_opts();
        let b = opnorm::opnorm_bracket(&a, &opts);
        let bs = opnorm::opnorm_bracket(&a.scaled(c), &opts);
        prop_assert!(bs.lower <= c * b.upper * (1.0 + 1e-9) + 1e-12);
        prop_assert!(bs.upper >= c * b.lower * (1.0 - 1e-9) - 1e-12);
        let adj = opnorm::opnorm_bracket(&opnorm::adjoint(&a), &opts);
        prop_assert!(adj.lower <= b.upper * (1.0 + 1e-9) + 1e-12);
        prop_assert!(b.lower <= adj.upper * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn injective_below_projective(a in operator()) {
        let z = Tensor2::new(a.matrix.transpose(), a.domain.dual(), a.codomain).unwrap();
        let opts = TensorOptions { opnorm: fast_opts(), ..TensorOptions::default() };
        let inj = tensornorm::injective_norm(&z, &opts);
        let (proj, dec) = tensornorm::projective_bracket(&z, &opts);
        prop_assert!(inj.lower <= proj.upper * (1.0 + 1e-9) + 1e-12);
        prop_assert!(proj.lower <= proj.upper * (1.0 + 1e-9) + 1e-12);
        if let Some(v) = tensornorm::dual_witness_value(&z, &proj) {
            prop_assert!((v - proj.lower).abs() <= 1e-9 * (1.0 + proj.lower));
        }
        let resum = dec.resum(z.coeffs.nrows(), z.coeffs.ncols());
        prop_assert!((resum - &z.coeffs).norm() <= 1e-8 * (1.0 + z.coeffs.norm()));
    }

    #[test]
    fn cross_norm_on_rank_one((e, x, _) in space_and_vectors(), (f, y, _) in space_and_vectors()) {
        prop_assume!(x.iter().any(|v| v.abs() > 1e-3) && y.iter().any(|v| v.abs() > 1e-3));
        let c = DMatrix::from_fn(x.len(), y.len(), |i, j| x[i] * y[j]);
        let z = Tensor2::new(c, e, f).unwrap();
        let want = e.frame_norm(&x) * f.frame_norm(&y);
        let opts = TensorOptions { opnorm: fast_opts(), ..TensorOptions::default() };
        let (proj, _) = tensornorm::projective_bracket(&z, &opts);
        let inj = tensornorm::injective_norm(&z, &opts);
        prop_assert!(proj.upper <= want * (1.0 + 1e-8));
        prop_assert!(inj.lower >= want * (1.0 - 1e-6));
    }

    #[test]
    fn projection_lands_in_elliptope(v in vector(9)) {
        let m = DMatrix::from_vec(3, 3, v);
        let mut s = &m * m.transpose();
        for i in 0..3 {
            s[(i, i)] += 0.1;
        }
        let p = elliptope::project_to_elliptope(&ComplexMatrix::real(s)).unwrap();
        prop_assert!(elliptope::rank_probe(&p, 1e-8).is_ok());
    }

    #[test]
    fn beta_is_monotone_in_rank(seed in 0u64..1000) {
        let a = elliptope::random_psd(4, seed, true);
        let opts = BetaOptions { restarts: 8, seed, ..BetaOptions::default() };
        let mut prev = f64::NEG_INFINITY;
        for k in 1..=4 {
            let b = elliptope::beta_bm(&a, k, &opts).unwrap();
            prop_assert!(b.lower >= prev - 1e-9 * prev.abs());
            prop_assert!(b.factor.row_norm_error() <= 1e-12);
            prev = b.lower;
        }
    }
}

#[test]
fn monte_carlo_is_thread_count_independent() {
    let b = GaussianBasis::standard(SpaceDescriptor::lp(3, Exponent::new(1.5).unwrap()));
    let opts = TensorOptions::default();
    let run = || randomized::expected_norm_mc(&b, &b, NormKind::Injective, 40, 17, &opts).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
    assert_eq!(one, many);
}

#[test]
fn stderr_shrinks_with_samples() {
    let b = GaussianBasis::standard(SpaceDescriptor::lp(4, Exponent::ONE));
    let small = randomized::gaussian_sum_norm(&b, 4000, 3).unwrap();
    let large = randomized::gaussian_sum_norm(&b, 8000, 3).unwrap();
    let ratio = small.stderr / large.stderr;
    assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.2, "{ratio}");
}
