//! Library results against independently computed reference values:
//! brute-force enumeration, closed forms and direct matrix algebra that do
//! not go through the routines under test.

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use tensor_gauge::constants::{self, VnOptions};
use tensor_gauge::elliptope::{self, ComplexMatrix};
use tensor_gauge::opnorm::{self, OperatorMatrix, OpnormOptions};
use tensor_gauge::randomized;
use tensor_gauge::seeds;
use tensor_gauge::spaces::{Exponent, SpaceDescriptor};
use tensor_gauge::tensornorm::{self, RhoOptions, Tensor2, TensorOptions};

fn lp(n: usize, p: f64) -> SpaceDescriptor {
    let e = if p.is_infinite() { Exponent::INFINITY } else { Exponent::new(p).unwrap() };
    SpaceDescriptor::lp(n, e)
}

fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = seeds::stream_rng(seed, seeds::TAG_EXPERIMENT, 99);
    DMatrix::from_vec(rows, cols, seeds::gaussian_vec(&mut rng, rows * cols))
}

/// max over all sign vectors s, t of tᵀ A s.
fn brute_inf_to_one(a: &DMatrix<f64>) -> f64 {
    let (m, n) = a.shape();
    let mut best = f64::NEG_INFINITY;
    for s in 0..(1u32 << n) {
        for t in 0..(1u32 << m) {
            let mut v = 0.0;
            for i in 0..m {
                for j in 0..n {
                    let si = if (s >> j) & 1 == 1 { -1.0 } else { 1.0 };
                    let ti = if (t >> i) & 1 == 1 { -1.0 } else { 1.0 };
                    v += ti * a[(i, j)] * si;
                }
            }
            best = best.max(v);
        }
    }
    best
}

#[test]
fn inf_to_one_matches_brute_force() {
    for seed in 0..20 {
        let a = random_matrix(3 + seed as usize % 3, 2 + seed as usize % 4, seed);
        let (m, n) = a.shape();
        let op = OperatorMatrix::new(a.clone(), lp(n, f64::INFINITY), lp(m, 1.0)).unwrap();
        let b = opnorm::opnorm_inf_to_one(&op).unwrap();
        assert_relative_eq!(b.lower, brute_inf_to_one(&a), max_relative = 1e-12);
    }
}

#[test]
fn one_to_inf_is_max_entry() {
    let a = random_matrix(4, 5, 3);
    let op = OperatorMatrix::new(a.clone(), lp(5, 1.0), lp(4, f64::INFINITY)).unwrap();
    let want = a.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    assert_relative_eq!(opnorm::opnorm_one_to_inf(&op).unwrap().lower, want, max_relative = 1e-14);
}

#[test]
fn spectral_norm_matches_eigenvalues_of_gram() {
    let a = random_matrix(4, 3, 8);
    let op = OperatorMatrix::new(a.clone(), lp(3, 2.0), lp(4, 2.0)).unwrap();
    let gram = a.transpose() * &a;
    let top = gram.symmetric_eigenvalues().iter().fold(0.0_f64, |m, &x| m.max(x));
    assert_relative_eq!(opnorm::opnorm_spectral(&op).unwrap().lower, top.sqrt(), max_relative = 1e-12);
}

#[test]
fn l1_left_projective_is_sum_of_row_norms() {
    for q in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
        let c = random_matrix(4, 3, 5);
        let z = Tensor2::new(c.clone(), lp(4, 1.0), lp(3, q)).unwrap();
        let want: f64 = (0..4).map(|i| tensor_gauge::spaces::lp_norm(&c.row(i).iter().copied().collect::<Vec<_>>(), lp(3, q).p)).sum();
        let (b, _) = tensornorm::projective_bracket(&z, &TensorOptions::default());
        assert_relative_eq!(b.upper, want, max_relative = 1e-12);
        assert!(b.lower <= want * (1.0 + 1e-12));
    }
}

#[test]
fn hilbert_projective_is_trace_norm() {
    let c = random_matrix(4, 4, 6);
    let z = Tensor2::new(c.clone(), lp(4, 2.0), lp(4, 2.0)).unwrap();
    let want: f64 = c.clone().svd(false, false).singular_values.iter().sum();
    let (b, _) = tensornorm::projective_bracket(&z, &TensorOptions::default());
    assert_relative_eq!(b.lower, want, max_relative = 1e-10);
    assert_relative_eq!(b.upper, want, max_relative = 1e-10);
}

#[test]
fn rho_hilbert_and_l1_lp_closed_forms() {
    let opts = RhoOptions::default();
    for n in 1..=5 {
        let r = tensornorm::rho_bracket(&lp(n, 2.0), &lp(n, 2.0), &opts).unwrap();
        assert_relative_eq!(r.bracket.lower, n as f64, max_relative = 1e-9);
        assert_relative_eq!(r.bracket.upper, n as f64, max_relative = 1e-9);
        for p in [2.0, 3.0, 4.0] {
            // Identity tensor: Σ row norms = n over ‖id: ℓ_∞ → ℓ_p‖ = n^{1/p}.
            let r = tensornorm::rho_bracket(&lp(n, 1.0), &lp(n, p), &opts).unwrap();
            let want = (n as f64).powf(1.0 - 1.0 / p);
            assert!(r.bracket.lower >= want * (1.0 - 1e-9));
            assert!(r.bracket.upper >= r.bracket.lower);
        }
    }
}

#[test]
fn hadamard_ratio_in_l1() {
    // ‖H‖_{ℓ_∞→ℓ_1} for the 4×4 Hadamard matrix is 8, so Σ|h| / 8 = 2.
    let h = tensor_gauge::linalg::hadamard(4).unwrap();
    assert_relative_eq!(brute_inf_to_one(&h), 8.0, epsilon = 1e-12);
    let z = Tensor2::new(h, lp(4, 1.0), lp(4, 1.0)).unwrap();
    let (v, w) = tensornorm::certified_ratio(&z, &TensorOptions::default());
    assert_relative_eq!(v, 2.0, max_relative = 1e-10);
    assert_relative_eq!(w.value(), v, max_relative = 1e-12);
}

#[test]
fn beta_matches_dense_phase_search() {
    for seed in 0..5 {
        let a = elliptope::random_psd(3, seed, true);
        let exact = elliptope::beta_exact_small(&a).unwrap();
        let ac = a.to_complex();
        let mut best = f64::NEG_INFINITY;
        let steps = 240;
        for s in 0..steps {
            for t in 0..steps {
                let th = [0.0, 2.0 * std::f64::consts::PI * s as f64 / steps as f64, 2.0 * std::f64::consts::PI * t as f64 / steps as f64];
                let z: Vec<Complex64> = th.iter().map(|&x| Complex64::from_polar(1.0, x)).collect();
                let mut v = Complex64::new(0.0, 0.0);
                for i in 0..3 {
                    for j in 0..3 {
                        v += z[i].conj() * ac[(i, j)] * z[j];
                    }
                }
                best = best.max(v.re);
            }
        }
        assert!(exact >= best - 1e-12);
        assert!(exact <= best * (1.0 + 1e-3));
    }
}

#[test]
fn dft_sum_at_four() {
    let (b, _) = tensornorm::dft_real_matrix(4);
    let want = 6.0;
    let got: f64 = (0..4)
        .flat_map(|j| (0..4).map(move |k| ((2.0 * std::f64::consts::PI * (j * k) as f64 / 4.0).cos() / 2.0).abs()))
        .sum();
    assert_relative_eq!(got, want, epsilon = 1e-12);
    assert_relative_eq!(b.iter().map(|x| x.abs()).sum::<f64>(), want, epsilon = 1e-12);
}

#[test]
fn chi_mean_small_cases() {
    let pi = std::f64::consts::PI;
    assert_relative_eq!(randomized::chi_mean(3), 2.0 * (2.0 / pi).sqrt(), max_relative = 1e-12);
    assert_relative_eq!(randomized::chi_mean(4), 3.0 * (pi / 2.0).sqrt() / 2.0, max_relative = 1e-12);
}

#[test]
fn gamma_identity_closed_form() {
    // ‖id: ℓ_p → ℓ_{p′}‖ = 1 and ‖id: ℓ_{p′} → ℓ_p‖ = n^{1/p − 1/p′} for p ≤ 2.
    let opts = OpnormOptions::default();
    for p in [1.0, 1.25, 1.5, 2.0] {
        for n in 1..=6 {
            let v = constants::gamma_identity_witness(&lp(n, p), &opts).value().unwrap();
            let r = 1.0 / p;
            let want = n as f64 / (n as f64).powf(r - (1.0 - r));
            assert_relative_eq!(v, want, max_relative = 1e-10);
        }
    }
}

#[test]
fn tetrahedral_gram_value() {
    // ⟨D, D⟩ = 4 + 12/3 = 8 for the tetrahedral Gram matrix.
    let d = constants::tetrahedral_factor().gram();
    assert_relative_eq!(d.trace_pairing(&d), 8.0, max_relative = 1e-12);
    let w = constants::vn_witness_search(&VnOptions::default()).unwrap();
    let c = elliptope::complex_inf_to_one_certified(&d, 1e-10, 4_000_000);
    assert!(w.value >= 8.0 / c.upper * (1.0 - 1e-9));
    assert!(w.success);
}

#[test]
fn psd_sup_form_equals_bilinear_on_identity() {
    let a = ComplexMatrix::real(DMatrix::identity(3, 3));
    assert_relative_eq!(elliptope::beta_exact_small(&a).unwrap(), 3.0, max_relative = 1e-12);
}

#[test]
fn positive_l1_linf_beats_one() {
    // A = Gram of three unit vectors at 120°, B = id, C = A/‖A‖_{ℓ_∞→ℓ_1}:
    // tr(CBA) = ‖A‖_F² / 4 = (3 + 6/4) / 4 = 9/8.
    let a = DMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { -0.5 });
    assert_relative_eq!(brute_inf_to_one(&a), 4.0, epsilon = 1e-12);
    let (e, f) = (lp(3, 1.0), lp(3, f64::INFINITY));
    let est = constants::kg_plus_lower(&e, &f, &constants::KgOptions::default()).unwrap();
    assert!(est.bracket.lower >= 9.0 / 8.0 - 1e-9, "{}", est.bracket.lower);
    assert!(est.bracket.lower <= 1.783);
}
