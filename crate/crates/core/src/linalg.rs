//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Frobenius inner product Σ a_ij b_ij.
pub fn frob_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn frob_norm(a: &DMatrix<f64>) -> f64 {
    a.norm()
}

/// Flips `v` (and `u`) so the largest-magnitude entry of `v` is positive.
fn normalize_sign(u: &mut DVector<f64>, v: &mut DVector<f64>) {
    if v.is_empty() {
        return;
    }
    let mut k = 0;
    for i in 0..v.len() {
        if v[i].abs() > v[k].abs() + 1e-14 {
            k = i;
        }
    }
    if v[k] < 0.0 {
        u.neg_mut();
        v.neg_mut();
    }
}

/// Largest singular value with sign-normalized left and right vectors.
pub fn top_singular(a: &DMatrix<f64>) -> (f64, DVector<f64>, DVector<f64>) {
    let (m, n) = a.shape();
    if m == 0 || n == 0 || a.iter().all(|&x| x == 0.0) {
        let mut u = DVector::zeros(m);
        let mut v = DVector::zeros(n);
        if m > 0 {
            u[0] = 1.0;
        }
        if n > 0 {
            v[0] = 1.0;
        }
        return (0.0, u, v);
    }
    let svd = a.clone().svd(true, true);
    let mut k = 0;
    for i in 0..svd.singular_values.len() {
        if svd.singular_values[i] > svd.singular_values[k] {
            k = i;
        }
    }
    let mut u = svd.u.as_ref().unwrap().column(k).into_owned();
    let mut v = svd.v_t.as_ref().unwrap().row(k).transpose();
    normalize_sign(&mut u, &mut v);
    (svd.singular_values[k], u, v)
}

/// Singular values in decreasing order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

pub fn trace_norm(a: &DMatrix<f64>) -> f64 {
    singular_values(a).iter().sum()
}

/// Polar factor U Vᵀ of the thin SVD.
pub fn polar(a: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = a.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Minimum eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    a.clone().symmetric_eigenvalues().iter().fold(f64::INFINITY, |m, &x| m.min(x))
}

/// Sylvester–Hadamard matrix of order `n` when `n` is a power of two.
pub fn hadamard(n: usize) -> Option<DMatrix<f64>> {
    if n == 0 || !n.is_power_of_two() {
        return None;
    }
    let mut h = DMatrix::from_element(1, 1, 1.0);
    while h.nrows() < n {
        let k = h.nrows();
        let mut g = DMatrix::zeros(2 * k, 2 * k);
        for i in 0..k {
            for j in 0..k {
                let x = h[(i, j)];
                g[(i, j)] = x;
                g[(i, j + k)] = x;
                g[(i + k, j)] = x;
                g[(i + k, j + k)] = -x;
            }
        }
        h = g;
    }
    Some(h)
}

/// n×m matrix with ones on the main diagonal.
pub fn eye(n: usize, m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, m, |i, j| if i == j { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn top_singular_of_shift() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let (s, u, v) = top_singular(&a);
        assert_relative_eq!(s, 1.0, epsilon = 1e-14);
        assert_relative_eq!((&a * &v - &u * s).norm(), 0.0, epsilon = 1e-14);
        assert!(v[1] > 0.0);
    }

    #[test]
    fn hadamard_is_orthogonal() {
        let h = hadamard(4).unwrap();
        assert_eq!(&h * h.transpose(), eye(4, 4) * 4.0);
        assert!(hadamard(3).is_none());
    }

    #[test]
    fn polar_is_orthogonal() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.5, 3.0]);
        let q = polar(&a);
        assert_relative_eq!((&q * q.transpose() - eye(2, 2)).norm(), 0.0, epsilon = 1e-12);
    }
}
