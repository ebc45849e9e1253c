//! Finite-dimensional ℓ_p and self-adjoint Schatten spaces.
//!
//! Coordinates. An ℓ_p^n element is its coordinate vector. An element of
//! S_p^{n,sa} is stored as `n²` reals: the diagonal, then the upper triangle
//! in row-major order as `(re, im)` pairs. Internally the routines also use
//! *frame* coordinates, where off-diagonal pairs are scaled by √2; the frame
//! is Hilbert–Schmidt orthonormal, so the trace pairing between a space and
//! its dual is the plain dot product of frame vectors.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{GaugeError, Result};
use crate::seeds;

/// Largest `n` for which sign vectors are enumerated.
pub const ENUM_CUTOFF: usize = 20;

/// Relative eigenvalue floor: |λ| below this times ‖X‖_F counts as zero.
pub const EIG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Lp,
    SchattenSa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarField {
    Real,
    Complex,
}

/// An exponent in [1, ∞]. Equality compares reciprocals to 1e-12 so that
/// conjugating twice gives back an equal exponent.
#[derive(Debug, Clone, Copy)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(GaugeError::InvalidArgument(format!("exponent {p} is below 1")));
        }
        Ok(Exponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// 1/p, with 1/∞ = 0.
    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// Exponent with the given reciprocal (0 gives ∞).
    pub fn from_reciprocal(r: f64) -> Exponent {
        if r <= 0.0 {
            Exponent::INFINITY
        } else {
            Exponent(1.0 / r)
        }
    }

    pub fn conjugate(self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INFINITY
        } else if self.is_infinite() {
            Exponent::ONE
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }

    pub fn is_one(self) -> bool {
        self == Exponent::ONE
    }

    pub fn is_two(self) -> bool {
        self == Exponent::TWO
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        (self.reciprocal() - other.reciprocal()).abs() <= 1e-12
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = GaugeError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "∞" | "infinity" => Ok(Exponent::INFINITY),
            _ => {
                let p: f64 = s
                    .parse()
                    .map_err(|_| GaugeError::InvalidArgument(format!("bad exponent '{s}'")))?;
                Exponent::new(p)
            }
        }
    }
}

/// Names ℓ_p^n or S_p^{n,sa}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceDescriptor {
    pub family: Family,
    pub n: usize,
    pub p: Exponent,
    pub field: ScalarField,
}

impl SpaceDescriptor {
    pub fn lp(n: usize, p: Exponent) -> Self {
        SpaceDescriptor { family: Family::Lp, n, p, field: ScalarField::Real }
    }

    pub fn schatten_sa(n: usize, p: Exponent) -> Self {
        SpaceDescriptor { family: Family::SchattenSa, n, p, field: ScalarField::Real }
    }

    pub fn complex(mut self) -> Self {
        self.field = ScalarField::Complex;
        self
    }

    pub fn with_p(mut self, p: Exponent) -> Self {
        self.p = p;
        self
    }

    pub fn real_dimension(&self) -> usize {
        match self.family {
            Family::Lp => self.n,
            Family::SchattenSa => self.n * self.n,
        }
    }

    pub fn dual(&self) -> Self {
        let mut d = *self;
        d.p = self.p.conjugate();
        d
    }

    pub fn is_lp(&self) -> bool {
        self.family == Family::Lp
    }

    pub fn is_schatten(&self) -> bool {
        self.family == Family::SchattenSa
    }

    /// Norm of a vector given in frame coordinates.
    pub fn frame_norm(&self, v: &[f64]) -> f64 {
        match self.family {
            Family::Lp => lp_norm(v, self.p),
            Family::SchattenSa => {
                let h = hermitian_from_frame(self.n, v);
                lp_norm(&hermitian_eigenvalues(&h), self.p)
            }
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        let expected = self.real_dimension();
        if len != expected {
            return Err(GaugeError::DimensionMismatch { expected, got: len });
        }
        Ok(())
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Lp => write!(f, "l{}^{}", self.p, self.n)?,
            Family::SchattenSa => write!(f, "S{}^{}", self.p, self.n)?,
        }
        if self.field == ScalarField::Complex {
            write!(f, "(C)")?;
        }
        Ok(())
    }
}

impl FromStr for SpaceDescriptor {
    type Err = GaugeError;

    /// Parses `l<p>^<n>` or `S<p>^<n>`, e.g. `l1.5^4`, `linf^3`, `S1^2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || GaugeError::InvalidArgument(format!("bad space '{s}'"));
        let (family, rest) = if let Some(r) = s.strip_prefix('l') {
            (Family::Lp, r)
        } else if let Some(r) = s.strip_prefix('S') {
            (Family::SchattenSa, r)
        } else {
            return Err(bad());
        };
        let (p, n) = rest.split_once('^').ok_or_else(bad)?;
        let p: Exponent = p.parse()?;
        let n: usize = n.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        Ok(SpaceDescriptor { family, n, p, field: ScalarField::Real })
    }
}

/// A point of a space, in the documented (unscaled) coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub coords: Vec<f64>,
}

impl Element {
    pub fn new(coords: Vec<f64>) -> Self {
        Element { coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// ℓ_p norm of a real slice.
pub fn lp_norm(v: &[f64], p: Exponent) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    } else if p.value() == 1.0 {
        v.iter().map(|x| x.abs()).sum()
    } else if p.value() == 2.0 {
        let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
    } else {
        let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let q = p.value();
        scale * v.iter().map(|x| (x.abs() / scale).powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Norm of `x` in `space`.
pub fn norm(space: &SpaceDescriptor, x: &Element) -> Result<f64> {
    space.check_len(x.len())?;
    match space.family {
        Family::Lp => Ok(lp_norm(&x.coords, space.p)),
        Family::SchattenSa => {
            let h = hermitian_from_coords(space.n, &x.coords);
            Ok(lp_norm(&hermitian_eigenvalues(&h), space.p))
        }
    }
}

pub fn dual(space: &SpaceDescriptor) -> SpaceDescriptor {
    space.dual()
}

/// Trace pairing ⟨x, y⟩ between an element of a space and one of its dual.
pub fn pairing(space: &SpaceDescriptor, x: &Element, y: &Element) -> Result<f64> {
    space.check_len(x.len())?;
    space.check_len(y.len())?;
    let fx = to_frame(space, x);
    let fy = to_frame(space, y);
    Ok(fx.iter().zip(fy.iter()).map(|(a, b)| a * b).sum())
}

/// Converts documented coordinates to frame coordinates.
pub fn to_frame(space: &SpaceDescriptor, x: &Element) -> Vec<f64> {
    match space.family {
        Family::Lp => x.coords.clone(),
        Family::SchattenSa => {
            let n = space.n;
            let mut v = x.coords.clone();
            for c in v.iter_mut().skip(n) {
                *c *= std::f64::consts::SQRT_2;
            }
            v
        }
    }
}

/// Converts frame coordinates back to documented coordinates.
pub fn from_frame(space: &SpaceDescriptor, v: &[f64]) -> Element {
    match space.family {
        Family::Lp => Element::new(v.to_vec()),
        Family::SchattenSa => {
            let n = space.n;
            let mut c = v.to_vec();
            for x in c.iter_mut().skip(n) {
                *x /= std::f64::consts::SQRT_2;
            }
            Element::new(c)
        }
    }
}

/// Builds the Hermitian matrix described by documented coordinates.
pub fn hermitian_from_coords(n: usize, coords: &[f64]) -> DMatrix<Complex64> {
    let mut h = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        h[(i, i)] = Complex64::new(coords[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = Complex64::new(coords[k], coords[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

/// Inverse of [`hermitian_from_coords`]; reads the upper triangle.
pub fn coords_from_hermitian(h: &DMatrix<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    let mut c = Vec::with_capacity(n * n);
    for i in 0..n {
        c.push(h[(i, i)].re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            c.push(h[(i, j)].re);
            c.push(h[(i, j)].im);
        }
    }
    c
}

pub fn hermitian_from_frame(n: usize, v: &[f64]) -> DMatrix<Complex64> {
    let mut h = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        h[(i, i)] = Complex64::new(v[i], 0.0);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = Complex64::new(v[k] * s, v[k + 1] * s);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

pub fn frame_from_hermitian(h: &DMatrix<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    let mut v = coords_from_hermitian(h);
    for x in v.iter_mut().skip(n) {
        *x *= std::f64::consts::SQRT_2;
    }
    v
}

fn frobenius(h: &DMatrix<Complex64>) -> f64 {
    h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of a Hermitian matrix, with values below the floor set to 0.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let fro = frobenius(h);
    if fro == 0.0 {
        return vec![0.0; h.nrows()];
    }
    let eig = SymmetricEigen::new(h.clone());
    eig.eigenvalues
        .iter()
        .map(|&l| if l.abs() < EIG_FLOOR * fro { 0.0 } else { l })
        .collect()
}

/// A unit vector `u` of the dual space (frame coordinates) with
/// ⟨u, v⟩ = ‖v‖. For `v = 0` any unit dual vector qualifies; the first frame
/// direction is returned.
pub fn norming_functional(space: &SpaceDescriptor, v: &[f64]) -> Vec<f64> {
    match space.family {
        Family::Lp => lp_norming(v, space.p),
        Family::SchattenSa => schatten_norming(space.n, v, space.p),
    }
}

fn lp_norming(v: &[f64], p: Exponent) -> Vec<f64> {
    let d = v.len();
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        let mut u = vec![0.0; d];
        if d > 0 {
            u[0] = 1.0;
        }
        return u;
    }
    if p.is_infinite() {
        let k = argmax_abs(v);
        let mut u = vec![0.0; d];
        u[k] = v[k].signum();
        return u;
    }
    if p.value() == 1.0 {
        return v.iter().map(|&x| sign0(x)).collect();
    }
    let q = p.value();
    let w: Vec<f64> = v
        .iter()
        .map(|&x| sign0(x) * (x.abs() / scale).powf(q - 1.0))
        .collect();
    let wn = lp_norm(&w, p.conjugate());
    w.into_iter().map(|x| x / wn).collect()
}

fn schatten_norming(n: usize, v: &[f64], p: Exponent) -> Vec<f64> {
    let h = hermitian_from_frame(n, v);
    let fro = frobenius(&h);
    if fro == 0.0 {
        let mut u = vec![0.0; n * n];
        u[0] = 1.0;
        return u;
    }
    let eig = SymmetricEigen::new(h);
    let lam: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l.abs() < EIG_FLOOR * fro { 0.0 } else { l })
        .collect();
    let f = lp_norming(&lam, p);
    let u = &eig.eigenvectors;
    let mut y = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (k, &fk) in f.iter().enumerate() {
        if fk == 0.0 {
            continue;
        }
        let col = u.column(k);
        for i in 0..n {
            for j in 0..n {
                y[(i, j)] += col[i] * col[j].conj() * fk;
            }
        }
    }
    frame_from_hermitian(&y)
}

fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// First index of the largest absolute entry.
pub fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

/// Sign vector for `mask` over `n` coordinates: coordinate `i` is −1 when
/// bit `n-1-i` is set, so increasing masks are lexicographically ordered
/// with `+1 < −1`.
pub fn sign_vector(mask: u64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if (mask >> (n - 1 - i)) & 1 == 1 { -1.0 } else { 1.0 })
        .collect()
}

/// Extreme points of the unit ball of ℓ_1^n or ℓ_∞^n (real). With
/// `one_per_pair`, only the representative of each ± pair whose first
/// nonzero coordinate is positive is kept.
pub fn unit_ball_extreme_points(space: &SpaceDescriptor, one_per_pair: bool) -> Result<Vec<Element>> {
    if space.family != Family::Lp {
        return Err(GaugeError::UnsupportedSpace(format!("{space}: not an l_p space")));
    }
    if space.field == ScalarField::Complex {
        return Err(GaugeError::UnsupportedSpace(format!("{space}: complex ball has no finite extreme set")));
    }
    let n = space.n;
    if n > ENUM_CUTOFF {
        return Err(GaugeError::UnsupportedSpace(format!("{space}: n exceeds {ENUM_CUTOFF}")));
    }
    if space.p.is_one() {
        let mut out = Vec::new();
        for i in 0..n {
            for s in [1.0, -1.0] {
                if one_per_pair && s < 0.0 {
                    continue;
                }
                let mut c = vec![0.0; n];
                c[i] = s;
                out.push(Element::new(c));
            }
        }
        Ok(out)
    } else if space.p.is_infinite() {
        let count: u64 = if one_per_pair { 1 << (n - 1) } else { 1 << n };
        Ok((0..count).map(|m| Element::new(sign_vector(m, n))).collect())
    } else {
        Err(GaugeError::UnsupportedSpace(format!("{space}: extreme points only for p in {{1, inf}}")))
    }
}

/// Deterministic point of the unit sphere: a seeded Gaussian vector in
/// frame coordinates, normalized.
pub fn sample_unit_sphere(space: &SpaceDescriptor, seed: u64) -> Element {
    let d = space.real_dimension();
    let mut rng = seeds::stream_rng(seed, seeds::TAG_SPHERE, 0);
    loop {
        let v = seeds::gaussian_vec(&mut rng, d);
        let nv = space.frame_norm(&v);
        if nv > 0.0 {
            let v: Vec<f64> = v.iter().map(|x| x / nv).collect();
            return from_frame(space, &v);
        }
    }
}

/// ‖id: ℓ_p^n → ℓ_q^n‖ (equally S_p^n → S_q^n with `n` the side length).
pub fn id_embedding_norm(p: Exponent, q: Exponent, n: usize) -> f64 {
    let e = q.reciprocal() - p.reciprocal();
    if e <= 0.0 {
        1.0
    } else {
        (n as f64).powf(e)
    }
}

/// ‖id: E → F‖ for two descriptors of the same family and size.
pub fn embedding_between(from: &SpaceDescriptor, to: &SpaceDescriptor) -> f64 {
    id_embedding_norm(from.p, to.p, from.n)
}

/// Frame coordinates as a column vector.
pub fn frame_vector(space: &SpaceDescriptor, x: &Element) -> DVector<f64> {
    DVector::from_vec(to_frame(space, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(x: f64) -> Exponent {
        Exponent::new(x).unwrap()
    }

    #[test]
    fn norm_examples() {
        let linf = SpaceDescriptor::lp(3, Exponent::INFINITY);
        assert_eq!(norm(&linf, &Element::new(vec![1.0, -2.0, 0.0])).unwrap(), 2.0);
        let l2 = SpaceDescriptor::lp(2, Exponent::TWO);
        assert_eq!(norm(&l2, &Element::new(vec![3.0, 4.0])).unwrap(), 5.0);
        let s1 = SpaceDescriptor::schatten_sa(2, Exponent::ONE);
        assert_relative_eq!(norm(&s1, &Element::new(vec![1.0, -1.0, 0.0, 0.0])).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn norm_rejects_wrong_length() {
        let l2 = SpaceDescriptor::lp(2, Exponent::TWO);
        assert!(matches!(
            norm(&l2, &Element::new(vec![1.0])),
            Err(GaugeError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn dual_examples() {
        assert_eq!(SpaceDescriptor::lp(4, Exponent::ONE).dual(), SpaceDescriptor::lp(4, Exponent::INFINITY));
        assert_eq!(SpaceDescriptor::lp(5, Exponent::TWO).dual(), SpaceDescriptor::lp(5, Exponent::TWO));
        assert_eq!(SpaceDescriptor::schatten_sa(2, p(1.5)).dual(), SpaceDescriptor::schatten_sa(2, p(3.0)));
        let s = SpaceDescriptor::lp(3, p(1.3));
        assert_eq!(s.dual().dual(), s);
    }

    #[test]
    fn extreme_point_examples() {
        let l1 = SpaceDescriptor::lp(2, Exponent::ONE);
        assert_eq!(unit_ball_extreme_points(&l1, false).unwrap().len(), 4);
        let linf = SpaceDescriptor::lp(2, Exponent::INFINITY);
        let pts = unit_ball_extreme_points(&linf, false).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0].coords, vec![1.0, 1.0]);
        assert_eq!(unit_ball_extreme_points(&linf, true).unwrap().len(), 2);
        let l2 = SpaceDescriptor::lp(3, Exponent::TWO);
        assert!(unit_ball_extreme_points(&l2, false).is_err());
        assert!(unit_ball_extreme_points(&linf.complex(), false).is_err());
        assert!(unit_ball_extreme_points(&SpaceDescriptor::lp(21, Exponent::ONE), false).is_err());
    }

    #[test]
    fn sphere_samples() {
        for sp in [SpaceDescriptor::lp(3, Exponent::TWO), SpaceDescriptor::lp(3, Exponent::ONE)] {
            let x = sample_unit_sphere(&sp, 7);
            assert_relative_eq!(norm(&sp, &x).unwrap(), 1.0, max_relative = 1e-12);
            assert_eq!(x, sample_unit_sphere(&sp, 7));
        }
        let s = SpaceDescriptor::schatten_sa(3, p(1.5));
        assert_relative_eq!(norm(&s, &sample_unit_sphere(&s, 2)).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn embedding_examples() {
        assert_relative_eq!(id_embedding_norm(Exponent::TWO, p(1.5), 4), 4f64.powf(1.0 / 6.0), max_relative = 1e-14);
        assert_eq!(id_embedding_norm(Exponent::ONE, Exponent::INFINITY, 5), 1.0);
        assert_eq!(id_embedding_norm(Exponent::INFINITY, Exponent::ONE, 3), 3.0);
    }

    #[test]
    fn hermitian_round_trip() {
        let c = vec![1.0, 2.0, 3.0, 0.5, -0.25, 1.5, 2.5, -1.0, 0.0];
        let h = hermitian_from_coords(3, &c);
        assert_eq!(coords_from_hermitian(&h), c);
        let s = SpaceDescriptor::schatten_sa(3, Exponent::TWO);
        let f = to_frame(&s, &Element::new(c.clone()));
        let fro: f64 = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert_relative_eq!(lp_norm(&f, Exponent::TWO), fro, max_relative = 1e-14);
        assert_eq!(from_frame(&s, &f).coords.len(), 9);
    }

    #[test]
    fn norming_functionals_attain_norm() {
        let spaces = [
            SpaceDescriptor::lp(4, Exponent::ONE),
            SpaceDescriptor::lp(4, p(3.0)),
            SpaceDescriptor::lp(4, Exponent::INFINITY),
            SpaceDescriptor::schatten_sa(2, Exponent::ONE),
            SpaceDescriptor::schatten_sa(3, p(1.5)),
            SpaceDescriptor::schatten_sa(2, Exponent::INFINITY),
        ];
        for (k, sp) in spaces.iter().enumerate() {
            let x = sample_unit_sphere(sp, 100 + k as u64);
            let v = to_frame(sp, &x);
            let u = norming_functional(sp, &v);
            let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert_relative_eq!(dot, sp.frame_norm(&v), max_relative = 1e-10);
            assert_relative_eq!(sp.dual().frame_norm(&u), 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn parse_and_display() {
        let s: SpaceDescriptor = "l1.5^4".parse().unwrap();
        assert_eq!(s, SpaceDescriptor::lp(4, p(1.5)));
        let t: SpaceDescriptor = "Sinf^2".parse().unwrap();
        assert_eq!(t.to_string(), "Sinf^2");
        assert!("x2^3".parse::<SpaceDescriptor>().is_err());
    }
}
