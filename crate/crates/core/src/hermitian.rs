//! Linear algebra over the signature (2,1) Hermitian form in the null basis.
//!
//! The form is `<z, w> = z1*conj(w3) + z2*conj(w2) + z3*conj(w1)`, i.e. its
//! Gram matrix is the exchange matrix `J`. A matrix lies in SU(2,1) when its
//! rows satisfy the six pairing conditions below and its determinant is 1.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Scalar type used throughout.
pub type Complex = Complex64;

pub(crate) const ZERO: Complex = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex = Complex::new(1.0, 0.0);
pub(crate) const I: Complex = Complex::new(0.0, 1.0);

/// The primitive cube root of unity `exp(2 pi i / 3)`.
pub fn omega() -> Complex {
    Complex::new(-0.5, 3f64.sqrt() / 2.0)
}

/// `omega()^k` for `k` taken mod 3.
pub fn omega_pow(k: usize) -> Complex {
    match k % 3 {
        0 => ONE,
        1 => omega(),
        _ => omega().conj(),
    }
}

/// Column vector in the null basis.
#[derive(Clone, Copy, Debug, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Vec3(pub [Complex; 3]);

impl Vec3 {
    pub fn new(z1: Complex, z2: Complex, z3: Complex) -> Self {
        Vec3([z1, z2, z3])
    }

    /// Standard basis vector `e_{k+1}`.
    pub fn basis(k: usize) -> Self {
        let mut v = Vec3::default();
        v.0[k] = ONE;
        v
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: Complex) -> Self {
        Vec3(self.0.map(|z| z * c))
    }

    pub fn conj(&self) -> Self {
        Vec3(self.0.map(|z| z.conj()))
    }

    /// Exchange `z1 <-> z3`, i.e. multiplication by the form's Gram matrix.
    pub fn flip(&self) -> Self {
        Vec3([self.0[2], self.0[1], self.0[0]])
    }

    /// Bilinear (unconjugated) dot product.
    pub fn dot(&self, w: &Vec3) -> Complex {
        self.0[0] * w.0[0] + self.0[1] * w.0[1] + self.0[2] * w.0[2]
    }

    /// Bilinear cross product: the result has zero bilinear dot with both inputs.
    pub fn cross(&self, w: &Vec3) -> Vec3 {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = w.0;
        Vec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    /// Unit Euclidean norm with the largest-modulus coordinate made real positive.
    pub fn canonical(&self) -> Vec3 {
        let n = self.norm();
        if n == 0.0 {
            return *self;
        }
        let k = argmax(&self.0.map(|z| z.norm()));
        let phase = self.0[k].conj() / self.0[k].norm();
        self.scale(phase / n)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate() {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

/// The Hermitian form `z1*conj(w3) + z2*conj(w2) + z3*conj(w1)`.
pub fn herm_inner(v: &Vec3, w: &Vec3) -> Complex {
    v.0[0] * w.0[2].conj() + v.0[1] * w.0[1].conj() + v.0[2] * w.0[0].conj()
}

/// Fubini–Study chordal distance between the complex lines of `v` and `w`.
pub fn chordal_distance(v: &Vec3, w: &Vec3) -> f64 {
    let (nv, nw) = (v.norm(), w.norm());
    if nv == 0.0 || nw == 0.0 {
        return 1.0;
    }
    let c = v.0.iter().zip(&w.0).map(|(a, b)| a * b.conj()).sum::<Complex>().norm() / (nv * nw);
    (1.0 - c.min(1.0).powi(2)).max(0.0).sqrt()
}

/// 3×3 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Mat3(pub [[Complex; 3]; 3]);

impl Index<(usize, usize)> for Mat3 {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.0[i][j]
    }
}

impl Mat3 {
    pub fn zero() -> Self {
        Mat3([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag(ONE, ONE, ONE)
    }

    pub fn diag(a: Complex, b: Complex, c: Complex) -> Self {
        let mut m = Self::zero();
        m.0[0][0] = a;
        m.0[1][1] = b;
        m.0[2][2] = c;
        m
    }

    /// The exchange matrix; Gram matrix of the form and an element of U(2,1).
    pub fn exchange() -> Self {
        let mut m = Self::zero();
        m.0[0][2] = ONE;
        m.0[1][1] = ONE;
        m.0[2][0] = ONE;
        m
    }

    pub fn from_real(rows: [[f64; 3]; 3]) -> Self {
        Mat3(rows.map(|r| r.map(|x| Complex::new(x, 0.0))))
    }

    pub fn from_rows(r: [Vec3; 3]) -> Self {
        Mat3([r[0].0, r[1].0, r[2].0])
    }

    pub fn from_cols(c: [Vec3; 3]) -> Self {
        Self::from_rows(c).transpose()
    }

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3(self.0[i])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn transpose(&self) -> Self {
        let a = &self.0;
        Mat3(std::array::from_fn(|i| std::array::from_fn(|j| a[j][i])))
    }

    pub fn conj(&self) -> Self {
        Mat3(self.0.map(|r| r.map(|z| z.conj())))
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn scale(&self, c: Complex) -> Self {
        Mat3(self.0.map(|r| r.map(|z| z * c)))
    }

    pub fn trace(&self) -> Complex {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> Complex {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    /// General inverse by the adjugate; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let a = &self.0;
        let cof = |i: usize, j: usize| {
            let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
            let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
            a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]
        };
        Some(Mat3(std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i) / d))))
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest imaginary part in modulus.
    pub fn max_imag(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn pow(&self, n: u64) -> Self {
        let (mut acc, mut base, mut k) = (Self::identity(), *self, n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Flattened row-major entries.
    pub fn entries(&self) -> [Complex; 9] {
        std::array::from_fn(|k| self.0[k / 3][k % 3])
    }

    pub fn from_entries(e: [Complex; 9]) -> Self {
        Mat3(std::array::from_fn(|i| std::array::from_fn(|j| e[3 * i + j])))
    }

    /// The Hermitian anti-transpose: entry (i,j) is `conj(a[2-j][2-i])`.
    /// Equals the inverse for elements of U(2,1).
    pub fn anti_transpose(&self) -> Self {
        let a = &self.0;
        Mat3(std::array::from_fn(|i| std::array::from_fn(|j| a[2 - j][2 - i].conj())))
    }

    /// Residuals of the six row conditions followed by `|det - 1|`.
    pub fn form_residuals(&self) -> [f64; 7] {
        let (v1, v2, v3) = (self.row(0), self.row(1), self.row(2));
        [
            herm_inner(&v1, &v1).norm(),
            (herm_inner(&v2, &v2) - ONE).norm(),
            herm_inner(&v3, &v3).norm(),
            herm_inner(&v1, &v2).norm(),
            herm_inner(&v2, &v3).norm(),
            (herm_inner(&v1, &v3) - ONE).norm(),
            (self.det() - ONE).norm(),
        ]
    }

    pub fn form_residual(&self) -> f64 {
        self.form_residuals().into_iter().fold(0.0, f64::max)
    }

    /// `self * v`.
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        Vec3(std::array::from_fn(|i| self.row(i).dot(v)))
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, b: Mat3) -> Mat3 {
        let a = &self.0;
        Mat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b.0[0][j] + a[i][1] * b.0[1][j] + a[i][2] * b.0[2][j])
        }))
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        self.apply(&v)
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, b: Mat3) -> Mat3 {
        Mat3(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] + b.0[i][j])))
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, b: Mat3) -> Mat3 {
        Mat3(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] - b.0[i][j])))
    }
}

impl Neg for Mat3 {
    type Output = Mat3;
    fn neg(self) -> Mat3 {
        self.scale(-ONE)
    }
}

impl fmt::Display for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            let cells: Vec<String> = row.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Numerical tolerances threaded through every fallible operation.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Form and membership residuals.
    pub eps_form: f64,
    /// Classification margins.
    pub eps_class: f64,
    /// Reality and field-membership tests.
    pub eps_field: f64,
    /// Conditioning floor for linear solves.
    pub eps_solve: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eps_form: 1e-10, eps_class: 1e-8, eps_field: 1e-8, eps_solve: 1e-12 }
    }
}

impl Tolerances {
    /// Checks positivity and the ordering `eps_solve <= eps_form <= eps_class`.
    pub fn validated(self) -> Result<Self> {
        let all = [self.eps_form, self.eps_class, self.eps_field, self.eps_solve];
        if all.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidTolerances("all tolerances must be positive and finite".into()));
        }
        if self.eps_solve > self.eps_form || self.eps_form > self.eps_class {
            return Err(Error::InvalidTolerances("require eps_solve <= eps_form <= eps_class".into()));
        }
        Ok(self)
    }
}

/// A matrix certified to lie in SU(2,1) at the time of construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su21Element {
    m: Mat3,
    residual: f64,
}

impl Su21Element {
    /// Wraps a matrix known to lie in the group by construction (products,
    /// inverses, normal forms). The residual is still recorded.
    pub(crate) fn trusted(m: Mat3) -> Self {
        Su21Element { m, residual: m.form_residual() }
    }

    pub fn identity() -> Self {
        Su21Element { m: Mat3::identity(), residual: 0.0 }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    /// Form residual measured at validation (max over six conditions and `|det-1|`).
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn trace(&self) -> Complex {
        self.m.trace()
    }

    pub fn inverse(&self) -> Self {
        anti_transpose_inverse(self)
    }

    pub fn mul(&self, other: &Su21Element) -> Self {
        mul(self, other)
    }

    pub fn pow(&self, n: u64) -> Self {
        Su21Element::trusted(self.m.pow(n))
    }

    /// `s * self * s^{-1}`.
    pub fn conjugate_by(&self, s: &Su21Element) -> Self {
        Su21Element::trusted(s.m * self.m * s.inverse().m)
    }

    /// Multiply by a cube root of unity (another lift of the same projective map).
    pub fn lift(&self, k: usize) -> Self {
        Su21Element::trusted(self.m.scale(omega_pow(k)))
    }
}

/// Checks the six row conditions and `det = 1` at `tol.eps_form`.
pub fn validate_su21(m: &Mat3, tol: &Tolerances) -> Result<Su21Element> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = m.form_residual();
    if residual > tol.eps_form {
        return Err(Error::NotInGroup { max_residual: residual });
    }
    Ok(Su21Element { m: *m, residual })
}

/// Inverse of an SU(2,1) element via the Hermitian anti-transpose.
pub fn anti_transpose_inverse(g: &Su21Element) -> Su21Element {
    Su21Element { m: g.m.anti_transpose(), residual: g.residual }
}

pub fn mul(a: &Su21Element, b: &Su21Element) -> Su21Element {
    Su21Element::trusted(a.m * b.m)
}

pub fn trace(m: &Mat3) -> Complex {
    m.trace()
}

const SAMPLE_ATTEMPTS: usize = 64;

/// Reproducible pseudo-random element; entries of the seed rows lie in `[-spread, spread]`.
pub fn random_su21(seed: u64, spread: f64) -> Result<Su21Element> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_su21_with(&mut rng, spread)
}

/// As [`random_su21`], drawing from a caller-supplied generator.
pub fn random_su21_with<R: Rng + ?Sized>(rng: &mut R, spread: f64) -> Result<Su21Element> {
    if !(spread.is_finite() && spread > 0.0) {
        return Err(Error::InvalidParameter(format!("spread must be positive, got {spread}")));
    }
    for _ in 0..SAMPLE_ATTEMPTS {
        let mut draw = || {
            Vec3(std::array::from_fn(|_| {
                Complex::new(rng.random_range(-spread..=spread), rng.random_range(-spread..=spread))
            }))
        };
        let (r1, r2, r3) = (draw(), draw(), draw());
        let modulus = (rng.random::<f64>() * (1.0 + spread).ln()).exp();
        let phase = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        if let Some(m) = gram_schmidt_frame(r1, r2, r3, Complex::from_polar(modulus, phase)) {
            let tol = Tolerances::default();
            if let Ok(g) = validate_su21(&m, &tol) {
                return Ok(g);
            }
        }
    }
    Err(Error::DegenerateSample { attempts: SAMPLE_ATTEMPTS })
}

/// Rows `v1 = c*(e+ + e-)/sqrt2`, `v2`, `v3 = (e+ - e-)/(sqrt2*conj c)` from an
/// orthonormal frame `(v2, e+, e-)` of signature (+,+,-), then `det` fixed.
fn gram_schmidt_frame(r1: Vec3, r2: Vec3, r3: Vec3, c: Complex) -> Option<Mat3> {
    const GUARD: f64 = 1e-3;
    let n2 = herm_inner(&r2, &r2).re;
    if n2 < GUARD * r2.norm().powi(2) {
        return None;
    }
    let v2 = r2.scale(Complex::from(1.0 / n2.sqrt()));
    let project = |x: Vec3| x - v2.scale(herm_inner(&x, &v2));
    let (a, b) = (project(r1), project(r3));
    let (na, nb) = (herm_inner(&a, &a).re, herm_inner(&b, &b).re);
    let (x, y, nx) = if na.abs() >= nb.abs() { (a, b, na) } else { (b, a, nb) };
    if nx.abs() < GUARD * x.norm().powi(2) {
        return None;
    }
    let e1 = x.scale(Complex::from(1.0 / nx.abs().sqrt()));
    let y = y - e1.scale(herm_inner(&y, &e1) / Complex::from(nx.signum()));
    let ny = herm_inner(&y, &y).re;
    if ny * nx >= 0.0 || ny.abs() < GUARD * y.norm().powi(2) {
        return None;
    }
    let e2 = y.scale(Complex::from(1.0 / ny.abs().sqrt()));
    let (ep, em) = if nx > 0.0 { (e1, e2) } else { (e2, e1) };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v1 = (ep + em).scale(c * s);
    let v3 = (ep - em).scale(Complex::from(s) / c.conj());
    let m = Mat3::from_rows([v1, v2, v3]);
    let d = m.det();
    if d.norm() == 0.0 {
        return None;
    }
    Some(m.scale(principal_cbrt(d).inv()))
}

/// Principal cube root.
pub(crate) fn principal_cbrt(z: Complex) -> Complex {
    if z.norm() == 0.0 {
        return ZERO;
    }
    Complex::from_polar(z.norm().cbrt(), z.arg() / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn basis_pairings() {
        let e = |k| Vec3::basis(k);
        assert_eq!(herm_inner(&e(0), &e(2)), ONE);
        assert_eq!(herm_inner(&e(1), &e(1)), ONE);
        assert_eq!(herm_inner(&e(0), &e(0)), ZERO);
    }

    #[test]
    fn validate_examples() {
        let tol = Tolerances::default();
        assert!(validate_su21(&Mat3::identity(), &tol).is_ok());
        let lox = Mat3::from_real([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.5]]);
        assert!(validate_su21(&lox, &tol).is_ok());
        let mut bad = lox;
        bad[(0, 1)] = c(0.1, 0.0);
        // oracle: <v1, v2> = 0.1 * conj(1) = 0.1 directly
        let v12 = herm_inner(&bad.row(0), &bad.row(1));
        assert!((v12 - c(0.1, 0.0)).norm() < 1e-15);
        match validate_su21(&bad, &tol) {
            Err(Error::NotInGroup { max_residual }) => assert!(max_residual >= 0.1 - 1e-15),
            other => panic!("expected NotInGroup, got {other:?}"),
        }
        let mut nan = lox;
        nan[(2, 2)] = c(f64::NAN, 0.0);
        assert_eq!(validate_su21(&nan, &tol), Err(Error::NonFinite));
    }

    #[test]
    fn anti_transpose_of_diagonal() {
        let (l1, l2, l3) = (c(1.0, 2.0), c(0.3, -0.4), c(-0.5, 0.7));
        let d = Mat3::diag(l1, l2, l3);
        assert_eq!(d.anti_transpose(), Mat3::diag(l3.conj(), l2.conj(), l1.conj()));
        assert_eq!(anti_transpose_inverse(&Su21Element::identity()).matrix(), &Mat3::identity());
    }

    #[test]
    fn anti_transpose_matches_general_inverse() {
        for seed in 0..50 {
            let g = random_su21(seed, 2.0).unwrap();
            let h = anti_transpose_inverse(&g);
            assert!((*g.matrix() * *h.matrix() - Mat3::identity()).max_norm() < 1e-12);
            let oracle = g.matrix().inverse().unwrap();
            assert!((oracle - *h.matrix()).max_norm() < 1e-11 * (1.0 + oracle.max_norm()));
        }
    }

    #[test]
    fn trace_examples() {
        let d = Mat3::from_real([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.5]]);
        assert_eq!(trace(&d), c(3.5, 0.0));
        let g = random_su21(1, 1.0).unwrap();
        let h = random_su21(2, 1.0).unwrap();
        assert_eq!(mul(&Su21Element::identity(), &g).matrix(), g.matrix());
        let (gh, hg) = (mul(&g, &h).trace(), mul(&h, &g).trace());
        assert!((gh - hg).norm() < 1e-12 * (1.0 + gh.norm()));
    }

    #[test]
    fn sampler_is_deterministic_and_valid() {
        let tol = Tolerances::default();
        let a = random_su21(42, 3.0).unwrap();
        let b = random_su21(42, 3.0).unwrap();
        assert_eq!(a, b);
        for seed in 0..200 {
            let g = random_su21(seed, 3.0).unwrap();
            assert!(validate_su21(g.matrix(), &tol).is_ok(), "seed {seed}");
        }
        assert!(random_su21(0, -1.0).is_err());
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerances::default().validated().is_ok());
        let bad = Tolerances { eps_form: 1e-6, ..Tolerances::default() };
        assert!(bad.validated().is_err());
        let neg = Tolerances { eps_field: 0.0, ..Tolerances::default() };
        assert!(neg.validated().is_err());
    }

    #[test]
    fn chordal_distance_is_projective() {
        let v = Vec3::new(c(1.0, 1.0), c(0.0, 2.0), c(-1.0, 0.5));
        assert!(chordal_distance(&v, &v.scale(c(0.0, -3.0))) < 1e-7);
        assert!((chordal_distance(&Vec3::basis(0), &Vec3::basis(2)) - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn closure_under_product(s1 in any::<u64>(), s2 in any::<u64>()) {
            let tol = Tolerances { eps_form: 3e-10, ..Tolerances::default() };
            let (g, h) = (random_su21(s1, 1.5).unwrap(), random_su21(s2, 1.5).unwrap());
            prop_assert!(validate_su21(mul(&g, &h).matrix(), &tol).is_ok());
        }

        #[test]
        fn inverse_is_exact(s in any::<u64>()) {
            let g = random_su21(s, 2.0).unwrap();
            let p = *anti_transpose_inverse(&g).matrix() * *g.matrix();
            prop_assert!((p - Mat3::identity()).max_norm() < 1e-9);
        }

        #[test]
        fn form_is_preserved(s in any::<u64>(), xs in prop::array::uniform12(-2.0f64..2.0)) {
            let g = random_su21(s, 1.0).unwrap();
            let v = Vec3::new(c(xs[0], xs[1]), c(xs[2], xs[3]), c(xs[4], xs[5]));
            let w = Vec3::new(c(xs[6], xs[7]), c(xs[8], xs[9]), c(xs[10], xs[11]));
            let lhs = herm_inner(&g.matrix().apply(&v), &g.matrix().apply(&w));
            let rhs = herm_inner(&v, &w);
            let scale = 1.0 + g.matrix().max_norm().powi(2) * v.norm() * w.norm();
            prop_assert!((lhs - rhs).norm() < 1e-9 * scale);
        }

        #[test]
        fn inverse_trace_is_conjugate(s in any::<u64>()) {
            let g = random_su21(s, 2.0).unwrap();
            let t = g.trace();
            prop_assert!((t - anti_transpose_inverse(&g).trace().conj()).norm() < 1e-12 * (1.0 + t.norm()));
        }
    }
}
