//! Conjugacy types of SU(2,1) elements, loxodromic eigen-data and normal forms.
//!
//! Eigenvalues come from the characteristic polynomial
//! `mu^3 - tr*mu^2 + conj(tr)*mu - 1`, recentred at the cube root of unity
//! nearest `tr/3` and solved in closed form with one Newton polish per root.
//! Each root carries a perturbation bound derived from the polynomial's
//! derivatives, and every decision compares its deciding quantity against the
//! tolerance plus that bound. Decisions that cannot be resolved surface as
//! [`Error::BoundaryCase`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hermitian::{
    herm_inner, omega_pow, principal_cbrt, Complex, Mat3, Su21Element, Tolerances, Vec3, ONE,
};
use crate::linalg::{null_vector, singular_values};

/// Conjugacy type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ClassTag {
    Identity,
    Elliptic,
    ParabolicUnipotent,
    EllipticParabolic,
    Loxodromic,
}

impl ClassTag {
    pub fn is_parabolic(self) -> bool {
        matches!(self, ClassTag::ParabolicUnipotent | ClassTag::EllipticParabolic)
    }
}

/// Classification together with how far the deciding quantity sat from its threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementClass {
    pub tag: ClassTag,
    pub margin: f64,
    /// Cube root of unity nearest `tr/3`; the representative used for normal forms.
    pub lift: Complex,
    /// Eigenvalues by decreasing modulus.
    pub eigenvalues: [Complex; 3],
}

/// Roots of the characteristic polynomial with perturbation bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectrum {
    /// Sorted by decreasing modulus.
    pub eigenvalues: [Complex; 3],
    pub uncertainty: [f64; 3],
    pub lift: Complex,
}

/// The cube root of unity `w` maximising `Re(conj(w) * tr)`.
pub fn nearest_lift(tr: Complex) -> Complex {
    (0..3)
        .map(omega_pow)
        .max_by(|a, b| (a.conj() * tr).re.total_cmp(&(b.conj() * tr).re))
        .unwrap_or(ONE)
}

/// Discriminant of the characteristic polynomial as a function of the trace,
/// `|t|^4 - 8 Re(t^3) + 18 |t|^2 - 27`, evaluated in a form stable near `3w`.
pub fn trace_discriminant(tr: Complex) -> f64 {
    let d = nearest_lift(tr).conj() * tr - Complex::from(3.0);
    let (a, b) = (d.re, d.im);
    108.0 * b * b + 4.0 * a.powi(3) + 36.0 * a * b * b + (a * a + b * b).powi(2)
}

/// Sufficient condition for loxodromic: `|tr| > 3`.
pub fn is_loxodromic_fast(tr: Complex) -> bool {
    tr.norm() > 3.0
}

/// Coefficients of `x^3 - d x^2 + (conj d - 2d) x + (conj d - d)`, the
/// characteristic polynomial in `mu = w (1 + x)`.
fn shifted_poly(d: Complex) -> impl Fn(Complex) -> (Complex, Complex, Complex) {
    let (c1, c0) = (d.conj() - d * 2.0, d.conj() - d);
    move |x: Complex| {
        let p = ((x - d) * x + c1) * x + c0;
        let dp = (x * 3.0 - d * 2.0) * x + c1;
        let ddp = x * 6.0 - d * 2.0;
        (p, dp, ddp)
    }
}

fn cardano(d: Complex) -> [Complex; 3] {
    // depressed cubic in t = x - d/3
    let p = d.conj() - d * 2.0 - d * d / 3.0;
    let q = -(d * d * d) * (2.0 / 27.0) + d * (d.conj() - d * 2.0) / 3.0 + d.conj() - d;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let (u1, u2) = (-q / 2.0 + disc, -q / 2.0 - disc);
    let cube = if u1.norm() >= u2.norm() { u1 } else { u2 };
    let c = principal_cbrt(cube);
    let shift = d / 3.0;
    if c.norm() == 0.0 {
        return [shift; 3];
    }
    std::array::from_fn(|k| {
        let ck = c * omega_pow(k);
        ck - p / (ck * 3.0) + shift
    })
}

/// Eigenvalues of `m` with perturbation bounds.
pub fn spectrum(m: &Mat3) -> Spectrum {
    let tr = m.trace();
    let lift = nearest_lift(tr);
    let d = lift.conj() * tr - Complex::from(3.0);
    let poly = shifted_poly(d);
    let scale = m.max_norm().max(1.0);
    let eta = 4.0 * (m.form_residual() + 8.0 * f64::EPSILON * scale * scale);
    let mut roots = cardano(d);
    for x in roots.iter_mut() {
        let (p, dp, _) = poly(*x);
        if dp.norm() > 0.0 {
            let y = *x - p / dp;
            if poly(y).0.norm() <= p.norm() {
                *x = y;
            }
        }
    }
    let mut pairs: Vec<(Complex, f64)> = (0..3)
        .map(|i| {
            let x = roots[i];
            let e = eta * (1.0 + x.norm()).powi(2);
            let gaps = [(x - roots[(i + 1) % 3]).norm(), (x - roots[(i + 2) % 3]).norm()];
            (lift * (ONE + x), root_radius(e, gaps))
        })
        .collect();
    pairs.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()));
    Spectrum {
        eigenvalues: std::array::from_fn(|k| pairs[k].0),
        uncertainty: std::array::from_fn(|k| pairs[k].1),
        lift,
    }
}

/// Radius `r` solving `r (r + d1) (r + d2) = e`: how far a root with
/// neighbours at distances `d1, d2` can move under a perturbation of size `e`.
fn root_radius(e: f64, [d1, d2]: [f64; 2]) -> f64 {
    let f = |r: f64| r * (r + d1) * (r + d2) - e;
    let (mut lo, mut hi) = (0.0, e.cbrt());
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Safety factor applied to per-root perturbation bounds.
pub(crate) const GUARD: f64 = 4.0;

/// Classify `g` into its conjugacy type.
pub fn classify_element(g: &Su21Element, tol: &Tolerances) -> Result<ElementClass> {
    let m = g.matrix();
    let eps = tol.eps_class;
    let spec = spectrum(m);
    let mk = |tag, margin: f64| ElementClass {
        tag,
        margin: margin.max(0.0),
        lift: spec.lift,
        eigenvalues: spec.eigenvalues,
    };
    let scalar_gap = (0..3)
        .map(|k| (*m - Mat3::identity().scale(omega_pow(k))).max_norm())
        .fold(f64::INFINITY, f64::min);
    if scalar_gap < eps {
        return Ok(mk(ClassTag::Identity, eps - scalar_gap));
    }
    let mu = spec.eigenvalues;
    let u = spec.uncertainty.map(|x| GUARD * x);
    let excess = mu[0].norm() - 1.0;
    if excess > eps + u[0] {
        return Ok(mk(ClassTag::Loxodromic, excess - eps - u[0]));
    }
    if (0..3).any(|k| (mu[k].norm() - 1.0).abs() > eps + u[k]) {
        return Err(Error::BoundaryCase { quantity: "eigenvalue modulus" });
    }

    let thr = |i: usize, j: usize| u[i] + u[j] + eps;
    let near = |i: usize, j: usize| (mu[i] - mu[j]).norm() <= thr(i, j);
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let linked: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(i, j)| near(i, j)).collect();
    let (lo, hi) = rank_thresholds(m, eps);

    match linked.len() {
        0 => {
            let margin = pairs
                .iter()
                .map(|&(i, j)| (mu[i] - mu[j]).norm() - thr(i, j))
                .fold(f64::INFINITY, f64::min);
            Ok(mk(ClassTag::Elliptic, margin))
        }
        1 => {
            let (i, j) = linked[0];
            let single = 3 - i - j;
            let r = (m.trace() - mu[single]) / 2.0;
            let s = singular_values(&(*m - Mat3::identity().scale(r)))[1];
            if s <= lo {
                Ok(mk(ClassTag::Elliptic, lo - s))
            } else if s >= hi {
                Ok(mk(ClassTag::EllipticParabolic, s - hi))
            } else {
                Err(Error::BoundaryCase { quantity: "double-eigenvalue rank" })
            }
        }
        _ => {
            let s = singular_values(&(*m - Mat3::identity().scale(spec.lift)))[0];
            if s >= hi {
                Ok(mk(ClassTag::ParabolicUnipotent, s - hi))
            } else {
                Err(Error::BoundaryCase { quantity: "triple-eigenvalue rank" })
            }
        }
    }
}

/// Singular-value thresholds separating "diagonalizable" (`<= lo`) from
/// "Jordan block present" (`>= hi`).
fn rank_thresholds(m: &Mat3, eps: f64) -> (f64, f64) {
    let lo = eps.max(1e6 * f64::EPSILON * m.max_norm().max(1.0));
    (lo, lo.sqrt())
}

/// Canonical loxodromic parameters: eigenvalues `lambda e^{i phi}`,
/// `e^{-2 i phi}`, `lambda^{-1} e^{i phi}` with `lambda > 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoxodromicData {
    pub lambda: f64,
    pub phi: f64,
    /// Columns are eigenvectors for the three eigenvalues, in order, scaled so
    /// that `<c1,c3> = 1` and `<c2,c2> = 1`.
    pub frame: Mat3,
}

impl LoxodromicData {
    pub fn eigenvalues(&self) -> [Complex; 3] {
        let e = Complex::from_polar(1.0, self.phi);
        [e * self.lambda, e.conj() * e.conj(), e / self.lambda]
    }

    pub fn diagonal(&self) -> Mat3 {
        let [a, b, c] = self.eigenvalues();
        Mat3::diag(a, b, c)
    }

    /// `lambda e^{i phi} + e^{-2 i phi} + lambda^{-1} e^{i phi}`.
    pub fn trace(&self) -> Complex {
        self.eigenvalues().iter().sum()
    }

    /// The isotropic eigenvectors (attracting, repelling).
    pub fn fixed_points(&self) -> [Vec3; 2] {
        [self.frame.col(0), self.frame.col(2)]
    }
}

pub(crate) fn wrap_angle(mut a: f64) -> f64 {
    while a <= -PI {
        a += 2.0 * PI;
    }
    while a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Eigenvector for `mu`, canonically phased.
fn eigenvector(m: &Mat3, mu: Complex) -> Vec3 {
    null_vector(&(*m - Mat3::identity().scale(mu)))
}

pub fn loxodromic_data(g: &Su21Element, tol: &Tolerances) -> Result<LoxodromicData> {
    let class = classify_element(g, tol)?;
    if class.tag != ClassTag::Loxodromic {
        return Err(Error::NotLoxodromic);
    }
    let spec = spectrum(g.matrix());
    let mu = spec.eigenvalues;
    let lambda = mu[0].norm();
    let phi = wrap_angle(mu[0].arg());
    let data = LoxodromicData { lambda, phi, frame: Mat3::identity() };
    let canon = data.eigenvalues();
    let mismatch = (mu[1] - canon[1]).norm().max((mu[2] - canon[2]).norm());
    if mismatch > tol.eps_class + GUARD * (spec.uncertainty[1] + spec.uncertainty[2]) {
        return Err(Error::InconsistentSpectrum { mismatch });
    }
    let m = g.matrix();
    let (c1, c2, c3) = (eigenvector(m, canon[0]), eigenvector(m, canon[1]), eigenvector(m, canon[2]));
    let n2 = herm_inner(&c2, &c2).re;
    if n2 <= 0.0 {
        return Err(Error::InconsistentSpectrum { mismatch: n2.abs() });
    }
    let kappa = herm_inner(&c1, &c3);
    if kappa.norm() < tol.eps_solve {
        return Err(Error::FrameDegenerate { detail: format!("<c1,c3> = {:.3e}", kappa.norm()) });
    }
    let iso = herm_inner(&c1, &c1).norm().max(herm_inner(&c3, &c3).norm());
    if iso > tol.eps_class.sqrt() * kappa.norm() {
        return Err(Error::InconsistentSpectrum { mismatch: iso });
    }
    let root = kappa.norm().sqrt();
    let c1 = c1.scale(Complex::from_polar(1.0 / root, -kappa.arg()));
    let c3 = c3.scale(Complex::from(1.0 / root));
    let c2 = c2.scale(Complex::from(1.0 / n2.sqrt()));
    Ok(LoxodromicData { lambda, phi, frame: Mat3::from_cols([c1, c2, c3]) })
}

/// `S` with `S g S^{-1} = diag(lambda1, lambda2, lambda3)`.
pub fn diagonalizing_conjugator(
    g: &Su21Element,
    d: &LoxodromicData,
    tol: &Tolerances,
) -> Result<Su21Element> {
    let frame = d.frame;
    let sv = singular_values(&frame);
    if !(sv[2] > tol.eps_solve * sv[0]) {
        return Err(Error::FrameDegenerate { detail: format!("frame conditioning {:.3e}", sv[2] / sv[0]) });
    }
    let det = frame.det();
    let frame = frame.scale(principal_cbrt(det).inv());
    let s = Su21Element::trusted(frame.anti_transpose());
    let residual = (*s.matrix() * *g.matrix() * frame - d.diagonal()).max_norm();
    let allowed = tol.eps_class.sqrt() * g.matrix().max_norm().max(1.0);
    if !(residual <= allowed) {
        return Err(Error::FrameDegenerate { detail: format!("diagonalization residual {residual:.3e}") });
    }
    Ok(s)
}

/// The two parabolic normal forms.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ParabolicKind {
    /// `[[e^{i phi}, 0, r i e^{i phi}], [0, e^{-2 i phi}, 0], [0, 0, e^{i phi}]]`.
    EllipticRotational { phi: f64, r: f64 },
    /// `[[1, 1, -1/2 + s i], [0, 1, -1], [0, 0, 1]]`.
    UnipotentTau { s: f64 },
}

impl ParabolicKind {
    pub fn matrix(&self) -> Mat3 {
        match *self {
            ParabolicKind::EllipticRotational { phi, r } => {
                let e = Complex::from_polar(1.0, phi);
                let mut m = Mat3::diag(e, e.conj() * e.conj(), e);
                m[(0, 2)] = Complex::new(0.0, r) * e;
                m
            }
            ParabolicKind::UnipotentTau { s } => unipotent_tau(s),
        }
    }

    /// `n`-th power of the normal form in closed form.
    pub fn power(&self, n: i64) -> Mat3 {
        match *self {
            ParabolicKind::EllipticRotational { phi, r } => {
                ParabolicKind::EllipticRotational { phi: n as f64 * phi, r: n as f64 * r }.matrix()
            }
            ParabolicKind::UnipotentTau { s } => unipotent_tau_power(s, n),
        }
    }
}

/// Corner correction of unipotent powers: zero at one, decreasing by `n` per step.
pub fn unipotent_corner(n: i64) -> f64 {
    ((1 - n) * n) as f64 / 2.0
}

/// `[[1, n, n tau + f(n)], [0, 1, -n], [0, 0, 1]]` with `tau = -1/2 + s i`
/// and `f` from [`unipotent_corner`].
pub fn unipotent_tau_power(s: f64, n: i64) -> Mat3 {
    let k = n as f64;
    let mut m = Mat3::identity();
    m[(0, 1)] = Complex::from(k);
    m[(0, 2)] = Complex::new(-0.5, s) * k + unipotent_corner(n);
    m[(1, 2)] = Complex::from(-k);
    m
}

/// `[[1, 1, -1/2 + s i], [0, 1, -1], [0, 0, 1]]`.
pub fn unipotent_tau(s: f64) -> Mat3 {
    let mut m = Mat3::identity();
    m[(0, 1)] = ONE;
    m[(0, 2)] = Complex::new(-0.5, s);
    m[(1, 2)] = -ONE;
    m
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParabolicForm {
    pub kind: ParabolicKind,
    /// `S` with `S (conj(lift) g) S^{-1}` equal to the normal form.
    pub conjugator: Su21Element,
    /// Lift factor divided out before matching the unipotent form (1 for ellipto-parabolics).
    pub lift: Complex,
    /// Max-entry distance between the conjugated element and the normal form.
    pub residual: f64,
}

pub fn parabolic_normal_form(g: &Su21Element, tol: &Tolerances) -> Result<ParabolicForm> {
    let class = classify_element(g, tol)?;
    let m = *g.matrix();
    let (lift, repeated) = match class.tag {
        ClassTag::ParabolicUnipotent => (class.lift, class.lift),
        ClassTag::EllipticParabolic => (ONE, repeated_eigenvalue(&m, &class.eigenvalues)),
        _ => return Err(Error::NotParabolic),
    };
    let n = m - Mat3::identity().scale(repeated);
    let p = parabolic_fixed_point(&n);
    let frame = match class.tag {
        ClassTag::EllipticParabolic => {
            let u = m.trace() - repeated * 2.0;
            adapted_frame(&p, &eigenvector(&m, u))?
        }
        _ => isotropic_frame(&p)?,
    };
    let b = frame.anti_transpose() * m.scale(lift.conj()) * frame;
    let scale = b.max_norm().max(1.0);

    let (kind, conj) = if b[(0, 1)].norm() <= tol.eps_class.sqrt() * scale {
        let e = b[(0, 0)];
        let phi = wrap_angle(e.arg());
        let r = (b[(0, 2)] / e).im;
        (ParabolicKind::EllipticRotational { phi, r }, frame.anti_transpose())
    } else {
        let x = x_normalizer(b[(0, 1)]);
        let b = x * b * x.anti_transpose();
        (ParabolicKind::UnipotentTau { s: b[(0, 2)].im }, x * frame.anti_transpose())
    };
    let conjugator = Su21Element::trusted(conj);
    let transformed = conj * m.scale(lift.conj()) * conj.anti_transpose();
    let residual = (transformed - kind.matrix()).max_norm();
    Ok(ParabolicForm { kind, conjugator, lift, residual })
}

/// The double eigenvalue `(tr - u)/2`, with `u` the eigenvalue outside the cluster.
fn repeated_eigenvalue(m: &Mat3, mu: &[Complex; 3]) -> Complex {
    let pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
    let (_, _, single) = pairs
        .iter()
        .copied()
        .min_by(|a, b| (mu[a.0] - mu[a.1]).norm().total_cmp(&(mu[b.0] - mu[b.1]).norm()))
        .unwrap_or((0, 1, 2));
    (m.trace() - mu[single]) / 2.0
}

/// The isotropic fixed vector of a parabolic, from `n = g - r I`.
///
/// Candidates are the kernel direction of `n` and the dominant columns of `n`
/// and `n^2` (the fixed line is the image of `n` for vertical translations and
/// of `n^2` for the generic unipotent). The one that is most nearly both fixed
/// and isotropic wins.
fn parabolic_fixed_point(n: &Mat3) -> Vec3 {
    let dominant = |a: &Mat3| {
        let k = (0..3).max_by(|&x, &y| a.col(x).norm().total_cmp(&a.col(y).norm())).unwrap_or(0);
        a.col(k).canonical()
    };
    let scale = n.max_norm().max(f64::MIN_POSITIVE);
    let score = |p: &Vec3| n.apply(p).norm() / scale + herm_inner(p, p).norm();
    [null_vector(n), dominant(n), dominant(&(*n * *n))]
        .into_iter()
        .min_by(|a, b| score(a).total_cmp(&score(b)))
        .unwrap_or_else(|| Vec3::basis(0))
}

/// Frame `[p, w, Jp/|p|^2]` in SU(2,1) with first column `p` (isotropic).
pub(crate) fn isotropic_frame(p: &Vec3) -> Result<Mat3> {
    let np = p.norm().powi(2);
    if np == 0.0 {
        return Err(Error::FrameDegenerate { detail: "zero fixed vector".into() });
    }
    let q = p.flip().scale(Complex::from(1.0 / np));
    let w = p.conj().flip().cross(&q.conj().flip());
    let nw = herm_inner(&w, &w).re;
    if !(nw > 0.0) {
        return Err(Error::FrameDegenerate { detail: "no positive complement".into() });
    }
    let w = w.scale(Complex::from(1.0 / nw.sqrt()));
    let det = Mat3::from_cols([*p, w, q]).det();
    if det.norm() == 0.0 {
        return Err(Error::FrameDegenerate { detail: "singular frame".into() });
    }
    Ok(Mat3::from_cols([*p, w.scale(det.conj() / det.norm_sqr()), q]))
}

/// Frame `[p, w, q]` in SU(2,1) whose middle column spans the positive line of `w`.
pub(crate) fn adapted_frame(p: &Vec3, w: &Vec3) -> Result<Mat3> {
    let nw = herm_inner(w, w).re;
    if !(nw > 0.0) {
        return Err(Error::FrameDegenerate { detail: "eigenvector is not positive".into() });
    }
    let q0 = p.flip().scale(Complex::from(1.0 / p.norm().powi(2)));
    let q1 = q0 - w.scale(herm_inner(&q0, w) / nw);
    let pq = herm_inner(&q1, p);
    if pq.norm() == 0.0 {
        return Err(Error::FrameDegenerate { detail: "fixed point lies in the complement".into() });
    }
    let q1 = q1.scale(pq.conj().inv());
    let q = q1 - p.scale(Complex::from(herm_inner(&q1, &q1).re / 2.0));
    let w = w.scale(Complex::from(1.0 / nw.sqrt()));
    let det = Mat3::from_cols([*p, w, q]).det();
    Ok(Mat3::from_cols([*p, w.scale(det.conj() / det.norm_sqr()), q]))
}

/// `diag(rho e^{ia}, e^{-2ia}, rho^{-1} e^{ia})` with `rho e^{3ia} z = 1`, `a` in `(-pi/3, pi/3]`.
pub fn x_normalizer(z: Complex) -> Mat3 {
    let rho = 1.0 / z.norm();
    let mut alpha = -z.arg() / 3.0;
    if alpha <= -PI / 3.0 {
        alpha += 2.0 * PI / 3.0;
    }
    let e = Complex::from_polar(1.0, alpha);
    Mat3::diag(e * rho, e.conj() * e.conj(), e / rho)
}
