//! Constructors for standard subgroups and the example groups used by tests,
//! the acceptance suite and the `corpus` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::hermitian::{random_su21, validate_su21, Complex, Mat3, Su21Element, Tolerances, I, ONE, ZERO};

/// Heisenberg translation `[[1, -conj x, z], [0, 1, x], [0, 0, 1]]`; in the
/// group when `2 Re z + |x|^2 = 0`.
pub fn heisenberg(x: Complex, z: Complex) -> Mat3 {
    Mat3([[ONE, -x.conj(), z], [ZERO, ONE, x], [ZERO, ZERO, ONE]])
}

/// The exchange-conjugate of [`heisenberg`]: lower triangular.
pub fn lower_heisenberg(y: Complex, w: Complex) -> Mat3 {
    Mat3([[ONE, ZERO, ZERO], [y, ONE, ZERO], [w, -y.conj(), ONE]])
}

/// `SL(2,R)` acting on a complex geodesic: `[[a, 0, -ib], [0, 1, 0], [ic, 0, d]]`.
pub fn sl2r_embed(a: f64, b: f64, c: f64, d: f64) -> Result<Su21Element> {
    let m = Mat3([
        [Complex::from(a), ZERO, -I * b],
        [ZERO, ONE, ZERO],
        [I * c, ZERO, Complex::from(d)],
    ]);
    validate_su21(&m, &Tolerances::default()).map_err(|_| Error::InvalidParameter(format!("ad - bc = {} != 1", a * d - b * c)))
}

/// Symmetric square of an `SL(2,R)` matrix, preserving `2 x1 x3 + x2^2`.
pub fn sym2(a: f64, b: f64, c: f64, d: f64) -> Mat3 {
    let s = std::f64::consts::SQRT_2;
    Mat3::from_real([
        [a * a, s * a * b, -b * b],
        [s * a * c, a * d + b * c, -s * b * d],
        [-c * c, -s * c * d, d * d],
    ])
}

/// Parametrized elements of `SO(2,1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum So21Param {
    /// `diag(lambda, 1, 1/lambda)`.
    Hyperbolic { lambda: f64 },
    /// Rotation by `theta` about a point.
    Rotation { theta: f64 },
    /// Unipotent with translation length `t`.
    Parabolic { t: f64 },
    /// Symmetric square of `[[a, b], [c, d]]`.
    FromSl2r { a: f64, b: f64, c: f64, d: f64 },
}

pub fn so21(p: So21Param) -> Result<Su21Element> {
    let m = match p {
        So21Param::Hyperbolic { lambda } => {
            if !(lambda > 0.0) {
                return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
            }
            Mat3::from_real([[lambda, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0 / lambda]])
        }
        So21Param::Rotation { theta } => {
            let (s, c) = (theta / 2.0).sin_cos();
            sym2(c, -s, s, c)
        }
        So21Param::Parabolic { t } => sym2(1.0, t, 0.0, 1.0),
        So21Param::FromSl2r { a, b, c, d } => sym2(a, b, c, d),
    };
    validate_su21(&m, &Tolerances::default()).map_err(|e| Error::InvalidParameter(format!("{p:?}: {e}")))
}

/// `U(1,1)` block on the first and third coordinates, twisted by `theta`:
/// `[[e^{i theta} a, 0, e^{i theta} b], [0, e^{-2 i theta}, 0], [e^{i theta} c, 0, e^{i theta} d]]`.
pub fn su11(block: [[Complex; 2]; 2], theta: f64) -> Result<Su21Element> {
    let e = Complex::from_polar(1.0, theta);
    let [[a, b], [c, d]] = block;
    let m = Mat3([[e * a, ZERO, e * b], [ZERO, e.conj() * e.conj(), ZERO], [e * c, ZERO, e * d]]);
    validate_su21(&m, &Tolerances::default()).map_err(|e| Error::InvalidParameter(format!("block not in SU(1,1): {e}")))
}

/// The modular group on a complex geodesic; reducible, fixing the polar point `e2`.
pub fn sl2z_spec() -> GroupSpec {
    let s = sl2r_embed(0.0, -1.0, 1.0, 0.0).expect("valid");
    let t = sl2r_embed(1.0, 1.0, 0.0, 1.0).expect("valid");
    GroupSpec::new(vec![s, t]).discrete(true)
}

/// Largest entry allowed in a hiding conjugator.
const HIDE_NORM: f64 = 3.0;
const HIDE_ATTEMPTS: u64 = 256;

/// Conjugates by a random element of bounded size, redrawing until every
/// conjugated generator validates at the default tolerances.
fn hide(spec: GroupSpec, seed: u64) -> GroupSpec {
    let tol = Tolerances::default();
    let mut last = None;
    for attempt in 0..HIDE_ATTEMPTS {
        let s = random_su21(seed.wrapping_mul(HIDE_ATTEMPTS).wrapping_add(attempt), 0.5).expect("sampler");
        if s.matrix().max_norm() > HIDE_NORM {
            continue;
        }
        let hidden = spec.conjugated_by(&s);
        if hidden.generators.iter().all(|g| validate_su21(g.matrix(), &tol).is_ok()) {
            return hidden;
        }
        last = Some(hidden);
    }
    last.expect("bounded conjugator found")
}

/// Two integral hyperbolic elements of `SO(2,1)`, conjugated by a random element.
pub fn hidden_so21_spec(seed: u64) -> GroupSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (k, m) = (rng.random_range(1..=2) as f64, rng.random_range(1..=2) as f64);
    let (k2, m2) = (rng.random_range(1..=2) as f64, rng.random_range(1..=2) as f64);
    let g1 = so21(So21Param::FromSl2r { a: 1.0 + k * m, b: k, c: m, d: 1.0 }).expect("unimodular");
    let g2 = so21(So21Param::FromSl2r { a: 1.0, b: k2, c: m2, d: 1.0 + k2 * m2 }).expect("unimodular");
    hide(GroupSpec::new(vec![g1, g2]).discrete(true), seed.wrapping_add(0x5eed))
}

fn gaussian<R: Rng>(rng: &mut R, den: f64) -> Complex {
    Complex::new(rng.random_range(1..=4) as f64 / den, rng.random_range(-3..=3) as f64 / den)
}

/// Generators with entries in `Q(i)` and a loxodromic with rational `lambda`,
/// conjugated by a random element. The realization is exact over `Q(i)`.
pub fn known_field_spec(seed: u64) -> GroupSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf1e1d);
    let lambda = 2.0 + (seed % 3) as f64;
    let e = Complex::new(3.0, 4.0) / 5.0;
    let a = Mat3::diag(e * lambda, e.conj() * e.conj(), e / lambda);
    let x = gaussian(&mut rng, 2.0);
    let z = Complex::new(-x.norm_sqr() / 2.0, rng.random_range(-2..=2) as f64 / 2.0);
    let y = gaussian(&mut rng, 3.0);
    let w = Complex::new(-y.norm_sqr() / 2.0, rng.random_range(-2..=2) as f64 / 3.0);
    let b = heisenberg(x, z) * lower_heisenberg(y, w);
    let tol = Tolerances::default();
    let gens = vec![validate_su21(&a, &tol).expect("diagonal"), validate_su21(&b, &tol).expect("unipotent product")];
    hide(GroupSpec::new(gens), seed.wrapping_add(1000))
}

/// A cyclic group generated by an elliptic of order 5.
pub fn cyclic_elliptic_spec() -> GroupSpec {
    let t = 2.0 * std::f64::consts::PI / 5.0;
    let e = Complex::from_polar(1.0, t);
    let g = Mat3::diag(e, e.conj() * e.conj(), e);
    GroupSpec::new(vec![validate_su21(&g, &Tolerances::default()).expect("diagonal")]).discrete(true)
}

/// Names accepted by [`named`].
pub const NAMES: [&str; 6] = ["sl2z", "so21_hidden", "known_field", "single_lox", "random_pair", "cyclic_elliptic"];

/// Example groups by name; `seed` feeds the randomized ones.
pub fn named(name: &str, seed: u64) -> Result<GroupSpec> {
    Ok(match name {
        "sl2z" => sl2z_spec(),
        "so21_hidden" => hidden_so21_spec(seed),
        "known_field" => known_field_spec(seed),
        "single_lox" => GroupSpec::new(vec![so21(So21Param::Hyperbolic { lambda: 2.0 })?]),
        "random_pair" => GroupSpec::new(vec![random_su21(seed, 1.0)?, random_su21(seed.wrapping_add(1), 1.0)?]),
        "cyclic_elliptic" => cyclic_elliptic_spec(),
        _ => return Err(Error::InvalidParameter(format!("unknown corpus entry {name:?}; known: {}", NAMES.join(", ")))),
    })
}
