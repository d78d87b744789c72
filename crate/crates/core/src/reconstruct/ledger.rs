//! Entries of `B` recovered from traces of words in a diagonal loxodromic `A` and `B`.
//!
//! Three 3×3 systems, each with a determinant that vanishes only when
//! `lambda = 1`:
//!
//! * diagonal entries from `tr B`, `tr AB`, `tr A^{-1}B`;
//! * the products `b12 b21`, `b13 b31`, `b23 b32` from the diagonal of `BAB`;
//! * the mixed products `b12 conj(b32)`, `b13 conj(b31)`, `b23 conj(b21)` from
//!   the diagonals of `B A B^{-1}` and `B^{-1} A B`.
//!
//! The systems are solved by pivoted elimination with a condition estimate;
//! the closed-form determinants are exposed for cross-checking.

use crate::classify::LoxodromicData;
use crate::error::{Error, Result};
use crate::hermitian::{Complex, Mat3, Su21Element, Tolerances};
use crate::linalg::solve3;
use crate::words::Word;

/// `diag(lambda1, lambda2, lambda3)` with `lambda1 = lambda e^{i phi}`,
/// `lambda2 = e^{-2 i phi}`, `lambda3 = lambda^{-1} e^{i phi}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalLoxodromic {
    pub lambda: f64,
    pub phi: f64,
}

impl DiagonalLoxodromic {
    pub fn new(lambda: f64, phi: f64) -> Self {
        DiagonalLoxodromic { lambda, phi }
    }

    pub fn eigenvalues(&self) -> [Complex; 3] {
        LoxodromicData { lambda: self.lambda, phi: self.phi, frame: Mat3::identity() }.eigenvalues()
    }

    pub fn matrix(&self) -> Mat3 {
        let [a, b, c] = self.eigenvalues();
        Mat3::diag(a, b, c)
    }

    pub fn element(&self) -> Su21Element {
        Su21Element::trusted(self.matrix())
    }
}

impl From<&LoxodromicData> for DiagonalLoxodromic {
    fn from(d: &LoxodromicData) -> Self {
        DiagonalLoxodromic { lambda: d.lambda, phi: d.phi }
    }
}

/// Coefficient matrix of the diagonal system (rows: `tr B`, `tr AB`, `tr A^{-1}B`).
pub fn diagonal_system(a: &DiagonalLoxodromic) -> Mat3 {
    let [l1, l2, l3] = a.eigenvalues();
    let one = Complex::from(1.0);
    Mat3([[one, one, one], [l1, l2, l3], [l3.conj(), l2.conj(), l1.conj()]])
}

/// `(lambda^-2 - lambda^2) + 2 (lambda - lambda^-1) cos 3phi`.
pub fn diagonal_det_closed_form(a: &DiagonalLoxodromic) -> Complex {
    let l = a.lambda;
    Complex::from((l.powi(-2) - l * l) + 2.0 * (l - l.recip()) * (3.0 * a.phi).cos())
}

/// Coefficient matrix of the products system in `(b12 b21, b13 b31, b23 b32)`.
pub fn products_system(a: &DiagonalLoxodromic) -> Mat3 {
    let [l1, l2, l3] = a.eigenvalues();
    let z = Complex::from(0.0);
    Mat3([[l2, l3, z], [l1, z, l3], [z, l1, l2]])
}

/// `-2 lambda1 lambda2 lambda3 = -2`.
pub fn products_det_closed_form(_a: &DiagonalLoxodromic) -> Complex {
    Complex::from(-2.0)
}

/// Coefficient matrix of the mixed system in
/// `(b12 conj b32, b13 conj b31, b23 conj b21)`.
pub fn mixed_system(a: &DiagonalLoxodromic) -> Mat3 {
    let [l1, l2, l3] = a.eigenvalues();
    let z = Complex::from(0.0);
    Mat3([[l2, l3, z], [l2.conj(), l1.conj(), z], [z, l3.conj(), l2.conj()]])
}

/// `e^{2 i phi} (lambda e^{-3 i phi} - lambda^{-1} e^{3 i phi})`.
pub fn mixed_det_closed_form(a: &DiagonalLoxodromic) -> Complex {
    let e = |t: f64| Complex::from_polar(1.0, t);
    e(2.0 * a.phi) * (e(-3.0 * a.phi) * a.lambda - e(3.0 * a.phi) / a.lambda)
}

fn checked_solve(l: &Mat3, rhs: [Complex; 3], tol: &Tolerances, what: &str) -> Result<[Complex; 3]> {
    let det = l.det();
    if det.norm() < tol.eps_solve * l.max_norm() {
        return Err(Error::ill(format!("{what}: |det L| = {:.3e}", det.norm())));
    }
    solve3(l, rhs, tol.eps_solve).map(|(x, _)| x)
}

/// `(b11, b22, b33)` from `t1 = tr B`, `t2 = tr AB`, `t3 = tr A^{-1}B`.
pub fn recover_diagonal(
    a: &DiagonalLoxodromic,
    t1: Complex,
    t2: Complex,
    t3: Complex,
    tol: &Tolerances,
) -> Result<[Complex; 3]> {
    checked_solve(&diagonal_system(a), [t1, t2, t3], tol, "diagonal system")
}

/// Everything the three systems recover about `B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntryLedger {
    /// `b11, b22, b33`.
    pub diagonal: [Complex; 3],
    pub p12_21: Complex,
    pub p13_31: Complex,
    pub p23_32: Complex,
    /// `b12 conj(b32)`.
    pub m12_32: Complex,
    /// `b13 conj(b31)`.
    pub m13_31: Complex,
    /// `b23 conj(b21)`.
    pub m23_21: Complex,
}

impl EntryLedger {
    /// Direct evaluation from known entries (oracle side).
    pub fn from_entries(b: &Mat3) -> Self {
        EntryLedger {
            diagonal: [b[(0, 0)], b[(1, 1)], b[(2, 2)]],
            p12_21: b[(0, 1)] * b[(1, 0)],
            p13_31: b[(0, 2)] * b[(2, 0)],
            p23_32: b[(1, 2)] * b[(2, 1)],
            m12_32: b[(0, 1)] * b[(2, 1)].conj(),
            m13_31: b[(0, 2)] * b[(2, 0)].conj(),
            m23_21: b[(1, 2)] * b[(1, 0)].conj(),
        }
    }

    /// Ledger of `J B J`, whose entries are `b_{4-i,4-j}`.
    pub fn flipped(&self) -> Self {
        let [d1, d2, d3] = self.diagonal;
        EntryLedger {
            diagonal: [d3, d2, d1],
            p12_21: self.p23_32,
            p13_31: self.p13_31,
            p23_32: self.p12_21,
            m12_32: self.m12_32.conj(),
            m13_31: self.m13_31.conj(),
            m23_21: self.m23_21.conj(),
        }
    }

    pub fn max_deviation(&self, other: &EntryLedger) -> f64 {
        let a = self.values();
        let b = other.values();
        a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn values(&self) -> [Complex; 9] {
        let [d1, d2, d3] = self.diagonal;
        [d1, d2, d3, self.p12_21, self.p13_31, self.p23_32, self.m12_32, self.m13_31, self.m23_21]
    }

    /// Runs all three systems. `trace` returns the trace of a word in the
    /// letters `a` (the loxodromic) and `b`; only traces are consulted.
    pub fn from_traces<F>(a: &DiagonalLoxodromic, trace: F, tol: &Tolerances) -> Result<Self>
    where
        F: Fn(&Word) -> Complex,
    {
        let tr = |s: &str| trace(&s.parse::<Word>().expect("static word"));
        let diag_of = |x: &str| {
            recover_diagonal(a, tr(x), tr(&format!("a{x}")), tr(&format!("A{x}")), tol)
        };
        let diagonal = diag_of("b")?;
        let [l1, l2, l3] = a.eigenvalues();
        let [b11, b22, b33] = diagonal;

        // C = B A B: c_ii = lambda_i b_ii^2 + (products)
        let c = diag_of("bab")?;
        let rhs = [c[0] - l1 * b11 * b11, c[1] - l2 * b22 * b22, c[2] - l3 * b33 * b33];
        let [p12_21, p13_31, p23_32] = checked_solve(&products_system(a), rhs, tol, "products system")?;

        // C' = B A B^{-1}, D = B^{-1} A B
        let cp = diag_of("baB")?;
        let dm = diag_of("Bab")?;
        let rhs = [
            cp[0] - l1 * b11 * b33.conj(),
            cp[2].conj() - l3.conj() * b11 * b33.conj(),
            dm[0].conj() - l1.conj() * b11.conj() * b33,
        ];
        let [m12_32, m13_31, m23_21] = checked_solve(&mixed_system(a), rhs, tol, "mixed system")?;
        Ok(EntryLedger { diagonal, p12_21, p13_31, p23_32, m12_32, m13_31, m23_21 })
    }

    /// Ledger for `B` given explicitly, with `A` diagonal; traces taken from the pair.
    pub fn from_pair(a: &DiagonalLoxodromic, b: &Su21Element, tol: &Tolerances) -> Result<Self> {
        let gens = [a.element(), *b];
        Self::from_traces(a, |w| w.evaluate(&gens).trace(), tol)
    }
}

/// `(p12_21, p13_31, p23_32)` for `B` against the diagonal `A`.
pub fn recover_products(a: &DiagonalLoxodromic, b: &Su21Element, tol: &Tolerances) -> Result<[Complex; 3]> {
    let l = EntryLedger::from_pair(a, b, tol)?;
    Ok([l.p12_21, l.p13_31, l.p23_32])
}

/// `(m12_32, m13_31, m23_21)` for `B` against the diagonal `A`.
pub fn recover_mixed(a: &DiagonalLoxodromic, b: &Su21Element, tol: &Tolerances) -> Result<[Complex; 3]> {
    let l = EntryLedger::from_pair(a, b, tol)?;
    Ok([l.m12_32, l.m13_31, l.m23_21])
}
