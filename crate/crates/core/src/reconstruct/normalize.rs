//! Normal form for a pair `(A, B)` with `A` loxodromic: `A` diagonal and
//! `b12 = 1`, with every entry of `B` rebuilt from the trace ledger.

use crate::classify::{diagonalizing_conjugator, loxodromic_data, x_normalizer};
use crate::error::{Error, Result};
use crate::hermitian::{Complex, Mat3, Su21Element, Tolerances};

use super::ledger::{DiagonalLoxodromic, EntryLedger};

/// Outcome of [`normalize_pair`].
#[derive(Clone, Debug)]
pub struct PairNormalization {
    /// `f` with `f A f^{-1}` diagonal and `(f B f^{-1})_{12} = 1`.
    pub conjugator: Su21Element,
    pub diagonal: DiagonalLoxodromic,
    /// True when the `b32` branch was taken (conjugation by the exchange matrix).
    pub flipped: bool,
    /// Ledger of the normalized `B`.
    pub ledger: EntryLedger,
    /// `(A, B)` rebuilt from `lambda`, `phi` and the ledger alone.
    pub reconstructed: [Mat3; 2],
    /// `(f A f^{-1}, f B f^{-1})` computed from the input matrices.
    pub transformed: [Mat3; 2],
    /// Largest entry mismatch between the two.
    pub residual: f64,
}

/// Conjugates `(A, B)` to the normal form and rebuilds `B` from trace data.
///
/// Errors: `NotLoxodromic` for `A`, `Reducible` when `B` fixes the polar
/// point of `A`'s axis, `IllConditioned` when `lambda` is too close to 1 or
/// no route through the ledger is numerically usable.
pub fn normalize_pair(a: &Su21Element, b: &Su21Element, tol: &Tolerances) -> Result<PairNormalization> {
    let data = loxodromic_data(a, tol)?;
    if data.lambda < 1.0 + 10.0 * tol.eps_class {
        return Err(Error::ill(format!("lambda = {} too close to 1", data.lambda)));
    }
    let s = diagonalizing_conjugator(a, &data, tol)?;
    let diagonal = DiagonalLoxodromic::from(&data);
    let pair = [*a, *b];
    let ledger = EntryLedger::from_traces(&diagonal, |w| w.evaluate(&pair).trace(), tol)?;

    let b1 = b.conjugate_by(&s);
    let (z12, z32) = (b1.matrix()[(0, 1)], b1.matrix()[(2, 1)]);
    let scale = b1.matrix().max_norm().max(1.0);
    if z12.norm() < tol.eps_class.sqrt() * scale && z32.norm() < tol.eps_class.sqrt() * scale {
        return Err(Error::Reducible);
    }
    // |b12 b32| is invariant under the normalizer, so both branches end at the
    // same size; the b32 branch is only for a numerically vanishing b12. The
    // ratio |b12|/|b32| depends on eigenvector scaling and would not be idempotent.
    let flipped = z12.norm() < tol.eps_class * scale;
    let (pre, ledger, a_rec, pivot) = if flipped {
        let minus_j = Su21Element::trusted(Mat3::exchange().scale(Complex::from(-1.0)));
        let [l1, l2, l3] = diagonal.eigenvalues();
        (minus_j.mul(&s), ledger.flipped(), Mat3::diag(l3, l2, l1), z32)
    } else {
        (s, ledger, diagonal.matrix(), z12)
    };
    let f = Su21Element::trusted(x_normalizer(pivot)).mul(&pre);
    let b_rec = rebuild(&ledger, tol)?;
    let transformed = [*a.conjugate_by(&f).matrix(), *b.conjugate_by(&f).matrix()];
    let reconstructed = [a_rec, b_rec];
    let residual = (0..2).map(|k| (transformed[k] - reconstructed[k]).max_norm()).fold(0.0, f64::max);
    Ok(PairNormalization { conjugator: f, diagonal, flipped, ledger, reconstructed, transformed, residual })
}

/// Rebuilds `B` with `b12 = 1` from its ledger.
///
/// Several algebraic routes reach the off-diagonal entries; each route whose
/// divisions are numerically safe is tried and the candidate that best
/// satisfies the form equations wins.
pub fn rebuild(l: &EntryLedger, tol: &Tolerances) -> Result<Mat3> {
    let [b11, b22, b33] = l.diagonal;
    let b12 = Complex::from(1.0);
    let b21 = l.p12_21;
    let b32 = l.m12_32.conj();
    let scale = l.diagonal.iter().map(|z| z.norm()).fold(1.0, f64::max).max(b21.norm()).max(b32.norm());
    let tiny = tol.eps_solve * scale;
    let usable = |z: Complex| z.norm() > tiny;

    let mut b23s = Vec::new();
    if usable(b32) {
        b23s.push(l.p23_32 / b32);
    }
    if usable(b21) {
        b23s.push(l.m23_21 / b21.conj());
    }

    let mut candidates = Vec::new();
    for &b23 in &b23s {
        // first row orthogonal to the second
        if usable(b21) {
            let b13 = -(b11 * b23.conj() + b22.conj()) / b21.conj();
            if usable(b13) {
                candidates.push((b13, b23, l.p13_31 / b13));
                candidates.push((b13, b23, (l.m13_31 / b13).conj()));
            }
            if usable(b23) {
                candidates.push((b13, b23, third_from_second(b21, b22, b23, b32, b33)));
            }
        }
        // second row orthogonal to the third
        if usable(b23) {
            let b31 = third_from_second(b21, b22, b23, b32, b33);
            if usable(b31) {
                candidates.push((l.p13_31 / b31, b23, b31));
                candidates.push(((l.m13_31 / b31.conj()), b23, b31));
            }
        }
    }
    candidates
        .into_iter()
        .map(|(b13, b23, b31)| Mat3([[b11, b12, b13], [b21, b22, b23], [b31, b32, b33]]))
        .filter(Mat3::is_finite)
        .min_by(|x, y| x.form_residual().total_cmp(&y.form_residual()))
        .ok_or_else(|| Error::ill("no usable route through the ledger"))
}

/// `b31` from `b21 conj(b33) + b22 conj(b32) + b23 conj(b31) = 0`.
fn third_from_second(b21: Complex, b22: Complex, b23: Complex, b32: Complex, b33: Complex) -> Complex {
    (-(b21 * b33.conj() + b22 * b32.conj()) / b23).conj()
}
