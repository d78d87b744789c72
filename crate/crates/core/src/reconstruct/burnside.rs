//! A basis of `M_3(C)` made of group words, and coordinates in it obtained
//! from traces alone through the nondegenerate form `(X, Y) -> tr(XY)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hermitian::{Complex, Mat3, Su21Element, Tolerances};
use crate::linalg::solve;
use crate::words::{Word, WordSampler, Words};

/// Selection stops once no candidate keeps this fraction of its norm after
/// projection onto the span of the chosen words.
const INDEPENDENCE_FLOOR: f64 = 1e-8;

/// Nine words whose matrices span `M_3(C)`, with their trace-form Gram matrix.
#[derive(Clone, Debug)]
pub struct BurnsideBasis {
    pub words: Vec<Word>,
    pub matrices: Vec<Mat3>,
    /// `G_ij = tr(S_i S_j)`.
    pub gram: DMatrix<Complex>,
    /// `1 / |S_i|`, used to balance the Gram system.
    pub scales: Vec<f64>,
}

/// `tr(S_i S_j)` over a list of matrices.
pub fn trace_gram(mats: &[Mat3]) -> DMatrix<Complex> {
    DMatrix::from_fn(mats.len(), mats.len(), |i, j| (mats[i] * mats[j]).trace())
}

fn hdot(a: &[Complex; 9], b: &[Complex; 9]) -> Complex {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn norm9(a: &[Complex; 9]) -> f64 {
    hdot(a, a).re.sqrt()
}

/// Picks nine words (over `gens`, up to `sampler.max_length`) by pivoted
/// Gram–Schmidt on the flattened matrices: each round takes the candidate
/// with the largest relative component outside the current span, earliest
/// in enumeration order on ties.
pub fn burnside_basis(gens: &[Su21Element], sampler: &WordSampler, tol: &Tolerances) -> Result<BurnsideBasis> {
    let candidates: Vec<(Word, Mat3)> = Words::new(gens, sampler.max_length, sampler.include_inverses)
        .map(|(w, g)| (w, *g.matrix()))
        .collect();
    let mut resid: Vec<[Complex; 9]> = candidates.iter().map(|(_, m)| m.entries()).collect();
    let norms: Vec<f64> = resid.iter().map(norm9).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(9);
    while chosen.len() < 9 {
        let mut best = None;
        let mut best_ratio = INDEPENDENCE_FLOOR;
        for (k, r) in resid.iter().enumerate() {
            let ratio = norm9(r) / norms[k];
            if ratio > best_ratio && !chosen.contains(&k) {
                best = Some(k);
                best_ratio = ratio;
            }
        }
        let Some(k) = best else {
            return Err(Error::BasisNotFound { rank: chosen.len() });
        };
        chosen.push(k);
        let q = resid[k];
        let nq = norm9(&q);
        let q: [Complex; 9] = q.map(|z| z / nq);
        for r in resid.iter_mut() {
            let c = hdot(r, &q);
            for (x, y) in r.iter_mut().zip(&q) {
                *x -= c * y;
            }
        }
    }
    let words: Vec<Word> = chosen.iter().map(|&k| candidates[k].0.clone()).collect();
    let matrices: Vec<Mat3> = chosen.iter().map(|&k| candidates[k].1).collect();
    let gram = trace_gram(&matrices);
    let scales: Vec<f64> = matrices.iter().map(|m| 1.0 / m.frobenius()).collect();
    // nondegeneracy of the trace form on the chosen span
    decompose_traces(&gram, &[Complex::from(0.0); 9], &scales, tol).map_err(|_| Error::BasisNotFound { rank: 9 })?;
    Ok(BurnsideBasis { words, matrices, gram, scales })
}

/// Coefficients `c` with `sum_i c_i S_i = X`, given only `tr(X S_i)`, the
/// Gram matrix, and balancing factors (any positive values; `1/|S_i|` is best).
pub fn decompose_traces(gram: &DMatrix<Complex>, traces: &[Complex], scales: &[f64], tol: &Tolerances) -> Result<Vec<Complex>> {
    // tr(X S_j) = sum_i c_i tr(S_i S_j); solve the balanced system D G D y = D t, c = D y.
    let n = gram.nrows();
    let balanced = DMatrix::from_fn(n, n, |i, j| gram[(i, j)] * scales[i] * scales[j]);
    let rhs: Vec<Complex> = traces.iter().zip(scales).map(|(t, d)| t * d).collect();
    let y = solve(&balanced, &rhs, tol.eps_solve)?.x;
    Ok(y.iter().zip(scales).map(|(y, d)| y * d).collect())
}

/// Coordinates of `gamma` in the basis, from the traces `tr(gamma S_i)`.
pub fn trace_form_decompose(gamma: &Mat3, basis: &BurnsideBasis, tol: &Tolerances) -> Result<Vec<Complex>> {
    let traces: Vec<Complex> = basis.matrices.iter().map(|s| (*gamma * *s).trace()).collect();
    decompose_traces(&basis.gram, &traces, &basis.scales, tol)
}

/// `sum_i c_i S_i`.
pub fn combine(coefficients: &[Complex], matrices: &[Mat3]) -> Mat3 {
    coefficients.iter().zip(matrices).fold(Mat3::zero(), |acc, (c, s)| acc + s.scale(*c))
}
