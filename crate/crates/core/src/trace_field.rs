//! Trace samples over words, phase recovery from `(tr, lambda)`, and the
//! invariant trace field via traces of cubes.
//!
//! A loxodromic element with eigenvalues `lambda e^{i phi}`, `e^{-2 i phi}`,
//! `lambda^{-1} e^{i phi}` has `|tr|^2 = lambda^2 + lambda^-2 + 2 t cos(3 phi) + 3`
//! with `t = lambda + 1/lambda`, and `cos phi`, `sin phi` are rational in
//! `tr`, `conj(tr)` and `lambda`. The functions below evaluate those
//! expressions directly.

use std::collections::HashSet;

use crate::classify::{classify_element, is_loxodromic_fast, loxodromic_data, ClassTag};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::hermitian::{Complex, Tolerances};
use crate::words::{Word, WordSampler, Words};

/// One sampled word with its trace and the trace of its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSample {
    pub word: Word,
    pub trace: Complex,
    pub trace_inv: Complex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceReport {
    pub samples: Vec<TraceSample>,
    pub is_real: bool,
    /// Largest `|Im tr| / max(1, |tr|, size)` over the samples, where `size`
    /// is the largest entry of the word's matrix (cubed for cube samples):
    /// rounding in a trace grows with the entries, not with the trace.
    pub max_imag: f64,
    /// `lambda` of the first loxodromic sample in enumeration order.
    pub lambda_witness: Option<f64>,
    pub witness_word: Option<Word>,
    /// Largest mismatch between `cube_trace` and an explicit cube on the
    /// cross-checked subsample (invariant reports only).
    pub cube_check: Option<f64>,
}

/// Imaginary part measured relative to the trace's size.
pub fn scaled_imag(tr: Complex) -> f64 {
    tr.im.abs() / tr.norm().max(1.0)
}

fn quantize(z: Complex, step: f64) -> (i64, i64) {
    ((z.re / step).round() as i64, (z.im / step).round() as i64)
}

type Key = ((i64, i64), (i64, i64));

struct Collector {
    samples: Vec<TraceSample>,
    seen: HashSet<Key>,
    step: Option<f64>,
    max_imag: f64,
}

impl Collector {
    fn new(step: Option<f64>) -> Self {
        Collector { samples: Vec::new(), seen: HashSet::new(), step, max_imag: 0.0 }
    }

    /// Returns whether the sample was kept.
    fn push(&mut self, word: Word, trace: Complex, trace_inv: Complex, size: f64) -> bool {
        if let Some(step) = self.step {
            if !self.seen.insert((quantize(trace, step), quantize(trace_inv, step))) {
                return false;
            }
        }
        self.max_imag = self.max_imag.max(scaled_imag(trace) * trace.norm().max(1.0) / trace.norm().max(size).max(1.0));
        self.samples.push(TraceSample { word, trace, trace_inv });
        true
    }

    fn finish(self, tol: &Tolerances, witness: Option<(Word, f64)>, cube_check: Option<f64>) -> TraceReport {
        let (witness_word, lambda_witness) = match witness {
            Some((w, l)) => (Some(w), Some(l)),
            None => (None, None),
        };
        TraceReport {
            samples: self.samples,
            is_real: self.max_imag < tol.eps_field,
            max_imag: self.max_imag,
            lambda_witness,
            witness_word,
            cube_check,
        }
    }
}

fn loxodromic_lambda(g: &crate::hermitian::Su21Element, tol: &Tolerances) -> Option<f64> {
    let tr = g.trace();
    if !is_loxodromic_fast(tr) {
        match classify_element(g, tol) {
            Ok(c) if c.tag == ClassTag::Loxodromic => {}
            _ => return None,
        }
    }
    loxodromic_data(g, tol).ok().map(|d| d.lambda)
}

/// Traces of all words up to `sampler.max_length`.
pub fn sample_traces(spec: &GroupSpec, sampler: &WordSampler, tol: &Tolerances) -> TraceReport {
    let mut out = Collector::new(sampler.dedup_step);
    let mut witness = None;
    for (word, g) in Words::new(&spec.generators, sampler.max_length, sampler.include_inverses) {
        let (tr, tr_inv) = (g.trace(), g.trace().conj());
        if out.push(word.clone(), tr, tr_inv, g.matrix().max_norm()) && witness.is_none() {
            witness = loxodromic_lambda(&g, tol).map(|l| (word, l));
        }
    }
    out.finish(tol, witness, None)
}

/// `tr(A^3) = tr(A)^3 - 3 tr(A) tr(A^{-1}) + 3`.
pub fn cube_trace(tr: Complex, tr_inv: Complex) -> Complex {
    tr * tr * tr - tr * tr_inv * 3.0 + Complex::from(3.0)
}

/// Every `CROSS_CHECK_STRIDE`-th kept cube is also computed explicitly.
const CROSS_CHECK_STRIDE: usize = 16;

/// Traces of cubes of sampled words: a surrogate for the invariant trace field.
pub fn invariant_trace_report(spec: &GroupSpec, sampler: &WordSampler, tol: &Tolerances) -> TraceReport {
    let mut out = Collector::new(sampler.dedup_step);
    let mut witness = None;
    let mut check: f64 = 0.0;
    for (word, g) in Words::new(&spec.generators, sampler.max_length, sampler.include_inverses) {
        let (tr, tr_inv) = (g.trace(), g.trace().conj());
        let t3 = cube_trace(tr, tr_inv);
        if !out.push(word.pow(3), t3, t3.conj(), g.matrix().max_norm().powi(3)) {
            continue;
        }
        if out.samples.len() % CROSS_CHECK_STRIDE == 1 {
            let explicit = g.pow(3).trace();
            check = check.max((explicit - t3).norm() / t3.norm().max(1.0));
        }
        if witness.is_none() {
            witness = loxodromic_lambda(&g, tol).map(|l| (word.pow(3), l.powi(3)));
        }
    }
    out.finish(tol, witness, Some(check))
}

/// `(|tr|^2 - lambda^2 - lambda^-2 - 3) / (2 (lambda + 1/lambda))`, checked to
/// lie in `[-1 - eps_field, 1 + eps_field]` and clamped to `[-1, 1]`.
pub fn recover_cos3phi(tr: Complex, lambda: f64, tol: &Tolerances) -> Result<f64> {
    check_lambda(lambda)?;
    let t = lambda + lambda.recip();
    let value = (tr.norm_sqr() - lambda * lambda - (lambda * lambda).recip() - 3.0) / (2.0 * t);
    if !(value.abs() <= 1.0 + tol.eps_field) {
        return Err(Error::OutOfRange { value });
    }
    Ok(value.clamp(-1.0, 1.0))
}

/// `(cos3phi + (Re tr + 1) t) / (2 Re tr + t^2 - 1)` with `t = lambda + 1/lambda`.
pub fn recover_cosphi(tr: Complex, lambda: f64, cos3phi: f64, tol: &Tolerances) -> Result<f64> {
    check_lambda(lambda)?;
    let t = lambda + lambda.recip();
    let den = 2.0 * tr.re + t * t - 1.0;
    if !(den.abs() >= tol.eps_solve) {
        return Err(Error::DenominatorUnderflow { value: den });
    }
    Ok((cos3phi + (tr.re + 1.0) * t) / den)
}

/// `Im tr / (lambda + 1/lambda - 2 cos phi)`.
///
/// `Im tr = t sin(phi) - sin(2 phi) = sin(phi) (t - 2 cos phi)`, and
/// `t - 2 cos phi >= t - 2 > 0` for `lambda > 1`.
pub fn recover_sinphi(tr: Complex, lambda: f64, cosphi: f64, tol: &Tolerances) -> Result<f64> {
    check_lambda(lambda)?;
    let den = lambda + lambda.recip() - 2.0 * cosphi;
    if !(den.abs() >= tol.eps_solve) {
        return Err(Error::DenominatorUnderflow { value: den });
    }
    Ok(tr.im / den)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("lambda must exceed 1, got {lambda}")))
    }
}

/// The phase of a loxodromic recovered from its trace and `lambda` alone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseRecovery {
    pub trace: Complex,
    pub lambda: f64,
    pub cos3phi: f64,
    pub cosphi: f64,
    pub sinphi: f64,
}

impl PhaseRecovery {
    pub fn e_iphi(&self) -> Complex {
        Complex::new(self.cosphi, self.sinphi)
    }

    /// `|cos^2 + sin^2 - 1|` and `|4cos^3 - 3cos - cos3|`.
    pub fn identity_defects(&self) -> (f64, f64) {
        let c = self.cosphi;
        ((c * c + self.sinphi * self.sinphi - 1.0).abs(), (4.0 * c * c * c - 3.0 * c - self.cos3phi).abs())
    }
}

pub fn recover_phase(tr: Complex, lambda: f64, tol: &Tolerances) -> Result<PhaseRecovery> {
    let cos3phi = recover_cos3phi(tr, lambda, tol)?;
    let cosphi = recover_cosphi(tr, lambda, cos3phi, tol)?;
    let sinphi = recover_sinphi(tr, lambda, cosphi, tol)?;
    Ok(PhaseRecovery { trace: tr, lambda, cos3phi, cosphi, sinphi })
}
