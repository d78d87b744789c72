//! Conjugating a whole group into matrices determined by its traces.

use crate::classify::{loxodromic_data, LoxodromicData};
use crate::detect::{find_loxodromic, irreducibility};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::hermitian::{chordal_distance, omega_pow, Complex, Mat3, Su21Element, Tolerances, Vec3};
use crate::trace_field::sample_traces;
use crate::words::{Word, WordSampler, Words};

use super::burnside::{burnside_basis, combine, decompose_traces, trace_gram};
use super::normalize::normalize_pair;
use super::{Certificate, CertificateKind};

/// Exponent range searched by the balancing step.
const BALANCE_RANGE: i32 = 60;

/// Longest basis word considered.
const BASIS_DEPTH: usize = 4;

fn separation(moved: &[Vec3], fixed: &[Vec3]) -> f64 {
    moved
        .iter()
        .flat_map(|m| fixed.iter().map(move |f| chordal_distance(m, f)))
        .fold(f64::INFINITY, f64::min)
}

/// The word with the best separation score per unit of conditioning,
/// `score / |g|^2`, among those scoring above `floor`. Conjugating by a large
/// element costs accuracy in every trace that follows.
fn pick<F>(spec: &GroupSpec, sampler: &WordSampler, floor: f64, score: F) -> Option<(Word, Su21Element)>
where
    F: Fn(&Su21Element) -> f64,
{
    let mut best: Option<(f64, Word, Su21Element)> = None;
    for (w, g) in Words::new(&spec.generators, sampler.max_length, true).skip(1) {
        let s = score(&g);
        if !(s > floor) {
            continue;
        }
        let merit = s / g.matrix().max_norm().powi(2);
        if best.as_ref().map_or(true, |b| merit > b.0) {
            best = Some((merit, w, g));
        }
    }
    best.map(|(_, w, g)| (w, g))
}

/// `diag(2^k, 1, 2^-k)` minimizing the largest entry of the conjugated
/// matrices. Powers of two keep entries in the field and scale exactly.
fn balancer(mats: &[Mat3]) -> Su21Element {
    let size = |k: i32| {
        let r = 2f64.powi(k);
        let w = [[1.0, r, r * r], [1.0 / r, 1.0, r], [1.0 / (r * r), 1.0 / r, 1.0]];
        mats.iter()
            .map(|m| (0..9).map(|e| m.0[e / 3][e % 3].norm() * w[e / 3][e % 3]).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    };
    let k = (-BALANCE_RANGE..=BALANCE_RANGE)
        .min_by(|&a, &b| size(a).total_cmp(&size(b)).then(a.abs().cmp(&b.abs())))
        .unwrap_or(0);
    let r = Complex::from(2f64.powi(k));
    Su21Element::trusted(Mat3::diag(r, Complex::from(1.0), r.inv()))
}

fn conj_word(by: &Word, w: &Word) -> Word {
    by.concat(w).concat(&by.inverse())
}

/// Two loxodromic elements with no common fixed point in projective space,
/// both conjugate to `a`, as words in the generators.
pub fn select_pair(
    spec: &GroupSpec,
    a_word: &Word,
    a: &Su21Element,
    data: &LoxodromicData,
    sampler: &WordSampler,
    tol: &Tolerances,
) -> Result<[(Word, Su21Element); 2]> {
    let floor = tol.eps_class;
    let [p1, p2] = data.fixed_points();
    let p3 = data.frame.col(1);
    let fixed = [p1, p2, p3];
    let moves = |g: &Su21Element| {
        let m = g.matrix();
        separation(&fixed.map(|p| m.apply(&p)), &fixed)
    };
    if let Some((bw, b)) = pick(spec, sampler, floor, moves) {
        let c = a.conjugate_by(&b);
        return Ok([(a_word.clone(), *a), (conj_word(&bw, a_word), c)]);
    }
    // every element shares a fixed point with the axis of `a`: move the polar point first
    let moves_polar = |g: &Su21Element| chordal_distance(&g.matrix().apply(&p3), &p3);
    let (bw, b) = pick(spec, sampler, floor, moves_polar).ok_or(Error::Reducible)?;
    let c = a.conjugate_by(&b);
    let (q1, q2) = (b.matrix().apply(&p1), b.matrix().apply(&p2));
    let shared = [(p1, q1), (p1, q2), (p2, q1), (p2, q2)]
        .into_iter()
        .min_by(|x, y| chordal_distance(&x.0, &x.1).total_cmp(&chordal_distance(&y.0, &y.1)))
        .map(|(p, _)| p)
        .expect("four candidates");
    let moves_shared = |g: &Su21Element| chordal_distance(&g.matrix().apply(&shared), &shared);
    let (dw, d) = pick(spec, sampler, floor, moves_shared).ok_or(Error::Reducible)?;
    let e = a.conjugate_by(&d);
    let first = if chordal_distance(&d.matrix().apply(&p3), &p3) > floor {
        (a_word.clone(), *a)
    } else {
        (conj_word(&bw, a_word), c)
    };
    Ok([first, (conj_word(&dw, a_word), e)])
}

/// Conjugates the group so that every generator is rebuilt from traces of
/// words, the eigenvalue modulus `lambda` of one loxodromic element, and a
/// trace-form basis.
pub fn realize_over_trace_field(spec: &GroupSpec, sampler: &WordSampler, tol: &Tolerances) -> Result<Certificate> {
    realize_targets(spec, &spec.generators, sampler, tol)
}

/// As [`realize_over_trace_field`], with the pair and basis drawn from `spec`
/// and the reconstruction applied to `targets` (elements of a group
/// containing it).
fn realize_targets(
    spec: &GroupSpec,
    targets: &[Su21Element],
    sampler: &WordSampler,
    tol: &Tolerances,
) -> Result<Certificate> {
    if !irreducibility(spec, tol).irreducible {
        return Err(Error::Reducible);
    }
    let found = find_loxodromic(spec, sampler, tol)?;
    let data = loxodromic_data(&found.element, tol)?;
    if data.lambda < 1.0 + 10.0 * tol.eps_class {
        return Err(Error::ill(format!("lambda = {} too close to 1", data.lambda)));
    }
    let [(w1, a1), (w2, a2)] = select_pair(spec, &found.word, &found.element, &data, sampler, tol)?;
    let pair = normalize_pair(&a1, &a2, tol)?;
    let targets_now: Vec<Mat3> = targets.iter().map(|g| *g.conjugate_by(&pair.conjugator).matrix()).collect();
    let d = balancer(&targets_now);
    let f = d.mul(&pair.conjugator);

    let rebuilt: Vec<Su21Element> = pair.reconstructed.iter().map(|m| Su21Element::trusted(*m).conjugate_by(&d)).collect();
    let depth = WordSampler { max_length: sampler.max_length.min(BASIS_DEPTH), ..*sampler };
    let basis = burnside_basis(&rebuilt, &depth, tol)?;
    // Gram matrix and right-hand sides from the input matrices: only traces enter.
    let originals: Vec<Mat3> = basis.words.iter().map(|w| *w.evaluate(&[a1, a2]).matrix()).collect();
    let gram = trace_gram(&originals);

    let mut transformed = Vec::with_capacity(targets.len());
    let mut reconstructed = Vec::with_capacity(targets.len());
    let mut residual = (0..2)
        .map(|k| {
            let shown = *Su21Element::trusted(pair.transformed[k]).conjugate_by(&d).matrix();
            (shown - *rebuilt[k].matrix()).max_norm()
        })
        .fold(0.0, f64::max);
    for g in targets {
        let traces: Vec<Complex> = originals.iter().map(|s| (*g.matrix() * *s).trace()).collect();
        let coeffs = decompose_traces(&gram, &traces, &basis.scales, tol)?;
        let rec = combine(&coeffs, &basis.matrices);
        let actual = *g.conjugate_by(&f).matrix();
        residual = residual.max((rec - actual).max_norm());
        transformed.push(actual);
        reconstructed.push(rec);
    }
    let images = [w1.clone(), w2.clone()];
    Ok(Certificate {
        kind: CertificateKind::FieldRealization,
        conjugator: f,
        lifts: vec![0; transformed.len()],
        transformed_generators: transformed,
        reconstructed_generators: reconstructed,
        residual,
        reconstruction_residual: residual,
        pair_words: [w1, w2],
        basis_words: basis.words.iter().map(|w| w.substitute(&images)).collect(),
        lambda: data.lambda,
    })
}

/// Conjugates a group with real trace field into `SO(2,1)`.
///
/// Errors: `Reducible` before anything else, then `TraceFieldNotReal` when a
/// sampled trace has a scaled imaginary part above `eps_field`.
pub fn conjugate_into_so21(spec: &GroupSpec, sampler: &WordSampler, tol: &Tolerances) -> Result<Certificate> {
    conjugate_targets_into_so21(spec, &spec.generators, sampler, tol)
}

/// Conjugates `spec` into `SO(2,1)` and applies the conjugator to `targets`,
/// dividing each by the cube root of unity that leaves it closest to real.
pub(crate) fn conjugate_targets_into_so21(
    spec: &GroupSpec,
    targets: &[Su21Element],
    sampler: &WordSampler,
    tol: &Tolerances,
) -> Result<Certificate> {
    if !irreducibility(spec, tol).irreducible {
        return Err(Error::Reducible);
    }
    let report = sample_traces(spec, sampler, tol);
    if !report.is_real {
        return Err(Error::TraceFieldNotReal { max_imag: report.max_imag });
    }
    let mut cert = realize_targets(spec, targets, sampler, tol)?;
    cert.kind = CertificateKind::RealForm;
    let polished = polish_real(cert.conjugator, targets);
    if polished != cert.conjugator {
        for (t, g) in cert.transformed_generators.iter_mut().zip(targets) {
            *t = *g.conjugate_by(&polished).matrix();
        }
        cert.conjugator = polished;
    }
    let mut lifts = Vec::with_capacity(targets.len());
    for (t, r) in cert.transformed_generators.iter_mut().zip(cert.reconstructed_generators.iter_mut()) {
        let k = (0..3)
            .min_by(|&x, &y| t.scale(omega_pow(x).conj()).max_imag().total_cmp(&t.scale(omega_pow(y).conj()).max_imag()))
            .expect("three lifts");
        *t = t.scale(omega_pow(k).conj());
        *r = r.scale(omega_pow(k).conj());
        lifts.push(k);
    }
    cert.lifts = lifts;
    let gap = cert
        .transformed_generators
        .iter()
        .zip(&cert.reconstructed_generators)
        .map(|(t, r)| (*t - *r).max_norm())
        .fold(0.0, f64::max);
    cert.reconstruction_residual = cert.reconstruction_residual.max(gap);
    cert.residual = cert.transformed_generators.iter().map(Mat3::max_imag).fold(0.0, f64::max);
    Ok(cert)
}

/// Largest imaginary part over the lift-normalized conjugates.
fn real_defect(f: &Su21Element, targets: &[Su21Element]) -> f64 {
    targets
        .iter()
        .map(|g| {
            let m = *g.conjugate_by(f).matrix();
            (0..3).map(|k| m.scale(omega_pow(k).conj()).max_imag()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Gauss-Newton steps on `f`: the correction `exp(X) f`, `X` in the Lie
/// algebra, that cancels the imaginary parts of `X M - M X + M` in the least
/// squares sense, applied through the Cayley transform. Steps that do not
/// lower the defect are discarded.
fn polish_real(f: Su21Element, targets: &[Su21Element]) -> Su21Element {
    // X = J K with K anti-Hermitian spans the algebra (plus the centre i I).
    let mut algebra = Vec::with_capacity(9);
    for k in 0..3 {
        let mut m = Mat3::zero();
        m.0[k][k] = Complex::new(0.0, 1.0);
        algebra.push(Mat3::exchange() * m);
        for l in k + 1..3 {
            let mut a = Mat3::zero();
            a.0[k][l] = Complex::from(1.0);
            a.0[l][k] = Complex::from(-1.0);
            algebra.push(Mat3::exchange() * a);
            let mut b = Mat3::zero();
            b.0[k][l] = Complex::new(0.0, 1.0);
            b.0[l][k] = Complex::new(0.0, 1.0);
            algebra.push(Mat3::exchange() * b);
        }
    }
    let mut best = f;
    let mut defect = real_defect(&f, targets);
    for _ in 0..POLISH_STEPS {
        let mats: Vec<Mat3> = targets
            .iter()
            .map(|g| {
                let m = *g.conjugate_by(&best).matrix();
                let k = (0..3).min_by(|&x, &y| m.scale(omega_pow(x).conj()).max_imag().total_cmp(&m.scale(omega_pow(y).conj()).max_imag()));
                m.scale(omega_pow(k.unwrap_or(0)).conj())
            })
            .collect();
        let rows = 9 * mats.len();
        let a = nalgebra::DMatrix::from_fn(rows, algebra.len(), |r, j| {
            let m = &mats[r / 9];
            let x = &algebra[j];
            (*x * *m - *m * *x).0[(r % 9) / 3][r % 3].im
        });
        let b = nalgebra::DVector::from_fn(rows, |r, _| -mats[r / 9].0[(r % 9) / 3][r % 3].im);
        let Ok(c) = a.svd(true, true).solve(&b, 1e-12) else { break };
        let x = algebra.iter().zip(c.iter()).fold(Mat3::zero(), |acc, (m, c)| acc + m.scale(Complex::from(*c)));
        let half = x.scale(Complex::from(0.5));
        let Some(inv) = (Mat3::identity() - half).inverse() else { break };
        let step = inv * (Mat3::identity() + half);
        let step = step.scale(crate::hermitian::principal_cbrt(step.det()).inv());
        let candidate = Su21Element::trusted(step * *best.matrix());
        let d = real_defect(&candidate, targets);
        if !(d < defect) {
            break;
        }
        best = candidate;
        defect = d;
    }
    best
}

/// Refinement steps attempted by [`polish_real`].
const POLISH_STEPS: usize = 3;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{hidden_so21_spec, known_field_spec, sl2z_spec};
    use crate::hermitian::random_su21;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn random_two_generator_groups_realize() {
        let t = tol();
        for seed in 0..10u64 {
            let spec = GroupSpec::new(vec![random_su21(2 * seed, 0.8).unwrap(), random_su21(2 * seed + 1, 0.8).unwrap()]);
            let cert = realize_over_trace_field(&spec, &WordSampler::with_max_length(4), &t).unwrap();
            let scale = spec.matrices().iter().map(Mat3::max_norm).fold(1.0, f64::max);
            assert!(cert.residual < 1e-7 * scale.powi(4), "seed {seed}: {}", cert.residual);
            assert!(cert.check(&spec.generators) < 1e-12 * scale.powi(3));
            assert_eq!(cert.basis_words.len(), 9);
        }
    }

    #[test]
    fn known_field_example() {
        let t = tol();
        let spec = known_field_spec(0);
        let cert = realize_over_trace_field(&spec, &WordSampler::with_max_length(4), &t).unwrap();
        assert!(cert.residual < 1e-7, "{}", cert.residual);
    }

    #[test]
    fn hidden_real_form_is_found() {
        let t = tol();
        let spec = hidden_so21_spec(4);
        let cert = conjugate_into_so21(&spec, &WordSampler::with_max_length(4), &t).unwrap();
        assert_eq!(cert.kind, CertificateKind::RealForm);
        assert!(cert.residual < 1e-8, "{}", cert.residual);
        for m in &cert.transformed_generators {
            assert!(m.form_residual() < 1e-8);
        }
    }

    #[test]
    fn refusals() {
        let t = tol();
        let s = WordSampler::with_max_length(4);
        assert_eq!(conjugate_into_so21(&sl2z_spec(), &s, &t).unwrap_err(), Error::Reducible);
        let spec = GroupSpec::new(vec![random_su21(1, 1.0).unwrap(), random_su21(2, 1.0).unwrap()]);
        assert!(matches!(conjugate_into_so21(&spec, &s, &t), Err(Error::TraceFieldNotReal { .. })));
    }
}
