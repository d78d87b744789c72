//! Group-level detectors: irreducibility, loxodromic search, elementarity,
//! screw motions, and the real/complex Fuchsian classification.

use nalgebra::DMatrix;

use crate::classify::{classify_element, is_loxodromic_fast, loxodromic_data, parabolic_normal_form, spectrum, ClassTag, GUARD};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::hermitian::{chordal_distance, herm_inner, omega_pow, Complex, Mat3, Su21Element, Tolerances, Vec3};
use crate::reconstruct::{conjugate_targets_into_so21, Certificate};
use crate::trace_field::{invariant_trace_report, sample_traces, scaled_imag, TraceReport};
use crate::words::{Word, WordSampler, Words};

/// Sign of `<v, v>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PointKind {
    Positive,
    Negative,
    Isotropic,
}

/// A line fixed by every generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedLine {
    /// Unit vector, canonically phased.
    pub vector: Vec3,
    pub kind: PointKind,
}

impl FixedLine {
    fn new(v: Vec3, tol: &Tolerances) -> Self {
        let v = v.canonical();
        let q = herm_inner(&v, &v).re;
        let band = tol.eps_class.sqrt();
        let kind = if q > band {
            PointKind::Positive
        } else if q < -band {
            PointKind::Negative
        } else {
            PointKind::Isotropic
        };
        FixedLine { vector: v, kind }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IrreducibilityReport {
    pub irreducible: bool,
    /// Common eigenlines of the generators.
    pub witnesses: Vec<FixedLine>,
    /// Polars of common invariant planes, found independently from the
    /// transposed generators.
    pub dual_witnesses: Vec<FixedLine>,
}

impl IrreducibilityReport {
    /// Preferred witness: a positive line if there is one.
    pub fn witness(&self) -> Option<&FixedLine> {
        self.witnesses.iter().find(|w| w.kind == PointKind::Positive).or(self.witnesses.first())
    }

    /// Whether the direct and dual routes reached the same verdict.
    pub fn routes_agree(&self) -> bool {
        self.witnesses.is_empty() == self.dual_witnesses.is_empty()
    }
}

/// Eigenvalue representatives with clusters merged.
fn eigen_clusters(m: &Mat3, tol: &Tolerances) -> Vec<Complex> {
    let s = spectrum(m);
    let mut reps: Vec<(Complex, f64)> = Vec::new();
    for k in 0..3 {
        let (mu, u) = (s.eigenvalues[k], s.uncertainty[k]);
        if let Some(r) = reps.iter_mut().find(|r| (r.0 - mu).norm() <= GUARD * (r.1 + u) + tol.eps_class) {
            r.1 = r.1.max(u);
        } else {
            reps.push((mu, u));
        }
    }
    if reps.len() == 2 {
        // the pair's representative from the trace, which is better conditioned
        let single = reps.iter().copied().find(|r| s.eigenvalues.iter().filter(|e| (**e - r.0).norm() <= GUARD * r.1 + tol.eps_class).count() == 1);
        if let Some(single) = single {
            let double = (m.trace() - single.0) / 2.0;
            return vec![single.0, double];
        }
    }
    if reps.len() == 1 {
        return vec![s.lift];
    }
    reps.into_iter().map(|r| r.0).collect()
}

/// Orthonormal kernel of `a` (3 × d), as coefficient vectors.
fn kernel(a: &DMatrix<Complex>, cut: f64) -> Vec<Vec<Complex>> {
    let d = a.ncols();
    // pad to square so that the right singular vectors span all of C^d
    let rows = a.nrows().max(d);
    let padded = DMatrix::from_fn(rows, d, |i, j| if i < a.nrows() { a[(i, j)] } else { Complex::from(0.0) });
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V^H");
    (0..d)
        .filter(|&k| svd.singular_values[k] <= cut)
        .map(|k| (0..d).map(|j| vt[(k, j)].conj()).collect())
        .collect()
}

/// Common eigenvectors of `mats`, as bases of the common eigenspaces.
fn common_eigenspaces(mats: &[Mat3], tol: &Tolerances) -> Vec<Vec<Vec3>> {
    let mut spaces: Vec<Vec<Vec3>> = vec![(0..3).map(Vec3::basis).collect()];
    for m in mats {
        let cut = tol.eps_class.sqrt() * m.max_norm().max(1.0);
        let mut next = Vec::new();
        for q in &spaces {
            for mu in eigen_clusters(m, tol) {
                let shifted = *m - Mat3::identity().scale(mu);
                let a = DMatrix::from_fn(3, q.len(), |i, j| shifted.apply(&q[j]).0[i]);
                let ker = kernel(&a, cut);
                if ker.is_empty() {
                    continue;
                }
                let basis = ker
                    .iter()
                    .map(|x| q.iter().zip(x).fold(Vec3::default(), |acc, (v, c)| acc + v.scale(*c)))
                    .collect();
                next.push(basis);
            }
        }
        spaces = next;
        if spaces.is_empty() {
            break;
        }
    }
    spaces
}

/// Decides whether the generators share an invariant line or plane.
///
/// Lines are found as common eigenvectors. Planes are found independently as
/// kernels of common eigenvectors of the transposes and reported through
/// their polar points `J conj(l)`.
pub fn irreducibility(spec: &GroupSpec, tol: &Tolerances) -> IrreducibilityReport {
    let mats = spec.matrices();
    let lines = |ms: &[Mat3]| -> Vec<Vec3> { common_eigenspaces(ms, tol).into_iter().flatten().collect() };
    let witnesses: Vec<FixedLine> = lines(&mats).into_iter().map(|v| FixedLine::new(v, tol)).collect();
    let transposed: Vec<Mat3> = mats.iter().map(Mat3::transpose).collect();
    let dual_witnesses: Vec<FixedLine> =
        lines(&transposed).into_iter().map(|l| FixedLine::new(l.conj().flip(), tol)).collect();
    IrreducibilityReport { irreducible: witnesses.is_empty() && dual_witnesses.is_empty(), witnesses, dual_witnesses }
}

/// How a loxodromic element was found.
#[derive(Clone, Debug, PartialEq)]
pub enum SearchMethod {
    /// A word from the enumeration.
    Direct,
    /// `parabolic^power * transversal`.
    Boosted { parabolic: Word, transversal: Word, power: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoxodromicSearch {
    pub word: Word,
    pub element: Su21Element,
    pub method: SearchMethod,
    /// Words inspected.
    pub searched: usize,
}

/// Largest power tried by [`boost_search`].
pub const MAX_BOOST: u64 = 1 << 20;

/// Parabolics and transversals tried in the boost phase.
const BOOST_CANDIDATES: usize = 4;

fn usable_loxodromic(g: &Su21Element, tol: &Tolerances) -> bool {
    let fast = is_loxodromic_fast(g.trace());
    let tagged = fast || matches!(classify_element(g, tol), Ok(c) if c.tag == ClassTag::Loxodromic);
    tagged && loxodromic_data(g, tol).is_ok_and(|d| d.lambda >= 1.0 + 10.0 * tol.eps_class)
}

/// A power `n <= MAX_BOOST` with `|tr(parabolic^n * transversal)| > 3`, which
/// forces a loxodromic. The trace grows without bound in `n` when the
/// transversal moves the parabolic fixed point, so doubling finds a bracket;
/// bisection then returns its left-most passing end.
pub fn boost_search(parabolic: &Su21Element, transversal: &Su21Element, tol: &Tolerances) -> Option<(u64, Su21Element)> {
    let test = |n: u64| {
        let g = parabolic.pow(n).mul(transversal);
        (g.trace().norm() > 3.0 && usable_loxodromic(&g, tol)).then_some(g)
    };
    let mut lo = 0u64;
    let mut hi = 1u64;
    let mut found = loop {
        if let Some(g) = test(hi) {
            break g;
        }
        if hi >= MAX_BOOST {
            return None;
        }
        lo = hi;
        hi *= 2;
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match test(mid) {
            Some(g) => {
                hi = mid;
                found = g;
            }
            None => lo = mid,
        }
    }
    Some((hi, found))
}

/// Isotropic fixed vector of a parabolic.
fn parabolic_fixed_point(g: &Su21Element, tol: &Tolerances) -> Option<Vec3> {
    parabolic_normal_form(g, tol).ok().map(|f| f.conjugator.inverse().matrix().col(0))
}

/// Finds a loxodromic element: first among enumerated words, then by pushing
/// a parabolic against an element that moves its fixed point.
pub fn find_loxodromic(spec: &GroupSpec, sampler: &WordSampler, tol: &Tolerances) -> Result<LoxodromicSearch> {
    let mut searched = 0;
    let mut parabolics = Vec::new();
    let words: Vec<(Word, Su21Element)> = Words::new(&spec.generators, sampler.max_length, sampler.include_inverses).skip(1).collect();
    for (w, g) in &words {
        searched += 1;
        if usable_loxodromic(g, tol) {
            return Ok(LoxodromicSearch { word: w.clone(), element: *g, method: SearchMethod::Direct, searched });
        }
        if parabolics.len() < BOOST_CANDIDATES && matches!(classify_element(g, tol), Ok(c) if c.tag.is_parabolic()) {
            if let Some(p) = parabolic_fixed_point(g, tol) {
                parabolics.push((w.clone(), *g, p));
            }
        }
    }
    for (bw, b, p) in &parabolics {
        let movers = words.iter().filter(|(_, c)| chordal_distance(&c.matrix().apply(p), p) > tol.eps_class.sqrt());
        for (cw, c) in movers.take(BOOST_CANDIDATES) {
            if let Some((n, g)) = boost_search(b, c, tol) {
                let word = bw.pow(n as usize).concat(cw);
                let method = SearchMethod::Boosted { parabolic: bw.clone(), transversal: cw.clone(), power: n };
                return Ok(LoxodromicSearch { word, element: g, method, searched });
            }
        }
    }
    Err(Error::NoLoxodromicFound { searched })
}

/// True when no two sampled loxodromics have disjoint fixed-point pairs
/// (a necessary condition for the group to be elementary).
pub fn elementary_screen(spec: &GroupSpec, sampler: &WordSampler, tol: &Tolerances) -> bool {
    let sep = tol.eps_class.sqrt();
    let mut seen: Vec<[Vec3; 2]> = Vec::new();
    for (_, g) in Words::new(&spec.generators, sampler.max_length, sampler.include_inverses).skip(1) {
        if !usable_loxodromic(&g, tol) {
            continue;
        }
        let Ok(d) = loxodromic_data(&g, tol) else { continue };
        let fp = d.fixed_points();
        let disjoint = |other: &[Vec3; 2]| fp.iter().all(|p| other.iter().all(|q| chordal_distance(p, q) > sep));
        if seen.iter().any(disjoint) {
            return false;
        }
        if seen.len() < 32 {
            seen.push(fp);
        }
    }
    true
}

/// Whether a loxodromic element rotates about its axis, i.e. no lift has a
/// real trace.
///
/// Errors: `NotLoxodromic`; `BoundaryCase` when the smallest scaled
/// imaginary part over the three lifts lies in `[eps_field, 2 eps_field]`.
pub fn is_screw_motion(g: &Su21Element, tol: &Tolerances) -> Result<bool> {
    if !usable_loxodromic(g, tol) {
        return Err(Error::NotLoxodromic);
    }
    let tr = g.trace();
    let m = (0..3).map(|k| scaled_imag(omega_pow(k) * tr)).fold(f64::INFINITY, f64::min);
    if m < tol.eps_field {
        Ok(false)
    } else if m > 2.0 * tol.eps_field {
        Ok(true)
    } else {
        Err(Error::BoundaryCase { quantity: "imaginary part of the trace" })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FuchsianVerdict {
    /// Preserves a totally real plane.
    RFuchsian,
    /// Preserves a complex line.
    CFuchsian,
    NotFuchsianOfEitherKind,
    Inconclusive,
}

impl FuchsianVerdict {
    pub fn tag(self) -> &'static str {
        match self {
            FuchsianVerdict::RFuchsian => "RFuchsian",
            FuchsianVerdict::CFuchsian => "CFuchsian",
            FuchsianVerdict::NotFuchsianOfEitherKind => "NotFuchsianOfEitherKind",
            FuchsianVerdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FuchsianReport {
    pub verdict: FuchsianVerdict,
    /// Conjugation into `SO(2,1)` for real verdicts.
    pub certificate: Option<Certificate>,
    /// Positive fixed point (polar of the preserved complex line).
    pub witness: Option<FixedLine>,
    /// Why the verdict is inconclusive.
    pub cause: Option<String>,
    pub invariant_traces: TraceReport,
    pub irreducible: bool,
}

/// Generators of the subgroup of cubes, widened by cubes of products of
/// pairs when the plain cubes fail to act irreducibly.
pub fn cube_subgroup(spec: &GroupSpec, tol: &Tolerances) -> GroupSpec {
    let cubes: Vec<Su21Element> = spec.generators.iter().map(|g| g.pow(3)).collect();
    let plain = GroupSpec::new(cubes.clone()).discrete(spec.assumed_discrete);
    if irreducibility(&plain, tol).irreducible {
        return plain;
    }
    let mut gens = cubes;
    for i in 0..spec.len() {
        for j in i + 1..spec.len() {
            gens.push(spec.generators[i].mul(&spec.generators[j]).pow(3));
        }
    }
    GroupSpec::new(gens).discrete(spec.assumed_discrete)
}

/// Longest word in the cube subgroup sampled during the fallback.
const CUBE_DEPTH: usize = 2;

/// The generators divided by the cube roots of unity that make their traces
/// real, provided every choice is unambiguous and the resulting group has a
/// real trace sample.
pub fn real_lifts(spec: &GroupSpec, sampler: &WordSampler, tol: &Tolerances) -> Option<GroupSpec> {
    let mut gens = Vec::with_capacity(spec.len());
    for g in &spec.generators {
        let mut imag: Vec<(f64, usize)> = (0..3).map(|k| (scaled_imag(omega_pow(k).conj() * g.trace()), k)).collect();
        imag.sort_by(|a, b| a.0.total_cmp(&b.0));
        if imag[0].0 > tol.eps_field || imag[1].0 <= tol.eps_field.sqrt() {
            return None;
        }
        gens.push(g.lift((3 - imag[0].1) % 3));
    }
    let lifted = GroupSpec::new(gens).discrete(spec.assumed_discrete);
    sample_traces(&lifted, sampler, tol).is_real.then_some(lifted)
}

/// Decides between real and complex Fuchsian for a group assumed discrete.
///
/// Irreducible with real invariant trace field: the generators, lifted to
/// real traces (or failing that the cube subgroup), are conjugated into
/// `SO(2,1)` and the conjugator applied to the input generators, each
/// divided by the cube root of unity that makes it real. Irreducible with non-real field: neither kind. Reducible with a
/// positive fixed line and two loxodromics with disjoint fixed points:
/// complex Fuchsian. Anything else is inconclusive.
pub fn classify_fuchsian(spec: &GroupSpec, sampler: &WordSampler, tol: &Tolerances) -> FuchsianReport {
    let invariant_traces = invariant_trace_report(spec, sampler, tol);
    let irr = irreducibility(spec, tol);
    let mut report = FuchsianReport {
        verdict: FuchsianVerdict::Inconclusive,
        certificate: None,
        witness: None,
        cause: None,
        invariant_traces,
        irreducible: irr.irreducible,
    };
    if !spec.assumed_discrete {
        report.cause = Some("discreteness not asserted".into());
        return report;
    }
    if !irr.routes_agree() {
        report.cause = Some("direct and dual invariant-subspace searches disagree".into());
        return report;
    }
    if irr.irreducible {
        if !report.invariant_traces.is_real {
            report.verdict = FuchsianVerdict::NotFuchsianOfEitherKind;
            return report;
        }
        // Lifts with real traces keep words short; the cube subgroup is the
        // lift-free fallback but its long products lose precision quickly.
        let attempt = match real_lifts(spec, sampler, tol) {
            Some(lifted) => conjugate_targets_into_so21(&lifted, &spec.generators, sampler, tol),
            None => {
                let short = WordSampler { max_length: sampler.max_length.min(CUBE_DEPTH), ..*sampler };
                conjugate_targets_into_so21(&cube_subgroup(spec, tol), &spec.generators, &short, tol)
            }
        };
        match attempt {
            Ok(cert) if cert.residual <= tol.eps_field.sqrt() => {
                report.verdict = FuchsianVerdict::RFuchsian;
                report.certificate = Some(cert);
            }
            Ok(cert) => report.cause = Some(format!("conjugated generators keep imaginary parts {:.3e}", cert.residual)),
            Err(e) => report.cause = Some(format!("{}: {e}", e.tag())),
        }
        return report;
    }
    match irr.witness().copied() {
        Some(w) if w.kind == PointKind::Positive => {
            if elementary_screen(spec, sampler, tol) {
                report.cause = Some("no pair of loxodromics with disjoint fixed points found".into());
            } else {
                report.verdict = FuchsianVerdict::CFuchsian;
            }
            report.witness = Some(w);
        }
        w => {
            report.witness = w;
            report.cause = Some("reducible without a positive fixed point".into());
        }
    }
    report
}
