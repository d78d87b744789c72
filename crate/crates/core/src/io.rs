//! JSON group files, JSON reports, and the command dispatch behind the CLI.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major arrays of
//! three rows. Unknown fields are rejected. Reports are written with sorted
//! keys and round-trip floats, so identical inputs give identical bytes.

use serde::{Deserialize, Serialize};
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::classify::{classify_element, loxodromic_data, parabolic_normal_form, ClassTag, ParabolicKind};
use crate::corpus;
use crate::detect::{classify_fuchsian, elementary_screen, find_loxodromic, irreducibility, is_screw_motion, PointKind, SearchMethod};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::hermitian::{validate_su21, Complex, Mat3, Tolerances, Vec3};
use crate::reconstruct::{conjugate_into_so21, normalize_pair, realize_over_trace_field, Certificate, CertificateKind, EntryLedger};
use crate::trace_field::{invariant_trace_report, sample_traces, TraceReport};
use crate::words::{Word, WordSampler};

/// Version accepted by [`parse_group_file`] and written into reports.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFlags {
    #[serde(default)]
    pub assumed_discrete: bool,
}

/// Partial tolerance overrides; absent fields keep their defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_form: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_class: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_field: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_solve: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: Tolerances) -> Tolerances {
        Tolerances {
            eps_form: self.eps_form.unwrap_or(base.eps_form),
            eps_class: self.eps_class.unwrap_or(base.eps_class),
            eps_field: self.eps_field.unwrap_or(base.eps_field),
            eps_solve: self.eps_solve.unwrap_or(base.eps_solve),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub max_length: usize,
}

/// On-disk group description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub format_version: u32,
    pub generators: Vec<Mat3>,
    #[serde(default)]
    pub flags: GroupFlags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A validation failure tied to one generator of a group file.
#[derive(Clone, Debug, PartialEq)]
pub struct EntryError {
    pub generator: usize,
    pub error: Error,
}

impl GroupFile {
    pub fn from_spec(spec: &GroupSpec, label: Option<String>) -> Self {
        GroupFile {
            format_version: FORMAT_VERSION,
            generators: spec.matrices(),
            flags: GroupFlags { assumed_discrete: spec.assumed_discrete },
            tolerances: None,
            sampler: None,
            label,
        }
    }

    /// Validates every generator, reporting the first offender.
    pub fn to_spec(&self, tol: &Tolerances) -> std::result::Result<GroupSpec, EntryError> {
        let gens = self
            .generators
            .iter()
            .enumerate()
            .map(|(generator, m)| validate_su21(m, tol).map_err(|error| EntryError { generator, error }))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(GroupSpec::new(gens).discrete(self.flags.assumed_discrete))
    }
}

pub fn parse_group_file(text: &str) -> Result<GroupFile> {
    let file: GroupFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("group file: {e}")))?;
    if file.format_version != FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "group file: format_version {} is not supported (expected {FORMAT_VERSION})",
            file.format_version
        )));
    }
    Ok(file)
}

pub fn read_group(text: &str, tol: &Tolerances) -> Result<GroupSpec> {
    parse_group_file(text)?.to_spec(tol).map_err(|e| e.error)
}

pub fn write_group(spec: &GroupSpec, label: Option<String>) -> String {
    to_json(&GroupFile::from_spec(spec, label))
}

/// Hex SHA-256 of the raw input bytes.
pub fn input_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorInfo {
    pub tag: String,
    pub message: String,
    /// Index of the offending generator, when the failure is tied to one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<usize>,
}

/// Output of every command except `corpus`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub format_version: u32,
    pub command: String,
    pub status: Status,
    pub input_sha256: Option<String>,
    pub seed: u64,
    pub max_length: usize,
    pub tolerances: Tolerances,
    pub error: Option<ErrorInfo>,
    pub result: Option<serde_json::Value>,
    /// Wall-clock time of the command; the only nondeterministic field.
    pub timing_ms: f64,
}

impl ReportFile {
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("report file: {e}")))
    }
}

/// The CLI subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Classify,
    TraceField,
    InvariantField,
    Normalize,
    Realize,
    So21,
    Detect,
    FindLox,
    Corpus,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Validate,
        Command::Classify,
        Command::TraceField,
        Command::InvariantField,
        Command::Normalize,
        Command::Realize,
        Command::So21,
        Command::Detect,
        Command::FindLox,
        Command::Corpus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Classify => "classify",
            Command::TraceField => "trace-field",
            Command::InvariantField => "invariant-field",
            Command::Normalize => "normalize",
            Command::Realize => "realize",
            Command::So21 => "so21",
            Command::Detect => "detect",
            Command::FindLox => "find-lox",
            Command::Corpus => "corpus",
        }
    }
}

/// Command-line settings. Unset values fall back to the group file, then to
/// the library defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Options {
    pub seed: u64,
    pub max_length: Option<usize>,
    pub tolerances: ToleranceOverrides,
    pub assume_discrete: bool,
    /// Entry name for `corpus`.
    pub corpus_name: Option<String>,
}

/// Process exit classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success,
    /// A mathematical precondition failed; the report carries the tag.
    Domain,
    /// Malformed input or arguments.
    Usage,
}

impl Exit {
    pub fn code(self) -> i32 {
        match self {
            Exit::Success => 0,
            Exit::Domain => 1,
            Exit::Usage => 2,
        }
    }

    fn of(e: &Error) -> Self {
        if e.is_parse() {
            Exit::Usage
        } else {
            Exit::Domain
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    /// Text to write to the output.
    pub text: String,
    pub exit: Exit,
    pub error: Option<ErrorInfo>,
}

/// Settings in force for one run.
struct Context<'a> {
    cmd: Command,
    input: Option<&'a str>,
    seed: u64,
    max_length: usize,
    tol: Tolerances,
    start: Instant,
}

impl Context<'_> {
    fn report(&self, status: Status, error: Option<ErrorInfo>, result: Option<serde_json::Value>) -> ReportFile {
        ReportFile {
            format_version: FORMAT_VERSION,
            command: self.cmd.name().into(),
            status,
            input_sha256: self.input.map(|t| input_digest(t.as_bytes())),
            seed: self.seed,
            max_length: self.max_length,
            tolerances: self.tol,
            error,
            result,
            timing_ms: self.start.elapsed().as_secs_f64() * 1e3,
        }
    }

    fn success(&self, value: serde_json::Value) -> Outcome {
        Outcome { text: self.report(Status::Ok, None, Some(value)).to_json(), exit: Exit::Success, error: None }
    }

    fn failure(&self, e: &Error, generator: Option<usize>, value: Option<serde_json::Value>) -> Outcome {
        let info = ErrorInfo { tag: e.tag().into(), message: e.to_string(), generator };
        let text = self.report(Status::Error, Some(info.clone()), value).to_json();
        Outcome { text, exit: Exit::of(e), error: Some(info) }
    }
}

/// Runs a command on the input text (absent only for `corpus`).
pub fn run(cmd: Command, input: Option<&str>, opts: &Options) -> Outcome {
    let mut ctx = Context {
        cmd,
        input,
        seed: opts.seed,
        max_length: opts.max_length.unwrap_or(WordSampler::default().max_length),
        tol: opts.tolerances.apply(Tolerances::default()),
        start: Instant::now(),
    };
    if cmd == Command::Corpus {
        if let Err(e) = ctx.tol.validated() {
            return ctx.failure(&e, None, None);
        }
        let name = opts.corpus_name.as_deref().unwrap_or("");
        return match corpus::named(name, opts.seed) {
            Ok(spec) => Outcome { text: write_group(&spec, Some(name.to_string())), exit: Exit::Success, error: None },
            Err(e) => ctx.failure(&e, None, None),
        };
    }
    let Some(text) = input else {
        return ctx.failure(&Error::Parse("missing input".into()), None, None);
    };
    let file = match parse_group_file(text) {
        Ok(f) => f,
        Err(e) => return ctx.failure(&e, None, None),
    };
    let file_tol = file.tolerances.unwrap_or_default().apply(Tolerances::default());
    ctx.tol = opts.tolerances.apply(file_tol);
    ctx.max_length = opts.max_length.or(file.sampler.map(|s| s.max_length)).unwrap_or(ctx.max_length);
    if let Err(e) = ctx.tol.validated() {
        return ctx.failure(&e, None, None);
    }
    let tol = ctx.tol;
    if cmd == Command::Validate {
        let (value, err) = validate_report(&file, &tol);
        return match err {
            None => ctx.success(value),
            Some(e) => ctx.failure(&e.error, Some(e.generator), Some(value)),
        };
    }
    let spec = match file.to_spec(&tol) {
        Ok(s) => s.discrete(file.flags.assumed_discrete || opts.assume_discrete),
        Err(e) => return ctx.failure(&e.error, Some(e.generator), None),
    };
    let sampler = WordSampler::with_max_length(ctx.max_length);
    let result = match cmd {
        Command::Classify => classify_report(&spec, &tol),
        Command::TraceField => Ok(json(TraceOut::from(&sample_traces(&spec, &sampler, &tol)))),
        Command::InvariantField => Ok(json(TraceOut::from(&invariant_trace_report(&spec, &sampler, &tol)))),
        Command::Normalize => normalize_report(&spec, &tol),
        Command::Realize => realize_over_trace_field(&spec, &sampler, &tol).map(|c| json(CertificateOut::from(&c))),
        Command::So21 => conjugate_into_so21(&spec, &sampler, &tol).map(|c| json(CertificateOut::from(&c))),
        Command::Detect => Ok(detect_report(&spec, &sampler, &tol)),
        Command::FindLox => find_lox_report(&spec, &sampler, &tol),
        Command::Validate | Command::Corpus => unreachable!("handled above"),
    };
    match result {
        Ok(v) => ctx.success(v),
        Err(e) => ctx.failure(&e, None, None),
    }
}

fn json<T: Serialize>(v: T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

/// Non-finite values have no JSON form; they are reported as absent.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Serialize)]
struct ValidateEntry {
    index: usize,
    valid: bool,
    residual: Option<f64>,
    /// The six form conditions followed by `|det - 1|`.
    residuals: Vec<Option<f64>>,
}

fn validate_report(file: &GroupFile, tol: &Tolerances) -> (serde_json::Value, Option<EntryError>) {
    let mut first_error = None;
    let entries: Vec<ValidateEntry> = file
        .generators
        .iter()
        .enumerate()
        .map(|(index, m)| {
            let outcome = validate_su21(m, tol);
            let valid = outcome.is_ok();
            if let Err(error) = outcome {
                first_error.get_or_insert(EntryError { generator: index, error });
            }
            let residuals = m.form_residuals().iter().map(|x| finite(*x)).collect();
            ValidateEntry { index, valid, residual: finite(m.form_residual()), residuals }
        })
        .collect();
    (json(serde_json::json!({ "generators": entries })), first_error)
}

#[derive(Serialize)]
struct ClassOut {
    index: usize,
    class: ClassTag,
    margin: Option<f64>,
    lift: Complex,
    eigenvalues: [Complex; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    screw_motion: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normal_form: Option<ParabolicKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normal_form_residual: Option<f64>,
}

fn classify_report(spec: &GroupSpec, tol: &Tolerances) -> Result<serde_json::Value> {
    let mut out = Vec::with_capacity(spec.len());
    for (index, g) in spec.generators.iter().enumerate() {
        let c = classify_element(g, tol)?;
        let mut entry = ClassOut {
            index,
            class: c.tag,
            margin: finite(c.margin),
            lift: c.lift,
            eigenvalues: c.eigenvalues,
            lambda: None,
            phi: None,
            screw_motion: None,
            normal_form: None,
            normal_form_residual: None,
        };
        if c.tag == ClassTag::Loxodromic {
            let d = loxodromic_data(g, tol)?;
            entry.lambda = Some(d.lambda);
            entry.phi = Some(d.phi);
            entry.screw_motion = is_screw_motion(g, tol).ok();
        }
        if c.tag.is_parabolic() {
            let f = parabolic_normal_form(g, tol)?;
            entry.normal_form = Some(f.kind);
            entry.normal_form_residual = Some(f.residual);
        }
        out.push(entry);
    }
    Ok(json(serde_json::json!({ "generators": out })))
}

#[derive(Serialize, Deserialize)]
pub struct SampleOut {
    pub word: Word,
    pub trace: Complex,
}

#[derive(Serialize, Deserialize)]
pub struct TraceOut {
    pub is_real: bool,
    pub max_imag: f64,
    pub lambda_witness: Option<f64>,
    pub witness_word: Option<Word>,
    pub cube_check: Option<f64>,
    pub sample_count: usize,
    pub samples: Vec<SampleOut>,
}

impl From<&TraceReport> for TraceOut {
    fn from(r: &TraceReport) -> Self {
        TraceOut {
            is_real: r.is_real,
            max_imag: r.max_imag,
            lambda_witness: r.lambda_witness,
            witness_word: r.witness_word.clone(),
            cube_check: r.cube_check,
            sample_count: r.samples.len(),
            samples: r.samples.iter().map(|s| SampleOut { word: s.word.clone(), trace: s.trace }).collect(),
        }
    }
}

#[derive(Serialize)]
struct LedgerOut {
    diagonal: [Complex; 3],
    p12_21: Complex,
    p13_31: Complex,
    p23_32: Complex,
    m12_32: Complex,
    m13_31: Complex,
    m23_21: Complex,
}

impl From<&EntryLedger> for LedgerOut {
    fn from(l: &EntryLedger) -> Self {
        LedgerOut {
            diagonal: l.diagonal,
            p12_21: l.p12_21,
            p13_31: l.p13_31,
            p23_32: l.p23_32,
            m12_32: l.m12_32,
            m13_31: l.m13_31,
            m23_21: l.m23_21,
        }
    }
}

fn normalize_report(spec: &GroupSpec, tol: &Tolerances) -> Result<serde_json::Value> {
    if spec.len() < 2 {
        return Err(Error::InvalidParameter("normalize needs two generators".into()));
    }
    let n = normalize_pair(&spec.generators[0], &spec.generators[1], tol)?;
    Ok(serde_json::json!({
        "conjugator": n.conjugator.matrix(),
        "lambda": n.diagonal.lambda,
        "phi": n.diagonal.phi,
        "flipped": n.flipped,
        "ledger": LedgerOut::from(&n.ledger),
        "transformed": n.transformed,
        "reconstructed": n.reconstructed,
        "residual": n.residual,
    }))
}

/// Serialized form of a [`Certificate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateOut {
    pub kind: CertificateKind,
    pub conjugator: Mat3,
    pub transformed_generators: Vec<Mat3>,
    pub reconstructed_generators: Vec<Mat3>,
    pub lifts: Vec<usize>,
    pub residual: f64,
    pub reconstruction_residual: f64,
    pub pair_words: [Word; 2],
    pub basis_words: Vec<Word>,
    pub lambda: f64,
}

impl From<&Certificate> for CertificateOut {
    fn from(c: &Certificate) -> Self {
        CertificateOut {
            kind: c.kind,
            conjugator: *c.conjugator.matrix(),
            transformed_generators: c.transformed_generators.clone(),
            reconstructed_generators: c.reconstructed_generators.clone(),
            lifts: c.lifts.clone(),
            residual: c.residual,
            reconstruction_residual: c.reconstruction_residual,
            pair_words: c.pair_words.clone(),
            basis_words: c.basis_words.clone(),
            lambda: c.lambda,
        }
    }
}

#[derive(Serialize)]
struct LineOut {
    vector: Vec3,
    kind: PointKind,
}

fn detect_report(spec: &GroupSpec, sampler: &WordSampler, tol: &Tolerances) -> serde_json::Value {
    let irr = irreducibility(spec, tol);
    let fuchsian = classify_fuchsian(spec, sampler, tol);
    let line = |w: &crate::detect::FixedLine| LineOut { vector: w.vector, kind: w.kind };
    serde_json::json!({
        "verdict": fuchsian.verdict,
        "cause": fuchsian.cause,
        "assumed_discrete": spec.assumed_discrete,
        "irreducible": irr.irreducible,
        "routes_agree": irr.routes_agree(),
        "witness": fuchsian.witness.as_ref().map(line),
        "witnesses": irr.witnesses.iter().map(line).collect::<Vec<_>>(),
        "dual_witnesses": irr.dual_witnesses.iter().map(line).collect::<Vec<_>>(),
        "elementary_screen": elementary_screen(spec, sampler, tol),
        "invariant_field_real": fuchsian.invariant_traces.is_real,
        "invariant_max_imag": fuchsian.invariant_traces.max_imag,
        "certificate": fuchsian.certificate.as_ref().map(CertificateOut::from),
    })
}

fn find_lox_report(spec: &GroupSpec, sampler: &WordSampler, tol: &Tolerances) -> Result<serde_json::Value> {
    let found = find_loxodromic(spec, sampler, tol)?;
    let d = loxodromic_data(&found.element, tol)?;
    let (method, parabolic, transversal, power) = match &found.method {
        SearchMethod::Direct => ("Direct", None, None, None),
        SearchMethod::Boosted { parabolic, transversal, power } => {
            ("Boosted", Some(parabolic.clone()), Some(transversal.clone()), Some(*power))
        }
    };
    Ok(serde_json::json!({
        "word": found.word,
        "method": method,
        "parabolic": parabolic,
        "transversal": transversal,
        "power": power,
        "trace": found.element.trace(),
        "lambda": d.lambda,
        "phi": d.phi,
        "searched": found.searched,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group_text(name: &str) -> String {
        run(Command::Corpus, None, &Options { corpus_name: Some(name.into()), ..Options::default() }).text
    }

    fn opts() -> Options {
        Options { max_length: Some(4), ..Options::default() }
    }

    /// Report text with the timing field zeroed.
    pub(crate) fn untimed(text: &str) -> String {
        let mut r = ReportFile::parse(text).unwrap();
        r.timing_ms = 0.0;
        r.to_json()
    }

    #[test]
    fn group_file_round_trip() {
        let spec = corpus::hidden_so21_spec(2);
        let text = write_group(&spec, None);
        let back = read_group(&text, &Tolerances::default()).unwrap();
        assert_eq!(back.matrices(), spec.matrices());
        assert_eq!(parse_group_file(&text).unwrap(), GroupFile::from_spec(&spec, None));
    }

    #[test]
    fn malformed_inputs_are_usage_errors() {
        let o = run(Command::Classify, Some("{ not json"), &opts());
        assert_eq!(o.exit, Exit::Usage);
        assert_eq!(o.error.unwrap().tag, "ParseError");
        let o = run(Command::Classify, Some(r#"{"format_version": 1, "generators": [], "extra": 1}"#), &opts());
        assert_eq!(o.exit, Exit::Usage);
        let o = run(Command::Classify, Some(r#"{"format_version": 7, "generators": []}"#), &opts());
        assert_eq!(o.exit, Exit::Usage);
        let bad_tol = Options { tolerances: ToleranceOverrides { eps_class: Some(-1.0), ..Default::default() }, ..opts() };
        let o = run(Command::Classify, Some(&group_text("sl2z")), &bad_tol);
        assert_eq!(o.exit, Exit::Usage);
        assert_eq!(o.error.unwrap().tag, "InvalidTolerances");
    }

    #[test]
    fn non_member_names_the_entry() {
        let id = "[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]";
        let bad = "[[[2,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]";
        let text = format!(r#"{{"format_version": 1, "generators": [{id}, {bad}]}}"#);
        for cmd in [Command::Validate, Command::Classify] {
            let o = run(cmd, Some(&text), &opts());
            assert_eq!(o.exit, Exit::Domain);
            let e = o.error.unwrap();
            assert_eq!((e.tag.as_str(), e.generator), ("NotInGroup", Some(1)));
        }
    }

    #[test]
    fn file_settings_apply_below_flags() {
        let mut file = parse_group_file(&group_text("sl2z")).unwrap();
        file.sampler = Some(SamplerConfig { max_length: 3 });
        file.tolerances = Some(ToleranceOverrides { eps_field: Some(1e-6), ..Default::default() });
        let text = serde_json::to_string(&file).unwrap();
        let r = ReportFile::parse(&run(Command::TraceField, Some(&text), &Options::default()).text).unwrap();
        assert_eq!((r.max_length, r.tolerances.eps_field), (3, 1e-6));
        let r = ReportFile::parse(&run(Command::TraceField, Some(&text), &opts()).text).unwrap();
        assert_eq!(r.max_length, 4);
    }

    #[test]
    fn reports_are_deterministic_and_round_trip() {
        let input = group_text("known_field");
        for cmd in [Command::Classify, Command::Realize, Command::Detect, Command::FindLox, Command::TraceField] {
            let a = run(cmd, Some(&input), &opts());
            let b = run(cmd, Some(&input), &opts());
            assert_eq!(untimed(&a.text), untimed(&b.text), "{cmd:?}");
            let parsed = ReportFile::parse(&a.text).unwrap();
            assert_eq!(parsed.to_json(), a.text, "{cmd:?}");
            assert_eq!(ReportFile::parse(&parsed.to_json()).unwrap(), parsed);
            assert_eq!(parsed.input_sha256.unwrap(), input_digest(input.as_bytes()));
        }
    }

    #[test]
    fn command_outcomes() {
        let o = run(Command::Detect, Some(&group_text("so21_hidden")), &Options { assume_discrete: true, ..opts() });
        assert_eq!(o.exit, Exit::Success);
        let r = ReportFile::parse(&o.text).unwrap();
        assert_eq!(r.result.unwrap()["verdict"], "RFuchsian");

        let o = run(Command::So21, Some(&group_text("sl2z")), &opts());
        assert_eq!(o.exit, Exit::Domain);
        assert_eq!(o.error.unwrap().tag, "Reducible");

        let o = run(Command::Classify, Some(&group_text("single_lox")), &opts());
        let r = ReportFile::parse(&o.text).unwrap().result.unwrap();
        assert_eq!(r["generators"][0]["class"], "Loxodromic");
        assert!(r["generators"][0]["lambda"].as_f64().unwrap() > 1.0);
        assert!(r["generators"][0]["phi"].is_number());

        let o = run(Command::Normalize, Some(&group_text("single_lox")), &opts());
        assert_eq!(o.error.unwrap().tag, "InvalidParameter");

        let o = run(Command::Corpus, None, &Options { corpus_name: Some("nope".into()), ..opts() });
        assert_eq!(o.exit, Exit::Domain);
    }

    #[test]
    fn every_corpus_entry_validates() {
        for name in corpus::NAMES {
            let o = run(Command::Validate, Some(&group_text(name)), &opts());
            assert_eq!(o.exit, Exit::Success, "{name}");
        }
    }

    #[test]
    fn certificate_output_round_trips() {
        let spec = corpus::known_field_spec(1);
        let c = realize_over_trace_field(&spec, &WordSampler::with_max_length(4), &Tolerances::default()).unwrap();
        let out = CertificateOut::from(&c);
        let text = serde_json::to_string(&out).unwrap();
        let back: CertificateOut = serde_json::from_str(&text).unwrap();
        assert_eq!(back, out);
    }
}
