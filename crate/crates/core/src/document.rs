//! JSON documents for channels, measurements, decompositions and reports.
//!
//! Complex matrices are written as `{"re": [[..]], "im": [[..]]}` with
//! row-major nested arrays. Floating-point numbers are written with 17
//! significant digits (`{:.16e}`), which parses back to the same binary64
//! value, so `parse ∘ write` is the identity on every document and
//! `write ∘ parse` is the identity on every written file. Non-finite numbers
//! are written as the strings `"NaN"`, `"Infinity"` and `"-Infinity"`.
//!
//! Documents are plain data. Conversions into library types
//! ([`ChannelDocument::to_channel`] and friends) run the same validation as
//! the library constructors and report the offending field on failure.

use std::collections::BTreeMap;
use std::fmt;
use std::io;

use serde::de::{self, DeserializeOwned, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};
use thiserror::Error;

use crate::bargmann::{BargmannReport, HeterodyneOptions};
use crate::channels::{holevo_to_channel, Channel, ChannelError, Ensemble, HolevoForm, KrausForm, Povm};
use crate::criteria::{
    ChannelSearch, EbReport, EbVerdict, JointOutcome, PptResult, QcFactorization, RunConfig, SeparableResult, WitnessSource,
};
use crate::feasibility::{FeasibilityOutcome, Verdict};
use crate::linalg::{ComplexMatrix, HermitianMatrix, LinalgError, C64};
use crate::tolerances::TOL_RECON;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("invalid document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

impl DocumentError {
    fn field(field: impl Into<String>, message: impl fmt::Display) -> Self {
        DocumentError::Field {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

/// A binary64 value that survives JSON even when it is not finite.
#[derive(Clone, Copy, Debug)]
pub struct Real(pub f64);

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits() || (self.0.is_nan() && other.0.is_nan())
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_nan() {
            s.serialize_str("NaN")
        } else if x == f64::INFINITY {
            s.serialize_str("Infinity")
        } else if x == f64::NEG_INFINITY {
            s.serialize_str("-Infinity")
        } else {
            s.serialize_f64(x)
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RealVisitor;
        impl Visitor<'_> for RealVisitor {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"NaN\", \"Infinity\", \"-Infinity\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "NaN" => Ok(Real(f64::NAN)),
                    "Infinity" => Ok(Real(f64::INFINITY)),
                    "-Infinity" => Ok(Real(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(RealVisitor)
    }
}

fn reals(xs: &[f64]) -> Vec<Real> {
    xs.iter().map(|&x| Real(x)).collect()
}

fn floats(xs: &[Real]) -> Vec<f64> {
    xs.iter().map(|x| x.0).collect()
}

/// Writes floats as `{:.16e}` and delegates layout to the inner formatter.
struct FixedDigits<F>(F);

impl<F: Formatter> Formatter for FixedDigits<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn end_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_key(w)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn write_with<T: Serialize, F: Formatter>(value: &T, f: F) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits(f));
    // documents have string keys and no fallible Serialize impls
    value.serialize(&mut ser).expect("documents always serialize");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Single-line JSON.
pub fn to_json<T: Serialize>(value: &T) -> String {
    write_with(value, CompactFormatter)
}

/// Indented JSON.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    write_with(value, PrettyFormatter::new())
}

pub fn from_json<T: DeserializeOwned>(s: &str) -> Result<T, DocumentError> {
    Ok(serde_json::from_str(s)?)
}

/// A complex matrix as separate real and imaginary row arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub re: Vec<Vec<Real>>,
    pub im: Vec<Vec<Real>>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |part: fn(&C64) -> f64| (0..m.rows()).map(|i| m.row(i).iter().map(|z| Real(part(z))).collect()).collect();
        Self {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_matrix(&self, field: &str) -> Result<ComplexMatrix, DocumentError> {
        let rows = self.re.len();
        if self.im.len() != rows {
            return Err(DocumentError::field(field, format!("re has {rows} rows but im has {}", self.im.len())));
        }
        let cols = self.re.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * cols);
        for (i, (r, m)) in self.re.iter().zip(&self.im).enumerate() {
            if r.len() != cols || m.len() != cols {
                return Err(DocumentError::field(field, format!("row {i} does not have {cols} entries")));
            }
            for (a, b) in r.iter().zip(m) {
                if !(a.0.is_finite() && b.0.is_finite()) {
                    return Err(DocumentError::field(field, format!("row {i} has a non-finite entry")));
                }
                data.push(C64::new(a.0, b.0));
            }
        }
        ComplexMatrix::from_vec(rows, cols, data).map_err(|e| DocumentError::field(field, e))
    }

    pub fn to_hermitian(&self, field: &str) -> Result<HermitianMatrix, DocumentError> {
        let m = self.to_matrix(field)?;
        HermitianMatrix::new(m).map_err(|e: LinalgError| DocumentError::field(field, e))
    }
}

fn hermitian_docs(ms: &[HermitianMatrix]) -> Vec<MatrixDoc> {
    ms.iter().map(|m| MatrixDoc::from_matrix(m)).collect()
}

fn hermitians(docs: &[MatrixDoc], field: &str) -> Result<Vec<HermitianMatrix>, DocumentError> {
    docs.iter()
        .enumerate()
        .map(|(i, d)| d.to_hermitian(&format!("{field}[{i}]")))
        .collect()
}

fn channel_err(field: &str) -> impl Fn(ChannelError) -> DocumentError + '_ {
    move |e| DocumentError::field(field, e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// `Tr C = 1`, `Tr_out C = 1/d_in`.
    #[serde(rename = "trace_one")]
    TraceOne,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmDocument {
    pub dim: usize,
    pub effects: Vec<MatrixDoc>,
}

impl PovmDocument {
    pub fn from_povm(p: &Povm) -> Self {
        Self {
            dim: p.dim(),
            effects: hermitian_docs(p.effects()),
        }
    }

    pub fn to_povm(&self, field: &str) -> Result<Povm, DocumentError> {
        let effects = hermitians(&self.effects, &format!("{field}.effects"))?;
        if let Some(i) = effects.iter().position(|e| e.dim() != self.dim) {
            return Err(DocumentError::field(format!("{field}.effects[{i}]"), format!("dimension differs from dim = {}", self.dim)));
        }
        Povm::new(effects).map_err(channel_err(field))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolevoDocument {
    pub povm: PovmDocument,
    pub preparations: Vec<MatrixDoc>,
}

impl HolevoDocument {
    pub fn from_holevo(h: &HolevoForm) -> Self {
        Self {
            povm: PovmDocument::from_povm(h.povm()),
            preparations: hermitian_docs(h.preparations()),
        }
    }

    pub fn to_holevo(&self, field: &str) -> Result<HolevoForm, DocumentError> {
        let povm = self.povm.to_povm(&format!("{field}.povm"))?;
        let preps = hermitians(&self.preparations, &format!("{field}.preparations"))?;
        HolevoForm::new(povm, preps).map_err(channel_err(field))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleDocument {
    pub weights: Vec<Real>,
    pub left: Vec<MatrixDoc>,
    pub right: Vec<MatrixDoc>,
}

impl EnsembleDocument {
    pub fn from_ensemble(e: &Ensemble) -> Self {
        Self {
            weights: reals(e.weights()),
            left: hermitian_docs(e.left_states()),
            right: hermitian_docs(e.right_states()),
        }
    }

    pub fn to_ensemble(&self, field: &str) -> Result<Ensemble, DocumentError> {
        let left = hermitians(&self.left, &format!("{field}.left"))?;
        let right = hermitians(&self.right, &format!("{field}.right"))?;
        Ensemble::new(floats(&self.weights), left, right).map_err(channel_err(field))
    }
}

/// A channel by its trace-one Choi state, optionally with a Kraus or
/// measure-prepare form. Optional forms must reproduce the Choi state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDocument {
    pub dim_in: usize,
    pub dim_out: usize,
    pub normalization: Normalization,
    pub choi: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holevo: Option<HolevoDocument>,
}

impl ChannelDocument {
    pub fn from_channel(c: &Channel) -> Self {
        Self {
            dim_in: c.dim_in(),
            dim_out: c.dim_out(),
            normalization: Normalization::TraceOne,
            choi: MatrixDoc::from_matrix(c.choi()),
            kraus: None,
            holevo: None,
        }
    }

    pub fn with_kraus(mut self, k: &KrausForm) -> Self {
        self.kraus = Some(k.operators().iter().map(MatrixDoc::from_matrix).collect());
        self
    }

    pub fn with_holevo(mut self, h: &HolevoForm) -> Self {
        self.holevo = Some(HolevoDocument::from_holevo(h));
        self
    }

    pub fn to_channel(&self) -> Result<Channel, DocumentError> {
        let choi = self.choi.to_hermitian("choi")?;
        let c = Channel::from_choi(self.dim_in, self.dim_out, choi).map_err(channel_err("choi"))?;
        if self.kraus.is_some() {
            let k = self.kraus_form()?.expect("checked above");
            let other = Channel::from_kraus(&k).map_err(channel_err("kraus"))?;
            check_same(&c, &other, "kraus")?;
        }
        if let Some(h) = self.holevo_form()? {
            let other = holevo_to_channel(&h).map_err(channel_err("holevo"))?;
            check_same(&c, &other, "holevo")?;
        }
        Ok(c)
    }

    pub fn kraus_form(&self) -> Result<Option<KrausForm>, DocumentError> {
        let Some(ops) = &self.kraus else { return Ok(None) };
        let ops = ops
            .iter()
            .enumerate()
            .map(|(i, m)| m.to_matrix(&format!("kraus[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        KrausForm::new(ops).map(Some).map_err(channel_err("kraus"))
    }

    pub fn holevo_form(&self) -> Result<Option<HolevoForm>, DocumentError> {
        self.holevo.as_ref().map(|h| h.to_holevo("holevo")).transpose()
    }
}

fn check_same(c: &Channel, other: &Channel, field: &str) -> Result<(), DocumentError> {
    if other.dim_in() != c.dim_in() || other.dim_out() != c.dim_out() {
        return Err(DocumentError::field(field, "dimensions differ from the Choi state"));
    }
    let dev = (c.choi().as_matrix() - other.choi().as_matrix()).max_abs();
    if dev > TOL_RECON {
        return Err(DocumentError::field(field, format!("differs from the Choi state by {dev:.3e}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeDocument {
    pub verdict: Verdict,
    pub witness: Option<MatrixDoc>,
    pub residual: Real,
    pub iterations: usize,
    pub best_residual: Real,
    pub window_decrease: Option<Real>,
    pub dropped_constraints: usize,
    pub inconsistent: bool,
}

impl OutcomeDocument {
    pub fn from_outcome(o: &FeasibilityOutcome) -> Self {
        Self {
            verdict: o.verdict,
            witness: o.witness.as_ref().map(|w| MatrixDoc::from_matrix(w)),
            residual: Real(o.residual),
            iterations: o.iterations,
            best_residual: Real(o.best_residual),
            window_decrease: o.window_decrease.map(Real),
            dropped_constraints: o.dropped_constraints,
            inconsistent: o.inconsistent,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointDocument {
    pub n: usize,
    pub outcome: OutcomeDocument,
    pub marginal_residuals: Vec<Real>,
    pub trace_residual: Option<Real>,
    pub verified: bool,
}

impl JointDocument {
    pub fn from_joint(j: &JointOutcome) -> Self {
        Self {
            n: j.n,
            outcome: OutcomeDocument::from_outcome(&j.outcome),
            marginal_residuals: reals(&j.marginal_residuals),
            trace_residual: j.trace_residual.map(Real),
            verified: j.verified,
        }
    }
}

/// A post-processing or broadcasting search. `channel` is the witness read
/// as a channel when it passes the channel checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchDocument {
    pub outcome: OutcomeDocument,
    pub source: Option<WitnessSource>,
    pub verified: bool,
    pub channel: Option<ChannelDocument>,
}

impl SearchDocument {
    /// `dims` are the input and output dimensions of the searched channel.
    pub fn from_search(s: &ChannelSearch, dims: (usize, usize)) -> Self {
        let channel = s
            .outcome
            .witness
            .as_ref()
            .and_then(|w| Channel::from_choi(dims.0, dims.1, w.clone()).ok())
            .map(|c| ChannelDocument::from_channel(&c));
        Self {
            outcome: OutcomeDocument::from_outcome(&s.outcome),
            source: s.source,
            verified: s.verified,
            channel,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparableDocument {
    pub ensemble: Option<EnsembleDocument>,
    pub residual: Option<Real>,
    pub iterations: usize,
    pub rejected_by_ppt: bool,
}

impl SeparableDocument {
    pub fn from_result(r: &SeparableResult) -> Self {
        Self {
            ensemble: r.ensemble.as_ref().map(EnsembleDocument::from_ensemble),
            residual: r.residual.map(Real),
            iterations: r.iterations,
            rejected_by_ppt: r.rejected_by_ppt,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QcFactorizationDocument {
    pub k: usize,
    pub povm: PovmDocument,
    pub gamma: ChannelDocument,
    pub alpha: ChannelDocument,
    pub residual: Real,
}

impl QcFactorizationDocument {
    pub fn from_factorization(f: &QcFactorization) -> Self {
        Self {
            k: f.k,
            povm: PovmDocument::from_povm(&f.povm),
            gamma: ChannelDocument::from_channel(&f.gamma),
            alpha: ChannelDocument::from_channel(&f.alpha),
            residual: Real(f.residual),
        }
    }
}

/// Wall-clock seconds per stage. Only written on request, since it breaks
/// byte-identical reruns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timings {
    pub total_seconds: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EbReportDocument {
    pub config: RunConfig,
    pub verdict: EbVerdict,
    pub consistent: bool,
    pub ppt: PptResult,
    pub ppt_confirmation: Option<Real>,
    pub separable: SeparableDocument,
    pub holevo: Option<HolevoDocument>,
    pub holevo_residual: Option<Real>,
    pub joint_feasibility: BTreeMap<usize, JointDocument>,
    pub qc_factorization: Option<QcFactorizationDocument>,
    pub broadcast: Option<SearchDocument>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl EbReportDocument {
    pub fn from_report(r: &EbReport, cfg: &RunConfig, dim_out: usize) -> Self {
        Self {
            config: cfg.clone(),
            verdict: r.verdict,
            consistent: r.consistent,
            ppt: r.ppt,
            ppt_confirmation: r.ppt_confirmation.map(Real),
            separable: SeparableDocument::from_result(&r.separable),
            holevo: r.holevo.as_ref().map(HolevoDocument::from_holevo),
            holevo_residual: r.holevo_residual.map(Real),
            joint_feasibility: r.joint_feasibility.iter().map(|(&n, j)| (n, JointDocument::from_joint(j))).collect(),
            qc_factorization: r.qc_factorization.as_ref().map(QcFactorizationDocument::from_factorization),
            broadcast: r.broadcast.as_ref().map(|b| SearchDocument::from_search(b, (dim_out, dim_out * dim_out))),
            notes: r.notes.clone(),
            timings: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BargmannReportDocument {
    pub cutoff: usize,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub options: HeterodyneOptions,
    pub overcompleteness_error: Real,
    pub closed_form_deviation: Real,
    pub repair_magnitude: Real,
    pub raw_min_eigenvalue: Real,
    pub report: EbReportDocument,
}

impl BargmannReportDocument {
    pub fn from_report(r: &BargmannReport, cfg: &RunConfig) -> Self {
        Self {
            cutoff: r.cutoff,
            radial_nodes: r.radial_nodes,
            angular_nodes: r.angular_nodes,
            options: r.options,
            overcompleteness_error: Real(r.overcompleteness_error),
            closed_form_deviation: Real(r.closed_form_deviation),
            repair_magnitude: Real(r.repair_magnitude),
            raw_min_eigenvalue: Real(r.raw_min_eigenvalue),
            report: EbReportDocument::from_report(&r.report, cfg, r.cutoff + 1),
        }
    }
}

/// Output of a single joint-channel search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointReportDocument {
    pub config: RunConfig,
    pub joint: JointDocument,
}

/// Output of a post-processing or broadcasting search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchReportDocument {
    pub config: RunConfig,
    pub search: SearchDocument,
}

/// Output of a measure-prepare synthesis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolevoReportDocument {
    pub config: RunConfig,
    pub separable: SeparableDocument,
    pub holevo: Option<HolevoDocument>,
    pub holevo_residual: Option<Real>,
}

/// One line of a batch run over a directory of channel documents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchLineDocument {
    pub file: String,
    pub exit_code: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<EbReportDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::random::{random_channel, random_holevo};

    #[test]
    fn numbers_use_seventeen_digits() {
        assert_eq!(to_json(&Real(0.1)), "1.0000000000000001e-1");
        assert_eq!(to_json(&Real(-0.0)), "-0.0000000000000000e0");
        assert_eq!(to_json(&vec![Real(f64::INFINITY), Real(f64::NAN)]), "[\"Infinity\",\"NaN\"]");
    }

    #[test]
    fn reals_round_trip_bitwise() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 5e-324, f64::MAX, f64::MIN_POSITIVE, -0.0] {
            let back: Real = from_json(&to_json(&Real(x))).unwrap();
            assert_eq!(back.0.to_bits(), x.to_bits(), "{x}");
        }
        let inf: Real = from_json("\"-Infinity\"").unwrap();
        assert_eq!(inf.0, f64::NEG_INFINITY);
        assert!(from_json::<Real>("\"inf\"").is_err());
    }

    #[test]
    fn channel_round_trip() {
        let c = random_channel(2, 3, 2, 5).unwrap();
        let doc = ChannelDocument::from_channel(&c);
        let s = to_json_pretty(&doc);
        let back: ChannelDocument = from_json(&s).unwrap();
        assert_eq!(back, doc);
        assert_eq!(to_json_pretty(&back), s);
        assert_eq!(back.to_channel().unwrap(), c);
    }

    #[test]
    fn holevo_block_is_checked_against_choi() {
        let h = random_holevo(2, 2, 3, 1).unwrap();
        let c = holevo_to_channel(&h).unwrap();
        let doc = ChannelDocument::from_channel(&c).with_holevo(&h);
        assert_eq!(doc.to_channel().unwrap(), c);
        assert_eq!(doc.holevo_form().unwrap().unwrap(), h);
        let other = ChannelDocument::from_channel(&Channel::identity(2)).with_holevo(&h);
        let err = other.to_channel().unwrap_err().to_string();
        assert!(err.starts_with("holevo:"), "{err}");
    }

    #[test]
    fn errors_name_the_field() {
        let mut doc = ChannelDocument::from_channel(&Channel::identity(2));
        doc.choi.im[1].pop();
        let err = doc.to_channel().unwrap_err().to_string();
        assert!(err.starts_with("choi: row 1"), "{err}");

        let err = from_json::<ChannelDocument>(r#"{"dim_in": 2, "dim_out": 2, "normalization": "trace_one"}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("choi"), "{err}");
        let s = to_json(&ChannelDocument::from_channel(&Channel::identity(2))).replace("trace_one", "unnormalized");
        assert!(from_json::<ChannelDocument>(&s).unwrap_err().to_string().contains("trace_one"));
    }

    #[test]
    fn invalid_channel_is_rejected() {
        let mut doc = ChannelDocument::from_channel(&Channel::identity(2));
        doc.choi.re[0][0] = Real(0.9);
        assert!(doc.to_channel().unwrap_err().to_string().contains("trace preserving"));
    }
}
