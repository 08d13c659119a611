//! Scenario files: a JSON description of a space, a partition, `u`, `w`,
//! exponents and the analyses to run, plus the runner that turns one into
//! a [`Report`].
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "space": { "weights": [0.25, 0.25, 0.25, 0.25] },
//!   "partition": { "assignment": [0, 0, 1, 1] },
//!   "u": { "values": [1, 2, 3, 4] },
//!   "p": 2, "q": 2,
//!   "analyses": ["check_same_exponent"]
//! }
//! ```

use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::condexp::{FunctionRule, SpaceFunction};
use crate::criteria::{self, ClassifierReport};
use crate::error::{Error, Result};
use crate::fredholm::{self, SweepRow, SweepVerdict};
use crate::gallery::{self, KernelDef, LaplaceConfig, ProductGrid};
use crate::instances::InstanceGen;
use crate::measure::{
    dyadic_level, BlockRule, MeasureSpace, PartitionAlgebra, PointKind, MAX_DYADIC_DEPTH,
};
use crate::oracle::{self, OracleConfig, OracleValue};
use crate::recognition::{self, AbstractOperator};
use crate::report::{self, number, to_value, Header, Report, SweepLine, Timing};
use crate::weighted::{Codomain, CondOperator, ExponentCase, ExponentPair};

pub const SCHEMA_VERSION: u32 = 1;

/// Every analysis name a scenario may request.
pub const ANALYSES: [&str; 14] = [
    "support_sets",
    "check_same_exponent",
    "classify_cross_exponent",
    "takagi_quantities",
    "ameasurable_equivalences",
    "surjectivity_necessary",
    "kernel_basis",
    "range_analysis",
    "is_invertible",
    "opnorm",
    "min_modulus",
    "reduction",
    "recognize",
    "dichotomy_sweep",
];

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> Complex64 {
        match self {
            Scalar::Real(r) => Complex64::new(r, 0.0),
            Scalar::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueList {
    pub values: Vec<Scalar>,
}

/// Explicit values, or a rule sampled at the unit coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionDef {
    Values(ValueList),
    Rule(FunctionRule),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadicDef {
    /// `2^resolution` cells.
    pub resolution: u32,
    #[serde(default = "unit_mass")]
    pub mass: f64,
}

fn unit_mass() -> f64 {
    1.0
}

/// Either explicit `weights` (with optional `kinds`, default atoms) or a
/// `dyadic` level.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinds: Option<Vec<PointKind>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dyadic: Option<DyadicDef>,
}

/// Either an `assignment` list or a block `rule`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<BlockRule>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDef {
    pub from: u32,
    pub to: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecognizeTarget {
    /// `T f = E(w f)`.
    #[default]
    Expectation,
    /// `T f = k·E(w f)`.
    Weighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecognizeDef {
    /// Row-major matrix on the scenario space; when absent the scenario's
    /// own operator is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Scalar>>>,
    #[serde(default = "default_probes")]
    pub probes: usize,
    #[serde(default)]
    pub target: RecognizeTarget,
}

fn default_probes() -> usize {
    16
}

impl Default for RecognizeDef {
    fn default() -> Self {
        RecognizeDef {
            matrix: None,
            probes: default_probes(),
            target: RecognizeTarget::default(),
        }
    }
}

/// Fault injection for exercising the audit path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corruption {
    /// Added to the rank recorded in every classifier report.
    #[serde(default)]
    pub rank_offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub space: SpaceDef,
    pub partition: PartitionDef,
    pub u: FunctionDef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<FunctionDef>,
    pub p: f64,
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<Codomain>,
    #[serde(default)]
    pub analyses: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recognize: Option<RecognizeDef>,
    #[serde(default)]
    pub strict_oracle: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrupt: Option<Corruption>,
}

/// Caller-side settings that override the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub strict_oracle: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    /// Instance-scope claims that failed.
    pub audit_failures: Vec<String>,
    /// Oracle values reported as unconfirmed bounds.
    pub oracle_flags: Vec<String>,
    pub strict_oracle: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub outcome: Outcome,
    pub levels: Vec<(u32, Report)>,
    pub csv: String,
    pub verdict: SweepVerdict,
}

fn path_string(path: &serde_path_to_error::Path) -> String {
    let s = path.to_string();
    if s == "." {
        "scenario".into()
    } else {
        s
    }
}

impl FunctionDef {
    fn build(&self, space: &MeasureSpace, field: &str) -> Result<SpaceFunction> {
        let f = match self {
            FunctionDef::Values(list) => {
                if list.values.len() != space.len() {
                    return Err(Error::validation(
                        format!("{field}.values"),
                        format!("expected {} values, got {}", space.len(), list.values.len()),
                    ));
                }
                SpaceFunction::new(list.values.iter().map(|s| s.value()).collect())
            }
            FunctionDef::Rule(rule) => rule.sample(space),
        };
        if let Some(i) = f
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            let path = match self {
                FunctionDef::Values(_) => format!("{field}.values[{i}]"),
                FunctionDef::Rule(_) => field.to_string(),
            };
            return Err(Error::validation(path, "value is not finite"));
        }
        Ok(f)
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::validation(path_string(e.path()), e.inner().to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::validation("scenario", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(&to_value(self)).expect("scenarios are plain data");
        s.push('\n');
        s
    }

    /// Checks every field and reports the first problem with its path.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::validation(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        match (&self.space.weights, &self.space.dyadic) {
            (Some(weights), None) => {
                if weights.is_empty() {
                    return Err(Error::validation(
                        "space.weights",
                        "needs at least one point",
                    ));
                }
                if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::validation(
                        format!("space.weights[{i}]"),
                        format!("weight must be positive and finite, got {}", weights[i]),
                    ));
                }
                if let Some(kinds) = &self.space.kinds {
                    if kinds.len() != weights.len() {
                        return Err(Error::validation(
                            "space.kinds",
                            format!("expected {} kinds, got {}", weights.len(), kinds.len()),
                        ));
                    }
                }
            }
            (None, Some(d)) => {
                if self.space.kinds.is_some() {
                    return Err(Error::validation(
                        "space.kinds",
                        "dyadic spaces are all cells",
                    ));
                }
                if d.resolution > MAX_DYADIC_DEPTH + 1 {
                    return Err(Error::validation(
                        "space.dyadic.resolution",
                        format!("at most {}", MAX_DYADIC_DEPTH + 1),
                    ));
                }
                if !(d.mass.is_finite() && d.mass > 0.0) {
                    return Err(Error::validation("space.dyadic.mass", "must be positive"));
                }
            }
            _ => {
                return Err(Error::validation(
                    "space",
                    "give exactly one of `weights` or `dyadic`",
                ));
            }
        }
        if self.partition.assignment.is_some() == self.partition.rule.is_some() {
            return Err(Error::validation(
                "partition",
                "give exactly one of `assignment` or `rule`",
            ));
        }
        for (field, value) in [("p", self.p), ("q", self.q)] {
            if !(value.is_finite() && value > 1.0) {
                return Err(Error::validation(
                    field,
                    format!("exponent must lie in (1, ∞), got {value}"),
                ));
            }
        }
        for (i, name) in self.analyses.iter().enumerate() {
            if !ANALYSES.contains(&name.as_str()) {
                return Err(Error::validation(
                    format!("analyses[{i}]"),
                    format!(
                        "unknown analysis `{name}`; available: {}",
                        ANALYSES.join(", ")
                    ),
                ));
            }
        }
        if let Some(s) = &self.sweep {
            check_levels(s.from, s.to, "sweep")?;
        }
        if let Some(r) = &self.recognize {
            if r.probes == 0 {
                return Err(Error::validation("recognize.probes", "must be at least 1"));
            }
        }
        // Builds the operator once so shape problems surface here.
        self.operator_at(None)?;
        Ok(())
    }

    pub fn exponents(&self) -> Result<ExponentPair> {
        ExponentPair::new(self.p, self.q).map_err(|e| Error::validation("p", e.to_string()))
    }

    fn space_at(&self, resolution: Option<u32>) -> Result<(MeasureSpace, PartitionAlgebra)> {
        let space = match (&self.space.weights, &self.space.dyadic, resolution) {
            (_, Some(d), r) => {
                let level = dyadic_level(r.unwrap_or(d.resolution), d.mass, BlockRule::Singletons)
                    .map_err(|e| Error::validation("space.dyadic", e.to_string()))?;
                level.space
            }
            (Some(weights), None, None) => {
                let kinds = self
                    .space
                    .kinds
                    .clone()
                    .unwrap_or_else(|| vec![PointKind::Atom; weights.len()]);
                MeasureSpace::new(weights.clone(), kinds)
                    .map_err(|e| Error::validation("space", e.to_string()))?
            }
            (Some(_), None, Some(_)) => {
                return Err(Error::validation("space", "levels need a `dyadic` space"));
            }
            (None, None, _) => return Err(Error::validation("space", "missing")),
        };
        let partition = match (&self.partition.assignment, self.partition.rule) {
            (Some(a), _) => {
                if a.len() != space.len() {
                    return Err(Error::validation(
                        "partition.assignment",
                        format!("expected {} entries, got {}", space.len(), a.len()),
                    ));
                }
                PartitionAlgebra::new(&space, a)
                    .map_err(|e| Error::validation("partition.assignment", e.to_string()))?
            }
            (None, Some(rule)) => rule
                .apply(&space)
                .map_err(|e| Error::validation("partition.rule", e.to_string()))?,
            (None, None) => return Err(Error::validation("partition", "missing")),
        };
        Ok((space, partition))
    }

    /// The operator at the declared space, or at another dyadic resolution.
    pub fn operator_at(&self, resolution: Option<u32>) -> Result<CondOperator> {
        let (space, partition) = self.space_at(resolution)?;
        let u = self.u.build(&space, "u")?;
        let w = match &self.w {
            Some(def) => def.build(&space, "w")?,
            None => SpaceFunction::ones(space.len()),
        };
        let exponents = self.exponents()?;
        match self.codomain {
            Some(c) => CondOperator::new(space, partition, u, w, exponents, c)
                .map_err(|e| Error::validation("codomain", e.to_string())),
            None => CondOperator::with_default_codomain(space, partition, u, w, exponents)
                .map_err(|e| Error::validation("w", e.to_string())),
        }
    }

    fn resolved_config(&self, opts: &RunOptions) -> OracleConfig {
        let mut cfg = self.oracle.clone().unwrap_or_default();
        cfg.seed = opts.seed.or(self.seed).unwrap_or(cfg.seed);
        cfg
    }

    /// Runs every requested analysis.
    pub fn run(&self, opts: &RunOptions) -> Result<Outcome> {
        self.validate()?;
        let cfg = self.resolved_config(opts);
        let op = self.operator_at(None)?;
        let mut header = Header::now();
        let mut acc = Accumulator::default();
        let mut results = Vec::new();
        for name in &self.analyses {
            let start = Instant::now();
            let result = self.analysis(name, &op, &cfg, &mut acc)?;
            header.timings.push(Timing {
                step: name.clone(),
                millis: start.elapsed().as_secs_f64() * 1e3,
            });
            results.push(json!({ "analysis": name, "result": result }));
        }
        let body = json!({
            "seed": cfg.seed,
            "scenario": to_value(self),
            "results": results,
            "summary": acc.summary(),
        });
        Ok(acc.finish(
            Report::new(header, body),
            opts.strict_oracle || self.strict_oracle,
        ))
    }

    fn classifier_operator(&self, op: &CondOperator, notes: &mut Vec<String>) -> CondOperator {
        if op.is_em_u() {
            op.clone()
        } else {
            notes.push("classified through the reduced operator E M_v".into());
            op.reduced()
        }
    }

    fn corrupt(&self, report: &mut ClassifierReport) {
        if let Some(c) = &self.corrupt {
            if c.rank_offset > 0 {
                report.rank += c.rank_offset;
                report.reevaluate();
                report
                    .notes
                    .push(format!("rank corrupted by +{}", c.rank_offset));
            }
        }
    }

    fn classifier(
        &self,
        mut report: ClassifierReport,
        notes: Vec<String>,
        acc: &mut Accumulator,
    ) -> Value {
        self.corrupt(&mut report);
        report.notes.extend(notes);
        acc.failures.extend(report.audit_failures());
        if report.oracle_flagged {
            acc.flags
                .push(format!("{}: bounded-below constant", report.classifier));
        }
        classifier_value(&report)
    }

    fn analysis(
        &self,
        name: &str,
        op: &CondOperator,
        cfg: &OracleConfig,
        acc: &mut Accumulator,
    ) -> Result<Value> {
        let as_validation = |e: Error| match e {
            Error::Validation { .. } => e,
            other => Error::validation(format!("analyses[{name}]"), other.to_string()),
        };
        let mut notes = Vec::new();
        Ok(match name {
            "support_sets" => to_value(&criteria::support_sets(
                &self.classifier_operator(op, &mut notes),
            )),
            "check_same_exponent" => {
                let cop = self.classifier_operator(op, &mut notes);
                let r = criteria::check_same_exponent(&cop, cfg).map_err(as_validation)?;
                self.classifier(r, notes, acc)
            }
            "classify_cross_exponent" => {
                let cop = self.classifier_operator(op, &mut notes);
                let r = criteria::classify_cross_exponent(&cop, op.exponents().case(), cfg)
                    .map_err(as_validation)?;
                self.classifier(r, notes, acc)
            }
            "ameasurable_equivalences" => {
                let cop = self.classifier_operator(op, &mut notes);
                let r = criteria::ameasurable_equivalences(&cop, cfg).map_err(as_validation)?;
                self.classifier(r, notes, acc)
            }
            "takagi_quantities" => {
                let cop = self.classifier_operator(op, &mut notes);
                to_value(&criteria::takagi_quantities(&cop).map_err(as_validation)?)
            }
            "surjectivity_necessary" => {
                let cop = self.classifier_operator(op, &mut notes);
                let r = criteria::surjectivity_necessary(&cop, cfg).map_err(as_validation)?;
                for w in r.witnesses.iter().filter(|w| !w.certified) {
                    acc.failures.push(format!(
                        "surjectivity_necessary: block {} distance {} differs from its norm {}",
                        w.block, w.distance, w.indicator_norm
                    ));
                }
                to_value(&r)
            }
            "kernel_basis" => {
                let basis = fredholm::kernel_basis(op, cfg);
                json!({ "dim": basis.len(), "basis": basis })
            }
            "range_analysis" => {
                let r = fredholm::range_analysis(op, cfg);
                if let Some(a) = &r.adjoint_check {
                    if !a.agrees {
                        acc.failures.push(format!(
                            "range_analysis: codim {} differs from dim N(T*) {}",
                            a.sigma_codim, a.adjoint_kernel_dim
                        ));
                    }
                }
                to_value(&r)
            }
            "is_invertible" => {
                let (invertible, bounded_below) =
                    fredholm::is_invertible(op, cfg).map_err(as_validation)?;
                json!({ "invertible": invertible, "bounded_below": number(bounded_below) })
            }
            "opnorm" => {
                let v = op.opnorm_pq(cfg);
                if v.flagged {
                    acc.flags.push("opnorm".into());
                }
                oracle_value(&v)
            }
            "min_modulus" => {
                let v = oracle::min_modulus(&op.matrix(), op.exponents(), true, cfg);
                if v.flagged {
                    acc.flags.push("min_modulus".into());
                }
                oracle_value(&v)
            }
            "reduction" => reduction_check(op, cfg.seed, acc),
            "recognize" => self.recognize_value(op, cfg.seed)?,
            "dichotomy_sweep" => {
                let s = self.sweep.ok_or_else(|| {
                    Error::validation("sweep", "dichotomy_sweep needs a `sweep` range")
                })?;
                let (lines, verdict) = self.sweep_lines(s.from, s.to, cfg, acc)?;
                let rows: Vec<&SweepRow> = lines.iter().map(|l| &l.row).collect();
                json!({ "rows": to_value(&rows), "verdict": verdict })
            }
            other => {
                return Err(Error::validation(
                    "analyses",
                    format!(
                        "unknown analysis `{other}`; available: {}",
                        ANALYSES.join(", ")
                    ),
                ))
            }
        })
    }

    fn recognize_value(&self, op: &CondOperator, seed: u64) -> Result<Value> {
        let def = self.recognize.clone().unwrap_or_default();
        let n = op.space().len();
        let t = match &def.matrix {
            Some(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::validation(
                        "recognize.matrix",
                        format!("expected a {n}×{n} matrix"),
                    ));
                }
                let m = DMatrix::from_fn(n, n, |x, y| rows[x][y].value());
                AbstractOperator::new(op.space().clone(), m)?
            }
            None => AbstractOperator::from_operator(op),
        };
        let hypotheses = recognition::verify_projection_hypotheses(&t, def.probes, seed)?;
        let recovered = match def.target {
            RecognizeTarget::Expectation => recognition::recover_structure(&t),
            RecognizeTarget::Weighted => recognition::recover_two_sided(&t),
        };
        let (verdict, structure, reason) = match recovered {
            Ok(s) => ("conditional-type", to_value(&s), Value::Null),
            Err(Error::NotConditionalType(why)) => {
                ("not-conditional-type", Value::Null, Value::from(why))
            }
            Err(Error::Precondition(why)) => ("precondition-failed", Value::Null, Value::from(why)),
            Err(e) => return Err(e),
        };
        Ok(json!({
            "hypotheses": to_value(&hypotheses),
            "failed_hypotheses": hypotheses.failed(),
            "verdict": verdict,
            "structure": structure,
            "reason": reason,
        }))
    }

    fn sweep_lines(
        &self,
        from: u32,
        to: u32,
        cfg: &OracleConfig,
        acc: &mut Accumulator,
    ) -> Result<(Vec<SweepLine>, SweepVerdict)> {
        check_levels(from, to, "sweep")?;
        if self.space.dyadic.is_none() {
            return Err(Error::validation("space", "sweeps need a `dyadic` space"));
        }
        for (field, def) in [("u", Some(&self.u)), ("w", self.w.as_ref())] {
            if let Some(FunctionDef::Values(_)) = def {
                return Err(Error::validation(
                    field,
                    "sweeps need a rule, not a value list",
                ));
            }
        }
        let lines = (from..=to)
            .into_par_iter()
            .map(|resolution| {
                let op = self.operator_at(Some(resolution))?;
                let report = fredholm::range_analysis(&op, cfg);
                let cop = if op.is_em_u() {
                    op.clone()
                } else {
                    op.reduced()
                };
                let sets = criteria::support_sets(&cop);
                let v = cop.v_weight();
                let delta = sets.s_v.iter().map(|&x| v[x].re).reduce(f64::min);
                let takagi_b = match op.exponents().case() {
                    ExponentCase::Same => None,
                    _ => Some(criteria::takagi_quantities(&cop)?.b),
                };
                Ok(SweepLine {
                    row: SweepRow { resolution, report },
                    delta,
                    takagi_b,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for l in &lines {
            if let Some(a) = l.row.report.adjoint_check.as_ref().filter(|a| !a.agrees) {
                acc.failures.push(format!(
                    "level {}: codim {} differs from dim N(T*) {}",
                    l.row.resolution, a.sigma_codim, a.adjoint_kernel_dim
                ));
            }
        }
        let rows: Vec<SweepRow> = lines.iter().map(|l| l.row.clone()).collect();
        Ok((lines, fredholm::sweep_verdict(&rows)))
    }

    /// Runs the scenario at each dyadic resolution in `levels` (or the
    /// file's `sweep` range): one report per level, a summary report and a
    /// CSV table.
    pub fn run_sweep(&self, levels: Option<(u32, u32)>, opts: &RunOptions) -> Result<SweepOutcome> {
        self.validate()?;
        let (from, to) = levels
            .or(self.sweep.map(|s| (s.from, s.to)))
            .ok_or_else(|| Error::validation("sweep", "no level range given"))?;
        let cfg = self.resolved_config(opts);
        let mut acc = Accumulator::default();
        let mut header = Header::now();
        let start = Instant::now();
        let (lines, verdict) = self.sweep_lines(from, to, &cfg, &mut acc)?;
        header.timings.push(Timing {
            step: "sweep".into(),
            millis: start.elapsed().as_secs_f64() * 1e3,
        });
        let level_body = |l: &SweepLine| {
            json!({
                "seed": cfg.seed,
                "level": l.row.resolution,
                "fredholm": to_value(&l.row.report),
                "delta": l.delta.map(number),
                "takagi_b": l.takagi_b.map(number),
            })
        };
        let levels: Vec<(u32, Report)> = lines
            .iter()
            .map(|l| (l.row.resolution, Report::new(header.clone(), level_body(l))))
            .collect();
        let mut csv = Vec::new();
        report::sweep_csv(&mut csv, &lines, verdict)?;
        let body = json!({
            "seed": cfg.seed,
            "scenario": to_value(self),
            "levels": lines.iter().map(level_body).collect::<Vec<_>>(),
            "verdict": verdict,
            "summary": acc.summary(),
        });
        let outcome = acc.finish(
            Report::new(header, body),
            opts.strict_oracle || self.strict_oracle,
        );
        Ok(SweepOutcome {
            outcome,
            levels,
            csv: String::from_utf8(csv).expect("CSV output is UTF-8"),
            verdict,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Demo {
    Product,
    Kernel,
    Laplace,
    Convolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoParams {
    /// Decay rate of `e^{−at}` in the Laplace demo.
    pub a: f64,
    pub probes: Vec<f64>,
    pub laplace: LaplaceConfig,
    /// Grid size (product), node count (kernel), or group order
    /// (convolution).
    pub n: usize,
}

impl Default for DemoParams {
    fn default() -> Self {
        DemoParams {
            a: 1.0,
            probes: vec![0.5, 1.0, 2.0],
            laplace: LaplaceConfig::default(),
            n: 8,
        }
    }
}

/// Runs one gallery demo; the body depends only on the parameters and
/// the seed.
pub fn run_demo(demo: Demo, params: &DemoParams, seed: u64) -> Result<Report> {
    if params.n < 2 {
        return Err(Error::validation("n", "needs at least 2"));
    }
    let mut header = Header::now();
    let start = Instant::now();
    let mut gen = InstanceGen::new(seed);
    let result = match demo {
        Demo::Product => {
            let g = ProductGrid::trapezoid((0.0, 1.0), params.n, (0.0, 1.0), 1000)?;
            let xt = g.column_values(&g.sample(|x, t| x * t))?;
            let xt_error = g
                .x_nodes
                .iter()
                .zip(&xt)
                .map(|(x, v)| (v.re - x / 2.0).abs())
                .fold(0.0, f64::max);
            let measurable = g.sample(|x, _| x * x);
            let fixed_point_error = gallery::product_condexp(&g, &measurable)?
                .sub(&measurable)
                .max_abs();
            let s = ProductGrid::trapezoid((0.0, 1.0), 1, (0.0, std::f64::consts::PI), 1000)?;
            let sin = s.column_values(&s.sample(|_, t| t.sin()))?;
            json!({
                "x_times_t": { "columns": xt.iter().map(|v| v.re).collect::<Vec<_>>(), "expected": "x/2", "max_error": xt_error },
                "measurable_fixed_point_error": fixed_point_error,
                "sin_average": { "value": sin[0].re, "expected": 2.0 / std::f64::consts::PI, "y_normalization": s.y_normalization },
            })
        }
        Demo::Kernel => {
            let n = params.n;
            let f: Vec<f64> = (0..n).map(|_| gen.uniform(-1.0, 1.0)).collect();
            let constant = gallery::kernel_as_condexp(
                &KernelDef::Table {
                    values: vec![vec![1.0; n]; 3],
                    y_weights: vec![1.0 / n as f64; n],
                },
                &f,
            )?;
            let table = KernelDef::Table {
                values: (0..n)
                    .map(|_| (0..n).map(|_| gen.uniform(-1.0, 1.0)).collect())
                    .collect(),
                y_weights: (0..n).map(|_| gen.uniform(0.1, 1.0)).collect(),
            };
            let random = gallery::kernel_as_condexp(&table, &f)?;
            json!({
                "constant_kernel": to_value(&constant),
                "mean_of_f": f.iter().sum::<f64>() / n as f64,
                "random_table": to_value(&random),
            })
        }
        Demo::Laplace => to_value(&gallery::laplace_demo(
            params.a,
            &params.probes,
            &params.laplace,
        )?),
        Demo::Convolution => {
            let n = params.n;
            let mut delta = vec![0.0; n];
            delta[0] = 1.0;
            let f: Vec<f64> = (0..n).map(|_| gen.uniform(-1.0, 1.0)).collect();
            let identity = gallery::kernel_as_condexp(&KernelDef::Convolution { w: delta }, &f)?;
            let w: Vec<f64> = (0..n).map(|_| gen.uniform(-1.0, 1.0)).collect();
            let random = gallery::kernel_as_condexp(&KernelDef::Convolution { w: w.clone() }, &f)?;
            json!({
                "f": f,
                "delta_kernel": to_value(&identity),
                "w": w,
                "random_kernel": to_value(&random),
            })
        }
    };
    header.timings.push(Timing {
        step: format!("demo {}", to_value(&demo).as_str().unwrap_or("?")),
        millis: start.elapsed().as_secs_f64() * 1e3,
    });
    Ok(Report::new(
        header,
        json!({ "seed": seed, "demo": demo, "params": to_value(params), "result": result }),
    ))
}

fn check_levels(from: u32, to: u32, path: &str) -> Result<()> {
    if from > to {
        return Err(Error::validation(
            path,
            format!("empty level range {from}..{to}"),
        ));
    }
    if to > MAX_DYADIC_DEPTH + 1 {
        return Err(Error::validation(
            format!("{path}.to"),
            format!("at most {}", MAX_DYADIC_DEPTH + 1),
        ));
    }
    Ok(())
}

#[derive(Default)]
struct Accumulator {
    failures: Vec<String>,
    flags: Vec<String>,
}

impl Accumulator {
    fn summary(&self) -> Value {
        json!({ "audit_failures": self.failures, "oracle_flags": self.flags })
    }

    fn finish(self, report: Report, strict_oracle: bool) -> Outcome {
        Outcome {
            report,
            audit_failures: self.failures,
            oracle_flags: self.flags,
            strict_oracle,
        }
    }
}

impl Outcome {
    /// 0 on success, 3 for audit failures when `audit` is set, 4 for an
    /// oracle flag under strict mode.
    pub fn exit_code(&self, audit: bool) -> i32 {
        if audit && !self.audit_failures.is_empty() {
            3
        } else if self.strict_oracle && !self.oracle_flags.is_empty() {
            4
        } else {
            0
        }
    }
}

fn classifier_value(r: &ClassifierReport) -> Value {
    let mut v = to_value(r);
    // `bounded_below` may be infinite only through the vacuous case, which
    // is already `None`; the remaining floats are finite.
    if let Some(t) = &r.takagi {
        v["takagi"]["b"] = number(t.b);
        v["takagi"]["norm_membership"] = number(t.norm_membership);
    }
    v
}

fn oracle_value(v: &OracleValue) -> Value {
    json!({
        "value": number(v.value),
        "tightness": v.tightness,
        "agreeing_restarts": v.agreeing_restarts,
        "flagged": v.flagged,
        "certificate": v.certificate,
    })
}

/// `‖M_w E M_u f‖_q` against `‖E M_v f‖_q` on seeded probes.
fn reduction_check(op: &CondOperator, seed: u64, acc: &mut Accumulator) -> Value {
    let reduced = op.reduced();
    let q = op.exponents().q;
    let mut gen = InstanceGen::new(seed);
    let n = op.space().len();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = gen.complex_function(n);
        let a = op.lp_norm(&op.apply(&f).expect("same space"), q);
        let b = reduced.lp_norm(&reduced.apply(&f).expect("same space"), q);
        let scale = a.abs().max(b.abs());
        if scale > 0.0 {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    if worst > 1e-10 {
        acc.failures
            .push(format!("reduction: norms differ by {worst:e} (relative)"));
    }
    json!({ "v": reduced.u(), "probes": 20, "max_relative_difference": worst })
}
