//! Verdicts on conclusions: abnormality, piecewise linearity and a
//! side-by-side comparison of methods.

use crate::fis::ReportRow;
use crate::fuzzy::{normalize_levels, uniform_levels, AlphaCut};
use crate::methods::{interpolate, level_set_hull, Conclusion, ConclusionForm, FriError, InterpolationConfig, MethodId};
use crate::par::{self, Execution};
use crate::rulebase::{Observation, RuleBase};
use serde::{Deserialize, Serialize};

/// Differences below this are rounding noise.
pub const DETECTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// A cut whose lower end lies above its upper end.
    EndpointInversion,
    /// A cut that is not contained in the cut below it.
    NonNestedCuts,
    /// Peak membership below 1.
    NonNormal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbnormalityReport {
    pub abnormal: bool,
    pub first_violation_alpha: Option<f64>,
    pub violation_kind: Option<ViolationKind>,
    /// Largest `inf - sup` over the checked levels, 0 when none inverts.
    pub max_inversion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearityReport {
    pub piecewise_linear: bool,
    pub max_deviation: f64,
    pub worst_alpha: f64,
}

fn native_levels(c: &Conclusion) -> Vec<f64> {
    match &c.form {
        ConclusionForm::AlphaFamily(cuts) => cuts.iter().map(|k| k.alpha).collect(),
        ConclusionForm::Shape(s) => s.breakpoint_levels(),
    }
}

/// Checks a conclusion at its own levels and at `cfg.dense_levels` evenly
/// spaced levels, scanning upwards from 0.
pub fn detect_abnormality(c: &Conclusion, cfg: &InterpolationConfig) -> AbnormalityReport {
    let mut levels = native_levels(c);
    levels.extend(uniform_levels(cfg.dense_levels));
    let levels = normalize_levels(levels);

    let mut first: Option<(f64, ViolationKind)> = None;
    let mut note = |alpha: f64, kind: ViolationKind| {
        if first.is_none_or(|(a, _)| alpha < a) {
            first = Some((alpha, kind));
        }
    };
    let mut max_inversion: f64 = 0.0;

    match &c.form {
        ConclusionForm::AlphaFamily(cuts) => {
            let top = cuts.last().map_or(0.0, |k| k.alpha);
            if top < 1.0 - DETECTION_TOL {
                note(top, ViolationKind::NonNormal);
            }
            let mut prev: Option<AlphaCut> = None;
            for &a in levels.iter().filter(|a| **a <= top) {
                let cut = c.cut_at(a);
                max_inversion = max_inversion.max(cut.inf - cut.sup);
                if cut.inf > cut.sup + DETECTION_TOL {
                    note(a, ViolationKind::EndpointInversion);
                }
                if let Some(p) = prev {
                    if p.inf > cut.inf + DETECTION_TOL || p.sup < cut.sup - DETECTION_TOL {
                        note(a, ViolationKind::NonNestedCuts);
                    }
                }
                prev = Some(cut);
            }
        }
        ConclusionForm::Shape(s) => {
            let h = s.height();
            if h < 1.0 - DETECTION_TOL {
                note(h, ViolationKind::NonNormal);
            }
            for &a in levels.iter().filter(|a| **a > 0.0 && **a <= h) {
                // the level set is an interval iff no breakpoint inside its
                // hull dips below the level
                let hull = level_set_hull(s, a);
                let dips = s.points().iter().any(|p| p.x > hull.inf && p.x < hull.sup && p.mu < a - DETECTION_TOL);
                if dips {
                    note(a, ViolationKind::NonNestedCuts);
                }
            }
        }
    }
    AbnormalityReport {
        abnormal: first.is_some(),
        first_violation_alpha: first.map(|(a, _)| a),
        violation_kind: first.map(|(_, k)| k),
        max_inversion: max_inversion.max(0.0),
    }
}

/// Compares the conclusion evaluated at breakpoint levels only (linearly
/// interpolated in between) with its evaluation at the dense levels.
pub fn check_linearity(
    method: MethodId,
    rb: &RuleBase,
    obs: &Observation,
    cfg: &InterpolationConfig,
) -> Result<LinearityReport, FriError> {
    let sparse_cfg = InterpolationConfig { alpha_levels: None, ..cfg.clone() };
    let sparse = interpolate(method, rb, obs, &sparse_cfg)?;
    let dense_levels = cfg.dense(rb, obs);
    let breakpoints = rb.breakpoint_levels(Some(obs));

    let sparse_cuts: Vec<AlphaCut> = breakpoints.iter().map(|&a| sparse.cut_at(a)).collect();
    let reference: Box<dyn Fn(f64) -> AlphaCut> = match &sparse.form {
        ConclusionForm::AlphaFamily(_) => {
            let dense = interpolate(method, rb, obs, &sparse_cfg.clone().with_levels(dense_levels.clone()))?;
            Box::new(move |a| dense.cut_at(a))
        }
        ConclusionForm::Shape(s) => {
            let s = s.clone();
            Box::new(move |a| level_set_hull(&s, a))
        }
    };
    let mut worst = (0.0f64, 0.0f64);
    for &a in &dense_levels {
        let lin = crate::methods::interpolate_family(&sparse_cuts, a);
        let exact = reference(a);
        let d = (lin.inf - exact.inf).abs().max((lin.sup - exact.sup).abs());
        if d > worst.0 {
            worst = (d, a);
        }
    }
    Ok(LinearityReport { piecewise_linear: worst.0 <= DETECTION_TOL, max_deviation: worst.0, worst_alpha: worst.1 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: MethodId,
    /// `ok` or `error:<code>`.
    pub status: String,
    pub abnormality: Option<AbnormalityReport>,
    pub linearity: Option<LinearityReport>,
    /// `(lf, lc, rc, rf)` of the conclusion.
    pub summary: Option<(f64, f64, f64, f64)>,
    pub conclusion: Option<Conclusion>,
    pub error: Option<String>,
}

impl ComparisonRow {
    pub fn abnormal(&self) -> Option<bool> {
        self.abnormality.as_ref().map(|a| a.abnormal)
    }

    pub fn linear(&self) -> Option<bool> {
        self.linearity.as_ref().map(|l| l.piecewise_linear)
    }

    pub fn to_report_row(&self, example: &str) -> ReportRow {
        let s = self.summary;
        ReportRow {
            example: example.to_string(),
            method: self.method.token().to_string(),
            status: self.status.clone(),
            abnormal: self.abnormal(),
            linear: self.linear(),
            lf: s.map(|s| s.0),
            lc: s.map(|s| s.1),
            rc: s.map(|s| s.2),
            rf: s.map(|s| s.3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComparisonMatrix {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonMatrix {
    pub fn row(&self, method: MethodId) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

/// Runs one method and collects its verdicts; errors become the row status.
pub fn evaluate_method(method: MethodId, rb: &RuleBase, obs: &Observation, cfg: &InterpolationConfig) -> ComparisonRow {
    match interpolate(method, rb, obs, cfg) {
        Ok(c) => ComparisonRow {
            method,
            status: "ok".into(),
            abnormality: Some(detect_abnormality(&c, cfg)),
            linearity: check_linearity(method, rb, obs, cfg).ok(),
            summary: Some(c.summary()),
            conclusion: Some(c),
            error: None,
        },
        Err(e) => ComparisonRow {
            method,
            status: format!("error:{}", e.code()),
            abnormality: None,
            linearity: None,
            summary: None,
            conclusion: None,
            error: Some(e.to_string()),
        },
    }
}

/// Rows come back ordered by method, whatever order `methods` is in.
pub fn compare_methods(rb: &RuleBase, obs: &Observation, methods: &[MethodId], cfg: &InterpolationConfig) -> ComparisonMatrix {
    compare_methods_with(Execution::default(), rb, obs, methods, cfg)
}

pub fn compare_methods_with(
    exec: Execution,
    rb: &RuleBase,
    obs: &Observation,
    methods: &[MethodId],
    cfg: &InterpolationConfig,
) -> ComparisonMatrix {
    let mut ms = methods.to_vec();
    ms.sort();
    ms.dedup();
    ComparisonMatrix { rows: par::map(exec, &ms, |m| evaluate_method(*m, rb, obs, cfg)) }
}
