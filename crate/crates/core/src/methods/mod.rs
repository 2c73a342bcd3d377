//! The ten interpolation engines behind one call signature.
//!
//! Alpha-cut methods (`KH`, `KH_STAB`, `VKK`) return a family of cuts, which
//! can represent abnormal conclusions. The remaining methods return a
//! breakpoint set.

mod crf;
mod fripoc;
mod gm;
mod imul;
mod kh;
mod lesfri;
mod maci;
mod profile;
mod scale_move;
mod vkk;

pub use gm::{fpl_correct, interpolate_rule_scm, tfr_scale, InterpolatedRule};
pub use maci::{maci_forward, maci_inverse};
pub use profile::Profile;

use crate::fuzzy::{normalize_levels, uniform_levels, AlphaCut, FuzzyError, FuzzySet, ReferenceMode, DEFAULT_TOL};
use crate::rulebase::{select_flanking, DistanceKind, FlankingPair, Observation, RuleBase, RuleBaseError};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MethodId {
    #[serde(rename = "KH")]
    Kh,
    #[serde(rename = "KH_STAB")]
    KhStab,
    #[serde(rename = "VKK")]
    Vkk,
    #[serde(rename = "MACI")]
    Maci,
    #[serde(rename = "CRF")]
    Crf,
    #[serde(rename = "IMUL")]
    Imul,
    #[serde(rename = "GM")]
    Gm,
    #[serde(rename = "FRIPOC")]
    Fripoc,
    #[serde(rename = "LESFRI")]
    Lesfri,
    #[serde(rename = "SCALE_MOVE")]
    ScaleMove,
}

impl MethodId {
    pub const ALL: [MethodId; 10] = [
        MethodId::Kh,
        MethodId::KhStab,
        MethodId::Vkk,
        MethodId::Maci,
        MethodId::Crf,
        MethodId::Imul,
        MethodId::Gm,
        MethodId::Fripoc,
        MethodId::Lesfri,
        MethodId::ScaleMove,
    ];

    pub fn token(self) -> &'static str {
        match self {
            MethodId::Kh => "KH",
            MethodId::KhStab => "KH_STAB",
            MethodId::Vkk => "VKK",
            MethodId::Maci => "MACI",
            MethodId::Crf => "CRF",
            MethodId::Imul => "IMUL",
            MethodId::Gm => "GM",
            MethodId::Fripoc => "FRIPOC",
            MethodId::Lesfri => "LESFRI",
            MethodId::ScaleMove => "SCALE_MOVE",
        }
    }

    /// Methods whose native output is a family of alpha-cuts.
    pub fn is_alpha_cut_method(self) -> bool {
        matches!(self, MethodId::Kh | MethodId::KhStab | MethodId::Vkk)
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for MethodId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.trim().to_ascii_uppercase().replace('-', "_");
        let alias = match up.as_str() {
            "KH_STABILIZED" | "KHSTAB" => "KH_STAB",
            "SCALEMOVE" | "SCALE&MOVE" => "SCALE_MOVE",
            other => other,
        };
        MethodId::ALL
            .into_iter()
            .find(|m| m.token() == alias)
            .ok_or_else(|| format!("unknown method '{s}'"))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FriError {
    #[error("no pair of rules flanks the observation")]
    NoFlankingRules,
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("method inapplicable: {0}")]
    MethodInapplicable(String),
    #[error("observation has {found} dimensions, rule base has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

impl FriError {
    pub fn code(&self) -> &'static str {
        match self {
            FriError::NoFlankingRules => "NoFlankingRules",
            FriError::DegenerateGeometry(_) => "DegenerateGeometry",
            FriError::MethodInapplicable(_) => "MethodInapplicable",
            FriError::DimensionMismatch { .. } => "DimensionMismatch",
            FriError::Fuzzy(_) => "InvalidSet",
        }
    }
}

impl From<RuleBaseError> for FriError {
    fn from(e: RuleBaseError) -> Self {
        match e {
            RuleBaseError::NoFlankingRules => FriError::NoFlankingRules,
            RuleBaseError::DimensionMismatch { expected, found } => FriError::DimensionMismatch { expected, found },
            RuleBaseError::InvalidTermIndex { .. } => FriError::MethodInapplicable(e.to_string()),
            RuleBaseError::Fuzzy(f) => FriError::Fuzzy(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationConfig {
    /// Cut levels for alpha-cut methods; `None` means the union of the
    /// breakpoint levels of every set involved.
    pub alpha_levels: Option<Vec<f64>>,
    pub dense_levels: usize,
    pub rp_mode: ReferenceMode,
    pub polar_thetas: usize,
    /// Inverse-distance exponent for the least-squares weights.
    pub power_p: f64,
    /// Membership-axis scaling for polar cuts; `None` means the range width.
    pub aspect: Option<f64>,
    pub vkk_distance: DistanceKind,
    /// Weight each consequent by its own distance, as printed, instead of the
    /// inverse distance.
    pub paper_literal_kh: bool,
    /// Use the printed `(RB2 + RB1)` sum in the IMUL core correction.
    pub imul_printed_sum: bool,
    /// Use the printed facing-flank ratios for CRF fuzziness.
    pub crf_facing_flanks: bool,
    pub tol: f64,
}

impl Default for InterpolationConfig {
    fn default() -> Self {
        Self {
            alpha_levels: None,
            dense_levels: 1001,
            rp_mode: ReferenceMode::CoreMid,
            polar_thetas: 181,
            power_p: 2.0,
            aspect: None,
            vkk_distance: DistanceKind::Center,
            paper_literal_kh: false,
            imul_printed_sum: false,
            crf_facing_flanks: false,
            tol: DEFAULT_TOL,
        }
    }
}

impl InterpolationConfig {
    pub fn with_levels(mut self, levels: Vec<f64>) -> Self {
        self.alpha_levels = Some(levels);
        self
    }

    /// Breakpoint levels of the inputs merged with `dense_levels` evenly
    /// spaced levels.
    pub fn dense(&self, rb: &RuleBase, obs: &Observation) -> Vec<f64> {
        let mut levels = rb.breakpoint_levels(Some(obs));
        levels.extend(uniform_levels(self.dense_levels));
        normalize_levels(levels)
    }

    pub(crate) fn levels_for(&self, rb: &RuleBase, obs: &Observation) -> Vec<f64> {
        let mut levels = match &self.alpha_levels {
            Some(l) => l.clone(),
            None => rb.breakpoint_levels(Some(obs)),
        };
        levels.push(0.0);
        levels.push(1.0);
        normalize_levels(levels)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InterpolationWeights {
    pub lambda_core: Option<f64>,
    pub lambda_left: Option<f64>,
    pub lambda_right: Option<f64>,
    pub lambda_rep: Option<f64>,
    /// Per-rule weights `(rule index, weight)` for multi-rule methods.
    pub rule_weights: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzinessDescriptor {
    pub fl: f64,
    pub fu: f64,
    pub core_len: f64,
    pub gap_lower: f64,
    pub gap_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConclusionForm {
    Shape(FuzzySet),
    AlphaFamily(Vec<AlphaCut>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conclusion {
    pub form: ConclusionForm,
    pub method: MethodId,
    pub weights: InterpolationWeights,
    pub notes: Vec<String>,
}

impl Conclusion {
    pub fn shape(method: MethodId, set: FuzzySet, weights: InterpolationWeights) -> Self {
        Self { form: ConclusionForm::Shape(set), method, weights, notes: Vec::new() }
    }

    pub fn family(method: MethodId, cuts: Vec<AlphaCut>, weights: InterpolationWeights) -> Self {
        Self { form: ConclusionForm::AlphaFamily(cuts), method, weights, notes: Vec::new() }
    }

    pub fn as_shape(&self) -> Option<&FuzzySet> {
        match &self.form {
            ConclusionForm::Shape(s) => Some(s),
            ConclusionForm::AlphaFamily(_) => None,
        }
    }

    pub fn as_family(&self) -> Option<&[AlphaCut]> {
        match &self.form {
            ConclusionForm::Shape(_) => None,
            ConclusionForm::AlphaFamily(c) => Some(c),
        }
    }

    /// A breakpoint set equivalent to the conclusion, when one exists.
    /// Families nested up to rounding are snapped to the nearest nested one.
    pub fn to_shape(&self) -> Option<FuzzySet> {
        match &self.form {
            ConclusionForm::Shape(s) => Some(s.clone()),
            ConclusionForm::AlphaFamily(cuts) => {
                // violations below the detection threshold are rounding
                let mut p = Profile::from_cuts(cuts);
                if !p.is_nested(crate::analysis::DETECTION_TOL) {
                    return None;
                }
                p.repair_nesting();
                p.to_set("B*").ok()
            }
        }
    }

    /// Cut interval at `alpha`. Families are linearly interpolated between
    /// stored levels; shapes report the hull of the level set.
    pub fn cut_at(&self, alpha: f64) -> AlphaCut {
        match &self.form {
            ConclusionForm::Shape(s) => level_set_hull(s, alpha),
            ConclusionForm::AlphaFamily(cuts) => interpolate_family(cuts, alpha),
        }
    }

    /// `(lf, lc, rc, rf)` read from the bottom and top cuts, without repair.
    pub fn summary(&self) -> (f64, f64, f64, f64) {
        let bottom = self.cut_at(0.0);
        let top = match &self.form {
            ConclusionForm::Shape(s) => level_set_hull(s, s.height()),
            ConclusionForm::AlphaFamily(c) => *c.last().expect("non-empty family"),
        };
        (bottom.inf, top.inf, top.sup, bottom.sup)
    }
}

/// Interval hull of `{x : mu(x) >= alpha}`; exact for convex sets.
pub fn level_set_hull(set: &FuzzySet, alpha: f64) -> AlphaCut {
    if alpha <= 0.0 {
        let (inf, sup) = set.support();
        return AlphaCut { alpha, inf, sup };
    }
    let pts = set.points();
    let level = alpha.min(set.height());
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    for (i, p) in pts.iter().enumerate() {
        if p.mu >= level {
            inf = inf.min(p.x);
            sup = sup.max(p.x);
        }
        if i + 1 < pts.len() {
            let q = pts[i + 1];
            let (lo, hi) = (p.mu.min(q.mu), p.mu.max(q.mu));
            if lo < level && level < hi {
                let x = p.x + (level - p.mu) / (q.mu - p.mu) * (q.x - p.x);
                inf = inf.min(x);
                sup = sup.max(x);
            }
        }
    }
    AlphaCut { alpha, inf, sup }
}

pub fn interpolate_family(cuts: &[AlphaCut], alpha: f64) -> AlphaCut {
    let first = cuts[0];
    if alpha <= first.alpha {
        return AlphaCut { alpha, ..first };
    }
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if alpha <= b.alpha {
            let t = if b.alpha > a.alpha { (alpha - a.alpha) / (b.alpha - a.alpha) } else { 1.0 };
            return AlphaCut { alpha, inf: a.inf + t * (b.inf - a.inf), sup: a.sup + t * (b.sup - a.sup) };
        }
    }
    AlphaCut { alpha, ..*cuts.last().expect("non-empty family") }
}

/// Antecedent, consequent and observation sets of a flanking pair.
pub(crate) struct Flanked<'a> {
    pub a1: Vec<&'a FuzzySet>,
    pub a2: Vec<&'a FuzzySet>,
    pub obs: Vec<&'a FuzzySet>,
    pub b1: &'a FuzzySet,
    pub b2: &'a FuzzySet,
    pub ranges: Vec<f64>,
}

impl<'a> Flanked<'a> {
    fn new(rb: &'a RuleBase, obs: &'a Observation, pair: FlankingPair) -> Self {
        Self {
            a1: rb.antecedents(pair.lower),
            a2: rb.antecedents(pair.upper),
            obs: obs.sets.iter().collect(),
            b1: rb.consequent(pair.lower),
            b2: rb.consequent(pair.upper),
            ranges: rb.inputs.iter().map(|p| p.width()).collect(),
        }
    }

    pub fn dims(&self) -> usize {
        self.obs.len()
    }

    /// Union of the breakpoint levels of the five sets.
    pub fn levels(&self) -> Vec<f64> {
        let mut l = vec![0.0, 1.0];
        for s in self.a1.iter().chain(&self.a2).chain(&self.obs) {
            l.extend(s.breakpoint_levels());
        }
        l.extend(self.b1.breakpoint_levels());
        l.extend(self.b2.breakpoint_levels());
        normalize_levels(l)
    }
}

/// `sqrt(sum (a_k - b_k)^2)`.
pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Norm ratio `|x* - x1| / |x2 - x1|` clamped to [0, 1]; `fallback` when the
/// denominator vanishes.
pub(crate) fn norm_ratio(obs: &[f64], lo: &[f64], hi: &[f64], fallback: f64, tol: f64) -> f64 {
    let den = euclid(hi, lo);
    if den <= tol {
        return fallback;
    }
    (euclid(obs, lo) / den).clamp(0.0, 1.0)
}

/// Normalised inverse-distance weights `1 / d^p`. A zero distance takes all
/// the weight.
pub(crate) fn inverse_distance_weights(d: &[f64], p: f64, tol: f64) -> Vec<f64> {
    if let Some(i) = d.iter().position(|x| *x <= tol) {
        let mut w = vec![0.0; d.len()];
        w[i] = 1.0;
        return w;
    }
    let raw: Vec<f64> = d.iter().map(|x| x.powf(p).recip()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Weight of every term of a partition for a position `x`.
pub(crate) fn term_weights(
    terms: &[FuzzySet],
    x: f64,
    cfg: &InterpolationConfig,
) -> Result<Vec<f64>, FriError> {
    let d = terms
        .iter()
        .map(|t| t.reference_point(cfg.rp_mode).map(|r| (r - x).abs()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(inverse_distance_weights(&d, cfg.power_p, cfg.tol))
}

/// Shepard weights of every rule from range-normalised reference-point
/// distances, and the resulting consequent reference point.
pub(crate) fn shepard_position(
    rb: &RuleBase,
    obs_rps: &[f64],
    cfg: &InterpolationConfig,
) -> Result<(Vec<f64>, f64), FriError> {
    let mut d = Vec::with_capacity(rb.rules.len());
    for r in 0..rb.rules.len() {
        let mut sq = 0.0;
        for (k, a) in rb.antecedents(r).into_iter().enumerate() {
            let w = rb.inputs[k].width();
            let w = if w > 0.0 { w } else { 1.0 };
            sq += ((a.reference_point(cfg.rp_mode)? - obs_rps[k]) / w).powi(2);
        }
        d.push(sq.sqrt());
    }
    let w = inverse_distance_weights(&d, cfg.power_p, cfg.tol);
    let mut rp = 0.0;
    for (r, wr) in w.iter().enumerate() {
        if *wr > 0.0 {
            rp += wr * rb.consequent(r).reference_point(cfg.rp_mode)?;
        }
    }
    Ok((w, rp))
}

pub(crate) fn exact_match_conclusion(
    method: MethodId,
    rb: &RuleBase,
    obs: &Observation,
    pair: FlankingPair,
    cfg: &InterpolationConfig,
) -> Result<Conclusion, FriError> {
    let b = rb.consequent(pair.lower).clone();
    let weights = InterpolationWeights {
        lambda_core: Some(0.0),
        lambda_left: Some(0.0),
        lambda_right: Some(0.0),
        lambda_rep: Some(0.0),
        rule_weights: vec![(pair.lower, 1.0)],
    };
    let mut c = if method.is_alpha_cut_method() {
        let cuts = cfg
            .levels_for(rb, obs)
            .into_iter()
            .map(|a| b.alpha_cut(a))
            .collect::<Result<Vec<_>, _>>()?;
        Conclusion::family(method, cuts, weights)
    } else {
        Conclusion::shape(method, b.with_label("B*"), weights)
    };
    c.notes.push(format!("observation matches rule {}", pair.lower + 1));
    Ok(c)
}

/// Runs one interpolation method.
pub fn interpolate(
    method: MethodId,
    rb: &RuleBase,
    obs: &Observation,
    cfg: &InterpolationConfig,
) -> Result<Conclusion, FriError> {
    rb.check_observation(obs)?;
    for s in &obs.sets {
        if !s.is_cnf().is_cnf() {
            return Err(FriError::MethodInapplicable(format!("observation set '{}' is not CNF", s.label())));
        }
    }
    let levels = rb.breakpoint_levels(Some(obs));
    let pair = select_flanking(rb, obs, &levels)?;
    match method {
        MethodId::KhStab => return kh::interpolate_kh_stabilized(rb, obs, cfg),
        MethodId::Fripoc => return fripoc::interpolate_fripoc(rb, obs, cfg),
        MethodId::Lesfri => return lesfri::interpolate_lesfri(rb, obs, cfg),
        _ => {}
    }
    if pair.is_exact_match() {
        return exact_match_conclusion(method, rb, obs, pair, cfg);
    }
    let fl = Flanked::new(rb, obs, pair);
    match method {
        MethodId::Kh => kh::interpolate_kh(&fl, &cfg.levels_for(rb, obs), cfg),
        MethodId::Vkk => vkk::interpolate_vkk(&fl, &cfg.levels_for(rb, obs), cfg),
        MethodId::Maci => maci::interpolate_maci(&fl, cfg),
        MethodId::Crf => crf::interpolate_crf(&fl, cfg),
        MethodId::Imul => imul::interpolate_imul(&fl, cfg),
        MethodId::Gm => gm::interpolate_gm(&fl, cfg),
        MethodId::ScaleMove => scale_move::interpolate_scale_move(&fl, cfg),
        MethodId::KhStab | MethodId::Fripoc | MethodId::Lesfri => unreachable!("dispatched above"),
    }
}

pub fn interpolate_kh(rb: &RuleBase, obs: &Observation, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    interpolate(MethodId::Kh, rb, obs, cfg)
}

pub fn interpolate_kh_stabilized(
    rb: &RuleBase,
    obs: &Observation,
    cfg: &InterpolationConfig,
) -> Result<Conclusion, FriError> {
    interpolate(MethodId::KhStab, rb, obs, cfg)
}

pub fn interpolate_vkk(rb: &RuleBase, obs: &Observation, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    interpolate(MethodId::Vkk, rb, obs, cfg)
}

pub fn interpolate_maci(rb: &RuleBase, obs: &Observation, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    interpolate(MethodId::Maci, rb, obs, cfg)
}

pub fn interpolate_crf(rb: &RuleBase, obs: &Observation, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    interpolate(MethodId::Crf, rb, obs, cfg)
}

pub fn interpolate_imul(rb: &RuleBase, obs: &Observation, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    interpolate(MethodId::Imul, rb, obs, cfg)
}

pub fn interpolate_gm(rb: &RuleBase, obs: &Observation, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    interpolate(MethodId::Gm, rb, obs, cfg)
}

pub fn interpolate_fripoc(
    rb: &RuleBase,
    obs: &Observation,
    cfg: &InterpolationConfig,
) -> Result<Conclusion, FriError> {
    interpolate(MethodId::Fripoc, rb, obs, cfg)
}

pub fn interpolate_lesfri(
    rb: &RuleBase,
    obs: &Observation,
    cfg: &InterpolationConfig,
) -> Result<Conclusion, FriError> {
    interpolate(MethodId::Lesfri, rb, obs, cfg)
}

pub fn interpolate_scale_move(
    rb: &RuleBase,
    obs: &Observation,
    cfg: &InterpolationConfig,
) -> Result<Conclusion, FriError> {
    interpolate(MethodId::ScaleMove, rb, obs, cfg)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::rulebase::{LinguisticPartition, Rule};

    pub fn tri(a: f64, b: f64, c: f64) -> FuzzySet {
        FuzzySet::triangular(a, b, c).unwrap()
    }

    pub fn base(a1: FuzzySet, b1: FuzzySet, a2: FuzzySet, b2: FuzzySet, xr: (f64, f64), yr: (f64, f64)) -> RuleBase {
        RuleBase {
            inputs: vec![LinguisticPartition::new("x", xr, vec![a1, a2])],
            output: LinguisticPartition::new("y", yr, vec![b1, b2]),
            rules: vec![Rule::new(vec![0], 0), Rule::new(vec![1], 1)],
        }
    }

    /// Shared S1/I1 rule base.
    pub fn s1_base() -> RuleBase {
        base(
            tri(0.0, 1.0, 2.0),
            tri(20.0, 21.0, 22.0),
            tri(8.0, 9.0, 10.0),
            tri(28.0, 29.0, 30.0),
            (0.0, 10.0),
            (20.0, 30.0),
        )
    }

    pub fn d1_base() -> RuleBase {
        base(tri(0.0, 1.0, 2.0), tri(1.0, 2.0, 4.0), tri(7.0, 9.0, 11.0), tri(8.0, 10.0, 11.0), (0.0, 12.0), (0.0, 12.0))
    }

    pub fn obs(set: FuzzySet) -> Observation {
        Observation::new(vec![set])
    }

    pub fn assert_shape(c: &Conclusion, expected: &FuzzySet, tol: f64) {
        let got = c.to_shape().expect("conclusion has a shape");
        let dev = got.max_membership_deviation(expected, 201);
        assert!(dev <= tol, "{}: got {got}, expected {expected}, deviation {dev}", c.method);
    }
}
