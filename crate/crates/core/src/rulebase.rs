//! Rules, linguistic partitions, observations and flanking-rule selection.

use crate::fuzzy::{less_than_tol, normalize_levels, FuzzyError, FuzzySet, ReferenceMode, DEFAULT_TOL};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuleBaseError {
    #[error("expected {expected} dimensions, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no pair of rules flanks the observation")]
    NoFlankingRules,
    #[error("rule {rule} references term {term} which does not exist in {partition}")]
    InvalidTermIndex { rule: usize, term: usize, partition: String },
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticPartition {
    pub name: String,
    pub range: (f64, f64),
    pub terms: Vec<FuzzySet>,
}

impl LinguisticPartition {
    pub fn new(name: impl Into<String>, range: (f64, f64), terms: Vec<FuzzySet>) -> Self {
        Self { name: name.into(), range, terms }
    }

    pub fn width(&self) -> f64 {
        self.range.1 - self.range.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    /// Zero-based term index per input dimension.
    pub antecedents: Vec<usize>,
    pub consequent: usize,
    pub weight: f64,
}

impl Rule {
    pub fn new(antecedents: Vec<usize>, consequent: usize) -> Self {
        Self { antecedents, consequent, weight: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleBase {
    pub inputs: Vec<LinguisticPartition>,
    pub output: LinguisticPartition,
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub sets: Vec<FuzzySet>,
}

impl Observation {
    pub fn new(sets: Vec<FuzzySet>) -> Self {
        Self { sets }
    }

    pub fn dims(&self) -> usize {
        self.sets.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlankingPair {
    /// Index into `RuleBase::rules`.
    pub lower: usize,
    pub upper: usize,
}

impl FlankingPair {
    pub fn is_exact_match(&self) -> bool {
        self.lower == self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistancePair {
    pub d_lower: f64,
    pub d_upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DistanceKind {
    EuclideanEndpoints,
    #[default]
    Center,
    ReferencePoint,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub cnf_violations: Vec<String>,
    pub ordering_violations: Vec<String>,
    pub duplicate_antecedents: Vec<String>,
    pub structural: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.cnf_violations.is_empty()
            && self.ordering_violations.is_empty()
            && self.duplicate_antecedents.is_empty()
            && self.structural.is_empty()
    }

    pub fn issues(&self) -> impl Iterator<Item = &String> {
        self.structural
            .iter()
            .chain(&self.cnf_violations)
            .chain(&self.ordering_violations)
            .chain(&self.duplicate_antecedents)
    }
}

impl RuleBase {
    pub fn dims(&self) -> usize {
        self.inputs.len()
    }

    pub fn antecedent(&self, rule: usize, dim: usize) -> &FuzzySet {
        &self.inputs[dim].terms[self.rules[rule].antecedents[dim]]
    }

    pub fn consequent(&self, rule: usize) -> &FuzzySet {
        &self.output.terms[self.rules[rule].consequent]
    }

    pub fn antecedents(&self, rule: usize) -> Vec<&FuzzySet> {
        (0..self.dims()).map(|d| self.antecedent(rule, d)).collect()
    }

    /// Every set of the base plus the observation contributes its breakpoint
    /// levels; the result always contains 0 and 1.
    pub fn breakpoint_levels(&self, obs: Option<&Observation>) -> Vec<f64> {
        let mut levels = vec![0.0, 1.0];
        for p in self.inputs.iter().chain(std::iter::once(&self.output)) {
            for t in &p.terms {
                levels.extend(t.breakpoint_levels());
            }
        }
        if let Some(o) = obs {
            for s in &o.sets {
                levels.extend(s.breakpoint_levels());
            }
        }
        normalize_levels(levels)
    }

    pub fn check_observation(&self, obs: &Observation) -> Result<(), RuleBaseError> {
        if obs.dims() != self.dims() {
            return Err(RuleBaseError::DimensionMismatch { expected: self.dims(), found: obs.dims() });
        }
        Ok(())
    }
}

fn cnf_issue(set: &FuzzySet, what: &str) -> Option<String> {
    let r = set.is_cnf();
    if r.is_cnf() {
        return None;
    }
    let mut flaws = Vec::new();
    if !r.normal {
        flaws.push("not normal");
    }
    if !r.convex {
        flaws.push("not convex");
    }
    if !r.bounded {
        flaws.push("unbounded");
    }
    Some(format!("{what}: {}", flaws.join(", ")))
}

fn check_partition(p: &LinguisticPartition, levels: &[f64], report: &mut ValidationReport) {
    // written negated so NaN bounds are rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(p.range.0 < p.range.1) {
        report.structural.push(format!("partition {}: empty range", p.name));
    }
    for (i, t) in p.terms.iter().enumerate() {
        let what = format!("partition {} term {} ({})", p.name, i + 1, t.label());
        if let Some(issue) = cnf_issue(t, &what) {
            report.cnf_violations.push(issue);
        }
        let (lo, hi) = t.support();
        if lo < p.range.0 - DEFAULT_TOL || hi > p.range.1 + DEFAULT_TOL {
            report.structural.push(format!("{what}: support outside range"));
        }
    }
    for i in 0..p.terms.len() {
        for j in i + 1..p.terms.len() {
            let ordered = less_than_tol(&p.terms[i], &p.terms[j], levels, DEFAULT_TOL).unwrap_or(false);
            if !ordered {
                report
                    .ordering_violations
                    .push(format!("partition {}: term {} is not less than term {}", p.name, i + 1, j + 1));
            }
        }
    }
}

pub fn validate_rulebase(rb: &RuleBase, levels: &[f64]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let levels = if levels.is_empty() { rb.breakpoint_levels(None) } else { levels.to_vec() };
    if rb.inputs.is_empty() {
        report.structural.push("rule base has no input dimensions".into());
    }
    if rb.rules.len() < 2 {
        report.structural.push(format!("rule base has {} rules, at least 2 are needed", rb.rules.len()));
    }
    for p in &rb.inputs {
        check_partition(p, &levels, &mut report);
    }
    check_partition(&rb.output, &levels, &mut report);
    for (r, rule) in rb.rules.iter().enumerate() {
        if rule.antecedents.len() != rb.inputs.len() {
            report.structural.push(format!(
                "rule {}: {} antecedents for {} inputs",
                r + 1,
                rule.antecedents.len(),
                rb.inputs.len()
            ));
            continue;
        }
        for (d, &t) in rule.antecedents.iter().enumerate() {
            if t >= rb.inputs[d].terms.len() {
                report.structural.push(format!("rule {}: term {} missing in input {}", r + 1, t + 1, d + 1));
            }
        }
        if rule.consequent >= rb.output.terms.len() {
            report.structural.push(format!("rule {}: consequent term {} missing", r + 1, rule.consequent + 1));
        }
    }
    for i in 0..rb.rules.len() {
        for j in i + 1..rb.rules.len() {
            if rb.rules[i].antecedents == rb.rules[j].antecedents {
                report.duplicate_antecedents.push(format!("rules {} and {} share antecedents", i + 1, j + 1));
            }
        }
    }
    report
}

/// Aggregated distance between two antecedent-like vectors at level `alpha`.
pub fn fuzzy_distance(
    a: &[&FuzzySet],
    b: &[&FuzzySet],
    alpha: f64,
    kind: DistanceKind,
) -> Result<DistancePair, RuleBaseError> {
    if a.len() != b.len() {
        return Err(RuleBaseError::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let mut lower = 0.0;
    let mut upper = 0.0;
    for (x, y) in a.iter().zip(b) {
        match kind {
            DistanceKind::EuclideanEndpoints => {
                let (cx, cy) = (x.alpha_cut(alpha)?, y.alpha_cut(alpha)?);
                lower += (cx.inf - cy.inf).powi(2);
                upper += (cx.sup - cy.sup).powi(2);
            }
            DistanceKind::Center => {
                let d = x.alpha_cut(alpha)?.center() - y.alpha_cut(alpha)?.center();
                lower += d * d;
                upper += d * d;
            }
            DistanceKind::ReferencePoint => {
                let d = x.reference_point(ReferenceMode::CoreMid)? - y.reference_point(ReferenceMode::CoreMid)?;
                lower += d * d;
                upper += d * d;
            }
        }
    }
    Ok(DistancePair { d_lower: lower.sqrt(), d_upper: upper.sqrt() })
}

/// Picks the two rules whose antecedents bracket the observation.
///
/// A rule whose antecedents equal the observation in every dimension is
/// returned as both bounds. In one dimension a strict flanking pair is
/// required. With several dimensions, if no single pair flanks in every
/// dimension, the nearest rule on each side is used; a rule's side is the
/// sign of its range-normalised reference-point offset summed over the
/// dimensions.
pub fn select_flanking(rb: &RuleBase, obs: &Observation, levels: &[f64]) -> Result<FlankingPair, RuleBaseError> {
    rb.check_observation(obs)?;
    let dims = rb.dims();
    let obs_refs: Vec<&FuzzySet> = obs.sets.iter().collect();
    for (r, _) in rb.rules.iter().enumerate() {
        if (0..dims).all(|d| rb.antecedent(r, d).approx_eq(&obs.sets[d], DEFAULT_TOL)) {
            return Ok(FlankingPair { lower: r, upper: r });
        }
    }

    let rp_dist = |r: usize| -> Result<f64, RuleBaseError> {
        Ok(fuzzy_distance(&rb.antecedents(r), &obs_refs, 0.0, DistanceKind::ReferencePoint)?.d_lower)
    };
    // tie key independent of rule order
    let key = |r: usize| (rb.rules[r].antecedents.clone(), rb.rules[r].consequent);

    let mut below = vec![false; rb.rules.len()];
    let mut above = vec![false; rb.rules.len()];
    for r in 0..rb.rules.len() {
        let mut lo = true;
        let mut hi = true;
        for d in 0..dims {
            lo &= less_than_tol(rb.antecedent(r, d), &obs.sets[d], levels, DEFAULT_TOL)?;
            hi &= less_than_tol(&obs.sets[d], rb.antecedent(r, d), levels, DEFAULT_TOL)?;
        }
        below[r] = lo;
        above[r] = hi;
    }
    let mut best: Option<(f64, FlankingPair)> = None;
    for l in (0..rb.rules.len()).filter(|&r| below[r]) {
        for u in (0..rb.rules.len()).filter(|&r| above[r]) {
            let score = rp_dist(l)? + rp_dist(u)?;
            let cand = FlankingPair { lower: l, upper: u };
            let better = match &best {
                None => true,
                Some((s, b)) => {
                    score < *s - DEFAULT_TOL
                        || ((score - *s).abs() <= DEFAULT_TOL && (key(l), key(u)) < (key(b.lower), key(b.upper)))
                }
            };
            if better {
                best = Some((score, cand));
            }
        }
    }
    if let Some((_, pair)) = best {
        return Ok(pair);
    }
    if dims < 2 {
        return Err(RuleBaseError::NoFlankingRules);
    }

    // Multi-dimensional fallback. The observation must lie inside the hull of
    // the rule antecedents' reference points in every dimension.
    let mut obs_rp = Vec::with_capacity(dims);
    for (d, set) in obs.sets.iter().enumerate() {
        let rp = set.reference_point(ReferenceMode::CoreMid)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..rb.rules.len() {
            let a = rb.antecedent(r, d).reference_point(ReferenceMode::CoreMid)?;
            lo = lo.min(a);
            hi = hi.max(a);
        }
        if rp < lo - DEFAULT_TOL || rp > hi + DEFAULT_TOL {
            return Err(RuleBaseError::NoFlankingRules);
        }
        obs_rp.push(rp);
    }
    let mut lower: Option<(f64, usize)> = None;
    let mut upper: Option<(f64, usize)> = None;
    for r in 0..rb.rules.len() {
        let mut side = 0.0;
        for (d, rp) in obs_rp.iter().enumerate() {
            let a = rb.antecedent(r, d).reference_point(ReferenceMode::CoreMid)?;
            side += (rp - a) / rb.inputs[d].width();
        }
        let dist = rp_dist(r)?;
        let slot = if side > DEFAULT_TOL {
            &mut lower
        } else if side < -DEFAULT_TOL {
            &mut upper
        } else {
            continue;
        };
        let better = match slot {
            None => true,
            Some((bd, br)) => dist < *bd - DEFAULT_TOL || ((dist - *bd).abs() <= DEFAULT_TOL && key(r) < key(*br)),
        };
        if better {
            *slot = Some((dist, r));
        }
    }
    match (lower, upper) {
        (Some((_, l)), Some((_, u))) => Ok(FlankingPair { lower: l, upper: u }),
        _ => Err(RuleBaseError::NoFlankingRules),
    }
}
