//! The seven-example comparison suite: seeded instance generation, witness
//! search for method pathologies, and CSV/SVG artifacts.
//!
//! Only the shape of each example is fixed (dimensions, membership-function
//! families and term counts); numerals are drawn from a ChaCha stream so a
//! seed identifies an instance on every platform.

mod svg;

pub use svg::{render_svg, write_svg};

use crate::analysis::{check_linearity, detect_abnormality, evaluate_method, ComparisonRow};
use crate::fis::{serialize_fis, serialize_observation, write_csv, RuleBaseDocument};
use crate::fuzzy::{less_than_tol, FuzzySet, DEFAULT_TOL};
use crate::methods::{interpolate, InterpolationConfig, MethodId};
use crate::par::{self, Execution};
use crate::rulebase::{validate_rulebase, LinguisticPartition, Observation, Rule, RuleBase};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

/// Methods that must stay normal and piecewise linear on every instance.
pub const ROBUST: [MethodId; 5] = [MethodId::Maci, MethodId::Imul, MethodId::Crf, MethodId::Gm, MethodId::ScaleMove];

const INPUT_SLOT: f64 = 10.0;
const OUTPUT_SLOT: f64 = 8.0;
const SLOT_MARGIN: f64 = 0.5;
const MIN_GAP: f64 = 0.2;
const OBS_MIN_GAP: f64 = 0.05;
const MAX_PLACEMENTS: usize = 10_000;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("no example {0}; valid ids are 1 to 7")]
    UnknownExample(u8),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Triangular,
    Trapezoidal,
    Singleton,
}

/// One row of the example table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skeleton {
    pub id: u8,
    pub dims: usize,
    pub antecedent: ShapeKind,
    pub consequent: ShapeKind,
    pub observation: ShapeKind,
    pub antecedent_terms: usize,
    pub consequent_terms: usize,
}

const fn row(id: u8, dims: usize, a: ShapeKind, c: ShapeKind, o: ShapeKind, n: usize) -> Skeleton {
    Skeleton { id, dims, antecedent: a, consequent: c, observation: o, antecedent_terms: n, consequent_terms: n }
}

use ShapeKind::{Singleton as Sgl, Trapezoidal as Trap, Triangular as Tri};

pub const SKELETONS: [Skeleton; 7] = [
    row(1, 1, Tri, Tri, Tri, 2),
    row(2, 1, Tri, Tri, Tri, 4),
    row(3, 1, Tri, Trap, Trap, 4),
    row(4, 1, Trap, Trap, Sgl, 4),
    row(5, 1, Tri, Tri, Sgl, 4),
    row(6, 3, Tri, Trap, Tri, 3),
    row(7, 3, Tri, Trap, Sgl, 3),
];

pub fn skeleton(id: u8) -> Result<Skeleton, BenchError> {
    SKELETONS.iter().copied().find(|s| s.id == id).ok_or(BenchError::UnknownExample(id))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    FixedSeed(u64),
    Searched { seed: u64, iteration: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchInstance {
    pub example_id: u8,
    pub rb: RuleBase,
    pub obs: Observation,
    pub provenance: Provenance,
}

impl BenchInstance {
    pub fn label(&self) -> String {
        format!("example{}", self.example_id)
    }
}

/// Sorted breakpoints spread uniformly over `[lo, hi]`, at least `gap` apart.
fn breakpoints(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64, gap: f64) -> Vec<f64> {
    let free = (hi - lo - gap * (n - 1) as f64).max(0.0);
    let mut u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=free)).collect();
    u.sort_by(f64::total_cmp);
    u.iter().enumerate().map(|(i, v)| lo + v + gap * i as f64).collect()
}

fn sample_set(rng: &mut ChaCha8Rng, kind: ShapeKind, lo: f64, hi: f64, gap: f64) -> FuzzySet {
    let set = match kind {
        ShapeKind::Triangular => {
            let p = breakpoints(rng, 3, lo, hi, gap);
            FuzzySet::triangular(p[0], p[1], p[2])
        }
        ShapeKind::Trapezoidal => {
            let p = breakpoints(rng, 4, lo, hi, gap);
            FuzzySet::trapezoidal(p[0], p[1], p[2], p[3])
        }
        ShapeKind::Singleton => FuzzySet::singleton(rng.gen_range(lo..=hi)),
    };
    set.expect("generated breakpoints are ordered")
}

fn partition(rng: &mut ChaCha8Rng, name: &str, kind: ShapeKind, n: usize, slot: f64) -> LinguisticPartition {
    let terms = (0..n)
        .map(|j| {
            let lo = j as f64 * slot + SLOT_MARGIN;
            sample_set(rng, kind, lo, lo + slot - 2.0 * SLOT_MARGIN, MIN_GAP).with_label(format!("{name}{}", j + 1))
        })
        .collect();
    LinguisticPartition::new(name, (0.0, n as f64 * slot), terms)
}

/// An observation strictly between two terms, by rejection.
fn place_between(rng: &mut ChaCha8Rng, kind: ShapeKind, left: &FuzzySet, right: &FuzzySet) -> Option<FuzzySet> {
    let lo = left.characteristic_points().ok()?.core_mid();
    let hi = right.characteristic_points().ok()?.core_mid();
    let mut levels = left.breakpoint_levels();
    levels.extend(right.breakpoint_levels());
    for _ in 0..MAX_PLACEMENTS {
        let cand = sample_set(rng, kind, lo, hi, OBS_MIN_GAP);
        let mut lv = levels.clone();
        lv.extend(cand.breakpoint_levels());
        let lv = crate::fuzzy::normalize_levels(lv);
        if less_than_tol(left, &cand, &lv, DEFAULT_TOL).unwrap_or(false)
            && less_than_tol(&cand, right, &lv, DEFAULT_TOL).unwrap_or(false)
        {
            return Some(cand.with_label("A*"));
        }
    }
    None
}

/// Draws one instance of a skeleton. Rule `j` maps term `j` of every input to
/// output term `j`; the observation sits between terms `j` and `j + 1` of
/// every input for one random `j`.
pub fn sample_instance(sk: &Skeleton, rng: &mut ChaCha8Rng) -> (RuleBase, Observation) {
    loop {
        let inputs: Vec<LinguisticPartition> = (0..sk.dims)
            .map(|k| partition(rng, &format!("x{}", k + 1), sk.antecedent, sk.antecedent_terms, INPUT_SLOT))
            .collect();
        let output = partition(rng, "y", sk.consequent, sk.consequent_terms, OUTPUT_SLOT);
        let rules = (0..sk.antecedent_terms).map(|j| Rule::new(vec![j; sk.dims], j)).collect();
        let rb = RuleBase { inputs, output, rules };
        let j = rng.gen_range(0..sk.antecedent_terms - 1);
        let placed: Option<Vec<FuzzySet>> = rb
            .inputs
            .iter()
            .map(|p| place_between(rng, sk.observation, &p.terms[j], &p.terms[j + 1]))
            .collect();
        if let Some(sets) = placed {
            return (rb, Observation::new(sets));
        }
    }
}

fn rng_for(example: u8, seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(example) << 56));
    rng.set_stream(stream);
    rng
}

/// The fixed instance of example `id` for `seed`.
pub fn build_example(id: u8, seed: u64) -> Result<BenchInstance, BenchError> {
    let sk = skeleton(id)?;
    let (rb, obs) = sample_instance(&sk, &mut rng_for(id, seed, u64::MAX));
    debug_assert!(validate_rulebase(&rb, &[]).is_valid());
    Ok(BenchInstance { example_id: id, rb, obs, provenance: Provenance::FixedSeed(seed) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Abnormal(MethodId),
    Nonlinear(MethodId),
}

impl Target {
    pub fn method(self) -> MethodId {
        match self {
            Target::Abnormal(m) | Target::Nonlinear(m) => m,
        }
    }

    /// Whether `row` shows the pathology.
    pub fn fires(self, row: &ComparisonRow) -> bool {
        match self {
            Target::Abnormal(_) => row.abnormal() == Some(true),
            Target::Nonlinear(_) => row.linear() == Some(false),
        }
    }

    pub fn slug(self) -> String {
        match self {
            Target::Abnormal(m) => format!("abnormal-{}", m.token().to_lowercase()),
            Target::Nonlinear(m) => format!("nonlinear-{}", m.token().to_lowercase()),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Abnormal(m) => write!(f, "abnormal({})", m.token()),
            Target::Nonlinear(m) => write!(f, "nonlinear({})", m.token()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_samples: u64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_samples: 100_000, seed: 42 }
    }
}

/// What a failed search saw, so the outcome can be checked by re-running.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLog {
    pub example_id: u8,
    pub target: Target,
    pub budget: SearchBudget,
    pub samples: u64,
    /// Samples where the method returned a conclusion.
    pub ok: u64,
    /// `(status, count)` for the samples where it did not, sorted by status.
    pub errors: Vec<(String, u64)>,
}

impl fmt::Display for SearchLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "example: {}", self.example_id)?;
        writeln!(f, "target: {}", self.target)?;
        writeln!(f, "seed: {}", self.budget.seed)?;
        writeln!(f, "max_samples: {}", self.budget.max_samples)?;
        writeln!(f, "samples: {}", self.samples)?;
        writeln!(f, "ok: {}", self.ok)?;
        for (status, n) in &self.errors {
            writeln!(f, "{status}: {n}")?;
        }
        writeln!(f, "outcome: not found")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SearchOutcome {
    Found(BenchInstance),
    NotFound(SearchLog),
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&BenchInstance> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            SearchOutcome::NotFound(_) => None,
        }
    }
}

/// Sample `i` of a search; identical for every budget sharing the seed.
pub fn search_sample(example: u8, seed: u64, iteration: u64) -> Result<BenchInstance, BenchError> {
    let sk = skeleton(example)?;
    let (rb, obs) = sample_instance(&sk, &mut rng_for(example, seed, iteration));
    Ok(BenchInstance { example_id: example, rb, obs, provenance: Provenance::Searched { seed, iteration } })
}

/// Samples instances of the skeleton in iteration order and returns the first
/// one on which `target` fires.
pub fn search_witness(
    example: u8,
    target: Target,
    budget: &SearchBudget,
    cfg: &InterpolationConfig,
) -> Result<SearchOutcome, BenchError> {
    search_witness_with(Execution::default(), example, target, budget, cfg)
}

pub fn search_witness_with(
    exec: Execution,
    example: u8,
    target: Target,
    budget: &SearchBudget,
    cfg: &InterpolationConfig,
) -> Result<SearchOutcome, BenchError> {
    skeleton(example)?;
    let method = target.method();
    // Only the verdict the target needs is computed.
    let probe = |i: u64| -> (Option<BenchInstance>, Option<String>) {
        let Ok(inst) = search_sample(example, budget.seed, i) else { return (None, Some("error:sample".into())) };
        let fired = match target {
            Target::Abnormal(_) => interpolate(method, &inst.rb, &inst.obs, cfg).map(|c| detect_abnormality(&c, cfg).abnormal),
            Target::Nonlinear(_) => check_linearity(method, &inst.rb, &inst.obs, cfg).map(|l| !l.piecewise_linear),
        };
        match fired {
            Ok(true) => (Some(inst), None),
            Ok(false) => (None, None),
            Err(e) => (None, Some(format!("error:{}", e.code()))),
        }
    };

    let mut ok = 0;
    let mut errors: Vec<(String, u64)> = Vec::new();
    let mut next = 0;
    let mut chunk = 64;
    // Growing chunks keep early hits cheap; within a chunk the lowest index
    // wins, so the outcome does not depend on the execution mode.
    while next < budget.max_samples {
        let end = (next + chunk).min(budget.max_samples);
        let idx: Vec<u64> = (next..end).collect();
        for (inst, status) in par::map(exec, &idx, |&i| probe(i)) {
            if let Some(inst) = inst {
                return Ok(SearchOutcome::Found(inst));
            }
            match status {
                None => ok += 1,
                Some(s) => match errors.iter_mut().find(|(k, _)| *k == s) {
                    Some(e) => e.1 += 1,
                    None => errors.push((s, 1)),
                },
            }
        }
        next = end;
        chunk = (chunk * 2).min(4096);
    }
    errors.sort();
    Ok(SearchOutcome::NotFound(SearchLog {
        example_id: example,
        target,
        budget: *budget,
        samples: budget.max_samples,
        ok,
        errors,
    }))
}

/// The searches the suite runs: each pathology the comparison reports.
pub fn suite_targets() -> Vec<(u8, Target)> {
    use MethodId::*;
    let mut t = vec![(3, Target::Abnormal(Vkk))];
    for ex in [6, 7] {
        for m in [Kh, KhStab, Vkk, Lesfri] {
            t.push((ex, Target::Abnormal(m)));
        }
    }
    t.push((6, Target::Nonlinear(Fripoc)));
    t
}

/// Claimed verdicts for a fixed-instance cell; `None` leaves that verdict
/// unclaimed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Expectation {
    pub abnormal: Option<bool>,
    pub linear: Option<bool>,
}

/// The qualitative matrix: the robust methods are normal and piecewise
/// linear everywhere, KH and its stabilised form are normal on the two
/// all-triangular single-input examples. Nothing else is claimed for fixed
/// instances; the pathologies are covered by the witness searches.
pub fn expected_fixed(example: u8, method: MethodId) -> Expectation {
    use MethodId::*;
    if ROBUST.contains(&method) {
        return Expectation { abnormal: Some(false), linear: Some(true) };
    }
    match (example, method) {
        (1 | 2, Kh | KhStab) => Expectation { abnormal: Some(false), linear: None },
        _ => Expectation::default(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteCell {
    /// `example<k>` for fixed instances, `example<k>/<target>` for witnesses.
    pub example: String,
    pub example_id: u8,
    pub provenance: Provenance,
    pub row: ComparisonRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub example_id: u8,
    pub target: Target,
    pub outcome: SearchOutcome,
}

impl SearchRecord {
    pub fn verdict(&self) -> &'static str {
        match (&self.outcome, self.target) {
            (SearchOutcome::Found(_), _) => "FOUND",
            (SearchOutcome::NotFound(_), Target::Abnormal(MethodId::Lesfri)) => "NOT REPRODUCED",
            (SearchOutcome::NotFound(_), _) => "NOT FOUND",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub instances: Vec<BenchInstance>,
    pub cells: Vec<SuiteCell>,
    pub searches: Vec<SearchRecord>,
    pub mismatches: Vec<String>,
}

impl SuiteReport {
    pub fn cell(&self, example: &str, method: MethodId) -> Option<&SuiteCell> {
        self.cells.iter().find(|c| c.example == example && c.row.method == method)
    }

    pub fn search(&self, example: u8, target: Target) -> Option<&SearchRecord> {
        self.searches.iter().find(|s| s.example_id == example && s.target == target)
    }
}

fn convex(row: &ComparisonRow) -> bool {
    row.conclusion.as_ref().and_then(|c| c.to_shape()).is_some_and(|s| s.is_cnf().is_cnf())
}

fn diff_cells(cells: &[SuiteCell], searches: &[SearchRecord]) -> Vec<String> {
    let mut out = Vec::new();
    for c in cells {
        let m = c.row.method;
        let fixed = matches!(c.provenance, Provenance::FixedSeed(_));
        if ROBUST.contains(&m) {
            if c.row.status != "ok" {
                out.push(format!("{} {}: status {}", c.example, m.token(), c.row.status));
            } else if c.row.abnormal() != Some(false) || !convex(&c.row) {
                out.push(format!("{} {}: expected normal convex conclusion", c.example, m.token()));
            } else if c.row.linear() != Some(true) {
                out.push(format!("{} {}: expected piecewise linear", c.example, m.token()));
            }
        } else if fixed {
            let want = expected_fixed(c.example_id, m);
            if want.abnormal.is_some_and(|a| c.row.abnormal() != Some(a)) {
                out.push(format!("{} {}: expected abnormal={:?}", c.example, m.token(), want.abnormal));
            }
            if want.linear.is_some_and(|l| c.row.linear() != Some(l)) {
                out.push(format!("{} {}: expected linear={:?}", c.example, m.token(), want.linear));
            }
        }
    }
    for s in searches {
        if s.verdict() == "NOT FOUND" {
            out.push(format!("example{} {}: no witness within budget", s.example_id, s.target));
        }
    }
    out
}

/// Runs `methods` on every fixed instance and on every witness found for the
/// suite targets, and diffs the verdicts against the expected matrix. An
/// empty method list skips everything.
pub fn run_suite(
    methods: &[MethodId],
    seed: u64,
    budget: &SearchBudget,
    cfg: &InterpolationConfig,
) -> Result<SuiteReport, BenchError> {
    run_suite_with(Execution::default(), methods, seed, budget, cfg)
}

pub fn run_suite_with(
    exec: Execution,
    methods: &[MethodId],
    seed: u64,
    budget: &SearchBudget,
    cfg: &InterpolationConfig,
) -> Result<SuiteReport, BenchError> {
    let mut ms = methods.to_vec();
    ms.sort();
    ms.dedup();
    let mut report = SuiteReport { seed, instances: Vec::new(), cells: Vec::new(), searches: Vec::new(), mismatches: Vec::new() };
    if ms.is_empty() {
        return Ok(report);
    }
    for sk in &SKELETONS {
        report.instances.push(build_example(sk.id, seed)?);
    }
    let targets: Vec<(u8, Target)> = suite_targets().into_iter().filter(|(_, t)| ms.contains(&t.method())).collect();
    for (ex, target) in targets {
        let outcome = search_witness_with(exec, ex, target, budget, cfg)?;
        report.searches.push(SearchRecord { example_id: ex, target, outcome });
    }

    let mut jobs: Vec<(String, &BenchInstance, MethodId)> = Vec::new();
    for inst in &report.instances {
        for &m in &ms {
            jobs.push((inst.label(), inst, m));
        }
    }
    for s in &report.searches {
        if let SearchOutcome::Found(w) = &s.outcome {
            for &m in &ms {
                jobs.push((format!("{}/{}", w.label(), s.target.slug()), w, m));
            }
        }
    }
    report.cells = par::map(exec, &jobs, |(label, inst, m)| SuiteCell {
        example: label.clone(),
        example_id: inst.example_id,
        provenance: inst.provenance,
        row: evaluate_method(*m, &inst.rb, &inst.obs, cfg),
    });
    report.mismatches = diff_cells(&report.cells, &report.searches);
    Ok(report)
}

fn write_instance(dir: &Path, inst: &BenchInstance) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let doc = RuleBaseDocument::from_rulebase(inst.label(), &inst.rb);
    fs::write(dir.join("rulebase.fis"), serialize_fis(&doc))?;
    fs::write(dir.join("observation.obs"), serialize_observation(&inst.obs))
}

/// Writes `suite.csv`, `searches.txt`, `witnesses/` and `figures/` under
/// `out`. Existing files are overwritten.
pub fn write_artifacts(report: &SuiteReport, out: &Path) -> Result<(), BenchError> {
    fs::create_dir_all(out)?;
    let rows: Vec<_> = report.cells.iter().map(|c| c.row.to_report_row(&c.example)).collect();
    write_csv(&rows, fs::File::create(out.join("suite.csv"))?)?;

    let mut summary = String::new();
    for s in &report.searches {
        let at = match &s.outcome {
            SearchOutcome::Found(BenchInstance { provenance: Provenance::Searched { seed, iteration }, .. }) => {
                format!(" seed={seed} iteration={iteration}")
            }
            _ => String::new(),
        };
        summary.push_str(&format!("example{} {} {}{}\n", s.example_id, s.target, s.verdict(), at));
    }
    for m in &report.mismatches {
        summary.push_str(&format!("mismatch: {m}\n"));
    }
    fs::write(out.join("searches.txt"), summary)?;

    for s in &report.searches {
        let dir = out.join("witnesses").join(format!("example{}_{}", s.example_id, s.target.slug()));
        match &s.outcome {
            SearchOutcome::Found(w) => write_instance(&dir, w)?,
            SearchOutcome::NotFound(log) => {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("search.log"), log.to_string())?;
            }
        }
    }

    let figures = out.join("figures");
    fs::create_dir_all(&figures)?;
    for c in &report.cells {
        if !matches!(c.provenance, Provenance::FixedSeed(_)) {
            continue;
        }
        let Some(inst) = report.instances.iter().find(|i| i.example_id == c.example_id) else { continue };
        let path = figures.join(format!("example{}_{}.svg", c.example_id, c.row.method.token().to_lowercase()));
        write_svg(&inst.rb, &inst.obs, c.row.conclusion.as_ref(), &path)?;
    }
    Ok(())
}
