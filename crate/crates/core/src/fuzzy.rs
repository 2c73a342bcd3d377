//! Convex-normal piecewise-linear fuzzy sets.
//!
//! A [`FuzzySet`] is an ordered list of breakpoints `(x, mu)`. Membership is
//! linear between consecutive breakpoints and zero outside the first and last
//! abscissa. Two breakpoints may share an abscissa, which encodes a vertical
//! edge (a trapezoid with a crisp flank, or a singleton).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

/// Absolute tolerance for structural predicates (plateaus, strictness).
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzyError {
    #[error("a fuzzy set needs at least one breakpoint")]
    EmptySet,
    #[error("breakpoint {index} has a smaller abscissa than its predecessor")]
    UnorderedAbscissae { index: usize },
    #[error("breakpoint {index} has membership {mu} outside [0, 1]")]
    MembershipOutOfRange { index: usize, mu: f64 },
    #[error("breakpoint {index} is not finite")]
    NonFinite { index: usize },
    #[error("set is not convex: no unique alpha-cut interval")]
    NotConvex,
    #[error("set is not convex and normal")]
    NotCnf,
    #[error("alpha level {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("support has zero length and the set is not a singleton")]
    DegenerateArea,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub x: f64,
    pub mu: f64,
}

impl Breakpoint {
    pub fn new(x: f64, mu: f64) -> Self {
        Self { x, mu }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzySet {
    points: Vec<Breakpoint>,
    label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaCut {
    pub alpha: f64,
    pub inf: f64,
    pub sup: f64,
}

impl AlphaCut {
    pub fn width(&self) -> f64 {
        self.sup - self.inf
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.inf + self.sup)
    }
}

/// Support and core endpoints: left flank, left core, right core, right flank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicPoints {
    pub lf: f64,
    pub lc: f64,
    pub rc: f64,
    pub rf: f64,
}

impl CharacteristicPoints {
    /// Left flank length `lc - lf`.
    pub fn left_fuzziness(&self) -> f64 {
        self.lc - self.lf
    }

    /// Right flank length `rf - rc`.
    pub fn right_fuzziness(&self) -> f64 {
        self.rf - self.rc
    }

    pub fn core_width(&self) -> f64 {
        self.rc - self.lc
    }

    pub fn core_mid(&self) -> f64 {
        0.5 * (self.lc + self.rc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarCut {
    pub theta: f64,
    pub rho: f64,
    /// False when the ray missed the membership curve; `rho` is then 0.
    pub hit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfReport {
    pub normal: bool,
    pub convex: bool,
    pub bounded: bool,
}

impl CnfReport {
    pub fn is_cnf(&self) -> bool {
        self.normal && self.convex && self.bounded
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReferenceMode {
    #[default]
    CoreMid,
    SupportMid,
    Cog,
}

impl FuzzySet {
    /// Validates and canonicalizes a breakpoint sequence.
    ///
    /// Consecutive identical breakpoints are collapsed, and a sequence whose
    /// breakpoints all share one abscissa collapses to a single breakpoint
    /// carrying the largest membership.
    pub fn new(points: Vec<Breakpoint>, label: impl Into<String>) -> Result<Self, FuzzyError> {
        if points.is_empty() {
            return Err(FuzzyError::EmptySet);
        }
        for (index, p) in points.iter().enumerate() {
            if !p.x.is_finite() || !p.mu.is_finite() {
                return Err(FuzzyError::NonFinite { index });
            }
            if !(0.0..=1.0).contains(&p.mu) {
                return Err(FuzzyError::MembershipOutOfRange { index, mu: p.mu });
            }
            if index > 0 && p.x < points[index - 1].x {
                return Err(FuzzyError::UnorderedAbscissae { index });
            }
        }
        let mut canon: Vec<Breakpoint> = Vec::with_capacity(points.len());
        for p in points {
            if canon.last() != Some(&p) {
                canon.push(p);
            }
        }
        if canon.len() > 1 && canon.iter().all(|p| p.x == canon[0].x) {
            let mu = canon.iter().map(|p| p.mu).fold(0.0, f64::max);
            canon = vec![Breakpoint::new(canon[0].x, mu)];
        }
        Ok(Self { points: canon, label: label.into() })
    }

    pub fn from_pairs(pairs: &[(f64, f64)], label: impl Into<String>) -> Result<Self, FuzzyError> {
        Self::new(pairs.iter().map(|&(x, mu)| Breakpoint::new(x, mu)).collect(), label)
    }

    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        Self::from_pairs(&[(a, 0.0), (b, 1.0), (c, 0.0)], "")
    }

    pub fn trapezoidal(a: f64, b: f64, c: f64, d: f64) -> Result<Self, FuzzyError> {
        Self::from_pairs(&[(a, 0.0), (b, 1.0), (c, 1.0), (d, 0.0)], "")
    }

    pub fn singleton(x: f64) -> Result<Self, FuzzyError> {
        Self::from_pairs(&[(x, 1.0)], "")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn points(&self) -> &[Breakpoint] {
        &self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_singleton(&self) -> bool {
        self.points.len() == 1 && self.points[0].mu == 1.0
    }

    pub fn support(&self) -> (f64, f64) {
        (self.points[0].x, self.points[self.points.len() - 1].x)
    }

    pub fn height(&self) -> f64 {
        self.points.iter().map(|p| p.mu).fold(0.0, f64::max)
    }

    /// Distinct membership levels of the breakpoints, always including 0 and 1.
    pub fn breakpoint_levels(&self) -> Vec<f64> {
        let mut levels: Vec<f64> = self.points.iter().map(|p| p.mu).collect();
        levels.push(0.0);
        levels.push(1.0);
        normalize_levels(levels)
    }

    /// Membership degree at `x`; on a vertical edge the larger value wins.
    pub fn membership(&self, x: f64) -> f64 {
        let pts = &self.points;
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        let mut best: f64 = 0.0;
        for (i, p) in pts.iter().enumerate() {
            if p.x == x {
                best = best.max(p.mu);
            }
            if i + 1 < pts.len() {
                let q = pts[i + 1];
                if p.x < x && x < q.x {
                    let t = (x - p.x) / (q.x - p.x);
                    best = best.max(p.mu + t * (q.mu - p.mu));
                }
            }
        }
        best
    }

    /// Returns a copy translated by `delta` along the universe.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            points: self.points.iter().map(|p| Breakpoint::new(p.x + delta, p.mu)).collect(),
            label: self.label.clone(),
        }
    }

    /// Returns a copy mapped through `x -> scale * x + offset` (`scale > 0`).
    pub fn affine(&self, scale: f64, offset: f64) -> Self {
        Self {
            points: self.points.iter().map(|p| Breakpoint::new(scale * p.x + offset, p.mu)).collect(),
            label: self.label.clone(),
        }
    }

    pub fn is_cnf(&self) -> CnfReport {
        self.cnf_report(DEFAULT_TOL)
    }

    /// Normality is `max mu >= 1 - tol`; convexity asks the membership
    /// sequence to rise to its maximum and then fall, with no second rise.
    pub fn cnf_report(&self, tol: f64) -> CnfReport {
        let normal = self.height() >= 1.0 - tol;
        let bounded = self.points.iter().all(|p| p.x.is_finite());
        let mut falling = false;
        let mut convex = true;
        for w in self.points.windows(2) {
            let d = w[1].mu - w[0].mu;
            if d < -tol {
                falling = true;
            } else if d > tol && falling {
                convex = false;
                break;
            }
        }
        CnfReport { normal, convex, bounded }
    }

    fn require_convex(&self) -> Result<(), FuzzyError> {
        if self.cnf_report(DEFAULT_TOL).convex {
            Ok(())
        } else {
            Err(FuzzyError::NotConvex)
        }
    }

    fn require_cnf(&self) -> Result<(), FuzzyError> {
        if self.is_cnf().is_cnf() {
            Ok(())
        } else {
            Err(FuzzyError::NotCnf)
        }
    }

    /// The alpha-cut `[inf, sup]`. Level 0 yields the closed support. For a
    /// level above the set's height the cut collapses onto the peak region.
    pub fn alpha_cut(&self, alpha: f64) -> Result<AlphaCut, FuzzyError> {
        if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
            return Err(FuzzyError::AlphaOutOfRange(alpha));
        }
        self.require_convex()?;
        let pts = &self.points;
        if alpha == 0.0 {
            let (inf, sup) = self.support();
            return Ok(AlphaCut { alpha, inf, sup });
        }
        let level = alpha.min(self.height());
        let first = pts.iter().position(|p| p.mu >= level).unwrap_or(0);
        let inf = if first == 0 {
            pts[0].x
        } else {
            lerp_level(pts[first - 1], pts[first], level)
        };
        let last = pts.iter().rposition(|p| p.mu >= level).unwrap_or(pts.len() - 1);
        let sup = if last + 1 == pts.len() {
            pts[last].x
        } else {
            lerp_level(pts[last + 1], pts[last], level)
        };
        Ok(AlphaCut { alpha, inf, sup })
    }

    pub fn characteristic_points(&self) -> Result<CharacteristicPoints, FuzzyError> {
        self.require_cnf()?;
        let bottom = self.alpha_cut(0.0)?;
        let top = self.alpha_cut(1.0)?;
        Ok(CharacteristicPoints { lf: bottom.inf, lc: top.inf, rc: top.sup, rf: bottom.sup })
    }

    pub fn reference_point(&self, mode: ReferenceMode) -> Result<f64, FuzzyError> {
        match mode {
            ReferenceMode::CoreMid => Ok(self.characteristic_points()?.core_mid()),
            ReferenceMode::SupportMid => {
                let cp = self.characteristic_points()?;
                Ok(0.5 * (cp.lf + cp.rf))
            }
            ReferenceMode::Cog => {
                self.require_cnf()?;
                self.representative_value()
            }
        }
    }

    /// Centre of gravity of the area under the membership curve.
    pub fn representative_value(&self) -> Result<f64, FuzzyError> {
        let (lo, hi) = self.support();
        if hi - lo == 0.0 {
            return if self.height() >= 1.0 - DEFAULT_TOL {
                Ok(lo)
            } else {
                Err(FuzzyError::DegenerateArea)
            };
        }
        let mut area = 0.0;
        let mut moment = 0.0;
        for w in self.points.windows(2) {
            let (p, q) = (w[0], w[1]);
            let dx = q.x - p.x;
            area += dx * (p.mu + q.mu) / 2.0;
            moment += dx / 6.0 * (p.x * (2.0 * p.mu + q.mu) + q.x * (p.mu + 2.0 * q.mu));
        }
        if area <= 0.0 {
            return Err(FuzzyError::DegenerateArea);
        }
        Ok(moment / area)
    }

    /// Polar cut about the core-midpoint reference point.
    pub fn polar_cut(&self, theta: f64, aspect: f64) -> Result<PolarCut, FuzzyError> {
        let rp = self.reference_point(ReferenceMode::CoreMid)?;
        Ok(self.polar_cut_about(rp, theta, aspect))
    }

    /// Distance from `(rp, 0)` to the membership curve along the ray at
    /// `theta`, measured in the plane `(x, aspect * mu)`. The outermost
    /// intersection is used.
    pub fn polar_cut_about(&self, rp: f64, theta: f64, aspect: f64) -> PolarCut {
        let (lo, hi) = self.support();
        if theta <= 0.0 {
            let rho = hi - rp;
            return PolarCut { theta, rho: rho.max(0.0), hit: rho >= 0.0 };
        }
        if theta >= PI {
            let rho = rp - lo;
            return PolarCut { theta, rho: rho.max(0.0), hit: rho >= 0.0 };
        }
        let (dx, dy) = (theta.cos(), theta.sin());
        let mut boundary: Vec<(f64, f64)> = Vec::with_capacity(self.points.len() + 2);
        boundary.push((lo - rp, 0.0));
        boundary.extend(self.points.iter().map(|p| (p.x - rp, aspect * p.mu)));
        boundary.push((hi - rp, 0.0));
        let mut best: Option<f64> = None;
        for w in boundary.windows(2) {
            if let Some(t) = ray_segment(dx, dy, w[0], w[1]) {
                best = Some(best.map_or(t, |b: f64| b.max(t)));
            }
        }
        match best {
            Some(rho) if rho > 0.0 => PolarCut { theta, rho, hit: true },
            _ => PolarCut { theta, rho: 0.0, hit: false },
        }
    }

    /// Strict ordering `self < other` checked at every supplied level.
    pub fn less_than(&self, other: &FuzzySet, levels: &[f64]) -> Result<bool, FuzzyError> {
        less_than_tol(self, other, levels, DEFAULT_TOL)
    }

    /// True when both sets have the same breakpoints within `tol`.
    pub fn approx_eq(&self, other: &FuzzySet, tol: f64) -> bool {
        self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| (a.x - b.x).abs() <= tol && (a.mu - b.mu).abs() <= tol)
    }

    /// Maximum membership difference between two sets, sampled at every
    /// breakpoint of either set and at `extra` evenly spaced abscissae.
    pub fn max_membership_deviation(&self, other: &FuzzySet, extra: usize) -> f64 {
        let mut xs: Vec<f64> = self.points.iter().chain(&other.points).map(|p| p.x).collect();
        let lo = self.support().0.min(other.support().0);
        let hi = self.support().1.max(other.support().1);
        for i in 0..extra {
            xs.push(lo + (hi - lo) * i as f64 / (extra.max(2) - 1) as f64);
        }
        let mut worst: f64 = 0.0;
        for x in xs {
            // probe both sides of vertical edges as well as the point itself
            for probe in [x, x - 1e-12 * (1.0 + x.abs()), x + 1e-12 * (1.0 + x.abs())] {
                worst = worst.max((self.membership(probe) - other.membership(probe)).abs());
            }
        }
        worst
    }
}

pub fn less_than_tol(a: &FuzzySet, b: &FuzzySet, levels: &[f64], tol: f64) -> Result<bool, FuzzyError> {
    a.require_cnf()?;
    b.require_cnf()?;
    for &alpha in levels {
        let ca = a.alpha_cut(alpha)?;
        let cb = b.alpha_cut(alpha)?;
        if !(cb.inf - ca.inf > tol && cb.sup - ca.sup > tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

impl fmt::Display for FuzzySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.label.is_empty() {
            write!(f, "{}: ", self.label)?;
        }
        let body: Vec<String> = self.points.iter().map(|p| format!("({}, {})", p.x, p.mu)).collect();
        write!(f, "[{}]", body.join(" "))
    }
}

/// Sorts, deduplicates within [`DEFAULT_TOL`] and clamps levels into [0, 1].
pub fn normalize_levels(mut levels: Vec<f64>) -> Vec<f64> {
    levels.retain(|l| l.is_finite());
    for l in levels.iter_mut() {
        *l = l.clamp(0.0, 1.0);
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() <= DEFAULT_TOL);
    levels
}

/// `n` evenly spaced levels `k / (n - 1)`.
pub fn uniform_levels(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
}

fn lerp_level(outer: Breakpoint, inner: Breakpoint, level: f64) -> f64 {
    // exact at the ends so a cut through a breakpoint reproduces it
    if inner.mu == outer.mu || level >= inner.mu {
        return inner.x;
    }
    if level <= outer.mu {
        return outer.x;
    }
    let t = (level - outer.mu) / (inner.mu - outer.mu);
    let x = outer.x + t * (inner.x - outer.x);
    x.clamp(outer.x.min(inner.x), outer.x.max(inner.x))
}

/// Ray `(t*dx, t*dy)`, `t >= 0`, against segment `a-b`; returns `t`.
fn ray_segment(dx: f64, dy: f64, a: (f64, f64), b: (f64, f64)) -> Option<f64> {
    let (ex, ey) = (b.0 - a.0, b.1 - a.1);
    let denom = dx * ey - dy * ex;
    if denom.abs() <= 1e-12 * ex.hypot(ey) {
        // parallel; only collinear overlap counts, take the far endpoint
        let cross = a.0 * dy - a.1 * dx;
        if cross.abs() > 1e-12 * (1.0 + a.0.hypot(a.1)) {
            return None;
        }
        let ta = a.0 * dx + a.1 * dy;
        let tb = b.0 * dx + b.1 * dy;
        let t = ta.max(tb);
        return (t >= 0.0).then_some(t);
    }
    let t = (a.0 * ey - a.1 * ex) / denom;
    let s = (a.0 * dy - a.1 * dx) / denom;
    let eps = 1e-12;
    (t >= -eps && (-eps..=1.0 + eps).contains(&s)).then_some(t.max(0.0))
}
