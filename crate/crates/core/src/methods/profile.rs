use crate::fuzzy::{AlphaCut, Breakpoint, FuzzyError, FuzzySet};

/// A set sampled as alpha-cuts at a shared, ascending list of levels.
///
/// For piecewise-linear inputs whose breakpoint levels are all among
/// `levels`, the profile describes the set exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub levels: Vec<f64>,
    pub inf: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Profile {
    pub fn from_set(set: &FuzzySet, levels: &[f64]) -> Result<Self, FuzzyError> {
        let mut inf = Vec::with_capacity(levels.len());
        let mut sup = Vec::with_capacity(levels.len());
        for &a in levels {
            let c = set.alpha_cut(a)?;
            inf.push(c.inf);
            sup.push(c.sup);
        }
        Ok(Self { levels: levels.to_vec(), inf, sup })
    }

    pub fn from_cuts(cuts: &[AlphaCut]) -> Self {
        Self {
            levels: cuts.iter().map(|c| c.alpha).collect(),
            inf: cuts.iter().map(|c| c.inf).collect(),
            sup: cuts.iter().map(|c| c.sup).collect(),
        }
    }

    pub fn cuts(&self) -> Vec<AlphaCut> {
        (0..self.levels.len())
            .map(|j| AlphaCut { alpha: self.levels[j], inf: self.inf[j], sup: self.sup[j] })
            .collect()
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    /// Offsets `rp - inf` per level.
    pub fn left_offsets(&self, rp: f64) -> Vec<f64> {
        self.inf.iter().map(|x| rp - x).collect()
    }

    /// Offsets `sup - rp` per level.
    pub fn right_offsets(&self, rp: f64) -> Vec<f64> {
        self.sup.iter().map(|x| x - rp).collect()
    }

    pub fn from_offsets(levels: &[f64], rp: f64, left: &[f64], right: &[f64]) -> Self {
        Self {
            levels: levels.to_vec(),
            inf: left.iter().map(|l| rp - l).collect(),
            sup: right.iter().map(|r| rp + r).collect(),
        }
    }

    pub fn translate(&mut self, delta: f64) {
        for x in self.inf.iter_mut().chain(self.sup.iter_mut()) {
            *x += delta;
        }
    }

    pub fn is_nested(&self, tol: f64) -> bool {
        let top = self.top();
        if self.inf[top] > self.sup[top] + tol {
            return false;
        }
        (0..top).all(|j| self.inf[j] <= self.inf[j + 1] + tol && self.sup[j] >= self.sup[j + 1] - tol)
    }

    /// Restores nesting from the top level down: an inverted core collapses to
    /// its midpoint and each lower cut is widened to contain the one above.
    /// Returns true when anything moved.
    pub fn repair_nesting(&mut self) -> bool {
        let top = self.top();
        let mut changed = false;
        if self.inf[top] > self.sup[top] {
            let m = 0.5 * (self.inf[top] + self.sup[top]);
            self.inf[top] = m;
            self.sup[top] = m;
            changed = true;
        }
        for j in (0..top).rev() {
            if self.inf[j] > self.inf[j + 1] {
                self.inf[j] = self.inf[j + 1];
                changed = true;
            }
            if self.sup[j] < self.sup[j + 1] {
                self.sup[j] = self.sup[j + 1];
                changed = true;
            }
        }
        changed
    }

    /// Breakpoint set tracing the left endpoints upwards and the right
    /// endpoints downwards. Fails when the profile is not nested.
    pub fn to_set(&self, label: &str) -> Result<FuzzySet, FuzzyError> {
        let n = self.levels.len();
        let mut pts = Vec::with_capacity(2 * n);
        for j in 0..n {
            pts.push(Breakpoint::new(self.inf[j], self.levels[j]));
        }
        for j in (0..n).rev() {
            pts.push(Breakpoint::new(self.sup[j], self.levels[j]));
        }
        FuzzySet::new(pts, label)
    }
}
