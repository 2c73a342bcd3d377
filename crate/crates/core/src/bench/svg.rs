//! Plain SVG figures: one panel per input dimension with its terms and the
//! observation, and an output panel with the consequents and the conclusion.
//! Output is a pure function of the input so files can be diffed.

use crate::analysis::{detect_abnormality, DETECTION_TOL};
use crate::fuzzy::FuzzySet;
use crate::methods::{Conclusion, ConclusionForm, InterpolationConfig};
use crate::rulebase::{Observation, RuleBase};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 200.0;
const PAD: f64 = 24.0;

struct Frame {
    left: f64,
    lo: f64,
    hi: f64,
}

impl Frame {
    fn new(index: usize, lo: f64, hi: f64) -> Self {
        let span = if hi - lo > 0.0 { hi - lo } else { 1.0 };
        // a little air on both sides
        Frame { left: index as f64 * (PANEL_W + PAD) + PAD, lo: lo - 0.05 * span, hi: hi + 0.05 * span }
    }

    fn x(&self, v: f64) -> f64 {
        self.left + (v - self.lo) / (self.hi - self.lo) * PANEL_W
    }

    fn y(&self, mu: f64) -> f64 {
        PAD + (1.0 - mu) * PANEL_H
    }

    fn point(&self, x: f64, mu: f64) -> String {
        format!("{:.3},{:.3}", self.x(x), self.y(mu))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn set_points(set: &FuzzySet) -> Vec<(f64, f64)> {
    if set.is_singleton() {
        let x = set.support().0;
        return vec![(x, 0.0), (x, 1.0), (x, 0.0)];
    }
    set.points().iter().map(|p| (p.x, p.mu)).collect()
}

fn polyline(out: &mut String, f: &Frame, class: &str, label: &str, pts: &[(f64, f64)]) {
    let body: Vec<String> = pts.iter().map(|(x, mu)| f.point(*x, *mu)).collect();
    let _ = writeln!(
        out,
        r#"<polyline class="{class}" data-label="{}" fill="none" points="{}"/>"#,
        escape(label),
        body.join(" ")
    );
}

fn frame_box(out: &mut String, f: &Frame, title: &str) {
    let _ = writeln!(
        out,
        r##"<rect class="panel" x="{:.3}" y="{PAD:.3}" width="{PANEL_W:.3}" height="{PANEL_H:.3}" fill="none" stroke="#999"/>"##,
        f.left
    );
    let _ = writeln!(out, r#"<text class="title" x="{:.3}" y="16.000">{}</text>"#, f.left, escape(title));
    let _ = writeln!(
        out,
        r#"<text class="axis" x="{:.3}" y="{:.3}">{:.3}</text><text class="axis" x="{:.3}" y="{:.3}" text-anchor="end">{:.3}</text>"#,
        f.left,
        PAD + PANEL_H + 14.0,
        f.lo,
        f.left + PANEL_W,
        PAD + PANEL_H + 14.0,
        f.hi
    );
}

fn extent<'a>(sets: impl Iterator<Item = &'a FuzzySet>, lo: f64, hi: f64) -> (f64, f64) {
    sets.fold((lo, hi), |(a, b), s| {
        let (l, h) = s.support();
        (a.min(l), b.max(h))
    })
}

fn conclusion_extent(c: &Conclusion) -> (f64, f64) {
    match &c.form {
        ConclusionForm::Shape(s) => s.support(),
        ConclusionForm::AlphaFamily(cuts) => cuts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), k| (a.min(k.inf.min(k.sup)), b.max(k.sup.max(k.inf)))),
    }
}

fn draw_conclusion(out: &mut String, f: &Frame, c: &Conclusion) {
    let label = format!("B* ({})", c.method.token());
    match &c.form {
        ConclusionForm::Shape(s) => polyline(out, f, "conclusion", &label, &set_points(s)),
        ConclusionForm::AlphaFamily(cuts) => {
            let mut pts: Vec<(f64, f64)> = cuts.iter().map(|k| (k.inf, k.alpha)).collect();
            pts.extend(cuts.iter().rev().map(|k| (k.sup, k.alpha)));
            polyline(out, f, "conclusion", &label, &pts);
            for k in cuts.iter().filter(|k| k.inf - k.sup > DETECTION_TOL) {
                let _ = writeln!(
                    out,
                    r##"<line class="inversion" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#d00" stroke-width="3"/>"##,
                    f.x(k.sup),
                    f.y(k.alpha),
                    f.x(k.inf),
                    f.y(k.alpha)
                );
            }
        }
    }
    let report = detect_abnormality(c, &InterpolationConfig::default());
    if let (Some(alpha), Some(kind)) = (report.first_violation_alpha, report.violation_kind) {
        let _ = writeln!(
            out,
            r##"<text class="violation" x="{:.3}" y="{:.3}" fill="#d00">{} at alpha={alpha:.3}</text>"##,
            f.left + 4.0,
            PAD + 14.0,
            serde_kind(kind)
        );
    }
}

fn serde_kind(kind: crate::analysis::ViolationKind) -> &'static str {
    use crate::analysis::ViolationKind::*;
    match kind {
        EndpointInversion => "endpoint-inversion",
        NonNestedCuts => "non-nested-cuts",
        NonNormal => "non-normal",
    }
}

/// The figure for a rule base, an observation and, optionally, one method's
/// conclusion.
pub fn render_svg(rb: &RuleBase, obs: &Observation, conclusion: Option<&Conclusion>) -> String {
    let dims = rb.dims();
    let width = (dims + 1) as f64 * (PANEL_W + PAD) + PAD;
    let height = PANEL_H + 2.0 * PAD + 16.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" stroke="#222" font-family="sans-serif" font-size="11">"##
    );
    for (k, part) in rb.inputs.iter().enumerate() {
        let (lo, hi) = extent(part.terms.iter().chain(std::iter::once(&obs.sets[k])), part.range.0, part.range.1);
        let f = Frame::new(k, lo, hi);
        frame_box(&mut out, &f, &part.name);
        for t in &part.terms {
            polyline(&mut out, &f, "term", t.label(), &set_points(t));
        }
        polyline(&mut out, &f, "observation", "A*", &set_points(&obs.sets[k]));
    }
    let part = &rb.output;
    let (mut lo, mut hi) = extent(part.terms.iter(), part.range.0, part.range.1);
    if let Some(c) = conclusion {
        let (a, b) = conclusion_extent(c);
        if a.is_finite() && b.is_finite() {
            lo = lo.min(a);
            hi = hi.max(b);
        }
    }
    let f = Frame::new(dims, lo, hi);
    frame_box(&mut out, &f, &part.name);
    for t in &part.terms {
        polyline(&mut out, &f, "term", t.label(), &set_points(t));
    }
    if let Some(c) = conclusion {
        draw_conclusion(&mut out, &f, c);
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(rb: &RuleBase, obs: &Observation, conclusion: Option<&Conclusion>, path: &Path) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, render_svg(rb, obs, conclusion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::AlphaCut;
    use crate::methods::{interpolate, InterpolationWeights, MethodId};
    use crate::rulebase::{LinguisticPartition, Rule};

    fn tri(a: f64, b: f64, c: f64) -> FuzzySet {
        FuzzySet::triangular(a, b, c).unwrap()
    }

    fn s1() -> (RuleBase, Observation) {
        let rb = RuleBase {
            inputs: vec![LinguisticPartition::new("x", (0.0, 10.0), vec![tri(0.0, 1.0, 2.0), tri(8.0, 9.0, 10.0)])],
            output: LinguisticPartition::new("y", (20.0, 30.0), vec![tri(20.0, 21.0, 22.0), tri(28.0, 29.0, 30.0)]),
            rules: vec![Rule::new(vec![0], 0), Rule::new(vec![1], 1)],
        };
        (rb, Observation::new(vec![tri(4.0, 5.0, 6.0)]))
    }

    #[test]
    fn s1_kh_has_six_polylines() {
        let (rb, obs) = s1();
        let c = interpolate(MethodId::Kh, &rb, &obs, &InterpolationConfig::default()).unwrap();
        let svg = render_svg(&rb, &obs, Some(&c));
        assert_eq!(svg.matches("<polyline").count(), 6);
        assert_eq!(svg.matches(r#"class="conclusion""#).count(), 1);
        assert!(!svg.contains("inversion"));
        assert_eq!(svg, render_svg(&rb, &obs, Some(&c)));
    }

    #[test]
    fn inverted_cuts_are_marked() {
        let (rb, obs) = s1();
        let cuts = vec![
            AlphaCut { alpha: 0.0, inf: 20.0, sup: 24.0 },
            AlphaCut { alpha: 0.5, inf: 22.0, sup: 23.0 },
            AlphaCut { alpha: 1.0, inf: 23.0, sup: 22.0 },
        ];
        let c = Conclusion::family(MethodId::Kh, cuts, InterpolationWeights::default());
        let svg = render_svg(&rb, &obs, Some(&c));
        assert_eq!(svg.matches(r#"class="inversion""#).count(), 1);
        // ends cross at alpha = 0.75; the first dense level past it is flagged
        assert!(svg.contains("endpoint-inversion at alpha=0.751"), "{svg}");
    }
}
