use super::{shepard_position, term_weights, Conclusion, FriError, InterpolationConfig, InterpolationWeights, MethodId};
use crate::fuzzy::{Breakpoint, FuzzyError, FuzzySet};
use crate::rulebase::{Observation, RuleBase};
use std::f64::consts::{FRAC_PI_2, PI};

/// Uniform angles in [0, pi] merged with the vertex angles of `sets`, each
/// measured about its own reference point.
fn theta_grid(sets: &[(&FuzzySet, f64, f64)], n: usize) -> Vec<f64> {
    let n = n.max(2);
    let mut t: Vec<f64> = (0..n).map(|k| PI * (k as f64 / (n - 1) as f64)).collect();
    for (s, rp, aspect) in sets {
        for p in s.points() {
            let th = (aspect * p.mu).atan2(p.x - rp);
            if (0.0..=PI).contains(&th) {
                t.push(th);
            }
        }
    }
    t.sort_by(f64::total_cmp);
    t.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
    t
}

fn polar_profile(set: &FuzzySet, rp: f64, aspect: f64, thetas: &[f64]) -> Vec<f64> {
    thetas.iter().map(|&th| set.polar_cut_about(rp, th, aspect).rho).collect()
}

/// Inverse-distance blend of the polar profiles of a partition's terms, all
/// moved to position `x`.
fn feat_p(terms: &[FuzzySet], x: f64, aspect: f64, thetas: &[f64], cfg: &InterpolationConfig) -> Result<Vec<f64>, FriError> {
    let w = term_weights(terms, x, cfg)?;
    let mut rho = vec![0.0; thetas.len()];
    for (t, wt) in terms.iter().zip(&w) {
        if *wt == 0.0 {
            continue;
        }
        let prof = polar_profile(t, t.reference_point(cfg.rp_mode)?, aspect, thetas);
        for (r, p) in rho.iter_mut().zip(prof) {
            *r += wt * p;
        }
    }
    Ok(rho)
}

/// Corrections below this size are rounding noise and go unreported.
const NOISE: f64 = 1e-9;

/// Maps polar samples back to a membership curve. Returns the set and
/// whether memberships had to be clipped or made unimodal.
fn reconstruct(rp: f64, aspect: f64, thetas: &[f64], rho: &[f64]) -> Result<(FuzzySet, bool), FuzzyError> {
    let mut pts: Vec<(f64, f64)> = thetas
        .iter()
        .zip(rho)
        .rev()
        .map(|(&th, &r)| {
            if th <= 0.0 || th >= PI {
                let dx = if th <= 0.0 { r } else { -r };
                (rp + dx, 0.0)
            } else if th == FRAC_PI_2 {
                (rp, r / aspect)
            } else {
                (rp + r * th.cos(), r * th.sin() / aspect)
            }
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut corrected = false;
    for p in &mut pts {
        // trigonometric round-off near the ends of the unit range is not a correction
        let snapped = if (p.1 - 1.0).abs() <= NOISE { 1.0 } else if p.1.abs() <= NOISE { 0.0 } else { p.1 };
        let clipped = snapped.clamp(0.0, 1.0);
        corrected |= (clipped - p.1).abs() > NOISE;
        p.1 = clipped;
    }
    let peak = pts
        .iter()
        .enumerate()
        .fold(0, |best, (i, p)| if p.1 > pts[best].1 { i } else { best });
    for i in (0..peak).rev() {
        if pts[i].1 > pts[i + 1].1 {
            corrected |= pts[i].1 - pts[i + 1].1 > NOISE;
            pts[i].1 = pts[i + 1].1;
        }
    }
    for i in peak + 1..pts.len() {
        if pts[i].1 > pts[i - 1].1 {
            corrected |= pts[i].1 - pts[i - 1].1 > NOISE;
            pts[i].1 = pts[i - 1].1;
        }
    }
    let set = FuzzySet::new(pts.into_iter().map(|(x, mu)| Breakpoint::new(x, mu)).collect(), "B*")?;
    Ok((set, corrected))
}

pub(super) fn interpolate_fripoc(rb: &RuleBase, obs: &Observation, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    let dims = rb.dims();
    let obs_rps = obs.sets.iter().map(|s| s.reference_point(cfg.rp_mode)).collect::<Result<Vec<_>, _>>()?;
    let aspect_in: Vec<f64> = rb.inputs.iter().map(|p| cfg.aspect.unwrap_or_else(|| p.width())).collect();
    let aspect_out = cfg.aspect.unwrap_or_else(|| rb.output.width());
    let (rule_w, rb_star) = shepard_position(rb, &obs_rps, cfg)?;

    let mut vertex_sets = Vec::new();
    for k in 0..dims {
        vertex_sets.push((&obs.sets[k], obs_rps[k], aspect_in[k]));
        for t in &rb.inputs[k].terms {
            vertex_sets.push((t, t.reference_point(cfg.rp_mode)?, aspect_in[k]));
        }
    }
    for t in &rb.output.terms {
        vertex_sets.push((t, t.reference_point(cfg.rp_mode)?, aspect_out));
    }
    let thetas = theta_grid(&vertex_sets, cfg.polar_thetas);

    // Relative polar difference between the observation and the interpolated
    // antecedent, averaged over dimensions.
    let mut rel = vec![0.0; thetas.len()];
    for k in 0..dims {
        let ai = feat_p(&rb.inputs[k].terms, obs_rps[k], aspect_in[k], &thetas, cfg)?;
        let ao = polar_profile(&obs.sets[k], obs_rps[k], aspect_in[k], &thetas);
        for j in 0..thetas.len() {
            if ai[j] > cfg.tol {
                rel[j] += (ao[j] - ai[j]) / ai[j] / dims as f64;
            }
        }
    }
    // Consequent shape: rule-weighted blend of the consequents about the
    // shared reference point.
    let mut bi = vec![0.0; thetas.len()];
    for (r, w) in rule_w.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let b = rb.consequent(r);
        let prof = polar_profile(b, b.reference_point(cfg.rp_mode)?, aspect_out, &thetas);
        for (x, p) in bi.iter_mut().zip(prof) {
            *x += w * p;
        }
    }
    let rho: Vec<f64> = bi.iter().zip(&rel).map(|(b, r)| (b * (1.0 + r)).max(0.0)).collect();
    let (set, corrected) = reconstruct(rb_star, aspect_out, &thetas, &rho)?;

    let weights = InterpolationWeights { rule_weights: rule_w.into_iter().enumerate().collect(), ..Default::default() };
    let mut c = Conclusion::shape(MethodId::Fripoc, set, weights);
    if corrected {
        c.notes.push("membership curve corrected to a valid set".into());
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::*;
    use super::*;

    #[test]
    fn polar_round_trip_of_a_trapezoid() {
        let t = FuzzySet::trapezoidal(2.0, 4.0, 5.0, 9.0).unwrap();
        let rp = 4.5;
        let thetas = theta_grid(&[(&t, rp, 10.0)], 181);
        let rho = polar_profile(&t, rp, 10.0, &thetas);
        let (back, corrected) = reconstruct(rp, 10.0, &thetas, &rho).unwrap();
        assert!(!corrected);
        assert!(back.max_membership_deviation(&t, 201) < 1e-9);
    }

    #[test]
    fn identical_antecedent_shapes_blend_consequents() {
        let rb = base(tri(0.0, 1.0, 2.0), tri(1.0, 2.0, 3.0), tri(8.0, 9.0, 10.0), tri(8.0, 10.0, 12.0), (0.0, 12.0), (0.0, 12.0));
        let c = interpolate(MethodId::Fripoc, &rb, &obs(tri(3.0, 4.0, 5.0)), &InterpolationConfig::default()).unwrap();
        assert!(c.notes.is_empty());
        // weights from normalised distances 3/12 and 5/12
        let (w1, w2) = (1.0 / 9.0, 1.0 / 25.0);
        let (n1, n2) = (w1 / (w1 + w2), w2 / (w1 + w2));
        let rp = n1 * 2.0 + n2 * 10.0;
        let s = c.as_shape().unwrap();
        for k in 0..=180 {
            let th = PI * k as f64 / 180.0;
            // closed form for a symmetric triangle of half-width h, height 12
            let rho = |h: f64| {
                let (cx, sy) = (th.cos().abs(), th.sin());
                1.0 / (cx / h + sy / 12.0)
            };
            let want = n1 * rho(1.0) + n2 * rho(2.0);
            let got = s.polar_cut_about(rp, th, 12.0).rho;
            assert!((got - want).abs() < 1e-9, "theta {th}: {got} vs {want}");
        }
    }

    #[test]
    fn singleton_consequents_stay_singletons() {
        let rb = base(
            tri(0.0, 1.0, 2.0),
            FuzzySet::singleton(2.0).unwrap(),
            tri(8.0, 9.0, 10.0),
            FuzzySet::singleton(6.0).unwrap(),
            (0.0, 10.0),
            (0.0, 10.0),
        );
        let c = interpolate(MethodId::Fripoc, &rb, &obs(tri(4.0, 5.0, 6.0)), &InterpolationConfig::default()).unwrap();
        let s = c.as_shape().unwrap();
        assert!(s.is_singleton());
        assert!((s.support().0 - 4.0).abs() < 1e-12);
    }
}
