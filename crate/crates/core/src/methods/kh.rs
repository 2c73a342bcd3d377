use super::{inverse_distance_weights, Conclusion, FriError, Flanked, InterpolationConfig, InterpolationWeights, MethodId};
use crate::fuzzy::{AlphaCut, FuzzySet};
use crate::rulebase::{Observation, RuleBase};

/// Inverse-distance blend of endpoint values; a zero distance returns that
/// endpoint exactly.
fn inverse_distance_blend(values: &[f64], distances: &[f64], power: f64, tol: f64) -> f64 {
    if let Some(i) = distances.iter().position(|&d| d <= tol) {
        return values[i];
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (v, d) in values.iter().zip(distances) {
        let w = d.powf(power).recip();
        num += w * v;
        den += w;
    }
    num / den
}

fn endpoint_distances(obs: &[&FuzzySet], ante: &[&FuzzySet], alpha: f64) -> Result<(f64, f64), FriError> {
    let mut lower = 0.0;
    let mut upper = 0.0;
    for (o, a) in obs.iter().zip(ante) {
        let (co, ca) = (o.alpha_cut(alpha)?, a.alpha_cut(alpha)?);
        lower += (co.inf - ca.inf).powi(2);
        upper += (co.sup - ca.sup).powi(2);
    }
    Ok((lower.sqrt(), upper.sqrt()))
}

pub(super) fn interpolate_kh(fl: &Flanked, levels: &[f64], cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    let mut cuts = Vec::with_capacity(levels.len());
    for &alpha in levels {
        let (dl1, du1) = endpoint_distances(&fl.obs, &fl.a1, alpha)?;
        let (dl2, du2) = endpoint_distances(&fl.obs, &fl.a2, alpha)?;
        let (c1, c2) = (fl.b1.alpha_cut(alpha)?, fl.b2.alpha_cut(alpha)?);
        let (inf, sup) = if cfg.paper_literal_kh {
            // Weights as printed: each consequent weighted by its own distance.
            let lit = |v1: f64, v2: f64, d1: f64, d2: f64| {
                if d1 + d2 <= cfg.tol {
                    0.5 * (v1 + v2)
                } else {
                    (d1 * v1 + d2 * v2) / (d1 + d2)
                }
            };
            (lit(c1.inf, c2.inf, dl1, dl2), lit(c1.sup, c2.sup, du1, du2))
        } else {
            (
                inverse_distance_blend(&[c1.inf, c2.inf], &[dl1, dl2], 1.0, cfg.tol),
                inverse_distance_blend(&[c1.sup, c2.sup], &[du1, du2], 1.0, cfg.tol),
            )
        };
        cuts.push(AlphaCut { alpha, inf, sup });
    }
    let mut c = Conclusion::family(MethodId::Kh, cuts, InterpolationWeights::default());
    if cfg.paper_literal_kh {
        c.notes.push("printed distance weighting (not inverse distance)".into());
    }
    Ok(c)
}

/// Every rule contributes with weight `1 / d^N`, `N` the input dimension.
pub(super) fn interpolate_kh_stabilized(
    rb: &RuleBase,
    obs: &Observation,
    cfg: &InterpolationConfig,
) -> Result<Conclusion, FriError> {
    let levels = cfg.levels_for(rb, obs);
    let power = rb.dims() as f64;
    let obs_sets: Vec<&FuzzySet> = obs.sets.iter().collect();
    let mut cuts = Vec::with_capacity(levels.len());
    let mut weights = InterpolationWeights::default();
    for &alpha in &levels {
        let m = rb.rules.len();
        let mut dl = Vec::with_capacity(m);
        let mut du = Vec::with_capacity(m);
        let mut infs = Vec::with_capacity(m);
        let mut sups = Vec::with_capacity(m);
        for r in 0..m {
            let (l, u) = endpoint_distances(&obs_sets, &rb.antecedents(r), alpha)?;
            dl.push(l);
            du.push(u);
            let c = rb.consequent(r).alpha_cut(alpha)?;
            infs.push(c.inf);
            sups.push(c.sup);
        }
        if alpha == 0.0 {
            weights.rule_weights = inverse_distance_weights(&dl, power, cfg.tol).into_iter().enumerate().collect();
        }
        cuts.push(AlphaCut {
            alpha,
            inf: inverse_distance_blend(&infs, &dl, power, cfg.tol),
            sup: inverse_distance_blend(&sups, &du, power, cfg.tol),
        });
    }
    Ok(Conclusion::family(MethodId::KhStab, cuts, weights))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::*;

    #[test]
    fn d1_support_and_core() {
        let rb = d1_base();
        let c = interpolate(MethodId::Kh, &rb, &obs(tri(3.0, 4.0, 5.0)), &InterpolationConfig::default()).unwrap();
        let f = c.as_family().unwrap();
        assert_eq!(f.len(), 2);
        assert!((f[0].inf - 4.0).abs() < 1e-12);
        assert!((f[0].sup - 19.0 / 3.0).abs() < 1e-12);
        assert!((f[1].inf - 5.0).abs() < 1e-12 && (f[1].sup - 5.0).abs() < 1e-12);
    }

    #[test]
    fn stabilized_matches_kh_for_two_rules() {
        let rb = d1_base();
        let o = obs(tri(3.0, 4.0, 5.0));
        let cfg = InterpolationConfig::default().with_levels(crate::fuzzy::uniform_levels(11));
        let a = interpolate(MethodId::Kh, &rb, &o, &cfg).unwrap();
        let b = interpolate(MethodId::KhStab, &rb, &o, &cfg).unwrap();
        for (x, y) in a.as_family().unwrap().iter().zip(b.as_family().unwrap()) {
            assert!((x.inf - y.inf).abs() < 1e-12 && (x.sup - y.sup).abs() < 1e-12);
        }
    }

    #[test]
    fn printed_weighting_moves_toward_the_far_rule() {
        let rb = s1_base();
        let cfg = InterpolationConfig { paper_literal_kh: true, ..Default::default() };
        let c = interpolate(MethodId::Kh, &rb, &obs(tri(2.0, 3.0, 4.0)), &cfg).unwrap();
        // distances 2 and 6: printed form gives (2*21 + 6*29) / 8 = 27
        let top = c.as_family().unwrap()[1];
        assert!((top.inf - 27.0).abs() < 1e-12);
    }
}
