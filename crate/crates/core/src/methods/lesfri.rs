use super::{
    inverse_distance_weights, shepard_position, Conclusion, FriError, InterpolationConfig, InterpolationWeights,
    MethodId, Profile,
};
use crate::fuzzy::FuzzySet;
use crate::rulebase::{Observation, RuleBase};

/// Weighted mean of a partition's terms after moving each to position `x`,
/// as offsets from `x`. When `window` is given and at least two terms overlap
/// it, only the overlapping terms take part.
fn feat_ls(
    terms: &[FuzzySet],
    x: f64,
    window: Option<(f64, f64)>,
    levels: &[f64],
    cfg: &InterpolationConfig,
) -> Result<(Vec<f64>, Vec<f64>), FriError> {
    let mut chosen: Vec<&FuzzySet> = terms.iter().collect();
    if let Some((lo, hi)) = window {
        let overlapping: Vec<&FuzzySet> = terms
            .iter()
            .filter(|t| {
                let (a, b) = t.support();
                a < hi && b > lo
            })
            .collect();
        if overlapping.len() >= 2 {
            chosen = overlapping;
        }
    }
    let rps = chosen.iter().map(|t| t.reference_point(cfg.rp_mode)).collect::<Result<Vec<_>, _>>()?;
    let d: Vec<f64> = rps.iter().map(|r| (r - x).abs()).collect();
    let w = inverse_distance_weights(&d, cfg.power_p, cfg.tol);
    let mut left = vec![0.0; levels.len()];
    let mut right = vec![0.0; levels.len()];
    for ((t, rp), wt) in chosen.iter().zip(&rps).zip(&w) {
        if *wt == 0.0 {
            continue;
        }
        let p = Profile::from_set(t, levels)?;
        for (j, (l, r)) in p.left_offsets(*rp).into_iter().zip(p.right_offsets(*rp)).enumerate() {
            left[j] += wt * l;
            right[j] += wt * r;
        }
    }
    Ok((left, right))
}

pub(super) fn interpolate_lesfri(rb: &RuleBase, obs: &Observation, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    let dims = rb.dims();
    let levels = rb.breakpoint_levels(Some(obs));
    let obs_rps = obs.sets.iter().map(|s| s.reference_point(cfg.rp_mode)).collect::<Result<Vec<_>, _>>()?;
    let (rule_w, rb_star) = shepard_position(rb, &obs_rps, cfg)?;

    // Offset differences between observation and interpolated antecedent,
    // normalised by the input range and averaged over dimensions.
    let mut dl = vec![0.0; levels.len()];
    let mut dr = vec![0.0; levels.len()];
    #[allow(clippy::needless_range_loop)] // k indexes several parallel slices
    for k in 0..dims {
        let (il, ir) = feat_ls(&rb.inputs[k].terms, obs_rps[k], Some(obs.sets[k].support()), &levels, cfg)?;
        let p = Profile::from_set(&obs.sets[k], &levels)?;
        let (ol, or) = (p.left_offsets(obs_rps[k]), p.right_offsets(obs_rps[k]));
        let range = rb.inputs[k].width();
        let range = if range > 0.0 { range } else { 1.0 };
        for j in 0..levels.len() {
            dl[j] += (ol[j] - il[j]) / range / dims as f64;
            dr[j] += (or[j] - ir[j]) / range / dims as f64;
        }
    }
    let out_range = rb.output.width();
    let (bl, br) = feat_ls(&rb.output.terms, rb_star, None, &levels, cfg)?;
    let left: Vec<f64> = bl.iter().zip(&dl).map(|(b, d)| b + d * out_range).collect();
    let right: Vec<f64> = br.iter().zip(&dr).map(|(b, d)| b + d * out_range).collect();
    let mut profile = Profile::from_offsets(&levels, rb_star, &left, &right);

    let weights = InterpolationWeights { rule_weights: rule_w.into_iter().enumerate().collect(), ..Default::default() };
    if profile.is_nested(cfg.tol) && left.iter().chain(&right).all(|o| *o >= -cfg.tol) {
        // snap residue below tolerance so the breakpoints are ordered
        profile.repair_nesting();
        Ok(Conclusion::shape(MethodId::Lesfri, profile.to_set("B*")?, weights))
    } else {
        let mut c = Conclusion::family(MethodId::Lesfri, profile.cuts(), weights);
        c.notes.push("conclusion is not a valid set; reported as cuts".into());
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::*;
    use crate::rulebase::{LinguisticPartition, Rule, RuleBase};

    #[test]
    fn term_reproduced_at_its_reference_point() {
        let terms = vec![tri(0.0, 2.0, 3.0), tri(4.0, 6.0, 7.0), tri(8.0, 10.0, 11.0)];
        let rb = RuleBase {
            inputs: vec![LinguisticPartition::new("x", (0.0, 12.0), terms.clone())],
            output: LinguisticPartition::new("y", (0.0, 12.0), terms),
            rules: vec![Rule::new(vec![0], 0), Rule::new(vec![1], 1), Rule::new(vec![2], 2)],
        };
        let c = interpolate(MethodId::Lesfri, &rb, &obs(tri(4.0, 6.0, 7.0)), &InterpolationConfig::default()).unwrap();
        assert_shape(&c, &tri(4.0, 6.0, 7.0), 1e-12);
    }

    #[test]
    fn d1_is_a_valid_set() {
        let c = interpolate(MethodId::Lesfri, &d1_base(), &obs(tri(3.0, 4.0, 5.0)), &InterpolationConfig::default())
            .unwrap();
        assert!(c.as_shape().unwrap().is_cnf().is_cnf());
    }
}
