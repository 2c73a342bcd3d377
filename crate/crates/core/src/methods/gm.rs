use super::{euclid, Conclusion, FriError, Flanked, InterpolationConfig, InterpolationWeights, MethodId, Profile};
use crate::fuzzy::{FuzzyError, FuzzySet, ReferenceMode};

/// The rule interpolated at the observation's reference points.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolatedRule {
    /// One profile per input dimension, centred on the observation.
    pub antecedents: Vec<Profile>,
    pub consequent: Profile,
    pub consequent_rp: f64,
    /// Per-dimension antecedent ratios.
    pub lambdas: Vec<f64>,
    /// Consequent ratio.
    pub lambda_c: f64,
}

fn blend_offsets(p1: &Profile, rp1: f64, p2: &Profile, rp2: f64, lambda: f64, rp: f64) -> Profile {
    let (l1, r1) = (p1.left_offsets(rp1), p1.right_offsets(rp1));
    let (l2, r2) = (p2.left_offsets(rp2), p2.right_offsets(rp2));
    let mix = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (1.0 - lambda) * x + lambda * y).collect::<Vec<_>>();
    Profile::from_offsets(&p1.levels, rp, &mix(&l1, &l2), &mix(&r1, &r2))
}

/// First stage: blends the flanking rules level by level after aligning
/// their reference points. Each antecedent dimension uses its own position
/// ratio; the consequent uses the ratio of aggregated reference-point
/// distances.
#[allow(clippy::too_many_arguments)]
pub fn interpolate_rule_scm(
    a1: &[&FuzzySet],
    a2: &[&FuzzySet],
    b1: &FuzzySet,
    b2: &FuzzySet,
    obs_rp: &[f64],
    levels: &[f64],
    mode: ReferenceMode,
    tol: f64,
) -> Result<InterpolatedRule, FuzzyError> {
    let mut antecedents = Vec::with_capacity(a1.len());
    let mut lambdas = Vec::with_capacity(a1.len());
    let mut rp1 = Vec::with_capacity(a1.len());
    let mut rp2 = Vec::with_capacity(a1.len());
    for k in 0..a1.len() {
        let (r1, r2) = (a1[k].reference_point(mode)?, a2[k].reference_point(mode)?);
        let lambda = if (r2 - r1).abs() <= tol { 0.5 } else { ((obs_rp[k] - r1) / (r2 - r1)).clamp(0.0, 1.0) };
        let p1 = Profile::from_set(a1[k], levels)?;
        let p2 = Profile::from_set(a2[k], levels)?;
        antecedents.push(blend_offsets(&p1, r1, &p2, r2, lambda, obs_rp[k]));
        lambdas.push(lambda);
        rp1.push(r1);
        rp2.push(r2);
    }
    let d1 = euclid(&rp1, obs_rp);
    let d2 = euclid(obs_rp, &rp2);
    let lambda_c = if d1 + d2 <= tol { 0.5 } else { d1 / (d1 + d2) };
    let (rb1, rb2) = (b1.reference_point(mode)?, b2.reference_point(mode)?);
    let consequent_rp = (1.0 - lambda_c) * rb1 + lambda_c * rb2;
    let consequent = blend_offsets(
        &Profile::from_set(b1, levels)?,
        rb1,
        &Profile::from_set(b2, levels)?,
        rb2,
        lambda_c,
        consequent_rp,
    );
    Ok(InterpolatedRule { antecedents, consequent, consequent_rp, lambdas, lambda_c })
}

fn geometric_mean(ratios: &[f64]) -> f64 {
    if ratios.is_empty() {
        return 1.0;
    }
    if ratios.iter().any(|r| *r <= 0.0) {
        return 0.0;
    }
    (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp()
}

/// Support scale factors `(left, right)` mapping the interpolated antecedent
/// supports onto the observed ones about the shared reference points.
pub fn tfr_scale(obs: &[Profile], interp: &[Profile], rps: &[f64], tol: f64) -> (f64, f64) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for k in 0..obs.len() {
        let (lo, li) = (rps[k] - obs[k].inf[0], rps[k] - interp[k].inf[0]);
        let (ro, ri) = (obs[k].sup[0] - rps[k], interp[k].sup[0] - rps[k]);
        if li > tol {
            left.push(lo.max(0.0) / li);
        }
        if ri > tol {
            right.push(ro.max(0.0) / ri);
        }
    }
    (geometric_mean(&left), geometric_mean(&right))
}

/// Offsets normalised by their support offset; zero for a degenerate flank.
fn normalised(offsets: &[f64], tol: f64) -> Vec<f64> {
    let base = offsets[0];
    if base <= tol {
        vec![0.0; offsets.len()]
    } else {
        offsets.iter().map(|o| o / base).collect()
    }
}

/// Second-stage shape correction: the level-wise difference between the
/// observed and interpolated normalised flanks, averaged over dimensions, is
/// added to the transformed consequent `bt`. Returns the corrected profile
/// and whether nesting had to be repaired.
pub fn fpl_correct(
    bt: &Profile,
    bt_rp: f64,
    obs: &[Profile],
    interp: &[Profile],
    rps: &[f64],
    tol: f64,
) -> (Profile, bool) {
    let n = bt.levels.len();
    let mut e_left = vec![0.0; n];
    let mut e_right = vec![0.0; n];
    for k in 0..obs.len() {
        let ol = normalised(&obs[k].left_offsets(rps[k]), tol);
        let il = normalised(&interp[k].left_offsets(rps[k]), tol);
        let or = normalised(&obs[k].right_offsets(rps[k]), tol);
        let ir = normalised(&interp[k].right_offsets(rps[k]), tol);
        for j in 0..n {
            e_left[j] += (ol[j] - il[j]) / obs.len() as f64;
            e_right[j] += (or[j] - ir[j]) / obs.len() as f64;
        }
    }
    let (bl, br) = (bt.left_offsets(bt_rp), bt.right_offsets(bt_rp));
    let left: Vec<f64> = (0..n).map(|j| bl[j] + e_left[j] * bl[0]).collect();
    let right: Vec<f64> = (0..n).map(|j| br[j] + e_right[j] * br[0]).collect();
    let mut out = Profile::from_offsets(&bt.levels, bt_rp, &left, &right);
    let repaired = out.repair_nesting();
    (out, repaired)
}

pub(super) fn interpolate_gm(fl: &Flanked, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    let levels = fl.levels();
    let rps = fl.obs.iter().map(|s| s.reference_point(cfg.rp_mode)).collect::<Result<Vec<_>, _>>()?;
    let rule = interpolate_rule_scm(&fl.a1, &fl.a2, fl.b1, fl.b2, &rps, &levels, cfg.rp_mode, cfg.tol)?;
    let obs = fl.obs.iter().map(|s| Profile::from_set(s, &levels)).collect::<Result<Vec<_>, _>>()?;

    let (sl, sr) = tfr_scale(&obs, &rule.antecedents, &rps, cfg.tol);
    let scale = |p: &Profile, rp: f64| {
        let l: Vec<f64> = p.left_offsets(rp).iter().map(|x| x * sl).collect();
        let r: Vec<f64> = p.right_offsets(rp).iter().map(|x| x * sr).collect();
        Profile::from_offsets(&p.levels, rp, &l, &r)
    };
    let bt = scale(&rule.consequent, rule.consequent_rp);
    let at: Vec<Profile> = rule.antecedents.iter().zip(&rps).map(|(p, rp)| scale(p, *rp)).collect();
    let (out, repaired) = fpl_correct(&bt, rule.consequent_rp, &obs, &at, &rps, cfg.tol);

    let set = out.to_set("B*")?;
    let weights = InterpolationWeights { lambda_core: Some(rule.lambda_c), ..Default::default() };
    let mut c = Conclusion::shape(MethodId::Gm, set, weights);
    if repaired {
        c.notes.push("nesting repaired after shape correction".into());
    }
    Ok(c)
}
