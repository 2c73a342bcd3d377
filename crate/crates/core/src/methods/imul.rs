use super::{norm_ratio, Conclusion, FriError, Flanked, InterpolationConfig, InterpolationWeights, MethodId};
use crate::fuzzy::{CharacteristicPoints, FuzzySet};

fn chars(sets: &[&FuzzySet]) -> Result<Vec<CharacteristicPoints>, FriError> {
    sets.iter().map(|s| s.characteristic_points().map_err(FriError::from)).collect()
}

/// Mean over dimensions of `|S'/U' - S/U|`, where `S` is the interpolated
/// antecedent flank, `S'` the observed flank and `U` the reference-point gap
/// between the flanking antecedents.
fn ratio_correction(obs: &[f64], a1: &[f64], a2: &[f64], gaps: &[f64], lambda: f64, tol: f64) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for k in 0..obs.len() {
        let u = gaps[k].abs();
        if u <= tol {
            continue;
        }
        let s = (1.0 - lambda) * a1[k] + lambda * a2[k];
        sum += (obs[k] / u - s / u).abs();
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub(super) fn interpolate_imul(fl: &Flanked, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    let rp = |sets: &[&FuzzySet]| -> Result<Vec<f64>, FriError> {
        sets.iter().map(|s| s.reference_point(cfg.rp_mode).map_err(FriError::from)).collect()
    };
    let (r1, r2, ro) = (rp(&fl.a1)?, rp(&fl.a2)?, rp(&fl.obs)?);
    let (p1, p2, po) = (chars(&fl.a1)?, chars(&fl.a2)?, chars(&fl.obs)?);
    let (q1, q2) = (fl.b1.characteristic_points()?, fl.b2.characteristic_points()?);
    let (rb1, rb2) = (fl.b1.reference_point(cfg.rp_mode)?, fl.b2.reference_point(cfg.rp_mode)?);

    let lambda = norm_ratio(&ro, &r1, &r2, 0.5, cfg.tol);
    let pick = |p: &[CharacteristicPoints], f: fn(&CharacteristicPoints) -> f64| p.iter().map(f).collect::<Vec<_>>();
    let lambda_left = norm_ratio(&pick(&po, |c| c.lc), &pick(&p1, |c| c.lc), &pick(&p2, |c| c.lc), lambda, cfg.tol);
    let lambda_right = norm_ratio(&pick(&po, |c| c.rc), &pick(&p1, |c| c.rc), &pick(&p2, |c| c.rc), lambda, cfg.tol);

    let rb = (1.0 - lambda) * rb1 + lambda * rb2;
    let span = if cfg.imul_printed_sum { rb2 + rb1 } else { rb2 - rb1 };
    let rc = (1.0 - lambda_right) * q1.rc + lambda_right * q2.rc + (lambda - lambda_right) * span;
    let lc = (1.0 - lambda_left) * q1.lc + lambda_left * q2.lc + (lambda - lambda_left) * span;
    let mut notes = Vec::new();
    let (lc, rc) = if lc <= rb && rb <= rc {
        (lc, rc)
    } else {
        notes.push("core clamped around the reference point".to_string());
        (lc.min(rb), rc.max(rb))
    };

    let gaps: Vec<f64> = r2.iter().zip(&r1).map(|(a, b)| a - b).collect();
    let left = |p: &[CharacteristicPoints]| pick(p, |c| c.left_fuzziness());
    let right = |p: &[CharacteristicPoints]| pick(p, |c| c.right_fuzziness());
    let r_left = (1.0 - lambda_left) * q1.left_fuzziness() + lambda_left * q2.left_fuzziness();
    let r_right = (1.0 - lambda_right) * q1.right_fuzziness() + lambda_right * q2.right_fuzziness();
    let corr_left = ratio_correction(&left(&po), &left(&p1), &left(&p2), &gaps, lambda_left, cfg.tol);
    let corr_right = ratio_correction(&right(&po), &right(&p1), &right(&p2), &gaps, lambda_right, cfg.tol);
    let lf = lc - r_left * (1.0 + corr_left);
    let rf = rc + r_right * (1.0 + corr_right);

    let set = FuzzySet::from_pairs(&[(lf, 0.0), (lc, 1.0), (rc, 1.0), (rf, 0.0)], "B*")?;
    let weights = InterpolationWeights {
        lambda_core: Some(lambda),
        lambda_left: Some(lambda_left),
        lambda_right: Some(lambda_right),
        ..Default::default()
    };
    let mut c = Conclusion::shape(MethodId::Imul, set, weights);
    if cfg.imul_printed_sum {
        notes.push("printed (RB2 + RB1) core term".into());
    }
    c.notes = notes;
    Ok(c)
}
