use super::{norm_ratio, Conclusion, FriError, Flanked, InterpolationConfig, InterpolationWeights, MethodId, Profile};
use crate::fuzzy::{FuzzyError, FuzzySet};

/// Transformed coordinates of `set` sampled at `levels`: the left support end,
/// then the left segment lengths upwards, the core width, and the right
/// segment lengths downwards. Every entry after the first is non-negative for
/// a CNF set.
pub fn maci_forward(set: &FuzzySet, levels: &[f64]) -> Result<Vec<f64>, FuzzyError> {
    let p = Profile::from_set(set, levels)?;
    Ok(forward_profile(&p))
}

fn forward_profile(p: &Profile) -> Vec<f64> {
    let top = p.top();
    let mut v = Vec::with_capacity(2 * top + 2);
    v.push(p.inf[0]);
    // lengths of a CNF set are non-negative; max() drops rounding residue
    for j in 0..top {
        v.push((p.inf[j + 1] - p.inf[j]).max(0.0));
    }
    v.push((p.sup[top] - p.inf[top]).max(0.0));
    for j in (0..top).rev() {
        v.push((p.sup[j] - p.sup[j + 1]).max(0.0));
    }
    v
}

/// Inverse of [`maci_forward`].
pub fn maci_inverse(coords: &[f64], levels: &[f64]) -> Result<FuzzySet, FuzzyError> {
    inverse_profile(coords, levels).to_set("B*")
}

fn inverse_profile(coords: &[f64], levels: &[f64]) -> Profile {
    let top = levels.len() - 1;
    let mut inf = vec![0.0; levels.len()];
    let mut sup = vec![0.0; levels.len()];
    inf[0] = coords[0];
    for j in 0..top {
        inf[j + 1] = inf[j] + coords[1 + j];
    }
    sup[top] = inf[top] + coords[1 + top];
    for (k, j) in (0..top).rev().enumerate() {
        sup[j] = sup[j + 1] + coords[2 + top + k];
    }
    Profile { levels: levels.to_vec(), inf, sup }
}

pub(super) fn interpolate_maci(fl: &Flanked, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    let levels = fl.levels();
    let rp = |sets: &[&FuzzySet]| -> Result<Vec<f64>, FriError> {
        sets.iter().map(|s| s.reference_point(cfg.rp_mode).map_err(FriError::from)).collect()
    };
    let (r1, r2, ro) = (rp(&fl.a1)?, rp(&fl.a2)?, rp(&fl.obs)?);
    let lambda = norm_ratio(&ro, &r1, &r2, 0.5, cfg.tol);
    let rb = (1.0 - lambda) * fl.b1.reference_point(cfg.rp_mode)? + lambda * fl.b2.reference_point(cfg.rp_mode)?;

    let coords = |sets: &[&FuzzySet]| -> Result<Vec<Vec<f64>>, FriError> {
        sets.iter().map(|s| maci_forward(s, &levels).map_err(FriError::from)).collect()
    };
    let (c1, c2, co) = (coords(&fl.a1)?, coords(&fl.a2)?, coords(&fl.obs)?);
    let (cb1, cb2) = (maci_forward(fl.b1, &levels)?, maci_forward(fl.b2, &levels)?);

    // Each length gets its own ratio; the first coordinate is a position and
    // is fixed later by the reference point.
    let mut out = vec![0.0; cb1.len()];
    let mut lambda_left = None;
    let mut lambda_right = None;
    for i in 1..out.len() {
        let pick = |c: &[Vec<f64>]| c.iter().map(|v| v[i]).collect::<Vec<_>>();
        let l = norm_ratio(&pick(&co), &pick(&c1), &pick(&c2), lambda, cfg.tol);
        if i == 1 {
            lambda_left = Some(l);
        }
        if i == out.len() - 1 {
            lambda_right = Some(l);
        }
        out[i] = (1.0 - l) * cb1[i] + l * cb2[i];
    }
    let mut p = inverse_profile(&out, &levels);
    let probe = p.to_set("B*")?;
    p.translate(rb - probe.reference_point(cfg.rp_mode)?);
    let set = p.to_set("B*")?;
    let weights = InterpolationWeights {
        lambda_core: Some(lambda),
        lambda_left,
        lambda_right,
        ..Default::default()
    };
    Ok(Conclusion::shape(MethodId::Maci, set, weights))
}
