use super::{Conclusion, FriError, Flanked, InterpolationConfig, InterpolationWeights, MethodId, Profile};
use crate::fuzzy::FuzzySet;

fn rep(p: &Profile) -> Result<f64, FriError> {
    Ok(p.to_set("")?.representative_value()?)
}

/// Level-wise convex combination of two sets, translated so its
/// representative value is `target`.
fn blend(s1: &FuzzySet, s2: &FuzzySet, lambda: f64, target: f64, levels: &[f64]) -> Result<Profile, FriError> {
    let (p1, p2) = (Profile::from_set(s1, levels)?, Profile::from_set(s2, levels)?);
    let mix = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (1.0 - lambda) * x + lambda * y).collect();
    let mut p = Profile { levels: levels.to_vec(), inf: mix(&p1.inf, &p2.inf), sup: mix(&p1.sup, &p2.sup) };
    let shift = target - rep(&p)?;
    p.translate(shift);
    Ok(p)
}

/// Scale and move rates per level turning `from` into `to`. Centres are
/// taken relative to each set's representative value and moves are measured
/// in units of the target support width.
fn rates(from: &Profile, from_rep: f64, to: &Profile, to_rep: f64, notes: &mut Vec<String>) -> (Vec<f64>, Vec<f64>) {
    let n = from.levels.len();
    let width = |p: &Profile, j: usize| p.sup[j] - p.inf[j];
    let centre = |p: &Profile, j: usize, r: f64| 0.5 * (p.sup[j] + p.inf[j]) - r;
    let support = width(to, 0);
    let mut s = vec![1.0; n];
    let mut m = vec![0.0; n];
    for j in 0..n {
        let (w_from, w_to) = (width(from, j), width(to, j));
        s[j] = if w_from > 0.0 {
            w_to / w_from
        } else {
            if w_to > 0.0 {
                notes.push(format!("zero-width cut at level {} cannot be scaled", from.levels[j]));
            }
            1.0
        };
        if support > 0.0 {
            m[j] = (centre(to, j, to_rep) - s[j] * centre(from, j, from_rep)) / support;
        }
    }
    (s, m)
}

pub(super) fn interpolate_scale_move(fl: &Flanked, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    let levels = fl.levels();
    let dims = fl.dims();
    let mut notes = Vec::new();

    let mut lambdas = Vec::with_capacity(dims);
    for k in 0..dims {
        let (r1, r2, ro) =
            (fl.a1[k].representative_value()?, fl.a2[k].representative_value()?, fl.obs[k].representative_value()?);
        lambdas.push(if (r2 - r1).abs() <= cfg.tol { 0.5 } else { ((ro - r1) / (r2 - r1)).clamp(0.0, 1.0) });
    }
    let lambda = lambdas.iter().sum::<f64>() / dims as f64;
    let target = (1.0 - lambda) * fl.b1.representative_value()? + lambda * fl.b2.representative_value()?;
    let b_prime = blend(fl.b1, fl.b2, lambda, target, &levels)?;

    let n = levels.len();
    let mut scale = vec![0.0; n];
    let mut moves = vec![0.0; n];
    #[allow(clippy::needless_range_loop)] // k indexes several parallel slices
    for k in 0..dims {
        let ro = fl.obs[k].representative_value()?;
        let a_prime = blend(fl.a1[k], fl.a2[k], lambdas[k], ro, &levels)?;
        let a_star = Profile::from_set(fl.obs[k], &levels)?;
        let (s, m) = rates(&a_prime, ro, &a_star, ro, &mut notes);
        for j in 0..n {
            scale[j] += s[j] / dims as f64;
            moves[j] += m[j] / dims as f64;
        }
    }

    let support = scale[0] * (b_prime.sup[0] - b_prime.inf[0]);
    let mut out = Profile { levels: levels.clone(), inf: vec![0.0; n], sup: vec![0.0; n] };
    for j in 0..n {
        let w = scale[j] * (b_prime.sup[j] - b_prime.inf[j]);
        let c = target + scale[j] * (0.5 * (b_prime.sup[j] + b_prime.inf[j]) - target) + moves[j] * support;
        out.inf[j] = c - 0.5 * w;
        out.sup[j] = c + 0.5 * w;
    }
    if out.repair_nesting() {
        notes.push("moves clamped to keep the conclusion convex".into());
    }
    let shift = target - rep(&out)?;
    out.translate(shift);

    let set = out.to_set("B*")?;
    let weights = InterpolationWeights { lambda_rep: Some(lambda), ..Default::default() };
    let mut c = Conclusion::shape(MethodId::ScaleMove, set, weights);
    notes.dedup();
    c.notes = notes;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::*;
    use crate::fuzzy::FuzzySet;

    #[test]
    fn d1_representative_value_contract() {
        let c = interpolate(MethodId::ScaleMove, &d1_base(), &obs(tri(3.0, 4.0, 5.0)), &InterpolationConfig::default())
            .unwrap();
        let lambda = c.weights.lambda_rep.unwrap();
        assert!((lambda - 0.375).abs() < 1e-12);
        let s = c.as_shape().unwrap();
        assert!(s.is_cnf().is_cnf());
        let want = (1.0 - lambda) * (7.0 / 3.0) + lambda * (29.0 / 3.0);
        assert!((s.representative_value().unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn observation_wider_than_interpolant_widens_conclusion() {
        let rb = s1_base();
        let wide = FuzzySet::triangular(3.0, 5.0, 7.0).unwrap();
        let c = interpolate(MethodId::ScaleMove, &rb, &obs(wide), &InterpolationConfig::default()).unwrap();
        let (lo, hi) = c.as_shape().unwrap().support();
        assert!((lo - 23.0).abs() < 1e-9 && (hi - 27.0).abs() < 1e-9);
    }
}
