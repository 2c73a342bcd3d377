use super::{Conclusion, FriError, Flanked, InterpolationConfig, InterpolationWeights, MethodId};
use crate::fuzzy::{CharacteristicPoints, FuzzySet};

fn chars(sets: &[&FuzzySet]) -> Result<Vec<CharacteristicPoints>, FriError> {
    sets.iter().map(|s| s.characteristic_points().map_err(FriError::from)).collect()
}

/// Range-normalized Euclidean distance between core centres.
fn core_distance(a: &[CharacteristicPoints], b: &[CharacteristicPoints], ranges: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(ranges)
        .map(|((x, y), r)| ((x.core_mid() - y.core_mid()) / r).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Geometric mean over dimensions of `num_k / den_k`; a degenerate
/// denominator contributes a unit ratio.
fn flank_ratio(num: impl Iterator<Item = f64>, den: impl Iterator<Item = f64>, tol: f64) -> f64 {
    let mut log_sum = 0.0;
    let mut n = 0usize;
    for (a, b) in num.zip(den) {
        n += 1;
        if b <= tol {
            continue;
        }
        if a <= tol {
            return 0.0;
        }
        log_sum += (a / b).ln();
    }
    if n == 0 {
        1.0
    } else {
        (log_sum / n as f64).exp()
    }
}

pub(super) fn interpolate_crf(fl: &Flanked, cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    let (p1, p2, po) = (chars(&fl.a1)?, chars(&fl.a2)?, chars(&fl.obs)?);
    let (q1, q2) = (fl.b1.characteristic_points()?, fl.b2.characteristic_points()?);
    let d1 = core_distance(&p1, &po, &fl.ranges);
    let d2 = core_distance(&po, &p2, &fl.ranges);
    let lambda = if d1 + d2 <= cfg.tol { 0.5 } else { d1 / (d1 + d2) };

    let center = q1.core_mid() + lambda * (q2.core_mid() - q1.core_mid());
    let core = (1.0 - lambda) * q1.core_width() + lambda * q2.core_width();

    let left = |p: &[CharacteristicPoints]| p.iter().map(|c| c.left_fuzziness()).collect::<Vec<_>>();
    let right = |p: &[CharacteristicPoints]| p.iter().map(|c| c.right_fuzziness()).collect::<Vec<_>>();
    let (fl_lo, fu_lo) = if cfg.crf_facing_flanks {
        let rl = flank_ratio(left(&po).into_iter(), right(&p1).into_iter(), cfg.tol);
        let ru = flank_ratio(right(&po).into_iter(), left(&p2).into_iter(), cfg.tol);
        (rl * q1.right_fuzziness(), ru * q2.left_fuzziness())
    } else {
        let blend = |obs: Vec<f64>, a1: Vec<f64>, a2: Vec<f64>, b1: f64, b2: f64| {
            let r1 = flank_ratio(obs.iter().copied(), a1.into_iter(), cfg.tol);
            let r2 = flank_ratio(obs.into_iter(), a2.into_iter(), cfg.tol);
            (1.0 - lambda) * r1 * b1 + lambda * r2 * b2
        };
        (
            blend(left(&po), left(&p1), left(&p2), q1.left_fuzziness(), q2.left_fuzziness()),
            blend(right(&po), right(&p1), right(&p2), q1.right_fuzziness(), q2.right_fuzziness()),
        )
    };
    let (lc, rc) = (center - 0.5 * core, center + 0.5 * core);
    let set = FuzzySet::from_pairs(&[(lc - fl_lo, 0.0), (lc, 1.0), (rc, 1.0), (rc + fu_lo, 0.0)], "B*")?;
    let mut c = Conclusion::shape(
        MethodId::Crf,
        set,
        InterpolationWeights { lambda_core: Some(lambda), ..Default::default() },
    );
    if cfg.crf_facing_flanks {
        c.notes.push("facing-flank fuzziness ratios".into());
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::*;

    #[test]
    fn d1_core_and_flanks() {
        let c = interpolate(MethodId::Crf, &d1_base(), &obs(tri(3.0, 4.0, 5.0)), &InterpolationConfig::default())
            .unwrap();
        let cp = c.as_shape().unwrap().characteristic_points().unwrap();
        assert!((cp.lc - 5.0).abs() < 1e-12 && (cp.rc - 5.0).abs() < 1e-12);
        // left: 5/8 * 1 * 1 + 3/8 * 1/2 * 2 ; right: 5/8 * 1 * 2 + 3/8 * 1/2 * 1
        assert!((cp.left_fuzziness() - 1.0).abs() < 1e-12);
        assert!((cp.right_fuzziness() - (1.25 + 0.1875)).abs() < 1e-12);
    }

    #[test]
    fn facing_flanks_option_is_selectable() {
        let cfg = InterpolationConfig { crf_facing_flanks: true, ..Default::default() };
        let c = interpolate(MethodId::Crf, &d1_base(), &obs(tri(3.0, 4.0, 5.0)), &cfg).unwrap();
        let cp = c.as_shape().unwrap().characteristic_points().unwrap();
        // left = 1 * fU(B1) / fU(A1) = 2 ; right = 1 * fL(B2) / fL(A2) = 1
        assert!((cp.left_fuzziness() - 2.0).abs() < 1e-12);
        assert!((cp.right_fuzziness() - 1.0).abs() < 1e-12);
    }
}
