use super::{Conclusion, FriError, Flanked, InterpolationConfig, InterpolationWeights, MethodId};
use crate::fuzzy::{AlphaCut, FuzzySet};
use crate::rulebase::{fuzzy_distance, DistanceKind};

/// Observation-to-antecedent width ratio `wo / wa` in one dimension. Where
/// the antecedent cut has zero width (a triangle's apex) the ratio is its
/// one-sided limit from below.
fn dim_ratio(obs: &FuzzySet, ante: &FuzzySet, alpha: f64, tol: f64) -> Result<f64, FriError> {
    const STEP: f64 = 1e-6;
    let wo = obs.alpha_cut(alpha)?.width();
    let wa = ante.alpha_cut(alpha)?.width();
    if wa > tol {
        return Ok(wo / wa);
    }
    if wo <= tol {
        // both widths are linear down to the next breakpoint level and vanish
        // here, so their ratio is constant on that band
        let below = obs
            .breakpoint_levels()
            .into_iter()
            .chain(ante.breakpoint_levels())
            .filter(|l| *l < alpha)
            .fold(f64::NEG_INFINITY, f64::max);
        if below.is_finite() {
            let wa = ante.alpha_cut(below)?.width();
            if wa > tol {
                return Ok(obs.alpha_cut(below)?.width() / wa);
            }
        }
        return Ok(1.0);
    }
    let mut level = alpha;
    loop {
        if level <= 0.0 {
            return Err(FriError::DegenerateGeometry("antecedent has zero width at every level".into()));
        }
        level = (level - STEP).max(0.0);
        let wa = ante.alpha_cut(level)?.width();
        if wa > tol {
            return Ok(obs.alpha_cut(level)?.width() / wa);
        }
        if alpha - level > 1e-3 {
            // the antecedent stays degenerate over a whole band: fall back to
            // its support width
            let (wa0, wo0) = (ante.alpha_cut(0.0)?.width(), obs.alpha_cut(0.0)?.width());
            return Ok(if wa0 > tol { wo0 / wa0 } else { 1.0 });
        }
    }
}

/// Geometric mean over dimensions of the per-dimension width ratios.
fn width_ratio(obs: &[&FuzzySet], ante: &[&FuzzySet], alpha: f64, tol: f64) -> Result<f64, FriError> {
    let mut log_sum = 0.0;
    for (o, a) in obs.iter().zip(ante) {
        let r = dim_ratio(o, a, alpha, tol)?;
        if r <= 0.0 {
            return Ok(0.0);
        }
        log_sum += r.ln();
    }
    Ok((log_sum / obs.len() as f64).exp())
}

pub(super) fn interpolate_vkk(fl: &Flanked, levels: &[f64], cfg: &InterpolationConfig) -> Result<Conclusion, FriError> {
    let kind = cfg.vkk_distance;
    let mut cuts = Vec::with_capacity(levels.len());
    let mut weights = InterpolationWeights::default();
    for &alpha in levels {
        let dist = |a: &[&FuzzySet], b: &[&FuzzySet]| -> Result<f64, FriError> {
            let d = fuzzy_distance(a, b, alpha, kind)?;
            Ok(match kind {
                DistanceKind::EuclideanEndpoints => 0.5 * (d.d_lower + d.d_upper),
                _ => d.d_lower,
            })
        };
        let d1 = dist(&fl.a1, &fl.obs)?;
        let d2 = dist(&fl.obs, &fl.a2)?;
        let den = d1 + d2;
        let (cb1, cb2) = (fl.b1.alpha_cut(alpha)?, fl.b2.alpha_cut(alpha)?);
        let lambda = if den <= cfg.tol { 0.5 } else { d1 / den };
        if alpha == 0.0 {
            weights.lambda_core = Some(lambda);
        }
        let center = (1.0 - lambda) * cb1.center() + lambda * cb2.center();
        let r1 = width_ratio(&fl.obs, &fl.a1, alpha, cfg.tol)?;
        let r2 = width_ratio(&fl.obs, &fl.a2, alpha, cfg.tol)?;
        let width = (1.0 - lambda) * cb1.width() * r1 + lambda * cb2.width() * r2;
        cuts.push(AlphaCut { alpha, inf: center - 0.5 * width, sup: center + 0.5 * width });
    }
    Ok(Conclusion::family(MethodId::Vkk, cuts, weights))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::*;
    use crate::fuzzy::FuzzySet;

    #[test]
    fn d1_center_and_width() {
        let rb = d1_base();
        let c = interpolate(MethodId::Vkk, &rb, &obs(tri(3.0, 4.0, 5.0)), &InterpolationConfig::default()).unwrap();
        let f = c.as_family().unwrap();
        // support: centres 1, 4, 9 -> lambda 3/8; widths 2, 2, 4 and 3, 3
        let lambda = 3.0 / 8.0;
        let center = (1.0 - lambda) * 2.5 + lambda * 9.5;
        let width = (1.0 - lambda) * 3.0 * 1.0 + lambda * 3.0 * 0.5;
        assert!((f[0].center() - center).abs() < 1e-12);
        assert!((f[0].width() - width).abs() < 1e-12);
    }

    #[test]
    fn trapezoidal_observation_on_triangles_is_not_nested() {
        let rb = base(
            tri(0.0, 1.0, 2.0),
            FuzzySet::trapezoidal(0.0, 1.0, 2.0, 3.0).unwrap(),
            tri(8.0, 9.0, 10.0),
            FuzzySet::trapezoidal(8.0, 9.0, 10.0, 11.0).unwrap(),
            (0.0, 12.0),
            (0.0, 12.0),
        );
        let o = obs(FuzzySet::trapezoidal(4.0, 4.8, 5.2, 6.0).unwrap());
        let cfg = InterpolationConfig::default().with_levels(crate::fuzzy::uniform_levels(101));
        let c = interpolate(MethodId::Vkk, &rb, &o, &cfg).unwrap();
        let f = c.as_family().unwrap();
        let nested = f.windows(2).all(|w| w[0].inf <= w[1].inf + 1e-12 && w[0].sup >= w[1].sup - 1e-12);
        assert!(!nested);
    }
}
