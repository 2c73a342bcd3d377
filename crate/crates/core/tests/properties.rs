use fri_core::bench::{search_sample, SKELETONS};
use fri_core::fuzzy::{normalize_levels, uniform_levels};
use fri_core::rulebase::{select_flanking, LinguisticPartition, Rule};
use fri_core::{interpolate, FuzzySet, InterpolationConfig, MethodId, Observation, RuleBase};
use proptest::prelude::*;

/// Breakpoint offsets of a triangle or trapezoid relative to its left end.
fn shape() -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        (0.1..3.0f64, 0.1..3.0f64).prop_map(|(l, r)| vec![0.0, l, l + r]),
        (0.1..3.0f64, 0.0..2.0f64, 0.1..3.0f64).prop_map(|(l, c, r)| vec![0.0, l, l + c, l + c + r]),
    ]
}

fn place(offsets: &[f64], at: f64) -> FuzzySet {
    let p: Vec<f64> = offsets.iter().map(|o| o + at).collect();
    if p.len() == 3 {
        FuzzySet::triangular(p[0], p[1], p[2]).unwrap()
    } else {
        FuzzySet::trapezoidal(p[0], p[1], p[2], p[3]).unwrap()
    }
}

fn two_rules(a1: FuzzySet, a2: FuzzySet, b1: FuzzySet, b2: FuzzySet, xr: (f64, f64), yr: (f64, f64)) -> RuleBase {
    RuleBase {
        inputs: vec![LinguisticPartition::new("x", xr, vec![a1, a2])],
        output: LinguisticPartition::new("y", yr, vec![b1, b2]),
        rules: vec![Rule::new(vec![0], 0), Rule::new(vec![1], 1)],
    }
}

fn close(c: &fri_core::Conclusion, want: &FuzzySet, tol: f64) -> Result<(), TestCaseError> {
    let got = c.to_shape().ok_or_else(|| TestCaseError::fail(format!("{} gave no valid set", c.method)))?;
    let d = got.max_membership_deviation(want, 101);
    prop_assert!(d <= tol, "{}: {} vs {} (deviation {d})", c.method, got, want);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Congruent rules and an observation halfway between them: every
    /// method returns the consequent shape halfway between the consequents.
    #[test]
    fn midpoint_symmetry(sa in shape(), sb in shape(), p1 in 0.0..5.0f64, gap in 8.0..20.0f64, q1 in 0.0..5.0f64, qgap in 8.0..20.0f64) {
        let rb = two_rules(place(&sa, p1), place(&sa, p1 + gap), place(&sb, q1), place(&sb, q1 + qgap), (0.0, 40.0), (0.0, 40.0));
        let obs = Observation::new(vec![place(&sa, p1 + 0.5 * gap)]);
        let want = place(&sb, q1 + 0.5 * qgap);
        for m in MethodId::ALL {
            close(&interpolate(m, &rb, &obs, &InterpolationConfig::default()).unwrap(), &want, 1e-9)?;
        }
    }

    /// An observation equal to a rule antecedent reproduces its consequent.
    #[test]
    fn compatibility(sa1 in shape(), sa2 in shape(), sb1 in shape(), sb2 in shape(), gap in 8.0..20.0f64, pick in 0usize..2) {
        let (a, b) = ([place(&sa1, 1.0), place(&sa2, 1.0 + gap)], [place(&sb1, 2.0), place(&sb2, 2.0 + gap)]);
        let rb = two_rules(a[0].clone(), a[1].clone(), b[0].clone(), b[1].clone(), (0.0, 40.0), (0.0, 40.0));
        let obs = Observation::new(vec![a[pick].clone()]);
        for m in MethodId::ALL {
            close(&interpolate(m, &rb, &obs, &InterpolationConfig::default()).unwrap(), &b[pick], 1e-9)?;
        }
    }

    /// Ratios stay in [0, 1] and the robust methods return valid sets.
    #[test]
    fn ratios_bounded_and_robust_methods_cnf(ex in 0usize..7, it in 0u64..100_000) {
        let inst = search_sample(SKELETONS[ex].id, 3, it).unwrap();
        for m in MethodId::ALL {
            let c = interpolate(m, &inst.rb, &inst.obs, &InterpolationConfig::default()).unwrap();
            let w = &c.weights;
            for l in [w.lambda_core, w.lambda_left, w.lambda_right, w.lambda_rep].into_iter().flatten() {
                prop_assert!((0.0..=1.0).contains(&l), "{m}: lambda {l}");
            }
            if matches!(m, MethodId::Maci | MethodId::ScaleMove | MethodId::Crf | MethodId::Imul | MethodId::Gm) {
                prop_assert!(c.as_shape().is_some_and(|s| s.is_cnf().is_cnf()), "{m} not CNF");
            }
        }
    }

    /// Moving the input axis changes nothing; moving the output axis moves
    /// the conclusion with it.
    #[test]
    fn translation_equivariance(ex in 0usize..7, it in 0u64..10_000, dx in -50.0..50.0f64, dy in -50.0..50.0f64) {
        let inst = search_sample(SKELETONS[ex].id, 9, it).unwrap();
        let shift = |p: &LinguisticPartition, d: f64| LinguisticPartition::new(
            p.name.clone(),
            (p.range.0 + d, p.range.1 + d),
            p.terms.iter().map(|t| t.shifted(d)).collect(),
        );
        let moved = RuleBase {
            inputs: inst.rb.inputs.iter().map(|p| shift(p, dx)).collect(),
            output: shift(&inst.rb.output, dy),
            rules: inst.rb.rules.clone(),
        };
        let obs = Observation::new(inst.obs.sets.iter().map(|s| s.shifted(dx)).collect());
        let cfg = InterpolationConfig::default();
        for m in MethodId::ALL {
            let a = interpolate(m, &inst.rb, &inst.obs, &cfg).unwrap();
            let b = interpolate(m, &moved, &obs, &cfg).unwrap();
            let (sa, sb) = (a.summary(), b.summary());
            for (x, y) in [(sa.0, sb.0), (sa.1, sb.1), (sa.2, sb.2), (sa.3, sb.3)] {
                prop_assert!((x + dy - y).abs() < 1e-8 * (1.0 + x.abs()), "{m}: {sa:?} shifted by {dy} vs {sb:?}");
            }
        }
    }

    /// Adding cut levels leaves the cuts at the original levels unchanged
    /// for the level-wise methods.
    #[test]
    fn refinement_invariance(ex in 0usize..7, it in 0u64..10_000, extra in 2usize..50) {
        let inst = search_sample(SKELETONS[ex].id, 5, it).unwrap();
        let base = InterpolationConfig::default();
        for m in [MethodId::Kh, MethodId::KhStab, MethodId::Vkk] {
            let coarse = interpolate(m, &inst.rb, &inst.obs, &base).unwrap();
            let cuts = coarse.as_family().unwrap();
            let mut levels: Vec<f64> = cuts.iter().map(|c| c.alpha).collect();
            levels.extend(uniform_levels(extra));
            let fine = interpolate(m, &inst.rb, &inst.obs, &base.clone().with_levels(normalize_levels(levels))).unwrap();
            for c in cuts {
                let f = fine.as_family().unwrap().iter().find(|k| k.alpha == c.alpha).unwrap();
                prop_assert!((f.inf - c.inf).abs() < 1e-12 && (f.sup - c.sup).abs() < 1e-12, "{m} at {}", c.alpha);
            }
        }
    }

    /// Generated observations are flanked by one pair of rules in every input.
    #[test]
    fn generated_observations_are_flanked(ex in 0usize..7, it in 0u64..100_000) {
        let inst = search_sample(SKELETONS[ex].id, 1, it).unwrap();
        let levels = inst.rb.breakpoint_levels(Some(&inst.obs));
        let pair = select_flanking(&inst.rb, &inst.obs, &levels).unwrap();
        prop_assert_eq!(pair.lower + 1, pair.upper);
    }

    /// Cuts of a valid set are nested.
    #[test]
    fn cuts_are_nested(s in shape(), at in -10.0..10.0f64, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let set = place(&s, at);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (cl, ch) = (set.alpha_cut(lo).unwrap(), set.alpha_cut(hi).unwrap());
        prop_assert!(cl.inf <= ch.inf && ch.sup <= cl.sup && ch.inf <= ch.sup);
    }
}
