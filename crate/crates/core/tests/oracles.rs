//! Library results against independent closed forms and brute-force sums.

mod common;

use common::{instance, kh_oracle, rulebase, vkk_oracle, Tri};
use fri_core::fuzzy::uniform_levels;
use fri_core::{interpolate, FuzzySet, InterpolationConfig, MethodId, Observation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn kh_and_vkk_match_closed_forms_at_every_dense_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dense = uniform_levels(1001);
    for _ in 0..100 {
        let (a1, a2, ao, b1, b2) = instance(&mut rng);
        let rb = rulebase(a1, a2, b1, b2);
        let obs = Observation::new(vec![ao.set()]);
        let cfg = InterpolationConfig::default().with_levels(dense.clone());
        for (method, oracle) in [
            (MethodId::Kh, kh_oracle as fn(Tri, Tri, Tri, Tri, Tri, f64) -> (f64, f64)),
            (MethodId::KhStab, kh_oracle),
            (MethodId::Vkk, vkk_oracle),
        ] {
            let c = interpolate(method, &rb, &obs, &cfg).unwrap();
            for cut in c.as_family().unwrap() {
                let (inf, sup) = oracle(a1, a2, ao, b1, b2, cut.alpha);
                assert!((cut.inf - inf).abs() < 1e-9 && (cut.sup - sup).abs() < 1e-9, "{method} at {}", cut.alpha);
            }
        }
    }
}

#[test]
fn kh_on_the_small_worked_case_is_rational_in_alpha() {
    // A1 = (0,1,2), A2 = (7,9,11), A* = (3,4,5), B1 = (1,2,4), B2 = (8,10,11)
    let (a1, a2, ao) = (Tri(0.0, 1.0, 2.0), Tri(7.0, 9.0, 11.0), Tri(3.0, 4.0, 5.0));
    let (b1, b2) = (Tri(1.0, 2.0, 4.0), Tri(8.0, 10.0, 11.0));
    let rb = rulebase(a1, a2, b1, b2);
    let cfg = InterpolationConfig::default().with_levels(uniform_levels(11));
    let c = interpolate(MethodId::Kh, &rb, &Observation::new(vec![ao.set()]), &cfg).unwrap();
    for cut in c.as_family().unwrap() {
        let a = cut.alpha;
        assert!((cut.inf - (a + 4.0)).abs() < 1e-12);
        assert!((cut.sup - (2.0 * a * a - 19.0 * a + 57.0) / (9.0 - a)).abs() < 1e-12);
    }
}

fn centroid_by_sum(s: &FuzzySet) -> f64 {
    let (lo, hi) = s.support();
    let n = 1_000_000;
    let h = (hi - lo) / n as f64;
    let (mut m, mut a) = (0.0, 0.0);
    for i in 0..=n {
        let x = lo + i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let mu = s.membership(x);
        m += w * x * mu;
        a += w * mu;
    }
    m / a
}

#[test]
fn representative_value_is_the_centroid() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let mut p: Vec<f64> = (0..4).map(|_| rng.gen_range(-10.0..10.0)).collect();
        p.sort_by(f64::total_cmp);
        let s = if rng.gen_bool(0.5) {
            FuzzySet::trapezoidal(p[0], p[1], p[2], p[3]).unwrap()
        } else {
            FuzzySet::triangular(p[0], p[1], p[3]).unwrap()
        };
        assert!((s.representative_value().unwrap() - centroid_by_sum(&s)).abs() < 1e-8, "{s}");
    }
}

#[test]
fn polar_cut_of_a_triangle_about_its_apex() {
    let (a, b, c) = (2.0, 5.0, 6.5);
    let s = FuzzySet::triangular(a, b, c).unwrap();
    for aspect in [1.0, 4.0] {
        for k in 1..180 {
            let theta = k as f64 * PI / 180.0;
            let (st, ct) = theta.sin_cos();
            let want = if theta < PI / 2.0 {
                aspect / (st + aspect * ct / (c - b))
            } else {
                aspect / (st - aspect * ct / (b - a))
            };
            let got = s.polar_cut_about(b, theta, aspect);
            assert!(got.hit);
            assert!((got.rho - want).abs() < 1e-9, "theta {theta}: {} vs {want}", got.rho);
        }
    }
}
