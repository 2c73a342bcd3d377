//! Helpers shared by the integration tests: the published FIS fragment, a
//! document generator and closed forms for two-rule triangular instances.
#![allow(dead_code)]

use fri_core::fis::{MembershipFunction, PartitionDoc, RuleBaseDocument, RuleDoc, ShapeCode};
use fri_core::rulebase::{LinguisticPartition, Rule};
use fri_core::{FuzzySet, RuleBase};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const FRAGMENT: &str = "\
[System]
Name='fig'
NumInputs=2
NumOutputs=1
NumRules=1

[Input1]
Name='x1'
Range=[0 40]
NumMFs=1
MF1='A_{1;1}':'trimf',[10 20 30]|[0 1 0]

[Input2]
Name='x2'
Range=[0 10]
NumMFs=1
MF1='A_{2;1}':'trapmf',[4.5 5 5.5 6]|[0 1 1 0]

[Output1]
Name='y'
Range=[0 1]
NumMFs=1
MF1='B_{1;1}':'singlmf',[0.46]|[1]

[Rules]
1, 1, 1 (1) : 1
";

pub fn label(rng: &mut ChaCha8Rng) -> String {
    const PIECES: [&str; 10] = ["A", "b_{1;2}", "it's", "x y", "%pct", "#hash", "[k]", "µ", "a,b", "=|:"];
    (0..rng.gen_range(1..4)).map(|_| *PIECES.choose(rng).unwrap()).collect()
}

pub fn numeral(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..5) {
        0 => rng.gen_range(-1e6..1e6),
        1 => rng.gen_range(-1.0..1.0) * 10f64.powi(rng.gen_range(-300..300)),
        2 => rng.gen_range(-50i32..50) as f64,
        3 => 0.1 * rng.gen_range(-100i32..100) as f64,
        _ => rng.gen::<f64>(),
    }
}

pub fn sorted(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let base = numeral(rng);
    let mut v = vec![base];
    for _ in 1..n {
        let last = *v.last().unwrap();
        // relative steps stay distinct even next to 1e300
        v.push(last + f64::max(last.abs(), 1.0) * rng.gen_range(1e-3..1.0));
    }
    v
}

pub fn mf(rng: &mut ChaCha8Rng) -> MembershipFunction {
    let shape = *[ShapeCode::Trimf, ShapeCode::Trapmf, ShapeCode::Singlmf, ShapeCode::Pwlmf].choose(rng).unwrap();
    let (params, paramsy) = match shape.canonical_paramsy() {
        Some(y) => (sorted(rng, y.len()), y.to_vec()),
        None => {
            let rise = rng.gen_range(1..4);
            let fall = rng.gen_range(1..4);
            let mut y: Vec<f64> = (0..rise).map(|i| i as f64 / rise as f64).collect();
            y.push(1.0);
            y.extend((0..fall).rev().map(|i| i as f64 / fall as f64));
            (sorted(rng, y.len()), y)
        }
    };
    MembershipFunction { label: label(rng), shape, params, paramsy }
}

pub fn partition(rng: &mut ChaCha8Rng) -> PartitionDoc {
    let range = sorted(rng, 2);
    PartitionDoc { name: label(rng), range: (range[0], range[1]), mfs: (0..rng.gen_range(1..5)).map(|_| mf(rng)).collect() }
}

pub fn document(rng: &mut ChaCha8Rng) -> RuleBaseDocument {
    let inputs: Vec<PartitionDoc> = (0..rng.gen_range(1..4)).map(|_| partition(rng)).collect();
    let output = partition(rng);
    let rules = (0..rng.gen_range(0..6))
        .map(|_| RuleDoc {
            antecedents: inputs.iter().map(|p| rng.gen_range(1..=p.mfs.len())).collect(),
            consequent: rng.gen_range(1..=output.mfs.len()),
            weight: *[1.0, 0.5, rng.gen::<f64>()].choose(rng).unwrap(),
            connective: rng.gen_range(1..=2),
        })
        .collect();
    let default_method = rng.gen_bool(0.5).then(|| "KH".to_string());
    RuleBaseDocument { name: label(rng), default_method, inputs, output, rules, source_text: None }
}

#[derive(Clone, Copy, Debug)]
pub struct Tri(pub f64, pub f64, pub f64);

impl Tri {
    pub fn inf(self, a: f64) -> f64 {
        self.0 + a * (self.1 - self.0)
    }
    pub fn sup(self, a: f64) -> f64 {
        self.2 - a * (self.2 - self.1)
    }
    pub fn set(self) -> FuzzySet {
        FuzzySet::triangular(self.0, self.1, self.2).unwrap()
    }
}

pub fn random_tri(rng: &mut ChaCha8Rng, apex: f64) -> Tri {
    Tri(apex - rng.gen_range(0.1..3.0), apex, apex + rng.gen_range(0.1..3.0))
}

pub fn strictly_less(a: Tri, b: Tri) -> bool {
    a.0 < b.0 && a.1 < b.1 && a.2 < b.2
}

/// Two-rule single-input triangular instance with `A1 < A* < A2`.
pub fn instance(rng: &mut ChaCha8Rng) -> (Tri, Tri, Tri, Tri, Tri) {
    loop {
        let mut at = |lo: f64, hi: f64| {
            let apex = rng.gen_range(lo..hi);
            random_tri(rng, apex)
        };
        let a1 = at(0.0, 5.0);
        let a2 = at(10.0, 15.0);
        let ao = at(a1.1 + 0.5, a2.1 - 0.5);
        let b1 = at(0.0, 5.0);
        let b2 = at(10.0, 15.0);
        if strictly_less(a1, ao) && strictly_less(ao, a2) && strictly_less(b1, b2) {
            return (a1, a2, ao, b1, b2);
        }
    }
}

pub fn rulebase(a1: Tri, a2: Tri, b1: Tri, b2: Tri) -> RuleBase {
    RuleBase {
        inputs: vec![LinguisticPartition::new("x", (-5.0, 20.0), vec![a1.set(), a2.set()])],
        output: LinguisticPartition::new("y", (-5.0, 20.0), vec![b1.set(), b2.set()]),
        rules: vec![Rule::new(vec![0], 0), Rule::new(vec![1], 1)],
    }
}

/// Linear interpolation of endpoints with the distances swapped across.
pub fn kh_oracle(a1: Tri, a2: Tri, ao: Tri, b1: Tri, b2: Tri, alpha: f64) -> (f64, f64) {
    let (l1, l2) = ((ao.inf(alpha) - a1.inf(alpha)).abs(), (a2.inf(alpha) - ao.inf(alpha)).abs());
    let (u1, u2) = ((ao.sup(alpha) - a1.sup(alpha)).abs(), (a2.sup(alpha) - ao.sup(alpha)).abs());
    ((l2 * b1.inf(alpha) + l1 * b2.inf(alpha)) / (l1 + l2), (u2 * b1.sup(alpha) + u1 * b2.sup(alpha)) / (u1 + u2))
}

/// Centre blend by centre distances; widths scale by the support-width ratio,
/// which for triangles equals the cut-width ratio at every level.
pub fn vkk_oracle(a1: Tri, a2: Tri, ao: Tri, b1: Tri, b2: Tri, alpha: f64) -> (f64, f64) {
    let c = |t: Tri| 0.5 * (t.inf(alpha) + t.sup(alpha));
    let w = |t: Tri| t.sup(alpha) - t.inf(alpha);
    let (d1, d2) = ((c(ao) - c(a1)).abs(), (c(a2) - c(ao)).abs());
    let lambda = d1 / (d1 + d2);
    let centre = (1.0 - lambda) * c(b1) + lambda * c(b2);
    let sw = |t: Tri| t.2 - t.0;
    let width = (1.0 - lambda) * w(b1) * sw(ao) / sw(a1) + lambda * w(b2) * sw(ao) / sw(a2);
    (centre - 0.5 * width, centre + 0.5 * width)
}

