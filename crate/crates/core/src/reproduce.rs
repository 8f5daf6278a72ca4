//! One-command reproductions of the separation examples and of the binary
//! approximation guarantee, each checked against its closed form.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dist::{Component, MixtureDistribution};
use crate::error::{Error, Result};
use crate::linearize::{shrink_values, SHRINK_TARGET};
use crate::lowerbound::{
    density_floor_check, hard_instance_binary, interval_cover_check, opt_lower_bound_binary, QuadConfig,
};
use crate::offset::{tail_slack, theta, threshold_regret};
use crate::policy::{striped_policy, BinaryRandomizedPolicy, OffsetPolicy};
use crate::regret::binary_worstcase;

pub const DEFAULT_SLABS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    Expectation,
    Deterministic,
    Monotone,
    Symmetric,
    Binary24,
    /// Rescales a value vector until the no-pick constraint holds.
    Shrink,
}

impl std::str::FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| Error::InvalidParameter(format!("unknown example {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Within the report tolerance.
    Approx,
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub value: f64,
    pub relation: Relation,
    /// Where the figure comes from.
    pub basis: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproductionReport {
    pub example: Example,
    pub parameters: BTreeMap<String, Value>,
    pub computed: BTreeMap<String, f64>,
    pub expected: BTreeMap<String, Expected>,
    pub tolerance: f64,
    pub failures: Vec<String>,
    pub pass: bool,
}

impl ReproductionReport {
    fn new(example: Example, tolerance: f64) -> Self {
        ReproductionReport {
            example,
            parameters: BTreeMap::new(),
            computed: BTreeMap::new(),
            expected: BTreeMap::new(),
            tolerance,
            failures: vec![],
            pass: true,
        }
    }

    fn param(&mut self, k: &str, v: Value) {
        self.parameters.insert(k.into(), v);
    }

    fn put(&mut self, k: &str, v: f64) {
        self.computed.insert(k.into(), v);
    }

    fn expect(&mut self, k: &str, value: f64, relation: Relation, basis: &str) {
        self.expected.insert(k.into(), Expected { value, relation, basis: basis.into() });
    }

    /// Compares every expectation with its computed value.
    fn finish(mut self) -> Self {
        let tol = self.tolerance;
        for (k, e) in &self.expected {
            let ok = match self.computed.get(k) {
                None => false,
                Some(&x) => match e.relation {
                    Relation::Approx => (x - e.value).abs() <= tol,
                    Relation::AtMost => x <= e.value + tol,
                    Relation::AtLeast => x >= e.value - tol,
                },
            };
            if !ok {
                self.failures.push(format!(
                    "{k}: computed {:?}, expected {:?} {}",
                    self.computed.get(k),
                    e.relation,
                    e.value
                ));
            }
        }
        self.pass = self.failures.is_empty();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceParams {
    pub c: f64,
    pub slabs: usize,
    pub alpha: f64,
    pub seed: u64,
    pub count: usize,
    pub samples: u64,
    /// Overrides the example's default noises where it takes any.
    pub noises: Option<Vec<MixtureDistribution>>,
    pub values: Option<Vec<f64>>,
}

impl Default for ReproduceParams {
    fn default() -> Self {
        ReproduceParams {
            c: 6f64.exp(),
            slabs: DEFAULT_SLABS,
            alpha: 0.125,
            seed: 7,
            count: 20,
            samples: 100_000,
            noises: None,
            values: None,
        }
    }
}

pub fn reproduce(example: Example, p: &ReproduceParams) -> Result<ReproductionReport> {
    match example {
        Example::Expectation => expectation(p),
        Example::Deterministic => deterministic(),
        Example::Monotone => monotone(p),
        Example::Symmetric => symmetric(p),
        Example::Binary24 => binary24(p),
        Example::Shrink => shrink(p),
    }
}

/// Smallest worst-case regret over threshold rules "pick iff s >= t".
///
/// Candidates are a grid over the support widened by one span, every knot
/// and its neighbours a hair either side, midpoints between knots, and θ.
pub fn best_threshold(a: &MixtureDistribution) -> (f64, f64) {
    let (lo, hi) = a.support();
    let span = (hi - lo).max(1.0);
    let mut ts: Vec<f64> = (0..=4000).map(|j| lo - span + (hi - lo + 2.0 * span) * j as f64 / 4000.0).collect();
    let knots = a.knots();
    for &k in knots {
        let eps = 1e-9 * (1.0 + k.abs());
        ts.extend([k - eps, k, k + eps]);
    }
    ts.extend(knots.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    ts.push(theta(a).theta);
    ts.into_iter()
        .map(|t| (t, threshold_regret(a, t)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or((0.0, f64::INFINITY))
}

fn expectation(p: &ReproduceParams) -> Result<ReproductionReport> {
    if !(p.c > 1.0) {
        return Err(Error::InvalidParameter(format!("c must exceed 1, got {}", p.c)));
    }
    let mut r = ReproductionReport::new(Example::Expectation, 2e-3);
    r.param("c", json!(p.c));
    r.param("slabs", json!(p.slabs));
    let ratio_at = |c: f64| -> Result<(f64, f64, f64, f64)> {
        let a = MixtureDistribution::equal_revenue(c, p.slabs)?;
        let th = theta(&a).theta;
        let greedy = threshold_regret(&a, 0.0);
        let offset = threshold_regret(&a, th);
        Ok((th, greedy, offset, greedy / offset))
    };
    let (th, greedy, offset, ratio) = ratio_at(p.c)?;
    let larger = p.c * 2f64.exp();
    let (_, _, _, ratio_larger) = ratio_at(larger)?;
    r.param("larger_c", json!(larger));
    let l = p.c.ln();
    let z = 2.0 + l;
    r.put("theta", th);
    r.put("greedy_regret", greedy);
    r.put("offset_regret", offset);
    r.put("ratio", ratio);
    r.put("ratio_growth", ratio_larger - ratio);
    r.expect("theta", -l / z, Relation::Approx, "-ln c / (2 + ln c)");
    r.expect("greedy_regret", (1.0 + l) / z, Relation::Approx, "Pr[a = -1] at v = 1");
    r.expect("offset_regret", (1.0 + l) / z * (1.0 - l / z), Relation::Approx, "Pr[a = -1] (θ + 1)");
    r.expect("ratio", z / 2.0, Relation::Approx, "(2 + ln c) / 2");
    r.expect("ratio_growth", 0.0, Relation::AtLeast, "ratio increases with c");
    let mut r = r.finish();
    if ratio_larger <= ratio {
        r.failures.push("ratio does not grow with c".into());
        r.pass = false;
    }
    Ok(r)
}

fn two_point() -> MixtureDistribution {
    MixtureDistribution::new(vec![Component::atom(-1.0, 0.5), Component::atom(1.0, 0.5)])
        .expect("two-point noise is valid")
}

fn deterministic() -> Result<ReproductionReport> {
    let a = two_point();
    let mut r = ReproductionReport::new(Example::Deterministic, 1e-9);
    let lin = BinaryRandomizedPolicy::clamped_linear(0.5, 0.5)?;
    let randomized = binary_worstcase(&a, &lin).regret;
    let (t, best) = best_threshold(&a);
    r.param("noise", json!(a));
    r.put("randomized_regret", randomized);
    r.put("best_threshold", t);
    r.put("threshold_regret", best);
    r.put("ratio", best / randomized);
    r.expect("randomized_regret", 0.25, Relation::Approx, "min((s + 1)/2, 1) rule");
    r.expect("threshold_regret", 0.5, Relation::AtLeast, "every threshold errs at v = ±1");
    r.expect("ratio", 2.0, Relation::AtLeast, "separation factor");
    Ok(r.finish())
}

/// `U[-1, -1 + α] ∪ [1 - α, 1]` with equal halves.
pub fn monotone_noise(alpha: f64) -> Result<MixtureDistribution> {
    MixtureDistribution::new(vec![
        Component::uniform(-1.0, -1.0 + alpha, 0.5),
        Component::uniform(1.0 - alpha, 1.0, 0.5),
    ])
}

fn monotone(p: &ReproduceParams) -> Result<ReproductionReport> {
    let alpha = p.alpha;
    let pol = striped_policy(alpha)?;
    let a = monotone_noise(alpha)?;
    let mut r = ReproductionReport::new(Example::Monotone, 1e-6);
    r.param("alpha", json!(alpha));
    let striped = binary_worstcase(&a, &pol).regret;
    let (t, best) = best_threshold(&a);
    r.put("striped_regret", striped);
    r.put("best_threshold", t);
    r.put("threshold_regret", best);
    r.put("ratio", best / striped);
    r.expect("striped_regret", 0.25 + alpha / 2.0, Relation::AtMost, "1/4 + α/2");
    r.expect("threshold_regret", (1.0 - alpha) / 2.0, Relation::AtLeast, "(1 - α)/2");
    r.expect("ratio", 2.0 - 6.0 * alpha, Relation::AtLeast, "2 - ε with ε = 6α");
    Ok(r.finish())
}

/// Two random components and their mirror images.
pub fn symmetric_mixture(seed: u64) -> MixtureDistribution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comps = vec![];
    for _ in 0..2 {
        let w = rng.random_range(0.1..1.0);
        let c = if rng.random_bool(0.5) {
            Component::atom(rng.random_range(0.1..2.0), w)
        } else {
            let lo = rng.random_range(-1.0..1.5);
            Component::uniform(lo, lo + rng.random_range(0.1..1.0), w)
        };
        let mirror = match c {
            Component::Atom { at, weight } => Component::atom(-at, weight),
            Component::Uniform { lo, hi, weight } => Component::uniform(-hi, -lo, weight),
        };
        comps.extend([c, mirror]);
    }
    MixtureDistribution::normalized(comps).expect("mirrored components are valid")
}

pub fn symmetric_suite(seed: u64) -> Vec<MixtureDistribution> {
    vec![MixtureDistribution::uniform(-1.0, 1.0).expect("valid"), two_point(), symmetric_mixture(seed)]
}

fn symmetric(p: &ReproduceParams) -> Result<ReproductionReport> {
    let noises = p.noises.clone().unwrap_or_else(|| symmetric_suite(p.seed));
    let mut r = ReproductionReport::new(Example::Symmetric, 1e-6);
    r.param("seed", json!(p.seed));
    r.param("samples", json!(p.samples));
    r.param("noises", json!(noises));
    let thetas: Vec<f64> = noises.iter().map(|a| theta(a).theta).collect();
    let max_abs = thetas.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let offset = OffsetPolicy::new(thetas);
    let greedy = OffsetPolicy::greedy(noises.len());
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut disagree = 0u64;
    let mut s = vec![0.0; noises.len()];
    for _ in 0..p.samples {
        for (x, a) in s.iter_mut().zip(&noises) {
            *x = rng.random_range(-1.0..1.0) + a.sample(&mut rng);
        }
        if offset.select(&s)? != greedy.select(&s)? {
            disagree += 1;
        }
    }
    r.put("max_abs_theta", max_abs);
    r.put("disagreements", disagree as f64);
    r.expect("max_abs_theta", 0.0, Relation::Approx, "θ = 0 for symmetric noise");
    r.expect("disagreements", 0.0, Relation::AtMost, "offset rule equals greedy");
    Ok(r.finish())
}

/// Random mixture with `components` pieces: atoms in `[-2, 2]` or uniforms
/// of width `[0.05, 1.5]`, random weights.
pub fn random_mixture<R: Rng + ?Sized>(rng: &mut R, components: usize) -> MixtureDistribution {
    let comps = (0..components)
        .map(|_| {
            let w = rng.random_range(0.1..1.0);
            let x = rng.random_range(-2.0..2.0);
            if rng.random_bool(0.4) {
                Component::atom(x, w)
            } else {
                Component::uniform(x, x + rng.random_range(0.05..1.5), w)
            }
        })
        .collect();
    MixtureDistribution::normalized(comps).expect("random components are valid")
}

/// `count` random mixtures with 2 to 5 components.
pub fn random_suite(seed: u64, count: usize) -> Vec<MixtureDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.random_range(2..=5);
            random_mixture(&mut rng, k)
        })
        .collect()
}

fn binary24(p: &ReproduceParams) -> Result<ReproductionReport> {
    let suite = p.noises.clone().unwrap_or_else(|| random_suite(p.seed, p.count));
    let mut r = ReproductionReport::new(Example::Binary24, 0.0);
    r.param("seed", json!(p.seed));
    r.param("count", json!(suite.len()));
    let n = suite.len() as f64;
    let (mut ratio_ok, mut positive, mut cover, mut floor) = (0.0, 0.0, 0.0, 0.0);
    let mut max_ratio = 0.0f64;
    let mut min_tail = f64::INFINITY;
    for a in &suite {
        let prof = theta(a);
        for lam in [1.5, 2.0, 4.0, 8.0] {
            min_tail = min_tail.min(tail_slack(a, &prof, lam));
        }
        match opt_lower_bound_binary(a, &QuadConfig::default()) {
            Ok(b) => {
                max_ratio = max_ratio.max(b.ratio);
                ratio_ok += b.ratio_ok as u8 as f64;
                positive += (b.bound > 0.0 || b.offset_regret == 0.0) as u8 as f64;
                let h = hard_instance_binary(a)?;
                cover += interval_cover_check(&h).pass as u8 as f64;
                floor += density_floor_check(&h, 33)?.pass as u8 as f64;
            }
            Err(Error::DegenerateProfile(_)) if prof.regret() == 0.0 => {
                ratio_ok += 1.0;
                positive += 1.0;
                cover += 1.0;
                floor += 1.0;
            }
            Err(e) => return Err(e),
        }
    }
    r.put("max_ratio", max_ratio);
    r.put("ratio_ok", ratio_ok);
    r.put("positive_bounds", positive);
    r.put("cover_ok", cover);
    r.put("floor_ok", floor);
    r.put("min_tail_slack", min_tail);
    r.expect("ratio_ok", n, Relation::Approx, "ratio at most 24 on every instance");
    r.expect("positive_bounds", n, Relation::Approx, "bound positive when offset regret is");
    r.expect("cover_ok", n, Relation::Approx, "windows tile the overlap");
    r.expect("floor_ok", n, Relation::Approx, "density floor");
    r.expect("min_tail_slack", -1e-9, Relation::AtLeast, "tail inequality");
    Ok(r.finish())
}

fn shrink(p: &ReproduceParams) -> Result<ReproductionReport> {
    let noises = p.noises.clone().ok_or_else(|| Error::InvalidParameter("shrink needs noises".into()))?;
    let values = p.values.clone().ok_or_else(|| Error::InvalidParameter("shrink needs values".into()))?;
    let thetas: Vec<f64> = noises.iter().map(|a| theta(a).theta).collect();
    let s = shrink_values(&noises, &thetas, &values, SHRINK_TARGET)?;
    let mut r = ReproductionReport::new(Example::Shrink, 1e-9);
    r.param("values", json!(values));
    r.param("shrunk_values", json!(s.values));
    r.put("multiplier", s.multiplier);
    r.put("pick_prob", s.pick_prob);
    r.put("sum_p", s.sum_p);
    r.expect("pick_prob", SHRINK_TARGET, Relation::AtMost, "no-pick constraint 1/2.55");
    r.expect("sum_p", 0.5, Relation::AtMost, "implied budget");
    Ok(r.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples_pass() {
        let p = ReproduceParams { slabs: 2000, ..Default::default() };
        for ex in [Example::Expectation, Example::Deterministic, Example::Monotone] {
            let r = reproduce(ex, &p).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn symmetric_passes() {
        let p = ReproduceParams { samples: 5000, ..Default::default() };
        let r = reproduce(Example::Symmetric, &p).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.computed["max_abs_theta"], 0.0);
    }

    #[test]
    fn binary24_small_suite() {
        let p = ReproduceParams { count: 5, ..Default::default() };
        let r = reproduce(Example::Binary24, &p).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn shrink_needs_inputs() {
        assert!(reproduce(Example::Shrink, &ReproduceParams::default()).is_err());
        let u = MixtureDistribution::uniform(-1.0, 1.0).unwrap();
        let p = ReproduceParams {
            noises: Some(vec![MixtureDistribution::atom(0.0), u.clone(), u]),
            values: Some(vec![0.0, -0.05, -0.1]),
            ..Default::default()
        };
        let r = reproduce(Example::Shrink, &p).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.computed["multiplier"] > 1.0);
    }

    #[test]
    fn example_names() {
        assert_eq!("binary24".parse::<Example>().unwrap(), Example::Binary24);
        assert!("nope".parse::<Example>().is_err());
    }

    #[test]
    fn symmetric_mixture_is_symmetric() {
        let d = symmetric_mixture(3);
        assert_eq!(d.negate(), d);
        assert_eq!(d.components().len(), 4);
    }
}
