//! Quick sweep of the invariants every module promises, on seeded inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::MixtureDistribution;
use crate::error::{Error, Result};
use crate::linearize::{solve_linearized, verify_structure, DEFAULT_BUDGET};
use crate::lowerbound::{
    density_floor_check, hard_instance_binary, interval_cover_check, opt_lower_bound_binary, QuadConfig,
};
use crate::offset::{tail_slack, theta, threshold_regret};
use crate::policy::{BinaryRandomizedPolicy, OffsetPolicy};
use crate::regret::{
    binary_worstcase, exact_regret_atoms, mc_regret, reduction_check, regret_exact, Evaluator, Instance,
    DEFAULT_OUTCOME_CAP,
};
use crate::reproduce::{random_mixture, random_suite, symmetric_mixture};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub module: String,
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// First failing case, if any.
    pub detail: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

struct Tally {
    module: &'static str,
    name: &'static str,
    cases: usize,
    failures: usize,
    detail: Option<String>,
}

impl Tally {
    fn new(module: &'static str, name: &'static str) -> Self {
        Tally { module, name, cases: 0, failures: 0, detail: None }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            self.detail.get_or_insert_with(detail);
        }
    }

    fn done(self) -> Check {
        Check {
            module: self.module.into(),
            name: self.name.into(),
            cases: self.cases,
            failures: self.failures,
            detail: self.detail,
            pass: self.failures == 0,
        }
    }
}

fn random_atoms<R: Rng>(rng: &mut R, k: usize) -> MixtureDistribution {
    let comps =
        (0..k).map(|_| crate::dist::Component::atom(rng.random_range(-2.0..2.0), rng.random_range(0.1..1.0))).collect();
    MixtureDistribution::normalized(comps).expect("atoms are valid")
}

pub fn selftest(seed: u64) -> Result<SelftestReport> {
    let suite = random_suite(seed, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e1f);
    let mut checks = vec![];

    let mut t = Tally::new("dist", "json_round_trip");
    for d in &suite {
        let back: MixtureDistribution = serde_json::from_str(&serde_json::to_string(d)?)?;
        t.record(back == *d, || format!("{d:?}"));
    }
    checks.push(t.done());

    let mut t = Tally::new("dist", "cdf_complements");
    for d in &suite {
        for x in d.knots().iter().copied().chain([0.0, 0.37, -1.3]) {
            let ok = (d.prob_le(x) + d.prob_gt(x) - 1.0).abs() < 1e-12
                && (d.prob_lt(x) + d.prob_ge(x) - 1.0).abs() < 1e-12
                && d.prob_lt(x) <= d.prob_le(x);
            t.record(ok, || format!("x = {x} in {d:?}"));
        }
    }
    checks.push(t.done());

    let mut t = Tally::new("offset", "tail_inequality");
    let mut shift = Tally::new("offset", "shift_and_negate_equivariance");
    let mut balance = Tally::new("offset", "attains_balance");
    for d in &suite {
        let p = theta(d);
        for lam in [1.5, 2.0, 4.0, 8.0] {
            let s = tail_slack(d, &p, lam);
            t.record(s >= -1e-9, || format!("slack {s} at λ = {lam}"));
        }
        let scale = 1.0 + d.span();
        let ts = theta(&d.shift(0.75)).theta;
        let tn = theta(&d.negate()).theta;
        shift.record((ts - p.theta - 0.75).abs() <= 1e-7 * scale && (tn + p.theta).abs() <= 1e-7 * scale, || {
            format!("θ = {}, shifted {ts}, negated {tn}", p.theta)
        });
        let r = threshold_regret(d, p.theta);
        balance.record((r - p.regret()).abs() <= 1e-9 && p.balance_gap.abs() <= 1e-6, || format!("{p:?}"));
    }
    checks.extend([t.done(), shift.done(), balance.done()]);

    let mut t = Tally::new("offset", "symmetric_noise_has_zero_offset");
    for s in 0..4 {
        let d = symmetric_mixture(seed + s);
        let th = theta(&d).theta;
        t.record(th.abs() <= 1e-6, || format!("θ = {th}"));
    }
    checks.push(t.done());

    let mut t = Tally::new("policy", "offset_pick_shift_invariant");
    for _ in 0..200 {
        let n = rng.random_range(2..6);
        let pol = OffsetPolicy::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let c = rng.random_range(-5.0..5.0);
        let moved: Vec<f64> = s.iter().map(|x| x + c).collect();
        let (a, b) = (pol.select(&s)?, pol.select(&moved)?);
        // Shifting may round a near tie either way.
        let tie = {
            let scores: Vec<f64> = s.iter().zip(&pol.thetas).map(|(x, t)| x - t).collect();
            (scores[a] - scores[b]).abs() < 1e-12
        };
        t.record(a == b || tie, || format!("{s:?} + {c}"));
    }
    checks.push(t.done());

    let mut t = Tally::new("regret", "binary_worstcase_dominates_grid");
    for d in suite.iter().take(6) {
        let pol = BinaryRandomizedPolicy::clamped_linear(0.4, 0.5)?;
        let w = binary_worstcase(d, &pol).regret;
        let worst = (-400..=400).map(|j| crate::regret::binary_regret(d, &pol, j as f64 * 0.01)).fold(0.0, f64::max);
        t.record(worst <= w + 1e-12, || format!("grid {worst} above {w}"));
    }
    checks.push(t.done());

    let mut t = Tally::new("regret", "exact_evaluators_agree");
    let mut mc = Tally::new("regret", "monte_carlo_within_4se");
    for _ in 0..6 {
        let n = rng.random_range(2..=3);
        let noises: Vec<_> = (0..n)
            .map(|_| {
                let k = rng.random_range(1..=3);
                random_atoms(&mut rng, k)
            })
            .collect();
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let pol = OffsetPolicy::new(noises.iter().map(|d| theta(d).theta).collect());
        let inst = Instance::new(noises.clone(), Some(values.clone()))?;
        let e1 = exact_regret_atoms(&inst, &pol, DEFAULT_OUTCOME_CAP)?;
        let e2 = regret_exact(&noises, &values, &pol)?;
        t.record((e1 - e2).abs() <= 1e-9, || format!("{e1} vs {e2}"));
        let est = mc_regret(&inst, &pol, 20_000, seed)?;
        mc.record((est.value - e1).abs() <= 4.0 * est.std_error + 1e-12, || format!("{est:?} vs {e1}"));
    }
    checks.extend([t.done(), mc.done()]);

    let mut t = Tally::new("regret", "reduction_inequality");
    for n in [2usize, 3, 5] {
        let noises: Vec<_> = (0..n).map(|_| random_mixture(&mut rng, 3)).collect();
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let r = reduction_check(&noises, &values, Evaluator::MonteCarlo { samples: 20_000, seed })?;
        t.record(r.pass, || format!("{r:?}"));
    }
    checks.push(t.done());

    let mut ratio = Tally::new("lowerbound", "binary_ratio_24");
    let mut cover = Tally::new("lowerbound", "interval_cover");
    let mut floor = Tally::new("lowerbound", "density_floor");
    for d in suite.iter().take(8) {
        match opt_lower_bound_binary(d, &QuadConfig::default()) {
            Ok(r) => {
                ratio.record(r.ratio_ok && r.bound <= r.offset_regret + 1e-12, || format!("{r:?}"));
                let h = hard_instance_binary(d)?;
                let c = interval_cover_check(&h);
                cover.record(c.pass, || format!("{c:?}"));
                let f = density_floor_check(&h, 17)?;
                floor.record(f.pass, || format!("{f:?}"));
            }
            Err(Error::DegenerateProfile(_)) => {}
            Err(e) => return Err(e),
        }
    }
    checks.extend([ratio.done(), cover.done(), floor.done()]);

    let mut t = Tally::new("linearize", "feasible_with_index_set");
    let mut st = Tally::new("linearize", "structure");
    for _ in 0..4 {
        let n = rng.random_range(2..=4);
        let mut noises = vec![MixtureDistribution::atom(0.0)];
        noises.extend((0..n).map(|_| random_mixture(&mut rng, 3)));
        let thetas: Vec<f64> = noises.iter().map(|d| theta(d).theta).collect();
        let sol = solve_linearized(&noises, &thetas, DEFAULT_BUDGET)?;
        t.record(sol.budget_used <= DEFAULT_BUDGET + 1e-9 && (sol.b == 0.0 || !sol.index_set.is_empty()), || {
            format!("{sol:?}")
        });
        let s = verify_structure(&noises, &sol)?;
        st.record(s.index_set_ok && s.tails_ok, || format!("{s:?}"));
    }
    checks.extend([t.done(), st.done()]);

    let pass = checks.iter().all(|c| c.pass);
    Ok(SelftestReport { seed, checks, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        let r = selftest(1).unwrap();
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.pass).collect();
        assert!(r.pass, "{failed:#?}");
        assert!(r.checks.iter().all(|c| c.cases > 0), "{r:#?}");
    }
}
