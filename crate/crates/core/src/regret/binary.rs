use serde::{Deserialize, Serialize};

use crate::dist::{MixtureDistribution, Side};
use crate::numeric::LocalCubic;
use crate::policy::BinaryRandomizedPolicy;

/// `E[p(v + a)]` for `a ~ A`: per linear piece `[lo, hi)` of the policy this
/// is `alpha (v Pr + E[a; .]) + beta Pr`, read off the CDF and partial first
/// moment of `A`.
pub fn expected_pick(a: &MixtureDistribution, pol: &BinaryRandomizedPolicy, v: f64) -> f64 {
    let tab = a.table();
    let mut total = 0.0;
    for p in pol.pieces() {
        let (x, y) = (p.lo - v, p.hi - v);
        let mass = tab.cdf_left(y) - tab.cdf_left(x);
        if mass <= 0.0 {
            continue;
        }
        total += p.b * mass;
        if p.a != 0.0 {
            let m1 = tab.partial_mean(y, Side::Left) - tab.partial_mean(x, Side::Left);
            total += p.a * (v * mass + m1);
        }
    }
    total.clamp(0.0, 1.0)
}

/// Regret at value `v` for item 1 against a noiseless item at 0.
pub fn binary_regret(a: &MixtureDistribution, pol: &BinaryRandomizedPolicy, v: f64) -> f64 {
    if v > 0.0 {
        v * (1.0 - expected_pick(a, pol, v))
    } else if v < 0.0 {
        -v * expected_pick(a, pol, v)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryWorstCase {
    /// Supremum of the regret over `v`; infinite when unbounded.
    pub regret: f64,
    /// A value attaining the supremum, or approaching it from one side.
    pub worst_v: f64,
}

/// `sup_v binary_regret(a, pol, v)`.
///
/// Between consecutive points of `{kink - x}` (policy kinks minus knots of
/// `A`, plus 0) the regret is a cubic in `v`, so its supremum over each
/// open interval is found from a four-point fit: the endpoint limits and
/// interior stationary points.
pub fn binary_worstcase(a: &MixtureDistribution, pol: &BinaryRandomizedPolicy) -> BinaryWorstCase {
    let pieces = pol.pieces();
    let (first, last) = (pieces[0], pieces[pieces.len() - 1]);
    if first.b > 0.0 {
        return BinaryWorstCase { regret: f64::INFINITY, worst_v: f64::NEG_INFINITY };
    }
    if last.b < 1.0 {
        return BinaryWorstCase { regret: f64::INFINITY, worst_v: f64::INFINITY };
    }

    let knots = a.knots();
    let mut pts: Vec<f64> =
        pol.kinks().iter().flat_map(|k| knots.iter().map(move |x| k - x)).chain(std::iter::once(0.0)).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let mut best = BinaryWorstCase { regret: 0.0, worst_v: 0.0 };
    let mut offer = |v: f64, r: f64| {
        if r > best.regret {
            best = BinaryWorstCase { regret: r, worst_v: v };
        }
    };
    for &v in &pts {
        offer(v, binary_regret(a, pol, v));
    }
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let cubic = LocalCubic::fit(lo, hi, |v| binary_regret(a, pol, v));
        offer(lo, cubic.eval_local(-1.0));
        offer(hi, cubic.eval_local(1.0));
        for u in cubic.critical_points() {
            let v = cubic.to_x(u);
            offer(v, binary_regret(a, pol, v));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Component;
    use crate::offset::{theta, threshold_regret};
    use crate::policy::striped_policy;
    use proptest::prelude::*;

    fn two_point() -> MixtureDistribution {
        MixtureDistribution::new(vec![Component::atom(-1.0, 0.5), Component::atom(1.0, 0.5)]).unwrap()
    }

    /// Component-by-component evaluation, independent of the CDF table.
    fn expected_pick_direct(a: &MixtureDistribution, pol: &BinaryRandomizedPolicy, v: f64) -> f64 {
        a.components()
            .iter()
            .map(|c| match *c {
                Component::Atom { at, weight } => weight * pol.pick_prob(v + at),
                Component::Uniform { lo, hi, weight } => weight * pol.integral(v + lo, v + hi) / (hi - lo),
            })
            .sum()
    }

    #[test]
    fn regret_examples() {
        let a = two_point();
        let lin = BinaryRandomizedPolicy::clamped_linear(0.5, 0.5).unwrap();
        assert!((binary_regret(&a, &lin, 1.0) - 0.25).abs() < 1e-15);
        let th = BinaryRandomizedPolicy::threshold(0.0);
        assert_eq!(binary_regret(&a, &th, -1.0), 0.5);
        let z = MixtureDistribution::atom(0.0);
        assert_eq!(binary_regret(&z, &BinaryRandomizedPolicy::threshold(1.0), 2.0), 0.0);
    }

    #[test]
    fn worstcase_examples() {
        let a = two_point();
        let lin = BinaryRandomizedPolicy::clamped_linear(0.5, 0.5).unwrap();
        let w = binary_worstcase(&a, &lin);
        assert!((w.regret - 0.25).abs() < 1e-12, "{w:?}");
        assert!((w.worst_v - 1.0).abs() < 1e-6);
        let t = binary_worstcase(&a, &BinaryRandomizedPolicy::threshold(0.0));
        assert!((t.regret - 0.5).abs() < 1e-12);
    }

    #[test]
    fn striped_worstcase_bound() {
        let a =
            MixtureDistribution::new(vec![Component::uniform(-1.0, -0.875, 0.5), Component::uniform(0.875, 1.0, 0.5)])
                .unwrap();
        let w = binary_worstcase(&a, &striped_policy(0.125).unwrap());
        assert!(w.regret <= 0.25 + 0.0625 + 1e-6, "{w:?}");
    }

    #[test]
    fn unbounded_policies() {
        let a = two_point();
        let never = BinaryRandomizedPolicy::clamped_linear(0.0, 0.0).unwrap();
        assert!(binary_worstcase(&a, &never).regret.is_infinite());
        let always = BinaryRandomizedPolicy::clamped_linear(0.0, 1.0).unwrap();
        assert!(binary_worstcase(&a, &always).regret.is_infinite());
    }

    fn arb_dist() -> impl Strategy<Value = MixtureDistribution> {
        let comp = (any::<bool>(), -2.0f64..2.0, 0.05f64..1.5, 0.1f64..1.0).prop_map(|(atom, x, w, wt)| {
            if atom {
                Component::atom(x, wt)
            } else {
                Component::uniform(x, x + w, wt)
            }
        });
        prop::collection::vec(comp, 1..5).prop_map(|c| MixtureDistribution::normalized(c).unwrap())
    }

    fn arb_policy() -> impl Strategy<Value = BinaryRandomizedPolicy> {
        (prop::collection::btree_set(-30i32..30, 0..4), prop::collection::vec((-2.0f64..2.0, -1.0f64..2.0), 5))
            .prop_map(|(bps, coef)| {
                let bps: Vec<f64> = bps.into_iter().map(|x| x as f64 / 10.0).collect();
                let mut rules = coef[..=bps.len()].to_vec();
                // Bounded regret needs p = 0 far left and p = 1 far right.
                rules[0] = (0.0, 0.0);
                let m = rules.len() - 1;
                if m > 0 {
                    rules[m] = (0.0, 1.0);
                } else {
                    rules[0] = (1.0, 0.5);
                }
                BinaryRandomizedPolicy::new(bps, rules).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn table_and_direct_agree(a in arb_dist(), pol in arb_policy(), v in -4.0f64..4.0) {
            let x = expected_pick(&a, &pol, v);
            let y = expected_pick_direct(&a, &pol, v);
            prop_assert!((x - y).abs() < 1e-9, "{} vs {}", x, y);
        }

        #[test]
        fn zero_value_has_zero_regret(a in arb_dist(), pol in arb_policy()) {
            prop_assert_eq!(binary_regret(&a, &pol, 0.0), 0.0);
        }

        #[test]
        fn worstcase_dominates_scan(a in arb_dist(), pol in arb_policy()) {
            let w = binary_worstcase(&a, &pol);
            let scan = (-8000..=8000).map(|i| binary_regret(&a, &pol, i as f64 * 1e-3)).fold(0.0, f64::max);
            prop_assert!(w.regret >= scan - 1e-9, "{} < scan {}", w.regret, scan);
            prop_assert!(w.regret <= scan + 0.01 * (1.0 + scan), "{} vs scan {}", w.regret, scan);
        }

        #[test]
        fn threshold_worstcase_matches_offset(a in arb_dist()) {
            let prof = theta(&a);
            let w = binary_worstcase(&a, &BinaryRandomizedPolicy::threshold(prof.theta));
            prop_assert!((w.regret - threshold_regret(&a, prof.theta)).abs() < 1e-9, "{} vs {}", w.regret, prof.regret());
        }
    }
}
