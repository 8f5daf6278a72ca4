//! Certified lower bounds on the regret of any policy.
//!
//! Every bound here is the Bayes risk of an explicit prior on the values,
//! which no policy can beat. In the binary case the prior mixes two
//! instances that produce overlapping observations; for several items each
//! noisy item is paired with a noiseless reference, which any `n`-item
//! policy can simulate.

mod bayes;
mod hard;
mod multi;

pub use bayes::{bayes_binary_regret, BayesRisk, QuadConfig};
pub use hard::{
    density_floor_check, hard_instance_binary, interval_cover_check, CoverCheck, FloorCheck, HardInstanceBinary,
    CHECK_TOL,
};
pub use multi::{
    find_k_window, item_prior, multi_item_hard_instance, opt_lower_bound_multi, opt_upper_bound_atoms, ItemPrior,
    KWindow, MultiBoundReport, UpperBound, K_WINDOW_FLOOR,
};

use serde::{Deserialize, Serialize};

use crate::dist::MixtureDistribution;
use crate::error::Result;

/// Worst-case ratio guaranteed for offset policies in the binary case.
pub const BINARY_RATIO: f64 = 24.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Lower bound on the optimal worst-case regret.
    pub bound: f64,
    pub quadrature_error: f64,
    /// Worst-case regret of the offset policy at θ.
    pub offset_regret: f64,
    pub ratio: f64,
    /// `offset_regret <= 24 (bound + quadrature_error)`.
    pub ratio_ok: bool,
    pub k: u64,
    pub flipped: bool,
    pub theta: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub overlap_window: (f64, f64),
}

pub fn opt_lower_bound_binary(a: &MixtureDistribution, cfg: &QuadConfig) -> Result<BoundReport> {
    let h = hard_instance_binary(a)?;
    let risk = bayes_binary_regret(&h.noise, &h.prior()?, cfg)?;
    let offset_regret = h.profile.regret();
    let ratio = if risk.value > 0.0 { offset_regret / risk.value } else { f64::INFINITY };
    Ok(BoundReport {
        bound: risk.value,
        quadrature_error: risk.error_estimate,
        offset_regret,
        ratio,
        ratio_ok: offset_regret <= BINARY_RATIO * (risk.value + risk.error_estimate) * (1.0 + 1e-12),
        k: h.k,
        flipped: h.flipped,
        theta: h.profile.theta,
        v_plus: h.profile.v_plus,
        v_minus: h.profile.v_minus,
        overlap_window: h.overlap_window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Component;
    use crate::offset::theta;
    use proptest::prelude::*;

    #[test]
    fn two_point_bound() {
        let a = MixtureDistribution::new(vec![Component::atom(-1.0, 0.5), Component::atom(1.0, 0.5)]).unwrap();
        let r = opt_lower_bound_binary(&a, &QuadConfig::default()).unwrap();
        assert!((r.bound - 3.0 / 32.0).abs() < 1e-14, "{r:?}");
        assert!(r.ratio_ok);
    }

    #[test]
    fn equal_revenue_bound() {
        let a = MixtureDistribution::equal_revenue(6f64.exp(), 256).unwrap();
        let r = opt_lower_bound_binary(&a, &QuadConfig::default()).unwrap();
        assert!(r.ratio_ok, "{r:?}");
        assert!(r.bound > 0.0 && r.bound < 0.21875);
    }

    fn arb_dist() -> impl Strategy<Value = MixtureDistribution> {
        let comp = (any::<bool>(), -2.0f64..2.0, 0.05f64..1.5, 0.1f64..1.0).prop_map(|(atom, x, w, wt)| {
            if atom {
                Component::atom(x, wt)
            } else {
                Component::uniform(x, x + w, wt)
            }
        });
        prop::collection::vec(comp, 2..6).prop_map(|c| MixtureDistribution::normalized(c).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ratio_within_24(a in arb_dist()) {
            prop_assume!(!theta(&a).is_degenerate());
            let r = opt_lower_bound_binary(&a, &QuadConfig::default()).unwrap();
            prop_assert!(r.ratio_ok, "{:?}", r);
            prop_assert!(r.bound <= r.offset_regret + 1e-12);
        }

        #[test]
        fn structural_checks(a in arb_dist()) {
            prop_assume!(!theta(&a).is_degenerate());
            let h = hard_instance_binary(&a).unwrap();
            prop_assert!(interval_cover_check(&h).pass);
            let f = density_floor_check(&h, 17).unwrap();
            prop_assert!(f.pass, "{:?}", f);
        }
    }
}
