use serde::{Deserialize, Serialize};

use crate::dist::{Component, MixtureDistribution};
use crate::error::{Error, Result};
use crate::offset::{theta, OffsetProfile};

/// Slack allowed by the structural checks.
pub const CHECK_TOL: f64 = 1e-9;

/// Two priors on `v` that the binary problem cannot tell apart.
///
/// With `v⁺ <= -v⁻` (the noise is negated first otherwise), the positive
/// prior averages `k = ceil(-v⁻/v⁺)` uniforms stepping by `v⁺/2`, and the
/// negative prior is `U[1.5 v⁻, 0.5 v⁻]`. Both put density on the whole
/// window `[θ, θ - v⁻/2]` of observations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HardInstanceBinary {
    pub prior_pos: MixtureDistribution,
    pub prior_neg: MixtureDistribution,
    pub k: u64,
    /// Whether `noise` is the negation of the input.
    pub flipped: bool,
    pub overlap_window: (f64, f64),
    /// Offset profile of `noise`.
    pub profile: OffsetProfile,
    pub noise: MixtureDistribution,
}

pub fn hard_instance_binary(a: &MixtureDistribution) -> Result<HardInstanceBinary> {
    let mut prof = theta(a);
    let mut noise = a.clone();
    let mut flipped = false;
    if prof.v_plus > -prof.v_minus {
        noise = a.negate();
        prof = theta(&noise);
        flipped = true;
    }
    if prof.is_degenerate() || prof.side_regret_pos <= 0.0 || prof.side_regret_neg <= 0.0 {
        return Err(Error::DegenerateProfile(format!(
            "side regrets {} and {} must both be positive",
            prof.side_regret_pos, prof.side_regret_neg
        )));
    }
    let (vp, vm, th) = (prof.v_plus, prof.v_minus, prof.theta);
    // The slack absorbs θ bisection noise; any k gives a valid prior, and the
    // cover check reports how well this one tiles the window.
    let k = (-vm / vp * (1.0 - 1e-9)).ceil().max(1.0);
    let w = 1.0 / k;
    let comps = (1..=k as u64)
        .map(|t| {
            let t = t as f64;
            Component::uniform((0.5 + 0.5 * t) * vp, (1.5 + 0.5 * t) * vp, w)
        })
        .collect();
    let prior_pos = MixtureDistribution::normalized(comps)?;
    let prior_neg = MixtureDistribution::uniform(1.5 * vm, 0.5 * vm)?;
    Ok(HardInstanceBinary {
        prior_pos,
        prior_neg,
        k: k as u64,
        flipped,
        overlap_window: (th, th - 0.5 * vm),
        profile: prof,
        noise,
    })
}

impl HardInstanceBinary {
    /// The equal mixture of the two priors.
    pub fn prior(&self) -> Result<MixtureDistribution> {
        MixtureDistribution::mix(&[(0.5, &self.prior_pos), (0.5, &self.prior_neg)])
    }

    /// Observation window on which component `t` (1-based) of the positive
    /// prior has a guaranteed density floor.
    pub fn window(&self, t: u64) -> (f64, f64) {
        let (th, vp) = (self.profile.theta, self.profile.v_plus);
        (th + 0.5 * (t as f64 - 1.0) * vp, th + 0.5 * t as f64 * vp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverCheck {
    pub windows: Vec<(f64, f64)>,
    /// Largest gap between consecutive windows.
    pub max_gap: f64,
    pub start_error: f64,
    /// How far the union reaches past the overlap window (negative if short).
    pub end_excess: f64,
    pub pass: bool,
}

/// The per-component windows must tile `[θ, θ - v⁻/2]` without gaps.
pub fn interval_cover_check(h: &HardInstanceBinary) -> CoverCheck {
    let windows: Vec<_> = (1..=h.k).map(|t| h.window(t)).collect();
    let max_gap = windows.windows(2).map(|w| w[1].0 - w[0].1).fold(0.0, f64::max);
    let start_error = (windows[0].0 - h.overlap_window.0).abs();
    let end_excess = windows[windows.len() - 1].1 - h.overlap_window.1;
    let pass = max_gap <= CHECK_TOL && start_error <= CHECK_TOL && end_excess >= -CHECK_TOL;
    CoverCheck { windows, max_gap, start_error, end_excess, pass }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloorCheck {
    pub floor_pos: f64,
    pub floor_neg: f64,
    /// Smallest `density - floor` seen on the positive windows.
    pub min_slack_pos: f64,
    pub min_slack_neg: f64,
    pub pass: bool,
}

/// Observed density of each prior component against its floor,
/// `Pr[a < θ - v⁺] / (3 v⁺)` for the positive prior and
/// `Pr[a > θ - v⁻] / (3 (-v⁻))` for the negative one, sampled at
/// `samples` interior points of each window. Endpoints are skipped: a
/// density is only meaningful almost everywhere.
pub fn density_floor_check(h: &HardInstanceBinary, samples: usize) -> Result<FloorCheck> {
    let a = &h.noise;
    let p = &h.profile;
    let (th, vp, vm) = (p.theta, p.v_plus, p.v_minus);
    let floor_pos = a.prob_lt(th - vp) / (3.0 * vp);
    let floor_neg = a.prob_gt(th - vm) / (3.0 * -vm);
    let interior = |lo: f64, hi: f64| (1..=samples).map(move |i| lo + (hi - lo) * i as f64 / (samples + 1) as f64);
    let mut min_pos = f64::INFINITY;
    for t in 1..=h.k {
        let (lo, hi) = h.window(t);
        let tf = t as f64;
        for s in interior(lo, hi) {
            let d = a.conv_uniform_pdf((0.5 + 0.5 * tf) * vp, (1.5 + 0.5 * tf) * vp, s)?;
            min_pos = min_pos.min(d - floor_pos);
        }
    }
    let mut min_neg = f64::INFINITY;
    let (lo, hi) = h.overlap_window;
    for s in interior(lo, hi) {
        let d = a.conv_uniform_pdf(1.5 * vm, 0.5 * vm, s)?;
        min_neg = min_neg.min(d - floor_neg);
    }
    Ok(FloorCheck {
        floor_pos,
        floor_neg,
        min_slack_pos: min_pos,
        min_slack_neg: min_neg,
        pass: min_pos >= -CHECK_TOL && min_neg >= -CHECK_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> MixtureDistribution {
        MixtureDistribution::new(vec![Component::atom(-1.0, 0.5), Component::atom(1.0, 0.5)]).unwrap()
    }

    #[test]
    fn two_point_instance() {
        let h = hard_instance_binary(&two_point()).unwrap();
        assert_eq!(h.k, 1);
        assert!(!h.flipped);
        assert_eq!(h.prior_pos.support(), (1.0, 2.0));
        assert_eq!(h.prior_neg.support(), (-1.5, -0.5));
        assert_eq!(h.overlap_window, (0.0, 0.5));
        assert!(interval_cover_check(&h).pass);
        assert!(density_floor_check(&h, 33).unwrap().pass);
    }

    #[test]
    fn point_mass_is_degenerate() {
        assert!(matches!(hard_instance_binary(&MixtureDistribution::atom(0.3)), Err(Error::DegenerateProfile(_))));
    }

    #[test]
    fn equal_revenue_needs_seven_pieces() {
        let a = MixtureDistribution::equal_revenue(6f64.exp(), 64).unwrap();
        let h = hard_instance_binary(&a).unwrap();
        assert!(!h.flipped);
        assert_eq!(h.k, 7);
        assert!((h.profile.v_plus - 0.25).abs() < 1e-6);
        assert!((h.profile.v_minus + 1.75).abs() < 1e-6);
        assert!(interval_cover_check(&h).pass);
        assert!(density_floor_check(&h, 33).unwrap().pass);
    }

    #[test]
    fn flips_when_positive_side_is_wider() {
        let a = MixtureDistribution::equal_revenue(6f64.exp(), 64).unwrap().negate();
        let h = hard_instance_binary(&a).unwrap();
        assert!(h.flipped);
        assert!(h.profile.v_plus <= -h.profile.v_minus);
    }
}
