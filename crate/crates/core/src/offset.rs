//! The per-distribution offset θ(D) and the one-sided threshold regrets.
//!
//! With item 2 pinned at value 0 and a threshold rule "pick item 1 iff
//! `s >= t`", a positive value `v` is lost with probability `Pr[a <= t - v]`
//! and a negative value is taken with probability `Pr[a >= t - v]`. The two
//! side regrets are the worst cases of each failure mode; θ balances them.

use serde::{Deserialize, Serialize};

use crate::dist::MixtureDistribution;

/// Absolute tolerance of the θ bisection.
pub const THETA_TOL: f64 = 1e-10;

/// Maximum of one side objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideMax {
    pub value: f64,
    /// Maximizing value `v` (positive for the positive side). Zero when
    /// degenerate.
    pub argmax: f64,
    /// No mass can be misclassified on this side: the objective is 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetProfile {
    pub theta: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub side_regret_pos: f64,
    pub side_regret_neg: f64,
    pub balance_gap: f64,
    pub degenerate_pos: bool,
    pub degenerate_neg: bool,
}

impl OffsetProfile {
    pub fn regret(&self) -> f64 {
        self.side_regret_pos.max(self.side_regret_neg)
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate_pos || self.degenerate_neg
    }
}

/// `Pr[a <= t - v] * v`.
pub fn side_value_pos(d: &MixtureDistribution, t: f64, v: f64) -> f64 {
    d.prob_le(t - v) * v
}

/// `Pr[a >= t - v] * (-v)`.
pub fn side_value_neg(d: &MixtureDistribution, t: f64, v: f64) -> f64 {
    d.prob_ge(t - v) * (-v)
}

/// Largest `v > 0` with `t - v >= x`, so an atom at `x` is counted.
fn v_reaching_down(t: f64, x: f64) -> f64 {
    let mut v = t - x;
    while t - v < x {
        v = v.next_down();
    }
    v
}

/// Smallest `|v|`, `v < 0`, with `t - v <= x`.
fn v_reaching_up(t: f64, x: f64) -> f64 {
    let mut v = t - x;
    while t - v > x {
        v = v.next_up();
    }
    v
}

/// `max_{v > 0} Pr[a <= t - v] * v`, exactly.
///
/// In `x = t - v` the objective is `F(x) (t - x)`: on each knot interval `F`
/// is affine, so the product is a concave quadratic and the only interior
/// candidate is its vertex. Knots are candidates because `F` is
/// right-continuous. Ties go to the smallest `v`.
pub fn side_regret_pos(d: &MixtureDistribution, t: f64) -> SideMax {
    let tab = d.table();
    let knots = tab.knots();
    let mut best = SideMax { value: 0.0, argmax: 0.0, degenerate: true };
    let mut consider = |x: f64| {
        if !(x < t) {
            return;
        }
        let v = v_reaching_down(t, x);
        if v <= 0.0 {
            return;
        }
        let val = side_value_pos(d, t, v);
        if val > 0.0 && val >= best.value {
            best = SideMax { value: val, argmax: v, degenerate: false };
        }
    };
    for (j, &k) in knots.iter().enumerate() {
        if k >= t {
            break;
        }
        consider(k);
        let dj = tab.dens_after(j);
        if dj > 0.0 && j + 1 < knots.len() {
            let end = knots[j + 1].min(t);
            let x = 0.5 * (t + k) - tab.cum_at(j) / (2.0 * dj);
            if x > k && x < end {
                consider(x);
            }
        }
    }
    best
}

/// `max_{v < 0} Pr[a >= t - v] * (-v)`, exactly. Mirror image of
/// [`side_regret_pos`]; ties go to the smallest `|v|`.
pub fn side_regret_neg(d: &MixtureDistribution, t: f64) -> SideMax {
    let tab = d.table();
    let knots = tab.knots();
    let mut best = SideMax { value: 0.0, argmax: 0.0, degenerate: true };
    let mut consider = |x: f64| {
        if !(x > t) {
            return;
        }
        let v = v_reaching_up(t, x);
        if v >= 0.0 {
            return;
        }
        let val = side_value_neg(d, t, v);
        if val > 0.0 && val > best.value {
            best = SideMax { value: val, argmax: v, degenerate: false };
        }
    };
    let start = knots.partition_point(|&k| k <= t).saturating_sub(1);
    for j in start..knots.len() {
        let k = knots[j];
        consider(k);
        let dj = tab.dens_after(j);
        if dj > 0.0 && j + 1 < knots.len() {
            let lo = k.max(t);
            let x = 0.5 * (k + t) + (1.0 - tab.cum_at(j)) / (2.0 * dj);
            if x > lo && x < knots[j + 1] {
                consider(x);
            }
        }
    }
    best
}

/// Worst-case regret of the rule "pick item 1 iff `s >= t`" against a
/// noiseless item at 0.
pub fn threshold_regret(d: &MixtureDistribution, t: f64) -> f64 {
    side_regret_pos(d, t).value.max(side_regret_neg(d, t).value)
}

/// Smallest slack of the tail inequalities at factor `lambda`:
/// `F(θ - λv⁺) <= F(θ - v⁺)/λ` and `Pr[a >= θ - λv⁻] <= Pr[a >= θ - v⁻]/λ`.
/// Both follow from the side maximizers being maximal.
pub fn tail_slack(d: &MixtureDistribution, prof: &OffsetProfile, lambda: f64) -> f64 {
    let t = prof.theta;
    let mut slack = f64::INFINITY;
    if !prof.degenerate_pos {
        slack = slack.min(d.prob_le(t - prof.v_plus) / lambda - d.prob_le(t - lambda * prof.v_plus));
    }
    if !prof.degenerate_neg {
        slack = slack.min(d.prob_ge(t - prof.v_minus) / lambda - d.prob_ge(t - lambda * prof.v_minus));
    }
    if slack.is_infinite() {
        0.0
    } else {
        slack
    }
}

fn gap(d: &MixtureDistribution, t: f64) -> f64 {
    side_regret_pos(d, t).value - side_regret_neg(d, t).value
}

/// Bisects for the boundary of `{t : pred(gap(t))}` where `pred` is
/// monotone (false then true) on `[lo, hi]`.
fn bisect(d: &MixtureDistribution, mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> (f64, f64) {
    for _ in 0..400 {
        if hi - lo <= THETA_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(gap(d, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// The offset θ(D) minimizing [`threshold_regret`], with its side maximizers.
///
/// The positive side is nondecreasing in `t` and the negative side
/// nonincreasing, both strictly where positive, so the minimizers are exactly
/// the zero set of their difference. For atomic `D` that set can be an
/// interval; its midpoint is returned. For symmetric `D` the zero set is
/// symmetric about 0, so its midpoint is exactly 0.
pub fn theta(d: &MixtureDistribution) -> OffsetProfile {
    let (smin, smax) = d.support();
    let span = smax - smin;
    let t = if span == 0.0 {
        smin
    } else if d.negate() == *d {
        0.0
    } else {
        let (lo, hi) = (smin - span, smax + span);
        let (_, left) = bisect(d, lo, hi, |g| g >= 0.0);
        let (right, _) = bisect(d, lo, hi, |g| g > 0.0);
        0.5 * (left + right)
    };
    profile_at(d, t)
}

/// Side maximizers and balance at an arbitrary threshold `t`.
pub fn profile_at(d: &MixtureDistribution, t: f64) -> OffsetProfile {
    let p = side_regret_pos(d, t);
    let n = side_regret_neg(d, t);
    OffsetProfile {
        theta: t,
        v_plus: p.argmax,
        v_minus: n.argmax,
        side_regret_pos: p.value,
        side_regret_neg: n.value,
        balance_gap: (p.value - n.value).abs(),
        degenerate_pos: p.degenerate,
        degenerate_neg: n.degenerate,
    }
}
