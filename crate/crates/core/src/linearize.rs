//! The linearized worst-case program for offset policies.
//!
//! Item 0 is a noiseless reference at value 0. Each competitor `i` gets a
//! value `v_i <= 0` and is "picked" when `v_i + a_i - θ_i >= 0`, which
//! happens with probability `p_i = Pr[a_i >= θ_i - v_i]`. The program
//! maximizes `Σ p_i (-v_i)` subject to `Σ p_i <= budget`.
//!
//! It is solved through the Lagrangian: for a multiplier `μ` each item's best
//! response is the negative-side threshold maximizer at `θ_i + μ`, and `μ` is
//! bisected until the budget binds. A greedy pass then spends leftover
//! budget, and coordinate ascent with pairwise budget exchanges polishes the
//! result (responses need not be continuous in `μ` when the noise has atoms). The dual value at the
//! multipliers gives an optimality gap.

use serde::{Deserialize, Serialize};

use crate::dist::MixtureDistribution;
use crate::error::{Error, Result};
use crate::offset::side_regret_neg;

pub const DEFAULT_BUDGET: f64 = 0.5;
/// Target for the no-pick probability after shrinking.
pub const SHRINK_TARGET: f64 = 1.0 / 2.55;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizedSolution {
    pub thetas: Vec<f64>,
    /// Optimal values; entry 0 is the reference and always 0. Inactive
    /// items also report 0.
    pub v_star: Vec<f64>,
    /// `Pr[v_i + a_i - θ_i >= 0]` at the optimum, 0 for inactive items.
    pub p_star: Vec<f64>,
    pub active: Vec<bool>,
    /// Optimal objective `Σ p_i (-v_i)`.
    pub b: f64,
    /// Items with `-v_i >= b`, 0-based.
    pub index_set: Vec<usize>,
    pub multiplier: f64,
    pub budget: f64,
    pub budget_used: f64,
    pub dual_bound: f64,
    pub duality_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Choice {
    /// Noise level `x = θ - v` at which the item starts being picked.
    x: f64,
    p: f64,
    obj: f64,
    active: bool,
}

const INACTIVE: Choice = Choice { x: f64::INFINITY, p: 0.0, obj: 0.0, active: false };

fn choice_at(a: &MixtureDistribution, th: f64, x: f64) -> Choice {
    let p = a.prob_ge(x);
    Choice { x, p, obj: p * (x - th), active: true }
}

/// Best response `argmax_x p(x)(x - θ - μ)` and its Lagrangian value.
fn respond(a: &MixtureDistribution, th: f64, mu: f64) -> (Choice, f64) {
    let t = th + mu;
    let s = side_regret_neg(a, t);
    if s.degenerate || s.value <= 0.0 {
        return (INACTIVE, 0.0);
    }
    (choice_at(a, th, t - s.argmax), s.value)
}

fn respond_all(noises: &[MixtureDistribution], thetas: &[f64], mu: f64) -> (Vec<Choice>, f64) {
    let mut total = 0.0;
    let mut out = vec![INACTIVE];
    for i in 1..noises.len() {
        let (c, l) = respond(&noises[i], thetas[i], mu);
        total += l;
        out.push(c);
    }
    (out, total)
}

fn used(c: &[Choice]) -> f64 {
    c.iter().map(|c| c.p).sum()
}

pub fn solve_linearized(noises: &[MixtureDistribution], thetas: &[f64], budget: f64) -> Result<LinearizedSolution> {
    if noises.is_empty() {
        return Err(Error::EmptyInstance);
    }
    if thetas.len() != noises.len() {
        return Err(Error::LengthMismatch { expected: noises.len(), got: thetas.len() });
    }
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::InvalidParameter(format!("budget must be positive, got {budget}")));
    }

    let (at0, l0) = respond_all(noises, thetas, 0.0);
    let (choices, mu, dual) = if used(&at0) <= budget {
        (at0, 0.0, l0)
    } else {
        // Past the top of every support nothing is picked; the factor 2 keeps
        // nudged maximizers at the top atom out.
        let mut hi = 2.0 * (1..noises.len()).map(|i| noises[i].support().1 - thetas[i]).fold(0.0, f64::max);
        let mut lo = 0.0;
        let (mut c_lo, mut l_lo) = (at0, l0);
        let (mut c_hi, mut l_hi) = respond_all(noises, thetas, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (c, l) = respond_all(noises, thetas, mid);
            if used(&c) <= budget {
                (hi, c_hi, l_hi) = (mid, c, l);
            } else {
                (lo, c_lo, l_lo) = (mid, c, l);
            }
        }
        let dual = (hi * budget + l_hi).min(lo * budget + l_lo);
        if used(&c_hi) > budget {
            c_hi = vec![INACTIVE; noises.len()];
        }
        (greedy_fill(c_hi, &c_lo, budget), hi, dual)
    };
    let choices = polish(noises, thetas, choices, budget);

    let n = noises.len();
    let mut v_star = vec![0.0; n];
    let mut p_star = vec![0.0; n];
    let mut active = vec![false; n];
    for i in 1..n {
        if choices[i].active {
            let v = value_for(&noises[i], thetas[i], &choices[i]);
            v_star[i] = v;
            p_star[i] = noises[i].prob_ge(thetas[i] - v);
            active[i] = true;
        }
    }
    let b: f64 = (1..n).map(|i| p_star[i] * -v_star[i]).sum();
    let index_set = (1..n).filter(|&i| -v_star[i] >= b).collect();
    Ok(LinearizedSolution {
        thetas: thetas.to_vec(),
        v_star,
        p_star,
        active,
        b,
        index_set,
        multiplier: mu,
        budget,
        budget_used: used(&choices),
        dual_bound: dual,
        duality_gap: (dual - b).max(0.0),
    })
}

/// The value `v` whose noise level `θ - v` reproduces `c` after rounding:
/// among a few ulps around `θ - x`, the best objective without exceeding
/// the chosen probability.
fn value_for(a: &MixtureDistribution, th: f64, c: &Choice) -> f64 {
    let v0 = th - c.x;
    let mut best = (v0, f64::NEG_INFINITY);
    let (mut up, mut down) = (v0, v0);
    let mut cands = vec![v0];
    for _ in 0..8 {
        up = up.next_up();
        down = down.next_down();
        cands.extend([up, down]);
    }
    for v in cands {
        let p = a.prob_ge(th - v);
        let obj = p * -v;
        if v <= 0.0 && p <= c.p * (1.0 + 1e-12) + 1e-15 && obj > best.1 {
            best = (v, obj);
        }
    }
    best.0
}

/// Moves items from their feasible response to the infeasible one, best
/// objective gain per unit of budget first, while the budget allows.
fn greedy_fill(mut cur: Vec<Choice>, alt: &[Choice], budget: f64) -> Vec<Choice> {
    let mut order: Vec<usize> = (1..cur.len()).filter(|&i| alt[i] != cur[i] && alt[i].obj > cur[i].obj).collect();
    let rate = |i: usize| {
        let cost = alt[i].p - cur[i].p;
        if cost <= 0.0 {
            f64::INFINITY
        } else {
            (alt[i].obj - cur[i].obj) / cost
        }
    };
    order.sort_by(|&i, &j| rate(j).total_cmp(&rate(i)).then(i.cmp(&j)));
    for i in order {
        let spent = used(&cur) - cur[i].p + alt[i].p;
        if spent <= budget {
            cur[i] = alt[i];
        }
    }
    cur
}

/// Best choice for one item with `p <= cap`: the largest `G(x)(x - θ)` over
/// noise levels `x > θ` with `G(x) = Pr[a >= x] <= cap`.
fn best_with_cap(a: &MixtureDistribution, th: f64, cap: f64) -> Choice {
    let tab = a.table();
    let knots = tab.knots();
    let mut best = INACTIVE;
    // Right limits at knots sit a representable distance above the knot.
    let eps = 1e-13 * (knots.iter().fold(th.abs(), |m, k| m.max(k.abs())) + a.span());
    let mut offer = |x: f64| {
        if x > th {
            let c = choice_at(a, th, x);
            if c.p <= cap && c.p > 0.0 && c.obj > best.obj {
                best = c;
            }
        }
    };
    for (j, &k) in knots.iter().enumerate() {
        offer(k);
        offer(k + eps);
        if j + 1 < knots.len() {
            let d = tab.dens_after(j);
            if d > 0.0 {
                let (lo, hi) = (k, knots[j + 1]);
                let g = 1.0 - tab.cum_at(j);
                // G(x) = g - d (x - lo) on (lo, hi): clip the vertex of
                // G(x)(x - θ) and the point where G reaches the cap.
                let vertex = 0.5 * (lo + th) + g / (2.0 * d);
                let at_cap = raise_to_cap(a, lo + (g - cap) / d, cap);
                for x in [vertex, at_cap] {
                    if x > lo && x < hi {
                        offer(x);
                    }
                }
            }
        }
    }
    best
}

/// Smallest float step up from `x` (doubling) with `Pr[a >= x] <= cap`,
/// absorbing rounding in the closed-form cap crossing.
fn raise_to_cap(a: &MixtureDistribution, mut x: f64, cap: f64) -> f64 {
    let mut step = x.abs().max(f64::MIN_POSITIVE) * f64::EPSILON;
    for _ in 0..64 {
        if a.prob_ge(x) <= cap {
            break;
        }
        x += step;
        step *= 2.0;
    }
    x
}

fn objective(c: &[Choice]) -> f64 {
    c.iter().map(|c| c.obj).sum()
}

/// Coordinate ascent: each item in turn takes its best choice within the
/// budget left by the others, until nothing improves.
fn coordinate_ascent(noises: &[MixtureDistribution], thetas: &[f64], cur: &mut [Choice], budget: f64) {
    for _ in 0..50 {
        let mut improved = false;
        for i in 1..cur.len() {
            let cap = budget - (used(cur) - cur[i].p);
            let c = best_with_cap(&noises[i], thetas[i], cap);
            if c.obj > cur[i].obj * (1.0 + 1e-12) + 1e-300 {
                cur[i] = c;
                improved = true;
            }
        }
        if !improved {
            return;
        }
    }
}

/// Re-splits the budget held by items `i` and `j` (plus any slack) between
/// them: a grid over the split, then golden-section refinement around the
/// best grid cell. Returns whether the pair improved.
fn exchange(
    noises: &[MixtureDistribution],
    thetas: &[f64],
    cur: &mut [Choice],
    i: usize,
    j: usize,
    budget: f64,
) -> bool {
    const GRID: usize = 128;
    let pool = budget - (used(cur) - cur[i].p - cur[j].p);
    if pool <= 0.0 {
        return false;
    }
    let split = |q: f64| {
        let ci = best_with_cap(&noises[i], thetas[i], q);
        let cj = best_with_cap(&noises[j], thetas[j], pool - ci.p);
        (ci, cj)
    };
    let value = |q: f64| {
        let (a, b) = split(q);
        a.obj + b.obj
    };
    let qs: Vec<f64> = (0..=GRID).map(|t| pool * t as f64 / GRID as f64).collect();
    let vals: Vec<f64> = qs.iter().map(|&q| value(q)).collect();
    let t = (0..=GRID).max_by(|&x, &y| vals[x].total_cmp(&vals[y])).unwrap_or(0);
    let (mut lo, mut hi) = (qs[t.saturating_sub(1)], qs[(t + 1).min(GRID)]);
    let mut best_q = qs[t];
    let mut best_v = vals[t];
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        let (v1, v2) = (value(x1), value(x2));
        for (x, v) in [(x1, v1), (x2, v2)] {
            if v > best_v {
                (best_q, best_v) = (x, v);
            }
        }
        if v1 >= v2 {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    if best_v > (cur[i].obj + cur[j].obj) * (1.0 + 1e-12) + 1e-300 {
        let (ci, cj) = split(best_q);
        cur[i] = ci;
        cur[j] = cj;
        true
    } else {
        false
    }
}

/// Largest instance for which every pair is tried in [`exchange`]; beyond
/// it only pairs of active items are.
const EXCHANGE_ALL_PAIRS: usize = 16;

fn local_search(noises: &[MixtureDistribution], thetas: &[f64], cur: &mut [Choice], budget: f64) {
    for _ in 0..20 {
        coordinate_ascent(noises, thetas, cur, budget);
        let mut improved = false;
        let n = cur.len();
        for i in 1..n {
            for j in i + 1..n {
                if n > EXCHANGE_ALL_PAIRS && !(cur[i].active && cur[j].active) {
                    continue;
                }
                improved |= exchange(noises, thetas, cur, i, j, budget);
            }
        }
        if !improved {
            return;
        }
    }
}

/// Polishes the Lagrangian primal and compares it with every single-item
/// solution; the best feasible vector wins.
fn polish(noises: &[MixtureDistribution], thetas: &[f64], start: Vec<Choice>, budget: f64) -> Vec<Choice> {
    let mut best = start;
    local_search(noises, thetas, &mut best, budget);
    for i in 1..noises.len() {
        let mut c = vec![INACTIVE; noises.len()];
        c[i] = best_with_cap(&noises[i], thetas[i], budget);
        local_search(noises, thetas, &mut c, budget);
        if objective(&c) > objective(&best) {
            best = c;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub v: f64,
    pub p: f64,
    pub objective: f64,
}

/// The per-item tradeoff `v -> (Pr[a >= θ - v], Pr[a >= θ - v] (-v))`
/// sampled on `points` values of `v` in `[θ - max a, 0]`, plus the values
/// that put `θ - v` on a knot of `A`.
pub fn item_curve(a: &MixtureDistribution, th: f64, points: usize) -> Vec<CurvePoint> {
    let smax = a.support().1;
    let vmin = (th - smax).min(0.0);
    let mut vs: Vec<f64> = (0..=points).map(|j| vmin * j as f64 / points.max(1) as f64).collect();
    vs.extend(a.knots().iter().map(|k| th - k).filter(|v| *v <= 0.0));
    vs.sort_by(f64::total_cmp);
    vs.dedup();
    vs.into_iter()
        .map(|v| {
            let p = a.prob_ge(th - v);
            CurvePoint { v, p, objective: p * -v }
        })
        .collect()
}

/// Exhaustive optimum of the program for at most two competitors, using
/// [`item_curve`] samples and a budget grid of step `1 / budget_steps`.
pub fn brute_force_linearized(
    noises: &[MixtureDistribution],
    thetas: &[f64],
    budget: f64,
    curve_points: usize,
    budget_steps: usize,
) -> Result<f64> {
    let n = noises.len();
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidParameter("brute force supports one or two competitors".into()));
    }
    // h(q): best objective with p <= q, on the budget grid.
    let grid: Vec<f64> = (0..=budget_steps).map(|j| budget * j as f64 / budget_steps as f64).collect();
    let h: Vec<Vec<f64>> = (1..n)
        .map(|i| {
            let mut curve = item_curve(&noises[i], thetas[i], curve_points);
            curve.sort_by(|x, y| x.p.total_cmp(&y.p));
            grid.iter()
                .map(|&q| curve.iter().take_while(|c| c.p <= q).map(|c| c.objective).fold(0.0, f64::max))
                .collect()
        })
        .collect();
    Ok(if n == 2 {
        h[0][budget_steps]
    } else {
        (0..=budget_steps).map(|j| h[0][j] + h[1][budget_steps - j]).fold(0.0, f64::max)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItemStructure {
    pub index: usize,
    pub in_index_set: bool,
    /// `Pr[a >= θ - v*] / λ - Pr[a >= θ - λ v*]` for λ = 1.5, 2, 4.
    pub tail_margins: [f64; 3],
    /// `Pr[a in [θ - v*, θ - 1.1 v*]] - 0.09 Pr[a >= θ - v*]`.
    pub near_mass_margin: f64,
    /// `Pr[a in [θ - v*/2, θ - v*]]`.
    pub inner_mass: f64,
    /// `Pr[a in [θ + 5 v*, θ - v*/2]]`.
    pub center_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub items: Vec<ItemStructure>,
    /// `Σ_{i in I} p_i (-v_i)`, which must lie in `[b/2, b]`.
    pub index_set_sum: f64,
    pub index_set_ok: bool,
    pub tails_ok: bool,
    pub near_mass_ok: bool,
    /// Some item of the index set has inner mass at least 0.2.
    pub inner_case: bool,
    /// Center mass at least 0.1 on the whole index set. Only implied when
    /// `inner_case` is false.
    pub center_ok: bool,
}

pub const TAIL_LAMBDAS: [f64; 3] = [1.5, 2.0, 4.0];

/// Structural facts that hold at an optimum of the program.
pub fn verify_structure(noises: &[MixtureDistribution], sol: &LinearizedSolution) -> Result<StructureReport> {
    if noises.len() != sol.v_star.len() {
        return Err(Error::LengthMismatch { expected: sol.v_star.len(), got: noises.len() });
    }
    const TOL: f64 = 1e-9;
    let mut items = vec![];
    for (i, a) in noises.iter().enumerate().skip(1) {
        let (th, v) = (sol.thetas[i], sol.v_star[i]);
        let in_set = sol.index_set.contains(&i);
        let item = if !sol.active[i] || v == 0.0 {
            ItemStructure {
                index: i,
                in_index_set: in_set,
                tail_margins: [0.0; 3],
                near_mass_margin: 0.0,
                inner_mass: 0.0,
                center_mass: 0.0,
            }
        } else {
            let tail = a.prob_ge(th - v);
            let mut tail_margins = [0.0; 3];
            for (m, l) in tail_margins.iter_mut().zip(TAIL_LAMBDAS) {
                *m = tail / l - a.prob_ge(th - l * v);
            }
            ItemStructure {
                index: i,
                in_index_set: in_set,
                tail_margins,
                near_mass_margin: a.prob_in(th - v, th - 1.1 * v) - 0.09 * tail,
                inner_mass: a.prob_in(th - 0.5 * v, th - v),
                center_mass: a.prob_in(th + 5.0 * v, th - 0.5 * v),
            }
        };
        items.push(item);
    }
    let index_set_sum: f64 = sol.index_set.iter().map(|&i| sol.p_star[i] * -sol.v_star[i]).sum();
    let b = sol.b;
    let in_set = || items.iter().filter(|s| s.in_index_set && sol.active[s.index]);
    Ok(StructureReport {
        index_set_sum,
        index_set_ok: index_set_sum >= 0.5 * b - TOL && index_set_sum <= b + TOL,
        tails_ok: items.iter().all(|s| s.tail_margins.iter().all(|m| *m >= -TOL)),
        near_mass_ok: items.iter().all(|s| s.near_mass_margin >= -TOL),
        inner_case: in_set().any(|s| s.inner_mass >= 0.2),
        center_ok: in_set().all(|s| s.center_mass >= 0.1 - TOL),
        items,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkReport {
    /// Factor applied to the competitor values (at least 1).
    pub multiplier: f64,
    pub values: Vec<f64>,
    /// `Pr[some competitor has v_i + a_i - θ_i >= 0]` after shrinking.
    pub pick_prob: f64,
    /// `Σ_i Pr[v_i + a_i - θ_i >= 0]` after shrinking.
    pub sum_p: f64,
    pub reached: bool,
}

fn any_pick(noises: &[MixtureDistribution], thetas: &[f64], values: &[f64], m: f64) -> (f64, f64) {
    let mut none = 1.0;
    let mut sum = 0.0;
    for i in 1..noises.len() {
        let p = noises[i].prob_ge(thetas[i] - m * values[i]);
        none *= 1.0 - p;
        sum += p;
    }
    (1.0 - none, sum)
}

/// Scales the competitor values (all `<= 0`) up by the smallest factor that
/// brings the probability of any competitor clearing its offset down to
/// `target`. Entry 0 is the reference and is left alone.
pub fn shrink_values(
    noises: &[MixtureDistribution],
    thetas: &[f64],
    values: &[f64],
    target: f64,
) -> Result<ShrinkReport> {
    let n = noises.len();
    if thetas.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: thetas.len() });
    }
    if values.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: values.len() });
    }
    if values[1..].iter().any(|v| !(*v <= 0.0)) {
        return Err(Error::InvalidParameter("competitor values must be <= 0".into()));
    }
    let report = |m: f64| {
        let (pick_prob, sum_p) = any_pick(noises, thetas, values, m);
        let mut vals = values.to_vec();
        for v in &mut vals[1..] {
            *v *= m;
        }
        ShrinkReport { multiplier: m, values: vals, pick_prob, sum_p, reached: pick_prob <= target }
    };
    if any_pick(noises, thetas, values, 1.0).0 <= target {
        return Ok(report(1.0));
    }
    let mut hi = 2.0;
    while any_pick(noises, thetas, values, hi).0 > target {
        hi *= 2.0;
        if hi > 1e18 {
            return Ok(report(hi));
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if any_pick(noises, thetas, values, mid).0 <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(report(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Component;
    use crate::offset::theta;
    use proptest::prelude::*;

    fn two_point() -> MixtureDistribution {
        MixtureDistribution::new(vec![Component::atom(-1.0, 0.5), Component::atom(1.0, 0.5)]).unwrap()
    }

    fn thetas(noises: &[MixtureDistribution]) -> Vec<f64> {
        noises.iter().map(|a| theta(a).theta).collect()
    }

    #[test]
    fn single_two_point_competitor() {
        let noises = vec![MixtureDistribution::atom(0.0), two_point()];
        let sol = solve_linearized(&noises, &thetas(&noises), 0.5).unwrap();
        assert_eq!(sol.v_star, vec![0.0, -1.0]);
        assert_eq!(sol.p_star[1], 0.5);
        assert_eq!(sol.b, 0.5);
        assert_eq!(sol.index_set, vec![1]);
        assert!(sol.duality_gap < 1e-12);
    }

    #[test]
    fn budget_allows_one_of_two() {
        let noises = vec![MixtureDistribution::atom(0.0), two_point(), two_point()];
        let sol = solve_linearized(&noises, &thetas(&noises), 0.5).unwrap();
        assert!((sol.b - 0.5).abs() < 1e-12, "{sol:?}");
        assert!(sol.budget_used <= 0.5);
        assert!(sol.duality_gap < 1e-9);
    }

    #[test]
    fn noiseless_competitors_are_inactive() {
        let noises = vec![MixtureDistribution::atom(0.0); 4];
        let sol = solve_linearized(&noises, &thetas(&noises), 0.5).unwrap();
        assert_eq!(sol.v_star, vec![0.0; 4]);
        assert_eq!(sol.b, 0.0);
        assert!(sol.active.iter().all(|a| !a));
    }

    #[test]
    fn shrink_reaches_target() {
        let u = MixtureDistribution::uniform(-1.0, 1.0).unwrap();
        let noises = vec![MixtureDistribution::atom(0.0), u.clone(), u];
        let th = thetas(&noises);
        let r = shrink_values(&noises, &th, &[0.0, -0.1, -0.2], SHRINK_TARGET).unwrap();
        assert!(r.reached);
        assert!(r.multiplier > 1.0);
        assert!((r.pick_prob - SHRINK_TARGET).abs() < 1e-9);
        assert!(r.sum_p <= 0.5);
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

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn feasible_and_index_set_bounds(ds in prop::collection::vec(arb_dist(), 1..5)) {
            let mut noises = vec![MixtureDistribution::atom(0.0)];
            noises.extend(ds);
            let th = thetas(&noises);
            let sol = solve_linearized(&noises, &th, 0.5).unwrap();
            prop_assert!(sol.budget_used <= 0.5 + 1e-12);
            prop_assert!(sol.v_star.iter().all(|v| *v <= 0.0));
            prop_assert!(sol.b <= sol.dual_bound + 1e-9);
            let rep = verify_structure(&noises, &sol).unwrap();
            prop_assert!(rep.index_set_ok, "{:?}", rep);
            prop_assert!(rep.near_mass_ok || !rep.tails_ok, "{:?}", rep);
        }

        #[test]
        fn matches_brute_force(a in arb_dist(), b in arb_dist()) {
            let noises = vec![MixtureDistribution::atom(0.0), a, b];
            let th = thetas(&noises);
            let sol = solve_linearized(&noises, &th, 0.5).unwrap();
            let brute = brute_force_linearized(&noises, &th, 0.5, 1000, 1000).unwrap();
            prop_assert!(sol.b >= brute - 1e-2 * brute.max(1e-3), "solver {} < brute {}", sol.b, brute);
            prop_assert!(sol.b <= sol.dual_bound + 1e-9);
        }

        #[test]
        fn scale_covariant(ds in prop::collection::vec(arb_dist(), 1..4), s in prop::sample::select(vec![0.5, 2.0, 4.0])) {
            let mut noises = vec![MixtureDistribution::atom(0.0)];
            noises.extend(ds);
            let th = thetas(&noises);
            let scaled: Vec<_> = noises.iter().map(|a| a.scale(s).unwrap()).collect();
            let th_s: Vec<f64> = th.iter().map(|t| t * s).collect();
            let x = solve_linearized(&noises, &th, 0.5).unwrap();
            let y = solve_linearized(&scaled, &th_s, 0.5).unwrap();
            prop_assert!((y.b - s * x.b).abs() <= 1e-9 * (1.0 + s * x.b));
            prop_assert_eq!(&x.index_set, &y.index_set);
            for i in 0..noises.len() {
                prop_assert!((y.v_star[i] - s * x.v_star[i]).abs() <= 1e-9 * (1.0 + s * x.v_star[i].abs()));
                prop_assert!((y.p_star[i] - x.p_star[i]).abs() <= 1e-9);
            }
        }
    }
}
