use serde::{Deserialize, Serialize};

use super::bayes::{bayes_binary_regret, BayesRisk, QuadConfig};
use super::hard::hard_instance_binary;
use crate::dist::{Component, MixtureDistribution};
use crate::error::{Error, Result};
use crate::linearize::{solve_linearized, LinearizedSolution, DEFAULT_BUDGET};
use crate::offset::theta;
use crate::policy::OffsetPolicy;
use crate::regret::{offset_worstcase_atoms, worstcase_search_n, SearchConfig};

/// Mass that some window `[θ + k v*, θ + (k - 0.1) v*]` must carry.
pub const K_WINDOW_FLOOR: f64 = 1.0 / 550.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KWindow {
    pub k: f64,
    pub mass: f64,
    pub below_floor: bool,
}

/// Heaviest window `[θ + k v*, θ + (k - 0.1) v*]` over `k` in `[-0.4, 5]`
/// on a 0.01 grid, first on ties. `v_star` must be negative.
pub fn find_k_window(a: &MixtureDistribution, th: f64, v_star: f64) -> Result<KWindow> {
    if !(v_star < 0.0) {
        return Err(Error::InvalidParameter(format!("v* must be negative, got {v_star}")));
    }
    let mut best = KWindow { k: -0.4, mass: -1.0, below_floor: true };
    for j in 0..=540 {
        let k = (j as f64 - 40.0) / 100.0;
        let mass = a.prob_in(th + k * v_star, th + (k - 0.1) * v_star);
        if mass > best.mass {
            best = KWindow { k, mass, below_floor: mass < K_WINDOW_FLOOR };
        }
    }
    Ok(best)
}

/// Per-item prior: `U[0.4 v*, 0.2 v*]` with probability `1 - p` and
/// `U[(-k - 0.6) v*, (-k - 0.8) v*]` with probability `p`.
pub fn item_prior(v_star: f64, k: f64, p: f64) -> Result<MixtureDistribution> {
    if !(v_star < 0.0) {
        return Err(Error::InvalidParameter(format!("v* must be negative, got {v_star}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
    }
    let mut comps = vec![];
    if p < 1.0 {
        comps.push(Component::uniform(0.4 * v_star, 0.2 * v_star, 1.0 - p));
    }
    if p > 0.0 {
        comps.push(Component::uniform((-k - 0.6) * v_star, (-k - 0.8) * v_star, p));
    }
    MixtureDistribution::normalized(comps)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ItemPrior {
    /// Index into the caller's noise list.
    pub index: usize,
    pub v_star: f64,
    pub p: f64,
    pub window: KWindow,
    pub prior: MixtureDistribution,
}

/// Priors for the items of the index set of `sol`. `sol` must come from
/// [`solve_linearized`] on `[reference, noises...]`, so solution index
/// `i + 1` is noise `i`.
pub fn multi_item_hard_instance(noises: &[MixtureDistribution], sol: &LinearizedSolution) -> Result<Vec<ItemPrior>> {
    let mut out = vec![];
    for &i in &sol.index_set {
        let v = sol.v_star[i];
        if !sol.active[i] || v >= 0.0 {
            continue;
        }
        let a = &noises[i - 1];
        let th = sol.thetas[i];
        let window = find_k_window(a, th, v)?;
        let p = a.prob_ge(th - v);
        out.push(ItemPrior { index: i - 1, v_star: v, p, window, prior: item_prior(v, window.k, p)? });
    }
    if out.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItemBound {
    pub index: usize,
    /// Bayes risk of the binary hard instance built on this item.
    pub binary: Option<f64>,
    /// Bayes risk of the per-item prior from the linearized program.
    pub multi: Option<f64>,
    pub quadrature_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiBoundReport {
    pub bound: f64,
    pub quadrature_error: f64,
    pub best_item: usize,
    pub items: Vec<ItemBound>,
    /// `Σ` of the per-item prior risks over the index set. Diagnostic only:
    /// it is not a bound on its own.
    pub diagnostic_sum: f64,
    pub linearized_b: f64,
    pub window_flags: Vec<bool>,
    /// Worst-case regret of the θ offset policy, exact for small atomic
    /// instances and a search lower estimate otherwise.
    pub offset_regret: f64,
    pub offset_regret_exact: bool,
    pub ratio: f64,
}

/// Lower bound on the optimal worst-case regret for `n >= 2` items.
///
/// Pinning every item but one far below the rest (and simulating their
/// noise) turns any `n`-item policy into a binary policy for the remaining
/// item against a noiseless reference, so each per-item Bayes risk bounds
/// the optimum. The bound is the largest of them.
pub fn opt_lower_bound_multi(
    noises: &[MixtureDistribution],
    quad: &QuadConfig,
    search: &SearchConfig,
) -> Result<MultiBoundReport> {
    let n = noises.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 items, got {n}")));
    }
    let thetas: Vec<f64> = noises.iter().map(|a| theta(a).theta).collect();
    let mut items: Vec<ItemBound> =
        (0..n).map(|index| ItemBound { index, binary: None, multi: None, quadrature_error: 0.0 }).collect();
    let merge =
        |item: &mut ItemBound, r: &BayesRisk| item.quadrature_error = item.quadrature_error.max(r.error_estimate);

    for (i, a) in noises.iter().enumerate() {
        match hard_instance_binary(a) {
            Ok(h) => {
                let r = bayes_binary_regret(&h.noise, &h.prior()?, quad)?;
                items[i].binary = Some(r.value);
                merge(&mut items[i], &r);
            }
            Err(Error::DegenerateProfile(_)) => {}
            Err(e) => return Err(e),
        }
    }

    let mut lin_noises = vec![MixtureDistribution::atom(0.0)];
    lin_noises.extend(noises.iter().cloned());
    let mut lin_thetas = vec![0.0];
    lin_thetas.extend(&thetas);
    let sol = solve_linearized(&lin_noises, &lin_thetas, DEFAULT_BUDGET)?;
    let mut diagnostic_sum = 0.0;
    let mut window_flags = vec![];
    match multi_item_hard_instance(noises, &sol) {
        Ok(priors) => {
            for ip in priors {
                let r = bayes_binary_regret(&noises[ip.index], &ip.prior, quad)?;
                diagnostic_sum += r.value;
                window_flags.push(ip.window.below_floor);
                items[ip.index].multi = Some(r.value);
                merge(&mut items[ip.index], &r);
            }
        }
        Err(Error::EmptyIndexSet) => {}
        Err(e) => return Err(e),
    }

    let score = |b: &ItemBound| b.binary.unwrap_or(0.0).max(b.multi.unwrap_or(0.0));
    let best = items.iter().max_by(|x, y| score(x).total_cmp(&score(y))).map(|b| b.index).unwrap_or(0);
    let bound = score(&items[best]);

    let pol = OffsetPolicy::new(thetas);
    let (offset_regret, exact) = if n <= 3 && noises.iter().all(|a| a.is_atomic()) {
        (offset_worstcase_atoms(noises, &pol)?.0, true)
    } else {
        (worstcase_search_n(noises, &pol, search)?.regret.value, false)
    };
    Ok(MultiBoundReport {
        bound,
        quadrature_error: items[best].quadrature_error,
        best_item: best,
        items,
        diagnostic_sum,
        linearized_b: sol.b,
        window_flags,
        offset_regret,
        offset_regret_exact: exact,
        ratio: if bound > 0.0 { offset_regret / bound } else { f64::INFINITY },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    /// Smallest exact worst-case regret found among the offset policies.
    pub value: f64,
    pub thetas: Vec<f64>,
    pub policies_tried: usize,
}

/// Upper bound on the optimal worst-case regret for atomic noise and
/// `n <= 3`: the best exact worst case over offset policies whose offsets
/// (relative to item 0) lie on a `steps`-point grid around θ.
pub fn opt_upper_bound_atoms(noises: &[MixtureDistribution], steps: usize) -> Result<UpperBound> {
    let n = noises.len();
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("upper bound supports 2 or 3 items, got {n}")));
    }
    let base: Vec<f64> = noises.iter().map(|a| theta(a).theta).collect();
    let width = noises.iter().map(|a| a.span()).fold(0.0, f64::max).max(1e-9);
    let steps = steps.max(1);
    let offsets: Vec<f64> = (0..steps)
        .map(|j| if steps == 1 { 0.0 } else { width * (2.0 * j as f64 / (steps - 1) as f64 - 1.0) })
        .chain(std::iter::once(0.0))
        .collect();
    let mut best = UpperBound { value: f64::INFINITY, thetas: base.clone(), policies_tried: 0 };
    let mut try_pol = |thetas: Vec<f64>| -> Result<()> {
        let (r, _) = offset_worstcase_atoms(noises, &OffsetPolicy::new(thetas.clone()))?;
        best.policies_tried += 1;
        if r < best.value {
            best.value = r;
            best.thetas = thetas;
        }
        Ok(())
    };
    for &d1 in &offsets {
        if n == 2 {
            try_pol(vec![base[0], base[1] + d1])?;
        } else {
            for &d2 in &offsets {
                try_pol(vec![base[0], base[1] + d1, base[2] + d2])?;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> MixtureDistribution {
        MixtureDistribution::new(vec![Component::atom(-1.0, 0.5), Component::atom(1.0, 0.5)]).unwrap()
    }

    #[test]
    fn uniform_window_mass() {
        let (th, v) = (0.3, -1.0);
        let a = MixtureDistribution::uniform(th + 5.0 * v, th - 0.5 * v).unwrap();
        let w = find_k_window(&a, th, v).unwrap();
        assert!((w.mass - 0.1 / 5.5).abs() < 1e-12);
        assert!(!w.below_floor);
        assert!((-0.4..=5.0).contains(&w.k));
    }

    #[test]
    fn window_flag_outside_range() {
        let a = MixtureDistribution::uniform(10.0, 11.0).unwrap();
        let w = find_k_window(&a, 0.0, -1.0).unwrap();
        assert_eq!(w.mass, 0.0);
        assert!(w.below_floor);
    }

    #[test]
    fn prior_example() {
        let p = item_prior(-1.0, 0.0, 0.3).unwrap();
        assert_eq!(p.components().len(), 2);
        assert_eq!(p.support(), (-0.4, 0.8));
        assert!((p.prob_in(-0.4, -0.2) - 0.7).abs() < 1e-12);
        assert!((p.prob_in(0.6, 0.8) - 0.3).abs() < 1e-12);
        assert_eq!(p.prob_in(-0.2 + 1e-9, 0.6 - 1e-9), 0.0);
    }

    #[test]
    fn index_set_required() {
        let noises = vec![MixtureDistribution::atom(0.0)];
        let sol = solve_linearized(&[MixtureDistribution::atom(0.0), MixtureDistribution::atom(0.0)], &[0.0, 0.0], 0.5)
            .unwrap();
        assert!(matches!(multi_item_hard_instance(&noises, &sol), Err(Error::EmptyIndexSet)));
    }

    #[test]
    fn two_point_pair_bounds() {
        let noises = vec![two_point(), two_point()];
        let r = opt_lower_bound_multi(&noises, &QuadConfig::default(), &SearchConfig::default()).unwrap();
        assert!(r.offset_regret_exact);
        let up = opt_upper_bound_atoms(&noises, 9).unwrap();
        assert!(r.bound > 0.0);
        assert!(r.bound <= up.value + r.quadrature_error, "{} > {}", r.bound, up.value);
        assert!(up.value <= r.offset_regret + 1e-12);
    }
}
