use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{exact_regret_atoms, mc_regret, regret_exact, EstimateKind, Instance, RegretEstimate};
use crate::dist::MixtureDistribution;
use crate::error::{Error, Result};
use crate::offset::{theta, threshold_regret};
use crate::policy::OffsetPolicy;

/// How candidate value vectors are scored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluator {
    /// One-dimensional exact integration ([`regret_exact`]).
    Exact,
    MonteCarlo {
        samples: u64,
        seed: u64,
    },
}

impl Evaluator {
    fn eval(&self, noises: &[MixtureDistribution], values: &[f64], pol: &OffsetPolicy) -> Result<RegretEstimate> {
        match *self {
            Evaluator::Exact => Ok(RegretEstimate::exact(regret_exact(noises, values, pol)?)),
            Evaluator::MonteCarlo { samples, seed } => {
                let inst = Instance::new(noises.to_vec(), Some(values.to_vec()))?;
                mc_regret(&inst, pol, samples, seed)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Grid points per coordinate (odd counts include 0).
    pub grid_points: usize,
    /// Values range over `[-K, K]` times the largest noise span.
    pub span_multiple: f64,
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    /// Step halvings in the final pattern search.
    pub refine_levels: usize,
    pub evaluator: Evaluator,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_points: 41,
            span_multiple: 8.0,
            restarts: 4,
            seed: 0,
            max_sweeps: 6,
            refine_levels: 8,
            evaluator: Evaluator::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Regret at `values`: a lower bound on the policy's worst case.
    pub regret: RegretEstimate,
    pub values: Vec<f64>,
    pub evaluations: u64,
}

/// Heuristic search for a bad value vector; `values[0]` is fixed at 0.
///
/// Coordinate ascent over a grid from several starts (the first is all
/// zeros), followed by a pattern search with halving steps. With Monte Carlo
/// scoring the final vector is re-scored with an independent seed.
pub fn worstcase_search_n(
    noises: &[MixtureDistribution],
    pol: &OffsetPolicy,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    let n = noises.len();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if pol.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: pol.len() });
    }
    if cfg.grid_points < 2 || !(cfg.span_multiple > 0.0) {
        return Err(Error::InvalidParameter("search needs grid_points >= 2 and span_multiple > 0".into()));
    }
    let span = noises.iter().map(MixtureDistribution::span).fold(0.0, f64::max);
    let span = if span > 0.0 { span } else { 1.0 };
    let r = cfg.span_multiple * span;
    let step = 2.0 * r / (cfg.grid_points - 1) as f64;
    let grid: Vec<f64> = (0..cfg.grid_points).map(|k| -r + k as f64 * step).collect();

    let mut evals = 0u64;
    let mut score = |v: &[f64]| -> Result<f64> {
        evals += 1;
        Ok(cfg.evaluator.eval(noises, v, pol)?.value)
    };

    let mut best_v = vec![0.0; n];
    let mut best = score(&best_v)?;
    if n > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for restart in 0..cfg.restarts.max(1) {
            let mut v = vec![0.0; n];
            if restart > 0 {
                for x in v.iter_mut().skip(1) {
                    *x = grid[rng.random_range(0..grid.len())];
                }
            }
            let mut cur = score(&v)?;
            for _ in 0..cfg.max_sweeps {
                let mut improved = false;
                for i in 1..n {
                    let keep = v[i];
                    let mut arg = keep;
                    for &g in &grid {
                        v[i] = g;
                        let s = score(&v)?;
                        if s > cur {
                            cur = s;
                            arg = g;
                            improved = true;
                        }
                    }
                    v[i] = arg;
                }
                if !improved {
                    break;
                }
            }
            let mut h = step;
            for _ in 0..cfg.refine_levels {
                h *= 0.5;
                loop {
                    let mut improved = false;
                    for i in 1..n {
                        for d in [h, -h] {
                            let keep = v[i];
                            v[i] = keep + d;
                            let s = score(&v)?;
                            if s > cur {
                                cur = s;
                                improved = true;
                            } else {
                                v[i] = keep;
                            }
                        }
                    }
                    if !improved {
                        break;
                    }
                }
            }
            if cur > best {
                best = cur;
                best_v = v;
            }
        }
    }
    let regret = match cfg.evaluator {
        Evaluator::Exact => RegretEstimate::exact(best),
        Evaluator::MonteCarlo { samples, seed } => {
            let inst = Instance::new(noises.to_vec(), Some(best_v.clone()))?;
            mc_regret(&inst, pol, samples, seed ^ 0x9e37_79b9_7f4a_7c15)?
        }
    };
    Ok(SearchResult { regret, values: best_v, evaluations: evals })
}

/// Both sides of the bound that reduces the general case to a noiseless
/// top item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    /// Index of the item with the largest value.
    pub top_item: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// Regret at half the values with the top item's noise removed.
    pub noiseless_term: f64,
    /// Threshold regret of the top item's noise at its own offset.
    pub binary_term: f64,
    pub tolerance: f64,
    pub kind: EstimateKind,
    pub pass: bool,
}

/// Checks `Reg(v) <= 2 Reg'(v / 2) + 2 Reg_bin(A_top, theta_top)` where `Reg'`
/// is the regret with the top item's noise replaced by a point mass at 0 and
/// offset 0. Offsets are `theta(A_i)` throughout.
pub fn reduction_check(noises: &[MixtureDistribution], values: &[f64], eval: Evaluator) -> Result<ReductionReport> {
    let n = noises.len();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if values.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: values.len() });
    }
    let top = (0..n).fold(0, |b, i| if values[i] > values[b] { i } else { b });
    let order: Vec<usize> = std::iter::once(top).chain((0..n).filter(|&i| i != top)).collect();
    let ns: Vec<MixtureDistribution> = order.iter().map(|&i| noises[i].clone()).collect();
    let vs: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let thetas: Vec<f64> = ns.iter().map(|d| theta(d).theta).collect();

    let lhs = eval.eval(&ns, &vs, &OffsetPolicy::new(thetas.clone()))?;
    let mut ns0 = ns.clone();
    ns0[0] = MixtureDistribution::atom(0.0);
    let mut th0 = thetas.clone();
    th0[0] = 0.0;
    let half: Vec<f64> = vs.iter().map(|v| 0.5 * v).collect();
    let t1 = eval.eval(&ns0, &half, &OffsetPolicy::new(th0))?;
    let t2 = threshold_regret(&ns[0], thetas[0]);
    let rhs = 2.0 * t1.value + 2.0 * t2;
    let tolerance = match eval {
        Evaluator::Exact => 1e-9 * (1.0 + rhs.abs()),
        Evaluator::MonteCarlo { .. } => 4.0 * (lhs.std_error.powi(2) + 4.0 * t1.std_error.powi(2)).sqrt(),
    };
    Ok(ReductionReport {
        top_item: top,
        lhs: lhs.value,
        rhs,
        noiseless_term: t1.value,
        binary_term: t2,
        tolerance,
        kind: lhs.kind,
        pass: lhs.value <= rhs + tolerance,
    })
}

/// Exact worst-case regret of an offset policy for atoms-only noise and
/// `n <= 3`, with `values[0] = 0`.
///
/// The pick is constant on the cells cut out by the hyperplanes
/// `v_i - v_j = theta_i - theta_j + a_j - a_i` (and `v_i = v_j`), and the
/// regret is linear on each cell. Every cell is pointed, so the supremum is
/// a limit at some vertex from one of the adjacent cells; those are probed
/// at distance `delta` in every angular sector.
pub fn offset_worstcase_atoms(noises: &[MixtureDistribution], pol: &OffsetPolicy) -> Result<(f64, Vec<f64>)> {
    let n = noises.len();
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("exact worst case supports 1 to 3 items, got {n}")));
    }
    if pol.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: pol.len() });
    }
    if let Some(i) = noises.iter().position(|d| !d.is_atomic()) {
        return Err(Error::NonAtomicNoise { index: i });
    }
    if n == 1 {
        return Ok((0.0, vec![0.0]));
    }
    let atoms: Vec<Vec<f64>> = noises.iter().map(|d| d.atoms().map(|a| a.0).collect()).collect();
    // Offsets c with v_i - v_j = c on a boundary.
    let offsets = |i: usize, j: usize| -> Vec<f64> {
        let mut c: Vec<f64> = vec![0.0];
        for &ai in &atoms[i] {
            for &aj in &atoms[j] {
                c.push(pol.thetas[i] - pol.thetas[j] + aj - ai);
            }
        }
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    };
    let scale = 1.0
        + atoms.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max)
        + pol.thetas.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let delta = 1e-9 * scale;
    let inst_at = |v: Vec<f64>| Instance { noises: noises.to_vec(), values: Some(v) };
    let mut best = (0.0, vec![0.0; n]);
    let mut probe = |v: Vec<f64>| -> Result<()> {
        let r = exact_regret_atoms(&inst_at(v.clone()), pol, u128::MAX)?;
        if r > best.0 {
            best = (r, v);
        }
        Ok(())
    };
    if n == 2 {
        for c in offsets(1, 0) {
            for d in [0.0, delta, -delta] {
                probe(vec![0.0, c + d])?;
            }
        }
    } else {
        let (c10, c20, c12) = (offsets(1, 0), offsets(2, 0), offsets(1, 2));
        let mut verts = Vec::with_capacity(c10.len() * c20.len() * 3);
        for &x in &c10 {
            for &y in &c20 {
                verts.push((x, y));
            }
            for &z in &c12 {
                verts.push((x, x - z));
            }
        }
        for &y in &c20 {
            for &z in &c12 {
                verts.push((y + z, y));
            }
        }
        verts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        verts.dedup();
        // Boundary directions are 0, 45 and 90 degrees (mod 180); probe the
        // bisectors of the six sectors they cut.
        let dirs: Vec<(f64, f64)> = [22.5f64, 67.5, 135.0, 202.5, 247.5, 315.0]
            .iter()
            .map(|deg| (deg.to_radians().cos(), deg.to_radians().sin()))
            .collect();
        for (x, y) in verts {
            probe(vec![0.0, x, y])?;
            for &(dx, dy) in &dirs {
                probe(vec![0.0, x + delta * dx, y + delta * dy])?;
            }
        }
    }
    Ok(best)
}
