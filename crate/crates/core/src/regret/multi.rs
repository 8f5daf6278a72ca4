use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Instance, RegretEstimate};
use crate::dist::MixtureDistribution;
use crate::error::{Error, Result};
use crate::numeric::gauss_legendre;
use crate::policy::OffsetPolicy;

pub const DEFAULT_OUTCOME_CAP: u128 = 1 << 22;

fn check_lengths(n: usize, values: &[f64], pol: &OffsetPolicy) -> Result<()> {
    if values.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: values.len() });
    }
    if pol.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: pol.len() });
    }
    Ok(())
}

/// Regret of an offset policy, computed exactly.
///
/// Conditioning on `a_i`, item `i` wins with probability
/// `prod_{j<i} Pr[a_j < x + c_j] * prod_{j>i} Pr[a_j <= x + c_j]` where
/// `c_j = v_i - theta_i - v_j + theta_j`, a product of piecewise-linear
/// functions of `x`. Integrating against `A_i` piece by piece with a
/// Gauss-Legendre rule of sufficient order is exact.
pub fn regret_exact(noises: &[MixtureDistribution], values: &[f64], pol: &OffsetPolicy) -> Result<f64> {
    let n = noises.len();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    check_lengths(n, values, pol)?;
    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (gx, gw) = gauss_legendre(n.div_ceil(2).max(1));
    let mut regret = 0.0;
    for i in 0..n {
        let loss = vmax - values[i];
        if loss == 0.0 {
            continue;
        }
        let base = values[i] - pol.thetas[i];
        let c: Vec<f64> = (0..n).map(|j| base - values[j] + pol.thetas[j]).collect();
        let win = |x: f64| -> f64 {
            let mut p = 1.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                p *= if j < i { noises[j].prob_lt(x + c[j]) } else { noises[j].prob_le(x + c[j]) };
                if p == 0.0 {
                    break;
                }
            }
            p
        };
        let ai = &noises[i];
        let mut prob: f64 = ai.atoms().map(|(z, w)| w * win(z)).sum();
        if !ai.is_atomic() {
            let (lo, hi) = ai.support();
            let mut pts: Vec<f64> = ai.knots().to_vec();
            for j in (0..n).filter(|&j| j != i) {
                pts.extend(noises[j].knots().iter().map(|k| k - c[j]).filter(|x| *x > lo && *x < hi));
            }
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let tab = ai.table();
            for w in pts.windows(2) {
                let (x0, x1) = (w[0], w[1]);
                let mid = 0.5 * (x0 + x1);
                let half = 0.5 * (x1 - x0);
                let d = tab.density(mid, crate::dist::Side::Right);
                if d == 0.0 {
                    continue;
                }
                let s: f64 = gx.iter().zip(&gw).map(|(u, wt)| wt * win(mid + half * u)).sum();
                prob += d * half * s;
            }
        }
        regret += prob * loss;
    }
    Ok(regret.max(0.0))
}

/// Exact regret by enumerating the product of atom supports.
pub fn exact_regret_atoms(inst: &Instance, pol: &OffsetPolicy, cap: u128) -> Result<f64> {
    let values = inst.values_checked()?;
    let n = inst.len();
    check_lengths(n, values, pol)?;
    let supports: Vec<Vec<(f64, f64)>> = inst
        .noises
        .iter()
        .enumerate()
        .map(|(i, d)| if d.is_atomic() { Ok(d.atoms().collect()) } else { Err(Error::NonAtomicNoise { index: i }) })
        .collect::<Result<_>>()?;
    let count = supports.iter().try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128));
    match count {
        Some(c) if c <= cap => {}
        Some(c) => return Err(Error::TooManyOutcomes { count: c, cap }),
        None => return Err(Error::TooManyOutcomes { count: u128::MAX, cap }),
    }
    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut idx = vec![0usize; n];
    let mut obs = vec![0.0; n];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for i in 0..n {
            let (z, p) = supports[i][idx[i]];
            obs[i] = values[i] + z;
            w *= p;
        }
        let pick = pol.select_unchecked(&obs);
        total += w * (vmax - values[pick]);
        let mut k = 0;
        loop {
            if k == n {
                return Ok(total);
            }
            idx[k] += 1;
            if idx[k] < supports[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Monte Carlo regret estimate.
///
/// Sample `j` draws from a ChaCha8 stream keyed by `(seed, j)`, and the
/// per-sample losses are reduced in index order, so the result does not
/// depend on how samples are split across threads.
pub fn mc_regret(inst: &Instance, pol: &OffsetPolicy, samples: u64, seed: u64) -> Result<RegretEstimate> {
    let values = inst.values_checked()?;
    let n = inst.len();
    check_lengths(n, values, pol)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let losses: Vec<f64> = (0..samples)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |obs, j| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(j);
                for i in 0..n {
                    obs[i] = values[i] + inst.noises[i].sample(&mut rng);
                }
                vmax - values[pol.select_unchecked(obs)]
            },
        )
        .collect();
    let m = samples as f64;
    let mean = losses.iter().sum::<f64>() / m;
    let var = if samples > 1 { losses.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0) } else { 0.0 };
    Ok(RegretEstimate {
        value: mean,
        kind: super::EstimateKind::MonteCarlo,
        std_error: (var / m).sqrt(),
        samples,
        seed: Some(seed),
    })
}
