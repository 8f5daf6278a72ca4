use serde::{Deserialize, Serialize};

use crate::dist::{CdfTable, Component, MixtureDistribution, Side};
use crate::error::{Error, Result};
use crate::numeric::quadratic_roots;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Relative tolerance on the error estimate.
    pub rel_tol: f64,
    /// Extra uniform subdivisions (`2^refine` per kink interval).
    pub refine: u32,
    /// Cap on the number of integration intervals.
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rel_tol: 1e-4, refine: 0, max_intervals: 20_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesRisk {
    /// Expected regret of the Bayes-optimal rule.
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// Loss densities of the two decisions at an observation `s`.
///
/// `lpos(s) = ∫ v⁺ f_V(v) dA(s - v)` is the loss density of picking item 2
/// and `lneg` that of picking item 1. For a uniform prior piece the integral
/// over `v` becomes `s Pr[a in W] - E[a; a in W]` over a window `W` of
/// noise values, which the CDF table answers in closed form.
struct Losses<'a> {
    tab: &'a CdfTable,
    uniforms: Vec<(f64, f64, f64)>,
    atoms: Vec<(f64, f64)>,
}

impl<'a> Losses<'a> {
    fn new(a: &'a MixtureDistribution, prior: &MixtureDistribution) -> Self {
        let mut uniforms = Vec::new();
        let mut atoms = Vec::new();
        for c in prior.components() {
            match *c {
                Component::Uniform { lo, hi, weight } => uniforms.push((lo, hi, weight)),
                Component::Atom { at, weight } if at != 0.0 => atoms.push((at, weight)),
                _ => {}
            }
        }
        Losses { tab: a.table(), uniforms, atoms }
    }

    /// `(Pr, E[a; .])` over `[x, y]` as seen from the given side of `s`:
    /// `(x, y]` for the right limit, `[x, y)` for the left.
    fn window(&self, x: f64, y: f64, side: Side) -> (f64, f64) {
        let t = self.tab;
        let p = t.cdf_side(y, side) - t.cdf_side(x, side);
        let m = t.partial_mean(y, side) - t.partial_mean(x, side);
        (p.max(0.0), m)
    }

    fn at(&self, s: f64, side: Side) -> (f64, f64) {
        let (mut lp, mut ln) = (0.0, 0.0);
        for &(lo, hi, w) in &self.uniforms {
            let d = w / (hi - lo);
            if hi > 0.0 {
                let (p, m) = self.window(s - hi, s - lo.max(0.0), side);
                lp += d * (s * p - m);
            }
            if lo < 0.0 {
                let (p, m) = self.window(s - hi.min(0.0), s - lo, side);
                ln += d * (m - s * p);
            }
        }
        for &(u, w) in &self.atoms {
            let f = self.tab.density(s - u, side);
            if u > 0.0 {
                lp += u * w * f;
            } else {
                ln += -u * w * f;
            }
        }
        (lp.max(0.0), ln.max(0.0))
    }
}

/// Expected regret of the Bayes-optimal binary rule when `v ~ prior`,
/// item 1 is observed through noise `a` and item 2 is a known 0.
///
/// At each observation the rule picks item 1 iff `E[v | s] > 0`, so the risk
/// is `∫ min(lpos, lneg) ds` plus the same minimum over the point masses of
/// `s`. The continuous part is integrated on a grid holding every kink of the
/// loss densities and every crossing of the two. Between nodes the
/// integrand is a quadratic, so Gauss rules are exact there and their
/// disagreement serves as the error estimate.
pub fn bayes_binary_regret(
    a: &MixtureDistribution,
    prior: &MixtureDistribution,
    cfg: &QuadConfig,
) -> Result<BayesRisk> {
    // Point masses of s: prior atom + noise atom.
    let mut pts: Vec<(f64, f64, f64)> = Vec::new();
    for (u, w) in prior.atoms() {
        for (z, q) in a.atoms() {
            let m = w * q;
            if u > 0.0 {
                pts.push((u + z, u * m, 0.0));
            } else if u < 0.0 {
                pts.push((u + z, 0.0, -u * m));
            }
        }
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut discrete = 0.0;
    let mut i = 0;
    while i < pts.len() {
        let (s, mut p, mut n) = pts[i];
        let mut j = i + 1;
        while j < pts.len() && pts[j].0 == s {
            p += pts[j].1;
            n += pts[j].2;
            j += 1;
        }
        discrete += p.min(n);
        i = j;
    }

    let losses = Losses::new(a, prior);
    let mut shifts: Vec<f64> = vec![];
    for &(lo, hi, _) in &losses.uniforms {
        shifts.extend([lo, hi]);
        if lo < 0.0 && hi > 0.0 {
            shifts.push(0.0);
        }
    }
    shifts.extend(losses.atoms.iter().map(|x| x.0));
    if shifts.is_empty() {
        return Ok(BayesRisk { value: discrete, error_estimate: 0.0, intervals: 0 });
    }
    let mut nodes: Vec<f64> = a.knots().iter().flat_map(|k| shifts.iter().map(move |e| k + e)).collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let parts = 1usize << cfg.refine;
    let intervals = (nodes.len() - 1) * parts;
    if intervals > cfg.max_intervals {
        return Err(Error::InvalidParameter(format!(
            "quadrature grid needs {intervals} intervals, cap is {}",
            cfg.max_intervals
        )));
    }

    let mut value = 0.0;
    let mut err = 0.0;
    for w in nodes.windows(2) {
        for part in 0..parts {
            let a0 = w[0] + (w[1] - w[0]) * part as f64 / parts as f64;
            let b0 = if part + 1 == parts { w[1] } else { w[0] + (w[1] - w[0]) * (part + 1) as f64 / parts as f64 };
            let (v, e) = integrate_piece(&losses, a0, b0);
            value += v;
            err += e;
        }
    }
    let total = value + discrete;
    if err > cfg.rel_tol * total.abs() && err > 1e-300 {
        return Err(Error::QuadratureFailed { tol: cfg.rel_tol, estimate: err });
    }
    Ok(BayesRisk { value: total, error_estimate: err, intervals })
}

/// Integrates `min(lpos, lneg)` over `[a, b]`, where both are quadratics on
/// the open interval. Only interior points are evaluated: node coordinates
/// carry rounding, so one-sided limits taken at them are unreliable.
/// Returns the 3-point Gauss value and its distance from the 2-point one;
/// both are exact for quadratics, so a gap means a missed kink.
fn integrate_piece(l: &Losses, a: f64, b: f64) -> (f64, f64) {
    if !(b > a) {
        return (0.0, 0.0);
    }
    let mid = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let at = |u: f64| l.at(mid + h * u, Side::Right);
    const R: f64 = 2.0 / 3.0;
    let (lm, l0, lp) = (at(-R), at(0.0), at(R));
    if (lm.0 == 0.0 && l0.0 == 0.0 && lp.0 == 0.0) || (lm.1 == 0.0 && l0.1 == 0.0 && lp.1 == 0.0) {
        return (0.0, 0.0);
    }
    // Crossings of lpos - lneg from the quadratic through the three points.
    let (dm, d0, dp) = (lm.0 - lm.1, l0.0 - l0.1, lp.0 - lp.1);
    let c1 = (dp - dm) / (2.0 * R);
    let c2 = (dp + dm - 2.0 * d0) / (2.0 * R * R);
    let mut cuts = vec![-1.0];
    cuts.extend(quadratic_roots(c2, c1, d0).into_iter().filter(|u| *u > -1.0 && *u < 1.0));
    cuts.push(1.0);

    let g = |u: f64| {
        let (p, q) = at(u);
        p.min(q)
    };
    let r3 = (0.6f64).sqrt();
    let r2 = 1.0 / 3f64.sqrt();
    let mut total = 0.0;
    let mut err = 0.0;
    for w in cuts.windows(2) {
        let (x, y) = (w[0], w[1]);
        if !(y > x) {
            continue;
        }
        let (m, r) = (0.5 * (x + y), 0.5 * (y - x));
        let g3 = (5.0 * g(m - r3 * r) + 8.0 * g(m) + 5.0 * g(m + r3 * r)) / 9.0;
        let g2 = g(m - r2 * r) + g(m + r2 * r);
        let scale = h * r;
        total += scale * g3;
        err += scale * (g3 - g2).abs();
    }
    (total, err)
}
