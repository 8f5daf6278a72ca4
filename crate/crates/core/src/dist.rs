//! Bounded distributions represented as finite mixtures of point masses and
//! uniform pieces.
//!
//! Every query (CDF, tail, continuous density, partial first moment) goes
//! through a [`CdfTable`] built once at construction: the sorted knot set of
//! the mixture together with the inclusive CDF, atom mass and density of each
//! knot interval. Queries are then `O(log m)` in the number of knots, which
//! keeps slab-approximated tails with tens of thousands of pieces cheap.
//!
//! The CDF is right-continuous: `prob_le` and `prob_ge` both include an atom
//! sitting exactly at the query point, `prob_lt` and `prob_gt` exclude it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total weight of a mixture.
pub const WEIGHT_TOL: f64 = 1e-12;

/// One piece of a mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Component {
    Atom {
        at: f64,
        #[serde(rename = "w")]
        weight: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
        #[serde(rename = "w")]
        weight: f64,
    },
}

impl Component {
    pub fn atom(at: f64, weight: f64) -> Self {
        Component::Atom { at, weight }
    }

    pub fn uniform(lo: f64, hi: f64, weight: f64) -> Self {
        Component::Uniform { lo, hi, weight }
    }

    pub fn weight(&self) -> f64 {
        match *self {
            Component::Atom { weight, .. } | Component::Uniform { weight, .. } => weight,
        }
    }

    pub fn lower(&self) -> f64 {
        match *self {
            Component::Atom { at, .. } => at,
            Component::Uniform { lo, .. } => lo,
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            Component::Atom { at, .. } => at,
            Component::Uniform { hi, .. } => hi,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Component::Atom { .. })
    }

    fn with_weight(self, w: f64) -> Self {
        match self {
            Component::Atom { at, .. } => Component::Atom { at, weight: w },
            Component::Uniform { lo, hi, .. } => Component::Uniform { lo, hi, weight: w },
        }
    }

    fn validate(&self) -> Result<()> {
        let w = self.weight();
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidComponent(format!("weight must be positive, got {w}")));
        }
        match *self {
            Component::Atom { at, .. } if !at.is_finite() => {
                Err(Error::InvalidComponent(format!("atom location {at} is not finite")))
            }
            Component::Uniform { lo, hi, .. } if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                Err(Error::InvalidComponent(format!("uniform needs lo < hi, got [{lo}, {hi}]")))
            }
            _ => Ok(()),
        }
    }

    fn sort_key(&self) -> (f64, u8, f64) {
        match *self {
            Component::Atom { at, .. } => (at, 0, at),
            Component::Uniform { lo, hi, .. } => (lo, 1, hi),
        }
    }

    fn same_support(&self, other: &Component) -> bool {
        match (*self, *other) {
            (Component::Atom { at: a, .. }, Component::Atom { at: b, .. }) => a == b,
            (Component::Uniform { lo: l1, hi: h1, .. }, Component::Uniform { lo: l2, hi: h2, .. }) => {
                l1 == l2 && h1 == h2
            }
            _ => false,
        }
    }

    fn map_affine(self, scale: f64, offset: f64) -> Component {
        match self {
            Component::Atom { at, weight } => Component::Atom { at: scale * at + offset, weight },
            Component::Uniform { lo, hi, weight } => {
                let (a, b) = (scale * lo + offset, scale * hi + offset);
                Component::Uniform { lo: a.min(b), hi: a.max(b), weight }
            }
        }
    }
}

/// Which one-sided limit to take at a discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Piecewise description of a mixture on its sorted knot set.
///
/// On `(knots[j], knots[j+1])` the CDF is linear with slope `dens[j]`;
/// `cum[j]` is the inclusive CDF at `knots[j]` and `jump[j]` the atom mass
/// there. `mom[j]` is `E[a; a <= knots[j]]`.
#[derive(Debug, Clone)]
pub struct CdfTable {
    knots: Vec<f64>,
    cum: Vec<f64>,
    jump: Vec<f64>,
    dens: Vec<f64>,
    mom: Vec<f64>,
}

impl CdfTable {
    fn build(components: &[Component]) -> Self {
        let mut knots: Vec<f64> = components.iter().flat_map(|c| [c.lower(), c.upper()]).collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let m = knots.len();
        let idx = |x: f64| knots.partition_point(|&k| k < x);

        let mut jump = vec![0.0; m];
        let mut start = vec![0.0; m];
        let mut stop = vec![0.0; m];
        let mut opened = vec![0i64; m];
        for c in components {
            match *c {
                Component::Atom { at, weight } => jump[idx(at)] += weight,
                Component::Uniform { lo, hi, weight } => {
                    let d = weight / (hi - lo);
                    let (i, j) = (idx(lo), idx(hi));
                    start[i] += d;
                    stop[j] += d;
                    opened[i] += 1;
                    opened[j] -= 1;
                }
            }
        }

        let mut dens = vec![0.0; m];
        let mut cum = vec![0.0; m];
        let mut mom = vec![0.0; m];
        let (mut d, mut active) = (0.0f64, 0i64);
        for j in 0..m {
            if j > 0 {
                let w = knots[j] - knots[j - 1];
                cum[j] = cum[j - 1] + dens[j - 1] * w;
                mom[j] = mom[j - 1] + dens[j - 1] * w * (knots[j] + knots[j - 1]) * 0.5;
            }
            cum[j] = (cum[j] + jump[j]).min(1.0);
            mom[j] += jump[j] * knots[j];
            d += start[j] - stop[j];
            active += opened[j];
            dens[j] = if active == 0 { 0.0 } else { d.max(0.0) };
        }
        if let Some(last) = cum.last_mut() {
            *last = 1.0;
        }
        CdfTable { knots, cum, jump, dens, mom }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Inclusive CDF at knot `j`.
    pub fn cum_at(&self, j: usize) -> f64 {
        self.cum[j]
    }

    /// Atom mass at knot `j`.
    pub fn jump_at(&self, j: usize) -> f64 {
        self.jump[j]
    }

    /// Density on the open interval to the right of knot `j`.
    pub fn dens_after(&self, j: usize) -> f64 {
        self.dens[j]
    }

    /// Index of the last knot `<= x`, or `None` if `x` is below the support.
    fn floor(&self, x: f64) -> Option<usize> {
        let n = self.knots.partition_point(|&k| k <= x);
        n.checked_sub(1)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.floor(x) {
            None => 0.0,
            Some(j) if j + 1 == self.knots.len() => 1.0,
            Some(j) => self.interior(j, x),
        }
    }

    pub fn cdf_left(&self, x: f64) -> f64 {
        match self.floor(x) {
            None => 0.0,
            Some(j) if self.knots[j] == x => (self.cum[j] - self.jump[j]).max(0.0),
            Some(j) if j + 1 == self.knots.len() => 1.0,
            Some(j) => self.interior(j, x),
        }
    }

    fn interior(&self, j: usize, x: f64) -> f64 {
        let d = self.dens[j];
        if d == 0.0 {
            return self.cum[j];
        }
        let cap = self.cum[j + 1] - self.jump[j + 1];
        (self.cum[j] + d * (x - self.knots[j])).min(cap)
    }

    /// Continuous density, as a one-sided limit at `x`.
    pub fn density(&self, x: f64, side: Side) -> f64 {
        match self.floor(x) {
            None => 0.0,
            Some(j) => match side {
                Side::Right => self.dens[j],
                Side::Left if self.knots[j] == x => {
                    if j == 0 {
                        0.0
                    } else {
                        self.dens[j - 1]
                    }
                }
                Side::Left => self.dens[j],
            },
        }
    }

    /// `E[a; a <= x]` (or `a < x` for [`Side::Left`]).
    pub fn partial_mean(&self, x: f64, side: Side) -> f64 {
        if x == f64::INFINITY {
            return self.mom[self.mom.len() - 1];
        }
        match self.floor(x) {
            None => 0.0,
            Some(j) => {
                let k = self.knots[j];
                if k == x {
                    match side {
                        Side::Right => self.mom[j],
                        Side::Left => self.mom[j] - self.jump[j] * k,
                    }
                } else {
                    self.mom[j] + self.dens[j] * (x - k) * (x + k) * 0.5
                }
            }
        }
    }

    /// `Pr[a <= x]` or `Pr[a < x]`, selected by side.
    pub fn cdf_side(&self, x: f64, side: Side) -> f64 {
        match side {
            Side::Right => self.cdf(x),
            Side::Left => self.cdf_left(x),
        }
    }
}

/// A finite mixture of atoms and uniform pieces in canonical form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MixtureRepr", into = "MixtureRepr")]
pub struct MixtureDistribution {
    components: Vec<Component>,
    name: Option<String>,
    table: CdfTable,
    cum_weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    components: Vec<Component>,
}

impl TryFrom<MixtureRepr> for MixtureDistribution {
    type Error = Error;

    fn try_from(r: MixtureRepr) -> Result<Self> {
        let mut d = MixtureDistribution::new(r.components)?;
        d.name = r.name;
        Ok(d)
    }
}

impl From<MixtureDistribution> for MixtureRepr {
    fn from(d: MixtureDistribution) -> Self {
        MixtureRepr { name: d.name, components: d.components }
    }
}

impl PartialEq for MixtureDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
    }
}

fn canonicalize(mut components: Vec<Component>) -> Vec<Component> {
    components.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.0.total_cmp(&kb.0).then(ka.1.cmp(&kb.1)).then(ka.2.total_cmp(&kb.2))
    });
    let mut out: Vec<Component> = Vec::with_capacity(components.len());
    for c in components {
        match out.last_mut() {
            Some(prev) if prev.same_support(&c) => *prev = prev.with_weight(prev.weight() + c.weight()),
            _ => out.push(c),
        }
    }
    out
}

impl MixtureDistribution {
    /// Builds a mixture, requiring the weights to sum to one within
    /// [`WEIGHT_TOL`].
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        for c in &components {
            c.validate()?;
        }
        let sum: f64 = components.iter().map(Component::weight).sum();
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Unnormalized { sum, tol: WEIGHT_TOL });
        }
        Ok(Self::from_canonical(canonicalize(components)))
    }

    /// Like [`MixtureDistribution::new`] but rescales arbitrary positive
    /// weights to sum to one.
    pub fn normalized(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        for c in &components {
            c.validate()?;
        }
        let sum: f64 = components.iter().map(Component::weight).sum();
        let components = if (sum - 1.0).abs() > 1e-14 {
            components.into_iter().map(|c| c.with_weight(c.weight() / sum)).collect()
        } else {
            components
        };
        Self::new(components)
    }

    fn from_canonical(components: Vec<Component>) -> Self {
        let table = CdfTable::build(&components);
        let cum_weights = components
            .iter()
            .scan(0.0, |acc, c| {
                *acc += c.weight();
                Some(*acc)
            })
            .collect();
        MixtureDistribution { components, name: None, table, cum_weights }
    }

    pub fn atom(at: f64) -> Self {
        Self::new(vec![Component::atom(at, 1.0)]).expect("finite atom")
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![Component::uniform(lo, hi, 1.0)])
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn table(&self) -> &CdfTable {
        &self.table
    }

    pub fn knots(&self) -> &[f64] {
        self.table.knots()
    }

    pub fn is_atomic(&self) -> bool {
        self.components.iter().all(Component::is_atom)
    }

    /// `(location, mass)` of every atom, sorted by location.
    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.components.iter().filter_map(|c| match *c {
            Component::Atom { at, weight } => Some((at, weight)),
            _ => None,
        })
    }

    pub fn support(&self) -> (f64, f64) {
        let k = self.table.knots();
        (k[0], k[k.len() - 1])
    }

    pub fn span(&self) -> f64 {
        let (lo, hi) = self.support();
        hi - lo
    }

    pub fn prob_le(&self, x: f64) -> f64 {
        self.table.cdf(x)
    }

    pub fn prob_lt(&self, x: f64) -> f64 {
        self.table.cdf_left(x)
    }

    pub fn prob_gt(&self, x: f64) -> f64 {
        1.0 - self.prob_le(x)
    }

    pub fn prob_ge(&self, x: f64) -> f64 {
        1.0 - self.prob_lt(x)
    }

    /// `Pr[lo <= a <= hi]`.
    pub fn prob_in(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        (self.prob_le(hi) - self.prob_lt(lo)).max(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.components
            .iter()
            .map(|c| match *c {
                Component::Atom { at, weight } => weight * at,
                Component::Uniform { lo, hi, weight } => weight * 0.5 * (lo + hi),
            })
            .sum()
    }

    fn affine(&self, scale: f64, offset: f64) -> Self {
        let comps = self.components.iter().map(|c| c.map_affine(scale, offset)).collect();
        let mut d = Self::from_canonical(canonicalize(comps));
        d.name = self.name.clone();
        d
    }

    pub fn shift(&self, c: f64) -> Self {
        self.affine(1.0, c)
    }

    pub fn negate(&self) -> Self {
        self.affine(-1.0, 0.0)
    }

    /// Stretches every location by `s > 0`.
    pub fn scale(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {s}")));
        }
        Ok(self.affine(s, 0.0))
    }

    /// Density of `U[lo, hi] + D` at `t`.
    pub fn conv_uniform_pdf(&self, lo: f64, hi: f64, t: f64) -> Result<f64> {
        if !(lo < hi) {
            return Err(Error::InvalidParameter(format!("need lo < hi, got [{lo}, {hi}]")));
        }
        Ok(((self.prob_le(t - lo) - self.prob_le(t - hi)) / (hi - lo)).max(0.0))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let total = *self.cum_weights.last().expect("non-empty");
        let u: f64 = rng.random::<f64>() * total;
        let i = self.cum_weights.partition_point(|&c| c <= u).min(self.components.len() - 1);
        match self.components[i] {
            Component::Atom { at, .. } => at,
            Component::Uniform { lo, hi, .. } => lo + (hi - lo) * rng.random::<f64>(),
        }
    }

    /// Weighted mixture of mixtures; outer weights are rescaled to sum to one.
    pub fn mix(parts: &[(f64, &MixtureDistribution)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let total: f64 = parts.iter().map(|p| p.0).sum();
        if parts.iter().any(|p| !(p.0.is_finite() && p.0 > 0.0)) || !(total > 0.0) {
            return Err(Error::InvalidParameter("mixture weights must be positive".into()));
        }
        let comps = parts
            .iter()
            .flat_map(|(w, d)| {
                let w = w / total;
                d.components.iter().map(move |c| c.with_weight(w * c.weight()))
            })
            .collect();
        Self::normalized(comps)
    }

    /// Slab approximation of the equal-revenue style noise
    /// `F(t) = 1 - 1/((2 + ln c) t)` on `[1, c)`, with an atom at `-1`
    /// carrying `(1 + ln c)/(2 + ln c)` and an atom at `c` carrying the rest.
    ///
    /// Slab boundaries are geometric, `c^(j/slabs)`, and each slab carries
    /// exactly the CDF increment between its endpoints, so the CDF is
    /// matched at every boundary.
    pub fn equal_revenue(c: f64, slabs: usize) -> Result<Self> {
        if !(c.is_finite() && c > 1.0) {
            return Err(Error::InvalidParameter(format!("equal_revenue needs c > 1, got {c}")));
        }
        if slabs == 0 {
            return Err(Error::InvalidParameter("equal_revenue needs at least one slab".into()));
        }
        let ln_c = c.ln();
        let z = 2.0 + ln_c;
        let tail = |t: f64| 1.0 / (z * t);
        let mut comps = Vec::with_capacity(slabs + 2);
        comps.push(Component::atom(-1.0, (1.0 + ln_c) / z));
        let bound = |j: usize| if j == slabs { c } else { (ln_c * j as f64 / slabs as f64).exp() };
        for j in 0..slabs {
            let (lo, hi) = (bound(j), bound(j + 1));
            comps.push(Component::uniform(lo, hi, tail(lo) - tail(hi)));
        }
        comps.push(Component::atom(c, tail(c)));
        Ok(Self::normalized(comps)?.with_name(format!("equal_revenue(c={c},slabs={slabs})")))
    }

    /// Exact CDF of the continuous equal-revenue noise the slabs approximate.
    pub fn equal_revenue_cdf(c: f64, t: f64) -> f64 {
        let z = 2.0 + c.ln();
        if t < -1.0 {
            0.0
        } else if t < 1.0 {
            (1.0 + c.ln()) / z
        } else if t < c {
            1.0 - 1.0 / (z * t)
        } else {
            1.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_point() -> MixtureDistribution {
        MixtureDistribution::new(vec![Component::atom(-1.0, 0.5), Component::atom(1.0, 0.5)]).unwrap()
    }

    #[test]
    fn atom_boundary_is_inclusive() {
        let d = two_point();
        assert_eq!(d.prob_le(-1.0), 0.5);
        assert_eq!(d.prob_lt(-1.0), 0.0);
        assert_eq!(d.prob_ge(1.0), 0.5);
        assert_eq!(d.prob_gt(1.0), 0.0);
        assert_eq!(d.prob_le(1.0), 1.0);
    }

    #[test]
    fn uniform_cdf_and_mean() {
        let d = MixtureDistribution::uniform(0.0, 1.0).unwrap();
        assert_eq!(d.prob_le(0.25), 0.25);
        assert_eq!(MixtureDistribution::uniform(2.0, 4.0).unwrap().mean(), 3.0);
        assert_eq!(two_point().mean(), 0.0);
    }

    #[test]
    fn shift_and_negate() {
        let d = MixtureDistribution::atom(0.0).shift(2.0);
        assert_eq!(d.components(), &[Component::atom(2.0, 1.0)]);
        let u = MixtureDistribution::uniform(1.0, 3.0).unwrap().negate();
        assert_eq!(u.components(), &[Component::uniform(-3.0, -1.0, 1.0)]);
        assert_eq!(u.mean(), -2.0);
    }

    #[test]
    fn conv_uniform_examples() {
        let d = MixtureDistribution::atom(0.0);
        assert_eq!(d.conv_uniform_pdf(0.0, 1.0, 0.5).unwrap(), 1.0);
        // Only the atom at -1 lands the window [t-2, t] = [-1.5, 0.5].
        assert_eq!(two_point().conv_uniform_pdf(0.0, 2.0, 0.5).unwrap(), 0.25);
        assert!(d.conv_uniform_pdf(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn equal_revenue_one_slab() {
        let c = std::f64::consts::E.powi(2);
        let d = MixtureDistribution::equal_revenue(c, 1).unwrap();
        let atoms: Vec<_> = d.atoms().collect();
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].1 - 0.75).abs() < 1e-15);
        assert!((atoms[1].1 - 1.0 / (4.0 * c)).abs() < 1e-15);
        assert!((d.prob_le(1.0 - 1e-12) - 0.75).abs() < 1e-15);
        assert!(MixtureDistribution::equal_revenue(1.0, 5).is_err());
        assert!(MixtureDistribution::equal_revenue(3.0, 0).is_err());
    }

    #[test]
    fn equal_revenue_matches_cdf_at_boundaries() {
        let c = 6f64.exp();
        let slabs = 2000;
        let d = MixtureDistribution::equal_revenue(c, slabs).unwrap();
        for j in 0..slabs {
            let t = (c.ln() * j as f64 / slabs as f64).exp();
            let want = MixtureDistribution::equal_revenue_cdf(c, t);
            assert!((d.prob_le(t) - want).abs() < 1e-12, "slab {j}: {} vs {want}", d.prob_le(t));
        }
        assert!(d.mean().abs() < 1e-3);
    }

    #[test]
    fn mixing_identical_is_identity() {
        let d = MixtureDistribution::new(vec![
            Component::atom(-0.5, 0.25),
            Component::uniform(0.0, 2.0, 0.5),
            Component::atom(1.5, 0.25),
        ])
        .unwrap();
        let m = MixtureDistribution::mix(&[(0.5, &d), (0.5, &d)]).unwrap();
        assert_eq!(m, d);
    }

    #[test]
    fn rejects_bad_components() {
        assert!(MixtureDistribution::new(vec![]).is_err());
        assert!(MixtureDistribution::new(vec![Component::atom(0.0, 0.9)]).is_err());
        assert!(MixtureDistribution::new(vec![Component::uniform(1.0, 1.0, 1.0)]).is_err());
        assert!(MixtureDistribution::new(vec![Component::atom(0.0, -1.0), Component::atom(1.0, 2.0)]).is_err());
    }

    #[test]
    fn json_shape() {
        let d: MixtureDistribution = serde_json::from_str(
            r#"{"components":[{"atom":{"at":-1.0,"w":0.5}},{"uniform":{"lo":1.0,"hi":2.0,"w":0.5}}]}"#,
        )
        .unwrap();
        assert_eq!(d.components().len(), 2);
        assert_eq!(d.prob_le(1.5), 0.75);
        let back = serde_json::to_string(&d).unwrap();
        assert_eq!(back, r#"{"components":[{"atom":{"at":-1.0,"w":0.5}},{"uniform":{"lo":1.0,"hi":2.0,"w":0.5}}]}"#);
        assert!(serde_json::from_str::<MixtureDistribution>(r#"{"components":[{"atom":{"at":0,"w":0.4}}]}"#).is_err());
    }

    #[test]
    fn sampling_matches_cdf_dkw() {
        let d = MixtureDistribution::new(vec![
            Component::atom(-1.0, 0.3),
            Component::uniform(-0.5, 0.5, 0.4),
            Component::uniform(0.25, 2.0, 0.3),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        // DKW at alpha = 1e-3.
        let eps = ((2.0f64 / 1e-3).ln() / (2.0 * n as f64)).sqrt();
        for q in [-1.0, -0.75, -0.2, 0.0, 0.3, 0.5, 1.0, 1.9] {
            let emp = xs.partition_point(|&x| x <= q) as f64 / n as f64;
            assert!((emp - d.prob_le(q)).abs() <= eps, "q={q}: {emp} vs {}", d.prob_le(q));
        }
    }

    #[test]
    fn partial_mean_and_density() {
        let d = MixtureDistribution::new(vec![Component::atom(-1.0, 0.5), Component::uniform(0.0, 2.0, 0.5)]).unwrap();
        let t = d.table();
        assert_eq!(t.partial_mean(-1.0, Side::Right), -0.5);
        assert_eq!(t.partial_mean(-1.0, Side::Left), 0.0);
        assert!((t.partial_mean(5.0, Side::Right) - d.mean()).abs() < 1e-15);
        assert_eq!(t.density(0.0, Side::Right), 0.25);
        assert_eq!(t.density(0.0, Side::Left), 0.0);
        assert_eq!(t.density(2.0, Side::Left), 0.25);
        assert_eq!(t.density(2.0, Side::Right), 0.0);
    }
}
