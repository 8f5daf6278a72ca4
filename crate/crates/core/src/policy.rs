//! Selection policies.
//!
//! [`OffsetPolicy`] covers n items: it picks `argmax_i (s_i - theta_i)`.
//! [`BinaryRandomizedPolicy`] covers the two-item case with item 2 pinned at
//! 0: it picks item 1 with probability `clamp(a s + b, 0, 1)` where `(a, b)`
//! depends on which segment of the real line `s` falls in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `argmax_i (s_i - theta_i)`, lowest index on ties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OffsetPolicy {
    pub thetas: Vec<f64>,
}

impl OffsetPolicy {
    pub fn new(thetas: Vec<f64>) -> Self {
        OffsetPolicy { thetas }
    }

    pub fn greedy(n: usize) -> Self {
        OffsetPolicy { thetas: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Zero-based index of the picked item.
    pub fn select(&self, observed: &[f64]) -> Result<usize> {
        if observed.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if observed.len() != self.thetas.len() {
            return Err(Error::LengthMismatch { expected: self.thetas.len(), got: observed.len() });
        }
        Ok(self.select_unchecked(observed))
    }

    pub(crate) fn select_unchecked(&self, observed: &[f64]) -> usize {
        let mut best = 0;
        let mut best_score = observed[0] - self.thetas[0];
        for (i, (&s, &t)) in observed.iter().zip(&self.thetas).enumerate().skip(1) {
            let score = s - t;
            if score > best_score {
                best = i;
                best_score = score;
            }
        }
        best
    }
}

/// `p(s) = a s + b` with no clamping, on `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPiece {
    pub lo: f64,
    pub hi: f64,
    pub a: f64,
    pub b: f64,
}

impl LinearPiece {
    fn at(&self, s: f64) -> f64 {
        self.a * s + self.b
    }

    /// `∫_x^y (a s + b) ds` for `x <= y` inside the piece.
    fn integral(&self, x: f64, y: f64) -> f64 {
        if self.a == 0.0 {
            (y - x) * self.b
        } else {
            (y - x) * (self.a * 0.5 * (x + y) + self.b)
        }
    }
}

/// Piecewise clamped-linear randomized rule for the binary case.
///
/// Segment `i` is `[breakpoints[i-1], breakpoints[i])`, with the outermost
/// segments running to infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BinaryRepr", into = "BinaryRepr")]
pub struct BinaryRandomizedPolicy {
    breakpoints: Vec<f64>,
    rules: Vec<(f64, f64)>,
    #[serde(skip)]
    pieces: Vec<LinearPiece>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BinaryRepr {
    segments: Vec<SegmentRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    from: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    to: Option<f64>,
    a: f64,
    b: f64,
}

impl TryFrom<BinaryRepr> for BinaryRandomizedPolicy {
    type Error = Error;

    fn try_from(r: BinaryRepr) -> Result<Self> {
        let segs = r.segments;
        if segs.is_empty() {
            return Err(Error::InvalidParameter("policy needs at least one segment".into()));
        }
        let mut breakpoints = Vec::with_capacity(segs.len() - 1);
        for w in segs.windows(2) {
            let (left, right) = (&w[0], &w[1]);
            let at = match (left.to, right.from) {
                (Some(x), Some(y)) if x == y => x,
                (Some(x), None) | (None, Some(x)) => x,
                (x, y) => {
                    return Err(Error::InvalidParameter(format!(
                        "segments must be contiguous, got to={x:?} then from={y:?}"
                    )))
                }
            };
            breakpoints.push(at);
        }
        Self::new(breakpoints, segs.iter().map(|s| (s.a, s.b)).collect())
    }
}

impl From<BinaryRandomizedPolicy> for BinaryRepr {
    fn from(p: BinaryRandomizedPolicy) -> Self {
        let m = p.rules.len();
        let segments = p
            .rules
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| SegmentRepr {
                from: (i > 0).then(|| p.breakpoints[i - 1]),
                to: (i + 1 < m).then(|| p.breakpoints[i]),
                a,
                b,
            })
            .collect();
        BinaryRepr { segments }
    }
}

impl BinaryRandomizedPolicy {
    /// `rules.len()` must be `breakpoints.len() + 1`; breakpoints strictly
    /// increasing.
    pub fn new(breakpoints: Vec<f64>, rules: Vec<(f64, f64)>) -> Result<Self> {
        if rules.len() != breakpoints.len() + 1 {
            return Err(Error::LengthMismatch { expected: breakpoints.len() + 1, got: rules.len() });
        }
        if breakpoints.iter().any(|x| !x.is_finite()) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("breakpoints must be finite and strictly increasing".into()));
        }
        if rules.iter().any(|(a, b)| !(a.is_finite() && b.is_finite())) {
            return Err(Error::InvalidParameter("segment coefficients must be finite".into()));
        }
        let pieces = split_pieces(&breakpoints, &rules);
        Ok(BinaryRandomizedPolicy { breakpoints, rules, pieces })
    }

    /// Deterministic threshold: pick item 1 iff `s >= t`.
    pub fn threshold(t: f64) -> Self {
        Self::new(vec![t], vec![(0.0, 0.0), (0.0, 1.0)]).expect("finite threshold")
    }

    /// `clamp(a s + b, 0, 1)` on the whole line.
    pub fn clamped_linear(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![], vec![(a, b)])
    }

    /// Builds a 0/1 rule from the value on each segment.
    pub fn from_indicator(breakpoints: Vec<f64>, picks: Vec<bool>) -> Result<Self> {
        let rules = picks.into_iter().map(|p| (0.0, if p { 1.0 } else { 0.0 })).collect();
        Self::new(breakpoints, rules)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn rules(&self) -> &[(f64, f64)] {
        &self.rules
    }

    /// Unclamped linear pieces covering the line.
    pub fn pieces(&self) -> &[LinearPiece] {
        &self.pieces
    }

    /// Every point where `p` may fail to be smooth: breakpoints and clamp
    /// points.
    pub fn kinks(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.lo).collect()
    }

    pub fn pick_prob(&self, s: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&x| x <= s);
        let (a, b) = self.rules[i];
        (a * s + b).clamp(0.0, 1.0)
    }

    /// `∫_x^y p(s) ds` for `x <= y`.
    pub fn integral(&self, x: f64, y: f64) -> f64 {
        if !(x < y) {
            return 0.0;
        }
        let mut i = self.pieces.partition_point(|p| p.hi <= x);
        let mut total = 0.0;
        while i < self.pieces.len() && self.pieces[i].lo < y {
            let p = &self.pieces[i];
            let (lo, hi) = (x.max(p.lo), y.min(p.hi));
            if lo < hi {
                total += p.integral(lo, hi);
            }
            i += 1;
        }
        total
    }

    /// Whether every segment is 0/1-valued.
    pub fn is_deterministic(&self) -> bool {
        self.pieces.iter().all(|p| p.a == 0.0 && (p.b == 0.0 || p.b == 1.0))
    }

    /// Number of points where a deterministic rule changes its decision
    /// inside `[lo, hi]`.
    pub fn switches_in(&self, lo: f64, hi: f64) -> usize {
        self.pieces
            .windows(2)
            .filter(|w| w[1].lo >= lo && w[1].lo <= hi)
            .filter(|w| {
                let s = w[1].lo;
                (w[0].at(s).clamp(0.0, 1.0) - w[1].at(s).clamp(0.0, 1.0)).abs() > 0.5
            })
            .count()
    }
}

/// Splits each segment at the points where `a s + b` crosses 0 or 1 and
/// replaces the clamped parts by constants; merges adjacent identical pieces.
fn split_pieces(breakpoints: &[f64], rules: &[(f64, f64)]) -> Vec<LinearPiece> {
    let mut out: Vec<LinearPiece> = Vec::new();
    let mut push = |p: LinearPiece| {
        if !(p.lo < p.hi) {
            return;
        }
        match out.last_mut() {
            Some(q) if q.a == p.a && q.b == p.b => q.hi = p.hi,
            _ => out.push(p),
        }
    };
    for (i, &(a, b)) in rules.iter().enumerate() {
        let lo = if i == 0 { f64::NEG_INFINITY } else { breakpoints[i - 1] };
        let hi = if i == breakpoints.len() { f64::INFINITY } else { breakpoints[i] };
        if a == 0.0 {
            push(LinearPiece { lo, hi, a: 0.0, b: b.clamp(0.0, 1.0) });
            continue;
        }
        let (z0, z1) = (-b / a, (1.0 - b) / a);
        let mut cuts = vec![lo];
        for z in [z0.min(z1), z0.max(z1)] {
            if z > lo && z < hi {
                cuts.push(z);
            }
        }
        cuts.push(hi);
        for w in cuts.windows(2) {
            let (x, y) = (w[0], w[1]);
            let mid = if x.is_finite() && y.is_finite() {
                0.5 * (x + y)
            } else if x.is_finite() {
                x + 1.0
            } else if y.is_finite() {
                y - 1.0
            } else {
                0.0
            };
            let v = a * mid + b;
            if v <= 0.0 {
                push(LinearPiece { lo: x, hi: y, a: 0.0, b: 0.0 });
            } else if v >= 1.0 {
                push(LinearPiece { lo: x, hi: y, a: 0.0, b: 1.0 });
            } else {
                push(LinearPiece { lo: x, hi: y, a, b });
            }
        }
    }
    out
}

/// Deterministic striped rule on stripes of width `alpha`.
///
/// Writing `s = p alpha + q` with `p = floor(s / alpha)`, item 1 is picked iff
/// `q / alpha < (p alpha + 1) / 2`. Stripes with `p alpha >= 1` always pick
/// item 1; stripes with `p alpha <= -1` never do.
pub fn striped_policy(alpha: f64) -> Result<BinaryRandomizedPolicy> {
    let inv = 1.0 / alpha;
    if !(alpha > 0.0 && alpha <= 0.5) || (inv - inv.round()).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("alpha must be 1/m for an integer m >= 2, got {alpha}")));
    }
    let m = inv.round() as i64;
    let mut bps = Vec::new();
    let mut picks = vec![false];
    let set = |x: f64, v: bool, bps: &mut Vec<f64>, picks: &mut Vec<bool>| {
        if *picks.last().unwrap() != v {
            bps.push(x);
            picks.push(v);
        }
    };
    for p in (-m + 1)..m {
        let start = p as f64 * alpha;
        let r = (start + 1.0) * 0.5;
        set(start, true, &mut bps, &mut picks);
        set(start + r * alpha, false, &mut bps, &mut picks);
    }
    set(1.0, true, &mut bps, &mut picks);
    BinaryRandomizedPolicy::from_indicator(bps, picks)
}

/// Either kind of policy, as stored in JSON files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Policy {
    Offset(OffsetPolicy),
    Binary(BinaryRandomizedPolicy),
}
