//! Small numerical helpers: local polynomial fits, quadratic roots and
//! Gauss-Legendre rules.

use std::f64::consts::PI;

/// Real roots of `a x^2 + b x + c`, in ascending order. Degenerate
/// (linear or constant) inputs are handled.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![];
    }
    if a.abs() <= 1e-14 * scale {
        if b == 0.0 {
            return vec![];
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let mut r = if q == 0.0 { vec![0.0] } else { vec![q / a, c / q] };
    r.sort_by(f64::total_cmp);
    r.dedup();
    r
}

/// Polynomial of degree at most 3 on `[lo, hi]`, stored in the local
/// coordinate `u = (x - mid) / half` so coefficients stay well scaled.
#[derive(Debug, Clone, Copy)]
pub struct LocalCubic {
    mid: f64,
    half: f64,
    c: [f64; 4],
}

/// Chebyshev nodes of the first kind for 4 points, in `(-1, 1)`.
fn cheb4() -> [f64; 4] {
    std::array::from_fn(|i| ((2 * i + 1) as f64 * PI / 8.0).cos())
}

impl LocalCubic {
    /// Interpolates `f` at four interior Chebyshev nodes of `[lo, hi]`.
    /// Exact (up to rounding) when `f` is a cubic on the open interval, so
    /// its endpoint values are the one-sided limits of `f`.
    pub fn fit(lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> Self {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let u = cheb4();
        let y: [f64; 4] = std::array::from_fn(|i| f(mid + half * u[i]));
        // Newton divided differences, then expand to monomials in u.
        let mut dd = y;
        for k in 1..4 {
            for i in (k..4).rev() {
                dd[i] = (dd[i] - dd[i - 1]) / (u[i] - u[i - k]);
            }
        }
        let mut c = [0.0; 4];
        let mut basis = [1.0, 0.0, 0.0, 0.0];
        for k in 0..4 {
            for j in 0..4 {
                c[j] += dd[k] * basis[j];
            }
            if k < 3 {
                let mut next = [0.0; 4];
                for j in 0..4 {
                    if j + 1 < 4 {
                        next[j + 1] += basis[j];
                    }
                    next[j] -= u[k] * basis[j];
                }
                basis = next;
            }
        }
        LocalCubic { mid, half, c }
    }

    pub fn eval_local(&self, u: f64) -> f64 {
        ((self.c[3] * u + self.c[2]) * u + self.c[1]) * u + self.c[0]
    }

    pub fn to_x(&self, u: f64) -> f64 {
        self.mid + self.half * u
    }

    /// Local coordinates of the stationary points strictly inside `(-1, 1)`.
    pub fn critical_points(&self) -> Vec<f64> {
        quadratic_roots(3.0 * self.c[3], 2.0 * self.c[2], self.c[1])
            .into_iter()
            .filter(|u| *u > -1.0 && *u < 1.0)
            .collect()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 1..=m {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p2) / k as f64;
            }
            dp = m as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}
