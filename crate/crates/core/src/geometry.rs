//! Geometry on the right half-plane: Carleson squares and their right halves,
//! dyadic strips, balayage through the Poisson kernel, the pseudo-hyperbolic
//! metric and truncated Blaschke-type products.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions};
use crate::system::AtomicMeasure;

/// Relative distance under which an atom is reported as sitting on a
/// tested boundary.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// `{x + iy : y ∈ [c − L/2, c + L/2), 0 ≤ x < L}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonSquare {
    pub center_y: f64,
    pub length: f64,
}

impl CarlesonSquare {
    pub fn symmetric(length: f64) -> Self {
        Self {
            center_y: 0.0,
            length,
        }
    }

    fn y_range(&self) -> (f64, f64) {
        let h = 0.5 * self.length;
        (self.center_y - h, self.center_y + h)
    }

    fn x_range(&self, part: SquarePart) -> (f64, f64) {
        match part {
            SquarePart::Full => (0.0, self.length),
            SquarePart::RightHalf => (0.5 * self.length, self.length),
        }
    }

    pub fn contains(&self, z: Complex64, part: SquarePart) -> bool {
        let (y0, y1) = self.y_range();
        let (x0, x1) = self.x_range(part);
        z.im >= y0 && z.im < y1 && z.re >= x0 && z.re < x1
    }

    /// Whether `z` lies within `BOUNDARY_EPS·L` of one of the region's edges.
    pub fn near_boundary(&self, z: Complex64, part: SquarePart) -> bool {
        let tol = BOUNDARY_EPS * self.length;
        let (y0, y1) = self.y_range();
        let (x0, x1) = self.x_range(part);
        let near = |v: f64, edge: f64| (v - edge).abs() <= tol;
        let in_y = z.im >= y0 - tol && z.im <= y1 + tol;
        let in_x = z.re >= x0 - tol && z.re <= x1 + tol;
        (in_y && (near(z.re, x1) || (part == SquarePart::RightHalf && near(z.re, x0))))
            || (in_x && (near(z.im, y0) || near(z.im, y1)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SquarePart {
    Full,
    RightHalf,
}

/// Which intervals of a given length are tested at each dyadic scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareFamily {
    /// The single interval `[−L/2, L/2)`.
    Symmetric,
    /// `[kL/2, kL/2 + L)` for all integers `k` (two staggered phases).
    Staggered,
}

/// `S_n = {z : 2^{n−1} < Re z ≤ 2^n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicStrip {
    pub n: i32,
}

impl DyadicStrip {
    /// Strip holding a point with real part `x > 0`.
    pub fn containing(x: f64) -> Option<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return None;
        }
        let mut n = x.log2().ceil() as i32;
        while 2f64.powi(n - 1) >= x {
            n -= 1;
        }
        while 2f64.powi(n) < x {
            n += 1;
        }
        Some(Self { n })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > 2f64.powi(self.n - 1) && z.re <= 2f64.powi(self.n)
    }
}

pub fn measure_on_square(m: &AtomicMeasure, sq: CarlesonSquare, part: SquarePart) -> f64 {
    m.atoms()
        .iter()
        .filter(|a| a.mass > 0.0 && sq.contains(a.location, part))
        .map(|a| a.mass)
        .sum()
}

/// Heaviest square of the family at one scale, plus the number of atoms within
/// `BOUNDARY_EPS` of a tested edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleMaximum {
    pub mass: f64,
    pub square: CarlesonSquare,
    pub boundary_hits: usize,
}

pub fn heaviest_square(
    m: &AtomicMeasure,
    length: f64,
    family: SquareFamily,
    part: SquarePart,
) -> ScaleMaximum {
    match family {
        SquareFamily::Symmetric => {
            let sq = CarlesonSquare::symmetric(length);
            let boundary_hits = m
                .atoms()
                .iter()
                .filter(|a| a.mass > 0.0 && sq.near_boundary(a.location, part))
                .count();
            ScaleMaximum {
                mass: measure_on_square(m, sq, part),
                square: sq,
                boundary_hits,
            }
        }
        SquareFamily::Staggered => {
            let half = 0.5 * length;
            let (x0, x1) = match part {
                SquarePart::Full => (0.0, length),
                SquarePart::RightHalf => (half, length),
            };
            let mut bins: BTreeMap<i64, f64> = BTreeMap::new();
            let mut boundary_hits = 0;
            for a in m.atoms().iter().filter(|a| a.mass > 0.0) {
                let z = a.location;
                if z.re < x0 || z.re >= x1 {
                    continue;
                }
                let k = (z.im / half).floor() as i64;
                *bins.entry(k - 1).or_insert(0.0) += a.mass;
                *bins.entry(k).or_insert(0.0) += a.mass;
                let frac = z.im / half - k as f64;
                if frac <= BOUNDARY_EPS || (z.re - x1).abs() <= BOUNDARY_EPS * length {
                    boundary_hits += 1;
                }
            }
            let (k, mass) = bins
                .iter()
                .fold((0_i64, 0.0_f64), |(bk, bm), (&k, &v)| if v > bm { (k, v) } else { (bk, bm) });
            ScaleMaximum {
                mass,
                square: CarlesonSquare {
                    center_y: k as f64 * half + half,
                    length,
                },
                boundary_hits,
            }
        }
    }
}

/// `(n, μ(S_n))` for `n_min ≤ n ≤ n_max`.
pub fn strip_masses(m: &AtomicMeasure, n_min: i32, n_max: i32) -> Vec<(i32, f64)> {
    let mut out: Vec<(i32, f64)> = (n_min..=n_max).map(|n| (n, 0.0)).collect();
    if n_min > n_max {
        return out;
    }
    for a in m.atoms().iter().filter(|a| a.mass > 0.0) {
        if let Some(s) = DyadicStrip::containing(a.location.re) {
            if s.n >= n_min && s.n <= n_max {
                out[(s.n - n_min) as usize].1 += a.mass;
            }
        }
    }
    out
}

fn require_interior(m: &AtomicMeasure) -> Result<()> {
    if let Some(a) = m.atoms().iter().find(|a| a.mass > 0.0 && a.location.re <= 0.0) {
        return Err(Error::Singular(format!(
            "atom at {} lies on the imaginary axis; the Poisson kernel is singular there",
            a.location
        )));
    }
    Ok(())
}

fn poisson_sum(m: &AtomicMeasure, t: f64) -> f64 {
    m.atoms()
        .iter()
        .filter(|a| a.mass > 0.0)
        .map(|a| {
            let (x, y) = (a.location.re, a.location.im);
            a.mass * x / (PI * (x * x + (t - y) * (t - y)))
        })
        .sum()
}

/// `S_μ(t) = Σ mass · x / (π (x² + (t − y)²))`.
pub fn balayage(m: &AtomicMeasure, t: f64) -> Result<f64> {
    require_interior(m)?;
    Ok(poisson_sum(m, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergentEnd {
    Origin,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalayageNorm {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub divergent_end: Option<DivergentEnd>,
}

/// `(∫_ℝ (|t|^a S_μ(t))^s dt)^{1/s}` over the whole line, with the
/// Poisson bumps resolved by breakpoints every `x_k/8` around each `y_k` and
/// the tails mapped onto finite intervals.
pub fn balayage_norm(m: &AtomicMeasure, weight_exponent: f64, s: f64) -> Result<BalayageNorm> {
    if !(s >= 1.0) || !s.is_finite() {
        return Err(Error::InvalidMeasure(format!("Lebesgue exponent {s} must be >= 1")));
    }
    require_interior(m)?;
    let a = weight_exponent;
    let atoms: Vec<_> = m.atoms().iter().filter(|at| at.mass > 0.0).copied().collect();
    if atoms.is_empty() {
        return Ok(BalayageNorm {
            value: 0.0,
            error: 0.0,
            converged: true,
            divergent_end: None,
        });
    }
    let infinite = |end| BalayageNorm {
        value: f64::INFINITY,
        error: 0.0,
        converged: true,
        divergent_end: Some(end),
    };
    if a * s <= -1.0 {
        return Ok(infinite(DivergentEnd::Origin));
    }
    if (a - 2.0) * s >= -1.0 {
        return Ok(infinite(DivergentEnd::Infinity));
    }

    let integrand = |t: f64| {
        let v = poisson_sum(m, t);
        if a == 0.0 {
            v.powf(s)
        } else {
            (t.abs().powf(a) * v).powf(s)
        }
    };

    let mut breaks = vec![0.0];
    let mut lo = 0.0_f64;
    let mut hi = 0.0_f64;
    let mut x_max = 0.0_f64;
    for at in &atoms {
        let (x, y) = (at.location.re, at.location.im);
        for j in -16..=16 {
            breaks.push(y + x * j as f64 / 8.0);
        }
        for j in [-64.0, -32.0, 32.0, 64.0] {
            breaks.push(y + x * j);
        }
        lo = lo.min(y - 64.0 * x);
        hi = hi.max(y + 64.0 * x);
        x_max = x_max.max(x);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_intervals: 200_000,
    };

    let mut total = if a < 0.0 {
        // t = 0 carries an integrable |t|^{as} singularity
        let delta = breaks
            .iter()
            .map(|b| b.abs())
            .filter(|&b| b > 0.0)
            .fold(f64::INFINITY, f64::min)
            .min(x_max);
        let gamma = a * s;
        let pos = quadrature::integrate_power_origin(|t| poisson_sum(m, t).powf(s), gamma, delta, opts);
        let neg = quadrature::integrate_power_origin(|t| poisson_sum(m, -t).powf(s), gamma, delta, opts);
        let left = quadrature::integrate_with_breaks(&integrand, lo, -delta, &breaks, opts);
        let right = quadrature::integrate_with_breaks(&integrand, delta, hi, &breaks, opts);
        pos + neg + left + right
    } else {
        quadrature::integrate_with_breaks(&integrand, lo, hi, &breaks, opts)
    };
    let scale = (hi - lo).max(x_max);
    total = total + quadrature::integrate_half_line(&integrand, hi, scale, opts);
    total = total + quadrature::integrate_half_line(|t| integrand(-t), -lo, scale, opts);

    Ok(BalayageNorm {
        value: total.value.max(0.0).powf(1.0 / s),
        error: total.error,
        converged: total.converged,
        divergent_end: None,
    })
}

#[inline]
pub(crate) fn rho(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm() / (z + w.conj()).norm()
}

/// `|z − w| / |z + w̄|` on the open right half-plane.
pub fn pseudo_hyperbolic(z: Complex64, w: Complex64) -> Result<f64> {
    let den = (z + w.conj()).norm();
    if den == 0.0 || !den.is_finite() {
        return Err(Error::Singular(format!(
            "z + conj(w) = 0 for z = {z}, w = {w}; points must lie in the open right half-plane"
        )));
    }
    Ok((z - w).norm() / den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlaschkeReport {
    /// `b_{∞,k} = ∏_{j≠k} p(z_j, z_k)` over the materialized points.
    pub products: Vec<f64>,
    pub min_factor: Vec<f64>,
    /// Product of the factors coming from the last `window` points.
    pub tail_factor: Vec<f64>,
    /// Partial sums of `Re z_k / (1 + |z_k|²)` at K/4, K/2 and K.
    pub summability_partials: [f64; 3],
    pub summability_growth: bool,
    /// Some product vanished (repeated points).
    pub degenerate: bool,
}

pub fn blaschke_products(points: &[Complex64], window: usize) -> Result<BlaschkeReport> {
    let k_len = points.len();
    if window > k_len {
        return Err(Error::InvalidMeasure(format!(
            "window {window} exceeds the {k_len} materialized points"
        )));
    }
    if let Some(z) = points.iter().find(|z| !(z.re > 0.0)) {
        return Err(Error::Singular(format!("point {z} is not in the open right half-plane")));
    }
    let tail_start = k_len - window;
    let per_point: Vec<(f64, f64, f64)> = (0..k_len)
        .into_par_iter()
        .map(|k| {
            let zk = points[k];
            let mut log_prod = 0.0;
            let mut log_tail = 0.0;
            let mut min_factor = 1.0_f64;
            for (j, &zj) in points.iter().enumerate() {
                if j == k {
                    continue;
                }
                let f = rho(zj, zk);
                min_factor = min_factor.min(f);
                let lf = f.ln();
                log_prod += lf;
                if j >= tail_start {
                    log_tail += lf;
                }
            }
            (log_prod.exp(), min_factor, log_tail.exp())
        })
        .collect();

    let term = |z: &Complex64| z.re / (1.0 + z.norm_sqr());
    let partial = |n: usize| points[..n].iter().map(term).sum::<f64>();
    let partials = [partial(k_len / 4), partial(k_len / 2), partial(k_len)];
    let first = partials[1] - partials[0];
    let second = partials[2] - partials[1];
    let summability_growth = k_len >= 8 && second > 1e-3 * partials[2] && second >= 0.75 * first;

    let products: Vec<f64> = per_point.iter().map(|p| p.0).collect();
    let degenerate = products.iter().any(|&p| p == 0.0);
    Ok(BlaschkeReport {
        degenerate,
        products,
        min_factor: per_point.iter().map(|p| p.1).collect(),
        tail_factor: per_point.iter().map(|p| p.2).collect(),
        summability_partials: partials,
        summability_growth,
    })
}
