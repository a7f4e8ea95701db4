//! Globally adaptive Gauss–Kronrod (7/15) quadrature with helpers for
//! half-line, whole-line and power-singular integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn tight() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

impl std::ops::Add for QuadResult {
    type Output = QuadResult;
    fn add(self, rhs: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            converged: self.converged && rhs.converged,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment { a, b, value, error }
}

/// Integrate `f` over `[a, b]`, pre-splitting at the interior `breaks`.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut points: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    points.push(lo);
    points.push(hi);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        heap.push(gk15(&f, w[0], w[1]));
    }
    let mut intervals = heap.len();
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target || !value.is_finite() {
            return QuadResult {
                value: sign * value,
                error,
                converged: value.is_finite(),
            };
        }
        if intervals >= opts.max_intervals {
            return QuadResult {
                value: sign * value,
                error,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            continue;
        }
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
        intervals += 1;
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult {
    integrate_with_breaks(f, a, b, &[], opts)
}

/// `∫_a^∞ f(t) dt` through the map `t = a + scale·u/(1−u)`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    opts: QuadOptions,
) -> QuadResult {
    integrate_algebraic_tail(f, a, scale, f64::INFINITY, opts)
}

/// `∫_a^∞ f(t) dt` for `f ~ t^{−decay}`, `decay > 1`, via
/// `t = a + scale((1−u)^{−m} − 1)` with `m = max(1, 2/(decay−1))`, which keeps
/// the mapped integrand bounded at `u = 1`.
pub fn integrate_algebraic_tail<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    decay: f64,
    opts: QuadOptions,
) -> QuadResult {
    let m = if decay > 1.0 { (2.0 / (decay - 1.0)).max(1.0) } else { 1.0 };
    let g = |u: f64| {
        let one_minus = 1.0 - u;
        if one_minus <= 0.0 {
            return 0.0;
        }
        let w = one_minus.powf(-m);
        let t = a + scale * (w - 1.0);
        let jac = scale * m * w / one_minus;
        let v = f(t) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, opts)
}

/// `∫_ℝ f(t) dt`, split at `center` with half-line maps on both sides.
pub fn integrate_real_line<F: Fn(f64) -> f64>(
    f: F,
    center: f64,
    scale: f64,
    opts: QuadOptions,
) -> QuadResult {
    let right = integrate_half_line(&f, center, scale, opts);
    let left = integrate_half_line(|t| f(2.0 * center - t), center, scale, opts);
    right + left
}

/// `∫_ℝ f(t) dt` with the finite span of `breaks` split at every break and
/// half-line maps of the given scale beyond its ends.
pub fn integrate_real_line_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    scale: f64,
    opts: QuadOptions,
) -> QuadResult {
    integrate_real_line_algebraic(f, breaks, scale, f64::INFINITY, opts)
}

/// As [`integrate_real_line_with_breaks`] for integrands decaying like
/// `|t|^{−decay}` on both sides.
pub fn integrate_real_line_algebraic<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    scale: f64,
    decay: f64,
    opts: QuadOptions,
) -> QuadResult {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|x| x.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let (lo, hi) = match (pts.first(), pts.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return integrate_real_line(f, 0.0, scale, opts),
    };
    let middle = integrate_with_breaks(&f, lo, hi, &pts, opts);
    let right = integrate_algebraic_tail(&f, hi, scale, decay, opts);
    let left = integrate_algebraic_tail(|t| f(-t), -lo, scale, decay, opts);
    middle + right + left
}

/// `∫_0^δ t^γ g(t) dt` for `γ > −1`, via `t = v^m` with `m = 1/(1+γ)` so
/// the transformed integrand is bounded at the origin.
pub fn integrate_power_origin<F: Fn(f64) -> f64>(
    g: F,
    gamma: f64,
    delta: f64,
    opts: QuadOptions,
) -> QuadResult {
    debug_assert!(gamma > -1.0);
    let m = 1.0 / (1.0 + gamma);
    let upper = delta.powf(1.0 / m);
    let r = integrate(|v: f64| g(v.powf(m)), 0.0, upper, opts);
    QuadResult {
        value: m * r.value,
        error: m * r.error,
        converged: r.converged,
    }
}
