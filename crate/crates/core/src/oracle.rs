//! Direct evaluation of the Laplace embedding on explicit test functions:
//! transforms, space norms, kernel sweeps, Monte-Carlo lower bounds and the
//! isometry self-test for `L²_w → A²_ν`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::report::real;
use crate::criteria::{evaluate_levels, CriterionId, CriterionReport, Evaluation, InputSpace, Real, ScaleValue, Witness};
use crate::error::{Error, Result};
use crate::geometry::DivergentEnd;
use crate::parallel::{argmax, det_sum};
use crate::quadrature::{
    integrate, integrate_half_line, integrate_power_origin, integrate_real_line_algebraic, integrate_real_line_with_breaks, QuadOptions, QuadResult,
};
use crate::special::{cpow, gamma, gamma_integral};
use crate::system::{spectral_measure, AtomicMeasure, DiagonalSystem};
use crate::zen::{weight, RadialMeasure};

/// One `coeff · t^{n−1} e^{−λt}` element of a random mix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixTerm {
    pub coeff: Complex64,
    pub n: u32,
    pub lambda: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `e^{−λt}`
    Exp { lambda: Complex64 },
    /// `t^{N−1} e^{−λt}`
    PolyExp { n: u32, lambda: Complex64 },
    /// `t^{−α} e^{−λt}`
    PowerExp { alpha: f64, lambda: Complex64 },
    /// Linear combination of poly_exp kernels drawn from `seed`.
    RandomMix { terms: Vec<MixTerm>, seed: u64 },
}

/// `coeff · t^power · e^{−rate·t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    coeff: Complex64,
    power: f64,
    rate: Complex64,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl TestFunction {
    pub fn validate(&self) -> Result<()> {
        let check_rate = |l: &Complex64| {
            if l.re > 0.0 && l.im.is_finite() && l.re.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidMeasure(format!("rate λ = {l} must have Re λ > 0")))
            }
        };
        match self {
            TestFunction::Exp { lambda } => check_rate(lambda),
            TestFunction::PolyExp { n, lambda } => {
                if *n == 0 {
                    return Err(Error::InvalidMeasure("poly_exp needs N ≥ 1".into()));
                }
                check_rate(lambda)
            }
            TestFunction::PowerExp { alpha, lambda } => {
                if !(*alpha < 1.0) || !alpha.is_finite() {
                    return Err(Error::InvalidMeasure(format!("power_exp needs α < 1, got {alpha}")));
                }
                check_rate(lambda)
            }
            TestFunction::RandomMix { terms, .. } => {
                for t in terms {
                    if t.n == 0 {
                        return Err(Error::InvalidMeasure("mix term needs N ≥ 1".into()));
                    }
                    check_rate(&t.lambda)?;
                }
                Ok(())
            }
        }
    }

    fn terms(&self) -> Vec<Term> {
        match self {
            TestFunction::Exp { lambda } => vec![Term {
                coeff: one(),
                power: 0.0,
                rate: *lambda,
            }],
            TestFunction::PolyExp { n, lambda } => vec![Term {
                coeff: one(),
                power: *n as f64 - 1.0,
                rate: *lambda,
            }],
            TestFunction::PowerExp { alpha, lambda } => vec![Term {
                coeff: one(),
                power: -alpha,
                rate: *lambda,
            }],
            TestFunction::RandomMix { terms, .. } => terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff,
                    power: t.n as f64 - 1.0,
                    rate: t.lambda,
                })
                .collect(),
        }
    }

    /// Pointwise value `f(t)` for `t > 0`.
    pub fn eval(&self, t: f64) -> Complex64 {
        eval_terms(&self.terms(), t)
    }
}

fn eval_terms(terms: &[Term], t: f64) -> Complex64 {
    terms
        .iter()
        .map(|x| x.coeff * t.powf(x.power) * (-x.rate * t).exp())
        .sum()
}

/// `w^{−s}`, exact integer powers where possible.
fn inv_pow(w: Complex64, s: f64) -> Complex64 {
    if s.fract() == 0.0 && s.abs() <= 64.0 {
        w.powi(-(s as i32))
    } else {
        cpow(w, -s)
    }
}

fn laplace_terms(terms: &[Term], z: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for t in terms {
        let w = t.rate + z;
        if w.norm() == 0.0 {
            return Err(Error::Singular(format!("λ + z = 0 at z = {z}: pole of the transform")));
        }
        acc += t.coeff * gamma(t.power + 1.0) * inv_pow(w, t.power + 1.0);
    }
    Ok(acc)
}

/// `ℒf(z) = ∫_0^∞ e^{−tz} f(t) dt` in closed form.
pub fn laplace_at(f: &TestFunction, z: Complex64) -> Result<Complex64> {
    if !(z.re >= 0.0) {
        return Err(Error::InvalidMeasure(format!("z = {z} is outside the closed right half-plane")));
    }
    f.validate()?;
    laplace_terms(&f.terms(), z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpaceNorm {
    #[serde(serialize_with = "real")]
    pub value: f64,
    pub divergent_end: Option<DivergentEnd>,
    /// Computed through nested quadrature of a fractional derivative.
    pub quadrature_grade: bool,
    pub error: f64,
}

impl SpaceNorm {
    fn exact(value: f64) -> Self {
        Self {
            value,
            divergent_end: None,
            quadrature_grade: false,
            error: 0.0,
        }
    }

    fn infinite(end: DivergentEnd) -> Self {
        Self {
            value: f64::INFINITY,
            divergent_end: Some(end),
            quadrature_grade: false,
            error: 0.0,
        }
    }
}

/// `∫ |f|² t^γ e^{−ρt}` summed over the weight terms, by Gamma integrals.
fn gram_norm_sq(terms: &[Term], weight: &[(f64, f64, f64)]) -> std::result::Result<f64, DivergentEnd> {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(cw, gam, rho) in weight {
        for a in terms {
            for b in terms {
                let s = a.power + b.power + gam;
                if s <= -1.0 {
                    return Err(DivergentEnd::Origin);
                }
                let c = a.rate.conj() + b.rate + rho;
                acc += a.coeff.conj() * b.coeff * cw * gamma_integral(s, c);
            }
        }
    }
    Ok(acc.re.max(0.0))
}

fn from_gram(r: std::result::Result<f64, DivergentEnd>) -> SpaceNorm {
    match r {
        Ok(v) => SpaceNorm::exact(v.sqrt()),
        Err(end) => SpaceNorm::infinite(end),
    }
}

fn min_rate(terms: &[Term]) -> f64 {
    terms.iter().map(|t| t.rate.re).fold(f64::INFINITY, f64::min)
}

/// `∫_0^∞ |Σ c t^σ e^{−λt}|^p dt` by quadrature.
fn lp_integral(terms: &[Term], p: f64) -> std::result::Result<QuadResult, DivergentEnd> {
    let smin = terms.iter().map(|t| t.power).fold(f64::INFINITY, f64::min);
    let tau = 1.0 / min_rate(terms);
    let opts = QuadOptions::default();
    let head = if smin < 0.0 {
        let gam = p * smin;
        if gam <= -1.0 {
            return Err(DivergentEnd::Origin);
        }
        let g = |t: f64| {
            let v: Complex64 = terms
                .iter()
                .map(|x| x.coeff * t.powf(x.power - smin) * (-x.rate * t).exp())
                .sum();
            v.norm().powf(p)
        };
        integrate_power_origin(g, gam, tau, opts)
    } else {
        integrate(|t| eval_terms(terms, t).norm().powf(p), 0.0, tau, opts)
    };
    Ok(head + integrate_half_line(|t| eval_terms(terms, t).norm().powf(p), tau, tau, opts))
}

fn lp_norm(terms: &[Term], p: f64) -> SpaceNorm {
    if p == 2.0 {
        return from_gram(gram_norm_sq(terms, &[(1.0, 0.0, 0.0)]));
    }
    if let [t] = terms {
        let s = p * t.power;
        if s <= -1.0 {
            return SpaceNorm::infinite(DivergentEnd::Origin);
        }
        let log = crate::special::ln_gamma(s + 1.0) - (s + 1.0) * (p * t.rate.re).ln();
        return SpaceNorm::exact(t.coeff.norm() * (log / p).exp());
    }
    match lp_integral(terms, p) {
        Ok(r) => SpaceNorm {
            value: r.value.max(0.0).powf(1.0 / p),
            divergent_end: None,
            quadrature_grade: false,
            error: r.error,
        },
        Err(end) => SpaceNorm::infinite(end),
    }
}

/// `(1/2π) ∫ |ℒf(iξ)|² (1 + |ξ|^{2β}) dξ` split into its two parts.
fn sobolev_l2(terms: &[Term], beta: f64) -> Result<SpaceNorm> {
    let base = match gram_norm_sq(terms, &[(1.0, 0.0, 0.0)]) {
        Ok(v) => v,
        Err(end) => return Ok(SpaceNorm::infinite(end)),
    };
    let smin = terms.iter().map(|t| t.power).fold(f64::INFINITY, f64::min);
    // |ℒf(iξ)|² |ξ|^{2β} ~ |ξ|^{2β − 2σ − 2}
    if beta >= smin + 0.5 {
        return Ok(SpaceNorm::infinite(DivergentEnd::Infinity));
    }
    if let [t] = terms {
        if t.rate.im == 0.0 {
            // ∫ |ξ|^{2β} (x² + ξ²)^{−(σ+1)} dξ = x^{2β−2σ−1} Γ(β+½) Γ(σ+½−β) / Γ(σ+1)
            let (x, s) = (t.rate.re, t.power);
            let g = gamma(s + 1.0);
            let deriv = t.coeff.norm_sqr() * g * g / (2.0 * PI)
                * x.powf(2.0 * beta - 2.0 * s - 1.0)
                * gamma(beta + 0.5)
                * gamma(s + 0.5 - beta)
                / g;
            return Ok(SpaceNorm::exact((base + deriv).sqrt()));
        }
    }
    let integrand = |xi: f64| match laplace_terms(terms, Complex64::new(0.0, xi)) {
        Ok(v) => v.norm_sqr() * xi.abs().powf(2.0 * beta) / (2.0 * PI),
        Err(_) => 0.0,
    };
    let mut breaks: Vec<f64> = terms.iter().map(|t| -t.rate.im).collect();
    breaks.push(0.0);
    let decay = 2.0 * smin + 2.0 - 2.0 * beta;
    let r = integrate_real_line_algebraic(integrand, &breaks, min_rate(terms), decay, QuadOptions::default());
    Ok(SpaceNorm {
        value: (base + r.value.max(0.0)).sqrt(),
        divergent_end: None,
        quadrature_grade: false,
        error: r.error,
    })
}

fn expm1(w: Complex64) -> Complex64 {
    if w.norm() < 1e-5 {
        w * (one() + w * (0.5 * one() + w / 6.0))
    } else {
        w.exp() - one()
    }
}

/// Riemann–Liouville derivative `D^β` of `Σ c e^{−λt}` at `t`, `0 < β < 1`,
/// in the form `(e^{−λt}t^{−β} + β ∫_0^t (e^{−λt} − e^{−λ(t−s)}) s^{−1−β} ds) / Γ(1−β)`.
fn frac_derivative(terms: &[Term], beta: f64, t: f64) -> Complex64 {
    let opts = QuadOptions::default();
    let mut acc = Complex64::new(0.0, 0.0);
    for x in terms {
        let l = x.rate;
        let h = |s: f64| -> Complex64 {
            if s == 0.0 {
                -l * (-l * t).exp()
            } else {
                (-l * (t - s)).exp() * expm1(-l * s) / s
            }
        };
        let re = integrate_power_origin(|s| h(s).re, -beta, t, opts).value;
        let im = integrate_power_origin(|s| h(s).im, -beta, t, opts).value;
        let v = (-l * t).exp() * t.powf(-beta) + beta * Complex64::new(re, im);
        acc += x.coeff * v;
    }
    acc / gamma(1.0 - beta)
}

/// `(‖f‖_p^p + ‖D^β f‖_p^p)^{1/p}` for exponential kernels.
fn sobolev_lp(terms: &[Term], p: f64, beta: f64) -> Result<SpaceNorm> {
    if terms.iter().any(|t| t.power != 0.0) {
        return Err(Error::Unsupported(
            "Sobolev norms with p ≠ 2 are implemented for exponential kernels only".into(),
        ));
    }
    if beta * p >= 1.0 {
        let mut n = SpaceNorm::infinite(DivergentEnd::Origin);
        n.quadrature_grade = true;
        return Ok(n);
    }
    let base = match lp_integral(terms, p) {
        Ok(r) => r,
        Err(end) => return Ok(SpaceNorm::infinite(end)),
    };
    let tau = 1.0 / min_rate(terms);
    let opts = QuadOptions::default();
    let head = integrate_power_origin(
        |t| frac_derivative(terms, beta, t).norm().powf(p) * t.powf(beta * p),
        -beta * p,
        tau,
        opts,
    );
    let tail = integrate_half_line(|t| frac_derivative(terms, beta, t).norm().powf(p), tau, tau, opts);
    let total = base + head + tail;
    Ok(SpaceNorm {
        value: total.value.max(0.0).powf(1.0 / p),
        divergent_end: None,
        quadrature_grade: true,
        error: total.error,
    })
}

fn norm_of_terms(terms: &[Term], space: &InputSpace) -> Result<SpaceNorm> {
    match space {
        InputSpace::Lp { p } => Ok(lp_norm(terms, *p)),
        InputSpace::PowerL2 { alpha } => Ok(from_gram(gram_norm_sq(terms, &[(1.0, *alpha, 0.0)]))),
        InputSpace::WeightedL2 { measure } => {
            let w: Vec<(f64, f64, f64)> = weight(measure)?
                .terms()
                .iter()
                .map(|t| (t.coeff, t.power, t.rate))
                .collect();
            Ok(from_gram(gram_norm_sq(terms, &w)))
        }
        InputSpace::Sobolev { p, beta } => {
            if *p == 2.0 {
                sobolev_l2(terms, *beta)
            } else {
                sobolev_lp(terms, *p, *beta)
            }
        }
    }
}

/// Norm of `f` in the input space; divergent norms are infinite with the
/// offending end named.
pub fn space_norm(f: &TestFunction, space: &InputSpace) -> Result<SpaceNorm> {
    f.validate()?;
    norm_of_terms(&f.terms(), space)
}

fn embedding_of_terms(m: &AtomicMeasure, q: f64, terms: &[Term]) -> Result<f64> {
    for a in m.atoms() {
        laplace_terms(terms, a.location)?;
    }
    let s = det_sum(m.atoms(), |a| {
        if a.mass == 0.0 {
            0.0
        } else {
            a.mass * laplace_terms(terms, a.location).map_or(0.0, |v| v.norm().powf(q))
        }
    });
    Ok(s.powf(1.0 / q))
}

/// `(Σ_k |ℒf(−λ_k)|^q |b_k|^q)^{1/q}`: the ℓ^q norm of the state reached by `f`.
pub fn embedding_value(sys: &DiagonalSystem, f: &TestFunction) -> Result<f64> {
    f.validate()?;
    embedding_of_terms(&spectral_measure(sys), sys.q(), &f.terms())
}

/// `embedding_value / space_norm`; zero when the norm diverges.
pub fn test_ratio(sys: &DiagonalSystem, space: &InputSpace, f: &TestFunction) -> Result<f64> {
    let n = space_norm(f, space)?;
    let e = embedding_value(sys, f)?;
    if !n.value.is_finite() {
        return Ok(0.0);
    }
    if n.value == 0.0 {
        return Err(Error::Singular("test function has zero norm".into()));
    }
    Ok(e / n.value)
}

/// Kernel family of a kernel-condition sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    /// `sup_z ‖ℒe^{−·z}‖_{L^q_μ} / ‖e^{−·z}‖` over real `z`.
    Exp,
    /// `‖(2^{n/p} ‖ℒe^{−2^n ·}‖_{L^q_μ})_n‖_{ℓ^{qp/(p−q)}}`.
    ExpDyadic,
    /// `t^{N−1} e^{−λt}` over complex `λ`.
    PolyExp { n: u32 },
    /// `t^{−α} e^{−tz}` over real `z`.
    PowerExp { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelGrid {
    pub per_octave: u32,
    /// The grid spans `[min Re z_k / span, span · max Re z_k]`.
    pub span: f64,
}

impl Default for KernelGrid {
    fn default() -> Self {
        Self {
            per_octave: 4,
            span: 100.0,
        }
    }
}

/// Smallest `N ≥ 1` with `t^{N−1}e^{−λt}` in `L²_w`.
fn weighted_order(measure: &RadialMeasure) -> u32 {
    let terms = measure.weight_terms();
    (1..)
        .find(|&n| terms.iter().all(|t| 2.0 * (n as f64 - 1.0) + t.power > -1.0))
        .unwrap_or(1)
}

/// The kernel family matching the space.
pub fn default_kernel(space: &InputSpace, q: f64) -> Result<KernelKind> {
    Ok(match space {
        InputSpace::Lp { p } => {
            if *p <= q {
                KernelKind::Exp
            } else {
                KernelKind::ExpDyadic
            }
        }
        InputSpace::WeightedL2 { measure } => KernelKind::PolyExp {
            n: weighted_order(measure),
        },
        InputSpace::PowerL2 { alpha } => KernelKind::PowerExp { alpha: *alpha },
        InputSpace::Sobolev { .. } => KernelKind::Exp,
    })
}

fn check_pairing(kind: KernelKind, space: &InputSpace, q: f64) -> Result<()> {
    const NAME: &str = "kernel condition";
    let ok = match (kind, space) {
        (KernelKind::Exp, InputSpace::Lp { p }) => *p <= q,
        (KernelKind::Exp, InputSpace::Sobolev { p, .. }) => *p <= q,
        (KernelKind::ExpDyadic, InputSpace::Lp { p }) => q < *p,
        (KernelKind::PolyExp { n }, InputSpace::WeightedL2 { measure }) => n >= weighted_order(measure),
        (KernelKind::PowerExp { alpha }, InputSpace::PowerL2 { alpha: a }) => alpha == *a,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::hypothesis(
            NAME,
            format!("kernel {kind:?} does not match the space {} with q = {q}", space.label()),
        ))
    }
}

fn kernel_terms(kind: KernelKind, lambda: Complex64) -> Vec<Term> {
    let power = match kind {
        KernelKind::Exp | KernelKind::ExpDyadic => 0.0,
        KernelKind::PolyExp { n } => n as f64 - 1.0,
        KernelKind::PowerExp { alpha } => -alpha,
    };
    vec![Term {
        coeff: one(),
        power,
        rate: lambda,
    }]
}

/// Kernel points `(λ, log2 Re λ)` spanning the real parts of the atoms.
/// Real parts sit on multiples of `1/per_octave` in log2 scale. The dyadic
/// family extends `extra` octaves past the span on both sides.
fn kernel_points(m: &AtomicMeasure, kind: KernelKind, grid: KernelGrid, extra: f64) -> Vec<Complex64> {
    let (lo, hi) = m
        .real_part_range()
        .filter(|&(lo, _)| lo > 0.0)
        .unwrap_or((1.0, 1.0));
    let ppo = grid.per_octave.max(1) as f64;
    let (a, b) = ((lo / grid.span).log2(), (hi * grid.span).log2());
    if kind == KernelKind::ExpDyadic {
        return ((a - extra).floor() as i32..=(b + extra).ceil() as i32)
            .map(|n| Complex64::new((n as f64).exp2(), 0.0))
            .collect();
    }
    let (i_lo, i_hi) = ((a * ppo).floor() as i64, (b * ppo).ceil() as i64);
    let reals: Vec<f64> = (i_lo..=i_hi).map(|i| (i as f64 / ppo).exp2()).collect();
    let complex = matches!(kind, KernelKind::PolyExp { .. });
    let ys: Vec<f64> = m
        .atoms()
        .iter()
        .filter(|x| x.mass > 0.0 && x.location.im != 0.0)
        .map(|x| x.location.im.abs())
        .collect();
    let mut out = Vec::new();
    for re in reals {
        out.push(Complex64::new(re, 0.0));
        if complex && !ys.is_empty() {
            let y_lo = ys.iter().cloned().fold(f64::INFINITY, f64::min).log2().floor() - 1.0;
            let y_hi = ys.iter().cloned().fold(0.0, f64::max).log2().ceil() + 1.0;
            let start = y_lo.max(re.log2() - 6.0);
            let count = ((y_hi - start) * ppo).floor() as i64;
            for i in 0..=count.max(-1) {
                let im = (start + i as f64 / ppo).exp2();
                out.push(Complex64::new(re, im));
                out.push(Complex64::new(re, -im));
            }
        }
    }
    out
}

/// Kernel-condition sweep: sup (or dyadic sequence norm) of the embedding
/// ratio over kernels spanning the spectrum.
pub fn kernel_condition_sweep(
    sys: &DiagonalSystem,
    space: &InputSpace,
    kind: KernelKind,
    grid: KernelGrid,
) -> Result<CriterionReport> {
    let q = sys.q();
    check_pairing(kind, space, q)?;
    let m = spectral_measure(sys);
    // Dyadic terms decay like 2^{-|n|/max(p, p')} past the spectrum.
    let extra = match space {
        InputSpace::Lp { p } if kind == KernelKind::ExpDyadic => 12.0 * p.max(p / (p - 1.0)),
        _ => 0.0,
    };
    let points = kernel_points(&m, kind, grid, extra);
    let norms: Vec<f64> = points
        .par_iter()
        .map(|&l| norm_of_terms(&kernel_terms(kind, l), space).map(|n| n.value))
        .collect::<Result<_>>()?;
    if let Some(i) = norms.iter().position(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::Unsupported(format!(
            "kernel at λ = {} has norm {} in {}",
            points[i],
            norms[i],
            space.label()
        )));
    }
    let real_edge = |l: Complex64| {
        let (first, last) = (points[0].re, points[points.len() - 1].re);
        l.re == first || l.re == last
    };
    let evaluate = |k: usize| -> Result<Evaluation> {
        let mk = m.prefix(k);
        let ratios: Vec<f64> = points
            .par_iter()
            .zip(&norms)
            .map(|(&l, &n)| embedding_of_terms(&mk, q, &kernel_terms(kind, l)).map(|e| e / n))
            .collect::<Result<_>>()?;
        let mut profile: Vec<ScaleValue> = Vec::new();
        for (l, &v) in points.iter().zip(&ratios) {
            let log2_scale = l.re.log2();
            match profile.last_mut() {
                Some(last) if last.log2_scale == log2_scale => last.value = last.value.max(v),
                _ => profile.push(ScaleValue { log2_scale, value: v }),
            }
        }
        if let KernelKind::ExpDyadic = kind {
            let InputSpace::Lp { p } = space else { unreachable!() };
            let terms: Vec<f64> = points
                .iter()
                .zip(&ratios)
                .zip(&norms)
                .map(|((l, r), n)| l.re.powf(1.0 / p) * r * n)
                .collect();
            let s = q * p / (p - q);
            let constant = terms.iter().map(|t| t.powf(s)).sum::<f64>().powf(1.0 / s);
            let best = argmax(terms.iter().copied()).filter(|b| b.1 > 0.0);
            let edge = best.is_some_and(|(_, v)| {
                terms[0] > 1e-3 * v || terms[terms.len() - 1] > 1e-3 * v
            });
            return Ok(Evaluation {
                constant,
                witness: best.map(|(i, _)| Witness::Scale {
                    n: points[i].re.log2().round() as i32,
                }),
                profile,
                witness_at_edge: edge,
                boundary_hits: 0,
            });
        }
        Ok(match argmax(ratios.iter().copied()) {
            Some((i, v)) if v > 0.0 => Evaluation {
                constant: v,
                witness: Some(Witness::Lambda {
                    re: points[i].re,
                    im: points[i].im,
                }),
                profile,
                witness_at_edge: real_edge(points[i]),
                boundary_hits: 0,
            },
            _ => Evaluation {
                profile,
                ..Evaluation::default()
            },
        })
    };
    let mut report = evaluate_levels(CriterionId::Kernel, m.len(), 1.0 / q, evaluate)?;
    let d = &mut report.diagnostics;
    d.secondary.insert("per_octave".into(), Real(grid.per_octave as f64));
    d.secondary.insert("span".into(), Real(grid.span));
    d.notes.push(format!("kernel family {kind:?}"));
    if let InputSpace::Sobolev { p, .. } = space {
        if *p == 2.0 {
            d.notes
                .push("Sobolev kernel norms use the frequency-side norm of the zero extension".into());
        } else {
            d.notes.push("Sobolev kernel norms are quadrature-grade for p ≠ 2".into());
        }
    }
    Ok(report)
}

/// Smallest admissible order of the random dictionary for the space.
fn dictionary_order(space: &InputSpace) -> Result<u32> {
    Ok(match space {
        InputSpace::Lp { .. } | InputSpace::PowerL2 { .. } => 1,
        InputSpace::WeightedL2 { measure } => weighted_order(measure),
        InputSpace::Sobolev { p, beta } => {
            if *p == 2.0 {
                (beta + 0.5).floor() as u32 + 1
            } else if beta * p < 1.0 {
                1
            } else {
                return Err(Error::Unsupported(format!(
                    "no finite-norm exponential kernels in H^{p}_{beta}"
                )));
            }
        }
    })
}

/// Slots across the dictionary span; items cycle through them.
const FAMILY_SLOTS: usize = 64;

/// Item `i` of the random poly_exp family; depends only on `(seed, i)`.
fn family_item(i: usize, seed: u64, span: (f64, f64), n_min: u32, fixed_order: bool) -> TestFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    let (e_lo, e_hi) = span;
    let delta = (e_hi - e_lo) / (FAMILY_SLOTS - 1) as f64;
    let center = if i < FAMILY_SLOTS {
        e_lo + i as f64 * delta + delta * rng.gen_range(-0.5..0.5)
    } else {
        rng.gen_range(e_lo..=e_hi)
    };
    let count = rng.gen_range(1..=3);
    let terms = (0..count)
        .map(|_| {
            let r = (center + rng.gen_range(-0.5..0.5)).exp2();
            let phi = rng.gen_range(-0.25..0.25);
            let n = if fixed_order { n_min } else { n_min + rng.gen_range(0..=1) };
            let coeff = Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(-PI..PI));
            MixTerm {
                coeff,
                n,
                lambda: Complex64::from_polar(r, phi),
            }
        })
        .collect();
    TestFunction::RandomMix { terms, seed }
}

/// The first `count` members of the seeded random family.
pub fn random_family(sys: &DiagonalSystem, space: &InputSpace, count: usize, seed: u64) -> Result<Vec<TestFunction>> {
    let n_min = dictionary_order(space)?;
    let fixed = matches!(space, InputSpace::Sobolev { p, .. } if *p != 2.0);
    let m = spectral_measure(sys);
    let (lo, hi) = m.real_part_range().unwrap_or((1.0, 1.0));
    let span = ((lo / 100.0).log2(), (hi * 100.0).log2());
    Ok((0..count).map(|i| family_item(i, seed, span, n_min, fixed)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalRatio {
    /// Lower bound on the embedding norm.
    #[serde(serialize_with = "real")]
    pub lower_bound: f64,
    pub best_index: Option<usize>,
    pub ratios: Vec<Real>,
    pub family_size: usize,
    pub seed: u64,
}

/// Max of the embedding ratio over `count` seeded random test functions.
pub fn empirical_ratio(sys: &DiagonalSystem, space: &InputSpace, count: usize, seed: u64) -> Result<EmpiricalRatio> {
    if count == 0 {
        return Err(Error::InvalidMeasure("family size must be at least 1".into()));
    }
    let family = random_family(sys, space, count, seed)?;
    let ratios: Vec<f64> = family
        .par_iter()
        .map(|f| test_ratio(sys, space, f))
        .collect::<Result<_>>()?;
    let best = argmax(ratios.iter().copied());
    Ok(EmpiricalRatio {
        lower_bound: best.map_or(0.0, |b| b.1),
        best_index: best.map(|b| b.0),
        ratios: ratios.into_iter().map(Real).collect(),
        family_size: count,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsometryCheck {
    /// `‖ℒf‖_{A²_ν}` by half-plane quadrature.
    pub transform_norm: f64,
    /// `‖f‖_{L²_w}` in closed form.
    pub function_norm: f64,
    pub relative_error: f64,
    pub converged: bool,
    /// Quadrature error estimate relative to `‖ℒf‖²`.
    pub achieved_tolerance: f64,
}

/// Compare `‖ℒf‖_{A²_ν}` (quadrature over the half-plane) with the closed
/// form of `‖f‖_{L²_w}`.
pub fn isometry_check(zen: &RadialMeasure, f: &TestFunction) -> Result<IsometryCheck> {
    f.validate()?;
    let terms = f.terms();
    let w: Vec<(f64, f64, f64)> = weight(zen)?
        .terms()
        .iter()
        .map(|t| (t.coeff, t.power, t.rate))
        .collect();
    if terms.is_empty() {
        return Ok(IsometryCheck {
            transform_norm: 0.0,
            function_norm: 0.0,
            relative_error: 0.0,
            converged: true,
            achieved_tolerance: 0.0,
        });
    }
    let rhs = gram_norm_sq(&terms, &w)
        .map_err(|end| Error::InvalidMeasure(format!("test function is not in L²_w (diverges at {end:?})")))?;
    let opts = QuadOptions::tight();
    let r0 = min_rate(&terms);
    let breaks: Vec<f64> = terms.iter().map(|t| -t.rate.im).collect();
    // H(x) = ∫_ℝ |ℒf(x + iy)|² dy
    let line = |x: f64| {
        integrate_real_line_with_breaks(
            |y| laplace_terms(&terms, Complex64::new(x, y)).map_or(0.0, |v| v.norm_sqr()),
            &breaks,
            x + r0,
            opts,
        )
    };
    let mut total = QuadResult {
        value: 0.0,
        error: 0.0,
        converged: true,
    };
    let scale = |r: QuadResult, c: f64| QuadResult {
        value: c * r.value,
        error: c * r.error,
        converged: r.converged,
    };
    if zen.atom_at_zero > 0.0 {
        total = total + scale(line(0.0), zen.atom_at_zero);
    }
    for &(r, mass) in &zen.atoms {
        if mass > 0.0 {
            total = total + scale(line(r), mass);
        }
    }
    if let Some(d) = zen.density.filter(|d| d.scale > 0.0) {
        let outer = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_intervals: 2000,
        };
        let head = integrate_power_origin(|x| line(x).value, d.alpha, r0, outer);
        let tail = integrate_half_line(|x| x.powf(d.alpha) * line(x).value, r0, r0, outer);
        total = total + scale(head + tail, d.scale);
    }
    let lhs = total.value.max(0.0);
    let relative_error = if lhs == 0.0 && rhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        (lhs.sqrt() / rhs.sqrt() - 1.0).abs()
    };
    Ok(IsometryCheck {
        transform_norm: lhs.sqrt(),
        function_norm: rhs.sqrt(),
        relative_error,
        converged: total.converged,
        achieved_tolerance: if lhs > 0.0 { total.error / lhs } else { 0.0 },
    })
}
