//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p admiss-core --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use admiss_core::controllability::{
    controllability_measure, interpolation_measure, interpolation_sum, sobolev_controllability, InterpolationProblem,
};
use admiss_core::criteria::carleson::{c1_zen_carleson, c2_power_square, c7_halfsquare};
use admiss_core::criteria::resolvent::{r1_ratio, r1_resolvent, r7_fractional_resolvent, r7_ratio};
use admiss_core::criteria::strips::c4_strip_summability;
use admiss_core::geometry::{
    balayage, balayage_norm, blaschke_products, measure_on_square, pseudo_hyperbolic, CarlesonSquare, SquarePart,
};
use admiss_core::oracle::{
    embedding_value, empirical_ratio, isometry_check, kernel_condition_sweep, laplace_at, space_norm, KernelGrid,
    KernelKind, TestFunction,
};
use admiss_core::quadrature::{integrate, integrate_half_line, integrate_real_line, QuadOptions};
use admiss_core::special::gamma;
use admiss_core::zen::{delta2_constant, nu_square_mass, weight, weight_by_quadrature, PowerDensity, RadialGrid};
use admiss_core::{
    heat_system, spectral_measure, AtomicMeasure, CriterionOptions, DiagonalSystem, InputSpace, RadialMeasure,
    ScaleGrid, Verdict,
};
use common::{random_measure, rel, sectorial_system};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= budget, || format!("took {:.2}s, budget {:.0}s", t.as_secs_f64(), budget.as_secs_f64()))
}

fn heat_threshold() -> Outcome {
    let start = Instant::now();
    let m = spectral_measure(&heat_system(100_000).map_err(|e| e.to_string())?);
    let grid = ScaleGrid::new(-10, 45).unwrap();
    let mut row = Vec::new();
    for p in [1.2, 1.3, 1.35, 1.4, 1.5, 2.0, 3.0, 4.0] {
        let r = if p <= 2.0 {
            c2_power_square(&m, p, 2.0, true, grid)
        } else {
            c4_strip_summability(&m, p, 2.0, grid)
        }
        .map_err(|e| format!("p = {p}: {e}"))?;
        let want = if p < 4.0 / 3.0 { Verdict::UnboundedEvidence } else { Verdict::BoundedEvidence };
        ensure(r.verdict == want, || {
            format!("p = {p}: {} gave {} (constant {:.4e}), want {}", r.criterion, r.verdict, r.constant, want)
        })?;
        row.push(format!("{p}:{}", r.verdict));
    }
    within_budget(start, Duration::from_secs(30))?;
    Ok(format!("{} in {:.1}s", row.join(" "), start.elapsed().as_secs_f64()))
}

fn dictionary(min_order: u32) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..10)
        .map(|i| TestFunction::PolyExp {
            n: min_order + (i % 3) as u32,
            lambda: c(rng.gen_range(0.25..4.0), rng.gen_range(-3.0..3.0)),
        })
        .collect()
}

fn isometry() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let presets = [
        ("hardy", RadialMeasure::hardy(), 1),
        ("bergman 0", RadialMeasure::bergman(0.0).unwrap(), 2),
        ("bergman 0.5", RadialMeasure::bergman(0.5).unwrap(), 2),
        ("bergman 1", RadialMeasure::bergman(1.0).unwrap(), 2),
    ];
    for (name, zen, order) in presets {
        for f in dictionary(order) {
            let r = isometry_check(&zen, &f).map_err(|e| format!("{name}, {f:?}: {e}"))?;
            ensure(r.relative_error < 1e-6, || format!("{name}, {f:?}: error {:.3e}", r.relative_error))?;
            worst = worst.max(r.relative_error);
        }
    }
    within_budget(start, Duration::from_secs(5))?;
    Ok(format!("max relative error {worst:.2e} in {:.2}s", start.elapsed().as_secs_f64()))
}

fn balayage_conservation() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let m = random_measure(seed, 50);
        let total = m.total_mass();
        let n = balayage_norm(&m, 0.0, 1.0).map_err(|e| format!("seed {seed}: {e}"))?;
        let err = (n.value - total).abs();
        ensure(err < 1e-8 * total, || format!("seed {seed}: |∫S − μ| = {err:.3e}, μ = {total:.4}"))?;
        worst = worst.max(err / total);
    }
    Ok(format!("100 measures, max relative defect {worst:.2e}"))
}

const ALPHAS: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

/// Verdicts of the paired criteria for one random system.
struct Pairing {
    hardy: (Verdict, Verdict),
    power: Vec<(Verdict, Verdict)>,
}

fn pairing(sys: &DiagonalSystem) -> Result<Pairing, String> {
    let opts = CriterionOptions::default();
    let m = spectral_measure(sys);
    let hardy = RadialMeasure::hardy();
    let c1 = c1_zen_carleson(&m, &hardy, opts.grid).map_err(|e| e.to_string())?;
    let r1 = r1_resolvent(sys, &hardy, None, opts).map_err(|e| e.to_string())?;
    let mut power = Vec::new();
    for a in ALPHAS {
        let c7 = c7_halfsquare(&m, a, opts.grid).map_err(|e| e.to_string())?;
        let r7 = r7_fractional_resolvent(sys, a, opts).map_err(|e| e.to_string())?;
        power.push((c7.verdict, r7.verdict));
    }
    Ok(Pairing { hardy: (c1.verdict, r1.verdict), power })
}

fn equivalence(systems: &[(DiagonalSystem, Pairing)]) -> Outcome {
    let mut decided = 0;
    for (seed, (_, p)) in systems.iter().enumerate() {
        ensure(p.hardy.0 == p.hardy.1, || format!("seed {seed}: C1 {} vs R1 {}", p.hardy.0, p.hardy.1))?;
        for (a, (c7, r7)) in ALPHAS.iter().zip(&p.power) {
            ensure(c7 == r7, || format!("seed {seed}, α = {a}: C7 {c7} vs R7 {r7}"))?;
        }
        decided += std::iter::once(p.hardy.0)
            .chain(p.power.iter().map(|v| v.0))
            .filter(|v| *v != Verdict::Inconclusive)
            .count();
    }
    Ok(format!("50 systems agree; {decided}/250 pairs decided"))
}

fn oracle_consistency(systems: &[(DiagonalSystem, Pairing)]) -> Outcome {
    let coarse = KernelGrid::default();
    let fine = KernelGrid { per_octave: 2 * coarse.per_octave, ..coarse };
    let mut checked = 0;
    let mut worst = 0.0f64;
    for (seed, (sys, p)) in systems.iter().enumerate() {
        let mut configs = Vec::new();
        if p.hardy.0 == Verdict::BoundedEvidence {
            configs.push((InputSpace::lp(2.0).unwrap(), KernelKind::Exp));
        }
        for (a, v) in ALPHAS.iter().zip(&p.power) {
            if v.0 == Verdict::BoundedEvidence {
                configs.push((InputSpace::power_l2(*a).unwrap(), KernelKind::PowerExp { alpha: *a }));
            }
        }
        for (space, kind) in configs {
            let a = kernel_condition_sweep(sys, &space, kind, coarse).map_err(|e| e.to_string())?.constant;
            let b = kernel_condition_sweep(sys, &space, kind, fine).map_err(|e| e.to_string())?.constant;
            let label = space.label();
            ensure(a.is_finite() && b.is_finite(), || format!("seed {seed}, {label}: {a} / {b}"))?;
            ensure(rel(a, b) < 0.05, || format!("seed {seed}, {label}: {a:.6} vs {b:.6}"))?;
            worst = worst.max(rel(a, b));
            checked += 1;
        }
    }
    ensure(checked > 0, || "no bounded configurations to check".into())?;
    let heat = heat_system(100_000).map_err(|e| e.to_string())?;
    let space = InputSpace::lp(1.2).unwrap();
    let one = empirical_ratio(&heat, &space, 1, 0).map_err(|e| e.to_string())?.lower_bound;
    let many = empirical_ratio(&heat, &space, 64, 0).map_err(|e| e.to_string())?.lower_bound;
    ensure(many > 10.0 * one, || format!("heat Lp(1.2): M = 64 gives {many:.4}, M = 1 gives {one:.4}"))?;
    Ok(format!(
        "{checked} bounded sweeps, max change {:.2}%; heat Lp(1.2) M=64/M=1 = {:.1}",
        100.0 * worst,
        many / one
    ))
}

/// `(name, computed, independent oracle, stated value)`.
type Regression = (&'static str, f64, f64, f64);

fn regression_cases() -> Result<Vec<Regression>, String> {
    let e = |x: admiss_core::Error| x.to_string();
    let tight = QuadOptions::tight();
    let single = DiagonalSystem::new(vec![c(-1.0, 0.0)], vec![c(1.0, 0.0)], 2.0).unwrap();
    let delta1 = spectral_measure(&single);
    let heat3: Vec<Complex64> = (1..=3).map(|k| c((k * k) as f64 * PI * PI, 0.0)).collect();
    let hand = |z: Complex64, w: Complex64| ((z - w) / (z + w.conj())).norm();
    let hardy = RadialMeasure::hardy();
    let bergman1 = RadialMeasure::bergman(1.0).map_err(e)?;
    let root_half = RadialMeasure::new(0.0, vec![], Some(PowerDensity { alpha: 0.5, scale: 1.0 })).map_err(e)?;
    let poisson_l2 = integrate_real_line(|t| (1.0 / (PI * (1.0 + t * t))).powi(2), 0.0, 1.0, tight).value.sqrt();

    let mut v: Vec<Regression> = vec![
        ("p(1, 2)", pseudo_hyperbolic(c(1.0, 0.0), c(2.0, 0.0)).map_err(e)?, hand(c(1.0, 0.0), c(2.0, 0.0)), 1.0 / 3.0),
        ("p(1, 3)", pseudo_hyperbolic(c(1.0, 0.0), c(3.0, 0.0)).map_err(e)?, hand(c(1.0, 0.0), c(3.0, 0.0)), 0.5),
        (
            "b_inf,1 for {1, 2}",
            blaschke_products(&[c(1.0, 0.0), c(2.0, 0.0)], 0).map_err(e)?.products[0],
            hand(c(2.0, 0.0), c(1.0, 0.0)),
            1.0 / 3.0,
        ),
        (
            "b_inf,1 heat K = 3",
            blaschke_products(&heat3, 0).map_err(e)?.products[0],
            hand(heat3[1], heat3[0]) * hand(heat3[2], heat3[0]),
            12.0 / 25.0,
        ),
        (
            "single-mode R1 ratio",
            r1_ratio(&delta1, &hardy, 1, c(1.0, 0.0)).map_err(e)?,
            0.25 / (2.0 * PI * integrate_half_line(|t| (-2.0 * t).exp(), 0.0, 1.0, tight).value),
            1.0 / (4.0 * PI),
        ),
        ("single-mode R7 ratio, α = 1/2", r7_ratio(&delta1, 0.5, 1.0), (2.0f64.powf(-1.0)).sqrt(), 0.5f64.sqrt()),
        ("balayage S_δ1(0)", balayage(&delta1, 0.0).map_err(e)?, 1.0 / (PI * (1.0 + 0.0)), 1.0 / PI),
        ("balayage L² norm of δ1", balayage_norm(&delta1, 0.0, 2.0).map_err(e)?.value, poisson_l2, (0.5 / PI).sqrt()),
        (
            "balayage L² norm of δ4",
            balayage_norm(&AtomicMeasure::from_pairs([(c(4.0, 0.0), 1.0)]).map_err(e)?, 0.0, 2.0).map_err(e)?.value,
            0.5 * poisson_l2,
            0.5 * (0.5 / PI).sqrt(),
        ),
        (
            "Laplace poly_exp(2, 1) at 0",
            laplace_at(&TestFunction::PolyExp { n: 2, lambda: c(1.0, 0.0) }, c(0.0, 0.0)).map_err(e)?.re,
            integrate_half_line(|t| t * (-t).exp(), 0.0, 1.0, tight).value,
            1.0,
        ),
        (
            "Laplace power_exp(1/2, 1) at 0",
            laplace_at(&TestFunction::PowerExp { alpha: 0.5, lambda: c(1.0, 0.0) }, c(0.0, 0.0)).map_err(e)?.re,
            gamma(0.5),
            PI.sqrt(),
        ),
        (
            "exp(1) in L²(2π dt)",
            space_norm(&TestFunction::Exp { lambda: c(1.0, 0.0) }, &InputSpace::weighted_l2(hardy.clone()).map_err(e)?)
                .map_err(e)?
                .value,
            (2.0 * PI * integrate_half_line(|t| (-2.0 * t).exp(), 0.0, 1.0, tight).value).sqrt(),
            PI.sqrt(),
        ),
        (
            "exp(3) in L^1.5",
            space_norm(&TestFunction::Exp { lambda: c(3.0, 0.0) }, &InputSpace::lp(1.5).map_err(e)?).map_err(e)?.value,
            integrate_half_line(|t| (-4.5 * t).exp(), 0.0, 1.0, tight).value.powf(1.0 / 1.5),
            4.5f64.powf(-1.0 / 1.5),
        ),
        (
            "power_exp(1/2, 2) in L²(t^1/2 dt)",
            space_norm(&TestFunction::PowerExp { alpha: 0.5, lambda: c(2.0, 0.0) }, &InputSpace::power_l2(0.5).map_err(e)?)
                .map_err(e)?
                .value,
            (gamma(0.5) / 2.0).sqrt(),
            (PI.sqrt() / 2.0).sqrt(),
        ),
        (
            "single-mode embedding of exp(1)",
            embedding_value(&single, &TestFunction::Exp { lambda: c(1.0, 0.0) }).map_err(e)?,
            (1.0f64 / (1.0 + 1.0)).abs(),
            0.5,
        ),
        (
            "weight of density r at t = 3",
            weight(&bergman1).map_err(e)?.eval(3.0),
            2.0 * PI * integrate_half_line(|r| r * (-6.0 * r).exp(), 0.0, 1.0, tight).value,
            PI / 18.0,
        ),
        (
            "weight of density r^1/2 at t = 1",
            weight(&root_half).map_err(e)?.eval(1.0),
            weight_by_quadrature(&root_half, 1.0).value,
            2.0 * PI * gamma(1.5) / 2f64.powf(1.5),
        ),
        (
            "Δ₂ constant of density r^1/2",
            delta2_constant(&root_half, RadialGrid::default()).constant,
            integrate(|s| s.sqrt(), 0.0, 2.0, tight).value / integrate(|s| s.sqrt(), 0.0, 1.0, tight).value,
            2f64.powf(1.5),
        ),
        (
            "ν̃-mass of the square over |I| = 2, density r^1/2",
            nu_square_mass(&root_half, 2.0),
            integrate(|s| s.sqrt(), 0.0, 2.0, tight).value * 2.0,
            2f64.powf(2.5) / 1.5,
        ),
    ];

    let heat100 = heat_system(100).map_err(e)?;
    let mut sum = 0.0;
    for k in 1..=100 {
        let z = (k * k) as f64 * PI * PI;
        sum += (1.0 + z).powi(-2);
    }
    v.push((
        "heat K = 100 embedding of exp(1)",
        embedding_value(&heat100, &TestFunction::Exp { lambda: c(1.0, 0.0) }).map_err(e)?,
        sum.sqrt(),
        sum.sqrt(),
    ));
    let kernel = kernel_condition_sweep(&single, &InputSpace::lp(2.0).map_err(e)?, KernelKind::Exp, KernelGrid::default())
        .map_err(e)?;
    v.push(("single-mode kernel ratio", kernel.constant, 0.5 / 0.5f64.sqrt(), 0.5f64.sqrt()));

    let square = |len: f64, part: SquarePart| measure_on_square(&delta1, CarlesonSquare::symmetric(len), part);
    v.push(("δ1 on Q of side 3", square(3.0, SquarePart::Full), 1.0, 1.0));
    v.push(("δ1 on T of side 1.5", square(1.5, SquarePart::RightHalf), 1.0, 1.0));

    let two = DiagonalSystem::new(vec![c(-1.0, 0.0), c(-2.0, 0.0)], vec![c(1.0, 0.0); 2], 2.0).map_err(e)?;
    let cm = controllability_measure(&two).map_err(e)?;
    let third = hand(c(1.0, 0.0), c(2.0, 0.0));
    v.push(("controllability mass at 1", cm.measure.atoms()[0].mass, 1.0 / (third * third), 9.0));
    v.push(("controllability mass at 2", cm.measure.atoms()[1].mass, 4.0 / (third * third), 36.0));
    let prob = InterpolationProblem::new(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)], 1.0).map_err(e)?;
    let (im, _) = interpolation_measure(&prob).map_err(e)?;
    v.push(("interpolation mass, z = 1, β = 1", im.atoms()[0].mass, 2f64.powi(2) * 2f64.powi(2), 16.0));
    let iso = isometry_check(&hardy, &TestFunction::Exp { lambda: c(1.0, 0.0) }).map_err(e)?;
    v.push(("Hardy ‖ℒ exp(1)‖²", iso.transform_norm.powi(2), iso.function_norm.powi(2), PI));
    Ok(v)
}

fn exact_values() -> Outcome {
    let cases = regression_cases()?;
    for (name, got, oracle, stated) in &cases {
        ensure(rel(*oracle, *stated) < 1e-10, || format!("{name}: oracle {oracle} disagrees with {stated}"))?;
        let tol = if name.starts_with("Hardy") { 1e-8 } else { 1e-10 };
        ensure(rel(*got, *stated) < tol, || format!("{name}: {got} vs {stated}"))?;
    }
    Ok(format!("{} values", cases.len()))
}

fn scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid = ScaleGrid::default();
    let opts = CriterionOptions::default();
    let hardy = RadialMeasure::hardy();
    let (sys, _) = sectorial_system(4);
    let m = spectral_measure(&sys);
    let base_c = [
        c1_zen_carleson(&m, &hardy, grid).unwrap().constant,
        c2_power_square(&m, 1.5, 2.0, true, grid).unwrap().constant,
        c7_halfsquare(&m, 0.25, grid).unwrap().constant,
    ];
    let base_r = [
        r1_resolvent(&sys, &hardy, None, opts).unwrap().constant,
        r7_fractional_resolvent(&sys, 0.25, opts).unwrap().constant,
    ];
    let heat = heat_system(40).unwrap();
    let base_g = sobolev_controllability(&heat, 1.0, None, grid).unwrap().constant;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let factor: f64 = rng.gen_range(0.1..10.0);
        let phase = Complex64::from_polar(factor, rng.gen_range(0.0..2.0 * PI));
        let s = sys.scaled(phase);
        let ms = spectral_measure(&s);
        let cs = [
            c1_zen_carleson(&ms, &hardy, grid).unwrap().constant,
            c2_power_square(&ms, 1.5, 2.0, true, grid).unwrap().constant,
            c7_halfsquare(&ms, 0.25, grid).unwrap().constant,
        ];
        for (a, b) in cs.iter().zip(&base_c) {
            let d = rel(*a, b * factor.powi(2));
            ensure(d < 1e-12, || format!("c = {factor}: C-constant {a} vs {}", b * factor.powi(2)))?;
            worst = worst.max(d);
        }
        let rs = [
            r1_resolvent(&s, &hardy, None, opts).unwrap().constant,
            r7_fractional_resolvent(&s, 0.25, opts).unwrap().constant,
        ];
        for (a, b) in rs.iter().zip(&base_r) {
            let d = rel(*a, b * factor);
            ensure(d < 1e-12, || format!("c = {factor}: R-constant {a} vs {}", b * factor))?;
            worst = worst.max(d);
        }
        let g: Vec<Complex64> = heat.coeffs().iter().map(|b| b * phase).collect();
        let cg = sobolev_controllability(&heat, 1.0, Some(&g), grid).unwrap().constant;
        let d = rel(cg, base_g * factor.powi(-2));
        ensure(d < 1e-12, || format!("c = {factor}: interpolation constant {cg} vs {}", base_g * factor.powi(-2)))?;
        worst = worst.max(d);
        let pts: Vec<Complex64> = (1..=12).map(|k| c(4f64.powi(k), 0.0)).collect();
        let w = vec![c(1.0, 0.0); pts.len()];
        let wc: Vec<Complex64> = w.iter().map(|x| x * phase).collect();
        let a = interpolation_sum(&InterpolationProblem::new(pts.clone(), w, 0.5).unwrap(), grid).unwrap().constant;
        let b = interpolation_sum(&InterpolationProblem::new(pts, wc, 0.5).unwrap(), grid).unwrap().constant;
        let d = rel(b, a * factor.powi(-2));
        ensure(d < 1e-12, || format!("c = {factor}: interpolation sum {b} vs {}", a * factor.powi(-2)))?;
        worst = worst.max(d);
    }
    Ok(format!("10 factors, max relative deviation {worst:.1e}"))
}

fn main() {
    let systems: Vec<(DiagonalSystem, Pairing)> = (0..50)
        .map(|seed| {
            let (sys, _) = sectorial_system(seed);
            let p = pairing(&sys).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            (sys, p)
        })
        .collect();
    let runs: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("heat-equation threshold", Box::new(heat_threshold)),
        ("Laplace isometry", Box::new(isometry)),
        ("balayage conservation", Box::new(balayage_conservation)),
        ("criterion/resolvent equivalence", Box::new(|| equivalence(&systems))),
        ("oracle consistency", Box::new(|| oracle_consistency(&systems))),
        ("exact-value regression", Box::new(exact_values)),
        ("scaling laws", Box::new(scaling)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in runs.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS  {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}. {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
