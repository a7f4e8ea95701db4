use std::path::{Path, PathBuf};
use std::time::Instant;

use admiss_core::oracle::{empirical_ratio, isometry_check, EmpiricalRatio, IsometryCheck, KernelGrid, TestFunction};
use admiss_core::{CriterionOptions, DispatchOptions, InputSpace, RadialMeasure, SystemConfig};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::engine::{evaluate, exit_code, Evaluation, Selection};
use crate::inputs::{load_system, parse_space, space_document, InputDigest};
use crate::manifest::RunManifest;
use crate::render;
use crate::{CheckArgs, CliError, Common, Format, OracleArgs, SweepArgs};

/// Largest isometry error accepted by the self-test.
const ISOMETRY_TOLERANCE: f64 = 1e-6;

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    p.as_deref().ok_or_else(|| CliError::usage(format!("{flag} is required")))
}

fn dispatch_options(c: &Common) -> DispatchOptions {
    DispatchOptions {
        criteria: CriterionOptions {
            grid: c.grid,
            per_octave: c.per_octave.max(1),
        },
        order: c.order,
        kernel_grid: KernelGrid {
            per_octave: c.kernel_per_octave.max(1),
            ..KernelGrid::default()
        },
        cross_checks: !c.no_cross_checks,
        ..DispatchOptions::default()
    }
}

fn settings(c: &Common, cfg: &SystemConfig, opts: &DispatchOptions) -> Value {
    json!({
        "criterion": c.criterion.name(),
        "grid": c.grid,
        "modes": cfg.system.truncation(),
        "q": cfg.system.q(),
        "beta": cfg.beta,
        "g_given": cfg.g.is_some(),
        "seed": c.seed,
        "dispatch": opts,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn load_space(c: &Common, inputs: &mut Vec<InputDigest>) -> Result<Option<(Value, InputSpace)>, CliError> {
    let Some(arg) = &c.space else {
        return Ok(None);
    };
    let (doc, digest) = space_document(arg)?;
    let space = parse_space(&doc, &digest.source)?;
    inputs.push(digest);
    Ok(Some((doc, space)))
}

fn report_rows(e: &Evaluation) -> Vec<Vec<String>> {
    let routed = e.reports().iter().map(|r| (r, "routed"));
    let cross = e.cross_checks().iter().map(|r| (r, "cross-check"));
    routed
        .chain(cross)
        .map(|(r, role)| {
            vec![
                r.criterion.to_string(),
                role.to_string(),
                render::constant(r.constant),
                render::witness(r),
                r.verdict.to_string(),
            ]
        })
        .collect()
}

pub fn check(a: CheckArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let c = &a.common;
    let (cfg, digest) = load_system(required(&c.system, "--system")?, c.modes)?;
    let mut inputs = vec![digest];
    let space = load_space(c, &mut inputs)?.map(|s| s.1);
    let opts = dispatch_options(c);
    let eval = evaluate(&cfg, space.as_ref(), c.criterion, &opts)?;
    let manifest = RunManifest::new("check", inputs, settings(c, &cfg, &opts), start.elapsed().as_secs_f64(), &eval);
    if let Some(out) = &c.out {
        write(out, &manifest.to_json())?;
    }
    let header = ["criterion", "role", "constant", "witness", "verdict"];
    let rows = report_rows(&eval);
    match c.format {
        Format::Json => render::emit(&manifest.to_json()),
        Format::Csv => render::emit(&render::csv(&header, &rows).map_err(|e| CliError::usage(e.to_string()))?),
        Format::Table => {
            let mut text = render::table(&header, &rows);
            text += &format!("combined: {}\n", eval.combined());
            for n in eval.notes() {
                text += &format!("note: {n}\n");
            }
            render::emit(&text);
        }
    }
    Ok(exit_code(eval.combined()))
}

#[derive(Debug, Serialize)]
struct SweepRow {
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    outcome: Option<Evaluation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn sweep_row(
    value: f64,
    param: &str,
    cfg: &SystemConfig,
    template: Option<&Value>,
    selection: Selection,
    opts: &DispatchOptions,
) -> Result<Evaluation, String> {
    let mut cfg = cfg.clone();
    let space = match template {
        Some(doc) if !(param == "beta" && !selection.needs_space()) => {
            let mut doc = doc.clone();
            doc[param] = json!(value);
            Some(InputSpace::from_value(&doc, "$").map_err(|e| e.to_string())?)
        }
        other => {
            cfg.beta = Some(value);
            other.map(|d| InputSpace::from_value(d, "$")).transpose().map_err(|e| e.to_string())?
        }
    };
    evaluate(&cfg, space.as_ref(), selection, opts).map_err(|e| e.0)
}

pub fn sweep(a: SweepArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let c = &a.common;
    if a.values.is_empty() {
        return Err(CliError::usage("--values is empty: the sweep range must hold at least one value"));
    }
    let (cfg, digest) = load_system(required(&c.system, "--system")?, c.modes)?;
    let mut inputs = vec![digest];
    let template = load_space(c, &mut inputs)?.map(|s| s.0);
    let varies_system = a.param == "beta" && !c.criterion.needs_space();
    if !varies_system {
        let has_key = template.as_ref().and_then(Value::as_object).is_some_and(|o| o.contains_key(&a.param));
        if !has_key {
            return Err(CliError::usage(format!("the space template has no key `{}` to sweep", a.param)));
        }
    }
    let opts = dispatch_options(c);
    let rows: Vec<SweepRow> = a
        .values
        .par_iter()
        .map(|&v| match sweep_row(v, &a.param, &cfg, template.as_ref(), c.criterion, &opts) {
            Ok(e) => SweepRow { value: v, outcome: Some(e), error: None },
            Err(e) => SweepRow { value: v, outcome: None, error: Some(e) },
        })
        .collect();

    let header = ["param", "criterion", "constant", "verdict", "note"];
    let mut table = Vec::new();
    for row in &rows {
        let param = format!("{}", row.value);
        match (&row.outcome, &row.error) {
            (Some(e), _) if !e.reports().is_empty() => {
                for r in e.reports() {
                    table.push(vec![
                        param.clone(),
                        r.criterion.to_string(),
                        render::constant(r.constant),
                        r.verdict.to_string(),
                        String::new(),
                    ]);
                }
            }
            (Some(e), _) => {
                table.push(vec![param, "-".into(), String::new(), e.combined().to_string(), e.notes().join("; ")]);
            }
            (None, err) => {
                table.push(vec![param, "-".into(), String::new(), "error".into(), err.clone().unwrap_or_default()]);
            }
        }
    }
    let csv = render::csv(&header, &table).map_err(|e| CliError::usage(e.to_string()))?;
    let mut s = settings(c, &cfg, &opts);
    s["param"] = json!(a.param);
    s["values"] = json!(a.values);
    let manifest = RunManifest::new("sweep", inputs, s, start.elapsed().as_secs_f64(), &rows);
    if let Some(out) = &c.out {
        write(out, &csv)?;
    }
    if let Some(path) = &a.manifest {
        write(path, &manifest.to_json())?;
    }
    match c.format {
        Format::Json => render::emit(&manifest.to_json()),
        Format::Csv => render::emit(&csv),
        Format::Table => render::emit(&render::table(&header, &table)),
    }
    Ok(if rows.iter().any(|r| r.error.is_some()) { 3 } else { 0 })
}

/// Smallest `N` with `t^{N−1}e^{−λt}` in `L²_w`.
fn isometry_order(zen: &RadialMeasure) -> u32 {
    let terms = zen.weight_terms();
    (1..)
        .find(|&n| terms.iter().all(|t| 2.0 * (n as f64 - 1.0) + t.power > -1.0))
        .unwrap_or(1)
}

/// Ten poly_exp kernels on a fixed grid of rates.
fn isometry_dictionary(order: u32) -> Vec<TestFunction> {
    (0..10)
        .map(|j| TestFunction::PolyExp {
            n: order + j % 3,
            lambda: Complex64::new((10 + 7 * j) as f64 / 20.0, (9 * j as i32 - 40) as f64 / 20.0),
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct IsometryRow {
    function: TestFunction,
    check: IsometryCheck,
}

fn isometry(c: &Common, preset: &str, start: Instant) -> Result<u8, CliError> {
    let zen = RadialMeasure::preset(preset).map_err(|e| CliError::usage(format!("--isometry: {e}")))?;
    let order = isometry_order(&zen);
    let rows: Vec<IsometryRow> = isometry_dictionary(order)
        .into_iter()
        .map(|f| isometry_check(&zen, &f).map(|check| IsometryRow { function: f, check }))
        .collect::<Result<_, _>>()?;
    let worst = rows.iter().map(|r| r.check.relative_error).fold(0.0, f64::max);
    let settings = json!({ "isometry": preset, "order": order, "tolerance": ISOMETRY_TOLERANCE });
    let manifest = RunManifest::new("oracle", Vec::new(), settings, start.elapsed().as_secs_f64(), &rows);
    if let Some(out) = &c.out {
        write(out, &manifest.to_json())?;
    }
    let header = ["function", "transform_norm", "function_norm", "relative_error"];
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let name = match &r.function {
                TestFunction::PolyExp { n, lambda } => format!("poly_exp(N={n}, λ={lambda})"),
                other => format!("{other:?}"),
            };
            vec![
                name,
                render::constant(r.check.transform_norm),
                render::constant(r.check.function_norm),
                format!("{:.3e}", r.check.relative_error),
            ]
        })
        .collect();
    match c.format {
        Format::Json => render::emit(&manifest.to_json()),
        Format::Csv => render::emit(&render::csv(&header, &table).map_err(|e| CliError::usage(e.to_string()))?),
        Format::Table => {
            render::emit(&format!("{}max relative error: {worst:.3e}\n", render::table(&header, &table)));
        }
    }
    Ok(if worst < ISOMETRY_TOLERANCE { 0 } else { 3 })
}

pub fn oracle(a: OracleArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let c = &a.common;
    if let Some(preset) = &a.isometry {
        return isometry(c, preset, start);
    }
    if a.sizes.is_empty() || a.sizes.contains(&0) {
        return Err(CliError::usage("--m needs family sizes of at least 1"));
    }
    let (cfg, digest) = load_system(required(&c.system, "--system")?, c.modes)?;
    let mut inputs = vec![digest];
    let space = load_space(c, &mut inputs)?
        .map(|s| s.1)
        .ok_or_else(|| CliError::usage("--space is required"))?;
    let results: Vec<EmpiricalRatio> = a
        .sizes
        .iter()
        .map(|&m| empirical_ratio(&cfg.system, &space, m, c.seed))
        .collect::<Result<_, _>>()?;
    let mut s = settings(c, &cfg, &dispatch_options(c));
    s["family_sizes"] = json!(a.sizes);
    let manifest = RunManifest::new("oracle", inputs, s, start.elapsed().as_secs_f64(), &results);
    if let Some(out) = &c.out {
        write(out, &manifest.to_json())?;
    }
    let header = ["M", "lower_bound", "best_index"];
    let table: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.family_size.to_string(),
                render::constant(r.lower_bound),
                r.best_index.map_or_else(|| "-".into(), |i| i.to_string()),
            ]
        })
        .collect();
    match c.format {
        Format::Json => render::emit(&manifest.to_json()),
        Format::Csv => render::emit(&render::csv(&header, &table).map_err(|e| CliError::usage(e.to_string()))?),
        Format::Table => render::emit(&render::table(&header, &table)),
    }
    Ok(0)
}
