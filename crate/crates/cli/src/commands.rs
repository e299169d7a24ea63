use rayon::prelude::*;
use serde::Serialize;

use wincuckoo::lsa::{bench_fill, FillPoint};
use wincuckoo::models::Scheme;
use wincuckoo::orient::{failure_curve, BreakdownRecord, FailureCurve};
use wincuckoo::report::fmt12;
use wincuckoo::{compute_threshold, ModelParams, ThresholdResult};

use crate::output::{to_json, Format, OutputArgs};
use crate::svg::{LinePlot, Series};
use crate::Failure;

/// Thresholds this close to 1 print as 1 at ten decimals and are flagged.
const NEAR_ONE: f64 = 5e-11;

#[derive(Debug, Serialize)]
struct TableRow {
    k: u32,
    ell: u32,
    gamma: f64,
    lambda_star: f64,
    residual_g: f64,
    near_one: bool,
}

impl TableRow {
    const CSV_HEADER: &'static str = "k,ell,gamma,lambda_star,residual_g,near_one";

    fn from_result(r: &ThresholdResult) -> Self {
        TableRow {
            k: r.params.k(),
            ell: r.params.ell(),
            gamma: r.gamma,
            lambda_star: r.lambda_star,
            residual_g: r.residual_g,
            near_one: 1.0 - r.gamma < NEAR_ONE,
        }
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.k,
            self.ell,
            fmt12(self.gamma),
            fmt12(self.lambda_star),
            fmt12(self.residual_g),
            self.near_one
        )
    }
}

fn rows_csv(rows: &[TableRow]) -> String {
    let mut out = format!("{}\n", TableRow::CSV_HEADER);
    for row in rows {
        out.push_str(&row.csv_row());
        out.push('\n');
    }
    out
}

pub fn threshold(k: u32, ell: u32, tol: f64, output: &OutputArgs) -> Result<(), Failure> {
    output.reject_svg("threshold")?;
    let params = ModelParams::new(k, ell)?;
    let result = compute_threshold(params, tol)?;
    eprintln!("{}: γ = {:.12}, λ* = {:.9}; {}", params, result.gamma, result.lambda_star, result.diagnostics);
    let body = match output.format {
        Format::Json => to_json(&result)?,
        _ => rows_csv(&[TableRow::from_result(&result)]),
    };
    output.emit("threshold", &body)
}

pub fn table(k_max: u32, ell_max: u32, tol: f64, output: &OutputArgs) -> Result<(), Failure> {
    output.reject_svg("table")?;
    if k_max < 2 || ell_max < 2 {
        return Err(Failure::usage("--k-max and --ell-max must be at least 2"));
    }
    let cells: Vec<ModelParams> = (2..=ell_max)
        .flat_map(|ell| (2..=k_max).map(move |k| (k, ell)))
        .map(|(k, ell)| ModelParams::new(k, ell))
        .collect::<Result<_, _>>()?;
    let results = cells
        .par_iter()
        .map(|&p| compute_threshold(p, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<TableRow> = results.iter().map(TableRow::from_result).collect();
    let body = match output.format {
        Format::Json => to_json(&rows)?,
        _ => rows_csv(&rows),
    };
    output.emit("table", &body)
}

#[derive(Debug, Serialize)]
struct SimulationReport<'a> {
    scheme: Scheme,
    n: usize,
    k: u32,
    ell: u32,
    trials: usize,
    seed: u64,
    mean_load: f64,
    records: &'a [BreakdownRecord],
    curve: &'a [(f64, f64)],
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    scheme: &str,
    n: usize,
    k: u32,
    ell: u32,
    trials: usize,
    seed: u64,
    output: &OutputArgs,
) -> Result<(), Failure> {
    if trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let scheme: Scheme = scheme.parse()?;
    let curve: FailureCurve = failure_curve(scheme, n, k, ell, trials, seed)?;
    let body = match output.format {
        Format::Csv => curve.to_csv(),
        Format::Json => to_json(&SimulationReport {
            scheme,
            n,
            k,
            ell,
            trials,
            seed,
            mean_load: curve.mean_load(),
            records: &curve.records,
            curve: &curve.points,
        })?,
        Format::Svg => {
            let mut plot = LinePlot::new(
                format!("{scheme} k={k} ell={ell} n={n}, {trials} trials"),
                "load c",
                "fraction not orientable",
            );
            plot.series.push(Series { name: format!("n={n}"), points: curve.points.clone() });
            if let Some(gamma) = windows_threshold(scheme, k, ell) {
                plot.marker = Some((gamma, format!("γ = {gamma:.6}")));
            }
            plot.render()
        }
    };
    output.emit("simulate", &body)
}

fn windows_threshold(scheme: Scheme, k: u32, ell: u32) -> Option<f64> {
    if scheme != Scheme::Windows {
        return None;
    }
    let params = ModelParams::new(k, ell).ok()?;
    compute_threshold(params, 1e-9).ok().map(|r| r.gamma)
}

fn fill_csv(points: &[FillPoint]) -> String {
    let mut out = format!("{}\n", FillPoint::CSV_HEADER);
    for p in points {
        out.push_str(&p.csv_row());
        out.push('\n');
    }
    out
}

#[allow(clippy::too_many_arguments)]
pub fn lsa_bench(
    n: usize,
    k: u32,
    ell: u32,
    load: f64,
    batch: usize,
    seed: u64,
    output: &OutputArgs,
) -> Result<(), Failure> {
    let params = ModelParams::new(k, ell)?;
    let points = bench_fill(n, params, load, batch, seed)?;
    let body = match output.format {
        Format::Csv => fill_csv(&points),
        Format::Json => to_json(&points)?,
        Format::Svg => {
            let mut plot = LinePlot::new(format!("LSA {params} n={n}"), "load", "mean touches per insertion");
            plot.series.push(Series {
                name: format!("n={n}"),
                points: points.iter().map(|p| (p.load, p.avg_touches)).collect(),
            });
            if let Some(gamma) = windows_threshold(Scheme::Windows, k, ell) {
                plot.marker = Some((gamma, format!("γ = {gamma:.6}")));
            }
            plot.render()
        }
    };
    output.emit("lsa-bench", &body)
}
