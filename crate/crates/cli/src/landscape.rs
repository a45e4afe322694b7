//! Energy over the `w3 = 0` slice of the axis-angle box `[-pi, pi]^2`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use grioli_core::linalg::{exp_so3, log_so3, AxisAngle, SquareMatrix};
use grioli_core::log_energy::{EnergyWeights, Objective};
use grioli_core::polar::polar_svd;
use serde_json::json;

use crate::commands::load_matrix;
use crate::config::{require, ObjectiveArg};
use crate::report::{num, nums, Report};
use crate::{CliError, Context, Finished};

const MIN_RESOLUTION: usize = 8;

pub struct LandscapeArgs {
    pub input: Option<PathBuf>,
    pub mu: Option<f64>,
    pub mu_c: Option<f64>,
    pub objective: Option<ObjectiveArg>,
    pub resolution: Option<usize>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

fn cell_center(i: usize, res: usize) -> f64 {
    -PI + (i as f64 + 0.5) * 2.0 * PI / res as f64
}

/// Row-major `res x res` grid, `grid[j * res + i]` at `(w1_i, w2_j)`.
pub fn sample(f: &SquareMatrix, w: &EnergyWeights, objective: Objective, res: usize, ctx: &Context) -> Vec<f64> {
    ctx.execution.map(res * res, |k| {
        let (i, j) = (k % res, k / res);
        let q = exp_so3(&AxisAngle::wrapped([cell_center(i, res), cell_center(j, res), 0.0]));
        objective.evaluate(f, &q, w)
    })
}

fn csv_text(grid: &[f64], res: usize) -> String {
    let mut s = String::from("w1,w2,energy\n");
    for (k, e) in grid.iter().enumerate() {
        let (i, j) = (k % res, k / res);
        let e = if e.is_finite() { format!("{e:.16e}") } else { "inf".into() };
        writeln!(s, "{:.16e},{:.16e},{e}", cell_center(i, res), cell_center(j, res)).unwrap();
    }
    s
}

/// Blue (low) to yellow (high), linear in the finite range.
fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(40.0, 250.0), lerp(30.0, 230.0), lerp(120.0, 60.0))
}

fn svg_text(grid: &[f64], res: usize, polar: [f64; 2], min_cell: (usize, usize)) -> String {
    const SIZE: f64 = 480.0;
    let cell = SIZE / res as f64;
    let (lo, hi) = grid
        .iter()
        .filter(|e| e.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let to_px = |w: f64| (w + PI) / (2.0 * PI) * SIZE;

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#)
        .unwrap();
    for (k, e) in grid.iter().enumerate() {
        let (i, j) = (k % res, k / res);
        let fill = if e.is_finite() { color((e - lo) / span) } else { "#808080".into() };
        // w2 grows upward
        let y = SIZE - (j + 1) as f64 * cell;
        writeln!(s, r#"<rect x="{:.3}" y="{y:.3}" width="{cell:.3}" height="{cell:.3}" fill="{fill}"/>"#, i as f64 * cell)
            .unwrap();
    }
    let (mi, mj) = min_cell;
    writeln!(
        s,
        r#"<rect x="{:.3}" y="{:.3}" width="{cell:.3}" height="{cell:.3}" fill="none" stroke="white" stroke-width="2"/>"#,
        mi as f64 * cell,
        SIZE - (mj + 1) as f64 * cell
    )
    .unwrap();
    writeln!(
        s,
        r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="red" stroke="black"/>"#,
        to_px(polar[0]),
        SIZE - to_px(polar[1]),
        (cell / 3.0).max(3.0)
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn run(ctx: &Context, args: LandscapeArgs) -> Result<Finished, CliError> {
    let cfg = &ctx.file;
    let input = require(args.input.or(cfg.input.clone()), "input")?;
    let weights = cfg.weights(args.mu, args.mu_c, 1.0)?;
    let objective_arg = args.objective.or(cfg.objective).unwrap_or(ObjectiveArg::Log);
    let res = args.resolution.or(cfg.resolution).unwrap_or(24);
    if res < MIN_RESOLUTION {
        return Err(CliError::Config(format!("resolution must be at least {MIN_RESOLUTION}, got {res}")));
    }
    let csv = args.csv.or(cfg.csv.clone());
    let svg = args.svg.or(cfg.svg.clone());
    let f = load_matrix(&input)?;
    let polar = polar_svd(&f)?;
    let r = polar.rotation().ok_or(grioli_core::Error::NonOrientation(f.det()))?;
    let w = log_so3(&r).vector();

    let grid = sample(&f, &weights, objective_arg.into(), res, ctx);
    let (k_min, e_min) = grid
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bk, be), (k, &e)| if e < be { (k, e) } else { (bk, be) });
    let min_cell = (k_min % res, k_min / res);
    let min_w = [cell_center(min_cell.0, res), cell_center(min_cell.1, res)];
    let cell = 2.0 * PI / res as f64;
    let distance_cells = ((min_w[0] - w[0]).powi(2) + (min_w[1] - w[1]).powi(2)).sqrt() / cell;

    let mut report = Report::new(
        "landscape",
        json!({
            "input": input.display().to_string(),
            "mu": num(weights.mu()),
            "mu_c": num(weights.mu_c()),
            "objective": objective_arg,
            "resolution": res,
            "csv": csv.as_ref().map(|p| p.display().to_string()),
            "svg": svg.as_ref().map(|p| p.display().to_string()),
        }),
    );
    report.set("cells", json!(res * res));
    report.set("min_cell", json!({ "w": nums(&min_w), "energy": num(e_min) }));
    report.set("polar_axis_angle", nums(&w));
    report.set("polar_energy", num(Objective::from(objective_arg).evaluate(&f, &r, &weights)));
    report.set("polar_to_min_cells", num(distance_cells));
    report.set("non_finite_cells", json!(grid.iter().filter(|e| !e.is_finite()).count()));

    if let Some(p) = &csv {
        write_file(p, &csv_text(&grid, res))?;
    }
    if let Some(p) = &svg {
        write_file(p, &svg_text(&grid, res, [w[0], w[1]], min_cell))?;
    }
    Ok(Finished::from_report(report))
}
