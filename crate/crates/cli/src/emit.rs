//! Artifacts: residual grids as CSV, log-residual heatmaps as SVG, the kink
//! density along the polar angle and the catalog listing.

use std::fmt::Write as _;
use std::path::Path;

use susyflow::reductions::lift;
use susyflow::solutions::{self, build, density_and_velocity, Built, CATALOG};

use crate::config::{Grid, RunConfig};
use crate::report::{Report, Status};
use crate::suites::lifted_residual;
use crate::{CliError, CliResult};

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| io(path, e))
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| io(path, e))
}

/// Residual magnitudes of a lifted catalog entry on a grid; `None` marks a
/// masked point.
pub struct ResidualGrid {
    pub id: String,
    pub grid: Grid,
    /// Row-major in `y`, then `x`.
    pub values: Vec<Option<f64>>,
}

impl ResidualGrid {
    pub fn compute(id: &str, cfg: &RunConfig) -> CliResult<Self> {
        let params = solutions::Params(cfg.set.clone());
        let inst = build(id, &params, &cfg.diff)?;
        let fields = match &inst.built {
            Built::Reduced { spec, rc, liftable: true, .. } => lift(spec, rc)?,
            _ => return Err(CliError::Config(format!("`{id}` has no lifted plane fields"))),
        };
        let (xs, ys) = (cfg.grid.x.points(), cfg.grid.y.points());
        let values = ys
            .iter()
            .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
            .map(|p| lifted_residual(&inst, &fields, p, cfg.margin, &cfg.diff))
            .collect();
        Ok(Self { id: id.to_string(), grid: cfg.grid, values })
    }

    pub fn write_csv(&self, path: &Path) -> CliResult<()> {
        let mut w = csv_writer(path)?;
        w.write_record(["x", "y", "residual", "masked"]).map_err(|e| io(path, e))?;
        let (xs, ys) = (self.grid.x.points(), self.grid.y.points());
        for (j, y) in ys.iter().enumerate() {
            for (i, x) in xs.iter().enumerate() {
                let v = self.values[j * xs.len() + i];
                let rec = [x.to_string(), y.to_string(), v.map_or(String::new(), |r| format!("{r:e}")), (v.is_none() as u8).to_string()];
                w.write_record(&rec).map_err(|e| io(path, e))?;
            }
        }
        w.flush().map_err(|e| io(path, e))
    }

    pub fn write_svg(&self, path: &Path) -> CliResult<()> {
        let (nx, ny) = (self.grid.x.n, self.grid.y.n);
        let cells: Vec<Cell> = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| Cell { col: i, row: ny - 1 - j, value: self.values[j * nx + i].map(log10_clamped), outline: false })
            .collect();
        let title = format!("log10 residual of {} on x {} by y {}", self.id, self.grid.x, self.grid.y);
        write_text(path, &heatmap_svg(&title, nx, ny, &cells))
    }
}

fn log10_clamped(r: f64) -> f64 {
    r.max(1e-17).log10().clamp(-17.0, 1.0)
}

struct Cell {
    col: usize,
    row: usize,
    /// `log10` of the value, `None` for masked cells.
    value: Option<f64>,
    outline: bool,
}

/// Piecewise-linear dark-blue to yellow ramp over `[−17, 1]`.
fn colour(v: f64) -> String {
    const STOPS: [(f64, [u8; 3]); 5] =
        [(-17.0, [13, 8, 135]), (-12.0, [84, 2, 163]), (-8.0, [185, 50, 137]), (-4.0, [240, 120, 50]), (1.0, [240, 249, 33])];
    let t = v.clamp(STOPS[0].0, STOPS[4].0);
    let k = STOPS.windows(2).position(|w| t <= w[1].0).unwrap_or(3);
    let ((a, ca), (b, cb)) = (STOPS[k], STOPS[k + 1]);
    let s = (t - a) / (b - a);
    let mix = |i: usize| (ca[i] as f64 + s * (cb[i] as f64 - ca[i] as f64)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
}

fn heatmap_svg(title: &str, nx: usize, ny: usize, cells: &[Cell]) -> String {
    const CELL: usize = 14;
    const TOP: usize = 28;
    let (w, h) = (nx * CELL + 20, ny * CELL + TOP + 40);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<text x="10" y="18" font-family="sans-serif" font-size="12">{}</text>"#, escape(title));
    for c in cells {
        let (x, y) = (10 + c.col * CELL, TOP + c.row * CELL);
        let fill = c.value.map_or("#d0d0d0".to_string(), colour);
        let stroke = if c.outline { r##" stroke="#ff0000" stroke-width="2""## } else { "" };
        let _ = writeln!(s, r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}"{stroke}/>"#);
    }
    let ly = TOP + ny * CELL + 10;
    for (k, v) in [-16.0, -12.0, -8.0, -4.0, 0.0].into_iter().enumerate() {
        let x = 10 + k * 60;
        let _ = writeln!(s, r#"<rect x="{x}" y="{ly}" width="14" height="14" fill="{}"/>"#, colour(v));
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">1e{v}</text>"#, x + 18, ly + 11);
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One row per suite, one cell per check, coloured by `log10` of the largest
/// residual; failing checks are outlined.
pub fn report_svg(report: &Report, path: &Path) -> CliResult<()> {
    let nx = report.suites.iter().map(|s| s.checks.len()).max().unwrap_or(1).max(1);
    let cells: Vec<Cell> = report
        .suites
        .iter()
        .enumerate()
        .flat_map(|(row, s)| {
            s.checks.iter().enumerate().map(move |(col, c)| Cell {
                col,
                row,
                value: (!c.max_residual.is_nan()).then(|| log10_clamped(c.max_residual)),
                outline: !matches!(c.status, Status::Pass | Status::XfailConfirmed),
            })
        })
        .collect();
    let names: Vec<&str> = report.suites.iter().map(|s| s.suite.name()).collect();
    let title = format!("log10 max residual per check; rows: {}", names.join(", "));
    write_text(path, &heatmap_svg(&title, nx, report.suites.len().max(1), &cells))
}

/// Kink density on the unit circle against the polar angle, with the two
/// limits along the x-axis as constant columns.
pub fn density_csv(cfg: &RunConfig, samples: usize, path: &Path) -> CliResult<()> {
    let c1 = cfg.set.get("C1").copied().unwrap_or(0.0);
    let rep = solutions::kink_asymptotics_check(c1, &cfg.diff)?;
    let inst = build("density-kink", &solutions::Params::default().with("C1", c1), &cfg.diff)?;
    let Built::Density { phi, .. } = &inst.built else { unreachable!("the density entry builds a density") };
    let mut w = csv_writer(path)?;
    w.write_record(["angle", "density", "limit_positive_x", "limit_negative_x"]).map_err(|e| io(path, e))?;
    let delta = 1e-9;
    for th in solutions::linspace(delta, std::f64::consts::PI - delta, samples.max(2)) {
        let (rho, _, _) = density_and_velocity(phi, (th.cos(), th.sin()), &cfg.diff)?;
        let rec = [th.to_string(), format!("{rho:e}"), format!("{:e}", rep.limit_positive_x), format!("{:e}", rep.limit_negative_x)];
        w.write_record(&rec).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

/// Catalog listing as CSV.
pub fn catalog_csv(path: &Path) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["id", "row", "classification", "params", "domain", "anchor"]).map_err(|e| io(path, e))?;
    for e in CATALOG {
        let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let class = serde_json::to_value(e.classification).expect("serializes");
        let rec = [e.id, e.row.unwrap_or(""), class.as_str().unwrap_or(""), &params.join(" "), e.domain, e.anchor];
        w.write_record(rec).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

/// Catalog listing as aligned text.
pub fn catalog_text() -> String {
    let mut s = String::new();
    for e in CATALOG {
        let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let class = serde_json::to_value(e.classification).expect("serializes");
        let _ = writeln!(
            s,
            "{:<26} {:<20} {:<17} {}\n    {}\n    domain: {}",
            e.id,
            e.row.unwrap_or("-"),
            class.as_str().unwrap_or(""),
            params.join(" "),
            e.anchor,
            e.domain
        );
    }
    s
}
