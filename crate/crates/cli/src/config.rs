//! Run configuration: a sectioned TOML file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use susyflow::calculus::DiffConfig;
use susyflow::reductions::SubalgebraId;
use susyflow::superfield::Epsilon;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Classical,
    Susy,
    Superfield,
    Tables,
    Reductions,
    Solutions,
    Correspondences,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Tables,
        Suite::Superfield,
        Suite::Susy,
        Suite::Classical,
        Suite::Reductions,
        Suite::Solutions,
        Suite::Correspondences,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Classical => "classical",
            Suite::Susy => "susy",
            Suite::Superfield => "superfield",
            Suite::Tables => "tables",
            Suite::Reductions => "reductions",
            Suite::Solutions => "solutions",
            Suite::Correspondences => "correspondences",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::EACH.to_vec(),
            s => vec![s],
        }
    }
}

/// One axis of a sampling grid, `lo:hi:n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64).collect()
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let bad = || CliError::Config(format!("grid axis `{s}` is not lo:hi:n"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [lo, hi, n] = parts.as_slice() else { return Err(bad()) };
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CliError::Config(format!("grid axis `{s}` needs finite lo < hi")));
        }
        if n < 4 {
            return Err(CliError::Config(format!("grid axis `{s}` needs at least 4 points")));
        }
        Ok(Axis { lo, hi, n })
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}

/// `x × y` grid. A single axis spec is used for both directions; two specs
/// are separated by a comma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub x: Axis,
    pub y: Axis,
}

impl Grid {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let ys = self.y.points();
        self.x.points().into_iter().flat_map(|x| ys.iter().map(move |&y| (x, y))).collect()
    }
}

impl Default for Grid {
    fn default() -> Self {
        let a = Axis { lo: -1.0, hi: 1.0, n: 20 };
        Grid { x: a, y: a }
    }
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.split_once(',') {
            Some((x, y)) => Ok(Grid { x: x.parse()?, y: y.parse()? }),
            None => {
                let a: Axis = s.parse()?;
                Ok(Grid { x: a, y: a })
            }
        }
    }
}

/// Splits a comma-separated id list, keeping parameter suffixes such as the
/// `m` of `L4,m` attached to their row.
pub fn split_ids(s: &str) -> Vec<String> {
    const SUFFIXES: [&str; 5] = ["m", "n", "a", "mu", "k"];
    let mut out: Vec<String> = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match out.last_mut() {
            Some(last) if SUFFIXES.contains(&tok) && SubalgebraId::from_str(last).is_ok() => {
                last.push(',');
                last.push_str(tok);
            }
            _ => out.push(tok.to_string()),
        }
    }
    out
}

/// Contents of a configuration file. Every key is optional; flags override.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub diff: DiffSection,
    #[serde(default)]
    pub output: OutputSection,
    /// Catalog parameter overrides.
    #[serde(default)]
    pub set: BTreeMap<String, f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub suite: Option<Suite>,
    pub epsilon: Option<f64>,
    pub params: Option<[f64; 4]>,
    pub ids: Option<Vec<String>>,
    pub m: Option<f64>,
    pub n: Option<f64>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub margin: Option<f64>,
    pub samples: Option<usize>,
    pub symmetry_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x: Option<String>,
    pub y: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffSection {
    pub h: Option<f64>,
    pub levels: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub report: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub fixed_clock: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Flag values; `None` leaves the file value (or the default) in place.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub suite: Option<Suite>,
    pub epsilon: Option<f64>,
    pub params: Option<String>,
    pub ids: Vec<String>,
    pub m: Option<f64>,
    pub n: Option<f64>,
    pub set: Option<String>,
    pub grid: Option<String>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub margin: Option<f64>,
    pub samples: Option<usize>,
    pub h: Option<f64>,
    pub levels: Option<usize>,
    pub report: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub fixed_clock: bool,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    /// Signs to run; both when none was selected.
    pub epsilon: Vec<f64>,
    /// `(a, b, c, d)` of the general supersymmetric system, when fixed.
    pub params: Option<[f64; 4]>,
    pub ids: Vec<String>,
    pub m: Option<f64>,
    pub n: Option<f64>,
    pub set: BTreeMap<String, f64>,
    pub grid: Grid,
    pub margin: f64,
    pub diff: DiffConfig,
    pub tol: f64,
    pub seed: u64,
    /// Random fields per property check.
    pub samples: usize,
    /// Grid size of symmetry sweeps.
    pub symmetry_points: usize,
    #[serde(skip)]
    pub report: Option<PathBuf>,
    #[serde(skip)]
    pub svg: Option<PathBuf>,
    #[serde(skip)]
    pub fixed_clock: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suites: Suite::EACH.to_vec(),
            epsilon: vec![1.0, -1.0],
            params: None,
            ids: Vec::new(),
            m: None,
            n: None,
            set: BTreeMap::new(),
            grid: Grid::default(),
            margin: 0.05,
            diff: DiffConfig::default(),
            tol: 1e-6,
            seed: 20,
            samples: 100,
            symmetry_points: 6,
            report: None,
            svg: None,
            fixed_clock: false,
        }
    }
}

fn parse_params(s: &str) -> CliResult<[f64; 4]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("params `{s}` is not a,b,c,d")))?;
    v.try_into().map_err(|_| CliError::Config(format!("params `{s}` needs exactly four numbers")))
}

fn parse_set(s: &str) -> CliResult<BTreeMap<String, f64>> {
    Ok(susyflow::solutions::Params::parse(s)?.0)
}

impl RunConfig {
    /// Resolves file values and flags, flags winning, and validates.
    pub fn resolve(file: Option<FileConfig>, o: Overrides) -> CliResult<Self> {
        let f = file.unwrap_or_default();
        let mut c = RunConfig::default();
        let suite = o.suite.or(f.run.suite).unwrap_or(Suite::All);
        c.suites = suite.expand();
        if let Some(e) = o.epsilon.or(f.run.epsilon) {
            Epsilon::from_value(e)?;
            c.epsilon = vec![e];
        }
        c.params = match o.params {
            Some(s) => Some(parse_params(&s)?),
            None => f.run.params,
        };
        c.ids = if o.ids.is_empty() { f.run.ids.unwrap_or_default() } else { o.ids };
        c.ids = c.ids.iter().flat_map(|s| split_ids(s)).collect();
        c.m = o.m.or(f.run.m);
        c.n = o.n.or(f.run.n);
        c.set = f.set;
        if let Some(s) = o.set {
            c.set.extend(parse_set(&s)?);
        }
        if let Some(g) = o.grid {
            c.grid = g.parse()?;
        } else {
            if let Some(x) = f.grid.x {
                c.grid.x = x.parse()?;
            }
            if let Some(y) = f.grid.y {
                c.grid.y = y.parse()?;
            }
        }
        c.tol = o.tol.or(f.run.tol).unwrap_or(c.tol);
        c.seed = o.seed.or(f.run.seed).unwrap_or(c.seed);
        c.margin = o.margin.or(f.run.margin).unwrap_or(c.margin);
        c.samples = o.samples.or(f.run.samples).unwrap_or(c.samples);
        c.symmetry_points = f.run.symmetry_points.unwrap_or(c.symmetry_points);
        let d = DiffConfig::default();
        c.diff = DiffConfig::new(
            o.h.or(f.diff.h).unwrap_or(d.h),
            o.levels.or(f.diff.levels).unwrap_or(d.levels),
            f.diff.tol.unwrap_or(d.tol),
        )?;
        c.report = o.report.or(f.output.report);
        c.svg = o.svg.or(f.output.svg);
        c.fixed_clock = o.fixed_clock || f.output.fixed_clock.unwrap_or(false);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(CliError::Config(format!("margin must be non-negative, got {}", self.margin)));
        }
        if self.samples == 0 {
            return Err(CliError::Config("samples must be positive".into()));
        }
        if self.symmetry_points < 4 {
            return Err(CliError::Config("symmetry_points must be at least 4".into()));
        }
        for g in [self.grid.x, self.grid.y] {
            if g.n < 4 {
                return Err(CliError::Config(format!("grid axis {g} needs at least 4 points")));
            }
        }
        Ok(())
    }

    pub fn signs(&self) -> Vec<Epsilon> {
        self.epsilon.iter().map(|&e| Epsilon::from_value(e).expect("validated")).collect()
    }

    pub fn wants_sign(&self, e: Epsilon) -> bool {
        self.epsilon.contains(&e.value())
    }
}
