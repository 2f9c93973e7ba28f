//! Run configuration: TOML file, command-line flags and defaults, merged with
//! precedence flags > file > defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use superdark::spectrum::{
    DEFAULT_BRACKET_HALF_WIDTH, DEFAULT_GRID_POINTS, SCAN_TOL, TABLE1_KA2, TABLE1_N,
};
use superdark::{Error, Polarization, Result, Vec3};

const DEFAULT_QUADRATURE_NODES: usize = 64;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub table1: Table1Section,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub chain: Option<usize>,
    pub positions: Option<PathBuf>,
    pub polarization: Option<String>,
    pub ka: Option<f64>,
    pub ka2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub half_width: Option<f64>,
    pub grid: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub enabled: Option<bool>,
    pub n_theta: Option<usize>,
    pub n_phi: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Section {
    pub ka2: Option<Vec<f64>>,
    pub n: Option<Vec<usize>>,
    pub polarization: Option<String>,
    pub compare: Option<bool>,
    pub reference: Option<PathBuf>,
}

impl FileConfig {
    /// Reads a TOML file. Relative paths inside it are taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: FileConfig = toml::from_str(&text)
            .map_err(|e| Error::Usage(format!("bad config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.geometry.positions,
            &mut cfg.output.csv,
            &mut cfg.output.json,
            &mut cfg.output.dir,
            &mut cfg.table1.reference,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct GeometryArgs {
    /// Equally spaced chain of N atoms along z.
    #[arg(long, value_name = "N", conflicts_with = "positions")]
    pub chain: Option<usize>,
    /// Text file with one "x y z" line per atom, in units of 1/k.
    #[arg(long, value_name = "FILE")]
    pub positions: Option<PathBuf>,
    /// parallel | perpendicular | vector (short forms par, perp, vec).
    #[arg(long = "pol", value_name = "POL")]
    pub polarization: Option<Polarization>,
    /// Chain spacing k·a.
    #[arg(long, conflicts_with = "ka2")]
    pub ka: Option<f64>,
    /// Chain spacing as (k·a)².
    #[arg(long)]
    pub ka2: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScanArgs {
    /// Lower end of the Ω/U grid.
    #[arg(long, allow_hyphen_values = true)]
    pub omega_min: Option<f64>,
    /// Upper end of the Ω/U grid.
    #[arg(long, allow_hyphen_values = true)]
    pub omega_max: Option<f64>,
    /// Half-width of the default grid around the tuned prediction.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Golden-section tolerance in Ω/U.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct QuadratureArgs {
    /// Build W by angular quadrature instead of the closed forms.
    #[arg(long)]
    pub quadrature: bool,
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub n_phi: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeometrySource {
    Chain(usize),
    Positions(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSettings {
    pub omega_range: Option<(f64, f64)>,
    pub half_width: f64,
    pub grid: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub enabled: bool,
    pub n_theta: usize,
    pub n_phi: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geometry: GeometrySource,
    pub polarization: Polarization,
    /// Chain spacing; not used with explicit positions.
    pub ka: Option<f64>,
    pub scan: ScanSettings,
    pub output: OutputPaths,
    pub quadrature: QuadratureSettings,
}

fn parse_pol(s: &Option<String>) -> Result<Option<Polarization>> {
    s.as_deref().map(str::parse).transpose()
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Usage(format!("{name} must be positive, got {v}")))
    }
}

fn spacing(ka: Option<f64>, ka2: Option<f64>, origin: &str) -> Result<Option<f64>> {
    match (ka, ka2) {
        (Some(_), Some(_)) => Err(Error::Usage(format!("{origin} gives both ka and ka2"))),
        (Some(ka), None) => positive("ka", ka).map(Some),
        (None, Some(ka2)) => positive("ka2", ka2).map(|v| Some(v.sqrt())),
        (None, None) => Ok(None),
    }
}

impl RunConfig {
    pub fn resolve(
        geometry: &GeometryArgs,
        scan: &ScanArgs,
        output: OutputPaths,
        quadrature: &QuadratureArgs,
        file: &FileConfig,
    ) -> Result<Self> {
        let g = &file.geometry;
        let source = match (&geometry.chain, &geometry.positions) {
            (Some(n), _) => GeometrySource::Chain(*n),
            (None, Some(p)) => GeometrySource::Positions(p.clone()),
            (None, None) => match (g.chain, &g.positions) {
                (Some(_), Some(_)) => {
                    return Err(Error::Usage(
                        "config gives both geometry.chain and geometry.positions".into(),
                    ))
                }
                (Some(n), None) => GeometrySource::Chain(n),
                (None, Some(p)) => GeometrySource::Positions(p.clone()),
                (None, None) => {
                    return Err(Error::Usage(
                        "no geometry: pass --chain N or --positions FILE".into(),
                    ))
                }
            },
        };

        let polarization = match geometry.polarization {
            Some(p) => p,
            None => match parse_pol(&g.polarization)? {
                Some(p) => p,
                None => match source {
                    GeometrySource::Chain(_) => Polarization::Perpendicular,
                    GeometrySource::Positions(_) => Polarization::Vector3D,
                },
            },
        };

        let ka = match spacing(geometry.ka, geometry.ka2, "the command line")? {
            Some(ka) => Some(ka),
            None => spacing(g.ka, g.ka2, "the config file")?,
        };
        if matches!(source, GeometrySource::Chain(_)) && ka.is_none() {
            return Err(Error::Usage("a chain needs --ka or --ka2".into()));
        }

        let s = &file.scan;
        let omega_min = scan.omega_min.or(s.omega_min);
        let omega_max = scan.omega_max.or(s.omega_max);
        let omega_range = match (omega_min, omega_max) {
            (Some(lo), Some(hi)) => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Error::Usage(format!("bad Ω/U range [{lo}, {hi}]")));
                }
                Some((lo, hi))
            }
            (None, None) => None,
            _ => {
                return Err(Error::Usage(
                    "give both omega_min and omega_max, or neither".into(),
                ))
            }
        };
        let grid = scan.grid.or(s.grid).unwrap_or(DEFAULT_GRID_POINTS);
        if grid == 0 {
            return Err(Error::Usage("grid must have at least one point".into()));
        }
        if let Some((lo, hi)) = omega_range {
            if grid > 1 && lo == hi {
                return Err(Error::Usage(
                    "a multi-point grid needs omega_min < omega_max".into(),
                ));
            }
        }
        let half_width = positive(
            "half_width",
            scan.half_width
                .or(s.half_width)
                .unwrap_or(DEFAULT_BRACKET_HALF_WIDTH),
        )?;
        let tolerance = positive(
            "tolerance",
            scan.tolerance.or(s.tolerance).unwrap_or(SCAN_TOL),
        )?;

        let o = &file.output;
        let output = OutputPaths {
            csv: output.csv.or_else(|| o.csv.clone()),
            json: output.json.or_else(|| o.json.clone()),
            dir: output.dir.or_else(|| o.dir.clone()),
        };

        let q = &file.quadrature;
        let quadrature = QuadratureSettings {
            enabled: quadrature.quadrature || q.enabled.unwrap_or(false),
            n_theta: quadrature
                .n_theta
                .or(q.n_theta)
                .unwrap_or(DEFAULT_QUADRATURE_NODES),
            n_phi: quadrature
                .n_phi
                .or(q.n_phi)
                .unwrap_or(DEFAULT_QUADRATURE_NODES),
        };
        if quadrature.n_theta < 2 || quadrature.n_phi < 2 {
            return Err(Error::Usage(
                "quadrature needs at least 2 nodes per angle".into(),
            ));
        }

        Ok(Self {
            geometry: source,
            polarization,
            ka,
            scan: ScanSettings {
                omega_range,
                half_width,
                grid,
                tolerance,
            },
            output,
            quadrature,
        })
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Table1Args {
    /// (k·a)² values; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    pub ka2: Vec<f64>,
    /// Chain lengths; repeat or comma-separate.
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Restrict to one polarization.
    #[arg(long = "pol", value_name = "POL")]
    pub polarization: Option<Polarization>,
    /// Print relative deviations from reference values, read from FILE or
    /// the built-in published values.
    #[arg(long, value_name = "FILE", num_args = 0..=1)]
    pub compare: Option<Option<PathBuf>>,
    /// CSV output path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Config {
    pub ka2: Vec<f64>,
    pub n: Vec<usize>,
    pub polarizations: Vec<Polarization>,
    pub compare: bool,
    pub reference: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Table1Config {
    pub fn resolve(args: &Table1Args, file: &FileConfig) -> Result<Self> {
        let t = &file.table1;
        let ka2 = if !args.ka2.is_empty() {
            args.ka2.clone()
        } else {
            t.ka2.clone().unwrap_or_else(|| TABLE1_KA2.to_vec())
        };
        for &v in &ka2 {
            positive("ka2", v)?;
        }
        let n = if !args.n.is_empty() {
            args.n.clone()
        } else {
            t.n.clone().unwrap_or_else(|| TABLE1_N.to_vec())
        };
        if ka2.is_empty() || n.is_empty() {
            return Err(Error::Usage("empty table: no ka2 or n values".into()));
        }
        if let Some(&bad) = n.iter().find(|&&n| n < 3) {
            return Err(Error::Usage(format!("table rows need N >= 3, got {bad}")));
        }
        let polarizations = match args.polarization.or(parse_pol(&t.polarization)?) {
            Some(Polarization::Vector3D) => {
                return Err(Error::Usage(
                    "the table covers scalar polarizations only".into(),
                ))
            }
            Some(p) => vec![p],
            None => vec![Polarization::Parallel, Polarization::Perpendicular],
        };
        let (compare, reference) = match &args.compare {
            Some(path) => (true, path.clone().or_else(|| t.reference.clone())),
            None => (t.compare.unwrap_or(false), t.reference.clone()),
        };
        Ok(Self {
            ka2,
            n,
            polarizations,
            compare,
            reference,
            csv: args.out.clone().or_else(|| file.output.csv.clone()),
        })
    }
}

/// Parses a positions file: one atom per line, three numbers separated by
/// whitespace or commas; `#` starts a comment.
pub fn read_positions(path: &Path) -> Result<Vec<Vec3>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read positions {}: {e}", path.display())))?;
    parse_positions(&text).map_err(|e| match e {
        Error::Usage(msg) => Error::Usage(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_positions(text: &str) -> Result<Vec<Vec3>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 3 {
            return Err(Error::Usage(format!(
                "line {}: expected 3 coordinates, found {}",
                i + 1,
                fields.len()
            )));
        }
        let mut p = [0.0; 3];
        for (slot, f) in p.iter_mut().zip(&fields) {
            *slot = f
                .parse()
                .map_err(|_| Error::Usage(format!("line {}: bad number '{f}'", i + 1)))?;
        }
        out.push(p);
    }
    if out.is_empty() {
        return Err(Error::Usage("positions file lists no atoms".into()));
    }
    Ok(out)
}
