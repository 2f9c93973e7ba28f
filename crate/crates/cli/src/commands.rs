use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use superdark::darkstate::{
    asymptotic_rate, binomial_dark_state, darkest_eigenvector, moment_dark_state,
};
use superdark::decay::{decay_matrix_chain, decay_matrix_for, decay_matrix_quadrature, decay_rate};
use superdark::geometry::{make_array, make_chain, AtomArray, ChainSpec, Polarization};
use superdark::interactions::{coupling_chain, coupling_for, nearest_neighbor_coupling};
use superdark::numerics::{sphere_quadrature, SymMatrix};
use superdark::spectrum::{
    find_minimum_with, scan_multi_in, table1_for, uniform_grid, ChainScan, Table1Reference,
    Table1Row, TABLE1_REFERENCE,
};
use superdark::tuning::{build_hamiltonian, tune_frequencies, verify_eigenstate};
use superdark::Error;

use crate::config::{read_positions, GeometrySource, RunConfig, Table1Config};
use crate::format::{full, short, short_list};

pub const SCAN_HEADER: [&str; 3] = ["omega_over_u", "gamma_tilde_over_gamma", "eigenenergy"];
pub const TABLE1_HEADER: [&str; 5] = ["n", "polarization", "ka2", "gamma_min", "gamma_noshift"];

fn build_array(cfg: &RunConfig) -> superdark::Result<AtomArray> {
    match &cfg.geometry {
        GeometrySource::Chain(n) => {
            let ka = cfg.ka.expect("chain spacing is validated with the config");
            make_chain(ChainSpec::new(*n, ka)?, cfg.polarization)
        }
        GeometrySource::Positions(path) => {
            let pos = read_positions(path)?;
            match cfg.polarization {
                Polarization::Vector3D => make_array(pos),
                pol => AtomArray::with_polarization(pos, pol),
            }
        }
    }
}

fn describe(array: &AtomArray) -> String {
    match array.uniform_spacing() {
        Some(ka) => format!(
            "N = {}, {}, equally spaced, ka = {}",
            array.n_atoms(),
            array.polarization(),
            short(ka)
        ),
        None => format!("N = {}, {}", array.n_atoms(), array.polarization()),
    }
}

/// Human-readable text goes to stdout unless stdout carries data.
fn console(data_on_stdout: bool) -> Box<dyn Write> {
    if data_on_stdout {
        Box::new(io::stderr())
    } else {
        Box::new(io::stdout())
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    serde_json::to_writer_pretty(f, value)?;
    Ok(())
}

fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match path {
        Some(p) => {
            Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)
        }
        None => Box::new(io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

#[derive(Serialize)]
struct Variant {
    name: &'static str,
    coefficients: Vec<f64>,
    rate: f64,
}

#[derive(Serialize)]
struct DarkstateReport {
    n_atoms: usize,
    polarization: Polarization,
    ka: Option<f64>,
    variants: Vec<Variant>,
    asymptotic_rate: Option<f64>,
}

pub fn darkstate(cfg: &RunConfig, json: Option<&Path>) -> Result<()> {
    let array = build_array(cfg)?;
    let w = decay_matrix_for(&array)?;
    let pol = array.polarization();
    let spacing = array.uniform_spacing();
    let mut variants = Vec::new();

    if pol.is_scalar() && array.n_atoms() >= 2 {
        if spacing.is_some() {
            let b = binomial_dark_state(array.n_atoms(), pol)?;
            variants.push(Variant {
                name: "binomial",
                rate: decay_rate(&w, &b)?,
                coefficients: b.coefficients().to_vec(),
            });
        }
        let m = moment_dark_state(&array)?;
        variants.push(Variant {
            name: "moment",
            rate: decay_rate(&w, &m)?,
            coefficients: m.coefficients().to_vec(),
        });
    }
    let (v, rate) = darkest_eigenvector(&w)?;
    variants.push(Variant {
        name: "W eigenvector",
        rate,
        coefficients: v.coefficients().to_vec(),
    });
    let asymptote = match (pol.is_scalar(), spacing) {
        (true, Some(ka)) if array.n_atoms() >= 2 => {
            Some(asymptotic_rate(array.n_atoms(), ka, pol)?)
        }
        _ => None,
    };

    let mut out = io::stdout().lock();
    writeln!(out, "{}", describe(&array))?;
    for v in &variants {
        writeln!(out, "{:<14} C = {}", v.name, short_list(&v.coefficients))?;
        writeln!(out, "{:<14} Γ/Γ0 = {}", "", short(v.rate))?;
    }
    if let Some(a) = asymptote {
        writeln!(out, "{:<14} Γ/Γ0 = {}", "asymptote", short(a))?;
    }

    if let Some(path) = json {
        write_json(
            path,
            &DarkstateReport {
                n_atoms: array.n_atoms(),
                polarization: pol,
                ka: spacing,
                variants,
                asymptotic_rate: asymptote,
            },
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TuneReport {
    target: &'static str,
    coefficients: Vec<f64>,
    shifts_zero_sum: Vec<f64>,
    shifts_edge_referenced: Vec<f64>,
    eigenenergy_zero_sum: f64,
    eigenenergy_edge_referenced: f64,
    omega_over_u: Option<f64>,
    residual: f64,
}

pub fn tune(cfg: &RunConfig, json: Option<&Path>) -> Result<()> {
    let array = build_array(cfg)?;
    let pol = array.polarization();
    if !pol.is_scalar() {
        return Err(Error::Usage("tune needs a parallel or perpendicular chain".into()).into());
    }
    let spacing = array.uniform_spacing();
    let (target, c) = match spacing {
        Some(_) => ("binomial", binomial_dark_state(array.n_atoms(), pol)?),
        None => ("moment", moment_dark_state(&array)?),
    };
    let u = coupling_chain(&array)?;
    let t = tune_frequencies(&u, &c)?;
    let h = build_hamiltonian(&u, &t.shifts)?;
    let residual = verify_eigenstate(&h, &c)?;
    let omega_over_u = match spacing {
        Some(ka) => Some(t.omega() / nearest_neighbor_coupling(pol, ka)?),
        None => None,
    };
    let report = TuneReport {
        target,
        coefficients: c.coefficients().to_vec(),
        shifts_edge_referenced: t.edge_referenced(),
        eigenenergy_edge_referenced: t.edge_referenced_energy(),
        shifts_zero_sum: t.shifts,
        eigenenergy_zero_sum: t.eigenenergy,
        omega_over_u,
        residual,
    };

    let mut out = io::stdout().lock();
    writeln!(out, "{}", describe(&array))?;
    writeln!(
        out,
        "target ({target}): C = {}",
        short_list(&report.coefficients)
    )?;
    writeln!(
        out,
        "shifts, zero-sum (d²k³):        {}",
        short_list(&report.shifts_zero_sum)
    )?;
    writeln!(
        out,
        "shifts, edge-referenced (d²k³): {}",
        short_list(&report.shifts_edge_referenced)
    )?;
    writeln!(
        out,
        "E, zero-sum = {}   E, edge-referenced = {}",
        short(report.eigenenergy_zero_sum),
        short(report.eigenenergy_edge_referenced)
    )?;
    if let Some(r) = omega_over_u {
        writeln!(out, "Ω/U = {}", short(r))?;
    }
    writeln!(out, "eigen-residual = {}", short(residual))?;

    if let Some(path) = json {
        write_json(path, &report)?;
    }
    Ok(())
}

pub fn scan(cfg: &RunConfig, csv_path: Option<&Path>, summary: Option<&Path>) -> Result<()> {
    let array = build_array(cfg)?;
    let w = decay_matrix_chain(&array)?;
    let scan = ChainScan::new(&array, &w)?;
    let seed = scan.tuned_seed()?;

    match scan.n_parameters() {
        0 => Err(Error::Usage("a two-atom chain has no detuning parameter to scan".into()).into()),
        1 => {
            let s = &cfg.scan;
            let (lo, hi) = s
                .omega_range
                .unwrap_or((seed[0] - s.half_width, seed[0] + s.half_width));
            let grid = uniform_grid(lo, hi, s.grid);
            let points = superdark::scan_omega(&array, &grid, &w)?;

            let mut writer = csv_writer(csv_path)?;
            writer.write_record(SCAN_HEADER)?;
            for p in &points {
                writer.write_record([
                    full(p.omega_over_u[0]),
                    full(p.gamma_tilde_over_gamma),
                    full(p.eigenenergy),
                ])?;
            }
            writer.flush()?;

            let mut con = console(csv_path.is_none());
            writeln!(con, "{}", describe(&array))?;
            writeln!(
                con,
                "{} grid points on Ω/U ∈ [{}, {}]",
                grid.len(),
                short(lo),
                short(hi)
            )?;
            if grid.len() < 2 {
                writeln!(con, "single grid point, no minimization")?;
                if let Some(path) = summary {
                    write_json(path, &points[0])?;
                }
                return Ok(());
            }
            let report = find_minimum_with(&scan, (lo, hi), s.tolerance)?;
            writeln!(
                con,
                "minimum: Ω/U = {}   Γ̃/Γ = {}",
                short(report.omega_min_over_u[0]),
                short(report.gamma_min_over_gamma)
            )?;
            writeln!(
                con,
                "tuned prediction: Ω/U = {}   mismatch = {}",
                short(report.asymptotic_prediction[0]),
                short(report.mismatch[0])
            )?;
            writeln!(
                con,
                "asymptotic rate = {}   fall factor = {}",
                short(report.asymptotic_rate),
                short(report.fall_factor)
            )?;
            if let Some(path) = summary {
                write_json(path, &report)?;
            }
            Ok(())
        }
        _ => {
            let report = scan_multi_in(&scan, &seed)?;
            let mut out = io::stdout().lock();
            writeln!(out, "{}", describe(&array))?;
            writeln!(
                out,
                "seed Ω/U = {}   Γ̃/Γ = {}",
                short_list(&seed),
                short(report.gamma_at_prediction)
            )?;
            writeln!(
                out,
                "minimum Ω/U = {}   Γ̃/Γ = {}",
                short_list(&report.omega_min_over_u),
                short(report.gamma_min_over_gamma)
            )?;
            writeln!(
                out,
                "asymptotic rate = {}   fall factor = {}",
                short(report.asymptotic_rate),
                short(report.fall_factor)
            )?;
            if csv_path.is_some() {
                eprintln!("note: no grid CSV for N >= 5; the minimum is in the summary JSON");
            }
            if let Some(path) = summary {
                write_json(path, &report)?;
            }
            Ok(())
        }
    }
}

#[derive(Deserialize)]
struct ReferenceRecord {
    n: usize,
    polarization: String,
    ka2: f64,
    gamma_min: f64,
    gamma_noshift: f64,
}

pub fn read_reference(path: &Path) -> superdark::Result<Vec<Table1Reference>> {
    let bad =
        |e: &dyn std::fmt::Display| Error::Usage(format!("reference {}: {e}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(&e))?;
    let mut out = Vec::new();
    for rec in reader.deserialize::<ReferenceRecord>() {
        let r = rec.map_err(|e| bad(&e))?;
        out.push(Table1Reference {
            n: r.n,
            polarization: r.polarization.parse()?,
            ka2: r.ka2,
            gamma_min: r.gamma_min,
            gamma_noshift: r.gamma_noshift,
        });
    }
    Ok(out)
}

fn lookup<'a>(refs: &'a [Table1Reference], row: &Table1Row) -> Option<&'a Table1Reference> {
    refs.iter().find(|r| {
        r.n == row.n
            && r.polarization == row.polarization
            && (r.ka2 - row.ka2).abs() <= 1e-12 * row.ka2
    })
}

pub fn table1(cfg: &Table1Config) -> Result<()> {
    let refs: Option<Vec<Table1Reference>> = match (cfg.compare, &cfg.reference) {
        (false, _) => None,
        (true, Some(path)) => Some(read_reference(path)?),
        (true, None) => Some(TABLE1_REFERENCE.to_vec()),
    };
    let rows = table1_for(&cfg.ka2, &cfg.n, &cfg.polarizations)?;

    let mut writer = csv_writer(cfg.csv.as_deref())?;
    writer.write_record(TABLE1_HEADER)?;
    for r in &rows {
        writer.write_record([
            r.n.to_string(),
            r.polarization.to_string(),
            full(r.ka2),
            full(r.gamma_min),
            full(r.gamma_noshift),
        ])?;
    }
    writer.flush()?;

    let mut con = console(cfg.csv.is_none());
    write!(
        con,
        "{:>2}  {:<13}  {:>9}  {:>12}  {:>12}  {:>12}",
        "N", "polarization", "ka2", "gamma_min", "gamma_noshift", "omega_min/U"
    )?;
    if refs.is_some() {
        write!(con, "  {:>12}  {:>12}", "dev_min", "dev_noshift")?;
    }
    writeln!(con)?;
    let mut worst: f64 = 0.0;
    for r in &rows {
        write!(
            con,
            "{:>2}  {:<13}  {:>9}  {:>12}  {:>12}  {:>12}",
            r.n,
            r.polarization.as_str(),
            short(r.ka2),
            short(r.gamma_min),
            short(r.gamma_noshift),
            r.omega_min_over_u
                .iter()
                .map(|x| short(*x))
                .collect::<Vec<_>>()
                .join(" ")
        )?;
        if let Some(refs) = &refs {
            match lookup(refs, r) {
                Some(reference) => {
                    let dm = r.gamma_min / reference.gamma_min - 1.0;
                    let dn = r.gamma_noshift / reference.gamma_noshift - 1.0;
                    worst = worst.max(dm.abs()).max(dn.abs());
                    write!(
                        con,
                        "  {:>12}  {:>12}",
                        format!("{:+.3}%", 100.0 * dm),
                        format!("{:+.3}%", 100.0 * dn)
                    )?;
                }
                None => write!(con, "  {:>12}  {:>12}", "-", "-")?,
            }
        }
        writeln!(con)?;
    }
    if refs.is_some() {
        writeln!(con, "largest relative deviation: {}%", short(100.0 * worst))?;
    }
    Ok(())
}

fn write_matrix(w: &mut csv::Writer<Box<dyn Write>>, m: &SymMatrix) -> Result<()> {
    for row in m.rows() {
        w.write_record(row.iter().map(|x| full(*x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn wmatrix(cfg: &RunConfig, out_dir: Option<&Path>) -> Result<()> {
    let array = build_array(cfg)?;
    let u = coupling_for(&array)?;
    let w = if cfg.quadrature.enabled {
        let q = sphere_quadrature(cfg.quadrature.n_theta, cfg.quadrature.n_phi)?;
        decay_matrix_quadrature(&array, &q)?
    } else {
        decay_matrix_for(&array)?
    };
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let (pu, pw): (PathBuf, PathBuf) = (dir.join("u.csv"), dir.join("w.csv"));
            write_matrix(&mut csv_writer(Some(&pu))?, &u.matrix)?;
            write_matrix(&mut csv_writer(Some(&pw))?, &w.matrix)?;
            println!("{}", describe(&array));
            println!("wrote {} and {}", pu.display(), pw.display());
        }
        None => {
            println!("# U (d²k³)");
            write_matrix(&mut csv_writer(None)?, &u.matrix)?;
            println!("# W (Γ)");
            write_matrix(&mut csv_writer(None)?, &w.matrix)?;
        }
    }
    Ok(())
}
