use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};
use num_complex::Complex64;
use qgspec::asymptotics::{asymptotics_csv, asymptotics_report};
use qgspec::band_engine::format_g;
use qgspec::secular_oracle::SecularAssembler;
use qgspec::spectral_probability::{
    closed_form_probability, finite_scan_probability, probability_csv, probability_sweep, torus_probability,
};
use qgspec::{
    bands_csv, flat_bands, negative_flat_bands, scan_bands, scan_negative_bands, scattering_matrix, Error,
    LatticeKind, Quasimomentum, Side, Spec,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qgspec", version, about = "Spectra of kagome and triangular quantum-graph lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Positive-energy band structure up to k_max.
    Bands {
        #[command(flatten)]
        geom: Geometry,
        #[arg(long)]
        k_max: f64,
        #[arg(long)]
        resolution: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Negative-energy bands.
    Negative {
        #[command(flatten)]
        geom: Geometry,
        #[arg(long)]
        kappa_max: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Flat bands on both sides of the spectrum.
    Flatbands {
        #[command(flatten)]
        geom: Geometry,
        #[arg(long)]
        k_max: f64,
        #[arg(long)]
        kappa_max: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Band measure of one lattice.
    Probability {
        #[command(flatten)]
        geom: Geometry,
        #[arg(long = "K", default_value_t = 1e6)]
        k_energy: f64,
        #[arg(long, value_enum, default_value_t = Method::FiniteScan)]
        method: Method,
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Torus-area estimate for incommensurate kagome geometry.
    TorusProb {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        ell: f64,
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Finite-scan band measure over c/d ratios at fixed d.
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        ratios: Vec<f64>,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        ell: f64,
        #[arg(long = "K", default_value_t = 1e5)]
        k_energy: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Vertex scattering matrix S(k).
    Scattering {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        ell: f64,
        #[arg(long)]
        k: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Measured widths against the leading-order predictions.
    Asymptotics {
        #[command(flatten)]
        geom: Geometry,
        /// index of the narrow band pair
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Raw and normalized secular determinants on a k × θ grid.
    OracleCheck {
        #[command(flatten)]
        geom: Geometry,
        #[arg(long)]
        k_min: f64,
        #[arg(long)]
        k_max: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// θ points per axis
        #[arg(long, default_value_t = 4)]
        grid: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Kagome,
    Equilateral,
    Triangular,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    FiniteScan,
    ClosedForm,
    Torus,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Geometry {
    #[arg(long, value_enum, default_value_t = Kind::Kagome)]
    kind: Kind,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    ell: f64,
}

#[derive(Args)]
struct Output {
    /// write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// reserved; every computation is deterministic
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Validation(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

type Run<T> = Result<T, Failure>;

fn require(name: &str, v: Option<f64>) -> Run<f64> {
    v.ok_or_else(|| Failure::Validation(format!("--{name} is required for this lattice")))
}

impl Geometry {
    fn spec(&self) -> Run<Spec> {
        let spec = match self.kind {
            Kind::Kagome => {
                let s = Spec::kagome(require("c", self.c)?, require("d", self.d)?, self.ell)?;
                if s.kind != LatticeKind::Kagome {
                    info!("d = 2c, treating the lattice as equilateral kagome");
                }
                s
            }
            Kind::Equilateral => {
                let c = require("c", self.c)?;
                if let Some(d) = self.d {
                    if d != 2.0 * c {
                        return Err(Failure::Validation(format!("equilateral kagome needs d = 2c, got c = {c}, d = {d}")));
                    }
                }
                Spec::equilateral(c, self.ell)?
            }
            Kind::Triangular => Spec::triangular(require("d", self.d)?, self.ell)?,
        };
        debug!("{spec:?}");
        Ok(spec)
    }
}

fn json_text(v: &impl serde::Serialize) -> Run<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

impl Output {
    fn emit(&self, csv: impl FnOnce() -> String, json: impl FnOnce() -> Run<String>) -> Run<()> {
        if self.seed.is_some() {
            debug!("--seed has no effect");
        }
        let text = match self.format {
            Format::Csv => csv(),
            Format::Json => json()?,
        };
        match &self.out {
            Some(path) => {
                fs::write(path, text).map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))?;
                info!("wrote {}", path.display());
            }
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn positive(name: &str, x: f64) -> Run<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Failure::Validation(format!("--{name} must be positive, got {x}")))
    }
}

fn g(x: f64) -> String {
    format_g(x, 12)
}

fn run(cli: Cli) -> Run<()> {
    match cli.command {
        Command::Bands { geom, k_max, resolution, out } => {
            let bs = scan_bands(&geom.spec()?, Side::Positive, k_max, resolution)?;
            out.emit(|| bands_csv(&[&bs]), || json_text(&bs))
        }
        Command::Negative { geom, kappa_max, out } => {
            let bs = scan_negative_bands(&geom.spec()?, kappa_max)?;
            out.emit(|| bands_csv(&[&bs]), || json_text(&bs))
        }
        Command::Flatbands { geom, k_max, kappa_max, out } => {
            let spec = geom.spec()?;
            positive("k-max", k_max)?;
            let kappa_max = kappa_max.unwrap_or(k_max);
            positive("kappa-max", kappa_max)?;
            let mut flats = flat_bands(&spec, k_max);
            flats.extend(negative_flat_bands(&spec, kappa_max));
            out.emit(
                || {
                    let mut s = String::from("side,family,k,E,embedded\n");
                    for f in &flats {
                        let family = serde_json::to_value(f.family).ok().and_then(|v| v.as_str().map(String::from));
                        s += &format!(
                            "{},{},{},{},{}\n",
                            f.side.as_str(),
                            family.unwrap_or_default(),
                            g(f.k),
                            g(f.side.energy(f.k)),
                            f.embedded
                        );
                    }
                    s
                },
                || json_text(&flats),
            )
        }
        Command::Probability { geom, k_energy, method, grid, out } => {
            let spec = geom.spec()?;
            let est = match method {
                Method::FiniteScan => finite_scan_probability(&spec, k_energy, None)?,
                Method::ClosedForm => closed_form_probability(&spec)?,
                Method::Torus => torus_probability(&spec, grid)?,
            };
            let rows = [(spec.c / spec.d, est)];
            out.emit(|| probability_csv(&rows), || json_text(&rows[0].1))
        }
        Command::TorusProb { c, d, ell, grid, out } => {
            let est = torus_probability(&Spec::kagome(c, d, ell)?, grid)?;
            let rows = [(c / d, est)];
            out.emit(|| probability_csv(&rows), || json_text(&rows[0].1))
        }
        Command::Sweep { ratios, d, ell, k_energy, out } => {
            // c only fixes the template; each ratio sets its own
            let template = Spec::kagome(d / 3.0, d, ell)?;
            let rows = probability_sweep(&ratios, &template, k_energy)?;
            let json_rows: Vec<_> = rows.iter().map(|(r, est)| json!({ "ratio": r, "estimate": est })).collect();
            out.emit(|| probability_csv(&rows), || json_text(&json_rows))
        }
        Command::Scattering { n, ell, k, out } => {
            let s = scattering_matrix(n, ell, k)?;
            out.emit(
                || {
                    let mut text = String::from("row,col,re,im\n");
                    for i in 0..s.n {
                        for (j, z) in s.entries.row(i).iter().enumerate() {
                            text += &format!("{i},{j},{},{}\n", g(z.re), g(z.im));
                        }
                    }
                    text
                },
                || json_text(&s),
            )
        }
        Command::Asymptotics { geom, n, out } => {
            let rows = asymptotics_report(&geom.spec()?, n)?;
            out.emit(|| asymptotics_csv(&rows), || json_text(&rows))
        }
        Command::OracleCheck { geom, k_min, k_max, steps, grid, out } => {
            let spec = geom.spec()?;
            positive("k-min", k_min)?;
            if !(k_max >= k_min && k_max.is_finite()) {
                return Err(Failure::Validation(format!("--k-max must be at least --k-min, got {k_max}")));
            }
            if steps == 0 || grid == 0 {
                return Err(Failure::Validation("--steps and --grid must be positive".into()));
            }
            let step = if steps > 1 { (k_max - k_min) / (steps - 1) as f64 } else { 0.0 };
            let h = std::f64::consts::TAU / grid as f64;
            let mut rows = Vec::with_capacity(steps * grid * grid);
            for s in 0..steps {
                let k = k_min + step * s as f64;
                let asm = SecularAssembler::new(Complex64::new(k, 0.0), &spec);
                for i in 0..grid {
                    for j in 0..grid {
                        let q = Quasimomentum::new(-std::f64::consts::PI + h * i as f64, -std::f64::consts::PI + h * j as f64);
                        let det = asm.determinant(&q);
                        rows.push([k, q.theta1, q.theta2, det.re, det.im, asm.normalized(&q).re]);
                    }
                }
            }
            out.emit(
                || {
                    let mut text = String::from("k,theta1,theta2,det_re,det_im,normalized\n");
                    for r in &rows {
                        text += &r.iter().map(|x| g(*x)).collect::<Vec<_>>().join(",");
                        text.push('\n');
                    }
                    text
                },
                || {
                    let v: Vec<_> = rows
                        .iter()
                        .map(|r| {
                            json!({ "k": r[0], "theta1": r[1], "theta2": r[2], "det_re": r[3], "det_im": r[4], "normalized": r[5] })
                        })
                        .collect();
                    json_text(&v)
                },
            )
        }
    }
}

fn init_threads() {
    let Ok(v) = std::env::var("QG_THREADS") else { return };
    match v.parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("cannot size the thread pool: {e}");
            }
        }
        _ => log::warn!("ignoring QG_THREADS={v}"),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    init_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(1)
        }
    }
}
