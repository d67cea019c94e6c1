mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mopuc::io::{
    self, matrix_doc, matrix_from, FamilyDoc, LatticeDoc, MomentDoc, ResidualRecord, TrajectoryDoc, WeightDoc,
};
use mopuc::linalg::{c, fro, CMat};
use mopuc::moments::{compute_moments, MomentTable};
use mopuc::painleve::{locality_check, local_residual, propagate, term_scale, DPIICoefficients, DPIIState, Locality};
use mopuc::szego::{solve_families, SzegoFamily, VerblunskyLattice};
use mopuc::weights::{monodromy_defect, WeightSpec};
use mopuc::{verify, Error};
use serde::Serialize;

use config::{Format, RunConfig};

const INITIAL_NODES: usize = 64;

#[derive(Parser)]
#[command(name = "mopuc", version, about = "Matrix Szegő polynomials, Verblunsky lattices and matrix dPII checks")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Suppress the summary of written files.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier moments of the weight.
    Moments,
    /// Szegő families and the Verblunsky lattice.
    Szego,
    /// Structural, Riemann-Hilbert and transfer checks.
    Verify,
    /// Discrete Painlevé II residuals, propagation or both.
    Dpii {
        #[arg(value_enum, default_value_t = Mode::Residual)]
        mode: Mode,
    },
    /// Build an N = 2 Fuchsian weight and report its series and monodromy.
    FuchsianWeight,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Residual,
    Propagate,
    Compare,
}

/// Failure carried to the exit code.
enum Failure {
    Usage(String),
    Pipeline(Error),
    Checks(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Pipeline(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Checks(_) => 1,
            Failure::Pipeline(e) => match e {
                Error::Convergence { .. } | Error::Integration { .. } | Error::Truncation(_) => 2,
                Error::QuasiDefinite { .. } => 3,
                Error::SpecMismatch(_) | Error::Constraint { .. } => 4,
                Error::Singular { .. } | Error::Resonance { .. } | Error::Pole(_) => 5,
                Error::Parse(_) | Error::InvalidSpec(_) => 64,
                _ => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Checks(k) => format!("{k} check(s) above threshold"),
            Failure::Pipeline(e) => e.to_string(),
        }
    }
}

type Outcome = std::result::Result<Vec<PathBuf>, Failure>;
type CsvWriter = Box<dyn Fn(&mut Vec<u8>) -> mopuc::Result<()>>;

/// What a command produces: a JSON document and its CSV rendering.
struct Artifact<T: Serialize> {
    name: &'static str,
    json: T,
    csv: CsvWriter,
}

fn write_outputs<T: Serialize>(cfg: &RunConfig, out: &Path, art: &Artifact<T>) -> mopuc::Result<Vec<PathBuf>> {
    let defaults = [config::Output {
        path: PathBuf::from(format!("{}.json", art.name)),
        format: Format::Json,
    }];
    let targets = if cfg.outputs.is_empty() { &defaults[..] } else { &cfg.outputs[..] };
    let mut written = Vec::new();
    for t in targets {
        let path = if t.path.is_absolute() { t.path.clone() } else { out.join(&t.path) };
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut buf = Vec::new();
        match t.format {
            Format::Json => {
                io::write_json(&art.json, &mut buf)?;
                buf.push(b'\n');
            }
            Format::Csv => (art.csv)(&mut buf)?,
        }
        std::fs::write(&path, buf)?;
        written.push(path);
    }
    Ok(written)
}

fn load(cli: &Cli) -> std::result::Result<RunConfig, Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Usage("--config PATH is required".into()))?;
    match RunConfig::load(path) {
        Ok(c) => Ok(c),
        Err(Error::Io(e)) => Err(Failure::Usage(format!("cannot read {}: {e}", path.display()))),
        Err(e) => Err(Failure::Usage(format!("{}: {e}", path.display()))),
    }
}

fn weight(cfg: &RunConfig) -> std::result::Result<WeightSpec, Failure> {
    cfg.weight.to_spec().map_err(|e| match e {
        Error::Parse(_) | Error::InvalidSpec(_) => Failure::Usage(format!("weight: {e}")),
        e => Failure::Pipeline(e),
    })
}

fn pipeline(cfg: &RunConfig, spec: &WeightSpec) -> mopuc::Result<(MomentTable, Vec<SzegoFamily>)> {
    let table = compute_moments(spec, cfg.j_max, INITIAL_NODES)?;
    let families = solve_families(&table, cfg.n_max)?;
    Ok((table, families))
}

fn cmd_moments(cfg: &RunConfig, out: &Path) -> Outcome {
    let spec = weight(cfg)?;
    let table = compute_moments(&spec, cfg.j_max, INITIAL_NODES)?;
    let t = table.clone();
    let art = Artifact {
        name: "moments",
        json: MomentDoc::from_table(&table),
        csv: Box::new(move |b| io::write_moments_csv(&t, b)),
    };
    Ok(write_outputs(cfg, out, &art)?)
}

#[derive(Serialize)]
struct SzegoDoc {
    schema: u32,
    lattice: LatticeDoc,
    families: Vec<FamilyDoc>,
}

fn cmd_szego(cfg: &RunConfig, out: &Path) -> Outcome {
    let spec = weight(cfg)?;
    let (_, families) = pipeline(cfg, &spec)?;
    let lat = VerblunskyLattice::from_families(&families);
    let l = lat.clone();
    let art = Artifact {
        name: "szego",
        json: SzegoDoc {
            schema: io::SCHEMA,
            lattice: LatticeDoc::from_lattice(&lat),
            families: families.iter().map(FamilyDoc::from_family).collect(),
        },
        csv: Box::new(move |b| io::write_lattice_csv(&l, b)),
    };
    Ok(write_outputs(cfg, out, &art)?)
}

#[derive(Serialize)]
struct ReportDoc {
    schema: u32,
    pass: bool,
    checks: Vec<ResidualRecord>,
}

fn report_artifact(name: &'static str, checks: Vec<ResidualRecord>) -> Artifact<ReportDoc> {
    let rows = checks.clone();
    Artifact {
        name,
        json: ReportDoc {
            schema: io::SCHEMA,
            pass: checks.iter().all(|r| r.pass),
            checks,
        },
        csv: Box::new(move |b| io::write_report_csv(&rows, b)),
    }
}

fn failures(checks: &[ResidualRecord]) -> usize {
    let bad: Vec<&ResidualRecord> = checks.iter().filter(|r| !r.pass).collect();
    if let Some(first) = bad.first() {
        eprintln!(
            "first failing check: {} (n = {}) residual {:.3e} > {:.3e}",
            first.check,
            first.n.map_or("-".into(), |n| n.to_string()),
            first.residual,
            first.threshold
        );
        if let Some(e) = &first.error {
            eprintln!("  {e}");
        }
    }
    bad.len()
}

fn cmd_verify(cfg: &RunConfig, out: &Path) -> Outcome {
    let spec = weight(cfg)?;
    let (table, families) = pipeline(cfg, &spec)?;
    let pearson = cfg.weight.pearson_spec(&spec)?;
    let tol = verify::tolerances(&cfg.tolerances)?;
    let checks = verify::verify_all(&spec, &table, &families, pearson.as_ref(), &tol)?;
    let bad = failures(&checks);
    let written = write_outputs(cfg, out, &report_artifact("verify", checks))?;
    if bad > 0 {
        return Err(Failure::Checks(bad));
    }
    Ok(written)
}

#[derive(Serialize)]
struct LocalityDoc {
    local: bool,
    commutators: Vec<(String, f64)>,
}

#[derive(Serialize)]
struct DpiiDoc {
    schema: u32,
    variant: &'static str,
    pass: bool,
    locality: Option<LocalityDoc>,
    checks: Vec<ResidualRecord>,
    trajectory: Vec<TrajectoryDoc>,
}

fn coefficients(cfg: &RunConfig, spec: &WeightSpec) -> std::result::Result<DPIICoefficients, Failure> {
    let pearson = cfg
        .weight
        .pearson_spec(spec)?
        .ok_or_else(|| Error::SpecMismatch("weight carries no Pearson coefficients".into()))?;
    Ok(DPIICoefficients::from_pearson(&pearson)?)
}

fn initial_state(cfg: &RunConfig, lat: Option<&VerblunskyLattice>) -> std::result::Result<DPIIState, Failure> {
    let n = cfg.weight.n_dim;
    if let Some(init) = &cfg.initial {
        let parse = |m| matrix_from(m, n).map_err(|e| Failure::Usage(format!("initial: {e}")));
        return Ok(DPIIState::initial(parse(&init.a_l1)?, parse(&init.a_r2d)?));
    }
    match lat {
        Some(l) => Ok(DPIIState::from_lattice(l, 1)?),
        None => Err(Failure::Usage("propagate needs `initial` data or a quasi-definite weight".into())),
    }
}

fn rel_gap(a: &CMat, b: &CMat) -> f64 {
    fro(&(a - b)) / (1.0 + fro(b))
}

fn cmd_dpii(cfg: &RunConfig, out: &Path, mode: Mode) -> Outcome {
    let spec = weight(cfg)?;
    let coeffs = coefficients(cfg, &spec)?;
    let tol = verify::tolerances(&cfg.tolerances)?;
    let variant = match coeffs {
        DPIICoefficients::Fuchsian { .. } => "fuchsian",
        DPIICoefficients::NonFuchsian { .. } => "nonfuchsian",
    };
    let need_lattice = mode != Mode::Propagate || cfg.initial.is_none();
    let lat = if need_lattice {
        let (_, families) = pipeline(cfg, &spec)?;
        Some(VerblunskyLattice::from_families(&families))
    } else {
        None
    };

    let mut checks = Vec::new();
    let mut locality = None;
    if mode != Mode::Propagate {
        let lat = lat.as_ref().expect("lattice");
        checks = verify::dpii_report(lat, &coeffs, tol["dpii"])?;
        let w = spec.eval(c(1.0, 0.0))?;
        let rep = locality_check(&coeffs, &w, 1e-10);
        if rep.verdict == Locality::Local {
            for n in 1..lat.n_max {
                let (r1, r2) = local_residual(lat, &coeffs, n)?;
                let s = term_scale(lat, &coeffs, n)?;
                checks.push(ResidualRecord::new("dpii_local_1", Some(n), None, fro(&r1) / s, tol["dpii"]));
                checks.push(ResidualRecord::new("dpii_local_2", Some(n), None, fro(&r2) / s, tol["dpii"]));
            }
        }
        locality = Some(LocalityDoc {
            local: rep.verdict == Locality::Local,
            commutators: rep.commutators,
        });
    }

    let mut records = Vec::new();
    if mode != Mode::Residual {
        let state = initial_state(cfg, lat.as_ref())?;
        let (plat, recs) = propagate(&state, &coeffs, cfg.n_max - 1)?;
        if mode == Mode::Compare {
            let lat = lat.as_ref().expect("lattice");
            for n in 2..=cfg.n_max {
                let g = rel_gap(&plat.a_l1[n], &lat.a_l1[n]).max(rel_gap(&plat.a_r2d[n], &lat.a_r2d[n]));
                checks.push(ResidualRecord::new("dpii_gap", Some(n), None, g, tol["dpii_gap"]));
            }
        }
        records = recs;
    }

    let bad = failures(&checks);
    let rows = checks.clone();
    let recs = records.clone();
    let csv: CsvWriter = if mode == Mode::Propagate {
        Box::new(move |b| io::write_trajectory_csv(&recs, b))
    } else {
        Box::new(move |b| io::write_report_csv(&rows, b))
    };
    let art = Artifact {
        name: "dpii",
        json: DpiiDoc {
            schema: io::SCHEMA,
            variant,
            pass: bad == 0,
            locality,
            checks,
            trajectory: records.iter().map(TrajectoryDoc::from_record).collect(),
        },
        csv,
    };
    let written = write_outputs(cfg, out, &art)?;
    if bad > 0 {
        return Err(Failure::Checks(bad));
    }
    Ok(written)
}

#[derive(Serialize)]
struct FuchsianDoc {
    schema: u32,
    weight: WeightDoc,
    theta: io::Complex,
    order: usize,
    prefactor_lo: i32,
    prefactor: Vec<io::Matrix>,
    phi: Vec<io::Matrix>,
    monodromy_defect: f64,
}

fn cmd_fuchsian_weight(cfg: &RunConfig, out: &Path) -> Outcome {
    let spec = weight(cfg)?;
    let WeightSpec::Fuchsian(f) = &spec else {
        return Err(Error::SpecMismatch("fuchsian-weight needs a fuchsian_n2 weight".into()).into());
    };
    let defect = monodromy_defect(&f.pearson()?)?;
    let phi = f.phi.clone();
    let art = Artifact {
        name: "fuchsian_weight",
        json: FuchsianDoc {
            schema: io::SCHEMA,
            weight: WeightDoc::from_spec(&spec),
            theta: io::complex_doc(f.theta),
            order: f.order(),
            prefactor_lo: f.prefactor.lo,
            prefactor: f.prefactor.coeffs.iter().map(matrix_doc).collect(),
            phi: f.phi.iter().map(matrix_doc).collect(),
            monodromy_defect: defect,
        },
        csv: Box::new(move |b| {
            let mut w = csv_writer(b);
            w.write_record(["j", "row", "col", "re", "im"]).map_err(csv_err)?;
            for (j, m) in phi.iter().enumerate() {
                for r in 0..m.nrows() {
                    for col in 0..m.ncols() {
                        w.write_record([
                            j.to_string(),
                            r.to_string(),
                            col.to_string(),
                            io::format_float(m[(r, col)].re),
                            io::format_float(m[(r, col)].im),
                        ])
                        .map_err(csv_err)?;
                    }
                }
            }
            w.flush()?;
            Ok(())
        }),
    };
    Ok(write_outputs(cfg, out, &art)?)
}

fn csv_writer(b: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::Writer::from_writer(b)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = load(&cli).and_then(|cfg| match &cli.command {
        Command::Moments => cmd_moments(&cfg, &cli.out),
        Command::Szego => cmd_szego(&cfg, &cli.out),
        Command::Verify => cmd_verify(&cfg, &cli.out),
        Command::Dpii { mode } => cmd_dpii(&cfg, &cli.out, *mode),
        Command::FuchsianWeight => cmd_fuchsian_weight(&cfg, &cli.out),
    });
    match result {
        Ok(paths) => {
            if !cli.quiet {
                for p in paths {
                    println!("{}", p.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("mopuc: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
