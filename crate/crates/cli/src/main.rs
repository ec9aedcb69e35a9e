use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use carnot_core::control_format::{load_control, named_algebra};
use carnot_core::endpoint::{breakpoint_trajectory_f64, endpoint, is_abnormal, trajectory_csv};
use carnot_core::lie::spec_format::{dump_algebra, load_algebra};
use carnot_core::sard::{criterion_infinitesimal, generic_sampler, Prolongation};
use carnot_core::scalar::{fmt_scalar, parse_scalar};
use carnot_core::step2::{self, Step2Point, Stratum};
use carnot_core::{f33, CarnotAlgebra, Error};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "carnot", version, about = "Exact computations on Carnot groups")]
struct Cli {
    /// Print the report as a JSON object.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build or validate Carnot algebras.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Rank criteria for the algebraic Sard property.
    #[command(subcommand)]
    Criterion(CriterionCmd),
    /// Abnormality certificates.
    #[command(subcommand)]
    Abnormal(AbnormalCmd),
}

#[derive(Subcommand, Debug)]
enum AlgebraCmd {
    /// Free nilpotent algebra in the Hall basis.
    Free {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        step: usize,
        /// Print the JSON description instead of the report.
        #[arg(long)]
        dump: bool,
    },
    /// Validate a JSON algebra description.
    Load {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Expect {
    /// Exit with status 1 when the verdict is negative.
    #[arg(long)]
    expect: bool,
}

#[derive(Subcommand, Debug)]
enum CriterionCmd {
    /// Test `h + V1 + ad_xi(h + V1) = g~` for one element.
    Check {
        #[arg(long)]
        algebra: String,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[command(flatten)]
        expect: Expect,
    },
    /// Count random elements satisfying the criterion.
    Sample {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        expect: Expect,
    },
}

#[derive(Subcommand, Debug)]
enum AbnormalCmd {
    /// Abnormality certificate for a piecewise-constant control.
    Control {
        #[arg(long)]
        file: PathBuf,
        /// Write the breakpoint trajectory as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        expect: Expect,
    },
    /// Rank, wedge-power and stratum tests for a step-two point `v;xi`.
    Step2 {
        #[arg(long)]
        rank: usize,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[command(flatten)]
        expect: Expect,
    },
    /// Numerical check of the exponential controls in f(3,3).
    F33 {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Comma-separated amplitudes; the headline case has all three nonzero.
        #[arg(long, default_value = "1,1,1", allow_hyphen_values = true)]
        amplitudes: String,
        #[arg(long, default_value_t = f33::DEFAULT_SEGMENTS)]
        segments: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write the approximate trajectory as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        expect: Expect,
    },
}

/// Ordered `key: value` report.
struct Report {
    fields: Vec<(String, Value)>,
}

impl Report {
    fn new(command: &str) -> Self {
        Self {
            fields: vec![("command".into(), json!(command))],
        }
    }

    fn add(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.push((key.to_string(), value.into()));
    }

    fn render(&self, as_json: bool, wall: f64) -> String {
        if as_json {
            let mut map = Map::new();
            for (k, v) in &self.fields {
                map.insert(k.clone(), v.clone());
            }
            map.insert("wall_time".into(), json!(wall));
            return serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes") + "\n";
        }
        let mut out = String::new();
        for (k, v) in &self.fields {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}: {text}\n"));
        }
        out.push_str(&format!("wall_time: {wall:.3}s\n"));
        out
    }
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn layers(alg: &CarnotAlgebra) -> String {
    alg.layer_dims()
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join("/")
}

fn cmd_algebra(cmd: &AlgebraCmd) -> Result<Option<Report>, Error> {
    let (mut report, alg) = match cmd {
        AlgebraCmd::Free { rank, step, dump } => {
            let alg = CarnotAlgebra::free(*rank, *step)?;
            if *dump {
                println!("{}", dump_algebra(&alg));
                return Ok(None);
            }
            let mut r = Report::new("algebra free");
            r.add("rank", *rank);
            r.add("step", *step);
            (r, alg)
        }
        AlgebraCmd::Load { file } => {
            let alg = load_algebra(&read(file)?)?;
            let mut r = Report::new("algebra load");
            r.add("file", file.display().to_string());
            r.add("valid", true);
            (r, alg)
        }
    };
    report.add("summary", format!("dim {}, layers {}", alg.dim(), layers(&alg)));
    report.add("dim", alg.dim());
    report.add("layers", layers(&alg));
    report.add("basis", alg.labels().join(" "));
    Ok(Some(report))
}

fn cmd_criterion(cmd: &CriterionCmd) -> Result<(Report, bool), Error> {
    match cmd {
        CriterionCmd::Check { algebra, xi, expect } => {
            let p = Prolongation::with_gl(named_algebra(algebra)?)?;
            let x = p.parse_element(xi)?;
            let res = criterion_infinitesimal(&p, &x)?;
            let mut r = Report::new("criterion check");
            r.add("algebra", algebra.as_str());
            r.add("xi", p.format(&x));
            r.add("rank", res.rank);
            r.add("dim", res.dim);
            r.add("verdict", res.holds);
            Ok((r, expect.expect && !res.holds))
        }
        CriterionCmd::Sample {
            algebra,
            trials,
            seed,
            expect,
        } => {
            let p = Prolongation::with_gl(named_algebra(algebra)?)?;
            let rep = generic_sampler(&p, *trials, *seed)?;
            let mut r = Report::new("criterion sample");
            r.add("algebra", algebra.as_str());
            r.add("xi", format!("random, integer coefficients in [-{0}, {0}]", carnot_core::sard::SAMPLE_BOUND));
            r.add("dim", p.dim());
            r.add("seed", rep.seed);
            r.add("trials", rep.trials);
            r.add("successes", rep.successes);
            r.add("verdict", rep.successes > 0);
            Ok((r, expect.expect && rep.successes == 0))
        }
    }
}

fn cmd_abnormal(cmd: &AbnormalCmd) -> Result<(Report, bool), Error> {
    match cmd {
        AbnormalCmd::Control { file, csv, expect } => {
            let (alg, u) = load_control(&read(file)?)?;
            let cert = is_abnormal(&alg, &u)?;
            let end = endpoint(&alg, &u)?;
            let mut r = Report::new("abnormal control");
            r.add("file", file.display().to_string());
            r.add("algebra_dim", alg.dim());
            r.add("segments", u.segments());
            r.add("endpoint", alg.format_vec(end.coeffs()));
            r.add("image_rank", cert.image_rank);
            r.add("dim", cert.dim);
            r.add("abnormal", cert.abnormal);
            let ann: Vec<Value> = cert
                .annihilators
                .iter()
                .map(|c| json!(alg.format_vec(c.coeffs())))
                .collect();
            r.add("annihilators", Value::Array(ann));
            if let Some(path) = csv {
                let (times, rows) = breakpoint_trajectory_f64(&alg, &u)?;
                write(path, &trajectory_csv("x", &times, &rows))?;
                r.add("csv", path.display().to_string());
            }
            Ok((r, expect.expect && !cert.abnormal))
        }
        AbnormalCmd::Step2 { rank, point, expect } => {
            let p = Step2Point::parse(*rank, point)?;
            let abnormal = step2::is_abnormal_point(&p);
            let mut r = Report::new("abnormal step2");
            r.add("rank", *rank);
            r.add("point", p.format());
            r.add("rank2", step2::rank2(&p));
            r.add("abnormal", abnormal);
            r.add("pfaffian", step2::pfaffian_membership(&p));
            let stratum = match step2::stratum(&p) {
                Ok(s) => Some(s),
                Err(Error::OddRank(_)) => None,
                Err(e) => return Err(e),
            };
            r.add(
                "stratum",
                stratum.map_or("n/a (odd rank)".to_string(), |s| s.to_string()),
            );
            if abnormal {
                let w = step2::subgroup_descent(&p)?;
                let basis: Vec<Value> = w
                    .iter()
                    .map(|v| json!(step2::format_vector(v)))
                    .collect();
                r.add("descent_dim", w.len());
                r.add("descent_basis", Value::Array(basis));
            }
            if stratum == Some(Stratum::Y) {
                r.add("codim", step2::codim_certificate(&p)?);
            }
            Ok((r, expect.expect && !abnormal))
        }
        AbnormalCmd::F33 {
            a,
            b,
            amplitudes,
            segments,
            tol,
            csv,
            expect,
        } => {
            let a = parse_scalar(a)?;
            let b = parse_scalar(b)?;
            let amps: Vec<_> = amplitudes
                .split(',')
                .map(parse_scalar)
                .collect::<Result<_, _>>()?;
            let amps: [_; 3] = amps
                .try_into()
                .map_err(|_| Error::Parse("expected three amplitudes".into()))?;
            let rep = f33::verify_abnormal_abc(&a, &b, &amps, *segments, *tol)?;
            let mut r = Report::new("abnormal f33");
            r.add("a", fmt_scalar(&rep.a));
            r.add("b", fmt_scalar(&rep.b));
            r.add("c", fmt_scalar(&rep.c));
            r.add(
                "amplitudes",
                rep.amplitudes.iter().map(fmt_scalar).collect::<Vec<_>>().join(","),
            );
            r.add("segments", rep.segments);
            r.add("extremal_residual", sci(rep.extremal_residual));
            r.add("adjoint_residual", sci(rep.adjoint_residual));
            r.add("tol", sci(rep.tol));
            r.add("not_in_subgroup", rep.not_in_subgroup);
            r.add("pass", rep.pass);
            if let Some(path) = csv {
                write(path, &trajectory_csv("x", &rep.times, &rep.trajectory))?;
                r.add("csv", path.display().to_string());
            }
            let ok = rep.pass && rep.not_in_subgroup;
            Ok((r, expect.expect && !ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Algebra(c) => cmd_algebra(c).map(|r| (r, false)),
        Command::Criterion(c) => cmd_criterion(c).map(|(r, f)| (Some(r), f)),
        Command::Abnormal(c) => cmd_abnormal(c).map(|(r, f)| (Some(r), f)),
    };
    match outcome {
        Ok((report, failed)) => {
            if let Some(report) = report {
                print!("{}", report.render(cli.json, start.elapsed().as_secs_f64()));
            }
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
