//! `cusp-smoother`: smoothability of cusps and contractions of cycles on
//! class VII surfaces, from the command line.
//!
//! Exit codes: 0 affirmative, 1 negative, 2 input error, 3 resource abort.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use cusp_smoother::realizability::DEFAULT_MEMO_LIMIT;
use cusp_smoother::{
    enumerate_t, replay_certificate, AnticanonicalType, Case, Certificate, Classifier,
    ClassifyError, CuspType, SearchError, SmoothabilityReport, Solver,
};

#[derive(Parser, Debug)]
#[command(
    name = "cusp-smoother",
    version,
    about = "Decide smoothability of cusp singularities"
)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads (default: logical processors).
    #[arg(long, global = true, env = "CUSP_SMOOTHER_THREADS")]
    threads: Option<usize>,

    /// Abort a search once the memo table holds this many states.
    #[arg(long, global = true, default_value_t = DEFAULT_MEMO_LIMIT)]
    memo_limit: usize,

    /// With `false`, single searches fan out over the thread pool.
    #[arg(long, global = true, default_value_t = true, action = clap::ArgAction::Set)]
    deterministic: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the Hirzebruch-Zagier dual of a cusp type.
    Dual { cycle: String },
    /// Decide smoothability of a cusp type.
    Classify {
        cycle: String,
        /// Ambient regime: r_lt_b2 or r_eq_b2.
        #[arg(long)]
        case: Option<String>,
        /// Include the realizability certificate of the dual.
        #[arg(long)]
        certificate: bool,
    },
    /// Is the anti-canonical type reachable from the plane by blow-ups?
    Realizable { cycle: String },
    /// Write a certificate for an anti-canonical type.
    Certify {
        cycle: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a certificate file through the Picard lattice.
    Verify { file: PathBuf },
    /// List cusp types with `r` components and excess `s`.
    Enumerate { r: usize, s: usize },
    /// Classify every cusp type up to the given bounds.
    Sweep {
        #[arg(long, default_value_t = 12)]
        max_r: usize,
        #[arg(long, default_value_t = 10)]
        max_s: usize,
        /// Also write one TSV row per type.
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
}

enum Failure {
    Input(anyhow::Error),
    Resource(SearchError),
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::MemoLimit(_) => Failure::Resource(e),
            other => Failure::Input(other.into()),
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Search(e) => e.into(),
            other => Failure::Input(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn parse_cusp(s: &str) -> Result<CuspType, Failure> {
    s.parse::<CuspType>().map_err(|e| Failure::Input(e.into()))
}

fn parse_anticanonical(s: &str) -> Result<AnticanonicalType, Failure> {
    s.parse::<AnticanonicalType>()
        .map_err(|e| Failure::Input(e.into()))
}

/// Output is collected and written once, from the main thread.
struct Sink {
    out: String,
}

impl Sink {
    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }
}

fn print_report(sink: &mut Sink, rep: &SmoothabilityReport, json: bool) {
    if json {
        sink.line(rep.to_json());
        return;
    }
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    sink.line(format!("type          {}", rep.cusp_type));
    sink.line(format!("dual          {}", rep.dual));
    sink.line(format!("r             {}", rep.r));
    sink.line(format!("s             {}", rep.s));
    sink.line(format!("C2            {}", rep.c2));
    sink.line(format!("smoothable    {}", yes_no(rep.smoothable)));
    if let Some(w) = rep.wahl_dimension {
        sink.line(format!("wahl_dimension {w}"));
    }
    sink.line(format!("self_dual     {}", yes_no(rep.self_dual)));
    if let Some(b) = rep.inferred_b2x {
        sink.line(format!("inferred_b2X  {b}"));
    }
    if let Some(d) = rep.deformation {
        sink.line(format!("deformation   {} b2={}", d.class, d.b2));
    }
    if let Some(c) = &rep.certificate {
        sink.line(format!("certificate   {}", c.to_json()));
    }
}

fn run(cli: Cli, sink: &mut Sink) -> Result<bool, Failure> {
    let solver = Solver::new(cli.memo_limit).with_parallel(!cli.deterministic);
    let classifier = Classifier::new(solver);
    let json = cli.json;
    match cli.command {
        Command::Dual { cycle } => {
            let c = parse_cusp(&cycle)?;
            sink.line(c.hz_dual().to_string());
            Ok(true)
        }
        Command::Classify {
            cycle,
            case,
            certificate,
        } => {
            let c = parse_cusp(&cycle)?;
            let mut rep = match case {
                Some(case) => {
                    let case: Case = case.parse().map_err(|e: String| anyhow!(e))?;
                    if case == Case::Unspecified {
                        classifier.classify(&c)?
                    } else {
                        classifier.classify_contraction(&c, case)?
                    }
                }
                None => classifier.classify(&c)?,
            };
            if !certificate {
                rep.certificate = None;
            }
            print_report(sink, &rep, json);
            Ok(rep.smoothable)
        }
        Command::Realizable { cycle } => {
            let t = parse_anticanonical(&cycle)?;
            let yes = classifier.solver().is_realizable(&t)?;
            if json {
                sink.line(format!(
                    "{{\"type\":{},\"required_depth\":{},\"realizable\":{}}}",
                    serde_json::to_string(&t).expect("type serializes"),
                    t.required_depth(),
                    yes
                ));
            } else {
                sink.line(format!(
                    "{t} {}",
                    if yes { "realizable" } else { "not realizable" }
                ));
            }
            Ok(yes)
        }
        Command::Certify { cycle, out } => {
            let t = parse_anticanonical(&cycle)?;
            let Some(cert) = classifier.solver().find_certificate(&t)? else {
                eprintln!("{t} is not realizable");
                return Ok(false);
            };
            match out {
                Some(path) => fs::write(&path, cert.to_json() + "\n")
                    .with_context(|| format!("writing {}", path.display()))?,
                None => sink.line(cert.to_json()),
            }
            Ok(true)
        }
        Command::Verify { file } => {
            let text =
                fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let cert: Certificate = serde_json::from_str(&text)
                .with_context(|| format!("{} is not a certificate", file.display()))?;
            let report = replay_certificate(&cert).report;
            if json {
                sink.line(report.to_json());
            } else {
                let ty = serde_json::to_string(&report.cycle_type).expect("type serializes");
                let verdict = if report.valid { "valid" } else { "invalid" };
                sink.line(format!(
                    "{verdict} N={} K2={} type={ty}",
                    report.n, report.k2
                ));
                for v in &report.violations {
                    sink.line(format!("  {v}"));
                }
            }
            Ok(report.valid)
        }
        Command::Enumerate { r, s } => {
            let types = enumerate_t(r, s);
            if json {
                sink.line(serde_json::to_string(&types).expect("types serialize"));
            } else {
                for t in &types {
                    sink.line(t.to_string());
                }
            }
            Ok(true)
        }
        Command::Sweep { max_r, max_s, tsv } => {
            if max_r == 0 || max_s == 0 {
                return Err(Failure::Input(anyhow!("sweep bounds must be at least 1")));
            }
            let rep = classifier.sweep(max_r, max_s)?;
            if let Some(path) = tsv {
                fs::write(&path, rep.to_tsv())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if json {
                sink.line(rep.to_json());
            } else {
                sink.line(format!("types          {}", rep.total));
                sink.line(format!("smoothable     {}", rep.smoothable));
                sink.line(format!("unsmoothable   {}", rep.unsmoothable));
                sink.line(format!("counterexamples {}", rep.counterexamples.len()));
                sink.line(format!("wahl_violations {}", rep.wahl_violations.len()));
                sink.line(format!("replay_failures {}", rep.replay_failures.len()));
                for t in rep
                    .counterexamples
                    .iter()
                    .chain(&rep.wahl_violations)
                    .chain(&rep.replay_failures)
                {
                    sink.line(format!("  {t}"));
                }
            }
            Ok(rep.is_clean())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    if cli.memo_limit == 0 {
        eprintln!("error: --memo-limit must be at least 1");
        return ExitCode::from(2);
    }
    let mut sink = Sink { out: String::new() };
    let code = match run(cli, &mut sink) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            2
        }
        Err(Failure::Resource(e)) => {
            eprintln!("error: {e}");
            3
        }
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(sink.out.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(code)
}
