//! `mhsctl` — scenario runner for the exact Hodge-theoretic checks in the
//! `hodgekit` library. Exit codes: 0 all checks pass, 1 a check failed,
//! 2 usage or parse error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use hodgekit::cohomology;
use hodgekit::scenario::{self, fixtures, Report, RunOptions, Sample, Scenario};
use hodgekit::Gauss;

#[derive(Parser)]
#[command(name = "mhsctl", version, about = "exact checks for filtered structures with commuting nilpotent operators")]
struct Cli {
    /// Scenario file (JSON); defaults to the built-in h1_orbit scenario
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Truncation order for the parameter ring
    #[arg(long, global = true)]
    truncation: Option<u32>,
    /// Seed for randomized checks
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file with explicit numeric sample points
    #[arg(long, global = true)]
    samples: Option<PathBuf>,
    /// Emit the report as JSON
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit the report as text (default)
    #[arg(long, global = true)]
    text: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every check requested by the scenario
    Check,
    /// Degree-1 cohomology dimensions of the intersection subcomplex
    Cohomology,
    /// Build an extension from a class and read the class back
    Class {
        /// comma-separated coordinates of the class (defaults to a basis vector)
        #[arg(long)]
        alpha: Option<String>,
        /// number of variables for the pullback
        #[arg(long)]
        n: Option<usize>,
    },
    /// Build extension data from a class and print its validated limit shape
    BuildExt {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Symbolic and numeric checks of the deformed family
    Deform {
        /// numeric λ (Gaussian rational, e.g. `0` or `1/100`); omit for symbolic
        #[arg(long)]
        lambda: Option<String>,
        /// restrict to one check (e.g. `theorem15`, `positivity`)
        #[arg(long)]
        check: Option<String>,
    },
    /// Run the vanishing certificate end-to-end
    Certify {
        #[arg(long)]
        n: Option<usize>,
        /// numeric λ for the feasibility solve (omit to skip it)
        #[arg(long)]
        lambda: Option<String>,
        /// comma-separated residue constants, e.g. `1,0`
        #[arg(long)]
        c: Option<String>,
    },
}

fn usage_err(msg: String) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn parse_gauss(s: &str) -> Result<Gauss, String> {
    Gauss::from_str(s).map_err(|e| e.to_string())
}

fn parse_gauss_list(s: &str) -> Result<Vec<Gauss>, String> {
    s.split(',').map(|x| parse_gauss(x.trim())).collect()
}

fn load_scenario(cli: &Cli) -> Result<Scenario, String> {
    match &cli.scenario {
        None => Ok(fixtures::h1_orbit()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Scenario::from_json(&text)
        }
    }
}

fn run_options(cli: &Cli) -> Result<RunOptions, String> {
    let samples = match &cli.samples {
        None => None,
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let raw: Vec<Sample> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            Some(raw.iter().map(Sample::assignment).collect())
        }
    };
    Ok(RunOptions {
        truncation: cli.truncation,
        seed: cli.seed,
        samples,
        tolerance: None,
    })
}

fn emit(cli: &Cli, report: &Report) -> ExitCode {
    if cli.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_with_checks(cli: &Cli, mut scenario: Scenario, checks: Option<Vec<String>>) -> Result<ExitCode, String> {
    if let Some(c) = checks {
        scenario.checks = c;
    }
    let opts = run_options(cli)?;
    let report = scenario::run(&scenario, &opts);
    Ok(emit(cli, &report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => usage_err(msg),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let scenario = load_scenario(cli)?;
    match &cli.cmd {
        Cmd::Check => run_with_checks(cli, scenario, None),
        Cmd::Cohomology => {
            let mut checks = vec!["h1".to_string()];
            if scenario.pairing.is_some() {
                checks.push("h1-dims".to_string());
            }
            run_with_checks(cli, scenario, Some(checks))
        }
        Cmd::Class { alpha, n } => {
            let n = n.or(scenario.params.as_ref().map(|p| p.n)).unwrap_or(2).max(2);
            let orbit = scenario.pullback_orbit(n)?;
            let h1 = cohomology::ic_complex(&orbit.limit, &orbit.family).h(1);
            let target = h1.space.dim();
            let alpha = match alpha {
                Some(s) => parse_gauss_list(s)?,
                None => {
                    let mut v = vec![Gauss::from_i64(0); target];
                    if let Some(x) = v.first_mut() {
                        *x = Gauss::from_i64(1);
                    }
                    v
                }
            };
            let ext = cohomology::build_extension(&orbit, &alpha).map_err(|e| e.to_string())?;
            let cls = cohomology::class_of_extension(&ext).map_err(|e| e.to_string())?;
            let matched = cls.class == alpha;
            let out = serde_json::json!({
                "format": scenario::FORMAT_VERSION,
                "target_dim": target,
                "alpha": alpha.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "class": cls.class.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "round_trip": matched,
            });
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!(
                    "target dim {target}; class {:?}; round trip {}",
                    cls.class.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    if matched { "exact" } else { "MISMATCH" }
                );
            }
            Ok(if matched { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::BuildExt { alpha, n } => {
            let n = n.or(scenario.params.as_ref().map(|p| p.n)).unwrap_or(2).max(2);
            let orbit = scenario.pullback_orbit(n)?;
            let alpha = parse_gauss_list(alpha)?;
            let ext = cohomology::build_extension(&orbit, &alpha).map_err(|e| e.to_string())?;
            ext.validate().map_err(|e| e.to_string())?;
            let out = serde_json::json!({
                "format": scenario::FORMAT_VERSION,
                "dim": orbit.limit.dim() + 1,
                "operators": ext.primed_family.ops().len(),
                "rational_components": ext
                    .alpha_q
                    .iter()
                    .map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "hodge_vector": ext.beta.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "valid": true,
            });
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!(
                    "extension on dimension {} with {} operators: valid",
                    orbit.limit.dim() + 1,
                    ext.primed_family.ops().len()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Deform { lambda, check } => {
            let mut scenario = scenario;
            if let Some(l) = lambda {
                let v = parse_gauss(l)?;
                let params = scenario
                    .params
                    .as_mut()
                    .ok_or("scenario has no deformation parameters")?;
                params.lambda = Some(v);
            }
            let all = [
                "transversality",
                "conjugate-frame",
                "orthogonality",
                "frame-independence",
                "limit-fiber",
                "positivity",
                "theorem15",
            ];
            let checks: Vec<String> = match check {
                Some(c) if all.contains(&c.as_str()) => vec![c.clone()],
                Some(c) => return Err(format!("unknown deformation check '{c}'")),
                None => all.iter().map(|s| s.to_string()).collect(),
            };
            run_with_checks(cli, scenario, Some(checks))
        }
        Cmd::Certify { n, lambda, c } => {
            let mut scenario = scenario;
            let params = scenario
                .params
                .as_mut()
                .ok_or("scenario has no deformation parameters")?;
            if let Some(n) = n {
                params.n = *n;
                params.c = (0..*n)
                    .map(|k| if k == 0 { Gauss::from_i64(1) } else { Gauss::from_i64(0) })
                    .collect();
            }
            params.lambda = match lambda {
                Some(l) => Some(parse_gauss(l)?),
                None => None,
            };
            if let Some(c) = c {
                params.c = parse_gauss_list(c)?;
            }
            if params.c.len() != params.n {
                return Err(format!(
                    "c has {} entries for n = {}",
                    params.c.len(),
                    params.n
                ));
            }
            run_with_checks(cli, scenario, Some(vec!["certify".to_string()]))
        }
    }
}
