use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use weilforms::arith::{divisors, fmt_rat, parse_rat};
use weilforms::borcherds::{borcherds_product, eta_product, weyl_vector};
use weilforms::divisors::{
    converse_pipeline, cusp_classes, cusp_space_dimension, eta_order, heegner_degree,
    heegner_degrees, solve_cusp_matching, CuspDivisor, CuspDivisorJson,
};
use weilforms::heckeops::{hecke_tp, level_u, level_v};
use weilforms::verify::{self, Suite};
use weilforms::vvforms::{
    apply_aut, basis_m_half, formal_xi, theta_series, VVExpansion, VVExpansionJson,
};

#[derive(Parser, Debug)]
#[command(
    name = "weilforms",
    version,
    about = "Exact computations with Weil-representation theta series, Borcherds products and divisors on X0(N)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Op {
    Sigma,
    T,
    U,
    V,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Theta series of weight 1/2 for rho_N.
    Theta {
        #[arg(long = "N")]
        n: i64,
        #[arg(long, default_value_t = 50)]
        prec: i64,
    },
    /// Theta basis of M_{1/2, rho_N}.
    Basis {
        #[arg(long = "N")]
        n: i64,
        #[arg(long, default_value_t = 50)]
        prec: i64,
    },
    /// Apply sigma_c, T_p, U_d or V_l to a serialized expansion.
    Apply {
        /// JSON expansion, or `-` for stdin.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long)]
        arg: i64,
    },
    /// Image of a serialized expansion under the formal xi map.
    Xi {
        #[arg(long)]
        input: PathBuf,
    },
    /// Borcherds product of a serialized weight 1/2 expansion.
    Product {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 20)]
        prec: i64,
        /// Weyl vector `a/b`; computed from the theta basis when omitted.
        #[arg(long, allow_hyphen_values = true)]
        weyl: Option<String>,
    },
    /// eta(dz) eta((N/d) z).
    Eta {
        #[arg(long = "N")]
        n: i64,
        #[arg(long)]
        d: i64,
        #[arg(long, default_value_t = 50)]
        prec: i64,
    },
    /// Cusp classes of X0(N).
    Cusps {
        #[arg(long = "N")]
        n: i64,
    },
    /// Orders of eta(dz) eta((N/d) z) at every cusp class.
    EtaOrders {
        #[arg(long = "N")]
        n: i64,
        /// Restrict to one divisor.
        #[arg(long)]
        d: Option<i64>,
    },
    /// Dimension of the Fricke-invariant rational cusp divisors.
    Dimension {
        #[arg(long = "N")]
        n: i64,
    },
    /// Express a Fricke-invariant cusp divisor through eta products.
    Solve {
        /// CuspDivisor JSON, or `-` for stdin.
        #[arg(long)]
        input: PathBuf,
    },
    /// Degrees of Heegner divisors Z(n, gamma).
    Heegner {
        #[arg(long = "N")]
        n: i64,
        /// Discriminant, negative.
        #[arg(long = "n", allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        gamma: Option<i64>,
    },
    /// Heegner data and cusp matching for a principal part and cusp target.
    Pipeline {
        /// `{"N":..,"principal":[[n,gamma,a],..],"cusp_target":{"N":..,"orders":[[c,"a/b"],..]}}`.
        #[arg(long)]
        input: PathBuf,
    },
    /// Run a verification suite, or `all`.
    Verify {
        suite: String,
        #[arg(long = "N-max")]
        n_max: Option<i64>,
        #[arg(long)]
        prec: Option<i64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Deserialize)]
struct PipelineInput {
    #[serde(rename = "N")]
    level: i64,
    #[serde(default)]
    principal: Vec<(i64, i64, i64)>,
    cusp_target: CuspDivisorJson,
}

enum Failure {
    Usage(String),
    /// Machine-readable report and the first mismatch.
    Verification(String, String),
}

impl From<weilforms::Error> for Failure {
    fn from(e: weilforms::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(format!("invalid JSON: {e}"))
    }
}

enum Output {
    Json(Value),
    Text(String),
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

fn read_expansion(path: &PathBuf) -> Result<VVExpansion, Failure> {
    let j: VVExpansionJson = serde_json::from_str(&read_input(path)?)?;
    Ok(VVExpansion::from_json(&j)?)
}

fn check_positive(name: &str, v: i64) -> Result<(), Failure> {
    if v < 1 {
        return Err(Failure::Usage(format!(
            "--{name} must be at least 1, got {v}"
        )));
    }
    Ok(())
}

fn csv_rows(header: &str, rows: impl IntoIterator<Item = String>) -> Output {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    Output::Text(s)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let csv = cli.format == Format::Csv;
    let no_csv = |what: &str| Failure::Usage(format!("CSV output is not available for {what}"));
    let out = match &cli.command {
        Command::Theta { n, prec } => {
            check_positive("prec", *prec)?;
            if csv {
                return Err(no_csv("theta"));
            }
            Output::Json(serde_json::to_value(theta_series(*n, *prec)?.to_json())?)
        }
        Command::Basis { n, prec } => {
            check_positive("prec", *prec)?;
            if csv {
                return Err(no_csv("basis"));
            }
            let basis = basis_m_half(*n, *prec)?;
            Output::Json(Value::Array(
                basis
                    .iter()
                    .map(|b| Ok(json!({"d": b.d, "form": serde_json::to_value(b.form.to_json())?})))
                    .collect::<Result<_, serde_json::Error>>()?,
            ))
        }
        Command::Apply { input, op, arg } => {
            if csv {
                return Err(no_csv("apply"));
            }
            let f = read_expansion(input)?;
            let g = match op {
                Op::Sigma => apply_aut(&f, *arg)?,
                Op::T => hecke_tp(&f, *arg)?,
                Op::U => level_u(&f, *arg)?,
                Op::V => level_v(&f, *arg)?,
            };
            Output::Json(serde_json::to_value(g.to_json())?)
        }
        Command::Xi { input } => {
            if csv {
                return Err(no_csv("xi"));
            }
            Output::Json(serde_json::to_value(
                formal_xi(&read_expansion(input)?).to_json(),
            )?)
        }
        Command::Product { input, prec, weyl } => {
            check_positive("prec", *prec)?;
            let f = read_expansion(input)?;
            let weyl = match weyl {
                Some(w) => parse_rat(w)?,
                None => weyl_vector(&f)?,
            };
            let p = borcherds_product(&f, &weyl, *prec)?;
            if csv {
                csv_rows(
                    "n,exponent",
                    p.exponents
                        .iter()
                        .map(|(n, e)| format!("{n},{}", fmt_rat(e))),
                )
            } else {
                Output::Json(serde_json::to_value(p.to_json())?)
            }
        }
        Command::Eta { n, d, prec } => {
            check_positive("prec", *prec)?;
            if csv {
                return Err(no_csv("eta"));
            }
            Output::Json(serde_json::to_value(eta_product(*n, *d, *prec)?.to_json())?)
        }
        Command::Cusps { n } => {
            if csv {
                return Err(no_csv("cusps"));
            }
            Output::Json(serde_json::to_value(cusp_classes(*n)?)?)
        }
        Command::EtaOrders { n, d } => {
            let ds = match d {
                Some(d) => vec![*d],
                None => {
                    check_positive("N", *n)?;
                    divisors(*n)
                }
            };
            let mut rows = Vec::new();
            for &d in &ds {
                for c in divisors((*n).max(1)) {
                    rows.push((d, c, eta_order(*n, d, c)?));
                }
            }
            if csv {
                csv_rows(
                    "d,c,order",
                    rows.iter()
                        .map(|(d, c, o)| format!("{d},{c},{}", fmt_rat(o))),
                )
            } else {
                let mut by_d: BTreeMap<i64, Vec<(i64, String)>> = BTreeMap::new();
                for (d, c, o) in &rows {
                    by_d.entry(*d).or_default().push((*c, fmt_rat(o)));
                }
                Output::Json(json!({
                    "N": n,
                    "rows": by_d.into_iter().map(|(d, o)| json!({"d": d, "orders": o})).collect::<Vec<_>>(),
                }))
            }
        }
        Command::Dimension { n } => Output::Json(json!(cusp_space_dimension(*n)?)),
        Command::Solve { input } => {
            let j: CuspDivisorJson = serde_json::from_str(&read_input(input)?)?;
            let target = CuspDivisor::from_json(&j)?;
            let x = solve_cusp_matching(target.level(), &target)?;
            if csv {
                csv_rows("d,x", x.iter().map(|(d, v)| format!("{d},{}", fmt_rat(v))))
            } else {
                Output::Json(json!({
                    "N": target.level(),
                    "x": x.iter().map(|(d, v)| (*d, fmt_rat(v))).collect::<Vec<_>>(),
                }))
            }
        }
        Command::Heegner { n, disc, gamma } => {
            if csv {
                return Err(no_csv("heegner"));
            }
            match gamma {
                Some(g) => Output::Json(json!({
                    "N": n, "n": disc, "gamma": g,
                    "degree": fmt_rat(&heegner_degree(*n, *disc, *g)?),
                })),
                None => Output::Json(json!({
                    "N": n, "n": disc,
                    "degrees": heegner_degrees(*n, *disc)?
                        .iter()
                        .map(|(g, d)| (*g, fmt_rat(d)))
                        .collect::<Vec<_>>(),
                })),
            }
        }
        Command::Pipeline { input } => {
            if csv {
                return Err(no_csv("pipeline"));
            }
            let p: PipelineInput = serde_json::from_str(&read_input(input)?)?;
            let mut principal = BTreeMap::new();
            for (n, g, a) in p.principal {
                *principal.entry((n, g)).or_insert(0) += a;
            }
            let target = CuspDivisor::from_json(&p.cusp_target)?;
            Output::Json(converse_pipeline(p.level, &principal, &target)?.to_json())
        }
        Command::Verify {
            suite,
            n_max,
            prec,
            seed,
            samples,
            jobs,
        } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse()?]
            };
            let mut reports = Vec::new();
            for s in suites {
                let mut params = s.default_params();
                if let Some(v) = n_max {
                    check_positive("N-max", *v)?;
                    params.n_max = *v;
                }
                if let Some(v) = prec {
                    check_positive("prec", *v)?;
                    params.prec = *v;
                }
                if let Some(v) = samples {
                    params.samples = *v;
                }
                params.seed = *seed;
                params.jobs = *jobs;
                reports.push(verify::run(s, &params)?);
            }
            let passed = reports.iter().all(|r| r.passed());
            let value = json!({"passed": passed, "suites": reports});
            if !passed {
                let first = reports
                    .iter()
                    .flat_map(|r| r.failures.first())
                    .next()
                    .map(|f| f.to_string())
                    .unwrap_or_default();
                return Err(Failure::Verification(serde_json::to_string(&value)?, first));
            }
            Output::Json(value)
        }
    };
    Ok(out)
}

fn emit(cli: &Cli, text: &str) -> io::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        let text = match out {
            Output::Json(v) => format!("{}\n", serde_json::to_string(&v)?),
            Output::Text(s) => s,
        };
        emit(&cli, &text)?;
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(report, first)) => {
            let _ = emit(&cli, &format!("{report}\n"));
            eprintln!("verification failed; first mismatch: {first}");
            ExitCode::from(1)
        }
    }
}
