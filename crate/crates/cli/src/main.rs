//! `jetstrata`: command-line front end with JSON input and output.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jetstrata::experiments::{
    morse_classify, morse_perturbation_probe, sample_fiber, SampleConfig, SampleTarget,
};
use jetstrata::fredholm::{
    codim_jet_avoidance, codim_pullback, codim_pushforward, fredholm_index, LinearSetup,
};
use jetstrata::jet::{e_vectors, jet_frame, split_jet_and_fiber, FiberPoint, PolynomialMap};
use jetstrata::linalg::{
    brute_force_minimal, det, h_construction, minimal_submatrix, rank, v_construction,
    RationalMatrix, BRUTE_FORCE_LIMIT,
};
use jetstrata::multiindex::{jet_dims, level_coordinates};
use jetstrata::rational::{self, Rational};
use jetstrata::strata::{
    assemble_m, check_hypothesis, classify, degenerate_witness, random_instance, rotate_basis,
    theta, verify_core, StratumInstance,
};
use jetstrata::suite::{run_criterion, run_suite, SuiteReport, CRITERIA};

use io::{envelope, parse_point, write_output, CliError, CliResult, Inputs};

#[derive(Parser)]
#[command(
    name = "jetstrata",
    version,
    about = "Exact jet-space strata, certificates and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write JSON here instead of standard output. Relative paths go under
    /// $JETSTRATA_OUTPUT_DIR when it is set.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal non-singular submatrix M* = HV(M) = VH(M).
    Mstar {
        #[arg(long)]
        matrix: PathBuf,
        /// Also search all rank-sized submatrices (at most 7x7 inputs).
        #[arg(long)]
        brute_force: bool,
    },
    /// Dimensions of J^p and its fibers.
    Dims {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        q: usize,
        #[arg(short)]
        p: usize,
        /// List the coordinates of every level in precedence order.
        #[arg(long)]
        coordinates: bool,
    },
    /// Number of independent minor equations of the stratum of rank r.
    Theta {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        q: usize,
        #[arg(short)]
        p: usize,
        #[arg(short)]
        c: usize,
        #[arg(short)]
        r: usize,
    },
    /// The matrix M(a, V, z), or the split of a polynomial into (a, z).
    Assemble {
        #[arg(long, required_unless_present = "poly", conflicts_with = "poly")]
        instance: Option<PathBuf>,
        /// Fiber point to use instead of the instance's z0.
        #[arg(long, requires = "instance")]
        fiber: Option<PathBuf>,
        #[arg(long, requires = "order")]
        poly: Option<PathBuf>,
        /// Jet order p for --poly.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Rank of M(a, V, z) and membership of z in Z.
    Classify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        fiber: Option<PathBuf>,
    },
    /// Certificate that the stratum through z0 is cut out by theta minors.
    Verify {
        #[arg(long)]
        instance: PathBuf,
    },
    /// A degenerate instance; with --seed, a random one with rotated basis.
    Witness {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        q: usize,
        #[arg(short)]
        p: usize,
        #[arg(short)]
        c: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Uniform sampling of the fiber over an integer box.
    Sample {
        #[arg(long, conflicts_with_all = ["n", "q", "p", "c"])]
        config: Option<PathBuf>,
        #[arg(short, requires_all = ["q", "p", "c"])]
        n: Option<usize>,
        #[arg(short)]
        q: Option<usize>,
        #[arg(short)]
        p: Option<usize>,
        #[arg(short)]
        c: Option<usize>,
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Index of the restricted projection, or a codimension rule.
    Fredholm {
        #[arg(long, required_unless_present = "rule", conflicts_with = "rule")]
        setup: Option<PathBuf>,
        #[arg(long, value_enum, requires_all = ["d", "k"])]
        rule: Option<Rule>,
        /// Codimension of the set.
        #[arg(short, allow_negative_numbers = true)]
        d: Option<i64>,
        /// Index (pushforward), corank bound (pullback) or n (jet avoidance).
        #[arg(short, allow_negative_numbers = true)]
        k: Option<i64>,
    },
    /// Morse classification of a scalar polynomial at a point.
    Morse {
        #[arg(long)]
        poly: PathBuf,
        /// Comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Probe f + t·ℓ with ℓ given by these coefficients.
        #[arg(long, allow_hyphen_values = true)]
        probe: Option<String>,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long)]
        include_zero: bool,
    },
    /// Run the acceptance battery.
    Suite {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Run a single criterion (1..=9).
        #[arg(long)]
        criterion: Option<u8>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Pushforward,
    Pullback,
    JetAvoidance,
}

struct Outcome {
    command: &'static str,
    result: Value,
    summary: String,
    failed: bool,
}

fn ok(command: &'static str, result: Value, summary: String) -> CliResult<Outcome> {
    Ok(Outcome {
        command,
        result,
        summary,
        failed: false,
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn matrix_value(m: &RationalMatrix) -> Value {
    to_value(m)
}

fn vectors_value(vs: &[Vec<Rational>]) -> Value {
    Value::Array(
        vs.iter()
            .map(|v| {
                Value::Array(
                    v.iter()
                        .map(|x| Value::String(rational::format(x)))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn read_fiber(
    inputs: &mut Inputs,
    inst: &StratumInstance,
    fiber: Option<&Path>,
) -> CliResult<FiberPoint> {
    match fiber {
        Some(path) => inputs.read_json("fiber", path),
        None => Ok(inst.z0.clone()),
    }
}

fn run(command: Command, inputs: &mut Inputs) -> CliResult<Outcome> {
    match command {
        Command::Mstar {
            matrix,
            brute_force,
        } => {
            let m: RationalMatrix = inputs.read_json("matrix", &matrix)?;
            inputs.arg("brute_force", brute_force);
            let mstar = minimal_submatrix(&m);
            let mut result = to_value(&mstar);
            result["rank"] = json!(rank(&m));
            result["det"] = json!(rational::format(&det(&m.submatrix(&mstar))?));
            result["v_rows"] = json!(v_construction(&m).rows_one_based());
            result["h_cols"] = json!(h_construction(&m).cols_one_based());
            if brute_force {
                if m.rows().max(m.cols()) > BRUTE_FORCE_LIMIT {
                    return Err(CliError::Usage(format!(
                        "--brute-force accepts matrices up to {BRUTE_FORCE_LIMIT}x{BRUTE_FORCE_LIMIT}"
                    )));
                }
                let oracle = brute_force_minimal(&m)?;
                result["brute_force_agrees"] = json!(oracle == mstar);
            }
            let summary = format!(
                "M* rows {:?}, cols {:?}, rank {}",
                mstar.rows_one_based(),
                mstar.cols_one_based(),
                rank(&m)
            );
            ok("mstar", result, summary)
        }
        Command::Dims {
            n,
            q,
            p,
            coordinates,
        } => {
            inputs.arg("n", n);
            inputs.arg("q", q);
            inputs.arg("p", p);
            let d = jet_dims(n, q, p)?;
            let mut result = to_value(&d);
            if coordinates {
                let levels: Vec<Value> = (0..=p + 1)
                    .map(|k| {
                        json!(level_coordinates(n, q, k)
                            .iter()
                            .map(|c| c.key())
                            .collect::<Vec<_>>())
                    })
                    .collect();
                result["coordinates"] = Value::Array(levels);
            }
            let summary = format!("dim J^{p} = {}", d.dim_jet);
            ok("dims", result, summary)
        }
        Command::Theta { n, q, p, c, r } => {
            for (k, v) in [("n", n), ("q", q), ("p", p), ("c", c), ("r", r)] {
                inputs.arg(k, v);
            }
            let t = theta(n, q, p, c, r)?;
            ok("theta", json!({ "theta": t }), format!("theta = {t}"))
        }
        Command::Assemble {
            instance,
            fiber,
            poly,
            order,
        } => {
            if let Some(path) = poly {
                let f: PolynomialMap = inputs.read_json("poly", &path)?;
                let p = order.expect("clap requires --order with --poly");
                inputs.arg("order", p);
                let (a, z) = split_jet_and_fiber(&f, p)?;
                let result = json!({
                    "jet": to_value(&a),
                    "fiber": to_value(&z),
                    "e_vectors": vectors_value(&e_vectors(&a)),
                    "frame": vectors_value(&jet_frame(&a, &z)?),
                });
                return ok(
                    "assemble",
                    result,
                    format!("split into a {p}-jet and an order-{} fiber point", p + 1),
                );
            }
            let path = instance.expect("clap requires --instance without --poly");
            let inst: StratumInstance = inputs.read_json("instance", &path)?;
            let z = read_fiber(inputs, &inst, fiber.as_deref())?;
            let m = assemble_m(&inst.jet, &inst.v, &z)?;
            let hypothesis = check_hypothesis(&inst.jet, &inst.v)?;
            let summary = format!(
                "M is {}x{}, hypothesis {}",
                m.rows(),
                m.cols(),
                if hypothesis { "holds" } else { "fails" }
            );
            ok(
                "assemble",
                json!({ "matrix": matrix_value(&m), "hypothesis": hypothesis }),
                summary,
            )
        }
        Command::Classify { instance, fiber } => {
            let inst: StratumInstance = inputs.read_json("instance", &instance)?;
            let z = read_fiber(inputs, &inst, fiber.as_deref())?;
            let cls = classify(&inst.jet, &inst.v, &z)?;
            let mut result = to_value(&cls);
            result["dim_jet"] = json!(inst.dims().dim_jet);
            let summary = format!(
                "rank {} of {}, in Z: {}",
                cls.rank,
                inst.dims().dim_jet,
                cls.in_z
            );
            ok("classify", result, summary)
        }
        Command::Verify { instance } => {
            let inst: StratumInstance = inputs.read_json("instance", &instance)?;
            let report = verify_core(&inst)?;
            let summary = format!(
                "{}: theta = {}, rank = {}{}",
                if report.passed { "PASS" } else { "FAIL" },
                report.theta,
                report.rank,
                if report.failures.is_empty() {
                    String::new()
                } else {
                    format!(", failed checks {:?}", report.failures)
                }
            );
            let mut result = to_value(&report);
            result["status"] = json!(if report.passed { "PASS" } else { "FAIL" });
            Ok(Outcome {
                command: "verify",
                result,
                summary,
                failed: !report.passed,
            })
        }
        Command::Witness { n, q, p, c, seed } => {
            for (k, v) in [("n", n), ("q", q), ("p", p), ("c", c)] {
                inputs.arg(k, v);
            }
            let inst = match seed {
                None => degenerate_witness(n, q, p, c)?,
                Some(seed) => {
                    inputs.arg("seed", seed);
                    use rand::SeedableRng;
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                    let inst = random_instance(n, q, p, c, &mut rng)?;
                    rotate_basis(&inst, &mut rng)?
                }
            };
            let r = classify(&inst.jet, &inst.v, &inst.z0)?.rank;
            let mut result = to_value(&inst);
            result["m"] = json!(inst.v.dim());
            result["c"] = json!(inst.codim());
            result["rank"] = json!(r);
            ok(
                "witness",
                result,
                format!("instance with dim V = {}, rank M(z0) = {r}", inst.v.dim()),
            )
        }
        Command::Sample {
            config,
            n,
            q,
            p,
            c,
            count,
            bound,
            seed,
            jobs,
        } => {
            let mut cfg = match config {
                Some(path) => inputs.read_json::<SampleConfig>("config", &path)?,
                None => {
                    let (Some(n), Some(q), Some(p), Some(c)) = (n, q, p, c) else {
                        return Err(CliError::Usage(
                            "sample needs --config or all of -n -q -p -c".into(),
                        ));
                    };
                    let seed = seed.ok_or_else(|| {
                        CliError::Usage("sample needs --seed without --config".into())
                    })?;
                    SampleConfig::witness(n, q, p, c, 10_000, 100, seed)
                }
            };
            if let Some(count) = count {
                cfg.count = count;
            }
            if let Some(bound) = bound {
                cfg.bound = bound;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            inputs.arg(
                "config",
                serde_json::to_string(&cfg).expect("configs serialize"),
            );
            if jobs == 0 {
                return Err(CliError::Usage("--jobs must be at least 1".into()));
            }
            let report = sample_fiber(&cfg, jobs)?;
            let mut result = to_value(&report);
            if let SampleTarget::Witness { c, .. } = cfg.target {
                result["c"] = json!(c);
            }
            let summary = format!(
                "{} of {} samples in Z (fraction {})",
                report.hits_in_z, report.total, report.hit_fraction
            );
            ok("sample", result, summary)
        }
        Command::Fredholm { setup, rule, d, k } => {
            if let Some(path) = setup {
                let s: LinearSetup = inputs.read_json("setup", &path)?;
                let report = fredholm_index(&s)?;
                let summary = format!(
                    "index {} (k onto: {}, l0 onto: {})",
                    report.index, report.k_onto, report.l0_onto
                );
                return ok("fredholm", to_value(&report), summary);
            }
            let (rule, d, k) = (rule.expect("clap"), d.expect("clap"), k.expect("clap"));
            inputs.arg("d", d);
            inputs.arg("k", k);
            let (name, codim) = match rule {
                Rule::Pushforward => ("pushforward", codim_pushforward(d, k)?),
                Rule::Pullback => ("pullback", codim_pullback(d, k)?),
                Rule::JetAvoidance => ("jet_avoidance", codim_jet_avoidance(d, k)?),
            };
            inputs.arg("rule", name);
            ok(
                "fredholm",
                json!({ "rule": name, "codim": codim }),
                format!("{name}: codimension {codim}"),
            )
        }
        Command::Morse {
            poly,
            point,
            probe,
            steps,
            include_zero,
        } => {
            let f: PolynomialMap = inputs.read_json("poly", &poly)?;
            let x = parse_point("point", &point)?;
            inputs.arg("point", &point);
            let class = morse_classify(&f, &x)?;
            let mut result = json!({ "class": to_value(&class) });
            let mut summary = format!("{class:?}");
            if let Some(direction) = probe {
                let ell = parse_point("probe", &direction)?;
                inputs.arg("probe", &direction);
                inputs.arg("steps", steps);
                inputs.arg("include_zero", include_zero);
                let report = morse_perturbation_probe(&f, &x, &ell, steps, include_zero)?;
                summary.push_str(&format!(
                    "; probe: {} degenerate among {}",
                    report.degenerate_count, report.total
                ));
                result["probe"] = to_value(&report);
            }
            ok("morse", result, summary)
        }
        Command::Suite {
            seed,
            jobs,
            criterion,
        } => {
            if jobs == 0 {
                return Err(CliError::Usage("--jobs must be at least 1".into()));
            }
            inputs.arg("seed", seed);
            let report = match criterion {
                None => run_suite(seed, jobs)?,
                Some(id) => {
                    inputs.arg("criterion", id);
                    let outcome = run_criterion(id, seed, jobs)?;
                    SuiteReport {
                        seed: seed.to_string(),
                        passed: outcome.passed,
                        criteria: vec![outcome],
                    }
                }
            };
            let mut summary = String::from(" id  criterion                  cases  status\n");
            for c in &report.criteria {
                summary.push_str(&format!(
                    "{:>3}  {:<25} {:>6}  {}\n",
                    c.id,
                    c.name,
                    c.cases,
                    if c.passed {
                        "PASS".to_string()
                    } else {
                        format!("FAIL ({})", c.detail)
                    }
                ));
            }
            summary.push_str(&format!(
                "{} of {} criteria passed",
                report.criteria.iter().filter(|c| c.passed).count(),
                report.criteria.len().min(CRITERIA.len())
            ));
            Ok(Outcome {
                command: "suite",
                failed: !report.passed,
                result: to_value(&report),
                summary,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut inputs = Inputs::default();
    match run(cli.command, &mut inputs) {
        Ok(outcome) => {
            let value = envelope(outcome.command, inputs.digest(), outcome.result);
            if let Err(e) = write_output(&value, cli.output.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            eprintln!("{}", outcome.summary);
            if outcome.failed {
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
