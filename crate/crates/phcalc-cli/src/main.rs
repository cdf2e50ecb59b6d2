//! phcalc: workbench for the positively homogeneous function calculus.
//!
//! Every verb prints one report to stdout. Exit code 0 means success (and,
//! for verification verbs, a passing report); 1 means a failed verification
//! or an operational error; 2 is a usage error.

mod literals;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use phcalc_core::approx::{krivine_approximate_with, ApproxCertificate, ApproxOptions};
use phcalc_core::calculus::{
    apply_calculus, apply_direct, apply_quotient_calculus, verify_composition,
};
use phcalc_core::counterexamples::{
    density_construction, finitely_uc_probe, lex_obstruction, lex_obstruction_sweep,
    not_uniformly_complete_witness, obstruction_grid, ObstructionCandidate, ObstructionOutcome,
};
use phcalc_core::lp::nf_sup;
use phcalc_core::models::{LatticeElement, ModelKind};
use phcalc_core::phfn::PHFunction;
use phcalc_core::rat::{parse_rat, rat_int, rat_str};
use phcalc_core::sigma::{
    axiom_suite, kernel_nonclosed_witness, reconstruction_fidelity, Corruption, SigmaOracle,
};
use phcalc_core::sphere::{sup_norm_bound, SphereNet};
use phcalc_core::{normalize, Error, Term};

#[derive(Parser)]
#[command(
    name = "phcalc",
    version,
    about = "Exact and certified computation in the positively homogeneous function calculus"
)]
struct Cli {
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normalize a lattice-linear term to its max-min normal form
    Normalize {
        /// Number of variables
        #[arg(short = 'n', long = "arity")]
        arity: usize,
        /// Term over p1..pN, e.g. "p1 + (p2 v 0)"
        term: String,
    },
    /// Evaluate a term exactly at a rational point
    Eval {
        #[arg(short = 'n', long = "arity")]
        arity: usize,
        term: String,
        /// Evaluation point, e.g. "1,2,-1/2"
        #[arg(long)]
        at: String,
    },
    /// Build a certified max-min approximant of a positively homogeneous target
    Approx(ApproxArgs),
    /// Apply a function to a tuple through the calculus
    Calculus(CalculusArgs),
    /// Check the composition law on a tuple
    VerifyComp(VerifyArgs),
    /// Audit the lattice axioms of a supremum oracle
    Axioms(AxiomArgs),
    /// Replay a structural counterexample
    Demo {
        #[command(subcommand)]
        which: DemoCmd,
    },
    /// Bound the sup norm of a term over the unit sphere
    Probe {
        #[arg(short = 'n', long = "arity")]
        arity: usize,
        term: String,
        /// Net mesh for the interval bound
        #[arg(long, default_value = "1/10")]
        mesh: String,
        /// Also compute the exact supremum by face enumeration
        #[arg(long)]
        exact: bool,
    },
}

#[derive(Args)]
struct ApproxArgs {
    /// Target: "euclid", "pnorm", "coord:<i>", or a term over p1..pN
    #[arg(long, default_value = "euclid")]
    target: String,
    #[arg(short = 'n', long = "arity", default_value_t = 2)]
    arity: usize,
    /// Certified error tolerance
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Exponent for the pnorm target
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Weights for the pnorm target, e.g. "1,2,1"
    #[arg(long)]
    weights: Option<String>,
    /// Construction net size cap
    #[arg(long)]
    max_points: Option<usize>,
    /// Write the certificate to this file as JSON
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-verify a stored certificate instead of building one
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct CalculusArgs {
    #[arg(long)]
    model: String,
    /// Tuple literal, e.g. "[3,0,-3];[4,0,4]" or "(1,0);(0,1)"
    #[arg(long)]
    x: String,
    /// Function to apply: target spec as in approx
    #[arg(long)]
    g: String,
    /// Tolerance for the certified approximate mode
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long)]
    weights: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    x: String,
    /// Outer function over m variables
    #[arg(long)]
    g: String,
    /// Inner terms over the tuple's variables, semicolon separated
    #[arg(long)]
    fs: String,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long)]
    weights: Option<String>,
}

#[derive(Args)]
struct AxiomArgs {
    #[arg(long)]
    model: String,
    /// Deliberately corrupt the oracle: sum, left, meet, or shift
    #[arg(long)]
    corrupt: Option<String>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dimension for finite vectors
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Also compare the derived order against the native one
    #[arg(long)]
    fidelity: bool,
}

#[derive(Subcommand)]
enum DemoCmd {
    /// The lex plane admits no calculus: two-route contradiction
    Lex {
        /// Second evaluation point, e.g. "(0,1)"
        #[arg(long, default_value = "(0,1)")]
        t: String,
        /// Second weight; defaults to the forced 1/t2
        #[arg(long)]
        c2: Option<String>,
    },
    /// Sweep a candidate grid; no candidate survives
    Sweep {
        /// Points per sphere face
        #[arg(long, default_value_t = 850)]
        per_face: usize,
    },
    /// The kernel of the germ evaluation is not closed
    Kernel {
        /// Indices m to test, comma separated
        #[arg(long, default_value = "1,2,3,4,5,8,10,100,1000")]
        ms: String,
    },
    /// A Cauchy sequence in the sublattice with no limit inside
    Cauchy {
        #[arg(long, default_value = "1,2,4,8,16,64,256,1000")]
        ms: String,
    },
    /// Approximate a PL function by a sublattice member
    Density {
        /// Function to approximate, breakpoint literal
        #[arg(long, default_value = "0:0,1:1")]
        f: String,
        #[arg(long, default_value = "1/4")]
        eps: String,
    },
    /// Term images of flat-prefix functions keep the common flat prefix
    Fuc {
        /// Members to generate from, semicolon-separated PL literals
        #[arg(long, default_value = "0:1/3,1/2:1/3,1:2;0:-1,1/4:-1,1:3")]
        fs: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            emit_error(cli.format, &e);
            ExitCode::from(1)
        }
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<&'a str>,
}

/// Write one line to stdout, tolerating a closed pipe.
fn emit_line(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{s}");
}

fn emit_error(format: Format, e: &Error) {
    let kind = match e {
        Error::Parse(_) => Some("parse"),
        Error::Arity(_) | Error::Dimension(_) => Some("shape"),
        Error::Model(_) => Some("model"),
        Error::Resource { .. } => Some("resource"),
        _ => None,
    };
    match format {
        Format::Json => {
            let report = ErrorReport {
                error: e.to_string(),
                kind,
            };
            emit_line(&serde_json::to_string(&report).expect("string fields"));
        }
        Format::Text => eprintln!("error: {e}"),
    }
}

fn print_report<T: Serialize>(format: Format, report: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => emit_line(&serde_json::to_string(report).expect("reports serialize")),
        Format::Text => emit_line(&text()),
    }
}

fn pass_code(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn build_target(
    spec: &str,
    arity: usize,
    p: f64,
    weights: Option<&str>,
) -> Result<PHFunction, Error> {
    match spec {
        "euclid" => PHFunction::euclidean(arity),
        "pnorm" => {
            let w = match weights {
                Some(src) => literals::parse_point(src)?,
                None => vec![rat_int(1); arity],
            };
            PHFunction::pnorm(arity, p, w)
        }
        other => {
            if let Some(idx) = other.strip_prefix("coord:") {
                let i: usize = idx
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coordinate index {idx:?}")))?;
                PHFunction::coordinate(arity, i)
            } else {
                PHFunction::from_term(&Term::parse(arity, other)?)
            }
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let format = cli.format;
    match &cli.cmd {
        Cmd::Normalize { arity, term } => {
            let t = Term::parse(*arity, term)?;
            let nf = normalize(&t)?;
            print_report(format, &nf, || {
                format!(
                    "term: {t}\nnormal form: {}\nclauses: {}, forms: {}",
                    nf.to_term(),
                    nf.clause_count(),
                    nf.form_count()
                )
            });
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Eval { arity, term, at } => {
            let t = Term::parse(*arity, term)?;
            let point = literals::parse_point(at)?;
            let value = t.eval(&point)?;
            let nf_value = normalize(&t)?.eval(&point)?;
            #[derive(Serialize)]
            struct EvalReport {
                term: String,
                at: Vec<String>,
                value: String,
                nf_value: String,
                agree: bool,
            }
            let report = EvalReport {
                term: format!("{t}"),
                at: point.iter().map(rat_str).collect(),
                value: rat_str(&value),
                nf_value: rat_str(&nf_value),
                agree: value == nf_value,
            };
            let pass = report.agree;
            print_report(format, &report, || {
                format!("{t} at ({at}) = {}", report.value)
            });
            Ok(pass_code(pass))
        }
        Cmd::Approx(args) => run_approx(format, args),
        Cmd::Calculus(args) => run_calculus(format, args),
        Cmd::VerifyComp(args) => run_verify(format, args),
        Cmd::Axioms(args) => run_axioms(format, args),
        Cmd::Demo { which } => run_demo(format, which),
        Cmd::Probe {
            arity,
            term,
            mesh,
            exact,
        } => {
            let t = Term::parse(*arity, term)?;
            let nf = normalize(&t)?;
            let net = SphereNet::new(*arity, &parse_rat(mesh)?)?;
            let (lo, hi) = sup_norm_bound(&nf, &net)?;
            #[derive(Serialize)]
            struct ProbeOut {
                term: String,
                n: usize,
                net_points: usize,
                lower: String,
                upper: String,
                #[serde(skip_serializing_if = "Option::is_none")]
                exact: Option<String>,
            }
            let exact_sup = exact.then(|| nf_sup(&nf));
            let report = ProbeOut {
                term: format!("{t}"),
                n: *arity,
                net_points: net.len(),
                lower: rat_str(&lo),
                upper: rat_str(&hi),
                exact: exact_sup.as_ref().map(rat_str),
            };
            print_report(format, &report, || {
                let mut line = format!(
                    "sup |{t}| over the sphere: in [{}, {}] ({} net points)",
                    report.lower, report.upper, report.net_points
                );
                if let Some(e) = &report.exact {
                    line.push_str(&format!(", exactly {e}"));
                }
                line
            });
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_approx(format: Format, args: &ApproxArgs) -> Result<ExitCode, Error> {
    if let Some(path) = &args.replay {
        let src = fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        let cert: ApproxCertificate =
            serde_json::from_str(&src).map_err(|e| Error::Parse(format!("bad certificate: {e}")))?;
        let target = PHFunction::from_descriptor(&cert.target)?;
        let replayed = cert.replay(&target)?;
        #[derive(Serialize)]
        struct ReplayReport {
            stored_eps: f64,
            replayed_eps: f64,
            matches: bool,
        }
        let report = ReplayReport {
            stored_eps: cert.epsilon,
            replayed_eps: replayed,
            matches: replayed == cert.epsilon,
        };
        let pass = report.matches;
        print_report(format, &report, || {
            format!(
                "stored {} vs replayed {}: {}",
                report.stored_eps,
                report.replayed_eps,
                if pass { "match" } else { "MISMATCH" }
            )
        });
        return Ok(pass_code(pass));
    }

    let target = build_target(&args.target, args.arity, args.p, args.weights.as_deref())?;
    let opts = match args.max_points {
        Some(cap) => ApproxOptions {
            max_construction_points: cap,
        },
        None => ApproxOptions::default(),
    };
    let cert = krivine_approximate_with(&target, args.eps, &opts)?;
    if let Some(path) = &args.out {
        let body = serde_json::to_string_pretty(&cert).expect("certificate serializes");
        fs::write(path, body)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
    }
    print_report(format, &cert, || {
        format!(
            "certified |target - approximant| <= {:.6e} (requested {:.1e})\nnet step {}, {} clauses, {} interpolants",
            cert.epsilon,
            args.eps,
            rat_str(&cert.net_step),
            cert.clause_count,
            cert.interpolant_count
        )
    });
    Ok(ExitCode::SUCCESS)
}

fn run_calculus(format: Format, args: &CalculusArgs) -> Result<ExitCode, Error> {
    let model = ModelKind::parse(&args.model)?;
    let x = literals::parse_tuple(model, &args.x)?;
    let g = build_target(&args.g, x.len(), args.p, args.weights.as_deref())?;
    if model == ModelKind::Germ {
        let value = apply_quotient_calculus(&x, &g)?;
        #[derive(Serialize)]
        struct QuotientReport {
            value: String,
            mode: &'static str,
        }
        let report = QuotientReport {
            value: value.to_string(),
            mode: "exact",
        };
        print_report(format, &report, || format!("value: {value} (exact)"));
        return Ok(ExitCode::SUCCESS);
    }
    match args.eps {
        Some(eps) => {
            let result = apply_calculus(&x, &g, eps)?;
            print_report(format, &result, || {
                format!(
                    "value: {}\nmode: {:?}, error bound {}",
                    result.value,
                    result.mode,
                    rat_str(&result.error_bound)
                )
            });
            Ok(ExitCode::SUCCESS)
        }
        None => {
            let value = apply_direct(&x, &g)?;
            #[derive(Serialize)]
            struct DirectReport {
                value: String,
                mode: &'static str,
            }
            let report = DirectReport {
                value: value.to_string(),
                mode: "direct",
            };
            print_report(format, &report, || format!("value: {value} (direct)"));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_verify(format: Format, args: &VerifyArgs) -> Result<ExitCode, Error> {
    let model = ModelKind::parse(&args.model)?;
    let x = literals::parse_tuple(model, &args.x)?;
    let inner: Vec<PHFunction> = args
        .fs
        .split(';')
        .map(|src| PHFunction::from_term(&Term::parse(x.len(), src.trim())?))
        .collect::<Result<_, Error>>()?;
    let g = build_target(&args.g, inner.len(), args.p, args.weights.as_deref())?;
    let report = verify_composition(&x, &g, &inner, args.eps)?;
    let pass = report.pass;
    print_report(format, &report, || {
        format!(
            "lhs: {}\nrhs: {}\ndiscrepancy: {} (budget {}): {}",
            report.lhs,
            report.rhs,
            report
                .discrepancy
                .as_ref()
                .map(rat_str)
                .unwrap_or_else(|| "n/a".into()),
            rat_str(&report.budget),
            if pass { "PASS" } else { "FAIL" }
        )
    });
    Ok(pass_code(pass))
}

fn run_axioms(format: Format, args: &AxiomArgs) -> Result<ExitCode, Error> {
    let model = ModelKind::parse(&args.model)?;
    let oracle = match &args.corrupt {
        Some(c) => SigmaOracle::corrupted(model, Corruption::parse(c)?),
        None => SigmaOracle::from_model(model),
    };
    let axioms = axiom_suite(&oracle, args.trials, args.seed, args.dim)?;
    if args.fidelity {
        let fid = reconstruction_fidelity(&oracle, args.trials, args.seed, args.dim)?;
        #[derive(Serialize)]
        struct Combined<'a> {
            axioms: &'a phcalc_core::sigma::AxiomReport,
            fidelity: &'a phcalc_core::sigma::FidelityReport,
        }
        let pass = axioms.all_pass && fid.pass;
        let report = Combined {
            axioms: &axioms,
            fidelity: &fid,
        };
        print_report(format, &report, || {
            format!(
                "axioms: {}, fidelity: {}/{} agree",
                if axioms.all_pass { "all pass" } else { "FAILURES" },
                fid.agreements,
                fid.trials
            )
        });
        return Ok(pass_code(pass));
    }
    let pass = axioms.all_pass;
    print_report(format, &axioms, || {
        let mut lines = vec![format!(
            "oracle {} on {}: {}",
            axioms.oracle,
            axioms.model,
            if pass { "all axioms pass" } else { "FAILURES" }
        )];
        for c in &axioms.checks {
            let mut line = format!("  {}: {}", c.name, if c.pass { "pass" } else { "FAIL" });
            if let Some(w) = &c.witness {
                line.push_str(&format!(" at ({})", w.join(", ")));
            }
            lines.push(line);
        }
        lines.join("\n")
    });
    Ok(pass_code(pass))
}

fn run_demo(format: Format, which: &DemoCmd) -> Result<ExitCode, Error> {
    match which {
        DemoCmd::Lex { t, c2 } => {
            let point = match LatticeElement::parse(ModelKind::Lex, t)? {
                LatticeElement::Lex(a, b) => (a, b),
                _ => unreachable!("lex parse"),
            };
            let weight = match c2 {
                Some(src) => parse_rat(src)?,
                None => {
                    if point.1 > rat_int(0) {
                        rat_int(1) / point.1.clone()
                    } else {
                        rat_int(1)
                    }
                }
            };
            let cand = ObstructionCandidate::new(rat_int(1), (rat_int(1), rat_int(0)), weight, point)?;
            match lex_obstruction(&cand) {
                ObstructionOutcome::Certified(cert) => {
                    let pass = cert.contradiction;
                    print_report(format, &cert, || {
                        format!(
                            "f = {}\nroute A (calculus): {}\nroute B (point form): {}\ncontradiction: {}",
                            cert.term, cert.route_a, cert.route_b, pass
                        )
                    });
                    Ok(pass_code(pass))
                }
                ObstructionOutcome::Rejected {
                    forced_equation,
                    detail,
                } => {
                    #[derive(Serialize)]
                    struct Rejection {
                        outcome: &'static str,
                        forced_equation: String,
                        detail: String,
                    }
                    let report = Rejection {
                        outcome: "rejected",
                        forced_equation: forced_equation.clone(),
                        detail: detail.clone(),
                    };
                    print_report(format, &report, || {
                        format!("candidate rejected: {forced_equation} ({detail})")
                    });
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        DemoCmd::Sweep { per_face } => {
            let grid = obstruction_grid(*per_face);
            let summary = lex_obstruction_sweep(&grid);
            let pass = summary.survivors == 0;
            print_report(format, &summary, || {
                format!(
                    "{} candidates: {} rejected, {} refuted, {} survivors",
                    summary.candidates, summary.rejected, summary.certified, summary.survivors
                )
            });
            Ok(pass_code(pass))
        }
        DemoCmd::Kernel { ms } => {
            let ms = literals::parse_ms(ms)?;
            let report = kernel_nonclosed_witness(&ms)?;
            let pass = report.pass;
            print_report(format, &report, || {
                let mut lines = vec![
                    format!("limit f = {} with image {}", report.limit_term, report.image),
                    format!("family f_m = {}", report.family_term),
                ];
                for s in &report.stages {
                    lines.push(format!(
                        "  m = {}: in kernel {}, ||f - f_m|| = {}, m*image below unit {}",
                        s.m, s.in_kernel, s.distance, s.scaled_below_unit
                    ));
                }
                lines.push(format!("pass: {pass}"));
                lines.join("\n")
            });
            Ok(pass_code(pass))
        }
        DemoCmd::Cauchy { ms } => {
            let ms = literals::parse_ms(ms)?;
            let report = not_uniformly_complete_witness(&ms);
            let pass = report.pass;
            print_report(format, &report, || {
                let mut lines = vec![format!(
                    "h(t) = t, in the sublattice: {}",
                    report.h_in_x
                )];
                for s in &report.stages {
                    lines.push(format!(
                        "  g_{}: member {}, ||h - g_m|| = {}",
                        s.m, s.in_x, s.distance
                    ));
                }
                lines.push(format!("pass: {pass}"));
                lines.join("\n")
            });
            Ok(pass_code(pass))
        }
        DemoCmd::Density { f, eps } => {
            let f = literals::parse_pl(f)?;
            let eps = parse_rat(eps)?;
            let report = density_construction(&f, &eps)?;
            let pass = report.pass;
            print_report(format, &report, || {
                format!(
                    "delta = {}, flat value {}, sup error {} (<= {}): {}",
                    report.delta,
                    report.flat_value,
                    report.sup_error,
                    report.eps,
                    if pass { "PASS" } else { "FAIL" }
                )
            });
            Ok(pass_code(pass))
        }
        DemoCmd::Fuc { fs, trials, seed } => {
            let members = literals::parse_pl_list(fs)?;
            let report = finitely_uc_probe(&members, *trials, *seed)?;
            let pass = report.pass;
            print_report(format, &report, || {
                format!(
                    "{} members, delta = {}, unit level {}: {}/{} term images flat: {}",
                    report.n,
                    report.delta,
                    report.unit_level,
                    if report.all_flat { report.trials } else { 0 },
                    report.trials,
                    if pass { "PASS" } else { "FAIL" }
                )
            });
            Ok(pass_code(pass))
        }
    }
}
