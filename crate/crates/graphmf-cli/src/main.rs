//! graphmf: manifest checks, certificates and deterministic reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use graphmf::bass_serre::{self, AcylVerdict};
use graphmf::equiv::{self, Pregraph};
use graphmf::filling::{self, BoundExpr};
use graphmf::manifest::{self, matrix_from_json};
use graphmf::obstruction::{self, TwistedDoubleInput};
use graphmf::{Error, GraphManifold};

use graphmf_cli::report::{InputDigest, Report};

#[derive(Parser)]
#[command(
    name = "graphmf",
    version,
    about = "Combinatorial checks for high-dimensional graph manifolds"
)]
struct Cli {
    /// Write the full JSON report to this path.
    #[arg(long, global = true, value_name = "OUT.json")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a manifest and summarize its structure.
    Validate { path: PathBuf },
    /// Per-gluing transversality and the irreducibility verdict.
    Check { path: PathBuf },
    /// Group-property classification of the fundamental group.
    Classify { path: PathBuf },
    /// Acylindricity bound for the action on the Bass-Serre tree.
    Acyl {
        path: PathBuf,
        /// Longest path shape to examine.
        #[arg(long = "max-len", default_value_t = 3)]
        max_len: usize,
    },
    /// Decide equivalence of two gluing patterns at one edge.
    Equiv {
        path: PathBuf,
        #[arg(long)]
        edge: usize,
        /// JSON file with {"p": [[..]], "p_prime": [[..]]}.
        #[arg(long)]
        patterns: PathBuf,
    },
    /// Generate pairwise inequivalent irreducible gluing patterns.
    Generate {
        path: PathBuf,
        #[arg(long)]
        edge: usize,
        #[arg(long)]
        count: usize,
        /// Write the generated patterns to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a CAT(0) obstruction certificate.
    Obstruct {
        path: PathBuf,
        /// monodromy | euler | twisted-double
        #[arg(long)]
        kind: ObstructKind,
        /// Write the constructed manifest (twisted-double only).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quasi-isometry and isomorphism necessary conditions for two manifests.
    Invariant { path_a: PathBuf, path_b: PathBuf },
    /// Compose per-piece filling bounds across the decomposition.
    Dehn {
        path: PathBuf,
        #[command(flatten)]
        constants: DehnConstants,
        /// Optional JSON file with {"bounds": [...]}; defaults to a
        /// quadratic bound per piece (pieces carry nonpositively curved
        /// product metrics).
        #[arg(long)]
        bounds: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DehnConstants {
    #[arg(long, default_value = "1")]
    lambda: u64,
    #[arg(long = "C", default_value = "1")]
    c: u64,
    #[arg(long = "K", default_value = "1")]
    k: u64,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ObstructKind {
    Monodromy,
    Euler,
    #[value(name = "twisted-double")]
    TwistedDouble,
}

fn read_input(path: &PathBuf) -> Result<(String, InputDigest), Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {}", path.display(), e)))?;
    let digest = InputDigest::new(path, &text);
    Ok((text, digest))
}

fn load_manifold(
    path: &PathBuf,
) -> Result<(GraphManifold, InputDigest, manifest::Manifest), Error> {
    let (text, digest) = read_input(path)?;
    let parsed = manifest::parse(&text)?;
    let manifold = graphmf::model::validate(&parsed)?;
    Ok((manifold, digest, parsed))
}

fn max_cycle_len() -> usize {
    std::env::var("GRAPHMF_MAX_CYCLE_LEN")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(obstruction::DEFAULT_MAX_CYCLE_LEN)
}

fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Validate { path } => {
            let (m, digest, _) = load_manifold(path)?;
            let result = json!({
                "valid": true,
                "n": m.n,
                "pieces": m.pieces.len(),
                "gluings": m.gluings.len(),
                "closed": m.is_closed(),
                "internal_walls": m.internal_wall_count(),
                "boundary_walls": m.boundary_wall_count(),
            });
            let mut report = Report::new("validate", vec![digest], result);
            report.summary = format!(
                "valid: {} pieces, {} gluings, closed: {}",
                m.pieces.len(),
                m.gluings.len(),
                m.is_closed()
            );
            Ok(report)
        }
        Command::Check { path } => {
            let (m, digest, _) = load_manifold(path)?;
            let (irreducible, failing) = m.is_irreducible()?;
            let per_gluing: Vec<Value> = (0..m.gluings.len())
                .map(|k| {
                    let (transverse, witness) = m.gluing_is_transverse(k)?;
                    Ok(json!({
                        "gluing": k,
                        "transverse": transverse,
                        "witness_rank": witness.rank(),
                    }))
                })
                .collect::<Result<_, Error>>()?;
            let result = json!({
                "irreducible": irreducible,
                "failing_gluings": failing,
                "gluings": per_gluing,
                "has_transverse_pair": m.has_transverse_pair()?,
            });
            let mut report = Report::new("check", vec![digest], result);
            report.summary = if irreducible {
                "irreducible: true".to_string()
            } else {
                let names: Vec<String> = failing
                    .iter()
                    .map(|&k| {
                        let g = &m.gluings[k];
                        format!(
                            "#{} ({}.{} -> {}.{})",
                            k, g.from.0, g.from.1, g.to.0, g.to.1
                        )
                    })
                    .collect();
                format!("irreducible: false; failing gluings: {}", names.join(", "))
            };
            Ok(report)
        }
        Command::Classify { path } => {
            let (m, digest, _) = load_manifold(path)?;
            let props = m.classify_properties()?;
            let result = serde_json::to_value(&props).expect("report serializes");
            let mut report = Report::new("classify", vec![digest], result);
            report.summary = format!(
                "simplicial_volume_zero: {}; cstar_simple: {}; sq_universal_guaranteed: {}; relatively_hyperbolic: {}; thick_order_one: {}; cohopf_hypothesis: {}",
                props.simplicial_volume_zero.value,
                props.cstar_simple.value,
                props.sq_universal_guaranteed.value,
                props.relatively_hyperbolic.value,
                props.thick_order_one.value,
                props.cohopf_hypothesis.value,
            );
            Ok(report)
        }
        Command::Acyl { path, max_len } => {
            let (m, digest, _) = load_manifold(path)?;
            let verdict = bass_serre::check_acylindricity(&m, *max_len)?;
            let (summary, result) = match &verdict {
                AcylVerdict::Bounded { k, witness } => (
                    format!("acylindrical with K = {}", k),
                    json!({
                        "bounded": true,
                        "k": k,
                        "longest_violating_shape": witness,
                    }),
                ),
                AcylVerdict::UnboundedWithin { max_len, violating } => (
                    format!("no bound found up to length {}", max_len),
                    json!({
                        "bounded": false,
                        "max_len": max_len,
                        "violating_shape": violating,
                    }),
                ),
            };
            let mut report = Report::new("acyl", vec![digest], result);
            report.summary = summary;
            Ok(report)
        }
        Command::Equiv {
            path,
            edge,
            patterns,
        } => {
            let (m, digest, parsed) = load_manifold(path)?;
            let (ptext, pdigest) = read_input(patterns)?;
            let pv: Value = serde_json::from_str(&ptext)
                .map_err(|e| Error::input(format!("invalid JSON in patterns file: {}", e)))?;
            let obj = pv
                .as_object()
                .ok_or_else(|| Error::input("patterns file must be a JSON object"))?;
            for key in obj.keys() {
                if key != "p" && key != "p_prime" {
                    return Err(Error::input(format!(
                        "unknown key {:?} in patterns file",
                        key
                    )));
                }
            }
            let p = matrix_from_json(
                obj.get("p")
                    .ok_or_else(|| Error::input("patterns file is missing \"p\""))?,
                "p",
            )?;
            let p_prime = matrix_from_json(
                obj.get("p_prime")
                    .ok_or_else(|| Error::input("patterns file is missing \"p_prime\""))?,
                "p_prime",
            )?;
            let pre = Pregraph::from_manifold(&m, &parsed.theta)?;
            let (equivalent, witness) =
                equiv::gluing_patterns_equivalent(&pre, *edge, &p, &p_prime)?;
            let result = json!({
                "edge": edge,
                "equivalent": equivalent,
                "witness": witness,
            });
            let mut report = Report::new("equiv", vec![digest, pdigest], result);
            report.summary = format!("equivalent: {}", equivalent);
            Ok(report)
        }
        Command::Generate {
            path,
            edge,
            count,
            out,
        } => {
            let (m, digest, parsed) = load_manifold(path)?;
            let pre = Pregraph::from_manifold(&m, &parsed.theta)?;
            let family = equiv::generate_distinct_family(&pre, *edge, *count)?;
            // sanity: every generated pattern must give an irreducible manifold
            for pattern in &family {
                let built = equiv::manifold_with_pattern(&m, pattern)?;
                if !built.is_irreducible()?.0 {
                    return Err(Error::internal("generated pattern is not irreducible"));
                }
            }
            let patterns_json: Vec<Value> = family
                .iter()
                .map(|p| serde_json::to_value(p).expect("pattern serializes"))
                .collect();
            if let Some(out) = out {
                std::fs::write(out, serde_json::to_string_pretty(&patterns_json).unwrap())
                    .map_err(|e| Error::input(format!("cannot write {}: {}", out.display(), e)))?;
            }
            let result = json!({
                "edge": edge,
                "count": family.len(),
                "patterns": patterns_json,
                "pairwise_inequivalent": true,
            });
            let mut report = Report::new("generate", vec![digest], result);
            report.summary = format!("generated {} pairwise inequivalent patterns", family.len());
            Ok(report)
        }
        Command::Obstruct { path, kind, out } => match kind {
            ObstructKind::Monodromy => {
                let (m, digest, _) = load_manifold(path)?;
                let cert = obstruction::detect_distorted_wall(&m, max_cycle_len())?;
                if !cert.reverify(Some(&m))? {
                    return Err(Error::internal("certificate failed re-verification"));
                }
                let mut report = Report::new(
                    "obstruct",
                    vec![digest],
                    json!({"kind": "monodromy", "certificate": cert}),
                );
                report.summary = summarize_cert(&cert);
                Ok(report)
            }
            ObstructKind::Euler => {
                let (m, digest, parsed) = load_manifold(path)?;
                let _ = m;
                let hom = parsed.homology.ok_or_else(|| {
                    Error::input("manifest has no \"homology\" block (h1 ranks and i_star)")
                })?;
                let cert = obstruction::euler_class_obstruction(hom.h1_boundary_rank, &hom.i_star)?;
                if !cert.reverify(None)? {
                    return Err(Error::internal("certificate failed re-verification"));
                }
                let mut report = Report::new(
                    "obstruct",
                    vec![digest],
                    json!({"kind": "euler_class", "certificate": cert}),
                );
                report.summary = summarize_cert(&cert);
                Ok(report)
            }
            ObstructKind::TwistedDouble => {
                let (text, digest) = read_input(path)?;
                let input = parse_twisted_double(&text)?;
                let (manifold, cert) = obstruction::twisted_double_obstruction(&input)?;
                if !cert.reverify(None)? {
                    return Err(Error::internal("certificate failed re-verification"));
                }
                let manifest_json = manifest::to_json(&manifold);
                if let Some(out) = out {
                    std::fs::write(out, serde_json::to_string_pretty(&manifest_json).unwrap())
                        .map_err(|e| {
                            Error::input(format!("cannot write {}: {}", out.display(), e))
                        })?;
                }
                let mut report = Report::new(
                    "obstruct",
                    vec![digest],
                    json!({
                        "kind": "twisted_double",
                        "certificate": cert,
                        "manifest": manifest_json,
                    }),
                );
                report.summary = summarize_cert(&cert);
                Ok(report)
            }
        },
        Command::Invariant { path_a, path_b } => {
            let (ma, da, _) = load_manifold(path_a)?;
            let (mb, db, _) = load_manifold(path_b)?;
            let bisim = equiv::qi_invariant_bisimilar(&ma, &mb)?;
            let bijection = equiv::iso_necessary(&ma, &mb)?;
            let result = json!({
                "qi_invariant_bisimilar": bisim.bisimilar,
                "iso_necessary": bijection.is_some(),
                "bijection": bijection,
            });
            let mut report = Report::new("invariant", vec![da, db], result);
            report.warnings.push(bisim.warning.clone());
            report.summary = format!(
                "labelled-graph bisimilar: {}; adjacency-preserving bijection: {}",
                bisim.bisimilar,
                if bijection.is_some() {
                    "found"
                } else {
                    "none (groups not isomorphic)"
                }
            );
            Ok(report)
        }
        Command::Dehn {
            path,
            constants,
            bounds,
        } => {
            let (m, digest, _) = load_manifold(path)?;
            let mut digests = vec![digest];
            let piece_bounds: Vec<BoundExpr> = match bounds {
                None => m.pieces.iter().map(|_| BoundExpr::quadratic()).collect(),
                Some(bpath) => {
                    let (btext, bdigest) = read_input(bpath)?;
                    digests.push(bdigest);
                    let bv: Value = serde_json::from_str(&btext)
                        .map_err(|e| Error::input(format!("invalid JSON in bounds file: {}", e)))?;
                    let obj = bv
                        .as_object()
                        .ok_or_else(|| Error::input("bounds file must be a JSON object"))?;
                    for key in obj.keys() {
                        if key != "bounds" {
                            return Err(Error::input(format!(
                                "unknown key {:?} in bounds file",
                                key
                            )));
                        }
                    }
                    obj.get("bounds")
                        .and_then(|b| b.as_array())
                        .ok_or_else(|| Error::input("bounds file needs a \"bounds\" array"))?
                        .iter()
                        .map(|b| match b {
                            Value::String(name) => BoundExpr::from_name(name),
                            other => BoundExpr::from_json(other),
                        })
                        .collect::<Result<_, _>>()?
                }
            };
            let composed = filling::compose_dehn_bound(
                &piece_bounds,
                &BigInt::from(constants.lambda),
                &BigInt::from(constants.c),
                &BigInt::from(constants.k),
            )?;
            let result = json!({
                "piece_bounds": piece_bounds,
                "lambda": constants.lambda,
                "C": constants.c,
                "K": constants.k,
                "composed": composed,
                "degree": composed.degree(),
            });
            let mut report = Report::new("dehn", digests, result);
            report.summary = match composed.degree() {
                Some(d) => format!("composed filling bound has degree {}", d),
                None => "composed filling bound is exponential".to_string(),
            };
            Ok(report)
        }
    }
}

fn summarize_cert(cert: &obstruction::Certificate) -> String {
    match cert.verdict {
        obstruction::Verdict::Obstructed => match &cert.witness {
            obstruction::Witness::Monodromy { matrix, .. } => {
                format!("obstructed: infinite-order fiber monodromy {}", matrix)
            }
            _ => "obstructed".to_string(),
        },
        obstruction::Verdict::NoObstructionFound => {
            "no_obstruction_found (within bound)".to_string()
        }
    }
}

fn parse_twisted_double(text: &str) -> Result<TwistedDoubleInput, Error> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::input(format!("invalid JSON: {}", e)))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::input("twisted-double input must be a JSON object"))?;
    for key in obj.keys() {
        if !["y_ranks", "b", "weights", "i_star"].contains(&key.as_str()) {
            return Err(Error::input(format!(
                "unknown key {:?} in twisted-double input",
                key
            )));
        }
    }
    let y_ranks = obj
        .get("y_ranks")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::input("twisted-double input needs \"y_ranks\""))?
        .iter()
        .map(|x| {
            manifest::bigint_from_json(x)
                .map_err(Error::Input)
                .and_then(|b| {
                    num_traits::ToPrimitive::to_usize(&b).ok_or_else(|| Error::input("bad rank"))
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let b = obj
        .get("b")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::input("twisted-double input needs \"b\""))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::input("each b entry must be an array"))?
                .iter()
                .map(|x| manifest::bigint_from_json(x).map_err(Error::Input))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let weights = obj
        .get("weights")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::input("twisted-double input needs \"weights\""))?
        .iter()
        .map(|x| manifest::bigint_from_json(x).map_err(Error::Input))
        .collect::<Result<Vec<_>, _>>()?;
    let i_star = matrix_from_json(
        obj.get("i_star")
            .ok_or_else(|| Error::input("twisted-double input needs \"i_star\""))?,
        "i_star",
    )?;
    Ok(TwistedDoubleInput {
        y_ranks,
        b,
        weights,
        i_star,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            println!("{}", report.summary);
            for w in &report.warnings {
                eprintln!("warning: {}", w);
            }
            if let Some(path) = &cli.json {
                let text = report.to_pretty_json();
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: cannot write {}: {}", path.display(), e);
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(Error::Internal(msg)) => {
            eprintln!("internal error: {}", msg);
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}
