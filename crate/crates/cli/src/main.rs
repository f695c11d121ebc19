//! `ein`: command-line front end for the causal geometry of the Einstein
//! universe. Every subcommand wraps one library operation, reads JSON inline
//! or from `@file` arguments, and reports through three exit codes: 0 for
//! acceptance verdicts, 1 for refutations carrying a witness, 2 for
//! validation and usage errors (with `{"error": ...}` on stderr).

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::json;

use ein_causal::conformal::{apply_cover, canonical_lift, compose, fit_liouville};
use ein_causal::curves::{classify_curve, limit_curve, sampled_null_geodesic, CurveClass};
use ein_causal::development::{development_membership, DevelopmentVerdict};
use ein_causal::domains::{
    boundary_split, conjugate_construction, expansion_check, glue, is_causally_convex,
    ConvexityVerdict,
};
use ein_causal::ein::{boundary_of_past, causal_classify, null_geodesic};
use ein_causal::embed::{conformality_report, penrose_embed, penrose_inverse};
use ein_causal::io::{
    CausalSetDto, CoverPointDto, CurveDto, DomainDto, EinPointDto, GraphDto, MinkowskiPointDto,
    TransformDto,
};
use ein_causal::selftest::{run_all, Scale};
use ein_causal::sphere::SpherePoint;
use ein_causal::{causal_set, Error};

#[derive(Parser)]
#[command(name = "ein", version, about = "Causal geometry of the Einstein universe")]
struct Cli {
    /// Expected spatial sphere dimension; inputs of another dimension are
    /// rejected.
    #[arg(long, global = true)]
    dim: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Output path (defaults to stdout).
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the causal relation of two cover points.
    Relate {
        /// Cover point {"x": [...], "t": ...}, inline or @file.
        #[arg(short)]
        p: String,
        #[arg(short)]
        q: String,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Sample the null geodesic from a point with a given spatial direction.
    Geodesic {
        #[arg(short)]
        p: String,
        /// Tangent direction as a JSON array.
        #[arg(long)]
        dir: String,
        #[arg(long)]
        s_max: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Sample the past null boundary of a point as an achronal graph.
    Boundary {
        #[arg(short)]
        p: String,
        #[arg(long)]
        mesh: f64,
    },
    /// Classify a sampled curve (timelike / causal / null geodesic / not causal).
    CurveClassify {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Certify achronality of a graph or exhibit a violating pair.
    GraphCheck {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Probe a full-sphere graph with random null geodesics for the Cauchy property.
    CauchyCheck {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 200)]
        probes: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Extract a causal limit curve from a sequence of causal curves.
    LimitCurve {
        /// JSON array of curves, inline or @file.
        #[arg(long)]
        curves: String,
        #[arg(long, default_value_t = 128)]
        grid: usize,
    },
    /// Test membership of a point in the development of an achronal graph.
    Develop {
        #[arg(short)]
        q: String,
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 400)]
        budget: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Embed a Minkowski point into the cover.
    Embed {
        /// Minkowski point {"tm": ..., "y": [...]}.
        #[arg(short)]
        m: String,
        /// Base point of the chart on the sphere, as a JSON array.
        #[arg(long)]
        base: String,
    },
    /// Invert the embedding on the open diamond of a base point.
    EmbedInverse {
        #[arg(short)]
        p: String,
        #[arg(long)]
        base: String,
    },
    /// Sample the conformality defect of the embedding.
    Conformality {
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
        #[arg(long)]
        seed: u64,
    },
    /// Apply a lifted conformal transform to a cover point.
    TransformApply {
        #[arg(long)]
        transform: String,
        #[arg(short)]
        p: String,
    },
    /// Compose two lifted conformal transforms (first then second).
    TransformCompose {
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
    /// Reconstruct the conformal transform from point correspondences.
    FitLiouville {
        /// JSON array of [source, target] pairs of Einstein-universe points.
        #[arg(long)]
        pairs: String,
    },
    /// Search for a causal-convexity refutation of a domain.
    DomainCheck {
        #[arg(long)]
        domain: String,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Split a domain boundary along an achronal graph into future and past parts.
    BoundarySplit {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        graph: String,
        #[arg(long)]
        mesh: f64,
    },
    /// Glue two domains sharing a Cauchy graph and re-validate the union.
    Glue {
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        #[arg(long)]
        graph: String,
        #[arg(long)]
        mesh: f64,
        #[arg(long, default_value_t = 300)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Check the expansion property of a strictly Lipschitz graph.
    ExpansionCheck {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Verify the conjugate-point facts on the past boundary of a point.
    ConjugateCheck {
        #[arg(short)]
        p: String,
        #[arg(long)]
        mesh: f64,
        #[arg(long, default_value_t = 100)]
        probes: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Sprinkle a causal set into a domain.
    Sprinkle {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Run the acceptance suite and print its pass/fail table.
    Selftest {
        #[arg(long, value_enum, default_value_t = SelftestScale::Full)]
        scale: SelftestScale,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SelftestScale {
    Full,
    Quick,
}

/// Outcome of a subcommand: text to emit plus the verdict-driven exit code.
enum Outcome {
    Accepted(String),
    Refuted(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", json!({ "error": e.to_string() }));
            return ExitCode::from(2);
        }
    };
    let out = cli.out.clone();
    match run(cli) {
        Ok(outcome) => {
            let (text, code) = match outcome {
                Outcome::Accepted(t) => (t, ExitCode::SUCCESS),
                Outcome::Refuted(t) => (t, ExitCode::from(1)),
            };
            if let Err(e) = write_output(out.as_deref(), &text) {
                eprintln!("{}", json!({ "error": e.to_string() }));
                return ExitCode::from(2);
            }
            code
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string() }));
            ExitCode::from(2)
        }
    }
}

fn write_output(path: Option<&std::path::Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

/// Resolves the `@file` convention: a leading `@` reads the argument from a
/// file, anything else is taken verbatim.
fn resolve(arg: &str) -> Result<String, Error> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(std::fs::read_to_string(path)?),
        None => Ok(arg.to_string()),
    }
}

fn parse<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T, Error> {
    Ok(serde_json::from_str(&resolve(arg)?)?)
}

fn check_dim(expected: Option<usize>, actual: usize) -> Result<(), Error> {
    match expected {
        Some(n) if n < 2 => Err(Error::Validation("dimension must be at least 2".into())),
        Some(n) if n != actual => Err(Error::Validation(format!(
            "input has sphere dimension {actual}, expected {n}"
        ))),
        _ => Ok(()),
    }
}

fn parse_direction(arg: &str) -> Result<DVector<f64>, Error> {
    let v: Vec<f64> = parse(arg)?;
    Ok(DVector::from_vec(v))
}

fn parse_base(arg: &str) -> Result<SpherePoint<f64>, Error> {
    SpherePoint::new(DVector::from_vec(parse::<Vec<f64>>(arg)?))
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn curve_csv(dto: &CurveDto) -> String {
    let n = dto.samples.first().map_or(0, |s| s.x.len());
    let mut out = String::from("t");
    for i in 0..n {
        out.push_str(&format!(",x{i}"));
    }
    out.push('\n');
    for s in &dto.samples {
        out.push_str(&format!("{}", s.t));
        for c in &s.x {
            out.push_str(&format!(",{c}"));
        }
        out.push('\n');
    }
    out
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let dim = cli.dim;
    let format = cli.format;
    match cli.command {
        Command::Relate { p, q, eps } => {
            if eps < 0.0 {
                return Err(Error::Validation("eps must be nonnegative".into()));
            }
            let p = parse::<CoverPointDto>(&p)?.into_point()?;
            let q = parse::<CoverPointDto>(&q)?.into_point()?;
            check_dim(dim, p.x.n())?;
            let class = causal_classify(&p, &q, eps);
            Ok(Outcome::Accepted(pretty(&json!({ "class": format!("{class:?}") }))))
        }
        Command::Geodesic { p, dir, s_max, samples } => {
            let p = parse::<CoverPointDto>(&p)?.into_point()?;
            check_dim(dim, p.x.n())?;
            let dir = parse_direction(&dir)?;
            null_geodesic(&p, &dir, 0.0)?;
            let curve = sampled_null_geodesic(&p, &dir, s_max, samples)?;
            let dto = CurveDto::from_curve(&curve);
            Ok(Outcome::Accepted(match format {
                Format::Json => pretty(&serde_json::to_value(&dto)?),
                Format::Csv => curve_csv(&dto),
            }))
        }
        Command::Boundary { p, mesh } => {
            let p = parse::<CoverPointDto>(&p)?.into_point()?;
            check_dim(dim, p.x.n())?;
            if mesh <= 0.0 {
                return Err(Error::Validation("mesh must be positive".into()));
            }
            let g = boundary_of_past(&p, mesh);
            let dto = GraphDto::from_graph(&g);
            Ok(Outcome::Accepted(pretty(&serde_json::to_value(&dto)?)))
        }
        Command::CurveClassify { curve, eps } => {
            let c = parse::<CurveDto>(&curve)?.into_curve()?;
            check_dim(dim, c.start().x.n())?;
            match classify_curve(&c, eps)? {
                CurveClass::NotCausal { segment, excess } => Ok(Outcome::Refuted(pretty(&json!({
                    "class": "NotCausal",
                    "segment": segment,
                    "excess": excess,
                })))),
                class => Ok(Outcome::Accepted(pretty(&json!({ "class": format!("{class:?}") })))),
            }
        }
        Command::GraphCheck { graph, eps } => {
            let g = parse::<GraphDto>(&graph)?.into_graph()?;
            check_dim(dim, g.n())?;
            match g.is_achronal(eps) {
                Ok(cert) => Ok(Outcome::Accepted(pretty(&json!({
                    "achronal": true,
                    "lipschitz_sup": cert.lipschitz_sup,
                    "max_excess": cert.max_excess,
                })))),
                Err(v) => Ok(Outcome::Refuted(pretty(&json!({
                    "achronal": false,
                    "witness": {
                        "i": v.i,
                        "j": v.j,
                        "excess": v.excess,
                    },
                })))),
            }
        }
        Command::CauchyCheck { graph, probes, seed, eps } => {
            let g = parse::<GraphDto>(&graph)?.into_graph()?;
            check_dim(dim, g.n())?;
            let report = g.is_cauchy(probes, seed, eps)?;
            let body = pretty(&json!({
                "cauchy": report.verdict,
                "probes": report.probes,
                "monotone_ok": report.monotone_ok,
                "unique_ok": report.unique_ok,
            }));
            if report.verdict {
                Ok(Outcome::Accepted(body))
            } else {
                Ok(Outcome::Refuted(body))
            }
        }
        Command::LimitCurve { curves, grid } => {
            let dtos: Vec<CurveDto> = parse(&curves)?;
            let parsed = dtos
                .iter()
                .map(|d| d.into_curve())
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(first) = parsed.first() {
                check_dim(dim, first.start().x.n())?;
            }
            let limit = limit_curve(&parsed, grid)?;
            let dto = CurveDto::from_curve(&limit);
            Ok(Outcome::Accepted(match format {
                Format::Json => pretty(&serde_json::to_value(&dto)?),
                Format::Csv => curve_csv(&dto),
            }))
        }
        Command::Develop { q, graph, budget, seed } => {
            let q = parse::<CoverPointDto>(&q)?.into_point()?;
            check_dim(dim, q.x.n())?;
            let g = parse::<GraphDto>(&graph)?.into_graph()?;
            match development_membership(&q, &g, budget, seed)? {
                DevelopmentVerdict::InsideUpToSampling { probes } => Ok(Outcome::Accepted(
                    pretty(&json!({ "verdict": "inside_up_to_sampling", "probes": probes })),
                )),
                DevelopmentVerdict::EscapeWitness { curve, miss_distance } => {
                    Ok(Outcome::Refuted(pretty(&json!({
                        "verdict": "escape_witness",
                        "miss_distance": miss_distance,
                        "witness": serde_json::to_value(CurveDto::from_curve(&curve))?,
                    }))))
                }
            }
        }
        Command::Embed { m, base } => {
            let m = parse::<MinkowskiPointDto>(&m)?.into_point()?;
            let base = parse_base(&base)?;
            check_dim(dim, base.n())?;
            let p = penrose_embed(&m, &base);
            Ok(Outcome::Accepted(pretty(&serde_json::to_value(
                CoverPointDto::from_point(&p),
            )?)))
        }
        Command::EmbedInverse { p, base } => {
            let p = parse::<CoverPointDto>(&p)?.into_point()?;
            let base = parse_base(&base)?;
            check_dim(dim, base.n())?;
            let m = penrose_inverse(&p, &base)?;
            Ok(Outcome::Accepted(pretty(&serde_json::to_value(
                MinkowskiPointDto::from_point(&m),
            )?)))
        }
        Command::Conformality { base, count, radius, seed } => {
            let base = parse_base(&base)?;
            check_dim(dim, base.n())?;
            let report = conformality_report(&base, count, radius, seed)?;
            match format {
                Format::Json => Ok(Outcome::Accepted(pretty(&json!({
                    "max_defect": report.max_defect,
                    "max_factor_error": report.max_factor_error,
                    "samples": report.samples.len(),
                })))),
                Format::Csv => {
                    let mut out = String::from("tm,abs_y,defect,factor_fd,factor_closed\n");
                    for s in &report.samples {
                        out.push_str(&format!(
                            "{},{},{},{},{}\n",
                            s.point.t_m,
                            s.point.y.norm(),
                            s.defect,
                            s.factor_fd,
                            s.factor_closed
                        ));
                    }
                    Ok(Outcome::Accepted(out))
                }
            }
        }
        Command::TransformApply { transform, p } => {
            let dto = parse::<TransformDto>(&transform)?;
            let lift = canonical_lift(dto.into_transform()?)?.with_winding(dto.winding);
            let p = parse::<CoverPointDto>(&p)?.into_point()?;
            check_dim(dim, p.x.n())?;
            let image = apply_cover(&lift, &p)?;
            Ok(Outcome::Accepted(pretty(&serde_json::to_value(
                CoverPointDto::from_point(&image),
            )?)))
        }
        Command::TransformCompose { first, second } => {
            let a = parse::<TransformDto>(&first)?;
            let b = parse::<TransformDto>(&second)?;
            let la = canonical_lift(a.into_transform()?)?.with_winding(a.winding);
            let lb = canonical_lift(b.into_transform()?)?.with_winding(b.winding);
            // "first then second" as maps: second ∘ first.
            let composed = compose(&lb, &la)?;
            Ok(Outcome::Accepted(pretty(&serde_json::to_value(
                TransformDto::from_lift(&composed),
            )?)))
        }
        Command::FitLiouville { pairs } => {
            let dtos: Vec<(EinPointDto, EinPointDto)> = parse(&pairs)?;
            let correspondences = dtos
                .iter()
                .map(|(a, b)| Ok((a.into_point()?, b.into_point()?)))
                .collect::<Result<Vec<_>, Error>>()?;
            if let Some((a, _)) = correspondences.first() {
                check_dim(dim, a.x().n())?;
            }
            let fit = fit_liouville(&correspondences)?;
            Ok(Outcome::Accepted(pretty(&json!({
                "residual": fit.residual,
                "singular_gap": fit.singular_gap,
                "matrix": serde_json::to_value(
                    TransformDto::from_transform(&fit.transform).matrix
                )?,
            }))))
        }
        Command::DomainCheck { domain, trials, seed } => {
            let d = parse::<DomainDto>(&domain)?.into_domain()?;
            check_dim(dim, d.n())?;
            match is_causally_convex(&d, trials, seed)? {
                ConvexityVerdict::NoWitnessFound { trials } => Ok(Outcome::Accepted(pretty(
                    &json!({ "verdict": "no_witness_found", "trials": trials }),
                ))),
                ConvexityVerdict::Refuted { witness, outside_sample } => {
                    Ok(Outcome::Refuted(pretty(&json!({
                        "verdict": "refuted",
                        "outside_sample": outside_sample,
                        "witness": serde_json::to_value(CurveDto::from_curve(&witness))?,
                    }))))
                }
            }
        }
        Command::BoundarySplit { domain, graph, mesh } => {
            let d = parse::<DomainDto>(&domain)?.into_domain()?;
            check_dim(dim, d.n())?;
            let g = parse::<GraphDto>(&graph)?.into_graph()?;
            let split = boundary_split(&d, &g, mesh)?;
            Ok(Outcome::Accepted(pretty(&json!({
                "plus": split.plus.iter().map(CoverPointDto::from_point).collect::<Vec<_>>(),
                "minus": split.minus.iter().map(CoverPointDto::from_point).collect::<Vec<_>>(),
            }))))
        }
        Command::Glue { first, second, graph, mesh, trials, seed } => {
            let d1 = parse::<DomainDto>(&first)?.into_domain()?;
            let d2 = parse::<DomainDto>(&second)?.into_domain()?;
            check_dim(dim, d1.n())?;
            let g = parse::<GraphDto>(&graph)?.into_graph()?;
            let (union, report) = glue(&d1, &d2, &g, mesh, trials, seed)?;
            Ok(Outcome::Accepted(pretty(&json!({
                "domain": serde_json::to_value(DomainDto::from_domain(&union))?,
                "report": {
                    "convexity_trials": report.convexity_trials,
                    "cauchy_probes": report.cauchy_probes,
                    "boundary_samples_matched": report.boundary_samples_matched,
                    "max_merge_deviation": report.max_merge_deviation,
                },
            }))))
        }
        Command::ExpansionCheck { graph, pairs, seed } => {
            let g = parse::<GraphDto>(&graph)?.into_graph()?;
            check_dim(dim, g.n())?;
            let report = expansion_check(&g, pairs, seed)?;
            Ok(Outcome::Accepted(pretty(&json!({
                "min_ratio": report.min_ratio,
                "max_ratio": report.max_ratio,
                "lipschitz_sup": report.lipschitz_sup,
                "pairs": report.pairs,
            }))))
        }
        Command::ConjugateCheck { p, mesh, probes, seed } => {
            let p = parse::<CoverPointDto>(&p)?.into_point()?;
            check_dim(dim, p.x.n())?;
            let report = conjugate_construction(&p, mesh, probes, seed)?;
            let body = pretty(&json!({
                "achronal": report.achronal,
                "cauchy": report.cauchy,
                "max_probe_hit_error": report.max_probe_hit_error,
                "max_generator_deviation": report.max_generator_deviation,
                "surface_samples": report.surface.samples().len(),
            }));
            if report.achronal && report.cauchy {
                Ok(Outcome::Accepted(body))
            } else {
                Ok(Outcome::Refuted(body))
            }
        }
        Command::Sprinkle { domain, count, seed, eps } => {
            let d = parse::<DomainDto>(&domain)?.into_domain()?;
            check_dim(dim, d.n())?;
            let set = causal_set::sprinkle(&d, count, seed, eps)?;
            Ok(Outcome::Accepted(match format {
                Format::Json => pretty(&serde_json::to_value(CausalSetDto::from_set(&set))?),
                Format::Csv => set.edges_csv(),
            }))
        }
        Command::Selftest { scale } => {
            let report = run_all(match scale {
                SelftestScale::Full => Scale::Full,
                SelftestScale::Quick => Scale::Quick,
            });
            let text = report.render();
            if report.all_passed() {
                Ok(Outcome::Accepted(text))
            } else {
                Ok(Outcome::Refuted(text))
            }
        }
    }
}
