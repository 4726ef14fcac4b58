mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pbw_core::catalog::Catalog;
use pbw_core::error::Error as CoreError;
use pbw_core::groebner::{
    buchberger, degree_cap, dims, dims_by_rank, interreduce, is_quadratic_gb, DEFAULT_DEGREE_CAP,
};
use pbw_core::orders::{search_order, OrderSpec};
use pbw_core::poly::Polynomial;
use pbw_core::presentation::Presentation;
use pbw_core::reproduce::{self, CERTIFICATE_SAMPLES, CRITERIA};
use pbw_core::rewriting::{check_confluence, validate_certificate, Caps, RewriteRule, Rewriter, TerminationCertificate};
use pbw_core::signature::Mode;
use pbw_core::tree::Tree;
use pbw_core::Rational;
use serde_json::{json, Value};

use report::{catalog_hashes, render, Report, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "pbw", version, about = "Rewriting, Groebner bases and PBW checks for shuffle and nonsymmetric operads")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Catalog directory; the built-in catalog when unset.
    #[arg(long, global = true, env = "PBW_CATALOG_DIR")]
    catalog: Option<PathBuf>,
    /// Worker threads for the parallel stages.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Leave the wall clock out of the report, making it reproducible byte for byte.
    #[arg(long, global = true)]
    omit_timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum World {
    Native,
    Shuffle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pipeline {
    Normal,
    Rank,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// List or print catalog entries.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Dimensions by arity and number of unary vertices.
    Dims {
        operad: String,
        #[arg(long, default_value_t = 4)]
        arity: usize,
        #[arg(long, default_value_t = 0)]
        unary: usize,
        #[arg(long, value_enum, default_value_t = Pipeline::Normal)]
        pipeline: Pipeline,
        #[arg(long, value_enum, default_value_t = World::Shuffle)]
        world: World,
        /// `auto` or an order file; the stored order when unset.
        #[arg(long)]
        order: Option<String>,
    },
    /// Groebner basis by Buchberger completion.
    Gb {
        operad: String,
        #[arg(long, value_enum, default_value_t = World::Shuffle)]
        world: World,
        #[arg(long)]
        order: Option<String>,
        /// Largest overlap, in vertices, that completion examines.
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        degree_cap: usize,
    },
    /// Critical pairs and the termination certificate of a stored rewriting system.
    Confluence {
        system: String,
        #[arg(long, value_parser = parse_caps, default_value = "4,2")]
        caps: Caps,
        /// Complete the system first and check the result.
        #[arg(long)]
        complete: bool,
        #[arg(long, default_value_t = CERTIFICATE_SAMPLES)]
        samples: usize,
    },
    /// PBW check for a morphism P -> Q.
    Pbw {
        p: String,
        q: String,
        morphism: String,
        #[arg(long, value_parser = parse_caps, default_value = "4,2")]
        caps: Caps,
        /// Use Q's stored rewriting system as written, without completion.
        #[arg(long)]
        verbatim: bool,
    },
    /// Check that a morphism respects the relations of its source.
    MorphismCheck { morphism: String },
    /// Whether the relations form a quadratic Groebner basis.
    KoszulQuadratic {
        operad: String,
        #[arg(long, value_enum, default_value_t = World::Shuffle)]
        world: World,
        #[arg(long)]
        order: Option<String>,
    },
    /// Run the acceptance criteria and print a PASS/FAIL table.
    ReproducePaper {
        /// Criterion numbers; all of them when unset.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show { name: String },
}

fn parse_caps(s: &str) -> std::result::Result<Caps, String> {
    let (a, k) = s.split_once(',').ok_or("caps are written ARITY,UNARY")?;
    let arity: usize = a.trim().parse().map_err(|_| format!("bad arity `{a}`"))?;
    let unary: usize = k.trim().parse().map_err(|_| format!("bad unary count `{k}`"))?;
    if arity < 1 {
        return Err("arity cap must be at least 1".into());
    }
    Ok(Caps::new(arity, unary))
}

struct Outcome {
    caps: Option<Caps>,
    passed: bool,
    result: Value,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Catalog { .. } => "catalog",
        Command::Dims { .. } => "dims",
        Command::Gb { .. } => "gb",
        Command::Confluence { .. } => "confluence",
        Command::Pbw { .. } => "pbw",
        Command::MorphismCheck { .. } => "morphism-check",
        Command::KoszulQuadratic { .. } => "koszul-quadratic",
        Command::ReproducePaper { .. } => "reproduce-paper",
    }
}

fn presentation(cat: &Catalog, name: &str, world: World) -> Result<Presentation> {
    Ok(reproduce::native(cat, name, world == World::Shuffle)?)
}

fn stored_order(cat: &Catalog, name: &str, world: World) -> Result<OrderSpec> {
    Ok(if world == World::Shuffle { cat.shuffle_order(name)? } else { cat.order(name)? })
}

/// `auto` searches the path-lex family for an order orienting the
/// relations as interreduced under the stored (or default) order, ranking
/// the binary generators.
fn resolve_order(cat: &Catalog, name: &str, world: World, p: &Presentation, order: Option<&str>) -> Result<OrderSpec> {
    match order {
        None => stored_order(cat, name, world).or_else(|_| resolve_order(cat, name, world, p, Some("auto"))),
        Some("auto") => {
            let binary = p.sig.binary();
            let base = stored_order(cat, name, world).unwrap_or_else(|_| {
                let names: Vec<&str> = binary.iter().map(|g| p.sig.name(*g)).collect();
                OrderSpec::reverse_length(&names)
            });
            let rules = interreduce(&p.all_relations(), &base.resolve(&p.sig)?)?;
            let pairs: Vec<(Tree, Polynomial)> = rules.into_iter().map(|r| (r.lhs, r.rhs)).collect();
            search_order(&p.sig, &binary, &pairs).ok_or_else(|| anyhow!("no admissible order orients the relations of `{name}`"))
        }
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading order file {path}"))?;
            match TerminationCertificate::from_json(&text) {
                Ok(c) => Ok(c.order_spec().clone()),
                Err(_) => Ok(OrderSpec::from_json(&text)?),
            }
        }
    }
}

fn rule_texts(rw: &Rewriter, rules: &[RewriteRule]) -> Vec<String> {
    rules.iter().map(|r| r.to_text(&rw.sig)).collect()
}

fn run(cli: &Cli, cat: &Catalog) -> Result<Outcome> {
    match &cli.command {
        Command::Catalog { action: CatalogAction::List } => {
            Ok(Outcome { caps: None, passed: true, result: json!({ "entries": cat.list()? }) })
        }
        Command::Catalog { action: CatalogAction::Show { name } } => {
            Ok(Outcome { caps: None, passed: true, result: json!({ "name": name, "text": cat.show(name)? }) })
        }
        Command::Dims { operad, arity, unary, pipeline, world, order } => {
            let caps = Caps::new(*arity, *unary);
            if *arity < 1 {
                bail!("arity cap must be at least 1");
            }
            let p = presentation(cat, operad, *world)?;
            let mut result = json!({ "operad": operad, "generators": p.sig.len() });
            let mut tables = Vec::new();
            if *pipeline != Pipeline::Rank {
                let spec = resolve_order(cat, operad, *world, &p, order.as_deref())?;
                let gb = buchberger(&p.sig, &p.all_relations(), &spec, degree_cap(caps))?;
                let t = dims(&p.sig, &gb.rules, *arity, *unary);
                result["normal"] = serde_json::to_value(&t)?;
                tables.push(t);
            }
            if *pipeline != Pipeline::Normal {
                let t = dims_by_rank(&p.sig, &p.all_relations(), *arity, *unary);
                result["rank"] = serde_json::to_value(&t)?;
                tables.push(t);
            }
            let agree = tables.windows(2).all(|w| w[0] == w[1]);
            result["totals"] = json!(reproduce::totals(&tables[0]));
            if *pipeline == Pipeline::Both {
                result["pipelines_agree"] = json!(agree);
            }
            Ok(Outcome { caps: Some(caps), passed: agree, result })
        }
        Command::Gb { operad, world, order, degree_cap } => {
            let p = presentation(cat, operad, *world)?;
            let spec = resolve_order(cat, operad, *world, &p, order.as_deref())?;
            let c = buchberger(&p.sig, &p.all_relations(), &spec, *degree_cap)?;
            let rules: Vec<String> = c.rules.iter().map(|r| r.to_text(&p.sig)).collect();
            Ok(Outcome {
                caps: None,
                passed: true,
                result: json!({
                    "operad": operad,
                    "order": spec,
                    "degree_cap": degree_cap,
                    "added": c.added,
                    "pairs_processed": c.pairs_processed,
                    "pairs_skipped": c.pairs_skipped,
                    "rules": rules,
                }),
            })
        }
        Command::Confluence { system, caps, complete, samples } => {
            let (rw, added) = if *complete {
                let kb = cat.completed_system::<Rational>(system, *caps)?;
                let added: Vec<RewriteRule> = kb.added.iter().map(|&i| kb.rewriter.rules[i].clone()).collect();
                let texts = rule_texts(&kb.rewriter, &added);
                (kb.rewriter, texts)
            } else {
                (cat.system::<Rational>(system)?, Vec::new())
            };
            let confluence = check_confluence(&rw, *caps)?;
            let certificate = validate_certificate(&rw, *caps, *samples, cli.seed);
            let passed = confluence.is_confluent() && certificate.is_ok();
            Ok(Outcome {
                caps: Some(*caps),
                passed,
                result: json!({
                    "system": system,
                    "rules": rw.rules.len(),
                    "completed": complete,
                    "added_rules": added,
                    "confluent": confluence.is_confluent(),
                    "certificate_valid": certificate.is_ok(),
                    "certificate_violation": certificate.err(),
                    "confluence": confluence,
                }),
            })
        }
        Command::Pbw { p, q, morphism, caps, verbatim } => {
            let f = cat.morphism::<Rational>(morphism)?;
            if f.source_name != *p || f.target_name != *q {
                bail!("`{morphism}` maps {} to {}, not {p} to {q}", f.source_name, f.target_name);
            }
            let rs = format!("rs-{q}");
            let stored = if cat.has_system(&rs) { Some(cat.system::<Rational>(&rs)?) } else { None };
            let (q_system, source) = match stored {
                Some(rw) if rw.sig.mode() == f.target.mode() => {
                    if *verbatim {
                        (rw, format!("{rs} as stored"))
                    } else {
                        let kb = cat.completed_system::<Rational>(&rs, *caps)?;
                        let n = kb.added.len();
                        (kb.rewriter, format!("{rs} completed with {n} extra rules"))
                    }
                }
                _ => {
                    let shuffle = f.target.mode() == Mode::Shuffle;
                    (cat.completed::<Rational>(q, shuffle, *caps)?, format!("Groebner basis of {q}"))
                }
            };
            let (outcome, _) = reproduce::pbw_case(cat, morphism, &q_system, *caps)?;
            Ok(Outcome {
                caps: Some(*caps),
                passed: outcome.passed(),
                result: json!({
                    "morphism": morphism,
                    "p": p,
                    "q": q,
                    "q_system": source,
                    "summary": reproduce::describe(&outcome),
                    "outcome": outcome,
                }),
            })
        }
        Command::MorphismCheck { morphism } => {
            let f = cat.morphism::<Rational>(morphism)?;
            let c = reproduce::well_defined(cat, &f)?;
            Ok(Outcome {
                caps: None,
                passed: c.passed,
                result: json!({ "morphism": morphism, "source": f.source_name, "target": f.target_name, "check": c }),
            })
        }
        Command::KoszulQuadratic { operad, world, order } => {
            let p = presentation(cat, operad, *world)?;
            let spec = resolve_order(cat, operad, *world, &p, order.as_deref())?;
            let quadratic = is_quadratic_gb(&p.sig, &p.all_relations(), &spec)?;
            Ok(Outcome {
                caps: None,
                passed: quadratic,
                result: json!({ "operad": operad, "order": spec, "quadratic_groebner_basis": quadratic }),
            })
        }
        Command::ReproducePaper { criteria } => {
            let numbers: Vec<u8> = if criteria.is_empty() { CRITERIA.to_vec() } else { criteria.clone() };
            let results = numbers
                .iter()
                .map(|&n| reproduce::run_criterion(cat, n, cli.seed))
                .collect::<pbw_core::error::Result<Vec<_>>>()?;
            let table: Vec<String> = results.iter().map(|c| c.summary()).collect();
            Ok(Outcome {
                caps: None,
                passed: results.iter().all(|c| c.passed()),
                result: json!({ "table": table, "criteria": results }),
            })
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<CoreError>() {
        Some(CoreError::NotConfluent(_)) | Some(CoreError::MorphismFailed(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global().context("starting the thread pool")?;
    }
    let start = Instant::now();
    let cat = match &cli.catalog {
        Some(d) if !d.as_os_str().is_empty() => Catalog::from_dir(d),
        _ => Catalog::embedded(),
    };
    let outcome = run(cli, &cat)?;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: command_name(&cli.command).to_string(),
        arguments: std::env::args().skip(1).collect(),
        caps: outcome.caps,
        seed: cli.seed,
        catalog: catalog_hashes(&cat)?,
        wall_clock_ms: (!cli.omit_timing).then(|| start.elapsed().as_millis() as u64),
        passed: outcome.passed,
        result: outcome.result,
    };
    let text = report.to_json();
    if let Some(path) = &cli.report {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    if cli.json {
        print!("{text}");
    } else {
        print!("{}", render(&serde_json::from_str(&text)?));
    }
    Ok(report.passed)
}
