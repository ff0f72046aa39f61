//! `dimkit` — exact complexity measures for finite function classes.
//!
//! Exit codes: 0 success, 1 domain failure (invalid witness/certificate,
//! failed reproduction), 2 usage error, 3 resource limit.

use clap::{Args, Parser, Subcommand};

use dimkit::combodim::{dim_comb, ldim, vcdim, Measure};
use dimkit::ramsey::{
    color_from_witness, equivalence_audit, extract_subsequence, find_mono_clique,
    largest_mono_clique, Color, EdgeColoring,
};
use dimkit::randcon::{
    count_report_to_json, count_valid_sequences, forster_after_repair, pipeline_report_to_json,
    repair_e5_light, sample_e_matrix, sample_f_matrix, search_separation_e,
    separation_report_to_json, CountBudget, RandomConstructionConfig,
};
use dimkit::rank::{
    bound_claim_b2, bound_claim_b3, certificate_from_json, certificate_to_json, embedding_search,
    forster_bound, numeric_rank, verify_embedding, ActivationSpec, DEFAULT_RANK_TOL,
};
use dimkit::ratio::parse_rational;
use dimkit::scaledim::{
    dim_scale, gen_linear_eluder_witness, gen_relu_star_witness, ScaleSearchConfig, SupMode,
};
use dimkit::table::{
    gen_exp_class, gen_parities, gen_scale_counterexample, gen_singletons, gen_thresholds,
    serialize_class, FunctionClassTable,
};
use dimkit::witness::{
    report_to_json, verify_witness, witness_from_json, witness_to_json, Verification,
    WitnessSequence,
};
use dimkit::{Error, Result};

use dimkit_cli::manifest::ManifestBuilder;
use dimkit_cli::refspec::{load_class, parse_ref, save_class};
use dimkit_cli::repro::{run_suite, SUITE_NAMES};

#[derive(Parser)]
#[command(name = "dimkit", version, about = "Exact complexity measures for finite function classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for machine consumption
    #[arg(long, global = true, value_parser = ["table", "csv", "json"], default_value = "table")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a built-in class family
    Gen(GenArgs),
    /// Compute a dimension of a class
    Dim(DimArgs),
    /// Witness operations
    Witness {
        #[command(subcommand)]
        op: WitnessOp,
    },
    /// Embedding-rank certificates and bounds
    Rank {
        #[command(subcommand)]
        op: RankOp,
    },
    /// Edge colorings and monochromatic extraction
    Ramsey {
        #[command(subcommand)]
        op: RamseyOp,
    },
    /// Randomized separating constructions
    Randcon {
        #[command(subcommand)]
        op: RandconOp,
    },
    /// Run a reproduction suite (or `all`)
    Repro {
        /// Suite name
        suite: String,
    },
}

#[derive(Args)]
struct GenArgs {
    /// thresholds | singletons | parities | counterexample | exp | relu-star | linear-eluder
    family: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    funcs: Option<usize>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long, default_value = "2")]
    r: String,
    #[arg(long, default_value = "1.01")]
    diag_margin: String,
    #[arg(long)]
    out: Option<String>,
    /// Also write the construction's witness here (relu-star, linear-eluder)
    #[arg(long)]
    witness_out: Option<String>,
}

#[derive(Args)]
struct DimArgs {
    /// Class file (JSON, or CSV by extension)
    #[arg(long)]
    class: String,
    /// edim | sdim | tdim | vc | ldim
    #[arg(long)]
    measure: String,
    /// col:K | ones | minus-ones | zeros | file:PATH
    #[arg(long, default_value = "col:0")]
    r#ref: String,
    /// Scale; switches to the scale-sensitive search
    #[arg(long)]
    eps: Option<String>,
    /// Length cap for the scale-sensitive search
    #[arg(long)]
    cap: Option<usize>,
    /// Take the sup over scales >= eps
    #[arg(long)]
    sup: bool,
    #[arg(long)]
    witness_out: Option<String>,
}

#[derive(Subcommand)]
enum WitnessOp {
    /// Check a witness file against a class file
    Verify {
        #[arg(long)]
        class: String,
        #[arg(long)]
        witness: String,
    },
}

#[derive(Subcommand)]
enum RankOp {
    /// Check an embedding certificate against a class
    Verify {
        #[arg(long)]
        class: String,
        #[arg(long)]
        cert: String,
    },
    /// Spectral sign-rank lower bound
    Forster {
        #[arg(long)]
        class: String,
    },
    /// Numeric rank at a singular-value tolerance
    NumericRank {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
    /// Best-effort certificate search at a fixed dimension
    Search {
        #[arg(long)]
        class: String,
        #[arg(long)]
        d: usize,
        /// identity | sign | relu
        #[arg(long, default_value = "identity")]
        activation: String,
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Closed-form eluder bound for linear certificates
    BoundB2 {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r_phi: f64,
        #[arg(long)]
        r_w: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Slope-bounded version of the bound
    BoundB3 {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r_phi: f64,
        #[arg(long)]
        r_w: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        l: f64,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Subcommand)]
enum RamseyOp {
    /// Color the complete graph on an eluder witness's positions
    Color {
        #[arg(long)]
        class: String,
        #[arg(long)]
        witness: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Find a monochromatic clique in a coloring file
    Clique {
        #[arg(long)]
        coloring: String,
        /// Exact size to look for; largest when omitted
        #[arg(long)]
        k: Option<usize>,
    },
    /// Extract the star/threshold subsequence induced by a clique
    Extract {
        #[arg(long)]
        class: String,
        #[arg(long)]
        witness: String,
        /// Comma-separated vertex positions
        #[arg(long)]
        vertices: String,
        /// red | blue
        #[arg(long)]
        color: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Sandwich + extraction audit for a class and reference
    Audit {
        #[arg(long)]
        class: String,
        #[arg(long, default_value = "col:0")]
        r#ref: String,
    },
}

#[derive(Subcommand)]
enum RandconOp {
    /// Sample the structured N x (N+1) sign matrix
    ESample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Search seeds for an eluder/star separation
    ESearch {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Count valid star/threshold index sequences of length k
    Count {
        #[arg(long)]
        class: String,
        #[arg(long)]
        k: usize,
        /// Monte Carlo sample count; exhaustive when omitted
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample the sparse N x N sign matrix
    FSample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Remove all 5-step eluder patterns by flipping entries
    Repair {
        #[arg(long)]
        class: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// sample -> repair -> verify -> Forster, end to end
    Pipeline {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_) | Error::Parse { .. } | Error::Malformed(_) => 2,
                Error::ResourceLimit(_) => 3,
                _ => 1,
            }
        }
    };
    std::process::exit(code);
}

fn write_table(table: &FunctionClassTable, out: &Option<String>, args: &[String]) -> Result<()> {
    match out {
        Some(path) => {
            save_class(table, path)?;
            let mut m = ManifestBuilder::new(args.to_vec());
            m.output(path)?;
            m.write_alongside(path)?;
        }
        None => println!("{}", serialize_class(table)),
    }
    Ok(())
}

fn write_witness(w: &WitnessSequence, out: &str) -> Result<()> {
    std::fs::write(out, serde_json::to_string_pretty(&witness_to_json(w)).expect("serializable"))?;
    Ok(())
}

fn argv() -> Vec<String> {
    std::env::args().collect()
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Gen(a) => gen_cmd(a),
        Command::Dim(a) => dim_cmd(a, &cli.format),
        Command::Witness { op } => witness_cmd(op),
        Command::Rank { op } => rank_cmd(op),
        Command::Ramsey { op } => ramsey_cmd(op),
        Command::Randcon { op } => randcon_cmd(op),
        Command::Repro { suite } => repro_cmd(suite, &cli.format),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("{family} requires {flag}")))
}

fn gen_cmd(a: &GenArgs) -> Result<i32> {
    let args = argv();
    match a.family.as_str() {
        "thresholds" => write_table(&gen_thresholds(need(a.n, "--n", "thresholds")?)?, &a.out, &args)?,
        "singletons" => write_table(&gen_singletons(need(a.n, "--n", "singletons")?)?, &a.out, &args)?,
        "parities" => write_table(&gen_parities(need(a.d, "--d", "parities")?)?, &a.out, &args)?,
        "counterexample" => {
            let eps = parse_rational(a.eps.as_deref().unwrap_or("1"))?;
            let margin = parse_rational(&a.diag_margin)?;
            write_table(
                &gen_scale_counterexample(need(a.n, "--n", "counterexample")?, &eps, &margin)?,
                &a.out,
                &args,
            )?
        }
        "exp" => {
            let n = need(a.n, "--n", "exp")?;
            write_table(&gen_exp_class(n, a.funcs.unwrap_or(n))?, &a.out, &args)?
        }
        "relu-star" => {
            let eps = parse_rational(a.eps.as_deref().ok_or_else(|| {
                Error::InvalidParameter("relu-star requires --eps".into())
            })?)?;
            let r = parse_rational(&a.r)?;
            let (table, witness) = gen_relu_star_witness(need(a.d, "--d", "relu-star")?, &eps, &r)?;
            write_table(&table, &a.out, &args)?;
            if let Some(path) = &a.witness_out {
                write_witness(&witness, path)?;
            }
            eprintln!("witness length {}", witness.entries.len());
        }
        "linear-eluder" => {
            let eps = parse_rational(a.eps.as_deref().ok_or_else(|| {
                Error::InvalidParameter("linear-eluder requires --eps".into())
            })?)?;
            let (table, witness) = gen_linear_eluder_witness(need(a.d, "--d", "linear-eluder")?, &eps)?;
            write_table(&table, &a.out, &args)?;
            if let Some(path) = &a.witness_out {
                write_witness(&witness, path)?;
            }
            eprintln!("witness length {}", witness.entries.len());
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown family {other:?}; expected thresholds, singletons, parities, \
                 counterexample, exp, relu-star or linear-eluder"
            )))
        }
    }
    Ok(0)
}

fn dim_cmd(a: &DimArgs, format: &str) -> Result<i32> {
    let table = load_class(&a.class)?;
    if a.measure == "vc" {
        println!("{}", vcdim(&table)?);
        return Ok(0);
    }
    if a.measure == "ldim" {
        println!("{}", ldim(&table)?);
        return Ok(0);
    }
    let measure = match a.measure.as_str() {
        "edim" => Measure::Eluder,
        "sdim" => Measure::Star,
        "tdim" => Measure::Threshold,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown measure {other:?}; expected edim, sdim, tdim, vc or ldim"
            )))
        }
    };
    let reference = parse_ref(&a.r#ref, &table)?;
    let report = match &a.eps {
        Some(eps) => {
            let mut cfg = ScaleSearchConfig::new(parse_rational(eps)?)?;
            if let Some(cap) = a.cap {
                cfg = cfg.with_cap(cap)?;
            }
            if a.sup {
                cfg.sup_mode = SupMode::SupOverCandidates;
            }
            dim_scale(&table, &reference, measure, &cfg)?
        }
        None => {
            if a.sup || a.cap.is_some() {
                return Err(Error::InvalidParameter(
                    "--sup and --cap apply to the scale-sensitive search; pass --eps".into(),
                ));
            }
            dim_comb(&table, &reference, measure)?
        }
    };
    if let Some(path) = &a.witness_out {
        write_witness(&report.witness, path)?;
    }
    match format {
        "json" => println!("{}", serde_json::to_string_pretty(&report_to_json(&report)).expect("serializable")),
        _ => {
            println!("{}", report.value);
            if !report.exact {
                eprintln!("note: length cap hit; value is a lower bound");
            }
        }
    }
    Ok(0)
}

fn witness_cmd(op: &WitnessOp) -> Result<i32> {
    match op {
        WitnessOp::Verify { class, witness } => {
            let table = load_class(class)?;
            let text = std::fs::read_to_string(witness)?;
            let v: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::Malformed(format!("witness file: {e}")))?;
            let w = witness_from_json(&v)?;
            match verify_witness(&table, &w)? {
                Verification::Valid => {
                    println!("valid ({} entries, kind {})", w.entries.len(), w.kind.name());
                    Ok(0)
                }
                Verification::Violation { position, msg } => {
                    println!("invalid at position {position}: {msg}");
                    Ok(1)
                }
            }
        }
    }
}

fn rank_cmd(op: &RankOp) -> Result<i32> {
    match op {
        RankOp::Verify { class, cert } => {
            let table = load_class(class)?;
            let text = std::fs::read_to_string(cert)?;
            let v: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::Malformed(format!("certificate file: {e}")))?;
            let c = certificate_from_json(&v)?;
            let check = verify_embedding(&table, &c)?;
            if check.ok {
                println!("valid (d = {}, worst residual {:.3e})", c.d, check.worst_residual);
                Ok(0)
            } else {
                println!(
                    "invalid: worst residual {:.3e} at point {}, function {}{}",
                    check.worst_residual,
                    check.worst_at.0,
                    check.worst_at.1,
                    if check.norms_ok { "" } else { " (norm budget exceeded)" }
                );
                Ok(1)
            }
        }
        RankOp::Forster { class } => {
            let f = forster_bound(&load_class(class)?)?;
            println!("{:.9}", f.value);
            Ok(0)
        }
        RankOp::NumericRank { class, tol } => {
            println!("{}", numeric_rank(&load_class(class)?, *tol)?);
            Ok(0)
        }
        RankOp::Search { class, d, activation, budget, seed, out } => {
            let table = load_class(class)?;
            let act = match activation.as_str() {
                "identity" => ActivationSpec::identity(),
                "sign" => ActivationSpec::sign(),
                "relu" => ActivationSpec::relu(),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown activation {other:?}; expected identity, sign or relu"
                    )))
                }
            };
            match embedding_search(&table, *d, &act, *budget, *seed)? {
                Some(cert) => {
                    let json = certificate_to_json(&cert);
                    match out {
                        Some(path) => {
                            std::fs::write(path, serde_json::to_string_pretty(&json).expect("serializable"))?;
                            let mut m = ManifestBuilder::new(argv());
                            m.seed(*seed);
                            m.input(class)?;
                            m.output(path)?;
                            m.write_alongside(path)?;
                        }
                        None => println!("{}", serde_json::to_string_pretty(&json).expect("serializable")),
                    }
                    Ok(0)
                }
                None => {
                    println!("no certificate found at d = {d} within budget");
                    Ok(1)
                }
            }
        }
        RankOp::BoundB2 { d, r_phi, r_w, eps } => {
            println!("{:.6}", bound_claim_b2(*d, *r_phi, *r_w, *eps)?);
            Ok(0)
        }
        RankOp::BoundB3 { d, r_phi, r_w, mu, l, eps } => {
            println!("{:.6}", bound_claim_b3(*d, *r_phi, *r_w, *mu, *l, *eps)?);
            Ok(0)
        }
    }
}

fn load_witness(path: &str) -> Result<WitnessSequence> {
    let text = std::fs::read_to_string(path)?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("witness file: {e}")))?;
    witness_from_json(&v)
}

fn ramsey_cmd(op: &RamseyOp) -> Result<i32> {
    match op {
        RamseyOp::Color { class, witness, out } => {
            let table = load_class(class)?;
            let w = load_witness(witness)?;
            let coloring = color_from_witness(&table, &w)?;
            let json = coloring.to_json();
            match out {
                Some(path) => {
                    std::fs::write(path, serde_json::to_string_pretty(&json).expect("serializable"))?;
                    let mut m = ManifestBuilder::new(argv());
                    m.input(class)?;
                    m.input(witness)?;
                    m.output(path)?;
                    m.write_alongside(path)?;
                }
                None => println!("{}", serde_json::to_string_pretty(&json).expect("serializable")),
            }
            Ok(0)
        }
        RamseyOp::Clique { coloring, k } => {
            let text = std::fs::read_to_string(coloring)?;
            let v: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::Malformed(format!("coloring file: {e}")))?;
            let c = EdgeColoring::from_json(&v)?;
            let found = match k {
                Some(k) => find_mono_clique(&c, *k)?,
                None => largest_mono_clique(&c)?,
            };
            match found {
                Some((verts, color)) => {
                    println!(
                        "{} {}",
                        color.name(),
                        verts.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
                    );
                    Ok(0)
                }
                None => {
                    println!("none");
                    Ok(1)
                }
            }
        }
        RamseyOp::Extract { class, witness, vertices, color, out } => {
            let table = load_class(class)?;
            let w = load_witness(witness)?;
            let verts: Vec<usize> = vertices
                .split(',')
                .map(|s| {
                    s.trim().parse().map_err(|_| {
                        Error::InvalidParameter(format!("bad vertex index {s:?} in --vertices"))
                    })
                })
                .collect::<Result<_>>()?;
            let color = match color.as_str() {
                "red" => Color::Red,
                "blue" => Color::Blue,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "color must be red or blue, got {other:?}"
                    )))
                }
            };
            let extracted = extract_subsequence(&table, &w, &verts, color)?;
            match out {
                Some(path) => write_witness(&extracted, path)?,
                None => println!(
                    "{}",
                    serde_json::to_string_pretty(&witness_to_json(&extracted)).expect("serializable")
                ),
            }
            Ok(0)
        }
        RamseyOp::Audit { class, r#ref } => {
            let table = load_class(class)?;
            let reference = parse_ref(r#ref, &table)?;
            let audit = equivalence_audit(&table, &reference)?;
            println!(
                "edim={} sdim={} tdim={} guaranteed={} clique={:?} color={} extracted={} sandwich={} extraction={}",
                audit.edim,
                audit.sdim,
                audit.tdim,
                audit.guaranteed,
                audit.clique,
                audit.color.name(),
                audit.extracted.entries.len(),
                audit.sandwich_holds,
                audit.extraction_holds,
            );
            Ok(if audit.sandwich_holds && audit.extraction_holds { 0 } else { 1 })
        }
    }
}

fn randcon_cmd(op: &RandconOp) -> Result<i32> {
    let args = argv();
    match op {
        RandconOp::ESample { n, seed, out } => {
            write_table(&sample_e_matrix(*n, *seed)?, out, &args)?;
            Ok(0)
        }
        RandconOp::FSample { n, seed, out } => {
            write_table(&sample_f_matrix(*n, *seed)?, out, &args)?;
            Ok(0)
        }
        RandconOp::ESearch { n, seed, trials, c, out } => {
            let cfg = RandomConstructionConfig::new(*n, *seed, *trials, *c)?;
            let (table, report) = search_separation_e(&cfg)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&separation_report_to_json(&report)).expect("serializable")
            );
            if let Some(path) = out {
                save_class(&table, path)?;
                let mut m = ManifestBuilder::new(args.clone());
                m.seed(report.seed);
                m.output(path)?;
                m.write_alongside(path)?;
            }
            Ok(0)
        }
        RandconOp::Count { class, k, samples, seed } => {
            let table = load_class(class)?;
            let budget = match samples {
                Some(s) => CountBudget::MonteCarlo { samples: *s, seed: *seed },
                None => CountBudget::Exhaustive,
            };
            let report = count_valid_sequences(&table, *k, budget)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&count_report_to_json(&report)).expect("serializable")
            );
            Ok(0)
        }
        RandconOp::Repair { class, out } => {
            let table = load_class(class)?;
            let (repaired, flips) = repair_e5_light(&table)?;
            println!("{flips}");
            if let Some(path) = out {
                save_class(&repaired, path)?;
                let mut m = ManifestBuilder::new(args.clone());
                m.input(class)?;
                m.output(path)?;
                m.write_alongside(path)?;
            }
            Ok(0)
        }
        RandconOp::Pipeline { n, seed } => {
            let (_, report) = forster_after_repair(*n, *seed)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&pipeline_report_to_json(&report)).expect("serializable")
            );
            Ok(0)
        }
    }
}

fn repro_cmd(suite: &str, format: &str) -> Result<i32> {
    let names: Vec<&str> = if suite == "all" {
        SUITE_NAMES.to_vec()
    } else {
        vec![suite]
    };
    let mut all_ok = true;
    for name in names {
        let report = run_suite(name)?;
        match format {
            "json" => println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("serializable")),
            "csv" => print!("{}", report.to_csv()),
            _ => {
                println!("== {} ==", report.name);
                println!("{}", report.headers.join("  "));
                for row in &report.rows {
                    println!("{}", row.join("  "));
                }
            }
        }
        if !report.ok() {
            all_ok = false;
            for f in &report.failures {
                eprintln!("{name}: FAIL {f}");
            }
        } else {
            eprintln!("{name}: ok");
        }
    }
    Ok(if all_ok { 0 } else { 1 })
}
