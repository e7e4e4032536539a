//! Command-line harness around the library.
//!
//! Subcommands: `table build`, `table corrupt`, `recover one`,
//! `experiment run`, `aut order`, `classify`, `ov run`, `parity run`.
//! Run with no arguments for usage.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::exit;
use std::sync::Arc;

use ttlab::experiment::{
    emit_report, render_report, run_experiment, Aggregate, ConfigBuilder, ExperimentConfig,
    ExperimentReport, ReportFormat, TrialRecord,
};
use ttlab::finegrained::{
    aut_order_closed_form, classify_graph, count_k_cliques_special, default_sample_count,
    majority_failure_bound, ov_sweep, parity_sweep, GraphFamily,
};
use ttlab::noise::{
    build_table, corrupt, corrupt_with_mask, CorruptionMask, CorruptionStrategy, NoiseModel,
    TruthTable,
};
use ttlab::perm::{aut_group, AutStrategy};
use ttlab::problems::{make_problem, GraphAutOracle, GraphInstance, Params};
use ttlab::ratio::Ratio64;
use ttlab::recover::{recover_one, Branch, RecoveryConfig};
use ttlab::rng::derive_seed;
use ttlab::aggregate::{InstanceIndex, InstanceStabilizerOracle, ProblemSpec};
use ttlab::{Error, Result};

const USAGE: &str = "\
ttlab — truth-table recovery laboratory

USAGE:
  ttlab table build     --problem ID --n N [--k K --d D --sigma S --clause MASK]
                        --out FILE [--parallelism P]
  ttlab table corrupt   --problem ID --n N [...] --table FILE --delta R --seed S
                        [--model exact|bernoulli] [--strategy flip|wrong|constant:V]
                        --out FILE
  ttlab recover one     --problem ID --n N [...] --table FILE --mask FILE
                        --instance I --epsilon R [--sample-size S]
                        [--strategy flip|wrong|constant:V]
  ttlab experiment run  [--config FILE] --problem ID --n N [...] --delta R
                        --epsilon R [--sample-size S] --trials T --seed S
                        [--model M] [--strategy S] [--parallelism P]
                        [--report FILE] [--format json|csv]
  ttlab aut order       (--graph FILE | --problem ID --n N [...] --instance I)
                        [--strategy exhaustive|backtracking]
  ttlab classify        --graph FILE [--k K]
  ttlab ov run          --n N --d D --delta R --epsilon R [--samples S]
                        --seed S --trials T [--parallelism P]
                        [--report FILE] [--format json|csv]
  ttlab parity run      --n N --k K --delta R --epsilon R [--samples S]
                        --seed S --trials T [--parallelism P]
                        [--report FILE] [--format json|csv]

Rationals accept `a/b` or decimal forms. Graph files: first line n, then
1-based `i j` edge lines or a single 0x-prefixed hex edge vector.
";

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        eprint!("{USAGE}");
        exit(2);
    }
    if let Err(e) = dispatch(&args) {
        eprintln!("error: {e}");
        exit(1);
    }
}

fn dispatch(args: &[String]) -> Result<()> {
    let bad = |msg: &str| Error::BadParams(msg.to_string());
    match (args.first().map(String::as_str), args.get(1).map(String::as_str)) {
        (Some("table"), Some("build")) => table_build(&parse_flags(&args[2..])?),
        (Some("table"), Some("corrupt")) => table_corrupt(&parse_flags(&args[2..])?),
        (Some("recover"), Some("one")) => recover_one_cmd(&parse_flags(&args[2..])?),
        (Some("experiment"), Some("run")) => experiment_run(&parse_flags(&args[2..])?),
        (Some("aut"), Some("order")) => aut_order_cmd(&parse_flags(&args[2..])?),
        (Some("classify"), _) => classify_cmd(&parse_flags(&args[1..])?),
        (Some("ov"), Some("run")) => finegrained_run(&parse_flags(&args[2..])?, true),
        (Some("parity"), Some("run")) => finegrained_run(&parse_flags(&args[2..])?, false),
        (Some("help"), _) | (Some("--help"), _) => {
            print!("{USAGE}");
            Ok(())
        }
        _ => Err(bad("unknown subcommand; run `ttlab help`")),
    }
}

type Flags = BTreeMap<String, String>;

fn parse_flags(args: &[String]) -> Result<Flags> {
    let mut flags = Flags::new();
    let mut it = args.iter();
    while let Some(token) = it.next() {
        let Some(name) = token.strip_prefix("--") else {
            return Err(Error::BadParams(format!("expected a --flag, got `{token}`")));
        };
        if let Some((key, value)) = name.split_once('=') {
            flags.insert(key.to_string(), value.to_string());
            continue;
        }
        let value = it
            .next()
            .ok_or_else(|| Error::BadParams(format!("flag --{name} needs a value")))?;
        flags.insert(name.to_string(), value.clone());
    }
    Ok(flags)
}

fn need<'a>(flags: &'a Flags, key: &str) -> Result<&'a str> {
    flags
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::BadParams(format!("missing --{key}")))
}

fn parse_flag<T: std::str::FromStr>(flags: &Flags, key: &str) -> Result<Option<T>> {
    match flags.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Error::BadParams(format!("bad value `{v}` for --{key}"))),
    }
}

fn problem_from_flags(flags: &Flags) -> Result<ProblemSpec> {
    let id = need(flags, "problem")?;
    let mut params = Params::new();
    for key in ["n", "k", "d", "sigma"] {
        if let Some(v) = parse_flag::<i64>(flags, key)? {
            params.insert(key.to_string(), v);
        }
    }
    let clause = parse_flag::<i64>(flags, "clause")?.map(|mask| {
        let sigma = params.get("sigma").copied().unwrap_or(2) as u32;
        let k = params.get("k").copied().unwrap_or(1) as u32;
        let len = (sigma as u64).pow(k) as usize;
        (0..len).map(|i| mask >> i & 1 == 1).collect()
    });
    make_problem(id, &params, clause)
}

fn strategy_from_flags(flags: &Flags) -> Result<CorruptionStrategy> {
    match flags.get("strategy").map(String::as_str) {
        None | Some("flip") => Ok(CorruptionStrategy::FlipBoolean),
        Some("wrong") => Ok(CorruptionStrategy::ReplaceUniformWrong),
        Some(s) => s
            .strip_prefix("constant:")
            .and_then(|v| v.parse().ok())
            .map(CorruptionStrategy::Constant)
            .ok_or_else(|| Error::BadParams(format!("bad strategy `{s}`"))),
    }
}

fn model_from_flags(flags: &Flags) -> Result<NoiseModel> {
    match flags.get("model").map(String::as_str) {
        None | Some("exact") => Ok(NoiseModel::ExactFraction),
        Some("bernoulli") => Ok(NoiseModel::IidBernoulli),
        Some(m) => Err(Error::BadParams(format!("bad model `{m}`"))),
    }
}

fn table_build(flags: &Flags) -> Result<()> {
    let problem = problem_from_flags(flags)?;
    let out = need(flags, "out")?;
    let parallelism = parse_flag(flags, "parallelism")?.unwrap_or(0);
    let table = build_table(problem.as_ref(), parallelism)?;
    table.save(Path::new(out))?;
    println!(
        "wrote {} entries ({} bits each) for `{}` n={} to {}",
        table.entry_count(),
        table.value_bits(),
        table.problem_id(),
        table.n(),
        out
    );
    Ok(())
}

fn table_corrupt(flags: &Flags) -> Result<()> {
    let problem = problem_from_flags(flags)?;
    let table = TruthTable::load(Path::new(need(flags, "table")?), problem.as_ref())?;
    let delta: Ratio64 = need(flags, "delta")?.parse()?;
    let seed = parse_flag(flags, "seed")?.unwrap_or(0u64);
    let out = need(flags, "out")?;
    let (_, mask) = corrupt(
        Arc::new(table),
        delta,
        seed,
        model_from_flags(flags)?,
        strategy_from_flags(flags)?,
    )?;
    mask.save(Path::new(out))?;
    println!(
        "mask selects {} of {} entries (delta = {}) -> {}",
        mask.count(),
        mask.entry_count(),
        mask.delta(),
        out
    );
    Ok(())
}

fn recover_one_cmd(flags: &Flags) -> Result<()> {
    let problem = problem_from_flags(flags)?;
    let table = TruthTable::load(Path::new(need(flags, "table")?), problem.as_ref())?;
    let mask = CorruptionMask::load(Path::new(need(flags, "mask")?))?;
    let corrupted = corrupt_with_mask(Arc::new(table), mask, strategy_from_flags(flags)?)?;
    let instance: u64 = need(flags, "instance")?
        .parse()
        .map_err(|_| Error::BadParams("bad --instance".into()))?;
    let epsilon: Ratio64 = need(flags, "epsilon")?.parse()?;
    let mut config = RecoveryConfig::new(epsilon)?;
    if let Some(s) = parse_flag(flags, "sample-size")? {
        config = config.with_override(s);
    }
    let outcome = recover_one(problem.as_ref(), InstanceIndex(instance), &corrupted, &config)?;
    println!("instance   : {instance}");
    println!("value      : {}", outcome.value);
    println!(
        "branch     : {}",
        match outcome.branch {
            Branch::Symmetric => "symmetric",
            Branch::Query => "query",
        }
    );
    println!("aut order  : {}", outcome.aut_order);
    println!("queries    : {}", outcome.queries_made);
    if let Some(margin) = outcome.majority_margin {
        println!("majority   : {margin}");
    }
    Ok(())
}

fn experiment_run(flags: &Flags) -> Result<()> {
    let mut builder = ConfigBuilder::new();
    if let Some(path) = flags.get("config") {
        let text = std::fs::read_to_string(path)?;
        builder.load_file(&text)?;
    }
    for (flag, key) in [
        ("problem", "problem"),
        ("n", "n"),
        ("k", "k"),
        ("d", "d"),
        ("sigma", "sigma"),
        ("clause", "clause"),
        ("delta", "delta"),
        ("epsilon", "epsilon"),
        ("sample-size", "sample_size"),
        ("trials", "trials"),
        ("seed", "seed"),
        ("model", "model"),
        ("strategy", "strategy"),
        ("parallelism", "parallelism"),
        ("report", "report"),
        ("format", "format"),
    ] {
        if let Some(value) = flags.get(flag) {
            builder.set(key, value, 0)?;
        }
    }
    let config = builder.build()?;
    let report = run_experiment(&config)?;
    finish_report(report)
}

fn finish_report(report: ExperimentReport) -> Result<()> {
    println!(
        "{} n={:?}: {} trials, success rate {:.6}, all-correct trials {:.2}, bound {:.3e}",
        report.config.problem,
        report.config.params.get("n").copied().unwrap_or_default(),
        report.trials.len(),
        report.aggregate.instance_success_rate,
        report.aggregate.trial_all_correct_rate,
        report.aggregate.theoretical_bound,
    );
    for t in &report.trials {
        println!(
            "  seed {:>20}: corrupted {:>8}, symmetric {:>8}, query {:>8}, correct {:>8}/{}, undecided {}, queries {:>10}, {} ms",
            t.seed, t.corrupted, t.symmetric, t.query_branch, t.correct, t.total,
            t.majority_undefined, t.queries, t.ms
        );
    }
    if let Some(path) = report.config.report_path.clone() {
        let format = report.config.format;
        emit_report(&report, format, Path::new(&path))?;
        println!("report written to {path}");
    } else if report.config.format == ReportFormat::Csv {
        print!("{}", render_report(&report, ReportFormat::Csv)?);
    }
    Ok(())
}

fn aut_order_cmd(flags: &Flags) -> Result<()> {
    let strategy = match flags.get("strategy").map(String::as_str) {
        None | Some("backtracking") => AutStrategy::Backtracking,
        Some("exhaustive") => AutStrategy::Exhaustive,
        Some(s) => return Err(Error::BadParams(format!("bad strategy `{s}`"))),
    };
    let chain = if let Some(path) = flags.get("graph") {
        let text = std::fs::read_to_string(path)?;
        let graph = GraphInstance::parse(&text)?;
        aut_group(&GraphAutOracle(&graph), graph.n(), strategy)?
    } else {
        let problem = problem_from_flags(flags)?;
        let instance: u64 = need(flags, "instance")?
            .parse()
            .map_err(|_| Error::BadParams("bad --instance".into()))?;
        let oracle = InstanceStabilizerOracle::new(problem.as_ref(), InstanceIndex(instance));
        aut_group(&oracle, problem.group_degree(), strategy)?
    };
    println!("automorphism group order: {}", chain.group_order());
    let base: Vec<String> = chain.base().iter().map(|b| (b + 1).to_string()).collect();
    println!("base points (1-based)   : [{}]", base.join(", "));
    let orbits: Vec<String> = chain
        .levels()
        .iter()
        .map(|l| l.orbit().len().to_string())
        .collect();
    println!("basic orbit lengths     : [{}]", orbits.join(", "));
    Ok(())
}

fn classify_cmd(flags: &Flags) -> Result<()> {
    let text = std::fs::read_to_string(need(flags, "graph")?)?;
    let graph = GraphInstance::parse(&text)?;
    let k = parse_flag(flags, "k")?.unwrap_or(3usize);
    let family = classify_graph(&graph);
    match family {
        GraphFamily::Other => {
            println!("family: other (no closed form; automorphism group is small)");
        }
        GraphFamily::Known { base, complemented } => {
            println!(
                "family: {:?}{}",
                base,
                if complemented { " (complement)" } else { "" }
            );
            println!(
                "closed-form |Aut|: {}",
                aut_order_closed_form(family, graph.n())?
            );
            let count = count_k_cliques_special(family, graph.n(), k)?;
            println!("{k}-cliques: {count} (parity {})", count.bit(0) as u8);
        }
    }
    Ok(())
}

/// Shared sweep harness for `ov run` and `parity run`.
fn finegrained_run(flags: &Flags, is_ov: bool) -> Result<()> {
    let n: usize = need(flags, "n")?
        .parse()
        .map_err(|_| Error::BadParams("bad --n".into()))?;
    let delta: Ratio64 = need(flags, "delta")?.parse()?;
    if delta.cmp_fraction(1, 2) != std::cmp::Ordering::Less {
        return Err(Error::BadDelta(delta.to_string()));
    }
    let epsilon: Ratio64 = flags
        .get("epsilon")
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(Ratio64::new(1, 4).expect("constant"));
    let samples = parse_flag::<u64>(flags, "samples")?;
    let trials: u32 = parse_flag(flags, "trials")?.unwrap_or(1);
    let master_seed: u64 = parse_flag(flags, "seed")?.unwrap_or(0);
    let parallelism: usize = parse_flag(flags, "parallelism")?.unwrap_or(0);

    let mut params = Params::new();
    params.insert("n".to_string(), n as i64);
    let problem = if is_ov {
        let d: usize = need(flags, "d")?
            .parse()
            .map_err(|_| Error::BadParams("bad --d".into()))?;
        params.insert("d".to_string(), d as i64);
        make_problem("ov", &params, None)?
    } else {
        let k: usize = need(flags, "k")?
            .parse()
            .map_err(|_| Error::BadParams("bad --k".into()))?;
        params.insert("k".to_string(), k as i64);
        make_problem("parity_kclique", &params, None)?
    };
    let table = Arc::new(build_table(problem.as_ref(), parallelism)?);
    let samples_used = samples.unwrap_or_else(|| default_sample_count(n, epsilon));

    let mut trials_out = Vec::new();
    let mut total_correct = 0u64;
    let mut total_instances = 0u64;
    let mut perfect = 0u64;
    for t in 0..trials {
        let seed = derive_seed(master_seed, t as u64);
        let (corrupted, mask) = corrupt(
            table.clone(),
            delta,
            seed,
            NoiseModel::ExactFraction,
            CorruptionStrategy::FlipBoolean,
        )?;
        let started = std::time::Instant::now();
        let sweep = if is_ov {
            let d = params["d"] as usize;
            ov_sweep(n, d, &corrupted, epsilon, Some(samples_used), seed, parallelism)?
        } else {
            let k = params["k"] as usize;
            parity_sweep(n, k, &corrupted, epsilon, Some(samples_used), seed, parallelism)?
        };
        let ms = started.elapsed().as_millis() as u64;
        total_correct += sweep.correct;
        total_instances += sweep.total;
        if sweep.correct == sweep.total {
            perfect += 1;
        }
        trials_out.push(TrialRecord {
            seed,
            corrupted: mask.count(),
            total: sweep.total,
            symmetric: sweep.symmetric,
            query_branch: sweep.query_branch,
            correct: sweep.correct,
            majority_undefined: sweep.majority_undefined,
            queries: sweep.queries,
            ms,
        });
    }

    let advantage = (0.5 - delta.as_f64()) / 2.0;
    let config = ExperimentConfig {
        problem: problem.id(),
        params,
        delta,
        epsilon,
        sample_size_override: Some(samples_used),
        trials,
        master_seed,
        model: NoiseModel::ExactFraction,
        strategy: CorruptionStrategy::FlipBoolean,
        parallelism,
        report_path: flags.get("report").cloned(),
        format: match flags.get("format").map(String::as_str) {
            None | Some("json") => ReportFormat::Json,
            Some("csv") => ReportFormat::Csv,
            Some(f) => return Err(Error::BadParams(format!("bad format `{f}`"))),
        },
    };
    let report = ExperimentReport {
        config,
        trials: trials_out,
        aggregate: Aggregate {
            instance_success_rate: total_correct as f64 / total_instances as f64,
            trial_all_correct_rate: perfect as f64 / trials as f64,
            theoretical_bound: table.entry_count() as f64
                * majority_failure_bound(samples_used, advantage),
        },
    };
    finish_report(report)
}
