//! Implementations behind the subcommands.
//!
//! Every command resolves its parameters the same way: explicit flag,
//! then the settings file, then the built-in default, and any JSON it
//! writes carries the resolved configuration so a run can be reproduced
//! from its output alone.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use conet::baselines::{pva, thh};
use conet::domain::Dataset;
use conet::features::{assemble, fmt_value, FeatureConfig};
use conet::graph::CoOffenderNetwork;
use conet::learn::{
    eval_kfold as run_kfold, eval_temporal as run_temporal, roc_points, BaselineMethod,
    CandidatePool, ClassifierKind, ClassifierParams, KfoldParams, TemporalParams,
};
use conet::synth::{generate_records, validate_stats, GeneratorConfig};
use conet::{Error, Result};
use serde_json::{json, Value};

use crate::settings::{pick, pick_opt, Settings};
use crate::{
    ClassifierArg, ClassifierFlags, FeaturesArgs, GraphStatsArgs, IngestArgs, KfoldArgs, PoolArg,
    PvaArgs, ReportArgs, SynthArgs, TemporalArgs, ThhArgs,
};

fn io_at(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(|e| io_at(path, e))?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| io_at(path, e))?))
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    let records = Dataset::parse_csv(open(path)?)?;
    Dataset::from_records(records)
}

fn required(path: Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    path.ok_or_else(|| {
        let key = flag.trim_start_matches('-');
        Error::config(format!("missing {flag} (flag or config key `{key}`)"))
    })
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::compute(e.to_string()))?;
    w.write_all(b"\n").map_err(|e| io_at(path, e))?;
    w.flush().map_err(|e| io_at(path, e))
}

fn json_err(e: serde_json::Error) -> Error {
    Error::compute(e.to_string())
}

fn parse_window(raw: &str) -> Result<(NaiveDate, NaiveDate)> {
    let Some((from, to)) = raw.split_once("..") else {
        return Err(Error::config(format!("window must look like FROM..TO, got `{raw}`")));
    };
    let parse = |s: &str| {
        NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
            .map_err(|e| Error::config(format!("window date `{}`: {e}", s.trim())))
    };
    let (from, to) = (parse(from)?, parse(to)?);
    if from > to {
        return Err(Error::config(format!("window start {from} is after its end {to}")));
    }
    Ok((from, to))
}

fn parse_compare(raw: Option<String>) -> Result<Vec<BaselineMethod>> {
    let mut out = Vec::new();
    if let Some(raw) = raw {
        for token in raw.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let method = match token {
                "pva" => BaselineMethod::Pva,
                "thh" => BaselineMethod::Thh,
                other => {
                    return Err(Error::config(format!(
                        "unknown baseline `{other}`; expected pva or thh"
                    )))
                }
            };
            if !out.contains(&method) {
                out.push(method);
            }
        }
    }
    Ok(out)
}

fn classifier_params(f: &ClassifierFlags, s: &mut Settings) -> Result<ClassifierParams> {
    let d = ClassifierParams::default();
    let kind = match pick_opt(f.classifier, s, "classifier")? {
        Some(ClassifierArg::Dt) => ClassifierKind::DecisionTree,
        Some(ClassifierArg::Rf) | None => ClassifierKind::RandomForest,
    };
    Ok(ClassifierParams {
        kind,
        trees: pick(f.trees, s, "trees", d.trees)?,
        max_depth: pick_opt(f.max_depth, s, "max-depth")?,
        min_leaf: pick(f.min_leaf, s, "min-leaf", d.min_leaf)?,
        use_smote: pick(f.smote, s, "smote", d.use_smote)?,
        smote_k: pick(f.smote_k, s, "smote-k", d.smote_k)?,
        smote_amount: pick_opt(f.smote_amount, s, "smote-amount")?,
    })
}

/// Report path, plus the directory that receives plot-ready CSVs.
fn out_and_plot_dir(
    out: Option<PathBuf>,
    plot_dir: Option<PathBuf>,
    s: &mut Settings,
) -> Result<(PathBuf, PathBuf)> {
    let out = pick(out, s, "out", PathBuf::from("report.json"))?;
    let plots = match pick_opt(plot_dir, s, "plot-dir")? {
        Some(dir) => dir,
        None => match out.parent() {
            Some(p) if p.as_os_str().is_empty() => PathBuf::from("."),
            Some(p) => p.to_path_buf(),
            None => PathBuf::from("."),
        },
    };
    Ok((out, plots))
}

fn path_str(p: &Path) -> Value {
    Value::String(p.display().to_string())
}

pub fn synth(a: SynthArgs, s: &mut Settings, threads: usize) -> Result<()> {
    let d = GeneratorConfig::default();
    let cfg = GeneratorConfig {
        offenders: pick(a.offenders, s, "offenders", d.offenders)?,
        months: pick(a.months, s, "months", d.months)?,
        start: pick(a.start, s, "start", d.start)?,
        gangs: pick(a.gangs, s, "gangs", d.gangs)?,
        target_mean_degree: pick(a.mean_degree, s, "mean-degree", d.target_mean_degree)?,
        violent_record_fraction: pick(
            a.violent_fraction,
            s,
            "violent-fraction",
            d.violent_record_fraction,
        )?,
        contagion_strength: pick(
            a.contagion_strength,
            s,
            "contagion-strength",
            d.contagion_strength,
        )?,
        seasonality_amplitude: pick(a.seasonality, s, "seasonality", d.seasonality_amplitude)?,
        seed: pick(a.seed, s, "seed", d.seed)?,
    };
    let out_dir = pick(a.out_dir, s, "out-dir", PathBuf::from("."))?;
    std::fs::create_dir_all(&out_dir).map_err(|e| io_at(&out_dir, e))?;

    let records = generate_records(&cfg)?;
    let csv_path = out_dir.join("arrests.csv");
    let mut w = create(&csv_path)?;
    Dataset::write_csv(&records, &mut w)?;
    w.flush().map_err(|e| io_at(&csv_path, e))?;

    let dataset = Dataset::from_records(records)?;
    let stats = validate_stats(&dataset);
    let stats_path = out_dir.join("stats.json");
    let doc = json!({
        "config": {
            "command": "synth",
            "threads": threads,
            "out_dir": path_str(&out_dir),
            "generator": serde_json::to_value(&cfg).map_err(json_err)?,
        },
        "stats": serde_json::to_value(&stats).map_err(json_err)?,
    });
    write_json(&stats_path, &doc)?;
    println!(
        "wrote {} ({} records) and {}",
        csv_path.display(),
        dataset.len(),
        stats_path.display()
    );
    Ok(())
}

pub fn ingest(a: IngestArgs, s: &mut Settings) -> Result<()> {
    let input = required(pick_opt(a.input, s, "input")?, "--input")?;
    let dataset = load_dataset(&input)?;
    println!("records:   {}", dataset.len());
    println!("offenders: {}", dataset.offender_count());
    println!("events:    {}", dataset.event_count());
    println!("victims:   {}", dataset.victims().len());
    match (dataset.min_date(), dataset.max_date()) {
        (Some(a), Some(b)) => println!("dates:     {a} to {b}"),
        _ => println!("dates:     none"),
    }
    println!("ok");
    Ok(())
}

pub fn graph_stats(a: GraphStatsArgs, s: &mut Settings, threads: usize) -> Result<()> {
    let input = required(pick_opt(a.input, s, "input")?, "--input")?;
    let dataset = load_dataset(&input)?;
    let stats = validate_stats(&dataset);
    let doc = json!({
        "config": {
            "command": "graph-stats",
            "threads": threads,
            "input": path_str(&input),
        },
        "stats": serde_json::to_value(&stats).map_err(json_err)?,
    });
    match pick_opt(a.out, s, "out")? {
        Some(out) => {
            write_json(&out, &doc)?;
            println!("wrote {}", out.display());
        }
        None => {
            let text =
                serde_json::to_string_pretty(&doc).map_err(|e| Error::compute(e.to_string()))?;
            println!("{text}");
        }
    }
    Ok(())
}

pub fn features(a: FeaturesArgs, s: &mut Settings) -> Result<()> {
    let input = required(pick_opt(a.input, s, "input")?, "--input")?;
    let out = pick(a.out, s, "out", PathBuf::from("features.csv"))?;
    let window = match pick_opt(a.window, s, "window")? {
        Some(raw) => Some(parse_window(&raw)?),
        None => None,
    };
    let columns = pick_opt(a.columns, s, "columns")?.map(|raw: String| {
        raw.split(',').map(str::trim).filter(|c| !c.is_empty()).map(String::from).collect()
    });
    let fc = FeatureConfig {
        mask_own_labels: pick(a.mask_own_labels, s, "mask-own-labels", true)?,
        seed: pick(a.seed, s, "seed", 0)?,
        per_crime: pick(a.per_crime.then_some(true), s, "per-crime", false)?,
        columns,
    };
    let dataset = load_dataset(&input)?;
    let graph = CoOffenderNetwork::build(&dataset, window);
    let fm = assemble(&dataset, &graph, &fc)?;
    let mut w = create(&out)?;
    fm.write_csv(&mut w)?;
    w.flush().map_err(|e| io_at(&out, e))?;
    println!("wrote {} ({} rows, {} columns)", out.display(), fm.rows.len(), fm.columns.len());
    Ok(())
}

pub fn baseline_pva(a: PvaArgs, s: &mut Settings) -> Result<()> {
    let input = required(pick_opt(a.input, s, "input")?, "--input")?;
    let out = pick(a.out, s, "out", PathBuf::from("watchlist.txt"))?;
    let dataset = load_dataset(&input)?;
    let as_of = match pick_opt(a.as_of, s, "as-of")? {
        Some(d) => d,
        None => dataset.max_date().ok_or_else(|| {
            Error::validation("dataset has no records, so there is no default as-of date")
        })?,
    };
    let delta = pick_opt(a.delta_days, s, "delta-days")?;
    let list = pva(&dataset, as_of, delta);
    let mut w = create(&out)?;
    list.write_text(&mut w)?;
    w.flush().map_err(|e| io_at(&out, e))?;
    println!("{}", list.summary());
    println!("wrote {}", out.display());
    Ok(())
}

pub fn baseline_thh(a: ThhArgs, s: &mut Settings) -> Result<()> {
    let input = required(pick_opt(a.input, s, "input")?, "--input")?;
    let out = pick(a.out, s, "out", PathBuf::from("watchlist.txt"))?;
    let dataset = load_dataset(&input)?;
    if dataset.victims().is_empty() {
        return Err(Error::validation(
            "no record sets the homicide_victim flag, so the two-hop heuristic has nowhere \
             to start; use a dataset with victims or a different baseline",
        ));
    }
    let graph = CoOffenderNetwork::build(&dataset, None);
    let list = thh(&graph, &dataset);
    let mut w = create(&out)?;
    list.write_text(&mut w)?;
    w.flush().map_err(|e| io_at(&out, e))?;
    println!("{}", list.summary());
    println!("wrote {}", out.display());
    Ok(())
}

fn write_roc_csv(path: &Path, points: &[(f64, f64)]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "fpr,tpr").map_err(|e| io_at(path, e))?;
    for &(fpr, tpr) in points {
        writeln!(w, "{},{}", fmt_value(fpr), fmt_value(tpr)).map_err(|e| io_at(path, e))?;
    }
    w.flush().map_err(|e| io_at(path, e))
}

fn embed_config(report: Value, config: Value) -> Result<Value> {
    let Value::Object(mut map) = report else {
        return Err(Error::compute("evaluation report did not serialize to an object"));
    };
    map.insert("config".into(), config);
    Ok(Value::Object(map))
}

pub fn eval_kfold(a: KfoldArgs, s: &mut Settings, threads: usize) -> Result<()> {
    let input = required(pick_opt(a.input, s, "input")?, "--input")?;
    let (out, plot_dir) = out_and_plot_dir(a.out, a.plot_dir, s)?;
    let compare = parse_compare(pick_opt(a.compare, s, "compare")?)?;
    if compare.contains(&BaselineMethod::Pva) {
        return Err(Error::config(
            "the cross-validation protocol scores all-history labels, so a past-violence \
             watchlist would be the label itself; --compare supports thh here",
        ));
    }
    let params = KfoldParams {
        classifier: classifier_params(&a.classifier, s)?,
        folds: pick(a.folds, s, "folds", KfoldParams::default().folds)?,
        seed: pick(a.seed, s, "seed", KfoldParams::default().seed)?,
        compare_thh: compare.contains(&BaselineMethod::Thh),
    };
    let dataset = load_dataset(&input)?;
    let outcome = run_kfold(&dataset, &params)?;

    std::fs::create_dir_all(&plot_dir).map_err(|e| io_at(&plot_dir, e))?;
    let roc_path = plot_dir.join("roc_points.csv");
    write_roc_csv(&roc_path, &roc_points(&outcome.scores, &outcome.truth))?;

    let config = json!({
        "command": "eval kfold",
        "threads": threads,
        "input": path_str(&input),
        "out": path_str(&out),
        "plot_dir": path_str(&plot_dir),
    });
    write_json(&out, &embed_config(serde_json::to_value(&outcome.report).map_err(json_err)?, config)?)?;
    println!("wrote {} and {}", out.display(), roc_path.display());
    Ok(())
}

fn write_month_csv(path: &Path, slices: &[conet::learn::SliceMetrics]) -> Result<()> {
    let cell = |v: Option<f64>| v.map(fmt_value).unwrap_or_default();
    let mut w = create(path)?;
    writeln!(w, "month,method,precision,recall,f1").map_err(|e| io_at(path, e))?;
    for slice in slices {
        writeln!(
            w,
            "{},{},{},{},{}",
            slice.id,
            slice.method,
            fmt_value(slice.precision),
            cell(slice.recall),
            cell(slice.f1),
        )
        .map_err(|e| io_at(path, e))?;
    }
    w.flush().map_err(|e| io_at(path, e))
}

pub fn eval_temporal(a: TemporalArgs, s: &mut Settings, threads: usize) -> Result<()> {
    let input = required(pick_opt(a.input, s, "input")?, "--input")?;
    let (out, plot_dir) = out_and_plot_dir(a.out, a.plot_dir, s)?;
    let d = TemporalParams::default();
    let pool = match pick_opt(a.pool, s, "pool")? {
        Some(PoolArg::RecentlyActive) => CandidatePool::RecentlyActive,
        Some(PoolArg::All) => CandidatePool::All,
        None => d.pool,
    };
    let params = TemporalParams {
        classifier: classifier_params(&a.classifier, s)?,
        seed: pick(a.seed, s, "seed", d.seed)?,
        start_offset: pick(a.start_month, s, "start-month", d.start_offset)?,
        frf_days: pick(a.frf_days, s, "frf-days", d.frf_days)?,
        pool,
        pva_window_days: pick_opt(a.pva_window_days, s, "pva-window-days")?,
        compare: parse_compare(pick_opt(a.compare, s, "compare")?)?,
    };
    let dataset = load_dataset(&input)?;
    let outcome = run_temporal(&dataset, &params)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }

    std::fs::create_dir_all(&plot_dir).map_err(|e| io_at(&plot_dir, e))?;
    let month_path = plot_dir.join("p_r_f_by_month.csv");
    write_month_csv(&month_path, &outcome.report.slices)?;

    let config = json!({
        "command": "eval temporal",
        "threads": threads,
        "input": path_str(&input),
        "out": path_str(&out),
        "plot_dir": path_str(&plot_dir),
    });
    write_json(&out, &embed_config(serde_json::to_value(&outcome.report).map_err(json_err)?, config)?)?;
    println!("wrote {} and {}", out.display(), month_path.display());
    Ok(())
}

pub fn report(a: ReportArgs, s: &mut Settings) -> Result<()> {
    let out = pick(a.out, s, "out", PathBuf::from("merged.json"))?;
    let mut runs = Vec::with_capacity(a.inputs.len());
    for path in &a.inputs {
        let value: Value = serde_json::from_reader(open(path)?).map_err(|e| {
            Error::validation(format!("{}: not a valid JSON report: {e}", path.display()))
        })?;
        runs.push(value);
    }
    let count = runs.len();
    write_json(&out, &json!({ "runs": runs }))?;
    println!("merged {count} reports into {}", out.display());
    Ok(())
}
