mod svg;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use synthloc::io::{read_dataset, read_npy, write_dataset, write_report, NpyData, ReportFormat};
use synthloc::metrics::evaluate_all;
use synthloc::{
    config, Dataset, Error, EvalOptions, Result, TimeSeriesBuilder, TimeSeriesTensor,
    METRIC_NAMES,
};

#[derive(Parser)]
#[command(
    name = "synthloc",
    version,
    about = "Synthetic time-series datasets with ground-truth masks, and attribution scoring against them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate dataset directories from a YAML config
    Generate {
        /// YAML config file
        #[arg(long)]
        config: PathBuf,
        /// Output directory, one subdirectory per dataset
        #[arg(long)]
        out: PathBuf,
        /// Generate only the named dataset
        #[arg(long)]
        dataset: Option<String>,
        /// Drop the raw signal/feature component tensors
        #[arg(long)]
        no_components: bool,
        /// Shuffle samples with this seed after generation
        #[arg(long, value_name = "SEED")]
        shuffle: Option<u64>,
    },
    /// Score an attribution tensor against a dataset's ground-truth mask
    Evaluate {
        /// Dataset directory written by `generate`
        #[arg(long)]
        dataset: PathBuf,
        /// Attribution tensor (.npy) with the dataset's X shape
        #[arg(long)]
        attributions: PathBuf,
        /// Comma-separated metric names, or `all`
        #[arg(long, default_value = "all")]
        metrics: String,
        /// Rescale the AUC metrics so chance is 0 and perfect is 1
        #[arg(long)]
        normalize: bool,
        /// Rank signed attribution values instead of absolute ones
        #[arg(long)]
        no_abs: bool,
        /// Report file to write
        #[arg(long)]
        out: PathBuf,
        /// Report format
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Print a dataset directory's shape, classes, and mask statistics
    Inspect {
        /// Dataset directory written by `generate`
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Render per-sample component plots (signal, feature, sum) to an SVG
    Plot {
        /// Dataset directory written by `generate`
        #[arg(long)]
        dataset: PathBuf,
        /// Plot this sample index only
        #[arg(long, conflicts_with = "per_class")]
        sample: Option<usize>,
        /// Plot the first sample of each class (the default)
        #[arg(long)]
        per_class: bool,
        /// Output SVG path
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 2 on usage errors by default; this tool reserves 2
            // for I/O problems, so usage errors are remapped to 1.
            let code = if e.exit_code() == 0 { 0 } else { 1 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let is_inspect = matches!(cli.command, Command::Inspect { .. });
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if matches!(err, Error::MissingComponents) {
                eprintln!("hint: regenerate without --no-components to keep the component tensors");
            }
            ExitCode::from(exit_code(&err, is_inspect))
        }
    }
}

fn exit_code(err: &Error, is_inspect: bool) -> u8 {
    if is_inspect {
        return 2;
    }
    match err {
        Error::Io { .. } | Error::MissingFile(_) | Error::Format { .. } => 2,
        _ => 1,
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate {
            config,
            out,
            dataset,
            no_components,
            shuffle,
        } => cmd_generate(config, out, dataset, no_components, shuffle),
        Command::Evaluate {
            dataset,
            attributions,
            metrics,
            normalize,
            no_abs,
            out,
            format,
        } => cmd_evaluate(dataset, attributions, metrics, normalize, no_abs, out, format),
        Command::Inspect { dataset } => cmd_inspect(dataset),
        Command::Plot {
            dataset,
            sample,
            per_class: _,
            out,
        } => cmd_plot(dataset, sample, out),
    }
}

fn cmd_generate(
    config_path: PathBuf,
    out: PathBuf,
    dataset: Option<String>,
    no_components: bool,
    shuffle: Option<u64>,
) -> Result<()> {
    let mut configs = config::load(&config_path)?;
    if let Some(name) = &dataset {
        if !configs.contains_key(name) {
            let known: Vec<&str> = configs.keys().map(String::as_str).collect();
            return Err(Error::Config(format!(
                "no dataset named `{name}` in config (have: {})",
                known.join(", ")
            )));
        }
        configs.retain(|k, _| k == name);
    }

    let mut rows: Vec<(String, String, usize, f64)> = Vec::new();
    for (name, mut cfg) in configs {
        if no_components {
            cfg.keep_components = false;
        }
        let ds = TimeSeriesBuilder::from_config(cfg).build()?;
        let ds = match shuffle {
            Some(seed) => ds.shuffled(seed),
            None => ds,
        };
        write_dataset(&ds, out.join(&name))?;
        let (n, d, t) = ds.shape();
        rows.push((
            name,
            format!("({n}, {d}, {t})"),
            ds.meta().n_classes,
            ds.mask().prevalence(),
        ));
    }

    let name_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(7);
    let shape_w = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max(5);
    println!(
        "{:<name_w$}  {:<shape_w$}  {:>7}  {:>10}",
        "dataset", "shape", "classes", "prevalence"
    );
    for (name, shape, classes, prevalence) in rows {
        println!(
            "{name:<name_w$}  {shape:<shape_w$}  {classes:>7}  {:>10}",
            format!("{prevalence:.6}")
        );
    }
    Ok(())
}

fn cmd_evaluate(
    dataset: PathBuf,
    attributions: PathBuf,
    metrics: String,
    normalize: bool,
    no_abs: bool,
    out: PathBuf,
    format: String,
) -> Result<()> {
    let ds = read_dataset(&dataset)?;
    let array = read_npy(&attributions)?;
    let (n, d, t) = ds.shape();
    if array.shape != [n, d, t] {
        return Err(Error::ShapeMismatch {
            expected: vec![n, d, t],
            actual: array.shape,
        });
    }
    // integer attribution files (a mask, say) are accepted and widened
    let values: Vec<f64> = match array.data {
        NpyData::F64(v) => v,
        NpyData::I64(v) => v.into_iter().map(|x| x as f64).collect(),
        NpyData::U8(v) => v.into_iter().map(f64::from).collect(),
    };
    let attr = TimeSeriesTensor::new((n, d, t), values)?;

    let names: Vec<&str> = if metrics.trim() == "all" {
        METRIC_NAMES.to_vec()
    } else {
        metrics
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect()
    };
    let opts = EvalOptions {
        use_abs: !no_abs,
        normalize,
        ..EvalOptions::default()
    };
    let results = evaluate_all(&attr, &ds, &opts, &names)?;

    let report_format: ReportFormat = format.parse()?;
    write_report(&results, &out, report_format)?;

    for name in &names {
        let r = &results[*name];
        println!("{name} {:.6}", r.mean);
        if r.n_excluded > 0 {
            eprintln!("note: {name} skipped {} degenerate samples", r.n_excluded);
        }
    }
    Ok(())
}

fn cmd_inspect(dataset: PathBuf) -> Result<()> {
    let ds = read_dataset(&dataset)?;
    let (n, d, t) = ds.shape();
    let meta = ds.meta();
    println!("shape: ({n}, {d}, {t})");
    println!("normalization: {}", meta.normalization);
    println!("random_state: {}", meta.random_state);
    println!("feature_overlap: {}", meta.feature_overlap);
    println!("components: {}", if ds.components().is_some() { "yes" } else { "no" });
    println!("generator_catalog_version: {}", meta.generator_catalog_version);
    println!("config_fingerprint: {}", meta.config_fingerprint);

    println!("classes:");
    for (label, count) in ds.class_counts() {
        let samples = ds.samples_of_class(label);
        let ones: usize = samples
            .iter()
            .map(|&s| ds.mask().sample(s).iter().map(|&v| usize::from(v)).sum::<usize>())
            .sum();
        let cells = samples.len() * d * t;
        let prevalence = if cells == 0 { 0.0 } else { ones as f64 / cells as f64 };
        println!("  {label}: {count} samples, prevalence {prevalence:.6}");
    }

    println!("window lengths:");
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for s in 0..n {
        for c in 0..d {
            for (_, len) in ds.mask().runs(s, c) {
                *histogram.entry(len).or_insert(0) += 1;
            }
        }
    }
    if histogram.is_empty() {
        println!("  none");
    }
    for (len, count) in histogram {
        println!("  {len}: {count}");
    }
    Ok(())
}

fn cmd_plot(dataset: PathBuf, sample: Option<usize>, out: PathBuf) -> Result<()> {
    let ds = read_dataset(&dataset)?;
    let components = ds.components().ok_or(Error::MissingComponents)?;
    let (n, d, _) = ds.shape();

    let samples: Vec<usize> = match sample {
        Some(i) => {
            if i >= n {
                return Err(Error::Config(format!(
                    "sample {i} out of range for {n} samples"
                )));
            }
            vec![i]
        }
        None => ds
            .class_counts()
            .iter()
            .filter_map(|&(label, _)| ds.samples_of_class(label).first().copied())
            .collect(),
    };

    let rows: Vec<svg::PanelRow> = samples.iter().map(|&s| panel_row(&ds, components, s, d)).collect();
    let text = svg::render(&rows);
    std::fs::write(&out, text).map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;
    Ok(())
}

fn panel_row(ds: &Dataset, components: &synthloc::Components, s: usize, d: usize) -> svg::PanelRow {
    let channels = |tensor: &TimeSeriesTensor| -> Vec<Vec<f64>> {
        (0..d).map(|c| tensor.slice(s, c).to_vec()).collect()
    };
    let signal = channels(&components.signal);
    let feature = channels(&components.feature);
    // the sum panel shows the raw additive series, not the normalized x
    let sum: Vec<Vec<f64>> = signal
        .iter()
        .zip(&feature)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
        .collect();

    let mut windows: Vec<(usize, usize)> = Vec::new();
    for c in 0..d {
        windows.extend(ds.mask().runs(s, c));
    }
    windows.sort_unstable();
    let windows = merge_runs(windows);

    svg::PanelRow {
        title: format!("class {} sample {s}", ds.y()[s]),
        signal,
        feature,
        sum,
        windows,
    }
}

/// Collapses sorted, possibly overlapping (start, len) runs into disjoint ones.
fn merge_runs(runs: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(runs.len());
    for (start, len) in runs {
        match merged.last_mut() {
            Some((last_start, last_len)) if start <= *last_start + *last_len => {
                let end = (start + len).max(*last_start + *last_len);
                *last_len = end - *last_start;
            }
            _ => merged.push((start, len)),
        }
    }
    merged
}
