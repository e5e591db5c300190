//! `bayesnid`: clean a flow table, select features, and compare the three
//! naive Bayes variants on it.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bayesnid_core::pipeline::{run_clean, run_compare, run_select, ColumnAudit};
use bayesnid_core::synth::{generate, SynthConfig};
use bayesnid_core::{Error, RunConfig, SelectMethod};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bayesnid",
    version,
    about = "Naive Bayes comparison for flow-based intrusion detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic flow table with optional defects.
    Synth(SynthArgs),
    /// Impute, split, and write continuous/counts/binary datasets plus a manifest.
    Clean(RunArgs),
    /// Score and select features on the cleaned training partition.
    Select(RunArgs),
    /// Full run: clean, select, fit all three variants, evaluate, and report.
    Compare(RunArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(short = 'n', long, default_value_t = 2000)]
    rows_per_class: usize,
    #[arg(short = 'd', long, default_value_t = 20)]
    features: usize,
    #[arg(short = 'k', long, default_value_t = 6)]
    classes: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    separation: f64,
    #[arg(long, default_value_t = 0.0)]
    defect_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    negative_share: f64,
    #[arg(long, default_value = "Label")]
    label_col: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration, or a JSON document embedding one (report.json, manifest.json).
    #[arg(long, env = "BAYESNID_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, env = "BAYESNID_INPUT")]
    input: Option<PathBuf>,
    #[arg(long, env = "BAYESNID_LABEL_COL")]
    label_col: Option<String>,
    #[arg(long, env = "BAYESNID_TEST_FRACTION")]
    test_fraction: Option<f64>,
    #[arg(long, env = "BAYESNID_SEED")]
    seed: Option<u64>,
    /// chi2, corr, or none.
    #[arg(long, env = "BAYESNID_SELECT")]
    select: Option<SelectMethod>,
    #[arg(long, env = "BAYESNID_K")]
    k: Option<usize>,
    #[arg(long, env = "BAYESNID_CORR_THRESHOLD")]
    corr_threshold: Option<f64>,
    #[arg(long, env = "BAYESNID_BINS")]
    bins: Option<usize>,
    #[arg(long, env = "BAYESNID_ALPHA")]
    alpha: Option<f64>,
    #[arg(long, env = "BAYESNID_VAR_EPS")]
    var_eps: Option<f64>,
    #[arg(long, env = "BAYESNID_OUT")]
    out: Option<PathBuf>,
    /// Column to discard at load time (repeatable).
    #[arg(long = "drop-col", value_name = "NAME")]
    drop_cols: Vec<String>,
    /// Column allowed to keep negative values (repeatable).
    #[arg(long = "signed-col", value_name = "NAME")]
    signed_cols: Vec<String>,
    /// Fixed class order, comma separated.
    #[arg(long, value_delimiter = ',')]
    class_order: Option<Vec<String>>,
}

fn read_config_file(path: &Path) -> Result<RunConfig, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str::<serde_json::Value>(&text)
            .map_err(|e| e.to_string())
            .and_then(|mut v| {
                let inner = v.get_mut("config").map(serde_json::Value::take).unwrap_or(v);
                serde_json::from_value(inner).map_err(|e| e.to_string())
            })
    } else {
        RunConfig::from_toml(&text)
    };
    parsed.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

impl RunArgs {
    /// Defaults, then the config file, then environment and flags.
    fn resolve(self) -> Result<RunConfig, Error> {
        let mut c = match &self.config {
            Some(p) => read_config_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.input {
            c.input = Some(v);
        }
        if let Some(v) = self.label_col {
            c.label_column = v;
        }
        if let Some(v) = self.test_fraction {
            c.split.test_fraction = v;
        }
        if let Some(v) = self.seed {
            c.split.seed = v;
        }
        if let Some(v) = self.select {
            c.selection.method = v;
        }
        if let Some(v) = self.k {
            c.selection.k = v;
        }
        if let Some(v) = self.corr_threshold {
            c.selection.corr_threshold = v;
        }
        if let Some(v) = self.bins {
            c.selection.bins = v;
        }
        if let Some(v) = self.alpha {
            c.fit.alpha = v;
        }
        if let Some(v) = self.var_eps {
            c.fit.var_epsilon = v;
        }
        if let Some(v) = self.out {
            c.out = v;
        }
        if !self.drop_cols.is_empty() {
            c.drop_columns = self.drop_cols;
        }
        if !self.signed_cols.is_empty() {
            c.signed_columns = self.signed_cols;
        }
        if let Some(v) = self.class_order {
            c.class_order = Some(v);
        }
        Ok(c)
    }
}

fn print_audit(out: &mut impl Write, audit: &[ColumnAudit]) -> io::Result<()> {
    let width = audit.iter().map(|a| a.column.len()).max().unwrap_or(6).max(6);
    writeln!(out, "{:<width$}  {:>8}  {:>8}", "column", "missing", "negative")?;
    for a in audit {
        writeln!(out, "{:<width$}  {:>8}  {:>8}", a.column, a.missing, a.negative)?;
    }
    let missing: usize = audit.iter().map(|a| a.missing).sum();
    let negative: usize = audit.iter().map(|a| a.negative).sum();
    writeln!(out, "{:<width$}  {missing:>8}  {negative:>8}", "total")
}

fn run(cli: Cli) -> Result<(), Error> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let io_err = |source| Error::Write {
        path: PathBuf::from("<stdout>"),
        source,
    };
    match cli.command {
        Command::Synth(a) => {
            let cfg = SynthConfig {
                rows_per_class: a.rows_per_class,
                features: a.features,
                classes: a.classes,
                seed: a.seed,
                separation: a.separation,
                defect_rate: a.defect_rate,
                negative_share: a.negative_share,
                label_column: a.label_col,
            };
            let summary = match &a.out {
                Some(path) => {
                    let file = fs::File::create(path).map_err(|source| Error::Write {
                        path: path.clone(),
                        source,
                    })?;
                    generate(&cfg, io::BufWriter::new(file))?
                }
                None => generate(&cfg, &mut out)?,
            };
            log::info!(
                "{} rows, {} absent and {} negative cells injected",
                summary.rows,
                summary.absent_cells,
                summary.negative_cells
            );
        }
        Command::Clean(a) => {
            let cfg = a.resolve()?;
            let outcome = run_clean(&cfg)?;
            print_audit(&mut out, &outcome.audit).map_err(io_err)?;
            writeln!(
                out,
                "wrote {} files to {}",
                outcome.written.files.len(),
                cfg.out.display()
            )
            .map_err(io_err)?;
        }
        Command::Select(a) => {
            let cfg = a.resolve()?;
            let outcome = run_select(&cfg)?;
            let doc = &outcome.document;
            if let Some(sel) = &doc.selection {
                for f in &sel.features {
                    writeln!(
                        out,
                        "{:<32} {:>12.6} {}",
                        f.name,
                        f.score,
                        if f.selected { "*" } else { "" }
                    )
                    .map_err(io_err)?;
                }
            }
            if doc.selection_fallback {
                writeln!(out, "selection kept no features; all columns retained").map_err(io_err)?;
            }
            writeln!(out, "selected: {}", doc.feature_columns.join(", ")).map_err(io_err)?;
        }
        Command::Compare(a) => {
            let cfg = a.resolve()?;
            let outcome = run_compare(&cfg)?;
            writeln!(out, "{:<12} {:>10} {:>10} {:>10}", "variant", "train", "test", "gap").map_err(io_err)?;
            for r in &outcome.report.variants {
                writeln!(
                    out,
                    "{:<12} {:>10.4} {:>10.4} {:>10.4}",
                    r.variant.to_string(),
                    r.train_accuracy,
                    r.test_accuracy,
                    r.overfit_gap
                )
                .map_err(io_err)?;
            }
            let ranking: Vec<String> = outcome.report.ranking.iter().map(|v| v.to_string()).collect();
            writeln!(out, "ranking: {}", ranking.join(" > ")).map_err(io_err)?;
            writeln!(
                out,
                "wrote {} files to {}",
                outcome.written.files.len(),
                cfg.out.display()
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut msg = e.to_string();
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                let text = s.to_string();
                if !msg.contains(&text) {
                    msg.push_str(&format!(": {text}"));
                }
                source = s.source();
            }
            eprintln!("error: {msg}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
