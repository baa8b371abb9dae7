use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use speech_repair::corpus::{
    parse_turns, pattern_string, serialize_turns, synthesize_corpus, SynthSpec,
};
use speech_repair::eval::{parse_predictions, prediction_line, score_corpus, Prediction};
use speech_repair::filter::is_repetition;
use speech_repair::pipeline::{format_trace, process_corpus};
use speech_repair::tagger::{default_tagset, parse_tagset};
use speech_repair::{AnnotatedTurn, Config, RepairClass, TaggerModel};

#[derive(Parser)]
#[command(name = "speech-repair", version, about = "Detect and correct speech repairs in transcribed dialog")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Smoothing constant, overriding the configuration
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Clue search window in words, overriding the configuration
    #[arg(long, global = true)]
    window: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Train a tagger model from an annotated corpus
    Train {
        /// Corpus file, or a directory of corpus files
        #[arg(long)]
        corpus: PathBuf,
        /// Tagset file, one tag per line; the built-in tagset otherwise
        #[arg(long)]
        tagset: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Detect and correct repairs
    Detect {
        #[arg(long)]
        model: PathBuf,
        /// Corpus file or directory; annotations are ignored
        #[arg(long)]
        input: PathBuf,
        /// Write the builder trace here (`-` for stdout)
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write corrected turns here instead of stdout
        #[arg(long)]
        corrected_out: Option<PathBuf>,
        /// Write the repair listing here
        #[arg(long)]
        repairs_out: Option<PathBuf>,
    },
    /// Score a predictions file against a gold corpus
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
    },
    /// Generate a synthetic annotated corpus
    Synth {
        /// TOML generator spec; defaults otherwise
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of turns, overriding the spec
        #[arg(long)]
        turns: Option<usize>,
        #[arg(long, short)]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if path == Path::new("-") {
        std::io::stdout().write_all(text.as_bytes())?;
        return Ok(());
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Reads a corpus file, or every file of a directory in name order.
fn read_corpus(path: &Path) -> Result<Vec<AnnotatedTurn>> {
    let mut files = Vec::new();
    if path.is_dir() {
        for entry in fs::read_dir(path).with_context(|| format!("listing {}", path.display()))? {
            let p = entry?.path();
            if p.is_file() {
                files.push(p);
            }
        }
        files.sort();
    } else {
        files.push(path.to_path_buf());
    }
    let mut turns = Vec::new();
    for f in files {
        let parsed = parse_turns(&read(&f)?).with_context(|| format!("parsing {}", f.display()))?;
        turns.extend(parsed);
    }
    Ok(turns)
}

fn load_config(args: &ConfigArgs) -> Result<Config> {
    let mut config = match &args.config {
        Some(p) => Config::from_toml(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => Config::default(),
    };
    if let Some(a) = args.alpha {
        config.alpha = a;
    }
    if let Some(w) = args.window {
        config.window = w;
    }
    config.validate()?;
    Ok(config)
}

fn repair_kind(turn: &AnnotatedTurn, r: &speech_repair::GoldRepair) -> &'static str {
    if r.klass == RepairClass::Abridged {
        return "abridged";
    }
    let p = pattern_string(turn, r);
    let core: String = p.chars().filter(|c| !matches!(c, '-' | 'e')).collect();
    if core == "m.m" {
        "word repetition"
    } else if is_repetition(&p) {
        "larger repetition"
    } else if core == "r.r" {
        "word replacement"
    } else {
        "other"
    }
}

fn train(config: &Config, corpus: &Path, tagset: Option<&Path>, out: &Path) -> Result<String> {
    let turns = read_corpus(corpus)?;
    let tags = match tagset {
        Some(p) => parse_tagset(&read(p)?)?,
        None => default_tagset(),
    };
    let model = TaggerModel::train(&turns, &tags, config)?;
    write(out, &model.to_text())?;

    let kinds = ["word repetition", "larger repetition", "word replacement", "other", "abridged"];
    let mut counts = [0usize; 5];
    let mut words = 0;
    for t in &turns {
        words += t.len();
        for r in t.gold_repairs().map_err(anyhow::Error::msg)? {
            let k = repair_kind(t, &r);
            counts[kinds.iter().position(|x| *x == k).expect("known kind")] += 1;
        }
    }
    let total: usize = counts.iter().sum();
    let mut s = format!(
        "trained on {} turns, {} words, {} tags, vocabulary {}\n",
        turns.len(),
        words,
        model.num_tags(),
        model.vocab.len()
    );
    for (k, c) in kinds.iter().zip(counts) {
        let _ = writeln!(s, "{k:<18} {c:>6}");
    }
    let _ = writeln!(s, "{:<18} {total:>6}", "total");
    let _ = writeln!(s, "model written to {}", out.display());
    Ok(s)
}

fn detect(
    config: &Config,
    model: &Path,
    input: &Path,
    trace: Option<&Path>,
    corrected_out: Option<&Path>,
    repairs_out: Option<&Path>,
) -> Result<String> {
    let model = TaggerModel::from_text(&read(model)?).with_context(|| format!("loading {}", model.display()))?;
    let turns = read_corpus(input)?;
    let result = process_corpus(&turns, &model, config);
    let mut corrected = String::new();
    let mut repairs = String::new();
    let mut traces = String::new();
    for r in &result.turns {
        let _ = writeln!(corrected, "{}: {}", r.id, r.corrected_text());
        for j in &r.repairs {
            let _ = writeln!(repairs, "{}", prediction_line(&r.id, &Prediction::from(j)));
        }
        traces.push_str(&format_trace(r));
    }
    if let Some(p) = trace {
        write(p, &traces)?;
    }
    if let Some(p) = repairs_out {
        write(p, &repairs)?;
    }
    match corrected_out {
        Some(p) => {
            write(p, &corrected)?;
            let s = result.stats;
            Ok(format!(
                "{} turns, {} words, {} repairs ({} modification, {} abridged), {} words deleted\n",
                s.turns, s.words, s.repairs, s.modification, s.abridged, s.deleted_words
            ))
        }
        None => Ok(corrected),
    }
}

fn eval(gold: &Path, predictions: &Path) -> Result<String> {
    let turns = read_corpus(gold)?;
    let preds = parse_predictions(&read(predictions)?).with_context(|| format!("parsing {}", predictions.display()))?;
    let report = score_corpus(&turns, &preds)?;
    Ok(format!("{}\n{}", report.table(), report.key_values()))
}

fn synth(spec: Option<&Path>, seed: u64, turns: Option<usize>, out: &Path) -> Result<String> {
    let mut spec = match spec {
        Some(p) => SynthSpec::from_toml(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => SynthSpec::default(),
    };
    if let Some(n) = turns {
        spec.turns = n;
    }
    let corpus: Vec<AnnotatedTurn> = synthesize_corpus(&spec, seed)?.into_iter().map(|s| s.turn).collect();
    if corpus.is_empty() {
        bail!("spec produces no turns");
    }
    write(out, &serialize_turns(&corpus))?;
    Ok(format!("wrote {} turns to {}\n", corpus.len(), out.display()))
}

fn run(cli: Cli) -> Result<String> {
    let config = load_config(&cli.config)?;
    match cli.command {
        Command::Train { corpus, tagset, out } => train(&config, &corpus, tagset.as_deref(), &out),
        Command::Detect {
            model,
            input,
            trace,
            corrected_out,
            repairs_out,
        } => detect(
            &config,
            &model,
            &input,
            trace.as_deref(),
            corrected_out.as_deref(),
            repairs_out.as_deref(),
        ),
        Command::Eval { gold, predictions } => eval(&gold, &predictions),
        Command::Synth { spec, seed, turns, out } => synth(spec.as_deref(), seed, turns, &out),
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
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
