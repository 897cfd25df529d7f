//! The `valence` command line tool.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

pub mod config;
pub mod server;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use valence_core::analyzer::Detail;
use valence_core::corpus::{bundled_corpus, compare, run_phenomenon_suite};
use valence_core::emotionml::serialize;
use valence_core::eval::{evaluate, read_affective_dataset, read_ternary_dataset, to_examples, GoldRecord};
use valence_core::forest::{cross_validate, ForestConfig, ForestModel, LabeledExample};
use valence_core::gateway::Service;
use valence_core::synthetic::separable_corpus;
use valence_core::{Analyzer, Engine};

use config::{FileConfig, Overrides, Settings};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

fn at<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

#[derive(Parser, Debug)]
#[command(name = "valence", version, about = "Sentiment and emotion analysis", arg_required_else_help = true)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Global {
    /// TOML config file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Prior polarity lexicon (`word<TAB>score`).
    #[arg(long, global = true, value_name = "PATH")]
    polarity_lexicon: Option<PathBuf>,
    /// Emotion lexicon (`word<TAB>emotion`).
    #[arg(long, global = true, value_name = "PATH")]
    emotion_lexicon: Option<PathBuf>,
    /// Valence rules (`id<TAB>relation<TAB>condition<TAB>effect`).
    #[arg(long, global = true, value_name = "PATH")]
    rules: Option<PathBuf>,
    /// Emotion keyphrases (`phrase<TAB>emotion`).
    #[arg(long, global = true, value_name = "PATH")]
    keyphrases: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Emotionml,
    Json,
    Trace,
}

#[derive(Args, Debug)]
struct ForestArgs {
    #[arg(long, default_value_t = 100)]
    trees: usize,
    #[arg(long, default_value_t = 16)]
    max_depth: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl ForestArgs {
    fn config(&self) -> ForestConfig {
        ForestConfig {
            trees: self.trees,
            max_depth: self.max_depth,
            seed: self.seed,
            ..Default::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze one text and print EmotionML.
    Analyze {
        #[arg(long, default_value = "symbolic")]
        engine: String,
        #[arg(long)]
        text: Option<String>,
        /// Text to analyze; read from stdin when absent.
        #[arg(value_name = "TEXT", conflicts_with = "text")]
        positional: Option<String>,
        #[arg(long, default_value = "en")]
        lang: String,
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Emotionml)]
        format: Format,
    },
    /// Score an engine on a gold dataset or on the phenomenon corpus.
    Evaluate {
        #[arg(long, default_value = "symbolic")]
        engine: String,
        /// Dataset file, or `phenomenon` for the bundled corpus.
        #[arg(long)]
        dataset: String,
        /// Six-emotion gold file; switches to the affective format.
        #[arg(long, value_name = "PATH")]
        gold: Option<PathBuf>,
        /// Optional valence gold file for the affective format.
        #[arg(long, value_name = "PATH")]
        valence: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        /// Writes key=value lines here.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Train a random forest on a ternary dataset.
    Train {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        #[command(flatten)]
        forest: ForestArgs,
    },
    /// Classify one text with a trained model.
    Predict {
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        #[arg(long)]
        text: Option<String>,
        #[arg(value_name = "TEXT", conflicts_with = "text")]
        positional: Option<String>,
    },
    /// k-fold cross-validation of the random forest.
    Cv {
        #[arg(long, value_name = "PATH", required_unless_present = "synthetic")]
        input: Option<PathBuf>,
        /// Use the 200-example synthetic corpus.
        #[arg(long, conflicts_with = "input")]
        synthetic: bool,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[command(flatten)]
        forest: ForestArgs,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        host: Option<String>,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
    },
    /// Feed a scripted chat into a channel and print the gauge.
    GaugeDemo {
        #[arg(long, default_value = "symbolic")]
        engine: String,
        #[arg(long, default_value_t = 60.0)]
        window: f64,
    },
}

const DEMO_CHAT: &[(f64, &str)] = &[
    (0.0, "Welcome everyone, the talk starts now"),
    (12.0, "great slides :)"),
    (25.0, "this is awesome"),
    (40.0, "the sound is terrible"),
    (55.0, "I can't hear anything :("),
    (70.0, "sound is not bad now"),
    (90.0, "I am so happy with this demo"),
    (110.0, "it would be great if you shared the code"),
    (130.0, "thank you, well done"),
];

fn settings(global: &Global, model: Option<PathBuf>, host: Option<String>, port: Option<u16>) -> Result<Settings, CliError> {
    let file = match &global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let flags = Overrides {
        polarity_lexicon: global.polarity_lexicon.clone(),
        emotion_lexicon: global.emotion_lexicon.clone(),
        rules: global.rules.clone(),
        keyphrases: global.keyphrases.clone(),
        model,
        host,
        port,
    };
    Settings::resolve(file, flags, |k| std::env::var(k).ok())
}

fn engine(name: &str) -> Result<Engine, CliError> {
    name.parse().map_err(|e: valence_core::analyzer::UnknownEngine| CliError::Usage(e.to_string()))
}

fn input_text(flag: Option<String>, positional: Option<String>) -> Result<String, CliError> {
    match flag.or(positional) {
        Some(t) => Ok(t),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(data)?;
            Ok(s)
        }
    }
}

fn analyzer(settings: &Settings) -> Result<Analyzer, CliError> {
    Ok(Analyzer::new(settings.resources()?))
}

fn read_ternary(path: &Path) -> Result<Vec<GoldRecord>, CliError> {
    read_ternary_dataset(BufReader::new(File::open(path).map_err(at(path))?)).map_err(at(path))
}

fn cmd_analyze(
    global: &Global,
    engine_name: &str,
    text: String,
    lang: &str,
    model: Option<PathBuf>,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let engine = engine(engine_name)?;
    let settings = settings(global, model, None, None)?;
    let analyzer = analyzer(&settings)?;
    let text = settings.translator()?.translate(&text, lang).map_err(data)?;
    let result = analyzer.analyze(&text, engine).map_err(data)?;
    let vocab = &analyzer.resources.vocabularies;
    match format {
        Format::Emotionml => {
            let xml = serialize(&result.to_document(vocab), vocab)
                .map_err(|e| CliError::Data(format!("{e:?}")))?;
            write!(out, "{xml}").map_err(data)?;
        }
        Format::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(&result).map_err(data)?).map_err(data)?;
        }
        Format::Trace => {
            writeln!(out, "label: {}\nscore: {:+}", result.valence.label, result.valence.score).map_err(data)?;
            if let Detail::Symbolic(a) = &result.detail {
                let sentences = analyzer.resources.pipeline.sentences(&text);
                for (s, sa) in sentences.iter().zip(&a.sentences) {
                    write!(out, "{}", sa.trace.render(s)).map_err(data)?;
                }
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    global: &Global,
    engine_name: &str,
    dataset: &str,
    gold: Option<PathBuf>,
    valence: Option<PathBuf>,
    model: Option<PathBuf>,
    report: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let engine = engine(engine_name)?;
    let settings = settings(global, model, None, None)?;
    let analyzer = analyzer(&settings)?;
    let classifier = analyzer.classifier(engine).map_err(data)?;

    if dataset == "phenomenon" {
        let corpus = bundled_corpus();
        let text = if engine == Engine::Lexical {
            run_phenomenon_suite(&classifier, &corpus).map_err(data)?.to_text()
        } else {
            let baseline = analyzer.classifier(Engine::Lexical).map_err(data)?;
            let c = compare(&classifier, &baseline, &corpus).map_err(data)?;
            format!(
                "{}{}delta vs lexical: {:+.2} pp overall, {:+.2} pp supported\n",
                c.symbolic.to_text(),
                c.baseline.to_text(),
                c.delta_pp,
                c.supported_delta_pp
            )
        };
        write!(out, "{text}").map_err(data)?;
        if let Some(p) = report {
            fs::write(&p, &text).map_err(at(&p))?;
        }
        return Ok(());
    }

    let path = PathBuf::from(dataset);
    let records = match &gold {
        Some(g) => {
            let open = |p: &Path| File::open(p).map(BufReader::new).map_err(at(p));
            let v = match &valence {
                Some(v) => Some(open(v)?),
                None => None,
            };
            read_affective_dataset(open(&path)?, open(g)?, v).map_err(data)?
        }
        None => read_ternary(&path)?,
    };
    let rep = evaluate(&classifier, &records, dataset).map_err(data)?;
    write!(out, "{}", rep.to_text()).map_err(data)?;
    if let Some(p) = report {
        fs::write(&p, rep.to_key_values()).map_err(at(&p))?;
    }
    Ok(())
}

fn cmd_train(global: &Global, input: &Path, model: &Path, forest: &ForestArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let settings = settings(global, None, None, None)?;
    let pipeline = settings.resources()?.pipeline;
    let records = read_ternary(input)?;
    let examples = to_examples(&records, &pipeline);
    let m = ForestModel::train(&examples, &forest.config()).map_err(data)?;
    m.save(model).map_err(at(model))?;
    writeln!(
        out,
        "trained {} trees on {} examples ({} features) -> {}",
        m.trees.len(),
        examples.len(),
        m.vocabulary.len(),
        model.display()
    )
    .map_err(data)
}

fn cmd_predict(global: &Global, model: &Path, text: String, out: &mut dyn Write) -> Result<(), CliError> {
    let settings = settings(global, None, None, None)?;
    let pipeline = settings.resources()?.pipeline;
    let m = ForestModel::load(model).map_err(at(model))?;
    let p = m.predict_text(&text, &pipeline);
    writeln!(
        out,
        "{}\tpositive={:.4}\tnegative={:.4}\tneutral={:.4}",
        p.label, p.scores[0], p.scores[1], p.scores[2]
    )
    .map_err(data)
}

fn cmd_cv(
    global: &Global,
    input: Option<PathBuf>,
    synthetic: bool,
    k: usize,
    forest: &ForestArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let settings = settings(global, None, None, None)?;
    let pipeline = settings.resources()?.pipeline;
    let examples: Vec<LabeledExample> = match (input, synthetic) {
        (_, true) => separable_corpus(forest.seed)
            .iter()
            .map(|e| LabeledExample::from_text(&e.text, e.label, &pipeline))
            .collect(),
        (Some(p), false) => to_examples(&read_ternary(&p)?, &pipeline),
        (None, false) => return Err(CliError::Usage("cv needs --input or --synthetic".into())),
    };
    let r = cross_validate(&examples, k, forest.seed, &forest.config()).map_err(|e| match e {
        valence_core::forest::TrainError::BadFoldCount { .. } => CliError::Usage(e.to_string()),
        other => data(other),
    })?;
    writeln!(out, "accuracy={:.6} ({} examples, {k} folds)", r.accuracy, examples.len()).map_err(data)?;
    for (i, a) in r.fold_accuracies.iter().enumerate() {
        writeln!(out, "fold {i}: {a:.4} ({} held out)", r.folds[i].len()).map_err(data)?;
    }
    Ok(())
}

fn cmd_serve(global: &Global, host: Option<String>, port: Option<u16>, model: Option<PathBuf>, out: &mut dyn Write) -> Result<(), CliError> {
    let settings = settings(global, model, host, port)?;
    let service = Arc::new(Service::new(analyzer(&settings)?, settings.translator()?, settings.aggregator));
    let runtime = tokio::runtime::Runtime::new().map_err(data)?;
    runtime.block_on(async {
        let addr = format!("{}:{}", settings.host, settings.port);
        let listener = tokio::net::TcpListener::bind(&addr).await.map_err(|e| CliError::Data(format!("{addr}: {e}")))?;
        writeln!(out, "listening on http://{}", listener.local_addr().map_err(data)?).map_err(data)?;
        out.flush().map_err(data)?;
        server::serve(listener, service).await.map_err(data)
    })
}

fn cmd_gauge_demo(global: &Global, engine_name: &str, window: f64, out: &mut dyn Write) -> Result<(), CliError> {
    engine(engine_name)?;
    let settings = settings(global, None, None, None)?;
    let service = Service::new(analyzer(&settings)?, settings.translator()?, settings.aggregator);
    let window = window.to_string();
    for (t, text) in DEMO_CHAT {
        let ts = t.to_string();
        let r = service.handle_channel_message("demo", text.as_bytes(), Some(engine_name), None, Some(&ts), *t);
        if r.status != 200 {
            return Err(CliError::Data(r.body));
        }
        let g: serde_json::Value = serde_json::from_str(&service.handle_gauge("demo", Some(&window), Some(&ts), *t).body)
            .map_err(data)?;
        let gauge = g["gauge"].as_f64().unwrap_or(0.5);
        let bar = "#".repeat((gauge * 20.0).round() as usize);
        writeln!(
            out,
            "t={t:>5} [{bar:<20}] {gauge:.2} n={} {:<8} | {text}",
            g["count"], g["dominant_emotion"].as_str().unwrap_or("")
        )
        .map_err(data)?;
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let g = &cli.global;
    match cli.command {
        Command::Analyze {
            engine,
            text,
            positional,
            lang,
            model,
            format,
        } => cmd_analyze(g, &engine, input_text(text, positional)?, &lang, model, format, out),
        Command::Evaluate {
            engine,
            dataset,
            gold,
            valence,
            model,
            report,
        } => cmd_evaluate(g, &engine, &dataset, gold, valence, model, report, out),
        Command::Train { input, model, forest } => cmd_train(g, &input, &model, &forest, out),
        Command::Predict { model, text, positional } => cmd_predict(g, &model, input_text(text, positional)?, out),
        Command::Cv {
            input,
            synthetic,
            k,
            forest,
        } => cmd_cv(g, input, synthetic, k, &forest, out),
        Command::Serve { host, port, model } => cmd_serve(g, host, port, model, out),
        Command::GaugeDemo { engine, window } => cmd_gauge_demo(g, &engine, window, out),
    }
}

/// Runs the tool with `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().ansi().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}
