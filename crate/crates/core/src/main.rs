use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tim::classifier::{evaluate, train, ClassifierConfig, IncidentLabel, LabeledDoc, SentimentLabel, TextModel};
use tim::engagement::{filter_comments, load_annotations, pairwise_agreement, sentiment_classify};
use tim::geoparse::{Geocoder, TriggerLexicon, DEFAULT_THRESHOLD};
use tim::impact::{estimate_impact, frequency_stats, point_in_region};
use tim::ingest::{load_jsonl, load_posts, load_regions_and_flows, to_jsonl, Post};
use tim::lines::{count_line_mentions, extract_line_mentions, LineRegistry};
use tim::report::{
    comment_sentiment_csv, line_counts_csv, load_toponyms, located_incidents, parse_timezone, pretty_json,
    run_pipeline, ImpactSummary, IncidentRecord, LabeledPost, PipelineConfig, DEFAULT_TIMEZONE,
};
use tim::{synth, Error, Execution, Result};

/// Transit incident mining: classify, geoparse and map public-transport
/// disruption reports from social media.
#[derive(Parser)]
#[command(name = "tim", version, about)]
struct Cli {
    /// Seed for training and synthetic data (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// IANA timezone used for hour-of-day and weekday attribution.
    #[arg(long, global = true)]
    tz: Option<String>,
    /// Disable data parallelism.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabelKind {
    Incident,
    Sentiment,
}

impl LabelKind {
    fn label_set(self) -> Vec<String> {
        match self {
            LabelKind::Incident => IncidentLabel::label_set(),
            LabelKind::Sentiment => SentimentLabel::label_set(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train a text classifier from a labelled JSONL corpus.
    Train {
        #[arg(long, value_enum)]
        labels: LabelKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        ngrams: Option<usize>,
        #[arg(long)]
        buckets: Option<usize>,
    },
    /// Report accuracy and the confusion matrix on a labelled corpus.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label every post with an incident type.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep only posts carrying this hashtag.
        #[arg(long)]
        hashtag: Option<String>,
    },
    /// Resolve place mentions in labelled posts to coordinates.
    Geoparse {
        #[arg(long)]
        posts: PathBuf,
        #[arg(long)]
        gazetteer: PathBuf,
        /// GTFS stops.txt merged into the gazetteer.
        #[arg(long)]
        stops: Option<PathBuf>,
        #[arg(long)]
        triggers: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_span: usize,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Line registry used to fill each record's line mentions.
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Keep event, renovation and fix posts too.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count posts mentioning each tram and bus line.
    Lines {
        #[arg(long)]
        posts: PathBuf,
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate affected passengers from geocoded incidents and mobility flows.
    Impact {
        #[arg(long)]
        incidents: PathBuf,
        #[arg(long)]
        regions: PathBuf,
        #[arg(long)]
        flows: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify the sentiment of post comments.
    Sentiment {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        posts: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cohen's kappa for every pair of annotators.
    Agreement {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the whole pipeline from a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a synthetic labelled corpus.
    Synth {
        #[arg(long, value_enum)]
        labels: LabelKind,
        #[arg(long, default_value_t = 200)]
        per_class: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Error::Io {
                    path: dir.to_path_buf(),
                    source: e,
                })?;
            }
            fs::write(path, body).map_err(|e| Error::Io {
                path: path.to_path_buf(),
                source: e,
            })
        }
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Error::Internal(format!("writing to stdout: {e}"))),
    }
}

fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let tz_name = cli.tz.clone().unwrap_or_else(|| DEFAULT_TIMEZONE.to_string());
    match cli.command {
        Command::Train {
            labels,
            input,
            model,
            epochs,
            dim,
            learning_rate,
            ngrams,
            buckets,
        } => {
            let defaults = ClassifierConfig::default();
            let config = ClassifierConfig {
                embedding_dim: dim.unwrap_or(defaults.embedding_dim),
                ngram_order: ngrams.unwrap_or(defaults.ngram_order),
                hash_buckets: buckets.unwrap_or(defaults.hash_buckets),
                learning_rate: learning_rate.unwrap_or(defaults.learning_rate),
                epochs: epochs.unwrap_or(defaults.epochs),
                seed: cli.seed.unwrap_or(defaults.seed),
            };
            let docs: Vec<LabeledDoc> = load_jsonl(&input)?;
            let (trained, stats) = train(&docs, &labels.label_set(), &config)?;
            emit(Some(&model), &trained.to_json()?)?;
            eprintln!(
                "trained on {} documents ({} without features skipped)",
                stats.docs_used, stats.docs_skipped
            );
        }
        Command::Evaluate { model, input, out } => {
            let model = TextModel::load(&model)?;
            let docs: Vec<LabeledDoc> = load_jsonl(&input)?;
            let report = evaluate(&model, &docs, exec)?;
            emit(out.as_deref(), &pretty_json(&report)?)?;
        }
        Command::Classify {
            model,
            input,
            out,
            hashtag,
        } => {
            let model = TextModel::load(&model)?;
            if model.label_set() != IncidentLabel::label_set().as_slice() {
                return Err(Error::Invalid("model was not trained on incident labels".into()));
            }
            let posts = load_posts(&input, hashtag.as_deref())?;
            let texts: Vec<&str> = posts.iter().map(|p| p.text.as_str()).collect();
            let labeled = posts
                .iter()
                .zip(model.predict_batch(&texts, exec))
                .map(|(post, pred)| {
                    Ok(LabeledPost {
                        post: post.clone(),
                        label: pred.label.parse().map_err(Error::Invalid)?,
                        label_probability: pred.probs.iter().copied().fold(0.0, f64::max),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            emit(out.as_deref(), &to_jsonl(&labeled)?)?;
        }
        Command::Geoparse {
            posts,
            gazetteer,
            stops,
            triggers,
            max_span,
            threshold,
            registry,
            all,
            out,
        } => {
            let labeled: Vec<LabeledPost> = load_jsonl(&posts)?;
            let lexicon = match triggers {
                Some(p) => TriggerLexicon::load(p, max_span)?,
                None => TriggerLexicon::default(),
            };
            let registry = registry.map(LineRegistry::load).transpose()?;
            let geocoder = Geocoder::new(load_toponyms(&gazetteer, stops.as_deref())?, lexicon, threshold)?;
            let kept: Vec<&LabeledPost> = labeled.iter().filter(|lp| all || lp.label.is_disruption()).collect();
            let kept_posts: Vec<Post> = kept.iter().map(|lp| lp.post.clone()).collect();
            let records: Vec<IncidentRecord> = kept
                .iter()
                .zip(geocoder.geocode_all(&kept_posts, exec))
                .map(|(lp, locs)| {
                    let mut r = IncidentRecord::new(&lp.post, lp.label, locs);
                    if let Some(reg) = &registry {
                        r.lines = extract_line_mentions(&lp.post.text, reg);
                    }
                    r
                })
                .collect();
            let located = records.iter().filter(|r| !r.locations.is_empty()).count();
            eprintln!("{located} of {} posts geocoded", records.len());
            emit(out.as_deref(), &to_jsonl(&records)?)?;
        }
        Command::Lines { posts, registry, out } => {
            let registry = LineRegistry::load(&registry)?;
            let posts = load_posts(&posts, None)?;
            emit(out.as_deref(), &line_counts_csv(&count_line_mentions(&posts, &registry, exec))?)?;
        }
        Command::Impact {
            incidents,
            regions,
            flows,
            out,
        } => {
            let tz = parse_timezone(&tz_name)?;
            let mut records: Vec<IncidentRecord> = load_jsonl(&incidents)?;
            let (regions, flows) = load_regions_and_flows(&regions, &flows)?;
            for r in records.iter_mut() {
                r.region_id = r
                    .primary_location()
                    .and_then(|l| point_in_region((l.lat, l.lon), &regions))
                    .map(str::to_string);
            }
            let timestamps: Vec<_> = records.iter().map(|r| r.published_at).collect();
            let summary = ImpactSummary {
                timezone: tz_name,
                impact: estimate_impact(&located_incidents(&records), &regions, &flows, tz, exec),
                frequency: frequency_stats(&timestamps).ok(),
            };
            emit(out.as_deref(), &pretty_json(&summary)?)?;
        }
        Command::Sentiment { model, posts, out } => {
            let model = TextModel::load(&model)?;
            let posts = load_posts(&posts, None)?;
            let mut rows = Vec::new();
            for post in &posts {
                let comments = filter_comments(&post.comments);
                let labels = sentiment_classify(&model, &comments, exec)?;
                rows.extend(comments.iter().map(|c| (post.id.clone(), c.id.clone(), labels[&c.id])));
            }
            emit(out.as_deref(), &comment_sentiment_csv(&rows)?)?;
        }
        Command::Agreement { input, out } => {
            let report = pairwise_agreement(&load_annotations(&input)?)?;
            emit(out.as_deref(), &pretty_json(&report)?)?;
        }
        Command::Run { config } => {
            let mut config = PipelineConfig::load(&config)?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            if let Some(tz) = cli.tz {
                config.timezone = tz;
            }
            let summary = run_pipeline(&config, exec)?;
            eprintln!(
                "{} posts, {} in analysis set, {} geocoded; wrote {} files to {}",
                summary.posts,
                summary.analysis_posts,
                summary.geocoded_posts,
                summary.files.len(),
                config.out_dir.display()
            );
        }
        Command::Synth { labels, per_class, out } => {
            let seed = cli.seed.unwrap_or(0);
            let docs = match labels {
                LabelKind::Incident => synth::incident_corpus(per_class, seed),
                LabelKind::Sentiment => synth::sentiment_corpus(per_class, seed),
            };
            emit(out.as_deref(), &to_jsonl(&docs)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(2),
    }
}
