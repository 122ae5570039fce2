use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use super::export::{export_geojson, export_summaries};
use super::records::{located_incidents, IncidentRecord, LabeledPost};
use crate::classifier::{train, ClassifierConfig, IncidentLabel, LabeledDoc, SentimentLabel, TextModel};
use crate::engagement::{filter_comments, reaction_distribution, sentiment_classify};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geoparse::{Geocoder, NameNormalizer, TriggerLexicon, DEFAULT_THRESHOLD};
use crate::impact::{estimate_impact, frequency_stats, point_in_region, FrequencyStats, ImpactReport};
use crate::ingest::{
    load_gazetteer_csv, load_gtfs_stops, load_jsonl, load_posts, load_regions_and_flows, to_jsonl, Comment,
    Gazetteer, Post,
};
use crate::lines::{count_line_mentions, extract_line_mentions, LineRegistry};

pub const DEFAULT_TIMEZONE: &str = "Europe/Warsaw";

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_timezone() -> String {
    DEFAULT_TIMEZONE.to_string()
}

fn default_true() -> bool {
    true
}

fn default_max_span() -> usize {
    4
}

/// Where a classifier comes from: a saved model or a corpus to train on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSource {
    Model(PathBuf),
    Corpus(PathBuf),
}

/// Run configuration, read from a TOML key/value file. Relative paths are
/// resolved against the directory holding the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub posts: PathBuf,
    #[serde(default)]
    pub hashtag: Option<String>,
    pub gazetteer: PathBuf,
    #[serde(default)]
    pub stops: Option<PathBuf>,
    #[serde(default)]
    pub triggers: Option<PathBuf>,
    #[serde(default = "default_max_span")]
    pub max_span: usize,
    pub lines: PathBuf,
    pub regions: PathBuf,
    pub flows: PathBuf,
    pub incident_model: ModelSource,
    #[serde(default)]
    pub sentiment_model: Option<ModelSource>,
    pub out_dir: PathBuf,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_timezone")]
    pub timezone: String,
    #[serde(default = "default_true")]
    pub analysis_filter: bool,
    #[serde(default)]
    pub classifier: ClassifierConfig,
}

impl PipelineConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: PipelineConfig = toml::from_str(&raw).map_err(|e| {
            let line = e
                .span()
                .map(|s| raw[..s.start].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::parse(path, line, e.message())
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.posts);
        fix(&mut self.gazetteer);
        fix(&mut self.lines);
        fix(&mut self.regions);
        fix(&mut self.flows);
        fix(&mut self.out_dir);
        for p in [&mut self.stops, &mut self.triggers].into_iter().flatten() {
            fix(p);
        }
        for src in std::iter::once(&mut self.incident_model).chain(self.sentiment_model.as_mut()) {
            match src {
                ModelSource::Model(p) | ModelSource::Corpus(p) => fix(p),
            }
        }
    }

    pub fn timezone(&self) -> Result<Tz> {
        parse_timezone(&self.timezone)
    }

    fn check_inputs(&self) -> Result<()> {
        let mut inputs = vec![&self.posts, &self.gazetteer, &self.lines, &self.regions, &self.flows];
        inputs.extend(self.stops.iter());
        inputs.extend(self.triggers.iter());
        for src in std::iter::once(&self.incident_model).chain(self.sentiment_model.as_ref()) {
            match src {
                ModelSource::Model(p) | ModelSource::Corpus(p) => inputs.push(p),
            }
        }
        match inputs.into_iter().find(|p| !p.is_file()) {
            Some(p) => Err(Error::invalid(format!("input file {} does not exist", p.display()))),
            None => Ok(()),
        }
    }
}

pub fn parse_timezone(name: &str) -> Result<Tz> {
    name.parse::<Tz>()
        .map_err(|_| Error::invalid(format!("unknown timezone `{name}`")))
}

/// Impact and frequency figures written to `impact.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactSummary {
    pub timezone: String,
    pub impact: ImpactReport,
    pub frequency: Option<FrequencyStats>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PipelineSummary {
    pub posts: usize,
    pub analysis_posts: usize,
    pub geocoded_posts: usize,
    pub ungeocoded_posts: usize,
    pub featureless_posts: usize,
    pub comments_classified: usize,
    pub geojson_features: usize,
    pub files: Vec<String>,
}

fn load_or_train(source: &ModelSource, labels: Vec<String>, config: &ClassifierConfig) -> Result<(TextModel, bool)> {
    match source {
        ModelSource::Model(p) => Ok((TextModel::load(p)?, false)),
        ModelSource::Corpus(p) => {
            let docs: Vec<LabeledDoc> = load_jsonl(p)?;
            Ok((train(&docs, &labels, config)?.0, true))
        }
    }
}

pub fn load_toponyms(gazetteer: &Path, stops: Option<&Path>) -> Result<Gazetteer> {
    let mut entries = Vec::new();
    if let Some(stops) = stops {
        entries.extend(load_gtfs_stops(stops)?);
    }
    entries.extend(load_gazetteer_csv(gazetteer)?);
    Ok(Gazetteer::new(entries, NameNormalizer::default()))
}

/// Runs every stage and writes all artifacts to `config.out_dir`.
///
/// Artifacts are rendered in memory first; if writing fails part-way, files
/// already written by this run are removed.
pub fn run_pipeline(config: &PipelineConfig, exec: Execution) -> Result<PipelineSummary> {
    let tz = config.timezone().map_err(|e| e.in_stage("config"))?;
    config.check_inputs().map_err(|e| e.in_stage("config"))?;
    let mut summary = PipelineSummary::default();

    // ingest
    let (posts, gazetteer, lexicon, registry, regions, flows) = (|| {
        let posts = load_posts(&config.posts, config.hashtag.as_deref())?;
        let gazetteer = load_toponyms(&config.gazetteer, config.stops.as_deref())?;
        let lexicon = match &config.triggers {
            Some(p) => TriggerLexicon::load(p, config.max_span)?,
            None => TriggerLexicon::default(),
        };
        let registry = LineRegistry::load(&config.lines)?;
        let (regions, flows) = load_regions_and_flows(&config.regions, &config.flows)?;
        Ok::<_, Error>((posts, gazetteer, lexicon, registry, regions, flows))
    })()
    .map_err(|e| e.in_stage("ingest"))?;
    summary.posts = posts.len();

    // classify
    let mut classifier_config = config.classifier.clone();
    classifier_config.seed = config.seed;
    let (incident_model, incident_trained) =
        load_or_train(&config.incident_model, IncidentLabel::label_set(), &classifier_config)
            .map_err(|e| e.in_stage("classify"))?;
    let texts: Vec<&str> = posts.iter().map(|p| p.text.as_str()).collect();
    let predictions = incident_model.predict_batch(&texts, exec);
    let mut labeled = Vec::with_capacity(posts.len());
    for (post, pred) in posts.iter().zip(predictions) {
        summary.featureless_posts += usize::from(pred.no_features);
        let label: IncidentLabel = pred
            .label
            .parse()
            .map_err(|m| Error::invalid(m).in_stage("classify"))?;
        let probability = pred.probs.iter().copied().fold(0.0, f64::max);
        labeled.push(LabeledPost {
            post: post.clone(),
            label,
            label_probability: probability,
        });
    }

    let analysis: Vec<&LabeledPost> = labeled
        .iter()
        .filter(|lp| !config.analysis_filter || lp.label.is_disruption())
        .collect();
    summary.analysis_posts = analysis.len();

    // geoparse
    let geocoder = Geocoder::new(gazetteer, lexicon, config.threshold).map_err(|e| e.in_stage("geoparse"))?;
    let analysis_posts: Vec<Post> = analysis.iter().map(|lp| lp.post.clone()).collect();
    let locations = geocoder.geocode_all(&analysis_posts, exec);
    let mut records: Vec<IncidentRecord> = analysis
        .iter()
        .zip(locations)
        .map(|(lp, locs)| IncidentRecord::new(&lp.post, lp.label, locs))
        .collect();
    summary.geocoded_posts = records.iter().filter(|r| !r.locations.is_empty()).count();
    summary.ungeocoded_posts = records.len() - summary.geocoded_posts;

    // lines
    for (record, post) in records.iter_mut().zip(&analysis_posts) {
        record.lines = extract_line_mentions(&post.text, &registry);
    }
    let line_counts = count_line_mentions(&posts, &registry, exec);

    // impact
    for record in records.iter_mut() {
        record.region_id = record
            .primary_location()
            .and_then(|l| point_in_region((l.lat, l.lon), &regions))
            .map(str::to_string);
    }
    let impact = estimate_impact(&located_incidents(&records), &regions, &flows, tz, exec);
    let timestamps: Vec<_> = records.iter().map(|r| r.published_at).collect();
    let frequency = frequency_stats(&timestamps).ok();
    let impact_summary = ImpactSummary {
        timezone: config.timezone.clone(),
        impact,
        frequency,
    };

    // engagement
    let mut sentiment: BTreeMap<String, SentimentLabel> = BTreeMap::new();
    let mut comment_rows: Vec<(String, String, SentimentLabel)> = Vec::new();
    let mut sentiment_model_trained = None;
    if let Some(source) = &config.sentiment_model {
        let (model, trained) = load_or_train(source, SentimentLabel::label_set(), &classifier_config)
            .map_err(|e| e.in_stage("engagement"))?;
        let comments: Vec<(String, Comment)> = analysis_posts
            .iter()
            .flat_map(|p| filter_comments(&p.comments).into_iter().map(move |c| (p.id.clone(), c)))
            .collect();
        let only: Vec<Comment> = comments.iter().map(|(_, c)| c.clone()).collect();
        let labels = sentiment_classify(&model, &only, exec).map_err(|e| e.in_stage("engagement"))?;
        for (post_id, c) in &comments {
            let label = labels[&c.id];
            comment_rows.push((post_id.clone(), c.id.clone(), label));
            sentiment.insert(format!("{post_id}/{}", c.id), label);
        }
        summary.comments_classified = comment_rows.len();
        if trained {
            sentiment_model_trained = Some(model);
        }
    }
    let reactions = reaction_distribution(records.iter().map(|r| (r.label, &r.interactions.reaction_breakdown)));

    // export
    let geojson = export_geojson(&records);
    summary.geojson_features = geojson.collection.features.len();
    let summaries = export_summaries(&records, &line_counts, &sentiment, &reactions)
        .map_err(|e| e.in_stage("export"))?;

    let mut artifacts: Vec<(String, String)> = vec![
        ("labeled.jsonl".into(), to_jsonl(&labeled)?),
        ("incidents.jsonl".into(), to_jsonl(&records)?),
        ("incidents.geojson".into(), geojson.to_string_pretty()?),
        ("impact.json".into(), pretty_json(&impact_summary)?),
        ("comment_sentiment.csv".into(), comment_sentiment_csv(&comment_rows)?),
    ];
    artifacts.extend(summaries.named().iter().map(|(n, b)| (n.to_string(), b.to_string())));
    if incident_trained {
        artifacts.push(("incident.model.json".into(), incident_model.to_json()?));
    }
    if let Some(m) = sentiment_model_trained {
        artifacts.push(("sentiment.model.json".into(), m.to_json()?));
    }
    write_artifacts(&config.out_dir, &artifacts).map_err(|e| e.in_stage("export"))?;
    summary.files = artifacts.into_iter().map(|(n, _)| n).collect();
    Ok(summary)
}

pub fn pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn comment_sentiment_csv(rows: &[(String, String, SentimentLabel)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| Error::Internal(e.to_string());
    w.write_record(["post_id", "comment_id", "label"]).map_err(internal)?;
    for (post, comment, label) in rows {
        w.write_record([post.as_str(), comment.as_str(), label.as_str()]).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// Writes every artifact or none: on failure, files created so far are removed.
pub fn write_artifacts(dir: &Path, artifacts: &[(String, String)]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for (name, body) in artifacts {
        let path = dir.join(name);
        if let Err(e) = fs::write(&path, body) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            let _ = fs::remove_file(&path);
            return Err(Error::io(path, e));
        }
        written.push(path);
    }
    Ok(())
}
