use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::featurize;
use super::tokenize::tokenize;
use crate::error::{Error, Result};
use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDoc {
    pub text: String,
    pub label: String,
}

impl LabeledDoc {
    pub fn new(text: impl Into<String>, label: impl Into<String>) -> Self {
        LabeledDoc {
            text: text.into(),
            label: label.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub embedding_dim: usize,
    pub ngram_order: usize,
    pub hash_buckets: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            embedding_dim: 32,
            ngram_order: 2,
            hash_buckets: 1 << 18,
            learning_rate: 0.1,
            epochs: 10,
            seed: 0,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::invalid(format!("classifier config: {what} must be positive")));
        if self.embedding_dim == 0 {
            return bad("embedding_dim");
        }
        if self.ngram_order == 0 {
            return bad("ngram_order");
        }
        if self.hash_buckets == 0 {
            return bad("hash_buckets");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate");
        }
        if self.epochs == 0 {
            return bad("epochs");
        }
        Ok(())
    }
}

/// The input embedding matrix, `rows × dim`.
///
/// Every row starts from a uniform draw in `[-1/dim, 1/dim)` produced by a
/// ChaCha8 stream keyed on `(seed, row)`, so rows never touched by training
/// need not be stored: only rows that received an update are materialized.
#[derive(Debug, Clone, PartialEq)]
struct Embeddings {
    rows: usize,
    dim: usize,
    seed: u64,
    updated: HashMap<usize, Vec<f64>>,
}

impl Embeddings {
    fn new(rows: usize, dim: usize, seed: u64) -> Self {
        Embeddings {
            rows,
            dim,
            seed,
            updated: HashMap::new(),
        }
    }

    fn initial_row(&self, row: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(row as u64);
        let bound = 1.0 / self.dim as f64;
        (0..self.dim)
            .map(|_| {
                let unit = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                (2.0 * unit - 1.0) * bound
            })
            .collect()
    }

    fn add_row_into(&self, row: usize, acc: &mut [f64]) {
        match self.updated.get(&row) {
            Some(v) => acc.iter_mut().zip(v).for_each(|(a, x)| *a += x),
            None => acc
                .iter_mut()
                .zip(self.initial_row(row))
                .for_each(|(a, x)| *a += x),
        }
    }

    fn row_mut(&mut self, row: usize) -> &mut Vec<f64> {
        if !self.updated.contains_key(&row) {
            let init = self.initial_row(row);
            self.updated.insert(row, init);
        }
        self.updated.get_mut(&row).expect("row materialized above")
    }
}

#[derive(Serialize, Deserialize)]
struct EmbeddingsFile {
    rows: usize,
    dim: usize,
    init: String,
    init_seed: u64,
    updated_rows: Vec<(usize, Vec<f64>)>,
}

const EMBEDDING_INIT: &str = "chacha8-uniform";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    config: ClassifierConfig,
    label_set: Vec<String>,
    vocab: BTreeMap<String, usize>,
    input_embeddings: EmbeddingsFile,
    output_weights: Vec<Vec<f64>>,
}

/// Linear classifier over the mean of hashed word n-gram embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct TextModel {
    config: ClassifierConfig,
    label_set: Vec<String>,
    vocab: BTreeMap<String, usize>,
    embeddings: Embeddings,
    /// `label_set.len() × embedding_dim`, row-major.
    output: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: String,
    pub probs: Vec<f64>,
    /// The text produced no features; `probs` is uniform.
    pub no_features: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrainStats {
    pub docs_used: usize,
    pub docs_skipped: usize,
    pub updates: usize,
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Index of the first maximum, so ties resolve to the earlier label.
fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Trains with per-document SGD on softmax cross-entropy.
///
/// Documents are visited in a seeded shuffle each epoch; the learning rate
/// decays linearly from `config.learning_rate` to zero across
/// `epochs × corpus.len()` steps. Documents without tokens are skipped.
pub fn train(
    corpus: &[LabeledDoc],
    label_set: &[String],
    config: &ClassifierConfig,
) -> Result<(TextModel, TrainStats)> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::invalid("training corpus is empty"));
    }
    if label_set.is_empty() {
        return Err(Error::invalid("label set is empty"));
    }
    let label_index: HashMap<&str, usize> =
        label_set.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    if label_index.len() != label_set.len() {
        return Err(Error::invalid("label set contains duplicates"));
    }

    let tokenized: Vec<Vec<String>> = corpus.iter().map(|d| tokenize(&d.text)).collect();
    let mut vocab = BTreeMap::new();
    for tok in tokenized.iter().flatten() {
        let next = vocab.len();
        vocab.entry(tok.clone()).or_insert(next);
    }

    let mut examples = Vec::with_capacity(corpus.len());
    let mut stats = TrainStats::default();
    for (doc, tokens) in corpus.iter().zip(&tokenized) {
        let label = *label_index
            .get(doc.label.as_str())
            .ok_or_else(|| Error::UnknownLabel(doc.label.clone()))?;
        let feats = featurize(tokens, &vocab, config.ngram_order, config.hash_buckets);
        if feats.is_empty() {
            stats.docs_skipped += 1;
            continue;
        }
        examples.push((feats, label));
    }
    stats.docs_used = examples.len();

    let dim = config.embedding_dim;
    let mut model = TextModel {
        config: config.clone(),
        label_set: label_set.to_vec(),
        embeddings: Embeddings::new(vocab.len() + config.hash_buckets, dim, config.seed),
        vocab,
        output: vec![0.0; label_set.len() * dim],
    };

    let total_steps = (config.epochs * corpus.len()) as f64;
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut shuffler = ChaCha8Rng::seed_from_u64(config.seed);
    shuffler.set_stream(u64::MAX);
    let mut step = 0usize;
    for _ in 0..config.epochs {
        order.shuffle(&mut shuffler);
        for &i in &order {
            let lr = config.learning_rate * (1.0 - step as f64 / total_steps);
            let (feats, label) = &examples[i];
            model.sgd_step(feats, *label, lr);
            step += 1;
        }
        // skipped documents still consume their share of the schedule
        step += stats.docs_skipped;
    }
    stats.updates = config.epochs * examples.len();
    Ok((model, stats))
}

impl TextModel {
    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    pub fn label_set(&self) -> &[String] {
        &self.label_set
    }

    pub fn vocab(&self) -> &BTreeMap<String, usize> {
        &self.vocab
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.output
    }

    pub fn output_weights_mut(&mut self) -> &mut [f64] {
        &mut self.output
    }

    pub fn features(&self, text: &str) -> Vec<usize> {
        featurize(
            &tokenize(text),
            &self.vocab,
            self.config.ngram_order,
            self.config.hash_buckets,
        )
    }

    fn hidden(&self, feats: &[usize]) -> Vec<f64> {
        let mut h = vec![0.0; self.config.embedding_dim];
        for &f in feats {
            self.embeddings.add_row_into(f, &mut h);
        }
        let n = feats.len() as f64;
        h.iter_mut().for_each(|x| *x /= n);
        h
    }

    fn logits(&self, h: &[f64]) -> Vec<f64> {
        self.output
            .chunks_exact(self.config.embedding_dim)
            .map(|w| w.iter().zip(h).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn sgd_step(&mut self, feats: &[usize], label: usize, lr: f64) {
        let dim = self.config.embedding_dim;
        let h = self.hidden(feats);
        let mut err = softmax(&self.logits(&h));
        err[label] -= 1.0;

        let mut grad_h = vec![0.0; dim];
        for (k, w) in self.output.chunks_exact(dim).enumerate() {
            for (g, wj) in grad_h.iter_mut().zip(w) {
                *g += err[k] * wj;
            }
        }
        for (k, w) in self.output.chunks_exact_mut(dim).enumerate() {
            for (wj, hj) in w.iter_mut().zip(&h) {
                *wj -= lr * err[k] * hj;
            }
        }
        let scale = lr / feats.len() as f64;
        for &f in feats {
            let row = self.embeddings.row_mut(f);
            for (e, g) in row.iter_mut().zip(&grad_h) {
                *e -= scale * g;
            }
        }
    }

    pub fn predict(&self, text: &str) -> Prediction {
        let feats = self.features(text);
        if feats.is_empty() {
            let n = self.label_set.len();
            return Prediction {
                label: self.label_set[0].clone(),
                probs: vec![1.0 / n as f64; n],
                no_features: true,
            };
        }
        let probs = softmax(&self.logits(&self.hidden(&feats)));
        Prediction {
            label: self.label_set[argmax(&probs)].clone(),
            probs,
            no_features: false,
        }
    }

    pub fn predict_batch<S: AsRef<str> + Sync>(&self, texts: &[S], exec: Execution) -> Vec<Prediction> {
        exec.map(texts, |t| self.predict(t.as_ref()))
    }

    fn label_of(&self, doc: &LabeledDoc) -> Result<usize> {
        self.label_set
            .iter()
            .position(|l| *l == doc.label)
            .ok_or_else(|| Error::UnknownLabel(doc.label.clone()))
    }

    /// Summed cross-entropy over `docs`; featureless documents contribute nothing.
    pub fn loss(&self, docs: &[LabeledDoc]) -> Result<f64> {
        let mut total = 0.0;
        for doc in docs {
            let label = self.label_of(doc)?;
            let feats = self.features(&doc.text);
            if feats.is_empty() {
                continue;
            }
            let probs = softmax(&self.logits(&self.hidden(&feats)));
            total -= probs[label].ln();
        }
        Ok(total)
    }

    /// Analytic gradient of [`TextModel::loss`] with respect to the output
    /// weights, laid out like [`TextModel::output_weights`].
    pub fn output_gradient(&self, docs: &[LabeledDoc]) -> Result<Vec<f64>> {
        let dim = self.config.embedding_dim;
        let mut grad = vec![0.0; self.output.len()];
        for doc in docs {
            let label = self.label_of(doc)?;
            let feats = self.features(&doc.text);
            if feats.is_empty() {
                continue;
            }
            let h = self.hidden(&feats);
            let mut err = softmax(&self.logits(&h));
            err[label] -= 1.0;
            for (k, g) in grad.chunks_exact_mut(dim).enumerate() {
                for (gj, hj) in g.iter_mut().zip(&h) {
                    *gj += err[k] * hj;
                }
            }
        }
        Ok(grad)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut updated_rows: Vec<(usize, Vec<f64>)> = self
            .embeddings
            .updated
            .iter()
            .map(|(r, v)| (*r, v.clone()))
            .collect();
        updated_rows.sort_by_key(|(r, _)| *r);
        let file = ModelFile {
            version: MODEL_VERSION,
            config: self.config.clone(),
            label_set: self.label_set.clone(),
            vocab: self.vocab.clone(),
            input_embeddings: EmbeddingsFile {
                rows: self.embeddings.rows,
                dim: self.embeddings.dim,
                init: EMBEDDING_INIT.to_string(),
                init_seed: self.embeddings.seed,
                updated_rows,
            },
            output_weights: self
                .output
                .chunks_exact(self.config.embedding_dim)
                .map(<[f64]>::to_vec)
                .collect(),
        };
        serde_json::to_string(&file).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn from_json(raw: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(raw).map_err(|e| Error::invalid(format!("model file: {e}")))?;
        if file.version != MODEL_VERSION {
            return Err(Error::invalid(format!("unsupported model version {}", file.version)));
        }
        file.config.validate()?;
        let dim = file.config.embedding_dim;
        let emb = file.input_embeddings;
        if emb.init != EMBEDDING_INIT || emb.dim != dim
            || emb.rows != file.vocab.len() + file.config.hash_buckets
        {
            return Err(Error::invalid("model file: embedding header does not match config"));
        }
        if file.label_set.is_empty()
            || file.output_weights.len() != file.label_set.len()
            || file.output_weights.iter().any(|w| w.len() != dim)
            || emb.updated_rows.iter().any(|(r, v)| *r >= emb.rows || v.len() != dim)
        {
            return Err(Error::invalid("model file: matrix shapes are inconsistent"));
        }
        let mut embeddings = Embeddings::new(emb.rows, dim, emb.init_seed);
        embeddings.updated = emb.updated_rows.into_iter().collect();
        Ok(TextModel {
            config: file.config,
            label_set: file.label_set,
            vocab: file.vocab,
            embeddings,
            output: file.output_weights.concat(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&raw).map_err(|e| match e {
            Error::Invalid(m) => Error::invalid(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}
