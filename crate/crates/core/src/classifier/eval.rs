use serde::Serialize;

use super::model::{LabeledDoc, TextModel};
use crate::error::{Error, Result};
use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub labels: Vec<String>,
    pub accuracy: f64,
    /// `confusion[truth][predicted]`, indexed like `labels`.
    pub confusion: Vec<Vec<u64>>,
}

pub fn evaluate(model: &TextModel, test: &[LabeledDoc], exec: Execution) -> Result<Evaluation> {
    if test.is_empty() {
        return Err(Error::invalid("evaluation set is empty"));
    }
    let labels = model.label_set().to_vec();
    let index = |l: &str| {
        labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| Error::UnknownLabel(l.to_string()))
    };
    let truth: Vec<usize> = test.iter().map(|d| index(&d.label)).collect::<Result<_>>()?;
    let texts: Vec<&str> = test.iter().map(|d| d.text.as_str()).collect();
    let predicted = model.predict_batch(&texts, exec);

    let mut confusion = vec![vec![0u64; labels.len()]; labels.len()];
    for (t, p) in truth.iter().zip(&predicted) {
        confusion[*t][index(&p.label)?] += 1;
    }
    let correct: u64 = (0..labels.len()).map(|i| confusion[i][i]).sum();
    Ok(Evaluation {
        accuracy: correct as f64 / test.len() as f64,
        labels,
        confusion,
    })
}
