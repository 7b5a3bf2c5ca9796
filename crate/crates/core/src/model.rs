//! Sparse linear model trained with the averaged perceptron.
//!
//! Averaging uses the lazy identity: alongside each raw weight w the
//! model keeps an accumulator u that receives (t-1) * delta whenever an
//! update delta is applied while processing the t-th instance. After T
//! processed instances the averaged weight is w - u / T, which equals
//! the mean of the T intermediate weight vectors.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Where a training instance got its current label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    ProjectedLabeled,
    FilledIn,
    Relabeled,
}

/// One classification decision with its gold label and training weight.
#[derive(Debug, Clone)]
pub struct TrainingInstance {
    pub features: FeatureVector,
    pub gold_label: String,
    /// Update weight in [0, 1].
    pub cost: f64,
    pub origin: Origin,
}

impl TrainingInstance {
    pub fn new(features: FeatureVector, gold_label: impl Into<String>, cost: f64) -> Self {
        TrainingInstance {
            features,
            gold_label: gold_label.into(),
            cost,
            origin: Origin::ProjectedLabeled,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Cell {
    weight: f64,
    accumulated: f64,
}

/// Sparse feature-by-label weight store with averaged-perceptron
/// bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    labels: Vec<String>,
    rows: HashMap<u64, Vec<Cell>>,
    update_count: u64,
}

impl LinearModel {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument(
                "a model needs at least one label".to_string(),
            ));
        }
        let mut seen = labels.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != labels.len() {
            return Err(Error::InvalidArgument("duplicate label".to_string()));
        }
        Ok(LinearModel {
            labels,
            rows: HashMap::new(),
            update_count: 0,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Per-label decision scores for a feature vector.
    pub fn scores(&self, features: &FeatureVector, use_averaged: bool) -> Vec<f64> {
        let mut scores = vec![0.0; self.labels.len()];
        for (feature, value) in features.iter() {
            if let Some(cells) = self.rows.get(&feature) {
                for (score, cell) in scores.iter_mut().zip(cells) {
                    *score += self.effective(cell, use_averaged) * value;
                }
            }
        }
        scores
    }

    fn effective(&self, cell: &Cell, use_averaged: bool) -> f64 {
        if use_averaged && self.update_count > 0 {
            cell.weight - cell.accumulated / self.update_count as f64
        } else {
            cell.weight
        }
    }

    /// Argmax decoding; ties go to the earlier label in the label list.
    pub fn predict(&self, features: &FeatureVector, use_averaged: bool) -> &str {
        let scores = self.scores(features, use_averaged);
        let mut best = 0;
        for (i, score) in scores.iter().enumerate().skip(1) {
            if *score > scores[best] {
                best = i;
            }
        }
        &self.labels[best]
    }

    /// Cost-weighted perceptron update: on a mistake the gold label row
    /// gains cost * value per feature and the predicted row loses the
    /// same amount. Correct predictions leave the weights untouched.
    /// Every call advances the averaging clock by one instance.
    pub fn update(&mut self, instance: &TrainingInstance, predicted: &str) {
        debug_assert!((0.0..=1.0).contains(&instance.cost));
        if predicted != instance.gold_label {
            let gold = self
                .label_index(&instance.gold_label)
                .expect("gold label must be in the label set");
            let pred = self
                .label_index(predicted)
                .expect("predicted label must be in the label set");
            let age = self.update_count as f64;
            for (feature, value) in instance.features.iter() {
                let delta = instance.cost * value;
                let cells = self
                    .rows
                    .entry(feature)
                    .or_insert_with(|| vec![Cell::default(); self.labels.len()]);
                cells[gold].weight += delta;
                cells[gold].accumulated += age * delta;
                cells[pred].weight -= delta;
                cells[pred].accumulated -= age * delta;
            }
        }
        self.update_count += 1;
    }

    /// The plain perceptron update without an instance cost.
    pub fn update_standard(&mut self, features: &FeatureVector, gold: &str, predicted: &str) {
        if predicted != gold {
            let gold = self
                .label_index(gold)
                .expect("gold label must be in the label set");
            let pred = self
                .label_index(predicted)
                .expect("predicted label must be in the label set");
            let age = self.update_count as f64;
            for (feature, value) in features.iter() {
                let cells = self
                    .rows
                    .entry(feature)
                    .or_insert_with(|| vec![Cell::default(); self.labels.len()]);
                cells[gold].weight += value;
                cells[gold].accumulated += age * value;
                cells[pred].weight -= value;
                cells[pred].accumulated -= age * value;
            }
        }
        self.update_count += 1;
    }

    /// Raw weight of a (feature, label) cell; 0 when absent.
    pub fn weight(&self, feature: u64, label: &str) -> f64 {
        match (self.rows.get(&feature), self.label_index(label)) {
            (Some(cells), Some(idx)) => cells[idx].weight,
            _ => 0.0,
        }
    }

    /// Averaged weight of a (feature, label) cell.
    pub fn averaged_weight(&self, feature: u64, label: &str) -> f64 {
        match (self.rows.get(&feature), self.label_index(label)) {
            (Some(cells), Some(idx)) => self.effective(&cells[idx], true),
            _ => 0.0,
        }
    }

    /// Non-empty cells as (feature, label index, weight, accumulated),
    /// sorted for stable serialization.
    pub fn sorted_cells(&self) -> Vec<(u64, usize, f64, f64)> {
        let mut out = Vec::new();
        for (&feature, cells) in &self.rows {
            for (idx, cell) in cells.iter().enumerate() {
                if cell.weight != 0.0 || cell.accumulated != 0.0 {
                    out.push((feature, idx, cell.weight, cell.accumulated));
                }
            }
        }
        out.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        out
    }

    /// Rebuild a model from serialized parts.
    pub fn from_parts(
        labels: Vec<String>,
        update_count: u64,
        cells: Vec<(u64, usize, f64, f64)>,
    ) -> Result<Self> {
        let mut model = LinearModel::new(labels)?;
        model.update_count = update_count;
        for (feature, idx, weight, accumulated) in cells {
            if idx >= model.labels.len() {
                return Err(Error::ModelFormat(format!(
                    "label index {} out of range",
                    idx
                )));
            }
            let row = model
                .rows
                .entry(feature)
                .or_insert_with(|| vec![Cell::default(); model.labels.len()]);
            row[idx] = Cell {
                weight,
                accumulated,
            };
        }
        Ok(model)
    }
}

/// Train a model over shuffled epochs with the cost-weighted update. The
/// label set is the sorted set of gold labels in the data.
pub fn train_stage(
    instances: &[TrainingInstance],
    epochs: u32,
    seed: u64,
) -> Result<LinearModel> {
    let mut labels: Vec<String> = instances.iter().map(|i| i.gold_label.clone()).collect();
    labels.sort();
    labels.dedup();
    train_stage_with_labels(instances, labels, epochs, seed)
}

/// Same as [`train_stage`] with an explicit label set, so stages with a
/// fixed decision space keep it even when the data happens not to cover
/// every label.
pub fn train_stage_with_labels(
    instances: &[TrainingInstance],
    labels: Vec<String>,
    epochs: u32,
    seed: u64,
) -> Result<LinearModel> {
    train_stage_from(LinearModel::new(labels)?, instances, epochs, seed)
}

/// Continue training an existing model (used for warm starts).
pub fn train_stage_from(
    mut model: LinearModel,
    instances: &[TrainingInstance],
    epochs: u32,
    seed: u64,
) -> Result<LinearModel> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot train on an empty instance list".to_string(),
        ));
    }
    if epochs < 1 {
        return Err(Error::InvalidArgument("epochs must be >= 1".to_string()));
    }
    for inst in instances {
        if !(0.0..=1.0).contains(&inst.cost) {
            return Err(Error::InvalidArgument(format!(
                "instance cost {} outside [0, 1]",
                inst.cost
            )));
        }
        if model.label_index(&inst.gold_label).is_none() {
            return Err(Error::InvalidArgument(format!(
                "gold label '{}' not in the label set",
                inst.gold_label
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..instances.len()).collect();
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let inst = &instances[i];
            let predicted = model.predict(&inst.features, false).to_string();
            model.update(inst, &predicted);
        }
    }
    Ok(model)
}

/// The uncosted counterpart of [`train_stage`]: identical shuffling and
/// decoding, plain updates. Instance costs are ignored.
pub fn train_stage_standard(
    instances: &[TrainingInstance],
    epochs: u32,
    seed: u64,
) -> Result<LinearModel> {
    let mut labels: Vec<String> = instances.iter().map(|i| i.gold_label.clone()).collect();
    labels.sort();
    labels.dedup();
    let mut model = LinearModel::new(labels)?;
    if epochs < 1 {
        return Err(Error::InvalidArgument("epochs must be >= 1".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..instances.len()).collect();
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let inst = &instances[i];
            let predicted = model.predict(&inst.features, false).to_string();
            model.update_standard(&inst.features, &inst.gold_label, &predicted);
        }
    }
    Ok(model)
}
