use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::tensor::{validate_shapes, GroundTruthMask, Shape3, TimeSeriesTensor};

/// How sample values are scaled after the background and feature components
/// are summed. The mask and the components are never normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Per sample and channel: subtract the mean, divide by the population
    /// standard deviation. Constant series become all zeros.
    #[default]
    Zscore,
    /// Leave values as generated.
    None,
}

impl std::fmt::Display for Normalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Normalization::Zscore => write!(f, "zscore"),
            Normalization::None => write!(f, "none"),
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zscore" => Ok(Normalization::Zscore),
            "none" => Ok(Normalization::None),
            other => Err(Error::Config(format!(
                "unknown normalization `{other}`, expected `zscore` or `none`"
            ))),
        }
    }
}

/// Reproducibility record stored alongside the arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetMeta {
    pub n_classes: usize,
    pub class_labels: Vec<i64>,
    pub random_state: u64,
    pub normalization: Normalization,
    /// Hash of the full build description, seed included; two datasets
    /// with equal fingerprints were built identically and hold identical
    /// arrays.
    pub config_fingerprint: String,
    /// Pins the generator algorithms and RNG the arrays were produced with.
    pub generator_catalog_version: String,
    /// True when two feature windows overlapped on the same channel of the
    /// same sample, merging their mask runs.
    pub feature_overlap: bool,
}

/// The raw background and feature addends of `x`, kept un-normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct Components {
    pub signal: TimeSeriesTensor,
    pub feature: TimeSeriesTensor,
}

/// A generated dataset: values, labels, ground-truth mask, optional raw
/// components, and the metadata needed to reproduce all of them.
///
/// Shapes are fixed at construction. `x` and `mask` share the shape
/// (n_samples, n_dims, n_timesteps); `y` has one label per sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    x: TimeSeriesTensor,
    y: Vec<i64>,
    mask: GroundTruthMask,
    components: Option<Components>,
    meta: DatasetMeta,
}

impl Dataset {
    pub fn new(
        x: TimeSeriesTensor,
        y: Vec<i64>,
        mask: GroundTruthMask,
        components: Option<Components>,
        meta: DatasetMeta,
    ) -> Result<Self> {
        validate_shapes(&x, &mask)?;
        if let Some(c) = &components {
            validate_shapes(&x, &c.signal)?;
            validate_shapes(&x, &c.feature)?;
        }
        if y.len() != x.n_samples() {
            return Err(Error::Config(format!(
                "y has {} labels for {} samples",
                y.len(),
                x.n_samples()
            )));
        }
        if meta.class_labels.is_empty() || meta.n_classes != meta.class_labels.len() {
            return Err(Error::Config(format!(
                "n_classes is {} but class_labels lists {} labels",
                meta.n_classes,
                meta.class_labels.len()
            )));
        }
        if !meta.class_labels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "class_labels must be strictly ascending".into(),
            ));
        }
        let n_classes = meta.n_classes as i64;
        if let Some(&bad) = y.iter().find(|&&v| v < 0 || v >= n_classes) {
            return Err(Error::Config(format!(
                "label {bad} outside [0, {n_classes})"
            )));
        }
        Ok(Self {
            x,
            y,
            mask,
            components,
            meta,
        })
    }

    pub fn x(&self) -> &TimeSeriesTensor {
        &self.x
    }

    pub fn y(&self) -> &[i64] {
        &self.y
    }

    pub fn mask(&self) -> &GroundTruthMask {
        &self.mask
    }

    pub fn components(&self) -> Option<&Components> {
        self.components.as_ref()
    }

    pub fn meta(&self) -> &DatasetMeta {
        &self.meta
    }

    pub fn shape(&self) -> Shape3 {
        self.x.shape()
    }

    pub fn n_samples(&self) -> usize {
        self.x.n_samples()
    }

    /// Sample count per class label, in label order.
    pub fn class_counts(&self) -> Vec<(i64, usize)> {
        self.meta
            .class_labels
            .iter()
            .map(|&label| (label, self.y.iter().filter(|&&v| v == label).count()))
            .collect()
    }

    /// Indices of the samples belonging to `label`.
    pub fn samples_of_class(&self, label: i64) -> Vec<usize> {
        (0..self.y.len()).filter(|&i| self.y[i] == label).collect()
    }

    /// A copy with samples reordered by a seeded permutation. Labels, mask
    /// rows, and component rows move together with their sample.
    pub fn shuffled(&self, seed: u64) -> Dataset {
        let mut rng = RandomSource::from_seed(seed);
        let perm = rng.permutation(self.n_samples());
        self.permuted(&perm)
    }

    fn permuted(&self, perm: &[usize]) -> Dataset {
        let gather_f64 = |t: &TimeSeriesTensor| {
            let mut values = Vec::with_capacity(t.values().len());
            for &s in perm {
                values.extend_from_slice(t.sample(s));
            }
            TimeSeriesTensor::new(t.shape(), values).expect("permutation preserves shape")
        };
        let mut mask_values = Vec::with_capacity(self.mask.values().len());
        for &s in perm {
            mask_values.extend_from_slice(self.mask.sample(s));
        }
        Dataset {
            x: gather_f64(&self.x),
            y: perm.iter().map(|&s| self.y[s]).collect(),
            mask: GroundTruthMask::new(self.mask.shape(), mask_values)
                .expect("permutation preserves shape"),
            components: self.components.as_ref().map(|c| Components {
                signal: gather_f64(&c.signal),
                feature: gather_f64(&c.feature),
            }),
            meta: self.meta.clone(),
        }
    }
}
