//! Synthetic time-series classification datasets with exact ground truth,
//! plus the metrics to score attribution maps against it.
//!
//! Samples are built additively: background signal generators cover the
//! whole series, feature generators are written into placed windows, and a
//! binary mask records exactly where those windows went. Because the mask
//! is tracked during generation rather than estimated afterwards, it serves
//! as ground truth for judging saliency maps, attention weights, or any
//! other per-timestep relevance scores.
//!
//! ```
//! use synthloc::builder::{FeaturePlacement, TimeSeriesBuilder};
//! use synthloc::generators::{gaussian_noise, gaussian_pulse};
//! use synthloc::metrics::{evaluate_all, EvalOptions};
//!
//! let ds = TimeSeriesBuilder::new(80)
//!     .n_samples(20)
//!     .random_state(7)
//!     .for_class(0)
//!     .add_signal(gaussian_noise(1.0))
//!     .add_feature(gaussian_pulse(3.0), FeaturePlacement::random(0.2))
//!     .build()?;
//!
//! // score the mask itself as if it were a model's attribution map
//! let attr = ds.mask().to_tensor();
//! let results = evaluate_all(&attr, &ds, &EvalOptions::default(), &[])?;
//! assert_eq!(results["auc_roc"].mean, 1.0);
//! # Ok::<(), synthloc::error::Error>(())
//! ```
//!
//! Datasets are reproducible: generation is driven by a seeded ChaCha8
//! stream with a documented draw order, and every dataset records a
//! fingerprint of its full build description in its metadata.

pub mod builder;
pub mod config;
pub mod dataset;
pub mod error;
pub mod generators;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod tensor;

pub use builder::{BuilderConfig, FeaturePlacement, PlacementMode, TimeSeriesBuilder};
pub use dataset::{Components, Dataset, DatasetMeta, Normalization};
pub use error::{Error, Result};
pub use generators::{GeneratorRegistry, GeneratorSpec, RoleHint, GENERATOR_CATALOG_VERSION};
pub use metrics::{EvalOptions, MetricResult, METRIC_NAMES};
pub use rng::RandomSource;
pub use tensor::{GroundTruthMask, TimeSeriesTensor};
