use std::collections::BTreeMap;

use crate::config::fingerprint;
use crate::dataset::{Components, Dataset, DatasetMeta, Normalization};
use crate::error::{Error, Result};
use crate::generators::{
    global_registry, BoundGenerator, GeneratorRegistry, GeneratorSpec, GENERATOR_CATALOG_VERSION,
};
use crate::rng::RandomSource;
use crate::tensor::{GroundTruthMask, TimeSeriesTensor};

/// Where a feature window starts within the series.
#[derive(Clone, Debug, PartialEq)]
pub enum PlacementMode {
    /// Start drawn uniformly from the integers [0, n_timesteps - length].
    Random,
    /// Fixed start index, identical in every sample.
    FixedStart(usize),
}

/// Position and size of one feature window.
#[derive(Clone, Debug, PartialEq)]
pub struct FeaturePlacement {
    pub mode: PlacementMode,
    /// Window length as a fraction of n_timesteps, in (0, 1]. The realized
    /// length is round(length_pct * n_timesteps), floored at 1 and capped
    /// at n_timesteps. Halves round away from zero.
    pub length_pct: f64,
    /// When true, every channel carrying this feature slot reuses one
    /// (start, length) draw per sample, so the windows line up across
    /// channels. On by default.
    pub align_across_channels: bool,
}

impl FeaturePlacement {
    pub fn random(length_pct: f64) -> Self {
        Self {
            mode: PlacementMode::Random,
            length_pct,
            align_across_channels: true,
        }
    }

    pub fn fixed(start: usize, length_pct: f64) -> Self {
        Self {
            mode: PlacementMode::FixedStart(start),
            length_pct,
            align_across_channels: true,
        }
    }

    pub fn aligned(mut self, align: bool) -> Self {
        self.align_across_channels = align;
        self
    }

    fn validate(&self, n_timesteps: usize) -> Result<()> {
        if !(self.length_pct > 0.0 && self.length_pct <= 1.0) {
            return Err(Error::InvalidPlacement(format!(
                "length_pct must lie in (0, 1], got {}",
                self.length_pct
            )));
        }
        let w = window_length(self.length_pct, n_timesteps);
        if let PlacementMode::FixedStart(start) = self.mode {
            if start + w > n_timesteps {
                return Err(Error::InvalidPlacement(format!(
                    "window [{start}, {}) does not fit in {n_timesteps} timesteps",
                    start + w
                )));
            }
        }
        Ok(())
    }
}

fn window_length(length_pct: f64, n_timesteps: usize) -> usize {
    let w = (length_pct * n_timesteps as f64).round() as usize;
    w.max(1).min(n_timesteps)
}

/// Draws (or fixes) the (start, length) of a feature window. Random starts
/// are uniform over every valid position, so a full-length window sits at 0.
pub fn place_window(
    rng: &mut RandomSource,
    placement: &FeaturePlacement,
    n_timesteps: usize,
) -> Result<(usize, usize)> {
    placement.validate(n_timesteps)?;
    let w = window_length(placement.length_pct, n_timesteps);
    let start = match placement.mode {
        PlacementMode::FixedStart(start) => start,
        PlacementMode::Random => rng.uniform_int(n_timesteps - w),
    };
    Ok((start, w))
}

/// Generators attached to one channel of one class.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ChannelSpec {
    /// Background generators, summed over the full series length.
    pub signals: Vec<GeneratorSpec>,
    /// Feature generators, each written into its own placed window.
    pub features: Vec<(GeneratorSpec, FeaturePlacement)>,
}

/// All generators for one class, keyed by channel index. Channels without
/// an entry stay zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSpec {
    pub label: i64,
    pub channels: BTreeMap<usize, ChannelSpec>,
}

/// Complete description of a dataset build. Obtainable from the fluent
/// [`TimeSeriesBuilder`] or from a YAML config; both routes produce the
/// same structure and therefore the same fingerprint.
#[derive(Clone, Debug, PartialEq)]
pub struct BuilderConfig {
    pub n_timesteps: usize,
    pub n_dims: usize,
    pub n_samples: usize,
    pub normalization: Normalization,
    pub random_state: u64,
    pub keep_components: bool,
    pub classes: Vec<ClassSpec>,
}

impl BuilderConfig {
    /// Canonical one-line rendering of the full build description, seed
    /// included. Classes are ordered by label and parameters by name, so
    /// two configs that describe the same build render identically
    /// regardless of how they were assembled. The dataset fingerprint is a
    /// hash of this string.
    pub fn canonical_string(&self) -> String {
        let mut s = format!(
            "v1;n_timesteps={};n_dims={};n_samples={};normalization={};random_state={};keep_components={};classes=[",
            self.n_timesteps,
            self.n_dims,
            self.n_samples,
            self.normalization,
            self.random_state,
            self.keep_components
        );
        let mut classes: Vec<&ClassSpec> = self.classes.iter().collect();
        classes.sort_by_key(|c| c.label);
        for (i, class) in classes.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("{{label={};channels=[", class.label));
            for (j, (channel, spec)) in class.channels.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                s.push_str(&format!("{{channel={channel};signals=["));
                for (k, sig) in spec.signals.iter().enumerate() {
                    if k > 0 {
                        s.push(',');
                    }
                    push_generator(&mut s, sig);
                }
                s.push_str("];features=[");
                for (k, (feat, placement)) in spec.features.iter().enumerate() {
                    if k > 0 {
                        s.push(',');
                    }
                    push_generator(&mut s, feat);
                    let mode = match placement.mode {
                        PlacementMode::Random => "random".to_string(),
                        PlacementMode::FixedStart(start) => format!("fixed:{start}"),
                    };
                    s.push_str(&format!(
                        ":{{mode={mode};length_pct={};align={}}}",
                        fmt_f64(placement.length_pct),
                        placement.align_across_channels
                    ));
                }
                s.push_str("]}");
            }
            s.push_str("]}");
        }
        s.push(']');
        s
    }
}

fn push_generator(s: &mut String, spec: &GeneratorSpec) {
    s.push_str(&format!("{{kind={};params={{", spec.kind));
    for (i, (name, value)) in spec.params.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&format!("{name}={}", fmt_f64(*value)));
    }
    s.push_str("}}");
}

fn fmt_f64(v: f64) -> String {
    // fold -0.0 into 0.0 so equal configs cannot hash apart
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:?}")
}

#[derive(Clone, Debug, PartialEq)]
enum Misuse {
    NoClassScope,
}

/// Fluent assembler for synthetic classification datasets.
///
/// Series are built additively: per class, background signals cover the
/// whole length while features are written into placed windows whose
/// positions are recorded in a binary mask. Builders are plain values;
/// cloning one gives an independent copy, which is the idiomatic way to
/// derive train and test splits that differ only in size and seed.
///
/// ```
/// use synthloc::builder::{FeaturePlacement, TimeSeriesBuilder};
/// use synthloc::generators::{gaussian_noise, gaussian_pulse, seasonal};
///
/// let base = TimeSeriesBuilder::new(100)
///     .for_class(0)
///     .add_signal(gaussian_noise(1.0))
///     .add_feature(gaussian_pulse(3.0), FeaturePlacement::random(0.3))
///     .for_class(1)
///     .add_signal(gaussian_noise(1.0))
///     .add_feature(seasonal(10.0, 3.0), FeaturePlacement::random(0.3));
/// let train = base.clone().n_samples(200).random_state(42).build()?;
/// let test = base.clone().n_samples(50).random_state(43).build()?;
/// assert_eq!(train.shape(), (200, 1, 100));
/// assert_eq!(test.shape(), (50, 1, 100));
/// # Ok::<(), synthloc::error::Error>(())
/// ```
///
/// Builds are deterministic. Draws are consumed in one fixed order: classes
/// by ascending label, samples in order, channels by ascending index; within
/// a channel each signal draws in insertion order, then each feature draws
/// its placement (unless an aligned slot already drew it on an earlier
/// channel) followed by its content. Reordering any of this would silently
/// change datasets, which is why the catalog version is stored in metadata.
#[derive(Clone, Debug)]
pub struct TimeSeriesBuilder {
    config: BuilderConfig,
    scope: Option<i64>,
    misuse: Option<Misuse>,
}

impl TimeSeriesBuilder {
    /// Starts a builder. Defaults: 1 channel, 100 samples, z-score
    /// normalization, seed 0, components kept.
    pub fn new(n_timesteps: usize) -> Self {
        Self {
            config: BuilderConfig {
                n_timesteps,
                n_dims: 1,
                n_samples: 100,
                normalization: Normalization::Zscore,
                random_state: 0,
                keep_components: true,
                classes: Vec::new(),
            },
            scope: None,
            misuse: None,
        }
    }

    /// Resumes from a complete description, e.g. one loaded from YAML.
    pub fn from_config(config: BuilderConfig) -> Self {
        Self {
            config,
            scope: None,
            misuse: None,
        }
    }

    pub fn n_dims(mut self, n_dims: usize) -> Self {
        self.config.n_dims = n_dims;
        self
    }

    pub fn n_samples(mut self, n_samples: usize) -> Self {
        self.config.n_samples = n_samples;
        self
    }

    pub fn normalization(mut self, normalization: Normalization) -> Self {
        self.config.normalization = normalization;
        self
    }

    pub fn random_state(mut self, seed: u64) -> Self {
        self.config.random_state = seed;
        self
    }

    pub fn keep_components(mut self, keep: bool) -> Self {
        self.config.keep_components = keep;
        self
    }

    /// Opens (or reopens) the class that subsequent add_signal and
    /// add_feature calls attach to.
    pub fn for_class(mut self, label: i64) -> Self {
        if !self.config.classes.iter().any(|c| c.label == label) {
            self.config.classes.push(ClassSpec {
                label,
                channels: BTreeMap::new(),
            });
        }
        self.scope = Some(label);
        self
    }

    /// Adds a background generator on channel 0 of the current class.
    pub fn add_signal(self, spec: GeneratorSpec) -> Self {
        self.add_signal_on(0, spec)
    }

    /// Adds a background generator on the given channel of the current
    /// class.
    pub fn add_signal_on(mut self, channel: usize, spec: GeneratorSpec) -> Self {
        match self.current_channel(channel) {
            Some(ch) => ch.signals.push(spec),
            None => self.note_misuse(),
        }
        self
    }

    /// Adds a feature generator on channel 0 of the current class.
    pub fn add_feature(self, spec: GeneratorSpec, placement: FeaturePlacement) -> Self {
        self.add_feature_on(0, spec, placement)
    }

    /// Adds a feature generator on the given channel of the current class.
    pub fn add_feature_on(
        mut self,
        channel: usize,
        spec: GeneratorSpec,
        placement: FeaturePlacement,
    ) -> Self {
        match self.current_channel(channel) {
            Some(ch) => ch.features.push((spec, placement)),
            None => self.note_misuse(),
        }
        self
    }

    fn current_channel(&mut self, channel: usize) -> Option<&mut ChannelSpec> {
        let label = self.scope?;
        let class = self
            .config
            .classes
            .iter_mut()
            .find(|c| c.label == label)
            .expect("scoped class exists");
        Some(class.channels.entry(channel).or_default())
    }

    fn note_misuse(&mut self) {
        if self.misuse.is_none() {
            self.misuse = Some(Misuse::NoClassScope);
        }
    }

    /// The description this builder has accumulated so far.
    pub fn config(&self) -> &BuilderConfig {
        &self.config
    }

    /// Builds the dataset using the process-wide generator registry.
    /// Does not consume the builder, so one builder can produce any number
    /// of datasets.
    pub fn build(&self) -> Result<Dataset> {
        let registry = global_registry()
            .read()
            .expect("generator registry lock poisoned");
        self.build_with(&registry)
    }

    /// Builds the dataset against an explicit registry.
    pub fn build_with(&self, registry: &GeneratorRegistry) -> Result<Dataset> {
        if let Some(Misuse::NoClassScope) = self.misuse {
            return Err(Error::NoClassScope);
        }
        build_dataset(&self.config, registry)
    }
}

struct ResolvedChannel {
    channel: usize,
    signals: Vec<BoundGenerator>,
    features: Vec<(BoundGenerator, FeaturePlacement)>,
}

struct ResolvedClass {
    count: usize,
    channels: Vec<ResolvedChannel>,
}

fn validate_config(config: &BuilderConfig) -> Result<()> {
    if config.n_timesteps == 0 {
        return Err(Error::Config("n_timesteps must be at least 1".into()));
    }
    if config.n_dims == 0 {
        return Err(Error::Config("n_dims must be at least 1".into()));
    }
    if config.n_samples == 0 {
        return Err(Error::Config("n_samples must be at least 1".into()));
    }
    if config.classes.is_empty() {
        return Err(Error::Config("at least one class is required".into()));
    }
    let mut labels: Vec<i64> = config.classes.iter().map(|c| c.label).collect();
    labels.sort_unstable();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config("duplicate class label".into()));
    }
    let expected: Vec<i64> = (0..labels.len() as i64).collect();
    if labels != expected {
        return Err(Error::Config(format!(
            "class labels must be contiguous from 0, got {labels:?}"
        )));
    }
    for class in &config.classes {
        let has_any = class
            .channels
            .values()
            .any(|ch| !ch.signals.is_empty() || !ch.features.is_empty());
        if !has_any {
            return Err(Error::Config(format!(
                "class {} defines no signals or features",
                class.label
            )));
        }
        for (&channel, spec) in &class.channels {
            if channel >= config.n_dims {
                return Err(Error::ChannelOutOfRange {
                    channel,
                    n_dims: config.n_dims,
                });
            }
            for (_, placement) in &spec.features {
                placement.validate(config.n_timesteps)?;
            }
        }
        check_aligned_slots(class)?;
    }
    Ok(())
}

/// Channels sharing an aligned feature slot must describe the same window,
/// otherwise one draw could not satisfy both.
fn check_aligned_slots(class: &ClassSpec) -> Result<()> {
    let mut by_slot: BTreeMap<usize, Vec<(usize, &FeaturePlacement)>> = BTreeMap::new();
    for (&channel, spec) in &class.channels {
        for (slot, (_, placement)) in spec.features.iter().enumerate() {
            if placement.align_across_channels {
                by_slot.entry(slot).or_default().push((channel, placement));
            }
        }
    }
    for (slot, members) in by_slot {
        let (first_channel, first) = members[0];
        for (channel, placement) in &members[1..] {
            if placement.mode != first.mode || placement.length_pct != first.length_pct {
                return Err(Error::Config(format!(
                    "class {}: aligned feature slot {slot} has different placements on channels {first_channel} and {channel}",
                    class.label
                )));
            }
        }
    }
    Ok(())
}

/// Samples per class: n_samples / n_classes each, remainder going to the
/// lowest labels.
fn class_counts(n_samples: usize, n_classes: usize) -> Vec<usize> {
    let base = n_samples / n_classes;
    let extra = n_samples % n_classes;
    (0..n_classes)
        .map(|label| base + usize::from(label < extra))
        .collect()
}

fn build_dataset(config: &BuilderConfig, registry: &GeneratorRegistry) -> Result<Dataset> {
    validate_config(config)?;

    let mut classes: Vec<&ClassSpec> = config.classes.iter().collect();
    classes.sort_by_key(|c| c.label);
    let counts = class_counts(config.n_samples, classes.len());

    let mut resolved = Vec::with_capacity(classes.len());
    for (class, &count) in classes.iter().zip(&counts) {
        let mut channels = Vec::new();
        for (&channel, spec) in &class.channels {
            let signals = spec
                .signals
                .iter()
                .map(|s| registry.resolve(s))
                .collect::<Result<Vec<_>>>()?;
            let features = spec
                .features
                .iter()
                .map(|(s, p)| Ok((registry.resolve(s)?, p.clone())))
                .collect::<Result<Vec<_>>>()?;
            channels.push(ResolvedChannel {
                channel,
                signals,
                features,
            });
        }
        resolved.push(ResolvedClass { count, channels });
    }

    let shape = (config.n_samples, config.n_dims, config.n_timesteps);
    let t = config.n_timesteps;
    let mut signal = TimeSeriesTensor::zeros(shape)?;
    let mut feature = TimeSeriesTensor::zeros(shape)?;
    let mut mask = GroundTruthMask::zeros(shape)?;
    let mut y = Vec::with_capacity(config.n_samples);
    let mut rng = RandomSource::from_seed(config.random_state);
    let mut overlap = false;
    let mut sample = 0;

    for (label, class) in resolved.iter().enumerate() {
        for _ in 0..class.count {
            y.push(label as i64);
            let mut aligned: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
            for rc in &class.channels {
                for bound in &rc.signals {
                    let values = bound.generate(t, &mut rng)?;
                    for (dst, v) in signal.slice_mut(sample, rc.channel).iter_mut().zip(&values)
                    {
                        *dst += v;
                    }
                }
                for (slot, (bound, placement)) in rc.features.iter().enumerate() {
                    let (start, w) = if placement.align_across_channels {
                        match aligned.get(&slot) {
                            Some(&window) => window,
                            None => {
                                let window = place_window(&mut rng, placement, t)?;
                                aligned.insert(slot, window);
                                window
                            }
                        }
                    } else {
                        place_window(&mut rng, placement, t)?
                    };
                    let values = bound.generate(w, &mut rng)?;
                    let row = feature.slice_mut(sample, rc.channel);
                    for (dst, v) in row[start..start + w].iter_mut().zip(&values) {
                        *dst += v;
                    }
                    if mask.slice(sample, rc.channel)[start..start + w].contains(&1) {
                        overlap = true;
                    }
                    mask.set_run(sample, rc.channel, start, w);
                }
            }
            sample += 1;
        }
    }

    let raw: Vec<f64> = signal
        .values()
        .iter()
        .zip(feature.values())
        .map(|(n, f)| n + f)
        .collect();
    let mut x = TimeSeriesTensor::new(shape, raw)?;
    if config.normalization == Normalization::Zscore {
        zscore_in_place(&mut x);
    }

    let meta = DatasetMeta {
        n_classes: classes.len(),
        class_labels: (0..classes.len() as i64).collect(),
        random_state: config.random_state,
        normalization: config.normalization,
        config_fingerprint: fingerprint(config),
        generator_catalog_version: GENERATOR_CATALOG_VERSION.to_string(),
        feature_overlap: overlap,
    };
    let components = config
        .keep_components
        .then_some(Components { signal, feature });
    Dataset::new(x, y, mask, components, meta)
}

/// Per sample and channel: subtract the mean, divide by the population
/// standard deviation. Slices with standard deviation below 1e-12 become
/// all zeros instead of blowing up.
fn zscore_in_place(x: &mut TimeSeriesTensor) {
    let (n, d, _) = x.shape();
    for sample in 0..n {
        for channel in 0..d {
            let row = x.slice_mut(sample, channel);
            let len = row.len() as f64;
            let mean = row.iter().sum::<f64>() / len;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len;
            let std = var.sqrt();
            if std < 1e-12 {
                row.fill(0.0);
            } else {
                for v in row.iter_mut() {
                    *v = (*v - mean) / std;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gaussian_noise, gaussian_pulse, peak, seasonal, trend};

    fn two_class_builder() -> TimeSeriesBuilder {
        TimeSeriesBuilder::new(100)
            .for_class(0)
            .add_signal(gaussian_noise(1.0))
            .add_feature(gaussian_pulse(3.0), FeaturePlacement::random(0.3))
            .for_class(1)
            .add_signal(gaussian_noise(1.0))
            .add_feature(seasonal(10.0, 3.0), FeaturePlacement::random(0.3))
    }

    #[test]
    fn window_length_rounds_half_away_from_zero() {
        assert_eq!(window_length(0.3, 100), 30);
        assert_eq!(window_length(0.25, 10), 3);
        assert_eq!(window_length(0.001, 100), 1);
        assert_eq!(window_length(1.0, 7), 7);
    }

    #[test]
    fn place_window_fits_and_is_uniform_over_valid_starts() {
        let mut rng = RandomSource::from_seed(0);
        let placement = FeaturePlacement::random(0.3);
        let mut seen = [false; 71];
        for _ in 0..20_000 {
            let (start, w) = place_window(&mut rng, &placement, 100).unwrap();
            assert_eq!(w, 30);
            assert!(start + w <= 100);
            seen[start] = true;
        }
        assert!(seen.iter().all(|&s| s), "some valid start never drawn");
    }

    #[test]
    fn full_length_window_starts_at_zero() {
        let mut rng = RandomSource::from_seed(0);
        let (start, w) = place_window(&mut rng, &FeaturePlacement::random(1.0), 50).unwrap();
        assert_eq!((start, w), (0, 50));
    }

    #[test]
    fn fixed_window_out_of_bounds_rejected() {
        let mut rng = RandomSource::from_seed(0);
        let err = place_window(&mut rng, &FeaturePlacement::fixed(80, 0.3), 100).unwrap_err();
        assert!(matches!(err, Error::InvalidPlacement(_)));
        assert!(place_window(&mut rng, &FeaturePlacement::fixed(70, 0.3), 100).is_ok());
    }

    #[test]
    fn bad_length_pct_rejected() {
        let mut rng = RandomSource::from_seed(0);
        for pct in [0.0, -0.5, 1.5, f64::NAN] {
            let err = place_window(&mut rng, &FeaturePlacement::random(pct), 100).unwrap_err();
            assert!(matches!(err, Error::InvalidPlacement(_)), "pct {pct}");
        }
    }

    #[test]
    fn builds_expected_shapes_and_labels() {
        let ds = two_class_builder().n_samples(10).build().unwrap();
        assert_eq!(ds.shape(), (10, 1, 100));
        assert_eq!(ds.y(), &[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        assert_eq!(ds.meta().n_classes, 2);
        assert_eq!(ds.meta().class_labels, vec![0, 1]);
    }

    #[test]
    fn remainder_samples_go_to_lowest_labels() {
        assert_eq!(class_counts(7, 3), vec![3, 2, 2]);
        assert_eq!(class_counts(9, 3), vec![3, 3, 3]);
        assert_eq!(class_counts(2, 2), vec![1, 1]);
        let ds = two_class_builder().n_samples(5).build().unwrap();
        assert_eq!(ds.y(), &[0, 0, 0, 1, 1]);
    }

    #[test]
    fn rebuild_is_bit_identical() {
        let builder = two_class_builder().n_samples(8).random_state(11);
        let a = builder.build().unwrap();
        let b = builder.build().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let builder = two_class_builder().n_samples(8);
        let a = builder.clone().random_state(1).build().unwrap();
        let b = builder.clone().random_state(2).build().unwrap();
        assert_ne!(a.x().values(), b.x().values());
    }

    #[test]
    fn clones_are_independent() {
        let base = two_class_builder().n_samples(6);
        let before = base.build().unwrap();
        let _derived = base.clone().n_samples(3).random_state(99);
        let after = base.build().unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn mask_marks_exactly_the_windows() {
        let ds = TimeSeriesBuilder::new(50)
            .n_samples(4)
            .for_class(0)
            .add_signal(gaussian_noise(1.0))
            .add_feature(peak(2.0), FeaturePlacement::fixed(10, 0.2))
            .build()
            .unwrap();
        for s in 0..4 {
            assert_eq!(ds.mask().runs(s, 0), vec![(10, 10)]);
        }
    }

    #[test]
    fn feature_values_zero_outside_mask() {
        let ds = two_class_builder().n_samples(20).build().unwrap();
        let f = &ds.components().unwrap().feature;
        for s in 0..20 {
            for (i, (&fv, &mv)) in f.slice(s, 0).iter().zip(ds.mask().slice(s, 0)).enumerate() {
                if mv == 0 {
                    assert_eq!(fv, 0.0, "sample {s} index {i}");
                }
            }
        }
    }

    #[test]
    fn sum_identity_holds_without_normalization() {
        let ds = two_class_builder()
            .n_samples(10)
            .normalization(Normalization::None)
            .build()
            .unwrap();
        let c = ds.components().unwrap();
        for ((x, n), f) in ds
            .x()
            .values()
            .iter()
            .zip(c.signal.values())
            .zip(c.feature.values())
        {
            assert_eq!(*x, n + f);
        }
    }

    #[test]
    fn zscore_slices_have_zero_mean_unit_std() {
        let ds = two_class_builder().n_samples(10).build().unwrap();
        for s in 0..10 {
            let row = ds.x().slice(s, 0);
            let mean = row.iter().sum::<f64>() / row.len() as f64;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / row.len() as f64;
            assert!(mean.abs() < 1e-12, "mean {mean}");
            assert!((var.sqrt() - 1.0).abs() < 1e-9, "std {}", var.sqrt());
        }
    }

    #[test]
    fn constant_slice_zscores_to_zeros() {
        let ds = TimeSeriesBuilder::new(10)
            .n_samples(2)
            .for_class(0)
            .add_signal(trend(0.0).with("intercept", 5.0))
            .build()
            .unwrap();
        assert!(ds.x().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn normalization_leaves_mask_and_components_alone() {
        let raw = two_class_builder()
            .n_samples(6)
            .normalization(Normalization::None)
            .build()
            .unwrap();
        let scaled = two_class_builder().n_samples(6).build().unwrap();
        assert_eq!(raw.mask(), scaled.mask());
        assert_eq!(raw.components(), scaled.components());
        assert_ne!(raw.x(), scaled.x());
    }

    #[test]
    fn unspecified_channels_stay_zero() {
        let ds = TimeSeriesBuilder::new(20)
            .n_dims(3)
            .n_samples(4)
            .normalization(Normalization::None)
            .for_class(0)
            .add_signal_on(1, gaussian_noise(1.0))
            .build()
            .unwrap();
        for s in 0..4 {
            assert!(ds.x().slice(s, 0).iter().all(|&v| v == 0.0));
            assert!(ds.x().slice(s, 2).iter().all(|&v| v == 0.0));
            assert!(ds.x().slice(s, 1).iter().any(|&v| v != 0.0));
        }
    }

    #[test]
    fn aligned_features_share_windows_across_channels() {
        let placement = FeaturePlacement::random(0.2);
        let ds = TimeSeriesBuilder::new(60)
            .n_dims(2)
            .n_samples(12)
            .for_class(0)
            .add_signal_on(0, gaussian_noise(1.0))
            .add_signal_on(1, gaussian_noise(1.0))
            .add_feature_on(0, peak(2.0), placement.clone())
            .add_feature_on(1, peak(2.0), placement)
            .build()
            .unwrap();
        for s in 0..12 {
            assert_eq!(ds.mask().runs(s, 0), ds.mask().runs(s, 1), "sample {s}");
        }
    }

    #[test]
    fn unaligned_features_place_independently() {
        let placement = FeaturePlacement::random(0.1).aligned(false);
        let ds = TimeSeriesBuilder::new(100)
            .n_dims(2)
            .n_samples(20)
            .random_state(3)
            .for_class(0)
            .add_signal_on(0, gaussian_noise(1.0))
            .add_signal_on(1, gaussian_noise(1.0))
            .add_feature_on(0, peak(2.0), placement.clone())
            .add_feature_on(1, peak(2.0), placement)
            .build()
            .unwrap();
        let differing = (0..20)
            .filter(|&s| ds.mask().runs(s, 0) != ds.mask().runs(s, 1))
            .count();
        assert!(differing > 0, "independent placements never diverged");
    }

    #[test]
    fn misaligned_placements_on_aligned_slot_rejected() {
        let err = TimeSeriesBuilder::new(60)
            .n_dims(2)
            .for_class(0)
            .add_feature_on(0, peak(2.0), FeaturePlacement::random(0.2))
            .add_feature_on(1, peak(2.0), FeaturePlacement::random(0.4))
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::Config(_)), "got {err}");
    }

    #[test]
    fn overlap_reported_in_meta() {
        let overlapping = TimeSeriesBuilder::new(50)
            .n_samples(2)
            .for_class(0)
            .add_feature(peak(1.0), FeaturePlacement::fixed(10, 0.2))
            .add_feature(peak(1.0), FeaturePlacement::fixed(15, 0.2))
            .build()
            .unwrap();
        assert!(overlapping.meta().feature_overlap);
        // overlapping windows merge into one mask run
        assert_eq!(overlapping.mask().runs(0, 0), vec![(10, 15)]);

        let disjoint = TimeSeriesBuilder::new(50)
            .n_samples(2)
            .for_class(0)
            .add_feature(peak(1.0), FeaturePlacement::fixed(10, 0.2))
            .add_feature(peak(1.0), FeaturePlacement::fixed(30, 0.2))
            .build()
            .unwrap();
        assert!(!disjoint.meta().feature_overlap);
    }

    #[test]
    fn add_before_for_class_fails_at_build() {
        let err = TimeSeriesBuilder::new(50)
            .add_signal(gaussian_noise(1.0))
            .for_class(0)
            .add_signal(gaussian_noise(1.0))
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::NoClassScope));
    }

    #[test]
    fn structural_errors_rejected_at_build() {
        // no classes at all
        let err = TimeSeriesBuilder::new(50).build().unwrap_err();
        assert!(matches!(err, Error::Config(_)));

        // labels not contiguous from 0
        let err = TimeSeriesBuilder::new(50)
            .for_class(1)
            .add_signal(gaussian_noise(1.0))
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::Config(_)));

        // class without generators
        let err = TimeSeriesBuilder::new(50)
            .for_class(0)
            .add_signal(gaussian_noise(1.0))
            .for_class(1)
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::Config(_)));

        // channel beyond n_dims
        let err = TimeSeriesBuilder::new(50)
            .for_class(0)
            .add_signal_on(2, gaussian_noise(1.0))
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::ChannelOutOfRange { .. }));
    }

    #[test]
    fn reopening_a_class_appends_to_it() {
        let ds = TimeSeriesBuilder::new(30)
            .n_samples(2)
            .normalization(Normalization::None)
            .for_class(0)
            .add_signal(trend(1.0))
            .for_class(0)
            .add_signal(trend(1.0))
            .build()
            .unwrap();
        // both trends applied: slope doubles
        let row = ds.x().slice(0, 0);
        assert_eq!(row[1], 2.0);
        assert_eq!(row[5], 10.0);
    }

    #[test]
    fn keep_components_false_drops_them() {
        let ds = two_class_builder()
            .n_samples(4)
            .keep_components(false)
            .build()
            .unwrap();
        assert!(ds.components().is_none());
        assert!(!ds.meta().config_fingerprint.is_empty());
    }

    #[test]
    fn fingerprint_tracks_every_field_including_the_seed() {
        let base = two_class_builder().n_samples(8);
        let fp = |b: &TimeSeriesBuilder| b.build().unwrap().meta().config_fingerprint.clone();
        let original = fp(&base);
        assert_eq!(original, fp(&base.clone()));
        assert_ne!(original, fp(&base.clone().n_samples(9)));
        assert_ne!(
            original,
            fp(&base.clone().normalization(Normalization::None))
        );
        assert_ne!(original, fp(&base.clone().random_state(1)));
        assert_ne!(original, fp(&base.clone().keep_components(false)));
    }

    #[test]
    fn custom_registry_used_when_given() {
        let mut registry = GeneratorRegistry::with_builtins();
        registry
            .register(
                "flat",
                &["value"],
                crate::generators::RoleHint::Signal,
                |length, _rng, p: &crate::generators::Params| Ok(vec![p["value"]; length]),
            )
            .unwrap();
        let ds = TimeSeriesBuilder::new(10)
            .n_samples(2)
            .normalization(Normalization::None)
            .for_class(0)
            .add_signal(GeneratorSpec::new("flat").with("value", 2.5))
            .build_with(&registry)
            .unwrap();
        assert!(ds.x().values().iter().all(|&v| v == 2.5));

        let err = TimeSeriesBuilder::new(10)
            .for_class(0)
            .add_signal(GeneratorSpec::new("flat").with("value", 2.5))
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::UnknownGenerator { .. }));
    }
}
