use std::borrow::Cow;
use std::collections::BTreeMap;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::tensor::{validate_shapes, TimeSeriesTensor};

/// Every metric this module computes, in canonical presentation order.
pub const METRIC_NAMES: [&str; 8] = [
    "auc_roc",
    "auc_pr",
    "relevance_mass",
    "relevance_rank",
    "pointing_game",
    "nac",
    "mae",
    "mse",
];

/// Knobs shared by the localization metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalOptions {
    /// Score absolute attribution values instead of signed ones. Applies to
    /// the ranking metrics and nac; mae and mse always compare raw values.
    pub use_abs: bool,
    /// Rescale the AUC metrics so chance level maps to 0 and perfect to 1:
    /// (auc - 0.5) / 0.5 and (ap - p) / (1 - p) with p the positive rate.
    pub normalize: bool,
    /// Skip samples a metric is undefined on (e.g. an all-zero mask) and
    /// count them in n_excluded. When false such a sample is an error.
    pub exclude_degenerate: bool,
    /// Pointing game: count a hit if any position attaining the maximum is
    /// masked, instead of only the lowest-indexed one.
    pub pointing_game_any_max: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            use_abs: true,
            normalize: false,
            exclude_degenerate: true,
            pointing_game_any_max: false,
        }
    }
}

/// Scores for one metric over a batch of samples.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricResult {
    pub metric_name: String,
    /// One score per non-degenerate sample, in sample order.
    pub per_sample: Vec<f64>,
    /// Mean of per_sample.
    pub mean: f64,
    /// Samples skipped as degenerate.
    pub n_excluded: usize,
    /// Whether the normalize rescaling was applied to these scores.
    pub normalized: bool,
}

type SampleScore = std::result::Result<f64, String>;

fn run_metric(
    metric: &str,
    attr: &TimeSeriesTensor,
    ds: &Dataset,
    exclude_degenerate: bool,
    normalized: bool,
    score_one: impl Fn(&[f64], &[u8]) -> SampleScore,
) -> Result<MetricResult> {
    validate_shapes(attr, ds.x())?;
    let n = ds.n_samples();
    let mut per_sample = Vec::with_capacity(n);
    let mut n_excluded = 0;
    for sample in 0..n {
        match score_one(attr.sample(sample), ds.mask().sample(sample)) {
            Ok(v) => per_sample.push(v),
            Err(reason) => {
                if exclude_degenerate {
                    n_excluded += 1;
                } else {
                    return Err(Error::DegenerateSample {
                        metric: metric.into(),
                        sample,
                        reason,
                    });
                }
            }
        }
    }
    if per_sample.is_empty() {
        return Err(Error::AllSamplesDegenerate {
            metric: metric.into(),
            n_samples: n,
        });
    }
    let mean = per_sample.iter().sum::<f64>() / per_sample.len() as f64;
    Ok(MetricResult {
        metric_name: metric.into(),
        per_sample,
        mean,
        n_excluded,
        normalized,
    })
}

fn maybe_abs(scores: &[f64], use_abs: bool) -> Cow<'_, [f64]> {
    if use_abs {
        Cow::Owned(scores.iter().map(|v| v.abs()).collect())
    } else {
        Cow::Borrowed(scores)
    }
}

fn count_positives(mask: &[u8]) -> usize {
    mask.iter().filter(|&&m| m == 1).count()
}

/// Indices 0..n ordered by descending score; equal scores keep ascending
/// index order because the sort is stable.
fn rank_descending(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));
    idx
}

fn auc_roc_one(scores: &[f64], mask: &[u8]) -> SampleScore {
    let n = scores.len();
    let np = count_positives(mask);
    let nn = n - np;
    if np == 0 {
        return Err("mask has no positive positions".into());
    }
    if nn == 0 {
        return Err("mask has no negative positions".into());
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));
    // midranks: every member of a tie group gets the group's average rank,
    // which makes the rank-sum statistic tie-fair
    let mut positive_rank_sum = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let midrank = (i + j + 2) as f64 / 2.0;
        for &k in &idx[i..=j] {
            if mask[k] == 1 {
                positive_rank_sum += midrank;
            }
        }
        i = j + 1;
    }
    let np = np as f64;
    let nn = nn as f64;
    Ok((positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}

fn auc_pr_one(scores: &[f64], mask: &[u8]) -> SampleScore {
    let n = scores.len();
    let np = count_positives(mask);
    if np == 0 {
        return Err("mask has no positive positions".into());
    }
    let idx = rank_descending(scores);
    // average precision as the recall-weighted sum of precision at each
    // distinct threshold; tie groups enter en bloc
    let mut ap = 0.0;
    let mut tp = 0usize;
    let mut seen = 0usize;
    let mut prev_recall = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        for &k in &idx[i..=j] {
            seen += 1;
            if mask[k] == 1 {
                tp += 1;
            }
        }
        let precision = tp as f64 / seen as f64;
        let recall = tp as f64 / np as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j + 1;
    }
    Ok(ap)
}

/// Area under the ROC curve of the attribution scores against the mask,
/// computed tie-fairly via midranks. 1.0 means every masked position
/// outranks every unmasked one; 0.5 is chance.
pub fn auc_roc_score(
    attr: &TimeSeriesTensor,
    ds: &Dataset,
    opts: &EvalOptions,
) -> Result<MetricResult> {
    run_metric(
        "auc_roc",
        attr,
        ds,
        opts.exclude_degenerate,
        opts.normalize,
        |scores, mask| {
            let s = maybe_abs(scores, opts.use_abs);
            let auc = auc_roc_one(&s, mask)?;
            Ok(if opts.normalize { (auc - 0.5) / 0.5 } else { auc })
        },
    )
}

/// Average precision of the attribution scores against the mask. The
/// chance level is the positive rate p, so the normalized variant rescales
/// by (ap - p) / (1 - p).
pub fn auc_pr_score(
    attr: &TimeSeriesTensor,
    ds: &Dataset,
    opts: &EvalOptions,
) -> Result<MetricResult> {
    run_metric(
        "auc_pr",
        attr,
        ds,
        opts.exclude_degenerate,
        opts.normalize,
        |scores, mask| {
            let s = maybe_abs(scores, opts.use_abs);
            let ap = auc_pr_one(&s, mask)?;
            if !opts.normalize {
                return Ok(ap);
            }
            let p = count_positives(mask) as f64 / mask.len() as f64;
            if p == 1.0 {
                return Err("all positions positive, normalized baseline undefined".into());
            }
            Ok((ap - p) / (1.0 - p))
        },
    )
}

/// Fraction of total attribution mass lying inside the masked region.
pub fn relevance_mass_accuracy(
    attr: &TimeSeriesTensor,
    ds: &Dataset,
    opts: &EvalOptions,
) -> Result<MetricResult> {
    run_metric(
        "relevance_mass",
        attr,
        ds,
        opts.exclude_degenerate,
        false,
        |scores, mask| {
            if count_positives(mask) == 0 {
                return Err("mask has no positive positions".into());
            }
            let s = maybe_abs(scores, opts.use_abs);
            let total: f64 = s.iter().sum();
            if total == 0.0 {
                return Err("attribution mass is zero".into());
            }
            let inside: f64 = s
                .iter()
                .zip(mask)
                .filter(|(_, &m)| m == 1)
                .map(|(v, _)| v)
                .sum();
            Ok(inside / total)
        },
    )
}

/// Fraction of the K highest-scoring positions that are masked, with K the
/// number of masked positions. Ties resolve toward lower flat indices.
pub fn relevance_rank_accuracy(
    attr: &TimeSeriesTensor,
    ds: &Dataset,
    opts: &EvalOptions,
) -> Result<MetricResult> {
    run_metric(
        "relevance_rank",
        attr,
        ds,
        opts.exclude_degenerate,
        false,
        |scores, mask| {
            let k = count_positives(mask);
            if k == 0 {
                return Err("mask has no positive positions".into());
            }
            let s = maybe_abs(scores, opts.use_abs);
            let idx = rank_descending(&s);
            let hits = idx[..k].iter().filter(|&&i| mask[i] == 1).count();
            Ok(hits as f64 / k as f64)
        },
    )
}

/// 1.0 when the single highest-scoring position is masked, else 0.0. With
/// tied maxima the lowest flat index decides, unless
/// [`EvalOptions::pointing_game_any_max`] accepts any of them.
pub fn pointing_game(
    attr: &TimeSeriesTensor,
    ds: &Dataset,
    opts: &EvalOptions,
) -> Result<MetricResult> {
    run_metric(
        "pointing_game",
        attr,
        ds,
        opts.exclude_degenerate,
        false,
        |scores, mask| {
            if count_positives(mask) == 0 {
                return Err("mask has no positive positions".into());
            }
            let s = maybe_abs(scores, opts.use_abs);
            let max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let hit = if opts.pointing_game_any_max {
                s.iter().zip(mask).any(|(&v, &m)| v == max && m == 1)
            } else {
                let argmax = s.iter().position(|&v| v == max).expect("non-empty");
                mask[argmax] == 1
            };
            Ok(if hit { 1.0 } else { 0.0 })
        },
    )
}

/// Normalized attribution consistency: mean z-score of the attribution over
/// the masked region, using the population standard deviation of the whole
/// sample. Samples whose scores have standard deviation below 1e-12 get
/// score 0 rather than being excluded.
pub fn nac_score(
    attr: &TimeSeriesTensor,
    ds: &Dataset,
    opts: &EvalOptions,
) -> Result<MetricResult> {
    run_metric(
        "nac",
        attr,
        ds,
        opts.exclude_degenerate,
        false,
        |scores, mask| {
            let np = count_positives(mask);
            if np == 0 {
                return Err("mask has no positive positions".into());
            }
            let s = maybe_abs(scores, opts.use_abs);
            let len = s.len() as f64;
            let mean = s.iter().sum::<f64>() / len;
            let var = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len;
            let std = var.sqrt();
            if std < 1e-12 {
                return Ok(0.0);
            }
            let z_sum: f64 = s
                .iter()
                .zip(mask)
                .filter(|(_, &m)| m == 1)
                .map(|(v, _)| (v - mean) / std)
                .sum();
            Ok(z_sum / np as f64)
        },
    )
}

/// Mean absolute difference between the raw attribution and the 0/1 mask.
/// Never uses absolute attribution values and is defined for every sample.
pub fn mean_absolute_error(attr: &TimeSeriesTensor, ds: &Dataset) -> Result<MetricResult> {
    run_metric("mae", attr, ds, true, false, |scores, mask| {
        let sum: f64 = scores
            .iter()
            .zip(mask)
            .map(|(v, &m)| (v - m as f64).abs())
            .sum();
        Ok(sum / scores.len() as f64)
    })
}

/// Mean squared difference between the raw attribution and the 0/1 mask.
pub fn mean_squared_error(attr: &TimeSeriesTensor, ds: &Dataset) -> Result<MetricResult> {
    run_metric("mse", attr, ds, true, false, |scores, mask| {
        let sum: f64 = scores
            .iter()
            .zip(mask)
            .map(|(v, &m)| {
                let d = v - m as f64;
                d * d
            })
            .sum();
        Ok(sum / scores.len() as f64)
    })
}

/// Runs the named metrics (all of them when `names` is empty) and returns
/// results keyed by metric name.
pub fn evaluate_all(
    attr: &TimeSeriesTensor,
    ds: &Dataset,
    opts: &EvalOptions,
    names: &[&str],
) -> Result<BTreeMap<String, MetricResult>> {
    validate_shapes(attr, ds.x())?;
    let selected: Vec<&str> = if names.is_empty() {
        METRIC_NAMES.to_vec()
    } else {
        names.to_vec()
    };
    let mut out = BTreeMap::new();
    for name in selected {
        let result = match name {
            "auc_roc" => auc_roc_score(attr, ds, opts)?,
            "auc_pr" => auc_pr_score(attr, ds, opts)?,
            "relevance_mass" => relevance_mass_accuracy(attr, ds, opts)?,
            "relevance_rank" => relevance_rank_accuracy(attr, ds, opts)?,
            "pointing_game" => pointing_game(attr, ds, opts)?,
            "nac" => nac_score(attr, ds, opts)?,
            "mae" => mean_absolute_error(attr, ds)?,
            "mse" => mean_squared_error(attr, ds)?,
            other => return Err(Error::UnknownMetric(other.to_string())),
        };
        out.insert(name.to_string(), result);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::GroundTruthMask;

    /// One-sample dataset with the given scores shaped (1, 1, t).
    fn fixture(mask: &[u8]) -> Dataset {
        let t = mask.len();
        let shape = (1, 1, t);
        let x = TimeSeriesTensor::zeros(shape).unwrap();
        let mask = GroundTruthMask::new(shape, mask.to_vec()).unwrap();
        let meta = crate::dataset::DatasetMeta {
            n_classes: 1,
            class_labels: vec![0],
            random_state: 0,
            normalization: crate::dataset::Normalization::None,
            config_fingerprint: String::new(),
            generator_catalog_version: String::new(),
            feature_overlap: false,
        };
        Dataset::new(x, vec![0], mask, None, meta).unwrap()
    }

    fn attr(scores: &[f64]) -> TimeSeriesTensor {
        TimeSeriesTensor::new((1, 1, scores.len()), scores.to_vec()).unwrap()
    }

    fn opts() -> EvalOptions {
        EvalOptions::default()
    }

    #[test]
    fn auc_roc_perfect_and_chance() {
        let ds = fixture(&[0, 1, 1, 0]);
        let perfect = auc_roc_score(&attr(&[0.0, 1.0, 1.0, 0.0]), &ds, &opts()).unwrap();
        assert_eq!(perfect.mean, 1.0);
        let constant = auc_roc_score(&attr(&[0.3, 0.3, 0.3, 0.3]), &ds, &opts()).unwrap();
        assert_eq!(constant.mean, 0.5);
        let inverted = auc_roc_score(&attr(&[1.0, 0.0, 0.0, 1.0]), &ds, &opts()).unwrap();
        assert_eq!(inverted.mean, 0.0);
    }

    #[test]
    fn auc_roc_handles_partial_ties() {
        // scores (4, 3, 3, 1) against mask (1, 1, 0, 0): the tie straddles
        // one positive and one negative
        let ds = fixture(&[1, 1, 0, 0]);
        let r = auc_roc_score(&attr(&[4.0, 3.0, 3.0, 1.0]), &ds, &opts()).unwrap();
        // ranks ascending: 1 -> rank 1, ties (3, 3) -> midrank 2.5, 4 -> 4
        // positive rank sum = 2.5 + 4 = 6.5; (6.5 - 3) / 4 = 0.875
        assert_eq!(r.mean, 0.875);
    }

    #[test]
    fn auc_pr_perfect_and_constant() {
        let ds = fixture(&[0, 1, 1, 0]);
        let perfect = auc_pr_score(&attr(&[0.1, 0.9, 0.8, 0.0]), &ds, &opts()).unwrap();
        assert_eq!(perfect.mean, 1.0);
        // constant scores collapse to a single threshold step of height p
        let constant = auc_pr_score(&attr(&[2.0, 2.0, 2.0, 2.0]), &ds, &opts()).unwrap();
        assert_eq!(constant.mean, 0.5);
        let ds10 = fixture(&[1, 1, 1, 0, 0, 0, 0, 0, 0, 0]);
        let constant = auc_pr_score(&attr(&[1.0; 10]), &ds10, &opts()).unwrap();
        assert_eq!(constant.mean, 0.3);
    }

    #[test]
    fn relevance_mass_matches_hand_value() {
        let ds = fixture(&[1, 0, 0, 0]);
        let r = relevance_mass_accuracy(&attr(&[3.0, 1.0, 0.0, 0.0]), &ds, &opts()).unwrap();
        assert_eq!(r.mean, 0.75);
    }

    #[test]
    fn relevance_mass_uses_abs_by_default() {
        let ds = fixture(&[1, 0, 0, 0]);
        let r = relevance_mass_accuracy(&attr(&[-3.0, 1.0, 0.0, 0.0]), &ds, &opts()).unwrap();
        assert_eq!(r.mean, 0.75);
        let raw = EvalOptions {
            use_abs: false,
            ..opts()
        };
        let r = relevance_mass_accuracy(&attr(&[-3.0, 1.0, 0.0, 0.0]), &ds, &raw).unwrap();
        assert_eq!(r.mean, 1.5);
    }

    #[test]
    fn relevance_rank_counts_top_k_hits() {
        let ds = fixture(&[1, 1, 0, 0]);
        let r = relevance_rank_accuracy(&attr(&[5.0, 4.0, 1.0, 2.0]), &ds, &opts()).unwrap();
        assert_eq!(r.mean, 1.0);
        let r = relevance_rank_accuracy(&attr(&[5.0, 0.0, 1.0, 2.0]), &ds, &opts()).unwrap();
        assert_eq!(r.mean, 0.5);
    }

    #[test]
    fn relevance_rank_breaks_ties_by_ascending_index() {
        // K = 1; indices 0 and 1 tie, so index 0 takes the top slot
        let ds = fixture(&[0, 1, 0, 0]);
        let r = relevance_rank_accuracy(&attr(&[1.0, 1.0, 1.0, 0.0]), &ds, &opts()).unwrap();
        assert_eq!(r.mean, 0.0);
        let ds = fixture(&[1, 0, 0, 0]);
        let r = relevance_rank_accuracy(&attr(&[1.0, 1.0, 1.0, 0.0]), &ds, &opts()).unwrap();
        assert_eq!(r.mean, 1.0);
    }

    #[test]
    fn pointing_game_uses_lowest_argmax_unless_told_otherwise() {
        let ds = fixture(&[0, 0, 1, 0]);
        let tied = attr(&[0.0, 2.0, 2.0, 0.0]);
        let strict = pointing_game(&tied, &ds, &opts()).unwrap();
        assert_eq!(strict.mean, 0.0);
        let any = EvalOptions {
            pointing_game_any_max: true,
            ..opts()
        };
        let relaxed = pointing_game(&tied, &ds, &any).unwrap();
        assert_eq!(relaxed.mean, 1.0);
        let clear = pointing_game(&attr(&[0.0, 0.1, 5.0, 0.0]), &ds, &opts()).unwrap();
        assert_eq!(clear.mean, 1.0);
    }

    #[test]
    fn nac_matches_hand_value() {
        let ds = fixture(&[0, 1, 1, 0]);
        // scores (0, 1, 1, 0): mean 0.5, population std 0.5, z over the
        // masked half = 1
        let r = nac_score(&attr(&[0.0, 1.0, 1.0, 0.0]), &ds, &opts()).unwrap();
        assert_eq!(r.mean, 1.0);
    }

    #[test]
    fn nac_constant_scores_give_zero_not_exclusion() {
        let ds = fixture(&[0, 1, 1, 0]);
        let r = nac_score(&attr(&[2.0, 2.0, 2.0, 2.0]), &ds, &opts()).unwrap();
        assert_eq!(r.mean, 0.0);
        assert_eq!(r.n_excluded, 0);
        assert_eq!(r.per_sample.len(), 1);
    }

    #[test]
    fn mae_and_mse_match_hand_values() {
        let ds = fixture(&[0, 1]);
        let a = attr(&[0.5, 0.5]);
        assert_eq!(mean_absolute_error(&a, &ds).unwrap().mean, 0.5);
        assert_eq!(mean_squared_error(&a, &ds).unwrap().mean, 0.25);
        // sign matters: use_abs never applies here
        let ds = fixture(&[1, 1]);
        let a = attr(&[-1.0, 1.0]);
        assert_eq!(mean_absolute_error(&a, &ds).unwrap().mean, 1.0);
        assert_eq!(mean_squared_error(&a, &ds).unwrap().mean, 2.0);
    }

    #[test]
    fn normalize_rescales_auc_metrics() {
        let normalized = EvalOptions {
            normalize: true,
            ..opts()
        };
        let ds = fixture(&[0, 1, 1, 0]);
        let r = auc_roc_score(&attr(&[0.0, 1.0, 1.0, 0.0]), &ds, &normalized).unwrap();
        assert_eq!(r.mean, 1.0);
        assert!(r.normalized);
        let r = auc_roc_score(&attr(&[1.0, 1.0, 1.0, 1.0]), &ds, &normalized).unwrap();
        assert_eq!(r.mean, 0.0);
        // constant scores: ap = p, so the normalized score is exactly 0
        let r = auc_pr_score(&attr(&[1.0, 1.0, 1.0, 1.0]), &ds, &normalized).unwrap();
        assert_eq!(r.mean, 0.0);
        assert!(r.normalized);
        // unnormalized results are flagged as such
        let r = auc_pr_score(&attr(&[1.0, 1.0, 1.0, 1.0]), &ds, &opts()).unwrap();
        assert!(!r.normalized);
    }

    fn two_sample_fixture() -> (Dataset, TimeSeriesTensor) {
        // sample 0 has a masked region, sample 1 does not
        let shape = (2, 1, 4);
        let x = TimeSeriesTensor::zeros(shape).unwrap();
        let mask = GroundTruthMask::new(shape, vec![0, 1, 1, 0, 0, 0, 0, 0]).unwrap();
        let meta = crate::dataset::DatasetMeta {
            n_classes: 1,
            class_labels: vec![0],
            random_state: 0,
            normalization: crate::dataset::Normalization::None,
            config_fingerprint: String::new(),
            generator_catalog_version: String::new(),
            feature_overlap: false,
        };
        let ds = Dataset::new(x, vec![0, 0], mask, None, meta).unwrap();
        let a = TimeSeriesTensor::new(shape, vec![0.0, 1.0, 1.0, 0.0, 0.5, 0.2, 0.1, 0.4])
            .unwrap();
        (ds, a)
    }

    #[test]
    fn degenerate_samples_are_excluded_and_counted() {
        let (ds, a) = two_sample_fixture();
        let r = auc_roc_score(&a, &ds, &opts()).unwrap();
        assert_eq!(r.n_excluded, 1);
        assert_eq!(r.per_sample, vec![1.0]);
        assert_eq!(r.mean, 1.0);
    }

    #[test]
    fn degenerate_sample_is_an_error_when_exclusion_off() {
        let (ds, a) = two_sample_fixture();
        let strict = EvalOptions {
            exclude_degenerate: false,
            ..opts()
        };
        let err = auc_roc_score(&a, &ds, &strict).unwrap_err();
        match err {
            Error::DegenerateSample { sample, .. } => assert_eq!(sample, 1),
            other => panic!("expected DegenerateSample, got {other}"),
        }
    }

    #[test]
    fn all_degenerate_is_an_error() {
        let ds = fixture(&[0, 0, 0, 0]);
        let err = auc_roc_score(&attr(&[1.0, 2.0, 3.0, 4.0]), &ds, &opts()).unwrap_err();
        assert!(matches!(err, Error::AllSamplesDegenerate { .. }));
        // mae is defined even with an empty mask
        let r = mean_absolute_error(&attr(&[1.0, 0.0, 0.0, 0.0]), &ds).unwrap();
        assert_eq!(r.mean, 0.25);
    }

    #[test]
    fn all_positive_mask_degenerates_roc_but_not_pr() {
        let ds = fixture(&[1, 1, 1, 1]);
        let err = auc_roc_score(&attr(&[1.0, 2.0, 3.0, 4.0]), &ds, &opts()).unwrap_err();
        assert!(matches!(err, Error::AllSamplesDegenerate { .. }));
        let r = auc_pr_score(&attr(&[1.0, 2.0, 3.0, 4.0]), &ds, &opts()).unwrap();
        assert_eq!(r.mean, 1.0);
        // but the normalized variant has no headroom left
        let normalized = EvalOptions {
            normalize: true,
            ..opts()
        };
        let err = auc_pr_score(&attr(&[1.0, 2.0, 3.0, 4.0]), &ds, &normalized).unwrap_err();
        assert!(matches!(err, Error::AllSamplesDegenerate { .. }));
    }

    #[test]
    fn zero_attribution_mass_is_degenerate_for_relevance_mass() {
        let ds = fixture(&[1, 0, 0, 0]);
        let err =
            relevance_mass_accuracy(&attr(&[0.0, 0.0, 0.0, 0.0]), &ds, &opts()).unwrap_err();
        assert!(matches!(err, Error::AllSamplesDegenerate { .. }));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let ds = fixture(&[0, 1, 1, 0]);
        let bad = TimeSeriesTensor::zeros((1, 1, 5)).unwrap();
        let err = auc_roc_score(&bad, &ds, &opts()).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
        let err = evaluate_all(&bad, &ds, &opts(), &[]).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn evaluate_all_covers_every_metric() {
        let ds = fixture(&[0, 1, 1, 0]);
        let a = attr(&[0.1, 0.9, 0.8, 0.2]);
        let results = evaluate_all(&a, &ds, &opts(), &[]).unwrap();
        assert_eq!(results.len(), METRIC_NAMES.len());
        for name in METRIC_NAMES {
            assert!(results.contains_key(name), "missing {name}");
            assert_eq!(results[name].metric_name, name);
        }
        let subset = evaluate_all(&a, &ds, &opts(), &["mae", "auc_roc"]).unwrap();
        assert_eq!(subset.len(), 2);
        let err = evaluate_all(&a, &ds, &opts(), &["auc_rock"]).unwrap_err();
        assert!(matches!(err, Error::UnknownMetric(_)));
    }

    #[test]
    fn mask_as_attribution_is_a_fixed_point() {
        let ds = fixture(&[0, 1, 1, 0, 0, 0, 0, 0, 0, 0]);
        let a = ds.mask().to_tensor();
        let results = evaluate_all(&a, &ds, &opts(), &[]).unwrap();
        assert_eq!(results["auc_roc"].mean, 1.0);
        assert_eq!(results["auc_pr"].mean, 1.0);
        assert_eq!(results["relevance_mass"].mean, 1.0);
        assert_eq!(results["relevance_rank"].mean, 1.0);
        assert_eq!(results["pointing_game"].mean, 1.0);
        assert_eq!(results["mae"].mean, 0.0);
        assert_eq!(results["mse"].mean, 0.0);
        // nac of the mask itself is sqrt((1 - p) / p), not 1
        let p: f64 = 0.2;
        let expected = ((1.0 - p) / p).sqrt();
        assert!((results["nac"].mean - expected).abs() < 1e-12);
    }
}
