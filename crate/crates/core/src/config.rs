use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde_yaml::{Mapping, Value};
use sha2::{Digest, Sha256};

use crate::builder::{BuilderConfig, ChannelSpec, ClassSpec, FeaturePlacement, PlacementMode};
use crate::dataset::Normalization;
use crate::error::{Error, Result};
use crate::generators::{global_registry, GeneratorRegistry, GeneratorSpec};

/// SHA-256 over the canonical rendering of a build description. Two configs
/// that describe the same build hash identically, whether they came from
/// YAML, from the fluent builder, or from a YAML file with its keys
/// reordered.
pub fn fingerprint(config: &BuilderConfig) -> String {
    let digest = Sha256::digest(config.canonical_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Loads a YAML config file describing one or more datasets, checked
/// against the process-wide generator registry.
pub fn load(path: impl AsRef<Path>) -> Result<BTreeMap<String, BuilderConfig>> {
    let registry = global_registry()
        .read()
        .expect("generator registry lock poisoned");
    load_with(path, &registry)
}

/// Loads a YAML config file, checking generator kinds and parameters
/// against an explicit registry.
pub fn load_with(
    path: impl AsRef<Path>,
    registry: &GeneratorRegistry,
) -> Result<BTreeMap<String, BuilderConfig>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_with(&text, registry)
}

/// Parses YAML config text using the process-wide generator registry.
pub fn parse(text: &str) -> Result<BTreeMap<String, BuilderConfig>> {
    let registry = global_registry()
        .read()
        .expect("generator registry lock poisoned");
    parse_with(text, &registry)
}

/// Parses YAML config text against an explicit registry.
///
/// The schema is strict: unknown keys are errors, not warnings, and every
/// error names the exact path it arose at, e.g.
/// `datasets.train.classes[1].features[0].length_pct`. YAML anchors and
/// aliases work as usual, so shared class lists can be written once.
pub fn parse_with(
    text: &str,
    registry: &GeneratorRegistry,
) -> Result<BTreeMap<String, BuilderConfig>> {
    let doc: Value =
        serde_yaml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let root = as_mapping(&doc, "config")?;
    check_keys(root, "config", &["schema", "datasets"])?;

    if let Some(version) = root.get("schema") {
        let v = as_u64(version, "schema")?;
        if v != 1 {
            return Err(Error::Value {
                path: "schema".into(),
                message: format!("unsupported schema version {v}, this reader handles 1"),
            });
        }
    }

    let datasets_value = root.get("datasets").ok_or_else(|| Error::Schema {
        path: "config".into(),
        message: "missing required key `datasets`".into(),
    })?;
    let datasets = as_mapping(datasets_value, "datasets")?;
    if datasets.is_empty() {
        return Err(Error::Schema {
            path: "datasets".into(),
            message: "needs at least one dataset".into(),
        });
    }

    let mut out = BTreeMap::new();
    for (key, value) in datasets {
        let name = key.as_str().ok_or_else(|| Error::Schema {
            path: "datasets".into(),
            message: "dataset names must be strings".into(),
        })?;
        let path = format!("datasets.{name}");
        let config = parse_dataset(value, &path, registry)?;
        out.insert(name.to_string(), config);
    }
    Ok(out)
}

fn parse_dataset(
    value: &Value,
    path: &str,
    registry: &GeneratorRegistry,
) -> Result<BuilderConfig> {
    let map = as_mapping(value, path)?;
    check_keys(
        map,
        path,
        &[
            "n_timesteps",
            "n_dims",
            "n_samples",
            "normalization",
            "random_state",
            "keep_components",
            "classes",
        ],
    )?;

    let n_timesteps = required_count(map, path, "n_timesteps")?;
    let n_samples = required_count(map, path, "n_samples")?;
    let n_dims = match map.get("n_dims") {
        Some(v) => positive_count(v, &format!("{path}.n_dims"))?,
        None => 1,
    };
    let random_state = as_u64(
        map.get("random_state").ok_or_else(|| Error::Schema {
            path: path.into(),
            message: "missing required key `random_state`".into(),
        })?,
        &format!("{path}.random_state"),
    )?;
    let normalization = match map.get("normalization") {
        Some(v) => {
            let p = format!("{path}.normalization");
            let s = as_str(v, &p)?;
            s.parse::<Normalization>().map_err(|_| Error::Value {
                path: p,
                message: format!("unknown normalization `{s}`, expected `zscore` or `none`"),
            })?
        }
        None => Normalization::Zscore,
    };
    let keep_components = match map.get("keep_components") {
        Some(v) => as_bool(v, &format!("{path}.keep_components"))?,
        None => true,
    };

    let classes_value = map.get("classes").ok_or_else(|| Error::Schema {
        path: path.into(),
        message: "missing required key `classes`".into(),
    })?;
    let classes_path = format!("{path}.classes");
    let class_seq = as_sequence(classes_value, &classes_path)?;
    if class_seq.is_empty() {
        return Err(Error::Schema {
            path: classes_path,
            message: "needs at least one class".into(),
        });
    }

    let mut classes = Vec::new();
    let mut seen_labels = BTreeSet::new();
    for (i, class_value) in class_seq.iter().enumerate() {
        let class_path = format!("{classes_path}[{i}]");
        let class = parse_class(class_value, &class_path, n_dims, n_timesteps, registry)?;
        if !seen_labels.insert(class.label) {
            return Err(Error::Value {
                path: format!("{class_path}.label"),
                message: format!("duplicate label {}", class.label),
            });
        }
        classes.push(class);
    }
    let max_label = *seen_labels.iter().next_back().expect("non-empty") as usize;
    if *seen_labels.iter().next().expect("non-empty") != 0
        || max_label + 1 != classes.len()
    {
        return Err(Error::Value {
            path: classes_path,
            message: format!(
                "labels must form a contiguous range from 0, got {seen_labels:?}"
            ),
        });
    }

    Ok(BuilderConfig {
        n_timesteps,
        n_dims,
        n_samples,
        normalization,
        random_state,
        keep_components,
        classes,
    })
}

fn parse_class(
    value: &Value,
    path: &str,
    n_dims: usize,
    n_timesteps: usize,
    registry: &GeneratorRegistry,
) -> Result<ClassSpec> {
    let map = as_mapping(value, path)?;
    check_keys(map, path, &["label", "channels"])?;

    let label_path = format!("{path}.label");
    let label = as_i64(
        map.get("label").ok_or_else(|| Error::Schema {
            path: path.into(),
            message: "missing required key `label`".into(),
        })?,
        &label_path,
    )?;
    if label < 0 {
        return Err(Error::Value {
            path: label_path,
            message: format!("label must be at least 0, got {label}"),
        });
    }

    let channels_value = map.get("channels").ok_or_else(|| Error::Schema {
        path: path.into(),
        message: "missing required key `channels`".into(),
    })?;
    let channels_path = format!("{path}.channels");
    let channel_seq = as_sequence(channels_value, &channels_path)?;
    if channel_seq.is_empty() {
        return Err(Error::Schema {
            path: channels_path,
            message: "needs at least one channel".into(),
        });
    }

    let mut channels: BTreeMap<usize, ChannelSpec> = BTreeMap::new();
    let mut any_generator = false;
    for (i, channel_value) in channel_seq.iter().enumerate() {
        let channel_path = format!("{channels_path}[{i}]");
        let cmap = as_mapping(channel_value, &channel_path)?;
        check_keys(cmap, &channel_path, &["channel", "signals", "features"])?;

        let channel = match cmap.get("channel") {
            Some(v) => as_usize(v, &format!("{channel_path}.channel"))?,
            None => i,
        };
        if channel >= n_dims {
            return Err(Error::Value {
                path: format!("{channel_path}.channel"),
                message: format!("channel {channel} out of range for {n_dims} dims"),
            });
        }
        if channels.contains_key(&channel) {
            return Err(Error::Value {
                path: format!("{channel_path}.channel"),
                message: format!("channel {channel} listed twice"),
            });
        }

        let mut spec = ChannelSpec::default();
        if let Some(signals_value) = cmap.get("signals") {
            let signals_path = format!("{channel_path}.signals");
            for (j, entry) in as_sequence(signals_value, &signals_path)?.iter().enumerate() {
                let entry_path = format!("{signals_path}[{j}]");
                spec.signals
                    .push(parse_generator_entry(entry, &entry_path, &[], registry)?.0);
            }
        }
        if let Some(features_value) = cmap.get("features") {
            let features_path = format!("{channel_path}.features");
            for (j, entry) in as_sequence(features_value, &features_path)?
                .iter()
                .enumerate()
            {
                let entry_path = format!("{features_path}[{j}]");
                spec.features
                    .push(parse_feature_entry(entry, &entry_path, n_timesteps, registry)?);
            }
        }
        any_generator |= !spec.signals.is_empty() || !spec.features.is_empty();
        channels.insert(channel, spec);
    }
    if !any_generator {
        return Err(Error::Schema {
            path: path.into(),
            message: "class defines no signals or features".into(),
        });
    }

    Ok(ClassSpec { label, channels })
}

const PLACEMENT_KEYS: [&str; 4] = [
    "random_location",
    "fixed_start",
    "length_pct",
    "align_across_channels",
];

/// Reads `kind` plus numeric parameters from a mapping. Keys named in
/// `reserved` are left for the caller. The generator is checked against
/// the registry: the kind must exist and the parameters must be complete,
/// known, and in-domain.
fn parse_generator_entry(
    value: &Value,
    path: &str,
    reserved: &[&str],
    registry: &GeneratorRegistry,
) -> Result<(GeneratorSpec, Mapping)> {
    let map = as_mapping(value, path)?;
    let kind_path = format!("{path}.kind");
    let kind = as_str(
        map.get("kind").ok_or_else(|| Error::Schema {
            path: path.into(),
            message: "missing required key `kind`".into(),
        })?,
        &kind_path,
    )?
    .to_string();

    if !registry.contains(&kind) {
        let hint = registry
            .suggest(&kind)
            .map(|s| format!("; did you mean `{s}`?"))
            .unwrap_or_default();
        return Err(Error::Schema {
            path: kind_path,
            message: format!("unknown generator `{kind}`{hint}"),
        });
    }

    let (required, optional) = registry.param_names(&kind).expect("kind checked above");
    let mut spec = GeneratorSpec::new(&kind);
    let mut leftover = Mapping::new();
    for (key, param_value) in map {
        let name = key.as_str().ok_or_else(|| Error::Schema {
            path: path.into(),
            message: "keys must be strings".into(),
        })?;
        if name == "kind" {
            continue;
        }
        if reserved.contains(&name) {
            leftover.insert(key.clone(), param_value.clone());
            continue;
        }
        let param_path = format!("{path}.{name}");
        if !required.iter().any(|p| p == name) && !optional.iter().any(|p| p == name) {
            return Err(Error::Schema {
                path: param_path,
                message: format!("not a parameter of `{kind}`"),
            });
        }
        spec.params
            .insert(name.to_string(), as_f64(param_value, &param_path)?);
    }

    match registry.resolve(&spec) {
        Ok(_) => Ok((spec, leftover)),
        Err(Error::MissingParam { kind, name }) => Err(Error::Schema {
            path: path.into(),
            message: format!("missing required parameter `{name}` for generator `{kind}`"),
        }),
        Err(Error::InvalidParam { kind, name, reason }) => Err(Error::Value {
            path: format!("{path}.{name}"),
            message: format!("parameter `{name}` of `{kind}` {reason}"),
        }),
        Err(other) => Err(other),
    }
}

fn parse_feature_entry(
    value: &Value,
    path: &str,
    n_timesteps: usize,
    registry: &GeneratorRegistry,
) -> Result<(GeneratorSpec, FeaturePlacement)> {
    let (spec, placement_keys) =
        parse_generator_entry(value, path, &PLACEMENT_KEYS, registry)?;

    let random_location = match placement_keys.get("random_location") {
        Some(v) => as_bool(v, &format!("{path}.random_location"))?,
        None => false,
    };
    let fixed_start = match placement_keys.get("fixed_start") {
        Some(v) => Some(as_usize(v, &format!("{path}.fixed_start"))?),
        None => None,
    };
    let mode = match (random_location, fixed_start) {
        (true, None) => PlacementMode::Random,
        (false, Some(start)) => PlacementMode::FixedStart(start),
        (true, Some(_)) => {
            return Err(Error::Schema {
                path: path.into(),
                message: "specify either random_location: true or fixed_start, not both".into(),
            })
        }
        (false, None) => {
            return Err(Error::Schema {
                path: path.into(),
                message: "feature placement needs random_location: true or a fixed_start".into(),
            })
        }
    };

    let length_pct_path = format!("{path}.length_pct");
    let length_pct = as_f64(
        placement_keys.get("length_pct").ok_or_else(|| Error::Schema {
            path: path.into(),
            message: "missing required key `length_pct`".into(),
        })?,
        &length_pct_path,
    )?;
    let align_across_channels = match placement_keys.get("align_across_channels") {
        Some(v) => as_bool(v, &format!("{path}.align_across_channels"))?,
        None => true,
    };

    let placement = FeaturePlacement {
        mode,
        length_pct,
        align_across_channels,
    };
    if let Err(Error::InvalidPlacement(message)) = place_check(&placement, n_timesteps) {
        let path = if message.starts_with("length_pct") {
            length_pct_path
        } else {
            path.to_string()
        };
        return Err(Error::Value { path, message });
    }
    Ok((spec, placement))
}

fn place_check(placement: &FeaturePlacement, n_timesteps: usize) -> Result<()> {
    // a throwaway draw source: fixed placements never consult it, random
    // placements only need the domain checks that run before any draw
    let mut rng = crate::rng::RandomSource::from_seed(0);
    crate::builder::place_window(&mut rng, placement, n_timesteps).map(|_| ())
}

fn check_keys(map: &Mapping, path: &str, allowed: &[&str]) -> Result<()> {
    for key in map.keys() {
        let name = key.as_str().ok_or_else(|| Error::Schema {
            path: path.into(),
            message: "keys must be strings".into(),
        })?;
        if !allowed.contains(&name) {
            return Err(Error::Schema {
                path: format!("{path}.{name}"),
                message: format!(
                    "unknown key `{name}`, expected one of: {}",
                    allowed.join(", ")
                ),
            });
        }
    }
    Ok(())
}

fn required_count(map: &Mapping, path: &str, key: &str) -> Result<usize> {
    let value = map.get(key).ok_or_else(|| Error::Schema {
        path: path.into(),
        message: format!("missing required key `{key}`"),
    })?;
    positive_count(value, &format!("{path}.{key}"))
}

fn positive_count(value: &Value, path: &str) -> Result<usize> {
    let n = as_usize(value, path)?;
    if n == 0 {
        return Err(Error::Value {
            path: path.into(),
            message: "must be at least 1".into(),
        });
    }
    Ok(n)
}

fn as_mapping<'a>(value: &'a Value, path: &str) -> Result<&'a Mapping> {
    value.as_mapping().ok_or_else(|| Error::Schema {
        path: path.into(),
        message: "expected a mapping".into(),
    })
}

fn as_sequence<'a>(value: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    value.as_sequence().ok_or_else(|| Error::Schema {
        path: path.into(),
        message: "expected a list".into(),
    })
}

fn as_str<'a>(value: &'a Value, path: &str) -> Result<&'a str> {
    value.as_str().ok_or_else(|| Error::Schema {
        path: path.into(),
        message: "expected a string".into(),
    })
}

fn as_bool(value: &Value, path: &str) -> Result<bool> {
    value.as_bool().ok_or_else(|| Error::Schema {
        path: path.into(),
        message: "expected true or false".into(),
    })
}

fn as_u64(value: &Value, path: &str) -> Result<u64> {
    value.as_u64().ok_or_else(|| Error::Schema {
        path: path.into(),
        message: "expected a non-negative integer".into(),
    })
}

fn as_usize(value: &Value, path: &str) -> Result<usize> {
    Ok(as_u64(value, path)? as usize)
}

fn as_i64(value: &Value, path: &str) -> Result<i64> {
    value.as_i64().ok_or_else(|| Error::Schema {
        path: path.into(),
        message: "expected an integer".into(),
    })
}

/// Accepts both YAML floats and YAML integers, since `sigma: 1` and
/// `sigma: 1.0` mean the same parameter value.
fn as_f64(value: &Value, path: &str) -> Result<f64> {
    match value {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Schema {
            path: path.into(),
            message: "expected a number".into(),
        }),
        _ => Err(Error::Schema {
            path: path.into(),
            message: "expected a number".into(),
        }),
    }
}
