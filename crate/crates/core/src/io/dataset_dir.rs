use std::path::Path;

use crate::dataset::{Components, Dataset, DatasetMeta};
use crate::error::{Error, Result};
use crate::io::npy::{read_npy, write_npy, NpyArray, NpyData};
use crate::tensor::{GroundTruthMask, TimeSeriesTensor};

/// Writes a dataset as a directory: `X.npy` (f8 values), `y.npy` (i8
/// labels), `mask.npy` (u1), `meta.json`, and, when components are kept,
/// `signal.npy` and `feature.npy` (f8).
pub fn write_dataset(ds: &Dataset, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let (n, d, t) = ds.shape();
    let shape = vec![n, d, t];
    write_npy(
        dir.join("X.npy"),
        &NpyArray::new(shape.clone(), NpyData::F64(ds.x().values().to_vec()))?,
    )?;
    write_npy(
        dir.join("y.npy"),
        &NpyArray::new(vec![n], NpyData::I64(ds.y().to_vec()))?,
    )?;
    write_npy(
        dir.join("mask.npy"),
        &NpyArray::new(shape.clone(), NpyData::U8(ds.mask().values().to_vec()))?,
    )?;
    if let Some(c) = ds.components() {
        write_npy(
            dir.join("signal.npy"),
            &NpyArray::new(shape.clone(), NpyData::F64(c.signal.values().to_vec()))?,
        )?;
        write_npy(
            dir.join("feature.npy"),
            &NpyArray::new(shape, NpyData::F64(c.feature.values().to_vec()))?,
        )?;
    }

    let meta_path = dir.join("meta.json");
    let json = serde_json::to_string_pretty(ds.meta())
        .expect("meta serializes");
    std::fs::write(&meta_path, json + "\n").map_err(|e| Error::io(&meta_path, e))
}

fn shape3_of(array: &NpyArray, what: &str, path: &Path) -> Result<(usize, usize, usize)> {
    match array.shape[..] {
        [n, d, t] => Ok((n, d, t)),
        _ => Err(Error::format(
            path,
            format!("{what} must be rank 3, got shape {:?}", array.shape),
        )),
    }
}

fn f64_tensor(array: NpyArray, what: &str, path: &Path) -> Result<TimeSeriesTensor> {
    let shape = shape3_of(&array, what, path)?;
    match array.data {
        NpyData::F64(values) => TimeSeriesTensor::new(shape, values),
        other => Err(Error::format(
            path,
            format!("{what} must be f8 data, got {:?}", dtype_name(&other)),
        )),
    }
}

fn dtype_name(data: &NpyData) -> &'static str {
    match data {
        NpyData::F64(_) => "f8",
        NpyData::I64(_) => "i8",
        NpyData::U8(_) => "u1",
    }
}

/// Reads a dataset directory written by [`write_dataset`]. The component
/// files are optional but must be present or absent as a pair.
pub fn read_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();

    let meta_path = dir.join("meta.json");
    if !meta_path.exists() {
        return Err(Error::MissingFile(meta_path));
    }
    let meta_text =
        std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: DatasetMeta = serde_json::from_str(&meta_text)
        .map_err(|e| Error::format(&meta_path, e.to_string()))?;

    let x_path = dir.join("X.npy");
    let x = f64_tensor(read_npy(&x_path)?, "X", &x_path)?;

    let y_path = dir.join("y.npy");
    let y_array = read_npy(&y_path)?;
    let y = match y_array.data {
        NpyData::I64(values) if y_array.shape.len() == 1 => values,
        NpyData::I64(_) => {
            return Err(Error::format(
                &y_path,
                format!("y must be rank 1, got shape {:?}", y_array.shape),
            ))
        }
        other => {
            return Err(Error::format(
                &y_path,
                format!("y must be i8 data, got {}", dtype_name(&other)),
            ))
        }
    };

    let mask_path = dir.join("mask.npy");
    let mask_array = read_npy(&mask_path)?;
    let mask_shape = shape3_of(&mask_array, "mask", &mask_path)?;
    let mask = match mask_array.data {
        NpyData::U8(values) => GroundTruthMask::new(mask_shape, values)?,
        other => {
            return Err(Error::format(
                &mask_path,
                format!("mask must be u1 data, got {}", dtype_name(&other)),
            ))
        }
    };

    let signal_path = dir.join("signal.npy");
    let feature_path = dir.join("feature.npy");
    let components = match (signal_path.exists(), feature_path.exists()) {
        (true, true) => Some(Components {
            signal: f64_tensor(read_npy(&signal_path)?, "signal", &signal_path)?,
            feature: f64_tensor(read_npy(&feature_path)?, "feature", &feature_path)?,
        }),
        (false, false) => None,
        (true, false) => return Err(Error::MissingFile(feature_path)),
        (false, true) => return Err(Error::MissingFile(signal_path)),
    };

    Dataset::new(x, y, mask, components, meta)
}
