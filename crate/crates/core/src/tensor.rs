use crate::error::{shape_str, Error, Result};

/// Shape of a rank-3 array: (n_samples, n_dims, n_timesteps).
pub type Shape3 = (usize, usize, usize);

/// Anything with a rank-3 shape that can be compared against another array.
pub trait Shaped {
    fn shape3(&self) -> Shape3;
}

fn check_shape(shape: Shape3, len: usize) -> Result<()> {
    let (n, d, t) = shape;
    if n == 0 || d == 0 || t == 0 {
        return Err(Error::InvalidShape(format!(
            "every extent must be at least 1, got {}",
            shape_str(&[n, d, t])
        )));
    }
    let expected = n
        .checked_mul(d)
        .and_then(|v| v.checked_mul(t))
        .ok_or_else(|| Error::InvalidShape("shape overflows usize".into()))?;
    if expected != len {
        return Err(Error::InvalidShape(format!(
            "shape {} implies {} values, got {}",
            shape_str(&[n, d, t]),
            expected,
            len
        )));
    }
    Ok(())
}

/// Errors unless `a` and `b` have identical shapes.
pub fn validate_shapes(a: &impl Shaped, b: &impl Shaped) -> Result<()> {
    let (an, ad, at) = a.shape3();
    let (bn, bd, bt) = b.shape3();
    if (an, ad, at) != (bn, bd, bt) {
        return Err(Error::ShapeMismatch {
            expected: vec![an, ad, at],
            actual: vec![bn, bd, bt],
        });
    }
    Ok(())
}

/// Dense rank-3 array of f64 values stored row-major, so the timestep axis
/// is contiguous and each sample occupies one contiguous block.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeriesTensor {
    shape: Shape3,
    values: Vec<f64>,
}

impl TimeSeriesTensor {
    /// Wraps a flat buffer. The extents must all be at least 1, the buffer
    /// length must match the shape, and every value must be finite.
    pub fn new(shape: Shape3, values: Vec<f64>) -> Result<Self> {
        check_shape(shape, values.len())?;
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { shape, values })
    }

    pub fn zeros(shape: Shape3) -> Result<Self> {
        let (n, d, t) = shape;
        if n == 0 || d == 0 || t == 0 {
            return Err(Error::InvalidShape(format!(
                "every extent must be at least 1, got {}",
                shape_str(&[n, d, t])
            )));
        }
        Ok(Self {
            shape,
            values: vec![0.0; n * d * t],
        })
    }

    pub fn shape(&self) -> Shape3 {
        self.shape
    }

    pub fn n_samples(&self) -> usize {
        self.shape.0
    }

    pub fn n_dims(&self) -> usize {
        self.shape.1
    }

    pub fn n_timesteps(&self) -> usize {
        self.shape.2
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn offset(&self, sample: usize, channel: usize) -> usize {
        let (_, d, t) = self.shape;
        (sample * d + channel) * t
    }

    /// All channels of one sample as a contiguous slice of length
    /// n_dims * n_timesteps.
    pub fn sample(&self, sample: usize) -> &[f64] {
        let (_, d, t) = self.shape;
        let start = sample * d * t;
        &self.values[start..start + d * t]
    }

    /// One channel of one sample, length n_timesteps.
    pub fn slice(&self, sample: usize, channel: usize) -> &[f64] {
        let start = self.offset(sample, channel);
        &self.values[start..start + self.shape.2]
    }

    pub(crate) fn slice_mut(&mut self, sample: usize, channel: usize) -> &mut [f64] {
        let start = self.offset(sample, channel);
        let t = self.shape.2;
        &mut self.values[start..start + t]
    }
}

impl Shaped for TimeSeriesTensor {
    fn shape3(&self) -> Shape3 {
        self.shape
    }
}

/// Binary ground-truth mask aligned with a [`TimeSeriesTensor`]: 1 where a
/// localized feature was written, 0 elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruthMask {
    shape: Shape3,
    values: Vec<u8>,
}

impl GroundTruthMask {
    pub fn new(shape: Shape3, values: Vec<u8>) -> Result<Self> {
        check_shape(shape, values.len())?;
        if let Some(index) = values.iter().position(|&v| v > 1) {
            return Err(Error::InvalidMaskValue {
                index,
                value: values[index],
            });
        }
        Ok(Self { shape, values })
    }

    pub fn zeros(shape: Shape3) -> Result<Self> {
        let (n, d, t) = shape;
        if n == 0 || d == 0 || t == 0 {
            return Err(Error::InvalidShape(format!(
                "every extent must be at least 1, got {}",
                shape_str(&[n, d, t])
            )));
        }
        Ok(Self {
            shape,
            values: vec![0; n * d * t],
        })
    }

    pub fn shape(&self) -> Shape3 {
        self.shape
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    fn offset(&self, sample: usize, channel: usize) -> usize {
        let (_, d, t) = self.shape;
        (sample * d + channel) * t
    }

    pub fn sample(&self, sample: usize) -> &[u8] {
        let (_, d, t) = self.shape;
        let start = sample * d * t;
        &self.values[start..start + d * t]
    }

    pub fn slice(&self, sample: usize, channel: usize) -> &[u8] {
        let start = self.offset(sample, channel);
        &self.values[start..start + self.shape.2]
    }

    /// Marks `[start, start + len)` on one channel.
    pub(crate) fn set_run(&mut self, sample: usize, channel: usize, start: usize, len: usize) {
        let base = self.offset(sample, channel) + start;
        for v in &mut self.values[base..base + len] {
            *v = 1;
        }
    }

    /// Maximal runs of 1s on one channel as (start, len) pairs.
    pub fn runs(&self, sample: usize, channel: usize) -> Vec<(usize, usize)> {
        let row = self.slice(sample, channel);
        let mut out = Vec::new();
        let mut start = None;
        for (i, &v) in row.iter().enumerate() {
            match (v, start) {
                (1, None) => start = Some(i),
                (0, Some(s)) => {
                    out.push((s, i - s));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, row.len() - s));
        }
        out
    }

    /// Fraction of positions marked 1 over the whole mask.
    pub fn prevalence(&self) -> f64 {
        let ones: usize = self.values.iter().map(|&v| v as usize).sum();
        ones as f64 / self.values.len() as f64
    }

    /// The mask as a float tensor of 0.0 and 1.0, e.g. to score the mask
    /// itself as an attribution map.
    pub fn to_tensor(&self) -> TimeSeriesTensor {
        TimeSeriesTensor {
            shape: self.shape,
            values: self.values.iter().map(|&v| v as f64).collect(),
        }
    }
}

impl Shaped for GroundTruthMask {
    fn shape3(&self) -> Shape3 {
        self.shape
    }
}
