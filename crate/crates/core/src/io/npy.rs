use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Element types this codec writes. Reading additionally accepts
/// big-endian variants and f4, which widen to these on load.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NpyDtype {
    F64,
    I64,
    U8,
}

impl NpyDtype {
    fn descr(self) -> &'static str {
        match self {
            NpyDtype::F64 => "<f8",
            NpyDtype::I64 => "<i8",
            NpyDtype::U8 => "|u1",
        }
    }
}

/// Typed array contents.
#[derive(Clone, Debug, PartialEq)]
pub enum NpyData {
    F64(Vec<f64>),
    I64(Vec<i64>),
    U8(Vec<u8>),
}

impl NpyData {
    fn len(&self) -> usize {
        match self {
            NpyData::F64(v) => v.len(),
            NpyData::I64(v) => v.len(),
            NpyData::U8(v) => v.len(),
        }
    }
}

/// An n-dimensional array in C (row-major) order.
#[derive(Clone, Debug, PartialEq)]
pub struct NpyArray {
    pub shape: Vec<usize>,
    pub data: NpyData,
}

impl NpyArray {
    pub fn new(shape: Vec<usize>, data: NpyData) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(Error::InvalidShape(format!(
                "shape {:?} implies {} values, got {}",
                shape,
                expected,
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn dtype(&self) -> NpyDtype {
        match self.data {
            NpyData::F64(_) => NpyDtype::F64,
            NpyData::I64(_) => NpyDtype::I64,
            NpyData::U8(_) => NpyDtype::U8,
        }
    }
}

const MAGIC: &[u8; 6] = b"\x93NUMPY";

/// The version 1.0 header: magic, version bytes, little-endian header
/// length, then a Python dict literal padded with spaces and terminated by
/// a newline so the data starts on a 64-byte boundary.
fn build_preamble(dtype: NpyDtype, shape: &[usize]) -> Result<Vec<u8>> {
    let shape_str = match shape.len() {
        1 => format!("{},", shape[0]),
        _ => shape
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    };
    let dict = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': ({}), }}",
        dtype.descr(),
        shape_str
    );
    let unpadded = MAGIC.len() + 4 + dict.len() + 1;
    let total = unpadded.div_ceil(64) * 64;
    let header_len = total - MAGIC.len() - 4;
    if header_len > u16::MAX as usize {
        return Err(Error::InvalidShape(
            "shape too long for a version 1.0 header".into(),
        ));
    }
    let mut out = Vec::with_capacity(total);
    out.extend_from_slice(MAGIC);
    out.push(1);
    out.push(0);
    out.extend_from_slice(&(header_len as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out.resize(total - 1, b' ');
    out.push(b'\n');
    Ok(out)
}

pub fn write_npy(path: impl AsRef<Path>, array: &NpyArray) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    write_npy_to(&mut writer, array).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    writer.flush().map_err(|e| Error::io(path, e))
}

pub fn write_npy_to(writer: &mut impl Write, array: &NpyArray) -> Result<()> {
    if let NpyData::F64(values) = &array.data {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
    }
    let io_err = |e| Error::io("<writer>", e);
    writer
        .write_all(&build_preamble(array.dtype(), &array.shape)?)
        .map_err(io_err)?;
    match &array.data {
        NpyData::F64(values) => {
            for v in values {
                writer.write_all(&v.to_le_bytes()).map_err(io_err)?;
            }
        }
        NpyData::I64(values) => {
            for v in values {
                writer.write_all(&v.to_le_bytes()).map_err(io_err)?;
            }
        }
        NpyData::U8(values) => writer.write_all(values).map_err(io_err)?,
    }
    Ok(())
}

pub fn read_npy(path: impl AsRef<Path>) -> Result<NpyArray> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_npy_from(&mut BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        Error::Format { message, .. } => Error::format(path, message),
        other => other,
    })
}

pub fn read_npy_from(reader: &mut impl Read) -> Result<NpyArray> {
    let placeholder = Path::new("<reader>");
    let io_err = |e: std::io::Error| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::format(placeholder, "file truncated mid-header")
        } else {
            Error::io(placeholder, e)
        }
    };
    let bad = |message: &str| Error::format(placeholder, message);

    let mut start = [0u8; 10];
    reader.read_exact(&mut start).map_err(io_err)?;
    if &start[..6] != MAGIC {
        return Err(bad("not an npy file: bad magic"));
    }
    let (major, minor) = (start[6], start[7]);
    if (major, minor) != (1, 0) {
        return Err(bad(&format!(
            "unsupported npy version {major}.{minor}, expected 1.0"
        )));
    }
    let header_len = u16::from_le_bytes([start[8], start[9]]) as usize;
    let mut header = vec![0u8; header_len];
    reader.read_exact(&mut header).map_err(io_err)?;
    let header = std::str::from_utf8(&header).map_err(|_| bad("header is not UTF-8"))?;
    let (descr, fortran_order, shape) = parse_header_dict(header, placeholder)?;

    let count: usize = shape.iter().product();
    let mut payload = Vec::new();
    reader
        .read_to_end(&mut payload)
        .map_err(|e| Error::io(placeholder, e))?;

    let (little_endian, width, kind) = match descr.as_str() {
        "<f8" | "=f8" => (true, 8, b'f'),
        ">f8" => (false, 8, b'f'),
        "<f4" | "=f4" => (true, 4, b'f'),
        ">f4" => (false, 4, b'f'),
        "<i8" | "=i8" => (true, 8, b'i'),
        ">i8" => (false, 8, b'i'),
        "|u1" | "<u1" | ">u1" | "=u1" => (true, 1, b'u'),
        other => {
            return Err(bad(&format!(
                "unsupported dtype `{other}`, expected f8, f4, i8, or u1"
            )))
        }
    };
    if payload.len() != count * width {
        return Err(bad(&format!(
            "expected {} data bytes for shape {:?}, found {}",
            count * width,
            shape,
            payload.len()
        )));
    }

    let data = match (kind, width) {
        (b'f', 8) => NpyData::F64(decode(&payload, little_endian, f64::from_le_bytes, f64::from_be_bytes)),
        (b'f', 4) => NpyData::F64(
            decode(&payload, little_endian, f32::from_le_bytes, f32::from_be_bytes)
                .into_iter()
                .map(f64::from)
                .collect(),
        ),
        (b'i', 8) => NpyData::I64(decode(&payload, little_endian, i64::from_le_bytes, i64::from_be_bytes)),
        (b'u', 1) => NpyData::U8(payload),
        _ => unreachable!(),
    };

    let data = if fortran_order && shape.len() > 1 {
        fortran_to_c(data, &shape)
    } else {
        data
    };
    NpyArray::new(shape, data)
}

fn decode<T, const W: usize>(
    payload: &[u8],
    little_endian: bool,
    from_le: fn([u8; W]) -> T,
    from_be: fn([u8; W]) -> T,
) -> Vec<T> {
    payload
        .chunks_exact(W)
        .map(|chunk| {
            let bytes: [u8; W] = chunk.try_into().expect("chunk width");
            if little_endian {
                from_le(bytes)
            } else {
                from_be(bytes)
            }
        })
        .collect()
}

/// Reorders column-major data into row-major order.
fn fortran_to_c(data: NpyData, shape: &[usize]) -> NpyData {
    fn reorder<T: Copy>(values: &[T], shape: &[usize]) -> Vec<T> {
        let n = values.len();
        let mut out = Vec::with_capacity(n);
        let mut index = vec![0usize; shape.len()];
        for _ in 0..n {
            // column-major flat offset of the current multi-index
            let mut offset = 0;
            let mut stride = 1;
            for (i, &extent) in shape.iter().enumerate() {
                offset += index[i] * stride;
                stride *= extent;
            }
            out.push(values[offset]);
            // advance the multi-index in row-major order
            for axis in (0..shape.len()).rev() {
                index[axis] += 1;
                if index[axis] < shape[axis] {
                    break;
                }
                index[axis] = 0;
            }
        }
        out
    }
    match data {
        NpyData::F64(v) => NpyData::F64(reorder(&v, shape)),
        NpyData::I64(v) => NpyData::I64(reorder(&v, shape)),
        NpyData::U8(v) => NpyData::U8(reorder(&v, shape)),
    }
}

/// Parses the header dict, e.g.
/// `{'descr': '<f8', 'fortran_order': False, 'shape': (2, 1, 3), }`.
/// Accepts the exact key set in any order, with either quote style.
fn parse_header_dict(header: &str, path: &Path) -> Result<(String, bool, Vec<usize>)> {
    let bad = |message: String| Error::format(path, message);
    let text = header.trim_end_matches(['\n', ' ']);
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| bad("header is not a dict literal".into()))?;

    let mut descr = None;
    let mut fortran_order = None;
    let mut shape = None;
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let quote = rest
            .chars()
            .next()
            .filter(|c| *c == '\'' || *c == '"')
            .ok_or_else(|| bad(format!("expected a quoted key, found `{rest}`")))?;
        let after_quote = &rest[1..];
        let key_end = after_quote
            .find(quote)
            .ok_or_else(|| bad("unterminated key".into()))?;
        let key = &after_quote[..key_end];
        let after_key = after_quote[key_end + 1..].trim_start();
        let value_text = after_key
            .strip_prefix(':')
            .ok_or_else(|| bad(format!("expected `:` after key `{key}`")))?
            .trim_start();

        let value_len = match key {
            "descr" => {
                let q = value_text
                    .chars()
                    .next()
                    .filter(|c| *c == '\'' || *c == '"')
                    .ok_or_else(|| bad("descr must be a string".into()))?;
                let end = value_text[1..]
                    .find(q)
                    .ok_or_else(|| bad("unterminated descr".into()))?;
                descr = Some(value_text[1..1 + end].to_string());
                1 + end + 1
            }
            "fortran_order" => {
                if value_text.starts_with("False") {
                    fortran_order = Some(false);
                    5
                } else if value_text.starts_with("True") {
                    fortran_order = Some(true);
                    4
                } else {
                    return Err(bad("fortran_order must be True or False".into()));
                }
            }
            "shape" => {
                let end = value_text
                    .find(')')
                    .ok_or_else(|| bad("unterminated shape tuple".into()))?;
                let tuple = value_text
                    .strip_prefix('(')
                    .ok_or_else(|| bad("shape must be a tuple".into()))?;
                let dims: Vec<usize> = tuple[..end - 1]
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|_| bad(format!("bad shape entry `{s}`")))
                    })
                    .collect::<Result<_>>()?;
                shape = Some(dims);
                end + 1
            }
            other => return Err(bad(format!("unexpected header key `{other}`"))),
        };
        rest = value_text[value_len..]
            .trim_start()
            .trim_start_matches(',')
            .trim_start();
    }

    match (descr, fortran_order, shape) {
        (Some(d), Some(f), Some(s)) => Ok((d, f, s)),
        _ => Err(bad(
            "header must define descr, fortran_order, and shape".into(),
        )),
    }
}
