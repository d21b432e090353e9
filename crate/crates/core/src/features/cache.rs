//! Flat binary cache for a [`FeatureMatrix`].
//!
//! Layout, all integers and floats little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8 | magic `SFCRMAT1` |
//! | 8 | `n` rows (u64) |
//! | 8 | `d` columns (u64) |
//! | 8 | number of classes (u64) |
//! | `d` times | column name: u32 byte length, then UTF-8 bytes |
//! | `8 n d` | values, row-major f64 |
//! | `4 n` | labels, u32 |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::FeatureMatrix;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"SFCRMAT1";

pub fn write_matrix<W: Write>(m: &FeatureMatrix, mut w: W) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(m.n_rows() as u64).to_le_bytes())?;
    w.write_all(&(m.n_features() as u64).to_le_bytes())?;
    w.write_all(&(m.n_classes() as u64).to_le_bytes())?;
    for name in m.column_names() {
        w.write_all(&(name.len() as u32).to_le_bytes())?;
        w.write_all(name.as_bytes())?;
    }
    for v in m.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    for l in m.labels() {
        w.write_all(&l.to_le_bytes())?;
    }
    w.flush()
}

pub fn read_matrix<R: Read>(mut r: R) -> Result<FeatureMatrix> {
    let bad = |message: &str| Error::Format {
        path: "<matrix cache>".into(),
        message: message.to_owned(),
    };
    let io = |e: std::io::Error| Error::io("<matrix cache>", e);

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(bad("bad magic"));
    }
    let mut u64_buf = [0u8; 8];
    let mut next_u64 = |r: &mut R| -> Result<u64> {
        r.read_exact(&mut u64_buf).map_err(io)?;
        Ok(u64::from_le_bytes(u64_buf))
    };
    let n = next_u64(&mut r)? as usize;
    let d = next_u64(&mut r)? as usize;
    let n_classes = next_u64(&mut r)? as usize;

    let mut names = Vec::with_capacity(d);
    for _ in 0..d {
        let mut len = [0u8; 4];
        r.read_exact(&mut len).map_err(io)?;
        let mut bytes = vec![0u8; u32::from_le_bytes(len) as usize];
        r.read_exact(&mut bytes).map_err(io)?;
        names.push(String::from_utf8(bytes).map_err(|_| bad("column name is not UTF-8"))?);
    }

    let mut raw = vec![0u8; n.checked_mul(d).and_then(|x| x.checked_mul(8)).ok_or_else(|| bad("size overflow"))?];
    r.read_exact(&mut raw).map_err(io)?;
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let mut raw = vec![0u8; n * 4];
    r.read_exact(&mut raw).map_err(io)?;
    let labels = raw
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().expect("4-byte chunk")))
        .collect();
    FeatureMatrix::new(values, names, labels, n_classes)
}

pub fn save(m: &FeatureMatrix, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_matrix(m, BufWriter::new(f)).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<FeatureMatrix> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_matrix(BufReader::new(f)).map_err(|e| match e {
        Error::Format { message, .. } => Error::Format {
            path: path.to_owned(),
            message,
        },
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_bytes() {
        let m = FeatureMatrix::new(
            vec![1.5, -2.0, 3.25, f64::MAX],
            vec!["year".into(), "x".into()],
            vec![2, 0],
            3,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_matrix(&m, &mut buf).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(buf.len(), 32 + (4 + 4) + (4 + 1) + 32 + 8);
        assert_eq!(read_matrix(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_matrix(&b"NOTMAGIC........"[..]).is_err());
        let m = FeatureMatrix::from_rows(&[vec![1.0]], vec![0], 1).unwrap();
        let mut buf = Vec::new();
        write_matrix(&m, &mut buf).unwrap();
        buf.truncate(buf.len() - 2);
        assert!(read_matrix(buf.as_slice()).is_err());
    }
}
