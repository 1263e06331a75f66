//! Binary sample cache. Layout (all integers little-endian):
//!
//! ```text
//! magic       8 bytes   "GDTICACH"
//! version     u32       = 1
//! count       u32
//! count x sample:
//!   complex_id  u32 length + UTF-8
//!   protein_id  u32 length + UTF-8
//!   pose_index  u8 present flag, then u32 if present
//!   category    u8  (0 dude_active, 1 dude_inactive, 2 pdbbind_positive,
//!                    3 pdbbind_negative, 4 unlabeled)
//!   label       u8  (0, 1, or 255 for none)
//!   rmsd        u8 present flag, then f64 if present
//!   n           u32 atom count
//!   num_ligand  u32
//!   features    n*56 bytes, each 0 or 1, row-major
//!   a1          n*n bytes, each 0 or 1, row-major
//!   inter_mask  n*n bytes, each 0 or 1, row-major
//!   dist        n*(n-1)/2 f64, strict upper triangle, row-major
//! crc32       u32 over every preceding byte
//! ```

use std::path::Path;

use super::GraphSample;
use crate::chem::{Category, FEATURE_DIM};
use crate::error::{Error, Result};
use crate::io::{write_atomic, ByteReader, ByteWriter};
use crate::math::Matrix;

pub const CACHE_MAGIC: &[u8; 8] = b"GDTICACH";
pub const CACHE_VERSION: u32 = 1;

fn put_binary(w: &mut ByteWriter, m: &Matrix) {
    for &v in m.data() {
        w.u8(u8::from(v != 0.0));
    }
}

fn get_binary(r: &mut ByteReader<'_>, rows: usize, cols: usize) -> Result<Matrix> {
    let bytes = r.take(rows * cols)?;
    let mut data = Vec::with_capacity(bytes.len());
    for &b in bytes {
        match b {
            0 => data.push(0.0),
            1 => data.push(1.0),
            other => return Err(r.fail(format!("binary matrix entry {other}"))),
        }
    }
    Matrix::from_vec(rows, cols, data)
}

pub fn encode_cache(samples: &[GraphSample]) -> Vec<u8> {
    let mut w = ByteWriter::new();
    w.bytes(CACHE_MAGIC);
    w.u32(CACHE_VERSION);
    w.u32(samples.len() as u32);
    for s in samples {
        w.str(&s.complex_id);
        w.str(&s.protein_id);
        match s.pose_index {
            Some(p) => {
                w.u8(1);
                w.u32(p);
            }
            None => w.u8(0),
        }
        w.u8(s.category.code());
        w.u8(s.label.unwrap_or(255));
        match s.rmsd {
            Some(r) => {
                w.u8(1);
                w.f64(r);
            }
            None => w.u8(0),
        }
        let n = s.num_atoms();
        w.u32(n as u32);
        w.u32(s.num_ligand as u32);
        put_binary(&mut w, &s.features);
        put_binary(&mut w, &s.a1);
        put_binary(&mut w, &s.inter_mask);
        for i in 0..n {
            for j in i + 1..n {
                w.f64(s.dist[(i, j)]);
            }
        }
    }
    w.finish_with_crc()
}

pub fn decode_cache(data: &[u8], path: &Path) -> Result<Vec<GraphSample>> {
    let mut r = ByteReader::checked(data, path)?;
    r.expect_magic(CACHE_MAGIC)?;
    let version = r.u32()?;
    if version != CACHE_VERSION {
        return Err(Error::Version {
            path: path.to_path_buf(),
            found: version,
            expected: CACHE_VERSION,
        });
    }
    let count = r.u32()? as usize;
    let mut out = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let complex_id = r.str()?;
        let protein_id = r.str()?;
        let pose_index = match r.u8()? {
            0 => None,
            _ => Some(r.u32()?),
        };
        let code = r.u8()?;
        let category =
            Category::from_code(code).ok_or_else(|| r.fail(format!("category code {code}")))?;
        let label = match r.u8()? {
            255 => None,
            l @ (0 | 1) => Some(l),
            l => return Err(r.fail(format!("label {l}"))),
        };
        let rmsd = match r.u8()? {
            0 => None,
            _ => Some(r.f64()?),
        };
        let n = r.u32()? as usize;
        let num_ligand = r.u32()? as usize;
        let features = get_binary(&mut r, n, FEATURE_DIM)?;
        let a1 = get_binary(&mut r, n, n)?;
        let inter_mask = get_binary(&mut r, n, n)?;
        let mut dist = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let d = r.f64()?;
                dist[(i, j)] = d;
                dist[(j, i)] = d;
            }
        }
        out.push(GraphSample {
            complex_id,
            protein_id,
            pose_index,
            category,
            label,
            rmsd,
            num_ligand,
            features,
            a1,
            dist,
            inter_mask,
        });
    }
    r.finish()?;
    Ok(out)
}

pub fn write_cache(path: &Path, samples: &[GraphSample]) -> Result<()> {
    write_atomic(path, &encode_cache(samples))
}

pub fn read_cache(path: &Path) -> Result<Vec<GraphSample>> {
    let data = std::fs::read(path)?;
    decode_cache(&data, path)
}
