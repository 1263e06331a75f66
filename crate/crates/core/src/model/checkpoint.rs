//! Versioned checkpoint files. Layout (little-endian):
//!
//! ```text
//! magic            8 bytes  "GDTICKPT"
//! version          u32      = 1
//! num_gat_layers   u32
//! gat_dim          u32
//! input_dim        u32
//! fc_count         u32
//! fc_dims          fc_count x u32
//! dropout_rate     f64
//! gat_dropout      u8
//! iteration        u64
//! tensor_count     u32
//! tensor_count x:  rows u32, cols u32, rows*cols f64 row-major
//! crc32            u32 over every preceding byte
//! ```
//!
//! Tensors appear in `ModelParams::tensors` order.

use std::path::Path;

use super::{ModelConfig, ModelParams};
use crate::error::{Error, Result};
use crate::io::{write_atomic, ByteReader, ByteWriter};
use crate::math::Matrix;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"GDTICKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: ModelConfig,
    pub params: ModelParams,
    /// Training iterations completed when the checkpoint was written.
    pub iteration: u64,
}

impl Checkpoint {
    /// Fails with [`Error::Incompatible`] unless the stored architecture
    /// matches `config` (dropout settings are not compared).
    pub fn ensure_compatible(&self, config: &ModelConfig) -> Result<()> {
        let want = config.tensor_shapes();
        let have: Vec<_> = self.params.tensors().iter().map(|t| t.shape()).collect();
        if want != have {
            return Err(Error::Incompatible(format!(
                "checkpoint has {} layers of width {} and head {:?}; config wants {} layers of width {} and head {:?}",
                self.config.num_gat_layers,
                self.config.gat_dim,
                self.config.fc_dims,
                config.num_gat_layers,
                config.gat_dim,
                config.fc_dims
            )));
        }
        Ok(())
    }

    pub fn encode(&self) -> Vec<u8> {
        let c = &self.config;
        let mut w = ByteWriter::new();
        w.bytes(CHECKPOINT_MAGIC);
        w.u32(CHECKPOINT_VERSION);
        w.u32(c.num_gat_layers as u32);
        w.u32(c.gat_dim as u32);
        w.u32(c.input_dim as u32);
        w.u32(c.fc_dims.len() as u32);
        for &d in &c.fc_dims {
            w.u32(d as u32);
        }
        w.f64(c.dropout_rate);
        w.u8(u8::from(c.gat_dropout));
        w.u64(self.iteration);
        let tensors = self.params.tensors();
        w.u32(tensors.len() as u32);
        for t in tensors {
            w.u32(t.rows() as u32);
            w.u32(t.cols() as u32);
            for &v in t.data() {
                w.f64(v);
            }
        }
        w.finish_with_crc()
    }

    pub fn decode(data: &[u8], path: &Path) -> Result<Self> {
        let mut r = ByteReader::checked(data, path)?;
        r.expect_magic(CHECKPOINT_MAGIC)?;
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::Version {
                path: path.to_path_buf(),
                found: version,
                expected: CHECKPOINT_VERSION,
            });
        }
        let num_gat_layers = r.u32()? as usize;
        let gat_dim = r.u32()? as usize;
        let input_dim = r.u32()? as usize;
        let fc_count = r.u32()? as usize;
        let fc_dims = (0..fc_count)
            .map(|_| r.u32().map(|d| d as usize))
            .collect::<Result<Vec<_>>>()?;
        let config = ModelConfig {
            num_gat_layers,
            gat_dim,
            fc_dims,
            dropout_rate: r.f64()?,
            gat_dropout: r.u8()? != 0,
            input_dim,
        };
        config.validate()?;
        let iteration = r.u64()?;
        let count = r.u32()? as usize;
        let mut tensors = Vec::with_capacity(count.min(1024));
        for _ in 0..count {
            let rows = r.u32()? as usize;
            let cols = r.u32()? as usize;
            let data = (0..rows * cols)
                .map(|_| r.f64())
                .collect::<Result<Vec<_>>>()?;
            tensors.push(Matrix::from_vec(rows, cols, data)?);
        }
        r.finish()?;
        let params = ModelParams::from_tensors(&config, tensors)?;
        Ok(Self {
            config,
            params,
            iteration,
        })
    }
}

pub fn save_params(
    path: &Path,
    params: &ModelParams,
    config: &ModelConfig,
    iteration: u64,
) -> Result<()> {
    let ckpt = Checkpoint {
        config: config.clone(),
        params: params.clone(),
        iteration,
    };
    write_atomic(path, &ckpt.encode())
}

pub fn load_params(path: &Path) -> Result<Checkpoint> {
    let data = std::fs::read(path)?;
    Checkpoint::decode(&data, path)
}
