//! Joint surrogate + autoencoder checkpoint, stored as versioned JSON.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::autoencoder::AutoencoderParams;
use crate::error::{Error, Result};
use crate::surrogate::SurrogateParams;

pub const FORMAT: &str = "deeppm-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub nodes: usize,
    pub budget: f64,
    pub seed: u64,
    /// FNV-1a hash of the training configuration.
    pub config_fingerprint: String,
    pub theta: SurrogateParams,
    pub phi: AutoencoderParams,
}

impl Checkpoint {
    pub fn new(theta: SurrogateParams, phi: AutoencoderParams, budget: f64, seed: u64, config_fingerprint: String) -> Self {
        Checkpoint {
            format: FORMAT.to_string(),
            version: VERSION,
            nodes: phi.nodes(),
            budget,
            seed,
            config_fingerprint,
            theta,
            phi,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, self)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let ckpt: Checkpoint = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        if ckpt.format != FORMAT || ckpt.version != VERSION {
            return Err(Error::Invalid(format!(
                "unsupported checkpoint {} v{} (expected {FORMAT} v{VERSION})",
                ckpt.format, ckpt.version
            )));
        }
        if ckpt.phi.nodes() != ckpt.nodes || !ckpt.theta.is_consistent() {
            return Err(Error::Invalid("checkpoint tensors are inconsistent".into()));
        }
        Ok(ckpt)
    }
}

/// 64-bit FNV-1a, hex encoded.
pub fn fingerprint(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}
