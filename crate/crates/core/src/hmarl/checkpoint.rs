use std::fs;
use std::path::Path;

use super::net::PolicyParams;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"HMCK";
pub const CHECKPOINT_VERSION: u32 = 1;

/// The two trained networks plus the iteration they were saved at.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub iteration: u64,
    pub high: PolicyParams,
    pub low: PolicyParams,
}

// Little-endian layout:
//   "HMCK" u32:version u64:iteration
//   per network (high, then low): u32 obs_dim, u32 hidden, u32 n_actions, u64 len, len x f64
impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.extend_from_slice(&self.iteration.to_le_bytes());
        for p in [&self.high, &self.low] {
            for d in [p.obs_dim(), p.hidden(), p.n_actions()] {
                out.extend_from_slice(&(d as u32).to_le_bytes());
            }
            out.extend_from_slice(&(p.len() as u64).to_le_bytes());
            for w in p.as_slice() {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
        out
    }

    /// `path` is only used in error messages.
    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Format {
            path: path.to_path_buf(),
            reason,
        };
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4).ok_or_else(|| bad("truncated header".into()))? != MAGIC {
            return Err(bad("not a checkpoint (bad magic)".into()));
        }
        let version = r.u32().ok_or_else(|| bad("truncated header".into()))?;
        if version != CHECKPOINT_VERSION {
            return Err(bad(format!("unsupported checkpoint version {version}")));
        }
        let iteration = r.u64().ok_or_else(|| bad("truncated header".into()))?;
        let mut nets = Vec::with_capacity(2);
        for name in ["high", "low"] {
            let trunc = || bad(format!("truncated {name} network"));
            let obs_dim = r.u32().ok_or_else(trunc)? as usize;
            let hidden = r.u32().ok_or_else(trunc)? as usize;
            let n_actions = r.u32().ok_or_else(trunc)? as usize;
            let len = r.u64().ok_or_else(trunc)? as usize;
            if len > bytes.len() / 8 {
                return Err(trunc());
            }
            let mut data = Vec::with_capacity(len);
            for _ in 0..len {
                data.push(r.f64().ok_or_else(trunc)?);
            }
            let net = PolicyParams::from_flat(obs_dim, hidden, n_actions, data)
                .map_err(|e| bad(format!("{name} network: {e}")))?;
            if !net.is_finite() {
                return Err(bad(format!("{name} network holds non-finite weights")));
            }
            nets.push(net);
        }
        if r.pos != bytes.len() {
            return Err(bad(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        let low = nets.pop().expect("two networks parsed");
        let high = nets.pop().expect("two networks parsed");
        Ok(Self { iteration, high, low })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, path)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4).map(|b| u32::from_le_bytes(b.try_into().unwrap()))
    }

    fn u64(&mut self) -> Option<u64> {
        self.take(8).map(|b| u64::from_le_bytes(b.try_into().unwrap()))
    }

    fn f64(&mut self) -> Option<f64> {
        self.take(8).map(|b| f64::from_le_bytes(b.try_into().unwrap()))
    }
}
