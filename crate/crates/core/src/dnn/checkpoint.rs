//! Checkpoint layout, little-endian throughout:
//!
//! ```text
//! magic "SAMCNET\0" | version u32 | header_len u32 | header (JSON NetSpec, UTF-8)
//! tensor_count u32 | per tensor: rank u32, dims u32 × rank, values f32 × Π dims
//! ```

use std::fs;
use std::path::Path;

use super::net::Network;
use super::spec::NetSpec;
use crate::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"SAMCNET\0";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn encode_checkpoint(net: &Network) -> Result<Vec<u8>> {
    let header = serde_json::to_string_pretty(net.spec())?;
    let mut out = Vec::with_capacity(64 + header.len() + 4 * net.num_params());
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&(net.params().len() as u32).to_le_bytes());
    for p in net.params() {
        out.extend_from_slice(&(p.shape.len() as u32).to_le_bytes());
        for &d in &p.shape {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for &v in &p.data {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    Ok(out)
}

pub fn save_checkpoint(net: &Network, path: &Path) -> Result<()> {
    let bytes = encode_checkpoint(net)?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl Reader<'_> {
    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::Format {
            path: self.path.to_path_buf(),
            reason: reason.into(),
        }
    }

    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(self.fail(format!("truncated at byte {}", self.pos))),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }
}

/// Parses a checkpoint; `path` is only used in error messages.
pub fn decode_checkpoint(bytes: &[u8], path: &Path) -> Result<Network> {
    let mut r = Reader {
        bytes,
        pos: 0,
        path,
    };
    if r.take(8)? != CHECKPOINT_MAGIC {
        return Err(r.fail("bad magic"));
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(r.fail(format!("unsupported version {version}")));
    }
    let hlen = r.u32()? as usize;
    let header = match std::str::from_utf8(r.take(hlen)?) {
        Ok(h) => h,
        Err(e) => return Err(r.fail(e.to_string())),
    };
    let spec: NetSpec = serde_json::from_str(header).map_err(|e| r.fail(format!("header: {e}")))?;
    let mut net = Network::new(spec)?;
    let count = r.u32()? as usize;
    if count != net.params().len() {
        return Err(r.fail(format!("{count} tensors, net has {}", net.params().len())));
    }
    for i in 0..count {
        let rank = r.u32()? as usize;
        let dims = (0..rank)
            .map(|_| r.u32().map(|d| d as usize))
            .collect::<Result<Vec<_>>>()?;
        let want = &net.params()[i].shape;
        if &dims != want {
            return Err(r.fail(format!("tensor {i} has shape {dims:?}, expected {want:?}")));
        }
        let n: usize = dims.iter().product();
        let raw = r.take(4 * n)?;
        let values = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
            .collect();
        net.params_mut()[i].data = values;
    }
    if r.pos != bytes.len() {
        return Err(r.fail(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Ok(net)
}

pub fn load_checkpoint(path: &Path) -> Result<Network> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes, path)
}
