//! Binary checkpoints.
//!
//! Layout (all integers little-endian `u64`):
//!
//! ```text
//! "MXC1"
//! spec_len, canonical JSON of the ModelSpec (spec_len bytes)
//! tensor_count
//! per tensor: ndim, dims[ndim], f64 LE values
//! ```

use std::fs;
use std::path::Path;

use super::canonical::to_canonical_string;
use crate::error::{Error, Result};
use crate::netcore::{Model, ModelSpec};
use crate::tensor::Tensor;

pub const MAGIC: &[u8; 4] = b"MXC1";

pub fn encode_checkpoint(model: &Model) -> Result<Vec<u8>> {
    let spec = to_canonical_string(model.spec())?;
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(spec.len() as u64).to_le_bytes());
    out.extend_from_slice(spec.as_bytes());
    out.extend_from_slice(&(model.params().len() as u64).to_le_bytes());
    for t in model.params() {
        out.extend_from_slice(&(t.shape().len() as u64).to_le_bytes());
        for &d in t.shape() {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for v in t.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn save_checkpoint(model: &Model, path: &Path) -> Result<()> {
    fs::write(path, encode_checkpoint(model)?).map_err(|e| Error::io(path, e))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let end = self.pos.checked_add(n)?;
        let out = self.bytes.get(self.pos..end)?;
        self.pos = end;
        Some(out)
    }

    fn u64(&mut self) -> Option<u64> {
        self.take(8).map(|b| u64::from_le_bytes(b.try_into().expect("8 bytes")))
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Model> {
    let mut r = Reader { bytes, pos: 0 };
    let magic: [u8; 4] = r
        .take(4)
        .ok_or(Error::TruncatedHeader)?
        .try_into()
        .expect("4 bytes");
    if &magic[..3] == b"MXC" && magic[3] != MAGIC[3] {
        return Err(Error::VersionMismatch(magic[3] as char));
    }
    if &magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let spec_len = r.u64().ok_or(Error::TruncatedHeader)? as usize;
    let spec_bytes = r.take(spec_len).ok_or(Error::TruncatedHeader)?;
    let spec: ModelSpec = serde_json::from_slice(spec_bytes)?;
    let count = r.u64().ok_or(Error::TruncatedHeader)? as usize;
    let expected = spec.param_shapes();
    if count != expected.len() {
        return Err(Error::Shape(format!(
            "checkpoint holds {count} tensors, its spec declares {}",
            expected.len()
        )));
    }
    let mut params = Vec::with_capacity(count);
    for k in 0..count {
        let ndim = r.u64().ok_or(Error::TruncatedCheckpoint(k))? as usize;
        if ndim > 8 {
            return Err(Error::Shape(format!("tensor {k} claims {ndim} dimensions")));
        }
        let mut shape = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            shape.push(r.u64().ok_or(Error::TruncatedCheckpoint(k))? as usize);
        }
        let len: usize = shape.iter().product();
        let raw = r
            .take(len.checked_mul(8).ok_or(Error::TruncatedCheckpoint(k))?)
            .ok_or(Error::TruncatedCheckpoint(k))?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        params.push(Tensor::from_vec(&shape, data)?);
    }
    if r.pos != bytes.len() {
        return Err(Error::Shape(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Model::from_params(spec, params)
}

pub fn load_checkpoint(path: &Path) -> Result<Model> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes)
}

/// Loads a checkpoint that must match `expected`, naming the first layer that
/// differs.
pub fn load_checkpoint_for(path: &Path, expected: &ModelSpec) -> Result<Model> {
    let model = load_checkpoint(path)?;
    let found = model.spec();
    if (found.input_channels, found.input_height, found.input_width)
        != (expected.input_channels, expected.input_height, expected.input_width)
    {
        return Err(Error::SpecMismatch {
            layer: 0,
            detail: format!(
                "input {}x{}x{} vs expected {}x{}x{}",
                found.input_channels,
                found.input_height,
                found.input_width,
                expected.input_channels,
                expected.input_height,
                expected.input_width
            ),
        });
    }
    let n = found.layers.len().max(expected.layers.len());
    for i in 0..n {
        let (a, b) = (found.layers.get(i), expected.layers.get(i));
        if a != b {
            return Err(Error::SpecMismatch {
                layer: i,
                detail: format!("checkpoint has {a:?}, model expects {b:?}"),
            });
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::LayerSpec;

    fn model() -> Model {
        Model::new(ModelSpec::spray_net(3, 16, 16), 11).unwrap()
    }

    #[test]
    fn round_trip_is_bitwise() {
        let m = model();
        let back = decode_checkpoint(&encode_checkpoint(&m).unwrap()).unwrap();
        assert_eq!(back.spec(), m.spec());
        for (a, b) in back.params().iter().zip(m.params()) {
            let bits_a: Vec<u64> = a.data().iter().map(|v| v.to_bits()).collect();
            let bits_b: Vec<u64> = b.data().iter().map(|v| v.to_bits()).collect();
            assert_eq!(bits_a, bits_b);
        }
    }

    #[test]
    fn truncation_names_the_tensor() {
        let bytes = encode_checkpoint(&model()).unwrap();
        // cut inside the last tensor (dense bias, 4 values)
        let err = decode_checkpoint(&bytes[..bytes.len() - 4]).unwrap_err();
        assert_eq!(err.to_string(), "checkpoint truncated at tensor 7");
        let err = decode_checkpoint(&bytes[..10]).unwrap_err();
        assert!(matches!(err, Error::TruncatedHeader));
    }

    #[test]
    fn magic_and_version_checked() {
        let mut bytes = encode_checkpoint(&model()).unwrap();
        bytes[3] = b'2';
        assert!(matches!(decode_checkpoint(&bytes), Err(Error::VersionMismatch('2'))));
        bytes[0] = b'Z';
        assert!(matches!(decode_checkpoint(&bytes), Err(Error::BadMagic(_))));
    }

    #[test]
    fn mismatched_spec_names_first_layer() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mxc");
        save_checkpoint(&model(), &path).unwrap();
        let mut other = ModelSpec::spray_net(3, 16, 16);
        other.layers[3] = LayerSpec::Conv2d {
            in_channels: 8,
            out_channels: 12,
        };
        match load_checkpoint_for(&path, &other) {
            Err(Error::SpecMismatch { layer, .. }) => assert_eq!(layer, 3),
            r => panic!("unexpected {r:?}"),
        }
        assert!(load_checkpoint_for(&path, &ModelSpec::spray_net(3, 16, 16)).is_ok());
    }
}
