//! "TXRW" tensor container used for codec weights and trained models.
//!
//! Layout (all integers little-endian):
//!   magic "TXRW" | u32 version | u32 tensor count
//!   per tensor: u32 name len | name bytes | u32 rank | u64 dims[rank]
//!               | f64 data[prod dims] | u32 CRC-32 of the data bytes

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"TXRW";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub dims: Vec<u64>,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn new(name: impl Into<String>, dims: Vec<u64>, data: Vec<f64>) -> Result<Self> {
        let len: u64 = dims.iter().product();
        if len != data.len() as u64 {
            return Err(Error::ShapeMismatch(format!(
                "tensor data length {} != product of dims {:?}",
                data.len(),
                dims
            )));
        }
        Ok(Tensor { name: name.into(), dims, data })
    }
}

/// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320).
pub fn crc32(bytes: &[u8]) -> u32 {
    const TABLE: [u32; 256] = {
        let mut table = [0u32; 256];
        let mut i = 0;
        while i < 256 {
            let mut c = i as u32;
            let mut k = 0;
            while k < 8 {
                c = if c & 1 != 0 { 0xEDB8_8320 ^ (c >> 1) } else { c >> 1 };
                k += 1;
            }
            table[i] = c;
            i += 1;
        }
        table
    };
    let mut crc = !0u32;
    for &b in bytes {
        crc = TABLE[((crc ^ b as u32) & 0xFF) as usize] ^ (crc >> 8);
    }
    !crc
}

pub fn write_tensors(path: impl AsRef<Path>, tensors: &[Tensor]) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for t in tensors {
        out.extend_from_slice(&(t.name.len() as u32).to_le_bytes());
        out.extend_from_slice(t.name.as_bytes());
        out.extend_from_slice(&(t.dims.len() as u32).to_le_bytes());
        for &d in &t.dims {
            out.extend_from_slice(&d.to_le_bytes());
        }
        let start = out.len();
        for &v in &t.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        let crc = crc32(&out[start..]);
        out.extend_from_slice(&crc.to_le_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_tensors(path: impl AsRef<Path>) -> Result<Vec<Tensor>> {
    let path = path.as_ref();
    let raw = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut r = Reader { raw: &raw, pos: 0 };

    if r.take(4)? != MAGIC {
        return Err(Error::CorruptWeights("bad magic, not a TXRW file".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::CorruptWeights(format!(
            "unsupported version {version}, expected {VERSION}"
        )));
    }
    let count = r.u32()? as usize;
    let mut tensors = Vec::with_capacity(count);
    for _ in 0..count {
        let name_len = r.u32()? as usize;
        let name = std::str::from_utf8(r.take(name_len)?)
            .map_err(|_| Error::CorruptWeights("tensor name is not UTF-8".into()))?
            .to_string();
        let rank = r.u32()? as usize;
        let mut dims = Vec::with_capacity(rank);
        for _ in 0..rank {
            dims.push(r.u64()?);
        }
        let len: u64 = dims.iter().product();
        let payload = r.take(len as usize * 8)?;
        let stored_crc = u32::from_le_bytes(
            r.take(4)?.try_into().expect("take(4) returns 4 bytes"),
        );
        let actual = crc32(payload);
        if stored_crc != actual {
            return Err(Error::CorruptWeights(format!(
                "tensor '{name}' checksum mismatch (stored {stored_crc:#010x}, computed {actual:#010x})"
            )));
        }
        let data = payload
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
            .collect();
        tensors.push(Tensor { name, dims, data });
    }
    if r.pos != raw.len() {
        return Err(Error::CorruptWeights("trailing bytes after last tensor".into()));
    }
    Ok(tensors)
}

struct Reader<'a> {
    raw: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let slice = self
            .raw
            .get(self.pos..self.pos + n)
            .ok_or_else(|| Error::CorruptWeights("file truncated".into()))?;
        self.pos += n;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crc32_known_vectors() {
        // Reference values from the IEEE CRC-32 check string.
        assert_eq!(crc32(b"123456789"), 0xCBF4_3926);
        assert_eq!(crc32(b""), 0);
    }

    #[test]
    fn round_trip_preserves_tensors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.bin");
        let tensors = vec![
            Tensor::new("enc.conv1.weight", vec![2, 3], vec![1.5, -2.0, 0.0, 3.25, 4.0, -0.5]).unwrap(),
            Tensor::new("enc.conv1.bias", vec![2], vec![0.125, -9.75]).unwrap(),
        ];
        write_tensors(&path, &tensors).unwrap();
        assert_eq!(read_tensors(&path).unwrap(), tensors);
    }

    #[test]
    fn corrupt_payload_fails_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.bin");
        let tensors = vec![Tensor::new("t", vec![4], vec![1.0, 2.0, 3.0, 4.0]).unwrap()];
        write_tensors(&path, &tensors).unwrap();
        let mut raw = std::fs::read(&path).unwrap();
        let n = raw.len();
        raw[n - 12] ^= 0x40; // flip a bit inside the float payload
        std::fs::write(&path, raw).unwrap();
        assert!(matches!(read_tensors(&path), Err(Error::CorruptWeights(msg)) if msg.contains("checksum")));
    }

    #[test]
    fn bad_magic_and_version_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.bin");
        std::fs::write(&path, b"NOPE").unwrap();
        assert!(read_tensors(&path).is_err());

        let mut bytes = Vec::new();
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&99u32.to_le_bytes());
        bytes.extend_from_slice(&0u32.to_le_bytes());
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(read_tensors(&path), Err(Error::CorruptWeights(msg)) if msg.contains("version")));
    }

    #[test]
    fn mismatched_dims_are_rejected_at_construction() {
        assert!(Tensor::new("t", vec![2, 2], vec![0.0; 3]).is_err());
    }
}
