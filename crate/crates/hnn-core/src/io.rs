//! Binary tensor file format.
//!
//! Layout: magic bytes `HNT1`, then `M`, `N`, `S` as unsigned 64-bit
//! little-endian integers, then `M*N*S` little-endian 64-bit floats in
//! storage order (`k` outer, `j` middle, `i` inner). Masks are stored as
//! 0/1 tensors in the same format; entries above 0.5 are observed.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::Mask;
use crate::tensor::Tensor3;

pub const MAGIC: [u8; 4] = *b"HNT1";

/// Write a tensor; the byte stream is a pure function of the tensor, so
/// identical tensors produce identical files.
pub fn save(t: &Tensor3, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&MAGIC)?;
    let (m, n, s) = t.dims();
    for dim in [m, n, s] {
        w.write_all(&(dim as u64).to_le_bytes())?;
    }
    for &v in t.as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Read a tensor written by [`save`]. Bit-exact roundtrip.
pub fn load(path: impl AsRef<Path>) -> Result<Tensor3> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic, "magic bytes")?;
    if magic != MAGIC {
        return Err(Error::MalformedFile(format!(
            "bad magic bytes {magic:?}, expected {MAGIC:?}"
        )));
    }
    let mut dims = [0u64; 3];
    for dim in &mut dims {
        let mut buf = [0u8; 8];
        read_exact(&mut r, &mut buf, "dimension header")?;
        *dim = u64::from_le_bytes(buf);
    }
    let [m, n, s] = dims;
    if m == 0 || n == 0 || s == 0 {
        return Err(Error::MalformedFile(format!("zero dimension in {m}x{n}x{s}")));
    }
    let total = m
        .checked_mul(n)
        .and_then(|p| p.checked_mul(s))
        .filter(|&p| p <= usize::MAX as u64 && p.checked_mul(8).is_some())
        .ok_or_else(|| Error::MalformedFile(format!("dimension product {m}x{n}x{s} overflows")))?
        as usize;
    let mut payload = vec![0u8; total * 8];
    read_exact(&mut r, &mut payload, "payload")?;
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::MalformedFile("trailing bytes after payload".into()));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok(Tensor3::from_vec(m as usize, n as usize, s as usize, data))
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::MalformedFile(format!("truncated {what}"))
        } else {
            Error::Io(e)
        }
    })
}

pub fn save_mask(mask: &Mask, path: impl AsRef<Path>) -> Result<()> {
    save(&mask.to_tensor(), path)
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<Mask> {
    Ok(Mask::from_tensor(&load(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.hnt1");
        let mut rng = StdRng::seed_from_u64(1);
        let t = Tensor3::from_fn(5, 7, 3, |_, _, _| rng.random::<f64>() * 2e3 - 1e3);
        save(&t, &path).unwrap();
        let back = load(&path).unwrap();
        assert_eq!(t.dims(), back.dims());
        for (a, b) in t.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn identical_saves_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let (p1, p2) = (dir.path().join("a"), dir.path().join("b"));
        let t = Tensor3::filled(4, 4, 2, 0.125);
        save(&t, &p1).unwrap();
        save(&t, &p2).unwrap();
        assert_eq!(std::fs::read(p1).unwrap(), std::fs::read(p2).unwrap());
    }

    #[test]
    fn golden_little_endian_fixture() {
        // 1x2x1 tensor holding (1.0, -2.5), written by hand
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"HNT1");
        bytes.extend_from_slice(&1u64.to_le_bytes());
        bytes.extend_from_slice(&2u64.to_le_bytes());
        bytes.extend_from_slice(&1u64.to_le_bytes());
        bytes.extend_from_slice(&1.0f64.to_le_bytes());
        bytes.extend_from_slice(&(-2.5f64).to_le_bytes());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("golden.hnt1");
        std::fs::write(&path, &bytes).unwrap();
        let t = load(&path).unwrap();
        assert_eq!(t.dims(), (1, 2, 1));
        assert_eq!(t.get(0, 0, 0), 1.0);
        assert_eq!(t.get(0, 1, 0), -2.5);
        // and saving reproduces the exact bytes
        save(&t, &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), bytes);
    }

    #[test]
    fn malformed_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad");

        std::fs::write(&path, b"HNT1").unwrap(); // header only
        assert!(matches!(load(&path), Err(Error::MalformedFile(_))));

        std::fs::write(&path, b"XXXX").unwrap();
        assert!(matches!(load(&path), Err(Error::MalformedFile(_))));

        // truncated payload
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"HNT1");
        for d in [2u64, 2, 2] {
            bytes.extend_from_slice(&d.to_le_bytes());
        }
        bytes.extend_from_slice(&1.0f64.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load(&path), Err(Error::MalformedFile(_))));

        // dimension overflow
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"HNT1");
        for d in [u64::MAX, 2, 2] {
            bytes.extend_from_slice(&d.to_le_bytes());
        }
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load(&path), Err(Error::MalformedFile(_))));

        // trailing garbage
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"HNT1");
        for d in [1u64, 1, 1] {
            bytes.extend_from_slice(&d.to_le_bytes());
        }
        bytes.extend_from_slice(&1.0f64.to_le_bytes());
        bytes.push(0);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load(&path), Err(Error::MalformedFile(_))));
    }

    #[test]
    fn mask_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.hnt1");
        let mask = Mask::from_fn((4, 6, 2), |i, j, k| (i * j + k) % 3 == 0);
        save_mask(&mask, &path).unwrap();
        assert_eq!(load_mask(&path).unwrap(), mask);
    }
}
