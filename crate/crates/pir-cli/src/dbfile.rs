//! Database file formats.
//!
//! Text format: first line is the ASCII decimal length `n`, second line is
//! `n` characters of `'0'`/`'1'`. Raw format: 8 bits per byte, most
//! significant bit first, with the length given out-of-band.

use std::path::Path;

use anyhow::{bail, Context, Result};
use pir_core::bits::BitString;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DbFormat {
    Text,
    Raw,
}

pub fn load_text(path: &Path) -> Result<BitString> {
    let content = std::fs::read_to_string(path)
        .with_context(|| format!("reading database {}", path.display()))?;
    let mut lines = content.lines();
    let n: usize = lines
        .next()
        .context("database file is empty")?
        .trim()
        .parse()
        .context("first line must be the decimal bit count")?;
    let bits_line = lines
        .next()
        .context("database file is missing its bit line")?
        .trim();
    let bits = BitString::parse(bits_line).map_err(|e| anyhow::anyhow!("bad bit line: {e}"))?;
    if bits.len() != n {
        bail!("database declares {n} bits but provides {}", bits.len());
    }
    Ok(bits)
}

pub fn load_raw(path: &Path, n: usize) -> Result<BitString> {
    let bytes =
        std::fs::read(path).with_context(|| format!("reading database {}", path.display()))?;
    let expected = n.div_ceil(8);
    if bytes.len() != expected {
        bail!(
            "raw database of {} bytes, expected {expected} for {n} bits",
            bytes.len()
        );
    }
    let mut bits = BitString::zeros(n);
    for pos in 0..n {
        if bytes[pos / 8] & (0x80 >> (pos % 8)) != 0 {
            bits.set(pos, 1);
        }
    }
    Ok(bits)
}

pub fn load(path: &Path, format: DbFormat, n: Option<usize>) -> Result<BitString> {
    match format {
        DbFormat::Text => load_text(path),
        DbFormat::Raw => {
            let n = n.context("raw databases need --n for the out-of-band length")?;
            load_raw(path, n)
        }
    }
}

pub fn save_text(path: &Path, bits: &BitString) -> Result<()> {
    std::fs::write(path, format!("{}\n{}\n", bits.len(), bits))
        .with_context(|| format!("writing database {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.txt");
        let bits = BitString::parse("1011001110001111").unwrap();
        save_text(&path, &bits).unwrap();
        assert_eq!(load_text(&path).unwrap(), bits);
    }

    #[test]
    fn text_rejects_length_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.txt");
        std::fs::write(&path, "5\n1010\n").unwrap();
        assert!(load_text(&path).is_err());
    }

    #[test]
    fn raw_is_msb_first() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.bin");
        std::fs::write(&path, [0b1100_0000u8]).unwrap();
        let bits = load_raw(&path, 3).unwrap();
        assert_eq!(bits, BitString::parse("110").unwrap());
        assert!(load_raw(&path, 20).is_err());
    }
}
