//! JSON serialization of operators, states, and code descriptions.
//!
//! Operators and states use `{"dim": d, "entries": [row-major reals]}` with
//! 17-significant-digit decimal floats. Code files carry the shape
//! parameters and the decoder's full randomness table; indices and bit
//! positions in files are 1-based, matching the CLI convention.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use pir_core::bits::SubsetMask;
use pir_core::code::{Code, CodeKind, DecoderArm, DecoderSpec};
use pir_core::linalg::{Matrix, StateVector};
use pir_core::scheme::SchemeKind;
use pir_core::superposed::BooleanFunction;

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn entries_to_json(entries: impl Iterator<Item = f64>) -> String {
    let parts: Vec<String> = entries.map(fmt_f64).collect();
    format!("[{}]", parts.join(","))
}

/// `{"dim": d, "entries": [...]}` for a square operator.
pub fn matrix_to_json(m: &Matrix) -> String {
    assert!(
        m.is_square(),
        "operator serialization covers square matrices"
    );
    format!(
        "{{\"dim\":{},\"entries\":{}}}",
        m.rows(),
        entries_to_json(m.data().iter().copied())
    )
}

/// `{"dim": d, "entries": [...]}` for a state vector.
pub fn state_to_json(s: &StateVector) -> String {
    format!(
        "{{\"dim\":{},\"entries\":{}}}",
        s.dim(),
        entries_to_json(s.amplitudes().iter().copied())
    )
}

#[derive(Deserialize)]
struct DimEntries {
    dim: usize,
    entries: Vec<f64>,
}

pub fn matrix_from_json(json: &str) -> Result<Matrix> {
    let raw: DimEntries = serde_json::from_str(json).context("parsing operator JSON")?;
    if raw.entries.len() != raw.dim * raw.dim {
        bail!(
            "operator with dim {} needs {} entries, got {}",
            raw.dim,
            raw.dim * raw.dim,
            raw.entries.len()
        );
    }
    let mut m = Matrix::zeros(raw.dim, raw.dim);
    for r in 0..raw.dim {
        for c in 0..raw.dim {
            m[(r, c)] = raw.entries[r * raw.dim + c];
        }
    }
    Ok(m)
}

pub fn state_from_json(json: &str) -> Result<StateVector> {
    let raw: DimEntries = serde_json::from_str(json).context("parsing state JSON")?;
    if raw.entries.len() != raw.dim {
        bail!(
            "state with dim {} has {} entries",
            raw.dim,
            raw.entries.len()
        );
    }
    Ok(StateVector::from_amplitudes(raw.entries))
}

#[derive(Serialize, Deserialize, Debug)]
pub struct CodeFile {
    pub schema: u32,
    pub kind: String,
    pub scheme: String,
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub ell: usize,
    pub b: usize,
    pub epsilon: f64,
    /// Documents the entry indexing for cross-language consumers.
    pub entry_order: String,
    pub decoder: DecoderFile,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct DecoderFile {
    /// Output rule; derived decoders xor the selected bits.
    pub f: String,
    pub per_index: Vec<IndexArms>,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct IndexArms {
    /// 1-based message index.
    pub index: usize,
    pub arms: Vec<ArmFile>,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct ArmFile {
    pub r: usize,
    /// 1-based codeword positions.
    pub j0: usize,
    pub j1: usize,
    /// 1-based bit positions within an entry.
    pub s0: Vec<usize>,
    pub s1: Vec<usize>,
}

const ENTRY_ORDER_DOC: &str = "entry index = server * 2^t + q (1-based in this file); \
bit p of the integer q is query bit p";

/// Serializable description of a scheme-derived code and its decoder.
pub fn code_to_file(code: &Code, decoder: &DecoderSpec) -> Result<CodeFile> {
    let CodeKind::SchemeDerived(kind) = &code.kind else {
        bail!("only scheme-derived codes have a file representation");
    };
    let per_index = decoder
        .arms
        .iter()
        .enumerate()
        .map(|(index, arms)| IndexArms {
            index: index + 1,
            arms: arms
                .iter()
                .enumerate()
                .map(|(r, arm)| ArmFile {
                    r,
                    j0: arm.j0 + 1,
                    j1: arm.j1 + 1,
                    s0: arm.s0.positions().iter().map(|p| p + 1).collect(),
                    s1: arm.s1.positions().iter().map(|p| p + 1).collect(),
                })
                .collect(),
        })
        .collect();
    Ok(CodeFile {
        schema: 1,
        kind: "pir-derived".into(),
        scheme: kind.as_str().into(),
        n: code.n,
        m: code.m,
        t: code.query_bits,
        ell: code.ell,
        b: code.b,
        epsilon: code.epsilon,
        entry_order: ENTRY_ORDER_DOC.into(),
        decoder: DecoderFile {
            f: "parity".into(),
            per_index,
        },
    })
}

/// Rebuilds the in-memory code and decoder from a file. The decoder table
/// is taken from the file; the encoder comes from the named scheme.
pub fn code_from_file(file: &CodeFile) -> Result<(Code, DecoderSpec)> {
    if file.schema != 1 {
        bail!("unsupported schema {}", file.schema);
    }
    let kind = match file.scheme.as_str() {
        "square" => SchemeKind::Square,
        "cube" => SchemeKind::Cube,
        other => bail!("unknown scheme '{other}'"),
    };
    if file.decoder.f != "parity" {
        bail!("unknown decoder output rule '{}'", file.decoder.f);
    }
    if file.m != 2 * (1usize << file.t) {
        bail!("m = {} does not match 2 * 2^t with t = {}", file.m, file.t);
    }
    let f = BooleanFunction::parity(file.b);
    let mut arms = vec![Vec::new(); file.n];
    for index_arms in &file.decoder.per_index {
        if index_arms.index == 0 || index_arms.index > file.n {
            bail!("decoder index {} out of range", index_arms.index);
        }
        let slot = &mut arms[index_arms.index - 1];
        for arm in &index_arms.arms {
            if arm.j0 == 0 || arm.j0 > file.m || arm.j1 == 0 || arm.j1 > file.m {
                bail!("decoder arm position out of range");
            }
            let to_mask = |positions: &[usize]| -> Result<SubsetMask> {
                let mut zero_based = Vec::with_capacity(positions.len());
                for &p in positions {
                    if p == 0 || p > file.ell {
                        bail!("selection position {p} out of range");
                    }
                    zero_based.push(p - 1);
                }
                Ok(SubsetMask::from_positions(file.ell, &zero_based))
            };
            slot.push(DecoderArm {
                j0: arm.j0 - 1,
                j1: arm.j1 - 1,
                s0: to_mask(&arm.s0)?,
                s1: to_mask(&arm.s1)?,
                f: f.clone(),
            });
        }
    }
    if arms.iter().any(Vec::is_empty) {
        bail!("decoder table is missing arms for some index");
    }
    let code = Code {
        n: file.n,
        m: file.m,
        ell: file.ell,
        b: file.b,
        epsilon: file.epsilon,
        query_bits: file.t,
        kind: CodeKind::SchemeDerived(kind),
    };
    let decoder = DecoderSpec {
        n: file.n,
        m: file.m,
        ell: file.ell,
        b: file.b,
        arms,
    };
    Ok((code, decoder))
}

#[cfg(test)]
mod tests {
    use super::*;
    use pir_core::code::pir_to_code;

    #[test]
    fn float_formatting_has_17_digits() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        let tricky = 0.1 + 0.2;
        let parsed: f64 = fmt_f64(tricky).parse().unwrap();
        assert_eq!(parsed, tricky);
    }

    #[test]
    fn operator_json_roundtrip() {
        let mut m = Matrix::identity(3);
        m[(0, 2)] = 1.0 / 3.0;
        m[(2, 0)] = -0.125;
        let back = matrix_from_json(&matrix_to_json(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn state_json_roundtrip() {
        let s = StateVector::from_amplitudes(vec![0.5, -0.5, 0.5, 0.5]);
        let back = state_from_json(&state_to_json(&s)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn code_file_roundtrip() {
        let (code, decoder) = pir_to_code(SchemeKind::Square.scheme(), 4).unwrap();
        let file = code_to_file(&code, &decoder).unwrap();
        let json = serde_json::to_string(&file).unwrap();
        let parsed: CodeFile = serde_json::from_str(&json).unwrap();
        let (code2, decoder2) = code_from_file(&parsed).unwrap();
        assert_eq!(code2.m, code.m);
        // The reconstructed decoder decodes identically.
        let x = pir_core::bits::BitString::parse("1011").unwrap();
        let word = code.encode(&x).unwrap();
        for index in 0..4 {
            for r in 0..decoder.randomness_count(index) {
                assert_eq!(
                    decoder.decode(&word, index, r).unwrap(),
                    decoder2.decode(&word, index, r).unwrap()
                );
            }
        }
    }
}
