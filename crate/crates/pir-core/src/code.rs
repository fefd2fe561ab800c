//! Smooth codes and locally decodable codes derived from PIR schemes.
//!
//! Concatenating both servers' answers to every possible query turns a
//! scheme into a code of length `m = 2 * 2^t` over the alphabet
//! `{0,1}^ell`: entry `j = server * 2^t + q` holds that server's answer to
//! query `q` (query bit `p` is bit `p` of the integer `q`). The scheme's
//! user becomes a 2-query decoder whose randomness doubles as the codeword
//! positions it reads.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::bits::{restrict, BitString, SubsetMask};
use crate::error::{Error, Result};
use crate::scheme::{Scheme, SchemeKind};
use crate::superposed::BooleanFunction;

/// Largest tolerated query space for code materialization.
pub const MAX_CODE_QUERY_BITS: usize = 20;

/// How a code maps messages to codewords.
#[derive(Clone, Debug)]
pub enum CodeKind {
    /// Entries are scheme answers, server-major.
    SchemeDerived(SchemeKind),
    /// Explicit codebook indexed by the message integer; for hand-built
    /// test codes with small `n`.
    Explicit(Vec<Vec<BitString>>),
    /// Each entry of the inner code replaced by a derived bit per
    /// `b`-subset of its positions (the parity-decoder transformation).
    ParityDerived(Box<Code>),
}

/// A code `{0,1}^n -> ({0,1}^ell)^m`.
#[derive(Clone, Debug)]
pub struct Code {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
    pub b: usize,
    pub epsilon: f64,
    /// Query bits of the originating scheme; `m = 2 * 2^t` for derived codes.
    pub query_bits: usize,
    pub kind: CodeKind,
}

impl Code {
    /// Encodes a message into its `m` codeword entries.
    pub fn encode(&self, x: &BitString) -> Result<Vec<BitString>> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        match &self.kind {
            CodeKind::SchemeDerived(kind) => {
                let scheme = kind.scheme();
                let db = scheme.arrange(x.clone());
                debug_assert_eq!(db.arranged_len(), self.n);
                let queries = 1usize << self.query_bits;
                let mut entries = Vec::with_capacity(self.m);
                for j in 0..self.m {
                    let q = BitString::from_index(j % queries, self.query_bits);
                    entries.push(scheme.answer(&db, &q)?);
                }
                Ok(entries)
            }
            CodeKind::Explicit(book) => {
                let idx = x.to_index();
                book.get(idx).cloned().ok_or(Error::IndexOutOfRange {
                    index: idx,
                    len: book.len(),
                })
            }
            CodeKind::ParityDerived(inner) => {
                let base = inner.encode(x)?;
                let subsets = crate::linalg::subsets_of_size(inner.ell, inner.b);
                let entries = base
                    .iter()
                    .map(|entry| {
                        let bits = subsets
                            .iter()
                            .map(|&s| {
                                let mask = SubsetMask::from_subset_index(inner.ell, s);
                                restrict(entry, &mask)
                                    .expect("entry length fixed by construction")
                                    .bits()
                                    .iter()
                                    .fold(0, |acc, &v| acc ^ v)
                            })
                            .collect();
                        BitString::from_bits(bits).expect("bits are 0/1")
                    })
                    .collect();
                Ok(entries)
            }
        }
    }
}

/// One decoder behavior under a fixed randomness value: which two positions
/// to read, which `b` bits of each, and how to combine them.
#[derive(Clone, Debug)]
pub struct DecoderArm {
    pub j0: usize,
    pub j1: usize,
    pub s0: SubsetMask,
    pub s1: SubsetMask,
    /// Output table over `(a0, a1)`, `a0` in the `w` slot.
    pub f: BooleanFunction,
}

impl DecoderArm {
    /// Applies this arm to a (possibly corrupted) codeword.
    pub fn decode(&self, word: &[BitString]) -> Result<u8> {
        let a0 = restrict(&word[self.j0], &self.s0)?;
        let a1 = restrict(&word[self.j1], &self.s1)?;
        Ok(self.f.eval(a0.to_index(), a1.to_index()))
    }
}

/// A randomized 2-query decoder: for each index, a uniform choice among arms.
#[derive(Clone, Debug)]
pub struct DecoderSpec {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
    pub b: usize,
    /// `arms[i]` are the equally likely behaviors when decoding index `i`.
    pub arms: Vec<Vec<DecoderArm>>,
}

impl DecoderSpec {
    pub fn arm(&self, index: usize, r: usize) -> Result<&DecoderArm> {
        self.arms
            .get(index)
            .and_then(|arms| arms.get(r))
            .ok_or(Error::IndexOutOfRange {
                index: r,
                len: self.arms.len(),
            })
    }

    /// Number of randomness values for one index.
    pub fn randomness_count(&self, index: usize) -> usize {
        self.arms[index].len()
    }

    pub fn decode(&self, word: &[BitString], index: usize, r: usize) -> Result<u8> {
        self.arm(index, r)?.decode(word)
    }
}

/// Turns a scheme instance into a code plus its 2-query decoder.
pub fn pir_to_code(scheme: &dyn Scheme, n: usize) -> Result<(Code, DecoderSpec)> {
    let params = scheme.params(n)?;
    if params.t > MAX_CODE_QUERY_BITS {
        return Err(Error::EnumerationTooLarge {
            bits: params.t,
            cap_bits: MAX_CODE_QUERY_BITS,
        });
    }
    let queries = 1usize << params.t;
    let m = 2 * queries;
    let r_len = scheme.randomness_len(n)?;

    let f = BooleanFunction::parity(params.b);
    let mut arms = Vec::with_capacity(n);
    for index in 0..n {
        let (s0, s1) = scheme.selections(n, index)?;
        if s0.cardinality() != params.b || s1.cardinality() != params.b {
            return Err(Error::SelectionMismatch {
                expected: params.b,
                actual: s0.cardinality().max(s1.cardinality()),
            });
        }
        let mut index_arms = Vec::with_capacity(1usize << r_len);
        for r in 0..(1usize << r_len) {
            let randomness = BitString::from_index(r, r_len);
            let (q0, q1) = scheme.queries(n, index, &randomness)?;
            index_arms.push(DecoderArm {
                j0: q0.to_index(),
                j1: queries + q1.to_index(),
                s0: s0.clone(),
                s1: s1.clone(),
                f: f.clone(),
            });
        }
        arms.push(index_arms);
    }

    let code = Code {
        n,
        m,
        ell: params.ell,
        b: params.b,
        epsilon: params.epsilon,
        query_bits: params.t,
        kind: CodeKind::SchemeDerived(scheme.kind()),
    };
    let decoder = DecoderSpec {
        n,
        m,
        ell: params.ell,
        b: params.b,
        arms,
    };
    Ok((code, decoder))
}

/// Exact query distribution of a decoder, enumerated over its randomness.
#[derive(Clone, Debug)]
pub struct SmoothnessReport {
    /// `max over (i, j)` of `m * Pr[decoder for i queries j]`.
    pub c_star: f64,
    /// `per_index[i][j] = Pr[decoder for i queries j]`.
    pub per_index: Vec<Vec<f64>>,
}

/// Enumerates the decoder's query distribution and reports the smoothness
/// constant `c* = m * max Pr[queries j]`.
pub fn smoothness_profile(decoder: &DecoderSpec) -> SmoothnessReport {
    let m = decoder.m;
    let mut per_index = Vec::with_capacity(decoder.n);
    let mut c_star = 0.0f64;
    for arms in &decoder.arms {
        let mut counts = vec![0u64; m];
        for arm in arms {
            counts[arm.j0] += 1;
            counts[arm.j1] += 1;
        }
        let total = arms.len() as f64;
        let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
        for &p in &probs {
            c_star = c_star.max(p * m as f64);
        }
        per_index.push(probs);
    }
    SmoothnessReport { c_star, per_index }
}

/// How corrupted entries are chosen and filled.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CorruptModel {
    /// Uniformly random positions, uniformly random replacement entries.
    Random,
    /// The positions most queried when decoding `target`, replaced by their
    /// bitwise complement.
    AdversarialHot { target: usize },
}

fn sample_below<R: RngCore + ?Sized>(rng: &mut R, n: u64) -> u64 {
    // Rejection sampling for an unbiased draw.
    let zone = u64::MAX - u64::MAX % n;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % n;
        }
    }
}

/// Replaces exactly `floor(delta * m)` codeword entries.
pub fn corrupt<R: RngCore + ?Sized>(
    word: &[BitString],
    delta: f64,
    model: CorruptModel,
    decoder: &DecoderSpec,
    rng: &mut R,
) -> Result<Vec<BitString>> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter("delta must lie in [0, 1]".into()));
    }
    let m = word.len();
    let budget = libm::floor(delta * m as f64) as usize;
    let mut out = word.to_vec();
    match model {
        CorruptModel::Random => {
            // Partial Fisher-Yates over the position list.
            let mut positions: Vec<usize> = (0..m).collect();
            for k in 0..budget {
                let pick = k + sample_below(rng, (m - k) as u64) as usize;
                positions.swap(k, pick);
                let j = positions[k];
                out[j] = BitString::random(word[j].len(), rng);
            }
        }
        CorruptModel::AdversarialHot { target } => {
            if target >= decoder.n {
                return Err(Error::IndexOutOfRange {
                    index: target,
                    len: decoder.n,
                });
            }
            let mut counts = vec![0u64; m];
            for arm in &decoder.arms[target] {
                counts[arm.j0] += 1;
                counts[arm.j1] += 1;
            }
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
            for &j in order.iter().take(budget) {
                out[j] = word[j].flipped();
            }
        }
    }
    Ok(out)
}

/// Empirical success rate of decoding `x[index]` from freshly corrupted
/// codewords.
#[allow(clippy::too_many_arguments)]
pub fn local_decode_trial<R: RngCore + ?Sized>(
    code: &Code,
    decoder: &DecoderSpec,
    x: &BitString,
    index: usize,
    delta: f64,
    model: CorruptModel,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if index >= code.n {
        return Err(Error::IndexOutOfRange { index, len: code.n });
    }
    let word = code.encode(x)?;
    let want = x.get(index);
    let arm_count = decoder.randomness_count(index) as u64;
    let mut successes = 0usize;
    for _ in 0..trials {
        let corrupted = corrupt(&word, delta, model, decoder, rng)?;
        let r = sample_below(rng, arm_count) as usize;
        if decoder.decode(&corrupted, index, r)? == want {
            successes += 1;
        }
    }
    Ok(successes as f64 / trials as f64)
}
