//! The two-server square and cube PIR schemes, plus an exact privacy auditor.
//!
//! Both schemes are one-round: the user derives two queries from the target
//! index and a random string, each server answers as a pure function of
//! `(x, q)`, and the user xors a few selected answer bits. The square scheme
//! reads `b = 1` bit of each answer, the cube scheme `b = 3`.

use alloc::vec;
use alloc::vec::Vec;

use crate::bits::{restrict, Arrangement, BitString, Coords, Database, SubsetMask};
use crate::error::{Error, Result};

/// Identifies one of the two implemented schemes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SchemeKind {
    Square,
    Cube,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Square => "square",
            SchemeKind::Cube => "cube",
        }
    }

    /// The scheme implementation behind this identifier.
    pub fn scheme(&self) -> &'static dyn Scheme {
        match self {
            SchemeKind::Square => &SquareScheme,
            SchemeKind::Cube => &CubeScheme,
        }
    }
}

/// Parameters of a scheme instance: query size `t`, answer size `ell`,
/// probe size `b`, recovery advantage `epsilon`, and privacy leakage `eta`.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct PirParams {
    pub n: usize,
    pub t: usize,
    pub ell: usize,
    pub b: usize,
    pub servers: usize,
    pub epsilon: f64,
    pub eta: f64,
}

/// Full record of one protocol run.
#[derive(Clone, PartialEq, Debug)]
pub struct Transcript {
    pub index: usize,
    pub randomness: BitString,
    pub q0: BitString,
    pub q1: BitString,
    pub a0: BitString,
    pub a1: BitString,
    pub s0: SubsetMask,
    pub s1: SubsetMask,
    pub output: u8,
}

/// A one-round two-server PIR scheme.
///
/// `n` is always the arranged database length (an exact square or cube);
/// padding from shorter messages happens in [`Database`].
pub trait Scheme: Sync {
    fn kind(&self) -> SchemeKind;

    /// Arranges (and zero-pads) a message into this scheme's database shape.
    fn arrange(&self, x: BitString) -> Database;

    fn params(&self, n: usize) -> Result<PirParams>;

    /// Number of random bits a query generation consumes.
    fn randomness_len(&self, n: usize) -> Result<usize>;

    /// The two queries for `index` under the given randomness.
    fn queries(
        &self,
        n: usize,
        index: usize,
        randomness: &BitString,
    ) -> Result<(BitString, BitString)>;

    /// A server's answer; identical for both servers.
    fn answer(&self, db: &Database, query: &BitString) -> Result<BitString>;

    /// The `b`-element selection sets the user reads from each answer.
    fn selections(&self, n: usize, index: usize) -> Result<(SubsetMask, SubsetMask)>;

    /// The user's output: parity of the selected bits.
    fn reconstruct(&self, n: usize, index: usize, a0: &BitString, a1: &BitString) -> Result<u8> {
        let (s0, s1) = self.selections(n, index)?;
        let picked = restrict(a0, &s0)?.concat(&restrict(a1, &s1)?);
        Ok(picked.bits().iter().fold(0, |acc, &b| acc ^ b))
    }
}

/// The square scheme: `x` arranged as a `sqrt(n) x sqrt(n)` matrix,
/// `q0 = A`, `q1 = A xor e_{i1}`, answers are per-column inner products,
/// and the user xors the two bits at column `i2`.
pub struct SquareScheme;

impl SquareScheme {
    fn side(&self, n: usize) -> Result<usize> {
        match Arrangement::exact_square(n)? {
            Arrangement::Square { side } => Ok(side),
            _ => unreachable!(),
        }
    }
}

impl Scheme for SquareScheme {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Square
    }

    fn arrange(&self, x: BitString) -> Database {
        Database::square(x)
    }

    fn params(&self, n: usize) -> Result<PirParams> {
        let side = self.side(n)?;
        Ok(PirParams {
            n,
            t: side,
            ell: side,
            b: 1,
            servers: 2,
            epsilon: 0.5,
            eta: 0.0,
        })
    }

    fn randomness_len(&self, n: usize) -> Result<usize> {
        self.side(n)
    }

    fn queries(
        &self,
        n: usize,
        index: usize,
        randomness: &BitString,
    ) -> Result<(BitString, BitString)> {
        let side = self.side(n)?;
        if randomness.len() != side {
            return Err(Error::LengthMismatch {
                expected: side,
                actual: randomness.len(),
            });
        }
        let Coords::Square(row, _) = Arrangement::Square { side }.split(index)? else {
            unreachable!()
        };
        let q0 = randomness.clone();
        let q1 = randomness.xor(&BitString::unit(side, row))?;
        Ok((q0, q1))
    }

    fn answer(&self, db: &Database, query: &BitString) -> Result<BitString> {
        let Arrangement::Square { side } = db.arrangement() else {
            return Err(Error::IncompatibleArrangement {
                n: db.arranged_len(),
                wanted: "square",
            });
        };
        if query.len() != side {
            return Err(Error::LengthMismatch {
                expected: side,
                actual: query.len(),
            });
        }
        let mut out = BitString::zeros(side);
        for col in 0..side {
            let mut acc = 0u8;
            for row in 0..side {
                acc ^= query.get(row) & db.bit(row * side + col);
            }
            out.set(col, acc);
        }
        Ok(out)
    }

    fn selections(&self, n: usize, index: usize) -> Result<(SubsetMask, SubsetMask)> {
        let side = self.side(n)?;
        let Coords::Square(_, col) = Arrangement::Square { side }.split(index)? else {
            unreachable!()
        };
        let s = SubsetMask::singleton(side, col);
        Ok((s.clone(), s))
    }
}

/// The cube scheme: `x` arranged as a `s x s x s` cube with `s = n^(1/3)`,
/// queries are triples of subsets, and each answer bit is the xor of a slab
/// of the cube. The user xors 3 bits from each answer.
///
/// Answer bit layout is axis-major, position-major: bit `k*s + p` is the
/// subcube parity with axis `k`'s subset toggled at position `p`, xor the
/// base parity.
pub struct CubeScheme;

impl CubeScheme {
    fn side(&self, n: usize) -> Result<usize> {
        match Arrangement::exact_cube(n)? {
            Arrangement::Cube { side } => Ok(side),
            _ => unreachable!(),
        }
    }
}

impl Scheme for CubeScheme {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Cube
    }

    fn arrange(&self, x: BitString) -> Database {
        Database::cube(x)
    }

    fn params(&self, n: usize) -> Result<PirParams> {
        let side = self.side(n)?;
        Ok(PirParams {
            n,
            t: 3 * side,
            ell: 3 * side,
            b: 3,
            servers: 2,
            epsilon: 0.5,
            eta: 0.0,
        })
    }

    fn randomness_len(&self, n: usize) -> Result<usize> {
        Ok(3 * self.side(n)?)
    }

    fn queries(
        &self,
        n: usize,
        index: usize,
        randomness: &BitString,
    ) -> Result<(BitString, BitString)> {
        let side = self.side(n)?;
        if randomness.len() != 3 * side {
            return Err(Error::LengthMismatch {
                expected: 3 * side,
                actual: randomness.len(),
            });
        }
        let Coords::Cube(i1, i2, i3) = Arrangement::Cube { side }.split(index)? else {
            unreachable!()
        };
        let q0 = randomness.clone();
        let mut flip = BitString::zeros(3 * side);
        flip.set(i1, 1);
        flip.set(side + i2, 1);
        flip.set(2 * side + i3, 1);
        let q1 = randomness.xor(&flip)?;
        Ok((q0, q1))
    }

    fn answer(&self, db: &Database, query: &BitString) -> Result<BitString> {
        let Arrangement::Cube { side } = db.arrangement() else {
            return Err(Error::IncompatibleArrangement {
                n: db.arranged_len(),
                wanted: "cube",
            });
        };
        if query.len() != 3 * side {
            return Err(Error::LengthMismatch {
                expected: 3 * side,
                actual: query.len(),
            });
        }
        let axis: Vec<Vec<usize>> = (0..3)
            .map(|k| query.slice(k * side, (k + 1) * side).one_positions())
            .collect();

        // Toggling axis k at position p changes the subcube parity by the
        // parity of the slab {j_k = p} x (other axes' subsets); the base
        // parity cancels out of the emitted bit.
        let mut out = BitString::zeros(3 * side);
        for p in 0..side {
            let mut bit = 0u8;
            for &j2 in &axis[1] {
                for &j3 in &axis[2] {
                    bit ^= db.bit(p * side * side + j2 * side + j3);
                }
            }
            out.set(p, bit);

            bit = 0;
            for &j1 in &axis[0] {
                for &j3 in &axis[2] {
                    bit ^= db.bit(j1 * side * side + p * side + j3);
                }
            }
            out.set(side + p, bit);

            bit = 0;
            for &j1 in &axis[0] {
                for &j2 in &axis[1] {
                    bit ^= db.bit(j1 * side * side + j2 * side + p);
                }
            }
            out.set(2 * side + p, bit);
        }
        Ok(out)
    }

    fn selections(&self, n: usize, index: usize) -> Result<(SubsetMask, SubsetMask)> {
        let side = self.side(n)?;
        let Coords::Cube(i1, i2, i3) = Arrangement::Cube { side }.split(index)? else {
            unreachable!()
        };
        let s = SubsetMask::from_positions(3 * side, &[i1, side + i2, 2 * side + i3]);
        Ok((s.clone(), s))
    }
}

/// Runs the full protocol on one `(x, index, randomness)` triple.
///
/// `index` must address an original message bit; padded positions are
/// rejected.
pub fn run_protocol(
    scheme: &dyn Scheme,
    db: &Database,
    index: usize,
    randomness: &BitString,
) -> Result<Transcript> {
    if index >= db.message_len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: db.message_len(),
        });
    }
    let n = db.arranged_len();
    let (q0, q1) = scheme.queries(n, index, randomness)?;
    let a0 = scheme.answer(db, &q0)?;
    let a1 = scheme.answer(db, &q1)?;
    let (s0, s1) = scheme.selections(n, index)?;
    let output = scheme.reconstruct(n, index, &a0, &a1)?;
    Ok(Transcript {
        index,
        randomness: randomness.clone(),
        q0,
        q1,
        a0,
        a1,
        s0,
        s1,
        output,
    })
}

/// Default cap on privacy-audit enumeration: at most `2^24` randomness strings.
pub const DEFAULT_AUDIT_CAP_BITS: usize = 24;

/// Exact total variation distance between two query distributions,
/// as an integer fraction over the enumerated randomness space.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Tvd {
    /// Sum over queries of `|count_a - count_b|`.
    pub l1_numerator: u64,
    /// Number of randomness strings enumerated.
    pub randomness_count: u64,
}

impl Tvd {
    pub fn value(&self) -> f64 {
        self.l1_numerator as f64 / (2.0 * self.randomness_count as f64)
    }

    pub fn is_zero(&self) -> bool {
        self.l1_numerator == 0
    }
}

/// Exact TVD between the distribution of `server`'s query under `index_a`
/// versus `index_b`, by enumerating every randomness string.
pub fn audit_privacy(
    scheme: &dyn Scheme,
    n: usize,
    server: usize,
    index_a: usize,
    index_b: usize,
    cap_bits: usize,
) -> Result<Tvd> {
    if server > 1 {
        return Err(Error::InvalidParameter("server must be 0 or 1".into()));
    }
    let r_len = scheme.randomness_len(n)?;
    let t = scheme.params(n)?.t;
    if r_len > cap_bits || t > cap_bits {
        return Err(Error::EnumerationTooLarge {
            bits: r_len.max(t),
            cap_bits,
        });
    }
    let mut counts_a = vec![0u64; 1usize << t];
    let mut counts_b = vec![0u64; 1usize << t];
    for r in 0..(1usize << r_len) {
        let randomness = BitString::from_index(r, r_len);
        for (index, counts) in [(index_a, &mut counts_a), (index_b, &mut counts_b)] {
            let (q0, q1) = scheme.queries(n, index, &randomness)?;
            let q = if server == 0 { q0 } else { q1 };
            counts[q.to_index()] += 1;
        }
    }
    let l1_numerator = counts_a
        .iter()
        .zip(&counts_b)
        .map(|(&a, &b)| a.abs_diff(b))
        .sum();
    Ok(Tvd {
        l1_numerator,
        randomness_count: 1 << r_len,
    })
}
