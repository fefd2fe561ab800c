//! Bit strings, subset masks, and square/cube database arrangements.
//!
//! All indices in this crate are 0-based; user-facing layers convert to the
//! 1-based convention at their boundary.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::error::{Error, Result};

/// An ordered sequence of bits, each stored as a `u8` in `{0, 1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    /// All-zero string of the given length.
    pub fn zeros(len: usize) -> Self {
        BitString { bits: vec![0; len] }
    }

    /// Builds from raw bits, rejecting values outside `{0, 1}`.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParameter("bit value outside {0,1}".into()));
        }
        Ok(BitString { bits })
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => return Err(Error::InvalidParameter("expected only '0' or '1'".into())),
            }
        }
        Ok(BitString { bits })
    }

    /// The unit string `e_pos`: a single 1 at `pos`.
    pub fn unit(len: usize, pos: usize) -> Self {
        assert!(pos < len, "unit position {pos} out of range {len}");
        let mut bits = vec![0; len];
        bits[pos] = 1;
        BitString { bits }
    }

    /// Decodes an integer into bits, with bit `p` of `value` at position `p`.
    pub fn from_index(value: usize, len: usize) -> Self {
        assert!(len >= usize::BITS as usize || value < (1usize << len));
        let bits = (0..len).map(|p| ((value >> p) & 1) as u8).collect();
        BitString { bits }
    }

    /// Inverse of [`BitString::from_index`].
    pub fn to_index(&self) -> usize {
        assert!(self.len() <= usize::BITS as usize);
        self.bits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (p, &b)| acc | ((b as usize) << p))
    }

    /// Uniformly random string of the given length.
    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        let bits = (0..len).map(|_| (rng.next_u32() & 1) as u8).collect();
        BitString { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, pos: usize) -> u8 {
        self.bits[pos]
    }

    pub fn set(&mut self, pos: usize, bit: u8) {
        assert!(bit <= 1);
        self.bits[pos] = bit;
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Positions holding a 1, in increasing order.
    pub fn one_positions(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(p, &b)| (b == 1).then_some(p))
            .collect()
    }

    /// Bitwise xor; both strings must have the same length.
    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(BitString { bits })
    }

    /// Bitwise complement.
    pub fn flipped(&self) -> BitString {
        BitString {
            bits: self.bits.iter().map(|b| b ^ 1).collect(),
        }
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    /// The sub-string `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString {
            bits: self.bits[start..end].to_vec(),
        }
    }

    /// Extends with zeros up to `len`.
    pub fn zero_padded(&self, len: usize) -> BitString {
        assert!(len >= self.len());
        let mut bits = self.bits.clone();
        bits.resize(len, 0);
        BitString { bits }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Inner product mod 2 of two equal-length bit strings.
pub fn inner_product_mod2(a: &BitString, b: &BitString) -> Result<u8> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.bits
        .iter()
        .zip(&b.bits)
        .fold(0, |acc, (x, y)| acc ^ (x & y)))
}

/// A subset of `[len]` stored as its indicator bit string.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubsetMask {
    mask: BitString,
}

impl SubsetMask {
    pub fn new(mask: BitString) -> Self {
        SubsetMask { mask }
    }

    pub fn empty(len: usize) -> Self {
        SubsetMask {
            mask: BitString::zeros(len),
        }
    }

    pub fn singleton(len: usize, pos: usize) -> Self {
        SubsetMask {
            mask: BitString::unit(len, pos),
        }
    }

    pub fn from_positions(len: usize, positions: &[usize]) -> Self {
        let mut mask = BitString::zeros(len);
        for &p in positions {
            mask.set(p, 1);
        }
        SubsetMask { mask }
    }

    /// Interprets an integer as a subset: bit `p` of `index` is membership of `p`.
    pub fn from_subset_index(len: usize, index: usize) -> Self {
        SubsetMask {
            mask: BitString::from_index(index, len),
        }
    }

    /// Inverse of [`SubsetMask::from_subset_index`].
    pub fn subset_index(&self) -> usize {
        self.mask.to_index()
    }

    /// Size of the ambient set `[len]`.
    pub fn universe_len(&self) -> usize {
        self.mask.len()
    }

    pub fn cardinality(&self) -> usize {
        self.mask.count_ones()
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.mask.get(pos) == 1
    }

    /// Member positions in increasing order.
    pub fn positions(&self) -> Vec<usize> {
        self.mask.one_positions()
    }

    pub fn mask(&self) -> &BitString {
        &self.mask
    }
}

/// The string `a` restricted to the positions in `s`, in increasing order.
pub fn restrict(a: &BitString, s: &SubsetMask) -> Result<BitString> {
    if a.len() != s.universe_len() {
        return Err(Error::LengthMismatch {
            expected: s.universe_len(),
            actual: a.len(),
        });
    }
    let bits = s.positions().into_iter().map(|p| a.get(p)).collect();
    Ok(BitString { bits })
}

/// How database bits are laid out: flat, as a square, or as a cube.
///
/// Square and cube layouts are row-major: for a square of side `s`, index
/// `i` maps to `(i / s, i % s)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Arrangement {
    Flat { len: usize },
    Square { side: usize },
    Cube { side: usize },
}

fn int_sqrt(n: usize) -> usize {
    let mut s = libm::sqrt(n as f64) as usize;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

fn int_cbrt(n: usize) -> usize {
    let mut s = libm::cbrt(n as f64) as usize;
    while s > 0 && s * s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

impl Arrangement {
    /// Square arrangement for an exact perfect square `n`.
    pub fn exact_square(n: usize) -> Result<Self> {
        let s = int_sqrt(n);
        if s * s != n {
            return Err(Error::IncompatibleArrangement {
                n,
                wanted: "square",
            });
        }
        Ok(Arrangement::Square { side: s })
    }

    /// Cube arrangement for an exact perfect cube `n`.
    pub fn exact_cube(n: usize) -> Result<Self> {
        let s = int_cbrt(n);
        if s * s * s != n {
            return Err(Error::IncompatibleArrangement { n, wanted: "cube" });
        }
        Ok(Arrangement::Cube { side: s })
    }

    /// Smallest square arrangement covering `n` bits.
    pub fn covering_square(n: usize) -> Self {
        let mut s = int_sqrt(n);
        if s * s < n {
            s += 1;
        }
        Arrangement::Square { side: s.max(1) }
    }

    /// Smallest cube arrangement covering `n` bits.
    pub fn covering_cube(n: usize) -> Self {
        let mut s = int_cbrt(n);
        if s * s * s < n {
            s += 1;
        }
        Arrangement::Cube { side: s.max(1) }
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        match *self {
            Arrangement::Flat { len } => len,
            Arrangement::Square { side } => side * side,
            Arrangement::Cube { side } => side * side * side,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Splits a flat index into row-major coordinates.
    pub fn split(&self, index: usize) -> Result<Coords> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            });
        }
        Ok(match *self {
            Arrangement::Flat { .. } => Coords::Flat(index),
            Arrangement::Square { side } => Coords::Square(index / side, index % side),
            Arrangement::Cube { side } => {
                Coords::Cube(index / (side * side), (index / side) % side, index % side)
            }
        })
    }

    /// Inverse of [`Arrangement::split`].
    pub fn join(&self, coords: Coords) -> Result<usize> {
        let index = match (*self, coords) {
            (Arrangement::Flat { .. }, Coords::Flat(i)) => i,
            (Arrangement::Square { side }, Coords::Square(r, c)) => {
                if r >= side || c >= side {
                    return Err(Error::IndexOutOfRange {
                        index: r.max(c),
                        len: side,
                    });
                }
                r * side + c
            }
            (Arrangement::Cube { side }, Coords::Cube(a, b, c)) => {
                if a >= side || b >= side || c >= side {
                    return Err(Error::IndexOutOfRange {
                        index: a.max(b).max(c),
                        len: side,
                    });
                }
                a * side * side + b * side + c
            }
            _ => return Err(Error::InvalidParameter("coordinate rank mismatch".into())),
        };
        Ok(index)
    }
}

/// Row-major coordinates of a database cell.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Coords {
    Flat(usize),
    Square(usize, usize),
    Cube(usize, usize, usize),
}

/// An `n`-bit database together with its arrangement.
///
/// If the message length is not an exact square/cube, the bits are zero-padded
/// up to the next one; queries for padded indices are rejected by the
/// protocol layer.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Database {
    bits: BitString,
    arrangement: Arrangement,
    message_len: usize,
}

impl Database {
    pub fn flat(x: BitString) -> Self {
        let len = x.len();
        Database {
            bits: x,
            arrangement: Arrangement::Flat { len },
            message_len: len,
        }
    }

    pub fn square(x: BitString) -> Self {
        let arrangement = Arrangement::covering_square(x.len());
        let message_len = x.len();
        Database {
            bits: x.zero_padded(arrangement.len()),
            arrangement,
            message_len,
        }
    }

    pub fn cube(x: BitString) -> Self {
        let arrangement = Arrangement::covering_cube(x.len());
        let message_len = x.len();
        Database {
            bits: x.zero_padded(arrangement.len()),
            arrangement,
            message_len,
        }
    }

    /// Length of the original message, before padding.
    pub fn message_len(&self) -> usize {
        self.message_len
    }

    /// Length including padding; always an exact square/cube for those layouts.
    pub fn arranged_len(&self) -> usize {
        self.arrangement.len()
    }

    pub fn arrangement(&self) -> Arrangement {
        self.arrangement
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    /// Bit at an arranged (possibly padded) index.
    pub fn bit(&self, index: usize) -> u8 {
        self.bits.get(index)
    }

    /// Bitwise xor of two databases with identical shape.
    pub fn xor(&self, other: &Database) -> Result<Database> {
        if self.arrangement != other.arrangement {
            return Err(Error::InvalidParameter("arrangement mismatch".into()));
        }
        Ok(Database {
            bits: self.bits.xor(&other.bits)?,
            arrangement: self.arrangement,
            message_len: self.message_len.max(other.message_len),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn restrict_matches_worked_example() {
        // 11001 restricted to {1,4,5} (1-based) is 101.
        let a = BitString::parse("11001").unwrap();
        let s = SubsetMask::from_positions(5, &[0, 3, 4]);
        assert_eq!(restrict(&a, &s).unwrap(), BitString::parse("101").unwrap());
    }

    #[test]
    fn restrict_empty_and_identity() {
        let a = BitString::parse("1010").unwrap();
        assert!(restrict(&a, &SubsetMask::empty(4)).unwrap().is_empty());
        let all = SubsetMask::from_positions(4, &[0, 1, 2, 3]);
        assert_eq!(restrict(&a, &all).unwrap(), a);
    }

    #[test]
    fn restrict_rejects_length_mismatch() {
        let a = BitString::parse("101").unwrap();
        let s = SubsetMask::empty(4);
        assert!(matches!(
            restrict(&a, &s),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn inner_product_examples() {
        let e3 = BitString::unit(4, 2); // e_3 in 1-based terms
        let b = BitString::parse("0110").unwrap();
        assert_eq!(inner_product_mod2(&e3, &b).unwrap(), 1);

        let zero = BitString::zeros(4);
        assert_eq!(inner_product_mod2(&zero, &b).unwrap(), 0);

        // 1*1 + 1*0 + 0*1 + 1*1 = 2 = 0 mod 2
        let a = BitString::parse("1101").unwrap();
        let c = BitString::parse("1011").unwrap();
        assert_eq!(inner_product_mod2(&a, &c).unwrap(), 0);
    }

    #[test]
    fn split_square_examples() {
        let arr = Arrangement::exact_square(16).unwrap();
        // 1-based index 1 -> (1,1); 0-based 0 -> (0,0)
        assert_eq!(arr.split(0).unwrap(), Coords::Square(0, 0));
        // 1-based index 7 -> (2,3); 0-based 6 -> (1,2)
        assert_eq!(arr.split(6).unwrap(), Coords::Square(1, 2));
    }

    #[test]
    fn split_square_against_enumeration_oracle() {
        // Row-major oracle: walk the 4x4 grid cell by cell.
        let arr = Arrangement::exact_square(16).unwrap();
        let mut i = 0;
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(arr.split(i).unwrap(), Coords::Square(r, c));
                assert_eq!(arr.join(Coords::Square(r, c)).unwrap(), i);
                i += 1;
            }
        }
    }

    #[test]
    fn split_cube_last_element() {
        let arr = Arrangement::exact_cube(27).unwrap();
        // 1-based index 27 -> (3,3,3); 0-based 26 -> (2,2,2)
        assert_eq!(arr.split(26).unwrap(), Coords::Cube(2, 2, 2));
    }

    #[test]
    fn exact_arrangements_reject_non_powers() {
        assert!(matches!(
            Arrangement::exact_square(15),
            Err(Error::IncompatibleArrangement { .. })
        ));
        assert!(matches!(
            Arrangement::exact_cube(26),
            Err(Error::IncompatibleArrangement { .. })
        ));
    }

    #[test]
    fn split_join_roundtrip_exhaustive() {
        for n in 1..=64usize {
            let mut arrangements = alloc::vec![Arrangement::Flat { len: n }];
            if let Ok(a) = Arrangement::exact_square(n) {
                arrangements.push(a);
            }
            if let Ok(a) = Arrangement::exact_cube(n) {
                arrangements.push(a);
            }
            for arr in arrangements {
                for i in 0..n {
                    assert_eq!(arr.join(arr.split(i).unwrap()).unwrap(), i);
                }
            }
        }
    }

    #[test]
    fn database_padding_and_message_len() {
        let x = BitString::parse("10110").unwrap();
        let db = Database::square(x.clone());
        assert_eq!(db.message_len(), 5);
        assert_eq!(db.arranged_len(), 9);
        for i in 5..9 {
            assert_eq!(db.bit(i), 0);
        }
        let db = Database::cube(x);
        assert_eq!(db.arranged_len(), 8);
    }

    #[test]
    fn subset_index_roundtrip() {
        for idx in 0..16 {
            let s = SubsetMask::from_subset_index(4, idx);
            assert_eq!(s.subset_index(), idx);
            assert_eq!(s.cardinality(), (idx as u32).count_ones() as usize);
        }
    }

    #[test]
    fn random_bitstring_is_seeded() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let a = BitString::random(32, &mut rng);
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let b = BitString::random(32, &mut rng);
        assert_eq!(a, b);
    }

    fn bitstring_strategy(len: usize) -> impl Strategy<Value = BitString> {
        proptest::collection::vec(0u8..=1, len).prop_map(|bits| BitString::from_bits(bits).unwrap())
    }

    proptest! {
        #[test]
        fn restrict_is_linear(
            a in bitstring_strategy(12),
            b in bitstring_strategy(12),
            mask in 0usize..(1 << 12),
        ) {
            let s = SubsetMask::from_subset_index(12, mask);
            let lhs = restrict(&a.xor(&b).unwrap(), &s).unwrap();
            let rhs = restrict(&a, &s).unwrap().xor(&restrict(&b, &s).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn inner_product_is_linear(
            a in bitstring_strategy(16),
            b in bitstring_strategy(16),
            c in bitstring_strategy(16),
        ) {
            let lhs = inner_product_mod2(&a.xor(&b).unwrap(), &c).unwrap();
            let rhs = inner_product_mod2(&a, &c).unwrap() ^ inner_product_mod2(&b, &c).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
