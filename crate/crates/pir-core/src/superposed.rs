//! Computing a Boolean function of two `b`-bit halves from the superposition
//! `(|0,a0> + |1,a1>)/sqrt(2)`.
//!
//! The decoding unitary sends `|a>|0>` to `(1/2^b) sum_w (-1)^{f(w,a)} |w>|0>`
//! plus a junk branch flagged `|1>`; running it controlled on the second
//! branch and measuring after a Hadamard yields `f(a0, a1)` with bias exactly
//! `1/2^{b+1}`. For parity that bias meets the trace-norm ceiling, so it is
//! optimal.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{complete_to_unitary, psd_factor, trace_norm, Matrix, StateVector};

/// A Boolean function on `2b` bits, tabulated by `(w, a)` with `w` the first
/// `b` bits: `table[(w << b) | a]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BooleanFunction {
    half_arity: usize,
    table: Vec<u8>,
}

impl BooleanFunction {
    pub fn new(half_arity: usize, table: Vec<u8>) -> Result<Self> {
        if table.len() != 1usize << (2 * half_arity) {
            return Err(Error::LengthMismatch {
                expected: 1usize << (2 * half_arity),
                actual: table.len(),
            });
        }
        if table.iter().any(|&v| v > 1) {
            return Err(Error::InvalidParameter("table value outside {0,1}".into()));
        }
        Ok(BooleanFunction { half_arity, table })
    }

    /// Parity of all `2b` input bits.
    pub fn parity(half_arity: usize) -> Self {
        let table = (0..1usize << (2 * half_arity))
            .map(|v| (v.count_ones() & 1) as u8)
            .collect();
        BooleanFunction { half_arity, table }
    }

    pub fn constant(half_arity: usize, value: u8) -> Self {
        BooleanFunction {
            half_arity,
            table: vec![value & 1; 1usize << (2 * half_arity)],
        }
    }

    /// Builds from the table packed into an integer: bit `k` of `packed` is
    /// the output at table index `k`.
    pub fn from_packed(half_arity: usize, packed: u64) -> Result<Self> {
        let size = 1usize << (2 * half_arity);
        if size > 64 {
            return Err(Error::InvalidParameter(
                "packed tables support 2b <= 6".into(),
            ));
        }
        if size < 64 && (packed >> size) != 0 {
            return Err(Error::InvalidParameter(
                "packed table has bits beyond 2^(2b)".into(),
            ));
        }
        let table = (0..size).map(|k| ((packed >> k) & 1) as u8).collect();
        Ok(BooleanFunction { half_arity, table })
    }

    /// Parses a hex table of any length, bit `k` of the value = output at
    /// index `k`; leading zero digits may be omitted.
    pub fn from_hex(half_arity: usize, hex: &str) -> Result<Self> {
        let hex = hex.strip_prefix("0x").unwrap_or(hex);
        if hex.is_empty() {
            return Err(Error::InvalidParameter("empty hex table".into()));
        }
        let size = 1usize << (2 * half_arity);
        let mut table = vec![0u8; size];
        for (digit_pos, ch) in hex.chars().rev().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::InvalidParameter("bad hex table".into()))?;
            for bit in 0..4 {
                if nibble >> bit & 1 == 1 {
                    let k = digit_pos * 4 + bit;
                    if k >= size {
                        return Err(Error::InvalidParameter(
                            "hex table has bits beyond 2^(2b)".into(),
                        ));
                    }
                    table[k] = 1;
                }
            }
        }
        Ok(BooleanFunction { half_arity, table })
    }

    pub fn to_hex(&self) -> String {
        let mut digits: Vec<char> = self
            .table
            .chunks(4)
            .map(|chunk| {
                let nibble = chunk
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (bit, &v)| acc | ((v as u32) << bit));
                char::from_digit(nibble, 16).expect("nibble in range")
            })
            .collect();
        while digits.len() > 1 && digits.last() == Some(&'0') {
            digits.pop();
        }
        digits.iter().rev().collect()
    }

    pub fn half_arity(&self) -> usize {
        self.half_arity
    }

    pub fn arity(&self) -> usize {
        2 * self.half_arity
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    /// `f(w, a)` with both halves as `b`-bit integers.
    pub fn eval(&self, w: usize, a: usize) -> u8 {
        self.table[(w << self.half_arity) | a]
    }

    pub fn is_parity(&self) -> bool {
        self.table
            .iter()
            .enumerate()
            .all(|(v, &out)| out == (v.count_ones() & 1) as u8)
    }
}

/// The correlation matrix `C_{aa'} = (1/2^{2b}) sum_w (-1)^{f(w,a)+f(w,a')}`.
///
/// Symmetric, diagonal `1/2^b`, and `lambda_max <= 1` by the row-sum bound,
/// so `I - C` is always PSD.
pub fn gram_matrix(f: &BooleanFunction) -> Matrix {
    let b = f.half_arity();
    let dim = 1usize << b;
    let scale = 1.0 / ((dim * dim) as f64);
    let mut c = Matrix::zeros(dim, dim);
    for a0 in 0..dim {
        for a1 in a0..dim {
            let mut acc = 0i64;
            for w in 0..dim {
                acc += if f.eval(w, a0) == f.eval(w, a1) {
                    1
                } else {
                    -1
                };
            }
            let v = acc as f64 * scale;
            c[(a0, a1)] = v;
            c[(a1, a0)] = v;
        }
    }
    c
}

/// The decoding unitary for `f`, together with the junk states that make the
/// specified columns orthonormal.
///
/// Basis layout on `b+1` qubits: index `(flag << b) | w`, so the `f`-phase
/// amplitudes occupy the first `2^b` rows and the specified columns are the
/// first `2^b` columns.
pub struct DecodingUnitary {
    pub f: BooleanFunction,
    pub unitary: Matrix,
    /// Column `a` is the unnormalized junk state `|phi_a>`.
    pub junk: Matrix,
}

impl DecodingUnitary {
    pub fn half_arity(&self) -> usize {
        self.f.half_arity()
    }
}

/// Builds the decoding unitary: specified column `a` is
/// `(1/2^b) sum_w (-1)^{f(w,a)} |w>|0> + |phi_a>|1>` with `|phi_a>` the `a`-th
/// column of a factor of `I - C`; the rest is filled by unitary completion.
pub fn build_decoding_unitary(f: &BooleanFunction) -> Result<DecodingUnitary> {
    let b = f.half_arity();
    let half = 1usize << b;
    let dim = 2 * half;

    let c = gram_matrix(f);
    let junk = psd_factor(&Matrix::identity(half).sub(&c))?;

    let scale = 1.0 / half as f64;
    let mut columns = Vec::with_capacity(half);
    for a in 0..half {
        let mut col = vec![0.0; dim];
        for w in 0..half {
            let sign = if f.eval(w, a) == 0 { 1.0 } else { -1.0 };
            col[w] = sign * scale;
            col[half + w] = junk[(w, a)];
        }
        columns.push((a, col));
    }
    let unitary = complete_to_unitary(&columns, dim)?;
    Ok(DecodingUnitary {
        f: f.clone(),
        unitary,
        junk,
    })
}

/// Runs the decision circuit on an arbitrary control-plus-data state of
/// dimension `2^{b+1}` (index `(control << b) | a`): extend by a flag qubit,
/// apply `|0><0| (x) I + |1><1| (x) U`, Hadamard the control, and measure it.
///
/// Returns the probabilities of measuring 0 and 1.
pub fn decide_from_superposition(du: &DecodingUnitary, state: &StateVector) -> Result<(f64, f64)> {
    let b = du.half_arity();
    let half = 1usize << b;
    let sub = 2 * half; // b+1 qubits seen by U
    if state.dim() != 2 * half {
        return Err(Error::DimensionMismatch {
            expected: 2 * half,
            actual: state.dim(),
        });
    }

    // Embed with flag |0>: full index = (control << (b+1)) | (flag << b) | w.
    let mut amps = vec![0.0; 2 * sub];
    for control in 0..2 {
        for a in 0..half {
            amps[control * sub + a] = state.amplitudes()[(control << b) | a];
        }
    }

    // Controlled-U on the control=1 block.
    let block = du.unitary.apply(&amps[sub..]);
    amps[sub..].copy_from_slice(&block);

    // Hadamard on the control qubit.
    let inv_sqrt2 = 1.0 / libm::sqrt(2.0);
    for v in 0..sub {
        let x0 = amps[v];
        let x1 = amps[sub + v];
        amps[v] = (x0 + x1) * inv_sqrt2;
        amps[sub + v] = (x0 - x1) * inv_sqrt2;
    }

    let p0: f64 = amps[..sub].iter().map(|a| a * a).sum();
    let p1: f64 = amps[sub..].iter().map(|a| a * a).sum();
    Ok((p0, p1))
}

/// Probability that the algorithm outputs `f(a0, a1)` given one copy of
/// `(|0,a0> + |1,a1>)/sqrt(2)`; equals `1/2 + 1/2^{b+1}` for every `f`.
pub fn success_probability(du: &DecodingUnitary, a0: usize, a1: usize) -> Result<f64> {
    let b = du.half_arity();
    let half = 1usize << b;
    if a0 >= half || a1 >= half {
        return Err(Error::IndexOutOfRange {
            index: a0.max(a1),
            len: half,
        });
    }
    let mut psi = StateVector::zeros(2 * half);
    let inv_sqrt2 = 1.0 / libm::sqrt(2.0);
    psi.amplitudes_mut()[a0] = inv_sqrt2;
    psi.amplitudes_mut()[half | a1] = inv_sqrt2;
    let (p0, p1) = decide_from_superposition(du, &psi)?;
    Ok(if du.f.eval(a0, a1) == 0 { p0 } else { p1 })
}

/// One-call form of [`success_probability`].
pub fn superposed_success_prob(f: &BooleanFunction, a0: usize, a1: usize) -> Result<f64> {
    let du = build_decoding_unitary(f)?;
    success_probability(&du, a0, a1)
}

/// The mixed states `rho_0, rho_1` that average `|Psi_{a0a1}>` over
/// `f^{-1}(0)` and `f^{-1}(1)` for the `2b`-bit parity, each normalized by
/// the class size `2^{2b-1}`.
pub fn parity_ensembles(b: usize) -> (Matrix, Matrix) {
    let f = BooleanFunction::parity(b);
    let half = 1usize << b;
    let dim = 2 * half;
    let inv_sqrt2 = 1.0 / libm::sqrt(2.0);
    let scale = 1.0 / (1usize << (2 * b - 1)) as f64;
    let mut rho = [Matrix::zeros(dim, dim), Matrix::zeros(dim, dim)];
    for a0 in 0..half {
        for a1 in 0..half {
            let mut psi = StateVector::zeros(dim);
            psi.amplitudes_mut()[a0] = inv_sqrt2;
            psi.amplitudes_mut()[half | a1] = inv_sqrt2;
            let c = f.eval(a0, a1) as usize;
            rho[c] = rho[c].add(&psi.projector().scale(scale));
        }
    }
    let [rho0, rho1] = rho;
    (rho0, rho1)
}

/// `|| rho_0 - rho_1 ||_tr` for the parity ensembles; equals `2/2^b`, which
/// caps any decoder's bias at `1/2^{b+1}`.
pub fn parity_distinguishability(b: usize) -> Result<f64> {
    if b == 0 {
        return Err(Error::InvalidParameter("b must be at least 1".into()));
    }
    let (rho0, rho1) = parity_ensembles(b);
    trace_norm(&rho0.sub(&rho1))
}

/// The best-achievable bias for deciding `f` from `|Psi_{a0a1}>` with a
/// uniform input prior: `|| pi_0 rho_0 - pi_1 rho_1 ||_tr / 2`.
///
/// For balanced `f` (parity in particular) this is the familiar
/// `|| rho_0 - rho_1 ||_tr / 4`.
pub fn distinguishability_ceiling(f: &BooleanFunction) -> Result<f64> {
    let b = f.half_arity();
    let half = 1usize << b;
    let dim = 2 * half;
    let inv_sqrt2 = 1.0 / libm::sqrt(2.0);
    let scale = 1.0 / (1usize << (2 * b)) as f64;
    let mut diff = Matrix::zeros(dim, dim);
    for a0 in 0..half {
        for a1 in 0..half {
            let mut psi = StateVector::zeros(dim);
            psi.amplitudes_mut()[a0] = inv_sqrt2;
            psi.amplitudes_mut()[half | a1] = inv_sqrt2;
            let sign = if f.eval(a0, a1) == 0 { scale } else { -scale };
            diff = diff.add(&psi.projector().scale(sign));
        }
    }
    Ok(trace_norm(&diff)? / 2.0)
}
