//! Reductions from 2-query classical decoders to 1-query quantum decoders,
//! and the random-access-code sieve, simulated exactly at toy scale.
//!
//! A classical decoder arm `(j0, j1, S0, S1, f)` induces the quantum query
//! state
//! `(|j0> sum_{T in S0} |z_T> + |j1> sum_{T in S1} |z_T>) / sqrt(2^{b+1})`;
//! answering it imprints the phases `(-1)^{y_j . T}`. A branch-wise Hadamard
//! relabels that to `(|0,a0> + |1,a1>)/sqrt(2)`, which the superposed-input
//! decoder resolves with bias `1/2^{b+1}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitString;
use crate::code::{Code, DecoderArm, DecoderSpec, SmoothnessReport};
use crate::error::{Error, Result};
use crate::linalg::{subsets_up_to, StateVector};
use crate::superposed::{build_decoding_unitary, decide_from_superposition};

/// Dense cap for materialized position-times-phase registers.
const MAX_DENSE_ENTRIES: usize = 1 << 24;
/// Cap from the random-access-code construction: `m * 2^ell <= 2^16`.
pub const MAX_RAC_ENTRIES: usize = 1 << 16;

/// A state over the registers (position: dim `m`) x (phase subset: dim
/// `2^ell`), stored densely with index `j * 2^ell + T`.
#[derive(Clone, Debug)]
pub struct QueryState {
    pub m: usize,
    pub ell: usize,
    pub amps: Vec<f64>,
}

impl QueryState {
    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }
}

fn subset_int_for(positions: &[usize], selector: usize) -> usize {
    positions
        .iter()
        .enumerate()
        .filter(|(k, _)| (selector >> k) & 1 == 1)
        .fold(0usize, |acc, (_, &p)| acc | (1usize << p))
}

/// The answered query state `|Q_ir>` for one decoder arm on codeword `word`.
pub fn answered_query_state(
    arm: &DecoderArm,
    word: &[BitString],
    ell: usize,
) -> Result<QueryState> {
    let m = word.len();
    if ell >= usize::BITS as usize
        || m.checked_mul(1usize << ell)
            .is_none_or(|total| total > MAX_DENSE_ENTRIES)
    {
        return Err(Error::EnumerationTooLarge {
            bits: ell + m.max(2).ilog2() as usize,
            cap_bits: 24,
        });
    }
    if arm.j0 == arm.j1 {
        return Err(Error::InvalidParameter(
            "decoder queries must be distinct".into(),
        ));
    }
    let b = arm.s0.cardinality();
    if arm.s1.cardinality() != b {
        return Err(Error::SelectionMismatch {
            expected: b,
            actual: arm.s1.cardinality(),
        });
    }
    let mut amps = vec![0.0; m << ell];
    let scale = 1.0 / libm::sqrt((1usize << (b + 1)) as f64);
    for (j, s) in [(arm.j0, &arm.s0), (arm.j1, &arm.s1)] {
        let y = word[j].to_index();
        let positions = s.positions();
        for selector in 0..(1usize << b) {
            let t = subset_int_for(&positions, selector);
            let sign = if ((y & t).count_ones() & 1) == 0 {
                1.0
            } else {
                -1.0
            };
            amps[(j << ell) | t] = sign * scale;
        }
    }
    Ok(QueryState { m, ell, amps })
}

/// Relabels an answered query state to `(|0,a0> + |1,a1>)/sqrt(2)`: a
/// Hadamard on the `b` phase qubits of each branch, with the
/// order-preserving bijection from the selection set's sorted elements to
/// bit positions `0..b`.
pub fn relabel_to_superposed(state: &QueryState, arm: &DecoderArm) -> Result<StateVector> {
    let b = arm.s0.cardinality();
    let ell = state.ell;
    let scale = 1.0 / libm::sqrt((1usize << b) as f64);
    let mut out = StateVector::zeros(1usize << (b + 1));
    for (branch, (j, s)) in [(arm.j0, &arm.s0), (arm.j1, &arm.s1)]
        .into_iter()
        .enumerate()
    {
        let positions = s.positions();
        if positions.len() != b {
            return Err(Error::SelectionMismatch {
                expected: b,
                actual: positions.len(),
            });
        }
        for a in 0..(1usize << b) {
            let mut acc = 0.0;
            for selector in 0..(1usize << b) {
                let t = subset_int_for(&positions, selector);
                let sign = if ((a & selector).count_ones() & 1) == 0 {
                    1.0
                } else {
                    -1.0
                };
                acc += sign * state.amps[(j << ell) | t];
            }
            out.amplitudes_mut()[(branch << b) | a] = acc * scale;
        }
    }
    Ok(out)
}

/// Outcome of simulating the 1-quantum-query decoder on one arm.
#[derive(Clone, Copy, Debug)]
pub struct QuantumDecodeReport {
    /// Exact probability the quantum decoder outputs the target bit.
    pub success: f64,
    /// What the classical arm outputs on this word.
    pub classical_output: u8,
    /// Whether the classical arm is correct here (the `p` of the identity
    /// `success = (1/2 + 1/2^{b+1}) p + (1/2 - 1/2^{b+1})(1 - p)`).
    pub classical_correct: bool,
}

/// Runs the full reduction for one `(index, r)`: build the answered state,
/// relabel, and decide.
pub fn quantum_decode(
    word: &[BitString],
    decoder: &DecoderSpec,
    target_bit: u8,
    index: usize,
    r: usize,
) -> Result<QuantumDecodeReport> {
    let arm = decoder.arm(index, r)?;
    let state = answered_query_state(arm, word, decoder.ell)?;
    let psi = relabel_to_superposed(&state, arm)?;
    let du = build_decoding_unitary(&arm.f)?;
    let (p0, p1) = decide_from_superposition(&du, &psi)?;
    let success = if target_bit == 0 { p0 } else { p1 };
    let classical_output = arm.decode(word)?;
    Ok(QuantumDecodeReport {
        success,
        classical_output,
        classical_correct: classical_output == target_bit,
    })
}

/// Query-position smoothness of the induced quantum decoder, measured from
/// the nonzero-amplitude support of every answered query state.
pub fn measured_quantum_smoothness(
    code: &Code,
    decoder: &DecoderSpec,
    x: &BitString,
) -> Result<SmoothnessReport> {
    let word = code.encode(x)?;
    let mut per_index = Vec::with_capacity(decoder.n);
    let mut c_star = 0.0f64;
    for index in 0..decoder.n {
        let arms = &decoder.arms[index];
        let mut counts = vec![0u64; decoder.m];
        for arm in arms {
            let state = answered_query_state(arm, &word, decoder.ell)?;
            for (j, count) in counts.iter_mut().enumerate() {
                let support =
                    (0..(1usize << decoder.ell)).any(|t| state.amps[(j << decoder.ell) | t] != 0.0);
                if support {
                    *count += 1;
                }
            }
        }
        let total = arms.len() as f64;
        let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
        for &p in &probs {
            c_star = c_star.max(p * decoder.m as f64);
        }
        per_index.push(probs);
    }
    Ok(SmoothnessReport { c_star, per_index })
}

/// The random-access-code state `|U(x)>`: uniform over positions, each
/// carrying the `u` low-weight phase subsets with phases from the codeword.
#[derive(Clone, Debug)]
pub struct RacState {
    pub m: usize,
    pub ell: usize,
    pub b: usize,
    /// `u = sum_{i<=b} C(ell, i)`, the per-position support size.
    pub u: usize,
    pub amps: Vec<f64>,
}

impl RacState {
    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }
}

/// Builds `|U(x)>` for a code; rejects instances beyond the toy-scale cap.
pub fn rac_state(code: &Code, x: &BitString) -> Result<RacState> {
    let too_large = code.ell >= usize::BITS as usize
        || code
            .m
            .checked_mul(1usize << code.ell)
            .is_none_or(|total| total > MAX_RAC_ENTRIES);
    if too_large {
        return Err(Error::EnumerationTooLarge {
            bits: code.ell + code.m.max(2).ilog2() as usize,
            cap_bits: 16,
        });
    }
    let total = code.m << code.ell;
    let word = code.encode(x)?;
    let support = subsets_up_to(code.ell, code.b);
    let u = support.len();
    let scale = 1.0 / libm::sqrt((code.m * u) as f64);
    let mut amps = vec![0.0; total];
    for (j, entry) in word.iter().enumerate() {
        let y = entry.to_index();
        for &t in &support {
            let sign = if ((y & t).count_ones() & 1) == 0 {
                1.0
            } else {
                -1.0
            };
            amps[(j << code.ell) | t] = sign * scale;
        }
    }
    Ok(RacState {
        m: code.m,
        ell: code.ell,
        b: code.b,
        u,
        amps,
    })
}

/// Exact stage probabilities of the sieve that turns `|U(x)>` into an
/// answered decoder query.
#[derive(Clone, Copy, Debug)]
pub struct SieveReport {
    /// Smoothness envelope used for the first-stage POVM.
    pub c: f64,
    pub u: usize,
    /// Probability the position-rebalancing POVM succeeds; equals `2/c`.
    pub stage1: f64,
    /// Probability the subset projection succeeds; equals `2^b/u`.
    pub stage2: f64,
    /// Overall success flag probability `stage1 * stage2 = 2^{b+1}/(c u)`.
    pub success_flag: f64,
    /// Probability of outputting the target bit, conditioned on success.
    pub conditional_correct: f64,
}

/// Runs the two-stage sieve exactly: the POVM `{M^t M, I - M^t M}` with
/// `M = sqrt(2m/c) sum_j alpha_j |j><j| (x) I`, then (per measured `r`) the
/// projection onto the decoder's subset supports, then the quantum decoder.
pub fn rac_sieve(
    rac: &RacState,
    decoder: &DecoderSpec,
    c: f64,
    target_bit: u8,
    index: usize,
) -> Result<SieveReport> {
    if c <= 0.0 {
        return Err(Error::InvalidParameter(
            "smoothness envelope c must be positive".into(),
        ));
    }
    let arms = &decoder.arms[index];
    let r_count = arms.len();
    let m = rac.m;
    let ell = rac.ell;

    // alpha_j^2 = sum over arms querying j of p_r / 2, with uniform p_r.
    let mut alpha_sq = vec![0.0f64; m];
    for arm in arms {
        if arm.j0 == arm.j1 {
            return Err(Error::InvalidParameter(
                "decoder queries must be distinct".into(),
            ));
        }
        alpha_sq[arm.j0] += 1.0 / (2.0 * r_count as f64);
        alpha_sq[arm.j1] += 1.0 / (2.0 * r_count as f64);
    }
    let cap = c / (2.0 * m as f64);
    for (j, &a2) in alpha_sq.iter().enumerate() {
        if a2 > cap + 1e-12 {
            return Err(Error::PovmInvalid {
                position: j,
                amplitude_sq: a2,
                cap,
            });
        }
    }

    // Stage 1: measure {M^t M, I - M^t M}; success leaves |V'_i(x)>.
    let factor = 2.0 * m as f64 / c;
    let mut stage1 = 0.0;
    let mut v_prime = vec![0.0f64; m << ell];
    for j in 0..m {
        let weight = factor * alpha_sq[j];
        for t in 0..(1usize << ell) {
            let amp = rac.amps[(j << ell) | t];
            stage1 += weight * amp * amp;
            v_prime[(j << ell) | t] = libm::sqrt(weight) * amp;
        }
    }
    for v in v_prime.iter_mut() {
        *v /= libm::sqrt(stage1);
    }

    // The |0>|j> -> |phi_j>|j> relabeling spreads each position block over
    // the arms that query it; measuring r then keeps that arm's two blocks.
    let mut stage2 = 0.0;
    let mut correct_mass = 0.0;
    for arm in arms {
        let mut prob_r = 0.0;
        let mut branch_amps: Vec<f64> = vec![0.0; m << ell];
        for j in [arm.j0, arm.j1] {
            let phi_sq = (1.0 / (2.0 * r_count as f64)) / alpha_sq[j];
            let phi = libm::sqrt(phi_sq);
            for t in 0..(1usize << ell) {
                let amp = phi * v_prime[(j << ell) | t];
                branch_amps[(j << ell) | t] = amp;
                prob_r += amp * amp;
            }
        }

        // Project each branch onto the subsets of its selection set.
        let mut kept = QueryState {
            m,
            ell,
            amps: vec![0.0; m << ell],
        };
        let mut proj = 0.0;
        for (j, s) in [(arm.j0, &arm.s0), (arm.j1, &arm.s1)] {
            let positions = s.positions();
            for selector in 0..(1usize << positions.len()) {
                let t = subset_int_for(&positions, selector);
                let amp = branch_amps[(j << ell) | t];
                kept.amps[(j << ell) | t] = amp;
                proj += amp * amp;
            }
        }
        let proj_r = proj / prob_r;
        let norm = libm::sqrt(proj);
        for a in kept.amps.iter_mut() {
            *a /= norm;
        }

        let psi = relabel_to_superposed(&kept, arm)?;
        let du = build_decoding_unitary(&arm.f)?;
        let (p0, p1) = decide_from_superposition(&du, &psi)?;
        let correct = if target_bit == 0 { p0 } else { p1 };

        stage2 += prob_r * proj_r;
        correct_mass += prob_r * proj_r * correct;
    }

    Ok(SieveReport {
        c,
        u: rac.u,
        stage1,
        stage2,
        success_flag: stage1 * stage2,
        conditional_correct: correct_mass / stage2,
    })
}

/// Overall success probability with independent sieve attempts on `copies`
/// copies, flipping a fair coin when all fail.
pub fn multi_copy_overall(fail_prob: f64, conditional_correct: f64, copies: u32) -> f64 {
    let all_fail = libm::pow(fail_prob, copies as f64);
    (1.0 - all_fail) * conditional_correct + all_fail * 0.5
}

/// The copy count `ceil(c u / 2^{b+1})` that pushes the all-fail probability
/// to at most 1/2.
pub fn default_copies(c: f64, u: usize, b: usize) -> u32 {
    libm::ceil(c * u as f64 / (1usize << (b + 1)) as f64) as u32
}

/// Convenience wrapper: sieve once, then amplify over `copies` copies.
pub fn rac_multi_copy(report: &SieveReport, copies: u32) -> f64 {
    multi_copy_overall(
        1.0 - report.success_flag,
        report.conditional_correct,
        copies,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::SubsetMask;
    use crate::code::{pir_to_code, CodeKind};
    use crate::scheme::SchemeKind;
    use crate::superposed::BooleanFunction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn relabel_recovers_the_classical_answers() {
        let mut rng = ChaCha12Rng::seed_from_u64(61);
        for (kind, n) in [(SchemeKind::Square, 4usize), (SchemeKind::Cube, 8)] {
            let (code, decoder) = pir_to_code(kind.scheme(), n).unwrap();
            let x = BitString::random(n, &mut rng);
            let word = code.encode(&x).unwrap();
            for index in 0..n {
                for r in 0..decoder.randomness_count(index) {
                    let arm = decoder.arm(index, r).unwrap();
                    let qs = answered_query_state(arm, &word, decoder.ell).unwrap();
                    assert!((qs.norm_sq() - 1.0).abs() < 1e-12);
                    let psi = relabel_to_superposed(&qs, arm).unwrap();
                    // Expected: (|0,a0> + |1,a1>)/sqrt(2) with a_k the
                    // selected answer bits.
                    let a0 = crate::bits::restrict(&word[arm.j0], &arm.s0)
                        .unwrap()
                        .to_index();
                    let a1 = crate::bits::restrict(&word[arm.j1], &arm.s1)
                        .unwrap()
                        .to_index();
                    let half = 1usize << code.b;
                    let inv = 1.0 / libm::sqrt(2.0);
                    for (idx, &amp) in psi.amplitudes().iter().enumerate() {
                        let want = if idx == a0 || idx == (half | a1) {
                            inv
                        } else {
                            0.0
                        };
                        assert!((amp - want).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn quantum_success_matches_identity_square() {
        let mut rng = ChaCha12Rng::seed_from_u64(67);
        let (code, decoder) = pir_to_code(SchemeKind::Square.scheme(), 4).unwrap();
        for _ in 0..5 {
            let x = BitString::random(4, &mut rng);
            let word = code.encode(&x).unwrap();
            for index in 0..4 {
                for r in 0..decoder.randomness_count(index) {
                    let rep = quantum_decode(&word, &decoder, x.get(index), index, r).unwrap();
                    assert!(rep.classical_correct);
                    assert!((rep.success - 0.75).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn quantum_success_matches_identity_cube() {
        let mut rng = ChaCha12Rng::seed_from_u64(71);
        let (code, decoder) = pir_to_code(SchemeKind::Cube.scheme(), 8).unwrap();
        let x = BitString::random(8, &mut rng);
        let word = code.encode(&x).unwrap();
        for index in 0..8 {
            for r in 0..decoder.randomness_count(index) {
                let rep = quantum_decode(&word, &decoder, x.get(index), index, r).unwrap();
                assert!(rep.classical_correct);
                assert!((rep.success - 0.5625).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn useless_decoder_stays_useless() {
        // Two arms, one always right and one always wrong: average 1/2.
        let (code, decoder) = pir_to_code(SchemeKind::Square.scheme(), 4).unwrap();
        let x = BitString::parse("1010").unwrap();
        let word = code.encode(&x).unwrap();
        let index = 1;
        let mut wrong = decoder.clone();
        let negated: Vec<u8> = BooleanFunction::parity(1)
            .table()
            .iter()
            .map(|v| v ^ 1)
            .collect();
        wrong.arms[index][0].f = BooleanFunction::new(1, negated).unwrap();
        let right = quantum_decode(&word, &wrong, x.get(index), index, 1).unwrap();
        let flipped = quantum_decode(&word, &wrong, x.get(index), index, 0).unwrap();
        assert!(!flipped.classical_correct);
        let average = (right.success + flipped.success) / 2.0;
        assert!((average - 0.5).abs() <= 1e-9);
    }

    fn two_entry_code() -> Code {
        // n=1, m=2, ell=1: entry 0 is the message bit, entry 1 is constant 0,
        // so the parity of the two reads recovers the bit.
        let book = alloc::vec![
            alloc::vec![
                BitString::parse("0").unwrap(),
                BitString::parse("0").unwrap()
            ],
            alloc::vec![
                BitString::parse("1").unwrap(),
                BitString::parse("0").unwrap()
            ],
        ];
        Code {
            n: 1,
            m: 2,
            ell: 1,
            b: 1,
            epsilon: 0.5,
            query_bits: 0,
            kind: CodeKind::Explicit(book),
        }
    }

    #[test]
    fn rac_state_block_amplitudes() {
        let code = two_entry_code();
        let x = BitString::parse("1").unwrap();
        let rac = rac_state(&code, &x).unwrap();
        assert_eq!(rac.u, 2);
        let want = 1.0 / libm::sqrt(2.0 * rac.m as f64);
        for &a in &rac.amps {
            assert!((a.abs() - want).abs() < 1e-12);
        }
        assert!((rac.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rac_states_differ_only_in_phase() {
        let mut rng = ChaCha12Rng::seed_from_u64(73);
        let (code, _) = pir_to_code(SchemeKind::Square.scheme(), 4).unwrap();
        let x = BitString::random(4, &mut rng);
        let y = BitString::random(4, &mut rng);
        let rx = rac_state(&code, &x).unwrap();
        let ry = rac_state(&code, &y).unwrap();
        assert!((rx.norm_sq() - 1.0).abs() < 1e-12);
        for (a, b) in rx.amps.iter().zip(&ry.amps) {
            assert!((a.abs() - b.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn rac_state_rejects_oversized_codes() {
        let (code, _) = pir_to_code(SchemeKind::Cube.scheme(), 27).unwrap();
        let x = BitString::zeros(27);
        assert!(matches!(
            rac_state(&code, &x),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn sieve_stage_probabilities_square_n4() {
        let mut rng = ChaCha12Rng::seed_from_u64(79);
        let (code, decoder) = pir_to_code(SchemeKind::Square.scheme(), 4).unwrap();
        let x = BitString::random(4, &mut rng);
        let rac = rac_state(&code, &x).unwrap();
        for index in 0..4 {
            let rep = rac_sieve(&rac, &decoder, 2.0, x.get(index), index).unwrap();
            assert_eq!(rep.u, 3);
            assert!((rep.stage1 - 1.0).abs() <= 1e-9, "stage1 {}", rep.stage1);
            assert!(
                (rep.stage2 - 2.0 / 3.0).abs() <= 1e-9,
                "stage2 {}",
                rep.stage2
            );
            assert!((rep.success_flag - 2.0 / 3.0).abs() <= 1e-9);
            assert!((rep.conditional_correct - 0.75).abs() <= 1e-9);
        }
    }

    #[test]
    fn sieve_first_stage_is_two_over_c() {
        // With the looser envelope c=3 the first stage succeeds with 2/3.
        let mut rng = ChaCha12Rng::seed_from_u64(83);
        let (code, decoder) = pir_to_code(SchemeKind::Square.scheme(), 4).unwrap();
        let x = BitString::random(4, &mut rng);
        let rac = rac_state(&code, &x).unwrap();
        let rep = rac_sieve(&rac, &decoder, 3.0, x.get(0), 0).unwrap();
        assert!((rep.stage1 - 2.0 / 3.0).abs() <= 1e-9);
        assert!((rep.stage2 - 2.0 / 3.0).abs() <= 1e-9);
        assert!((rep.conditional_correct - 0.75).abs() <= 1e-9);
    }

    #[test]
    fn sieve_rejects_undersized_envelope() {
        let (code, decoder) = pir_to_code(SchemeKind::Square.scheme(), 4).unwrap();
        let x = BitString::zeros(4);
        let rac = rac_state(&code, &x).unwrap();
        assert!(matches!(
            rac_sieve(&rac, &decoder, 1.0, 0, 0),
            Err(Error::PovmInvalid { .. })
        ));
    }

    #[test]
    fn point_mass_decoder_povm_is_a_projection() {
        // One arm always querying positions 0 and 1: alpha^2 = 1/2 there,
        // and with c = 2m * max alpha^2 the POVM element becomes 0/1-diagonal.
        let code = two_entry_code();
        let f = BooleanFunction::parity(1);
        let arm = DecoderArm {
            j0: 0,
            j1: 1,
            s0: SubsetMask::singleton(1, 0),
            s1: SubsetMask::singleton(1, 0),
            f,
        };
        let decoder = DecoderSpec {
            n: 1,
            m: 2,
            ell: 1,
            b: 1,
            arms: alloc::vec![alloc::vec![arm]],
        };
        let x = BitString::parse("1").unwrap();
        let rac = rac_state(&code, &x).unwrap();
        let c = 2.0 * 2.0 * 0.5; // 2m * max alpha^2
        let rep = rac_sieve(&rac, &decoder, c, 1, 0).unwrap();
        // Projection keeps everything here: both positions are queried.
        assert!((rep.stage1 - 2.0 / c).abs() <= 1e-9);
        assert!((rep.conditional_correct - 0.75).abs() <= 1e-9);
    }

    #[test]
    fn sieve_povm_elements_are_psd() {
        // M^t M is diagonal over positions with entries (2m/c) alpha_j^2;
        // both it and its complement must have eigenvalues in [0, 1].
        use crate::linalg::{jacobi_eigen, Matrix};
        for (kind, n, c) in [
            (SchemeKind::Square, 4usize, 2.0),
            (SchemeKind::Square, 4, 3.0),
            (SchemeKind::Cube, 8, 2.0),
        ] {
            let (code, decoder) = pir_to_code(kind.scheme(), n).unwrap();
            let arms = &decoder.arms[0];
            let mut alpha_sq = alloc::vec![0.0f64; code.m];
            for arm in arms {
                alpha_sq[arm.j0] += 1.0 / (2.0 * arms.len() as f64);
                alpha_sq[arm.j1] += 1.0 / (2.0 * arms.len() as f64);
            }
            let mut mtm = Matrix::zeros(code.m, code.m);
            for (j, &a2) in alpha_sq.iter().enumerate() {
                mtm[(j, j)] = (2.0 * code.m as f64 / c) * a2;
            }
            let complement = Matrix::identity(code.m).sub(&mtm);
            for m in [mtm, complement] {
                let eig = jacobi_eigen(&m).unwrap();
                assert!(eig
                    .values
                    .iter()
                    .all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v)));
            }
        }
    }

    #[test]
    fn multi_copy_arithmetic() {
        // Formula check at q = 2/3, copies = 2.
        let overall = multi_copy_overall(2.0 / 3.0, 0.75, 2);
        assert!((overall - 23.0 / 36.0).abs() < 1e-12);
        assert!((overall - 0.6388888888888888).abs() < 1e-12);
    }

    #[test]
    fn multi_copy_on_the_square_instance() {
        let mut rng = ChaCha12Rng::seed_from_u64(89);
        let (code, decoder) = pir_to_code(SchemeKind::Square.scheme(), 4).unwrap();
        let x = BitString::random(4, &mut rng);
        let rac = rac_state(&code, &x).unwrap();
        let rep = rac_sieve(&rac, &decoder, 2.0, x.get(2), 2).unwrap();

        let copies = default_copies(2.0, rep.u, 1);
        assert_eq!(copies, 2);
        let overall = rac_multi_copy(&rep, copies);
        assert!((overall - 13.0 / 18.0).abs() <= 1e-9);
        // One copy composes the sieve directly.
        let single = rac_multi_copy(&rep, 1);
        let direct = rep.success_flag * rep.conditional_correct + (1.0 - rep.success_flag) * 0.5;
        assert!((single - direct).abs() < 1e-12);
        // Many copies converge to the conditional success rate.
        let many = rac_multi_copy(&rep, 4000);
        assert!((many - rep.conditional_correct).abs() < 1e-9);
    }

    #[test]
    fn quantum_smoothness_carries_over() {
        let mut rng = ChaCha12Rng::seed_from_u64(97);
        let (code, decoder) = pir_to_code(SchemeKind::Square.scheme(), 4).unwrap();
        let x = BitString::random(4, &mut rng);
        let report = measured_quantum_smoothness(&code, &decoder, &x).unwrap();
        assert_eq!(report.c_star, 2.0);
        for probs in &report.per_index {
            for &p in probs {
                assert!(p <= 2.0 / code.m as f64 + 1e-12);
            }
        }
    }
}
