//! Byte-exact wire framing for the networked protocol.
//!
//! Every message is `[payload length: u32 big-endian][msg type: 1 byte][payload]`.
//! Bit strings travel packed MSB-first: bit 1 of a query is the most
//! significant bit of payload byte 0, and the final byte is zero-padded.

use std::io::{Read, Write};

use pir_core::bits::BitString;
use pir_core::scheme::SchemeKind;

pub const MSG_QUERY: u8 = 0x01;
pub const MSG_ANSWER: u8 = 0x02;
pub const MSG_ERROR: u8 = 0x03;
pub const MSG_HELLO: u8 = 0x04;
pub const MSG_HELLO_ACK: u8 = 0x05;

pub const ERR_BAD_LENGTH: u8 = 0x01;
pub const ERR_SCHEME_MISMATCH: u8 = 0x02;
pub const ERR_MALFORMED: u8 = 0x03;

/// Scheme identifier on the wire; 0x00 in a HELLO means "any".
pub const SCHEME_ANY: u8 = 0x00;
pub const SCHEME_SQUARE: u8 = 0x01;
pub const SCHEME_CUBE: u8 = 0x02;

/// Refuse frames beyond this payload size.
pub const MAX_PAYLOAD: usize = 1 << 20;

#[derive(Debug, thiserror::Error)]
pub enum WireError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed frame: {0}")]
    Malformed(String),
    #[error("payload of {0} bytes exceeds the frame cap")]
    TooLarge(usize),
}

/// One framed message.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WireMessage {
    pub msg_type: u8,
    pub payload: Vec<u8>,
}

impl WireMessage {
    pub fn new(msg_type: u8, payload: Vec<u8>) -> Self {
        WireMessage { msg_type, payload }
    }

    pub fn error(code: u8) -> Self {
        WireMessage {
            msg_type: MSG_ERROR,
            payload: vec![code],
        }
    }

    /// Serializes to the exact byte layout.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(5 + self.payload.len());
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.push(self.msg_type);
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses one message from a complete byte buffer.
    pub fn from_bytes(bytes: &[u8]) -> Result<(Self, usize), WireError> {
        if bytes.len() < 5 {
            return Err(WireError::Malformed("frame shorter than its header".into()));
        }
        let len = u32::from_be_bytes(bytes[0..4].try_into().unwrap()) as usize;
        if len > MAX_PAYLOAD {
            return Err(WireError::TooLarge(len));
        }
        if bytes.len() < 5 + len {
            return Err(WireError::Malformed("frame truncated".into()));
        }
        let msg = WireMessage {
            msg_type: bytes[4],
            payload: bytes[5..5 + len].to_vec(),
        };
        Ok((msg, 5 + len))
    }
}

pub fn write_message<W: Write>(writer: &mut W, msg: &WireMessage) -> Result<(), WireError> {
    if msg.payload.len() > MAX_PAYLOAD {
        return Err(WireError::TooLarge(msg.payload.len()));
    }
    writer.write_all(&msg.to_bytes())?;
    writer.flush()?;
    Ok(())
}

pub fn read_message<R: Read>(reader: &mut R) -> Result<WireMessage, WireError> {
    let mut header = [0u8; 4];
    reader.read_exact(&mut header)?;
    let len = u32::from_be_bytes(header) as usize;
    if len > MAX_PAYLOAD {
        return Err(WireError::TooLarge(len));
    }
    let mut msg_type = [0u8; 1];
    reader.read_exact(&mut msg_type)?;
    let mut payload = vec![0u8; len];
    reader.read_exact(&mut payload)?;
    Ok(WireMessage {
        msg_type: msg_type[0],
        payload,
    })
}

/// Packs bits MSB-first, zero-padding the final byte.
pub fn pack_bits(bits: &BitString) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (pos, &bit) in bits.bits().iter().enumerate() {
        if bit == 1 {
            out[pos / 8] |= 0x80 >> (pos % 8);
        }
    }
    out
}

/// Inverse of [`pack_bits`]; rejects wrong byte counts and nonzero padding.
pub fn unpack_bits(bytes: &[u8], nbits: usize) -> Result<BitString, WireError> {
    if bytes.len() != nbits.div_ceil(8) {
        return Err(WireError::Malformed(format!(
            "expected {} bytes for {nbits} bits, got {}",
            nbits.div_ceil(8),
            bytes.len()
        )));
    }
    let mut bits = BitString::zeros(nbits);
    for pos in 0..nbits {
        if bytes[pos / 8] & (0x80 >> (pos % 8)) != 0 {
            bits.set(pos, 1);
        }
    }
    // Padding bits must be zero.
    for pos in nbits..bytes.len() * 8 {
        if bytes[pos / 8] & (0x80 >> (pos % 8)) != 0 {
            return Err(WireError::Malformed("nonzero padding bits".into()));
        }
    }
    Ok(bits)
}

/// The HELLO / HELLO_ACK payload: scheme id, database size `n` (message
/// bits), query size `t`, and answer size `ell`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Hello {
    pub scheme: u8,
    pub n: u64,
    pub t: u32,
    pub ell: u32,
}

impl Hello {
    /// A client HELLO that accepts whatever the server runs.
    pub fn any() -> Self {
        Hello {
            scheme: SCHEME_ANY,
            n: 0,
            t: 0,
            ell: 0,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(17);
        out.push(self.scheme);
        out.extend_from_slice(&self.n.to_be_bytes());
        out.extend_from_slice(&self.t.to_be_bytes());
        out.extend_from_slice(&self.ell.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        if bytes.len() != 17 {
            return Err(WireError::Malformed(format!(
                "HELLO payload of {} bytes",
                bytes.len()
            )));
        }
        Ok(Hello {
            scheme: bytes[0],
            n: u64::from_be_bytes(bytes[1..9].try_into().unwrap()),
            t: u32::from_be_bytes(bytes[9..13].try_into().unwrap()),
            ell: u32::from_be_bytes(bytes[13..17].try_into().unwrap()),
        })
    }
}

pub fn scheme_wire_id(kind: SchemeKind) -> u8 {
    match kind {
        SchemeKind::Square => SCHEME_SQUARE,
        SchemeKind::Cube => SCHEME_CUBE,
    }
}

pub fn scheme_from_wire_id(id: u8) -> Option<SchemeKind> {
    match id {
        SCHEME_SQUARE => Some(SchemeKind::Square),
        SCHEME_CUBE => Some(SchemeKind::Cube),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frame_layout_is_byte_exact() {
        let msg = WireMessage::new(MSG_QUERY, vec![0xAB, 0xCD]);
        assert_eq!(msg.to_bytes(), vec![0, 0, 0, 2, 0x01, 0xAB, 0xCD]);
    }

    #[test]
    fn packing_is_msb_first() {
        let bits = BitString::parse("10100000001").unwrap();
        let bytes = pack_bits(&bits);
        assert_eq!(bytes, vec![0b1010_0000, 0b0010_0000]);
        assert_eq!(unpack_bits(&bytes, 11).unwrap(), bits);
    }

    #[test]
    fn unpack_rejects_bad_padding() {
        assert!(unpack_bits(&[0b1010_0001], 4).is_err());
        assert!(unpack_bits(&[0x00, 0x00], 4).is_err());
    }

    #[test]
    fn hello_roundtrip() {
        let h = Hello {
            scheme: SCHEME_CUBE,
            n: 27,
            t: 9,
            ell: 9,
        };
        assert_eq!(Hello::from_bytes(&h.to_bytes()).unwrap(), h);
        assert!(Hello::from_bytes(&[0u8; 5]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn message_roundtrip(msg_type in 0u8..=255, payload in proptest::collection::vec(any::<u8>(), 0..=(1usize << 16))) {
            let msg = WireMessage::new(msg_type, payload);
            let bytes = msg.to_bytes();
            let (back, used) = WireMessage::from_bytes(&bytes).unwrap();
            prop_assert_eq!(used, bytes.len());
            prop_assert_eq!(back, msg.clone());

            let mut cursor = std::io::Cursor::new(bytes);
            let streamed = read_message(&mut cursor).unwrap();
            prop_assert_eq!(streamed, msg);
        }

        #[test]
        fn bit_packing_roundtrip(bits in proptest::collection::vec(0u8..=1, 0..200)) {
            let bs = BitString::from_bits(bits).unwrap();
            let packed = pack_bits(&bs);
            prop_assert_eq!(unpack_bits(&packed, bs.len()).unwrap(), bs);
        }
    }
}
