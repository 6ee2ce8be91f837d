//! Packet sealing: AES-128 counter mode for confidentiality and a truncated
//! CBC-MAC for authentication.
//!
//! The MAC input is `nonce | lengths block | header (zero-padded) | ciphertext
//! (zero-padded)`. The lengths block carries both lengths, which makes the
//! encoding prefix-free. Encryption and MAC use separate schedules: the MAC
//! key is the encryption of a fixed label under the master key.

use std::collections::HashSet;

use thiserror::Error;

use super::aes::{encrypt_block, expand_key, Block, KeyLengthError, KeySchedule, BLOCK_LEN};
use crate::NodeId;

pub const TAG_LEN: usize = 8;
pub type Tag = [u8; TAG_LEN];

const MAC_KEY_LABEL: Block = *b"secmanet-mac-key";

/// `origin (4) | seq (4) | 8 zero bytes`. The zero half holds the block
/// counter in counter mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Nonce([u8; BLOCK_LEN]);

impl Nonce {
    pub fn new(origin: NodeId, seq: u32) -> Self {
        let mut b = [0u8; BLOCK_LEN];
        b[..4].copy_from_slice(&origin.0.to_be_bytes());
        b[4..8].copy_from_slice(&seq.to_be_bytes());
        Nonce(b)
    }

    pub fn as_bytes(&self) -> &[u8; BLOCK_LEN] {
        &self.0
    }

    fn counter_block(&self, counter: u64) -> Block {
        let mut b = self.0;
        b[8..].copy_from_slice(&counter.to_be_bytes());
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SealError {
    #[error("nonce reused for origin {origin} seq {seq}")]
    NonceReuse { origin: NodeId, seq: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("authentication failure")]
pub struct AuthFailure;

/// Encryption and MAC schedules derived from one 128-bit master key.
#[derive(Clone, Debug)]
pub struct PacketKey {
    enc: KeySchedule,
    mac: KeySchedule,
}

impl PacketKey {
    pub fn new(master: &[u8]) -> Result<Self, KeyLengthError> {
        let enc = expand_key(master)?;
        let mac = expand_key(&encrypt_block(&MAC_KEY_LABEL, &enc))?;
        Ok(PacketKey { enc, mac })
    }

    fn keystream_xor(&self, nonce: &Nonce, data: &mut [u8]) {
        for (i, chunk) in data.chunks_mut(BLOCK_LEN).enumerate() {
            let ks = encrypt_block(&nonce.counter_block(i as u64), &self.enc);
            for (d, k) in chunk.iter_mut().zip(ks) {
                *d ^= k;
            }
        }
    }

    fn mac(&self, nonce: &Nonce, header: &[u8], body: &[u8]) -> Tag {
        let mut state = [0u8; BLOCK_LEN];
        let mut absorb = |block: &[u8]| {
            for (s, b) in state.iter_mut().zip(block) {
                *s ^= b;
            }
            state = encrypt_block(&state, &self.mac);
        };
        absorb(nonce.as_bytes());
        let mut lens = [0u8; BLOCK_LEN];
        lens[..4].copy_from_slice(&(header.len() as u32).to_be_bytes());
        lens[4..8].copy_from_slice(&(body.len() as u32).to_be_bytes());
        absorb(&lens);
        for part in [header, body] {
            for chunk in part.chunks(BLOCK_LEN) {
                let mut b = [0u8; BLOCK_LEN];
                b[..chunk.len()].copy_from_slice(chunk);
                absorb(&b);
            }
        }
        let mut tag = [0u8; TAG_LEN];
        tag.copy_from_slice(&state[..TAG_LEN]);
        tag
    }

    /// Seals `payload`. With `encrypt == false` the body travels in the clear
    /// but is still covered by the tag.
    pub fn seal(
        &self,
        nonce: &Nonce,
        header: &[u8],
        payload: &[u8],
        encrypt: bool,
    ) -> (Vec<u8>, Tag) {
        let mut body = payload.to_vec();
        if encrypt {
            self.keystream_xor(nonce, &mut body);
        }
        let tag = self.mac(nonce, header, &body);
        (body, tag)
    }

    /// Verifies the tag before releasing any plaintext.
    pub fn open(
        &self,
        nonce: &Nonce,
        header: &[u8],
        body: &[u8],
        tag: &Tag,
        encrypted: bool,
    ) -> Result<Vec<u8>, AuthFailure> {
        if self.mac(nonce, header, body) != *tag {
            return Err(AuthFailure);
        }
        let mut out = body.to_vec();
        if encrypted {
            self.keystream_xor(nonce, &mut out);
        }
        Ok(out)
    }

    pub fn verify(&self, nonce: &Nonce, header: &[u8], body: &[u8], tag: &Tag) -> bool {
        self.mac(nonce, header, body) == *tag
    }
}

/// Per-node sealing context that refuses to reuse a nonce.
#[derive(Debug, Clone)]
pub struct Sealer {
    key: PacketKey,
    used: HashSet<(NodeId, u32)>,
}

impl Sealer {
    pub fn new(key: PacketKey) -> Self {
        Sealer {
            key,
            used: HashSet::new(),
        }
    }

    pub fn key(&self) -> &PacketKey {
        &self.key
    }

    pub fn seal(
        &mut self,
        origin: NodeId,
        seq: u32,
        header: &[u8],
        payload: &[u8],
        encrypt: bool,
    ) -> Result<(Vec<u8>, Tag), SealError> {
        if !self.used.insert((origin, seq)) {
            return Err(SealError::NonceReuse { origin, seq });
        }
        Ok(self
            .key
            .seal(&Nonce::new(origin, seq), header, payload, encrypt))
    }
}
