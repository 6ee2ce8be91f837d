//! AES-128 block cipher.
//!
//! The state is the 16-byte block read column-major into a 4x4 byte matrix
//! (`state[row + 4 * col]`), i.e. the natural byte order of the block. Only
//! the 128-bit key / 10-round variant is provided.
//!
//! Encryption is an initial AddRoundKey, nine full rounds
//! (SubBytes, ShiftRows, MixColumns, AddRoundKey) and a final round that
//! omits MixColumns. Decryption runs the exact inverse: InvShiftRows,
//! InvSubBytes, AddRoundKey, InvMixColumns for the nine middle rounds and a
//! final InvShiftRows, InvSubBytes, AddRoundKey.

use thiserror::Error;

pub const BLOCK_LEN: usize = 16;
pub const KEY_LEN: usize = 16;
pub const ROUNDS: usize = 10;

pub type Block = [u8; BLOCK_LEN];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("AES-128 key must be {KEY_LEN} bytes, got {0}")]
pub struct KeyLengthError(pub usize);

const fn xtime(a: u8) -> u8 {
    (a << 1) ^ if a & 0x80 != 0 { 0x1b } else { 0 }
}

const fn gmul(mut a: u8, mut b: u8) -> u8 {
    let mut r = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            r ^= a;
        }
        a = xtime(a);
        b >>= 1;
    }
    r
}

/// Multiplicative inverse in GF(2^8) via a^254; 0 maps to 0.
const fn ginv(a: u8) -> u8 {
    let mut result = 1u8;
    let mut base = a;
    let mut e = 254u32;
    while e != 0 {
        if e & 1 != 0 {
            result = gmul(result, base);
        }
        base = gmul(base, base);
        e >>= 1;
    }
    if a == 0 {
        0
    } else {
        result
    }
}

const fn build_sbox() -> [u8; 256] {
    let mut s = [0u8; 256];
    let mut i = 0;
    while i < 256 {
        let b = ginv(i as u8);
        s[i] = b ^ b.rotate_left(1) ^ b.rotate_left(2) ^ b.rotate_left(3) ^ b.rotate_left(4) ^ 0x63;
        i += 1;
    }
    s
}

const fn invert(table: &[u8; 256]) -> [u8; 256] {
    let mut inv = [0u8; 256];
    let mut i = 0;
    while i < 256 {
        inv[table[i] as usize] = i as u8;
        i += 1;
    }
    inv
}

static SBOX: [u8; 256] = build_sbox();
static INV_SBOX: [u8; 256] = invert(&SBOX);

/// The eleven round keys expanded from a 128-bit key.
#[derive(Clone, PartialEq, Eq)]
pub struct KeySchedule {
    round_keys: [Block; ROUNDS + 1],
}

impl std::fmt::Debug for KeySchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("KeySchedule(..)")
    }
}

impl KeySchedule {
    pub fn round_keys(&self) -> &[Block] {
        &self.round_keys
    }

    pub fn round_key(&self, round: usize) -> &Block {
        &self.round_keys[round]
    }
}

pub fn expand_key(master: &[u8]) -> Result<KeySchedule, KeyLengthError> {
    let key: &[u8; KEY_LEN] = master
        .try_into()
        .map_err(|_| KeyLengthError(master.len()))?;
    let mut words = [[0u8; 4]; 4 * (ROUNDS + 1)];
    for (i, w) in words.iter_mut().take(4).enumerate() {
        w.copy_from_slice(&key[4 * i..4 * i + 4]);
    }
    let mut rcon = 1u8;
    for i in 4..words.len() {
        let mut t = words[i - 1];
        if i % 4 == 0 {
            t.rotate_left(1);
            for b in &mut t {
                *b = SBOX[*b as usize];
            }
            t[0] ^= rcon;
            rcon = xtime(rcon);
        }
        for j in 0..4 {
            words[i][j] = words[i - 4][j] ^ t[j];
        }
    }
    let mut round_keys = [[0u8; BLOCK_LEN]; ROUNDS + 1];
    for (r, rk) in round_keys.iter_mut().enumerate() {
        for c in 0..4 {
            rk[4 * c..4 * c + 4].copy_from_slice(&words[4 * r + c]);
        }
    }
    Ok(KeySchedule { round_keys })
}

fn add_round_key(state: &mut Block, rk: &Block) {
    for (s, k) in state.iter_mut().zip(rk) {
        *s ^= k;
    }
}

fn sub_bytes(state: &mut Block) {
    for b in state.iter_mut() {
        *b = SBOX[*b as usize];
    }
}

fn inv_sub_bytes(state: &mut Block) {
    for b in state.iter_mut() {
        *b = INV_SBOX[*b as usize];
    }
}

// Row r rotates left by r columns.
fn shift_rows(state: &mut Block) {
    let s = *state;
    for row in 1..4 {
        for col in 0..4 {
            state[row + 4 * col] = s[row + 4 * ((col + row) % 4)];
        }
    }
}

fn inv_shift_rows(state: &mut Block) {
    let s = *state;
    for row in 1..4 {
        for col in 0..4 {
            state[row + 4 * ((col + row) % 4)] = s[row + 4 * col];
        }
    }
}

fn mix_columns(state: &mut Block) {
    for col in state.chunks_exact_mut(4) {
        let [a0, a1, a2, a3] = [col[0], col[1], col[2], col[3]];
        col[0] = gmul(a0, 2) ^ gmul(a1, 3) ^ a2 ^ a3;
        col[1] = a0 ^ gmul(a1, 2) ^ gmul(a2, 3) ^ a3;
        col[2] = a0 ^ a1 ^ gmul(a2, 2) ^ gmul(a3, 3);
        col[3] = gmul(a0, 3) ^ a1 ^ a2 ^ gmul(a3, 2);
    }
}

fn inv_mix_columns(state: &mut Block) {
    for col in state.chunks_exact_mut(4) {
        let [a0, a1, a2, a3] = [col[0], col[1], col[2], col[3]];
        col[0] = gmul(a0, 14) ^ gmul(a1, 11) ^ gmul(a2, 13) ^ gmul(a3, 9);
        col[1] = gmul(a0, 9) ^ gmul(a1, 14) ^ gmul(a2, 11) ^ gmul(a3, 13);
        col[2] = gmul(a0, 13) ^ gmul(a1, 9) ^ gmul(a2, 14) ^ gmul(a3, 11);
        col[3] = gmul(a0, 11) ^ gmul(a1, 13) ^ gmul(a2, 9) ^ gmul(a3, 14);
    }
}

/// Encrypts one block and reports how many rounds (full + final) ran.
pub fn encrypt_block_counted(block: &Block, ks: &KeySchedule) -> (Block, usize) {
    let mut state = *block;
    let mut rounds = 0;
    add_round_key(&mut state, ks.round_key(0));
    for round in 1..ROUNDS {
        sub_bytes(&mut state);
        shift_rows(&mut state);
        mix_columns(&mut state);
        add_round_key(&mut state, ks.round_key(round));
        rounds += 1;
    }
    sub_bytes(&mut state);
    shift_rows(&mut state);
    add_round_key(&mut state, ks.round_key(ROUNDS));
    rounds += 1;
    (state, rounds)
}

pub fn encrypt_block(block: &Block, ks: &KeySchedule) -> Block {
    encrypt_block_counted(block, ks).0
}

pub fn decrypt_block_counted(block: &Block, ks: &KeySchedule) -> (Block, usize) {
    let mut state = *block;
    let mut rounds = 0;
    add_round_key(&mut state, ks.round_key(ROUNDS));
    for round in (1..ROUNDS).rev() {
        inv_shift_rows(&mut state);
        inv_sub_bytes(&mut state);
        add_round_key(&mut state, ks.round_key(round));
        inv_mix_columns(&mut state);
        rounds += 1;
    }
    inv_shift_rows(&mut state);
    inv_sub_bytes(&mut state);
    add_round_key(&mut state, ks.round_key(0));
    rounds += 1;
    (state, rounds)
}

pub fn decrypt_block(block: &Block, ks: &KeySchedule) -> Block {
    decrypt_block_counted(block, ks).0
}

/// Published AES-128 known-answer vectors (FIPS-197 appendices and
/// SP 800-38A F.1.1 block 1): `(key, plaintext, ciphertext)`.
pub const KNOWN_ANSWER_VECTORS: [(&str, &str, &str); 4] = [
    (
        "000102030405060708090a0b0c0d0e0f",
        "00112233445566778899aabbccddeeff",
        "69c4e0d86a7b0430d8cdb78070b4c55a",
    ),
    (
        "2b7e151628aed2a6abf7158809cf4f3c",
        "3243f6a8885a308d313198a2e0370734",
        "3925841d02dc09fbdc118597196a0b32",
    ),
    (
        "00000000000000000000000000000000",
        "00000000000000000000000000000000",
        "66e94bd4ef8a2c3b884cfa59ca342b2e",
    ),
    (
        "2b7e151628aed2a6abf7158809cf4f3c",
        "6bc1bee22e409f96e93d7e117393172a",
        "3ad77bb40d7a3660a89ecaf32466ef97",
    ),
];

/// Outcome of one known-answer check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfTestCase {
    pub name: String,
    pub passed: bool,
}

/// Runs the known-answer suite: each vector forward and inverse, plus the
/// round count.
pub fn self_test() -> Vec<SelfTestCase> {
    let mut out = Vec::new();
    for (i, (k, p, c)) in KNOWN_ANSWER_VECTORS.iter().enumerate() {
        let key = hex::decode(k).expect("static hex");
        let pt: Block = hex::decode(p).expect("static hex").try_into().expect("16");
        let ct: Block = hex::decode(c).expect("static hex").try_into().expect("16");
        let ks = expand_key(&key).expect("16-byte key");
        let (got, enc_rounds) = encrypt_block_counted(&pt, &ks);
        let (back, dec_rounds) = decrypt_block_counted(&ct, &ks);
        out.push(SelfTestCase {
            name: format!("kat{i}/encrypt"),
            passed: got == ct,
        });
        out.push(SelfTestCase {
            name: format!("kat{i}/decrypt"),
            passed: back == pt,
        });
        out.push(SelfTestCase {
            name: format!("kat{i}/rounds"),
            passed: enc_rounds == ROUNDS && dec_rounds == ROUNDS,
        });
    }
    out
}
