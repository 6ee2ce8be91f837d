//! AES-128 and packet sealing.

pub mod aes;
pub mod seal;

pub use aes::{
    decrypt_block, encrypt_block, expand_key, self_test, Block, KeyLengthError, KeySchedule,
};
pub use seal::{AuthFailure, Nonce, PacketKey, SealError, Sealer, Tag, TAG_LEN};
