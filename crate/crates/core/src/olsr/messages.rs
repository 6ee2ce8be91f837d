//! HELLO and TC messages and their byte layout.
//!
//! All integers are big-endian and sets are length-prefixed with a `u16`
//! count. Sets are emitted in ascending id order so encodings are canonical.
//!
//! ```text
//! HELLO: origin u32 | n u16 | n x (neighbor u32, status u8) | m u16 | m x mpr u32
//! TC:    origin u32 | ansn u32 | n u16 | n x advertised u32
//! ```
//!
//! Link status codes: 1 = heard, 2 = symmetric.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkStatus {
    Heard,
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelloMessage {
    pub origin: NodeId,
    pub neighbors: BTreeMap<NodeId, LinkStatus>,
    pub mpr_selection: BTreeSet<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TcMessage {
    pub origin: NodeId,
    pub advertised: BTreeSet<NodeId>,
    pub ansn: u32,
    /// Carried in the packet envelope, not in the body.
    pub ttl: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("message truncated")]
    Truncated,
    #[error("{0} trailing bytes")]
    Trailing(usize),
    #[error("unknown link status {0}")]
    BadStatus(u8),
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], DecodeError> {
        if self.buf.len() < N {
            return Err(DecodeError::Truncated);
        }
        let (head, rest) = self.buf.split_at(N);
        self.buf = rest;
        Ok(head.try_into().expect("split length"))
    }

    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take::<1>()?[0])
    }

    fn u16(&mut self) -> Result<u16, DecodeError> {
        Ok(u16::from_be_bytes(self.take()?))
    }

    fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_be_bytes(self.take()?))
    }

    fn finish(self) -> Result<(), DecodeError> {
        match self.buf.len() {
            0 => Ok(()),
            n => Err(DecodeError::Trailing(n)),
        }
    }
}

impl HelloMessage {
    pub fn encode(&self) -> Vec<u8> {
        let mut out =
            Vec::with_capacity(8 + 5 * self.neighbors.len() + 4 * self.mpr_selection.len());
        out.extend_from_slice(&self.origin.0.to_be_bytes());
        out.extend_from_slice(&(self.neighbors.len() as u16).to_be_bytes());
        for (id, status) in &self.neighbors {
            out.extend_from_slice(&id.0.to_be_bytes());
            out.push(match status {
                LinkStatus::Heard => 1,
                LinkStatus::Symmetric => 2,
            });
        }
        out.extend_from_slice(&(self.mpr_selection.len() as u16).to_be_bytes());
        for id in &self.mpr_selection {
            out.extend_from_slice(&id.0.to_be_bytes());
        }
        out
    }

    pub fn decode(buf: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader { buf };
        let origin = NodeId(r.u32()?);
        let n = r.u16()?;
        let mut neighbors = BTreeMap::new();
        for _ in 0..n {
            let id = NodeId(r.u32()?);
            let status = match r.u8()? {
                1 => LinkStatus::Heard,
                2 => LinkStatus::Symmetric,
                s => return Err(DecodeError::BadStatus(s)),
            };
            neighbors.insert(id, status);
        }
        let m = r.u16()?;
        let mut mpr_selection = BTreeSet::new();
        for _ in 0..m {
            mpr_selection.insert(NodeId(r.u32()?));
        }
        r.finish()?;
        Ok(HelloMessage {
            origin,
            neighbors,
            mpr_selection,
        })
    }
}

impl TcMessage {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(10 + 4 * self.advertised.len());
        out.extend_from_slice(&self.origin.0.to_be_bytes());
        out.extend_from_slice(&self.ansn.to_be_bytes());
        out.extend_from_slice(&(self.advertised.len() as u16).to_be_bytes());
        for id in &self.advertised {
            out.extend_from_slice(&id.0.to_be_bytes());
        }
        out
    }

    pub fn decode(buf: &[u8], ttl: u8) -> Result<Self, DecodeError> {
        let mut r = Reader { buf };
        let origin = NodeId(r.u32()?);
        let ansn = r.u32()?;
        let n = r.u16()?;
        let mut advertised = BTreeSet::new();
        for _ in 0..n {
            advertised.insert(NodeId(r.u32()?));
        }
        r.finish()?;
        Ok(TcMessage {
            origin,
            advertised,
            ansn,
            ttl,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hello_layout_is_fixed() {
        let msg = HelloMessage {
            origin: NodeId(1),
            neighbors: [
                (NodeId(2), LinkStatus::Symmetric),
                (NodeId(3), LinkStatus::Heard),
            ]
            .into_iter()
            .collect(),
            mpr_selection: [NodeId(2)].into_iter().collect(),
        };
        assert_eq!(
            msg.encode(),
            vec![0, 0, 0, 1, 0, 2, 0, 0, 0, 2, 2, 0, 0, 0, 3, 1, 0, 1, 0, 0, 0, 2]
        );
    }

    #[test]
    fn tc_layout_is_fixed() {
        let msg = TcMessage {
            origin: NodeId(9),
            advertised: [NodeId(1)].into_iter().collect(),
            ansn: 258,
            ttl: 255,
        };
        assert_eq!(msg.encode(), vec![0, 0, 0, 9, 0, 0, 1, 2, 0, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(HelloMessage::decode(&[0, 0]), Err(DecodeError::Truncated));
        assert_eq!(
            HelloMessage::decode(&[0, 0, 0, 1, 0, 1, 0, 0, 0, 2, 7, 0, 0]),
            Err(DecodeError::BadStatus(7))
        );
        assert_eq!(
            TcMessage::decode(&[0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 9], 3),
            Err(DecodeError::Trailing(1))
        );
    }

    proptest! {
        #[test]
        fn hello_round_trips(origin in any::<u32>(),
                             nb in proptest::collection::btree_map(any::<u32>(), any::<bool>(), 0..40),
                             mprs in proptest::collection::btree_set(any::<u32>(), 0..20)) {
            let msg = HelloMessage {
                origin: NodeId(origin),
                neighbors: nb.into_iter().map(|(k, s)| (NodeId(k), if s { LinkStatus::Symmetric } else { LinkStatus::Heard })).collect(),
                mpr_selection: mprs.into_iter().map(NodeId).collect(),
            };
            prop_assert_eq!(HelloMessage::decode(&msg.encode()).unwrap(), msg);
        }

        #[test]
        fn tc_round_trips(origin in any::<u32>(), ansn in any::<u32>(), ttl in any::<u8>(),
                          adv in proptest::collection::btree_set(any::<u32>(), 0..40)) {
            let msg = TcMessage { origin: NodeId(origin), ansn, ttl, advertised: adv.into_iter().map(NodeId).collect() };
            prop_assert_eq!(TcMessage::decode(&msg.encode(), ttl).unwrap(), msg);
        }
    }
}
