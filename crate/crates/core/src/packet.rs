//! The single wire unit exchanged between nodes.

use serde::{Deserialize, Serialize};

use crate::crypto::{Nonce, PacketKey, Tag};
use crate::{FlowId, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PacketKind {
    Hello,
    Tc,
    Data,
    Ack,
}

impl PacketKind {
    fn code(self) -> u8 {
        match self {
            PacketKind::Hello => 1,
            PacketKind::Tc => 2,
            PacketKind::Data => 3,
            PacketKind::Ack => 4,
        }
    }

    pub fn is_control(self) -> bool {
        matches!(self, PacketKind::Hello | PacketKind::Tc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkDst {
    Broadcast,
    Unicast(NodeId),
}

/// Which copy of an end-to-end packet this is. Trace-only; never on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CopyKind {
    Primary,
    Alternate,
    Replay,
    Forged,
    Decoy,
}

/// Explicit hop list for the alternate-relay copy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRoute {
    /// Hops after the originator, ending at the destination.
    pub hops: Vec<NodeId>,
}

impl SourceRoute {
    pub fn next_after(&self, here: NodeId) -> Option<NodeId> {
        let pos = self.hops.iter().position(|&h| h == here)?;
        self.hops.get(pos + 1).copied()
    }
}

pub const NO_NODE: u32 = u32::MAX;
pub const HEADER_LEN: usize = 26;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    // Authenticated header.
    pub kind: PacketKind,
    pub encrypted: bool,
    pub origin: NodeId,
    pub dst: Option<NodeId>,
    /// Per-origin packet sequence; doubles as the nonce counter.
    pub seq: u32,
    pub flow: Option<FlowId>,
    pub segment: u32,
    pub ack: u32,
    // Mutable in flight.
    pub ttl: u8,
    pub sender: NodeId,
    pub link_dst: LinkDst,
    pub source_route: Option<SourceRoute>,
    pub copy: CopyKind,
    pub body: Vec<u8>,
    pub tag: Tag,
}

impl Packet {
    /// Fixed big-endian header covered by the tag:
    /// `kind u8 | flags u8 | origin u32 | dst u32 | seq u32 | flow u32 | segment u32 | ack u32`.
    pub fn header_bytes(&self) -> [u8; HEADER_LEN] {
        let mut h = [0u8; HEADER_LEN];
        h[0] = self.kind.code();
        h[1] = self.encrypted as u8;
        h[2..6].copy_from_slice(&self.origin.0.to_be_bytes());
        h[6..10].copy_from_slice(&self.dst.map_or(NO_NODE, |d| d.0).to_be_bytes());
        h[10..14].copy_from_slice(&self.seq.to_be_bytes());
        h[14..18].copy_from_slice(&self.flow.map_or(NO_NODE, |f| f.0).to_be_bytes());
        h[18..22].copy_from_slice(&self.segment.to_be_bytes());
        h[22..26].copy_from_slice(&self.ack.to_be_bytes());
        h
    }

    pub fn nonce(&self) -> Nonce {
        Nonce::new(self.origin, self.seq)
    }

    /// Bytes on the air: header, ttl, link addresses, optional source route,
    /// body and tag.
    pub fn wire_len(&self) -> usize {
        let route = self
            .source_route
            .as_ref()
            .map_or(1, |r| 1 + 4 * r.hops.len());
        HEADER_LEN + 1 + 4 + 4 + route + self.body.len() + self.tag.len()
    }

    pub fn verify(&self, key: &PacketKey) -> bool {
        key.verify(&self.nonce(), &self.header_bytes(), &self.body, &self.tag)
    }

    pub fn open(&self, key: &PacketKey) -> Option<Vec<u8>> {
        key.open(
            &self.nonce(),
            &self.header_bytes(),
            &self.body,
            &self.tag,
            self.encrypted,
        )
        .ok()
    }

    /// Builds a sealed packet; the caller supplies link fields.
    #[allow(clippy::too_many_arguments)]
    pub fn sealed(
        key: &PacketKey,
        kind: PacketKind,
        encrypted: bool,
        origin: NodeId,
        dst: Option<NodeId>,
        seq: u32,
        flow: Option<FlowId>,
        segment: u32,
        ack: u32,
        payload: &[u8],
        ttl: u8,
    ) -> Packet {
        let mut p = Packet {
            kind,
            encrypted,
            origin,
            dst,
            seq,
            flow,
            segment,
            ack,
            ttl,
            sender: origin,
            link_dst: LinkDst::Broadcast,
            source_route: None,
            copy: CopyKind::Primary,
            body: Vec::new(),
            tag: [0; 8],
        };
        let (body, tag) = key.seal(&p.nonce(), &p.header_bytes(), payload, encrypted);
        p.body = body;
        p.tag = tag;
        p
    }
}
