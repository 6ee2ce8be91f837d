//! Attacker behaviors as deterministic packet-handling overrides.
//!
//! Attackers never hold the network key. The data-plane behaviors
//! (blackhole, greyhole, modifier, replayer) only touch DATA and ACK packets
//! the attacker is asked to forward; control traffic is relayed unchanged so
//! the attacker stays attractive as a relay. Fabricators and flooders emit
//! on their own timers and the eavesdropper only listens.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::packet::{Packet, PacketKind};
use crate::{NodeId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AttackKind {
    Blackhole,
    Greyhole {
        p: f64,
    },
    Modifier,
    Replayer {
        delay: SimTime,
    },
    /// Forged HELLOs impersonating other nodes, `rate` per second.
    Fabricator {
        rate: f64,
    },
    Eavesdropper,
    /// Junk DATA toward `target`, `rate` packets per second.
    DosFlooder {
        rate: f64,
    },
}

impl AttackKind {
    pub fn name(&self) -> &'static str {
        match self {
            AttackKind::Blackhole => "blackhole",
            AttackKind::Greyhole { .. } => "greyhole",
            AttackKind::Modifier => "modifier",
            AttackKind::Replayer { .. } => "replayer",
            AttackKind::Fabricator { .. } => "fabricator",
            AttackKind::Eavesdropper => "eavesdropper",
            AttackKind::DosFlooder { .. } => "dos_flooder",
        }
    }

    /// Emission rate for the timer-driven kinds.
    pub fn emission_rate(&self) -> Option<f64> {
        match *self {
            AttackKind::Fabricator { rate } | AttackKind::DosFlooder { rate } => Some(rate),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackBehavior {
    pub node: NodeId,
    pub kind: AttackKind,
    pub active_from: SimTime,
    pub active_to: SimTime,
    /// Victim for the flooder; unused by other kinds.
    pub target: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttackConfigError {
    #[error("greyhole drop probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("rate must be positive, got {0}")]
    Rate(f64),
    #[error("active window ends before it starts")]
    Window,
}

impl AttackBehavior {
    pub fn validate(&self) -> Result<(), AttackConfigError> {
        match self.kind {
            AttackKind::Greyhole { p } if !(0.0..=1.0).contains(&p) => {
                return Err(AttackConfigError::Probability(p))
            }
            AttackKind::Fabricator { rate } | AttackKind::DosFlooder { rate }
                if !(rate > 0.0 && rate.is_finite()) =>
            {
                return Err(AttackConfigError::Rate(rate))
            }
            _ => {}
        }
        if self.active_to < self.active_from {
            return Err(AttackConfigError::Window);
        }
        Ok(())
    }

    pub fn is_active(&self, now: SimTime) -> bool {
        self.active_from <= now && now <= self.active_to
    }

    pub fn transmits(&self) -> bool {
        !matches!(self.kind, AttackKind::Eavesdropper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Asked to relay the packet toward someone else.
    Forwarder,
    /// Overheard or addressed to the attacker.
    Receiver,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttackAction {
    /// Behavior does not apply; handle the packet normally.
    PassThrough,
    Forward(Packet),
    Drop,
    ForwardAndReplay {
        packet: Packet,
        replay_after: SimTime,
    },
    /// Eavesdropper capture; `recovered_bytes` is plaintext it could read.
    Observe {
        recovered_bytes: usize,
    },
}

fn data_plane(p: &Packet) -> bool {
    matches!(p.kind, PacketKind::Data | PacketKind::Ack)
}

/// Applies an active behavior to one packet. Randomness comes from the
/// attacker's own sub-stream.
pub fn apply_behavior<R: Rng + ?Sized>(
    b: &AttackBehavior,
    mut p: Packet,
    role: Role,
    rng: &mut R,
) -> AttackAction {
    match (b.kind, role) {
        (AttackKind::Eavesdropper, _) => AttackAction::Observe {
            recovered_bytes: if p.kind == PacketKind::Data && !p.encrypted {
                p.body.len()
            } else {
                0
            },
        },
        (_, Role::Receiver) => AttackAction::PassThrough,
        (_, Role::Forwarder) if !data_plane(&p) => AttackAction::PassThrough,
        (AttackKind::Blackhole, _) => AttackAction::Drop,
        (AttackKind::Greyhole { p: drop_p }, _) => {
            if rng.gen::<f64>() < drop_p {
                AttackAction::Drop
            } else {
                AttackAction::Forward(p)
            }
        }
        (AttackKind::Modifier, _) => {
            if p.body.is_empty() {
                let i = rng.gen_range(0..p.tag.len());
                p.tag[i] ^= 0xff;
            } else {
                let i = rng.gen_range(0..p.body.len());
                p.body[i] ^= 0xff;
            }
            AttackAction::Forward(p)
        }
        (AttackKind::Replayer { delay }, _) => AttackAction::ForwardAndReplay {
            packet: p,
            replay_after: delay,
        },
        (AttackKind::Fabricator { .. } | AttackKind::DosFlooder { .. }, _) => {
            AttackAction::PassThrough
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::PacketKey;
    use crate::kernel::rng::{node_stream, StreamPurpose};
    use crate::FlowId;

    fn behavior(kind: AttackKind) -> AttackBehavior {
        AttackBehavior {
            node: NodeId(3),
            kind,
            active_from: SimTime::ZERO,
            active_to: SimTime::MAX,
            target: None,
        }
    }

    fn data(key: &PacketKey, seq: u32, encrypted: bool) -> Packet {
        Packet::sealed(
            key,
            PacketKind::Data,
            encrypted,
            NodeId(0),
            Some(NodeId(5)),
            seq,
            Some(FlowId(0)),
            seq,
            0,
            &[7u8; 40],
            64,
        )
    }

    #[test]
    fn blackhole_drops_data() {
        let key = PacketKey::new(&[1; 16]).unwrap();
        let mut rng = node_stream(1, NodeId(3), StreamPurpose::Attack);
        let act = apply_behavior(
            &behavior(AttackKind::Blackhole),
            data(&key, 1, true),
            Role::Forwarder,
            &mut rng,
        );
        assert_eq!(act, AttackAction::Drop);
    }

    #[test]
    fn control_passes_through_blackhole() {
        let key = PacketKey::new(&[1; 16]).unwrap();
        let mut rng = node_stream(1, NodeId(3), StreamPurpose::Attack);
        let mut tc = data(&key, 1, false);
        tc.kind = PacketKind::Tc;
        let act = apply_behavior(
            &behavior(AttackKind::Blackhole),
            tc,
            Role::Forwarder,
            &mut rng,
        );
        assert_eq!(act, AttackAction::PassThrough);
    }

    #[test]
    fn modifier_breaks_tag() {
        let key = PacketKey::new(&[1; 16]).unwrap();
        let mut rng = node_stream(1, NodeId(3), StreamPurpose::Attack);
        let p = data(&key, 1, true);
        assert!(p.verify(&key));
        match apply_behavior(
            &behavior(AttackKind::Modifier),
            p.clone(),
            Role::Forwarder,
            &mut rng,
        ) {
            AttackAction::Forward(q) => {
                assert_eq!(
                    q.body.iter().zip(&p.body).filter(|(a, b)| a != b).count(),
                    1
                );
                assert!(q.open(&key).is_none());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn greyhole_follows_replayed_stream() {
        let key = PacketKey::new(&[1; 16]).unwrap();
        let b = behavior(AttackKind::Greyhole { p: 0.5 });
        let mut rng = node_stream(7, NodeId(3), StreamPurpose::Attack);
        let drops: Vec<bool> = (0..100)
            .map(|i| {
                apply_behavior(&b, data(&key, i, true), Role::Forwarder, &mut rng)
                    == AttackAction::Drop
            })
            .collect();
        let mut oracle = node_stream(7, NodeId(3), StreamPurpose::Attack);
        let expected: Vec<bool> = (0..100).map(|_| oracle.gen::<f64>() < 0.5).collect();
        assert_eq!(drops, expected);
        assert!(drops.iter().any(|d| *d) && drops.iter().any(|d| !*d));
    }

    #[test]
    fn eavesdropper_reads_only_cleartext() {
        let key = PacketKey::new(&[1; 16]).unwrap();
        let mut rng = node_stream(1, NodeId(3), StreamPurpose::Attack);
        let b = behavior(AttackKind::Eavesdropper);
        assert_eq!(
            apply_behavior(&b, data(&key, 1, true), Role::Receiver, &mut rng),
            AttackAction::Observe { recovered_bytes: 0 }
        );
        assert_eq!(
            apply_behavior(&b, data(&key, 2, false), Role::Receiver, &mut rng),
            AttackAction::Observe {
                recovered_bytes: 40
            }
        );
        assert!(!b.transmits());
    }

    #[test]
    fn validation() {
        assert!(behavior(AttackKind::Greyhole { p: 1.5 })
            .validate()
            .is_err());
        assert!(behavior(AttackKind::DosFlooder { rate: 0.0 })
            .validate()
            .is_err());
        assert!(behavior(AttackKind::Greyhole { p: 0.0 }).validate().is_ok());
    }
}
