//! New Reno sender state machine, in whole-segment units.
//!
//! Sequence numbers count segments: `snd_una` is the oldest unacknowledged
//! segment, `snd_nxt` the next one to send and an ACK carries the next
//! segment the receiver expects.

use serde::{Deserialize, Serialize};

use crate::SimTime;

pub const INITIAL_CWND: f64 = 2.0;
pub const INITIAL_SSTHRESH: f64 = 64.0;
pub const MIN_SSTHRESH: f64 = 2.0;
pub const DUP_ACK_THRESHOLD: u32 = 3;
pub const INITIAL_RTO: SimTime = SimTime::from_secs(1);
pub const MAX_RTO: SimTime = SimTime::from_secs(16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    SlowStart,
    CongestionAvoidance,
    FastRecovery,
}

/// `Reno` leaves fast recovery on the first new ACK, partial or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CcVariant {
    #[default]
    NewReno,
    Reno,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AckEvent {
    /// Below `snd_una`, beyond `snd_max`, or nothing outstanding.
    Ignored,
    NewAck,
    Duplicate,
    /// Extra duplicate while recovering; the window inflates by one.
    RecoveryInflate,
    FastRetransmit,
    /// `cwnd_after == max(cwnd_before - new_data + 1, 1)`.
    PartialAck {
        cwnd_before: f64,
        new_data: u32,
        cwnd_after: f64,
    },
    FullAck,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AckOutcome {
    pub event: AckEvent,
    pub retransmit: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CwndState {
    pub cwnd: f64,
    pub ssthresh: f64,
    pub phase: Phase,
    pub dup_acks: u32,
    pub recover: u32,
    pub snd_una: u32,
    pub snd_nxt: u32,
    /// One past the highest segment ever sent. Differs from `snd_nxt` only
    /// after a timeout rewound it.
    pub snd_max: u32,
    /// bytes per segment
    pub smss: u32,
    pub variant: CcVariant,
    rto: SimTime,
}

impl CwndState {
    pub fn new(smss: u32, variant: CcVariant) -> Self {
        CwndState {
            cwnd: INITIAL_CWND,
            ssthresh: INITIAL_SSTHRESH,
            phase: Phase::SlowStart,
            dup_acks: 0,
            recover: 0,
            snd_una: 0,
            snd_nxt: 0,
            snd_max: 0,
            smss,
            variant,
            rto: INITIAL_RTO,
        }
    }

    pub fn rto(&self) -> SimTime {
        self.rto
    }

    pub fn in_flight(&self) -> u32 {
        self.snd_nxt - self.snd_una
    }

    /// Segments that may be sent now: `max(0, floor(cwnd) - in_flight)`.
    pub fn can_send(&self) -> u32 {
        (self.cwnd.floor() as u32).saturating_sub(self.in_flight())
    }

    /// Claims the next sequence number for a fresh transmission.
    pub fn on_send(&mut self) -> u32 {
        let s = self.snd_nxt;
        self.snd_nxt += 1;
        self.snd_max = self.snd_max.max(self.snd_nxt);
        s
    }

    fn halve(&mut self) {
        self.ssthresh = (self.cwnd / 2.0).max(MIN_SSTHRESH);
    }

    pub fn on_ack(&mut self, ack: u32) -> AckOutcome {
        let none = |event| AckOutcome {
            event,
            retransmit: None,
        };
        if ack < self.snd_una || ack > self.snd_max {
            return none(AckEvent::Ignored);
        }
        if ack == self.snd_una {
            if self.in_flight() == 0 {
                return none(AckEvent::Ignored);
            }
            self.dup_acks += 1;
            if self.phase == Phase::FastRecovery {
                self.cwnd += 1.0;
                return none(AckEvent::RecoveryInflate);
            }
            if self.dup_acks == DUP_ACK_THRESHOLD {
                self.halve();
                self.recover = self.snd_max;
                self.cwnd = self.ssthresh + 3.0;
                self.phase = Phase::FastRecovery;
                return AckOutcome {
                    event: AckEvent::FastRetransmit,
                    retransmit: Some(self.snd_una),
                };
            }
            return none(AckEvent::Duplicate);
        }

        let new_data = ack - self.snd_una;
        self.snd_una = ack;
        // After a rewind the receiver may already hold segments past snd_nxt.
        self.snd_nxt = self.snd_nxt.max(ack);
        self.rto = INITIAL_RTO;
        if self.phase == Phase::FastRecovery {
            if ack >= self.recover || self.variant == CcVariant::Reno {
                self.cwnd = self.ssthresh;
                self.phase = Phase::CongestionAvoidance;
                self.dup_acks = 0;
                return none(AckEvent::FullAck);
            }
            let before = self.cwnd;
            self.cwnd = (before - new_data as f64 + 1.0).max(1.0);
            self.dup_acks = 0;
            return AckOutcome {
                event: AckEvent::PartialAck {
                    cwnd_before: before,
                    new_data,
                    cwnd_after: self.cwnd,
                },
                retransmit: Some(ack),
            };
        }
        self.dup_acks = 0;
        match self.phase {
            Phase::SlowStart => {
                self.cwnd += 1.0;
                if self.cwnd >= self.ssthresh {
                    self.phase = Phase::CongestionAvoidance;
                }
            }
            Phase::CongestionAvoidance => self.cwnd += 1.0 / self.cwnd,
            Phase::FastRecovery => unreachable!(),
        }
        none(AckEvent::NewAck)
    }

    /// Retransmission timer expiry. Returns the segment to resend; the
    /// window restarts from `snd_una` (go-back-N).
    pub fn on_timeout(&mut self) -> u32 {
        self.halve();
        self.cwnd = 1.0;
        self.phase = Phase::SlowStart;
        self.dup_acks = 0;
        self.snd_nxt = self.snd_una + 1;
        self.rto = SimTime((self.rto.as_micros() * 2).min(MAX_RTO.as_micros()));
        self.snd_una
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sender(cwnd: f64, phase: Phase, una: u32, nxt: u32) -> CwndState {
        let mut s = CwndState::new(1200, CcVariant::NewReno);
        s.cwnd = cwnd;
        s.phase = phase;
        s.snd_una = una;
        s.snd_nxt = nxt;
        s.snd_max = nxt;
        s
    }

    #[test]
    fn partial_ack_deflates_per_equation() {
        let mut s = sender(10.0, Phase::FastRecovery, 0, 12);
        s.ssthresh = 6.0;
        s.recover = 12;
        let out = s.on_ack(3);
        assert_eq!(s.cwnd, 8.0);
        assert_eq!(out.retransmit, Some(3));
        assert_eq!(s.phase, Phase::FastRecovery);
    }

    #[test]
    fn third_dup_ack_enters_fast_recovery() {
        let mut s = sender(8.0, Phase::SlowStart, 5, 13);
        assert_eq!(s.on_ack(5).event, AckEvent::Duplicate);
        assert_eq!(s.on_ack(5).event, AckEvent::Duplicate);
        let out = s.on_ack(5);
        assert_eq!(out.event, AckEvent::FastRetransmit);
        assert_eq!(out.retransmit, Some(5));
        assert_eq!(
            (s.ssthresh, s.cwnd, s.phase),
            (4.0, 7.0, Phase::FastRecovery)
        );
        assert_eq!(s.recover, 13);
    }

    #[test]
    fn full_ack_leaves_recovery() {
        let mut s = sender(9.0, Phase::FastRecovery, 5, 13);
        s.ssthresh = 4.0;
        s.recover = 13;
        assert_eq!(s.on_ack(13).event, AckEvent::FullAck);
        assert_eq!((s.cwnd, s.phase), (4.0, Phase::CongestionAvoidance));
    }

    #[test]
    fn old_ack_ignored() {
        let mut s = sender(4.0, Phase::SlowStart, 5, 8);
        let before = s.clone();
        assert_eq!(s.on_ack(3).event, AckEvent::Ignored);
        assert_eq!(s, before);
    }

    #[test]
    fn growth_rules() {
        let mut s = sender(2.0, Phase::SlowStart, 0, 2);
        s.on_ack(1);
        assert_eq!(s.cwnd, 3.0);
        let mut s = sender(4.0, Phase::CongestionAvoidance, 0, 4);
        s.on_ack(1);
        assert_eq!(s.cwnd, 4.25);
        let mut s = sender(3.0, Phase::SlowStart, 0, 3);
        s.ssthresh = 4.0;
        s.on_ack(1);
        assert_eq!(s.phase, Phase::CongestionAvoidance);
    }

    #[test]
    fn timeout_halves_and_restarts() {
        let mut s = sender(16.0, Phase::CongestionAvoidance, 4, 20);
        assert_eq!(s.on_timeout(), 4);
        assert_eq!((s.ssthresh, s.cwnd, s.phase), (8.0, 1.0, Phase::SlowStart));
        assert_eq!(s.snd_nxt, 5);
        let mut s = sender(3.0, Phase::CongestionAvoidance, 0, 3);
        s.on_timeout();
        assert_eq!(s.ssthresh, 2.0);
    }

    #[test]
    fn rto_backoff_caps() {
        let mut s = sender(4.0, Phase::SlowStart, 0, 4);
        let mut seen = vec![s.rto()];
        for _ in 0..6 {
            s.on_timeout();
            seen.push(s.rto());
        }
        let secs: Vec<u64> = seen.iter().map(|t| t.as_micros() / 1_000_000).collect();
        assert_eq!(secs, vec![1, 2, 4, 8, 16, 16, 16]);
        s.on_ack(1);
        assert_eq!(s.rto(), INITIAL_RTO);
    }

    #[test]
    fn send_allowance() {
        assert_eq!(sender(4.0, Phase::SlowStart, 0, 4).can_send(), 0);
        assert_eq!(sender(4.0, Phase::SlowStart, 0, 1).can_send(), 3);
        assert_eq!(sender(2.5, Phase::SlowStart, 0, 2).can_send(), 0);
    }

    #[test]
    fn reno_exits_on_partial_ack() {
        let mut s = sender(10.0, Phase::FastRecovery, 0, 12);
        s.variant = CcVariant::Reno;
        s.ssthresh = 5.0;
        s.recover = 12;
        let out = s.on_ack(3);
        assert_eq!(out.event, AckEvent::FullAck);
        assert_eq!(out.retransmit, None);
        assert_eq!((s.cwnd, s.phase), (5.0, Phase::CongestionAvoidance));
    }

    #[test]
    fn ack_past_rewound_snd_nxt_is_accepted() {
        let mut s = sender(8.0, Phase::CongestionAvoidance, 4, 12);
        s.on_timeout();
        assert_eq!((s.snd_nxt, s.snd_max), (5, 12));
        // The receiver already held 5..10; the retransmission of 4 fills the gap.
        assert_eq!(s.on_ack(10).event, AckEvent::NewAck);
        assert_eq!((s.snd_una, s.snd_nxt), (10, 10));
        assert_eq!(s.on_ack(13).event, AckEvent::Ignored);
    }
}
