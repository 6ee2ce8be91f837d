//! The simulated world: every node, flow and attacker driven by one event loop.

mod trace;

use std::collections::BTreeSet;

use rand::Rng;

use crate::admission::{admit_flow, Admission, AdmissionInput};
use crate::attacks::{apply_behavior, AttackAction, AttackBehavior, AttackKind, Role};
use crate::crypto::PacketKey;
use crate::kernel::{
    advance_mobility, neighbors_at, node_stream, Adjacency, Engine, LinkModel, MobilityParams,
    NodePosition, SimRng, StreamPurpose,
};
use crate::metrics::{
    Aggregate, BlacklistEvent, CwndTrace, DropCause, DropCounts, FlowLedger, MetricsReport,
    NodeCounters,
};
use crate::olsr::{BlacklistReason, ControlMessage, HelloMessage, NodeState, TcMessage};
use crate::packet::{CopyKind, LinkDst, Packet, PacketKind, SourceRoute};
use crate::queue::{EnqueueResult, OutboundQueue, TxHistory};
use crate::relay::{honeypot_blacklist, plan_relay, IngestOutcome, Reassembly, DEFAULT_HOLD};
use crate::scenario::{ScenarioConfig, ScenarioError};
use crate::transport::{segment_payload, AckEvent, FlowReceiver, FlowSender, TrafficKind};
use crate::{FlowId, NodeId, SimTime};

pub use trace::Trace;

/// Bandwidth estimation window.
pub const ESTIMATE_WINDOW: SimTime = SimTime::from_secs(1);
/// Payload size of flooder junk packets.
pub const JUNK_LEN: usize = 512;

#[derive(Debug, Clone)]
enum Ev {
    Olsr,
    Mobility,
    TxDone,
    Arrive(Box<Packet>),
    FlowStart(FlowId),
    Rto { flow: FlowId, epoch: u64 },
    StreamTick(FlowId),
    Expire,
    AttackTick,
    Replay(Box<Packet>),
}

struct Node {
    olsr: NodeState,
    queue: OutboundQueue,
    in_tx: Option<Packet>,
    history: TxHistory,
    next_seq: u32,
    /// The network key, or a key of the attacker's own that nobody shares.
    key: PacketKey,
    keyed: bool,
    attack: Option<AttackBehavior>,
    attack_rng: SimRng,
    reassembly: Reassembly,
    counters: NodeCounters,
}

impl Node {
    fn silent(&self) -> bool {
        self.attack.is_some_and(|a| !a.transmits())
    }
}

struct FlowRt {
    sender: FlowSender,
    receiver: FlowReceiver,
    ledger: FlowLedger,
    active: bool,
    tick_pending: bool,
}

pub struct World {
    cfg: ScenarioConfig,
    engine: Engine<Ev>,
    nodes: Vec<Node>,
    positions: Vec<NodePosition>,
    mobility_rngs: Vec<SimRng>,
    mobility: MobilityParams,
    link: LinkModel,
    adj: Adjacency,
    net_key: PacketKey,
    flows: Vec<FlowRt>,
    drop_events: DropCounts,
    eavesdropped: u64,
    blacklist_events: Vec<BlacklistEvent>,
    confirmed_attackers: BTreeSet<NodeId>,
    isolation_violations: u64,
    payload_mismatches: u64,
    assertion_failures: Vec<String>,
    trace: Trace,
}

/// Runs a scenario to completion.
pub fn run(cfg: &ScenarioConfig) -> Result<MetricsReport, ScenarioError> {
    Ok(World::new(cfg.clone(), false)?.run())
}

/// Runs a scenario and also returns the full event trace.
pub fn run_traced(cfg: &ScenarioConfig) -> Result<(MetricsReport, Vec<String>), ScenarioError> {
    let mut w = World::new(cfg.clone(), true)?;
    let report = w.run_inner();
    Ok((report, w.trace.take_lines()))
}

fn bogus_key(node: NodeId, real: &[u8; 16]) -> [u8; 16] {
    let mut k = [0xa5u8; 16];
    k[..4].copy_from_slice(&node.0.to_be_bytes());
    if &k == real {
        k[15] ^= 0xff;
    }
    k
}

impl World {
    pub fn new(cfg: ScenarioConfig, keep_trace: bool) -> Result<Self, ScenarioError> {
        cfg.validate()?;
        let net_key = PacketKey::new(&cfg.security.key).expect("16-byte key");
        let n = cfg.nodes;
        let mobility = MobilityParams {
            arena: cfg.arena,
            min_speed: cfg.mobility.min_speed,
            max_speed: cfg.mobility.max_speed,
            pause: cfg.mobility.pause,
        };
        let link = LinkModel {
            radio_range: cfg.radio.range,
            per_hop_delay: cfg.radio.per_hop_delay,
            arena: cfg.arena,
        };

        let mut nodes = Vec::with_capacity(n);
        let mut positions = Vec::with_capacity(n);
        let mut mobility_rngs = Vec::with_capacity(n);
        for i in 0..n {
            let id = NodeId(i as u32);
            let mut proto = node_stream(cfg.seed, id, StreamPurpose::Protocol);
            let jitter = |rng: &mut SimRng, interval: SimTime| {
                let span = interval.as_micros() / 10;
                SimTime(if span == 0 { 0 } else { rng.gen_range(0..span) })
            };
            let hello_offset = jitter(&mut proto, cfg.olsr.hello_interval);
            let tc_offset = jitter(&mut proto, cfg.olsr.tc_interval);
            let attack = cfg.attack_on(id).copied();
            let keyed = attack.is_none();
            let key = if keyed {
                net_key.clone()
            } else {
                PacketKey::new(&bogus_key(id, &cfg.security.key)).expect("16-byte key")
            };
            nodes.push(Node {
                olsr: NodeState::new(id, cfg.olsr, hello_offset, tc_offset),
                queue: OutboundQueue::new(cfg.radio.queue_capacity, cfg.radio.link_rate),
                in_tx: None,
                history: TxHistory::new(ESTIMATE_WINDOW, cfg.radio.link_rate),
                next_seq: 0,
                key,
                keyed,
                attack,
                attack_rng: node_stream(cfg.seed, id, StreamPurpose::Attack),
                reassembly: Reassembly::new(DEFAULT_HOLD),
                counters: NodeCounters {
                    node: id,
                    ..NodeCounters::default()
                },
            });

            let mut place = node_stream(cfg.seed, id, StreamPurpose::Placement);
            let (x, y) = cfg
                .placement(id)
                .unwrap_or_else(|| cfg.arena.random_point(&mut place));
            let mut mob = node_stream(cfg.seed, id, StreamPurpose::Mobility);
            let mut pos = NodePosition::stationary(x, y);
            if mobility.max_speed > 0.0 {
                pos.waypoint = cfg.arena.random_point(&mut mob);
                pos.speed = mobility.draw_speed(&mut mob);
            }
            positions.push(pos);
            mobility_rngs.push(mob);
        }
        let adj = neighbors_at(&positions, &link);

        let flows = cfg
            .flows
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let id = FlowId(i as u32);
                FlowRt {
                    sender: FlowSender::new(id, *spec, cfg.transport.smss, cfg.transport.variant),
                    receiver: FlowReceiver::default(),
                    ledger: FlowLedger::new(id, spec.src, spec.dst, spec.start),
                    active: false,
                    tick_pending: false,
                }
            })
            .collect();

        let mut w = World {
            engine: Engine::new(),
            nodes,
            positions,
            mobility_rngs,
            mobility,
            link,
            adj,
            net_key,
            flows,
            drop_events: DropCounts::default(),
            eavesdropped: 0,
            blacklist_events: Vec::new(),
            confirmed_attackers: BTreeSet::new(),
            isolation_violations: 0,
            payload_mismatches: 0,
            assertion_failures: Vec::new(),
            trace: Trace::new(keep_trace),
            cfg,
        };
        w.schedule_initial();
        Ok(w)
    }

    fn schedule_initial(&mut self) {
        for i in 0..self.nodes.len() {
            let id = NodeId(i as u32);
            if !self.nodes[i].silent() {
                let due = self.nodes[i].olsr.next_due();
                self.at(due, id, Ev::Olsr);
            }
            if let Some(rate) = self.nodes[i].attack.and_then(|a| a.kind.emission_rate()) {
                let from = self.nodes[i].attack.expect("attacker").active_from;
                self.at(from + period(rate), id, Ev::AttackTick);
            }
        }
        if self.mobility.max_speed > 0.0 {
            self.after(self.cfg.mobility.tick, NodeId(0), Ev::Mobility);
        }
        for f in 0..self.flows.len() {
            let spec = self.flows[f].sender.spec;
            self.at(spec.start, spec.src, Ev::FlowStart(FlowId(f as u32)));
        }
    }

    fn now(&self) -> SimTime {
        self.engine.now()
    }

    fn at(&mut self, t: SimTime, node: NodeId, ev: Ev) {
        let t = t.max(self.now());
        self.engine
            .schedule(t, Some(node), ev)
            .expect("clamped to the clock");
    }

    fn after(&mut self, d: SimTime, node: NodeId, ev: Ev) {
        self.engine.schedule_in(d, Some(node), ev);
    }

    fn log(&mut self, msg: std::fmt::Arguments<'_>) {
        let now = self.now();
        self.trace.record(now, msg);
    }

    pub fn run(mut self) -> MetricsReport {
        self.run_inner()
    }

    /// Processes every event due by `t` (capped at the scenario duration)
    /// and leaves the rest queued.
    pub fn run_until(&mut self, t: SimTime) {
        let end = t.min(self.cfg.duration);
        while let Some(ev) = self.engine.pop_due(end) {
            let node = ev.target.expect("every event targets a node");
            self.dispatch(node, ev.payload);
        }
    }

    fn run_inner(&mut self) -> MetricsReport {
        self.run_until(self.cfg.duration);
        self.report()
    }

    fn dispatch(&mut self, node: NodeId, ev: Ev) {
        match ev {
            Ev::Olsr => self.on_olsr(node),
            Ev::Mobility => self.on_mobility(),
            Ev::TxDone => self.on_tx_done(node),
            Ev::Arrive(p) => self.on_arrive(node, *p),
            Ev::FlowStart(f) => self.on_flow_start(f),
            Ev::Rto { flow, epoch } => self.on_rto(flow, epoch),
            Ev::StreamTick(f) => {
                self.flows[f.0 as usize].tick_pending = false;
                self.pump(f);
            }
            Ev::Expire => self.on_expire(node),
            Ev::AttackTick => self.on_attack_tick(node),
            Ev::Replay(p) => {
                let mut p = *p;
                p.copy = CopyKind::Replay;
                p.source_route = None;
                self.log(format_args!(
                    "replay {node} origin={} seq={}",
                    p.origin, p.seq
                ));
                self.forward_data(node, p, node);
            }
        }
        self.audit(node);
    }

    // ---- link layer -------------------------------------------------------

    fn next_seq(&mut self, n: NodeId) -> u32 {
        let node = &mut self.nodes[n.index()];
        let s = node.next_seq;
        node.next_seq += 1;
        s
    }

    /// Queues `p` at `n`. `from` is the neighbor it arrived from, or `n`
    /// itself for locally generated packets.
    fn enqueue(&mut self, n: NodeId, p: Packet, from: NodeId) {
        let node = &mut self.nodes[n.index()];
        let olsr = &node.olsr;
        let blocked = |q: &Packet| olsr.is_blacklisted(q.origin) || olsr.is_blacklisted(from);
        let (kind, origin, seq) = (p.kind, p.origin, p.seq);
        let dropped = match node.queue.enqueue(p.clone(), blocked) {
            EnqueueResult::Accepted => None,
            EnqueueResult::Overflow => Some(DropCause::Overflow),
            EnqueueResult::Firewall => Some(DropCause::Firewall),
        };
        match dropped {
            None => self.start_tx(n),
            Some(cause) => {
                self.log(format_args!(
                    "drop {cause:?} at {n} {kind:?} origin={origin} seq={seq}"
                ));
                self.account_drop(&p, cause);
            }
        }
    }

    fn account_drop(&mut self, p: &Packet, cause: DropCause) {
        self.drop_events.add(cause);
        if p.kind == PacketKind::Data {
            if let Some(f) = p.flow {
                if let Some(rt) = self.flows.get_mut(f.0 as usize) {
                    if rt.sender.spec.src == p.origin {
                        rt.ledger.on_loss(p.segment, cause);
                    }
                }
            }
        }
    }

    fn drop_packet(&mut self, at: NodeId, p: &Packet, cause: DropCause) {
        self.log(format_args!(
            "drop {cause:?} at {at} {:?} origin={} seq={}",
            p.kind, p.origin, p.seq
        ));
        self.account_drop(p, cause);
    }

    fn start_tx(&mut self, n: NodeId) {
        let node = &mut self.nodes[n.index()];
        if node.in_tx.is_some() {
            return;
        }
        if let Some(p) = node.queue.dequeue() {
            let t = node.queue.tx_time(p.wire_len());
            node.in_tx = Some(p);
            self.after(t, n, Ev::TxDone);
        }
    }

    fn on_tx_done(&mut self, n: NodeId) {
        let now = self.now();
        let Some(p) = self.nodes[n.index()].in_tx.take() else {
            return;
        };
        let bytes = p.wire_len() as u64;
        {
            let node = &mut self.nodes[n.index()];
            node.counters.tx_packets += 1;
            node.counters.tx_bytes += bytes;
            if p.kind.is_control() {
                node.counters.control_bytes += bytes;
            }
            node.history.record(now, bytes);
        }
        self.log(format_args!(
            "tx {n} {:?} {:?} origin={} seq={} to={:?} bytes={bytes}",
            p.kind, p.copy, p.origin, p.seq, p.link_dst
        ));
        let neighbors: Vec<NodeId> = self.adj.neighbors(n).iter().copied().collect();
        let mut reached_target = false;
        for nb in neighbors {
            let listener = &mut self.nodes[nb.index()];
            if listener.silent() {
                let b = listener.attack.expect("silent nodes are attackers");
                if b.is_active(now) {
                    if let AttackAction::Observe { recovered_bytes } =
                        apply_behavior(&b, p.clone(), Role::Receiver, &mut listener.attack_rng)
                    {
                        self.eavesdropped += recovered_bytes as u64;
                    }
                }
                continue;
            }
            let addressed = match p.link_dst {
                LinkDst::Broadcast => true,
                LinkDst::Unicast(t) => t == nb,
            };
            if addressed {
                reached_target = true;
                let delay = self.link.per_hop_delay;
                self.after(delay, nb, Ev::Arrive(Box::new(p.clone())));
            }
        }
        if matches!(p.link_dst, LinkDst::Unicast(_)) && !reached_target {
            self.drop_packet(n, &p, DropCause::NoRoute);
        }
        self.start_tx(n);
    }

    fn on_mobility(&mut self) {
        let dt = self.cfg.mobility.tick;
        for i in 0..self.positions.len() {
            self.positions[i] = advance_mobility(
                self.positions[i],
                dt,
                &self.mobility,
                &mut self.mobility_rngs[i],
            );
        }
        self.adj = neighbors_at(&self.positions, &self.link);
        self.after(dt, NodeId(0), Ev::Mobility);
    }

    // ---- control plane ----------------------------------------------------

    fn on_olsr(&mut self, n: NodeId) {
        let now = self.now();
        let msgs = self.nodes[n.index()].olsr.periodic_emission(now);
        for m in msgs {
            self.emit_control(n, m, LinkDst::Broadcast, CopyKind::Primary);
        }
        let due = self.nodes[n.index()].olsr.next_due();
        self.at(due, n, Ev::Olsr);
    }

    fn emit_control(&mut self, n: NodeId, msg: ControlMessage, to: LinkDst, copy: CopyKind) {
        let (kind, body, ttl) = match &msg {
            ControlMessage::Hello(h) => (PacketKind::Hello, h.encode(), 1),
            ControlMessage::Tc(t) => (PacketKind::Tc, t.encode(), t.ttl),
        };
        let seq = self.next_seq(n);
        let key = &self.nodes[n.index()].key;
        let mut p = Packet::sealed(key, kind, false, n, None, seq, None, 0, 0, &body, ttl);
        p.link_dst = to;
        p.copy = copy;
        self.enqueue(n, p, n);
    }

    fn on_arrive(&mut self, r: NodeId, p: Packet) {
        if p.kind.is_control() {
            let node = &self.nodes[r.index()];
            if node.keyed && !p.verify(&self.net_key) {
                self.nodes[r.index()].counters.auth_failures += 1;
                self.log(format_args!(
                    "auth_fail at {r} from {} {:?}",
                    p.sender, p.kind
                ));
                if self.cfg.security.honeypot {
                    self.honeypot(r, p.sender);
                    return;
                }
            }
            self.process_control(r, p);
            return;
        }
        if p.link_dst != LinkDst::Unicast(r) {
            return;
        }
        if p.dst == Some(r) {
            self.deliver_local(r, p);
            return;
        }
        let from = p.sender;
        let behavior = self.nodes[r.index()]
            .attack
            .filter(|b| b.is_active(self.now()));
        let Some(b) = behavior else {
            self.forward_data(r, p, from);
            return;
        };
        let rng = &mut self.nodes[r.index()].attack_rng;
        let snapshot = p.clone();
        match apply_behavior(&b, p, Role::Forwarder, rng) {
            AttackAction::PassThrough => self.forward_data(r, snapshot, from),
            AttackAction::Forward(q) => {
                if q != snapshot {
                    self.log(format_args!(
                        "tamper at {r} origin={} seq={}",
                        q.origin, q.seq
                    ));
                }
                self.forward_data(r, q, from);
            }
            AttackAction::Drop => self.drop_packet(r, &snapshot, DropCause::Blackhole),
            AttackAction::ForwardAndReplay {
                packet,
                replay_after,
            } => {
                self.after(replay_after, r, Ev::Replay(Box::new(packet.clone())));
                self.forward_data(r, packet, from);
            }
            AttackAction::Observe { .. } => {}
        }
    }

    fn honeypot(&mut self, r: NodeId, suspect: NodeId) {
        let now = self.now();
        let Some(decoy) = honeypot_blacklist(&mut self.nodes[r.index()].olsr, suspect, now) else {
            return;
        };
        self.blacklist_events.push(BlacklistEvent {
            time: now,
            node: r,
            suspect,
            reason: BlacklistReason::HoneypotConfirmed,
        });
        self.confirmed_attackers.insert(suspect);
        self.log(format_args!("blacklist at {r} suspect={suspect} decoy_mpr"));
        self.emit_control(
            r,
            ControlMessage::Hello(decoy),
            LinkDst::Unicast(suspect),
            CopyKind::Decoy,
        );
    }

    fn process_control(&mut self, r: NodeId, p: Packet) {
        let now = self.now();
        match p.kind {
            PacketKind::Hello => {
                if p.link_dst != LinkDst::Broadcast && p.link_dst != LinkDst::Unicast(r) {
                    return;
                }
                let node = &mut self.nodes[r.index()];
                match HelloMessage::decode(&p.body) {
                    Ok(h) => {
                        if node.olsr.process_hello(&h, now).is_err() {
                            node.counters.malformed_hello += 1;
                        }
                    }
                    Err(_) => node.counters.malformed_hello += 1,
                }
            }
            PacketKind::Tc => {
                let node = &mut self.nodes[r.index()];
                if p.origin == r {
                    return;
                }
                if !node.olsr.is_duplicate(p.origin, p.seq) {
                    match TcMessage::decode(&p.body, p.ttl) {
                        Ok(tc) if tc.origin == p.origin => {
                            node.olsr.process_tc(&tc, now);
                        }
                        _ => node.olsr.counters.malformed += 1,
                    }
                }
                let mut fwd = p;
                if node.olsr.should_forward(&mut fwd, now) {
                    let from = fwd.sender;
                    fwd.sender = r;
                    fwd.link_dst = LinkDst::Broadcast;
                    self.enqueue(r, fwd, from);
                }
            }
            _ => unreachable!("data handled by the caller"),
        }
    }

    /// Every keyed node's routing table must avoid every confirmed attacker.
    fn audit(&mut self, n: NodeId) {
        if self.confirmed_attackers.is_empty() {
            return;
        }
        let node = &self.nodes[n.index()];
        if !node.keyed {
            return;
        }
        for a in &self.confirmed_attackers {
            if node.olsr.routes().mentions(*a) {
                self.isolation_violations += 1;
            }
        }
    }

    // ---- data plane -------------------------------------------------------

    fn forward_data(&mut self, r: NodeId, mut p: Packet, from: NodeId) {
        let Some(dst) = p.dst else { return };
        let next = match &p.source_route {
            Some(sr) => sr.next_after(r),
            None => self.nodes[r.index()].olsr.routes().next_hop(dst),
        };
        let Some(next) = next else {
            self.drop_packet(r, &p, DropCause::NoRoute);
            return;
        };
        if p.ttl <= 1 {
            self.drop_packet(r, &p, DropCause::Ttl);
            return;
        }
        p.ttl -= 1;
        p.sender = r;
        p.link_dst = LinkDst::Unicast(next);
        self.enqueue(r, p, from);
    }

    /// Sends the primary copy along the routing table and, when enabled and
    /// available, an alternate copy source-routed through a disjoint relay.
    fn send_end_to_end(&mut self, s: NodeId, p: Packet) {
        let dst = p.dst.expect("end-to-end packets have a destination");
        let plan = match plan_relay(&self.nodes[s.index()].olsr, dst) {
            Ok(plan) => plan,
            Err(_) => {
                self.drop_packet(s, &p, DropCause::NoRoute);
                return;
            }
        };
        if self.cfg.security.alternate_relay {
            if let Some(relay) = plan.alternate_relay {
                let mut alt = p.clone();
                alt.copy = CopyKind::Alternate;
                alt.link_dst = LinkDst::Unicast(relay);
                alt.source_route = Some(SourceRoute {
                    hops: plan.alternate_path.clone(),
                });
                let mut primary = p;
                primary.link_dst = LinkDst::Unicast(plan.primary_next_hop);
                self.enqueue(s, primary, s);
                self.enqueue(s, alt, s);
                return;
            }
        }
        let mut primary = p;
        primary.link_dst = LinkDst::Unicast(plan.primary_next_hop);
        self.enqueue(s, primary, s);
    }

    fn deliver_local(&mut self, r: NodeId, p: Packet) {
        let now = self.now();
        let node = &mut self.nodes[r.index()];
        let key = node.keyed.then_some(&self.net_key);
        let outcome = node.reassembly.ingest(&p, key, now);
        match outcome {
            IngestOutcome::Quarantine => {
                self.log(format_args!(
                    "quarantine at {r} origin={} seq={} {:?}",
                    p.origin, p.seq, p.copy
                ));
                self.after(DEFAULT_HOLD, r, Ev::Expire);
            }
            IngestOutcome::DiscardDuplicate => {
                self.log(format_args!(
                    "discard_dup at {r} origin={} seq={} {:?}",
                    p.origin, p.seq, p.copy
                ));
            }
            IngestOutcome::Deliver(payload) => {
                self.log(format_args!(
                    "accept at {r} origin={} seq={} {:?}",
                    p.origin, p.seq, p.copy
                ));
                let Some(f) = p.flow.filter(|f| (f.0 as usize) < self.flows.len()) else {
                    return;
                };
                match p.kind {
                    PacketKind::Data => self.on_data(r, f, p.segment, &payload),
                    PacketKind::Ack => self.on_ack(f, p.ack),
                    _ => {}
                }
            }
        }
    }

    fn on_expire(&mut self, r: NodeId) {
        let now = self.now();
        let expired = self.nodes[r.index()].reassembly.expire(now);
        for e in expired {
            self.log(format_args!(
                "integrity_drop at {r} origin={} seq={}",
                e.origin, e.seq
            ));
            match e.flow {
                Some(f) => {
                    self.drop_events.add(DropCause::Integrity);
                    if e.kind == PacketKind::Data {
                        if let Some(rt) = self.flows.get_mut(f.0 as usize) {
                            rt.ledger.on_loss(e.segment, DropCause::Integrity);
                        }
                    }
                }
                None => self.nodes[r.index()].counters.forged_rejected += 1,
            }
        }
    }

    // ---- transport --------------------------------------------------------

    fn on_flow_start(&mut self, f: FlowId) {
        let now = self.now();
        let spec = self.flows[f.0 as usize].sender.spec;
        let active_at_src = self
            .flows
            .iter()
            .filter(|rt| rt.active && rt.sender.spec.src == spec.src)
            .count();
        let node = &mut self.nodes[spec.src.index()];
        let input = AdmissionInput {
            capacity: self.cfg.admission.capacity,
            active_at_src,
            route_exists: node.olsr.routes().get(spec.dst).is_some(),
            link_rate: self.cfg.radio.link_rate,
            estimated_use: node.history.estimate_bandwidth(now).estimate,
            reservation: self.cfg.reservation(),
        };
        let decision = admit_flow(&input);
        self.log(format_args!("admission flow={f} {decision:?}"));
        let rt = &mut self.flows[f.0 as usize];
        rt.ledger.admission = Some(decision);
        if decision == Admission::Admitted {
            rt.active = true;
            rt.sender.record_start(now);
            self.pump(f);
        }
    }

    fn pump(&mut self, f: FlowId) {
        let now = self.now();
        let rt = &mut self.flows[f.0 as usize];
        if !rt.active {
            return;
        }
        let segs = rt.sender.take_sendable(now);
        for seg in &segs {
            self.send_segment(f, *seg);
        }
        let rt = &mut self.flows[f.0 as usize];
        let src = rt.sender.spec.src;
        if !rt.sender.rto_armed && rt.sender.cc.in_flight() > 0 {
            self.arm_rto(f);
        }
        let rt = &mut self.flows[f.0 as usize];
        let spec = rt.sender.spec;
        if spec.kind == TrafficKind::Streaming && !rt.tick_pending && rt.sender.cc.can_send() > 0 {
            // Wake up when the application produces the next segment.
            let next = rt.sender.cc.snd_nxt as u128 + 1;
            let smss = rt.sender.smss() as u128;
            let us = (next * smss * 1_000_000).div_ceil(spec.rate as u128);
            let at = spec.start + SimTime(us.min(u64::MAX as u128) as u64);
            if at <= self.cfg.duration {
                rt.tick_pending = true;
                self.at(at, src, Ev::StreamTick(f));
            }
        }
    }

    fn send_segment(&mut self, f: FlowId, seg: u32) {
        let now = self.now();
        let rt = &mut self.flows[f.0 as usize];
        let spec = rt.sender.spec;
        let payload = segment_payload(f, seg, rt.sender.segment_len(seg));
        rt.ledger.on_send(seg, now);
        let seq = self.next_seq(spec.src);
        let p = Packet::sealed(
            &self.nodes[spec.src.index()].key,
            PacketKind::Data,
            self.cfg.security.encryption,
            spec.src,
            Some(spec.dst),
            seq,
            Some(f),
            seg,
            0,
            &payload,
            self.cfg.olsr.ttl,
        );
        self.log(format_args!("send flow={f} seg={seg} seq={seq}"));
        self.send_end_to_end(spec.src, p);
    }

    fn on_data(&mut self, r: NodeId, f: FlowId, seg: u32, payload: &[u8]) {
        let now = self.now();
        let rt = &mut self.flows[f.0 as usize];
        if rt.sender.spec.dst != r {
            return;
        }
        let expected = segment_payload(f, seg, rt.sender.segment_len(seg));
        if payload != expected.as_slice() {
            self.payload_mismatches += 1;
            return;
        }
        let (ack, released) = rt.receiver.on_segment(seg);
        for s in released {
            let len = rt.sender.segment_len(s);
            rt.ledger.on_deliver(s, len, now);
        }
        let spec = rt.sender.spec;
        let seq = self.next_seq(r);
        let p = Packet::sealed(
            &self.nodes[r.index()].key,
            PacketKind::Ack,
            self.cfg.security.encryption,
            r,
            Some(spec.src),
            seq,
            Some(f),
            0,
            ack,
            &[],
            self.cfg.olsr.ttl,
        );
        self.send_end_to_end(r, p);
    }

    fn on_ack(&mut self, f: FlowId, ack: u32) {
        let now = self.now();
        let rt = &mut self.flows[f.0 as usize];
        if !rt.active {
            return;
        }
        let (event, rtx) = rt.sender.on_ack(ack, now);
        let cc = &rt.sender.cc;
        if cc.cwnd < 1.0 || cc.ssthresh < 2.0 {
            self.assertion_failures.push(format!(
                "flow {f}: cwnd {} ssthresh {} below floor",
                cc.cwnd, cc.ssthresh
            ));
        }
        if let AckEvent::PartialAck {
            cwnd_before,
            new_data,
            cwnd_after,
        } = event
        {
            let expect = (cwnd_before - new_data as f64 + 1.0).max(1.0);
            if cwnd_after != expect {
                self.assertion_failures.push(format!(
                    "flow {f}: partial ACK deflated {cwnd_before} by {new_data} to {cwnd_after}, expected {expect}"
                ));
            }
        }
        if let Some(seg) = rtx {
            self.send_segment(f, seg);
        }
        if matches!(
            event,
            AckEvent::NewAck | AckEvent::PartialAck { .. } | AckEvent::FullAck
        ) {
            let rt = &mut self.flows[f.0 as usize];
            if rt.sender.cc.in_flight() > 0 {
                self.arm_rto(f);
            } else {
                rt.sender.rto_armed = false;
                rt.sender.rto_epoch += 1;
            }
        }
        let rt = &mut self.flows[f.0 as usize];
        if rt.sender.is_complete() {
            rt.active = false;
            self.log(format_args!("complete flow={f}"));
            return;
        }
        self.pump(f);
    }

    fn arm_rto(&mut self, f: FlowId) {
        let rt = &mut self.flows[f.0 as usize];
        rt.sender.rto_epoch += 1;
        rt.sender.rto_armed = true;
        let (epoch, rto, src) = (rt.sender.rto_epoch, rt.sender.cc.rto(), rt.sender.spec.src);
        self.after(rto, src, Ev::Rto { flow: f, epoch });
    }

    fn on_rto(&mut self, f: FlowId, epoch: u64) {
        let now = self.now();
        let rt = &mut self.flows[f.0 as usize];
        if !rt.active || !rt.sender.rto_armed || rt.sender.rto_epoch != epoch {
            return;
        }
        rt.sender.rto_armed = false;
        if rt.sender.cc.in_flight() == 0 {
            return;
        }
        let seg = rt.sender.on_timeout(now);
        self.log(format_args!("timeout flow={f} seg={seg}"));
        self.send_segment(f, seg);
        self.arm_rto(f);
        self.pump(f);
    }

    // ---- attackers --------------------------------------------------------

    fn on_attack_tick(&mut self, a: NodeId) {
        let now = self.now();
        let b = self.nodes[a.index()]
            .attack
            .expect("attack ticks only at attackers");
        if now > b.active_to {
            return;
        }
        let n = self.nodes.len() as u32;
        match b.kind {
            AttackKind::Fabricator { rate } => {
                if n > 1 {
                    let node = &mut self.nodes[a.index()];
                    let mut victim = node.attack_rng.gen_range(0..n - 1);
                    if victim >= a.0 {
                        victim += 1;
                    }
                    let victim = NodeId(victim);
                    let mut hello = node.olsr.build_hello();
                    hello.origin = victim;
                    hello.neighbors.remove(&victim);
                    hello.mpr_selection.clear();
                    let seq = self.next_seq(a);
                    let key = &self.nodes[a.index()].key;
                    let mut p = Packet::sealed(
                        key,
                        PacketKind::Hello,
                        false,
                        victim,
                        None,
                        seq,
                        None,
                        0,
                        0,
                        &hello.encode(),
                        1,
                    );
                    p.sender = a;
                    p.copy = CopyKind::Forged;
                    self.log(format_args!("forge_hello at {a} as {victim}"));
                    self.enqueue(a, p, a);
                }
                self.after(period(rate), a, Ev::AttackTick);
            }
            AttackKind::DosFlooder { rate } => {
                if let Some(target) = b.target {
                    let node = &mut self.nodes[a.index()];
                    let mut junk = vec![0u8; JUNK_LEN];
                    node.attack_rng.fill(&mut junk[..]);
                    let seq = self.next_seq(a);
                    let mut p = Packet::sealed(
                        &self.nodes[a.index()].key,
                        PacketKind::Data,
                        false,
                        a,
                        Some(target),
                        seq,
                        None,
                        0,
                        0,
                        &junk,
                        self.cfg.olsr.ttl,
                    );
                    p.copy = CopyKind::Forged;
                    // Blacklisted flooders have no routes; they still reach
                    // whoever is in radio range.
                    let routed = self.nodes[a.index()].olsr.routes().next_hop(target);
                    let in_range = if self.adj.linked(a, target) {
                        Some(target)
                    } else {
                        self.adj.neighbors(a).first().copied()
                    };
                    match routed.or(in_range) {
                        Some(next) => {
                            p.link_dst = LinkDst::Unicast(next);
                            self.enqueue(a, p, a);
                        }
                        None => self.drop_packet(a, &p, DropCause::NoRoute),
                    }
                }
                self.after(period(rate), a, Ev::AttackTick);
            }
            _ => {}
        }
    }

    // ---- report -----------------------------------------------------------

    fn report(&mut self) -> MetricsReport {
        let end = self.cfg.duration;
        let flows: Vec<_> = self
            .flows
            .iter()
            .map(|rt| rt.ledger.finalize(end))
            .collect();
        let aggregate = Aggregate::of(&flows);
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let (mut control, mut total) = (0, 0);
        let mut integrity_blocked = 0;
        for node in &self.nodes {
            let mut c = node.counters.clone();
            c.overflow_control = node.queue.counters.overflow_control;
            c.overflow_data = node.queue.counters.overflow_data;
            c.firewall = node.queue.counters.firewall;
            control += c.control_bytes;
            total += c.tx_bytes;
            integrity_blocked += node.reassembly.integrity_blocked;
            nodes.push(c);
        }
        let report = MetricsReport {
            seed: self.cfg.seed,
            duration: end,
            aggregate,
            drop_events: self.drop_events,
            control_bytes: control,
            total_bytes: total,
            control_overhead: if total == 0 {
                0.0
            } else {
                control as f64 / total as f64
            },
            nodes,
            eavesdropper_recovered_bytes: self.eavesdropped,
            integrity_blocked,
            blacklist_events: self.blacklist_events.clone(),
            isolation_violations: self.isolation_violations,
            duplicate_deliveries: self
                .flows
                .iter()
                .map(|rt| rt.ledger.duplicate_deliveries)
                .sum(),
            payload_mismatches: self.payload_mismatches,
            cwnd_traces: self
                .flows
                .iter()
                .map(|rt| CwndTrace {
                    flow_id: rt.sender.id,
                    samples: rt.sender.cwnd_trace.clone(),
                })
                .collect(),
            assertion_failures: self.assertion_failures.clone(),
            events_processed: self.engine.processed(),
            trace_digest: self.trace.digest_hex(),
            flows,
        };
        let mut report = report;
        if let Err(e) = report.check_accounting() {
            report.assertion_failures.push(e.to_string());
        }
        report
    }

    /// Routing state of one node, for inspection in tests and tools.
    pub fn node_state(&self, n: NodeId) -> &NodeState {
        &self.nodes[n.index()].olsr
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adj
    }
}

/// Interval between emissions at `rate` per second, at least 1 µs.
fn period(rate: f64) -> SimTime {
    SimTime::from_secs_f64(1.0 / rate).max(SimTime(1))
}
