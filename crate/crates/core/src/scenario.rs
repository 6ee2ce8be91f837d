//! Scenario files.
//!
//! Line-oriented: `key = value` pairs under `[section]` headers, `#` starts a
//! comment. Top-level keys come before the first section. `[node]`, `[flow]`
//! and `[attack]` may repeat; every other section appears at most once.
//! Times are decimal seconds with at most six fractional digits unless the
//! key says otherwise (`_ms`). Unknown and repeated keys are errors.
//!
//! ```text
//! seed = 1
//! duration = 60
//! nodes = 4
//!
//! [radio]
//! range = 150
//!
//! [flow]
//! src = 0
//! dst = 3
//! start = 10
//! kind = bulk
//! bytes = 60000
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attacks::{AttackBehavior, AttackKind};
use crate::kernel::Arena;
use crate::olsr::OlsrConfig;
use crate::transport::{CcVariant, FlowSpec, TrafficKind};
use crate::{NodeId, SimTime};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioConfig {
    pub range: f64,
    pub per_hop_delay: SimTime,
    /// bits per second
    pub link_rate: u64,
    /// packets per traffic class
    pub queue_capacity: usize,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            range: 250.0,
            per_hop_delay: SimTime::from_millis(2),
            link_rate: 2_000_000,
            queue_capacity: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilityConfig {
    pub min_speed: f64,
    pub max_speed: f64,
    pub pause: SimTime,
    pub tick: SimTime,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        MobilityConfig {
            min_speed: 0.0,
            max_speed: 0.0,
            pause: SimTime::ZERO,
            tick: SimTime::from_millis(100),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityConfig {
    pub key: [u8; 16],
    pub encryption: bool,
    pub alternate_relay: bool,
    /// Blacklist senders of unauthenticated control traffic. When off such
    /// traffic is processed like any other.
    pub honeypot: bool,
}

impl Default for SecurityConfig {
    fn default() -> Self {
        SecurityConfig {
            key: *b"secmanet-default",
            encryption: true,
            alternate_relay: true,
            honeypot: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissionConfig {
    /// Concurrent flows per source.
    pub capacity: usize,
    /// Required free bandwidth per flow; `None` means 10% of the link rate.
    pub reservation: Option<u64>,
}

impl Default for AdmissionConfig {
    fn default() -> Self {
        AdmissionConfig {
            capacity: 3,
            reservation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportConfig {
    pub variant: CcVariant,
    pub smss: u32,
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig {
            variant: CcVariant::NewReno,
            smss: 1200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub node: NodeId,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub duration: SimTime,
    pub nodes: usize,
    pub arena: Arena,
    /// Nodes without a placement start at a random point.
    pub placements: Vec<Placement>,
    pub mobility: MobilityConfig,
    pub radio: RadioConfig,
    pub olsr: OlsrConfig,
    pub security: SecurityConfig,
    pub admission: AdmissionConfig,
    pub transport: TransportConfig,
    pub flows: Vec<FlowSpec>,
    pub attacks: Vec<AttackBehavior>,
}

impl ScenarioConfig {
    pub fn new(nodes: usize) -> Self {
        ScenarioConfig {
            seed: 1,
            duration: SimTime::from_secs(60),
            nodes,
            arena: Arena {
                width: 1000.0,
                height: 1000.0,
            },
            placements: Vec::new(),
            mobility: MobilityConfig::default(),
            radio: RadioConfig::default(),
            olsr: OlsrConfig::default(),
            security: SecurityConfig::default(),
            admission: AdmissionConfig::default(),
            transport: TransportConfig::default(),
            flows: Vec::new(),
            attacks: Vec::new(),
        }
    }

    pub fn reservation(&self) -> u64 {
        self.admission
            .reservation
            .unwrap_or(self.radio.link_rate / 10)
    }

    pub fn attack_on(&self, node: NodeId) -> Option<&AttackBehavior> {
        self.attacks.iter().find(|a| a.node == node)
    }

    pub fn placement(&self, node: NodeId) -> Option<(f64, f64)> {
        self.placements
            .iter()
            .find(|p| p.node == node)
            .map(|p| (p.x, p.y))
    }

    /// Semantic checks shared by the parser and programmatic construction.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let sem = |field: &str, msg: String| ScenarioError::Semantic {
            field: field.to_string(),
            message: msg,
        };
        if self.nodes == 0 {
            return Err(sem("nodes", "must be at least 1".into()));
        }
        if self.duration == SimTime::ZERO {
            return Err(sem("duration", "must be positive".into()));
        }
        if !(self.arena.width > 0.0 && self.arena.height > 0.0) {
            return Err(sem("arena", "width and height must be positive".into()));
        }
        if self.radio.range.is_nan() || self.radio.range <= 0.0 {
            return Err(sem("radio.range", "must be positive".into()));
        }
        if self.radio.per_hop_delay == SimTime::ZERO {
            return Err(sem("radio.per_hop_delay_ms", "must be positive".into()));
        }
        if self.radio.link_rate == 0 {
            return Err(sem("radio.link_rate_bps", "must be positive".into()));
        }
        if self.mobility.min_speed < 0.0 || self.mobility.max_speed < self.mobility.min_speed {
            return Err(sem("mobility", "need 0 <= min_speed <= max_speed".into()));
        }
        if self.mobility.tick == SimTime::ZERO {
            return Err(sem("mobility.tick_ms", "must be positive".into()));
        }
        if self.transport.smss == 0 {
            return Err(sem("transport.smss", "must be positive".into()));
        }
        let n = self.nodes as u32;
        let mut placed = BTreeSet::new();
        for p in &self.placements {
            if p.node.0 >= n {
                return Err(sem("node.id", format!("{} out of range", p.node)));
            }
            if !placed.insert(p.node) {
                return Err(sem("node.id", format!("{} placed twice", p.node)));
            }
            if !self.arena.contains(p.x, p.y) {
                return Err(sem(
                    "node.x",
                    format!("{} placed outside the arena", p.node),
                ));
            }
        }
        for f in &self.flows {
            if f.src.0 >= n {
                return Err(sem("flow.src", "src out of range".into()));
            }
            if f.dst.0 >= n {
                return Err(sem("flow.dst", "dst out of range".into()));
            }
            if f.src == f.dst {
                return Err(sem("flow.dst", "dst equals src".into()));
            }
            match f.kind {
                TrafficKind::Bulk if f.bytes_total == 0 => {
                    return Err(sem("flow.bytes", "bulk flow needs bytes > 0".into()))
                }
                TrafficKind::Streaming if f.rate == 0 => {
                    return Err(sem("flow.rate", "streaming flow needs rate > 0".into()))
                }
                _ => {}
            }
        }
        let mut attackers = BTreeSet::new();
        for a in &self.attacks {
            if a.node.0 >= n {
                return Err(sem("attack.node", "node out of range".into()));
            }
            if !attackers.insert(a.node) {
                return Err(sem("attack.node", format!("{} has two behaviors", a.node)));
            }
            if a.target.is_some_and(|t| t.0 >= n) {
                return Err(sem("attack.target", "target out of range".into()));
            }
            a.validate().map_err(|e| sem("attack", e.to_string()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: duplicate key `{key}` (first set on line {first})")]
    DuplicateKey {
        line: usize,
        key: String,
        first: usize,
    },
    #[error("line {line}: bad value for `{key}`: {message}")]
    Value {
        line: usize,
        key: String,
        message: String,
    },
    #[error("missing required `{0}`")]
    Missing(String),
    #[error("{field}: {message}")]
    Semantic { field: String, message: String },
}

/// One parsed `[section]` with its key/value lines.
struct Block {
    name: String,
    entries: Vec<(usize, String, String)>,
}

fn split_blocks(text: &str) -> Result<Vec<Block>, ScenarioError> {
    let mut blocks = vec![Block {
        name: String::new(),
        entries: Vec::new(),
    }];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ScenarioError::Syntax {
                    line,
                    message: format!("unterminated section header `{content}`"),
                })?;
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(ScenarioError::Syntax {
                    line,
                    message: format!("bad section name `{name}`"),
                });
            }
            blocks.push(Block {
                name: name.to_string(),
                entries: Vec::new(),
            });
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| ScenarioError::Syntax {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ScenarioError::Syntax {
                line,
                message: "empty key or value".into(),
            });
        }
        let block = blocks.last_mut().expect("root block");
        if let Some((first, _, _)) = block.entries.iter().find(|(_, key, _)| key == k) {
            return Err(ScenarioError::DuplicateKey {
                line,
                key: k.to_string(),
                first: *first,
            });
        }
        block.entries.push((line, k.to_string(), v.to_string()));
    }
    Ok(blocks)
}

fn value_err(line: usize, key: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Value {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ScenarioError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| value_err(line, key, format!("`{v}` is not a finite number")))
}

fn parse_int<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, ScenarioError> {
    v.parse::<T>()
        .map_err(|_| value_err(line, key, format!("`{v}` is not a non-negative integer")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool, ScenarioError> {
    match v {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        _ => Err(value_err(line, key, format!("`{v}` is not on/off"))),
    }
}

/// Exact decimal seconds, up to microsecond precision.
fn parse_secs(line: usize, key: &str, v: &str) -> Result<SimTime, ScenarioError> {
    let bad = || value_err(line, key, format!("`{v}` is not a time in seconds"));
    let (int, frac) = v.split_once('.').unwrap_or((v, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac.len() > 6 {
        return Err(value_err(line, key, "more than six fractional digits"));
    }
    let whole: u64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let micros: u64 = format!("{frac:0<6}").parse().map_err(|_| bad())?;
    whole
        .checked_mul(1_000_000)
        .and_then(|w| w.checked_add(micros))
        .map(SimTime)
        .ok_or_else(bad)
}

fn parse_ms(line: usize, key: &str, v: &str) -> Result<SimTime, ScenarioError> {
    let ms: u64 = parse_int(line, key, v)?;
    ms.checked_mul(1000)
        .map(SimTime)
        .ok_or_else(|| value_err(line, key, "too large"))
}

fn fmt_secs(t: SimTime) -> String {
    let us = t.as_micros();
    let (s, frac) = (us / 1_000_000, us % 1_000_000);
    if frac == 0 {
        s.to_string()
    } else {
        let f = format!("{frac:06}");
        format!("{s}.{}", f.trim_end_matches('0'))
    }
}

fn on_off(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let blocks = split_blocks(text)?;
    let mut cfg = ScenarioConfig::new(0);
    let mut nodes_set = false;
    let mut seen_sections = BTreeSet::new();

    for block in &blocks {
        let repeatable = matches!(block.name.as_str(), "node" | "flow" | "attack");
        if !block.name.is_empty() && !repeatable && !seen_sections.insert(block.name.clone()) {
            let line = block.entries.first().map_or(0, |e| e.0);
            return Err(ScenarioError::Syntax {
                line,
                message: format!("section [{}] repeated", block.name),
            });
        }
        let unknown = |line: usize, key: &str| ScenarioError::UnknownKey {
            line,
            section: block.name.clone(),
            key: key.to_string(),
        };
        match block.name.as_str() {
            "" => {
                for (line, k, v) in &block.entries {
                    let (line, k, v) = (*line, k.as_str(), v.as_str());
                    match k {
                        "seed" => cfg.seed = parse_int(line, k, v)?,
                        "duration" => cfg.duration = parse_secs(line, k, v)?,
                        "nodes" => {
                            cfg.nodes = parse_int(line, k, v)?;
                            nodes_set = true;
                        }
                        _ => return Err(unknown(line, k)),
                    }
                }
            }
            "arena" => {
                for (line, k, v) in &block.entries {
                    let (line, k, v) = (*line, k.as_str(), v.as_str());
                    match k {
                        "width" => cfg.arena.width = parse_f64(line, k, v)?,
                        "height" => cfg.arena.height = parse_f64(line, k, v)?,
                        _ => return Err(unknown(line, k)),
                    }
                }
            }
            "radio" => {
                for (line, k, v) in &block.entries {
                    let (line, k, v) = (*line, k.as_str(), v.as_str());
                    match k {
                        "range" => cfg.radio.range = parse_f64(line, k, v)?,
                        "per_hop_delay_ms" => cfg.radio.per_hop_delay = parse_ms(line, k, v)?,
                        "link_rate_bps" => cfg.radio.link_rate = parse_int(line, k, v)?,
                        "queue_capacity" => cfg.radio.queue_capacity = parse_int(line, k, v)?,
                        _ => return Err(unknown(line, k)),
                    }
                }
            }
            "mobility" => {
                for (line, k, v) in &block.entries {
                    let (line, k, v) = (*line, k.as_str(), v.as_str());
                    match k {
                        "min_speed" => cfg.mobility.min_speed = parse_f64(line, k, v)?,
                        "max_speed" => cfg.mobility.max_speed = parse_f64(line, k, v)?,
                        "pause" => cfg.mobility.pause = parse_secs(line, k, v)?,
                        "tick_ms" => cfg.mobility.tick = parse_ms(line, k, v)?,
                        _ => return Err(unknown(line, k)),
                    }
                }
            }
            "olsr" => {
                for (line, k, v) in &block.entries {
                    let (line, k, v) = (*line, k.as_str(), v.as_str());
                    let o = &mut cfg.olsr;
                    match k {
                        "hello_interval" => o.hello_interval = parse_secs(line, k, v)?,
                        "tc_interval" => o.tc_interval = parse_secs(line, k, v)?,
                        "neighb_hold" => o.neighb_hold = parse_secs(line, k, v)?,
                        "top_hold" => o.top_hold = parse_secs(line, k, v)?,
                        "dup_hold" => o.dup_hold = parse_secs(line, k, v)?,
                        "ttl" => o.ttl = parse_int(line, k, v)?,
                        _ => return Err(unknown(line, k)),
                    }
                }
                if cfg.olsr.hello_interval == SimTime::ZERO || cfg.olsr.tc_interval == SimTime::ZERO
                {
                    return Err(ScenarioError::Semantic {
                        field: "olsr".into(),
                        message: "intervals must be positive".into(),
                    });
                }
            }
            "security" => {
                for (line, k, v) in &block.entries {
                    let (line, k, v) = (*line, k.as_str(), v.as_str());
                    let s = &mut cfg.security;
                    match k {
                        "key" => {
                            let bytes = hex::decode(v)
                                .map_err(|e| value_err(line, k, format!("not hex: {e}")))?;
                            s.key = bytes.try_into().map_err(|b: Vec<u8>| {
                                value_err(line, k, format!("key must be 16 bytes, got {}", b.len()))
                            })?;
                        }
                        "encryption" => s.encryption = parse_bool(line, k, v)?,
                        "alternate_relay" => s.alternate_relay = parse_bool(line, k, v)?,
                        "honeypot" => s.honeypot = parse_bool(line, k, v)?,
                        _ => return Err(unknown(line, k)),
                    }
                }
            }
            "admission" => {
                for (line, k, v) in &block.entries {
                    let (line, k, v) = (*line, k.as_str(), v.as_str());
                    match k {
                        "capacity" => cfg.admission.capacity = parse_int(line, k, v)?,
                        "reservation_bps" => {
                            cfg.admission.reservation = Some(parse_int(line, k, v)?)
                        }
                        _ => return Err(unknown(line, k)),
                    }
                }
            }
            "transport" => {
                for (line, k, v) in &block.entries {
                    let (line, k, v) = (*line, k.as_str(), v.as_str());
                    match k {
                        "variant" => {
                            cfg.transport.variant = match v {
                                "newreno" => CcVariant::NewReno,
                                "reno" => CcVariant::Reno,
                                _ => return Err(value_err(line, k, "expected newreno or reno")),
                            }
                        }
                        "smss" => cfg.transport.smss = parse_int(line, k, v)?,
                        _ => return Err(unknown(line, k)),
                    }
                }
            }
            "node" => cfg.placements.push(parse_node(block, &unknown)?),
            "flow" => cfg.flows.push(parse_flow(block, &unknown)?),
            "attack" => cfg.attacks.push(parse_attack(block, &unknown)?),
            other => {
                let line = block.entries.first().map_or(0, |e| e.0);
                return Err(ScenarioError::Syntax {
                    line,
                    message: format!("unknown section [{other}]"),
                });
            }
        }
    }
    if !nodes_set {
        return Err(ScenarioError::Missing("nodes".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

type Unknown<'a> = dyn Fn(usize, &str) -> ScenarioError + 'a;

fn require<T>(v: Option<T>, section: &str, key: &str) -> Result<T, ScenarioError> {
    v.ok_or_else(|| ScenarioError::Missing(format!("{section}.{key}")))
}

fn parse_node(block: &Block, unknown: &Unknown<'_>) -> Result<Placement, ScenarioError> {
    let (mut id, mut x, mut y) = (None, None, None);
    for (line, k, v) in &block.entries {
        let (line, k, v) = (*line, k.as_str(), v.as_str());
        match k {
            "id" => id = Some(NodeId(parse_int(line, k, v)?)),
            "x" => x = Some(parse_f64(line, k, v)?),
            "y" => y = Some(parse_f64(line, k, v)?),
            _ => return Err(unknown(line, k)),
        }
    }
    Ok(Placement {
        node: require(id, "node", "id")?,
        x: require(x, "node", "x")?,
        y: require(y, "node", "y")?,
    })
}

fn parse_flow(block: &Block, unknown: &Unknown<'_>) -> Result<FlowSpec, ScenarioError> {
    let (mut src, mut dst, mut start, mut kind, mut bytes, mut rate) =
        (None, None, SimTime::ZERO, TrafficKind::Bulk, 0u64, 0u64);
    for (line, k, v) in &block.entries {
        let (line, k, v) = (*line, k.as_str(), v.as_str());
        match k {
            "src" => src = Some(NodeId(parse_int(line, k, v)?)),
            "dst" => dst = Some(NodeId(parse_int(line, k, v)?)),
            "start" => start = parse_secs(line, k, v)?,
            "kind" => {
                kind = match v {
                    "bulk" => TrafficKind::Bulk,
                    "streaming" => TrafficKind::Streaming,
                    _ => return Err(value_err(line, k, "expected bulk or streaming")),
                }
            }
            "bytes" => bytes = parse_int(line, k, v)?,
            "rate" => rate = parse_int(line, k, v)?,
            _ => return Err(unknown(line, k)),
        }
    }
    Ok(FlowSpec {
        src: require(src, "flow", "src")?,
        dst: require(dst, "flow", "dst")?,
        start,
        kind,
        bytes_total: bytes,
        rate,
    })
}

fn parse_attack(block: &Block, unknown: &Unknown<'_>) -> Result<AttackBehavior, ScenarioError> {
    let mut node = None;
    let mut kind_name: Option<(usize, String)> = None;
    let (mut from, mut to) = (SimTime::ZERO, SimTime::MAX);
    let (mut p, mut delay, mut rate, mut target) = (None, None, None, None);
    for (line, k, v) in &block.entries {
        let (line, k, v) = (*line, k.as_str(), v.as_str());
        match k {
            "node" => node = Some(NodeId(parse_int(line, k, v)?)),
            "kind" => kind_name = Some((line, v.to_string())),
            "from" => from = parse_secs(line, k, v)?,
            "to" => to = parse_secs(line, k, v)?,
            "p" => p = Some(parse_f64(line, k, v)?),
            "delay" => delay = Some(parse_secs(line, k, v)?),
            "rate" => rate = Some(parse_f64(line, k, v)?),
            "target" => target = Some(NodeId(parse_int(line, k, v)?)),
            _ => return Err(unknown(line, k)),
        }
    }
    let (line, name) = require(kind_name, "attack", "kind")?;
    let kind = match name.as_str() {
        "blackhole" => AttackKind::Blackhole,
        "greyhole" => AttackKind::Greyhole {
            p: require(p, "attack", "p")?,
        },
        "modifier" => AttackKind::Modifier,
        "replayer" => AttackKind::Replayer {
            delay: require(delay, "attack", "delay")?,
        },
        "fabricator" => AttackKind::Fabricator {
            rate: require(rate, "attack", "rate")?,
        },
        "eavesdropper" => AttackKind::Eavesdropper,
        "dos_flooder" => AttackKind::DosFlooder {
            rate: require(rate, "attack", "rate")?,
        },
        other => return Err(value_err(line, "kind", format!("unknown attack `{other}`"))),
    };
    if matches!(kind, AttackKind::DosFlooder { .. }) && target.is_none() {
        return Err(ScenarioError::Missing("attack.target".into()));
    }
    Ok(AttackBehavior {
        node: require(node, "attack", "node")?,
        kind,
        active_from: from,
        active_to: to,
        target,
    })
}

/// Canonical text form; `parse_scenario(&serialize_scenario(c)) == c` for
/// every valid config.
pub fn serialize_scenario(cfg: &ScenarioConfig) -> String {
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "seed = {}", cfg.seed);
    let _ = writeln!(w, "duration = {}", fmt_secs(cfg.duration));
    let _ = writeln!(w, "nodes = {}", cfg.nodes);
    let _ = writeln!(
        w,
        "\n[arena]\nwidth = {:?}\nheight = {:?}",
        cfg.arena.width, cfg.arena.height
    );
    let r = &cfg.radio;
    let _ = writeln!(
        w,
        "\n[radio]\nrange = {:?}\nper_hop_delay_ms = {}\nlink_rate_bps = {}\nqueue_capacity = {}",
        r.range,
        r.per_hop_delay.as_micros() / 1000,
        r.link_rate,
        r.queue_capacity
    );
    let m = &cfg.mobility;
    let _ = writeln!(
        w,
        "\n[mobility]\nmin_speed = {:?}\nmax_speed = {:?}\npause = {}\ntick_ms = {}",
        m.min_speed,
        m.max_speed,
        fmt_secs(m.pause),
        m.tick.as_micros() / 1000
    );
    let o = &cfg.olsr;
    let _ = writeln!(
        w,
        "\n[olsr]\nhello_interval = {}\ntc_interval = {}\nneighb_hold = {}\ntop_hold = {}\ndup_hold = {}\nttl = {}",
        fmt_secs(o.hello_interval),
        fmt_secs(o.tc_interval),
        fmt_secs(o.neighb_hold),
        fmt_secs(o.top_hold),
        fmt_secs(o.dup_hold),
        o.ttl
    );
    let sec = &cfg.security;
    let _ = writeln!(
        w,
        "\n[security]\nkey = {}\nencryption = {}\nalternate_relay = {}\nhoneypot = {}",
        hex::encode(sec.key),
        on_off(sec.encryption),
        on_off(sec.alternate_relay),
        on_off(sec.honeypot)
    );
    let _ = writeln!(w, "\n[admission]\ncapacity = {}", cfg.admission.capacity);
    if let Some(res) = cfg.admission.reservation {
        let _ = writeln!(w, "reservation_bps = {res}");
    }
    let variant = match cfg.transport.variant {
        CcVariant::NewReno => "newreno",
        CcVariant::Reno => "reno",
    };
    let _ = writeln!(
        w,
        "\n[transport]\nvariant = {variant}\nsmss = {}",
        cfg.transport.smss
    );
    for p in &cfg.placements {
        let _ = writeln!(
            w,
            "\n[node]\nid = {}\nx = {:?}\ny = {:?}",
            p.node.0, p.x, p.y
        );
    }
    for f in &cfg.flows {
        let kind = match f.kind {
            TrafficKind::Bulk => "bulk",
            TrafficKind::Streaming => "streaming",
        };
        let _ = writeln!(
            w,
            "\n[flow]\nsrc = {}\ndst = {}\nstart = {}\nkind = {kind}\nbytes = {}\nrate = {}",
            f.src.0,
            f.dst.0,
            fmt_secs(f.start),
            f.bytes_total,
            f.rate
        );
    }
    for a in &cfg.attacks {
        let _ = writeln!(
            w,
            "\n[attack]\nnode = {}\nkind = {}",
            a.node.0,
            a.kind.name()
        );
        let _ = writeln!(w, "from = {}", fmt_secs(a.active_from));
        if a.active_to != SimTime::MAX {
            let _ = writeln!(w, "to = {}", fmt_secs(a.active_to));
        }
        match a.kind {
            AttackKind::Greyhole { p } => {
                let _ = writeln!(w, "p = {p:?}");
            }
            AttackKind::Replayer { delay } => {
                let _ = writeln!(w, "delay = {}", fmt_secs(delay));
            }
            AttackKind::Fabricator { rate } | AttackKind::DosFlooder { rate } => {
                let _ = writeln!(w, "rate = {rate:?}");
            }
            _ => {}
        }
        if let Some(t) = a.target {
            let _ = writeln!(w, "target = {}", t.0);
        }
    }
    s
}
