use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arena {
    pub width: f64,
    pub height: f64,
}

impl Arena {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.width).contains(&x) && (0.0..=self.height).contains(&y)
    }

    pub fn clamp(&self, x: f64, y: f64) -> (f64, f64) {
        (x.clamp(0.0, self.width), y.clamp(0.0, self.height))
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let x = rng.gen_range(0.0..=self.width);
        let y = rng.gen_range(0.0..=self.height);
        (x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilityParams {
    pub arena: Arena,
    /// m/s
    pub min_speed: f64,
    /// m/s
    pub max_speed: f64,
    pub pause: SimTime,
}

impl MobilityParams {
    pub fn draw_speed<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.max_speed <= 0.0 {
            return 0.0;
        }
        rng.gen_range(self.min_speed..=self.max_speed)
    }
}

/// Position and random-waypoint state of one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodePosition {
    pub x: f64,
    pub y: f64,
    pub waypoint: (f64, f64),
    /// m/s
    pub speed: f64,
    pub pause_left: SimTime,
}

impl NodePosition {
    pub fn stationary(x: f64, y: f64) -> Self {
        NodePosition {
            x,
            y,
            waypoint: (x, y),
            speed: 0.0,
            pause_left: SimTime::ZERO,
        }
    }

    pub fn distance_to(&self, other: &NodePosition) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Random-waypoint step: move toward the waypoint at the current speed; on
/// arrival pause, then draw a fresh waypoint (x, then y) and speed from `rng`.
/// A zero speed is a fixed point and consumes no randomness.
pub fn advance_mobility<R: Rng + ?Sized>(
    pos: NodePosition,
    dt: SimTime,
    params: &MobilityParams,
    rng: &mut R,
) -> NodePosition {
    let mut p = pos;
    let mut remaining = dt.as_secs_f64();
    // A pathological run of zero-length legs cannot spin forever.
    for _ in 0..64 {
        if remaining <= 0.0 {
            break;
        }
        if p.pause_left > SimTime::ZERO {
            let pause = p.pause_left.as_secs_f64();
            if pause >= remaining {
                p.pause_left = SimTime::from_secs_f64(pause - remaining);
                break;
            }
            remaining -= pause;
            p.pause_left = SimTime::ZERO;
        }
        if p.speed <= 0.0 {
            break;
        }
        let (wx, wy) = p.waypoint;
        let dist = (wx - p.x).hypot(wy - p.y);
        let reach = p.speed * remaining;
        if reach < dist {
            p.x += (wx - p.x) / dist * reach;
            p.y += (wy - p.y) / dist * reach;
            break;
        }
        p.x = wx;
        p.y = wy;
        remaining -= dist / p.speed;
        p.waypoint = params.arena.random_point(rng);
        p.speed = params.draw_speed(rng);
        p.pause_left = params.pause;
    }
    let (x, y) = params.arena.clamp(p.x, p.y);
    p.x = x;
    p.y = y;
    p
}
