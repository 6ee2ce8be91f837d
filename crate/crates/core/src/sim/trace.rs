use std::fmt::Write as _;

use crate::SimTime;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Event trace. Every line is folded into a 64-bit FNV-1a digest; the lines
/// themselves are kept only on request.
#[derive(Debug, Clone)]
pub struct Trace {
    digest: u64,
    lines: Option<Vec<String>>,
    buf: String,
}

impl Trace {
    pub fn new(keep_lines: bool) -> Self {
        Trace {
            digest: FNV_OFFSET,
            lines: keep_lines.then(Vec::new),
            buf: String::new(),
        }
    }

    pub fn record(&mut self, now: SimTime, msg: std::fmt::Arguments<'_>) {
        self.buf.clear();
        let _ = write!(self.buf, "{now} {msg}");
        for b in self.buf.bytes().chain(std::iter::once(b'\n')) {
            self.digest ^= b as u64;
            self.digest = self.digest.wrapping_mul(FNV_PRIME);
        }
        if let Some(lines) = &mut self.lines {
            lines.push(self.buf.clone());
        }
    }

    pub fn digest_hex(&self) -> String {
        format!("{:016x}", self.digest)
    }

    pub fn take_lines(&mut self) -> Vec<String> {
        self.lines.take().unwrap_or_default()
    }
}
