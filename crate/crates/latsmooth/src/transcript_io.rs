//! Line-oriented transcripts: one `role<TAB>type<TAB>payload` line per
//! message, then `verifier<TAB>outcome<TAB>accept|reject`.
//!
//! Payloads: `point` is space-separated decimals (shortest round-trip form),
//! `bit` is `0`/`1`, `bits` a string of `0`/`1`, and `hash` is the bits of
//! `a`, a space, and the offset bit `b`.

use latsmooth_core::protocols::{Message, Outcome, Payload, Role, Transcript};
use latsmooth_core::samplers::{Bits, HashFn};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TranscriptError {
    #[error("line {line}: expected three tab-separated fields")]
    Fields { line: usize },
    #[error("line {line}: unknown role {role:?}")]
    Role { line: usize, role: String },
    #[error("line {line}: unknown message type {kind:?}")]
    Kind { line: usize, kind: String },
    #[error("line {line}: malformed payload {payload:?}")]
    Payload { line: usize, payload: String },
    #[error("transcript has no outcome line")]
    MissingOutcome,
    #[error("line {line}: messages after the outcome line")]
    AfterOutcome { line: usize },
}

fn bits_str(b: &Bits) -> String {
    b.iter().map(|x| if x { '1' } else { '0' }).collect()
}

fn parse_bits(s: &str) -> Option<Bits> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
        .map(|v| Bits::from_bools(&v))
}

pub fn payload_kind(p: &Payload) -> &'static str {
    match p {
        Payload::Point(_) => "point",
        Payload::Bit(_) => "bit",
        Payload::Bits(_) => "bits",
        Payload::Hash(_) => "hash",
    }
}

pub fn payload_text(p: &Payload) -> String {
    match p {
        Payload::Point(x) => x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
        Payload::Bit(b) => if *b { "1" } else { "0" }.to_string(),
        Payload::Bits(b) => bits_str(b),
        Payload::Hash(h) => format!("{} {}", bits_str(&h.a), h.b as u8),
    }
}

pub fn write_transcript(t: &Transcript) -> String {
    let mut out = String::new();
    for m in &t.messages {
        out.push_str(&format!("{}\t{}\t{}\n", m.role.as_str(), payload_kind(&m.payload), payload_text(&m.payload)));
    }
    out.push_str(&format!("verifier\toutcome\t{}\n", t.outcome.as_str()));
    out
}

fn parse_payload(kind: &str, text: &str) -> Option<Payload> {
    match kind {
        "point" => text.split(' ').map(|t| t.parse().ok()).collect::<Option<Vec<f64>>>().map(Payload::Point),
        "bit" => match text {
            "0" => Some(Payload::Bit(false)),
            "1" => Some(Payload::Bit(true)),
            _ => None,
        },
        "bits" => parse_bits(text).map(Payload::Bits),
        "hash" => {
            let (a, b) = text.split_once(' ')?;
            let b = match b {
                "0" => false,
                "1" => true,
                _ => return None,
            };
            Some(Payload::Hash(HashFn { a: parse_bits(a)?, b }))
        }
        _ => None,
    }
}

pub fn parse_transcript(text: &str) -> Result<Transcript, TranscriptError> {
    let mut messages = Vec::new();
    let mut outcome = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.is_empty() {
            continue;
        }
        if outcome.is_some() {
            return Err(TranscriptError::AfterOutcome { line });
        }
        let mut f = raw.splitn(3, '\t');
        let (Some(role), Some(kind), Some(payload)) = (f.next(), f.next(), f.next()) else {
            return Err(TranscriptError::Fields { line });
        };
        let role = match role {
            "verifier" => Role::Verifier,
            "prover" => Role::Prover,
            _ => return Err(TranscriptError::Role { line, role: role.to_string() }),
        };
        if kind == "outcome" {
            outcome = Some(match payload {
                "accept" => Outcome::Accept,
                "reject" => Outcome::Reject,
                _ => return Err(TranscriptError::Payload { line, payload: payload.to_string() }),
            });
            continue;
        }
        if !matches!(kind, "point" | "bit" | "bits" | "hash") {
            return Err(TranscriptError::Kind { line, kind: kind.to_string() });
        }
        let payload = parse_payload(kind, payload)
            .ok_or_else(|| TranscriptError::Payload { line, payload: payload.to_string() })?;
        messages.push(Message { role, payload });
    }
    Ok(Transcript { messages, outcome: outcome.ok_or(TranscriptError::MissingOutcome)? })
}
