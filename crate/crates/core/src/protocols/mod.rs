//! Simulations of the interactive protocols: GGG and its simulator, the
//! SPCom commitment and its amplification, the coAM shell protocol with a
//! toy set-size lower bound, and the BDD-prover decider.

use alloc::vec::Vec;

use crate::basis::Point;
use crate::samplers::{Bits, HashFn};

pub mod amplify;
pub mod coam;
pub mod ggg;
pub mod gs;
pub mod spcom;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Verifier,
    Prover,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Verifier => "verifier",
            Role::Prover => "prover",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Point(Point),
    Bit(bool),
    Bits(Bits),
    Hash(HashFn),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub role: Role,
    pub payload: Payload,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Accept,
    Reject,
}

impl Outcome {
    pub fn from_bool(accept: bool) -> Self {
        if accept {
            Outcome::Accept
        } else {
            Outcome::Reject
        }
    }

    pub fn is_accept(self) -> bool {
        self == Outcome::Accept
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Accept => "accept",
            Outcome::Reject => "reject",
        }
    }
}

/// Role-tagged messages plus the verifier's decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub messages: Vec<Message>,
    pub outcome: Outcome,
}

impl Transcript {
    pub(crate) fn new() -> Self {
        Self { messages: Vec::new(), outcome: Outcome::Reject }
    }

    pub(crate) fn push(&mut self, role: Role, payload: Payload) {
        self.messages.push(Message { role, payload });
    }
}
