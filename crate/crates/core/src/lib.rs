//! Receipt-backed verification of AI-agent responses.
//!
//! Tool calls are recorded as HMAC-signed [`receipt::ToolReceipt`]s in an
//! append-only [`ledger::Ledger`]. Responses carry a self-tagging block that
//! assigns each claim an epistemic source ([`claim::Pramana`]); the
//! [`engine`] checks every claim against the ledger and folds the verdicts
//! into a [`engine::TrustLevel`], which a [`policy::Constitution`] maps to a
//! pass / warn / block action.
//!
//! Autonomous agents whose tool calls cannot be receipted are handled by
//! [`crosscheck`]. The [`bench`] module generates fault-injected scenario
//! corpora and scores detectors against them.
//!
//! The crate is `no_std` and only needs `alloc`. Time, randomness for ids and
//! network access are injected through the traits in [`clock`],
//! [`receipt::IdSource`] and [`crosscheck::Fetcher`].

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bench;
pub mod canonical;
pub mod claim;
pub mod clock;
pub mod crosscheck;
pub mod engine;
pub mod expr;
pub mod lang;
pub mod ledger;
pub mod numeral;
pub mod phrases;
pub mod policy;
pub mod receipt;

pub use claim::{parse_verification_block, Claim, ParsedResponse, Pramana};
pub use engine::{verify_response, TrustLevel, TrustReport, Verdict, VerdictKind};
pub use lang::Lang;
pub use ledger::Ledger;
pub use policy::{apply_policy, Action, Constitution, PolicyDecision};
pub use receipt::{generate_receipt, verify_receipt_signature, SigningKey, ToolReceipt};
