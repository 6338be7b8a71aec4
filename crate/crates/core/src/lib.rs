//! Delete-and-split Nim: closed-form outcome classification, constructive
//! winning moves and an exhaustive oracle for Delete Nim, VDN,
//! All-but-one-delete, No-more-than-half-delete, Half-delete,
//! (k-1)/k·n-delete and Single-delete Nim.
//!
//! ```
//! use delnim_core::{canonicalize, classify, winning_move, Class, Ruleset};
//!
//! let abo3: Ruleset = "abo:3".parse().unwrap();
//! let p = canonicalize(&[9, 1, 1], abo3).unwrap();
//! assert_eq!(classify(abo3, &p).unwrap().class, Class::N);
//! let m = winning_move(abo3, &p).unwrap().unwrap();
//! assert_eq!(m.result.heaps(), &[1, 1, 7]);
//! ```

pub mod classifier;
pub mod error;
pub mod game;
pub mod numtheory;
pub mod oracle;
pub mod strategy;
pub mod sweep;

pub use classifier::{classify, delete_nim_grundy, ConditionId};
pub use error::{Error, IllegalMoveReason, Result};
pub use game::{
    canonicalize, is_terminal, position, Certificate, CertificateStatus, Class, Family, MoveChoice,
    MoveRecord, Outcome, Position, Ruleset, MAX_HEAPS,
};
pub use oracle::{Oracle, OracleConfig};
pub use strategy::{apply, legal_moves, successors, winning_move};
pub use sweep::{sweep, SweepReport, SweepRow, SweepSummary};
