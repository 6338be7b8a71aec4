//! Positions, rulesets and moves shared by every other module.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifier::ConditionId;
use crate::error::{Error, Result};

/// Upper bound on the number of heaps any ruleset may ask for.
pub const MAX_HEAPS: usize = 64;

/// Game family plus parameters. Always valid: build it through the
/// constructors or [`FromStr`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Two heaps, zeros allowed; a move removes one token before splitting.
    DeleteNim,
    /// Variant Delete Nim: two heaps, delete one, split the other.
    Vdn,
    /// All-but-one-delete: delete n-1 heaps, split the last into n.
    Abo { n: usize },
    /// No-more-than-half-delete: delete j <= n/2 heaps, split j heaps in two.
    Nmth { n: usize },
    /// Half-delete on 2m heaps.
    Half { m: usize },
    /// Delete (k-1)m of km heaps, split each of the other m into k.
    KFrac { k: usize, m: usize },
    /// Delete one heap, split one heap in two.
    Single { n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ruleset(Family);

/// One admissible cardinality pattern for a move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct MoveShape {
    pub deletions: usize,
    pub splits: usize,
    pub parts: usize,
}

fn bounded(n: usize, min: usize, what: &str) -> Result<usize> {
    if n < min {
        return Err(Error::InvalidRuleset(format!("{what} must be >= {min}, got {n}")));
    }
    if n > MAX_HEAPS {
        return Err(Error::InvalidRuleset(format!(
            "{what} = {n} exceeds the supported maximum of {MAX_HEAPS} heaps"
        )));
    }
    Ok(n)
}

impl Ruleset {
    pub fn delete_nim() -> Self {
        Ruleset(Family::DeleteNim)
    }

    pub fn vdn() -> Self {
        Ruleset(Family::Vdn)
    }

    pub fn abo(n: usize) -> Result<Self> {
        Ok(Ruleset(Family::Abo { n: bounded(n, 2, "abo n")? }))
    }

    pub fn nmth(n: usize) -> Result<Self> {
        Ok(Ruleset(Family::Nmth { n: bounded(n, 2, "nmth n")? }))
    }

    pub fn half(m: usize) -> Result<Self> {
        bounded(m, 1, "half m")?;
        bounded(m.saturating_mul(2), 2, "half heap count")?;
        Ok(Ruleset(Family::Half { m }))
    }

    pub fn kfrac(k: usize, m: usize) -> Result<Self> {
        bounded(k, 2, "kfrac k")?;
        bounded(m, 1, "kfrac m")?;
        bounded(k.saturating_mul(m), 2, "kfrac heap count")?;
        Ok(Ruleset(Family::KFrac { k, m }))
    }

    pub fn single(n: usize) -> Result<Self> {
        Ok(Ruleset(Family::Single { n: bounded(n, 2, "single n")? }))
    }

    pub fn family(&self) -> Family {
        self.0
    }

    /// Number of heaps, which no move ever changes.
    pub fn heap_count(&self) -> usize {
        match self.0 {
            Family::DeleteNim | Family::Vdn => 2,
            Family::Abo { n } | Family::Nmth { n } | Family::Single { n } => n,
            Family::Half { m } => 2 * m,
            Family::KFrac { k, m } => k * m,
        }
    }

    /// Smallest legal heap size.
    pub fn min_heap(&self) -> u64 {
        match self.0 {
            Family::DeleteNim => 0,
            _ => 1,
        }
    }

    /// `(k, m)` when the ruleset is an instance of the (k-1)/k·n-delete family.
    pub fn as_kfrac(&self) -> Option<(usize, usize)> {
        match self.0 {
            Family::Vdn => Some((2, 1)),
            Family::Abo { n } => Some((n, 1)),
            Family::Half { m } => Some((2, m)),
            Family::KFrac { k, m } => Some((k, m)),
            _ => None,
        }
    }

    /// Tokens removed from a kept heap before it is split.
    pub(crate) fn token_removal(&self) -> u64 {
        match self.0 {
            Family::DeleteNim => 1,
            _ => 0,
        }
    }

    /// Smallest size of a part produced by a split.
    pub(crate) fn min_part(&self) -> u64 {
        self.min_heap()
    }

    pub(crate) fn shapes(&self) -> Vec<MoveShape> {
        match self.0 {
            Family::DeleteNim => vec![MoveShape { deletions: 1, splits: 1, parts: 2 }],
            Family::Nmth { n } => (1..=n / 2)
                .map(|j| MoveShape { deletions: j, splits: j, parts: 2 })
                .collect(),
            Family::Single { .. } => vec![MoveShape { deletions: 1, splits: 1, parts: 2 }],
            _ => {
                let (k, m) = self.as_kfrac().expect("kfrac family");
                vec![MoveShape { deletions: (k - 1) * m, splits: m, parts: k }]
            }
        }
    }
}

impl fmt::Display for Ruleset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Family::DeleteNim => write!(f, "delete-nim"),
            Family::Vdn => write!(f, "vdn"),
            Family::Abo { n } => write!(f, "abo:{n}"),
            Family::Nmth { n } => write!(f, "nmth:{n}"),
            Family::Half { m } => write!(f, "half:{m}"),
            Family::KFrac { k, m } => write!(f, "kfrac:{k},{m}"),
            Family::Single { n } => write!(f, "single:{n}"),
        }
    }
}

impl FromStr for Ruleset {
    type Err = Error;

    /// Parses the textual codes `delete-nim`, `vdn`, `abo:n`, `nmth:n`,
    /// `half:m`, `kfrac:k,m` and `single:n`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.split_once(':') {
            Some((name, args)) => (name, Some(args)),
            None => (s, None),
        };
        let params = |args: Option<&str>, count: usize| -> Result<Vec<usize>> {
            let args = args.ok_or_else(|| Error::InvalidRuleset(format!("`{s}` needs parameters")))?;
            let values = args
                .split(',')
                .map(|a| {
                    a.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidRuleset(format!("bad parameter `{a}` in `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != count {
                return Err(Error::InvalidRuleset(format!(
                    "`{name}` takes {count} parameter(s), got {}",
                    values.len()
                )));
            }
            Ok(values)
        };
        match name {
            "delete-nim" | "vdn" if args.is_some() => {
                Err(Error::InvalidRuleset(format!("`{name}` takes no parameters")))
            }
            "delete-nim" => Ok(Ruleset::delete_nim()),
            "vdn" => Ok(Ruleset::vdn()),
            "abo" => Ruleset::abo(params(args, 1)?[0]),
            "nmth" => Ruleset::nmth(params(args, 1)?[0]),
            "half" => Ruleset::half(params(args, 1)?[0]),
            "kfrac" => {
                let p = params(args, 2)?;
                Ruleset::kfrac(p[0], p[1])
            }
            "single" => Ruleset::single(params(args, 1)?[0]),
            _ => Err(Error::InvalidRuleset(format!("unknown ruleset `{s}`"))),
        }
    }
}

impl Serialize for Ruleset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ruleset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A canonical position: heap sizes sorted non-decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Position(Vec<u64>);

impl Position {
    /// Sorts `heaps` without checking them against a ruleset.
    pub(crate) fn from_heaps(mut heaps: Vec<u64>) -> Self {
        heaps.sort_unstable();
        Position(heaps)
    }

    pub fn heaps(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn into_heaps(self) -> Vec<u64> {
        self.0
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, h) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        f.write_str("]")
    }
}

impl AsRef<[u64]> for Position {
    fn as_ref(&self) -> &[u64] {
        &self.0
    }
}

/// Validates heap sizes against `ruleset` and returns the sorted position.
pub fn canonicalize(heaps: &[i64], ruleset: Ruleset) -> Result<Position> {
    let expected = ruleset.heap_count();
    if heaps.len() != expected {
        return Err(Error::WrongArity { expected, got: heaps.len() });
    }
    let min = ruleset.min_heap() as i64;
    let mut out = Vec::with_capacity(heaps.len());
    for &h in heaps {
        if h < min {
            return Err(Error::IllegalHeapSize { size: h as i128, ruleset: ruleset.to_string() });
        }
        out.push(h as u64);
    }
    Ok(Position::from_heaps(out))
}

/// Same as [`canonicalize`] for callers that already hold unsigned sizes.
pub fn position(ruleset: Ruleset, heaps: &[u64]) -> Result<Position> {
    let expected = ruleset.heap_count();
    if heaps.len() != expected {
        return Err(Error::WrongArity { expected, got: heaps.len() });
    }
    if let Some(&h) = heaps.iter().find(|&&h| h < ruleset.min_heap() || h > i64::MAX as u64) {
        return Err(Error::IllegalHeapSize { size: h as i128, ruleset: ruleset.to_string() });
    }
    Ok(Position::from_heaps(heaps.to_vec()))
}

pub(crate) fn check_position(ruleset: Ruleset, p: &Position) -> Result<()> {
    let expected = ruleset.heap_count();
    if p.len() != expected {
        return Err(Error::WrongArity { expected, got: p.len() });
    }
    if let Some(&h) = p.heaps().first().filter(|&&h| h < ruleset.min_heap()) {
        return Err(Error::IllegalHeapSize { size: h as i128, ruleset: ruleset.to_string() });
    }
    Ok(())
}

/// True iff the player to move has no legal move.
pub fn is_terminal(ruleset: Ruleset, p: &Position) -> bool {
    let at_least = |size: u64| p.heaps().iter().filter(|&&h| h >= size).count();
    match ruleset.family() {
        Family::DeleteNim => p.heaps().iter().all(|&h| h == 0),
        Family::Nmth { .. } | Family::Single { .. } => p.heaps().iter().all(|&h| h == 1),
        _ => {
            let (k, m) = ruleset.as_kfrac().expect("kfrac family");
            at_least(k as u64) < m
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    P,
    N,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::P => "P",
            Class::N => "N",
        })
    }
}

/// Whether a certificate names a condition that held or the first one that failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateStatus {
    Matched,
    Violated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Certificate {
    pub condition: ConditionId,
    pub status: CertificateStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Outcome {
    pub class: Class,
    pub certificate: Option<Certificate>,
}

impl Outcome {
    pub(crate) fn matched(condition: ConditionId) -> Self {
        Outcome {
            class: Class::P,
            certificate: Some(Certificate { condition, status: CertificateStatus::Matched }),
        }
    }

    pub(crate) fn violated(condition: ConditionId) -> Self {
        Outcome {
            class: Class::N,
            certificate: Some(Certificate { condition, status: CertificateStatus::Violated }),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.class)?;
        if let Some(c) = self.certificate {
            write!(f, " {}", c.condition)?;
            if c.status == CertificateStatus::Violated {
                f.write_str(" violated")?;
            }
        }
        Ok(())
    }
}

/// One move: heap indices (into the canonical pre-move position) that are
/// deleted, and for each split heap the sizes of its parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MoveRecord {
    pub deleted: Vec<usize>,
    pub splits: BTreeMap<usize, Vec<u64>>,
}

impl MoveRecord {
    /// Sorts indices and parts so equal moves compare equal.
    pub fn normalized(mut self) -> Self {
        self.deleted.sort_unstable();
        for parts in self.splits.values_mut() {
            parts.sort_unstable();
        }
        self
    }

    /// Human-readable form in terms of heap sizes of `from`.
    pub fn describe(&self, from: &Position) -> String {
        let size = |i: usize| from.heaps().get(i).copied().unwrap_or_default();
        let deleted: Vec<String> = self.deleted.iter().map(|&i| size(i).to_string()).collect();
        let splits: Vec<String> = self
            .splits
            .iter()
            .map(|(&i, parts)| {
                let parts: Vec<String> = parts.iter().map(u64::to_string).collect();
                format!("{} -> {}", size(i), parts.join("+"))
            })
            .collect();
        format!("delete {}; split {}", deleted.join(","), splits.join(", "))
    }
}

/// A move together with the position it leads to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MoveChoice {
    #[serde(rename = "move")]
    pub record: MoveRecord,
    pub result: Position,
}
