//! Closed-form outcome classification.
//!
//! Every answer carries a [`Certificate`](crate::Certificate): the condition
//! that matched for a P-position, or the first violated condition (in the
//! order the conditions are listed below) for an N-position.
//!
//! | ruleset | P iff | condition ids |
//! |---|---|---|
//! | `delete-nim` | both heaps even | `deleteNim-even` |
//! | `vdn`, `single:2` | both heaps odd | `vdn-odd` |
//! | `abo:n` | every heap mod n(n-1) in 1..=n-1 | `abo-star` |
//! | `nmth:n`, n even | every heap odd | `nmth-even-all-odd` |
//! | `nmth:n`, n odd | all 2-adic valuations equal | `nmth-odd-equal-v2` |
//! | `half:m`, `kfrac:k,m` | (a) then (b), see [`classify`] | `kfrac-a`, `kfrac-b` |
//! | `single:3` | all 2-adic valuations equal | `single3-equal-v2` |
//! | `single:4` | one of the five digit cases | `single4-case1` .. `single4-case5`, sub-conditions `single4-case3-3B` etc., `single4-no-case` |
//!
//! A P-position under `kfrac` reports `kfrac-b`, the last condition checked.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{check_position, Family, Outcome, Position, Ruleset};
use crate::numtheory::{digit, is_k_oddoid, or_plus_one_valuation, power_above, v2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConditionId {
    DeleteNimEven,
    VdnOdd,
    AboStar,
    NmthEvenAllOdd,
    NmthOddEqualV2,
    KFracA,
    KFracB,
    Single3EqualV2,
    /// One of the five four-heap cases, as a whole.
    Single4Case(u8),
    /// A lettered sub-condition of a four-heap case, e.g. `(3, 'B')`.
    Single4Sub(u8, char),
    /// The sorted valuations fit none of the five patterns.
    Single4NoCase,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionId::DeleteNimEven => f.write_str("deleteNim-even"),
            ConditionId::VdnOdd => f.write_str("vdn-odd"),
            ConditionId::AboStar => f.write_str("abo-star"),
            ConditionId::NmthEvenAllOdd => f.write_str("nmth-even-all-odd"),
            ConditionId::NmthOddEqualV2 => f.write_str("nmth-odd-equal-v2"),
            ConditionId::KFracA => f.write_str("kfrac-a"),
            ConditionId::KFracB => f.write_str("kfrac-b"),
            ConditionId::Single3EqualV2 => f.write_str("single3-equal-v2"),
            ConditionId::Single4Case(c) => write!(f, "single4-case{c}"),
            ConditionId::Single4Sub(c, s) => write!(f, "single4-case{c}-{c}{s}"),
            ConditionId::Single4NoCase => f.write_str("single4-no-case"),
        }
    }
}

impl Serialize for ConditionId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Sprague-Grundy value of the Delete Nim position `<x, y>`.
pub fn delete_nim_grundy(x: u64, y: u64) -> u32 {
    or_plus_one_valuation(x, y)
}

fn verdict(holds: bool, id: ConditionId) -> Outcome {
    if holds {
        Outcome::matched(id)
    } else {
        Outcome::violated(id)
    }
}

fn all_equal_v2(heaps: &[u64]) -> bool {
    let first = heaps[0].trailing_zeros();
    heaps.iter().all(|h| h.trailing_zeros() == first)
}

/// Outcome of `p` under `ruleset` from the closed-form characterizations.
///
/// For `half:m` / `kfrac:k,m` with `n = km` sorted heaps `z_1 <= ... <= z_n`
/// and `k^s` the least power of `k` above `z_{(k-1)m+1}`, the position is P
/// iff (a) `z_1 .. z_{(k-1)m+1}` are all k-oddoid and (b) every k-evenoid
/// heap is at least `k^s`.
pub fn classify(ruleset: Ruleset, p: &Position) -> Result<Outcome> {
    check_position(ruleset, p)?;
    let heaps = p.heaps();
    let outcome = match ruleset.family() {
        Family::DeleteNim => verdict(heaps.iter().all(|h| h % 2 == 0), ConditionId::DeleteNimEven),
        Family::Vdn | Family::Single { n: 2 } => {
            verdict(heaps.iter().all(|h| h % 2 == 1), ConditionId::VdnOdd)
        }
        Family::Abo { n } => {
            let all = heaps.iter().all(|&h| is_k_oddoid(h, n as u64).unwrap_or(false));
            verdict(all, ConditionId::AboStar)
        }
        Family::Nmth { n } if n % 2 == 0 => {
            verdict(heaps.iter().all(|h| h % 2 == 1), ConditionId::NmthEvenAllOdd)
        }
        Family::Nmth { .. } => verdict(all_equal_v2(heaps), ConditionId::NmthOddEqualV2),
        Family::Half { m } => classify_kfrac(heaps, 2, m)?,
        Family::KFrac { k, m } => classify_kfrac(heaps, k, m)?,
        Family::Single { n: 3 } => verdict(all_equal_v2(heaps), ConditionId::Single3EqualV2),
        Family::Single { n: 4 } => {
            let ordered = single4_order(heaps);
            single4_ordered(ordered)
        }
        Family::Single { n } => {
            return Err(Error::Unsupported(format!(
                "single-delete with {n} heaps has no known characterization"
            )))
        }
    };
    Ok(outcome)
}

fn classify_kfrac(heaps: &[u64], k: usize, m: usize) -> Result<Outcome> {
    let k = k as u64;
    let pivot = (k as usize - 1) * m;
    for &h in &heaps[..=pivot] {
        if !is_k_oddoid(h, k)? {
            return Ok(Outcome::violated(ConditionId::KFracA));
        }
    }
    let (_, bound) = power_above(heaps[pivot], k)?;
    for &h in &heaps[pivot + 1..] {
        if !is_k_oddoid(h, k)? && (h as u128) < bound {
            return Ok(Outcome::violated(ConditionId::KFracB));
        }
    }
    Ok(Outcome::matched(ConditionId::KFracB))
}

/// Orders four canonical heaps as `(w, x, y, z)` with non-decreasing
/// 2-adic valuation; ties keep ascending size.
pub fn single4_order(heaps: &[u64]) -> [u64; 4] {
    let mut ordered: [u64; 4] = heaps.try_into().expect("four heaps");
    ordered.sort_by_key(|h| h.trailing_zeros());
    ordered
}

/// Evaluates the four-heap cases on `(w, x, y, z)`, which must already be
/// ordered by non-decreasing 2-adic valuation.
pub fn single4_ordered([w, x, y, z]: [u64; 4]) -> Outcome {
    let val = |h: u64| v2(h).expect("heaps are positive");
    let (a, b, c, d) = (val(w), val(x), val(y), val(z));
    debug_assert!(a <= b && b <= c && c <= d);
    let bit = |h: u64, k: u32| u32::from(digit(h, k).expect("k >= 1"));
    let sub = |case: u8, letter: char, holds: bool| holds.then_some(()).ok_or(ConditionId::Single4Sub(case, letter));

    let result: std::result::Result<u8, ConditionId> = (|| {
        if a == b && b == c && c == d {
            return Ok(1);
        }
        if a < b && b == c && c == d {
            sub(2, 'A', bit(w, d + 1) == 0)?;
            return Ok(2);
        }
        if a < b && b < c && c == d {
            sub(3, 'A', bit(w, d + 1) == 0 && bit(x, d + 1) == 0)?;
            sub(3, 'B', (b + 2..=d).all(|k| bit(w, k) + bit(x, k) >= 1))?;
            sub(3, 'C', bit(w, b + 1) == 1)?;
            return Ok(3);
        }
        if a < b && b < c && c < d {
            let lower = |case: u8, first: char| -> std::result::Result<(), ConditionId> {
                let letter = |offset: u8| (first as u8 + offset) as char;
                sub(case, letter(0), (c + 2..=d).all(|j| bit(w, j) + bit(x, j) + bit(y, j) >= 2))?;
                sub(case, letter(1), bit(w, c + 1) == 1 && bit(x, c + 1) == 1)?;
                sub(case, letter(2), (b + 2..=c).all(|k| bit(w, k) + bit(x, k) >= 1))?;
                sub(case, letter(3), bit(w, b + 1) == 1)
            };
            let top = [w, x, y].map(|h| bit(h, d + 1));
            if top == [0, 0, 0] {
                // 4A holds.
                lower(4, 'B')?;
                return Ok(4);
            }
            sub(5, 'A', (d + 2..=64).all(|i| matches!(bit(w, i) + bit(x, i) + bit(y, i) + bit(z, i), 0 | 3 | 4)))?;
            sub(5, 'B', top == [1, 1, 1])?;
            lower(5, 'C')?;
            return Ok(5);
        }
        Err(ConditionId::Single4NoCase)
    })();

    match result {
        Ok(case) => Outcome::matched(ConditionId::Single4Case(case)),
        Err(id) => Outcome::violated(id),
    }
}
