//! Legal-move enumeration and constructive winning moves.

use std::collections::BTreeMap;

use crate::classifier::classify;
use crate::error::{Error, IllegalMoveReason, Result};
use crate::game::{check_position, Class, Family, MoveChoice, MoveRecord, MoveShape, Position, Ruleset};
use crate::numtheory::{
    is_k_oddoid, power_above, split_equal_valuation, split_evenoid_bounded, split_keep_tail,
};

/// All multisets of `parts` values, each at least `min`, summing to `total`,
/// as non-decreasing lists.
pub(crate) fn partitions(total: u64, parts: usize, min: u64) -> Vec<Vec<u64>> {
    fn go(rest: u64, slots: usize, lo: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if slots == 1 {
            if rest >= lo {
                current.push(rest);
                out.push(current.clone());
                current.pop();
            }
            return;
        }
        let mut v = lo;
        while v.saturating_mul(slots as u64) <= rest {
            current.push(v);
            go(rest - v, slots - 1, v, current, out);
            current.pop();
            v += 1;
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        return out;
    }
    go(total, parts, min, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Run of equal heaps in a canonical position.
struct Group {
    value: u64,
    start: usize,
    count: usize,
    /// Ways to split one heap of this size.
    splits: Vec<Vec<u64>>,
}

/// Walks every option of a position once per distinct
/// (deleted sizes, split sizes and parts) key. Among equal heaps the lowest
/// indices are deleted first, then split.
struct Walker<'a> {
    deleted: Vec<usize>,
    splits: Vec<(usize, &'a [u64])>,
}

/// Receives deleted indices and (index, parts) splits.
type Visitor<'a, 'f> = dyn FnMut(&[usize], &[(usize, &'a [u64])]) + 'f;

impl<'a> Walker<'a> {
    fn visit(
        &mut self,
        groups: &'a [Group],
        gi: usize,
        deletions: usize,
        splits: usize,
        f: &mut Visitor<'a, '_>,
    ) {
        if gi == groups.len() {
            if deletions == 0 && splits == 0 {
                f(&self.deleted, &self.splits);
            }
            return;
        }
        let g = &groups[gi];
        let remaining: usize = groups[gi..].iter().map(|g| g.count).sum();
        if deletions + splits > remaining {
            return;
        }
        for d in 0..=deletions.min(g.count) {
            for i in 0..d {
                self.deleted.push(g.start + i);
            }
            let max_s = if g.splits.is_empty() { 0 } else { splits.min(g.count - d) };
            for s in 0..=max_s {
                self.choose(groups, gi, g.start + d, s, 0, deletions - d, splits - s, f);
            }
            self.deleted.truncate(self.deleted.len() - d);
        }
    }

    /// Picks split patterns for `left` more heaps of group `gi` starting at
    /// heap `index`, with pattern indices non-decreasing from `from`.
    #[allow(clippy::too_many_arguments)]
    fn choose(
        &mut self,
        groups: &'a [Group],
        gi: usize,
        index: usize,
        left: usize,
        from: usize,
        deletions: usize,
        splits: usize,
        f: &mut Visitor<'a, '_>,
    ) {
        if left == 0 {
            self.visit(groups, gi + 1, deletions, splits, f);
            return;
        }
        let patterns = &groups[gi].splits;
        for pi in from..patterns.len() {
            self.splits.push((index, &patterns[pi]));
            self.choose(groups, gi, index + 1, left - 1, pi, deletions, splits, f);
            self.splits.pop();
        }
    }
}

fn groups(ruleset: Ruleset, p: &Position) -> Vec<Group> {
    let parts = match ruleset.shapes().first() {
        Some(shape) => shape.parts,
        None => return Vec::new(),
    };
    let (removal, min_part) = (ruleset.token_removal(), ruleset.min_part());
    let mut out: Vec<Group> = Vec::new();
    for (i, &h) in p.heaps().iter().enumerate() {
        match out.last_mut() {
            Some(g) if g.value == h => g.count += 1,
            _ => {
                let splits = if h >= removal {
                    partitions(h - removal, parts, min_part)
                } else {
                    Vec::new()
                };
                out.push(Group { value: h, start: i, count: 1, splits });
            }
        }
    }
    out
}

fn for_each_move(ruleset: Ruleset, p: &Position, mut f: impl FnMut(&[usize], &[(usize, &[u64])])) {
    let groups = groups(ruleset, p);
    for MoveShape { deletions, splits, .. } in ruleset.shapes() {
        let mut walker = Walker { deleted: Vec::new(), splits: Vec::new() };
        walker.visit(&groups, 0, deletions, splits, &mut f);
    }
}

fn successor(p: &Position, deleted: &[usize], splits: &[(usize, &[u64])]) -> Position {
    let heaps = p.heaps();
    let mut touched = vec![false; heaps.len()];
    for &i in deleted {
        touched[i] = true;
    }
    let mut out = Vec::with_capacity(heaps.len());
    for &(i, parts) in splits {
        touched[i] = true;
        out.extend_from_slice(parts);
    }
    out.extend(heaps.iter().zip(&touched).filter(|(_, &t)| !t).map(|(&h, _)| h));
    Position::from_heaps(out)
}

/// Distinct positions reachable in one move, sorted.
pub fn successors(ruleset: Ruleset, p: &Position) -> Vec<Position> {
    let mut out = Vec::new();
    for_each_move(ruleset, p, |deleted, splits| out.push(successor(p, deleted, splits)));
    out.sort_unstable();
    out.dedup();
    out
}

/// Deduplication and ordering key of a move: deleted sizes, then split sizes
/// with their parts.
type MoveKey = (Vec<u64>, Vec<(u64, Vec<u64>)>);

fn move_key(p: &Position, record: &MoveRecord) -> MoveKey {
    let mut deleted: Vec<u64> = record.deleted.iter().map(|&i| p.heaps()[i]).collect();
    deleted.sort_unstable();
    let mut splits: Vec<(u64, Vec<u64>)> =
        record.splits.iter().map(|(&i, parts)| (p.heaps()[i], parts.clone())).collect();
    splits.sort_unstable();
    (deleted, splits)
}

/// Every legal move from `p`, one per distinct move key, sorted by
/// resulting position and then by key.
pub fn legal_moves(ruleset: Ruleset, p: &Position) -> Result<Vec<MoveChoice>> {
    check_position(ruleset, p)?;
    let mut moves = Vec::new();
    for_each_move(ruleset, p, |deleted, splits| {
        let record = MoveRecord {
            deleted: deleted.to_vec(),
            splits: splits.iter().map(|&(i, parts)| (i, parts.to_vec())).collect(),
        };
        let result = successor(p, deleted, splits);
        moves.push((move_key(p, &record), MoveChoice { record, result }));
    });
    moves.sort_by(|(ka, a), (kb, b)| a.result.cmp(&b.result).then_with(|| ka.cmp(kb)));
    Ok(moves.into_iter().map(|(_, m)| m).collect())
}

/// Applies `record` to `p`, checking it against the rules of `ruleset`.
pub fn apply(ruleset: Ruleset, p: &Position, record: &MoveRecord) -> Result<Position> {
    use IllegalMoveReason::*;
    check_position(ruleset, p)?;
    let heaps = p.heaps();
    let mut seen = vec![false; heaps.len()];
    for &i in &record.deleted {
        if i >= heaps.len() || seen[i] {
            return Err(Error::illegal(BadIndex));
        }
        seen[i] = true;
    }
    for &i in record.splits.keys() {
        if i >= heaps.len() {
            return Err(Error::illegal(BadIndex));
        }
        if seen[i] {
            return Err(Error::illegal(SplitDeletedHeap));
        }
    }
    let fits = ruleset.shapes().iter().any(|s| {
        s.deletions == record.deleted.len()
            && s.splits == record.splits.len()
            && record.splits.values().all(|parts| parts.len() == s.parts)
    });
    if !fits {
        return Err(Error::illegal(BadCardinality));
    }
    let min_part = ruleset.min_part();
    let removal = ruleset.token_removal();
    for (&i, parts) in &record.splits {
        if parts.iter().any(|&x| x < min_part) {
            return Err(Error::illegal(EmptyPart));
        }
        let sum = parts.iter().try_fold(0u64, |acc, &x| acc.checked_add(x));
        if heaps[i] < removal || sum != Some(heaps[i] - removal) {
            return Err(Error::illegal(PartSumMismatch));
        }
    }
    let splits: Vec<(usize, &[u64])> = record.splits.iter().map(|(&i, v)| (i, v.as_slice())).collect();
    Ok(successor(p, &record.deleted, &splits))
}

/// Collects a move under construction.
#[derive(Default)]
struct Builder {
    deleted: Vec<usize>,
    splits: BTreeMap<usize, Vec<u64>>,
}

impl Builder {
    fn split(&mut self, index: usize, parts: Vec<u64>) {
        self.splits.insert(index, parts);
    }

    /// Deletes every heap that is not split.
    fn delete_rest(mut self, len: usize) -> MoveRecord {
        self.deleted = (0..len).filter(|i| !self.splits.contains_key(i)).collect();
        self.finish()
    }

    fn finish(self) -> MoveRecord {
        MoveRecord { deleted: self.deleted, splits: self.splits }.normalized()
    }
}

/// A move from `p` to a P-position, or `None` when `p` is itself P.
///
/// The move is built from the structure of the position (no search), except
/// under `single:4`, where the first option that classifies P is returned.
pub fn winning_move(ruleset: Ruleset, p: &Position) -> Result<Option<MoveChoice>> {
    if classify(ruleset, p)?.class == Class::P {
        return Ok(None);
    }
    let record = match ruleset.family() {
        Family::DeleteNim => {
            let heaps = p.heaps();
            let odd = heaps.iter().position(|h| h % 2 == 1).expect("N-position has an odd heap");
            let mut b = Builder::default();
            b.split(odd, vec![0, heaps[odd] - 1]);
            b.delete_rest(heaps.len())
        }
        Family::Nmth { n } | Family::Single { n: n @ 3 } if n % 2 == 1 => nmth_odd(p)?,
        Family::Nmth { .. } => nmth_even(p)?,
        Family::Single { n: 4 } => {
            return legal_moves(ruleset, p)?
                .into_iter()
                .find(|m| matches!(classify(ruleset, &m.result), Ok(o) if o.class == Class::P))
                .map(Some)
                .ok_or_else(|| {
                    Error::InternalContradiction(format!("no option of N-position {p} classifies P"))
                });
        }
        Family::Single { n: 2 } => kfrac_move(p, 2, 1)?,
        Family::Single { n } => {
            return Err(Error::Unsupported(format!("single-delete with {n} heaps")));
        }
        _ => {
            let (k, m) = ruleset.as_kfrac().expect("kfrac family");
            kfrac_move(p, k, m)?
        }
    };
    let result = apply(ruleset, p, &record).map_err(|e| {
        Error::InternalContradiction(format!("constructed move {record:?} from {p} is illegal: {e}"))
    })?;
    if classify(ruleset, &result)?.class != Class::P {
        return Err(Error::InternalContradiction(format!(
            "constructed move from {p} reaches N-position {result}"
        )));
    }
    Ok(Some(MoveChoice { record, result }))
}

/// Even heap count: make every heap odd.
fn nmth_even(p: &Position) -> Result<MoveRecord> {
    let heaps = p.heaps();
    let half = heaps.len() / 2;
    let evens: Vec<usize> = (0..heaps.len()).filter(|&i| heaps[i] % 2 == 0).collect();
    let mut b = Builder::default();
    if evens.len() >= half {
        for &i in &evens[..half] {
            let (x, y) = split_equal_valuation(heaps[i], 0)?;
            b.split(i, vec![x, y]);
        }
        return Ok(b.delete_rest(heaps.len()));
    }
    for &i in &evens {
        let (x, y) = split_equal_valuation(heaps[i], 0)?;
        b.split(i, vec![x, y]);
    }
    let odds = (0..heaps.len()).rev().filter(|&i| heaps[i] % 2 == 1);
    b.deleted = odds.take(evens.len()).collect();
    Ok(b.finish())
}

/// Odd heap count: bring every heap to the minimum 2-adic valuation.
fn nmth_odd(p: &Position) -> Result<MoveRecord> {
    let heaps = p.heaps();
    let v = heaps.iter().map(|h| h.trailing_zeros()).min().expect("non-empty");
    let half = (heaps.len() - 1) / 2;
    let mut large: Vec<usize> = (0..heaps.len()).filter(|&i| heaps[i].trailing_zeros() > v).collect();
    // Largest heaps are deleted first among the minimum-valuation ones.
    let mut minimal = (0..heaps.len()).rev().filter(|&i| heaps[i].trailing_zeros() == v);
    let mut b = Builder::default();
    if large.len() <= half {
        for &i in &large {
            let (x, y) = split_equal_valuation(heaps[i], v)?;
            b.split(i, vec![x, y]);
        }
        b.deleted = minimal.by_ref().take(large.len()).collect();
        return Ok(b.finish());
    }
    large.sort_by(|&i, &j| {
        (heaps[j].trailing_zeros(), heaps[j], j).cmp(&(heaps[i].trailing_zeros(), heaps[i], i))
    });
    for &i in &large[..half] {
        let (x, y) = split_equal_valuation(heaps[i], v)?;
        b.split(i, vec![x, y]);
    }
    b.deleted = large[half..].to_vec();
    let extra = half - (large.len() - half);
    b.deleted.extend(minimal.by_ref().take(extra));
    Ok(b.finish())
}

/// (k-1)/k·n-delete family, including ABO, VDN and Half-delete.
fn kfrac_move(p: &Position, k: usize, m: usize) -> Result<MoveRecord> {
    let heaps = p.heaps();
    let kk = k as u64;
    let pivot = (k - 1) * m;
    let oddoid = |h: u64| is_k_oddoid(h, kk);
    let mut b = Builder::default();

    let mut offending = None;
    for (i, &h) in heaps[..=pivot].iter().enumerate() {
        if !oddoid(h)? {
            offending = Some(i);
            break;
        }
    }
    if let Some(i) = offending {
        // Condition (a) fails: break z_i into small oddoid parts and keep a
        // large tail on each of the top m-1 heaps.
        let (s, _) = power_above(heaps[i], kk)?;
        b.split(i, split_evenoid_bounded(heaps[i], kk, s)?.into_vec());
        for j in pivot + 1..heaps.len() {
            b.split(j, split_keep_tail(heaps[j], kk)?.into_vec());
        }
        return Ok(b.delete_rest(heaps.len()));
    }

    // Condition (b) fails: a small evenoid heap above the pivot.
    let (s, bound) = power_above(heaps[pivot], kk)?;
    let mut small = None;
    for (j, &h) in heaps.iter().enumerate().skip(pivot + 1) {
        if !oddoid(h)? && (h as u128) < bound {
            small = Some(j);
            break;
        }
    }
    let i = small.ok_or_else(|| {
        Error::InternalContradiction(format!("{p} satisfies both kfrac conditions"))
    })?;
    for j in pivot..heaps.len() {
        let parts = if j == i {
            split_evenoid_bounded(heaps[j], kk, s)?
        } else {
            split_keep_tail(heaps[j], kk)?
        };
        b.split(j, parts.into_vec());
    }
    Ok(b.delete_rest(heaps.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::canonicalize;

    fn setup(code: &str, heaps: &[i64]) -> (Ruleset, Position) {
        let r: Ruleset = code.parse().unwrap();
        (r, canonicalize(heaps, r).unwrap())
    }

    fn results(code: &str, heaps: &[i64]) -> Vec<Vec<u64>> {
        let (r, p) = setup(code, heaps);
        legal_moves(r, &p).unwrap().into_iter().map(|m| m.result.into_heaps()).collect()
    }

    #[test]
    fn partitions_are_non_decreasing() {
        assert_eq!(partitions(5, 3, 1), vec![vec![1, 1, 3], vec![1, 2, 2]]);
        assert_eq!(partitions(3, 2, 0), vec![vec![0, 3], vec![1, 2]]);
        assert!(partitions(2, 3, 1).is_empty());
    }

    #[test]
    fn single4_options() {
        assert_eq!(results("single:4", &[1, 2, 2, 2]), vec![vec![1, 1, 1, 2], vec![1, 1, 2, 2]]);
    }

    #[test]
    fn terminal_has_no_moves() {
        assert!(results("vdn", &[1, 1]).is_empty());
    }

    #[test]
    fn delete_nim_collapses_mirror_splits() {
        assert_eq!(results("delete-nim", &[0, 2]), vec![vec![0, 1]]);
    }

    #[test]
    fn apply_examples() {
        let (r, p) = setup("abo:3", &[1, 1, 9]);
        let mut rec = MoveRecord { deleted: vec![0, 1], ..Default::default() };
        rec.splits.insert(2, vec![1, 1, 7]);
        assert_eq!(apply(r, &p, &rec).unwrap().heaps(), &[1, 1, 7]);

        let (r, p) = setup("nmth:3", &[2, 3, 5]);
        let mut rec = MoveRecord { deleted: vec![2], ..Default::default() };
        rec.splits.insert(0, vec![1, 1]);
        assert_eq!(apply(r, &p, &rec).unwrap().heaps(), &[1, 1, 3]);
    }

    #[test]
    fn apply_rejects() {
        use IllegalMoveReason::*;
        let reason = |code: &str, heaps: &[i64], deleted: Vec<usize>, splits: &[(usize, Vec<u64>)]| {
            let (r, p) = setup(code, heaps);
            let rec = MoveRecord { deleted, splits: splits.iter().cloned().collect() };
            match apply(r, &p, &rec) {
                Err(Error::IllegalMove { reason }) => reason,
                other => panic!("expected illegal move, got {other:?}"),
            }
        };
        assert_eq!(reason("vdn", &[1, 1], vec![0], &[(1, vec![1, 0])]), EmptyPart);
        assert_eq!(reason("vdn", &[1, 1], vec![0], &[(1, vec![1])]), BadCardinality);
        assert_eq!(reason("vdn", &[1, 1], vec![], &[]), BadCardinality);
        assert_eq!(reason("abo:3", &[1, 1, 9], vec![0, 1], &[(2, vec![1, 1, 6])]), PartSumMismatch);
        assert_eq!(reason("abo:3", &[1, 1, 9], vec![0, 2], &[(2, vec![1, 1, 7])]), SplitDeletedHeap);
        assert_eq!(reason("abo:3", &[1, 1, 9], vec![0, 0], &[(2, vec![1, 1, 7])]), BadIndex);
        assert_eq!(reason("abo:3", &[1, 1, 9], vec![0, 1], &[(3, vec![1, 1, 7])]), BadIndex);
        assert_eq!(reason("delete-nim", &[0, 3], vec![1], &[(0, vec![0, 0])]), PartSumMismatch);
        assert_eq!(reason("nmth:4", &[2, 2, 3, 3], vec![0, 1], &[(2, vec![1, 2])]), BadCardinality);
    }

    #[test]
    fn winning_move_examples() {
        let (r, p) = setup("abo:3", &[1, 1, 9]);
        let m = winning_move(r, &p).unwrap().unwrap();
        assert_eq!(m.result.heaps(), &[1, 1, 7]);
        assert_eq!(m.record.deleted, vec![0, 1]);
        assert_eq!(m.record.splits[&2], vec![1, 1, 7]);

        let (r, p) = setup("nmth:3", &[2, 3, 5]);
        let m = winning_move(r, &p).unwrap().unwrap();
        assert_eq!(m.result.heaps(), &[1, 1, 3]);
        assert_eq!(m.record.deleted, vec![2]);

        let (r, p) = setup("half:2", &[1, 1, 3, 4]);
        assert!(winning_move(r, &p).unwrap().is_none());
    }

    #[test]
    fn winning_move_unsupported_for_single5() {
        let (r, p) = setup("single:5", &[1, 1, 1, 1, 2]);
        assert!(matches!(winning_move(r, &p), Err(Error::Unsupported(_))));
    }
}
