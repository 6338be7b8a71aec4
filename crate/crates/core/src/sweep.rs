//! Bounded verification sweeps: closed form against oracle, plus strategy
//! soundness, with CSV and JSON-lines reports.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::classify;
use crate::error::{Error, Result};
use crate::game::{Certificate, CertificateStatus, Class, Position, Ruleset};
use crate::oracle::Oracle;
use crate::strategy::{apply, successors, winning_move};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub heaps: Vec<u64>,
    pub closed: Class,
    pub oracle: Class,
    pub grundy: u32,
    pub agree: bool,
    #[serde(skip)]
    pub certificate: Option<Certificate>,
    /// `None` when the strategy checks passed for this position.
    #[serde(skip)]
    pub strategy_failure: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub positions: usize,
    pub p_positions: usize,
    pub mismatches: usize,
    pub strategy_failures: usize,
    /// How often each matched certificate occurred among P-positions.
    pub matched_conditions: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub ruleset: Ruleset,
    pub max_heap: u64,
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

impl SweepReport {
    pub fn is_clean(&self) -> bool {
        self.summary.mismatches == 0 && self.summary.strategy_failures == 0
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| !r.agree)
    }

    pub fn strategy_failures(&self) -> impl Iterator<Item = (&SweepRow, &str)> {
        self.rows.iter().filter_map(|r| r.strategy_failure.as_deref().map(|f| (r, f)))
    }

    /// `heaps;closed;oracle;grundy;agree` with space-separated heaps.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().delimiter(b';').from_writer(out);
        w.write_record(["heaps", "closed", "oracle", "grundy", "agree"])?;
        for row in &self.rows {
            let heaps: Vec<String> = row.heaps.iter().map(u64::to_string).collect();
            w.write_record([
                heaps.join(" "),
                row.closed.to_string(),
                row.oracle.to_string(),
                row.grundy.to_string(),
                row.agree.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for row in &self.rows {
            serde_json::to_writer(&mut out, row).map_err(|e| Error::Io(e.to_string()))?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Every canonical position of `ruleset` with all heaps at most `max_heap`,
/// in lexicographic order.
pub fn canonical_positions(ruleset: Ruleset, max_heap: u64) -> Vec<Position> {
    fn go(n: usize, lo: u64, hi: u64, current: &mut Vec<u64>, out: &mut Vec<Position>) {
        if current.len() == n {
            out.push(Position::from_heaps(current.clone()));
            return;
        }
        for h in lo..=hi {
            current.push(h);
            go(n, h, hi, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    let n = ruleset.heap_count();
    go(n, ruleset.min_heap(), max_heap, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Checks the strategy at one position: an N-position's constructed move
/// must be legal and reach a P-position, and every option of a P-position
/// must be N (by both classifier and oracle).
pub fn check_strategy(oracle: &Oracle, p: &Position, closed: Class) -> Result<Option<String>> {
    let ruleset = oracle.ruleset();
    match closed {
        Class::N => match winning_move(ruleset, p) {
            Ok(Some(m)) => {
                if apply(ruleset, p, &m.record).ok().as_ref() != Some(&m.result) {
                    return Ok(Some(format!("winning move from {p} does not replay")));
                }
                if oracle.solve_outcome(&m.result)? != Class::P {
                    return Ok(Some(format!("winning move from {p} reaches oracle-N {}", m.result)));
                }
                Ok(None)
            }
            Ok(None) => Ok(Some(format!("no winning move produced for N-position {p}"))),
            Err(Error::InternalContradiction(msg)) => Ok(Some(msg)),
            Err(e) => Err(e),
        },
        Class::P => {
            for s in successors(ruleset, p) {
                if classify(ruleset, &s)?.class != Class::N || oracle.solve_outcome(&s)? != Class::N {
                    return Ok(Some(format!("P-position {p} has P option {s}")));
                }
            }
            Ok(None)
        }
    }
}

fn row(oracle: &Oracle, p: &Position) -> Result<SweepRow> {
    let outcome = classify(oracle.ruleset(), p)?;
    let grundy = oracle.solve_grundy(p)?;
    let oracle_class = if grundy == 0 { Class::P } else { Class::N };
    let strategy_failure = check_strategy(oracle, p, outcome.class)?;
    Ok(SweepRow {
        heaps: p.heaps().to_vec(),
        closed: outcome.class,
        oracle: oracle_class,
        grundy,
        agree: outcome.class == oracle_class,
        certificate: outcome.certificate,
        strategy_failure,
    })
}

/// Solves and classifies every canonical position with heaps up to
/// `max_heap`, on `jobs` worker threads (0 picks the rayon default).
pub fn sweep(oracle: &Oracle, max_heap: u64, jobs: usize) -> Result<SweepReport> {
    let ruleset = oracle.ruleset();
    let n = ruleset.heap_count() as u64;
    let needed = n.saturating_mul(max_heap);
    if needed > oracle.config().max_tokens {
        return Err(Error::LimitExceeded(format!(
            "sweep of {ruleset} up to {max_heap} needs {needed} tokens, limit is {}",
            oracle.config().max_tokens
        )));
    }
    let positions = canonical_positions(ruleset, max_heap);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let rows = pool.install(|| positions.par_iter().map(|p| row(oracle, p)).collect::<Result<Vec<_>>>())?;

    let mut summary = SweepSummary { positions: rows.len(), ..Default::default() };
    for r in &rows {
        summary.p_positions += usize::from(r.oracle == Class::P);
        summary.mismatches += usize::from(!r.agree);
        summary.strategy_failures += usize::from(r.strategy_failure.is_some());
        if let Some(c) = r.certificate.filter(|c| c.status == CertificateStatus::Matched) {
            *summary.matched_conditions.entry(c.condition.to_string()).or_default() += 1;
        }
    }
    Ok(SweepReport { ruleset, max_heap, rows, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::OracleConfig;

    #[test]
    fn positions_are_lexicographic_multisets() {
        let r = Ruleset::abo(3).unwrap();
        let ps = canonical_positions(r, 3);
        assert_eq!(ps.len(), 10);
        assert_eq!(ps[0].heaps(), &[1, 1, 1]);
        assert_eq!(ps[9].heaps(), &[3, 3, 3]);
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(canonical_positions(Ruleset::delete_nim(), 2).len(), 6);
    }

    #[test]
    fn small_sweep_is_clean_and_byte_stable() {
        let r = Ruleset::abo(3).unwrap();
        let a = sweep(&Oracle::new(r), 8, 2).unwrap();
        let b = sweep(&Oracle::new(r), 8, 1).unwrap();
        assert!(a.is_clean());
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        a.write_csv(&mut ca).unwrap();
        b.write_csv(&mut cb).unwrap();
        assert_eq!(ca, cb);
        let text = String::from_utf8(ca).unwrap();
        assert!(text.starts_with("heaps;closed;oracle;grundy;agree\n1 1 1;P;P;0;true\n"));
        let mut j = Vec::new();
        a.write_jsonl(&mut j).unwrap();
        let first = String::from_utf8(j).unwrap().lines().next().unwrap().to_string();
        assert_eq!(first, r#"{"heaps":[1,1,1],"closed":"P","oracle":"P","grundy":0,"agree":true}"#);
    }

    #[test]
    fn sweep_respects_token_limit() {
        let r = Ruleset::abo(4).unwrap();
        let oracle = Oracle::with_config(r, OracleConfig { max_tokens: 50, ..Default::default() });
        assert!(matches!(sweep(&oracle, 26, 1), Err(Error::LimitExceeded(_))));
    }
}
