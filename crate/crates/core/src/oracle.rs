//! Exhaustive solver over the option graph, memoized on canonical positions.
//!
//! Every move removes at least one token, so plain recursion terminates.

use std::sync::atomic::{AtomicUsize, Ordering};

use dashmap::DashMap;

use crate::error::{Error, Result};
use crate::game::{check_position, Class, Position, Ruleset};
use crate::strategy::successors;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest token total accepted for a root position.
    pub max_tokens: u64,
    /// Largest number of memo entries before solving gives up.
    pub max_entries: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_tokens: 96, max_entries: 50_000_000 }
    }
}

/// Memoized ground-truth solver for one ruleset.
///
/// Shared freely between threads: entries are write-once and racing writers
/// store identical values.
pub struct Oracle {
    ruleset: Ruleset,
    config: OracleConfig,
    grundy: DashMap<Position, u32>,
    outcome: DashMap<Position, Class>,
    entries: AtomicUsize,
}

impl Oracle {
    pub fn new(ruleset: Ruleset) -> Self {
        Self::with_config(ruleset, OracleConfig::default())
    }

    pub fn with_config(ruleset: Ruleset, config: OracleConfig) -> Self {
        Oracle {
            ruleset,
            config,
            grundy: DashMap::new(),
            outcome: DashMap::new(),
            entries: AtomicUsize::new(0),
        }
    }

    pub fn ruleset(&self) -> Ruleset {
        self.ruleset
    }

    pub fn config(&self) -> OracleConfig {
        self.config
    }

    /// Number of memoized entries (outcome and Grundy tables together).
    pub fn memo_len(&self) -> usize {
        self.entries.load(Ordering::Relaxed)
    }

    fn check_root(&self, p: &Position) -> Result<()> {
        check_position(self.ruleset, p)?;
        if p.total() > self.config.max_tokens {
            return Err(Error::LimitExceeded(format!(
                "{p} holds {} tokens, limit is {}",
                p.total(),
                self.config.max_tokens
            )));
        }
        Ok(())
    }

    fn reserve_entry(&self) -> Result<()> {
        let n = self.entries.fetch_add(1, Ordering::Relaxed);
        if n >= self.config.max_entries {
            return Err(Error::LimitExceeded(format!(
                "memo table reached {} entries",
                self.config.max_entries
            )));
        }
        Ok(())
    }

    /// P iff every option is N.
    pub fn solve_outcome(&self, p: &Position) -> Result<Class> {
        self.check_root(p)?;
        self.outcome_of(p)
    }

    /// Minimum excludant of the options' Grundy values.
    pub fn solve_grundy(&self, p: &Position) -> Result<u32> {
        self.check_root(p)?;
        self.grundy_of(p)
    }

    fn outcome_of(&self, p: &Position) -> Result<Class> {
        if let Some(g) = self.grundy.get(p) {
            return Ok(if *g == 0 { Class::P } else { Class::N });
        }
        if let Some(c) = self.outcome.get(p) {
            return Ok(*c);
        }
        let mut class = Class::P;
        for s in successors(self.ruleset, p) {
            if self.outcome_of(&s)? == Class::P {
                class = Class::N;
                break;
            }
        }
        if self.outcome.insert(p.clone(), class).is_none() {
            self.reserve_entry()?;
        }
        Ok(class)
    }

    fn grundy_of(&self, p: &Position) -> Result<u32> {
        if let Some(g) = self.grundy.get(p) {
            return Ok(*g);
        }
        let options = successors(self.ruleset, p);
        let mut seen = vec![false; options.len() + 1];
        for s in &options {
            let g = self.grundy_of(s)? as usize;
            if g < seen.len() {
                seen[g] = true;
            }
        }
        let mex = seen.iter().position(|&x| !x).expect("mex <= option count") as u32;
        if self.grundy.insert(p.clone(), mex).is_none() {
            self.reserve_entry()?;
        }
        Ok(mex)
    }
}

/// Outcome by plain recursion with no memo; exponential, for cross-checks
/// on small positions only.
pub fn naive_outcome(ruleset: Ruleset, p: &Position) -> Class {
    if successors(ruleset, p).iter().any(|s| naive_outcome(ruleset, s) == Class::P) {
        Class::N
    } else {
        Class::P
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::canonicalize;

    fn solve(code: &str, heaps: &[i64]) -> (Class, u32) {
        let r: Ruleset = code.parse().unwrap();
        let p = canonicalize(heaps, r).unwrap();
        let oracle = Oracle::new(r);
        let class = oracle.solve_outcome(&p).unwrap();
        (class, Oracle::new(r).solve_grundy(&p).unwrap())
    }

    #[test]
    fn outcome_examples() {
        assert_eq!(solve("vdn", &[1, 1]).0, Class::P);
        assert_eq!(solve("single:4", &[1, 2, 2, 2]).0, Class::P);
        assert_eq!(solve("delete-nim", &[2, 2]).0, Class::P);
    }

    #[test]
    fn grundy_examples() {
        assert_eq!(solve("delete-nim", &[1, 2]).1, 2);
        assert_eq!(solve("delete-nim", &[0, 0]).1, 0);
    }

    #[test]
    fn token_limit() {
        let r = Ruleset::abo(3).unwrap();
        let oracle = Oracle::with_config(r, OracleConfig { max_tokens: 10, ..Default::default() });
        let p = canonicalize(&[5, 5, 5], r).unwrap();
        assert!(matches!(oracle.solve_outcome(&p), Err(Error::LimitExceeded(_))));
    }

    #[test]
    fn entry_limit() {
        let r = Ruleset::single(4).unwrap();
        let oracle = Oracle::with_config(r, OracleConfig { max_entries: 5, ..Default::default() });
        let p = canonicalize(&[6, 7, 8, 9], r).unwrap();
        assert!(matches!(oracle.solve_grundy(&p), Err(Error::LimitExceeded(_))));
    }
}
