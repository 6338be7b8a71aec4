//! Acceptance suite. Each test is one exit criterion and reports a single
//! `PASS`/`FAIL` line on stderr (uncaptured). All checks are exact.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use delnim_core::numtheory::{
    is_k_oddoid, oddoid_modulus, power_above, split_evenoid_bounded, split_keep_tail, split_small, v2,
};
use delnim_core::sweep::sweep;
use delnim_core::{position, Class, Oracle, OracleConfig, Ruleset, SweepReport};

fn report_line(name: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[acceptance] {status} {name}: {detail}");
}

fn criterion(name: &str, ok: bool, detail: String) {
    report_line(name, ok, &detail);
    assert!(ok, "{name}: {detail}");
}

type Cache = Mutex<HashMap<(String, u64), Arc<OnceLock<(SweepReport, Duration)>>>>;

/// Sweeps are shared between criteria (the soundness criterion reuses every
/// outcome sweep), so each one runs once per test binary.
fn run_sweep(code: &str, max_heap: u64) -> (SweepReport, Duration) {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cell = {
        let mut map = CACHE.get_or_init(Default::default).lock().unwrap();
        map.entry((code.to_string(), max_heap)).or_default().clone()
    };
    cell.get_or_init(|| {
        let ruleset: Ruleset = code.parse().unwrap();
        let tokens = ruleset.heap_count() as u64 * max_heap;
        let config = OracleConfig { max_tokens: tokens.max(96), ..Default::default() };
        let start = Instant::now();
        let report = sweep(&Oracle::with_config(ruleset, config), max_heap, 0).unwrap();
        (report, start.elapsed())
    })
    .clone()
}

fn describe(report: &SweepReport) -> String {
    let s = &report.summary;
    let first = report.mismatches().next().map(|r| format!(", first mismatch {:?}", r.heaps)).unwrap_or_default();
    format!(
        "{} <= {}: {} positions, {} P, {} mismatches{first}",
        report.ruleset, report.max_heap, s.positions, s.p_positions, s.mismatches
    )
}

fn outcome_sweeps(runs: &[(&str, u64)]) -> (bool, String, Duration) {
    let mut ok = true;
    let mut details = Vec::new();
    let mut total = Duration::ZERO;
    for &(code, max) in runs {
        let (report, elapsed) = run_sweep(code, max);
        ok &= report.summary.mismatches == 0 && report.summary.positions > 0;
        total += elapsed;
        details.push(describe(&report));
    }
    (ok, details.join("; "), total)
}

const ALL_SWEEPS: &[(&str, u64)] = &[
    ("delete-nim", 64),
    ("vdn", 40),
    ("abo:3", 30),
    ("abo:4", 26),
    ("nmth:3", 24),
    ("nmth:4", 14),
    ("nmth:5", 10),
    ("half:2", 20),
    ("half:3", 10),
    ("kfrac:3,1", 30),
    ("kfrac:3,2", 11),
    ("single:3", 32),
    ("single:4", 16),
];

#[test]
fn delete_nim_grundy_formula() {
    let r = Ruleset::delete_nim();
    let start = Instant::now();
    let oracle = Oracle::with_config(r, OracleConfig { max_tokens: 128, ..Default::default() });
    let mut checked = 0;
    let mut bad = Vec::new();
    for x in 0..=64u64 {
        for y in 0..=64u64 {
            let g = oracle.solve_grundy(&position(r, &[x, y]).unwrap()).unwrap();
            let expected = ((x | y) + 1).trailing_zeros();
            if g != expected {
                bad.push((x, y, g, expected));
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    criterion(
        "delete-nim grundy = v2((x|y)+1), 0<=x,y<=64",
        bad.is_empty() && checked == 4225 && elapsed < Duration::from_secs(5),
        format!("{checked} positions, {} mismatches{}, {:.2?}", bad.len(), first_of(&bad), elapsed),
    );
}

#[test]
fn vdn_delete_nim_correspondence() {
    let (vdn, dn) = (Ruleset::vdn(), Ruleset::delete_nim());
    let (ov, od) = (Oracle::new(vdn), Oracle::new(dn));
    let mut bad = Vec::new();
    for x in 1..=40u64 {
        for y in 1..=40u64 {
            let a = position(vdn, &[x, y]).unwrap();
            let b = position(dn, &[x - 1, y - 1]).unwrap();
            let same_class = ov.solve_outcome(&a).unwrap() == od.solve_outcome(&b).unwrap();
            let same_grundy = ov.solve_grundy(&a).unwrap() == od.solve_grundy(&b).unwrap();
            if !(same_class && same_grundy) {
                bad.push((x, y));
            }
        }
    }
    criterion(
        "vdn <x,y> ~ delete-nim <x-1,y-1>, 1<=x,y<=40",
        bad.is_empty(),
        format!("1600 pairs, {} disagreements{}", bad.len(), first_of(&bad)),
    );
}

#[test]
fn abo_classifier_matches_oracle() {
    let (ok, detail, elapsed) = outcome_sweeps(&[("abo:3", 30), ("abo:4", 26)]);
    let fast = elapsed < Duration::from_secs(60);
    criterion("abo classifier = oracle", ok && fast, format!("{detail}; {elapsed:.2?}"));
}

#[test]
fn nmth_classifier_matches_oracle() {
    let (ok, detail, elapsed) = outcome_sweeps(&[("nmth:3", 24), ("nmth:4", 14), ("nmth:5", 10)]);
    criterion("nmth classifier = oracle", ok, format!("{detail}; {elapsed:.2?}"));
}

#[test]
fn half_classifier_matches_oracle() {
    let (ok, detail, elapsed) = outcome_sweeps(&[("half:2", 20), ("half:3", 10)]);
    criterion("half classifier = oracle", ok, format!("{detail}; {elapsed:.2?}"));
}

#[test]
fn kfrac_classifier_matches_oracle() {
    let (ok, detail, elapsed) = outcome_sweeps(&[("kfrac:3,1", 30), ("kfrac:3,2", 11)]);
    let (kfrac, _) = run_sweep("kfrac:3,1", 30);
    let (abo, _) = run_sweep("abo:3", 30);
    let same_as_abo = kfrac.rows.len() == abo.rows.len()
        && kfrac.rows.iter().zip(&abo.rows).all(|(a, b)| {
            a.heaps == b.heaps && a.closed == b.closed && a.oracle == b.oracle && a.grundy == b.grundy
        });
    let fast = elapsed < Duration::from_secs(600);
    criterion(
        "kfrac classifier = oracle",
        ok && same_as_abo && fast,
        format!("{detail}; kfrac:3,1 table identical to abo:3: {same_as_abo}; {elapsed:.2?}"),
    );
}

#[test]
fn single_classifier_matches_oracle() {
    let (ok, detail, elapsed) = outcome_sweeps(&[("single:3", 32), ("single:4", 16)]);
    let (four, _) = run_sweep("single:4", 16);
    let hits: Vec<usize> = (1..=5)
        .map(|c| four.summary.matched_conditions.get(&format!("single4-case{c}")).copied().unwrap_or(0))
        .collect();
    let all_cases = hits.iter().all(|&h| h > 0);
    criterion(
        "single classifier = oracle",
        ok && all_cases,
        format!("{detail}; single:4 P-positions per case 1..5 = {hits:?}; {elapsed:.2?}"),
    );
}

#[test]
fn strategy_soundness() {
    let mut failures = Vec::new();
    let mut checked = 0;
    for &(code, max) in ALL_SWEEPS {
        let (report, _) = run_sweep(code, max);
        checked += report.rows.len();
        failures.extend(report.strategy_failures().map(|(_, f)| format!("{code}: {f}")));
    }
    criterion(
        "strategy soundness over all sweeps",
        failures.is_empty() && checked > 0,
        format!("{checked} positions, {} violations{}", failures.len(), first_of(&failures)),
    );
}

/// Every composition of `total` into `parts` positive parts, by brute force.
fn compositions(total: u64, parts: usize, out: &mut Vec<Vec<u64>>, current: &mut Vec<u64>) {
    if parts == 1 {
        if total >= 1 {
            current.push(total);
            out.push(current.clone());
            current.pop();
        }
        return;
    }
    for first in 1..total {
        current.push(first);
        compositions(total - first, parts - 1, out, current);
        current.pop();
    }
}

#[test]
fn valuation_and_split_suites() {
    let mut violations: Vec<String> = Vec::new();

    // Valuation of a sum.
    for x in 1..=5000u64 {
        for y in 1..=5000u64 {
            let (vx, vy, vz) = (v2(x).unwrap(), v2(y).unwrap(), v2(x + y).unwrap());
            let ok = if vx == vy { vz > vx } else { vz == vx.min(vy) };
            if !ok {
                violations.push(format!("v2 additivity {x}+{y}"));
            }
        }
    }

    // No k-oddoid number splits into k k-oddoid parts (all compositions).
    for k in [2u64, 3] {
        for z in 1..=60u64 {
            if !is_k_oddoid(z, k).unwrap() {
                continue;
            }
            let mut all = Vec::new();
            compositions(z, k as usize, &mut all, &mut Vec::new());
            if let Some(c) = all.iter().find(|c| c.iter().all(|&p| is_k_oddoid(p, k).unwrap())) {
                violations.push(format!("{k}-oddoid {z} splits into oddoid parts {c:?}"));
            }
        }
    }

    // Postconditions of the constructive splits.
    for k in 2..=8u64 {
        let modulus = oddoid_modulus(k).unwrap();
        for x in k..=modulus {
            let parts = split_small(x, k).unwrap();
            if parts.parts().len() != k as usize
                || parts.sum() != x
                || parts.parts().iter().any(|&p| p < 1 || p > k - 1)
            {
                violations.push(format!("split_small({x},{k}) = {:?}", parts.parts()));
            }
        }
        for y in k..=5000u64 {
            if is_k_oddoid(y, k).unwrap() {
                continue;
            }
            let (s_min, _) = power_above(y, k).unwrap();
            for s in s_min..=s_min + 1 {
                let parts = split_evenoid_bounded(y, k, s).unwrap();
                let bound = (k as u128).pow(s - 1);
                if parts.parts().len() != k as usize
                    || parts.sum() != y
                    || parts.parts().iter().any(|&p| !is_k_oddoid(p, k).unwrap() || p as u128 >= bound)
                {
                    violations.push(format!("split_evenoid_bounded({y},{k},{s}) = {:?}", parts.parts()));
                }
            }
        }
        for z in k..=5000u64 {
            let parts = split_keep_tail(z, k).unwrap();
            let p = parts.parts();
            let small_ok = p[..p.len() - 1].iter().all(|&x| (1..k).contains(&x));
            let tail = *p.last().unwrap();
            let tail_ok = tail + modulus >= z && tail >= 1;
            let tail_parity = is_k_oddoid(tail, k).unwrap() != is_k_oddoid(z, k).unwrap();
            if p.len() != k as usize || parts.sum() != z || !small_ok || !tail_ok || !tail_parity {
                violations.push(format!("split_keep_tail({z},{k}) = {p:?}"));
            }
        }
    }

    criterion(
        "valuation and split property suites",
        violations.is_empty(),
        format!("{} violations{}", violations.len(), first_of(&violations)),
    );
}

#[test]
fn oracle_outcome_and_grundy_are_consistent() {
    let mut bad = 0;
    for &(code, max) in ALL_SWEEPS {
        let (report, _) = run_sweep(code, max);
        bad += report.rows.iter().filter(|r| (r.grundy == 0) != (r.oracle == Class::P)).count();
    }
    criterion("oracle mex-consistency over all sweeps", bad == 0, format!("{bad} inconsistent rows"));
}

fn first_of<T: std::fmt::Debug>(items: &[T]) -> String {
    items.first().map(|x| format!(", first {x:?}")).unwrap_or_default()
}
