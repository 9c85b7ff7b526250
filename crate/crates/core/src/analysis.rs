//! Necessary conditions, exhaustive sweeps and the odd-`n` scans.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blowup::detect_blow_up;
use crate::error::{Error, Result};
use crate::orient::{accepts, reversal_report, standard_condition, VertexOrdering};
use crate::sequence::{DefiningSequence, StepKind};
use crate::solver::{solve, Budget, SolveStatus};

/// Outcome of a necessary-condition test; `Fail` may carry the offending index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Check {
    Pass,
    Fail(Option<usize>),
}

impl Check {
    pub fn passed(self) -> bool {
        self == Check::Pass
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Pass => f.write_str("pass"),
            Check::Fail(None) => f.write_str("fail"),
            Check::Fail(Some(i)) => write!(f, "fail@{i}"),
        }
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Check::Pass),
            "fail" => Ok(Check::Fail(None)),
            _ => s
                .strip_prefix("fail@")
                .and_then(|i| i.parse().ok())
                .map(|i| Check::Fail(Some(i)))
                .ok_or_else(|| Error::Parse {
                    location: format!("{s:?}"),
                    message: "expected pass, fail or fail@<index>".into(),
                }),
        }
    }
}

impl From<Check> for String {
    fn from(c: Check) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Check {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Prefix condition on the normalized sequence: while no label `k-1` has
/// appeared, `a_{i+1} <= a_i + 1` as integers. Fails with the index `i`.
pub fn necessary_prefix(s: &DefiningSequence) -> Check {
    let s = s.normalize();
    let top = s.k() - 1;
    for i in 1..s.len() {
        if s.get(i) == top {
            break;
        }
        if s.get(i + 1) > s.get(i) + 1 {
            return Check::Fail(Some(i));
        }
    }
    Check::Pass
}

/// Every jump needs, among the earlier indices, one halt and `k-1` steps or
/// one step and `k-1` halts. Fails with the first offending jump.
pub fn necessary_jump(s: &DefiningSequence) -> Check {
    let need = s.k() - 1;
    let (mut halts, mut steps) = (0, 0);
    for (i, tag) in s.classify_steps().tags.into_iter().enumerate() {
        match tag {
            StepKind::Halt => halts += 1,
            StepKind::Step => steps += 1,
            StepKind::Jump => {
                let ok = (halts >= 1 && steps >= need) || (steps >= 1 && halts >= need);
                if !ok {
                    return Check::Fail(Some(i + 1));
                }
            }
        }
    }
    Check::Pass
}

/// Fails iff `n < 2k` or `n = 3k`.
pub fn size_filter(s: &DefiningSequence) -> Check {
    let (n, k) = (s.n(), s.k());
    if n < 2 * k || n == 3 * k {
        Check::Fail(None)
    } else {
        Check::Pass
    }
}

pub fn necessary_all(s: &DefiningSequence) -> bool {
    necessary_prefix(s).passed() && necessary_jump(s).passed() && size_filter(s).passed()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRecord {
    pub sequence: DefiningSequence,
    pub standard: bool,
    pub blowup: usize,
    pub necessary_prefix: Check,
    pub necessary_jump: Check,
    pub size_filter: Check,
    pub status: SolveStatus,
    pub witness: Option<VertexOrdering>,
}

impl SweepRecord {
    pub fn necessary_pass(&self) -> bool {
        self.necessary_prefix.passed() && self.necessary_jump.passed() && self.size_filter.passed()
    }

    /// Checks the invariants that hold between columns.
    pub fn check_consistency(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Inconsistent(format!("{}: {what}", self.sequence)));
        match self.status {
            SolveStatus::Sat => match &self.witness {
                None => return fail("sat without witness"),
                Some(w) if !accepts(&self.sequence.labeling(), w) => {
                    return fail("witness rejected")
                }
                Some(_) => {}
            },
            _ if self.witness.is_some() => return fail("witness without sat"),
            SolveStatus::Unsat | SolveStatus::BudgetExceeded => {}
        }
        if self.standard && self.status != SolveStatus::Sat {
            return fail("standard but not sat");
        }
        if !self.necessary_pass() && self.status == SolveStatus::Sat {
            return fail("sat but fails a necessary condition");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub budget: Budget,
    /// Refuse sweeps with more sequences than this.
    pub max_space: u128,
    pub parallel: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            budget: Budget::default(),
            max_space: 3u128.pow(12),
            parallel: true,
        }
    }
}

/// Builds the record for one sequence.
pub fn classify(s: &DefiningSequence, budget: Budget) -> Result<SweepRecord> {
    let outcome = solve(s, budget);
    let witnesses = detect_blow_up(s, budget);
    let record = SweepRecord {
        sequence: s.clone(),
        standard: standard_condition(s),
        blowup: witnesses.len(),
        necessary_prefix: necessary_prefix(s),
        necessary_jump: necessary_jump(s),
        size_filter: size_filter(s),
        status: outcome.status,
        witness: outcome.witness,
    };
    record.check_consistency()?;
    if record.status == SolveStatus::Unsat
        && witnesses
            .iter()
            .any(|w| w.base_solvable == SolveStatus::Sat)
    {
        return Err(Error::Inconsistent(format!(
            "{s}: blow-up of a solvable base reported unsat"
        )));
    }
    Ok(record)
}

/// Records for the normalized sequences with indices in `range`, in order.
pub fn sweep_range(
    k: usize,
    n: usize,
    range: Range<u128>,
    opts: &SweepOptions,
) -> Result<Vec<SweepRecord>> {
    crate::sequence::partition_exists(k, n)?;
    let size = range.end.saturating_sub(range.start);
    if size > opts.max_space {
        return Err(Error::SpaceTooLarge {
            size,
            limit: opts.max_space,
        });
    }
    let one = |i: u128| {
        let s = DefiningSequence::normalized_from_index(k, n, i)?;
        classify(&s, opts.budget)
    };
    let indices: Vec<u128> = range.collect();
    if opts.parallel {
        indices.into_par_iter().map(one).collect()
    } else {
        indices.into_iter().map(one).collect()
    }
}

/// One record per normalized sequence of `K_n` (`a_1 = 0`), in lexicographic
/// order. Each record's dual is in the same sweep and must share its status.
pub fn sweep(k: usize, n: usize, opts: &SweepOptions) -> Result<Vec<SweepRecord>> {
    let total = DefiningSequence::normalized_count(k, n);
    if total > opts.max_space {
        return Err(Error::SpaceTooLarge {
            size: total,
            limit: opts.max_space,
        });
    }
    let records = sweep_range(k, n, 0..total, opts)?;
    check_dual_closure(&records)?;
    Ok(records)
}

/// Requires equal statuses between every record and its dual when both
/// searches completed.
pub fn check_dual_closure(records: &[SweepRecord]) -> Result<()> {
    let Some(first) = records.first() else {
        return Ok(());
    };
    let total = DefiningSequence::normalized_count(first.sequence.k(), first.sequence.n());
    if records.len() as u128 != total {
        return Err(Error::Inconsistent(format!(
            "dual closure needs all {total} records, got {}",
            records.len()
        )));
    }
    for r in records {
        let dual = r.sequence.dual();
        let j = dual
            .normalized_index()
            .expect("dual of a normalized sequence is normalized");
        let other = &records[j as usize];
        if other.sequence != dual {
            return Err(Error::Inconsistent("records are not in index order".into()));
        }
        let done = |s: SolveStatus| s != SolveStatus::BudgetExceeded;
        if done(r.status) && done(other.status) && r.status != other.status {
            return Err(Error::Inconsistent(format!(
                "{} is {} but its dual {} is {}",
                r.sequence,
                r.status.as_str(),
                dual,
                other.status.as_str()
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub n: usize,
    pub instances: u128,
    pub sat: u128,
    pub unsat: u128,
    pub budget_exceeded: u128,
    pub counterexamples: Vec<(DefiningSequence, VertexOrdering)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub k: usize,
    pub rows: Vec<ConjectureRow>,
}

impl ConjectureReport {
    pub fn counterexamples(&self) -> impl Iterator<Item = &(DefiningSequence, VertexOrdering)> {
        self.rows.iter().flat_map(|r| r.counterexamples.iter())
    }
}

/// Solves every normalized sequence for each odd `n` in `ns`; any solvable
/// instance is a counterexample to the odd-order conjecture and is
/// re-verified before it is reported.
pub fn conjecture_scan(k: usize, ns: &[usize], opts: &SweepOptions) -> Result<ConjectureReport> {
    if k.is_multiple_of(2) {
        return Err(Error::Parity {
            n: k,
            expected: "odd (k is the part count)",
        });
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        if n % 2 == 0 {
            return Err(Error::Parity { n, expected: "odd" });
        }
        crate::sequence::partition_exists(k, n)?;
        let total = DefiningSequence::normalized_count(k, n);
        if total > opts.max_space {
            return Err(Error::SpaceTooLarge {
                size: total,
                limit: opts.max_space,
            });
        }
        let one = |i: u128| {
            let s = DefiningSequence::normalized_from_index(k, n, i).expect("valid");
            let out = solve(&s, opts.budget);
            (s, out)
        };
        let outcomes: Vec<_> = if opts.parallel {
            (0..total).into_par_iter().map(one).collect()
        } else {
            (0..total).map(one).collect()
        };
        let mut row = ConjectureRow {
            n,
            instances: total,
            sat: 0,
            unsat: 0,
            budget_exceeded: 0,
            counterexamples: Vec::new(),
        };
        for (s, out) in outcomes {
            match out.status {
                SolveStatus::Sat => {
                    let w = out.witness.expect("sat carries a witness");
                    let report = reversal_report(&s.labeling(), &w)?;
                    assert!(report.accepted(), "counterexample witness for {s} rejected");
                    row.sat += 1;
                    row.counterexamples.push((s, w));
                }
                SolveStatus::Unsat => row.unsat += 1,
                SolveStatus::BudgetExceeded => row.budget_exceeded += 1,
            }
        }
        rows.push(row);
    }
    Ok(ConjectureReport { k, rows })
}
