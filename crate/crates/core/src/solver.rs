//! Complete decision procedure for transitive orientations of a cyclic
//! partition.
//!
//! Each edge `{u, v}` (`u < v`) gets a boolean "points from `u` to `v`". An
//! edge whose label is not `k - 1` must not be reversed by the rotation, so
//! its orientation is tied to that of its image; these ties collapse every
//! rotation orbit into chains of `k` edges, and one search variable remains
//! per chain. Transitivity is encoded as "no directed triangle": two clauses
//! of three literals per vertex triple. The search is a DPLL loop with unit
//! propagation and chronological backtracking over a fixed variable order.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orient::{accepts, VertexOrdering};
use crate::sequence::{DefiningSequence, PartitionLabeling, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: Some(100_000_000),
            max_time: Some(Duration::from_secs(60)),
        }
    }
}

impl Budget {
    pub const UNLIMITED: Budget = Budget {
        max_nodes: None,
        max_time: None,
    };

    pub fn nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes: Some(max_nodes),
            max_time: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Sat,
    Unsat,
    BudgetExceeded,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Sat => "sat",
            SolveStatus::Unsat => "unsat",
            SolveStatus::BudgetExceeded => "budget_exceeded",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes: u64,
    /// Wall time; left out of the JSON encoding so outputs stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub witness: Option<VertexOrdering>,
    pub stats: SolveStats,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        self.status == SolveStatus::Sat
    }
}

type Lit = u32;

#[inline]
fn lit(var: usize, positive: bool) -> Lit {
    (var as Lit) << 1 | (!positive) as Lit
}

#[inline]
fn var_of(l: Lit) -> usize {
    (l >> 1) as usize
}

fn edge_index(n: usize, u: Vertex, v: Vertex) -> usize {
    debug_assert!(u < v && v < n);
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

/// Union-find over edges, tracking the parity between an edge's orientation
/// variable and its root's.
struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityUnionFind {
    fn new(len: usize) -> Self {
        ParityUnionFind {
            parent: (0..len).collect(),
            parity: vec![false; len],
        }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (root, up) = self.find(p);
        self.parent[x] = root;
        self.parity[x] ^= up;
        (root, self.parity[x])
    }

    /// Records `x == y ^ odd`; returns false on contradiction.
    fn union(&mut self, x: usize, y: usize, odd: bool) -> bool {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx == ry {
            return px ^ py == odd;
        }
        self.parent[rx] = ry;
        self.parity[rx] = px ^ py ^ odd;
        true
    }
}

/// The clause encoding of one partition.
struct Encoding {
    n: usize,
    num_vars: usize,
    /// Literal equal to "edge points from min to max", per edge index.
    edge_lit: Vec<Lit>,
    clauses: Vec<Vec<Lit>>,
    /// Clauses containing each literal.
    occurrences: Vec<Vec<u32>>,
    /// Set when the orientation ties alone are contradictory.
    trivially_unsat: bool,
}

impl Encoding {
    fn new(p: &PartitionLabeling) -> Self {
        let (n, k) = (p.n(), p.k());
        let edges = n * (n - 1) / 2;
        let mut uf = ParityUnionFind::new(edges);
        let mut trivially_unsat = false;
        for u in 0..n {
            for v in u + 1..n {
                if p.label(u, v) == k - 1 {
                    continue;
                }
                // u -> v forces u+1 -> v+1; the image flips min/max iff v wraps to 0
                let (su, sv) = (u + 1, (v + 1) % n);
                let (img, flipped) = if sv == 0 {
                    (edge_index(n, 0, su), true)
                } else {
                    (edge_index(n, su, sv), false)
                };
                if !uf.union(edge_index(n, u, v), img, flipped) {
                    trivially_unsat = true;
                }
            }
        }

        // variables numbered by first appearance, short edges first
        let mut var_of_root = vec![usize::MAX; edges];
        let mut edge_lit = vec![0; edges];
        let mut num_vars = 0;
        for d in 1..=n / 2 {
            for u in 0..n {
                let v = (u + d) % n;
                let (a, b) = if u < v { (u, v) } else { (v, u) };
                let e = edge_index(n, a, b);
                let (root, odd) = uf.find(e);
                if var_of_root[root] == usize::MAX {
                    var_of_root[root] = num_vars;
                    num_vars += 1;
                }
                edge_lit[e] = lit(var_of_root[root], !odd);
            }
        }

        let mut clauses: Vec<Vec<Lit>> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let ab = edge_lit[edge_index(n, a, b)];
                for c in b + 1..n {
                    let bc = edge_lit[edge_index(n, b, c)];
                    let ac = edge_lit[edge_index(n, a, c)];
                    // forbid a->b->c->a and a->c->b->a
                    for clause in [[ab ^ 1, bc ^ 1, ac], [ab, bc, ac ^ 1]] {
                        let mut clause = clause.to_vec();
                        clause.sort_unstable();
                        clause.dedup();
                        if clause.windows(2).any(|w| w[0] ^ 1 == w[1]) {
                            continue;
                        }
                        clauses.push(clause);
                    }
                }
            }
        }
        clauses.sort();
        clauses.dedup();

        let mut occurrences = vec![Vec::new(); 2 * num_vars];
        for (ci, clause) in clauses.iter().enumerate() {
            for &l in clause {
                occurrences[l as usize].push(ci as u32);
            }
        }
        Encoding {
            n,
            num_vars,
            edge_lit,
            clauses,
            occurrences,
            trivially_unsat,
        }
    }

    /// Reads the tournament off a full assignment as a vertex ordering.
    fn ordering(&self, assign: &[i8]) -> VertexOrdering {
        let n = self.n;
        let mut out_degree = vec![0usize; n];
        for u in 0..n {
            for v in u + 1..n {
                let l = self.edge_lit[edge_index(n, u, v)];
                let forward = (assign[var_of(l)] as Lit ^ (l & 1)) == 1;
                out_degree[if forward { u } else { v }] += 1;
            }
        }
        let mut tau: Vec<Vertex> = (0..n).collect();
        tau.sort_by_key(|&v| std::cmp::Reverse(out_degree[v]));
        let o = VertexOrdering::new(tau).expect("sorted vertices form a permutation");
        for u in 0..n {
            for v in u + 1..n {
                let l = self.edge_lit[edge_index(n, u, v)];
                let forward = (assign[var_of(l)] as Lit ^ (l & 1)) == 1;
                assert_eq!(
                    o.precedes(u, v),
                    forward,
                    "satisfying assignment is not a transitive tournament"
                );
            }
        }
        o
    }
}

enum Flow {
    Continue,
    Stop,
}

struct Search<'a> {
    enc: &'a Encoding,
    assign: Vec<i8>,
    trail: Vec<Lit>,
    nodes: u64,
    budget: Budget,
    start: Instant,
    out_of_budget: bool,
}

impl<'a> Search<'a> {
    fn new(enc: &'a Encoding, budget: Budget) -> Self {
        Search {
            enc,
            assign: vec![-1; enc.num_vars],
            trail: Vec::with_capacity(enc.num_vars),
            nodes: 0,
            budget,
            start: Instant::now(),
            out_of_budget: false,
        }
    }

    #[inline]
    fn value(&self, l: Lit) -> i8 {
        match self.assign[var_of(l)] {
            -1 => -1,
            x => x ^ (l & 1) as i8,
        }
    }

    fn undo(&mut self, mark: usize) {
        for l in self.trail.drain(mark..) {
            self.assign[var_of(l)] = -1;
        }
    }

    /// Makes `l` true and propagates units; false on conflict (the caller undoes).
    fn assume(&mut self, l: Lit) -> bool {
        match self.value(l) {
            1 => return true,
            0 => return false,
            _ => {}
        }
        let mut head = self.trail.len();
        self.set(l);
        while head < self.trail.len() {
            let falsified = self.trail[head] ^ 1;
            head += 1;
            for &ci in &self.enc.occurrences[falsified as usize] {
                let mut unit = None;
                let mut open = 0;
                let mut satisfied = false;
                for &other in &self.enc.clauses[ci as usize] {
                    match self.value(other) {
                        1 => {
                            satisfied = true;
                            break;
                        }
                        -1 => {
                            open += 1;
                            unit = Some(other);
                        }
                        _ => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match open {
                    0 => return false,
                    1 => self.set(unit.unwrap()),
                    _ => {}
                }
            }
        }
        true
    }

    fn set(&mut self, l: Lit) {
        self.assign[var_of(l)] = 1 ^ (l & 1) as i8;
        self.trail.push(l);
    }

    fn exhausted(&mut self) -> bool {
        if let Some(max) = self.budget.max_nodes {
            if self.nodes > max {
                self.out_of_budget = true;
            }
        }
        if let Some(max) = self.budget.max_time {
            if self.nodes.is_multiple_of(1024) && self.start.elapsed() > max {
                self.out_of_budget = true;
            }
        }
        self.out_of_budget
    }

    /// Root propagation of unit clauses; false if the formula is refuted.
    fn init(&mut self) -> bool {
        if self.enc.trivially_unsat {
            return false;
        }
        let units: Vec<Lit> = self
            .enc
            .clauses
            .iter()
            .filter(|c| c.len() == 1)
            .map(|c| c[0])
            .collect();
        units.into_iter().all(|l| self.assume(l))
    }

    /// Depth-first search from `from_var`, reporting complete assignments.
    /// `fix_first` restricts the first decision to `false`.
    fn dfs(
        &mut self,
        from_var: usize,
        fix_first: bool,
        on_solution: &mut dyn FnMut(&[i8]) -> Flow,
    ) -> Flow {
        let Some(var) = (from_var..self.enc.num_vars).find(|&v| self.assign[v] < 0) else {
            return on_solution(&self.assign);
        };
        self.nodes += 1;
        if self.exhausted() {
            return Flow::Stop;
        }
        let choices: &[bool] = if fix_first { &[false] } else { &[false, true] };
        for &positive in choices {
            let mark = self.trail.len();
            if self.assume(lit(var, positive)) {
                if let Flow::Stop = self.dfs(var + 1, false, on_solution) {
                    self.undo(mark);
                    return Flow::Stop;
                }
            }
            self.undo(mark);
        }
        Flow::Continue
    }
}

fn finish(
    status: SolveStatus,
    witness: Option<VertexOrdering>,
    nodes: u64,
    start: Instant,
) -> SolveOutcome {
    SolveOutcome {
        status,
        witness,
        stats: SolveStats {
            nodes,
            elapsed: start.elapsed(),
        },
    }
}

/// Decides whether `s` has a transitive orientation.
///
/// `Unsat` is only reported after the search space is exhausted; hitting the
/// budget yields `BudgetExceeded`. Every `Sat` witness is re-checked with the
/// reversal test before it is returned.
pub fn solve(s: &DefiningSequence, budget: Budget) -> SolveOutcome {
    let start = Instant::now();
    let p = s.labeling();
    let enc = Encoding::new(&p);
    let mut search = Search::new(&enc, budget);
    if !search.init() {
        return finish(SolveStatus::Unsat, None, 0, start);
    }
    let mut found = None;
    // Reversing every edge maps solutions to solutions, so the first
    // decision only needs one polarity.
    search.dfs(0, true, &mut |assign| {
        found = Some(enc.ordering(assign));
        Flow::Stop
    });
    let status = match (&found, search.out_of_budget) {
        (Some(o), _) => {
            assert!(accepts(&p, o), "solver produced a rejected witness for {s}");
            SolveStatus::Sat
        }
        (None, true) => SolveStatus::BudgetExceeded,
        (None, false) => SolveStatus::Unsat,
    };
    finish(status, found, search.nodes, start)
}

/// All accepted orderings of `s`, up to `cap`, in search order.
///
/// When the list is complete it is closed under `v -> v + k`, which is
/// asserted.
pub fn enumerate(s: &DefiningSequence, cap: usize) -> Vec<VertexOrdering> {
    let p = s.labeling();
    let enc = Encoding::new(&p);
    let mut search = Search::new(&enc, Budget::UNLIMITED);
    let mut out = Vec::new();
    if cap == 0 || !search.init() {
        return out;
    }
    search.dfs(0, false, &mut |assign| {
        out.push(enc.ordering(assign));
        if out.len() >= cap {
            Flow::Stop
        } else {
            Flow::Continue
        }
    });
    for o in &out {
        assert!(accepts(&p, o), "enumerated ordering rejected for {s}");
    }
    if out.len() < cap {
        let set: std::collections::HashSet<_> = out.iter().collect();
        for o in &out {
            assert!(
                set.contains(&o.shifted(s.k() as i64)),
                "solution set of {s} is not closed under the shift by k"
            );
        }
    }
    out
}

/// Largest `n` the brute-force oracle accepts.
pub const ORACLE_MAX_N: usize = 9;

/// Independent check: tries every ordering of `0..n` (Heap's algorithm)
/// against the reversal test.
pub fn oracle_solve(s: &DefiningSequence) -> Result<SolveOutcome> {
    let n = s.n();
    if n > ORACLE_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: ORACLE_MAX_N,
        });
    }
    let start = Instant::now();
    let p = s.labeling();
    let mut tau: Vec<Vertex> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let mut tried = 1u64;
    let check = |tau: &[Vertex]| {
        let o = VertexOrdering::new(tau.to_vec()).expect("permutation");
        accepts(&p, &o).then_some(o)
    };
    if let Some(o) = check(&tau) {
        return Ok(finish(SolveStatus::Sat, Some(o), tried, start));
    }
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                tau.swap(0, i);
            } else {
                tau.swap(counters[i], i);
            }
            tried += 1;
            if let Some(o) = check(&tau) {
                return Ok(finish(SolveStatus::Sat, Some(o), tried, start));
            }
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(finish(SolveStatus::Unsat, None, tried, start))
}
