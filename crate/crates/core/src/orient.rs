//! Vertex orderings, the reversal check, bitonicity and the standard
//! orientation.
//!
//! An ordering `tau(1), ..., tau(n)` stands for the transitive tournament in
//! which every edge points to the later vertex. The rotation `v -> v+1`
//! reverses an edge `u -> v` if `v+1` precedes `u+1`; the tournament is a
//! valid orientation of the partition exactly when every reversed edge has
//! label `k - 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::{DefiningSequence, Label, PartitionLabeling, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawOrdering", into = "RawOrdering")]
pub struct VertexOrdering {
    tau: Vec<Vertex>,
    pos: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrdering {
    n: usize,
    tau: Vec<Vertex>,
}

impl TryFrom<RawOrdering> for VertexOrdering {
    type Error = Error;

    fn try_from(raw: RawOrdering) -> Result<Self> {
        if raw.tau.len() != raw.n {
            return Err(Error::NotAPermutation {
                n: raw.n,
                detail: format!("tau has {} entries", raw.tau.len()),
            });
        }
        VertexOrdering::new(raw.tau)
    }
}

impl From<VertexOrdering> for RawOrdering {
    fn from(o: VertexOrdering) -> Self {
        RawOrdering {
            n: o.tau.len(),
            tau: o.tau,
        }
    }
}

impl VertexOrdering {
    pub fn new(tau: Vec<Vertex>) -> Result<Self> {
        let n = tau.len();
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in tau.iter().enumerate() {
            if v >= n {
                return Err(Error::NotAPermutation {
                    n,
                    detail: format!("vertex {v} out of range"),
                });
            }
            if pos[v] != usize::MAX {
                return Err(Error::NotAPermutation {
                    n,
                    detail: format!("vertex {v} repeated"),
                });
            }
            pos[v] = i;
        }
        Ok(VertexOrdering { tau, pos })
    }

    pub fn identity(n: usize) -> Self {
        VertexOrdering {
            tau: (0..n).collect(),
            pos: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.tau.len()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.tau
    }

    /// 0-based position of `v`.
    #[inline]
    pub fn position(&self, v: Vertex) -> usize {
        self.pos[v]
    }

    /// `true` if the edge `{u, v}` points from `u` to `v`.
    #[inline]
    pub fn precedes(&self, u: Vertex, v: Vertex) -> bool {
        self.pos[u] < self.pos[v]
    }

    /// Applies `v -> v + c (mod n)` to every vertex.
    pub fn shifted(&self, c: i64) -> VertexOrdering {
        let n = self.n() as i64;
        self.mapped(|v| (v as i64 + c).rem_euclid(n) as Vertex)
    }

    /// Applies `v -> -v (mod n)` to every vertex.
    pub fn negated(&self) -> VertexOrdering {
        let n = self.n();
        self.mapped(|v| (n - v) % n)
    }

    fn mapped(&self, f: impl Fn(Vertex) -> Vertex) -> VertexOrdering {
        VertexOrdering::new(self.tau.iter().map(|&v| f(v)).collect())
            .expect("vertex map is a bijection")
    }

    /// Edges `(u, v)` oriented by this ordering, `u` first; sorted by `(min, max)`.
    pub fn oriented_edges(&self) -> Vec<(Vertex, Vertex)> {
        let n = self.n();
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .map(|(u, v)| if self.precedes(u, v) { (u, v) } else { (v, u) })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

/// An edge `u -> v` with its label; serialized as `[u, v, label]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct LabeledEdge {
    pub from: Vertex,
    pub to: Vertex,
    pub label: Label,
}

impl From<[usize; 3]> for LabeledEdge {
    fn from([from, to, label]: [usize; 3]) -> Self {
        LabeledEdge { from, to, label }
    }
}

impl From<LabeledEdge> for [usize; 3] {
    fn from(e: LabeledEdge) -> Self {
        [e.from, e.to, e.label]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientationReport {
    pub reversed_edges: Vec<LabeledEdge>,
    pub verdict: Verdict,
    pub first_violation: Option<LabeledEdge>,
}

impl OrientationReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }
}

/// Lists every edge reversed by the rotation and accepts iff all of them
/// carry label `k - 1`.
pub fn reversal_report(p: &PartitionLabeling, o: &VertexOrdering) -> Result<OrientationReport> {
    let n = p.n();
    if o.n() != n {
        return Err(Error::SizeMismatch {
            partition: n,
            ordering: o.n(),
        });
    }
    let top = p.k() - 1;
    let mut reversed_edges = Vec::new();
    for (u, v) in o.oriented_edges() {
        if o.precedes((v + 1) % n, (u + 1) % n) {
            reversed_edges.push(LabeledEdge {
                from: u,
                to: v,
                label: p.label(u, v),
            });
        }
    }
    let first_violation = reversed_edges.iter().copied().find(|e| e.label != top);
    Ok(OrientationReport {
        verdict: if first_violation.is_none() {
            Verdict::Accept
        } else {
            Verdict::Reject
        },
        reversed_edges,
        first_violation,
    })
}

/// Fast accept/reject without building a report.
pub fn accepts(p: &PartitionLabeling, o: &VertexOrdering) -> bool {
    let n = p.n();
    if o.n() != n {
        return false;
    }
    let top = p.k() - 1;
    let tau = o.as_slice();
    for (i, &u) in tau.iter().enumerate() {
        let pu = o.position((u + 1) % n);
        for &v in &tau[i + 1..] {
            if o.position((v + 1) % n) < pu && p.label(u, v) != top {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bitonicity {
    pub bitonic: bool,
    /// Set when the local minimum is unique.
    pub local_min: Option<Vertex>,
    /// Set when the local maximum is unique.
    pub local_max: Option<Vertex>,
}

/// Local extrema are taken against the cyclic neighbours `j - 1` and `j + 1`.
pub fn is_bitonic(o: &VertexOrdering) -> Result<Bitonicity> {
    let n = o.n();
    if n < 3 {
        return Err(Error::TooSmall { n });
    }
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    for j in 0..n {
        let (prev, next) = (o.position((j + n - 1) % n), o.position((j + 1) % n));
        let here = o.position(j);
        if here < prev && here < next {
            minima.push(j);
        }
        if here > prev && here > next {
            maxima.push(j);
        }
    }
    let unique = |v: &[Vertex]| if v.len() == 1 { Some(v[0]) } else { None };
    let (local_min, local_max) = (unique(&minima), unique(&maxima));
    Ok(Bitonicity {
        bitonic: local_min.is_some() && local_max.is_some(),
        local_min,
        local_max,
    })
}

/// True iff `2k | n` and the sequence never jumps.
pub fn standard_condition(s: &DefiningSequence) -> bool {
    s.n().is_multiple_of(2 * s.k()) && !s.classify_steps().has_jump()
}

/// The bitonic orientation built by growing an arc from vertex 0.
///
/// Works on the normalized sequence (`a_1 = 0`); at step `i` the placed
/// vertices form the arc `j+1..=j+i` and the label of `{j, j+i+1}` decides
/// the side: `0` extends left, `k-1` extends right. The result is mapped back
/// to the original labels by `v -> v - a_1`, so its local minimum is `-a_1`.
/// Returns `None` when the standard condition fails.
pub fn standard_orientation(s: &DefiningSequence) -> Result<Option<VertexOrdering>> {
    if !standard_condition(s) {
        return Ok(None);
    }
    let c = s.get(1);
    let normalized = s.normalize();
    let p = normalized.labeling();
    let (n, k) = (s.n(), s.k());
    let mut tau = Vec::with_capacity(n);
    tau.push(0);
    // arc is {j+1, ..., j+i}
    let mut j = n - 1;
    for i in 1..n - 1 {
        let right = (j + i + 1) % n;
        match p.label(j, right) {
            0 => {
                tau.push(j);
                j = (j + n - 1) % n;
            }
            l if l == k - 1 => tau.push(right),
            l => {
                return Err(Error::InternalContradiction(format!(
                    "edge {{{j},{right}}} has label {l} at step {i} for {s}"
                )))
            }
        }
    }
    tau.push((j + n) % n);
    debug_assert_eq!(tau[n - 1], n / 2);
    let ordering =
        VertexOrdering::new(tau).map_err(|e| Error::InternalContradiction(e.to_string()))?;
    Ok(Some(ordering.shifted(-(c as i64))))
}
