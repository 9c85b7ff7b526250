//! Hamiltonian path and cycle decompositions of transitive tournaments, and
//! the composition of per-cycle solutions for a permutation with several
//! cycles.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orient::{accepts, standard_orientation, VertexOrdering};
use crate::sequence::{DefiningSequence, Label, Vertex};

/// A transitive tournament split into parts, with the permutation `sigma`
/// that carries part `d` onto part `d + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedDecomposition {
    pub n: usize,
    /// Oriented edges `(from, to)` of each part, sorted.
    pub parts: Vec<Vec<(Vertex, Vertex)>>,
    pub global_order: VertexOrdering,
    pub sigma: Vec<Vertex>,
}

impl OrientedDecomposition {
    fn from_labels(
        global_order: VertexOrdering,
        sigma: Vec<Vertex>,
        k: usize,
        label: impl Fn(Vertex, Vertex) -> Label,
    ) -> Self {
        let n = global_order.n();
        let mut parts = vec![Vec::new(); k];
        for (u, v) in global_order.oriented_edges() {
            parts[label(u, v)].push((u, v));
        }
        for part in &mut parts {
            part.sort_unstable();
        }
        OrientedDecomposition {
            n,
            parts,
            global_order,
            sigma,
        }
    }

    /// Checks that the parts partition the tournament of `global_order` and
    /// that `sigma` maps each oriented part onto the next one (the last part
    /// onto the first up to orientation).
    pub fn verify(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InternalContradiction(msg));
        let n = self.n;
        let mut seen = BTreeSet::new();
        for (d, part) in self.parts.iter().enumerate() {
            for &(u, v) in part {
                if !self.global_order.precedes(u, v) {
                    return bad(format!("part {d} edge {u}->{v} against the global order"));
                }
                if !seen.insert((u.min(v), u.max(v))) {
                    return bad(format!("edge {{{u},{v}}} in two parts"));
                }
            }
        }
        if seen.len() != n * (n - 1) / 2 {
            return bad(format!(
                "parts cover {} of {} edges",
                seen.len(),
                n * (n - 1) / 2
            ));
        }
        let k = self.parts.len();
        for d in 0..k {
            let image: BTreeSet<_> = self.parts[d]
                .iter()
                .map(|&(u, v)| (self.sigma[u], self.sigma[v]))
                .collect();
            let next: BTreeSet<_> = self.parts[(d + 1) % k].iter().copied().collect();
            let matches = if d + 1 < k {
                image == next
            } else {
                let undirected = |s: &BTreeSet<(usize, usize)>| {
                    s.iter()
                        .map(|&(u, v)| (u.min(v), u.max(v)))
                        .collect::<BTreeSet<_>>()
                };
                undirected(&image) == undirected(&next)
            };
            if !matches {
                return bad(format!(
                    "sigma does not map part {d} onto part {}",
                    (d + 1) % k
                ));
            }
        }
        Ok(())
    }
}

/// Walecki's zig-zag path `0, 1, n-1, 2, n-2, ..., n/2` rotated by `d`.
pub fn zigzag_path(n: usize, d: usize) -> Vec<Vertex> {
    let mut path = vec![0];
    for i in 1..n / 2 {
        path.push(i);
        path.push(n - i);
    }
    path.push(n / 2);
    path.into_iter().map(|v| (v + d) % n).collect()
}

/// Decomposes `T_n` (even `n >= 4`) into `n/2` alternating Hamiltonian
/// paths: the standard orientation of the partition with `a_i = floor(i/2)`.
pub fn walecki_paths(n: usize) -> Result<(DefiningSequence, OrientedDecomposition)> {
    if n % 2 == 1 || n < 4 {
        return Err(Error::Parity {
            n,
            expected: "even and at least 4",
        });
    }
    let s = DefiningSequence::new(n / 2, n, (1..=n / 2).map(|i| i / 2).collect())?;
    let order = standard_orientation(&s)?
        .ok_or_else(|| Error::InternalContradiction(format!("{s} is not standard")))?;
    let p = s.labeling();
    let sigma = (0..n).map(|v| (v + 1) % n).collect();
    let dec = OrientedDecomposition::from_labels(order, sigma, s.k(), |u, v| p.label(u, v));
    Ok((s, dec))
}

/// Decomposes `T_n` (odd `n >= 3`) into `(n-1)/2` isomorphic Hamiltonian
/// cycles: Walecki paths on `0..n-1` closed through the apex `n-1`, which
/// comes first in the order.
pub fn hamiltonian_cycles(n: usize) -> Result<OrientedDecomposition> {
    if n.is_multiple_of(2) || n < 3 {
        return Err(Error::Parity {
            n,
            expected: "odd and at least 3",
        });
    }
    let m = n - 1;
    // K_2 is its own single path
    let (labeling, base_order) = if m == 2 {
        (None, VertexOrdering::identity(2))
    } else {
        let (s, dec) = walecki_paths(m)?;
        (Some(s.labeling()), dec.global_order)
    };
    let apex = m;
    let k = m / 2;
    let label = |u: Vertex, v: Vertex| -> Label {
        if u == apex || v == apex {
            u.min(v) % k
        } else {
            labeling.as_ref().map_or(0, |p| p.label(u, v))
        }
    };
    let tau = std::iter::once(apex)
        .chain(base_order.as_slice().iter().copied())
        .collect();
    let order = VertexOrdering::new(tau)?;
    let sigma = (0..n)
        .map(|v| if v == apex { apex } else { (v + 1) % m })
        .collect();
    Ok(OrientedDecomposition::from_labels(order, sigma, k, label))
}

/// One cycle of a permutation with its solved restriction, or a fixed point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Cycle {
        sequence: DefiningSequence,
        ordering: VertexOrdering,
    },
    FixedPoint,
}

impl Block {
    fn len(&self) -> usize {
        match self {
            Block::Cycle { sequence, .. } => sequence.n(),
            Block::FixedPoint => 1,
        }
    }
}

/// Combines solved cycles into one orientation on their disjoint union.
///
/// Block `b` occupies the next `len(b)` vertices and `sigma` rotates each
/// block. Edges between blocks point to the later block; an edge between
/// local vertex `x` of a cycle and any vertex of a later block gets label
/// `x mod k`, and an edge from a fixed point to local vertex `y` gets
/// `y mod k`, which keeps labels shifting by one under `sigma`.
pub fn compose_cycle_solutions(blocks: &[Block]) -> Result<OrientedDecomposition> {
    let mut k = None;
    let mut fixed = 0;
    for (index, b) in blocks.iter().enumerate() {
        match b {
            Block::FixedPoint => fixed += 1,
            Block::Cycle { sequence, ordering } => {
                if *k.get_or_insert(sequence.k()) != sequence.k() {
                    return Err(Error::BlockRejected {
                        index,
                        reason: format!("part count {} differs from {}", sequence.k(), k.unwrap()),
                    });
                }
                if !accepts(&sequence.labeling(), ordering) {
                    return Err(Error::BlockRejected {
                        index,
                        reason: "ordering is not a transitive orientation".into(),
                    });
                }
            }
        }
    }
    if fixed > 1 {
        return Err(Error::MultipleFixedPoints);
    }
    let k = k.ok_or_else(|| Error::BlockRejected {
        index: 0,
        reason: "no cycle block".into(),
    })?;

    let mut offset = Vec::with_capacity(blocks.len());
    let mut owner = Vec::new();
    let mut tau = Vec::new();
    let mut sigma = Vec::new();
    for (bi, b) in blocks.iter().enumerate() {
        let start = owner.len();
        offset.push(start);
        let len = b.len();
        owner.extend(std::iter::repeat_n(bi, len));
        match b {
            Block::FixedPoint => tau.push(start),
            Block::Cycle { ordering, .. } => {
                tau.extend(ordering.as_slice().iter().map(|v| v + start))
            }
        }
        sigma.extend((0..len).map(|i| start + (i + 1) % len));
    }
    let labelings: Vec<_> = blocks
        .iter()
        .map(|b| match b {
            Block::Cycle { sequence, .. } => Some(sequence.labeling()),
            Block::FixedPoint => None,
        })
        .collect();
    let label = |u: Vertex, v: Vertex| -> Label {
        let (x, y) = if owner[u] <= owner[v] { (u, v) } else { (v, u) };
        let (bx, by) = (owner[x], owner[y]);
        let (lx, ly) = (x - offset[bx], y - offset[by]);
        if bx == by {
            return labelings[bx]
                .as_ref()
                .expect("fixed points have no inner edges")
                .label(lx, ly);
        }
        match blocks[bx] {
            Block::Cycle { .. } => lx % k,
            Block::FixedPoint => ly % k,
        }
    };
    let order = VertexOrdering::new(tau)?;
    let dec = OrientedDecomposition::from_labels(order, sigma, k, label);
    dec.verify()?;
    Ok(dec)
}

/// Vertices of `part` with both an in-edge and an out-edge.
pub fn non_alternating_vertices(part: &[(Vertex, Vertex)], n: usize) -> Vec<Vertex> {
    let mut out = vec![0; n];
    let mut inn = vec![0; n];
    for &(u, v) in part {
        out[u] += 1;
        inn[v] += 1;
    }
    (0..n).filter(|&v| out[v] > 0 && inn[v] > 0).collect()
}

fn degrees_and_connected(part: &[(Vertex, Vertex)], n: usize) -> (Vec<usize>, bool) {
    let mut deg = vec![0; n];
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in part {
        deg[u] += 1;
        deg[v] += 1;
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    (deg, seen.into_iter().all(|x| x))
}

pub fn is_hamiltonian_path(part: &[(Vertex, Vertex)], n: usize) -> bool {
    let (deg, connected) = degrees_and_connected(part, n);
    part.len() == n - 1 && connected && deg.iter().all(|&d| d == 1 || d == 2)
}

pub fn is_hamiltonian_cycle(part: &[(Vertex, Vertex)], n: usize) -> bool {
    let (deg, connected) = degrees_and_connected(part, n);
    part.len() == n && connected && deg.iter().all(|&d| d == 2)
}
