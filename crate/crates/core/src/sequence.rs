//! Defining sequences and the cyclic edge labeling they induce.
//!
//! A cyclic `k`-partition of `K_n` splits the edges into parts `F_0..F_{k-1}`
//! with the rotation `v -> v+1 (mod n)` carrying `F_d` onto `F_{d+1}`. The
//! label of an edge is the index of its part, so labels obey
//! `label(u+i, v+i) = label(u, v) + i (mod k)`, and the labels of the edges
//! `{0, j}` for `1 <= j <= n/2` determine everything.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex of `K_n`, always reduced into `0..n`.
pub type Vertex = usize;

/// Part index in `0..k`.
pub type Label = usize;

/// Checks the existence condition for cyclic `k`-partitions of `K_n`.
pub fn partition_exists(k: usize, n: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::PartCount { k });
    }
    if n < k || !n.is_multiple_of(k) {
        return Err(Error::Divisibility {
            k,
            n,
            reason: "k must divide n",
        });
    }
    if k.is_multiple_of(2) && !n.is_multiple_of(2 * k) {
        return Err(Error::Divisibility {
            k,
            n,
            reason: "for even k, 2k must divide n",
        });
    }
    Ok(())
}

/// The labels `a_1..a_{n/2}` of the edges `{0, j}`; stored 0-based, exposed
/// 1-based through [`DefiningSequence::get`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSequence", into = "RawSequence")]
pub struct DefiningSequence {
    k: usize,
    n: usize,
    a: Vec<Label>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSequence {
    k: usize,
    n: usize,
    a: Vec<Label>,
}

impl TryFrom<RawSequence> for DefiningSequence {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        DefiningSequence::new(raw.k, raw.n, raw.a)
    }
}

impl From<DefiningSequence> for RawSequence {
    fn from(s: DefiningSequence) -> Self {
        RawSequence {
            k: s.k,
            n: s.n,
            a: s.a,
        }
    }
}

impl DefiningSequence {
    /// Validating constructor.
    pub fn new(k: usize, n: usize, a: Vec<Label>) -> Result<Self> {
        partition_exists(k, n)?;
        let expected = n / 2;
        if a.len() != expected {
            return Err(Error::Length {
                n,
                expected,
                got: a.len(),
            });
        }
        if let Some((i, &label)) = a.iter().enumerate().find(|(_, &x)| x >= k) {
            return Err(Error::Alphabet {
                index: i + 1,
                label,
                k,
            });
        }
        Ok(DefiningSequence { k, n, a })
    }

    /// The `index`-th sequence (in lexicographic order) among those with
    /// `a_1 = 0`.
    pub fn normalized_from_index(k: usize, n: usize, mut index: u128) -> Result<Self> {
        let len = n / 2;
        let mut a = vec![0; len];
        for slot in a.iter_mut().skip(1).rev() {
            *slot = (index % k as u128) as Label;
            index /= k as u128;
        }
        DefiningSequence::new(k, n, a)
    }

    /// Inverse of [`normalized_from_index`](Self::normalized_from_index);
    /// `None` unless `a_1 = 0`.
    pub fn normalized_index(&self) -> Option<u128> {
        if !self.is_normalized() {
            return None;
        }
        Some(
            self.a[1..]
                .iter()
                .fold(0u128, |acc, &x| acc * self.k as u128 + x as u128),
        )
    }

    /// Number of sequences with `a_1 = 0`, i.e. `k^(n/2 - 1)`.
    pub fn normalized_count(k: usize, n: usize) -> u128 {
        let len = (n / 2).saturating_sub(1) as u32;
        (k as u128).checked_pow(len).unwrap_or(u128::MAX)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `floor(n/2)`, the length of the sequence.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `a_i` for `1 <= i <= n/2`.
    pub fn get(&self, i: usize) -> Label {
        assert!(
            (1..=self.a.len()).contains(&i),
            "index {i} out of 1..={}",
            self.a.len()
        );
        self.a[i - 1]
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.a
    }

    pub fn is_normalized(&self) -> bool {
        self.a[0] == 0
    }

    /// Relabels vertices by `v -> v + c`: `a'_i = a_i - c (mod k)`.
    pub fn shift(&self, c: i64) -> DefiningSequence {
        let k = self.k as i64;
        let a = self
            .a
            .iter()
            .map(|&x| (x as i64 - c).rem_euclid(k) as Label)
            .collect();
        DefiningSequence {
            k: self.k,
            n: self.n,
            a,
        }
    }

    /// Shifts so that `a_1 = 0`; the applied shift is `a_1`.
    pub fn normalize(&self) -> DefiningSequence {
        self.shift(self.a[0] as i64)
    }

    /// `b_i = i - 1 - a_i (mod k)`. An involution.
    pub fn dual(&self) -> DefiningSequence {
        let k = self.k as i64;
        let a = self
            .a
            .iter()
            .enumerate()
            .map(|(j, &x)| (j as i64 - x as i64).rem_euclid(k) as Label)
            .collect();
        DefiningSequence {
            k: self.k,
            n: self.n,
            a,
        }
    }

    pub fn classify_steps(&self) -> StepClassification {
        let k = self.k;
        let tags = self
            .a
            .windows(2)
            .map(|w| {
                if w[1] == w[0] {
                    StepKind::Halt
                } else if w[1] == (w[0] + 1) % k {
                    StepKind::Step
                } else {
                    StepKind::Jump
                }
            })
            .collect();
        StepClassification { tags }
    }

    pub fn labeling(&self) -> PartitionLabeling {
        PartitionLabeling::new(self.clone())
    }

    /// Digits (or comma-separated labels when `k > 10`), e.g. `000121`.
    pub fn word(&self) -> String {
        if self.k <= 10 {
            self.a
                .iter()
                .map(|&x| char::from_digit(x as u32, 10).unwrap())
                .collect()
        } else {
            self.a
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

/// Canonical string form `k3n12:000121`.
impl fmt::Display for DefiningSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k{}n{}:{}", self.k, self.n, self.word())
    }
}

impl FromStr for DefiningSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |message: &str| Error::Parse {
            location: format!("{s:?}"),
            message: message.to_string(),
        };
        let rest = s
            .trim()
            .strip_prefix('k')
            .ok_or_else(|| parse_err("expected leading 'k'"))?;
        let (k, rest) = rest
            .split_once('n')
            .ok_or_else(|| parse_err("expected 'n' after k"))?;
        let (n, word) = rest
            .split_once(':')
            .ok_or_else(|| parse_err("expected ':' before the labels"))?;
        let k: usize = k.parse().map_err(|_| parse_err("bad k"))?;
        let n: usize = n.parse().map_err(|_| parse_err("bad n"))?;
        let a: Vec<Label> = if word.contains(',') {
            word.split(',')
                .map(|t| t.trim().parse().map_err(|_| parse_err("bad label")))
                .collect::<Result<_>>()?
        } else {
            word.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as Label)
                        .ok_or_else(|| parse_err("bad label digit"))
                })
                .collect::<Result<_>>()?
        };
        DefiningSequence::new(k, n, a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Halt,
    Step,
    Jump,
}

/// Tags for indices `1..n/2 - 1`; tag `i` compares `a_{i+1}` with `a_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepClassification {
    pub tags: Vec<StepKind>,
}

impl StepClassification {
    /// Tag at 1-based index `i`.
    pub fn at(&self, i: usize) -> StepKind {
        self.tags[i - 1]
    }

    pub fn jumps(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices_of(StepKind::Jump)
    }

    pub fn indices_of(&self, kind: StepKind) -> impl Iterator<Item = usize> + '_ {
        self.tags
            .iter()
            .enumerate()
            .filter(move |(_, &t)| t == kind)
            .map(|(i, _)| i + 1)
    }

    pub fn has_jump(&self) -> bool {
        self.tags.contains(&StepKind::Jump)
    }
}

/// Full label oracle for a cyclic partition.
///
/// `ext[d]` is the label of `{0, d}` for every distance `1 <= d < n`, so that
/// `label(u, v) = ext[(v - u) mod n] + u (mod k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionLabeling {
    seq: DefiningSequence,
    ext: Vec<Label>,
}

impl PartitionLabeling {
    pub fn new(seq: DefiningSequence) -> Self {
        let ext = extended_labels(&seq);
        let labeling = PartitionLabeling { seq, ext };
        labeling.assert_symmetric();
        labeling
    }

    fn assert_symmetric(&self) {
        let (n, k) = (self.n(), self.k());
        // label(u,v) = label(v,u) for all edges reduces to a condition per distance.
        for d in 1..n {
            assert_eq!(
                (self.ext[n - d] + d) % k,
                self.ext[d],
                "labels are not symmetric at distance {d} for {}",
                self.seq
            );
        }
    }

    pub fn sequence(&self) -> &DefiningSequence {
        &self.seq
    }

    pub fn n(&self) -> usize {
        self.seq.n
    }

    pub fn k(&self) -> usize {
        self.seq.k
    }

    /// Label of `{0, d}` for `1 <= d < n`.
    pub fn ext(&self, d: usize) -> Label {
        assert!((1..self.n()).contains(&d), "distance {d} out of range");
        self.ext[d]
    }

    pub fn edge_label(&self, u: Vertex, v: Vertex) -> Result<Label> {
        let n = self.n();
        if u % n == v % n {
            return Err(Error::SelfLoop { u, v, n });
        }
        Ok(self.label(u % n, v % n))
    }

    /// Unchecked variant of [`edge_label`](Self::edge_label) for reduced,
    /// distinct vertices.
    #[inline]
    pub fn label(&self, u: Vertex, v: Vertex) -> Label {
        let n = self.n();
        let d = (v + n - u) % n;
        (self.ext[d] + u) % self.k()
    }

    /// All edges `(u, v)` with `u < v` and the given label.
    pub fn part(&self, label: Label) -> Vec<(Vertex, Vertex)> {
        let n = self.n();
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.label(u, v) == label)
            .collect()
    }
}

/// `ext[d]` for `d` in `0..n` (`ext[0]` unused): `a_d` up to `n/2`, then
/// `a_{n-d} + d (mod k)`.
pub(crate) fn extended_labels(seq: &DefiningSequence) -> Vec<Label> {
    let (n, k, half) = (seq.n, seq.k, seq.a.len());
    (0..n)
        .map(|d| match d {
            0 => 0,
            d if d <= half => seq.a[d - 1],
            d => (seq.a[n - d - 1] + d) % k,
        })
        .collect()
}
