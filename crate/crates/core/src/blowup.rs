//! Blow-ups of cyclic partitions and the lifting of their orientations.
//!
//! A partition of `K_n` is a blow-up of a partition of `K_m` (`m | n`) when
//! its label at every index `i` not divisible by `m` equals the base label of
//! `{0, i mod m}`; indices divisible by `m` are free. A transitive
//! orientation of the base lifts to one of the blow-up: the vertex classes
//! `H_i = {i, m+i, 2m+i, ...}` follow the base order, and the order inside
//! each class is scheduled so that the rotation only reverses inner edges of
//! label `k - 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orient::{accepts, standard_condition, VertexOrdering};
use crate::sequence::{extended_labels, partition_exists, DefiningSequence, Label};
use crate::solver::{solve, Budget, SolveStatus};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowUpWitness {
    pub m: usize,
    pub base: DefiningSequence,
    /// Labels at the indices divisible by `m`.
    pub free: BTreeMap<usize, Label>,
    pub base_standard: bool,
    pub base_solvable: SolveStatus,
}

/// Builds the blow-up of `base` on `n` vertices with the given free labels.
pub fn blow_up_sequence(
    base: &DefiningSequence,
    n: usize,
    free: &BTreeMap<usize, Label>,
) -> Result<DefiningSequence> {
    let (m, k) = (base.n(), base.k());
    if !n.is_multiple_of(m) || partition_exists(k, n).is_err() {
        return Err(Error::BadMultiple { m, n, k });
    }
    let half = n / 2;
    if let Some(&index) = free.keys().find(|&&i| i == 0 || i > half || i % m != 0) {
        return Err(Error::SpuriousFreeValue { index, m, half });
    }
    let ext = extended_labels(base);
    let mut a = Vec::with_capacity(half);
    for i in 1..=half {
        if i % m == 0 {
            a.push(*free.get(&i).ok_or(Error::MissingFreeValue { index: i })?);
        } else {
            a.push(ext[i % m]);
        }
    }
    DefiningSequence::new(k, n, a)
}

/// First index where `target` departs from a blow-up of `base`, if any.
fn blow_up_mismatch(base: &DefiningSequence, target: &DefiningSequence) -> Option<usize> {
    let m = base.n();
    let ext = extended_labels(base);
    (1..=target.len()).find(|&i| i % m != 0 && target.get(i) != ext[i % m])
}

/// Orders `0..d` as `0, 1, d-1, 2, d-2, ...`, ending at `ceil(d/2)`.
fn zigzag(d: usize) -> Vec<usize> {
    let mut order = vec![0];
    let (mut lo, mut hi) = (1, d.saturating_sub(1));
    while lo < hi {
        order.push(lo);
        order.push(hi);
        lo += 1;
        hi -= 1;
    }
    if lo == hi {
        order.push(lo);
    }
    order
}

/// Swaps the entries `x` and `y`, which must be adjacent in `order`.
fn swap_adjacent(order: &mut [usize], x: usize, y: usize) -> Result<()> {
    let px = order.iter().position(|&v| v == x).unwrap();
    let py = order.iter().position(|&v| v == y).unwrap();
    if px.abs_diff(py) != 1 {
        return Err(Error::InternalContradiction(format!(
            "pair ({x},{y}) is not adjacent in the inner order {order:?}"
        )));
    }
    order.swap(px, py);
    Ok(())
}

/// Inner orders `tau_0, ..., tau_{2k}` of `0..d` for the classes `H_i`.
///
/// Phase one (`0 <= i < k`) swaps each pair `(j, d-j)` once, at the step where
/// the edge `{jm+i, (d-j)m+i}` has label `k-1`; phase two (`k <= i < 2k`) does
/// the same for the pairs `(j, d-j-1)`.
fn inner_schedule(target: &DefiningSequence, m: usize) -> Result<Vec<Vec<usize>>> {
    let (n, k) = (target.n(), target.k());
    let d = n / m;
    let p = target.labeling();
    let mut orders = vec![zigzag(d)];

    let phase = |orders: &mut Vec<Vec<usize>>,
                 steps: std::ops::Range<usize>,
                 pairs: Vec<(usize, usize)>|
     -> Result<()> {
        let mut swaps = vec![0usize; pairs.len()];
        for i in steps {
            let mut next = orders.last().unwrap().clone();
            for (slot, &(x, y)) in pairs.iter().enumerate() {
                if p.label(x * m + i, y * m + i) == k - 1 {
                    swap_adjacent(&mut next, x, y)?;
                    swaps[slot] += 1;
                }
            }
            orders.push(next);
        }
        if let Some(slot) = swaps.iter().position(|&c| c != 1) {
            return Err(Error::InternalContradiction(format!(
                "pair {:?} swapped {} times in one phase",
                pairs[slot], swaps[slot]
            )));
        }
        Ok(())
    };

    let first: Vec<_> = (1..d).filter(|&j| 2 * j < d).map(|j| (j, d - j)).collect();
    phase(&mut orders, 0..k, first)?;
    let second: Vec<_> = (0..d)
        .filter(|&j| j + 1 < d - j)
        .map(|j| (j, d - j - 1))
        .collect();
    phase(&mut orders, k..2 * k, second)?;
    Ok(orders)
}

/// Lifts an accepted ordering of `base` to an accepted ordering of `target`.
pub fn lift_orientation(
    base: &DefiningSequence,
    base_order: &VertexOrdering,
    target: &DefiningSequence,
) -> Result<VertexOrdering> {
    let (m, n, k) = (base.n(), target.n(), base.k());
    if target.k() != k || n % m != 0 {
        return Err(Error::BadMultiple { m, n, k });
    }
    if let Some(index) = blow_up_mismatch(base, target) {
        return Err(Error::NotABlowUp { index });
    }
    if base_order.n() != m || !accepts(&base.labeling(), base_order) {
        return Err(Error::BaseOrderRejected);
    }
    let d = n / m;
    let schedule = inner_schedule(target, m)?;
    check_inner_conditions(target, m, &schedule)?;

    let tau: Vec<usize> = base_order
        .as_slice()
        .iter()
        .flat_map(|&i| schedule[i.min(2 * k)].iter().map(move |&j| j * m + i))
        .collect();
    debug_assert_eq!(tau.len(), d * m);
    let lifted =
        VertexOrdering::new(tau).map_err(|e| Error::InternalContradiction(e.to_string()))?;
    if !accepts(&target.labeling(), &lifted) {
        return Err(Error::InternalContradiction(format!(
            "lifted ordering rejected for {target}"
        )));
    }
    Ok(lifted)
}

/// Checks directly that the inner orders only disagree on label `k-1` edges:
/// between consecutive classes, and across the wrap from `H_{m-1}` to `H_0`.
fn check_inner_conditions(
    target: &DefiningSequence,
    m: usize,
    schedule: &[Vec<usize>],
) -> Result<()> {
    let (n, k) = (target.n(), target.k());
    let inner = |i: usize| &schedule[i.min(2 * k)];
    let d = n / m;
    let p = target.labeling();
    let rank = |order: &[usize]| {
        let mut r = vec![0; d];
        for (pos, &v) in order.iter().enumerate() {
            r[v] = pos;
        }
        r
    };
    for i in 0..m {
        let here = rank(inner(i));
        let (there, wrap) = if i + 1 < m {
            (rank(inner(i + 1)), 0)
        } else {
            (rank(inner(0)), 1)
        };
        for a in 0..d {
            for b in 0..d {
                if a == b || here[a] > here[b] {
                    continue;
                }
                let (a2, b2) = ((a + wrap) % d, (b + wrap) % d);
                if there[a2] > there[b2] && p.label(a * m + i, b * m + i) != k - 1 {
                    return Err(Error::InternalContradiction(format!(
                        "inner edge {{{},{}}} reversed with label {}",
                        a * m + i,
                        b * m + i,
                        p.label(a * m + i, b * m + i)
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Every proper divisor `m` of `n` for which `s` is a blow-up of a partition
/// of `K_m`, smallest `m` first. Nested blow-ups are reported level by level.
pub fn detect_blow_up(s: &DefiningSequence, budget: Budget) -> Vec<BlowUpWitness> {
    let (n, k) = (s.n(), s.k());
    let mut found = Vec::new();
    for m in (k..n).filter(|&m| n % m == 0 && partition_exists(k, m).is_ok()) {
        let base_labels = s.as_slice()[..m / 2].to_vec();
        let base = DefiningSequence::new(k, m, base_labels).expect("prefix is a valid base");
        if blow_up_mismatch(&base, s).is_some() {
            continue;
        }
        let free = (1..=s.len())
            .filter(|i| i % m == 0)
            .map(|i| (i, s.get(i)))
            .collect();
        found.push(BlowUpWitness {
            m,
            base_standard: standard_condition(&base),
            base_solvable: solve(&base, budget).status,
            base,
            free,
        });
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orient::standard_orientation;

    fn seq(s: &str) -> DefiningSequence {
        s.parse().unwrap()
    }

    fn free(pairs: &[(usize, Label)]) -> BTreeMap<usize, Label> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn zigzag_boundaries() {
        assert_eq!(zigzag(1), vec![0]);
        assert_eq!(zigzag(2), vec![0, 1]);
        assert_eq!(zigzag(3), vec![0, 1, 2]);
        assert_eq!(zigzag(4), vec![0, 1, 3, 2]);
        assert_eq!(zigzag(5), vec![0, 1, 4, 2, 3]);
    }

    #[test]
    fn make_blow_ups() {
        let base = seq("k3n6:000");
        assert_eq!(
            blow_up_sequence(&base, 12, &free(&[(6, 1)])).unwrap(),
            seq("k3n12:000121")
        );
        assert_eq!(
            blow_up_sequence(&base, 12, &free(&[(6, 0)])).unwrap(),
            seq("k3n12:000120")
        );
        assert_eq!(blow_up_sequence(&base, 6, &free(&[])).unwrap(), base);
    }

    #[test]
    fn make_errors() {
        let base = seq("k3n6:000");
        assert!(matches!(
            blow_up_sequence(&base, 9, &free(&[])),
            Err(Error::BadMultiple { .. })
        ));
        assert!(matches!(
            blow_up_sequence(&base, 12, &free(&[])),
            Err(Error::MissingFreeValue { index: 6 })
        ));
        assert!(matches!(
            blow_up_sequence(&base, 12, &free(&[(6, 0), (3, 1)])),
            Err(Error::SpuriousFreeValue { index: 3, .. })
        ));
        assert!(matches!(
            blow_up_sequence(&base, 12, &free(&[(6, 3)])),
            Err(Error::Alphabet { index: 6, .. })
        ));
    }

    #[test]
    fn lift_reproduces_known_order() {
        let base = seq("k3n6:000");
        let order = VertexOrdering::new(vec![0, 1, 2, 5, 4, 3]).unwrap();
        let lifted = lift_orientation(&base, &order, &seq("k3n12:000121")).unwrap();
        assert_eq!(lifted.as_slice(), &[0, 6, 1, 7, 2, 8, 11, 5, 4, 10, 3, 9]);
    }

    #[test]
    fn lift_trivial_and_errors() {
        let base = seq("k3n6:000");
        let order = VertexOrdering::new(vec![0, 1, 2, 5, 4, 3]).unwrap();
        assert_eq!(lift_orientation(&base, &order, &base).unwrap(), order);
        assert!(matches!(
            lift_orientation(&base, &order, &seq("k3n12:010121")),
            Err(Error::NotABlowUp { index: 2 })
        ));
        let bad = VertexOrdering::new(vec![0, 1, 2, 3, 4, 5]).unwrap();
        assert!(matches!(
            lift_orientation(&base, &bad, &seq("k3n12:000121")),
            Err(Error::BaseOrderRejected)
        ));
    }

    #[test]
    fn lift_n18_all_free_values() {
        let base = seq("k3n6:000");
        let order = standard_orientation(&base).unwrap().unwrap();
        // 6 is the only multiple of 6 in 1..=9
        assert!(matches!(
            blow_up_sequence(&base, 18, &free(&[(6, 0), (9, 0)])),
            Err(Error::SpuriousFreeValue { index: 9, .. })
        ));
        for x in 0..3 {
            let target = blow_up_sequence(&base, 18, &free(&[(6, x)])).unwrap();
            let lifted = lift_orientation(&base, &order, &target).unwrap();
            assert!(accepts(&target.labeling(), &lifted), "{target}");
        }
    }

    #[test]
    fn lift_odd_and_larger_factors() {
        // d = 3 (odd), d = 4, d = 5, with m = 2k and m > 2k bases
        for (base, n) in [
            ("k3n6:011", 18),
            ("k3n6:012", 24),
            ("k3n6:001", 30),
            ("k3n12:000112", 36),
            ("k2n4:01", 12),
            ("k2n8:0110", 24),
        ] {
            let base = seq(base);
            let order = standard_orientation(&base).unwrap().unwrap();
            let m = base.n();
            let frees = (1..=n / 2)
                .filter(|i| i % m == 0)
                .map(|i| (i, (i / m) % base.k()));
            let target = blow_up_sequence(&base, n, &frees.collect()).unwrap();
            let lifted = lift_orientation(&base, &order, &target).unwrap();
            assert!(accepts(&target.labeling(), &lifted), "{target}");
        }
    }

    #[test]
    fn detection() {
        let w = detect_blow_up(&seq("k3n12:000121"), Budget::default());
        assert_eq!(w.len(), 1);
        assert_eq!((w[0].m, &w[0].base), (6, &seq("k3n6:000")));
        assert_eq!(w[0].free, free(&[(6, 1)]));
        assert!(w[0].base_standard);
        assert_eq!(w[0].base_solvable, SolveStatus::Sat);

        assert!(detect_blow_up(&seq("k3n24:000120001121"), Budget::default()).is_empty());

        let w = detect_blow_up(&seq("k3n12:000120"), Budget::default());
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].free, free(&[(6, 0)]));
    }

    #[test]
    fn nested_blow_ups_reported_per_level() {
        // k3n6:000 blown up to 12 with a_6 = 0, then to 24
        let twelve = seq("k3n12:000120");
        let frees = free(&[(12, 2)]);
        let s = blow_up_sequence(&twelve, 24, &frees).unwrap();
        let ms: Vec<usize> = detect_blow_up(&s, Budget::default())
            .iter()
            .map(|w| w.m)
            .collect();
        assert_eq!(ms, vec![6, 12]);
    }
}
