//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclorient::analysis::{
    check_dual_closure, conjecture_scan, necessary_jump, necessary_prefix, sweep, SweepOptions,
};
use cyclorient::blowup::{blow_up_sequence, detect_blow_up, lift_orientation};
use cyclorient::constructions::{
    hamiltonian_cycles, is_hamiltonian_cycle, is_hamiltonian_path, non_alternating_vertices,
    walecki_paths,
};
use cyclorient::orient::{
    accepts, is_bitonic, reversal_report, standard_condition, standard_orientation,
};
use cyclorient::solver::{oracle_solve, solve};
use cyclorient::{Budget, DefiningSequence, SolveStatus, VertexOrdering};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn seq(k: usize, n: usize, a: &[usize]) -> DefiningSequence {
    DefiningSequence::new(k, n, a.to_vec()).expect("valid sequence")
}

fn ord(tau: &[usize]) -> VertexOrdering {
    VertexOrdering::new(tau.to_vec()).expect("valid ordering")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn all_sequences(k: usize, n: usize) -> impl Iterator<Item = DefiningSequence> {
    let len = n / 2;
    let total = k.pow(len as u32);
    (0..total).map(move |mut x| {
        let mut a = vec![0; len];
        for slot in a.iter_mut().rev() {
            *slot = x % k;
            x /= k;
        }
        seq(k, n, &a)
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn serial() -> SweepOptions {
    SweepOptions {
        parallel: false,
        ..SweepOptions::default()
    }
}

fn k6_classification() -> Outcome {
    let start = Instant::now();
    let records = sweep(3, 6, &serial()).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(1))?;
    ensure(records.len() == 9, || format!("{} records", records.len()))?;
    let sat: Vec<String> = records
        .iter()
        .filter(|r| r.status == SolveStatus::Sat)
        .map(|r| r.sequence.word())
        .collect();
    ensure(sat == ["000", "001", "011", "012"], || {
        format!("sat set {sat:?}")
    })?;
    for r in records.iter().filter(|r| r.status == SolveStatus::Sat) {
        let w = r.witness.as_ref().ok_or("sat without witness")?;
        let b = is_bitonic(w).map_err(|e| e.to_string())?;
        ensure(b.bitonic, || format!("{} witness not bitonic", r.sequence))?;
    }
    Ok(format!("4/9 sat {sat:?}, all witnesses bitonic"))
}

fn k3_impossible() -> Outcome {
    let s = seq(3, 3, &[0]);
    let p = s.labeling();
    let perms = permutations(3);
    for tau in &perms {
        let r = reversal_report(&p, &ord(tau)).map_err(|e| e.to_string())?;
        ensure(!r.accepted(), || format!("{tau:?} accepted"))?;
    }
    let out = solve(&s, Budget::default());
    ensure(out.status == SolveStatus::Unsat, || {
        format!("solve {:?}", out.status)
    })?;
    Ok(format!("{} orderings rejected, solve unsat", perms.len()))
}

fn n12_known() -> Outcome {
    let start = Instant::now();
    let s = seq(3, 12, &[0, 0, 0, 1, 2, 1]);
    let known = ord(&[0, 6, 1, 7, 2, 8, 11, 5, 4, 10, 3, 9]);
    let r = reversal_report(&s.labeling(), &known).map_err(|e| e.to_string())?;
    ensure(r.accepted(), || {
        format!("rejected at {:?}", r.first_violation)
    })?;
    let std = standard_orientation(&s).map_err(|e| e.to_string())?;
    ensure(std.is_none(), || "standard orientation exists".into())?;
    let base = seq(3, 6, &[0, 0, 0]);
    let base_order = standard_orientation(&base)
        .map_err(|e| e.to_string())?
        .ok_or("base has no standard orientation")?;
    let lifted = lift_orientation(&base, &base_order, &s).map_err(|e| e.to_string())?;
    ensure(lifted == known, || {
        format!("lift gave {:?}", lifted.as_slice())
    })?;
    within(start, Duration::from_secs(1))?;
    Ok("accepted, no standard orientation, lift reproduces ordering".into())
}

fn n24_known() -> Outcome {
    let s = seq(3, 24, &[0, 0, 0, 1, 2, 0, 0, 0, 1, 1, 2, 1]);
    let o = ord(&[
        0, 1, 2, 23, 22, 21, 3, 9, 4, 10, 20, 5, 11, 8, 7, 19, 6, 18, 12, 13, 14, 17, 16, 15,
    ]);
    let r = reversal_report(&s.labeling(), &o).map_err(|e| e.to_string())?;
    ensure(r.accepted(), || {
        format!("rejected at {:?}", r.first_violation)
    })?;
    ensure(!standard_condition(&s), || {
        "standard condition holds".into()
    })?;
    let found = detect_blow_up(&s, Budget::default());
    ensure(found.is_empty(), || {
        format!("{} blow-up witnesses", found.len())
    })?;
    let start = Instant::now();
    let out = solve(&s, Budget::default());
    within(start, Duration::from_secs(60))?;
    ensure(out.status == SolveStatus::Sat, || {
        format!("solve {:?}", out.status)
    })?;
    Ok(format!(
        "accepted, not standard, not a blow-up, solved in {:?}",
        start.elapsed()
    ))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for n in [3, 6, 9] {
        for i in 0..DefiningSequence::normalized_count(3, n) {
            let s = DefiningSequence::normalized_from_index(3, n, i).map_err(|e| e.to_string())?;
            let fast = solve(&s, Budget::UNLIMITED);
            let slow = oracle_solve(&s).map_err(|e| e.to_string())?;
            ensure(fast.status == slow.status, || {
                format!("{s}: solver {:?}, oracle {:?}", fast.status, slow.status)
            })?;
            count += 1;
        }
    }
    within(start, Duration::from_secs(300))?;
    ensure(count == 37, || format!("{count} instances"))?;
    Ok(format!("{count} instances agree in {:?}", start.elapsed()))
}

fn check_standard(s: &DefiningSequence) -> Result<(), String> {
    let o = standard_orientation(s)
        .map_err(|e| format!("{s}: {e}"))?
        .ok_or_else(|| format!("{s}: no standard orientation"))?;
    ensure(accepts(&s.labeling(), &o), || format!("{s}: rejected"))?;
    let b = is_bitonic(&o).map_err(|e| e.to_string())?;
    ensure(b.bitonic, || format!("{s}: not bitonic"))?;
    let (lo, hi) = (b.local_min.unwrap(), b.local_max.unwrap());
    let n = s.n();
    ensure((hi + n - lo) % n == n / 2, || {
        format!("{s}: min {lo}, max {hi}")
    })
}

/// A random sequence without jumps: each label repeats or steps by one.
fn random_standard(rng: &mut ChaCha8Rng, k: usize, n: usize) -> DefiningSequence {
    let mut a = vec![rng.gen_range(0..k)];
    for _ in 1..n / 2 {
        let last = *a.last().unwrap();
        a.push(if rng.gen_bool(0.5) {
            last
        } else {
            (last + 1) % k
        });
    }
    seq(k, n, &a)
}

fn standard_soundness() -> Outcome {
    let mut exhaustive = 0;
    for k in [2, 3, 4] {
        for n in (2 * k..=12).step_by(2 * k) {
            for s in all_sequences(k, n).filter(standard_condition) {
                check_standard(&s)?;
                exhaustive += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let sizes: Vec<(usize, usize)> = [2usize, 3, 4]
        .iter()
        .flat_map(|&k| {
            (13..=24)
                .filter(move |n| n % (2 * k) == 0)
                .map(move |n| (k, n))
        })
        .collect();
    for _ in 0..1000 {
        let (k, n) = sizes[rng.gen_range(0..sizes.len())];
        let s = random_standard(&mut rng, k, n);
        ensure(standard_condition(&s), || {
            format!("{s}: sampler produced a jump")
        })?;
        check_standard(&s)?;
    }
    Ok(format!(
        "{exhaustive} exhaustive + 1000 sampled, zero failures"
    ))
}

fn self_complementary() -> Outcome {
    let mut count = 0;
    for n in [4, 8, 12] {
        for s in all_sequences(2, n) {
            ensure(standard_condition(&s), || format!("{s}: condition fails"))?;
            check_standard(&s)?;
            count += 1;
        }
    }
    Ok(format!("{count} sequences, all standard"))
}

fn blow_up_end_to_end() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for word in ["000", "001", "011", "012"] {
        let base: DefiningSequence = format!("k3n6:{word}").parse().map_err(|e| format!("{e}"))?;
        let base_order = standard_orientation(&base)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("{base}: no standard orientation"))?;
        for n in [12, 18] {
            for x in 0..3 {
                let free = BTreeMap::from([(6, x)]);
                let target = blow_up_sequence(&base, n, &free).map_err(|e| e.to_string())?;
                let lifted = lift_orientation(&base, &base_order, &target)
                    .map_err(|e| format!("{target}: {e}"))?;
                ensure(accepts(&target.labeling(), &lifted), || {
                    format!("{target}: rejected")
                })?;
                count += 1;
            }
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{count} lifts accepted"))
}

fn necessary_soundness() -> Outcome {
    let mut incomplete = Vec::new();
    let mut summary = Vec::new();
    for n in [6, 12] {
        let start = Instant::now();
        let records = sweep(3, n, &SweepOptions::default()).map_err(|e| e.to_string())?;
        if n == 12 {
            within(start, Duration::from_secs(600))?;
        }
        check_dual_closure(&records).map_err(|e| e.to_string())?;
        let index: BTreeMap<_, _> = records.iter().map(|r| (r.sequence.clone(), r)).collect();
        for r in &records {
            ensure(r.status != SolveStatus::BudgetExceeded, || {
                format!("{}: budget exceeded", r.sequence)
            })?;
            let fails =
                !necessary_prefix(&r.sequence).passed() || !necessary_jump(&r.sequence).passed();
            ensure(!fails || r.status == SolveStatus::Unsat, || {
                format!(
                    "{}: fails a necessary condition but is {:?}",
                    r.sequence, r.status
                )
            })?;
            let dual = index
                .get(&r.sequence.dual().normalize())
                .ok_or_else(|| format!("{}: dual missing", r.sequence))?;
            ensure(dual.status == r.status, || {
                format!("{}: dual status differs", r.sequence)
            })?;
            if n == 12 && r.necessary_pass() && r.status == SolveStatus::Unsat {
                incomplete.push(r.sequence.word());
            }
        }
        let sat = records
            .iter()
            .filter(|r| r.status == SolveStatus::Sat)
            .count();
        summary.push(format!("n={n}: {sat}/{} sat", records.len()));
    }
    Ok(format!(
        "{}; {} n=12 sequences pass every necessary test yet are unsat",
        summary.join(", "),
        incomplete.len()
    ))
}

struct Critical(String);

fn conjecture_evidence() -> Outcome {
    let report =
        conjecture_scan(3, &[9, 15], &SweepOptions::default()).map_err(|e| e.to_string())?;
    if let Some((s, o)) = report.counterexamples().next() {
        panic::panic_any(Critical(format!("{s} accepts {:?}", o.as_slice())));
    }
    let counts: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("n={}: {} unsat / {}", r.n, r.unsat, r.instances))
        .collect();
    for r in &report.rows {
        ensure(
            r.sat == 0 && r.budget_exceeded == 0 && r.unsat == r.instances,
            || format!("n={}: {:?}", r.n, r),
        )?;
    }
    let total: u128 = report.rows.iter().map(|r| r.instances).sum();
    ensure(total == 27 + 729, || format!("{total} instances"))?;
    Ok(counts.join(", "))
}

fn hamiltonian() -> Outcome {
    for n in (4..=12).step_by(2) {
        let (_, dec) = walecki_paths(n).map_err(|e| e.to_string())?;
        dec.verify().map_err(|e| format!("paths n={n}: {e}"))?;
        for (d, part) in dec.parts.iter().enumerate() {
            ensure(is_hamiltonian_path(part, n), || {
                format!("n={n} part {d} not a path")
            })?;
            let bad = non_alternating_vertices(part, n);
            ensure(bad.is_empty(), || {
                format!("n={n} part {d} not alternating at {bad:?}")
            })?;
        }
    }
    for n in (3..=13).step_by(2) {
        let dec = hamiltonian_cycles(n).map_err(|e| e.to_string())?;
        dec.verify().map_err(|e| format!("cycles n={n}: {e}"))?;
        let apex = n - 1;
        ensure(dec.global_order.as_slice()[0] == apex, || {
            format!("n={n}: apex not first")
        })?;
        for (d, part) in dec.parts.iter().enumerate() {
            ensure(is_hamiltonian_cycle(part, n), || {
                format!("n={n} part {d} not a cycle")
            })?;
            let out = part.iter().filter(|e| e.0 == apex).count();
            ensure(out == 2, || {
                format!("n={n} part {d}: apex out-degree {out}")
            })?;
            let bad = non_alternating_vertices(part, n);
            ensure(bad.len() == 1, || {
                format!("n={n} part {d}: defects {bad:?}")
            })?;
            if d + 1 < dec.parts.len() {
                let mut image: Vec<_> = part
                    .iter()
                    .map(|&(u, v)| (dec.sigma[u], dec.sigma[v]))
                    .collect();
                image.sort_unstable();
                ensure(image == dec.parts[d + 1], || {
                    format!("n={n}: part {d} not isomorphic")
                })?;
            }
        }
    }
    Ok("paths n=4..12 and cycles n=3..13 verified".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("k6 classification", k6_classification),
        ("k3 impossibility", k3_impossible),
        ("n=12 reference example", n12_known),
        ("n=24 reference example", n24_known),
        ("oracle equivalence", oracle_equivalence),
        ("standard orientation soundness", standard_soundness),
        ("k=2 sequences all standard", self_complementary),
        ("blow-up lift end to end", blow_up_end_to_end),
        ("necessary-condition soundness", necessary_soundness),
        ("odd-order conjecture evidence", conjecture_evidence),
        ("hamiltonian decompositions", hamiltonian),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check));
        let took = start.elapsed();
        match result {
            Ok(Ok(detail)) => println!("PASS {:>2} {name} ({took:.2?}): {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({took:.2?}): {why}", i + 1);
            }
            Err(payload) => {
                if let Some(Critical(msg)) = payload.downcast_ref::<Critical>() {
                    println!("FAIL {:>2} {name}: CRITICAL counterexample {msg}", i + 1);
                    println!("aborting");
                    return ExitCode::FAILURE;
                }
                failed += 1;
                let msg = payload
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL {:>2} {name} ({took:.2?}): panicked {msg}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
