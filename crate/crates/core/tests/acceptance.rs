//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Every comparison is exact; the only tolerances are wall-clock
//! limits, pinned below.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use oriented_core::counting::{
    count_idem_op_rank, count_idem_pop_rank, theorem_total, total_idempotents_op, total_idempotents_pop,
};
use oriented_core::endo::{EndoContext, Endomorphism};
use oriented_core::groups::{
    named_families, cyclic_elements, dihedral_elements, dihedral_words, group_endomorphisms, normalizer_in_sn,
    sigma_family, totient, GroupTag, Permutation,
};
use oriented_core::semigroup::{idempotent_counts_by_rank, idempotents_by_predicate};
use oriented_core::verify::{self, Suite, VerifyRequest};
use oriented_core::{FiniteSemigroup, SemigroupKind};
use SemigroupKind::*;

const LIMIT_MAIN_THEOREM: Duration = Duration::from_secs(600);
const LIMIT_IDEMPOTENTS: Duration = Duration::from_secs(60);
const LIMIT_NORMALIZER: Duration = Duration::from_secs(60);
const LIMIT_GROUPS: Duration = Duration::from_secs(30);

/// Endomorphism totals found by the search before the formulas were
/// evaluated; the formulas must reproduce them.
const GOLDEN_TOTALS: [(SemigroupKind, usize, u64); 12] = [
    (OP, 3, 37),
    (POPI, 3, 41),
    (POP, 3, 116),
    (OR, 3, 40),
    (PORI, 3, 54),
    (POR, 3, 138),
    (OP, 4, 185),
    (POPI, 4, 106),
    (POP, 4, 806),
    (OR, 4, 281),
    (PORI, 4, 240),
    (POR, 4, 1328),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn enumerate(kind: SemigroupKind, n: usize) -> (FiniteSemigroup, Vec<Endomorphism>) {
    let s = FiniteSemigroup::build(kind, n).expect("build");
    let found = EndoContext::new(&s).expect("context").enumerate(None).expect("search");
    (s, found)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut sizes = Vec::new();
    for n in [3, 4] {
        for kind in SemigroupKind::TARGETS {
            let (s, found) = enumerate(kind, n);
            let ctx = EndoContext::new(&s).unwrap();
            let built: BTreeSet<Endomorphism> = ctx.all_constructed().into_iter().collect();
            let found: BTreeSet<Endomorphism> = found.into_iter().collect();
            if built != found {
                bad.push(format!("{kind}{n}"));
            }
            sizes.push(format!("{kind}{n}={}", found.len()));
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && t < LIMIT_MAIN_THEOREM,
        format!("search = union of T1..T7 as sets, {}; mismatches {bad:?}; {:.1?}", sizes.join(" "), t),
    )
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    for (kind, n, golden) in GOLDEN_TOTALS {
        let (_, found) = enumerate(kind, n);
        let formula = theorem_total(kind, n as u64).unwrap();
        if found.len() as u64 != golden || formula != BigInt::from(golden) {
            bad.push(format!("{kind}{n}: enumerated {}, formula {formula}, golden {golden}", found.len()));
        }
    }
    outcome(bad.is_empty(), format!("12 (kind, n) totals at n = 3, 4; mismatches {bad:?}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 1..=8usize {
        let op = idempotent_counts_by_rank(OP, n).unwrap();
        let pop = idempotent_counts_by_rank(POP, n).unwrap();
        for k in 1..=n {
            if BigInt::from(op[k]) != count_idem_op_rank(n as u64, k as u64).unwrap() {
                bad.push(format!("OP n={n} k={k}"));
            }
            if BigInt::from(pop[k]) != count_idem_pop_rank(n as u64, k as u64).unwrap() {
                bad.push(format!("POP n={n} k={k}"));
            }
        }
        let op_total = idempotents_by_predicate(OP, n).unwrap().len();
        let pop_total = idempotents_by_predicate(POP, n).unwrap().len();
        if BigInt::from(op_total) != total_idempotents_op(n as u64) {
            bad.push(format!("|E(OP_{n})|"));
        }
        if BigInt::from(pop_total) != total_idempotents_pop(n as u64) {
            bad.push(format!("|E(POP_{n})|"));
        }
    }
    let e_op3 = idempotents_by_predicate(OP, 3).unwrap().len();
    if e_op3 != 10 {
        bad.push(format!("|E(OP_3)| = {e_op3}"));
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && t < LIMIT_IDEMPOTENTS,
        format!("rank counts for 1 <= k <= n <= 8 and closed-form totals; |E(OP_3)| = {e_op3}; mismatches {bad:?}; {t:.1?}"),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 3..=7 {
        let family: BTreeSet<Permutation> = sigma_family(n).into_iter().map(|s| s.to_permutation()).collect();
        let nc = normalizer_in_sn(n, &cyclic_elements(n)).unwrap();
        let nd = normalizer_in_sn(n, &dihedral_elements(n).unwrap()).unwrap();
        if nc != family || nd != family || family.len() != n * totient(n) {
            bad.push(n);
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && t < LIMIT_NORMALIZER,
        format!("N(C_n) = N(D_2n) = sigma family of size nφ(n) for n = 3..7; failing n {bad:?}; {t:.1?}"),
    )
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    for n in [3, 4] {
        for kind in SemigroupKind::TARGETS {
            let (s, found) = enumerate(kind, n);
            let ctx = EndoContext::new(&s).unwrap();
            let bij: BTreeSet<Endomorphism> = found.into_iter().filter(|m| m.is_bijective()).collect();
            let inner: BTreeSet<Endomorphism> = dihedral_words(n).into_iter().map(|w| ctx.inner_auto(w).unwrap()).collect();
            if bij.len() != 2 * n || bij != inner {
                bad.push(format!("{kind}{n}: {} bijections", bij.len()));
            }
        }
    }
    outcome(bad.is_empty(), format!("bijective endomorphisms = 2n conjugations by D_2n, n = 3, 4; failures {bad:?}"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 3..=12 {
        let r = group_endomorphisms(GroupTag::C, n).unwrap();
        if r.total_endomorphisms != n || r.total_automorphisms != totient(n) {
            bad.push(format!("C_{n}"));
        }
    }
    for n in 3..=10 {
        let r = group_endomorphisms(GroupTag::D2, n).unwrap();
        let want = if n % 2 == 1 { n * n + 1 } else { n * n + 4 * n + 4 };
        let got: BTreeSet<_> = r.endomorphisms.iter().map(|e| (e.g, e.h)).collect();
        let named: BTreeSet<_> = named_families(GroupTag::D2, n).into_keys().collect();
        if r.total_endomorphisms != want || r.total_automorphisms != n * totient(n) || got != named {
            bad.push(format!("D_{}", 2 * n));
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && t < LIMIT_GROUPS,
        format!("End/Aut of C_n (n <= 12) and D_2n (n <= 10), named families equal; failures {bad:?}; {t:.1?}"),
    )
}

fn criterion_7() -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in [3, 4] {
        for kind in SemigroupKind::TARGETS {
            let (s, found) = enumerate(kind, n);
            let ctx = EndoContext::new(&s).unwrap();
            for m in &found {
                checked += 1;
                if ctx.kernel_shape(m).is_err() {
                    bad.push(format!("{kind}{n}"));
                    break;
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} kernels universal or ρ^J_π at n = 3, 4; violations in {bad:?}"))
}

fn criterion_8() -> Outcome {
    let wanted = [
        "lr-reflection",
        "idempotent-families",
        "intermediate-kernels",
        "unit-kernel-cases",
        "product-orientation",
    ];
    let records = verify::run(&VerifyRequest {
        suites: vec![Suite::Orientation, Suite::Green, Suite::EndoCompleteness],
        kinds: SemigroupKind::TARGETS.to_vec(),
        ns: vec![3, 4],
        budget: None,
    });
    let relevant: Vec<_> = records.iter().filter(|r| wanted.contains(&r.check.as_str())).collect();
    let failed: Vec<String> = relevant
        .iter()
        .filter(|r| r.outcome != verify::Outcome::Pass)
        .map(|r| format!("{}{} {}", r.kind, r.n, r.check))
        .collect();
    outcome(
        failed.is_empty() && relevant.len() == wanted.len() * 12,
        format!("{} lemma checks over six kinds at n = 3, 4; not passing {failed:?}", relevant.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("main theorem set equality", criterion_1),
        ("endomorphism totals", criterion_2),
        ("idempotent lemmas", criterion_3),
        ("normalizer", criterion_4),
        ("automorphisms", criterion_5),
        ("group endomorphisms", criterion_6),
        ("kernel shapes", criterion_7),
        ("structural lemmas", criterion_8),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        all &= o.pass;
        println!("criterion {} ({name}): {}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
