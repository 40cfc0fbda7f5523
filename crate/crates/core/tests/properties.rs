use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use oriented_core::chain::{is_anticyclic, is_cyclic};
use oriented_core::counting::{delta, eps, fib, lucas_even, theorem_total, type_counts};
use oriented_core::groups::{make_g, make_h, reduce, totient, SigmaXK};
use oriented_core::{FiniteSemigroup, PartialTransformation, SemigroupKind};
use proptest::prelude::*;

fn transformation(max_n: usize) -> impl Strategy<Value = PartialTransformation> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop::option::weighted(0.8, 1..=n), n)
            .prop_map(move |map| PartialTransformation::new(n, &map).unwrap())
    })
}

fn same_n_triple(max_n: usize) -> impl Strategy<Value = [PartialTransformation; 3]> {
    (1..=max_n).prop_flat_map(|n| {
        let one = prop::collection::vec(prop::option::weighted(0.8, 1..=n), n)
            .prop_map(move |map| PartialTransformation::new(n, &map).unwrap());
        [one.clone(), one.clone(), one]
    })
}

fn por4() -> &'static FiniteSemigroup {
    static S: OnceLock<FiniteSemigroup> = OnceLock::new();
    S.get_or_init(|| FiniteSemigroup::build(SemigroupKind::POR, 4).unwrap())
}

/// Some rotation of `seq` is monotone.
fn rotation_sorted(seq: &[usize], descending: bool) -> bool {
    let t = seq.len();
    if t == 0 {
        return true;
    }
    (0..t).any(|r| {
        let rot: Vec<usize> = (0..t).map(|i| seq[(r + i) % t]).collect();
        rot.windows(2).all(|w| if descending { w[0] >= w[1] } else { w[0] <= w[1] })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn composition_is_associative([a, b, c] in same_n_triple(7)) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn right_action(a in transformation(6), x in 1usize..=6) {
        prop_assume!(x <= a.n());
        let b = a.clone();
        let ab = a.compose(&b).unwrap();
        prop_assert_eq!(ab.apply(x), a.apply(x).and_then(|y| b.apply(y)));
    }

    #[test]
    fn idempotent_iff_identity_on_image(a in transformation(7)) {
        let image = a.image();
        let fixes_image = image.iter().all(|&v| a.apply(v) == Some(v));
        prop_assert_eq!(a.is_idempotent(), fixes_image);
    }

    #[test]
    fn cyclic_matches_rotation_oracle(seq in prop::collection::vec(1usize..=6, 0..9)) {
        prop_assert_eq!(is_cyclic(&seq, 6).unwrap(), rotation_sorted(&seq, false));
        prop_assert_eq!(is_anticyclic(&seq, 6).unwrap(), rotation_sorted(&seq, true));
    }

    #[test]
    fn json_round_trip(a in transformation(8)) {
        let text = serde_json::to_string(&a).unwrap();
        let back: PartialTransformation = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn orientation_product_rule(i in 0u32..549, j in 0u32..549) {
        let s = por4();
        let (a, b) = (s.element(i), s.element(j));
        let p = a.compose(b).unwrap();
        prop_assert_eq!(s.index_of(&p), Some(s.mul(i, j)));
        let (ca, cb, cp) = (a.classify_orientation(), b.classify_orientation(), p.classify_orientation());
        if ca.orientation_preserving && cb.orientation_preserving {
            prop_assert!(cp.orientation_preserving);
        }
        if ca.orientation_reversing && cb.orientation_reversing {
            prop_assert!(cp.orientation_preserving);
        }
        if (ca.orientation_preserving && cb.orientation_reversing) || (ca.orientation_reversing && cb.orientation_preserving) {
            prop_assert!(cp.orientation_reversing);
        }
    }

    #[test]
    fn table_is_associative(i in 0u32..549, j in 0u32..549, k in 0u32..549) {
        let s = por4();
        prop_assert_eq!(s.mul(s.mul(i, j), k), s.mul(i, s.mul(j, k)));
    }

    #[test]
    fn sigma_conjugation((n, x, k) in (3usize..12).prop_flat_map(|n| (Just(n), 1..=n, 1..=n))) {
        prop_assume!(num_integer::gcd(k, n) == 1);
        let sg = SigmaXK::new(n, x, k).unwrap();
        let p = sg.to_permutation();
        let (g, h) = (make_g(n), make_h(n));
        prop_assert_eq!(g.conjugate_by(&p), g.pow(k));
        let twist = reduce(2 * x as i64 - k as i64 - 1, n);
        prop_assert_eq!(h.conjugate_by(&p), h.then(&g.pow(twist)));
    }

    #[test]
    fn subtotals_sum_to_theorem(n in 3u64..48, which in 0usize..6) {
        let kind = SemigroupKind::TARGETS[which];
        prop_assert_eq!(type_counts(kind, n).unwrap().sum(), theorem_total(kind, n).unwrap());
    }

    #[test]
    fn delta_is_parity_indicator(n in 1u64..200, k in 1u64..200) {
        prop_assert_eq!(delta(n, k) == 1, n % 2 == 0 && k % 2 == 0);
    }

    #[test]
    fn eps_counts_elements_of_admissible_order(n in 1u64..60, k in 1u64..30) {
        // by order d | gcd(n, k): φ(d) elements each, minus the identity
        let want: u64 = (2..=k).filter(|d| k % d == 0 && n % d == 0).map(|d| totient(d as usize) as u64).sum();
        prop_assert_eq!(eps(n, k), want);
    }

    #[test]
    fn lucas_from_fibonacci(k in 1u64..150) {
        prop_assert_eq!(lucas_even(k), fib(2 * k - 1) + fib(2 * k + 1));
        prop_assert_eq!(lucas_even(k), fib(2 * k) + BigInt::from(2) * fib(2 * k - 1));
    }

    #[test]
    fn domain_and_image_sizes(a in transformation(7)) {
        let dom: BTreeSet<usize> = a.domain();
        prop_assert!(a.rank() <= dom.len());
        prop_assert_eq!(a.rank(), a.image().len());
        prop_assert_eq!(a.is_injective(), a.rank() == dom.len());
    }
}
