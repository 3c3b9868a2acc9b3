use std::collections::{BTreeMap, BTreeSet};

use permgen::{
    alphabet_of, distinct_permutations, filter, generate, parse, render, ConstraintKind,
    ConstraintSet, PermittedMatrix, PositionConstraint, Symbol,
};
use proptest::prelude::*;

/// Strings over a small alphabet so that repeats are common.
fn input_string(max_len: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!['a', 'b', 'c', 'd']), 0..=max_len)
        .prop_map(|v| v.into_iter().collect())
}

/// Constraints for a string of length `len`, occasionally naming symbols
/// outside the string and occasionally conflicting.
fn constraint_set(len: usize) -> impl Strategy<Value = ConstraintSet> {
    let clause = (
        1..=len.max(1),
        any::<bool>(),
        prop::collection::btree_set(prop::sample::select(vec!['a', 'b', 'c', 'd', 'z']), 1..=3),
    );
    let max_clauses = if len == 0 { 0 } else { len + 1 };
    prop::collection::vec(clause, 0..=max_clauses).prop_map(move |clauses| {
        let constraints = clauses
            .into_iter()
            .map(|(pos, allowed, syms)| {
                let kind = if allowed {
                    ConstraintKind::Allowed
                } else {
                    ConstraintKind::Forbidden
                };
                PositionConstraint::new(pos, kind, syms).unwrap()
            })
            .collect();
        ConstraintSet::from_constraints(len, constraints)
    })
}

fn instance(max_len: usize) -> impl Strategy<Value = (String, ConstraintSet)> {
    input_string(max_len).prop_flat_map(|s| {
        let len = s.chars().count();
        (Just(s), constraint_set(len))
    })
}

/// Drops clauses until no position carries both kinds.
fn without_conflicts(cs: &ConstraintSet) -> ConstraintSet {
    let mut kinds: BTreeMap<usize, ConstraintKind> = BTreeMap::new();
    let kept = cs
        .constraints()
        .iter()
        .filter(|c| *kinds.entry(c.position()).or_insert(c.kind()) == c.kind())
        .cloned()
        .collect();
    ConstraintSet::from_constraints(cs.len(), kept)
}

fn symbol_counts(s: &str) -> BTreeMap<char, usize> {
    let mut m = BTreeMap::new();
    for c in s.chars() {
        *m.entry(c).or_insert(0) += 1;
    }
    m
}

/// Counts the search-tree nodes by brute force: every sequence over the
/// alphabet that fits in the multiset of `s` and is permitted positionwise is
/// one node. Returns `(nodes, dead_ends)`.
fn brute_force_nodes(s: &str, pm: &PermittedMatrix) -> (u64, u64) {
    let n = s.chars().count();
    let alphabet: Vec<char> = alphabet_of(s).iter().map(Symbol::as_char).collect();
    let counts = symbol_counts(s);
    let fits = |seq: &[char]| {
        let used = symbol_counts(&seq.iter().collect::<String>());
        used.iter()
            .all(|(c, k)| counts.get(c).is_some_and(|have| k <= have))
            && seq
                .iter()
                .enumerate()
                .all(|(i, c)| pm.permits(i + 1, Symbol(*c)))
    };
    let mut layer: Vec<Vec<char>> = vec![Vec::new()];
    let mut nodes = 1u64;
    let mut dead_ends = 0u64;
    for _ in 0..n {
        let mut next = Vec::new();
        for seq in &layer {
            let before = next.len();
            for &c in &alphabet {
                let mut child = seq.clone();
                child.push(c);
                if fits(&child) {
                    next.push(child);
                }
            }
            if next.len() == before {
                dead_ends += 1;
            }
        }
        nodes += next.len() as u64;
        layer = next;
    }
    (nodes, dead_ends)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn generator_matches_oracle((s, cs) in instance(7)) {
        let cs = without_conflicts(&cs);
        let pm = cs.normalize(&alphabet_of(&s)).unwrap();
        let got: Vec<String> = generate(&s, &pm, true).unwrap().collect();
        let want = filter(&distinct_permutations(&s), &pm).unwrap().outputs;
        prop_assert_eq!(&got, &want);
        prop_assert!(got.windows(2).all(|w| w[0] < w[1]));
        let counts = symbol_counts(&s);
        for t in &got {
            prop_assert!(pm.accepts(t));
            prop_assert_eq!(&symbol_counts(t), &counts);
        }
    }

    #[test]
    fn unsorted_generation_yields_same_set((s, cs) in instance(6)) {
        let cs = without_conflicts(&cs);
        let pm = cs.normalize(&alphabet_of(&s)).unwrap();
        let got: Vec<String> = generate(&s, &pm, false).unwrap().collect();
        let unique: BTreeSet<&String> = got.iter().collect();
        prop_assert_eq!(unique.len(), got.len());
        let want = filter(&distinct_permutations(&s), &pm).unwrap().outputs;
        prop_assert_eq!(unique.into_iter().cloned().collect::<Vec<_>>(), want);
    }

    #[test]
    fn counters_match_brute_force_tree((s, cs) in instance(6)) {
        let cs = without_conflicts(&cs);
        let pm = cs.normalize(&alphabet_of(&s)).unwrap();
        let mut stream = generate(&s, &pm, true).unwrap();
        let mut last = stream.stats().stats;
        while stream.next().is_some() {
            let now = stream.stats().stats;
            prop_assert!(now.calls >= last.calls && now.emitted > last.emitted);
            prop_assert!(now.dead_ends >= last.dead_ends);
            last = now;
        }
        let snap = stream.stats();
        prop_assert!(snap.complete);
        let (nodes, dead_ends) = brute_force_nodes(&s, &pm);
        prop_assert_eq!(snap.stats.calls, nodes);
        prop_assert_eq!(snap.stats.dead_ends, dead_ends);
        prop_assert!(snap.stats.emitted <= snap.stats.calls);
    }

    #[test]
    fn normalized_rows_follow_the_rules((s, cs) in instance(6)) {
        let cs = without_conflicts(&cs);
        let alphabet = alphabet_of(&s);
        let pm = cs.normalize(&alphabet).unwrap();
        let whole: BTreeSet<Symbol> = alphabet.iter().collect();
        for (i, row) in pm.rows().iter().enumerate() {
            prop_assert!(row.is_subset(&whole));
            let here: Vec<_> = cs.constraints().iter().filter(|c| c.position() == i + 1).collect();
            if here.is_empty() {
                prop_assert_eq!(row, &whole);
            } else if here.iter().all(|c| c.kind() == ConstraintKind::Forbidden) {
                let forbidden: BTreeSet<Symbol> =
                    here.iter().flat_map(|c| c.symbols().iter().copied()).collect();
                prop_assert_eq!(row, &whole.difference(&forbidden).copied().collect());
            }
        }
        if pm.rows().iter().all(|r| !r.is_empty()) {
            prop_assert_eq!(pm.to_constraints().normalize(&alphabet).unwrap(), pm);
        }
    }

    #[test]
    fn validate_rejects_exactly_mixed_positions((s, cs) in instance(6)) {
        let mut kinds: BTreeMap<usize, BTreeSet<ConstraintKind>> = BTreeMap::new();
        for c in cs.constraints() {
            kinds.entry(c.position()).or_default().insert(c.kind());
        }
        let mixed: Vec<usize> = kinds.iter().filter(|(_, k)| k.len() == 2).map(|(p, _)| *p).collect();
        let in_bounds = cs.constraints().iter().all(|c| (1..=s.chars().count()).contains(&c.position()));
        match cs.validate() {
            Ok(()) => prop_assert!(mixed.is_empty() && in_bounds),
            Err(report) => {
                if in_bounds {
                    prop_assert_eq!(report.conflicts(), mixed);
                } else {
                    prop_assert!(!report.out_of_bounds().is_empty());
                }
            }
        }
    }

    #[test]
    fn render_then_parse_round_trips((s, cs) in instance(6)) {
        let text = render(&cs);
        let back = parse(&text, cs.len()).unwrap();
        prop_assert_eq!(back.validate().is_ok(), cs.validate().is_ok());
        if cs.validate().is_ok() {
            for alphabet in [alphabet_of(&s), alphabet_of("abcdz"), alphabet_of("")] {
                prop_assert_eq!(back.normalize(&alphabet), cs.normalize(&alphabet));
            }
        }
        prop_assert_eq!(render(&back), text);
    }

    #[test]
    fn parse_never_panics(text in "\\PC{0,40}", len in 0usize..10) {
        let _ = parse(&text, len);
    }

    #[test]
    fn parse_never_panics_on_near_grammar(
        text in "(pos|not|in|[ \\t{},#\\\\]|[0-9]|[a-c]|\r?\n){0,30}",
    ) {
        let _ = parse(&text, 4);
    }

    #[test]
    fn extra_whitespace_is_ignored(
        cs in constraint_set(5),
        pads in prop::collection::vec(prop::sample::select(vec!["", " ", "\t", "  \t"]), 64),
    ) {
        let text = render(&cs);
        let mut padded = String::new();
        let mut k = 0;
        let mut pad = || { k += 1; pads[k % pads.len()] };
        for line in text.lines() {
            padded.push_str(pad());
            // Pad around every token boundary the grammar allows.
            let chars = line.chars();
            let mut escaped = false;
            for c in chars {
                let boundary = !escaped && matches!(c, '{' | ',' | ' ');
                let closing = !escaped && c == '}';
                if closing {
                    padded.push_str(pad());
                }
                padded.push(c);
                escaped = !escaped && c == '\\';
                if boundary {
                    padded.push_str(pad());
                }
            }
            padded.push_str(pad());
            padded.push('\n');
        }
        let original = parse(&text, 5).unwrap();
        let reparsed = parse(&padded, 5).unwrap();
        prop_assert_eq!(original, reparsed);
    }

    #[test]
    fn oracle_size_is_multinomial(s in input_string(8)) {
        let perms = distinct_permutations(&s);
        let fact = |k: usize| (1..=k as u64).product::<u64>();
        let denom: u64 = symbol_counts(&s).values().map(|&k| fact(k)).product();
        prop_assert_eq!(perms.len() as u64, fact(s.chars().count()) / denom);
        prop_assert!(perms.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn repeated_symbol_has_one_permutation() {
    for k in 0..10 {
        assert_eq!(distinct_permutations(&"x".repeat(k)).len(), 1);
    }
}

#[test]
fn unicode_symbols_are_single_scalars() {
    let s = "αβα";
    let cs = parse("pos 1 not in {α}", 3).unwrap();
    let pm = cs.normalize(&alphabet_of(s)).unwrap();
    let got: Vec<String> = generate(s, &pm, true).unwrap().collect();
    assert_eq!(got, ["βαα"]);
}
