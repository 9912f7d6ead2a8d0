//! Both directions of `WKL ≡sW LLPÔ`.
//!
//! Going down, every word `w` gets an `LLPO` instance `q_w` that, whenever one
//! child of `w` dies out before the other, forces the answer towards the
//! surviving child. Going up, a tuple `p` becomes the tree of words whose
//! `m`-th bit is still allowed by row `m`.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::Rng;

use crate::baire::{encode, Point, Word};
use crate::machine::{Fuel, Machine};
use crate::problems::{self, Problem, ProblemError};
use crate::spaces::{tree_point, word_at, word_index, words_of_len, FinTree, Tree};
use crate::witnesses::named::Entry;
use crate::witnesses::{Translator, Witness};

fn child(w: &[u64], i: u64) -> Word {
    let mut c = w.to_vec();
    c.push(i);
    c
}

/// `w ∈ P_{n,i}`: no tree word of length `n` is comparable with `wi`.
pub fn blocked(t: &Tree, w: &[u64], i: u64, n: usize) -> bool {
    !t.comparable_at_level(&child(w, i), n)
}

/// `m(w)`, the least level at which one of the children of `w` is blocked.
pub fn blocking_index(t: &Tree, w: &[u64]) -> Option<usize> {
    let dead: Vec<Word> = [0, 1].map(|i| child(w, i)).into_iter().filter(|c| !t.viable(c)).collect();
    let bound = dead.iter().map(|c| t.dead_end_bound(c)).max()?;
    [0, 1].into_iter().filter_map(|i| t.first_blocked_level(&child(w, i), bound)).min()
}

fn spike(at: usize) -> Point {
    let mut head = vec![0; at];
    head.push(1);
    Point::evp(head, vec![0])
}

/// `q_w`: `0^{2n}10^ω` if only `w0` is blocked at `n = m(w)`, `0^{2n+1}10^ω` if only `w1` is, else `0^ω`.
pub fn q_stream(t: &Tree, w: &[u64]) -> Point {
    // Off the tree both children die at the same level.
    if !t.contains(w) {
        return Point::zeros();
    }
    let Some(n) = blocking_index(t, w) else {
        return Point::zeros();
    };
    match (blocked(t, w, 0, n), blocked(t, w, 1, n)) {
        (true, false) => spike(2 * n),
        (false, true) => spike(2 * n + 1),
        _ => Point::zeros(),
    }
}

/// Symbol `⟨n, k⟩` of `⟨q_{w₀}, q_{w₁}, …⟩` from a prefix of `χ_T`.
///
/// Only levels up to `k/2` matter: a spike at `2m` or `2m+1` lies beyond `k` when `m > k/2`.
fn q_symbol(chi: &[u64], t: u64) -> Option<u64> {
    let (n, k) = crate::baire::decode(t);
    let w = word_at(n);
    let top = (k / 2) as usize;
    let known = top.max(w.len() + 1);
    if word_index(&vec![1; known]) as usize >= chi.len() {
        return None;
    }
    let member = |u: &[u64]| chi[word_index(u) as usize] != 0;
    let blocked = |i: u64, level: usize| {
        let c = child(&w, i);
        if level <= c.len() {
            !member(&c[..level])
        } else {
            !words_of_len(level - c.len()).any(|tail| member(&[c.as_slice(), &tail].concat()))
        }
    };
    for level in 0..=top {
        let (b0, b1) = (blocked(0, level), blocked(1, level));
        if b0 || b1 {
            let k = k as usize;
            return Some(match (b0, b1) {
                (true, false) => (k == 2 * level) as u64,
                (false, true) => (k == 2 * level + 1) as u64,
                _ => 0,
            });
        }
    }
    Some(0)
}

fn tree_of(p: &Point) -> problems::Result<std::sync::Arc<Tree>> {
    match p {
        Point::TreeChar(t) => Ok(t.clone()),
        _ => Err(ProblemError::Unsupported(format!("{p} is not a tree name"))),
    }
}

/// Reads a path off `LLPÔ` answers: the next bit after `w` is the answer for row `w`.
pub fn path_machine() -> Machine {
    Machine::new("path", |r, fuel: &mut Fuel| {
        let mut path = vec![];
        loop {
            let i = word_index(&path) as usize;
            if i >= r.len() || !fuel.tick(1) {
                return path;
            }
            path.push((r[i] != 0) as u64);
        }
    })
}

/// `WKL ≤sW LLPÔ`.
pub fn wkl_to_llpo_hat() -> Witness {
    let k = Translator::new(Machine::from_symbols("⟨q_w⟩", q_symbol), |p| {
        let t = tree_of(p)?;
        Ok(Point::lazy_rows("⟨q_w⟩", move |n| q_stream(&t, &word_at(n))))
    });
    Witness::new("wkl_to_llpo_hat", Problem::Wkl, Problem::llpo_hat(), k, path_machine(), true)
}

/// `χ_T(word_at(i))` for the tree of `p`, once every `p_m(2k+b)` with `m, k < |v|` is known.
fn tree_symbol(p: &[u64], i: u64) -> Option<u64> {
    let v = word_at(i);
    let n = v.len() as u64;
    if n > 0 && encode(n - 1, 2 * n - 1) as usize >= p.len() {
        return None;
    }
    let free = (0..n).all(|m| (0..n).all(|k| p[encode(m, 2 * k + v[m as usize]) as usize] == 0));
    Some(free as u64)
}

/// `LLPÔ ≤sW WKL`: the paths of the constructed tree are the `LLPÔ` answers themselves.
pub fn llpo_hat_to_wkl() -> Witness {
    let k = Translator::new(Machine::from_symbols("χ_T", tree_symbol), |p| Ok(tree_point(Tree::Llpo(p.clone()))));
    Witness::new("llpo_hat_to_wkl", Problem::llpo_hat(), Problem::Wkl, k, Machine::identity(), true)
}

/// Every path `H` extracts to `depth`, one per branch of the oracle answers it consults.
pub fn extracted_paths(t: &Tree, depth: usize) -> Vec<Word> {
    fn walk(t: &Tree, w: &mut Word, depth: usize, out: &mut Vec<Word>) {
        if w.len() == depth {
            out.push(w.clone());
            return;
        }
        let choices = problems::llpo(&q_stream(t, w)).expect("q_w has at most one nonzero");
        for b in choices {
            w.push(b);
            walk(t, w, depth, out);
            w.pop();
        }
    }
    let mut out = vec![];
    walk(t, &mut vec![], depth, &mut out);
    out
}

/// An `LLPÔ` answer to `K(T)` that follows `path` and takes the least answer elsewhere.
pub fn answer_along(t: &Tree, path: &[u64]) -> Point {
    let fixed: BTreeMap<u64, u64> = (0..path.len()).map(|j| (word_index(&path[..j]), path[j])).collect();
    let t = t.clone();
    Point::lazy("answer", move |n| match fixed.get(&n) {
        Some(&b) => b,
        None => problems::llpo(&q_stream(&t, &word_at(n)))
            .ok()
            .and_then(|s| s.first().copied())
            .unwrap_or(0),
    })
}

/// Depth to which soundness is checked: twice the explicit part.
pub fn soundness_depth(t: &FinTree) -> usize {
    2 * t.depth().max(t.live_horizon())
}

/// Hand-made trees covering dead branches, late splits and several live paths.
pub fn fixtures() -> Vec<FinTree> {
    let w = |s: &str| crate::spaces::parse_word(s).expect("fixture word");
    let evp = |h: Vec<u64>, p: Vec<u64>| Point::evp(h, p);
    let trees = [
        FinTree::from_paths(vec![Point::zeros()]),
        FinTree::from_paths(vec![Point::zeros(), Point::ones()]),
        FinTree::new(3, ["", "1", "11", "111"].map(w), vec![Point::zeros()]),
        FinTree::new(4, ["", "0", "00", "01", "010", "0101"].map(w), vec![evp(vec![1], vec![0, 1])]),
        FinTree::new(3, ["", "0", "1", "00", "10", "11", "100"].map(w), vec![evp(vec![0, 1], vec![1])]),
        FinTree::new(2, ["", "0", "1", "01", "10"].map(w), vec![evp(vec![1, 1, 0], vec![0]), evp(vec![], vec![1, 0])]),
        FinTree::from_paths(vec![evp(vec![0, 0, 0, 1], vec![1]), evp(vec![0, 0, 0, 0], vec![0])]),
        FinTree::new(5, ["", "1", "10", "101", "1010", "10101"].map(w), vec![evp(vec![1, 1], vec![0])]),
    ];
    trees.into_iter().map(|t| t.expect("fixture tree")).collect()
}

/// A random finitely presented tree: a few live paths and some dead explicit branches.
pub fn random_fin_tree(rng: &mut StdRng) -> FinTree {
    let bits = |rng: &mut StdRng, n: usize| -> Word { (0..n).map(|_| rng.gen_range(0..2)).collect() };
    let live: Vec<Point> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let (h, p) = (rng.gen_range(0..4), rng.gen_range(1..3));
            Point::evp(bits(rng, h), bits(rng, p))
        })
        .collect();
    let depth = rng.gen_range(0..=4);
    let mut nodes = std::collections::BTreeSet::new();
    for _ in 0..rng.gen_range(0..4) {
        let leaf = bits(rng, depth);
        for j in 0..=leaf.len() {
            nodes.insert(leaf[..j].to_vec());
        }
    }
    FinTree::new(depth, nodes, live).expect("generated tree is well formed")
}

/// Registry entries. `H` reads answers at word indices up to `2^depth`, so
/// each behavior costs a full prefix of that length; the cap stays small.
pub fn entries() -> Vec<Entry> {
    use crate::witnesses::algebra::compose_witness;
    use crate::witnesses::named::gen::llpo_hat_input;
    let fin = |rng: &mut StdRng| tree_point(Tree::Fin(random_fin_tree(rng)));
    let mut out = vec![
        Entry::new(wkl_to_llpo_hat(), fin).with_cap(WKL_CAP),
        Entry::new(llpo_hat_to_wkl(), llpo_hat_input),
    ];
    if let Ok(w) = compose_witness(&llpo_hat_to_wkl(), &wkl_to_llpo_hat()) {
        out.push(Entry::new(w.renamed("llpo_hat_round_trip"), llpo_hat_input).with_cap(WKL_CAP));
    }
    out
}

/// Behaviors per input for witnesses whose `H` walks the word enumeration.
pub const WKL_CAP: u128 = 32;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ValueSet;
    use crate::spaces::encode_tree;
    use crate::witnesses::algebra::compose_witness;
    use crate::witnesses::named::gen::llpo_hat_input;
    use crate::witnesses::{check, CheckConfig, FailReason};
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn brute_comparable(t: &Tree, u: &[u64], n: usize) -> bool {
        words_of_len(n).any(|v| t.contains(&v) && (crate::baire::is_prefix(&v, u) || crate::baire::is_prefix(u, &v)))
    }

    /// `m(w)` by enumerating levels up to 10.
    fn brute_blocking(t: &Tree, w: &[u64]) -> Option<usize> {
        (0..=10).find(|&n| [0, 1].iter().any(|&i| !brute_comparable(t, &child(w, i), n)))
    }

    fn words_up_to(n: usize) -> impl Iterator<Item = Word> {
        (0..=n).flat_map(words_of_len)
    }

    fn all_trees() -> Vec<Tree> {
        let mut rng = StdRng::seed_from_u64(11);
        let mut out: Vec<Tree> = fixtures().into_iter().map(Tree::Fin).collect();
        out.extend((0..12).map(|_| Tree::Fin(random_fin_tree(&mut rng))));
        out
    }

    #[test]
    fn blocking_index_matches_level_enumeration() {
        for t in all_trees() {
            for w in words_up_to(5) {
                let fast = blocking_index(&t, &w);
                match brute_blocking(&t, &w) {
                    Some(m) => assert_eq!(fast, Some(m), "{t} at {w:?}"),
                    None => assert!(fast.is_none_or(|m| m > 10), "{t} at {w:?}"),
                }
            }
        }
    }

    #[test]
    fn blocking_index_examples() {
        let both = Tree::Fin(FinTree::from_paths(vec![Point::zeros(), Point::ones()]).unwrap());
        assert_eq!(blocking_index(&both, &[]), None);
        let zero = Tree::Fin(FinTree::from_paths(vec![Point::zeros()]).unwrap());
        assert_eq!(blocking_index(&zero, &[]), brute_blocking(&zero, &[]));
        assert_eq!(blocking_index(&zero, &[]), Some(1));
        assert_eq!(q_stream(&zero, &[]).prefix(6), vec![0, 0, 0, 1, 0, 0]);
        let off = [1, 0, 1];
        assert_eq!(blocking_index(&zero, &off), brute_blocking(&zero, &off));
        assert_eq!(blocking_index(&zero, &off), Some(1));
        assert!(q_stream(&zero, &off).count_nonzero().unwrap() == Some(0));
    }

    #[test]
    fn q_stream_trichotomy() {
        for t in all_trees() {
            for w in words_up_to(5) {
                let q = q_stream(&t, &w);
                assert!(Problem::Llpo.in_domain(&q).unwrap());
                let m = brute_blocking(&t, &w);
                let want = match m {
                    Some(n) => {
                        let b0 = !brute_comparable(&t, &child(&w, 0), n);
                        let b1 = !brute_comparable(&t, &child(&w, 1), n);
                        match (b0, b1) {
                            (true, false) => spike(2 * n).prefix(24),
                            (false, true) => spike(2 * n + 1).prefix(24),
                            _ => vec![0; 24],
                        }
                    }
                    None => vec![0; 24],
                };
                assert_eq!(q.prefix(24), want, "{t} at {w:?}");
            }
        }
    }

    #[test]
    fn k_machine_reads_q_from_the_characteristic_prefix() {
        let m = wkl_to_llpo_hat().k.machine;
        for t in all_trees() {
            let p = tree_point(t.clone());
            let out = m.eval_word(&p.prefix(1 << 9));
            assert!(out.len() >= 40);
            let exact = wkl_to_llpo_hat().k.apply(&p).unwrap();
            assert_eq!(out, exact.prefix(out.len()), "{t}");
        }
    }

    #[test]
    fn every_branch_stays_in_the_tree() {
        for t in all_trees() {
            let Tree::Fin(ft) = &t else { unreachable!() };
            let d = soundness_depth(ft).max(4);
            let paths = extracted_paths(&t, d);
            assert!(!paths.is_empty());
            for path in &paths {
                assert!((0..=d).all(|n| t.contains(&path[..n])), "{t}: {path:?}");
                let r = answer_along(&t, path);
                assert_eq!(&path_machine().run_on_point(&r, d).output, path);
            }
        }
    }

    #[test]
    fn single_live_path_is_followed() {
        let t = encode_tree(&FinTree::from_paths(vec![Point::zeros()]).unwrap());
        let w = wkl_to_llpo_hat();
        let q = w.k.apply(&t).unwrap();
        let out = w.h.run_on_point(&q, 8).output;
        assert_eq!(out, vec![0; 8]);
        assert!(check(&w, &[t], &CheckConfig::new(8).adaptive()).unwrap().passed());
    }

    #[test]
    fn two_live_paths_pass_on_all_behaviors() {
        let tree = Tree::Fin(FinTree::from_paths(vec![Point::zeros(), Point::ones()]).unwrap());
        let report = check(&wkl_to_llpo_hat(), &[tree_point(tree.clone())], &CheckConfig::new(8)).unwrap();
        assert!(report.passed(), "{report}");
        let branches: usize = (0..8).map(|n| problems::llpo(&q_stream(&tree, &word_at(n))).unwrap().len()).product();
        assert_eq!(report.behaviors(), branches);
        assert_eq!(extracted_paths(&tree, 8).len(), 2);
    }

    #[test]
    fn finite_tree_is_out_of_domain() {
        let t = encode_tree(&FinTree::new(2, [vec![], vec![0]], vec![]).unwrap());
        assert!(check(&wkl_to_llpo_hat(), &[t], &CheckConfig::new(4)).is_err());
    }

    #[test]
    fn wkl_witness_checks_on_random_trees() {
        let mut rng = StdRng::seed_from_u64(5);
        let corpus: Vec<Point> = (0..6).map(|_| encode_tree(&random_fin_tree(&mut rng))).collect();
        let report = check(&wkl_to_llpo_hat(), &corpus, &CheckConfig::new(10).adaptive().with_cap(16)).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn flipped_path_is_rejected() {
        let mut w = wkl_to_llpo_hat();
        w.h = Machine::compose(crate::witnesses::pointwise("flip", |v| 1 - v.min(1)), path_machine());
        let t = encode_tree(&FinTree::from_paths(vec![Point::zeros()]).unwrap());
        let report = check(&w, &[t], &CheckConfig::new(6).adaptive()).unwrap();
        let (_, f) = report.first_failure().expect("flipped path must fail");
        assert_eq!((f.coordinate, f.reason), (0, FailReason::WrongAnswer));
    }

    #[test]
    fn full_tree_from_zero_rows() {
        let t = llpo_hat_to_wkl().k.apply(&Point::zeros()).unwrap();
        assert!((0..63).all(|i| t.value_at(i) == 1));
    }

    #[test]
    fn forced_first_bit() {
        let p = Point::rows(BTreeMap::from([(0, Point::evp(vec![1], vec![0]))]), Point::zeros());
        let w = llpo_hat_to_wkl();
        let t = w.k.apply(&p).unwrap();
        let Point::TreeChar(tree) = &t else { unreachable!() };
        assert!(tree.contains(&[1]) && !tree.viable(&[0]));
        assert!(words_of_len(4).filter(|v| tree.contains(v)).all(|v| v[0] == 1));
        assert!(check(&w, &[p], &CheckConfig::new(12).adaptive()).unwrap().passed());
    }

    #[test]
    fn round_trip_passes() {
        let w = compose_witness(&llpo_hat_to_wkl(), &wkl_to_llpo_hat()).unwrap();
        let mut rng = StdRng::seed_from_u64(9);
        let corpus: Vec<Point> = (0..4).map(|_| llpo_hat_input(&mut rng)).collect();
        let report = check(&w, &corpus, &CheckConfig::new(10).adaptive().with_cap(16)).unwrap();
        assert!(report.passed(), "{report}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Paths of the constructed tree are exactly the `LLPÔ` answers.
        #[test]
        fn constructed_tree_paths_are_the_answers(seed in any::<u64>(), bits in proptest::collection::vec(0u64..2, 4), period in proptest::collection::vec(0u64..2, 1..3)) {
            let mut rng = StdRng::seed_from_u64(seed);
            let p = llpo_hat_input(&mut rng);
            let Point::TreeChar(t) = llpo_hat_to_wkl().k.apply(&p).unwrap() else { unreachable!() };
            let ValueSet::CoordinateProduct(cp) = problems::llpo_hat(&p).unwrap() else { unreachable!() };
            let q = Point::evp(bits, period);
            let n = 16;
            prop_assert_eq!((0..=n).all(|j| t.contains(&q.prefix(j))), cp.contains_point(&q, n));
        }

        #[test]
        fn tree_symbols_match_the_exact_tree(seed in any::<u64>()) {
            let mut rng = StdRng::seed_from_u64(seed);
            let p = llpo_hat_input(&mut rng);
            let w = llpo_hat_to_wkl();
            let out = w.k.machine.eval_word(&p.prefix(200));
            prop_assert!(out.len() >= 15);
            prop_assert_eq!(out.clone(), w.k.apply(&p).unwrap().prefix(out.len()));
        }
    }
}
