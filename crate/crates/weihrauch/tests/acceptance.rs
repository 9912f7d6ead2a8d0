//! One line per acceptance criterion, then a single assertion over all of them.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use weihrauch::baire::{encode, Point, Word};
use weihrauch::limitmachine::{adversary, lpo_k_machine, run_lpo_k, DEFAULT_QUIET};
use weihrauch::medvedev::{candidate_machines, embed_backward, embed_forward, fixture_lattice, medvedev_check};
use weihrauch::spaces::{tree_point, word_index, Ternary, Tree};
use weihrauch::suite::{self, SUITE_DEPTH, SUITE_INPUTS};
use weihrauch::ternary::{nand, nand_realizer, decode_prefix, synthesize, ternary_inputs, TruthTable};
use weihrauch::weakcomp::{compact_image, modulus, swap_fixtures, swap_sides};
use weihrauch::witnesses::named::gen::nat_point;
use weihrauch::witnesses::{check, CheckConfig};
use weihrauch::wkl::{extracted_paths, fixtures, random_fin_tree, soundness_depth};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn named_suite() -> Outcome {
    const REQUIRED: [&str; 14] = [
        "llpo_to_lpo",
        "id_to_c",
        "id_to_llpo_hat",
        "llpo_hat_squared",
        "llpo_to_llpo_r",
        "llpo_r_to_llpo",
        "wkl_to_llpo_hat",
        "llpo_hat_to_wkl",
        "compact_choice_to_llpo_hat",
        "llpo_hat_to_compact_choice",
        "join_to_product[zeros_or_ones,alternating]",
        "product_to_join[zeros_or_ones,alternating]",
        "meet_to_sum[zeros_or_ones,alternating]",
        "sum_to_meet[zeros_or_ones,alternating]",
    ];
    let start = Instant::now();
    let entries = suite::registry();
    let names: Vec<&str> = entries.iter().map(|e| e.name()).collect();
    for r in REQUIRED {
        ensure(names.contains(&r), || format!("{r} is not registered"))?;
    }
    let lines = suite::run_suite(&entries, SUITE_DEPTH, SUITE_INPUTS);
    let secs = start.elapsed().as_secs_f64();
    if let Some(bad) = lines.iter().find(|l| !l.passed()) {
        return Err(bad.to_string());
    }
    ensure(secs < 60.0, || format!("{} witnesses took {secs:.1}s", lines.len()))?;
    Ok(format!("{} witnesses, depth {SUITE_DEPTH}, {SUITE_INPUTS} inputs each, {secs:.1}s", lines.len()))
}

fn ternary_logic() -> Outcome {
    use Ternary::*;
    // the table as printed, columns (A, B, A|B)
    let table = [
        (Zero, Zero, One),
        (Zero, One, One),
        (One, Zero, One),
        (One, One, Zero),
        (Zero, Half, One),
        (One, Half, Half),
        (Half, Zero, One),
        (Half, One, Half),
        (Half, Half, Half),
    ];
    let enc = weihrauch::spaces::encode_ternary;
    for (a, b, c) in table {
        let out = nand_realizer().run_on_point(&Point::pair(enc(a), enc(b)), 24).output;
        ensure(decode_prefix(&out) == c && nand(a, b) == c, || format!("{a}|{b} is not {c}"))?;
    }
    let mut circuits = 0;
    for n in 1..=3usize {
        for code in 0u32..1 << (1 << n) {
            let bits = (0..1 << n).map(|r| code >> r & 1 == 1).collect();
            let t = TruthTable::new(n, bits).map_err(|e| e.to_string())?;
            let c = synthesize(&t).map_err(|e| e.to_string())?;
            for x in ternary_inputs(n) {
                ensure(c.realize(&x) == t.extend(&x), || format!("table {t} at {x:?}"))?;
            }
            circuits += 1;
        }
    }
    Ok(format!("9 table rows, {circuits} circuits on all 3^n inputs"))
}

fn llpo_swap() -> Outcome {
    let fixtures = swap_fixtures();
    ensure(fixtures.len() >= 20, || format!("only {} fixtures", fixtures.len()))?;
    for fx in &fixtures {
        let k = compact_image(&fx.point).map_err(|e| e.to_string())?;
        let m = modulus(&fx.machine, &k, fx.depth).map_err(|e| e.to_string())?;
        ensure(m <= 6, || format!("{} has modulus {m}", fx.name))?;
        let constrained = fx.point.row_cycle().map(|c| c.base).unwrap_or(0);
        ensure(constrained <= 6, || format!("{} constrains {constrained} coordinates", fx.name))?;
        let (left, right) = swap_sides(fx).map_err(|e| format!("{}: {e}", fx.name))?;
        ensure(left == right, || format!("{}: {left:?} vs {right:?}", fx.name))?;
    }
    Ok(format!("{} fixtures, value sets identical", fixtures.len()))
}

fn wkl_soundness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut trees = fixtures();
    trees.extend((0..20).map(|_| random_fin_tree(&mut rng)));
    let mut branches = 0;
    for t in &trees {
        let depth = soundness_depth(t).max(2);
        let tree = Tree::Fin(t.clone());
        let chi = tree_point(tree.clone());
        for path in extracted_paths(&tree, depth) {
            let inside = (0..=path.len()).all(|j| chi.value_at(word_index(&path[..j])) == 1);
            ensure(inside, || format!("path {path:?} leaves {tree}"))?;
            branches += 1;
        }
    }
    let round = suite::find("llpo_hat_round_trip").ok_or("round trip is not registered")?;
    let line = suite::run_suite(&[round], SUITE_DEPTH, SUITE_INPUTS).remove(0);
    ensure(line.passed(), || line.to_string())?;
    Ok(format!("{} trees, {branches} branches in [T]; {line}", trees.len()))
}

fn mind_changes() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    for k in 1..=4 {
        for _ in 0..500 {
            let inputs: Vec<Point> = (0..k)
                .map(|_| {
                    let head: Word = (0..rng.gen_range(0..10)).map(|_| rng.gen_range(0..3)).collect();
                    let period: Word = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(1..3)).collect();
                    Point::evp(head, period)
                })
                .collect();
            let run = run_lpo_k(k, &inputs, 16);
            let want: Word = inputs.iter().map(|p| (!p.exists_zero().unwrap()) as u64).collect();
            ensure(run.mind_changes <= k && run.answer() == Some(&want), || {
                format!("k={k} on {inputs:?}: {run}")
            })?;
        }
        let out = adversary(&lpo_k_machine(k), k, DEFAULT_QUIET, 100_000).map_err(|e| e.to_string())?;
        ensure(out.run.mind_changes == k && out.correct, || format!("adversary at k={k}: {}", out.run))?;
    }
    Ok("k = 1..4, 500 tuples each, adversary forces exactly k".into())
}

fn medvedev_embedding() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let corpus: Vec<Point> = (0..SUITE_INPUTS).map(|_| nat_point(&mut rng)).collect();
    let cfg = CheckConfig::new(SUITE_DEPTH);
    let lattice = fixture_lattice();
    let mut reductions = 0;
    for (na, a) in &lattice {
        for (nb, b) in &lattice {
            let mut found = false;
            for m in candidate_machines(a) {
                let direct = medvedev_check(a, b, &m, SUITE_DEPTH).passed();
                let w = embed_forward(a, b, &m);
                let via = check(&w, &corpus, &cfg).map_err(|e| e.to_string())?.passed();
                ensure(direct == via, || format!("{na} ≤ {nb} via {}: {direct} vs {via}", m.name()))?;
                if via {
                    let back = medvedev_check(a, b, &embed_backward(&w), SUITE_DEPTH);
                    ensure(back.passed(), || back.to_string())?;
                }
                found |= direct;
            }
            ensure(found == (b.is_empty() || !a.is_empty()), || format!("{na} ≤ {nb} decided wrongly"))?;
            reductions += found as usize;
        }
    }
    Ok(format!("{} mass problems, {reductions} reductions, both directions", lattice.len()))
}

fn random_point(rng: &mut StdRng, depth: u32) -> Point {
    let evp = |rng: &mut StdRng| {
        let head: Word = (0..rng.gen_range(0..8)).map(|_| rng.gen_range(0..3)).collect();
        let period: Word = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..3)).collect();
        Point::evp(head, period)
    };
    match if depth == 0 { 0 } else { rng.gen_range(0..3) } {
        0 => evp(rng),
        1 => Point::pair(random_point(rng, depth - 1), random_point(rng, depth - 1)),
        _ => {
            let rows = (0..rng.gen_range(0..4)).map(|_| (rng.gen_range(0..6), evp(rng))).collect();
            let default = Point::evp(vec![], vec![rng.gen_range(0..2)]);
            Point::rows(rows, default)
        }
    }
}

fn baire_oracles() -> Outcome {
    const SCAN: usize = 4096;
    let mut rng = StdRng::seed_from_u64(7);
    let mut samples = 0;
    for _ in 0..1000 {
        let p = random_point(&mut rng, 2);
        let w = p.prefix(SCAN);
        let err = |what: &str| format!("{what} disagrees on {p}");
        ensure(p.exists_zero().map_err(|e| e.to_string())? == w.contains(&0), || err("exists_zero"))?;
        let (a, b) = (rng.gen_range(1..4u64), rng.gen_range(0..4u64));
        let scan = (b as usize..SCAN).step_by(a as usize).all(|i| w[i] == 0);
        ensure(p.all_zero_on_progression(a, b).map_err(|e| e.to_string())? == scan, || err("progression"))?;
        let n = rng.gen_range(0..6u64);
        let row: Word = (0..24).map(|k| w[encode(n, k) as usize]).collect();
        ensure(p.row(n).map_err(|e| e.to_string())?.prefix(24) == row, || err("row"))?;
        if let Some(q) = p.normalize() {
            ensure(q.prefix(SCAN) == w, || err("normalize"))?;
        }
        samples += 1;
    }
    Ok(format!("{samples} sampled (point, index) pairs"))
}

fn negative_controls() -> Outcome {
    let controls = suite::negative_controls();
    let lines = suite::run_suite(&controls, SUITE_DEPTH, SUITE_INPUTS);
    for line in &lines {
        let report = line.outcome.as_ref().map_err(|e| format!("{}: {e}", line.name))?;
        ensure(report.first_failure().is_some(), || format!("{} was accepted", line.name))?;
    }
    Ok(format!("{} corrupted witnesses rejected at a coordinate", lines.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("named-witness suite", named_suite),
        ("ternary logic", ternary_logic),
        ("LLPO swap", llpo_swap),
        ("WKL soundness", wkl_soundness),
        ("mind changes", mind_changes),
        ("Medvedev embedding", medvedev_embedding),
        ("brute-force oracles", baire_oracles),
        ("negative controls", negative_controls),
    ];
    let mut failed = vec![];
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
