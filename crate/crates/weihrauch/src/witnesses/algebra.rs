//! Witness combinators: the preorder, products, sums, cylinders and parallelization.

use crate::baire::{decode, encode, Point, RowCycle, Word};
use crate::machine::{row_of_word, tuple_from_rows, Machine};
use crate::problems::{self, Problem};

use super::{eval_fresh, pair_words, unpair_word, Layout, Result, Translator, Witness, WitnessError};

fn same_middle(a: &Problem, b: &Problem) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(WitnessError::MiddleMismatch(a.name(), b.name()))
    }
}

fn cap(w: &[u64]) -> usize {
    2 * w.len() + 16
}

/// `f ≤W f` with `H = π₂`, `K = id`.
pub fn refl(f: Problem) -> Witness {
    let name = format!("refl({f})");
    Witness::new(&name, f.clone(), f, Translator::identity(), Machine::proj2(), false)
}

/// `f ≤sW f` with `H = K = id`.
pub fn refl_strong(f: Problem) -> Witness {
    let name = format!("refl_s({f})");
    Witness::new(&name, f.clone(), f, Translator::identity(), Machine::identity(), true)
}

/// From `f ≤ g` and `g ≤ h`, a witness for `f ≤ h`.
pub fn compose_witness(w1: &Witness, w2: &Witness) -> Result<Witness> {
    same_middle(&w1.g, &w2.f)?;
    let name = format!("{};{}", w1.name, w2.name);
    let k = Translator::compose(&w2.k, &w1.k);
    if w1.strong && w2.strong {
        let h = Machine::compose(w1.h.clone(), w2.h.clone());
        return Ok(Witness::new(&name, w1.f.clone(), w2.g.clone(), k, h, true));
    }
    // H'' = H₁⟨π₁, H₂(K₁ ⊗ id)⟩
    let inner = Machine::compose(w2.ordinary_h(), Machine::tensor(w1.k.machine.clone(), Machine::identity()));
    let h = Machine::compose(w1.ordinary_h(), Machine::pair(Machine::proj1(), inner));
    Ok(Witness::new(&name, w1.f.clone(), w2.g.clone(), k, h, false))
}

/// `pi(&[a, b])` is `π_a ∘ π_b`.
fn pi(path: &[u8]) -> Translator {
    let mut t = Translator::identity();
    for &s in path.iter().rev() {
        let step = if s == 1 { Translator::proj1() } else { Translator::proj2() };
        t = Translator::compose(&step, &t);
    }
    t
}

/// `P⟨⟨a,b⟩,⟨c,d⟩⟩ = ⟨⟨a,c⟩,⟨b,d⟩⟩`.
fn regroup() -> Translator {
    Translator::pair(
        &Translator::pair(&pi(&[1, 1]), &pi(&[1, 2])),
        &Translator::pair(&pi(&[2, 1]), &pi(&[2, 2])),
    )
}

/// `f ≤ g` and `f' ≤ g'` give `f×f' ≤ g×g'`.
pub fn product_witness(w1: &Witness, w2: &Witness) -> Witness {
    let name = format!("({}×{})", w1.name, w2.name);
    let f = Problem::product(w1.f.clone(), w2.f.clone());
    let g = Problem::product(w1.g.clone(), w2.g.clone());
    let k = Translator::tensor(&w1.k, &w2.k);
    if w1.strong && w2.strong {
        let h = Machine::tensor(w1.h.clone(), w2.h.clone());
        return Witness::new(&name, f, g, k, h, true);
    }
    let h = Machine::compose(Machine::tensor(w1.ordinary_h(), w2.ordinary_h()), regroup().machine);
    Witness::new(&name, f, g, k, h, false)
}

fn tagged(t: u64, mut w: Word) -> Word {
    w.insert(0, t);
    w
}

/// `f ≤ g` and `f' ≤ g'` give `f⊕f' ≤ g⊕g'`; the answer tag picks the branch.
pub fn sum_witness(w1: &Witness, w2: &Witness) -> Witness {
    let name = format!("({}⊕{})", w1.name, w2.name);
    let f = Problem::sum(w1.f.clone(), w2.f.clone());
    let g = Problem::sum(w1.g.clone(), w2.g.clone());
    let k = Translator::tensor(&w1.k, &w2.k);
    if w1.strong && w2.strong {
        let (h1, h2) = (w1.h.clone(), w2.h.clone());
        let h = Machine::new("case", move |w, fuel| match w.split_first() {
            None => vec![],
            Some((&0, r)) => tagged(0, h1.eval(r, fuel)),
            Some((_, r)) => tagged(1, h2.eval(r, fuel)),
        });
        return Witness::new(&name, f, g, k, h, true);
    }
    let (h1, h2) = (w1.ordinary_h(), w2.ordinary_h());
    let h = Machine::new("case", move |w, fuel| {
        let (x, y) = unpair_word(w);
        let (p, q) = unpair_word(&x);
        match y.split_first() {
            None => vec![],
            Some((&0, r)) => tagged(0, h1.eval(&pair_words(&p, r), fuel)),
            Some((_, r)) => tagged(1, h2.eval(&pair_words(&q, r), fuel)),
        }
    });
    Witness::new(&name, f, g, k, h, false)
}

/// `f ≤sW f⊕f` (`K = D`, `H = L`) and `f⊕f ≤sW f` (`K = π₁`, `H = inject0`).
pub fn sum_idem(f: Problem) -> (Witness, Witness) {
    let ff = Problem::sum(f.clone(), f.clone());
    (
        Witness::new(&format!("sum_idem({f})"), f.clone(), ff.clone(), Translator::diag(), Machine::shift_left(), true),
        Witness::new(&format!("sum_idem⁻¹({f})"), ff, f, Translator::proj1(), Machine::inject(0), true),
    )
}

/// `f⊕g ≤sW f`.
pub fn glb_left(f: Problem, g: Problem) -> Witness {
    let name = format!("glb_left({f},{g})");
    Witness::new(&name, Problem::sum(f.clone(), g), f, Translator::proj1(), Machine::inject(0), true)
}

/// `f⊕g ≤sW g`.
pub fn glb_right(f: Problem, g: Problem) -> Witness {
    let name = format!("glb_right({f},{g})");
    Witness::new(&name, Problem::sum(f, g.clone()), g, Translator::proj2(), Machine::inject(1), true)
}

/// `h ≤ f` and `h ≤ g` give `h ≤ f⊕g`.
pub fn glb_factor(w1: &Witness, w2: &Witness) -> Result<Witness> {
    same_middle(&w1.f, &w2.f)?;
    let name = format!("factor({},{})", w1.name, w2.name);
    let g = Problem::sum(w1.g.clone(), w2.g.clone());
    let k = Translator::pair(&w1.k, &w2.k);
    if w1.strong && w2.strong {
        let (h1, h2) = (w1.h.clone(), w2.h.clone());
        let h = Machine::new("case", move |w, fuel| match w.split_first() {
            None => vec![],
            Some((&0, r)) => h1.eval(r, fuel),
            Some((_, r)) => h2.eval(r, fuel),
        });
        return Ok(Witness::new(&name, w1.f.clone(), g, k, h, true));
    }
    let (h1, h2) = (w1.ordinary_h(), w2.ordinary_h());
    let h = Machine::new("case", move |w, fuel| {
        let (x, y) = unpair_word(w);
        match y.split_first() {
            None => vec![],
            Some((&0, r)) => h1.eval(&pair_words(&x, r), fuel),
            Some((_, r)) => h2.eval(&pair_words(&x, r), fuel),
        }
    });
    Ok(Witness::new(&name, w1.f.clone(), g, k, h, false))
}

// ---------------------------------------------------------------- lattice laws

/// `(f×g)×h ≡sW f×(g×h)`.
pub fn product_assoc(f: Problem, g: Problem, h: Problem) -> (Witness, Witness) {
    let left = Problem::product(Problem::product(f.clone(), g.clone()), h.clone());
    let right = Problem::product(f, Problem::product(g, h));
    let to_right = Translator::pair(&pi(&[1, 1]), &Translator::pair(&pi(&[2, 1]), &pi(&[2])));
    let to_left = Translator::pair(&Translator::pair(&pi(&[1]), &pi(&[1, 2])), &pi(&[2, 2]));
    (
        Witness::new("product_assoc", left.clone(), right.clone(), to_right.clone(), to_left.machine.clone(), true),
        Witness::new("product_assoc⁻¹", right, left, to_left, to_right.machine, true),
    )
}

/// `f×g ≤sW g×f`.
pub fn product_comm(f: Problem, g: Problem) -> Witness {
    let swap = Translator::pair(&Translator::proj2(), &Translator::proj1());
    let h = swap.machine.clone();
    Witness::new("product_comm", Problem::product(f.clone(), g.clone()), Problem::product(g, f), swap, h, true)
}

/// Rewrites answer tags; `None` while the rewrite is undetermined.
fn retag(name: &str, rule: fn(&[u64]) -> Option<(Word, usize)>) -> Machine {
    Machine::new(name, move |w, _| match rule(w) {
        Some((mut head, skip)) => {
            head.extend_from_slice(&w[skip..]);
            head
        }
        None => vec![],
    })
}

/// `(f⊕g)⊕h ≡sW f⊕(g⊕h)`.
pub fn sum_assoc(f: Problem, g: Problem, h: Problem) -> (Witness, Witness) {
    let left = Problem::sum(Problem::sum(f.clone(), g.clone()), h.clone());
    let right = Problem::sum(f, Problem::sum(g, h));
    let to_right = Translator::pair(&pi(&[1, 1]), &Translator::pair(&pi(&[2, 1]), &pi(&[2])));
    let to_left = Translator::pair(&Translator::pair(&pi(&[1]), &pi(&[1, 2])), &pi(&[2, 2]));
    // answers of f⊕(g⊕h) as answers of (f⊕g)⊕h
    let into_left = retag("retag", |w| match w {
        [0, ..] => Some((vec![0, 0], 1)),
        [_, 0, ..] => Some((vec![0, 1], 2)),
        [_, _, ..] => Some((vec![1], 2)),
        _ => None,
    });
    let into_right = retag("retag", |w| match w {
        [0, 0, ..] => Some((vec![0], 2)),
        [0, _, ..] => Some((vec![1, 0], 2)),
        [t, ..] if *t != 0 => Some((vec![1, 1], 1)),
        _ => None,
    });
    (
        Witness::new("sum_assoc", left.clone(), right.clone(), to_right, into_left, true),
        Witness::new("sum_assoc⁻¹", right, left, to_left, into_right, true),
    )
}

/// `f⊕g ≤sW g⊕f`.
pub fn sum_comm(f: Problem, g: Problem) -> Witness {
    let swap = Translator::pair(&Translator::proj2(), &Translator::proj1());
    let flip = retag("flip", |w| match w {
        [0, ..] => Some((vec![1], 1)),
        [_, ..] => Some((vec![0], 1)),
        _ => None,
    });
    Witness::new("sum_comm", Problem::sum(f.clone(), g.clone()), Problem::sum(g, f), swap, flip, true)
}

/// `f ≤sW f×id`, `f×id ≤W f`, `f ≤sW id×f`, `id×f ≤W f`.
pub fn product_identity(f: Problem) -> [Witness; 4] {
    let fi = Problem::product(f.clone(), Problem::Identity);
    let if_ = Problem::product(Problem::Identity, f.clone());
    [
        Witness::new("unit_right", f.clone(), fi.clone(), Translator::diag(), Machine::proj1(), true),
        Witness::new(
            "unit_right⁻¹",
            fi,
            f.clone(),
            Translator::proj1(),
            Machine::pair(Machine::proj2(), pi(&[2, 1]).machine),
            false,
        ),
        Witness::new("unit_left", f.clone(), if_.clone(), Translator::diag(), Machine::proj2(), true),
        Witness::new(
            "unit_left⁻¹",
            if_,
            f,
            Translator::proj2(),
            Machine::pair(pi(&[1, 1]).machine, Machine::proj2()),
            false,
        ),
    ]
}

/// `f ≤sW f⊕𝟎` and `f⊕𝟎 ≤sW f`.
pub fn sum_neutral(f: Problem) -> (Witness, Witness) {
    let f0 = Problem::sum(f.clone(), Problem::NoRealizer);
    (
        Witness::new("sum_neutral", f.clone(), f0.clone(), Translator::diag(), Machine::shift_left(), true),
        Witness::new("sum_neutral⁻¹", f0, f, Translator::proj1(), Machine::inject(0), true),
    )
}

/// `f ≤sW 𝟎`: no realizer of `𝟎` exists, so any translators do.
pub fn below_zero(f: Problem) -> Witness {
    let name = format!("top({f})");
    Witness::new(&name, f, Problem::NoRealizer, Translator::identity(), Machine::identity(), true)
}

/// `nowhere ≤sW g`: nothing in the domain to check.
pub fn from_nowhere(g: Problem) -> Witness {
    let name = format!("bottom({g})");
    Witness::new(&name, Problem::NowhereDefined, g, Translator::identity(), Machine::identity(), true)
}

// ---------------------------------------------------------------- cylinders

/// `f ≤sW id×f` with `K = D`, `H = π₂`.
pub fn into_cylinder(f: Problem) -> Witness {
    let name = format!("cyl({f})");
    let g = Problem::product(Problem::Identity, f.clone());
    Witness::new(&name, f, g, Translator::diag(), Machine::proj2(), true)
}

/// `f ≤W g` gives `id×f ≤sW id×g` via
/// `K'⟨p,q⟩ = ⟨⟨p,q⟩, K(q)⟩` and `H'⟨⟨p,q⟩,r⟩ = ⟨p, H⟨q,r⟩⟩`.
pub fn cylindrify(w: &Witness) -> Witness {
    let name = format!("cylindrify({})", w.name);
    let f = Problem::product(Problem::Identity, w.f.clone());
    let g = Problem::product(Problem::Identity, w.g.clone());
    let k = Translator::pair(&Translator::identity(), &Translator::compose(&w.k, &Translator::proj2()));
    let h = Machine::pair(
        pi(&[1, 1]).machine,
        Machine::compose(w.ordinary_h(), Machine::pair(pi(&[2, 1]).machine, Machine::proj2())),
    );
    Witness::new(&name, f, g, k, h, true)
}

fn strip_identity(f: &Problem) -> Option<Problem> {
    match f {
        Problem::Product(a, b) if matches!(**a, Problem::Identity) => Some((**b).clone()),
        _ => None,
    }
}

/// `id×f ≤sW id×g` gives `f ≤W g` via `K' = π₂KD`, `H' = π₂H(π₁KD ⊗ id)`.
pub fn uncylindrify(w: &Witness) -> Result<Witness> {
    let (Some(f), Some(g)) = (strip_identity(&w.f), strip_identity(&w.g)) else {
        return Err(WitnessError::NotACylinder(format!("{} is not of the form id×f ≤ id×g", w.claim())));
    };
    let name = format!("uncylindrify({})", w.name);
    let kd = Translator::compose(&w.k, &Translator::diag());
    let k = Translator::compose(&Translator::proj2(), &kd);
    let first = Translator::compose(&Translator::proj1(), &kd).machine;
    // ordinary H reads ⟨⟨p,p⟩, ⟨π₁KD(p), r⟩⟩
    let feed = Machine::pair(
        Machine::compose(Machine::diag(), Machine::proj1()),
        Machine::tensor(first, Machine::identity()),
    );
    let h = Machine::compose(Machine::proj2(), Machine::compose(w.ordinary_h(), feed));
    Ok(Witness::new(&name, f, g, k, h, false))
}

/// `f ≤W g` and a cylinder witness `id×g ≤sW g` give `f ≤sW g`.
pub fn strengthen_on_cylinder(w: &Witness, cylinder: &Witness) -> Result<Witness> {
    let idg = Problem::product(Problem::Identity, w.g.clone());
    if !cylinder.strong || !cylinder.f.same_as(&idg) || !cylinder.g.same_as(&w.g) {
        return Err(WitnessError::NotACylinder(format!(
            "{} does not witness id×{} ≤sW {}",
            cylinder.claim(),
            w.g,
            w.g
        )));
    }
    let step = compose_witness(&into_cylinder(w.f.clone()), &cylindrify(w))?;
    Ok(compose_witness(&step, cylinder)?.renamed(&format!("strengthen({})", w.name)))
}

// ---------------------------------------------------------------- parallelization

/// Tuple whose `n`-th row is `row(n)`, keeping a row cycle when one is known.
pub(crate) fn structured_rows(
    cycle: Option<RowCycle>,
    row: impl Fn(u64) -> problems::Result<Point> + Send + Sync + 'static,
) -> problems::Result<Point> {
    match cycle {
        Some(c) => Ok(Point::cyclic_rows(c, c.representatives().map(&row).collect::<problems::Result<_>>()?)),
        None => Ok(Point::lazy_rows("rows", move |n| row(n).unwrap_or_else(|_| Point::zeros()))),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// A machine producing a tuple row by row.
fn tuple_machine(name: &str, layout: Layout, rows: impl Fn(&[u64], u64) -> Word + Send + Sync + 'static) -> Machine {
    Machine::new(name, move |w, fuel| {
        fuel.tick(w.len() as u64);
        layout.write_rows(|n| rows(w, n), cap(w))
    })
}

/// Machine that copies input cells, output cell `i` read from `source(i)`.
fn reindex(name: &str, source: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Machine {
    Machine::from_symbols(name, move |w, i| w.get(source(i) as usize).copied())
}

/// `f ≤sW f̂` with `K(p) = ⟨p,p,…⟩`, `H = π₀`.
pub fn parallel_extensive(f: Problem) -> Witness {
    let name = format!("extensive({f})");
    let k = Translator::new(
        Machine::new("⟨p,p,…⟩", |w, _| tuple_from_rows(|_| w.to_vec(), cap(w))),
        |p| Ok(Point::repeat_rows(p.clone())),
    );
    let layout = Layout::of(&f);
    let h = Machine::new("π₀", move |w, _| layout.read_row(w, 0));
    Witness::new(&name, f.clone(), Problem::parallel(f), k, h, true)
}

/// `f ≤ g` gives `f̂ ≤ ĝ`: `K` row-wise, and `H` row-wise after the re-tupling `L`.
pub fn parallelize_witness(w: &Witness) -> Witness {
    let name = format!("parallel({})", w.name);
    let (lf, lg) = (Layout::of(&w.f), Layout::of(&w.g));
    let kx = w.k.exact.clone();
    let k = Translator::new(Machine::countable_tuple(Default::default(), w.k.machine.clone()), move |p| {
        let kx = kx.clone();
        Ok(p.map_rows(move |r| kx(r).map_err(|e| crate::baire::BaireError::UnsupportedShape(e.to_string())))?)
    });
    let h0 = w.h.clone();
    let h = if w.strong {
        tuple_machine("H̄", lf, move |w, n| eval_fresh(&h0, &lg.read_row(w, n)))
    } else {
        tuple_machine("H̄L", lf, move |w, n| {
            let (x, y) = unpair_word(w);
            eval_fresh(&h0, &pair_words(&row_of_word(&x, n), &lg.read_row(&y, n)))
        })
    };
    Witness::new(&name, Problem::parallel(w.f.clone()), Problem::parallel(w.g.clone()), k, h, w.strong)
}

/// `f̂̂ ≤sW f̂` by flattening the double tuple.
pub fn parallel_idem(f: Problem) -> Witness {
    let name = format!("parallel_idem({f})");
    let k = Translator::new(
        reindex("flatten", |t| {
            let (n, k) = decode(t);
            let (i, j) = decode(n);
            encode(i, encode(j, k))
        }),
        |p| {
            let p = p.clone();
            structured_rows(None, move |n| {
                let (i, j) = decode(n);
                Ok(p.row(i)?.row(j)?)
            })
        },
    );
    let h = match Layout::of(&f) {
        Layout::Flat => Machine::identity(),
        Layout::Tuple => reindex("unflatten", |t| {
            let (i, m) = decode(t);
            let (j, k) = decode(m);
            encode(encode(i, j), k)
        }),
    };
    let ff = Problem::parallel(Problem::parallel(f.clone()));
    Witness::new(&name, ff, Problem::parallel(f), k, h, true)
}

fn merge_rows(a: &Point, b: &Point) -> problems::Result<Point> {
    let cycle = match (a.row_cycle(), b.row_cycle()) {
        (Ok(x), Ok(y)) => Some(RowCycle {
            base: 2 * x.base.max(y.base),
            cycle: 2 * lcm(x.cycle, y.cycle),
        }),
        _ => None,
    };
    let (a, b) = (a.clone(), b.clone());
    structured_rows(cycle, move |n| Ok(if n % 2 == 0 { a.row(n / 2)? } else { b.row(n / 2)? }))
}

fn parity_rows(p: &Point, parity: u64) -> problems::Result<Point> {
    let cycle = p.row_cycle().ok().map(|c| RowCycle {
        base: c.base.div_ceil(2) + 1,
        cycle: c.cycle,
    });
    let p = p.clone();
    structured_rows(cycle, move |n| Ok(p.row(2 * n + parity)?))
}

/// `f̂×f̂ ≡sW f̂` through the even/odd merge.
pub fn parallel_absorb(f: Problem) -> (Witness, Witness) {
    let fh = Problem::parallel(f.clone());
    let ff = Problem::product(fh.clone(), fh.clone());
    let merge = Translator::new(
        Machine::from_symbols("merge", |w, t| {
            let (n, k) = decode(t);
            let src = 2 * encode(n / 2, k) + n % 2;
            w.get(src as usize).copied()
        }),
        |p| {
            let (a, b) = p.split_pair();
            merge_rows(&a, &b)
        },
    );
    let split = Translator::new(
        Machine::from_symbols("split", |w, t| {
            let (n, k) = decode(t / 2);
            w.get(encode(2 * n + t % 2, k) as usize).copied()
        }),
        |p| Ok(Point::pair(parity_rows(p, 0)?, parity_rows(p, 1)?)),
    );
    let (h_fwd, h_back) = match Layout::of(&f) {
        Layout::Flat => (Machine::identity(), Machine::identity()),
        Layout::Tuple => (split.machine.clone(), merge.machine.clone()),
    };
    (
        Witness::new(&format!("absorb({f})"), ff.clone(), fh.clone(), merge, h_fwd, true),
        Witness::new(&format!("absorb⁻¹({f})"), fh, ff, split, h_back, true),
    )
}

fn zip_rows(a: &Point, b: &Point) -> problems::Result<Point> {
    let cycle = match (a.row_cycle(), b.row_cycle()) {
        (Ok(x), Ok(y)) => Some(RowCycle {
            base: x.base.max(y.base),
            cycle: lcm(x.cycle, y.cycle),
        }),
        _ => None,
    };
    let (a, b) = (a.clone(), b.clone());
    structured_rows(cycle, move |n| Ok(Point::pair(a.row(n)?, b.row(n)?)))
}

fn unzip_rows(t: &Point, side: u8) -> problems::Result<Point> {
    let cycle = t.row_cycle().ok();
    let t = t.clone();
    structured_rows(cycle, move |n| {
        let (a, b) = t.row(n)?.split_pair();
        Ok(if side == 1 { a } else { b })
    })
}

/// `(f×g)^ ≡sW f̂×ĝ` through the computable homeomorphism of tuples.
pub fn parallel_product(f: Problem, g: Problem) -> (Witness, Witness) {
    let (lf, lg) = (Layout::of(&f), Layout::of(&g));
    let fg = Problem::parallel(Problem::product(f.clone(), g.clone()));
    let fxg = Problem::product(Problem::parallel(f.clone()), Problem::parallel(g.clone()));
    let unzip = Translator::new(
        Machine::from_symbols("unzip", |w, t| {
            let (n, k) = decode(t / 2);
            w.get(encode(n, 2 * k + t % 2) as usize).copied()
        }),
        |p| Ok(Point::pair(unzip_rows(p, 1)?, unzip_rows(p, 2)?)),
    );
    let zip = Translator::new(
        Machine::from_symbols("zip", |w, t| {
            let (n, k) = decode(t);
            w.get((2 * encode(n, k / 2) + k % 2) as usize).copied()
        }),
        |p| {
            let (a, b) = p.split_pair();
            zip_rows(&a, &b)
        },
    );
    let zip_answers = tuple_machine("zip", Layout::Tuple, move |w, n| {
        let (a, b) = unpair_word(w);
        pair_words(&lf.read_row(&a, n), &lg.read_row(&b, n))
    });
    let unzip_answers = Machine::new("unzip", move |w, _| {
        let a = lf.write_rows(|n| unpair_word(&row_of_word(w, n)).0, cap(w));
        let b = lg.write_rows(|n| unpair_word(&row_of_word(w, n)).1, cap(w));
        pair_words(&a, &b)
    });
    (
        Witness::new(&format!("parallel_product({f},{g})"), fg.clone(), fxg.clone(), unzip, zip_answers, true),
        Witness::new(&format!("parallel_product⁻¹({f},{g})"), fxg, fg, zip, unzip_answers, true),
    )
}

/// `(f̂⊕ĝ)^ ≤sW f̂⊕ĝ`: one call answers every row with the same side.
pub fn parallel_sum(f: Problem, g: Problem) -> Witness {
    let (lf, lg) = (Layout::of(&f), Layout::of(&g));
    let inner = Problem::sum(Problem::parallel(f.clone()), Problem::parallel(g.clone()));
    let k = Translator::new(
        Machine::from_symbols("h'", |w, t| {
            let (n, m) = decode(t / 2);
            let (i, j) = decode(n);
            w.get(encode(j, 2 * encode(i, m) + t % 2) as usize).copied()
        }),
        |p| {
            let side = |s: u8| {
                let p = p.clone();
                structured_rows(None, move |n| {
                    let (i, j) = decode(n);
                    let (x, u) = p.row(j)?.split_pair();
                    Ok(if s == 1 { x } else { u }.row(i)?)
                })
            };
            Ok(Point::pair(side(1)?, side(2)?))
        },
    );
    let h = tuple_machine("h", Layout::Tuple, move |w, j| match w.split_first() {
        None => vec![],
        Some((&tag, z)) => {
            let l = if tag == 0 { lf } else { lg };
            tagged(tag, l.write_rows(|i| l.read_row(z, encode(i, j)), cap(z)))
        }
    });
    Witness::new(&format!("parallel_sum({f},{g})"), Problem::parallel(inner.clone()), inner, k, h, true)
}
