//! Witnesses transcribed from explicit proofs, and the registry with their corpora.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::Rng;

use crate::baire::{decode, encode, Point, Word};
use crate::machine::Machine;
use crate::problems::{ComputableFn, Problem, ProblemError};
use crate::spaces::{decode_dyadic, Dyadic};

use super::algebra::{compose_witness, parallel_absorb, product_witness, refl_strong};
use super::{nat_output, pointwise, Result, Translator, Witness};

/// `LLPO ≤sW LPO` with `K(p)(n) = 1 ∸ p(2n)` and `H` negating the answer.
pub fn llpo_to_lpo() -> Witness {
    let k = Translator::new(
        Machine::from_symbols("1∸p(2n)", |w, n| w.get(2 * n as usize).map(|&v| (v == 0) as u64)),
        |p| Ok(p.subsequence(2, 0).map_values(|v| (v == 0) as u64)),
    );
    let h = pointwise("1∸", |v| (v == 0) as u64);
    Witness::new("llpo_to_lpo", Problem::Llpo, Problem::Lpo, k, h, true)
}

/// `q⟨k,m⟩` is zero-containing exactly when `p(k) = m`; the answer is read back by a min-search.
fn min_search(name: &str) -> Machine {
    Machine::from_symbols(name, |w, k| {
        (0..)
            .map(|m| encode(k, m) as usize)
            .take_while(|&i| i < w.len())
            .position(|i| w[i] == 0)
            .map(|m| m as u64)
    })
}

/// `id ≤sW C`: row `⟨k,m⟩` is `0^ω` if `p(k) = m`, else `1^ω`.
pub fn id_to_c() -> Witness {
    let k = Translator::new(
        Machine::from_symbols("K", |w, t| {
            let (k, m) = decode(decode(t).0);
            w.get(k as usize).map(|&v| (v != m) as u64)
        }),
        |p| {
            let p = p.clone();
            Ok(Point::lazy_rows("K(p)", move |n| {
                let (k, m) = decode(n);
                if p.value_at(k) == m {
                    Point::zeros()
                } else {
                    Point::ones()
                }
            }))
        },
    );
    Witness::new("id_to_c", Problem::Identity, Problem::c(), k, min_search("min{m: q⟨k,m⟩=0}"), true)
}

/// `id ≤sW LLPÔ`: row `⟨k,m⟩` is `010^ω` if `p(k) = m` (forcing answer 0), else `10^ω`.
pub fn id_to_llpo_hat() -> Witness {
    let hit = Point::evp(vec![0, 1], vec![0]);
    let miss = Point::evp(vec![1], vec![0]);
    let (h2, m2) = (hit.clone(), miss.clone());
    let k = Translator::new(
        Machine::from_symbols("K'", move |w, t| {
            let (n, j) = decode(t);
            let (k, m) = decode(n);
            w.get(k as usize).map(|&v| if v == m { h2.value_at(j) } else { m2.value_at(j) })
        }),
        move |p| {
            let (p, hit, miss) = (p.clone(), hit.clone(), miss.clone());
            Ok(Point::lazy_rows("K'(p)", move |n| {
                let (k, m) = decode(n);
                if p.value_at(k) == m {
                    hit.clone()
                } else {
                    miss.clone()
                }
            }))
        },
    );
    Witness::new("id_to_llpo_hat", Problem::Identity, Problem::llpo_hat(), k, min_search("min{m: q⟨k,m⟩=0}"), true)
}

/// `F(p)⟨k, 2⟨n,m⟩+i⟩ = p⟨⟨k,2n+i⟩, 2m⟩`.
fn square_source(t: u64) -> u64 {
    let (k, j) = decode(t);
    let (n, m) = decode(j / 2);
    encode(encode(k, 2 * n + j % 2), 2 * m)
}

/// Exact `F` on row tuples whose default row vanishes on even positions.
fn square_exact(p: &Point) -> crate::problems::Result<Point> {
    let Point::RowTuple { rows, default } = p else {
        return Err(ProblemError::Unsupported(format!("{p} is not a row tuple")));
    };
    if !default.all_zero_on_progression(2, 0)? {
        return Err(ProblemError::Unsupported(format!("default row of {p} is nonzero on an even position")));
    }
    let mut cells: BTreeMap<u64, BTreeMap<u64, u64>> = BTreeMap::new();
    for (&idx, row) in rows {
        let (k, j) = decode(idx);
        cells.entry(k).or_default();
        if let Some(pos) = row.first_index_where(&|v| v != 0)? {
            if pos % 2 == 0 {
                let at = 2 * encode(j / 2, pos / 2) + j % 2;
                cells.entry(k).or_default().insert(at, row.value_at(pos));
            }
        }
    }
    let rows = cells
        .into_iter()
        .map(|(k, c)| {
            let len = c.keys().next_back().map_or(0, |&m| m + 1);
            let head: Word = (0..len).map(|i| c.get(&i).copied().unwrap_or(0)).collect();
            (k, Point::evp(head, vec![0]))
        })
        .collect();
    Ok(Point::rows(rows, Point::zeros()))
}

/// `LLPÔ∘LLPÔ ≤sW LLPÔ` with the re-indexing `F` and `H = id`.
pub fn llpo_hat_squared() -> Witness {
    let k = Translator::new(
        Machine::from_symbols("F", |w, t| w.get(square_source(t) as usize).copied()),
        square_exact,
    );
    let f = Problem::compose(Problem::llpo_hat(), Problem::llpo_hat());
    Witness::new("llpo_hat_squared", f, Problem::llpo_hat(), k, Machine::identity(), true)
}

fn signed_power(i: u64, even: bool) -> Dyadic {
    Dyadic::new(if even { 1 } else { -1 }, i as u32)
}

/// `LLPO ≤sW LLPO_ℝ`: a nonzero at `2i` or `2i+1` becomes `±2^{-i}`.
pub fn llpo_to_llpo_r() -> Witness {
    let k = Translator::new(
        Machine::from_symbols("x", |w, n| {
            let need = 2 * n as usize + 2;
            if w.len() < need {
                return None;
            }
            Some(match w[..need].iter().position(|&v| v != 0) {
                Some(j) => signed_power(j as u64 / 2, j % 2 == 0).code(),
                None => Dyadic::zero().code(),
            })
        }),
        |p| {
            let zero = Dyadic::zero().code();
            Ok(match p.first_index_where(&|v| v != 0)? {
                Some(j) => Point::evp(vec![zero; (j / 2) as usize], vec![signed_power(j / 2, j % 2 == 0).code()]),
                None => Point::constant(zero),
            })
        },
    );
    Witness::new("llpo_to_llpo_r", Problem::Llpo, Problem::LlpoReal, k, Machine::identity(), true)
}

/// Stage at which the sign of the named real is first verified: `Some((s, positive))`.
fn sign_stage(codes: impl Iterator<Item = u64>) -> Option<(u64, bool)> {
    for (s, c) in codes.enumerate() {
        let s = s as u32;
        let d = Dyadic::from_code(c)?;
        if d.shifted_sign(-1, s) > 0 {
            return Some((s as u64, true));
        }
        if d.shifted_sign(1, s) < 0 {
            return Some((s as u64, false));
        }
    }
    None
}

/// `0^{2s}10^ω` when `x > 0` is verified at stage `s`, `0^{2s+1}10^ω` when `x < 0` is.
fn stage_symbol(stage: Option<(u64, bool)>, i: u64) -> u64 {
    match stage {
        Some((s, pos)) => (i == 2 * s + (!pos) as u64) as u64,
        None => 0,
    }
}

/// `LLPO_ℝ ≤sW LLPO` by the stage search on the name.
pub fn llpo_r_to_llpo() -> Witness {
    let k = Translator::new(
        Machine::from_symbols("stage search", |w, i| {
            let stages = i as usize / 2 + 1;
            (w.len() >= stages).then(|| stage_symbol(sign_stage(w[..stages].iter().copied()), i))
        }),
        |p| {
            let x = decode_dyadic(p)?;
            let horizon = p.normalize().map_or(0, |q| match q {
                Point::EvPeriodic { head, .. } => head.len() as u64,
                _ => 0,
            }) + x.exponent() as u64
                + 2;
            let stage = sign_stage((0..horizon.min(100)).map(|s| p.value_at(s)));
            Ok(match stage {
                Some((s, pos)) => {
                    let at = 2 * s + (!pos) as u64;
                    let mut head = vec![0; at as usize];
                    head.push(1);
                    Point::evp(head, vec![0])
                }
                None => Point::zeros(),
            })
        },
    );
    Witness::new("llpo_r_to_llpo", Problem::LlpoReal, Problem::Llpo, k, Machine::identity(), true)
}

/// Transport along representation changes: `H' = R H (Q ⊗ T)` and `K' = S K Q`
/// (for strong witnesses, `H' = R H T`).
pub fn repr_transport(
    w: &Witness,
    f: Problem,
    g: Problem,
    q: &Translator,
    r: &Machine,
    s: &Translator,
    t: &Machine,
) -> Witness {
    let k = Translator::compose(s, &Translator::compose(&w.k, q));
    let h = if w.strong {
        Machine::compose(r.clone(), Machine::compose(w.h.clone(), t.clone()))
    } else {
        Machine::compose(
            r.clone(),
            Machine::compose(w.h.clone(), Machine::tensor(q.machine.clone(), t.clone())),
        )
    };
    Witness::new(&format!("transport({})", w.name), f, g, k, h, w.strong)
}

/// The transport for names padded with one leading symbol.
pub fn pad_transport(w: &Witness) -> Witness {
    repr_transport(
        w,
        Problem::padded(w.f.clone()),
        Problem::padded(w.g.clone()),
        &Translator::shift_left(),
        &Machine::inject(0),
        &Translator::inject(0),
        &Machine::shift_left(),
    )
}

/// Witness data for a discontinuity: `q_n → q`, with every answer at `q`
/// starting with `w` and no answer at any `q_n` doing so.
#[derive(Clone)]
pub struct Discontinuity {
    pub f: Problem,
    pub q: Point,
    pub family: Arc<dyn Fn(u64) -> Point + Send + Sync>,
    /// `q_n` agrees with `q` on the first `agreement(n)` symbols; nondecreasing.
    pub agreement: Arc<dyn Fn(u64) -> usize + Send + Sync>,
    pub w: Word,
}

/// `LPO ≤sW F` from a discontinuity: `K(p) = q_n` for the least zero `n` of `p`, else `q`.
pub fn lpo_from_discontinuity(d: &Discontinuity) -> Witness {
    let (q, family, agreement) = (d.q.clone(), d.family.clone(), d.agreement.clone());
    let machine = {
        let (q, family, agreement) = (q.clone(), family.clone(), agreement.clone());
        Machine::new("K", move |u, _| match u.iter().position(|&v| v == 0) {
            Some(n) => family(n as u64).prefix(agreement(u.len() as u64).max(u.len() + 1)),
            None => q.prefix(agreement(u.len() as u64)),
        })
    };
    let k = Translator::new(machine, move |p| {
        Ok(match p.min_zero()? {
            Some(n) => family(n),
            None => q.clone(),
        })
    });
    let w = d.w.clone();
    let h = nat_output("χ_w", move |ans| (ans.len() >= w.len()).then(|| (ans[..w.len()] == w[..]) as u64));
    Witness::new(&format!("lpo_from_discontinuity({})", d.f), Problem::Lpo, d.f.clone(), k, h, true)
}

/// `C` is discontinuous at `1^ω`: `q_n` puts a zero at the end of row 0.
pub fn c_discontinuity() -> Discontinuity {
    Discontinuity {
        f: Problem::c(),
        q: Point::ones(),
        family: Arc::new(|n| {
            let mut head = vec![1; n as usize];
            head.push(0);
            Point::rows(BTreeMap::from([(0, Point::evp(head, vec![1]))]), Point::ones())
        }),
        agreement: Arc::new(|n| encode(0, n) as usize),
        w: vec![1],
    }
}

/// `LPO` is discontinuous at `1^ω`: `q_n = 1^n 0 1^ω`.
pub fn lpo_discontinuity() -> Discontinuity {
    Discontinuity {
        f: Problem::Lpo,
        q: Point::ones(),
        family: Arc::new(|n| {
            let mut head = vec![1; n as usize];
            head.push(0);
            Point::evp(head, vec![1])
        }),
        agreement: Arc::new(|n| n as usize),
        w: vec![1],
    }
}

/// `f ≤W g` for computable `f` and any `g` with a point `q` in its domain:
/// `K(p) = q`, `H⟨p, r⟩ = f(p)`.
pub fn least_degree(f: ComputableFn, g: Problem, q: Point) -> Witness {
    let name = format!("least_degree({},{g})", f.name);
    let h = Machine::compose(f.machine.clone(), Machine::proj1());
    Witness::new(&name, Problem::Computable(f), g, Translator::constant(q), h, false)
}

/// `id×C ≤sW C`.
pub fn c_cylinder() -> Result<Witness> {
    let w = product_witness(&id_to_c(), &refl_strong(Problem::c()));
    Ok(compose_witness(&w, &parallel_absorb(Problem::Lpo).0)?.renamed("c_cylinder"))
}

/// `id×LLPÔ ≤sW LLPÔ`.
pub fn llpo_hat_cylinder() -> Result<Witness> {
    let w = product_witness(&id_to_llpo_hat(), &refl_strong(Problem::llpo_hat()));
    Ok(compose_witness(&w, &parallel_absorb(Problem::Llpo).0)?.renamed("llpo_hat_cylinder"))
}

// ---------------------------------------------------------------- corpora

/// Random in-domain inputs for a witness.
pub type CorpusGen = Arc<dyn Fn(&mut StdRng, usize) -> Vec<Point> + Send + Sync>;

#[derive(Clone)]
pub struct Entry {
    pub witness: Witness,
    pub corpus: CorpusGen,
    /// Behavior cap overriding the checker default for this entry.
    pub behavior_cap: Option<u128>,
}

impl Entry {
    pub fn new(witness: Witness, corpus: impl Fn(&mut StdRng) -> Point + Send + Sync + 'static) -> Self {
        Entry {
            witness,
            corpus: Arc::new(move |rng, n| (0..n).map(|_| corpus(rng)).collect()),
            behavior_cap: None,
        }
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.behavior_cap = Some(cap);
        self
    }

    pub fn name(&self) -> &str {
        &self.witness.name
    }
}

pub mod gen {
    //! Generators of finitely presented inputs.

    use super::*;

    fn word(rng: &mut StdRng, max_len: usize, max_val: u64) -> Word {
        let n = rng.gen_range(0..=max_len);
        (0..n).map(|_| rng.gen_range(0..=max_val)).collect()
    }

    /// Any point with small entries.
    pub fn nat_point(rng: &mut StdRng) -> Point {
        let head = word(rng, 5, 3);
        let mut period = word(rng, 2, 3);
        period.push(rng.gen_range(0..=3));
        Point::evp(head, period)
    }

    /// Inputs to `LPO`; about half of them contain a zero.
    pub fn lpo_point(rng: &mut StdRng) -> Point {
        let head: Word = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(1..4)).collect();
        if rng.gen_bool(0.5) {
            let mut h = head;
            h.push(0);
            Point::evp(h, vec![rng.gen_range(0..3)])
        } else {
            Point::evp(head, vec![rng.gen_range(1..3)])
        }
    }

    /// Inputs to `LLPO`: at most one nonzero entry.
    pub fn llpo_point(rng: &mut StdRng) -> Point {
        if rng.gen_bool(0.2) {
            return Point::zeros();
        }
        let mut head = vec![0; rng.gen_range(0..10)];
        head.push(rng.gen_range(1..6));
        Point::evp(head, vec![0])
    }

    /// An `LLPO` input whose nonzero entry, if any, sits at an odd position.
    pub fn llpo_point_odd(rng: &mut StdRng) -> Point {
        let mut head = vec![0; 2 * rng.gen_range(0..5) + 1];
        head.push(rng.gen_range(1..6));
        Point::evp(head, vec![0])
    }

    /// A tuple with a few exceptional rows.
    pub fn tuple_of(rng: &mut StdRng, row: impl Fn(&mut StdRng) -> Point) -> Point {
        let mut rows = BTreeMap::new();
        for _ in 0..rng.gen_range(0..4) {
            let n = rng.gen_range(0..8);
            rows.insert(n, row(rng));
        }
        Point::rows(rows, row(rng))
    }

    pub fn c_input(rng: &mut StdRng) -> Point {
        tuple_of(rng, lpo_point)
    }

    pub fn llpo_hat_input(rng: &mut StdRng) -> Point {
        tuple_of(rng, llpo_point)
    }

    /// Inputs to `LLPÔ∘LLPÔ`: every inner answer row has at most one forced 1.
    pub fn llpo_hat_squared_input(rng: &mut StdRng) -> Point {
        loop {
            let mut rows = BTreeMap::new();
            for _ in 0..rng.gen_range(0..4) {
                let k = rng.gen_range(0..3);
                let j = rng.gen_range(0..4);
                rows.insert(encode(k, j), llpo_point(rng));
            }
            let p = Point::rows(rows, llpo_point_odd(rng));
            if Problem::compose(Problem::llpo_hat(), Problem::llpo_hat()).in_domain(&p).unwrap_or(false) {
                return p;
            }
        }
    }

    pub fn dyadic(rng: &mut StdRng) -> Dyadic {
        if rng.gen_bool(0.2) {
            return Dyadic::zero();
        }
        Dyadic::new(rng.gen_range(-8..=8), rng.gen_range(0..5))
    }

    /// A name of a dyadic with a perturbed head of genuine approximations.
    pub fn dyadic_name(rng: &mut StdRng) -> Point {
        let x = dyadic(rng);
        let head: Word = (0..rng.gen_range(0..6u32))
            .map(|n| {
                let scaled = (x.numerator() as f64) * 2f64.powi(n as i32 - x.exponent() as i32);
                let base = scaled.round() as i64;
                (-1..=1)
                    .map(|d| Dyadic::new(base + d, n))
                    .filter(|c| x.within(c, n))
                    .nth(rng.gen_range(0..2))
                    .unwrap_or(x)
                    .code()
            })
            .collect();
        Point::evp(head, vec![x.code()])
    }

    pub fn pair(rng: &mut StdRng, a: impl Fn(&mut StdRng) -> Point, b: impl Fn(&mut StdRng) -> Point) -> Point {
        let x = a(rng);
        Point::pair(x, b(rng))
    }
}

/// The named witnesses of the explicit proofs, with corpus generators.
pub fn named_witnesses() -> Vec<Entry> {
    use gen::*;
    let mut out = vec![
        Entry::new(llpo_to_lpo(), llpo_point),
        Entry::new(id_to_c(), nat_point),
        Entry::new(id_to_llpo_hat(), nat_point),
        Entry::new(llpo_hat_squared(), llpo_hat_squared_input),
        Entry::new(llpo_to_llpo_r(), llpo_point),
        Entry::new(llpo_r_to_llpo(), dyadic_name),
        Entry::new(pad_transport(&llpo_to_lpo()), |rng| llpo_point(rng).prepend(rng.gen_range(0..4))),
        Entry::new(lpo_from_discontinuity(&lpo_discontinuity()), lpo_point),
        Entry::new(lpo_from_discontinuity(&c_discontinuity()), lpo_point),
        Entry::new(least_degree(ComputableFn::identity(), Problem::Llpo, Point::zeros()), nat_point),
    ];
    if let Ok(w) = c_cylinder() {
        out.push(Entry::new(w, |rng| pair(rng, nat_point, c_input)));
    }
    if let Ok(w) = llpo_hat_cylinder() {
        out.push(Entry::new(w, |rng| pair(rng, nat_point, llpo_hat_input)));
    }
    if let Ok(w) = compose_witness(&llpo_r_to_llpo(), &llpo_to_lpo()) {
        out.push(Entry::new(w, dyadic_name));
    }
    out
}
