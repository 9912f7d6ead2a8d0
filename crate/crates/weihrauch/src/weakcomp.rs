//! Weak computability below `LLPÔ`.
//!
//! `LLPÔ(p)` is a compact set known by negative information; a machine `F`
//! restricted to it has a computable modulus, so each output bit is a finite
//! Boolean function of the answer. Realizing the ternary extensions of those
//! functions gives `G` with `F∘LLPÔ(p) = LLPÔ∘G(p)`, which is what makes the
//! problems below `LLPÔ` closed under composition. Compact choice on Cantor
//! space is routed through `WKL`.

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::Rng;

use crate::baire::{encode, is_prefix, BaireError, Point, Word};
use crate::machine::{tuple_from_rows, Machine};
use crate::problems::{self, Problem, ProblemError};
use crate::spaces::{
    decode_clopen, encode_clopen, encode_ternary, tree_point, word_at, words_of_len, ClopenCompact, SpaceError,
    Ternary, Tree, CLOPEN_DEPTH_CAP,
};
use crate::ternary::{synthesize, NandCircuit, TernaryError, TruthTable, ARITY_CAP};
use crate::witnesses::algebra::{compose_witness, parallel_extensive, refl_strong, strengthen_on_cylinder};
use crate::witnesses::named::{gen, llpo_hat_cylinder, llpo_hat_squared, Entry};
use crate::witnesses::{pointwise, Translator, Witness, WitnessError};
use crate::wkl::{llpo_hat_to_wkl, wkl_to_llpo_hat, WKL_CAP};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeakError {
    #[error("not representable: {0}")]
    NonRepresentable(String),
    #[error("fuel exhausted: {0}")]
    FuelExhausted(String),
    #[error(transparent)]
    Ternary(#[from] TernaryError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

impl From<BaireError> for WeakError {
    fn from(e: BaireError) -> Self {
        WeakError::Problem(e.into())
    }
}

impl From<SpaceError> for WeakError {
    fn from(e: SpaceError) -> Self {
        WeakError::Problem(e.into())
    }
}

impl From<WeakError> for ProblemError {
    fn from(e: WeakError) -> Self {
        match e {
            WeakError::Problem(e) => e,
            WeakError::FuelExhausted(m) => ProblemError::CapacityExceeded(m),
            other => ProblemError::Unsupported(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, WeakError>;

/// Longest admitted words tried when searching a modulus.
pub const MODULUS_LEN_CAP: usize = 14;

/// Output coordinates handled by [`weak_compose`].
pub const DEFAULT_HORIZON: usize = 8;

fn spike(at: usize) -> Point {
    let mut head = vec![0; at];
    head.push(1);
    Point::evp(head, vec![0])
}

/// Rows of an `LLPÔ` instance with a nonzero entry, as `(row, position)`.
/// The bit forbidden at that row is the parity of the position.
fn forced_rows(p: &Point) -> Result<Vec<(u64, u64)>> {
    let cycle = p.row_cycle().map_err(|e| WeakError::NonRepresentable(format!("{p}: {e}")))?;
    let mut out = vec![];
    for r in cycle.representatives() {
        if let Some(pos) = p.row(r)?.min_nonzero()? {
            if r >= cycle.base {
                return Err(WeakError::NonRepresentable(format!(
                    "rows {r} + {}ℕ of {p} all force an answer",
                    cycle.cycle
                )));
            }
            out.push((r, pos));
        }
    }
    Ok(out)
}

/// `LLPÔ(p)` as a clopen compact: a row forcing its answer excludes
/// `{0,1}^i b` for the forbidden bit `b`.
pub fn compact_image(p: &Point) -> Result<ClopenCompact> {
    if !Problem::llpo_hat().in_domain(p)? {
        return Err(ProblemError::OutOfDomain(format!("{p} ∉ dom(LLPÔ)")).into());
    }
    let mut excluded = vec![];
    for (m, pos) in forced_rows(p)? {
        if m as usize >= CLOPEN_DEPTH_CAP {
            return Err(WeakError::NonRepresentable(format!(
                "row {m} of {p} forces a bit beyond the depth cap {CLOPEN_DEPTH_CAP}"
            )));
        }
        excluded.extend(words_of_len(m as usize).map(|mut w| {
            w.push(pos % 2);
            w
        }));
    }
    Ok(ClopenCompact::new(excluded)?)
}

/// Outputs of a machine on the words a compact admits, grouped by length.
struct Image<'a> {
    m: &'a Machine,
    k: &'a ClopenCompact,
    by_len: Vec<Vec<(Word, Word)>>,
}

impl<'a> Image<'a> {
    fn new(m: &'a Machine, k: &'a ClopenCompact) -> Self {
        Image { m, k, by_len: vec![] }
    }

    fn at(&mut self, len: usize) -> &[(Word, Word)] {
        while self.by_len.len() <= len {
            let l = self.by_len.len();
            let outs = self.k.admitted_words(l).into_iter().map(|w| (w.clone(), self.m.eval_word(&w))).collect();
            self.by_len.push(outs);
        }
        &self.by_len[len]
    }

    fn modulus(&mut self, n: usize) -> Result<usize> {
        for len in 0..=MODULUS_LEN_CAP {
            if self.at(len).iter().all(|(_, out)| out.len() >= n) {
                return Ok(len);
            }
        }
        Err(WeakError::FuelExhausted(format!(
            "{} gives fewer than {n} symbols on some word of length {MODULUS_LEN_CAP} admitted by {}",
            self.m.name(),
            self.k
        )))
    }
}

/// Least `k` such that every word of length `k` admitted by `K` yields `n` output symbols.
/// An empty compact has modulus 0.
pub fn modulus(m: &Machine, k: &ClopenCompact, n: usize) -> Result<usize> {
    Image::new(m, k).modulus(n)
}

/// Output bit `n` of a machine on a compact, as a function of the first `arities[n]` input bits.
#[derive(Debug, Clone)]
pub struct TruthTableFamily {
    pub compact: ClopenCompact,
    pub arities: Vec<usize>,
    pub tables: Vec<TruthTable>,
}

/// Tables of the first `depth` output bits; arity `max(1, modulus(n+1))`.
/// Words the compact excludes get 0.
pub fn extract_tables(m: &Machine, k: &ClopenCompact, depth: usize) -> Result<TruthTableFamily> {
    let mut image = Image::new(m, k);
    let (mut arities, mut tables) = (vec![], vec![]);
    for n in 0..depth {
        let a = image.modulus(n + 1)?.max(1);
        if a > ARITY_CAP {
            return Err(TernaryError::ArityCap(a).into());
        }
        let bits: BTreeMap<Word, bool> = image.at(a).iter().map(|(w, out)| (w.clone(), out[n] != 0)).collect();
        let table = TruthTable::from_fn(a, |x| {
            let w: Word = x.iter().map(|&b| b as u64).collect();
            bits.get(&w).copied().unwrap_or(false)
        })?;
        arities.push(a);
        tables.push(table);
    }
    Ok(TruthTableFamily {
        compact: k.clone(),
        arities,
        tables,
    })
}

/// Exact output of a circuit realizer on the rows of `p`.
fn realize_row(c: &NandCircuit, p: &Point) -> problems::Result<Point> {
    // constants put their nonzero at 0 or 1; each gate moves it at most one place
    let mut reach = 2;
    for i in 0..c.arity() as u64 {
        if let Some(k) = p.row(i)?.min_nonzero()? {
            reach = reach.max(k as usize + 1);
        }
    }
    let len = (reach + c.gates().len() + 2) as u64;
    let prefix = p.prefix(encode(c.arity() as u64 - 1, len - 1) as usize + 1);
    let out = c.realizer().eval_word(&prefix);
    Ok(match out.iter().position(|&v| v != 0) {
        Some(at) => spike(at),
        None => Point::zeros(),
    })
}

/// `G⟨p₀,p₁,…⟩ = ⟨G₀⟨p₀,…⟩, G₁⟨p₀,…⟩, …⟩` from circuit realizers. Rows past
/// the circuits name 0, so their `LLPO` answer is forced.
pub fn swap_translator(circuits: Vec<NandCircuit>) -> Translator {
    let realizers: Vec<Machine> = circuits.iter().map(NandCircuit::realizer).collect();
    let zero = encode_ternary(Ternary::Zero);
    let z = zero.clone();
    let machine = Machine::new("G", move |w, fuel| {
        fuel.tick(w.len() as u64);
        tuple_from_rows(
            |n| match realizers.get(n as usize) {
                Some(r) => r.eval_word(w),
                None => z.prefix(w.len()),
            },
            2 * w.len() + 16,
        )
    });
    Translator::new(machine, move |p| {
        let rows = circuits
            .iter()
            .enumerate()
            .map(|(n, c)| Ok((n as u64, realize_row(c, p)?)))
            .collect::<problems::Result<BTreeMap<_, _>>>()?;
        Ok(Point::rows(rows, zero.clone()))
    })
}

/// The swap for one instance `p`: the tables of `m` on `LLPÔ(p)`, their circuits, and `G`.
#[derive(Debug, Clone)]
pub struct Swap {
    pub family: TruthTableFamily,
    pub circuits: Vec<NandCircuit>,
    pub g: Translator,
}

impl Swap {
    pub fn depth(&self) -> usize {
        self.circuits.len()
    }

    /// `F∘LLPÔ(p)` and `LLPÔ∘G(p)`, both truncated to the swap depth.
    pub fn sides(&self, m: &Machine, p: &Point) -> Result<(BTreeSet<Word>, BTreeSet<Word>)> {
        let left = image_prefixes(m, &self.family.compact, self.depth())?;
        let right = answer_prefixes(&self.g.apply(p)?, self.depth())?;
        Ok((left, right))
    }
}

pub fn llpo_swap(m: &Machine, p: &Point, depth: usize) -> Result<Swap> {
    let k = compact_image(p)?;
    let family = extract_tables(m, &k, depth)?;
    let circuits = family.tables.iter().map(synthesize).collect::<std::result::Result<Vec<_>, _>>()?;
    let g = swap_translator(circuits.clone());
    Ok(Swap { family, circuits, g })
}

/// `{F(q)[depth] : q ∈ K}`, output symbols read as bits.
pub fn image_prefixes(m: &Machine, k: &ClopenCompact, depth: usize) -> Result<BTreeSet<Word>> {
    let mut image = Image::new(m, k);
    let a = image.modulus(depth)?;
    Ok(image
        .at(a)
        .iter()
        .map(|(_, out)| out[..depth].iter().map(|&v| (v != 0) as u64).collect())
        .collect())
}

/// `LLPÔ(q)` truncated to `depth` coordinates.
pub fn answer_prefixes(q: &Point, depth: usize) -> Result<BTreeSet<Word>> {
    let mut out = BTreeSet::from([vec![]]);
    for n in 0..depth as u64 {
        let allowed = problems::llpo(&q.row(n)?)?;
        out = out
            .iter()
            .flat_map(|w| {
                allowed.iter().map(move |&b| {
                    let mut v = w.clone();
                    v.push(b);
                    v
                })
            })
            .collect();
    }
    Ok(out)
}

// ---------------------------------------------------------------- swap fixtures

/// Machine whose output bit `n` is `f(w, n)` once the first `reach(n)` input bits are known.
pub fn coordinate_machine(
    name: &str,
    reach: impl Fn(u64) -> usize + Send + Sync + 'static,
    f: impl Fn(&[u64], u64) -> bool + Send + Sync + 'static,
) -> Machine {
    Machine::from_symbols(name, move |w, n| (w.len() >= reach(n)).then(|| f(w, n) as u64))
}

fn bit(w: &[u64], i: u64) -> bool {
    w[i as usize] != 0
}

/// Machines whose output bits read disjoint input bits, with the depth each is swapped to.
pub fn swap_machines() -> Vec<(&'static str, Machine, usize)> {
    vec![
        ("id", coordinate_machine("id", |n| n as usize + 1, bit), 5),
        ("not", coordinate_machine("not", |n| n as usize + 1, |w, n| !bit(w, n)), 5),
        (
            "swap01",
            coordinate_machine("swap01", |n| (n as usize + 1).max(2), |w, n| bit(w, if n < 2 { 1 - n } else { n })),
            4,
        ),
        (
            "nand01",
            coordinate_machine(
                "nand01",
                |n| n as usize + 2,
                |w, n| if n == 0 { !(bit(w, 0) && bit(w, 1)) } else { bit(w, n + 1) },
            ),
            4,
        ),
        (
            "mix",
            coordinate_machine(
                "mix",
                |n| 2 * n as usize + 2,
                |w, n| match n {
                    0 => bit(w, 0) && bit(w, 1),
                    1 => bit(w, 2) || bit(w, 3),
                    _ => bit(w, 2 * n) != bit(w, 2 * n + 1),
                },
            ),
            3,
        ),
        (
            "maj012",
            coordinate_machine(
                "maj012",
                |n| n as usize + 3,
                |w, n| {
                    if n == 0 {
                        (bit(w, 0) as u8 + bit(w, 1) as u8 + bit(w, 2) as u8) >= 2
                    } else {
                        bit(w, n + 2)
                    }
                },
            ),
            4,
        ),
        ("shift2", coordinate_machine("shift2", |n| n as usize + 3, |w, n| bit(w, n + 2)), 4),
        (
            "reverse4",
            coordinate_machine("reverse4", |n| (n as usize + 1).max(4), |w, n| bit(w, if n < 4 { 3 - n } else { n })),
            4,
        ),
        (
            "xor_pairs",
            coordinate_machine("xor_pairs", |n| 2 * n as usize + 2, |w, n| bit(w, 2 * n) != bit(w, 2 * n + 1)),
            3,
        ),
        ("const1", coordinate_machine("const1", |_| 0, |_, _| true), 4),
    ]
}

/// A row forcing answer 1 (`b = 0`) or 0 (`b = 1`) with its nonzero at `2k + b`.
fn forcing_row(k: usize, b: usize) -> Point {
    spike(2 * k + b)
}

/// `LLPÔ` instances with free and forced coordinates below 6.
pub fn swap_points() -> Vec<Point> {
    let tuple = |rows: Vec<(u64, Point)>| Point::rows(rows.into_iter().collect(), Point::zeros());
    vec![
        Point::zeros(),
        tuple(vec![(0, forcing_row(0, 0)), (2, forcing_row(1, 1)), (4, forcing_row(2, 0))]),
        tuple(vec![
            (0, forcing_row(3, 1)),
            (1, forcing_row(0, 0)),
            (2, forcing_row(2, 0)),
            (3, forcing_row(1, 1)),
            (4, forcing_row(0, 1)),
            (5, forcing_row(4, 0)),
        ]),
    ]
}

pub struct SwapFixture {
    pub name: String,
    pub machine: Machine,
    pub point: Point,
    pub depth: usize,
}

pub fn swap_fixtures() -> Vec<SwapFixture> {
    let points = swap_points();
    swap_machines()
        .into_iter()
        .flat_map(|(name, machine, depth)| {
            points.iter().enumerate().map(move |(i, p)| SwapFixture {
                name: format!("{name}@p{i}"),
                machine: machine.clone(),
                point: p.clone(),
                depth,
            })
        })
        .collect()
}

/// Both sides of the swap at a fixture.
pub fn swap_sides(fx: &SwapFixture) -> Result<(BTreeSet<Word>, BTreeSet<Word>)> {
    llpo_swap(&fx.machine, &fx.point, fx.depth)?.sides(&fx.machine, &fx.point)
}

// ---------------------------------------------------------------- composition

/// `g∘f ≤sW LLPÔ` from `f ≤W LLPÔ` and `g ≤W LLPÔ`, exact on the first `horizon`
/// coordinates of the middle answer. Both witnesses are first made strong,
/// then `sgn∘K_g∘H_f` is swapped past `LLPÔ` and the double `LLPÔ` is absorbed.
pub fn weak_compose_to(wf: &Witness, wg: &Witness, horizon: usize) -> Result<Witness> {
    let llpo_hat = Problem::llpo_hat();
    for w in [wf, wg] {
        if !w.g.same_as(&llpo_hat) {
            return Err(WitnessError::MiddleMismatch(w.g.name(), llpo_hat.name()).into());
        }
    }
    let cylinder = llpo_hat_cylinder()?;
    let strong = |w: &Witness| -> Result<Witness> {
        if w.strong {
            Ok(w.clone())
        } else {
            Ok(strengthen_on_cylinder(w, &cylinder)?)
        }
    };
    let (sf, sg) = (strong(wf)?, strong(wg)?);
    let middle = Machine::compose(
        pointwise("sgn", |v| (v != 0) as u64),
        Machine::compose(sg.k.machine.clone(), sf.h.clone()),
    );
    let family = extract_tables(&middle, &ClopenCompact::full(), horizon)?;
    let circuits = family.tables.iter().map(synthesize).collect::<std::result::Result<Vec<_>, _>>()?;
    let g = swap_translator(circuits);
    let k = Translator::compose(&llpo_hat_squared().k, &Translator::compose(&g, &sf.k));
    let name = format!("weak_compose({}, {})", wf.name, wg.name);
    Ok(Witness::new(&name, Problem::compose(sg.f.clone(), sf.f.clone()), llpo_hat, k, sg.h.clone(), true))
}

pub fn weak_compose(wf: &Witness, wg: &Witness) -> Result<Witness> {
    weak_compose_to(wf, wg, DEFAULT_HORIZON)
}

// ---------------------------------------------------------------- compact choice

/// `C_K ≤sW WKL`: the tree of words not yet cut by the listed cylinders.
pub fn ck_to_wkl() -> Witness {
    let k = Translator::new(
        Machine::from_symbols("χ_T", |w, i| {
            let v = word_at(i);
            (w.len() >= v.len()).then(|| {
                let cut = w[..v.len()].iter().any(|&c| c > 0 && is_prefix(&word_at(c - 1), &v));
                (!cut) as u64
            })
        }),
        |p| Ok(tree_point(Tree::Listed(p.clone()))),
    );
    Witness::new("compact_choice_to_wkl", Problem::CompactChoice, Problem::Wkl, k, Machine::identity(), true)
}

/// Length bound on the minimal non-members of a tree whose paths form a clopen set.
fn pruning_depth(t: &Tree) -> Result<usize> {
    match t {
        Tree::Fin(_) => Err(WeakError::NonRepresentable(
            "the paths of a finitely presented tree are not a clopen set in general".into(),
        )),
        Tree::Clopen(k) => Ok(k.depth()),
        Tree::Listed(name) => match name.normalize() {
            Some(Point::EvPeriodic { head, period }) => Ok(decode_clopen(name)?.depth().max(head.len() + period.len())),
            _ => Err(WeakError::NonRepresentable(format!("{name} is not eventually periodic"))),
        },
        Tree::Llpo(p) => Ok(forced_rows(p)?.iter().map(|&(m, pos)| m.max(pos / 2) as usize + 1).max().unwrap_or(0)),
    }
}

/// Name of `[T]` listing the minimal words outside `T`.
pub fn pruning_name(t: &Tree) -> Result<Point> {
    let d = pruning_depth(t)?;
    if d > CLOPEN_DEPTH_CAP {
        return Err(WeakError::NonRepresentable(format!(
            "{t} is cut at depth {d}, beyond the cap {CLOPEN_DEPTH_CAP}"
        )));
    }
    let head: Word = (0..(1u64 << (d + 1)) - 1)
        .map(|i| {
            let v = word_at(i);
            let minimal = !t.contains(&v) && (v.is_empty() || t.contains(&v[..v.len() - 1]));
            if minimal {
                i + 1
            } else {
                0
            }
        })
        .collect();
    Ok(Point::evp(head, vec![0]))
}

/// `WKL ≤sW C_K` on trees with clopen path sets: symbol `i` lists `word_at(i)`
/// when it is outside the tree and its parent is not.
pub fn wkl_to_ck() -> Witness {
    let k = Translator::new(
        Machine::from_symbols("minimal non-members", |chi, i| {
            let here = *chi.get(i as usize)?;
            let parent_in = i == 0 || chi[((i - 1) / 2) as usize] != 0;
            Some(if here == 0 && parent_in { i + 1 } else { 0 })
        }),
        |p| match p {
            Point::TreeChar(t) => Ok(pruning_name(t)?),
            _ => Err(ProblemError::Unsupported(format!("{p} is not a tree name"))),
        },
    );
    Witness::new("wkl_to_compact_choice", Problem::Wkl, Problem::CompactChoice, k, Machine::identity(), true)
}

/// `C_K ≤sW LLPÔ` and `LLPÔ ≤sW C_K`, both through `WKL`.
pub fn compact_choice_witnesses() -> Result<(Witness, Witness)> {
    let forward = compose_witness(&ck_to_wkl(), &wkl_to_llpo_hat())?.renamed("compact_choice_to_llpo_hat");
    let backward = compose_witness(&llpo_hat_to_wkl(), &wkl_to_ck())?.renamed("llpo_hat_to_compact_choice");
    Ok((forward, backward))
}

// ---------------------------------------------------------------- corpora

/// A nonempty clopen compact cut out by up to three short words.
pub fn random_compact(rng: &mut StdRng) -> ClopenCompact {
    loop {
        let words: Vec<Word> = (0..rng.gen_range(0..4))
            .map(|_| (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..2)).collect())
            .collect();
        let k = ClopenCompact::new(words).expect("binary words");
        if !k.is_empty() {
            return k;
        }
    }
}

/// A name of a random compact with zeros interleaved between the listed words.
pub fn clopen_name(rng: &mut StdRng) -> Point {
    let Point::EvPeriodic { head, .. } = encode_clopen(&random_compact(rng)) else {
        unreachable!("clopen names are eventually periodic")
    };
    let mut delayed = vec![];
    for c in head {
        delayed.extend(std::iter::repeat(0).take(rng.gen_range(0..3)));
        delayed.push(c);
    }
    Point::evp(delayed, vec![0])
}

/// `LLPÔ` instances whose forced rows all lie below 6.
pub fn finite_llpo_hat_input(rng: &mut StdRng) -> Point {
    let mut rows = BTreeMap::new();
    for _ in 0..rng.gen_range(0..4) {
        rows.insert(rng.gen_range(0..6), gen::llpo_point(rng));
    }
    Point::rows(rows, Point::zeros())
}

/// Trees whose path sets are clopen, in each presentation [`wkl_to_ck`] accepts.
pub fn clopen_tree(rng: &mut StdRng) -> Point {
    match rng.gen_range(0..3) {
        0 => tree_point(Tree::Clopen(random_compact(rng))),
        1 => tree_point(Tree::Listed(clopen_name(rng))),
        _ => tree_point(Tree::Llpo(finite_llpo_hat_input(rng))),
    }
}

/// Inputs to `LLPÔ∘LLPÔ` whose rows past `horizon` all force 0.
pub fn squared_input_below(rng: &mut StdRng, horizon: u64) -> Point {
    loop {
        let mut rows = BTreeMap::new();
        for _ in 0..rng.gen_range(0..4) {
            rows.insert(rng.gen_range(0..horizon), gen::llpo_point(rng));
        }
        let p = Point::rows(rows, gen::llpo_point_odd(rng));
        if Problem::compose(Problem::llpo_hat(), Problem::llpo_hat()).in_domain(&p).unwrap_or(false) {
            return p;
        }
    }
}

/// The two composition examples: `LLPÔ∘LLPÔ` from reflexivity and `LLPO∘LLPO` from extensivity.
pub fn composition_examples() -> Result<Vec<Entry>> {
    let refl = refl_strong(Problem::llpo_hat());
    let ext = parallel_extensive(Problem::Llpo);
    Ok(vec![
        Entry::new(weak_compose(&refl, &refl)?, |rng| squared_input_below(rng, DEFAULT_HORIZON as u64)),
        Entry::new(weak_compose(&ext, &ext)?, gen::llpo_point),
    ])
}

/// Registry entries for compact choice and composition.
pub fn entries() -> Vec<Entry> {
    let mut out = vec![Entry::new(ck_to_wkl(), clopen_name), Entry::new(wkl_to_ck(), clopen_tree)];
    if let Ok((forward, backward)) = compact_choice_witnesses() {
        if let Ok(w) = compose_witness(&backward, &forward) {
            out.push(Entry::new(w.renamed("compact_choice_round_trip"), finite_llpo_hat_input).with_cap(WKL_CAP));
        }
        out.push(Entry::new(forward, clopen_name).with_cap(WKL_CAP));
        out.push(Entry::new(backward, finite_llpo_hat_input));
    }
    if let Ok(ws) = composition_examples() {
        out.extend(ws);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::parse_word;
    use crate::witnesses::{check, CheckConfig, FailReason};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn words(ss: &[&str]) -> Vec<Word> {
        ss.iter().map(|s| parse_word(s).unwrap()).collect()
    }

    /// Every binary word of length `n`, built without the crate's enumeration.
    fn all_words(n: usize) -> Vec<Word> {
        (0..1u64 << n).map(|x| (0..n).map(|i| (x >> (n - 1 - i)) & 1).collect()).collect()
    }

    /// Bits forbidden per row, straight from the nonzero positions of the first rows.
    fn forbidden(p: &Point, rows: usize) -> Vec<Option<u64>> {
        (0..rows as u64)
            .map(|m| {
                let r = p.row(m).unwrap();
                (0..64).find(|&i| r.value_at(i) != 0).map(|i| i % 2)
            })
            .collect()
    }

    /// `F∘LLPÔ(p)` truncated, by running `m` on every binary word of length `len`
    /// that respects the forced rows.
    fn image_oracle(m: &Machine, p: &Point, len: usize, depth: usize) -> BTreeSet<Word> {
        let bad = forbidden(p, len);
        all_words(len)
            .into_iter()
            .filter(|w| w.iter().zip(&bad).all(|(&b, f)| Some(b) != *f))
            .map(|w| m.eval_word(&w)[..depth].iter().map(|&v| (v != 0) as u64).collect())
            .collect()
    }

    #[test]
    fn image_of_free_tuple_is_everything() {
        assert_eq!(compact_image(&Point::zeros()).unwrap(), ClopenCompact::full());
    }

    #[test]
    fn forcing_row_two_to_zero_cuts_words_ending_in_one() {
        let p = Point::rows(BTreeMap::from([(2, forcing_row(3, 1))]), Point::zeros());
        let want = ClopenCompact::new(words(&["001", "011", "101", "111"])).unwrap();
        assert_eq!(compact_image(&p).unwrap(), want);
    }

    #[test]
    fn forcing_default_row_is_not_representable() {
        let p = Point::rows(BTreeMap::new(), forcing_row(0, 1));
        assert!(matches!(compact_image(&p), Err(WeakError::NonRepresentable(_))));
    }

    #[test]
    fn image_membership_matches_value_set() {
        let mut rng = StdRng::seed_from_u64(11);
        let mut inputs = swap_points();
        inputs.extend((0..6).map(|_| finite_llpo_hat_input(&mut rng)));
        for p in inputs {
            let k = compact_image(&p).unwrap();
            let vs = problems::llpo_hat(&p).unwrap();
            for _ in 0..200 {
                let head: Word = (0..rng.gen_range(0..8)).map(|_| rng.gen_range(0..2)).collect();
                let period: Word = (0..rng.gen_range(1..3)).map(|_| rng.gen_range(0..2)).collect();
                let q = Point::evp(head, period);
                assert_eq!(k.contains_point(&q), vs.check_prefix(&q.prefix(16)).is_ok(), "{p} at {q}");
            }
        }
    }

    #[test]
    fn identity_modulus_is_n() {
        let id = coordinate_machine("id", |n| n as usize + 1, bit);
        for n in 0..8 {
            assert_eq!(modulus(&id, &ClopenCompact::full(), n).unwrap(), n);
        }
    }

    #[test]
    fn two_bits_per_symbol_doubles_the_modulus() {
        let m = coordinate_machine("xor", |n| 2 * n as usize + 2, |w, n| bit(w, 2 * n) != bit(w, 2 * n + 1));
        for n in 0..6 {
            let oracle = (0..).find(|&k| all_words(k).iter().all(|w| m.eval_word(w).len() >= n)).unwrap();
            assert_eq!(oracle, 2 * n);
            assert_eq!(modulus(&m, &ClopenCompact::full(), n).unwrap(), oracle);
        }
    }

    #[test]
    fn empty_compact_has_modulus_zero() {
        let empty = ClopenCompact::new(words(&["e"])).unwrap();
        let m = coordinate_machine("slow", |n| 10 * n as usize, |_, _| true);
        assert_eq!(modulus(&m, &empty, 5).unwrap(), 0);
    }

    #[test]
    fn stalled_machine_exhausts_the_search() {
        let m = Machine::new("silent", |_, _| vec![]);
        assert!(matches!(modulus(&m, &ClopenCompact::full(), 1), Err(WeakError::FuelExhausted(_))));
    }

    #[test]
    fn modulus_fixes_the_output_on_admitted_extensions() {
        for p in swap_points() {
            let k = compact_image(&p).unwrap();
            for (name, m, depth) in swap_machines() {
                for n in 0..=depth {
                    let a = modulus(&m, &k, n).unwrap();
                    for w in k.admitted_words(a) {
                        let want = m.eval_word(&w)[..n].to_vec();
                        for ext in all_words(2) {
                            let mut v = w.clone();
                            v.extend(ext);
                            if k.meets(&v) {
                                assert_eq!(m.eval_word(&v)[..n], want[..], "{name} at {}", p);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn identity_and_negation_tables() {
        let full = ClopenCompact::full();
        let (_, id, _) = &swap_machines()[0];
        let (_, not, _) = &swap_machines()[1];
        let t = &extract_tables(id, &full, 1).unwrap().tables[0];
        assert_eq!(*t, TruthTable::new(1, vec![false, true]).unwrap());
        let t = &extract_tables(not, &full, 1).unwrap().tables[0];
        assert_eq!(*t, TruthTable::new(1, vec![true, false]).unwrap());
    }

    #[test]
    fn majority_table_matches_direct_evaluation() {
        let (_, maj, _) = swap_machines().into_iter().find(|(n, ..)| *n == "maj012").unwrap();
        let fam = extract_tables(&maj, &ClopenCompact::full(), 1).unwrap();
        assert_eq!(fam.arities, vec![3]);
        for w in all_words(3) {
            let x: Vec<bool> = w.iter().map(|&b| b == 1).collect();
            assert_eq!(fam.tables[0].value(&x), maj.eval_word(&w)[0] == 1);
            assert_eq!(fam.tables[0].value(&x), w.iter().sum::<u64>() >= 2);
        }
    }

    #[test]
    fn tables_agree_with_machine_on_admitted_words() {
        for p in swap_points() {
            let k = compact_image(&p).unwrap();
            for (name, m, depth) in swap_machines() {
                let fam = extract_tables(&m, &k, depth).unwrap();
                for (n, t) in fam.tables.iter().enumerate() {
                    for w in k.admitted_words(fam.arities[n]) {
                        let x: Vec<bool> = w.iter().map(|&b| b == 1).collect();
                        assert_eq!(t.value(&x), m.eval_word(&w)[n] != 0, "{name} bit {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn arity_above_the_cap_is_refused() {
        let m = coordinate_machine("wide", |_| 9, |w, _| bit(w, 8));
        assert_eq!(
            extract_tables(&m, &ClopenCompact::full(), 1).unwrap_err(),
            WeakError::Ternary(TernaryError::ArityCap(9))
        );
    }

    #[test]
    fn swap_sides_match_the_oracle_on_every_fixture() {
        let fixtures = swap_fixtures();
        assert!(fixtures.len() >= 20);
        for fx in &fixtures {
            let (left, right) = swap_sides(fx).unwrap();
            let oracle = image_oracle(&fx.machine, &fx.point, 8, fx.depth);
            assert_eq!(left, oracle, "{}", fx.name);
            assert_eq!(right, oracle, "{}", fx.name);
        }
    }

    #[test]
    fn identity_swap_reproduces_the_answers() {
        let (_, id, _) = &swap_machines()[0];
        for p in swap_points() {
            let s = llpo_swap(id, &p, 5).unwrap();
            let (left, right) = s.sides(id, &p).unwrap();
            assert_eq!(left, answer_prefixes(&p, 5).unwrap());
            assert_eq!(right, left);
        }
    }

    #[test]
    fn swapping_two_free_bits_under_a_forced_one() {
        // row 0 free, row 1 forced to 1
        let p = Point::rows(BTreeMap::from([(1, forcing_row(1, 0))]), Point::zeros());
        let (_, m, _) = swap_machines().into_iter().find(|(n, ..)| *n == "swap01").unwrap();
        let (left, right) = llpo_swap(&m, &p, 2).unwrap().sides(&m, &p).unwrap();
        let want: BTreeSet<Word> = words(&["10", "11"]).into_iter().collect();
        assert_eq!(left, want);
        assert_eq!(right, want);
    }

    #[test]
    fn nand_of_two_free_bits_takes_both_values() {
        let (_, m, _) = swap_machines().into_iter().find(|(n, ..)| *n == "nand01").unwrap();
        let (left, right) = llpo_swap(&m, &Point::zeros(), 1).unwrap().sides(&m, &Point::zeros()).unwrap();
        let want: BTreeSet<Word> = words(&["0", "1"]).into_iter().collect();
        assert_eq!((left, right), (want.clone(), want));
    }

    #[test]
    fn correlated_outputs_break_the_equality() {
        let dup = coordinate_machine("dup0", |n| n as usize + 1, |w, n| bit(w, if n < 2 { 0 } else { n }));
        let s = llpo_swap(&dup, &Point::zeros(), 2).unwrap();
        let (left, right) = s.sides(&dup, &Point::zeros()).unwrap();
        assert_eq!(left, words(&["00", "11"]).into_iter().collect());
        assert_eq!(right.len(), 4);
        assert!(left.is_subset(&right));
    }

    #[test]
    fn forced_inputs_collapse_both_sides() {
        let p = &swap_points()[2];
        let mut singles = 0;
        for (name, m, depth) in swap_machines() {
            let (left, right) = llpo_swap(&m, p, depth).unwrap().sides(&m, p).unwrap();
            if left.len() == 1 {
                singles += 1;
                assert_eq!(right, left, "{name}");
            }
        }
        assert!(singles >= 5);
    }

    #[test]
    fn g_machine_agrees_with_its_exact_map() {
        for fx in swap_fixtures().iter().step_by(3) {
            let s = llpo_swap(&fx.machine, &fx.point, fx.depth).unwrap();
            let q = s.g.apply(&fx.point).unwrap();
            let out = s.g.machine.run_on_point(&fx.point, 40).output;
            assert!(out.len() >= 40, "{}", fx.name);
            assert_eq!(out, q.prefix(out.len()), "{}", fx.name);
        }
    }

    fn cfg() -> CheckConfig {
        CheckConfig::new(10).adaptive()
    }

    fn sample(f: impl Fn(&mut StdRng) -> Point, n: usize) -> Vec<Point> {
        let mut rng = StdRng::seed_from_u64(5);
        (0..n).map(|_| f(&mut rng)).collect()
    }

    #[test]
    fn composing_reflexivity_passes() {
        let refl = refl_strong(Problem::llpo_hat());
        let w = weak_compose(&refl, &refl).unwrap();
        let mut corpus = sample(|r| squared_input_below(r, DEFAULT_HORIZON as u64), 6);
        corpus.push(Point::rows(BTreeMap::new(), forcing_row(0, 1)));
        let report = check(&w, &corpus, &cfg()).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn composing_llpo_with_itself_passes() {
        let ext = parallel_extensive(Problem::Llpo);
        let w = weak_compose(&ext, &ext).unwrap();
        let mut corpus = vec![Point::zeros()];
        corpus.extend(sample(gen::llpo_point, 8));
        let report = check(&w, &corpus, &cfg()).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn corrupted_outer_witness_is_caught() {
        let ext = parallel_extensive(Problem::Llpo);
        let mut bad = ext.clone();
        bad.h = Machine::compose(pointwise("flip", |v| (v == 0) as u64), bad.h.clone());
        let w = weak_compose(&ext, &bad).unwrap();
        let corpus = vec![forcing_row(0, 0), forcing_row(2, 0)];
        let report = check(&w, &corpus, &cfg()).unwrap();
        assert!(!report.passed());
        let (_, fail) = report.first_failure().unwrap();
        assert_eq!(fail.reason, FailReason::WrongAnswer);
    }

    #[test]
    fn composing_with_a_foreign_middle_is_refused() {
        let lpo = refl_strong(Problem::Lpo);
        let refl = refl_strong(Problem::llpo_hat());
        assert!(matches!(weak_compose(&lpo, &refl), Err(WeakError::Witness(WitnessError::MiddleMismatch(..)))));
    }

    #[test]
    fn compact_choice_into_wkl_passes() {
        let report = check(&ck_to_wkl(), &sample(clopen_name, 12), &cfg()).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn wkl_into_compact_choice_passes() {
        let report = check(&wkl_to_ck(), &sample(clopen_tree, 12), &cfg()).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn full_space_accepts_any_point() {
        let (forward, _) = compact_choice_witnesses().unwrap();
        let name = encode_clopen(&ClopenCompact::full());
        let report = check(&forward, &[name], &cfg().with_cap(WKL_CAP)).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn excluding_one_selects_a_point_starting_with_zero() {
        let k = ClopenCompact::new(words(&["1"])).unwrap();
        let vs = problems::compact_choice(&k).unwrap();
        assert!(vs.check_prefix(&[1]).is_err());
        let (forward, _) = compact_choice_witnesses().unwrap();
        let name = encode_clopen(&k);
        let report = check(&forward, &[name.clone()], &cfg().with_cap(WKL_CAP)).unwrap();
        assert!(report.passed(), "{report}");
        let r = wkl_to_llpo_hat().k.apply(&ck_to_wkl().k.apply(&name).unwrap()).unwrap();
        for b in problems::llpo_hat(&r).unwrap().behaviors(4) {
            assert_eq!(forward.h.run_on_point(&b, 1).output, vec![0]);
        }
    }

    #[test]
    fn llpo_hat_into_compact_choice_passes() {
        let (_, backward) = compact_choice_witnesses().unwrap();
        let report = check(&backward, &sample(finite_llpo_hat_input, 12), &cfg()).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn compact_choice_round_trip_passes() {
        let (forward, backward) = compact_choice_witnesses().unwrap();
        let w = compose_witness(&backward, &forward).unwrap();
        let report = check(&w, &sample(finite_llpo_hat_input, 4), &cfg().with_cap(WKL_CAP)).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn finite_trees_have_no_clopen_name() {
        let t = Tree::Fin(crate::wkl::fixtures().remove(0));
        assert!(matches!(pruning_name(&t), Err(WeakError::NonRepresentable(_))));
    }

    #[test]
    fn pruned_names_keep_exactly_the_paths() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..40 {
            let Point::TreeChar(t) = clopen_tree(&mut rng) else { unreachable!() };
            let k = decode_clopen(&pruning_name(&t).unwrap()).unwrap();
            for n in 0..=8 {
                for w in all_words(n) {
                    assert_eq!(k.meets(&w), t.viable(&w), "{t} at {w:?}");
                }
            }
        }
    }

    #[test]
    fn registry_entries_build() {
        let names: Vec<String> = entries().iter().map(|e| e.name().to_string()).collect();
        assert_eq!(names.len(), 7, "{names:?}");
    }

    proptest! {
        #[test]
        fn compact_round_trips_through_its_tree(seed in any::<u64>()) {
            let k = random_compact(&mut StdRng::seed_from_u64(seed));
            let name = pruning_name(&Tree::Clopen(k.clone())).unwrap();
            let back = decode_clopen(&name).unwrap();
            for n in 0..6 {
                prop_assert_eq!(back.admitted_words(n), k.admitted_words(n));
            }
        }

        #[test]
        fn swap_holds_on_random_forcings(seed in any::<u64>(), which in 0usize..10) {
            let mut rng = StdRng::seed_from_u64(seed);
            let p = finite_llpo_hat_input(&mut rng);
            let (_, m, depth) = swap_machines().swap_remove(which);
            let (left, right) = llpo_swap(&m, &p, depth).unwrap().sides(&m, &p).unwrap();
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(left, image_oracle(&m, &p, 8, depth));
        }
    }
}
