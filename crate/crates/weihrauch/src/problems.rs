//! Multi-valued problems with decidable domains and computable value sets.
//!
//! A [`Problem`] acts on names. Its [`ValueSet`] at an input name describes
//! every acceptable output name, and can both judge an output prefix and
//! enumerate the representative oracle answers a reduction must survive.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::baire::{encode, BaireError, Point, RowCycle};
use crate::machine::{row_of_word, split_word, Machine};
use crate::spaces::{self, ClopenCompact, Dyadic, SpaceError, Tree};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
}

impl From<BaireError> for ProblemError {
    fn from(e: BaireError) -> Self {
        ProblemError::Unsupported(e.to_string())
    }
}

impl From<SpaceError> for ProblemError {
    fn from(e: SpaceError) -> Self {
        match e {
            SpaceError::Capacity(m) => ProblemError::CapacityExceeded(m),
            SpaceError::Baire(b) => b.into(),
            other => ProblemError::OutOfDomain(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, ProblemError>;

/// Rows sampled when a tuple has no finite row structure.
pub const ROW_SAMPLE: u64 = 64;

pub type PointMap = Arc<dyn Fn(&Point) -> Result<Point> + Send + Sync>;

/// A computable single-valued map on Baire space: a realizer and its exact semantics.
#[derive(Clone)]
pub struct ComputableFn {
    pub name: Arc<str>,
    pub machine: Machine,
    pub exact: PointMap,
}

impl ComputableFn {
    pub fn new(name: &str, machine: Machine, exact: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static) -> Self {
        ComputableFn {
            name: name.into(),
            machine,
            exact: Arc::new(exact),
        }
    }

    pub fn identity() -> Self {
        ComputableFn::new("id", Machine::identity(), |p| Ok(p.clone()))
    }
}

#[derive(Clone)]
pub enum Problem {
    /// Identity on Baire space.
    Identity,
    Lpo,
    Llpo,
    /// LLPO on dyadic names.
    LlpoReal,
    Wkl,
    /// Compact choice on Cantor space, inputs are negative-information names.
    CompactChoice,
    /// `c_A` for a nonempty finite `A`.
    Const(Vec<Point>),
    /// `𝟎 = c_∅`: total, with no realizer at all.
    NoRealizer,
    /// The nowhere defined problem.
    NowhereDefined,
    Product(Box<Problem>, Box<Problem>),
    Sum(Box<Problem>, Box<Problem>),
    Parallel(Box<Problem>),
    /// `outer ∘ inner`.
    Compose(Box<Problem>, Box<Problem>),
    Computable(ComputableFn),
    /// Same problem on names carrying one leading padding symbol, on input and output.
    Padded(Box<Problem>),
}

impl Problem {
    pub fn product(f: Problem, g: Problem) -> Problem {
        Problem::Product(Box::new(f), Box::new(g))
    }

    pub fn sum(f: Problem, g: Problem) -> Problem {
        Problem::Sum(Box::new(f), Box::new(g))
    }

    pub fn parallel(f: Problem) -> Problem {
        Problem::Parallel(Box::new(f))
    }

    pub fn compose(outer: Problem, inner: Problem) -> Problem {
        Problem::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn padded(f: Problem) -> Problem {
        Problem::Padded(Box::new(f))
    }

    pub fn llpo_hat() -> Problem {
        Problem::parallel(Problem::Llpo)
    }

    /// `C = LPÔ`.
    pub fn c() -> Problem {
        Problem::parallel(Problem::Lpo)
    }

    /// Output space is ℕ, so parallelizations use flat sequences of answers.
    pub fn nat_valued(&self) -> bool {
        match self {
            Problem::Lpo | Problem::Llpo | Problem::LlpoReal => true,
            Problem::Compose(g, _) => g.nat_valued(),
            _ => false,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Problem::Identity => "id".into(),
            Problem::Lpo => "lpo".into(),
            Problem::Llpo => "llpo".into(),
            Problem::LlpoReal => "llpo_r".into(),
            Problem::Wkl => "wkl".into(),
            Problem::CompactChoice => "compact_choice".into(),
            Problem::Const(a) => {
                let items: Vec<String> = a.iter().map(|p| p.to_string()).collect();
                format!("c{{{}}}", items.join(","))
            }
            Problem::NoRealizer => "𝟎".into(),
            Problem::NowhereDefined => "nowhere".into(),
            Problem::Product(f, g) => format!("({}×{})", f.name(), g.name()),
            Problem::Sum(f, g) => format!("({}⊕{})", f.name(), g.name()),
            Problem::Parallel(f) => format!("{}^", f.name()),
            Problem::Compose(g, f) => format!("({}∘{})", g.name(), f.name()),
            Problem::Computable(c) => c.name.to_string(),
            Problem::Padded(f) => format!("pad({})", f.name()),
        }
    }

    /// Structural equality on the problem expression; computable maps compare by name.
    pub fn same_as(&self, other: &Problem) -> bool {
        self.name() == other.name()
    }

    pub fn in_domain(&self, p: &Point) -> Result<bool> {
        Ok(match self {
            Problem::Identity | Problem::Const(_) | Problem::NoRealizer | Problem::Computable(_) => true,
            Problem::Lpo => {
                p.exists_zero()?;
                true
            }
            Problem::Llpo => p.count_nonzero()?.is_some_and(|c| c <= 1),
            Problem::LlpoReal => spaces::decode_dyadic(p).is_ok(),
            Problem::Wkl => match p {
                Point::TreeChar(t) => t.is_infinite(),
                _ => return Err(ProblemError::Unsupported(format!("{p} is not a tree name"))),
            },
            Problem::CompactChoice => spaces::decode_clopen(p).is_ok_and(|k| !k.is_empty()),
            Problem::NowhereDefined => false,
            Problem::Product(f, g) | Problem::Sum(f, g) => {
                let (a, b) = p.split_pair();
                f.in_domain(&a)? && g.in_domain(&b)?
            }
            Problem::Parallel(f) => {
                for n in row_indices(p)? {
                    if !f.in_domain(&p.row(n)?)? {
                        return Ok(false);
                    }
                }
                true
            }
            Problem::Compose(g, f) => {
                if is_llpo_hat(g) && is_llpo_hat(f) {
                    return llpo_hat_squared_domain(p);
                }
                if !f.in_domain(p)? {
                    return Ok(false);
                }
                let members = f.value_set(p)?.finite_members().ok_or_else(|| {
                    ProblemError::Unsupported(format!("{} has infinitely many values at {p}", f.name()))
                })?;
                for r in members {
                    if !g.in_domain(&r)? {
                        return Ok(false);
                    }
                }
                true
            }
            Problem::Padded(f) => f.in_domain(&p.shift())?,
        })
    }

    pub fn value_set(&self, p: &Point) -> Result<ValueSet> {
        if !self.in_domain(p)? {
            return Err(ProblemError::OutOfDomain(format!("{p} ∉ dom({})", self.name())));
        }
        Ok(match self {
            Problem::Identity => ValueSet::SinglePoint(p.clone()),
            Problem::Lpo => ValueSet::FiniteNats(lpo(p)?),
            Problem::Llpo => ValueSet::FiniteNats(llpo(p)?),
            Problem::LlpoReal => ValueSet::FiniteNats(llpo_real(spaces::decode_dyadic(p)?)),
            Problem::Wkl => match p {
                Point::TreeChar(t) => match &**t {
                    Tree::Fin(t) => ValueSet::PointList(t.live().to_vec()),
                    Tree::Llpo(q) => llpo_hat(q)?,
                    Tree::Clopen(k) => compact_choice(k)?,
                    Tree::Listed(name) => compact_choice(&spaces::decode_clopen(name)?)?,
                },
                _ => unreachable!("domain checked"),
            },
            Problem::CompactChoice => compact_choice(&spaces::decode_clopen(p)?)?,
            Problem::Const(a) => ValueSet::PointList(a.clone()),
            Problem::NoRealizer => ValueSet::Empty,
            Problem::NowhereDefined => unreachable!("empty domain"),
            Problem::Product(f, g) => {
                let (a, b) = p.split_pair();
                ValueSet::Pair(Box::new(f.value_set(&a)?), Box::new(g.value_set(&b)?))
            }
            Problem::Sum(f, g) => {
                let (a, b) = p.split_pair();
                ValueSet::Tagged(Box::new(f.value_set(&a)?), Box::new(g.value_set(&b)?))
            }
            Problem::Parallel(f) => parallel_value_set(f, p)?,
            Problem::Compose(g, f) => {
                if is_llpo_hat(g) && is_llpo_hat(f) {
                    return llpo_hat_squared(p);
                }
                let members = f.value_set(p)?.finite_members().expect("checked in domain test");
                ValueSet::Union(members.iter().map(|r| g.value_set(r)).collect::<Result<_>>()?)
            }
            Problem::Computable(c) => ValueSet::SinglePoint((c.exact)(p)?),
            Problem::Padded(f) => ValueSet::Padded(Box::new(f.value_set(&p.shift())?)),
        })
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn is_llpo_hat(f: &Problem) -> bool {
    matches!(f, Problem::Parallel(g) if matches!(**g, Problem::Llpo))
}

/// Row indices whose membership decides a property of every row.
fn row_indices(p: &Point) -> Result<Vec<u64>> {
    match p.row_cycle() {
        Ok(c) => Ok(c.representatives().collect()),
        Err(_) if p.is_lazy() => Ok((0..ROW_SAMPLE).collect()),
        Err(e) => Err(e.into()),
    }
}

// ---------------------------------------------------------------- the named problems

pub fn lpo(p: &Point) -> Result<BTreeSet<u64>> {
    Ok(BTreeSet::from([if p.exists_zero()? { 0 } else { 1 }]))
}

pub fn llpo(p: &Point) -> Result<BTreeSet<u64>> {
    if !p.count_nonzero()?.is_some_and(|c| c <= 1) {
        return Err(ProblemError::OutOfDomain(format!("{p} has more than one nonzero entry")));
    }
    let mut out = BTreeSet::new();
    if p.all_zero_on_progression(2, 0)? {
        out.insert(0);
    }
    if p.all_zero_on_progression(2, 1)? {
        out.insert(1);
    }
    Ok(out)
}

pub fn llpo_real(x: Dyadic) -> BTreeSet<u64> {
    match x.signum() {
        -1 => BTreeSet::from([0]),
        1 => BTreeSet::from([1]),
        _ => BTreeSet::from([0, 1]),
    }
}

/// `C(p)(n) = 0` iff row `n` of `p` contains a zero.
pub fn c_map(p: &Point) -> Result<Point> {
    let cycle = p.row_cycle()?;
    let value = |n: u64| -> Result<u64> { Ok(if p.row(n)?.exists_zero()? { 0 } else { 1 }) };
    let end = cycle.base + cycle.cycle;
    let head = (0..cycle.base).map(value).collect::<Result<Vec<_>>>()?;
    let period = (cycle.base..end).map(value).collect::<Result<Vec<_>>>()?;
    Ok(Point::evp(head, period))
}

/// Value set of `LLPÔ` on a tuple; coordinate `k` follows `llpo(row k)`.
pub fn llpo_hat(p: &Point) -> Result<ValueSet> {
    parallel_value_set(&Problem::Llpo, p)
}

pub fn wkl(t: &Tree) -> Result<ValueSet> {
    Problem::Wkl.value_set(&spaces::tree_point(t.clone()))
}

pub fn compact_choice(k: &ClopenCompact) -> Result<ValueSet> {
    if k.is_empty() {
        return Err(ProblemError::OutOfDomain(format!("{k} is empty")));
    }
    match k.product_shape()? {
        Some(coords) => {
            let d = coords.len() as u64;
            let mut explicit = coords;
            explicit.push(BTreeSet::from([0, 1]));
            Ok(ValueSet::CoordinateProduct(CoordinateProduct {
                explicit,
                cycle: RowCycle { base: d, cycle: 1 },
            }))
        }
        None => Ok(ValueSet::Clopen(k.clone())),
    }
}

pub fn const_set(a: Vec<Point>) -> Problem {
    if a.is_empty() {
        Problem::NoRealizer
    } else {
        Problem::Const(a)
    }
}

pub fn const_point(q: Point) -> Problem {
    Problem::Const(vec![q])
}

fn parallel_value_set(f: &Problem, p: &Point) -> Result<ValueSet> {
    if f.nat_valued() {
        if let Ok(cycle) = p.row_cycle() {
            let explicit = cycle
                .representatives()
                .map(|n| match f.value_set(&p.row(n)?)? {
                    ValueSet::FiniteNats(s) => Ok(s),
                    other => other
                        .nat_choices()
                        .ok_or_else(|| ProblemError::Unsupported(format!("{} is not ℕ-valued", f.name()))),
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(ValueSet::CoordinateProduct(CoordinateProduct { explicit, cycle }));
        }
    }
    let f = f.clone();
    let p = p.clone();
    let flat = f.nat_valued();
    let cache: Mutex<HashMap<u64, ValueSet>> = Mutex::new(HashMap::new());
    Ok(ValueSet::Rows {
        flat,
        row: Arc::new(move |n| {
            if let Some(v) = cache.lock().unwrap().get(&n) {
                return v.clone();
            }
            let v = p.row(n).map_err(ProblemError::from).and_then(|r| f.value_set(&r)).unwrap_or(ValueSet::Empty);
            cache.lock().unwrap().insert(n, v.clone());
            v
        }),
    })
}

/// Allowed answer bits of `LLPO` on row `i` of `p`.
fn llpo_row_choices(p: &Point, i: u64) -> Result<BTreeSet<u64>> {
    llpo(&p.row(i)?)
}

fn llpo_hat_squared_domain(p: &Point) -> Result<bool> {
    let c = p.row_cycle()?;
    let span = c.base + 2 * c.cycle;
    for k in 0..span {
        let mut ones = 0;
        for j in 0..span {
            let allowed = llpo_row_choices(p, encode(k, j))?;
            if allowed.contains(&1) {
                if j >= c.base {
                    return Ok(false);
                }
                ones += 1;
            }
        }
        if ones > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `LLPÔ∘LLPÔ` coordinate-wise: `k` may answer 0 iff every row `⟨k,2n⟩` may answer 0,
/// and 1 iff every row `⟨k,2n+1⟩` may answer 0.
fn llpo_hat_squared(p: &Point) -> Result<ValueSet> {
    let c = p.row_cycle()?;
    let span = c.base + 2 * c.cycle;
    let explicit = (0..span)
        .map(|k| {
            let mut out = BTreeSet::new();
            for b in [0, 1] {
                let mut ok = true;
                for j in (b..span).step_by(2) {
                    ok &= llpo_row_choices(p, encode(k, j))?.contains(&0);
                }
                if ok {
                    out.insert(b);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ValueSet::CoordinateProduct(CoordinateProduct {
        explicit,
        cycle: RowCycle { base: c.base, cycle: 2 * c.cycle },
    }))
}

// ---------------------------------------------------------------- value sets

/// Product of per-coordinate answer sets; coordinate `n` uses `explicit[cycle.class_of(n)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateProduct {
    pub explicit: Vec<BTreeSet<u64>>,
    pub cycle: RowCycle,
}

impl CoordinateProduct {
    pub fn allowed(&self, n: u64) -> &BTreeSet<u64> {
        &self.explicit[self.cycle.class_of(n) as usize]
    }

    pub fn contains_point(&self, q: &Point, n: usize) -> bool {
        (0..n as u64).all(|i| self.allowed(i).contains(&q.value_at(i)))
    }

    fn canonical_tail(&self, chosen: &[u64]) -> Point {
        let c = chosen.len() as u64;
        let h = c.max(self.cycle.base);
        let least = |n: u64| *self.allowed(n).iter().next().expect("nonempty coordinate");
        let head: Vec<u64> = (0..h).map(|n| if n < c { chosen[n as usize] } else { least(n) }).collect();
        let period: Vec<u64> = (h..h + self.cycle.cycle).map(least).collect();
        Point::evp(head, period)
    }
}

type RowSets = Arc<dyn Fn(u64) -> ValueSet + Send + Sync>;

#[derive(Clone)]
pub enum ValueSet {
    /// No acceptable output (the value set of `𝟎`).
    Empty,
    FiniteNats(BTreeSet<u64>),
    SinglePoint(Point),
    PointList(Vec<Point>),
    CoordinateProduct(CoordinateProduct),
    /// Every point of a clopen compact.
    Clopen(ClopenCompact),
    Pair(Box<ValueSet>, Box<ValueSet>),
    /// Direct sum: leading 0 selects the left set, anything else the right.
    Tagged(Box<ValueSet>, Box<ValueSet>),
    /// Row-wise sets of a parallelization; `flat` when rows are ℕ-valued.
    Rows { flat: bool, row: RowSets },
    Union(Vec<ValueSet>),
    /// Output names carry one leading padding symbol.
    Padded(Box<ValueSet>),
}

impl ValueSet {
    /// Checks an output-name prefix; on failure returns the first name index that
    /// no acceptable output can have.
    pub fn check_prefix(&self, w: &[u64]) -> std::result::Result<(), usize> {
        match self {
            ValueSet::Empty => Err(0),
            ValueSet::FiniteNats(s) => match w.first() {
                Some(v) if !s.contains(v) => Err(0),
                _ => Ok(()),
            },
            ValueSet::SinglePoint(q) => match (0..w.len()).find(|&i| w[i] != q.value_at(i as u64)) {
                Some(i) => Err(i),
                None => Ok(()),
            },
            ValueSet::PointList(list) => {
                let mut worst = 0;
                for q in list {
                    match ValueSet::SinglePoint(q.clone()).check_prefix(w) {
                        Ok(()) => return Ok(()),
                        Err(i) => worst = worst.max(i),
                    }
                }
                Err(worst)
            }
            ValueSet::CoordinateProduct(cp) => {
                match (0..w.len()).find(|&i| !cp.allowed(i as u64).contains(&w[i])) {
                    Some(i) => Err(i),
                    None => Ok(()),
                }
            }
            ValueSet::Clopen(k) => match (0..w.len()).find(|&i| !k.meets(&w[..=i])) {
                Some(i) => Err(i),
                None => Ok(()),
            },
            ValueSet::Pair(a, b) => {
                let (x, y) = split_word(w);
                let ea = a.check_prefix(&x).err().map(|i| 2 * i);
                let eb = b.check_prefix(&y).err().map(|i| 2 * i + 1);
                match ea.into_iter().chain(eb).min() {
                    Some(i) => Err(i),
                    None => Ok(()),
                }
            }
            ValueSet::Tagged(a, b) => match w.split_first() {
                None => Ok(()),
                Some((&0, rest)) => a.check_prefix(rest).map_err(|i| i + 1),
                Some((_, rest)) => b.check_prefix(rest).map_err(|i| i + 1),
            },
            ValueSet::Rows { flat: true, row } => {
                match (0..w.len()).find(|&n| row(n as u64).check_prefix(&w[n..=n]).is_err()) {
                    Some(n) => Err(n),
                    None => Ok(()),
                }
            }
            ValueSet::Rows { flat: false, row } => {
                let mut worst: Option<usize> = None;
                let mut n = 0u64;
                while (encode(n, 0) as usize) < w.len() {
                    if let Err(k) = row(n).check_prefix(&row_of_word(w, n)) {
                        let i = encode(n, k as u64) as usize;
                        worst = Some(worst.map_or(i, |x| x.min(i)));
                    }
                    n += 1;
                }
                match worst {
                    Some(i) => Err(i),
                    None => Ok(()),
                }
            }
            ValueSet::Union(parts) => {
                let mut worst = 0;
                for v in parts {
                    match v.check_prefix(w) {
                        Ok(()) => return Ok(()),
                        Err(i) => worst = worst.max(i),
                    }
                }
                Err(worst)
            }
            ValueSet::Padded(v) => match w.split_first() {
                None => Ok(()),
                Some((_, rest)) => v.check_prefix(rest).map_err(|i| i + 1),
            },
        }
    }

    pub fn is_empty(&self) -> bool {
        self.behavior_count(0) == 0
    }

    /// Number of representative behaviors when choices are enumerated on the first `c` coordinates.
    pub fn behavior_count(&self, c: usize) -> u128 {
        let sat = |a: u128, b: u128| a.saturating_mul(b);
        match self {
            ValueSet::Empty => 0,
            ValueSet::FiniteNats(s) => s.len() as u128,
            ValueSet::SinglePoint(_) => 1,
            ValueSet::PointList(l) => l.len() as u128,
            ValueSet::CoordinateProduct(cp) => (0..c as u64).fold(1, |acc, n| sat(acc, cp.allowed(n).len() as u128)),
            ValueSet::Clopen(k) => k.admitted_words(c).len() as u128,
            ValueSet::Pair(a, b) => sat(a.behavior_count(c), b.behavior_count(c)),
            ValueSet::Tagged(a, b) => a.behavior_count(c).saturating_add(b.behavior_count(c)),
            ValueSet::Rows { row, .. } => (0..c as u64).fold(1, |acc, n| sat(acc, row(n).behavior_count(c))),
            ValueSet::Union(parts) => parts.iter().map(|v| v.behavior_count(c)).fold(0, u128::saturating_add),
            ValueSet::Padded(v) => v.behavior_count(c),
        }
    }

    /// Representative output names: every choice on the first `c` coordinates,
    /// least choice everywhere else.
    pub fn behaviors(&self, c: usize) -> Vec<Point> {
        match self {
            ValueSet::Empty => vec![],
            ValueSet::FiniteNats(s) => s.iter().map(|&v| spaces::encode_nat(v)).collect(),
            ValueSet::SinglePoint(q) => vec![q.clone()],
            ValueSet::PointList(l) => l.clone(),
            ValueSet::CoordinateProduct(cp) => {
                let mut out = vec![];
                let mut chosen = vec![];
                fn rec(cp: &CoordinateProduct, c: usize, chosen: &mut Vec<u64>, out: &mut Vec<Point>) {
                    if chosen.len() == c {
                        out.push(cp.canonical_tail(chosen));
                        return;
                    }
                    for &v in cp.allowed(chosen.len() as u64) {
                        chosen.push(v);
                        rec(cp, c, chosen, out);
                        chosen.pop();
                    }
                }
                rec(cp, c, &mut chosen, &mut out);
                out
            }
            ValueSet::Clopen(k) => k.admitted_words(c).iter().map(|w| least_extension(k, w)).collect(),
            ValueSet::Pair(a, b) => {
                let bs = b.behaviors(c);
                a.behaviors(c)
                    .into_iter()
                    .flat_map(|x| bs.iter().map(move |y| Point::pair(x.clone(), y.clone())))
                    .collect()
            }
            ValueSet::Tagged(a, b) => a
                .behaviors(c)
                .into_iter()
                .map(|x| x.prepend(0))
                .chain(b.behaviors(c).into_iter().map(|y| y.prepend(1)))
                .collect(),
            ValueSet::Rows { flat, row } => {
                let per_row: Vec<Vec<Point>> = (0..c as u64).map(|n| row(n).behaviors(c)).collect();
                let mut out = vec![];
                let mut idx = vec![0usize; c];
                if per_row.iter().any(Vec::is_empty) {
                    return out;
                }
                let tail = Arc::new(Mutex::new(Vec::new()));
                loop {
                    let chosen: Vec<Point> = idx.iter().enumerate().map(|(n, &j)| per_row[n][j].clone()).collect();
                    out.push(rows_point(*flat, row.clone(), chosen, tail.clone()));
                    let mut pos = 0;
                    loop {
                        if pos == c {
                            return out;
                        }
                        idx[pos] += 1;
                        if idx[pos] < per_row[pos].len() {
                            break;
                        }
                        idx[pos] = 0;
                        pos += 1;
                    }
                }
            }
            ValueSet::Union(parts) => {
                let mut out: Vec<Point> = vec![];
                for q in parts.iter().flat_map(|v| v.behaviors(c)) {
                    if !out.contains(&q) {
                        out.push(q);
                    }
                }
                out
            }
            ValueSet::Padded(v) => v.behaviors(c).into_iter().map(|q| q.prepend(0)).collect(),
        }
    }

    /// The least behavior.
    pub fn canonical(&self) -> Option<Point> {
        self.behaviors(0).into_iter().next()
    }

    /// All members, when there are finitely many and they are listed exactly.
    pub fn finite_members(&self) -> Option<Vec<Point>> {
        match self {
            ValueSet::Empty => Some(vec![]),
            ValueSet::FiniteNats(_) | ValueSet::SinglePoint(_) | ValueSet::PointList(_) => Some(self.behaviors(0)),
            ValueSet::Pair(a, b) => {
                let (xs, ys) = (a.finite_members()?, b.finite_members()?);
                Some(xs.iter().flat_map(|x| ys.iter().map(|y| Point::pair(x.clone(), y.clone()))).collect())
            }
            ValueSet::Tagged(a, b) => {
                let mut out: Vec<Point> = a.finite_members()?.iter().map(|x| x.prepend(0)).collect();
                out.extend(b.finite_members()?.iter().map(|y| y.prepend(1)));
                Some(out)
            }
            ValueSet::Union(parts) => {
                let mut out = vec![];
                for v in parts {
                    out.extend(v.finite_members()?);
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// The possible answers of an ℕ-valued set.
    pub fn nat_choices(&self) -> Option<BTreeSet<u64>> {
        match self {
            ValueSet::FiniteNats(s) => Some(s.clone()),
            ValueSet::Union(parts) => {
                let mut out = BTreeSet::new();
                for v in parts {
                    out.extend(v.nat_choices()?);
                }
                Some(out)
            }
            _ => None,
        }
    }
}

fn least_extension(k: &ClopenCompact, w: &[u64]) -> Point {
    let mut v = w.to_vec();
    while v.len() < k.depth() {
        v.push(0);
        if !k.meets(&v) {
            *v.last_mut().unwrap() = 1;
        }
    }
    Point::evp(v, vec![0])
}

/// Behavior point with chosen leading rows and least answers after them.
/// Flat tails are computed once per enumeration and shared through `tail`.
fn rows_point(flat: bool, row: RowSets, chosen: Vec<Point>, tail: Arc<Mutex<Vec<u64>>>) -> Point {
    let c = chosen.len() as u64;
    if flat {
        let firsts: Arc<Vec<u64>> = Arc::new(chosen.iter().map(|q| q.value_at(0)).collect());
        let grow = Arc::new(move |t: &mut Vec<u64>, n: usize| {
            while t.len() < n {
                let m = t.len() as u64;
                t.push(row(m).canonical().map_or(0, |q| q.value_at(0)));
            }
        });
        let (g, t, f) = (grow.clone(), tail.clone(), firsts.clone());
        let single = move |n: u64| {
            if n < c {
                return f[n as usize];
            }
            let mut t = t.lock().unwrap();
            g(&mut t, n as usize + 1);
            t[n as usize]
        };
        let fill = move |n: usize| {
            let mut t = tail.lock().unwrap();
            grow(&mut t, n);
            let mut out = t[..n].to_vec();
            let c = (c as usize).min(n);
            out[..c].copy_from_slice(&firsts[..c]);
            out
        };
        return Point::lazy_bulk("behavior", single, fill);
    }
    Point::lazy_rows("behavior", move |n| {
        if n < c {
            chosen[n as usize].clone()
        } else {
            row(n).canonical().unwrap_or_else(Point::zeros)
        }
    })
}

fn fmt_set(f: &mut fmt::Formatter<'_>, s: &BTreeSet<u64>) -> fmt::Result {
    let items: Vec<String> = s.iter().map(u64::to_string).collect();
    write!(f, "{{{}}}", items.join(","))
}

impl fmt::Display for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueSet::Empty => write!(f, "∅"),
            ValueSet::FiniteNats(s) => fmt_set(f, s),
            ValueSet::SinglePoint(q) => write!(f, "{{{q}}}"),
            ValueSet::PointList(l) => {
                let items: Vec<String> = l.iter().map(|q| q.to_string()).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
            ValueSet::CoordinateProduct(cp) => {
                write!(f, "∏")?;
                for n in cp.cycle.representatives() {
                    write!(f, " {n}:")?;
                    fmt_set(f, cp.allowed(n))?;
                }
                if cp.cycle.cycle == 1 {
                    write!(f, " (then as {})", cp.cycle.base)
                } else {
                    write!(f, " (repeating with period {} from {})", cp.cycle.cycle, cp.cycle.base)
                }
            }
            ValueSet::Clopen(k) => write!(f, "{k}"),
            ValueSet::Pair(a, b) => write!(f, "⟨{a}, {b}⟩"),
            ValueSet::Tagged(a, b) => write!(f, "0·{a} ∪ 1·{b}"),
            ValueSet::Rows { row, .. } => {
                write!(f, "rows[")?;
                for n in 0..4 {
                    write!(f, "{}{}", if n > 0 { "; " } else { "" }, row(n))?;
                }
                write!(f, "; ...]")
            }
            ValueSet::Union(parts) => {
                let items: Vec<String> = parts.iter().map(|v| v.to_string()).collect();
                write!(f, "{}", items.join(" ∪ "))
            }
            ValueSet::Padded(v) => write!(f, "pad{v}"),
        }
    }
}

impl fmt::Debug for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Tuples with listed exception rows.
pub fn tuple(rows: impl IntoIterator<Item = (u64, Point)>, default: Point) -> Point {
    Point::rows(rows.into_iter().collect::<BTreeMap<_, _>>(), default)
}
