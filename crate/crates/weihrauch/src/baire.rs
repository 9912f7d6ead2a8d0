//! Finitely presented points of Baire space.
//!
//! A [`Point`] is a total sequence of naturals given by a finite description.
//! Structural predicates ([`Point::min_zero`], [`Point::all_zero_on_progression`],
//! [`Point::count_nonzero`]) decide questions about the whole infinite sequence
//! by inspecting the description, which is what lets the discontinuous
//! problems of this crate be evaluated at all.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::spaces::{self, Tree};

/// A finite word over the naturals.
pub type Word = Vec<u64>;

/// `v ⊑ w`.
pub fn is_prefix(v: &[u64], w: &[u64]) -> bool {
    v.len() <= w.len() && w[..v.len()] == *v
}

/// Cantor pairing `⟨n,k⟩ = (n+k)(n+k+1)/2 + k`.
pub fn encode(n: u64, k: u64) -> u64 {
    let s = n + k;
    s * (s + 1) / 2 + k
}

/// Inverse of [`encode`].
pub fn decode(i: u64) -> (u64, u64) {
    let s = ((8 * i as u128 + 1).isqrt() as u64 - 1) / 2;
    let k = i - s * (s + 1) / 2;
    (s - k, k)
}

/// Truncated subtraction `1 ∸ x`.
pub fn monus1(x: u64) -> u64 {
    if x == 0 {
        1
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BaireError {
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("eventually periodic point needs a nonempty period")]
    EmptyPeriod,
    #[error("parse error at byte {pos}: {msg}\ngrammar: {grammar}")]
    Parse {
        pos: usize,
        msg: String,
        grammar: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, BaireError>;

type ValueFn = Arc<dyn Fn(u64) -> u64 + Send + Sync>;
type RowFn = Arc<dyn Fn(u64) -> Point + Send + Sync>;
type PrefixFn = Arc<dyn Fn(usize) -> Word + Send + Sync>;

/// A point given by a function of the index. Only built internally by named
/// constructions whose outputs are not in the closed presentation class; it
/// answers `value_at` and `row` but refuses structural predicates.
#[derive(Clone)]
pub struct LazyPoint {
    label: Arc<str>,
    value: ValueFn,
    rows: Option<RowFn>,
    cycle: Option<RowCycle>,
    /// Bulk prefix, for points whose values are cheaper to produce in one go.
    bulk: Option<PrefixFn>,
}

impl LazyPoint {
    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Clone)]
pub enum Point {
    EvPeriodic { head: Word, period: Word },
    Interleave(Box<Point>, Box<Point>),
    RowTuple { rows: BTreeMap<u64, Point>, default: Box<Point> },
    /// Characteristic sequence of a tree under the length-lexicographic word order.
    TreeChar(Arc<Tree>),
    Lazy(LazyPoint),
}

fn canonical(mut head: Word, period: Word) -> (Word, Word) {
    let p = period.len();
    let d = (1..=p)
        .find(|&d| p % d == 0 && (d..p).all(|i| period[i] == period[i - d]))
        .unwrap_or(p);
    let mut period: Word = period[..d].to_vec();
    while let Some(&last) = head.last() {
        if last != *period.last().unwrap() {
            break;
        }
        head.pop();
        period.rotate_right(1);
    }
    (head, period)
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

/// Least `n` such that every row index `≥ n` starts beyond a head of length `h`.
fn first_tail_row(h: u64) -> u64 {
    let mut n = 0;
    while encode(n, 0) < h {
        n += 1;
    }
    n
}

/// Finite description of how rows repeat: `row(n) = row(base + (n - base) % cycle)`
/// for `n ≥ base`. Produced for points whose row structure is periodic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowCycle {
    pub base: u64,
    pub cycle: u64,
}

impl RowCycle {
    /// Representative row index for `n`.
    pub fn class_of(&self, n: u64) -> u64 {
        if n < self.base {
            n
        } else {
            self.base + (n - self.base) % self.cycle
        }
    }

    /// All representative indices.
    pub fn representatives(&self) -> std::ops::Range<u64> {
        0..self.base + self.cycle
    }
}

impl Point {
    /// `head · period^ω`. Panics on an empty period; see [`Point::try_evp`].
    pub fn evp(head: impl Into<Word>, period: impl Into<Word>) -> Point {
        Point::try_evp(head, period).expect("nonempty period")
    }

    pub fn try_evp(head: impl Into<Word>, period: impl Into<Word>) -> Result<Point> {
        let period = period.into();
        if period.is_empty() {
            return Err(BaireError::EmptyPeriod);
        }
        let (head, period) = canonical(head.into(), period);
        Ok(Point::EvPeriodic { head, period })
    }

    pub fn constant(c: u64) -> Point {
        Point::evp(vec![], vec![c])
    }

    pub fn zeros() -> Point {
        Point::constant(0)
    }

    pub fn ones() -> Point {
        Point::constant(1)
    }

    pub fn pair(a: Point, b: Point) -> Point {
        Point::Interleave(Box::new(a), Box::new(b))
    }

    pub fn rows(rows: BTreeMap<u64, Point>, default: Point) -> Point {
        Point::RowTuple {
            rows,
            default: Box::new(default),
        }
    }

    /// `⟨p, p, p, ...⟩`.
    pub fn repeat_rows(p: Point) -> Point {
        Point::rows(BTreeMap::new(), p)
    }

    pub fn lazy(label: &str, value: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Point {
        Point::Lazy(LazyPoint {
            label: label.into(),
            value: Arc::new(value),
            rows: None,
            cycle: None,
            bulk: None,
        })
    }

    /// A lazy point that also knows how to produce its prefixes in bulk.
    pub fn lazy_bulk(
        label: &str,
        value: impl Fn(u64) -> u64 + Send + Sync + 'static,
        bulk: impl Fn(usize) -> Word + Send + Sync + 'static,
    ) -> Point {
        match Point::lazy(label, value) {
            Point::Lazy(mut l) => {
                l.bulk = Some(Arc::new(bulk));
                Point::Lazy(l)
            }
            _ => unreachable!(),
        }
    }

    /// Tuple whose `n`-th row is `rows(n)`.
    pub fn lazy_rows(label: &str, rows: impl Fn(u64) -> Point + Send + Sync + 'static) -> Point {
        let rows: RowFn = Arc::new(rows);
        let r = rows.clone();
        Point::Lazy(LazyPoint {
            label: label.into(),
            value: Arc::new(move |i| {
                let (n, k) = decode(i);
                r(n).value_at(k)
            }),
            rows: Some(rows),
            cycle: None,
            bulk: None,
        })
    }

    /// Tuple whose rows repeat as `cycle` says; `reps[j]` is the row of class `j`.
    pub fn cyclic_rows(cycle: RowCycle, reps: Vec<Point>) -> Point {
        assert_eq!(reps.len() as u64, cycle.base + cycle.cycle, "one row per class");
        if cycle.cycle == 1 {
            let mut reps = reps;
            let default = reps.pop().unwrap();
            return Point::rows(reps.into_iter().enumerate().map(|(n, r)| (n as u64, r)).collect(), default);
        }
        let reps = Arc::new(reps);
        match Point::lazy_rows("cyclic", move |n| reps[cycle.class_of(n) as usize].clone()) {
            Point::Lazy(mut l) => {
                l.cycle = Some(cycle);
                Point::Lazy(l)
            }
            _ => unreachable!(),
        }
    }

    /// Applies `f` to every row, keeping whatever row structure is known.
    pub fn map_rows(&self, f: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static) -> Result<Point> {
        match self.row_cycle() {
            Ok(c) => {
                let reps = c.representatives().map(|n| f(&self.row(n)?)).collect::<Result<Vec<_>>>()?;
                Ok(Point::cyclic_rows(c, reps))
            }
            Err(_) if self.is_lazy() => {
                let me = self.clone();
                Ok(Point::lazy_rows("mapped", move |n| {
                    me.row(n).and_then(|r| f(&r)).unwrap_or_else(|_| Point::zeros())
                }))
            }
            Err(e) => Err(e),
        }
    }

    pub fn value_at(&self, i: u64) -> u64 {
        match self {
            Point::EvPeriodic { head, period } => {
                let h = head.len() as u64;
                if i < h {
                    head[i as usize]
                } else {
                    period[((i - h) % period.len() as u64) as usize]
                }
            }
            Point::Interleave(a, b) => {
                if i % 2 == 0 {
                    a.value_at(i / 2)
                } else {
                    b.value_at(i / 2)
                }
            }
            Point::RowTuple { rows, default } => {
                let (n, k) = decode(i);
                rows.get(&n).unwrap_or(default).value_at(k)
            }
            Point::TreeChar(t) => t.contains(&spaces::word_at(i)) as u64,
            Point::Lazy(l) => (l.value)(i),
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        if let Point::Lazy(LazyPoint { bulk: Some(b), .. }) = self {
            return b(n);
        }
        (0..n as u64).map(|i| self.value_at(i)).collect()
    }

    /// The `n`-th row under the global pairing.
    pub fn row(&self, n: u64) -> Result<Point> {
        match self {
            Point::RowTuple { rows, default } => Ok(rows.get(&n).unwrap_or(default).clone()),
            Point::EvPeriodic { head, period } => {
                let h = head.len() as u64;
                let p = period.len() as u64;
                let mut k0 = 0;
                while encode(n, k0) < h {
                    k0 += 1;
                }
                let head: Word = (0..k0).map(|k| self.value_at(encode(n, k))).collect();
                let period: Word = (k0..k0 + 2 * p).map(|k| self.value_at(encode(n, k))).collect();
                Point::try_evp(head, period)
            }
            Point::Interleave(..) => match self.normalize() {
                Some(q) => q.row(n),
                None => {
                    let me = self.clone();
                    Ok(Point::lazy(&format!("row({n})"), move |k| me.value_at(encode(n, k))))
                }
            },
            Point::Lazy(l) => match &l.rows {
                Some(r) => Ok(r(n)),
                None => {
                    let v = l.value.clone();
                    Ok(Point::lazy(&format!("{}.row({n})", l.label), move |k| v(encode(n, k))))
                }
            },
            Point::TreeChar(_) => Err(BaireError::UnsupportedShape(
                "tree characteristic sequences have no row law".into(),
            )),
        }
    }

    /// How rows repeat, when that is structurally known.
    pub fn row_cycle(&self) -> Result<RowCycle> {
        match self {
            Point::RowTuple { rows, .. } => Ok(RowCycle {
                base: rows.keys().next_back().map_or(0, |m| m + 1),
                cycle: 1,
            }),
            Point::EvPeriodic { head, period } => Ok(RowCycle {
                base: first_tail_row(head.len() as u64),
                cycle: 2 * period.len() as u64,
            }),
            Point::Interleave(..) => match self.normalize() {
                Some(q) => q.row_cycle(),
                None => Err(BaireError::UnsupportedShape("interleave without row law".into())),
            },
            Point::Lazy(LazyPoint { cycle: Some(c), .. }) => Ok(*c),
            _ => Err(BaireError::UnsupportedShape(format!(
                "no finite row structure for {self}"
            ))),
        }
    }

    /// Eventually periodic normal form, if one exists for this presentation.
    pub fn normalize(&self) -> Option<Point> {
        match self {
            Point::EvPeriodic { .. } => Some(self.clone()),
            Point::Interleave(a, b) => {
                let (Some(Point::EvPeriodic { head: ha, period: pa }), Some(Point::EvPeriodic { head: hb, period: pb })) =
                    (a.normalize(), b.normalize())
                else {
                    return None;
                };
                let h = 2 * ha.len().max(hb.len()) as u64;
                let p = 2 * lcm(pa.len() as u64, pb.len() as u64);
                Point::try_evp(
                    (0..h).map(|i| self.value_at(i)).collect::<Word>(),
                    (h..h + p).map(|i| self.value_at(i)).collect::<Word>(),
                )
                .ok()
            }
            Point::RowTuple { rows, default } => {
                let Some(Point::EvPeriodic { head, period }) = default.normalize() else {
                    return None;
                };
                if !head.is_empty() || period.len() != 1 {
                    return None;
                }
                let c = period[0];
                let mut end = 0;
                for (&n, r) in rows {
                    let Some(Point::EvPeriodic { head, period }) = r.normalize() else {
                        return None;
                    };
                    if period != [c] {
                        return None;
                    }
                    if !head.is_empty() {
                        end = end.max(encode(n, head.len() as u64 - 1) + 1);
                    }
                }
                Point::try_evp(self.prefix(end as usize), vec![c]).ok()
            }
            Point::TreeChar(_) | Point::Lazy(_) => None,
        }
    }

    /// Least index whose value satisfies `pred`, decided on the presentation.
    pub fn first_index_where(&self, pred: &dyn Fn(u64) -> bool) -> Result<Option<u64>> {
        match self {
            Point::EvPeriodic { head, period } => Ok(head
                .iter()
                .chain(period.iter())
                .position(|&v| pred(v))
                .map(|i| i as u64)),
            Point::Interleave(a, b) => {
                let x = a.first_index_where(pred)?.map(|i| 2 * i);
                let y = b.first_index_where(pred)?.map(|i| 2 * i + 1);
                Ok(x.into_iter().chain(y).min())
            }
            Point::RowTuple { rows, default } => {
                let mut best: Option<u64> = None;
                for (&n, r) in rows {
                    if let Some(k) = r.first_index_where(pred)? {
                        best = Some(best.map_or(encode(n, k), |b| b.min(encode(n, k))));
                    }
                }
                if let Some(k) = default.first_index_where(pred)? {
                    let n = (0..).find(|n| !rows.contains_key(n)).unwrap();
                    best = Some(best.map_or(encode(n, k), |b| b.min(encode(n, k))));
                }
                Ok(best)
            }
            Point::TreeChar(t) => Ok(t.first_index_with(&|b| pred(b as u64))),
            Point::Lazy(l) => Err(BaireError::UnsupportedShape(format!(
                "structural predicate on on-demand point {}",
                l.label
            ))),
        }
    }

    /// Number of indices whose value satisfies `pred`; `None` means infinitely many.
    pub fn count_where(&self, pred: &dyn Fn(u64) -> bool) -> Result<Option<u64>> {
        match self {
            Point::EvPeriodic { head, period } => Ok(if period.iter().any(|&v| pred(v)) {
                None
            } else {
                Some(head.iter().filter(|&&v| pred(v)).count() as u64)
            }),
            Point::Interleave(a, b) => {
                Ok(a.count_where(pred)?.zip(b.count_where(pred)?).map(|(x, y)| x + y))
            }
            Point::RowTuple { rows, default } => {
                if default.count_where(pred)? != Some(0) {
                    return Ok(None);
                }
                let mut total = 0;
                for r in rows.values() {
                    match r.count_where(pred)? {
                        Some(c) => total += c,
                        None => return Ok(None),
                    }
                }
                Ok(Some(total))
            }
            Point::TreeChar(t) => Ok(t.count_with(&|b| pred(b as u64))),
            Point::Lazy(l) => Err(BaireError::UnsupportedShape(format!(
                "structural predicate on on-demand point {}",
                l.label
            ))),
        }
    }

    pub fn min_zero(&self) -> Result<Option<u64>> {
        self.first_index_where(&|v| v == 0)
    }

    pub fn exists_zero(&self) -> Result<bool> {
        Ok(self.min_zero()?.is_some())
    }

    pub fn min_nonzero(&self) -> Result<Option<u64>> {
        self.first_index_where(&|v| v != 0)
    }

    /// `None` when infinitely many entries are nonzero.
    pub fn count_nonzero(&self) -> Result<Option<u64>> {
        self.count_where(&|v| v != 0)
    }

    /// Whether `p(a·k + b) = 0` for every `k`.
    pub fn all_zero_on_progression(&self, a: u64, b: u64) -> Result<bool> {
        assert!(a >= 1, "progression step must be positive");
        if let Some(Point::EvPeriodic { head, period }) = self.normalize() {
            let q = Point::EvPeriodic { head: head.clone(), period: period.clone() };
            let bound = (head.len() + period.len()) as u64 + 1;
            return Ok((0..=bound).all(|k| q.value_at(a * k + b) == 0));
        }
        match self {
            // an odd step alternates between the components
            Point::Interleave(x, y) => {
                let side = |i: u64| if i % 2 == 0 { x } else { y };
                if a % 2 == 0 {
                    side(b).all_zero_on_progression(a / 2, b / 2)
                } else {
                    Ok(side(b).all_zero_on_progression(a, b / 2)?
                        && side(b + a).all_zero_on_progression(a, (b + a) / 2)?)
                }
            }
            // ⟨n,k⟩ mod a has period 2a in n and in k, so bounded windows decide
            Point::RowTuple { rows, default } => {
                let base = rows.keys().next_back().map_or(0, |m| m + 1);
                for n in 0..base + 2 * a + b {
                    let row = rows.get(&n).unwrap_or(default);
                    let Some(Point::EvPeriodic { head, period }) = row.normalize() else {
                        return Err(BaireError::UnsupportedShape(format!("progression query on row {row}")));
                    };
                    let span = (head.len() + period.len()) as u64 * 2 * a + b + 1;
                    let q = Point::EvPeriodic { head, period };
                    let hit = (0..span).any(|k| {
                        let i = encode(n, k);
                        i >= b && (i - b) % a == 0 && q.value_at(k) != 0
                    });
                    if hit {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Err(BaireError::UnsupportedShape(format!("progression query on {self}"))),
        }
    }

    /// Components of a pair name.
    pub fn split_pair(&self) -> (Point, Point) {
        match self {
            Point::Interleave(a, b) => ((**a).clone(), (**b).clone()),
            _ => (self.subsequence(2, 0), self.subsequence(2, 1)),
        }
    }

    /// `k ↦ p(a·k + b)`.
    pub fn subsequence(&self, a: u64, b: u64) -> Point {
        if let Some(Point::EvPeriodic { head, period }) = self.normalize() {
            let h = head.len() as u64;
            let p = period.len() as u64;
            let mut k0 = 0;
            while a * k0 + b < h {
                k0 += 1;
            }
            let q = Point::EvPeriodic { head, period };
            return Point::evp(
                (0..k0).map(|k| q.value_at(a * k + b)).collect::<Word>(),
                (k0..k0 + p).map(|k| q.value_at(a * k + b)).collect::<Word>(),
            );
        }
        let me = self.clone();
        Point::lazy(&format!("sub({a},{b})"), move |k| me.value_at(a * k + b))
    }

    /// `c · p`.
    pub fn prepend(&self, c: u64) -> Point {
        if let Some(Point::EvPeriodic { mut head, period }) = self.normalize() {
            head.insert(0, c);
            return Point::evp(head, period);
        }
        let me = self.clone();
        Point::lazy("prepend", move |i| if i == 0 { c } else { me.value_at(i - 1) })
    }

    /// Drops the first symbol.
    pub fn shift(&self) -> Point {
        self.subsequence(1, 1)
    }

    /// Pointwise image under `f`.
    pub fn map_values(&self, f: impl Fn(u64) -> u64 + Send + Sync + Clone + 'static) -> Point {
        match self {
            Point::EvPeriodic { head, period } => Point::evp(
                head.iter().map(|&v| f(v)).collect::<Word>(),
                period.iter().map(|&v| f(v)).collect::<Word>(),
            ),
            Point::Interleave(a, b) => Point::pair(a.map_values(f.clone()), b.map_values(f)),
            Point::RowTuple { rows, default } => Point::rows(
                rows.iter().map(|(&n, r)| (n, r.map_values(f.clone()))).collect(),
                default.map_values(f),
            ),
            _ => {
                let me = self.clone();
                Point::lazy("map", move |i| f(me.value_at(i)))
            }
        }
    }

    /// Agreement of the first `n` values.
    pub fn agrees_with(&self, other: &Point, n: usize) -> bool {
        (0..n as u64).all(|i| self.value_at(i) == other.value_at(i))
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self, Point::Lazy(_))
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Point) -> bool {
        match (self, other) {
            (Point::EvPeriodic { head: h1, period: p1 }, Point::EvPeriodic { head: h2, period: p2 }) => {
                canonical(h1.clone(), p1.clone()) == canonical(h2.clone(), p2.clone())
            }
            (Point::Interleave(a1, b1), Point::Interleave(a2, b2)) => a1 == a2 && b1 == b2,
            (Point::RowTuple { rows: r1, default: d1 }, Point::RowTuple { rows: r2, default: d2 }) => {
                r1 == r2 && d1 == d2
            }
            (Point::TreeChar(a), Point::TreeChar(b)) => a == b,
            (Point::Lazy(a), Point::Lazy(b)) => Arc::ptr_eq(&a.value, &b.value),
            _ => false,
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, w: &[u64]) -> fmt::Result {
    for (i, v) in w.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::EvPeriodic { head, period } => {
                write!(f, "evp(")?;
                write_list(f, head)?;
                write!(f, ";")?;
                write_list(f, period)?;
                write!(f, ")")
            }
            Point::Interleave(a, b) => write!(f, "pair({a},{b})"),
            Point::RowTuple { rows, default } => {
                write!(f, "rows(default={default}")?;
                for (n, r) in rows {
                    write!(f, ";{n}:{r}")?;
                }
                write!(f, ")")
            }
            Point::TreeChar(t) => write!(f, "{t}"),
            Point::Lazy(l) => write!(f, "<{}>", l.label),
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub const POINT_GRAMMAR: &str = "point := evp(NATS;NATS) | pair(point,point) | rows(default=point(;NAT:point)*)";

/// Small recursive-descent cursor shared by the literal parsers.
pub(crate) struct Cursor<'a> {
    pub src: &'a str,
    pub pos: usize,
    pub grammar: &'static str,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str, grammar: &'static str) -> Self {
        Cursor { src, pos: 0, grammar }
    }

    pub fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(BaireError::Parse {
            pos: self.pos,
            msg: msg.into(),
            grammar: self.grammar,
        })
    }

    pub fn skip_ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    pub fn nat(&mut self) -> Result<Option<u64>> {
        self.skip_ws();
        let digits: usize = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Ok(None);
        }
        let s = &self.rest()[..digits];
        match s.parse() {
            Ok(v) => {
                self.pos += digits;
                Ok(Some(v))
            }
            Err(_) => self.err("natural out of range"),
        }
    }

    pub fn nats(&mut self) -> Result<Word> {
        let mut out = vec![];
        while let Some(v) = self.nat()? {
            out.push(v);
        }
        Ok(out)
    }

    pub fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }

    pub fn point(&mut self) -> Result<Point> {
        if self.eat("evp(") {
            let head = self.nats()?;
            self.expect(";")?;
            let period = self.nats()?;
            if period.is_empty() {
                return self.err("period must be nonempty");
            }
            self.expect(")")?;
            Point::try_evp(head, period)
        } else if self.eat("pair(") {
            let a = self.point()?;
            self.expect(",")?;
            let b = self.point()?;
            self.expect(")")?;
            Ok(Point::pair(a, b))
        } else if self.eat("rows(") {
            self.expect("default")?;
            self.expect("=")?;
            let default = self.point()?;
            let mut rows = BTreeMap::new();
            while self.eat(";") {
                let Some(n) = self.nat()? else {
                    return self.err("expected row index");
                };
                self.expect(":")?;
                rows.insert(n, self.point()?);
            }
            self.expect(")")?;
            Ok(Point::rows(rows, default))
        } else {
            self.err("expected evp(, pair( or rows(")
        }
    }
}

impl std::str::FromStr for Point {
    type Err = BaireError;

    fn from_str(s: &str) -> Result<Point> {
        let mut c = Cursor::new(s, POINT_GRAMMAR);
        let p = c.point()?;
        c.finish()?;
        Ok(p)
    }
}
