//! Represented spaces at desk scale: naturals, ternary truth values, binary
//! trees, clopen compacts of Cantor space and dyadic rationals.

use std::collections::BTreeSet;
use std::fmt;

use crate::baire::{self, BaireError, Cursor, Point, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("prefix too short to decode")]
    InsufficientPrefix,
    #[error("not a name: {0}")]
    NotAName(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error(transparent)]
    Baire(#[from] BaireError),
}

pub type Result<T> = std::result::Result<T, SpaceError>;

/// Index of a binary word in the length-lexicographic enumeration
/// `ε, 0, 1, 00, 01, 10, 11, ...`.
pub fn word_index(w: &[u64]) -> u64 {
    let v = w.iter().fold(0u64, |acc, &b| 2 * acc + b);
    (1u64 << w.len()) - 1 + v
}

/// Inverse of [`word_index`].
pub fn word_at(i: u64) -> Word {
    let len = 63 - (i + 1).leading_zeros() as usize;
    let v = i + 1 - (1u64 << len);
    (0..len).rev().map(|j| (v >> j) & 1).collect()
}

/// All binary words of length `n` in lexicographic order.
pub fn words_of_len(n: usize) -> impl Iterator<Item = Word> {
    (0u64..1 << n).map(move |v| (0..n).rev().map(|j| (v >> j) & 1).collect())
}

pub fn is_binary(w: &[u64]) -> bool {
    w.iter().all(|&b| b <= 1)
}

pub fn format_word(w: &[u64]) -> String {
    if w.is_empty() {
        "e".into()
    } else {
        w.iter().map(|b| b.to_string()).collect()
    }
}

pub fn parse_word(s: &str) -> Option<Word> {
    if s == "e" {
        return Some(vec![]);
    }
    s.chars()
        .map(|c| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        })
        .collect()
}

// ---------------------------------------------------------------- naturals

pub fn encode_nat(n: u64) -> Point {
    Point::evp(vec![n], vec![0])
}

pub fn decode_nat(prefix: &[u64]) -> Result<u64> {
    prefix.first().copied().ok_or(SpaceError::InsufficientPrefix)
}

// ---------------------------------------------------------------- ternary

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ternary {
    Zero,
    One,
    Half,
}

impl Ternary {
    pub const ALL: [Ternary; 3] = [Ternary::Zero, Ternary::One, Ternary::Half];

    pub fn from_bool(b: bool) -> Self {
        if b {
            Ternary::One
        } else {
            Ternary::Zero
        }
    }

    /// Boolean resolutions `L(t)`.
    pub fn resolutions(self) -> &'static [bool] {
        match self {
            Ternary::Zero => &[false],
            Ternary::One => &[true],
            Ternary::Half => &[false, true],
        }
    }
}

impl fmt::Display for Ternary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ternary::Zero => "0",
            Ternary::One => "1",
            Ternary::Half => "½",
        })
    }
}

pub fn encode_ternary(t: Ternary) -> Point {
    match t {
        Ternary::Zero => Point::evp(vec![0, 1], vec![0]),
        Ternary::One => Point::evp(vec![1], vec![0]),
        Ternary::Half => Point::zeros(),
    }
}

/// `δ_𝕋`: nonzero at an odd index names 0, at an even index names 1, none names ½.
pub fn decode_ternary(p: &Point) -> Result<Ternary> {
    match p.count_nonzero()? {
        Some(0) => Ok(Ternary::Half),
        Some(1) => {
            let i = p.min_nonzero()?.expect("one nonzero entry");
            Ok(if i % 2 == 1 { Ternary::Zero } else { Ternary::One })
        }
        _ => Err(SpaceError::NotAName(format!("{p} has two nonzero entries"))),
    }
}

// ---------------------------------------------------------------- trees

/// Finite explicit part plus finitely many eventually periodic live paths.
#[derive(Debug, Clone, PartialEq)]
pub struct FinTree {
    depth: usize,
    nodes: BTreeSet<Word>,
    live: Vec<Point>,
}

impl FinTree {
    pub fn new(depth: usize, nodes: impl IntoIterator<Item = Word>, live: Vec<Point>) -> Result<Self> {
        let nodes: BTreeSet<Word> = nodes.into_iter().collect();
        for w in &nodes {
            if !is_binary(w) || w.len() > depth {
                return Err(SpaceError::InvariantViolation(format!(
                    "node {} is not a binary word of length ≤ {depth}",
                    format_word(w)
                )));
            }
            if let Some((_, parent)) = w.split_last() {
                if !nodes.contains(parent) {
                    return Err(SpaceError::InvariantViolation(format!(
                        "nodes not prefix-closed at {}",
                        format_word(w)
                    )));
                }
            }
        }
        for p in &live {
            match p.normalize() {
                Some(Point::EvPeriodic { head, period }) if is_binary(&head) && is_binary(&period) => {}
                _ => {
                    return Err(SpaceError::InvariantViolation(format!(
                        "live path {p} is not an eventually periodic binary point"
                    )))
                }
            }
        }
        Ok(FinTree { depth, nodes, live })
    }

    /// The tree whose members are exactly the prefixes of `live`.
    pub fn from_paths(live: Vec<Point>) -> Result<Self> {
        FinTree::new(0, std::iter::empty(), live)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn nodes(&self) -> &BTreeSet<Word> {
        &self.nodes
    }

    pub fn live(&self) -> &[Point] {
        &self.live
    }

    pub fn on_live_path(&self, w: &[u64]) -> bool {
        self.live.iter().any(|p| p.prefix(w.len()) == w)
    }

    pub fn contains(&self, w: &[u64]) -> bool {
        self.nodes.contains(w) || self.on_live_path(w)
    }

    /// Longest head plus one period over all live paths.
    pub fn live_horizon(&self) -> usize {
        self.live
            .iter()
            .filter_map(|p| match p.normalize() {
                Some(Point::EvPeriodic { head, period }) => Some(head.len() + period.len()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }
}

/// Compact subset of Cantor space: everything outside finitely many cylinders.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClopenCompact {
    excluded: BTreeSet<Word>,
}

/// Largest excluded-word length handled by exhaustive cylinder analysis.
pub const CLOPEN_DEPTH_CAP: usize = 12;

impl ClopenCompact {
    pub fn new(excluded: impl IntoIterator<Item = Word>) -> Result<Self> {
        let excluded: BTreeSet<Word> = excluded.into_iter().collect();
        if let Some(w) = excluded.iter().find(|w| !is_binary(w)) {
            return Err(SpaceError::InvariantViolation(format!("excluded word {w:?} is not binary")));
        }
        Ok(ClopenCompact { excluded })
    }

    pub fn full() -> Self {
        ClopenCompact::default()
    }

    pub fn excluded(&self) -> &BTreeSet<Word> {
        &self.excluded
    }

    /// Length of the longest excluded word.
    pub fn depth(&self) -> usize {
        self.excluded.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// No prefix of `w` is excluded.
    pub fn avoids(&self, w: &[u64]) -> bool {
        is_binary(w) && (0..=w.len()).all(|n| !self.excluded.contains(&w[..n]))
    }

    /// The cylinder of `w` meets the compact.
    pub fn meets(&self, w: &[u64]) -> bool {
        if !self.avoids(w) {
            return false;
        }
        // excluded words extending `w` are contiguous in lexicographic order
        let below = self.excluded.range(w.to_vec()..).next().is_some_and(|u| u.len() > w.len() && u.starts_with(w));
        if !below {
            return true;
        }
        let mut v = w.to_vec();
        v.push(0);
        if self.meets(&v) {
            return true;
        }
        *v.last_mut().unwrap() = 1;
        self.meets(&v)
    }

    pub fn is_empty(&self) -> bool {
        !self.meets(&[])
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.avoids(&p.prefix(self.depth()))
    }

    /// Words of length `n` whose cylinders meet the compact.
    pub fn admitted_words(&self, n: usize) -> Vec<Word> {
        let mut out = vec![];
        let mut stack = vec![vec![]];
        while let Some(w) = stack.pop() {
            if !self.meets(&w) {
                continue;
            }
            if w.len() == n {
                out.push(w);
                continue;
            }
            for b in [1, 0] {
                let mut v = w.clone();
                v.push(b);
                stack.push(v);
            }
        }
        out
    }

    /// Per-coordinate allowed bits when the compact is a product set.
    pub fn product_shape(&self) -> Result<Option<Vec<BTreeSet<u64>>>> {
        let d = self.depth();
        if d > CLOPEN_DEPTH_CAP {
            return Err(SpaceError::Capacity(format!(
                "excluded words of length {d} exceed the cap {CLOPEN_DEPTH_CAP}"
            )));
        }
        let words = self.admitted_words(d);
        if words.is_empty() {
            return Ok(None);
        }
        let coords: Vec<BTreeSet<u64>> = (0..d).map(|i| words.iter().map(|w| w[i]).collect()).collect();
        let size: usize = coords.iter().map(BTreeSet::len).product();
        Ok((size == words.len()).then_some(coords))
    }
}

impl fmt::Display for ClopenCompact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "clopen(exclude:")?;
        for w in &self.excluded {
            write!(f, " {}", format_word(w))?;
        }
        write!(f, ")")
    }
}

/// Negative-information name: each excluded word once (as index + 1), then zeros.
pub fn encode_clopen(k: &ClopenCompact) -> Point {
    Point::evp(
        k.excluded.iter().map(|w| word_index(w) + 1).collect::<Word>(),
        vec![0],
    )
}

/// Superset approximation read off a name prefix.
pub fn decode_clopen_prefix(prefix: &[u64]) -> ClopenCompact {
    ClopenCompact {
        excluded: prefix.iter().filter(|&&c| c > 0).map(|&c| word_at(c - 1)).collect(),
    }
}

/// Exact compact named by a finitely presented name.
pub fn decode_clopen(p: &Point) -> Result<ClopenCompact> {
    match p.normalize() {
        Some(Point::EvPeriodic { head, period }) if period.iter().all(|&c| c == 0) => {
            Ok(decode_clopen_prefix(&head))
        }
        Some(Point::EvPeriodic { head, period }) => {
            let mut all = head.clone();
            all.extend(period);
            Ok(decode_clopen_prefix(&all))
        }
        _ => Err(SpaceError::NotAName(format!("{p} is not a finitely presented compact name"))),
    }
}

/// The infinite binary trees the WKL constructions handle.
#[derive(Debug, Clone, PartialEq)]
pub enum Tree {
    Fin(FinTree),
    /// `{i₀…i_{n−1} : (∀m,k<n) p_m(2k+i_m)=0}` for a tuple `p`.
    Llpo(Point),
    /// Words whose cylinders meet the compact.
    Clopen(ClopenCompact),
    /// Read off a compact name: `v` is cut once a word listed before position `|v|` is a prefix of it.
    Listed(Point),
}

/// Excluded words listed in the first `n` entries of a compact name.
fn listed_before(name: &Point, n: usize) -> Vec<Word> {
    name.prefix(n).into_iter().filter(|&c| c > 0).map(|c| word_at(c - 1)).collect()
}

/// Position after which a compact name lists nothing new.
fn listing_horizon(name: &Point) -> usize {
    match name.normalize() {
        Some(Point::EvPeriodic { head, period }) => head.len() + period.len(),
        _ => 0,
    }
}

/// Scan horizon used for rows whose zero pattern is not structurally decidable.
const ROW_SCAN: u64 = 256;

fn row_allows(row: &Point, bit: u64) -> bool {
    row.all_zero_on_progression(2, bit)
        .unwrap_or_else(|_| (0..ROW_SCAN).all(|k| row.value_at(2 * k + bit) == 0))
}

impl Tree {
    pub fn contains(&self, w: &[u64]) -> bool {
        if !is_binary(w) {
            return false;
        }
        match self {
            Tree::Fin(t) => t.contains(w),
            Tree::Llpo(p) => {
                let n = w.len() as u64;
                (0..n).all(|m| (0..n).all(|k| p.value_at(baire::encode(m, 2 * k + w[m as usize])) == 0))
            }
            Tree::Clopen(k) => k.meets(w),
            Tree::Listed(name) => listed_before(name, w.len()).iter().all(|u| !baire::is_prefix(u, w)),
        }
    }

    /// Some infinite path runs through `w`.
    pub fn viable(&self, w: &[u64]) -> bool {
        if !is_binary(w) {
            return false;
        }
        match self {
            Tree::Fin(t) => t.on_live_path(w),
            Tree::Llpo(p) => {
                (0..w.len() as u64).all(|m| p.row(m).map(|r| row_allows(&r, w[m as usize])).unwrap_or(false))
            }
            Tree::Clopen(k) => k.meets(w),
            Tree::Listed(name) => self.contains(w) && decode_clopen(name).is_ok_and(|k| k.meets(w)),
        }
    }

    pub fn is_infinite(&self) -> bool {
        match self {
            Tree::Fin(t) => !t.live.is_empty(),
            Tree::Llpo(p) => match p.row_cycle() {
                Ok(c) => c.representatives().all(|m| {
                    p.row(m)
                        .map(|r| row_allows(&r, 0) || row_allows(&r, 1))
                        .unwrap_or(false)
                }),
                Err(_) => false,
            },
            Tree::Clopen(k) => !k.is_empty(),
            Tree::Listed(name) => decode_clopen(name).is_ok_and(|k| !k.is_empty()),
        }
    }

    /// Some tree word of length `n` is comparable with `u`.
    pub fn comparable_at_level(&self, u: &[u64], n: usize) -> bool {
        if n <= u.len() {
            return self.contains(&u[..n]);
        }
        if !self.contains(u) {
            return false;
        }
        match self {
            Tree::Fin(t) => {
                t.on_live_path(u) || t.nodes.iter().any(|v| v.len() == n && baire::is_prefix(u, v))
            }
            Tree::Llpo(p) => {
                let n = n as u64;
                let free = |m: u64, b: u64| (0..n).all(|k| p.value_at(baire::encode(m, 2 * k + b)) == 0);
                (0..u.len() as u64).all(|m| free(m, u[m as usize]))
                    && (u.len() as u64..n).all(|m| free(m, 0) || free(m, 1))
            }
            Tree::Clopen(k) => k.meets(u),
            // words of length n are cut only by listed words no longer than n
            Tree::Listed(name) => ClopenCompact {
                excluded: listed_before(name, n).into_iter().filter(|w| w.len() <= n).collect(),
            }
            .meets(u),
        }
    }

    /// A level from which a non-viable `u` has no comparable tree word.
    /// Least `n ≤ upto` with `!comparable_at_level(u, n)`.
    pub fn first_blocked_level(&self, u: &[u64], upto: usize) -> Option<usize> {
        let Tree::Listed(name) = self else {
            return (0..=upto).find(|&n| !self.comparable_at_level(u, n));
        };
        if let Some(n) = (0..=u.len().min(upto)).find(|&n| !self.contains(&u[..n])) {
            return Some(n);
        }
        // grow the cut set one listing position at a time
        let mut cut = ClopenCompact::default();
        let mut pending: Vec<Word> = listed_before(name, u.len());
        for n in u.len() + 1..=upto {
            let c = name.value_at(n as u64 - 1);
            if c > 0 {
                pending.push(word_at(c - 1));
            }
            let (now, later): (Vec<Word>, Vec<Word>) = pending.into_iter().partition(|w| w.len() <= n);
            pending = later;
            cut.excluded.extend(now);
            if !cut.meets(u) {
                return Some(n);
            }
        }
        None
    }

    pub fn dead_end_bound(&self, u: &[u64]) -> usize {
        let floor = u.len() + 1;
        match self {
            Tree::Fin(t) => t.depth.max(floor) + 1,
            Tree::Llpo(p) => (0..u.len())
                .filter_map(|m| {
                    let row = p.row(m as u64).ok()?;
                    row.subsequence(2, u[m]).min_nonzero().ok().flatten()
                })
                .map(|k| k as usize + 1)
                .max()
                .unwrap_or(0)
                .max(floor),
            Tree::Clopen(k) => k.depth().max(floor) + 1,
            Tree::Listed(name) => {
                let k = decode_clopen(name).map_or(0, |k| k.depth());
                k.max(listing_horizon(name)).max(floor) + 1
            }
        }
    }

    fn is_full(&self) -> bool {
        match self {
            Tree::Fin(_) => false,
            Tree::Llpo(p) => p.count_nonzero() == Ok(Some(0)),
            Tree::Clopen(k) => k.excluded.is_empty(),
            Tree::Listed(name) => name.count_nonzero() == Ok(Some(0)),
        }
    }

    /// A level at which a non-full tree already misses some word.
    fn gap_level(&self) -> usize {
        match self {
            Tree::Fin(t) => t.depth + 64 - (t.live.len() as u64 + 1).leading_zeros() as usize + 1,
            Tree::Llpo(p) => match p.min_nonzero() {
                Ok(Some(i)) => {
                    let (m, j) = baire::decode(i);
                    (m + 1).max(j / 2 + 1) as usize
                }
                _ => 0,
            },
            Tree::Clopen(k) => k.depth(),
            Tree::Listed(name) => {
                listing_horizon(name) + decode_clopen(name).map_or(0, |k| k.depth()) + 1
            }
        }
    }

    pub(crate) fn first_index_with(&self, pred: &dyn Fn(bool) -> bool) -> Option<u64> {
        let member = self.contains(&[]);
        if pred(member) {
            return Some(0);
        }
        if member && !self.is_full() {
            let end = (1u64 << (self.gap_level() + 1)) - 1;
            return (0..end).find(|&i| pred(self.contains(&word_at(i))));
        }
        None
    }

    pub(crate) fn count_with(&self, pred: &dyn Fn(bool) -> bool) -> Option<u64> {
        let members = if self.is_infinite() {
            None
        } else {
            let mut count = 0u64;
            let mut level: Vec<Word> = if self.contains(&[]) { vec![vec![]] } else { vec![] };
            while !level.is_empty() {
                count += level.len() as u64;
                level = level
                    .iter()
                    .flat_map(|w| [0, 1].map(|b| [w.as_slice(), &[b]].concat()))
                    .filter(|w| self.contains(w))
                    .collect();
            }
            Some(count)
        };
        let non_members = if self.is_full() { Some(0) } else { None };
        let a = if pred(true) { members } else { Some(0) };
        let b = if pred(false) { non_members } else { Some(0) };
        a.zip(b).map(|(x, y)| x + y)
    }
}

impl fmt::Display for FinTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tree(depth={}; nodes:", self.depth)?;
        for w in &self.nodes {
            write!(f, " {}", format_word(w))?;
        }
        write!(f, "; live:")?;
        for (i, p) in self.live.iter().enumerate() {
            write!(f, "{}{p}", if i == 0 { " " } else { ", " })?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Fin(t) => write!(f, "{t}"),
            Tree::Llpo(p) => write!(f, "tree(llpo: {p})"),
            Tree::Clopen(k) => write!(f, "tree({k})"),
            Tree::Listed(name) => write!(f, "tree(listed: {name})"),
        }
    }
}

pub fn encode_tree(t: &FinTree) -> Point {
    Point::TreeChar(std::sync::Arc::new(Tree::Fin(t.clone())))
}

pub fn tree_point(t: Tree) -> Point {
    Point::TreeChar(std::sync::Arc::new(t))
}

pub const TREE_GRAMMAR: &str =
    "tree := tree(depth=NAT; nodes: WORD*; live: point(, point)*) | tree(llpo: point) | tree(listed: point) | tree(clopen); WORD := e | [01]+";
pub const CLOPEN_GRAMMAR: &str = "clopen := clopen(exclude: WORD*); WORD := e | [01]+";

fn cursor_words(c: &mut Cursor<'_>, stop: char) -> baire::Result<Vec<Word>> {
    let mut out = vec![];
    loop {
        c.skip_ws();
        let tok: String = c.rest().chars().take_while(|&ch| !ch.is_whitespace() && ch != stop).collect();
        if tok.is_empty() {
            return Ok(out);
        }
        match parse_word(&tok) {
            Some(w) => {
                out.push(w);
                c.pos += tok.len();
            }
            None => return c.err(format!("bad word `{tok}`")),
        }
    }
}

fn cursor_clopen(c: &mut Cursor<'_>) -> baire::Result<ClopenCompact> {
    c.expect("clopen(")?;
    c.expect("exclude")?;
    c.expect(":")?;
    let words = cursor_words(c, ')')?;
    c.expect(")")?;
    ClopenCompact::new(words).or_else(|e| c.err(e.to_string()))
}

pub fn parse_clopen(s: &str) -> Result<ClopenCompact> {
    let mut c = Cursor::new(s, CLOPEN_GRAMMAR);
    let k = cursor_clopen(&mut c)?;
    c.finish()?;
    Ok(k)
}

pub fn parse_tree(s: &str) -> Result<Tree> {
    let mut c = Cursor::new(s, TREE_GRAMMAR);
    c.expect("tree(")?;
    let t = if c.eat("llpo") {
        c.expect(":")?;
        Tree::Llpo(c.point()?)
    } else if c.eat("listed") {
        c.expect(":")?;
        Tree::Listed(c.point()?)
    } else if c.rest().trim_start().starts_with("clopen(") {
        Tree::Clopen(cursor_clopen(&mut c)?)
    } else {
        c.expect("depth")?;
        c.expect("=")?;
        let Some(depth) = c.nat()? else {
            return c.err("expected depth").map_err(Into::into);
        };
        c.expect(";")?;
        c.expect("nodes")?;
        c.expect(":")?;
        let nodes = cursor_words(&mut c, ';')?;
        c.expect(";")?;
        c.expect("live")?;
        c.expect(":")?;
        let mut live = vec![];
        c.skip_ws();
        if !c.rest().starts_with(')') {
            live.push(c.point()?);
            while c.eat(",") {
                live.push(c.point()?);
            }
        }
        Tree::Fin(FinTree::new(depth as usize, nodes, live)?)
    };
    c.expect(")")?;
    c.finish()?;
    Ok(t)
}

// ---------------------------------------------------------------- dyadics

/// `numerator / 2^exponent`, canonical (odd numerator or zero with exponent 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

fn zigzag(n: i64) -> u64 {
    ((n << 1) ^ (n >> 63)) as u64
}

fn unzigzag(z: u64) -> i64 {
    ((z >> 1) as i64) ^ -((z & 1) as i64)
}

/// Largest exponent accepted, keeping exact comparisons inside `i128`.
pub const MAX_EXP: u32 = 60;

impl Dyadic {
    pub fn new(mut num: i64, mut exp: u32) -> Self {
        if num == 0 {
            exp = 0;
        }
        while exp > 0 && num % 2 == 0 {
            num /= 2;
            exp -= 1;
        }
        Dyadic { num, exp }
    }

    pub fn zero() -> Self {
        Dyadic::new(0, 0)
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn signum(&self) -> i64 {
        self.num.signum()
    }

    pub fn code(&self) -> u64 {
        baire::encode(zigzag(self.num), self.exp as u64)
    }

    pub fn from_code(c: u64) -> Option<Self> {
        let (z, e) = baire::decode(c);
        (e <= MAX_EXP as u64).then(|| Dyadic::new(unzigzag(z), e as u32))
    }

    /// `|self − other| ≤ 2^{-n}`, exactly.
    pub fn within(&self, other: &Dyadic, n: u32) -> bool {
        let e = self.exp.max(other.exp).max(n);
        if e > 120 {
            return false;
        }
        let a = (self.num as i128) << (e - self.exp);
        let b = (other.num as i128) << (e - other.exp);
        (a - b).abs() <= 1i128 << (e - n)
    }

    /// Sign of `self + s·2^{-n}` compared with zero.
    pub fn shifted_sign(&self, s: i64, n: u32) -> i64 {
        let e = self.exp.max(n);
        let a = ((self.num as i128) << (e - self.exp)) + (s as i128) * (1i128 << (e - n));
        a.signum() as i64
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.exp)
        }
    }
}

/// Canonical name `code(x)^ω`.
pub fn encode_dyadic(x: Dyadic) -> Point {
    Point::constant(x.code())
}

/// A name is a sequence of codes `d_n` with `|x − d_n| ≤ 2^{-n}`; finitely
/// presented names are eventually constant at `code(x)`.
pub fn decode_dyadic(p: &Point) -> Result<Dyadic> {
    let Some(Point::EvPeriodic { head, period }) = p.normalize() else {
        return Err(SpaceError::NotAName(format!("{p} is not eventually periodic")));
    };
    if period.len() != 1 {
        return Err(SpaceError::NotAName(format!("{p} does not converge to a dyadic")));
    }
    let x = Dyadic::from_code(period[0]).ok_or_else(|| SpaceError::NotAName("exponent too large".into()))?;
    for (n, &c) in head.iter().enumerate() {
        let ok = Dyadic::from_code(c).is_some_and(|d| x.within(&d, n as u32));
        if !ok {
            return Err(SpaceError::NotAName(format!("entry {n} of {p} is not a 2^-{n} approximation")));
        }
    }
    Ok(x)
}

// ---------------------------------------------------------------- spaces

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Nat(u64),
    Baire(Point),
    Ternary(Ternary),
    Tree(FinTree),
    Dyadic(Dyadic),
    Clopen(ClopenCompact),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepresentedSpace {
    Nat,
    Baire,
    Ternary,
    Trees,
    Dyadics,
    Clopens,
}

impl RepresentedSpace {
    pub fn name(&self) -> &'static str {
        match self {
            RepresentedSpace::Nat => "ℕ",
            RepresentedSpace::Baire => "ℕ^ℕ",
            RepresentedSpace::Ternary => "𝕋",
            RepresentedSpace::Trees => "Tr",
            RepresentedSpace::Dyadics => "𝔻",
            RepresentedSpace::Clopens => "K₋",
        }
    }

    pub fn encode(&self, x: &Element) -> Result<Point> {
        match (self, x) {
            (RepresentedSpace::Nat, Element::Nat(n)) => Ok(encode_nat(*n)),
            (RepresentedSpace::Baire, Element::Baire(p)) => Ok(p.clone()),
            (RepresentedSpace::Ternary, Element::Ternary(t)) => Ok(encode_ternary(*t)),
            (RepresentedSpace::Trees, Element::Tree(t)) => Ok(encode_tree(t)),
            (RepresentedSpace::Dyadics, Element::Dyadic(d)) => Ok(encode_dyadic(*d)),
            (RepresentedSpace::Clopens, Element::Clopen(k)) => Ok(encode_clopen(k)),
            _ => Err(SpaceError::InvariantViolation(format!("{x:?} is not an element of {}", self.name()))),
        }
    }

    /// Whether `prefix` extends to some name of `x`.
    pub fn decode_check(&self, x: &Element, prefix: &[u64]) -> Consistency {
        let verdict = |b: bool| if b { Consistency::Consistent } else { Consistency::Inconsistent };
        match (self, x) {
            (RepresentedSpace::Nat, Element::Nat(n)) => verdict(prefix.first().is_none_or(|v| v == n)),
            (RepresentedSpace::Baire, Element::Baire(p)) => verdict(p.prefix(prefix.len()) == prefix),
            (RepresentedSpace::Ternary, Element::Ternary(t)) => {
                let nz: Vec<usize> = (0..prefix.len()).filter(|&i| prefix[i] != 0).collect();
                verdict(match nz.as_slice() {
                    [] => true,
                    [i] => *t == if i % 2 == 1 { Ternary::Zero } else { Ternary::One },
                    _ => false,
                })
            }
            (RepresentedSpace::Trees, Element::Tree(t)) => verdict(
                prefix
                    .iter()
                    .enumerate()
                    .all(|(i, &v)| v == t.contains(&word_at(i as u64)) as u64),
            ),
            (RepresentedSpace::Dyadics, Element::Dyadic(x)) => verdict(
                prefix
                    .iter()
                    .enumerate()
                    .all(|(n, &c)| Dyadic::from_code(c).is_some_and(|d| x.within(&d, n as u32))),
            ),
            (RepresentedSpace::Clopens, Element::Clopen(k)) => verdict(
                prefix
                    .iter()
                    .all(|&c| c == 0 || k.excluded.contains(&word_at(c - 1))),
            ),
            _ => Consistency::Unknown,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_blocked_level_on_listed_trees() {
        let names = [
            Point::evp(vec![0, 2, 0, 0, 5], vec![0]),
            Point::evp(vec![4, 0, 0, 0, 0, 0, 0, 12, 3], vec![0]),
            Point::evp(vec![0; 9].into_iter().chain([2, 7, 0, 3]).collect::<Word>(), vec![0]),
        ];
        for name in names {
            let t = Tree::Listed(name);
            for i in 0..63 {
                let u = word_at(i);
                let direct = (0..=20).find(|&n| !t.comparable_at_level(&u, n));
                assert_eq!(t.first_blocked_level(&u, 20), direct, "{t} at {u:?}");
            }
        }
    }

    #[test]
    fn word_enumeration_order() {
        let first: Vec<Word> = (0..7).map(word_at).collect();
        assert_eq!(first, vec![vec![], vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        for i in 0..2000 {
            assert_eq!(word_index(&word_at(i)), i);
        }
    }

    #[test]
    fn nat_names() {
        assert_eq!(encode_nat(3), Point::evp(vec![3], vec![0]));
        assert_eq!(decode_nat(&[5, 9, 9]), Ok(5));
        assert_eq!(decode_nat(&[]), Err(SpaceError::InsufficientPrefix));
        for n in 0..=20 {
            assert_eq!(decode_nat(&encode_nat(n).prefix(1)), Ok(n));
        }
    }

    #[test]
    fn ternary_names() {
        assert_eq!(decode_ternary(&Point::zeros()), Ok(Ternary::Half));
        assert_eq!(decode_ternary(&Point::evp(vec![0, 7], vec![0])), Ok(Ternary::Zero));
        assert_eq!(decode_ternary(&Point::evp(vec![7], vec![0])), Ok(Ternary::One));
        assert!(decode_ternary(&Point::evp(vec![1, 1], vec![0])).is_err());
        for t in Ternary::ALL {
            assert_eq!(decode_ternary(&encode_ternary(t)), Ok(t));
        }
    }

    #[test]
    fn fin_tree_membership() {
        let root_only = FinTree::new(0, [vec![]], vec![]).unwrap();
        let p = encode_tree(&root_only);
        assert_eq!(p.prefix(3), vec![1, 0, 0]);
        let zeros = FinTree::from_paths(vec![Point::zeros()]).unwrap();
        let t = Tree::Fin(zeros);
        for k in 0..=8 {
            assert!(t.contains(&vec![0; k]));
        }
        assert!(!t.contains(&[0, 1]));
        assert!(FinTree::new(2, [vec![0, 1]], vec![]).is_err());
        assert!(FinTree::new(1, [vec![], vec![2]], vec![]).is_err());
    }

    #[test]
    fn clopen_examples() {
        assert!(!ClopenCompact::full().is_empty());
        let k = ClopenCompact::new([vec![0]]).unwrap();
        assert!(k.contains_point(&Point::ones()));
        assert!(!k.contains_point(&Point::zeros()));
        let all = ClopenCompact::new(words_of_len(2)).unwrap();
        assert!(all.is_empty());
        let name = encode_clopen(&k);
        assert_eq!(decode_clopen(&name).unwrap(), k);
        assert_eq!(decode_clopen_prefix(&name.prefix(0)), ClopenCompact::full());
    }

    #[test]
    fn clopen_product_shape() {
        let k = ClopenCompact::new([vec![1]]).unwrap();
        assert_eq!(k.product_shape().unwrap(), Some(vec![BTreeSet::from([0])]));
        let k = ClopenCompact::new([vec![0, 0], vec![1, 1]]).unwrap();
        assert_eq!(k.product_shape().unwrap(), None);
    }

    #[test]
    fn dyadic_codes() {
        let x = Dyadic::new(-3, 2);
        assert_eq!(Dyadic::from_code(x.code()), Some(x));
        assert_eq!(Dyadic::new(4, 3), Dyadic::new(1, 1));
        assert_eq!(decode_dyadic(&encode_dyadic(x)).unwrap(), x);
        let bad = Point::evp(vec![Dyadic::new(5, 0).code()], vec![x.code()]);
        assert!(decode_dyadic(&bad).is_err());
        assert!(Dyadic::new(1, 1).within(&Dyadic::zero(), 1));
        assert!(!Dyadic::new(1, 1).within(&Dyadic::zero(), 2));
    }

    #[test]
    fn literal_roundtrip() {
        for s in [
            "tree(depth=2; nodes: e 0 01; live: evp(;0), evp(;1))",
            "tree(depth=0; nodes:; live: evp(;0))",
            "tree(llpo: rows(default=evp(;0)))",
            "tree(clopen(exclude: 00 11))",
        ] {
            let t = parse_tree(s).unwrap();
            assert_eq!(t.to_string(), s);
        }
        let k = parse_clopen("clopen(exclude: e 10)").unwrap();
        assert_eq!(parse_clopen(&k.to_string()).unwrap(), k);
        assert!(parse_tree("tree(depth=1; nodes: 0; live:)").is_err());
    }
}
