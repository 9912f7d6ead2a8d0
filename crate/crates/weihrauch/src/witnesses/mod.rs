//! Reduction witnesses, the bounded-depth checker, and the witness algebra.
//!
//! A [`Witness`] claims `f ≤W g` (or `f ≤sW g`) through an inner translator
//! `K` and an outer machine `H`. The checker runs `H` against every
//! enumerated oracle behavior of `g` at `K(p)` and judges the result against
//! the value set of `f`. A pass means "verified to depth d", nothing more.

pub mod algebra;
pub mod named;

use std::fmt;
use std::sync::Arc;

use crate::baire::{Point, Word};
use crate::machine::{interleave_words, row_of_word, split_word, tuple_from_rows, Fuel, Machine, DEFAULT_FUEL};
use crate::problems::{self, PointMap, Problem, ProblemError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("middle problems differ: {0} vs {1}")]
    MiddleMismatch(String, String),
    #[error("not a cylinder witness: {0}")]
    NotACylinder(String),
    #[error("input {0} is outside the domain of {1}")]
    OutOfDomain(String, String),
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl From<ProblemError> for WitnessError {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::CapacityExceeded(m) => WitnessError::CapacityExceeded(m),
            ProblemError::OutOfDomain(m) => WitnessError::Unsupported(format!("out of domain: {m}")),
            ProblemError::Unsupported(m) => WitnessError::Unsupported(m),
        }
    }
}

pub type Result<T> = std::result::Result<T, WitnessError>;

/// A computable map given twice: as a machine, and as its exact action on
/// finitely presented points. The checker audits the first against the second.
#[derive(Clone)]
pub struct Translator {
    pub machine: Machine,
    pub exact: PointMap,
}

impl Translator {
    pub fn new(machine: Machine, exact: impl Fn(&Point) -> problems::Result<Point> + Send + Sync + 'static) -> Self {
        Translator {
            machine,
            exact: Arc::new(exact),
        }
    }

    pub fn name(&self) -> &str {
        self.machine.name()
    }

    pub fn apply(&self, p: &Point) -> problems::Result<Point> {
        (self.exact)(p)
    }

    pub fn identity() -> Self {
        Translator::new(Machine::identity(), |p| Ok(p.clone()))
    }

    pub fn constant(q: Point) -> Self {
        let r = q.clone();
        Translator::new(Machine::constant(q), move |_| Ok(r.clone()))
    }

    pub fn proj1() -> Self {
        Translator::new(Machine::proj1(), |p| Ok(p.split_pair().0))
    }

    pub fn proj2() -> Self {
        Translator::new(Machine::proj2(), |p| Ok(p.split_pair().1))
    }

    pub fn diag() -> Self {
        Translator::new(Machine::diag(), |p| Ok(Point::pair(p.clone(), p.clone())))
    }

    pub fn shift_left() -> Self {
        Translator::new(Machine::shift_left(), |p| Ok(p.shift()))
    }

    pub fn inject(b: u64) -> Self {
        Translator::new(Machine::inject(b), move |p| Ok(p.prepend(b)))
    }

    pub fn compose(outer: &Translator, inner: &Translator) -> Self {
        let (o, i) = (outer.exact.clone(), inner.exact.clone());
        Translator::new(Machine::compose(outer.machine.clone(), inner.machine.clone()), move |p| o(&i(p)?))
    }

    pub fn pair(a: &Translator, b: &Translator) -> Self {
        let (x, y) = (a.exact.clone(), b.exact.clone());
        Translator::new(Machine::pair(a.machine.clone(), b.machine.clone()), move |p| {
            Ok(Point::pair(x(p)?, y(p)?))
        })
    }

    pub fn tensor(a: &Translator, b: &Translator) -> Self {
        let (x, y) = (a.exact.clone(), b.exact.clone());
        Translator::new(Machine::tensor(a.machine.clone(), b.machine.clone()), move |p| {
            let (l, r) = p.split_pair();
            Ok(Point::pair(x(&l)?, y(&r)?))
        })
    }
}

impl fmt::Debug for Translator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Translator({})", self.machine.name())
    }
}

#[derive(Clone)]
pub struct Witness {
    pub name: String,
    pub f: Problem,
    pub g: Problem,
    pub k: Translator,
    pub h: Machine,
    pub strong: bool,
}

impl Witness {
    pub fn new(name: &str, f: Problem, g: Problem, k: Translator, h: Machine, strong: bool) -> Self {
        Witness {
            name: name.into(),
            f,
            g,
            k,
            h,
            strong,
        }
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn claim(&self) -> String {
        format!("{} {} {}", self.f, if self.strong { "≤sW" } else { "≤W" }, self.g)
    }

    /// The outer machine in the ordinary shape `H⟨p, r⟩`.
    pub fn ordinary_h(&self) -> Machine {
        if self.strong {
            Machine::compose(self.h.clone(), Machine::proj2())
        } else {
            self.h.clone()
        }
    }
}

impl fmt::Debug for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Witness({}: {})", self.name, self.claim())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckConfig {
    pub depth: usize,
    /// Largest number of oracle behaviors tried per input.
    pub behavior_cap: u128,
    /// Shrink the enumerated coordinates to stay under the cap instead of failing.
    pub adaptive: bool,
    /// Output length at which `K`'s machine is audited against its exact map.
    pub k_depth: usize,
    pub fuel: u64,
}

pub const DEFAULT_BEHAVIOR_CAP: u128 = 1 << 12;

impl CheckConfig {
    pub fn new(depth: usize) -> Self {
        CheckConfig {
            depth,
            behavior_cap: DEFAULT_BEHAVIOR_CAP,
            adaptive: false,
            k_depth: 2 * depth,
            fuel: DEFAULT_FUEL,
        }
    }

    pub fn adaptive(mut self) -> Self {
        self.adaptive = true;
        self
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.behavior_cap = cap;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailReason {
    /// `K`'s machine stopped producing output.
    KStalled,
    /// `K`'s machine disagrees with its exact map.
    KDisagrees,
    /// `K(p)` is not a valid instance of `g`.
    KOutOfDomain,
    /// `H` stopped producing output before the checked depth.
    HStalled,
    /// `H` wrote a symbol no admissible answer of `f` has.
    WrongAnswer,
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailReason::KStalled => "K stalled",
            FailReason::KDisagrees => "K machine disagrees with its exact map",
            FailReason::KOutOfDomain => "K(p) outside the domain of g",
            FailReason::HStalled => "H stalled",
            FailReason::WrongAnswer => "wrong answer",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    /// Index of the oracle behavior, when the failure depends on one.
    pub behavior: Option<usize>,
    pub coordinate: usize,
    pub reason: FailReason,
}

#[derive(Debug, Clone)]
pub struct InputReport {
    pub input: String,
    /// Coordinates on which oracle choices were enumerated exhaustively.
    pub choice_depth: usize,
    pub behaviors: usize,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub witness: String,
    pub claim: String,
    pub depth: usize,
    pub inputs: Vec<InputReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.inputs.iter().all(|i| i.failures.is_empty())
    }

    pub fn first_failure(&self) -> Option<(&InputReport, &Failure)> {
        self.inputs.iter().find_map(|i| i.failures.first().map(|f| (i, f)))
    }

    pub fn behaviors(&self) -> usize {
        self.inputs.iter().map(|i| i.behaviors).sum()
    }

    pub fn min_choice_depth(&self) -> usize {
        self.inputs.iter().map(|i| i.choice_depth).min().unwrap_or(self.depth)
    }

    /// One line: name, verdict, depth.
    pub fn summary(&self) -> String {
        match self.first_failure() {
            None => format!(
                "{}: PASS (verified to depth {}; {} inputs, {} behaviors, choices enumerated on ≥ {} coordinates)",
                self.witness,
                self.depth,
                self.inputs.len(),
                self.behaviors(),
                self.min_choice_depth()
            ),
            Some((i, f)) => format!(
                "{}: FAIL at depth {}: input {}{}: {} at coordinate {}",
                self.witness,
                self.depth,
                i.input,
                f.behavior.map(|b| format!(", behavior {b}")).unwrap_or_default(),
                f.reason,
                f.coordinate
            ),
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

fn first_mismatch(a: &[u64], b: &[u64]) -> Option<usize> {
    (0..a.len().min(b.len())).find(|&i| a[i] != b[i])
}

fn check_input(w: &Witness, p: &Point, cfg: &CheckConfig) -> Result<InputReport> {
    if !w.f.in_domain(p)? {
        return Err(WitnessError::OutOfDomain(p.to_string(), w.f.name()));
    }
    let mut report = InputReport {
        input: p.to_string(),
        choice_depth: cfg.depth,
        behaviors: 0,
        failures: vec![],
    };
    let mut fail = |behavior, coordinate, reason| {
        report.failures.push(Failure {
            behavior,
            coordinate,
            reason,
        });
    };
    let q = w.k.apply(p)?;
    let audit = w.k.machine.run_on_point_with(p, cfg.k_depth, cfg.fuel);
    if let Some(i) = first_mismatch(&audit.output, &q.prefix(audit.output.len())) {
        fail(None, i, FailReason::KDisagrees);
    } else if !audit.productive {
        fail(None, audit.output.len(), FailReason::KStalled);
    }
    if !w.g.in_domain(&q)? {
        fail(None, 0, FailReason::KOutOfDomain);
    }
    if !report.failures.is_empty() {
        return Ok(report);
    }
    let oracle = w.g.value_set(&q)?;
    let want = w.f.value_set(p)?;
    let mut c = cfg.depth;
    while oracle.behavior_count(c) > cfg.behavior_cap {
        if !cfg.adaptive || c == 0 {
            return Err(WitnessError::CapacityExceeded(format!(
                "{} behaviors of {} at {} exceed the cap {}",
                oracle.behavior_count(c),
                w.g,
                q,
                cfg.behavior_cap
            )));
        }
        c -= 1;
    }
    report.choice_depth = c;
    let behaviors = oracle.behaviors(c);
    report.behaviors = behaviors.len();
    for (b, r) in behaviors.into_iter().enumerate() {
        let input = if w.strong { r } else { Point::pair(p.clone(), r) };
        let out = w.h.run_on_point_with(&input, cfg.depth, cfg.fuel);
        if let Err(i) = want.check_prefix(&out.output) {
            report.failures.push(Failure {
                behavior: Some(b),
                coordinate: i,
                reason: FailReason::WrongAnswer,
            });
        } else if !out.productive {
            report.failures.push(Failure {
                behavior: Some(b),
                coordinate: out.output.len(),
                reason: FailReason::HStalled,
            });
        }
    }
    Ok(report)
}

/// Checks `w` on every corpus point; inputs run in parallel, results keep corpus order.
pub fn check(w: &Witness, corpus: &[Point], cfg: &CheckConfig) -> Result<Report> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(corpus.len().max(1));
    let chunk = corpus.len().div_ceil(threads).max(1);
    let results: Vec<Result<Vec<InputReport>>> = std::thread::scope(|s| {
        let handles: Vec<_> = corpus
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|p| check_input(w, p, cfg)).collect::<Result<Vec<_>>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("checker thread panicked")).collect()
    });
    let mut inputs = vec![];
    for r in results {
        inputs.extend(r?);
    }
    Ok(Report {
        witness: w.name.clone(),
        claim: w.claim(),
        depth: cfg.depth,
        inputs,
    })
}

// ---------------------------------------------------------------- name layouts

/// Answers of ℕ-valued problems are single symbols; parallelizations of them
/// are flat sequences. Everything else is a full name, tupled row-wise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Flat,
    Tuple,
}

impl Layout {
    pub fn of(f: &Problem) -> Layout {
        if f.nat_valued() {
            Layout::Flat
        } else {
            Layout::Tuple
        }
    }

    /// Known prefix of the `n`-th answer name inside a parallel answer prefix.
    /// A flat answer `v` is read as the name `v·0^ω`, padded to the input length (at most 64).
    pub fn read_row(self, w: &[u64], n: u64) -> Word {
        match self {
            Layout::Tuple => row_of_word(w, n),
            Layout::Flat => match w.get(n as usize) {
                Some(&v) => {
                    let mut r = vec![0; w.len().min(64)];
                    r[0] = v;
                    r
                }
                None => vec![],
            },
        }
    }

    /// Parallel answer prefix from per-row answer prefixes.
    pub fn write_rows(self, mut rows: impl FnMut(u64) -> Word, max_len: usize) -> Word {
        match self {
            Layout::Tuple => tuple_from_rows(rows, max_len),
            Layout::Flat => {
                let mut out = vec![];
                for n in 0..max_len as u64 {
                    match rows(n).first() {
                        Some(&v) => out.push(v),
                        None => break,
                    }
                }
                out
            }
        }
    }

    /// Exact `n`-th answer of a parallel answer point.
    pub fn row_point(self, r: &Point, n: u64) -> problems::Result<Point> {
        match self {
            Layout::Tuple => Ok(r.row(n)?),
            Layout::Flat => Ok(crate::spaces::encode_nat(r.value_at(n))),
        }
    }
}

/// Machine acting symbol by symbol.
pub fn pointwise(name: &str, f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Machine {
    Machine::new(name, move |w, fuel| {
        fuel.tick(w.len() as u64);
        w.iter().map(|&v| f(v)).collect()
    })
}

/// Machine whose output is a nat name `v·0…0` once `v` is determined from the input.
pub fn nat_output(name: &str, decide: impl Fn(&[u64]) -> Option<u64> + Send + Sync + 'static) -> Machine {
    Machine::new(name, move |w, _| match decide(w) {
        Some(v) => {
            let mut out = vec![0; w.len().max(1)];
            out[0] = v;
            out
        }
        None => vec![],
    })
}

/// Runs `m` on a word with a fresh fuel budget.
pub(crate) fn eval_fresh(m: &Machine, w: &[u64]) -> Word {
    m.eval(w, &mut Fuel::new(DEFAULT_FUEL))
}

/// `⟨a, b⟩` as far as both are known.
pub(crate) fn pair_words(a: &[u64], b: &[u64]) -> Word {
    interleave_words(a, b)
}

pub(crate) fn unpair_word(w: &[u64]) -> (Word, Word) {
    split_word(w)
}
