//! Monotone word functions standing in for Type-2 machines.
//!
//! A [`Machine`] maps a finite input prefix to a finite output prefix. The
//! stream function it computes is the limit over longer and longer prefixes.
//! Every combinator here preserves monotonicity.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::baire::{decode, encode, Point, Word};

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Step budget shared by one evaluation.
#[derive(Debug, Clone)]
pub struct Fuel {
    remaining: u64,
}

impl Fuel {
    pub fn new(budget: u64) -> Self {
        Fuel { remaining: budget }
    }

    /// Spends `n` steps; false once the budget is gone.
    pub fn tick(&mut self, n: u64) -> bool {
        if self.remaining >= n {
            self.remaining -= n;
            true
        } else {
            self.remaining = 0;
            false
        }
    }

    pub fn exhausted(&self) -> bool {
        self.remaining == 0
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel::new(DEFAULT_FUEL)
    }
}

type EvalFn = Arc<dyn Fn(&[u64], &mut Fuel) -> Word + Send + Sync>;

#[derive(Clone)]
pub struct Machine {
    name: Arc<str>,
    f: EvalFn,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOutcome {
    pub output: Word,
    pub productive: bool,
}

/// Interleaves two words as far as the pair name is determined.
pub fn interleave_words(a: &[u64], b: &[u64]) -> Word {
    let n = (2 * a.len()).min(2 * b.len() + 1);
    (0..n).map(|i| if i % 2 == 0 { a[i / 2] } else { b[i / 2] }).collect()
}

/// Even and odd positions of a word.
pub fn split_word(w: &[u64]) -> (Word, Word) {
    (
        w.iter().step_by(2).copied().collect(),
        w.iter().skip(1).step_by(2).copied().collect(),
    )
}

/// Known prefix of row `n` inside a flat tuple prefix.
pub fn row_of_word(w: &[u64], n: u64) -> Word {
    (0..)
        .map(|k| encode(n, k))
        .take_while(|&i| (i as usize) < w.len())
        .map(|i| w[i as usize])
        .collect()
}

/// Flat tuple prefix from row prefixes, stopping at the first unknown cell.
pub fn tuple_from_rows(mut rows: impl FnMut(u64) -> Word, max_len: usize) -> Word {
    let mut out = Vec::new();
    let mut cache: BTreeMap<u64, Word> = BTreeMap::new();
    for i in 0..max_len as u64 {
        let (n, k) = decode(i);
        let r = cache.entry(n).or_insert_with(|| rows(n));
        match r.get(k as usize) {
            Some(&v) => out.push(v),
            None => break,
        }
    }
    out
}

impl Machine {
    pub fn new(name: &str, f: impl Fn(&[u64], &mut Fuel) -> Word + Send + Sync + 'static) -> Self {
        Machine {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// Machine defined symbol by symbol: output position `i` is `sym(w, i)`,
    /// emitted as long as it is determined. Output length is capped at `2|w| + 16`.
    pub fn from_symbols(
        name: &str,
        sym: impl Fn(&[u64], u64) -> Option<u64> + Send + Sync + 'static,
    ) -> Self {
        Machine::new(name, move |w, fuel| {
            let cap = 2 * w.len() as u64 + 16;
            let mut out = Vec::new();
            for i in 0..cap {
                if !fuel.tick(1) {
                    break;
                }
                match sym(w, i) {
                    Some(v) => out.push(v),
                    None => break,
                }
            }
            out
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn eval(&self, w: &[u64], fuel: &mut Fuel) -> Word {
        if !fuel.tick(w.len() as u64) {
            return vec![];
        }
        (self.f)(w, fuel)
    }

    pub fn eval_word(&self, w: &[u64]) -> Word {
        self.eval(w, &mut Fuel::default())
    }

    pub fn identity() -> Self {
        Machine::new("id", |w, fuel| {
            fuel.tick(w.len() as u64);
            w.to_vec()
        })
    }

    /// Constant output `q`, emitted at the pace of the input.
    pub fn constant(q: Point) -> Self {
        let name = format!("const({q})");
        Machine::new(&name, move |w, fuel| {
            let n = w.len() + 1;
            fuel.tick(n as u64);
            q.prefix(n)
        })
    }

    pub fn shift_left() -> Self {
        Machine::new("L", |w, _| w.iter().skip(1).copied().collect())
    }

    pub fn inject(b: u64) -> Self {
        Machine::new(&format!("inject{b}"), move |w, _| {
            let mut out = Vec::with_capacity(w.len() + 1);
            out.push(b);
            out.extend_from_slice(w);
            out
        })
    }

    pub fn proj1() -> Self {
        Machine::new("π1", |w, _| split_word(w).0)
    }

    pub fn proj2() -> Self {
        Machine::new("π2", |w, _| split_word(w).1)
    }

    /// `⟨F,G⟩(p) = ⟨F(p), G(p)⟩`.
    pub fn pair(f: Machine, g: Machine) -> Self {
        let name = format!("⟨{},{}⟩", f.name, g.name);
        Machine::new(&name, move |w, fuel| {
            let a = f.eval(w, fuel);
            let b = g.eval(w, fuel);
            interleave_words(&a, &b)
        })
    }

    /// `(F⊗G)⟨p,q⟩ = ⟨F(p), G(q)⟩`.
    pub fn tensor(f: Machine, g: Machine) -> Self {
        let name = format!("({}⊗{})", f.name, g.name);
        Machine::new(&name, move |w, fuel| {
            let (x, y) = split_word(w);
            let a = f.eval(&x, fuel);
            let b = g.eval(&y, fuel);
            interleave_words(&a, &b)
        })
    }

    /// `D(p) = ⟨p,p⟩`.
    pub fn diag() -> Self {
        Machine::new("D", |w, _| interleave_words(w, w))
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: Machine, inner: Machine) -> Self {
        let name = format!("{}∘{}", outer.name, inner.name);
        Machine::new(&name, move |w, fuel| {
            let mid = inner.eval(w, fuel);
            outer.eval(&mid, fuel)
        })
    }

    /// Row-wise application: row `n` of the output is `ms[n]` (or `uniform`)
    /// applied to row `n` of the input.
    pub fn countable_tuple(ms: BTreeMap<u64, Machine>, uniform: Machine) -> Self {
        let name = format!("tuple({})", uniform.name);
        Machine::new(&name, move |w, fuel| {
            let out_cap = 2 * w.len() + 16;
            tuple_from_rows(
                |n| {
                    let r = row_of_word(w, n);
                    ms.get(&n).unwrap_or(&uniform).eval(&r, fuel)
                },
                out_cap,
            )
        })
    }

    /// Evaluates on growing prefixes of `p` until `depth` output symbols exist.
    pub fn run_on_point(&self, p: &Point, depth: usize) -> EvalOutcome {
        self.run_on_point_with(p, depth, DEFAULT_FUEL)
    }

    pub fn run_on_point_with(&self, p: &Point, depth: usize, budget: u64) -> EvalOutcome {
        const MAX_INPUT: usize = 1 << 16;
        let mut fuel = Fuel::new(budget);
        let mut n = depth.max(1);
        let mut best: Word = Vec::new();
        loop {
            if !fuel.tick(n as u64) {
                break;
            }
            let out = self.eval(&p.prefix(n), &mut fuel);
            if out.len() > best.len() {
                best = out;
            }
            if best.len() >= depth || fuel.exhausted() || n >= MAX_INPUT {
                break;
            }
            n *= 2;
        }
        let productive = best.len() >= depth;
        best.truncate(depth);
        EvalOutcome {
            output: best,
            productive,
        }
    }
}

impl fmt::Debug for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Machine({})", self.name)
    }
}
