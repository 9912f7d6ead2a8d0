//! Kleene's strong ternary logic on `δ_𝕋`-names: the NAND realizer, NAND
//! circuits synthesized from truth tables, and ternary extensions.
//!
//! Circuits are built from the Blake canonical form (the disjunction of all
//! prime implicants). Gate-wise Kleene evaluation of that form is exactly the
//! ternary extension; an arbitrary DNF is not (`x ∨ ¬x` gives ½ at ½).

use std::fmt;

use crate::baire::{Point, Word};
use crate::machine::{row_of_word, split_word, Machine};
use crate::spaces::{encode_ternary, Ternary};

pub const ARITY_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TernaryError {
    #[error("arity {0} exceeds the cap {ARITY_CAP}")]
    ArityCap(usize),
    #[error("bad truth table: {0}")]
    BadTable(String),
    #[error("bad circuit: {0}")]
    BadCircuit(String),
}

pub type Result<T> = std::result::Result<T, TernaryError>;

/// Kleene NAND.
pub fn nand(a: Ternary, b: Ternary) -> Ternary {
    use Ternary::*;
    match (a, b) {
        (Zero, _) | (_, Zero) => One,
        (One, One) => Zero,
        _ => Half,
    }
}

/// Position of the nonzero symbol of `N⟨a, b⟩` once the known parts fix it.
/// A nonzero at an odd index names 0; the least such index `o` makes the
/// output `0^{o+1}1…`. Two even nonzeros `k, n` give `0^{max(k,n)+1}1…`.
fn nand_position(a: &[u64], b: &[u64]) -> Option<usize> {
    let ka = a.iter().position(|&v| v != 0);
    let kb = b.iter().position(|&v| v != 0);
    let odd = [ka, kb].into_iter().flatten().filter(|k| k % 2 == 1).min();
    match (odd, ka, kb) {
        (Some(o), _, _) => Some(o + 1),
        (None, Some(k), Some(n)) => Some(k.max(n) + 1),
        _ => None,
    }
}

fn nand_words(a: &[u64], b: &[u64]) -> Word {
    let m = a.len().min(b.len());
    let mut out = vec![0; m];
    if let Some(p) = nand_position(&a[..m], &b[..m]).filter(|&p| p < m) {
        out[p] = 1;
    }
    out
}

/// Realizer of NAND on pair names `⟨a, b⟩` of truth values.
pub fn nand_realizer() -> Machine {
    Machine::new("N", |w, _| {
        let (a, b) = split_word(w);
        nand_words(&a, &b)
    })
}

/// `δ_𝕋` read off a prefix: the first nonzero decides, none means ½.
pub fn decode_prefix(w: &[u64]) -> Ternary {
    match w.iter().position(|&v| v != 0) {
        Some(i) if i % 2 == 1 => Ternary::Zero,
        Some(_) => Ternary::One,
        None => Ternary::Half,
    }
}

/// Boolean function on `arity` inputs; row `r` holds `f(x₀…x_{n−1})` where
/// `x₀x₁…x_{n−1}` is `r` in binary (x₀ most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    arity: usize,
    bits: Vec<bool>,
}

impl TruthTable {
    pub fn new(arity: usize, bits: Vec<bool>) -> Result<Self> {
        if arity > ARITY_CAP {
            return Err(TernaryError::ArityCap(arity));
        }
        if bits.len() != 1 << arity {
            return Err(TernaryError::BadTable(format!(
                "{} entries for arity {arity}, expected {}",
                bits.len(),
                1 << arity
            )));
        }
        Ok(TruthTable { arity, bits })
    }

    pub fn from_fn(arity: usize, f: impl Fn(&[bool]) -> bool) -> Result<Self> {
        if arity > ARITY_CAP {
            return Err(TernaryError::ArityCap(arity));
        }
        let bits = (0..1usize << arity).map(|r| f(&row_inputs(arity, r))).collect();
        TruthTable::new(arity, bits)
    }

    /// One line of `2ⁿ` bits.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(TernaryError::BadTable(format!("unexpected `{c}`; expected a line of 0/1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if !bits.len().is_power_of_two() {
            return Err(TernaryError::BadTable(format!("{} entries is not a power of two", bits.len())));
        }
        TruthTable::new(bits.len().trailing_zeros() as usize, bits)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn value(&self, x: &[bool]) -> bool {
        self.bits[row_index(x)]
    }

    /// The semantic ternary extension `L' f (L(t₁) × … × L(tₙ))`.
    pub fn extend(&self, t: &[Ternary]) -> Ternary {
        semantic_extension(|x| self.value(x), t)
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn row_inputs(arity: usize, r: usize) -> Vec<bool> {
    (0..arity).map(|i| r >> (arity - 1 - i) & 1 == 1).collect()
}

fn row_index(x: &[bool]) -> usize {
    x.iter().fold(0, |r, &b| 2 * r + b as usize)
}

/// `L' f (L(t₁) × … × L(tₙ))` by enumerating Boolean resolutions.
pub fn semantic_extension(f: impl Fn(&[bool]) -> bool, t: &[Ternary]) -> Ternary {
    let mut seen = [false; 2];
    let mut x = vec![false; t.len()];
    fn go(i: usize, t: &[Ternary], x: &mut Vec<bool>, f: &dyn Fn(&[bool]) -> bool, seen: &mut [bool; 2]) {
        if i == t.len() {
            seen[f(x) as usize] = true;
            return;
        }
        for &b in t[i].resolutions() {
            x[i] = b;
            go(i + 1, t, x, f, seen);
        }
    }
    go(0, t, &mut x, &f, &mut seen);
    match seen {
        [true, true] => Ternary::Half,
        [_, true] => Ternary::One,
        _ => Ternary::Zero,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ref {
    Input(usize),
    Gate(usize),
    Const(bool),
}

/// NAND gates over inputs, constants and earlier gates; the last gate is the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NandCircuit {
    arity: usize,
    gates: Vec<(Ref, Ref)>,
}

impl NandCircuit {
    pub fn new(arity: usize, gates: Vec<(Ref, Ref)>) -> Result<Self> {
        if gates.is_empty() {
            return Err(TernaryError::BadCircuit("no gates".into()));
        }
        for (j, &(a, b)) in gates.iter().enumerate() {
            for r in [a, b] {
                match r {
                    Ref::Input(i) if i >= arity => {
                        return Err(TernaryError::BadCircuit(format!("gate {j} reads input {i} of {arity}")))
                    }
                    Ref::Gate(g) if g >= j => {
                        return Err(TernaryError::BadCircuit(format!("gate {j} reads gate {g}, not an earlier one")))
                    }
                    _ => {}
                }
            }
        }
        Ok(NandCircuit { arity, gates })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn gates(&self) -> &[(Ref, Ref)] {
        &self.gates
    }

    fn eval_with<T: Copy>(&self, input: impl Fn(usize) -> T, konst: impl Fn(bool) -> T, op: impl Fn(T, T) -> T) -> T {
        let mut vals: Vec<T> = Vec::with_capacity(self.gates.len());
        for &(a, b) in &self.gates {
            let get = |r: Ref| match r {
                Ref::Input(i) => input(i),
                Ref::Gate(g) => vals[g],
                Ref::Const(c) => konst(c),
            };
            let v = op(get(a), get(b));
            vals.push(v);
        }
        *vals.last().expect("nonempty")
    }

    pub fn eval_bool(&self, x: &[bool]) -> bool {
        self.eval_with(|i| x[i], |c| c, |a, b| !(a && b))
    }

    /// Gate-wise Kleene evaluation.
    pub fn eval_ternary(&self, t: &[Ternary]) -> Ternary {
        self.eval_with(|i| t[i], Ternary::from_bool, nand)
    }

    /// The semantic ternary extension of the Boolean function this circuit computes.
    pub fn extend(&self, t: &[Ternary]) -> Ternary {
        semantic_extension(|x| self.eval_bool(x), t)
    }

    /// Gate-wise substitution of [`nand_realizer`]; the input is a tuple whose
    /// row `i` names argument `i`.
    pub fn realizer(&self) -> Machine {
        let c = self.clone();
        Machine::new("circuit", move |w, fuel| {
            fuel.tick(w.len() as u64 * c.gates.len() as u64);
            let rows: Vec<Word> = (0..c.arity as u64).map(|i| row_of_word(w, i)).collect();
            let len = rows.iter().map(Vec::len).min().unwrap_or(w.len());
            let konst = [encode_ternary(Ternary::Zero).prefix(len), encode_ternary(Ternary::One).prefix(len)];
            let mut vals: Vec<Word> = Vec::with_capacity(c.gates.len());
            for &(a, b) in &c.gates {
                let get = |r: Ref| -> &[u64] {
                    match r {
                        Ref::Input(i) => &rows[i],
                        Ref::Gate(g) => &vals[g],
                        Ref::Const(b) => &konst[b as usize],
                    }
                };
                let v = nand_words(get(a), get(b));
                vals.push(v);
            }
            vals.pop().unwrap_or_default()
        })
    }

    /// Runs the realizer on canonical names of `t` and decodes the answer.
    pub fn realize(&self, t: &[Ternary]) -> Ternary {
        let input = Point::rows(
            t.iter().enumerate().map(|(i, &v)| (i as u64, encode_ternary(v))).collect(),
            Point::zeros(),
        );
        // each gate moves the nonzero symbol at most one place
        let depth = self.gates.len() + 4;
        decode_prefix(&self.realizer().run_on_point(&input, depth).output)
    }
}

/// A conjunction of literals: `Some(b)` requires `x_i = b`.
pub type Term = Vec<Option<bool>>;

fn term_rows(term: &Term) -> Vec<Vec<bool>> {
    let mut rows = vec![vec![]];
    for lit in term {
        rows = rows
            .into_iter()
            .flat_map(|r| {
                let choices: &[bool] = match lit {
                    Some(false) => &[false],
                    Some(true) => &[true],
                    None => &[false, true],
                };
                choices.iter().map(move |&b| {
                    let mut r = r.clone();
                    r.push(b);
                    r
                })
            })
            .collect();
    }
    rows
}

/// All prime implicants, by brute force over the `3ⁿ` terms.
pub fn prime_implicants(t: &TruthTable) -> Vec<Term> {
    let n = t.arity;
    let implicant = |term: &Term| term_rows(term).iter().all(|x| t.value(x));
    let mut all = vec![vec![]];
    for _ in 0..n {
        all = all
            .into_iter()
            .flat_map(|term: Term| {
                [None, Some(false), Some(true)].map(|l| {
                    let mut t = term.clone();
                    t.push(l);
                    t
                })
            })
            .collect();
    }
    all.into_iter()
        .filter(|term| implicant(term))
        .filter(|term| {
            (0..n).filter(|&i| term[i].is_some()).all(|i| {
                let mut wider = term.clone();
                wider[i] = None;
                !implicant(&wider)
            })
        })
        .collect()
}

struct Builder {
    gates: Vec<(Ref, Ref)>,
}

impl Builder {
    fn nand(&mut self, a: Ref, b: Ref) -> Ref {
        self.gates.push((a, b));
        Ref::Gate(self.gates.len() - 1)
    }

    fn not(&mut self, a: Ref) -> Ref {
        self.nand(a, a)
    }

    fn and(&mut self, a: Ref, b: Ref) -> Ref {
        let x = self.nand(a, b);
        self.not(x)
    }

    fn or(&mut self, a: Ref, b: Ref) -> Ref {
        let (x, y) = (self.not(a), self.not(b));
        self.nand(x, y)
    }
}

/// NAND circuit for `t` from its Blake canonical form.
pub fn synthesize(t: &TruthTable) -> Result<NandCircuit> {
    if t.arity > ARITY_CAP {
        return Err(TernaryError::ArityCap(t.arity));
    }
    let mut b = Builder { gates: vec![] };
    let mut disjuncts = vec![];
    for term in prime_implicants(t) {
        let lits: Vec<Ref> = term
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.map(|v| (i, v)))
            .map(|(i, v)| if v { Ref::Input(i) } else { b.not(Ref::Input(i)) })
            .collect();
        let conj = match lits.split_first() {
            None => Ref::Const(true),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &l| b.and(acc, l)),
        };
        disjuncts.push(conj);
    }
    let out = match disjuncts.split_first() {
        None => Ref::Const(false),
        Some((&first, rest)) => rest.iter().fold(first, |acc, &d| b.or(acc, d)),
    };
    // make the output a gate: NOT NOT out
    let x = b.not(out);
    b.not(x);
    NandCircuit::new(t.arity, b.gates)
}

/// All ternary argument vectors of length `n`.
pub fn ternary_inputs(n: usize) -> Vec<Vec<Ternary>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<Ternary>| {
                Ternary::ALL.map(|t| {
                    let mut v = v.clone();
                    v.push(t);
                    v
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Ternary::*;

    /// The nine rows of the ternary NAND table.
    const TABLE: [(Ternary, Ternary, Ternary); 9] = [
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

    fn run_nand(a: &Point, b: &Point) -> Ternary {
        decode_prefix(&nand_realizer().run_on_point(&Point::pair(a.clone(), b.clone()), 24).output)
    }

    #[test]
    fn nand_table() {
        for (a, b, c) in TABLE {
            assert_eq!(nand(a, b), c);
            assert_eq!(semantic_extension(|x| !(x[0] && x[1]), &[a, b]), c);
            assert_eq!(run_nand(&encode_ternary(a), &encode_ternary(b)), c, "{a}|{b}");
        }
    }

    #[test]
    fn nand_on_late_names() {
        // 1 named late on the left, 0 named later on the right
        let one = Point::evp(vec![0, 0, 0, 0, 7], vec![0]);
        let zero = Point::evp(vec![0; 9].into_iter().chain([2]).collect::<Word>(), vec![0]);
        assert_eq!(run_nand(&one, &zero), One);
        assert_eq!(run_nand(&one, &one), Zero);
        assert_eq!(run_nand(&one, &Point::zeros()), Half);
        assert_eq!(run_nand(&zero, &Point::zeros()), One);
    }

    #[test]
    fn nand_is_monotone() {
        let m = nand_realizer();
        let p = Point::pair(Point::evp(vec![0, 0, 3], vec![0]), Point::evp(vec![0, 0, 0, 0, 0, 1], vec![0]));
        let w = p.prefix(30);
        for n in 0..w.len() {
            let (a, b) = (m.eval_word(&w[..n]), m.eval_word(&w[..n + 1]));
            assert!(crate::baire::is_prefix(&a, &b));
        }
    }

    #[test]
    fn synthesis_examples() {
        let xor = TruthTable::parse("0110").unwrap();
        let c = synthesize(&xor).unwrap();
        let vals: Vec<bool> = (0..4).map(|r| c.eval_bool(&row_inputs(2, r))).collect();
        assert_eq!(vals, vec![false, true, true, false]);
        let maj = TruthTable::from_fn(3, |x| x.iter().filter(|&&b| b).count() >= 2).unwrap();
        let c = synthesize(&maj).unwrap();
        for r in 0..8 {
            assert_eq!(c.eval_bool(&row_inputs(3, r)), maj.value(&row_inputs(3, r)));
        }
        let one = TruthTable::parse("11").unwrap();
        let c = synthesize(&one).unwrap();
        assert!(c.eval_bool(&[false]) && c.eval_bool(&[true]));
        assert_eq!(c.realize(&[Half]), One);
    }

    #[test]
    fn extension_examples() {
        let not = synthesize(&TruthTable::parse("10").unwrap()).unwrap();
        assert_eq!(not.extend(&[Half]), Half);
        let and = synthesize(&TruthTable::parse("0001").unwrap()).unwrap();
        assert_eq!(and.extend(&[Zero, Half]), Zero);
        let or = synthesize(&TruthTable::parse("0111").unwrap()).unwrap();
        assert_eq!(or.extend(&[Half, Half]), Half);
    }

    #[test]
    fn arbitrary_dnf_is_not_the_extension() {
        // x ∨ ¬x as a plain circuit: NAND(NOT x, x)
        let c = NandCircuit::new(1, vec![(Ref::Input(0), Ref::Input(0)), (Ref::Gate(0), Ref::Input(0))]).unwrap();
        assert_eq!(c.eval_ternary(&[Half]), Half);
        assert_eq!(c.extend(&[Half]), One);
        let blake = synthesize(&TruthTable::parse("11").unwrap()).unwrap();
        assert_eq!(blake.eval_ternary(&[Half]), One);
    }

    #[test]
    fn circuits_validate_references() {
        assert!(NandCircuit::new(1, vec![(Ref::Gate(0), Ref::Input(0))]).is_err());
        assert!(NandCircuit::new(1, vec![(Ref::Input(1), Ref::Input(0))]).is_err());
        assert!(TruthTable::parse("011").is_err());
        assert!(matches!(TruthTable::new(9, vec![false; 512]), Err(TernaryError::ArityCap(9))));
    }

    #[test]
    fn prime_implicants_of_majority() {
        let maj = TruthTable::from_fn(3, |x| x.iter().filter(|&&b| b).count() >= 2).unwrap();
        let mut p = prime_implicants(&maj);
        p.sort();
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|t| t.iter().filter(|l| l.is_some()).count() == 2));
    }

    proptest! {
        #[test]
        fn blake_circuits_are_kleene_exact(bits in proptest::collection::vec(any::<bool>(), 8)) {
            let t = TruthTable::new(3, bits).unwrap();
            let c = synthesize(&t).unwrap();
            for x in ternary_inputs(3) {
                prop_assert_eq!(c.eval_ternary(&x), t.extend(&x));
            }
            for r in 0..8 {
                let x = row_inputs(3, r);
                prop_assert_eq!(c.eval_bool(&x), t.value(&x));
            }
        }
    }
}
