//! Mass problems and the embedding `A ≤M B ⟺ c_A ≤W c_B`.
//!
//! Every finitely presented point is computable, so all nonempty mass
//! problems here are Medvedev equivalent. What is checked is the translation
//! between Medvedev machines and Weihrauch witnesses, in both directions.

use std::fmt;

use crate::baire::{BaireError, Cursor, Point};
use crate::machine::{Machine, DEFAULT_FUEL};
use crate::problems::{const_set, Problem, ValueSet};
use crate::witnesses::named::{gen, Entry};
use crate::witnesses::{pointwise, Translator, Witness};

/// A finite set of points; the empty set stands for `𝟎`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassProblem {
    members: Vec<Point>,
}

pub const MASS_GRAMMAR: &str = "mass := mass() | mass(point(, point)*)";

impl MassProblem {
    pub fn new(members: Vec<Point>) -> Self {
        let mut out: Vec<Point> = vec![];
        for p in members {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        MassProblem { members: out }
    }

    pub fn empty() -> Self {
        MassProblem { members: vec![] }
    }

    pub fn singleton(p: Point) -> Self {
        MassProblem { members: vec![p] }
    }

    pub fn members(&self) -> &[Point] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `c_A : p ↦ A`, or `𝟎` for the empty set.
    pub fn problem(&self) -> Problem {
        const_set(self.members.clone())
    }

    /// `A ⊕ B = {⟨p, q⟩ : p ∈ A, q ∈ B}`.
    pub fn join(&self, other: &MassProblem) -> MassProblem {
        MassProblem::new(
            self.members
                .iter()
                .flat_map(|p| other.members.iter().map(move |q| Point::pair(p.clone(), q.clone())))
                .collect(),
        )
    }

    /// `A ⊗ B = 0A ∪ 1B`.
    pub fn meet(&self, other: &MassProblem) -> MassProblem {
        let left = self.members.iter().map(|p| p.prepend(0));
        let right = other.members.iter().map(|q| q.prepend(1));
        MassProblem::new(left.chain(right).collect())
    }
}

impl fmt::Display for MassProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.members.iter().map(Point::to_string).collect();
        write!(f, "mass({})", items.join(", "))
    }
}

impl std::str::FromStr for MassProblem {
    type Err = BaireError;

    fn from_str(s: &str) -> Result<Self, BaireError> {
        let mut c = Cursor::new(s, MASS_GRAMMAR);
        c.expect("mass(")?;
        let mut members = vec![];
        if !c.eat(")") {
            loop {
                members.push(c.point()?);
                if c.eat(")") {
                    break;
                }
                c.expect(",")?;
            }
        }
        c.finish()?;
        Ok(MassProblem::new(members))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MemberOutcome {
    /// `F(q)` agrees with a member of `A` on the first `depth` symbols.
    Pass,
    Fail { coordinate: usize },
    /// `F(q)` produced fewer than `depth` symbols within the fuel.
    Stalled { produced: usize },
}

#[derive(Debug, Clone)]
pub struct MedvedevReport {
    pub machine: String,
    pub depth: usize,
    pub members: Vec<(String, MemberOutcome)>,
}

impl MedvedevReport {
    pub fn passed(&self) -> bool {
        self.members.iter().all(|(_, o)| *o == MemberOutcome::Pass)
    }
}

impl fmt::Display for MedvedevReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{} {verdict} depth {}", self.machine, self.depth)?;
        for (q, o) in &self.members {
            match o {
                MemberOutcome::Pass => writeln!(f, "  {q}: ok")?,
                MemberOutcome::Fail { coordinate } => writeln!(f, "  {q}: wrong at {coordinate}")?,
                MemberOutcome::Stalled { produced } => writeln!(f, "  {q}: stalled after {produced}")?,
            }
        }
        Ok(())
    }
}

/// Runs `F` on every member of `B` and compares against the members of `A`.
pub fn medvedev_check(a: &MassProblem, b: &MassProblem, m: &Machine, depth: usize) -> MedvedevReport {
    let targets = ValueSet::PointList(a.members.clone());
    let members = b
        .members
        .iter()
        .map(|q| {
            let out = m.run_on_point_with(q, depth, DEFAULT_FUEL);
            let outcome = match targets.check_prefix(&out.output) {
                Err(i) => MemberOutcome::Fail { coordinate: i },
                Ok(()) if out.output.len() < depth => MemberOutcome::Stalled {
                    produced: out.output.len(),
                },
                Ok(()) => MemberOutcome::Pass,
            };
            (q.to_string(), outcome)
        })
        .collect();
    MedvedevReport {
        machine: m.name().to_string(),
        depth,
        members,
    }
}

/// `K = id`, `H⟨p, q⟩ = F(q)`.
pub fn embed_forward(a: &MassProblem, b: &MassProblem, m: &Machine) -> Witness {
    let name = format!("embed({})", m.name());
    let h = Machine::compose(m.clone(), Machine::proj2());
    Witness::new(&name, a.problem(), b.problem(), Translator::identity(), h, false)
}

/// `F(p) = H⟨0̂, p⟩`.
pub fn embed_backward(w: &Witness) -> Machine {
    let feed = Machine::pair(Machine::constant(Point::zeros()), Machine::identity());
    Machine::compose(w.ordinary_h(), feed).renamed(&format!("unembed({})", w.name))
}

/// `c_{A⊕B} ≡sW c_A×c_B` and `c_{A⊗B} ≡sW c_A⊕c_B`, in the order
/// `[⊕ ≤ ×, × ≤ ⊕, ⊗ ≤ ⊕, ⊕ ≤ ⊗]`. Answers already coincide as names, so `H = id`.
pub fn set_ops_correspondence(a: &MassProblem, b: &MassProblem) -> [Witness; 4] {
    let (ca, cb) = (a.problem(), b.problem());
    let join = a.join(b).problem();
    let meet = a.meet(b).problem();
    let product = Problem::product(ca.clone(), cb.clone());
    let sum = Problem::sum(ca, cb);
    let w = |name: &str, f: &Problem, g: &Problem, k: Translator| {
        Witness::new(name, f.clone(), g.clone(), k, Machine::identity(), true)
    };
    [
        w("join_to_product", &join, &product, Translator::diag()),
        w("product_to_join", &product, &join, Translator::proj1()),
        w("meet_to_sum", &meet, &sum, Translator::diag()),
        w("sum_to_meet", &sum, &meet, Translator::proj1()),
    ]
}

/// The fixture lattice: six mass problems, `𝟎` among them.
pub fn fixture_lattice() -> Vec<(&'static str, MassProblem)> {
    vec![
        ("zeros", MassProblem::singleton(Point::zeros())),
        ("ones", MassProblem::singleton(Point::ones())),
        ("zeros_or_ones", MassProblem::new(vec![Point::zeros(), Point::ones()])),
        ("alternating", MassProblem::singleton(Point::evp(vec![], vec![0, 1]))),
        ("two_then_alt", MassProblem::new(vec![Point::evp(vec![2], vec![0, 1]), Point::evp(vec![3], vec![1])])),
        ("empty", MassProblem::empty()),
    ]
}

/// Machines tried as Medvedev reductions into `A`.
pub fn candidate_machines(a: &MassProblem) -> Vec<Machine> {
    let mut out = vec![
        Machine::identity(),
        pointwise("flip", |v| (v == 0) as u64),
        Machine::shift_left(),
    ];
    out.extend(a.members.iter().cloned().map(Machine::constant));
    out
}

/// A deliberately wrong Medvedev machine: it adds one to every symbol.
pub fn broken_machine() -> Machine {
    pointwise("succ", |v| v + 1)
}

/// Set-operation witnesses for a few fixture pairs, and forward embeddings of
/// constant machines between every pair of nonempty fixtures.
pub fn entries() -> Vec<Entry> {
    let lattice: Vec<(&str, MassProblem)> = fixture_lattice().into_iter().filter(|(_, a)| !a.is_empty()).collect();
    let mut out = vec![];
    for (i, j) in [(2, 3), (4, 1), (0, 4)] {
        let ((na, a), (nb, b)) = (&lattice[i], &lattice[j]);
        for w in set_ops_correspondence(a, b) {
            let takes_pairs = w.name.starts_with("product") || w.name.starts_with("sum");
            let name = format!("{}[{na},{nb}]", w.name);
            let w = w.renamed(&name);
            out.push(if takes_pairs {
                Entry::new(w, |rng| gen::pair(rng, gen::nat_point, gen::nat_point))
            } else {
                Entry::new(w, gen::nat_point)
            });
        }
    }
    for (na, a) in &lattice {
        for (nb, b) in &lattice {
            let w = embed_forward(a, b, &Machine::constant(a.members()[0].clone()));
            out.push(Entry::new(w.renamed(&format!("embed[{na},{nb}]")), gen::nat_point));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witnesses::named::gen::nat_point;
    use crate::witnesses::{check, CheckConfig};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    const DEPTH: usize = 16;

    fn corpus(n: usize) -> Vec<Point> {
        let mut rng = StdRng::seed_from_u64(9);
        (0..n).map(|_| nat_point(&mut rng)).collect()
    }

    fn pair_corpus(n: usize) -> Vec<Point> {
        let mut rng = StdRng::seed_from_u64(10);
        (0..n).map(|_| Point::pair(nat_point(&mut rng), nat_point(&mut rng))).collect()
    }

    fn passes(w: &Witness, corpus: &[Point]) -> bool {
        check(w, corpus, &CheckConfig::new(DEPTH)).unwrap().passed()
    }

    /// `A ≤M B` by the brute-force reading of the definition: some candidate
    /// sends every member of `B` onto the first `DEPTH` symbols of a member of `A`,
    /// reading a generous prefix of the input.
    fn medvedev_oracle(a: &MassProblem, b: &MassProblem, m: &Machine) -> bool {
        b.members().iter().all(|q| {
            let out = m.eval_word(&q.prefix(4 * DEPTH));
            out.len() >= DEPTH && a.members().iter().any(|p| p.prefix(DEPTH) == out[..DEPTH])
        })
    }

    #[test]
    fn identity_reduces_a_set_to_itself() {
        let a = MassProblem::new(vec![Point::zeros(), Point::ones()]);
        assert!(medvedev_check(&a, &a, &Machine::identity(), DEPTH).passed());
    }

    #[test]
    fn constant_machine_reaches_any_member() {
        let (a, b) = (MassProblem::singleton(Point::zeros()), MassProblem::singleton(Point::ones()));
        assert!(medvedev_check(&a, &b, &Machine::constant(Point::zeros()), DEPTH).passed());
        let r = medvedev_check(&a, &b, &Machine::identity(), DEPTH);
        assert_eq!(r.members[0].1, MemberOutcome::Fail { coordinate: 0 });
    }

    #[test]
    fn stalled_machine_is_reported() {
        let a = MassProblem::singleton(Point::zeros());
        let r = medvedev_check(&a, &a, &Machine::new("silent", |_, _| vec![]), DEPTH);
        assert_eq!(r.members[0].1, MemberOutcome::Stalled { produced: 0 });
    }

    #[test]
    fn forward_embedding_passes_for_good_machines() {
        let (a, b) = (MassProblem::singleton(Point::zeros()), MassProblem::singleton(Point::ones()));
        assert!(passes(&embed_forward(&a, &a, &Machine::identity()), &corpus(25)));
        assert!(passes(&embed_forward(&a, &b, &Machine::constant(Point::zeros())), &corpus(25)));
    }

    #[test]
    fn forward_embedding_of_a_broken_machine_fails() {
        let a = MassProblem::new(vec![Point::zeros(), Point::ones()]);
        let report = check(&embed_forward(&a, &a, &broken_machine()), &corpus(5), &CheckConfig::new(DEPTH)).unwrap();
        assert!(!report.passed());
        assert!(report.first_failure().is_some());
    }

    #[test]
    fn backward_embedding_recovers_the_machine() {
        let a = MassProblem::new(vec![Point::zeros(), Point::evp(vec![2], vec![0, 1])]);
        let f = embed_backward(&embed_forward(&a, &a, &Machine::identity()));
        for q in a.members() {
            assert_eq!(f.eval_word(&q.prefix(DEPTH)), q.prefix(DEPTH));
        }
        assert!(medvedev_check(&a, &a, &f, DEPTH).passed());
    }

    #[test]
    fn backward_embedding_of_a_constant_is_constant() {
        let q = Point::evp(vec![4], vec![1]);
        let (a, b) = (MassProblem::singleton(q.clone()), MassProblem::singleton(Point::zeros()));
        let f = embed_backward(&embed_forward(&a, &b, &Machine::constant(q.clone())));
        for p in corpus(5) {
            assert_eq!(f.eval_word(&p.prefix(DEPTH)), q.prefix(DEPTH + 1));
        }
    }

    #[test]
    fn embedding_is_faithful_on_the_fixture_lattice() {
        let lattice = fixture_lattice();
        let inputs = corpus(25);
        for (na, a) in &lattice {
            for (nb, b) in &lattice {
                let mut medvedev = false;
                let mut weihrauch = false;
                for m in candidate_machines(a) {
                    let direct = medvedev_check(a, b, &m, DEPTH).passed();
                    assert_eq!(direct, medvedev_oracle(a, b, &m), "{na} ≤ {nb} via {}", m.name());
                    let w = embed_forward(a, b, &m);
                    let via_witness = passes(&w, &inputs);
                    assert_eq!(direct, via_witness, "{na} ≤ {nb} via {}", m.name());
                    if via_witness {
                        assert!(medvedev_check(a, b, &embed_backward(&w), DEPTH).passed());
                    }
                    medvedev |= direct;
                    weihrauch |= via_witness;
                }
                assert_eq!(medvedev, weihrauch);
                // nonempty problems are all equivalent; the empty one is greatest
                assert_eq!(medvedev, a.is_empty() == b.is_empty() || b.is_empty(), "{na} ≤ {nb}");
            }
        }
    }

    #[test]
    fn set_operations_correspond() {
        let lattice = fixture_lattice();
        let nonempty: Vec<&MassProblem> = lattice.iter().map(|(_, a)| a).filter(|a| !a.is_empty()).collect();
        let inputs = pair_corpus(25);
        for a in &nonempty {
            for b in &nonempty {
                for w in set_ops_correspondence(a, b) {
                    assert!(passes(&w, &inputs), "{} for {a}, {b}", w.name);
                }
            }
        }
    }

    #[test]
    fn meet_tags_the_component() {
        let a = MassProblem::singleton(Point::zeros());
        let b = MassProblem::singleton(Point::ones());
        let m = a.meet(&b);
        assert_eq!(m.members()[0].prefix(3), vec![0, 0, 0]);
        assert_eq!(m.members()[1].prefix(3), vec![1, 1, 1]);
    }

    #[test]
    fn literals_round_trip() {
        for (_, a) in fixture_lattice() {
            let back: MassProblem = a.to_string().parse().unwrap();
            assert_eq!(back, a);
        }
        assert!("mass(evp(;0)".parse::<MassProblem>().is_err());
    }

    #[test]
    fn singletons_are_mutually_reducible() {
        let (p, q) = (Point::evp(vec![1, 2], vec![3]), Point::evp(vec![], vec![5, 0]));
        let (a, b) = (MassProblem::singleton(p.clone()), MassProblem::singleton(q));
        let w = embed_forward(&a, &b, &Machine::constant(p));
        assert!(passes(&w, &corpus(25)));
    }
}
