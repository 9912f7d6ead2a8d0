//! The full witness registry and a batch runner over it.

use std::fmt;

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::problems::Problem;
use crate::witnesses::algebra::*;
use crate::witnesses::named::{gen, named_witnesses, Entry};
use crate::witnesses::{check, CheckConfig, Report, Result, Witness};
use crate::{medvedev, weakcomp, wkl};

pub const SUITE_DEPTH: usize = 16;
pub const SUITE_INPUTS: usize = 25;
pub const SUITE_SEED: u64 = 0x5eed;

fn point_gen(f: &Problem) -> fn(&mut StdRng) -> crate::baire::Point {
    match f {
        Problem::Lpo => gen::lpo_point,
        _ => gen::llpo_point,
    }
}

/// Lattice laws, cylinders and the parallelization closure operator for
/// `f, g ∈ {LPO, LLPO}`.
pub fn algebra_entries() -> Vec<Entry> {
    use crate::baire::Point;
    let mut out = vec![];
    let bases = [Problem::Lpo, Problem::Llpo];
    for f in &bases {
        let p = point_gen(f);
        let tuple = move |rng: &mut StdRng| gen::tuple_of(rng, p);
        let pair = move |rng: &mut StdRng| gen::pair(rng, p, p);
        out.push(Entry::new(refl(f.clone()), p));
        out.push(Entry::new(refl_strong(f.clone()), p));
        let (a, b) = sum_idem(f.clone());
        out.push(Entry::new(a, p));
        out.push(Entry::new(b, pair));
        let tag = |w: Witness| {
            let name = format!("{}({f})", w.name);
            w.renamed(&name)
        };
        let [a, b, c, d] = product_identity(f.clone()).map(tag);
        out.push(Entry::new(a, p));
        out.push(Entry::new(b, move |rng| gen::pair(rng, p, gen::nat_point)));
        out.push(Entry::new(c, p));
        out.push(Entry::new(d, move |rng| gen::pair(rng, gen::nat_point, p)));
        let (a, b) = sum_neutral(f.clone());
        let (a, b) = (tag(a), tag(b));
        out.push(Entry::new(a, p));
        out.push(Entry::new(b, move |rng| gen::pair(rng, p, |_| Point::zeros())));
        out.push(Entry::new(into_cylinder(f.clone()), p));
        out.push(Entry::new(parallel_extensive(f.clone()), p));
        out.push(Entry::new(parallel_idem(f.clone()), move |rng| gen::tuple_of(rng, tuple)));
        let (a, b) = parallel_absorb(f.clone());
        out.push(Entry::new(a, move |rng| gen::pair(rng, tuple, tuple)));
        out.push(Entry::new(b, tuple));
        out.push(Entry::new(parallelize_witness(&refl(f.clone())), tuple));
    }
    let (lpo, llpo) = (gen::lpo_point, gen::llpo_point);
    let mixed = move |rng: &mut StdRng| gen::pair(rng, lpo, llpo);
    out.push(Entry::new(product_comm(Problem::Lpo, Problem::Llpo), mixed));
    out.push(Entry::new(sum_comm(Problem::Lpo, Problem::Llpo), mixed));
    out.push(Entry::new(glb_left(Problem::Lpo, Problem::Llpo), mixed));
    out.push(Entry::new(glb_right(Problem::Lpo, Problem::Llpo), mixed));
    let left = move |rng: &mut StdRng| {
        let ab = gen::pair(rng, llpo, lpo);
        Point::pair(ab, llpo(rng))
    };
    let right = move |rng: &mut StdRng| {
        let a = llpo(rng);
        Point::pair(a, gen::pair(rng, lpo, llpo))
    };
    let (a, b) = product_assoc(Problem::Llpo, Problem::Lpo, Problem::Llpo);
    out.push(Entry::new(a, left));
    out.push(Entry::new(b, right));
    let (a, b) = sum_assoc(Problem::Llpo, Problem::Lpo, Problem::Llpo);
    out.push(Entry::new(a, left));
    out.push(Entry::new(b, right));
    let (a, b) = parallel_product(Problem::Lpo, Problem::Llpo);
    out.push(Entry::new(a, move |rng| gen::tuple_of(rng, mixed)));
    out.push(Entry::new(b, move |rng| {
        let x = gen::tuple_of(rng, lpo);
        Point::pair(x, gen::tuple_of(rng, llpo))
    }));
    out.push(Entry::new(parallel_sum(Problem::Lpo, Problem::Llpo), move |rng| {
        gen::tuple_of(rng, |rng| {
            let x = gen::tuple_of(rng, lpo);
            Point::pair(x, gen::tuple_of(rng, llpo))
        })
    }));
    let cyl = cylindrify(&crate::witnesses::named::llpo_to_lpo());
    out.push(Entry::new(cyl.clone(), move |rng| gen::pair(rng, gen::nat_point, llpo)));
    if let Ok(w) = uncylindrify(&cyl) {
        out.push(Entry::new(w, llpo));
    }
    out
}

/// Every registered witness with its corpus generator.
pub fn registry() -> Vec<Entry> {
    let mut out = named_witnesses();
    out.extend(wkl::entries());
    out.extend(weakcomp::entries());
    out.extend(medvedev::entries());
    out.extend(algebra_entries());
    out
}

pub fn find(name: &str) -> Option<Entry> {
    registry().into_iter().find(|e| e.name() == name)
}

/// Runs one entry on `inputs` generated points.
pub fn run_entry(entry: &Entry, depth: usize, inputs: usize, seed: u64) -> Result<Report> {
    let mut rng = StdRng::seed_from_u64(seed);
    let corpus = (entry.corpus)(&mut rng, inputs);
    let mut cfg = CheckConfig::new(depth).adaptive();
    if let Some(c) = entry.behavior_cap {
        cfg = cfg.with_cap(c);
    }
    check(&entry.witness, &corpus, &cfg)
}

/// Deliberately corrupted witnesses; each should be rejected.
pub fn negative_controls() -> Vec<Entry> {
    use crate::baire::Point;
    use crate::machine::Machine;
    use crate::spaces::{tree_point, Tree};
    use crate::witnesses::named::{id_to_c, id_to_llpo_hat, llpo_hat_squared, llpo_to_lpo};
    use crate::witnesses::{pointwise, Translator};
    let flip = || pointwise("flip", |v| (v == 0) as u64);
    let corrupt = |w: Witness, h: Machine| {
        let name = format!("{}/h={}", w.name, h.name());
        let mut w = w.renamed(&name);
        w.h = h;
        w
    };
    let mut out = vec![
        Entry::new(corrupt(llpo_to_lpo(), Machine::identity()), gen::llpo_point),
        Entry::new(corrupt(id_to_c(), pointwise("succ", |v| v + 1)), gen::nat_point),
        Entry::new(corrupt(llpo_hat_squared(), flip()), gen::llpo_hat_squared_input),
        Entry::new(corrupt(llpo_to_lpo(), Machine::new("silent", |_, _| vec![])), gen::llpo_point),
        Entry::new(corrupt(wkl::wkl_to_llpo_hat(), Machine::compose(flip(), wkl::path_machine())), |_| {
            tree_point(Tree::Fin(wkl::fixtures()[0].clone()))
        }),
    ];
    let mut w = id_to_llpo_hat().renamed("id_to_llpo_hat/k=const");
    w.k = Translator::constant(Point::zeros());
    out.push(Entry::new(w, gen::nat_point));
    let mut w = llpo_to_lpo().renamed("llpo_to_lpo/k=id");
    w.k.machine = Machine::identity();
    out.push(Entry::new(w, gen::llpo_point));
    let pair = medvedev::MassProblem::new(vec![Point::zeros(), Point::ones()]);
    let w = medvedev::embed_forward(&pair, &pair, &medvedev::broken_machine());
    out.push(Entry::new(w, gen::nat_point));
    let [join, ..] = medvedev::set_ops_correspondence(&pair, &medvedev::MassProblem::singleton(Point::ones()));
    out.push(Entry::new(corrupt(join, Machine::proj1()), gen::nat_point));
    out
}

/// One line of a suite run.
#[derive(Debug, Clone)]
pub struct SuiteLine {
    pub name: String,
    pub outcome: std::result::Result<Report, String>,
    pub depth: usize,
}

impl SuiteLine {
    pub fn passed(&self) -> bool {
        matches!(&self.outcome, Ok(r) if r.passed())
    }
}

impl fmt::Display for SuiteLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Ok(r) if r.passed() => write!(f, "{} PASS (verified to depth {})", self.name, self.depth),
            Ok(r) => {
                let (input, failure) = r.first_failure().expect("failing report has a failure");
                write!(
                    f,
                    "{} FAIL depth {} at {} coordinate {} ({})",
                    self.name, self.depth, input.input, failure.coordinate, failure.reason
                )
            }
            Err(e) => write!(f, "{} ERROR depth {}: {e}", self.name, self.depth),
        }
    }
}

pub fn run_suite(entries: &[Entry], depth: usize, inputs: usize) -> Vec<SuiteLine> {
    entries
        .iter()
        .map(|e| SuiteLine {
            name: e.name().to_string(),
            outcome: run_entry(e, depth, inputs, SUITE_SEED).map_err(|e| e.to_string()),
            depth,
        })
        .collect()
}

/// Witness names of the registry, in registration order.
pub fn names() -> Vec<String> {
    registry().iter().map(|e| e.name().to_string()).collect()
}
