use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::rngs::StdRng;
use rand::SeedableRng;

use weihrauch::baire::{Point, Word};
use weihrauch::limitmachine::{adversary, lpo_k_machine, run_lpo_k, DEFAULT_QUIET};
use weihrauch::machine::Machine;
use weihrauch::medvedev::{self, MassProblem};
use weihrauch::problems::{Problem, ProblemError};
use weihrauch::spaces::{encode_clopen, format_word, parse_clopen, parse_tree, tree_point};
use weihrauch::suite::{self, SuiteLine, SUITE_DEPTH, SUITE_INPUTS, SUITE_SEED};
use weihrauch::weakcomp::{llpo_swap, swap_machines, WeakError};
use weihrauch::witnesses::algebra::{compose_witness, cylindrify, parallelize_witness, product_witness, sum_witness};
use weihrauch::witnesses::named::{gen, Entry};
use weihrauch::witnesses::{check, pointwise, CheckConfig, Witness, WitnessError};
use weihrauch::wkl::extracted_paths;

#[derive(Parser)]
#[command(name = "weihrauch", version, about = "Check Weihrauch reductions between problems on Baire space")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Print the value set of a problem at an input literal.
    Eval { problem: String, literal: String },
    /// Check a registered witness.
    Check {
        witness: String,
        #[arg(long, default_value_t = SUITE_DEPTH)]
        depth: usize,
        /// One input literal per line; `#` starts a comment.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Generated inputs, when no corpus file is given.
        #[arg(long, default_value_t = SUITE_INPUTS)]
        inputs: usize,
    },
    ListWitnesses,
    /// Derive `w1;w2` and check it on the corpus of `w1`.
    Compose { first: String, second: String, #[command(flatten)] run: RunArgs },
    /// Derive `w1×w2` and check it on paired corpora.
    Product { first: String, second: String, #[command(flatten)] run: RunArgs },
    /// Derive `w1⊕w2` and check it on paired corpora.
    Sum { first: String, second: String, #[command(flatten)] run: RunArgs },
    /// Derive the parallelization of a witness.
    Parallelize { witness: String, #[command(flatten)] run: RunArgs },
    /// Derive the cylindrification of a witness.
    Cylindrify { witness: String, #[command(flatten)] run: RunArgs },
    Wkl {
        #[command(subcommand)]
        action: WklAction,
    },
    /// Swap a machine past LLPÔ at a point.
    Swap {
        #[arg(long)]
        machine: String,
        #[arg(long)]
        point: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    Limit {
        #[command(subcommand)]
        action: LimitAction,
    },
    Medvedev {
        #[command(subcommand)]
        action: MedvedevAction,
    },
    /// `full`: every registered witness plus the negative controls.
    Suite {
        #[arg(default_value = "full")]
        which: String,
        #[arg(long, default_value_t = SUITE_DEPTH)]
        depth: usize,
        #[arg(long, default_value_t = SUITE_INPUTS)]
        inputs: usize,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long, default_value_t = SUITE_DEPTH)]
    depth: usize,
    #[arg(long, default_value_t = SUITE_INPUTS)]
    inputs: usize,
}

#[derive(Subcommand)]
enum WklAction {
    /// Every path the LLPÔ-based solver extracts, one per oracle branch.
    Solve {
        tree: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Check both directions of WKL ≡ LLPÔ and the round trip.
    WitnessCheck {
        #[arg(long, default_value_t = SUITE_DEPTH)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum LimitAction {
    Run {
        #[arg(long)]
        k: usize,
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<String>,
        #[arg(long, default_value_t = 32)]
        budget: usize,
    },
    Adversary {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_QUIET)]
        quiet: usize,
    },
}

#[derive(Subcommand)]
enum MedvedevAction {
    /// Run a machine on every member of B against A.
    Check {
        a: String,
        b: String,
        /// id, flip, shift, succ, or a point literal for a constant machine.
        #[arg(long)]
        machine: String,
        #[arg(long, default_value_t = SUITE_DEPTH)]
        depth: usize,
    },
    /// Check c_A ≤W c_B through the embedding, then translate back.
    Embed {
        a: String,
        b: String,
        #[arg(long)]
        machine: String,
        #[arg(long, default_value_t = SUITE_DEPTH)]
        depth: usize,
    },
    /// The four set-operation witnesses for A and B.
    Setops {
        a: String,
        b: String,
        #[arg(long, default_value_t = SUITE_DEPTH)]
        depth: usize,
    },
}

enum Fail {
    Usage(String),
    Capacity(String),
}

impl From<WitnessError> for Fail {
    fn from(e: WitnessError) -> Self {
        match e {
            WitnessError::CapacityExceeded(_) => Fail::Capacity(e.to_string()),
            _ => Fail::Usage(e.to_string()),
        }
    }
}

impl From<ProblemError> for Fail {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::CapacityExceeded(_) => Fail::Capacity(e.to_string()),
            _ => Fail::Usage(e.to_string()),
        }
    }
}

impl From<WeakError> for Fail {
    fn from(e: WeakError) -> Self {
        match e {
            WeakError::FuelExhausted(_) => Fail::Capacity(e.to_string()),
            WeakError::Witness(w) => w.into(),
            WeakError::Problem(p) => p.into(),
            _ => Fail::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Fail>;

fn usage(e: impl ToString) -> Fail {
    Fail::Usage(e.to_string())
}

fn problem_by_name(name: &str) -> Result<Problem, Fail> {
    Ok(match name {
        "id" => Problem::Identity,
        "lpo" => Problem::Lpo,
        "llpo" => Problem::Llpo,
        "llpo_r" => Problem::LlpoReal,
        "wkl" => Problem::Wkl,
        "compact_choice" => Problem::CompactChoice,
        "c" | "lpo^" => Problem::c(),
        "llpo_hat" | "llpo^" => Problem::llpo_hat(),
        _ => {
            return Err(usage(format!(
                "unknown problem `{name}`; expected one of id, lpo, llpo, llpo_r, wkl, compact_choice, c, llpo_hat"
            )))
        }
    })
}

/// A point, `tree(...)` or `clopen(...)` literal, as a name.
fn literal(s: &str) -> Result<Point, Fail> {
    let t = s.trim_start();
    if t.starts_with("tree(") {
        Ok(tree_point(parse_tree(s).map_err(usage)?))
    } else if t.starts_with("clopen(") {
        Ok(encode_clopen(&parse_clopen(s).map_err(usage)?))
    } else {
        s.parse().map_err(usage)
    }
}

fn entry(name: &str) -> Result<Entry, Fail> {
    suite::find(name).ok_or_else(|| usage(format!("no witness named `{name}`; see list-witnesses")))
}

fn report(line: &SuiteLine) -> bool {
    println!("{line}");
    line.passed()
}

fn run_witness(w: Witness, corpus: &[Point], depth: usize, cap: Option<u128>) -> Outcome {
    let mut cfg = CheckConfig::new(depth).adaptive();
    if let Some(c) = cap {
        cfg = cfg.with_cap(c);
    }
    let outcome = check(&w, corpus, &cfg)?;
    Ok(report(&SuiteLine { name: w.name.clone(), outcome: Ok(outcome), depth }))
}

fn sample(e: &Entry, n: usize, seed: u64) -> Vec<Point> {
    (e.corpus)(&mut StdRng::seed_from_u64(seed), n)
}

fn one(e: &Entry, rng: &mut StdRng) -> Point {
    (e.corpus)(rng, 1).remove(0)
}

fn derived(w: Witness, corpus: Vec<Point>, run: &RunArgs, cap: Option<u128>) -> Outcome {
    println!("{}: {}", w.name, w.claim());
    run_witness(w, &corpus, run.depth, cap)
}

fn paired(first: &str, second: &str, run: &RunArgs, op: fn(&Witness, &Witness) -> Witness) -> Outcome {
    let (a, b) = (entry(first)?, entry(second)?);
    let mut rng = StdRng::seed_from_u64(SUITE_SEED);
    let corpus = (0..run.inputs).map(|_| Point::pair(one(&a, &mut rng), one(&b, &mut rng))).collect();
    derived(op(&a.witness, &b.witness), corpus, run, a.behavior_cap.max(b.behavior_cap))
}

fn machine_by_name(name: &str) -> Result<Machine, Fail> {
    Ok(match name {
        "id" => Machine::identity(),
        "flip" => pointwise("flip", |v| (v == 0) as u64),
        "shift" => Machine::shift_left(),
        "succ" => medvedev::broken_machine(),
        _ => Machine::constant(literal(name)?),
    })
}

fn mass(s: &str) -> Result<MassProblem, Fail> {
    s.parse().map_err(usage)
}

fn words(s: &BTreeSet<Word>) -> String {
    let items: Vec<String> = s.iter().map(|w| format_word(w)).collect();
    format!("{{{}}}", items.join(", "))
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.verb {
        Verb::Eval { problem, literal: lit } => {
            let f = problem_by_name(&problem)?;
            let p = literal(&lit)?;
            if !f.in_domain(&p)? {
                println!("{p} is outside the domain of {f}");
                return Ok(false);
            }
            println!("{}", f.value_set(&p)?);
            Ok(true)
        }
        Verb::Check { witness, depth, corpus, inputs } => {
            let e = entry(&witness)?;
            let points = match corpus {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|err| usage(format!("{}: {err}", path.display())))?;
                    text.lines()
                        .map(|l| l.split('#').next().unwrap_or("").trim())
                        .filter(|l| !l.is_empty())
                        .map(literal)
                        .collect::<Result<Vec<_>, _>>()?
                }
                None => sample(&e, inputs, SUITE_SEED),
            };
            run_witness(e.witness, &points, depth, e.behavior_cap)
        }
        Verb::ListWitnesses => {
            for e in suite::registry() {
                println!("{}: {}", e.name(), e.witness.claim());
            }
            Ok(true)
        }
        Verb::Compose { first, second, run } => {
            let (a, b) = (entry(&first)?, entry(&second)?);
            let w = compose_witness(&a.witness, &b.witness)?;
            derived(w, sample(&a, run.inputs, SUITE_SEED), &run, a.behavior_cap.max(b.behavior_cap))
        }
        Verb::Product { first, second, run } => paired(&first, &second, &run, product_witness),
        Verb::Sum { first, second, run } => paired(&first, &second, &run, sum_witness),
        Verb::Parallelize { witness, run } => {
            let e = entry(&witness)?;
            let mut rng = StdRng::seed_from_u64(SUITE_SEED);
            let corpus = (0..run.inputs).map(|_| gen::tuple_of(&mut rng, |r| one(&e, r))).collect();
            derived(parallelize_witness(&e.witness), corpus, &run, e.behavior_cap)
        }
        Verb::Cylindrify { witness, run } => {
            let e = entry(&witness)?;
            let mut rng = StdRng::seed_from_u64(SUITE_SEED);
            let corpus = (0..run.inputs)
                .map(|_| {
                    let side = gen::nat_point(&mut rng);
                    Point::pair(side, one(&e, &mut rng))
                })
                .collect();
            derived(cylindrify(&e.witness), corpus, &run, e.behavior_cap)
        }
        Verb::Wkl { action: WklAction::Solve { tree, depth } } => {
            let t = parse_tree(&tree).map_err(usage)?;
            if !t.is_infinite() {
                println!("{t} is finite; WKL has no instance here");
                return Ok(false);
            }
            let paths = extracted_paths(&t, depth);
            let mut ok = true;
            for p in &paths {
                let inside = (0..=p.len()).all(|j| t.contains(&p[..j]));
                ok &= inside;
                println!("{} {}", format_word(p), if inside { "in [T]" } else { "LEAVES T" });
            }
            println!("{} branches to depth {depth}", paths.len());
            Ok(ok)
        }
        Verb::Wkl { action: WklAction::WitnessCheck { depth } } => {
            let names = ["wkl_to_llpo_hat", "llpo_hat_to_wkl", "llpo_hat_round_trip"];
            let entries: Vec<Entry> = names.iter().map(|n| entry(n)).collect::<Result<_, _>>()?;
            let lines = suite::run_suite(&entries, depth, SUITE_INPUTS);
            Ok(lines.iter().map(report).fold(true, |a, b| a & b))
        }
        Verb::Swap { machine, point, depth } => {
            let (name, m, d) = swap_machines()
                .into_iter()
                .find(|(n, _, _)| *n == machine)
                .ok_or_else(|| {
                    let known: Vec<&str> = swap_machines().iter().map(|(n, _, _)| *n).collect();
                    usage(format!("unknown machine `{machine}`; expected one of {}", known.join(", ")))
                })?;
            let p = literal(&point)?;
            let depth = depth.unwrap_or(d);
            let swap = llpo_swap(&m, &p, depth)?;
            let g = swap.g.apply(&p)?;
            let rows: Vec<String> = (0..depth as u64)
                .map(|n| g.row(n).map(|r| format!("{n}: {}", Point::evp(r.prefix(8), vec![0]))))
                .collect::<Result<_, _>>()
                .map_err(usage)?;
            println!("machine {name}, depth {depth}");
            println!("G(p) rows: {}", rows.join("; "));
            let (left, right) = swap.sides(&m, &p)?;
            println!("F∘LLPÔ(p) = {}", words(&left));
            println!("LLPÔ(G(p)) = {}", words(&right));
            let same = left == right;
            println!("{}", if same { "equal" } else { "DIFFERENT" });
            Ok(same)
        }
        Verb::Limit { action: LimitAction::Run { k, inputs, budget } } => {
            if inputs.len() != k {
                return Err(usage(format!("expected {k} inputs, got {}", inputs.len())));
            }
            let points: Vec<Point> = inputs.iter().map(|s| literal(s)).collect::<Result<_, _>>()?;
            let run = run_lpo_k(k, &points, budget);
            println!("{run}");
            Ok(run.mind_changes <= k)
        }
        Verb::Limit { action: LimitAction::Adversary { k, quiet } } => {
            let out = adversary(&lpo_k_machine(k), k, quiet, 100_000).map_err(|e| Fail::Capacity(e.to_string()))?;
            for (i, p) in out.inputs.iter().enumerate() {
                println!("input {i}: {p}");
            }
            println!("{}", out.run);
            println!("final answer {}", if out.correct { "correct" } else { "WRONG" });
            Ok(out.correct && out.run.mind_changes == k)
        }
        Verb::Medvedev { action: MedvedevAction::Check { a, b, machine, depth } } => {
            let r = medvedev::medvedev_check(&mass(&a)?, &mass(&b)?, &machine_by_name(&machine)?, depth);
            print!("{r}");
            Ok(r.passed())
        }
        Verb::Medvedev { action: MedvedevAction::Embed { a, b, machine, depth } } => {
            let (a, b) = (mass(&a)?, mass(&b)?);
            let w = medvedev::embed_forward(&a, &b, &machine_by_name(&machine)?);
            let corpus: Vec<Point> = {
                let mut rng = StdRng::seed_from_u64(SUITE_SEED);
                (0..SUITE_INPUTS).map(|_| gen::nat_point(&mut rng)).collect()
            };
            let forward = run_witness(w.clone(), &corpus, depth, None)?;
            let back = medvedev::medvedev_check(&a, &b, &medvedev::embed_backward(&w), depth);
            print!("{back}");
            Ok(forward && back.passed())
        }
        Verb::Medvedev { action: MedvedevAction::Setops { a, b, depth } } => {
            let (a, b) = (mass(&a)?, mass(&b)?);
            let mut rng = StdRng::seed_from_u64(SUITE_SEED);
            let corpus: Vec<Point> =
                (0..SUITE_INPUTS).map(|_| gen::pair(&mut rng, gen::nat_point, gen::nat_point)).collect();
            let mut ok = true;
            for w in medvedev::set_ops_correspondence(&a, &b) {
                ok &= run_witness(w, &corpus, depth, None)?;
            }
            Ok(ok)
        }
        Verb::Suite { which, depth, inputs } => {
            let (entries, controls) = match which.as_str() {
                "full" => (suite::registry(), suite::negative_controls()),
                "named" => (weihrauch::witnesses::named::named_witnesses(), vec![]),
                "negative" => (vec![], suite::negative_controls()),
                _ => return Err(usage(format!("unknown suite `{which}`; expected full, named or negative"))),
            };
            let mut ok = true;
            for line in suite::run_suite(&entries, depth, inputs) {
                ok &= report(&line);
            }
            for line in suite::run_suite(&controls, depth, inputs) {
                let rejected = matches!(&line.outcome, Ok(r) if r.first_failure().is_some());
                println!("control {line}{}", if rejected { "" } else { " NOT REJECTED" });
                ok &= rejected;
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Capacity(m)) => {
            eprintln!("capacity: {m}");
            ExitCode::from(3)
        }
    }
}
