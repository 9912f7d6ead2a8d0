//! Limit machines that may revise their output, and mind-change counting.
//!
//! A limit machine is modeled by its guess at time `t`, computed from the
//! first `t` symbols of each input. A mind change is a guess that does not
//! extend the previous one.

use std::fmt;
use std::sync::Arc;

use crate::baire::{is_prefix, Point, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LimitError {
    #[error("no stable guess by time {time} at stage {stage}")]
    NonConvergent { stage: usize, time: usize },
}

/// Steps a guess must stay unchanged to count as stable.
pub const DEFAULT_QUIET: usize = 64;

type GuessFn = Arc<dyn Fn(&[Word]) -> Word + Send + Sync>;

#[derive(Clone)]
pub struct LimitMachine {
    name: String,
    arity: usize,
    guess: GuessFn,
}

impl LimitMachine {
    pub fn new(name: &str, arity: usize, guess: impl Fn(&[Word]) -> Word + Send + Sync + 'static) -> Self {
        LimitMachine {
            name: name.into(),
            arity,
            guess: Arc::new(guess),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The guess after reading `t` symbols of every input.
    pub fn guess_at(&self, inputs: &[Point], t: usize) -> Word {
        let prefixes: Vec<Word> = inputs.iter().map(|p| p.prefix(t)).collect();
        (self.guess)(&prefixes)
    }

    /// Runs for `steps` time steps, recording each new guess.
    pub fn run(&self, inputs: &[Point], steps: usize) -> LimitRun {
        let mut run = LimitRun::default();
        for t in 0..=steps {
            run.observe(t, self.guess_at(inputs, t));
        }
        run
    }
}

impl fmt::Debug for LimitMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LimitMachine({}, arity {})", self.name, self.arity)
    }
}

/// The distinct guesses of a run, with the time each first appeared.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LimitRun {
    pub guesses: Vec<(usize, Word)>,
    pub mind_changes: usize,
}

impl LimitRun {
    fn observe(&mut self, t: usize, g: Word) {
        match self.guesses.last() {
            Some((_, last)) if *last == g => {}
            Some((_, last)) => {
                if !is_prefix(last, &g) {
                    self.mind_changes += 1;
                }
                self.guesses.push((t, g));
            }
            None => self.guesses.push((t, g)),
        }
    }

    pub fn answer(&self) -> Option<&Word> {
        self.guesses.last().map(|(_, g)| g)
    }
}

impl fmt::Display for LimitRun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, g) in &self.guesses {
            let bits: Vec<String> = g.iter().map(u64::to_string).collect();
            writeln!(f, "t={t}: ({})", bits.join(","))?;
        }
        write!(f, "mind changes: {}", self.mind_changes)
    }
}

/// `LPO^(k)`: start from `(1,…,1)` and flip component `i` once a zero shows up in input `i`.
pub fn lpo_k_machine(k: usize) -> LimitMachine {
    LimitMachine::new(&format!("LPO^({k})"), k, |prefixes| {
        prefixes.iter().map(|w| if w.contains(&0) { 0 } else { 1 }).collect()
    })
}

/// A candidate that commits to its guess at time `at` and never revises it.
pub fn committed_lpo_k(k: usize, at: usize) -> LimitMachine {
    LimitMachine::new(&format!("committed@{at}"), k, move |prefixes| {
        if prefixes.first().map_or(0, Vec::len) < at {
            return vec![];
        }
        prefixes.iter().map(|w| if w[..at].contains(&0) { 0 } else { 1 }).collect()
    })
}

/// Runs [`lpo_k_machine`] on `inputs`. The scan reaches at least `budget`, and
/// far enough to see the first zero of every input that has one.
pub fn run_lpo_k(k: usize, inputs: &[Point], budget: usize) -> LimitRun {
    let decisive = inputs
        .iter()
        .filter_map(|p| p.min_zero().ok().flatten())
        .map(|z| z as usize + 1)
        .max()
        .unwrap_or(0);
    lpo_k_machine(k).run(inputs, budget.max(decisive))
}

/// Inputs built against a machine, and the machine's run on them.
#[derive(Debug, Clone)]
pub struct AdversaryOutcome {
    pub inputs: Vec<Point>,
    pub run: LimitRun,
    /// The final guess is the `LPO^(k)` answer of the constructed inputs.
    pub correct: bool,
}

/// Starts from `(1^ω,…,1^ω)`; whenever the guess has been stable for `quiet`
/// steps at time `t`, puts a 0 at position `t` of the next input.
pub fn adversary(m: &LimitMachine, k: usize, quiet: usize, budget: usize) -> Result<AdversaryOutcome, LimitError> {
    let mut zeros: Vec<Option<usize>> = vec![None; k];
    let inputs_of = |zeros: &[Option<usize>]| -> Vec<Point> {
        zeros
            .iter()
            .map(|z| match z {
                Some(t) => {
                    let mut head = vec![1; *t];
                    head.push(0);
                    Point::evp(head, vec![1])
                }
                None => Point::ones(),
            })
            .collect()
    };
    let mut t = 0;
    for stage in 0..=k {
        let inputs = inputs_of(&zeros);
        let (mut last, mut since) = (m.guess_at(&inputs, t), t);
        loop {
            if last.len() == k && t - since >= quiet {
                break;
            }
            t += 1;
            if t > budget {
                return Err(LimitError::NonConvergent { stage, time: t });
            }
            let g = m.guess_at(&inputs, t);
            if g != last {
                (last, since) = (g, t);
            }
        }
        if stage < k {
            zeros[stage] = Some(t);
        }
    }
    let inputs = inputs_of(&zeros);
    let run = m.run(&inputs, t);
    let want: Word = zeros.iter().map(|z| if z.is_some() { 0 } else { 1 }).collect();
    let correct = run.answer() == Some(&want);
    Ok(AdversaryOutcome { inputs, run, correct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ones_then_zero(at: usize) -> Point {
        let mut head = vec![1; at];
        head.push(0);
        Point::evp(head, vec![1])
    }

    #[test]
    fn no_zeros_no_changes() {
        let run = run_lpo_k(2, &[Point::ones(), Point::ones()], 20);
        assert_eq!(run.answer(), Some(&vec![1, 1]));
        assert_eq!(run.mind_changes, 0);
    }

    #[test]
    fn one_zero_one_change() {
        let run = run_lpo_k(2, &[Point::zeros(), Point::ones()], 20);
        assert_eq!(run.answer(), Some(&vec![0, 1]));
        assert_eq!(run.mind_changes, 1);
    }

    #[test]
    fn staggered_zeros_change_once_each() {
        let inputs = [ones_then_zero(7), ones_then_zero(2), ones_then_zero(4)];
        let run = run_lpo_k(3, &inputs, 10);
        assert_eq!(run.mind_changes, 3);
        // zero at position n is seen once n + 1 symbols are read
        let times: Vec<usize> = run.guesses.iter().map(|(t, _)| *t).collect();
        assert_eq!(times, vec![0, 3, 5, 8]);
        assert_eq!(run.answer(), Some(&vec![0, 0, 0]));
    }

    #[test]
    fn simultaneous_zeros_are_one_change() {
        let run = run_lpo_k(2, &[ones_then_zero(3), ones_then_zero(3)], 10);
        assert_eq!(run.mind_changes, 1);
    }

    #[test]
    fn late_zero_is_found_past_the_budget() {
        let run = run_lpo_k(1, &[ones_then_zero(50)], 5);
        assert_eq!(run.answer(), Some(&vec![0]));
    }

    #[test]
    fn extensions_are_not_changes() {
        let mut run = LimitRun::default();
        for (t, g) in [(0, vec![]), (1, vec![1]), (2, vec![1, 0]), (3, vec![0])] {
            run.observe(t, g);
        }
        assert_eq!(run.mind_changes, 1);
    }

    #[test]
    fn adversary_forces_k_changes() {
        for k in 1..=4 {
            let out = adversary(&lpo_k_machine(k), k, DEFAULT_QUIET, 10_000).unwrap();
            assert_eq!(out.run.mind_changes, k);
            assert!(out.correct);
            assert_eq!(out.run.answer(), Some(&vec![0; k]));
        }
    }

    #[test]
    fn committed_machine_ends_wrong() {
        for k in 1..=3 {
            let out = adversary(&committed_lpo_k(k, 8), k, DEFAULT_QUIET, 10_000).unwrap();
            assert_eq!(out.run.mind_changes, 0);
            assert!(!out.correct);
            assert_eq!(out.run.answer(), Some(&vec![1; k]));
        }
    }

    #[test]
    fn silent_machine_does_not_converge() {
        let m = LimitMachine::new("silent", 1, |_| vec![]);
        assert_eq!(
            adversary(&m, 1, 4, 100).unwrap_err(),
            LimitError::NonConvergent { stage: 0, time: 101 }
        );
    }

    fn tuple() -> impl Strategy<Value = Vec<(Vec<u64>, Vec<u64>)>> {
        let point = (prop::collection::vec(0u64..3, 0..8), prop::collection::vec(0u64..3, 1..4));
        prop::collection::vec(point, 1..=4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn at_most_k_changes_and_right_answer(parts in tuple()) {
            let inputs: Vec<Point> = parts.iter().map(|(h, p)| Point::evp(h.clone(), p.clone())).collect();
            let k = inputs.len();
            let run = run_lpo_k(k, &inputs, 4);
            prop_assert!(run.mind_changes <= k);
            let want: Word = parts
                .iter()
                .map(|(h, p)| if h.contains(&0) || p.contains(&0) { 0 } else { 1 })
                .collect();
            prop_assert_eq!(run.answer(), Some(&want));
        }
    }
}
