//! Step relation, runs on lasso words, and the bounded brute-force
//! acceptance oracle.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::automaton::{BlindCounterAutomaton, Label, StateId, Transition};
use crate::search::{Edge, Exploration, LassoSystem, SearchVerdict, Succ};
use crate::words::LassoWord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(char),
    #[error("configuration has {found} counters, automaton has {expected}")]
    CounterArity { expected: usize, found: usize },
}

/// A state together with its counter values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: StateId,
    pub counters: Vec<u64>,
}

impl Configuration {
    pub fn new(state: StateId, counters: Vec<u64>) -> Self {
        Self { state, counters }
    }

    pub fn initial(a: &BlindCounterAutomaton) -> Self {
        Self::new(a.initial(), vec![0; a.counter_count()])
    }
}

fn check_arity(a: &BlindCounterAutomaton, c: &Configuration) -> Result<(), SemanticsError> {
    if c.counters.len() != a.counter_count() {
        return Err(SemanticsError::CounterArity {
            expected: a.counter_count(),
            found: c.counters.len(),
        });
    }
    Ok(())
}

/// Configurations reachable from `c` by exactly one transition reading `letter`.
pub fn step_all(
    a: &BlindCounterAutomaton,
    c: &Configuration,
    letter: char,
) -> Result<BTreeSet<Configuration>, SemanticsError> {
    if !a.alphabet().contains(&letter) {
        return Err(SemanticsError::UnknownLetter(letter));
    }
    check_arity(a, c)?;
    Ok(fire_all(a, c, Label::Letter(letter))
        .map(|(_, n)| n)
        .collect())
}

fn fire_all<'a>(
    a: &'a BlindCounterAutomaton,
    c: &'a Configuration,
    label: Label,
) -> impl Iterator<Item = (&'a Transition, Configuration)> + 'a {
    a.transitions()
        .iter()
        .filter(move |t| t.source == c.state && t.label == label)
        .filter_map(move |t| {
            t.fire(&c.counters)
                .map(|n| (t, Configuration::new(t.target, n)))
        })
}

/// Configurations reachable from `c` by ε-transitions only (including `c`).
pub fn epsilon_closure(
    a: &BlindCounterAutomaton,
    c: &Configuration,
) -> Result<BTreeSet<Configuration>, SemanticsError> {
    check_arity(a, c)?;
    let mut seen = BTreeSet::from([c.clone()]);
    let mut stack = vec![c.clone()];
    while let Some(x) = stack.pop() {
        for (_, y) in fire_all(a, &x, Label::Epsilon) {
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    Ok(seen)
}

/// Configurations reachable after reading `word` from the initial
/// configuration, with ε-moves allowed before, between and after letters.
pub fn reachable_after(
    a: &BlindCounterAutomaton,
    word: &[char],
) -> Result<BTreeSet<Configuration>, SemanticsError> {
    let mut current = epsilon_closure(a, &Configuration::initial(a))?;
    for &letter in word {
        let mut next = BTreeSet::new();
        for c in &current {
            for d in step_all(a, c, letter)? {
                next.extend(epsilon_closure(a, &d)?);
            }
        }
        current = next;
    }
    Ok(current)
}

/// Bounds for the brute-force oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExplorationCaps {
    /// Largest counter value explored.
    pub counter_cap: u64,
    /// Largest number of steps from the initial configuration.
    pub depth_cap: usize,
}

impl ExplorationCaps {
    pub fn new(counter_cap: u64, depth_cap: usize) -> Self {
        Self {
            counter_cap,
            depth_cap,
        }
    }
}

/// Configuration paired with a position in the lasso.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoConfiguration {
    pub state: StateId,
    pub position: usize,
    pub counters: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunStep {
    pub transition: Transition,
    pub from: LassoConfiguration,
    pub to: LassoConfiguration,
}

/// A finite stem followed by a cycle that is repeated forever. When
/// `pumped` is set the cycle ends with counters at least as large as where
/// it started, and later iterations use the guard-1 twins where needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub initial: LassoConfiguration,
    pub stem: Vec<RunStep>,
    pub cycle: Vec<RunStep>,
    pub pumped: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("replay failed: {0}")]
pub struct ReplayError(pub String);

fn fmt_counters(c: &[u64]) -> String {
    c.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl Run {
    /// One line per step, `state pos counters --letter--> state' pos' counters'`,
    /// with a `CYCLE-START` line before the first cycle step.
    pub fn trace(&self, a: &BlindCounterAutomaton) -> String {
        let mut s = String::new();
        let line = |s: &mut String, st: &RunStep| {
            let _ = writeln!(
                s,
                "{} {} {} --{}--> {} {} {}",
                a.state_name(st.from.state),
                st.from.position,
                fmt_counters(&st.from.counters),
                st.transition.label,
                a.state_name(st.to.state),
                st.to.position,
                fmt_counters(&st.to.counters)
            );
        };
        for st in &self.stem {
            line(&mut s, st);
        }
        s.push_str("CYCLE-START\n");
        for st in &self.cycle {
            line(&mut s, st);
        }
        s
    }

    pub fn steps(&self) -> impl Iterator<Item = &RunStep> {
        self.stem.iter().chain(&self.cycle)
    }

    /// Total counter change of one cycle iteration.
    pub fn cycle_effect(&self) -> Vec<i64> {
        match (self.cycle.first(), self.cycle.last()) {
            (Some(f), Some(l)) => f
                .from
                .counters
                .iter()
                .zip(&l.to.counters)
                .map(|(&x, &y)| y as i64 - x as i64)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Letter-level configurations along the infinite run: the i-th element
    /// is the configuration just before reading letter i. Pumped cycles are
    /// unrolled with their counter shift. ε-steps are folded away.
    pub fn letter_configurations(&self, letters: usize) -> Vec<(StateId, Vec<u64>)> {
        let mut out = Vec::with_capacity(letters);
        for st in &self.stem {
            if out.len() >= letters {
                return out;
            }
            if !st.transition.label.is_epsilon() {
                out.push((st.from.state, st.from.counters.clone()));
            }
        }
        let effect = self.cycle_effect();
        if self.cycle.iter().all(|s| s.transition.label.is_epsilon()) {
            return out;
        }
        let mut round = 0i64;
        while out.len() < letters {
            for st in &self.cycle {
                if out.len() >= letters {
                    break;
                }
                if !st.transition.label.is_epsilon() {
                    let shifted = st
                        .from
                        .counters
                        .iter()
                        .zip(&effect)
                        .map(|(&c, &e)| (c as i64 + round * e) as u64)
                        .collect();
                    out.push((st.from.state, shifted));
                }
            }
            round += 1;
        }
        out
    }

    /// Checks that the run is legal on `w`, that its cycle reads a letter
    /// and visits an accepting mark, and that it can be repeated.
    pub fn replay(&self, a: &BlindCounterAutomaton, w: &LassoWord) -> Result<(), ReplayError> {
        let fail = |m: String| Err(ReplayError(m));
        let start = LassoConfiguration {
            state: a.initial(),
            position: 0,
            counters: vec![0; a.counter_count()],
        };
        if self.initial != start {
            return fail("run does not start in the initial configuration".into());
        }
        let mut cur = start;
        for (i, st) in self.steps().enumerate() {
            if st.from != cur {
                return fail(format!("step {i} does not continue from the previous one"));
            }
            check_step(a, w, st).map_err(|m| ReplayError(format!("step {i}: {m}")))?;
            cur = st.to.clone();
        }
        let (Some(first), Some(last)) = (self.cycle.first(), self.cycle.last()) else {
            return fail("empty cycle".into());
        };
        if !self.cycle.iter().any(|s| !s.transition.label.is_epsilon()) {
            return fail("cycle reads no letter".into());
        }
        let marked = |steps: &[RunStep]| {
            steps.iter().any(|s| {
                a.is_accepting_transition(&s.transition) || a.is_accepting_state(s.to.state)
            })
        };
        if !marked(&self.cycle) {
            return fail("cycle visits no accepting mark".into());
        }
        let (s0, e0) = (&first.from, &last.to);
        if s0.state != e0.state || s0.position != e0.position {
            return fail("cycle does not return to its control point".into());
        }
        if !self.pumped {
            if s0.counters != e0.counters {
                return fail("unpumped cycle changes the counters".into());
            }
            return Ok(());
        }
        if !s0.counters.iter().zip(&e0.counters).all(|(x, y)| y >= x) {
            return fail("pumped cycle decreases a counter".into());
        }
        // second iteration from the shifted configuration, switching to
        // the twin guard instance wherever a counter left zero
        let mut cur = e0.clone();
        let mut second = Vec::new();
        for (i, st) in self.cycle.iter().enumerate() {
            let mut t = st.transition.clone();
            for (g, &c) in t.guards.iter_mut().zip(&cur.counters) {
                *g = c >= 1;
            }
            if !a.contains_transition(&t) {
                return fail(format!(
                    "pumped step {i}: no twin instance {}",
                    a.describe(&t)
                ));
            }
            let Some(counters) = t.fire(&cur.counters) else {
                return fail(format!("pumped step {i} is disabled"));
            };
            let position = match t.label {
                Label::Epsilon => cur.position,
                Label::Letter(_) => w.next_position(cur.position),
            };
            let next = LassoConfiguration {
                state: t.target,
                position,
                counters,
            };
            second.push(RunStep {
                transition: t,
                from: cur,
                to: next.clone(),
            });
            cur = next;
        }
        if !marked(&second) {
            return fail("second cycle iteration loses the accepting mark".into());
        }
        if cur.state != e0.state
            || cur.position != e0.position
            || !e0.counters.iter().zip(&cur.counters).all(|(x, y)| y >= x)
        {
            return fail("second cycle iteration does not pump".into());
        }
        Ok(())
    }
}

fn check_step(a: &BlindCounterAutomaton, w: &LassoWord, st: &RunStep) -> Result<(), String> {
    let t = &st.transition;
    if !a.contains_transition(t) {
        return Err(format!("{} is not a transition", a.describe(t)));
    }
    if t.source != st.from.state || t.target != st.to.state {
        return Err("endpoints do not match the transition".into());
    }
    let expected_pos = match t.label {
        Label::Epsilon => st.from.position,
        Label::Letter(c) => {
            if st.from.position >= w.positions() || w.letter_at_position(st.from.position) != c {
                return Err(format!("letter {c} not at position {}", st.from.position));
            }
            w.next_position(st.from.position)
        }
    };
    if st.to.position != expected_pos {
        return Err("wrong successor position".into());
    }
    match t.fire(&st.from.counters) {
        Some(c) if c == st.to.counters => Ok(()),
        Some(_) => Err("counter update mismatch".into()),
        None => Err(format!(
            "{} disabled at {:?}",
            a.describe(t),
            st.from.counters
        )),
    }
}

/// Outcome of the bounded oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Accept(Run),
    /// The whole configuration graph within the counter cap was explored
    /// and holds no accepting lasso. Only conclusive when the cap was not
    /// touched.
    RejectWithinCaps {
        cap_touched: bool,
    },
    /// The depth cap stopped the exploration first.
    Inconclusive {
        cap_touched: bool,
    },
}

impl OracleVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, OracleVerdict::Accept(_))
    }

    /// `Some(accepted)` when the verdict can be trusted as ground truth.
    pub fn conclusive(&self) -> Option<bool> {
        match self {
            OracleVerdict::Accept(_) => Some(true),
            OracleVerdict::RejectWithinCaps { cap_touched: false } => Some(false),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OracleVerdict::Accept(_) => "accept",
            OracleVerdict::RejectWithinCaps { .. } => "reject-within-caps",
            OracleVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// The configuration graph of an automaton running on a lasso.
pub(crate) struct AutomatonOnLasso<'a> {
    a: &'a BlindCounterAutomaton,
    w: &'a LassoWord,
    cap: u64,
    by_source: Vec<Vec<usize>>,
    monotone: bool,
}

impl<'a> AutomatonOnLasso<'a> {
    pub(crate) fn new(a: &'a BlindCounterAutomaton, w: &'a LassoWord, cap: u64) -> Self {
        let mut by_source = vec![Vec::new(); a.state_count()];
        for (i, t) in a.transitions().iter().enumerate() {
            if t.source.0 < by_source.len() {
                by_source[t.source.0].push(i);
            }
        }
        Self {
            a,
            w,
            cap,
            by_source,
            monotone: a.validate().is_empty(),
        }
    }

    pub(crate) fn to_run(&self, l: crate::search::Lasso<LassoConfiguration, usize>) -> Run {
        let conv = |e: Edge<LassoConfiguration, usize>| RunStep {
            transition: self.a.transitions()[e.step].clone(),
            from: e.from,
            to: e.to,
        };
        Run {
            initial: self.initial(),
            stem: l.stem.into_iter().map(conv).collect(),
            cycle: l.cycle.into_iter().map(conv).collect(),
            pumped: l.pumped,
        }
    }
}

impl LassoSystem for AutomatonOnLasso<'_> {
    type Node = LassoConfiguration;
    type Step = usize;
    type Control = (StateId, usize);

    fn initial(&self) -> LassoConfiguration {
        LassoConfiguration {
            state: self.a.initial(),
            position: 0,
            counters: vec![0; self.a.counter_count()],
        }
    }

    fn successors(
        &self,
        n: &LassoConfiguration,
        out: &mut Vec<Succ<LassoConfiguration, usize>>,
    ) -> bool {
        let letter = self.w.letter_at_position(n.position);
        let mut touched = false;
        for &i in &self.by_source[n.state.0] {
            let t = &self.a.transitions()[i];
            let position = match t.label {
                Label::Epsilon => n.position,
                Label::Letter(c) if c == letter => self.w.next_position(n.position),
                Label::Letter(_) => continue,
            };
            let Some(counters) = t.fire(&n.counters) else {
                continue;
            };
            if counters.iter().any(|&c| c > self.cap) {
                touched = true;
                continue;
            }
            out.push(Succ {
                target: LassoConfiguration {
                    state: t.target,
                    position,
                    counters,
                },
                step: i,
                reads_letter: !t.label.is_epsilon(),
                accepting: self.a.is_accepting_transition(t),
            });
        }
        touched
    }

    fn is_accepting(&self, n: &LassoConfiguration) -> bool {
        self.a.is_accepting_state(n.state)
    }

    fn control(&self, n: &LassoConfiguration) -> (StateId, usize) {
        (n.state, n.position)
    }

    fn counters<'n>(&self, n: &'n LassoConfiguration) -> &'n [u64] {
        &n.counters
    }

    fn monotone(&self) -> bool {
        self.monotone
    }
}

fn check_word(a: &BlindCounterAutomaton, w: &LassoWord) -> Result<(), SemanticsError> {
    for &c in w.prefix().iter().chain(w.period()) {
        if !a.alphabet().contains(&c) {
            return Err(SemanticsError::UnknownLetter(c));
        }
    }
    Ok(())
}

/// Brute-force Büchi acceptance of `w` within the given caps.
///
/// ε-transitions are followed as moves that do not advance the lasso
/// position. For automata that pass validation, a segment that returns to
/// the same state and position with no smaller counters is accepted as a
/// pumpable cycle.
pub fn oracle_accept(
    a: &BlindCounterAutomaton,
    w: &LassoWord,
    caps: ExplorationCaps,
) -> Result<OracleVerdict, SemanticsError> {
    check_word(a, w)?;
    let sys = AutomatonOnLasso::new(a, w, caps.counter_cap);
    let ex = Exploration::run(&sys, caps.depth_cap);
    Ok(match ex.verdict() {
        SearchVerdict::Accept(l) => OracleVerdict::Accept(sys.to_run(l)),
        SearchVerdict::RejectWithinCaps { cap_touched } => {
            OracleVerdict::RejectWithinCaps { cap_touched }
        }
        SearchVerdict::Inconclusive { cap_touched } => OracleVerdict::Inconclusive { cap_touched },
    })
}

/// Distinct accepting stem+cycle witnesses within caps, one per cycle
/// start, in discovery order.
pub fn enumerate_accepting_runs(
    a: &BlindCounterAutomaton,
    w: &LassoWord,
    caps: ExplorationCaps,
    limit: usize,
) -> Result<Vec<Run>, SemanticsError> {
    check_word(a, w)?;
    if limit == 0 {
        return Ok(Vec::new());
    }
    let sys = AutomatonOnLasso::new(a, w, caps.counter_cap);
    let ex = Exploration::run(&sys, caps.depth_cap);
    Ok(ex
        .accepting_lassos(limit)
        .into_iter()
        .map(|l| sys.to_run(l))
        .collect())
}

/// Counts configurations per state reachable on `w` within caps; mainly a
/// debugging aid for the CLI.
pub fn explored_states(
    a: &BlindCounterAutomaton,
    w: &LassoWord,
    caps: ExplorationCaps,
) -> HashMap<StateId, usize> {
    let sys = AutomatonOnLasso::new(a, w, caps.counter_cap);
    let ex = Exploration::run(&sys, caps.depth_cap);
    let mut m = HashMap::new();
    for n in ex.nodes() {
        *m.entry(n.state).or_insert(0) += 1;
    }
    m
}
