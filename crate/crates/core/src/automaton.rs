//! Blind-counter Büchi automata: the data model, well-formedness rules,
//! ε-elimination and the line-oriented text format.
//!
//! A transition carries one guard flag and one delta per counter. A guard
//! flag of `0` means "this instance fires when the counter is zero", `1`
//! means "fires when the counter is positive". An automaton is *blind* when
//! every guard-0 instance has a guard-1 twin, so no transition can branch on
//! whether a counter is empty.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Index of a state inside a [`BlindCounterAutomaton`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

/// Transition label: a letter of the alphabet or ε.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Epsilon,
    Letter(char),
}

impl Label {
    pub fn letter(self) -> Option<char> {
        match self {
            Label::Epsilon => None,
            Label::Letter(c) => Some(c),
        }
    }

    pub fn is_epsilon(self) -> bool {
        matches!(self, Label::Epsilon)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Epsilon => f.write_str("eps"),
            Label::Letter(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub source: StateId,
    pub label: Label,
    /// `true` is guard flag 1 (counter positive), `false` is flag 0.
    pub guards: Vec<bool>,
    pub target: StateId,
    pub deltas: Vec<i8>,
}

impl Transition {
    /// The same transition with the guard flag of `counter` replaced.
    pub fn with_guard(&self, counter: usize, flag: bool) -> Transition {
        let mut t = self.clone();
        t.guards[counter] = flag;
        t
    }

    /// Counter vector after firing from `counters`, or `None` if the guard
    /// semantics forbid it.
    pub fn fire(&self, counters: &[u64]) -> Option<Vec<u64>> {
        if counters.len() != self.guards.len() || counters.len() != self.deltas.len() {
            return None;
        }
        let mut next = Vec::with_capacity(counters.len());
        for ((&c, &g), &d) in counters.iter().zip(&self.guards).zip(&self.deltas) {
            if c >= 1 {
                if !g {
                    return None;
                }
            } else if g || d < 0 {
                return None;
            }
            next.push((c as i64 + d as i64) as u64);
        }
        Some(next)
    }
}

/// Guard vectors of the ε-instances between two states, and whether any is marked.
type EpsilonEdge = (BTreeSet<Vec<bool>>, bool);

fn fmt_guards(guards: &[bool]) -> String {
    guards
        .iter()
        .map(|&g| if g { "1" } else { "0" })
        .collect::<Vec<_>>()
        .join(",")
}

fn fmt_deltas(deltas: &[i8]) -> String {
    deltas
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// A k-blind-counter Büchi automaton.
///
/// Transitions are kept sorted and deduplicated, so two automata built from
/// the same transition set compare equal regardless of insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlindCounterAutomaton {
    states: Vec<String>,
    alphabet: BTreeSet<char>,
    counters: usize,
    transitions: Vec<Transition>,
    initial: StateId,
    accepting_states: BTreeSet<StateId>,
    accepting_transitions: BTreeSet<Transition>,
}

impl BlindCounterAutomaton {
    pub fn new(
        states: Vec<String>,
        alphabet: BTreeSet<char>,
        counters: usize,
        transitions: impl IntoIterator<Item = Transition>,
        initial: StateId,
        accepting_states: BTreeSet<StateId>,
        accepting_transitions: BTreeSet<Transition>,
    ) -> Self {
        let transitions: BTreeSet<Transition> = transitions.into_iter().collect();
        Self {
            states,
            alphabet,
            counters,
            transitions: transitions.into_iter().collect(),
            initial,
            accepting_states,
            accepting_transitions,
        }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, id: StateId) -> &str {
        self.states.get(id.0).map(String::as_str).unwrap_or("?")
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(StateId)
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    pub fn counter_count(&self) -> usize {
        self.counters
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn accepting_states(&self) -> &BTreeSet<StateId> {
        &self.accepting_states
    }

    pub fn accepting_transitions(&self) -> &BTreeSet<Transition> {
        &self.accepting_transitions
    }

    pub fn is_accepting_state(&self, s: StateId) -> bool {
        self.accepting_states.contains(&s)
    }

    pub fn is_accepting_transition(&self, t: &Transition) -> bool {
        self.accepting_transitions.contains(t)
    }

    pub fn has_epsilon(&self) -> bool {
        self.transitions.iter().any(|t| t.label.is_epsilon())
    }

    /// Transitions grouped by everything except the guard flags, i.e. the
    /// edges of a diagram where one arrow stands for all guard instances.
    pub fn edge_families(&self) -> BTreeSet<(StateId, Label, StateId, Vec<i8>)> {
        self.transitions
            .iter()
            .map(|t| (t.source, t.label, t.target, t.deltas.clone()))
            .collect()
    }

    pub fn contains_transition(&self, t: &Transition) -> bool {
        self.transitions.binary_search(t).is_ok()
    }

    /// Every invariant violation, sorted. Empty iff the automaton is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = BTreeSet::new();
        let n = self.states.len();
        if self.counters == 0 {
            out.insert(Violation::NoCounters);
        }
        if self.initial.0 >= n {
            out.insert(Violation::InitialNotAState);
        }
        for s in &self.accepting_states {
            if s.0 >= n {
                out.insert(Violation::AcceptingNotAState(*s));
            }
        }
        let set: BTreeSet<&Transition> = self.transitions.iter().collect();
        for t in &self.transitions {
            let shown = self.describe(t);
            if t.source.0 >= n || t.target.0 >= n {
                out.insert(Violation::EndpointNotAState(shown.clone()));
            }
            if let Label::Letter(c) = t.label {
                if !self.alphabet.contains(&c) {
                    out.insert(Violation::LetterNotInAlphabet(shown.clone()));
                }
            }
            if t.guards.len() != self.counters || t.deltas.len() != self.counters {
                out.insert(Violation::VectorLength(shown.clone()));
                continue;
            }
            if t.deltas.iter().any(|d| !(-1..=1).contains(d)) {
                out.insert(Violation::DeltaOutOfRange(shown.clone()));
            }
            for i in 0..self.counters {
                if t.guards[i] {
                    continue;
                }
                let twin = t.with_guard(i, true);
                if !set.contains(&twin) {
                    out.insert(Violation::Blindness {
                        transition: shown.clone(),
                        counter: i,
                    });
                } else if self.is_accepting_transition(t) != self.is_accepting_transition(&twin) {
                    out.insert(Violation::MarkBlindness {
                        transition: shown.clone(),
                        counter: i,
                    });
                }
                if t.deltas[i] < 0 {
                    out.insert(Violation::ZeroConsistency {
                        transition: shown.clone(),
                        counter: i,
                    });
                }
            }
            if t.label.is_epsilon() && t.deltas.iter().any(|&d| d != 0) {
                out.insert(Violation::EpsilonModifiesCounter(shown.clone()));
            }
        }
        for t in &self.accepting_transitions {
            if !set.contains(t) {
                out.insert(Violation::UnknownAcceptingTransition(self.describe(t)));
            }
        }
        if let Some(cycle) = self.epsilon_cycle() {
            out.insert(Violation::EpsilonCycle(cycle));
        }
        out.into_iter().collect()
    }

    /// Human-readable `(src, letter, guards, dst, deltas)` tuple.
    pub fn describe(&self, t: &Transition) -> String {
        format!(
            "({}, {}, {}, {}, {})",
            self.state_name(t.source),
            t.label,
            fmt_guards(&t.guards),
            self.state_name(t.target),
            fmt_deltas(&t.deltas)
        )
    }

    /// States of some ε-only cycle, if one exists.
    fn epsilon_cycle(&self) -> Option<Vec<String>> {
        let n = self.states.len();
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for t in self.transitions.iter().filter(|t| t.label.is_epsilon()) {
            if t.source.0 < n && t.target.0 < n {
                succ[t.source.0].insert(t.target.0);
            }
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color = vec![0u8; n];
        let mut stack_path = Vec::new();
        fn dfs(
            v: usize,
            succ: &[BTreeSet<usize>],
            color: &mut [u8],
            path: &mut Vec<usize>,
        ) -> Option<Vec<usize>> {
            color[v] = 1;
            path.push(v);
            for &w in &succ[v] {
                if color[w] == 1 {
                    let start = path.iter().position(|&x| x == w).unwrap();
                    return Some(path[start..].to_vec());
                }
                if color[w] == 0 {
                    if let Some(c) = dfs(w, succ, color, path) {
                        return Some(c);
                    }
                }
            }
            path.pop();
            color[v] = 2;
            None
        }
        for v in 0..n {
            if color[v] == 0 {
                if let Some(c) = dfs(v, &succ, &mut color, &mut stack_path) {
                    return Some(c.into_iter().map(|i| self.states[i].clone()).collect());
                }
            }
        }
        None
    }

    /// Removes ε-transitions.
    ///
    /// Each letter transition is composed with every ε-path that may precede
    /// it and every ε-path that may follow it. A composite is put into the
    /// accepting-transition set when an accepting state is visited strictly
    /// inside it (anything but its source and its final target), or when one
    /// of its parts was itself an accepting transition. Landing on an
    /// accepting state is still covered by the state set.
    pub fn eliminate_epsilon(&self) -> Result<BlindCounterAutomaton, EliminationError> {
        if let Some(cycle) = self.epsilon_cycle() {
            return Err(EliminationError::EpsilonCycle(cycle.join(" -> ")));
        }
        if let Some(t) = self
            .transitions
            .iter()
            .find(|t| t.label.is_epsilon() && t.deltas.iter().any(|&d| d != 0))
        {
            return Err(EliminationError::CounterModifyingEpsilon(self.describe(t)));
        }
        if !self.has_epsilon() {
            return Ok(self.clone());
        }

        let n = self.states.len();
        // ε-edges keyed by (source, target) with the guard vectors available
        // and whether any instance is marked accepting.
        let mut eps: BTreeMap<(usize, usize), EpsilonEdge> = BTreeMap::new();
        for t in self.transitions.iter().filter(|t| t.label.is_epsilon()) {
            let e = eps
                .entry((t.source.0, t.target.0))
                .or_insert_with(|| (BTreeSet::new(), false));
            e.0.insert(t.guards.clone());
            e.1 |= self.is_accepting_transition(t);
        }
        let mut eps_succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(s, d) in eps.keys() {
            eps_succ[s].push(d);
        }

        let paths: Vec<Vec<EpsPath>> = (0..n).map(|s| epsilon_paths(s, &eps_succ)).collect();

        let path_enabled = |p: &EpsPath, z: &[bool]| {
            p.states.windows(2).all(|w| {
                eps.get(&(w[0], w[1]))
                    .map(|(gs, _)| gs.contains(z))
                    .unwrap_or(false)
            })
        };
        let path_marked = |p: &EpsPath| {
            p.states
                .windows(2)
                .any(|w| eps.get(&(w[0], w[1])).map(|(_, m)| *m).unwrap_or(false))
        };

        let mut out: BTreeMap<Transition, bool> = BTreeMap::new();
        for src in 0..n {
            for pre in &paths[src] {
                let mid = *pre.states.last().unwrap();
                for t in self
                    .transitions
                    .iter()
                    .filter(|t| t.source.0 == mid && !t.label.is_epsilon())
                {
                    if !path_enabled(pre, &t.guards) {
                        continue;
                    }
                    // Zero/positive pattern of the counters after the step; a
                    // decrement from a positive counter may land on either.
                    let mut after: Vec<Vec<bool>> = vec![Vec::new()];
                    for i in 0..self.counters {
                        let options: &[bool] = match (t.guards[i], t.deltas[i]) {
                            (false, d) => {
                                if d > 0 {
                                    &[true]
                                } else {
                                    &[false]
                                }
                            }
                            (true, d) if d >= 0 => &[true],
                            (true, _) => &[false, true],
                        };
                        after = after
                            .into_iter()
                            .flat_map(|v| {
                                options.iter().map(move |&o| {
                                    let mut v = v.clone();
                                    v.push(o);
                                    v
                                })
                            })
                            .collect();
                    }
                    for post in &paths[t.target.0] {
                        let ok: Vec<bool> = after.iter().map(|z| path_enabled(post, z)).collect();
                        if ok.iter().all(|&b| !b) {
                            continue;
                        }
                        if !ok.iter().all(|&b| b) {
                            return Err(EliminationError::GuardNotExpressible(self.describe(t)));
                        }
                        let visited_inside = pre.states[1..]
                            .iter()
                            .chain(post.states[..post.states.len() - 1].iter());
                        let marked = visited_inside
                            .clone()
                            .any(|&s| self.accepting_states.contains(&StateId(s)))
                            || self.is_accepting_transition(t)
                            || path_marked(pre)
                            || path_marked(post);
                        let composite = Transition {
                            source: StateId(src),
                            label: t.label,
                            guards: t.guards.clone(),
                            target: StateId(*post.states.last().unwrap()),
                            deltas: t.deltas.clone(),
                        };
                        *out.entry(composite).or_insert(false) |= marked;
                    }
                }
            }
        }
        let accepting_transitions = out
            .iter()
            .filter(|(_, &m)| m)
            .map(|(t, _)| t.clone())
            .collect();
        Ok(BlindCounterAutomaton::new(
            self.states.clone(),
            self.alphabet.clone(),
            self.counters,
            out.into_keys(),
            self.initial,
            self.accepting_states.clone(),
            accepting_transitions,
        ))
    }

    /// Parses the text format described in [`crate::format`].
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        crate::format::parse_automaton(text)
    }

    pub fn to_text(&self) -> String {
        crate::format::write_automaton(self)
    }
}

#[derive(Debug)]
struct EpsPath {
    states: Vec<usize>,
}

/// Every ε-path starting at `start`, including the empty one. The ε-graph
/// is acyclic here, so the enumeration terminates.
fn epsilon_paths(start: usize, succ: &[Vec<usize>]) -> Vec<EpsPath> {
    let mut out = Vec::new();
    let mut stack = vec![vec![start]];
    while let Some(p) = stack.pop() {
        let last = *p.last().unwrap();
        for &next in succ[last].iter().rev() {
            let mut q = p.clone();
            q.push(next);
            stack.push(q);
        }
        out.push(EpsPath { states: p });
    }
    out.sort_by(|a, b| a.states.cmp(&b.states));
    out
}

/// One failed well-formedness clause.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    NoCounters,
    InitialNotAState,
    AcceptingNotAState(StateId),
    EndpointNotAState(String),
    LetterNotInAlphabet(String),
    VectorLength(String),
    DeltaOutOfRange(String),
    Blindness { transition: String, counter: usize },
    MarkBlindness { transition: String, counter: usize },
    ZeroConsistency { transition: String, counter: usize },
    EpsilonModifiesCounter(String),
    EpsilonCycle(Vec<String>),
    UnknownAcceptingTransition(String),
}

impl Violation {
    /// Short clause name used in reports.
    pub fn clause(&self) -> &'static str {
        match self {
            Violation::NoCounters => "counter-count",
            Violation::InitialNotAState => "initial-state",
            Violation::AcceptingNotAState(_) => "accepting-states",
            Violation::EndpointNotAState(_) => "endpoint",
            Violation::LetterNotInAlphabet(_) => "alphabet",
            Violation::VectorLength(_) => "vector-length",
            Violation::DeltaOutOfRange(_) => "delta-range",
            Violation::Blindness { .. } => "blindness",
            Violation::MarkBlindness { .. } => "mark-blindness",
            Violation::ZeroConsistency { .. } => "zero-consistency",
            Violation::EpsilonModifiesCounter(_) => "epsilon-delta",
            Violation::EpsilonCycle(_) => "epsilon-cycle",
            Violation::UnknownAcceptingTransition(_) => "accepting-transitions",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clause = self.clause();
        match self {
            Violation::NoCounters => write!(f, "{clause}: at least one counter is required"),
            Violation::InitialNotAState => write!(f, "{clause}: initial state is not a state"),
            Violation::AcceptingNotAState(s) => {
                write!(f, "{clause}: accepting state #{} is not a state", s.0)
            }
            Violation::EndpointNotAState(t)
            | Violation::LetterNotInAlphabet(t)
            | Violation::VectorLength(t)
            | Violation::DeltaOutOfRange(t)
            | Violation::EpsilonModifiesCounter(t)
            | Violation::UnknownAcceptingTransition(t) => write!(f, "{clause}: {t}"),
            Violation::Blindness { transition, counter } => write!(
                f,
                "{clause}: {transition} has guard 0 on counter {counter} but no guard-1 twin"
            ),
            Violation::MarkBlindness { transition, counter } => write!(
                f,
                "{clause}: {transition} and its guard-1 twin on counter {counter} disagree on the accepting mark"
            ),
            Violation::ZeroConsistency { transition, counter } => write!(
                f,
                "{clause}: {transition} decrements counter {counter} under guard 0"
            ),
            Violation::EpsilonCycle(states) => write!(f, "{clause}: {}", states.join(" -> ")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EliminationError {
    #[error("epsilon cycle: {0}")]
    EpsilonCycle(String),
    #[error("epsilon transition modifies a counter: {0}")]
    CounterModifyingEpsilon(String),
    #[error("composite guard after {0} cannot be expressed with zero/positive flags")]
    GuardNotExpressible(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// Incremental construction by state name.
#[derive(Debug, Default, Clone)]
pub struct AutomatonBuilder {
    states: Vec<String>,
    alphabet: BTreeSet<char>,
    counters: usize,
    transitions: Vec<Transition>,
    initial: Option<StateId>,
    accepting: BTreeSet<StateId>,
    accepting_transitions: BTreeSet<Transition>,
}

impl AutomatonBuilder {
    pub fn new(counters: usize) -> Self {
        Self {
            counters,
            ..Default::default()
        }
    }

    pub fn state(&mut self, name: &str) -> StateId {
        match self.states.iter().position(|s| s == name) {
            Some(i) => StateId(i),
            None => {
                self.states.push(name.to_string());
                StateId(self.states.len() - 1)
            }
        }
    }

    pub fn letter(&mut self, c: char) -> &mut Self {
        self.alphabet.insert(c);
        self
    }

    pub fn initial(&mut self, name: &str) -> &mut Self {
        let id = self.state(name);
        self.initial = Some(id);
        self
    }

    pub fn accepting(&mut self, name: &str) -> &mut Self {
        let id = self.state(name);
        self.accepting.insert(id);
        self
    }

    pub fn transition(
        &mut self,
        source: &str,
        label: Label,
        guards: &[bool],
        target: &str,
        deltas: &[i8],
    ) -> &mut Self {
        let t = self.make(source, label, guards, target, deltas);
        self.transitions.push(t);
        self
    }

    pub fn accepting_transition(
        &mut self,
        source: &str,
        label: Label,
        guards: &[bool],
        target: &str,
        deltas: &[i8],
    ) -> &mut Self {
        let t = self.make(source, label, guards, target, deltas);
        self.transitions.push(t.clone());
        self.accepting_transitions.insert(t);
        self
    }

    /// Both guard instances of a one-counter edge, or only the guard-1 one
    /// when the edge decrements.
    pub fn edge(&mut self, source: &str, label: Label, target: &str, delta: i8) -> &mut Self {
        if delta >= 0 {
            self.transition(source, label, &[false], target, &[delta]);
        }
        self.transition(source, label, &[true], target, &[delta])
    }

    fn make(
        &mut self,
        source: &str,
        label: Label,
        guards: &[bool],
        target: &str,
        deltas: &[i8],
    ) -> Transition {
        if let Label::Letter(c) = label {
            self.alphabet.insert(c);
        }
        Transition {
            source: self.state(source),
            label,
            guards: guards.to_vec(),
            target: self.state(target),
            deltas: deltas.to_vec(),
        }
    }

    pub fn build(&self) -> BlindCounterAutomaton {
        BlindCounterAutomaton::new(
            self.states.clone(),
            self.alphabet.clone(),
            self.counters,
            self.transitions.iter().cloned(),
            self.initial.unwrap_or(StateId(0)),
            self.accepting.clone(),
            self.accepting_transitions.clone(),
        )
    }
}
