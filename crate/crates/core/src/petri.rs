//! Labelled Petri nets whose places are split into bounded ones (the
//! finite control) and unbounded ones (blind counters), and their
//! translation into blind-counter automata.
//!
//! Net file format, one record per line, `#` starts a comment:
//!
//! ```text
//! place p unbounded
//! place t bounded 1
//! trans produce a in: out: p
//! trans consume b in: p out:
//! trans flip eps in: t out:
//! init p=0,t=1
//! accept {t=1}; {t=0}
//! ```
//!
//! A place listed twice in `in:` or `out:` moves two tokens. Accepting
//! markings mention bounded places only; unmentioned places are 0.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::automaton::{BlindCounterAutomaton, Label, StateId, Transition};
use crate::search::{Exploration, LassoSystem, SearchVerdict, Succ};
use crate::semantics::{Configuration, ExplorationCaps};
use crate::words::LassoWord;

/// Largest ε-closure explored before giving up.
pub const EPSILON_CLOSURE_LIMIT: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("transition `{transition}` moves {tokens} tokens on unbounded place `{place}`")]
    TooManyTokens {
        transition: String,
        place: String,
        tokens: u64,
    },
    #[error("firing `{transition}` from {marking} overflows bounded place `{place}`")]
    Overflow {
        transition: String,
        marking: String,
        place: String,
    },
    #[error("initial marking {0} exceeds a bound")]
    InitialOverflow(String),
    #[error("epsilon closure exceeds {0} markings")]
    EpsilonDivergence(usize),
    #[error("letter `{0}` is not a transition label")]
    UnknownLetter(char),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlaceKind {
    Bounded(u64),
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Place {
    pub name: String,
    pub kind: PlaceKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetTransition {
    pub name: String,
    pub label: Label,
    /// Tokens consumed per place, indexed like `places`.
    pub input: Vec<u64>,
    pub output: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledPetriNet {
    pub places: Vec<Place>,
    pub transitions: Vec<NetTransition>,
    pub initial: Vec<u64>,
    /// Each entry assigns a token count to every bounded place, in the
    /// order of `bounded_places()`.
    pub accepting: BTreeSet<Vec<u64>>,
}

/// Token counts of every place, in declaration order.
pub type Marking = Vec<u64>;

fn show(net: &LabeledPetriNet, places: &[usize], values: &[u64]) -> String {
    let parts: Vec<String> = places
        .iter()
        .zip(values)
        .map(|(&p, v)| format!("{}={v}", net.places[p].name))
        .collect();
    parts.join(",")
}

impl LabeledPetriNet {
    pub fn bounded_places(&self) -> Vec<usize> {
        (0..self.places.len())
            .filter(|&p| matches!(self.places[p].kind, PlaceKind::Bounded(_)))
            .collect()
    }

    pub fn unbounded_places(&self) -> Vec<usize> {
        (0..self.places.len())
            .filter(|&p| self.places[p].kind == PlaceKind::Unbounded)
            .collect()
    }

    pub fn alphabet(&self) -> BTreeSet<char> {
        self.transitions
            .iter()
            .filter_map(|t| t.label.letter())
            .collect()
    }

    pub fn show_marking(&self, m: &[u64]) -> String {
        let all: Vec<usize> = (0..self.places.len()).collect();
        format!("{{{}}}", show(self, &all, m))
    }

    fn check_tokens(&self) -> Result<(), NetError> {
        for t in &self.transitions {
            for p in self.unbounded_places() {
                let tokens = t.input[p].max(t.output[p]);
                if tokens >= 2 {
                    return Err(NetError::TooManyTokens {
                        transition: t.name.clone(),
                        place: self.places[p].name.clone(),
                        tokens,
                    });
                }
            }
        }
        Ok(())
    }

    fn check_initial(&self) -> Result<(), NetError> {
        for (p, place) in self.places.iter().enumerate() {
            if let PlaceKind::Bounded(b) = place.kind {
                if self.initial[p] > b {
                    return Err(NetError::InitialOverflow(self.show_marking(&self.initial)));
                }
            }
        }
        Ok(())
    }

    /// Fires `t` from `m`. `Ok(None)` when not enabled.
    fn fire(&self, t: &NetTransition, m: &[u64]) -> Result<Option<Marking>, NetError> {
        if m.iter().zip(&t.input).any(|(have, need)| have < need) {
            return Ok(None);
        }
        let next: Marking = m
            .iter()
            .zip(&t.input)
            .zip(&t.output)
            .map(|((x, i), o)| x - i + o)
            .collect();
        for (p, place) in self.places.iter().enumerate() {
            if let PlaceKind::Bounded(b) = place.kind {
                if next[p] > b {
                    return Err(NetError::Overflow {
                        transition: t.name.clone(),
                        marking: self.show_marking(m),
                        place: place.name.clone(),
                    });
                }
            }
        }
        Ok(Some(next))
    }

    fn epsilon_closure(&self, start: BTreeSet<Marking>) -> Result<BTreeSet<Marking>, NetError> {
        let mut seen = start;
        let mut queue: VecDeque<Marking> = seen.iter().cloned().collect();
        while let Some(m) = queue.pop_front() {
            for t in self.transitions.iter().filter(|t| t.label.is_epsilon()) {
                if let Some(n) = self.fire(t, &m)? {
                    if seen.insert(n.clone()) {
                        if seen.len() > EPSILON_CLOSURE_LIMIT {
                            return Err(NetError::EpsilonDivergence(EPSILON_CLOSURE_LIMIT));
                        }
                        queue.push_back(n);
                    }
                }
            }
        }
        Ok(seen)
    }

    pub fn parse(text: &str) -> Result<Self, NetError> {
        parse_net(text)
    }
}

/// Markings reachable by a firing sequence whose labels spell `word`,
/// with ε-transitions allowed anywhere.
pub fn simulate_net(net: &LabeledPetriNet, word: &str) -> Result<BTreeSet<Marking>, NetError> {
    net.check_initial()?;
    let alphabet = net.alphabet();
    let mut current = net.epsilon_closure(BTreeSet::from([net.initial.clone()]))?;
    for c in word.chars() {
        if !alphabet.contains(&c) {
            return Err(NetError::UnknownLetter(c));
        }
        let mut next = BTreeSet::new();
        for m in &current {
            for t in net
                .transitions
                .iter()
                .filter(|t| t.label == Label::Letter(c))
            {
                if let Some(n) = net.fire(t, m)? {
                    next.insert(n);
                }
            }
        }
        current = net.epsilon_closure(next)?;
    }
    Ok(current)
}

/// A translated net together with the place bookkeeping needed to map
/// configurations back to markings.
#[derive(Clone, Debug)]
pub struct Translation {
    pub automaton: BlindCounterAutomaton,
    pub bounded: Vec<usize>,
    pub unbounded: Vec<usize>,
    /// Bounded-place marking of each automaton state.
    pub controls: Vec<Vec<u64>>,
}

impl Translation {
    /// The full net marking a configuration stands for.
    pub fn marking_of(&self, c: &Configuration) -> Marking {
        let size = self.bounded.len() + self.unbounded.len();
        let mut m = vec![0; size];
        for (&p, &v) in self.bounded.iter().zip(&self.controls[c.state.0]) {
            m[p] = v;
        }
        for (&p, &v) in self.unbounded.iter().zip(&c.counters) {
            m[p] = v;
        }
        m
    }
}

/// Source control, label, deltas, guards, target control.
type RawEdge = (usize, Label, Vec<i8>, Vec<bool>, usize);

/// Builds the blind-counter automaton of a net: states are the bounded
/// markings reachable in the control graph (unbounded places ignored),
/// counters are the unbounded places. A transition that consumes from an
/// unbounded place only gets the guard-1 instance on that counter; every
/// other counter gets both instances.
pub fn translate(net: &LabeledPetriNet) -> Result<Translation, NetError> {
    net.check_tokens()?;
    net.check_initial()?;
    let bounded = net.bounded_places();
    let unbounded = net.unbounded_places();
    let k = unbounded.len();
    let project = |m: &[u64]| -> Vec<u64> { bounded.iter().map(|&p| m[p]).collect() };

    let mut index: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    let mut controls = vec![project(&net.initial)];
    index.insert(controls[0].clone(), 0);
    let mut raw: Vec<RawEdge> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        // a full marking with the unbounded places saturated, so only the
        // bounded places decide enabledness
        let mut m = vec![u64::MAX / 4; net.places.len()];
        for (&p, &v) in bounded.iter().zip(&controls[s]) {
            m[p] = v;
        }
        for t in &net.transitions {
            let Some(next) = net.fire(t, &m).map_err(|e| match e {
                NetError::Overflow {
                    transition, place, ..
                } => NetError::Overflow {
                    transition,
                    marking: format!("{{{}}}", show(net, &bounded, &controls[s])),
                    place,
                },
                other => other,
            })?
            else {
                continue;
            };
            let ctl = project(&next);
            let target = match index.get(&ctl) {
                Some(&i) => i,
                None => {
                    controls.push(ctl.clone());
                    index.insert(ctl, controls.len() - 1);
                    queue.push_back(controls.len() - 1);
                    controls.len() - 1
                }
            };
            let deltas: Vec<i8> = unbounded
                .iter()
                .map(|&p| t.output[p] as i8 - t.input[p] as i8)
                .collect();
            let consumes: Vec<bool> = unbounded.iter().map(|&p| t.input[p] > 0).collect();
            raw.push((s, t.label, deltas, consumes, target));
        }
    }

    let mut transitions = Vec::new();
    for (s, label, deltas, consumes, target) in raw {
        // every guard vector compatible with the consumed places
        for bits in 0..(1u64 << k) {
            let guards: Vec<bool> = (0..k).map(|i| bits >> i & 1 == 1).collect();
            if guards.iter().zip(&consumes).any(|(&g, &c)| c && !g) {
                continue;
            }
            transitions.push(Transition {
                source: StateId(s),
                label,
                guards,
                target: StateId(target),
                deltas: deltas.clone(),
            });
        }
    }
    let states: Vec<String> = controls
        .iter()
        .map(|c| format!("m[{}]", show(net, &bounded, c)))
        .collect();
    let accepting = controls
        .iter()
        .enumerate()
        .filter(|(_, c)| net.accepting.contains(*c))
        .map(|(i, _)| StateId(i))
        .collect();
    let automaton = BlindCounterAutomaton::new(
        states,
        net.alphabet(),
        k,
        transitions,
        StateId(0),
        accepting,
        BTreeSet::new(),
    );
    Ok(Translation {
        automaton,
        bounded,
        unbounded,
        controls,
    })
}

/// Outcome of the direct net-level lasso search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NetVerdict {
    Accept {
        stem: usize,
        cycle: usize,
        pumped: bool,
    },
    RejectWithinCaps {
        cap_touched: bool,
    },
    Inconclusive {
        cap_touched: bool,
    },
}

impl NetVerdict {
    pub fn conclusive(&self) -> Option<bool> {
        match self {
            NetVerdict::Accept { .. } => Some(true),
            NetVerdict::RejectWithinCaps { cap_touched: false } => Some(false),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct NetNode {
    control: Vec<u64>,
    position: usize,
    counters: Vec<u64>,
}

struct NetOnLasso<'a> {
    net: &'a LabeledPetriNet,
    w: &'a LassoWord,
    cap: u64,
    bounded: Vec<usize>,
    unbounded: Vec<usize>,
    error: RefCell<Option<NetError>>,
}

impl NetOnLasso<'_> {
    fn marking(&self, n: &NetNode) -> Marking {
        let mut m = vec![0; self.net.places.len()];
        for (&p, &v) in self.bounded.iter().zip(&n.control) {
            m[p] = v;
        }
        for (&p, &v) in self.unbounded.iter().zip(&n.counters) {
            m[p] = v;
        }
        m
    }
}

impl LassoSystem for NetOnLasso<'_> {
    type Node = NetNode;
    type Step = usize;
    type Control = (Vec<u64>, usize);

    fn initial(&self) -> NetNode {
        NetNode {
            control: self.bounded.iter().map(|&p| self.net.initial[p]).collect(),
            position: 0,
            counters: self
                .unbounded
                .iter()
                .map(|&p| self.net.initial[p])
                .collect(),
        }
    }

    fn successors(&self, n: &NetNode, out: &mut Vec<Succ<NetNode, usize>>) -> bool {
        let m = self.marking(n);
        let letter = self.w.letter_at_position(n.position);
        let mut touched = false;
        for (i, t) in self.net.transitions.iter().enumerate() {
            let position = match t.label {
                Label::Epsilon => n.position,
                Label::Letter(c) if c == letter => self.w.next_position(n.position),
                Label::Letter(_) => continue,
            };
            let next = match self.net.fire(t, &m) {
                Ok(Some(x)) => x,
                Ok(None) => continue,
                Err(e) => {
                    self.error.borrow_mut().get_or_insert(e);
                    continue;
                }
            };
            let counters: Vec<u64> = self.unbounded.iter().map(|&p| next[p]).collect();
            if counters.iter().any(|&c| c > self.cap) {
                touched = true;
                continue;
            }
            out.push(Succ {
                target: NetNode {
                    control: self.bounded.iter().map(|&p| next[p]).collect(),
                    position,
                    counters,
                },
                step: i,
                reads_letter: !t.label.is_epsilon(),
                accepting: false,
            });
        }
        touched
    }

    fn is_accepting(&self, n: &NetNode) -> bool {
        self.net.accepting.contains(&n.control)
    }

    fn control(&self, n: &NetNode) -> (Vec<u64>, usize) {
        (n.control.clone(), n.position)
    }

    fn counters<'n>(&self, n: &'n NetNode) -> &'n [u64] {
        &n.counters
    }

    fn monotone(&self) -> bool {
        true
    }
}

/// Büchi acceptance of `w` by the token game itself, within caps on the
/// unbounded places and on the search depth.
pub fn net_lasso_search(
    net: &LabeledPetriNet,
    w: &LassoWord,
    caps: ExplorationCaps,
) -> Result<NetVerdict, NetError> {
    net.check_initial()?;
    let alphabet = net.alphabet();
    if let Some(&c) = w
        .prefix()
        .iter()
        .chain(w.period())
        .find(|c| !alphabet.contains(c))
    {
        return Err(NetError::UnknownLetter(c));
    }
    let sys = NetOnLasso {
        net,
        w,
        cap: caps.counter_cap,
        bounded: net.bounded_places(),
        unbounded: net.unbounded_places(),
        error: RefCell::new(None),
    };
    let ex = Exploration::run(&sys, caps.depth_cap);
    if let Some(e) = sys.error.borrow_mut().take() {
        return Err(e);
    }
    Ok(match ex.verdict() {
        SearchVerdict::Accept(l) => NetVerdict::Accept {
            stem: l.stem.len(),
            cycle: l.cycle.len(),
            pumped: l.pumped,
        },
        SearchVerdict::RejectWithinCaps { cap_touched } => {
            NetVerdict::RejectWithinCaps { cap_touched }
        }
        SearchVerdict::Inconclusive { cap_touched } => NetVerdict::Inconclusive { cap_touched },
    })
}

fn parse_net(text: &str) -> Result<LabeledPetriNet, NetError> {
    let err = |line: usize, message: String| NetError::Parse { line, message };
    let mut places: Vec<Place> = Vec::new();
    let mut trans_lines = Vec::new();
    let mut init_line = None;
    let mut accept_line = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match kw {
            "place" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let kind = match toks.as_slice() {
                    [_, "unbounded"] => PlaceKind::Unbounded,
                    [_, "bounded", b] => PlaceKind::Bounded(
                        b.parse()
                            .map_err(|_| err(line_no, format!("bad bound `{b}`")))?,
                    ),
                    _ => {
                        return Err(err(
                            line_no,
                            "expected `place NAME bounded B|unbounded`".into(),
                        ))
                    }
                };
                if places.iter().any(|p| p.name == toks[0]) {
                    return Err(err(line_no, format!("duplicate place `{}`", toks[0])));
                }
                places.push(Place {
                    name: toks[0].to_string(),
                    kind,
                });
            }
            "trans" => trans_lines.push((line_no, rest.to_string())),
            "init" => {
                if init_line.replace((line_no, rest.to_string())).is_some() {
                    return Err(err(line_no, "duplicate `init`".into()));
                }
            }
            "accept" => {
                if accept_line.replace((line_no, rest.to_string())).is_some() {
                    return Err(err(line_no, "duplicate `accept`".into()));
                }
            }
            other => return Err(err(line_no, format!("unknown field `{other}`"))),
        }
    }

    let place_index = |name: &str, line: usize| {
        places
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| err(line, format!("unknown place `{name}`")))
    };
    let counts = |list: &str, line: usize| -> Result<Vec<u64>, NetError> {
        let mut v = vec![0u64; places.len()];
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            v[place_index(name, line)?] += 1;
        }
        Ok(v)
    };
    let assignment = |list: &str, line: usize| -> Result<Vec<u64>, NetError> {
        let mut v = vec![0u64; places.len()];
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `place=n`, found `{item}`")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| err(line, format!("bad token count in `{item}`")))?;
            v[place_index(name.trim(), line)?] = value;
        }
        Ok(v)
    };

    let mut transitions = Vec::new();
    for (line, rest) in trans_lines {
        let (head, arcs) = rest
            .split_once("in:")
            .ok_or_else(|| err(line, "expected `trans NAME label in: ... out: ...`".into()))?;
        let (ins, outs) = arcs
            .split_once("out:")
            .ok_or_else(|| err(line, "missing `out:`".into()))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        let [name, label] = head.as_slice() else {
            return Err(err(line, "expected a name and a label".into()));
        };
        let label = match *label {
            "eps" => Label::Epsilon,
            l if l.chars().count() == 1 => Label::Letter(l.chars().next().unwrap()),
            l => return Err(err(line, format!("bad label `{l}`"))),
        };
        transitions.push(NetTransition {
            name: name.to_string(),
            label,
            input: counts(ins, line)?,
            output: counts(outs, line)?,
        });
    }

    let initial = match &init_line {
        Some((line, rest)) => assignment(rest, *line)?,
        None => vec![0; places.len()],
    };
    let bounded: Vec<usize> = (0..places.len())
        .filter(|&p| matches!(places[p].kind, PlaceKind::Bounded(_)))
        .collect();
    let mut accepting = BTreeSet::new();
    if let Some((line, rest)) = &accept_line {
        for part in rest.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let inner = part
                .strip_prefix('{')
                .and_then(|p| p.strip_suffix('}'))
                .ok_or_else(|| err(*line, format!("expected `{{p=n,...}}`, found `{part}`")))?;
            let full = assignment(inner, *line)?;
            if let Some(p) = (0..places.len()).find(|&p| full[p] > 0 && !bounded.contains(&p)) {
                return Err(err(
                    *line,
                    format!(
                        "accepting marking mentions unbounded place `{}`",
                        places[p].name
                    ),
                ));
            }
            accepting.insert(bounded.iter().map(|&p| full[p]).collect());
        }
    }
    Ok(LabeledPetriNet {
        places,
        transitions,
        initial,
        accepting,
    })
}

impl fmt::Display for LabeledPetriNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.places {
            match p.kind {
                PlaceKind::Bounded(b) => writeln!(f, "place {} bounded {b}", p.name)?,
                PlaceKind::Unbounded => writeln!(f, "place {} unbounded", p.name)?,
            }
        }
        let arcs = |v: &[u64]| -> String {
            let mut names = Vec::new();
            for (p, &n) in v.iter().enumerate() {
                for _ in 0..n {
                    names.push(self.places[p].name.as_str());
                }
            }
            names.join(",")
        };
        for t in &self.transitions {
            writeln!(
                f,
                "trans {} {} in: {} out: {}",
                t.name,
                t.label,
                arcs(&t.input),
                arcs(&t.output)
            )?;
        }
        let all: Vec<usize> = (0..self.places.len()).collect();
        writeln!(f, "init {}", show(self, &all, &self.initial))?;
        let bounded = self.bounded_places();
        let acc: Vec<String> = self
            .accepting
            .iter()
            .map(|m| format!("{{{}}}", show(self, &bounded, m)))
            .collect();
        writeln!(f, "accept {}", acc.join("; "))
    }
}
