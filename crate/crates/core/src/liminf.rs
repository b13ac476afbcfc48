//! The one-counter automaton that accepts the codes of integer sequences
//! with a finite liminf, its greedy canonical runs, and an exact
//! characterization of the block lassos it accepts.
//!
//! A run first counts some `N ≥ 1` letters, waits for the current block to
//! end, and afterwards may "use" a block `a^n b^k`: it pays `n` on the `a`s,
//! passes the accepting state, and earns `k` back on the `b`s. The greedy
//! run with budget `N` uses a block exactly when the block is positive
//! (`k ≥ n`) and affordable (`n ≤ counter`).

use std::fmt;
use std::sync::OnceLock;

use crate::automaton::{AutomatonBuilder, BlindCounterAutomaton, Label, Transition};
use crate::decision::{decide_accept, DecideOptions, DecisionError};
use crate::words::{Block, BlockLasso, IntegerLasso, LassoWord};

const A: Label = Label::Letter('a');
const B: Label = Label::Letter('b');
const EPS: Label = Label::Epsilon;

/// The witness automaton over `{a, b}` with one counter.
///
/// States: `I` (start), `Ia`/`Ib` (counting), `Wa`/`Wb` (waiting out a
/// block), `G` (at a block start), `Ma`/`Mb` (using a block) and the
/// accepting `F`.
pub fn liminf_automaton() -> BlindCounterAutomaton {
    let mut b = AutomatonBuilder::new(1);
    for s in ["I", "Ia", "Ib", "Wa", "Wb", "G", "Ma", "F", "Mb"] {
        b.state(s);
    }
    b.initial("I").accepting("F").letter('a').letter('b');
    b.edge("I", A, "Ia", 1)
        .edge("Ia", A, "Ia", 1)
        .edge("Ia", B, "Ib", 1)
        .edge("Ib", B, "Ib", 1)
        .edge("Ib", A, "Ia", 1)
        .edge("Wa", A, "Wa", 0)
        .edge("Wa", B, "Wb", 0)
        .edge("Wb", B, "Wb", 0)
        .edge("G", A, "Ma", -1)
        .edge("Ma", A, "Ma", -1)
        .edge("F", B, "Mb", 1)
        .edge("Mb", B, "Mb", 1)
        .edge("G", A, "Wa", 0);
    b.edge("Ia", EPS, "Wa", 0)
        .edge("Ib", EPS, "Wb", 0)
        .edge("Wb", EPS, "G", 0)
        .edge("Ma", EPS, "F", 0)
        .edge("Mb", EPS, "G", 0);
    b.build()
}

/// The witness automaton with ε-transitions removed, built once.
pub fn liminf_automaton_epsilon_free() -> &'static BlindCounterAutomaton {
    static CELL: OnceLock<BlindCounterAutomaton> = OnceLock::new();
    CELL.get_or_init(|| {
        liminf_automaton()
            .eliminate_epsilon()
            .expect("the witness automaton has a well-formed ε-structure")
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    /// The block lies within the first `N` letters, all counted.
    InitialIncrements,
    /// Counting stopped inside this block; the rest is waited out.
    WaitCurrentBlock,
    Steady,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::InitialIncrements => "initial-increments",
            Phase::WaitCurrentBlock => "wait-current-block",
            Phase::Steady => "steady",
        })
    }
}

/// What the greedy run does on one block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockStep {
    pub index: usize,
    pub block: Block,
    pub phase: Phase,
    pub counter_before: u64,
    pub used: bool,
    pub counter_after: u64,
}

/// Incremental greedy run.
#[derive(Clone, Debug)]
struct Greedy {
    budget: u64,
    /// Letters before the next block.
    start: u64,
    counter: u64,
    index: usize,
}

impl Greedy {
    fn new(budget: u64) -> Self {
        Self {
            budget,
            start: 0,
            counter: 0,
            index: 0,
        }
    }

    fn steady(&self) -> bool {
        self.start >= self.budget
    }

    fn step(&mut self, block: Block) -> BlockStep {
        let end = self.start + block.len();
        let before = self.counter;
        let (phase, used) = if end <= self.budget {
            self.counter = end;
            (Phase::InitialIncrements, false)
        } else if self.start < self.budget {
            self.counter = self.budget;
            (Phase::WaitCurrentBlock, false)
        } else {
            let used = block.is_positive() && block.a_len <= self.counter;
            if used {
                self.counter = self.counter - block.a_len + block.b_len;
            }
            (Phase::Steady, used)
        };
        let s = BlockStep {
            index: self.index,
            block,
            phase,
            counter_before: before,
            used,
            counter_after: self.counter,
        };
        self.start = end;
        self.index += 1;
        s
    }
}

/// The greedy run with `n` initial increments over the first `horizon`
/// blocks of `blocks`.
pub fn canonical_run(
    blocks: impl IntoIterator<Item = Block>,
    n: u64,
    horizon: usize,
) -> Vec<BlockStep> {
    let mut g = Greedy::new(n);
    blocks
        .into_iter()
        .take(horizon)
        .map(|b| g.step(b))
        .collect()
}

/// Indices of the blocks of a finite block list used by the greedy run
/// with `n` initial increments.
pub fn used_blocks(blocks: &[Block], n: u64) -> Vec<usize> {
    canonical_run(blocks.iter().copied(), n, blocks.len())
        .into_iter()
        .filter(|s| s.used)
        .map(|s| s.index)
        .collect()
}

/// The transitions of the witness automaton taken by the greedy run with
/// `n` initial increments on the letters of `blocks`, ε-moves included.
/// Guard flags follow the counter value at each step.
pub fn canonical_run_transitions(blocks: &[Block], n: u64) -> Vec<Transition> {
    let a = liminf_automaton();
    let id = |s: &str| a.state_id(s).expect("known state");
    let mut out = Vec::new();
    let mut counter = 0u64;
    let mut push = |src: &str, label: Label, dst: &str, delta: i8, counter: &mut u64| {
        out.push(Transition {
            source: id(src),
            label,
            guards: vec![*counter >= 1],
            target: id(dst),
            deltas: vec![delta],
        });
        *counter = (*counter as i64 + delta as i64) as u64;
    };
    let letters: Vec<char> = blocks
        .iter()
        .flat_map(|b| b.letters().chars().collect::<Vec<_>>())
        .collect();
    let steps = canonical_run(blocks.iter().copied(), n, blocks.len());
    let mut state = "I";
    let mut pos = 0usize;
    for s in &steps {
        let block_end = pos + s.block.len() as usize;
        match s.phase {
            Phase::InitialIncrements | Phase::WaitCurrentBlock => {
                let counted = (n as usize).min(block_end);
                while pos < counted {
                    let next = if letters[pos] == 'a' { "Ia" } else { "Ib" };
                    push(state, Label::Letter(letters[pos]), next, 1, &mut counter);
                    state = next;
                    pos += 1;
                }
                if pos == n as usize {
                    // waiting out the rest of this block, if any
                    let wait = if state == "Ia" { "Wa" } else { "Wb" };
                    push(state, EPS, wait, 0, &mut counter);
                    state = wait;
                    while pos < block_end {
                        let next = if letters[pos] == 'a' { "Wa" } else { "Wb" };
                        push(state, Label::Letter(letters[pos]), next, 0, &mut counter);
                        state = next;
                        pos += 1;
                    }
                    push(state, EPS, "G", 0, &mut counter);
                    state = "G";
                }
            }
            Phase::Steady if s.used => {
                push("G", A, "Ma", -1, &mut counter);
                for _ in 1..s.block.a_len {
                    push("Ma", A, "Ma", -1, &mut counter);
                }
                push("Ma", EPS, "F", 0, &mut counter);
                push("F", B, "Mb", 1, &mut counter);
                for _ in 1..s.block.b_len {
                    push("Mb", B, "Mb", 1, &mut counter);
                }
                push("Mb", EPS, "G", 0, &mut counter);
                pos = block_end;
            }
            Phase::Steady => {
                push("G", A, "Wa", 0, &mut counter);
                for _ in 1..s.block.a_len {
                    push("Wa", A, "Wa", 0, &mut counter);
                }
                push("Wa", B, "Wb", 0, &mut counter);
                for _ in 1..s.block.b_len {
                    push("Wb", B, "Wb", 0, &mut counter);
                }
                push("Wb", EPS, "G", 0, &mut counter);
                pos = block_end;
            }
        }
    }
    out
}

/// Accepting certificate: the initial budget and the set of used blocks,
/// given as finitely many exceptional indices followed by a pattern that
/// repeats with the block period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsageCertificate {
    pub initial_increments: u64,
    /// Used indices below `periodic_start`.
    pub exceptional: Vec<usize>,
    pub periodic_start: usize,
    pub period_len: usize,
    /// `periodic_pattern[j]` tells whether block `periodic_start + m *
    /// period_len + j` is used, for every `m ≥ 0`.
    pub periodic_pattern: Vec<bool>,
}

impl UsageCertificate {
    pub fn is_used(&self, i: usize) -> bool {
        if i < self.periodic_start {
            self.exceptional.contains(&i)
        } else {
            self.periodic_pattern[(i - self.periodic_start) % self.period_len]
        }
    }

    /// Used indices below `limit`.
    pub fn used_indices(&self, limit: usize) -> Vec<usize> {
        (0..limit).filter(|&i| self.is_used(i)).collect()
    }

    /// Checks the budget inequality `a_len(i) ≤ N + Σ (b_len(j) − a_len(j))`
    /// over used `j < i` at every used `i` in the exceptional part and the
    /// next `periods` periods, plus that the first used block starts after
    /// the counted letters and that the pattern is non-empty.
    pub fn audit(&self, blocks: &BlockLasso, periods: usize) -> Result<(), String> {
        if !self.periodic_pattern.iter().any(|&u| u) {
            return Err("periodic pattern uses no block".into());
        }
        let limit = self.periodic_start + periods * self.period_len;
        let n = self.initial_increments as i64;
        let mut start = 0u64;
        let mut balance = 0i64;
        let mut first = true;
        for i in 0..limit {
            let b = blocks.block(i);
            if self.is_used(i) {
                if first && start < self.initial_increments {
                    return Err(format!("block {i} is used before the counting ends"));
                }
                first = false;
                if b.a_len as i64 > n + balance {
                    return Err(format!(
                        "block {i} needs {} but only {} is available",
                        b.a_len,
                        n + balance
                    ));
                }
                balance += b.net();
            }
            start += b.len();
        }
        Ok(())
    }
}

impl fmt::Display for UsageCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exc: Vec<String> = self.exceptional.iter().map(usize::to_string).collect();
        let pat: String = self
            .periodic_pattern
            .iter()
            .map(|&u| if u { '1' } else { '0' })
            .collect();
        write!(
            f,
            "N={} exceptional=[{}] periodic_start={} pattern={}",
            self.initial_increments,
            exc.join(","),
            self.periodic_start,
            pat
        )
    }
}

/// Certificate for the greedy run with budget `n`, or `None` if that run
/// uses only finitely many blocks.
///
/// Once the run is steady at a period boundary, the counter at the next
/// boundary is a non-decreasing function of the current one. Either it
/// stays put, and the period repeats verbatim, or it grows until it
/// exceeds every `a_len` of the period, after which every positive block
/// is used.
pub fn characterize_with(blocks: &BlockLasso, n: u64) -> Option<UsageCertificate> {
    assert!(n >= 1, "at least one initial increment");
    let p = blocks.prefix().len();
    let l = blocks.period().len();
    let max_a = blocks.period().iter().map(|b| b.a_len).max().unwrap_or(0);
    let mut g = Greedy::new(n);
    let mut used = Vec::new();
    let mut i = 0;
    while !(i >= p && (i - p).is_multiple_of(l) && g.steady()) {
        if g.step(blocks.block(i)).used {
            used.push(i);
        }
        i += 1;
    }
    loop {
        let boundary = g.counter;
        let pattern: Vec<bool> = (0..l).map(|j| g.step(blocks.block(i + j)).used).collect();
        if g.counter == boundary || boundary > max_a {
            if !pattern.iter().any(|&u| u) {
                return None;
            }
            return Some(UsageCertificate {
                initial_increments: n,
                exceptional: used,
                periodic_start: i,
                period_len: l,
                periodic_pattern: pattern,
            });
        }
        used.extend((0..l).filter(|&j| pattern[j]).map(|j| i + j));
        i += l;
    }
}

/// Largest initial budget worth trying.
pub fn budget_limit(blocks: &BlockLasso) -> u64 {
    blocks.prefix().iter().map(|b| b.a_len).sum::<u64>()
        + blocks.period().iter().map(|b| b.a_len).max().unwrap_or(0)
        + 1
}

/// The smallest budget whose greedy run uses infinitely many blocks, with
/// its certificate.
pub fn characterize(blocks: &BlockLasso) -> Option<UsageCertificate> {
    (1..=budget_limit(blocks)).find_map(|n| characterize_with(blocks, n))
}

/// Everything known about one integer lasso and the code of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub sequence: IntegerLasso,
    pub finite_liminf: bool,
    pub word: LassoWord,
    pub decided: bool,
    pub certificate: Option<UsageCertificate>,
}

impl ReductionReport {
    /// Finite liminf, automaton acceptance, and the characterization all agree.
    pub fn holds(&self) -> bool {
        self.finite_liminf == self.decided && self.decided == self.certificate.is_some()
    }

    pub fn to_key_values(&self) -> String {
        let mut s = format!(
            "intlasso={}\nfinite_liminf={}\nword={}\ndecide_accept={}\n",
            self.sequence, self.finite_liminf, self.word, self.decided
        );
        match &self.certificate {
            Some(c) => s.push_str(&format!(
                "characterize=accept\ncertificate_n={}\n",
                c.initial_increments
            )),
            None => s.push_str("characterize=reject\n"),
        }
        s.push_str(&format!("biconditional={}\n", self.holds()));
        s
    }
}

pub fn reduction_check(x: &IntegerLasso) -> Result<ReductionReport, DecisionError> {
    let word = x.block_code();
    let verdict = decide_accept(
        liminf_automaton_epsilon_free(),
        &word,
        DecideOptions::default(),
    )?;
    let blocks = word.decompose_blocks().expect("codes are block words");
    Ok(ReductionReport {
        sequence: x.clone(),
        finite_liminf: x.has_finite_liminf(),
        decided: verdict.accepted,
        certificate: characterize(&blocks),
        word,
    })
}

/// Integer lassos exercised by the demo command.
pub const DEMO_BATTERY: [&str; 8] = [
    "|0",
    "|3",
    "9,9|1",
    "|0,1",
    "2|0",
    "|5,0",
    "1,2,3|4,4",
    "|6",
];
