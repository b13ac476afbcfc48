#![allow(dead_code)]

use blindcounter::{
    AutomatonBuilder, BlindCounterAutomaton, Block, BlockLasso, IntegerLasso, Label, LassoWord,
};
use proptest::prelude::*;

pub const LETTERS: [char; 2] = ['a', 'b'];

/// One-counter edge: source, letter (None for ε), target, delta.
pub type EdgeSpec = (usize, Option<char>, usize, i8);

pub fn build(states: usize, edges: &[EdgeSpec], accepting: &[bool]) -> BlindCounterAutomaton {
    let mut b = AutomatonBuilder::new(1);
    for i in 0..states {
        b.state(&format!("q{i}"));
    }
    b.letter('a').letter('b').initial("q0");
    for (i, &acc) in accepting.iter().enumerate().take(states) {
        if acc {
            b.accepting(&format!("q{i}"));
        }
    }
    for &(s, l, t, d) in edges {
        let label = l.map_or(Label::Epsilon, Label::Letter);
        b.edge(&format!("q{s}"), label, &format!("q{t}"), d);
    }
    b.build()
}

fn edge(states: usize, epsilon: bool) -> impl Strategy<Value = EdgeSpec> {
    let letter = if epsilon {
        prop_oneof![3 => prop::sample::select(LETTERS.to_vec()).prop_map(Some), 1 => Just(None)]
            .boxed()
    } else {
        prop::sample::select(LETTERS.to_vec())
            .prop_map(Some)
            .boxed()
    };
    (0..states, letter, 0..states, -1i8..=1).prop_map(|(s, l, t, d)| match l {
        // ε-edges keep the counter and only go forward, so no ε-cycle appears.
        None if s < t => (s, None, t, 0),
        None => (s, Some('a'), t, d),
        Some(c) => (s, Some(c), t, d),
    })
}

/// Well-formed one-counter automata with at most `max_states` states.
pub fn automaton(max_states: usize, epsilon: bool) -> impl Strategy<Value = BlindCounterAutomaton> {
    (1..=max_states).prop_flat_map(move |n| {
        (
            prop::collection::vec(edge(n, epsilon), 1..=3 * n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(edges, acc)| build(n, &edges, &acc))
    })
}

pub fn lasso(max_prefix: usize, max_period: usize) -> impl Strategy<Value = LassoWord> {
    let letters = |lo, hi| prop::collection::vec(prop::sample::select(LETTERS.to_vec()), lo..=hi);
    (letters(0, max_prefix), letters(1, max_period))
        .prop_map(|(u, v)| LassoWord::new(u, v).unwrap())
}

pub fn block() -> impl Strategy<Value = Block> {
    (1u64..=4, 1u64..=4).prop_map(|(n, k)| Block::new(n, k))
}

pub fn block_lasso() -> impl Strategy<Value = BlockLasso> {
    (
        prop::collection::vec(block(), 0..=3),
        prop::collection::vec(block(), 1..=3),
    )
        .prop_map(|(p, v)| BlockLasso::new(p, v).unwrap())
}

pub fn integer_lasso() -> impl Strategy<Value = IntegerLasso> {
    (
        prop::collection::vec(0u64..=6, 0..=4),
        prop::collection::vec(0u64..=6, 1..=5),
    )
        .prop_map(|(p, v)| IntegerLasso::new(p, v).unwrap())
}
