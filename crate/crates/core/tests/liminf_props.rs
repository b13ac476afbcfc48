mod common;

use blindcounter::liminf::{
    canonical_run, canonical_run_transitions, characterize, characterize_with, liminf_automaton,
};
use blindcounter::semantics::enumerate_accepting_runs;
use blindcounter::{Block, BlockLasso, ExplorationCaps, Label, LassoWord};
use proptest::prelude::*;

/// Straightforward greedy simulation: which of the first `count` blocks get used.
fn greedy_usage(b: &BlockLasso, n: u64, count: usize) -> Vec<bool> {
    let mut letters = 0u64;
    let mut counter = 0u64;
    let mut out = Vec::new();
    for i in 0..count {
        let blk = b.block(i);
        let start = letters;
        letters += blk.a_len + blk.b_len;
        if start < n {
            counter = n.min(letters);
            out.push(false);
        } else if blk.b_len >= blk.a_len && blk.a_len <= counter {
            counter = counter + blk.b_len - blk.a_len;
            out.push(true);
        } else {
            out.push(false);
        }
    }
    out
}

fn budget_holds(b: &BlockLasso, n: u64, used: &[bool]) -> bool {
    let mut balance = n as i64;
    for (i, &u) in used.iter().enumerate() {
        if u {
            let blk = b.block(i);
            if blk.a_len as i64 > balance {
                return false;
            }
            balance += blk.b_len as i64 - blk.a_len as i64;
        }
    }
    true
}

proptest! {
    #[test]
    fn characterization_matches_long_simulation(b in common::block_lasso(), n in 1u64..=12) {
        let periods = 40;
        let count = b.prefix().len() + periods * b.period().len();
        let usage = greedy_usage(&b, n, count);
        let tail = &usage[count - 5 * b.period().len()..];
        match characterize_with(&b, n) {
            Some(cert) => {
                for (i, &u) in usage.iter().enumerate() {
                    prop_assert_eq!(cert.is_used(i), u, "block {}", i);
                }
                prop_assert!(tail.iter().any(|&u| u));
            }
            None => prop_assert!(!tail.iter().any(|&u| u)),
        }
    }

    #[test]
    fn certificates_respect_the_budget(b in common::block_lasso()) {
        if let Some(cert) = characterize(&b) {
            let count = cert.periodic_start + 3 * cert.period_len;
            let used: Vec<bool> = (0..count).map(|i| cert.is_used(i)).collect();
            prop_assert!(budget_holds(&b, cert.initial_increments, &used));
            prop_assert!(cert.audit(&b, 3).is_ok());
        }
    }

    #[test]
    fn acceptance_iff_positive_period_block(b in common::block_lasso()) {
        prop_assert_eq!(characterize(&b).is_some(), b.period().iter().any(|k| k.b_len >= k.a_len));
    }

    #[test]
    fn greedy_run_is_a_run_of_the_automaton(
        blocks in prop::collection::vec(common::block(), 1..8),
        n in 1u64..=10,
    ) {
        let a = liminf_automaton();
        let letters: String = blocks.iter().map(Block::letters).collect();
        let mut state = a.initial();
        let mut counter = 0u64;
        let mut read = String::new();
        for t in canonical_run_transitions(&blocks, n) {
            prop_assert!(a.contains_transition(&t), "{}", a.describe(&t));
            prop_assert_eq!(t.source, state);
            counter = t.fire(&[counter]).expect("enabled")[0];
            state = t.target;
            if let Label::Letter(c) = t.label {
                read.push(c);
            }
        }
        let total: u64 = blocks.iter().map(Block::len).sum();
        if n <= total {
            prop_assert_eq!(read, letters);
        }
        // the counter matches the block-level trace
        if let Some(last) = canonical_run(blocks.iter().copied(), n, blocks.len()).last() {
            if n <= total {
                prop_assert_eq!(counter, last.counter_after);
            }
        }
    }
}

/// Every block in which an accepting run decrements is positive, and each
/// accepting cycle decrements somewhere.
#[test]
fn accepting_cycles_use_positive_blocks() {
    let a = liminf_automaton();
    let caps = ExplorationCaps::new(6, 50_000);
    let mut checked = 0;
    for u_len in 0..=1 {
        for v_len in 1..=5 {
            for code in 0..(1u32 << (u_len + v_len)) {
                let bits: Vec<char> = (0..u_len + v_len)
                    .map(|i| if code >> i & 1 == 0 { 'a' } else { 'b' })
                    .collect();
                let w = LassoWord::new(bits[..u_len].to_vec(), bits[u_len..].to_vec()).unwrap();
                let Ok(blocks) = w.decompose_blocks() else {
                    continue;
                };
                // block index of each letter
                let mut owner = Vec::new();
                for i in 0.. {
                    let b = blocks.block(i);
                    owner.extend(std::iter::repeat_n(i, b.len() as usize));
                    if owner.len() > 400 {
                        break;
                    }
                }
                for run in enumerate_accepting_runs(&a, &w, caps, 5).unwrap() {
                    checked += 1;
                    let stem_letters = run
                        .stem
                        .iter()
                        .filter(|s| !s.transition.label.is_epsilon())
                        .count();
                    let cycle_letters = run
                        .cycle
                        .iter()
                        .filter(|s| !s.transition.label.is_epsilon())
                        .count();
                    let configs = run.letter_configurations(stem_letters + 2 * cycle_letters + 1);
                    let mut cycle_uses = false;
                    for j in 0..configs.len() - 1 {
                        if configs[j + 1].1[0] < configs[j].1[0] {
                            assert!(
                                blocks.block(owner[j]).is_positive(),
                                "{w}: block {} used",
                                owner[j]
                            );
                            cycle_uses |= j >= stem_letters;
                        }
                    }
                    assert!(
                        cycle_uses,
                        "{w}: cycle without a used block\n{}",
                        run.trace(&a)
                    );
                }
            }
        }
    }
    assert!(checked > 100);
}
