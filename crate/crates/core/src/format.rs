//! Text format for automata.
//!
//! ```text
//! # comment
//! states: I Ia F
//! alphabet: a b
//! counters: 1
//! initial: I
//! accepting: F
//! I a 0 Ia 1
//! I a 1 Ia 1
//! Ia eps 0 F 0
//! Ia b 1 F 0 accepting
//! ```
//!
//! Header lines are `key: values`; every other non-blank line is a
//! transition `src letter guards target deltas [accepting]` where `letter`
//! is a single character or `eps`, and `guards`/`deltas` are
//! comma-separated with one entry per counter. The trailing `accepting`
//! keyword puts the transition into the accepting-transition set. Each
//! header must appear exactly once (`accepting:` may be empty) and must
//! precede the transitions.

use std::collections::BTreeSet;

use crate::automaton::{BlindCounterAutomaton, Label, ParseError, StateId, Transition};

const HEADERS: [&str; 5] = ["states", "alphabet", "counters", "initial", "accepting"];

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

pub(crate) fn parse_automaton(text: &str) -> Result<BlindCounterAutomaton, ParseError> {
    let mut states: Option<Vec<String>> = None;
    let mut alphabet: Option<BTreeSet<char>> = None;
    let mut counters: Option<usize> = None;
    let mut initial: Option<String> = None;
    let mut accepting: Option<Vec<String>> = None;
    let mut raw_transitions: Vec<(usize, Vec<&str>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, rest)) = line.split_once(':') {
            let key = key.trim();
            if !HEADERS.contains(&key) {
                return Err(err(line_no, format!("unknown field `{key}`")));
            }
            if !raw_transitions.is_empty() {
                return Err(err(line_no, format!("header `{key}` after transitions")));
            }
            let values: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            let dup = || err(line_no, format!("duplicate field `{key}`"));
            match key {
                "states" => {
                    if states.is_some() {
                        return Err(dup());
                    }
                    let unique: BTreeSet<&String> = values.iter().collect();
                    if unique.len() != values.len() {
                        return Err(err(line_no, "duplicate state name"));
                    }
                    if values.is_empty() {
                        return Err(err(line_no, "no states declared"));
                    }
                    states = Some(values);
                }
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(dup());
                    }
                    let mut set = BTreeSet::new();
                    for v in &values {
                        let mut chars = v.chars();
                        match (chars.next(), chars.next()) {
                            (Some(c), None) if v != "|" => {
                                set.insert(c);
                            }
                            _ => {
                                return Err(err(
                                    line_no,
                                    format!("letter `{v}` must be a single character"),
                                ))
                            }
                        }
                    }
                    alphabet = Some(set);
                }
                "counters" => {
                    if counters.is_some() {
                        return Err(dup());
                    }
                    let [v] = values.as_slice() else {
                        return Err(err(line_no, "`counters` takes one value"));
                    };
                    let k: usize = v
                        .parse()
                        .map_err(|_| err(line_no, format!("bad counter count `{v}`")))?;
                    if k == 0 {
                        return Err(err(line_no, "counter count must be positive"));
                    }
                    counters = Some(k);
                }
                "initial" => {
                    if initial.is_some() {
                        return Err(dup());
                    }
                    let [v] = values.as_slice() else {
                        return Err(err(line_no, "`initial` takes one state"));
                    };
                    initial = Some(v.clone());
                }
                "accepting" => {
                    if accepting.is_some() {
                        return Err(dup());
                    }
                    accepting = Some(values);
                }
                _ => unreachable!(),
            }
        } else {
            raw_transitions.push((line_no, line.split_whitespace().collect()));
        }
    }

    let missing = |k: &str| err(0, format!("missing field `{k}`"));
    let states = states.ok_or_else(|| missing("states"))?;
    let alphabet = alphabet.ok_or_else(|| missing("alphabet"))?;
    let counters = counters.ok_or_else(|| missing("counters"))?;
    let initial = initial.ok_or_else(|| missing("initial"))?;
    let accepting = accepting.ok_or_else(|| missing("accepting"))?;

    let lookup = |name: &str, line: usize| {
        states
            .iter()
            .position(|s| s == name)
            .map(StateId)
            .ok_or_else(|| err(line, format!("unknown state `{name}`")))
    };

    let initial = lookup(&initial, 0)?;
    let accepting_states = accepting
        .iter()
        .map(|s| lookup(s, 0))
        .collect::<Result<BTreeSet<_>, _>>()?;

    let mut transitions = Vec::new();
    let mut accepting_transitions = BTreeSet::new();
    for (line, tokens) in raw_transitions {
        let marked = match tokens.len() {
            5 => false,
            6 if tokens[5] == "accepting" => true,
            6 => return Err(err(line, format!("unknown field `{}`", tokens[5]))),
            n => return Err(err(line, format!("expected 5 or 6 fields, found {n}"))),
        };
        let source = lookup(tokens[0], line)?;
        let label = parse_label(tokens[1])
            .ok_or_else(|| err(line, format!("bad letter `{}`", tokens[1])))?;
        let guards = parse_vector(tokens[2], line, counters, |v| match v {
            0 => Some(false),
            1 => Some(true),
            _ => None,
        })?;
        let target = lookup(tokens[3], line)?;
        let deltas = parse_vector(tokens[4], line, counters, |v| {
            (-1..=1).contains(&v).then_some(v as i8)
        })?;
        let t = Transition {
            source,
            label,
            guards,
            target,
            deltas,
        };
        if marked {
            accepting_transitions.insert(t.clone());
        }
        transitions.push(t);
    }

    Ok(BlindCounterAutomaton::new(
        states,
        alphabet,
        counters,
        transitions,
        initial,
        accepting_states,
        accepting_transitions,
    ))
}

fn parse_label(tok: &str) -> Option<Label> {
    if tok == "eps" {
        return Some(Label::Epsilon);
    }
    let mut chars = tok.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Some(Label::Letter(c)),
        _ => None,
    }
}

fn parse_vector<T>(
    tok: &str,
    line: usize,
    k: usize,
    conv: impl Fn(i64) -> Option<T>,
) -> Result<Vec<T>, ParseError> {
    let out = tok
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .ok()
                .and_then(&conv)
                .ok_or_else(|| err(line, format!("bad vector entry `{p}`")))
        })
        .collect::<Result<Vec<T>, _>>()?;
    if out.len() != k {
        return Err(err(
            line,
            format!("vector `{tok}` has {} entries, expected {k}", out.len()),
        ));
    }
    Ok(out)
}

pub(crate) fn write_automaton(a: &BlindCounterAutomaton) -> String {
    let mut s = String::new();
    s.push_str(&format!("states: {}\n", a.states().join(" ")));
    let alphabet: Vec<String> = a.alphabet().iter().map(|c| c.to_string()).collect();
    s.push_str(&format!("alphabet: {}\n", alphabet.join(" ")));
    s.push_str(&format!("counters: {}\n", a.counter_count()));
    s.push_str(&format!("initial: {}\n", a.state_name(a.initial())));
    let acc: Vec<&str> = a
        .accepting_states()
        .iter()
        .map(|&q| a.state_name(q))
        .collect();
    if acc.is_empty() {
        s.push_str("accepting:\n");
    } else {
        s.push_str(&format!("accepting: {}\n", acc.join(" ")));
    }
    for t in a.transitions() {
        let guards: Vec<&str> = t
            .guards
            .iter()
            .map(|&g| if g { "1" } else { "0" })
            .collect();
        let deltas: Vec<String> = t.deltas.iter().map(|d| d.to_string()).collect();
        s.push_str(&format!(
            "{} {} {} {} {}{}\n",
            a.state_name(t.source),
            t.label,
            guards.join(","),
            a.state_name(t.target),
            deltas.join(","),
            if a.is_accepting_transition(t) {
                " accepting"
            } else {
                ""
            }
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# two states
states: p q
alphabet: a b
counters: 1
initial: p
accepting: q
p a 0 q 1
p a 1 q 1
q b 1 p -1 accepting
q eps 0 p 0
q eps 1 p 0
";

    #[test]
    fn parses_and_round_trips() {
        let a = parse_automaton(SMALL).unwrap();
        assert_eq!(a.state_count(), 2);
        assert_eq!(a.transitions().len(), 5);
        assert_eq!(a.accepting_transitions().len(), 1);
        let again = parse_automaton(&write_automaton(&a)).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn rejects_unknown_header() {
        let text = SMALL.replace("counters: 1", "counters: 1\ncolour: red");
        let e = parse_automaton(&text).unwrap_err();
        assert!(e.message.contains("unknown field"), "{e}");
    }

    #[test]
    fn rejects_unknown_trailing_field() {
        let text = SMALL.replace("p a 0 q 1", "p a 0 q 1 weight");
        assert!(parse_automaton(&text)
            .unwrap_err()
            .message
            .contains("unknown field"));
    }

    #[test]
    fn rejects_wrong_vector_length_and_bad_delta() {
        let text = SMALL.replace("p a 0 q 1", "p a 0,0 q 1");
        assert!(parse_automaton(&text).is_err());
        let text = SMALL.replace("p a 0 q 1", "p a 0 q 2");
        assert!(parse_automaton(&text).is_err());
    }

    #[test]
    fn rejects_unknown_state_and_missing_header() {
        let text = SMALL.replace("p a 0 q 1", "p a 0 r 1");
        assert!(parse_automaton(&text)
            .unwrap_err()
            .message
            .contains("unknown state"));
        let text = SMALL.replace("initial: p\n", "");
        assert!(parse_automaton(&text)
            .unwrap_err()
            .message
            .contains("missing"));
    }
}
