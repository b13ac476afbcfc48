//! Command-line front end. [`run`] parses arguments and produces a
//! [`CommandReport`]; the binary only prints it and exits.
//!
//! Every command emits human-readable lines and machine-readable
//! `key=value` lines. The machine lines never contain timings, so equal
//! inputs give byte-identical machine output.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::automaton::BlindCounterAutomaton;
use crate::decision::{decide_accept, DecideOptions};
use crate::liminf::{
    canonical_run, characterize, liminf_automaton, reduction_check, ReductionReport, DEMO_BATTERY,
};
use crate::petri::{translate, LabeledPetriNet};
use crate::semantics::{oracle_accept, ExplorationCaps, OracleVerdict};
use crate::words::{BlockLasso, IntegerLasso, LassoWord};
use crate::Error;

#[derive(Parser, Debug)]
#[command(
    name = "blindcounter",
    version,
    about = "Blind-counter Büchi automata on lasso words"
)]
struct Cli {
    /// Print only the machine-readable key=value lines.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the well-formedness rules of an automaton file.
    Validate { file: PathBuf },
    /// Remove ε-transitions and print the resulting automaton.
    Eliminate { file: PathBuf },
    /// Decide acceptance of a lasso word by a one-counter automaton.
    Accept {
        file: PathBuf,
        #[arg(long, value_name = "u|v", allow_hyphen_values = true)]
        lasso: String,
        /// Counter bound for the witness search.
        #[arg(long)]
        cutoff: Option<u64>,
    },
    /// Bounded brute-force acceptance check.
    Oracle {
        file: PathBuf,
        #[arg(long, value_name = "u|v", allow_hyphen_values = true)]
        lasso: String,
        #[arg(long, default_value_t = 16)]
        counter_cap: u64,
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
    },
    /// Block coding of an integer lasso.
    Encode {
        #[arg(long, value_name = "m|p", allow_hyphen_values = true)]
        intlasso: String,
    },
    /// Greedy run of the liminf automaton on a block lasso.
    CanonicalRun {
        #[arg(long, value_name = "BLOCKS", allow_hyphen_values = true)]
        blocks: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        horizon: usize,
    },
    /// Exact acceptance of a block lasso by the liminf automaton.
    Characterize {
        #[arg(long, value_name = "BLOCKS", allow_hyphen_values = true)]
        blocks: String,
    },
    /// Compare finite liminf, acceptance of the code, and the characterization.
    Reduction {
        #[arg(long, value_name = "m|p", allow_hyphen_values = true)]
        intlasso: String,
    },
    /// Translate a Petri net file into a blind-counter automaton.
    TranslatePn { file: PathBuf },
    /// Print the liminf automaton and run the reduction battery.
    #[command(alias = "demo-paper")]
    Demo,
}

/// Outcome of one command.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommandReport {
    pub command: String,
    pub human: Vec<String>,
    pub machine: Vec<String>,
    pub elapsed_ms: u128,
    pub exit_code: i32,
    /// Output printed instead of the report (help, version, usage errors).
    pub raw: Option<String>,
    pub machine_only: bool,
}

impl CommandReport {
    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        self.machine.push(format!("{key}={value}"));
    }

    fn say(&mut self, line: impl Into<String>) {
        self.human.push(line.into());
    }

    /// Text for standard output.
    pub fn render(&self) -> String {
        if let Some(raw) = &self.raw {
            return raw.clone();
        }
        let mut s = String::new();
        if !self.machine_only {
            for l in &self.human {
                s.push_str(l);
                s.push('\n');
            }
            s.push_str(&format!("elapsed: {} ms\n---\n", self.elapsed_ms));
        }
        s.push_str(&self.machine_text());
        s
    }

    pub fn machine_text(&self) -> String {
        let mut s = String::new();
        for l in &self.machine {
            s.push_str(l);
            s.push('\n');
        }
        s
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_automaton(path: &PathBuf) -> Result<BlindCounterAutomaton, Error> {
    Ok(BlindCounterAutomaton::parse(&read(path)?)?)
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I) -> CommandReport
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let echo = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return CommandReport {
                command: echo,
                exit_code: code,
                raw: Some(e.render().to_string()),
                ..Default::default()
            };
        }
    };
    let mut report = CommandReport {
        command: echo.clone(),
        machine_only: cli.machine,
        ..Default::default()
    };
    report.kv("command", &echo);
    let start = Instant::now();
    if let Err(e) = execute(cli.command, &mut report) {
        report.say(format!("error: {e}"));
        report.kv("error", e);
        report.exit_code = 1;
    }
    report.elapsed_ms = start.elapsed().as_millis();
    report.kv("exit_code", report.exit_code);
    report
}

fn execute(cmd: Command, r: &mut CommandReport) -> Result<(), Error> {
    match cmd {
        Command::Validate { file } => {
            let a = load_automaton(&file)?;
            let violations = a.validate();
            r.kv("violations", violations.len());
            for v in &violations {
                r.say(v.to_string());
                r.kv("violation", v);
            }
            if violations.is_empty() {
                r.say(format!("{}: well formed", file.display()));
            } else {
                r.exit_code = 1;
            }
        }
        Command::Eliminate { file } => {
            let e = load_automaton(&file)?.eliminate_epsilon()?;
            let text = e.to_text();
            r.kv("transitions", e.transitions().len());
            r.kv("accepting_transitions", e.accepting_transitions().len());
            for line in text.lines() {
                r.say(line);
                r.kv("line", line);
            }
        }
        Command::Accept {
            file,
            lasso,
            cutoff,
        } => {
            let mut a = load_automaton(&file)?;
            let w = LassoWord::parse(&lasso)?;
            if a.has_epsilon() {
                a = a.eliminate_epsilon()?;
                r.say("epsilon transitions eliminated first");
                r.kv("epsilon_eliminated", true);
            }
            let v = decide_accept(&a, &w, DecideOptions { cutoff })?;
            r.say(format!(
                "{} {w}",
                if v.accepted { "accepted" } else { "rejected" }
            ));
            if let Some(wt) = &v.witness {
                r.say(format!(
                    "witness: case {}, requirement {}, pumped {}",
                    wt.case.code(),
                    wt.requirement,
                    wt.pumped
                ));
                for l in wt.run.trace(&a).lines() {
                    r.say(format!("  {l}"));
                }
            }
            r.machine
                .extend(v.to_key_values(&a).lines().map(str::to_string));
        }
        Command::Oracle {
            file,
            lasso,
            counter_cap,
            depth,
        } => {
            let a = load_automaton(&file)?;
            let w = LassoWord::parse(&lasso)?;
            let v = oracle_accept(&a, &w, ExplorationCaps::new(counter_cap, depth))?;
            r.say(format!("oracle verdict on {w}: {}", v.name()));
            r.kv("verdict", v.name());
            match &v {
                OracleVerdict::Accept(run) => {
                    r.kv("pumped", run.pumped);
                    for l in run.trace(&a).lines() {
                        r.say(format!("  {l}"));
                        r.kv("trace", l);
                    }
                }
                OracleVerdict::RejectWithinCaps { cap_touched }
                | OracleVerdict::Inconclusive { cap_touched } => {
                    r.say(format!("counter cap touched: {cap_touched}"));
                    r.kv("cap_touched", cap_touched);
                }
            }
            r.kv(
                "conclusive",
                v.conclusive().map_or("no".to_string(), |b| b.to_string()),
            );
        }
        Command::Encode { intlasso } => {
            let x = IntegerLasso::parse(&intlasso)?;
            let w = x.block_code();
            r.say(format!("{x} encodes to {w}"));
            r.kv("intlasso", &x);
            r.kv("word", &w);
            r.kv("block_word", w.is_block_word());
            r.kv("blocks", w.decompose_blocks()?);
            r.kv("liminf", x.liminf_value());
        }
        Command::CanonicalRun { blocks, n, horizon } => {
            let b = BlockLasso::parse(&blocks)?;
            if n == 0 {
                return Err(Error::Io("--n must be at least 1".into()));
            }
            let steps = canonical_run(b.blocks(), n, horizon);
            for s in &steps {
                let line = format!(
                    "{} {} {} {} {} {}",
                    s.index,
                    s.block,
                    s.phase,
                    s.counter_before,
                    if s.used { "used" } else { "skipped" },
                    s.counter_after
                );
                r.say(line.clone());
                r.kv("block", line);
            }
            let used: Vec<String> = steps
                .iter()
                .filter(|s| s.used)
                .map(|s| s.index.to_string())
                .collect();
            r.kv("used", used.join(","));
        }
        Command::Characterize { blocks } => {
            let b = BlockLasso::parse(&blocks)?;
            match characterize(&b) {
                Some(c) => {
                    r.say(format!("accepted: {c}"));
                    r.kv("verdict", "accept");
                    r.kv("n", c.initial_increments);
                    r.kv("periodic_start", c.periodic_start);
                    let pattern: String = c
                        .periodic_pattern
                        .iter()
                        .map(|&u| if u { '1' } else { '0' })
                        .collect();
                    r.kv("pattern", pattern);
                }
                None => {
                    r.say("rejected");
                    r.kv("verdict", "reject");
                }
            }
        }
        Command::Reduction { intlasso } => {
            let x = IntegerLasso::parse(&intlasso)?;
            let rep = reduction_check(&x)?;
            push_reduction(r, &rep);
            if !rep.holds() {
                r.exit_code = 1;
            }
        }
        Command::TranslatePn { file } => {
            let net = LabeledPetriNet::parse(&read(&file)?)?;
            let tr = translate(&net)?;
            r.kv("states", tr.automaton.state_count());
            r.kv("counters", tr.automaton.counter_count());
            r.kv("transitions", tr.automaton.transitions().len());
            for line in tr.automaton.to_text().lines() {
                r.say(line);
                r.kv("line", line);
            }
        }
        Command::Demo => {
            let a = liminf_automaton();
            for line in a.to_text().lines() {
                r.say(line);
            }
            r.kv("states", a.state_count());
            r.kv("violations", a.validate().len());
            let mut failed = 0;
            for lit in DEMO_BATTERY {
                let rep = reduction_check(&IntegerLasso::parse(lit)?)?;
                r.say(format!(
                    "{:<12} liminf finite {:<5} accepted {:<5} {}",
                    lit,
                    rep.finite_liminf,
                    rep.decided,
                    if rep.holds() { "ok" } else { "FAIL" }
                ));
                r.kv(
                    "case",
                    format!("{lit} {}", if rep.holds() { "pass" } else { "fail" }),
                );
                failed += usize::from(!rep.holds());
            }
            r.say(format!(
                "{} of {} cases agree",
                DEMO_BATTERY.len() - failed,
                DEMO_BATTERY.len()
            ));
            r.kv("failed", failed);
            if failed > 0 {
                r.exit_code = 1;
            }
        }
    }
    Ok(())
}

fn push_reduction(r: &mut CommandReport, rep: &ReductionReport) {
    r.say(format!(
        "sequence {} (finite liminf: {})",
        rep.sequence, rep.finite_liminf
    ));
    r.say(format!("code {} accepted: {}", rep.word, rep.decided));
    match &rep.certificate {
        Some(c) => r.say(format!("characterization: {c}")),
        None => r.say("characterization: reject"),
    }
    r.say(format!("equivalence holds: {}", rep.holds()));
    r.machine
        .extend(rep.to_key_values().lines().map(str::to_string));
}
