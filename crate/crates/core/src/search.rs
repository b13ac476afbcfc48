//! Bounded breadth-first exploration of a configuration graph and
//! extraction of accepting lassos from it.
//!
//! A lasso is either a plain cycle (the run returns to the exact same
//! configuration) or, for monotone systems, a *pumped* segment that
//! returns to the same control point with every counter at least as
//! large. Monotonicity makes the pumped segment repeatable forever.

use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

/// One outgoing move of a configuration.
#[derive(Clone, Debug)]
pub struct Succ<N, S> {
    pub target: N,
    pub step: S,
    pub reads_letter: bool,
    pub accepting: bool,
}

pub trait LassoSystem {
    type Node: Clone + Eq + Hash + Debug;
    type Step: Clone + Debug;
    type Control: Clone + Eq + Hash;

    fn initial(&self) -> Self::Node;

    /// Pushes the successors of `node` that stay within the counter cap.
    /// Returns `true` when at least one successor was dropped by the cap.
    fn successors(&self, node: &Self::Node, out: &mut Vec<Succ<Self::Node, Self::Step>>) -> bool;

    fn is_accepting(&self, node: &Self::Node) -> bool;

    /// Everything about a configuration except its counters.
    fn control(&self, node: &Self::Node) -> Self::Control;

    fn counters<'a>(&self, node: &'a Self::Node) -> &'a [u64];

    /// Whether larger counters can always replay what smaller ones can.
    fn monotone(&self) -> bool;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge<N, S> {
    pub from: N,
    pub step: S,
    pub to: N,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso<N, S> {
    pub stem: Vec<Edge<N, S>>,
    pub cycle: Vec<Edge<N, S>>,
    pub pumped: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchVerdict<N, S> {
    Accept(Lasso<N, S>),
    RejectWithinCaps { cap_touched: bool },
    Inconclusive { cap_touched: bool },
}

struct EdgeRec<S> {
    from: usize,
    to: usize,
    step: S,
    reads: bool,
    accepting: bool,
}

const MARK: u8 = 1;
const LETTER: u8 = 2;
const FULL: u8 = MARK | LETTER;

/// Explored part of a configuration graph.
pub struct Exploration<'s, Sys: LassoSystem> {
    sys: &'s Sys,
    nodes: Vec<Sys::Node>,
    edges: Vec<EdgeRec<Sys::Step>>,
    out: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    pub cap_touched: bool,
    pub depth_touched: bool,
}

impl<'s, Sys: LassoSystem> Exploration<'s, Sys> {
    /// Breadth-first exploration; nodes at depth `depth_cap` are not expanded.
    pub fn run(sys: &'s Sys, depth_cap: usize) -> Self {
        let mut index: HashMap<Sys::Node, usize> = HashMap::new();
        let mut ex = Exploration {
            sys,
            nodes: Vec::new(),
            edges: Vec::new(),
            out: Vec::new(),
            parent: Vec::new(),
            cap_touched: false,
            depth_touched: false,
        };
        let root = sys.initial();
        index.insert(root.clone(), 0);
        ex.nodes.push(root);
        ex.out.push(Vec::new());
        ex.parent.push(None);
        let mut depth = vec![0usize];
        let mut queue = VecDeque::from([0usize]);
        let mut buf = Vec::new();
        while let Some(v) = queue.pop_front() {
            buf.clear();
            let touched = sys.successors(&ex.nodes[v], &mut buf);
            if depth[v] >= depth_cap {
                if !buf.is_empty() || touched {
                    ex.depth_touched = true;
                }
                continue;
            }
            ex.cap_touched |= touched;
            for s in buf.drain(..) {
                let w = match index.get(&s.target) {
                    Some(&w) => w,
                    None => {
                        let w = ex.nodes.len();
                        index.insert(s.target.clone(), w);
                        ex.nodes.push(s.target);
                        ex.out.push(Vec::new());
                        ex.parent.push(Some(ex.edges.len()));
                        depth.push(depth[v] + 1);
                        queue.push_back(w);
                        w
                    }
                };
                ex.out[v].push(ex.edges.len());
                ex.edges.push(EdgeRec {
                    from: v,
                    to: w,
                    step: s.step,
                    reads: s.reads_letter,
                    accepting: s.accepting,
                });
            }
        }
        ex
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Sys::Node] {
        &self.nodes
    }

    fn flags_after(&self, flags: u8, e: &EdgeRec<Sys::Step>) -> u8 {
        let mut f = flags;
        if e.reads {
            f |= LETTER;
        }
        if e.accepting || self.sys.is_accepting(&self.nodes[e.to]) {
            f |= MARK;
        }
        f
    }

    fn edge(&self, id: usize) -> Edge<Sys::Node, Sys::Step> {
        let e = &self.edges[id];
        Edge {
            from: self.nodes[e.from].clone(),
            step: e.step.clone(),
            to: self.nodes[e.to].clone(),
        }
    }

    fn stem_to(&self, v: usize) -> Vec<Edge<Sys::Node, Sys::Step>> {
        let mut ids = Vec::new();
        let mut cur = v;
        while let Some(e) = self.parent[cur] {
            ids.push(e);
            cur = self.edges[e].from;
        }
        ids.reverse();
        ids.into_iter().map(|e| self.edge(e)).collect()
    }

    /// Shortest path from `(start, 0)` to any `(v, FULL)` with `goal(v)`,
    /// using only nodes allowed by `allowed`.
    fn flagged_path(
        &self,
        start: usize,
        allowed: impl Fn(usize) -> bool,
        goal: impl Fn(usize) -> bool,
    ) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut prev: Vec<Option<(usize, u8, usize)>> = vec![None; n * 4];
        let mut seen = vec![false; n * 4];
        let key = |v: usize, f: u8| v * 4 + f as usize;
        seen[key(start, 0)] = true;
        let mut queue = VecDeque::from([(start, 0u8)]);
        while let Some((v, f)) = queue.pop_front() {
            for &eid in &self.out[v] {
                let e = &self.edges[eid];
                if !allowed(e.to) {
                    continue;
                }
                let g = self.flags_after(f, e);
                let k = key(e.to, g);
                if seen[k] {
                    continue;
                }
                seen[k] = true;
                prev[k] = Some((v, f, eid));
                if g == FULL && goal(e.to) {
                    let mut path = Vec::new();
                    let (mut cv, mut cf) = (e.to, g);
                    while let Some((pv, pf, pe)) = prev[key(cv, cf)] {
                        path.push(pe);
                        if pv == start && pf == 0 {
                            break;
                        }
                        cv = pv;
                        cf = pf;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back((e.to, g));
            }
        }
        None
    }

    /// Strongly connected components (iterative Tarjan); `comp[v]` is the
    /// component id of `v`.
    fn sccs(&self) -> Vec<usize> {
        tarjan(self.nodes.len(), |v| {
            self.out[v].iter().map(|&e| self.edges[e].to).collect()
        })
    }

    /// Nodes whose component contains a cycle through a letter step and an
    /// accepting mark, in discovery order.
    fn plain_cycle_nodes(&self) -> (Vec<usize>, Vec<bool>) {
        let comp = self.sccs();
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut has_letter = vec![false; ncomp];
        let mut has_mark = vec![false; ncomp];
        for e in &self.edges {
            if comp[e.from] == comp[e.to] {
                let c = comp[e.from];
                has_letter[c] |= e.reads;
                has_mark[c] |= e.accepting || self.sys.is_accepting(&self.nodes[e.to]);
            }
        }
        let on_cycle = (0..self.nodes.len())
            .map(|v| has_letter[comp[v]] && has_mark[comp[v]])
            .collect();
        (comp, on_cycle)
    }

    /// Nodes whose control point lies on a control-level cycle with a
    /// letter step and an accepting mark.
    fn pump_candidates(&self) -> Vec<bool> {
        let mut ids: HashMap<Sys::Control, usize> = HashMap::new();
        let ctl: Vec<usize> = self
            .nodes
            .iter()
            .map(|n| {
                let len = ids.len();
                *ids.entry(self.sys.control(n)).or_insert(len)
            })
            .collect();
        let m = ids.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); m];
        for e in &self.edges {
            succ[ctl[e.from]].push(ctl[e.to]);
        }
        let comp = tarjan(m, |c| succ[c].clone());
        let ncomp = comp.iter().copied().max().map_or(0, |x| x + 1);
        let mut has_letter = vec![false; ncomp];
        let mut has_mark = vec![false; ncomp];
        for e in &self.edges {
            let (a, b) = (ctl[e.from], ctl[e.to]);
            if comp[a] == comp[b] {
                has_letter[comp[a]] |= e.reads;
                has_mark[comp[a]] |= e.accepting || self.sys.is_accepting(&self.nodes[e.to]);
            }
        }
        ctl.iter()
            .map(|&c| has_letter[comp[c]] && has_mark[comp[c]])
            .collect()
    }

    fn plain_lasso(
        &self,
        v: usize,
        comp: &[usize],
        on_cycle: &[bool],
    ) -> Option<Lasso<Sys::Node, Sys::Step>> {
        let path = self.flagged_path(v, |w| comp[w] == comp[v] && on_cycle[w], |w| w == v)?;
        Some(Lasso {
            stem: self.stem_to(v),
            cycle: path.into_iter().map(|e| self.edge(e)).collect(),
            pumped: false,
        })
    }

    fn pumped_lasso(&self, v: usize) -> Option<Lasso<Sys::Node, Sys::Step>> {
        let control = self.sys.control(&self.nodes[v]);
        let base = self.sys.counters(&self.nodes[v]).to_vec();
        let path = self.flagged_path(
            v,
            |_| true,
            |w| {
                w != v
                    && self.sys.control(&self.nodes[w]) == control
                    && self
                        .sys
                        .counters(&self.nodes[w])
                        .iter()
                        .zip(&base)
                        .all(|(x, y)| x >= y)
            },
        )?;
        Some(Lasso {
            stem: self.stem_to(v),
            cycle: path.into_iter().map(|e| self.edge(e)).collect(),
            pumped: true,
        })
    }

    /// Up to `limit` accepting lassos: plain ones first (by cycle-start
    /// discovery order), then pumped ones when the system is monotone.
    pub fn accepting_lassos(&self, limit: usize) -> Vec<Lasso<Sys::Node, Sys::Step>> {
        let mut out = Vec::new();
        if limit == 0 {
            return out;
        }
        let (comp, on_cycle) = self.plain_cycle_nodes();
        for v in 0..self.nodes.len() {
            if on_cycle[v] {
                if let Some(l) = self.plain_lasso(v, &comp, &on_cycle) {
                    out.push(l);
                    if out.len() >= limit {
                        return out;
                    }
                }
            }
        }
        if self.sys.monotone() {
            let candidates = self.pump_candidates();
            for v in 0..self.nodes.len() {
                if candidates[v] && !on_cycle[v] {
                    if let Some(l) = self.pumped_lasso(v) {
                        out.push(l);
                        if out.len() >= limit {
                            return out;
                        }
                    }
                }
            }
        }
        out
    }

    /// First accepting lasso whose cycle starts at a node satisfying
    /// `wanted`. Plain cycles are tried first; pumped ones are tried from
    /// the largest counters down.
    pub fn accepting_lasso_where(
        &self,
        wanted: impl Fn(&Sys::Node) -> bool,
    ) -> Option<Lasso<Sys::Node, Sys::Step>> {
        let (comp, on_cycle) = self.plain_cycle_nodes();
        let picked: Vec<usize> = (0..self.nodes.len())
            .filter(|&v| wanted(&self.nodes[v]))
            .collect();
        for &v in &picked {
            if on_cycle[v] {
                if let Some(l) = self.plain_lasso(v, &comp, &on_cycle) {
                    return Some(l);
                }
            }
        }
        if !self.sys.monotone() {
            return None;
        }
        let candidates = self.pump_candidates();
        let mut order: Vec<usize> = picked.into_iter().filter(|&v| candidates[v]).collect();
        let weight = |v: usize| -> u64 { self.sys.counters(&self.nodes[v]).iter().sum() };
        order.sort_by(|&x, &y| weight(y).cmp(&weight(x)).then(x.cmp(&y)));
        order.into_iter().find_map(|v| self.pumped_lasso(v))
    }

    pub fn verdict(&self) -> SearchVerdict<Sys::Node, Sys::Step> {
        match self.accepting_lassos(1).into_iter().next() {
            Some(l) => SearchVerdict::Accept(l),
            None if self.depth_touched => SearchVerdict::Inconclusive {
                cap_touched: self.cap_touched,
            },
            None => SearchVerdict::RejectWithinCaps {
                cap_touched: self.cap_touched,
            },
        }
    }
}

/// Iterative Tarjan SCC over `n` vertices.
pub(crate) fn tarjan(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some((v, ws, i)) = call.last_mut() {
            if *i < ws.len() {
                let w = ws[*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    let sw = succ(w);
                    call.push((w, sw, 0));
                } else if on_stack[w] {
                    let v = *v;
                    low[v] = low[v].min(index[w]);
                }
            } else {
                let v = *v;
                call.pop();
                if let Some((u, _, _)) = call.last() {
                    low[*u] = low[*u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A single counter that `+1`s on every step from control 0, with
    /// control 0 accepting.
    struct Climb {
        cap: u64,
    }

    impl LassoSystem for Climb {
        type Node = (u8, Vec<u64>);
        type Step = ();
        type Control = u8;
        fn initial(&self) -> Self::Node {
            (0, vec![0])
        }
        fn successors(&self, n: &Self::Node, out: &mut Vec<Succ<Self::Node, ()>>) -> bool {
            let c = n.1[0] + 1;
            if c > self.cap {
                return true;
            }
            out.push(Succ {
                target: (0, vec![c]),
                step: (),
                reads_letter: true,
                accepting: false,
            });
            false
        }
        fn is_accepting(&self, n: &Self::Node) -> bool {
            n.0 == 0
        }
        fn control(&self, n: &Self::Node) -> u8 {
            n.0
        }
        fn counters<'a>(&self, n: &'a Self::Node) -> &'a [u64] {
            &n.1
        }
        fn monotone(&self) -> bool {
            true
        }
    }

    #[test]
    fn pumping_is_found_when_no_plain_cycle_exists() {
        let sys = Climb { cap: 5 };
        let ex = Exploration::run(&sys, 100);
        assert!(ex.cap_touched);
        match ex.verdict() {
            SearchVerdict::Accept(l) => {
                assert!(l.pumped);
                assert_eq!(l.cycle.len(), 1);
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn depth_cap_makes_rejection_inconclusive() {
        let sys = Climb { cap: 5 };
        let ex = Exploration::run(&sys, 0);
        assert!(ex.depth_touched);
        assert_eq!(ex.node_count(), 1);
    }

    #[test]
    fn tarjan_finds_components() {
        let g = [vec![1], vec![2], vec![0, 3], vec![]];
        let c = tarjan(4, |v| g[v].clone());
        assert_eq!(c[0], c[1]);
        assert_eq!(c[1], c[2]);
        assert_ne!(c[2], c[3]);
    }
}
