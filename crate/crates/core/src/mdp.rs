//! Terminating labeled MDPs and memoryless policies.
//!
//! The model has a single action-less sink `s_⊥` whose label is the empty
//! word ε; every other state is labeled with a set of atomic propositions.
//! Transitions are stored sparsely per `(state, action)`.
//!
//! Policy analysis ([`is_proper`], [`absorption_probabilities`],
//! [`solve_policy_chain`]) is written against the [`TransitionSystem`] trait
//! so that the same code serves both the labeled MDP and its product with a
//! preference automaton.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::pdfa::Symbol;

/// Tolerance on probability row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Name of the action added to extra sinks when several are normalized into one.
pub const TERMINATE_ACTION: &str = "terminate";

#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub name: String,
    /// `(successor, probability)` with distinct successors.
    pub successors: Vec<(usize, f64)>,
}

/// Finite state/action structure with terminal (action-less) states.
pub trait TransitionSystem {
    fn num_states(&self) -> usize;
    fn actions(&self, state: usize) -> &[Action];
    fn initial(&self) -> usize;
    fn state_name(&self, state: usize) -> String;

    fn is_terminal(&self, state: usize) -> bool {
        self.actions(state).is_empty()
    }

    fn num_transitions(&self) -> usize {
        (0..self.num_states())
            .map(|s| self.actions(s).iter().map(|a| a.successors.len()).sum::<usize>())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tlmdp {
    states: Vec<String>,
    index: HashMap<String, usize>,
    actions: Vec<Vec<Action>>,
    initial: usize,
    sink: usize,
    propositions: Vec<String>,
    /// `None` is the ε label; only the sink should carry it.
    labels: Vec<Option<Symbol>>,
}

#[derive(Debug, Clone, Default)]
pub struct TlmdpBuilder {
    states: Vec<String>,
    initial: Option<String>,
    sink: Option<String>,
    propositions: Vec<String>,
    labels: Vec<(String, Symbol)>,
    transitions: Vec<(String, String, String, f64)>,
}

impl TlmdpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn states<I, S>(mut self, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.extend(states.into_iter().map(Into::into));
        self
    }

    pub fn state(mut self, name: impl Into<String>) -> Self {
        self.states.push(name.into());
        self
    }

    pub fn initial(mut self, state: impl Into<String>) -> Self {
        self.initial = Some(state.into());
        self
    }

    pub fn sink(mut self, state: impl Into<String>) -> Self {
        self.sink = Some(state.into());
        self
    }

    pub fn propositions<I, S>(mut self, props: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.propositions.extend(props.into_iter().map(Into::into));
        self
    }

    pub fn label(mut self, state: impl Into<String>, symbol: Symbol) -> Self {
        self.labels.push((state.into(), symbol));
        self
    }

    pub fn transition(
        mut self,
        from: impl Into<String>,
        action: impl Into<String>,
        to: impl Into<String>,
        prob: f64,
    ) -> Self {
        self.transitions.push((from.into(), action.into(), to.into(), prob));
        self
    }

    /// Builds the model. Structural references are checked here; numeric and
    /// semantic conditions are left to [`Tlmdp::validate`]. Action-less
    /// states other than the sink get a single `terminate` action into the
    /// sink, so their labels still appear on the trace.
    pub fn build(self) -> Result<Tlmdp> {
        let mut index = HashMap::with_capacity(self.states.len());
        for (i, s) in self.states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidModel(format!("duplicate state `{s}`")));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownState(s.to_string()))
        };
        let initial = lookup(
            self.initial
                .as_deref()
                .ok_or_else(|| Error::InvalidModel("initial state missing".into()))?,
        )?;
        let sink = lookup(
            self.sink
                .as_deref()
                .ok_or_else(|| Error::InvalidModel("sink state missing".into()))?,
        )?;

        let n = self.states.len();
        let mut actions: Vec<Vec<Action>> = vec![Vec::new(); n];
        for (from, action, to, p) in &self.transitions {
            let (s, t) = (lookup(from)?, lookup(to)?);
            let list = &mut actions[s];
            let a = match list.iter().position(|a| &a.name == action) {
                Some(a) => a,
                None => {
                    list.push(Action {
                        name: action.clone(),
                        successors: Vec::new(),
                    });
                    list.len() - 1
                }
            };
            let succ = &mut list[a].successors;
            match succ.iter_mut().find(|(j, _)| *j == t) {
                Some((_, q)) => *q += p,
                None => succ.push((t, *p)),
            }
        }

        let mut labels: Vec<Option<Symbol>> = (0..n)
            .map(|s| if s == sink { None } else { Some(Symbol::empty()) })
            .collect();
        for (state, sym) in self.labels {
            labels[lookup(&state)?] = Some(sym);
        }

        for (s, acts) in actions.iter_mut().enumerate() {
            if s != sink && acts.is_empty() {
                log::info!("state `{}` has no actions; redirecting it to the sink", self.states[s]);
                acts.push(Action {
                    name: TERMINATE_ACTION.to_string(),
                    successors: vec![(sink, 1.0)],
                });
            }
        }

        Ok(Tlmdp {
            states: self.states,
            index,
            actions,
            initial,
            sink,
            propositions: self.propositions,
            labels,
        })
    }
}

impl TransitionSystem for Tlmdp {
    fn num_states(&self) -> usize {
        self.states.len()
    }

    fn actions(&self, state: usize) -> &[Action] {
        &self.actions[state]
    }

    fn initial(&self) -> usize {
        self.initial
    }

    fn state_name(&self, state: usize) -> String {
        self.states[state].clone()
    }
}

impl Tlmdp {
    pub fn builder() -> TlmdpBuilder {
        TlmdpBuilder::new()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn propositions(&self) -> &[String] {
        &self.propositions
    }

    /// `L(s)`; `None` is ε.
    pub fn label(&self, state: usize) -> Option<&Symbol> {
        self.labels[state].as_ref()
    }

    /// Checks every condition of a terminating labeled MDP and reports all
    /// violations at once.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (s, acts) in self.actions.iter().enumerate() {
            for a in acts {
                if let Some(&(t, p)) = a.successors.iter().find(|&&(_, p)| !(p >= 0.0)) {
                    report.violations.push(Violation::NegativeProbability {
                        state: self.states[s].clone(),
                        action: a.name.clone(),
                        successor: self.states[t].clone(),
                        prob: p,
                    });
                }
                let sum: f64 = a.successors.iter().map(|&(_, p)| p).sum();
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    report.violations.push(Violation::RowSum {
                        state: self.states[s].clone(),
                        action: a.name.clone(),
                        sum,
                    });
                }
            }
        }
        if !self.actions[self.sink].is_empty() {
            report.violations.push(Violation::SinkHasActions(self.states[self.sink].clone()));
        }
        if self.labels[self.sink].is_some() {
            report.violations.push(Violation::SinkLabeled(self.states[self.sink].clone()));
        }
        for (s, l) in self.labels.iter().enumerate() {
            match l {
                None if s != self.sink => {
                    report.violations.push(Violation::EpsilonLabel(self.states[s].clone()))
                }
                Some(sym) => {
                    if let Some(p) = sym.props().find(|p| !self.propositions.iter().any(|q| q == p)) {
                        report.violations.push(Violation::UnknownProposition {
                            state: self.states[s].clone(),
                            proposition: p.to_string(),
                        });
                    }
                }
                None => {}
            }
        }

        let reachable = reachable_states(self);
        let unreachable: Vec<String> = (0..self.num_states())
            .filter(|&s| !reachable[s])
            .map(|s| self.states[s].clone())
            .collect();
        if !unreachable.is_empty() {
            report.warnings.push(Warning::Unreachable(unreachable));
        }
        let traps = trap_states(self);
        if !traps.is_empty() {
            report.warnings.push(Warning::PossiblyImproper(
                traps.into_iter().map(|s| self.states[s].clone()).collect(),
            ));
        }
        report
    }

    /// Labels along a path, ε included for the sink.
    pub fn trace(&self, path: &Path) -> Vec<Option<&Symbol>> {
        path.states.iter().map(|&s| self.label(s)).collect()
    }

    /// The trace as a word over `2^AP` with the trailing ε dropped.
    pub fn trace_word(&self, path: &Path) -> Vec<Symbol> {
        path.states.iter().filter_map(|&s| self.label(s).cloned()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RowSum { state: String, action: String, sum: f64 },
    NegativeProbability { state: String, action: String, successor: String, prob: f64 },
    SinkHasActions(String),
    SinkLabeled(String),
    EpsilonLabel(String),
    UnknownProposition { state: String, proposition: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSum { state, action, sum } => {
                write!(f, "probabilities of ({state}, {action}) sum to {sum}")
            }
            Violation::NegativeProbability { state, action, successor, prob } => {
                write!(f, "({state}, {action}, {successor}) has probability {prob}")
            }
            Violation::SinkHasActions(s) => write!(f, "sink has actions: `{s}`"),
            Violation::SinkLabeled(s) => write!(f, "sink `{s}` must be labeled ε"),
            Violation::EpsilonLabel(s) => write!(f, "non-sink state `{s}` is labeled ε"),
            Violation::UnknownProposition { state, proposition } => {
                write!(f, "state `{state}` uses undeclared proposition `{proposition}`")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    Unreachable(Vec<String>),
    /// Reachable states some policy can stay in forever without terminating.
    PossiblyImproper(Vec<String>),
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Unreachable(s) => write!(f, "{} unreachable state(s): {}", s.len(), s.join(", ")),
            Warning::PossiblyImproper(s) => write!(
                f,
                "improper policies exist: end component avoiding the sink over {{{}}}",
                s.join(", ")
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_improper_warning(&self) -> bool {
        self.warnings.iter().any(|w| matches!(w, Warning::PossiblyImproper(_)))
    }

    pub fn into_result(self) -> Result<Self> {
        if self.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidModel(
                self.violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
            ))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "error: {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// States reachable from the initial state under any actions.
pub fn reachable_states<M: TransitionSystem + ?Sized>(m: &M) -> Vec<bool> {
    let mut seen = vec![false; m.num_states()];
    let mut queue = VecDeque::from([m.initial()]);
    seen[m.initial()] = true;
    while let Some(s) = queue.pop_front() {
        for a in m.actions(s) {
            for &(t, p) in &a.successors {
                if p > 0.0 && !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
    }
    seen
}

/// Reachable non-terminal states from which some policy never terminates:
/// the largest set in which every state keeps an action whose support stays
/// inside the set.
pub fn trap_states<M: TransitionSystem + ?Sized>(m: &M) -> Vec<usize> {
    let n = m.num_states();
    let mut inside: Vec<bool> = (0..n).map(|s| !m.is_terminal(s)).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            if inside[s]
                && !m.actions(s).iter().any(|a| {
                    a.successors.iter().all(|&(t, p)| p <= 0.0 || inside[t])
                })
            {
                inside[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let reachable = reachable_states(m);
    (0..n).filter(|&s| inside[s] && reachable[s]).collect()
}

/// Memoryless randomized policy: per state, `(action index, probability)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemorylessPolicy {
    choice: Vec<Vec<(usize, f64)>>,
}

impl MemorylessPolicy {
    pub fn new(choice: Vec<Vec<(usize, f64)>>) -> Self {
        MemorylessPolicy { choice }
    }

    /// One action index per state; ignored for terminal states.
    pub fn deterministic<M: TransitionSystem + ?Sized>(m: &M, actions: &[usize]) -> Result<Self> {
        if actions.len() != m.num_states() {
            return Err(Error::DimensionMismatch {
                expected: m.num_states(),
                got: actions.len(),
            });
        }
        let choice = (0..m.num_states())
            .map(|s| {
                if m.is_terminal(s) {
                    Vec::new()
                } else {
                    vec![(actions[s], 1.0)]
                }
            })
            .collect();
        let p = MemorylessPolicy { choice };
        p.check(m)?;
        Ok(p)
    }

    /// Uniform over every available action.
    pub fn uniform<M: TransitionSystem + ?Sized>(m: &M) -> Self {
        let choice = (0..m.num_states())
            .map(|s| {
                let k = m.actions(s).len();
                (0..k).map(|a| (a, 1.0 / k as f64)).collect()
            })
            .collect();
        MemorylessPolicy { choice }
    }

    pub fn choice(&self, state: usize) -> &[(usize, f64)] {
        &self.choice[state]
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    /// The single action at `state`, if the choice there is deterministic.
    pub fn action_at(&self, state: usize) -> Option<usize> {
        match self.choice[state].as_slice() {
            [(a, p)] if (*p - 1.0).abs() <= ROW_SUM_TOLERANCE => Some(*a),
            _ => None,
        }
    }

    /// Support and mass checks against a model.
    pub fn check<M: TransitionSystem + ?Sized>(&self, m: &M) -> Result<()> {
        if self.choice.len() != m.num_states() {
            return Err(Error::DimensionMismatch {
                expected: m.num_states(),
                got: self.choice.len(),
            });
        }
        for (s, c) in self.choice.iter().enumerate() {
            let k = m.actions(s).len();
            if k == 0 {
                continue;
            }
            if let Some(&(a, _)) = c.iter().find(|&&(a, _)| a >= k) {
                return Err(Error::InvalidPolicy(format!(
                    "action index {a} not available at `{}`",
                    m.state_name(s)
                )));
            }
            if c.iter().any(|&(_, p)| !(p >= 0.0)) {
                return Err(Error::InvalidPolicy(format!(
                    "negative probability at `{}`",
                    m.state_name(s)
                )));
            }
            let mass: f64 = c.iter().map(|&(_, p)| p).sum();
            if (mass - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidPolicy(format!(
                    "choice at `{}` has mass {mass}",
                    m.state_name(s)
                )));
            }
        }
        Ok(())
    }

    /// Successor distribution of the induced chain at `state`.
    pub fn induced_row<M: TransitionSystem + ?Sized>(&self, m: &M, state: usize) -> Vec<(usize, f64)> {
        let mut row: BTreeMap<usize, f64> = BTreeMap::new();
        for &(a, pa) in &self.choice[state] {
            if pa <= 0.0 {
                continue;
            }
            for &(t, p) in &m.actions(state)[a].successors {
                if p > 0.0 {
                    *row.entry(t).or_insert(0.0) += pa * p;
                }
            }
        }
        row.into_iter().collect()
    }
}

/// States reachable from `start` under the policy's support, never expanding
/// through stop states.
fn policy_reachable<M: TransitionSystem + ?Sized>(
    m: &M,
    pi: &MemorylessPolicy,
    start: usize,
    stop: &dyn Fn(usize) -> bool,
) -> Vec<usize> {
    let mut seen = vec![false; m.num_states()];
    let mut order = vec![start];
    seen[start] = true;
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        i += 1;
        if stop(s) {
            continue;
        }
        for (t, _) in pi.induced_row(m, s) {
            if !seen[t] {
                seen[t] = true;
                order.push(t);
            }
        }
    }
    order
}

/// Reachable states under `pi` that cannot reach a stop state. Empty iff
/// the policy reaches the stop set with probability one.
fn stuck_states<M: TransitionSystem + ?Sized>(
    m: &M,
    pi: &MemorylessPolicy,
    stop: &dyn Fn(usize) -> bool,
) -> Vec<usize> {
    let reach = policy_reachable(m, pi, m.initial(), stop);
    let mut pos = vec![usize::MAX; m.num_states()];
    for (k, &s) in reach.iter().enumerate() {
        pos[s] = k;
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); reach.len()];
    for (k, &s) in reach.iter().enumerate() {
        if stop(s) {
            continue;
        }
        for (t, _) in pi.induced_row(m, s) {
            preds[pos[t]].push(k);
        }
    }
    let mut good = vec![false; reach.len()];
    let mut queue: VecDeque<usize> = (0..reach.len()).filter(|&k| stop(reach[k])).collect();
    for &k in &queue {
        good[k] = true;
    }
    while let Some(k) = queue.pop_front() {
        for &p in &preds[k] {
            if !good[p] {
                good[p] = true;
                queue.push_back(p);
            }
        }
    }
    (0..reach.len()).filter(|&k| !good[k]).map(|k| reach[k]).collect()
}

/// True iff the induced chain reaches a terminal state with probability one.
/// Decided on the support graph, without numeric thresholds.
pub fn is_proper<M: TransitionSystem + ?Sized>(m: &M, pi: &MemorylessPolicy) -> Result<bool> {
    pi.check(m)?;
    Ok(stuck_states(m, pi, &|s| m.is_terminal(s)).is_empty())
}

/// Result of solving the induced chain down to a set of stop states.
#[derive(Debug, Clone)]
pub struct ChainSolution {
    /// Solved columns at the initial state.
    pub initial: Vec<f64>,
    /// Max-norm residual of the linear system.
    pub residual: f64,
    /// Number of transient states in the system.
    pub transient: usize,
}

/// Solves the induced chain of `pi`, stopping at states for which `seed`
/// returns a vector of `cols` values; every other state's value is the
/// expectation of the seed at the stop state eventually hit.
pub fn solve_policy_chain<M, F>(m: &M, pi: &MemorylessPolicy, cols: usize, seed: F) -> Result<ChainSolution>
where
    M: TransitionSystem + ?Sized,
    F: Fn(usize) -> Option<Vec<f64>>,
{
    pi.check(m)?;
    let seeds: Vec<Option<Vec<f64>>> = (0..m.num_states()).map(&seed).collect();
    debug_assert!(seeds.iter().flatten().all(|v| v.len() == cols));
    let is_stop = |s: usize| seeds[s].is_some();
    if let Some(v) = &seeds[m.initial()] {
        return Ok(ChainSolution {
            initial: v.clone(),
            residual: 0.0,
            transient: 0,
        });
    }
    let stuck = stuck_states(m, pi, &is_stop);
    if !stuck.is_empty() {
        return Err(Error::ImproperPolicy {
            end_component: stuck.into_iter().map(|s| m.state_name(s)).collect(),
        });
    }
    let reach = policy_reachable(m, pi, m.initial(), &is_stop);
    let transient: Vec<usize> = reach.into_iter().filter(|&s| !is_stop(s)).collect();
    let mut pos = vec![usize::MAX; m.num_states()];
    for (k, &s) in transient.iter().enumerate() {
        pos[s] = k;
    }
    let mut rows = Vec::with_capacity(transient.len());
    let mut rhs = vec![0.0; transient.len() * cols];
    for (k, &s) in transient.iter().enumerate() {
        let mut row = Vec::new();
        for (t, p) in pi.induced_row(m, s) {
            if let Some(v) = &seeds[t] {
                for c in 0..cols {
                    rhs[k * cols + c] += p * v[c];
                }
            } else {
                row.push((pos[t], p));
            }
        }
        rows.push(row);
    }
    let x = linalg::solve_absorbing(&rows, &rhs, cols)?;
    let residual = linalg::residual(&rows, &rhs, cols, &x);
    let k0 = pos[m.initial()];
    Ok(ChainSolution {
        initial: x[k0 * cols..(k0 + 1) * cols].to_vec(),
        residual,
        transient: transient.len(),
    })
}

/// Probability of the chain first hitting each of the given disjoint target
/// sets. Targets and terminal states stop the chain.
pub fn absorption_probabilities<M: TransitionSystem + ?Sized>(
    m: &M,
    pi: &MemorylessPolicy,
    targets: &[Vec<usize>],
) -> Result<Vec<f64>> {
    let k = targets.len();
    let mut target_of = vec![usize::MAX; m.num_states()];
    for (i, set) in targets.iter().enumerate() {
        for &s in set {
            if s >= m.num_states() {
                return Err(Error::UnknownState(format!("state index {s}")));
            }
            if target_of[s] != usize::MAX {
                return Err(Error::InvalidModel(format!(
                    "state `{}` belongs to two targets",
                    m.state_name(s)
                )));
            }
            target_of[s] = i;
        }
    }
    let sol = solve_policy_chain(m, pi, k, |s| {
        if target_of[s] != usize::MAX {
            let mut v = vec![0.0; k];
            v[target_of[s]] = 1.0;
            Some(v)
        } else if m.is_terminal(s) {
            Some(vec![0.0; k])
        } else {
            None
        }
    })?;
    Ok(sol.initial)
}

/// Sampled finite path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub states: Vec<usize>,
    /// True when the path ended in a terminal state, false when cut off at
    /// the step limit.
    pub terminated: bool,
}

/// Samples a path from the initial state. Reproducible for a fixed seed.
pub fn rollout<M: TransitionSystem + ?Sized>(
    m: &M,
    pi: &MemorylessPolicy,
    seed: u64,
    max_steps: usize,
) -> Path {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rollout_with(m, pi, &mut rng, max_steps)
}

pub fn rollout_with<M: TransitionSystem + ?Sized, R: Rng + ?Sized>(
    m: &M,
    pi: &MemorylessPolicy,
    rng: &mut R,
    max_steps: usize,
) -> Path {
    let mut s = m.initial();
    let mut states = vec![s];
    for _ in 0..max_steps {
        if m.is_terminal(s) {
            return Path {
                states,
                terminated: true,
            };
        }
        let a = sample(pi.choice(s).iter().copied(), rng);
        s = sample(m.actions(s)[a].successors.iter().copied(), rng);
        states.push(s);
    }
    let terminated = m.is_terminal(s);
    Path { states, terminated }
}

fn sample<R: Rng + ?Sized>(dist: impl Iterator<Item = (usize, f64)> + Clone, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = None;
    for (x, p) in dist {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = Some(x);
        if u < acc {
            return x;
        }
    }
    last.expect("distribution has positive mass")
}
