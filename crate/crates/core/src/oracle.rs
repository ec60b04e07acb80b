//! Brute-force ground truth for small products.
//!
//! Every deterministic memoryless policy is enumerated and evaluated with a
//! dense solve over the states it reaches, independently of the
//! component-wise solver used elsewhere. The enumeration is then used to
//! compare Pareto dominance of value vectors against weak-stochastic
//! dominance of terminal-class distributions.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mdp::{Tlmdp, TransitionSystem};
use crate::momdp::{pareto_dominates, Momdp, ValueVector};
use crate::order::{Dominance, PartialOrder, DEFAULT_EPSILON};
use crate::pdfa::{Pdfa, Symbol};
use crate::product::build_product;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCap {
    pub max_states: usize,
    pub max_actions: usize,
}

impl Default for OracleCap {
    fn default() -> Self {
        OracleCap {
            max_states: 12,
            max_actions: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedPolicy {
    /// Action index for every non-terminal state, in state order.
    pub actions: Vec<usize>,
    pub value: ValueVector,
    pub outcome_probs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PolicyEnumeration {
    /// Non-terminal product states, in the order used by `actions`.
    pub decision_states: Vec<usize>,
    /// Proper policies in mixed-radix order of their action choices.
    pub solutions: Vec<EnumeratedPolicy>,
    pub total: usize,
    pub improper: usize,
}

impl PolicyEnumeration {
    /// Distinct value vectors not Pareto-dominated by any other.
    pub fn nondominated_values(&self, eps: f64) -> Vec<ValueVector> {
        let distinct = distinct_by(&self.solutions, |s| &s.value.0, eps);
        distinct
            .iter()
            .filter(|&&i| {
                !distinct.iter().any(|&j| {
                    matches!(
                        pareto_dominates(&self.solutions[j].value, &self.solutions[i].value, eps),
                        Ok(Dominance::Dominates)
                    )
                })
            })
            .map(|&i| self.solutions[i].value.clone())
            .collect()
    }
}

/// Evaluates every proper deterministic memoryless policy exactly.
pub fn enumerate_solutions(momdp: &Momdp, cap: OracleCap) -> Result<PolicyEnumeration> {
    let p = momdp.product();
    let decision: Vec<usize> = (0..p.num_states()).filter(|&x| !p.is_terminal(x)).collect();
    let widest = decision.iter().map(|&x| p.actions(x).len()).max().unwrap_or(0);
    if decision.len() > cap.max_states || widest > cap.max_actions {
        return Err(Error::OverCap(format!(
            "{} non-terminal states with up to {} actions; the oracle accepts at most {} states with {} actions",
            decision.len(),
            widest,
            cap.max_states,
            cap.max_actions
        )));
    }
    let radix: Vec<usize> = decision.iter().map(|&x| p.actions(x).len()).collect();
    let total: usize = radix.iter().product();

    let evaluated: Vec<Option<EnumeratedPolicy>> = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let mut actions = vec![0; radix.len()];
            for (k, &r) in radix.iter().enumerate() {
                actions[k] = code % r;
                code /= r;
            }
            evaluate_dense(momdp, &decision, &actions)
        })
        .collect();
    let improper = evaluated.iter().filter(|e| e.is_none()).count();
    Ok(PolicyEnumeration {
        decision_states: decision,
        solutions: evaluated.into_iter().flatten().collect(),
        total,
        improper,
    })
}

/// Dense evaluation of one deterministic policy, `None` when improper.
fn evaluate_dense(momdp: &Momdp, decision: &[usize], actions: &[usize]) -> Option<EnumeratedPolicy> {
    let p = momdp.product();
    let n = momdp.num_objectives();
    let mut choice = vec![usize::MAX; p.num_states()];
    for (&x, &a) in decision.iter().zip(actions) {
        choice[x] = a;
    }
    let step = |x: usize| &p.actions(x)[choice[x]].successors;

    // States reachable from x0 under the policy.
    let mut seen = vec![false; p.num_states()];
    let mut order = vec![p.initial()];
    seen[p.initial()] = true;
    let mut k = 0;
    while k < order.len() {
        let x = order[k];
        k += 1;
        if p.is_terminal(x) {
            continue;
        }
        for &(t, q) in step(x) {
            if q > 0.0 && !seen[t] {
                seen[t] = true;
                order.push(t);
            }
        }
    }
    let transient: Vec<usize> = order.iter().copied().filter(|&x| !p.is_terminal(x)).collect();

    // Proper iff every reached state can reach a terminal state.
    let mut good: Vec<bool> = (0..p.num_states()).map(|x| p.is_terminal(x)).collect();
    loop {
        let mut changed = false;
        for &x in &transient {
            if !good[x] && step(x).iter().any(|&(t, q)| q > 0.0 && good[t]) {
                good[x] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if transient.iter().any(|&x| !good[x]) {
        return None;
    }

    let seed = |x: usize| -> Vec<f64> {
        let mut v = vec![0.0; 2 * n];
        for i in 0..n {
            if momdp.closures().contains(i, x) {
                v[i] = 1.0;
            }
        }
        if let Some(c) = p.class_of(x) {
            v[n + c] = 1.0;
        }
        v
    };
    let initial = if p.is_terminal(p.initial()) {
        seed(p.initial())
    } else {
        let m = transient.len();
        let mut local = vec![usize::MAX; p.num_states()];
        for (i, &x) in transient.iter().enumerate() {
            local[x] = i;
        }
        let mut a = DMatrix::<f64>::identity(m, m);
        let mut b = DMatrix::<f64>::zeros(m, 2 * n);
        for (i, &x) in transient.iter().enumerate() {
            for &(t, q) in step(x) {
                if p.is_terminal(t) {
                    for (c, v) in seed(t).into_iter().enumerate() {
                        b[(i, c)] += q * v;
                    }
                } else {
                    a[(i, local[t])] -= q;
                }
            }
        }
        let sol = a.lu().solve(&b)?;
        let row = local[p.initial()];
        (0..2 * n).map(|c| sol[(row, c)]).collect::<Vec<_>>()
    };
    Some(EnumeratedPolicy {
        actions: actions.to_vec(),
        value: ValueVector(initial[..n].to_vec()),
        outcome_probs: initial[n..].to_vec(),
    })
}

/// Indices of the first member of each group of vectors equal within `eps`.
fn distinct_by<T, F>(items: &[T], key: F, eps: f64) -> Vec<usize>
where
    F: Fn(&T) -> &Vec<f64>,
{
    let mut out: Vec<usize> = Vec::new();
    for (i, it) in items.iter().enumerate() {
        let v = key(it);
        let seen = out
            .iter()
            .any(|&j| v.iter().zip(key(&items[j])).all(|(a, b)| (a - b).abs() <= eps));
        if !seen {
            out.push(i);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    pub policies: usize,
    pub improper: usize,
    pub distinct_outcomes: usize,
    pub pareto_nondominated: usize,
    pub weak_stochastic_nondominated: usize,
    /// Pareto nondominated yet weak-stochastic dominated (enumeration indices).
    pub forward_violations: Vec<usize>,
    /// Weak-stochastic nondominated yet Pareto dominated.
    pub converse_violations: Vec<usize>,
    /// Pairs on which the two dominance routes disagree.
    pub route_mismatches: usize,
    /// Largest `|V - R·p|` over the enumeration.
    pub identity_gap: f64,
}

impl Theorem1Report {
    pub fn is_clean(&self) -> bool {
        self.forward_violations.is_empty() && self.route_mismatches == 0
    }
}

impl fmt::Display for Theorem1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "policies enumerated:            {}", self.policies)?;
        writeln!(f, "improper (excluded):            {}", self.improper)?;
        writeln!(f, "distinct outcome distributions: {}", self.distinct_outcomes)?;
        writeln!(f, "Pareto nondominated:            {}", self.pareto_nondominated)?;
        writeln!(f, "weak-stochastic nondominated:   {}", self.weak_stochastic_nondominated)?;
        writeln!(f, "forward violations:             {}", self.forward_violations.len())?;
        writeln!(f, "converse violations:            {}", self.converse_violations.len())?;
        writeln!(f, "route mismatches:               {}", self.route_mismatches)?;
        write!(f, "max |V - R p|:                  {:.3e}", self.identity_gap)
    }
}

/// Class order induced by the lifted preference graph: `W_i ⪰ W_j` iff
/// `W_j ⇝ W_i`.
pub fn class_order(momdp: &Momdp) -> Result<PartialOrder> {
    let p = momdp.product();
    let names = p.classes().iter().map(|c| c.name.clone()).collect();
    PartialOrder::from_relation(names, |i, j| p.reachability().reaches(j, i))
}

/// Compares both dominance routes over all distinct outcome distributions.
pub fn check_theorem1(momdp: &Momdp, enumeration: &PolicyEnumeration) -> Result<Theorem1Report> {
    let eps = DEFAULT_EPSILON;
    let order = class_order(momdp)?;
    let r = momdp.reachability_matrix();
    let sols = &enumeration.solutions;

    let identity_gap = sols
        .iter()
        .map(|s| {
            let rp = crate::momdp::apply(&r, &s.outcome_probs);
            s.value.0.iter().zip(&rp).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);

    let reps = distinct_by(sols, |s| &s.outcome_probs, eps);
    let k = reps.len();
    let verdicts: Vec<(Vec<Dominance>, Vec<Dominance>)> = reps
        .par_iter()
        .map(|&a| {
            let mut pareto = Vec::with_capacity(k);
            let mut stochastic = Vec::with_capacity(k);
            for &b in &reps {
                pareto.push(pareto_dominates(&sols[a].value, &sols[b].value, eps)?);
                stochastic.push(order.dominance(&sols[a].outcome_probs, &sols[b].outcome_probs, eps)?);
            }
            Ok((pareto, stochastic))
        })
        .collect::<Result<_>>()?;

    let mut report = Theorem1Report {
        policies: sols.len(),
        improper: enumeration.improper,
        distinct_outcomes: k,
        pareto_nondominated: 0,
        weak_stochastic_nondominated: 0,
        forward_violations: Vec::new(),
        converse_violations: Vec::new(),
        route_mismatches: 0,
        identity_gap,
    };
    for (ia, &a) in reps.iter().enumerate() {
        let pareto_nd = (0..k).all(|ib| verdicts[ib].0[ia] != Dominance::Dominates);
        let ws_nd = (0..k).all(|ib| verdicts[ib].1[ia] != Dominance::Dominates);
        report.pareto_nondominated += pareto_nd as usize;
        report.weak_stochastic_nondominated += ws_nd as usize;
        if pareto_nd && !ws_nd {
            report.forward_violations.push(a);
        }
        if ws_nd && !pareto_nd {
            report.converse_violations.push(a);
        }
        report.route_mismatches += (0..k).filter(|&ib| verdicts[ia].0[ib] != verdicts[ia].1[ib]).count();
    }
    Ok(report)
}

/// Shape of generated instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomConfig {
    /// Non-sink MDP states, inclusive range.
    pub mdp_states: (usize, usize),
    pub max_actions: usize,
    pub automaton_states: (usize, usize),
    pub max_classes: usize,
    /// Probability of each directed edge between distinct classes.
    pub edge_density: f64,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            mdp_states: (2, 4),
            max_actions: 3,
            automaton_states: (2, 4),
            max_classes: 3,
            edge_density: 0.4,
        }
    }
}

/// A random TLMDP and PDFA over the propositions `{a, b}`.
///
/// Each action has two successors, one of them strictly later in the state
/// order (or the sink), so every policy terminates.
pub fn random_pair(seed: u64, cfg: &RandomConfig) -> Result<(Tlmdp, Pdfa)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let props = ["a", "b"];
    let alphabet = vec![
        Symbol::empty(),
        Symbol::new(["a"]),
        Symbol::new(["b"]),
        Symbol::new(["a", "b"]),
    ];

    let k = rng.random_range(cfg.mdp_states.0..=cfg.mdp_states.1);
    let name = |i: usize| if i == k { "sink".to_string() } else { format!("s{i}") };
    let mut mb = Tlmdp::builder()
        .states((0..=k).map(name))
        .initial("s0")
        .sink("sink")
        .propositions(props);
    for i in 0..k {
        mb = mb.label(name(i), alphabet[rng.random_range(0..alphabet.len())].clone());
        for a in 0..rng.random_range(1..=cfg.max_actions) {
            let forward = rng.random_range(i + 1..=k);
            let other = rng.random_range(0..=k);
            let pf = f64::from(rng.random_range(1..=9u8)) / 10.0;
            let act = format!("a{a}");
            mb = mb.transition(name(i), act.clone(), name(forward), pf);
            mb = mb.transition(name(i), act, name(other), 1.0 - pf);
        }
    }
    let mdp = mb.build()?;

    let m = rng.random_range(cfg.automaton_states.0..=cfg.automaton_states.1);
    let c = rng.random_range(1..=cfg.max_classes.min(m));
    let qname = |q: usize| format!("q{q}");
    let mut block_of: Vec<usize> = (0..m).map(|q| if q < c { q } else { rng.random_range(0..c) }).collect();
    // Shuffle which automaton states seed the blocks.
    for q in (1..m).rev() {
        let j = rng.random_range(0..=q);
        block_of.swap(q, j);
    }
    let mut pb = Pdfa::builder().states((0..m).map(qname)).propositions(props).initial("q0");
    for sym in &alphabet {
        pb = pb.symbol(sym.clone());
    }
    for q in 0..m {
        for sym in &alphabet {
            pb = pb.transition(qname(q), sym.clone(), qname(rng.random_range(0..m)));
        }
    }
    for b in 0..c {
        pb = pb.block(format!("c{b}"), (0..m).filter(|&q| block_of[q] == b).map(qname));
    }
    for i in 0..c {
        for j in 0..c {
            if i != j && rng.random_bool(cfg.edge_density) {
                pb = pb.edge(format!("c{i}"), format!("c{j}"));
            }
        }
    }
    Ok((mdp, pb.build()?))
}

/// A random product with at most `max_decision_states` non-terminal states.
/// Seeds that produce larger products are skipped deterministically.
pub fn random_instance(seed: u64, max_decision_states: usize) -> Result<Momdp> {
    let cfg = RandomConfig::default();
    for attempt in 0..1000u64 {
        let (mdp, pdfa) = random_pair(seed.wrapping_mul(1000).wrapping_add(attempt), &cfg)?;
        let product = build_product(&mdp, &pdfa)?;
        let decision = (0..product.num_states()).filter(|&x| !product.is_terminal(x)).count();
        if decision <= max_decision_states {
            return Ok(Momdp::new(product));
        }
    }
    Err(Error::InvalidConfig(format!(
        "no instance with at most {max_decision_states} decision states from seed {seed}"
    )))
}
