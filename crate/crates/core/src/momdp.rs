//! Multi-objective reachability over a product MDP.
//!
//! Objective `i` is the probability of terminating in `Z_i`, the union of the
//! terminal classes at least as good as class `i`. Because the classes
//! partition the terminal states, the value vector of a proper policy is
//! `R · p`, where `p` is the distribution over terminal classes and
//! `R[i][j] = 1` iff `W_i ⇝ W_j`.
//!
//! Pareto-optimal policies are found by linear scalarization: for a weight
//! vector `w` every terminal state is seeded with `Σ_{i : x ∈ Z_i} w_i` and a
//! single-objective maximal-reachability value iteration is run. Values are
//! reported from an exact evaluation of the recovered policy, not from the
//! iteration's fixed point.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::mdp::{solve_policy_chain, MemorylessPolicy, TransitionSystem};
use crate::order::{Dominance, DEFAULT_EPSILON};
use crate::product::{class_upper_closures, ClassUpperClosure, ProductMdp};

/// Actions whose backed-up value is within this of the best are ties.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Momdp {
    product: ProductMdp,
    closures: ClassUpperClosure,
    /// For every state, the objectives whose target set contains it.
    objectives_of: Vec<Vec<usize>>,
    /// Non-terminal strongly connected components, successors first.
    components: Vec<Vec<usize>>,
}

impl Momdp {
    pub fn new(product: ProductMdp) -> Self {
        let closures = class_upper_closures(&product);
        let mut objectives_of = vec![Vec::new(); product.num_states()];
        for (i, z) in closures.states.iter().enumerate() {
            for &x in z {
                objectives_of[x].push(i);
            }
        }
        let n = product.num_states();
        let edges = (0..n).flat_map(|x| {
            product
                .actions(x)
                .iter()
                .flat_map(move |a| a.successors.iter().map(move |&(t, _)| (x, t)))
        });
        let components = linalg::components(n, edges)
            .into_iter()
            .filter(|c| !(c.len() == 1 && product.is_terminal(c[0])))
            .collect();
        Momdp {
            product,
            closures,
            objectives_of,
            components,
        }
    }

    pub fn product(&self) -> &ProductMdp {
        &self.product
    }

    pub fn closures(&self) -> &ClassUpperClosure {
        &self.closures
    }

    pub fn num_objectives(&self) -> usize {
        self.product.num_classes()
    }

    /// `R[i][j] = 1` iff `W_i ⇝ W_j`.
    pub fn reachability_matrix(&self) -> Vec<Vec<f64>> {
        self.product.reachability().matrix()
    }

    /// `R · p`.
    pub fn value_from_outcomes(&self, outcomes: &[f64]) -> Vec<f64> {
        apply(&self.reachability_matrix(), outcomes)
    }

    /// Objectives whose target set contains `state`.
    pub fn objectives_of(&self, state: usize) -> &[usize] {
        &self.objectives_of[state]
    }

    /// Terminal seeds `Σ_{i : x ∈ Z_i} w_i`, zero elsewhere.
    pub fn initial_values(&self, w: &WeightVector) -> Vec<f64> {
        (0..self.product.num_states())
            .map(|x| self.objectives_of[x].iter().map(|&i| w.0[i]).sum())
            .collect()
    }

    /// One synchronous Bellman backup of the scalarized problem. Terminal
    /// states keep their seeds.
    pub fn bellman_update(&self, w: &WeightVector, values: &[f64]) -> Vec<f64> {
        let seeds = self.initial_values(w);
        (0..self.product.num_states())
            .map(|x| {
                if self.product.is_terminal(x) {
                    seeds[x]
                } else {
                    self.product
                        .actions(x)
                        .iter()
                        .map(|a| backup(&a.successors, values))
                        .fold(f64::NEG_INFINITY, f64::max)
                }
            })
            .collect()
    }
}

fn backup(successors: &[(usize, f64)], values: &[f64]) -> f64 {
    successors.iter().map(|&(t, p)| p * values[t]).sum()
}

/// `R · p` for a square 0/1 matrix.
pub fn apply(r: &[Vec<f64>], p: &[f64]) -> Vec<f64> {
    r.iter()
        .map(|row| row.iter().zip(p).map(|(a, b)| a * b).sum())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector(pub Vec<f64>);

impl ValueVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn max_abs_diff(&self, other: &ValueVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Point on the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if let Some(x) = w.iter().find(|x| !(**x >= 0.0)) {
            return Err(Error::InvalidWeights(format!("negative weight {x}")));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > DEFAULT_EPSILON {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        Ok(WeightVector(w))
    }

    pub fn uniform(n: usize) -> Self {
        WeightVector(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Strictly positive weights make every scalarized optimum Pareto
    /// optimal; with zeros only weak Pareto optimality is guaranteed.
    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(|&x| x > 0.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    /// Most sweeps spent on any one component.
    pub iterations: usize,
    /// Residual of the exact policy evaluation.
    pub residual: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomdpSolution {
    pub policy: MemorylessPolicy,
    pub value: ValueVector,
    /// Probability of terminating in each class `W_i`.
    pub outcome_probs: Vec<f64>,
    pub weight: Option<WeightVector>,
    pub stats: SolveStats,
}

impl MomdpSolution {
    /// Max-norm gap between the value vector and `R · outcome_probs`.
    pub fn identity_gap(&self, r: &[Vec<f64>]) -> f64 {
        let rp = apply(r, &self.outcome_probs);
        self.value
            .0
            .iter()
            .zip(&rp)
            .map(|(v, x)| (v - x).abs())
            .fold(0.0, f64::max)
    }
}

/// Value vector and class distribution of a memoryless policy.
pub fn evaluate_policy(momdp: &Momdp, policy: &MemorylessPolicy) -> Result<MomdpSolution> {
    let p = &momdp.product;
    let n = momdp.num_objectives();
    let sol = solve_policy_chain(p, policy, 2 * n, |x| {
        p.is_terminal(x).then(|| {
            let mut v = vec![0.0; 2 * n];
            for &i in momdp.objectives_of(x) {
                v[i] = 1.0;
            }
            if let Some(c) = p.class_of(x) {
                v[n + c] = 1.0;
            }
            v
        })
    })?;
    Ok(MomdpSolution {
        policy: policy.clone(),
        value: ValueVector(sol.initial[..n].to_vec()),
        outcome_probs: sol.initial[n..].to_vec(),
        weight: None,
        stats: SolveStats {
            iterations: 0,
            residual: sol.residual,
            seconds: 0.0,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Sup-norm change below which a component has converged.
    pub tolerance: f64,
    /// Sweep cap per component.
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-10,
            max_iterations: 1_000_000,
        }
    }
}

/// Maximizes `Σ_i w_i · Pr(reach Z_i)` and returns the optimal memoryless
/// deterministic policy with its exactly evaluated vectors.
///
/// Components of the product graph are swept successors-first with
/// Gauss–Seidel backups, so acyclic models converge in one pass.
pub fn solve_scalarized(momdp: &Momdp, w: &WeightVector, opts: &SolverOptions) -> Result<MomdpSolution> {
    if w.len() != momdp.num_objectives() {
        return Err(Error::DimensionMismatch {
            expected: momdp.num_objectives(),
            got: w.len(),
        });
    }
    let start = Instant::now();
    let p = &momdp.product;
    let mut values = momdp.initial_values(w);
    let mut iterations = 0;
    for comp in &momdp.components {
        let acyclic = comp.len() == 1
            && !p.actions(comp[0])
                .iter()
                .any(|a| a.successors.iter().any(|&(t, _)| t == comp[0]));
        let mut sweeps = 0;
        loop {
            let mut change: f64 = 0.0;
            for &x in comp {
                let best = p
                    .actions(x)
                    .iter()
                    .map(|a| backup(&a.successors, &values))
                    .fold(f64::NEG_INFINITY, f64::max);
                change = change.max((best - values[x]).abs());
                values[x] = best;
            }
            sweeps += 1;
            if acyclic || change < opts.tolerance {
                break;
            }
            if sweeps >= opts.max_iterations {
                return Err(Error::NoConvergence {
                    iterations: sweeps,
                    residual: change,
                });
            }
        }
        iterations = iterations.max(sweeps);
    }

    let policy = greedy_policy(momdp, &values);
    let mut sol = evaluate_policy(momdp, &policy)?;
    sol.weight = Some(w.clone());
    sol.stats.iterations = iterations;
    sol.stats.seconds = start.elapsed().as_secs_f64();
    Ok(sol)
}

/// Argmax policy. Among tied actions the lowest index is taken, restricted
/// to actions that move towards a terminal state through already-decided
/// states, so ties on cycles cannot produce a policy that never terminates.
fn greedy_policy(momdp: &Momdp, values: &[f64]) -> MemorylessPolicy {
    let p = &momdp.product;
    let n = p.num_states();
    let optimal: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            let q: Vec<f64> = p.actions(x).iter().map(|a| backup(&a.successors, values)).collect();
            let best = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (0..q.len()).filter(|&a| q[a] >= best - TIE_TOLERANCE).collect()
        })
        .collect();

    let mut chosen: Vec<Option<usize>> = vec![None; n];
    let mut decided: Vec<bool> = (0..n).map(|x| p.is_terminal(x)).collect();
    loop {
        let mut progress = false;
        for x in 0..n {
            if decided[x] {
                continue;
            }
            if let Some(&a) = optimal[x]
                .iter()
                .find(|&&a| p.actions(x)[a].successors.iter().any(|&(t, q)| q > 0.0 && decided[t]))
            {
                chosen[x] = Some(a);
                decided[x] = true;
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    let choice = (0..n)
        .map(|x| {
            if p.is_terminal(x) {
                Vec::new()
            } else {
                vec![(chosen[x].unwrap_or(optimal[x][0]), 1.0)]
            }
        })
        .collect();
    MemorylessPolicy::new(choice)
}

/// Componentwise Pareto dominance with tolerance `eps`.
pub fn pareto_dominates(v1: &ValueVector, v2: &ValueVector, eps: f64) -> Result<Dominance> {
    if v1.len() != v2.len() {
        return Err(Error::DimensionMismatch {
            expected: v1.len(),
            got: v2.len(),
        });
    }
    let ge = v1.0.iter().zip(&v2.0).all(|(a, b)| *a >= b - eps);
    let le = v1.0.iter().zip(&v2.0).all(|(a, b)| *a <= b + eps);
    let gt = v1.0.iter().zip(&v2.0).any(|(a, b)| *a > b + eps);
    let lt = v1.0.iter().zip(&v2.0).any(|(a, b)| *a < b - eps);
    Ok(if ge && gt {
        Dominance::Dominates
    } else if le && lt {
        Dominance::Dominated
    } else {
        Dominance::Neither
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightScheme {
    /// Uniform on the simplex, i.e. Dirichlet(1, …, 1).
    #[default]
    Dirichlet,
    /// Every vector is `[1/N, …, 1/N]`.
    Uniform,
}

/// `count` weight vectors of dimension `dim`, reproducible for a fixed seed.
/// Dirichlet samples are strictly positive.
pub fn sample_weights(count: usize, dim: usize, seed: u64, scheme: WeightScheme) -> Vec<WeightVector> {
    match scheme {
        WeightScheme::Uniform => vec![WeightVector::uniform(dim); count],
        WeightScheme::Dirichlet => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let g: Vec<f64> = (0..dim)
                        .map(|_| loop {
                            let x: f64 = Exp1.sample(&mut rng);
                            if x > 0.0 {
                                break x;
                            }
                        })
                        .collect();
                    let s: f64 = g.iter().sum();
                    WeightVector(g.into_iter().map(|x| x / s).collect())
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParetoFront {
    /// Distinct solutions in order of first appearance.
    pub solutions: Vec<MomdpSolution>,
    /// Weight vectors as given.
    pub weights: Vec<WeightVector>,
    /// For every weight, the index of its solution in `solutions`.
    pub provenance: Vec<usize>,
    /// `(dominated, dominating)` pairs among `solutions`; empty when the set
    /// is mutually nondominated.
    pub dominated_pairs: Vec<(usize, usize)>,
}

impl ParetoFront {
    pub fn is_mutually_nondominated(&self) -> bool {
        self.dominated_pairs.is_empty()
    }

    /// Solution computed for the weight at `index`.
    pub fn for_weight(&self, index: usize) -> &MomdpSolution {
        &self.solutions[self.provenance[index]]
    }

    /// First weight index that produced the same vector, if not itself.
    pub fn duplicate_of(&self, index: usize) -> Option<usize> {
        let first = self.provenance.iter().position(|&u| u == self.provenance[index])?;
        (first != index).then_some(first)
    }
}

/// One scalarized solve per weight (in parallel), deduplicated by value
/// vector within `eps`, then checked for mutual nondominance.
pub fn pareto_front(
    momdp: &Momdp,
    weights: &[WeightVector],
    opts: &SolverOptions,
    eps: f64,
) -> Result<ParetoFront> {
    for w in weights {
        if !w.is_strictly_positive() {
            log::warn!(
                "weight {:?} has zero entries; its solution is only weakly Pareto optimal",
                w.as_slice()
            );
        }
    }
    let solved: Vec<MomdpSolution> = weights
        .par_iter()
        .map(|w| solve_scalarized(momdp, w, opts))
        .collect::<Result<_>>()?;

    let mut solutions: Vec<MomdpSolution> = Vec::new();
    let mut provenance = Vec::with_capacity(solved.len());
    for sol in solved {
        match solutions
            .iter()
            .position(|u| u.value.max_abs_diff(&sol.value) <= eps)
        {
            Some(u) => provenance.push(u),
            None => {
                provenance.push(solutions.len());
                solutions.push(sol);
            }
        }
    }

    let mut dominated_pairs = Vec::new();
    for i in 0..solutions.len() {
        for j in 0..solutions.len() {
            if i != j && pareto_dominates(&solutions[j].value, &solutions[i].value, eps)? == Dominance::Dominates
            {
                dominated_pairs.push((i, j));
            }
        }
    }
    Ok(ParetoFront {
        solutions,
        weights: weights.to_vec(),
        provenance,
        dominated_pairs,
    })
}
