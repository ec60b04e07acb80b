//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use prefplan::mdp::{Tlmdp, TransitionSystem};
use prefplan::pdfa::Pdfa;
use prefplan::product::ProductMdp;

/// Reference garden solutions: weights, value vectors and outcome
/// probabilities over p1..p4, rounded to two decimals.
pub const REFERENCE_ROWS: [([f64; 4], [f64; 4], [f64; 4]); 10] = [
    ([0.50, 0.17, 0.21, 0.12], [0.24, 0.25, 0.98, 1.0], [0.24, 0.01, 0.74, 0.01]),
    ([0.08, 0.46, 0.38, 0.08], [0.24, 0.42, 0.80, 1.0], [0.24, 0.18, 0.56, 0.02]),
    ([0.73, 0.13, 0.13, 0.01], [0.24, 0.32, 0.91, 1.0], [0.24, 0.08, 0.67, 0.01]),
    ([0.67, 0.24, 0.02, 0.07], [0.19, 0.63, 0.51, 1.0], [0.19, 0.44, 0.32, 0.05]),
    ([0.16, 0.11, 0.04, 0.69], [0.15, 0.71, 0.42, 1.0], [0.15, 0.56, 0.27, 0.02]),
    ([0.26, 0.16, 0.03, 0.55], [0.15, 0.72, 0.40, 1.0], [0.15, 0.57, 0.25, 0.03]),
    ([0.24, 0.46, 0.26, 0.04], [0.17, 0.64, 0.53, 1.0], [0.17, 0.47, 0.36, 0.00]),
    ([0.22, 0.28, 0.13, 0.37], [0.15, 0.73, 0.40, 1.0], [0.15, 0.58, 0.25, 0.02]),
    ([0.07, 0.65, 0.04, 0.25], [0.00, 1.00, 0.00, 1.0], [0.00, 1.00, 0.00, 0.00]),
    ([0.18, 0.08, 0.01, 0.73], [0.18, 0.63, 0.51, 1.0], [0.18, 0.45, 0.33, 0.04]),
];

/// Garden objectives written out by hand: `Z_1 = {p1}`, `Z_2 = {p1, p2}`,
/// `Z_3 = {p1, p3}`, `Z_4 = {p1, p2, p3, p4}`.
pub fn garden_r_by_hand() -> Vec<Vec<f64>> {
    vec![
        vec![1.0, 0.0, 0.0, 0.0],
        vec![1.0, 1.0, 0.0, 0.0],
        vec![1.0, 0.0, 1.0, 0.0],
        vec![1.0, 1.0, 1.0, 1.0],
    ]
}

pub fn mat_vec(r: &[Vec<f64>], p: &[f64]) -> Vec<f64> {
    r.iter().map(|row| row.iter().zip(p).map(|(a, b)| a * b).sum()).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Transitive closure of a class graph by repeated squaring-free BFS.
pub fn closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    (0..n)
        .map(|i| {
            let mut seen = vec![false; n];
            seen[i] = true;
            let mut q = VecDeque::from([i]);
            while let Some(u) = q.pop_front() {
                for &(a, b) in edges {
                    if a == u && !seen[b] {
                        seen[b] = true;
                        q.push_back(b);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Checks a product against its definition: successors of `(s, q)` under
/// `a` are exactly `(s', δ(q, L(s')))` with probability `P(s, a, s')`, the
/// automaton is frozen on entering the sink, the state set is exactly the
/// reachable one, and the classes and preference graph are carried over
/// from the automaton.
pub fn check_product(mdp: &Tlmdp, pdfa: &Pdfa, p: &ProductMdp) -> Result<(), String> {
    let sink = mdp.sink();
    let delta = |q: usize, s: usize| -> usize {
        if s == sink {
            return q;
        }
        let sym = mdp.label(s).expect("non-sink states are labeled");
        let k = pdfa.alphabet().iter().position(|a| a == sym).expect("label in alphabet");
        pdfa.step_index(q, k)
    };

    // Reachable pairs, computed without the product.
    let x0 = (mdp.initial(), delta(pdfa.initial(), mdp.initial()));
    let mut reach = BTreeSet::from([x0]);
    let mut queue = VecDeque::from([x0]);
    while let Some((s, q)) = queue.pop_front() {
        if s == sink {
            continue;
        }
        for a in mdp.actions(s) {
            for &(t, pr) in &a.successors {
                if pr > 0.0 && reach.insert((t, delta(q, t))) {
                    queue.push_back((t, delta(q, t)));
                }
            }
        }
    }

    let origin = p.origin().ok_or("product has no origin map")?;
    let built: BTreeSet<(usize, usize)> = origin.iter().copied().collect();
    if built.len() != origin.len() {
        return Err("duplicate product states".into());
    }
    if built != reach {
        return Err(format!("state set differs: built {} vs reachable {}", built.len(), reach.len()));
    }
    if origin[p.initial()] != x0 {
        return Err("wrong initial state".into());
    }

    for (x, &(s, q)) in origin.iter().enumerate() {
        let (sn, qn) = &p.state_names()[x];
        if sn != &mdp.states()[s] || qn != &pdfa.states()[q] {
            return Err(format!("state {x} misnamed"));
        }
        let acts = p.actions(x);
        if s == sink {
            if !acts.is_empty() {
                return Err(format!("terminal state {x} has actions"));
            }
            continue;
        }
        if acts.len() != mdp.actions(s).len() {
            return Err(format!("state {x}: action count"));
        }
        for (a, b) in mdp.actions(s).iter().zip(acts) {
            if a.name != b.name {
                return Err(format!("state {x}: action order"));
            }
            let mut want: BTreeMap<(usize, usize), f64> = BTreeMap::new();
            for &(t, pr) in &a.successors {
                if pr > 0.0 {
                    *want.entry((t, delta(q, t))).or_insert(0.0) += pr;
                }
            }
            let mut got: BTreeMap<(usize, usize), f64> = BTreeMap::new();
            for &(y, pr) in &b.successors {
                *got.entry(origin[y]).or_insert(0.0) += pr;
            }
            if want.len() != got.len()
                || want.iter().zip(&got).any(|((k1, v1), (k2, v2))| k1 != k2 || (v1 - v2).abs() > 1e-15)
            {
                return Err(format!("state {x} action {}: successors differ", a.name));
            }
        }
    }

    // Lifted preference graph: same classes, same edges, members by block.
    if p.num_classes() != pdfa.num_classes() {
        return Err("class count".into());
    }
    for (i, c) in p.classes().iter().enumerate() {
        let b = &pdfa.blocks()[i];
        if c.name != b.name {
            return Err(format!("class {i} name"));
        }
        let want: BTreeSet<usize> = origin
            .iter()
            .enumerate()
            .filter(|(_, &(s, q))| s == sink && b.states.contains(&q))
            .map(|(x, _)| x)
            .collect();
        let got: BTreeSet<usize> = c.states.iter().copied().collect();
        if want != got {
            return Err(format!("class {} members", c.name));
        }
    }
    if p.edges() != pdfa.edges() {
        return Err("preference edges".into());
    }
    let k = p.num_classes();
    let want = closure(k, pdfa.edges());
    for i in 0..k {
        for j in 0..k {
            if p.reachability().reaches(i, j) != want[i][j] {
                return Err(format!("reachability {i} -> {j}"));
            }
        }
    }
    Ok(())
}
