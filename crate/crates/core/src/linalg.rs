//! Linear solves for absorbing Markov chains.
//!
//! Systems have the form `x = Q x + B`, where `Q` is the substochastic
//! transient-to-transient block of a chain and `B` holds one column per
//! quantity of interest. The transient graph is split into strongly
//! connected components which are solved successors-first: singletons in
//! closed form, moderate components by dense LU, and oversized components
//! by Gauss–Seidel sweeps.

use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};

/// Largest component solved by dense factorization.
const DENSE_LIMIT: usize = 2000;
const SWEEP_TOLERANCE: f64 = 1e-13;
const MAX_SWEEPS: usize = 1_000_000;

/// Strongly connected components, each listed after every component it can
/// reach (reverse topological order).
pub(crate) fn components<I>(n: usize, edges: I) -> Vec<Vec<usize>>
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    for _ in 0..n {
        g.add_node(());
    }
    for (a, b) in edges {
        g.add_edge(NodeIndex::new(a), NodeIndex::new(b), ());
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|c| c.into_iter().map(NodeIndex::index).collect())
        .collect()
}

/// Solves `x = Q x + B` where `rows[i]` lists `(j, Q[i][j])` and `rhs` is
/// row-major with `cols` columns. Returns `x` in the same layout.
pub(crate) fn solve_absorbing(rows: &[Vec<(usize, f64)>], rhs: &[f64], cols: usize) -> Result<Vec<f64>> {
    let n = rows.len();
    debug_assert_eq!(rhs.len(), n * cols);
    let sccs = components(
        n,
        rows.iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&(j, _)| (i, j))),
    );
    let mut x = vec![0.0; n * cols];
    let mut comp_of = vec![usize::MAX; n];
    let mut local = vec![usize::MAX; n];
    for (c, members) in sccs.iter().enumerate() {
        for (k, &s) in members.iter().enumerate() {
            comp_of[s] = c;
            local[s] = k;
        }
    }

    for (c, members) in sccs.iter().enumerate() {
        let m = members.len();
        // b = rhs + Q_out · x_out
        let mut b = vec![0.0; m * cols];
        for (k, &s) in members.iter().enumerate() {
            b[k * cols..(k + 1) * cols].copy_from_slice(&rhs[s * cols..(s + 1) * cols]);
            for &(j, p) in &rows[s] {
                if comp_of[j] != c {
                    for col in 0..cols {
                        b[k * cols + col] += p * x[j * cols + col];
                    }
                }
            }
        }

        if m == 1 {
            let s = members[0];
            let self_p: f64 = rows[s].iter().filter(|&&(j, _)| j == s).map(|&(_, p)| p).sum();
            let denom = 1.0 - self_p;
            if denom <= 1e-14 {
                return Err(Error::Singular(format!("state {s} is absorbing but not terminal")));
            }
            for col in 0..cols {
                x[s * cols + col] = b[col] / denom;
            }
        } else if m <= DENSE_LIMIT {
            let mut a = DMatrix::<f64>::identity(m, m);
            for (k, &s) in members.iter().enumerate() {
                for &(j, p) in &rows[s] {
                    if comp_of[j] == c {
                        a[(k, local[j])] -= p;
                    }
                }
            }
            let lu = a.lu();
            for col in 0..cols {
                let rhs_col = DVector::from_iterator(m, (0..m).map(|k| b[k * cols + col]));
                let sol = lu
                    .solve(&rhs_col)
                    .ok_or_else(|| Error::Singular(format!("component of {m} states is closed")))?;
                for (k, &s) in members.iter().enumerate() {
                    x[s * cols + col] = sol[k];
                }
            }
        } else {
            gauss_seidel(rows, members, &comp_of, c, &b, cols, &mut x)?;
        }
    }
    Ok(x)
}

fn gauss_seidel(
    rows: &[Vec<(usize, f64)>],
    members: &[usize],
    comp_of: &[usize],
    c: usize,
    b: &[f64],
    cols: usize,
    x: &mut [f64],
) -> Result<()> {
    let mut diag = vec![1.0; members.len()];
    for (k, &s) in members.iter().enumerate() {
        for &(j, p) in &rows[s] {
            if j == s {
                diag[k] -= p;
            }
        }
        if diag[k] <= 1e-14 {
            return Err(Error::Singular(format!("state {s} is absorbing but not terminal")));
        }
    }
    let mut change = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        change = 0.0;
        for (k, &s) in members.iter().enumerate() {
            for col in 0..cols {
                let mut acc = b[k * cols + col];
                for &(j, p) in &rows[s] {
                    if j != s && comp_of[j] == c {
                        acc += p * x[j * cols + col];
                    }
                }
                let new = acc / diag[k];
                change = f64::max(change, (new - x[s * cols + col]).abs());
                x[s * cols + col] = new;
            }
        }
        if change < SWEEP_TOLERANCE {
            return Ok(());
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_SWEEPS,
        residual: change,
    })
}

/// Max-norm residual of `x - Q x - B`.
pub(crate) fn residual(rows: &[Vec<(usize, f64)>], rhs: &[f64], cols: usize, x: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, r) in rows.iter().enumerate() {
        for col in 0..cols {
            let mut v = x[i * cols + col] - rhs[i * cols + col];
            for &(j, p) in r {
                v -= p * x[j * cols + col];
            }
            worst = worst.max(v.abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_are_successors_first() {
        // 0 -> 1 <-> 2 -> 3
        let c = components(4, [(0, 1), (1, 2), (2, 1), (2, 3)]);
        let pos = |s: usize| c.iter().position(|m| m.contains(&s)).unwrap();
        assert!(pos(3) < pos(1));
        assert!(pos(1) < pos(0));
        assert_eq!(pos(1), pos(2));
    }

    #[test]
    fn cyclic_chain_matches_hand_solution() {
        // x0 = 0.5 x1 + 0.5 ; x1 = 0.5 x0  =>  x0 = 2/3, x1 = 1/3
        let rows = vec![vec![(1, 0.5)], vec![(0, 0.5)]];
        let x = solve_absorbing(&rows, &[0.5, 0.0], 1).unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((x[1] - 1.0 / 3.0).abs() < 1e-14);
        assert!(residual(&rows, &[0.5, 0.0], 1, &x) < 1e-14);
    }

    #[test]
    fn closed_loop_is_singular() {
        let rows = vec![vec![(0, 1.0)]];
        assert!(solve_absorbing(&rows, &[0.0], 1).is_err());
        let rows = vec![vec![(1, 1.0)], vec![(0, 1.0)]];
        assert!(solve_absorbing(&rows, &[0.0, 0.0], 1).is_err());
    }

    #[test]
    fn gauss_seidel_path_agrees_with_dense() {
        // Ring of DENSE_LIMIT + 10 states leaking 1% per step.
        let n = DENSE_LIMIT + 10;
        let rows: Vec<_> = (0..n).map(|i| vec![((i + 1) % n, 0.99)]).collect();
        let mut rhs = vec![0.0; n];
        rhs[0] = 0.01;
        let x = solve_absorbing(&rows, &rhs, 1).unwrap();
        assert!(residual(&rows, &rhs, 1, &x) < 1e-11);
        // x_0 = 0.01 / (1 - 0.99^n)
        let expect = 0.01 / (1.0 - 0.99f64.powi(n as i32));
        assert!((x[0] - expect).abs() < 1e-10);
    }
}
