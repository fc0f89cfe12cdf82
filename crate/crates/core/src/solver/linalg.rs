//! Thin wrappers around the direct solvers plus graph helpers for the
//! stationary analysis.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};

/// Solves `A x = b` for sparse `A` given as (row, col, value) entries.
/// Duplicate positions are summed before assembly.
pub fn solve_sparse(n: usize, entries: &[(usize, usize, f64)], rhs: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(rhs.len(), n);
    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &(r, c, v) in entries {
        *merged.entry((c, r)).or_insert(0.0) += v;
    }
    let triplets: Vec<Triplet<usize, usize, f64>> = merged
        .into_iter()
        .map(|((c, r), v)| Triplet { row: r, col: c, val: v })
        .collect();

    // The factorization panics on an exactly zero pivot instead of returning
    // an error; treat that as a singular system.
    let solve = catch_unwind(AssertUnwindSafe(|| -> Result<Vec<f64>> {
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::SingularSystem(format!("assembly failed: {e:?}")))?;
        let symbolic = SymbolicLu::try_new(mat.symbolic())
            .map_err(|e| Error::SingularSystem(format!("symbolic factorization failed: {e:?}")))?;
        let lu = Lu::try_new_with_symbolic(symbolic, mat.as_ref())
            .map_err(|e| Error::SingularSystem(format!("factorization failed: {e:?}")))?;
        let b = faer::Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        let x = lu.solve(&b);
        Ok((0..n).map(|i| x[(i, 0)]).collect())
    }));
    match solve {
        Ok(result) => result,
        Err(_) => Err(Error::SingularSystem("zero pivot during factorization".into())),
    }
}

/// Dense partial-pivoting solve of `A x = b`; used as an independent check
/// against the sparse path on small systems.
pub fn solve_dense(n: usize, entries: &[(usize, usize, f64)], rhs: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(rhs.len(), n);
    let mut a = faer::Mat::<f64>::zeros(n, n);
    for &(r, c, v) in entries {
        a[(r, c)] += v;
    }
    let lu = faer::linalg::solvers::PartialPivLu::new(a.as_ref());
    let b = faer::Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
    let x = lu.solve(&b);
    let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem("dense solve produced non-finite values".into()));
    }
    Ok(out)
}

/// Strongly connected components of the directed graph given by sparse rows,
/// via iterative Kosaraju. Returns one component id per node.
pub fn strongly_connected_components(rows: &[&[(u32, f64)]]) -> Vec<u32> {
    let n = rows.len();
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    // First pass: forward DFS finish order.
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        stack.push((root, 0));
        while let Some(&mut (node, ref mut edge)) = stack.last_mut() {
            if *edge < rows[node].len() {
                let next = rows[node][*edge].0 as usize;
                *edge += 1;
                if !visited[next] {
                    visited[next] = true;
                    stack.push((next, 0));
                }
            } else {
                order.push(node);
                stack.pop();
            }
        }
    }
    // Reverse graph.
    let mut rev_heads = vec![0usize; n + 1];
    for row in rows {
        for &(dst, _) in *row {
            rev_heads[dst as usize + 1] += 1;
        }
    }
    for i in 0..n {
        rev_heads[i + 1] += rev_heads[i];
    }
    let mut rev_edges = vec![0u32; rev_heads[n]];
    let mut cursor = rev_heads.clone();
    for (src, row) in rows.iter().enumerate() {
        for &(dst, _) in *row {
            rev_edges[cursor[dst as usize]] = src as u32;
            cursor[dst as usize] += 1;
        }
    }
    // Second pass: reverse DFS in decreasing finish order labels components.
    let mut component = vec![u32::MAX; n];
    let mut label = 0u32;
    let mut dfs = Vec::new();
    for &root in order.iter().rev() {
        if component[root] != u32::MAX {
            continue;
        }
        component[root] = label;
        dfs.push(root);
        while let Some(node) = dfs.pop() {
            for e in rev_heads[node]..rev_heads[node + 1] {
                let prev = rev_edges[e] as usize;
                if component[prev] == u32::MAX {
                    component[prev] = label;
                    dfs.push(prev);
                }
            }
        }
        label += 1;
    }
    component
}

/// Component ids that have no edge into another component: the recurrent
/// classes of the chain.
pub fn closed_components(rows: &[&[(u32, f64)]], component: &[u32]) -> Vec<u32> {
    let count = component.iter().map(|&c| c + 1).max().unwrap_or(0) as usize;
    let mut closed = vec![true; count];
    for (src, row) in rows.iter().enumerate() {
        for &(dst, _) in *row {
            if component[src] != component[dst as usize] {
                closed[component[src] as usize] = false;
            }
        }
    }
    (0..count as u32).filter(|&c| closed[c as usize]).collect()
}

/// Indices reachable from `start` through positive-probability transitions,
/// ascending.
pub fn reachable_set(rows: &[&[(u32, f64)]], start: usize) -> Vec<usize> {
    let mut seen = vec![false; rows.len()];
    let mut queue = vec![start];
    seen[start] = true;
    while let Some(node) = queue.pop() {
        for &(dst, _) in rows[node] {
            if !seen[dst as usize] {
                seen[dst as usize] = true;
                queue.push(dst as usize);
            }
        }
    }
    (0..rows.len()).filter(|&i| seen[i]).collect()
}
