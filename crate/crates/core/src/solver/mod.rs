//! Discounted-cost solution of the decision process: policy iteration with
//! exact evaluation, value iteration as an independent route, stationary
//! analysis of the solved chain, and the weighted performance measure.

mod linalg;

use serde::{Deserialize, Serialize};

use crate::actions::cf_action;
use crate::error::{Error, Result};
use crate::model::{Action, ModelParams, PolicyClass};
use crate::space::StateSpace;
use crate::transitions::ActionTable;

pub use linalg::{solve_dense, solve_sparse};

/// Tunables for the solve pipeline. Defaults match the experiment setup:
/// policy iteration capped at 1000 rounds, direct linear solves up to ten
/// thousand states, iterative evaluation beyond.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub max_policy_iterations: usize,
    /// Largest state count solved by direct factorization; larger systems
    /// fall back to fixed-point evaluation.
    pub direct_solve_limit: usize,
    /// Target residual of iterative evaluation.
    pub iterative_residual: f64,
    pub iterative_cap: usize,
    /// Relative improvement a greedy switch must exceed, guarding against
    /// cycling on floating-point ties.
    pub improvement_tolerance: f64,
    pub power_iteration_tolerance: f64,
    pub power_iteration_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_policy_iterations: 1000,
            direct_solve_limit: 10_000,
            iterative_residual: 1e-10,
            iterative_cap: 200_000,
            improvement_tolerance: 1e-12,
            power_iteration_tolerance: 1e-12,
            power_iteration_cap: 500_000,
        }
    }
}

/// A policy class's admissible arms per state, as positions into the shared
/// [`ActionTable`].
#[derive(Debug, Clone)]
pub struct ClassProblem {
    pub class: PolicyClass,
    pub choices: Vec<Vec<u32>>,
}

impl ClassProblem {
    pub fn new(space: &StateSpace, params: &ModelParams, table: &ActionTable, class: PolicyClass) -> Self {
        Self { class, choices: table.class_choices(space, params, class) }
    }
}

/// How the stationary distribution was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StationaryMethod {
    /// Balance equations solved over the full space.
    DirectFull,
    /// Balance equations solved over the set reachable from the canonical
    /// start (the full-space system is singular when the chain decomposes).
    DirectReachable,
    /// Limiting distribution from the canonical start by power iteration.
    PowerIteration,
}

#[derive(Debug, Clone)]
pub struct StationaryOutcome {
    pub distribution: Vec<f64>,
    pub method: StationaryMethod,
    /// Final `max_j |(pi P)_j - pi_j|`.
    pub residual: f64,
}

/// A solved policy: the chosen action per state, the value function, the
/// stationary weights and the summary performance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicySolution {
    pub class: PolicyClass,
    pub policy: Vec<Action>,
    pub values: Vec<f64>,
    pub stationary: Vec<f64>,
    /// Stationary-weighted average of the value function.
    pub upsilon: f64,
    pub iterations: usize,
    pub converged: bool,
    pub bellman_residual: f64,
    pub stationary_residual: f64,
    pub stationary_method: StationaryMethod,
}

// ---------------------------------------------------------------------------
// Policy evaluation
// ---------------------------------------------------------------------------

/// Expected total discounted cost of a fixed chain: solves
/// `V = c + discount * P V` directly for small systems, by damped
/// fixed-point sweeps beyond `direct_solve_limit`.
pub fn evaluate_chain(
    rows: &[&[(u32, f64)]],
    costs: &[f64],
    discount: f64,
    opts: &SolveOptions,
) -> Result<Vec<f64>> {
    let n = rows.len();
    assert_eq!(costs.len(), n);
    if n <= opts.direct_solve_limit {
        let mut entries = Vec::with_capacity(n * 8);
        for (s, row) in rows.iter().enumerate() {
            entries.push((s, s, 1.0));
            for &(d, p) in *row {
                entries.push((s, d as usize, -discount * p));
            }
        }
        let values = solve_sparse(n, &entries, costs)?;
        let residual = evaluation_residual(rows, costs, discount, &values);
        let scale = 1.0 + values.iter().cloned().fold(0.0, f64::max);
        if residual > 1e-9 * scale {
            return Err(Error::SingularSystem(format!(
                "direct evaluation residual {residual:.3e} exceeds tolerance"
            )));
        }
        Ok(values)
    } else {
        evaluate_chain_iterative(rows, costs, discount, opts)
    }
}

fn evaluate_chain_iterative(
    rows: &[&[(u32, f64)]],
    costs: &[f64],
    discount: f64,
    opts: &SolveOptions,
) -> Result<Vec<f64>> {
    let n = rows.len();
    let mut values = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for sweep in 0..opts.iterative_cap {
        // Gauss-Seidel sweep with the self-loop solved implicitly.
        for s in 0..n {
            let mut acc = costs[s];
            let mut self_prob = 0.0;
            for &(d, p) in rows[s] {
                if d as usize == s {
                    self_prob = p;
                } else {
                    acc += discount * p * values[d as usize];
                }
            }
            values[s] = acc / (1.0 - discount * self_prob);
        }
        if sweep % 4 == 3 {
            residual = evaluation_residual(rows, costs, discount, &values);
            if residual < opts.iterative_residual {
                return Ok(values);
            }
        }
    }
    Err(Error::NonConvergence {
        context: "iterative policy evaluation",
        iterations: opts.iterative_cap,
        residual,
    })
}

/// `max_s |V(s) - c(s) - discount * (P V)(s)|`.
pub fn evaluation_residual(rows: &[&[(u32, f64)]], costs: &[f64], discount: f64, values: &[f64]) -> f64 {
    rows.iter()
        .enumerate()
        .map(|(s, row)| {
            let expect: f64 = row.iter().map(|&(d, p)| p * values[d as usize]).sum();
            (values[s] - costs[s] - discount * expect).abs()
        })
        .fold(0.0, f64::max)
}

/// Direct dense evaluation of a fixed chain; an independent route kept for
/// cross-checking the sparse path.
pub fn evaluate_chain_dense(rows: &[&[(u32, f64)]], costs: &[f64], discount: f64) -> Result<Vec<f64>> {
    let n = rows.len();
    let mut entries = Vec::with_capacity(n * 8);
    for (s, row) in rows.iter().enumerate() {
        entries.push((s, s, 1.0));
        for &(d, p) in *row {
            entries.push((s, d as usize, -discount * p));
        }
    }
    solve_dense(n, &entries, costs)
}

/// Evaluates one policy of a class problem, `policy[s]` being an arm index
/// into `table.arms[s]`.
pub fn evaluate_policy(
    table: &ActionTable,
    policy: &[u32],
    discount: f64,
    opts: &SolveOptions,
) -> Result<Vec<f64>> {
    let (rows, costs) = policy_chain(table, policy);
    evaluate_chain(&rows, &costs, discount, opts)
}

fn policy_chain<'t>(table: &'t ActionTable, policy: &[u32]) -> (Vec<&'t [(u32, f64)]>, Vec<f64>) {
    let rows: Vec<&[(u32, f64)]> = policy
        .iter()
        .enumerate()
        .map(|(s, &arm)| table.arms[s][arm as usize].row.entries.as_slice())
        .collect();
    let costs: Vec<f64> = policy
        .iter()
        .enumerate()
        .map(|(s, &arm)| table.arms[s][arm as usize].cost)
        .collect();
    (rows, costs)
}

// ---------------------------------------------------------------------------
// Value iteration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ValueIterationOutcome {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub last_delta: f64,
}

pub const VALUE_ITERATION_CAP: usize = 100_000;

/// Iterates the minimizing Bellman operator from zero until the sup-norm
/// update is below `eps * (1 - discount) / (2 * discount)`, which bounds the
/// sup-norm distance to the fixed point by `eps`.
pub fn value_iteration(
    table: &ActionTable,
    problem: &ClassProblem,
    discount: f64,
    eps: f64,
    cap: usize,
) -> Result<ValueIterationOutcome> {
    let n = problem.choices.len();
    let stop = eps * (1.0 - discount) / (2.0 * discount);
    let mut values = vec![0.0; n];
    let mut next = vec![0.0; n];
    for iteration in 1..=cap {
        let mut delta: f64 = 0.0;
        for s in 0..n {
            let mut best = f64::INFINITY;
            for &choice in &problem.choices[s] {
                let arm = &table.arms[s][choice as usize];
                let expect: f64 =
                    arm.row.entries.iter().map(|&(d, p)| p * values[d as usize]).sum();
                let q = arm.cost + discount * expect;
                if q < best {
                    best = q;
                }
            }
            next[s] = best;
            delta = delta.max((next[s] - values[s]).abs());
        }
        std::mem::swap(&mut values, &mut next);
        if delta < stop {
            return Ok(ValueIterationOutcome { values, iterations: iteration, converged: true, last_delta: delta });
        }
    }
    Err(Error::NonConvergence { context: "value iteration", iterations: cap, residual: f64::NAN })
}

// ---------------------------------------------------------------------------
// Policy iteration
// ---------------------------------------------------------------------------

struct IterationOutcome {
    policy: Vec<u32>,
    values: Vec<f64>,
    iterations: usize,
    converged: bool,
    bellman_residual: f64,
}

/// Starting policy: the closest-first action in every state (admissible in
/// every class).
fn initial_policy(
    space: &StateSpace,
    params: &ModelParams,
    table: &ActionTable,
    problem: &ClassProblem,
) -> Vec<u32> {
    let phases = params.phases();
    (0..space.len())
        .map(|s| {
            let wanted = cf_action(space.state(s), &params.network, phases);
            *problem.choices[s]
                .iter()
                .find(|&&c| table.arms[s][c as usize].action == wanted)
                .expect("closest-first action is admissible in every class")
        })
        .collect()
}

fn policy_iteration_core(
    table: &ActionTable,
    problem: &ClassProblem,
    discount: f64,
    opts: &SolveOptions,
    mut policy: Vec<u32>,
) -> Result<IterationOutcome> {
    let n = policy.len();
    let mut values = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_policy_iterations {
        iterations += 1;
        values = evaluate_policy(table, &policy, discount, opts)?;
        let mut changed = false;
        for s in 0..n {
            let mut best_q = f64::INFINITY;
            let mut best_choice = policy[s];
            let mut current_q = f64::INFINITY;
            for &choice in &problem.choices[s] {
                let arm = &table.arms[s][choice as usize];
                let expect: f64 =
                    arm.row.entries.iter().map(|&(d, p)| p * values[d as usize]).sum();
                let q = arm.cost + discount * expect;
                if q < best_q {
                    best_q = q;
                    best_choice = choice;
                }
                if choice == policy[s] {
                    current_q = q;
                }
            }
            let margin = opts.improvement_tolerance * (1.0 + current_q.abs());
            if best_choice != policy[s] && best_q < current_q - margin {
                policy[s] = best_choice;
                changed = true;
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }
    let bellman_residual = bellman_residual_of(table, problem, discount, &values);
    Ok(IterationOutcome { policy, values, iterations, converged, bellman_residual })
}

/// `max_s |V(s) - min_a Q(s, a, V)|` over the class's admissible actions.
pub fn bellman_residual_of(
    table: &ActionTable,
    problem: &ClassProblem,
    discount: f64,
    values: &[f64],
) -> f64 {
    problem
        .choices
        .iter()
        .enumerate()
        .map(|(s, choices)| {
            let best = choices
                .iter()
                .map(|&choice| {
                    let arm = &table.arms[s][choice as usize];
                    let expect: f64 =
                        arm.row.entries.iter().map(|&(d, p)| p * values[d as usize]).sum();
                    arm.cost + discount * expect
                })
                .fold(f64::INFINITY, f64::min);
            (values[s] - best).abs()
        })
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Stationary distribution
// ---------------------------------------------------------------------------

/// Stationary distribution of a fixed chain. Direct balance-equation solves
/// are used whenever the chain's recurrence structure admits them: over the
/// full space when there is a single recurrent class, over the set reachable
/// from `start` when the chain decomposes. Power iteration from `start` is
/// the last resort and the only route above the direct-solve limit.
pub fn stationary_of_rows(
    rows: &[&[(u32, f64)]],
    start: usize,
    opts: &SolveOptions,
) -> Result<StationaryOutcome> {
    let n = rows.len();
    if n <= opts.direct_solve_limit {
        let components = linalg::strongly_connected_components(rows);
        let closed = linalg::closed_components(rows, &components);
        if closed.len() == 1 {
            if let Some(outcome) = try_direct_stationary(rows, None) {
                return Ok(outcome);
            }
        } else {
            let reachable = linalg::reachable_set(rows, start);
            let reachable_closed: std::collections::BTreeSet<u32> = closed
                .iter()
                .copied()
                .filter(|&c| reachable.iter().any(|&s| components[s] == c))
                .collect();
            if reachable_closed.len() == 1 {
                if let Some(outcome) = try_direct_stationary(rows, Some(&reachable)) {
                    return Ok(outcome);
                }
            }
        }
    }
    power_iteration(rows, start, opts)
}

/// Solves `pi P = pi, sum pi = 1`, optionally restricted to a closed subset,
/// and verifies the result; `None` means the caller should fall back.
fn try_direct_stationary(rows: &[&[(u32, f64)]], subset: Option<&[usize]>) -> Option<StationaryOutcome> {
    let n = rows.len();
    let (ids, back): (Vec<usize>, Vec<usize>) = match subset {
        Some(set) => {
            let mut back = vec![usize::MAX; n];
            for (k, &s) in set.iter().enumerate() {
                back[s] = k;
            }
            (set.to_vec(), back)
        }
        None => ((0..n).collect(), (0..n).collect()),
    };
    let m = ids.len();
    let normalization_row = m - 1;
    let mut entries = Vec::with_capacity(m * 8);
    for (k, &s) in ids.iter().enumerate() {
        for &(d, p) in rows[s] {
            let dk = back[d as usize];
            debug_assert_ne!(dk, usize::MAX, "restriction set must be closed");
            if dk != normalization_row {
                entries.push((dk, k, p));
            }
        }
        if k != normalization_row {
            entries.push((k, k, -1.0));
        }
        entries.push((normalization_row, k, 1.0));
    }
    let mut rhs = vec![0.0; m];
    rhs[normalization_row] = 1.0;
    let solved = solve_sparse(m, &entries, &rhs).ok()?;

    let mut distribution = vec![0.0; n];
    for (k, &s) in ids.iter().enumerate() {
        distribution[s] = solved[k];
    }
    finish_stationary(rows, distribution, match subset {
        Some(_) => StationaryMethod::DirectReachable,
        None => StationaryMethod::DirectFull,
    })
}

fn finish_stationary(
    rows: &[&[(u32, f64)]],
    mut distribution: Vec<f64>,
    method: StationaryMethod,
) -> Option<StationaryOutcome> {
    let total: f64 = distribution.iter().sum();
    let min = distribution.iter().cloned().fold(f64::INFINITY, f64::min);
    if !total.is_finite() || (total - 1.0).abs() > 1e-10 || min < -1e-12 {
        return None;
    }
    for p in &mut distribution {
        if *p < 0.0 {
            *p = 0.0;
        }
        *p /= total;
    }
    let residual = stationary_residual(rows, &distribution);
    if residual > 1e-10 {
        return None;
    }
    Some(StationaryOutcome { distribution, method, residual })
}

/// `max_j |(pi P)_j - pi_j|`.
pub fn stationary_residual(rows: &[&[(u32, f64)]], distribution: &[f64]) -> f64 {
    let mut image = vec![0.0; distribution.len()];
    for (s, row) in rows.iter().enumerate() {
        let mass = distribution[s];
        if mass != 0.0 {
            for &(d, p) in *row {
                image[d as usize] += mass * p;
            }
        }
    }
    image
        .iter()
        .zip(distribution)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn power_iteration(rows: &[&[(u32, f64)]], start: usize, opts: &SolveOptions) -> Result<StationaryOutcome> {
    let n = rows.len();
    let mut current = vec![0.0; n];
    current[start] = 1.0;
    let mut next = vec![0.0; n];
    let mut delta = f64::INFINITY;
    for _ in 0..opts.power_iteration_cap {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (s, row) in rows.iter().enumerate() {
            let mass = current[s];
            if mass != 0.0 {
                for &(d, p) in *row {
                    next[d as usize] += mass * p;
                }
            }
        }
        delta = current.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut current, &mut next);
        if delta < opts.power_iteration_tolerance {
            let outcome = finish_stationary(rows, current, StationaryMethod::PowerIteration)
                .ok_or(Error::SingularSystem("power iteration limit failed verification".into()))?;
            return Ok(outcome);
        }
    }
    Err(Error::NonConvergence {
        context: "stationary power iteration",
        iterations: opts.power_iteration_cap,
        residual: delta,
    })
}

// ---------------------------------------------------------------------------
// Full class solve
// ---------------------------------------------------------------------------

/// Stationary-weighted average of the value function.
pub fn performance(values: &[f64], stationary: &[f64]) -> f64 {
    values.iter().zip(stationary).map(|(v, p)| v * p).sum()
}

/// Relative improvement over a baseline performance, in percent. Undefined
/// when the baseline is zero.
pub fn improvement_pct(baseline_upsilon: f64, upsilon: f64) -> Option<f64> {
    (baseline_upsilon != 0.0).then(|| (baseline_upsilon - upsilon) / baseline_upsilon * 100.0)
}

/// Solves one policy class end to end against a shared action table.
pub fn solve_with_table(
    space: &StateSpace,
    params: &ModelParams,
    table: &ActionTable,
    class: PolicyClass,
    opts: &SolveOptions,
) -> Result<PolicySolution> {
    assert!(space.matches(params), "state space was enumerated for different dimensions");
    let problem = ClassProblem::new(space, params, table, class);
    let start = initial_policy(space, params, table, &problem);
    let outcome = policy_iteration_core(table, &problem, params.discount, opts, start)?;

    let (rows, _) = policy_chain(table, &outcome.policy);
    let stationary = stationary_of_rows(&rows, space.canonical_start(), opts)?;
    let upsilon = performance(&outcome.values, &stationary.distribution);

    Ok(PolicySolution {
        class,
        policy: outcome
            .policy
            .iter()
            .enumerate()
            .map(|(s, &arm)| table.arms[s][arm as usize].action)
            .collect(),
        values: outcome.values,
        stationary: stationary.distribution,
        upsilon,
        iterations: outcome.iterations,
        converged: outcome.converged,
        bellman_residual: outcome.bellman_residual,
        stationary_residual: stationary.residual,
        stationary_method: stationary.method,
    })
}

/// Builds the action table once and solves every requested class on it.
pub fn solve_classes(
    space: &StateSpace,
    params: &ModelParams,
    classes: &[PolicyClass],
    opts: &SolveOptions,
) -> Result<Vec<PolicySolution>> {
    let table = ActionTable::build(space, params);
    classes.iter().map(|&class| solve_with_table(space, params, &table, class, opts)).collect()
}

/// Convenience single-class solve.
pub fn solve_class(
    space: &StateSpace,
    params: &ModelParams,
    class: PolicyClass,
    opts: &SolveOptions,
) -> Result<PolicySolution> {
    let table = ActionTable::build(space, params);
    solve_with_table(space, params, &table, class, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn self_loop_geometric_series() {
        let rows: Vec<Vec<(u32, f64)>> = vec![vec![(0, 1.0)]];
        let refs: Vec<&[(u32, f64)]> = rows.iter().map(|r| r.as_slice()).collect();
        let v = evaluate_chain(&refs, &[1.0], 0.95, &opts()).unwrap();
        assert!((v[0] - 20.0).abs() < 1e-10);
    }

    #[test]
    fn zero_costs_evaluate_to_zero() {
        let rows: Vec<Vec<(u32, f64)>> = vec![vec![(1, 1.0)], vec![(0, 1.0)]];
        let refs: Vec<&[(u32, f64)]> = rows.iter().map(|r| r.as_slice()).collect();
        let v = evaluate_chain(&refs, &[0.0, 0.0], 0.95, &opts()).unwrap();
        assert_eq!(v, vec![0.0, 0.0]);
    }

    #[test]
    fn two_state_cycle_solves_by_hand() {
        // V1 = 1 + 0.5 V2, V2 = 0 + 0.5 V1  =>  V = (4/3, 2/3).
        let rows: Vec<Vec<(u32, f64)>> = vec![vec![(1, 1.0)], vec![(0, 1.0)]];
        let refs: Vec<&[(u32, f64)]> = rows.iter().map(|r| r.as_slice()).collect();
        let v = evaluate_chain(&refs, &[1.0, 0.0], 0.5, &opts()).unwrap();
        assert!((v[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((v[1] - 2.0 / 3.0).abs() < 1e-12);
        // The dense route agrees.
        let vd = evaluate_chain_dense(&refs, &[1.0, 0.0], 0.5).unwrap();
        assert!((v[0] - vd[0]).abs() < 1e-12 && (v[1] - vd[1]).abs() < 1e-12);
    }

    #[test]
    fn iterative_evaluation_matches_direct() {
        let rows: Vec<Vec<(u32, f64)>> = vec![
            vec![(0, 0.5), (1, 0.5)],
            vec![(0, 0.25), (1, 0.25), (2, 0.5)],
            vec![(2, 1.0)],
        ];
        let refs: Vec<&[(u32, f64)]> = rows.iter().map(|r| r.as_slice()).collect();
        let costs = [2.0, 1.0, 0.5];
        let direct = evaluate_chain(&refs, &costs, 0.9, &opts()).unwrap();
        let mut force_iterative = opts();
        force_iterative.direct_solve_limit = 0;
        let iterative = evaluate_chain(&refs, &costs, 0.9, &force_iterative).unwrap();
        for (a, b) in direct.iter().zip(&iterative) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn stationary_symmetric_switch() {
        let rows: Vec<Vec<(u32, f64)>> = vec![vec![(1, 1.0)], vec![(0, 1.0)]];
        let refs: Vec<&[(u32, f64)]> = rows.iter().map(|r| r.as_slice()).collect();
        let out = stationary_of_rows(&refs, 0, &opts()).unwrap();
        assert!((out.distribution[0] - 0.5).abs() < 1e-12);
        assert!((out.distribution[1] - 0.5).abs() < 1e-12);
        assert_eq!(out.method, StationaryMethod::DirectFull);
        assert!(out.residual < 1e-10);
    }

    #[test]
    fn stationary_absorbing_state() {
        let rows: Vec<Vec<(u32, f64)>> = vec![
            vec![(0, 0.5), (1, 0.25), (2, 0.25)],
            vec![(2, 1.0)],
            vec![(2, 1.0)],
        ];
        let refs: Vec<&[(u32, f64)]> = rows.iter().map(|r| r.as_slice()).collect();
        let out = stationary_of_rows(&refs, 0, &opts()).unwrap();
        assert!((out.distribution[2] - 1.0).abs() < 1e-12);
        assert_eq!(&out.distribution[..2], &[0.0, 0.0]);
    }

    #[test]
    fn stationary_decomposed_chain_uses_the_start_class() {
        // Two disjoint 2-cycles; the start selects the first.
        let rows: Vec<Vec<(u32, f64)>> = vec![
            vec![(1, 1.0)],
            vec![(0, 1.0)],
            vec![(3, 1.0)],
            vec![(2, 1.0)],
        ];
        let refs: Vec<&[(u32, f64)]> = rows.iter().map(|r| r.as_slice()).collect();
        let out = stationary_of_rows(&refs, 0, &opts()).unwrap();
        assert_eq!(out.method, StationaryMethod::DirectReachable);
        assert!((out.distribution[0] - 0.5).abs() < 1e-12);
        assert!((out.distribution[1] - 0.5).abs() < 1e-12);
        assert_eq!(&out.distribution[2..], &[0.0, 0.0]);
        let out = stationary_of_rows(&refs, 2, &opts()).unwrap();
        assert!((out.distribution[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn performance_is_a_convex_combination() {
        let values = vec![3.5, 3.5, 3.5];
        let pi = vec![0.2, 0.3, 0.5];
        assert!((performance(&values, &pi) - 3.5).abs() < 1e-15);
        assert_eq!(improvement_pct(0.0, 1.0), None);
        let delta = improvement_pct(7.19, 6.57).unwrap();
        assert!((delta - 8.623087621696801).abs() < 1e-9);
        assert_eq!(improvement_pct(4.0, 4.0), Some(0.0));
    }
}
