//! Structural invariant suite and an independent transition-row oracle.
//!
//! [`literal_transition_row`] rebuilds rows from the four per-epoch rate
//! families written out case by case (replenishment epochs, corrective
//! dispatch, preventive dispatch, relocation-only), sharing nothing with the
//! generic post-action generator in [`crate::transitions`] beyond the state
//! types. The suite cross-checks the two paths on sampled pairs and sweeps
//! the whole space for stochasticity, rate conservation and inventory
//! conservation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::actions::{admissible_actions, cf_action, immediate_cost, post_action_state, stocked_warehouses};
use crate::model::{Action, Epoch, ModelParams, PolicyClass, SystemState};
use crate::space::{closed_form_size, StateSpace};
use crate::transitions::{transition_parts, transition_row, uniformization_constant, TransitionRow};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(CheckResult { name, passed, detail });
    }
}

// ---------------------------------------------------------------------------
// Literal per-epoch-type row construction
// ---------------------------------------------------------------------------

fn with_condition(condition: &[u8], machine: usize, value: u8) -> Vec<u8> {
    let mut next = condition.to_vec();
    next[machine - 1] = value;
    next
}

fn add_unit(vector: &[u16], warehouse: i32) -> Vec<u16> {
    let mut next = vector.to_vec();
    if warehouse > 0 {
        next[warehouse as usize - 1] += 1;
    }
    next
}

fn sub_unit(vector: &[u16], warehouse: i32) -> Vec<u16> {
    let mut next = vector.to_vec();
    if warehouse > 0 {
        next[warehouse as usize - 1] -= 1;
    }
    next
}

/// Case-by-case transcription of the four transition families. Returns the
/// probability row for `(state, action)` under the uniformized chain.
///
/// The two deliberate readings baked into the model are applied here too:
/// a repair event never touches stock or pipeline, and after a preventive
/// dispatch the repaired machine carries the perfect-condition rates.
pub fn literal_transition_row(
    space: &StateSpace,
    params: &ModelParams,
    state_index: usize,
    action: Action,
) -> TransitionRow {
    let state = space.state(state_index);
    let tau = uniformization_constant(params);
    let gamma = params.replenish_rate;
    let deg = &params.degradation;
    let phases = params.phases() as u8;
    let machines = params.machine_count();
    let trigger = state.trigger;

    // (successor, rate) pairs, then a dummy of tau minus their total.
    let mut moves: Vec<(SystemState, f64)> = Vec::new();
    let mut dummy_target: SystemState;

    let failure_epoch = trigger >= 1 && state.condition_of(trigger) == 0;
    let degradation_epoch =
        trigger >= 1 && state.condition_of(trigger) > 0 && state.condition_of(trigger) < phases;

    if trigger == 0 {
        // Replenishment epoch: only doing nothing is possible.
        assert_eq!(action, Action::NOTHING);
        let (stock, pipeline, condition) = (&state.stock, &state.pipeline, &state.condition);
        for k in 1..=stock.len() {
            if pipeline[k - 1] > 0 {
                moves.push((
                    SystemState::new(add_unit(stock, k as i32), sub_unit(pipeline, k as i32), condition.clone(), 0),
                    pipeline[k - 1] as f64 * gamma,
                ));
            }
        }
        for l in 1..=machines {
            let c = condition[l - 1];
            if c > 0 {
                let alpha = deg.failure_prob(c);
                if alpha > 0.0 {
                    moves.push((
                        SystemState::new(stock.clone(), pipeline.clone(), with_condition(condition, l, 0), l),
                        alpha * deg.sojourn_rate(c),
                    ));
                }
                if c > 1 && alpha < 1.0 {
                    moves.push((
                        SystemState::new(stock.clone(), pipeline.clone(), with_condition(condition, l, c - 1), l),
                        (1.0 - alpha) * deg.sojourn_rate(c),
                    ));
                }
            } else {
                moves.push((
                    SystemState::new(stock.clone(), pipeline.clone(), with_condition(condition, l, phases), l),
                    deg.sojourn_rate(0),
                ));
            }
        }
        dummy_target = state.clone();
    } else if action.has_dispatch() {
        // Corrective (failure epoch) or preventive (degradation epoch)
        // dispatch, with an optional backfill relocation.
        assert!(failure_epoch || degradation_epoch);
        let x = action.dispatch;
        let y = action.reloc_from;
        let stock = if y > 0 { sub_unit(&state.stock, y) } else { sub_unit(&state.stock, x) };
        let pipeline = add_unit(&state.pipeline, x);
        let condition = if degradation_epoch {
            with_condition(&state.condition, trigger, phases)
        } else {
            state.condition.clone()
        };
        for k in 1..=stock.len() {
            if pipeline[k - 1] > 0 {
                moves.push((
                    SystemState::new(add_unit(&stock, k as i32), sub_unit(&pipeline, k as i32), condition.clone(), 0),
                    pipeline[k - 1] as f64 * gamma,
                ));
            }
        }
        for l in 1..=machines {
            // After a preventive dispatch the repaired machine competes with
            // the perfect-condition clock.
            let c = condition[l - 1];
            if c > 0 {
                let alpha = deg.failure_prob(c);
                if alpha > 0.0 {
                    moves.push((
                        SystemState::new(stock.clone(), pipeline.clone(), with_condition(&condition, l, 0), l),
                        alpha * deg.sojourn_rate(c),
                    ));
                }
                if c > 1 && alpha < 1.0 {
                    moves.push((
                        SystemState::new(stock.clone(), pipeline.clone(), with_condition(&condition, l, c - 1), l),
                        (1.0 - alpha) * deg.sojourn_rate(c),
                    ));
                }
            } else {
                moves.push((
                    SystemState::new(stock.clone(), pipeline.clone(), with_condition(&condition, l, phases), l),
                    deg.sojourn_rate(0),
                ));
            }
        }
        dummy_target = SystemState::new(stock, pipeline, condition, 0);
    } else {
        // Relocation-only epochs: a degradation that is not repaired, or a
        // repair completion. Stock may move between two local warehouses.
        assert!(trigger >= 1 && state.condition_of(trigger) > 0);
        let stock = if action.reloc_from > 0 {
            add_unit(&sub_unit(&state.stock, action.reloc_from), action.reloc_to)
        } else {
            state.stock.clone()
        };
        let pipeline = state.pipeline.clone();
        let condition = state.condition.clone();
        for k in 1..=stock.len() {
            if pipeline[k - 1] > 0 {
                moves.push((
                    SystemState::new(add_unit(&stock, k as i32), sub_unit(&pipeline, k as i32), condition.clone(), 0),
                    pipeline[k - 1] as f64 * gamma,
                ));
            }
        }
        for l in 1..=machines {
            let c = condition[l - 1];
            if c > 0 {
                let alpha = deg.failure_prob(c);
                if alpha > 0.0 {
                    moves.push((
                        SystemState::new(stock.clone(), pipeline.clone(), with_condition(&condition, l, 0), l),
                        alpha * deg.sojourn_rate(c),
                    ));
                }
                if c > 1 && alpha < 1.0 {
                    moves.push((
                        SystemState::new(stock.clone(), pipeline.clone(), with_condition(&condition, l, c - 1), l),
                        (1.0 - alpha) * deg.sojourn_rate(c),
                    ));
                }
            } else {
                moves.push((
                    SystemState::new(stock.clone(), pipeline.clone(), with_condition(&condition, l, phases), l),
                    deg.sojourn_rate(0),
                ));
            }
        }
        dummy_target = SystemState::new(stock, pipeline, condition, 0);
    }

    dummy_target.trigger = 0;
    let total: f64 = moves.iter().map(|(_, r)| r).sum();
    let dummy = tau - total;
    let mut accum: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
    for (successor, rate) in moves {
        let index = space.index_of(&successor).expect("literal successor lies in the space") as u32;
        *accum.entry(index).or_insert(0.0) += rate / tau;
    }
    if dummy > 0.0 {
        let index = space.index_of(&dummy_target).expect("dummy target lies in the space") as u32;
        *accum.entry(index).or_insert(0.0) += dummy / tau;
    }
    TransitionRow { entries: accum.into_iter().collect(), source: state_index as u32, action }
}

// ---------------------------------------------------------------------------
// Invariant suite
// ---------------------------------------------------------------------------

/// Runs the structural invariant suite on one model: enumeration size,
/// index bijection, row stochasticity, rate conservation, nonnegative dummy
/// rates, inventory conservation, action-space nesting, mandatory dispatch
/// on failures, cost sanity, and the two-path row comparison on `samples`
/// random `(state, action)` pairs.
pub fn validate_model(space: &StateSpace, params: &ModelParams, samples: usize, seed: u64) -> ValidationReport {
    let mut report = ValidationReport::default();
    let tau = uniformization_constant(params);

    // Enumeration size against the closed form.
    let expected = closed_form_size(
        params.warehouse_count(),
        params.machine_count(),
        params.inventory,
        params.phases(),
    );
    report.push(
        "enumeration size matches closed form",
        expected == Some(space.len() as u128),
        format!("{} states, closed form {:?}", space.len(), expected),
    );

    // Index bijection.
    let bijective = space
        .states()
        .iter()
        .enumerate()
        .all(|(k, state)| space.index_of(state) == Some(k));
    report.push("state indexing is a bijection", bijective, format!("{} states", space.len()));

    // Full sweep over the union action space.
    let mut worst_row_gap: f64 = 0.0;
    let mut worst_rate_gap: f64 = 0.0;
    let mut min_dummy = f64::INFINITY;
    let mut conserved = true;
    let mut pairs = 0usize;
    for index in 0..space.len() {
        let state = space.state(index);
        for action in admissible_actions(state, PolicyClass::Ocpr, params) {
            pairs += 1;
            let (_, events, dummy) = transition_parts(state, action, params);
            min_dummy = min_dummy.min(dummy);
            let rate_total: f64 = events.iter().map(|(_, r)| r).sum::<f64>() + dummy;
            worst_rate_gap = worst_rate_gap.max((rate_total - tau).abs());

            let row = transition_row(space, params, index, action);
            worst_row_gap = worst_row_gap.max((row.probability_sum() - 1.0).abs());
            for &(dst, p) in &row.entries {
                if !(0.0..=1.0).contains(&p)
                    || space.state(dst as usize).aggregate_level() != params.inventory
                {
                    conserved = false;
                }
            }
        }
    }
    report.push(
        "uniformized rate totals equal tau",
        worst_rate_gap <= 1e-12 * tau,
        format!("worst |rates + dummy - tau| = {worst_rate_gap:.3e} over {pairs} pairs"),
    );
    report.push(
        "dummy rates are nonnegative",
        min_dummy >= -1e-12 * tau,
        format!("smallest dummy rate {min_dummy:.6}"),
    );
    report.push(
        "rows are probability distributions",
        worst_row_gap <= 1e-12,
        format!("worst |row sum - 1| = {worst_row_gap:.3e}"),
    );
    report.push(
        "inventory level conserved across successors",
        conserved,
        format!("aggregate level {} everywhere", params.inventory),
    );

    // Generic generator versus the literal transcription on random pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    let mut mismatch = String::new();
    while checked < samples && mismatch.is_empty() {
        let index = rng.gen_range(0..space.len());
        let state = space.state(index);
        let actions = admissible_actions(state, PolicyClass::Ocpr, params);
        let action = *actions.choose(&mut rng).expect("action sets are never empty");
        let generic = transition_row(space, params, index, action);
        let literal = literal_transition_row(space, params, index, action);
        if generic.entries.len() != literal.entries.len() {
            mismatch = format!("entry counts differ at state {index}, action {action}");
        } else {
            for (&(gd, gp), &(ld, lp)) in generic.entries.iter().zip(&literal.entries) {
                if gd != ld || (gp - lp).abs() > 1e-12 {
                    mismatch = format!(
                        "state {index}, action {action}: generic ({gd}, {gp}) vs literal ({ld}, {lp})"
                    );
                    break;
                }
            }
        }
        checked += 1;
    }
    report.push(
        "generic generator matches the per-epoch formulas",
        mismatch.is_empty(),
        if mismatch.is_empty() { format!("{checked} sampled pairs agree") } else { mismatch },
    );

    // Action-space structure.
    let mut nesting = true;
    let mut dispatch_mandatory = true;
    let mut cf_member = true;
    for state in space.states() {
        let cf = admissible_actions(state, PolicyClass::Cf, params);
        let oc = admissible_actions(state, PolicyClass::Oc, params);
        let ocr = admissible_actions(state, PolicyClass::Ocr, params);
        let ocp = admissible_actions(state, PolicyClass::Ocp, params);
        let ocpr = admissible_actions(state, PolicyClass::Ocpr, params);
        let within = |small: &[Action], big: &[Action]| small.iter().all(|a| big.contains(a));
        nesting &= within(&oc, &ocp) && within(&oc, &ocr) && within(&ocp, &ocpr) && within(&ocr, &ocpr);
        cf_member &= within(&cf, &oc);
        if Epoch::classify(state, params.phases()) == Epoch::Failure {
            dispatch_mandatory &= ocpr.iter().all(Action::has_dispatch);
            if stocked_warehouses(state).is_empty() {
                // Empty network stock leaves exactly the central dispatch.
                dispatch_mandatory &= ocpr == vec![Action::dispatch_only(0)];
            }
        } else {
            cf_member &= cf == vec![Action::NOTHING];
        }
    }
    report.push("action spaces nest across classes", nesting, "OC within OCR/OCP within OCPR".into());
    report.push("closest-first action is admissible everywhere", cf_member, String::new());
    report.push("dispatch is mandatory on failure epochs", dispatch_mandatory, String::new());

    // Cost sanity over sampled pairs.
    let mut cost_ok = true;
    for _ in 0..samples {
        let index = rng.gen_range(0..space.len());
        let state = space.state(index);
        let actions = admissible_actions(state, PolicyClass::Ocpr, params);
        let action = *actions.choose(&mut rng).unwrap();
        let cost = immediate_cost(state, action, params);
        if cost < 0.0 {
            cost_ok = false;
        }
        if action == Action::NOTHING && cost != 0.0 {
            cost_ok = false;
        }
        let post = post_action_state(state, action, params.phases());
        if post.aggregate_level() != params.inventory {
            cost_ok = false;
        }
    }
    report.push("costs are nonnegative and zero only for doing nothing", cost_ok, String::new());

    // The closest-first rule picks the minimal response time.
    let mut cf_ok = true;
    for state in space.states() {
        if Epoch::classify(state, params.phases()) == Epoch::Failure {
            let action = cf_action(state, &params.network, params.phases());
            let stocked = stocked_warehouses(state);
            if stocked.is_empty() {
                cf_ok &= action.is_central_dispatch();
            } else {
                let best = stocked
                    .iter()
                    .map(|&i| params.network.response_time(i, state.trigger))
                    .fold(f64::INFINITY, f64::min);
                cf_ok &= !action.is_central_dispatch()
                    && params.network.response_time(action.dispatch as usize, state.trigger) == best;
            }
        }
    }
    report.push("closest-first dispatches from the nearest stocked warehouse", cf_ok, String::new());

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostParams, DegradationModel, NetworkInstance};

    fn default_params() -> ModelParams {
        ModelParams::new(
            NetworkInstance::new(vec![vec![4.0, 12.0], vec![9.0, 3.0]], None, None, 10.0).unwrap(),
            DegradationModel::uniform(2),
            2,
            0.5,
            0.95,
            CostParams::setting(1).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn suite_passes_on_the_default_instance() {
        let params = default_params();
        let space = StateSpace::enumerate(&params).unwrap();
        let report = validate_model(&space, &params, 150, 11);
        for check in &report.checks {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
    }

    #[test]
    fn literal_rows_match_generic_everywhere_on_the_default_instance() {
        let params = default_params();
        let space = StateSpace::enumerate(&params).unwrap();
        for index in 0..space.len() {
            for action in admissible_actions(space.state(index), PolicyClass::Ocpr, &params) {
                let generic = transition_row(&space, &params, index, action);
                let literal = literal_transition_row(&space, &params, index, action);
                assert_eq!(generic.entries.len(), literal.entries.len(), "state {index} action {action}");
                for (&(gd, gp), &(ld, lp)) in generic.entries.iter().zip(&literal.entries) {
                    assert_eq!(gd, ld, "state {index} action {action}");
                    assert!((gp - lp).abs() <= 1e-13, "state {index} action {action}: {gp} vs {lp}");
                }
            }
        }
    }

    #[test]
    fn literal_rows_cover_nonuniform_rates() {
        // Distinct rates and a nonzero failure probability above stage 1
        // exercise every rate family separately.
        let params = ModelParams::new(
            NetworkInstance::new(vec![vec![4.0], vec![7.0]], None, None, 10.0).unwrap(),
            DegradationModel::new(3, vec![0.7, 1.3, 0.9, 1.1], vec![0.0, 1.0, 0.25, 0.4]).unwrap(),
            2,
            0.8,
            0.9,
            CostParams::setting(2).unwrap(),
        )
        .unwrap();
        let space = StateSpace::enumerate(&params).unwrap();
        let report = validate_model(&space, &params, 200, 5);
        for check in &report.checks {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
    }
}
