//! Action spaces per decision epoch and policy class, the post-action state
//! update, and the immediate cost of an action.

use crate::model::{Action, Epoch, ModelParams, NetworkInstance, PolicyClass, SystemState, CENTRAL, NO_WAREHOUSE};

/// Local warehouses with at least one spare part on hand, ascending 1-based indices.
pub fn stocked_warehouses(state: &SystemState) -> Vec<usize> {
    (1..=state.warehouse_count()).filter(|&i| state.stock_at(i) > 0).collect()
}

/// Dispatch actions, optionally backfilling the dispatching warehouse by a
/// relocation from another stocked warehouse. Defined when the triggering
/// machine is below perfect condition; central dispatch is always available.
///
/// Panics when called on a replenishment epoch or a machine in perfect
/// condition, where no dispatch decision exists.
pub fn type1_actions(state: &SystemState, phases: usize) -> Vec<Action> {
    assert!(state.trigger >= 1, "dispatch actions are undefined on replenishment epochs");
    assert!(
        (state.condition_of(state.trigger) as usize) < phases,
        "dispatch actions are undefined for a machine in perfect condition"
    );
    let stocked = stocked_warehouses(state);
    let mut actions = Vec::with_capacity(stocked.len() * stocked.len() + 1);
    actions.push(Action::dispatch_only(CENTRAL));
    for &x in &stocked {
        actions.push(Action::dispatch_only(x as i32));
        for &y in &stocked {
            if y != x {
                actions.push(Action::dispatch_with_backfill(x as i32, y as i32));
            }
        }
    }
    actions.sort();
    actions
}

/// Pure relocation actions between local warehouses, plus doing nothing.
/// Defined whenever the triggering machine is still functional.
pub fn type2_actions(state: &SystemState) -> Vec<Action> {
    assert!(state.trigger >= 1, "relocation decisions are undefined on replenishment epochs");
    assert!(
        state.condition_of(state.trigger) > 0,
        "relocation-only actions are undefined on failure epochs"
    );
    let warehouse_count = state.warehouse_count();
    let mut actions = vec![Action::NOTHING];
    for y in stocked_warehouses(state) {
        for z in 1..=warehouse_count {
            if z != y {
                actions.push(Action::relocation(y as i32, z as i32));
            }
        }
    }
    actions.sort();
    actions
}

/// The closest-first rule: on a failure, dispatch from the nearest stocked
/// local warehouse (lowest index on ties), from the central warehouse when
/// every local is empty; otherwise do nothing.
pub fn cf_action(state: &SystemState, network: &NetworkInstance, phases: usize) -> Action {
    if Epoch::classify(state, phases) != Epoch::Failure {
        return Action::NOTHING;
    }
    let machine = state.trigger;
    let mut best: Option<(f64, usize)> = None;
    for i in stocked_warehouses(state) {
        let r = network.response_time(i, machine);
        if best.map_or(true, |(br, _)| r < br) {
            best = Some((r, i));
        }
    }
    match best {
        Some((_, i)) => Action::dispatch_only(i as i32),
        None => Action::dispatch_only(CENTRAL),
    }
}

/// Admissible actions of a policy class in a state, sorted lexicographically.
///
/// Epoch classification comes first: replenishment arrivals admit only doing
/// nothing; a failure is a dispatch epoch; a repair completion is a
/// relocation-only epoch; a degradation admits both kinds where the class
/// allows them. The result is never empty.
pub fn admissible_actions(state: &SystemState, class: PolicyClass, params: &ModelParams) -> Vec<Action> {
    let phases = params.phases();
    match Epoch::classify(state, phases) {
        Epoch::Replenishment => vec![Action::NOTHING],
        Epoch::Failure => match class {
            PolicyClass::Cf => vec![cf_action(state, &params.network, phases)],
            PolicyClass::Oc | PolicyClass::Ocp => {
                let mut actions = type1_actions(state, phases);
                actions.retain(|a| !a.has_relocation());
                actions
            }
            PolicyClass::Ocr | PolicyClass::Ocpr => type1_actions(state, phases),
        },
        Epoch::Degradation => match class {
            PolicyClass::Cf | PolicyClass::Oc => vec![Action::NOTHING],
            PolicyClass::Ocr => type2_actions(state),
            PolicyClass::Ocp => {
                let mut actions = type1_actions(state, phases);
                actions.retain(|a| !a.has_relocation());
                actions.push(Action::NOTHING);
                actions.sort();
                actions
            }
            PolicyClass::Ocpr => {
                let mut actions = type1_actions(state, phases);
                actions.extend(type2_actions(state));
                actions.sort();
                actions.dedup();
                actions
            }
        },
        Epoch::RepairCompletion => match class {
            PolicyClass::Cf | PolicyClass::Oc | PolicyClass::Ocp => vec![Action::NOTHING],
            PolicyClass::Ocr | PolicyClass::Ocpr => type2_actions(state),
        },
    }
}

/// State right after the action is applied and before the next event: stock
/// moves, the replenishment order is booked at the dispatching warehouse,
/// and a preventive dispatch restores the triggering machine to perfect
/// condition.
///
/// Panics when the action takes stock a warehouse does not have.
pub fn post_action_state(state: &SystemState, action: Action, phases: usize) -> SystemState {
    let mut next = state.clone();
    if action.dispatch > 0 && action.reloc_from == NO_WAREHOUSE {
        take_stock(&mut next, action.dispatch as usize);
    }
    if action.reloc_from > 0 {
        take_stock(&mut next, action.reloc_from as usize);
    }
    if action.reloc_to > 0 && action.dispatch == NO_WAREHOUSE {
        next.stock[action.reloc_to as usize - 1] += 1;
    }
    if action.dispatch > 0 {
        next.pipeline[action.dispatch as usize - 1] += 1;
    }
    if action.has_dispatch() && state.condition_of(state.trigger) > 0 {
        next.condition[state.trigger - 1] = phases as u8;
    }
    next
}

fn take_stock(state: &mut SystemState, warehouse: usize) {
    assert!(
        state.stock[warehouse - 1] > 0,
        "inadmissible action: warehouse {warehouse} has no stock"
    );
    state.stock[warehouse - 1] -= 1;
}

/// Immediate cost of an action: central dispatch, corrective dispatch with
/// late-response penalties, preventive dispatch, and the relocation setup.
pub fn immediate_cost(state: &SystemState, action: Action, params: &ModelParams) -> f64 {
    let costs = &params.costs;
    let relocation = if action.has_relocation() { costs.relocation_setup } else { 0.0 };
    if action.dispatch == CENTRAL {
        costs.central_dispatch
    } else if action.dispatch > 0 {
        let base = costs.replenishment_setup + relocation;
        if state.condition_of(state.trigger) == 0 {
            let response = params.network.response_time(action.dispatch as usize, state.trigger);
            let threshold = params.network.response_threshold();
            let late = if response > threshold {
                costs.late_fixed + costs.late_per_unit * (response - threshold)
            } else {
                0.0
            };
            costs.corrective_setup + late + base
        } else {
            costs.preventive_setup + base
        }
    } else {
        relocation
    }
}
