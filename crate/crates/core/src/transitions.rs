//! Event rates out of a post-action state and the uniformized next-state
//! probability rows.
//!
//! One generic generator serves every epoch type: apply the action, read the
//! competing exponential clocks off the post-action state, divide by the
//! uniformization constant, and absorb the residual rate in a dummy
//! transition into the post-action state with trigger 0.

use std::collections::BTreeMap;
use std::io::Write;

use crate::actions::{admissible_actions, immediate_cost, post_action_state};
use crate::error::Result;
use crate::model::{Action, ModelParams, PolicyClass, SystemState};
use crate::space::StateSpace;

/// Uniformization constant: an upper bound on the total event rate of any
/// state, `gamma * K + J * max_n mu_n`.
pub fn uniformization_constant(params: &ModelParams) -> f64 {
    params.replenish_rate * params.inventory as f64
        + params.machine_count() as f64 * params.degradation.max_sojourn_rate()
}

/// An exponential clock that can fire next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    /// A replenishment order arrives at a local warehouse (1-based).
    Replenishment { warehouse: usize },
    /// A machine fails (1-based).
    Failure { machine: usize },
    /// A machine degrades one condition without failing.
    Degradation { machine: usize },
    /// A corrective repair completes, restoring perfect condition.
    Repair { machine: usize },
}

/// Competing events and their rates, read off a post-action state. Zero-rate
/// events are omitted; the order is fixed (replenishments by warehouse, then
/// per machine failure before degradation or repair).
pub fn event_rates(post: &SystemState, params: &ModelParams) -> Vec<(Event, f64)> {
    let gamma = params.replenish_rate;
    let deg = &params.degradation;
    let mut events = Vec::with_capacity(post.warehouse_count() + 2 * post.machine_count());
    for warehouse in 1..=post.warehouse_count() {
        let orders = post.pipeline_at(warehouse);
        if orders > 0 {
            events.push((Event::Replenishment { warehouse }, orders as f64 * gamma));
        }
    }
    for machine in 1..=post.machine_count() {
        let condition = post.condition_of(machine);
        if condition == 0 {
            events.push((Event::Repair { machine }, deg.sojourn_rate(0)));
            continue;
        }
        let rate = deg.sojourn_rate(condition);
        let fail = deg.failure_prob(condition);
        if fail > 0.0 {
            events.push((Event::Failure { machine }, fail * rate));
        }
        if condition > 1 && fail < 1.0 {
            events.push((Event::Degradation { machine }, (1.0 - fail) * rate));
        }
    }
    events
}

/// Successor reached when `event` fires out of `post`.
pub fn apply_event(post: &SystemState, event: Event, phases: usize) -> SystemState {
    let mut next = post.clone();
    match event {
        Event::Replenishment { warehouse } => {
            next.stock[warehouse - 1] += 1;
            next.pipeline[warehouse - 1] -= 1;
            next.trigger = 0;
        }
        Event::Failure { machine } => {
            next.condition[machine - 1] = 0;
            next.trigger = machine;
        }
        Event::Degradation { machine } => {
            next.condition[machine - 1] -= 1;
            next.trigger = machine;
        }
        Event::Repair { machine } => {
            next.condition[machine - 1] = phases as u8;
            next.trigger = machine;
        }
    }
    next
}

/// Post-action state, event rates and the dummy residual rate for one
/// `(state, action)` pair. The three parts carry the uniformization
/// contract: event rates plus the dummy always total the constant.
pub fn transition_parts(
    state: &SystemState,
    action: Action,
    params: &ModelParams,
) -> (SystemState, Vec<(Event, f64)>, f64) {
    let post = post_action_state(state, action, params.phases());
    let events = event_rates(&post, params);
    let total: f64 = events.iter().map(|(_, r)| r).sum();
    let dummy = uniformization_constant(params) - total;
    (post, events, dummy)
}

/// One row of the uniformized chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    /// `(successor index, probability)`, ascending by index, probabilities
    /// summing to one. The dummy self-transition is merged in.
    pub entries: Vec<(u32, f64)>,
    pub source: u32,
    pub action: Action,
}

impl TransitionRow {
    pub fn probability_sum(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }
}

/// Builds the probability row for `(state, action)`. Every successor must
/// lie in the enumerated space.
pub fn transition_row(
    space: &StateSpace,
    params: &ModelParams,
    state_index: usize,
    action: Action,
) -> TransitionRow {
    let state = space.state(state_index);
    let tau = uniformization_constant(params);
    let (post, events, dummy) = transition_parts(state, action, params);

    let mut accum: BTreeMap<u32, f64> = BTreeMap::new();
    for (event, rate) in events {
        let successor = apply_event(&post, event, params.phases());
        let index = space
            .index_of(&successor)
            .unwrap_or_else(|| panic!("successor {successor:?} escaped the state space"));
        *accum.entry(index as u32).or_insert(0.0) += rate / tau;
    }
    // The dummy lands in the post-action state marked as "no decision".
    debug_assert!(dummy >= -1e-9 * tau, "uniformization constant undershoots: dummy {dummy}");
    if dummy > 0.0 {
        let mut resting = post;
        resting.trigger = 0;
        let index = space.index_of(&resting).expect("post-action state lies in the space");
        *accum.entry(index as u32).or_insert(0.0) += dummy / tau;
    }
    TransitionRow {
        entries: accum.into_iter().collect(),
        source: state_index as u32,
        action,
    }
}

/// Writes every `(state, action)` row of a policy class as a sparse text
/// listing: `src_idx action_x action_y action_z dst_idx probability`.
pub fn dump_transition_model(
    space: &StateSpace,
    params: &ModelParams,
    class: PolicyClass,
    out: &mut impl Write,
) -> Result<()> {
    for index in 0..space.len() {
        for action in admissible_actions(space.state(index), class, params) {
            let row = transition_row(space, params, index, action);
            for (dst, p) in &row.entries {
                writeln!(
                    out,
                    "{} {} {} {} {} {}",
                    index, action.dispatch, action.reloc_from, action.reloc_to, dst, p
                )
                .map_err(|e| crate::error::Error::InvalidModel(format!("dump failed: {e}")))?;
            }
        }
    }
    Ok(())
}

/// Cost and transition row for every admissible action of every state, the
/// superset any policy class draws from.
#[derive(Debug, Clone)]
pub struct ActionTable {
    pub arms: Vec<Vec<Arm>>,
    pub tau: f64,
}

#[derive(Debug, Clone)]
pub struct Arm {
    pub action: Action,
    pub cost: f64,
    pub row: TransitionRow,
}

impl ActionTable {
    /// Materializes rows for the union of all class action spaces (the full
    /// class already contains every other class's actions).
    pub fn build(space: &StateSpace, params: &ModelParams) -> Self {
        let tau = uniformization_constant(params);
        let arms = (0..space.len())
            .map(|index| {
                let state = space.state(index);
                admissible_actions(state, PolicyClass::Ocpr, params)
                    .into_iter()
                    .map(|action| Arm {
                        action,
                        cost: immediate_cost(state, action, params),
                        row: transition_row(space, params, index, action),
                    })
                    .collect()
            })
            .collect();
        Self { arms, tau }
    }

    /// Positions of a class's admissible actions within each state's arm
    /// list. Arm lists and class action lists are both lexicographic, so a
    /// single merge pass suffices.
    pub fn class_choices(&self, space: &StateSpace, params: &ModelParams, class: PolicyClass) -> Vec<Vec<u32>> {
        (0..space.len())
            .map(|index| {
                let arms = &self.arms[index];
                let mut choices = Vec::new();
                let mut cursor = 0usize;
                for action in admissible_actions(space.state(index), class, params) {
                    while arms[cursor].action != action {
                        cursor += 1;
                        assert!(cursor < arms.len(), "class action missing from the arm table");
                    }
                    choices.push(cursor as u32);
                }
                choices
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostParams, DegradationModel, NetworkInstance};

    fn base_params(gamma: f64, inventory: usize, phases: usize) -> ModelParams {
        ModelParams::new(
            NetworkInstance::new(vec![vec![4.0, 4.0], vec![7.0, 7.0]], None, None, 10.0).unwrap(),
            DegradationModel::uniform(phases),
            inventory,
            gamma,
            0.95,
            CostParams::setting(1).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn uniformization_constant_formula() {
        assert_eq!(uniformization_constant(&base_params(1.0, 2, 2)), 4.0);
        assert_eq!(uniformization_constant(&base_params(0.5, 2, 2)), 3.0);
        // Single machine, no pipeline capacity.
        let p = ModelParams::new(
            NetworkInstance::new(vec![vec![4.0]], None, None, 10.0).unwrap(),
            DegradationModel::uniform(1),
            0,
            1.0,
            0.95,
            CostParams::setting(1).unwrap(),
        )
        .unwrap();
        assert_eq!(uniformization_constant(&p), 1.0);
    }

    #[test]
    fn event_rates_read_the_post_action_state() {
        let params = base_params(1.0, 2, 2);
        // One pipeline unit, both machines degrading from perfect condition.
        let post = SystemState::new(vec![1, 0], vec![1, 0], vec![2, 2], 0);
        let events = event_rates(&post, &params);
        assert_eq!(
            events,
            vec![
                (Event::Replenishment { warehouse: 1 }, 1.0),
                (Event::Degradation { machine: 1 }, 1.0),
                (Event::Degradation { machine: 2 }, 1.0),
            ]
        );
        let total: f64 = events.iter().map(|(_, r)| r).sum();
        assert_eq!(total, 3.0);

        // A failed machine repairs; a machine in condition 1 can only fail.
        let post = SystemState::new(vec![1, 1], vec![0, 0], vec![0, 1], 1);
        let events = event_rates(&post, &params);
        assert_eq!(
            events,
            vec![
                (Event::Repair { machine: 1 }, 1.0),
                (Event::Failure { machine: 2 }, 1.0),
            ]
        );

        // Perfect machines with zero failure probability only degrade.
        let post = SystemState::new(vec![2, 0], vec![0, 0], vec![2, 2], 0);
        let events = event_rates(&post, &params);
        assert!(events
            .iter()
            .all(|(e, r)| matches!(e, Event::Degradation { .. }) && *r == 1.0));
        assert_eq!(events.len(), 2);
    }

    #[test]
    fn dummy_rate_matches_the_residual() {
        let params = base_params(1.0, 2, 2);
        // Replenishment epoch: dummy = tau - sum P_k gamma - sum mu = 4 - 1 - 2.
        let state = SystemState::new(vec![1, 0], vec![1, 0], vec![2, 2], 0);
        let (_, _, dummy) = transition_parts(&state, Action::NOTHING, &params);
        assert!((dummy - 1.0).abs() < 1e-15);

        // Preventive repair with identical rates leaves the dummy unchanged:
        // machine 1 swaps its condition-1 clock for a condition-2 clock.
        let degraded = SystemState::new(vec![1, 1], vec![0, 0], vec![1, 2], 1);
        let (_, _, dummy_prev) = transition_parts(&degraded, Action::dispatch_only(1), &params);
        let (_, _, dummy_nothing) = transition_parts(&degraded, Action::NOTHING, &params);
        assert_eq!(dummy_prev, dummy_nothing);
    }

    #[test]
    fn rows_are_stochastic_across_the_default_space() {
        let params = base_params(0.5, 2, 2);
        let space = StateSpace::enumerate(&params).unwrap();
        assert_eq!(space.len(), 270);
        let mut rows = 0usize;
        for index in 0..space.len() {
            let state = space.state(index);
            for action in admissible_actions(state, PolicyClass::Ocpr, &params) {
                let row = transition_row(&space, &params, index, action);
                assert!((row.probability_sum() - 1.0).abs() < 1e-12);
                assert!(row.entries.iter().all(|&(_, p)| (0.0..=1.0).contains(&p)));
                assert!(row.entries.windows(2).all(|w| w[0].0 < w[1].0));
                for &(dst, _) in &row.entries {
                    assert_eq!(space.state(dst as usize).aggregate_level(), params.inventory);
                }
                rows += 1;
            }
        }
        assert!(rows > space.len());
    }

    #[test]
    fn dummy_lands_in_the_post_action_state_with_trigger_zero() {
        let params = base_params(1.0, 2, 2);
        let space = StateSpace::enumerate(&params).unwrap();
        // Failure of machine 1, dispatch from warehouse 1, nothing in pipeline
        // before the action.
        let state = SystemState::new(vec![1, 1], vec![0, 0], vec![0, 2], 1);
        let index = space.index_of(&state).unwrap();
        let row = transition_row(&space, &params, index, Action::dispatch_only(1));
        let expected_rest = SystemState::new(vec![0, 1], vec![1, 0], vec![0, 2], 0);
        let rest_index = space.index_of(&expected_rest).unwrap() as u32;
        // tau = 4; events: replenishment 1, repair of 1, clock of 2 => dummy 1/4.
        let dummy = row.entries.iter().find(|(i, _)| *i == rest_index).unwrap();
        assert!((dummy.1 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn class_choices_line_up_with_the_arm_table() {
        let params = base_params(0.5, 2, 2);
        let space = StateSpace::enumerate(&params).unwrap();
        let table = ActionTable::build(&space, &params);
        for class in PolicyClass::ALL {
            let choices = table.class_choices(&space, &params, class);
            for (index, list) in choices.iter().enumerate() {
                let expected = admissible_actions(space.state(index), class, &params);
                let picked: Vec<_> =
                    list.iter().map(|&c| table.arms[index][c as usize].action).collect();
                assert_eq!(picked, expected);
            }
        }
    }
}
