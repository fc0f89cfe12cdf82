//! Exhaustive enumeration of the state space with a dense integer index.
//!
//! States are ordered lexicographically over `(stock, pipeline, condition,
//! trigger)`. The stock/pipeline part ranges over every nonnegative split of
//! the aggregate inventory across `2 * I` cells, ranked combinatorially, so
//! `index_of`/`state` are mutually inverse without a lookup table.

use crate::error::{Error, Result};
use crate::model::{ModelParams, SystemState};

/// Hard ceiling on enumerated states; larger spaces are rejected as
/// infeasible for exact solution.
pub const DEFAULT_STATE_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone)]
pub struct StateSpace {
    warehouse_count: usize,
    machine_count: usize,
    inventory: usize,
    phases: usize,
    condition_combos: usize,
    states: Vec<SystemState>,
    /// Pascal's triangle up to `inventory + 2 * warehouse_count`.
    binomial: Vec<Vec<u64>>,
}

impl StateSpace {
    /// Enumerates the full space for `params`, refusing to materialize more
    /// than `DEFAULT_STATE_LIMIT` states.
    pub fn enumerate(params: &ModelParams) -> Result<Self> {
        Self::enumerate_with_limit(params, DEFAULT_STATE_LIMIT)
    }

    pub fn enumerate_with_limit(params: &ModelParams, limit: usize) -> Result<Self> {
        let warehouses = params.warehouse_count();
        let machines = params.machine_count();
        let inventory = params.inventory;
        let phases = params.phases();

        let size = closed_form_size(warehouses, machines, inventory, phases)
            .ok_or_else(|| Error::InvalidModel("state-space size overflows".into()))?;
        if size > limit as u128 {
            return Err(Error::StateSpaceTooLarge { size, limit });
        }

        let binomial = pascal_triangle(inventory + 2 * warehouses);
        let condition_combos = (phases + 1).pow(machines as u32);

        let mut states = Vec::with_capacity(size as usize);
        let splits = enumerate_splits(inventory, 2 * warehouses);
        let mut condition = vec![0u8; machines];
        for split in &splits {
            let (stock, pipeline) = split.split_at(warehouses);
            for c_rank in 0..condition_combos {
                decode_condition(c_rank, phases, &mut condition);
                for trigger in 0..=machines {
                    states.push(SystemState::new(
                        stock.to_vec(),
                        pipeline.to_vec(),
                        condition.clone(),
                        trigger,
                    ));
                }
            }
        }
        debug_assert_eq!(states.len() as u128, size);

        Ok(Self {
            warehouse_count: warehouses,
            machine_count: machines,
            inventory,
            phases,
            condition_combos,
            states,
            binomial,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[SystemState] {
        &self.states
    }

    /// The state at a dense index. Panics when out of range.
    pub fn state(&self, index: usize) -> &SystemState {
        &self.states[index]
    }

    /// Dense index of a state, or `None` when the state lies outside the
    /// space (wrong shape, wrong aggregate level, or out-of-range condition).
    pub fn index_of(&self, state: &SystemState) -> Option<usize> {
        if state.stock.len() != self.warehouse_count
            || state.pipeline.len() != self.warehouse_count
            || state.condition.len() != self.machine_count
            || state.trigger > self.machine_count
            || state.aggregate_level() != self.inventory
            || state.condition.iter().any(|&c| c as usize > self.phases)
        {
            return None;
        }
        let split_rank = self.rank_split(state);
        let condition_rank = state
            .condition
            .iter()
            .fold(0usize, |acc, &c| acc * (self.phases + 1) + c as usize);
        Some(
            (split_rank * self.condition_combos + condition_rank) * (self.machine_count + 1)
                + state.trigger,
        )
    }

    /// Whether the space was enumerated for compatible model dimensions.
    pub fn matches(&self, params: &ModelParams) -> bool {
        self.warehouse_count == params.warehouse_count()
            && self.machine_count == params.machine_count()
            && self.inventory == params.inventory
            && self.phases == params.phases()
    }

    pub fn warehouse_count(&self) -> usize {
        self.warehouse_count
    }

    pub fn machine_count(&self) -> usize {
        self.machine_count
    }

    pub fn inventory(&self) -> usize {
        self.inventory
    }

    pub fn phases(&self) -> usize {
        self.phases
    }

    /// Canonical start state: every machine perfect, no pipeline, inventory
    /// split as evenly as indices allow (earlier warehouses take the
    /// remainder), trigger 0.
    pub fn canonical_start(&self) -> usize {
        let base = (self.inventory / self.warehouse_count) as u16;
        let remainder = self.inventory % self.warehouse_count;
        let stock: Vec<u16> =
            (0..self.warehouse_count).map(|i| base + u16::from(i < remainder)).collect();
        let state = SystemState::new(
            stock,
            vec![0; self.warehouse_count],
            vec![self.phases as u8; self.machine_count],
            0,
        );
        self.index_of(&state).expect("canonical state lies in the space")
    }

    /// Lexicographic rank of the combined stock/pipeline split.
    fn rank_split(&self, state: &SystemState) -> usize {
        let cells = 2 * self.warehouse_count;
        let mut remaining = self.inventory;
        let mut rank = 0u64;
        for t in 0..cells - 1 {
            let v = if t < self.warehouse_count {
                state.stock[t] as usize
            } else {
                state.pipeline[t - self.warehouse_count] as usize
            };
            for w in 0..v {
                rank += count_splits(&self.binomial, remaining - w, cells - t - 1);
            }
            remaining -= v;
        }
        rank as usize
    }
}

/// `C(K + 2I - 1, 2I - 1) * (N + 1)^J * (J + 1)`, or `None` on overflow.
pub fn closed_form_size(warehouses: usize, machines: usize, inventory: usize, phases: usize) -> Option<u128> {
    let splits = binomial_u128(inventory + 2 * warehouses - 1, 2 * warehouses - 1)?;
    let conditions = (phases as u128 + 1).checked_pow(machines as u32)?;
    splits.checked_mul(conditions)?.checked_mul(machines as u128 + 1)
}

fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

fn pascal_triangle(rows: usize) -> Vec<Vec<u64>> {
    let mut table = Vec::with_capacity(rows + 1);
    for n in 0..=rows {
        let mut row = vec![1u64; n + 1];
        for k in 1..n {
            row[k] = table[n - 1][k - 1] + table[n - 1][k];
        }
        table.push(row);
    }
    table
}

/// Number of ways to place `amount` units into `cells` ordered cells.
fn count_splits(binomial: &[Vec<u64>], amount: usize, cells: usize) -> u64 {
    if cells == 0 {
        return u64::from(amount == 0);
    }
    binomial[amount + cells - 1][cells - 1]
}

/// All nonnegative integer vectors of the given length summing to `total`,
/// in ascending lexicographic order.
fn enumerate_splits(total: usize, cells: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut current = vec![0u16; cells];
    fill_splits(total, 0, &mut current, &mut out);
    out
}

fn fill_splits(remaining: usize, cell: usize, current: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    if cell + 1 == current.len() {
        current[cell] = remaining as u16;
        out.push(current.clone());
        return;
    }
    for v in 0..=remaining {
        current[cell] = v as u16;
        fill_splits(remaining - v, cell + 1, current, out);
    }
}

fn decode_condition(mut rank: usize, phases: usize, condition: &mut [u8]) {
    for slot in condition.iter_mut().rev() {
        *slot = (rank % (phases + 1)) as u8;
        rank /= phases + 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostParams, DegradationModel, NetworkInstance};

    fn params(warehouses: usize, machines: usize, inventory: usize, phases: usize) -> ModelParams {
        let response = vec![vec![5.0; machines]; warehouses];
        ModelParams::new(
            NetworkInstance::new(response, None, None, 10.0).unwrap(),
            DegradationModel::uniform(phases),
            inventory,
            1.0,
            0.95,
            CostParams::setting(1).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn closed_form_counts() {
        // Stars and bars times condition and trigger ranges.
        assert_eq!(closed_form_size(2, 2, 2, 2), Some(270));
        assert_eq!(closed_form_size(2, 2, 2, 6), Some(1470));
        assert_eq!(closed_form_size(1, 1, 0, 1), Some(4));
    }

    #[test]
    fn enumeration_matches_closed_form() {
        for (i, j, k, n) in [(2, 2, 2, 2), (2, 2, 2, 6), (1, 1, 0, 1), (3, 2, 1, 2), (1, 3, 2, 3)] {
            let space = StateSpace::enumerate(&params(i, j, k, n)).unwrap();
            assert_eq!(space.len() as u128, closed_form_size(i, j, k, n).unwrap());
        }
    }

    #[test]
    fn index_round_trips_over_the_full_space() {
        let space = StateSpace::enumerate(&params(2, 2, 2, 2)).unwrap();
        for (k, state) in space.states().iter().enumerate() {
            assert_eq!(space.index_of(state), Some(k));
        }
        assert_eq!(space.index_of(space.state(0)), Some(0));
    }

    #[test]
    fn indices_form_a_permutation() {
        let space = StateSpace::enumerate(&params(2, 2, 2, 2)).unwrap();
        let mut seen = vec![false; space.len()];
        for state in space.states() {
            let idx = space.index_of(state).unwrap();
            assert!(!seen[idx], "duplicate index {idx}");
            seen[idx] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn out_of_space_states_are_rejected() {
        let space = StateSpace::enumerate(&params(2, 2, 2, 2)).unwrap();
        // Wrong aggregate level.
        let s = SystemState::new(vec![2, 1], vec![0, 0], vec![2, 2], 0);
        assert_eq!(space.index_of(&s), None);
        // Condition out of range.
        let s = SystemState::new(vec![1, 1], vec![0, 0], vec![3, 2], 0);
        assert_eq!(space.index_of(&s), None);
        // Trigger out of range.
        let s = SystemState::new(vec![1, 1], vec![0, 0], vec![2, 2], 3);
        assert_eq!(space.index_of(&s), None);
    }

    #[test]
    fn size_limit_guard() {
        let p = params(2, 2, 2, 2);
        match StateSpace::enumerate_with_limit(&p, 100) {
            Err(Error::StateSpaceTooLarge { size, limit }) => {
                assert_eq!(size, 270);
                assert_eq!(limit, 100);
            }
            other => panic!("expected a size-limit error, got {other:?}"),
        }
    }

    #[test]
    fn canonical_start_splits_stock_evenly() {
        let space = StateSpace::enumerate(&params(2, 2, 2, 2)).unwrap();
        let start = space.state(space.canonical_start());
        assert_eq!(start.stock, vec![1, 1]);
        assert_eq!(start.pipeline, vec![0, 0]);
        assert_eq!(start.condition, vec![2, 2]);
        assert_eq!(start.trigger, 0);

        let space = StateSpace::enumerate(&params(2, 1, 3, 1)).unwrap();
        let start = space.state(space.canonical_start());
        assert_eq!(start.stock, vec![2, 1]);
    }

    #[test]
    fn ordering_is_lexicographic_from_zero() {
        let space = StateSpace::enumerate(&params(1, 1, 1, 1)).unwrap();
        // First state: stock 0, pipeline 1 (lex-smallest split), condition 0, trigger 0.
        let first = space.state(0);
        assert_eq!((first.stock[0], first.pipeline[0], first.condition[0], first.trigger), (0, 1, 0, 0));
        // Last state: stock 1, pipeline 0, condition 1, trigger 1.
        let last = space.state(space.len() - 1);
        assert_eq!((last.stock[0], last.pipeline[0], last.condition[0], last.trigger), (1, 0, 1, 1));
    }
}
