//! Domain types: the service network, machine degradation law, cost structure,
//! system state and the action triple.
//!
//! Indexing conventions follow the model throughout the crate: warehouses are
//! `0..=I` where 0 is the central warehouse and `1..=I` are local warehouses;
//! machines are `1..=J`. A state's `trigger` of 0 marks a replenishment
//! arrival, otherwise it names the machine whose event opened the decision
//! epoch.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sentinel for "no dispatch" / "no relocation" in an [`Action`] component.
pub const NO_WAREHOUSE: i32 = -1;
/// Warehouse index of the central warehouse.
pub const CENTRAL: i32 = 0;

// ---------------------------------------------------------------------------
// Degradation law
// ---------------------------------------------------------------------------

/// Coxian lifetime of a machine: `phases` exponential stages walked downward
/// from perfect (`phases`) to failed (0), with a failure exit at every stage.
///
/// `sojourn_rates[n]` is the rate at which stage `n` is left for `n >= 1`;
/// `sojourn_rates[0]` is the corrective-repair completion rate. On leaving
/// stage `n` the machine fails with probability `failure_probs[n]`, else it
/// drops to stage `n - 1`. Stage 1 always exits to failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationModel {
    phases: usize,
    sojourn_rates: Vec<f64>,
    failure_probs: Vec<f64>,
}

impl DegradationModel {
    pub fn new(phases: usize, sojourn_rates: Vec<f64>, failure_probs: Vec<f64>) -> Result<Self> {
        if phases < 1 {
            return Err(Error::InvalidModel("need at least one degradation phase".into()));
        }
        if sojourn_rates.len() != phases + 1 || failure_probs.len() != phases + 1 {
            return Err(Error::InvalidModel(format!(
                "rate and probability vectors must have length {} (one per phase plus repair)",
                phases + 1
            )));
        }
        if sojourn_rates.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidModel("all sojourn rates must be positive".into()));
        }
        if failure_probs[0] != 0.0 {
            return Err(Error::InvalidModel("failure probability of the repair stage is unused and must be 0".into()));
        }
        if failure_probs[1] != 1.0 {
            return Err(Error::InvalidModel("stage 1 must exit to failure with probability 1".into()));
        }
        if failure_probs[2..].iter().any(|&a| !(0.0..1.0).contains(&a)) {
            return Err(Error::InvalidModel("failure probabilities beyond stage 1 must lie in [0, 1)".into()));
        }
        Ok(Self { phases, sojourn_rates, failure_probs })
    }

    /// All-ones rates and zero failure probabilities above stage 1.
    pub fn uniform(phases: usize) -> Self {
        let mut failure_probs = vec![0.0; phases + 1];
        failure_probs[1] = 1.0;
        Self::new(phases, vec![1.0; phases + 1], failure_probs).expect("uniform model is valid")
    }

    /// Number of degradation phases; also the index of the perfect condition.
    pub fn phases(&self) -> usize {
        self.phases
    }

    /// Exit rate of condition `n` (`n = 0` is the corrective-repair rate).
    pub fn sojourn_rate(&self, condition: u8) -> f64 {
        self.sojourn_rates[condition as usize]
    }

    /// Probability that leaving condition `n >= 1` is a failure.
    pub fn failure_prob(&self, condition: u8) -> f64 {
        self.failure_probs[condition as usize]
    }

    pub fn max_sojourn_rate(&self) -> f64 {
        self.sojourn_rates.iter().cloned().fold(f64::MIN, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Network geometry
// ---------------------------------------------------------------------------

/// Local warehouses, machines and the deterministic response times between
/// them. The central warehouse has no row in `response`: its response time is
/// assumed below the threshold and enters the model only through the
/// central-dispatch cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkInstance {
    warehouse_count: usize,
    machine_count: usize,
    /// `response[i - 1][j - 1]` is the travel time from local warehouse `i` to machine `j`.
    response: Vec<Vec<f64>>,
    /// Planar coordinates the response times were derived from, when known.
    warehouse_coords: Option<Vec<[f64; 2]>>,
    machine_coords: Option<Vec<[f64; 2]>>,
    /// Response-time threshold above which late penalties apply.
    response_threshold: f64,
}

impl NetworkInstance {
    pub fn new(
        response: Vec<Vec<f64>>,
        warehouse_coords: Option<Vec<[f64; 2]>>,
        machine_coords: Option<Vec<[f64; 2]>>,
        response_threshold: f64,
    ) -> Result<Self> {
        let warehouse_count = response.len();
        if warehouse_count == 0 {
            return Err(Error::InvalidModel("need at least one local warehouse".into()));
        }
        let machine_count = response[0].len();
        if machine_count == 0 {
            return Err(Error::InvalidModel("need at least one machine".into()));
        }
        if response.iter().any(|row| row.len() != machine_count) {
            return Err(Error::InvalidModel("response-time matrix is ragged".into()));
        }
        if response.iter().flatten().any(|&r| !(r >= 0.0) || !r.is_finite()) {
            return Err(Error::InvalidModel("response times must be nonnegative".into()));
        }
        if !(response_threshold > 0.0) {
            return Err(Error::InvalidModel("response threshold must be positive".into()));
        }
        // Coverage both ways: every machine reachable in time from some
        // warehouse and every warehouse useful for some machine.
        for j in 0..machine_count {
            if !(0..warehouse_count).any(|i| response[i][j] <= response_threshold) {
                return Err(Error::InvalidModel(format!(
                    "machine {} is farther than the threshold from every warehouse",
                    j + 1
                )));
            }
        }
        for (i, row) in response.iter().enumerate() {
            if !row.iter().any(|&r| r <= response_threshold) {
                return Err(Error::InvalidModel(format!(
                    "warehouse {} is farther than the threshold from every machine",
                    i + 1
                )));
            }
        }
        if let (Some(ws), Some(ms)) = (&warehouse_coords, &machine_coords) {
            if ws.len() != warehouse_count || ms.len() != machine_count {
                return Err(Error::InvalidModel("coordinate lists do not match the matrix shape".into()));
            }
            for (i, w) in ws.iter().enumerate() {
                for (j, m) in ms.iter().enumerate() {
                    let d = ((w[0] - m[0]).powi(2) + (w[1] - m[1]).powi(2)).sqrt();
                    if (d - response[i][j]).abs() > 1e-9 {
                        return Err(Error::InvalidModel(format!(
                            "response[{}][{}] = {} does not match the coordinate distance {}",
                            i + 1,
                            j + 1,
                            response[i][j],
                            d
                        )));
                    }
                }
            }
        }
        Ok(Self {
            warehouse_count,
            machine_count,
            response,
            warehouse_coords,
            machine_coords,
            response_threshold,
        })
    }

    /// Number of local warehouses.
    pub fn warehouse_count(&self) -> usize {
        self.warehouse_count
    }

    /// Number of machines.
    pub fn machine_count(&self) -> usize {
        self.machine_count
    }

    /// Travel time from local warehouse `i` (1-based) to machine `j` (1-based).
    pub fn response_time(&self, warehouse: usize, machine: usize) -> f64 {
        self.response[warehouse - 1][machine - 1]
    }

    pub fn response_threshold(&self) -> f64 {
        self.response_threshold
    }

    pub fn warehouse_coords(&self) -> Option<&[[f64; 2]]> {
        self.warehouse_coords.as_deref()
    }

    pub fn machine_coords(&self) -> Option<&[[f64; 2]]> {
        self.machine_coords.as_deref()
    }

    pub fn response_matrix(&self) -> &[Vec<f64>] {
        &self.response
    }

    pub fn max_response_time(&self) -> f64 {
        self.response.iter().flatten().cloned().fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Costs
// ---------------------------------------------------------------------------

/// Immediate-cost coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    /// Dispatch from the central warehouse.
    pub central_dispatch: f64,
    /// Setup for a corrective dispatch from a local warehouse.
    pub corrective_setup: f64,
    /// Setup for a preventive dispatch from a local warehouse.
    pub preventive_setup: f64,
    /// Setup per relocation.
    pub relocation_setup: f64,
    /// Setup per replenishment order.
    pub replenishment_setup: f64,
    /// Fixed penalty when a corrective response arrives past the threshold.
    pub late_fixed: f64,
    /// Additional penalty per time unit past the threshold.
    pub late_per_unit: f64,
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.central_dispatch,
            self.corrective_setup,
            self.preventive_setup,
            self.relocation_setup,
            self.replenishment_setup,
            self.late_fixed,
            self.late_per_unit,
        ];
        if fields.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
            return Err(Error::InvalidModel("cost components must be nonnegative".into()));
        }
        Ok(())
    }

    /// One of the three standard cost settings (1 = moderate criticality,
    /// 2 = critical machinery, 3 = breakdowns uncritical within the limit).
    pub fn setting(n: u8) -> Option<Self> {
        let (late_per_unit, corrective_setup, central_dispatch) = match n {
            1 => (0.05, 1.0, 10.0),
            2 => (0.1, 10.0, 100.0),
            3 => (0.0, 0.0, 10.0),
            _ => return None,
        };
        let (preventive_setup, relocation_setup) = if n == 3 { (0.0, 0.0) } else { (0.2, 0.2) };
        Some(Self {
            central_dispatch,
            corrective_setup,
            preventive_setup,
            relocation_setup,
            replenishment_setup: 0.0,
            late_fixed: 1.0,
            late_per_unit,
        })
    }
}

// ---------------------------------------------------------------------------
// Full model
// ---------------------------------------------------------------------------

/// Everything needed to define the decision process on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub network: NetworkInstance,
    pub degradation: DegradationModel,
    /// Aggregate inventory level: on-hand plus pipeline over all local warehouses.
    pub inventory: usize,
    /// Replenishment completion rate per pipeline unit.
    pub replenish_rate: f64,
    /// Discount factor per uniformized step, in (0, 1).
    pub discount: f64,
    pub costs: CostParams,
}

impl ModelParams {
    pub fn new(
        network: NetworkInstance,
        degradation: DegradationModel,
        inventory: usize,
        replenish_rate: f64,
        discount: f64,
        costs: CostParams,
    ) -> Result<Self> {
        if !(replenish_rate > 0.0) || !replenish_rate.is_finite() {
            return Err(Error::InvalidModel("replenishment rate must be positive".into()));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(Error::InvalidModel("discount factor must lie in (0, 1)".into()));
        }
        costs.validate()?;
        Ok(Self { network, degradation, inventory, replenish_rate, discount, costs })
    }

    pub fn warehouse_count(&self) -> usize {
        self.network.warehouse_count()
    }

    pub fn machine_count(&self) -> usize {
        self.network.machine_count()
    }

    pub fn phases(&self) -> usize {
        self.degradation.phases()
    }
}

// ---------------------------------------------------------------------------
// System state
// ---------------------------------------------------------------------------

/// Snapshot taken right after an event, before an action is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemState {
    /// On-hand stock per local warehouse (index 0 is warehouse 1).
    pub stock: Vec<u16>,
    /// Outstanding replenishment orders per local warehouse.
    pub pipeline: Vec<u16>,
    /// Condition per machine: 0 failed, `phases` perfect.
    pub condition: Vec<u8>,
    /// Machine whose event opened this epoch; 0 for a replenishment arrival.
    pub trigger: usize,
}

impl SystemState {
    pub fn new(stock: Vec<u16>, pipeline: Vec<u16>, condition: Vec<u8>, trigger: usize) -> Self {
        debug_assert_eq!(stock.len(), pipeline.len());
        debug_assert!(trigger <= condition.len());
        Self { stock, pipeline, condition, trigger }
    }

    pub fn warehouse_count(&self) -> usize {
        self.stock.len()
    }

    pub fn machine_count(&self) -> usize {
        self.condition.len()
    }

    /// On-hand stock at local warehouse `i` (1-based).
    pub fn stock_at(&self, warehouse: usize) -> u16 {
        self.stock[warehouse - 1]
    }

    /// Pipeline orders at local warehouse `i` (1-based).
    pub fn pipeline_at(&self, warehouse: usize) -> u16 {
        self.pipeline[warehouse - 1]
    }

    /// Condition of machine `j` (1-based).
    pub fn condition_of(&self, machine: usize) -> u8 {
        self.condition[machine - 1]
    }

    /// On-hand plus pipeline over all local warehouses; constant along any trajectory.
    pub fn aggregate_level(&self) -> usize {
        self.stock.iter().map(|&f| f as usize).sum::<usize>()
            + self.pipeline.iter().map(|&p| p as usize).sum::<usize>()
    }

    /// True when the opening event was a replenishment arrival.
    pub fn is_replenishment_epoch(&self) -> bool {
        self.trigger == 0
    }
}

/// What kind of event opened a decision epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Epoch {
    /// A replenishment order arrived (`trigger == 0`).
    Replenishment,
    /// The triggering machine just failed.
    Failure,
    /// The triggering machine degraded without failing.
    Degradation,
    /// The triggering machine's corrective repair just completed.
    RepairCompletion,
}

impl Epoch {
    pub fn classify(state: &SystemState, phases: usize) -> Epoch {
        if state.trigger == 0 {
            return Epoch::Replenishment;
        }
        match state.condition_of(state.trigger) {
            0 => Epoch::Failure,
            c if c as usize == phases => Epoch::RepairCompletion,
            _ => Epoch::Degradation,
        }
    }
}

// ---------------------------------------------------------------------------
// Actions
// ---------------------------------------------------------------------------

/// Decision triple `(x, y, z)`: dispatch origin, relocation origin,
/// relocation destination. `-1` means "none"; dispatch origin 0 is the
/// central warehouse. Ordering is lexicographic over the triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 3]", into = "[i32; 3]")]
pub struct Action {
    pub dispatch: i32,
    pub reloc_from: i32,
    pub reloc_to: i32,
}

impl Action {
    pub const NOTHING: Action = Action {
        dispatch: NO_WAREHOUSE,
        reloc_from: NO_WAREHOUSE,
        reloc_to: NO_WAREHOUSE,
    };

    pub fn dispatch_only(from: i32) -> Action {
        Action { dispatch: from, reloc_from: NO_WAREHOUSE, reloc_to: NO_WAREHOUSE }
    }

    /// Dispatch from a local warehouse with a backfill relocation into it.
    pub fn dispatch_with_backfill(from: i32, donor: i32) -> Action {
        Action { dispatch: from, reloc_from: donor, reloc_to: from }
    }

    pub fn relocation(from: i32, to: i32) -> Action {
        Action { dispatch: NO_WAREHOUSE, reloc_from: from, reloc_to: to }
    }

    pub fn has_dispatch(&self) -> bool {
        self.dispatch >= 0
    }

    pub fn is_central_dispatch(&self) -> bool {
        self.dispatch == CENTRAL
    }

    pub fn has_relocation(&self) -> bool {
        self.reloc_from > 0
    }
}

impl From<[i32; 3]> for Action {
    fn from(t: [i32; 3]) -> Self {
        Action { dispatch: t[0], reloc_from: t[1], reloc_to: t[2] }
    }
}

impl From<Action> for [i32; 3] {
    fn from(a: Action) -> Self {
        [a.dispatch, a.reloc_from, a.reloc_to]
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.dispatch, self.reloc_from, self.reloc_to)
    }
}

// ---------------------------------------------------------------------------
// Policy classes
// ---------------------------------------------------------------------------

/// The five policy families compared in the experiments, ordered by
/// increasing action-space size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolicyClass {
    /// Closest-first corrective dispatch, central only when locals are empty.
    Cf,
    /// Optimized corrective dispatch.
    Oc,
    /// Optimized corrective dispatch plus relocations.
    Ocr,
    /// Optimized corrective and preventive dispatch.
    Ocp,
    /// Full action space: corrective, preventive and relocations.
    Ocpr,
}

impl PolicyClass {
    pub const ALL: [PolicyClass; 5] = [
        PolicyClass::Cf,
        PolicyClass::Oc,
        PolicyClass::Ocr,
        PolicyClass::Ocp,
        PolicyClass::Ocpr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyClass::Cf => "CF",
            PolicyClass::Oc => "OC",
            PolicyClass::Ocr => "OCR",
            PolicyClass::Ocp => "OCP",
            PolicyClass::Ocpr => "OCPR",
        }
    }
}

impl std::fmt::Display for PolicyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PolicyClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cf" => Ok(PolicyClass::Cf),
            "oc" => Ok(PolicyClass::Oc),
            "ocr" => Ok(PolicyClass::Ocr),
            "ocp" => Ok(PolicyClass::Ocp),
            "ocpr" => Ok(PolicyClass::Ocpr),
            other => Err(format!("unknown policy class `{other}` (expected cf, oc, ocr, ocp or ocpr)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degradation_model_rejects_bad_inputs() {
        assert!(DegradationModel::new(0, vec![1.0], vec![0.0]).is_err());
        assert!(DegradationModel::new(2, vec![1.0; 3], vec![0.0, 0.5, 0.0]).is_err()); // alpha_1 != 1
        assert!(DegradationModel::new(2, vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).is_err());
        assert!(DegradationModel::new(2, vec![1.0; 3], vec![0.0, 1.0, 1.0]).is_err()); // alpha_2 not < 1
        let m = DegradationModel::uniform(3);
        assert_eq!(m.phases(), 3);
        assert_eq!(m.failure_prob(1), 1.0);
        assert_eq!(m.failure_prob(3), 0.0);
        assert_eq!(m.max_sojourn_rate(), 1.0);
    }

    #[test]
    fn network_requires_two_way_coverage() {
        // machine 2 unreachable within the threshold
        let bad = NetworkInstance::new(vec![vec![1.0, 20.0], vec![2.0, 30.0]], None, None, 10.0);
        assert!(bad.is_err());
        // warehouse 2 useless
        let bad = NetworkInstance::new(vec![vec![1.0, 2.0], vec![20.0, 30.0]], None, None, 10.0);
        assert!(bad.is_err());
        let ok = NetworkInstance::new(vec![vec![1.0, 12.0], vec![20.0, 3.0]], None, None, 10.0).unwrap();
        assert_eq!(ok.response_time(1, 2), 12.0);
        assert_eq!(ok.max_response_time(), 20.0);
    }

    #[test]
    fn cost_settings_match_the_published_table() {
        let s1 = CostParams::setting(1).unwrap();
        assert_eq!(
            (s1.late_per_unit, s1.replenishment_setup, s1.corrective_setup, s1.late_fixed),
            (0.05, 0.0, 1.0, 1.0)
        );
        assert_eq!((s1.preventive_setup, s1.relocation_setup, s1.central_dispatch), (0.2, 0.2, 10.0));
        let s2 = CostParams::setting(2).unwrap();
        assert_eq!((s2.late_per_unit, s2.corrective_setup, s2.central_dispatch), (0.1, 10.0, 100.0));
        assert_eq!((s2.preventive_setup, s2.relocation_setup), (0.2, 0.2));
        let s3 = CostParams::setting(3).unwrap();
        assert_eq!((s3.late_per_unit, s3.corrective_setup, s3.central_dispatch), (0.0, 0.0, 10.0));
        assert_eq!((s3.preventive_setup, s3.relocation_setup, s3.late_fixed), (0.0, 0.0, 1.0));
        assert!(CostParams::setting(4).is_none());
    }

    #[test]
    fn epoch_classification() {
        let phases = 2;
        let s = |cond: Vec<u8>, trigger| SystemState::new(vec![1, 1], vec![0, 0], cond, trigger);
        assert_eq!(Epoch::classify(&s(vec![2, 2], 0), phases), Epoch::Replenishment);
        assert_eq!(Epoch::classify(&s(vec![0, 2], 1), phases), Epoch::Failure);
        assert_eq!(Epoch::classify(&s(vec![1, 2], 1), phases), Epoch::Degradation);
        assert_eq!(Epoch::classify(&s(vec![2, 2], 1), phases), Epoch::RepairCompletion);
    }

    #[test]
    fn action_ordering_is_lexicographic() {
        let mut actions = vec![
            Action::dispatch_only(2),
            Action::NOTHING,
            Action::dispatch_with_backfill(1, 2),
            Action::dispatch_only(0),
            Action::relocation(1, 2),
        ];
        actions.sort();
        assert_eq!(
            actions,
            vec![
                Action::NOTHING,
                Action::relocation(1, 2),
                Action::dispatch_only(0),
                Action::dispatch_with_backfill(1, 2),
                Action::dispatch_only(2),
            ]
        );
    }

    #[test]
    fn policy_class_round_trip() {
        for cls in PolicyClass::ALL {
            let parsed: PolicyClass = cls.name().to_lowercase().parse().unwrap();
            assert_eq!(parsed, cls);
        }
        assert!("xyz".parse::<PolicyClass>().is_err());
    }
}
