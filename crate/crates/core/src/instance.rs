//! Random geometric instance generation and load-parameter bookkeeping.
//!
//! Warehouses and machines are placed uniformly in a square, the whole
//! placement resampled until every machine has a warehouse within the
//! response threshold and vice versa. Response times are the Euclidean
//! distances. Identical seeds give identical instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NetworkInstance;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub warehouses: usize,
    pub machines: usize,
    /// Side of the placement square, in time units.
    pub square_side: f64,
    /// Response-time threshold both coverage constraints refer to.
    pub response_threshold: f64,
    pub max_resamples: usize,
}

impl GeneratorConfig {
    pub fn new(seed: u64, warehouses: usize, machines: usize) -> Self {
        Self {
            seed,
            warehouses,
            machines,
            square_side: 33.0,
            response_threshold: 10.0,
            max_resamples: 100_000,
        }
    }
}

/// Draws a feasible placement for the configured geometry.
pub fn generate_instance(cfg: &GeneratorConfig) -> Result<NetworkInstance> {
    assert!(cfg.square_side > 0.0 && cfg.response_threshold > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.max_resamples {
        let warehouses: Vec<[f64; 2]> = (0..cfg.warehouses)
            .map(|_| [rng.gen_range(0.0..cfg.square_side), rng.gen_range(0.0..cfg.square_side)])
            .collect();
        let machines: Vec<[f64; 2]> = (0..cfg.machines)
            .map(|_| [rng.gen_range(0.0..cfg.square_side), rng.gen_range(0.0..cfg.square_side)])
            .collect();
        let response: Vec<Vec<f64>> = warehouses
            .iter()
            .map(|w| machines.iter().map(|m| ((w[0] - m[0]).powi(2) + (w[1] - m[1]).powi(2)).sqrt()).collect())
            .collect();
        let machine_covered = (0..cfg.machines)
            .all(|j| (0..cfg.warehouses).any(|i| response[i][j] <= cfg.response_threshold));
        let warehouse_covered = (0..cfg.warehouses)
            .all(|i| (0..cfg.machines).any(|j| response[i][j] <= cfg.response_threshold));
        if machine_covered && warehouse_covered {
            return NetworkInstance::new(response, Some(warehouses), Some(machines), cfg.response_threshold);
        }
    }
    Err(Error::InfeasiblePlacement {
        attempts: cfg.max_resamples,
        side: cfg.square_side,
        threshold: cfg.response_threshold,
    })
}

/// Replenishment rate matching a load `rho = J / (N * gamma * K)`.
pub fn gamma_from_load(rho: f64, machines: usize, phases: usize, inventory: usize) -> f64 {
    assert!(rho > 0.0 && machines >= 1 && phases >= 1 && inventory >= 1);
    machines as f64 / (phases as f64 * rho * inventory as f64)
}

/// The load implied by a replenishment rate; inverse of [`gamma_from_load`].
pub fn load_from_gamma(gamma: f64, machines: usize, phases: usize, inventory: usize) -> f64 {
    machines as f64 / (phases as f64 * gamma * inventory as f64)
}

// ---------------------------------------------------------------------------
// Instance file
// ---------------------------------------------------------------------------

/// On-disk instance schema. Distances carry full double precision and the
/// generating seed rides along, so runs replay exactly from the file alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub seed: u64,
    #[serde(rename = "I")]
    pub warehouse_count: usize,
    #[serde(rename = "J")]
    pub machine_count: usize,
    pub t_star: f64,
    pub square_side: f64,
    /// Warehouse coordinates, one `[x, y]` per local warehouse.
    pub warehouses: Vec<[f64; 2]>,
    pub machines: Vec<[f64; 2]>,
    #[serde(rename = "R")]
    pub response: Vec<Vec<f64>>,
}

impl InstanceFile {
    pub fn from_network(network: &NetworkInstance, seed: u64, square_side: f64) -> Self {
        Self {
            seed,
            warehouse_count: network.warehouse_count(),
            machine_count: network.machine_count(),
            t_star: network.response_threshold(),
            square_side,
            warehouses: network.warehouse_coords().unwrap_or_default().to_vec(),
            machines: network.machine_coords().unwrap_or_default().to_vec(),
            response: network.response_matrix().to_vec(),
        }
    }

    pub fn to_network(&self) -> Result<NetworkInstance> {
        if self.response.len() != self.warehouse_count
            || self.response.iter().any(|r| r.len() != self.machine_count)
        {
            return Err(Error::InvalidModel("instance file shape fields disagree with the matrix".into()));
        }
        let coords_present = !self.warehouses.is_empty() && !self.machines.is_empty();
        NetworkInstance::new(
            self.response.clone(),
            coords_present.then(|| self.warehouses.clone()),
            coords_present.then(|| self.machines.clone()),
            self.t_star,
        )
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("instance serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(format!("instance file: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_seeds_give_identical_instances() {
        let cfg = GeneratorConfig::new(42, 2, 2);
        let a = generate_instance(&cfg).unwrap();
        let b = generate_instance(&cfg).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(&GeneratorConfig::new(43, 2, 2)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn coverage_constraints_hold_on_accepted_placements() {
        for seed in 0..50 {
            let cfg = GeneratorConfig::new(seed, 2, 2);
            let inst = generate_instance(&cfg).unwrap();
            for j in 1..=2 {
                let best = (1..=2).map(|i| inst.response_time(i, j)).fold(f64::INFINITY, f64::min);
                assert!(best <= 10.0, "machine {j} uncovered at seed {seed}");
            }
            for i in 1..=2 {
                let best = (1..=2).map(|j| inst.response_time(i, j)).fold(f64::INFINITY, f64::min);
                assert!(best <= 10.0, "warehouse {i} useless at seed {seed}");
            }
            let diameter = 33.0 * std::f64::consts::SQRT_2;
            assert!(inst.response_matrix().iter().flatten().all(|&r| (0.0..=diameter).contains(&r)));
        }
    }

    #[test]
    fn load_and_gamma_invert_each_other() {
        assert_eq!(gamma_from_load(0.5, 2, 2, 2), 1.0);
        assert_eq!(gamma_from_load(1.0, 2, 2, 2), 0.5);
        // rho = J / (N K) makes gamma exactly one.
        let rho = 2.0 / (3.0 * 2.0);
        assert!((gamma_from_load(rho, 2, 3, 2) - 1.0).abs() < 1e-12);
        for rho in [0.3, 0.5, 0.7, 1.0] {
            let gamma = gamma_from_load(rho, 2, 4, 2);
            assert!((load_from_gamma(gamma, 2, 4, 2) - rho).abs() < 1e-12);
        }
    }

    #[test]
    fn placement_means_are_centered() {
        // Uniformity smoke test: empirical means near the square's center.
        let mut sums = [0.0f64; 2];
        let trials = 10_000usize;
        for seed in 0..trials {
            let inst = generate_instance(&GeneratorConfig::new(seed as u64, 2, 2)).unwrap();
            for c in inst.warehouse_coords().unwrap() {
                sums[0] += c[0];
                sums[1] += c[1];
            }
        }
        let center = 16.5;
        let band = 33.0 * 0.05; // central 10% of the square
        for axis in 0..2 {
            let mean = sums[axis] / (2.0 * trials as f64);
            assert!((mean - center).abs() < band, "axis {axis} mean {mean}");
        }
    }

    #[test]
    fn instance_file_round_trip() {
        let cfg = GeneratorConfig::new(7, 2, 2);
        let network = generate_instance(&cfg).unwrap();
        let file = InstanceFile::from_network(&network, cfg.seed, cfg.square_side);
        let text = file.to_json();
        let parsed = InstanceFile::from_json(&text).unwrap();
        assert_eq!(parsed.to_network().unwrap(), network);
        assert_eq!(parsed.seed, 7);
        // The schema keys are fixed.
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["seed", "I", "J", "t_star", "square_side", "warehouses", "machines", "R"] {
            assert!(value.get(key).is_some(), "missing key {key}");
        }
    }

    #[test]
    fn infeasible_geometry_reports_after_capped_resamples() {
        let mut cfg = GeneratorConfig::new(1, 2, 2);
        cfg.square_side = 1000.0;
        cfg.response_threshold = 0.001;
        cfg.max_resamples = 50;
        match generate_instance(&cfg) {
            Err(Error::InfeasiblePlacement { attempts, .. }) => assert_eq!(attempts, 50),
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }
}
