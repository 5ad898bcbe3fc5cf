//! Closed-loop FALQON and open-loop schedule replay.
//!
//! Layer `k` applies `U_C = exp(-i H_C dt)` followed by
//! `U_M(beta_k) = exp(-i beta_k H_M dt)`. After the layer the commutator
//! observable `A_k` is measured; in closed loop the next gain is
//! `beta_(k+1) = -A_k`, which makes the cost non-increasing for small `dt`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{max_cut_brute_force, Family, Graph};
use crate::hamiltonian::{build_cost_diagonal, Mixer};
use crate::scalar::Scalar;
use crate::simulator::init_plus_state;

pub const DEFAULT_DT: f64 = 0.03;
pub const DEFAULT_LAYERS: usize = 300;

/// Column header of the trace CSV.
pub const CSV_HEADER: &str = "layer,beta,a_value,cost,cut,ratio";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|+>^n`, the extremal eigenstate of the transverse-field mixer.
    #[default]
    UniformSuperposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FalqonConfig<T> {
    pub dt: T,
    pub layers: usize,
    pub beta_init: T,
    #[serde(default)]
    pub mixer: Mixer,
    #[serde(default)]
    pub initial_state: InitialState,
}

impl<T: Scalar> Default for FalqonConfig<T> {
    fn default() -> Self {
        FalqonConfig {
            dt: T::from_f64_lossy(DEFAULT_DT),
            layers: DEFAULT_LAYERS,
            beta_init: T::zero(),
            mixer: Mixer::TransverseField,
            initial_state: InitialState::UniformSuperposition,
        }
    }
}

impl<T: Scalar> FalqonConfig<T> {
    pub fn with_dt(mut self, dt: T) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_layers(mut self, layers: usize) -> Self {
        self.layers = layers;
        self
    }

    pub fn with_beta_init(mut self, beta: T) -> Self {
        self.beta_init = beta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive and finite, got {}",
                self.dt
            )));
        }
        if self.layers == 0 {
            return Err(Error::InvalidConfig("layers must be at least 1".into()));
        }
        if !self.beta_init.is_finite() {
            return Err(Error::InvalidConfig("beta_init must be finite".into()));
        }
        Ok(())
    }
}

/// Identifies the graph a trace was produced on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphProvenance {
    #[serde(flatten)]
    pub family: Family,
    pub n: usize,
    pub edges: usize,
    pub seed: u64,
}

impl From<&Graph> for GraphProvenance {
    fn from(g: &Graph) -> Self {
        GraphProvenance {
            family: g.family(),
            n: g.n(),
            edges: g.edge_count(),
            seed: g.seed(),
        }
    }
}

/// Per-layer record of a FALQON run. Entry `k` describes the state after layer `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FalqonTrace<T> {
    pub betas: Vec<T>,
    pub a_values: Vec<T>,
    pub cost: Vec<T>,
    pub cut: Vec<T>,
    pub ratio: Vec<T>,
    pub optimum: usize,
    pub graph: GraphProvenance,
}

impl<T: Scalar> FalqonTrace<T> {
    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    pub fn final_ratio(&self) -> T {
        *self.ratio.last().expect("traces have at least one layer")
    }

    /// CSV with header and one row per layer; numbers carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(96 * (self.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for k in 0..self.len() {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                k + 1,
                self.betas[k],
                self.a_values[k],
                self.cost[k],
                self.cut[k],
                self.ratio[k]
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Reads the `beta` column of a trace CSV.
pub fn parse_schedule_csv<T: Scalar>(text: &str) -> Result<Vec<T>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty trace CSV".into()))?;
    let column = header
        .split(',')
        .position(|h| h.trim() == "beta")
        .ok_or_else(|| Error::Parse("trace CSV has no `beta` column".into()))?;
    lines
        .enumerate()
        .map(|(row, line)| {
            let field = line.split(',').nth(column).ok_or_else(|| {
                Error::Parse(format!("row {} is missing the beta column", row + 1))
            })?;
            field
                .trim()
                .parse::<f64>()
                .map(T::from_f64_lossy)
                .map_err(|_| Error::Parse(format!("row {}: invalid beta `{field}`", row + 1)))
        })
        .collect()
}

/// Closed-loop FALQON: `beta_1 = cfg.beta_init`, then `beta_(k+1) = -A_k`.
pub fn run_falqon<T: Scalar>(g: &Graph, cfg: &FalqonConfig<T>) -> Result<FalqonTrace<T>> {
    evolve(g, cfg, None)
}

/// Runs the same layer structure with a fixed gain sequence, one gain per
/// layer and in order. `A_k` is still recorded but never fed back.
pub fn replay_schedule<T: Scalar>(
    g: &Graph,
    betas: &[T],
    cfg: &FalqonConfig<T>,
) -> Result<FalqonTrace<T>> {
    if betas.is_empty() {
        return Err(Error::InvalidConfig("replay schedule is empty".into()));
    }
    if betas.len() != cfg.layers {
        return Err(Error::LengthMismatch {
            expected: cfg.layers,
            actual: betas.len(),
        });
    }
    if let Some(k) = betas.iter().position(|b| !b.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "schedule entry {k} is not finite"
        )));
    }
    evolve(g, cfg, Some(betas))
}

fn evolve<T: Scalar>(
    g: &Graph,
    cfg: &FalqonConfig<T>,
    schedule: Option<&[T]>,
) -> Result<FalqonTrace<T>> {
    cfg.validate()?;
    let cost = build_cost_diagonal::<T>(g)?;
    let optimum = max_cut_brute_force(g)?.optimum;
    let optimum_t = T::from_f64_lossy(optimum as f64);
    let mut state = match cfg.initial_state {
        InitialState::UniformSuperposition => init_plus_state::<T>(g.n())?,
    };

    let layers = cfg.layers;
    let mut trace = FalqonTrace {
        betas: Vec::with_capacity(layers),
        a_values: Vec::with_capacity(layers),
        cost: Vec::with_capacity(layers),
        cut: Vec::with_capacity(layers),
        ratio: Vec::with_capacity(layers),
        optimum,
        graph: GraphProvenance::from(g),
    };

    let mut beta = cfg.beta_init;
    for k in 0..layers {
        if let Some(betas) = schedule {
            beta = betas[k];
        }
        state.apply_cost_phase(&cost, cfg.dt)?;
        match cfg.mixer {
            Mixer::TransverseField => state.apply_mixer(beta, cfg.dt)?,
        }
        let a = state.measure_commutator(&cost)?;
        let v = state.expected_cost(&cost)?;
        let cut = state.expected_cut(cost.cut())?;
        trace.betas.push(beta);
        trace.a_values.push(a);
        trace.cost.push(v);
        trace.cut.push(cut);
        trace.ratio.push(cut / optimum_t);
        beta = -a;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_erdos_renyi;

    #[test]
    fn single_layer_with_zero_gain_is_a_pure_phase() {
        let g = gen_erdos_renyi(6, 0.5, 2).unwrap();
        let cfg = FalqonConfig::<f64>::default().with_layers(1);
        let t = run_falqon(&g, &cfg).unwrap();
        assert_eq!(t.betas, vec![0.0]);
        assert!((t.cut[0] - g.edge_count() as f64 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_qubit_falqon_converges() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let t = run_falqon(&g, &FalqonConfig::<f64>::default()).unwrap();
        assert_eq!(t.len(), 300);
        // Reference value from an independent numpy simulation of the same layer order.
        assert!(
            (t.final_ratio() - 0.9896354215109592).abs() < 1e-10,
            "final ratio {}",
            t.final_ratio()
        );
        let longer = run_falqon(&g, &FalqonConfig::<f64>::default().with_layers(400)).unwrap();
        assert!(longer.final_ratio() > 0.99);
        assert!(t.ratio.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn feedback_identity_is_exact() {
        let g = gen_erdos_renyi(7, 0.4, 9).unwrap();
        let t = run_falqon(&g, &FalqonConfig::<f64>::default().with_layers(50)).unwrap();
        for k in 0..t.len() - 1 {
            assert_eq!(t.betas[k + 1].to_bits(), (-t.a_values[k]).to_bits());
        }
    }

    #[test]
    fn config_validation() {
        let g = Graph::complete(3).unwrap();
        let bad = [
            FalqonConfig::<f64>::default().with_dt(0.0),
            FalqonConfig::<f64>::default().with_dt(f64::NAN),
            FalqonConfig::<f64>::default().with_layers(0),
        ];
        for cfg in bad {
            assert!(matches!(run_falqon(&g, &cfg), Err(Error::InvalidConfig(_))));
        }
        let cfg = FalqonConfig::<f64>::default().with_layers(3);
        assert!(matches!(
            replay_schedule(&g, &[0.0; 2], &cfg),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(replay_schedule(&g, &[], &cfg.with_layers(1)).is_err());
    }

    #[test]
    fn zero_schedule_keeps_the_uniform_cut() {
        let g = gen_erdos_renyi(8, 0.5, 4).unwrap();
        let cfg = FalqonConfig::<f64>::default().with_layers(20);
        let t = replay_schedule(&g, &[0.0; 20], &cfg).unwrap();
        let half = g.edge_count() as f64 / 2.0;
        assert!(t.cut.iter().all(|c| (c - half).abs() < 1e-12));
    }

    #[test]
    fn csv_layout_and_schedule_round_trip() {
        let g = gen_erdos_renyi(5, 0.6, 1).unwrap();
        let t = run_falqon(&g, &FalqonConfig::<f64>::default().with_layers(4)).unwrap();
        let csv = t.to_csv();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], CSV_HEADER);
        assert_eq!(rows.len(), 5);
        assert!(rows[1].starts_with("1,0.0000000000000000e0,"));
        let betas: Vec<f64> = parse_schedule_csv(&csv).unwrap();
        assert_eq!(betas, t.betas);
        assert!(parse_schedule_csv::<f64>("layer,a_value\n1,2\n").is_err());
    }
}
