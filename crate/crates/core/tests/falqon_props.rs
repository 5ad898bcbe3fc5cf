mod common;

use common::{descent_graphs, step_graphs};
use falqon_core::graph::Graph;
use falqon_core::{gen_erdos_renyi, replay_schedule, run_falqon, Config, Trace};

fn hexagon_with_chords() -> Graph {
    Graph::from_edges(
        6,
        [
            (0, 1),
            (0, 2),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 5),
            (1, 5),
            (0, 4),
        ],
    )
    .unwrap()
}

#[test]
fn trajectory_matches_independent_reference() {
    // (layer index, beta, cost, ratio) from a separate numpy implementation.
    let expected = [
        (0, 0.0, -4.0, 0.5714285714285714),
        (
            1,
            -0.47955016116040916,
            -4.01374728659026,
            0.5733924695128944,
        ),
        (
            2,
            -0.9542038239915147,
            -4.054323843876682,
            0.5791891205538118,
        ),
        (
            9,
            -1.5625041898519676,
            -4.860564618747164,
            0.6943663741067377,
        ),
        (
            99,
            -0.4512584063238755,
            -6.231607144030795,
            0.8902295920043992,
        ),
        (
            299,
            -0.16343247522028181,
            -6.887640397450454,
            0.9839486282072077,
        ),
    ];
    let t = run_falqon(&hexagon_with_chords(), &Config::default()).unwrap();
    assert_eq!(t.optimum, 7);
    for (k, beta, cost, ratio) in expected {
        assert!(
            (t.betas[k] - beta).abs() < 1e-10,
            "beta[{k}] = {}",
            t.betas[k]
        );
        assert!(
            (t.cost[k] - cost).abs() < 1e-10,
            "cost[{k}] = {}",
            t.cost[k]
        );
        assert!(
            (t.ratio[k] - ratio).abs() < 1e-10,
            "ratio[{k}] = {}",
            t.ratio[k]
        );
    }
}

#[test]
fn cost_never_increases_at_default_step() {
    let graphs = descent_graphs();
    assert_eq!(graphs.len(), 20);
    for g in &graphs {
        let t = run_falqon(g, &Config::default()).unwrap();
        for (k, w) in t.cost.windows(2).enumerate() {
            assert!(
                w[1] <= w[0] + 1e-6,
                "{:?} n={} layer {k}: {} -> {}",
                g.family(),
                g.n(),
                w[0],
                w[1]
            );
        }
    }
}

#[test]
fn trace_invariants() {
    for g in descent_graphs().iter().step_by(3) {
        let t = run_falqon(g, &Config::default().with_layers(120)).unwrap();
        assert_eq!(
            [
                t.betas.len(),
                t.a_values.len(),
                t.cost.len(),
                t.cut.len(),
                t.ratio.len()
            ],
            [120; 5]
        );
        for k in 0..t.len() {
            assert!(t.ratio[k] >= 0.0 && t.ratio[k] <= 1.0 + 1e-12);
            assert_eq!(t.ratio[k], t.cut[k] / t.optimum as f64);
            if k + 1 < t.len() {
                assert_eq!(t.betas[k + 1].to_bits(), (-t.a_values[k]).to_bits());
            }
        }
    }
}

#[test]
fn replaying_own_schedule_reproduces_trace() {
    for g in descent_graphs().iter().step_by(4) {
        let cfg = Config::default();
        let closed = run_falqon(g, &cfg).unwrap();
        let open = replay_schedule(g, &closed.betas, &cfg).unwrap();
        let fields = |t: &Trace| {
            [
                t.betas.clone(),
                t.a_values.clone(),
                t.cost.clone(),
                t.cut.clone(),
                t.ratio.clone(),
            ]
        };
        for (a, b) in fields(&closed).iter().zip(fields(&open).iter()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn replay_never_feeds_back() {
    let g = gen_erdos_renyi(8, 0.5, 3).unwrap();
    let schedule = vec![0.4; 30];
    let t = replay_schedule(&g, &schedule, &Config::default().with_layers(30)).unwrap();
    assert_eq!(t.betas, schedule);
    assert!(t.a_values.iter().any(|&a| a != -0.4));
}

#[test]
fn nonzero_initial_gain_is_used_in_the_first_layer() {
    let g = gen_erdos_renyi(6, 0.5, 8).unwrap();
    let t = run_falqon(&g, &Config::default().with_layers(3).with_beta_init(0.5)).unwrap();
    assert_eq!(t.betas[0], 0.5);
    assert!((t.cut[0] - g.edge_count() as f64 / 2.0).abs() > 1e-6);
}

/// Final cost after simulating a fixed physical time with step `dt`.
fn final_cost(g: &Graph, dt: f64, time: f64) -> f64 {
    let layers = (time / dt).round() as usize;
    *run_falqon(g, &Config::default().with_dt(dt).with_layers(layers))
        .unwrap()
        .cost
        .last()
        .unwrap()
}

#[test]
fn halving_the_step_refines_monotonically() {
    let graphs = step_graphs();
    for g in &graphs {
        let time = 0.03 * 300.0;
        let coarse = final_cost(g, 0.03, time);
        let mid = final_cost(g, 0.015, time);
        let fine = final_cost(g, 0.0075, time);
        assert!(
            (fine - mid).abs() < (mid - coarse).abs(),
            "{coarse} {mid} {fine}"
        );
    }
}
