#![allow(dead_code)]
//! Helpers shared by the integration test targets.

use falqon_core::graph::Graph;
use falqon_core::{build_cost_diagonal, gen_erdos_renyi, gen_three_regular, State, StateVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = Complex<f64>;

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> State {
    let amps = (0..1 << n)
        .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::from_amplitudes(amps).unwrap()
}

pub fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> Graph {
    let n = rng.random_range(2..=max_n);
    gen_erdos_renyi(n, rng.random_range(0.2..=1.0), rng.random()).unwrap()
}

/// Dense matrices, row-major, built from explicit Kronecker products.
mod dense {
    use super::C;

    pub type Mat = Vec<Vec<C>>;

    pub fn identity(d: usize) -> Mat {
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        if i == j {
                            C::new(1.0, 0.0)
                        } else {
                            C::new(0.0, 0.0)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn kron(a: &Mat, b: &Mat) -> Mat {
        let (ra, rb) = (a.len(), b.len());
        let mut out = vec![vec![C::new(0.0, 0.0); ra * rb]; ra * rb];
        for i in 0..ra {
            for j in 0..ra {
                for k in 0..rb {
                    for l in 0..rb {
                        out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        out
    }

    /// `X` on qubit `q` of `n`; the leftmost factor is the most significant qubit.
    pub fn x_on(q: usize, n: usize) -> Mat {
        let x = vec![
            vec![C::new(0.0, 0.0), C::new(1.0, 0.0)],
            vec![C::new(1.0, 0.0), C::new(0.0, 0.0)],
        ];
        let id = identity(2);
        (0..n).rev().fold(identity(1), |acc, k| {
            kron(&acc, if k == q { &x } else { &id })
        })
    }

    pub fn add(a: &Mat, b: &Mat) -> Mat {
        a.iter()
            .zip(b)
            .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
            .collect()
    }

    pub fn mul(a: &Mat, b: &Mat) -> Mat {
        let d = a.len();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    pub fn diag(values: &[f64]) -> Mat {
        let mut m = identity(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[i][i] = C::new(v, 0.0);
        }
        m
    }

    pub fn expectation(m: &Mat, psi: &[C]) -> C {
        psi.iter()
            .enumerate()
            .map(|(i, a)| a.conj() * m[i].iter().zip(psi).map(|(x, b)| x * b).sum::<C>())
            .sum()
    }
}

pub fn dense_commutator(g: &Graph, psi: &[C]) -> f64 {
    let n = g.n();
    let cost = build_cost_diagonal::<f64>(g).unwrap();
    let hc = dense::diag(cost.values());
    let hm = (0..n)
        .map(|q| dense::x_on(q, n))
        .reduce(|a, b| dense::add(&a, &b))
        .unwrap();
    let comm: dense::Mat = dense::mul(&hm, &hc)
        .iter()
        .zip(dense::mul(&hc, &hm))
        .map(|(r, s)| {
            r.iter()
                .zip(s)
                .map(|(x, y)| C::new(0.0, 1.0) * (x - y))
                .collect()
        })
        .collect();
    let value = dense::expectation(&comm, psi);
    assert!(value.im.abs() < 1e-12, "i[H_M, H_C] is Hermitian");
    value.re
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Monotone-descent graph set: 3-regular and Erdős–Rényi graphs at donor
/// densities, n in {6, 8, 10}.
pub fn descent_graphs() -> Vec<Graph> {
    let mut graphs = Vec::new();
    for (n, seeds) in [(6, 0..3), (8, 0..3), (10, 0..2)] {
        for seed in seeds {
            graphs.push(gen_three_regular(n, seed).unwrap());
        }
    }
    for n in [6, 8, 10] {
        for (k, p) in [0.2, 0.3, 0.4, 0.5].into_iter().enumerate() {
            graphs.push(gen_erdos_renyi(n, p, 100 + k as u64).unwrap());
        }
    }
    graphs
}

/// Five fixed small instances for step-size studies.
pub fn step_graphs() -> Vec<Graph> {
    vec![
        gen_three_regular(6, 1).unwrap(),
        gen_three_regular(8, 2).unwrap(),
        gen_erdos_renyi(6, 0.5, 3).unwrap(),
        gen_erdos_renyi(8, 0.4, 4).unwrap(),
        gen_erdos_renyi(8, 0.3, 5).unwrap(),
    ]
}
