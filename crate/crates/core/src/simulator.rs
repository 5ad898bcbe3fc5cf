//! Exact state-vector kernels for the FALQON layer structure.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::graph::MAX_EXACT_VERTICES;
use crate::hamiltonian::{CostDiagonal, CutDiagonal};
use crate::scalar::Scalar;

/// Pure state of `n` qubits as `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

/// The uniform superposition `|+>^n`.
pub fn init_plus_state<T: Scalar>(n: usize) -> Result<StateVector<T>> {
    check_qubits(n)?;
    let amp = T::from_f64_lossy(2f64.powf(-(n as f64) / 2.0));
    Ok(StateVector {
        n,
        amps: vec![Complex::new(amp, T::zero()); 1 << n],
    })
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidVertexCount {
            n,
            reason: "a state needs at least one qubit",
        });
    }
    if n > MAX_EXACT_VERTICES {
        return Err(Error::TooLarge {
            what: "state vector",
            n,
            max: MAX_EXACT_VERTICES,
        });
    }
    Ok(())
}

fn check_step<T: Scalar>(dt: T) -> Result<()> {
    if dt > T::zero() && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "time step must be positive and finite, got {dt}"
        )))
    }
}

impl<T: Scalar> StateVector<T> {
    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        if index >= 1 << n {
            return Err(Error::InvalidConfig(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(StateVector { n, amps })
    }

    /// Wraps arbitrary amplitudes, rescaling them to unit norm.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::InvalidConfig(format!(
                "amplitude count {len} is not 2^n with n >= 1"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_qubits(n)?;
        let norm = amps
            .iter()
            .map(|a| a.norm_sqr())
            .fold(T::zero(), |s, x| s + x)
            .sqrt();
        let usable = norm > T::zero() && norm.is_finite();
        if !usable {
            return Err(Error::InvalidConfig(
                "amplitudes have zero or non-finite norm".into(),
            ));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps
            .iter()
            .map(|a| a.norm_sqr())
            .fold(T::zero(), |s, x| s + x)
    }

    pub fn probabilities(&self) -> impl Iterator<Item = T> + '_ {
        self.amps.iter().map(|a| a.norm_sqr())
    }

    fn check_dim(&self, operator: usize) -> Result<()> {
        if operator == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                state: self.n,
                operator,
            })
        }
    }

    /// Applies `exp(-i H_C dt)` with `H_C` the cost table.
    pub fn apply_cost_phase(&mut self, cost: &CostDiagonal<T>, dt: T) -> Result<()> {
        self.check_dim(cost.n())?;
        check_step(dt)?;
        // The cost is -cut and cut values are small integers, so one phase per level suffices.
        let levels = cost.cut().values();
        let top = cost.cut().max() as usize;
        let phases: Vec<Complex<T>> = (0..=top)
            .map(|c| Complex::from_polar(T::one(), T::from_f64_lossy(c as f64) * dt))
            .collect();
        for (amp, &level) in self.amps.iter_mut().zip(levels) {
            *amp = *amp * phases[level as usize];
        }
        Ok(())
    }

    /// Applies `exp(-i beta dt sum_i X_i)`.
    pub fn apply_mixer(&mut self, beta: T, dt: T) -> Result<()> {
        check_step(dt)?;
        let (s, c) = (beta * dt).sin_cos();
        if self.n == 1 {
            self.apply_x_rotation(0, beta * dt);
            return Ok(());
        }
        // Qubits 0 and 1 act within each aligned block of four amplitudes.
        for block in self.amps.chunks_exact_mut(4) {
            let [x0, x1, x2, x3] = [block[0], block[1], block[2], block[3]];
            let (y0, y1) = rotate_pair(x0, x1, s, c);
            let (y2, y3) = rotate_pair(x2, x3, s, c);
            (block[0], block[2]) = rotate_pair(y0, y2, s, c);
            (block[1], block[3]) = rotate_pair(y1, y3, s, c);
        }
        // Higher qubits two at a time, so each pass touches memory once per pair of rotations.
        let mut qubit = 2;
        while qubit + 1 < self.n {
            let stride = 1usize << qubit;
            for block in self.amps.chunks_exact_mut(4 * stride) {
                let (left, right) = block.split_at_mut(2 * stride);
                let (q0, q1) = left.split_at_mut(stride);
                let (q2, q3) = right.split_at_mut(stride);
                for (((a, b), c2), d) in q0
                    .iter_mut()
                    .zip(q1.iter_mut())
                    .zip(q2.iter_mut())
                    .zip(q3.iter_mut())
                {
                    let (y0, y1) = rotate_pair(*a, *b, s, c);
                    let (y2, y3) = rotate_pair(*c2, *d, s, c);
                    (*a, *c2) = rotate_pair(y0, y2, s, c);
                    (*b, *d) = rotate_pair(y1, y3, s, c);
                }
            }
            qubit += 2;
        }
        if qubit < self.n {
            self.rotate_qubit(qubit, s, c);
        }
        Ok(())
    }

    /// Applies `exp(-i theta X_q)` to one qubit.
    pub fn apply_x_rotation(&mut self, qubit: usize, theta: T) {
        assert!(
            qubit < self.n,
            "qubit {qubit} out of range for {} qubits",
            self.n
        );
        let (s, c) = theta.sin_cos();
        self.rotate_qubit(qubit, s, c);
    }

    fn rotate_qubit(&mut self, qubit: usize, s: T, c: T) {
        let stride = 1usize << qubit;
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                (*a, *b) = rotate_pair(*a, *b, s, c);
            }
        }
    }

    /// `sum_b |psi_b|^2 cut_b`.
    pub fn expected_cut(&self, cut: &CutDiagonal) -> Result<T> {
        self.check_dim(cut.n())?;
        Ok(self
            .amps
            .iter()
            .zip(cut.values())
            .fold(T::zero(), |s, (a, &c)| {
                s + a.norm_sqr() * T::from_f64_lossy(c as f64)
            }))
    }

    /// `<psi| H_C |psi>` for the cost table.
    pub fn expected_cost(&self, cost: &CostDiagonal<T>) -> Result<T> {
        self.check_dim(cost.n())?;
        Ok(self
            .amps
            .iter()
            .zip(cost.values())
            .fold(T::zero(), |s, (a, &c)| s + a.norm_sqr() * c))
    }

    /// `A = <psi| i[H_M, H_C] |psi> = -2 Im <psi| H_M H_C |psi>`.
    ///
    /// `H_M H_C` couples each basis index `b` to `b ^ (1 << q)`. Summing the
    /// two directions of every such pair gives
    /// `Im(conj(psi_b) psi_b' c_b' + conj(psi_b') psi_b c_b) = (c_b' - c_b) Im(conj(psi_b) psi_b')`,
    /// so a single pass per qubit suffices.
    pub fn measure_commutator(&self, cost: &CostDiagonal<T>) -> Result<T> {
        self.check_dim(cost.n())?;
        let values = cost.values();
        // Independent partial sums break the floating-point add dependency chain.
        let mut lanes = [T::zero(); 4];
        if self.n == 1 {
            lanes[0] = pair_term(self.amps[0], self.amps[1], values[0], values[1]);
        } else {
            for (a, c) in self.amps.chunks_exact(4).zip(values.chunks_exact(4)) {
                lanes[0] = lanes[0] + pair_term(a[0], a[1], c[0], c[1]);
                lanes[1] = lanes[1] + pair_term(a[2], a[3], c[2], c[3]);
                lanes[2] = lanes[2] + pair_term(a[0], a[2], c[0], c[2]);
                lanes[3] = lanes[3] + pair_term(a[1], a[3], c[1], c[3]);
            }
        }
        for qubit in 2..self.n {
            let stride = 1usize << qubit;
            for (amps, costs) in self
                .amps
                .chunks_exact(2 * stride)
                .zip(values.chunks_exact(2 * stride))
            {
                let (lo, hi) = amps.split_at(stride);
                let (c_lo, c_hi) = costs.split_at(stride);
                let runs = lo.chunks_exact(4).zip(hi.chunks_exact(4));
                for ((a, b), (ca, cb)) in runs.zip(c_lo.chunks_exact(4).zip(c_hi.chunks_exact(4))) {
                    for j in 0..4 {
                        lanes[j] = lanes[j] + pair_term(a[j], b[j], ca[j], cb[j]);
                    }
                }
            }
        }
        let acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
        Ok(-(acc + acc))
    }
}

/// `(c a - i s b, -i s a + c b)`, the action of `exp(-i theta X)` with `(s, c) = sin_cos(theta)`.
#[inline(always)]
fn rotate_pair<T: Scalar>(a: Complex<T>, b: Complex<T>, s: T, c: T) -> (Complex<T>, Complex<T>) {
    (
        Complex::new(c * a.re + s * b.im, c * a.im - s * b.re),
        Complex::new(c * b.re + s * a.im, c * b.im - s * a.re),
    )
}

/// Contribution of the pair `(b, b')` to `Im <psi| H_M H_C |psi>`.
#[inline(always)]
fn pair_term<T: Scalar>(lo: Complex<T>, hi: Complex<T>, c_lo: T, c_hi: T) -> T {
    (c_hi - c_lo) * (lo.re * hi.im - lo.im * hi.re)
}
