//! Kuramoto vector field and fixed-step integrators.
//!
//! `dθ_i/dt = ω_i + Σ_j w_ij · sin(θ_j − θ_i)`
//!
//! Phases are integrated unwrapped; [`wrap_phase`] is for presentation only.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{kronecker_sum, CouplingMatrix};
use crate::scalar::{count, lit, Scalar};

/// Oscillator phases (radians) at a given time.
///
/// Multiplex states use the layer-major layout: node `i` of layer `l` sits at
/// index `l · N + i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PhaseState<T> {
    pub phases: Vec<T>,
    pub time: T,
}

impl<T: Scalar> PhaseState<T> {
    pub fn new(phases: Vec<T>) -> Self {
        Self {
            phases,
            time: T::zero(),
        }
    }

    pub fn at(phases: Vec<T>, time: T) -> Self {
        Self { phases, time }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![T::zero(); n])
    }

    pub fn from_f64(phases: &[f64]) -> Self {
        Self::new(phases.iter().map(|&x| lit(x)).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.phases.iter().all(|x| x.is_finite())
    }

    /// Copy with every phase mapped into `[-π, π)`.
    pub fn wrapped(&self) -> Self {
        Self {
            phases: self.phases.iter().map(|&x| wrap_phase(x)).collect(),
            time: self.time,
        }
    }

    /// Copy with `c` added to every phase.
    pub fn shifted(&self, c: T) -> Self {
        Self {
            phases: self.phases.iter().map(|&x| x + c).collect(),
            time: self.time,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.len(), other.len(), "state lengths differ");
        self.phases
            .iter()
            .zip(&other.phases)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }
}

/// Natural frequencies (radians per time unit), one per node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Scalar")]
pub struct FrequencyVector<T>(pub Vec<T>);

impl<T: Scalar> FrequencyVector<T> {
    pub fn zeros(n: usize) -> Self {
        Self(vec![T::zero(); n])
    }

    pub fn uniform(n: usize, value: T) -> Self {
        Self(vec![value; n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

/// Intra-layer (`N×N`) and inter-layer (`M×M`) couplings with their scalar
/// strengths and natural frequencies.
///
/// Node `(i, l)` of the assembled network gets frequency
/// `omega_intra[i] + omega_inter[l]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MultiplexSystem<T> {
    pub intra: CouplingMatrix<T>,
    pub inter: CouplingMatrix<T>,
    pub eps_intra: T,
    pub eps_inter: T,
    pub omega_intra: FrequencyVector<T>,
    pub omega_inter: FrequencyVector<T>,
}

impl<T: Scalar> MultiplexSystem<T> {
    pub fn new(
        intra: CouplingMatrix<T>,
        inter: CouplingMatrix<T>,
        eps_intra: T,
        eps_inter: T,
        omega_intra: FrequencyVector<T>,
        omega_inter: FrequencyVector<T>,
    ) -> Result<Self> {
        let sys = Self {
            intra,
            inter,
            eps_intra,
            eps_inter,
            omega_intra,
            omega_inter,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// System with zero natural frequencies.
    pub fn without_frequencies(
        intra: CouplingMatrix<T>,
        inter: CouplingMatrix<T>,
        eps_intra: T,
        eps_inter: T,
    ) -> Result<Self> {
        let (n, m) = (intra.n_rows(), inter.n_rows());
        Self::new(
            intra,
            inter,
            eps_intra,
            eps_inter,
            FrequencyVector::zeros(n),
            FrequencyVector::zeros(m),
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("intra", &self.intra), ("inter", &self.inter)] {
            m.ensure_symmetric()?;
            if !m.has_zero_diagonal() {
                return Err(Error::InvalidParameter {
                    name: if name == "intra" { "intra" } else { "inter" },
                    reason: "coupling matrix must have a zero diagonal".into(),
                });
            }
        }
        if !self.eps_intra.is_finite() || !self.eps_inter.is_finite() {
            return Err(Error::NonFinite {
                context: "coupling strengths",
            });
        }
        check_len("omega_intra", self.intra.n_rows(), self.omega_intra.len())?;
        check_len("omega_inter", self.inter.n_rows(), self.omega_inter.len())?;
        if self
            .omega_intra
            .0
            .iter()
            .chain(&self.omega_inter.0)
            .any(|w| !w.is_finite())
        {
            return Err(Error::NonFinite {
                context: "natural frequencies",
            });
        }
        Ok(())
    }

    /// Nodes per layer.
    pub fn n(&self) -> usize {
        self.intra.n_rows()
    }

    /// Number of layers.
    pub fn m(&self) -> usize {
        self.inter.n_rows()
    }

    /// `eps_intra · A_intra`.
    pub fn intra_weights(&self) -> CouplingMatrix<T> {
        self.intra.scaled(self.eps_intra)
    }

    /// `eps_inter · A_inter`.
    pub fn inter_weights(&self) -> CouplingMatrix<T> {
        self.inter.scaled(self.eps_inter)
    }
}

fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// Assembled `NM×NM` coupling and `NM` frequencies of a multiplex system.
pub fn assemble_multiplex<T: Scalar>(
    sys: &MultiplexSystem<T>,
) -> Result<(CouplingMatrix<T>, FrequencyVector<T>)> {
    let weights = kronecker_sum(&sys.intra_weights(), &sys.inter_weights())?;
    let mut omega = Vec::with_capacity(sys.n() * sys.m());
    for &w_layer in &sys.omega_inter.0 {
        omega.extend(sys.omega_intra.0.iter().map(|&w_node| w_node + w_layer));
    }
    Ok((weights, FrequencyVector(omega)))
}

/// Nonzero off-diagonal couplings per row, in ascending column order.
#[derive(Clone, Debug)]
pub(crate) struct CouplingRows<T> {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<T>,
}

impl<T: Scalar> CouplingRows<T> {
    pub(crate) fn new(w: &CouplingMatrix<T>) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::NotSquare {
                rows: w.n_rows(),
                cols: w.n_cols(),
            });
        }
        let n = w.n_rows();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for i in 0..n {
            for (j, &x) in w.row(i).iter().enumerate() {
                if j != i && x != T::zero() {
                    cols.push(j);
                    weights.push(x);
                }
            }
            offsets.push(cols.len());
        }
        Ok(Self {
            offsets,
            cols,
            weights,
        })
    }

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub(crate) fn rhs_into(&self, theta: &[T], omega: &[T], out: &mut [T]) {
        for i in 0..self.len() {
            let ti = theta[i];
            let mut acc = T::zero();
            for k in self.offsets[i]..self.offsets[i + 1] {
                acc = acc + self.weights[k] * (theta[self.cols[k]] - ti).sin();
            }
            out[i] = omega[i] + acc;
        }
    }
}

/// Kuramoto right-hand side `ω_i + Σ_j w_ij sin(θ_j − θ_i)`.
pub fn kuramoto_rhs<T: Scalar>(
    state: &PhaseState<T>,
    omega: &FrequencyVector<T>,
    weights: &CouplingMatrix<T>,
) -> Result<Vec<T>> {
    let rows = CouplingRows::new(weights)?;
    check_len("kuramoto_rhs state", weights.n_rows(), state.len())?;
    check_len("kuramoto_rhs omega", weights.n_rows(), omega.len())?;
    let mut out = vec![T::zero(); state.len()];
    rows.rhs_into(&state.phases, omega.as_slice(), &mut out);
    Ok(out)
}

/// Maps `x` into `[-π, π)`.
pub fn wrap_phase<T: Scalar>(x: T) -> T {
    let pi = T::PI();
    let two_pi = pi + pi;
    let mut r = x - two_pi * ((x + pi) / two_pi).floor();
    if r >= pi {
        r = r - two_pi;
    }
    if r < -pi {
        r = r + two_pi;
    }
    r
}

/// Fixed-step time integration scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Euler,
    Rk4,
}

/// Steps one phase vector in place with a fixed scheme and step size.
#[derive(Clone, Debug)]
pub struct Stepper<T> {
    rows: CouplingRows<T>,
    omega: Vec<T>,
    dt: T,
    scheme: Scheme,
    k: [Vec<T>; 4],
    tmp: Vec<T>,
}

impl<T: Scalar> Stepper<T> {
    pub fn new(
        weights: &CouplingMatrix<T>,
        omega: &FrequencyVector<T>,
        dt: T,
        scheme: Scheme,
    ) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("time step must be positive and finite, got {dt}"),
            });
        }
        let rows = CouplingRows::new(weights)?;
        let n = weights.n_rows();
        check_len("stepper omega", n, omega.len())?;
        Ok(Self {
            rows,
            omega: omega.0.clone(),
            dt,
            scheme,
            k: std::array::from_fn(|_| vec![T::zero(); n]),
            tmp: vec![T::zero(); n],
        })
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Advances `theta` by one step.
    pub fn step(&mut self, theta: &mut [T]) {
        let dt = self.dt;
        match self.scheme {
            Scheme::Euler => {
                self.rows.rhs_into(theta, &self.omega, &mut self.k[0]);
                for (x, &d) in theta.iter_mut().zip(&self.k[0]) {
                    *x = *x + dt * d;
                }
            }
            Scheme::Rk4 => {
                let half = dt * lit(0.5);
                let [k1, k2, k3, k4] = &mut self.k;
                self.rows.rhs_into(theta, &self.omega, k1);
                for ((t, &x), &d) in self.tmp.iter_mut().zip(theta.iter()).zip(k1.iter()) {
                    *t = x + half * d;
                }
                self.rows.rhs_into(&self.tmp, &self.omega, k2);
                for ((t, &x), &d) in self.tmp.iter_mut().zip(theta.iter()).zip(k2.iter()) {
                    *t = x + half * d;
                }
                self.rows.rhs_into(&self.tmp, &self.omega, k3);
                for ((t, &x), &d) in self.tmp.iter_mut().zip(theta.iter()).zip(k3.iter()) {
                    *t = x + dt * d;
                }
                self.rows.rhs_into(&self.tmp, &self.omega, k4);
                let sixth = dt / lit(6.0);
                let two = lit::<T>(2.0);
                for i in 0..theta.len() {
                    theta[i] = theta[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
                }
            }
        }
    }
}

/// Index of the first non-finite phase, if any.
pub(crate) fn first_non_finite<T: Scalar>(theta: &[T]) -> Option<usize> {
    theta.iter().position(|x| !x.is_finite())
}

/// `true` when step `k` of `n_steps` is recorded.
#[inline]
pub(crate) fn is_recorded(k: usize, n_steps: usize, record_every: usize) -> bool {
    k.is_multiple_of(record_every) || k == n_steps
}

/// Provenance attached to a trajectory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub scenario: String,
    pub seed: Option<u64>,
    pub dt: f64,
    pub record_every: usize,
}

/// Phase states sampled every `record_every` steps, plus the final step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<PhaseState<T>>,
    pub metadata: TrajectoryMeta,
}

impl<T: Scalar> Trajectory<T> {
    pub(crate) fn new(dt: T, record_every: usize) -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            metadata: TrajectoryMeta {
                dt: crate::scalar::to_f64(dt),
                record_every,
                ..TrajectoryMeta::default()
            },
        }
    }

    pub(crate) fn push(&mut self, time: T, phases: &[T]) {
        self.times.push(time);
        self.states.push(PhaseState::at(phases.to_vec(), time));
    }

    pub fn with_metadata(mut self, scenario: impl Into<String>, seed: Option<u64>) -> Self {
        self.metadata.scenario = scenario.into();
        self.metadata.seed = seed;
        self
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &PhaseState<T> {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    /// CSV with header `time,theta_0,…` and unwrapped phases at 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let dim = self.states.first().map_or(0, PhaseState::len);
        let mut header = String::from("time");
        for i in 0..dim {
            header.push_str(&format!(",theta_{i}"));
        }
        writeln!(w, "{header}")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            write!(w, "{t:.16e}")?;
            for x in &s.phases {
                write!(w, ",{x:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Shared driver for [`integrate_euler`] and [`integrate_rk4`].
pub fn integrate<T: Scalar>(
    scheme: Scheme,
    state0: &PhaseState<T>,
    omega: &FrequencyVector<T>,
    weights: &CouplingMatrix<T>,
    dt: T,
    n_steps: usize,
    record_every: usize,
) -> Result<Trajectory<T>> {
    if n_steps == 0 {
        return Err(Error::InvalidParameter {
            name: "n_steps",
            reason: "need at least one step".into(),
        });
    }
    if record_every == 0 {
        return Err(Error::InvalidParameter {
            name: "record_every",
            reason: "must be at least 1".into(),
        });
    }
    check_len("initial state", weights.n_rows(), state0.len())?;
    if let Some(node) = first_non_finite(&state0.phases) {
        return Err(Error::Divergence { step: 0, node });
    }
    let mut stepper = Stepper::new(weights, omega, dt, scheme)?;
    let mut theta = state0.phases.clone();
    let mut traj = Trajectory::new(dt, record_every);
    let t0 = state0.time;
    traj.push(t0, &theta);
    for k in 1..=n_steps {
        stepper.step(&mut theta);
        if let Some(node) = first_non_finite(&theta) {
            return Err(Error::Divergence { step: k, node });
        }
        if is_recorded(k, n_steps, record_every) {
            traj.push(t0 + count::<T>(k) * dt, &theta);
        }
    }
    Ok(traj)
}

/// Forward Euler: `θ_{k+1} = θ_k + dt · f(θ_k)`.
pub fn integrate_euler<T: Scalar>(
    state0: &PhaseState<T>,
    omega: &FrequencyVector<T>,
    weights: &CouplingMatrix<T>,
    dt: T,
    n_steps: usize,
    record_every: usize,
) -> Result<Trajectory<T>> {
    integrate(Scheme::Euler, state0, omega, weights, dt, n_steps, record_every)
}

/// Classical fourth-order Runge–Kutta with a fixed step.
pub fn integrate_rk4<T: Scalar>(
    state0: &PhaseState<T>,
    omega: &FrequencyVector<T>,
    weights: &CouplingMatrix<T>,
    dt: T,
    n_steps: usize,
    record_every: usize,
) -> Result<Trajectory<T>> {
    integrate(Scheme::Rk4, state0, omega, weights, dt, n_steps, record_every)
}
