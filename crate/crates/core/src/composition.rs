//! Composing multiplex solutions from intra- and inter-layer solutions.
//!
//! If `ψ(t)` solves the `N`-node system on `eps_intra · A_intra` and `φ(t)`
//! solves the `M`-node system on `eps_inter · A_inter`, then
//! `θ_{l·N+i}(t) = ψ_i(t) + φ_l(t)` solves the assembled `NM`-node system,
//! and the global order parameter factorizes as `R = R_intra · R_inter`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    assemble_multiplex, first_non_finite, is_recorded, wrap_phase, MultiplexSystem, PhaseState, Scheme, Stepper,
    Trajectory,
};
use crate::error::{Error, Result};
use crate::graph::SeededRng;
use crate::scalar::{count, Scalar};

/// Subsystem states together with the multiplex state they compose into.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ComposedState<T> {
    pub psi: PhaseState<T>,
    pub phi: PhaseState<T>,
    pub theta: PhaseState<T>,
}

impl<T: Scalar> ComposedState<T> {
    pub fn new(psi: PhaseState<T>, phi: PhaseState<T>) -> Self {
        let theta = compose_state(&psi, &phi);
        Self { psi, phi, theta }
    }
}

/// Layer-major composition: entry `l·N + i` is `psi[i] + phi[l]`.
pub fn compose_state<T: Scalar>(psi: &PhaseState<T>, phi: &PhaseState<T>) -> PhaseState<T> {
    let mut theta = Vec::with_capacity(psi.len() * phi.len());
    for &layer in &phi.phases {
        theta.extend(psi.phases.iter().map(|&node| node + layer));
    }
    PhaseState::at(theta, psi.time)
}

/// Kuramoto order parameter `|Σ_j exp(iθ_j)| / n`, clamped to `[0, 1]`.
pub fn order_parameter<T: Scalar>(state: &PhaseState<T>) -> Result<T> {
    order_parameter_of(&state.phases)
}

pub(crate) fn order_parameter_of<T: Scalar>(phases: &[T]) -> Result<T> {
    if phases.is_empty() {
        return Err(Error::EmptyState);
    }
    let (mut re, mut im) = (T::zero(), T::zero());
    for &x in phases {
        let (s, c) = x.sin_cos();
        re = re + c;
        im = im + s;
    }
    Ok((re.hypot(im) / count(phases.len())).min(T::one()))
}

/// `R(psi) · R(phi)`, which equals `R(compose_state(psi, phi))`.
pub fn order_parameter_product<T: Scalar>(psi: &PhaseState<T>, phi: &PhaseState<T>) -> Result<T> {
    Ok(order_parameter(psi)? * order_parameter(phi)?)
}

/// Twisted state with winding number `p`: entry `j` is `−2π·p·j/n` wrapped
/// into `[-π, π)`.
///
/// `p·j` is reduced modulo `n` before scaling; this is exact and keeps the
/// phases as close to the ideal lattice as the scalar allows. Any integer
/// `p` is accepted; winding numbers outside `0..=n/2` alias onto that range
/// (`p` and `p ± n` give the same state, `−p` the mirror image).
pub fn twisted_state<T: Scalar>(n: usize, p: i64) -> PhaseState<T> {
    let n_i = n as i64;
    let two_pi = T::PI() + T::PI();
    let phases = (0..n_i)
        .map(|j| {
            let r = (p * j).rem_euclid(n_i.max(1));
            wrap_phase(-two_pi * count::<T>(r as usize) / count::<T>(n))
        })
        .collect();
    PhaseState::new(phases)
}

/// Adds an independent `eta · U(-π, π)` draw to every entry, then wraps the
/// whole pattern into `[-π, π)`.
pub fn perturb<T: Scalar>(state: &PhaseState<T>, eta: T, rng: &mut SeededRng) -> Result<PhaseState<T>> {
    if !(eta >= T::zero()) || !eta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "eta",
            reason: format!("perturbation amplitude must be finite and >= 0, got {eta}"),
        });
    }
    let phases = state
        .phases
        .iter()
        .map(|&x| {
            let kick: T = rng.phase();
            wrap_phase(x + eta * kick)
        })
        .collect();
    Ok(PhaseState::at(phases, state.time))
}

/// Full, intra-layer and inter-layer trajectories integrated side by side.
#[derive(Clone, Debug)]
pub struct ComposedRun<T> {
    pub full: Trajectory<T>,
    pub intra: Trajectory<T>,
    pub inter: Trajectory<T>,
    /// Max over every step and node of `|θ_full − (ψ + φ)|`.
    pub max_residual: T,
}

impl<T: Scalar> ComposedRun<T> {
    pub fn order_parameters(&self) -> Result<OrderParameterSeries<T>> {
        OrderParameterSeries::from_run(self)
    }
}

fn max_composition_gap<T: Scalar>(theta: &[T], psi: &[T], phi: &[T]) -> T {
    let n = psi.len();
    let mut worst = T::zero();
    for (l, &layer) in phi.iter().enumerate() {
        for (i, &node) in psi.iter().enumerate() {
            worst = worst.max((theta[l * n + i] - (node + layer)).abs());
        }
    }
    worst
}

/// Integrates the assembled system from `compose_state(psi0, phi0)` and both
/// subsystems from `psi0`, `phi0` in lockstep, tracking the composition gap at
/// every step.
pub fn simulate_composed<T: Scalar>(
    sys: &MultiplexSystem<T>,
    psi0: &PhaseState<T>,
    phi0: &PhaseState<T>,
    dt: T,
    n_steps: usize,
    record_every: usize,
    scheme: Scheme,
) -> Result<ComposedRun<T>> {
    sys.validate()?;
    if psi0.len() != sys.n() {
        return Err(Error::DimensionMismatch {
            context: "psi0",
            expected: sys.n(),
            found: psi0.len(),
        });
    }
    if phi0.len() != sys.m() {
        return Err(Error::DimensionMismatch {
            context: "phi0",
            expected: sys.m(),
            found: phi0.len(),
        });
    }
    if n_steps == 0 || record_every == 0 {
        return Err(Error::InvalidParameter {
            name: if n_steps == 0 { "n_steps" } else { "record_every" },
            reason: "must be at least 1".into(),
        });
    }
    let (weights, omega) = assemble_multiplex(sys)?;
    let mut full_stepper = Stepper::new(&weights, &omega, dt, scheme)?;
    let mut intra_stepper = Stepper::new(&sys.intra_weights(), &sys.omega_intra, dt, scheme)?;
    let mut inter_stepper = Stepper::new(&sys.inter_weights(), &sys.omega_inter, dt, scheme)?;

    let mut psi = psi0.phases.clone();
    let mut phi = phi0.phases.clone();
    let mut theta = compose_state(psi0, phi0).phases;
    for v in [&psi, &phi] {
        if let Some(node) = first_non_finite(v) {
            return Err(Error::Divergence { step: 0, node });
        }
    }

    let mut full = Trajectory::new(dt, record_every);
    let mut intra = Trajectory::new(dt, record_every);
    let mut inter = Trajectory::new(dt, record_every);
    let t0 = T::zero();
    full.push(t0, &theta);
    intra.push(t0, &psi);
    inter.push(t0, &phi);
    let mut max_residual = max_composition_gap(&theta, &psi, &phi);

    for k in 1..=n_steps {
        full_stepper.step(&mut theta);
        intra_stepper.step(&mut psi);
        inter_stepper.step(&mut phi);
        // subsystem node indices are reported in their own numbering
        for v in [&theta, &psi, &phi] {
            if let Some(node) = first_non_finite(v) {
                return Err(Error::Divergence { step: k, node });
            }
        }
        max_residual = max_residual.max(max_composition_gap(&theta, &psi, &phi));
        if is_recorded(k, n_steps, record_every) {
            let t = t0 + count::<T>(k) * dt;
            full.push(t, &theta);
            intra.push(t, &psi);
            inter.push(t, &phi);
        }
    }
    Ok(ComposedRun {
        full,
        intra,
        inter,
        max_residual,
    })
}

/// Max deviation (radians) between the directly integrated multiplex
/// trajectory and the composition of the two subsystem trajectories, over
/// every Euler step and every node.
pub fn composition_residual<T: Scalar>(
    sys: &MultiplexSystem<T>,
    psi0: &PhaseState<T>,
    phi0: &PhaseState<T>,
    dt: T,
    n_steps: usize,
) -> Result<T> {
    Ok(simulate_composed(sys, psi0, phi0, dt, n_steps, n_steps, Scheme::Euler)?.max_residual)
}

/// The four synchronization curves of a composed run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OrderParameterSeries<T> {
    pub times: Vec<T>,
    /// `R` evaluated directly on the assembled trajectory.
    pub r_full: Vec<T>,
    pub r_intra: Vec<T>,
    pub r_inter: Vec<T>,
    /// `R_intra · R_inter`.
    pub r_composed: Vec<T>,
}

impl<T: Scalar> OrderParameterSeries<T> {
    pub fn from_run(run: &ComposedRun<T>) -> Result<Self> {
        let r = |tr: &Trajectory<T>| -> Result<Vec<T>> { tr.states.iter().map(order_parameter).collect() };
        let r_full = r(&run.full)?;
        let r_intra = r(&run.intra)?;
        let r_inter = r(&run.inter)?;
        let r_composed = r_intra.iter().zip(&r_inter).map(|(&a, &b)| a * b).collect();
        Ok(Self {
            times: run.full.times.clone(),
            r_full,
            r_intra,
            r_inter,
            r_composed,
        })
    }

    /// `max_t |R_full(t) − R_intra(t)·R_inter(t)|`.
    pub fn max_factorization_residual(&self) -> T {
        self.r_full
            .iter()
            .zip(&self.r_composed)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    /// CSV with columns `time,r_full,r_composed,r_intra,r_inter`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "time,r_full,r_composed,r_intra,r_inter")?;
        for k in 0..self.times.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[k], self.r_full[k], self.r_composed[k], self.r_intra[k], self.r_inter[k]
            )?;
        }
        Ok(())
    }
}

/// Draws `n` independent `U(-π, π)` phases.
pub fn random_phases<T: Scalar>(n: usize, rng: &mut SeededRng) -> PhaseState<T> {
    PhaseState::new((0..n).map(|_| rng.phase()).collect())
}

/// `psi_0`, `phi_0` drawn from `U(-π, π)` and composed.
pub fn random_composed<T: Scalar>(n: usize, m: usize, rng: &mut SeededRng) -> ComposedState<T> {
    let psi = random_phases(n, rng);
    let phi = random_phases(m, rng);
    ComposedState::new(psi, phi)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::dynamics::{integrate_euler, FrequencyVector};
    use crate::graph::{gen_erdos_renyi, gen_ring, CouplingMatrix};

    #[test]
    fn compose_examples() {
        let z = compose_state(&PhaseState::<f64>::zeros(2), &PhaseState::zeros(2));
        assert_eq!(z.phases, vec![0.0; 4]);
        let (a, b, c, d) = (0.1, 0.2, 0.3, 0.4);
        let t = compose_state(&PhaseState::<f64>::from_f64(&[a, b]), &PhaseState::from_f64(&[c, d]));
        assert_eq!(t.phases, vec![a + c, b + c, a + d, b + d]);
        let psi = PhaseState::<f64>::from_f64(&[1.0, -2.0, 0.5]);
        let copies = compose_state(&psi, &PhaseState::zeros(4));
        assert_eq!(copies.phases, psi.phases.repeat(4));
    }

    #[test]
    fn order_parameter_examples() {
        assert!((order_parameter(&PhaseState::new(vec![0.3f64; 7])).unwrap() - 1.0).abs() < 1e-15);
        assert!(order_parameter(&twisted_state::<f64>(4, 1)).unwrap() < 1e-12);
        assert!(order_parameter(&PhaseState::<f64>::from_f64(&[0.0, PI])).unwrap() < 1e-15);
        assert!(matches!(order_parameter(&PhaseState::<f64>::zeros(0)), Err(Error::EmptyState)));
    }

    #[test]
    fn product_examples() {
        let sync = PhaseState::new(vec![0.5f64; 5]);
        assert!((order_parameter_product(&sync, &PhaseState::new(vec![-1.0; 3])).unwrap() - 1.0).abs() < 1e-15);
        assert!(order_parameter_product(&sync, &twisted_state(3, 1)).unwrap() < 1e-15);
    }

    #[test]
    fn twisted_examples() {
        assert_eq!(twisted_state::<f64>(6, 0).phases, vec![0.0; 6]);
        let t4 = twisted_state::<f64>(4, 1).phases;
        let want4 = [0.0, -PI / 2.0, -PI, PI / 2.0];
        for (g, w) in t4.iter().zip(want4) {
            assert!((g - w).abs() < 1e-15, "{t4:?}");
        }
        let t3 = twisted_state::<f64>(3, 1).phases;
        let want3 = [0.0, -2.0 * PI / 3.0, 2.0 * PI / 3.0];
        for (g, w) in t3.iter().zip(want3) {
            assert!((g - w).abs() < 1e-15, "{t3:?}");
        }
    }

    #[test]
    fn twisted_aliasing() {
        let a = twisted_state::<f64>(7, 2);
        let b = twisted_state::<f64>(7, 9);
        assert_eq!(a, b);
        let neg = twisted_state::<f64>(7, -2);
        for (x, y) in a.phases.iter().zip(&neg.phases).skip(1) {
            assert!((wrap_phase(x + y)).abs() < 1e-14);
        }
    }

    #[test]
    fn perturb_zero_eta_is_identity_on_wrapped() {
        let s = twisted_state::<f64>(10, 3);
        let mut rng = SeededRng::new(1);
        assert_eq!(perturb(&s, 0.0, &mut rng).unwrap(), s);
    }

    #[test]
    fn perturb_range_and_determinism() {
        let s = PhaseState::<f64>::zeros(500);
        let eta = 0.025;
        let a = perturb(&s, eta, &mut SeededRng::new(9)).unwrap();
        let b = perturb(&s, eta, &mut SeededRng::new(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.phases.iter().all(|x| x.abs() <= eta * PI));
        assert!(perturb(&s, -1.0, &mut SeededRng::new(9)).is_err());
    }

    #[test]
    fn perturb_wraps_result() {
        let s = PhaseState::from_f64(&[PI - 1e-3, -PI + 1e-3]);
        let p = perturb(&s, 0.5, &mut SeededRng::new(4)).unwrap();
        assert!(p.phases.iter().all(|x| (-PI..PI).contains(x)));
    }

    #[test]
    fn residual_zero_at_equilibrium() {
        let sys = MultiplexSystem::without_frequencies(gen_ring(5).unwrap(), gen_ring(3).unwrap(), 1.0, 0.5).unwrap();
        let r = composition_residual(&sys, &PhaseState::new(vec![0.2; 5]), &PhaseState::new(vec![-0.1; 3]), 1e-3, 500)
            .unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn simulate_composed_matches_independent_integrations() {
        let mut rng = SeededRng::new(77);
        let intra: CouplingMatrix<f64> = gen_erdos_renyi(8, 0.4, &mut rng).unwrap();
        let sys = MultiplexSystem::new(
            intra,
            gen_ring(4).unwrap(),
            1.0,
            0.7,
            FrequencyVector::zeros(8),
            FrequencyVector(vec![0.0, 0.5, 1.0, 1.5]),
        )
        .unwrap();
        let cs = random_composed::<f64>(8, 4, &mut rng);
        let run = simulate_composed(&sys, &cs.psi, &cs.phi, 1e-3, 2000, 100, Scheme::Euler).unwrap();
        let (w, om) = assemble_multiplex(&sys).unwrap();
        let direct = integrate_euler(&cs.theta, &om, &w, 1e-3, 2000, 100).unwrap();
        assert_eq!(direct.states, run.full.states);
        let intra_only = integrate_euler(&cs.psi, &sys.omega_intra, &sys.intra_weights(), 1e-3, 2000, 100).unwrap();
        assert_eq!(intra_only.states, run.intra.states);
        assert!(run.max_residual < 1e-10);
        let series = run.order_parameters().unwrap();
        assert_eq!(series.times.len(), 21);
        assert!(series.max_factorization_residual() < 1e-10);
    }

    #[test]
    fn simulate_composed_rejects_wrong_lengths() {
        let sys = MultiplexSystem::without_frequencies(gen_ring(4).unwrap(), gen_ring(3).unwrap(), 1.0, 1.0).unwrap();
        assert!(simulate_composed(&sys, &PhaseState::zeros(3), &PhaseState::zeros(3), 0.1, 1, 1, Scheme::Euler).is_err());
        assert!(simulate_composed(&sys, &PhaseState::zeros(4), &PhaseState::zeros(4), 0.1, 1, 1, Scheme::Euler).is_err());
    }

    #[test]
    fn series_csv_columns() {
        let sys =
            MultiplexSystem::without_frequencies(gen_ring::<f64>(3).unwrap(), gen_ring(3).unwrap(), 1.0, 1.0).unwrap();
        let run = simulate_composed(&sys, &PhaseState::zeros(3), &PhaseState::zeros(3), 0.1, 2, 1, Scheme::Euler).unwrap();
        let mut buf = Vec::new();
        run.order_parameters().unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("time,r_full,r_composed,r_intra,r_inter\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
