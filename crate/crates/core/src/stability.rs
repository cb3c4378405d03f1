//! Jacobians at equilibria, their spectra, and linear-stability
//! classification.
//!
//! At a phase-locked state the Jacobian of the Kuramoto field has
//! off-diagonal entries `w_ij · cos(θ_j − θ_i)` and a diagonal chosen so
//! every row sums to zero. The multiplex Jacobian at a composed state is the
//! Kronecker sum of the two subsystem Jacobians, so its spectrum is the
//! sumset of theirs.

use serde::{Deserialize, Serialize};

use crate::composition::compose_state;
use crate::dynamics::{kuramoto_rhs, FrequencyVector, MultiplexSystem, PhaseState};
use crate::error::{Error, Result};
use crate::graph::{spectrum_sym, CouplingMatrix};
use crate::scalar::{lit, to_f64, Scalar};

/// Stability verdict derived from a Jacobian spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Simple zero eigenvalue, every other eigenvalue negative.
    Stable,
    /// At least one eigenvalue above the zero band.
    Unstable,
    /// No positive eigenvalue, but the zero eigenvalue is not simple.
    Degenerate,
}

/// Sorted spectrum and its classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SpectrumReport<T> {
    pub eigenvalues: Vec<T>,
    pub zero_multiplicity: usize,
    pub classification: Classification,
    pub zero_tolerance: T,
}

impl<T: Scalar> SpectrumReport<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
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

/// Jacobian of a single layer with coupling `a` at `psi_star`.
///
/// Off-diagonal `(i, j)`: `a_ij · cos(ψ_j − ψ_i)`; diagonal: `−λ_i` with
/// `λ_i = Σ_{j≠i} a_ij · cos(ψ_j − ψ_i)`.
pub fn jacobian_single_layer<T: Scalar>(a: &CouplingMatrix<T>, psi_star: &PhaseState<T>) -> Result<CouplingMatrix<T>> {
    a.ensure_symmetric()?;
    if !a.has_zero_diagonal() {
        return Err(Error::InvalidParameter {
            name: "a",
            reason: "single-layer coupling must have a zero diagonal".into(),
        });
    }
    let n = a.n_rows();
    check_len("jacobian_single_layer state", n, psi_star.len())?;
    let psi = &psi_star.phases;
    let mut j = CouplingMatrix::zeros(n, n);
    for i in 0..n {
        let mut lambda = T::zero();
        for k in 0..n {
            if k == i {
                continue;
            }
            let w = a.get(i, k);
            if w == T::zero() {
                continue;
            }
            let entry = w * (psi[k] - psi[i]).cos();
            j.set(i, k, entry);
            lambda = lambda + entry;
        }
        j.set(i, i, -lambda);
    }
    Ok(j)
}

/// Multiplex Jacobian at the composed state `(psi_star, phi_star)`, built
/// block by block.
///
/// Block `(l, l)` is `J_intra(ψ*) − c_l·I` with
/// `c_l = Σ_{k≠l} ε_lk cos(φ*_k − φ*_l)`; block `(l, k)` is
/// `ε_lk cos(φ*_k − φ*_l)·I`, where `ε_lk = eps_inter · inter_lk`.
pub fn jacobian_multiplex<T: Scalar>(
    sys: &MultiplexSystem<T>,
    psi_star: &PhaseState<T>,
    phi_star: &PhaseState<T>,
) -> Result<CouplingMatrix<T>> {
    sys.validate()?;
    let (n, m) = (sys.n(), sys.m());
    check_len("jacobian_multiplex psi", n, psi_star.len())?;
    check_len("jacobian_multiplex phi", m, phi_star.len())?;
    let j_intra = jacobian_single_layer(&sys.intra_weights(), psi_star)?;
    let eps = sys.inter_weights();
    let phi = &phi_star.phases;

    let mut j = CouplingMatrix::zeros(n * m, n * m);
    for l in 0..m {
        let mut c_l = T::zero();
        for k in 0..m {
            if k == l {
                continue;
            }
            let coupling = eps.get(l, k) * (phi[k] - phi[l]).cos();
            c_l = c_l + coupling;
            if coupling != T::zero() {
                for i in 0..n {
                    j.set(l * n + i, k * n + i, coupling);
                }
            }
        }
        for r in 0..n {
            for s in 0..n {
                let mut v = j_intra.get(r, s);
                if r == s {
                    v = v - c_l;
                }
                j.set(l * n + r, l * n + s, v);
            }
        }
    }
    Ok(j)
}

/// Jacobian of `θ ↦ ω + Σ_j w_ij sin(θ_j − θ_i)` at `theta_star`, by direct
/// differentiation: `∂f_i/∂θ_j = w_ij cos(θ_j − θ_i)` for `j ≠ i` and
/// `∂f_i/∂θ_i = −Σ_{j≠i} w_ij cos(θ_j − θ_i)`.
pub fn jacobian_direct<T: Scalar>(weights: &CouplingMatrix<T>, theta_star: &PhaseState<T>) -> Result<CouplingMatrix<T>> {
    if !weights.is_square() {
        return Err(Error::NotSquare {
            rows: weights.n_rows(),
            cols: weights.n_cols(),
        });
    }
    let n = weights.n_rows();
    check_len("jacobian_direct state", n, theta_star.len())?;
    let th = &theta_star.phases;
    let mut j = CouplingMatrix::zeros(n, n);
    for i in 0..n {
        let row = weights.row(i);
        let mut diag = T::zero();
        for (k, &w) in row.iter().enumerate() {
            if k != i {
                let d = w * (th[k] - th[i]).cos();
                j.set(i, k, d);
                diag = diag - d;
            }
        }
        j.set(i, i, diag);
    }
    Ok(j)
}

/// Every pairwise sum `a_i + b_j`, sorted ascending with multiplicities.
pub fn spectrum_sumset<T: Scalar>(spec_a: &[T], spec_b: &[T]) -> Vec<T> {
    let mut out: Vec<T> = spec_a
        .iter()
        .flat_map(|&a| spec_b.iter().map(move |&b| a + b))
        .collect();
    out.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    out
}

/// Default zero band: `ZERO_MODE_TOLERANCE · max(1, max|λ|)`.
pub fn default_zero_tolerance<T: Scalar>(spectrum: &[T]) -> T {
    let scale = spectrum.iter().fold(T::one(), |acc, &x| acc.max(x.abs()));
    lit::<T>(T::ZERO_MODE_TOLERANCE) * scale
}

/// Classifies a sorted spectrum; `|λ| <= zero_tol` counts as a zero mode.
pub fn classify_stability<T: Scalar>(spectrum: &[T], zero_tol: T) -> Result<SpectrumReport<T>> {
    if !(zero_tol > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "zero_tol",
            reason: format!("must be positive, got {zero_tol}"),
        });
    }
    if spectrum.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { context: "spectrum" });
    }
    let zero_multiplicity = spectrum.iter().filter(|x| x.abs() <= zero_tol).count();
    let any_positive = spectrum.iter().any(|&x| x > zero_tol);
    let classification = if any_positive {
        Classification::Unstable
    } else if zero_multiplicity == 1 {
        Classification::Stable
    } else {
        Classification::Degenerate
    };
    let mut eigenvalues = spectrum.to_vec();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(SpectrumReport {
        eigenvalues,
        zero_multiplicity,
        classification,
        zero_tolerance: zero_tol,
    })
}

/// Spectrum of a symmetric Jacobian, classified with the given or default
/// zero band.
pub fn spectrum_report<T: Scalar>(jacobian: &CouplingMatrix<T>, zero_tol: Option<T>) -> Result<SpectrumReport<T>> {
    let spectrum = spectrum_sym(jacobian)?;
    let tol = zero_tol.unwrap_or_else(|| default_zero_tolerance(&spectrum));
    classify_stability(&spectrum, tol)
}

/// Deviation of `state` from a phase-locked equilibrium: the max-norm of
/// `f(θ) − mean(f(θ))`. With zero frequencies and symmetric coupling the mean
/// vanishes and this is `‖f(θ)‖_∞`; with a uniform frequency it measures the
/// residual in the co-rotating frame.
pub fn equilibrium_residual<T: Scalar>(
    weights: &CouplingMatrix<T>,
    omega: &FrequencyVector<T>,
    state: &PhaseState<T>,
) -> Result<T> {
    let f = kuramoto_rhs(state, omega, weights)?;
    if f.is_empty() {
        return Ok(T::zero());
    }
    let mean = f.iter().copied().sum::<T>() / crate::scalar::count(f.len());
    Ok(f.iter().fold(T::zero(), |acc, &x| acc.max((x - mean).abs())))
}

/// Stability of a composed equilibrium together with both subsystems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ComposedStability<T> {
    pub intra: SpectrumReport<T>,
    pub inter: SpectrumReport<T>,
    pub composed: SpectrumReport<T>,
    /// `true` when any of the three reports is degenerate; the
    /// stable-iff-both-stable relation is not asserted for such cases.
    pub degenerate: bool,
    /// `composed stable ⇔ (intra stable ∧ inter stable)`.
    pub iff_holds: bool,
    pub intra_residual: T,
    pub inter_residual: T,
}

/// Classifies the composed state `(psi_star, phi_star)` and both
/// subsystem states. Rejects inputs that are not equilibria of their
/// subsystems (residual above `T::EQUILIBRIUM_TOLERANCE`).
///
/// The composed spectrum comes from the eigensolver applied to the assembled
/// multiplex Jacobian, not from the sumset.
pub fn stability_of_composed<T: Scalar>(
    sys: &MultiplexSystem<T>,
    psi_star: &PhaseState<T>,
    phi_star: &PhaseState<T>,
    zero_tol: Option<T>,
) -> Result<ComposedStability<T>> {
    let tol = lit::<T>(T::EQUILIBRIUM_TOLERANCE);
    let intra_w = sys.intra_weights();
    let inter_w = sys.inter_weights();
    let intra_residual = equilibrium_residual(&intra_w, &sys.omega_intra, psi_star)?;
    if !(intra_residual <= tol) {
        return Err(Error::NotEquilibrium {
            which: "intra-layer",
            residual: to_f64(intra_residual),
            tolerance: T::EQUILIBRIUM_TOLERANCE,
        });
    }
    let inter_residual = equilibrium_residual(&inter_w, &sys.omega_inter, phi_star)?;
    if !(inter_residual <= tol) {
        return Err(Error::NotEquilibrium {
            which: "inter-layer",
            residual: to_f64(inter_residual),
            tolerance: T::EQUILIBRIUM_TOLERANCE,
        });
    }

    let intra = spectrum_report(&jacobian_single_layer(&intra_w, psi_star)?, zero_tol)?;
    let inter = spectrum_report(&jacobian_single_layer(&inter_w, phi_star)?, zero_tol)?;
    let composed = spectrum_report(&jacobian_multiplex(sys, psi_star, phi_star)?, zero_tol)?;

    let degenerate = [&intra, &inter, &composed]
        .iter()
        .any(|r| r.classification == Classification::Degenerate);
    let both = intra.classification == Classification::Stable && inter.classification == Classification::Stable;
    let iff_holds = (composed.classification == Classification::Stable) == both;
    Ok(ComposedStability {
        intra,
        inter,
        composed,
        degenerate,
        iff_holds,
        intra_residual,
        inter_residual,
    })
}

/// Max elementwise gap between the block-built multiplex Jacobian and the
/// direct Jacobian of the assembled system at the composed state.
pub fn jacobian_oracle_gap<T: Scalar>(
    sys: &MultiplexSystem<T>,
    psi_star: &PhaseState<T>,
    phi_star: &PhaseState<T>,
) -> Result<T> {
    let (weights, _) = crate::dynamics::assemble_multiplex(sys)?;
    let theta = compose_state(psi_star, phi_star);
    let direct = jacobian_direct(&weights, &theta)?;
    let blocks = jacobian_multiplex(sys, psi_star, phi_star)?;
    Ok(blocks.max_abs_diff(&direct))
}
