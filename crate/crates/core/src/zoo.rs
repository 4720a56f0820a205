//! Constructors for the standard processor classes.
//!
//! * U processors: program basis states select a unitary on the data.
//! * Y processors: data basis states select a unitary on the program.
//! * U′ and Y′ processors: the same with a rotated program (resp. data)
//!   basis on the input side.
//! * The partial swap `cos φ 1 + i sin φ S`.
//! * The four-CNOT quantum information distributor (QID).

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::operator::{self, gates, Operator, StateVector, C64, DEFAULT_TOL, ONE, ZERO};
use crate::processor::{block_diagonal, induced_channel, Processor, ProgramState};
use crate::random::{random_density_with, random_special_unitary_with, rng_from_seed};

/// Tolerance on the QID program normalization `α² + β² + αβ = 1`.
pub const QID_NORMALIZATION_TOL: f64 = 1e-9;

fn check_unitaries(unitaries: &[Operator]) -> Result<usize> {
    let first = unitaries.first().ok_or_else(|| Error::InvalidArgument("no unitaries given".into()))?;
    let dim = first.ensure_square()?;
    for u in unitaries {
        if u.rows() != dim || u.cols() != dim {
            return Err(Error::DimensionMismatch("unitaries of unequal dimension".into()));
        }
        let residual = operator::unitarity_residual(u)?;
        if residual > DEFAULT_TOL {
            return Err(Error::NotUnitary { residual });
        }
    }
    Ok(dim)
}

fn check_orthonormal(vectors: &[StateVector], count: usize, dim: usize) -> Result<()> {
    if vectors.len() != count || vectors.iter().any(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "expected {count} basis vectors of dim {dim}, got {}",
            vectors.len()
        )));
    }
    let residual = operator::orthonormality_residual(vectors)?;
    if residual > DEFAULT_TOL {
        return Err(Error::NotOrthonormal { residual });
    }
    Ok(())
}

/// `G(|ψ⟩ ⊗ |j⟩) = U_j|ψ⟩ ⊗ |j⟩` for `N` unitaries on the data.
pub fn make_u_processor(unitaries: &[Operator]) -> Result<Processor> {
    let m = check_unitaries(unitaries)?;
    Processor::new(block_diagonal(unitaries), m, unitaries.len())
}

/// `G = Σ_m |m⟩⟨m| ⊗ U_m` for `M` unitaries on the program.
pub fn make_y_processor(unitaries: &[Operator]) -> Result<Processor> {
    let n = check_unitaries(unitaries)?;
    let m = unitaries.len();
    let g = Operator::from_fn(m * n, m * n, |r, c| {
        let (a, j, b, k) = (r / n, r % n, c / n, c % n);
        if a == b {
            unitaries[a][(j, k)]
        } else {
            ZERO
        }
    });
    Processor::new(g, m, n)
}

/// `G = Σ_k U_k ⊗ |k⟩⟨χ_k|`. Also returns `U_p` with `|χ_k⟩ = U_p|k⟩`, so
/// that `G = G_U (1 ⊗ U_p†)` with `G_U` the plain U processor.
pub fn make_uprime_processor(unitaries: &[Operator], chi: &[StateVector]) -> Result<(Processor, Operator)> {
    let m = check_unitaries(unitaries)?;
    let n = unitaries.len();
    check_orthonormal(chi, n, n)?;
    let g = Operator::from_fn(m * n, m * n, |r, c| {
        let (a, j, b, l) = (r / n, r % n, c / n, c % n);
        unitaries[j][(a, b)] * chi[j][l].conj()
    });
    let u_p = operator::unitary_from_columns(chi, DEFAULT_TOL)?;
    Ok((Processor::new(g, m, n)?, u_p))
}

/// `G = Σ_m |m⟩⟨φ_m| ⊗ U_m` for `M` program unitaries and an orthonormal
/// data basis `{φ_m}`.
pub fn make_yprime_processor(unitaries: &[Operator], phi: &[StateVector]) -> Result<Processor> {
    let n = check_unitaries(unitaries)?;
    let m = unitaries.len();
    check_orthonormal(phi, m, m)?;
    let g = Operator::from_fn(m * n, m * n, |r, c| {
        let (a, j, b, k) = (r / n, r % n, c / n, c % n);
        phi[a][b].conj() * unitaries[a][(j, k)]
    });
    Processor::new(g, m, n)
}

/// `G = cos φ 1 + i sin φ S` on `d ⊗ d`.
pub fn make_partial_swap(d: usize, phi: f64) -> Result<Processor> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("partial swap needs d >= 2, got {d}")));
    }
    let g = &(&Operator::identity(d * d) * phi.cos()) + &gates::swap(d).scale(C64::new(0.0, phi.sin()));
    Processor::new(g, d, d)
}

/// `D_jk|m⟩_j|n⟩_k = |m⟩_j|m ⊕ n⟩_k` on three qubits indexed
/// `4·b₁ + 2·b₂ + b₃` (qubit 1 is the data, qubits 2 and 3 the program).
fn cnot3(control: usize, target: usize) -> Operator {
    let bit = |i: usize, q: usize| (i >> (2 - q)) & 1;
    Operator::from_fn(8, 8, |r, c| {
        let flipped = if bit(c, control) == 1 { c ^ (1 << (2 - target)) } else { c };
        if r == flipped {
            ONE
        } else {
            ZERO
        }
    })
}

/// The QID gate array `G = D₃₁ D₂₁ D₁₃ D₁₂` on one data qubit and a
/// two-qubit program.
pub fn make_qid_processor() -> Processor {
    // qubits 1, 2, 3 are bit positions 0, 1, 2; D₁₂ acts first
    let g = &(&(&cnot3(2, 0) * &cnot3(1, 0)) * &cnot3(0, 2)) * &cnot3(0, 1);
    Processor::new(g, 2, 4).expect("permutation matrix is unitary")
}

/// `|Ξ⟩ = α|Ξ₀₀⟩ + β|Φ⟩` with `|Ξ₀₀⟩ = (|00⟩+|11⟩)/√2` and
/// `|Φ⟩ = |0⟩(|0⟩+|1⟩)/√2`. Requires real `α, β` with `α² + β² + αβ = 1`.
pub fn qid_program(alpha: f64, beta: f64) -> Result<ProgramState> {
    let norm = alpha * alpha + beta * beta + alpha * beta;
    if (norm - 1.0).abs() > QID_NORMALIZATION_TOL {
        return Err(Error::InvalidArgument(format!(
            "QID program needs α² + β² + αβ = 1, got {norm}"
        )));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = [h * alpha + h * beta, h * beta, 0.0, h * alpha];
    Ok(ProgramState::pure(StateVector::with_tol(
        amps.iter().map(|&x| C64::new(x, 0.0)).collect(),
        QID_NORMALIZATION_TOL,
    )?))
}

/// The non-negative `α` completing a QID program for a given `β`,
/// `|β| ≤ 2/√3`.
pub fn qid_alpha_for_beta(beta: f64) -> Result<f64> {
    let disc = 4.0 - 3.0 * beta * beta;
    if disc < 0.0 {
        return Err(Error::OutOfRange(format!("|β| must not exceed 2/√3, got {beta}")));
    }
    Ok((disc.sqrt() - beta) / 2.0)
}

/// `ρ ↦ (1 − β²)ρ + (β²/2) 1`
pub fn qid_expected_output(rho: &Operator, beta: f64) -> Operator {
    let b2 = beta * beta;
    &(rho * (1.0 - b2)) + &(&Operator::identity(rho.rows()) * (b2 / 2.0))
}

/// Result of a covariance check.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceReport {
    /// `max ‖U T[ρ] U† − T[UρU†]‖_max` over samples.
    pub max_violation: f64,
    /// `max ‖Σ_j A_{jk1} A_{jk2}† − δ 1‖_max`, evaluated when the sampled
    /// violation is within tolerance.
    pub dual_residual: Option<f64>,
}

/// Samples Haar-random `U ∈ SU(M)` with a random state each and measures how
/// far the channel is from commuting with `U · U†`.
pub fn channel_covariance_violation(ch: &Channel, samples: usize, seed: u64) -> Result<f64> {
    let m = ch.dim();
    let mut rng = rng_from_seed(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = random_special_unitary_with(m, &mut rng);
        let rho = random_density_with(m, &mut rng);
        let lhs = u.sandwich(&ch.apply(&rho)?);
        let rhs = ch.apply(&u.sandwich(&rho))?;
        worst = worst.max(lhs.max_diff(&rhs));
    }
    Ok(worst)
}

/// Covariance of the channel a program induces on a processor.
pub fn check_covariance(proc: &Processor, program: &ProgramState, samples: usize, seed: u64) -> Result<CovarianceReport> {
    let ch = induced_channel(proc, program)?;
    let max_violation = channel_covariance_violation(&ch, samples, seed)?;
    let dual_residual = (max_violation <= DEFAULT_TOL).then(|| proc.basis().dual_residual());
    Ok(CovarianceReport { max_violation, dual_residual })
}
