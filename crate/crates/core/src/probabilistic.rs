//! Conditional dynamics: measuring the program register after the gate array.
//!
//! Tracing the program out gives the induced channel. Measuring it in an
//! orthogonal basis and keeping outcome `i` gives a trace-nonincreasing map
//! whose Kraus operators are `(1⊗⟨e|) G (1⊗|χ⟩)`; it is stored unnormalized,
//! with the outcome probability carried next to it.

use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{self, gates, Keep, Operator, StateVector, C64, DEFAULT_TOL};
use crate::processor::{induced_channel, Processor, ProgramState};
use crate::zoo::make_u_processor;

/// Probabilities below this leave the post-measurement state undefined.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;

/// A complete set of orthogonal projectors on the program space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BasisRepr", into = "BasisRepr")]
pub struct MeasurementBasis {
    dim: usize,
    projectors: Vec<Operator>,
}

#[derive(Serialize, Deserialize)]
struct BasisRepr {
    dim: usize,
    projectors: Vec<Operator>,
}

impl TryFrom<BasisRepr> for MeasurementBasis {
    type Error = Error;

    fn try_from(repr: BasisRepr) -> Result<Self> {
        let basis = MeasurementBasis::new(repr.projectors)?;
        if basis.dim != repr.dim {
            return Err(Error::DimensionMismatch(format!(
                "declared dim {} but projectors are {}x{}",
                repr.dim, basis.dim, basis.dim
            )));
        }
        Ok(basis)
    }
}

impl From<MeasurementBasis> for BasisRepr {
    fn from(b: MeasurementBasis) -> Self {
        BasisRepr { dim: b.dim, projectors: b.projectors }
    }
}

impl MeasurementBasis {
    /// Requires Hermitian, idempotent, pairwise orthogonal projectors summing to 1.
    pub fn new(projectors: Vec<Operator>) -> Result<Self> {
        Self::with_tol(projectors, DEFAULT_TOL)
    }

    pub fn with_tol(projectors: Vec<Operator>, tol: f64) -> Result<Self> {
        let first = projectors.first().ok_or_else(|| Error::InvalidArgument("empty measurement".into()))?;
        let dim = first.ensure_square()?;
        let mut total = Operator::zeros(dim, dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.rows() != dim || p.cols() != dim {
                return Err(Error::DimensionMismatch(format!("projector {i} is not {dim}x{dim}")));
            }
            if !operator::is_hermitian(p, tol)? || !(p * p).approx_eq(p, tol) {
                return Err(Error::InvalidArgument(format!("element {i} is not an orthogonal projector")));
            }
            for q in projectors.iter().skip(i + 1) {
                let overlap = (p * q).max_abs();
                if overlap > tol {
                    return Err(Error::OrthogonalityViolation { residual: overlap });
                }
            }
            total = &total + p;
        }
        let residual = total.max_diff(&Operator::identity(dim));
        if residual > tol {
            return Err(Error::InvalidArgument(format!("projectors sum to 1 only within {residual:e}")));
        }
        Ok(MeasurementBasis { dim, projectors })
    }

    /// Rank-one projectors onto an orthonormal family.
    pub fn from_vectors(vectors: &[StateVector]) -> Result<Self> {
        let residual = operator::orthonormality_residual(vectors)?;
        if residual > DEFAULT_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Self::new(vectors.iter().map(StateVector::projector).collect())
    }

    pub fn computational(dim: usize) -> Self {
        let projectors = (0..dim).map(|k| Operator::unit(dim, k, k)).collect();
        MeasurementBasis { dim, projectors }
    }

    /// `{|+x⟩⟨+x|, |−x⟩⟨−x|}`
    pub fn x_basis() -> Self {
        MeasurementBasis { dim: 2, projectors: vec![gates::plus_x().projector(), gates::minus_x().projector()] }
    }

    /// The single projector `1`: every run is accepted.
    pub fn accept_all(dim: usize) -> Self {
        MeasurementBasis { dim, projectors: vec![Operator::identity(dim)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    /// Orthonormal vectors spanning projector `i`.
    fn range(&self, i: usize) -> Vec<StateVector> {
        let p = &self.projectors[i];
        let (vals, vecs) = linalg::eigh(p);
        vals.iter()
            .enumerate()
            .filter(|(_, &l)| l > 0.5)
            .map(|(k, _)| StateVector::from_raw_unchecked((0..self.dim).map(|r| vecs[(r, k)]).collect()))
            .collect()
    }
}

/// What happens when outcome `outcome_index` is observed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalOutcome {
    pub outcome_index: usize,
    pub probability: f64,
    /// Normalized data state; `None` when the outcome is negligible.
    pub post_state: Option<Operator>,
    /// `ρ ↦ p_i · post_state`, trace-nonincreasing.
    pub post_map: Channel,
    pub negligible: bool,
}

/// `Tr_p[G(ρ⊗ρ_p)G†]`
pub fn run_unconditional(proc: &Processor, program: &ProgramState, rho: &Operator) -> Result<Operator> {
    let joint = proc.evolve(rho, program)?;
    operator::partial_trace(&joint, proc.data_dim(), proc.prog_dim(), Keep::A)
}

/// Kraus operators `{√λ_l (1⊗⟨e_r|) G (1⊗|χ_l⟩)}` of the map kept on outcome `index`.
pub fn post_selected_map(proc: &Processor, program: &ProgramState, basis: &MeasurementBasis, index: usize) -> Result<Channel> {
    check_basis(proc, basis)?;
    if program.dim() != proc.prog_dim() {
        return Err(Error::DimensionMismatch(format!(
            "program of dim {} for a processor with program dim {}",
            program.dim(),
            proc.prog_dim()
        )));
    }
    if index >= basis.len() {
        return Err(Error::OutOfRange(format!("outcome {index} of a {}-outcome measurement", basis.len())));
    }
    let grid = proc.basis();
    let mut kraus = Vec::new();
    for (weight, chi) in program.spectral() {
        let ops = grid.program_operators(&chi)?;
        for e in basis.range(index) {
            let k: Operator = ops.iter().zip(e.amplitudes()).map(|(a, c)| a.scale(c.conj())).sum();
            kraus.push(&k * weight.sqrt());
        }
    }
    if kraus.is_empty() {
        kraus.push(Operator::zeros(proc.data_dim(), proc.data_dim()));
    }
    Channel::trace_nonincreasing(kraus)
}

/// One entry per projector, from the full joint simulation.
pub fn run_conditional(
    proc: &Processor,
    program: &ProgramState,
    rho: &Operator,
    basis: &MeasurementBasis,
) -> Result<Vec<ConditionalOutcome>> {
    check_basis(proc, basis)?;
    let joint = proc.evolve(rho, program)?;
    let (m, n) = (proc.data_dim(), proc.prog_dim());
    (0..basis.len())
        .map(|i| {
            let lift = operator::tensor(&Operator::identity(m), &basis.projectors()[i]);
            let projected = lift.sandwich(&joint);
            let probability = projected.trace().re.clamp(0.0, 1.0);
            let negligible = probability < NEGLIGIBLE_PROBABILITY;
            let post_state = if negligible {
                None
            } else {
                let reduced = operator::partial_trace(&projected, m, n, Keep::A)?;
                Some(reduced.hermitian_part().scale(C64::new(1.0 / probability, 0.0)))
            };
            Ok(ConditionalOutcome {
                outcome_index: i,
                probability,
                post_state,
                post_map: post_selected_map(proc, program, basis, i)?,
                negligible,
            })
        })
        .collect()
}

/// Probability of outcome `accept_index`.
pub fn success_probability(
    proc: &Processor,
    program: &ProgramState,
    rho: &Operator,
    basis: &MeasurementBasis,
    accept_index: usize,
) -> Result<f64> {
    check_basis(proc, basis)?;
    if accept_index >= basis.len() {
        return Err(Error::OutOfRange(format!("outcome {accept_index} of a {}-outcome measurement", basis.len())));
    }
    let joint = proc.evolve(rho, program)?;
    let lift = operator::tensor(&Operator::identity(proc.data_dim()), &basis.projectors()[accept_index]);
    Ok((&lift * &joint).trace().re.clamp(0.0, 1.0))
}

/// Choi distance between the unconditional channel and the post-selected map
/// of outcome `index`, each normalized by its own trace.
pub fn post_selection_gap(proc: &Processor, program: &ProgramState, basis: &MeasurementBasis, index: usize) -> Result<f64> {
    let unconditional = induced_channel(proc, program)?;
    let post = post_selected_map(proc, program, basis, index)?;
    crate::channel::choi_distance(&unconditional, &post)
}

fn check_basis(proc: &Processor, basis: &MeasurementBasis) -> Result<()> {
    if basis.dim() != proc.prog_dim() {
        return Err(Error::DimensionMismatch(format!(
            "measurement on dim {} for a processor with program dim {}",
            basis.dim(),
            proc.prog_dim()
        )));
    }
    Ok(())
}

/// C-NOT with the program qubit as control: `1⊗|0⟩⟨0| + σ_x⊗|1⟩⟨1|`.
pub fn cnot_program_control() -> Processor {
    make_u_processor(&[Operator::identity(2), gates::pauli_x()]).expect("1 and σ_x are unitary")
}

/// C-NOT with the data qubit as control: `|0⟩⟨0|⊗1 + |1⟩⟨1|⊗σ_x`.
pub fn cnot_data_control() -> Processor {
    let g = &operator::tensor(&Operator::unit(2, 0, 0), &Operator::identity(2))
        + &operator::tensor(&Operator::unit(2, 1, 1), &gates::pauli_x());
    Processor::new(g, 2, 2).expect("C-NOT is unitary")
}

/// `e^{iασ_z}|+x⟩ = (e^{iα}|0⟩ + e^{−iα}|1⟩)/√2`
pub fn phase_program(alpha: f64) -> ProgramState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = vec![C64::from_polar(h, alpha), C64::from_polar(h, -alpha)];
    ProgramState::pure(StateVector::from_raw_unchecked(amps))
}
