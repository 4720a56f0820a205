//! Programmable processors: a fixed unitary `G` on `data ⊗ program`.
//!
//! A processor is characterized by its basis operators
//! `A_jk = ⟨j|G|k⟩_p`, an `N × N` grid of `M × M` data operators. A pure
//! program `|Ξ⟩` induces the Kraus operators `A_j(Ξ) = Σ_k ⟨k|Ξ⟩ A_jk`.

use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{self, Keep, Operator, StateVector, C64, DEFAULT_TOL, ZERO};

/// Spectral weights below this are dropped from mixed programs.
pub const SPECTRAL_CUTOFF: f64 = 1e-12;

/// A unitary gate array acting on `data_dim · prog_dim` dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProcessorRepr", into = "ProcessorRepr")]
pub struct Processor {
    g: Operator,
    data_dim: usize,
    prog_dim: usize,
}

#[derive(Serialize, Deserialize)]
struct ProcessorRepr {
    data_dim: usize,
    prog_dim: usize,
    #[serde(rename = "G")]
    g: Operator,
}

impl TryFrom<ProcessorRepr> for Processor {
    type Error = Error;

    fn try_from(repr: ProcessorRepr) -> Result<Self> {
        Processor::new(repr.g, repr.data_dim, repr.prog_dim)
    }
}

impl From<Processor> for ProcessorRepr {
    fn from(p: Processor) -> Self {
        ProcessorRepr { data_dim: p.data_dim, prog_dim: p.prog_dim, g: p.g }
    }
}

/// A processor file as read from disk, before the unitarity check. Lets
/// callers tell malformed input apart from a non-unitary `G`.
#[derive(Debug, Clone, Deserialize)]
pub struct UncheckedProcessor {
    pub data_dim: usize,
    pub prog_dim: usize,
    #[serde(rename = "G")]
    pub g: Operator,
}

impl Processor {
    pub fn new(g: Operator, data_dim: usize, prog_dim: usize) -> Result<Self> {
        Processor::with_tol(g, data_dim, prog_dim, DEFAULT_TOL)
    }

    pub fn with_tol(g: Operator, data_dim: usize, prog_dim: usize, tol: f64) -> Result<Self> {
        let n = g.ensure_square()?;
        if data_dim == 0 || prog_dim == 0 || n != data_dim * prog_dim {
            return Err(Error::DimensionMismatch(format!(
                "{n}x{n} gate array cannot act on {data_dim}x{prog_dim}"
            )));
        }
        let residual = operator::unitarity_residual(&g)?;
        if residual > tol {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Processor { g, data_dim, prog_dim })
    }

    pub fn identity(data_dim: usize, prog_dim: usize) -> Self {
        Processor { g: Operator::identity(data_dim * prog_dim), data_dim, prog_dim }
    }

    /// Haar-random gate array.
    pub fn random(data_dim: usize, prog_dim: usize, seed: u64) -> Result<Self> {
        let g = crate::random::random_unitary(data_dim * prog_dim, seed)?;
        Processor::new(g, data_dim, prog_dim)
    }

    pub fn g(&self) -> &Operator {
        &self.g
    }

    pub fn data_dim(&self) -> usize {
        self.data_dim
    }

    pub fn prog_dim(&self) -> usize {
        self.prog_dim
    }

    /// `A[j][k][m,n] = G[(m,j),(n,k)]`
    pub fn basis(&self) -> BasisOperators {
        let (m, n) = (self.data_dim, self.prog_dim);
        let grid = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| Operator::from_fn(m, m, |a, b| self.g[(a * n + j, b * n + k)]))
                    .collect()
            })
            .collect();
        BasisOperators { data_dim: m, prog_dim: n, grid }
    }

    /// Runs the processor on `ρ ⊗ ρ_p` and returns the joint output.
    pub fn evolve(&self, rho: &Operator, program: &ProgramState) -> Result<Operator> {
        self.check_program(program)?;
        if rho.rows() != self.data_dim || rho.cols() != self.data_dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} data state for a processor with data dim {}",
                rho.rows(),
                rho.cols(),
                self.data_dim
            )));
        }
        let joint = operator::tensor(rho, &program.density());
        Ok(self.g.sandwich(&joint))
    }

    fn check_program(&self, program: &ProgramState) -> Result<()> {
        if program.dim() != self.prog_dim {
            return Err(Error::DimensionMismatch(format!(
                "program of dim {} for a processor with program dim {}",
                program.dim(),
                self.prog_dim
            )));
        }
        Ok(())
    }
}

/// The grid `A_jk = ⟨j|G|k⟩_p`, indexed `[j][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisOperators {
    data_dim: usize,
    prog_dim: usize,
    grid: Vec<Vec<Operator>>,
}

impl BasisOperators {
    /// Checks shape only; orthogonality is enforced by [`BasisOperators::assemble`].
    pub fn new(data_dim: usize, grid: Vec<Vec<Operator>>) -> Result<Self> {
        let prog_dim = grid.len();
        if prog_dim == 0 || data_dim == 0 {
            return Err(Error::DimensionMismatch("empty basis grid".into()));
        }
        for row in &grid {
            if row.len() != prog_dim {
                return Err(Error::DimensionMismatch(format!(
                    "basis grid row of length {} in a {prog_dim}x{prog_dim} grid",
                    row.len()
                )));
            }
            if let Some(op) = row.iter().find(|op| op.rows() != data_dim || op.cols() != data_dim) {
                return Err(Error::DimensionMismatch(format!(
                    "{}x{} basis operator for data dim {data_dim}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        Ok(BasisOperators { data_dim, prog_dim, grid })
    }

    pub fn data_dim(&self) -> usize {
        self.data_dim
    }

    pub fn prog_dim(&self) -> usize {
        self.prog_dim
    }

    pub fn get(&self, j: usize, k: usize) -> &Operator {
        &self.grid[j][k]
    }

    /// `max_{k1,k2} ‖Σ_j A_{jk1}† A_{jk2} − δ_{k1k2} 1‖_max`
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.prog_dim;
        let id = Operator::identity(self.data_dim);
        let zero = Operator::zeros(self.data_dim, self.data_dim);
        let mut worst: f64 = 0.0;
        for k1 in 0..n {
            for k2 in 0..n {
                let sum: Operator = (0..n).map(|j| &self.grid[j][k1].dagger() * &self.grid[j][k2]).sum();
                worst = worst.max(sum.max_diff(if k1 == k2 { &id } else { &zero }));
            }
        }
        worst
    }

    /// `max_{k1,k2} ‖Σ_j A_{k1 j} A_{k2 j}† − δ_{k1k2} 1‖_max`
    pub fn dual_residual(&self) -> f64 {
        let n = self.prog_dim;
        let id = Operator::identity(self.data_dim);
        let zero = Operator::zeros(self.data_dim, self.data_dim);
        let mut worst: f64 = 0.0;
        for k1 in 0..n {
            for k2 in 0..n {
                let sum: Operator = (0..n).map(|j| &self.grid[k1][j] * &self.grid[k2][j].dagger()).sum();
                worst = worst.max(sum.max_diff(if k1 == k2 { &id } else { &zero }));
            }
        }
        worst
    }

    /// `G = Σ_{jk} A_jk ⊗ |j⟩⟨k|`
    pub fn assemble(&self) -> Result<Processor> {
        self.assemble_with_tol(DEFAULT_TOL)
    }

    pub fn assemble_with_tol(&self, tol: f64) -> Result<Processor> {
        let residual = self.orthogonality_residual();
        if residual > tol {
            return Err(Error::OrthogonalityViolation { residual });
        }
        let (m, n) = (self.data_dim, self.prog_dim);
        let g = Operator::from_fn(m * n, m * n, |r, c| self.grid[r % n][c % n][(r / n, c / n)]);
        Processor::with_tol(g, m, n, tol.max(DEFAULT_TOL))
    }

    /// `A_j(Ξ) = Σ_k ⟨k|Ξ⟩ A_jk` for `j = 0..N`.
    pub fn program_operators(&self, program: &StateVector) -> Result<Vec<Operator>> {
        if program.dim() != self.prog_dim {
            return Err(Error::DimensionMismatch(format!(
                "program of dim {} for program space of dim {}",
                program.dim(),
                self.prog_dim
            )));
        }
        Ok((0..self.prog_dim)
            .map(|j| {
                let mut acc = Operator::zeros(self.data_dim, self.data_dim);
                for k in 0..self.prog_dim {
                    let amp = program[k];
                    if amp != ZERO {
                        acc = &acc + &self.grid[j][k].scale(amp);
                    }
                }
                acc
            })
            .collect())
    }

    /// `C_jk = Σ_n A⁽¹⁾_jn A⁽²⁾_nk`, the grid of `G₁G₂`.
    pub fn product(&self, other: &BasisOperators) -> Result<BasisOperators> {
        if self.data_dim != other.data_dim || self.prog_dim != other.prog_dim {
            return Err(Error::DimensionMismatch("basis product of mismatched grids".into()));
        }
        let n = self.prog_dim;
        let grid = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| (0..n).map(|l| &self.grid[j][l] * &other.grid[l][k]).sum())
                    .collect()
            })
            .collect();
        Ok(BasisOperators { data_dim: self.data_dim, prog_dim: n, grid })
    }

    /// Entrywise comparison of grids.
    pub fn approx_eq(&self, other: &BasisOperators, tol: f64) -> bool {
        self.data_dim == other.data_dim
            && self.prog_dim == other.prog_dim
            && self.grid.iter().flatten().zip(other.grid.iter().flatten()).all(|(a, b)| a.approx_eq(b, tol))
    }
}

/// Program register state: a unit vector or a density operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProgramRepr", into = "ProgramRepr")]
pub enum ProgramState {
    Pure(StateVector),
    Mixed(Operator),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
enum ProgramRepr {
    Pure(StateVector),
    Mixed(Operator),
}

impl TryFrom<ProgramRepr> for ProgramState {
    type Error = Error;

    fn try_from(repr: ProgramRepr) -> Result<Self> {
        match repr {
            ProgramRepr::Pure(v) => Ok(ProgramState::Pure(v)),
            ProgramRepr::Mixed(m) => ProgramState::mixed(m),
        }
    }
}

impl From<ProgramState> for ProgramRepr {
    fn from(p: ProgramState) -> Self {
        match p {
            ProgramState::Pure(v) => ProgramRepr::Pure(v),
            ProgramState::Mixed(m) => ProgramRepr::Mixed(m),
        }
    }
}

impl ProgramState {
    pub fn pure(v: StateVector) -> Self {
        ProgramState::Pure(v)
    }

    /// Rejects anything that is not a density operator; no renormalization.
    pub fn mixed(rho: Operator) -> Result<Self> {
        operator::check_density(&rho, DEFAULT_TOL)?;
        Ok(ProgramState::Mixed(rho))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        ProgramState::Pure(StateVector::basis(dim, k))
    }

    pub fn dim(&self) -> usize {
        match self {
            ProgramState::Pure(v) => v.dim(),
            ProgramState::Mixed(m) => m.rows(),
        }
    }

    pub fn density(&self) -> Operator {
        match self {
            ProgramState::Pure(v) => v.projector(),
            ProgramState::Mixed(m) => m.clone(),
        }
    }

    /// `ρ_p = Σ_k λ_k |χ_k⟩⟨χ_k|` with weights below [`SPECTRAL_CUTOFF`] dropped.
    pub fn spectral(&self) -> Vec<(f64, StateVector)> {
        match self {
            ProgramState::Pure(v) => vec![(1.0, v.clone())],
            ProgramState::Mixed(m) => {
                let (vals, vecs) = linalg::eigh(m);
                let n = m.rows();
                vals.iter()
                    .enumerate()
                    .rev()
                    .filter(|(_, &l)| l > SPECTRAL_CUTOFF)
                    .map(|(k, &l)| {
                        let col: Vec<C64> = (0..n).map(|i| vecs[(i, k)]).collect();
                        (l, StateVector::from_raw_unchecked(col))
                    })
                    .collect()
            }
        }
    }
}

/// Kraus operators of the map a program induces.
///
/// A pure program gives `{A_j(Ξ)}`. A mixed program gives
/// `{√λ_k A_j(χ_k)}` over its spectral decomposition.
pub fn induced_channel(proc: &Processor, program: &ProgramState) -> Result<Channel> {
    proc.check_program(program)?;
    let basis = proc.basis();
    let mut kraus = Vec::new();
    for (weight, chi) in program.spectral() {
        let s = weight.sqrt();
        kraus.extend(basis.program_operators(&chi)?.into_iter().map(|a| &a * s));
    }
    Channel::new(kraus)
}

/// Replaces a mixed program by a pure one on an enlarged program space:
/// `G' = G ⊗ 1` and `|Φ⟩ = Σ_k √λ_k |χ_k⟩ ⊗ |k⟩`.
pub fn purify_program(proc: &Processor, program: &ProgramState) -> Result<(Processor, StateVector)> {
    proc.check_program(program)?;
    if let ProgramState::Mixed(m) = program {
        operator::check_density(m, DEFAULT_TOL)?;
    }
    let n = proc.prog_dim;
    let g = operator::tensor(&proc.g, &Operator::identity(n));
    let lifted = Processor { g, data_dim: proc.data_dim, prog_dim: n * n };

    let mut amps = vec![ZERO; n * n];
    for (k, (weight, chi)) in program.spectral().into_iter().enumerate() {
        let s = weight.sqrt();
        for (i, a) in chi.amplitudes().iter().enumerate() {
            amps[i * n + k] += a * s;
        }
    }
    // spectral weights dropped below the cutoff shift the norm by at most N·1e-12
    let phi = StateVector::normalized(amps)?;
    Ok((lifted, phi))
}

/// `‖Σ_k A_k†(Ξ₁) A_k(Ξ₂) − ⟨Ξ₁|Ξ₂⟩ 1‖_max`, zero for every valid processor.
pub fn mapcond_residual(basis: &BasisOperators, xi1: &StateVector, xi2: &StateVector) -> Result<f64> {
    let a1 = basis.program_operators(xi1)?;
    let a2 = basis.program_operators(xi2)?;
    Ok(kraus_mapcond_residual(&a1, &a2, xi1.inner(xi2)))
}

/// `‖Σ_k K1_k† K2_k − c 1‖_max` for two Kraus lists of equal length, the
/// condition any pair of maps realized on one processor must satisfy.
pub fn kraus_mapcond_residual(k1: &[Operator], k2: &[Operator], c: C64) -> f64 {
    assert_eq!(k1.len(), k2.len(), "Kraus lists must have equal length");
    let dim = k1[0].rows();
    let sum: Operator = k1.iter().zip(k2).map(|(a, b)| &a.dagger() * b).sum();
    sum.max_diff(&Operator::identity(dim).scale(c))
}

/// `G₁ G₂`
pub fn compose(p1: &Processor, p2: &Processor) -> Result<Processor> {
    if p1.data_dim != p2.data_dim || p1.prog_dim != p2.prog_dim {
        return Err(Error::DimensionMismatch("composing processors on different spaces".into()));
    }
    Ok(Processor { g: &p1.g * &p2.g, data_dim: p1.data_dim, prog_dim: p1.prog_dim })
}

/// Whether `G₂ = (1 ⊗ U_{p1}) G₁ (1 ⊗ U_{p2})` within `tol`. When it does, the
/// induced relation `A⁽²⁾_jk = Σ_{mn} (U_{p1})_jm (U_{p2})_nk A⁽¹⁾_mn` is
/// also checked on the extracted grids.
pub fn equivalent_via(p1: &Processor, p2: &Processor, u_p1: &Operator, u_p2: &Operator, tol: f64) -> Result<bool> {
    if p1.data_dim != p2.data_dim || p1.prog_dim != p2.prog_dim {
        return Err(Error::DimensionMismatch("processors on different spaces".into()));
    }
    let n = p1.prog_dim;
    for u in [u_p1, u_p2] {
        if u.rows() != n || u.cols() != n {
            return Err(Error::DimensionMismatch(format!("{}x{} program unitary for dim {n}", u.rows(), u.cols())));
        }
        let residual = operator::unitarity_residual(u)?;
        if residual > tol.max(DEFAULT_TOL) {
            return Err(Error::NotUnitary { residual });
        }
    }
    let id = Operator::identity(p1.data_dim);
    let left = operator::tensor(&id, u_p1);
    let right = operator::tensor(&id, u_p2);
    let predicted = &(&left * &p1.g) * &right;
    if !predicted.approx_eq(&p2.g, tol) {
        return Ok(false);
    }

    let (b1, b2) = (p1.basis(), p2.basis());
    for j in 0..n {
        for k in 0..n {
            let mut acc = Operator::zeros(p1.data_dim, p1.data_dim);
            for m in 0..n {
                for l in 0..n {
                    let w = u_p1[(j, m)] * u_p2[(l, k)];
                    if w != ZERO {
                        acc = &acc + &b1.get(m, l).scale(w);
                    }
                }
            }
            if !acc.approx_eq(b2.get(j, k), tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `[Tr_p(G¹), …, Tr_p(G^n_max)]`, invariant under program basis changes
/// `G ↦ (1 ⊗ V) G (1 ⊗ V†)`.
pub fn trace_invariants(proc: &Processor, n_max: usize) -> Result<Vec<Operator>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(n_max);
    let mut power = proc.g.clone();
    for step in 1..=n_max {
        if step > 1 {
            power = &power * &proc.g;
        }
        out.push(operator::partial_trace(&power, proc.data_dim, proc.prog_dim, Keep::A)?);
    }
    Ok(out)
}

/// Pairs of computational-basis programs whose induced channels coincide.
/// A processor can only distinguish maps through orthogonal programs, so
/// distinct channels from `|j⟩` and `|k⟩` require `⟨j|k⟩ = 0`.
pub fn indistinguishable_basis_programs(proc: &Processor, tol: f64) -> Result<Vec<(usize, usize)>> {
    let n = proc.prog_dim;
    let channels: Vec<Channel> =
        (0..n).map(|k| induced_channel(proc, &ProgramState::basis(n, k))).collect::<Result<_>>()?;
    let mut same = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            if crate::channel::choi_distance(&channels[j], &channels[k])? <= tol {
                same.push((j, k));
            }
        }
    }
    Ok(same)
}

pub(crate) fn block_diagonal(blocks: &[Operator]) -> Operator {
    let n = blocks.len();
    let m = blocks[0].rows();
    Operator::from_fn(m * n, m * n, |r, c| if r % n == c % n { blocks[r % n][(r / n, c / n)] } else { ZERO })
}
