//! Realizing one-parameter channel families on a processor.
//!
//! Phase damping `T_θ[ρ] = θρ + (1−θ)σ_zρσ_z` runs on a two-dimensional
//! program. Amplitude damping does not run on any finite program: realizing
//! it would force the first rows `u₀(θ)` of the Kraus-mixing unitaries to
//! have overlaps bounded by `g(θ₁,θ₂)`, and along `ζ_n = (16M²)^{-n}` those
//! bounds make `M` of the vectors linearly independent for every `M`.
//! [`no_go_witness`] evaluates that chain of bounds; [`feasibility_search`]
//! looks for processors numerically.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{self, gates, Operator, StateVector, C64};
use crate::processor::{BasisOperators, Processor, ProgramState};
use crate::random::{rng_from_seed, Rng};
use crate::zoo::make_u_processor;

pub type KrausFn = Arc<dyn Fn(f64) -> Result<Vec<Operator>> + Send + Sync>;

/// A family `θ ↦ T_θ` sampled on a grid.
#[derive(Clone)]
pub struct ParamChannelFamily {
    name: String,
    dim: usize,
    grid: Vec<f64>,
    kraus_fn: KrausFn,
}

impl fmt::Debug for ParamChannelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamChannelFamily")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("grid", &self.grid)
            .finish()
    }
}

impl ParamChannelFamily {
    /// Fails unless every grid point yields a trace-preserving Kraus list.
    pub fn new(name: &str, dim: usize, grid: Vec<f64>, kraus_fn: KrausFn) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidArgument("empty parameter grid".into()));
        }
        let family = ParamChannelFamily { name: name.to_string(), dim, grid, kraus_fn };
        for &theta in &family.grid {
            let ch = family.channel_at(theta)?;
            if ch.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "family member at θ = {theta} acts on dim {}, expected {dim}",
                    ch.dim()
                )));
            }
        }
        Ok(family)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn kraus(&self, theta: f64) -> Result<Vec<Operator>> {
        (self.kraus_fn)(theta)
    }

    pub fn channel_at(&self, theta: f64) -> Result<Channel> {
        Channel::new(self.kraus(theta)?)
    }
}

fn check_unit_interval(theta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::OutOfRange(format!("θ = {theta} is outside [0, 1]")));
    }
    Ok(())
}

/// `{√θ 1, √(1−θ) σ_z}`
pub fn phase_damping_kraus(theta: f64) -> Result<Vec<Operator>> {
    check_unit_interval(theta)?;
    Ok(vec![&Operator::identity(2) * theta.sqrt(), &gates::pauli_z() * (1.0 - theta).sqrt()])
}

/// `{|0⟩⟨0| + √(1−θ)|1⟩⟨1|, √θ |0⟩⟨1|}`
pub fn amplitude_damping_kraus(theta: f64) -> Result<Vec<Operator>> {
    check_unit_interval(theta)?;
    Ok(vec![
        Operator::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - theta).sqrt()])?,
        Operator::from_real(2, 2, &[0.0, theta.sqrt(), 0.0, 0.0])?,
    ])
}

pub fn phase_damping_family(grid: Vec<f64>) -> Result<ParamChannelFamily> {
    ParamChannelFamily::new("phase", 2, grid, Arc::new(phase_damping_kraus))
}

pub fn amplitude_damping_family(grid: Vec<f64>) -> Result<ParamChannelFamily> {
    ParamChannelFamily::new("amp", 2, grid, Arc::new(amplitude_damping_kraus))
}

/// The same channel at every grid point.
pub fn constant_family(name: &str, kraus: Vec<Operator>, grid: Vec<f64>) -> Result<ParamChannelFamily> {
    let dim = kraus.first().map(|k| k.rows()).unwrap_or(0);
    ParamChannelFamily::new(name, dim, grid, Arc::new(move |_| Ok(kraus.clone())))
}

/// The U processor with unitaries `{1, σ_z}`.
pub fn phase_damping_processor() -> Processor {
    make_u_processor(&[Operator::identity(2), gates::pauli_z()]).expect("1 and σ_z are unitary")
}

/// `|Ξ(θ)⟩ = √θ|0⟩ + √(1−θ)|1⟩`
pub fn phase_damping_program(theta: f64) -> Result<ProgramState> {
    check_unit_interval(theta)?;
    Ok(ProgramState::pure(StateVector::from_real(&[theta.sqrt(), (1.0 - theta).sqrt()])?))
}

pub fn build_phase_damping_processor() -> (Processor, fn(f64) -> Result<ProgramState>) {
    (phase_damping_processor(), phase_damping_program)
}

/// `Σ_j B_j†(θ₁) B_j(θ₂)` for the amplitude-damping Kraus operators.
pub fn kraus_overlap(theta1: f64, theta2: f64) -> Result<Operator> {
    let b1 = amplitude_damping_kraus(theta1)?;
    let b2 = amplitude_damping_kraus(theta2)?;
    Ok(b1.iter().zip(&b2).map(|(x, y)| &x.dagger() * y).sum())
}

/// Coefficient of `|1⟩⟨1|` in [`kraus_overlap`]: `√(θ₁θ₂) + √((1−θ₁)(1−θ₂))`.
pub fn kraus_overlap_coefficient(theta1: f64, theta2: f64) -> f64 {
    (theta1 * theta2).sqrt() + ((1.0 - theta1) * (1.0 - theta2)).sqrt()
}

/// `g(θ₁,θ₂) = √(θ₁θ₂) / (1 − √((1−θ₁)(1−θ₂)))`.
///
/// Evaluated as `√θ₁√θ₂ (1 + √((1−θ₁)(1−θ₂))) / (θ₁ + θ₂ − θ₁θ₂)`, which
/// avoids cancellation in the denominator for small θ.
pub fn overlap_bound_g(theta1: f64, theta2: f64) -> Result<f64> {
    check_unit_interval(theta1)?;
    check_unit_interval(theta2)?;
    let denom = theta1 + theta2 - theta1 * theta2;
    if denom <= 0.0 {
        return Err(Error::OutOfRange("g is undefined at θ₁ = θ₂ = 0".into()));
    }
    let root = ((1.0 - theta1) * (1.0 - theta2)).sqrt();
    Ok(theta1.sqrt() * theta2.sqrt() * (1.0 + root) / denom)
}

/// `2√(θ₁θ₂) / (θ₁ + θ₂ − θ₁θ₂/2)`, from `√(1−θ) ≤ 1 − θ/2`.
pub fn g_first_relaxation(theta1: f64, theta2: f64) -> f64 {
    2.0 * theta1.sqrt() * theta2.sqrt() / (theta1 + theta2 - theta1 * theta2 / 2.0)
}

/// `8√(θ₁θ₂) / (3(θ₁ + θ₂))`
pub fn g_second_relaxation(theta1: f64, theta2: f64) -> f64 {
    8.0 * theta1.sqrt() * theta2.sqrt() / (3.0 * (theta1 + theta2))
}

/// `(θ₁ + θ₂) / (θ₁ + θ₂ − θ₁θ₂/2)`, at most 4/3 on the unit square.
pub fn relaxation_ratio(theta1: f64, theta2: f64) -> f64 {
    (theta1 + theta2) / (theta1 + theta2 - theta1 * theta2 / 2.0)
}

/// True iff the Gram matrix of `vectors` has smallest eigenvalue above 1e-10.
pub fn linear_independence_check(vectors: &[StateVector]) -> Result<bool> {
    if vectors.len() < 2 {
        return Err(Error::InvalidArgument("need at least two vectors".into()));
    }
    let dim = vectors[0].dim();
    if vectors.iter().any(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch("vectors of unequal dimension".into()));
    }
    let n = vectors.len();
    let gram = Operator::from_fn(n, n, |i, j| vectors[i].inner(&vectors[j]));
    Ok(linalg::eigvalsh(&gram)[0] > 1e-10)
}

/// Whether every pairwise overlap is strictly below `1/(count − 1)`.
pub fn lemma_hypothesis_holds(vectors: &[StateVector]) -> bool {
    let n = vectors.len();
    if n < 2 {
        return false;
    }
    let bound = 1.0 / (n - 1) as f64;
    (0..n).all(|i| ((i + 1)..n).all(|j| vectors[i].inner(&vectors[j]).norm() < bound))
}

/// `ζ_n = (1/(16M²))ⁿ` for `n = 1..=M`.
pub fn zeta_sequence(m_witness: usize) -> Vec<f64> {
    let base = 1.0 / (16.0 * (m_witness as f64).powi(2));
    (1..=m_witness as i32).map(|n| base.powi(n)).collect()
}

/// One pairwise entry of the no-go bound table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub n: usize,
    pub m: usize,
    pub theta1: f64,
    pub theta2: f64,
    pub g: f64,
    pub first_relaxation: f64,
    pub second_relaxation: f64,
    /// `(8/3)(4M)^{-(m−n)}`
    pub geometric_bound: f64,
    /// `1/M`
    pub threshold: f64,
    pub chain_holds: bool,
    pub below_threshold: bool,
}

/// Structured evidence that amplitude damping has no finite-program processor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoGoReport {
    pub m_witness: usize,
    pub n_ambient: usize,
    pub zeta_sequence: Vec<f64>,
    pub bound_checks: Vec<BoundCheck>,
    /// Unit diagonal with off-diagonal entries `g(ζ_n, ζ_m)`: the largest
    /// overlap moduli any compatible family `{u₀(ζ_n)}` can have.
    pub gram_matrix: Operator,
    /// Gershgorin lower bound `1 − max_n Σ_{m≠n} g(ζ_n, ζ_m)` on the smallest
    /// eigenvalue (equivalently singular value) of every Gram matrix
    /// obeying those bounds.
    pub min_singular_value: f64,
    pub all_below_threshold: bool,
    pub contradiction: String,
}

/// Evaluates the bound chain on `ζ_1..ζ_M` and states the dimension-counting
/// contradiction with an `N`-dimensional program space. No vectors are
/// constructed: the report bounds every family that could exist.
pub fn no_go_witness(m_witness: usize, n_ambient: usize) -> Result<NoGoReport> {
    if n_ambient < 2 {
        return Err(Error::InvalidArgument(format!("ambient dimension must be at least 2, got {n_ambient}")));
    }
    if m_witness <= n_ambient {
        return Err(Error::NoContradiction { witness: m_witness, ambient: n_ambient });
    }
    let zeta = zeta_sequence(m_witness);
    if zeta.iter().any(|&z| z < f64::MIN_POSITIVE) {
        return Err(Error::OutOfRange(format!("ζ sequence underflows for M = {m_witness}")));
    }
    let mf = m_witness as f64;
    let threshold = 1.0 / mf;
    let mut bound_checks = Vec::new();
    let mut gram = Operator::identity(m_witness);
    for n in 0..m_witness {
        for m in (n + 1)..m_witness {
            let (t1, t2) = (zeta[n], zeta[m]);
            let g = overlap_bound_g(t1, t2)?;
            let first = g_first_relaxation(t1, t2);
            let second = g_second_relaxation(t1, t2);
            let geometric = (8.0 / 3.0) * (4.0 * mf).powi(-((m - n) as i32));
            // relative slack for rounding in the chained bounds
            let slack = 1e-12;
            let chain_holds = g <= first * (1.0 + slack) && first <= second * (1.0 + slack) && second <= geometric * (1.0 + slack);
            bound_checks.push(BoundCheck {
                n: n + 1,
                m: m + 1,
                theta1: t1,
                theta2: t2,
                g,
                first_relaxation: first,
                second_relaxation: second,
                geometric_bound: geometric,
                threshold,
                chain_holds,
                below_threshold: geometric < threshold && g < threshold,
            });
            gram[(n, m)] = C64::new(g, 0.0);
            gram[(m, n)] = C64::new(g, 0.0);
        }
    }
    let max_row_sum = (0..m_witness)
        .map(|n| (0..m_witness).filter(|&m| m != n).map(|m| gram[(n, m)].re).sum::<f64>())
        .fold(0.0, f64::max);
    let min_singular_value = 1.0 - max_row_sum;
    let all_below_threshold = bound_checks.iter().all(|b| b.below_threshold && b.chain_holds);
    let contradiction = format!(
        "Any unit vectors u0(zeta_1..zeta_{m}) consistent with the overlap bound have pairwise \
         |<u_n|u_m>| < 1/{m} < 1/({m}-1), so they are {m} linearly independent vectors \
         (every compatible Gram matrix has smallest eigenvalue >= {min_singular_value:.6}). \
         They would have to lie in a {n}-dimensional program space, which holds at most {n} \
         independent vectors: no processor with program dimension {n} realizes amplitude damping.",
        m = m_witness,
        n = n_ambient,
    );
    Ok(NoGoReport {
        m_witness,
        n_ambient,
        zeta_sequence: zeta,
        bound_checks,
        gram_matrix: gram,
        min_singular_value,
        all_below_threshold,
        contradiction,
    })
}

/// Knobs for [`feasibility_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Coordinate sweeps per start.
    pub iterations: usize,
    pub starts: usize,
    pub seed: u64,
    /// Log the residual every this many sweeps.
    pub log_every: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { iterations: 5000, starts: 8, seed: 0, log_every: 50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchLogEntry {
    pub iteration: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// `Σ_θ choi_distance(induced(G, Ξ(θ)), T_θ)²` at the best point.
    pub best_residual: f64,
    pub best_processor: Processor,
    pub best_programs: Vec<ProgramState>,
    pub best_start: usize,
    /// Residual trajectory of the winning start.
    pub log: Vec<SearchLogEntry>,
}

/// Searches for a gate array `G = exp(iH)` on `M·N` dimensions and pure
/// programs `Ξ(θ)` reproducing `family`.
///
/// Multi-start coordinate descent: each coordinate takes a Newton step from
/// central finite differences, halved until it improves. The descent runs on
/// the squared Hilbert-Schmidt distance of normalized Choi matrices, which is
/// smooth and bounds the squared trace distance from above on the Choi
/// space; the reported residual is the squared trace distance. Start 0 uses
/// `H = 0`. Starts run in parallel and are merged deterministically.
pub fn feasibility_search(family: &ParamChannelFamily, prog_dim: usize, opts: &SearchOptions) -> Result<SearchResult> {
    if prog_dim == 0 {
        return Err(Error::InvalidArgument("program dimension must be at least 1".into()));
    }
    if opts.starts == 0 {
        return Err(Error::InvalidArgument("need at least one start".into()));
    }
    let targets: Vec<Operator> = family
        .grid()
        .iter()
        .map(|&t| Ok(family.channel_at(t)?.choi().normalized()))
        .collect::<Result<_>>()?;
    let problem = Problem { data_dim: family.dim(), prog_dim, targets };

    let runs: Vec<StartOutcome> = (0..opts.starts)
        .into_par_iter()
        .map(|start| problem.run(start, opts))
        .collect();
    let best = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.residual.total_cmp(&b.residual).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("at least one start");

    let g = problem.unitary(&best.params);
    let best_processor = Processor::with_tol(g, problem.data_dim, prog_dim, 1e-8)?;
    let best_programs = (0..problem.targets.len())
        .map(|t| ProgramState::pure(problem.program(&best.params, t)))
        .collect();
    Ok(SearchResult {
        best_residual: best.residual,
        best_processor,
        best_programs,
        best_start: best.start,
        log: best.log,
    })
}

struct Problem {
    data_dim: usize,
    prog_dim: usize,
    targets: Vec<Operator>,
}

struct StartOutcome {
    start: usize,
    params: Vec<f64>,
    residual: f64,
    log: Vec<SearchLogEntry>,
}

impl Problem {
    fn total_dim(&self) -> usize {
        self.data_dim * self.prog_dim
    }

    fn h_len(&self) -> usize {
        self.total_dim().pow(2)
    }

    fn prog_len(&self) -> usize {
        2 * self.prog_dim
    }

    fn param_len(&self) -> usize {
        self.h_len() + self.targets.len() * self.prog_len()
    }

    fn hermitian(&self, params: &[f64]) -> Operator {
        let n = self.total_dim();
        let mut h = Operator::zeros(n, n);
        let mut it = params.iter();
        for i in 0..n {
            h[(i, i)] = C64::new(*it.next().unwrap(), 0.0);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let z = C64::new(*it.next().unwrap(), *it.next().unwrap());
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        h
    }

    fn unitary(&self, params: &[f64]) -> Operator {
        linalg::exp_i_hermitian(&self.hermitian(&params[..self.h_len()]))
    }

    fn program(&self, params: &[f64], t: usize) -> StateVector {
        let off = self.h_len() + t * self.prog_len();
        let raw: Vec<C64> = params[off..off + self.prog_len()].chunks(2).map(|c| C64::new(c[0], c[1])).collect();
        StateVector::normalized(raw).unwrap_or_else(|_| StateVector::basis(self.prog_dim, 0))
    }

    fn induced_choi(&self, basis: &BasisOperators, program: &StateVector) -> Operator {
        let kraus = basis.program_operators(program).expect("program dimension fixed by construction");
        let m = self.data_dim as f64;
        let kraus: Vec<Operator> = kraus.into_iter().filter(|k| k.max_abs() > 0.0).collect();
        if kraus.is_empty() {
            return Operator::zeros(self.data_dim.pow(2), self.data_dim.pow(2));
        }
        // unit-trace Choi of a trace-preserving map: divide by M
        let ch = Channel::with_tol(kraus, 1e-6).expect("G is unitary");
        &ch.choi().matrix * (1.0 / m)
    }

    /// Smooth surrogate term for grid point `t`.
    fn term(&self, basis: &BasisOperators, params: &[f64], t: usize) -> f64 {
        let choi = self.induced_choi(basis, &self.program(params, t));
        (&choi - &self.targets[t]).frobenius_norm_sqr()
    }

    fn residual(&self, params: &[f64]) -> f64 {
        let basis = self.basis(params);
        (0..self.targets.len())
            .map(|t| {
                let choi = self.induced_choi(&basis, &self.program(params, t));
                operator::trace_distance(&choi, &self.targets[t]).expect("same shape").powi(2)
            })
            .sum()
    }

    fn basis(&self, params: &[f64]) -> BasisOperators {
        Processor::with_tol(self.unitary(params), self.data_dim, self.prog_dim, 1e-8)
            .expect("exp(iH) is unitary")
            .basis()
    }

    fn initial(&self, start: usize, seed: u64) -> Vec<f64> {
        let mut rng: Rng = rng_from_seed(seed ^ (start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut params: Vec<f64> = (0..self.param_len()).map(|_| normal(&mut rng)).collect();
        if start == 0 {
            params[..self.h_len()].iter_mut().for_each(|x| *x = 0.0);
        }
        params
    }

    fn run(&self, start: usize, opts: &SearchOptions) -> StartOutcome {
        let mut x = self.initial(start, opts.seed);
        let mut basis = self.basis(&x);
        let mut terms: Vec<f64> = (0..self.targets.len()).map(|t| self.term(&basis, &x, t)).collect();
        let mut steps = vec![0.1; x.len()];
        let mut log = vec![SearchLogEntry { iteration: 0, residual: self.residual(&x) }];
        let h_len = self.h_len();
        let fd = 1e-5;

        let mut sweeps = 0;
        for iter in 1..=opts.iterations {
            sweeps = iter;
            let mut improved = false;
            for i in 0..x.len() {
                let f0: f64 = terms.iter().sum();
                if f0 < 1e-24 {
                    break;
                }
                // only one grid point depends on a program coordinate
                let program_term = (i >= h_len).then(|| (i - h_len) / self.prog_len());
                let eval = |x: &[f64]| -> (f64, Option<BasisOperators>) {
                    match program_term {
                        Some(t) => {
                            let others: f64 = f0 - terms[t];
                            (others + self.term(&basis, x, t), None)
                        }
                        None => {
                            let b = self.basis(x);
                            let f = (0..self.targets.len()).map(|t| self.term(&b, x, t)).sum();
                            (f, Some(b))
                        }
                    }
                };
                let orig = x[i];
                x[i] = orig + fd;
                let (fp, _) = eval(&x);
                x[i] = orig - fd;
                let (fm, _) = eval(&x);
                let grad = (fp - fm) / (2.0 * fd);
                let curv = (fp + fm - 2.0 * f0) / (fd * fd);
                let mut step = if curv > 1e-12 { -grad / curv } else { -grad.signum() * steps[i] };
                if !step.is_finite() || step == 0.0 {
                    step = steps[i];
                }
                let mut accepted = None;
                for _ in 0..8 {
                    x[i] = orig + step;
                    let (f, b) = eval(&x);
                    if f < f0 {
                        accepted = Some((f, b));
                        break;
                    }
                    step *= 0.5;
                }
                match accepted {
                    Some((_, b)) => {
                        improved = true;
                        steps[i] = (step.abs() * 2.0).clamp(1e-12, 1.0);
                        match program_term {
                            Some(t) => terms[t] = self.term(&basis, &x, t),
                            None => {
                                basis = b.expect("basis recomputed for H coordinates");
                                for (t, term) in terms.iter_mut().enumerate() {
                                    *term = self.term(&basis, &x, t);
                                }
                            }
                        }
                    }
                    None => {
                        x[i] = orig;
                        steps[i] = (steps[i] * 0.5).max(1e-12);
                    }
                }
            }
            if iter % opts.log_every.max(1) == 0 {
                log.push(SearchLogEntry { iteration: iter, residual: self.residual(&x) });
            }
            let f: f64 = terms.iter().sum();
            if f < 1e-24 || !improved {
                break;
            }
        }
        let residual = self.residual(&x);
        if log.last().map(|e| e.iteration) != Some(sweeps) {
            log.push(SearchLogEntry { iteration: sweeps, residual });
        }
        StartOutcome { start, params: x, residual, log }
    }
}

fn normal(rng: &mut Rng) -> f64 {
    use rand_distr::{Distribution, StandardNormal};
    StandardNormal.sample(rng)
}
