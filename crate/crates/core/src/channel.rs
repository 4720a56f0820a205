//! Completely positive maps in Kraus form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{self, Operator, C64, DEFAULT_TOL, ZERO};
use crate::random::{random_density_with, random_state_with, rng_from_seed};

/// Null-space threshold on squared singular values of `S − 1`, where `S` is
/// the superoperator matrix. Squared singular values carry absolute error
/// near 1e-16, so this corresponds to singular values below 1e-7.
const FIXED_POINT_NULL_TOL: f64 = 1e-14;
const FIXED_POINT_RESIDUAL: f64 = 1e-8;
const POWER_ITERATION_LIMIT: usize = 200_000;

/// A completely positive map `ρ ↦ Σ_j K_j ρ K_j†`.
///
/// `tp` is true for trace-preserving maps. Post-selected maps are trace
/// non-increasing and carry `tp = false`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRepr", into = "ChannelRepr")]
pub struct Channel {
    dim: usize,
    kraus: Vec<Operator>,
    tp: bool,
}

#[derive(Serialize, Deserialize)]
struct ChannelRepr {
    dim: usize,
    tp: bool,
    kraus: Vec<Operator>,
}

impl TryFrom<ChannelRepr> for Channel {
    type Error = Error;

    fn try_from(repr: ChannelRepr) -> Result<Self> {
        let ch = if repr.tp { Channel::new(repr.kraus)? } else { Channel::trace_nonincreasing(repr.kraus)? };
        if ch.dim != repr.dim {
            return Err(Error::DimensionMismatch(format!(
                "channel declares dim {} but Kraus operators are {}x{}",
                repr.dim, ch.dim, ch.dim
            )));
        }
        Ok(ch)
    }
}

impl From<Channel> for ChannelRepr {
    fn from(ch: Channel) -> Self {
        ChannelRepr { dim: ch.dim, tp: ch.tp, kraus: ch.kraus }
    }
}

/// `‖Σ_j K_j†K_j − 1‖_max`
pub fn completeness_residual(kraus: &[Operator]) -> Result<f64> {
    let dim = check_kraus_shapes(kraus)?;
    let sum: Operator = kraus.iter().map(|k| &k.dagger() * k).sum();
    Ok(sum.max_diff(&Operator::identity(dim)))
}

fn check_kraus_shapes(kraus: &[Operator]) -> Result<usize> {
    let first = kraus.first().ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
    let dim = first.ensure_square()?;
    if let Some(bad) = kraus.iter().find(|k| k.rows() != dim || k.cols() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "Kraus operator {}x{} in a {dim}-dimensional channel",
            bad.rows(),
            bad.cols()
        )));
    }
    Ok(dim)
}

impl Channel {
    /// Trace-preserving channel, validated within [`DEFAULT_TOL`].
    pub fn new(kraus: Vec<Operator>) -> Result<Self> {
        Channel::with_tol(kraus, DEFAULT_TOL)
    }

    pub fn with_tol(kraus: Vec<Operator>, tol: f64) -> Result<Self> {
        let residual = completeness_residual(&kraus)?;
        if residual > tol {
            return Err(Error::NotTracePreserving { residual });
        }
        let dim = kraus[0].rows();
        Ok(Channel { dim, kraus, tp: true })
    }

    /// Trace non-increasing map: `Σ_j K_j†K_j ≤ 1`.
    pub fn trace_nonincreasing(kraus: Vec<Operator>) -> Result<Self> {
        let dim = check_kraus_shapes(&kraus)?;
        let sum: Operator = kraus.iter().map(|k| &k.dagger() * k).sum();
        let slack = &Operator::identity(dim) - &sum;
        let min = linalg::eigvalsh(&slack)[0];
        if min < -DEFAULT_TOL {
            return Err(Error::InvalidArgument(format!(
                "Kraus operators are trace increasing (min eigenvalue of 1 - ΣK†K is {min:e})"
            )));
        }
        Ok(Channel { dim, kraus, tp: false })
    }

    pub fn identity(dim: usize) -> Self {
        Channel { dim, kraus: vec![Operator::identity(dim)], tp: true }
    }

    pub fn unitary(u: &Operator) -> Result<Self> {
        Channel::new(vec![u.clone()])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[Operator] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.tp
    }

    /// `Σ_j K_j ρ K_j†`
    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} input to a {}-dimensional channel",
                rho.rows(),
                rho.cols(),
                self.dim
            )));
        }
        Ok(self.kraus.iter().map(|k| k.sandwich(rho)).sum())
    }

    /// The channel `ρ ↦ U T[U†ρU] U†`, i.e. Kraus operators `U K_j U†`.
    pub fn conjugated(&self, u: &Operator) -> Channel {
        let kraus = self.kraus.iter().map(|k| u.sandwich(k)).collect();
        Channel { dim: self.dim, kraus, tp: self.tp }
    }

    /// Matrix of the map on row-major vectorized operators:
    /// `Σ_j K_j ⊗ conj(K_j)`.
    pub fn superoperator(&self) -> Operator {
        self.kraus.iter().map(|k| operator::tensor(k, &k.conj())).sum()
    }

    /// `Σ_{mn} |m⟩⟨n| ⊗ T[|m⟩⟨n|]`, unnormalized.
    pub fn choi(&self) -> ChoiMatrix {
        let m = self.dim;
        let n = m * m;
        let mut out = Operator::zeros(n, n);
        // entry ((a,i),(b,j)) = Σ_k K_k[i,a] conj(K_k[j,b])
        for k in &self.kraus {
            for a in 0..m {
                for i in 0..m {
                    let x = k[(i, a)];
                    if x == ZERO {
                        continue;
                    }
                    for b in 0..m {
                        for j in 0..m {
                            out[(a * m + i, b * m + j)] += x * k[(j, b)].conj();
                        }
                    }
                }
            }
        }
        ChoiMatrix { dim: m, matrix: out }
    }

    pub fn unitality_residual(&self) -> f64 {
        let mixed = Operator::identity(self.dim).scale(C64::new(1.0 / self.dim as f64, 0.0));
        self.apply(&mixed).expect("dimension matches").max_diff(&mixed)
    }

    /// `‖T[1/M] − 1/M‖_max ≤ tol`
    pub fn is_unital(&self, tol: f64) -> bool {
        self.unitality_residual() <= tol
    }

    /// The unique fixed state of a trace-preserving channel.
    ///
    /// The null space of `S − 1` is read off the eigen-decomposition of the
    /// Hermitian matrix `(S − 1)†(S − 1)`. A null space of dimension other
    /// than one is reported as [`Error::NoUniqueFixedPoint`]. If the null
    /// vector does not reproduce a fixed state to 1e-8, power iteration from
    /// `1/M` is used instead.
    pub fn fixed_point(&self) -> Result<Operator> {
        if !self.tp {
            return Err(Error::InvalidArgument("fixed point requires a trace-preserving channel".into()));
        }
        let m = self.dim;
        let b = &self.superoperator() - &Operator::identity(m * m);
        let (vals, vecs) = linalg::eigh(&(&b.dagger() * &b));
        let null_dim = vals.iter().take_while(|&&v| v <= FIXED_POINT_NULL_TOL).count();
        if null_dim > 1 {
            return Err(Error::NoUniqueFixedPoint { dimension: null_dim });
        }

        let candidate = if null_dim == 1 {
            let rho = Operator::from_fn(m, m, |i, j| vecs[(i * m + j, 0)]);
            let tr = rho.trace();
            (tr.norm() > 1e-8).then(|| rho.scale(tr.inv()).hermitian_part())
        } else {
            None
        };
        if let Some(rho) = candidate {
            if self.fixed_point_residual(&rho) <= FIXED_POINT_RESIDUAL {
                return Ok(rho);
            }
        }
        self.power_iteration()
    }

    fn fixed_point_residual(&self, rho: &Operator) -> f64 {
        let out = self.apply(rho).expect("dimension matches");
        operator::trace_distance(&out, rho).expect("dimension matches")
    }

    fn power_iteration(&self) -> Result<Operator> {
        let m = self.dim;
        let mut rho = Operator::identity(m).scale(C64::new(1.0 / m as f64, 0.0));
        for _ in 0..POWER_ITERATION_LIMIT {
            let next = self.apply(&rho)?.hermitian_part();
            let step = next.max_diff(&rho);
            rho = next;
            if step <= 1e-14 {
                break;
            }
        }
        if self.fixed_point_residual(&rho) <= FIXED_POINT_RESIDUAL {
            Ok(rho)
        } else {
            Err(Error::NoUniqueFixedPoint { dimension: 0 })
        }
    }

    /// Largest sampled ratio `D(T[ρ₁], T[ρ₂]) / D(ρ₁, ρ₂)` over random state
    /// pairs, alternating pure and full-rank mixed pairs.
    pub fn contraction_factor(&self, trials: usize, seed: u64) -> Result<f64> {
        if trials == 0 {
            return Err(Error::InvalidArgument("contraction_factor needs at least one trial".into()));
        }
        let mut rng = rng_from_seed(seed);
        let mut best: f64 = 0.0;
        for t in 0..trials {
            let (a, b) = if t % 2 == 0 {
                (random_state_with(self.dim, &mut rng).projector(), random_state_with(self.dim, &mut rng).projector())
            } else {
                (random_density_with(self.dim, &mut rng), random_density_with(self.dim, &mut rng))
            };
            let before = operator::trace_distance(&a, &b)?;
            if before < 1e-9 {
                continue;
            }
            let after = operator::trace_distance(&self.apply(&a)?, &self.apply(&b)?)?;
            best = best.max(after / before);
        }
        Ok(best)
    }
}

/// Choi matrix of a channel, `Σ_{mn} |m⟩⟨n| ⊗ T[|m⟩⟨n|]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub dim: usize,
    pub matrix: Operator,
}

impl ChoiMatrix {
    /// Divided by its trace, which is `M` for trace-preserving channels.
    /// Post-selected maps are thereby renormalized to their conditional form.
    pub fn normalized(&self) -> Operator {
        let tr = self.matrix.trace().re;
        if tr > 1e-300 {
            &self.matrix * (1.0 / tr)
        } else {
            self.matrix.clone()
        }
    }
}

/// Trace distance between normalized Choi matrices.
pub fn choi_distance(a: &Channel, b: &Channel) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!("channels of dim {} and {}", a.dim, b.dim)));
    }
    operator::trace_distance(&a.choi().normalized(), &b.choi().normalized())
}

/// Channels are equal when their normalized Choi matrices agree within `tol`
/// in trace distance.
pub fn channels_equal(a: &Channel, b: &Channel, tol: f64) -> Result<bool> {
    Ok(choi_distance(a, b)? <= tol)
}
