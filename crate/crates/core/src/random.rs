//! Seeded generators for test and sampling inputs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{Operator, StateVector, C64};

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian(rng: &mut Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random unitary, deterministic in `seed`.
pub fn random_unitary(dim: usize, seed: u64) -> Result<Operator> {
    if dim == 0 {
        return Err(Error::InvalidArgument("unitary dimension must be positive".into()));
    }
    Ok(random_unitary_with(dim, &mut rng_from_seed(seed)))
}

/// Haar-random unitary from a Ginibre matrix orthonormalized column by column
/// (modified Gram-Schmidt), with each column's phase fixed so the implied
/// triangular factor has a positive real diagonal.
pub fn random_unitary_with(dim: usize, rng: &mut Rng) -> Operator {
    assert!(dim > 0);
    let mut cols: Vec<Vec<C64>> = (0..dim)
        .map(|_| (0..dim).map(|_| complex_gaussian(rng)).collect())
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let proj: C64 = done[k].iter().zip(&rest[0]).map(|(q, a)| q.conj() * a).sum();
            for (a, q) in rest[0].iter_mut().zip(&done[k]) {
                *a -= proj * q;
            }
        }
        // r_jj = ‖a_j‖ is real positive; dividing by it is the phase fix
        let r = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for a in cols[j].iter_mut() {
            *a /= r;
        }
    }
    Operator::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Haar-random element of SU(dim): a Haar unitary with its determinant phase
/// divided out.
pub fn random_special_unitary_with(dim: usize, rng: &mut Rng) -> Operator {
    let u = random_unitary_with(dim, rng);
    let phase = linalg::det(&u).arg() / dim as f64;
    u.scale(C64::from_polar(1.0, -phase))
}

pub fn random_state_with(dim: usize, rng: &mut Rng) -> StateVector {
    let amps: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    StateVector::normalized(amps).expect("gaussian vector is nonzero")
}

/// Full-rank random density operator `A A† / Tr(A A†)` with Ginibre `A`.
pub fn random_density_with(dim: usize, rng: &mut Rng) -> Operator {
    let a = Operator::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let aa = &a * &a.dagger();
    let tr = aa.trace().re;
    (&aa * (1.0 / tr)).hermitian_part()
}

pub fn random_hermitian(dim: usize, rng: &mut Rng) -> Operator {
    Operator::from_fn(dim, dim, |_, _| complex_gaussian(rng)).hermitian_part()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{is_density, is_unitary, DEFAULT_TOL};

    #[test]
    fn unitary_for_every_seed() {
        for seed in 0..50 {
            for dim in [1, 2, 4, 7] {
                assert!(is_unitary(&random_unitary(dim, seed).unwrap(), DEFAULT_TOL).unwrap());
            }
        }
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(random_unitary(3, 11).unwrap(), random_unitary(3, 11).unwrap());
        assert_ne!(random_unitary(3, 11).unwrap(), random_unitary(3, 12).unwrap());
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(random_unitary(0, 0).is_err());
    }

    #[test]
    fn mean_entry_weight_matches_haar() {
        // E|U_ij|^2 = 1/d for Haar measure
        let mut rng = rng_from_seed(2024);
        let samples = 1000;
        let mut acc = 0.0;
        for _ in 0..samples {
            let u = random_unitary_with(2, &mut rng);
            acc += u.entries().iter().map(|z| z.norm_sqr()).sum::<f64>() / 4.0;
        }
        assert!((acc / samples as f64 - 0.5).abs() < 0.05);
        // a single entry is a sharper check: diagonal entries are not biased
        let mut rng = rng_from_seed(5);
        let mean00: f64 = (0..samples).map(|_| random_unitary_with(2, &mut rng)[(0, 0)].norm_sqr()).sum::<f64>()
            / samples as f64;
        assert!((mean00 - 0.5).abs() < 0.05);
    }

    #[test]
    fn special_unitary_has_unit_determinant() {
        let mut rng = rng_from_seed(3);
        for dim in [2, 3, 4] {
            let u = random_special_unitary_with(dim, &mut rng);
            assert!((linalg::det(&u) - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn random_density_is_valid() {
        let mut rng = rng_from_seed(9);
        for dim in 1..6 {
            assert!(is_density(&random_density_with(dim, &mut rng), DEFAULT_TOL).unwrap());
        }
    }
}
