//! Seeded random states.
//!
//! Every generator is driven by `ChaCha8Rng::seed_from_u64(seed)` and draws
//! complex Gaussians as `(re, im)` pairs of independent standard normals, in
//! the order documented on each function.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;
use super::state::{DensityMatrix, Ket, MAX_QUBITS};
use crate::error::{Error, Result};

/// The generator used for every stochastic operation in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent sub-seed for the `index`-th instance of a seeded family
/// (SplitMix64 finalizer over `seed + index * golden_gamma`).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Uniformly distributed point on the unit sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-12 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::BadQubitCount(n))
    }
}

/// Haar-random pure state: `2^n` complex Gaussian amplitudes in basis order,
/// normalized.
pub fn random_pure_state(n: usize, seed: u64) -> Result<Ket> {
    check_qubits(n)?;
    let mut rng = rng_from_seed(seed);
    let amps = (0..1usize << n).map(|_| complex_gaussian(&mut rng)).collect();
    Ket::normalized(amps)
}

/// Induced random mixed state `G G† / Tr(G G†)` with `G` a `2^n × rank`
/// complex Gaussian matrix filled column by column. With `rank = 1` this is
/// the projector onto `random_pure_state(n, seed)`.
pub fn random_density(n: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    check_qubits(n)?;
    let dim = 1usize << n;
    if rank == 0 || rank > dim {
        return Err(Error::BadParameter(format!(
            "rank {rank} outside 1..={dim}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut g = ComplexMatrix::zeros(dim, rank);
    for col in 0..rank {
        for row in 0..dim {
            g[(row, col)] = complex_gaussian(&mut rng);
        }
    }
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    let mut rho = gg.scale_real(1.0 / tr);
    // Exact Hermiticity: copy the upper triangle down.
    for i in 0..dim {
        rho[(i, i)] = Complex64::new(rho[(i, i)].re, 0.0);
        for j in (i + 1)..dim {
            rho[(j, i)] = rho[(i, j)].conj();
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(n, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::matrix::Pauli;
    use crate::qalg::state::density_from_ket;

    #[test]
    fn pure_state_is_deterministic() {
        assert_eq!(
            random_pure_state(1, 42).unwrap(),
            random_pure_state(1, 42).unwrap()
        );
        assert_ne!(
            random_pure_state(1, 42).unwrap(),
            random_pure_state(1, 43).unwrap()
        );
    }

    #[test]
    fn pure_state_is_normalized() {
        for seed in 0..20 {
            let k = random_pure_state(3, seed).unwrap();
            assert!((k.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_mean_of_sigma_z_vanishes() {
        let z = Pauli::z();
        let n = 10_000;
        let mut sum = 0.0;
        for seed in 0..n {
            let rho = density_from_ket(&random_pure_state(1, seed).unwrap()).unwrap();
            sum += rho.expectation(&z).re;
        }
        let mean = sum / n as f64;
        assert!(mean.abs() < 0.05, "mean <sigma_z> = {mean}");
    }

    #[test]
    fn rank_one_matches_pure_state() {
        for seed in 0..10 {
            let mixed = random_density(2, 1, seed).unwrap();
            let pure = density_from_ket(&random_pure_state(2, seed).unwrap()).unwrap();
            assert!(mixed.matrix().max_abs_diff(pure.matrix()) < 1e-14);
        }
    }

    #[test]
    fn random_density_is_valid() {
        for rank in 1..=8 {
            let rho = random_density(3, rank, 1000 + rank as u64).unwrap();
            DensityMatrix::new(rho.matrix().clone()).unwrap();
        }
    }

    #[test]
    fn full_rank_has_positive_spectrum() {
        for seed in 0..100 {
            let rho = random_density(2, 4, seed).unwrap();
            let eigs = rho.eigenvalues().unwrap();
            assert!(*eigs.last().unwrap() > 0.0, "seed {seed}: {eigs:?}");
        }
    }

    #[test]
    fn rank_out_of_range() {
        assert!(random_density(2, 0, 1).is_err());
        assert!(random_density(2, 5, 1).is_err());
        assert_eq!(random_pure_state(5, 1), Err(Error::BadQubitCount(5)));
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: Vec<u64> = (0..100).map(|i| derive_seed(7, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), seeds.len());
    }

    #[test]
    fn unit_vectors_are_unit() {
        let mut rng = rng_from_seed(3);
        for _ in 0..100 {
            let v = random_unit_vector(&mut rng);
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }
}
