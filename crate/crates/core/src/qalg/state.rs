use num_complex::Complex64;

use super::eigen::hermitian_eigs;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 4;
/// Slack for normalization, trace and Hermiticity of constructed states.
pub const STATE_TOL: f64 = 1e-12;
/// Slack for negative eigenvalues of a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Largest squared-norm error accepted when turning a ket into a density
/// matrix.
pub const KET_NORM_TOL: f64 = 1e-9;

fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::BadQubitCount(n))
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::WrongDimension {
            expected: dim.next_power_of_two().max(2),
            found: dim,
        });
    }
    let n = dim.trailing_zeros() as usize;
    check_qubits(n)?;
    Ok(n)
}

/// Pure state of up to four qubits. Basis index `b = Σ bit_k 2^(n-1-k)`, so
/// qubit 0 is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Ket {
    /// Wraps raw amplitudes. Only the length is validated; normalization is
    /// checked where it matters (`density_from_ket`).
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(
            amplitudes
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        )
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let ket = Self::from_amplitudes(amplitudes)?;
        let norm = ket.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm_sq: 0.0 });
        }
        Ok(Self {
            num_qubits: ket.num_qubits,
            amplitudes: ket.amplitudes.iter().map(|z| z / norm).collect(),
        })
    }

    /// Computational basis state `|index⟩` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1 << n;
        if index >= dim {
            return Err(Error::BadIndex {
                indices: vec![index],
                num_qubits: n,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Mixed state of up to four qubits: Hermitian, unit trace, positive
/// semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates a user-supplied matrix against the density-matrix
    /// invariants.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, STATE_TOL)
    }

    /// Like [`DensityMatrix::new`] with a custom slack for Hermiticity and
    /// trace. The PSD slack stays at [`PSD_TOL`] unless `tol` is larger.
    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let num_qubits = qubits_for_dim(matrix.rows())?;
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let deviation = matrix.hermiticity_defect();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol {
            return Err(Error::TraceNotOne { trace });
        }
        let eigs = hermitian_eigs(&matrix)?;
        let min_eigenvalue = eigs.last().copied().unwrap_or(0.0);
        if min_eigenvalue < -PSD_TOL.max(tol) {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { num_qubits, matrix })
    }

    /// Internal constructor for matrices that satisfy the invariants by
    /// construction (products, partial traces, outer products).
    pub(crate) fn from_matrix_unchecked(num_qubits: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), 1 << num_qubits);
        Self { num_qubits, matrix }
    }

    /// The maximally mixed state `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1 << n;
        Ok(Self {
            num_qubits: n,
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigs(&self.matrix)
    }

    /// `Tr[ρ · op]`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Complex64 {
        self.matrix.trace_product(op)
    }

    /// `ρ ⊗ σ`, with `self` on the more significant qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.num_qubits + other.num_qubits;
        check_qubits(n)?;
        Ok(Self::from_matrix_unchecked(
            n,
            self.matrix.kron(&other.matrix),
        ))
    }

    /// Reduced state on `keep`, in the listed order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }
}

/// `|ψ⟩⟨ψ|` for a normalized ket.
pub fn density_from_ket(psi: &Ket) -> Result<DensityMatrix> {
    let norm_sq = psi.norm_sqr();
    if (norm_sq - 1.0).abs() > KET_NORM_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    let dim = psi.amplitudes.len();
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = psi.amplitudes[i] * psi.amplitudes[j].conj();
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(psi.num_qubits, m))
}

/// Traces out every qubit not listed in `keep`. The result's qubit `k` is
/// the input's qubit `keep[k]`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits;
    let bad = || Error::BadIndex {
        indices: keep.to_vec(),
        num_qubits: n,
    };
    if keep.is_empty() || keep.iter().any(|&q| q >= n) {
        return Err(bad());
    }
    for (i, q) in keep.iter().enumerate() {
        if keep[..i].contains(q) {
            return Err(bad());
        }
    }

    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let out_dim = 1usize << k;
    let env_dim = 1usize << traced.len();

    // Full index from (kept bits, traced bits); qubit q sits at bit n-1-q.
    let compose = |kept: usize, env: usize| -> usize {
        let mut idx = 0;
        for (pos, &q) in keep.iter().enumerate() {
            let bit = (kept >> (k - 1 - pos)) & 1;
            idx |= bit << (n - 1 - q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            let bit = (env >> (traced.len() - 1 - pos)) & 1;
            idx |= bit << (n - 1 - q);
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for i in 0..out_dim {
        for j in 0..out_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for e in 0..env_dim {
                acc += rho.matrix[(compose(i, e), compose(j, e))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(k, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::matrix::Pauli;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn bell() -> Ket {
        Ket::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap()
    }

    fn w(mu0: f64, mu1: f64) -> Ket {
        let mut a = [0.0; 8];
        a[1] = mu0.cos();
        a[2] = mu1.sin() * mu0.sin();
        a[4] = mu0.sin() * mu1.cos();
        Ket::from_real(&a).unwrap()
    }

    #[test]
    fn ket_zero_density() {
        let rho = density_from_ket(&Ket::basis(1, 0).unwrap()).unwrap();
        assert_eq!(
            rho.matrix(),
            &ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap()
        );
    }

    #[test]
    fn bell_density_corners() {
        let rho = density_from_ket(&bell()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let corner = (i == 0 || i == 3) && (j == 0 || j == 3);
                let expected = if corner { 0.5 } else { 0.0 };
                assert!((rho.matrix()[(i, j)].re - expected).abs() < 1e-15);
                assert_eq!(rho.matrix()[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn w_state_density_is_rank_one() {
        let rho = density_from_ket(&w(FRAC_PI_2, FRAC_PI_4)).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        let eigs = rho.eigenvalues().unwrap();
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!(eigs[1..].iter().all(|e| e.abs() < 1e-12));
        DensityMatrix::new(rho.into_matrix()).unwrap();
    }

    #[test]
    fn unnormalized_ket_rejected() {
        let k = Ket::from_real(&[0.9_f64.sqrt(), 0.0]).unwrap();
        assert!(matches!(
            density_from_ket(&k),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = density_from_ket(&bell()).unwrap();
        let reduced = partial_trace(&rho, &[0]).unwrap();
        assert!(
            reduced
                .matrix()
                .max_abs_diff(&Pauli::identity().scale_real(0.5))
                < 1e-15
        );
    }

    #[test]
    fn w_state_marginal_on_first_two_qubits() {
        // At mu0 = pi/2 the third qubit factors out as |0>, leaving
        // cos(mu1)|10> + sin(mu1)|01> on the first two.
        for &mu1 in &[0.0, 0.3, FRAC_PI_4, 1.2, FRAC_PI_2] {
            let rho = density_from_ket(&w(FRAC_PI_2, mu1)).unwrap();
            let ab = partial_trace(&rho, &[0, 1]).unwrap();
            let expected = density_from_ket(
                &Ket::from_real(&[0.0, f64::sin(mu1), f64::cos(mu1), 0.0]).unwrap(),
            )
            .unwrap();
            assert!(ab.matrix().max_abs_diff(expected.matrix()) < 1e-15);
        }
    }

    #[test]
    fn keep_all_is_identity() {
        let rho = density_from_ket(&w(0.7, 0.4)).unwrap();
        assert_eq!(partial_trace(&rho, &[0, 1, 2]).unwrap(), rho);
    }

    #[test]
    fn keep_order_permutes_qubits() {
        // |01> with keep = [1, 0] becomes |10>.
        let rho = density_from_ket(&Ket::basis(2, 1).unwrap()).unwrap();
        let swapped = partial_trace(&rho, &[1, 0]).unwrap();
        let expected = density_from_ket(&Ket::basis(2, 2).unwrap()).unwrap();
        assert_eq!(swapped, expected);
    }

    #[test]
    fn bad_indices() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        for keep in [&[][..], &[2][..], &[0, 0][..]] {
            assert!(matches!(
                partial_trace(&rho, keep),
                Err(Error::BadIndex { .. })
            ));
        }
    }

    #[test]
    fn density_validation_errors() {
        let not_herm = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(matches!(
            DensityMatrix::new(not_herm),
            Err(Error::NotHermitian { .. })
        ));
        let bad_trace = ComplexMatrix::from_real(2, 2, &[0.5, 0.0, 0.0, 0.4]).unwrap();
        assert!(matches!(
            DensityMatrix::new(bad_trace),
            Err(Error::TraceNotOne { .. })
        ));
        let negative = ComplexMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(matches!(
            DensityMatrix::new(negative),
            Err(Error::NotPositive { .. })
        ));
        let three = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        assert!(matches!(
            DensityMatrix::new(three),
            Err(Error::WrongDimension { .. })
        ));
        let five = ComplexMatrix::identity(32).scale_real(1.0 / 32.0);
        assert!(matches!(
            DensityMatrix::new(five),
            Err(Error::BadQubitCount(5))
        ));
    }

    #[test]
    fn tensor_then_trace_recovers_factor() {
        let a = density_from_ket(&bell()).unwrap();
        let b = DensityMatrix::maximally_mixed(1).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.num_qubits(), 3);
        let back = ab.partial_trace(&[0, 1]).unwrap();
        assert!(back.matrix().max_abs_diff(a.matrix()) < 1e-15);
    }
}
