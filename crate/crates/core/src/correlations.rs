//! Two-qubit correlation tensors and the spectral quantities built from them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qalg::{hermitian_eigs, ComplexMatrix, DensityMatrix, Pauli};

const ENTRY_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-9;

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `T_ij = Tr[ρ σ_i ⊗ σ_j]` for `i, j ∈ {1, 2, 3}`. Rows belong to the first
/// qubit, columns to the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTensor([[f64; 3]; 3]);

impl CorrelationTensor {
    pub fn new(entries: [[f64; 3]; 3]) -> Result<Self> {
        let t = Self(entries);
        if entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(x) = entries.iter().flatten().find(|x| x.abs() > 1.0 + ENTRY_TOL) {
            return Err(Error::BadParameter(format!(
                "correlation tensor entry {x} outside [-1, 1]"
            )));
        }
        let norm_sq = t.frobenius_norm_sq();
        if norm_sq > 3.0 + NORM_TOL {
            return Err(Error::BadParameter(format!(
                "correlation tensor squared norm {norm_sq} exceeds 3"
            )));
        }
        Ok(t)
    }

    pub fn zero() -> Self {
        Self([[0.0; 3]; 3])
    }

    pub fn diag(d: Vec3) -> Self {
        Self([[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]])
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn transpose(&self) -> Self {
        let t = &self.0;
        Self([
            [t[0][0], t[1][0], t[2][0]],
            [t[0][1], t[1][1], t[2][1]],
            [t[0][2], t[1][2], t[2][2]],
        ])
    }

    /// `T v`.
    pub fn apply(&self, v: Vec3) -> Vec3 {
        let t = &self.0;
        [dot(t[0], v), dot(t[1], v), dot(t[2], v)]
    }

    /// `a · T b`, the correlator of `a·σ ⊗ b·σ`.
    pub fn bilinear(&self, a: Vec3, b: Vec3) -> f64 {
        dot(a, self.apply(b))
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum()
    }

    /// `Tᵀ T`.
    pub fn gram(&self) -> [[f64; 3]; 3] {
        let t = &self.0;
        let mut g = [[0.0; 3]; 3];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, g_ij) in row.iter_mut().enumerate() {
                *g_ij = (0..3).map(|k| t[k][i] * t[k][j]).sum();
            }
        }
        g
    }

    /// `O₁ T O₂` for real 3×3 matrices, used to check rotation invariance.
    pub fn rotated(&self, left: &[[f64; 3]; 3], right: &[[f64; 3]; 3]) -> Self {
        let mul = |a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]| {
            let mut c = [[0.0; 3]; 3];
            for (i, row) in c.iter_mut().enumerate() {
                for (j, c_ij) in row.iter_mut().enumerate() {
                    *c_ij = (0..3).map(|k| a[i][k] * b[k][j]).sum();
                }
            }
            c
        };
        Self(mul(&mul(left, &self.0), right))
    }
}

/// Eigenvalues of `Tᵀ T`, sorted descending and clipped at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramEigs(pub [f64; 3]);

impl GramEigs {
    pub fn values(&self) -> [f64; 3] {
        self.0
    }

    pub fn largest_two(&self) -> [f64; 2] {
        [self.0[0], self.0[1]]
    }

    /// Sum of the two largest eigenvalues.
    pub fn top_two_sum(&self) -> f64 {
        self.0[0] + self.0[1]
    }
}

/// Correlation tensor of a two-qubit state.
pub fn correlation_tensor(rho: &DensityMatrix) -> Result<CorrelationTensor> {
    if rho.num_qubits() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: rho.num_qubits(),
        });
    }
    let mut t = [[0.0; 3]; 3];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, t_ij) in row.iter_mut().enumerate() {
            let op = Pauli::sigma(i + 1).kron(&Pauli::sigma(j + 1));
            *t_ij = rho.expectation(&op).re;
        }
    }
    Ok(CorrelationTensor(t))
}

pub fn gram_eigs(t: &CorrelationTensor) -> Result<GramEigs> {
    let g = t.gram();
    let m = ComplexMatrix::from_vec(
        3,
        3,
        g.iter()
            .flatten()
            .map(|&x| Complex64::new(x, 0.0))
            .collect(),
    )?;
    let eigs = hermitian_eigs(&m)?;
    // Roundoff can push zero eigenvalues slightly negative.
    Ok(GramEigs([
        eigs[0].max(0.0),
        eigs[1].max(0.0),
        eigs[2].max(0.0),
    ]))
}

/// `M(ρ) = ω₁ + ω₂`; the largest CHSH value reachable with `ρ` is `2√M`.
pub fn horodecki_m(t: &CorrelationTensor) -> Result<f64> {
    Ok(gram_eigs(t)?.top_two_sum())
}

/// Largest CHSH value `2√M(ρ)` for the state with tensor `t`.
pub fn max_chsh(t: &CorrelationTensor) -> Result<f64> {
    Ok(2.0 * horodecki_m(t)?.sqrt())
}

/// CHSH expectation `a₀·T(b₀+b₁) + a₁·T(b₀−b₁)`.
pub fn chsh_value(t: &CorrelationTensor, a: [Vec3; 2], b: [Vec3; 2]) -> f64 {
    let sum = [b[0][0] + b[1][0], b[0][1] + b[1][1], b[0][2] + b[1][2]];
    let diff = [b[0][0] - b[1][0], b[0][1] - b[1][1], b[0][2] - b[1][2]];
    t.bilinear(a[0], sum) + t.bilinear(a[1], diff)
}

/// `B_max² = √(ω₁ᴬ ω₁ᶜ) + √(ω₂ᴬ ω₂ᶜ)` with both spectra sorted descending.
pub fn bmax_sq_from_eigs(left: &GramEigs, right: &GramEigs) -> f64 {
    (left.0[0] * right.0[0]).sqrt() + (left.0[1] * right.0[1]).sqrt()
}

/// Upper bound on the bilocality parameter over all separable measurement
/// settings for sources with tensors `left` and `right`.
pub fn bmax(left: &CorrelationTensor, right: &CorrelationTensor) -> Result<f64> {
    Ok(bmax_sq_from_eigs(&gram_eigs(left)?, &gram_eigs(right)?).sqrt())
}
