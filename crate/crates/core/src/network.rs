//! The three-party bilocal scenario: two independent two-qubit sources, an
//! extreme party on each end and a middle party measuring one qubit from
//! each source with a separable observable.
//!
//! Outcome bit `b` stands for the eigenvalue `(-1)^b`. The middle party's
//! qubits are ordered (left-source qubit, right-source qubit), so the full
//! four-qubit register reads `A, M_left, M_right, C`.

use crate::correlations::{CorrelationTensor, Vec3};
use crate::error::{Error, Result};
use crate::qalg::{ComplexMatrix, DensityMatrix, Pauli};

const UNIT_TOL: f64 = 1e-12;

/// A unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self(v))
    }

    /// Rescales any nonzero vector onto the sphere.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self([st * cp, st * sp, ct])
    }

    pub fn x() -> Self {
        Self([1.0, 0.0, 0.0])
    }

    pub fn y() -> Self {
        Self([0.0, 1.0, 0.0])
    }

    pub fn z() -> Self {
        Self([0.0, 0.0, 1.0])
    }

    pub fn components(&self) -> Vec3 {
        self.0
    }

    pub fn neg(&self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }

    /// Polar and azimuthal angles, `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn angles(&self) -> (f64, f64) {
        let theta = self.0[2].clamp(-1.0, 1.0).acos();
        let mut phi = self.0[1].atan2(self.0[0]);
        if phi < 0.0 {
            phi += std::f64::consts::TAU;
        }
        (theta, phi)
    }
}

/// Two measurement directions of a single-qubit party, one per input bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveSetting {
    pub directions: [BlochVector; 2],
}

impl ProjectiveSetting {
    pub fn new(d0: BlochVector, d1: BlochVector) -> Self {
        Self {
            directions: [d0, d1],
        }
    }

    fn sum_diff(&self, i: usize) -> Vec3 {
        let a = self.directions[0].0;
        let b = self.directions[1].0;
        let sign = if i == 0 { 1.0 } else { -1.0 };
        [a[0] + sign * b[0], a[1] + sign * b[1], a[2] + sign * b[2]]
    }
}

/// Separable observable of the middle party: for input `i` the pair
/// `[left, right]` of directions measured on its left-source and
/// right-source qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableSetting {
    pub pairs: [[BlochVector; 2]; 2],
}

impl SeparableSetting {
    pub fn new(pair0: [BlochVector; 2], pair1: [BlochVector; 2]) -> Self {
        Self {
            pairs: [pair0, pair1],
        }
    }
}

/// Measurement settings of all three parties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkSettings {
    pub left: ProjectiveSetting,
    pub middle: SeparableSetting,
    pub right: ProjectiveSetting,
}

impl NetworkSettings {
    /// Settings with every direction equal to `v`.
    pub fn aligned(v: BlochVector) -> Self {
        Self {
            left: ProjectiveSetting::new(v, v),
            middle: SeparableSetting::new([v, v], [v, v]),
            right: ProjectiveSetting::new(v, v),
        }
    }

    /// Settings reaching `B = √2` on two `(|00⟩+|11⟩)/√2` sources:
    /// extremes at `(z ± x)/√2`, middle measuring `z⊗z` then `x⊗x`.
    pub fn canonical() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = BlochVector([r, 0.0, r]);
        let minus = BlochVector([-r, 0.0, r]);
        let z = BlochVector::z();
        let x = BlochVector::x();
        Self {
            left: ProjectiveSetting::new(plus, minus),
            middle: SeparableSetting::new([z, z], [x, x]),
            right: ProjectiveSetting::new(plus, minus),
        }
    }

    /// The same experiment read from the other end of the chain.
    pub fn mirrored(&self) -> Self {
        let [p0, p1] = self.middle.pairs;
        Self {
            left: self.right,
            middle: SeparableSetting::new([p0[1], p0[0]], [p1[1], p1[0]]),
            right: self.left,
        }
    }
}

/// Two independent sources plus the settings of all three parties.
#[derive(Debug, Clone, PartialEq)]
pub struct BilocalScenario {
    pub rho_left: DensityMatrix,
    pub rho_right: DensityMatrix,
    pub settings: NetworkSettings,
}

impl BilocalScenario {
    pub fn new(
        rho_left: DensityMatrix,
        rho_right: DensityMatrix,
        settings: NetworkSettings,
    ) -> Result<Self> {
        for rho in [&rho_left, &rho_right] {
            if rho.num_qubits() != 2 {
                return Err(Error::WrongDimension {
                    expected: 2,
                    found: rho.num_qubits(),
                });
            }
        }
        Ok(Self {
            rho_left,
            rho_right,
            settings,
        })
    }
}

fn bit_index(a: usize, b: usize, c: usize) -> usize {
    debug_assert!(a < 2 && b < 2 && c < 2);
    4 * a + 2 * b + c
}

/// Exact conditional distribution `P(a, b, c | x, y, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    // probs[input triple][output triple], both packed as 4a + 2b + c.
    probs: [[f64; 8]; 8],
}

/// Worst-case deviations of a behavior from its invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehaviorResiduals {
    /// Largest distance of any probability outside `[0, 1]`.
    pub range: f64,
    pub normalization: f64,
    pub signaling: f64,
}

impl BehaviorResiduals {
    pub fn worst(&self) -> f64 {
        self.range.max(self.normalization).max(self.signaling)
    }
}

impl Behavior {
    pub fn from_fn(mut p: impl FnMut([usize; 3], [usize; 3]) -> f64) -> Self {
        let mut probs = [[0.0; 8]; 8];
        for (inp, row) in probs.iter_mut().enumerate() {
            for (out, slot) in row.iter_mut().enumerate() {
                *slot = p(
                    [out >> 2, (out >> 1) & 1, out & 1],
                    [inp >> 2, (inp >> 1) & 1, inp & 1],
                );
            }
        }
        Self { probs }
    }

    pub fn uniform() -> Self {
        Self::from_fn(|_, _| 0.125)
    }

    /// `P(outputs | inputs)`, each triple ordered (left, middle, right).
    pub fn prob(&self, outputs: [usize; 3], inputs: [usize; 3]) -> f64 {
        self.probs[bit_index(inputs[0], inputs[1], inputs[2])]
            [bit_index(outputs[0], outputs[1], outputs[2])]
    }

    pub fn residuals(&self) -> BehaviorResiduals {
        let range = self
            .probs
            .iter()
            .flatten()
            .map(|&p| (-p).max(p - 1.0).max(0.0))
            .fold(0.0, f64::max);
        let normalization = self
            .probs
            .iter()
            .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);

        // For every proper subset of parties, the marginal of their outputs
        // may depend only on their own inputs.
        let mut signaling = 0.0_f64;
        for subset in 1..7usize {
            let inside = |party: usize| subset & (1 << party) != 0;
            let marginal = |outs: [usize; 3], ins: [usize; 3]| -> f64 {
                let mut acc = 0.0;
                for out in 0..8 {
                    let o = [out >> 2, (out >> 1) & 1, out & 1];
                    if (0..3).all(|k| !inside(k) || o[k] == outs[k]) {
                        acc += self.prob(o, ins);
                    }
                }
                acc
            };
            for out in 0..8 {
                let o = [out >> 2, (out >> 1) & 1, out & 1];
                if (0..3).any(|k| !inside(k) && o[k] != 0) {
                    continue;
                }
                for inp in 0..8 {
                    let i = [inp >> 2, (inp >> 1) & 1, inp & 1];
                    if (0..3).any(|k| !inside(k) && i[k] != 0) {
                        continue;
                    }
                    let reference = marginal(o, i);
                    for other in 0..8 {
                        let j = [other >> 2, (other >> 1) & 1, other & 1];
                        if (0..3).any(|k| inside(k) && j[k] != i[k]) {
                            continue;
                        }
                        signaling = signaling.max((marginal(o, j) - reference).abs());
                    }
                }
            }
        }
        BehaviorResiduals {
            range,
            normalization,
            signaling,
        }
    }
}

/// Eigenprojector `(σ₀ + (−1)^outcome v·σ) / 2`.
pub fn projector(v: &BlochVector, outcome: usize) -> ComplexMatrix {
    let sign = if outcome == 0 { 1.0 } else { -1.0 };
    let c = v.components();
    let vs = Pauli::dot([sign * c[0], sign * c[1], sign * c[2]]);
    (&Pauli::identity() + &vs).scale_real(0.5)
}

/// Effect of the product observable `(l·σ)⊗(r·σ)` for product eigenvalue
/// `(−1)^outcome`: the sum of `P(l, b₁) ⊗ P(r, b₂)` over `b₁ ⊕ b₂ = outcome`.
pub fn separable_effect(pair: &[BlochVector; 2], outcome: usize) -> ComplexMatrix {
    let mut effect = ComplexMatrix::zeros(4, 4);
    for b1 in 0..2 {
        let b2 = b1 ^ (outcome & 1);
        effect = &effect + &projector(&pair[0], b1).kron(&projector(&pair[1], b2));
    }
    effect
}

/// `P(a,b,c|x,y,z) = Tr[(ρ_L ⊗ ρ_R)(A_a^x ⊗ M_b^y ⊗ C_c^z)]`.
pub fn behavior(s: &BilocalScenario) -> Result<Behavior> {
    let joint = s.rho_left.tensor(&s.rho_right)?;
    let set = &s.settings;
    let mut probs = [[0.0; 8]; 8];
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                for a in 0..2 {
                    let pa = projector(&set.left.directions[x], a);
                    for b in 0..2 {
                        let pab = pa.kron(&separable_effect(&set.middle.pairs[y], b));
                        for c in 0..2 {
                            let op = pab.kron(&projector(&set.right.directions[z], c));
                            probs[bit_index(x, y, z)][bit_index(a, b, c)] =
                                joint.expectation(&op).re;
                        }
                    }
                }
            }
        }
    }
    Ok(Behavior { probs })
}

/// `⟨A_x B_y C_z⟩ = Σ (−1)^{a+b+c} P(a,b,c|x,y,z)`.
pub fn correlator(beh: &Behavior, x: usize, y: usize, z: usize) -> f64 {
    let row = &beh.probs[bit_index(x, y, z)];
    (0..8)
        .map(|out| {
            let parity = (out >> 2) ^ ((out >> 1) & 1) ^ (out & 1);
            if parity == 0 {
                row[out]
            } else {
                -row[out]
            }
        })
        .sum()
}

/// The correlator combinations `I`, `J` and the bilocality parameter
/// `B = √|I| + √|J|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilocalReport {
    pub i: f64,
    pub j: f64,
    pub b: f64,
    /// `B > 1`: no bilocal model reproduces the behavior.
    pub nonbilocal: bool,
}

pub fn bilocal_report(beh: &Behavior) -> BilocalReport {
    let mut i = 0.0;
    let mut j = 0.0;
    for x in 0..2 {
        for z in 0..2 {
            i += correlator(beh, x, 0, z);
            let sign = if (x + z) % 2 == 0 { 1.0 } else { -1.0 };
            j += sign * correlator(beh, x, 1, z);
        }
    }
    i /= 4.0;
    j /= 4.0;
    let b = i.abs().sqrt() + j.abs().sqrt();
    BilocalReport {
        i,
        j,
        b,
        nonbilocal: b > 1.0,
    }
}

/// Closed form of `B` under separable middle measurements:
/// `½ Σᵢ √(|(α₀ ± α₁)·T_L βᵢᴸ| |βᵢᴿ·T_R (γ₀ ± γ₁)|)`.
pub fn b_closed_form(
    t_left: &CorrelationTensor,
    t_right: &CorrelationTensor,
    settings: &NetworkSettings,
) -> f64 {
    (0..2)
        .map(|i| {
            let [beta_l, beta_r] = settings.middle.pairs[i];
            let l = t_left
                .bilinear(settings.left.sum_diff(i), beta_l.components())
                .abs();
            let r = t_right
                .bilinear(beta_r.components(), settings.right.sum_diff(i))
                .abs();
            (l * r).sqrt()
        })
        .sum::<f64>()
        * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::correlation_tensor;
    use crate::qalg::{density_from_ket, Ket};
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn bell() -> DensityMatrix {
        density_from_ket(&Ket::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap())
            .unwrap()
    }

    #[test]
    fn projector_examples() {
        let p = projector(&BlochVector::z(), 0);
        assert_eq!(p, ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap());
        let p = projector(&BlochVector::x(), 1);
        let expected = ComplexMatrix::from_real(2, 2, &[0.5, -0.5, -0.5, 0.5]).unwrap();
        assert!(p.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn projectors_complete_and_idempotent() {
        let v = BlochVector::normalized([0.3, -0.7, 0.2]).unwrap();
        let sum = &projector(&v, 0) + &projector(&v, 1);
        assert!(sum.max_abs_diff(&Pauli::identity()) < 1e-15);
        for o in 0..2 {
            let p = projector(&v, o);
            assert!((&p * &p).max_abs_diff(&p) < 1e-15);
        }
    }

    #[test]
    fn separable_effect_parity() {
        let z = BlochVector::z();
        let e = separable_effect(&[z, z], 0);
        let expected = ComplexMatrix::from_real(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0,
            ],
        )
        .unwrap();
        assert_eq!(e, expected);
    }

    #[test]
    fn separable_effects_sum_to_identity() {
        let pair = [
            BlochVector::normalized([1.0, 2.0, 3.0]).unwrap(),
            BlochVector::normalized([-1.0, 0.5, 0.0]).unwrap(),
        ];
        let sum = &separable_effect(&pair, 0) + &separable_effect(&pair, 1);
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn separable_effect_reconstructs_product_expectation() {
        let rho = crate::qalg::random_density(2, 3, 17).unwrap();
        let v = BlochVector::normalized([0.2, 0.9, -0.4]).unwrap();
        let w = BlochVector::normalized([-0.5, 0.1, 0.8]).unwrap();
        let pair = [v, w];
        let from_effects = rho.expectation(&separable_effect(&pair, 0)).re
            - rho.expectation(&separable_effect(&pair, 1)).re;
        let direct = rho
            .expectation(&Pauli::dot(v.components()).kron(&Pauli::dot(w.components())))
            .re;
        assert!((from_effects - direct).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_sources_give_uniform_behavior() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let s = BilocalScenario::new(mixed.clone(), mixed, NetworkSettings::canonical()).unwrap();
        let beh = behavior(&s).unwrap();
        for inp in 0..8 {
            for out in 0..8 {
                assert!((beh.probs[inp][out] - 0.125).abs() < 1e-15);
            }
        }
        let r = bilocal_report(&beh);
        assert!(r.i.abs() < 1e-15 && r.j.abs() < 1e-15 && r.b < 1e-7);
    }

    #[test]
    fn aligned_z_bell_sources_are_deterministic_in_parity() {
        let s =
            BilocalScenario::new(bell(), bell(), NetworkSettings::aligned(BlochVector::z())).unwrap();
        let beh = behavior(&s).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    // Z⊗Z correlators of both sources are +1, so a ⊕ b ⊕ c = 0.
                    assert!((correlator(&beh, x, y, z) - 1.0).abs() < 1e-14);
                }
            }
        }
        let r = bilocal_report(&beh);
        assert!((r.i - 1.0).abs() < 1e-14);
        assert!(r.j.abs() < 1e-14);
        assert!((r.b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn correlator_simple_behaviors() {
        assert_eq!(correlator(&Behavior::uniform(), 1, 0, 1), 0.0);
        let det = Behavior::from_fn(|out, _| if out == [0, 0, 0] { 1.0 } else { 0.0 });
        assert_eq!(correlator(&det, 0, 1, 0), 1.0);
        assert_eq!(bilocal_report(&Behavior::uniform()).b, 0.0);
    }

    #[test]
    fn canonical_settings_on_bell_sources() {
        let s = BilocalScenario::new(bell(), bell(), NetworkSettings::canonical()).unwrap();
        let beh = behavior(&s).unwrap();
        let r = bilocal_report(&beh);
        assert!((r.i - 0.5).abs() < 1e-14);
        assert!((r.j - 0.5).abs() < 1e-14);
        assert!((r.b - SQRT_2).abs() < 1e-14);
        assert!(r.nonbilocal);

        // Operator-side cross-check of every correlator.
        let joint = s.rho_left.tensor(&s.rho_right).unwrap();
        let set = s.settings;
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let [l, rr] = set.middle.pairs[y];
                    let op = Pauli::dot(set.left.directions[x].components())
                        .kron(&Pauli::dot(l.components()))
                        .kron(&Pauli::dot(rr.components()))
                        .kron(&Pauli::dot(set.right.directions[z].components()));
                    let direct = joint.expectation(&op).re;
                    assert!((correlator(&beh, x, y, z) - direct).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_form_aligned_z_on_bell_tensors() {
        let t = correlation_tensor(&bell()).unwrap();
        let b = b_closed_form(&t, &t, &NetworkSettings::aligned(BlochVector::z()));
        assert!((b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_degenerate_settings() {
        // α₀ = α₁ = z kills the i = 1 factor on the left; γ₀ = −γ₁ kills the
        // i = 0 factor on the right, so B = 0 whatever the middle does.
        let t = correlation_tensor(&bell()).unwrap();
        let z = BlochVector::z();
        let x = BlochVector::x();
        let settings = NetworkSettings {
            left: ProjectiveSetting::new(z, z),
            middle: SeparableSetting::new([z, x], [x, z]),
            right: ProjectiveSetting::new(x, x.neg()),
        };
        assert_eq!(b_closed_form(&t, &t, &settings), 0.0);

        // α₀ = α₁ = z, γ₀ = γ₁ = x, middle measuring z⊗x for input 0:
        // ½ √(|2 T_zz| |2 T_xx|) = 1.
        let settings = NetworkSettings {
            left: ProjectiveSetting::new(z, z),
            middle: SeparableSetting::new([z, x], [x, x]),
            right: ProjectiveSetting::new(x, x),
        };
        assert!((b_closed_form(&t, &t, &settings) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bloch_vector_validation_and_angles() {
        assert!(BlochVector::new([1.0, 1.0, 0.0]).is_err());
        assert!(BlochVector::normalized([0.0; 3]).is_err());
        let v = BlochVector::from_angles(1.1, 4.0);
        let (theta, phi) = v.angles();
        assert!((theta - 1.1).abs() < 1e-14 && (phi - 4.0).abs() < 1e-14);
        BlochVector::new(v.components()).unwrap();
    }

    #[test]
    fn scenario_requires_two_qubit_sources() {
        let three = DensityMatrix::maximally_mixed(3).unwrap();
        let two = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(BilocalScenario::new(three, two, NetworkSettings::canonical()).is_err());
    }
}
