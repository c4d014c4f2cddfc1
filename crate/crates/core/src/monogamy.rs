//! Four-party chain `A – (B, C) – D` fed by two independent three-qubit
//! sources, `ρ_ABC` and `ρ_BCD`.
//!
//! Dropping one intermediate party leaves a three-party bilocal network:
//! `N_B` (Alice, Bob, Dick) with sources `Tr_C ρ_ABC`, `Tr_C ρ_BCD`, and `N_C`
//! (Alice, Charlie, Dick) with sources `Tr_B ρ_ABC`, `Tr_B ρ_BCD`. The
//! squared violation bounds of the two reduced networks obey
//!
//! ```text
//! (B_B)² + (B_C)² = Σⱼ √(ιⱼᴮ Λⱼᴮ) + √(ιⱼᶜ Λⱼᶜ)
//!                ≤ ½ Σⱼ (ιⱼᴮ + Λⱼᴮ + ιⱼᶜ + Λⱼᶜ)
//!                ≤ 2
//! ```
//!
//! where `Λ` are Gram eigenvalues of the tensors touching Alice and `ι` those
//! touching Dick.

use std::fmt;

use crate::correlations::{
    bmax_sq_from_eigs, correlation_tensor, gram_eigs, CorrelationTensor, GramEigs,
};
use crate::error::{Error, Result};
use crate::qalg::{density_from_ket, partial_trace, DensityMatrix, Ket};

/// Default slack for the `≤ 2` checks.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Party::A => "A",
            Party::B => "B",
            Party::C => "C",
            Party::D => "D",
        };
        f.write_str(s)
    }
}

/// Which party owns each qubit position of a three-qubit source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment([Party; 3]);

impl Assignment {
    pub fn new(parties: [Party; 3]) -> Self {
        Self(parties)
    }

    /// `A, B, C` in qubit order.
    pub fn abc() -> Self {
        Self([Party::A, Party::B, Party::C])
    }

    /// `B, C, D` in qubit order.
    pub fn bcd() -> Self {
        Self([Party::B, Party::C, Party::D])
    }

    /// `B, D, C` in qubit order: the assignment under which two copies of
    /// the `μ₀ = π/2` W state saturate the monogamy bound.
    pub fn bdc() -> Self {
        Self([Party::B, Party::D, Party::C])
    }

    /// Parses a three-letter party string such as `"bdc"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parties: Vec<Party> = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'A' => Ok(Party::A),
                'B' => Ok(Party::B),
                'C' => Ok(Party::C),
                'D' => Ok(Party::D),
                _ => Err(Error::BadAssignment(format!("unknown party '{c}' in '{s}'"))),
            })
            .collect::<Result<_>>()?;
        let parties: [Party; 3] = parties
            .try_into()
            .map_err(|_| Error::BadAssignment(format!("'{s}' does not name three parties")))?;
        Ok(Self(parties))
    }

    pub fn parties(&self) -> [Party; 3] {
        self.0
    }

    pub fn position(&self, party: Party) -> Option<usize> {
        self.0.iter().position(|&p| p == party)
    }

    fn check_covers(&self, expected: [Party; 3]) -> Result<()> {
        if expected.iter().all(|&p| self.position(p).is_some()) {
            Ok(())
        } else {
            Err(Error::BadAssignment(format!(
                "{}{}{} is not a permutation of {}{}{}",
                self.0[0], self.0[1], self.0[2], expected[0], expected[1], expected[2]
            )))
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.0 {
            write!(f, "{}", p.to_string().to_lowercase())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourPartyNetwork {
    rho_abc: DensityMatrix,
    rho_bcd: DensityMatrix,
    assignment_1: Assignment,
    assignment_2: Assignment,
}

impl FourPartyNetwork {
    pub fn new(
        rho_abc: DensityMatrix,
        rho_bcd: DensityMatrix,
        assignment_1: Assignment,
        assignment_2: Assignment,
    ) -> Result<Self> {
        for rho in [&rho_abc, &rho_bcd] {
            if rho.num_qubits() != 3 {
                return Err(Error::WrongDimension {
                    expected: 3,
                    found: rho.num_qubits(),
                });
            }
        }
        assignment_1.check_covers([Party::A, Party::B, Party::C])?;
        assignment_2.check_covers([Party::B, Party::C, Party::D])?;
        Ok(Self {
            rho_abc,
            rho_bcd,
            assignment_1,
            assignment_2,
        })
    }

    /// Both sources in natural qubit order (`abc`, `bcd`).
    pub fn natural(rho_abc: DensityMatrix, rho_bcd: DensityMatrix) -> Result<Self> {
        Self::new(rho_abc, rho_bcd, Assignment::abc(), Assignment::bcd())
    }

    pub fn rho_abc(&self) -> &DensityMatrix {
        &self.rho_abc
    }

    pub fn rho_bcd(&self) -> &DensityMatrix {
        &self.rho_bcd
    }

    pub fn assignment_1(&self) -> Assignment {
        self.assignment_1
    }

    pub fn assignment_2(&self) -> Assignment {
        self.assignment_2
    }

    /// Two-qubit sources of a reduced network, ordered along the chain:
    /// `(Alice, middle)` and `(middle, Dick)`.
    pub fn reduced_states(&self, which: ReducedNetwork) -> Result<(DensityMatrix, DensityMatrix)> {
        let middle = which.middle_party();
        let pos = |a: &Assignment, p: Party| {
            a.position(p)
                .expect("assignment validated at construction")
        };
        let near = partial_trace(
            &self.rho_abc,
            &[pos(&self.assignment_1, Party::A), pos(&self.assignment_1, middle)],
        )?;
        let far = partial_trace(
            &self.rho_bcd,
            &[pos(&self.assignment_2, middle), pos(&self.assignment_2, Party::D)],
        )?;
        Ok((near, far))
    }
}

/// `N_B` keeps Bob, `N_C` keeps Charlie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReducedNetwork {
    NB,
    NC,
}

impl ReducedNetwork {
    pub fn middle_party(self) -> Party {
        match self {
            ReducedNetwork::NB => Party::B,
            ReducedNetwork::NC => Party::C,
        }
    }
}

/// Correlation tensors of a reduced network: `T_AB, T_BD` for `N_B` and
/// `T_AC, T_CD` for `N_C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedTensors {
    pub which: ReducedNetwork,
    pub t_near: CorrelationTensor,
    pub t_far: CorrelationTensor,
}

pub fn reduced_tensors(net: &FourPartyNetwork, which: ReducedNetwork) -> Result<ReducedTensors> {
    let (near, far) = net.reduced_states(which)?;
    Ok(ReducedTensors {
        which,
        t_near: correlation_tensor(&near)?,
        t_far: correlation_tensor(&far)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonogamyReport {
    /// Two largest Gram eigenvalues of `T_AB` (Λᴮ) and `T_AC` (Λᶜ).
    pub lambda_b: [f64; 2],
    pub lambda_c: [f64; 2],
    /// Two largest Gram eigenvalues of `T_BD` (ιᴮ) and `T_CD` (ιᶜ).
    pub iota_b: [f64; 2],
    pub iota_c: [f64; 2],
    pub bmaxsq_b: f64,
    pub bmaxsq_c: f64,
    pub tradeoff_lhs: f64,
    pub amgm_bound: f64,
    pub satisfied: bool,
}

impl MonogamyReport {
    /// `bmaxsq_B > 1` forces `bmaxsq_C ≤ 1` and vice versa.
    pub fn exclusion_holds(&self, tol: f64) -> bool {
        !(self.bmaxsq_b > 1.0 && self.bmaxsq_c > 1.0 + tol)
            && !(self.bmaxsq_c > 1.0 && self.bmaxsq_b > 1.0 + tol)
    }

    /// `tradeoff_lhs ≤ amgm_bound ≤ 2`, each with slack `tol`.
    pub fn chain_holds(&self, tol: f64) -> bool {
        self.tradeoff_lhs <= self.amgm_bound + tol && self.amgm_bound <= 2.0 + tol
    }
}

fn reduced_eigs(net: &FourPartyNetwork, which: ReducedNetwork) -> Result<(GramEigs, GramEigs)> {
    let t = reduced_tensors(net, which)?;
    Ok((gram_eigs(&t.t_near)?, gram_eigs(&t.t_far)?))
}

pub fn monogamy_report(net: &FourPartyNetwork) -> Result<MonogamyReport> {
    monogamy_report_with_tol(net, BOUND_TOL)
}

pub fn monogamy_report_with_tol(net: &FourPartyNetwork, tol: f64) -> Result<MonogamyReport> {
    let (lam_b, iota_b) = reduced_eigs(net, ReducedNetwork::NB)?;
    let (lam_c, iota_c) = reduced_eigs(net, ReducedNetwork::NC)?;
    let bmaxsq_b = bmax_sq_from_eigs(&lam_b, &iota_b);
    let bmaxsq_c = bmax_sq_from_eigs(&lam_c, &iota_c);
    let tradeoff_lhs = bmaxsq_b + bmaxsq_c;
    let amgm_bound = 0.5
        * (iota_b.top_two_sum() + lam_b.top_two_sum() + iota_c.top_two_sum() + lam_c.top_two_sum());
    Ok(MonogamyReport {
        lambda_b: lam_b.largest_two(),
        lambda_c: lam_c.largest_two(),
        iota_b: iota_b.largest_two(),
        iota_c: iota_c.largest_two(),
        bmaxsq_b,
        bmaxsq_c,
        tradeoff_lhs,
        amgm_bound,
        satisfied: tradeoff_lhs <= 2.0 + tol,
    })
}

/// For a three-qubit state, the top-two Gram eigenvalue sums of the two
/// marginals containing `pivot`, added together. Bounded by 2 for every
/// state.
pub fn marginal_tradeoff_sum(rho: &DensityMatrix, pivot: usize) -> Result<f64> {
    if rho.num_qubits() != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            found: rho.num_qubits(),
        });
    }
    if pivot >= 3 {
        return Err(Error::BadIndex {
            indices: vec![pivot],
            num_qubits: 3,
        });
    }
    let mut total = 0.0;
    for other in (0..3).filter(|&q| q != pivot) {
        let t = correlation_tensor(&partial_trace(rho, &[pivot, other])?)?;
        total += gram_eigs(&t)?.top_two_sum();
    }
    Ok(total)
}

/// Angles of the three-qubit W-type family
/// `cos μ₀|001⟩ + sin μ₁ sin μ₀|010⟩ + sin μ₀ cos μ₁|100⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WStateParams {
    mu0: f64,
    mu1: f64,
}

impl WStateParams {
    pub fn new(mu0: f64, mu1: f64) -> Result<Self> {
        let range = 0.0..=std::f64::consts::FRAC_PI_2;
        for (name, v) in [("mu0", mu0), ("mu1", mu1)] {
            if !range.contains(&v) {
                return Err(Error::BadParameter(format!("{name} = {v} outside [0, pi/2]")));
            }
        }
        Ok(Self { mu0, mu1 })
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }
}

pub fn w_state(p: WStateParams) -> Ket {
    let (s0, c0) = p.mu0.sin_cos();
    let (s1, c1) = p.mu1.sin_cos();
    let mut amps = [0.0; 8];
    amps[0b001] = c0;
    amps[0b010] = s1 * s0;
    amps[0b100] = s0 * c1;
    Ket::from_real(&amps).expect("eight amplitudes form a three-qubit ket")
}

/// Two copies of the `μ₀ = π/2` W state, the second read with the `bdc`
/// assignment.
pub fn tightness_network(mu1: f64) -> Result<FourPartyNetwork> {
    let params = WStateParams::new(std::f64::consts::FRAC_PI_2, mu1)?;
    let rho = density_from_ket(&w_state(params))?;
    FourPartyNetwork::new(rho.clone(), rho, Assignment::abc(), Assignment::bdc())
}

/// Monogamy report of [`tightness_network`]; the trade-off sum equals 2 for
/// every `μ₁`.
pub fn tightness_demo(mu1: f64) -> Result<MonogamyReport> {
    monogamy_report(&tightness_network(mu1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

    fn ghz() -> DensityMatrix {
        let mut a = [0.0; 8];
        a[0] = FRAC_1_SQRT_2;
        a[7] = FRAC_1_SQRT_2;
        density_from_ket(&Ket::from_real(&a).unwrap()).unwrap()
    }

    fn zero3() -> DensityMatrix {
        density_from_ket(&Ket::basis(3, 0).unwrap()).unwrap()
    }

    fn assert_eigs(t: &CorrelationTensor, expected: [f64; 3]) {
        let e = gram_eigs(t).unwrap().values();
        for k in 0..3 {
            assert!((e[k] - expected[k]).abs() < 1e-12, "{e:?} vs {expected:?}");
        }
    }

    #[test]
    fn ghz_and_product_marginals_are_classical() {
        for rho in [ghz(), zero3()] {
            let net = FourPartyNetwork::natural(rho.clone(), rho).unwrap();
            for which in [ReducedNetwork::NB, ReducedNetwork::NC] {
                let t = reduced_tensors(&net, which).unwrap();
                let diag = CorrelationTensor::diag([0.0, 0.0, 1.0]);
                for tensor in [t.t_near, t.t_far] {
                    for i in 0..3 {
                        for j in 0..3 {
                            assert!((tensor.get(i, j) - diag.get(i, j)).abs() < 1e-15);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn w_pair_reduced_spectra() {
        for &mu1 in &[0.0, 0.3, FRAC_PI_8, FRAC_PI_4, 1.1, FRAC_PI_2] {
            let net = tightness_network(mu1).unwrap();
            let s2 = (2.0 * mu1).sin().powi(2);
            let c2 = (2.0 * mu1).cos().powi(2);
            let nb = reduced_tensors(&net, ReducedNetwork::NB).unwrap();
            assert_eigs(&nb.t_near, [1.0, s2, s2]);
            assert_eigs(&nb.t_far, [1.0, s2, s2]);
            let nc = reduced_tensors(&net, ReducedNetwork::NC).unwrap();
            let top = c2.max(0.0);
            assert_eigs(&nc.t_near, [top, 0.0, 0.0]);
            assert_eigs(&nc.t_far, [top, 0.0, 0.0]);
        }
    }

    #[test]
    fn ghz_report_sits_on_the_boundary() {
        let net = FourPartyNetwork::natural(ghz(), ghz()).unwrap();
        let r = monogamy_report(&net).unwrap();
        assert!((r.bmaxsq_b - 1.0).abs() < 1e-12);
        assert!((r.bmaxsq_c - 1.0).abs() < 1e-12);
        assert!((r.tradeoff_lhs - 2.0).abs() < 1e-12);
        assert!((r.amgm_bound - 2.0).abs() < 1e-12);
        assert!(r.satisfied);
        assert!((r.lambda_b[0] - 1.0).abs() < 1e-12 && r.lambda_b[1].abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_report_is_zero() {
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        let r = monogamy_report(&FourPartyNetwork::natural(mixed.clone(), mixed).unwrap()).unwrap();
        assert_eq!(r.tradeoff_lhs, 0.0);
        assert_eq!(r.amgm_bound, 0.0);
        assert!(r.satisfied);
    }

    #[test]
    fn tightness_examples() {
        let cases = [(0.0, 1.0, 1.0), (FRAC_PI_4, 2.0, 0.0), (FRAC_PI_8, 1.5, 0.5)];
        for (mu1, b, c) in cases {
            let r = tightness_demo(mu1).unwrap();
            assert!((r.bmaxsq_b - b).abs() < 1e-12, "mu1={mu1}: {r:?}");
            assert!((r.bmaxsq_c - c).abs() < 1e-12, "mu1={mu1}: {r:?}");
            assert!((r.tradeoff_lhs - 2.0).abs() < 1e-9);
            assert!(r.exclusion_holds(1e-9));
        }
    }

    #[test]
    fn natural_assignment_misses_tightness() {
        // With B, C, D in natural order the second copy's entanglement lands
        // on (B, C), leaving T_BD and T_CD classical.
        let mu1 = FRAC_PI_4;
        let rho = density_from_ket(&w_state(WStateParams::new(FRAC_PI_2, mu1).unwrap())).unwrap();
        let net = FourPartyNetwork::natural(rho.clone(), rho).unwrap();
        let r = monogamy_report(&net).unwrap();
        assert!(r.tradeoff_lhs < 2.0 - 0.1, "{r:?}");
    }

    #[test]
    fn marginal_sums() {
        for pivot in 0..3 {
            assert!((marginal_tradeoff_sum(&ghz(), pivot).unwrap() - 2.0).abs() < 1e-12);
            assert!((marginal_tradeoff_sum(&zero3(), pivot).unwrap() - 2.0).abs() < 1e-12);
        }
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        assert_eq!(marginal_tradeoff_sum(&mixed, 0).unwrap(), 0.0);
        assert!(marginal_tradeoff_sum(&DensityMatrix::maximally_mixed(2).unwrap(), 0).is_err());
        assert!(marginal_tradeoff_sum(&mixed, 3).is_err());
    }

    #[test]
    fn w_state_limits() {
        let k = w_state(WStateParams::new(0.0, 0.4).unwrap());
        assert_eq!(k, Ket::basis(3, 1).unwrap());
        let k = w_state(WStateParams::new(FRAC_PI_2, FRAC_PI_4).unwrap());
        let a = k.amplitudes();
        assert!((a[2].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((a[4].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(a[1].norm() < 1e-16);
        for &(m0, m1) in &[(0.1, 0.2), (0.9, 1.4), (FRAC_PI_2, 0.0)] {
            let k = w_state(WStateParams::new(m0, m1).unwrap());
            assert!((k.norm_sqr() - 1.0).abs() < 1e-15);
        }
        assert!(WStateParams::new(-0.1, 0.0).is_err());
        assert!(WStateParams::new(0.0, 1.6).is_err());
    }

    #[test]
    fn assignment_parsing_and_validation() {
        assert_eq!(Assignment::parse("bdc").unwrap(), Assignment::bdc());
        assert_eq!(Assignment::parse("BCD").unwrap(), Assignment::bcd());
        assert!(Assignment::parse("bd").is_err());
        assert!(Assignment::parse("bxd").is_err());
        assert_eq!(Assignment::bdc().to_string(), "bdc");
        let rho = zero3();
        assert!(FourPartyNetwork::new(
            rho.clone(),
            rho.clone(),
            Assignment::abc(),
            Assignment::parse("bbd").unwrap()
        )
        .is_err());
        assert!(FourPartyNetwork::new(
            rho.clone(),
            rho,
            Assignment::parse("abd").unwrap(),
            Assignment::bcd()
        )
        .is_err());
    }

    #[test]
    fn exclusion_and_chain_flags() {
        let mut r = tightness_demo(FRAC_PI_4).unwrap();
        assert!(r.chain_holds(1e-9));
        r.bmaxsq_c = 1.2;
        assert!(!r.exclusion_holds(1e-9));
    }
}
