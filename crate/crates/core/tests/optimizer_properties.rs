use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_8, SQRT_2};

use bilocal_core::correlations::{correlation_tensor, horodecki_m};
use bilocal_core::monogamy::{monogamy_report, tightness_network, FourPartyNetwork};
use bilocal_core::network::b_closed_form;
use bilocal_core::optimize::{
    bilocal_settings, maximize, maximize_b, maximize_free, maximize_shared, OptimizerConfig,
};
use bilocal_core::qalg::{density_from_ket, derive_seed, random_density, DensityMatrix, Ket};

const SLACK: f64 = 1e-6;

fn cfg(seed: u64) -> OptimizerConfig {
    OptimizerConfig::with_seed(seed)
}

fn ghz() -> DensityMatrix {
    let mut a = [0.0; 8];
    a[0] = FRAC_1_SQRT_2;
    a[7] = FRAC_1_SQRT_2;
    density_from_ket(&Ket::from_real(&a).unwrap()).unwrap()
}

fn mixed_network(i: u64) -> FourPartyNetwork {
    let abc = random_density(3, 4, derive_seed(2001, 2 * i)).unwrap();
    let bcd = random_density(3, 4, derive_seed(2001, 2 * i + 1)).unwrap();
    FourPartyNetwork::natural(abc, bcd).unwrap()
}

#[test]
fn tightness_network_reaches_two_both_ways() {
    for mu1 in [0.0, FRAC_PI_8, 0.3, FRAC_PI_2 / 2.0, 1.2] {
        let net = tightness_network(mu1).unwrap();
        let free = maximize_free(&net, &cfg(5)).unwrap();
        let shared = maximize_shared(&net, &cfg(5)).unwrap();
        assert!((free.lhs - 2.0).abs() <= 1e-3, "mu1 {mu1}: free {}", free.lhs);
        assert!((shared.value - 2.0).abs() <= 1e-3, "mu1 {mu1}: shared {}", shared.value);
    }
}

#[test]
fn ghz_pair_reaches_two() {
    let net = FourPartyNetwork::natural(ghz(), ghz()).unwrap();
    let free = maximize_free(&net, &cfg(6)).unwrap();
    assert!((free.lhs - 2.0).abs() <= 1e-3, "{}", free.lhs);
    assert!((free.per_network[0] - 1.0).abs() <= 1e-3);
}

// Shared nodal settings can only do worse than free ones, and the free
// optimum respects the Cauchy-Schwarz side of the chain.
#[test]
fn dominance_chain_on_mixed_networks() {
    for i in 0..8 {
        let net = mixed_network(i);
        let r = monogamy_report(&net).unwrap();
        let shared = maximize_shared(&net, &cfg(7)).unwrap();
        let free = maximize_free(&net, &cfg(7)).unwrap();
        assert!(shared.value <= free.lhs + SLACK, "pair {i}: {} > {}", shared.value, free.lhs);
        assert!(free.lhs <= r.amgm_bound + SLACK, "pair {i}: {} > {}", free.lhs, r.amgm_bound);
        assert!(free.lhs <= 2.0 + SLACK);
    }
}

#[test]
fn optimal_b_is_sandwiched() {
    for i in 0..6 {
        let l = random_density(2, 1 + (i as usize % 4), derive_seed(2002, 2 * i)).unwrap();
        let r = random_density(2, 1 + (i as usize % 4), derive_seed(2002, 2 * i + 1)).unwrap();
        let ml = horodecki_m(&correlation_tensor(&l).unwrap()).unwrap();
        let mr = horodecki_m(&correlation_tensor(&r).unwrap()).unwrap();
        let opt = maximize_b(&l, &r, &cfg(8)).unwrap();
        assert!(opt.value * opt.value <= (ml * mr).sqrt() + 1e-9);
        assert!(opt.value <= SQRT_2 + 1e-9);
    }
}

// Flipping any one direction relabels that input's outcomes; the optimum
// over all settings cannot change.
#[test]
fn negating_a_direction_keeps_the_optimum() {
    let l = random_density(2, 2, derive_seed(2003, 0)).unwrap();
    let r = random_density(2, 1, derive_seed(2003, 1)).unwrap();
    let tl = correlation_tensor(&l).unwrap();
    let tr = correlation_tensor(&r).unwrap();
    let base = maximize(|v| b_closed_form(&tl, &tr, &bilocal_settings(v)), 8, &cfg(9))
        .unwrap()
        .value;
    for k in 0..8 {
        let flipped = maximize(
            |v| {
                let mut w = v.to_vec();
                w[k] = w[k].neg();
                b_closed_form(&tl, &tr, &bilocal_settings(&w))
            },
            8,
            &cfg(9),
        )
        .unwrap()
        .value;
        assert!((flipped - base).abs() <= SLACK, "direction {k}: {flipped} vs {base}");
    }
}

#[test]
fn results_are_bitwise_reproducible() {
    let net = mixed_network(0);
    let serial = OptimizerConfig {
        parallel: false,
        ..cfg(10)
    };
    let a = maximize_shared(&net, &cfg(10)).unwrap();
    let b = maximize_shared(&net, &cfg(10)).unwrap();
    let c = maximize_shared(&net, &serial).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a.value.to_bits(), c.value.to_bits());
}
