#![allow(dead_code)] // each test binary uses its own subset

//! Shared fixtures and independent oracles for the integration and
//! acceptance suites. Oracles here deliberately avoid the chain's own
//! evaluation path wherever they check it.

use susy_chain::{BacklundChain, SeedSpec, TwoWellParams};

/// The second-order chain in the two-well closed-form convention:
/// S at `kappa1` centered through `x + b`, then R at `kappa2` centered
/// through `x - a`.
pub fn sr_chain(kappa1: f64, kappa2: f64, a: f64, b: f64) -> BacklundChain {
    BacklundChain::new(vec![
        SeedSpec::singular(kappa1, -b).unwrap(),
        SeedSpec::regular(kappa2, -a).unwrap(),
    ])
    .unwrap()
}

pub fn two_well_params(kappa1: f64, kappa2: f64, a: f64, b: f64) -> TwoWellParams {
    TwoWellParams::new(kappa1, kappa2, a, b).unwrap()
}

/// The canonical regular (reflectionless) chains of order 1..=3:
/// wave numbers decrease along the chain and families alternate ending
/// on R, which keeps every partner potential pole-free.
pub fn regular_chain(order: usize) -> BacklundChain {
    let seeds = match order {
        1 => vec![SeedSpec::regular(1.0, 0.0).unwrap()],
        2 => vec![
            SeedSpec::singular(1.0, -5.0).unwrap(),
            SeedSpec::regular(0.5, -5.0).unwrap(),
        ],
        3 => vec![
            SeedSpec::regular(1.5, 0.0).unwrap(),
            SeedSpec::singular(1.0, 0.3).unwrap(),
            SeedSpec::regular(0.5, -0.4).unwrap(),
        ],
        _ => panic!("no canonical regular chain of order {order}"),
    };
    BacklundChain::new(seeds).unwrap()
}

/// Wave numbers of the canonical chain, largest first.
pub fn regular_chain_kappas(order: usize) -> Vec<f64> {
    match order {
        1 => vec![1.0],
        2 => vec![1.0, 0.5],
        3 => vec![1.5, 1.0, 0.5],
        _ => panic!("no canonical regular chain of order {order}"),
    }
}

/// Five-point central difference, O(h^4).
pub fn fd_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Dense-evaluation pole oracle, independent of the chain's census
/// machinery: sample `|V_n|` at `samples` points and cluster the
/// blow-ups above `threshold`. Every genuine pole here is second order,
/// so any threshold well above the regular scale and well below
/// `1/spacing^2` sees the same clusters.
pub fn dense_pole_locations(
    chain: &BacklundChain,
    lo: f64,
    hi: f64,
    samples: usize,
    threshold: f64,
) -> Vec<f64> {
    let h = (hi - lo) / (samples - 1) as f64;
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    for i in 0..samples {
        let x = lo + i as f64 * h;
        let big = match chain.eval_potential(x) {
            Ok(v) => v.abs() > threshold,
            Err(_) => false, // guarded points carry no magnitude information
        };
        if big {
            match clusters.last_mut() {
                Some((_, last)) if i - *last <= 3 => *last = i,
                _ => clusters.push((i, i)),
            }
        }
    }
    clusters
        .iter()
        .map(|&(a, b)| lo + 0.5 * (a + b) as f64 * h)
        .collect()
}

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual}, expected {expected} (tol {tol:e})"
    );
}
