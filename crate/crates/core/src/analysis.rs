//! Closed-form references used to validate the chain engine: the two-well
//! second-order potential, the four first-order partner potentials, and a
//! local-minimum census for sampled potentials.

use crate::chain::{GridSample, PoleKind};
use crate::error::SusyError;
use crate::seeds::{Family, SeedSpec};

/// Parameters of the closed-form second-order potential built from an S
/// seed at `kappa1` centered through `x + b` and an R seed at `kappa2`
/// centered through `x - a`:
///
/// ```text
/// V2(x) = -(k1^2 - k2^2) * [k1^2 csch^2(k1 (x+b)) + k2^2 sech^2(k2 (x-a))]
///         / (-k1 coth(k1 (x+b)) + k2 tanh(k2 (x-a)))^2
/// ```
///
/// For `kappa2 < kappa1` this is a regular two-well profile; for
/// `kappa2 > kappa1` a movable singularity appears near `x = a`; for
/// `kappa1 == kappa2` it vanishes identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoWellParams {
    pub kappa1: f64,
    pub kappa2: f64,
    pub a: f64,
    pub b: f64,
}

/// Radius around `x = -b` inside which the csch/coth poles are removed
/// analytically before dividing.
const NEAR_CENTER: f64 = 1e-3;

impl TwoWellParams {
    pub fn new(kappa1: f64, kappa2: f64, a: f64, b: f64) -> Result<Self, SusyError> {
        if !(kappa1.is_finite() && kappa1 > 0.0 && kappa2.is_finite() && kappa2 > 0.0) {
            return Err(SusyError::InvalidSeed(format!(
                "two-well wave numbers must be positive, got ({kappa1}, {kappa2})"
            )));
        }
        Ok(TwoWellParams {
            kappa1,
            kappa2,
            a,
            b,
        })
    }
}

/// `z * coth(z)`, regular at 0. Laurent-series head below |z| = 0.01,
/// scaled hyperbolic ratio above.
fn coth_scaled(z: f64) -> f64 {
    if z.abs() < 0.01 {
        let z2 = z * z;
        1.0 + z2 * (1.0 / 3.0 + z2 * (-1.0 / 45.0 + z2 * (2.0 / 945.0)))
    } else {
        z / z.tanh()
    }
}

/// `z^2 * csch^2(z)`, regular at 0.
fn csch2_scaled(z: f64) -> f64 {
    if z.abs() < 0.01 {
        let z2 = z * z;
        1.0 + z2 * (-1.0 / 3.0 + z2 * (1.0 / 15.0 + z2 * (-2.0 / 189.0)))
    } else {
        let r = z / z.sinh();
        r * r
    }
}

/// The closed-form second-order potential.
///
/// Both the numerator and the squared denominator have second-order poles
/// at `x = -b` that cancel; inside [`NEAR_CENTER`] the evaluation divides
/// them out exactly (multiply through by `(x+b)^2`), so the profile is
/// smooth across the seed center. Errors only where the denominator
/// vanishes without that cancellation (the movable singularity).
pub fn v2_closed_form(p: &TwoWellParams, x: f64) -> Result<f64, SusyError> {
    let (k1, k2) = (p.kappa1, p.kappa2);
    let prefactor = -(k1 * k1 - k2 * k2);
    if prefactor == 0.0 {
        // degenerate wave numbers undo the deformation identically; the
        // ratio itself turns 0/0 where coth and tanh tails coincide
        return Ok(0.0);
    }
    let u = x + p.b;
    let r_arg = k2 * (x - p.a);
    let tanh_term = k2 * r_arg.tanh();
    let sech = k2 / r_arg.cosh();

    if u.abs() < NEAR_CENTER {
        let z = k1 * u;
        let num = csch2_scaled(z) + (u * sech) * (u * sech);
        let den = -coth_scaled(z) + u * tanh_term;
        let guard = 1e-10 * (coth_scaled(z).abs() + (u * tanh_term).abs()).max(1.0);
        if den.abs() <= guard {
            return Err(SusyError::SingularPoint {
                x,
                level: 2,
                kind: PoleKind::DenominatorZero,
            });
        }
        return Ok(prefactor * num / (den * den));
    }

    let s_arg = k1 * u;
    let coth_term = -k1 / s_arg.tanh();
    let csch = k1 / s_arg.sinh();
    let den = coth_term + tanh_term;
    let guard = 1e-10 * (coth_term.abs() + tanh_term.abs()).max(1.0);
    if den.abs() <= guard {
        return Err(SusyError::SingularPoint {
            x,
            level: 2,
            kind: PoleKind::DenominatorZero,
        });
    }
    Ok(prefactor * (csch * csch + sech * sech) / (den * den))
}

/// First-order partner potentials written directly from the potential
/// forms (`k^2 csch^2`, `-k^2 sech^2`, `k^2 csc^2`, `(x-a)^-2`), as an
/// independent route against `SeedSpec::first_order_partner`.
pub fn v1_closed_form(spec: &SeedSpec, x: f64) -> Result<f64, SusyError> {
    if spec.pole_distance(x) <= crate::seeds::DEFAULT_POLE_GUARD {
        return Err(SusyError::SingularPoint {
            x,
            level: 1,
            kind: PoleKind::SeedPole,
        });
    }
    let k = spec.kappa;
    let v = match spec.family {
        Family::S => {
            let s = (k * (x - spec.shift)).sinh();
            k * k / (s * s)
        }
        Family::R => {
            let c = (k * (x + spec.shift)).cosh();
            -k * k / (c * c)
        }
        Family::P => {
            let s = (k * (x - spec.shift)).sin();
            k * k / (s * s)
        }
        Family::N => {
            let u = x - spec.shift;
            1.0 / (u * u)
        }
    };
    Ok(v)
}

/// A local minimum of a sampled potential.
#[derive(Debug, Clone, Copy)]
pub struct Well {
    pub x: f64,
    pub depth: f64,
}

/// Local minima of uniformly sampled values: discrete sign change of the
/// first differences, refined by a three-point parabolic fit. Minima
/// closer than 10 grid steps merge into the deeper one. Triples touching
/// NaN (flagged) samples are skipped, and a dip must rise above the
/// sample's rounding floor (1e-12 of the largest finite |V|) on both
/// sides; evaluation noise in exponential tails wiggles at that scale.
pub fn well_census(xs: &[f64], values: &[f64]) -> Vec<Well> {
    assert_eq!(xs.len(), values.len());
    if xs.len() < 3 {
        return Vec::new();
    }
    let scale = values
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * scale;
    let h = xs[1] - xs[0];
    let mut wells: Vec<Well> = Vec::new();
    for i in 1..xs.len() - 1 {
        let (vl, vm, vr) = (values[i - 1], values[i], values[i + 1]);
        if !(vl.is_finite() && vm.is_finite() && vr.is_finite()) {
            continue;
        }
        if vm < vl - floor && vm < vr - floor {
            let curv = vl - 2.0 * vm + vr;
            let (x, depth) = if curv > 0.0 {
                let dx = 0.5 * (vl - vr) / curv;
                (xs[i] + dx * h, vm - 0.125 * (vl - vr) * (vl - vr) / curv)
            } else {
                (xs[i], vm)
            };
            match wells.last_mut() {
                Some(last) if (x - last.x).abs() <= 10.0 * h => {
                    if depth < last.depth {
                        *last = Well { x, depth };
                    }
                }
                _ => wells.push(Well { x, depth }),
            }
        }
    }
    wells
}

/// [`well_census`] over a sampled grid.
pub fn well_census_sample(sample: &GridSample) -> Vec<Well> {
    well_census(&sample.xs, &sample.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::SeedSpec;

    #[test]
    fn scaled_helpers_match_hyperbolic_forms() {
        // across the series/ratio switchover
        for &z in &[1e-6f64, 1e-4, 0.005, 0.009, 0.011, 0.05, 0.5, 2.0] {
            let c_ref = z / z.tanh();
            let s_ref = (z / z.sinh()) * (z / z.sinh());
            assert!((coth_scaled(z) - c_ref).abs() <= 1e-15 * c_ref.abs());
            assert!((csch2_scaled(z) - s_ref).abs() <= 1e-15 * s_ref.abs());
            assert_eq!(coth_scaled(z), coth_scaled(-z));
            assert_eq!(csch2_scaled(z), csch2_scaled(-z));
        }
        assert_eq!(coth_scaled(0.0), 1.0);
        assert_eq!(csch2_scaled(0.0), 1.0);
    }

    #[test]
    fn degenerate_wave_numbers_vanish_exactly() {
        let p = TwoWellParams::new(1.0, 1.0, 2.0, -1.0).unwrap();
        let mut x = -20.0;
        while x <= 20.0 {
            assert_eq!(v2_closed_form(&p, x).unwrap(), 0.0);
            x += 0.0937;
        }
        // including straight through the seed center
        assert_eq!(v2_closed_form(&p, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn regular_profile_value_at_seed_center() {
        // coth/csch poles cancel at x = -b; the limit is k2^2 - k1^2.
        let p = TwoWellParams::new(1.0, 0.5, 5.0, 5.0).unwrap();
        let v = v2_closed_form(&p, -5.0).unwrap();
        assert!((v - (-0.75)).abs() < 1e-12, "limit at x = -b: {v}");
    }

    #[test]
    fn continuous_across_seed_center() {
        // V2 is regular at x = -b with a finite slope, so the two-sided
        // gap shrinks linearly in h right through the series branch.
        let p = TwoWellParams::new(1.0, 0.5, 5.0, 5.0).unwrap();
        let center = v2_closed_form(&p, -5.0).unwrap();
        let mut prev_gap = f64::INFINITY;
        for &h in &[1e-2, 1e-3, 1e-4] {
            let (above, below) = (
                v2_closed_form(&p, -5.0 + h).unwrap(),
                v2_closed_form(&p, -5.0 - h).unwrap(),
            );
            let gap = (above - below).abs();
            assert!(gap < prev_gap, "gap not shrinking: {gap} at h = {h}");
            assert!(gap < 3.0 * h, "gap {gap} not O(h) at h = {h}");
            assert!((above - center).abs() < 3.0 * h);
            prev_gap = gap;
        }
    }

    #[test]
    fn singular_when_kappa2_exceeds_kappa1() {
        let p = TwoWellParams::new(0.5, 5.0, 3.0, 3.0).unwrap();
        // dense scan near a: the movable pole flips the denominator sign
        let mut found = false;
        let mut x = 2.9;
        let mut prev = v2_closed_form(&p, x).unwrap();
        while x < 3.1 {
            x += 1e-4;
            match v2_closed_form(&p, x) {
                Ok(v) => {
                    if v.abs() > 1e6 && prev.abs() > 1e6 {
                        found = true;
                    }
                    prev = v;
                }
                Err(_) => found = true,
            }
        }
        assert!(found, "no singularity detected near x = a");
    }

    #[test]
    fn scaling_covariance() {
        // V2(x; l*k1, l*k2, centers/l) == l^2 V2(l*x; k1, k2, centers)
        let lambda = 2.0;
        let base = TwoWellParams::new(1.0, 0.5, 4.0, 3.0).unwrap();
        let scaled = TwoWellParams::new(
            lambda * base.kappa1,
            lambda * base.kappa2,
            base.a / lambda,
            base.b / lambda,
        )
        .unwrap();
        let mut x = -7.0;
        while x <= 7.0 {
            let lhs = v2_closed_form(&scaled, x).unwrap();
            let rhs = lambda * lambda * v2_closed_form(&base, lambda * x).unwrap();
            let scale = rhs.abs().max(1e-300);
            assert!(
                ((lhs - rhs) / scale).abs() < 1e-10,
                "covariance broken at x = {x}: {lhs} vs {rhs}"
            );
            x += 0.23;
        }
    }

    #[test]
    fn first_order_closed_forms() {
        let r = SeedSpec::regular(2.0, 0.0).unwrap();
        assert_eq!(v1_closed_form(&r, 0.0).unwrap(), -4.0);

        let s = SeedSpec::singular(1.0, 0.0).unwrap();
        let x = 1.0f64.asinh();
        assert!((v1_closed_form(&s, x).unwrap() - 1.0).abs() < 1e-15);

        let n = SeedSpec::null(1.0).unwrap();
        assert_eq!(v1_closed_form(&n, 3.0).unwrap(), 0.25);

        assert!(v1_closed_form(&s, 0.0).is_err());
    }

    #[test]
    fn v1_routes_agree() {
        for spec in [
            SeedSpec::singular(1.3, 0.2).unwrap(),
            SeedSpec::regular(0.7, -1.0).unwrap(),
            SeedSpec::periodic(2.0, 0.5).unwrap(),
            SeedSpec::null(-0.3).unwrap(),
        ] {
            let mut x = -5.0;
            while x <= 5.0 {
                if spec.pole_distance(x) > 1e-3 {
                    let direct = v1_closed_form(&spec, x).unwrap();
                    let derived = spec.first_order_partner(x).unwrap();
                    assert!(
                        (direct - derived).abs() <= 1e-12 * direct.abs().max(1.0),
                        "{spec:?} at {x}: {direct} vs {derived}"
                    );
                }
                x += 0.29;
            }
        }
    }

    #[test]
    fn census_single_well() {
        let spec = SeedSpec::regular(1.0, 0.0).unwrap();
        let xs: Vec<f64> = (0..2001).map(|i| -10.0 + i as f64 * 0.01).collect();
        let vs: Vec<f64> = xs
            .iter()
            .map(|&x| spec.first_order_partner(x).unwrap())
            .collect();
        let wells = well_census(&xs, &vs);
        assert_eq!(wells.len(), 1);
        assert!(wells[0].x.abs() < 1e-9);
        assert!((wells[0].depth + 1.0).abs() < 1e-9);
    }

    #[test]
    fn census_two_wells() {
        let p = TwoWellParams::new(1.0, 0.5, 5.0, 5.0).unwrap();
        let xs: Vec<f64> = (0..2001).map(|i| -15.0 + i as f64 * 0.015).collect();
        let vs: Vec<f64> = xs.iter().map(|&x| v2_closed_form(&p, x).unwrap()).collect();
        let wells = well_census(&xs, &vs);
        assert_eq!(wells.len(), 2, "wells: {wells:?}");
        assert!(wells.iter().all(|w| w.depth < 0.0));
    }

    #[test]
    fn census_flat_potential_empty() {
        let xs: Vec<f64> = (0..101).map(|i| i as f64 * 0.1).collect();
        let vs = vec![0.0; xs.len()];
        assert!(well_census(&xs, &vs).is_empty());
    }
}
