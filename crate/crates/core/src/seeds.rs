//! Closed-form superpotentials for the free particle (`V0 = 0`, `hbar = m = 1`).
//!
//! A superpotential `beta(x, e)` solves the Riccati equation
//!
//! ```text
//! -beta' + beta^2 = 2 (V0 - e)
//! ```
//!
//! at factorization energy `e`, and generates the first-order partner
//! potential `V1 = V0 + beta'`. Over `V0 = 0` the general solution is
//! `beta = -sqrt(2e) cot[sqrt(2e) (x - alpha)]`, which reduces to four real
//! families depending on the sign of `e` and the integration constant:
//!
//! | family | e       | beta(x)                  | V1(x)                    |
//! |--------|---------|--------------------------|--------------------------|
//! | S      | -k^2/2  | -k coth[k (x - a)]       |  k^2 csch^2[k (x - a)]   |
//! | R      | -k^2/2  | -k tanh[k (x + b)]       | -k^2 sech^2[k (x + b)]   |
//! | P      | +k^2/2  | -k cot[k (x - a)]        |  k^2 csc^2[k (x - a)]    |
//! | N      |  0      | -1 / (x - a)             |  (x - a)^-2              |
//!
//! Note the sign conventions: S, P and N center on `x - shift`, R centers on
//! `x + shift`. R is globally regular (the modified Poschl-Teller well);
//! S and N have one pole at the center, P has the periodic train
//! `shift + m pi / k`. Poles are flagged, never thrown: evaluation within
//! `pole_guard` of a pole marks the value singular because downstream chain
//! denominators amplify pole-adjacent roundoff.

use crate::error::SusyError;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Distance from a pole inside which evaluation is flagged singular.
pub const DEFAULT_POLE_GUARD: f64 = 1e-8;

/// The four real solution families of the free-particle Riccati equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Singular: `-kappa coth[kappa (x - a)]`, e = -kappa^2/2.
    S,
    /// Regular: `-kappa tanh[kappa (x + b)]`, e = -kappa^2/2.
    R,
    /// Periodic: `-k cot[k (x - a)]`, e = +k^2/2.
    P,
    /// Null: `-1/(x - a)`, e = 0.
    N,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::S => "S",
            Family::R => "R",
            Family::P => "P",
            Family::N => "N",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = SusyError;

    fn from_str(s: &str) -> Result<Self, SusyError> {
        match s {
            "S" | "s" => Ok(Family::S),
            "R" | "r" => Ok(Family::R),
            "P" | "p" => Ok(Family::P),
            "N" | "n" => Ok(Family::N),
            other => Err(SusyError::InvalidSeed(format!(
                "unknown family {other:?} (expected S, R, P or N)"
            ))),
        }
    }
}

/// One first-order superpotential: family, wave number and center shift.
///
/// `kappa` is the wave number (must be positive for S/R/P, zero for N).
/// `shift` is the center parameter: `a` for S/P/N, `b` for R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedSpec {
    pub family: Family,
    pub kappa: f64,
    pub shift: f64,
}

/// Value of a seed superpotential at one point.
///
/// When `is_singular` is set, `beta` and `beta_prime` are NaN.
#[derive(Debug, Clone, Copy)]
pub struct SeedValue {
    pub beta: f64,
    pub beta_prime: f64,
    pub is_singular: bool,
}

impl SeedValue {
    fn regular(beta: f64, beta_prime: f64) -> Self {
        SeedValue {
            beta,
            beta_prime,
            is_singular: false,
        }
    }

    fn singular() -> Self {
        SeedValue {
            beta: f64::NAN,
            beta_prime: f64::NAN,
            is_singular: true,
        }
    }
}

impl SeedSpec {
    pub fn new(family: Family, kappa: f64, shift: f64) -> Result<Self, SusyError> {
        if !kappa.is_finite() || !shift.is_finite() {
            return Err(SusyError::InvalidSeed(
                "kappa and shift must be finite".into(),
            ));
        }
        match family {
            Family::N if kappa != 0.0 => Err(SusyError::InvalidSeed(
                "family N has no wave number; kappa must be 0".into(),
            )),
            Family::S | Family::R | Family::P if kappa <= 0.0 => Err(SusyError::InvalidSeed(
                format!("family {family} requires kappa > 0, got {kappa}"),
            )),
            _ => Ok(SeedSpec {
                family,
                kappa,
                shift,
            }),
        }
    }

    pub fn singular(kappa: f64, a: f64) -> Result<Self, SusyError> {
        Self::new(Family::S, kappa, a)
    }

    pub fn regular(kappa: f64, b: f64) -> Result<Self, SusyError> {
        Self::new(Family::R, kappa, b)
    }

    pub fn periodic(k: f64, a: f64) -> Result<Self, SusyError> {
        Self::new(Family::P, k, a)
    }

    pub fn null(a: f64) -> Result<Self, SusyError> {
        Self::new(Family::N, 0.0, a)
    }

    /// The constant e at which `H0 - e` factorizes through this seed:
    /// `-kappa^2/2` for S and R, `+kappa^2/2` for P, `0` for N.
    pub fn factorization_energy(&self) -> f64 {
        match self.family {
            Family::S | Family::R => -0.5 * self.kappa * self.kappa,
            Family::P => 0.5 * self.kappa * self.kappa,
            Family::N => 0.0,
        }
    }

    /// Signed center argument: `x - shift` for S/P/N, `x + shift` for R.
    fn center_arg(&self, x: f64) -> f64 {
        match self.family {
            Family::R => x + self.shift,
            _ => x - self.shift,
        }
    }

    /// Distance from `x` to the nearest pole of this family
    /// (infinite for R).
    pub fn pole_distance(&self, x: f64) -> f64 {
        let u = self.center_arg(x);
        match self.family {
            Family::R => f64::INFINITY,
            Family::S | Family::N => u.abs(),
            Family::P => {
                let period = PI / self.kappa;
                let t = u / period;
                (u - t.round() * period).abs()
            }
        }
    }

    /// All poles of this seed inside `[lo, hi]`, in closed form.
    pub fn poles_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self.family {
            Family::R => Vec::new(),
            Family::S | Family::N => {
                if (lo..=hi).contains(&self.shift) {
                    vec![self.shift]
                } else {
                    Vec::new()
                }
            }
            Family::P => {
                let period = PI / self.kappa;
                let m_lo = ((lo - self.shift) / period).ceil() as i64;
                let m_hi = ((hi - self.shift) / period).floor() as i64;
                (m_lo..=m_hi)
                    .map(|m| self.shift + m as f64 * period)
                    .collect()
            }
        }
    }

    /// Evaluate `beta` and `beta'` with the default pole guard.
    pub fn eval(&self, x: f64) -> SeedValue {
        self.eval_guarded(x, DEFAULT_POLE_GUARD)
    }

    /// Evaluate `beta` and the differentiated closed form `beta'`.
    ///
    /// Flags the value singular when `x` lies within `pole_guard` of a pole.
    pub fn eval_guarded(&self, x: f64, pole_guard: f64) -> SeedValue {
        if self.pole_distance(x) <= pole_guard {
            return SeedValue::singular();
        }
        let k = self.kappa;
        let u = self.center_arg(x);
        let value = match self.family {
            Family::S => {
                let s = (k * u).sinh();
                SeedValue::regular(-k / (k * u).tanh(), (k / s) * (k / s))
            }
            Family::R => {
                let c = (k * u).cosh();
                SeedValue::regular(-k * (k * u).tanh(), -(k / c) * (k / c))
            }
            Family::P => {
                let s = (k * u).sin();
                SeedValue::regular(-k / (k * u).tan(), (k / s) * (k / s))
            }
            Family::N => SeedValue::regular(-1.0 / u, 1.0 / (u * u)),
        };
        if value.beta.is_finite() && value.beta_prime.is_finite() {
            value
        } else {
            SeedValue::singular()
        }
    }

    /// First-order partner potential `V1 = V0 + beta' = beta'` over `V0 = 0`.
    pub fn first_order_partner(&self, x: f64) -> Result<f64, SusyError> {
        let v = self.eval(x);
        if v.is_singular {
            return Err(SusyError::SingularPoint {
                x,
                level: 1,
                kind: crate::chain::PoleKind::SeedPole,
            });
        }
        Ok(v.beta_prime)
    }
}

/// A general solution of the level-0 Riccati equation at a fixed
/// factorization energy. `SeedSpec` implements it with the free-particle
/// closed forms; external seed evaluators (over other solvable `V0`) can
/// plug into [`crate::chain::BacklundChain`] through this trait.
pub trait SeedFunction {
    fn energy(&self) -> f64;

    fn eval(&self, x: f64, pole_guard: f64) -> SeedValue;

    /// Pole positions inside a window, if known in closed form.
    fn poles_in(&self, _lo: f64, _hi: f64) -> Vec<f64> {
        Vec::new()
    }
}

impl SeedFunction for SeedSpec {
    fn energy(&self) -> f64 {
        self.factorization_energy()
    }

    fn eval(&self, x: f64, pole_guard: f64) -> SeedValue {
        self.eval_guarded(x, pole_guard)
    }

    fn poles_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        SeedSpec::poles_in(self, lo, hi)
    }
}
