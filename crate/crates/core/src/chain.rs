//! Iterated Backlund superposition: build the chain of superpotentials
//! `beta_k` and partner potentials `V_k`, k = 1..n, from n seed solutions.
//!
//! Two Riccati solutions over the same potential at distinct energies
//! combine algebraically into a solution over the deformed potential:
//!
//! ```text
//! beta_k(x, e_j) = -beta_{k-1}(x, e_{k-1})
//!                  - 2 (e_{k-1} - e_j) / (beta_{k-1}(x, e_{k-1}) - beta_{k-1}(x, e_j))
//! ```
//!
//! Level 1 is the seeds themselves; level k consumes the previous diagonal
//! entry (energy `e_{k-1}`) plus the previous entry at energy `e_j`,
//! filling a triangular table over j >= k. The diagonal accumulates the
//! partner potentials, `V_k = V_{k-1} + beta_k'(x, e_k)`.
//!
//! Derivatives are propagated through the Riccati identity
//! `beta_k' = beta_k^2 - 2 (V_{k-1} - e_k)` rather than differenced
//! numerically: `beta_k` has movable poles (zeros of the superposition
//! denominator) where finite differences are hopeless, while the identity
//! is exact. Level 1 keeps the differentiated closed forms of the seeds,
//! so an order-1 chain reproduces `first_order_partner` bit for bit.
//!
//! Seeds are consumed in list order as `e_1, e_2, ..., e_n`. For the
//! free-particle families the regular (pole-free) chains order the wave
//! numbers decreasingly and alternate families ending on R:
//! `[R]`, `[S, R]`, `[R, S, R]`, ... Any other arrangement is allowed;
//! poles are then detected and reported, not errors.

use crate::error::SusyError;
use crate::seeds::{SeedFunction, SeedSpec, SeedValue, DEFAULT_POLE_GUARD};
use std::fmt;
use std::sync::Arc;

/// Relative scale of the superposition-denominator guard.
pub const DENOM_GUARD_REL: f64 = 1e-10;

/// Bisection width for refined pole locations.
pub const POLE_REFINE_TOL: f64 = 1e-12;

/// Probe offsets used to decide whether a detected singular point is a
/// genuine pole of `V_n` or only a removable singularity of the evaluation
/// path. True poles here are universally `~ c/(x - x0)^2` with c >= 1, so
/// `|V| * d^2` at distance d stays O(1); at removable points it is O(d^2).
const PROBE_OFFSETS: [f64; 2] = [0.01, 0.02];
const PROBE_TRUE_POLE_MIN: f64 = 0.25;

/// What kind of pole an evaluation ran into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleKind {
    None,
    /// A pole of one of the seed superpotentials.
    SeedPole,
    /// A movable singularity: zero of a superposition denominator.
    DenominatorZero,
}

impl PoleKind {
    pub fn label(self) -> &'static str {
        match self {
            PoleKind::None => "none",
            PoleKind::SeedPole => "seed_pole",
            PoleKind::DenominatorZero => "denominator_zero",
        }
    }
}

impl fmt::Display for PoleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One entry of the chain table at a point: `beta_k(x, e_j)`, its
/// derivative, and the accumulated potential.
///
/// `v` is `V_{k-1}(x) + beta_k'(x, e_j)`; on the diagonal `j == k` this is
/// the partner potential `V_k(x)`. When `is_singular` is set the numeric
/// fields are NaN, `pole_kind` says what was hit and `pole_level` at which
/// level (1 for seed poles).
#[derive(Debug, Clone, Copy)]
pub struct LevelValue {
    pub beta: f64,
    pub beta_prime: f64,
    pub v: f64,
    pub is_singular: bool,
    pub pole_kind: PoleKind,
    pub pole_level: usize,
}

impl LevelValue {
    fn regular(beta: f64, beta_prime: f64, v: f64) -> Self {
        LevelValue {
            beta,
            beta_prime,
            v,
            is_singular: false,
            pole_kind: PoleKind::None,
            pole_level: 0,
        }
    }

    fn singular(kind: PoleKind, level: usize) -> Self {
        LevelValue {
            beta: f64::NAN,
            beta_prime: f64::NAN,
            v: f64::NAN,
            is_singular: true,
            pole_kind: kind,
            pole_level: level,
        }
    }
}

/// Nonlinear superposition of two Riccati solutions over the same
/// potential: `-beta_a - 2 (eps_a - eps_b) / (beta_a - beta_b)`, where the
/// `a` arguments carry the previous diagonal energy.
///
/// Errors with [`SusyError::DenominatorZero`] when `|beta_a - beta_b|` is
/// below the guard; that zero is a movable singularity of the deformed
/// potential at this point. With `eps_a == eps_b` the step degenerates to
/// `-beta_a` (the deformation undoes itself).
pub fn backlund_step(beta_a: f64, beta_b: f64, eps_a: f64, eps_b: f64) -> Result<f64, SusyError> {
    let den = beta_a - beta_b;
    let guard = DENOM_GUARD_REL * (beta_a.abs() + beta_b.abs()).max(1.0);
    if !den.is_finite() || den.abs() <= guard {
        return Err(SusyError::DenominatorZero {
            magnitude: den.abs(),
            guard,
        });
    }
    Ok(-beta_a - 2.0 * (eps_a - eps_b) / den)
}

/// A refined pole of the sampled window.
#[derive(Debug, Clone, Copy)]
pub struct PoleLocation {
    pub x: f64,
    pub kind: PoleKind,
    /// Chain level at which the pole event occurs (1 for seed poles).
    pub level: usize,
    /// True when `V_n` stays finite across the point and only the
    /// evaluation path is singular there (e.g. a seed pole canceled at a
    /// later level).
    pub removable: bool,
}

/// Uniformly sampled `V_n` with per-point singular flags and the refined
/// pole census of the window.
#[derive(Debug, Clone)]
pub struct GridSample {
    pub x_min: f64,
    pub x_max: f64,
    pub xs: Vec<f64>,
    /// `V_n(x_i)`; NaN where flagged.
    pub values: Vec<f64>,
    pub flags: Vec<PoleKind>,
    pub poles: Vec<PoleLocation>,
    pub energies: Vec<f64>,
}

impl GridSample {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.xs.len() - 1) as f64
    }
}

/// Census of genuine (non-removable) poles in a sampled window.
#[derive(Debug, Clone)]
pub struct PoleCount {
    pub count: usize,
    pub locations: Vec<f64>,
}

/// Number of distinct refined pole locations of `V_n` in the window.
/// Removable evaluation singularities are excluded.
pub fn count_poles(sample: &GridSample) -> PoleCount {
    let mut locations: Vec<f64> = sample
        .poles
        .iter()
        .filter(|p| !p.removable)
        .map(|p| p.x)
        .collect();
    locations.sort_by(|a, b| a.partial_cmp(b).unwrap());
    locations.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + a.abs()));
    PoleCount {
        count: locations.len(),
        locations,
    }
}

type Background = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An ordered list of n seed solutions plus the triangular evaluation
/// table they generate. Immutable after construction; evaluation at
/// distinct points is independent and safe to run concurrently.
#[derive(Clone)]
pub struct BacklundChain<S = SeedSpec> {
    seeds: Vec<S>,
    energies: Vec<f64>,
    pole_guard: f64,
    background: Option<Background>,
}

impl<S: fmt::Debug> fmt::Debug for BacklundChain<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BacklundChain")
            .field("seeds", &self.seeds)
            .field("energies", &self.energies)
            .field("pole_guard", &self.pole_guard)
            .field("background", &self.background.as_ref().map(|_| "custom"))
            .finish()
    }
}

impl<S: SeedFunction> BacklundChain<S> {
    /// Build a chain over `V0 = 0`. Rejects an empty list and duplicate
    /// factorization energies (the superposition numerator
    /// `2 (e_{k-1} - e_j)` must be a nonzero constant).
    pub fn new(seeds: Vec<S>) -> Result<Self, SusyError> {
        if seeds.is_empty() {
            return Err(SusyError::EmptyChain);
        }
        let energies: Vec<f64> = seeds.iter().map(|s| s.energy()).collect();
        for i in 0..energies.len() {
            for j in (i + 1)..energies.len() {
                if energies[i] == energies[j] {
                    return Err(SusyError::DuplicateEnergy {
                        first: i + 1,
                        second: j + 1,
                        energy: energies[i],
                    });
                }
            }
        }
        Ok(BacklundChain {
            seeds,
            energies,
            pole_guard: DEFAULT_POLE_GUARD,
            background: None,
        })
    }

    pub fn with_pole_guard(mut self, pole_guard: f64) -> Self {
        self.pole_guard = pole_guard;
        self
    }

    /// Replace the zero background with an arbitrary `V0`. The seeds must
    /// then solve the Riccati equation over that potential.
    pub fn with_background(
        mut self,
        v0: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.background = Some(Arc::new(v0));
        self
    }

    pub fn order(&self) -> usize {
        self.seeds.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn seeds(&self) -> &[S] {
        &self.seeds
    }

    pub fn pole_guard(&self) -> f64 {
        self.pole_guard
    }

    fn v0(&self, x: f64) -> f64 {
        match &self.background {
            Some(f) => f(x),
            None => 0.0,
        }
    }

    /// Evaluate the full triangle at one point. Entry `(k, j)` lives at
    /// `table[k-1][j-k]`; `v_diag[k]` is `V_k(x)` (`v_diag[0] = V0`).
    fn triangle(&self, x: f64) -> Triangle {
        let n = self.order();
        let mut table: Vec<Vec<LevelValue>> = Vec::with_capacity(n);
        let mut v_diag = vec![f64::NAN; n + 1];
        v_diag[0] = self.v0(x);

        let mut level1 = Vec::with_capacity(n);
        for seed in &self.seeds {
            let SeedValue {
                beta,
                beta_prime,
                is_singular,
            } = seed.eval(x, self.pole_guard);
            if is_singular {
                level1.push(LevelValue::singular(PoleKind::SeedPole, 1));
            } else {
                level1.push(LevelValue::regular(beta, beta_prime, v_diag[0] + beta_prime));
            }
        }
        if !level1[0].is_singular {
            v_diag[1] = level1[0].v;
        }
        table.push(level1);

        for k in 2..=n {
            let mut level_k = Vec::with_capacity(n - k + 1);
            for j in k..=n {
                let prev_diag = table[k - 2][0];
                let prev_j = table[k - 2][j - (k - 1)];
                let entry = if prev_diag.is_singular {
                    LevelValue::singular(prev_diag.pole_kind, prev_diag.pole_level)
                } else if prev_j.is_singular {
                    LevelValue::singular(prev_j.pole_kind, prev_j.pole_level)
                } else {
                    match backlund_step(
                        prev_diag.beta,
                        prev_j.beta,
                        self.energies[k - 2],
                        self.energies[j - 1],
                    ) {
                        Err(_) => LevelValue::singular(PoleKind::DenominatorZero, k),
                        Ok(beta) => {
                            let beta_prime =
                                beta * beta - 2.0 * (v_diag[k - 1] - self.energies[j - 1]);
                            let v = v_diag[k - 1] + beta_prime;
                            if beta.is_finite() && beta_prime.is_finite() {
                                LevelValue::regular(beta, beta_prime, v)
                            } else {
                                LevelValue::singular(PoleKind::DenominatorZero, k)
                            }
                        }
                    }
                };
                level_k.push(entry);
            }
            if !level_k[0].is_singular {
                v_diag[k] = level_k[0].v;
            }
            table.push(level_k);
        }

        Triangle { table, v_diag }
    }

    /// `beta_k(x, e_j)` with its derivative and accumulated potential,
    /// 1 <= k <= j <= n. `(1, j)` is exactly the j-th seed; the diagonal
    /// `(k, k)` carries `V_k`. Pole events propagate from the level where
    /// they occurred.
    pub fn eval_level(&self, k: usize, j: usize, x: f64) -> LevelValue {
        assert!(
            k >= 1 && k <= j && j <= self.order(),
            "level indices must satisfy 1 <= k <= j <= n, got k = {k}, j = {j}, n = {}",
            self.order()
        );
        let tri = self.triangle(x);
        tri.table[k - 1][j - k]
    }

    /// The n-SUSY partner potential `V_n(x)`, the diagonal telescoping
    /// `V_k = V_{k-1} + beta_k'`.
    pub fn eval_potential(&self, x: f64) -> Result<f64, SusyError> {
        let tri = self.triangle(x);
        let top = tri.table[self.order() - 1][0];
        if top.is_singular {
            return Err(SusyError::SingularPoint {
                x,
                level: top.pole_level,
                kind: top.pole_kind,
            });
        }
        Ok(tri.v_diag[self.order()])
    }

    /// All diagonal derivative terms `beta_k'(x, e_k)`, k = 1..n, for the
    /// sum form `V_n = V0 + sum_k beta_k'`. Shares every intermediate with
    /// [`Self::eval_potential`], so the left-folded sum reproduces it
    /// bit for bit.
    pub fn diagonal_beta_primes(&self, x: f64) -> Result<Vec<f64>, SusyError> {
        let tri = self.triangle(x);
        let top = tri.table[self.order() - 1][0];
        if top.is_singular {
            return Err(SusyError::SingularPoint {
                x,
                level: top.pole_level,
                kind: top.pole_kind,
            });
        }
        Ok((1..=self.order())
            .map(|k| tri.table[k - 1][0].beta_prime)
            .collect())
    }

    /// Convenience closure over [`Self::eval_potential`].
    pub fn potential(&self) -> impl Fn(f64) -> Result<f64, SusyError> + '_ {
        move |x| self.eval_potential(x)
    }

    /// Sample `V_n` on a uniform grid and run the pole census: closed-form
    /// seed poles, sign-change scan of every superposition denominator
    /// (refined by bisection), and the removability probe on each hit.
    /// Poles are data here, not errors.
    pub fn eval_grid(&self, x_min: f64, x_max: f64, samples: usize) -> Result<GridSample, SusyError> {
        if !x_min.is_finite() || !x_max.is_finite() || x_min >= x_max {
            return Err(SusyError::InvalidGrid(format!(
                "x_min must be below x_max, got [{x_min}, {x_max}]"
            )));
        }
        if samples < 2 {
            return Err(SusyError::InvalidGrid(format!(
                "need at least 2 samples, got {samples}"
            )));
        }
        let n = self.order();
        let h = (x_max - x_min) / (samples - 1) as f64;
        let xs: Vec<f64> = (0..samples).map(|i| x_min + i as f64 * h).collect();

        let mut values = vec![f64::NAN; samples];
        let mut flags = vec![PoleKind::None; samples];
        // denominators per (k, j), 2 <= k <= j <= n, laid out row-major
        let pair_count = n * n.saturating_sub(1) / 2;
        let mut dens: Vec<Vec<f64>> = vec![vec![f64::NAN; samples]; pair_count];

        for (i, &x) in xs.iter().enumerate() {
            let tri = self.triangle(x);
            let top = tri.table[n - 1][0];
            if top.is_singular {
                flags[i] = top.pole_kind;
            } else {
                values[i] = tri.v_diag[n];
            }
            let mut pair = 0;
            for k in 2..=n {
                for j in k..=n {
                    let a = tri.table[k - 2][0];
                    let b = tri.table[k - 2][j - (k - 1)];
                    if !a.is_singular && !b.is_singular {
                        dens[pair][i] = a.beta - b.beta;
                    }
                    pair += 1;
                }
            }
        }

        let mut poles: Vec<PoleLocation> = Vec::new();
        for seed in &self.seeds {
            for x in seed.poles_in(x_min, x_max) {
                poles.push(PoleLocation {
                    x,
                    kind: PoleKind::SeedPole,
                    level: 1,
                    removable: false,
                });
            }
        }

        // Movable poles, level by level. A pole of any deeper level makes
        // the level-k denominators jump sign without vanishing, so
        // intervals holding one are masked from the crossing scan.
        let mut pair = 0;
        for k in 2..=n {
            for j in k..=n {
                let den = &dens[pair];
                for i in 0..samples - 1 {
                    let (da, db) = (den[i], den[i + 1]);
                    if !da.is_finite() || !db.is_finite() {
                        continue;
                    }
                    let hit = if da == 0.0 {
                        Some(xs[i])
                    } else if da * db < 0.0 {
                        Some(self.refine_denominator_zero(k, j, xs[i], xs[i + 1]))
                    } else {
                        None
                    };
                    if let Some(x0) = hit {
                        let masked = poles
                            .iter()
                            .any(|p| p.x > xs[i] - h && p.x < xs[i + 1] + h && p.level < k);
                        if !masked {
                            poles.push(PoleLocation {
                                x: x0,
                                kind: PoleKind::DenominatorZero,
                                level: k,
                                removable: false,
                            });
                        }
                    }
                }
                pair += 1;
            }
        }

        for pole in &mut poles {
            pole.removable = !self.probe_true_pole(pole.x);
        }
        poles.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
        poles.dedup_by(|a, b| (a.x - b.x).abs() <= 1e-9 * (1.0 + b.x.abs()));

        Ok(GridSample {
            x_min,
            x_max,
            xs,
            values,
            flags,
            poles,
            energies: self.energies.clone(),
        })
    }

    /// Bisect the (k, j) superposition denominator over a sign-change
    /// bracket down to [`POLE_REFINE_TOL`].
    fn refine_denominator_zero(&self, k: usize, j: usize, mut lo: f64, mut hi: f64) -> f64 {
        let den_at = |x: f64| -> f64 {
            let tri = self.triangle(x);
            let a = tri.table[k - 2][0];
            let b = tri.table[k - 2][j - (k - 1)];
            if a.is_singular || b.is_singular {
                f64::NAN
            } else {
                a.beta - b.beta
            }
        };
        let mut flo = den_at(lo);
        while hi - lo > POLE_REFINE_TOL {
            let mid = 0.5 * (lo + hi);
            let fmid = den_at(mid);
            if !fmid.is_finite() {
                break; // bracket collapsed onto a deeper pole
            }
            if flo * fmid <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                flo = fmid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Growth probe: `|V_n| * d^2` near a genuine second-order pole stays
    /// O(1); near a removable evaluation singularity it is O(d^2).
    fn probe_true_pole(&self, x0: f64) -> bool {
        for &d in &PROBE_OFFSETS {
            let sides = [self.eval_potential(x0 + d), self.eval_potential(x0 - d)];
            let qs: Vec<f64> = sides
                .iter()
                .filter_map(|r| r.as_ref().ok().map(|v| v.abs() * d * d))
                .collect();
            if qs.is_empty() {
                continue;
            }
            let q = qs.iter().cloned().fold(f64::INFINITY, f64::min);
            if q >= PROBE_TRUE_POLE_MIN {
                return true;
            }
        }
        false
    }
}

struct Triangle {
    table: Vec<Vec<LevelValue>>,
    v_diag: Vec<f64>,
}
