//! Brute-force verification of sum conservation by direct global
//! application, independent of the decomposition machinery.
//!
//! Three regimes: exhaustive over the whole configuration space (small
//! tori only), exhaustive over configurations supported inside a cubic
//! window (a necessary-condition battery for larger spaces), and seeded
//! random sampling. Exhaustive regimes refuse to start when the space
//! exceeds the configured budget.

use crate::lattice::GridGeometry;
use crate::localfn::{sigma, Configuration, LocalFunction};
use crate::{Error, Result};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Default ceiling on the number of configurations an exhaustive
/// verification may enumerate.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Identifier of the sampling generator, recorded in reports: cell state
/// ranks are drawn as `next_u32() % |Q|` from a ChaCha8 stream seeded
/// with `seed_from_u64`.
pub const RNG_ALGORITHM: &str = "chacha8/mod";

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Exhaustive,
    Window,
    Sampled,
}

/// A conservation counterexample: a configuration whose image sum
/// differs from its own.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ConservationWitness {
    pub config: Configuration,
    pub sigma_before: i64,
    pub sigma_after: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyOutcome {
    Pass,
    Fail(ConservationWitness),
}

/// What a verification run did and found.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct VerificationReport {
    pub mode: VerifyMode,
    pub configs_checked: u64,
    pub outcome: VerifyOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng: Option<&'static str>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, VerifyOutcome::Pass)
    }
}

/// Verification driver holding the exhaustive-enumeration budget.
#[derive(Debug, Clone, Copy)]
pub struct Verifier {
    budget: u64,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier::new()
    }
}

/// Shared inner loop: walks configurations produced by a rank odometer
/// over `free_cells` (every other cell stays zero-state), comparing input
/// and output sums. Scanning ascending means a reported witness is the
/// lowest failing configuration in odometer order.
struct SweepState {
    ranks: Vec<usize>,
    values: Vec<i64>,
    sigma_in: i64,
}

fn sweep(
    f: &LocalFunction,
    geometry: &GridGeometry,
    free_cells: &[usize],
    mode: VerifyMode,
) -> VerificationReport {
    let states = f.states();
    let base = states.len();
    let zero_rank = states.rank(0).expect("state sets contain 0");
    let cell_count = geometry.cell_count();
    let width = 2 * geometry.dimension() + 1;
    let table = geometry.neighbor_table();
    let value_of: Vec<i64> = states.values().to_vec();

    let mut st = SweepState {
        ranks: vec![zero_rank; cell_count],
        values: vec![0; cell_count],
        sigma_in: 0,
    };
    // Odometer digit per free cell, starting all zero.
    let mut digits = vec![0usize; free_cells.len()];
    for &c in free_cells {
        st.ranks[c] = 0;
        st.values[c] = value_of[0];
        st.sigma_in += value_of[0];
    }

    let mut checked = 0u64;
    loop {
        checked += 1;
        let mut sigma_out = 0i64;
        for i in 0..cell_count {
            let row = &table[i * width..(i + 1) * width];
            let mut idx = 0usize;
            for &j in row {
                idx = idx * base + st.ranks[j];
            }
            sigma_out += f.table()[idx];
        }
        if sigma_out != st.sigma_in {
            let config = Configuration::new(geometry.clone(), st.values.clone())
                .expect("sweep values match the geometry");
            return VerificationReport {
                mode,
                configs_checked: checked,
                outcome: VerifyOutcome::Fail(ConservationWitness {
                    config,
                    sigma_before: st.sigma_in,
                    sigma_after: sigma_out,
                }),
                seed: None,
                rng: None,
            };
        }
        // Advance the odometer, last free cell fastest.
        let mut pos = free_cells.len();
        loop {
            if pos == 0 {
                return VerificationReport {
                    mode,
                    configs_checked: checked,
                    outcome: VerifyOutcome::Pass,
                    seed: None,
                    rng: None,
                };
            }
            pos -= 1;
            let cell = free_cells[pos];
            st.sigma_in -= st.values[cell];
            digits[pos] += 1;
            if digits[pos] < base {
                st.ranks[cell] = digits[pos];
                st.values[cell] = value_of[digits[pos]];
                st.sigma_in += st.values[cell];
                break;
            }
            digits[pos] = 0;
            st.ranks[cell] = 0;
            st.values[cell] = value_of[0];
            st.sigma_in += st.values[cell];
        }
    }
}

impl Verifier {
    pub fn new() -> Verifier {
        Verifier {
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(budget: u64) -> Verifier {
        Verifier { budget }
    }

    fn check_budget(&self, base: usize, cells: usize) -> Result<()> {
        let mut needed: u128 = 1;
        for _ in 0..cells {
            needed = needed.saturating_mul(base as u128);
            if needed > self.budget as u128 {
                return Err(Error::BudgetExceeded {
                    needed: (base as u128).saturating_pow(cells as u32),
                    budget: self.budget,
                });
            }
        }
        Ok(())
    }

    /// Checks sum conservation on every configuration of the torus.
    pub fn exhaustive(
        &self,
        f: &LocalFunction,
        geometry: &GridGeometry,
    ) -> Result<VerificationReport> {
        if geometry.dimension() != f.dimension() {
            return Err(Error::InvalidConfig {
                expected_len: 2 * f.dimension() + 1,
            });
        }
        self.check_budget(f.states().len(), geometry.cell_count())?;
        let free: Vec<usize> = (0..geometry.cell_count()).collect();
        Ok(sweep(f, geometry, &free, VerifyMode::Exhaustive))
    }

    /// Checks sum conservation on every configuration supported inside
    /// the cubic window of side 2·radius+1 anchored at the origin (zero
    /// outside). A necessary-condition battery, not a full decision.
    pub fn window(
        &self,
        f: &LocalFunction,
        geometry: &GridGeometry,
        radius: usize,
    ) -> Result<VerificationReport> {
        if geometry.dimension() != f.dimension() {
            return Err(Error::InvalidConfig {
                expected_len: 2 * f.dimension() + 1,
            });
        }
        let side = 2 * radius + 1;
        if geometry.sides().iter().any(|&n| n < side) {
            return Err(Error::Unsupported(format!(
                "window of side {side} does not fit the torus"
            )));
        }
        let d = geometry.dimension();
        let mut window_cells = Vec::new();
        for i in 0..geometry.cell_count() {
            let coords = geometry.coords_of(i);
            if coords.iter().all(|&c| c < side) {
                window_cells.push(i);
            }
        }
        debug_assert_eq!(window_cells.len(), side.pow(d as u32));
        self.check_budget(f.states().len(), window_cells.len())?;
        Ok(sweep(f, geometry, &window_cells, VerifyMode::Window))
    }

    /// Checks sum conservation on seeded uniform random configurations.
    /// Identical (seed, trials, geometry, states) give identical reports.
    pub fn sampled(
        &self,
        f: &LocalFunction,
        geometry: &GridGeometry,
        trials: u64,
        seed: u64,
    ) -> Result<VerificationReport> {
        if geometry.dimension() != f.dimension() {
            return Err(Error::InvalidConfig {
                expected_len: 2 * f.dimension() + 1,
            });
        }
        if trials == 0 {
            return Err(Error::Unsupported("at least one trial required".into()));
        }
        let states = f.states();
        let base = states.len();
        let value_of: Vec<i64> = states.values().to_vec();
        let cell_count = geometry.cell_count();
        let width = 2 * geometry.dimension() + 1;
        let table = geometry.neighbor_table();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut ranks = vec![0usize; cell_count];
        for trial in 0..trials {
            let mut sigma_in = 0i64;
            for r in ranks.iter_mut() {
                *r = (rng.next_u32() as usize) % base;
                sigma_in += value_of[*r];
            }
            let mut sigma_out = 0i64;
            for i in 0..cell_count {
                let row = &table[i * width..(i + 1) * width];
                let mut idx = 0usize;
                for &j in row {
                    idx = idx * base + ranks[j];
                }
                sigma_out += f.table()[idx];
            }
            if sigma_out != sigma_in {
                let values: Vec<i64> = ranks.iter().map(|&r| value_of[r]).collect();
                let config = Configuration::new(geometry.clone(), values)
                    .expect("sampled values match the geometry");
                return Ok(VerificationReport {
                    mode: VerifyMode::Sampled,
                    configs_checked: trial + 1,
                    outcome: VerifyOutcome::Fail(ConservationWitness {
                        config,
                        sigma_before: sigma_in,
                        sigma_after: sigma_out,
                    }),
                    seed: Some(seed),
                    rng: Some(RNG_ALGORITHM),
                });
            }
        }
        Ok(VerificationReport {
            mode: VerifyMode::Sampled,
            configs_checked: trials,
            outcome: VerifyOutcome::Pass,
            seed: Some(seed),
            rng: Some(RNG_ALGORITHM),
        })
    }
}

/// Iterates a rule from `x0`, recording each configuration with its sum.
/// The result holds `steps + 1` entries starting at `x0`.
pub fn run_trajectory(
    f: &LocalFunction,
    x0: &Configuration,
    steps: usize,
) -> Result<Vec<(Configuration, i64)>> {
    if !f.is_rule() {
        let (index, &value) = f
            .table()
            .iter()
            .enumerate()
            .find(|(_, &v)| !f.states().contains(v))
            .expect("non-rule has an offending entry");
        return Err(Error::NotARule { index, value });
    }
    if !x0.in_state_set(f.states()) {
        let bad = *x0
            .cells()
            .iter()
            .find(|&&q| !f.states().contains(q))
            .expect("offending cell exists");
        return Err(Error::InvalidState(bad));
    }
    let table = x0.geometry().neighbor_table();
    let mut out = Vec::with_capacity(steps + 1);
    let mut current = x0.clone();
    out.push((current.clone(), sigma(&current)));
    for _ in 0..steps {
        current = crate::localfn::apply_global_with_table(f, &current, &table)?;
        out.push((current.clone(), sigma(&current)));
    }
    Ok(out)
}
