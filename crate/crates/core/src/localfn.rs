//! Local functions as dense integer lookup tables, and their global
//! action on torus configurations.
//!
//! A *local function* maps every neighborhood configuration to an integer;
//! it is a *local rule* when every value stays inside the state set. Split
//! functions and perturbations routinely leave the state set, so the table
//! holds arbitrary integers and the rule property is tracked as a flag.

use crate::lattice::{directions, Direction, GridGeometry};
use crate::neighborhood::{self, homogeneous, index_of, monomer, NeighborhoodConfig, StateSet};
use crate::{Error, Result};
use num_rational::Rational64;

/// A local function over dimension `d` and state set `Q`, tabulated on
/// all |Q|^(2d+1) neighborhood configurations in canonical index order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalFunction {
    d: usize,
    states: StateSet,
    table: Vec<i64>,
    is_rule: bool,
}

impl LocalFunction {
    pub fn from_table(d: usize, states: StateSet, table: Vec<i64>) -> Result<LocalFunction> {
        if d < 1 {
            return Err(Error::InvalidDimension);
        }
        let expected = states.config_count(d);
        if table.len() != expected {
            return Err(Error::TableLength {
                got: table.len(),
                expected,
            });
        }
        let is_rule = table.iter().all(|&v| states.contains(v));
        Ok(LocalFunction {
            d,
            states,
            table,
            is_rule,
        })
    }

    /// Builds the table by evaluating `f` on every configuration.
    pub fn tabulate(
        d: usize,
        states: StateSet,
        mut f: impl FnMut(&NeighborhoodConfig) -> i64,
    ) -> Result<LocalFunction> {
        let table = (0..states.config_count(d))
            .map(|idx| f(&neighborhood::config_at(idx, &states, d)))
            .collect();
        LocalFunction::from_table(d, states, table)
    }

    /// The rule that keeps every cell unchanged.
    pub fn identity(d: usize, states: StateSet) -> LocalFunction {
        LocalFunction::tabulate(d, states, |n| n.get(Direction::Zero))
            .expect("identity tabulates over valid inputs")
    }

    /// The rule that moves every state one cell along `v`: the new center
    /// state is the one currently seen in direction -v.
    pub fn shift_toward(d: usize, states: StateSet, v: Direction) -> LocalFunction {
        LocalFunction::tabulate(d, states, |n| n.get(v.opposite()))
            .expect("shift tabulates over valid inputs")
    }

    /// The binary traffic rule along `v`: a particle advances one cell
    /// along `v` when that cell is empty, and stays put otherwise.
    pub fn traffic_toward(d: usize, v: Direction) -> LocalFunction {
        let states = StateSet::contiguous(1).expect("binary state set");
        LocalFunction::tabulate(d, states, |n| {
            let stays = n.get(Direction::Zero) == 1 && n.get(v) == 1;
            let arrives = n.get(v.opposite()) == 1 && n.get(Direction::Zero) == 0;
            i64::from(stays || arrives)
        })
        .expect("traffic tabulates over valid inputs")
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn states(&self) -> &StateSet {
        &self.states
    }

    pub fn table(&self) -> &[i64] {
        &self.table
    }

    /// True when every table value lies in the state set.
    pub fn is_rule(&self) -> bool {
        self.is_rule
    }

    /// Value on the configuration with the given canonical index.
    pub fn eval_index(&self, index: usize) -> i64 {
        self.table[index]
    }

    /// Value on a neighborhood configuration.
    pub fn eval(&self, config: &NeighborhoodConfig) -> Result<i64> {
        if config.dimension() != self.d {
            return Err(Error::InvalidConfig {
                expected_len: 2 * self.d + 1,
            });
        }
        Ok(self.table[index_of(config, &self.states)?])
    }

    /// Entrywise sum of two tables over the same domain.
    pub fn add(&self, other: &LocalFunction) -> Result<LocalFunction> {
        if self.d != other.d || self.states != other.states {
            return Err(Error::Unsupported(
                "cannot add local functions over different domains".into(),
            ));
        }
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(&a, &b)| a + b)
            .collect();
        LocalFunction::from_table(self.d, self.states.clone(), table)
    }

    /// Entrywise difference of two tables over the same domain.
    pub fn sub(&self, other: &LocalFunction) -> Result<LocalFunction> {
        if self.d != other.d || self.states != other.states {
            return Err(Error::Unsupported(
                "cannot subtract local functions over different domains".into(),
            ));
        }
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(&a, &b)| a - b)
            .collect();
        LocalFunction::from_table(self.d, self.states.clone(), table)
    }
}

/// A full assignment of integer cell values on a torus. Members of the
/// configuration space X take values in the state set; images under
/// non-rule local functions may not.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Configuration {
    geometry: GridGeometry,
    cells: Vec<i64>,
}

impl Configuration {
    pub fn new(geometry: GridGeometry, cells: Vec<i64>) -> Result<Configuration> {
        if cells.len() != geometry.cell_count() {
            return Err(Error::TableLength {
                got: cells.len(),
                expected: geometry.cell_count(),
            });
        }
        Ok(Configuration { geometry, cells })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    /// True when every cell value lies in `states`.
    pub fn in_state_set(&self, states: &StateSet) -> bool {
        self.cells.iter().all(|&q| states.contains(q))
    }
}

/// Sum of all cell states.
pub fn sigma(x: &Configuration) -> i64 {
    x.cells.iter().sum()
}

/// Density: sigma divided by the cell count, as an exact rational.
pub fn rho(x: &Configuration) -> Rational64 {
    Rational64::new(sigma(x), x.geometry.cell_count() as i64)
}

/// Applies the global function induced by `f`: output cell i is the value
/// of `f` on the neighborhood of i. The output may leave the state set
/// when `f` is not a rule.
pub fn apply_global(f: &LocalFunction, x: &Configuration) -> Result<Configuration> {
    let table = x.geometry.neighbor_table();
    apply_global_with_table(f, x, &table)
}

/// [`apply_global`] with a precomputed neighbor table, for callers that
/// apply many functions or configurations on one geometry.
pub fn apply_global_with_table(
    f: &LocalFunction,
    x: &Configuration,
    neighbor_table: &[usize],
) -> Result<Configuration> {
    let d = x.geometry.dimension();
    if d != f.d {
        return Err(Error::InvalidConfig {
            expected_len: 2 * f.d + 1,
        });
    }
    let width = 2 * d + 1;
    let base = f.states.len();
    // Cell states as ranks; fails when x is not over f's state set.
    let mut ranks = Vec::with_capacity(x.cells.len());
    for &q in &x.cells {
        ranks.push(f.states.rank(q)?);
    }
    let mut out = Vec::with_capacity(x.cells.len());
    for i in 0..x.cells.len() {
        let row = &neighbor_table[i * width..(i + 1) * width];
        let mut idx = 0;
        for &j in row {
            idx = idx * base + ranks[j];
        }
        out.push(f.table[idx]);
    }
    Configuration::new(x.geometry.clone(), out)
}

/// A failed necessary condition for number conservation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NecessaryViolation {
    /// The monomer values for state `q` sum to `sum` instead of `q`.
    MonomerSum { q: i64, sum: i64 },
    /// `f` maps the homogeneous configuration of `q` to `value` != q.
    Quiescence { q: i64, value: i64 },
}

/// Checks the two necessary conditions every number-conserving function
/// satisfies: monomer values for each state sum to the state, and every
/// state is quiescent. Violations are reported values, not errors.
pub fn check_necessary(f: &LocalFunction) -> std::result::Result<(), NecessaryViolation> {
    let d = f.dimension();
    let states = f.states();
    let dirs = directions(d).expect("dimension is valid");
    for &q in states.values() {
        let sum: i64 = dirs
            .iter()
            .map(|&v| {
                let m = monomer(v, q, d, states).expect("q is in the state set");
                f.eval(&m).expect("monomer is a valid configuration")
            })
            .sum();
        if sum != q {
            return Err(NecessaryViolation::MonomerSum { q, sum });
        }
    }
    for &q in states.values() {
        let value = f
            .eval(&homogeneous(q, d))
            .expect("homogeneous config is valid");
        if value != q {
            return Err(NecessaryViolation::Quiescence { q, value });
        }
    }
    Ok(())
}

/// The 8-bit elementary-CA code of a one-dimensional binary rule: bit
/// (4l + 2c + r) holds the value on the neighborhood (l, c, r).
pub fn wolfram_code(f: &LocalFunction) -> Result<u32> {
    if f.dimension() != 1 || f.states().as_contiguous_max() != Some(1) {
        return Err(Error::Unsupported(
            "Wolfram codes apply to one-dimensional binary rules only".into(),
        ));
    }
    if !f.is_rule() {
        return Err(Error::Unsupported(
            "Wolfram codes apply to rules only".into(),
        ));
    }
    let mut code = 0;
    for (idx, &v) in f.table().iter().enumerate() {
        code |= (v as u32) << idx;
    }
    Ok(code)
}

/// The one-dimensional binary rule with the given elementary-CA code.
pub fn from_wolfram_code(code: u8) -> LocalFunction {
    let states = StateSet::contiguous(1).expect("binary state set");
    let table = (0..8).map(|idx| i64::from((code >> idx) & 1)).collect();
    LocalFunction::from_table(1, states, table).expect("8 entries for d=1, |Q|=2")
}
