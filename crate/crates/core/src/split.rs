//! Split functions: local functions where each state redistributes itself
//! over the neighborhood by a fixed per-state recipe, independent of the
//! neighboring states.
//!
//! A split function is determined by its recipes: for every nonzero state
//! q, a (2d+1)-tuple of values from the state set summing to q (the values
//! taken on the monomers of q, in canonical slot order). Its value on any
//! configuration is the sum of the recipe contributions of the 2d+1
//! observed states. Every split function conserves the cell-state sum.

use crate::lattice::Direction;
use crate::localfn::LocalFunction;
use crate::neighborhood::StateSet;
use crate::{Error, Result};

/// All tuples of the given length over `states` that sum to `target`, in
/// ascending lexicographic order.
pub fn compositions(target: i64, parts: usize, states: &StateSet) -> Vec<Vec<i64>> {
    let values = states.values();
    let min = *values.first().unwrap();
    let max = *values.last().unwrap();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(parts);
    fn rec(
        values: &[i64],
        min: i64,
        max: i64,
        remaining: i64,
        slots_left: usize,
        current: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if slots_left == 0 {
            if remaining == 0 {
                out.push(current.clone());
            }
            return;
        }
        let slots = (slots_left - 1) as i64;
        for &v in values {
            let rest = remaining - v;
            if rest < slots * min || rest > slots * max {
                continue;
            }
            current.push(v);
            rec(values, min, max, rest, slots_left - 1, current, out);
            current.pop();
        }
    }
    rec(values, min, max, target, parts, &mut current, &mut out);
    out
}

/// Exact binomial coefficient.
fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// How many split functions exist for dimension `d` over `states`.
///
/// For the contiguous set {0..q*} this is the closed-form product of
/// binomials C(2d+q, q); otherwise the per-state composition counts are
/// multiplied directly.
pub fn count_splits(d: usize, states: &StateSet) -> Result<u128> {
    if d < 1 {
        return Err(Error::InvalidDimension);
    }
    if let Some(qstar) = states.as_contiguous_max() {
        let mut total: u128 = 1;
        for q in 1..=qstar as u64 {
            total *= binomial(2 * d as u64 + q, q);
        }
        return Ok(total);
    }
    let mut total: u128 = 1;
    for q in states.plus() {
        total *= compositions(q, 2 * d + 1, states).len() as u128;
    }
    Ok(total)
}

/// A split function, stored as one recipe per nonzero state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitFunction {
    d: usize,
    states: StateSet,
    /// `recipes[k][slot]` is the value on the monomer of the k-th nonzero
    /// state in the direction with that canonical slot. The recipe for
    /// state 0 is implicitly all zeros.
    recipes: Vec<Vec<i64>>,
}

impl SplitFunction {
    /// Validates the recipe conditions: every entry in the state set, and
    /// the entries for state q summing to q.
    pub fn new(d: usize, states: StateSet, recipes: Vec<Vec<i64>>) -> Result<SplitFunction> {
        if d < 1 {
            return Err(Error::InvalidDimension);
        }
        let plus: Vec<i64> = states.plus().collect();
        if recipes.len() != plus.len() {
            return Err(Error::Unsupported(format!(
                "expected {} recipes, got {}",
                plus.len(),
                recipes.len()
            )));
        }
        for (&q, recipe) in plus.iter().zip(&recipes) {
            if recipe.len() != 2 * d + 1 {
                return Err(Error::Unsupported(format!(
                    "recipe for state {q} has {} slots, expected {}",
                    recipe.len(),
                    2 * d + 1
                )));
            }
            for &v in recipe {
                if !states.contains(v) {
                    return Err(Error::InvalidState(v));
                }
            }
            let sum: i64 = recipe.iter().sum();
            if sum != q {
                return Err(Error::Unsupported(format!(
                    "recipe for state {q} sums to {sum}"
                )));
            }
        }
        Ok(SplitFunction { d, states, recipes })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn states(&self) -> &StateSet {
        &self.states
    }

    pub fn recipes(&self) -> &[Vec<i64>] {
        &self.recipes
    }

    /// Value on the monomer with state `q` in direction `v`.
    pub fn monomer_value(&self, v: Direction, q: i64) -> Result<i64> {
        if q == 0 {
            return Ok(0);
        }
        let k = self.states.plus_rank(q)?;
        Ok(self.recipes[k][v.slot(self.d)])
    }

    /// Value on an arbitrary configuration: the sum of the recipe entries
    /// selected by each observed state.
    pub fn eval(&self, config: &crate::neighborhood::NeighborhoodConfig) -> Result<i64> {
        if config.dimension() != self.d {
            return Err(Error::InvalidConfig {
                expected_len: 2 * self.d + 1,
            });
        }
        let mut total = 0;
        for (slot, &q) in config.states().iter().enumerate() {
            if q != 0 {
                let k = self.states.plus_rank(q)?;
                total += self.recipes[k][slot];
            }
        }
        Ok(total)
    }

    /// Dense LUT of this split function. The result need not be a rule:
    /// contributions landing on one cell can sum outside the state set.
    pub fn to_lut(&self) -> LocalFunction {
        let states = self.states.clone();
        LocalFunction::tabulate(self.d, states, |n| {
            self.eval(n).expect("tabulated configs are valid")
        })
        .expect("split LUT has the right length")
    }

    /// Per-state digit strings in canonical slot order, for the
    /// three-state set {0, 1, 2} (recipe entries are single digits there).
    pub fn label(&self) -> Result<(String, String)> {
        if self.states.as_contiguous_max() != Some(2) {
            return Err(Error::Unsupported(
                "split labels are defined for the state set {0, 1, 2}".into(),
            ));
        }
        let render = |recipe: &[i64]| recipe.iter().map(|&v| v.to_string()).collect::<String>();
        Ok((render(&self.recipes[0]), render(&self.recipes[1])))
    }
}

/// All split functions for (d, states), lexicographic over recipe tuples
/// with the smallest nonzero state most significant.
pub fn enumerate_splits(d: usize, states: &StateSet) -> Result<Vec<SplitFunction>> {
    if d < 1 {
        return Err(Error::InvalidDimension);
    }
    let per_state: Vec<Vec<Vec<i64>>> = states
        .plus()
        .map(|q| compositions(q, 2 * d + 1, states))
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; per_state.len()];
    'outer: loop {
        let recipes: Vec<Vec<i64>> = choice
            .iter()
            .zip(&per_state)
            .map(|(&c, opts)| opts[c].clone())
            .collect();
        out.push(SplitFunction {
            d,
            states: states.clone(),
            recipes,
        });
        // Odometer with the last state fastest.
        for k in (0..choice.len()).rev() {
            choice[k] += 1;
            if choice[k] < per_state[k].len() {
                continue 'outer;
            }
            choice[k] = 0;
        }
        break;
    }
    Ok(out)
}
