//! Neighborhood configurations over a finite integer state set.
//!
//! A neighborhood configuration assigns a state to each of the 2d+1
//! directions, listed in the canonical slot order
//! (-v_d, ..., -v_1, 0, v_1, ..., v_d). Configurations with at most one
//! nonzero entry are *monomers*; configurations whose nonzero support is
//! an overlap pair are *dimers*. Both drive everything in [`crate::split`]
//! and [`crate::perturb`].

use crate::lattice::{Direction, DirectionPair};
use crate::localfn::Configuration;
use crate::{Error, Result};

/// A finite set of integer states containing 0 and at least one nonzero
/// value, kept strictly ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
pub struct StateSet {
    values: Vec<i64>,
}

impl StateSet {
    pub fn new(mut values: Vec<i64>) -> Result<StateSet> {
        values.sort_unstable();
        values.dedup();
        if !values.contains(&0) {
            return Err(Error::InvalidStateSet("must contain 0".into()));
        }
        if values.len() < 2 {
            return Err(Error::InvalidStateSet(
                "must contain at least one nonzero state".into(),
            ));
        }
        Ok(StateSet { values })
    }

    /// The contiguous set {0, 1, ..., q*}.
    pub fn contiguous(qstar: i64) -> Result<StateSet> {
        if qstar < 1 {
            return Err(Error::InvalidStateSet(
                "maximum state must be at least 1".into(),
            ));
        }
        Ok(StateSet {
            values: (0..=qstar).collect(),
        })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// The nonzero states, ascending.
    pub fn plus(&self) -> impl Iterator<Item = i64> + '_ {
        self.values.iter().copied().filter(|&q| q != 0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, q: i64) -> bool {
        self.values.binary_search(&q).is_ok()
    }

    /// Position of a state within the ascending value list.
    pub fn rank(&self, q: i64) -> Result<usize> {
        self.values
            .binary_search(&q)
            .map_err(|_| Error::InvalidState(q))
    }

    /// Position of a nonzero state within the ascending nonzero list.
    pub fn plus_rank(&self, q: i64) -> Result<usize> {
        if q == 0 {
            return Err(Error::InvalidState(0));
        }
        let r = self.rank(q)?;
        let zero = self.rank(0).expect("state sets contain 0");
        Ok(if r > zero { r - 1 } else { r })
    }

    /// `Some(q*)` when the set is exactly {0, 1, ..., q*}.
    pub fn as_contiguous_max(&self) -> Option<i64> {
        let m = *self.values.last().unwrap();
        if self.values.len() as i64 == m + 1 && self.values[0] == 0 {
            Some(m)
        } else {
            None
        }
    }

    /// Number of neighborhood configurations |Q|^(2d+1).
    pub fn config_count(&self, d: usize) -> usize {
        self.values.len().pow(2 * d as u32 + 1)
    }
}

/// States seen from one cell: entry `slot` is the state in the direction
/// with that canonical slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NeighborhoodConfig {
    states: Vec<i64>,
}

impl NeighborhoodConfig {
    pub fn new(states: Vec<i64>) -> Result<NeighborhoodConfig> {
        if states.len() < 3 || states.len() % 2 == 0 {
            return Err(Error::InvalidConfig {
                expected_len: states.len() | 1,
            });
        }
        Ok(NeighborhoodConfig { states })
    }

    pub fn dimension(&self) -> usize {
        (self.states.len() - 1) / 2
    }

    pub fn states(&self) -> &[i64] {
        &self.states
    }

    /// State in direction `v`.
    pub fn get(&self, v: Direction) -> i64 {
        self.states[v.slot(self.dimension())]
    }

    /// All entries zero.
    pub fn is_trivial(&self) -> bool {
        self.states.iter().all(|&q| q == 0)
    }

    /// At most one nonzero entry.
    pub fn is_monomer(&self) -> bool {
        self.states.iter().filter(|&&q| q != 0).count() <= 1
    }

    /// Exactly two nonzero entries whose directions form an overlap pair.
    pub fn is_dimer(&self) -> bool {
        let d = self.dimension();
        let support: Vec<Direction> = self
            .states
            .iter()
            .enumerate()
            .filter(|&(_, &q)| q != 0)
            .map(|(s, _)| Direction::from_slot(s, d))
            .collect();
        match support.as_slice() {
            [a, b] => DirectionPair::new(*a, *b).is_ok(),
            _ => false,
        }
    }

    /// All entries equal.
    pub fn is_homogeneous(&self) -> bool {
        self.states.windows(2).all(|w| w[0] == w[1])
    }
}

/// The monomer with state `q` in direction `v` and zero elsewhere.
pub fn monomer(v: Direction, q: i64, d: usize, states: &StateSet) -> Result<NeighborhoodConfig> {
    if !states.contains(q) {
        return Err(Error::InvalidState(q));
    }
    let mut s = vec![0; 2 * d + 1];
    s[v.slot(d)] = q;
    Ok(NeighborhoodConfig { states: s })
}

/// The dimer with `p` at the pair's first direction, `q` at its second,
/// and zero elsewhere. Degenerates to a monomer when `p` or `q` is zero.
pub fn dimer(
    pair: DirectionPair,
    p: i64,
    q: i64,
    d: usize,
    states: &StateSet,
) -> Result<NeighborhoodConfig> {
    if !states.contains(p) {
        return Err(Error::InvalidState(p));
    }
    if !states.contains(q) {
        return Err(Error::InvalidState(q));
    }
    let mut s = vec![0; 2 * d + 1];
    s[pair.first().slot(d)] = p;
    s[pair.second().slot(d)] = q;
    Ok(NeighborhoodConfig { states: s })
}

/// The homogeneous configuration with every entry equal to `q`.
pub fn homogeneous(q: i64, d: usize) -> NeighborhoodConfig {
    NeighborhoodConfig {
        states: vec![q; 2 * d + 1],
    }
}

/// Canonical LUT index: base-|Q| digits are state ranks, first slot most
/// significant. Bijective with [`config_at`].
pub fn index_of(config: &NeighborhoodConfig, states: &StateSet) -> Result<usize> {
    let base = states.len();
    let mut idx = 0;
    for &q in config.states() {
        idx = idx * base + states.rank(q)?;
    }
    Ok(idx)
}

/// Inverse of [`index_of`].
pub fn config_at(mut index: usize, states: &StateSet, d: usize) -> NeighborhoodConfig {
    let base = states.len();
    let len = 2 * d + 1;
    let mut digits = vec![0; len];
    for slot in (0..len).rev() {
        digits[slot] = states.values()[index % base];
        index /= base;
    }
    NeighborhoodConfig { states: digits }
}

/// The neighborhood configuration of cell `i` (a flat index) in `x`.
pub fn extract(x: &Configuration, i: usize) -> NeighborhoodConfig {
    let g = x.geometry();
    let d = g.dimension();
    let dirs = crate::lattice::directions(d).expect("dimension is valid");
    let states = dirs
        .iter()
        .map(|&v| x.cells()[g.neighbor_index(i, v)])
        .collect();
    NeighborhoodConfig { states }
}
