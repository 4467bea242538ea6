//! The perturbation space: local functions that vanish on monomers and
//! whose global image sums to zero on every configuration.
//!
//! A perturbation is determined by its values on the dimers of a chosen
//! pair selection Λ (one representative per matching class): its value on
//! matching dimers is the negation, and its value on any configuration N
//! expands over Λ as
//!
//! ```text
//! g(N) = Σ_{u,w} [ g(D[u: N(u), w: N(w)]) − g(D[u: N(-w), w: N(-u)]) ]
//! ```
//!
//! where dimers with a zero state degenerate to monomers and contribute
//! nothing. The space is linear with one basis element per (Λ-pair, p, q)
//! over nonzero states p, q, so its dimension is d²·|Q₊|².

use crate::lattice::{DirectionPair, PairCatalog};
use crate::localfn::LocalFunction;
use crate::neighborhood::{dimer, index_of, StateSet};
use crate::{Error, Result};

/// Dimension of the perturbation space: d² · |Q₊|².
pub fn pert_dim(d: usize, states: &StateSet) -> usize {
    let np = states.len() - 1;
    d * d * np * np
}

/// One (Λ-pair, nonzero p, nonzero q) coefficient slot per basis element,
/// in flat order: pair-major, then p, then q.
pub fn coeff_keys(catalog: &PairCatalog, states: &StateSet) -> Vec<(DirectionPair, i64, i64)> {
    let mut keys = Vec::new();
    for &pair in catalog.lambda() {
        for p in states.plus() {
            for q in states.plus() {
                keys.push((pair, p, q));
            }
        }
    }
    keys
}

/// A perturbation, stored as its coefficient vector over the catalog's Λ.
///
/// `coeffs[flat(pair, p, q)]` is the value on the dimer with `p` at the
/// pair's first direction and `q` at its second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perturbation {
    catalog: PairCatalog,
    states: StateSet,
    coeffs: Vec<i64>,
}

impl Perturbation {
    pub fn new(catalog: PairCatalog, states: StateSet, coeffs: Vec<i64>) -> Result<Perturbation> {
        let expected = pert_dim(catalog.dimension(), &states);
        if coeffs.len() != expected {
            return Err(Error::TableLength {
                got: coeffs.len(),
                expected,
            });
        }
        Ok(Perturbation {
            catalog,
            states,
            coeffs,
        })
    }

    /// The zero perturbation.
    pub fn zero(catalog: PairCatalog, states: StateSet) -> Perturbation {
        let n = pert_dim(catalog.dimension(), &states);
        Perturbation {
            catalog,
            states,
            coeffs: vec![0; n],
        }
    }

    /// Reads the coefficients of an alleged perturbation off a dense LUT:
    /// the values at the catalog's Λ-dimers. The caller is responsible for
    /// `lut` actually being a perturbation; this only samples it.
    pub fn read_from(lut: &LocalFunction, catalog: PairCatalog) -> Result<Perturbation> {
        let states = lut.states().clone();
        let d = catalog.dimension();
        if lut.dimension() != d {
            return Err(Error::InvalidConfig {
                expected_len: 2 * d + 1,
            });
        }
        let mut coeffs = Vec::with_capacity(pert_dim(d, &states));
        for (pair, p, q) in coeff_keys(&catalog, &states) {
            let config = dimer(pair, p, q, d, &states)?;
            coeffs.push(lut.eval_index(index_of(&config, &states)?));
        }
        Perturbation::new(catalog, states, coeffs)
    }

    pub fn catalog(&self) -> &PairCatalog {
        &self.catalog
    }

    pub fn states(&self) -> &StateSet {
        &self.states
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn dimension(&self) -> usize {
        self.catalog.dimension()
    }

    fn flat(&self, lambda_idx: usize, p: i64, q: i64) -> Result<usize> {
        let np = self.states.len() - 1;
        let pi = self.states.plus_rank(p)?;
        let qi = self.states.plus_rank(q)?;
        Ok((lambda_idx * np + pi) * np + qi)
    }

    /// Value on the dimer with `p` at `pair.first()` and `q` at
    /// `pair.second()`, for any pair in Ω: a direct coefficient for Λ
    /// pairs, the negated matching coefficient otherwise, and zero when
    /// either state is zero (monomer case).
    pub fn dimer_value(&self, pair: DirectionPair, p: i64, q: i64) -> Result<i64> {
        if !self.states.contains(p) {
            return Err(Error::InvalidState(p));
        }
        if !self.states.contains(q) {
            return Err(Error::InvalidState(q));
        }
        if p == 0 || q == 0 {
            return Ok(0);
        }
        if let Some(l) = self.catalog.lambda_index(pair) {
            return Ok(self.coeffs[self.flat(l, p, q)?]);
        }
        // The matching dimer of D[u:p, w:q] is D[-w:p, -u:q]; map its
        // states onto the stored orientation of the matching pair.
        let m = pair.matching();
        let l = self
            .catalog
            .lambda_index(m)
            .expect("one of each matching class is in lambda");
        let (mp, mq) = if m.first() == pair.second().opposite() {
            (p, q)
        } else {
            (q, p)
        };
        Ok(-self.coeffs[self.flat(l, mp, mq)?])
    }

    /// Value on an arbitrary neighborhood configuration via the Λ
    /// expansion; zero on all monomers by construction.
    pub fn eval(&self, config: &crate::neighborhood::NeighborhoodConfig) -> Result<i64> {
        let d = self.dimension();
        if config.dimension() != d {
            return Err(Error::InvalidConfig {
                expected_len: 2 * d + 1,
            });
        }
        let mut total = 0;
        for (l, &pair) in self.catalog.lambda().iter().enumerate() {
            let (u, w) = (pair.first(), pair.second());
            let (a, b) = (config.get(u), config.get(w));
            if a != 0 && b != 0 {
                total += self.coeffs[self.flat(l, a, b)?];
            }
            let (a, b) = (config.get(w.opposite()), config.get(u.opposite()));
            if a != 0 && b != 0 {
                total -= self.coeffs[self.flat(l, a, b)?];
            }
        }
        Ok(total)
    }

    /// Dense LUT of this perturbation (generally not a rule: values may be
    /// negative).
    pub fn to_lut(&self) -> LocalFunction {
        LocalFunction::tabulate(self.dimension(), self.states.clone(), |n| {
            self.eval(n).expect("tabulated configs are valid")
        })
        .expect("perturbation LUT has the right length")
    }

    /// Integer linear combination with another perturbation over the same
    /// catalog and states.
    pub fn combine(&self, alpha: i64, other: &Perturbation, beta: i64) -> Result<Perturbation> {
        if self.catalog != other.catalog || self.states != other.states {
            return Err(Error::Unsupported(
                "cannot combine perturbations over different catalogs".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| alpha * a + beta * b)
            .collect();
        Perturbation::new(self.catalog.clone(), self.states.clone(), coeffs)
    }
}

/// The standard basis: one perturbation per (Λ-pair, p, q) taking value 1
/// on its own dimer and 0 on the other Λ-dimers, in flat coefficient
/// order.
pub fn basis(d: usize, states: &StateSet) -> Result<Vec<Perturbation>> {
    let catalog = PairCatalog::canonical(d)?;
    let n = pert_dim(d, states);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut coeffs = vec![0; n];
        coeffs[k] = 1;
        out.push(Perturbation::new(catalog.clone(), states.clone(), coeffs)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Direction, DirectionPair};
    use crate::neighborhood::{config_at, monomer, NeighborhoodConfig};

    fn binary() -> StateSet {
        StateSet::contiguous(1).unwrap()
    }

    fn q3() -> StateSet {
        StateSet::contiguous(2).unwrap()
    }

    #[test]
    fn dimensions() {
        let table = [
            (1, 1, 1),
            (2, 1, 4),
            (3, 1, 9),
            (4, 1, 16),
            (1, 2, 4),
            (2, 2, 16),
            (3, 2, 36),
            (4, 2, 64),
            (1, 3, 9),
            (2, 3, 36),
            (3, 3, 81),
            (4, 3, 144),
        ];
        for (d, qstar, expected) in table {
            let states = StateSet::contiguous(qstar).unwrap();
            assert_eq!(pert_dim(d, &states), expected);
            assert_eq!(basis(d, &states).unwrap().len(), expected);
        }
    }

    #[test]
    fn one_dimensional_binary_basis_lut() {
        let b = basis(1, &binary()).unwrap();
        assert_eq!(b.len(), 1);
        // +1 on 011 (index 3), -1 on the matching dimer 110 (index 6).
        let lut = b[0].to_lut();
        let mut expected = vec![0i64; 8];
        expected[3] = 1;
        expected[6] = -1;
        assert_eq!(lut.table(), &expected[..]);
    }

    #[test]
    fn one_dimensional_three_state_basis_luts() {
        // Base-3 row indices of the nonzero values of each basis element,
        // with the dimers ordered 011, 012, 021, 022.
        let b = basis(1, &q3()).unwrap();
        assert_eq!(b.len(), 4);
        let expect = [
            vec![(4, 1), (12, -1), (14, -1), (22, 1)],
            vec![(5, 1), (14, 1), (15, -1), (16, -1), (17, -1), (23, 1)],
            vec![(7, 1), (16, 1), (21, -1), (22, -1), (23, -1), (25, 1)],
            vec![(8, 1), (17, 1), (24, -1), (25, -1)],
        ];
        for (g, pattern) in b.iter().zip(expect) {
            let lut = g.to_lut();
            let mut want = vec![0i64; 27];
            for (idx, v) in pattern {
                want[idx] = v;
            }
            assert_eq!(lut.table(), &want[..]);
        }
    }

    #[test]
    fn general_one_dimensional_three_state_lut() {
        // Coefficients (a, b, c, d) on the dimers 011, 012, 021, 022.
        let (a, b, c, d) = (1i64, 2, 3, 4);
        let catalog = PairCatalog::canonical(1).unwrap();
        let g = Perturbation::new(catalog, q3(), vec![a, b, c, d]).unwrap();
        let lut = g.to_lut();
        let mut want = vec![0i64; 27];
        want[4] = a;
        want[5] = b;
        want[7] = c;
        want[8] = d;
        want[12] = -a;
        want[14] = -a + b;
        want[15] = -b;
        want[16] = -b + c;
        want[17] = -b + d;
        want[21] = -c;
        want[22] = a - c;
        want[23] = b - c;
        want[24] = -d;
        want[25] = c - d;
        assert_eq!(lut.table(), &want[..]);

        // Named spot values.
        let n112 = NeighborhoodConfig::new(vec![1, 1, 2]).unwrap();
        assert_eq!(g.eval(&n112).unwrap(), -a + b);
    }

    #[test]
    fn two_dimensional_binary_basis_luts() {
        // Full basis columns, written row by row in the planar reading
        // (top q1; left q2; center q3; right q4; bottom q5) with row index
        // q1*16 + q2*8 + q3*4 + q4*2 + q5. Canonical slots are
        // (-v2, -v1, 0, v1, v2) = (q5, q2, q3, q4, q1).
        #[rustfmt::skip]
        let planar_columns: [[i64; 32]; 4] = [
            // g1: pair {0, v1}
            [0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, -1, 0, 0,
             0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, -1, 0, 0],
            // g2: pair {0, v2}
            [0, 0, 0, 0, 0, -1, 0, -1, 0, 0, 0, 0, 0, -1, 0, -1,
             0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0],
            // g3: pair {v1, v2}
            [0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, -1, 0, -1, 0, -1,
             0, 0, 1, 1, 0, 0, 1, 1, 0, -1, 1, 0, 0, -1, 1, 0],
            // g4: pair {v1, -v2}
            [0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1,
             0, 0, 0, 1, 0, 0, 0, 1, -1, -1, -1, 0, -1, -1, -1, 0],
        ];
        let b = basis(2, &binary()).unwrap();
        assert_eq!(b.len(), 4);
        for (g, planar) in b.iter().zip(planar_columns) {
            let lut = g.to_lut();
            for row in 0..32 {
                let (q1, q2, q3, q4, q5) = (
                    row >> 4 & 1,
                    row >> 3 & 1,
                    row >> 2 & 1,
                    row >> 1 & 1,
                    row & 1,
                );
                let canonical = (((q5 * 2 + q2) * 2 + q3) * 2 + q4) * 2 + q1;
                assert_eq!(lut.eval_index(canonical), planar[row], "row {row}");
            }
        }
    }

    #[test]
    fn vanishes_on_monomers() {
        for d in 1..=2 {
            for g in basis(d, &q3()).unwrap() {
                for v in crate::lattice::directions(d).unwrap() {
                    for q in 0..=2 {
                        let m = monomer(v, q, d, &q3()).unwrap();
                        assert_eq!(g.eval(&m).unwrap(), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn matching_dimer_antisymmetry() {
        for d in 1..=2 {
            let om = crate::lattice::omega(d).unwrap();
            for g in basis(d, &q3()).unwrap() {
                let lut = g.to_lut();
                for &pair in &om {
                    for p in 0..=2 {
                        for q in 0..=2 {
                            let here = lut.eval(&dimer(pair, p, q, d, &q3()).unwrap()).unwrap();
                            let matching = pair.matching();
                            // D[-w: p, -u: q] carries p at -w and q at -u.
                            let mw = pair.second().opposite();
                            let there_cfg = if matching.first() == mw {
                                dimer(matching, p, q, d, &q3()).unwrap()
                            } else {
                                dimer(matching, q, p, d, &q3()).unwrap()
                            };
                            let there = lut.eval(&there_cfg).unwrap();
                            assert_eq!(here, -there, "pair {pair} p={p} q={q}");
                            assert_eq!(g.dimer_value(pair, p, q).unwrap(), here);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn linearity_of_luts() {
        let b = basis(2, &binary()).unwrap();
        let combo = b[0].combine(3, &b[2], -2).unwrap();
        let lut = combo.to_lut();
        for idx in 0..32 {
            assert_eq!(
                lut.eval_index(idx),
                3 * b[0].to_lut().eval_index(idx) - 2 * b[2].to_lut().eval_index(idx)
            );
        }
    }

    #[test]
    fn read_from_round_trips() {
        let catalog = PairCatalog::canonical(1).unwrap();
        let g = Perturbation::new(catalog.clone(), q3(), vec![2, -1, 0, 3]).unwrap();
        let lut = g.to_lut();
        let back = Perturbation::read_from(&lut, catalog).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn zero_perturbation_lut_is_zero() {
        let catalog = PairCatalog::canonical(2).unwrap();
        let z = Perturbation::zero(catalog, q3());
        assert!(z.to_lut().table().iter().all(|&v| v == 0));
    }

    #[test]
    fn spot_values_from_the_three_state_table() {
        let b = basis(1, &q3()).unwrap();
        // Third basis element (dimer 021) maps 210 to -1.
        let n210 = NeighborhoodConfig::new(vec![2, 1, 0]).unwrap();
        assert_eq!(b[2].eval(&n210).unwrap(), -1);
        // First basis element maps 110 to -1.
        let n110 = NeighborhoodConfig::new(vec![1, 1, 0]).unwrap();
        assert_eq!(b[0].eval(&n110).unwrap(), -1);
        let _ = config_at(0, &q3(), 1);
        let _ = DirectionPair::new(Direction::Zero, Direction::Pos(1)).unwrap();
    }
}
