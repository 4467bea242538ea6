//! Geometry of the d-dimensional periodic grid and the von Neumann
//! neighborhood.
//!
//! The neighborhood of a cell consists of the cell itself plus its 2d
//! axis-adjacent cells. Two neighborhoods can share zero, one or two
//! cells; the two-cell overlaps are indexed by unordered direction pairs
//! (the catalog Ω), and each overlap pair has a *matching* pair obtained
//! by negating both directions. Choosing one representative per matching
//! class gives the catalog Λ used everywhere downstream.

use crate::{Error, Result};
use std::fmt;

/// One of the 2d+1 von Neumann directions: the zero vector, or a signed
/// unit vector along an axis (axes are numbered from 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// -v_k: one step backwards along axis k.
    Neg(usize),
    /// The zero vector (the cell itself).
    Zero,
    /// +v_k: one step forwards along axis k.
    Pos(usize),
}

impl Direction {
    /// Axis the direction acts on; `None` for the zero vector.
    pub fn axis(self) -> Option<usize> {
        match self {
            Direction::Neg(k) | Direction::Pos(k) => Some(k),
            Direction::Zero => None,
        }
    }

    /// The opposite direction (-v for v, zero for zero).
    pub fn opposite(self) -> Direction {
        match self {
            Direction::Neg(k) => Direction::Pos(k),
            Direction::Zero => Direction::Zero,
            Direction::Pos(k) => Direction::Neg(k),
        }
    }

    /// Position of this direction in the canonical order
    /// (-v_d, ..., -v_1, 0, v_1, ..., v_d).
    ///
    /// Neighborhood configurations, split recipes and LUT indices all use
    /// this slot numbering.
    pub fn slot(self, d: usize) -> usize {
        match self {
            Direction::Neg(k) => {
                debug_assert!(k >= 1 && k <= d);
                d - k
            }
            Direction::Zero => d,
            Direction::Pos(k) => {
                debug_assert!(k >= 1 && k <= d);
                d + k
            }
        }
    }

    /// Inverse of [`Direction::slot`].
    pub fn from_slot(slot: usize, d: usize) -> Direction {
        debug_assert!(slot < 2 * d + 1);
        if slot < d {
            Direction::Neg(d - slot)
        } else if slot == d {
            Direction::Zero
        } else {
            Direction::Pos(slot - d)
        }
    }

    /// Total order used to pick canonical pair representatives:
    /// 0 < v_1 < -v_1 < v_2 < -v_2 < ...
    ///
    /// This is distinct from the canonical *slot* order; it exists so that
    /// the chosen Λ agrees with the conventional one-dimensional choice
    /// {{0, v_1}} and orients every pair deterministically.
    pub(crate) fn rank(self) -> usize {
        match self {
            Direction::Zero => 0,
            Direction::Pos(k) => 2 * k - 1,
            Direction::Neg(k) => 2 * k,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Neg(k) => write!(f, "-v{k}"),
            Direction::Zero => write!(f, "0"),
            Direction::Pos(k) => write!(f, "v{k}"),
        }
    }
}

/// All 2d+1 directions in canonical order (-v_d, ..., -v_1, 0, v_1, ..., v_d).
pub fn directions(d: usize) -> Result<Vec<Direction>> {
    if d < 1 {
        return Err(Error::InvalidDimension);
    }
    let mut out = Vec::with_capacity(2 * d + 1);
    for k in (1..=d).rev() {
        out.push(Direction::Neg(k));
    }
    out.push(Direction::Zero);
    for k in 1..=d {
        out.push(Direction::Pos(k));
    }
    Ok(out)
}

/// An unordered pair of directions realizing a two-cell neighborhood
/// overlap: either {0, v} for a nonzero v, or two nonzero directions on
/// different axes.
///
/// The pair is stored with the lower-[`rank`](Direction::rank) direction
/// first; that fixed orientation is what perturbation coefficients are
/// keyed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectionPair {
    first: Direction,
    second: Direction,
}

impl DirectionPair {
    /// Builds a pair, normalizing the order and rejecting anything outside Ω.
    pub fn new(a: Direction, b: Direction) -> Result<DirectionPair> {
        let valid = match (a.axis(), b.axis()) {
            (None, None) => false,                     // {0, 0}
            (None, Some(_)) | (Some(_), None) => true, // {0, v}
            (Some(ka), Some(kb)) => ka != kb,          // different axes
        };
        if !valid {
            return Err(Error::InvalidPair(a.to_string(), b.to_string()));
        }
        if a.rank() < b.rank() {
            Ok(DirectionPair {
                first: a,
                second: b,
            })
        } else {
            Ok(DirectionPair {
                first: b,
                second: a,
            })
        }
    }

    /// The lower-rank member (the coefficient orientation's "u").
    pub fn first(self) -> Direction {
        self.first
    }

    /// The higher-rank member (the coefficient orientation's "w").
    pub fn second(self) -> Direction {
        self.second
    }

    /// The matching pair {-u, -w}.
    pub fn matching(self) -> DirectionPair {
        DirectionPair::new(self.first.opposite(), self.second.opposite())
            .expect("matching of a valid pair is valid")
    }

    fn sort_key(self) -> (usize, usize) {
        (self.first.rank(), self.second.rank())
    }
}

impl fmt::Display for DirectionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.first, self.second)
    }
}

/// The full overlap catalog Ω for dimension d: all pairs {0, v} plus all
/// pairs of nonzero directions on different axes. |Ω| = 2d².
pub fn omega(d: usize) -> Result<Vec<DirectionPair>> {
    let dirs = directions(d)?;
    let mut pairs = Vec::with_capacity(2 * d * d);
    for (i, &a) in dirs.iter().enumerate() {
        for &b in &dirs[i + 1..] {
            if let Ok(p) = DirectionPair::new(a, b) {
                pairs.push(p);
            }
        }
    }
    pairs.sort_by_key(|p| p.sort_key());
    pairs.dedup();
    debug_assert_eq!(pairs.len(), 2 * d * d);
    Ok(pairs)
}

/// The matching pair of `p` (must be in Ω; pairs are validated on
/// construction, so this is total).
pub fn matching(p: DirectionPair) -> DirectionPair {
    p.matching()
}

/// Deterministic canonical choice of Λ: from each matching class {P, -P}
/// the pair with the smaller rank key is kept. |Λ| = d².
///
/// Any choice of Λ yields the same perturbation space and the same rule
/// catalogs; this particular one coincides with the conventional choices
/// for d = 1 and d = 2.
pub fn lambda_canonical(d: usize) -> Result<Vec<DirectionPair>> {
    let all = omega(d)?;
    let lambda: Vec<DirectionPair> = all
        .into_iter()
        .filter(|p| p.sort_key() < p.matching().sort_key())
        .collect();
    debug_assert_eq!(lambda.len(), d * d);
    Ok(lambda)
}

/// The pair catalogs for one dimension: Ω plus a selection Λ of one
/// representative per matching class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCatalog {
    d: usize,
    omega: Vec<DirectionPair>,
    lambda: Vec<DirectionPair>,
}

impl PairCatalog {
    /// Catalog with the canonical Λ.
    pub fn canonical(d: usize) -> Result<PairCatalog> {
        let omega = omega(d)?;
        let lambda = lambda_canonical(d)?;
        Ok(PairCatalog { d, omega, lambda })
    }

    /// Catalog with a custom Λ: `flip[k]` replaces the k-th canonical
    /// representative by its matching pair. There are 2^(d²) selections.
    pub fn with_selection(d: usize, flip: &[bool]) -> Result<PairCatalog> {
        let omega = omega(d)?;
        let mut lambda = lambda_canonical(d)?;
        if flip.len() != lambda.len() {
            return Err(Error::Unsupported(format!(
                "selection mask has {} bits, expected {}",
                flip.len(),
                lambda.len()
            )));
        }
        for (pair, &f) in lambda.iter_mut().zip(flip) {
            if f {
                *pair = pair.matching();
            }
        }
        Ok(PairCatalog { d, omega, lambda })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn omega(&self) -> &[DirectionPair] {
        &self.omega
    }

    pub fn lambda(&self) -> &[DirectionPair] {
        &self.lambda
    }

    /// Position of `p` in Λ, if selected.
    pub fn lambda_index(&self, p: DirectionPair) -> Option<usize> {
        self.lambda.iter().position(|&q| q == p)
    }
}

/// A d-dimensional torus with all sides at least 5.
///
/// Cells are indexed row-major: the first coordinate is most significant.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GridGeometry {
    sides: Vec<usize>,
}

impl GridGeometry {
    /// Sides below 5 are rejected: the overlap structure in
    /// [`GridGeometry::overlap`] needs every side to exceed 4.
    pub fn new(sides: Vec<usize>) -> Result<GridGeometry> {
        if sides.is_empty() {
            return Err(Error::InvalidDimension);
        }
        for &n in &sides {
            if n < 5 {
                return Err(Error::InvalidSide(n));
            }
        }
        Ok(GridGeometry { sides })
    }

    pub fn dimension(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[usize] {
        &self.sides
    }

    pub fn cell_count(&self) -> usize {
        self.sides.iter().product()
    }

    fn check_coords(&self, cell: &[usize]) -> Result<()> {
        if cell.len() != self.sides.len() || cell.iter().zip(&self.sides).any(|(&c, &n)| c >= n) {
            return Err(Error::InvalidCell);
        }
        Ok(())
    }

    /// Row-major index of a coordinate tuple.
    pub fn index_of(&self, cell: &[usize]) -> Result<usize> {
        self.check_coords(cell)?;
        let mut idx = 0;
        for (&c, &n) in cell.iter().zip(&self.sides) {
            idx = idx * n + c;
        }
        Ok(idx)
    }

    /// Coordinate tuple of a row-major index.
    pub fn coords_of(&self, mut index: usize) -> Vec<usize> {
        debug_assert!(index < self.cell_count());
        let mut coords = vec![0; self.sides.len()];
        for (c, &n) in coords.iter_mut().zip(&self.sides).rev() {
            *c = index % n;
            index /= n;
        }
        coords
    }

    /// The cell one step from `cell` in direction `v` (periodic).
    pub fn neighbor(&self, cell: &[usize], v: Direction) -> Result<Vec<usize>> {
        self.check_coords(cell)?;
        let mut out = cell.to_vec();
        match v {
            Direction::Zero => {}
            Direction::Pos(k) => {
                let n = self.sides[k - 1];
                out[k - 1] = (out[k - 1] + 1) % n;
            }
            Direction::Neg(k) => {
                let n = self.sides[k - 1];
                out[k - 1] = (out[k - 1] + n - 1) % n;
            }
        }
        Ok(out)
    }

    /// Index-level neighbor step, used on hot paths.
    pub fn neighbor_index(&self, index: usize, v: Direction) -> usize {
        let coords = self.coords_of(index);
        let shifted = self.neighbor(&coords, v).expect("decoded coords are valid");
        self.index_of(&shifted).expect("shifted coords are valid")
    }

    /// Flat neighbor table: entry `cell * (2d+1) + slot` is the index of
    /// the neighbor of `cell` in the direction with that canonical slot.
    pub fn neighbor_table(&self) -> Vec<usize> {
        let d = self.dimension();
        let dirs = directions(d).expect("dimension is valid");
        let cells = self.cell_count();
        let mut table = vec![0; cells * (2 * d + 1)];
        for i in 0..cells {
            for (s, &v) in dirs.iter().enumerate() {
                table[i * (2 * d + 1) + s] = self.neighbor_index(i, v);
            }
        }
        table
    }

    /// The cells shared by the neighborhoods of `i` and `j`:
    /// two cells when j = i + v or j = i + u + w for an overlap pair
    /// {u, w} of nonzero directions, one cell when j = i + 2v, the whole
    /// neighborhood when i = j, and empty otherwise.
    pub fn overlap(&self, i: &[usize], j: &[usize]) -> Result<Vec<Vec<usize>>> {
        self.check_coords(i)?;
        self.check_coords(j)?;
        // Displacement per axis, normalized to the symmetric range. Sides
        // of 5 or more make offsets of magnitude <= 2 unambiguous.
        let mut delta = Vec::with_capacity(self.sides.len());
        for ((&a, &b), &n) in i.iter().zip(j).zip(&self.sides) {
            let raw = (b + n - a) % n;
            let signed = if raw > n / 2 {
                raw as i64 - n as i64
            } else {
                raw as i64
            };
            delta.push(signed);
        }

        let nonzero: Vec<(usize, i64)> = delta
            .iter()
            .enumerate()
            .filter(|&(_, &dlt)| dlt != 0)
            .map(|(k, &dlt)| (k + 1, dlt))
            .collect();

        let dir = |(axis, step): (usize, i64)| {
            if step > 0 {
                Direction::Pos(axis)
            } else {
                Direction::Neg(axis)
            }
        };

        let mut cells = match nonzero.as_slice() {
            [] => {
                // i = j: the neighborhoods coincide.
                let mut all = vec![i.to_vec()];
                for v in directions(self.dimension())? {
                    if v != Direction::Zero {
                        all.push(self.neighbor(i, v)?);
                    }
                }
                all
            }
            [(axis, step)] if step.abs() == 1 => {
                vec![i.to_vec(), self.neighbor(i, dir((*axis, *step)))?]
            }
            [(axis, step)] if step.abs() == 2 => {
                vec![self.neighbor(i, dir((*axis, step.signum())))?]
            }
            [a, b] if a.1.abs() == 1 && b.1.abs() == 1 => {
                vec![self.neighbor(i, dir(*a))?, self.neighbor(i, dir(*b))?]
            }
            _ => Vec::new(),
        };
        cells.sort();
        cells.dedup();
        Ok(cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_direction_order() {
        let d1 = directions(1).unwrap();
        assert_eq!(
            d1,
            vec![Direction::Neg(1), Direction::Zero, Direction::Pos(1)]
        );
        assert_eq!(directions(2).unwrap().len(), 5);
        assert_eq!(directions(3).unwrap().len(), 7);
        assert!(directions(0).is_err());

        let d3 = directions(3).unwrap();
        assert_eq!(d3[0], Direction::Neg(3));
        assert_eq!(d3[3], Direction::Zero);
        assert_eq!(d3[6], Direction::Pos(3));
        for (s, &v) in d3.iter().enumerate() {
            assert_eq!(v.slot(3), s);
            assert_eq!(Direction::from_slot(s, 3), v);
        }
    }

    #[test]
    fn omega_sizes() {
        assert_eq!(omega(1).unwrap().len(), 2);
        assert_eq!(omega(2).unwrap().len(), 8);
        assert_eq!(omega(3).unwrap().len(), 18);
        assert_eq!(omega(4).unwrap().len(), 32);
    }

    #[test]
    fn pair_rejects_degenerate_combinations() {
        assert!(DirectionPair::new(Direction::Zero, Direction::Zero).is_err());
        assert!(DirectionPair::new(Direction::Pos(1), Direction::Neg(1)).is_err());
        assert!(DirectionPair::new(Direction::Pos(2), Direction::Pos(2)).is_err());
        assert!(DirectionPair::new(Direction::Pos(1), Direction::Pos(2)).is_ok());
        assert!(DirectionPair::new(Direction::Zero, Direction::Neg(2)).is_ok());
    }

    #[test]
    fn matching_is_a_fixed_point_free_involution() {
        for d in 1..=4 {
            for p in omega(d).unwrap() {
                let m = matching(p);
                assert_ne!(m, p);
                assert_eq!(matching(m), p);
            }
        }
        let p = DirectionPair::new(Direction::Zero, Direction::Pos(1)).unwrap();
        assert_eq!(
            matching(p),
            DirectionPair::new(Direction::Zero, Direction::Neg(1)).unwrap()
        );
        let q = DirectionPair::new(Direction::Pos(1), Direction::Pos(2)).unwrap();
        assert_eq!(
            matching(q),
            DirectionPair::new(Direction::Neg(1), Direction::Neg(2)).unwrap()
        );
    }

    #[test]
    fn lambda_canonical_selects_one_per_class() {
        for d in 1..=4 {
            let lam = lambda_canonical(d).unwrap();
            assert_eq!(lam.len(), d * d);
            let om = omega(d).unwrap();
            let mut covered: Vec<DirectionPair> = lam.clone();
            covered.extend(lam.iter().map(|&p| matching(p)));
            covered.sort_by_key(|p| p.sort_key());
            let mut om_sorted = om.clone();
            om_sorted.sort_by_key(|p| p.sort_key());
            assert_eq!(covered, om_sorted);
            for &p in &lam {
                assert!(!lam.contains(&matching(p)));
            }
        }
        // The 1D choice is {{0, v1}}.
        assert_eq!(
            lambda_canonical(1).unwrap(),
            vec![DirectionPair::new(Direction::Zero, Direction::Pos(1)).unwrap()]
        );
    }

    #[test]
    fn lambda_canonical_matches_the_usual_two_dimensional_choice() {
        let lam = lambda_canonical(2).unwrap();
        let mk = |a, b| DirectionPair::new(a, b).unwrap();
        assert_eq!(
            lam,
            vec![
                mk(Direction::Zero, Direction::Pos(1)),
                mk(Direction::Zero, Direction::Pos(2)),
                mk(Direction::Pos(1), Direction::Pos(2)),
                mk(Direction::Pos(1), Direction::Neg(2)),
            ]
        );
    }

    #[test]
    fn geometry_rejects_small_sides() {
        assert!(GridGeometry::new(vec![4]).is_err());
        assert!(GridGeometry::new(vec![5, 4]).is_err());
        assert!(GridGeometry::new(vec![]).is_err());
        let g = GridGeometry::new(vec![5, 6, 7]).unwrap();
        assert_eq!(g.cell_count(), 210);
    }

    #[test]
    fn neighbor_wraps_around() {
        let g = GridGeometry::new(vec![5]).unwrap();
        assert_eq!(g.neighbor(&[4], Direction::Pos(1)).unwrap(), vec![0]);
        assert_eq!(g.neighbor(&[2], Direction::Zero).unwrap(), vec![2]);
        let g2 = GridGeometry::new(vec![5, 5]).unwrap();
        assert_eq!(g2.neighbor(&[0, 0], Direction::Neg(2)).unwrap(), vec![0, 4]);
        assert!(g2.neighbor(&[0, 5], Direction::Zero).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = GridGeometry::new(vec![5, 6, 7]).unwrap();
        for i in 0..g.cell_count() {
            assert_eq!(g.index_of(&g.coords_of(i)).unwrap(), i);
        }
    }

    #[test]
    fn overlap_named_cases() {
        let g = GridGeometry::new(vec![5, 5]).unwrap();
        // j = i + v1: the two shared cells are i and i + v1.
        let ov = g.overlap(&[1, 1], &[1, 2]).unwrap();
        assert_eq!(ov, vec![vec![1, 1], vec![1, 2]]);
        // j = i + 2 v1: single shared cell i + v1.
        let ov = g.overlap(&[1, 1], &[1, 3]).unwrap();
        assert_eq!(ov, vec![vec![1, 2]]);
        // j = i + v1 + v1 + v2: no shared cells.
        let ov = g.overlap(&[0, 0], &[1, 2]).unwrap();
        assert!(ov.is_empty());
    }

    /// Exhaustive cross-check of the case analysis against literal
    /// neighborhood intersection on 5-per-side tori for d = 1, 2, 3.
    #[test]
    fn overlap_matches_literal_intersection() {
        for d in 1..=3 {
            let g = GridGeometry::new(vec![5; d]).unwrap();
            let dirs = directions(d).unwrap();
            let neighborhood = |c: &[usize]| -> Vec<Vec<usize>> {
                let mut cells: Vec<Vec<usize>> =
                    dirs.iter().map(|&v| g.neighbor(c, v).unwrap()).collect();
                cells.sort();
                cells
            };
            for i in 0..g.cell_count() {
                let ci = g.coords_of(i);
                let pi = neighborhood(&ci);
                for j in 0..g.cell_count() {
                    let cj = g.coords_of(j);
                    let pj = neighborhood(&cj);
                    let literal: Vec<Vec<usize>> =
                        pi.iter().filter(|c| pj.contains(c)).cloned().collect();
                    let fast = g.overlap(&ci, &cj).unwrap();
                    assert_eq!(fast, literal, "i={ci:?} j={cj:?}");
                    assert!(i == j || fast.len() <= 2);
                }
            }
        }
    }

    /// Whenever two distinct neighborhoods share two cells there is exactly
    /// one overlap pair {u, w} with j = i + u + w.
    #[test]
    fn two_cell_overlaps_come_from_a_unique_pair() {
        for d in 1..=3 {
            let g = GridGeometry::new(vec![5; d]).unwrap();
            let om = omega(d).unwrap();
            for i in 0..g.cell_count() {
                let ci = g.coords_of(i);
                for j in 0..g.cell_count() {
                    if i == j {
                        continue;
                    }
                    let cj = g.coords_of(j);
                    let shared = g.overlap(&ci, &cj).unwrap();
                    let witnesses: Vec<&DirectionPair> = om
                        .iter()
                        .filter(|p| {
                            let step = g.neighbor(&ci, p.first()).unwrap();
                            g.neighbor(&step, p.second()).unwrap() == cj
                        })
                        .collect();
                    if shared.len() == 2 {
                        assert_eq!(witnesses.len(), 1, "i={ci:?} j={cj:?}");
                    } else {
                        assert!(witnesses.is_empty(), "i={ci:?} j={cj:?}");
                    }
                }
            }
        }
    }
}
