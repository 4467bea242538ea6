//! The decomposition put to work: split any rule into recipes plus a
//! residual, decide number conservation by a finite exact check, and
//! enumerate every number-conserving rule by bounded backtracking over
//! perturbation coefficients.
//!
//! Soundness and completeness rest on two facts. Every sum of a split
//! function and a perturbation conserves the state sum, and every
//! number-conserving rule arises that way for exactly one (split,
//! perturbation) pair. The residual of a candidate rule is a perturbation
//! precisely when it vanishes on monomers and satisfies the Λ dimer
//! expansion at every configuration, which is a check over finitely many
//! table entries.

use crate::lattice::{Direction, DirectionPair, PairCatalog};
use crate::localfn::LocalFunction;
use crate::neighborhood::StateSet;
use crate::perturb::{coeff_keys, pert_dim};
use crate::split::{enumerate_splits, SplitFunction};
use crate::{Error, Result};
use rayon::prelude::*;

/// A rule split into its per-state recipes and the residual table
/// (rule minus split LUT). The residual vanishes on every monomer; it is
/// a perturbation exactly when the rule conserves the state sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub split: SplitFunction,
    pub residual: LocalFunction,
}

impl Decomposition {
    /// Entrywise sum of the split LUT and the residual; reproduces the
    /// decomposed rule.
    pub fn recombine(&self) -> LocalFunction {
        self.split
            .to_lut()
            .add(&self.residual)
            .expect("split and residual share a domain")
    }
}

/// Evidence that a rule is not number-conserving.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NcWitness {
    /// The values on the monomers of `q` sum to `sum` instead of `q`.
    MonomerSum { q: i64, sum: i64 },
    /// The residual violates the dimer expansion at the configuration
    /// with the given table index: its value there is `value`, while the
    /// expansion over Λ dimers yields `expected`.
    ResidualMismatch {
        index: usize,
        value: i64,
        expected: i64,
    },
}

/// Outcome of [`decide_number_conservation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NcVerdict {
    Conserving(Decomposition),
    NotConserving(NcWitness),
}

impl NcVerdict {
    pub fn conserving(&self) -> bool {
        matches!(self, NcVerdict::Conserving(_))
    }
}

fn require_rule(f: &LocalFunction) -> Result<()> {
    if let Some((index, &value)) = f
        .table()
        .iter()
        .enumerate()
        .find(|(_, &v)| !f.states().contains(v))
    {
        return Err(Error::NotARule { index, value });
    }
    Ok(())
}

/// Reads split recipes off the monomer entries of a rule and returns them
/// with the residual. A monomer-sum violation certifies the rule as not
/// number-conserving and is reported as a witness instead.
pub fn decompose(f: &LocalFunction) -> Result<std::result::Result<Decomposition, NcWitness>> {
    require_rule(f)?;
    let d = f.dimension();
    let states = f.states().clone();
    let dirs = crate::lattice::directions(d)?;

    // The q = 0 monomers are all the trivial configuration, so this also
    // pins f(trivial) = 0.
    for &q in states.values() {
        let mut sum = 0;
        for &v in &dirs {
            let m = crate::neighborhood::monomer(v, q, d, &states)?;
            sum += f.eval(&m)?;
        }
        if sum != q {
            return Ok(Err(NcWitness::MonomerSum { q, sum }));
        }
    }

    let mut recipes = Vec::new();
    for q in states.plus() {
        let mut recipe = Vec::with_capacity(2 * d + 1);
        for &v in &dirs {
            let m = crate::neighborhood::monomer(v, q, d, &states)?;
            recipe.push(f.eval(&m)?);
        }
        recipes.push(recipe);
    }
    let split = SplitFunction::new(d, states, recipes)?;
    let residual = f.sub(&split.to_lut())?;
    Ok(Ok(Decomposition { split, residual }))
}

/// Table indices of the configuration supported on two given slots, with
/// everything else zero; degenerate slots fall back to the monomer or the
/// trivial configuration. Works for any state set.
struct DimerIndexer {
    /// pow[slot] = |Q|^(2d - slot): the place value of each slot digit.
    pow: Vec<usize>,
    /// Rank of the zero state.
    zero_rank: usize,
    /// Table index of the all-zero configuration.
    trivial_index: usize,
}

impl DimerIndexer {
    fn new(d: usize, states: &StateSet) -> DimerIndexer {
        let width = 2 * d + 1;
        let base = states.len();
        let mut pow = vec![1usize; width];
        for slot in (0..width - 1).rev() {
            pow[slot] = pow[slot + 1] * base;
        }
        let zero_rank = states.rank(0).expect("state sets contain 0");
        let trivial_index = pow.iter().map(|&p| p * zero_rank).sum();
        DimerIndexer {
            pow,
            zero_rank,
            trivial_index,
        }
    }

    /// Index of the configuration holding rank `ra` at `slot_a` and rank
    /// `rb` at `slot_b`, zero elsewhere. Ranks can sit below the zero
    /// rank for state sets with negative values; the signed deltas always
    /// combine into a valid index.
    fn index(&self, slot_a: usize, ra: usize, slot_b: usize, rb: usize) -> usize {
        (self.trivial_index as i64
            + (ra as i64 - self.zero_rank as i64) * self.pow[slot_a] as i64
            + (rb as i64 - self.zero_rank as i64) * self.pow[slot_b] as i64) as usize
    }
}

/// Checks the Λ dimer expansion of a residual at every configuration.
/// Returns the first violating table index, scanning in index order.
fn residual_expansion_violation(
    residual: &LocalFunction,
    catalog: &PairCatalog,
) -> Option<(usize, i64, i64)> {
    let d = residual.dimension();
    let states = residual.states();
    let base = states.len();
    let width = 2 * d + 1;
    let indexer = DimerIndexer::new(d, states);
    let pair_slots: Vec<(usize, usize, usize, usize)> = catalog
        .lambda()
        .iter()
        .map(|p| {
            (
                p.first().slot(d),
                p.second().slot(d),
                p.second().opposite().slot(d),
                p.first().opposite().slot(d),
            )
        })
        .collect();

    let mut digits = vec![0usize; width];
    for index in 0..residual.table().len() {
        let mut rest = index;
        for slot in (0..width).rev() {
            digits[slot] = rest % base;
            rest /= base;
        }
        let mut expected = 0;
        for &(u, w, neg_w, neg_u) in &pair_slots {
            expected += residual.eval_index(indexer.index(u, digits[u], w, digits[w]));
            expected -= residual.eval_index(indexer.index(u, digits[neg_w], w, digits[neg_u]));
        }
        let value = residual.eval_index(index);
        if value != expected {
            return Some((index, value, expected));
        }
    }
    None
}

/// Decides number conservation exactly: the monomer sums must hold and
/// the residual must satisfy the dimer expansion at every configuration.
/// On success the certificate is the decomposition itself.
pub fn decide_number_conservation(f: &LocalFunction) -> Result<NcVerdict> {
    let decomposition = match decompose(f)? {
        Ok(dec) => dec,
        Err(witness) => return Ok(NcVerdict::NotConserving(witness)),
    };
    let catalog = PairCatalog::canonical(f.dimension())?;
    if let Some((index, value, expected)) =
        residual_expansion_violation(&decomposition.residual, &catalog)
    {
        return Ok(NcVerdict::NotConserving(NcWitness::ResidualMismatch {
            index,
            value,
            expected,
        }));
    }
    Ok(NcVerdict::Conserving(decomposition))
}

/// Convenience wrapper over [`decide_number_conservation`].
pub fn is_number_conserving(f: &LocalFunction) -> Result<bool> {
    Ok(decide_number_conservation(f)?.conserving())
}

/// Inclusive bounds for one perturbation coefficient, from the rule-range
/// constraints on its dimer and matching dimer. Empty (lower > upper)
/// means no rule exists with this split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoeffBounds {
    pub lower: i64,
    pub upper: i64,
}

impl CoeffBounds {
    pub fn is_empty(&self) -> bool {
        self.lower > self.upper
    }

    /// upper - lower; at most 2 over contiguous three-state sets.
    pub fn width(&self) -> i64 {
        self.upper - self.lower
    }
}

/// Coefficient bounds over contiguous state sets {0..m}:
///
/// ```text
/// lower = max(-h(M[u:p]) - h(M[w:q]),  h(M[-w:p]) + h(M[-u:q]) - m)
/// upper = min( m - h(M[u:p]) - h(M[w:q]),  h(M[-w:p]) + h(M[-u:q]))
/// ```
pub fn coeff_bounds(h: &SplitFunction, pair: DirectionPair, p: i64, q: i64) -> Result<CoeffBounds> {
    let m = h.states().as_contiguous_max().ok_or_else(|| {
        Error::Unsupported("coefficient bounds require a contiguous state set".into())
    })?;
    let (u, w) = (pair.first(), pair.second());
    let s1 = h.monomer_value(u, p)? + h.monomer_value(w, q)?;
    let s2 = h.monomer_value(w.opposite(), p)? + h.monomer_value(u.opposite(), q)?;
    Ok(CoeffBounds {
        lower: (-s1).max(s2 - m),
        upper: (m - s1).min(s2),
    })
}

/// All admissible values for one coefficient, for any state set: the
/// intersection of the two shifted copies of Q forced by membership of
/// the dimer value and the matching dimer value. Sorted ascending. Over
/// contiguous sets this is exactly the closed range of [`coeff_bounds`].
pub fn candidate_coeffs(
    h: &SplitFunction,
    pair: DirectionPair,
    p: i64,
    q: i64,
) -> Result<Vec<i64>> {
    let (u, w) = (pair.first(), pair.second());
    let s1 = h.monomer_value(u, p)? + h.monomer_value(w, q)?;
    let s2 = h.monomer_value(w.opposite(), p)? + h.monomer_value(u.opposite(), q)?;
    let states = h.states();
    let mut out: Vec<i64> = states
        .values()
        .iter()
        .map(|&v| v - s1)
        .filter(|&a| states.contains(s2 - a))
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Shared tables for enumerating rules over one (dimension, state set):
/// for every configuration, the signed coefficient pattern of the Λ
/// expansion, independent of the split under search.
struct SearchContext {
    states: StateSet,
    keys: Vec<(DirectionPair, i64, i64)>,
    /// Combined (coefficient index, weight) terms per configuration.
    forms: Vec<Vec<(u32, i64)>>,
    /// Configurations grouped by the highest coefficient index in their
    /// form; `groups[k]` can be checked once coefficients 0..=k are set.
    groups: Vec<Vec<u32>>,
    /// Configurations whose value does not depend on any coefficient.
    fixed: Vec<u32>,
}

impl SearchContext {
    fn new(d: usize, states: &StateSet) -> Result<SearchContext> {
        let catalog = PairCatalog::canonical(d)?;
        let keys = coeff_keys(&catalog, states);
        let base = states.len();
        let width = 2 * d + 1;
        let np = base - 1;
        let config_count = states.config_count(d);

        let pair_slots: Vec<(usize, usize, usize, usize)> = catalog
            .lambda()
            .iter()
            .map(|p| {
                (
                    p.first().slot(d),
                    p.second().slot(d),
                    p.second().opposite().slot(d),
                    p.first().opposite().slot(d),
                )
            })
            .collect();
        // plus_rank by state rank; usize::MAX marks the zero state.
        let plus_of_rank: Vec<usize> = states
            .values()
            .iter()
            .map(|&v| {
                if v == 0 {
                    usize::MAX
                } else {
                    states.plus_rank(v).expect("nonzero state")
                }
            })
            .collect();

        let mut forms = Vec::with_capacity(config_count);
        let mut groups: Vec<Vec<u32>> = vec![Vec::new(); keys.len()];
        let mut fixed = Vec::new();
        let mut digits = vec![0usize; width];
        for index in 0..config_count {
            let mut rest = index;
            for slot in (0..width).rev() {
                digits[slot] = rest % base;
                rest /= base;
            }
            let mut form: Vec<(u32, i64)> = Vec::new();
            let push = |idx: usize, weight: i64, form: &mut Vec<(u32, i64)>| match form
                .iter_mut()
                .find(|(i, _)| *i == idx as u32)
            {
                Some(entry) => entry.1 += weight,
                None => form.push((idx as u32, weight)),
            };
            for (l, &(u, w, neg_w, neg_u)) in pair_slots.iter().enumerate() {
                let (pu, pw) = (plus_of_rank[digits[u]], plus_of_rank[digits[w]]);
                if pu != usize::MAX && pw != usize::MAX {
                    push((l * np + pu) * np + pw, 1, &mut form);
                }
                let (pu, pw) = (plus_of_rank[digits[neg_w]], plus_of_rank[digits[neg_u]]);
                if pu != usize::MAX && pw != usize::MAX {
                    push((l * np + pu) * np + pw, -1, &mut form);
                }
            }
            form.retain(|&(_, wgt)| wgt != 0);
            form.sort_unstable_by_key(|&(i, _)| i);
            match form.iter().map(|&(i, _)| i).max() {
                Some(top) => groups[top as usize].push(index as u32),
                None => fixed.push(index as u32),
            }
            forms.push(form);
        }

        Ok(SearchContext {
            states: states.clone(),
            keys,
            forms,
            groups,
            fixed,
        })
    }

    /// Full table of `split + Σ coeff · basis` without rebuilding the
    /// expansion per entry.
    fn materialize(&self, h_lut: &[i64], coeffs: &[i64]) -> Vec<i64> {
        h_lut
            .iter()
            .zip(&self.forms)
            .map(|(&base, form)| {
                base + form
                    .iter()
                    .map(|&(i, wgt)| wgt * coeffs[i as usize])
                    .sum::<i64>()
            })
            .collect()
    }

    /// All coefficient vectors whose rule stays inside the state set, in
    /// lexicographic order. Depth-first over coefficients in key order;
    /// every configuration is checked as soon as the last coefficient it
    /// depends on is assigned, which prunes most branches immediately.
    fn solve(&self, h: &SplitFunction) -> Result<Vec<Vec<i64>>> {
        let h_lut = h.to_lut();
        let table = h_lut.table();
        for &c in &self.fixed {
            if !self.states.contains(table[c as usize]) {
                return Ok(Vec::new());
            }
        }
        let mut candidates = Vec::with_capacity(self.keys.len());
        for &(pair, p, q) in &self.keys {
            let cands = candidate_coeffs(h, pair, p, q)?;
            if cands.is_empty() {
                return Ok(Vec::new());
            }
            candidates.push(cands);
        }

        let mut solutions = Vec::new();
        let mut assignment = vec![0i64; self.keys.len()];
        self.descend(0, table, &candidates, &mut assignment, &mut solutions);
        Ok(solutions)
    }

    fn descend(
        &self,
        depth: usize,
        h_table: &[i64],
        candidates: &[Vec<i64>],
        assignment: &mut Vec<i64>,
        solutions: &mut Vec<Vec<i64>>,
    ) {
        if depth == self.keys.len() {
            solutions.push(assignment.clone());
            return;
        }
        'values: for &value in &candidates[depth] {
            assignment[depth] = value;
            for &c in &self.groups[depth] {
                let total = h_table[c as usize]
                    + self.forms[c as usize]
                        .iter()
                        .map(|&(i, wgt)| wgt * assignment[i as usize])
                        .sum::<i64>();
                if !self.states.contains(total) {
                    continue 'values;
                }
            }
            self.descend(depth + 1, h_table, candidates, assignment, solutions);
        }
    }
}

/// The solutions attached to one split: every coefficient vector over the
/// canonical Λ whose combined rule stays inside the state set.
#[derive(Debug, Clone)]
pub struct SplitSolutions {
    pub split_index: usize,
    pub split: SplitFunction,
    pub coeff_vectors: Vec<Vec<i64>>,
}

/// One enumerated number-conserving rule with its provenance.
#[derive(Debug, Clone)]
pub struct NccaRule {
    pub rule: LocalFunction,
    pub split_index: usize,
    pub coeffs: Vec<i64>,
}

/// Enumerates all number-conserving rules grouped by split, in split
/// enumeration order with lexicographically ordered coefficient vectors.
/// Splits are searched in parallel; the output order is deterministic.
pub fn enumerate_ncca_by_split(d: usize, states: &StateSet) -> Result<Vec<SplitSolutions>> {
    let ctx = SearchContext::new(d, states)?;
    let splits = enumerate_splits(d, states)?;
    splits
        .into_par_iter()
        .enumerate()
        .map(|(split_index, split)| {
            let coeff_vectors = ctx.solve(&split)?;
            Ok(SplitSolutions {
                split_index,
                split,
                coeff_vectors,
            })
        })
        .collect()
}

/// Flattened enumeration: every number-conserving rule for (d, states),
/// materialized as a LUT, ordered by (split index, coefficient vector).
pub fn enumerate_ncca(d: usize, states: &StateSet) -> Result<Vec<NccaRule>> {
    let ctx = SearchContext::new(d, states)?;
    let by_split = enumerate_ncca_by_split(d, states)?;
    let mut rules = Vec::new();
    for group in by_split {
        let h_lut = group.split.to_lut();
        for coeffs in group.coeff_vectors {
            let table = ctx.materialize(h_lut.table(), &coeffs);
            let rule = LocalFunction::from_table(d, states.clone(), table)?;
            debug_assert!(rule.is_rule());
            rules.push(NccaRule {
                rule,
                split_index: group.split_index,
                coeffs,
            });
        }
    }
    Ok(rules)
}

/// Number of number-conserving rules per split, in split enumeration
/// order. The values sum to the catalog size.
pub fn count_per_split(d: usize, states: &StateSet) -> Result<Vec<(SplitFunction, usize)>> {
    Ok(enumerate_ncca_by_split(d, states)?
        .into_iter()
        .map(|group| (group.split, group.coeff_vectors.len()))
        .collect())
}

/// Combines splits with coefficient vectors over the canonical Λ,
/// amortizing the expansion tables across many rules.
pub struct Materializer {
    d: usize,
    states: StateSet,
    ctx: SearchContext,
}

impl Materializer {
    pub fn new(d: usize, states: &StateSet) -> Result<Materializer> {
        Ok(Materializer {
            d,
            states: states.clone(),
            ctx: SearchContext::new(d, states)?,
        })
    }

    /// The rule `split + Σ coeffs · basis` as a LUT.
    pub fn rule(&self, split: &SplitFunction, coeffs: &[i64]) -> Result<LocalFunction> {
        let expected = pert_dim(self.d, &self.states);
        if coeffs.len() != expected {
            return Err(Error::TableLength {
                got: coeffs.len(),
                expected,
            });
        }
        if split.dimension() != self.d || split.states() != &self.states {
            return Err(Error::Unsupported(
                "split does not match the materializer's domain".into(),
            ));
        }
        let h_lut = split.to_lut();
        LocalFunction::from_table(
            self.d,
            self.states.clone(),
            self.ctx.materialize(h_lut.table(), coeffs),
        )
    }
}

/// One-shot form of [`Materializer::rule`].
pub fn materialize(split: &SplitFunction, coeffs: &[i64]) -> Result<LocalFunction> {
    Materializer::new(split.dimension(), split.states())?.rule(split, coeffs)
}

/// An element of the symmetry group of the von Neumann neighborhood: a
/// permutation of the axes combined with per-axis reflections. The group
/// has 2^d · d! elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutation {
    /// Zero-based axis map: axis k goes to `perm[k]`.
    perm: Vec<usize>,
    /// Per-source-axis reflection.
    flip: Vec<bool>,
}

impl SignedPermutation {
    pub fn identity(d: usize) -> SignedPermutation {
        SignedPermutation {
            perm: (0..d).collect(),
            flip: vec![false; d],
        }
    }

    /// All 2^d · d! group elements, in a deterministic order.
    pub fn group(d: usize) -> Vec<SignedPermutation> {
        fn permutations(d: usize) -> Vec<Vec<usize>> {
            if d == 1 {
                return vec![vec![0]];
            }
            let mut out = Vec::new();
            for shorter in permutations(d - 1) {
                for pos in 0..d {
                    let mut p = shorter.clone();
                    p.insert(pos, d - 1);
                    out.push(p);
                }
            }
            out
        }
        let mut out = Vec::new();
        for perm in permutations(d) {
            for mask in 0..(1u32 << d) {
                out.push(SignedPermutation {
                    perm: perm.clone(),
                    flip: (0..d).map(|k| mask >> k & 1 == 1).collect(),
                });
            }
        }
        out
    }

    /// Image of a direction: axis renamed, sign flipped where requested.
    pub fn apply_direction(&self, v: Direction) -> Direction {
        match v {
            Direction::Zero => Direction::Zero,
            Direction::Pos(k) => {
                let axis = self.perm[k - 1] + 1;
                if self.flip[k - 1] {
                    Direction::Neg(axis)
                } else {
                    Direction::Pos(axis)
                }
            }
            Direction::Neg(k) => self.apply_direction(Direction::Pos(k)).opposite(),
        }
    }

    /// Slot permutation implementing the relabeling: entry `slot(v)`
    /// holds `slot(image of v)`.
    fn slot_map(&self, d: usize) -> Vec<usize> {
        (0..2 * d + 1)
            .map(|s| self.apply_direction(Direction::from_slot(s, d)).slot(d))
            .collect()
    }

    /// The relabeled rule: the image reads in direction v what the
    /// original reads in the image of v.
    pub fn apply_to_rule(&self, f: &LocalFunction) -> LocalFunction {
        let d = f.dimension();
        let states = f.states();
        let base = states.len();
        let width = 2 * d + 1;
        let map = self.slot_map(d);
        let mut table = vec![0i64; f.table().len()];
        let mut digits = vec![0usize; width];
        for (index, out) in table.iter_mut().enumerate() {
            let mut rest = index;
            for slot in (0..width).rev() {
                digits[slot] = rest % base;
                rest /= base;
            }
            let mut source = 0;
            for slot in 0..width {
                source = source * base + digits[map[slot]];
            }
            *out = f.table()[source];
        }
        LocalFunction::from_table(d, states.clone(), table).expect("same table length")
    }

    /// The relabeled split: recipe slots move with the directions.
    pub fn apply_to_split(&self, h: &SplitFunction) -> SplitFunction {
        let d = h.dimension();
        let map = self.slot_map(d);
        let recipes = h
            .recipes()
            .iter()
            .map(|recipe| {
                let mut out = vec![0i64; recipe.len()];
                for (slot, &value) in recipe.iter().enumerate() {
                    out[map[slot]] = value;
                }
                out
            })
            .collect();
        SplitFunction::new(d, h.states().clone(), recipes).expect("relabeling preserves recipes")
    }
}

/// Groups rules into symmetry orbits and returns one representative per
/// orbit: the member with the least LUT among those present in the input.
/// For inputs closed under the group this is the orbit-wide minimum.
pub fn orbit_representatives(rules: &[LocalFunction], d: usize) -> Vec<LocalFunction> {
    let group = SignedPermutation::group(d);
    let mut by_orbit: std::collections::BTreeMap<Vec<i64>, &LocalFunction> =
        std::collections::BTreeMap::new();
    for f in rules {
        let orbit_key = group
            .iter()
            .map(|s| s.apply_to_rule(f).table().to_vec())
            .min()
            .expect("group is nonempty");
        by_orbit
            .entry(orbit_key)
            .and_modify(|best| {
                if f.table() < best.table() {
                    *best = f;
                }
            })
            .or_insert(f);
    }
    by_orbit.into_values().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfn::{from_wolfram_code, wolfram_code};
    use crate::perturb::basis;

    fn binary() -> StateSet {
        StateSet::contiguous(1).unwrap()
    }

    fn q3() -> StateSet {
        StateSet::contiguous(2).unwrap()
    }

    #[test]
    fn decompose_the_five_conserving_elementary_rules() {
        let g1 = basis(1, &binary()).unwrap().remove(0).to_lut();

        let dec = decompose(&from_wolfram_code(184)).unwrap().unwrap();
        assert_eq!(dec.split.recipes(), &[vec![1, 0, 0]]);
        assert_eq!(dec.residual, g1);
        assert_eq!(dec.recombine(), from_wolfram_code(184));

        let dec = decompose(&from_wolfram_code(204)).unwrap().unwrap();
        assert_eq!(dec.split.recipes(), &[vec![0, 1, 0]]);
        assert!(dec.residual.table().iter().all(|&v| v == 0));

        let dec = decompose(&from_wolfram_code(226)).unwrap().unwrap();
        assert_eq!(dec.split.recipes(), &[vec![0, 0, 1]]);
        let neg: Vec<i64> = g1.table().iter().map(|&v| -v).collect();
        assert_eq!(dec.residual.table(), &neg[..]);
    }

    #[test]
    fn decompose_reports_monomer_sum_violations() {
        let outcome = decompose(&from_wolfram_code(110)).unwrap();
        assert_eq!(outcome, Err(NcWitness::MonomerSum { q: 1, sum: 2 }));
        // Non-rules are rejected outright.
        let not_rule =
            LocalFunction::from_table(1, binary(), vec![0, 0, 0, 2, 0, 0, 0, 0]).unwrap();
        assert!(decompose(&not_rule).is_err());
    }

    #[test]
    fn decide_matches_the_known_elementary_catalog() {
        let conserving = [170u8, 184, 204, 226, 240];
        for code in 0..=255u8 {
            let verdict = decide_number_conservation(&from_wolfram_code(code)).unwrap();
            assert_eq!(
                verdict.conserving(),
                conserving.contains(&code),
                "code {code}"
            );
        }
    }

    #[test]
    fn identity_rules_conserve() {
        for d in 1..=2 {
            for qstar in 1..=2 {
                let states = StateSet::contiguous(qstar).unwrap();
                let f = LocalFunction::identity(d, states);
                assert!(is_number_conserving(&f).unwrap());
            }
        }
    }

    #[test]
    fn coeff_bound_examples() {
        let pair = DirectionPair::new(Direction::Zero, Direction::Pos(1)).unwrap();
        // All four referenced monomer values zero, m = 2: pinned to 0.
        let h =
            SplitFunction::new(2, q3(), vec![vec![0, 0, 0, 0, 1], vec![0, 0, 0, 0, 2]]).unwrap();
        let b = coeff_bounds(&h, pair, 1, 1).unwrap();
        assert_eq!((b.lower, b.upper), (0, 0));

        // h(M[u:p]) = 1 with the other three zero: bounds (-1, 0).
        let h =
            SplitFunction::new(2, q3(), vec![vec![0, 0, 1, 0, 0], vec![0, 0, 0, 0, 2]]).unwrap();
        let b = coeff_bounds(&h, pair, 1, 2).unwrap();
        assert_eq!((b.lower, b.upper), (-1, 0));

        // Candidates agree with the bounds on contiguous sets.
        for p in 1..=2 {
            for q in 1..=2 {
                let b = coeff_bounds(&h, pair, p, q).unwrap();
                let cands = candidate_coeffs(&h, pair, p, q).unwrap();
                let expect: Vec<i64> = (b.lower..=b.upper).collect();
                assert_eq!(cands, expect);
            }
        }
    }

    #[test]
    fn one_dimensional_binary_catalog() {
        let rules = enumerate_ncca(1, &binary()).unwrap();
        let mut codes: Vec<u32> = rules
            .iter()
            .map(|r| wolfram_code(&r.rule).unwrap())
            .collect();
        codes.sort_unstable();
        assert_eq!(codes, vec![170, 184, 204, 226, 240]);

        // Per-split coefficient sets: the forward shift admits {0, 1},
        // the identity only {0}, the backward shift {-1, 0}.
        let by_split = enumerate_ncca_by_split(1, &binary()).unwrap();
        let mut seen = std::collections::HashMap::new();
        for group in &by_split {
            seen.insert(
                group.split.recipes()[0].clone(),
                group.coeff_vectors.clone(),
            );
        }
        assert_eq!(seen[&vec![1, 0, 0]], vec![vec![0], vec![1]]);
        assert_eq!(seen[&vec![0, 1, 0]], vec![vec![0]]);
        assert_eq!(seen[&vec![0, 0, 1]], vec![vec![-1], vec![0]]);
    }

    #[test]
    fn every_enumerated_rule_passes_the_decider() {
        for (d, qstar) in [(1, 1), (1, 2), (2, 1)] {
            let states = StateSet::contiguous(qstar).unwrap();
            for r in enumerate_ncca(d, &states).unwrap() {
                assert!(r.rule.is_rule());
                assert!(is_number_conserving(&r.rule).unwrap());
                // Round trip through decompose.
                let dec = decompose(&r.rule).unwrap().unwrap();
                assert_eq!(dec.recombine(), r.rule);
                // The residual coefficients are the search's coefficients.
                let catalog = PairCatalog::canonical(d).unwrap();
                let pert = crate::perturb::Perturbation::read_from(&dec.residual, catalog).unwrap();
                assert_eq!(pert.coeffs(), &r.coeffs[..]);
            }
        }
    }

    #[test]
    fn materialize_round_trips() {
        let by_split = enumerate_ncca_by_split(1, &q3()).unwrap();
        let all = enumerate_ncca(1, &q3()).unwrap();
        let mut flat = Vec::new();
        for group in &by_split {
            for coeffs in &group.coeff_vectors {
                flat.push(materialize(&group.split, coeffs).unwrap());
            }
        }
        assert_eq!(flat.len(), all.len());
        for (a, b) in flat.iter().zip(&all) {
            assert_eq!(a, &b.rule);
        }
    }

    #[test]
    fn symmetry_group_sizes() {
        assert_eq!(SignedPermutation::group(1).len(), 2);
        assert_eq!(SignedPermutation::group(2).len(), 8);
        assert_eq!(SignedPermutation::group(3).len(), 48);
    }

    #[test]
    fn reflection_swaps_shift_directions() {
        let group = SignedPermutation::group(1);
        let reflect = group
            .iter()
            .find(|s| **s != SignedPermutation::identity(1))
            .unwrap();
        let f240 = from_wolfram_code(240);
        assert_eq!(wolfram_code(&reflect.apply_to_rule(&f240)).unwrap(), 170);
        let f184 = from_wolfram_code(184);
        assert_eq!(wolfram_code(&reflect.apply_to_rule(&f184)).unwrap(), 226);
        let ident = SignedPermutation::identity(1);
        assert_eq!(ident.apply_to_rule(&f184), f184);
    }

    #[test]
    fn split_and_rule_relabelings_agree() {
        for s in SignedPermutation::group(2) {
            for h in enumerate_splits(2, &binary()).unwrap() {
                assert_eq!(s.apply_to_split(&h).to_lut(), s.apply_to_rule(&h.to_lut()));
            }
        }
    }

    #[test]
    fn enumeration_over_a_gapped_state_set() {
        // {0, 2} admits splits and perturbations like any other finite
        // set; the candidate intersections replace the interval bounds.
        let states = StateSet::new(vec![0, 2]).unwrap();
        let rules = enumerate_ncca(1, &states).unwrap();
        assert!(!rules.is_empty());
        for r in &rules {
            assert!(r.rule.is_rule());
            assert!(is_number_conserving(&r.rule).unwrap());
        }
        // The interval-form bounds are defined for contiguous sets only.
        let h = SplitFunction::new(1, states, vec![vec![0, 2, 0]]).unwrap();
        let pair = DirectionPair::new(Direction::Zero, Direction::Pos(1)).unwrap();
        assert!(coeff_bounds(&h, pair, 2, 2).is_err());
        assert_eq!(candidate_coeffs(&h, pair, 2, 2).unwrap(), vec![0]);
    }

    #[test]
    fn decider_handles_negative_state_sets() {
        let states = StateSet::new(vec![-1, 0, 1]).unwrap();
        let identity = LocalFunction::identity(1, states.clone());
        assert!(is_number_conserving(&identity).unwrap());
        let shift = LocalFunction::shift_toward(1, states.clone(), Direction::Pos(1));
        assert!(is_number_conserving(&shift).unwrap());
        // Swapping the signs of what it reads breaks conservation.
        let negate = LocalFunction::tabulate(1, states, |n| -n.get(Direction::Zero)).unwrap();
        assert!(!is_number_conserving(&negate).unwrap());
    }

    #[test]
    fn orbits_of_the_binary_catalog() {
        let rules: Vec<LocalFunction> = enumerate_ncca(1, &binary())
            .unwrap()
            .into_iter()
            .map(|r| r.rule)
            .collect();
        let reps = orbit_representatives(&rules, 1);
        assert_eq!(reps.len(), 3);
        // {240, 170}, {184, 226} and {204}, each represented by its least
        // LUT member.
        let mut codes: Vec<u32> = reps.iter().map(|f| wolfram_code(f).unwrap()).collect();
        codes.sort_unstable();
        assert_eq!(codes, vec![184, 204, 240]);

        let singleton = vec![from_wolfram_code(240)];
        assert_eq!(orbit_representatives(&singleton, 1), singleton);
    }
}
