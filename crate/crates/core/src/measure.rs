//! Finite measure spaces, partition sub-algebras and dyadic refinement
//! families.
//!
//! A [`MeasureSpace`] is a finite set of weighted points; its σ-algebra is
//! always the full power set. A coarser sub-algebra is given by a
//! [`PartitionAlgebra`] whose blocks are its atoms. Points are tagged either
//! [`PointKind::Atom`] (a genuine atom of the modeled space) or
//! [`PointKind::Cell`] (a fragment of a non-atomic region, refined level by
//! level in a [`RefinementFamily`]).

use serde::{Deserialize, Serialize};

use crate::condexp::SpaceFunction;
use crate::error::{check_len, Error, Result};

/// Largest dyadic depth a family may be asked for.
pub const MAX_DYADIC_DEPTH: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Atom,
    Cell,
}

/// Finite weighted point set. Point identifiers are `0..len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace {
    weights: Vec<f64>,
    kinds: Vec<PointKind>,
}

impl MeasureSpace {
    /// Builds a space from point weights and kinds.
    ///
    /// Every weight must be finite and strictly positive; the error names
    /// the first offending index.
    pub fn new(weights: Vec<f64>, kinds: Vec<PointKind>) -> Result<Self> {
        if weights.len() != kinds.len() {
            return Err(Error::Domain(format!(
                "{} weights but {} kinds",
                weights.len(),
                kinds.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::Domain("a space needs at least one point".into()));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Domain(format!(
                    "weight at index {i} must be positive and finite, got {w}"
                )));
            }
        }
        let space = MeasureSpace { weights, kinds };
        if !space.total_mass().is_finite() {
            return Err(Error::Domain("total mass overflows".into()));
        }
        Ok(space)
    }

    /// Space whose points all share one kind.
    pub fn with_kind(weights: Vec<f64>, kind: PointKind) -> Result<Self> {
        let kinds = vec![kind; weights.len()];
        Self::new(weights, kinds)
    }

    /// `n` atoms of mass `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::with_kind(vec![1.0 / n as f64; n], PointKind::Atom)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, point: usize) -> f64 {
        self.weights[point]
    }

    pub fn kinds(&self) -> &[PointKind] {
        &self.kinds
    }

    pub fn kind(&self, point: usize) -> PointKind {
        self.kinds[point]
    }

    pub fn total_mass(&self) -> f64 {
        crate::condexp::compensated_sum(self.weights.iter().copied())
    }

    /// Position of each point in `[0, 1)`: the midpoint of its slot in the
    /// cumulative mass, divided by the total mass. For a dyadic level this
    /// is the midpoint of each cell of the unit interval.
    pub fn unit_coordinates(&self) -> Vec<f64> {
        let total = self.total_mass();
        let mut acc = 0.0;
        self.weights
            .iter()
            .map(|&w| {
                let mid = acc + 0.5 * w;
                acc += w;
                mid / total
            })
            .collect()
    }

    /// Largest weight among cell points, or `None` when there are none.
    pub fn cell_mesh(&self) -> Option<f64> {
        self.weights
            .iter()
            .zip(&self.kinds)
            .filter(|(_, k)| **k == PointKind::Cell)
            .map(|(w, _)| *w)
            .reduce(f64::max)
    }

    pub(crate) fn check_same(&self, len: usize) -> Result<()> {
        check_len(self.len(), len)
    }
}

/// One block of a partition together with its measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomInfo {
    pub block: usize,
    pub measure: f64,
    /// True when the block is made of `cell` points, i.e. it belongs to the
    /// model of the non-atomic part.
    pub b_model: bool,
}

/// Partition of the points into blocks; the blocks generate the
/// sub-algebra and are its atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionAlgebra {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    masses: Vec<f64>,
    kinds: Vec<PointKind>,
}

impl PartitionAlgebra {
    /// Groups the points of `space` by `assignment[point]`.
    ///
    /// Block indices must be `0..k` with no gaps, and no block may mix
    /// atom and cell points.
    pub fn new(space: &MeasureSpace, assignment: &[usize]) -> Result<Self> {
        space.check_same(assignment.len())?;
        let count = assignment.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (point, &b) in assignment.iter().enumerate() {
            blocks[b].push(point);
        }
        if let Some(empty) = blocks.iter().position(Vec::is_empty) {
            return Err(Error::Domain(format!("block index {empty} is empty")));
        }
        let mut masses = Vec::with_capacity(count);
        let mut kinds = Vec::with_capacity(count);
        for (b, members) in blocks.iter().enumerate() {
            let kind = space.kind(members[0]);
            if members.iter().any(|&x| space.kind(x) != kind) {
                return Err(Error::Domain(format!(
                    "block {b} mixes atom and cell points"
                )));
            }
            kinds.push(kind);
            masses.push(crate::condexp::compensated_sum(
                members.iter().map(|&x| space.weight(x)),
            ));
        }
        Ok(PartitionAlgebra {
            block_of: assignment.to_vec(),
            blocks,
            masses,
            kinds,
        })
    }

    /// The trivial algebra `{∅, X}`; requires a space of one kind.
    pub fn trivial(space: &MeasureSpace) -> Result<Self> {
        Self::new(space, &vec![0; space.len()])
    }

    /// The full algebra: every point is its own block.
    pub fn singletons(space: &MeasureSpace) -> Self {
        let assignment: Vec<usize> = (0..space.len()).collect();
        Self::new(space, &assignment).expect("singleton blocks are always valid")
    }

    /// Consecutive runs of `size` points form a block; a short tail joins
    /// the last full block.
    pub fn consecutive(space: &MeasureSpace, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Domain("block size must be positive".into()));
        }
        let full = (space.len() / size).max(1);
        let assignment: Vec<usize> = (0..space.len()).map(|x| (x / size).min(full - 1)).collect();
        Self::new(space, &assignment)
    }

    /// Adjacent pairs `{2i, 2i+1}`.
    pub fn pairing(space: &MeasureSpace) -> Result<Self> {
        Self::consecutive(space, 2)
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, point: usize) -> usize {
        self.block_of[point]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.block_of
    }

    pub fn block(&self, index: usize) -> &[usize] {
        &self.blocks[index]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_mass(&self, index: usize) -> f64 {
        self.masses[index]
    }

    pub fn block_kind(&self, index: usize) -> PointKind {
        self.kinds[index]
    }

    /// One entry per block with its measure.
    pub fn atoms(&self) -> Vec<AtomInfo> {
        self.masses
            .iter()
            .zip(&self.kinds)
            .enumerate()
            .map(|(block, (&measure, &kind))| AtomInfo {
                block,
                measure,
                b_model: kind == PointKind::Cell,
            })
            .collect()
    }

    /// True iff `f` is constant on every block (exact comparison).
    pub fn is_measurable(&self, f: &SpaceFunction) -> bool {
        f.len() == self.len()
            && self.blocks.iter().all(|members| {
                let first = f[members[0]];
                members.iter().all(|&x| f[x] == first)
            })
    }

    pub(crate) fn check_space(&self, space: &MeasureSpace) -> Result<()> {
        check_len(space.len(), self.len())
    }
}

/// How the sub-algebra is chosen at each dyadic level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockRule {
    /// `𝒜 = Σ`.
    Singletons,
    /// Sibling cells are merged: blocks `{2i, 2i+1}`.
    #[default]
    Pairing,
    /// One block for the whole interval.
    Trivial,
}

impl BlockRule {
    pub fn apply(self, space: &MeasureSpace) -> Result<PartitionAlgebra> {
        match self {
            BlockRule::Singletons => Ok(PartitionAlgebra::singletons(space)),
            BlockRule::Pairing => PartitionAlgebra::pairing(space),
            BlockRule::Trivial => PartitionAlgebra::trivial(space),
        }
    }
}

/// A single resolution of a dyadic family: `2^resolution` equal cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub resolution: u32,
    pub space: MeasureSpace,
    pub partition: PartitionAlgebra,
}

/// Levels of increasingly fine dyadic cells of one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementFamily {
    levels: Vec<Level>,
    parent_maps: Vec<Vec<usize>>,
}

impl RefinementFamily {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// `parent_map(l)[child]` is the index of the level-`l` point that the
    /// level-`l+1` point `child` refines.
    pub fn parent_map(&self, level: usize) -> &[usize] {
        &self.parent_maps[level]
    }

    /// Largest cell weight per level.
    pub fn mesh(&self) -> Vec<f64> {
        self.levels
            .iter()
            .map(|l| l.space.cell_mesh().unwrap_or(0.0))
            .collect()
    }
}

/// The dyadic level with `2^resolution` cells of an interval of mass
/// `mass`.
pub fn dyadic_level(resolution: u32, mass: f64, rule: BlockRule) -> Result<Level> {
    if resolution > MAX_DYADIC_DEPTH + 1 {
        return Err(Error::Resource(format!(
            "resolution {resolution} exceeds the cap of {}",
            MAX_DYADIC_DEPTH + 1
        )));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::Domain(format!(
            "interval mass must be positive, got {mass}"
        )));
    }
    let cells = 1usize << resolution;
    let space = MeasureSpace::with_kind(vec![mass / cells as f64; cells], PointKind::Cell)?;
    let partition = rule.apply(&space)?;
    Ok(Level {
        resolution,
        space,
        partition,
    })
}

/// Family with levels of `2, 4, …, 2^(depth+1)` cells.
pub fn dyadic_family(depth: u32, mass: f64, rule: BlockRule) -> Result<RefinementFamily> {
    if depth < 1 {
        return Err(Error::Domain("depth must be at least 1".into()));
    }
    if depth > MAX_DYADIC_DEPTH {
        return Err(Error::Resource(format!(
            "depth {depth} exceeds the cap of {MAX_DYADIC_DEPTH}"
        )));
    }
    let levels = (1..=depth + 1)
        .map(|r| dyadic_level(r, mass, rule))
        .collect::<Result<Vec<_>>>()?;
    let parent_maps = levels[1..]
        .iter()
        .map(|l| (0..l.space.len()).map(|child| child / 2).collect())
        .collect();
    Ok(RefinementFamily {
        levels,
        parent_maps,
    })
}

/// `count` atoms with masses `2^-1, …, 2^-count`, each its own block.
pub fn geometric_atoms(count: u32) -> Result<(MeasureSpace, PartitionAlgebra)> {
    if count == 0 || count > 60 {
        return Err(Error::Domain(format!("atom count {count} outside 1..=60")));
    }
    let weights = (1..=count).map(|n| (-(n as f64)).exp2()).collect();
    let space = MeasureSpace::with_kind(weights, PointKind::Atom)?;
    let partition = PartitionAlgebra::singletons(&space);
    Ok((space, partition))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms4(weights: [f64; 4]) -> MeasureSpace {
        MeasureSpace::with_kind(weights.to_vec(), PointKind::Atom).unwrap()
    }

    #[test]
    fn uniform_space_has_unit_mass() {
        let s = atoms4([0.25; 4]);
        assert_eq!(s.len(), 4);
        assert_eq!(s.total_mass(), 1.0);
        let s = atoms4([0.1, 0.3, 0.3, 0.3]);
        assert!((s.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_weight_names_index() {
        let err = MeasureSpace::with_kind(vec![0.5, 0.0, 0.5], PointKind::Atom).unwrap_err();
        assert!(
            matches!(&err, Error::Domain(m) if m.contains("index 1")),
            "{err}"
        );
        let err = MeasureSpace::with_kind(vec![0.5, f64::NAN], PointKind::Atom).unwrap_err();
        assert!(matches!(&err, Error::Domain(m) if m.contains("index 1")));
    }

    #[test]
    fn partitions() {
        let s = atoms4([0.25; 4]);
        let p = PartitionAlgebra::new(&s, &[0, 0, 1, 1]).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2, 3]]);
        let t = PartitionAlgebra::trivial(&s).unwrap();
        assert_eq!(t.num_blocks(), 1);
        let full = PartitionAlgebra::singletons(&s);
        assert_eq!(full.num_blocks(), 4);
        assert!(matches!(
            PartitionAlgebra::new(&s, &[0, 0, 2, 2]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            PartitionAlgebra::new(&s, &[0, 0, 1]),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn mixed_block_rejected() {
        let s = MeasureSpace::new(vec![0.5, 0.5], vec![PointKind::Atom, PointKind::Cell]).unwrap();
        assert!(matches!(
            PartitionAlgebra::trivial(&s),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn atom_measures() {
        let s = atoms4([0.25; 4]);
        let p = PartitionAlgebra::new(&s, &[0, 0, 1, 1]).unwrap();
        let m: Vec<f64> = p.atoms().iter().map(|a| a.measure).collect();
        assert_eq!(m, vec![0.5, 0.5]);

        let s = atoms4([0.1, 0.3, 0.3, 0.3]);
        let p = PartitionAlgebra::new(&s, &[0, 0, 1, 1]).unwrap();
        let m: Vec<f64> = p.atoms().iter().map(|a| a.measure).collect();
        assert!((m[0] - 0.4).abs() < 1e-15 && (m[1] - 0.6).abs() < 1e-15);

        let p = PartitionAlgebra::singletons(&s);
        let m: Vec<f64> = p.atoms().iter().map(|a| a.measure).collect();
        assert_eq!(m, s.weights());
        assert!(p.atoms().iter().all(|a| !a.b_model));
    }

    #[test]
    fn dyadic_levels_and_mesh() {
        let fam = dyadic_family(1, 1.0, BlockRule::Pairing).unwrap();
        assert_eq!(fam.levels().len(), 2);
        assert_eq!(fam.levels()[0].space.weights(), &[0.5, 0.5]);
        assert_eq!(fam.levels()[1].space.weights(), &[0.25; 4]);

        let fam = dyadic_family(3, 1.0, BlockRule::Singletons).unwrap();
        assert_eq!(fam.mesh(), vec![0.5, 0.25, 0.125, 0.0625]);
        for level in fam.levels() {
            assert_eq!(level.space.total_mass(), 1.0);
        }
        for (l, pm) in fam.parent_maps.iter().enumerate() {
            let coarse = &fam.levels()[l].space;
            let fine = &fam.levels()[l + 1].space;
            let mut sums = vec![0.0; coarse.len()];
            for (child, &parent) in pm.iter().enumerate() {
                sums[parent] += fine.weight(child);
            }
            assert_eq!(sums, coarse.weights());
        }
    }

    #[test]
    fn dyadic_caps() {
        assert!(matches!(
            dyadic_family(21, 1.0, BlockRule::Pairing),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            dyadic_family(0, 1.0, BlockRule::Pairing),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn measurability() {
        let s = atoms4([0.25; 4]);
        let p = PartitionAlgebra::new(&s, &[0, 0, 1, 1]).unwrap();
        assert!(p.is_measurable(&SpaceFunction::from_real(&[5.0, 5.0, 7.0, 7.0])));
        assert!(!p.is_measurable(&SpaceFunction::from_real(&[5.0, 6.0, 7.0, 7.0])));
        let t = PartitionAlgebra::trivial(&s).unwrap();
        assert!(t.is_measurable(&SpaceFunction::from_real(&[3.0; 4])));
    }

    #[test]
    fn geometric_atom_masses() {
        let (s, p) = geometric_atoms(5).unwrap();
        assert_eq!(s.weights(), &[0.5, 0.25, 0.125, 0.0625, 0.03125]);
        assert_eq!(p.num_blocks(), 5);
    }
}
