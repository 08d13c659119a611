//! Recognizers for operators given only as matrices: decide whether `T` is
//! `f ↦ E(wf)` or `f ↦ k·E(wf)` for some partition algebra and recover the
//! partition, `w` and `k`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::condexp::{cond_exp, SpaceFunction};
use crate::error::{Error, Result};
use crate::measure::{MeasureSpace, PartitionAlgebra};
use crate::oracle::{self, OracleConfig};
use crate::weighted::{lp_norm, CondOperator, OperatorMatrix};

/// Relative tolerance for row equality and for the rebuild check.
pub const ROW_TOLERANCE: f64 = 1e-10;

/// A linear operator on a finite space with no partition attached.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractOperator {
    space: MeasureSpace,
    matrix: DMatrix<Complex64>,
}

impl AbstractOperator {
    pub fn new(space: MeasureSpace, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = space.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::SpaceMismatch {
                expected: n,
                found: if matrix.nrows() != n {
                    matrix.nrows()
                } else {
                    matrix.ncols()
                },
            });
        }
        Ok(AbstractOperator { space, matrix })
    }

    /// Forgets the structure of a [`CondOperator`].
    pub fn from_operator(op: &CondOperator) -> Self {
        AbstractOperator {
            space: op.space().clone(),
            matrix: op.matrix().matrix().clone(),
        }
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, f: &SpaceFunction) -> SpaceFunction {
        OperatorMatrix::new(self.matrix.clone(), self.space.weights().to_vec()).apply(f)
    }

    fn scale(&self) -> f64 {
        self.matrix.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub passed: bool,
    pub residual: f64,
}

impl HypothesisCheck {
    fn at_most(residual: f64, tolerance: f64) -> Self {
        HypothesisCheck {
            passed: residual <= tolerance,
            residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// Most negative entry (0 when all entries are nonnegative reals).
    pub positivity: HypothesisCheck,
    pub idempotent: HypothesisCheck,
    pub unital: HypothesisCheck,
    pub multiplicative: HypothesisCheck,
    pub sublattice: HypothesisCheck,
    pub probes: usize,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    pub fn failed(&self) -> Vec<&'static str> {
        [
            ("positivity", &self.positivity),
            ("idempotent", &self.idempotent),
            ("unital", &self.unital),
            ("multiplicative", &self.multiplicative),
            ("sublattice", &self.sublattice),
        ]
        .into_iter()
        .filter(|(_, c)| !c.passed)
        .map(|(name, _)| name)
        .collect()
    }

    pub fn all_passed(&self) -> bool {
        self.failed().is_empty()
    }
}

fn random_probe(rng: &mut ChaCha8Rng, n: usize) -> SpaceFunction {
    SpaceFunction::from_real(&(0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>())
}

/// Checks the projection hypotheses on `probes` seeded random functions.
pub fn verify_projection_hypotheses(
    t: &AbstractOperator,
    probes: usize,
    seed: u64,
) -> Result<HypothesisReport> {
    if probes == 0 {
        return Err(Error::Domain("probes must be at least 1".into()));
    }
    let n = t.space.len();
    let scale = t.scale().max(f64::MIN_POSITIVE);
    let m = &t.matrix;

    let most_negative = m
        .iter()
        .map(|v| {
            if v.im.abs() > 1e-12 * scale {
                -v.norm()
            } else {
                v.re
            }
        })
        .fold(0.0, f64::min);
    let positivity = HypothesisCheck {
        passed: most_negative >= -1e-12 * scale,
        residual: -most_negative,
    };

    // The matrix acts on values, so T∘T is the plain matrix square.
    let idem = (m * m - m).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let idempotent = HypothesisCheck::at_most(idem, ROW_TOLERANCE * scale);

    let t1 = t.apply(&SpaceFunction::ones(n));
    let unital = HypothesisCheck::at_most(t1.sub(&SpaceFunction::ones(n)).max_abs(), ROW_TOLERANCE);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mult: f64 = 0.0;
    let mut lattice: f64 = 0.0;
    let op_matrix = OperatorMatrix::new(m.clone(), t.space.weights().to_vec());
    let cfg = OracleConfig::with_seed(seed);
    for _ in 0..probes {
        let f = random_probe(&mut rng, n);
        let g = random_probe(&mut rng, n);
        let tf = t.apply(&f);
        let tg = t.apply(&g);
        let lhs = t.apply(&f.mul(&tg));
        let denom = tf.max_abs().max(1.0) * tg.max_abs().max(1.0);
        mult = mult.max(lhs.sub(&tf.mul(&tg)).max_abs() / denom);

        let abs = tf.abs();
        let norm = lp_norm(&t.space, &abs, 2.0);
        if norm > 0.0 {
            lattice = lattice.max(oracle::distance_to_range(&op_matrix, &abs, 2.0, &cfg) / norm);
        }
    }
    Ok(HypothesisReport {
        positivity,
        idempotent,
        unital,
        multiplicative: HypothesisCheck::at_most(mult, 1e-9),
        sublattice: HypothesisCheck::at_most(lattice, 1e-9),
        probes,
        notes: vec!["order continuity holds automatically on a finite space".into()],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredStructure {
    /// Block index of every point.
    pub assignment: Vec<usize>,
    pub w: SpaceFunction,
    pub k: Option<SpaceFunction>,
    /// Normalizations that were verified, e.g. `"E(w)=1"`.
    pub normalizations: Vec<String>,
    /// Largest entry difference between the rebuilt operator and `T`,
    /// relative to the largest entry of `T`.
    pub rebuild_residual: f64,
    /// Largest disagreement between the `w` (and gauge) read off different
    /// rows of one block.
    pub uniqueness_residual: f64,
}

impl RecoveredStructure {
    pub fn partition(&self, space: &MeasureSpace) -> Result<PartitionAlgebra> {
        PartitionAlgebra::new(space, &self.assignment)
    }
}

fn rows_close(m: &DMatrix<Complex64>, a: usize, b: usize, tol: f64) -> bool {
    (0..m.ncols()).all(|y| (m[(a, y)] - m[(b, y)]).norm() <= tol)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = x;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

/// Single-linkage clustering of equal rows, blocks numbered by their lowest
/// point.
fn cluster_rows(m: &DMatrix<Complex64>, tol: f64) -> Vec<usize> {
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        (0..m.ncols())
            .map(|y| {
                m[(a, y)]
                    .re
                    .total_cmp(&m[(b, y)].re)
                    .then(m[(a, y)].im.total_cmp(&m[(b, y)].im))
            })
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut parent: Vec<usize> = (0..n).collect();
    for pair in order.windows(2) {
        if rows_close(m, pair[0], pair[1], tol) {
            let (ra, rb) = (find(&mut parent, pair[0]), find(&mut parent, pair[1]));
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut assignment = vec![0; n];
    for (x, slot) in assignment.iter_mut().enumerate() {
        let r = find(&mut parent, x);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        *slot = label[r];
    }
    assignment
}

fn block_masses(space: &MeasureSpace, assignment: &[usize]) -> Vec<f64> {
    let blocks = assignment.iter().copied().max().map_or(0, |b| b + 1);
    let mut masses = vec![0.0; blocks];
    for (x, &b) in assignment.iter().enumerate() {
        masses[b] += space.weight(x);
    }
    masses
}

/// Compares `T` with `k(x)·w(y)·μ(y)/μ(A)` on each block; names the first
/// violating entry.
fn rebuild_check(
    t: &AbstractOperator,
    assignment: &[usize],
    w: &SpaceFunction,
    k: &SpaceFunction,
) -> Result<f64> {
    let masses = block_masses(&t.space, assignment);
    let scale = t.scale().max(f64::MIN_POSITIVE);
    let n = t.space.len();
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            let rebuilt = if assignment[x] == assignment[y] {
                k[x] * w[y] * (t.space.weight(y) / masses[assignment[x]])
            } else {
                Complex64::new(0.0, 0.0)
            };
            let diff = (t.matrix[(x, y)] - rebuilt).norm() / scale;
            if diff > ROW_TOLERANCE {
                return Err(Error::NotConditionalType(
                    if assignment[x] == assignment[y] {
                        format!("rows {x} and {y} share a block but do not factor (entry ({x},{y}) off by {diff:e})")
                    } else {
                        format!("rows {x} and {y} differ but entry ({x},{y}) is nonzero ({diff:e} relative)")
                    },
                ));
            }
            worst = worst.max(diff);
        }
    }
    Ok(worst)
}

fn first_rows(assignment: &[usize]) -> Vec<usize> {
    let blocks = assignment.iter().copied().max().map_or(0, |b| b + 1);
    let mut rep = vec![usize::MAX; blocks];
    for (x, &b) in assignment.iter().enumerate() {
        if rep[b] == usize::MAX {
            rep[b] = x;
        }
    }
    rep
}

/// Recovers `(𝒜, w)` with `T f = E(w f)`.
pub fn recover_structure(t: &AbstractOperator) -> Result<RecoveredStructure> {
    let n = t.space.len();
    let scale = t.scale().max(f64::MIN_POSITIVE);
    let assignment = cluster_rows(&t.matrix, ROW_TOLERANCE * scale);
    let masses = block_masses(&t.space, &assignment);
    let rep = first_rows(&assignment);
    let w = SpaceFunction::new(
        (0..n)
            .map(|y| {
                let b = assignment[y];
                t.matrix[(rep[b], y)] * (masses[b] / t.space.weight(y))
            })
            .collect(),
    );
    let rebuild_residual = rebuild_check(t, &assignment, &w, &SpaceFunction::ones(n))?;
    let mut normalizations = Vec::new();
    let partition = PartitionAlgebra::new(&t.space, &assignment)?;
    let ew = cond_exp(&t.space, &partition, &w)?;
    if ew.iter().all(|v| (v - 1.0).norm() <= ROW_TOLERANCE) {
        normalizations.push("E(w)=1".into());
    }
    if w.is_nonnegative() {
        normalizations.push("w>=0".into());
    }
    Ok(RecoveredStructure {
        assignment,
        w,
        k: None,
        normalizations,
        rebuild_residual,
        uniqueness_residual: 0.0,
    })
}

/// Recovers `(𝒜, w, k)` with `T f = k·E(w f)`, `E(k) = 1` and `E(wk) = 1`.
pub fn recover_two_sided(t: &AbstractOperator) -> Result<RecoveredStructure> {
    let n = t.space.len();
    let t1 = t.apply(&SpaceFunction::ones(n));
    if let Some(x) = (0..n).find(|&x| !(t1[x].re > 1e-12 && t1[x].im.abs() <= 1e-12)) {
        return Err(Error::Precondition(format!(
            "T1 is not strictly positive at point {x} (value {})",
            t1[x]
        )));
    }
    // Rows of k·E(w·) are multiples of each other within a block; dividing
    // by T1 makes them equal.
    let normalized = DMatrix::from_fn(n, n, |x, y| t.matrix[(x, y)] / t1[x].re);
    let scale = normalized.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let assignment = cluster_rows(&normalized, ROW_TOLERANCE * scale);
    let partition = PartitionAlgebra::new(&t.space, &assignment)?;
    let masses = block_masses(&t.space, &assignment);
    let e_t1 = cond_exp(&t.space, &partition, &t1)?;
    let k = SpaceFunction::new((0..n).map(|x| t1[x] / e_t1[x]).collect());
    let w_from = |x: usize, y: usize| {
        let b = assignment[y];
        t.matrix[(x, y)] * (masses[b] / (t.space.weight(y) * k[x]))
    };
    let rep = first_rows(&assignment);
    let w = SpaceFunction::new((0..n).map(|y| w_from(rep[assignment[y]], y)).collect());
    let rebuild_residual = rebuild_check(t, &assignment, &w, &k)?;

    let w_scale = w.max_abs().max(f64::MIN_POSITIVE);
    let mut uniqueness_residual: f64 = 0.0;
    for (x, &b) in assignment.iter().enumerate() {
        for y in partition.block(b) {
            uniqueness_residual = uniqueness_residual.max((w_from(x, *y) - w[*y]).norm() / w_scale);
        }
    }
    let ewk = cond_exp(&t.space, &partition, &w.mul(&k))?;
    let off = ewk.iter().map(|v| (v - 1.0).norm()).fold(0.0, f64::max);
    if off > ROW_TOLERANCE.max(1e-9) {
        return Err(Error::NotConditionalType(format!(
            "recovered factors give E(wk) off from 1 by {off:e}"
        )));
    }
    Ok(RecoveredStructure {
        assignment,
        w,
        k: Some(k),
        normalizations: vec!["E(k)=1".into(), "E(wk)=1".into()],
        rebuild_residual,
        uniqueness_residual,
    })
}

/// Matrix of `f ↦ k·E(w f)` on a partition.
pub fn build_operator(
    space: &MeasureSpace,
    partition: &PartitionAlgebra,
    w: &SpaceFunction,
    k: &SpaceFunction,
) -> Result<AbstractOperator> {
    let op = CondOperator::new(
        space.clone(),
        partition.clone(),
        w.clone(),
        k.clone(),
        crate::weighted::ExponentPair::same(2.0)?,
        crate::weighted::Codomain::Sigma,
    )?;
    Ok(AbstractOperator::from_operator(&op))
}
