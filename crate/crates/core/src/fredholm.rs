//! Kernel, range, index and invertibility of `M_w E M_u`, the witness
//! constructions for infinite-dimensional kernels and cokernels, and
//! refinement sweeps that show the Fredholm/invertible dichotomy on
//! non-atomic models.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condexp::{FunctionRule, SpaceFunction};
use crate::error::{Error, Result};
use crate::measure::{Level, PartitionAlgebra, PointKind};
use crate::oracle::{self, OracleConfig, WeightedSvd};
use crate::weighted::{Codomain, CondOperator, ExponentPair};

/// Tolerance for "lies in the kernel" checks, relative to the operator
/// scale.
pub const KERNEL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjointCheck {
    /// `dim N(T*)` from the independently built adjoint operator.
    pub adjoint_kernel_dim: usize,
    /// `n − rank`: the codimension of the range inside `L^2(Σ)`.
    pub sigma_codim: usize,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FredholmReport {
    pub codomain: Codomain,
    pub kernel_dim: usize,
    pub range_rank: usize,
    pub codim: usize,
    pub index: i64,
    /// Minimum modulus over the whole domain; 0 when not injective.
    pub bounded_below: f64,
    pub invertible: bool,
    /// Present for `p = q = 2`.
    pub adjoint_check: Option<AdjointCheck>,
}

fn scale_of(op: &CondOperator) -> f64 {
    let m = op.matrix();
    m.matrix()
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE)
}

/// Weighted-orthonormal basis of the numeric nullspace.
pub fn kernel_basis(op: &CondOperator, cfg: &OracleConfig) -> Vec<SpaceFunction> {
    WeightedSvd::new(&op.matrix()).kernel_basis(cfg.rank_tolerance_factor)
}

/// Rank, codimension in the declared codomain, index, and (for `p = q = 2`)
/// the cross-check against `dim N(T*)`.
pub fn range_analysis(op: &CondOperator, cfg: &OracleConfig) -> FredholmReport {
    let matrix = op.matrix();
    let n = op.space().len();
    let rank = oracle::numeric_rank(&matrix, cfg);
    let kernel_dim = n - rank;
    let codim = op.codomain_dim().saturating_sub(rank);
    let e = op.exponents();
    let bounded_below = if kernel_dim == 0 {
        oracle::min_modulus(&matrix, e, false, cfg).value
    } else {
        0.0
    };
    let adjoint_check = (e.p == 2.0 && e.q == 2.0).then(|| {
        let adjoint_rank = oracle::numeric_rank(&op.adjoint().matrix(), cfg);
        let adjoint_kernel_dim = n - adjoint_rank;
        AdjointCheck {
            adjoint_kernel_dim,
            sigma_codim: n - rank,
            agrees: adjoint_kernel_dim == n - rank,
        }
    });
    FredholmReport {
        codomain: op.codomain(),
        kernel_dim,
        range_rank: rank,
        codim,
        index: kernel_dim as i64 - codim as i64,
        bounded_below,
        invertible: kernel_dim == 0 && codim == 0,
        adjoint_check,
    }
}

/// `(invertible, bounded_below)` onto `L^q(𝒜)`.
pub fn is_invertible(op: &CondOperator, cfg: &OracleConfig) -> Result<(bool, f64)> {
    if op.codomain() != Codomain::Algebra {
        return Err(Error::Precondition(
            "invertibility is judged onto the algebra codomain".into(),
        ));
    }
    let r = range_analysis(op, cfg);
    Ok((r.invertible, r.bounded_below))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessFamily {
    pub witnesses: Vec<SpaceFunction>,
    /// Largest `‖T f_n‖_∞` (or `‖T* g_n‖_∞`) over the family.
    pub max_residual: f64,
    pub notes: Vec<String>,
}

fn is_union_of_blocks(partition: &PartitionAlgebra, set: &[usize]) -> bool {
    set.iter().all(|&x| {
        partition
            .block(partition.block_of(x))
            .iter()
            .all(|y| set.contains(y))
    })
}

/// `f_n = f·χ_{S(f)∩A_n}` for `𝒜`-measurable `A_n`; each is again in the
/// kernel because `T(f χ_A) = χ_A T(f)`.
pub fn kernel_witness_family(
    op: &CondOperator,
    f: &SpaceFunction,
    subblocks: &[Vec<usize>],
) -> Result<WitnessFamily> {
    let n = op.space().len();
    let tol = KERNEL_TOLERANCE * scale_of(op) * f.max_abs().max(f64::MIN_POSITIVE);
    let image = op.apply(f)?;
    if image.max_abs() > tol {
        return Err(Error::Precondition(format!(
            "f is not in the kernel: ‖Tf‖_∞ = {:e}",
            image.max_abs()
        )));
    }
    let support = f.support(1e-12 * f.max_abs());
    let mut witnesses = Vec::new();
    let mut notes = Vec::new();
    let mut max_residual: f64 = 0.0;
    for (i, set) in subblocks.iter().enumerate() {
        if let Some(&x) = set.iter().find(|&&x| x >= n) {
            return Err(Error::Domain(format!(
                "subblock {i} names point {x} outside the space"
            )));
        }
        if !is_union_of_blocks(op.partition(), set) {
            return Err(Error::Precondition(format!(
                "subblock {i} is not A-measurable"
            )));
        }
        let piece: Vec<usize> = set
            .iter()
            .copied()
            .filter(|x| support.contains(x))
            .collect();
        if piece.is_empty() {
            notes.push(format!("subblock {i} misses S(f); witness omitted"));
            continue;
        }
        let w = f.mul(&SpaceFunction::indicator(n, &piece));
        max_residual = max_residual.max(op.apply(&w)?.max_abs());
        witnesses.push(w);
    }
    if max_residual > tol {
        return Err(Error::Precondition(format!(
            "kernel witness residual {max_residual:e} above tolerance"
        )));
    }
    Ok(WitnessFamily {
        witnesses,
        max_residual,
        notes,
    })
}

/// `⟨f, g⟩ = Σ f·conj(g)·μ`.
pub fn pairing(weights: &[f64], f: &SpaceFunction, g: &SpaceFunction) -> Complex64 {
    f.iter()
        .zip(g.iter())
        .zip(weights)
        .map(|((a, b), w)| a * b.conj() * *w)
        .sum()
}

/// `g_n = g0·χ_{E_n}` for a `g0` annihilating the range; each piece is
/// checked to lie in `N(T*)`.
pub fn cokernel_witness_family(
    op: &CondOperator,
    g0: &SpaceFunction,
    pieces: &[Vec<usize>],
    cfg: &OracleConfig,
) -> Result<WitnessFamily> {
    let n = op.space().len();
    if g0.len() != n {
        return Err(Error::SpaceMismatch {
            expected: n,
            found: g0.len(),
        });
    }
    let mut seen = vec![false; n];
    for (i, set) in pieces.iter().enumerate() {
        for &x in set {
            if x >= n {
                return Err(Error::Domain(format!(
                    "piece {i} names point {x} outside the space"
                )));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::Precondition(format!("pieces overlap at point {x}")));
            }
        }
    }
    if g0.max_abs() == 0.0 {
        return Ok(WitnessFamily {
            witnesses: Vec::new(),
            max_residual: 0.0,
            notes: vec!["g0 = 0: empty family".into()],
        });
    }
    let weights = op.space().weights();
    let matrix = op.matrix();
    let g_norm = crate::weighted::lp_norm(op.space(), g0, 2.0);
    for (k, r) in WeightedSvd::new(&matrix)
        .range_basis(cfg.rank_tolerance_factor)
        .iter()
        .enumerate()
    {
        let c = pairing(weights, r, g0).norm();
        if c > KERNEL_TOLERANCE * g_norm {
            return Err(Error::Precondition(format!(
                "g0 does not annihilate the range: pairing with range vector {k} is {c:e}"
            )));
        }
    }
    let adjoint = op.adjoint();
    let tol = KERNEL_TOLERANCE * scale_of(op) * g0.max_abs();
    let mut witnesses = Vec::new();
    let mut max_residual: f64 = 0.0;
    for (i, set) in pieces.iter().enumerate() {
        let g = g0.mul(&SpaceFunction::indicator(n, set));
        let residual = adjoint.apply(&g)?.max_abs();
        if residual > tol {
            return Err(Error::Precondition(format!(
                "piece {i} does not give an element of N(T*): residual {residual:e}"
            )));
        }
        max_residual = max_residual.max(residual);
        witnesses.push(g);
    }
    Ok(WitnessFamily {
        witnesses,
        max_residual,
        notes: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVerdict {
    FredholmFails,
    InvertibleUniform,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub resolution: u32,
    pub report: FredholmReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub verdict: SweepVerdict,
}

/// Applies the divergence and uniformity rules to per-level reports.
pub fn sweep_verdict(rows: &[SweepRow]) -> SweepVerdict {
    let tail = &rows[rows.len().saturating_sub(3)..];
    let increasing = |f: fn(&FredholmReport) -> usize| {
        tail.len() == 3 && tail.windows(2).all(|w| f(&w[1].report) > f(&w[0].report))
    };
    if increasing(|r| r.kernel_dim) || increasing(|r| r.codim) {
        return SweepVerdict::FredholmFails;
    }
    if let Some(first) = rows.first() {
        let min = rows
            .iter()
            .map(|r| r.report.bounded_below)
            .fold(f64::INFINITY, f64::min);
        if rows.iter().all(|r| r.report.index == 0)
            && min >= 0.5 * first.report.bounded_below
            && min > 0.0
        {
            return SweepVerdict::InvertibleUniform;
        }
    }
    SweepVerdict::Inconclusive
}

/// `E M_u` with `u` sampled from `rule` at each level, analysed into
/// `L^q(𝒜)`. Levels are evaluated concurrently.
pub fn dichotomy_sweep(
    levels: &[Level],
    rule: &FunctionRule,
    exponents: ExponentPair,
    cfg: &OracleConfig,
) -> Result<SweepReport> {
    if levels.is_empty() {
        return Err(Error::Domain("a sweep needs at least one level".into()));
    }
    if let Some(l) = levels
        .iter()
        .find(|l| l.space.kinds().iter().any(|&k| k != PointKind::Cell))
    {
        return Err(Error::Domain(format!(
            "level {} contains atoms; the sweep models a non-atomic space",
            l.resolution
        )));
    }
    let rows = levels
        .par_iter()
        .map(|level| {
            let u = rule.sample(&level.space);
            let op =
                CondOperator::em_u(level.space.clone(), level.partition.clone(), u, exponents)?;
            Ok(SweepRow {
                resolution: level.resolution,
                report: range_analysis(&op, cfg),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        verdict: sweep_verdict(&rows),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{dyadic_level, BlockRule, MeasureSpace};

    fn l2() -> ExponentPair {
        ExponentPair::same(2.0).unwrap()
    }

    fn op4(u: &[f64], codomain: Codomain) -> CondOperator {
        let s = MeasureSpace::uniform(4).unwrap();
        let p = PartitionAlgebra::new(&s, &[0, 0, 1, 1]).unwrap();
        CondOperator::em_u(s, p, SpaceFunction::from_real(u), l2())
            .unwrap()
            .with_codomain(codomain)
            .unwrap()
    }

    #[test]
    fn kernel_examples() {
        let cfg = OracleConfig::default();
        let s = MeasureSpace::uniform(2).unwrap();
        let p = PartitionAlgebra::trivial(&s).unwrap();
        let e = CondOperator::em_u(s, p, SpaceFunction::ones(2), l2()).unwrap();
        let k = kernel_basis(&e, &cfg);
        assert_eq!(k.len(), 1);
        assert!((k[0][0] + k[0][1]).norm() < 1e-12);

        let s = MeasureSpace::uniform(3).unwrap();
        let p = PartitionAlgebra::singletons(&s);
        let d =
            CondOperator::em_u(s, p, SpaceFunction::from_real(&[1.0, -2.0, 0.5]), l2()).unwrap();
        assert!(kernel_basis(&d, &cfg).is_empty());

        let op = op4(&[0.0, 0.0, 1.0, 1.0], Codomain::Algebra);
        let k = kernel_basis(&op, &cfg);
        assert_eq!(k.len(), 3);
        for b in &k {
            assert!(op.apply(b).unwrap().max_abs() <= 1e-9);
        }
    }

    #[test]
    fn range_examples() {
        let cfg = OracleConfig::default();
        let r = range_analysis(&op4(&[1.0; 4], Codomain::Algebra), &cfg);
        assert_eq!((r.range_rank, r.codim, r.kernel_dim, r.index), (2, 0, 2, 2));
        let r = range_analysis(&op4(&[1.0; 4], Codomain::Sigma), &cfg);
        assert_eq!((r.codim, r.index), (2, 0));
        assert!(r.adjoint_check.unwrap().agrees);
        let r = range_analysis(&op4(&[0.0; 4], Codomain::Algebra), &cfg);
        assert_eq!((r.kernel_dim, r.codim, r.index), (4, 2, 2));
        assert!(!r.invertible);
    }

    #[test]
    fn invertibility_examples() {
        let cfg = OracleConfig::default();
        let s = MeasureSpace::uniform(3).unwrap();
        let p = PartitionAlgebra::singletons(&s);
        let d = CondOperator::em_u(s, p, SpaceFunction::from_real(&[0.4, 0.9, 2.0]), l2()).unwrap();
        let (inv, beta) = is_invertible(&d, &cfg).unwrap();
        assert!(inv);
        assert!((beta - 0.4).abs() < 1e-12);

        assert!(
            !is_invertible(&op4(&[1.0; 4], Codomain::Algebra), &cfg)
                .unwrap()
                .0
        );
        assert!(
            !is_invertible(&op4(&[0.0; 4], Codomain::Algebra), &cfg)
                .unwrap()
                .0
        );
        assert!(is_invertible(&op4(&[1.0; 4], Codomain::Sigma), &cfg).is_err());
    }

    #[test]
    fn kernel_witness_examples() {
        let op = op4(&[0.0, 0.0, 1.0, 1.0], Codomain::Algebra);
        let f = SpaceFunction::from_real(&[1.0, 1.0, 0.0, 0.0]);
        // Singletons of block 0 are not 𝒜-measurable; the whole block is.
        assert!(kernel_witness_family(&op, &f, &[vec![0], vec![1]]).is_err());
        let fam = kernel_witness_family(&op, &f, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(fam.witnesses.len(), 1);
        assert_eq!(fam.notes.len(), 1);

        let s = MeasureSpace::uniform(4).unwrap();
        let fine = PartitionAlgebra::singletons(&s);
        let op = CondOperator::em_u(
            s,
            fine,
            SpaceFunction::from_real(&[0.0, 0.0, 1.0, 1.0]),
            l2(),
        )
        .unwrap();
        let fam = kernel_witness_family(&op, &f, &[vec![0], vec![1]]).unwrap();
        assert_eq!(fam.witnesses.len(), 2);

        let s = MeasureSpace::uniform(2).unwrap();
        let p = PartitionAlgebra::trivial(&s).unwrap();
        let e = CondOperator::em_u(s, p, SpaceFunction::ones(2), l2()).unwrap();
        let f = SpaceFunction::from_real(&[1.0, -1.0]);
        let fam = kernel_witness_family(&e, &f, &[vec![0, 1]]).unwrap();
        assert_eq!(fam.witnesses, vec![f.clone()]);
        assert!(kernel_witness_family(&e, &SpaceFunction::ones(2), &[vec![0, 1]]).is_err());
    }

    #[test]
    fn cokernel_witness_examples() {
        let cfg = OracleConfig::default();
        let op = op4(&[0.0, 0.0, 1.0, 1.0], Codomain::Sigma);
        let g0 = SpaceFunction::from_real(&[1.0, 1.0, 0.0, 0.0]);
        let fam = cokernel_witness_family(&op, &g0, &[vec![0], vec![1]], &cfg).unwrap();
        assert_eq!(fam.witnesses.len(), 2);
        assert!(fam.max_residual <= 1e-12);

        let fam = cokernel_witness_family(&op, &SpaceFunction::zeros(4), &[vec![0]], &cfg).unwrap();
        assert!(fam.witnesses.is_empty());

        let s = MeasureSpace::uniform(3).unwrap();
        let p = PartitionAlgebra::singletons(&s);
        let d = CondOperator::em_u(s, p, SpaceFunction::from_real(&[1.0, 2.0, 3.0]), l2()).unwrap();
        let err = cokernel_witness_family(&d, &SpaceFunction::basis(3, 1), &[vec![1]], &cfg);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    fn levels(range: std::ops::RangeInclusive<u32>, rule: BlockRule) -> Vec<Level> {
        range.map(|l| dyadic_level(l, 1.0, rule).unwrap()).collect()
    }

    #[test]
    fn sweep_half_indicator_fails() {
        let cfg = OracleConfig::default();
        let rule = FunctionRule::Indicator {
            from: 0.0,
            to: 0.5,
            value: 1.0,
        };
        let r = dichotomy_sweep(&levels(4..=8, BlockRule::Pairing), &rule, l2(), &cfg).unwrap();
        for row in &r.rows {
            let l = row.resolution;
            assert_eq!(row.report.kernel_dim, (1 << (l - 1)) + (1 << (l - 2)));
            assert_eq!(row.report.codim, 1 << (l - 2));
        }
        assert_eq!(r.verdict, SweepVerdict::FredholmFails);
    }

    #[test]
    fn sweep_invertible_and_zero() {
        let cfg = OracleConfig::default();
        let rule = FunctionRule::Linear {
            intercept: 2.0,
            slope: 1.0,
        };
        let r = dichotomy_sweep(&levels(4..=7, BlockRule::Singletons), &rule, l2(), &cfg).unwrap();
        assert_eq!(r.verdict, SweepVerdict::InvertibleUniform);
        assert!(r
            .rows
            .iter()
            .all(|row| row.report.index == 0 && row.report.bounded_below >= 2.0));

        let zero = FunctionRule::Constant { value: 0.0 };
        let r = dichotomy_sweep(&levels(2..=5, BlockRule::Pairing), &zero, l2(), &cfg).unwrap();
        assert!(r
            .rows
            .iter()
            .all(|row| row.report.kernel_dim == 1 << row.resolution));
        assert_eq!(r.verdict, SweepVerdict::FredholmFails);
    }

    #[test]
    fn sweep_rejects_atoms() {
        let cfg = OracleConfig::default();
        let s = MeasureSpace::uniform(4).unwrap();
        let level = Level {
            resolution: 2,
            partition: PartitionAlgebra::singletons(&s),
            space: s,
        };
        let rule = FunctionRule::Constant { value: 1.0 };
        assert!(matches!(
            dichotomy_sweep(&[level], &rule, l2(), &cfg),
            Err(Error::Domain(_))
        ));
    }
}
