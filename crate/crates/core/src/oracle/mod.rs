//! Brute-force numerics used to audit every classifier verdict: numeric
//! rank, minimum modulus, `L^p → L^q` norms and distances to the range.
//!
//! The `p = q = 2` paths are exact (weighted SVD). Every other value comes
//! from multi-start projected gradient on the `‖·‖_p` sphere; a reported
//! value is always the ratio attained at the returned certificate, so an
//! infimum is reported from above and a supremum from below.

mod sphere;
mod svd;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condexp::SpaceFunction;
use crate::weighted::{lp_norm_slice, ExponentPair, OperatorMatrix};
use sphere::{gaussian_vector, restart_rng, RatioProblem, Sense};
pub use svd::WeightedSvd;

/// Oracle knobs. Every field has a documented default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub seed: u64,
    /// Random restarts in addition to the coordinate starts.
    pub restarts: usize,
    pub max_iterations: usize,
    /// Sufficient-decrease constant of the backtracking search.
    pub armijo: f64,
    /// Step shrink factor of the backtracking search.
    pub backtrack: f64,
    /// Singular values below `factor · σ_max` count as zero.
    pub rank_tolerance_factor: f64,
    /// Dense sphere sampling cross-checks problems up to this dimension.
    pub dense_sampling_dimension_cap: usize,
    pub dense_samples: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            seed: 0,
            restarts: 32,
            max_iterations: 2000,
            armijo: 1e-4,
            backtrack: 0.5,
            rank_tolerance_factor: 1e-9,
            dense_sampling_dimension_cap: 6,
            dense_samples: 4096,
        }
    }
}

impl OracleConfig {
    pub fn with_seed(seed: u64) -> Self {
        OracleConfig {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tightness {
    /// Exact linear algebra (SVD path, kernel certificate, empty domain).
    Exact,
    /// Optimizer value not beaten by dense sphere sampling.
    Corroborated,
    /// Attained ratio only: an upper bound for an infimum, a lower bound
    /// for a supremum.
    BoundOnly,
}

/// Result of an extremal-ratio computation.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    /// Input attaining `value`; absent only when the domain is `{0}`.
    pub certificate: Option<SpaceFunction>,
    pub tightness: Tightness,
    /// Restarts ending within `1e-6` (relative) of the best value.
    pub agreeing_restarts: usize,
    /// Set when the value is neither exact nor corroborated and the best
    /// value was reached by a single restart.
    pub flagged: bool,
}

impl OracleValue {
    fn exact(value: f64, certificate: Option<SpaceFunction>) -> Self {
        OracleValue {
            value,
            certificate,
            tightness: Tightness::Exact,
            agreeing_restarts: 1,
            flagged: false,
        }
    }
}

/// Selects the exact `p = q = 2` path when available, or forces the
/// general optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Auto,
    Optimizer,
}

/// `‖T f‖_q / ‖f‖_p`, `NaN` for `f = 0`.
pub fn ratio(op: &OperatorMatrix, exponents: ExponentPair, f: &SpaceFunction) -> f64 {
    let den = lp_norm_slice(op.weights(), f.values(), exponents.p);
    if den == 0.0 {
        return f64::NAN;
    }
    lp_norm_slice(op.weights(), op.apply(f).values(), exponents.q) / den
}

/// Number of weighted singular values above the tolerance.
pub fn numeric_rank(op: &OperatorMatrix, cfg: &OracleConfig) -> usize {
    WeightedSvd::new(op).rank(cfg.rank_tolerance_factor)
}

fn is_l2(exponents: ExponentPair) -> bool {
    exponents.p == 2.0 && exponents.q == 2.0
}

fn certified(op: &OperatorMatrix, exponents: ExponentPair, f: SpaceFunction) -> OracleValue {
    OracleValue::exact(ratio(op, exponents, &f), Some(f))
}

fn basis_matrix(basis: &[SpaceFunction], n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, basis.len(), |x, k| basis[k][x])
}

/// `inf ‖Tf‖_q / ‖f‖_p` over `f ≠ 0`, optionally restricted to the
/// weighted orthogonal complement of the kernel.
pub fn min_modulus(
    op: &OperatorMatrix,
    exponents: ExponentPair,
    restrict_to_kernel_complement: bool,
    cfg: &OracleConfig,
) -> OracleValue {
    min_modulus_by(
        op,
        exponents,
        restrict_to_kernel_complement,
        cfg,
        Method::Auto,
    )
}

pub fn min_modulus_by(
    op: &OperatorMatrix,
    exponents: ExponentPair,
    restrict_to_kernel_complement: bool,
    cfg: &OracleConfig,
    method: Method,
) -> OracleValue {
    let n = op.dim();
    let svd = WeightedSvd::new(op);
    let rank = svd.rank(cfg.rank_tolerance_factor);
    if restrict_to_kernel_complement {
        if rank == 0 {
            return OracleValue::exact(f64::INFINITY, None);
        }
        if method == Method::Auto && is_l2(exponents) {
            return certified(op, exponents, svd.right_function(rank - 1));
        }
        let basis = svd.coimage_basis(cfg.rank_tolerance_factor);
        let b = basis_matrix(&basis, n);
        let starts = (0..n)
            .map(|x| DVector::from_fn(rank, |k, _| b[(x, k)].conj() * op.weights()[x]))
            .filter(|c| c.norm() > 1e-12)
            .collect();
        let problem = RatioProblem::new(
            op.matrix() * &b,
            Some(b),
            op.weights().to_vec(),
            exponents.p,
            exponents.q,
        );
        return search(op, exponents, &problem, starts, Sense::Minimize, cfg);
    }
    if rank < n {
        return certified(op, exponents, svd.right_function(n - 1));
    }
    if method == Method::Auto && is_l2(exponents) {
        return certified(op, exponents, svd.right_function(n - 1));
    }
    let problem = RatioProblem::new(
        op.matrix().clone(),
        None,
        op.weights().to_vec(),
        exponents.p,
        exponents.q,
    );
    search(
        op,
        exponents,
        &problem,
        coordinate_starts(n),
        Sense::Minimize,
        cfg,
    )
}

/// `sup ‖Tf‖_q / ‖f‖_p`, i.e. the `L^p → L^q` operator norm.
pub fn maximize_ratio(
    op: &OperatorMatrix,
    exponents: ExponentPair,
    cfg: &OracleConfig,
) -> OracleValue {
    maximize_ratio_by(op, exponents, cfg, Method::Auto)
}

pub fn maximize_ratio_by(
    op: &OperatorMatrix,
    exponents: ExponentPair,
    cfg: &OracleConfig,
    method: Method,
) -> OracleValue {
    let n = op.dim();
    if method == Method::Auto && is_l2(exponents) {
        let svd = WeightedSvd::new(op);
        return certified(op, exponents, svd.right_function(0));
    }
    if op.matrix().iter().all(|v| v.norm() == 0.0) {
        return certified(op, exponents, SpaceFunction::basis(n, 0));
    }
    let problem = RatioProblem::new(
        op.matrix().clone(),
        None,
        op.weights().to_vec(),
        exponents.p,
        exponents.q,
    );
    search(
        op,
        exponents,
        &problem,
        coordinate_starts(n),
        Sense::Maximize,
        cfg,
    )
}

fn coordinate_starts(n: usize) -> Vec<DVector<Complex64>> {
    (0..n)
        .map(|x| {
            let mut c = DVector::zeros(n);
            c[x] = Complex64::new(1.0, 0.0);
            c
        })
        .collect()
}

fn search(
    op: &OperatorMatrix,
    exponents: ExponentPair,
    problem: &RatioProblem,
    mut starts: Vec<DVector<Complex64>>,
    sense: Sense,
    cfg: &OracleConfig,
) -> OracleValue {
    let dim = problem.dim();
    for i in 0..cfg.restarts {
        let mut rng = restart_rng(cfg.seed, i as u64);
        starts.push(gaussian_vector(&mut rng, dim));
    }
    let outcomes: Vec<_> = starts
        .into_par_iter()
        .filter_map(|s| problem.optimize(s, sense, cfg))
        .filter(|o| o.value.is_finite())
        .collect();
    let best = outcomes
        .iter()
        .enumerate()
        .reduce(|a, b| {
            if sense.better(b.1.value, a.1.value) {
                b
            } else {
                a
            }
        })
        .map(|(i, _)| i)
        .expect("at least one restart");
    let best_value = outcomes[best].value;
    let agreeing = outcomes
        .iter()
        .filter(|o| (o.value - best_value).abs() <= 1e-6 * best_value.abs().max(f64::MIN_POSITIVE))
        .count();

    let mut coeffs = outcomes[best].coeffs.clone();
    let mut tightness = Tightness::BoundOnly;
    if dim <= cfg.dense_sampling_dimension_cap {
        let mut rng = restart_rng(cfg.seed, u64::MAX);
        let mut sample_best: Option<(f64, DVector<Complex64>)> = None;
        for _ in 0..cfg.dense_samples {
            let c = gaussian_vector(&mut rng, dim);
            let r = problem.ratio(&c);
            if r.is_finite()
                && sample_best
                    .as_ref()
                    .is_none_or(|(b, _)| sense.better(r, *b))
            {
                sample_best = Some((r, c));
            }
        }
        match sample_best {
            Some((r, c))
                if sense.better(r, best_value)
                    && (r - best_value).abs() > 1e-9 * best_value.abs() =>
            {
                if let Some(o) = problem.optimize(c, sense, cfg) {
                    if sense.better(o.value, best_value) {
                        coeffs = o.coeffs;
                    }
                }
            }
            _ => tightness = Tightness::Corroborated,
        }
    }
    let certificate = SpaceFunction::new(match &problem.b {
        Some(b) => (b * &coeffs).as_slice().to_vec(),
        None => coeffs.as_slice().to_vec(),
    });
    let value = ratio(op, exponents, &certificate);
    OracleValue {
        value,
        certificate: Some(certificate),
        tightness,
        agreeing_restarts: agreeing,
        flagged: tightness == Tightness::BoundOnly && agreeing < 2,
    }
}

/// `min_f ‖g − T f‖_q`: the distance from `g` to the range of `T`.
pub fn distance_to_range(
    op: &OperatorMatrix,
    g: &SpaceFunction,
    q: f64,
    cfg: &OracleConfig,
) -> f64 {
    let n = op.dim();
    let weights = op.weights();
    let basis = WeightedSvd::new(op).range_basis(cfg.rank_tolerance_factor);
    let gv = DVector::from_column_slice(g.values());
    if basis.is_empty() {
        return lp_norm_slice(weights, g.values(), q);
    }
    let r = basis_matrix(&basis, n);
    let weighted_g = DVector::from_fn(n, |x, _| gv[x] * weights[x]);
    let mut c = r.adjoint() * weighted_g;
    let residual = |c: &DVector<Complex64>| &gv - &r * c;
    let mut best = lp_norm_slice(weights, residual(&c).as_slice(), q);
    if q == 2.0 || best == 0.0 {
        return best;
    }
    // Convex in the coefficients: plain gradient descent from the
    // least-squares point.
    let mut t = 1.0;
    let mut stalls = 0;
    for _ in 0..cfg.max_iterations.max(5000) {
        let res = residual(&c);
        let norm = lp_norm_slice(weights, res.as_slice(), q);
        if norm == 0.0 {
            return 0.0;
        }
        let gy = DVector::from_iterator(
            n,
            res.iter().zip(weights).map(|(v, w)| {
                let m = v.norm();
                if m == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    (v / m) * ((m / norm).powf(q - 1.0) * w)
                }
            }),
        );
        let grad = -(r.adjoint() * gy);
        let g2 = grad.norm_squared();
        if g2 == 0.0 {
            break;
        }
        let mut moved = false;
        while t * g2.sqrt() > 1e-16 * (1.0 + c.norm()) {
            let trial = &c - &grad * Complex64::new(t, 0.0);
            let val = lp_norm_slice(weights, residual(&trial).as_slice(), q);
            if val <= norm - cfg.armijo * t * g2 {
                let gain = (norm - val) / norm;
                c = trial;
                best = best.min(val);
                moved = true;
                stalls = if gain < 1e-15 { stalls + 1 } else { 0 };
                break;
            }
            t *= cfg.backtrack;
        }
        if !moved || stalls >= 5 {
            break;
        }
        t /= cfg.backtrack;
    }
    best
}
