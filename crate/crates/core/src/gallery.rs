//! Worked examples: conditional expectation on a product space, integral
//! operators `∫ k(x,y) f(y) dμ(y)` read as `E(u f')` on the product, cyclic
//! convolution, and the Laplace transform.
//!
//! `E(f)(x, ·) = ∫ f(x, y) dμ₂(y)` only when `μ₂` is a probability measure,
//! so the second factor is always normalized and the factor is kept on the
//! grid to recover unnormalized integrals.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condexp::{block_averages, compensated_sum, cond_exp, SpaceFunction};
use crate::error::{Error, Result};
use crate::measure::{MeasureSpace, PartitionAlgebra, PointKind};

/// Largest number of grid points the gallery will allocate.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// Composite trapezoid nodes and weights on `[a, b]` with `n` intervals.
pub fn trapezoid(a: f64, b: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!(
            "interval [{a}, {b}] is empty or not finite"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("need at least one interval".into()));
    }
    if n >= MAX_GRID_POINTS {
        return Err(Error::Resource(format!(
            "{n} intervals exceed the grid cap"
        )));
    }
    let h = (b - a) / n as f64;
    let nodes = (0..=n).map(|i| a + i as f64 * h).collect();
    let weights = (0..=n)
        .map(|i| if i == 0 || i == n { 0.5 * h } else { h })
        .collect();
    Ok((nodes, weights))
}

/// `X × Y` with product quadrature weights and the column algebra
/// `{A × Y}`. Point `(i, j)` has index `i·|Y| + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGrid {
    pub x_nodes: Vec<f64>,
    pub y_nodes: Vec<f64>,
    pub x_weights: Vec<f64>,
    /// Normalized to total mass 1.
    pub y_weights: Vec<f64>,
    /// Total mass of the second factor before normalization.
    pub y_normalization: f64,
    pub space: MeasureSpace,
    pub partition: PartitionAlgebra,
}

impl ProductGrid {
    pub fn from_nodes(
        x_nodes: Vec<f64>,
        x_weights: Vec<f64>,
        y_nodes: Vec<f64>,
        y_weights: Vec<f64>,
    ) -> Result<Self> {
        if x_nodes.len() != x_weights.len() || y_nodes.len() != y_weights.len() {
            return Err(Error::Domain("every node needs exactly one weight".into()));
        }
        let points = x_nodes.len().saturating_mul(y_nodes.len());
        if points == 0 {
            return Err(Error::Domain("grid has no points".into()));
        }
        if points > MAX_GRID_POINTS {
            return Err(Error::Resource(format!(
                "{points} grid points exceed the cap"
            )));
        }
        let y_normalization = compensated_sum(y_weights.iter().copied());
        if !(y_normalization > 0.0 && y_normalization.is_finite()) {
            return Err(Error::Domain(
                "second-factor weights must have positive total".into(),
            ));
        }
        let y_weights: Vec<f64> = y_weights.iter().map(|w| w / y_normalization).collect();
        let weights = x_weights
            .iter()
            .flat_map(|wx| y_weights.iter().map(move |wy| wx * wy))
            .collect();
        let space = MeasureSpace::with_kind(weights, PointKind::Cell)?;
        let ny = y_nodes.len();
        let assignment: Vec<usize> = (0..points).map(|p| p / ny).collect();
        let partition = PartitionAlgebra::new(&space, &assignment)?;
        Ok(ProductGrid {
            x_nodes,
            y_nodes,
            x_weights,
            y_weights,
            y_normalization,
            space,
            partition,
        })
    }

    /// Trapezoid grid with `nx` and `ny` intervals on the two factors.
    pub fn trapezoid(x: (f64, f64), nx: usize, y: (f64, f64), ny: usize) -> Result<Self> {
        let (xn, xw) = trapezoid(x.0, x.1, nx)?;
        let (yn, yw) = trapezoid(y.0, y.1, ny)?;
        Self::from_nodes(xn, xw, yn, yw)
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// Samples `f(x, y)` at the grid points.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> SpaceFunction {
        let values: Vec<f64> = self
            .x_nodes
            .iter()
            .flat_map(|&x| self.y_nodes.iter().map(move |&y| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        SpaceFunction::from_real(&values)
    }

    /// `E(f)` on each column, i.e. `∫ f(x_i, y) dμ₂(y)`.
    pub fn column_values(&self, f: &SpaceFunction) -> Result<Vec<Complex64>> {
        block_averages(&self.space, &self.partition, f)
    }
}

/// Conditional expectation onto the column algebra.
pub fn product_condexp(grid: &ProductGrid, f: &SpaceFunction) -> Result<SpaceFunction> {
    cond_exp(&grid.space, &grid.partition, f)
}

/// An integral operator sampled on nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelDef {
    /// `e^{−xy}` on `[0, truncation]` with the given number of intervals,
    /// evaluated at the probe points `x`.
    Laplace {
        probes: Vec<f64>,
        truncation: f64,
        intervals: usize,
    },
    /// `w((x − y) mod n)` on `Z_n` with counting measure.
    Convolution { w: Vec<f64> },
    /// `k(x_i, y_j) = values[i][j]` with quadrature weights on the `y`
    /// nodes.
    Table {
        values: Vec<Vec<f64>>,
        y_weights: Vec<f64>,
    },
}

/// Kernel matrix, the `x` nodes and the `y` quadrature weights of a kernel definition.
struct Discretized {
    x_count: usize,
    kernel: Box<dyn Fn(usize, usize) -> f64 + Sync>,
    y_nodes: Vec<f64>,
    y_weights: Vec<f64>,
}

fn discretize(def: &KernelDef) -> Result<Discretized> {
    match def {
        KernelDef::Laplace {
            probes,
            truncation,
            intervals,
        } => {
            let (nodes, weights) = trapezoid(0.0, *truncation, *intervals)?;
            let probes = probes.clone();
            let t = nodes.clone();
            Ok(Discretized {
                x_count: probes.len(),
                kernel: Box::new(move |i, j| (-probes[i] * t[j]).exp()),
                y_nodes: nodes,
                y_weights: weights,
            })
        }
        KernelDef::Convolution { w } => {
            let n = w.len();
            let w = w.clone();
            Ok(Discretized {
                x_count: n,
                kernel: Box::new(move |i, j| w[(i + n - j) % n]),
                y_nodes: (0..n).map(|j| j as f64).collect(),
                y_weights: vec![1.0; n],
            })
        }
        KernelDef::Table { values, y_weights } => {
            if values.iter().any(|row| row.len() != y_weights.len()) {
                return Err(Error::Domain(
                    "kernel table rows must match the y weights".into(),
                ));
            }
            if values.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Domain("kernel table has a non-finite entry".into()));
            }
            let table = values.clone();
            Ok(Discretized {
                x_count: values.len(),
                kernel: Box::new(move |i, j| table[i][j]),
                y_nodes: (0..y_weights.len()).map(|j| j as f64).collect(),
                y_weights: y_weights.clone(),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelComparison {
    /// `y_normalization · E(u f')` read along columns.
    pub via_condexp: Vec<f64>,
    /// `Σ_j k(x, y_j) f(y_j) w_j`.
    pub direct: Vec<f64>,
    /// Largest difference relative to `Σ_j |k f| w_j`.
    pub max_relative_difference: f64,
}

/// `∫ k(x, y) f(y) dμ(y)` computed twice: as `E(u f')` on the product grid
/// (with `u = k`, `f'(x, y) = f(y)`) and by direct quadrature.
pub fn kernel_as_condexp(def: &KernelDef, f: &[f64]) -> Result<KernelComparison> {
    let d = discretize(def)?;
    let ny = d.y_nodes.len();
    if f.len() != ny {
        return Err(Error::SpaceMismatch {
            expected: ny,
            found: f.len(),
        });
    }
    if d.x_count == 0 {
        return Err(Error::Domain("kernel has no x nodes".into()));
    }
    let grid = ProductGrid::from_nodes(
        (0..d.x_count).map(|i| i as f64).collect(),
        vec![1.0; d.x_count],
        d.y_nodes.clone(),
        d.y_weights.clone(),
    )?;
    let uf = SpaceFunction::from_real(
        &(0..grid.len())
            .map(|p| (d.kernel)(p / ny, p % ny) * f[p % ny])
            .collect::<Vec<_>>(),
    );
    let via_condexp: Vec<f64> = grid
        .column_values(&uf)?
        .iter()
        .map(|v| v.re * grid.y_normalization)
        .collect();
    let (direct, scale): (Vec<f64>, Vec<f64>) = (0..d.x_count)
        .into_par_iter()
        .map(|i| {
            let term = |j: usize| (d.kernel)(i, j) * f[j] * d.y_weights[j];
            (
                compensated_sum((0..ny).map(term)),
                compensated_sum((0..ny).map(|j| term(j).abs())),
            )
        })
        .unzip();
    let max_relative_difference = via_condexp
        .iter()
        .zip(&direct)
        .zip(&scale)
        .map(|((a, b), s)| {
            if *s == 0.0 {
                (a - b).abs()
            } else {
                (a - b).abs() / s
            }
        })
        .fold(0.0, f64::max);
    Ok(KernelComparison {
        via_condexp,
        direct,
        max_relative_difference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaplaceConfig {
    /// Truncation point `T` of `[0, ∞)`.
    pub truncation: f64,
    /// Trapezoid step `h`.
    pub step: f64,
}

impl Default for LaplaceConfig {
    fn default() -> Self {
        LaplaceConfig {
            truncation: 40.0,
            step: 1e-3,
        }
    }
}

impl LaplaceConfig {
    fn intervals(&self) -> Result<usize> {
        if !(self.truncation > 0.0 && self.step > 0.0 && self.truncation.is_finite()) {
            return Err(Error::Domain("truncation and step must be positive".into()));
        }
        let n = (self.truncation / self.step).round();
        if n >= MAX_GRID_POINTS as f64 {
            return Err(Error::Resource(format!(
                "{n} intervals exceed the grid cap"
            )));
        }
        Ok((n as usize).max(1))
    }
}

/// `∫_0^T e^{−xt} f(t) dt` at each probe through the conditional
/// expectation path; probes run concurrently.
pub fn laplace_transform(
    f: impl Fn(f64) -> f64,
    probes: &[f64],
    cfg: &LaplaceConfig,
) -> Result<Vec<f64>> {
    if let Some(x) = probes.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("probe {x} must be positive")));
    }
    let intervals = cfg.intervals()?;
    let (nodes, _) = trapezoid(0.0, cfg.truncation, intervals)?;
    let samples: Vec<f64> = nodes.iter().map(|&t| f(t)).collect();
    probes
        .par_iter()
        .map(|&x| {
            let def = KernelDef::Laplace {
                probes: vec![x],
                truncation: cfg.truncation,
                intervals,
            };
            Ok(kernel_as_condexp(&def, &samples)?.via_condexp[0])
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceRow {
    pub x: f64,
    pub computed: f64,
    pub exact: f64,
    pub abs_error: f64,
    /// `h² + e^{−T(x+a)}`.
    pub budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceTable {
    pub a: f64,
    pub config: LaplaceConfig,
    pub rows: Vec<LaplaceRow>,
    /// Smallest `C` with `abs_error ≤ C · budget` on every row.
    pub empirical_constant: f64,
}

/// Laplace transform of `e^{−a t}` against the closed form `1/(x + a)`.
pub fn laplace_demo(a: f64, probes: &[f64], cfg: &LaplaceConfig) -> Result<LaplaceTable> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("a = {a} must be positive")));
    }
    let computed = laplace_transform(|t| (-a * t).exp(), probes, cfg)?;
    let h = cfg.truncation / cfg.intervals()? as f64;
    let rows: Vec<LaplaceRow> = probes
        .iter()
        .zip(computed)
        .map(|(&x, computed)| {
            let exact = 1.0 / (x + a);
            LaplaceRow {
                x,
                computed,
                exact,
                abs_error: (computed - exact).abs(),
                budget: h * h + (-cfg.truncation * (x + a)).exp(),
            }
        })
        .collect();
    let empirical_constant = rows
        .iter()
        .map(|r| r.abs_error / r.budget)
        .fold(0.0, f64::max);
    Ok(LaplaceTable {
        a,
        config: *cfg,
        rows,
        empirical_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn product_examples() {
        let g = ProductGrid::trapezoid((0.0, 1.0), 20, (0.0, 1.0), 200).unwrap();
        let e = product_condexp(&g, &g.sample(|x, t| x * t)).unwrap();
        let ny = g.y_nodes.len();
        for (i, &x) in g.x_nodes.iter().enumerate() {
            for j in 0..ny {
                assert!((e[i * ny + j].re - x / 2.0).abs() < 1e-12);
            }
        }
        let f = g.sample(|x, _| x.sin());
        assert!(product_condexp(&g, &f).unwrap().sub(&f).max_abs() < 1e-14);

        let g = ProductGrid::trapezoid((0.0, 1.0), 2, (0.0, PI), 2000).unwrap();
        assert!((g.y_normalization - PI).abs() < 1e-12);
        let e = product_condexp(&g, &g.sample(|_, t| t.sin())).unwrap();
        assert!(e.iter().all(|v| (v.re - 2.0 / PI).abs() < 1e-6));
    }

    #[test]
    fn kernel_examples() {
        let table = KernelDef::Table {
            values: vec![vec![1.0; 4]; 3],
            y_weights: vec![0.25; 4],
        };
        let f = [1.0, 2.0, 3.0, 6.0];
        let r = kernel_as_condexp(&table, &f).unwrap();
        assert!(r.via_condexp.iter().all(|v| (v - 3.0).abs() < 1e-14));
        assert!(r.max_relative_difference <= 1e-12);

        let mut w = vec![0.0; 8];
        w[0] = 1.0;
        let f: Vec<f64> = (0..8).map(|i| (i * i) as f64 - 3.0).collect();
        let r = kernel_as_condexp(&KernelDef::Convolution { w }, &f).unwrap();
        assert_eq!(r.direct, f);
        assert!(r
            .via_condexp
            .iter()
            .zip(&f)
            .all(|(a, b)| (a - b).abs() < 1e-12));

        let def = KernelDef::Laplace {
            probes: vec![0.5, 1.0, 2.0],
            truncation: 40.0,
            intervals: 40_000,
        };
        let (nodes, _) = trapezoid(0.0, 40.0, 40_000).unwrap();
        let f: Vec<f64> = nodes.iter().map(|t| (-t).exp()).collect();
        let r = kernel_as_condexp(&def, &f).unwrap();
        for (x, v) in [0.5, 1.0, 2.0].iter().zip(&r.via_condexp) {
            assert!((v - 1.0 / (x + 1.0)).abs() < 1e-3);
        }
        assert!(
            r.max_relative_difference <= 1e-12,
            "{}",
            r.max_relative_difference
        );
    }

    #[test]
    fn laplace_examples() {
        let cfg = LaplaceConfig::default();
        let t = laplace_demo(1.0, &[1.0], &cfg).unwrap();
        assert!((t.rows[0].computed - 0.5).abs() < 1e-3);
        let t = laplace_demo(2.0, &[2.0], &cfg).unwrap();
        assert!((t.rows[0].computed - 0.25).abs() < 1e-3);
        let t = laplace_demo(1.0, &[50.0], &cfg).unwrap();
        assert!(t.rows[0].abs_error / t.rows[0].exact < 1e-2);
        assert!(matches!(
            laplace_demo(1.0, &[0.0], &cfg),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            laplace_demo(-1.0, &[1.0], &cfg),
            Err(Error::Domain(_))
        ));
    }
}
