//! Functions on a finite space and the conditional expectation `E = E^𝒜`.
//!
//! On a partition algebra the conditional expectation is the μ-weighted
//! block average: `E(f)(x) = Σ_{y∈A} f(y)μ(y) / μ(A)` where `A` is the block
//! containing `x`.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result};
use crate::measure::{MeasureSpace, PartitionAlgebra};

/// Tolerance used when deciding that a value is real and nonnegative.
pub const SIGN_TOLERANCE: f64 = 1e-14;

/// Complex-valued function given by its value at each point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpaceFunction(Vec<Complex64>);

impl SpaceFunction {
    pub fn new(values: Vec<Complex64>) -> Self {
        SpaceFunction(values)
    }

    pub fn from_real(values: &[f64]) -> Self {
        SpaceFunction(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(len: usize, value: Complex64) -> Self {
        SpaceFunction(vec![value; len])
    }

    pub fn zeros(len: usize) -> Self {
        Self::constant(len, Complex64::new(0.0, 0.0))
    }

    pub fn ones(len: usize) -> Self {
        Self::constant(len, Complex64::new(1.0, 0.0))
    }

    /// Indicator of `points`.
    pub fn indicator(len: usize, points: &[usize]) -> Self {
        let mut f = Self::zeros(len);
        for &x in points {
            f[x] = Complex64::new(1.0, 0.0);
        }
        f
    }

    /// The unit vector at `point`.
    pub fn basis(len: usize, point: usize) -> Self {
        Self::indicator(len, &[point])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        SpaceFunction(self.0.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SpaceFunction) -> Self {
        debug_assert_eq!(self.len(), other.len());
        SpaceFunction(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    pub fn add(&self, other: &SpaceFunction) -> Self {
        debug_assert_eq!(self.len(), other.len());
        SpaceFunction(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &SpaceFunction) -> Self {
        debug_assert_eq!(self.len(), other.len());
        SpaceFunction(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// `|f|^e` as a real function.
    pub fn abs_pow(&self, e: f64) -> Self {
        self.map(|v| Complex64::new(v.norm().powf(e), 0.0))
    }

    pub fn abs(&self) -> Self {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Real parts; callers use this on functions known to be real.
    pub fn re(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.re).collect()
    }

    /// True when every value is real and `≥ 0` up to [`SIGN_TOLERANCE`].
    pub fn is_nonnegative(&self) -> bool {
        self.0
            .iter()
            .all(|v| v.im.abs() <= SIGN_TOLERANCE && v.re >= -SIGN_TOLERANCE)
    }

    /// True when every value is real and strictly positive.
    pub fn is_positive(&self) -> bool {
        self.0
            .iter()
            .all(|v| v.im.abs() <= SIGN_TOLERANCE && v.re > 0.0)
    }

    /// Points where `|f| > threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.0[x].norm() > threshold)
            .collect()
    }
}

impl Index<usize> for SpaceFunction {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for SpaceFunction {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl From<Vec<Complex64>> for SpaceFunction {
    fn from(values: Vec<Complex64>) -> Self {
        SpaceFunction(values)
    }
}

/// Neumaier-compensated sum; block integrals over large grids stay accurate
/// to a few ulps.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Value of `E(f)` on each block.
pub fn block_averages(
    space: &MeasureSpace,
    partition: &PartitionAlgebra,
    f: &SpaceFunction,
) -> Result<Vec<Complex64>> {
    partition.check_space(space)?;
    check_len(space.len(), f.len())?;
    Ok(partition
        .blocks()
        .iter()
        .enumerate()
        .map(|(b, members)| {
            let re = compensated_sum(members.iter().map(|&y| f[y].re * space.weight(y)));
            let im = compensated_sum(members.iter().map(|&y| f[y].im * space.weight(y)));
            Complex64::new(re, im) / partition.block_mass(b)
        })
        .collect())
}

/// Conditional expectation of `f` with respect to the partition algebra.
pub fn cond_exp(
    space: &MeasureSpace,
    partition: &PartitionAlgebra,
    f: &SpaceFunction,
) -> Result<SpaceFunction> {
    let averages = block_averages(space, partition, f)?;
    Ok(SpaceFunction(
        (0..space.len())
            .map(|x| averages[partition.block_of(x)])
            .collect(),
    ))
}

/// Spreads one value per block back onto the points.
pub fn from_blocks(partition: &PartitionAlgebra, per_block: &[Complex64]) -> SpaceFunction {
    SpaceFunction(
        (0..partition.len())
            .map(|x| per_block[partition.block_of(x)])
            .collect(),
    )
}

/// A real function of the unit coordinate `t ∈ [0, 1)`, sampled at
/// [`MeasureSpace::unit_coordinates`] so that one rule defines `u` (or `w`)
/// consistently at every refinement level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionRule {
    Constant {
        value: f64,
    },
    /// `value · χ_[from, to)`.
    Indicator {
        from: f64,
        to: f64,
        #[serde(default = "one")]
        value: f64,
    },
    /// `intercept + slope·t`.
    Linear {
        intercept: f64,
        slope: f64,
    },
    /// `scale · exp(rate·t)`.
    Exp {
        rate: f64,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl FunctionRule {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            FunctionRule::Constant { value } => value,
            FunctionRule::Indicator { from, to, value } => {
                if t >= from && t < to {
                    value
                } else {
                    0.0
                }
            }
            FunctionRule::Linear { intercept, slope } => intercept + slope * t,
            FunctionRule::Exp { rate, scale } => scale * (rate * t).exp(),
        }
    }

    pub fn sample(&self, space: &MeasureSpace) -> SpaceFunction {
        let values: Vec<f64> = space
            .unit_coordinates()
            .into_iter()
            .map(|t| self.eval(t))
            .collect();
        SpaceFunction::from_real(&values)
    }
}
