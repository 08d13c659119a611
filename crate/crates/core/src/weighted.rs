//! The operator `M_w E M_u : f ↦ w·E(u·f)` from `L^p` into `L^q`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::condexp::{block_averages, cond_exp, SpaceFunction};
use crate::error::{check_len, Error, Result};
use crate::measure::{MeasureSpace, PartitionAlgebra};
use crate::oracle::{self, OracleConfig, OracleValue};

/// How the two exponents are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentCase {
    /// `p = q`
    Same,
    /// `q < p`
    Down,
    /// `p < q`
    Up,
}

/// Domain exponent `p` and codomain exponent `q`, both in `(1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p: f64,
    pub q: f64,
}

/// `e / (e - 1)`.
pub fn conjugate(e: f64) -> f64 {
    e / (e - 1.0)
}

impl ExponentPair {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, e) in [("p", p), ("q", q)] {
            if !(e.is_finite() && e > 1.0) {
                return Err(Error::Domain(format!(
                    "{name} must lie in (1, inf), got {e}"
                )));
            }
        }
        Ok(ExponentPair { p, q })
    }

    pub fn same(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn case(&self) -> ExponentCase {
        if self.p == self.q {
            ExponentCase::Same
        } else if self.q < self.p {
            ExponentCase::Down
        } else {
            ExponentCase::Up
        }
    }

    pub fn p_conj(&self) -> f64 {
        conjugate(self.p)
    }

    pub fn q_conj(&self) -> f64 {
        conjugate(self.q)
    }

    /// `r` with `1/r = 1/q - 1/p`, defined when `q < p`.
    pub fn r(&self) -> Option<f64> {
        (self.q < self.p).then(|| 1.0 / (1.0 / self.q - 1.0 / self.p))
    }

    /// `s` with `1/s = 1/p - 1/q`, defined when `p < q`.
    pub fn s(&self) -> Option<f64> {
        (self.p < self.q).then(|| 1.0 / (1.0 / self.p - 1.0 / self.q))
    }
}

/// Which space the operator is considered to map into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Codomain {
    /// `L^q(Σ)`
    Sigma,
    /// `L^q(𝒜)`
    Algebra,
}

/// `M_w E M_u` on a finite space.
#[derive(Debug, Clone, PartialEq)]
pub struct CondOperator {
    space: MeasureSpace,
    partition: PartitionAlgebra,
    u: SpaceFunction,
    w: SpaceFunction,
    exponents: ExponentPair,
    codomain: Codomain,
}

impl CondOperator {
    /// General operator. The `algebra` codomain requires an
    /// `𝒜`-measurable `w` so that outputs stay in `L^q(𝒜)`.
    pub fn new(
        space: MeasureSpace,
        partition: PartitionAlgebra,
        u: SpaceFunction,
        w: SpaceFunction,
        exponents: ExponentPair,
        codomain: Codomain,
    ) -> Result<Self> {
        partition.check_space(&space)?;
        check_len(space.len(), u.len())?;
        check_len(space.len(), w.len())?;
        if codomain == Codomain::Algebra && !partition.is_measurable(&w) {
            return Err(Error::Domain(
                "codomain `algebra` needs an A-measurable w".into(),
            ));
        }
        Ok(CondOperator {
            space,
            partition,
            u,
            w,
            exponents,
            codomain,
        })
    }

    /// General operator with the default codomain: `algebra` when `w ≡ 1`,
    /// `sigma` otherwise.
    pub fn with_default_codomain(
        space: MeasureSpace,
        partition: PartitionAlgebra,
        u: SpaceFunction,
        w: SpaceFunction,
        exponents: ExponentPair,
    ) -> Result<Self> {
        let codomain = if w.iter().all(|&v| v == Complex64::new(1.0, 0.0)) {
            Codomain::Algebra
        } else {
            Codomain::Sigma
        };
        Self::new(space, partition, u, w, exponents, codomain)
    }

    /// `E M_u` into `L^q(𝒜)`.
    pub fn em_u(
        space: MeasureSpace,
        partition: PartitionAlgebra,
        u: SpaceFunction,
        exponents: ExponentPair,
    ) -> Result<Self> {
        let w = SpaceFunction::ones(space.len());
        Self::new(space, partition, u, w, exponents, Codomain::Algebra)
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn partition(&self) -> &PartitionAlgebra {
        &self.partition
    }

    pub fn u(&self) -> &SpaceFunction {
        &self.u
    }

    pub fn w(&self) -> &SpaceFunction {
        &self.w
    }

    pub fn exponents(&self) -> ExponentPair {
        self.exponents
    }

    pub fn codomain(&self) -> Codomain {
        self.codomain
    }

    pub fn with_codomain(&self, codomain: Codomain) -> Result<Self> {
        Self::new(
            self.space.clone(),
            self.partition.clone(),
            self.u.clone(),
            self.w.clone(),
            self.exponents,
            codomain,
        )
    }

    pub fn with_exponents(&self, exponents: ExponentPair) -> Self {
        CondOperator {
            exponents,
            ..self.clone()
        }
    }

    /// True when `w ≡ 1`.
    pub fn is_em_u(&self) -> bool {
        self.w.iter().all(|&v| v == Complex64::new(1.0, 0.0))
    }

    /// Dimension of the declared codomain.
    pub fn codomain_dim(&self) -> usize {
        match self.codomain {
            Codomain::Sigma => self.space.len(),
            Codomain::Algebra => self.partition.num_blocks(),
        }
    }

    /// `w ⊙ E(u ⊙ f)`.
    pub fn apply(&self, f: &SpaceFunction) -> Result<SpaceFunction> {
        check_len(self.space.len(), f.len())?;
        let e = cond_exp(&self.space, &self.partition, &self.u.mul(f))?;
        Ok(self.w.mul(&e))
    }

    /// Dense matrix realization indexed by (output point, input point).
    pub fn matrix(&self) -> OperatorMatrix {
        let n = self.space.len();
        let mut m = DMatrix::zeros(n, n);
        for x in 0..n {
            let b = self.partition.block_of(x);
            let mass = self.partition.block_mass(b);
            for &y in self.partition.block(b) {
                m[(x, y)] = self.w[x] * (self.u[y] * self.space.weight(y) / mass);
            }
        }
        OperatorMatrix::new(m, self.space.weights().to_vec())
    }

    /// `(E(|u|^e'))^(1/e')` with `e' = p'` when `p = q` and `q'` otherwise.
    pub fn v_weight(&self) -> SpaceFunction {
        let e = match self.exponents.case() {
            ExponentCase::Same => self.exponents.p_conj(),
            _ => self.exponents.q_conj(),
        };
        self.conditional_power_mean(&self.u, e)
    }

    /// `(E(|g|^e))^(1/e)`.
    pub(crate) fn conditional_power_mean(&self, g: &SpaceFunction, e: f64) -> SpaceFunction {
        let scale = g.max_abs();
        if scale == 0.0 {
            return SpaceFunction::zeros(g.len());
        }
        let normalized = g.map(|v| v / scale).abs_pow(e);
        cond_exp(&self.space, &self.partition, &normalized)
            .expect("operator data shares one space")
            .map(|v| Complex64::new(scale * v.re.max(0.0).powf(1.0 / e), 0.0))
    }

    /// `E(u)` on each block.
    pub fn eu_blocks(&self) -> Vec<Complex64> {
        block_averages(&self.space, &self.partition, &self.u)
            .expect("operator data shares one space")
    }

    /// `E(u)`.
    pub fn eu(&self) -> SpaceFunction {
        cond_exp(&self.space, &self.partition, &self.u).expect("operator data shares one space")
    }

    /// The reduced symbol `v = u ⊙ (E(|w|^q))^(1/q)`; `EM_v` has the same
    /// `L^q` norm as this operator on every input.
    pub fn reduce_to_emv(&self) -> SpaceFunction {
        let factor = self.conditional_power_mean(&self.w, self.exponents.q);
        self.u.mul(&factor)
    }

    /// `E M_v` for `v` from [`reduce_to_emv`](Self::reduce_to_emv), into
    /// `L^q(𝒜)`.
    pub fn reduced(&self) -> CondOperator {
        CondOperator::em_u(
            self.space.clone(),
            self.partition.clone(),
            self.reduce_to_emv(),
            self.exponents,
        )
        .expect("operator data shares one space")
    }

    /// `‖T‖_{p→q}` from the numerical oracle.
    pub fn opnorm_pq(&self, cfg: &OracleConfig) -> OracleValue {
        oracle::maximize_ratio(&self.matrix(), self.exponents, cfg)
    }

    /// Adjoint for the pairing `⟨f, g⟩ = Σ f·conj(g)·μ`: `M_ū E M_w̄`.
    pub fn adjoint(&self) -> CondOperator {
        CondOperator {
            u: self.w.conj(),
            w: self.u.conj(),
            codomain: Codomain::Sigma,
            ..self.clone()
        }
    }

    pub fn lp_norm(&self, f: &SpaceFunction, p: f64) -> f64 {
        lp_norm(&self.space, f, p)
    }
}

/// `(Σ |f(x)|^p μ(x))^(1/p)`, or `max |f|` for `p = ∞`.
pub fn lp_norm(space: &MeasureSpace, f: &SpaceFunction, p: f64) -> f64 {
    lp_norm_slice(space.weights(), f.values(), p)
}

pub(crate) fn lp_norm_slice(weights: &[f64], values: &[Complex64], p: f64) -> f64 {
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    if p.is_infinite() {
        return scale;
    }
    let sum: f64 = values
        .iter()
        .zip(weights)
        .map(|(v, w)| (v.norm() / scale).powf(p) * w)
        .sum();
    scale * sum.powf(1.0 / p)
}

/// Dense operator matrix together with the point weights of its domain and
/// codomain (both the same finite space here).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    matrix: DMatrix<Complex64>,
    weights: Vec<f64>,
}

impl OperatorMatrix {
    pub fn new(matrix: DMatrix<Complex64>, weights: Vec<f64>) -> Self {
        assert_eq!(
            matrix.nrows(),
            weights.len(),
            "row count must match weights"
        );
        assert_eq!(
            matrix.ncols(),
            weights.len(),
            "column count must match weights"
        );
        OperatorMatrix { matrix, weights }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn apply(&self, f: &SpaceFunction) -> SpaceFunction {
        let v = nalgebra::DVector::from_column_slice(f.values());
        SpaceFunction::new((&self.matrix * v).as_slice().to_vec())
    }

    /// `D^{1/2} M D^{-1/2}`: its ℓ² geometry is the `L²(μ)` geometry of
    /// the operator.
    pub fn weighted(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |x, y| {
            self.matrix[(x, y)] * (self.weights[x].sqrt() / self.weights[y].sqrt())
        })
    }

    /// Matrix of the adjoint for the μ-weighted pairing: `D^{-1} M^H D`.
    pub fn adjoint(&self) -> OperatorMatrix {
        let n = self.dim();
        let m = DMatrix::from_fn(n, n, |x, y| {
            self.matrix[(y, x)].conj() * (self.weights[y] / self.weights[x])
        });
        OperatorMatrix::new(m, self.weights.clone())
    }
}
