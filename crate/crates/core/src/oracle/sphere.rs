//! Projected gradient for the ratio `‖A c‖_q / ‖B c‖_p` on the unit sphere
//! of `‖B ·‖_p`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::OracleConfig;
use crate::weighted::lp_norm_slice;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    fn sign(self) -> f64 {
        match self {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        }
    }

    /// True when `a` is strictly better than `b`.
    pub(crate) fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }
}

pub(crate) struct RatioProblem {
    /// Coefficients to operator output.
    pub a: DMatrix<Complex64>,
    /// Coefficients to input function; `None` means the identity.
    pub b: Option<DMatrix<Complex64>>,
    pub weights: Vec<f64>,
    pub p: f64,
    pub q: f64,
    a_adjoint: DMatrix<Complex64>,
    b_adjoint: Option<DMatrix<Complex64>>,
}

/// Relative tangential gradient below which a point counts as stationary.
const STATIONARY: f64 = 1e-11;

const SNAP: f64 = 1e-3;

const POLISH_PROBE: usize = 50;

pub(crate) struct Outcome {
    pub value: f64,
    pub coeffs: DVector<Complex64>,
}

fn norm_and_grad(weights: &[f64], y: &DVector<Complex64>, e: f64) -> (f64, DVector<Complex64>) {
    let n = lp_norm_slice(weights, y.as_slice(), e);
    if n == 0.0 {
        return (0.0, DVector::zeros(y.len()));
    }
    let g = DVector::from_iterator(
        y.len(),
        y.iter().zip(weights).map(|(v, w)| {
            let m = v.norm();
            if m == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                (v / m) * ((m / n).powf(e - 1.0) * w)
            }
        }),
    );
    (n, g)
}

impl RatioProblem {
    pub fn new(
        a: DMatrix<Complex64>,
        b: Option<DMatrix<Complex64>>,
        weights: Vec<f64>,
        p: f64,
        q: f64,
    ) -> Self {
        RatioProblem {
            a_adjoint: a.adjoint(),
            b_adjoint: b.as_ref().map(|b| b.adjoint()),
            a,
            b,
            weights,
            p,
            q,
        }
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn input(&self, c: &DVector<Complex64>) -> DVector<Complex64> {
        match &self.b {
            Some(b) => b * c,
            None => c.clone(),
        }
    }

    pub fn denominator(&self, c: &DVector<Complex64>) -> f64 {
        lp_norm_slice(&self.weights, self.input(c).as_slice(), self.p)
    }

    pub fn ratio(&self, c: &DVector<Complex64>) -> f64 {
        let den = self.denominator(c);
        if den == 0.0 {
            return f64::NAN;
        }
        lp_norm_slice(&self.weights, (&self.a * c).as_slice(), self.q) / den
    }

    /// Ratio and its gradient with respect to `conj(c)` (times two), which
    /// is the real gradient when `c` is read as a real vector.
    fn ratio_grad(&self, c: &DVector<Complex64>) -> (f64, DVector<Complex64>) {
        let (num, gy) = norm_and_grad(&self.weights, &(&self.a * c), self.q);
        let (den, gx) = norm_and_grad(&self.weights, &self.input(c), self.p);
        let g_num = &self.a_adjoint * gy;
        let g_den = match &self.b_adjoint {
            Some(b) => b * gx,
            None => gx,
        };
        let r = num / den;
        (
            r,
            (g_num - g_den * Complex64::new(r, 0.0)) / Complex64::new(den, 0.0),
        )
    }

    fn normalize(&self, c: DVector<Complex64>) -> Option<DVector<Complex64>> {
        let d = self.denominator(&c);
        (d > 0.0 && d.is_finite()).then(|| c / Complex64::new(d, 0.0))
    }

    /// `c` with coordinates below `SNAP · max |c_i|` set to zero, when there
    /// are any. Extremizers often sit on coordinate faces, which gradient
    /// steps approach only slowly.
    fn snap(&self, c: &DVector<Complex64>) -> Option<(DVector<Complex64>, f64)> {
        let top = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let small = |v: &Complex64| v.norm() > 0.0 && v.norm() < SNAP * top;
        if !c.iter().any(small) {
            return None;
        }
        let snapped = self.normalize(c.map(|v| {
            if small(&v) {
                Complex64::new(0.0, 0.0)
            } else {
                v
            }
        }))?;
        let r = self.ratio(&snapped);
        r.is_finite().then_some((snapped, r))
    }

    pub fn optimize(
        &self,
        start: DVector<Complex64>,
        sense: Sense,
        cfg: &OracleConfig,
    ) -> Option<Outcome> {
        let c = self.normalize(start)?;
        let (c, r, snapped) = self.descend(c, sense, cfg, true);
        if !snapped {
            return Some(Outcome {
                value: r,
                coeffs: c,
            });
        }
        // Snapping can freeze coordinates that are small but nonzero at the
        // optimum (zero is stationary for each coordinate). Re-seed them and
        // polish without snapping; keep whichever is better.
        let top = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let seeded = c.map(|v| {
            if v.norm() == 0.0 {
                Complex64::new(1e-2 * SNAP * top, 0.0)
            } else {
                v
            }
        });
        // A short probe first: at a genuine vertex the polish only creeps back.
        let probe = OracleConfig {
            max_iterations: POLISH_PROBE,
            ..cfg.clone()
        };
        let best = match self.normalize(seeded) {
            Some(seeded) => {
                let (p, rp, _) = self.descend(seeded, sense, &probe, false);
                if sense.better(rp, r) {
                    let (p, rp, _) = self.descend(p, sense, cfg, false);
                    (p, rp)
                } else {
                    (c, r)
                }
            }
            None => (c, r),
        };
        Some(Outcome {
            value: best.1,
            coeffs: best.0,
        })
    }

    /// Backtracking projected gradient from a normalized `c`. Returns the
    /// final point, its ratio, and whether any snap was taken.
    fn descend(
        &self,
        mut c: DVector<Complex64>,
        sense: Sense,
        cfg: &OracleConfig,
        snapping: bool,
    ) -> (DVector<Complex64>, f64, bool) {
        let (mut r, mut g) = self.ratio_grad(&c);
        let s = sense.sign();
        let gnorm = g.norm();
        let mut t = if gnorm > 0.0 {
            0.25 * c.norm() / gnorm
        } else {
            0.0
        };
        let mut stalls = 0;
        let mut snapped = false;
        for _ in 0..cfg.max_iterations {
            let g2 = g.norm_squared();
            // The ratio is scale invariant, so `g` is tangent to the sphere
            // and vanishes at stationary points.
            if g2 == 0.0 || !g2.is_finite() || g2.sqrt() * c.norm() <= STATIONARY * r.abs() {
                break;
            }
            let mut accepted = None;
            while t * g2.sqrt() > 1e-15 * c.norm() {
                let trial = &c - &g * Complex64::new(s * t, 0.0);
                if let Some(trial) = self.normalize(trial) {
                    let rt = self.ratio(&trial);
                    if s * (rt - r) <= -cfg.armijo * t * g2 {
                        accepted = Some((trial, rt));
                        break;
                    }
                }
                t *= cfg.backtrack;
            }
            let Some((mut next, mut rn)) = accepted else {
                break;
            };
            if snapping {
                if let Some((z, rz)) = self.snap(&next) {
                    if !sense.better(rn, rz) {
                        (next, rn) = (z, rz);
                        snapped = true;
                    }
                }
            }
            let gain = (rn - r).abs() / r.abs().max(f64::MIN_POSITIVE);
            c = next;
            (r, g) = self.ratio_grad(&c);
            t /= cfg.backtrack;
            if gain < 1e-15 {
                stalls += 1;
                if stalls >= 5 {
                    break;
                }
            } else {
                stalls = 0;
            }
        }
        (c, r, snapped)
    }
}

/// Per-restart generator derived from the configured seed.
pub(crate) fn restart_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed ^ index
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(index),
    )
}

/// Gaussian vector with independent complex entries; after normalization
/// it is uniform on the Euclidean sphere.
pub(crate) fn gaussian_vector(rng: &mut ChaCha8Rng, dim: usize) -> DVector<Complex64> {
    DVector::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}
