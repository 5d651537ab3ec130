//! ε-insensitive support vector regression with the kernel
//! `K(a, b) = exp(-σ‖a − b‖²)`.
//!
//! The dual is solved in its 2n-variable form (one multiplier for each side
//! of the tube) by sequential minimal optimization: each step picks the
//! maximal-violating pair using second-order information and solves the
//! two-variable subproblem analytically.

use super::{ModelError, Samples};

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_MAX_ITER: usize = 100_000;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrParams {
    pub c: f64,
    pub sigma: f64,
    pub epsilon: f64,
    /// Stop once the maximal KKT violation falls below this.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl SvrParams {
    pub fn new(c: f64, sigma: f64) -> Self {
        Self {
            c,
            sigma,
            epsilon: DEFAULT_EPSILON,
            tolerance: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[inline]
pub fn rbf_kernel(a: &[f64], b: &[f64], sigma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-sigma * d2).exp()
}

/// Per-feature standardization fitted on the training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureScaler {
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let dim = x.first().map_or(0, Vec::len);
        let n = x.len() as f64;
        let mut mean = vec![0.0; dim];
        let mut std = vec![0.0; dim];
        for k in 0..dim {
            mean[k] = x.iter().map(|r| r[k]).sum::<f64>() / n;
            let var = x.iter().map(|r| (r[k] - mean[k]).powi(2)).sum::<f64>() / n;
            std[k] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
        Self { mean, std }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    /// `α_i − α_i*` for each retained support vector.
    pub support_coefficients: Vec<f64>,
    /// Support vectors in standardized feature space.
    pub support_vectors: Vec<Vec<f64>>,
    pub bias: f64,
    pub sigma: f64,
    pub c: f64,
    pub epsilon: f64,
    pub feature_scaler: FeatureScaler,
    /// Maximal KKT violation at termination.
    pub kkt_violation: f64,
    pub iterations: usize,
}

impl SvrModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let z = self.feature_scaler.transform(x);
        self.support_vectors
            .iter()
            .zip(&self.support_coefficients)
            .map(|(sv, d)| d * rbf_kernel(sv, &z, self.sigma))
            .sum::<f64>()
            + self.bias
    }
}

struct Solver {
    /// Kernel matrix over the n training rows, row-major.
    kernel: Vec<f64>,
    n: usize,
    c: f64,
    alpha: Vec<f64>,
    grad: Vec<f64>,
}

impl Solver {
    #[inline]
    fn sign(&self, t: usize) -> f64 {
        if t < self.n {
            1.0
        } else {
            -1.0
        }
    }

    /// Signed dual Hessian entry `s_t s_u K(t, u)`.
    #[inline]
    fn q(&self, t: usize, u: usize) -> f64 {
        self.sign(t) * self.sign(u) * self.kernel[(t % self.n) * self.n + u % self.n]
    }

    #[inline]
    fn at_upper(&self, t: usize) -> bool {
        self.alpha[t] >= self.c
    }

    #[inline]
    fn at_lower(&self, t: usize) -> bool {
        self.alpha[t] <= 0.0
    }

    /// Returns the working pair and the current violation, or `None` with
    /// the violation when no admissible pair exists.
    fn select_pair(&self) -> (Option<(usize, usize)>, f64) {
        let m = 2 * self.n;
        let mut gmax = f64::NEG_INFINITY;
        let mut i_best = None;
        for t in 0..m {
            let v = -self.sign(t) * self.grad[t];
            let admissible = if self.sign(t) > 0.0 {
                !self.at_upper(t)
            } else {
                !self.at_lower(t)
            };
            if admissible && v >= gmax {
                gmax = v;
                i_best = Some(t);
            }
        }
        let Some(i) = i_best else {
            return (None, 0.0);
        };
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_best = None;
        let mut obj_min = f64::INFINITY;
        for j in 0..m {
            let admissible = if self.sign(j) > 0.0 {
                !self.at_lower(j)
            } else {
                !self.at_upper(j)
            };
            if !admissible {
                continue;
            }
            let v = self.sign(j) * self.grad[j];
            gmax2 = gmax2.max(v);
            let grad_diff = gmax + v;
            if grad_diff > 0.0 {
                let mut quad =
                    self.q(i, i) + self.q(j, j) - 2.0 * self.sign(i) * self.sign(j) * self.q(i, j);
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj = -(grad_diff * grad_diff) / quad;
                if obj <= obj_min {
                    obj_min = obj;
                    j_best = Some(j);
                }
            }
        }
        let violation = gmax + gmax2;
        match j_best {
            Some(j) => (Some((i, j)), violation),
            None => (None, violation),
        }
    }

    fn update(&mut self, i: usize, j: usize) {
        let c = self.c;
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let qij = self.q(i, j);
        if self.sign(i) != self.sign(j) {
            let mut quad = self.q(i, i) + self.q(j, j) + 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = old_i - old_j;
            let (mut ai, mut aj) = (old_i + delta, old_j + delta);
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
            self.alpha[i] = ai;
            self.alpha[j] = aj;
        } else {
            let mut quad = self.q(i, i) + self.q(j, j) - 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = old_i + old_j;
            let (mut ai, mut aj) = (old_i - delta, old_j + delta);
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
            self.alpha[i] = ai;
            self.alpha[j] = aj;
        }
        let (di, dj) = (self.alpha[i] - old_i, self.alpha[j] - old_j);
        for t in 0..2 * self.n {
            self.grad[t] += self.q(i, t) * di + self.q(j, t) * dj;
        }
    }

    /// Offset `ρ` of the decision function `Σ d_i K(x_i, x) − ρ`.
    fn rho(&self) -> f64 {
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut free, mut sum_free) = (0usize, 0.0);
        for t in 0..2 * self.n {
            let yg = self.sign(t) * self.grad[t];
            if self.at_upper(t) {
                if self.sign(t) < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if self.at_lower(t) {
                if self.sign(t) > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                sum_free += yg;
            }
        }
        if free > 0 {
            sum_free / free as f64
        } else {
            (ub + lb) / 2.0
        }
    }
}

pub fn fit_svr(samples: &Samples, params: SvrParams) -> Result<SvrModel, ModelError> {
    if samples.len() < 2 {
        return Err(ModelError::TooFewRows {
            needed: 2,
            got: samples.len(),
        });
    }
    if !(params.c > 0.0 && params.sigma > 0.0 && params.epsilon >= 0.0) {
        return Err(ModelError::Hyperparameter(format!(
            "need c > 0, sigma > 0, epsilon >= 0 (got c={}, sigma={}, epsilon={})",
            params.c, params.sigma, params.epsilon
        )));
    }
    let scaler = FeatureScaler::fit(&samples.x);
    let z: Vec<Vec<f64>> = samples.x.iter().map(|r| scaler.transform(r)).collect();
    let n = z.len();
    let mut kernel = vec![0.0; n * n];
    for a in 0..n {
        for b in a..n {
            let k = rbf_kernel(&z[a], &z[b], params.sigma);
            kernel[a * n + b] = k;
            kernel[b * n + a] = k;
        }
    }
    let grad = (0..2 * n)
        .map(|t| {
            if t < n {
                params.epsilon - samples.y[t]
            } else {
                params.epsilon + samples.y[t - n]
            }
        })
        .collect();
    let mut solver = Solver {
        kernel,
        n,
        c: params.c,
        alpha: vec![0.0; 2 * n],
        grad,
    };

    let mut iterations = 0;
    let violation = loop {
        let (pair, violation) = solver.select_pair();
        let Some((i, j)) = pair else { break violation };
        if violation < params.tolerance {
            break violation;
        }
        if iterations >= params.max_iter {
            return Err(ModelError::NotConverged {
                iterations,
                violation,
            });
        }
        solver.update(i, j);
        iterations += 1;
    };

    let bias = -solver.rho();
    let mut support_coefficients = Vec::new();
    let mut support_vectors = Vec::new();
    for (k, zk) in z.into_iter().enumerate() {
        let d = solver.alpha[k] - solver.alpha[k + n];
        if d != 0.0 {
            support_coefficients.push(d);
            support_vectors.push(zk);
        }
    }
    Ok(SvrModel {
        support_coefficients,
        support_vectors,
        bias,
        sigma: params.sigma,
        c: params.c,
        epsilon: params.epsilon,
        feature_scaler: scaler,
        kkt_violation: violation.max(0.0),
        iterations,
    })
}
