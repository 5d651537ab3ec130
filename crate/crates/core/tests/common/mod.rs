//! Independent reference implementations used to cross-check the library.
//!
//! Everything here is written as plain loops straight from the defining
//! formulas, without reusing library internals beyond the data types.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphereqa_core::media::Plane;
use sphereqa_core::sphere::LatLon;

pub fn psnr_db(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        100.0
    } else {
        (10.0 * (peak * peak / mse).log10()).min(100.0)
    }
}

fn px(p: &Plane, i: usize, j: usize) -> f64 {
    f64::from(p.data[j * p.width + i])
}

pub fn oracle_psnr(a: &Plane, b: &Plane, peak: f64) -> f64 {
    let mut sse = 0.0;
    for j in 0..a.height {
        for i in 0..a.width {
            let e = px(a, i, j) - px(b, i, j);
            sse += e * e;
        }
    }
    psnr_db(sse / (a.width * a.height) as f64, peak)
}

pub fn oracle_ws_psnr(a: &Plane, b: &Plane, peak: f64) -> f64 {
    let h = a.height as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..a.height {
        let w = ((j as f64 + 0.5 - h / 2.0) * PI / h).cos();
        for i in 0..a.width {
            let e = px(a, i, j) - px(b, i, j);
            num += w * e * e;
            den += w;
        }
    }
    psnr_db(num / den, peak)
}

/// Position of `dir` in sample-center units: pixel `(i, j)` sits at `(i, j)`.
fn erp_sample_position(dir: LatLon, w: usize, h: usize) -> (f64, f64) {
    let mut u = (dir.lon + PI) / TAU;
    u -= u.floor();
    let x = u * w as f64 - 0.5;
    let y = (FRAC_PI_2 - dir.lat) / PI * h as f64 - 0.5;
    (x, y)
}

fn wrap(i: i64, n: usize) -> usize {
    let n = n as i64;
    (((i % n) + n) % n) as usize
}

/// Nearest sample; a position exactly halfway rounds down.
pub fn oracle_nearest(p: &Plane, x: f64, y: f64) -> f64 {
    let mut i = x.floor();
    if x - i > 0.5 {
        i += 1.0;
    }
    let mut j = y.floor();
    if y - j > 0.5 {
        j += 1.0;
    }
    let j = (j as i64).clamp(0, p.height as i64 - 1) as usize;
    px(p, wrap(i as i64, p.width), j)
}

pub fn oracle_bilinear(p: &Plane, x: f64, y: f64) -> f64 {
    let y = y.clamp(0.0, (p.height - 1) as f64);
    let x0 = x.floor();
    let y0 = y.floor();
    let (fx, fy) = (x - x0, y - y0);
    let i0 = wrap(x0 as i64, p.width);
    let i1 = wrap(x0 as i64 + 1, p.width);
    let j0 = y0 as usize;
    let j1 = (j0 + 1).min(p.height - 1);
    let v00 = px(p, i0, j0);
    let v10 = px(p, i1, j0);
    let v01 = px(p, i0, j1);
    let v11 = px(p, i1, j1);
    v00 * (1.0 - fx) * (1.0 - fy) + v10 * fx * (1.0 - fy) + v01 * (1.0 - fx) * fy + v11 * fx * fy
}

pub fn oracle_spsnr(a: &Plane, b: &Plane, points: &[LatLon], nearest: bool, peak: f64) -> f64 {
    let mut sse = 0.0;
    for &d in points {
        let (x, y) = erp_sample_position(d, a.width, a.height);
        let e = if nearest {
            oracle_nearest(a, x, y) - oracle_nearest(b, x, y)
        } else {
            oracle_bilinear(a, x, y) - oracle_bilinear(b, x, y)
        };
        sse += e * e;
    }
    psnr_db(sse / points.len() as f64, peak)
}

/// CPP-PSNR: every CPP cell of a `W × H` canvas inside the projection's
/// footprint is mapped back to the sphere and both frames are sampled
/// bilinearly there.
pub fn oracle_cpp_psnr(a: &Plane, b: &Plane, peak: f64) -> f64 {
    let (w, h) = (a.width, a.height);
    let (mut sse, mut n) = (0.0, 0usize);
    for j in 0..h {
        for i in 0..w {
            let xn = (i as f64 + 0.5) / w as f64 - 0.5;
            let yn = 0.5 - (j as f64 + 0.5) / h as f64;
            let lat = 3.0 * yn.asin();
            let lon = TAU * xn / (2.0 * (2.0 * lat / 3.0).cos() - 1.0);
            if lon.abs() > PI {
                continue;
            }
            let (x, y) = erp_sample_position(LatLon { lat, lon }, w, h);
            let e = oracle_bilinear(a, x, y) - oracle_bilinear(b, x, y);
            sse += e * e;
            n += 1;
        }
    }
    psnr_db(sse / n as f64, peak)
}

/// Direct windowed SSIM terms: for every window position the 121 weighted
/// moments are summed explicitly. Returns (mean l, mean cs, mean ssim).
pub fn oracle_ssim_terms(a: &[f64], b: &[f64], w: usize, h: usize, peak: f64) -> (f64, f64, f64) {
    let mut window = [[0.0f64; 11]; 11];
    let mut total = 0.0;
    for (v, row) in window.iter_mut().enumerate() {
        for (u, cell) in row.iter_mut().enumerate() {
            let dx = u as f64 - 5.0;
            let dy = v as f64 - 5.0;
            *cell = (-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5)).exp();
            total += *cell;
        }
    }
    let c1 = (0.01 * peak) * (0.01 * peak);
    let c2 = (0.03 * peak) * (0.03 * peak);
    let (mut ls, mut css, mut ss) = (0.0, 0.0, 0.0);
    let mut count = 0usize;
    for y in 0..=h - 11 {
        for x in 0..=w - 11 {
            let (mut ma, mut mb, mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for v in 0..11 {
                for u in 0..11 {
                    let wt = window[v][u] / total;
                    let p = a[(y + v) * w + x + u];
                    let q = b[(y + v) * w + x + u];
                    ma += wt * p;
                    mb += wt * q;
                    aa += wt * p * p;
                    bb += wt * q * q;
                    ab += wt * p * q;
                }
            }
            let va = aa - ma * ma;
            let vb = bb - mb * mb;
            let cov = ab - ma * mb;
            let l = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
            let cs = (2.0 * cov + c2) / (va + vb + c2);
            ls += l;
            css += cs;
            ss += l * cs;
            count += 1;
        }
    }
    let n = count as f64;
    (ls / n, css / n, ss / n)
}

pub fn to_f64(p: &Plane) -> Vec<f64> {
    p.data.iter().map(|&v| f64::from(v)).collect()
}

pub fn oracle_ssim(a: &Plane, b: &Plane, peak: f64) -> f64 {
    oracle_ssim_terms(&to_f64(a), &to_f64(b), a.width, a.height, peak).2
}

fn halve(img: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for y in 0..h / 2 {
        for x in 0..w / 2 {
            let s = img[2 * y * w + 2 * x]
                + img[2 * y * w + 2 * x + 1]
                + img[(2 * y + 1) * w + 2 * x]
                + img[(2 * y + 1) * w + 2 * x + 1];
            out.push(s / 4.0);
        }
    }
    out
}

pub fn oracle_ms_ssim(a: &Plane, b: &Plane, peak: f64) -> f64 {
    let weights = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];
    let (mut x, mut y) = (to_f64(a), to_f64(b));
    let (mut w, mut h) = (a.width, a.height);
    let mut result = 1.0;
    for (s, wt) in weights.iter().enumerate() {
        let (l, cs, _) = oracle_ssim_terms(&x, &y, w, h, peak);
        result *= f64::max(cs, 0.0).powf(*wt);
        if s == 4 {
            result *= f64::max(l, 0.0).powf(*wt);
        } else {
            x = halve(&x, w, h);
            y = halve(&y, w, h);
            w /= 2;
            h /= 2;
        }
    }
    result
}

/// A textured frame plus a distorted copy (noise and a blur stripe).
pub fn synthetic_pair(w: usize, h: usize, seed: u64) -> (Plane, Plane) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reference = Plane::from_fn(w, h, |i, j| {
        let base = 128.0
            + 60.0 * ((i as f64) * 0.21).sin() * ((j as f64) * 0.17).cos()
            + 30.0 * ((i + 2 * j) as f64 * 0.05).sin();
        (base + rng.random_range(-10.0..10.0))
            .round()
            .clamp(0.0, 255.0) as u16
    });
    let mut distorted = reference.clone();
    for j in 0..h {
        for i in 0..w {
            let k = j * w + i;
            let v = f64::from(reference.data[k]);
            let blurred = if i > 0 && i + 1 < w && j % 5 == 0 {
                (f64::from(reference.data[k - 1]) + v + f64::from(reference.data[k + 1])) / 3.0
            } else {
                v
            };
            distorted.data[k] = (blurred + rng.random_range(-6.0..6.0))
                .round()
                .clamp(0.0, 255.0) as u16;
        }
    }
    (reference, distorted)
}

/// Standardizes columns by population statistics (unit scale for constant columns).
pub fn standardize(x: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let n = x.len() as f64;
    let d = x[0].len();
    let mut mean = vec![0.0; d];
    let mut sd = vec![0.0; d];
    for k in 0..d {
        mean[k] = x.iter().map(|r| r[k]).sum::<f64>() / n;
        let v = x.iter().map(|r| (r[k] - mean[k]).powi(2)).sum::<f64>() / n;
        sd[k] = if v > 0.0 { v.sqrt() } else { 1.0 };
    }
    let z = x
        .iter()
        .map(|r| (0..d).map(|k| (r[k] - mean[k]) / sd[k]).collect())
        .collect();
    (z, mean, sd)
}

pub struct QpSolution {
    pub beta: Vec<f64>,
    pub bias: f64,
    pub z: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    pub sigma: f64,
}

impl QpSolution {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let q: Vec<f64> = (0..x.len())
            .map(|k| (x[k] - self.mean[k]) / self.sd[k])
            .collect();
        let mut f = self.bias;
        for (b, zi) in self.beta.iter().zip(&self.z) {
            let d2: f64 = zi.iter().zip(&q).map(|(u, v)| (u - v) * (u - v)).sum();
            f += b * (-self.sigma * d2).exp();
        }
        f
    }
}

/// Euclidean projection onto `{ β : Σβ = 0, −c ≤ β_i ≤ c }` by bisection on
/// the shift `t` in `clip(v − t)`.
fn project(v: &[f64], c: f64) -> Vec<f64> {
    let sum_at = |t: f64| v.iter().map(|x| (x - t).clamp(-c, c)).sum::<f64>();
    let (mut lo, mut hi) = (
        v.iter().cloned().fold(f64::INFINITY, f64::min) - c,
        v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + c,
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum_at(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    v.iter().map(|x| (x - t).clamp(-c, c)).collect()
}

/// ε = 0 support vector regression dual
/// `min ½ βᵀKβ − yᵀβ  s.t. Σβ = 0, |β_i| ≤ c`, solved by projected
/// gradient descent with step `1/λ_max` for `iterations` steps. The bias is
/// the mean residual over free coefficients (midpoint of the feasible
/// interval when none are free).
pub fn qp_oracle_svr(
    x: &[Vec<f64>],
    y: &[f64],
    c: f64,
    sigma: f64,
    iterations: usize,
) -> QpSolution {
    let (z, mean, sd) = standardize(x);
    let n = z.len();
    let mut k = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            let d2: f64 = z[a].iter().zip(&z[b]).map(|(u, v)| (u - v) * (u - v)).sum();
            k[a][b] = (-sigma * d2).exp();
        }
    }
    // Gershgorin bound on the largest eigenvalue.
    let lmax = k
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let step = 1.0 / lmax;
    let mut beta = vec![0.0; n];
    for _ in 0..iterations {
        let grad: Vec<f64> = (0..n)
            .map(|a| (0..n).map(|b| k[a][b] * beta[b]).sum::<f64>() - y[a])
            .collect();
        let moved: Vec<f64> = beta.iter().zip(&grad).map(|(b, g)| b - step * g).collect();
        let next = project(&moved, c);
        let change: f64 = next
            .iter()
            .zip(&beta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        beta = next;
        if change < 1e-15 {
            break;
        }
    }
    let residual = |a: usize| y[a] - (0..n).map(|b| k[a][b] * beta[b]).sum::<f64>();
    let tol = 1e-9 * c.max(1.0);
    let free: Vec<usize> = (0..n).filter(|&a| beta[a].abs() < c - tol).collect();
    let bias = if free.is_empty() {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for a in 0..n {
            let r = residual(a);
            // At the upper bound f_i ≤ y_i, at the lower bound f_i ≥ y_i.
            if beta[a] >= c - tol {
                hi = hi.min(r);
            } else {
                lo = lo.max(r);
            }
        }
        0.5 * (lo + hi)
    } else {
        free.iter().map(|&a| residual(a)).sum::<f64>() / free.len() as f64
    };
    QpSolution {
        beta,
        bias,
        z,
        mean,
        sd,
        sigma,
    }
}

pub fn random_direction(rng: &mut impl Rng) -> LatLon {
    let z: f64 = rng.random_range(-1.0..1.0);
    LatLon {
        lat: z.asin(),
        lon: rng.random_range(-PI..PI),
    }
}

pub fn angular_distance(a: LatLon, b: LatLon) -> f64 {
    let u = a.to_unit_vector();
    let v = b.to_unit_vector();
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let s = (cross[0].powi(2) + cross[1].powi(2) + cross[2].powi(2)).sqrt();
    let c = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    s.atan2(c)
}
