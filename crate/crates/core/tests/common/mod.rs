//! Reference evaluations written directly from the coupled-mode equations,
//! sharing no code with the library solvers.
#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64 as C;
use rand::Rng;
use rescat::SMatrix;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
/// Lab-scale hanger parameters: resonance, external and intrinsic rates.
pub const HANGER_OMEGA: f64 = TWO_PI * 6.659e9;
pub const HANGER_GAMMA: f64 = TWO_PI * 928e3;
pub const HANGER_GAMMA_A: f64 = TWO_PI * 212e3;
/// Lab-scale necklace-chain parameters.
pub const NECKLACE_GAMMA: f64 = TWO_PI * 1.86e6;
pub const NECKLACE_G: f64 = TWO_PI * 44e6;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn rel_err(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn max_dev(a: &SMatrix, b: &SMatrix) -> f64 {
    [(a.s11, b.s11), (a.s21, b.s21), (a.s12, b.s12), (a.s22, b.s22)]
        .iter()
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hanger(delta: f64, gamma: f64, gamma_a: f64) -> SMatrix {
    let s11 = c(-gamma, 0.0) / c(gamma + gamma_a / 2.0, delta);
    let s21 = c(1.0, 0.0) + s11;
    SMatrix::new(s11, s21, s21, s11)
}

/// `sign = +1` necklace, `-1` bridge.
pub fn two_port(delta: f64, g1: f64, g2: f64, ga: f64, sign: f64) -> SMatrix {
    let d = c((g1 + g2) / 2.0 + ga / 2.0, delta);
    let s21 = c(sign * (g1 * g2).sqrt(), 0.0) / d;
    SMatrix::new(c(1.0, 0.0) - g1 / d, s21, s21, c(1.0, 0.0) - g2 / d)
}

/// Gaussian elimination with partial pivoting on a dense complex system.
pub fn solve(mut m: Vec<Vec<C>>, mut b: Vec<C>) -> Vec<C> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm())).unwrap();
        m.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= f * v;
            }
            let v = b[k];
            b[i] -= f * v;
        }
    }
    let mut x = vec![c(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: C = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / m[i][i];
    }
    x
}

/// Side-coupled chain, 1-based sites j with phases (j-1)θ towards the left
/// end and (N-j)θ towards the right end.
pub fn hanger_chain(delta: &[f64], gamma: &[f64], gamma_a: &[f64], theta: f64) -> SMatrix {
    let n = delta.len();
    let e = |k: f64| C::from_polar(1.0, k * theta);
    let m: Vec<Vec<C>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    let exch = (gamma[j] * gamma[k]).sqrt() * e((j as f64 - k as f64).abs());
                    if j == k {
                        c(gamma_a[j] / 2.0, delta[j]) + exch
                    } else {
                        exch
                    }
                })
                .collect()
        })
        .collect();
    let towards_left = |j: usize| e(j as f64);
    let towards_right = |j: usize| e((n - 1 - j) as f64);
    let drive_r: Vec<C> = (0..n).map(|j| -gamma[j].sqrt() * towards_left(j)).collect();
    let drive_l: Vec<C> = (0..n).map(|j| -gamma[j].sqrt() * towards_right(j)).collect();
    let a_r = solve(m.clone(), drive_r);
    let a_l = solve(m, drive_l);
    let l_out = |a: &[C]| (0..n).map(|j| gamma[j].sqrt() * towards_left(j) * a[j]).sum::<C>();
    let r_out = |a: &[C]| (0..n).map(|j| gamma[j].sqrt() * towards_right(j) * a[j]).sum::<C>();
    let pass = e((n - 1) as f64);
    SMatrix::new(l_out(&a_r), pass + r_out(&a_r), pass + l_out(&a_l), r_out(&a_l))
}

/// Necklace chain in the site basis. `ring` adds the bond between the last
/// and first site (accumulating onto existing entries for N ≤ 2).
pub fn necklace_chain(delta: &[f64], g: &[f64], g1: f64, g2: f64, gamma_a: &[f64], ring: Option<f64>) -> SMatrix {
    let n = delta.len();
    let mut m = vec![vec![c(0.0, 0.0); n]; n];
    for j in 0..n {
        m[j][j] = c(gamma_a[j] / 2.0, delta[j]);
    }
    m[0][0] += g1 / 2.0;
    m[n - 1][n - 1] += g2 / 2.0;
    match ring {
        None => {
            for j in 0..n - 1 {
                m[j][j + 1] -= c(0.0, g[j]);
                m[j + 1][j] -= c(0.0, g[j]);
            }
        }
        Some(hop) => {
            for j in 0..n {
                let k = (j + 1) % n;
                m[j][k] -= c(0.0, hop);
                m[k][j] -= c(0.0, hop);
            }
        }
    }
    let mut b1 = vec![c(0.0, 0.0); n];
    b1[0] = c(-g1.sqrt(), 0.0);
    let mut b2 = vec![c(0.0, 0.0); n];
    b2[n - 1] = c(g2.sqrt(), 0.0);
    let a1 = solve(m.clone(), b1);
    let a2 = solve(m, b2);
    SMatrix::new(1.0 + g1.sqrt() * a1[0], -g2.sqrt() * a1[n - 1], g1.sqrt() * a2[0], 1.0 - g2.sqrt() * a2[n - 1])
}

pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}
