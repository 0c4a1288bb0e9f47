//! Complex linear solves: partial-pivoted LU for full systems and a pivot-free
//! tridiagonal sweep that falls back to LU when a pivot collapses.

use nalgebra::{DMatrix, DVector};

use crate::equations::{CoupledModeEquations, Port};
use crate::C64;

/// Relative pivot size below which the tridiagonal sweep hands over to LU.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Solves `m x = b` for each right-hand side. `None` when `m` is singular or
/// the solution is not finite.
pub fn lu_solve(m: DMatrix<C64>, rhs: &[DVector<C64>]) -> Option<Vec<DVector<C64>>> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(scale.is_finite() && scale > 0.0) {
        return None;
    }
    let lu = m.lu();
    let u = lu.u();
    let min_pivot = u.diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if min_pivot <= f64::EPSILON * 1e-3 * scale {
        return None;
    }
    rhs.iter().map(|b| lu.solve(b).filter(|x| x.iter().all(|z| z.re.is_finite() && z.im.is_finite()))).collect()
}

/// Tridiagonal matrix stored by bands; `lower[j]` sits at `(j+1, j)` and `upper[j]` at `(j, j+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<C64>,
    pub diag: Vec<C64>,
    pub upper: Vec<C64>,
}

/// Outcome of a tridiagonal solve; `fallback` explains why LU was used instead.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSolution {
    pub x: Vec<Vec<C64>>,
    pub fallback: Option<String>,
}

impl Tridiagonal {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            m[(j, j)] = self.diag[j];
            if j + 1 < n {
                m[(j + 1, j)] = self.lower[j];
                m[(j, j + 1)] = self.upper[j];
            }
        }
        m
    }

    fn row_norm(&self, j: usize) -> f64 {
        let mut s = self.diag[j].norm();
        if j > 0 {
            s += self.lower[j - 1].norm();
        }
        if j + 1 < self.n() {
            s += self.upper[j].norm();
        }
        s
    }

    /// Forward elimination without pivoting. Returns the modified upper band
    /// and pivots, or the row at which a pivot became too small.
    fn factor(&self) -> Result<(Vec<C64>, Vec<C64>), usize> {
        let n = self.n();
        let mut pivots = Vec::with_capacity(n);
        let mut c = Vec::with_capacity(n.saturating_sub(1));
        for j in 0..n {
            let p = if j == 0 { self.diag[0] } else { self.diag[j] - self.lower[j - 1] * c[j - 1] };
            let threshold = PIVOT_TOLERANCE * self.row_norm(j);
            if !p.norm().is_finite() || threshold.is_nan() || p.norm() < threshold {
                return Err(j);
            }
            if j + 1 < n {
                c.push(self.upper[j] / p);
            }
            pivots.push(p);
        }
        Ok((c, pivots))
    }

    fn sweep(&self, c: &[C64], pivots: &[C64], b: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut d = Vec::with_capacity(n);
        for j in 0..n {
            let prev = if j == 0 { C64::from(0.0) } else { self.lower[j - 1] * d[j - 1] };
            d.push((b[j] - prev) / pivots[j]);
        }
        for j in (0..n.saturating_sub(1)).rev() {
            let next = d[j + 1];
            d[j] -= c[j] * next;
        }
        d
    }

    /// Solves for every right-hand side. `None` only when the LU fallback also fails.
    pub fn solve(&self, rhs: &[Vec<C64>]) -> Option<TridiagonalSolution> {
        match self.factor() {
            Ok((c, pivots)) => {
                let x: Vec<_> = rhs.iter().map(|b| self.sweep(&c, &pivots, b)).collect();
                if x.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite()) {
                    return Some(TridiagonalSolution { x, fallback: None });
                }
                self.dense_fallback(rhs, "non-finite tridiagonal solution".into())
            }
            Err(row) => self.dense_fallback(rhs, format!("small pivot at row {row}")),
        }
    }

    fn dense_fallback(&self, rhs: &[Vec<C64>], why: String) -> Option<TridiagonalSolution> {
        let b: Vec<_> = rhs.iter().map(|b| DVector::from_column_slice(b)).collect();
        let x = lu_solve(self.to_dense(), &b)?;
        Some(TridiagonalSolution {
            x: x.into_iter().map(|v| v.iter().copied().collect()).collect(),
            fallback: Some(format!("{why}; solved by dense LU")),
        })
    }
}

/// `-G` of an equation table as a dense matrix.
pub fn steady_matrix(eq: &impl CoupledModeEquations) -> DMatrix<C64> {
    let n = eq.dim();
    DMatrix::from_fn(n, n, |r, c| -eq.drift(r, c))
}

/// Bands of `-G` for a tridiagonal equation table.
pub fn steady_bands(eq: &impl CoupledModeEquations) -> Tridiagonal {
    let n = eq.dim();
    Tridiagonal {
        lower: (0..n.saturating_sub(1)).map(|j| -eq.drift(j + 1, j)).collect(),
        diag: (0..n).map(|j| -eq.drift(j, j)).collect(),
        upper: (0..n.saturating_sub(1)).map(|j| -eq.drift(j, j + 1)).collect(),
    }
}

/// Steady amplitudes for unit drive at each port via dense LU.
pub fn steady_dense(eq: &impl CoupledModeEquations) -> Option<[Vec<C64>; 2]> {
    let rhs = Port::BOTH.map(|p| DVector::from_vec(eq.input_vector(p)));
    let x = lu_solve(steady_matrix(eq), &rhs)?;
    let mut it = x.into_iter().map(|v| v.iter().copied().collect::<Vec<_>>());
    Some([it.next()?, it.next()?])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let t = Tridiagonal {
            lower: vec![c(1.0, 0.5), c(-0.3, 0.2)],
            diag: vec![c(4.0, 1.0), c(3.0, -2.0), c(5.0, 0.0)],
            upper: vec![c(0.2, -1.0), c(1.0, 1.0)],
        };
        let b = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)];
        let sol = t.solve(std::slice::from_ref(&b)).unwrap();
        assert!(sol.fallback.is_none());
        let dense = lu_solve(t.to_dense(), &[DVector::from_vec(b)]).unwrap();
        for (a, b) in sol.x[0].iter().zip(dense[0].iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_leading_pivot_falls_back() {
        let t =
            Tridiagonal { lower: vec![c(1.0, 0.0)], diag: vec![c(0.0, 0.0), c(0.0, 0.0)], upper: vec![c(1.0, 0.0)] };
        let sol = t.solve(&[vec![c(2.0, 0.0), c(3.0, 0.0)]]).unwrap();
        assert!(sol.fallback.is_some());
        assert!((sol.x[0][0] - c(3.0, 0.0)).norm() < 1e-15);
        assert!((sol.x[0][1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(lu_solve(m, &[DVector::from_element(2, c(1.0, 0.0))]).is_none());
    }
}
