//! Banded LU with partial pivoting.
//!
//! Storage follows the LAPACK band convention: the matrix keeps `kl`
//! subdiagonals and `ku` superdiagonals, plus `kl` extra superdiagonals of
//! fill-in room for row swaps. Entry (i, j) lives at band row
//! `kl + ku + i - j`, column `j`.

use crate::{Error, Result};

/// A square banded matrix with `kl` subdiagonals and `ku` superdiagonals.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    // (2*kl + ku + 1) x n, data[r * n + j].
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; (2 * kl + ku + 1) * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether (i, j) is inside the declared band (excluding fill-in room).
    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        let d = j as isize - i as isize;
        -(self.kl as isize) <= d && d <= self.ku as isize
    }

    /// Inside the widened band used during factorization.
    #[inline]
    fn in_wide_band(&self, i: usize, j: usize) -> bool {
        let d = j as isize - i as isize;
        -(self.kl as isize) <= d && d <= (self.kl + self.ku) as isize
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(self.in_wide_band(i, j));
        let r = (self.kl + self.ku) as isize + i as isize - j as isize;
        r as usize * self.n + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_wide_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    #[inline]
    fn set_raw(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Set an entry; panics outside the declared band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            self.in_band(i, j),
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        self.set_raw(i, j, v);
    }

    /// Add to an entry; panics outside the declared band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            self.in_band(i, j),
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Multiply by a dense vector (declared band only).
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.kl);
            let j1 = (i + self.ku).min(self.n - 1);
            let mut acc = 0.0;
            for j in j0..=j1 {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Factor in place with partial pivoting and solve A x = b.
    pub fn solve(mut self, mut b: Vec<f64>) -> Result<Vec<f64>> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut piv = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SolverSingular(k));
            }
            let jmax = (k + kl + ku).min(n - 1);
            if piv != k {
                for j in k..=jmax {
                    let a = self.get(k, j);
                    let c = self.get(piv, j);
                    self.set_raw(k, j, c);
                    if self.in_wide_band(piv, j) {
                        self.set_raw(piv, j, a);
                    }
                }
                b.swap(k, piv);
            }
            let diag = self.get(k, k);
            for i in k + 1..=last {
                let factor = self.get(i, k) / diag;
                if factor != 0.0 {
                    for j in k + 1..=jmax {
                        let v = self.get(i, j) - factor * self.get(k, j);
                        self.set_raw(i, j, v);
                    }
                    b[i] -= factor * b[k];
                }
                self.set_raw(i, k, 0.0);
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let jmax = (k + kl + ku).min(n - 1);
            let mut acc = b[k];
            for j in k + 1..=jmax {
                acc -= self.get(k, j) * x[j];
            }
            let d = self.get(k, k);
            if d == 0.0 || !d.is_finite() {
                return Err(Error::SolverSingular(k));
            }
            x[k] = acc / d;
        }
        Ok(x)
    }
}

/// Dense Gaussian elimination with partial pivoting for small systems
/// (projection Newton steps, endpoint repairs).
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k][k].abs();
        for i in k + 1..n {
            if a[i][k].abs() > best {
                best = a[i][k].abs();
                piv = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(Error::SolverSingular(k));
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in k + 1..n {
            acc -= a[k][j] * x[j];
        }
        x[k] = acc / a[k][k];
    }
    Ok(x)
}
