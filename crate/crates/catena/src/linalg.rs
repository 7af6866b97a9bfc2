//! Tridiagonal and banded direct solvers plus a Sturm-sequence eigenvalue
//! routine for symmetrizable tridiagonal operators.

use crate::error::{Error, Result};

/// Tridiagonal matrix: `sub[i]` couples row i+1 to column i, `sup[i]` couples
/// row i to column i+1.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Tridiagonal {
            sub: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            sup: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(v.len(), n);
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.sub[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.sup[i] * v[i + 1];
            }
            out[i] = s;
        }
        out
    }

    /// Solves self * x = rhs by tridiagonal LU with partial pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        assert_eq!(rhs.len(), n);
        let dl = self.sub.clone();
        let mut d = self.diag.clone();
        let mut du = self.sup.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut b = rhs.to_vec();

        for i in 0..n.saturating_sub(1) {
            if dl[i].abs() <= d[i].abs() {
                if d[i] == 0.0 {
                    return Err(Error::SingularJacobian);
                }
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                b[i + 1] -= fact * b[i];
            } else {
                // pivot: swap rows i and i+1
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - fact * tmp;
                du[i] = tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du2[i];
                }
                b.swap(i, i + 1);
                b[i + 1] -= fact * b[i];
            }
        }
        if d[n - 1] == 0.0 {
            return Err(Error::SingularJacobian);
        }
        let mut x = vec![0.0; n];
        x[n - 1] = b[n - 1] / d[n - 1];
        if n >= 2 {
            x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        Ok(x)
    }

    /// Diagonal similarity transform to a symmetric tridiagonal (d, e); valid
    /// when sub[i] * sup[i] > 0 for all i.
    pub fn symmetrize(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.n();
        let mut e = vec![0.0; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            let p = self.sub[i] * self.sup[i];
            if p <= 0.0 {
                return None;
            }
            e[i] = p.sqrt();
        }
        Some((self.diag.clone(), e))
    }
}

/// Number of eigenvalues of the symmetric tridiagonal (d, e) strictly below x.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let n = d.len();
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        if q == 0.0 {
            q = 1e-300;
        }
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The k largest eigenvalues (descending) of the symmetric tridiagonal (d, e),
/// by bisection on the Sturm count.
pub fn sym_tridiag_top_eigenvalues(d: &[f64], e: &[f64], k: usize) -> Vec<f64> {
    let n = d.len();
    assert_eq!(e.len() + 1, n);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i < n - 1 { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let k = k.min(n);
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        // j-th largest = t-th smallest with t = n - j (1-indexed)
        let t = n - j;
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if sturm_count(d, e, mid) >= t {
                b = mid;
            } else {
                a = mid;
            }
            if b - a < 1e-14 * (1.0 + b.abs().max(a.abs())) {
                break;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

/// General banded matrix with kl sub- and ku super-diagonals, LAPACK-style
/// band storage with kl extra rows for pivoting fill-in.
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>, // column-major: ab[j * ldab + (kl + ku + i - j)]
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Banded { n, kl, ku, ldab, ab: vec![0.0; ldab * n] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && i + self.ku + self.kl >= j);
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || i + self.ku + self.kl < j {
            return 0.0;
        }
        self.ab[self.idx(i, j)]
    }

    /// In-place LU factorization with partial pivoting, then solve.
    pub fn solve(mut self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let (kl, ku) = (self.kl, self.ku);
        let mut b = rhs.to_vec();
        let mut ipiv = vec![0usize; n];

        for j in 0..n {
            let imax = (j + kl).min(n - 1);
            // pivot search in column j
            let mut p = j;
            let mut pmax = self.get(j, j).abs();
            for i in (j + 1)..=imax {
                let v = self.ab[self.idx(i, j)].abs();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            if pmax == 0.0 {
                return Err(Error::SingularJacobian);
            }
            ipiv[j] = p;
            let jmax = (j + ku + kl).min(n - 1);
            if p != j {
                for c in j..=jmax {
                    let a = self.idx(j, c);
                    let bidx = self.idx(p, c);
                    self.ab.swap(a, bidx);
                }
                b.swap(j, p);
            }
            let pivot = self.ab[self.idx(j, j)];
            for i in (j + 1)..=imax {
                let k = self.idx(i, j);
                let l = self.ab[k] / pivot;
                self.ab[k] = l;
                if l != 0.0 {
                    for c in (j + 1)..=jmax {
                        let rowj = self.ab[self.idx(j, c)];
                        if rowj != 0.0 {
                            let t = self.idx(i, c);
                            self.ab[t] -= l * rowj;
                        }
                    }
                    b[i] -= l * b[j];
                }
            }
        }
        // back substitution
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let jmax = (i + ku + kl).min(n - 1);
            let mut s = b[i];
            for c in (i + 1)..=jmax {
                s -= self.ab[self.idx(i, c)] * x[c];
            }
            x[i] = s / self.ab[self.idx(i, i)];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiag_solve_matches_apply() {
        let n = 50;
        let mut t = Tridiagonal::zeros(n);
        for i in 0..n {
            t.diag[i] = 3.0 + (i as f64).sin();
            if i + 1 < n {
                t.sup[i] = -1.0 + 0.1 * (i as f64).cos();
                t.sub[i] = -1.2;
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let rhs = t.apply(&x);
        let got = t.solve(&rhs).unwrap();
        for i in 0..n {
            assert!((got[i] - x[i]).abs() < 1e-11);
        }
    }

    #[test]
    fn tridiag_solve_handles_indefinite_with_pivoting() {
        // zero diagonal entry forces a pivot swap
        let mut t = Tridiagonal::zeros(3);
        t.diag = vec![0.0, 1.0, 2.0];
        t.sub = vec![1.0, 1.0];
        t.sup = vec![2.0, -1.0];
        let x = vec![1.0, -2.0, 3.0];
        let rhs = t.apply(&x);
        let got = t.solve(&rhs).unwrap();
        for i in 0..3 {
            assert!((got[i] - x[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn sturm_eigenvalues_of_discrete_laplacian() {
        // -(2/h^2)(1 - cos(k pi h / 2)) on [-1,1] interior, h = 2/(m+1)
        let m = 49;
        let h = 2.0 / (m + 1) as f64;
        let d = vec![-2.0 / (h * h); m];
        let e = vec![1.0 / (h * h); m - 1];
        let eigs = sym_tridiag_top_eigenvalues(&d, &e, 5);
        for (j, &mu) in eigs.iter().enumerate() {
            let k = (j + 1) as f64;
            let exact = -(2.0 / (h * h)) * (1.0 - (k * std::f64::consts::PI * h / 2.0).cos());
            assert!((mu - exact).abs() < 1e-10, "mode {j}: {mu} vs {exact}");
        }
    }

    #[test]
    fn banded_solve_matches_tridiagonal() {
        let n = 40;
        let mut t = Tridiagonal::zeros(n);
        let mut bmat = Banded::zeros(n, 1, 1);
        for i in 0..n {
            let dv = 2.5 + 0.3 * (i as f64).sin();
            t.diag[i] = dv;
            bmat.set(i, i, dv);
            if i + 1 < n {
                t.sup[i] = -1.0;
                t.sub[i] = -0.9;
                bmat.set(i, i + 1, -1.0);
                bmat.set(i + 1, i, -0.9);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let rhs = t.apply(&x);
        let got = bmat.solve(&rhs).unwrap();
        for i in 0..n {
            assert!((got[i] - x[i]).abs() < 1e-11);
        }
    }

    #[test]
    fn banded_wider_bandwidth_roundtrip() {
        // pentadiagonal, checked against dense multiplication
        let n = 30;
        let kl = 2;
        let ku = 2;
        let entry = |i: usize, j: usize| -> f64 {
            if i == j {
                4.0 + (i as f64 * 0.1).sin()
            } else if i.abs_diff(j) <= 2 {
                0.5 / (1.0 + (i + j) as f64 * 0.05)
            } else {
                0.0
            }
        };
        let mut m = Banded::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                m.set(i, j, entry(i, j));
            }
        }
        let x: Vec<f64> = (0..n).map(|i| 1.0 - (i as f64 * 0.2).sin()).collect();
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                rhs[i] += entry(i, j) * x[j];
            }
        }
        let got = m.solve(&rhs).unwrap();
        for i in 0..n {
            assert!((got[i] - x[i]).abs() < 1e-11);
        }
    }
}
