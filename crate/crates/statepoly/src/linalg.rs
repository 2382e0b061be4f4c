//! Dense linear algebra used by evaluation, the SDP solver and extraction.
//!
//! Everything here is deterministic: fixed iteration orders, fixed tile
//! grids for the parallel kernels, no randomized pivoting.

use crate::algebra::Coeff;
use rayon::prelude::*;

/// Dense square matrix, row major.
#[derive(Clone, PartialEq)]
pub struct Mat<C> {
    pub n: usize,
    pub a: Vec<C>,
}

impl<C: Coeff> Mat<C> {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            a: vec![C::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.set(i, i, C::one());
        }
        m
    }

    pub fn from_rows(rows: &[&[C]]) -> Self {
        let n = rows.len();
        let mut m = Mat::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "row length mismatch");
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.a[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut m = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Mat {
            n: self.n,
            a: self
                .a
                .iter()
                .zip(other.a.iter())
                .map(|(x, y)| x.clone() + y.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Mat {
            n: self.n,
            a: self
                .a
                .iter()
                .zip(other.a.iter())
                .map(|(x, y)| x.clone() - y.clone())
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Mat {
            n: self.n,
            a: self.a.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out: Mat<C> = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k).clone();
                if aik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j).clone() + aik.clone() * other.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[C]) -> Vec<C> {
        assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|i| {
                let mut acc = C::zero();
                for j in 0..self.n {
                    acc = acc + self.get(i, j).clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Self) -> Self {
        let n = self.n * other.n;
        let mut out = Mat::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                let s = self.get(i, j).clone();
                if s.is_zero() {
                    continue;
                }
                for k in 0..other.n {
                    for l in 0..other.n {
                        out.set(
                            i * other.n + k,
                            j * other.n + l,
                            s.clone() * other.get(k, l).clone(),
                        );
                    }
                }
            }
        }
        out
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Mat<D> {
        Mat {
            n: self.n,
            a: self.a.iter().map(f).collect(),
        }
    }

    pub fn trace(&self) -> C {
        let mut acc = C::zero();
        for i in 0..self.n {
            acc = acc + self.get(i, i).clone();
        }
        acc
    }
}

impl<C: Coeff> std::fmt::Debug for Mat<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                write!(f, "{} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// f64 kernels
// ---------------------------------------------------------------------------

impl Mat<f64> {
    pub fn frobenius_norm(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn symmetrize(&self) -> Mat<f64> {
        let mut out = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, 0.5 * (self.get(i, j) + self.get(j, i)));
            }
        }
        out
    }

    pub fn dot(&self, other: &Mat<f64>) -> f64 {
        self.a.iter().zip(other.a.iter()).map(|(x, y)| x * y).sum()
    }
}

/// Cholesky factorization `A = L L^T`; returns the lower factor or `None`
/// when the matrix is not (numerically) positive definite.
pub fn cholesky(a: &Mat<f64>) -> Option<Mat<f64>> {
    let n = a.n;
    let mut l = Mat::zeros(n);
    for j in 0..n {
        let mut d = *a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let dj = d.sqrt();
        l.set(j, j, dj);
        for i in (j + 1)..n {
            let mut s = *a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / dj);
        }
    }
    Some(l)
}

/// Solves `L y = b` for lower triangular `L`.
pub fn solve_lower(l: &Mat<f64>, b: &[f64]) -> Vec<f64> {
    let n = l.n;
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l.get(i, k) * y[k];
        }
        y[i] = s / l.get(i, i);
    }
    y
}

/// Solves `L^T x = y` for lower triangular `L`.
pub fn solve_lower_transpose(l: &Mat<f64>, y: &[f64]) -> Vec<f64> {
    let n = l.n;
    let mut x = y.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l.get(k, i) * x[k];
        }
        x[i] = s / l.get(i, i);
    }
    x
}

/// Inverse of a symmetric positive definite matrix via its Cholesky factor.
pub fn spd_inverse(a: &Mat<f64>) -> Option<Mat<f64>> {
    let l = cholesky(a)?;
    let n = a.n;
    let mut inv = Mat::zeros(n);
    // Solve for each unit vector; columns of the inverse.
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = 0.0);
        e[j] = 1.0;
        let y = solve_lower(&l, &e);
        let x = solve_lower_transpose(&l, &y);
        for i in 0..n {
            inv.set(i, j, x[i]);
        }
    }
    // Clean up asymmetry from rounding.
    Some(inv.symmetrize())
}

/// Blocked, rayon-parallel Cholesky for large symmetric positive definite
/// systems (the IPM Schur complement). Deterministic: the tile grid is fixed
/// and each tile is written by exactly one task. Factorizes in place into
/// the lower triangle; returns `false` when a pivot fails.
pub fn cholesky_inplace_parallel(a: &mut [f64], n: usize) -> bool {
    const B: usize = 128;
    let nb = n.div_ceil(B);
    for kb in 0..nb {
        let k0 = kb * B;
        let kw = B.min(n - k0);
        // Factor the diagonal tile serially.
        for j in k0..k0 + kw {
            let mut d = a[j * n + j];
            for t in k0..j {
                d -= a[j * n + t] * a[j * n + t];
            }
            if d <= 0.0 || !d.is_finite() {
                return false;
            }
            let dj = d.sqrt();
            a[j * n + j] = dj;
            for i in (j + 1)..n {
                let mut s = a[i * n + j];
                for t in k0..j {
                    s -= a[i * n + t] * a[j * n + t];
                }
                a[i * n + j] = s / dj;
            }
        }
        // Trailing update: A[i,j] -= sum_t L[i,t] L[j,t] over the freshly
        // factored panel columns, tiled over the remaining rows.
        let rest0 = k0 + kw;
        if rest0 >= n {
            break;
        }
        let panel: Vec<f64> = (rest0..n)
            .flat_map(|i| (k0..k0 + kw).map(move |t| (i, t)))
            .map(|(i, t)| a[i * n + t])
            .collect();
        let rows = n - rest0;
        let a_ptr = SendPtr(a.as_mut_ptr());
        let tiles: Vec<(usize, usize)> = (0..rows.div_ceil(B))
            .flat_map(|ib| (0..=ib).map(move |jb| (ib, jb)))
            .collect();
        tiles.par_iter().for_each(|&(ib, jb)| {
            let a = a_ptr;
            let i0 = ib * B;
            let i1 = (i0 + B).min(rows);
            let j0 = jb * B;
            let j1 = (j0 + B).min(rows);
            for i in i0..i1 {
                let jmax = j1.min(i + 1);
                for j in j0..jmax {
                    let mut s = 0.0;
                    let pi = i * kw;
                    let pj = j * kw;
                    for t in 0..kw {
                        s += panel[pi + t] * panel[pj + t];
                    }
                    // Tile (ib, jb) owns entry (rest0+i, rest0+j); no other
                    // task writes it.
                    unsafe {
                        *a.0.add((rest0 + i) * n + (rest0 + j)) -= s;
                    }
                }
            }
        });
    }
    true
}

#[derive(Clone, Copy)]
struct SendPtr(*mut f64);
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}

/// In-place forward/backward solve against a factor computed by
/// [`cholesky_inplace_parallel`].
pub fn solve_cholesky_inplace(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition (Householder tridiagonalization + implicit QL)
// ---------------------------------------------------------------------------

/// Full eigendecomposition of a symmetric matrix. Returns `(values, vectors)`
/// with eigenvalues ascending and eigenvectors as columns of the returned
/// matrix.
pub fn sym_eigen(a: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let n = a.n;
    if n == 0 {
        return (vec![], Mat::zeros(0));
    }
    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e);
    // Sort ascending, carrying eigenvectors along.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let dc = d.clone();
    let vc = v.clone();
    for (newi, &oldi) in idx.iter().enumerate() {
        d[newi] = dc[oldi];
        for k in 0..n {
            v.set(k, newi, *vc.get(k, oldi));
        }
    }
    (d, v)
}

/// Eigenvalues only, ascending.
pub fn sym_eigenvalues(a: &Mat<f64>) -> Vec<f64> {
    sym_eigen(a).0
}

/// Householder reduction to tridiagonal form.
fn tred2(v: &mut Mat<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = v.n;
    for j in 0..n {
        d[j] = *v.get(n - 1, j);
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = *v.get(i - 1, j);
                v.set(i, j, 0.0);
                v.set(j, i, 0.0);
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = if f > 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v.set(j, i, f);
                g = e[j] + v.get(j, j) * f;
                for k in (j + 1)..i {
                    g += v.get(k, j) * d[k];
                    e[k] += v.get(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let val = v.get(k, j) - (f * e[k] + g * d[k]);
                    v.set(k, j, val);
                }
                d[j] = *v.get(i - 1, j);
                v.set(i, j, 0.0);
            }
        }
        d[i] = h;
    }
    for i in 0..(n - 1) {
        v.set(n - 1, i, *v.get(i, i));
        v.set(i, i, 1.0);
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v.get(k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v.get(k, i + 1) * v.get(k, j);
                }
                for k in 0..=i {
                    let val = v.get(k, j) - g * d[k];
                    v.set(k, j, val);
                }
            }
        }
        for k in 0..=i {
            v.set(k, i + 1, 0.0);
        }
    }
    for j in 0..n {
        d[j] = *v.get(n - 1, j);
        v.set(n - 1, j, 0.0);
    }
    v.set(n - 1, n - 1, 1.0);
    e[0] = 0.0;
}

/// Implicit QL with shifts on the tridiagonal form, accumulating
/// eigenvectors.
fn tql2(v: &mut Mat<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = v.n;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                assert!(iter < 100, "eigen iteration failed to converge");
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0f64;
                let mut s2 = 0.0f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let gg = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * gg;
                    d[i + 1] = h + s * (c * gg + s * d[i]);
                    for k in 0..n {
                        h = *v.get(k, i + 1);
                        v.set(k, i + 1, s * v.get(k, i) + c * h);
                        v.set(k, i, c * v.get(k, i) - s * h);
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

/// Least squares solution of `A x = b` for a (possibly rank-deficient)
/// symmetric system via the eigendecomposition, with relative cutoff `rcond`.
pub fn sym_pinv_solve(a: &Mat<f64>, b: &[f64], rcond: f64) -> Vec<f64> {
    let (vals, vecs) = sym_eigen(a);
    let n = a.n;
    let vmax = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = vmax * rcond;
    let mut x = vec![0.0; n];
    for (k, &lam) in vals.iter().enumerate() {
        if lam.abs() <= cut {
            continue;
        }
        let mut proj = 0.0;
        for i in 0..n {
            proj += vecs.get(i, k) * b[i];
        }
        let w = proj / lam;
        for i in 0..n {
            x[i] += w * vecs.get(i, k);
        }
    }
    x
}
