//! Dense complex linear algebra generic over the real scalar: Hessenberg
//! reduction, shifted QR eigenvalues, LU solves and bottleneck pairing of
//! eigenvalue lists.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Result, SpectreError};
use crate::scalar::{cabs, csqrt, Real};

/// Row-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T: Real> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend(row);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        let mut s = T::zero();
        for z in &self.data {
            s += z.re * z.re + z.im * z.im;
        }
        s.sqrt()
    }

    /// All eigenvalues with algebraic multiplicity, in no particular order.
    pub fn eigenvalues(&self) -> Result<Vec<Complex<T>>> {
        let mut h = self.clone();
        h.reduce_to_hessenberg();
        h.hessenberg_qr()
    }

    /// Householder reduction to upper Hessenberg form (similarity transform).
    fn reduce_to_hessenberg(&mut self) {
        let n = self.n;
        if n < 3 {
            return;
        }
        let mut v = vec![Complex::<T>::zero(); n];
        for k in 0..n - 2 {
            let mut alpha = T::zero();
            for i in k + 1..n {
                let z = self[(i, k)];
                alpha += z.re * z.re + z.im * z.im;
            }
            let alpha = alpha.sqrt();
            if alpha == T::zero() {
                continue;
            }
            // v = x + e^{i arg x0} |x| e1 avoids cancellation
            let x0 = self[(k + 1, k)];
            let a0 = cabs(x0);
            let phase = if a0 == T::zero() {
                Complex::one()
            } else {
                x0 / Complex::new(a0, T::zero())
            };
            for slot in v.iter_mut().take(n) {
                *slot = Complex::zero();
            }
            for i in k + 1..n {
                v[i] = self[(i, k)];
            }
            v[k + 1] += phase * Complex::new(alpha, T::zero());
            let mut vnorm2 = T::zero();
            for z in &v[k + 1..] {
                vnorm2 += z.re * z.re + z.im * z.im;
            }
            let beta = T::from_f64(2.0) / vnorm2;

            // A <- (I - β v v*) A
            for j in 0..n {
                let mut s = Complex::<T>::zero();
                for i in k + 1..n {
                    s += v[i].conj() * self[(i, j)];
                }
                let s = s * Complex::new(beta, T::zero());
                for i in k + 1..n {
                    let t = v[i] * s;
                    self[(i, j)] -= t;
                }
            }
            // A <- A (I - β v v*)
            for i in 0..n {
                let mut s = Complex::<T>::zero();
                for j in k + 1..n {
                    s += self[(i, j)] * v[j];
                }
                let s = s * Complex::new(beta, T::zero());
                for j in k + 1..n {
                    let t = s * v[j].conj();
                    self[(i, j)] -= t;
                }
            }
            for i in k + 2..n {
                self[(i, k)] = Complex::zero();
            }
        }
    }

    fn hessenberg_qr(mut self) -> Result<Vec<Complex<T>>> {
        let n = self.n;
        let mut eig = vec![Complex::<T>::zero(); n];
        if n == 0 {
            return Ok(eig);
        }
        let eps = T::from_f64(T::EPSILON);
        let scale = self.norm();
        let tiny = T::from_f64(f64::MIN_POSITIVE) / T::from_f64(T::EPSILON);
        let abs_floor = if scale > T::zero() { scale * eps * T::from_f64(1e-3) } else { tiny };
        let max_iter = 100;
        let mut rot: Vec<(T, Complex<T>)> = Vec::with_capacity(n);

        let mut hi = n - 1;
        let mut iter = 0usize;
        loop {
            if hi == 0 {
                eig[0] = self[(0, 0)];
                break;
            }
            // deflation scan
            let mut lo = hi;
            while lo > 0 {
                let sub = cabs(self[(lo, lo - 1)]);
                let diag = cabs(self[(lo, lo)]) + cabs(self[(lo - 1, lo - 1)]);
                if sub <= abs_floor || (sub <= eps * diag && ahues_tisseur_ok(&self, lo, eps)) {
                    self[(lo, lo - 1)] = Complex::zero();
                    break;
                }
                lo -= 1;
            }

            if lo == hi {
                eig[hi] = self[(hi, hi)];
                hi -= 1;
                iter = 0;
                continue;
            }
            if lo + 1 == hi {
                let (e1, e2) = eig2(
                    self[(lo, lo)],
                    self[(lo, hi)],
                    self[(hi, lo)],
                    self[(hi, hi)],
                );
                eig[lo] = e1;
                eig[hi] = e2;
                if lo == 0 {
                    break;
                }
                hi = lo - 1;
                iter = 0;
                continue;
            }

            iter += 1;
            if iter > max_iter {
                return Err(SpectreError::EigenSolverFailed(format!(
                    "QR iteration stalled at index {hi} of {n}"
                )));
            }

            let shift = if iter.is_multiple_of(10) {
                let s = cabs(self[(hi, hi - 1)]) + cabs(self[(hi - 1, hi - 2)]);
                self[(hi, hi)] + Complex::new(T::from_f64(0.75) * s, T::from_f64(-0.4375) * s)
            } else {
                eig2(
                    self[(hi - 1, hi - 1)],
                    self[(hi - 1, hi)],
                    self[(hi, hi - 1)],
                    self[(hi, hi)],
                )
                .1
            };

            // explicit shifted QR step on the active window [lo, hi]
            for k in lo..=hi {
                self[(k, k)] -= shift;
            }
            rot.clear();
            for k in lo..hi {
                let (c, s) = givens(self[(k, k)], self[(k + 1, k)]);
                for j in k..=hi {
                    let a = self[(k, j)];
                    let b = self[(k + 1, j)];
                    self[(k, j)] = a * c + s * b;
                    self[(k + 1, j)] = b * c - s.conj() * a;
                }
                self[(k + 1, k)] = Complex::zero();
                rot.push((c, s));
            }
            for (idx, &(c, s)) in rot.iter().enumerate() {
                let k = lo + idx;
                let cc = Complex::new(c, T::zero());
                for i in lo..=(k + 1).min(hi) {
                    let a = self[(i, k)];
                    let b = self[(i, k + 1)];
                    self[(i, k)] = a * cc + b * s.conj();
                    self[(i, k + 1)] = b * cc - a * s;
                }
            }
            for k in lo..=hi {
                self[(k, k)] += shift;
            }
        }
        Ok(eig)
    }
}

/// Second deflation test: accept a small subdiagonal only when the product
/// criterion also holds, which protects tiny eigenvalues of graded matrices.
fn ahues_tisseur_ok<T: Real>(h: &CMatrix<T>, k: usize, eps: T) -> bool {
    let hkk1 = cabs(h[(k, k - 1)]);
    let hk1k = cabs(h[(k - 1, k)]);
    let ab = if hkk1 > hk1k { hkk1 } else { hk1k };
    let ba = if hkk1 > hk1k { hk1k } else { hkk1 };
    let a = h[(k - 1, k - 1)];
    let b = h[(k, k)];
    let diff = cabs(a - b);
    let aa_ = cabs(b);
    let aa = if aa_ > diff { aa_ } else { diff };
    let bb = if aa_ > diff { diff } else { aa_ };
    let s = aa + ab;
    if s == T::zero() {
        return true;
    }
    ba * (ab / s) <= eps * (bb * (aa / s))
}

/// Rotation `[[c, s], [-s̄, c]]` with real `c` mapping `(a, b)` to `(r, 0)`.
fn givens<T: Real>(a: Complex<T>, b: Complex<T>) -> (T, Complex<T>) {
    let na = cabs(a);
    let nb = cabs(b);
    if nb == T::zero() {
        return (T::one(), Complex::zero());
    }
    if na == T::zero() {
        return (T::zero(), Complex::one());
    }
    let rho = crate::scalar::hypot(na, nb);
    let c = na / rho;
    let s = (a / Complex::new(na, T::zero())) * b.conj() / Complex::new(rho, T::zero());
    (c, s)
}

/// Eigenvalues of `[[a, b], [c, d]]`; the second one is the one nearer `d`.
fn eig2<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> (Complex<T>, Complex<T>) {
    let half = Complex::new(T::from_f64(0.5), T::zero());
    let p = (a - d) * half;
    let bc = b * c;
    let disc = csqrt(p * p + bc);
    let s1 = p + disc;
    let s2 = p - disc;
    let s = if cabs(s1) >= cabs(s2) { s1 } else { s2 };
    if cabs(s) == T::zero() {
        return (d, d);
    }
    (d + s, d - bc / s)
}

impl<T: Real> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorization with partial pivoting.
pub struct Lu<T: Real> {
    lu: CMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    /// Exactly singular pivots are replaced by `floor` so inverse iteration
    /// can still proceed.
    pub fn new(mut a: CMatrix<T>, floor: T) -> Self {
        let n = a.n;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = cabs(a[(k, k)]);
            for i in k + 1..n {
                let v = cabs(a[(i, k)]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            if cabs(a[(k, k)]) <= floor {
                a[(k, k)] = Complex::new(floor, T::zero());
            }
            let piv = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / piv;
                a[(i, k)] = f;
                for j in k + 1..n {
                    let t = f * a[(k, j)];
                    a[(i, j)] -= t;
                }
            }
        }
        Self { lu: a, perm }
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.n;
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[(i, j)] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.lu[(i, j)] * x[j];
                x[i] -= t;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Pairing of two eigenvalue lists minimizing the largest pair distance.
/// Returns `(max_distance, pairs)` where each pair is `(index in a, index in b)`;
/// every element of the shorter list is paired.
pub fn bottleneck_pairing(a: &[Complex<f64>], b: &[Complex<f64>]) -> (f64, Vec<(usize, usize)>) {
    if a.is_empty() || b.is_empty() {
        return (0.0, Vec::new());
    }
    let swap = a.len() > b.len();
    let (left, right) = if swap { (b, a) } else { (a, b) };
    let dist: Vec<Vec<f64>> = left
        .iter()
        .map(|x| right.iter().map(|y| (x - y).norm()).collect())
        .collect();
    let mut cand: Vec<f64> = dist.iter().flatten().copied().collect();
    cand.sort_by(f64::total_cmp);
    cand.dedup();

    let (mut lo, mut hi) = (0usize, cand.len() - 1);
    let mut best = matching(&dist, cand[hi]).expect("complete threshold admits a matching");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match matching(&dist, cand[mid]) {
            Some(m) => {
                best = m;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let pairs: Vec<(usize, usize)> = best
        .into_iter()
        .enumerate()
        .map(|(i, j)| if swap { (j, i) } else { (i, j) })
        .collect();
    (cand[lo], pairs)
}

/// Kuhn's augmenting-path matching of every left vertex using edges with
/// distance at most `thr`.
fn matching(dist: &[Vec<f64>], thr: f64) -> Option<Vec<usize>> {
    let nl = dist.len();
    let nr = dist[0].len();
    let mut owner: Vec<Option<usize>> = vec![None; nr];

    fn augment(
        u: usize,
        dist: &[Vec<f64>],
        thr: f64,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for v in 0..owner.len() {
            if dist[u][v] <= thr && !seen[v] {
                seen[v] = true;
                if owner[v].is_none_or(|w| augment(w, dist, thr, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }

    for u in 0..nl {
        let mut seen = vec![false; nr];
        if !augment(u, dist, thr, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut result = vec![0; nl];
    for (v, o) in owner.iter().enumerate() {
        if let Some(u) = o {
            result[*u] = v;
        }
    }
    Some(result)
}
