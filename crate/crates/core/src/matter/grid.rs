//! Lowest eigenpairs of banded real-symmetric matrices (finite-difference
//! Hamiltonians): inertia-count bisection for the eigenvalues, inverse
//! iteration with a pivoted band LU for the vectors.

use crate::error::{Error, Result};

use super::params::FdOrder;

/// Symmetric band matrix; `bands[k][i] = A[i, i + k]`, `bands[0]` is the diagonal.
#[derive(Debug, Clone)]
pub struct BandedSymmetric {
    n: usize,
    bands: Vec<Vec<f64>>,
}

impl BandedSymmetric {
    pub fn new(diagonal: Vec<f64>, off: Vec<Vec<f64>>) -> Self {
        let n = diagonal.len();
        let mut bands = vec![diagonal];
        for (k, b) in off.into_iter().enumerate() {
            assert_eq!(b.len(), n - k - 1, "band {} has wrong length", k + 1);
            bands.push(b);
        }
        Self { n, bands }
    }

    /// `−½ d²/dx² + V` on interior points of a Dirichlet grid with spacing `dx`.
    pub fn schrodinger(potential: &[f64], dx: f64, order: FdOrder) -> Self {
        let n = potential.len();
        let stencil: &[f64] = match order {
            FdOrder::Second => &[-2.0, 1.0],
            FdOrder::Fourth => &[-30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0],
        };
        let t = -0.5 / (dx * dx);
        let mut diag: Vec<f64> = potential.iter().map(|v| v + t * stencil[0]).collect();
        // wide stencil: odd reflection through the wall one spacing beyond each end
        if stencil.len() > 2 && n > 1 {
            diag[0] -= t * stencil[2];
            diag[n - 1] -= t * stencil[2];
        }
        let off = (1..stencil.len()).map(|k| vec![t * stencil[k]; n - k]).collect();
        Self::new(diag, off)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let k = j - i;
        if k < self.bands.len() {
            self.bands[k][i]
        } else {
            0.0
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let b = self.half_bandwidth();
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(b);
                let hi = (i + b).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * v[j]).sum()
            })
            .collect()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let b = self.half_bandwidth();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let r: f64 = (i.saturating_sub(b)..=(i + b).min(self.n - 1))
                .filter(|&j| j != i)
                .map(|j| self.get(i, j).abs())
                .sum();
            lo = lo.min(self.bands[0][i] - r);
            hi = hi.max(self.bands[0][i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `sigma` (Sylvester inertia of A − σI).
    pub fn count_below(&self, sigma: f64) -> usize {
        let (glo, ghi) = self.gershgorin();
        let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * glo.abs().max(ghi.abs()));
        self.count_below_with(sigma, pivmin)
    }

    fn count_below_with(&self, sigma: f64, pivmin: f64) -> usize {
        let b = self.half_bandwidth();
        if b == 1 {
            // Sturm sequence
            let (diag, off) = (&self.bands[0], &self.bands[1]);
            let mut count = 0;
            let mut d = 1.0;
            for i in 0..self.n {
                d = diag[i] - sigma - if i > 0 { off[i - 1] * off[i - 1] / d } else { 0.0 };
                if d.abs() < pivmin {
                    d = -pivmin;
                }
                if d < 0.0 {
                    count += 1;
                }
            }
            return count;
        }
        // l[i*b + (k-1)] = L[i, i-k]
        let mut l = vec![0.0; self.n * b.max(1)];
        let mut d = vec![0.0; self.n];
        let mut count = 0;
        for i in 0..self.n {
            for k in (1..=b.min(i)).rev() {
                let j = i - k;
                let mut s = self.get(i, j);
                for m in j.saturating_sub(b).max(i.saturating_sub(b))..j {
                    s -= l[i * b + (i - m - 1)] * l[j * b + (j - m - 1)] * d[m];
                }
                l[i * b + (k - 1)] = s / d[j];
            }
            let mut di = self.bands[0][i] - sigma;
            for k in 1..=b.min(i) {
                let li = l[i * b + (k - 1)];
                di -= li * li * d[i - k];
            }
            if di.abs() < pivmin {
                di = -pivmin;
            }
            if di < 0.0 {
                count += 1;
            }
            d[i] = di;
        }
        count
    }

    /// Eigenvalues `0..k` (ascending) by bisection on the inertia count.
    pub fn lowest_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        if k > self.n {
            return Err(Error::InvalidInput(format!("requested {k} eigenvalues of a {}-point grid", self.n)));
        }
        let (glo, ghi) = self.gershgorin();
        let scale = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
        let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * scale);
        let mut out = Vec::with_capacity(k);
        // brackets shared across eigenvalue indices
        let mut upper: Vec<f64> = vec![ghi; k];
        let mut lower = glo;
        for j in 0..k {
            let mut lo = lower;
            let mut hi = upper[j];
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * (lo.abs().max(hi.abs())) + 1e-3 * f64::EPSILON * scale {
                    break;
                }
                let c = self.count_below_with(mid, pivmin);
                if c > j {
                    hi = mid;
                    for u in upper.iter_mut().take(c.min(k)).skip(j) {
                        *u = u.min(mid);
                    }
                } else {
                    lo = mid;
                }
            }
            let lambda = 0.5 * (lo + hi);
            out.push(lambda);
            lower = lo;
        }
        Ok(out)
    }

    /// Lowest `k` eigenpairs; vectors normalized to unit Euclidean norm.
    pub fn lowest_eigenpairs(&self, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let values = self.lowest_eigenvalues(k)?;
        let (glo, ghi) = self.gershgorin();
        let scale = glo.abs().max(ghi.abs());
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
        for (j, &lambda) in values.iter().enumerate() {
            let lu = BandLu::factor(self, lambda, f64::EPSILON * scale)?;
            // deterministic, non-symmetric start vector
            let mut v: Vec<f64> = (0..self.n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7 + j as f64).sin()).collect();
            let cluster: Vec<usize> =
                (0..j).filter(|&p| (values[p] - lambda).abs() < 1e-7 * scale.max(1.0)).collect();
            for _ in 0..4 {
                normalize(&mut v);
                v = lu.solve(&v);
                for &p in &cluster {
                    let proj = dot(&vectors[p], &v);
                    for (x, y) in v.iter_mut().zip(&vectors[p]) {
                        *x -= proj * y;
                    }
                }
            }
            normalize(&mut v);
            let av = self.mul_vec(&v);
            let resid = av.iter().zip(&v).map(|(a, x)| (a - lambda * x).abs()).fold(0.0, f64::max);
            if resid > 1e-8 * scale.max(1.0) {
                return Err(Error::Convergence(format!(
                    "inverse iteration for state {j} did not converge (residual {resid:.3e})"
                )));
            }
            vectors.push(v);
        }
        Ok((values, vectors))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// LU factorization with partial pivoting of `A − σI` in band storage.
struct BandLu {
    n: usize,
    b: usize,
    width: usize,
    // row i stores columns i-b ..= i+2b at offset (j + b - i)
    u: Vec<f64>,
    // multipliers l[i*b + (r-1)] for row i+r in column i
    l: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    fn factor(a: &BandedSymmetric, sigma: f64, tiny: f64) -> Result<Self> {
        let n = a.n;
        let b = a.half_bandwidth();
        let width = 3 * b + 1;
        let mut u = vec![0.0; n * width];
        for i in 0..n {
            for j in i.saturating_sub(b)..=(i + b).min(n - 1) {
                u[i * width + (j + b - i)] = a.get(i, j) - if i == j { sigma } else { 0.0 };
            }
        }
        let mut l = vec![0.0; n * b.max(1)];
        let mut piv = vec![0; n];
        let tiny = tiny.max(f64::MIN_POSITIVE);
        for col in 0..n {
            let last = (col + b).min(n - 1);
            let at = |u: &Vec<f64>, i: usize, j: usize| u[i * width + (j + b - i)];
            let mut p = col;
            let mut best = at(&u, col, col).abs();
            for i in col + 1..=last {
                let v = at(&u, i, col).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[col] = p;
            let jmax = (col + 2 * b).min(n - 1);
            if p != col {
                for j in col..=jmax {
                    let vp = if j + b >= p { at(&u, p, j) } else { 0.0 };
                    let vc = at(&u, col, j);
                    u[col * width + (j + b - col)] = vp;
                    if j + b >= p && j <= p + 2 * b {
                        u[p * width + (j + b - p)] = vc;
                    }
                }
            }
            let mut pivot = at(&u, col, col);
            if pivot.abs() < tiny {
                pivot = if pivot < 0.0 { -tiny } else { tiny };
                u[col * width + b] = pivot;
            }
            for i in col + 1..=last {
                let m = at(&u, i, col) / pivot;
                l[col * b + (i - col - 1)] = m;
                u[i * width + (col + b - i)] = 0.0;
                if m != 0.0 {
                    for j in col + 1..=jmax {
                        if j + b >= i && j <= i + 2 * b {
                            let v = at(&u, col, j);
                            u[i * width + (j + b - i)] -= m * v;
                        }
                    }
                }
            }
        }
        Ok(Self { n, b, width, u, l, piv })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, b, w) = (self.n, self.b, self.width);
        let mut y = rhs.to_vec();
        for col in 0..n {
            y.swap(col, self.piv[col]);
            let last = (col + b).min(n - 1);
            for i in col + 1..=last {
                y[i] -= self.l[col * b + (i - col - 1)] * y[col];
            }
        }
        for i in (0..n).rev() {
            let jmax = (i + 2 * b).min(n - 1);
            let mut s = y[i];
            for j in i + 1..=jmax {
                s -= self.u[i * w + (j + b - i)] * y[j];
            }
            y[i] = s / self.u[i * w + b];
        }
        y
    }
}
