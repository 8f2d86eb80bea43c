//! Dense Hermitian operator algebra on labeled tensor-product spaces.
//!
//! Every operator lives on a [`LabeledSpace`] whose basis is ordered
//! row-major over the declared factors: for an `(electronic, photon)` space
//! the composite index is `i * n_photon + n`, so the electronic index varies
//! slowest. This matches `nalgebra`'s Kronecker product, which is what the
//! embedding routines use.
//!
//! Functions of Hermitian operators (exponentials, trigonometric functions)
//! are evaluated through a full eigendecomposition `H = S diag(λ) S†`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Relative tolerance on `max |M - M†|` for an operator to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

const SYMMETRIZE_LOG_THRESHOLD: f64 = 1e-13;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Promote a real matrix to a complex one.
pub fn complexify(m: &RMatrix) -> CMatrix {
    m.map(c)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `max |M - M†|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let scale = max_abs(m);
    let deviation = hermiticity_deviation(m);
    let tolerance = HERMITIAN_TOL * scale;
    if deviation > tolerance {
        return Err(Error::NotHermitian {
            deviation,
            tolerance,
        });
    }
    Ok(())
}

/// An ordered list of named tensor factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSpace {
    factors: Vec<(String, usize)>,
}

impl LabeledSpace {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> =
            factors.into_iter().map(|(n, d)| (n.into(), d)).collect();
        if factors.is_empty() {
            return Err(Error::InvalidInput("a space needs at least one factor".into()));
        }
        if let Some((name, _)) = factors.iter().find(|(_, d)| *d == 0) {
            return Err(Error::InvalidInput(format!("factor `{name}` has dimension 0")));
        }
        Ok(Self { factors })
    }

    /// The `electronic ⊗ photon` space used by every polariton builder.
    pub fn electronic_photonic(n_el: usize, n_fock: usize) -> Self {
        Self::new([("el", n_el), ("ph", n_fock)]).expect("dimensions must be positive")
    }

    pub fn single(name: &str, dim: usize) -> Self {
        Self::new([(name, dim)]).expect("dimension must be positive")
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn factor_dim(&self, i: usize) -> usize {
        self.factors[i].1
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|(n, _)| n == name)
    }

    pub fn total_dimension(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    /// Embed factor operators into the full space, with identities on
    /// factors that are not listed.
    pub fn embed(&self, ops: &[(usize, &CMatrix)]) -> Result<CMatrix> {
        let mut chosen: Vec<Option<&CMatrix>> = vec![None; self.factors.len()];
        for &(k, op) in ops {
            let dim = *self
                .factors
                .get(k)
                .map(|(_, d)| d)
                .ok_or_else(|| Error::InvalidInput(format!("no factor with index {k}")))?;
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.nrows().max(op.ncols()),
                });
            }
            if chosen[k].replace(op).is_some() {
                return Err(Error::InvalidInput(format!("factor {k} listed twice")));
            }
        }
        let mut out = CMatrix::identity(1, 1);
        for (k, (_, dim)) in self.factors.iter().enumerate() {
            out = match chosen[k] {
                Some(op) => out.kronecker(op),
                None => out.kronecker(&CMatrix::identity(*dim, *dim)),
            };
        }
        Ok(out)
    }
}

/// A square operator on a [`LabeledSpace`].
#[derive(Debug, Clone)]
pub struct HybridOperator {
    space: LabeledSpace,
    matrix: CMatrix,
    hermitian: bool,
}

impl HybridOperator {
    /// Wrap a general (not necessarily Hermitian) matrix.
    pub fn new(space: LabeledSpace, matrix: CMatrix) -> Result<Self> {
        let n = space.total_dimension();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if matrix.nrows() != n { matrix.nrows() } else { matrix.ncols() },
            });
        }
        Ok(Self {
            space,
            matrix,
            hermitian: false,
        })
    }

    /// Wrap a matrix that must be Hermitian within [`HERMITIAN_TOL`].
    pub fn hermitian(space: LabeledSpace, matrix: CMatrix) -> Result<Self> {
        let mut op = Self::new(space, matrix)?;
        check_hermitian(&op.matrix)?;
        op.hermitian = true;
        Ok(op)
    }

    /// Replace `M` by `(M + M†)/2` and wrap it as Hermitian.
    pub fn symmetrized(space: LabeledSpace, matrix: CMatrix) -> Result<Self> {
        let mut op = Self::new(space, matrix)?;
        let correction = hermiticity_deviation(&op.matrix) / 2.0;
        if correction > SYMMETRIZE_LOG_THRESHOLD * max_abs(&op.matrix).max(1.0) {
            log::debug!("symmetrizing operator: correction {correction:.3e}");
        }
        let adj = op.matrix.adjoint();
        op.matrix = (&op.matrix + adj) * c(0.5);
        op.hermitian = true;
        Ok(op)
    }

    pub fn identity(space: LabeledSpace) -> Self {
        let n = space.total_dimension();
        Self {
            space,
            matrix: CMatrix::identity(n, n),
            hermitian: true,
        }
    }

    pub fn zeros(space: LabeledSpace) -> Self {
        let n = space.total_dimension();
        Self {
            space,
            matrix: CMatrix::zeros(n, n),
            hermitian: true,
        }
    }

    pub fn space(&self) -> &LabeledSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Self::new(self.space.clone(), &self.matrix * &other.matrix)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix - &other.matrix,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * c(s),
            hermitian: self.hermitian,
        }
    }

    /// `U† self U`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        self.same_space(u)?;
        let m = u.matrix.adjoint() * &self.matrix * &u.matrix;
        if self.hermitian {
            Self::symmetrized(self.space.clone(), m)
        } else {
            Self::new(self.space.clone(), m)
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// `max |U U† - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        max_abs_diff(&(&self.matrix * self.matrix.adjoint()), &CMatrix::identity(n, n))
    }
}

/// `a ⊗ b` on a two-factor space, with `a` on factor 0 and `b` on factor 1.
pub fn tensor(a: &CMatrix, b: &CMatrix, space: &LabeledSpace) -> Result<HybridOperator> {
    if space.factors().len() != 2 {
        return Err(Error::InvalidInput(format!(
            "tensor expects a two-factor space, got {} factors",
            space.factors().len()
        )));
    }
    let m = space.embed(&[(0, a), (1, b)])?;
    HybridOperator::new(space.clone(), m)
}

/// Ascending eigenvalues and orthonormal eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigensystem {
    /// `S diag(f(λ)) S†`.
    pub fn apply<F: Fn(f64) -> Complex64>(&self, f: F) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn residual(&self, h: &CMatrix) -> f64 {
        let mut worst = 0.0_f64;
        for (j, &lam) in self.values.iter().enumerate() {
            let v = self.vectors.column(j);
            let r = h * v - v * c(lam);
            worst = worst.max(r.norm());
        }
        worst
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; each eigenvector is rotated so that its
/// first significant component is real and positive.
pub fn hermitian_eigen(m: &CMatrix) -> Result<Eigensystem> {
    check_hermitian(m)?;
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (j, &k) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(k);
        let big = col.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        let phase = col
            .iter()
            .find(|z| z.norm() > 1e-8 * big)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(c(1.0));
        for i in 0..n {
            vectors[(i, j)] = col[i] * phase;
        }
    }
    Ok(Eigensystem { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

pub fn eigensystem(h: &HybridOperator) -> Result<Eigensystem> {
    hermitian_eigen(h.matrix())
}

pub fn commutator(a: &HybridOperator, b: &HybridOperator) -> Result<HybridOperator> {
    let ab = a.mul(b)?;
    let ba = b.mul(a)?;
    ab.sub(&ba)
}

pub fn matrix_commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `exp(i * scale * H)` for Hermitian `H`.
pub fn expi_hermitian(h: &HybridOperator, scale: f64) -> Result<HybridOperator> {
    let eig = eigensystem(h)?;
    let u = eig.apply(|lam| (I * scale * lam).exp());
    HybridOperator::new(h.space().clone(), u)
}

/// `f(A)` for Hermitian `A` and a real scalar function `f`.
pub fn spectral_function<F: Fn(f64) -> f64>(a: &HybridOperator, f: F) -> Result<HybridOperator> {
    let m = spectral_matrix(a.matrix(), f)?;
    HybridOperator::hermitian(a.space().clone(), m)
}

pub fn spectral_matrix<F: Fn(f64) -> f64>(a: &CMatrix, f: F) -> Result<CMatrix> {
    let eig = hermitian_eigen(a)?;
    let mut m = eig.apply(|lam| c(f(lam)));
    // the result is Hermitian up to rounding in the reconstruction
    let adj = m.adjoint();
    m = (&m + adj) * c(0.5);
    Ok(m)
}

/// Directional derivative `d/dt exp(i s (H + t E))` at `t = 0`.
///
/// Uses the divided-difference form of the Fréchet derivative in the
/// eigenbasis of `H`; the near-degenerate limit is handled through
/// `(e^{isa} - e^{isb})/(a - b) = i s e^{is(a+b)/2} sinc(s(a-b)/2)`.
pub fn expi_hermitian_derivative(h: &CMatrix, e: &CMatrix, scale: f64) -> Result<CMatrix> {
    let eig = hermitian_eigen(h)?;
    let n = eig.values.len();
    let s = &eig.vectors;
    let mut core = s.adjoint() * e * s;
    for j in 0..n {
        for k in 0..n {
            let (a, b) = (eig.values[j], eig.values[k]);
            let half = 0.5 * scale * (a - b);
            let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
            let dd = I * scale * (I * scale * 0.5 * (a + b)).exp() * sinc;
            core[(j, k)] *= dd;
        }
    }
    Ok(s * core * s.adjoint())
}

/// `exp(i s A ⊗ B)` for Hermitian `A` (small) and `B`, stored factored as
/// `Σ_i P_i ⊗ exp(i s λ_i B)` with `P_i` the spectral projectors of `A`.
#[derive(Debug, Clone)]
pub struct KronExp {
    a_vectors: CMatrix,
    b_exps: Vec<CMatrix>,
}

pub fn expi_kron(a: &CMatrix, b: &CMatrix, scale: f64) -> Result<KronExp> {
    let ea = hermitian_eigen(a)?;
    let eb = hermitian_eigen(b)?;
    let b_exps = ea
        .values
        .iter()
        .map(|&la| eb.apply(|lb| (I * scale * la * lb).exp()))
        .collect();
    Ok(KronExp {
        a_vectors: ea.vectors,
        b_exps,
    })
}

impl KronExp {
    pub fn dim_a(&self) -> usize {
        self.a_vectors.nrows()
    }

    pub fn dim_b(&self) -> usize {
        self.b_exps.first().map_or(0, |m| m.nrows())
    }

    /// The `(alpha, beta)` block acting on the `B` factor.
    pub fn block(&self, alpha: usize, beta: usize) -> CMatrix {
        let nb = self.dim_b();
        let mut out = CMatrix::zeros(nb, nb);
        for (i, ei) in self.b_exps.iter().enumerate() {
            let w = self.a_vectors[(alpha, i)] * self.a_vectors[(beta, i)].conj();
            if w.norm() != 0.0 {
                out += ei * w;
            }
        }
        out
    }

    /// Columns belonging to `A`-indices `0..n_cols` of the full matrix.
    pub fn leading_columns(&self, n_cols: usize) -> CMatrix {
        let (na, nb) = (self.dim_a(), self.dim_b());
        let mut out = CMatrix::zeros(na * nb, n_cols * nb);
        for alpha in 0..na {
            for beta in 0..n_cols {
                out.view_mut((alpha * nb, beta * nb), (nb, nb))
                    .copy_from(&self.block(alpha, beta));
            }
        }
        out
    }

    pub fn to_matrix(&self) -> CMatrix {
        self.leading_columns(self.dim_a())
    }
}

/// `(A ⊗ 1_B) X` for a dense `X` with `dim(A) * nb` rows.
pub fn kron_identity_mul(a: &CMatrix, nb: usize, x: &CMatrix) -> CMatrix {
    let na = a.nrows();
    assert_eq!(x.nrows(), na * nb, "kron_identity_mul: row mismatch");
    let mut out = CMatrix::zeros(x.nrows(), x.ncols());
    for alpha in 0..na {
        for beta in 0..na {
            let w = a[(alpha, beta)];
            if w.norm() == 0.0 {
                continue;
            }
            let src = x.rows(beta * nb, nb) * w;
            let mut dst = out.rows_mut(alpha * nb, nb);
            dst += src;
        }
    }
    out
}
