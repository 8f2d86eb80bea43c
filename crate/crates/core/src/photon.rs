//! Single-mode cavity operators in a truncated Fock basis (atomic units, ħ = 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, HybridOperator, LabeledSpace, I};

/// Truncated single-mode Fock space together with the mode parameters.
///
/// `a0` is the field amplitude `|A₀|` that multiplies `(a + a†)`; the
/// quantization volume and polarization are folded into it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonSpace {
    pub n_fock: usize,
    pub omega_c: f64,
    pub a0: f64,
}

impl PhotonSpace {
    pub fn new(n_fock: usize, omega_c: f64, a0: f64) -> Result<Self> {
        if n_fock < 2 {
            return Err(Error::InvalidInput(format!("n_fock must be at least 2, got {n_fock}")));
        }
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(Error::InvalidInput(format!("omega_c must be positive, got {omega_c}")));
        }
        if !(a0 >= 0.0 && a0.is_finite()) {
            return Err(Error::InvalidInput(format!("A0 must be non-negative, got {a0}")));
        }
        Ok(Self { n_fock, omega_c, a0 })
    }

    pub fn with_a0(&self, a0: f64) -> Result<Self> {
        Self::new(self.n_fock, self.omega_c, a0)
    }

    pub fn with_n_fock(&self, n_fock: usize) -> Result<Self> {
        Self::new(n_fock, self.omega_c, self.a0)
    }

    pub fn space(&self) -> LabeledSpace {
        LabeledSpace::single("ph", self.n_fock)
    }

    pub fn annihilation(&self) -> CMatrix {
        annihilation(self.n_fock).expect("validated n_fock")
    }

    pub fn creation(&self) -> CMatrix {
        self.annihilation().adjoint()
    }

    pub fn number(&self) -> CMatrix {
        number(self.n_fock)
    }

    /// `q_c = sqrt(1/2ω)(a† + a)`.
    pub fn coordinate(&self) -> CMatrix {
        let a = self.annihilation();
        (a.adjoint() + a) * c((0.5 / self.omega_c).sqrt())
    }

    /// `p_c = i sqrt(ω/2)(a† − a)`.
    pub fn momentum(&self) -> CMatrix {
        let a = self.annihilation();
        (a.adjoint() - a) * (I * (0.5 * self.omega_c).sqrt())
    }

    /// `i(a† − a)`, the operator multiplying `ω A₀ μ` in the dipole gauge.
    pub fn quadrature_p(&self) -> CMatrix {
        let a = self.annihilation();
        (a.adjoint() - a) * I
    }

    /// `ω(n + ½)`, diagonal in the Fock basis.
    pub fn hamiltonian_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_fn(self.n_fock, |n, _| {
            c(self.omega_c * (n as f64 + 0.5))
        }))
    }

    /// `Â = A₀(a + a†)`.
    pub fn vector_potential_matrix(&self) -> CMatrix {
        let a = self.annihilation();
        (a.adjoint() + a) * c(self.a0)
    }
}

pub fn annihilation(n_fock: usize) -> Result<CMatrix> {
    if n_fock < 2 {
        return Err(Error::InvalidInput(format!("n_fock must be at least 2, got {n_fock}")));
    }
    let mut a = CMatrix::zeros(n_fock, n_fock);
    for n in 1..n_fock {
        a[(n - 1, n)] = c((n as f64).sqrt());
    }
    Ok(a)
}

pub fn creation(n_fock: usize) -> Result<CMatrix> {
    Ok(annihilation(n_fock)?.adjoint())
}

pub fn number(n_fock: usize) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_fn(n_fock, |n, _| c(n as f64)))
}

pub fn photon_hamiltonian(space: &PhotonSpace) -> HybridOperator {
    HybridOperator::hermitian(space.space(), space.hamiltonian_matrix())
        .expect("diagonal real matrix is Hermitian")
}

pub fn vector_potential(space: &PhotonSpace) -> HybridOperator {
    HybridOperator::hermitian(space.space(), space.vector_potential_matrix())
        .expect("a + a† is Hermitian")
}
