use std::fmt;
use std::sync::Arc;

use super::generator::{GklsGenerator, LindbladTerm};
use crate::error::{Error, Result};
use crate::opcore::Operator;
use crate::tolerance::Tolerances;

/// Dissipative terms of the generator at a given drive value `xi`.
pub type DissipatorMap = dyn Fn(f64) -> Result<Vec<LindbladTerm>> + Send + Sync;

/// Generators `L[xi]` with Hamiltonian `H0 + xi M`, driven along
/// `xi(t) = g sin(Omega t)`.
#[derive(Clone)]
pub struct GeneratorFamily {
    h0: Operator,
    drive: Operator,
    amplitude: f64,
    frequency: f64,
    dissipator: Arc<DissipatorMap>,
}

impl fmt::Debug for GeneratorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorFamily")
            .field("dim", &self.h0.dim())
            .field("amplitude", &self.amplitude)
            .field("frequency", &self.frequency)
            .finish_non_exhaustive()
    }
}

impl GeneratorFamily {
    pub fn new(
        h0: Operator,
        drive: Operator,
        amplitude: f64,
        frequency: f64,
        dissipator: Arc<DissipatorMap>,
    ) -> Result<Self> {
        let tol = Tolerances::default();
        h0.ensure_hermitian(tol.hamiltonian_hermiticity)?;
        drive.ensure_hermitian(tol.hamiltonian_hermiticity)?;
        h0.ensure_same_dim(&drive)?;
        if !amplitude.is_finite() {
            return Err(Error::InvalidParameter("drive amplitude must be finite".into()));
        }
        if !(frequency > 0.0) || !frequency.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "drive frequency must be positive, got {frequency}"
            )));
        }
        let family = Self {
            h0,
            drive,
            amplitude,
            frequency,
            dissipator,
        };
        let residual = family.commutator_residual();
        if residual > 1e-10 {
            log::warn!(
                "drive observable does not commute with H0 (|[H0, M]| = {residual:.3e}); \
                 power formulas assume it does"
            );
        }
        Ok(family)
    }

    /// Family whose dissipative terms do not depend on `xi`.
    pub fn with_static_terms(
        h0: Operator,
        drive: Operator,
        amplitude: f64,
        frequency: f64,
        terms: Vec<LindbladTerm>,
    ) -> Result<Self> {
        Self::new(h0, drive, amplitude, frequency, Arc::new(move |_| Ok(terms.clone())))
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        Self {
            amplitude,
            ..self.clone()
        }
    }

    pub fn with_frequency(&self, frequency: f64) -> Result<Self> {
        if !(frequency > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "drive frequency must be positive, got {frequency}"
            )));
        }
        Ok(Self {
            frequency,
            ..self.clone()
        })
    }

    pub fn h0(&self) -> &Operator {
        &self.h0
    }

    pub fn drive(&self) -> &Operator {
        &self.drive
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    /// Frobenius norm of `[H0, M]`.
    pub fn commutator_residual(&self) -> f64 {
        self.h0.commutator(&self.drive).norm()
    }

    pub fn hamiltonian(&self, xi: f64) -> Operator {
        &self.h0 + &(&self.drive * xi)
    }

    pub fn generator(&self, xi: f64) -> Result<GklsGenerator> {
        GklsGenerator::new(self.hamiltonian(xi), (self.dissipator)(xi)?)
    }

    /// `xi(t) = g sin(Omega t)`.
    pub fn xi(&self, t: f64) -> f64 {
        self.amplitude * (self.frequency * t).sin()
    }

    /// `d xi / dt`.
    pub fn xi_rate(&self, t: f64) -> f64 {
        self.amplitude * self.frequency * (self.frequency * t).cos()
    }
}
