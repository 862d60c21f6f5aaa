use crate::error::{Error, Result};
use crate::opcore::{Operator, SandwichSum, SuperOperator, C64};
use crate::tolerance::Tolerances;

/// One jump channel `V` with its rate and the bath it belongs to.
///
/// The rate is kept separate from the operator; assembly uses
/// `sqrt(rate) * V`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladTerm {
    jump: Operator,
    rate: f64,
    bath: String,
}

impl LindbladTerm {
    pub fn new(jump: Operator, rate: f64, bath: impl Into<String>) -> Result<Self> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "jump rate must be finite and non-negative, got {rate}"
            )));
        }
        Ok(Self {
            jump,
            rate,
            bath: bath.into(),
        })
    }

    pub fn jump(&self) -> &Operator {
        &self.jump
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn bath(&self) -> &str {
        &self.bath
    }
}

/// Hamiltonian plus dissipative jump terms.
#[derive(Debug, Clone, PartialEq)]
pub struct GklsGenerator {
    hamiltonian: Operator,
    terms: Vec<LindbladTerm>,
}

impl GklsGenerator {
    pub fn new(hamiltonian: Operator, terms: Vec<LindbladTerm>) -> Result<Self> {
        Self::with_tolerances(hamiltonian, terms, &Tolerances::default())
    }

    pub fn with_tolerances(
        hamiltonian: Operator,
        terms: Vec<LindbladTerm>,
        tol: &Tolerances,
    ) -> Result<Self> {
        hamiltonian.ensure_hermitian(tol.hamiltonian_hermiticity)?;
        for term in &terms {
            hamiltonian.ensure_same_dim(&term.jump)?;
        }
        Ok(Self { hamiltonian, terms })
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn terms(&self) -> &[LindbladTerm] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn max_rate(&self) -> f64 {
        self.terms.iter().map(|t| t.rate).fold(0.0, f64::max)
    }

    /// Bath labels in order of first appearance.
    pub fn bath_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = Vec::new();
        for t in &self.terms {
            if !labels.iter().any(|l| l == t.bath()) {
                labels.push(t.bath.clone());
            }
        }
        labels
    }

    /// `rho -> -i[H, rho] + sum_j r_j (V_j rho V_j^dag - {V_j^dag V_j, rho}/2)`.
    pub fn schrodinger_super(&self) -> SuperOperator {
        let mut sum = SandwichSum::new(self.dim());
        let id = self.identity();
        let i = C64::new(0.0, 1.0);
        self.add(&mut sum, -i, &self.hamiltonian, &id);
        self.add(&mut sum, i, &id, &self.hamiltonian);
        for t in &self.terms {
            let vdv = &t.jump.adjoint() * &t.jump;
            self.add(&mut sum, C64::new(t.rate, 0.0), &t.jump, &t.jump.adjoint());
            self.add(&mut sum, C64::new(-0.5 * t.rate, 0.0), &vdv, &id);
            self.add(&mut sum, C64::new(-0.5 * t.rate, 0.0), &id, &vdv);
        }
        sum.build()
    }

    /// `X -> i[H, X] + sum_j r_j (V_j^dag X V_j - {V_j^dag V_j, X}/2)`.
    pub fn heisenberg_super(&self) -> SuperOperator {
        let mut sum = SandwichSum::new(self.dim());
        self.add_heisenberg_hamiltonian(&mut sum);
        self.add_heisenberg_dissipator(&mut sum);
        sum.build()
    }

    /// Hamiltonian part `X -> i[H, X]` of the Heisenberg generator.
    pub fn heisenberg_hamiltonian_super(&self) -> SuperOperator {
        let mut sum = SandwichSum::new(self.dim());
        self.add_heisenberg_hamiltonian(&mut sum);
        sum.build()
    }

    /// Dissipative part of the Heisenberg generator.
    pub fn heisenberg_dissipator_super(&self) -> SuperOperator {
        let mut sum = SandwichSum::new(self.dim());
        self.add_heisenberg_dissipator(&mut sum);
        sum.build()
    }

    fn add_heisenberg_hamiltonian(&self, sum: &mut SandwichSum) {
        let id = self.identity();
        let i = C64::new(0.0, 1.0);
        self.add(sum, i, &self.hamiltonian, &id);
        self.add(sum, -i, &id, &self.hamiltonian);
    }

    fn add_heisenberg_dissipator(&self, sum: &mut SandwichSum) {
        let id = self.identity();
        for t in &self.terms {
            let vdv = &t.jump.adjoint() * &t.jump;
            self.add(sum, C64::new(t.rate, 0.0), &t.jump.adjoint(), &t.jump);
            self.add(sum, C64::new(-0.5 * t.rate, 0.0), &vdv, &id);
            self.add(sum, C64::new(-0.5 * t.rate, 0.0), &id, &vdv);
        }
    }

    fn identity(&self) -> Operator {
        Operator::identity(self.dim()).expect("dimension is positive")
    }

    fn add(&self, sum: &mut SandwichSum, c: C64, left: &Operator, right: &Operator) {
        sum.add(c, left, right)
            .expect("operator dimensions checked at construction");
    }

    /// `L(rho)` evaluated with dense operator products.
    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        self.hamiltonian.ensure_same_dim(rho)?;
        let mut out = self.hamiltonian.commutator(rho).scale(C64::new(0.0, -1.0));
        out = out + self.apply_dissipator(rho, None)?;
        Ok(out)
    }

    /// Dissipative part of `L(rho)`, restricted to `terms` if given.
    pub fn apply_dissipator(&self, rho: &Operator, terms: Option<&[usize]>) -> Result<Operator> {
        self.hamiltonian.ensure_same_dim(rho)?;
        let mut out = Operator::zeros(self.dim())?;
        let all: Vec<usize>;
        let indices = match terms {
            Some(idx) => idx,
            None => {
                all = (0..self.terms.len()).collect();
                &all
            }
        };
        for &k in indices {
            let t = self.terms.get(k).ok_or(Error::IncompleteAssignment { term: k })?;
            if t.rate == 0.0 {
                continue;
            }
            let v = &t.jump;
            let vd = v.adjoint();
            let vdv = &vd * v;
            let jump = &(v * rho) * &vd;
            let anti = vdv.anticommutator(rho) * 0.5;
            out = out + (jump - anti) * t.rate;
        }
        Ok(out)
    }

    /// `L*(X)` evaluated with dense operator products.
    pub fn apply_heisenberg(&self, x: &Operator) -> Result<Operator> {
        self.hamiltonian.ensure_same_dim(x)?;
        let mut out = self.hamiltonian.commutator(x).scale(C64::new(0.0, 1.0));
        for t in &self.terms {
            if t.rate == 0.0 {
                continue;
            }
            let v = &t.jump;
            let vd = v.adjoint();
            let vdv = &vd * v;
            let jump = &(&vd * x) * v;
            out = out + (jump - vdv.anticommutator(x) * 0.5) * t.rate;
        }
        Ok(out)
    }
}

/// Davies pair for a lowering eigenoperator `A` of `h0` with Bohr frequency
/// `omega` (`[h0, A] = -omega A`): `(A, rate)` and
/// `(A^dag, rate * exp(-beta * omega))`.
pub fn thermal_pair(
    h0: &Operator,
    lowering: &Operator,
    base_rate: f64,
    bohr_frequency: f64,
    beta: f64,
    bath: &str,
) -> Result<[LindbladTerm; 2]> {
    h0.ensure_same_dim(lowering)?;
    if !beta.is_finite() || !bohr_frequency.is_finite() {
        return Err(Error::InvalidParameter(
            "inverse temperature and Bohr frequency must be finite".into(),
        ));
    }
    let residual = eigenoperator_residual(h0, lowering, bohr_frequency);
    let scale = (1.0 + h0.norm()) * lowering.norm().max(1.0);
    if residual > 1e-10 * scale {
        return Err(Error::NotAnEigenoperator { residual });
    }
    Ok([
        LindbladTerm::new(lowering.clone(), base_rate, bath)?,
        LindbladTerm::new(
            lowering.adjoint(),
            base_rate * (-beta * bohr_frequency).exp(),
            bath,
        )?,
    ])
}

/// `|| [h0, A] + omega A ||_F`.
pub fn eigenoperator_residual(h0: &Operator, a: &Operator, omega: f64) -> f64 {
    (h0.commutator(a) + a * omega).norm()
}
