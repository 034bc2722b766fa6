//! Lax families, their invariants and the hierarchy flows.
//!
//! Every family satisfies `L̇ = s·[A, L]` with `s = commutator_side()`.
//! Native states:
//! - `A1Toy(n)`: `(p̃, q̃)` with `L = [[p̃, q̃], [q̃, -p̃]]`, `A = ½[[0, -q̃ⁿ], [q̃ⁿ, 0]]`;
//!   `A1` is `A1Toy(1)`.
//! - `A2`, `A2Hierarchy(m)`: `(p_ξ, p_η, ξ, η)` with `c₀ = e^{ξ/2}`, `c₁ = e^{η/2}`,
//!   `v = (-p_ξ, p_ξ - p_η, p_η)`.
//! - `GL(n)`: the `n²` entries of `L`, row-major.

use thiserror::Error;

use crate::linalg::{LinalgError, Matrix};
use crate::phase::{systems, HamiltonianSystem, PhaseError};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LaxError {
    #[error("state has {got} coordinates, family needs {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("state outside domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaxFamily {
    A1,
    A1Toy(i32),
    A2,
    A2Hierarchy(u32),
    GL(usize),
}

impl LaxFamily {
    pub fn label(&self) -> String {
        match self {
            LaxFamily::A1 => "a1".into(),
            LaxFamily::A1Toy(n) => format!("a1toy(n={n})"),
            LaxFamily::A2 => "a2".into(),
            LaxFamily::A2Hierarchy(m) => format!("a2hierarchy(m={m})"),
            LaxFamily::GL(n) => format!("gl({n})"),
        }
    }
}

/// Ratio between `Π₊L − Π₋L` and `A₀` on tridiagonal A₂-shaped matrices.
pub const A2_PROJECTION_NORMALIZATION: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct LaxSystem<T> {
    family: LaxFamily,
    side: i32,
    hamiltonian: HamiltonianSystem<T>,
}

impl<T: Real> LaxSystem<T> {
    pub fn new(family: LaxFamily) -> Self {
        let hamiltonian = match family {
            LaxFamily::A1 => systems::a1_toy_b(1),
            LaxFamily::A1Toy(n) => systems::a1_toy_b(n),
            LaxFamily::A2 => systems::a2_cm(),
            LaxFamily::A2Hierarchy(m) => {
                assert!(m >= 1, "hierarchy index starts at 1");
                systems::a2_hierarchy(m)
            }
            LaxFamily::GL(n) => {
                assert!(n >= 2, "gl(n) needs n >= 2");
                systems::gl(n)
            }
        };
        // The printed A₁ equation `L̇ = [L, M]` runs the Hamiltonian flow backwards;
        // with `A = M` every family uses `L̇ = +[A, L]`.
        LaxSystem { family, side: 1, hamiltonian }
    }

    pub fn family(&self) -> LaxFamily {
        self.family
    }

    pub fn commutator_side(&self) -> i32 {
        self.side
    }

    /// Hamiltonian system whose flow in native coordinates the Lax equation encodes.
    pub fn hamiltonian(&self) -> &HamiltonianSystem<T> {
        &self.hamiltonian
    }

    pub fn state_dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn state_names(&self) -> &[String] {
        self.hamiltonian.coordinate_names()
    }

    pub fn matrix_size(&self) -> usize {
        match self.family {
            LaxFamily::A1 | LaxFamily::A1Toy(_) => 2,
            LaxFamily::A2 | LaxFamily::A2Hierarchy(_) => 3,
            LaxFamily::GL(n) => n,
        }
    }

    /// Tridiagonal families give symmetric `L`.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self.family, LaxFamily::GL(_))
    }

    fn toy_n(&self) -> i32 {
        match self.family {
            LaxFamily::A1 => 1,
            LaxFamily::A1Toy(n) => n,
            _ => unreachable!("not an A1 family"),
        }
    }

    fn check(&self, z: &[T]) -> Result<(), LaxError> {
        if z.len() != self.state_dim() {
            return Err(LaxError::Dimension { expected: self.state_dim(), got: z.len() });
        }
        if z.iter().any(|x| !x.is_finite()) {
            return Err(LaxError::Domain("non-finite state".into()));
        }
        if let LaxFamily::A1 | LaxFamily::A1Toy(_) = self.family {
            if self.toy_n() < 0 && z[1] == T::zero() {
                return Err(LaxError::Domain("q̃ = 0 with negative n".into()));
            }
        }
        Ok(())
    }

    pub fn build_l(&self, z: &[T]) -> Result<Matrix<T>, LaxError> {
        self.check(z)?;
        Ok(match self.family {
            LaxFamily::A1 | LaxFamily::A1Toy(_) => Matrix::from_row_major(2, 2, vec![z[0], z[1], z[1], -z[0]])?,
            LaxFamily::A2 | LaxFamily::A2Hierarchy(_) => a2_lax(z),
            LaxFamily::GL(n) => Matrix::from_row_major(n, n, z.to_vec())?,
        })
    }

    pub fn build_a(&self, z: &[T]) -> Result<Matrix<T>, LaxError> {
        self.check(z)?;
        Ok(match self.family {
            LaxFamily::A1 | LaxFamily::A1Toy(_) => {
                let h = T::lit(0.5) * z[1].powi(self.toy_n());
                Matrix::from_row_major(2, 2, vec![T::zero(), -h, h, T::zero()])?
            }
            LaxFamily::A2 => a2_auxiliary(z),
            LaxFamily::A2Hierarchy(m) => a2_auxiliary(z).pow(2 * m - 1),
            LaxFamily::GL(_) => triangular_split(&self.build_l(z)?),
        })
    }

    /// `s·[A(z), L(z)]`.
    pub fn lax_rhs(&self, z: &[T]) -> Result<Matrix<T>, LaxError> {
        let a = self.build_a(z)?;
        let l = self.build_l(z)?;
        Ok(a.commutator(&l).scale(&T::lit(self.side as f64)))
    }

    /// `tr L(z)ᵏ`.
    pub fn invariant(&self, z: &[T], k: u32) -> Result<T, LaxError> {
        Ok(self.build_l(z)?.pow(k).trace())
    }

    /// Time derivative of the native state (the Hamiltonian vector field).
    pub fn state_rhs(&self, z: &[T]) -> Result<Vec<T>, LaxError> {
        self.check(z)?;
        Ok(self.hamiltonian.vector_field(z)?)
    }

    /// Eigenvalues of `L(z)` as `(re, im)` pairs sorted by real then imaginary part.
    pub fn eigenvalues(&self, z: &[T]) -> Result<Vec<(T, T)>, LaxError> {
        let l = self.build_l(z)?;
        if self.is_symmetric() {
            Ok(l.symmetric_eigenvalues()?.into_iter().map(|x| (x, T::zero())).collect())
        } else {
            Ok(l.eigenvalues()?.into_iter().map(|c| (c.re, c.im)).collect())
        }
    }
}

fn a2_lax<T: Real>(z: &[T]) -> Matrix<T> {
    let half = T::lit(0.5);
    let (c0, c1) = ((half * z[2]).exp(), (half * z[3]).exp());
    let (v0, v1, v2) = (-z[0], z[0] - z[1], z[1]);
    let o = T::zero();
    Matrix::from_row_major(3, 3, vec![v0, c0, o, c0, v1, c1, o, c1, v2]).expect("3x3")
}

fn a2_auxiliary<T: Real>(z: &[T]) -> Matrix<T> {
    let half = T::lit(0.5);
    let (c0, c1) = (half * (half * z[2]).exp(), half * (half * z[3]).exp());
    let o = T::zero();
    Matrix::from_row_major(3, 3, vec![o, c0, o, -c0, o, c1, o, -c1, o]).expect("3x3")
}

/// `Π₊M − Π₋M` with strictly triangular projections.
pub fn triangular_split<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    &m.strictly_upper() - &m.strictly_lower()
}

/// `[Π₊(Lᵐ) − Π₋(Lᵐ), L]`.
pub fn projection_flow_rhs<T: Real>(l: &Matrix<T>, m: u32) -> Matrix<T> {
    assert!(l.is_square(), "projection flow of a non-square matrix");
    triangular_split(&l.pow(m)).commutator(l)
}

/// The five printed hierarchy right sides `(v̇₀, v̇₁, v̇₂, ċ₀, ċ₁)` at `(v₀, v₁, v₂, c₀, c₁)`.
pub fn hierarchy_printed_rhs<T: Real>(m: u32, v: [T; 3], c: [T; 2]) -> [T; 5] {
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    let s = (c[0] * c[0] + c[1] * c[1]).powi(m as i32 - 1);
    let k = T::lit(0.25f64.powi(m as i32 - 1));
    let k2 = k * T::lit(0.5);
    [
        -sign * k * c[0] * c[0] * s,
        sign * k * (c[0] * c[0] - c[1] * c[1]) * s,
        sign * k * c[1] * c[1] * s,
        sign * k2 * (v[0] - v[1]) * c[0] * s,
        sign * k2 * (v[1] - v[2]) * c[1] * s,
    ]
}

/// The four printed `(ṗ_ξ, ṗ_η, ξ̇, η̇)` hierarchy equations.
pub fn hierarchy_printed_state_rhs<T: Real>(m: u32, z: &[T]) -> [T; 4] {
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    let (ex, ey) = (z[2].exp(), z[3].exp());
    let k = T::lit(0.25f64.powi(m as i32 - 1)) * (ex + ey).powi(m as i32 - 1);
    let two = T::lit(2.0);
    [sign * k * ex, sign * k * ey, -sign * k * (two * z[0] - z[1]), -sign * k * (two * z[1] - z[0])]
}

/// `L` of the three-particle chain at `(p₁, p₂, p₃, x₁, x₂, x₃)`: `v_i = -p_i`.
pub fn a2_particle_lax<T: Real>(z: &[T]) -> Matrix<T> {
    let half = T::lit(0.5);
    let (c0, c1) = ((half * (z[3] - z[4])).exp(), (half * (z[4] - z[5])).exp());
    let o = T::zero();
    Matrix::from_row_major(3, 3, vec![-z[0], c0, o, c0, -z[1], c1, o, c1, -z[2]]).expect("3x3")
}

/// Printed particle-chart form of `I`, quadratic in the momenta.
pub fn a2_invariant_printed_particles<T: Real>(z: &[T]) -> T {
    let three = T::lit(3.0);
    -(z[0] * z[0] + z[1] * z[1] + z[2] * z[2])
        - three * (z[3] - z[4]).exp() * (z[0] + z[1])
        - three * (z[4] - z[5]).exp() * (z[1] + z[2])
}

/// Particle-chart `tr L³` as fixed by the matrix-trace oracle: cubic in the momenta.
pub fn a2_invariant_particles<T: Real>(z: &[T]) -> T {
    let three = T::lit(3.0);
    -(z[0].powi(3) + z[1].powi(3) + z[2].powi(3))
        - three * (z[3] - z[4]).exp() * (z[0] + z[1])
        - three * (z[4] - z[5]).exp() * (z[1] + z[2])
}

/// Printed centre-of-mass form `3[p_η²p_ξ − p_ηp_ξ² − e^ξp_η + e^ηp_ξ]`.
pub fn a2_invariant_printed_xi<T: Real>(z: &[T]) -> T {
    let (px, py) = (z[0], z[1]);
    T::lit(3.0) * (py * py * px - py * px * px - z[2].exp() * py + z[3].exp() * px)
}

/// Printed gl(2) relation `tr L³ = −(tr L)³ + 3 tr L² tr L`.
pub fn gl2_trace_identity_printed<T: Real>(l: &Matrix<T>) -> T {
    let (t1, t2) = (l.trace(), l.pow(2).trace());
    -t1 * t1 * t1 + T::lit(3.0) * t2 * t1
}

/// Cayley–Hamilton form `tr L³ = (3/2) tr L tr L² − ½(tr L)³` for 2×2 matrices.
pub fn gl2_trace_identity<T: Real>(l: &Matrix<T>) -> T {
    let (t1, t2) = (l.trace(), l.pow(2).trace());
    T::lit(1.5) * t1 * t2 - T::lit(0.5) * t1 * t1 * t1
}
