//! Phase spaces, Poisson structures, Hamiltonians and chart maps.
//!
//! Coordinates are ordered momenta first, e.g. `(p, q)` or `(p_ξ, p_η, ξ, η)`.
//! Brackets follow `{p, q} = +1` and flows are `ż = {H, z}`, i.e.
//! `ż_k = Σ_i ∂_i H · Π_ik(z)`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::exact::{rat, Rational};
use crate::liepoisson::LieStructure;
use crate::linalg::{LinalgError, Matrix};
use crate::poly::Poly;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("point outside domain: {0}")]
    Domain(String),
    #[error("non-finite value")]
    NonFinite,
    #[error("singular structure or jacobian: {0}")]
    Singular(String),
    #[error("unknown system {0}")]
    UnknownSystem(String),
}

impl From<LinalgError> for PhaseError {
    fn from(e: LinalgError) -> Self {
        PhaseError::Singular(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint<T> {
    chart: String,
    coords: Vec<T>,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(chart: &str, coords: Vec<T>) -> Result<Self, PhaseError> {
        if coords.is_empty() {
            return Err(PhaseError::Dimension { expected: 1, got: 0 });
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(PhaseError::NonFinite);
        }
        Ok(PhasePoint { chart: chart.into(), coords })
    }

    pub fn chart(&self) -> &str {
        &self.chart
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

pub type ScalarFn<T> = Arc<dyn Fn(&[T]) -> Result<T, PhaseError> + Send + Sync>;
pub type VectorFn<T> = Arc<dyn Fn(&[T]) -> Result<Vec<T>, PhaseError> + Send + Sync>;
pub type MatrixFn<T> = Arc<dyn Fn(&[T]) -> Result<Matrix<T>, PhaseError> + Send + Sync>;

/// Central-difference gradient with step `1e-6·max(1, |z_i|)`.
pub fn gradient_fd<T: Real>(f: &dyn Fn(&[T]) -> Result<T, PhaseError>, z: &[T]) -> Result<Vec<T>, PhaseError> {
    let mut g = Vec::with_capacity(z.len());
    let mut w = z.to_vec();
    for i in 0..z.len() {
        let h = T::lit(1e-6) * T::one().max(z[i].abs());
        w[i] = z[i] + h;
        let fp = f(&w)?;
        w[i] = z[i] - h;
        let fm = f(&w)?;
        w[i] = z[i];
        g.push((fp - fm) / (h + h));
    }
    Ok(g)
}

/// Point-dependent antisymmetric bivector `Π(z)`.
#[derive(Clone)]
pub struct PoissonStructure<T> {
    name: String,
    dim: usize,
    canonical: bool,
    matrix: MatrixFn<T>,
}

impl<T> fmt::Debug for PoissonStructure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PoissonStructure({}, dim {})", self.name, self.dim)
    }
}

impl<T: Real> PoissonStructure<T> {
    /// `{p_i, x_i} = 1` on `(p_1..p_k, x_1..x_k)`.
    pub fn canonical(dof: usize) -> Self {
        let dim = 2 * dof;
        PoissonStructure {
            name: "canonical".into(),
            dim,
            canonical: true,
            matrix: Arc::new(move |_z: &[T]| {
                let mut m = Matrix::zeros(dim, dim);
                for i in 0..dof {
                    m[(i, dof + i)] = T::one();
                    m[(dof + i, i)] = -T::one();
                }
                Ok(m)
            }),
        }
    }

    /// `{p_i, x_i} = f_i(z)` on `(p_1..p_k, x_1..x_k)`.
    pub fn pairwise(
        name: &str,
        dof: usize,
        f: impl Fn(&[T]) -> Result<Vec<T>, PhaseError> + Send + Sync + 'static,
    ) -> Self {
        let dim = 2 * dof;
        PoissonStructure {
            name: name.into(),
            dim,
            canonical: false,
            matrix: Arc::new(move |z: &[T]| {
                let f = f(z)?;
                let mut m = Matrix::zeros(dim, dim);
                for i in 0..dof {
                    m[(i, dof + i)] = f[i];
                    m[(dof + i, i)] = -f[i];
                }
                Ok(m)
            }),
        }
    }

    /// Inverse bivector `Π = -ω⁻¹` of a nondegenerate 2-form with coefficient matrix `ω(z)`.
    pub fn from_two_form(
        name: &str,
        dim: usize,
        omega: impl Fn(&[T]) -> Result<Matrix<T>, PhaseError> + Send + Sync + 'static,
    ) -> Self {
        PoissonStructure {
            name: name.into(),
            dim,
            canonical: false,
            matrix: Arc::new(move |z: &[T]| {
                let w = omega(z)?;
                let inv = w.inverse().map_err(|_| PhaseError::Singular(format!("2-form degenerate at {z:?}")))?;
                Ok(inv.scale(&-T::one()))
            }),
        }
    }

    /// Linear structure `Π_ab(z) = Σ_r c_ab^r z_r` from Lie structure constants.
    pub fn lie_poisson(s: &LieStructure) -> Self {
        let dim = s.dim();
        let table: Vec<(usize, usize, Vec<(usize, T)>)> = s
            .nonzero_brackets()
            .map(|(a, b, terms)| (a, b, terms.iter().map(|(r, c)| (*r, T::lit(crate::exact::to_f64(c)))).collect()))
            .collect();
        PoissonStructure {
            name: format!("lie_poisson_{}", s.name()),
            dim,
            canonical: false,
            matrix: Arc::new(move |z: &[T]| {
                let mut m = Matrix::zeros(dim, dim);
                for (a, b, terms) in &table {
                    m[(*a, *b)] = terms.iter().map(|(r, c)| *c * z[*r]).sum();
                }
                Ok(m)
            }),
        }
    }

    pub fn from_fn(
        name: &str,
        dim: usize,
        f: impl Fn(&[T]) -> Result<Matrix<T>, PhaseError> + Send + Sync + 'static,
    ) -> Self {
        PoissonStructure { name: name.into(), dim, canonical: false, matrix: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn matrix(&self, z: &[T]) -> Result<Matrix<T>, PhaseError> {
        check_dim(self.dim, z.len())?;
        let m = (self.matrix)(z)?;
        if !m.is_finite() {
            return Err(PhaseError::NonFinite);
        }
        Ok(m)
    }

    /// `{f, g}(z) = ∇f·Π·∇g` from the supplied gradients.
    pub fn bracket_from_gradients(&self, df: &[T], dg: &[T], z: &[T]) -> Result<T, PhaseError> {
        let m = self.matrix(z)?;
        let mut acc = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += df[i] * m[(i, j)] * dg[j];
            }
        }
        Ok(acc)
    }
}

fn check_dim(expected: usize, got: usize) -> Result<(), PhaseError> {
    if expected == got {
        Ok(())
    } else {
        Err(PhaseError::Dimension { expected, got })
    }
}

/// Numeric bracket of two scalar functions via central differences.
pub fn poisson_bracket<T: Real>(
    f: &dyn Fn(&[T]) -> Result<T, PhaseError>,
    g: &dyn Fn(&[T]) -> Result<T, PhaseError>,
    s: &PoissonStructure<T>,
    z: &PhasePoint<T>,
) -> Result<T, PhaseError> {
    check_dim(s.dim, z.dim())?;
    let df = gradient_fd(f, z.coords())?;
    let dg = gradient_fd(g, z.coords())?;
    s.bracket_from_gradients(&df, &dg, z.coords())
}

#[derive(Clone)]
pub struct HamiltonianSystem<T> {
    name: String,
    chart: String,
    names: Vec<String>,
    energy: ScalarFn<T>,
    gradient: Option<VectorFn<T>>,
    structure: PoissonStructure<T>,
}

impl<T> fmt::Debug for HamiltonianSystem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HamiltonianSystem({}, {:?})", self.name, self.names)
    }
}

impl<T: Real> HamiltonianSystem<T> {
    pub fn new(
        name: &str,
        chart: &str,
        names: &[&str],
        energy: impl Fn(&[T]) -> Result<T, PhaseError> + Send + Sync + 'static,
        structure: PoissonStructure<T>,
    ) -> Self {
        assert_eq!(names.len(), structure.dim(), "coordinate names vs structure dimension");
        HamiltonianSystem {
            name: name.into(),
            chart: chart.into(),
            names: names.iter().map(|s| s.to_string()).collect(),
            energy: Arc::new(energy),
            gradient: None,
            structure,
        }
    }

    pub fn with_gradient(mut self, g: impl Fn(&[T]) -> Result<Vec<T>, PhaseError> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &str {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn coordinate_names(&self) -> &[String] {
        &self.names
    }

    pub fn structure(&self) -> &PoissonStructure<T> {
        &self.structure
    }

    pub fn energy(&self, z: &[T]) -> Result<T, PhaseError> {
        check_dim(self.dim(), z.len())?;
        let e = (self.energy)(z)?;
        if e.is_finite() {
            Ok(e)
        } else {
            Err(PhaseError::NonFinite)
        }
    }

    pub fn gradient(&self, z: &[T]) -> Result<Vec<T>, PhaseError> {
        check_dim(self.dim(), z.len())?;
        match &self.gradient {
            Some(g) => g(z),
            None => gradient_fd(&|w: &[T]| (self.energy)(w), z),
        }
    }

    /// `ż_k = Σ_i ∂_i H · Π_ik`.
    pub fn vector_field(&self, z: &[T]) -> Result<Vec<T>, PhaseError> {
        let g = self.gradient(z)?;
        let m = self.structure.matrix(z)?;
        let n = self.dim();
        Ok((0..n).map(|k| (0..n).map(|i| g[i] * m[(i, k)]).sum()).collect())
    }
}

pub fn eval_hamiltonian<T: Real>(sys: &HamiltonianSystem<T>, z: &PhasePoint<T>) -> Result<T, PhaseError> {
    sys.energy(z.coords())
}

pub fn hamiltonian_vector_field<T: Real>(sys: &HamiltonianSystem<T>, z: &PhasePoint<T>) -> Result<Vec<T>, PhaseError> {
    sys.vector_field(z.coords())
}

/// Coordinate change between two charts.
#[derive(Clone)]
pub struct ChartMap<T> {
    name: String,
    source_dim: usize,
    target_dim: usize,
    forward: VectorFn<T>,
    inverse: VectorFn<T>,
    jacobian: Option<MatrixFn<T>>,
}

impl<T> fmt::Debug for ChartMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChartMap({}, {} -> {})", self.name, self.source_dim, self.target_dim)
    }
}

impl<T: Real> ChartMap<T> {
    pub fn new(
        name: &str,
        source_dim: usize,
        target_dim: usize,
        forward: impl Fn(&[T]) -> Result<Vec<T>, PhaseError> + Send + Sync + 'static,
        inverse: impl Fn(&[T]) -> Result<Vec<T>, PhaseError> + Send + Sync + 'static,
    ) -> Self {
        ChartMap {
            name: name.into(),
            source_dim,
            target_dim,
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            jacobian: None,
        }
    }

    pub fn with_jacobian(mut self, j: impl Fn(&[T]) -> Result<Matrix<T>, PhaseError> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }

    pub fn identity(dim: usize) -> Self {
        ChartMap::new("identity", dim, dim, |z: &[T]| Ok(z.to_vec()), |z: &[T]| Ok(z.to_vec()))
            .with_jacobian(move |_| Ok(Matrix::identity(dim)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn forward(&self, z: &[T]) -> Result<Vec<T>, PhaseError> {
        check_dim(self.source_dim, z.len())?;
        finite((self.forward)(z)?)
    }

    pub fn inverse(&self, w: &[T]) -> Result<Vec<T>, PhaseError> {
        check_dim(self.target_dim, w.len())?;
        finite((self.inverse)(w)?)
    }

    /// `∂(forward)_a/∂z_b`, analytic when supplied.
    pub fn jacobian(&self, z: &[T]) -> Result<Matrix<T>, PhaseError> {
        match &self.jacobian {
            Some(j) => {
                check_dim(self.source_dim, z.len())?;
                j(z)
            }
            None => self.jacobian_fd(z),
        }
    }

    pub fn jacobian_fd(&self, z: &[T]) -> Result<Matrix<T>, PhaseError> {
        check_dim(self.source_dim, z.len())?;
        let mut j = Matrix::zeros(self.target_dim, self.source_dim);
        let mut w = z.to_vec();
        for b in 0..self.source_dim {
            let h = T::lit(1e-6) * T::one().max(z[b].abs());
            w[b] = z[b] + h;
            let fp = self.forward(&w)?;
            w[b] = z[b] - h;
            let fm = self.forward(&w)?;
            w[b] = z[b];
            for a in 0..self.target_dim {
                j[(a, b)] = (fp[a] - fm[a]) / (h + h);
            }
        }
        Ok(j)
    }
}

fn finite<T: Real>(v: Vec<T>) -> Result<Vec<T>, PhaseError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(PhaseError::NonFinite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// Intertwines two copies of the canonical structure (or one structure with itself).
    Canonical,
    /// Intertwines two different structures.
    Poisson,
    Neither,
}

#[derive(Debug, Clone)]
pub struct CanonicalReport<T> {
    pub max_deviation: T,
    pub kind: MapKind,
    pub samples: usize,
}

pub const CANONICAL_TOLERANCE: f64 = 1e-9;

/// Compares `J Π_src Jᵀ` with `Π_tgt∘φ` at each sample.
pub fn check_canonical<T: Real>(
    map: &ChartMap<T>,
    source: &PoissonStructure<T>,
    target: &PoissonStructure<T>,
    samples: &[PhasePoint<T>],
) -> Result<CanonicalReport<T>, PhaseError> {
    check_dim(map.source_dim, source.dim())?;
    check_dim(map.target_dim, target.dim())?;
    let mut dev = T::zero();
    for z in samples {
        let j = map.jacobian(z.coords())?;
        if !j.is_finite() {
            return Err(PhaseError::Singular(format!("jacobian at {:?}", z.coords())));
        }
        let pushed = &(&j * &source.matrix(z.coords())?) * &j.transpose();
        let w = map.forward(z.coords())?;
        let pt = target.matrix(&w)?;
        let scale = T::one().max(pt.max_abs());
        dev = dev.max(pushed.max_abs_diff(&pt) / scale);
    }
    let same = source.is_canonical() && target.is_canonical() || source.name() == target.name();
    let kind = if dev >= T::lit(CANONICAL_TOLERANCE) {
        MapKind::Neither
    } else if same {
        MapKind::Canonical
    } else {
        MapKind::Poisson
    };
    Ok(CanonicalReport { max_deviation: dev, kind, samples: samples.len() })
}

fn domain(ok: bool, what: &str) -> Result<(), PhaseError> {
    if ok {
        Ok(())
    } else {
        Err(PhaseError::Domain(what.into()))
    }
}

fn powi<T: Real>(x: T, n: i32) -> T {
    x.powi(n)
}

/// Systems and maps of the A₁, A₂ and gl(n) models.
pub mod systems {
    use super::*;

    /// `H = ½P² + ½e^{2Q}` on `(P, Q)`.
    pub fn a1_cm<T: Real>() -> HamiltonianSystem<T> {
        let h = T::lit(0.5);
        HamiltonianSystem::new(
            "a1_cm",
            "PQ",
            &["P", "Q"],
            move |z: &[T]| Ok(h * z[0] * z[0] + h * (z[1] + z[1]).exp()),
            PoissonStructure::canonical(1),
        )
        .with_gradient(|z: &[T]| Ok(vec![z[0], (z[1] + z[1]).exp()]))
    }

    /// `H = ½(q²p² + q²)` on `(p, q)`, `q > 0`.
    pub fn a1_new_cm<T: Real>() -> HamiltonianSystem<T> {
        let h = T::lit(0.5);
        HamiltonianSystem::new(
            "a1_new_cm",
            "pq",
            &["p", "q"],
            move |z: &[T]| {
                domain(z[1] > T::zero(), "q > 0")?;
                Ok(h * (z[1] * z[1] * z[0] * z[0] + z[1] * z[1]))
            },
            PoissonStructure::canonical(1),
        )
        .with_gradient(|z: &[T]| Ok(vec![z[1] * z[1] * z[0], z[1] * z[0] * z[0] + z[1]]))
    }

    /// Deformed A₁ in the canonical chart: `H = ½(q^{2n}p² + q²)`.
    pub fn a1_toy_a<T: Real>(n: i32) -> HamiltonianSystem<T> {
        let h = T::lit(0.5);
        HamiltonianSystem::new(
            &format!("a1toy_a_{n}"),
            "pq",
            &["p", "q"],
            move |z: &[T]| {
                domain(n >= 0 || z[1] != T::zero(), "q != 0")?;
                Ok(h * (powi(z[1], 2 * n) * z[0] * z[0] + z[1] * z[1]))
            },
            PoissonStructure::canonical(1),
        )
        .with_gradient(move |z: &[T]| {
            domain(n >= 0 || z[1] != T::zero(), "q != 0")?;
            let q2n = powi(z[1], 2 * n);
            let dq = if n == 0 { T::zero() } else { T::lit(n as f64) * powi(z[1], 2 * n - 1) * z[0] * z[0] };
            Ok(vec![q2n * z[0], dq + z[1]])
        })
    }

    /// `{p̃, q̃} = q̃ⁿ`, from `ω = dp̃∧dq̃/q̃ⁿ`.
    pub fn deformed_structure<T: Real>(n: i32) -> PoissonStructure<T> {
        PoissonStructure::from_two_form(&format!("deformed_{n}"), 2, move |z: &[T]| {
            domain(n <= 0 || z[1] != T::zero(), "q̃ != 0")?;
            let w = powi(z[1], -n);
            Ok(Matrix::from_row_major(2, 2, vec![T::zero(), w, -w, T::zero()])?)
        })
    }

    /// Deformed A₁ in the non-canonical chart: `H = ½(p̃² + q̃²)`, `{p̃, q̃} = q̃ⁿ`.
    pub fn a1_toy_b<T: Real>(n: i32) -> HamiltonianSystem<T> {
        let h = T::lit(0.5);
        HamiltonianSystem::new(
            &format!("a1toy_b_{n}"),
            "ptqt",
            &["pt", "qt"],
            move |z: &[T]| Ok(h * (z[0] * z[0] + z[1] * z[1])),
            deformed_structure(n),
        )
        .with_gradient(|z: &[T]| Ok(vec![z[0], z[1]]))
    }

    /// Three particles: `H = ½Σp_i² + e^{x₁-x₂} + e^{x₂-x₃}` on `(p₁,p₂,p₃,x₁,x₂,x₃)`.
    pub fn a2_particles<T: Real>() -> HamiltonianSystem<T> {
        let h = T::lit(0.5);
        HamiltonianSystem::new(
            "a2_particles",
            "px",
            &["p1", "p2", "p3", "x1", "x2", "x3"],
            move |z: &[T]| {
                Ok(h * (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]) + (z[3] - z[4]).exp() + (z[4] - z[5]).exp())
            },
            PoissonStructure::canonical(3),
        )
        .with_gradient(|z: &[T]| {
            let a = (z[3] - z[4]).exp();
            let b = (z[4] - z[5]).exp();
            Ok(vec![z[0], z[1], z[2], a, b - a, -b])
        })
    }

    fn a2_energy<T: Real>(z: &[T]) -> T {
        z[0] * z[0] - z[0] * z[1] + z[1] * z[1] + z[2].exp() + z[3].exp()
    }

    fn a2_gradient<T: Real>(z: &[T]) -> Vec<T> {
        let two = T::lit(2.0);
        vec![two * z[0] - z[1], two * z[1] - z[0], z[2].exp(), z[3].exp()]
    }

    /// `H = p_ξ² - p_ξp_η + p_η² + e^ξ + e^η` on `(p_ξ, p_η, ξ, η)`.
    pub fn a2_cm<T: Real>() -> HamiltonianSystem<T> {
        HamiltonianSystem::new(
            "a2_cm",
            "xi",
            &["pxi", "peta", "xi", "eta"],
            |z: &[T]| Ok(a2_energy(z)),
            PoissonStructure::canonical(2),
        )
        .with_gradient(|z: &[T]| Ok(a2_gradient(z)))
    }

    /// Hierarchy prefactor `(-1)^{m+1}/2^{2m-2}·(e^ξ + e^η)^{m-1}`.
    pub fn hierarchy_prefactor<T: Real>(m: u32, z: &[T]) -> T {
        let sign = if m % 2 == 1 { T::one() } else { -T::one() };
        let s = z[2].exp() + z[3].exp();
        sign * s.powi(m as i32 - 1) / T::lit(4f64.powi(m as i32 - 1))
    }

    /// Same Hamiltonian as [`a2_cm`] with `{p_ξ, ξ} = {p_η, η}` scaled by the hierarchy prefactor.
    pub fn a2_hierarchy<T: Real>(m: u32) -> HamiltonianSystem<T> {
        assert!(m >= 1, "hierarchy index starts at 1");
        let s = PoissonStructure::pairwise(&format!("hierarchy_{m}"), 2, move |z: &[T]| {
            let f = hierarchy_prefactor(m, z);
            Ok(vec![f, f])
        });
        HamiltonianSystem::new(
            &format!("a2_hierarchy_{m}"),
            "xi",
            &["pxi", "peta", "xi", "eta"],
            |z: &[T]| Ok(a2_energy(z)),
            s,
        )
        .with_gradient(|z: &[T]| Ok(a2_gradient(z)))
    }

    /// `H = ¼(Q₁²P₁² + Q₂²P₂² - Q₁P₁Q₂P₂) + Q₁² + Q₂²` on `(P₁, P₂, Q₁, Q₂)`.
    pub fn a2_qp<T: Real>() -> HamiltonianSystem<T> {
        let q = T::lit(0.25);
        HamiltonianSystem::new(
            "a2_qp",
            "QP",
            &["P1", "P2", "Q1", "Q2"],
            move |z: &[T]| {
                let (a, b) = (z[2] * z[0], z[3] * z[1]);
                Ok(q * (a * a + b * b - a * b) + z[2] * z[2] + z[3] * z[3])
            },
            PoissonStructure::canonical(2),
        )
    }

    /// `{π_i, λ_i} = λ_iⁿ/2` on `(π₁, π₂, λ₁, λ₂)`.
    pub fn omega_structure<T: Real>(n: i32) -> PoissonStructure<T> {
        PoissonStructure::pairwise(&format!("omega_{n}"), 2, move |z: &[T]| {
            domain(n >= 0 || (z[2] != T::zero() && z[3] != T::zero()), "λ != 0")?;
            let h = T::lit(0.5);
            Ok(vec![h * powi(z[2], n), h * powi(z[3], n)])
        })
    }

    /// `H = π₁² - π₁π₂ + π₂² + λ₁² + λ₂²` with the `Ωₙ` bracket.
    pub fn a2_pi_lambda<T: Real>(n: i32) -> HamiltonianSystem<T> {
        HamiltonianSystem::new(
            &format!("a2_pi_lambda_{n}"),
            "pilambda",
            &["pi1", "pi2", "lam1", "lam2"],
            |z: &[T]| Ok(z[0] * z[0] - z[0] * z[1] + z[1] * z[1] + z[2] * z[2] + z[3] * z[3]),
            omega_structure(n),
        )
    }

    /// `H = -tr L²` on the `n²` entries of `L` (row-major) with the r-matrix bracket.
    pub fn gl<T: Real>(n: usize) -> HamiltonianSystem<T> {
        let s = LieStructure::r_bracket(n);
        let names: Vec<String> = (0..n * n).map(|k| format!("a{}{}", k / n + 1, k % n + 1)).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        HamiltonianSystem::new(
            &format!("gl_{n}"),
            "gl",
            &refs,
            move |z: &[T]| {
                let mut t = T::zero();
                for i in 0..n {
                    for j in 0..n {
                        t += z[i * n + j] * z[j * n + i];
                    }
                }
                Ok(-t)
            },
            PoissonStructure::lie_poisson(&s),
        )
        .with_gradient(move |z: &[T]| {
            let two = T::lit(2.0);
            Ok((0..n * n).map(|k| -two * z[(k % n) * n + k / n]).collect())
        })
    }

    /// `(p, q) ↦ (P, Q) = (qp, ln q)`, generated by `F₂ = P ln q`.
    pub fn f2_map<T: Real>() -> ChartMap<T> {
        ChartMap::new(
            "f2",
            2,
            2,
            |z: &[T]| {
                domain(z[1] > T::zero(), "q > 0")?;
                Ok(vec![z[1] * z[0], z[1].ln()])
            },
            |w: &[T]| Ok(vec![w[0] * (-w[1]).exp(), w[1].exp()]),
        )
        .with_jacobian(|z: &[T]| {
            domain(z[1] > T::zero(), "q > 0")?;
            Ok(Matrix::from_row_major(2, 2, vec![z[1], z[0], T::zero(), z[1].recip()])?)
        })
    }

    /// `(P, Q) ↦ (p̃, q̃) = (P, e^Q)`.
    pub fn exp_map<T: Real>() -> ChartMap<T> {
        ChartMap::new(
            "exp",
            2,
            2,
            |z: &[T]| Ok(vec![z[0], z[1].exp()]),
            |w: &[T]| {
                domain(w[1] > T::zero(), "q̃ > 0")?;
                Ok(vec![w[0], w[1].ln()])
            },
        )
    }

    /// `(p, q) ↦ (p̃, q̃) = (pqⁿ, q)`.
    pub fn deformation_map<T: Real>(n: i32) -> ChartMap<T> {
        ChartMap::new(
            &format!("deformation_{n}"),
            2,
            2,
            move |z: &[T]| {
                domain(n >= 0 || z[1] != T::zero(), "q != 0")?;
                Ok(vec![z[0] * powi(z[1], n), z[1]])
            },
            move |w: &[T]| {
                domain(n <= 0 || w[1] != T::zero(), "q != 0")?;
                Ok(vec![w[0] * powi(w[1], -n), w[1]])
            },
        )
    }

    /// Centre-of-mass projection `(p_i, x_i) ↦ (p_ξ, p_η, ξ, η)`; the inverse lifts into the
    /// frame with zero total momentum and `Σx_i = 0`.
    pub fn a2_projection<T: Real>() -> ChartMap<T> {
        let third = T::lit(1.0 / 3.0);
        let two = T::lit(2.0);
        ChartMap::new(
            "a2_projection",
            6,
            4,
            move |z: &[T]| {
                Ok(vec![
                    third * (two * z[0] - z[1] - z[2]),
                    third * (z[0] + z[1] - two * z[2]),
                    z[3] - z[4],
                    z[4] - z[5],
                ])
            },
            move |w: &[T]| {
                let x2 = third * (w[3] - w[2]);
                Ok(vec![w[0], w[1] - w[0], -w[1], w[2] + x2, x2, x2 - w[3]])
            },
        )
    }

    /// `(p_ξ, p_η, ξ, η) ↦ (P₁, P₂, Q₁, Q₂) = (2p_ξe^{-ξ/2}, 2p_ηe^{-η/2}, e^{ξ/2}, e^{η/2})`.
    pub fn a2_canonical_map<T: Real>() -> ChartMap<T> {
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        ChartMap::new(
            "a2_canonical",
            4,
            4,
            move |z: &[T]| {
                Ok(vec![
                    two * z[0] * (-half * z[2]).exp(),
                    two * z[1] * (-half * z[3]).exp(),
                    (half * z[2]).exp(),
                    (half * z[3]).exp(),
                ])
            },
            move |w: &[T]| {
                domain(w[2] > T::zero() && w[3] > T::zero(), "Q > 0")?;
                Ok(vec![half * w[0] * w[2], half * w[1] * w[3], two * w[2].ln(), two * w[3].ln()])
            },
        )
    }

    /// `(p_ξ, p_η, ξ, η) ↦ (π₁, π₂, λ₁, λ₂) = (p_ξ, p_η, e^{ξ/2}, e^{η/2})`, onto `Ω₁`.
    pub fn a2_pi_lambda_map<T: Real>() -> ChartMap<T> {
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        ChartMap::new(
            "a2_pi_lambda",
            4,
            4,
            move |z: &[T]| Ok(vec![z[0], z[1], (half * z[2]).exp(), (half * z[3]).exp()]),
            move |w: &[T]| {
                domain(w[2] > T::zero() && w[3] > T::zero(), "λ > 0")?;
                Ok(vec![w[0], w[1], two * w[2].ln(), two * w[3].ln()])
            },
        )
    }

    pub const SYSTEM_NAMES: &[&str] = &[
        "a1_cm",
        "a1_new_cm",
        "a1toy_a",
        "a1toy_b",
        "a2_particles",
        "a2_cm",
        "a2_hierarchy",
        "a2_qp",
        "a2_pi_lambda",
        "gl",
    ];

    /// Registry lookup; `param` is `n` for the toy and `Ωₙ` families, `m` for the
    /// hierarchy and the matrix size for `gl`.
    pub fn lookup<T: Real>(name: &str, param: i32) -> Result<HamiltonianSystem<T>, PhaseError> {
        Ok(match name {
            "a1_cm" => a1_cm(),
            "a1_new_cm" => a1_new_cm(),
            "a1toy_a" => a1_toy_a(param),
            "a1toy_b" => a1_toy_b(param),
            "a2_particles" => a2_particles(),
            "a2_cm" => a2_cm(),
            "a2_hierarchy" if param >= 1 => a2_hierarchy(param as u32),
            "a2_qp" => a2_qp(),
            "a2_pi_lambda" => a2_pi_lambda(param),
            "gl" if param >= 2 => gl(param as usize),
            _ => return Err(PhaseError::UnknownSystem(format!("{name} (parameter {param})"))),
        })
    }
}

/// Poisson structure with polynomial (Laurent) entries, for exact brackets.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyPoissonStructure {
    entries: Vec<Vec<Poly<Rational>>>,
}

impl PolyPoissonStructure {
    pub fn new(entries: Vec<Vec<Poly<Rational>>>) -> Self {
        let n = entries.len();
        for i in 0..n {
            assert_eq!(entries[i].len(), n);
            for j in 0..n {
                assert_eq!(entries[i][j], -&entries[j][i], "bivector must be antisymmetric");
            }
        }
        PolyPoissonStructure { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly<Rational> {
        &self.entries[i][j]
    }

    /// `{f, g} = Σ ∂_i f Π_ij ∂_j g`.
    pub fn bracket(&self, f: &Poly<Rational>, g: &Poly<Rational>) -> Poly<Rational> {
        let n = self.dim();
        let mut acc = Poly::zero(n);
        let dg: Vec<Poly<Rational>> = (0..n).map(|j| g.derivative(j)).collect();
        for i in 0..n {
            let dfi = f.derivative(i);
            if dfi.is_zero() {
                continue;
            }
            for j in 0..n {
                if self.entries[i][j].is_zero() || dg[j].is_zero() {
                    continue;
                }
                acc = &acc + &(&(&dfi * &self.entries[i][j]) * &dg[j]);
            }
        }
        acc
    }

    /// `Ωₙ` on `(π₁, π₂, λ₁, λ₂)`: `{π_i, λ_i} = λ_iⁿ/2`.
    pub fn omega(n: i32) -> Self {
        let mut e = vec![vec![Poly::zero(4); 4]; 4];
        for i in 0..2 {
            let mut m = vec![0; 4];
            m[2 + i] = n;
            let p = Poly::monomial(4, m, rat(1, 2));
            e[i][2 + i] = p.clone();
            e[2 + i][i] = -&p;
        }
        PolyPoissonStructure::new(e)
    }
}

/// `H` and `I` of the `(π, λ)` chart as exact polynomials in `(π₁, π₂, λ₁, λ₂)`.
pub fn pi_lambda_invariants() -> (Poly<Rational>, Poly<Rational>) {
    let v = |k| Poly::<Rational>::var(4, k);
    let (p1, p2, l1, l2) = (v(0), v(1), v(2), v(3));
    let h = &(&(&(&p1 * &p1) - &(&p1 * &p2)) + &(&p2 * &p2)) + &(&(&l1 * &l1) + &(&l2 * &l2));
    let i = &(&(&(&p2 * &p2) * &p1) - &(&(&p2 * &p1) * &p1)) + &(&(&(&l2 * &l2) * &p1) - &(&(&l1 * &l1) * &p2));
    (h, i)
}

#[cfg(test)]
mod tests {
    use super::systems::*;
    use super::*;

    #[test]
    fn canonical_bracket_sign() {
        let s = PoissonStructure::<f64>::canonical(1);
        let z = PhasePoint::new("PQ", vec![0.3, -0.2]).unwrap();
        let b = poisson_bracket(&|w: &[f64]| Ok(w[0]), &|w: &[f64]| Ok(w[1]), &s, &z).unwrap();
        assert!((b - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_form_bracket_scales_with_q() {
        let s = deformed_structure::<f64>(1);
        let m = s.matrix(&[0.4, 2.0]).unwrap();
        assert!((m[(0, 1)] - 2.0).abs() < 1e-14);
        assert!(s.matrix(&[0.4, 0.0]).is_err());
    }

    #[test]
    fn energies_at_reference_points() {
        assert_eq!(a1_cm::<f64>().energy(&[0.0, 0.0]).unwrap(), 0.5);
        assert_eq!(a2_particles::<f64>().energy(&[0.0; 6]).unwrap(), 2.0);
        let h = a1_new_cm::<f64>().energy(&[1.0, 1.0]).unwrap();
        let img = f2_map::<f64>().forward(&[1.0, 1.0]).unwrap();
        assert_eq!(img, vec![1.0, 0.0]);
        assert!((h - 1.0).abs() < 1e-15);
        assert!((a1_cm::<f64>().energy(&img).unwrap() - h).abs() < 1e-15);
        assert!(matches!(a1_new_cm::<f64>().energy(&[1.0, -1.0]), Err(PhaseError::Domain(_))));
        assert!(matches!(a1_cm::<f64>().energy(&[1.0]), Err(PhaseError::Dimension { .. })));
    }

    #[test]
    fn harmonic_field_has_unit_speed() {
        let v = a1_toy_b::<f64>(0).vector_field(&[1.0, 0.0]).unwrap();
        assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn generic_over_f32() {
        let v = a1_toy_b::<f32>(0).vector_field(&[1.0, 0.0]).unwrap();
        assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn omega_bracket_vanishes_only_for_n_one() {
        let (h, i) = pi_lambda_invariants();
        for n in [-1, 0, 1, 2, 3] {
            let b = PolyPoissonStructure::omega(n).bracket(&h, &i);
            assert_eq!(b.is_zero(), n == 1, "n = {n}");
        }
    }

    #[test]
    fn registry_knows_every_name() {
        for name in SYSTEM_NAMES {
            assert!(lookup::<f64>(name, 2).is_ok(), "{name}");
        }
        assert!(lookup::<f64>("nope", 0).is_err());
        assert!(lookup::<f64>("gl", 1).is_err());
    }
}
