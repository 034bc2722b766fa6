//! Schrödinger operators as 1D eigenproblems `a(x)ψ'' + b(x)ψ' + c(x)ψ = λψ`,
//! their finite-difference spectra and exact changes of variable.
//!
//! Coefficients are finite sums of terms `c·(s·x)^p·e^{αx}`; `E = λ / energy_scale`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::exact::to_f64;
use crate::linalg::Matrix;
use crate::ncalg::{at_unit_hbar, GenKind, NCPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("momentum degree {0} exceeds 2")]
    MomentumDegree(i32),
    #[error("operator uses more than one momentum generator")]
    MultipleMomenta,
    #[error("no realization rule for generator {0}")]
    UnknownGenerator(String),
    #[error("operator coefficients are not real: {0}")]
    NonReal(String),
    #[error("leading coefficient a(x) changes sign or vanishes on the domain")]
    SignChange,
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("change of variable is not monotone: {0}")]
    NonMonotone(String),
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("term not representable after substitution: {0}")]
    NotRepresentable(String),
    #[error("eigensolver did not converge")]
    NoConvergence,
}

/// `c·(s·x)^p·e^{αx}` with `s = ±1` after normalisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub c: f64,
    pub s: f64,
    pub p: f64,
    pub alpha: f64,
}

impl ExpTerm {
    pub fn new(c: f64, s: f64, p: f64, alpha: f64) -> Self {
        ExpTerm { c, s, p, alpha }.normalized()
    }

    pub fn constant(c: f64) -> Self {
        ExpTerm::new(c, 1.0, 0.0, 0.0)
    }

    /// `c·x^p`.
    pub fn power(c: f64, p: f64) -> Self {
        ExpTerm::new(c, 1.0, p, 0.0)
    }

    /// `c·e^{αx}`.
    pub fn exp(c: f64, alpha: f64) -> Self {
        ExpTerm::new(c, 1.0, 0.0, alpha)
    }

    fn normalized(mut self) -> Self {
        if self.p == 0.0 || self.s == 0.0 {
            self.s = 1.0;
        } else {
            self.c *= self.s.abs().powf(self.p);
            self.s = self.s.signum();
        }
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        let base = self.s * x;
        let pw = if self.p == 0.0 {
            1.0
        } else if self.p.fract() == 0.0 && self.p.abs() < i32::MAX as f64 {
            base.powi(self.p as i32)
        } else {
            base.powf(self.p)
        };
        let ex = if self.alpha == 0.0 { 1.0 } else { (self.alpha * x).exp() };
        self.c * pw * ex
    }

    fn key(&self) -> (u64, u64, u64) {
        (self.s.to_bits(), self.p.to_bits(), self.alpha.to_bits())
    }

    pub fn mul(&self, o: &ExpTerm) -> Result<ExpTerm, SpectralError> {
        if self.p != 0.0 && o.p != 0.0 && self.s != o.s {
            return Err(SpectralError::NotRepresentable(format!("{self:?} * {o:?}")));
        }
        let s = if self.p != 0.0 { self.s } else { o.s };
        Ok(ExpTerm::new(self.c * o.c, s, self.p + o.p, self.alpha + o.alpha))
    }

    pub fn recip(&self) -> ExpTerm {
        ExpTerm::new(1.0 / self.c, self.s, -self.p, -self.alpha)
    }

    pub fn powi(&self, e: i32) -> ExpTerm {
        ExpTerm::new(self.c.powi(e), self.s, self.p * e as f64, self.alpha * e as f64)
    }

    pub fn derivative(&self) -> Coefficient {
        let mut out = Coefficient::zero();
        if self.p != 0.0 {
            out.push(ExpTerm::new(self.c * self.p * self.s, self.s, self.p - 1.0, self.alpha));
        }
        if self.alpha != 0.0 {
            out.push(ExpTerm::new(self.c * self.alpha, self.s, self.p, self.alpha));
        }
        out
    }
}

/// Sum of [`ExpTerm`]s with like terms merged and zeros dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Coefficient {
    terms: Vec<ExpTerm>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ExpTerm>) -> Self {
        let mut c = Coefficient::zero();
        for t in terms {
            c.push(t);
        }
        c
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, t: ExpTerm) {
        let t = t.normalized();
        if let Some(u) = self.terms.iter_mut().find(|u| u.key() == t.key()) {
            u.c += t.c;
        } else {
            self.terms.push(t);
        }
        // Cancellation below a relative 1e-14 is rounding noise from exact inputs.
        let scale = self.terms.iter().map(|u| u.c.abs()).fold(t.c.abs(), f64::max);
        self.terms.retain(|u| u.c.abs() > 1e-14 * scale.max(1e-300));
        self.terms
            .sort_by(|a, b| (a.alpha, a.p, a.s).partial_cmp(&(b.alpha, b.p, b.s)).unwrap_or(std::cmp::Ordering::Equal));
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn add(&self, o: &Coefficient) -> Coefficient {
        Coefficient::from_terms(self.terms.iter().chain(&o.terms).copied())
    }

    pub fn scale(&self, k: f64) -> Coefficient {
        Coefficient::from_terms(self.terms.iter().map(|t| ExpTerm { c: t.c * k, ..*t }))
    }

    pub fn mul_term(&self, t: &ExpTerm) -> Result<Coefficient, SpectralError> {
        let terms: Result<Vec<ExpTerm>, SpectralError> = self.terms.iter().map(|u| u.mul(t)).collect();
        Ok(Coefficient::from_terms(terms?))
    }

    /// Relative equality up to `tol` on every term coefficient.
    pub fn approx_eq(&self, o: &Coefficient, tol: f64) -> bool {
        let diff = self.add(&o.scale(-1.0));
        let scale = self.terms.iter().chain(&o.terms).map(|t| t.c.abs()).fold(1.0, f64::max);
        diff.terms.iter().all(|t| t.c.abs() <= tol * scale)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let mut s = format!("{}", t.c);
                if t.p != 0.0 {
                    let base = if t.s < 0.0 { "(-x)" } else { "x" };
                    let _ = write!(s, "*{base}^{}", t.p);
                }
                if t.alpha != 0.0 {
                    let _ = write!(s, "*exp({}*x)", t.alpha);
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}

/// Monotone substitution `x = φ(y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarMap {
    Identity,
    /// `x = e^y`.
    Exp,
    /// `x = ln y`.
    Log,
    /// `x = (k·y)^r`.
    Power {
        k: f64,
        r: f64,
    },
}

impl VarMap {
    pub fn apply(&self, y: f64) -> f64 {
        match *self {
            VarMap::Identity => y,
            VarMap::Exp => y.exp(),
            VarMap::Log => y.ln(),
            VarMap::Power { k, r } => (k * y).powf(r),
        }
    }

    /// `(φ', φ'')` as single terms in `y`.
    fn derivatives(&self) -> (ExpTerm, ExpTerm) {
        match *self {
            VarMap::Identity => (ExpTerm::constant(1.0), ExpTerm::constant(0.0)),
            VarMap::Exp => (ExpTerm::exp(1.0, 1.0), ExpTerm::exp(1.0, 1.0)),
            VarMap::Log => (ExpTerm::power(1.0, -1.0), ExpTerm::power(-1.0, -2.0)),
            VarMap::Power { k, r } => {
                (ExpTerm::new(r * k, k, r - 1.0, 0.0), ExpTerm::new(r * (r - 1.0) * k * k, k, r - 2.0, 0.0))
            }
        }
    }

    fn check_domain(&self, lo: f64, hi: f64) -> Result<(), SpectralError> {
        match *self {
            VarMap::Identity | VarMap::Exp => Ok(()),
            VarMap::Log if lo > 0.0 => Ok(()),
            VarMap::Log => Err(SpectralError::Domain("ln needs y > 0".into())),
            VarMap::Power { k, r } if k == 0.0 || r == 0.0 => {
                Err(SpectralError::NonMonotone(format!("power map with k = {k}, r = {r}")))
            }
            VarMap::Power { k, .. } if k * lo > 0.0 && k * hi > 0.0 => Ok(()),
            VarMap::Power { .. } => Err(SpectralError::Domain("power map needs k·y > 0".into())),
        }
    }

    /// `t∘φ` for a single term.
    fn compose(&self, t: &ExpTerm) -> Result<ExpTerm, SpectralError> {
        let bad = || SpectralError::NotRepresentable(format!("{t:?} under {self:?}"));
        match *self {
            VarMap::Identity => Ok(*t),
            VarMap::Exp if t.alpha == 0.0 && (t.s > 0.0 || t.p == 0.0) => Ok(ExpTerm::exp(t.c, t.p)),
            VarMap::Log if t.p == 0.0 => Ok(ExpTerm::power(t.c, t.alpha)),
            VarMap::Power { k, r } if t.alpha == 0.0 && (t.s > 0.0 || t.p == 0.0) => {
                Ok(ExpTerm::new(t.c, k, r * t.p, 0.0))
            }
            _ => Err(bad()),
        }
    }

    fn compose_all(&self, c: &Coefficient) -> Result<Coefficient, SpectralError> {
        let terms: Result<Vec<ExpTerm>, SpectralError> = c.terms().iter().map(|t| self.compose(t)).collect();
        Ok(Coefficient::from_terms(terms?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Uniform,
    /// Points in geometric progression; needs `0 < x_min`.
    Geometric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeEigenproblem {
    pub a: Coefficient,
    pub b: Coefficient,
    pub c: Coefficient,
    pub domain: (f64, f64),
    pub energy_scale: f64,
    pub grid: GridKind,
}

impl OdeEigenproblem {
    pub fn new(a: Coefficient, b: Coefficient, c: Coefficient, domain: (f64, f64), energy_scale: f64) -> Self {
        OdeEigenproblem { a, b, c, domain, energy_scale, grid: GridKind::Uniform }
    }

    pub fn with_grid(mut self, grid: GridKind) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = (lo, hi);
        self
    }

    /// Coefficients divided by the energy scale, so equivalent problems compare equal.
    pub fn normalized(&self) -> (Coefficient, Coefficient, Coefficient) {
        let k = 1.0 / self.energy_scale;
        (self.a.scale(k), self.b.scale(k), self.c.scale(k))
    }

    pub fn same_operator(&self, other: &OdeEigenproblem, tol: f64) -> bool {
        let (a1, b1, c1) = self.normalized();
        let (a2, b2, c2) = other.normalized();
        a1.approx_eq(&a2, tol) && b1.approx_eq(&b2, tol) && c1.approx_eq(&c2, tol)
    }

    pub fn describe(&self) -> String {
        format!(
            "({})ψ'' + ({})ψ' + ({})ψ = {}·Eψ on [{}, {}]",
            self.a.render(),
            self.b.render(),
            self.c.render(),
            self.energy_scale,
            self.domain.0,
            self.domain.1
        )
    }
}

/// How generators act on functions of `x`: coordinates multiply, the momentum is
/// `-i·x^m·d/dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub momentum: String,
    pub weight_power: i32,
    pub coordinates: Vec<(String, ExpTerm)>,
}

impl Realization {
    /// `q ↦ x`, `p ↦ -i d/dx`.
    pub fn standard(coord: &str, momentum: &str) -> Self {
        Self::weighted(coord, momentum, 0)
    }

    /// `q ↦ x`, `p ↦ -i xⁿ d/dx`.
    pub fn weighted(coord: &str, momentum: &str, n: i32) -> Self {
        Realization {
            momentum: momentum.into(),
            weight_power: n,
            coordinates: vec![(coord.into(), ExpTerm::power(1.0, 1.0))],
        }
    }

    /// `E ↦ e^x`, `P ↦ -i d/dx`.
    pub fn exponential(coord: &str, momentum: &str) -> Self {
        Realization {
            momentum: momentum.into(),
            weight_power: 0,
            coordinates: vec![(coord.into(), ExpTerm::exp(1.0, 1.0))],
        }
    }
}

/// Reads off `a, b, c` from a normal-ordered operator at `ħ = 1`.
pub fn build_problem(
    h: &NCPoly,
    r: &Realization,
    domain: (f64, f64),
    energy_scale: f64,
) -> Result<OdeEigenproblem, SpectralError> {
    if !(domain.0 < domain.1) {
        return Err(SpectralError::Domain(format!("[{}, {}]", domain.0, domain.1)));
    }
    let table = h.table();
    let gens = table.generators();
    let h = at_unit_hbar(h);
    let w = ExpTerm::power(1.0, r.weight_power as f64);
    let ww = w.mul(&w)?;
    let wdw = Coefficient::from_terms(w.derivative().terms().iter().map(|t| t.mul(&w).expect("powers")));
    // Real and imaginary parts of a, b, c.
    let mut parts: [Coefficient; 6] = Default::default();
    for (m, coeff) in h.terms() {
        let mut mono = ExpTerm::constant(1.0);
        let mut deg = 0;
        for (k, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let g = &gens[k];
            if g.kind == GenKind::Momentum {
                if g.name != r.momentum {
                    return Err(SpectralError::MultipleMomenta);
                }
                deg = e;
            } else {
                let rule = r
                    .coordinates
                    .iter()
                    .find(|(n, _)| *n == g.name)
                    .ok_or_else(|| SpectralError::UnknownGenerator(g.name.clone()))?;
                mono = mono.mul(&rule.1.powi(e))?;
            }
        }
        let z = coeff.order(0);
        let (re, im) = (to_f64(&z.re), to_f64(&z.im));
        // (-i w D)^0 = 1, (-i w D)^1 = -i w D, (-i w D)^2 = -(w² D² + w w' D).
        let mut add = |slot: usize, t: Coefficient, cre: f64, cim: f64| {
            parts[2 * slot] = parts[2 * slot].add(&t.scale(cre));
            parts[2 * slot + 1] = parts[2 * slot + 1].add(&t.scale(cim));
        };
        let base = Coefficient::from_terms([mono]);
        match deg {
            0 => add(2, base, re, im),
            1 => add(1, base.mul_term(&w)?, im, -re),
            2 => {
                add(0, base.mul_term(&ww)?, -re, -im);
                let mut t = Coefficient::zero();
                for u in wdw.terms() {
                    t.push(mono.mul(u)?);
                }
                add(1, t, -re, -im);
            }
            d => return Err(SpectralError::MomentumDegree(d)),
        }
    }
    for (slot, name) in ["a", "b", "c"].iter().enumerate() {
        if !parts[2 * slot + 1].is_zero() {
            return Err(SpectralError::NonReal(format!("{name}: i*({})", parts[2 * slot + 1].render())));
        }
    }
    let scale = energy_scale;
    Ok(OdeEigenproblem::new(parts[0].scale(scale), parts[2].scale(scale), parts[4].scale(scale), domain, energy_scale))
}

/// Exact transformation under `x = φ(y)` onto the `y`-domain `new_domain`:
/// `a' = a∘φ/φ'²`, `b' = b∘φ/φ' − a∘φ·φ''/φ'³`, `c' = c∘φ`.
pub fn change_of_variable(
    prob: &OdeEigenproblem,
    map: VarMap,
    new_domain: (f64, f64),
) -> Result<OdeEigenproblem, SpectralError> {
    if !(new_domain.0 < new_domain.1) {
        return Err(SpectralError::Domain(format!("[{}, {}]", new_domain.0, new_domain.1)));
    }
    map.check_domain(new_domain.0, new_domain.1)?;
    let (d1, d2) = map.derivatives();
    let inv1 = d1.recip();
    let ac = map.compose_all(&prob.a)?;
    let bc = map.compose_all(&prob.b)?;
    let a = ac.mul_term(&inv1.powi(2))?;
    let mut b = bc.mul_term(&inv1)?;
    if d2.c != 0.0 {
        b = b.add(&ac.mul_term(&d2.mul(&inv1.powi(3))?)?.scale(-1.0));
    }
    let c = map.compose_all(&prob.c)?;
    Ok(OdeEigenproblem { a, b, c, domain: new_domain, energy_scale: prob.energy_scale, grid: GridKind::Uniform })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePath {
    /// Diagonal similarity to a symmetric tridiagonal matrix, Sturm bisection.
    Symmetrized,
    /// Dense Hessenberg QR on the nonsymmetric matrix.
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Lowest energies `E_k = λ_k / energy_scale`, ascending.
    pub values: Vec<f64>,
    /// Interior grid points.
    pub grid: Vec<f64>,
    /// Eigenvectors on the interior grid, unit norm in the symmetrising weight.
    pub vectors: Vec<Vec<f64>>,
    pub path: SolvePath,
}

impl Spectrum {
    /// `k,E_k` rows, then optionally an `x,psi_0,..` table.
    pub fn to_csv(&self, with_vectors: bool) -> String {
        let mut out = String::from("k,E_k\n");
        for (k, e) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{k},{e:.16e}");
        }
        if with_vectors && !self.vectors.is_empty() {
            out.push_str("\nx");
            for k in 0..self.vectors.len() {
                let _ = write!(out, ",psi_{k}");
            }
            out.push('\n');
            for (i, x) in self.grid.iter().enumerate() {
                let _ = write!(out, "{x:.16e}");
                for v in &self.vectors {
                    let _ = write!(out, ",{:.16e}", v[i]);
                }
                out.push('\n');
            }
        }
        out
    }
}

pub const MIN_GRID: usize = 64;

fn grid_points(prob: &OdeEigenproblem, n: usize) -> Result<Vec<f64>, SpectralError> {
    let (lo, hi) = prob.domain;
    let m = (n + 1) as f64;
    match prob.grid {
        GridKind::Uniform => Ok((0..n + 2).map(|j| lo + (hi - lo) * j as f64 / m).collect()),
        GridKind::Geometric if lo > 0.0 => {
            let r = (hi / lo).ln();
            Ok((0..n + 2).map(|j| lo * (r * j as f64 / m).exp()).collect())
        }
        GridKind::Geometric => Err(SpectralError::Grid("geometric grid needs x_min > 0".into())),
    }
}

/// Three-point discretisation: `(sub, diag, sup)` rows over interior points.
fn discretize(prob: &OdeEigenproblem, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), SpectralError> {
    let n = x.len() - 2;
    let (mut sub, mut diag, mut sup) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut sign = 0.0;
    for i in 0..n {
        let xi = x[i + 1];
        let (hm, hp) = (xi - x[i], x[i + 2] - xi);
        let (a, b, c) = (prob.a.eval(xi), prob.b.eval(xi), prob.c.eval(xi));
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(SpectralError::Domain(format!("non-finite coefficient at x = {xi}")));
        }
        if a == 0.0 || (sign != 0.0 && a.signum() != sign) {
            return Err(SpectralError::SignChange);
        }
        sign = a.signum();
        let s = hm + hp;
        sub[i] = 2.0 * a / (hm * s) - b * hp / (hm * s);
        diag[i] = -2.0 * a / (hm * hp) + b * (hp - hm) / (hm * hp) + c;
        sup[i] = 2.0 * a / (hp * s) + b * hm / (hp * s);
    }
    Ok((sub, diag, sup))
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal `(d, e)`.
fn sturm_count(d: &[f64], e2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e2[i - 1] / q };
        q = d[i] - x - off;
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect(d: &[f64], e2: &[f64], j: usize, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e2, mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T - μ)x = rhs` for tridiagonal `T` with partial pivoting.
fn tridiagonal_solve(sub: &[f64], diag: &[f64], sup: &[f64], mu: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // Rows of the upper-triangular factor have up to two superdiagonals after pivoting.
    let mut u0: Vec<f64> = diag.iter().map(|d| d - mu).collect();
    let mut u1: Vec<f64> = sup.to_vec();
    let mut u2 = vec![0.0; n];
    let mut l = sub.to_vec();
    let mut y = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        let below = l[i + 1];
        if below.abs() > u0[i].abs() {
            // Swap rows i and i+1.
            let (r0, r1, r2) = (below, diag[i + 1] - mu, if i + 1 < n - 1 { sup[i + 1] } else { 0.0 });
            let (o0, o1, o2) = (u0[i], u1[i], u2[i]);
            u0[i] = r0;
            u1[i] = r1;
            u2[i] = r2;
            y.swap(i, i + 1);
            let f = o0 / r0;
            u0[i + 1] = o1 - f * r1;
            u1[i + 1] = o2 - f * r2;
            y[i + 1] -= f * y[i];
        } else {
            let piv = if u0[i] == 0.0 { f64::EPSILON } else { u0[i] };
            u0[i] = piv;
            let f = below / piv;
            u0[i + 1] -= f * u1[i];
            y[i + 1] -= f * y[i];
        }
        l[i + 1] = 0.0;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        if i + 1 < n {
            s -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * x[i + 2];
        }
        let piv = if u0[i] == 0.0 { f64::EPSILON } else { u0[i] };
        x[i] = s / piv;
    }
    x
}

fn inverse_iteration(sub: &[f64], diag: &[f64], sup: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let mu = lambda + 1e-10 * lambda.abs().max(1.0);
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..3 {
        v = tridiagonal_solve(sub, diag, sup, mu, &v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub fn solve(prob: &OdeEigenproblem, n: usize, k: usize) -> Result<Spectrum, SpectralError> {
    solve_with(prob, n, k, None)
}

/// Lowest `k` energies on `n` interior points; `path = None` picks the symmetrised
/// path whenever the discrete matrix admits it.
pub fn solve_with(
    prob: &OdeEigenproblem,
    n: usize,
    k: usize,
    path: Option<SolvePath>,
) -> Result<Spectrum, SpectralError> {
    if n < MIN_GRID {
        return Err(SpectralError::Grid(format!("N = {n} below {MIN_GRID}")));
    }
    if k == 0 || k >= n / 4 {
        return Err(SpectralError::Grid(format!("k = {k} must satisfy 0 < k < N/4")));
    }
    let x = grid_points(prob, n)?;
    let (sub, diag, sup) = discretize(prob, &x)?;
    let symmetrizable = (0..n - 1).all(|i| sup[i] * sub[i + 1] > 0.0);
    let path = path.unwrap_or(if symmetrizable { SolvePath::Symmetrized } else { SolvePath::General });
    let interior = x[1..=n].to_vec();
    // a < 0 gives a spectrum bounded below; a > 0 is handled by negation.
    let flip = if prob.a.eval(interior[0]) > 0.0 { -1.0 } else { 1.0 };
    let (values, vectors) = match path {
        SolvePath::Symmetrized => {
            if !symmetrizable {
                return Err(SpectralError::Grid("discrete operator is not symmetrisable".into()));
            }
            let d: Vec<f64> = diag.iter().map(|v| flip * v).collect();
            let e2: Vec<f64> = (0..n - 1).map(|i| sup[i] * sub[i + 1]).collect();
            // Off-diagonals keep the sign of the flipped operator so eigenvectors map back.
            let e: Vec<f64> = (0..n - 1).map(|i| flip * sup[i].signum() * e2[i].sqrt()).collect();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for i in 0..n {
                let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
                lo = lo.min(d[i] - r);
                hi = hi.max(d[i] + r);
            }
            // log of the symmetrising weights d_{i+1}/d_i = sqrt(sup_i/sub_{i+1})
            let mut logw = vec![0.0; n];
            for i in 0..n - 1 {
                logw[i + 1] = logw[i] + 0.5 * (sup[i] / sub[i + 1]).abs().ln();
            }
            let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut ssub = vec![0.0; n];
            ssub[1..].copy_from_slice(&e);
            let mut ssup = vec![0.0; n];
            ssup[..n - 1].copy_from_slice(&e);
            let mut vals = Vec::with_capacity(k);
            let mut vecs = Vec::with_capacity(k);
            for j in 0..k {
                let lam = bisect(&d, &e2, j, lo, hi);
                let mut y = inverse_iteration(&ssub, &d, &ssup, lam);
                for i in 0..n {
                    y[i] *= (top - logw[i]).exp();
                }
                let norm = y.iter().zip(&logw).map(|(v, lw)| (v * (lw - top).exp()).powi(2)).sum::<f64>().sqrt();
                y.iter_mut().for_each(|v| *v /= norm);
                fix_sign(&mut y);
                vals.push(flip * lam / prob.energy_scale);
                vecs.push(y);
            }
            (vals, vecs)
        }
        SolvePath::General => {
            let mut m = Matrix::<f64>::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = flip * diag[i];
                if i > 0 {
                    m[(i, i - 1)] = flip * sub[i];
                }
                if i + 1 < n {
                    m[(i, i + 1)] = flip * sup[i];
                }
            }
            let ev = m.eigenvalues().map_err(|_| SpectralError::NoConvergence)?;
            let mut re: Vec<f64> = ev.iter().map(|c| c.re).collect();
            re.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            let mut vals = Vec::with_capacity(k);
            let mut vecs = Vec::with_capacity(k);
            let (fsub, fdiag, fsup): (Vec<f64>, Vec<f64>, Vec<f64>) = (
                sub.iter().map(|v| flip * v).collect(),
                diag.iter().map(|v| flip * v).collect(),
                sup.iter().map(|v| flip * v).collect(),
            );
            for &lam in re.iter().take(k) {
                let mut y = inverse_iteration(&fsub, &fdiag, &fsup, lam);
                fix_sign(&mut y);
                vals.push(flip * lam / prob.energy_scale);
                vecs.push(y);
            }
            (vals, vecs)
        }
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SpectralError::NoConvergence);
    }
    Ok(Spectrum { values, grid: interior, vectors, path })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumComparison {
    pub max_relative_deviation: f64,
    pub passed: bool,
}

pub fn compare_spectra(s1: &Spectrum, s2: &Spectrum, k: usize, rel_tol: f64) -> SpectrumComparison {
    assert!(s1.values.len() >= k && s2.values.len() >= k, "spectra shorter than k");
    let dev = s1.values[..k]
        .iter()
        .zip(&s2.values[..k])
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    SpectrumComparison { max_relative_deviation: dev, passed: dev < rel_tol }
}

/// Problems built from the catalogue operators.
pub mod problems {
    use super::*;
    use crate::ncalg::catalog::{self, forms};
    use crate::ncalg::NCPoly;

    /// `½(-ψ'' + e^{2Q}ψ) = Eψ` from `½(P² + E²)` with `E ↦ e^Q`.
    pub fn schrodinger1(domain: (f64, f64)) -> OdeEigenproblem {
        let h = NCPoly::parse(&catalog::a1_exp_chart(), forms::A1_H_EXP).expect("catalogue operator");
        build_problem(&h, &Realization::exponential("E", "P"), domain, 1.0).expect("catalogue problem")
    }

    /// `-q²ψ'' - qψ' + q²ψ = 2Eψ` from the right-ordered Hamiltonian; geometric grid.
    pub fn schrodinger2(domain: (f64, f64)) -> OdeEigenproblem {
        let h = NCPoly::parse(&catalog::a1_canonical(), forms::A1_H_RIGHT).expect("catalogue operator");
        build_problem(&h, &Realization::standard("q", "p"), domain, 2.0)
            .expect("catalogue problem")
            .with_grid(GridKind::Geometric)
    }

    /// `½[-qⁿ d/dq(qⁿ d/dq) + q²]ψ = εψ` from `½(qⁿpqⁿp + q²)`.
    pub fn toy_q(n: i32, domain: (f64, f64)) -> OdeEigenproblem {
        let h = NCPoly::parse(&catalog::a1_canonical(), &forms::a1_h_deformed(n)).expect("catalogue operator");
        build_problem(&h, &Realization::standard("q", "p"), domain, 1.0).expect("catalogue problem")
    }

    /// `q = ((1-n)u)^{1/(1-n)}`, the inverse of `u = q^{1-n}/(1-n)`.
    pub fn u_map(n: i32) -> Result<VarMap, SpectralError> {
        if n == 1 {
            return Err(SpectralError::NonMonotone("u-substitution needs n != 1".into()));
        }
        let k = (1 - n) as f64;
        Ok(VarMap::Power { k, r: 1.0 / k })
    }

    /// `u`-domain image of a `q`-domain.
    pub fn u_domain(n: i32, q: (f64, f64)) -> (f64, f64) {
        let k = (1 - n) as f64;
        let (a, b) = (q.0.powf(k) / k, q.1.powf(k) / k);
        (a.min(b), a.max(b))
    }

    /// `-½ψ'' + ½[(1-n)u]^{2/(1-n)}ψ = εψ`.
    pub fn toy_u(n: i32, domain: (f64, f64)) -> OdeEigenproblem {
        let k = (1 - n) as f64;
        OdeEigenproblem::new(
            Coefficient::from_terms([ExpTerm::constant(-0.5)]),
            Coefficient::zero(),
            Coefficient::from_terms([ExpTerm::new(0.5, k, 2.0 / k, 0.0)]),
            domain,
            1.0,
        )
    }

    /// `-½ψ'' + ½x²ψ = Eψ`.
    pub fn oscillator(domain: (f64, f64)) -> OdeEigenproblem {
        OdeEigenproblem::new(
            Coefficient::from_terms([ExpTerm::constant(-0.5)]),
            Coefficient::zero(),
            Coefficient::from_terms([ExpTerm::power(0.5, 2.0)]),
            domain,
            1.0,
        )
    }

    /// `-½ψ'' = Eψ`.
    pub fn free_box(domain: (f64, f64)) -> OdeEigenproblem {
        OdeEigenproblem::new(
            Coefficient::from_terms([ExpTerm::constant(-0.5)]),
            Coefficient::zero(),
            Coefficient::zero(),
            domain,
            1.0,
        )
    }
}

/// Per-coefficient term tables, keyed by rendered term.
pub fn coefficient_table(prob: &OdeEigenproblem) -> BTreeMap<&'static str, String> {
    BTreeMap::from([("a", prob.a.render()), ("b", prob.b.render()), ("c", prob.c.render())])
}
