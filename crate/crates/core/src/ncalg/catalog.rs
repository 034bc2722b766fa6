//! Generator tables and operators for the A₁ and A₂ quantum systems.
//!
//! Relations carry a formal `hbar`; stated operators use `i` with `ħ = 1`, so
//! comparisons specialise `ħ` first (see [`super::at_unit_hbar`]).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::ops::Substitution;
use super::table::{GeneratorTable, TableBuilder};
use super::AlgebraError;
use crate::exact::{fmt_rational, rat};

/// Catalogue tables are built once per key so values built from them share a table.
fn cached(key: String, build: impl FnOnce() -> Arc<GeneratorTable>) -> Arc<GeneratorTable> {
    static TABLES: OnceLock<Mutex<HashMap<String, Arc<GeneratorTable>>>> = OnceLock::new();
    let mut map = TABLES.get_or_init(Default::default).lock().expect("catalogue lock");
    map.entry(key).or_insert_with(build).clone()
}

/// `q, p` with `[p, q] = -iħ`; `q` is invertible.
pub fn a1_canonical() -> Arc<GeneratorTable> {
    cached("a1_canonical".into(), || {
        TableBuilder::new("a1_canonical")
            .laurent_coordinate("q")
            .momentum("p")
            .relation("p", "q", "-i*hbar")
            .build()
            .expect("static table")
    })
}

/// `E = e^Q` and `P` with `[P, E] = -iħE`.
pub fn a1_exp_chart() -> Arc<GeneratorTable> {
    cached("a1_exp_chart".into(), || {
        TableBuilder::new("a1_exp_chart")
            .laurent_coordinate("E")
            .momentum("P")
            .relation("P", "E", "-i*hbar*E")
            .build()
            .expect("static table")
    })
}

/// `q, p` with `[p, q] = -iħ q^n`.
pub fn a1_deformed(n: i32) -> Arc<GeneratorTable> {
    cached(format!("a1_deformed_{n}"), || {
        TableBuilder::new(&format!("a1_deformed_{n}"))
            .laurent_coordinate("q")
            .momentum("p")
            .relation("p", "q", &format!("-i*hbar*q^{n}"))
            .build()
            .expect("static table")
    })
}

/// Canonical pair `u, U` of the linearising chart.
pub fn a1_u_chart() -> Arc<GeneratorTable> {
    cached("a1_u_chart".into(), || {
        TableBuilder::new("a1_u_chart")
            .coordinate("u")
            .momentum("U")
            .relation("U", "u", "-i*hbar")
            .build()
            .expect("static table")
    })
}

/// `X = e^{ξ/2}`, `Y = e^{η/2}` and their momenta.
pub fn a2_xi() -> Arc<GeneratorTable> {
    cached("a2_xi".into(), || {
        TableBuilder::new("a2_xi")
            .laurent_coordinate("X")
            .laurent_coordinate("Y")
            .momentum("pxi")
            .momentum("peta")
            .relation("pxi", "X", "-i/2*hbar*X")
            .relation("peta", "Y", "-i/2*hbar*Y")
            .build()
            .expect("static table")
    })
}

pub fn a2_qp() -> Arc<GeneratorTable> {
    cached("a2_qp".into(), || {
        TableBuilder::new("a2_qp")
            .coordinate("Q1")
            .coordinate("Q2")
            .momentum("P1")
            .momentum("P2")
            .relation("P1", "Q1", "-i*hbar")
            .relation("P2", "Q2", "-i*hbar")
            .build()
            .expect("static table")
    })
}

/// Which `[π, λ]` normalisation to use for the `(π, λ)` table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiLambda {
    /// `[π_k, λ_k] = -(i/2)ħ λ_k`.
    Half,
    /// `[π_k, λ_k] = -iħ λ_k`, the bracket of `π = -iλ∂_λ`.
    Full,
}

pub fn a2_pi_lambda(v: PiLambda) -> Arc<GeneratorTable> {
    cached(format!("a2_pi_lambda_{v:?}"), || {
        let r = match v {
            PiLambda::Half => "-i/2*hbar",
            PiLambda::Full => "-i*hbar",
        };
        TableBuilder::new(&format!("a2_pi_lambda_{v:?}"))
            .coordinate("lam1")
            .coordinate("lam2")
            .momentum("pi1")
            .momentum("pi2")
            .relation("pi1", "lam1", &format!("{r}*lam1"))
            .relation("pi2", "lam2", &format!("{r}*lam2"))
            .build()
            .expect("static table")
    })
}

/// Coordinates `x_k` with derivations `d_k`, `[d_k, x_k] = 1`, plus a central `C`.
pub fn derivation_table(coords: &[&str]) -> Arc<GeneratorTable> {
    cached(format!("derivations_{}", coords.join("_")), || {
        let mut b = TableBuilder::new("derivations");
        for c in coords {
            b = b.coordinate(c);
        }
        b = b.coordinate("C");
        for c in coords {
            b = b.momentum(&format!("d_{c}"));
        }
        for c in coords {
            b = b.relation(&format!("d_{c}"), c, "1");
        }
        b.build().expect("derivation table")
    })
}

/// Operator forms as stated for the A₁ and A₂ systems (`ħ = 1`).
pub mod forms {
    /// Right-p̂ ordered Hamiltonian.
    pub const A1_H_RIGHT: &str = "1/2*(q^2*p^2 - i*q*p + q^2)";
    /// Hamiltonian from `P ↦ qp`, as a word.
    pub const A1_H_WORD_RIGHT: &str = "1/2*(q*p*q*p + q^2)";
    /// Hamiltonian from `P ↦ pq`, as a word.
    pub const A1_H_WORD_LEFT: &str = "1/2*(p*q*p*q + q^2)";
    /// Weyl-ordered Hamiltonian.
    pub const A1_H_WEYL: &str = "1/8*(q^2*p^2 + 2*p*q^2*p + p^2*q^2) + 1/2*q^2";
    /// Symmetric form of `p²q²`.
    pub const A1_P2Q2_SYMMETRIC: &str = "1/4*(q^2*p^2 + 2*p*q^2*p + p^2*q^2)";
    /// `½(P² + e^{2Q})` in the exponential chart.
    pub const A1_H_EXP: &str = "1/2*(P^2 + E^2)";
    /// Deformed Hamiltonian `½(qⁿpqⁿp + q²)` over the canonical pair.
    pub fn a1_h_deformed(n: i32) -> String {
        format!("1/2*(q^{n}*p*q^{n}*p + q^2)")
    }

    pub const A2_H_XI: &str = "pxi^2 - pxi*peta + peta^2 + X^2 + Y^2";
    /// One third of `tr L³` in the centre-of-mass chart.
    pub const A2_I_XI: &str = "peta^2*pxi - peta*pxi^2 - X^2*peta + Y^2*pxi";
    pub const A2_H_QP: &str = "1/4*((Q1*P1)^2 + (Q2*P2)^2 - (Q1*P1)*(Q2*P2)) + Q1^2 + Q2^2";
    pub const A2_I_QP: &str = "1/8*((Q2*P2)^2*(Q1*P1) - (Q2*P2)*(Q1*P1)^2) - 1/2*Q1^2*Q2*P2 + 1/2*Q2^2*Q1*P1";
    pub const A2_H_PI: &str = "pi1^2 - pi1*pi2 + pi2^2 + lam1^2 + lam2^2";
    pub const A2_I_PI: &str = "pi2^2*pi1 - pi2*pi1^2 - lam1^2*pi2 + lam2^2*pi1";
}

/// `p_ξ ↦ ½Q₁P₁`, `p_η ↦ ½Q₂P₂`, `e^{ξ/2} ↦ Q₁`, `e^{η/2} ↦ Q₂`.
pub fn a2_canonical_map() -> Result<Substitution, AlgebraError> {
    Substitution::new(&a2_xi(), &a2_qp())
        .map("pxi", "1/2*Q1*P1")?
        .map("peta", "1/2*Q2*P2")?
        .map("X", "Q1")?
        .map("Y", "Q2")
}

/// `π_k ↦ ½Q_kP_k`, `λ_k ↦ Q_k`.
pub fn a2_poisson_map(v: PiLambda) -> Result<Substitution, AlgebraError> {
    Substitution::new(&a2_pi_lambda(v), &a2_qp())
        .map("pi1", "1/2*Q1*P1")?
        .map("pi2", "1/2*Q2*P2")?
        .map("lam1", "Q1")?
        .map("lam2", "Q2")
}

/// `π_k ↦ -iλ_k∂_k`, `λ_k ↦ λ_k` into the derivation algebra.
pub fn a2_pi_realization(v: PiLambda) -> Result<Substitution, AlgebraError> {
    let d = derivation_table(&["lam1", "lam2"]);
    Substitution::new(&a2_pi_lambda(v), &d)
        .map("pi1", "-i*lam1*d_lam1")?
        .map("pi2", "-i*lam2*d_lam2")?
        .map("lam1", "lam1")?
        .map("lam2", "lam2")
}

/// `E ↦ q`, `P ↦ qp` (momentum on the right).
pub fn a1_right_map() -> Result<Substitution, AlgebraError> {
    Substitution::new(&a1_exp_chart(), &a1_canonical()).map("E", "q")?.map("P", "q*p")
}

/// `E ↦ q`, `P ↦ pq` (momentum on the left).
pub fn a1_left_map() -> Result<Substitution, AlgebraError> {
    Substitution::new(&a1_exp_chart(), &a1_canonical()).map("E", "q")?.map("P", "p*q")
}

/// Deformed pair from the canonical one: `q ↦ q`, `p ↦ qⁿp`.
pub fn a1_deformation_map(n: i32) -> Result<Substitution, AlgebraError> {
    Substitution::new(&a1_deformed(n), &a1_canonical()).map("q", "q")?.map("p", &format!("q^{n}*p"))
}

/// `u ↦ q^{1-n}/(1-n)`, `U ↦ qⁿp`; requires `n ≠ 1`.
pub fn a1_u_map(n: i32) -> Result<Substitution, AlgebraError> {
    if n == 1 {
        return Err(AlgebraError::InvalidTable("u-substitution needs n != 1".into()));
    }
    Substitution::new(&a1_u_chart(), &a1_canonical())
        .map("u", &format!("{}*q^{}", fmt_rational(&rat(1, (1 - n) as i64)), 1 - n))?
        .map("U", &format!("q^{n}*p"))
}
