use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::coeff::Coeff;
use super::table::{add_term, GeneratorTable, TermMap};
use super::AlgebraError;
use crate::exact::{real, GaussianRational, Rational};
use crate::expr::{self, ExprAlgebra};

/// Normal-ordered noncommutative polynomial over a [`GeneratorTable`].
#[derive(Clone)]
pub struct NCPoly {
    table: Arc<GeneratorTable>,
    terms: TermMap,
}

impl NCPoly {
    pub fn zero(table: &Arc<GeneratorTable>) -> Self {
        NCPoly { table: table.clone(), terms: TermMap::new() }
    }

    pub fn constant(table: &Arc<GeneratorTable>, c: Coeff) -> Self {
        let mut p = Self::zero(table);
        add_term(&mut p.terms, vec![0; table.len()], c);
        p
    }

    pub fn one(table: &Arc<GeneratorTable>) -> Self {
        Self::constant(table, Coeff::one())
    }

    pub fn generator(table: &Arc<GeneratorTable>, name: &str) -> Result<Self, AlgebraError> {
        let k = table.index_of(name)?;
        let mut m = vec![0; table.len()];
        m[k] = 1;
        Self::monomial(table, m, Coeff::one())
    }

    /// `c` times the normal-ordered monomial with exponent vector `m`.
    pub fn monomial(table: &Arc<GeneratorTable>, m: Vec<i32>, c: Coeff) -> Result<Self, AlgebraError> {
        if m.len() != table.len() {
            return Err(AlgebraError::InvalidTable(format!(
                "monomial has {} exponents, table has {} generators",
                m.len(),
                table.len()
            )));
        }
        table.check_exponents(&m)?;
        let mut p = Self::zero(table);
        add_term(&mut p.terms, m, c);
        Ok(p)
    }

    /// Parses an expression; products are taken in the written order and normal-ordered.
    pub fn parse(table: &Arc<GeneratorTable>, src: &str) -> Result<Self, AlgebraError> {
        expr::parse(src)?.eval(&Self::zero(table))
    }

    pub(crate) fn from_terms(table: &Arc<GeneratorTable>, terms: TermMap) -> Self {
        NCPoly { table: table.clone(), terms }
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    pub fn terms(&self) -> &TermMap {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &[i32]) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn same_table(&self, other: &NCPoly) -> bool {
        self.table.id() == other.table.id()
    }

    fn check(&self, other: &NCPoly) -> Result<(), AlgebraError> {
        if self.same_table(other) {
            Ok(())
        } else {
            Err(AlgebraError::TableMismatch(self.table.name().into(), other.table.name().into()))
        }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut p = Self::zero(&self.table);
        for (m, v) in &self.terms {
            add_term(&mut p.terms, m.clone(), v * c);
        }
        p
    }

    pub fn try_add(&self, other: &NCPoly) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut p = self.clone();
        for (m, c) in &other.terms {
            add_term(&mut p.terms, m.clone(), c.clone());
        }
        Ok(p)
    }

    pub fn try_sub(&self, other: &NCPoly) -> Result<Self, AlgebraError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &NCPoly) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(Self::from_terms(&self.table, self.table.mul_terms(&self.terms, &other.terms)))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(&self.table);
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// Inverse of a single term whose letters are all Laurent generators.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        if self.terms.len() != 1 {
            return Err(AlgebraError::NotInvertible(self.render()));
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let inv = c.inverse().ok_or_else(|| AlgebraError::NotInvertible(self.render()))?;
        for (k, &e) in m.iter().enumerate() {
            if e != 0 && !self.table.generators()[k].laurent {
                return Err(AlgebraError::NotInvertible(self.render()));
            }
        }
        // Laurent letters commute with everything before them, so reversing the word is free.
        let neg: Vec<i32> = m.iter().map(|e| -e).collect();
        Self::monomial(&self.table, neg, inv)
    }

    /// Part of the polynomial at order `ħ^k`, as an `ħ`-free polynomial.
    pub fn hbar_order(&self, k: usize) -> Self {
        let mut p = Self::zero(&self.table);
        for (m, c) in &self.terms {
            add_term(&mut p.terms, m.clone(), Coeff::scalar(c.order(k)));
        }
        p
    }

    pub fn max_hbar_order(&self) -> Option<usize> {
        self.terms.values().filter_map(Coeff::max_order).max()
    }

    /// Sets `ħ` to a rational value.
    pub fn specialize_hbar(&self, h: &Rational) -> Self {
        let mut p = Self::zero(&self.table);
        for (m, c) in &self.terms {
            add_term(&mut p.terms, m.clone(), Coeff::scalar(c.specialize(h)));
        }
        p
    }

    /// Canonical text form: descending total degree, then descending exponent vector.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let names = self.table.names();
        let mut keys: Vec<&Vec<i32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: i32 = a.iter().sum();
            let db: i32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let parts: Vec<String> = keys
            .into_iter()
            .map(|m| {
                let c = self.terms[m].to_string();
                let mono = crate::poly::render_monomial(m, &names);
                match (mono.is_empty(), c.as_str()) {
                    (true, _) => c,
                    (false, "1") => mono,
                    (false, "-1") => format!("-{mono}"),
                    _ => format!("{c}*{mono}"),
                }
            })
            .collect();
        parts.join(" + ").replace("+ -", "- ")
    }

    /// Scalar multiple by a Gaussian rational.
    pub fn scale_gauss(&self, c: GaussianRational) -> Self {
        self.scale(&Coeff::scalar(c))
    }

    pub fn scale_rational(&self, r: Rational) -> Self {
        self.scale_gauss(real(r))
    }
}

impl PartialEq for NCPoly {
    fn eq(&self, other: &Self) -> bool {
        self.same_table(other) && self.terms == other.terms
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NCPoly[{}]({})", self.table.name(), self.render())
    }
}

// Operator forms panic on a table mismatch; the `try_*` methods report it.
impl Add<&NCPoly> for &NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        self.try_add(rhs).expect("NCPoly addition")
    }
}

impl Sub<&NCPoly> for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        self.try_sub(rhs).expect("NCPoly subtraction")
    }
}

impl Mul<&NCPoly> for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        self.try_mul(rhs).expect("NCPoly product")
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.scale(&-Coeff::one())
    }
}

impl ExprAlgebra for NCPoly {
    type Error = AlgebraError;

    fn number(&self, r: &Rational) -> Result<Self, AlgebraError> {
        Ok(Self::constant(&self.table, Coeff::rational(r.clone())))
    }

    fn imaginary_unit(&self) -> Result<Self, AlgebraError> {
        Ok(Self::constant(&self.table, Coeff::imaginary_unit()))
    }

    fn hbar(&self) -> Result<Self, AlgebraError> {
        Ok(Self::constant(&self.table, Coeff::hbar()))
    }

    fn symbol(&self, name: &str) -> Result<Self, AlgebraError> {
        Self::generator(&self.table, name)
    }

    fn add(self, rhs: Self) -> Result<Self, AlgebraError> {
        self.try_add(&rhs)
    }

    fn mul(self, rhs: Self) -> Result<Self, AlgebraError> {
        self.try_mul(&rhs)
    }

    fn neg(self) -> Result<Self, AlgebraError> {
        Ok(-&self)
    }

    fn powi(self, k: i32) -> Result<Self, AlgebraError> {
        if k < 0 {
            Ok(self.inverse()?.pow(k.unsigned_abs()))
        } else {
            Ok(self.pow(k as u32))
        }
    }
}
