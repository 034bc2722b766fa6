use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use super::coeff::Coeff;
use super::AlgebraError;
use crate::exact::Rational;
use crate::expr::{self, ExprAlgebra};

/// Normal-ordered monomial → coefficient.
pub type TermMap = BTreeMap<Vec<i32>, Coeff>;

pub(crate) fn add_term(map: &mut TermMap, m: Vec<i32>, c: Coeff) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&m) {
        Some(v) => {
            let s = &*v + &c;
            if s.is_zero() {
                map.remove(&m);
            } else {
                *v = s;
            }
        }
        None => {
            map.insert(m, c);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Coordinate,
    Momentum,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub kind: GenKind,
    pub laurent: bool,
}

/// Ordered generators plus swap rules `x_i x_j = x_j x_i + R_ij` for `i > j`.
///
/// Coordinates precede momenta in the order. Tables are immutable once built;
/// products of monomials are memoised internally.
pub struct GeneratorTable {
    id: u64,
    name: String,
    gens: Vec<Generator>,
    rel: HashMap<(usize, usize), TermMap>,
    cache: Mutex<HashMap<(Vec<i32>, Vec<i32>), Arc<TermMap>>>,
}

impl std::fmt::Debug for GeneratorTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeneratorTable").field("name", &self.name).field("gens", &self.gens).finish()
    }
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Default)]
pub struct TableBuilder {
    name: String,
    gens: Vec<Generator>,
    rels: Vec<(String, String, String)>,
}

impl TableBuilder {
    pub fn new(name: &str) -> Self {
        TableBuilder { name: name.into(), ..Default::default() }
    }

    pub fn coordinate(mut self, name: &str) -> Self {
        self.gens.push(Generator { name: name.into(), kind: GenKind::Coordinate, laurent: false });
        self
    }

    /// A coordinate that may carry negative exponents.
    pub fn laurent_coordinate(mut self, name: &str) -> Self {
        self.gens.push(Generator { name: name.into(), kind: GenKind::Coordinate, laurent: true });
        self
    }

    pub fn momentum(mut self, name: &str) -> Self {
        self.gens.push(Generator { name: name.into(), kind: GenKind::Momentum, laurent: false });
        self
    }

    /// Declares `[a, b] = rhs`; `rhs` is read as a normal-ordered expression in the
    /// generators, `i` and `hbar`. Undeclared pairs commute.
    pub fn relation(mut self, a: &str, b: &str, rhs: &str) -> Self {
        self.rels.push((a.into(), b.into(), rhs.into()));
        self
    }

    pub fn build(self) -> Result<Arc<GeneratorTable>, AlgebraError> {
        let mut gens: Vec<Generator> = self.gens.iter().filter(|g| g.kind == GenKind::Coordinate).cloned().collect();
        gens.extend(self.gens.iter().filter(|g| g.kind == GenKind::Momentum).cloned());
        for (k, g) in gens.iter().enumerate() {
            if gens[..k].iter().any(|h| h.name == g.name) {
                return Err(AlgebraError::InvalidTable(format!("duplicate generator {}", g.name)));
            }
            if matches!(g.name.as_str(), "i" | "hbar") {
                return Err(AlgebraError::InvalidTable(format!("reserved name {}", g.name)));
            }
        }
        let names: Vec<String> = gens.iter().map(|g| g.name.clone()).collect();
        let index = |s: &str| names.iter().position(|n| n == s).ok_or_else(|| AlgebraError::UnknownGenerator(s.into()));
        let mut rel: HashMap<(usize, usize), TermMap> = HashMap::new();
        for (a, b, rhs) in &self.rels {
            let (ia, ib) = (index(a)?, index(b)?);
            if ia == ib {
                return Err(AlgebraError::InvalidTable(format!("self-commutator of {a}")));
            }
            let parsed = expr::parse(rhs)?;
            let raw = parsed.eval(&Raw::ctx(&names))?;
            for m in raw.terms.keys() {
                for (k, &e) in m.iter().enumerate() {
                    if e < 0 && !gens[k].laurent {
                        return Err(AlgebraError::NegativeExponent(names[k].clone()));
                    }
                }
            }
            let (key, terms) = if ia > ib {
                ((ia, ib), raw.terms)
            } else {
                ((ib, ia), raw.terms.into_iter().map(|(m, c)| (m, -c)).collect())
            };
            if rel.contains_key(&key) {
                return Err(AlgebraError::InvalidTable(format!("relation [{a},{b}] declared twice")));
            }
            if !terms.is_empty() {
                rel.insert(key, terms);
            }
        }
        let table = GeneratorTable {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            name: self.name,
            gens,
            rel,
            cache: Mutex::new(HashMap::new()),
        };
        table.validate_laurent()?;
        Ok(Arc::new(table))
    }
}

impl GeneratorTable {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.gens.iter().map(|g| g.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, AlgebraError> {
        self.gens.iter().position(|g| g.name == name).ok_or_else(|| AlgebraError::UnknownGenerator(name.into()))
    }

    /// `R_ij` for `i > j`, or `None` when the pair commutes.
    pub fn relation(&self, i: usize, j: usize) -> Option<&TermMap> {
        assert!(i > j, "relation key must have i > j");
        self.rel.get(&(i, j))
    }

    pub fn commutes(&self, a: usize, b: usize) -> bool {
        a == b || !self.rel.contains_key(&(a.max(b), a.min(b)))
    }

    /// Laurent generators must commute with every earlier generator, and every
    /// remainder term they meet must commute with them; this keeps rewriting
    /// with inverses inside the declared rules.
    fn validate_laurent(&self) -> Result<(), AlgebraError> {
        for (a, g) in self.gens.iter().enumerate() {
            if !g.laurent {
                continue;
            }
            if let Some(j) = (0..a).find(|&j| !self.commutes(a, j)) {
                return Err(AlgebraError::InvalidTable(format!(
                    "Laurent generator {} must commute with {}",
                    g.name, self.gens[j].name
                )));
            }
            for i in a + 1..self.gens.len() {
                if let Some(r) = self.rel.get(&(i, a)) {
                    for m in r.keys() {
                        for (k, &e) in m.iter().enumerate() {
                            if e != 0 && !self.commutes(k, a) {
                                return Err(AlgebraError::InvalidTable(format!(
                                    "remainder of [{}, {}] contains {}, which does not commute with {}",
                                    self.gens[i].name, g.name, self.gens[k].name, g.name
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn check_exponents(&self, m: &[i32]) -> Result<(), AlgebraError> {
        for (k, &e) in m.iter().enumerate() {
            if e < 0 && !self.gens[k].laurent {
                return Err(AlgebraError::NegativeExponent(self.gens[k].name.clone()));
            }
        }
        Ok(())
    }

    /// Normal form of the product of two normal-ordered monomials.
    pub(crate) fn mul_mono(&self, a: &[i32], b: &[i32]) -> Arc<TermMap> {
        let n = self.gens.len();
        let last_a = (0..n).rev().find(|&i| a[i] != 0);
        let first_b = (0..n).find(|&j| b[j] != 0);
        let (i, j) = match (last_a, first_b) {
            (Some(i), Some(j)) if i > j => (i, j),
            // Already ordered; equal letters just add exponents.
            _ => {
                let m: Vec<i32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                return Arc::new(TermMap::from([(m, Coeff::one())]));
            }
        };
        let key = (a.to_vec(), b.to_vec());
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return hit.clone();
        }
        let result = if self.commutes(i, j) {
            let mut a1 = a.to_vec();
            let e = std::mem::take(&mut a1[i]);
            let mut b1 = b.to_vec();
            let f = std::mem::take(&mut b1[j]);
            let left = self.mul_mono(&a1, &unit(n, j, f));
            let right = self.mul_mono(&unit(n, i, e), &b1);
            self.mul_terms(&left, &right)
        } else {
            let sigma = a[i].signum();
            let tau = b[j].signum();
            let mut a1 = a.to_vec();
            a1[i] -= sigma;
            let mut b1 = b.to_vec();
            b1[j] -= tau;
            let mut swapped = vec![0; n];
            swapped[i] = sigma;
            swapped[j] = tau;
            let mut mid = TermMap::new();
            add_term(&mut mid, swapped, Coeff::one());
            for (m, c) in self.swap_remainder(i, sigma, j, tau) {
                add_term(&mut mid, m, c);
            }
            let left = self.mul_terms(&TermMap::from([(a1, Coeff::one())]), &mid);
            self.mul_terms(&left, &TermMap::from([(b1, Coeff::one())]))
        };
        let result = Arc::new(result);
        self.cache.lock().expect("cache lock").insert(key, result.clone());
        result
    }

    /// `S` in `x_i^σ x_j^τ = x_j^τ x_i^σ + S` for a non-commuting pair `i > j`.
    fn swap_remainder(&self, i: usize, sigma: i32, j: usize, tau: i32) -> TermMap {
        let r = &self.rel[&(i, j)];
        // A Laurent x_i commutes with all earlier letters, so σ = -1 never reaches here.
        assert_eq!(sigma, 1, "inverse of a non-commuting later generator");
        if tau == 1 {
            return r.clone();
        }
        // x_i x_j^-1 = x_j^-1 x_i - x_j^-2 R, valid since R commutes with x_j.
        r.iter()
            .map(|(m, c)| {
                let mut m = m.clone();
                m[j] -= 2;
                (m, -c)
            })
            .collect()
    }

    pub(crate) fn mul_terms(&self, x: &TermMap, y: &TermMap) -> TermMap {
        let mut out = TermMap::new();
        for (mx, cx) in x {
            for (my, cy) in y {
                let c = cx * cy;
                for (m, k) in self.mul_mono(mx, my).iter() {
                    add_term(&mut out, m.clone(), &c * k);
                }
            }
        }
        out
    }
}

fn unit(n: usize, i: usize, e: i32) -> Vec<i32> {
    let mut m = vec![0; n];
    m[i] = e;
    m
}

/// Commutative reading of a relation right side during table construction.
struct Raw<'a> {
    names: &'a [String],
    terms: TermMap,
}

impl<'a> Raw<'a> {
    fn ctx(names: &'a [String]) -> Self {
        Raw { names, terms: TermMap::new() }
    }

    fn constant(&self, c: Coeff) -> Self {
        let mut terms = TermMap::new();
        add_term(&mut terms, vec![0; self.names.len()], c);
        Raw { names: self.names, terms }
    }
}

impl ExprAlgebra for Raw<'_> {
    type Error = AlgebraError;

    fn number(&self, r: &Rational) -> Result<Self, AlgebraError> {
        Ok(self.constant(Coeff::rational(r.clone())))
    }

    fn imaginary_unit(&self) -> Result<Self, AlgebraError> {
        Ok(self.constant(Coeff::imaginary_unit()))
    }

    fn hbar(&self) -> Result<Self, AlgebraError> {
        Ok(self.constant(Coeff::hbar()))
    }

    fn symbol(&self, name: &str) -> Result<Self, AlgebraError> {
        let k = self.names.iter().position(|n| n == name).ok_or_else(|| AlgebraError::UnknownGenerator(name.into()))?;
        let mut terms = TermMap::new();
        add_term(&mut terms, unit(self.names.len(), k, 1), Coeff::one());
        Ok(Raw { names: self.names, terms })
    }

    fn add(mut self, rhs: Self) -> Result<Self, AlgebraError> {
        for (m, c) in rhs.terms {
            add_term(&mut self.terms, m, c);
        }
        Ok(self)
    }

    fn mul(self, rhs: Self) -> Result<Self, AlgebraError> {
        let mut terms = TermMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let m = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                add_term(&mut terms, m, c1 * c2);
            }
        }
        Ok(Raw { names: self.names, terms })
    }

    fn neg(self) -> Result<Self, AlgebraError> {
        let terms = self.terms.into_iter().map(|(m, c)| (m, -c)).collect();
        Ok(Raw { names: self.names, terms })
    }

    fn powi(self, k: i32) -> Result<Self, AlgebraError> {
        if k < 0 {
            if self.terms.len() != 1 {
                return Err(AlgebraError::NotInvertible("sum in relation".into()));
            }
            let (m, c) = self.terms.into_iter().next().unwrap();
            let inv = c.inverse().ok_or_else(|| AlgebraError::NotInvertible(c.to_string()))?;
            let base = Raw { names: self.names, terms: TermMap::from([(m.iter().map(|e| -e).collect(), inv)]) };
            return base.powi(-k);
        }
        let mut acc = self.constant(Coeff::one());
        for _ in 0..k {
            acc = acc.mul(Raw { names: self.names, terms: self.terms.clone() })?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_are_ordered_first() {
        let t = TableBuilder::new("t").momentum("p").coordinate("q").relation("p", "q", "-i*hbar").build().unwrap();
        assert_eq!(t.names(), vec!["q", "p"]);
        assert!(t.relation(1, 0).is_some());
        assert!(!t.commutes(0, 1));
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(TableBuilder::new("t").coordinate("q").coordinate("q").build().is_err());
        assert!(TableBuilder::new("t").coordinate("q").relation("q", "q", "1").build().is_err());
        assert!(TableBuilder::new("t").coordinate("q").relation("q", "z", "1").build().is_err());
        assert!(TableBuilder::new("t").coordinate("q").momentum("p").relation("p", "q", "q^-1").build().is_err());
        // A Laurent generator may not follow a generator it fails to commute with.
        assert!(TableBuilder::new("t")
            .coordinate("a")
            .laurent_coordinate("b")
            .relation("b", "a", "a")
            .build()
            .is_err());
    }

    #[test]
    fn single_swap() {
        let t = TableBuilder::new("t").coordinate("q").momentum("p").relation("p", "q", "-i*hbar").build().unwrap();
        let r = t.mul_mono(&[0, 1], &[1, 0]);
        assert_eq!(r.len(), 2);
        assert_eq!(r[&vec![1, 1]], Coeff::one());
        assert_eq!(r[&vec![0, 0]], -(&Coeff::imaginary_unit() * &Coeff::hbar()));
    }
}
