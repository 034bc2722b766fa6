//! Sparse commutative (Laurent) polynomials over an exact or floating coefficient ring.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Num, Zero};

/// Exponent vector; negative entries are allowed (Laurent monomials).
pub type Exponents = Vec<i32>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<C> {
    nvars: usize,
    terms: BTreeMap<Exponents, C>,
}

impl<C: Clone + Num> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, unit(nvars, i, 1), C::one())
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: C) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut p = Self::zero(nvars);
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[i32]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    /// Adds `c·x^exps`, dropping the term if it cancels.
    pub fn add_term(&mut self, exps: Exponents, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v.clone() * c.clone());
        }
        p
    }

    /// Total degree of the highest term (`None` for the zero polynomial).
    pub fn degree(&self) -> Option<i32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            p.add_term(e2, c.clone() * from_i32::<C>(k));
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(self.nvars);
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// Evaluates at a point, mapping coefficients into the value ring.
    pub fn eval<T>(&self, point: &[T], coef: impl Fn(&C) -> T) -> T
    where
        T: Clone + Num,
    {
        assert_eq!(point.len(), self.nvars);
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut t = coef(c);
            for (x, &k) in point.iter().zip(e) {
                t = t * int_pow(x, k);
            }
            acc = acc + t;
        }
        acc
    }

    /// Substitutes `x_i ↦ images[i]` (nonnegative exponents only).
    pub fn compose(&self, images: &[Poly<C>]) -> Self {
        assert_eq!(images.len(), self.nvars);
        let out_vars = images.first().map_or(0, |p| p.nvars);
        let mut acc = Self::zero(out_vars);
        for (e, c) in &self.terms {
            let mut t = Self::constant(out_vars, c.clone());
            for (img, &k) in images.iter().zip(e) {
                assert!(k >= 0, "compose with negative exponent");
                t = &t * &img.pow(k as u32);
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn map_coefficients<D: Clone + Num>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut p = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            p.add_term(e.clone(), f(c));
        }
        p
    }

    /// Renders with the given variable names and coefficient formatter; terms in
    /// descending total degree, then lexicographic exponent order.
    pub fn render(&self, names: &[String], fmt_c: impl Fn(&C) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut keys: Vec<&Exponents> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: i32 = a.iter().sum();
            let db: i32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let parts: Vec<String> = keys
            .into_iter()
            .map(|e| {
                let c = fmt_c(&self.terms[e]);
                let mono = render_monomial(e, names);
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
}

pub(crate) fn render_monomial(e: &[i32], names: &[String]) -> String {
    e.iter()
        .enumerate()
        .filter(|(_, &k)| k != 0)
        .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
        .collect::<Vec<_>>()
        .join("*")
}

pub(crate) fn unit(nvars: usize, i: usize, k: i32) -> Exponents {
    let mut e = vec![0; nvars];
    e[i] = k;
    e
}

fn from_i32<C: Num>(k: i32) -> C {
    let mut acc = C::zero();
    let one = || C::one();
    for _ in 0..k.unsigned_abs() {
        acc = acc + one();
    }
    if k < 0 {
        C::zero() - acc
    } else {
        acc
    }
}

fn int_pow<T: Clone + Num>(x: &T, k: i32) -> T {
    let mut r = T::one();
    for _ in 0..k.unsigned_abs() {
        r = r * x.clone();
    }
    if k < 0 {
        T::one() / r
    } else {
        r
    }
}

impl<'a, C: Clone + Num> Add<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &'a Poly<C>) -> Poly<C> {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl<'a, C: Clone + Num> Sub<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &'a Poly<C>) -> Poly<C> {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), C::zero() - c.clone());
        }
        p
    }
}

impl<'a, C: Clone + Num> Mul<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &'a Poly<C>) -> Poly<C> {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        let mut p = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1.clone() * c2.clone());
            }
        }
        p
    }
}

impl<C: Clone + Num> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        let mut p = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            p.add_term(e.clone(), C::zero() - c.clone());
        }
        p
    }
}

impl<C: fmt::Debug> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<C: Clone + Num> Zero for Poly<C> {
    fn zero() -> Self {
        Poly::zero(0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Clone + Num> Add for Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: Poly<C>) -> Poly<C> {
        // `Zero::zero()` has no variables; let it adopt the other operand's ring.
        if self.nvars == 0 && self.terms.is_empty() {
            return rhs;
        }
        if rhs.nvars == 0 && rhs.terms.is_empty() {
            return self;
        }
        &self + &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, Rational};

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn arithmetic_and_rendering() {
        let x = Poly::<Rational>::var(2, 0);
        let y = Poly::<Rational>::var(2, 1);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.render(&names(), crate::exact::fmt_rational), "x^2 - y^2");
        assert_eq!(p.derivative(0), x.scale(&int(2)));
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn laurent_terms_cancel_and_evaluate() {
        let x = Poly::<Rational>::var(1, 0);
        let xinv = Poly::monomial(1, vec![-1], int(1));
        let one = &x * &xinv;
        assert_eq!(one, Poly::one(1));
        let v = xinv.derivative(0).eval(&[rat(2, 1)], |c| c.clone());
        assert_eq!(v, rat(-1, 4));
    }

    #[test]
    fn compose_substitutes() {
        let x = Poly::<Rational>::var(2, 0);
        let y = Poly::<Rational>::var(2, 1);
        let p = &(&x * &x) + &y;
        let q = p.compose(&[&x + &y, x.clone()]);
        let want = &(&(&x * &x) + &(&(&x * &y).scale(&int(2)))) + &(&(&y * &y) + &x);
        assert_eq!(q, want);
    }
}
