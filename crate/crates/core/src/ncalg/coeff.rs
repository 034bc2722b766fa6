use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::exact::{real, GaussianRational, Rational};

/// Finite sum `Σ c_k ħ^k` with Gaussian-rational `c_k`. Stored without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Coeff {
    orders: Vec<GaussianRational>,
}

impl Coeff {
    pub fn scalar(c: GaussianRational) -> Self {
        let mut k = Coeff { orders: vec![c] };
        k.trim();
        k
    }

    pub fn rational(r: Rational) -> Self {
        Self::scalar(real(r))
    }

    pub fn imaginary_unit() -> Self {
        Self::scalar(GaussianRational::i())
    }

    pub fn hbar() -> Self {
        Coeff { orders: vec![GaussianRational::zero(), GaussianRational::one()] }
    }

    pub fn from_orders(orders: Vec<GaussianRational>) -> Self {
        let mut k = Coeff { orders };
        k.trim();
        k
    }

    fn trim(&mut self) {
        while self.orders.last().is_some_and(|c| c.is_zero()) {
            self.orders.pop();
        }
    }

    /// Coefficient of `ħ^k`.
    pub fn order(&self, k: usize) -> GaussianRational {
        self.orders.get(k).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Highest `ħ` power present (`None` for zero).
    pub fn max_order(&self) -> Option<usize> {
        self.orders.len().checked_sub(1)
    }

    pub fn orders(&self) -> &[GaussianRational] {
        &self.orders
    }

    /// Evaluates at a rational value of `ħ`.
    pub fn specialize(&self, h: &Rational) -> GaussianRational {
        let h = real(h.clone());
        let mut acc = GaussianRational::zero();
        for c in self.orders.iter().rev() {
            acc = acc * h.clone() + c.clone();
        }
        acc
    }

    /// Multiplicative inverse when the coefficient is a nonzero `ħ`-free scalar.
    pub fn inverse(&self) -> Option<Coeff> {
        if self.orders.len() != 1 {
            return None;
        }
        Some(Coeff::scalar(GaussianRational::one() / self.orders[0].clone()))
    }

    pub fn conj(&self) -> Coeff {
        Coeff::from_orders(self.orders.iter().map(|c| c.conj()).collect())
    }
}

impl Zero for Coeff {
    fn zero() -> Self {
        Coeff { orders: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.orders.is_empty()
    }
}

impl One for Coeff {
    fn one() -> Self {
        Coeff { orders: vec![GaussianRational::one()] }
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, rhs: Coeff) -> Coeff {
        &self + &rhs
    }
}

impl Add<&Coeff> for &Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        let n = self.orders.len().max(rhs.orders.len());
        Coeff::from_orders((0..n).map(|k| self.order(k) + rhs.order(k)).collect())
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, rhs: Coeff) -> Coeff {
        &self + &(-&rhs)
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { orders: self.orders.iter().map(|c| -c.clone()).collect() }
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, rhs: Coeff) -> Coeff {
        &self * &rhs
    }
}

impl Mul<&Coeff> for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        if self.orders.is_empty() || rhs.orders.is_empty() {
            return Coeff::zero();
        }
        let mut out = vec![GaussianRational::zero(); self.orders.len() + rhs.orders.len() - 1];
        for (i, a) in self.orders.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.orders.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Coeff::from_orders(out)
    }
}

impl fmt::Display for Coeff {
    /// Parseable form: `3/2`, `-i/2`, `hbar^2`, `(1 - i*hbar)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.orders.iter().enumerate() {
            let h = match k {
                0 => None,
                1 => Some("hbar".to_string()),
                _ => Some(format!("hbar^{k}")),
            };
            if !c.re.is_zero() {
                parts.push(fmt_part(&c.re, None, h.clone()));
            }
            if !c.im.is_zero() {
                parts.push(fmt_part(&c.im, Some("i"), h));
            }
        }
        match parts.len() {
            0 => write!(f, "0"),
            1 => write!(f, "{}", parts[0]),
            _ => write!(f, "({})", parts.join(" + ").replace("+ -", "- ")),
        }
    }
}

fn fmt_part(r: &Rational, unit: Option<&str>, h: Option<String>) -> String {
    let factors: Vec<String> = unit.map(str::to_string).into_iter().chain(h).collect();
    let sign = if r.is_negative() { "-" } else { "" };
    let num = r.numer().abs();
    let mut body = Vec::new();
    if !num.is_one() || factors.is_empty() {
        body.push(num.to_string());
    }
    body.extend(factors);
    let den = r.denom();
    if den.is_one() {
        format!("{sign}{}", body.join("*"))
    } else {
        format!("{sign}{}/{den}", body.join("*"))
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{imag, int, rat};

    #[test]
    fn graded_arithmetic() {
        let h = Coeff::hbar();
        let i = Coeff::imaginary_unit();
        let x = &(&i * &h) + &Coeff::one();
        let sq = &x * &x;
        assert_eq!(sq.order(0), real(int(1)));
        assert_eq!(sq.order(1), imag(int(2)));
        assert_eq!(sq.order(2), real(int(-1)));
        assert_eq!(sq.specialize(&int(1)), imag(int(2)));
        assert!((&x + &(-&x)).is_zero());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Coeff::rational(rat(-3, 2)).to_string(), "-3/2");
        let mixed = &Coeff::one() + &(&Coeff::scalar(imag(int(-1))) * &Coeff::hbar());
        assert_eq!(mixed.to_string(), "(1 - i*hbar)");
        assert_eq!((&Coeff::hbar() * &Coeff::hbar()).to_string(), "hbar^2");
        assert_eq!(Coeff::scalar(imag(rat(-1, 2))).to_string(), "-i/2");
        assert_eq!(Coeff::scalar(imag(rat(3, 2))).to_string(), "3*i/2");
    }

    #[test]
    fn inverse_only_for_scalars() {
        assert_eq!(Coeff::imaginary_unit().inverse(), Some(Coeff::scalar(imag(int(-1)))));
        assert!(Coeff::hbar().inverse().is_none());
        assert!(Coeff::zero().inverse().is_none());
    }
}
