//! Exact rational and Gaussian-rational numbers.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// `a + b i` with `a, b` exact rationals.
pub type GaussianRational = Complex<BigRational>;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn real(r: Rational) -> GaussianRational {
    Complex::new(r, Rational::zero())
}

pub fn imag(r: Rational) -> GaussianRational {
    Complex::new(Rational::zero(), r)
}

pub fn gauss(re: Rational, im: Rational) -> GaussianRational {
    Complex::new(re, im)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renders `p/q` (or `p` for integers).
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders a Gaussian rational, e.g. `3/2`, `-i/2`, `(1+2i)`.
pub fn fmt_gaussian(z: &GaussianRational) -> String {
    let re_zero = z.re.is_zero();
    let im_zero = z.im.is_zero();
    match (re_zero, im_zero) {
        (_, true) => fmt_rational(&z.re),
        (true, false) => fmt_imag(&z.im),
        (false, false) => {
            let im = fmt_imag(&z.im.abs());
            let sign = if z.im.is_negative() { "-" } else { "+" };
            format!("({}{}{})", fmt_rational(&z.re), sign, im)
        }
    }
}

fn fmt_imag(im: &Rational) -> String {
    let sign = if im.is_negative() { "-" } else { "" };
    let a = im.abs();
    if a.is_one() {
        format!("{sign}i")
    } else if a.is_integer() {
        format!("{sign}{}i", a.numer())
    } else if a.numer().is_one() {
        format!("{sign}i/{}", a.denom())
    } else {
        format!("{sign}{}i/{}", a.numer(), a.denom())
    }
}

/// Parses `p`, `p/q` or a decimal literal such as `0.25`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        let ip: BigInt = if ip.is_empty() { BigInt::zero() } else { ip.parse().ok()? };
        if !fp.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let fpv: BigInt = if fp.is_empty() { BigInt::zero() } else { fp.parse().ok()? };
        let v = Rational::new(ip * &scale + fpv, scale);
        return Some(if neg { -v } else { v });
    }
    let p: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_gaussian_forms() {
        assert_eq!(fmt_gaussian(&real(rat(3, 2))), "3/2");
        assert_eq!(fmt_gaussian(&imag(rat(-1, 2))), "-i/2");
        assert_eq!(fmt_gaussian(&imag(int(-1))), "-i");
        assert_eq!(fmt_gaussian(&gauss(int(1), int(2))), "(1+2i)");
        assert_eq!(fmt_gaussian(&gauss(rat(1, 3), rat(-3, 4))), "(1/3-3i/4)");
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("-3/4"), Some(rat(-3, 4)));
        assert_eq!(parse_rational("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
