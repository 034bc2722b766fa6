//! The gl(n) linear r-matrix bracket, its enveloping algebra and the Gutt star product.
//!
//! Coordinates `L_ij` are indexed row-major from zero: `a = i·n + j`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{FromPrimitive, Num, One, Signed, Zero};

use crate::exact::{fmt_rational, int, rat, Rational};
use crate::expr::{self, ExprAlgebra, ParseError};
use crate::linalg::Matrix;
use crate::ncalg::catalog::derivation_table;
use crate::ncalg::{commutator, quantize, Coeff, GeneratorTable, NCPoly, Prescription, TableBuilder};
use crate::poly::Poly;

/// Commutative polynomial in the `n²` coordinates `L_ij`.
pub type PolyFunction = Poly<Rational>;

/// Sparse antisymmetric structure constants `{x_a, x_b} = Σ_r c_ab^r x_r`.
#[derive(Clone, Debug)]
pub struct LieStructure {
    name: String,
    n: usize,
    brackets: BTreeMap<(usize, usize), Vec<(usize, Rational)>>,
    table: OnceLock<Arc<GeneratorTable>>,
    sym_cache: Arc<Mutex<HashMap<Vec<i32>, NCPoly>>>,
}

impl PartialEq for LieStructure {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.brackets == other.brackets
    }
}

fn rho(a: usize, b: usize) -> i64 {
    (b as i64 - a as i64).signum()
}

fn delta(a: usize, b: usize) -> i64 {
    (a == b) as i64
}

impl LieStructure {
    /// Builds from a dense constant function; entries must be antisymmetric.
    pub fn from_fn(name: &str, n: usize, c: impl Fn(usize, usize, usize) -> Rational) -> Self {
        let d = n * n;
        let mut brackets = BTreeMap::new();
        for a in 0..d {
            for b in 0..d {
                let terms: Vec<(usize, Rational)> =
                    (0..d).map(|r| (r, c(a, b, r))).filter(|(_, v)| !v.is_zero()).collect();
                if !terms.is_empty() {
                    brackets.insert((a, b), terms);
                }
            }
        }
        let s = LieStructure { name: name.into(), n, brackets, table: OnceLock::new(), sym_cache: Arc::default() };
        assert!(s.is_antisymmetric(), "structure constants must be antisymmetric");
        s
    }

    /// `2{L_ij, L_kl} = (ρ(j,i) + ρ(l,k))(δ_il L_kj − δ_jk L_il)` with `ρ(a,b) = sign(b − a)`.
    pub fn r_bracket(n: usize) -> Self {
        assert!(n >= 2, "gl(n) bracket needs n >= 2");
        Self::from_fn(&format!("r_gl{n}"), n, |a, b, r| {
            let (i, j, k, l) = (a / n, a % n, b / n, b % n);
            let w = rho(j, i) + rho(l, k);
            let mut v = 0;
            if r == k * n + j {
                v += w * delta(i, l);
            }
            if r == i * n + l {
                v -= w * delta(j, k);
            }
            rat(v, 2)
        })
    }

    /// Standard gl(n) bracket `{L_ij, L_kl} = δ_jk L_il − δ_il L_kj`.
    pub fn gl_standard(n: usize) -> Self {
        Self::from_fn(&format!("gl{n}"), n, |a, b, r| {
            let (i, j, k, l) = (a / n, a % n, b / n, b % n);
            let mut v = 0;
            if r == i * n + l {
                v += delta(j, k);
            }
            if r == k * n + j {
                v -= delta(i, l);
            }
            int(v)
        })
    }

    /// Copy with `c_ab^r` shifted by `delta` (and `c_ba^r` by `-delta`).
    pub fn perturbed(&self, a: usize, b: usize, r: usize, delta: Rational) -> Self {
        let mut s = self.clone();
        s.name = format!("{}_perturbed", self.name);
        s.table = OnceLock::new();
        s.sym_cache = Arc::default();
        for (key, d) in [((a, b), delta.clone()), ((b, a), -delta)] {
            let entry = s.brackets.entry(key).or_default();
            match entry.iter_mut().find(|(x, _)| *x == r) {
                Some((_, v)) => *v += d,
                None => entry.push((r, d)),
            }
            entry.retain(|(_, v)| !v.is_zero());
            entry.sort_by_key(|(x, _)| *x);
            if entry.is_empty() {
                s.brackets.remove(&key);
            }
        }
        s
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Matrix size `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Algebra dimension `n²`.
    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn bracket(&self, a: usize, b: usize) -> &[(usize, Rational)] {
        self.brackets.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn constant(&self, a: usize, b: usize, r: usize) -> Rational {
        self.bracket(a, b).iter().find(|(x, _)| *x == r).map(|(_, v)| v.clone()).unwrap_or_else(Rational::zero)
    }

    /// All ordered pairs with a nonzero bracket.
    pub fn nonzero_brackets(&self) -> impl Iterator<Item = (usize, usize, &[(usize, Rational)])> {
        self.brackets.iter().map(|(&(a, b), v)| (a, b, v.as_slice()))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.brackets.keys().all(|&(a, b)| {
            let mut lhs = self.bracket(a, b).to_vec();
            let mut rhs: Vec<(usize, Rational)> = self.bracket(b, a).iter().map(|(r, v)| (*r, -v.clone())).collect();
            lhs.sort_by_key(|x| x.0);
            rhs.sort_by_key(|x| x.0);
            lhs == rhs
        })
    }

    /// `i,j,k,l,r,s,value` rows (1-based indices), one per nonzero constant.
    pub fn to_csv(&self) -> String {
        let n = self.n;
        let mut out = String::from("i,j,k,l,r,s,value\n");
        for (a, b, terms) in self.nonzero_brackets() {
            for (r, v) in terms {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    a / n + 1,
                    a % n + 1,
                    b / n + 1,
                    b % n + 1,
                    r / n + 1,
                    r % n + 1,
                    fmt_rational(v)
                );
            }
        }
        out
    }

    pub fn generator_name(&self, a: usize) -> String {
        format!("L{}_{}", a / self.n + 1, a % self.n + 1)
    }

    pub fn coordinate_names(&self) -> Vec<String> {
        (0..self.dim()).map(|a| self.generator_name(a)).collect()
    }

    /// Enveloping algebra with `[x_a, x_b] = ħ{x_a, x_b}`, generators in coordinate order.
    pub fn enveloping_table(&self) -> Arc<GeneratorTable> {
        self.table
            .get_or_init(|| {
                let d = self.dim();
                let mut b = TableBuilder::new(&format!("U({})", self.name));
                for a in 0..d {
                    b = b.coordinate(&self.generator_name(a));
                }
                for (x, y, terms) in self.nonzero_brackets() {
                    if x <= y {
                        continue;
                    }
                    let body: Vec<String> =
                        terms.iter().map(|(r, v)| format!("{}*{}", fmt_rational(v), self.generator_name(*r))).collect();
                    let rhs = format!("hbar*({})", body.join(" + "));
                    b = b.relation(&self.generator_name(x), &self.generator_name(y), &rhs);
                }
                b.build().expect("enveloping algebra table")
            })
            .clone()
    }

    fn sym_monomial(&self, m: &[i32]) -> NCPoly {
        if let Some(p) = self.sym_cache.lock().expect("sym cache").get(m) {
            return p.clone();
        }
        let mono = Poly::monomial(self.dim(), m.to_vec(), Rational::one());
        let p = quantize(&mono, Prescription::Weyl, &self.enveloping_table()).expect("symmetrisation");
        self.sym_cache.lock().expect("sym cache").insert(m.to_vec(), p.clone());
        p
    }

    /// Full symmetrisation of an `ħ`-series into the enveloping algebra.
    pub fn sym(&self, f: &StarResult) -> NCPoly {
        let t = self.enveloping_table();
        let mut acc = NCPoly::zero(&t);
        for (k, fk) in f.orders.iter().enumerate() {
            let h = hbar_power(k);
            for (m, c) in fk.terms() {
                acc = &acc + &self.sym_monomial(m).scale(&(&h * &Coeff::rational(c.clone())));
            }
        }
        acc
    }

    /// Inverse of [`Self::sym`]: peels off the top-degree PBW terms.
    pub fn sym_inverse(&self, u: &NCPoly) -> StarResult {
        let d = self.dim();
        let mut u = u.clone();
        let mut out: Vec<PolyFunction> = Vec::new();
        while !u.is_zero() {
            let deg = |m: &Vec<i32>| m.iter().sum::<i32>();
            let top = u.terms().keys().map(deg).max().expect("nonempty");
            let lead: Vec<(Vec<i32>, Coeff)> =
                u.terms().iter().filter(|(m, _)| deg(m) == top).map(|(m, c)| (m.clone(), c.clone())).collect();
            for (m, c) in lead {
                for (k, ck) in c.orders().iter().enumerate() {
                    assert!(ck.im.is_zero(), "enveloping algebra coefficients are real");
                    if out.len() <= k {
                        out.resize(k + 1, Poly::zero(d));
                    }
                    out[k].add_term(m.clone(), ck.re.clone());
                }
                u = &u - &self.sym_monomial(&m).scale(&c);
            }
        }
        StarResult::new(out)
    }
}

fn hbar_power(k: usize) -> Coeff {
    let mut v = vec![crate::exact::real(int(0)); k + 1];
    v[k] = crate::exact::real(int(1));
    Coeff::from_orders(v)
}

pub fn r_bracket_constants(n: usize) -> LieStructure {
    LieStructure::r_bracket(n)
}

/// Largest absolute coefficient of `Σ_cyc {x_a, {x_b, x_c}}` over all basis triples.
pub fn jacobi_residual(s: &LieStructure) -> Rational {
    let d = s.dim();
    let mut worst = Rational::zero();
    // {x_a, Σ_r c_bc^r x_r} = Σ_r c_bc^r Σ_t c_ar^t x_t
    let nested = |a: usize, b: usize, c: usize, acc: &mut Vec<Rational>| {
        for (r, v) in s.bracket(b, c) {
            for (t, w) in s.bracket(a, *r) {
                acc[*t] += v * w;
            }
        }
    };
    for a in 0..d {
        for b in a + 1..d {
            for c in b + 1..d {
                let mut acc = vec![Rational::zero(); d];
                nested(a, b, c, &mut acc);
                nested(b, c, a, &mut acc);
                nested(c, a, b, &mut acc);
                for v in acc {
                    if v.abs() > worst {
                        worst = v.abs();
                    }
                }
            }
        }
    }
    worst
}

/// The coordinate function `L_ij` (zero-based indices).
pub fn coordinate(s: &LieStructure, i: usize, j: usize) -> PolyFunction {
    Poly::var(s.dim(), s.index(i, j))
}

/// `tr Lᵏ` as a polynomial in the entries.
pub fn trace_power(n: usize, k: u32) -> PolyFunction {
    let d = n * n;
    let entry = |i: usize, j: usize| Poly::<Rational>::var(d, i * n + j);
    let mut power: Vec<Vec<PolyFunction>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Poly::one(d) } else { Poly::zero(d) }).collect()).collect();
    for _ in 0..k {
        power = (0..n)
            .map(|i| {
                (0..n).map(|j| (0..n).fold(Poly::zero(d), |acc, r| &acc + &(&power[i][r] * &entry(r, j)))).collect()
            })
            .collect();
    }
    (0..n).fold(Poly::zero(d), |acc, i| &acc + &power[i][i])
}

/// `{f, g} = Σ c_ab^r L_r ∂_a f ∂_b g`.
pub fn lie_poisson_bracket(f: &PolyFunction, g: &PolyFunction, s: &LieStructure) -> PolyFunction {
    let d = s.dim();
    assert_eq!(f.nvars(), d);
    assert_eq!(g.nvars(), d);
    let df: Vec<PolyFunction> = (0..d).map(|a| f.derivative(a)).collect();
    let dg: Vec<PolyFunction> = (0..d).map(|b| g.derivative(b)).collect();
    let mut acc = Poly::zero(d);
    for (a, b, terms) in s.nonzero_brackets() {
        if df[a].is_zero() || dg[b].is_zero() {
            continue;
        }
        let lin = Poly::from_terms(
            d,
            terms.iter().map(|(r, v)| {
                let mut m = vec![0; d];
                m[*r] = 1;
                (m, v.clone())
            }),
        );
        acc = &acc + &(&(&df[a] * &dg[b]) * &lin);
    }
    acc
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FunctionParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("unknown coordinate {0}")]
    UnknownSymbol(String),
    #[error("{0} is not allowed in a classical function")]
    Unsupported(&'static str),
}

struct Parsed<'a> {
    names: &'a [String],
    value: PolyFunction,
}

impl<'a> Parsed<'a> {
    fn with(&self, value: PolyFunction) -> Self {
        Parsed { names: self.names, value }
    }
}

impl ExprAlgebra for Parsed<'_> {
    type Error = FunctionParseError;

    fn number(&self, r: &Rational) -> Result<Self, FunctionParseError> {
        Ok(self.with(Poly::constant(self.names.len(), r.clone())))
    }

    fn imaginary_unit(&self) -> Result<Self, FunctionParseError> {
        Err(FunctionParseError::Unsupported("i"))
    }

    fn hbar(&self) -> Result<Self, FunctionParseError> {
        Err(FunctionParseError::Unsupported("hbar"))
    }

    fn symbol(&self, name: &str) -> Result<Self, FunctionParseError> {
        let k = self
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| FunctionParseError::UnknownSymbol(name.to_string()))?;
        Ok(self.with(Poly::var(self.names.len(), k)))
    }

    fn add(self, rhs: Self) -> Result<Self, FunctionParseError> {
        Ok(self.with(&self.value + &rhs.value))
    }

    fn mul(self, rhs: Self) -> Result<Self, FunctionParseError> {
        Ok(self.with(&self.value * &rhs.value))
    }

    fn neg(self) -> Result<Self, FunctionParseError> {
        Ok(self.with(-&self.value))
    }

    fn powi(self, k: i32) -> Result<Self, FunctionParseError> {
        if k < 0 {
            return Err(FunctionParseError::Unsupported("negative power"));
        }
        Ok(self.with(self.value.pow(k as u32)))
    }
}

/// Parses a polynomial in the coordinates `L{i}_{j}` (1-based), e.g. `L1_1^2 - 1/2*L1_2*L2_1`.
pub fn parse_function(s: &LieStructure, src: &str) -> Result<PolyFunction, FunctionParseError> {
    let names = s.coordinate_names();
    let ctx = Parsed { names: &names, value: Poly::zero(names.len()) };
    Ok(expr::parse(src)?.eval(&ctx)?.value)
}

pub fn render_function(s: &LieStructure, f: &PolyFunction) -> String {
    f.render(&s.coordinate_names(), fmt_rational)
}

/// Exact `ħ`-series `Σ ħᵏ f_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StarResult {
    orders: Vec<PolyFunction>,
}

impl StarResult {
    pub fn new(mut orders: Vec<PolyFunction>) -> Self {
        while orders.last().is_some_and(|p| p.is_zero()) {
            orders.pop();
        }
        StarResult { orders }
    }

    pub fn classical(f: &PolyFunction) -> Self {
        StarResult::new(vec![f.clone()])
    }

    /// Coefficient of `ħᵏ`.
    pub fn order(&self, k: usize, nvars: usize) -> PolyFunction {
        self.orders.get(k).cloned().unwrap_or_else(|| Poly::zero(nvars))
    }

    pub fn orders(&self) -> &[PolyFunction] {
        &self.orders
    }

    pub fn is_zero(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn sub(&self, other: &StarResult) -> StarResult {
        let len = self.orders.len().max(other.orders.len());
        let nv = self.orders.first().or(other.orders.first()).map(Poly::nvars).unwrap_or(0);
        StarResult::new((0..len).map(|k| &self.order(k, nv) - &other.order(k, nv)).collect())
    }
}

/// `sym⁻¹(sym(f)·sym(g))` on series.
pub fn gutt_star_series(f: &StarResult, g: &StarResult, s: &LieStructure) -> StarResult {
    s.sym_inverse(&(&s.sym(f) * &s.sym(g)))
}

pub fn gutt_star(f: &PolyFunction, g: &PolyFunction, s: &LieStructure) -> StarResult {
    gutt_star_series(&StarResult::classical(f), &StarResult::classical(g), s)
}

#[derive(Clone, Debug)]
pub struct RealizationCheck {
    pub label: String,
    pub residual: NCPoly,
}

#[derive(Clone, Debug)]
pub struct RealizationReport {
    pub checks: Vec<RealizationCheck>,
}

impl RealizationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.residual.is_zero())
    }
}

/// Checks `p̂₁ = -i(½q₁∂₁ + ½q₂∂₂)`, `p̂₂ = -p̂₁ + C` against the n = 2 brackets
/// under `{·,·} → i[·,·]`.
pub fn quantum_realization_check() -> RealizationReport {
    let t = derivation_table(&["q1", "q2"]);
    let p = |s: &str| NCPoly::parse(&t, s).expect("realization operator");
    let p1 = p("-i*(1/2*q1*d_q1 + 1/2*q2*d_q2)");
    let p2 = &(-&p1) + &p("C");
    let (q1, q2) = (p("q1"), p("q2"));
    let i = p("i");
    let bracket = |a: &NCPoly, b: &NCPoly| &i * &commutator(a, b).expect("same table");
    let half = |x: &NCPoly| x.scale_rational(rat(1, 2));
    let total = &p1 + &p2;
    let mut checks = vec![
        ("{p1,q1} = q1/2".to_string(), &bracket(&p1, &q1) - &half(&q1)),
        ("{p1,q2} = q2/2".to_string(), &bracket(&p1, &q2) - &half(&q2)),
        ("{p2,q1} = -q1/2".to_string(), &bracket(&p2, &q1) + &half(&q1)),
        ("{p2,q2} = -q2/2".to_string(), &bracket(&p2, &q2) + &half(&q2)),
        ("{q1,q2} = 0".to_string(), bracket(&q1, &q2)),
        ("{p1,p2} = 0".to_string(), bracket(&p1, &p2)),
    ];
    for g in t.names() {
        checks.push((format!("[p1+p2,{g}] = 0"), commutator(&total, &p(&g)).expect("same table")));
    }
    RealizationReport {
        checks: checks.into_iter().map(|(label, residual)| RealizationCheck { label, residual }).collect(),
    }
}

/// `L = L₀ + l·𝟙` with `tr L₀ = 0`.
pub fn sl_reduction<T: Clone + Num + FromPrimitive>(l: &Matrix<T>) -> (Matrix<T>, T) {
    assert!(l.is_square(), "sl reduction of a non-square matrix");
    let n = l.rows();
    let scalar = l.trace() / T::from_usize(n).expect("matrix size representable");
    let l0 = &l.clone() - &Matrix::identity(n).scale(&scalar);
    (l0, scalar)
}
