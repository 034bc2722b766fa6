use std::sync::Arc;

use num_traits::{One, Zero};

use super::coeff::Coeff;
use super::ncpoly::NCPoly;
use super::table::{GenKind, GeneratorTable};
use super::AlgebraError;
use crate::exact::{int, Rational};
use crate::poly::Poly;

/// Normal form of a word of letters `(generator index, exponent)`.
pub fn normal_order(word: &[(usize, i32)], table: &Arc<GeneratorTable>) -> Result<NCPoly, AlgebraError> {
    let mut acc = NCPoly::one(table);
    for &(g, e) in word {
        if g >= table.len() {
            return Err(AlgebraError::UnknownGenerator(format!("#{g}")));
        }
        let mut m = vec![0; table.len()];
        m[g] = e;
        let letter = NCPoly::monomial(table, m, Coeff::one())?;
        acc = &acc * &letter;
    }
    Ok(acc)
}

pub fn multiply(f: &NCPoly, g: &NCPoly) -> Result<NCPoly, AlgebraError> {
    f.try_mul(g)
}

pub fn commutator(f: &NCPoly, g: &NCPoly) -> Result<NCPoly, AlgebraError> {
    f.try_mul(g)?.try_sub(&g.try_mul(f)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prescription {
    /// Momenta rightmost.
    RightP,
    /// Momenta leftmost.
    LeftP,
    /// Average over all distinct orderings of the letters.
    Weyl,
}

impl std::str::FromStr for Prescription {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rightP" | "right" => Ok(Prescription::RightP),
            "leftP" | "left" => Ok(Prescription::LeftP),
            "weyl" => Ok(Prescription::Weyl),
            _ => Err(format!("unknown prescription {s}")),
        }
    }
}

/// Maps a classical polynomial (variables in table order) to an operator.
pub fn quantize(
    classical: &Poly<Rational>,
    prescription: Prescription,
    table: &Arc<GeneratorTable>,
) -> Result<NCPoly, AlgebraError> {
    if classical.nvars() != table.len() {
        return Err(AlgebraError::InvalidTable(format!(
            "classical polynomial has {} variables, table has {}",
            classical.nvars(),
            table.len()
        )));
    }
    let kinds: Vec<GenKind> = table.generators().iter().map(|g| g.kind).collect();
    let mut acc = NCPoly::zero(table);
    for (m, c) in classical.terms() {
        let coeff = Coeff::rational(c.clone());
        let op = match prescription {
            Prescription::RightP => NCPoly::monomial(table, m.clone(), Coeff::one())?,
            Prescription::LeftP => {
                let moms = (0..m.len()).filter(|&k| kinds[k] == GenKind::Momentum);
                let coords = (0..m.len()).filter(|&k| kinds[k] == GenKind::Coordinate);
                let word: Vec<(usize, i32)> = moms.chain(coords).filter(|&k| m[k] != 0).map(|k| (k, m[k])).collect();
                normal_order(&word, table)?
            }
            Prescription::Weyl => weyl_symmetrize(m, table)?,
        };
        acc = &acc + &op.scale(&coeff);
    }
    Ok(acc)
}

fn weyl_symmetrize(m: &[i32], table: &Arc<GeneratorTable>) -> Result<NCPoly, AlgebraError> {
    let mut letters: Vec<(usize, i32)> = Vec::new();
    for (k, &e) in m.iter().enumerate() {
        for _ in 0..e.unsigned_abs() {
            letters.push((k, e.signum()));
        }
    }
    letters.sort();
    let mut sum = NCPoly::zero(table);
    let mut count: i64 = 0;
    loop {
        sum = &sum + &normal_order(&letters, table)?;
        count += 1;
        if !next_permutation(&mut letters) {
            break;
        }
    }
    Ok(sum.scale_rational(Rational::new(1.into(), count.into())))
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Generator-wise images defining an algebra map between tables.
#[derive(Clone, Debug)]
pub struct Substitution {
    source: Arc<GeneratorTable>,
    target: Arc<GeneratorTable>,
    images: Vec<Option<NCPoly>>,
}

impl Substitution {
    pub fn new(source: &Arc<GeneratorTable>, target: &Arc<GeneratorTable>) -> Self {
        Substitution { source: source.clone(), target: target.clone(), images: vec![None; source.len()] }
    }

    pub fn identity(table: &Arc<GeneratorTable>) -> Self {
        let mut s = Self::new(table, table);
        for k in 0..table.len() {
            let mut m = vec![0; table.len()];
            m[k] = 1;
            s.images[k] = Some(NCPoly::monomial(table, m, Coeff::one()).expect("unit monomial"));
        }
        s
    }

    /// Sets the image of `gen`, parsed over the target table.
    pub fn map(self, gen: &str, image: &str) -> Result<Self, AlgebraError> {
        let img = NCPoly::parse(&self.target, image)?;
        self.map_poly(gen, img)
    }

    pub fn map_poly(mut self, gen: &str, image: NCPoly) -> Result<Self, AlgebraError> {
        if image.table().id() != self.target.id() {
            return Err(AlgebraError::TableMismatch(image.table().name().into(), self.target.name().into()));
        }
        let k = self.source.index_of(gen)?;
        self.images[k] = Some(image);
        Ok(self)
    }

    pub fn source(&self) -> &Arc<GeneratorTable> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GeneratorTable> {
        &self.target
    }

    pub fn image(&self, k: usize) -> Option<&NCPoly> {
        self.images.get(k).and_then(Option::as_ref)
    }
}

pub fn substitute(f: &NCPoly, s: &Substitution) -> Result<NCPoly, AlgebraError> {
    if f.table().id() != s.source.id() {
        return Err(AlgebraError::TableMismatch(f.table().name().into(), s.source.name().into()));
    }
    let mut acc = NCPoly::zero(&s.target);
    for (m, c) in f.terms() {
        let mut t = NCPoly::constant(&s.target, c.clone());
        for (k, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let img = s.image(k).ok_or_else(|| AlgebraError::UndefinedImage(s.source.generators()[k].name.clone()))?;
            let factor = if e > 0 { img.pow(e as u32) } else { img.inverse()?.pow(e.unsigned_abs()) };
            t = &t * &factor;
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

/// `[x_a, x_b] = rhs` over a source table.
#[derive(Clone, Debug)]
pub struct Relation {
    pub a: usize,
    pub b: usize,
    pub rhs: NCPoly,
}

impl Relation {
    pub fn label(&self) -> String {
        let g = self.rhs.table().generators();
        format!("[{},{}]", g[self.a].name, g[self.b].name)
    }
}

/// Every pair relation of the table, including commuting pairs (`rhs = 0`).
pub fn table_relations(table: &Arc<GeneratorTable>) -> Vec<Relation> {
    let mut out = Vec::new();
    for b in 0..table.len() {
        for a in b + 1..table.len() {
            let rhs = match table.relation(a, b) {
                Some(r) => NCPoly::from_terms(table, r.clone()),
                None => NCPoly::zero(table),
            };
            out.push(Relation { a, b, rhs });
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct RelationCheck {
    pub label: String,
    /// `[s(a), s(b)] - s(rhs)`; zero when the relation is preserved.
    pub residual: NCPoly,
}

#[derive(Clone, Debug)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_preserved(&self) -> bool {
        self.checks.iter().all(|c| c.residual.is_zero())
    }
}

pub fn verify_relations(s: &Substitution, relations: &[Relation]) -> Result<RelationReport, AlgebraError> {
    let mut checks = Vec::new();
    for r in relations {
        let img = |k: usize| {
            s.image(k).cloned().ok_or_else(|| AlgebraError::UndefinedImage(s.source.generators()[k].name.clone()))
        };
        let lhs = commutator(&img(r.a)?, &img(r.b)?)?;
        let residual = lhs.try_sub(&substitute(&r.rhs, s)?)?;
        checks.push(RelationCheck { label: r.label(), residual });
    }
    Ok(RelationReport { checks })
}

/// `ħ = 1` specialization, the form in which printed operators are compared.
pub fn at_unit_hbar(f: &NCPoly) -> NCPoly {
    f.specialize_hbar(&int(1))
}

/// True when every coefficient is free of `ħ` and of the imaginary unit.
pub fn is_real_classical(f: &NCPoly) -> bool {
    f.terms().values().all(|c| c.max_order() == Some(0) && c.order(0).im.is_zero()) || f.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::TableBuilder;

    #[test]
    fn permutations_are_distinct() {
        let mut v = vec![0, 0, 1, 1];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 6);
        assert_eq!(v, vec![1, 1, 0, 0]);
    }

    #[test]
    fn undefined_image_is_an_error() {
        let t = TableBuilder::new("w").coordinate("q").momentum("p").relation("p", "q", "-i*hbar").build().unwrap();
        let s = Substitution::new(&t, &t).map("q", "q").unwrap();
        let f = NCPoly::parse(&t, "p").unwrap();
        assert!(matches!(substitute(&f, &s), Err(AlgebraError::UndefinedImage(_))));
    }
}
