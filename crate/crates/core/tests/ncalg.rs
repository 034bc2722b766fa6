use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toda_core::exact::{imag, int, rat};
use toda_core::ncalg::catalog::{self, forms, PiLambda};
use toda_core::ncalg::{
    at_unit_hbar, commutator, normal_order, quantize, substitute, table_relations, verify_relations, Coeff,
    GeneratorTable, NCPoly, Prescription, Substitution, TableBuilder,
};
use toda_core::poly::Poly;
use toda_core::Rational;

fn raw(t: &Arc<GeneratorTable>, s: &str) -> NCPoly {
    NCPoly::parse(t, s).unwrap()
}

/// Stated operators are written with `ħ = 1`.
fn p(t: &Arc<GeneratorTable>, s: &str) -> NCPoly {
    at_unit_hbar(&raw(t, s))
}

#[test]
fn single_relation_step() {
    let t = catalog::a1_canonical();
    assert_eq!(at_unit_hbar(&p(&t, "p*q")), p(&t, "q*p - i"));
    let d = catalog::a1_deformed(3);
    assert_eq!(at_unit_hbar(&p(&d, "p*q")), p(&d, "q*p - i*q^3"));
}

#[test]
fn right_ordered_hamiltonian_matches_stated_form() {
    let t = catalog::a1_canonical();
    assert_eq!(at_unit_hbar(&p(&t, "q*p*q*p")), p(&t, "q^2*p^2 - i*q*p"));
    assert_eq!(at_unit_hbar(&p(&t, forms::A1_H_WORD_RIGHT)), p(&t, forms::A1_H_RIGHT));
    let h = substitute(&p(&catalog::a1_exp_chart(), forms::A1_H_EXP), &catalog::a1_right_map().unwrap()).unwrap();
    assert_eq!(at_unit_hbar(&h), p(&t, forms::A1_H_RIGHT));
}

#[test]
fn weyl_symmetrization_of_p2q2() {
    let t = catalog::a1_canonical();
    let classical = Poly::monomial(2, vec![2, 2], int(1));
    let w = at_unit_hbar(&quantize(&classical, Prescription::Weyl, &t).unwrap());
    assert_eq!(w, p(&t, "q^2*p^2 - 2*i*q*p - 1/2"));
    assert_eq!(w, p(&t, forms::A1_P2Q2_SYMMETRIC));
}

#[test]
fn weyl_hamiltonian_is_average_of_right_and_left_transforms() {
    let src = p(&catalog::a1_exp_chart(), forms::A1_H_EXP);
    let r = substitute(&src, &catalog::a1_right_map().unwrap()).unwrap();
    let l = substitute(&src, &catalog::a1_left_map().unwrap()).unwrap();
    let avg = (&r + &l).scale_rational(rat(1, 2));
    let t = catalog::a1_canonical();
    assert_eq!(at_unit_hbar(&avg), p(&t, forms::A1_H_WEYL));
    // The per-monomial average of momentum-right and momentum-left orderings is a different operator.
    let classical = &Poly::monomial(2, vec![2, 2], rat(1, 2)) + &Poly::monomial(2, vec![2, 0], rat(1, 2));
    let rp = quantize(&classical, Prescription::RightP, &t).unwrap();
    let lp = quantize(&classical, Prescription::LeftP, &t).unwrap();
    let naive = at_unit_hbar(&(&rp + &lp).scale_rational(rat(1, 2)));
    assert_eq!(&naive - &p(&t, forms::A1_H_WEYL), p(&t, "-1/4"));
}

#[test]
fn orderings_are_distinct() {
    let t = catalog::a1_canonical();
    let classical = &Poly::monomial(2, vec![2, 2], rat(1, 2)) + &Poly::monomial(2, vec![2, 0], rat(1, 2));
    let ops: Vec<NCPoly> = [Prescription::RightP, Prescription::LeftP, Prescription::Weyl]
        .iter()
        .map(|&pr| quantize(&classical, pr, &t).unwrap())
        .collect();
    assert_ne!(ops[0], ops[1]);
    assert_ne!(ops[0], ops[2]);
    assert_ne!(ops[1], ops[2]);
    let q2 = Poly::monomial(2, vec![2, 0], int(1));
    for pr in [Prescription::RightP, Prescription::LeftP, Prescription::Weyl] {
        assert_eq!(quantize(&q2, pr, &t).unwrap(), p(&t, "q^2"));
    }
}

#[test]
fn a2_operators_commute() {
    let t = catalog::a2_qp();
    let h = p(&t, forms::A2_H_QP);
    let i = p(&t, forms::A2_I_QP);
    assert!(at_unit_hbar(&commutator(&h, &i).unwrap()).is_zero());
}

#[test]
fn a2_canonical_transformation_gives_stated_operators() {
    let s = catalog::a2_canonical_map().unwrap();
    let xi = catalog::a2_xi();
    let qp = catalog::a2_qp();
    assert_eq!(at_unit_hbar(&substitute(&p(&xi, forms::A2_H_XI), &s).unwrap()), p(&qp, forms::A2_H_QP));
    assert_eq!(at_unit_hbar(&substitute(&p(&xi, forms::A2_I_XI), &s).unwrap()), p(&qp, forms::A2_I_QP));
    assert!(verify_relations(&s, &table_relations(&xi)).unwrap().all_preserved());
}

#[test]
fn a2_poisson_transformation() {
    let s = catalog::a2_poisson_map(PiLambda::Half).unwrap();
    let pl = catalog::a2_pi_lambda(PiLambda::Half);
    let qp = catalog::a2_qp();
    assert_eq!(at_unit_hbar(&substitute(&p(&pl, forms::A2_H_PI), &s).unwrap()), p(&qp, forms::A2_H_QP));
    assert_eq!(at_unit_hbar(&substitute(&p(&pl, forms::A2_I_PI), &s).unwrap()), p(&qp, forms::A2_I_QP));
    let rep = verify_relations(&s, &table_relations(&pl)).unwrap();
    assert!(rep.all_preserved());
    // [½Q₁P₁, Q₁] = -(i/2)Q₁ at ħ = 1.
    let c = commutator(s.image(2).unwrap(), s.image(0).unwrap()).unwrap();
    assert_eq!(at_unit_hbar(&c), p(&qp, "-i/2*Q1"));
    // The other normalisation is not preserved by this map.
    let s_full = catalog::a2_poisson_map(PiLambda::Full).unwrap();
    assert!(!verify_relations(&s_full, &table_relations(&catalog::a2_pi_lambda(PiLambda::Full)))
        .unwrap()
        .all_preserved());
}

#[test]
fn pi_realization_selects_full_normalisation() {
    for (v, expect) in [(PiLambda::Full, true), (PiLambda::Half, false)] {
        let s = catalog::a2_pi_realization(v).unwrap();
        let rep = verify_relations(&s, &table_relations(s.source())).unwrap();
        let ok = rep.checks.iter().all(|c| at_unit_hbar(&c.residual).is_zero());
        assert_eq!(ok, expect, "{v:?}");
    }
}

#[test]
fn deformation_and_u_maps_preserve_relations() {
    for n in [-1, 0, 2, 3] {
        let s = catalog::a1_deformation_map(n).unwrap();
        assert!(verify_relations(&s, &table_relations(s.source())).unwrap().all_preserved(), "n = {n}");
        let u = catalog::a1_u_map(n).unwrap();
        assert!(verify_relations(&u, &table_relations(u.source())).unwrap().all_preserved(), "u, n = {n}");
    }
    assert!(catalog::a1_u_map(1).is_err());
}

#[test]
fn exp_chart_right_map_preserves_relation() {
    let s = catalog::a1_right_map().unwrap();
    assert!(verify_relations(&s, &table_relations(s.source())).unwrap().all_preserved());
    let id = Substitution::identity(&catalog::a2_qp());
    let rep = verify_relations(&id, &table_relations(&catalog::a2_qp())).unwrap();
    assert_eq!(rep.checks.len(), 6);
    assert!(rep.all_preserved());
    let f = p(&catalog::a2_qp(), forms::A2_I_QP);
    assert_eq!(substitute(&f, &id).unwrap(), f);
}

#[test]
fn lambda_scaled_commutator_by_hand() {
    // [π², λ] = π[π,λ] + [π,λ]π = -(i/2)(πλ + λπ) = -(i/2)(2λπ - (i/2)λ) = -iλπ - λ/4.
    let t = catalog::a2_pi_lambda(PiLambda::Half);
    let c = at_unit_hbar(&commutator(&p(&t, "pi1^2"), &p(&t, "lam1")).unwrap());
    assert_eq!(c, p(&t, "-i*lam1*pi1 - 1/4*lam1"));
}

#[test]
fn negative_exponent_on_momentum_is_rejected() {
    let t = catalog::a1_canonical();
    assert!(normal_order(&[(1, -1)], &t).is_err());
    assert!(normal_order(&[(0, -1), (1, 1), (0, 1)], &t).is_ok());
    let r = at_unit_hbar(&normal_order(&[(1, 1), (0, -1)], &t).unwrap());
    assert_eq!(r, p(&t, "q^-1*p + i*q^-2"));
}

#[test]
fn unknown_symbols_are_reported() {
    assert!(NCPoly::parse(&catalog::a1_canonical(), "z*q").is_err());
}

// Independent oracle: rewrite a word of single letters at randomly chosen adjacent
// out-of-order pairs until it is sorted, using only the declared relations.

type Word = Vec<(usize, i32)>;

fn oracle_normal_form(table: &Arc<GeneratorTable>, word: &Word, rng: &mut ChaCha8Rng) -> BTreeMap<Vec<i32>, Coeff> {
    let n = table.len();
    let mut pending: Vec<(Word, Coeff)> = vec![(word.clone(), Coeff::one())];
    let mut done: BTreeMap<Vec<i32>, Coeff> = BTreeMap::new();
    while let Some((w, c)) = pending.pop() {
        let spots: Vec<usize> = (0..w.len().saturating_sub(1))
            .filter(|&k| w[k].0 > w[k + 1].0 || (w[k].0 == w[k + 1].0 && w[k].1 != w[k + 1].1))
            .collect();
        if spots.is_empty() {
            let mut m = vec![0; n];
            for &(g, e) in &w {
                m[g] += e;
            }
            let v = done.remove(&m).unwrap_or_else(Coeff::zero);
            let s = &v + &c;
            if !s.is_zero() {
                done.insert(m, s);
            }
            continue;
        }
        let k = spots[rng.gen_range(0..spots.len())];
        let (a, b) = (w[k], w[k + 1]);
        if a.0 == b.0 {
            let mut w2 = w.clone();
            w2.drain(k..k + 2);
            pending.push((w2, c));
            continue;
        }
        let mut swapped = w.clone();
        swapped[k] = b;
        swapped[k + 1] = a;
        pending.push((swapped, c.clone()));
        if let Some(r) = table.relation(a.0, b.0) {
            // x_i x_j = x_j x_i + R; x_i x_j^-1 = x_j^-1 x_i - x_j^-1 R x_j^-1.
            assert_eq!(a.1, 1);
            for (m, rc) in r {
                let mut mid: Word = Vec::new();
                for (g, &e) in m.iter().enumerate() {
                    for _ in 0..e.unsigned_abs() {
                        mid.push((g, e.signum()));
                    }
                }
                let (mid, coef) = if b.1 == 1 {
                    (mid, &c * rc)
                } else {
                    let mut v = vec![(b.0, -1)];
                    v.extend(mid);
                    v.push((b.0, -1));
                    (v, -(&c * rc))
                };
                let mut w2: Word = w[..k].to_vec();
                w2.extend(mid);
                w2.extend_from_slice(&w[k + 2..]);
                pending.push((w2, coef));
            }
        }
    }
    done
}

fn tables() -> Vec<Arc<GeneratorTable>> {
    vec![
        catalog::a1_canonical(),
        catalog::a1_deformed(2),
        catalog::a1_deformed(-1),
        catalog::a2_xi(),
        catalog::a2_pi_lambda(PiLambda::Half),
        TableBuilder::new("solvable")
            .coordinate("x")
            .coordinate("y")
            .momentum("h")
            .relation("h", "x", "hbar*x")
            .relation("y", "x", "hbar*x")
            .build()
            .unwrap(),
    ]
}

fn random_word(table: &Arc<GeneratorTable>, rng: &mut ChaCha8Rng, len: usize) -> Word {
    (0..len)
        .map(|_| {
            let g = rng.gen_range(0..table.len());
            let e = if table.generators()[g].laurent && rng.gen_bool(0.3) { -1 } else { 1 };
            (g, e)
        })
        .collect()
}

#[test]
fn normal_form_is_independent_of_rewrite_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for t in tables() {
        for _ in 0..1000 {
            let len = rng.gen_range(0..=6);
            let w = random_word(&t, &mut rng, len);
            let engine = normal_order(&w, &t).unwrap();
            let oracle = oracle_normal_form(&t, &w, &mut rng);
            assert_eq!(engine.terms(), &oracle, "table {} word {w:?}", t.name());
        }
    }
}

fn random_poly(t: &Arc<GeneratorTable>, rng: &mut ChaCha8Rng, max_deg: usize) -> NCPoly {
    let mut acc = NCPoly::zero(t);
    for _ in 0..rng.gen_range(1..=3) {
        let len = rng.gen_range(0..=max_deg);
        let w = random_word(t, rng, len);
        let c = Coeff::scalar(toda_core::exact::gauss(
            Rational::from_integer(rng.gen_range(-3..=3).into()),
            Rational::from_integer(rng.gen_range(-2..=2).into()),
        ));
        acc = &acc + &normal_order(&w, t).unwrap().scale(&c);
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_associative(seed in any::<u64>(), which in 0usize..6) {
        let t = tables().swap_remove(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g, h) = (random_poly(&t, &mut rng, 4), random_poly(&t, &mut rng, 4), random_poly(&t, &mut rng, 4));
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
    }

    #[test]
    fn commutator_satisfies_jacobi(seed in any::<u64>(), which in 0usize..6) {
        let t = tables().swap_remove(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g, h) = (random_poly(&t, &mut rng, 3), random_poly(&t, &mut rng, 3), random_poly(&t, &mut rng, 3));
        let c = |a: &NCPoly, b: &NCPoly| commutator(a, b).unwrap();
        let j = &(&c(&f, &c(&g, &h)) + &c(&g, &c(&h, &f))) + &c(&h, &c(&f, &g));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn classical_limit_commutes(seed in any::<u64>(), which in 0usize..6) {
        // Every relation is O(ħ), so commutators have no ħ⁰ part.
        let t = tables().swap_remove(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g) = (random_poly(&t, &mut rng, 3), random_poly(&t, &mut rng, 3));
        prop_assert!(commutator(&f, &g).unwrap().hbar_order(0).is_zero());
    }

    #[test]
    fn normal_order_is_idempotent(seed in any::<u64>(), which in 0usize..6) {
        let t = tables().swap_remove(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_poly(&t, &mut rng, 5);
        let again = NCPoly::parse(&t, &f.render()).unwrap();
        prop_assert_eq!(again, f);
    }
}

#[test]
fn hbar_constant_is_central() {
    let t = catalog::a2_xi();
    let h = NCPoly::constant(&t, Coeff::hbar());
    let x = raw(&t, "pxi*X^-1 + Y");
    assert!(commutator(&h, &x).unwrap().is_zero());
    assert_eq!(Coeff::scalar(imag(int(1))), Coeff::imaginary_unit());
}
