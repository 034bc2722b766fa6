use num_traits::Zero;
use proptest::prelude::*;

use toda_core::exact::{int, rat};
use toda_core::liepoisson::{
    coordinate, gutt_star, gutt_star_series, jacobi_residual, lie_poisson_bracket, parse_function, r_bracket_constants,
    render_function, trace_power, LieStructure, PolyFunction, StarResult,
};
use toda_core::poly::Poly;

/// Random polynomial in `d` variables of total degree at most `max_deg` with small integer coefficients.
fn poly(d: usize, max_deg: i32) -> impl Strategy<Value = PolyFunction> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, d), -3i64..=3), 1..4).prop_map(move |terms| {
        Poly::from_terms(
            d,
            terms.into_iter().filter(|(e, _)| e.iter().sum::<i32>() <= max_deg).map(|(e, c)| (e, int(c))),
        )
    })
}

fn pb(f: &PolyFunction, g: &PolyFunction, s: &LieStructure) -> PolyFunction {
    lie_poisson_bracket(f, g, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_antisymmetric_and_leibniz(f in poly(4, 2), g in poly(4, 2), h in poly(4, 2)) {
        let s = r_bracket_constants(2);
        prop_assert_eq!(pb(&f, &g, &s), -&pb(&g, &f, &s));
        let lhs = pb(&f, &(&g * &h), &s);
        let rhs = &(&pb(&f, &g, &s) * &h) + &(&g * &pb(&f, &h, &s));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_satisfies_jacobi(f in poly(4, 2), g in poly(4, 2), h in poly(4, 2)) {
        let s = r_bracket_constants(2);
        let cyc = &(&pb(&f, &pb(&g, &h, &s), &s) + &pb(&g, &pb(&h, &f, &s), &s)) + &pb(&h, &pb(&f, &g, &s), &s);
        prop_assert!(cyc.is_zero());
    }

    #[test]
    fn trace_is_a_casimir(g in poly(9, 2)) {
        let s = r_bracket_constants(3);
        prop_assert!(pb(&trace_power(3, 1), &g, &s).is_zero());
    }

    #[test]
    fn star_is_associative(f in poly(4, 2), g in poly(4, 1), h in poly(4, 2)) {
        let s = r_bracket_constants(2);
        let fg = gutt_star(&f, &g, &s);
        let gh = gutt_star(&g, &h, &s);
        let left = gutt_star_series(&fg, &StarResult::classical(&h), &s);
        let right = gutt_star_series(&StarResult::classical(&f), &gh, &s);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn star_deforms_the_product_along_the_bracket(f in poly(4, 3), g in poly(4, 3)) {
        let s = r_bracket_constants(2);
        let fg = gutt_star(&f, &g, &s);
        let gf = gutt_star(&g, &f, &s);
        prop_assert_eq!(fg.order(0, 4), &f * &g);
        let anti = fg.sub(&gf);
        prop_assert!(anti.order(0, 4).is_zero());
        prop_assert_eq!(anti.order(1, 4), pb(&f, &g, &s));
        // The order-ħ symmetric part vanishes.
        let sym = &fg.order(1, 4) + &gf.order(1, 4);
        prop_assert!(sym.is_zero());
    }

    #[test]
    fn render_parse_round_trip(f in poly(4, 3)) {
        let s = r_bracket_constants(2);
        prop_assert_eq!(parse_function(&s, &render_function(&s, &f)).unwrap(), f);
    }
}

#[test]
fn jacobi_holds_for_small_sizes() {
    for n in 2..=4 {
        let s = r_bracket_constants(n);
        assert!(s.is_antisymmetric());
        assert!(jacobi_residual(&s).is_zero());
    }
    assert!(jacobi_residual(&LieStructure::gl_standard(3)).is_zero());
    assert!(!jacobi_residual(&r_bracket_constants(3).perturbed(0, 1, 1, rat(1, 5))).is_zero());
}

#[test]
fn lax_form_of_the_quadratic_hamiltonian() {
    // {-tr L², L_ij} equals [L₊ − L₋, L]_ij for gl(2).
    let s = r_bracket_constants(2);
    let h = -&trace_power(2, 2);
    let l = |i: usize, j: usize| coordinate(&s, i, j);
    let p = [[Poly::zero(4), l(0, 1)], [-&l(1, 0), Poly::zero(4)]];
    for i in 0..2 {
        for j in 0..2 {
            let mut c = Poly::zero(4);
            for r in 0..2 {
                c = &c + &(&(&p[i][r] * &l(r, j)) - &(&l(i, r) * &p[r][j]));
            }
            assert_eq!(pb(&h, &l(i, j), &s), c, "entry ({i}, {j})");
        }
    }
}

#[test]
fn star_of_coordinates_terminates_at_first_order() {
    let s = r_bracket_constants(2);
    let x = coordinate(&s, 0, 0);
    let y = coordinate(&s, 0, 1);
    let r = gutt_star(&x, &y, &s);
    assert_eq!(r.order(0, 4), &x * &y);
    assert_eq!(r.order(1, 4), pb(&x, &y, &s).scale(&rat(1, 2)));
    assert_eq!(r.orders().len(), 2);
}

#[test]
fn parse_errors() {
    let s = r_bracket_constants(2);
    assert!(parse_function(&s, "L3_1").is_err());
    assert!(parse_function(&s, "L1_1^-1").is_err());
    assert!(parse_function(&s, "L1_1 +").is_err());
    assert_eq!(parse_function(&s, "L1_2*L2_1 - 1/2").unwrap().coefficient(&[0, 0, 0, 0]), rat(-1, 2));
}
