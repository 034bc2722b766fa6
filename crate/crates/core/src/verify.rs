//! Named verification checks grouped into suites.
//!
//! Every check reports `name: PASS (detail)` or `name: FAIL (detail)`; reports are
//! sorted by name so output is deterministic.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{fmt_rational, int, rat, Rational};
use crate::flow::{cross_check_flows, drift_report, integrate, IntegratorConfig};
use crate::lax::{self, LaxFamily, LaxSystem};
use crate::liepoisson::{
    coordinate, gutt_star, gutt_star_series, jacobi_residual, lie_poisson_bracket, quantum_realization_check,
    r_bracket_constants, sl_reduction, trace_power, PolyFunction, StarResult,
};
use crate::linalg::Matrix;
use crate::ncalg::catalog::{self, forms, PiLambda};
use crate::ncalg::{
    at_unit_hbar, commutator, quantize, substitute, table_relations, verify_relations, NCPoly, Prescription,
};
use crate::phase::{pi_lambda_invariants, systems, ChartMap, PolyPoissonStructure};
use crate::poly::Poly;
use crate::spectral::{self, change_of_variable, compare_spectra, problems, solve, VarMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Hierarchy,
    GlN,
    Spectral,
    All,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "algebra" => Ok(Suite::Algebra),
            "hierarchy" => Ok(Suite::Hierarchy),
            "glN" | "gln" => Ok(Suite::GlN),
            "spectral" => Ok(Suite::Spectral),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite {s} (algebra, hierarchy, glN, spectral, all)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }

    fn within(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Check::new(name, value < tol, format!("max deviation {value:.3e}, tolerance {tol:.0e}"))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.name, if self.passed { "PASS" } else { "FAIL" }, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn from_checks(mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        Report { checks }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

pub fn run(suite: Suite) -> Report {
    let checks = match suite {
        Suite::Algebra => algebra(),
        Suite::Hierarchy => hierarchy(),
        Suite::GlN => gl_n(),
        Suite::Spectral => spectral_suite(),
        Suite::All => [algebra(), hierarchy(), gl_n(), spectral_suite()].concat(),
    };
    Report::from_checks(checks)
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0)
}

fn uniform_points(rng: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect()
}

fn op(t: &std::sync::Arc<crate::ncalg::GeneratorTable>, s: &str) -> NCPoly {
    at_unit_hbar(&NCPoly::parse(t, s).expect("catalogue operator"))
}

fn exact_zero(name: &str, f: &NCPoly) -> Check {
    if f.is_zero() {
        Check::new(name, true, "exact zero")
    } else {
        Check::new(name, false, format!("residual {}", f.render()))
    }
}

fn exact_equal(name: &str, a: &NCPoly, b: &NCPoly) -> Check {
    if a == b {
        Check::new(name, true, format!("exact: {}", a.render()))
    } else {
        Check::new(name, false, format!("{} != {}", a.render(), b.render()))
    }
}

// ---------------------------------------------------------------- algebra

pub fn algebra() -> Vec<Check> {
    let mut out = Vec::new();
    let qp = catalog::a2_qp();
    let (h, i) = (op(&qp, forms::A2_H_QP), op(&qp, forms::A2_I_QP));
    out.push(exact_zero("A2.commutator_HI", &at_unit_hbar(&commutator(&h, &i).expect("same table"))));

    let cm = catalog::a2_canonical_map().expect("catalogue map");
    let xi = catalog::a2_xi();
    out.push(exact_equal(
        "A2.canonical_map_H",
        &at_unit_hbar(&substitute(&op(&xi, forms::A2_H_XI), &cm).expect("images defined")),
        &h,
    ));
    out.push(exact_equal(
        "A2.canonical_map_I",
        &at_unit_hbar(&substitute(&op(&xi, forms::A2_I_XI), &cm).expect("images defined")),
        &i,
    ));
    let rel = verify_relations(&cm, &table_relations(&xi)).expect("relations");
    out.push(Check::new("A2.canonical_map_relations", rel.all_preserved(), format!("{} relations", rel.checks.len())));

    let pm = catalog::a2_poisson_map(PiLambda::Half).expect("catalogue map");
    let pl = catalog::a2_pi_lambda(PiLambda::Half);
    out.push(exact_equal(
        "A2.poisson_map_H",
        &at_unit_hbar(&substitute(&op(&pl, forms::A2_H_PI), &pm).expect("images defined")),
        &h,
    ));
    let rel = verify_relations(&pm, &table_relations(&pl)).expect("relations");
    out.push(Check::new("A2.poisson_map_relations", rel.all_preserved(), format!("{} relations", rel.checks.len())));

    // Which [π, λ] normalisation the realization π = -iλ∂_λ satisfies.
    let realized: Vec<PiLambda> = [PiLambda::Half, PiLambda::Full]
        .into_iter()
        .filter(|&v| {
            let s = catalog::a2_pi_realization(v).expect("catalogue map");
            let rep = verify_relations(&s, &table_relations(s.source())).expect("relations");
            rep.checks.iter().all(|c| at_unit_hbar(&c.residual).is_zero())
        })
        .collect();
    out.push(Check::new(
        "typo.pi_realization",
        realized == [PiLambda::Full],
        format!(
            "printed [pi,lam] = -(i/2)lam realized: {}; [pi,lam] = -i lam realized: {}",
            realized.contains(&PiLambda::Half),
            realized.contains(&PiLambda::Full)
        ),
    ));

    let a1 = catalog::a1_canonical();
    out.push(exact_equal("A1.right_ordering_word", &op(&a1, forms::A1_H_WORD_RIGHT), &op(&a1, forms::A1_H_RIGHT)));
    let src = op(&catalog::a1_exp_chart(), forms::A1_H_EXP);
    let right = at_unit_hbar(&substitute(&src, &catalog::a1_right_map().expect("map")).expect("images"));
    let left = at_unit_hbar(&substitute(&src, &catalog::a1_left_map().expect("map")).expect("images"));
    out.push(exact_equal("A1.right_ordering_transform", &right, &op(&a1, forms::A1_H_RIGHT)));
    let p2q2 = Poly::monomial(2, vec![2, 2], int(1));
    let weyl = at_unit_hbar(&quantize(&p2q2, Prescription::Weyl, &a1).expect("quantize"));
    out.push(exact_equal("weyl.ordering_identity", &weyl, &op(&a1, forms::A1_P2Q2_SYMMETRIC)));
    let avg = (&right + &left).scale_rational(rat(1, 2));
    out.push(exact_equal("weyl.average_right_left", &avg, &op(&a1, forms::A1_H_WEYL)));

    for n in [-1, 2, 3] {
        let s = catalog::a1_deformation_map(n).expect("map");
        let rel = verify_relations(&s, &table_relations(s.source())).expect("relations");
        out.push(Check::new(format!("A1.deformation_relations.n={n}"), rel.all_preserved(), "[p,q] = -i q^n"));
        let u = catalog::a1_u_map(n).expect("map");
        let rel = verify_relations(&u, &table_relations(u.source())).expect("relations");
        out.push(Check::new(format!("A1.u_relations.n={n}"), rel.all_preserved(), "[U,u] = -i"));
    }

    let (hp, ip) = pi_lambda_invariants();
    for n in 0..=3 {
        let b = PolyPoissonStructure::omega(n).bracket(&hp, &ip);
        let expect_zero = n == 1;
        let detail = if b.is_zero() { "{H,I} = 0".to_string() } else { format!("{{H,I}} has {} terms", b.len()) };
        out.push(Check::new(format!("omega.involution.n={n}"), b.is_zero() == expect_zero, detail));
    }

    out.extend(typo_checks());
    out
}

/// Printed forms against the matrix-trace oracle.
pub fn typo_checks() -> Vec<Check> {
    let mut rng = rng();
    let mut out = Vec::new();

    let (mut dev_printed, mut dev_oracle) = (0.0f64, 0.0f64);
    for z in uniform_points(&mut rng, 100, 6) {
        let tr = lax::a2_particle_lax(&z).pow(3).trace();
        dev_printed = dev_printed.max((lax::a2_invariant_printed_particles(&z) - tr).abs());
        dev_oracle = dev_oracle.max((lax::a2_invariant_particles(&z) - tr).abs());
    }
    out.push(Check::new(
        "typo.A2_invariant",
        dev_oracle < 1e-12,
        format!(
            "printed: -(p1^2+p2^2+p3^2) - 3e^(x1-x2)(p1+p2) - 3e^(x2-x3)(p2+p3) deviates from tr L^3 by {dev_printed:.3e}; \
             oracle: -(p1^3+p2^3+p3^3) - 3e^(x1-x2)(p1+p2) - 3e^(x2-x3)(p2+p3) deviates by {dev_oracle:.1e}"
        ),
    ));

    let a2 = LaxSystem::<f64>::new(LaxFamily::A2);
    let mut dev_xi = 0.0f64;
    for z in uniform_points(&mut rng, 100, 4) {
        let tr = a2.invariant(&z, 3).expect("in domain");
        dev_xi = dev_xi.max((lax::a2_invariant_printed_xi(&z) - tr).abs());
    }
    out.push(Check::new(
        "typo.A2_invariant_xi",
        dev_xi < 1e-12,
        format!("printed 3[peta^2 pxi - peta pxi^2 - e^xi peta + e^eta pxi] vs tr L^3: {dev_xi:.1e}"),
    ));

    let (mut dev_printed, mut dev_oracle) = (0.0f64, 0.0f64);
    for z in uniform_points(&mut rng, 100, 4) {
        let l = Matrix::from_row_major(2, 2, z).expect("2x2");
        let tr = l.pow(3).trace();
        dev_printed = dev_printed.max((lax::gl2_trace_identity_printed(&l) - tr).abs());
        dev_oracle = dev_oracle.max((lax::gl2_trace_identity(&l) - tr).abs());
    }
    out.push(Check::new(
        "typo.gl2_trace_identity",
        dev_oracle < 1e-12,
        format!(
            "printed: tr L^3 = -(tr L)^3 + 3 tr L^2 tr L deviates by {dev_printed:.3e}; \
             oracle: tr L^3 = (3/2) tr L tr L^2 - (1/2)(tr L)^3 deviates by {dev_oracle:.1e}"
        ),
    ));

    // H = -tr L² in the entries a11, a12, a21, a22.
    let v = |k| Poly::<Rational>::var(4, k);
    let neg_tr2 = -&trace_power(2, 2);
    let sq = |p: &Poly<Rational>| p * p;
    let printed = -&(&(&sq(&v(0)) + &sq(&v(1))) + &(&v(1) * &v(2)).scale(&int(2)));
    let oracle = -&(&(&sq(&v(0)) + &sq(&v(3))) + &(&v(1) * &v(2)).scale(&int(2)));
    out.push(Check::new(
        "typo.H_gl2",
        oracle == neg_tr2 && printed != neg_tr2,
        format!(
            "printed: -(a11^2 + a12^2 + 2 a12 a21) equals -tr L^2: {}; oracle: -(a11^2 + a22^2 + 2 a12 a21) equals -tr L^2: {}",
            printed == neg_tr2,
            oracle == neg_tr2
        ),
    ));
    out
}

// -------------------------------------------------------------- hierarchy

pub fn hierarchy() -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = rng();
    let points = uniform_points(&mut rng, 100, 4);
    for m in 1..=4u32 {
        let sys = LaxSystem::<f64>::new(LaxFamily::A2Hierarchy(m));
        let (mut dev, mut vsum, mut state_dev) = (0.0f64, 0.0f64, 0.0f64);
        for z in &points {
            let l = sys.build_l(z).expect("in domain");
            let r = sys.lax_rhs(z).expect("in domain");
            let printed = lax::hierarchy_printed_rhs(m, [l[(0, 0)], l[(1, 1)], l[(2, 2)]], [l[(0, 1)], l[(1, 2)]]);
            let engine = [r[(0, 0)], r[(1, 1)], r[(2, 2)], r[(0, 1)], r[(1, 2)]];
            for (a, b) in printed.iter().zip(&engine) {
                dev = dev.max((a - b).abs());
            }
            // Off-tridiagonal entries of the commutator must vanish as well.
            dev = dev.max(r[(0, 2)].abs()).max(r[(2, 0)].abs());
            vsum = vsum.max((r[(0, 0)] + r[(1, 1)] + r[(2, 2)]).abs());
            let f = sys.state_rhs(z).expect("in domain");
            let p = lax::hierarchy_printed_state_rhs(m, z);
            for (a, b) in f.iter().zip(&p) {
                state_dev = state_dev.max((a - b).abs());
            }
        }
        out.push(Check::within(format!("hierarchy.rhs_match.m={m}"), dev, 1e-12));
        out.push(Check::within(format!("hierarchy.velocity_sum.m={m}"), vsum, 1e-12));
        out.push(Check::within(format!("hierarchy.hamilton_equations.m={m}"), state_dev, 1e-12));
    }

    let cfg = IntegratorConfig::rk4(1e-3, 5.0).with_stride(10);
    let mut dist = 0.0f64;
    for z in points.iter().take(5) {
        let rep = cross_check_flows(
            &systems::a2_hierarchy::<f64>(1),
            &systems::a2_cm::<f64>(),
            &ChartMap::identity(4),
            z,
            &cfg,
        )
        .expect("integration");
        dist = dist.max(rep.max_distance);
    }
    out.push(Check::within("hierarchy.m1_equals_a2", dist, 1e-9));

    out.push(isospectral_check());
    out
}

/// Twenty A₂ flows from `[-1, 1]⁴`, `T = 10`, RK4 with `h = 1e-3`.
pub fn isospectral_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sys = LaxSystem::<f64>::new(LaxFamily::A2);
    let cfg = IntegratorConfig::rk4(1e-3, 10.0).with_stride(100);
    let (mut eig, mut tr2, mut tr3) = (0.0f64, 0.0f64, 0.0f64);
    for z in uniform_points(&mut rng, 20, 4) {
        let traj = match integrate(&sys, &z, &cfg) {
            Ok(t) => t,
            Err(e) => return Check::new("A2.isospectral", false, format!("integration failed: {e}")),
        };
        let d = drift_report(&traj, &[2, 3]);
        eig = eig.max(d.eigenvalue_drift);
        tr2 = tr2.max(d.invariant(2).unwrap_or(f64::INFINITY));
        tr3 = tr3.max(d.invariant(3).unwrap_or(f64::INFINITY));
    }
    let tol = 1e-7;
    Check::new(
        "A2.isospectral",
        eig < tol && tr2 < tol && tr3 < tol,
        format!("20 flows, T = 10: eigenvalue drift {eig:.3e}, trL2 {tr2:.3e}, trL3 {tr3:.3e}, tolerance {tol:.0e}"),
    )
}

// ------------------------------------------------------------------- glN

/// `[P, L]` with `P = Π₊L − Π₋L` over polynomial entries.
pub fn cholesky_rhs_polynomial(n: usize) -> Vec<Vec<PolyFunction>> {
    let s = r_bracket_constants(n);
    let l = |i: usize, j: usize| coordinate(&s, i, j);
    let p = |i: usize, j: usize| match i.cmp(&j) {
        std::cmp::Ordering::Less => l(i, j),
        std::cmp::Ordering::Greater => -&l(i, j),
        std::cmp::Ordering::Equal => Poly::zero(n * n),
    };
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = Poly::zero(n * n);
                    for k in 0..n {
                        acc = &acc + &(&(&p(i, k) * &l(k, j)) - &(&l(i, k) * &p(k, j)));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn monomials(nvars: usize, max_deg: i32) -> Vec<Vec<i32>> {
    let mut out = vec![vec![0; nvars]];
    for _ in 0..max_deg {
        let mut next = out.clone();
        for m in &out {
            for v in 0..nvars {
                let mut e = m.clone();
                e[v] += 1;
                if !next.contains(&e) {
                    next.push(e);
                }
            }
        }
        out = next;
    }
    out.sort();
    out
}

fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, max_deg: i32) -> PolyFunction {
    let mono = monomials(nvars, max_deg);
    let mut p = Poly::zero(nvars);
    for _ in 0..rng.gen_range(1..=3) {
        let m = &mono[rng.gen_range(1..mono.len())];
        let c = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
        p.add_term(m.clone(), int(c));
    }
    p
}

/// Exact associativity on monomial triples `(f, g, h)` with degrees accepted by `keep`.
fn star_associativity_over(n: usize, max_deg: i32, keep: impl Fn(i32, i32, i32) -> bool) -> (usize, usize) {
    let s = r_bracket_constants(n);
    let nv = n * n;
    let mono: Vec<(i32, PolyFunction)> =
        monomials(nv, max_deg).into_iter().map(|m| (m.iter().sum(), Poly::monomial(nv, m, int(1)))).collect();
    let (mut count, mut failures) = (0, 0);
    for (df, f) in &mono {
        for (dg, g) in &mono {
            if !mono.iter().any(|(dh, _)| keep(*df, *dg, *dh)) {
                continue;
            }
            let fg = gutt_star(f, g, &s);
            for (dh, h) in &mono {
                if !keep(*df, *dg, *dh) {
                    continue;
                }
                let left = gutt_star_series(&fg, &StarResult::classical(h), &s);
                let right = gutt_star_series(&StarResult::classical(f), &gutt_star(g, h, &s), &s);
                count += 1;
                if left != right {
                    failures += 1;
                }
            }
        }
    }
    (count, failures)
}

/// All monomial triples (the constant monomial included) of total degree `<= max_deg`.
pub fn star_associativity(n: usize, max_deg: i32) -> (usize, usize) {
    star_associativity_over(n, max_deg, |a, b, c| a + b + c <= max_deg)
}

/// All triples of monomials each of degree `<= max_each`.
pub fn star_associativity_per_factor(n: usize, max_each: i32) -> (usize, usize) {
    star_associativity_over(n, max_each, |_, _, _| true)
}

pub fn gl_n() -> Vec<Check> {
    let mut out = Vec::new();
    for n in 2..=4 {
        let s = r_bracket_constants(n);
        let r = jacobi_residual(&s);
        out.push(Check::new(format!("glN.jacobi.n={n}"), r.is_zero(), format!("residual {}", fmt_rational(&r))));
    }
    let bad = r_bracket_constants(2).perturbed(1, 2, 0, rat(1, 3));
    let r = jacobi_residual(&bad);
    out.push(Check::new(
        "glN.jacobi_negative_control",
        !r.is_zero(),
        format!("perturbed constant gives residual {}", fmt_rational(&r)),
    ));

    // a11 = p1, a12 = q1, a21 = q2, a22 = p2.
    let s = r_bracket_constants(2);
    let c = |i, j| coordinate(&s, i, j);
    let (p1, q1, q2, p2) = (c(0, 0), c(0, 1), c(1, 0), c(1, 1));
    let half = |x: &PolyFunction| x.scale(&rat(1, 2));
    let fundamentals = [
        ("{p1,q1} = q1/2", lie_poisson_bracket(&p1, &q1, &s), half(&q1)),
        ("{p1,q2} = q2/2", lie_poisson_bracket(&p1, &q2, &s), half(&q2)),
        ("{q1,q2} = 0", lie_poisson_bracket(&q1, &q2, &s), Poly::zero(4)),
        ("{p2,q1} = -q1/2", lie_poisson_bracket(&p2, &q1, &s), -&half(&q1)),
        ("{p2,q2} = -q2/2", lie_poisson_bracket(&p2, &q2, &s), -&half(&q2)),
        ("{p1,p2} = 0", lie_poisson_bracket(&p1, &p2, &s), Poly::zero(4)),
    ];
    let wrong: Vec<&str> = fundamentals.iter().filter(|(_, a, b)| a != b).map(|(l, _, _)| *l).collect();
    out.push(Check::new(
        "glN.fundamental_brackets.n=2",
        wrong.is_empty(),
        if wrong.is_empty() { "all six exact".to_string() } else { format!("mismatch: {}", wrong.join(", ")) },
    ));

    for n in 2..=3 {
        let s = r_bracket_constants(n);
        let h = -&trace_power(n, 2);
        let rhs = cholesky_rhs_polynomial(n);
        let mut ok = true;
        for i in 0..n {
            for j in 0..n {
                ok &= lie_poisson_bracket(&h, &coordinate(&s, i, j), &s) == rhs[i][j];
            }
        }
        out.push(Check::new(format!("glN.lax_identity.n={n}"), ok, "{-tr L^2, L_ij} = [P, L]_ij as polynomials"));
        let t1 = trace_power(n, 1);
        let casimir = monomials(n * n, 2)
            .into_iter()
            .all(|m| lie_poisson_bracket(&t1, &Poly::monomial(n * n, m, int(1)), &s).is_zero());
        out.push(Check::new(format!("glN.trace_casimir.n={n}"), casimir, "{tr L, g} = 0 for monomials of degree <= 2"));
    }

    let rep = quantum_realization_check();
    let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.residual.is_zero()).map(|c| c.label.as_str()).collect();
    out.push(Check::new(
        "glN.quantum_realization.n=2",
        rep.passed(),
        if failed.is_empty() { format!("{} relations exact", rep.checks.len()) } else { failed.join(", ") },
    ));

    let l = Matrix::<Rational>::from_rows(vec![vec![int(1), int(2)], vec![int(3), int(4)]]).expect("2x2");
    let (l0, scalar) = sl_reduction(&l);
    out.push(Check::new(
        "glN.sl_reduction",
        l0.trace().is_zero() && scalar == rat(5, 2),
        format!("l = {}", fmt_rational(&scalar)),
    ));

    for (n, deg) in [(2, 3), (3, 2), (3, 3)] {
        let (count, failures) = star_associativity(n, deg);
        out.push(Check::new(
            format!("star.associativity.n={n}.total_degree={deg}"),
            failures == 0,
            format!("{count} monomial triples of total degree <= {deg}, {failures} failures"),
        ));
    }
    let (count, failures) = star_associativity_per_factor(2, 2);
    out.push(Check::new(
        "star.associativity.n=2.factor_degree=2",
        failures == 0,
        format!("{count} monomial triples with each degree <= 2, {failures} failures"),
    ));
    out.extend(star_bracket_checks(2, 20));
    out
}

/// Order-`ħ` antisymmetric part and classical limit on random degree-`≤ 3` pairs.
pub fn star_bracket_checks(n: usize, pairs: usize) -> Vec<Check> {
    let s = r_bracket_constants(n);
    let nv = n * n;
    let mut rng = rng();
    let (mut bracket_fail, mut classical_fail) = (0, 0);
    for _ in 0..pairs {
        let f = random_poly(&mut rng, nv, 3);
        let g = random_poly(&mut rng, nv, 3);
        let fg = gutt_star(&f, &g, &s);
        let gf = gutt_star(&g, &f, &s);
        let diff = fg.sub(&gf);
        if diff.order(1, nv) != lie_poisson_bracket(&f, &g, &s) || !diff.order(0, nv).is_zero() {
            bracket_fail += 1;
        }
        if fg.order(0, nv) != &f * &g {
            classical_fail += 1;
        }
    }
    vec![
        Check::new(
            format!("star.bracket_limit.n={n}"),
            bracket_fail == 0,
            format!("{pairs} random pairs, {bracket_fail} failures"),
        ),
        Check::new(
            format!("star.classical_limit.n={n}"),
            classical_fail == 0,
            format!("{pairs} random pairs, {classical_fail} failures"),
        ),
    ]
}

// --------------------------------------------------------------- spectral

pub const SPECTRAL_N: usize = 4096;

pub fn spectral_equivalence_check() -> Check {
    let s1 = solve(&problems::schrodinger1((-8.0, 3.0)), SPECTRAL_N, 5);
    let s2 = solve(&problems::schrodinger2(((-8.0f64).exp(), 3.0f64.exp())), SPECTRAL_N, 5);
    match (s1, s2) {
        (Ok(a), Ok(b)) => {
            let c = compare_spectra(&a, &b, 5, 1e-3);
            Check::new(
                "spectral.schrodinger_equivalence",
                c.passed,
                format!("N = {SPECTRAL_N}, k = 5: relative deviation {:.3e}, tolerance 1e-3", c.max_relative_deviation),
            )
        }
        (Err(e), _) | (_, Err(e)) => Check::new("spectral.schrodinger_equivalence", false, e.to_string()),
    }
}

pub fn oscillator_check(n: usize) -> Check {
    let name = format!("spectral.oscillator.N={n}");
    match solve(&problems::toy_q(0, (-10.0, 10.0)), n, 6) {
        Ok(s) => {
            let dev = s.values.iter().enumerate().map(|(k, e)| (e - (k as f64 + 0.5)).abs()).fold(0.0, f64::max);
            Check::new(name, dev < 1e-4, format!("k <= 5: max |E_k - (k + 1/2)| = {dev:.3e}, tolerance 1e-4"))
        }
        Err(e) => Check::new(name, false, e.to_string()),
    }
}

pub fn spectral_suite() -> Vec<Check> {
    let mut out = vec![spectral_equivalence_check(), oscillator_check(SPECTRAL_N)];

    let p2 = problems::schrodinger2((0.1, 10.0));
    let read = p2.a.terms() == [spectral::ExpTerm::power(-1.0, 2.0)]
        && p2.b.terms() == [spectral::ExpTerm::power(-1.0, 1.0)]
        && p2.c.terms() == [spectral::ExpTerm::power(1.0, 2.0)]
        && p2.energy_scale == 2.0;
    out.push(Check::new("spectral.build_schrodinger2", read, p2.describe()));

    let p1 = problems::schrodinger1((-8.0, 3.0));
    let exact = change_of_variable(&p2, VarMap::Exp, (-8.0, 3.0)).map(|p| p.same_operator(&p1, 1e-14));
    out.push(Check::new(
        "spectral.change_of_variable.exp",
        exact == Ok(true),
        format!("q = e^Q maps the right-ordered equation onto {}", p1.describe()),
    ));

    for n in [-1, 0, 2, 3] {
        let qd = (0.05, 6.0);
        let ud = problems::u_domain(n, qd);
        let name = format!("spectral.u_substitution.n={n}");
        let res = problems::u_map(n).and_then(|m| change_of_variable(&problems::toy_q(n, qd), m, ud));
        match res {
            Ok(p) => {
                let target = problems::toy_u(n, ud);
                out.push(Check::new(name, p.same_operator(&target, 1e-12), target.describe()));
            }
            Err(e) => out.push(Check::new(name, false, e.to_string())),
        }
    }

    // Printed substitution u = q^{n-1}/(1-n), i.e. q = ((1-n)u)^{1/(n-1)}, against the adopted one.
    let n = 2;
    let printed = VarMap::Power { k: (1 - n) as f64, r: 1.0 / (n - 1) as f64 };
    let qd: (f64, f64) = (0.5, 4.0);
    let pd = {
        let (a, b) = (qd.0.powi(n - 1) / (1 - n) as f64, qd.1.powi(n - 1) / (1 - n) as f64);
        (a.min(b), a.max(b))
    };
    let printed_a = change_of_variable(&problems::toy_q(n, qd), printed, pd).map(|p| p.a.render());
    let adopted = problems::u_map(n)
        .and_then(|m| change_of_variable(&problems::toy_q(n, qd), m, problems::u_domain(n, qd)))
        .map(|p| (p.a.render(), p.b.is_zero()));
    out.push(Check::new(
        "typo.u_substitution",
        matches!(&adopted, Ok((a, true)) if a == "-0.5"),
        format!(
            "n = 2: printed u = q^(n-1)/(1-n) gives a(u) = {}; u = q^(1-n)/(1-n) gives a(u) = {}",
            printed_a.unwrap_or_else(|e| e.to_string()),
            adopted.map(|x| x.0).unwrap_or_else(|e| e.to_string())
        ),
    ));

    match solve(&problems::free_box((0.0, std::f64::consts::PI)), 2000, 5) {
        Ok(s) => {
            let dev = s
                .values
                .iter()
                .enumerate()
                .map(|(k, e)| (e - ((k + 1) * (k + 1)) as f64 / 2.0).abs())
                .fold(0.0, f64::max);
            out.push(Check::within("spectral.box", dev, 1e-4));
        }
        Err(e) => out.push(Check::new("spectral.box", false, e.to_string())),
    }
    out
}

/// Criterion-style helper: `{H, I}` under `Ωₙ` as an exact polynomial.
pub fn omega_involution(n: i32) -> Poly<Rational> {
    let (h, i) = pi_lambda_invariants();
    PolyPoissonStructure::omega(n).bracket(&h, &i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        assert_eq!("glN".parse::<Suite>().unwrap(), Suite::GlN);
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn report_is_sorted_and_rendered() {
        let r = Report::from_checks(vec![Check::new("b", true, "x"), Check::new("a", false, "y")]);
        assert_eq!(r.to_string(), "a: FAIL (y)\nb: PASS (x)\n");
        assert!(!r.passed());
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials(2, 2).len(), 6);
    }
}
