//! Independent recomputations of values the engine produces.

use matlis::constructors::{build_recipe, cyclic_xd, default_window, local_coh_vars, ses_xd, ZOO};
use matlis::derham::{build_summand, derham_cohomology, summand_cohomology};
use matlis::dual::{matlis_dual, summand_duality_holds};
use matlis::gmodule::{Generator, GradingMode, GradingSpec, Label};
use matlis::linalg::{rational, Rational};
use matlis::weyl::{Monomial, WeylOp};
use num_traits::Zero;

fn l(v: &[i64]) -> Label {
    Label::new(v.to_vec())
}

fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    (1..=k).fold(1, |acc, i| acc * (n - k + i) / i)
}

#[test]
fn coarse_piece_dimensions_are_binomials() {
    for n in 1..=3i64 {
        let r = build_recipe(&format!("R(n={n})")).unwrap();
        let e = build_recipe(&format!("E(n={n})")).unwrap();
        for (a, &d) in r.dims() {
            let t = a.coords()[0];
            assert_eq!(d as i64, if t >= 0 { binomial(t + n - 1, n - 1) } else { 0 });
        }
        for (a, &d) in e.dims() {
            // x^β with all β_i <= -1 and Σβ = t: compositions of -t into n positive parts
            let t = a.coords()[0];
            assert_eq!(d as i64, if -t >= n { binomial(-t - 1, n - 1) } else { 0 });
        }
    }
}

/// Normal form of `x^a d^b` modulo the left ideal `D·xd` in one variable,
/// as `(label, coefficient)` on the basis `x^a` (label `a`), `d^b` (label `-b`).
fn reduce(op: &WeylOp) -> Vec<(i64, Rational)> {
    let mut out: std::collections::BTreeMap<i64, Rational> = Default::default();
    for (m, c) in op.terms() {
        let (mut a, mut b) = (m.x[0] as i64, m.d[0] as i64);
        let mut coeff = c.clone();
        // x^a d^b = x^(a-1) (x d^b) and x d^b ≡ -(b-1) d^(b-1)
        while a > 0 && b > 0 {
            coeff *= rational(-(b - 1));
            a -= 1;
            b -= 1;
        }
        if coeff.is_zero() {
            continue;
        }
        let label = if b == 0 { a } else { -b };
        *out.entry(label).or_insert_with(Rational::zero) += coeff;
    }
    out.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

fn basis_op(label: i64) -> WeylOp {
    let (x, d) = if label >= 0 { (label as u32, 0) } else { (0, (-label) as u32) };
    WeylOp::monomial(1, Monomial { x: vec![x], d: vec![d] }, rational(1))
}

#[test]
fn cyclic_module_matches_symbolic_reduction() {
    let w = default_window(&GradingSpec::new(1, GradingMode::Coarse));
    let m = cyclic_xd(&w).unwrap();
    for a in w.labels() {
        let t = a.coords()[0];
        for (g, gen) in [(Generator::X, WeylOp::x(1, 0)), (Generator::D, WeylOp::d(1, 0))] {
            let Some(mat) = m.action(g, 0, &a) else { continue };
            let image = reduce(&gen.multiply(&basis_op(t)).unwrap());
            let target = m.target(g, 0, &a).coords()[0];
            let expected = image.iter().find(|(lab, _)| *lab == target).map(|(_, c)| c.clone());
            assert!(image.iter().all(|(lab, _)| *lab == target));
            assert_eq!(mat.get(0, 0), expected.unwrap_or_else(Rational::zero), "{g:?} at {t}");
        }
    }
}

/// One-variable factors: `R` has `H^0 = 1` only at summand 0; `E` has
/// `H^1 = 1` only at summand 0. The tensor product puts `H^{|S|} = 1` at
/// the origin and nothing elsewhere.
#[test]
fn local_cohomology_matches_kunneth_per_label() {
    for n in 2..=3usize {
        let spec = GradingSpec::new(n, GradingMode::Fine);
        let subsets: Vec<Vec<usize>> = (1..(1usize << n))
            .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect())
            .collect();
        for s in subsets {
            let m = local_coh_vars(&spec, &s, &default_window(&spec)).unwrap();
            let table = derham_cohomology(&m);
            let mut certified = 0;
            for a in matlis::gmodule::box_labels(m.window().lo(), m.window().hi()) {
                for i in 0..=n {
                    let Some(d) = table.certified_dim(&a, i) else { continue };
                    certified += 1;
                    let expected = usize::from(a.is_zero() && i == s.len());
                    assert_eq!(d, expected, "S={s:?} a={a} i={i}");
                }
            }
            assert!(certified > 0);
            let totals: Vec<usize> = (0..=n).map(|i| usize::from(i == s.len())).collect();
            assert_eq!(table.total_dims(), totals);
            assert!(table.is_complete());
        }
    }
}

#[test]
fn one_variable_injective_hull_by_hand() {
    // d: x^t ↦ t x^(t-1) is a bijection E_t → E_(t-1) for t <= -1, and E_0 = 0,
    // so the summand at a is E_a → E_(a-1): H^1 = 1 at a = 0, zero elsewhere.
    let e = build_recipe("E(n=1)").unwrap();
    for a in -6..=6 {
        let s = build_summand(&e, &l(&[a]));
        let expected = if a == 0 { vec![0, 1] } else { vec![0, 0] };
        assert_eq!(summand_cohomology(&s), expected, "a={a}");
    }
}

#[test]
fn dual_of_r_uses_the_canonical_basis_correspondence() {
    // (x^α)^∨ in DD(R) corresponds to x^(-α-1) in E, position by position
    for n in 1..=3 {
        let dr = matlis_dual(&build_recipe(&format!("R(n={n})")).unwrap());
        let e = build_recipe(&format!("E(n={n})")).unwrap();
        let (dn, en) = (dr.basis_names().unwrap(), e.basis_names().unwrap());
        for (a, names) in dn {
            for (dual_name, e_name) in names.iter().zip(&en[a]) {
                let alpha = parse_monomial(dual_name.trim_start_matches('(').trim_end_matches(")^v"), n);
                let beta = parse_monomial(e_name, n);
                let shifted: Vec<i64> = alpha.iter().map(|x| -x - 1).collect();
                assert_eq!(shifted, beta, "n={n} label {a}");
            }
        }
    }
}

fn parse_monomial(s: &str, n: usize) -> Vec<i64> {
    let mut e = vec![0; n];
    if s == "1" {
        return e;
    }
    for factor in s.split('*') {
        let (var, pow) = factor.split_once('^').unwrap_or((factor, "1"));
        let i: usize = var.trim_start_matches('x').parse().unwrap();
        e[i - 1] = pow.parse().unwrap();
    }
    e
}

#[test]
fn transposed_de_rham_differentials_are_koszul_differentials_of_the_dual() {
    for recipe in ZOO.iter().filter(|r| !r.contains("n=3")) {
        let m = build_recipe(recipe).unwrap();
        let d = matlis_dual(&m);
        for a in m.window().labels() {
            assert!(summand_duality_holds(&m, &d, &a), "{recipe} at {a}");
        }
    }
}

#[test]
fn euler_characteristic_is_additive_on_the_short_exact_sequence() {
    let w = default_window(&GradingSpec::new(1, GradingMode::Coarse));
    let seq = ses_xd(&w).unwrap();
    let tables = [&seq.left, &seq.middle, &seq.right].map(derham_cohomology);
    let chi = |t: &matlis::derham::CohomologyTable, a: &Label| -> Option<i64> {
        Some(t.certified_dim(a, 0)? as i64 - t.certified_dim(a, 1)? as i64)
    };
    let mut checked = 0;
    for a in w.labels() {
        if let (Some(x), Some(y), Some(z)) = (chi(&tables[0], &a), chi(&tables[1], &a), chi(&tables[2], &a)) {
            assert_eq!(x - y + z, 0, "label {a}");
            checked += 1;
        }
    }
    assert!(checked >= 10);
    let totals: Vec<i64> = tables
        .iter()
        .map(|t| t.total(0).unwrap().dim as i64 - t.total(1).unwrap().dim as i64)
        .collect();
    assert_eq!(totals[0] - totals[1] + totals[2], 0);
}
