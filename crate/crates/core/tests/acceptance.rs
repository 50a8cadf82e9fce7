//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use matlis::constructors::{build_recipe, ZOO};
use matlis::derham::{build_summand, derham_cohomology, koszul_homology};
use matlis::dual::{eulerian_dual_check, evaluation_check, matlis_dual};
use matlis::gmodule::{is_eulerian, validate, Generator, GradedPresentation, Label};
use matlis::linalg::{ratio, rational, Rational};
use matlis::verify::{
    max_injections_from_r, max_surjections_onto_e, verify_duality, verify_noninjectivity, Verdict,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use common::*;

const POINCARE_LIMIT: Duration = Duration::from_secs(1);
const ZOO_LIMIT: Duration = Duration::from_secs(30);
const PROPERTY_LIMIT: Duration = Duration::from_secs(10);
const MUTATIONS: usize = 100;
const RANDOM_MATRICES: usize = 200;
const SEED: u64 = 0x5eed_2024;

type Outcome = Result<String, String>;

fn module(recipe: &str) -> GradedPresentation {
    build_recipe(recipe).unwrap_or_else(|e| panic!("{recipe}: {e}"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn totals(recipe: &str, expected: &[usize]) -> Result<(), String> {
    let t = derham_cohomology(&module(recipe));
    ensure(t.total_dims() == expected && t.is_complete(), || {
        format!("{recipe}: totals {:?} complete={} (want {expected:?})", t.total_dims(), t.is_complete())
    })
}

fn poincare() -> Outcome {
    for n in 1..=3usize {
        let start = Instant::now();
        let mut want = vec![0; n + 1];
        want[0] = 1;
        totals(&format!("R(n={n})"), &want)?;
        let took = start.elapsed();
        ensure(took <= POINCARE_LIMIT, || format!("R(n={n}) took {took:?}"))?;
    }
    Ok("R(n=1..3): H^0 = 1, H^i = 0 otherwise, complete".into())
}

fn top_cohomology_of_e() -> Outcome {
    for n in 1..=3usize {
        let mut want = vec![0; n + 1];
        want[n] = 1;
        totals(&format!("E(n={n})"), &want)?;
    }
    Ok("E(n=1..3): H^n = 1, H^i = 0 otherwise, complete".into())
}

fn cyclic_module() -> Outcome {
    totals("XD", &[0, 0])?;
    Ok("XD: H^0 = H^1 = 0, complete".into())
}

const DUALITY_ZOO: &[&str] = &[
    "R(n=1)",
    "R(n=2)",
    "R(n=3)",
    "E(n=1)",
    "E(n=2)",
    "E(n=3)",
    "shift(R(n=2),2)",
    "shift(R(n=2),-2)",
    "shift(E(n=2),2)",
    "shift(E(n=2),-2)",
    "XD",
    "Hvars(n=2,S=1)",
    "Hvars(n=3,S=1,2)",
    "sum(E(n=2),E(n=2))",
];

fn duality() -> Outcome {
    let start = Instant::now();
    for recipe in DUALITY_ZOO.iter().chain(ZOO) {
        let r = verify_duality(&module(recipe), recipe);
        ensure(r.verdict == Verdict::Pass, || format!("{recipe}: {:?} {} vs {}", r.verdict, r.left, r.right))?;
    }
    let took = start.elapsed();
    ensure(took <= ZOO_LIMIT, || format!("zoo took {took:?}"))?;
    Ok(format!("{} modules, H^i(M) = H^(n-i)(DD(M)) in {took:.2?}", DUALITY_ZOO.len() + ZOO.len()))
}

fn surjections() -> Outcome {
    for (recipe, s) in [
        ("E(n=1)", 1),
        ("E(n=2)", 1),
        ("E(n=3)", 1),
        ("R(n=2)", 0),
        ("XD", 0),
        ("sum(E(n=2),E(n=2))", 2),
        ("Hvars(n=2,S=1,2)", 1),
    ] {
        let m = module(recipe);
        let c = max_surjections_onto_e(&m).map_err(|e| format!("{recipe}: {e}"))?;
        ensure(c.s == s && c.h0_dual == s, || format!("{recipe}: {c:?}, want {s}"))?;
        if m.n() <= 2 {
            ensure(c.grhom == Some(s) && c.surjective == Some(true), || format!("{recipe}: {c:?}"))?;
        }
    }
    Ok("E:1 R:0 XD:0 E+E:2 Hvars(S=1,2):1, equal to H^0(DD(M)) and to solved Hom(M,E)".into())
}

fn injections() -> Outcome {
    for (recipe, s) in [("R(n=1)", 1), ("R(n=2)", 1), ("sum(R(n=2),R(n=2))", 2), ("E(n=2)", 0), ("XD", 0)] {
        let c = max_injections_from_r(&module(recipe)).map_err(|e| format!("{recipe}: {e}"))?;
        ensure(c.s == s && c.maps == s && c.d_linear && c.degreewise_injective, || {
            format!("{recipe}: {c:?}, want {s}")
        })?;
    }
    Ok("R:1 R+R:2 E:0 XD:0, constructed maps D-linear and injective per degree".into())
}

fn eulerian() -> Outcome {
    for recipe in ["R(n=1)", "R(n=2)", "E(n=2)", "E(n=3)", "Hvars(n=2,S=1)", "Hvars(n=3,S=1,2)", "XD"] {
        let m = module(recipe);
        ensure(is_eulerian(&m).eulerian, || format!("{recipe} is not Eulerian"))?;
        ensure(eulerian_dual_check(&m) == Ok(true), || format!("{recipe}: dual not Eulerian"))?;
    }
    let shifted = is_eulerian(&module("shift(R(n=1),1)"));
    let (label, diff) = shifted.witness.clone().ok_or("shift(R(n=1),1) has no witness")?;
    ensure(!shifted.eulerian && !diff.is_zero(), || "shift(R(n=1),1) passes".into())?;
    Ok(format!("R, E, Hvars, XD and their duals Eulerian; shift(R,1) fails at {label}"))
}

fn dual_identities() -> Outcome {
    for n in 1..=3 {
        let r = module(&format!("R(n={n})"));
        let e = module(&format!("E(n={n})"));
        ensure(matlis_dual(&r).without_names().to_json() == e.without_names().to_json(), || format!("DD(R(n={n})) != E"))?;
        ensure(matlis_dual(&e).without_names().to_json() == r.without_names().to_json(), || format!("DD(E(n={n})) != R"))?;
    }
    for recipe in ZOO {
        ensure(evaluation_check(&module(recipe)), || format!("{recipe}: DD(DD(M)) != M"))?;
    }
    Ok("DD(R) = E and DD(E) = R serialized; DD(DD(M)) = M on the zoo".into())
}

fn koszul_swap() -> Outcome {
    for recipe in ZOO {
        let m = module(recipe);
        let n = m.n();
        let (dr, k) = (derham_cohomology(&m), koszul_homology(&m, false));
        for i in 0..=n {
            ensure(k.total(i) == dr.total(n - i), || format!("{recipe}: h_{i} != H^{}", n - i))?;
        }
        let total = m.spec().total_degree();
        for ((a, i), e) in &k.entries {
            if e.certified {
                ensure(dr.certified_dim(&a.add(&total), n - i) == Some(e.dim), || format!("{recipe} at {a}"))?;
            }
        }
    }
    Ok(format!("h_i = H^(n-i) on {} zoo modules, totals and per label", ZOO.len()))
}

fn noninjectivity() -> Outcome {
    let r = verify_noninjectivity();
    ensure(r.verdict == Verdict::Pass, || format!("{:?}: {} {}", r.verdict, r.left, r.right))?;
    Ok(format!("exact, D-linear, s = {}", r.right["s_middle"]))
}

/// Labels whose relation checks stay inside the box.
fn interior(m: &GradedPresentation) -> Vec<Label> {
    let (lo, hi) = (m.window().lo(), m.window().hi());
    m.window()
        .labels()
        .into_iter()
        .filter(|a| {
            (0..a.rank()).all(|k| a.coords()[k] - 2 >= lo.coords()[k] && a.coords()[k] + 2 <= hi.coords()[k])
        })
        .collect()
}

/// Commutators and the declared Euler shift, recomputed from the action
/// matrices on every label where the composites are defined.
fn relations_hold(m: &GradedPresentation) -> bool {
    let spec = m.spec();
    let n = m.n();
    let compose = |a: &Label, first: (Generator, usize), second: (Generator, usize)| {
        let f = m.action(first.0, first.1, a)?;
        let s = m.action(second.0, second.1, &m.target(first.0, first.1, a))?;
        Some(s.mul(&f).unwrap())
    };
    for a in m.window().labels() {
        let dim = m.dims()[&a];
        for i in 0..n {
            for j in 0..n {
                for g in [Generator::X, Generator::D] {
                    if let (Some(p), Some(q)) = (compose(&a, (g, i), (g, j)), compose(&a, (g, j), (g, i))) {
                        if p != q {
                            return false;
                        }
                    }
                }
                let dx = compose(&a, (Generator::X, j), (Generator::D, i));
                let xd = compose(&a, (Generator::D, i), (Generator::X, j));
                if let (Some(p), Some(q)) = (dx, xd) {
                    let c = p.sub(&q).unwrap();
                    let ok = if i == j { c == matlis::linalg::ExactMatrix::identity(dim) } else { c.is_zero() };
                    if !ok {
                        return false;
                    }
                }
            }
        }
        if let Some(c) = m.euler_shift() {
            let shifted = a.add(c);
            let per_var: Vec<Option<_>> = (0..n).map(|i| compose(&a, (Generator::D, i), (Generator::X, i))).collect();
            if per_var.iter().any(Option::is_none) {
                continue;
            }
            let per_var: Vec<_> = per_var.into_iter().map(Option::unwrap).collect();
            let scalar = |v: i64| matlis::linalg::ExactMatrix::scalar(dim, &rational(v));
            let ok = match spec.mode() {
                matlis::gmodule::GradingMode::Coarse => {
                    let sum = per_var.iter().fold(scalar(0), |acc, p| acc.add(p).unwrap());
                    sum == scalar(shifted.coords()[0])
                }
                matlis::gmodule::GradingMode::Fine => {
                    per_var.iter().enumerate().all(|(i, p)| *p == scalar(shifted.coords()[i]))
                }
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Mutates one entry of one action matrix at an interior label until
/// `MUTATIONS` mutants break a relation. Returns how many of those
/// `validate` caught and how many mutants turned out to be valid modules
/// (validate must accept those).
fn mutation_fuzz(rng: &mut StdRng) -> Result<(usize, usize), String> {
    let pool = ["R(n=1)", "E(n=1)", "XD", "R(n=2)", "E(n=2)", "Hvars(n=2,S=1)", "sum(R(n=1),E(n=1))"];
    let modules: Vec<GradedPresentation> = pool.iter().map(|r| module(r)).collect();
    let mut caught = 0;
    let mut broken = 0;
    let mut still_valid = 0;
    while broken < MUTATIONS {
        let m = modules.choose(rng).unwrap();
        let a = interior(m).choose(rng).unwrap().clone();
        let g = if rng.gen_bool(0.5) { Generator::X } else { Generator::D };
        let i = rng.gen_range(0..m.n());
        let mat = m.action(g, i, &a).unwrap();
        if mat.rows() == 0 || mat.cols() == 0 {
            continue;
        }
        let (r, c) = (rng.gen_range(0..mat.rows()), rng.gen_range(0..mat.cols()));
        let delta: Rational = [rational(1), rational(-1), rational(2), ratio(1, 2)].choose(rng).unwrap().clone();
        let mutated = m.with_action(g, i, &a, mat.with_entry(r, c, mat.get(r, c) + delta)).unwrap();
        let flagged = !validate(&mutated).is_ok();
        if relations_hold(&mutated) {
            still_valid += 1;
            ensure(!flagged, || format!("validate rejects a valid mutant at {a}"))?;
        } else {
            broken += 1;
            caught += usize::from(flagged);
        }
    }
    Ok((caught, still_valid))
}

fn random_matrices(rng: &mut StdRng) -> Result<(), String> {
    for k in 0..RANDOM_MATRICES {
        let (rows, cols) = (rng.gen_range(1..9), rng.gen_range(1..9));
        let inner = rng.gen_range(0..6);
        let a = random_low_rank(rng, rows, cols, inner);
        let rank = a.rank();
        ensure(rank == naive_rank(&a), || format!("matrix {k}: rank differs from naive elimination"))?;
        ensure(rank == a.transpose().rank(), || format!("matrix {k}: rank differs from transpose"))?;
        ensure(rank + a.kernel_basis().len() == cols, || format!("matrix {k}: rank-nullity fails"))?;
    }
    Ok(())
}

fn random_sums(rng: &mut StdRng) -> Result<usize, String> {
    let families: [&[&str]; 3] = [
        &["R(n=1)", "E(n=1)", "XD", "shift(E(n=1),2)"],
        &["R(n=2)", "E(n=2)", "shift(R(n=2),1)"],
        &["Hvars(n=2,S=1)", "Hvars(n=2,S=2)", "E(n=2,mode=fine)"],
    ];
    let mut checked = 0;
    for _ in 0..12 {
        let f = families.choose(rng).unwrap();
        let (m, n) = (module(f.choose(rng).unwrap()), module(f.choose(rng).unwrap()));
        let sum = m.direct_sum(&n).map_err(|e| e.to_string())?;
        let tables = [&m, &n, &sum].map(derham_cohomology);
        for a in sum.window().labels() {
            let s = build_summand(&sum, &a);
            for w in s.differentials.windows(2) {
                ensure(w[1].mul(&w[0]).unwrap().is_zero(), || format!("d∘d != 0 at {a}"))?;
            }
            for i in 0..=sum.n() {
                let dims = tables.each_ref().map(|t| t.certified_dim(&a, i));
                if let [Some(x), Some(y), Some(z)] = dims {
                    ensure(x + y == z, || format!("additivity fails at {a}, degree {i}"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

fn properties() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(SEED);
    let (caught, still_valid) = mutation_fuzz(&mut rng)?;
    ensure(caught == MUTATIONS, || format!("validate caught {caught}/{MUTATIONS} mutations"))?;
    random_matrices(&mut rng)?;
    let checked = random_sums(&mut rng)?;
    let took = start.elapsed();
    ensure(took <= PROPERTY_LIMIT, || format!("took {took:?}"))?;
    Ok(format!(
        "{caught}/{MUTATIONS} relation-breaking mutations caught ({still_valid} mutants were valid modules and were accepted), {RANDOM_MATRICES} matrices, {checked} additivity checks, {took:.2?}"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("poincare lemma", poincare),
        ("top cohomology of E", top_cohomology_of_e),
        ("cyclic module XD", cyclic_module),
        ("graded duality on the zoo", duality),
        ("surjections onto E", surjections),
        ("injections from R", injections),
        ("eulerian preservation", eulerian),
        ("dual of R and E, double dual", dual_identities),
        ("koszul index swap", koszul_swap),
        ("E is not injective", noninjectivity),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
