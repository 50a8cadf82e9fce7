//! Graded Matlis dual of presentations and maps.
//!
//! `DD(M)_a` is the dual of `M_{-a-D}` (with `D` the degree of
//! `x_1⋯x_n`), written in the dual basis in the primal order. `x_i` acts by
//! the transpose of `x_i` and `d_i` by minus the transpose of `d_i`.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::derham::{build_koszul_summand, build_summand};
use crate::gmodule::{is_eulerian, Generator, GradedPresentation, GradingSpec, Label, ModuleError};
use crate::linalg::{ExactMatrix, Rational};
use crate::maps::GradedMap;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualError {
    #[error("not a map of presentations: {0}")]
    NotAMapOfPresentations(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// Label of the primal piece dual to `DD(M)_b`.
pub fn reflect(spec: &GradingSpec, b: &Label) -> Label {
    b.neg().sub(&spec.total_degree())
}

pub fn matlis_dual(m: &GradedPresentation) -> GradedPresentation {
    let spec = m.spec().clone();
    let window = m.window().reflected(&spec.total_degree());
    let labels = window.labels();
    let dims = labels
        .iter()
        .map(|b| (b.clone(), m.dims()[&reflect(&spec, b)]))
        .collect();
    let mut actions: [Vec<BTreeMap<Label, ExactMatrix>>; 2] = [Vec::new(), Vec::new()];
    for (slot, g) in [Generator::X, Generator::D].into_iter().enumerate() {
        for i in 0..spec.n() {
            let mut maps = BTreeMap::new();
            for b in &labels {
                // the dual map b → t is the transpose of the primal map into reflect(b)
                let t = m.target(g, i, b);
                let src = reflect(&spec, &t);
                if !m.covered(&src) {
                    continue;
                }
                let primal = m.action(g, i, &src).expect("both ends covered");
                let mat = match g {
                    Generator::X => primal.transpose(),
                    Generator::D => primal.transpose().neg(),
                };
                maps.insert(b.clone(), mat);
            }
            actions[slot].push(maps);
        }
    }
    let names = m.basis_names().map(|names| {
        labels
            .iter()
            .map(|b| {
                let v = names[&reflect(&spec, b)].iter().map(|s| format!("({s})^v")).collect();
                (b.clone(), v)
            })
            .collect()
    });
    let [x, d] = actions;
    GradedPresentation::new(
        spec,
        window,
        dims,
        x,
        d,
        names,
        m.euler_shift().map(Label::neg),
    )
    .expect("the dual of a well-formed presentation is well formed")
}

/// `DD(f): DD(N) → DD(M)` for `f: M → N` of degree `d`; the block at dual
/// label `b` is the transpose of `f` at `-b-D-d`, and the degree stays `d`.
pub fn dual_map(
    f: &GradedMap,
    source: &GradedPresentation,
    target: &GradedPresentation,
    claim_d_linear: bool,
) -> Result<GradedMap, DualError> {
    if source.spec() != target.spec() {
        return Err(DualError::NotAMapOfPresentations("different grading specs".into()));
    }
    f.check_shapes(source, target)
        .map_err(|e| DualError::NotAMapOfPresentations(e.to_string()))?;
    if claim_d_linear {
        if let Err(a) = f.is_d_linear(source, target) {
            return Err(DualError::NotAMapOfPresentations(format!(
                "does not commute with the actions at {a}"
            )));
        }
    }
    let spec = source.spec();
    let blocks = f
        .blocks()
        .iter()
        .map(|(a, block)| (reflect(spec, &a.add(f.degree())), block.transpose()))
        .collect();
    Ok(GradedMap::new(f.degree().clone(), blocks))
}

/// Socle coordinate of `v ∈ E_a`: the coefficient of `x_1^-1⋯x_n^-1`.
pub fn residue(spec: &GradingSpec, a: &Label, v: &[Rational]) -> Rational {
    if *a == spec.total_degree().neg() && v.len() == 1 {
        v[0].clone()
    } else {
        Rational::zero()
    }
}

/// `DD(DD(M))` equals `M` piece by piece and matrix by matrix.
pub fn evaluation_check(m: &GradedPresentation) -> bool {
    let dd = matlis_dual(&matlis_dual(m));
    dd.without_names() == m.without_names()
}

/// Whether the dual of an Eulerian module is Eulerian.
pub fn eulerian_dual_check(m: &GradedPresentation) -> Result<bool, DualError> {
    let report = is_eulerian(m);
    if !report.eulerian {
        let at = report.witness.map(|(a, _)| a.to_string()).unwrap_or_default();
        return Err(DualError::PreconditionFailed(format!("module is not Eulerian (fails at {at})")));
    }
    Ok(is_eulerian(&matlis_dual(m)).eulerian)
}

/// Each transposed de Rham differential of `M` at `a` equals the Koszul
/// differential of `DD(M)` for `-d` at the reflected label, one degree up.
pub fn summand_duality_holds(m: &GradedPresentation, dual: &GradedPresentation, a: &Label) -> bool {
    let dr = build_summand(m, a);
    let k = build_koszul_summand(dual, &reflect(m.spec(), a), true);
    dr.certified == k.certified
        && dr
            .differentials
            .iter()
            .zip(&k.differentials)
            .all(|(d, kd)| d.transpose() == *kd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{build_recipe, ses_xd, default_window};
    use crate::gmodule::{validate, GradingMode};
    use crate::linalg::rational;

    fn l(v: &[i64]) -> Label {
        Label::new(v.to_vec())
    }

    #[test]
    fn dual_of_r_is_e() {
        for (r, e) in [
            ("R(n=1)", "E(n=1)"),
            ("R(n=2)", "E(n=2)"),
            ("R(n=3)", "E(n=3)"),
            ("R(n=2,mode=fine)", "E(n=2,mode=fine)"),
        ] {
            let r = build_recipe(r).unwrap();
            let e = build_recipe(e).unwrap();
            assert_eq!(matlis_dual(&r).without_names(), e.without_names());
            assert_eq!(matlis_dual(&e).without_names(), r.without_names());
        }
    }

    #[test]
    fn dual_validates_and_is_reflexive() {
        for recipe in crate::constructors::ZOO {
            let m = build_recipe(recipe).unwrap();
            let d = matlis_dual(&m);
            assert!(validate(&d).is_ok(), "{recipe}");
            assert!(evaluation_check(&m), "{recipe}");
        }
        assert!(evaluation_check(&build_recipe("shift(E(n=1),3)").unwrap()));
    }

    #[test]
    fn residue_values() {
        let spec = GradingSpec::new(2, GradingMode::Coarse);
        assert_eq!(residue(&spec, &l(&[-2]), &[rational(1)]), rational(1));
        assert_eq!(residue(&spec, &l(&[-3]), &[rational(1), rational(0)]), rational(0));
        let e = build_recipe("E(n=2)").unwrap();
        for a in e.window().labels() {
            for i in 0..2 {
                let Some(mat) = e.d_map(i, &a) else { continue };
                let t = e.target(Generator::D, i, &a);
                for c in 0..mat.cols() {
                    let mut w = vec![rational(0); mat.cols()];
                    w[c] = rational(1);
                    assert_eq!(residue(&spec, &t, &mat.mul_vec(&w).unwrap()), rational(0));
                }
            }
        }
    }

    #[test]
    fn eulerian_dual() {
        for recipe in ["R(n=2)", "E(n=2)", "Hvars(n=2,S=1)", "XD"] {
            assert_eq!(eulerian_dual_check(&build_recipe(recipe).unwrap()), Ok(true), "{recipe}");
        }
        assert!(matches!(
            eulerian_dual_check(&build_recipe("shift(R(n=1),1)").unwrap()),
            Err(DualError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn dual_maps() {
        let w = default_window(&GradingSpec::new(1, GradingMode::Coarse));
        let s = ses_xd(&w).unwrap();
        let dp = dual_map(&s.project, &s.middle, &s.right, true).unwrap();
        let dr = matlis_dual(&s.right);
        let dm = matlis_dual(&s.middle);
        assert!(dp.check_shapes(&dr, &dm).is_ok());
        assert!(dp.is_d_linear(&dr, &dm).is_ok());
        assert!(dp.non_injective_labels().is_empty());
        let id = GradedMap::identity(&s.middle);
        let did = dual_map(&id, &s.middle, &s.middle, true).unwrap();
        assert_eq!(did, GradedMap::identity(&dm));
        // a non-linear map is rejected when linearity is claimed
        let mut blocks = s.project.blocks().clone();
        blocks.insert(l(&[2]), ExactMatrix::scalar(1, &rational(2)));
        let bad = GradedMap::new(l(&[0]), blocks);
        assert!(dual_map(&bad, &s.middle, &s.right, true).is_err());
        assert!(dual_map(&bad, &s.middle, &s.right, false).is_ok());
    }

    #[test]
    fn summand_duality() {
        for recipe in ["R(n=2)", "E(n=2)", "Hvars(n=2,S=1)", "XD", "sum(R(n=1),E(n=1))"] {
            let m = build_recipe(recipe).unwrap();
            let d = matlis_dual(&m);
            for a in m.window().labels() {
                assert!(summand_duality_holds(&m, &d, &a), "{recipe} at {a}");
            }
        }
    }
}
