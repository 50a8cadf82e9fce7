//! Homogeneous degreewise maps between presentations.

use std::collections::BTreeMap;

use crate::gmodule::{Generator, GradedPresentation, Label, ModuleError};
use crate::linalg::ExactMatrix;

/// A family of blocks `M_a → N_{a+degree}`, keyed by source label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    degree: Label,
    blocks: BTreeMap<Label, ExactMatrix>,
}

impl GradedMap {
    pub fn new(degree: Label, blocks: BTreeMap<Label, ExactMatrix>) -> Self {
        GradedMap { degree, blocks }
    }

    /// Identity on every box label of `m`.
    pub fn identity(m: &GradedPresentation) -> Self {
        let blocks = m
            .dims()
            .iter()
            .map(|(a, &d)| (a.clone(), ExactMatrix::identity(d)))
            .collect();
        GradedMap::new(m.spec().zero_label(), blocks)
    }

    /// Zero map of the given degree, on labels where both pieces are known.
    pub fn zero(m: &GradedPresentation, n: &GradedPresentation, degree: Label) -> Self {
        let blocks = m
            .dims()
            .iter()
            .filter_map(|(a, &d)| {
                let t = a.add(&degree);
                n.dim(&t).map(|rows| (a.clone(), ExactMatrix::zeros(rows, d)))
            })
            .collect();
        GradedMap::new(degree, blocks)
    }

    pub fn degree(&self) -> &Label {
        &self.degree
    }

    pub fn blocks(&self) -> &BTreeMap<Label, ExactMatrix> {
        &self.blocks
    }

    pub fn block(&self, a: &Label) -> Option<&ExactMatrix> {
        self.blocks.get(a)
    }

    /// `next ∘ self`, on labels where both blocks exist.
    pub fn then(&self, next: &GradedMap) -> Result<GradedMap, ModuleError> {
        let mut blocks = BTreeMap::new();
        for (a, f) in &self.blocks {
            if let Some(g) = next.blocks.get(&a.add(&self.degree)) {
                blocks.insert(a.clone(), g.mul(f)?);
            }
        }
        Ok(GradedMap::new(self.degree.add(&next.degree), blocks))
    }

    /// Checks block shapes against source and target pieces.
    pub fn check_shapes(
        &self,
        source: &GradedPresentation,
        target: &GradedPresentation,
    ) -> Result<(), ModuleError> {
        for (a, f) in &self.blocks {
            let cols = source.dim(a);
            let rows = target.dim(&a.add(&self.degree));
            if cols != Some(f.cols()) || rows != Some(f.rows()) {
                return Err(ModuleError::Malformed(format!(
                    "block at {a} has shape {:?}, pieces are {rows:?} x {cols:?}",
                    f.shape()
                )));
            }
        }
        Ok(())
    }

    /// Commutes with every `x_i` and `d_i` wherever both sides are defined.
    /// Returns the number of checked squares, or the first failing label.
    pub fn is_d_linear(
        &self,
        source: &GradedPresentation,
        target: &GradedPresentation,
    ) -> Result<usize, Label> {
        let mut checked = 0;
        for (a, f) in &self.blocks {
            for g in [Generator::X, Generator::D] {
                for i in 0..source.n() {
                    let a2 = source.target(g, i, a);
                    let (Some(f2), Some(gs), Some(gt)) = (
                        self.blocks.get(&a2),
                        source.action(g, i, a),
                        target.action(g, i, &a.add(&self.degree)),
                    ) else {
                        continue;
                    };
                    let lhs = f2.mul(&gs).expect("shapes checked");
                    let rhs = gt.mul(f).expect("shapes checked");
                    if lhs != rhs {
                        return Err(a.clone());
                    }
                    checked += 1;
                }
            }
        }
        Ok(checked)
    }

    /// Labels where the block is not injective.
    pub fn non_injective_labels(&self) -> Vec<Label> {
        self.blocks
            .iter()
            .filter(|(_, f)| f.rank() != f.cols())
            .map(|(a, _)| a.clone())
            .collect()
    }

    /// Labels where the block is not surjective.
    pub fn non_surjective_labels(&self) -> Vec<Label> {
        self.blocks
            .iter()
            .filter(|(_, f)| f.rank() != f.rows())
            .map(|(a, _)| a.clone())
            .collect()
    }
}
