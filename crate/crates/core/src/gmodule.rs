//! Finite-window degreewise presentations of graded D-modules.
//!
//! A [`GradedPresentation`] records, for every label in a box of the grading
//! lattice, the dimension of the graded piece and the matrices of each `x_i`
//! (raising the label by `deg(x_i)`) and each `d_i` (lowering it by the same
//! amount). Outside the box a piece is either known to vanish, via the
//! per-axis flags of the [`Window`], or unknown. Relations are only checked,
//! and cohomology only certified, where everything involved is known.
//!
//! A presentation may also carry an *Euler shift* `c`: the assertion that the
//! Euler-type operators act on every piece of the module (inside the box and
//! beyond it) by the label plus `c`. In coarse mode this is
//! `Σ x_i d_i = (l + c)` on `M_l`; in fine mode it is the per-variable
//! statement `x_i d_i = (a_i + c_i)` on `M_a`. Constructors know it
//! analytically, shifts and duals transport it, and [`validate`] checks it on
//! the covered region. The derham engine uses it to decide which single label
//! can carry cohomology.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{format_rational, parse_rational, rational, ExactMatrix, LinalgError, Rational};
use crate::weyl::{OpDegree, WeylOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("incompatible grading specs")]
    IncompatibleSpecs,
    #[error("label {0} is not covered by the window")]
    UncoveredRegion(Label),
    #[error("operator is not homogeneous for this grading")]
    InhomogeneousOperator,
    #[error("malformed presentation: {0}")]
    Malformed(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradingMode {
    /// Lattice ℤ, `deg(x_i) = 1`.
    Coarse,
    /// Lattice ℤⁿ, `deg(x_i) = e_i`.
    Fine,
}

impl fmt::Display for GradingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradingMode::Coarse => "coarse",
            GradingMode::Fine => "fine",
        })
    }
}

/// A point of the grading lattice. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(Vec<i64>);

impl Label {
    pub fn new(coords: Vec<i64>) -> Self {
        Label(coords)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Label) -> Label {
        self.add_scaled(other, 1)
    }

    pub fn sub(&self, other: &Label) -> Label {
        self.add_scaled(other, -1)
    }

    pub fn neg(&self) -> Label {
        Label(self.0.iter().map(|v| -v).collect())
    }

    /// `self + k * other`.
    pub fn add_scaled(&self, other: &Label, k: i64) -> Label {
        assert_eq!(self.rank(), other.rank(), "labels of different rank");
        Label(self.0.iter().zip(&other.0).map(|(a, b)| a + k * b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradingSpec {
    n: usize,
    mode: GradingMode,
}

impl GradingSpec {
    pub fn new(n: usize, mode: GradingMode) -> Self {
        assert!(n >= 1, "need at least one variable");
        GradingSpec { n, mode }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> GradingMode {
        self.mode
    }

    /// Dimension of the grading lattice.
    pub fn rank(&self) -> usize {
        match self.mode {
            GradingMode::Coarse => 1,
            GradingMode::Fine => self.n,
        }
    }

    pub fn zero_label(&self) -> Label {
        Label(vec![0; self.rank()])
    }

    pub fn uniform_label(&self, v: i64) -> Label {
        Label(vec![v; self.rank()])
    }

    pub fn var_degree(&self, i: usize) -> Label {
        assert!(i < self.n, "variable index out of range");
        match self.mode {
            GradingMode::Coarse => Label(vec![1]),
            GradingMode::Fine => {
                let mut v = vec![0; self.n];
                v[i] = 1;
                Label(v)
            }
        }
    }

    /// Degree of `x_1 ⋯ x_n`.
    pub fn total_degree(&self) -> Label {
        match self.mode {
            GradingMode::Coarse => Label(vec![self.n as i64]),
            GradingMode::Fine => Label(vec![1; self.n]),
        }
    }

    /// Total-degree functional.
    pub fn eps(&self, a: &Label) -> i64 {
        a.0.iter().sum()
    }

    /// Sum of `deg(x_j)` over `j` in `subset`.
    pub fn subset_degree(&self, subset: &[usize]) -> Label {
        subset
            .iter()
            .fold(self.zero_label(), |acc, &j| acc.add(&self.var_degree(j)))
    }
}

/// A box `[lo, hi]` of the lattice plus per-axis vanishing flags.
///
/// A label is covered iff it lies in the box, or on some axis it lies beyond
/// a flagged side of the box (then the piece is known to be zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    lo: Label,
    hi: Label,
    vanish_below: Vec<bool>,
    vanish_above: Vec<bool>,
}

impl Window {
    pub fn new(
        lo: Label,
        hi: Label,
        vanish_below: Vec<bool>,
        vanish_above: Vec<bool>,
    ) -> Result<Self, ModuleError> {
        let r = lo.rank();
        if hi.rank() != r || vanish_below.len() != r || vanish_above.len() != r {
            return Err(ModuleError::Malformed("window axis counts differ".into()));
        }
        if lo.0.iter().zip(&hi.0).any(|(l, h)| l > h) {
            return Err(ModuleError::Malformed(format!(
                "window lower corner {lo} exceeds upper corner {hi}"
            )));
        }
        Ok(Window {
            lo,
            hi,
            vanish_below,
            vanish_above,
        })
    }

    /// Box without any vanishing flags.
    pub fn bare(lo: Label, hi: Label) -> Result<Self, ModuleError> {
        let r = lo.rank();
        Self::new(lo, hi, vec![false; r], vec![false; r])
    }

    /// The same box with the given flags.
    pub fn with_flags(&self, vanish_below: Vec<bool>, vanish_above: Vec<bool>) -> Self {
        assert_eq!(vanish_below.len(), self.lo.rank());
        assert_eq!(vanish_above.len(), self.lo.rank());
        Window {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            vanish_below,
            vanish_above,
        }
    }

    pub fn lo(&self) -> &Label {
        &self.lo
    }

    pub fn hi(&self) -> &Label {
        &self.hi
    }

    pub fn vanish_below(&self) -> &[bool] {
        &self.vanish_below
    }

    pub fn vanish_above(&self) -> &[bool] {
        &self.vanish_above
    }

    pub fn rank(&self) -> usize {
        self.lo.rank()
    }

    pub fn contains(&self, a: &Label) -> bool {
        a.0.iter()
            .zip(self.lo.0.iter().zip(&self.hi.0))
            .all(|(v, (l, h))| l <= v && v <= h)
    }

    /// Outside the box on a flagged side.
    pub fn flagged_zero(&self, a: &Label) -> bool {
        (0..self.rank()).any(|k| {
            (self.vanish_below[k] && a.0[k] < self.lo.0[k])
                || (self.vanish_above[k] && a.0[k] > self.hi.0[k])
        })
    }

    pub fn covered(&self, a: &Label) -> bool {
        self.contains(a) || self.flagged_zero(a)
    }

    /// Every label is covered: both sides of every axis are flagged.
    pub fn covers_everything(&self) -> bool {
        self.vanish_below.iter().all(|&b| b) && self.vanish_above.iter().all(|&b| b)
    }

    /// Box labels in lexicographic order.
    pub fn labels(&self) -> Vec<Label> {
        box_labels(&self.lo, &self.hi)
    }

    pub fn len(&self) -> usize {
        self.lo
            .0
            .iter()
            .zip(&self.hi.0)
            .map(|(l, h)| (h - l + 1) as usize)
            .product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Window of `M(l)` given the window of `M`.
    pub fn shifted(&self, l: &Label) -> Self {
        Window {
            lo: self.lo.sub(l),
            hi: self.hi.sub(l),
            vanish_below: self.vanish_below.clone(),
            vanish_above: self.vanish_above.clone(),
        }
    }

    /// Window of the dual: `a ↦ -a - total`, so the box is reflected and the
    /// flags swap sides.
    pub fn reflected(&self, total: &Label) -> Self {
        Window {
            lo: self.hi.neg().sub(total),
            hi: self.lo.neg().sub(total),
            vanish_below: self.vanish_above.clone(),
            vanish_above: self.vanish_below.clone(),
        }
    }
}

/// Lexicographically ordered labels of the box `[lo, hi]`.
pub fn box_labels(lo: &Label, hi: &Label) -> Vec<Label> {
    let r = lo.rank();
    if lo.0.iter().zip(&hi.0).any(|(l, h)| l > h) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = lo.0.clone();
    loop {
        out.push(Label(cur.clone()));
        let mut k = r;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < hi.0[k] {
                cur[k] += 1;
                cur[k + 1..r].copy_from_slice(&lo.0[k + 1..r]);
                break;
            }
        }
    }
}

/// Which generator family an action matrix belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    X,
    D,
}

/// Degreewise model of a graded D-module on a finite window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPresentation {
    spec: GradingSpec,
    window: Window,
    dims: BTreeMap<Label, usize>,
    basis_names: Option<BTreeMap<Label, Vec<String>>>,
    x: Vec<BTreeMap<Label, ExactMatrix>>,
    d: Vec<BTreeMap<Label, ExactMatrix>>,
    euler_shift: Option<Label>,
}

impl GradedPresentation {
    /// Checks the structural invariants: one dim per box label, an action
    /// matrix for every box label whose target is covered (and none
    /// otherwise), and matching shapes. Relations are checked by [`validate`].
    pub fn new(
        spec: GradingSpec,
        window: Window,
        dims: BTreeMap<Label, usize>,
        x: Vec<BTreeMap<Label, ExactMatrix>>,
        d: Vec<BTreeMap<Label, ExactMatrix>>,
        basis_names: Option<BTreeMap<Label, Vec<String>>>,
        euler_shift: Option<Label>,
    ) -> Result<Self, ModuleError> {
        let malformed = |s: String| Err(ModuleError::Malformed(s));
        if window.rank() != spec.rank() {
            return malformed("window rank does not match the grading lattice".into());
        }
        if x.len() != spec.n() || d.len() != spec.n() {
            return malformed("need one x-action and one d-action per variable".into());
        }
        if let Some(c) = &euler_shift {
            if c.rank() != spec.rank() {
                return malformed("euler shift has the wrong rank".into());
            }
        }
        let labels = window.labels();
        if dims.len() != labels.len() || labels.iter().any(|a| !dims.contains_key(a)) {
            return malformed("dims must list exactly the labels of the window box".into());
        }
        if let Some(names) = &basis_names {
            for (a, list) in names {
                if dims.get(a) != Some(&list.len()) {
                    return malformed(format!("basis names at {a} do not match the piece"));
                }
            }
        }
        let m = GradedPresentation {
            spec,
            window,
            dims,
            basis_names,
            x,
            d,
            euler_shift,
        };
        for g in [Generator::X, Generator::D] {
            for i in 0..m.spec.n() {
                let maps = m.maps(g, i);
                for a in maps.keys() {
                    if !m.window.contains(a) {
                        return malformed(format!("{g:?}{} stored at {a} outside the box", i + 1));
                    }
                }
                for a in &labels {
                    let t = m.target(g, i, a);
                    match (m.dim(&t), maps.get(a)) {
                        (None, None) => {}
                        (None, Some(_)) => {
                            return malformed(format!(
                                "{g:?}{} at {a} targets uncovered label {t}",
                                i + 1
                            ))
                        }
                        (Some(_), None) => {
                            return malformed(format!("{g:?}{} missing at {a}", i + 1))
                        }
                        (Some(rows), Some(mat)) => {
                            if mat.shape() != (rows, m.dims[a]) {
                                return malformed(format!(
                                    "{g:?}{} at {a} has shape {:?}, expected {:?}",
                                    i + 1,
                                    mat.shape(),
                                    (rows, m.dims[a])
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn spec(&self) -> &GradingSpec {
        &self.spec
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn dims(&self) -> &BTreeMap<Label, usize> {
        &self.dims
    }

    pub fn basis_names(&self) -> Option<&BTreeMap<Label, Vec<String>>> {
        self.basis_names.as_ref()
    }

    pub fn euler_shift(&self) -> Option<&Label> {
        self.euler_shift.as_ref()
    }

    /// Same module without display names.
    pub fn without_names(&self) -> Self {
        GradedPresentation {
            basis_names: None,
            ..self.clone()
        }
    }

    /// Same module with the Euler-shift certificate replaced.
    pub fn with_euler_shift(&self, c: Option<Label>) -> Self {
        GradedPresentation {
            euler_shift: c,
            ..self.clone()
        }
    }

    /// Copy with one action matrix replaced (shape must match).
    pub fn with_action(
        &self,
        g: Generator,
        i: usize,
        a: &Label,
        mat: ExactMatrix,
    ) -> Result<Self, ModuleError> {
        let mut out = self.clone();
        let slot = match g {
            Generator::X => &mut out.x[i],
            Generator::D => &mut out.d[i],
        };
        match slot.get(a) {
            Some(old) if old.shape() == mat.shape() => {
                slot.insert(a.clone(), mat);
                Ok(out)
            }
            _ => Err(ModuleError::Malformed(format!("no compatible slot at {a}"))),
        }
    }

    /// Piece dimension: known in the box, 0 where flagged, `None` if unknown.
    pub fn dim(&self, a: &Label) -> Option<usize> {
        if let Some(&d) = self.dims.get(a) {
            Some(d)
        } else if self.window.flagged_zero(a) {
            Some(0)
        } else {
            None
        }
    }

    pub fn covered(&self, a: &Label) -> bool {
        self.window.covered(a)
    }

    pub fn target(&self, g: Generator, i: usize, a: &Label) -> Label {
        match g {
            Generator::X => a.add(&self.spec.var_degree(i)),
            Generator::D => a.sub(&self.spec.var_degree(i)),
        }
    }

    /// Stored matrices of one generator, keyed by source label.
    pub fn maps(&self, g: Generator, i: usize) -> &BTreeMap<Label, ExactMatrix> {
        match g {
            Generator::X => &self.x[i],
            Generator::D => &self.d[i],
        }
    }

    /// Matrix of `g_i` from `M_a`, when both ends are covered.
    pub fn action(&self, g: Generator, i: usize, a: &Label) -> Option<ExactMatrix> {
        if let Some(m) = self.maps(g, i).get(a) {
            return Some(m.clone());
        }
        let src = self.dim(a)?;
        let dst = self.dim(&self.target(g, i, a))?;
        debug_assert_eq!(src, 0);
        Some(ExactMatrix::zeros(dst, src))
    }

    pub fn x_map(&self, i: usize, a: &Label) -> Option<ExactMatrix> {
        self.action(Generator::X, i, a)
    }

    pub fn d_map(&self, i: usize, a: &Label) -> Option<ExactMatrix> {
        self.action(Generator::D, i, a)
    }

    /// Composite `second ∘ first` starting at `a`, if every piece is covered.
    fn composite(
        &self,
        first: (Generator, usize),
        second: (Generator, usize),
        a: &Label,
    ) -> Option<ExactMatrix> {
        let f = self.action(first.0, first.1, a)?;
        let mid = self.target(first.0, first.1, a);
        let s = self.action(second.0, second.1, &mid)?;
        Some(s.mul(&f).expect("shapes checked at construction"))
    }

    /// `M(l)`, with `M(l)_a = M_{a+l}`.
    pub fn shift(&self, l: &Label) -> Self {
        assert_eq!(l.rank(), self.spec.rank(), "shift has the wrong rank");
        let reindex = |m: &BTreeMap<Label, ExactMatrix>| {
            m.iter().map(|(a, v)| (a.sub(l), v.clone())).collect()
        };
        GradedPresentation {
            spec: self.spec.clone(),
            window: self.window.shifted(l),
            dims: self.dims.iter().map(|(a, v)| (a.sub(l), *v)).collect(),
            basis_names: self
                .basis_names
                .as_ref()
                .map(|b| b.iter().map(|(a, v)| (a.sub(l), v.clone())).collect()),
            x: self.x.iter().map(reindex).collect(),
            d: self.d.iter().map(reindex).collect(),
            euler_shift: self.euler_shift.as_ref().map(|c| c.add(l)),
        }
    }

    /// Blockwise direct sum. The box is the intersection of the two boxes; a
    /// vanishing flag survives only where it stays truthful for both summands.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, ModuleError> {
        if self.spec != other.spec {
            return Err(ModuleError::IncompatibleSpecs);
        }
        let r = self.spec.rank();
        let (w1, w2) = (&self.window, &other.window);
        let lo = Label((0..r).map(|k| w1.lo.0[k].max(w2.lo.0[k])).collect());
        let hi = Label((0..r).map(|k| w1.hi.0[k].min(w2.hi.0[k])).collect());
        if (0..r).any(|k| lo.0[k] > hi.0[k]) {
            return Err(ModuleError::UncoveredRegion(lo));
        }
        let side_ok = |m: &GradedPresentation, k: usize, below: bool| -> bool {
            let w = &m.window;
            let own = if below { w.lo.0[k] } else { w.hi.0[k] };
            let new = if below { lo.0[k] } else { hi.0[k] };
            if own == new {
                return true;
            }
            // The strip between the new and the old bound must be zero; this
            // is decidable from the box only when the lattice has one axis.
            r == 1
                && m.dims.iter().all(|(a, &dim)| {
                    let v = a.0[k];
                    let outside = if below { v < new } else { v > new };
                    !outside || dim == 0
                })
        };
        let vanish_below = (0..r)
            .map(|k| {
                w1.vanish_below[k] && w2.vanish_below[k] && side_ok(self, k, true) && side_ok(other, k, true)
            })
            .collect();
        let vanish_above = (0..r)
            .map(|k| {
                w1.vanish_above[k] && w2.vanish_above[k] && side_ok(self, k, false) && side_ok(other, k, false)
            })
            .collect();
        let window = Window::new(lo, hi, vanish_below, vanish_above)?;
        let labels = window.labels();
        let dims: BTreeMap<Label, usize> = labels
            .iter()
            .map(|a| (a.clone(), self.dims[a] + other.dims[a]))
            .collect();
        let mut actions = [Vec::new(), Vec::new()];
        for (slot, g) in [Generator::X, Generator::D].into_iter().enumerate() {
            for i in 0..self.n() {
                let mut maps = BTreeMap::new();
                for a in &labels {
                    let t = self.target(g, i, a);
                    let Some(rows) = dims
                        .get(&t)
                        .copied()
                        .or_else(|| window.flagged_zero(&t).then_some(0))
                    else {
                        continue;
                    };
                    let m1 = self.action(g, i, a);
                    let m2 = other.action(g, i, a);
                    let block = block_diag(m1.as_ref(), m2.as_ref(), rows, dims[a])?;
                    maps.insert(a.clone(), block);
                }
                actions[slot].push(maps);
            }
        }
        let basis_names = match (&self.basis_names, &other.basis_names) {
            (Some(b1), Some(b2)) => Some(
                labels
                    .iter()
                    .map(|a| {
                        let mut v: Vec<String> = b1[a].iter().map(|s| format!("{s} (1)")).collect();
                        v.extend(b2[a].iter().map(|s| format!("{s} (2)")));
                        (a.clone(), v)
                    })
                    .collect(),
            ),
            _ => None,
        };
        let euler_shift = match (&self.euler_shift, &other.euler_shift) {
            (Some(c1), Some(c2)) if c1 == c2 => Some(c1.clone()),
            _ => None,
        };
        let [x, d] = actions;
        GradedPresentation::new(self.spec.clone(), window, dims, x, d, basis_names, euler_shift)
    }

    /// Applies a homogeneous operator to `v ∈ M_a`; returns the target label
    /// and the image.
    pub fn apply_op(
        &self,
        p: &WeylOp,
        a: &Label,
        v: &[Rational],
    ) -> Result<(Label, Vec<Rational>), ModuleError> {
        let dim_a = self.dim(a).ok_or_else(|| ModuleError::UncoveredRegion(a.clone()))?;
        if v.len() != dim_a {
            return Err(ModuleError::Malformed(format!(
                "vector of length {} at label {a} of dimension {dim_a}",
                v.len()
            )));
        }
        let target = match p.op_degree(&self.spec) {
            OpDegree::Inhomogeneous => return Err(ModuleError::InhomogeneousOperator),
            OpDegree::Zero => a.clone(),
            OpDegree::Homogeneous(deg) => a.add(&deg),
        };
        let out_dim = self
            .dim(&target)
            .ok_or_else(|| ModuleError::UncoveredRegion(target.clone()))?;
        let mut out = vec![Rational::zero(); out_dim];
        for (m, c) in p.terms() {
            let mut label = a.clone();
            let mut w = v.to_vec();
            let steps = (0..self.n())
                .flat_map(|i| std::iter::repeat_n((Generator::D, i), m.d[i] as usize))
                .chain(
                    (0..self.n())
                        .flat_map(|i| std::iter::repeat_n((Generator::X, i), m.x[i] as usize)),
                );
            for (g, i) in steps {
                let mat = self
                    .action(g, i, &label)
                    .ok_or_else(|| ModuleError::UncoveredRegion(self.target(g, i, &label)))?;
                w = mat.mul_vec(&w)?;
                label = self.target(g, i, &label);
            }
            debug_assert_eq!(label, target);
            for (o, wi) in out.iter_mut().zip(&w) {
                *o += c * wi;
            }
        }
        Ok((target, out))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PresentationDoc::from(self)).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ModuleError> {
        let doc: PresentationDoc =
            serde_json::from_str(s).map_err(|e| ModuleError::Json(e.to_string()))?;
        doc.into_presentation()
    }
}

fn block_diag(
    a: Option<&ExactMatrix>,
    b: Option<&ExactMatrix>,
    rows: usize,
    cols: usize,
) -> Result<ExactMatrix, ModuleError> {
    let (Some(a), Some(b)) = (a, b) else {
        return Err(ModuleError::Malformed(
            "summand action missing inside the common window".into(),
        ));
    };
    let triplets = a
        .entries()
        .map(|(r, c, v)| (r, c, v.clone()))
        .chain(b.entries().map(|(r, c, v)| (r + a.rows(), c + a.cols(), v.clone())));
    Ok(ExactMatrix::from_triplets(rows, cols, triplets)?)
}

/// One violated relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub label: Label,
    pub relation: Relation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `x_i x_j = x_j x_i`
    XCommute(usize, usize),
    /// `d_i d_j = d_j d_i`
    DCommute(usize, usize),
    /// `d_i x_j - x_j d_i = δ_ij`
    Weyl(usize, usize),
    /// The declared Euler shift does not hold on this piece.
    EulerShift,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.relation {
            Relation::XCommute(i, j) => write!(f, "x{}x{} != x{}x{}", i + 1, j + 1, j + 1, i + 1),
            Relation::DCommute(i, j) => write!(f, "d{}d{} != d{}d{}", i + 1, j + 1, j + 1, i + 1),
            Relation::Weyl(i, j) => write!(f, "[d{}, x{}] wrong", i + 1, j + 1),
            Relation::EulerShift => write!(f, "declared Euler shift fails"),
        }?;
        write!(f, " at {}", self.label)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Relation instances that could be checked.
    pub checked: usize,
    /// Instances skipped because a composite leaves the covered region.
    pub skipped: usize,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the Weyl relations (and any declared Euler shift) on every box
/// label where the composites stay covered.
pub fn validate(m: &GradedPresentation) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = m.n();
    let record = |report: &mut ValidationReport, label: &Label, rel: Relation, ok: Option<bool>| {
        match ok {
            None => report.skipped += 1,
            Some(true) => report.checked += 1,
            Some(false) => {
                report.checked += 1;
                report.violations.push(Violation {
                    label: label.clone(),
                    relation: rel,
                });
            }
        }
    };
    for a in m.window.labels() {
        for i in 0..n {
            for j in i + 1..n {
                for (g, rel) in [
                    (Generator::X, Relation::XCommute(i, j)),
                    (Generator::D, Relation::DCommute(i, j)),
                ] {
                    let ok = m
                        .composite((g, i), (g, j), &a)
                        .zip(m.composite((g, j), (g, i), &a))
                        .map(|(p, q)| p == q);
                    record(&mut report, &a, rel, ok);
                }
            }
            for j in 0..n {
                let ok = m
                    .composite((Generator::X, j), (Generator::D, i), &a)
                    .zip(m.composite((Generator::D, i), (Generator::X, j), &a))
                    .map(|(dx, xd)| {
                        let c = dx.sub(&xd).expect("same shape");
                        if i == j {
                            c == ExactMatrix::identity(m.dims[&a])
                        } else {
                            c.is_zero()
                        }
                    });
                record(&mut report, &a, Relation::Weyl(i, j), ok);
            }
        }
        if m.euler_shift.is_some() {
            let ok = euler_shift_holds(m, &a);
            record(&mut report, &a, Relation::EulerShift, ok);
        }
    }
    report
}

fn euler_shift_holds(m: &GradedPresentation, a: &Label) -> Option<bool> {
    let c = m.euler_shift.as_ref()?;
    let dim = m.dims[a];
    let xd = |i: usize| m.composite((Generator::D, i), (Generator::X, i), a);
    match m.spec.mode() {
        GradingMode::Coarse => {
            let sum = sum_matrices((0..m.n()).map(xd), dim)?;
            Some(sum == ExactMatrix::scalar(dim, &rational(a.0[0] + c.0[0])))
        }
        GradingMode::Fine => {
            for i in 0..m.n() {
                if xd(i)? != ExactMatrix::scalar(dim, &rational(a.0[i] + c.0[i])) {
                    return Some(false);
                }
            }
            Some(true)
        }
    }
}

fn sum_matrices<I>(iter: I, dim: usize) -> Option<ExactMatrix>
where
    I: Iterator<Item = Option<ExactMatrix>>,
{
    let mut acc = ExactMatrix::zeros(dim, dim);
    for m in iter {
        acc = acc.add(&m?).expect("square pieces");
    }
    Some(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerianReport {
    pub eulerian: bool,
    /// First label where `Σ x_i d_i - deg` is nonzero, with that difference.
    pub witness: Option<(Label, ExactMatrix)>,
    pub checked: usize,
    pub skipped: usize,
}

/// Tests `Σ x_i d_i = eps(a)` on every piece where the composites are covered.
pub fn is_eulerian(m: &GradedPresentation) -> EulerianReport {
    let mut report = EulerianReport {
        eulerian: true,
        witness: None,
        checked: 0,
        skipped: 0,
    };
    for a in m.window.labels() {
        let dim = m.dims[&a];
        let sum = sum_matrices(
            (0..m.n()).map(|i| m.composite((Generator::D, i), (Generator::X, i), &a)),
            dim,
        );
        let Some(sum) = sum else {
            report.skipped += 1;
            continue;
        };
        report.checked += 1;
        let diff = sum
            .sub(&ExactMatrix::scalar(dim, &rational(m.spec.eps(&a))))
            .expect("square");
        if !diff.is_zero() && report.witness.is_none() {
            report.eulerian = false;
            report.witness = Some((a.clone(), diff));
        }
    }
    report
}

// ---------------------------------------------------------------------------
// JSON document

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    label: Label,
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, String)>,
}

#[derive(Serialize, Deserialize)]
struct DimDoc {
    label: Label,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct NamesDoc {
    label: Label,
    names: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct PresentationDoc {
    format: String,
    spec: GradingSpec,
    window: Window,
    euler_shift: Option<Label>,
    dims: Vec<DimDoc>,
    basis_names: Option<Vec<NamesDoc>>,
    x: Vec<Vec<MatrixDoc>>,
    d: Vec<Vec<MatrixDoc>>,
}

const FORMAT_TAG: &str = "graded-presentation/1";

fn matrix_docs(maps: &BTreeMap<Label, ExactMatrix>) -> Vec<MatrixDoc> {
    maps.iter()
        .map(|(a, m)| MatrixDoc {
            label: a.clone(),
            rows: m.rows(),
            cols: m.cols(),
            entries: m
                .entries()
                .map(|(r, c, v)| (r, c, format_rational(v)))
                .collect(),
        })
        .collect()
}

impl From<&GradedPresentation> for PresentationDoc {
    fn from(m: &GradedPresentation) -> Self {
        PresentationDoc {
            format: FORMAT_TAG.to_string(),
            spec: m.spec.clone(),
            window: m.window.clone(),
            euler_shift: m.euler_shift.clone(),
            dims: m
                .dims
                .iter()
                .map(|(a, &dim)| DimDoc {
                    label: a.clone(),
                    dim,
                })
                .collect(),
            basis_names: m.basis_names.as_ref().map(|b| {
                b.iter()
                    .map(|(a, names)| NamesDoc {
                        label: a.clone(),
                        names: names.clone(),
                    })
                    .collect()
            }),
            x: m.x.iter().map(matrix_docs).collect(),
            d: m.d.iter().map(matrix_docs).collect(),
        }
    }
}

impl PresentationDoc {
    fn into_presentation(self) -> Result<GradedPresentation, ModuleError> {
        if self.format != FORMAT_TAG {
            return Err(ModuleError::Json(format!("unknown format tag {:?}", self.format)));
        }
        let parse_maps = |docs: Vec<MatrixDoc>| -> Result<BTreeMap<Label, ExactMatrix>, ModuleError> {
            let mut out = BTreeMap::new();
            for doc in docs {
                let mut triplets = Vec::with_capacity(doc.entries.len());
                for (r, c, v) in doc.entries {
                    triplets.push((r, c, parse_rational(&v)?));
                }
                let m = ExactMatrix::from_triplets(doc.rows, doc.cols, triplets)?;
                if out.insert(doc.label.clone(), m).is_some() {
                    return Err(ModuleError::Json(format!("duplicate matrix at {}", doc.label)));
                }
            }
            Ok(out)
        };
        let x = self.x.into_iter().map(parse_maps).collect::<Result<Vec<_>, _>>()?;
        let d = self.d.into_iter().map(parse_maps).collect::<Result<Vec<_>, _>>()?;
        let dims = self.dims.into_iter().map(|d| (d.label, d.dim)).collect();
        let names = self
            .basis_names
            .map(|v| v.into_iter().map(|n| (n.label, n.names)).collect());
        GradedPresentation::new(self.spec, self.window, dims, x, d, names, self.euler_shift)
    }
}

/// `Σ_i x_i d_i` as a matrix on `M_a`, if covered.
pub fn euler_matrix(m: &GradedPresentation, a: &Label) -> Option<ExactMatrix> {
    let dim = m.dim(a)?;
    sum_matrices(
        (0..m.n()).map(|i| m.composite((Generator::D, i), (Generator::X, i), a)),
        dim,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_labels_are_lexicographic() {
        let lo = Label::new(vec![0, -1]);
        let hi = Label::new(vec![1, 0]);
        let labels = box_labels(&lo, &hi);
        let coords: Vec<&[i64]> = labels.iter().map(Label::coords).collect();
        assert_eq!(coords, vec![&[0, -1][..], &[0, 0], &[1, -1], &[1, 0]]);
        assert!(box_labels(&hi, &lo).is_empty());
    }

    #[test]
    fn window_coverage() {
        let w = Window::new(
            Label::new(vec![-2, -2]),
            Label::new(vec![2, 2]),
            vec![true, false],
            vec![false, false],
        )
        .unwrap();
        assert!(w.covered(&Label::new(vec![0, 0])));
        assert!(w.covered(&Label::new(vec![-5, 9])));
        assert!(!w.covered(&Label::new(vec![0, 3])));
        assert!(!w.covered(&Label::new(vec![0, -3])));
        assert!(Window::bare(Label::new(vec![1]), Label::new(vec![0])).is_err());
    }

    #[test]
    fn reflected_window() {
        let w = Window::new(
            Label::new(vec![-8]),
            Label::new(vec![6]),
            vec![true],
            vec![false],
        )
        .unwrap();
        let r = w.reflected(&Label::new(vec![2]));
        assert_eq!(r.lo(), &Label::new(vec![-8]));
        assert_eq!(r.hi(), &Label::new(vec![6]));
        assert_eq!(r.vanish_above(), &[true]);
        assert_eq!(r.vanish_below(), &[false]);
        assert_eq!(r.reflected(&Label::new(vec![2])), w);
    }

    #[test]
    fn spec_basics() {
        let s = GradingSpec::new(3, GradingMode::Fine);
        assert_eq!(s.total_degree(), Label::new(vec![1, 1, 1]));
        for i in 0..3 {
            assert_eq!(s.eps(&s.var_degree(i)), 1);
        }
        let c = GradingSpec::new(3, GradingMode::Coarse);
        assert_eq!(c.total_degree(), Label::new(vec![3]));
        assert_eq!(c.subset_degree(&[0, 2]), Label::new(vec![2]));
    }

    #[test]
    fn rejects_malformed_shapes() {
        let spec = GradingSpec::new(1, GradingMode::Coarse);
        let w = Window::bare(Label::new(vec![0]), Label::new(vec![0])).unwrap();
        let dims: BTreeMap<_, _> = [(Label::new(vec![0]), 1)].into();
        // targets of x and d at 0 are uncovered, so no matrices allowed
        let ok = GradedPresentation::new(
            spec.clone(),
            w.clone(),
            dims.clone(),
            vec![BTreeMap::new()],
            vec![BTreeMap::new()],
            None,
            None,
        );
        assert!(ok.is_ok());
        let bad = GradedPresentation::new(
            spec,
            w,
            dims,
            vec![[(Label::new(vec![0]), ExactMatrix::zeros(1, 1))].into()],
            vec![BTreeMap::new()],
            None,
            None,
        );
        assert!(matches!(bad, Err(ModuleError::Malformed(_))));
    }
}
