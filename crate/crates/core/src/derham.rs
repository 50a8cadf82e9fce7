//! De Rham and Koszul complexes of a presentation, one summand per label.
//!
//! The de Rham summand at `a` has, in cohomological degree `i`, one object
//! per `i`-subset `J` of the variables, sitting at `a - deg(J)`. The
//! differential inserts an index `s` into `J` with sign
//! `(-1)^{#{j in J : j < s}}` and applies `d_s`.
//!
//! The homological Koszul summand at `a` has, in degree `i`, one component
//! per `i`-subset `J` sitting at `a + deg(J)`, and the differential removes
//! the `p`-th element `j_p` of `J` with sign `(-1)^(p-1)` applying `d_{j_p}`
//! (or `-d_{j_p}`).
//!
//! Totals are exact when they can be certified. A declared Euler shift `c`
//! forces every de Rham summand other than `-c` to be acyclic (the Euler
//! field is a null-homotopic chain map acting on summand `a` by `a + c`), so
//! certifying that one summand suffices. Without a shift the window must
//! cover every label.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::gmodule::{box_labels, GradedPresentation, GradingMode, Label, Window};
use crate::linalg::{cohomology_dim, ExactMatrix, Rational};

/// Order of the wedge basis inside each cohomological degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WedgeOrder {
    Lex,
    Colex,
}

/// Increasing `k`-subsets of `0..n` in the requested order.
pub fn subsets(n: usize, k: usize, order: WedgeOrder) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    if order == WedgeOrder::Colex {
        out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub subset: Vec<usize>,
    pub label: Label,
    pub dim: usize,
}

/// One summand complex. `objects[i]` lists the components of degree `i`;
/// `differentials[i]` maps degree `i` to `i+1` for de Rham summands and
/// degree `i+1` to `i` for Koszul summands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummandComplex {
    pub label: Label,
    pub objects: Vec<Vec<Component>>,
    pub differentials: Vec<ExactMatrix>,
    /// Every component label is covered.
    pub certified: bool,
}

pub type DeRhamSummand = SummandComplex;
pub type KoszulSummand = SummandComplex;

impl SummandComplex {
    pub fn object_dims(&self) -> Vec<usize> {
        self.objects.iter().map(|o| o.iter().map(|c| c.dim).sum()).collect()
    }

    fn offsets(&self, i: usize) -> Vec<usize> {
        let mut acc = 0;
        self.objects[i]
            .iter()
            .map(|c| {
                let o = acc;
                acc += c.dim;
                o
            })
            .collect()
    }
}

fn components(m: &GradedPresentation, a: &Label, order: WedgeOrder, homological: bool) -> (Vec<Vec<Component>>, bool) {
    let spec = m.spec();
    let mut certified = true;
    let objects = (0..=spec.n())
        .map(|i| {
            subsets(spec.n(), i, order)
                .into_iter()
                .map(|subset| {
                    let deg = spec.subset_degree(&subset);
                    let label = if homological { a.add(&deg) } else { a.sub(&deg) };
                    let dim = m.dim(&label).unwrap_or_else(|| {
                        certified = false;
                        0
                    });
                    Component { subset, label, dim }
                })
                .collect()
        })
        .collect();
    (objects, certified)
}

/// Block matrix of `d_s` from the component at `label` (zero if unknown).
fn d_block(m: &GradedPresentation, s: usize, label: &Label, rows: usize, cols: usize) -> ExactMatrix {
    match m.d_map(s, label) {
        Some(mat) if mat.shape() == (rows, cols) => mat,
        _ => ExactMatrix::zeros(rows, cols),
    }
}

/// De Rham summand at `a` with the lexicographic wedge basis.
pub fn build_summand(m: &GradedPresentation, a: &Label) -> DeRhamSummand {
    build_summand_ordered(m, a, WedgeOrder::Lex)
}

pub fn build_summand_ordered(m: &GradedPresentation, a: &Label, order: WedgeOrder) -> DeRhamSummand {
    let n = m.n();
    let (objects, certified) = components(m, a, order, false);
    let mut summand = SummandComplex {
        label: a.clone(),
        objects,
        differentials: Vec::with_capacity(n),
        certified,
    };
    let dims = summand.object_dims();
    for i in 0..n {
        let (src_off, dst_off) = (summand.offsets(i), summand.offsets(i + 1));
        let index: BTreeMap<&Vec<usize>, usize> = summand.objects[i + 1]
            .iter()
            .enumerate()
            .map(|(k, c)| (&c.subset, k))
            .collect();
        let mut triplets: Vec<(usize, usize, Rational)> = Vec::new();
        for (k, comp) in summand.objects[i].iter().enumerate() {
            if comp.dim == 0 {
                continue;
            }
            for s in (0..n).filter(|s| !comp.subset.contains(s)) {
                let before = comp.subset.iter().filter(|&&j| j < s).count();
                let mut target = comp.subset.clone();
                target.insert(before, s);
                let t = index[&target];
                let rows = summand.objects[i + 1][t].dim;
                let block = d_block(m, s, &comp.label, rows, comp.dim);
                let block = if before % 2 == 1 { block.neg() } else { block };
                for (r, c, v) in block.entries() {
                    triplets.push((dst_off[t] + r, src_off[k] + c, v.clone()));
                }
            }
        }
        summand.differentials.push(
            ExactMatrix::from_triplets(dims[i + 1], dims[i], triplets).expect("blocks fit"),
        );
    }
    summand
}

/// Homological Koszul summand at `a`; `negate` uses `-d` instead of `d`.
pub fn build_koszul_summand(m: &GradedPresentation, a: &Label, negate: bool) -> KoszulSummand {
    let n = m.n();
    let (objects, certified) = components(m, a, WedgeOrder::Lex, true);
    let mut summand = SummandComplex {
        label: a.clone(),
        objects,
        differentials: Vec::with_capacity(n),
        certified,
    };
    let dims = summand.object_dims();
    // differentials[i]: degree i+1 → degree i
    for i in 0..n {
        let (src_off, dst_off) = (summand.offsets(i + 1), summand.offsets(i));
        let index: BTreeMap<&Vec<usize>, usize> = summand.objects[i]
            .iter()
            .enumerate()
            .map(|(k, c)| (&c.subset, k))
            .collect();
        let mut triplets = Vec::new();
        for (k, comp) in summand.objects[i + 1].iter().enumerate() {
            if comp.dim == 0 {
                continue;
            }
            for (p, &s) in comp.subset.iter().enumerate() {
                let mut target = comp.subset.clone();
                target.remove(p);
                let t = index[&target];
                let rows = summand.objects[i][t].dim;
                let block = d_block(m, s, &comp.label, rows, comp.dim);
                let block = if (p % 2 == 1) != negate { block.neg() } else { block };
                for (r, c, v) in block.entries() {
                    triplets.push((dst_off[t] + r, src_off[k] + c, v.clone()));
                }
            }
        }
        summand.differentials.push(
            ExactMatrix::from_triplets(dims[i], dims[i + 1], triplets).expect("blocks fit"),
        );
    }
    summand
}

/// Cohomology dims of a de Rham summand, index `0..=n`.
pub fn summand_cohomology(s: &DeRhamSummand) -> Vec<usize> {
    let dims = s.object_dims();
    let n = dims.len() - 1;
    (0..=n)
        .map(|i| {
            let incoming = if i == 0 { ExactMatrix::zeros(dims[0], 0) } else { s.differentials[i - 1].clone() };
            let outgoing = if i == n { ExactMatrix::zeros(0, dims[n]) } else { s.differentials[i].clone() };
            cohomology_dim(&incoming, &outgoing).expect("d∘d = 0 on a validated presentation")
        })
        .collect()
}

/// Homology dims of a Koszul summand, index `0..=n`.
pub fn summand_homology(s: &KoszulSummand) -> Vec<usize> {
    let dims = s.object_dims();
    let n = dims.len() - 1;
    (0..=n)
        .map(|i| {
            let incoming = if i == n { ExactMatrix::zeros(dims[n], 0) } else { s.differentials[i].clone() };
            let outgoing = if i == 0 { ExactMatrix::zeros(0, dims[0]) } else { s.differentials[i - 1].clone() };
            cohomology_dim(&incoming, &outgoing).expect("d∘d = 0 on a validated presentation")
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub dim: usize,
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Total {
    pub dim: usize,
    pub complete: bool,
}

/// Per-label dims and certified totals.
///
/// `entries` holds every uncertified label and every certified label with a
/// nonzero dimension; certified labels missing from it carry zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyTable {
    pub grading_mode: GradingMode,
    pub window: Window,
    pub homological: bool,
    pub entries: BTreeMap<(Label, usize), Entry>,
    pub totals: BTreeMap<usize, Total>,
}

impl CohomologyTable {
    pub fn total(&self, i: usize) -> Option<Total> {
        self.totals.get(&i).copied()
    }

    pub fn total_dims(&self) -> Vec<usize> {
        self.totals.values().map(|t| t.dim).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.totals.values().all(|t| t.complete)
    }

    /// Certified dimension at `(a, i)`, if `a` was certified.
    pub fn certified_dim(&self, a: &Label, i: usize) -> Option<usize> {
        match self.entries.get(&(a.clone(), i)) {
            Some(e) if e.certified => Some(e.dim),
            Some(_) => None,
            None => Some(0),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|((a, i), e)| json!({"label": a, "i": i, "dim": e.dim, "certified": e.certified}))
            .collect();
        let totals: serde_json::Map<String, Value> = self
            .totals
            .iter()
            .map(|(i, t)| (i.to_string(), json!({"dim": t.dim, "complete": t.complete})))
            .collect();
        json!({
            "grading_mode": self.grading_mode,
            "window": self.window,
            "indexing": if self.homological { "homological" } else { "cohomological" },
            "entries": entries,
            "totals": totals,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serializable")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,i,dim,certified\n");
        for ((a, i), e) in &self.entries {
            let label = if a.rank() == 1 { a.to_string() } else { format!("\"{a}\"") };
            let _ = writeln!(out, "{label},{i},{},{}", e.dim, e.certified);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let h = if self.homological { "h_" } else { "H^" };
        for (i, t) in &self.totals {
            let _ = writeln!(
                out,
                "{h}{i} = {}{}",
                t.dim,
                if t.complete { "" } else { "  (incomplete)" }
            );
        }
        for ((a, i), e) in &self.entries {
            if e.dim > 0 || !e.certified {
                let _ = writeln!(
                    out,
                    "  {a} {h}{i}: {}{}",
                    e.dim,
                    if e.certified { "" } else { " (uncertified)" }
                );
            }
        }
        out
    }
}

/// Summand labels whose complexes touch the box.
fn summand_range(m: &GradedPresentation, homological: bool) -> Vec<Label> {
    let w = m.window();
    let total = m.spec().total_degree();
    if homological {
        box_labels(&w.lo().sub(&total), w.hi())
    } else {
        box_labels(w.lo(), &w.hi().add(&total))
    }
}

/// The only summand label that can carry cohomology, if an Euler shift is
/// declared.
fn special_label(m: &GradedPresentation, homological: bool) -> Option<Label> {
    let c = m.euler_shift()?;
    Some(if homological {
        c.neg().sub(&m.spec().total_degree())
    } else {
        c.neg()
    })
}

fn assemble(
    m: &GradedPresentation,
    homological: bool,
    indices: &[usize],
    results: Vec<(Label, bool, Vec<usize>)>,
) -> CohomologyTable {
    let special = special_label(m, homological);
    let mut entries = BTreeMap::new();
    let mut sums: BTreeMap<usize, usize> = indices.iter().map(|&i| (i, 0)).collect();
    let mut all_certified = true;
    let mut special_certified = false;
    for (a, certified, dims) in results {
        all_certified &= certified;
        if special.as_ref() == Some(&a) {
            special_certified = certified;
        }
        for (&i, &d) in indices.iter().zip(&dims) {
            if certified {
                *sums.get_mut(&i).unwrap() += d;
            }
            if d > 0 || !certified {
                entries.insert((a.clone(), i), Entry { dim: d, certified });
            }
        }
    }
    let complete = match special {
        Some(_) => special_certified,
        None => all_certified && m.window().covers_everything(),
    };
    CohomologyTable {
        grading_mode: m.spec().mode(),
        window: m.window().clone(),
        homological,
        entries,
        totals: sums
            .into_iter()
            .map(|(i, dim)| (i, Total { dim, complete }))
            .collect(),
    }
}

fn labels_with_special(m: &GradedPresentation, homological: bool) -> Vec<Label> {
    let mut labels = summand_range(m, homological);
    if let Some(s) = special_label(m, homological) {
        if let Err(pos) = labels.binary_search(&s) {
            labels.insert(pos, s);
        }
    }
    labels
}

/// Full de Rham cohomology table.
pub fn derham_cohomology(m: &GradedPresentation) -> CohomologyTable {
    let labels = labels_with_special(m, false);
    let results = labels
        .into_par_iter()
        .map(|a| {
            let s = build_summand(m, &a);
            let dims = summand_cohomology(&s);
            (a, s.certified, dims)
        })
        .collect();
    let indices: Vec<usize> = (0..=m.n()).collect();
    assemble(m, false, &indices, results)
}

/// Homological Koszul homology of `d_1, ..., d_n` (or of `-d` with `negate`).
pub fn koszul_homology(m: &GradedPresentation, negate: bool) -> CohomologyTable {
    let labels = labels_with_special(m, true);
    let results = labels
        .into_par_iter()
        .map(|a| {
            let s = build_koszul_summand(m, &a, negate);
            let dims = summand_homology(&s);
            (a, s.certified, dims)
        })
        .collect();
    let indices: Vec<usize> = (0..=m.n()).collect();
    assemble(m, true, &indices, results)
}

/// `H^0` only: the joint kernel of all `d_i` on `M_a` for summand label `a`.
pub fn h0_fast(m: &GradedPresentation) -> CohomologyTable {
    let labels = labels_with_special(m, false);
    let spec = m.spec();
    let results = labels
        .into_par_iter()
        .map(|a| {
            let Some(dim) = m.dim(&a) else {
                return (a, false, vec![0]);
            };
            let maps: Option<Vec<ExactMatrix>> = (0..spec.n()).map(|s| m.d_map(s, &a)).collect();
            match maps {
                Some(maps) if dim > 0 => {
                    let refs: Vec<&ExactMatrix> = maps.iter().collect();
                    let stacked = ExactMatrix::vstack(&refs).expect("same width");
                    (a, true, vec![dim - stacked.rank()])
                }
                Some(_) => (a, true, vec![0]),
                None => (a, false, vec![0]),
            }
        })
        .collect();
    assemble(m, false, &[0], results)
}

/// `H^n` only: the joint cokernel of all `d_i` into `M_{a - D}` for summand
/// label `a`.
pub fn hn_fast(m: &GradedPresentation) -> CohomologyTable {
    let labels = labels_with_special(m, false);
    let spec = m.spec();
    let total = spec.total_degree();
    let results = labels
        .into_par_iter()
        .map(|a| {
            let b = a.sub(&total);
            let Some(dim) = m.dim(&b) else {
                return (a, false, vec![0]);
            };
            if dim == 0 {
                return (a, true, vec![0]);
            }
            let maps: Option<Vec<ExactMatrix>> = (0..spec.n())
                .map(|s| m.d_map(s, &b.add(&spec.var_degree(s))))
                .collect();
            match maps {
                Some(maps) => {
                    let refs: Vec<&ExactMatrix> = maps.iter().collect();
                    let stacked = ExactMatrix::hstack(&refs).expect("same height");
                    (a, true, vec![dim - stacked.rank()])
                }
                None => (a, false, vec![0]),
            }
        })
        .collect();
    assemble(m, false, &[spec.n()], results)
}
