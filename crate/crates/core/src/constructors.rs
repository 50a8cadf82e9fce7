//! Presentations of the standard modules: the polynomial ring `R`, the
//! injective hull `E` of the residue field, top local cohomology at ideals
//! generated by variables, and the one-variable cyclic module `D/(D·xd)`.
//!
//! Every constructor sets the window's vanishing flags from the known support
//! of the module (only where the flag is truthful for the given box) and
//! declares the Euler shift, which is `0` for all of these modules.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::gmodule::{GradedPresentation, GradingMode, GradingSpec, Label, ModuleError, Window};
use crate::linalg::{rational, ratio, ExactMatrix};
use crate::maps::GradedMap;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("this module has infinite-dimensional coarse pieces; use fine mode")]
    CoarseModeUnsupported,
    #[error("variable subset must be nonempty and inside 1..={0}")]
    BadSubset(usize),
    #[error("D/(D·xd) lives in one variable")]
    NeedsOneVariable,
    #[error("bad recipe {0:?}: {1}")]
    Recipe(String, String),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// COARSE `[-(n+6), 6]`; FINE `[-7, 6]^n`. Flags are set by the constructor.
pub fn default_window(spec: &GradingSpec) -> Window {
    let (lo, hi) = match spec.mode() {
        GradingMode::Coarse => (-(spec.n() as i64) - 6, 6),
        GradingMode::Fine => (-7, 6),
    };
    Window::bare(spec.uniform_label(lo), spec.uniform_label(hi)).expect("lo < hi")
}

/// Support pattern per variable: `Some(true)` means exponents `>= 0`,
/// `Some(false)` means exponents `<= -1`.
type Pattern = Vec<bool>;

/// All exponent vectors with the given pattern and coordinate sum, in the
/// module's basis order: lexicographic on `|exponent|` for inverse
/// variables and on the exponent itself otherwise.
fn exponents_with_sum(pattern: &Pattern, total: i64) -> Vec<Vec<i64>> {
    // Work with nonnegative "distance from the support corner" t_i:
    // nonneg variable: e_i = t_i; inverse variable: e_i = -1 - t_i.
    let n = pattern.len();
    let inverse = pattern.iter().filter(|p| !**p).count() as i64;
    let nonneg_mask: Vec<bool> = pattern.clone();
    // Σ e = Σ_{nonneg} t - Σ_{inverse} (1 + t)
    // Only the all-nonneg or all-inverse cases have finite pieces here.
    let mut out = Vec::new();
    if nonneg_mask.iter().all(|&b| b) {
        if total < 0 {
            return out;
        }
        compositions(n, total as u64, &mut |t| {
            out.push(t.iter().map(|&v| v as i64).collect())
        });
    } else if nonneg_mask.iter().all(|&b| !b) {
        let budget = -total - inverse;
        if budget < 0 {
            return out;
        }
        compositions(n, budget as u64, &mut |t| {
            out.push(t.iter().map(|&v| -1 - v as i64).collect())
        });
    } else {
        unreachable!("mixed patterns only occur in fine mode");
    }
    out
}

/// Exponents of the monomial basis of `R` at label `a`, in basis order.
pub fn polynomial_basis(spec: &GradingSpec, a: &Label) -> Vec<Vec<i64>> {
    match spec.mode() {
        GradingMode::Coarse => exponents_with_sum(&vec![true; spec.n()], a.coords()[0]),
        GradingMode::Fine if a.coords().iter().all(|&v| v >= 0) => vec![a.coords().to_vec()],
        GradingMode::Fine => Vec::new(),
    }
}

/// Calls `f` on every `t ∈ ℕ^n` with `Σ t = total`, lexicographically.
fn compositions(n: usize, total: u64, f: &mut dyn FnMut(&[u64])) {
    fn rec(pos: usize, left: u64, cur: &mut Vec<u64>, f: &mut dyn FnMut(&[u64])) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            f(cur);
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, f);
        }
    }
    let mut cur = vec![0; n];
    rec(0, total, &mut cur, f);
}

fn monomial_name(exps: &[i64]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Module with a basis of Laurent monomials `x^e` following `pattern`:
/// `x_i` shifts `e_i` up (killing the element at `e_i = -1` for inverse
/// variables), `d_i` multiplies by `e_i` and shifts down.
fn monomial_module(
    spec: &GradingSpec,
    window: &Window,
    pattern: &Pattern,
) -> Result<GradedPresentation, ConstructError> {
    let n = spec.n();
    // Flags: an axis is bounded below where every variable on it is nonneg,
    // above where every variable on it is inverse.
    let rank = spec.rank();
    let mut below = vec![false; rank];
    let mut above = vec![false; rank];
    for k in 0..rank {
        let vars: Vec<usize> = match spec.mode() {
            GradingMode::Coarse => (0..n).collect(),
            GradingMode::Fine => vec![k],
        };
        let lo = window.lo().coords()[k];
        let hi = window.hi().coords()[k];
        if vars.iter().all(|&v| pattern[v]) {
            below[k] = lo <= 0;
        }
        if vars.iter().all(|&v| !pattern[v]) {
            let corner = -(vars.len() as i64);
            above[k] = hi >= corner;
        }
    }
    let window = window.with_flags(below, above);

    let in_support = |e: &[i64]| {
        e.iter()
            .zip(pattern)
            .all(|(&v, &nonneg)| if nonneg { v >= 0 } else { v <= -1 })
    };
    let basis_at = |a: &Label| -> Vec<Vec<i64>> {
        match spec.mode() {
            GradingMode::Fine => {
                let e = a.coords().to_vec();
                if in_support(&e) {
                    vec![e]
                } else {
                    Vec::new()
                }
            }
            GradingMode::Coarse => exponents_with_sum(pattern, a.coords()[0]),
        }
    };
    let label_of = |e: &[i64]| -> Label {
        match spec.mode() {
            GradingMode::Fine => Label::new(e.to_vec()),
            GradingMode::Coarse => Label::new(vec![e.iter().sum()]),
        }
    };

    let labels = window.labels();
    let bases: BTreeMap<Label, Vec<Vec<i64>>> =
        labels.iter().map(|a| (a.clone(), basis_at(a))).collect();
    let index: BTreeMap<&Vec<i64>, usize> = bases
        .values()
        .flat_map(|b| b.iter().enumerate().map(|(i, e)| (e, i)))
        .collect();

    let mut xs = Vec::with_capacity(n);
    let mut ds = Vec::with_capacity(n);
    for i in 0..n {
        let mut xmaps = BTreeMap::new();
        let mut dmaps = BTreeMap::new();
        for a in &labels {
            let src = &bases[a];
            for (up, maps) in [(true, &mut xmaps), (false, &mut dmaps)] {
                let t = if up {
                    a.add(&spec.var_degree(i))
                } else {
                    a.sub(&spec.var_degree(i))
                };
                let rows = match bases.get(&t) {
                    Some(b) => b.len(),
                    None if window.flagged_zero(&t) => 0,
                    None => continue,
                };
                let mut triplets = Vec::new();
                for (col, e) in src.iter().enumerate() {
                    let mut f = e.clone();
                    let coef = if up {
                        if !pattern[i] && e[i] == -1 {
                            continue;
                        }
                        f[i] += 1;
                        rational(1)
                    } else {
                        if e[i] == 0 {
                            continue;
                        }
                        f[i] -= 1;
                        rational(e[i])
                    };
                    debug_assert!(in_support(&f) && label_of(&f) == t);
                    let Some(&row) = index.get(&f) else {
                        // target piece is flagged zero, so the image must vanish
                        return Err(ModuleError::Malformed(format!(
                            "basis element {f:?} lands in a flagged-zero piece"
                        ))
                        .into());
                    };
                    triplets.push((row, col, coef));
                }
                maps.insert(a.clone(), ExactMatrix::from_triplets(rows, src.len(), triplets).map_err(ModuleError::from)?);
            }
        }
        xs.push(xmaps);
        ds.push(dmaps);
    }
    let dims = bases.iter().map(|(a, b)| (a.clone(), b.len())).collect();
    let names = bases
        .iter()
        .map(|(a, b)| (a.clone(), b.iter().map(|e| monomial_name(e)).collect()))
        .collect();
    Ok(GradedPresentation::new(
        spec.clone(),
        window,
        dims,
        xs,
        ds,
        Some(names),
        Some(spec.zero_label()),
    )?)
}

/// `R = ℚ[x_1..x_n]` with its monomial basis.
pub fn polynomial_ring(spec: &GradingSpec, window: &Window) -> Result<GradedPresentation, ConstructError> {
    monomial_module(spec, window, &vec![true; spec.n()])
}

/// `E`, spanned by inverse monomials `x^β` with every `β_i <= -1`.
pub fn injective_hull_e(spec: &GradingSpec, window: &Window) -> Result<GradedPresentation, ConstructError> {
    monomial_module(spec, window, &vec![false; spec.n()])
}

/// `H^{|S|}_{(x_i : i ∈ S)}(R)`, with basis `x^β`, `β_i <= -1` on `S` and
/// `β_j >= 0` off `S`. `subset` is 1-based. Fine mode only.
pub fn local_coh_vars(
    spec: &GradingSpec,
    subset: &[usize],
    window: &Window,
) -> Result<GradedPresentation, ConstructError> {
    if spec.mode() == GradingMode::Coarse && spec.n() > 1 && subset.len() < spec.n() {
        return Err(ConstructError::CoarseModeUnsupported);
    }
    if spec.mode() == GradingMode::Coarse && spec.n() > 1 {
        // S = all variables is E; coarse pieces are finite only then, but the
        // fine grading is required by contract.
        return Err(ConstructError::CoarseModeUnsupported);
    }
    if subset.is_empty() || subset.iter().any(|&s| s == 0 || s > spec.n()) {
        return Err(ConstructError::BadSubset(spec.n()));
    }
    let mut pattern = vec![true; spec.n()];
    for &s in subset {
        pattern[s - 1] = false;
    }
    monomial_module(spec, window, &pattern)
}

/// Basis element of `D/(D·xd)`: `x^a` at label `a >= 0`, `d^b` at label `-b`.
fn xd_name(a: i64) -> String {
    match a {
        0 => "1".into(),
        1 => "x".into(),
        a if a > 1 => format!("x^{a}"),
        -1 => "d".into(),
        a => format!("d^{}", -a),
    }
}

/// `D/(D·xd)` in one variable, one basis vector per label:
/// `d: x^a ↦ a x^(a-1)`, `1 ↦ d`, `d^b ↦ d^(b+1)`;
/// `x: x^a ↦ x^(a+1)`, `d ↦ 0`, `d^b ↦ (1-b) d^(b-1)`.
pub fn cyclic_xd(window: &Window) -> Result<GradedPresentation, ConstructError> {
    if window.rank() != 1 {
        return Err(ConstructError::NeedsOneVariable);
    }
    let spec = GradingSpec::new(1, GradingMode::Coarse);
    let window = window.with_flags(vec![false], vec![false]);
    let labels = window.labels();
    let dims: BTreeMap<Label, usize> = labels.iter().map(|a| (a.clone(), 1)).collect();
    let mut xmaps = BTreeMap::new();
    let mut dmaps = BTreeMap::new();
    for a in &labels {
        let v = a.coords()[0];
        if window.contains(&Label::new(vec![v + 1])) {
            let c = if v >= 0 { rational(1) } else { rational(1 + v) };
            xmaps.insert(a.clone(), ExactMatrix::scalar(1, &c));
        }
        if window.contains(&Label::new(vec![v - 1])) {
            let c = if v >= 1 { rational(v) } else { rational(1) };
            dmaps.insert(a.clone(), ExactMatrix::scalar(1, &c));
        }
    }
    let names = labels.iter().map(|a| (a.clone(), vec![xd_name(a.coords()[0])])).collect();
    Ok(GradedPresentation::new(
        spec.clone(),
        window,
        dims,
        vec![xmaps],
        vec![dmaps],
        Some(names),
        Some(spec.zero_label()),
    )?)
}

/// The degreewise short exact sequence `0 → E → D/(D·xd) → R → 0` in one
/// variable. The first map is right multiplication by `d`,
/// `x^(-b) ↦ (-1)^(b-1)/(b-1)! · d^b`; the second sends `x^a ↦ x^a`, `d^b ↦ 0`.
#[derive(Clone, Debug)]
pub struct XdSequence {
    pub left: GradedPresentation,
    pub middle: GradedPresentation,
    pub right: GradedPresentation,
    pub inject: GradedMap,
    pub project: GradedMap,
}

pub fn ses_xd(window: &Window) -> Result<XdSequence, ConstructError> {
    let spec = GradingSpec::new(1, GradingMode::Coarse);
    let left = injective_hull_e(&spec, window)?;
    let middle = cyclic_xd(window)?;
    let right = polynomial_ring(&spec, window)?;
    let mut inject = BTreeMap::new();
    let mut project = BTreeMap::new();
    let mut factorial = rational(1);
    for a in window.labels() {
        let v = a.coords()[0];
        let (e_dim, r_dim) = (left.dims()[&a], right.dims()[&a]);
        if v <= -1 {
            let b = -v;
            // (-1)^(b-1) / (b-1)!
            factorial = (1..b).fold(rational(1), |acc, k| acc * rational(k));
            let sign = if (b - 1) % 2 == 0 { 1 } else { -1 };
            let c = ratio(sign, 1) / &factorial;
            inject.insert(a.clone(), ExactMatrix::scalar(1, &c));
        } else {
            inject.insert(a.clone(), ExactMatrix::zeros(1, e_dim));
        }
        let p = if v >= 0 {
            ExactMatrix::identity(1)
        } else {
            ExactMatrix::zeros(r_dim, 1)
        };
        project.insert(a, p);
    }
    debug_assert!(!factorial.is_zero());
    let zero = spec.zero_label();
    Ok(XdSequence {
        left,
        middle,
        right,
        inject: GradedMap::new(zero.clone(), inject),
        project: GradedMap::new(zero, project),
    })
}

// ---------------------------------------------------------------------------
// Recipes

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecipeKind {
    PolynomialRing,
    InjectiveHullE,
    /// 1-based variable subset.
    LocalCohVars(Vec<usize>),
    CyclicXd,
    Shift(Box<ModuleRecipe>, Vec<i64>),
    DirectSum(Vec<ModuleRecipe>),
}

/// A parsed recipe string such as `"shift(E(n=1),-2)"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleRecipe {
    pub kind: RecipeKind,
    pub n: usize,
    /// Explicit `mode=` argument, if any.
    pub mode: Option<GradingMode>,
}

impl ModuleRecipe {
    pub fn parse(s: &str) -> Result<Self, ConstructError> {
        let mut p = RecipeParser {
            src: s,
            chars: s.char_indices().collect(),
            pos: 0,
        };
        let r = p.recipe()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.err("trailing input"));
        }
        Ok(r)
    }

    /// Grading mode a leaf would use with no override.
    fn leaf_mode(&self) -> GradingMode {
        match (&self.kind, self.mode) {
            (_, Some(m)) => m,
            (RecipeKind::LocalCohVars(_), None) => GradingMode::Fine,
            _ => GradingMode::Coarse,
        }
    }

    /// Builds the presentation. `mode` overrides leaves without an explicit
    /// `mode=`; `window` replaces the default leaf windows.
    pub fn build(
        &self,
        mode: Option<GradingMode>,
        window: Option<&WindowSpec>,
    ) -> Result<GradedPresentation, ConstructError> {
        match &self.kind {
            RecipeKind::Shift(inner, l) => {
                let m = inner.build(mode, window)?;
                let l = Label::new(l.clone());
                let l = if l.rank() == 1 && m.spec().rank() > 1 {
                    return Err(ConstructError::Recipe(
                        self.to_string(),
                        "fine-mode shifts need one coordinate per variable, e.g. [1,-1]".into(),
                    ));
                } else {
                    l
                };
                if l.rank() != m.spec().rank() {
                    return Err(ConstructError::Recipe(
                        self.to_string(),
                        "shift has the wrong number of coordinates".into(),
                    ));
                }
                Ok(m.shift(&l))
            }
            RecipeKind::DirectSum(parts) => {
                let mut acc: Option<GradedPresentation> = None;
                for p in parts {
                    let m = p.build(mode, window)?;
                    acc = Some(match acc {
                        None => m,
                        Some(a) => a.direct_sum(&m)?,
                    });
                }
                acc.ok_or_else(|| ConstructError::Recipe(self.to_string(), "empty sum".into()))
            }
            kind => {
                let mode = if self.mode.is_some() {
                    self.leaf_mode()
                } else {
                    mode.unwrap_or_else(|| self.leaf_mode())
                };
                let spec = GradingSpec::new(self.n, mode);
                let w = match window {
                    Some(ws) => ws.resolve(&spec)?,
                    None => default_window(&spec),
                };
                match kind {
                    RecipeKind::PolynomialRing => polynomial_ring(&spec, &w),
                    RecipeKind::InjectiveHullE => injective_hull_e(&spec, &w),
                    RecipeKind::LocalCohVars(s) => local_coh_vars(&spec, s, &w),
                    RecipeKind::CyclicXd => cyclic_xd(&w),
                    _ => unreachable!(),
                }
            }
        }
    }
}

impl fmt::Display for ModuleRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            Some(m) => format!(",mode={m}"),
            None => String::new(),
        };
        match &self.kind {
            RecipeKind::PolynomialRing => write!(f, "R(n={}{mode})", self.n),
            RecipeKind::InjectiveHullE => write!(f, "E(n={}{mode})", self.n),
            RecipeKind::LocalCohVars(s) => {
                let s: Vec<String> = s.iter().map(usize::to_string).collect();
                write!(f, "Hvars(n={},S={}{mode})", self.n, s.join(","))
            }
            RecipeKind::CyclicXd => write!(f, "XD"),
            RecipeKind::Shift(inner, l) => {
                if l.len() == 1 {
                    write!(f, "shift({inner},{})", l[0])
                } else {
                    let l: Vec<String> = l.iter().map(i64::to_string).collect();
                    write!(f, "shift({inner},[{}])", l.join(","))
                }
            }
            RecipeKind::DirectSum(parts) => {
                let p: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "sum({})", p.join(","))
            }
        }
    }
}

/// A user-supplied window box: one `lo..hi` range for every axis, or one per
/// axis. Flags are always chosen by the constructor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    pub ranges: Vec<(i64, i64)>,
}

impl WindowSpec {
    /// Accepts `"lo..hi"` (every axis) or `"a,b x c,d"` (per axis).
    pub fn parse(s: &str) -> Result<Self, ConstructError> {
        let bad = |m: &str| ConstructError::Recipe(s.to_string(), m.to_string());
        let s = s.trim();
        let ranges = if let Some((lo, hi)) = s.split_once("..") {
            vec![(
                lo.trim().parse().map_err(|_| bad("bad lower bound"))?,
                hi.trim().parse().map_err(|_| bad("bad upper bound"))?,
            )]
        } else {
            s.split('x')
                .map(|axis| {
                    let (lo, hi) = axis.split_once(',').ok_or_else(|| bad("expected a,b per axis"))?;
                    Ok((
                        lo.trim().parse().map_err(|_| bad("bad lower bound"))?,
                        hi.trim().parse().map_err(|_| bad("bad upper bound"))?,
                    ))
                })
                .collect::<Result<Vec<_>, ConstructError>>()?
        };
        if ranges.iter().any(|(l, h)| l > h) {
            return Err(bad("empty range"));
        }
        Ok(WindowSpec { ranges })
    }

    pub fn resolve(&self, spec: &GradingSpec) -> Result<Window, ConstructError> {
        let r = spec.rank();
        let ranges = if self.ranges.len() == 1 {
            vec![self.ranges[0]; r]
        } else if self.ranges.len() == r {
            self.ranges.clone()
        } else {
            return Err(ConstructError::Recipe(
                format!("{:?}", self.ranges),
                format!("window needs 1 or {r} axis ranges"),
            ));
        };
        let lo = Label::new(ranges.iter().map(|r| r.0).collect());
        let hi = Label::new(ranges.iter().map(|r| r.1).collect());
        Ok(Window::bare(lo, hi)?)
    }
}

struct RecipeParser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl RecipeParser<'_> {
    fn err(&self, msg: &str) -> ConstructError {
        ConstructError::Recipe(self.src.to_string(), format!("{msg} at char {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn expect(&mut self, c: char) -> Result<(), ConstructError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn int(&mut self) -> Result<i64, ConstructError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.chars.get(self.pos), Some((_, '-' | '+'))) {
            self.pos += 1;
        }
        while matches!(self.chars.get(self.pos), Some((_, c)) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        text.parse().map_err(|_| self.err("expected an integer"))
    }

    fn recipe(&mut self) -> Result<ModuleRecipe, ConstructError> {
        let name = self.ident();
        match name.as_str() {
            "XD" => Ok(ModuleRecipe {
                kind: RecipeKind::CyclicXd,
                n: 1,
                mode: None,
            }),
            "shift" => {
                self.expect('(')?;
                let inner = self.recipe()?;
                self.expect(',')?;
                let l = if self.peek() == Some('[') {
                    self.pos += 1;
                    let mut v = vec![self.int()?];
                    while self.peek() == Some(',') {
                        self.pos += 1;
                        v.push(self.int()?);
                    }
                    self.expect(']')?;
                    v
                } else {
                    vec![self.int()?]
                };
                self.expect(')')?;
                let n = inner.n;
                Ok(ModuleRecipe {
                    kind: RecipeKind::Shift(Box::new(inner), l),
                    n,
                    mode: None,
                })
            }
            "sum" => {
                self.expect('(')?;
                let mut parts = vec![self.recipe()?];
                while self.peek() == Some(',') {
                    self.pos += 1;
                    parts.push(self.recipe()?);
                }
                self.expect(')')?;
                let n = parts[0].n;
                if parts.iter().any(|p| p.n != n) {
                    return Err(self.err("summands have different variable counts"));
                }
                Ok(ModuleRecipe {
                    kind: RecipeKind::DirectSum(parts),
                    n,
                    mode: None,
                })
            }
            "R" | "E" | "Hvars" => {
                let mut n = None;
                let mut mode = None;
                let mut subset: Vec<usize> = Vec::new();
                let mut last_key = String::new();
                if self.peek() == Some('(') {
                    self.pos += 1;
                    loop {
                        let key = self.ident();
                        if self.peek() == Some('=') {
                            self.pos += 1;
                            last_key = key.clone();
                            match key.as_str() {
                                "n" => n = Some(self.int()?),
                                "S" => subset.push(self.int()? as usize),
                                "mode" => {
                                    mode = Some(match self.ident().as_str() {
                                        "coarse" => GradingMode::Coarse,
                                        "fine" => GradingMode::Fine,
                                        _ => return Err(self.err("mode must be coarse or fine")),
                                    })
                                }
                                _ => return Err(self.err(&format!("unknown argument {key:?}"))),
                            }
                        } else if last_key == "S" && !key.is_empty() {
                            subset.push(key.parse().map_err(|_| self.err("bad subset entry"))?);
                        } else {
                            return Err(self.err("expected key=value"));
                        }
                        match self.peek() {
                            Some(',') => self.pos += 1,
                            Some(')') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return Err(self.err("expected ',' or ')'")),
                        }
                    }
                }
                let n = n.ok_or_else(|| self.err("missing n="))?;
                if n < 1 {
                    return Err(self.err("n must be at least 1"));
                }
                if name != "Hvars" && !subset.is_empty() {
                    return Err(self.err("S= only applies to Hvars"));
                }
                let kind = match name.as_str() {
                    "R" => RecipeKind::PolynomialRing,
                    "E" => RecipeKind::InjectiveHullE,
                    _ => {
                        if subset.is_empty() {
                            return Err(self.err("Hvars needs S="));
                        }
                        subset.sort_unstable();
                        subset.dedup();
                        RecipeKind::LocalCohVars(subset)
                    }
                };
                Ok(ModuleRecipe {
                    kind,
                    n: n as usize,
                    mode,
                })
            }
            "" => Err(self.err("expected a recipe")),
            other => Err(self.err(&format!("unknown module {other:?}"))),
        }
    }
}

/// The module zoo used by the verification harness.
pub const ZOO: &[&str] = &[
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
    "Hvars(n=2,S=2)",
    "Hvars(n=2,S=1,2)",
    "Hvars(n=3,S=1,2)",
    "R(n=2,mode=fine)",
    "E(n=2,mode=fine)",
    "sum(E(n=2),E(n=2))",
    "sum(R(n=2),R(n=2))",
    "sum(R(n=1),E(n=1))",
];

pub fn build_recipe(s: &str) -> Result<GradedPresentation, ConstructError> {
    ModuleRecipe::parse(s)?.build(None, None)
}
