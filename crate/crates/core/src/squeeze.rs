//! Squeezed resolutions, their (co)homology, and the Tate splice.
//!
//! A left squeezed resolution of `A` alternates projective covers with
//! passage to the σ-submodule of the kernel:
//!
//! ```text
//! P_i ↠ A_i,   B_i = ker(P_i ↠ A_i),   A_{i+1} = [O^p(G), B_i] ⊆ B_i
//! ```
//!
//! and the right resolution is the dual process with injective hulls and
//! quotients by `O^p(G)`-fixed points. All homology is of the underlying
//! complexes of 𝔽_p-vector spaces; only dimensions are reported.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::gfmat::{self, FpMatrix};
use crate::kgmod::{
    hom_space_matrices, is_isomorphic, matrix_from_nested, quotient_module, submodule_on,
    GroupAlgebra, InjectiveHull, IsoOutcome, KgModule, ModuleError, ModuleMap, ModuleRecord,
    ProjectiveCover, Quotient, Submodule,
};
use crate::permgrp::{is_p_nilpotent, largest_p_quotient_order, Group, GroupSpec};

/// Version tag written into serialized traces.
pub const TRACE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SqueezeError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("degree {degree} needs a resolution of length {required}, have {have}")]
    InsufficientLength {
        degree: i64,
        required: usize,
        have: usize,
    },
    #[error("homology at degree {0} is not determined by the computed terms")]
    Undetermined(i64),
    #[error("no isomorphism P_0 -> I_0 found ({0})")]
    NoSpliceIso(&'static str),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("invalid window {0}")]
    BadWindow(String),
}

/// A closed integer degree range `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self, SqueezeError> {
        if lo > hi {
            return Err(SqueezeError::BadWindow(format!("{lo}..{hi}")));
        }
        Ok(Window { lo, hi })
    }

    pub fn degrees(self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn len(self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains(self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl FromStr for Window {
    type Err = SqueezeError;

    /// Parses `a..b` (inclusive at both ends).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SqueezeError::BadWindow(s.to_string());
        let (a, b) = s.trim().split_once("..").ok_or_else(bad)?;
        let b = b.strip_prefix('=').unwrap_or(b);
        let lo = a.trim().parse().map_err(|_| bad())?;
        let hi = b.trim().parse().map_err(|_| bad())?;
        Window::new(lo, hi)
    }
}

/// Degreewise dimensions over a window.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BettiTable {
    pub window: Window,
    pub dims: Vec<usize>,
}

impl BettiTable {
    pub fn from_fn(window: Window, mut f: impl FnMut(i64) -> usize) -> Self {
        BettiTable {
            window,
            dims: window.degrees().map(&mut f).collect(),
        }
    }

    pub fn zeros(window: Window) -> Self {
        Self::from_fn(window, |_| 0)
    }

    pub fn get(&self, n: i64) -> Option<usize> {
        self.window
            .contains(n)
            .then(|| self.dims[(n - self.window.lo) as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.window.degrees().zip(self.dims.iter().copied())
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// TSV with one `# key=value` comment line, a header, then `degree\tdim` rows.
    pub fn to_tsv(&self, meta: &[(&str, String)]) -> String {
        let mut out = String::new();
        if !meta.is_empty() {
            let fields: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("# {}\n", fields.join(" ")));
        }
        out.push_str("degree\tdim\n");
        for (n, d) in self.iter() {
            out.push_str(&format!("{n}\t{d}\n"));
        }
        out
    }
}

/// A bounded piece of a chain complex: terms `T_i` and differentials
/// `d_i: T_i → T_{i−1}` (stored as `dim T_{i−1} × dim T_i` matrices).
#[derive(Clone, Debug)]
pub struct ChainComplex {
    p: u32,
    terms: BTreeMap<i64, KgModule>,
    diffs: BTreeMap<i64, FpMatrix>,
    /// Terms below the stored range are known to vanish.
    pub zero_below: bool,
    /// Terms above the stored range are known to vanish.
    pub zero_above: bool,
}

impl ChainComplex {
    pub fn new(p: u32) -> Self {
        ChainComplex {
            p,
            terms: BTreeMap::new(),
            diffs: BTreeMap::new(),
            zero_below: false,
            zero_above: false,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn set_term(&mut self, i: i64, m: KgModule) {
        self.terms.insert(i, m);
    }

    /// Sets `d_i`; both terms must already be present with matching shapes.
    pub fn set_diff(&mut self, i: i64, d: FpMatrix) -> Result<(), SqueezeError> {
        let (Some(src), Some(tgt)) = (self.terms.get(&i), self.terms.get(&(i - 1))) else {
            return Err(SqueezeError::Invariant(format!(
                "d_{i} set before its terms"
            )));
        };
        if d.cols() != src.dim() || d.rows() != tgt.dim() {
            return Err(SqueezeError::Invariant(format!(
                "d_{i} has shape {}x{}, expected {}x{}",
                d.rows(),
                d.cols(),
                tgt.dim(),
                src.dim()
            )));
        }
        self.diffs.insert(i, d);
        Ok(())
    }

    pub fn lo(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn hi(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn term(&self, i: i64) -> Option<&KgModule> {
        self.terms.get(&i)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &KgModule)> {
        self.terms.iter().map(|(i, m)| (*i, m))
    }

    pub fn diff_matrix(&self, i: i64) -> Option<&FpMatrix> {
        self.diffs.get(&i)
    }

    pub fn diff(&self, i: i64) -> Option<ModuleMap> {
        let d = self.diffs.get(&i)?;
        Some(ModuleMap {
            source: self.terms[&i].clone(),
            target: self.terms[&(i - 1)].clone(),
            matrix: d.clone(),
        })
    }

    /// Dimension of `T_i`, using the vanishing flags outside the stored range.
    pub fn term_dim(&self, i: i64) -> Option<usize> {
        if let Some(m) = self.terms.get(&i) {
            return Some(m.dim());
        }
        match (self.lo(), self.hi()) {
            (None, _) | (_, None) => (self.zero_below || self.zero_above).then_some(0),
            (Some(lo), _) if i < lo => self.zero_below.then_some(0),
            (_, Some(hi)) if i > hi => self.zero_above.then_some(0),
            _ => None,
        }
    }

    fn diff_rank(&self, i: i64) -> Option<usize> {
        if let Some(d) = self.diffs.get(&i) {
            return Some(d.rank());
        }
        if self.term_dim(i) == Some(0) || self.term_dim(i - 1) == Some(0) {
            return Some(0);
        }
        None
    }

    /// `dim ker d_n − dim im d_{n+1}`.
    pub fn homology_dim(&self, n: i64) -> Result<usize, SqueezeError> {
        let dim = self.term_dim(n).ok_or(SqueezeError::Undetermined(n))?;
        let out = self.diff_rank(n).ok_or(SqueezeError::Undetermined(n))?;
        let inc = self.diff_rank(n + 1).ok_or(SqueezeError::Undetermined(n))?;
        dim.checked_sub(out + inc)
            .ok_or_else(|| SqueezeError::Invariant(format!("d^2 != 0 at degree {n}")))
    }

    pub fn homology(&self, window: Window) -> Result<BettiTable, SqueezeError> {
        let dims = window
            .degrees()
            .map(|n| self.homology_dim(n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BettiTable { window, dims })
    }

    /// Degrees `i` where `d_{i−1} ∘ d_i ≠ 0`.
    pub fn d_squared_failures(&self) -> Vec<i64> {
        self.diffs
            .iter()
            .filter_map(|(&i, d)| {
                let prev = self.diffs.get(&(i - 1))?;
                (!prev.mul(d).is_zero()).then_some(i)
            })
            .collect()
    }

    pub fn is_equivariant(&self) -> bool {
        self.diffs
            .keys()
            .all(|&i| self.diff(i).is_some_and(|m| m.is_equivariant()))
    }
}

/// One step of a left squeezed resolution, all subspaces in `P_i` coordinates.
#[derive(Clone, Debug)]
pub struct LeftStep {
    pub a: KgModule,
    pub cover: ProjectiveCover,
    /// `B_i = ker(P_i ↠ A_i)`.
    pub kernel: Submodule,
    /// `A_{i+1} = [O^p(G), B_i]`.
    pub next: Submodule,
}

#[derive(Clone, Debug)]
pub struct LeftSqueezedTrace {
    pub p: u32,
    pub seed: u64,
    pub steps: Vec<LeftStep>,
    /// Every term past the last step vanishes.
    pub terminated: bool,
}

/// Builds `length + 1` steps of the left squeezed resolution of `a`, stopping
/// early once `A_i = 0`.
pub fn left_squeezed_resolution(
    alg: &GroupAlgebra,
    a: &KgModule,
    length: usize,
) -> Result<LeftSqueezedTrace, SqueezeError> {
    let mut steps = Vec::new();
    let mut cur = a.clone();
    for _ in 0..=length {
        if cur.is_zero() {
            break;
        }
        let (cover, kernel) = alg.loops_omega(&cur)?;
        let sigma = alg.sigma_submodule(&kernel.module);
        let rows = sigma.basis.mul(&kernel.basis);
        let next = submodule_on(&cover.projective, &rows)?;
        let a_i = std::mem::replace(&mut cur, next.module.clone());
        steps.push(LeftStep {
            a: a_i,
            cover,
            kernel,
            next,
        });
    }
    Ok(LeftSqueezedTrace {
        p: alg.p(),
        seed: alg.seed(),
        steps,
        terminated: cur.is_zero(),
    })
}

impl LeftSqueezedTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn projective(&self, i: usize) -> Option<&KgModule> {
        self.steps.get(i).map(|s| &s.cover.projective)
    }

    /// `d_i: P_i → P_{i−1}` for `1 ≤ i < len`.
    pub fn differential(&self, i: usize) -> Option<FpMatrix> {
        if i == 0 || i >= self.steps.len() {
            return None;
        }
        let incl = self.steps[i - 1].next.inclusion_matrix();
        Some(incl.mul(&self.steps[i].cover.map.matrix))
    }

    pub fn complex(&self) -> ChainComplex {
        let mut c = ChainComplex::new(self.p);
        c.zero_below = true;
        c.zero_above = self.terminated;
        for (i, s) in self.steps.iter().enumerate() {
            c.set_term(i as i64, s.cover.projective.clone());
        }
        for i in 1..self.steps.len() {
            c.set_diff(i as i64, self.differential(i).expect("in range"))
                .expect("shapes agree by construction");
        }
        c
    }

    /// `dim B_i − dim A_{i+1}` (with `B_0` replaced by `P_0`).
    pub fn step_homology(&self, i: usize) -> Option<usize> {
        if i >= self.steps.len() {
            return self.terminated.then_some(0);
        }
        let s = &self.steps[i];
        let cycles = if i == 0 {
            s.cover.projective.dim()
        } else {
            s.kernel.dim()
        };
        Some(cycles - s.next.dim())
    }

    pub fn to_record(&self, group: &Group) -> LeftTraceRecord {
        LeftTraceRecord {
            version: TRACE_FORMAT_VERSION,
            group: group.spec(),
            p: self.p,
            seed: self.seed,
            terminated: self.terminated,
            steps: self
                .steps
                .iter()
                .map(|s| LeftStepRecord {
                    a: s.a.to_record(),
                    projective: s.cover.projective.to_record(),
                    summands: s.cover.summands.clone(),
                    cover: s.cover.map.matrix.to_nested(),
                    kernel: s.kernel.basis.to_nested(),
                    next: s.next.basis.to_nested(),
                })
                .collect(),
        }
    }
}

/// `H^Ω_n` from the complex, cross-checked against `dim B_n − dim A_{n+1}`.
pub fn squeezed_homology(
    trace: &LeftSqueezedTrace,
    window: Window,
) -> Result<BettiTable, SqueezeError> {
    let complex = trace.complex();
    let mut dims = Vec::with_capacity(window.len());
    for n in window.degrees() {
        if n < 0 {
            dims.push(0);
            continue;
        }
        let h = complex.homology_dim(n).map_err(|e| match e {
            SqueezeError::Undetermined(_) => SqueezeError::InsufficientLength {
                degree: n,
                required: n as usize + 1,
                have: trace.len().saturating_sub(1),
            },
            other => other,
        })?;
        if trace.step_homology(n as usize) != Some(h) {
            return Err(SqueezeError::Invariant(format!(
                "H_{n}: complex gives {h}, kernel/σ-submodule count gives {:?}",
                trace.step_homology(n as usize)
            )));
        }
        dims.push(h);
    }
    Ok(BettiTable { window, dims })
}

/// One step of a right squeezed resolution at degree `i ≤ 0`.
#[derive(Clone, Debug)]
pub struct RightStep {
    pub c: KgModule,
    pub hull: InjectiveHull,
    /// `D_i = I_i / ι(C_i)`.
    pub cokernel: Quotient,
    /// `C_{i−1} = D_i / fix(D_i)`.
    pub next: Quotient,
}

impl RightStep {
    /// Composite projection `I_i ↠ C_{i−1}`.
    pub fn projection(&self) -> FpMatrix {
        self.next.proj.mul(&self.cokernel.proj)
    }
}

/// Steps at degrees `0, −1, −2, …` (index `k` is degree `−k`).
#[derive(Clone, Debug)]
pub struct RightSqueezedTrace {
    pub p: u32,
    pub seed: u64,
    pub steps: Vec<RightStep>,
    pub terminated: bool,
}

pub fn right_squeezed_resolution(
    alg: &GroupAlgebra,
    c: &KgModule,
    length: usize,
) -> Result<RightSqueezedTrace, SqueezeError> {
    let mut steps = Vec::new();
    let mut cur = c.clone();
    for _ in 0..=length {
        if cur.is_zero() {
            break;
        }
        let (hull, cokernel) = alg.coloops_omega_inv(&cur)?;
        let next = alg.sigma_quotient(&cokernel.module);
        let c_i = std::mem::replace(&mut cur, next.module.clone());
        steps.push(RightStep {
            c: c_i,
            hull,
            cokernel,
            next,
        });
    }
    Ok(RightSqueezedTrace {
        p: alg.p(),
        seed: alg.seed(),
        steps,
        terminated: cur.is_zero(),
    })
}

impl RightSqueezedTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `I_{−k}`.
    pub fn injective(&self, k: usize) -> Option<&KgModule> {
        self.steps.get(k).map(|s| &s.hull.injective)
    }

    /// `I_{−k} → I_{−k−1}`, available when step `k + 1` exists.
    pub fn differential(&self, k: usize) -> Option<FpMatrix> {
        let next = self.steps.get(k + 1)?;
        Some(next.hull.map.matrix.mul(&self.steps[k].projection()))
    }

    pub fn complex(&self) -> ChainComplex {
        let mut c = ChainComplex::new(self.p);
        c.zero_above = true;
        c.zero_below = self.terminated;
        for (k, s) in self.steps.iter().enumerate() {
            c.set_term(-(k as i64), s.hull.injective.clone());
        }
        for k in 0..self.steps.len().saturating_sub(1) {
            c.set_diff(-(k as i64), self.differential(k).expect("in range"))
                .expect("shapes agree by construction");
        }
        c
    }

    /// `dim fix(D_{−n})`, plus `dim C_0` when `n = 0`.
    pub fn step_cohomology(&self, n: usize) -> Option<usize> {
        if n >= self.steps.len() {
            return self.terminated.then_some(0);
        }
        let s = &self.steps[n];
        let fixed = s.cokernel.module.dim() - s.next.module.dim();
        Some(if n == 0 { s.c.dim() + fixed } else { fixed })
    }

    pub fn to_record(&self, group: &Group) -> RightTraceRecord {
        RightTraceRecord {
            version: TRACE_FORMAT_VERSION,
            group: group.spec(),
            p: self.p,
            seed: self.seed,
            terminated: self.terminated,
            steps: self
                .steps
                .iter()
                .map(|s| RightStepRecord {
                    c: s.c.to_record(),
                    injective: s.hull.injective.to_record(),
                    summands: s.hull.summands.clone(),
                    hull: s.hull.map.matrix.to_nested(),
                    cokernel_proj: s.cokernel.proj.to_nested(),
                    next_proj: s.next.proj.to_nested(),
                })
                .collect(),
        }
    }
}

/// `H^n_Ω` for `n` in `window`, read at complex degree `−n`.
pub fn squeezed_cohomology(
    trace: &RightSqueezedTrace,
    window: Window,
) -> Result<BettiTable, SqueezeError> {
    let complex = trace.complex();
    let mut dims = Vec::with_capacity(window.len());
    for n in window.degrees() {
        if n < 0 {
            dims.push(0);
            continue;
        }
        let h = complex.homology_dim(-n).map_err(|e| match e {
            SqueezeError::Undetermined(_) => SqueezeError::InsufficientLength {
                degree: n,
                required: n as usize + 1,
                have: trace.len().saturating_sub(1),
            },
            other => other,
        })?;
        if trace.step_cohomology(n as usize) != Some(h) {
            return Err(SqueezeError::Invariant(format!(
                "H^{n}: complex gives {h}, fixed-point count gives {:?}",
                trace.step_cohomology(n as usize)
            )));
        }
        dims.push(h);
    }
    Ok(BettiTable { window, dims })
}

/// The spliced complex `T` with `T_i = P_i` (`i ≥ 1`) and `T_i = I_{i−1}` (`i ≤ 0`).
#[derive(Clone, Debug)]
pub struct TateSplice {
    pub complex: ChainComplex,
    /// The identification `P_0 ≅ I_0` used in `d_1`.
    pub phi: FpMatrix,
}

/// Finds an isomorphism `P_0 → I_0`.
pub fn splice_isomorphism(
    left: &LeftSqueezedTrace,
    right: &RightSqueezedTrace,
    seed: u64,
) -> Result<FpMatrix, SqueezeError> {
    let (Some(p0), Some(i0)) = (left.projective(0), right.injective(0)) else {
        return Err(SqueezeError::NoSpliceIso("empty resolution"));
    };
    match is_isomorphic(p0, i0, seed)? {
        IsoOutcome::Isomorphic(w) => Ok(w.matrix),
        IsoOutcome::NotIsomorphic => Err(SqueezeError::NoSpliceIso("P_0 and I_0 differ")),
        IsoOutcome::Inconclusive => Err(SqueezeError::NoSpliceIso("search budget exhausted")),
    }
}

pub fn tate_splice(
    left: &LeftSqueezedTrace,
    right: &RightSqueezedTrace,
) -> Result<TateSplice, SqueezeError> {
    let phi = splice_isomorphism(left, right, left.seed)?;
    tate_splice_with(left, right, phi)
}

/// Splice through a caller-chosen isomorphism `phi: P_0 → I_0`.
pub fn tate_splice_with(
    left: &LeftSqueezedTrace,
    right: &RightSqueezedTrace,
    phi: FpMatrix,
) -> Result<TateSplice, SqueezeError> {
    let (Some(p0), Some(i0)) = (left.projective(0), right.injective(0)) else {
        return Err(SqueezeError::NoSpliceIso("empty resolution"));
    };
    if !phi.is_invertible() || !p0.is_equivariant(i0, &phi) {
        return Err(SqueezeError::NoSpliceIso(
            "supplied map is not an isomorphism",
        ));
    }
    let mut c = ChainComplex::new(left.p);
    c.zero_above = left.terminated;
    c.zero_below = right.terminated;
    for i in 1..left.len() {
        c.set_term(i as i64, left.steps[i].cover.projective.clone());
    }
    for k in 1..right.len() {
        c.set_term(1 - k as i64, right.steps[k].hull.injective.clone());
    }
    for i in 2..left.len() {
        c.set_diff(i as i64, left.differential(i).expect("in range"))?;
    }
    if left.len() >= 2 && right.len() >= 2 {
        let d1 = right
            .differential(0)
            .expect("in range")
            .mul(&phi)
            .mul(&left.differential(1).expect("in range"));
        c.set_diff(1, d1)?;
    }
    for k in 1..right.len().saturating_sub(1) {
        c.set_diff(1 - k as i64, right.differential(k).expect("in range"))?;
    }
    Ok(TateSplice { complex: c, phi })
}

/// Left length and right depth needed to read `Ĥ^Ω` on `window`.
pub fn tate_lengths(window: Window) -> (usize, usize) {
    let left = (window.hi + 1).max(1) as usize;
    let right = (2 - window.lo).max(1) as usize;
    (left, right)
}

pub fn tate_squeezed_homology(
    alg: &GroupAlgebra,
    window: Window,
) -> Result<BettiTable, SqueezeError> {
    let k = alg.trivial();
    let (l, r) = tate_lengths(window);
    let left = left_squeezed_resolution(alg, &k, l)?;
    let right = right_squeezed_resolution(alg, &k, r)?;
    let splice = tate_splice(&left, &right)?;
    let bad = splice.complex.d_squared_failures();
    if !bad.is_empty() {
        return Err(SqueezeError::Invariant(format!(
            "d^2 != 0 at degrees {bad:?}"
        )));
    }
    splice.complex.homology(window)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormVerdict {
    Iso,
    Zero,
    Other,
}

impl fmt::Display for NormVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormVerdict::Iso => "iso",
            NormVerdict::Zero => "zero",
            NormVerdict::Other => "other",
        })
    }
}

#[derive(Clone, Debug)]
pub struct NormMap {
    /// `H^Ω_0 × H^0_Ω` matrix of the comparison map.
    pub matrix: FpMatrix,
    pub rank: usize,
    pub verdict: NormVerdict,
    pub p_nilpotent: bool,
}

impl NormMap {
    /// Whether the verdict agrees with p-nilpotence (iso exactly when p-nilpotent).
    pub fn consistent(&self) -> bool {
        match self.verdict {
            NormVerdict::Iso => self.p_nilpotent,
            NormVerdict::Zero => !self.p_nilpotent,
            NormVerdict::Other => false,
        }
    }
}

/// The degree-0 comparison on `P_0 = I_0 = kG`: `O^p(G)`-fixed points of `kG`
/// (spanned by coset sums) mapped to the coinvariants `kG / [O^p(G), kG]`.
pub fn norm_map(alg: &GroupAlgebra) -> Result<NormMap, SqueezeError> {
    let r = alg.regular();
    let fixed = alg.fixed_points(&r);
    let sigma = alg.sigma_submodule(&r);
    let coinv = quotient_module(&r, &sigma.basis)?;
    let matrix = coinv.proj.mul(&fixed.inclusion_matrix());
    let rank = matrix.rank();
    let verdict = if rank == 0 {
        NormVerdict::Zero
    } else if matrix.is_square() && rank == matrix.rows() {
        NormVerdict::Iso
    } else {
        NormVerdict::Other
    };
    Ok(NormMap {
        matrix,
        rank,
        verdict,
        p_nilpotent: is_p_nilpotent(alg.group(), alg.p()),
    })
}

/// `dim Ĥ^n(G; 𝔽_p)`: for `n ≥ 0` the number of `P(k)` summands in the cover
/// of `Ω^n k`; for `n = −1−m` the number of `P(k)` summands in the hull of `Ω^{−m} k`.
pub fn classical_tate_dimensions(
    alg: &GroupAlgebra,
    window: Window,
) -> Result<BettiTable, SqueezeError> {
    classical_tate_dimensions_with(alg, window, Exec::default())
}

pub fn classical_tate_dimensions_with(
    alg: &GroupAlgebra,
    window: Window,
    exec: Exec,
) -> Result<BettiTable, SqueezeError> {
    if !alg.group().order().is_multiple_of(alg.p() as usize) {
        return Ok(BettiTable::zeros(window));
    }
    let pos = window.hi.max(-1);
    let neg = (-1 - window.lo).max(-1);
    let halves = exec.map(2, |half| -> Result<Vec<usize>, SqueezeError> {
        let mut m = alg.trivial();
        let mut out = Vec::new();
        let top = if half == 0 { pos } else { neg };
        for _ in 0..=top {
            let count = if half == 0 {
                let (cover, omega) = alg.loops_omega(&m)?;
                m = omega.module;
                cover.summands.iter().filter(|&&s| s == 0).count()
            } else {
                let (hull, omega_inv) = alg.coloops_omega_inv(&m)?;
                m = omega_inv.module;
                hull.summands.iter().filter(|&&s| s == 0).count()
            };
            out.push(count);
        }
        Ok(out)
    });
    let mut halves = halves.into_iter();
    let pos_dims = halves.next().expect("two halves")?;
    let neg_dims = halves.next().expect("two halves")?;
    Ok(BettiTable::from_fn(window, |n| {
        if n >= 0 {
            pos_dims[n as usize]
        } else {
            neg_dims[(-1 - n) as usize]
        }
    }))
}

/// Predicted versus computed `Ĥ^Ω` table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AndersonReport {
    pub p_nilpotent: bool,
    pub p_quotient_order: usize,
    pub loops: BettiTable,
    pub predicted: BettiTable,
    pub computed: BettiTable,
    pub mismatches: Vec<i64>,
}

impl AndersonReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares `Ĥ^Ω_*` with the prediction built from `H^Ω_*`:
/// `H_n` for `n ≥ 2`, `H_{1−n}` for `n ≤ −1`, and `|P| + H_1` in degrees 0 and 1,
/// where `|P|` is the order of the largest p-quotient. Everything vanishes for
/// p-nilpotent groups.
pub fn anderson_tate_check(
    alg: &GroupAlgebra,
    window: Window,
) -> Result<AndersonReport, SqueezeError> {
    let p_nilpotent = is_p_nilpotent(alg.group(), alg.p());
    let quotient = largest_p_quotient_order(alg.group(), alg.p());
    let top = window.hi.max(1 - window.lo).max(1);
    let loops_window = Window::new(0, top)?;
    let trace = left_squeezed_resolution(alg, &alg.trivial(), top as usize + 1)?;
    let loops = squeezed_homology(&trace, loops_window)?;
    let h = |n: i64| loops.get(n).expect("inside loops window");
    let predicted = BettiTable::from_fn(window, |n| {
        if p_nilpotent {
            0
        } else if n >= 2 {
            h(n)
        } else if n <= -1 {
            h(1 - n)
        } else {
            quotient + h(1)
        }
    });
    let computed = tate_squeezed_homology(alg, window)?;
    let mismatches = window
        .degrees()
        .filter(|&n| predicted.get(n) != computed.get(n))
        .collect();
    Ok(AndersonReport {
        p_nilpotent,
        p_quotient_order: quotient,
        loops,
        predicted,
        computed,
        mismatches,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeftStepRecord {
    pub a: ModuleRecord,
    pub projective: ModuleRecord,
    pub summands: Vec<usize>,
    pub cover: Vec<Vec<u32>>,
    pub kernel: Vec<Vec<u32>>,
    pub next: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeftTraceRecord {
    pub version: u32,
    pub group: GroupSpec,
    pub p: u32,
    pub seed: u64,
    pub terminated: bool,
    pub steps: Vec<LeftStepRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightStepRecord {
    pub c: ModuleRecord,
    pub injective: ModuleRecord,
    pub summands: Vec<usize>,
    pub hull: Vec<Vec<u32>>,
    pub cokernel_proj: Vec<Vec<u32>>,
    pub next_proj: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightTraceRecord {
    pub version: u32,
    pub group: GroupSpec,
    pub p: u32,
    pub seed: u64,
    pub terminated: bool,
    pub steps: Vec<RightStepRecord>,
}

fn nested(p: u32, rows: usize, cols: usize, m: &[Vec<u32>]) -> Result<FpMatrix, SqueezeError> {
    if rows == 0 && m.is_empty() {
        return Ok(FpMatrix::zeros(p, 0, cols));
    }
    Ok(matrix_from_nested(p, rows, cols, m).map_err(ModuleError::from)?)
}

fn broken(msg: impl Into<String>) -> SqueezeError {
    SqueezeError::Invariant(msg.into())
}

impl LeftTraceRecord {
    /// Rebuilds the trace, re-checking every invariant: equivariant surjective
    /// covers, kernels, invariant σ-submodules, chaining and `d² = 0`.
    pub fn validate(&self, group: Arc<Group>) -> Result<LeftSqueezedTrace, SqueezeError> {
        if self.version != TRACE_FORMAT_VERSION {
            return Err(broken(format!("trace format version {}", self.version)));
        }
        if group.spec() != self.group {
            return Err(broken("trace belongs to a different group"));
        }
        let p = self.p;
        let mut steps: Vec<LeftStep> = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            let a = KgModule::from_record(group.clone(), &s.a)?;
            let proj = KgModule::from_record(group.clone(), &s.projective)?;
            let pi = nested(p, a.dim(), proj.dim(), &s.cover)?;
            let map = ModuleMap::new(proj.clone(), a.clone(), pi)?;
            if !map.is_surjective() {
                return Err(broken(format!("cover at step {i} is not surjective")));
            }
            let kernel_rows = s.kernel.len();
            let kernel_basis = nested(p, kernel_rows, proj.dim(), &s.kernel)?;
            if kernel_basis != map.matrix.kernel_basis().row_space() {
                return Err(broken(format!("step {i} kernel is not ker(pi)")));
            }
            let kernel = submodule_on(&proj, &kernel_basis)?;
            let next_basis = nested(p, s.next.len(), proj.dim(), &s.next)?;
            if !gfmat::is_subspace(&next_basis, &kernel_basis).map_err(ModuleError::from)? {
                return Err(broken(format!("step {i}: A_(i+1) not inside B_i")));
            }
            let next = submodule_on(&proj, &next_basis)?;
            if let Some(prev) = steps.last() {
                if prev.next.module.gen_actions() != a.gen_actions() {
                    return Err(broken(format!("step {i} does not continue step {}", i - 1)));
                }
            }
            steps.push(LeftStep {
                a,
                cover: ProjectiveCover {
                    projective: proj,
                    map,
                    summands: s.summands.clone(),
                },
                kernel,
                next,
            });
        }
        let trace = LeftSqueezedTrace {
            p,
            seed: self.seed,
            steps,
            terminated: self.terminated,
        };
        if self.terminated && trace.steps.last().is_some_and(|s| s.next.dim() != 0) {
            return Err(broken("terminated flag set with a nonzero last A"));
        }
        let bad = trace.complex().d_squared_failures();
        if !bad.is_empty() {
            return Err(broken(format!("d^2 != 0 at {bad:?}")));
        }
        Ok(trace)
    }
}

impl RightTraceRecord {
    /// Rebuilds the trace, re-checking hulls, cokernels, fixed-point quotients
    /// and `d² = 0`.
    pub fn validate(&self, group: Arc<Group>) -> Result<RightSqueezedTrace, SqueezeError> {
        if self.version != TRACE_FORMAT_VERSION {
            return Err(broken(format!("trace format version {}", self.version)));
        }
        if group.spec() != self.group {
            return Err(broken("trace belongs to a different group"));
        }
        let p = self.p;
        let mut steps: Vec<RightStep> = Vec::new();
        for (k, s) in self.steps.iter().enumerate() {
            let c = KgModule::from_record(group.clone(), &s.c)?;
            let inj = KgModule::from_record(group.clone(), &s.injective)?;
            let iota = nested(p, inj.dim(), c.dim(), &s.hull)?;
            let map = ModuleMap::new(c.clone(), inj.clone(), iota)?;
            if !map.is_injective() {
                return Err(broken(format!("hull at step {k} is not injective")));
            }
            let cokernel = quotient_module(&inj, &map.matrix.transpose())?;
            let stored = nested(p, s.cokernel_proj.len(), inj.dim(), &s.cokernel_proj)?;
            if stored != cokernel.proj {
                return Err(broken(format!("step {k} cokernel projection differs")));
            }
            let d = &cokernel.module;
            let next_proj = nested(p, s.next_proj.len(), d.dim(), &s.next_proj)?;
            let fixed_from_record = next_proj.kernel_basis();
            let next = quotient_module(d, &fixed_from_record)?;
            if next.proj != next_proj {
                return Err(broken(format!("step {k} quotient projection differs")));
            }
            if let Some(prev) = steps.last() {
                if prev.next.module.gen_actions() != c.gen_actions() {
                    return Err(broken(format!("step {k} does not continue step {}", k - 1)));
                }
            }
            steps.push(RightStep {
                c,
                hull: InjectiveHull {
                    injective: inj,
                    map,
                    summands: s.summands.clone(),
                },
                cokernel,
                next,
            });
        }
        let trace = RightSqueezedTrace {
            p,
            seed: self.seed,
            steps,
            terminated: self.terminated,
        };
        let bad = trace.complex().d_squared_failures();
        if !bad.is_empty() {
            return Err(broken(format!("d^2 != 0 at {bad:?}")));
        }
        Ok(trace)
    }
}

/// An invertible non-scalar element of `End_{kG}(m)`, if one exists; used to
/// re-splice through a second identification.
pub fn nonscalar_automorphism(m: &KgModule) -> Result<Option<FpMatrix>, SqueezeError> {
    let basis = hom_space_matrices(m, m)?;
    let p = m.p();
    let h = basis.len() as u32;
    let Some(total) = (p as u64).checked_pow(h).filter(|&t| t <= 1 << 16) else {
        return Ok(None);
    };
    let id = FpMatrix::identity(p, m.dim());
    for mut code in 1..total {
        let mut cand = FpMatrix::zeros(p, m.dim(), m.dim());
        for b in &basis {
            cand.add_scaled((code % p as u64) as u32, b);
            code /= p as u64;
        }
        let scalar = (0..p).any(|s| cand == id.scale(s));
        if !scalar && cand.is_invertible() {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}
