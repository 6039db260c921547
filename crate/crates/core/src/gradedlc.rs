//! Local and Čech cohomology of graded modules over `k[τ_1, …, τ_s]`.
//!
//! Grading is homological: `τ_i` raises degree by `|τ_i| > 0`, and a
//! cohomological degree `n` is stored as homological degree `−n`, so the
//! classes of `M[1/τ]/M` appear in negative degrees.
//!
//! A [`GradedModule`] is known on a finite window `[lo, hi]`; it vanishes below
//! `lo` and is unknown above `hi`. Any computation that would need a slice
//! above `hi` fails with [`GradedError::WindowTooSmall`] instead of guessing.
//!
//! For exponents `n = (n_1, …, n_s)` the unstable Koszul cochain complex in
//! internal degree `d` is
//!
//! ```text
//! K^j_d = ⊕_{|S| = j} M_{d + Σ_{i∈S} n_i |τ_i|}
//! ```
//!
//! with differential `(−1)^{#{l ∈ S : l < i}} τ_i^{n_i}` from `S` to `S ∪ {i}`.
//! Local cohomology is its colimit over `n`, Čech cohomology the colimit of the
//! subcomplex `K^{≥1}` shifted down by one.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::gfmat::{self, FpMatrix, GfError};
use crate::squeeze::{BettiTable, Window};

/// Largest number of polynomial generators supported.
pub const MAX_VARIABLES: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("tau_{i} and tau_{j} do not commute starting in degree {degree}")]
    NotCentral { i: usize, j: usize, degree: i64 },
    #[error(
        "window too small: degree {needed} is above the known range (requested degree {degree})"
    )]
    WindowTooSmall { degree: i64, needed: i64 },
    #[error("no stabilization in degree {degree} within {budget} exponent steps")]
    NoStabilization { degree: i64, budget: usize },
    #[error("finite generation refuted: degree {degree} is not spanned by tau-images")]
    FgRefuted { degree: i64 },
    #[error("module has no finite-generation bound")]
    NotFinitelyGenerated,
    #[error("operation needs exactly one variable, module has {0}")]
    NotSingleVariable(usize),
    #[error("at most {MAX_VARIABLES} variables supported, got {0}")]
    TooManyVariables(usize),
    #[error("exponents must be positive and one per variable")]
    BadExponents,
}

/// A graded 𝔽_p-module with commuting degree-raising operators `τ_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule {
    p: u32,
    tau_degrees: Vec<i64>,
    lo: i64,
    hi: i64,
    dims: Vec<usize>,
    /// `actions[i][d - lo]`: `M_d → M_{d+|τ_i|}`, for `d + |τ_i| ≤ hi`.
    actions: Vec<Vec<FpMatrix>>,
    fg_bound: Option<i64>,
}

/// JSON layout of a graded module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedModuleRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub p: u32,
    pub tau_degrees: Vec<i64>,
    pub lo: i64,
    pub hi: i64,
    pub dims: Vec<usize>,
    /// `actions[i][k]` is the matrix of `τ_i` from degree `lo + k`.
    pub actions: Vec<Vec<Vec<Vec<u32>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fg_bound: Option<i64>,
}

impl GradedModule {
    /// Validated constructor: shapes, positivity of degrees and centrality.
    pub fn new(
        p: u32,
        tau_degrees: Vec<i64>,
        lo: i64,
        dims: Vec<usize>,
        actions: Vec<Vec<FpMatrix>>,
        fg_bound: Option<i64>,
    ) -> Result<Self, GradedError> {
        gfmat::check_prime(p)?;
        if tau_degrees.len() > MAX_VARIABLES {
            return Err(GradedError::TooManyVariables(tau_degrees.len()));
        }
        if tau_degrees.iter().any(|&t| t <= 0) {
            return Err(GradedError::Shape("tau degrees must be positive".into()));
        }
        if actions.len() != tau_degrees.len() {
            return Err(GradedError::Shape(format!(
                "{} action lists for {} variables",
                actions.len(),
                tau_degrees.len()
            )));
        }
        let hi = lo + dims.len() as i64 - 1;
        let m = GradedModule {
            p,
            tau_degrees,
            lo,
            hi,
            dims,
            actions,
            fg_bound,
        };
        for (i, list) in m.actions.iter().enumerate() {
            let t = m.tau_degrees[i];
            let expected = (m.hi - m.lo + 1 - t).max(0) as usize;
            if list.len() != expected {
                return Err(GradedError::Shape(format!(
                    "tau_{i} has {} matrices, expected {expected}",
                    list.len()
                )));
            }
            for (k, a) in list.iter().enumerate() {
                let d = m.lo + k as i64;
                let (r, c) = (m.slice_dim(d + t), m.slice_dim(d));
                if a.p() != p || a.rows() != r || a.cols() != c {
                    return Err(GradedError::Shape(format!(
                        "tau_{i} from degree {d} is {}x{}, expected {r}x{c}",
                        a.rows(),
                        a.cols()
                    )));
                }
            }
        }
        m.check_central()?;
        Ok(m)
    }

    /// Builds a module from a basis of homogeneous elements and the action of
    /// each `τ_i` on basis elements (sending basis element `b` to `Some(c)` or 0).
    pub fn from_basis(
        p: u32,
        tau_degrees: Vec<i64>,
        lo: i64,
        hi: i64,
        degrees: &[i64],
        act: impl Fn(usize, usize) -> Option<usize>,
        fg_bound: Option<i64>,
    ) -> Result<Self, GradedError> {
        let width = (hi - lo + 1) as usize;
        let mut dims = vec![0usize; width];
        let mut position = vec![0usize; degrees.len()];
        for (b, &d) in degrees.iter().enumerate() {
            if d < lo || d > hi {
                return Err(GradedError::Shape(format!("basis element in degree {d}")));
            }
            position[b] = dims[(d - lo) as usize];
            dims[(d - lo) as usize] += 1;
        }
        let mut actions = Vec::new();
        for (i, &t) in tau_degrees.iter().enumerate() {
            let count = (width as i64 - t).max(0) as usize;
            let mut list: Vec<FpMatrix> = (0..count)
                .map(|k| {
                    let d = lo + k as i64;
                    FpMatrix::zeros(p, dims[(d + t - lo) as usize], dims[k])
                })
                .collect();
            for (b, &d) in degrees.iter().enumerate() {
                if d + t > hi {
                    continue;
                }
                if let Some(c) = act(i, b) {
                    if degrees[c] != d + t {
                        return Err(GradedError::Shape(format!(
                            "tau_{i} sends basis element {b} to the wrong degree"
                        )));
                    }
                    list[(d - lo) as usize].set(position[c], position[b], 1);
                }
            }
            actions.push(list);
        }
        Self::new(p, tau_degrees, lo, dims, actions, fg_bound)
    }

    pub fn from_record(rec: &GradedModuleRecord) -> Result<Self, GradedError> {
        let hi = rec.lo + rec.dims.len() as i64 - 1;
        if hi != rec.hi {
            return Err(GradedError::Shape(format!(
                "window {}..{} does not match {} dims",
                rec.lo,
                rec.hi,
                rec.dims.len()
            )));
        }
        let dim_at = |d: i64| -> usize {
            if d < rec.lo || d > hi {
                0
            } else {
                rec.dims[(d - rec.lo) as usize]
            }
        };
        let mut actions = Vec::new();
        for (i, list) in rec.actions.iter().enumerate() {
            let t = *rec
                .tau_degrees
                .get(i)
                .ok_or_else(|| GradedError::Shape("more action lists than variables".into()))?;
            let mut mats = Vec::new();
            for (k, rows) in list.iter().enumerate() {
                let d = rec.lo + k as i64;
                let (r, c) = (dim_at(d + t), dim_at(d));
                if rows.len() != r || rows.iter().any(|row| row.len() != c) {
                    return Err(GradedError::Shape(format!(
                        "tau_{i} from degree {d}: expected {r}x{c}"
                    )));
                }
                let data = rows.iter().flatten().map(|&x| x % rec.p).collect();
                mats.push(FpMatrix::from_data(rec.p, r, c, data));
            }
            actions.push(mats);
        }
        Self::new(
            rec.p,
            rec.tau_degrees.clone(),
            rec.lo,
            rec.dims.clone(),
            actions,
            rec.fg_bound,
        )
    }

    pub fn to_record(&self, name: Option<String>) -> GradedModuleRecord {
        GradedModuleRecord {
            name,
            p: self.p,
            tau_degrees: self.tau_degrees.clone(),
            lo: self.lo,
            hi: self.hi,
            dims: self.dims.clone(),
            actions: self
                .actions
                .iter()
                .map(|l| l.iter().map(FpMatrix::to_nested).collect())
                .collect(),
            fg_bound: self.fg_bound,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> usize {
        self.tau_degrees.len()
    }

    pub fn tau_degrees(&self) -> &[i64] {
        &self.tau_degrees
    }

    pub fn window(&self) -> Window {
        Window {
            lo: self.lo,
            hi: self.hi,
        }
    }

    pub fn fg_bound(&self) -> Option<i64> {
        self.fg_bound
    }

    fn slice_dim(&self, d: i64) -> usize {
        if d < self.lo || d > self.hi {
            0
        } else {
            self.dims[(d - self.lo) as usize]
        }
    }

    /// `dim M_d`; an error above the known window.
    pub fn dim(&self, d: i64) -> Result<usize, GradedError> {
        self.check_known(d, d)?;
        Ok(self.slice_dim(d))
    }

    fn check_known(&self, needed: i64, requested: i64) -> Result<(), GradedError> {
        if needed > self.hi {
            Err(GradedError::WindowTooSmall {
                degree: requested,
                needed,
            })
        } else {
            Ok(())
        }
    }

    /// Matrix of `τ_i^k` from `M_d` to `M_{d + k|τ_i|}`.
    pub fn tau_power(&self, i: usize, k: usize, d: i64) -> Result<FpMatrix, GradedError> {
        let t = self.tau_degrees[i];
        let target = d + k as i64 * t;
        self.check_known(target, d)?;
        let mut out = FpMatrix::identity(self.p, self.slice_dim(d));
        let mut cur = d;
        for _ in 0..k {
            let step = if cur < self.lo {
                FpMatrix::zeros(self.p, self.slice_dim(cur + t), self.slice_dim(cur))
            } else {
                self.actions[i][(cur - self.lo) as usize].clone()
            };
            out = step.mul(&out);
            cur += t;
        }
        Ok(out)
    }

    fn check_central(&self) -> Result<(), GradedError> {
        for i in 0..self.s() {
            for j in i + 1..self.s() {
                let (a, b) = (self.tau_degrees[i], self.tau_degrees[j]);
                let mut d = self.lo;
                while d + a + b <= self.hi {
                    let ij = self.tau_power(j, 1, d + a)?.mul(&self.tau_power(i, 1, d)?);
                    let ji = self.tau_power(i, 1, d + b)?.mul(&self.tau_power(j, 1, d)?);
                    if ij != ji {
                        return Err(GradedError::NotCentral { i, j, degree: d });
                    }
                    d += 1;
                }
            }
        }
        Ok(())
    }

    /// The same underlying module viewed over `k[τ_1^{e_1}, …, τ_s^{e_s}]`.
    pub fn restrict_to_powers(&self, exponents: &[usize]) -> Result<GradedModule, GradedError> {
        if exponents.len() != self.s() || exponents.contains(&0) {
            return Err(GradedError::BadExponents);
        }
        let mut actions = Vec::new();
        let mut degrees = Vec::new();
        for (i, &e) in exponents.iter().enumerate() {
            let t = self.tau_degrees[i] * e as i64;
            degrees.push(t);
            let count = (self.hi - self.lo + 1 - t).max(0);
            actions.push(
                (0..count)
                    .map(|k| self.tau_power(i, e, self.lo + k))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let fg_bound = self.fg_bound.map(|g| {
            g + exponents
                .iter()
                .zip(&self.tau_degrees)
                .map(|(&e, &t)| (e as i64 - 1) * t)
                .sum::<i64>()
        });
        Self::new(
            self.p,
            degrees,
            self.lo,
            self.dims.clone(),
            actions,
            fg_bound,
        )
    }

    /// First degree `D ≥ max(lo, fg_bound)` above every visible common socle
    /// element (`x ≠ 0` with `τ_i x = 0` for all `i`).
    pub fn stable_degree(&self) -> Result<i64, GradedError> {
        let g = self.fg_bound.ok_or(GradedError::NotFinitelyGenerated)?;
        let reach = self.tau_degrees.iter().copied().max().unwrap_or(0);
        let mut start = self.lo.max(g);
        for e in self.lo..=self.hi - reach {
            let mut stacked = FpMatrix::zeros(self.p, 0, self.slice_dim(e));
            for i in 0..self.s() {
                stacked = stacked.vstack(&self.tau_power(i, 1, e)?)?;
            }
            if stacked.rank() < self.slice_dim(e) {
                start = start.max(e + 1);
            }
        }
        Ok(start)
    }

    /// Smallest exponent placing every nonzero-index Koszul component of
    /// degree `d` at or above [`Self::stable_degree`].
    fn first_exponent(&self, d: i64, stable: i64) -> usize {
        let t = self.tau_degrees.iter().copied().min().unwrap_or(1);
        let gap = (stable - d).max(0);
        ((gap + t - 1) / t).max(1) as usize
    }

    fn budget(&self) -> Result<usize, GradedError> {
        let g = self.fg_bound.ok_or(GradedError::NotFinitelyGenerated)?;
        Ok(20usize.max(2 * (g - self.lo).max(0) as usize))
    }
}

/// Dimensions indexed by cohomological index `j` and internal degree `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedBettiTable {
    pub max_index: usize,
    pub window: Window,
    /// `dims[j][d - window.lo]`.
    pub dims: Vec<Vec<usize>>,
}

impl GradedBettiTable {
    fn new(max_index: usize, window: Window) -> Self {
        GradedBettiTable {
            max_index,
            window,
            dims: vec![vec![0; window.len()]; max_index + 1],
        }
    }

    /// Zero outside the stored index range.
    pub fn get(&self, j: usize, d: i64) -> usize {
        if j > self.max_index || !self.window.contains(d) {
            return 0;
        }
        self.dims[j][(d - self.window.lo) as usize]
    }

    pub fn row(&self, j: usize) -> BettiTable {
        BettiTable::from_fn(self.window, |d| self.get(j, d))
    }

    pub fn to_tsv(&self, meta: &[(&str, String)]) -> String {
        let mut out = String::new();
        if !meta.is_empty() {
            let fields: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("# {}\n", fields.join(" ")));
        }
        out.push_str("j\tdegree\tdim\n");
        for j in 0..=self.max_index {
            for d in self.window.degrees() {
                out.push_str(&format!("{j}\t{d}\t{}\n", self.get(j, d)));
            }
        }
        out
    }
}

/// The Koszul complex in one internal degree, for fixed exponents.
struct KoszulSlice {
    /// Per cohomological index: `(subset mask, degree, offset)`.
    comps: Vec<Vec<(u32, i64, usize)>>,
    sizes: Vec<usize>,
    /// `deltas[j]: K^j → K^{j+1}`.
    deltas: Vec<FpMatrix>,
}

fn koszul_slice(m: &GradedModule, n: &[usize], d: i64) -> Result<KoszulSlice, GradedError> {
    let s = m.s();
    let mut comps = vec![Vec::new(); s + 1];
    let mut sizes = vec![0usize; s + 1];
    for mask in 0u32..(1 << s) {
        let j = mask.count_ones() as usize;
        let deg = d
            + (0..s)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| n[i] as i64 * m.tau_degrees[i])
                .sum::<i64>();
        m.check_known(deg, d)?;
        comps[j].push((mask, deg, sizes[j]));
        sizes[j] += m.slice_dim(deg);
    }
    let p = m.p;
    let mut deltas = Vec::with_capacity(s);
    for j in 0..s {
        let mut delta = FpMatrix::zeros(p, sizes[j + 1], sizes[j]);
        for &(mask, deg, off) in &comps[j] {
            for (i, &e) in n.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    continue;
                }
                let target = mask | (1 << i);
                let &(_, _, toff) = comps[j + 1]
                    .iter()
                    .find(|c| c.0 == target)
                    .expect("every subset is listed");
                let mut block = m.tau_power(i, e, deg)?;
                if (mask & ((1 << i) - 1)).count_ones() % 2 == 1 {
                    block = block.scale(p - 1);
                }
                for r in 0..block.rows() {
                    for c in 0..block.cols() {
                        delta.set(toff + r, off + c, block.get(r, c));
                    }
                }
            }
        }
        deltas.push(delta);
    }
    Ok(KoszulSlice {
        comps,
        sizes,
        deltas,
    })
}

impl KoszulSlice {
    fn delta(&self, p: u32, j: isize) -> FpMatrix {
        let s = self.sizes.len() - 1;
        if j < 0 {
            FpMatrix::zeros(p, self.sizes[0], 0)
        } else if j as usize >= s {
            FpMatrix::zeros(p, 0, self.sizes[s])
        } else {
            self.deltas[j as usize].clone()
        }
    }

    fn cohomology(&self, p: u32, j: usize) -> usize {
        self.sizes[j] - self.delta(p, j as isize).rank() - self.delta(p, j as isize - 1).rank()
    }
}

/// `K^j_n → K^j_{n'}`: component `S` multiplied by `Π_{i∈S} τ_i^{n'_i − n_i}`.
fn transition(
    m: &GradedModule,
    from: &KoszulSlice,
    n: &[usize],
    to: &KoszulSlice,
    n2: &[usize],
    j: usize,
) -> Result<FpMatrix, GradedError> {
    let mut t = FpMatrix::zeros(m.p, to.sizes[j], from.sizes[j]);
    for (&(mask, deg, off), &(_, _, toff)) in from.comps[j].iter().zip(&to.comps[j]) {
        let mut block = FpMatrix::identity(m.p, m.slice_dim(deg));
        let mut cur = deg;
        for i in 0..m.s() {
            if mask & (1 << i) != 0 {
                let k = n2[i] - n[i];
                block = m.tau_power(i, k, cur)?.mul(&block);
                cur += k as i64 * m.tau_degrees[i];
            }
        }
        for r in 0..block.rows() {
            for c in 0..block.cols() {
                t.set(toff + r, off + c, block.get(r, c));
            }
        }
    }
    Ok(t)
}

/// Dimension of the image of `H^j(K_n) → H^j(K_{n'})`; with `cech`, the
/// complex is truncated to indices `≥ 1`.
fn image_rank(
    m: &GradedModule,
    from: &KoszulSlice,
    n: &[usize],
    to: &KoszulSlice,
    n2: &[usize],
    j: usize,
    cech: bool,
) -> Result<usize, GradedError> {
    let p = m.p;
    let cycles = from.delta(p, j as isize).kernel_basis();
    let t = transition(m, from, n, to, n2, j)?;
    let image = cycles.mul(&t.transpose());
    let boundaries = if cech && j <= 1 {
        FpMatrix::zeros(p, 0, to.sizes[j])
    } else {
        to.delta(p, j as isize - 1).transpose()
    };
    let b = boundaries.rank();
    Ok(boundaries.vstack(&image)?.rank() - b)
}

/// Everything the colimit determines in one internal degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeData {
    pub degree: i64,
    pub module_dim: usize,
    /// `dim H^j_I(M)_d` for `j = 0..=s`.
    pub local: Vec<usize>,
    /// `dim CH^j_I(M)_d` for `j = 0..s`.
    pub cech: Vec<usize>,
    /// Rank of `M_d → CH^0_I(M)_d`.
    pub localization_rank: usize,
    /// Exponent at which all quantities stabilized.
    pub exponent: usize,
}

fn degree_data(
    m: &GradedModule,
    d: i64,
    stable: i64,
    budget: usize,
) -> Result<DegreeData, GradedError> {
    let s = m.s();
    let module_dim = m.dim(d)?;
    if s == 0 {
        return Ok(DegreeData {
            degree: d,
            module_dim,
            local: vec![module_dim],
            cech: Vec::new(),
            localization_rank: 0,
            exponent: 0,
        });
    }
    let mut cache: HashMap<usize, KoszulSlice> = HashMap::new();
    let p = m.p;
    let mut quantities = |a: usize, b: usize| -> Result<Vec<usize>, GradedError> {
        for n in [a, b] {
            if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(n) {
                e.insert(koszul_slice(m, &vec![n; s], d)?);
            }
        }
        let (ka, kb) = (&cache[&a], &cache[&b]);
        let (na, nb) = (vec![a; s], vec![b; s]);
        let mut out = Vec::with_capacity(2 * s + 2);
        for j in 0..=s {
            out.push(image_rank(m, ka, &na, kb, &nb, j, false)?);
        }
        for j in 1..=s {
            out.push(image_rank(m, ka, &na, kb, &nb, j, true)?);
        }
        out.push(kb.delta(p, 0).rank());
        Ok(out)
    };
    let start = m.first_exponent(d, stable);
    for n in start..start + budget {
        let r01 = quantities(n, n + 1)?;
        let r02 = quantities(n, n + 2)?;
        let r12 = quantities(n + 1, n + 2)?;
        if r01 == r02 && r01 == r12 {
            return Ok(DegreeData {
                degree: d,
                module_dim,
                local: r01[..=s].to_vec(),
                cech: r01[s + 1..2 * s + 1].to_vec(),
                localization_rank: r01[2 * s + 1],
                exponent: n,
            });
        }
    }
    Err(GradedError::NoStabilization { degree: d, budget })
}

/// Per-degree colimit data over a window, computed degreewise in parallel.
pub fn colimit_data(
    m: &GradedModule,
    window: Window,
    exec: Exec,
) -> Result<Vec<DegreeData>, GradedError> {
    let budget = m.budget()?;
    let stable = m.stable_degree()?;
    exec.map(window.len(), |k| {
        degree_data(m, window.lo + k as i64, stable, budget)
    })
    .into_iter()
    .collect()
}

/// Cohomology of the unstable Koszul complex for fixed exponents.
pub fn unstable_koszul_cohomology(
    m: &GradedModule,
    exponents: &[usize],
    window: Window,
) -> Result<GradedBettiTable, GradedError> {
    if exponents.len() != m.s() || exponents.contains(&0) {
        return Err(GradedError::BadExponents);
    }
    let mut t = GradedBettiTable::new(m.s(), window);
    for (k, d) in window.degrees().enumerate() {
        let slice = koszul_slice(m, exponents, d)?;
        for j in 0..=m.s() {
            t.dims[j][k] = slice.cohomology(m.p, j);
        }
    }
    Ok(t)
}

pub fn local_cohomology(m: &GradedModule, window: Window) -> Result<GradedBettiTable, GradedError> {
    local_cohomology_with(m, window, Exec::default())
}

pub fn local_cohomology_with(
    m: &GradedModule,
    window: Window,
    exec: Exec,
) -> Result<GradedBettiTable, GradedError> {
    let data = colimit_data(m, window, exec)?;
    let mut t = GradedBettiTable::new(m.s(), window);
    for (k, dd) in data.iter().enumerate() {
        for (j, &v) in dd.local.iter().enumerate() {
            t.dims[j][k] = v;
        }
    }
    Ok(t)
}

pub fn cech_cohomology(m: &GradedModule, window: Window) -> Result<GradedBettiTable, GradedError> {
    let data = colimit_data(m, window, Exec::default())?;
    let mut t = GradedBettiTable::new(m.s().saturating_sub(1), window);
    for (k, dd) in data.iter().enumerate() {
        for (j, &v) in dd.cech.iter().enumerate() {
            t.dims[j][k] = v;
        }
    }
    Ok(t)
}

/// Degrees where `0 → H^0 → M → CH^0 → H^1 → 0` and `CH^j ≅ H^{j+1}` (`j ≥ 1`)
/// fail as rank identities.
pub fn long_exact_sequence_failures(data: &[DegreeData]) -> Vec<i64> {
    data.iter()
        .filter(|dd| {
            let s = dd.local.len() - 1;
            if s == 0 {
                return dd.local[0] != dd.module_dim;
            }
            let rho = dd.localization_rank;
            let ok0 = dd.local[0] + rho == dd.module_dim;
            let ok1 = dd.local[1] + rho == dd.cech[0];
            let rest = (1..s).all(|j| dd.cech[j] == dd.local[j + 1]);
            !(ok0 && ok1 && rest)
        })
        .map(|dd| dd.degree)
        .collect()
}

/// `dim M[1/τ]_d` for a one-variable module, as the stable rank of `τ`-powers.
pub fn telescope_localization(m: &GradedModule, window: Window) -> Result<BettiTable, GradedError> {
    if m.s() != 1 {
        return Err(GradedError::NotSingleVariable(m.s()));
    }
    let budget = m.budget()?;
    let stable = m.stable_degree()?;
    let t = m.tau_degrees[0];
    let dims = Exec::default()
        .map(window.len(), |k| -> Result<usize, GradedError> {
            let d = window.lo + k as i64;
            let rank = |start: usize, steps: usize| -> Result<usize, GradedError> {
                Ok(m.tau_power(0, steps, d + start as i64 * t)?.rank())
            };
            let start = m.first_exponent(d, stable);
            for n in start..start + budget {
                let a = rank(n, 1)?;
                if a == rank(n, 2)? && a == rank(n + 1, 1)? {
                    return Ok(a);
                }
            }
            Err(GradedError::NoStabilization { degree: d, budget })
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BettiTable { window, dims })
}

/// `dim {x ∈ M_d : τ_i^power x = 0 for all i}`.
pub fn torsion_dims(
    m: &GradedModule,
    window: Window,
    power: usize,
) -> Result<BettiTable, GradedError> {
    let mut dims = Vec::with_capacity(window.len());
    for d in window.degrees() {
        let mut stacked = FpMatrix::zeros(m.p, 0, m.dim(d)?);
        for i in 0..m.s() {
            stacked = stacked.vstack(&m.tau_power(i, power, d)?)?;
        }
        dims.push(m.slice_dim(d) - stacked.rank());
    }
    Ok(BettiTable { window, dims })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadicalReport {
    pub exponents: Vec<usize>,
    pub original: GradedBettiTable,
    pub radical: GradedBettiTable,
    /// `(j, d)` where the tables differ.
    pub mismatches: Vec<(usize, i64)>,
}

impl RadicalReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares local cohomology for `(τ_1, …, τ_s)` and `(τ_1^{e_1}, …, τ_s^{e_s})`.
pub fn radical_invariance_check(
    m: &GradedModule,
    exponents: &[usize],
    window: Window,
) -> Result<RadicalReport, GradedError> {
    let powered = m.restrict_to_powers(exponents)?;
    let original = local_cohomology(m, window)?;
    let radical = local_cohomology(&powered, window)?;
    let mut mismatches = Vec::new();
    for j in 0..=m.s() {
        for d in window.degrees() {
            if original.get(j, d) != radical.get(j, d) {
                mismatches.push((j, d));
            }
        }
    }
    Ok(RadicalReport {
        exponents: exponents.to_vec(),
        original,
        radical,
        mismatches,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertReport {
    pub dims: BettiTable,
    pub central: bool,
    /// Whether generation below the recorded bound was verified on the window.
    pub fg_verified: bool,
}

/// Degreewise dimensions plus the centrality and finite-generation checks.
pub fn hilbert_window(m: &GradedModule) -> Result<HilbertReport, GradedError> {
    m.check_central()?;
    let dims = BettiTable::from_fn(m.window(), |d| m.slice_dim(d));
    let mut fg_verified = false;
    if let Some(g) = m.fg_bound {
        for d in (g + 1).max(m.lo)..=m.hi {
            let mut span = FpMatrix::zeros(m.p, 0, m.slice_dim(d));
            for i in 0..m.s() {
                let src = d - m.tau_degrees[i];
                if src >= m.lo {
                    span = span.vstack(&m.tau_power(i, 1, src)?.transpose())?;
                }
            }
            if span.rank() < m.slice_dim(d) {
                return Err(GradedError::FgRefuted { degree: d });
            }
        }
        fg_verified = true;
    }
    Ok(HilbertReport {
        dims,
        central: true,
        fg_verified,
    })
}

/// Wraps a dimension table with supplied `τ`-actions (`actions[i][d - lo]`).
pub fn import_from_betti(
    b: &BettiTable,
    p: u32,
    tau_degrees: Vec<i64>,
    actions: Vec<Vec<FpMatrix>>,
    fg_bound: Option<i64>,
) -> Result<GradedModule, GradedError> {
    GradedModule::new(
        p,
        tau_degrees,
        b.window.lo,
        b.dims.clone(),
        actions,
        fg_bound,
    )
}

/// Standard test modules.
pub mod fixtures {
    use super::*;

    /// `k[τ]` with `|τ| = t`, known on `[0, hi]`.
    pub fn polynomial(p: u32, t: i64, hi: i64) -> GradedModule {
        let degrees: Vec<i64> = (0..=hi / t).map(|e| e * t).collect();
        let n = degrees.len();
        GradedModule::from_basis(
            p,
            vec![t],
            0,
            hi,
            &degrees,
            |_, b| (b + 1 < n).then_some(b + 1),
            Some(0),
        )
        .expect("polynomial fixture")
    }

    /// `k[τ]/τ^n`.
    pub fn truncated(p: u32, t: i64, n: usize, hi: i64) -> GradedModule {
        let degrees: Vec<i64> = (0..n as i64).map(|e| e * t).filter(|&d| d <= hi).collect();
        let len = degrees.len();
        GradedModule::from_basis(
            p,
            vec![t],
            0,
            hi,
            &degrees,
            |_, b| (b + 1 < len).then_some(b + 1),
            Some(0),
        )
        .expect("truncated fixture")
    }

    /// `Λ[ξ] ⊗ k[τ]` over `k[τ]`, with `|ξ| = x`, `|τ| = t`.
    pub fn exterior_polynomial(p: u32, x: i64, t: i64, hi: i64) -> GradedModule {
        // basis: τ^e at index 2e, ξτ^e at index 2e + 1
        let mut degrees = Vec::new();
        let mut e = 0;
        while e * t <= hi {
            degrees.push(e * t);
            degrees.push(if x + e * t <= hi { x + e * t } else { i64::MIN });
            e += 1;
        }
        let keep: Vec<usize> = (0..degrees.len())
            .filter(|&b| degrees[b] != i64::MIN)
            .collect();
        let index: HashMap<usize, usize> = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let kept: Vec<i64> = keep.iter().map(|&b| degrees[b]).collect();
        GradedModule::from_basis(
            p,
            vec![t],
            0,
            hi,
            &kept,
            |_, b| index.get(&(keep[b] + 2)).copied(),
            Some(x),
        )
        .expect("exterior fixture")
    }

    /// `k[τ_1, τ_2]` with the given degrees.
    pub fn polynomial2(p: u32, t1: i64, t2: i64, hi: i64) -> GradedModule {
        let mut monomials = Vec::new();
        for a in 0..=hi / t1 {
            for b in 0..=(hi - a * t1) / t2 {
                monomials.push((a, b));
            }
        }
        let index: HashMap<(i64, i64), usize> =
            monomials.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let degrees: Vec<i64> = monomials.iter().map(|&(a, b)| a * t1 + b * t2).collect();
        GradedModule::from_basis(
            p,
            vec![t1, t2],
            0,
            hi,
            &degrees,
            |i, b| {
                let (a, c) = monomials[b];
                let next = if i == 0 { (a + 1, c) } else { (a, c + 1) };
                index.get(&next).copied()
            },
            Some(0),
        )
        .expect("two-variable fixture")
    }

    /// The zero module on `[0, hi]`.
    pub fn zero(p: u32, t: i64, hi: i64) -> GradedModule {
        GradedModule::from_basis(p, vec![t], 0, hi, &[], |_, _| None, Some(0))
            .expect("zero fixture")
    }
}
