//! δ-free space of two reachpipes at cell boundaries.
//!
//! Cell `(i, j)` is `[i, i+1] × [j, j+1]` in `(ρ₁, ρ₂)` space. Within a cell
//! the free space is convex, so only the free intervals on cell edges (and the
//! corner flags) are computed. The minimum- and maximum-distance variants are
//! interchangeable [`PhiStrategy`] implementations looked up by name in a
//! [`StrategyRegistry`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{interpolate_membership_constraints, NormKind, Polytope, Ppr};
use crate::linprog::{maximize_norm, norm_leq_constraints, solve, LinExpr, LpOutcome, LpProblem, Sense};

/// Slack applied to every `Φ ≤ δ` test.
pub const TIE_TOL: f64 = 1e-9;

/// Bisection steps past this count cannot move an `f64` endpoint in `[0, 1]`.
const MAX_BISECTION_STEPS: usize = 52;

/// Free part of one cell edge, in edge-local coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeInterval {
    Empty,
    Interval { lo: f64, hi: f64 },
}

impl EdgeInterval {
    pub const FULL: EdgeInterval = EdgeInterval::Interval { lo: 0.0, hi: 1.0 };

    /// Clamps to `[0, 1]`; `None` if `lo > hi` after clamping.
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        let (lo, hi) = (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0));
        (lo <= hi).then_some(EdgeInterval::Interval { lo, hi })
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, EdgeInterval::Empty)
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            EdgeInterval::Empty => None,
            EdgeInterval::Interval { lo, hi } => Some((lo, hi)),
        }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.bounds().is_some_and(|(lo, hi)| x >= lo - tol && x <= hi + tol)
    }

    /// `self ⊆ other` up to `tol`.
    pub fn within(&self, other: &EdgeInterval, tol: f64) -> bool {
        match (self.bounds(), other.bounds()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((a, b)), Some((c, d))) => a >= c - tol && b <= d + tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiKind {
    Min,
    Max,
}

impl FromStr for PhiKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(PhiKind::Min),
            "max" => Ok(PhiKind::Max),
            other => Err(Error::UnknownStrategy(other.to_string())),
        }
    }
}

impl fmt::Display for PhiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PhiKind {
    pub fn name(&self) -> &'static str {
        match self {
            PhiKind::Min => "min",
            PhiKind::Max => "max",
        }
    }

    pub fn strategy(&self, opts: &StrategyOptions) -> Box<dyn PhiStrategy> {
        match self {
            PhiKind::Min => Box::new(MinStrategy),
            PhiKind::Max => Box::new(MaxStrategy { k: opts.k.max(1) }),
        }
    }
}

/// Dense row-major grid indexed by `(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        assert!(i < self.rows && j < self.cols, "({i}, {j}) outside {}x{}", self.rows, self.cols);
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.rows && j < self.cols, "({i}, {j}) outside {}x{}", self.rows, self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }
}

/// Free intervals on every cell edge plus corner flags.
///
/// * `bottom(i, j)`, `i < m₁`, `j ≤ m₂`: the edge `ρ₂ = j`, `ρ₁ ∈ [i, i+1]`,
///   local coordinate `ρ₁ − i`.
/// * `left(i, j)`, `i ≤ m₁`, `j < m₂`: the edge `ρ₁ = i`, `ρ₂ ∈ [j, j+1]`,
///   local coordinate `ρ₂ − j`.
/// * `corner(i, j)`: whether `(i, j)` is free.
///
/// When `window` is set, cells with `|i − j| > W` are excluded.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeSpaceBoundary {
    pub m1: usize,
    pub m2: usize,
    pub bottom: Grid<EdgeInterval>,
    pub left: Grid<EdgeInterval>,
    pub corners: Grid<bool>,
    pub window: Option<usize>,
}

impl FreeSpaceBoundary {
    pub fn empty(m1: usize, m2: usize) -> Self {
        Self {
            m1,
            m2,
            bottom: Grid::filled(m1, m2 + 1, EdgeInterval::Empty),
            left: Grid::filled(m1 + 1, m2, EdgeInterval::Empty),
            corners: Grid::filled(m1 + 1, m2 + 1, false),
            window: None,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.m1 * (self.m2 + 1) + (self.m1 + 1) * self.m2
    }

    pub fn cell_in_band(&self, i: usize, j: usize) -> bool {
        self.window.is_none_or(|w| i.abs_diff(j) <= w)
    }

    fn has_cells(&self) -> bool {
        self.m1 > 0 && self.m2 > 0
    }

    /// False only if every cell containing the edge is outside the window.
    pub fn bottom_in_band(&self, i: usize, j: usize) -> bool {
        if self.window.is_none() || !self.has_cells() {
            return true;
        }
        (j < self.m2 && self.cell_in_band(i, j)) || (j > 0 && self.cell_in_band(i, j - 1))
    }

    pub fn left_in_band(&self, i: usize, j: usize) -> bool {
        if self.window.is_none() || !self.has_cells() {
            return true;
        }
        (i < self.m1 && self.cell_in_band(i, j)) || (i > 0 && self.cell_in_band(i - 1, j))
    }

    pub fn corner_in_band(&self, i: usize, j: usize) -> bool {
        if self.window.is_none() || !self.has_cells() {
            return true;
        }
        let is = i.saturating_sub(1)..=i.min(self.m1 - 1);
        is.into_iter()
            .any(|ci| (j.saturating_sub(1)..=j.min(self.m2 - 1)).any(|cj| self.cell_in_band(ci, cj)))
    }
}

/// Interchangeable free-space predicate (`Φ_min` or `Φ_max`).
pub trait PhiStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn kind(&self) -> PhiKind;

    /// `Φ` between two single polytopes.
    fn phi(&self, p: &Polytope, q: &Polytope, nk: NormKind) -> Result<f64>;

    /// Precomputes everything about `(r1, r2)` that does not depend on δ.
    fn prepare<'a>(&self, r1: &'a Ppr, r2: &'a Ppr, nk: NormKind) -> Result<Box<dyn PreparedPair + 'a>>;
}

/// A strategy bound to a pair of pipes, answering boundary queries at any δ.
pub trait PreparedPair {
    fn m1(&self) -> usize;

    fn m2(&self) -> usize;

    fn corner_free(&self, i: usize, j: usize, delta: f64) -> Result<bool>;

    /// Free interval of `bottom(i, j)`: `R₁` moves along segment `i` against `R₂(j)`.
    fn bottom_edge(&self, i: usize, j: usize, delta: f64) -> Result<EdgeInterval>;

    /// Free interval of `left(i, j)`: `R₂` moves along segment `j` against `R₁(i)`.
    fn left_edge(&self, i: usize, j: usize, delta: f64) -> Result<EdgeInterval>;

    /// Largest corner `Φ` along the diagonal-then-last-row path (coarse bound).
    fn corner_phi(&self, i: usize, j: usize) -> Result<f64>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrategyOptions {
    /// Per-edge sampling resolution for sampled strategies.
    pub k: usize,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        Self { k: 64 }
    }
}

type Factory = Box<dyn Fn(&StrategyOptions) -> Box<dyn PhiStrategy> + Send + Sync>;

/// Name → strategy constructor.
pub struct StrategyRegistry {
    entries: BTreeMap<String, Factory>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

impl StrategyRegistry {
    pub fn new() -> Self {
        Self { entries: BTreeMap::new() }
    }

    /// Registry with `min` and `max`.
    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        r.register("min", |_| Box::new(MinStrategy));
        r.register("max", |o| Box::new(MaxStrategy { k: o.k.max(1) }));
        r
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&StrategyOptions) -> Box<dyn PhiStrategy> + Send + Sync + 'static,
    {
        self.entries.insert(name.to_string(), Box::new(factory));
    }

    pub fn create(&self, name: &str, opts: &StrategyOptions) -> Result<Box<dyn PhiStrategy>> {
        self.entries
            .get(name)
            .map(|f| f(opts))
            .ok_or_else(|| Error::UnknownStrategy(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

fn check_dims(p: &Polytope, q: &Polytope) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), actual: q.dim() });
    }
    Ok(())
}

fn difference(x: &[LinExpr], y: &[LinExpr]) -> Vec<LinExpr> {
    x.iter().zip(y).map(|(a, b)| a.minus(b)).collect()
}

fn vars(v: &[usize]) -> Vec<LinExpr> {
    v.iter().copied().map(LinExpr::var).collect()
}

fn minimize_norm(lp: &mut LpProblem, expr: &[LinExpr], nk: NormKind) -> Result<Option<f64>> {
    let d = lp.add_var(Some(0.0), None);
    norm_leq_constraints(lp, expr, &LinExpr::var(d), nk)?;
    lp.set_objective(Sense::Minimize, &[(d, 1.0)]);
    Ok(match solve(lp)? {
        LpOutcome::Optimal { value, .. } => Some(value.max(0.0)),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => return Err(Error::NumericalFailure("norm minimization unbounded".into())),
    })
}

/// `Φ_min(p1, p2) = min ‖x − y‖` over `x ∈ p1`, `y ∈ p2` (one LP).
pub fn phi_min(p1: &Polytope, p2: &Polytope, nk: NormKind) -> Result<f64> {
    check_dims(p1, p2)?;
    let mut lp = LpProblem::new();
    let x = p1.add_membership(&mut lp);
    let y = p2.add_membership(&mut lp);
    minimize_norm(&mut lp, &difference(&vars(&x), &vars(&y)), nk)?.ok_or(Error::EmptyPolytope)
}

/// `Φ_max(p1, p2) = max ‖x − y‖` over `x ∈ p1`, `y ∈ p2`.
pub fn phi_max(p1: &Polytope, p2: &Polytope, nk: NormKind) -> Result<f64> {
    check_dims(p1, p2)?;
    let mut lp = LpProblem::new();
    let x = p1.add_membership(&mut lp);
    let y = p2.add_membership(&mut lp);
    maximize_norm(&difference(&vars(&x), &vars(&y)), &lp, nk)
}

/// Whether `Φ(R₁(ρ₁), R₂(ρ₂)) ≤ δ`.
pub fn free_at(r1: &Ppr, r2: &Ppr, rho1: f64, rho2: f64, delta: f64, phi: PhiKind, nk: NormKind) -> Result<bool> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimensionMismatch { expected: r1.dim(), actual: r2.dim() });
    }
    let (a0, a1, l1) = r1.at(rho1)?;
    let (b0, b1, l2) = r2.at(rho2)?;
    let mut lp = LpProblem::new();
    let x = interpolate_membership_constraints(&mut lp, a0, a1, l1)?;
    let y = interpolate_membership_constraints(&mut lp, b0, b1, l2)?;
    let expr = difference(&x, &y);
    let value = match phi {
        PhiKind::Min => minimize_norm(&mut lp, &expr, nk)?.ok_or(Error::EmptyPolytope)?,
        PhiKind::Max => maximize_norm(&expr, &lp, nk)?,
    };
    Ok(value <= delta + TIE_TOL)
}

/// `‖(z⁰ + z¹) − y‖ ≤ bound` with `A⁰z⁰ ≤ (1−λ)b⁰`, `A¹z¹ ≤ λb¹`, `y ∈ q`,
/// `0 ≤ λ ≤ 1`; the substitution `z⁰ = (1−λ)u`, `z¹ = λv` keeps it linear.
fn edge_lp(p0: &Polytope, p1: &Polytope, q: &Polytope, nk: NormKind) -> Result<(LpProblem, usize, Vec<LinExpr>)> {
    check_dims(p0, p1)?;
    check_dims(p0, q)?;
    let mut lp = LpProblem::new();
    let lambda = lp.add_var(Some(0.0), Some(1.0));
    let z0 = lp.add_free_vars(p0.dim());
    let z1 = lp.add_free_vars(p1.dim());
    let mut one_minus = LinExpr::constant(1.0);
    one_minus.add_term(lambda, -1.0);
    p0.add_scaled_membership(&mut lp, &z0, &one_minus);
    p1.add_scaled_membership(&mut lp, &z1, &LinExpr::var(lambda));
    let y = q.add_membership(&mut lp);
    let expr: Vec<LinExpr> = (0..p0.dim())
        .map(|i| {
            let mut e = LinExpr::var(z0[i]);
            e.add_term(z1[i], 1.0).add_term(y[i], -1.0);
            e
        })
        .collect();
    nk.check_dim(expr.len())?;
    Ok((lp, lambda, expr))
}

fn optimize_lambda(lp: &mut LpProblem, lambda: usize, sense: Sense) -> Result<Option<f64>> {
    lp.set_objective(sense, &[(lambda, 1.0)]);
    match solve(lp)? {
        LpOutcome::Optimal { point, .. } => Ok(Some(point[lambda].clamp(0.0, 1.0))),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::NumericalFailure("λ is bounded but LP reported unbounded".into())),
    }
}

/// Exact `Φ_min` free interval of an edge where the moving pipe runs from
/// `p0` to `p1` against the fixed polytope `q`: two LPs (min λ, max λ).
pub fn edge_interval_min(p0: &Polytope, p1: &Polytope, q: &Polytope, delta: f64, nk: NormKind) -> Result<EdgeInterval> {
    let (mut lp, lambda, expr) = edge_lp(p0, p1, q, nk)?;
    norm_leq_constraints(&mut lp, &expr, &LinExpr::constant(delta + TIE_TOL), nk)?;
    let Some(lo) = optimize_lambda(&mut lp, lambda, Sense::Minimize)? else {
        return Ok(EdgeInterval::Empty);
    };
    let hi = optimize_lambda(&mut lp, lambda, Sense::Maximize)?.unwrap_or(lo);
    Ok(EdgeInterval::new(lo, hi.max(lo)).unwrap_or(EdgeInterval::Empty))
}

/// `min_λ Φ_min((1−λ)p0 ⊕ λp1, q)`: below this δ the edge has no free point.
fn edge_min_phi(p0: &Polytope, p1: &Polytope, q: &Polytope, nk: NormKind) -> Result<f64> {
    let (mut lp, _, expr) = edge_lp(p0, p1, q, nk)?;
    minimize_norm(&mut lp, &expr, nk)?.ok_or(Error::EmptyPolytope)
}

/// Sampled free-interval search on `[0, 1]`: tests `λ = 0, 1/K, …, 1`, then
/// bisects `min(K, 52)` steps below the first free sample and above the last
/// one. Free runs shorter than `1/K` may be missed.
pub fn scan_edge<F>(k: usize, mut free: F) -> Result<EdgeInterval>
where
    F: FnMut(f64) -> Result<bool>,
{
    let k = k.max(1);
    let step = 1.0 / k as f64;
    let mut first = None;
    let mut last = None;
    for i in 0..=k {
        if free(i as f64 * step)? {
            first.get_or_insert(i);
            last = Some(i);
        }
    }
    let (Some(first), Some(last)) = (first, last) else {
        return Ok(EdgeInterval::Empty);
    };
    let steps = k.min(MAX_BISECTION_STEPS);
    let lo = if first == 0 {
        0.0
    } else {
        let (mut out, mut inn) = ((first - 1) as f64 * step, first as f64 * step);
        for _ in 0..steps {
            let mid = 0.5 * (out + inn);
            if free(mid)? {
                inn = mid;
            } else {
                out = mid;
            }
        }
        inn
    };
    let hi = if last == k {
        1.0
    } else {
        let (mut inn, mut out) = (last as f64 * step, (last + 1) as f64 * step);
        for _ in 0..steps {
            let mid = 0.5 * (out + inn);
            if free(mid)? {
                inn = mid;
            } else {
                out = mid;
            }
        }
        inn
    };
    Ok(EdgeInterval::new(lo, hi).unwrap_or(EdgeInterval::Empty))
}

/// Conservative `Φ_max` free interval via [`scan_edge`], each sample solved
/// as a fixed-λ norm maximization.
pub fn edge_interval_max(
    p0: &Polytope,
    p1: &Polytope,
    q: &Polytope,
    delta: f64,
    nk: NormKind,
    k: usize,
) -> Result<EdgeInterval> {
    check_dims(p0, p1)?;
    check_dims(p0, q)?;
    scan_edge(k, |lambda| {
        let mut lp = LpProblem::new();
        let x = interpolate_membership_constraints(&mut lp, p0, p1, lambda)?;
        let y = q.add_membership(&mut lp);
        Ok(maximize_norm(&difference(&x, &vars(&y)), &lp, nk)? <= delta + TIE_TOL)
    })
}

/// Fills every edge interval and corner flag of the δ-free space.
pub fn build_boundary(
    r1: &Ppr,
    r2: &Ppr,
    delta: f64,
    phi: PhiKind,
    nk: NormKind,
    k: usize,
    window: Option<usize>,
) -> Result<FreeSpaceBoundary> {
    let strategy = phi.strategy(&StrategyOptions { k });
    let pair = strategy.prepare(r1, r2, nk)?;
    build_boundary_prepared(pair.as_ref(), delta, window)
}

/// [`build_boundary`] against an already prepared pair; edges outside the
/// window are left empty without being computed.
pub fn build_boundary_prepared(pair: &dyn PreparedPair, delta: f64, window: Option<usize>) -> Result<FreeSpaceBoundary> {
    if window == Some(0) {
        return Err(Error::InvalidArgument("window must be at least 1".into()));
    }
    let (m1, m2) = (pair.m1(), pair.m2());
    let mut fsb = FreeSpaceBoundary::empty(m1, m2);
    fsb.window = window;
    for i in 0..=m1 {
        for j in 0..=m2 {
            if fsb.corner_in_band(i, j) {
                fsb.corners.set(i, j, pair.corner_free(i, j, delta)?);
            }
            if i < m1 && fsb.bottom_in_band(i, j) {
                fsb.bottom.set(i, j, pair.bottom_edge(i, j, delta)?);
            }
            if j < m2 && fsb.left_in_band(i, j) {
                fsb.left.set(i, j, pair.left_edge(i, j, delta)?);
            }
        }
    }
    Ok(fsb)
}

fn check_pair(r1: &Ppr, r2: &Ppr, nk: NormKind) -> Result<()> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimensionMismatch { expected: r1.dim(), actual: r2.dim() });
    }
    nk.check_dim(r1.dim())
}

/// `Φ_min`: exact edge intervals by linear programming.
#[derive(Clone, Copy, Debug, Default)]
pub struct MinStrategy;

struct MinPair<'a> {
    r1: &'a Ppr,
    r2: &'a Ppr,
    nk: NormKind,
    corners: Grid<f64>,
    bottom_min: Grid<f64>,
    left_min: Grid<f64>,
}

impl PhiStrategy for MinStrategy {
    fn name(&self) -> &'static str {
        "min"
    }

    fn kind(&self) -> PhiKind {
        PhiKind::Min
    }

    fn phi(&self, p: &Polytope, q: &Polytope, nk: NormKind) -> Result<f64> {
        phi_min(p, q, nk)
    }

    fn prepare<'a>(&self, r1: &'a Ppr, r2: &'a Ppr, nk: NormKind) -> Result<Box<dyn PreparedPair + 'a>> {
        check_pair(r1, r2, nk)?;
        let (m1, m2) = (r1.m(), r2.m());
        let mut corners = Grid::filled(m1 + 1, m2 + 1, 0.0);
        let mut bottom_min = Grid::filled(m1, m2 + 1, 0.0);
        let mut left_min = Grid::filled(m1 + 1, m2, 0.0);
        for i in 0..=m1 {
            for j in 0..=m2 {
                corners.set(i, j, phi_min(r1.sample(i), r2.sample(j), nk)?);
                if i < m1 {
                    bottom_min.set(i, j, edge_min_phi(r1.sample(i), r1.sample(i + 1), r2.sample(j), nk)?);
                }
                if j < m2 {
                    left_min.set(i, j, edge_min_phi(r2.sample(j), r2.sample(j + 1), r1.sample(i), nk)?);
                }
            }
        }
        Ok(Box::new(MinPair { r1, r2, nk, corners, bottom_min, left_min }))
    }
}

impl MinPair<'_> {
    // Φ_min along an edge is convex in λ, so the corner values settle most
    // edges without an LP.
    fn edge(
        &self,
        seg: (&Polytope, &Polytope),
        fixed: &Polytope,
        ends: (f64, f64),
        edge_min: f64,
        delta: f64,
    ) -> Result<EdgeInterval> {
        let bound = delta + TIE_TOL;
        if edge_min > bound {
            return Ok(EdgeInterval::Empty);
        }
        match (ends.0 <= bound, ends.1 <= bound) {
            (true, true) => Ok(EdgeInterval::FULL),
            (true, false) | (false, true) => {
                let (mut lp, lambda, expr) = edge_lp(seg.0, seg.1, fixed, self.nk)?;
                norm_leq_constraints(&mut lp, &expr, &LinExpr::constant(bound), self.nk)?;
                if ends.0 <= bound {
                    let hi = optimize_lambda(&mut lp, lambda, Sense::Maximize)?.unwrap_or(0.0);
                    Ok(EdgeInterval::new(0.0, hi).unwrap_or(EdgeInterval::Empty))
                } else {
                    let lo = optimize_lambda(&mut lp, lambda, Sense::Minimize)?.unwrap_or(1.0);
                    Ok(EdgeInterval::new(lo, 1.0).unwrap_or(EdgeInterval::Empty))
                }
            }
            (false, false) => edge_interval_min(seg.0, seg.1, fixed, delta, self.nk),
        }
    }
}

impl PreparedPair for MinPair<'_> {
    fn m1(&self) -> usize {
        self.r1.m()
    }

    fn m2(&self) -> usize {
        self.r2.m()
    }

    fn corner_free(&self, i: usize, j: usize, delta: f64) -> Result<bool> {
        Ok(*self.corners.get(i, j) <= delta + TIE_TOL)
    }

    fn bottom_edge(&self, i: usize, j: usize, delta: f64) -> Result<EdgeInterval> {
        let ends = (*self.corners.get(i, j), *self.corners.get(i + 1, j));
        let seg = (self.r1.sample(i), self.r1.sample(i + 1));
        self.edge(seg, self.r2.sample(j), ends, *self.bottom_min.get(i, j), delta)
    }

    fn left_edge(&self, i: usize, j: usize, delta: f64) -> Result<EdgeInterval> {
        let ends = (*self.corners.get(i, j), *self.corners.get(i, j + 1));
        let seg = (self.r2.sample(j), self.r2.sample(j + 1));
        self.edge(seg, self.r1.sample(i), ends, *self.left_min.get(i, j), delta)
    }

    fn corner_phi(&self, i: usize, j: usize) -> Result<f64> {
        Ok(*self.corners.get(i, j))
    }
}

/// `Φ_max`: conservative edge intervals from `K` samples per edge.
#[derive(Clone, Copy, Debug)]
pub struct MaxStrategy {
    pub k: usize,
}

/// Support values of every sample along the dual-ball vertices of the norm.
/// `Φ_max(X, Y) = max_w h_X(w) + h_Y(−w)` and support functions are linear
/// under Minkowski interpolation, so each fixed-λ maximization reduces to
/// arithmetic on these tables.
struct MaxPair {
    m1: usize,
    m2: usize,
    k: usize,
    negated: Vec<usize>,
    h1: Vec<Vec<f64>>,
    h2: Vec<Vec<f64>>,
    corners: Grid<f64>,
}

impl PhiStrategy for MaxStrategy {
    fn name(&self) -> &'static str {
        "max"
    }

    fn kind(&self) -> PhiKind {
        PhiKind::Max
    }

    fn phi(&self, p: &Polytope, q: &Polytope, nk: NormKind) -> Result<f64> {
        phi_max(p, q, nk)
    }

    fn prepare<'a>(&self, r1: &'a Ppr, r2: &'a Ppr, nk: NormKind) -> Result<Box<dyn PreparedPair + 'a>> {
        check_pair(r1, r2, nk)?;
        let dirs = nk.dual_vertices(r1.dim());
        let negated = dirs
            .iter()
            .map(|w| {
                let neg: Vec<f64> = w.iter().map(|x| -x).collect();
                dirs.iter().position(|v| *v == neg).expect("dual ball is symmetric")
            })
            .collect();
        let table = |r: &Ppr| -> Result<Vec<Vec<f64>>> {
            r.samples().iter().map(|p| dirs.iter().map(|w| p.support(w)).collect()).collect()
        };
        let mut pair = MaxPair {
            m1: r1.m(),
            m2: r2.m(),
            k: self.k,
            negated,
            h1: table(r1)?,
            h2: table(r2)?,
            corners: Grid::filled(r1.m() + 1, r2.m() + 1, 0.0),
        };
        for i in 0..=pair.m1 {
            for j in 0..=pair.m2 {
                let v = pair.phi_interp(i, i, 0.0, j, j, 0.0);
                pair.corners.set(i, j, v);
            }
        }
        Ok(Box::new(pair))
    }
}

impl MaxPair {
    /// `Φ_max((1−λ₁)R₁(a0) ⊕ λ₁R₁(a1), (1−λ₂)R₂(b0) ⊕ λ₂R₂(b1))`.
    fn phi_interp(&self, a0: usize, a1: usize, l1: f64, b0: usize, b1: usize, l2: f64) -> f64 {
        let (ha0, ha1, hb0, hb1) = (&self.h1[a0], &self.h1[a1], &self.h2[b0], &self.h2[b1]);
        self.negated
            .iter()
            .enumerate()
            .map(|(w, &nw)| {
                (1.0 - l1) * ha0[w] + l1 * ha1[w] + (1.0 - l2) * hb0[nw] + l2 * hb1[nw]
            })
            .fold(0.0, f64::max)
    }
}

impl PreparedPair for MaxPair {
    fn m1(&self) -> usize {
        self.m1
    }

    fn m2(&self) -> usize {
        self.m2
    }

    fn corner_free(&self, i: usize, j: usize, delta: f64) -> Result<bool> {
        Ok(*self.corners.get(i, j) <= delta + TIE_TOL)
    }

    fn bottom_edge(&self, i: usize, j: usize, delta: f64) -> Result<EdgeInterval> {
        scan_edge(self.k, |l| Ok(self.phi_interp(i, i + 1, l, j, j, 0.0) <= delta + TIE_TOL))
    }

    fn left_edge(&self, i: usize, j: usize, delta: f64) -> Result<EdgeInterval> {
        scan_edge(self.k, |l| Ok(self.phi_interp(i, i, 0.0, j, j + 1, l) <= delta + TIE_TOL))
    }

    fn corner_phi(&self, i: usize, j: usize) -> Result<f64> {
        Ok(*self.corners.get(i, j))
    }
}
