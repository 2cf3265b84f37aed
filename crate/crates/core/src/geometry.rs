//! Halfspace polytopes, point norms, interpolation between samples and the
//! time-explicit lifting of sampled pipes.

use crate::error::{Error, Result};
use crate::linprog::{solve, LinExpr, LpOutcome, LpProblem, Relation, Sense};

/// Norm on `ℝ^D` used for point distances.
///
/// `L1Max { split }` is `max(‖p‖₁, ‖t‖∞)` where `p` are the leading `split`
/// coordinates and `t` the remaining ones; with a single trailing time
/// coordinate this is `max(‖p‖₁, |t|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    LInf,
    L1Max { split: usize },
}

impl NormKind {
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match *self {
            NormKind::LInf if dim == 0 => Err(Error::InvalidNorm("zero-dimensional vectors".into())),
            NormKind::LInf => Ok(()),
            NormKind::L1Max { split } if split == 0 || split >= dim => Err(Error::InvalidNorm(format!(
                "L1Max split {split} must satisfy 0 < split < {dim}"
            ))),
            NormKind::L1Max { .. } => Ok(()),
        }
    }

    /// Vertices of the dual unit ball: `‖v‖ = max_w ⟨w, v⟩` over this set.
    pub fn dual_vertices(&self, dim: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        let unit = |i: usize, s: f64| {
            let mut w = vec![0.0; dim];
            w[i] = s;
            w
        };
        match *self {
            NormKind::LInf => {
                for i in 0..dim {
                    out.push(unit(i, 1.0));
                    out.push(unit(i, -1.0));
                }
            }
            NormKind::L1Max { split } => {
                for mask in 0u64..(1u64 << split) {
                    let mut w = vec![0.0; dim];
                    for (i, wi) in w.iter_mut().enumerate().take(split) {
                        *wi = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
                    }
                    out.push(w);
                }
                for i in split..dim {
                    out.push(unit(i, 1.0));
                    out.push(unit(i, -1.0));
                }
            }
        }
        out
    }

    /// Same norm after appending a time coordinate to `value_dim`-vectors.
    pub fn for_lifted(name: NormName, value_dim: usize) -> NormKind {
        match name {
            NormName::LInf => NormKind::LInf,
            NormName::L1Max => NormKind::L1Max { split: value_dim },
        }
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, v: &[f64]) -> f64 {
        match *self {
            NormKind::LInf => v.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            NormKind::L1Max { split } => {
                let p: f64 = v[..split].iter().map(|x| x.abs()).sum();
                v[split..].iter().fold(p, |m, x| m.max(x.abs()))
            }
        }
    }
}

/// User-facing norm selector; the concrete [`NormKind`] depends on where the
/// time coordinate sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormName {
    #[default]
    LInf,
    L1Max,
}

impl std::str::FromStr for NormName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linf" => Ok(NormName::LInf),
            "l1max" => Ok(NormName::L1Max),
            other => Err(Error::InvalidNorm(format!("unknown norm `{other}` (expected linf or l1max)"))),
        }
    }
}

impl std::fmt::Display for NormName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NormName::LInf => "linf",
            NormName::L1Max => "l1max",
        })
    }
}

pub fn norm_value(v: &[f64], nk: NormKind) -> Result<f64> {
    nk.check_dim(v.len()).map_err(|_| match nk {
        NormKind::L1Max { split } => Error::DimensionMismatch { expected: split + 1, actual: v.len() },
        NormKind::LInf => Error::DimensionMismatch { expected: 1, actual: 0 },
    })?;
    Ok(nk.eval_unchecked(v))
}

/// Convex polytope `{x : A·x ≤ b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    dim: usize,
}

impl Polytope {
    /// Checks the shape of `(a, b)` only; see [`validate_polytope`] for
    /// emptiness and boundedness.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        let dim = a.first().map(Vec::len).unwrap_or(0);
        if a.is_empty() || dim == 0 {
            return Err(Error::MalformedPolytope("no halfspaces".into()));
        }
        if a.len() != b.len() {
            return Err(Error::MalformedPolytope(format!("{} rows but {} offsets", a.len(), b.len())));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::MalformedPolytope(format!("row {i} has {} entries, expected {dim}", row.len())));
            }
            if row.iter().all(|&x| x == 0.0) {
                return Err(Error::MalformedPolytope(format!("row {i} is zero")));
            }
            if row.iter().chain(std::iter::once(&b[i])).any(|x| !x.is_finite()) {
                return Err(Error::MalformedPolytope(format!("row {i} has a non-finite entry")));
            }
        }
        Ok(Self { a, b, dim })
    }

    /// Shape check plus [`validate_polytope`].
    pub fn validated(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        validate_polytope(Self::new(a, b)?)
    }

    /// Axis-aligned box `lo ≤ x ≤ hi`.
    pub fn from_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), actual: hi.len() });
        }
        let d = lo.len();
        let mut a = Vec::with_capacity(2 * d);
        let mut b = Vec::with_capacity(2 * d);
        for i in 0..d {
            let mut up = vec![0.0; d];
            up[i] = 1.0;
            a.push(up);
            b.push(hi[i]);
            let mut down = vec![0.0; d];
            down[i] = -1.0;
            a.push(down);
            b.push(-lo[i]);
        }
        Self::new(a, b)
    }

    pub fn point(p: &[f64]) -> Result<Self> {
        Self::from_box(p, p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn num_halfspaces(&self) -> usize {
        self.b.len()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim
            && self
                .a
                .iter()
                .zip(&self.b)
                .all(|(row, &bi)| row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() <= bi + tol)
    }

    /// Adds `D` free variables constrained to this polytope; returns them.
    pub fn add_membership(&self, lp: &mut LpProblem) -> Vec<usize> {
        let vars = lp.add_free_vars(self.dim);
        self.add_scaled_membership(lp, &vars, &LinExpr::constant(1.0));
        vars
    }

    /// Adds `A·z ≤ scale·b` for existing variables `z`.
    pub fn add_scaled_membership(&self, lp: &mut LpProblem, z: &[usize], scale: &LinExpr) {
        for (row, &bi) in self.a.iter().zip(&self.b) {
            let mut e = scale.scaled(-bi);
            for (&zi, &aij) in z.iter().zip(row) {
                e.add_term(zi, aij);
            }
            lp.add_expr_constraint(&e, Relation::Le, 0.0);
        }
    }

    /// Support function `max ⟨w, x⟩` over the polytope.
    pub fn support(&self, w: &[f64]) -> Result<f64> {
        if w.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: w.len() });
        }
        let mut lp = LpProblem::new();
        let x = self.add_membership(&mut lp);
        let obj: Vec<(usize, f64)> = x.iter().copied().zip(w.iter().copied()).collect();
        lp.set_objective(Sense::Maximize, &obj);
        match solve(&lp)? {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible => Err(Error::EmptyPolytope),
            LpOutcome::Unbounded => Err(Error::UnboundedPolytope),
        }
    }

    /// Bounds per coordinate when every halfspace is axis-aligned.
    pub fn as_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut lo = vec![f64::NEG_INFINITY; self.dim];
        let mut hi = vec![f64::INFINITY; self.dim];
        for (row, &bi) in self.a.iter().zip(&self.b) {
            let mut nz = row.iter().enumerate().filter(|(_, &x)| x != 0.0);
            let (i, &c) = nz.next()?;
            if nz.next().is_some() {
                return None;
            }
            if c > 0.0 {
                hi[i] = hi[i].min(bi / c);
            } else {
                lo[i] = lo[i].max(bi / c);
            }
        }
        if lo.iter().chain(&hi).all(|x| x.is_finite()) {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// This polytope in `ℝ^{D+1}` with the new last coordinate pinned to `t`.
    pub fn with_pinned_coordinate(&self, t: f64) -> Polytope {
        let d = self.dim + 1;
        let mut a: Vec<Vec<f64>> = self
            .a
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.push(0.0);
                r
            })
            .collect();
        let mut b = self.b.clone();
        let mut up = vec![0.0; d];
        up[d - 1] = 1.0;
        a.push(up);
        b.push(t);
        let mut down = vec![0.0; d];
        down[d - 1] = -1.0;
        a.push(down);
        b.push(-t);
        Polytope { a, b, dim: d }
    }
}

/// Returns `p` iff it is nonempty and bounded.
pub fn validate_polytope(p: Polytope) -> Result<Polytope> {
    let mut lp = LpProblem::new();
    let x = p.add_membership(&mut lp);
    if solve(&lp)? == LpOutcome::Infeasible {
        return Err(Error::EmptyPolytope);
    }
    for &xi in &x {
        for s in [1.0, -1.0] {
            lp.set_objective(Sense::Maximize, &[(xi, s)]);
            match solve(&lp)? {
                LpOutcome::Optimal { .. } => {}
                LpOutcome::Unbounded => return Err(Error::UnboundedPolytope),
                LpOutcome::Infeasible => return Err(Error::EmptyPolytope),
            }
        }
    }
    Ok(p)
}

/// Adds auxiliary `u ∈ p0`, `v ∈ p1` and returns the point expressions
/// `(1−λ)·u + λ·v`, i.e. membership in `(1−λ)·p0 ⊕ λ·p1`.
pub fn interpolate_membership_constraints(
    lp: &mut LpProblem,
    p0: &Polytope,
    p1: &Polytope,
    lambda: f64,
) -> Result<Vec<LinExpr>> {
    if p0.dim() != p1.dim() {
        return Err(Error::DimensionMismatch { expected: p0.dim(), actual: p1.dim() });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    if lambda == 0.0 {
        return Ok(p0.add_membership(lp).into_iter().map(LinExpr::var).collect());
    }
    if lambda == 1.0 {
        return Ok(p1.add_membership(lp).into_iter().map(LinExpr::var).collect());
    }
    let u = p0.add_membership(lp);
    let v = p1.add_membership(lp);
    Ok(u.iter()
        .zip(&v)
        .map(|(&ui, &vi)| {
            let mut e = LinExpr::term(ui, 1.0 - lambda);
            e.add_term(vi, lambda);
            e
        })
        .collect())
}

/// Reach-set samples at strictly increasing times.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPipe {
    entries: Vec<(f64, Polytope)>,
}

impl SampledPipe {
    pub fn new(entries: Vec<(f64, Polytope)>) -> Result<Self> {
        let Some((_, first)) = entries.first() else {
            return Err(Error::InvalidPipe("no samples".into()));
        };
        let d = first.dim();
        for (k, (t, p)) in entries.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::InvalidPipe(format!("sample {k}: time is not finite")));
            }
            if p.dim() != d {
                return Err(Error::InvalidPipe(format!("sample {k}: dimension {} differs from {d}", p.dim())));
            }
            if k > 0 && *t <= entries[k - 1].0 {
                return Err(Error::InvalidPipe(format!("sample {k}: time {t} not after {}", entries[k - 1].0)));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(f64, Polytope)] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries[0].1.dim()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Polygonal polytope reachpipe: samples at parameters `0..=m`, linearly
/// interpolated in between (`R(k+λ) = (1−λ)·R(k) ⊕ λ·R(k+1)`).
#[derive(Clone, Debug, PartialEq)]
pub struct Ppr {
    samples: Vec<Polytope>,
}

impl Ppr {
    pub fn new(samples: Vec<Polytope>) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::InvalidPipe("no samples".into()));
        };
        let d = first.dim();
        if let Some(k) = samples.iter().position(|p| p.dim() != d) {
            return Err(Error::InvalidPipe(format!("sample {k}: dimension {} differs from {d}", samples[k].dim())));
        }
        Ok(Self { samples })
    }

    /// Number of segments.
    pub fn m(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    pub fn samples(&self) -> &[Polytope] {
        &self.samples
    }

    pub fn sample(&self, k: usize) -> &Polytope {
        &self.samples[k]
    }

    pub fn validate(&self) -> Result<()> {
        for (k, p) in self.samples.iter().enumerate() {
            validate_polytope(p.clone()).map_err(|e| Error::DegeneratePipes(format!("sample {k}: {e}")))?;
        }
        Ok(())
    }

    /// Splits parameter `rho ∈ [0, m]` into a segment index and local
    /// coefficient; the last segment owns `rho = m`.
    pub fn locate(&self, rho: f64) -> Result<(usize, f64)> {
        let m = self.m();
        if !(rho >= 0.0 && rho <= m as f64) {
            return Err(Error::ParameterOutOfRange { value: rho, max: m as f64 });
        }
        if m == 0 {
            return Ok((0, 0.0));
        }
        let k = (rho.floor() as usize).min(m - 1);
        Ok((k, (rho - k as f64).clamp(0.0, 1.0)))
    }

    /// `(p0, p1, λ)` describing `R(rho)`; for `m = 0` both ends are the single sample.
    pub fn at(&self, rho: f64) -> Result<(&Polytope, &Polytope, f64)> {
        let (k, lambda) = self.locate(rho)?;
        let next = (k + 1).min(self.m());
        Ok((&self.samples[k], &self.samples[next], lambda))
    }
}

/// Appends time as an extra coordinate; the `k`-th sample is pinned to `t_k`
/// and the pipe is re-indexed by integer parameters.
pub fn lift_time_explicit(sp: &SampledPipe) -> Ppr {
    Ppr { samples: sp.entries().iter().map(|(t, p)| p.with_pinned_coordinate(*t)).collect() }
}
