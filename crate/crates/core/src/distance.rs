//! Decision procedures for `d†_min ≤ δ` / `d†_var ≤ δ`, the coarse upper
//! bound, and the binary searches producing `(β_min, β_max)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freespace::{build_boundary_prepared, MaxStrategy, MinStrategy, PhiStrategy, PreparedPair, TIE_TOL};
use crate::geometry::{NormKind, Ppr};
use crate::reachability::decide_reachable;

/// Default per-edge sampling resolution for `Φ_max`.
pub const DEFAULT_K: usize = 64;
/// Default number of fractional bits searched.
pub const DEFAULT_BITS: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsOptions {
    pub k: usize,
    pub bits: u32,
    pub window: Option<usize>,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        Self { k: DEFAULT_K, bits: DEFAULT_BITS, window: None }
    }
}

/// `β_min ≤ d_var ≤ β_max`, plus the final search brackets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceBounds {
    pub beta_min: f64,
    pub beta_max: f64,
    /// Coarse upper bound that seeded both searches.
    pub upper_bound: f64,
    pub min_bracket: (f64, f64),
    pub max_bracket: (f64, f64),
    pub window: Option<usize>,
    pub k: usize,
    pub bits: u32,
    /// Set when doubling `K` certifies a δ the search rejected, i.e. the
    /// reported `β_max` is limited by the sampling resolution.
    pub k_sensitive: bool,
}

fn check_window(window: Option<usize>) -> Result<()> {
    if window == Some(0) {
        return Err(Error::InvalidArgument("window must be at least 1".into()));
    }
    Ok(())
}

/// Reachability of `(m₁, m₂)` in the δ-free space of a prepared pair.
pub fn decide_prepared(pair: &dyn PreparedPair, delta: f64, window: Option<usize>) -> Result<bool> {
    check_window(window)?;
    if delta < 0.0 {
        return Err(Error::InvalidArgument(format!("negative δ {delta}")));
    }
    let (m1, m2) = (pair.m1(), pair.m2());
    if !pair.corner_free(0, 0, delta)? || !pair.corner_free(m1, m2, delta)? {
        return Ok(false);
    }
    if let Some(w) = window {
        if m1 > 0 && m2 > 0 && m1.abs_diff(m2) > w {
            return Ok(false);
        }
    }
    let fsb = build_boundary_prepared(pair, delta, window)?;
    Ok(decide_reachable(&fsb).0)
}

/// Decides `d†_min(r1, r2) ≤ δ`.
pub fn decide_min(r1: &Ppr, r2: &Ppr, delta: f64, nk: NormKind, window: Option<usize>) -> Result<bool> {
    let pair = MinStrategy.prepare(r1, r2, nk)?;
    decide_prepared(pair.as_ref(), delta, window)
}

/// Conservative decision of `d†_var(r1, r2) ≤ δ`: `true` always certifies
/// the bound; `false` is exact only when free edge intervals are at least
/// `1/K` long.
pub fn decide_var(r1: &Ppr, r2: &Ppr, delta: f64, nk: NormKind, k: usize, window: Option<usize>) -> Result<bool> {
    let pair = MaxStrategy { k }.prepare(r1, r2, nk)?;
    decide_prepared(pair.as_ref(), delta, window)
}

/// `U = max(max_{i≤m₁} Φ_max(R₁(i), R₂(i)), max_{m₁≤j≤m₂} Φ_max(R₁(m₁), R₂(j)))`
/// with the shorter pipe in the first slot.
pub fn coarse_upper_bound(r1: &Ppr, r2: &Ppr, nk: NormKind) -> Result<f64> {
    let pair = MaxStrategy { k: 1 }.prepare(r1, r2, nk)?;
    coarse_upper_bound_prepared(pair.as_ref())
}

/// [`coarse_upper_bound`] from the corner values of a `Φ_max` pair.
pub fn coarse_upper_bound_prepared(pair: &dyn PreparedPair) -> Result<f64> {
    let (m1, m2) = (pair.m1(), pair.m2());
    let short = m1.min(m2);
    let mut u: f64 = 0.0;
    for i in 0..=short {
        u = u.max(pair.corner_phi(i, i)?);
    }
    for l in short..=m1.max(m2) {
        let v = if m1 <= m2 { pair.corner_phi(m1, l)? } else { pair.corner_phi(l, m2)? };
        u = u.max(v);
    }
    Ok(u)
}

/// Bisects `[0, upper]` for the smallest δ accepted by `decide`. Returns the
/// final `(largest rejected, smallest accepted)` bracket.
fn bracket<F>(upper: f64, iterations: u32, mut decide: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<bool>,
{
    if decide(0.0)? {
        return Ok((0.0, 0.0));
    }
    let (mut lo, mut hi) = (0.0, upper);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if decide(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// `(β_min, β_max)` by binary search over `[0, U]` on the `Φ_min` and
/// `Φ_max` decision procedures, `⌈lg max(U, 1)⌉ + B` steps each.
pub fn compute_bounds(r1: &Ppr, r2: &Ppr, nk: NormKind, opts: &BoundsOptions) -> Result<DistanceBounds> {
    check_window(opts.window)?;
    if opts.k == 0 || opts.bits == 0 {
        return Err(Error::InvalidArgument("k and bits must be positive".into()));
    }
    if r1.dim() != r2.dim() {
        return Err(Error::DimensionMismatch { expected: r1.dim(), actual: r2.dim() });
    }
    r1.validate().map_err(|e| Error::DegeneratePipes(format!("first pipe: {e}")))?;
    r2.validate().map_err(|e| Error::DegeneratePipes(format!("second pipe: {e}")))?;

    let max_pair = MaxStrategy { k: opts.k }.prepare(r1, r2, nk)?;
    let upper = coarse_upper_bound_prepared(max_pair.as_ref())?;
    let mut out = DistanceBounds {
        beta_min: 0.0,
        beta_max: 0.0,
        upper_bound: upper,
        min_bracket: (0.0, 0.0),
        max_bracket: (0.0, 0.0),
        window: opts.window,
        k: opts.k,
        bits: opts.bits,
        k_sensitive: false,
    };
    if upper <= TIE_TOL {
        return Ok(out);
    }
    let iterations = upper.max(1.0).log2().ceil() as u32 + opts.bits;

    let min_pair = MinStrategy.prepare(r1, r2, nk)?;
    out.min_bracket = bracket(upper, iterations, |d| decide_prepared(min_pair.as_ref(), d, opts.window))?;
    out.max_bracket = bracket(upper, iterations, |d| decide_prepared(max_pair.as_ref(), d, opts.window))?;
    out.beta_min = out.min_bracket.0;
    out.beta_max = out.max_bracket.1;

    let rejected = out.max_bracket.0;
    if rejected > 0.0 {
        let finer = MaxStrategy { k: opts.k.saturating_mul(2) }.prepare(r1, r2, nk)?;
        out.k_sensitive = decide_prepared(finer.as_ref(), rejected, opts.window)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{lift_time_explicit, Polytope, SampledPipe};

    fn pt(x: f64) -> Polytope {
        Polytope::point(&[x]).unwrap()
    }

    fn iv(lo: f64, hi: f64) -> Polytope {
        Polytope::from_box(&[lo], &[hi]).unwrap()
    }

    fn timed(values: &[Polytope], times: &[f64]) -> Ppr {
        let sp = SampledPipe::new(times.iter().copied().zip(values.iter().cloned()).collect()).unwrap();
        lift_time_explicit(&sp)
    }

    #[test]
    fn identical_points_decide_at_zero() {
        let r = Ppr::new(vec![pt(0.0), pt(1.0), pt(0.5)]).unwrap();
        assert!(decide_min(&r, &r, 0.0, NormKind::LInf, None).unwrap());
        assert!(decide_var(&r, &r, 0.0, NormKind::LInf, 16, None).unwrap());
    }

    #[test]
    fn constant_gap_thresholds() {
        let a = Ppr::new(vec![pt(0.0); 3]).unwrap();
        let b = Ppr::new(vec![pt(1.0); 4]).unwrap();
        assert!(!decide_min(&a, &b, 0.5, NormKind::LInf, None).unwrap());
        assert!(decide_min(&a, &b, 1.0, NormKind::LInf, None).unwrap());
    }

    #[test]
    fn unit_box_var_thresholds() {
        let a = Ppr::new(vec![iv(0.0, 1.0); 3]).unwrap();
        assert!(decide_var(&a, &a, 1.0, NormKind::LInf, 16, None).unwrap());
        assert!(!decide_var(&a, &a, 0.9, NormKind::LInf, 16, None).unwrap());
    }

    #[test]
    fn coarse_bound_examples() {
        let a = Ppr::new(vec![pt(0.0); 2]).unwrap();
        let b = Ppr::new(vec![pt(1.0); 2]).unwrap();
        assert!((coarse_upper_bound(&a, &b, NormKind::LInf).unwrap() - 1.0).abs() < 1e-12);
        let r = Ppr::new(vec![pt(0.0), pt(2.0), pt(1.0)]).unwrap();
        assert!(coarse_upper_bound(&r, &r, NormKind::LInf).unwrap().abs() < 1e-12);
        // longer first pipe is handled by symmetry
        let long = Ppr::new(vec![pt(0.0), pt(0.0), pt(3.0)]).unwrap();
        let short = Ppr::new(vec![pt(0.0), pt(0.0)]).unwrap();
        let u1 = coarse_upper_bound(&long, &short, NormKind::LInf).unwrap();
        let u2 = coarse_upper_bound(&short, &long, NormKind::LInf).unwrap();
        assert!((u1 - 3.0).abs() < 1e-12 && (u2 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn identical_constant_pipes_bound_zero() {
        let r = timed(&[pt(0.3), pt(0.3)], &[0.0, 1.0]);
        let b = compute_bounds(&r, &r, NormKind::LInf, &BoundsOptions::default()).unwrap();
        assert_eq!((b.beta_min, b.beta_max), (0.0, 0.0));
    }

    #[test]
    fn constant_value_gap() {
        let bits = 12;
        let opts = BoundsOptions { bits, ..Default::default() };
        let f = timed(&[pt(0.0), pt(0.0)], &[0.0, 1.0]);
        let g = timed(&[pt(1.0), pt(1.0)], &[0.0, 1.0]);
        let b = compute_bounds(&f, &g, NormKind::LInf, &opts).unwrap();
        let tol = 2f64.powi(-(bits as i32));
        assert!((b.beta_min - 1.0).abs() <= tol, "{b:?}");
        assert!((b.beta_max - 1.0).abs() <= tol, "{b:?}");
    }

    #[test]
    fn argument_checks() {
        let r = timed(&[pt(0.0), pt(1.0)], &[0.0, 1.0]);
        let bad = BoundsOptions { window: Some(0), ..Default::default() };
        assert!(compute_bounds(&r, &r, NormKind::LInf, &bad).is_err());
        let bad = BoundsOptions { k: 0, ..Default::default() };
        assert!(compute_bounds(&r, &r, NormKind::LInf, &bad).is_err());
        let unbounded = Ppr::new(vec![Polytope::new(vec![vec![1.0, 0.0]], vec![0.0]).unwrap()]).unwrap();
        assert!(matches!(
            compute_bounds(&unbounded, &r, NormKind::LInf, &BoundsOptions::default()),
            Err(Error::DegeneratePipes(_))
        ));
    }
}
