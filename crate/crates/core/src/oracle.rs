//! Brute-force reference computations: trace sampling from box pipes, the
//! discrete Fréchet distance and its time-explicit Skorokhod variant.
//!
//! These are slow and only meant for cross-checking the main pipeline on
//! small instances.

use crate::error::{Error, Result};
use crate::geometry::{NormKind, Ppr};

/// Upper limit on the number of traces enumerated per pipe.
pub const MAX_POLYLINES: u128 = 100_000;

/// Densely sampled trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    points: Vec<Vec<f64>>,
}

impl Polyline {
    /// A single point is repeated so every polyline has at least two points.
    pub fn new(mut points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidArgument("polyline needs at least one point".into()));
        };
        let d = first.len();
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::InvalidArgument("polyline points differ in dimension".into()));
        }
        if points.len() == 1 {
            points.push(points[0].clone());
        }
        Ok(Self { points })
    }

    /// Vertices joined by straight segments, each split into `refinement` steps.
    pub fn densified(vertices: &[Vec<f64>], refinement: usize) -> Result<Self> {
        let r = refinement.max(1);
        let mut points = Vec::with_capacity(vertices.len().saturating_sub(1) * r + 1);
        for w in vertices.windows(2) {
            for s in 0..r {
                let t = s as f64 / r as f64;
                points.push(w[0].iter().zip(&w[1]).map(|(a, b)| a + t * (b - a)).collect());
            }
        }
        if let Some(last) = vertices.last() {
            points.push(last.clone());
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
}

/// Trace given by values at timestamps.
#[derive(Clone, Debug, PartialEq)]
pub struct TimedPolyline {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl TimedPolyline {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::InvalidArgument("times and values must be nonempty and equally long".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("times must be strictly increasing".into()));
        }
        Ok(Self { times, values })
    }

    /// Vertices with time appended as the last coordinate.
    pub fn lifted(&self) -> Vec<Vec<f64>> {
        self.values
            .iter()
            .zip(&self.times)
            .map(|(v, &t)| {
                let mut p = v.clone();
                p.push(t);
                p
            })
            .collect()
    }
}

fn grid_values(lo: f64, hi: f64, grid: usize) -> Vec<f64> {
    if hi - lo <= 1e-12 || grid <= 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..grid).map(|k| lo + (hi - lo) * k as f64 / (grid - 1) as f64).collect()
}

fn box_grid_points(lo: &[f64], hi: &[f64], grid: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![Vec::with_capacity(lo.len())];
    for (&l, &h) in lo.iter().zip(hi) {
        let vals = grid_values(l, h, grid);
        pts = pts
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    pts
}

/// Every piecewise-linear trace through one grid point per sample box,
/// densified to `refinement` steps per segment. Degenerate coordinates
/// (e.g. a pinned time) contribute a single grid value.
pub fn sample_traces(r: &Ppr, grid: usize, refinement: usize) -> Result<Vec<Polyline>> {
    let mut choices = Vec::with_capacity(r.m() + 1);
    for (k, p) in r.samples().iter().enumerate() {
        let (lo, hi) = p.as_box().ok_or_else(|| Error::NotABox(format!("sample {k}")))?;
        choices.push(box_grid_points(&lo, &hi, grid));
    }
    let count = choices
        .iter()
        .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128))
        .unwrap_or(u128::MAX);
    if count > MAX_POLYLINES {
        return Err(Error::BudgetExceeded { count, limit: MAX_POLYLINES });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut idx = vec![0usize; choices.len()];
    loop {
        let vertices: Vec<Vec<f64>> = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
        out.push(Polyline::densified(&vertices, refinement)?);
        // odometer increment
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Classic `O(|c1|·|c2|)` discrete Fréchet coupling distance.
///
/// Panics if the polylines differ in dimension or the norm does not fit it.
pub fn discrete_frechet(c1: &Polyline, c2: &Polyline, nk: NormKind) -> f64 {
    assert_eq!(c1.dim(), c2.dim(), "polyline dimensions differ");
    nk.check_dim(c1.dim()).expect("norm incompatible with polyline dimension");
    let (a, b) = (c1.points(), c2.points());
    let mut diff = vec![0.0; c1.dim()];
    let mut dist = |p: &[f64], q: &[f64]| {
        for ((d, x), y) in diff.iter_mut().zip(p).zip(q) {
            *d = x - y;
        }
        nk.eval_unchecked(&diff)
    };
    let mut prev = vec![0.0; b.len()];
    let mut cur = vec![0.0; b.len()];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            let d = dist(p, q);
            cur[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => d.max(cur[j - 1]),
                (_, 0) => d.max(prev[0]),
                _ => d.max(prev[j].min(prev[j - 1]).min(cur[j - 1])),
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len() - 1]
}

/// Skorokhod distance approximated as the discrete Fréchet distance of the
/// time-explicit traces, each segment split `resolution` times. `nk` is the
/// norm on the lifted (value, time) space.
pub fn skorokhod_grid(f: &TimedPolyline, g: &TimedPolyline, nk: NormKind, resolution: usize) -> Result<f64> {
    let a = Polyline::densified(&f.lifted(), resolution)?;
    let b = Polyline::densified(&g.lifted(), resolution)?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), actual: b.dim() });
    }
    nk.check_dim(a.dim())?;
    Ok(discrete_frechet(&a, &b, nk))
}

/// `(min, max)` of the discrete Fréchet distance over all sampled trace pairs.
pub fn pipe_min_max(r1: &Ppr, r2: &Ppr, nk: NormKind, grid: usize, refinement: usize) -> Result<(f64, f64)> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimensionMismatch { expected: r1.dim(), actual: r2.dim() });
    }
    nk.check_dim(r1.dim())?;
    let t1 = sample_traces(r1, grid, refinement)?;
    let t2 = sample_traces(r2, grid, refinement)?;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for a in &t1 {
        for b in &t2 {
            let d = discrete_frechet(a, b, nk);
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    Ok((lo, hi))
}
