//! Shared instance generators and oracles for the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use pipedist::freespace::{EdgeInterval, FreeSpaceBoundary};
use pipedist::geometry::{lift_time_explicit, Polytope, Ppr, SampledPipe};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strictly increasing sample times starting at 0.
pub fn random_times<R: Rng>(rng: &mut R, n: usize, min_step: f64, max_step: f64) -> Vec<f64> {
    let mut t = 0.0;
    (0..n)
        .map(|k| {
            if k > 0 {
                t += rng.gen_range(min_step..=max_step);
            }
            t
        })
        .collect()
}

/// Axis-aligned boxes with centers on a random walk and widths in `[0, max_width]`.
pub fn random_boxes<R: Rng>(rng: &mut R, n: usize, dim: usize, max_width: f64, step: f64) -> Vec<Polytope> {
    let mut center: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (0..n)
        .map(|k| {
            if k > 0 {
                for c in center.iter_mut() {
                    *c += rng.gen_range(-step..=step);
                }
            }
            let half: Vec<f64> = (0..dim).map(|_| 0.5 * rng.gen_range(0.0..=max_width)).collect();
            let lo: Vec<f64> = center.iter().zip(&half).map(|(c, h)| c - h).collect();
            let hi: Vec<f64> = center.iter().zip(&half).map(|(c, h)| c + h).collect();
            Polytope::from_box(&lo, &hi).unwrap()
        })
        .collect()
}

pub fn sampled(times: &[f64], boxes: Vec<Polytope>) -> SampledPipe {
    SampledPipe::new(times.iter().copied().zip(boxes).collect()).unwrap()
}

/// A random box pipe with `m` segments, already lifted with time.
pub fn random_lifted_pipe<R: Rng>(rng: &mut R, m: usize, dim: usize, max_width: f64) -> (SampledPipe, Ppr) {
    let times = random_times(rng, m + 1, 0.5, 1.5);
    let boxes = random_boxes(rng, m + 1, dim, max_width, 0.8);
    let sp = sampled(&times, boxes);
    let r = lift_time_explicit(&sp);
    (sp, r)
}

/// A random timed polyline as `(times, values)` with `m` segments in 1D.
pub fn random_polyline<R: Rng>(rng: &mut R, m: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let times = random_times(rng, m + 1, 0.5, 1.5);
    let mut x: f64 = rng.gen_range(-1.0..1.0);
    let values = (0..=m)
        .map(|k| {
            if k > 0 {
                x += rng.gen_range(-1.0..=1.0);
            }
            vec![x]
        })
        .collect();
    (times, values)
}

pub fn singleton_pipe(times: &[f64], values: &[Vec<f64>]) -> Ppr {
    let boxes = values.iter().map(|v| Polytope::point(v).unwrap()).collect();
    lift_time_explicit(&sampled(times, boxes))
}

/// Edge intervals are drawn on a grid of `1/RES`.
pub const RES: usize = 100;

/// A random boundary on which edge intervals agree with corner flags, as
/// convex free space requires.
pub fn random_boundary<R: Rng>(rng: &mut R, m1: usize, m2: usize) -> FreeSpaceBoundary {
    let mut f = FreeSpaceBoundary::empty(m1, m2);
    for i in 0..=m1 {
        for j in 0..=m2 {
            f.corners.set(i, j, rng.gen_bool(0.7));
        }
    }
    let edge = |rng: &mut R, c0: bool, c1: bool| -> EdgeInterval {
        let r = RES as u32;
        let (lo, hi) = match (c0, c1) {
            (true, true) => (0, r),
            (true, false) => (0, rng.gen_range(0..r)),
            (false, true) => (rng.gen_range(1..=r), r),
            (false, false) => {
                if rng.gen_bool(0.5) {
                    return EdgeInterval::Empty;
                }
                let a = rng.gen_range(1..r);
                let b = rng.gen_range(1..r);
                (a.min(b), a.max(b))
            }
        };
        EdgeInterval::new(lo as f64 / RES as f64, hi as f64 / RES as f64).unwrap()
    };
    for i in 0..m1 {
        for j in 0..=m2 {
            let e = edge(rng, *f.corners.get(i, j), *f.corners.get(i + 1, j));
            f.bottom.set(i, j, e);
        }
    }
    for i in 0..=m1 {
        for j in 0..m2 {
            let e = edge(rng, *f.corners.get(i, j), *f.corners.get(i, j + 1));
            f.left.set(i, j, e);
        }
    }
    f
}

fn on_grid(e: &EdgeInterval, k: usize) -> bool {
    let x = k as f64 / RES as f64;
    e.bounds().is_some_and(|(lo, hi)| lo - 1e-12 <= x && x <= hi + 1e-12)
}

/// Whether the scaled grid point `(x, y)` on some cell boundary is free.
fn point_free(f: &FreeSpaceBoundary, x: usize, y: usize) -> bool {
    let (i, a) = (x / RES, x % RES);
    let (j, b) = (y / RES, y % RES);
    match (a, b) {
        (0, 0) => *f.corners.get(i, j),
        (_, 0) => on_grid(f.bottom.get(i, j), a),
        (0, _) => on_grid(f.left.get(i, j), b),
        _ => false,
    }
}

/// Exhaustive monotone path search over the grid points of every cell
/// boundary. Inside a cell any two free boundary points in monotone order
/// are joined by a segment, since the free space there is convex.
pub fn path_oracle(f: &FreeSpaceBoundary) -> bool {
    let (m1, m2) = (f.m1, f.m2);
    let (xmax, ymax) = (m1 * RES, m2 * RES);
    if !point_free(f, 0, 0) {
        return false;
    }
    let cell_points = |ci: usize, cj: usize| -> Vec<(usize, usize)> {
        let (x0, y0) = (ci * RES, cj * RES);
        let xs = if m1 == 0 { vec![0] } else { (x0..=x0 + RES).collect() };
        let ys = if m2 == 0 { vec![0] } else { (y0..=y0 + RES).collect() };
        let mut pts = Vec::new();
        for &x in &xs {
            for &y in &ys {
                let boundary = x == x0 || y == y0 || x == xs[xs.len() - 1] || y == ys[ys.len() - 1];
                if boundary && point_free(f, x, y) {
                    pts.push((x, y));
                }
            }
        }
        pts
    };
    let ci_max = m1.saturating_sub(1);
    let cj_max = m2.saturating_sub(1);
    let mut seen = HashSet::new();
    let mut stack = vec![(0usize, 0usize)];
    seen.insert((0, 0));
    while let Some((x, y)) = stack.pop() {
        if (x, y) == (xmax, ymax) {
            return true;
        }
        let cis: Vec<usize> = [x / RES, (x / RES).wrapping_sub(if x % RES == 0 { 1 } else { 0 })]
            .into_iter()
            .filter(|&c| c <= ci_max)
            .collect();
        let cjs: Vec<usize> = [y / RES, (y / RES).wrapping_sub(if y % RES == 0 { 1 } else { 0 })]
            .into_iter()
            .filter(|&c| c <= cj_max)
            .collect();
        for &ci in &cis {
            for &cj in &cjs {
                for q in cell_points(ci, cj) {
                    if q.0 >= x && q.1 >= y && seen.insert(q) {
                        stack.push(q);
                    }
                }
            }
        }
    }
    false
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}
