//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use common::*;
use pipedist::distance::{compute_bounds, decide_min, decide_var, BoundsOptions, DistanceBounds};
use pipedist::freespace::{edge_interval_min, free_at, phi_min, MaxStrategy, MinStrategy, PhiKind, PhiStrategy};
use pipedist::geometry::{NormKind, Ppr};
use pipedist::oracle::{pipe_min_max, skorokhod_grid, TimedPolyline};
use pipedist::pipeline::{run_pipeline, PipelineOptions};
use pipedist::reachability::decide_reachable;
use rand::Rng;

const LIFTED_1D: NormKind = NormKind::LInf;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

/// Random 1D box instances (`m = 3`, widths at most 0.5) with their bounds
/// and oracle values, shared by the first two criteria and the bound check.
struct BoxCase {
    r1: Ppr,
    r2: Ppr,
    bounds: DistanceBounds,
    oracle_min: f64,
    oracle_max: f64,
}

fn box_cases() -> Vec<BoxCase> {
    let mut rng = rng(11);
    (0..25)
        .map(|_| {
            let (_, r1) = random_lifted_pipe(&mut rng, 3, 1, 0.5);
            let (_, r2) = random_lifted_pipe(&mut rng, 3, 1, 0.5);
            let bounds = compute_bounds(&r1, &r2, LIFTED_1D, &BoundsOptions::default()).unwrap();
            let (oracle_min, oracle_max) = pipe_min_max(&r1, &r2, LIFTED_1D, 3, 50).unwrap();
            BoxCase { r1, r2, bounds, oracle_min, oracle_max }
        })
        .collect()
}

struct SingletonCase {
    bounds: DistanceBounds,
    skorokhod: f64,
    r1: Ppr,
    r2: Ppr,
}

fn singleton_cases() -> Vec<SingletonCase> {
    let mut rng = rng(23);
    (0..25)
        .map(|_| {
            let m1 = rng.gen_range(1..=5);
            let m2 = rng.gen_range(1..=5);
            let (t1, v1) = random_polyline(&mut rng, m1);
            let (t2, v2) = random_polyline(&mut rng, m2);
            let r1 = singleton_pipe(&t1, &v1);
            let r2 = singleton_pipe(&t2, &v2);
            let bounds = compute_bounds(&r1, &r2, LIFTED_1D, &BoundsOptions::default()).unwrap();
            let f = TimedPolyline::new(t1, v1).unwrap();
            let g = TimedPolyline::new(t2, v2).unwrap();
            let skorokhod = skorokhod_grid(&f, &g, LIFTED_1D, 200).unwrap();
            SingletonCase { bounds, skorokhod, r1, r2 }
        })
        .collect()
}

fn oracle_min_agreement(cases: &[BoxCase]) -> Outcome {
    let worst = cases.iter().map(|c| (c.bounds.beta_min - c.oracle_min).abs()).fold(0.0, f64::max);
    outcome(worst <= 0.05, format!("max |beta_min - oracle min| = {worst:.4} over {} instances", cases.len()))
}

fn sandwich(cases: &[BoxCase]) -> Outcome {
    let upper = cases.iter().map(|c| c.oracle_max - c.bounds.beta_max).fold(f64::MIN, f64::max);
    let lower = cases.iter().map(|c| c.bounds.beta_min - c.oracle_min).fold(f64::MIN, f64::max);
    outcome(
        upper <= 0.05 && lower <= 0.05,
        format!("max(oracle max - beta_max) = {upper:.4}, max(beta_min - oracle min) = {lower:.4}"),
    )
}

fn singleton_reduction(cases: &[SingletonCase]) -> Outcome {
    let to_sk = cases.iter().map(|c| (c.bounds.beta_min - c.skorokhod).abs()).fold(0.0, f64::max);
    let gap = cases.iter().map(|c| (c.bounds.beta_max - c.bounds.beta_min).abs()).fold(0.0, f64::max);
    outcome(
        to_sk <= 0.05 && gap <= 0.05,
        format!("max |beta_min - skorokhod| = {to_sk:.4}, max |beta_max - beta_min| = {gap:.4}"),
    )
}

fn convexity() -> Outcome {
    let mut rng = rng(37);
    let mut violations = 0;
    let mut checks = 0;
    for inst in 0..10 {
        let (_, r1) = random_lifted_pipe(&mut rng, 3, 2, 0.5);
        let (_, r2) = random_lifted_pipe(&mut rng, 3, 2, 0.5);
        let nk = if inst % 2 == 0 { NormKind::LInf } else { NormKind::L1Max { split: 2 } };
        for kind in [PhiKind::Min, PhiKind::Max] {
            let strategy: Box<dyn PhiStrategy> = match kind {
                PhiKind::Min => Box::new(MinStrategy),
                PhiKind::Max => Box::new(MaxStrategy { k: 64 }),
            };
            let pair = strategy.prepare(&r1, &r2, nk).unwrap();
            let mut corner: Vec<f64> = (0..=3).flat_map(|i| (0..=3).map(move |j| (i, j))).map(|(i, j)| pair.corner_phi(i, j).unwrap()).collect();
            corner.sort_by(f64::total_cmp);
            let delta = corner[corner.len() / 2];
            let free = |a: f64, b: f64| free_at(&r1, &r2, a, b, delta, kind, nk).unwrap();
            let mut found = 0;
            let mut attempts = 0;
            while found < 200 && attempts < 20_000 {
                attempts += 1;
                let (ci, cj) = (rng.gen_range(0..3) as f64, rng.gen_range(0..3) as f64);
                let p = (ci + rng.gen::<f64>(), cj + rng.gen::<f64>());
                let q = (ci + rng.gen::<f64>(), cj + rng.gen::<f64>());
                if !free(p.0, p.1) || !free(q.0, q.1) {
                    continue;
                }
                found += 1;
                if !free(0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1)) {
                    violations += 1;
                }
            }
            checks += found;
        }
    }
    outcome(violations == 0 && checks == 10 * 2 * 200, format!("{violations} violations in {checks} midpoint checks"))
}

fn decision_monotonicity() -> Outcome {
    let mut rng = rng(41);
    let mut flips = 0;
    for _ in 0..10 {
        let (_, r1) = random_lifted_pipe(&mut rng, 3, 1, 0.5);
        let (_, r2) = random_lifted_pipe(&mut rng, 3, 1, 0.5);
        let u = pipedist::distance::coarse_upper_bound(&r1, &r2, LIFTED_1D).unwrap();
        let (mut prev_min, mut prev_var) = (false, false);
        for s in 0..20 {
            let delta = 1.2 * u * s as f64 / 19.0;
            let dm = decide_min(&r1, &r2, delta, LIFTED_1D, None).unwrap();
            let dv = decide_var(&r1, &r2, delta, LIFTED_1D, 64, None).unwrap();
            flips += usize::from(prev_min && !dm) + usize::from(prev_var && !dv);
            prev_min = dm;
            prev_var = dv;
        }
    }
    outcome(flips == 0, format!("{flips} true-to-false flips over 10 instances x 20 deltas"))
}

fn upper_bound_dominates(boxes: &[BoxCase], singles: &[SingletonCase]) -> Outcome {
    let pairs = boxes.iter().map(|c| (&c.r1, &c.r2, &c.bounds)).chain(singles.iter().map(|c| (&c.r1, &c.r2, &c.bounds)));
    let mut bad = 0;
    let mut total = 0;
    for (r1, r2, b) in pairs {
        total += 1;
        let certified = decide_var(r1, r2, b.upper_bound, LIFTED_1D, b.k, None).unwrap();
        if b.upper_bound < b.beta_max || !certified {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("U >= beta_max and U accepted on {}/{total} instances", total - bad))
}

fn edge_interval_scan() -> Outcome {
    let mut rng = rng(53);
    let mut worst: f64 = 0.0;
    let mut mismatches = 0;
    for t in 0..50 {
        let nk = if t % 2 == 0 { NormKind::LInf } else { NormKind::L1Max { split: 1 } };
        let boxes = random_boxes(&mut rng, 3, 2, 0.6, 1.0);
        let (p0, p1, q) = (boxes[0].clone(), boxes[1].clone(), random_boxes(&mut rng, 1, 2, 0.6, 0.0).remove(0));
        let reach = phi_min(&p0, &q, nk).unwrap().max(phi_min(&p1, &q, nk).unwrap());
        let delta = rng.gen_range(0.0..=1.1 * reach);
        let exact = edge_interval_min(&p0, &p1, &q, delta, nk).unwrap();
        let r1 = Ppr::new(vec![p0, p1]).unwrap();
        let r2 = Ppr::new(vec![q]).unwrap();
        let free: Vec<f64> = (0..=1000)
            .map(|s| s as f64 / 1000.0)
            .filter(|&l| free_at(&r1, &r2, l, 0.0, delta, PhiKind::Min, nk).unwrap())
            .collect();
        match (exact.bounds(), free.first(), free.last()) {
            (Some((lo, hi)), Some(&a), Some(&b)) => worst = worst.max((lo - a).abs()).max((hi - b).abs()),
            (None, None, _) => {}
            (Some((lo, hi)), None, _) if hi - lo <= 2e-3 => {}
            _ => mismatches += 1,
        }
    }
    outcome(mismatches == 0 && worst <= 2e-3, format!("max endpoint error {worst:.2e}, {mismatches} emptiness mismatches"))
}

fn reachability_oracle() -> Outcome {
    let mut rng = rng(61);
    let mut disagree = 0;
    let mut reachable = 0;
    for _ in 0..100 {
        let m1 = rng.gen_range(0..=3);
        let m2 = rng.gen_range(0..=3);
        let f = random_boundary(&mut rng, m1, m2);
        let dp = decide_reachable(&f).0;
        reachable += usize::from(dp);
        if dp != path_oracle(&f) {
            disagree += 1;
        }
    }
    outcome(disagree == 0, format!("{disagree} disagreements on 100 grids ({reachable} reachable)"))
}

fn window_consistency() -> Outcome {
    let mut rng = rng(71);
    let bits = 16;
    let tol = 2f64.powi(-(bits as i32));
    let mut worst_full: f64 = 0.0;
    let mut increases = 0;
    for _ in 0..10 {
        let m = rng.gen_range(3..=5);
        let (_, r1) = random_lifted_pipe(&mut rng, m, 1, 0.5);
        let (_, r2) = random_lifted_pipe(&mut rng, m, 1, 0.5);
        let bounds = |w: Option<usize>| compute_bounds(&r1, &r2, LIFTED_1D, &BoundsOptions { bits, window: w, ..Default::default() }).unwrap();
        let unwindowed = bounds(None).beta_max;
        let mut prev = f64::INFINITY;
        for w in 1..=m {
            let b = bounds(Some(w)).beta_max;
            if b > prev + tol {
                increases += 1;
            }
            prev = b;
        }
        worst_full = worst_full.max((prev - unwindowed).abs());
    }
    outcome(
        worst_full <= tol && increases == 0,
        format!("max |beta_max(W=max m) - beta_max| = {worst_full:.2e}, {increases} increases in W"),
    )
}

fn runtime() -> Outcome {
    let opts = PipelineOptions { k: 32, bits: 16, ..Default::default() };
    let time_at = |m: usize, seed: u64, repeats: usize| -> Duration {
        let mut rng = rng(seed);
        let times = random_times(&mut rng, m + 1, 0.05, 0.15);
        let sp1 = sampled(&times, random_boxes(&mut rng, m + 1, 3, 0.5, 0.3));
        let sp2 = sampled(&times, random_boxes(&mut rng, m + 1, 3, 0.5, 0.3));
        (0..repeats)
            .map(|_| {
                let start = Instant::now();
                run_pipeline(&sp1, &sp2, &opts).unwrap();
                start.elapsed()
            })
            .min()
            .unwrap()
    };
    let big = time_at(50, 83, 1);
    let series: Vec<(f64, f64)> = [10, 20, 40].iter().map(|&m| (m as f64, time_at(m, 89, 3).as_secs_f64())).collect();
    let slope = loglog_slope(&series);
    outcome(
        big < Duration::from_secs(60) && slope <= 2.3,
        format!("m=50 took {:.2}s, log-log slope over m=10,20,40 is {slope:.2}", big.as_secs_f64()),
    )
}

fn main() {
    let start = Instant::now();
    let boxes = box_cases();
    let singles = singleton_cases();
    let results = [
        ("1 beta_min matches trace oracle", oracle_min_agreement(&boxes)),
        ("2 bounds sandwich trace oracle", sandwich(&boxes)),
        ("3 singleton pipes reduce to skorokhod", singleton_reduction(&singles)),
        ("4 free space convex per cell", convexity()),
        ("5 decisions monotone in delta", decision_monotonicity()),
        ("6 coarse bound dominates", upper_bound_dominates(&boxes, &singles)),
        ("7 exact edge interval vs dense scan", edge_interval_scan()),
        ("8 reachability vs path oracle", reachability_oracle()),
        ("9 sliding window consistent", window_consistency()),
        ("10 runtime and scaling", runtime()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("[{}] {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.ok);
    }
    println!("acceptance: {}/{} passed in {:.1}s", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
