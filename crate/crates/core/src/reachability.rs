//! Monotone-curve reachability through a free-space boundary.

use crate::error::{Error, Result};
use crate::freespace::{EdgeInterval, FreeSpaceBoundary, Grid};

/// Endpoint slack when deciding whether an interval touches a cell corner.
const EPS: f64 = 1e-9;

/// Reachable sub-interval of every edge, same layout as [`FreeSpaceBoundary`].
#[derive(Clone, Debug, PartialEq)]
pub struct ReachBoundary {
    pub bottom: Grid<EdgeInterval>,
    pub left: Grid<EdgeInterval>,
}

impl ReachBoundary {
    fn empty(m1: usize, m2: usize) -> Self {
        Self { bottom: Grid::filled(m1, m2 + 1, EdgeInterval::Empty), left: Grid::filled(m1 + 1, m2, EdgeInterval::Empty) }
    }
}

fn touches_start(e: &EdgeInterval) -> bool {
    e.bounds().is_some_and(|(lo, _)| lo <= EPS)
}

fn touches_end(e: &EdgeInterval) -> bool {
    e.bounds().is_some_and(|(_, hi)| hi >= 1.0 - EPS)
}

/// `free` restricted to points at or after `from`.
fn clip(free: &EdgeInterval, from: f64) -> EdgeInterval {
    match free.bounds() {
        Some((lo, hi)) if from <= hi + EPS => EdgeInterval::Interval { lo: lo.max(from).min(hi), hi },
        _ => EdgeInterval::Empty,
    }
}

/// Whether a curve non-decreasing in both parameters runs through the free
/// space from `(0, 0)` to `(m₁, m₂)`, with the reachable part of every edge.
pub fn decide_reachable(fsb: &FreeSpaceBoundary) -> (bool, ReachBoundary) {
    let (m1, m2) = (fsb.m1, fsb.m2);
    let mut reach = ReachBoundary::empty(m1, m2);
    if !*fsb.corners.get(0, 0) {
        return (false, reach);
    }

    // Along ρ₂ = 0 and ρ₁ = 0 a curve can only slide along the border.
    let mut open = true;
    for i in 0..m1 {
        let e = *fsb.bottom.get(i, 0);
        if !(open && touches_start(&e)) {
            break;
        }
        reach.bottom.set(i, 0, e);
        open = touches_end(&e) && *fsb.corners.get(i + 1, 0);
    }
    let mut open = true;
    for j in 0..m2 {
        let e = *fsb.left.get(0, j);
        if !(open && touches_start(&e)) {
            break;
        }
        reach.left.set(0, j, e);
        open = touches_end(&e) && *fsb.corners.get(0, j + 1);
    }

    for i in 0..m1 {
        for j in 0..m2 {
            if !fsb.cell_in_band(i, j) {
                continue;
            }
            let from_bottom = *reach.bottom.get(i, j);
            let from_left = *reach.left.get(i, j);
            let free_top = fsb.bottom.get(i, j + 1);
            let free_right = fsb.left.get(i + 1, j);
            let top = match (from_left.bounds(), from_bottom.bounds()) {
                (Some(_), _) => *free_top,
                (None, Some((lo, _))) => clip(free_top, lo),
                (None, None) => EdgeInterval::Empty,
            };
            let right = match (from_bottom.bounds(), from_left.bounds()) {
                (Some(_), _) => *free_right,
                (None, Some((lo, _))) => clip(free_right, lo),
                (None, None) => EdgeInterval::Empty,
            };
            reach.bottom.set(i, j + 1, top);
            reach.left.set(i + 1, j, right);
        }
    }

    let arrived = if m1 == 0 && m2 == 0 {
        true
    } else {
        (m1 > 0 && touches_end(reach.bottom.get(m1 - 1, m2))) || (m2 > 0 && touches_end(reach.left.get(m1, m2 - 1)))
    };
    (arrived && *fsb.corners.get(m1, m2), reach)
}

/// Restricts matchings to cells with `|i − j| ≤ w`: edges and corners that
/// belong only to excluded cells become empty.
pub fn apply_window(fsb: &FreeSpaceBoundary, w: usize) -> Result<FreeSpaceBoundary> {
    if w == 0 {
        return Err(Error::InvalidArgument("window must be at least 1".into()));
    }
    let mut out = fsb.clone();
    out.window = Some(fsb.window.map_or(w, |old| old.min(w)));
    for i in 0..=out.m1 {
        for j in 0..=out.m2 {
            if !out.corner_in_band(i, j) {
                out.corners.set(i, j, false);
            }
            if i < out.m1 && !out.bottom_in_band(i, j) {
                out.bottom.set(i, j, EdgeInterval::Empty);
            }
            if j < out.m2 && !out.left_in_band(i, j) {
                out.left.set(i, j, EdgeInterval::Empty);
            }
        }
    }
    Ok(out)
}
