//! Dense two-phase simplex and the linear encodings of `L∞` / `L1^max`
//! norm constraints used by every free-space and `Φ` computation.

use crate::error::{Error, Result};
use crate::geometry::NormKind;

/// Primal feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-9;
/// Smallest magnitude accepted as a pivot element.
pub const PIVOT_TOL: f64 = 1e-10;
const OPT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Affine scalar expression `Σ coef·x_var + constant`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn var(index: usize) -> Self {
        Self::term(index, 1.0)
    }

    pub fn term(index: usize, coef: f64) -> Self {
        Self { terms: vec![(index, coef)], constant: 0.0 }
    }

    pub fn add_term(&mut self, index: usize, coef: f64) -> &mut Self {
        if coef != 0.0 {
            self.terms.push((index, coef));
        }
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|&(i, c)| (i, c * s)).collect(),
            constant: self.constant * s,
        }
    }

    pub fn plus(&self, other: &LinExpr) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms, constant: self.constant + other.constant }
    }

    pub fn minus(&self, other: &LinExpr) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(i, c)| c * x[i]).sum::<f64>() + self.constant
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    lower: Vec<Option<f64>>,
    upper: Vec<Option<f64>>,
    objective: Vec<f64>,
    sense: Sense,
    constraints: Vec<Constraint>,
}

impl Default for LpProblem {
    fn default() -> Self {
        Self::new()
    }
}

impl LpProblem {
    pub fn new() -> Self {
        Self {
            lower: Vec::new(),
            upper: Vec::new(),
            objective: Vec::new(),
            sense: Sense::Minimize,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self, var: usize) -> (Option<f64>, Option<f64>) {
        (self.lower[var], self.upper[var])
    }

    pub fn add_var(&mut self, lower: Option<f64>, upper: Option<f64>) -> usize {
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.push(0.0);
        self.lower.len() - 1
    }

    pub fn add_free_var(&mut self) -> usize {
        self.add_var(None, None)
    }

    pub fn add_free_vars(&mut self, n: usize) -> Vec<usize> {
        (0..n).map(|_| self.add_free_var()).collect()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        debug_assert!(coeffs.iter().all(|&(i, _)| i < self.num_vars()));
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// Adds `expr rel rhs`, moving the expression's constant to the right.
    pub fn add_expr_constraint(&mut self, expr: &LinExpr, relation: Relation, rhs: f64) {
        self.add_constraint(expr.terms.clone(), relation, rhs - expr.constant);
    }

    pub fn set_objective(&mut self, sense: Sense, terms: &[(usize, f64)]) {
        self.sense = sense;
        self.objective.iter_mut().for_each(|c| *c = 0.0);
        for &(i, c) in terms {
            self.objective[i] += c;
        }
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(i, a)| a * x[i]).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &xj) in x.iter().enumerate() {
            if let Some(l) = self.lower[j] {
                worst = worst.max(l - xj);
            }
            if let Some(u) = self.upper[j] {
                worst = worst.max(xj - u);
            }
        }
        worst
    }

    fn rhs_scale(&self) -> f64 {
        let mut s: f64 = 0.0;
        for c in &self.constraints {
            s = s.max(c.rhs.abs());
        }
        for v in self.lower.iter().chain(self.upper.iter()).flatten() {
            s = s.max(v.abs());
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

// x_j = offset + Σ sign·y_col over one or two nonnegative columns.
struct VarMap {
    offset: f64,
    cols: [(usize, f64); 2],
    len: usize,
}

impl VarMap {
    fn cols(&self) -> &[(usize, f64)] {
        &self.cols[..self.len]
    }
}

struct Tableau {
    width: usize,
    rows: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

enum RunStatus {
    Optimal,
    Unbounded,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn obj_row(&self) -> usize {
        self.rows
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.at(r, c);
        let inv = 1.0 / p;
        for k in 0..w {
            self.data[r * w + k] *= inv;
        }
        self.data[r * w + c] = 1.0;
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[c];
            if f != 0.0 {
                for (x, &y) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Rebuilds the objective row from column costs and the current basis.
    fn set_costs(&mut self, costs: &[f64]) {
        let w = self.width;
        let obj = self.obj_row();
        for k in 0..w {
            self.data[obj * w + k] = if k < costs.len() { costs[k] } else { 0.0 };
        }
        for r in 0..self.rows {
            let cb = costs.get(self.basis[r]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for k in 0..w {
                    let v = self.data[r * w + k];
                    self.data[obj * w + k] -= cb * v;
                }
            }
        }
    }

    fn run(&mut self, allowed: &[bool]) -> Result<RunStatus> {
        let ncols = self.width - 1;
        let dantzig_limit = 5 * (self.rows + ncols);
        let hard_limit = dantzig_limit + 50 * (self.rows + ncols) + 1000;
        let rhs = self.rhs_col();
        let obj = self.obj_row();
        for iter in 0..hard_limit {
            let bland = iter >= dantzig_limit;
            let mut enter = None;
            let mut best = -OPT_TOL;
            for j in 0..ncols {
                if !allowed[j] {
                    continue;
                }
                let d = self.at(obj, j);
                if d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(col) = enter else {
                return Ok(RunStatus::Optimal);
            };
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for r in 0..self.rows {
                let a = self.at(r, col);
                if a > PIVOT_TOL {
                    let ratio = self.at(r, rhs).max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            if ratio < best_ratio - 1e-12 {
                                true
                            } else if ratio <= best_ratio + 1e-12 {
                                if bland {
                                    self.basis[r] < self.basis[l]
                                } else {
                                    a > self.at(l, col)
                                }
                            } else {
                                false
                            }
                        }
                    };
                    if better {
                        leave = Some(r);
                        best_ratio = best_ratio.min(ratio);
                    }
                }
            }
            let Some(row) = leave else {
                return Ok(RunStatus::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(Error::NumericalFailure(format!(
            "simplex did not terminate within {hard_limit} pivots"
        )))
    }
}

/// Solves `p` with a dense two-phase simplex (Dantzig pricing, Bland's rule
/// after `5·(rows+cols)` pivots).
pub fn solve(p: &LpProblem) -> Result<LpOutcome> {
    let n = p.num_vars();

    // Map every original variable onto nonnegative columns.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let m = match (p.lower[j], p.upper[j]) {
            (Some(l), Some(u)) => {
                if u < l - FEAS_TOL {
                    return Ok(LpOutcome::Infeasible);
                }
                bound_rows.push((ncols, (u - l).max(0.0)));
                VarMap { offset: l, cols: [(ncols, 1.0), (0, 0.0)], len: 1 }
            }
            (Some(l), None) => VarMap { offset: l, cols: [(ncols, 1.0), (0, 0.0)], len: 1 },
            (None, Some(u)) => VarMap { offset: u, cols: [(ncols, -1.0), (0, 0.0)], len: 1 },
            (None, None) => {
                let m = VarMap { offset: 0.0, cols: [(ncols, 1.0), (ncols + 1, -1.0)], len: 2 };
                ncols += 1;
                m
            }
        };
        ncols += 1;
        maps.push(m);
    }
    let nstruct = ncols;

    // Dense rows over structural columns, normalized to rhs >= 0.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(p.constraints.len() + bound_rows.len());
    for c in &p.constraints {
        let mut row = vec![0.0; nstruct];
        let mut rhs = c.rhs;
        for &(i, a) in &c.coeffs {
            let m = &maps[i];
            rhs -= a * m.offset;
            for &(col, s) in m.cols() {
                row[col] += a * s;
            }
        }
        rows.push((row, c.relation, rhs));
    }
    for &(col, ub) in &bound_rows {
        let mut row = vec![0.0; nstruct];
        row[col] = 1.0;
        rows.push((row, Relation::Le, ub));
    }
    for (row, rel, rhs) in rows.iter_mut() {
        if *rhs < 0.0 {
            row.iter_mut().for_each(|a| *a = -*a);
            *rhs = -*rhs;
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let nslack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let nart = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let total = nstruct + nslack + nart;
    let width = total + 1;
    let mut t = Tableau { width, rows: m, data: vec![0.0; (m + 1) * width], basis: vec![0; m] };
    let mut slack = nstruct;
    let mut art = nstruct + nslack;
    for (r, (row, rel, rhs)) in rows.iter().enumerate() {
        t.data[r * width..r * width + nstruct].copy_from_slice(row);
        t.data[r * width + total] = *rhs;
        match rel {
            Relation::Le => {
                t.data[r * width + slack] = 1.0;
                t.basis[r] = slack;
                slack += 1;
            }
            Relation::Ge => {
                t.data[r * width + slack] = -1.0;
                slack += 1;
                t.data[r * width + art] = 1.0;
                t.basis[r] = art;
                art += 1;
            }
            Relation::Eq => {
                t.data[r * width + art] = 1.0;
                t.basis[r] = art;
                art += 1;
            }
        }
    }
    let is_art = |j: usize| j >= nstruct + nslack && j < total;

    if nart > 0 {
        let mut costs = vec![0.0; total];
        for c in costs.iter_mut().skip(nstruct + nslack) {
            *c = 1.0;
        }
        t.set_costs(&costs);
        let allowed = vec![true; total];
        t.run(&allowed)?;
        let infeas = -t.at(t.obj_row(), total);
        let scale = 1.0 + p.rhs_scale();
        if infeas > FEAS_TOL * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        for r in 0..m {
            if is_art(t.basis[r]) {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..nstruct + nslack {
                    let a = t.at(r, j).abs();
                    if a > PIVOT_TOL && best.is_none_or(|(_, b)| a > b) {
                        best = Some((j, a));
                    }
                }
                if let Some((j, _)) = best {
                    t.pivot(r, j);
                }
            }
        }
    }

    let sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut costs = vec![0.0; total];
    for (j, mj) in maps.iter().enumerate() {
        let c = p.objective[j] * sign;
        for &(col, s) in mj.cols() {
            costs[col] += c * s;
        }
    }
    t.set_costs(&costs);
    let allowed: Vec<bool> = (0..total).map(|j| !is_art(j)).collect();
    if let RunStatus::Unbounded = t.run(&allowed)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut y = vec![0.0; total];
    for r in 0..m {
        y[t.basis[r]] = t.at(r, total).max(0.0);
    }
    let point: Vec<f64> = maps
        .iter()
        .map(|mj| mj.offset + mj.cols().iter().map(|&(col, s)| s * y[col]).sum::<f64>())
        .collect();
    let value: f64 = p.objective.iter().zip(&point).map(|(c, x)| c * x).sum();

    let viol = p.max_violation(&point);
    if viol > 1e-6 * (1.0 + p.rhs_scale()) {
        return Err(Error::NumericalFailure(format!("optimal point violates constraints by {viol:e}")));
    }
    Ok(LpOutcome::Optimal { value, point })
}

/// Appends constraints (and auxiliary variables for `L1Max`) expressing
/// `‖expr‖ ≤ bound` to `lp`.
pub fn norm_leq_constraints(lp: &mut LpProblem, expr: &[LinExpr], bound: &LinExpr, nk: NormKind) -> Result<()> {
    nk.check_dim(expr.len())?;
    let split = match nk {
        NormKind::LInf => 0,
        NormKind::L1Max { split } => split,
    };
    let mut sum = LinExpr::default();
    for e in &expr[..split] {
        let w = lp.add_var(Some(0.0), None);
        // w >= e and w >= -e
        lp.add_expr_constraint(&e.minus(&LinExpr::var(w)), Relation::Le, 0.0);
        lp.add_expr_constraint(&e.scaled(-1.0).minus(&LinExpr::var(w)), Relation::Le, 0.0);
        sum.add_term(w, 1.0);
    }
    if split > 0 {
        lp.add_expr_constraint(&sum.minus(bound), Relation::Le, 0.0);
    }
    for e in &expr[split..] {
        lp.add_expr_constraint(&e.minus(bound), Relation::Le, 0.0);
        lp.add_expr_constraint(&e.scaled(-1.0).minus(bound), Relation::Le, 0.0);
    }
    Ok(())
}

/// Maximum of `‖expr‖` over the feasible set of `feasible`, computed as the
/// largest of one LP per vertex of the dual unit ball.
pub fn maximize_norm(expr: &[LinExpr], feasible: &LpProblem, nk: NormKind) -> Result<f64> {
    nk.check_dim(expr.len())?;
    let mut best: f64 = 0.0;
    let mut lp = feasible.clone();
    for w in nk.dual_vertices(expr.len()) {
        let mut obj = LinExpr::default();
        for (e, &wi) in expr.iter().zip(&w) {
            if wi != 0.0 {
                obj = obj.plus(&e.scaled(wi));
            }
        }
        lp.set_objective(Sense::Maximize, &obj.terms);
        match solve(&lp)? {
            LpOutcome::Optimal { value, .. } => best = best.max(value + obj.constant),
            LpOutcome::Infeasible => return Err(Error::InfeasibleRegion),
            LpOutcome::Unbounded => return Err(Error::UnboundedNorm),
        }
    }
    Ok(best)
}
