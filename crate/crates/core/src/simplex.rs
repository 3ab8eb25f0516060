//! Dense two-phase primal simplex with bounded variables.
//!
//! Variables may carry finite lower and upper bounds; bounds are handled by
//! the nonbasic-at-bound technique rather than explicit rows. Pricing uses
//! the largest-violation rule and falls back to Bland's rule after a run of
//! degenerate steps, which guarantees termination.

use crate::lp::{LpProblem, LpSolution, LpStatus, ObjSense, RowSense};


const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-10;
const RATIO_TIE: f64 = 1e-12;
const STALL_LIMIT: u32 = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
enum VStat {
    Basic(usize),
    AtLb,
    AtUb,
}

struct Tableau {
    m: usize,
    ncols: usize,
    /// Row-major m x ncols working matrix (B^-1 A maintained in place).
    a: Vec<f64>,
    /// Current basic variable values, one per row.
    xb: Vec<f64>,
    /// Reduced costs for the current phase.
    d: Vec<f64>,
    obj: f64,
    basis: Vec<usize>,
    vstat: Vec<VStat>,
    ub: Vec<f64>,
    is_artificial: Vec<bool>,
    iterations: u64,
    bland: bool,
    stall: u32,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.ncols + c]
    }

    fn value_of(&self, col: usize) -> f64 {
        match self.vstat[col] {
            VStat::Basic(r) => self.xb[r],
            VStat::AtLb => 0.0,
            VStat::AtUb => self.ub[col],
        }
    }

    fn price(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.ncols {
            if matches!(self.vstat[j], VStat::Basic(_)) || self.ub[j] == 0.0 {
                continue;
            }
            let viol = match self.vstat[j] {
                VStat::AtLb if self.d[j] < -COST_TOL => -self.d[j],
                VStat::AtUb if self.d[j] > COST_TOL => self.d[j],
                _ => continue,
            };
            if self.bland {
                return Some((j, viol));
            }
            if best.map_or(true, |(_, bv)| viol > bv) {
                best = Some((j, viol));
            }
        }
        best
    }

    /// One pivot (or bound flip). Returns false when the phase is optimal,
    /// or errors with Unbounded.
    fn step(&mut self) -> Result<bool, LpStatus> {
        let Some((enter, _)) = self.price() else {
            return Ok(false);
        };
        self.iterations += 1;
        let dir: f64 = if self.vstat[enter] == VStat::AtLb { 1.0 } else { -1.0 };

        // ratio test
        let mut t_best = f64::INFINITY;
        let mut leave: Option<(usize, VStat)> = None;
        for r in 0..self.m {
            let w = dir * self.at(r, enter);
            let (t, dest) = if w > PIVOT_TOL {
                (self.xb[r] / w, VStat::AtLb)
            } else if w < -PIVOT_TOL && self.ub[self.basis[r]].is_finite() {
                ((self.ub[self.basis[r]] - self.xb[r]) / (-w), VStat::AtUb)
            } else {
                continue;
            };
            let t = t.max(0.0);
            let better = t < t_best - RATIO_TIE
                || (t < t_best + RATIO_TIE
                    && leave.map_or(true, |(lr, _)| self.basis[r] < self.basis[lr]));
            if better {
                t_best = t;
                leave = Some((r, dest));
            }
        }
        let t_flip = self.ub[enter];

        if t_flip <= t_best {
            if !t_flip.is_finite() {
                return Err(LpStatus::Unbounded);
            }
            // bound flip without basis change
            for r in 0..self.m {
                self.xb[r] -= dir * self.at(r, enter) * t_flip;
            }
            self.obj += self.d[enter] * dir * t_flip;
            self.vstat[enter] = match self.vstat[enter] {
                VStat::AtLb => VStat::AtUb,
                _ => VStat::AtLb,
            };
            self.track_stall(t_flip);
            return Ok(true);
        }
        let Some((r, dest)) = leave else {
            return Err(LpStatus::Unbounded);
        };

        // move basics, then eliminate
        for rr in 0..self.m {
            if rr != r {
                self.xb[rr] -= dir * self.at(rr, enter) * t_best;
            }
        }
        let enter_value = if dir > 0.0 {
            t_best
        } else {
            self.ub[enter] - t_best
        };
        self.obj += self.d[enter] * dir * t_best;

        let piv = self.at(r, enter);
        let inv = 1.0 / piv;
        for c in 0..self.ncols {
            self.a[r * self.ncols + c] *= inv;
        }
        for rr in 0..self.m {
            if rr == r {
                continue;
            }
            let f = self.at(rr, enter);
            if f != 0.0 {
                for c in 0..self.ncols {
                    self.a[rr * self.ncols + c] -= f * self.a[r * self.ncols + c];
                }
            }
        }
        let f = self.d[enter];
        if f != 0.0 {
            for c in 0..self.ncols {
                self.d[c] -= f * self.a[r * self.ncols + c];
            }
        }

        let leaving = self.basis[r];
        self.vstat[leaving] = dest;
        self.basis[r] = enter;
        self.vstat[enter] = VStat::Basic(r);
        self.xb[r] = enter_value;
        self.track_stall(t_best);
        Ok(true)
    }

    fn track_stall(&mut self, t: f64) {
        if t < RATIO_TIE {
            self.stall += 1;
            if self.stall > STALL_LIMIT {
                self.bland = true;
            }
        } else {
            self.stall = 0;
        }
    }

    fn run(&mut self) -> Result<(), LpStatus> {
        let cap = 2000 * (self.m + self.ncols) as u64 + 200_000;
        loop {
            match self.step() {
                Ok(true) => {
                    assert!(self.iterations < cap, "simplex iteration cap exceeded");
                }
                Ok(false) => return Ok(()),
                Err(status) => return Err(status),
            }
        }
    }

    /// Recompute reduced costs and objective for the given cost vector.
    fn load_costs(&mut self, cost: &[f64]) {
        self.d.copy_from_slice(cost);
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..self.ncols {
                    self.d[c] -= cb * self.at(r, c);
                }
            }
        }
        self.obj = (0..self.ncols)
            .map(|j| cost[j] * self.value_of(j))
            .sum();
    }
}

/// Solve an LP with the bounded-variable two-phase primal simplex.
/// Panics on non-finite lower bounds; upper bounds may be infinite.
pub fn simplex_solve(p: &LpProblem) -> LpSolution {
    let n = p.num_vars();
    let m = p.rows.len();
    let minimize = p.sense == ObjSense::Min;
    let cost_struct: Vec<f64> = if minimize {
        p.objective.clone()
    } else {
        p.objective.iter().map(|c| -c).collect()
    };
    for j in 0..n {
        assert!(
            p.var_lb[j].is_finite(),
            "variable {} has non-finite lower bound",
            p.var_names[j]
        );
        assert!(p.var_ub[j] >= p.var_lb[j], "inverted bounds on {}", p.var_names[j]);
    }
    let shift: f64 = (0..n).map(|j| cost_struct[j] * p.var_lb[j]).collect::<Vec<_>>().iter().sum();

    // shifted rhs and row normalization signs
    let mut nu = vec![1.0f64; m];
    let mut rhs = vec![0.0f64; m];
    for (r, row) in p.rows.iter().enumerate() {
        let mut b = row.rhs;
        for &(j, c) in &row.coeffs {
            b -= c * p.var_lb[j];
        }
        if b < 0.0 {
            nu[r] = -1.0;
            b = -b;
        }
        rhs[r] = b;
    }

    // column layout: structural, slack (one per non-Eq row), artificial
    let mut slack_col = vec![usize::MAX; m];
    let mut next = n;
    for (r, row) in p.rows.iter().enumerate() {
        if row.sense != RowSense::Eq {
            slack_col[r] = next;
            next += 1;
        }
    }
    let mut art_col = vec![usize::MAX; m];
    let mut sigma = vec![0.0f64; m];
    for (r, row) in p.rows.iter().enumerate() {
        let eff_sense = match (row.sense, nu[r] < 0.0) {
            (RowSense::Le, false) | (RowSense::Ge, true) => RowSense::Le,
            (RowSense::Ge, false) | (RowSense::Le, true) => RowSense::Ge,
            (RowSense::Eq, _) => RowSense::Eq,
        };
        sigma[r] = match eff_sense {
            RowSense::Le => 1.0,
            RowSense::Ge => -1.0,
            RowSense::Eq => 0.0,
        };
        if eff_sense != RowSense::Le {
            art_col[r] = next;
            next += 1;
        }
    }
    let ncols = next;

    let mut t = Tableau {
        m,
        ncols,
        a: vec![0.0; m * ncols],
        xb: rhs.clone(),
        d: vec![0.0; ncols],
        obj: 0.0,
        basis: vec![0; m],
        vstat: vec![VStat::AtLb; ncols],
        ub: vec![f64::INFINITY; ncols],
        is_artificial: vec![false; ncols],
        iterations: 0,
        bland: false,
        stall: 0,
    };
    for j in 0..n {
        t.ub[j] = p.var_ub[j] - p.var_lb[j];
    }
    for (r, row) in p.rows.iter().enumerate() {
        for &(j, c) in &row.coeffs {
            t.a[r * ncols + j] += nu[r] * c;
        }
        if slack_col[r] != usize::MAX {
            // +1 slack for effective <=, -1 surplus for effective >=
            t.a[r * ncols + slack_col[r]] = if sigma[r] >= 0.0 { 1.0 } else { -1.0 };
        }
        if art_col[r] != usize::MAX {
            t.a[r * ncols + art_col[r]] = 1.0;
            t.is_artificial[art_col[r]] = true;
            t.basis[r] = art_col[r];
            t.vstat[art_col[r]] = VStat::Basic(r);
        } else {
            t.basis[r] = slack_col[r];
            t.vstat[slack_col[r]] = VStat::Basic(r);
        }
    }

    // phase 1
    let have_artificials = t.is_artificial.iter().any(|&b| b);
    if have_artificials {
        let phase1_cost: Vec<f64> = (0..ncols)
            .map(|j| if t.is_artificial[j] { 1.0 } else { 0.0 })
            .collect();
        t.load_costs(&phase1_cost);
        if let Err(status) = t.run() {
            return failed(p, status, t.iterations);
        }
        if t.obj > 1e-7 {
            return failed(p, LpStatus::Infeasible, t.iterations);
        }
        // pivot basic artificials out where possible
        for r in 0..m {
            if t.is_artificial[t.basis[r]] {
                let mut target = None;
                for j in 0..ncols {
                    if !t.is_artificial[j]
                        && !matches!(t.vstat[j], VStat::Basic(_))
                        && t.at(r, j).abs() > PIVOT_TOL
                    {
                        target = Some(j);
                        break;
                    }
                }
                if let Some(j) = target {
                    pivot_in_place(&mut t, r, j);
                }
            }
        }
        for j in 0..ncols {
            if t.is_artificial[j] {
                t.ub[j] = 0.0;
            }
        }
    }

    // phase 2
    let mut phase2_cost = vec![0.0; ncols];
    phase2_cost[..n].copy_from_slice(&cost_struct);
    t.load_costs(&phase2_cost);
    if let Err(status) = t.run() {
        return failed(p, status, t.iterations);
    }

    // extract primal values
    let mut primal = vec![0.0; n];
    for j in 0..n {
        primal[j] = t.value_of(j) + p.var_lb[j];
    }
    let obj_min = t.obj + shift;

    // row duals from the unit columns
    let mut duals = vec![0.0; m];
    for r in 0..m {
        let (col, s) = if art_col[r] != usize::MAX {
            (art_col[r], 1.0)
        } else {
            (slack_col[r], sigma[r])
        };
        let y_norm = -t.d[col] / s;
        let y_min = nu[r] * y_norm;
        duals[r] = if minimize { y_min } else { -y_min };
    }
    let reduced: Vec<f64> = (0..n)
        .map(|j| if minimize { t.d[j] } else { -t.d[j] })
        .collect();

    LpSolution {
        primal,
        duals,
        objective: if minimize { obj_min } else { -obj_min },
        status: LpStatus::Optimal,
        iterations: t.iterations,
        reduced_costs: reduced,
    }
}

/// Degenerate pivot used to drive a zero-valued artificial out of the basis.
/// The artificial's residual value (at most the phase-1 tolerance) is folded
/// into the entering variable.
fn pivot_in_place(t: &mut Tableau, r: usize, enter: usize) {
    let ncols = t.ncols;
    let piv = t.at(r, enter);
    let eps = t.xb[r];
    let delta = eps / piv;
    for rr in 0..t.m {
        if rr != r {
            t.xb[rr] -= t.at(rr, enter) * delta;
        }
    }
    let entering_value = match t.vstat[enter] {
        VStat::AtUb => t.ub[enter],
        _ => 0.0,
    } + delta;

    let inv = 1.0 / piv;
    for c in 0..ncols {
        t.a[r * ncols + c] *= inv;
    }
    for rr in 0..t.m {
        if rr == r {
            continue;
        }
        let f = t.at(rr, enter);
        if f != 0.0 {
            for c in 0..ncols {
                t.a[rr * ncols + c] -= f * t.a[r * ncols + c];
            }
        }
    }
    let f = t.d[enter];
    if f != 0.0 {
        for c in 0..ncols {
            t.d[c] -= f * t.a[r * ncols + c];
        }
    }
    let leaving = t.basis[r];
    t.vstat[leaving] = VStat::AtLb;
    t.basis[r] = enter;
    t.vstat[enter] = VStat::Basic(r);
    t.xb[r] = entering_value;
}

fn failed(p: &LpProblem, status: LpStatus, iterations: u64) -> LpSolution {
    LpSolution {
        primal: vec![0.0; p.num_vars()],
        duals: vec![0.0; p.rows.len()],
        objective: 0.0,
        status,
        iterations,
        reduced_costs: vec![0.0; p.num_vars()],
    }
}

/// Max primal constraint violation and the complementary-slackness duality
/// gap of a claimed optimal solution, for certificate checks.
pub fn optimality_certificate(p: &LpProblem, s: &LpSolution) -> (f64, f64) {
    let mut residual: f64 = 0.0;
    for row in &p.rows {
        let lhs: f64 = row
            .coeffs
            .iter()
            .map(|&(j, c)| c * s.primal[j])
            .sum();
        let v: f64 = match row.sense {
            RowSense::Le => (lhs - row.rhs).max(0.0),
            RowSense::Ge => (row.rhs - lhs).max(0.0),
            RowSense::Eq => (lhs - row.rhs).abs(),
        };
        residual = residual.max(v);
    }
    for j in 0..p.num_vars() {
        residual = residual.max(p.var_lb[j] - s.primal[j]);
        if p.var_ub[j].is_finite() {
            residual = residual.max(s.primal[j] - p.var_ub[j]);
        }
    }

    // dual objective: b'y plus reduced costs applied at the active bounds
    let sign = if p.sense == ObjSense::Min { 1.0 } else { -1.0 };
    let mut dual_obj: f64 = p
        .rows
        .iter()
        .zip(&s.duals)
        .map(|(row, &y)| row.rhs * y * sign)
        .sum();
    for j in 0..p.num_vars() {
        let rc = s.reduced_costs[j] * sign;
        if rc > 0.0 {
            dual_obj += rc * p.var_lb[j];
        } else if rc < 0.0 {
            dual_obj += rc * p.var_ub[j];
        }
    }
    let primal_min = sign * s.objective;
    (residual, (primal_min - dual_obj).abs())
}
