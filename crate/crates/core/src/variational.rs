//! Direct minimization of the discretized perimeter functionals.
//!
//! The profile is piecewise linear on a uniform grid of `[0, domain_cap]`.
//! For a fixed support `[0, x_m]` the unknowns are the nodal values
//! `u_0..=u_m >= 0`, and the objective is the perimeter functional plus the
//! penalty `w/2 (2 A(u) - v)^2`. Each fixed-support problem is solved by a
//! projected Newton method; the support index `m` is then chosen by a pattern
//! search. Nothing here uses the closed-form solutions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{alpha_length_of_graph_over_x, alpha_length_of_graph_over_y, Alpha, SampledProfile};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Vertical,
    Horizontal,
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertical" | "x" => Ok(Orientation::Vertical),
            "horizontal" | "y" => Ok(Orientation::Horizontal),
            _ => Err(Error::InvalidInput(format!(
                "orientation must be `vertical` or `horizontal`, got `{s}`"
            ))),
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Vertical => "vertical",
            Orientation::Horizontal => "horizontal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteProblem {
    pub alpha: Alpha,
    pub v: f64,
    pub orientation: Orientation,
    pub n_grid: usize,
    pub domain_cap: f64,
    pub penalty_weight: f64,
    /// Newton iterations allowed per fixed-support solve.
    pub max_iters: usize,
    pub step_tol: f64,
}

impl DiscreteProblem {
    /// Defaults: 400 grid intervals and a search box of twice the natural
    /// length scale of the area, `v^(1/(alpha+2))` across and
    /// `v^((alpha+1)/(alpha+2))` along the axis.
    pub fn new(alpha: Alpha, v: f64, orientation: Orientation) -> Result<Self> {
        let a = alpha.value();
        let exponent = match orientation {
            Orientation::Vertical => 1.0 / (a + 2.0),
            Orientation::Horizontal => (a + 1.0) / (a + 2.0),
        };
        let p = DiscreteProblem {
            alpha,
            v,
            orientation,
            n_grid: 400,
            domain_cap: 2.0 * v.powf(exponent),
            penalty_weight: 1e4,
            max_iters: 200,
            step_tol: 1e-12,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_grid(self, n_grid: usize) -> Self {
        DiscreteProblem { n_grid, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(Error::InvalidInput(format!("area must be positive, got {}", self.v)));
        }
        if self.n_grid < 16 {
            return Err(Error::InvalidInput(format!("n_grid must be at least 16, got {}", self.n_grid)));
        }
        if !(self.domain_cap > 0.0 && self.domain_cap.is_finite()) {
            return Err(Error::InvalidInput(format!("domain_cap must be positive, got {}", self.domain_cap)));
        }
        if !(self.penalty_weight > 0.0) || self.max_iters == 0 || !(self.step_tol > 0.0) {
            return Err(Error::InvalidInput(
                "penalty_weight, max_iters and step_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub orientation: Orientation,
    pub profile: SampledProfile,
    pub perimeter: f64,
    pub area: f64,
    pub support_radius: f64,
    pub euler_lagrange_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[allow(clippy::excessive_precision)]
const GL_X: [f64; 5] = [
    0.148_874_338_981_631_211,
    0.433_395_394_129_247_191,
    0.679_409_568_299_024_406,
    0.865_063_366_688_984_511,
    0.973_906_528_517_171_720,
];
#[allow(clippy::excessive_precision)]
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_870,
    0.269_266_719_309_996_355,
    0.219_086_362_515_982_044,
    0.149_451_349_150_580_593,
    0.066_671_344_308_688_138,
];

/// Levels of geometric refinement towards `x = 0` in the first segment,
/// where `x^(2 alpha)` is not smooth.
const GRADED_LEVELS: usize = 12;

/// Gauss-Legendre nodes on `[0, 1]` as `(theta, weight)`.
fn unit_rule() -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(10);
    for (x, w) in GL_X.iter().zip(GL_W) {
        rule.push((0.5 * (1.0 - x), 0.5 * w));
        rule.push((0.5 * (1.0 + x), 0.5 * w));
    }
    rule
}

/// The composite rule on `[0, 1]` with pieces `[2^-(l+1), 2^-l]`.
fn graded_rule() -> Vec<(f64, f64)> {
    let base = unit_rule();
    let mut rule = Vec::new();
    let mut hi = 1.0;
    for level in 0..=GRADED_LEVELS {
        let lo = if level == GRADED_LEVELS { 0.0 } else { 0.5 * hi };
        for &(t, w) in &base {
            rule.push((lo + (hi - lo) * t, (hi - lo) * w));
        }
        hi = lo;
    }
    rule
}

/// The discretized functional for a fixed support `[0, m h]`.
#[derive(Debug, Clone)]
pub struct DiscreteFunctional {
    alpha: Alpha,
    orientation: Orientation,
    h: f64,
    m: usize,
    penalty_weight: f64,
    target: f64,
    /// Per segment: `(theta, weight * h, x^(2 alpha))` at each node.
    nodes: Vec<Vec<(f64, f64, f64)>>,
}

impl DiscreteFunctional {
    /// `m` segments of width `h`; the unknown vector has `m + 1` entries.
    pub fn new(alpha: Alpha, orientation: Orientation, h: f64, m: usize, penalty_weight: f64, target: f64) -> Self {
        let plain = unit_rule();
        let graded = graded_rule();
        let a = alpha.value();
        let nodes = (0..m)
            .map(|j| {
                let rule = if j == 0 && a > 0.0 && orientation == Orientation::Vertical {
                    &graded
                } else {
                    &plain
                };
                rule.iter()
                    .map(|&(t, w)| {
                        let x = h * (j as f64 + t);
                        (t, w * h, x.powf(2.0 * a))
                    })
                    .collect()
            })
            .collect();
        DiscreteFunctional {
            alpha,
            orientation,
            h,
            m,
            penalty_weight,
            target,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn with_target(&self, target: f64) -> Self {
        DiscreteFunctional { target, ..self.clone() }
    }

    /// `int_0^{x_m} u`, by the trapezoid rule (exact for the interpolant).
    pub fn half_area(&self, u: &[f64]) -> f64 {
        let inner: f64 = u.iter().sum();
        self.h * (inner - 0.5 * (u[0] + u[self.m]))
    }

    fn cap(&self, u: f64, factor: f64) -> (f64, f64) {
        match self.orientation {
            Orientation::Vertical => (factor * u, factor),
            Orientation::Horizontal => {
                let p = self.alpha.value() + 1.0;
                (factor * u.powf(p) / p, factor * self.alpha.weight(u))
            }
        }
    }

    /// Value and derivatives `(d/da, d/db)` of one segment's length.
    fn segment(&self, j: usize, a: f64, b: f64) -> (f64, f64, f64) {
        let slope = (b - a) / self.h;
        let mut value = 0.0;
        let (mut da, mut db) = (0.0, 0.0);
        match self.orientation {
            Orientation::Vertical => {
                let mut ds = 0.0;
                for &(_, w, x2a) in &self.nodes[j] {
                    let root = (x2a + slope * slope).sqrt();
                    value += w * root;
                    if root > 0.0 {
                        ds += w * slope / root;
                    }
                }
                da -= ds / self.h;
                db += ds / self.h;
            }
            Orientation::Horizontal => {
                let alpha = self.alpha.value();
                for &(t, w, _) in &self.nodes[j] {
                    let g = (a + (b - a) * t).max(0.0);
                    let g2a = self.alpha.weight(g).powi(2);
                    let q = g2a * slope * slope;
                    let root = (1.0 + q).sqrt();
                    value += w * root;
                    // dq/dg along the segment, times dg/da or dg/db
                    let dq_dg = if alpha == 0.0 || g == 0.0 {
                        0.0
                    } else {
                        2.0 * alpha * g2a / g * slope * slope
                    };
                    let dq_ds = 2.0 * g2a * slope;
                    let scale = w / (2.0 * root);
                    da += scale * (dq_dg * (1.0 - t) - dq_ds / self.h);
                    db += scale * (dq_dg * t + dq_ds / self.h);
                }
            }
        }
        (value, da, db)
    }

    /// The perimeter functional, without the penalty.
    pub fn perimeter(&self, u: &[f64]) -> f64 {
        let mut total = self.cap(u[0], 2.0).0 + self.cap(u[self.m], 4.0).0;
        for j in 0..self.m {
            total += 4.0 * self.segment(j, u[j], u[j + 1]).0;
        }
        total
    }

    fn area_error(&self, u: &[f64]) -> f64 {
        2.0 * self.half_area(u) - self.target
    }

    /// Perimeter plus `w/2 (2 A - target)^2`.
    pub fn value(&self, u: &[f64]) -> f64 {
        let e = self.area_error(u);
        self.perimeter(u) + 0.5 * self.penalty_weight * e * e
    }

    fn perimeter_gradient(&self, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        out[0] += self.cap(u[0], 2.0).1;
        out[self.m] += self.cap(u[self.m], 4.0).1;
        for j in 0..self.m {
            let (_, da, db) = self.segment(j, u[j], u[j + 1]);
            out[j] += 4.0 * da;
            out[j + 1] += 4.0 * db;
        }
    }

    /// `d(2 A)/du`.
    fn area_direction(&self) -> Vec<f64> {
        let mut b = vec![2.0 * self.h; self.m + 1];
        b[0] = self.h;
        b[self.m] = self.h;
        b
    }

    /// Exact gradient of [`DiscreteFunctional::value`].
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.m + 1];
        self.perimeter_gradient(u, &mut g);
        let c = self.penalty_weight * self.area_error(u);
        for (gi, bi) in g.iter_mut().zip(self.area_direction()) {
            *gi += c * bi;
        }
        g
    }

    /// Tridiagonal Hessian of the perimeter part, by differencing the exact
    /// gradient along three interleaved groups of coordinates.
    fn perimeter_hessian(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.m + 1;
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut plus = vec![0.0; n];
        let mut minus = vec![0.0; n];
        let scale = u.iter().fold(0.0f64, |s, &x| s.max(x.abs())).max(1e-3);
        let eps = 1e-6 * scale;
        for color in 0..3 {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            for i in (color..n).step_by(3) {
                up[i] += eps;
                // stay inside the domain of the caps
                dn[i] = (dn[i] - eps).max(0.0);
            }
            self.perimeter_gradient(&up, &mut plus);
            self.perimeter_gradient(&dn, &mut minus);
            for i in (color..n).step_by(3) {
                let width = up[i] - dn[i];
                for r in i.saturating_sub(1)..=(i + 1).min(n - 1) {
                    let d = (plus[r] - minus[r]) / width;
                    match r as isize - i as isize {
                        0 => diag[r] = d,
                        -1 => upper[r] = d,
                        _ => lower[r] = d,
                    }
                }
            }
        }
        // symmetrize
        for i in 0..n - 1 {
            let s = 0.5 * (upper[i] + lower[i + 1]);
            upper[i] = s;
            lower[i + 1] = s;
        }
        (lower, diag, upper)
    }
}

/// Solves `T x = rhs` for tridiagonal `T`; `None` if a pivot is not positive.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if !(pivot > 0.0) {
        return None;
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if !(pivot > 0.0) || !pivot.is_finite() {
            return None;
        }
        c[i] = if i + 1 < n { upper[i] / pivot } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// Outcome of one fixed-support solve.
#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub u: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Penalized objective after each accepted step, starting with the
    /// initial value.
    pub trace: Vec<f64>,
}

/// Projected Newton iteration on `u >= 0` for a fixed support.
pub fn newton_solve(functional: &DiscreteFunctional, start: &[f64], max_iters: usize, step_tol: f64) -> NewtonOutcome {
    let n = functional.len();
    let mut u: Vec<f64> = start.iter().map(|x| x.max(0.0)).collect();
    let mut value = functional.value(&u);
    let mut trace = vec![value];
    let b = functional.area_direction();
    let w = functional.penalty_weight;
    let scale = u.iter().fold(0.0f64, |s, &x| s.max(x)).max(1e-3);

    for iter in 0..max_iters {
        let g = functional.gradient(&u);
        let active: Vec<bool> = (0..n).map(|i| u[i] <= 1e-14 && g[i] > 0.0).collect();
        let (mut lower, mut diag, mut upper) = functional.perimeter_hessian(&u);
        let mut rhs: Vec<f64> = g.iter().map(|x| -x).collect();
        let mut bb = b.clone();
        for i in 0..n {
            if active[i] {
                diag[i] = 1.0;
                rhs[i] = 0.0;
                bb[i] = 0.0;
                lower[i] = 0.0;
                upper[i] = 0.0;
                if i > 0 {
                    upper[i - 1] = 0.0;
                }
                if i + 1 < n {
                    lower[i + 1] = 0.0;
                }
            }
        }
        let max_diag = diag.iter().fold(0.0f64, |s, &x| s.max(x.abs())).max(1.0);
        let mut damping = 0.0;
        let direction = loop {
            let shifted: Vec<f64> = diag.iter().map(|d| d + damping).collect();
            let solved = thomas(&lower, &shifted, &upper, &rhs)
                .and_then(|y| thomas(&lower, &shifted, &upper, &bb).map(|z| (y, z)));
            if let Some((y, z)) = solved {
                // (T + w b b^T)^-1 rhs by Sherman-Morrison
                let by: f64 = bb.iter().zip(&y).map(|(p, q)| p * q).sum();
                let bz: f64 = bb.iter().zip(&z).map(|(p, q)| p * q).sum();
                let coef = w * by / (1.0 + w * bz);
                break y.iter().zip(&z).map(|(yi, zi)| yi - coef * zi).collect::<Vec<f64>>();
            }
            damping = if damping == 0.0 { 1e-10 * max_diag } else { damping * 10.0 };
            if damping > 1e12 * max_diag {
                break rhs.clone();
            }
        };

        let slope: f64 = g.iter().zip(&direction).map(|(p, q)| p * q).sum();
        let descent = if slope < 0.0 { direction } else { rhs.clone() };
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-16 {
            let trial: Vec<f64> = u.iter().zip(&descent).map(|(x, d)| (x + t * d).max(0.0)).collect();
            let decrease: f64 = g.iter().zip(trial.iter().zip(&u)).map(|(gi, (a, b))| gi * (a - b)).sum();
            let tv = functional.value(&trial);
            if tv <= value + 1e-4 * decrease.min(0.0) && tv <= value {
                accepted = Some((trial, tv));
                break;
            }
            t *= 0.5;
        }
        let Some((next, next_value)) = accepted else {
            // no representable decrease left along the search direction
            let pg = projected_gradient_norm(&u, &g);
            return NewtonOutcome {
                u,
                iterations: iter,
                converged: pg < 1e-6 * scale.max(1.0) || t <= 1e-16,
                trace,
            };
        };
        let step = next.iter().zip(&u).fold(0.0f64, |s, (a, b)| s.max((a - b).abs()));
        u = next;
        value = next_value;
        trace.push(value);
        if step <= step_tol * scale {
            return NewtonOutcome {
                u,
                iterations: iter + 1,
                converged: true,
                trace,
            };
        }
    }
    NewtonOutcome {
        u,
        iterations: max_iters,
        converged: false,
        trace,
    }
}

fn projected_gradient_norm(u: &[f64], g: &[f64]) -> f64 {
    u.iter()
        .zip(g)
        .map(|(&x, &gi)| if x <= 0.0 && gi > 0.0 { 0.0 } else { gi.abs() })
        .fold(0.0, f64::max)
}

struct SupportSolution {
    u: Vec<f64>,
    perimeter: f64,
    iterations: usize,
    converged: bool,
}

/// Solves the fixed-support problem and then shifts the penalty target
/// until the area error drops below `1e-6 v`.
fn solve_support(problem: &DiscreteProblem, m: usize, start: &[f64]) -> SupportSolution {
    let h = problem.domain_cap / problem.n_grid as f64;
    let mut functional = DiscreteFunctional::new(
        problem.alpha,
        problem.orientation,
        h,
        m,
        problem.penalty_weight,
        problem.v,
    );
    let mut u = start.to_vec();
    let mut iterations = 0;
    let mut converged = true;
    let mut target = problem.v;
    for _ in 0..12 {
        let out = newton_solve(&functional, &u, problem.max_iters, problem.step_tol);
        iterations += out.iterations;
        converged = out.converged;
        u = out.u;
        let error = 2.0 * functional.half_area(&u) - problem.v;
        if error.abs() < 1e-6 * problem.v {
            break;
        }
        target -= error;
        functional = functional.with_target(target);
    }
    let perimeter = functional.perimeter(&u);
    SupportSolution {
        u,
        perimeter,
        iterations,
        converged,
    }
}

/// Stretches `u` (on `m_from` segments) to `m_to` segments and rescales it
/// to the area `v`.
fn resample(u: &[f64], m_to: usize, h: f64, v: f64) -> Vec<f64> {
    let m_from = u.len() - 1;
    let mut out: Vec<f64> = (0..=m_to)
        .map(|i| {
            let s = i as f64 * m_from as f64 / m_to as f64;
            let j = (s.floor() as usize).min(m_from - 1);
            let t = s - j as f64;
            u[j] * (1.0 - t) + u[j + 1] * t
        })
        .collect();
    let inner: f64 = out.iter().sum();
    let area = 2.0 * h * (inner - 0.5 * (out[0] + out[m_to]));
    if area > 0.0 {
        out.iter_mut().for_each(|x| *x *= v / area);
    }
    out
}

/// Quarter ellipse on `m` segments with area `v`.
fn initial_guess(m: usize, h: f64, v: f64) -> Vec<f64> {
    let radius = m as f64 * h;
    let u: Vec<f64> = (0..=m)
        .map(|i| {
            let x = i as f64 * h;
            (radius * radius - x * x).max(0.0).sqrt()
        })
        .collect();
    resample(&u, m, h, v)
}

/// Minimizes the discretized functional over nonnegative profiles.
///
/// A report with `converged = false` is returned, not an error, when the
/// Newton iterations stop short of `step_tol`.
///
/// The search runs at unit area and the result is carried to area `v` by
/// the intrinsic dilation, so tolerances do not depend on `v`.
pub fn minimize(problem: &DiscreteProblem) -> Result<SolverReport> {
    problem.validate()?;
    let a = problem.alpha.value();
    let lambda = problem.v.powf(1.0 / (a + 2.0));
    let (sx, sy) = match problem.orientation {
        Orientation::Vertical => (lambda, lambda.powf(a + 1.0)),
        Orientation::Horizontal => (lambda.powf(a + 1.0), lambda),
    };
    let unit = DiscreteProblem {
        v: 1.0,
        domain_cap: problem.domain_cap / sx,
        ..*problem
    };
    let (profile, iterations, converged) = minimize_unit(&unit)?;
    let profile = SampledProfile::new(
        profile.xs().iter().map(|x| x * sx).collect(),
        profile.ys().iter().map(|y| y * sy).collect(),
    )?;
    build_report(problem, profile, iterations, converged)
}

fn minimize_unit(problem: &DiscreteProblem) -> Result<(SampledProfile, usize, bool)> {
    let n = problem.n_grid;
    let h = problem.domain_cap / n as f64;
    let min_m = 8;
    let mut best_m = n / 2;
    let mut best = solve_support(problem, best_m, &initial_guess(best_m, h, problem.v));
    let mut iterations = best.iterations;
    let mut step = (n / 16).max(1);
    loop {
        let mut improved = false;
        for cand in [best_m + step, best_m.saturating_sub(step)] {
            if cand < min_m || cand > n || cand == best_m {
                continue;
            }
            let start = resample(&best.u, cand, h, problem.v);
            let sol = solve_support(problem, cand, &start);
            iterations += sol.iterations;
            if sol.perimeter < best.perimeter {
                best = sol;
                best_m = cand;
                improved = true;
                break;
            }
        }
        if !improved {
            if step == 1 {
                break;
            }
            step /= 2;
        }
    }

    let xs: Vec<f64> = (0..=best_m).map(|i| i as f64 * h).collect();
    let profile = SampledProfile::new(xs, best.u.clone())?;
    Ok((profile, iterations, best.converged))
}

fn build_report(problem: &DiscreteProblem, profile: SampledProfile, iterations: usize, converged: bool) -> Result<SolverReport> {
    let spec = QuadratureSpec::default();
    let alpha = problem.alpha;
    let ys = profile.ys();
    let (first, last) = (ys[0], ys[ys.len() - 1]);
    let perimeter = match problem.orientation {
        Orientation::Vertical => 2.0 * first + 4.0 * last + 4.0 * alpha_length_of_graph_over_x(&profile, alpha, &spec)?,
        Orientation::Horizontal => {
            let p = alpha.value() + 1.0;
            2.0 * first.powf(p) / p + 4.0 * last.powf(p) / p + 4.0 * alpha_length_of_graph_over_y(&profile, alpha, &spec)?
        }
    };
    let area = 2.0 * crate::geometry::area_under_profile(&profile);
    let floor = 1e-6 * ys.iter().fold(0.0f64, |m, &y| m.max(y));
    let support_radius = profile
        .xs()
        .iter()
        .zip(ys)
        .filter(|(_, &y)| y > floor)
        .map(|(&x, _)| x)
        .fold(0.0, f64::max);
    let euler_lagrange_residual = match problem.orientation {
        Orientation::Vertical => euler_lagrange_fit_profile(&profile, support_radius, alpha)
            .map(|(_, _, r)| r)
            .unwrap_or(f64::NAN),
        Orientation::Horizontal => horizontal_euler_lagrange_residual(&profile, support_radius, alpha).unwrap_or(f64::NAN),
    };
    Ok(SolverReport {
        orientation: problem.orientation,
        profile,
        perimeter,
        area,
        support_radius,
        euler_lagrange_residual,
        iterations,
        converged,
    })
}

/// Central-difference derivatives at the interior samples whose abscissa
/// lies in `[lo, hi]`, as `(x, y, y')`.
fn central_differences(profile: &SampledProfile, lo: f64, hi: f64) -> Vec<(f64, f64, f64)> {
    let xs = profile.xs();
    let ys = profile.ys();
    (1..xs.len() - 1)
        .filter(|&i| xs[i] >= lo && xs[i] <= hi)
        .map(|i| {
            let (hl, hr) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
            // second-order on nonuniform grids
            let d = (ys[i + 1] * hl * hl - ys[i - 1] * hr * hr + ys[i] * (hr * hr - hl * hl)) / (hl * hr * (hl + hr));
            (xs[i], ys[i], d)
        })
        .collect()
}

/// Least-squares fit of `y = c0 + c1 x + ... + c_deg x^deg`.
fn polyfit(points: &[(f64, f64)], deg: usize) -> Vec<f64> {
    let k = deg + 1;
    let mut ata = vec![vec![0.0; k]; k];
    let mut aty = vec![0.0; k];
    let scale = points.iter().fold(0.0f64, |s, p| s.max(p.0.abs())).max(f64::MIN_POSITIVE);
    for &(x, y) in points {
        let t = x / scale;
        let powers: Vec<f64> = (0..k).map(|p| t.powi(p as i32)).collect();
        for r in 0..k {
            aty[r] += powers[r] * y;
            for c in 0..k {
                ata[r][c] += powers[r] * powers[c];
            }
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&a, &b| ata[a][col].abs().total_cmp(&ata[b][col].abs()))
            .unwrap_or(col);
        ata.swap(col, piv);
        aty.swap(col, piv);
        for r in col + 1..k {
            let f = ata[r][col] / ata[col][col];
            for c in col..k {
                ata[r][c] -= f * ata[col][c];
            }
            aty[r] -= f * aty[col];
        }
    }
    let mut coef = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|c| ata[r][c] * coef[c]).sum();
        coef[r] = (aty[r] - s) / ata[r][r];
    }
    coef.iter()
        .enumerate()
        .map(|(p, c)| c / scale.powi(p as i32))
        .collect()
}

/// Fits `f'/sqrt(f'^2 + x^(2 alpha)) = k x + d` on `[0.05 s, 0.95 s]`,
/// `s` the support radius; returns `(k, d, max |residual|)`.
pub fn euler_lagrange_fit_profile(profile: &SampledProfile, support: f64, alpha: Alpha) -> Result<(f64, f64, f64)> {
    let samples: Vec<(f64, f64)> = central_differences(profile, 0.05 * support, 0.95 * support)
        .into_iter()
        .filter(|&(_, y, _)| y > 1e-6)
        .map(|(x, _, d)| (x, d / d.hypot(alpha.weight(x))))
        .collect();
    if samples.len() < 8 {
        return Err(Error::DegenerateProfile(format!(
            "{} interior points carry positive values, need at least 8",
            samples.len()
        )));
    }
    let c = polyfit(&samples, 1);
    let residual = samples
        .iter()
        .map(|&(x, q)| (q - c[0] - c[1] * x).abs())
        .fold(0.0, f64::max);
    Ok((c[1], c[0], residual))
}

/// The curvature-relation fit for a vertical report.
pub fn euler_lagrange_fit(report: &SolverReport, alpha: Alpha) -> Result<(f64, f64, f64)> {
    if report.orientation != Orientation::Vertical {
        return Err(Error::InvalidInput("curvature fit needs a vertical-interface report".into()));
    }
    euler_lagrange_fit_profile(&report.profile, report.support_radius, alpha)
}

/// Spread of `G' - alpha (g'/g) G` about its mean, with
/// `G = g^(2 alpha) g' / sqrt(1 + g^(2 alpha) g'^2)`; constant for a
/// stationary horizontal profile.
pub fn horizontal_euler_lagrange_residual(profile: &SampledProfile, support: f64, alpha: Alpha) -> Result<f64> {
    let first = central_differences(profile, 0.0, support);
    let big_g: Vec<(f64, f64, f64, f64)> = first
        .iter()
        .filter(|&&(_, g, _)| g > 1e-6)
        .map(|&(y, g, d)| {
            let w = alpha.weight(g);
            (y, g, d, w * w * d / (w * d).hypot(1.0))
        })
        .collect();
    let values: Vec<f64> = big_g
        .windows(3)
        .filter(|w| w[0].0 >= 0.05 * support && w[2].0 <= 0.95 * support)
        .map(|w| {
            let (y0, _, _, g0) = w[0];
            let (_, g, d, g1) = w[1];
            let (y2, _, _, g2) = w[2];
            let dg = (g2 - g0) / (y2 - y0);
            dg - alpha.value() * d / g * g1
        })
        .collect();
    if values.len() < 8 {
        return Err(Error::DegenerateProfile(format!(
            "{} interior points available, need at least 8",
            values.len()
        )));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max))
}

/// Estimates the transformed interface slope `lim f'(x)/x^alpha` (vertical)
/// or `g(0)^alpha g'(0)` (horizontal) from samples near the interface.
///
/// The difference quotient `D(x) = (alpha+1)(f(x) - f(0))/x^(alpha+1)` is
/// smooth in `x` for the stationary profiles, so a quadratic fit on
/// `(0, 0.1 s]` extrapolated to zero recovers the limit.
pub fn transformed_angle_estimate_profile(
    profile: &SampledProfile,
    support: f64,
    alpha: Alpha,
    orientation: Orientation,
) -> Result<f64> {
    let xs = profile.xs();
    let ys = profile.ys();
    if xs[0] != 0.0 {
        return Err(Error::InvalidInput("profile must start at the interface".into()));
    }
    let a = alpha.value();
    let f0 = ys[0];
    let points: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .skip(1)
        .filter(|(&x, _)| x <= 0.1 * support)
        .map(|(&x, &y)| match orientation {
            Orientation::Vertical => (x, (a + 1.0) * (y - f0) / x.powf(a + 1.0)),
            Orientation::Horizontal => (x, alpha.weight(f0) * (y - f0) / x),
        })
        .collect();
    if points.len() < 8 {
        return Err(Error::DegenerateProfile(format!(
            "{} samples in [0, 0.1 s], need at least 8",
            points.len()
        )));
    }
    Ok(polyfit(&points, 2)[0])
}

pub fn transformed_angle_estimate(report: &SolverReport, alpha: Alpha) -> Result<f64> {
    transformed_angle_estimate_profile(&report.profile, report.support_radius, alpha, report.orientation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_tridiagonal() {
        let lower = [0.0, -1.0, -1.0];
        let diag = [2.0, 2.0, 2.0];
        let upper = [-1.0, -1.0, 0.0];
        let x = thomas(&lower, &diag, &upper, &[1.0, 0.0, 1.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(thomas(&lower, &[-1.0, 2.0, 2.0], &upper, &[1.0, 0.0, 1.0]).is_none());
    }

    #[test]
    fn polyfit_recovers_polynomial() {
        let pts: Vec<(f64, f64)> = (0..20).map(|i| {
            let x = i as f64 * 0.1;
            (x, 1.0 - 2.0 * x + 0.5 * x * x)
        }).collect();
        let c = polyfit(&pts, 2);
        assert!((c[0] - 1.0).abs() < 1e-10 && (c[1] + 2.0).abs() < 1e-10 && (c[2] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn graded_rule_integrates_polynomials() {
        let s: f64 = graded_rule().iter().map(|(t, w)| w * t * t).sum();
        assert!((s - 1.0 / 3.0).abs() < 1e-14);
        let s: f64 = unit_rule().iter().map(|(t, w)| w * t.powi(7)).sum();
        assert!((s - 0.125).abs() < 1e-14);
    }

    #[test]
    fn euclidean_functional_matches_polygon_length() {
        let alpha = Alpha::new(0.0).unwrap();
        let f = DiscreteFunctional::new(alpha, Orientation::Vertical, 0.5, 2, 1.0, 1.0);
        let u = [1.0, 1.0, 0.0];
        let expect = 2.0 + 0.0 + 4.0 * (0.5 + (0.25f64 + 1.0).sqrt());
        assert!((f.perimeter(&u) - expect).abs() < 1e-14);
        assert!((f.half_area(&u) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn orientation_parses() {
        assert_eq!("vertical".parse::<Orientation>().unwrap(), Orientation::Vertical);
        assert_eq!("horizontal".parse::<Orientation>().unwrap(), Orientation::Horizontal);
        assert!("diagonal".parse::<Orientation>().is_err());
    }
}
