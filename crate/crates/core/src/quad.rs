//! Adaptive Gauss–Legendre quadrature over real intervals, parametric complex
//! paths and truncated vertical lines.
//!
//! Every panel is integrated with a 16-point rule and an 8-point companion
//! rule; their difference is the panel error estimate. Panels are refined
//! worst-first until the summed estimate meets the requested tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::C64;

const MAX_PANELS: usize = 20_000;
const MAX_BISECT_DEPTH: u32 = 60;
const MAX_GRADE_DEPTH: u32 = 40;
const GRADE_RATIO: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("integrand is not finite at {at}")]
    NonFinite { at: C64 },
    #[error("tolerance {tol:e} not met: best value {} with error estimate {:e}", .best.value, .best.abs_err_est)]
    ToleranceNotMet { best: QuadOutcome, tol: f64 },
    #[error("integrand decays too slowly along the vertical line (height {height})")]
    SlowDecay { height: f64, best: QuadOutcome },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
}

impl QuadError {
    /// Best available estimate when the failure still produced one.
    pub fn best(&self) -> Option<QuadOutcome> {
        match self {
            QuadError::ToleranceNotMet { best, .. } | QuadError::SlowDecay { best, .. } => {
                Some(*best)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    pub value: C64,
    pub abs_err_est: f64,
    pub n_evals: usize,
}

impl QuadOutcome {
    pub fn scale(self, k: C64) -> Self {
        QuadOutcome {
            value: self.value * k,
            abs_err_est: self.abs_err_est * k.norm(),
            n_evals: self.n_evals,
        }
    }
}

/// Vertical line `Re s = c`, truncated at a height that doubles from
/// `initial_height` until the added strip is negligible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalLineSpec {
    pub c: f64,
    pub initial_height: f64,
    pub max_height: f64,
    pub panel_order: usize,
}

impl VerticalLineSpec {
    pub fn new(c: f64) -> Self {
        VerticalLineSpec {
            c,
            initial_height: 16.0,
            max_height: 16.0 * 2f64.powi(16),
            panel_order: 16,
        }
    }
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn legendre_rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn rule16() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| legendre_rule(16))
}

fn rule8() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| legendre_rule(8))
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: C64,
    comp: C64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: C64) {
        let (s, c) = two_sum(self.sum.re, v.re);
        let (t, d) = two_sum(self.sum.im, v.im);
        self.sum = C64::new(s, t);
        self.comp += C64::new(c, d);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let c = if a.abs() >= b.abs() {
        (a - s) + b
    } else {
        (b - s) + a
    };
    (s, c)
}

type PathFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// One smooth piece of a path: a map `u ∈ [0,1] → z` and its derivative.
#[derive(Clone)]
pub struct Segment {
    map: PathFn,
    deriv: PathFn,
}

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Segment")
            .field("start", &self.point(0.0))
            .field("end", &self.point(1.0))
            .finish()
    }
}

impl Segment {
    pub fn new(
        map: impl Fn(f64) -> C64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Segment {
            map: Arc::new(map),
            deriv: Arc::new(deriv),
        }
    }

    pub fn line(a: C64, b: C64) -> Self {
        let d = b - a;
        Segment::new(move |u| a + d * u, move |_| d)
    }

    /// Circular arc `center + radius·e^{iφ}` for φ from `from` to `to`.
    pub fn arc(center: C64, radius: f64, from: f64, to: f64) -> Self {
        let span = to - from;
        Segment::new(
            move |u| center + C64::from_polar(radius, from + span * u),
            move |u| C64::i() * span * C64::from_polar(radius, from + span * u),
        )
    }

    /// Ray from `start` to infinity along `dir`, with `u/(1−u)` stretching
    /// at length scale `scale`.
    pub fn ray(start: C64, dir: C64, scale: f64) -> Self {
        let d = dir / dir.norm() * scale;
        Segment::new(
            move |u| start + d * (u / (1.0 - u)),
            move |u| d / ((1.0 - u) * (1.0 - u)),
        )
    }

    pub fn point(&self, u: f64) -> C64 {
        (self.map)(u)
    }

    pub fn velocity(&self, u: f64) -> C64 {
        (self.deriv)(u)
    }

    pub fn reversed(&self) -> Self {
        let map = Arc::clone(&self.map);
        let deriv = Arc::clone(&self.deriv);
        Segment {
            map: Arc::new(move |u| map(1.0 - u)),
            deriv: Arc::new(move |u| -deriv(1.0 - u)),
        }
    }

    /// The sub-segment covering parameters `[u0, u1]`, reparametrised to `[0,1]`.
    pub fn restricted(&self, u0: f64, u1: f64) -> Self {
        let map = Arc::clone(&self.map);
        let deriv = Arc::clone(&self.deriv);
        let w = u1 - u0;
        Segment {
            map: Arc::new(move |u| map(u0 + w * u)),
            deriv: Arc::new(move |u| deriv(u0 + w * u) * w),
        }
    }
}

/// Piecewise-parametric oriented path.
#[derive(Clone, Debug)]
pub struct ContourPath {
    segments: Vec<Segment>,
    closed: bool,
}

const JOIN_TOL: f64 = 1e-12;

impl ContourPath {
    pub fn new(segments: Vec<Segment>, closed: bool) -> Result<Self, QuadError> {
        if segments.is_empty() {
            return Err(QuadError::InvalidPath("no segments".into()));
        }
        for (i, pair) in segments.windows(2).enumerate() {
            let (end, start) = (pair[0].point(1.0), pair[1].point(0.0));
            if end.is_finite() && start.is_finite() && !joins(end, start) {
                return Err(QuadError::InvalidPath(format!(
                    "segment {i} ends at {end} but segment {} starts at {start}",
                    i + 1
                )));
            }
        }
        if closed {
            let (end, start) = (
                segments[segments.len() - 1].point(1.0),
                segments[0].point(0.0),
            );
            if !(end.is_finite() && start.is_finite() && joins(end, start)) {
                return Err(QuadError::InvalidPath(format!(
                    "closed path ends at {end} but starts at {start}"
                )));
            }
        }
        for (i, seg) in segments.iter().enumerate() {
            for k in 0..=16 {
                let u = (k as f64 / 16.0).clamp(1e-9, 1.0 - 1e-9);
                let v = seg.velocity(u);
                if !(v.norm() > 0.0) {
                    return Err(QuadError::InvalidPath(format!(
                        "segment {i} has vanishing derivative at u = {u}"
                    )));
                }
            }
        }
        Ok(ContourPath { segments, closed })
    }

    /// Straight segments through `points`, closing back to the first point if requested.
    pub fn polyline(points: &[C64], closed: bool) -> Result<Self, QuadError> {
        if points.len() < 2 {
            return Err(QuadError::InvalidPath("polyline needs two points".into()));
        }
        let mut segs: Vec<Segment> = points
            .windows(2)
            .map(|w| Segment::line(w[0], w[1]))
            .collect();
        if closed {
            segs.push(Segment::line(points[points.len() - 1], points[0]));
        }
        ContourPath::new(segs, closed)
    }

    pub fn circle(center: C64, radius: f64) -> Self {
        ContourPath {
            segments: vec![Segment::arc(center, radius, 0.0, 2.0 * PI)],
            closed: true,
        }
    }

    /// Upward vertical line `Re s = c` split at the given heights.
    pub fn vertical_line(c: f64, breaks: &[f64], scale: f64) -> Self {
        let mut ys: Vec<f64> = breaks.to_vec();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        if ys.is_empty() {
            ys.push(0.0);
        }
        let lo = C64::new(c, ys[0]);
        let hi = C64::new(c, ys[ys.len() - 1]);
        let mut segs = vec![Segment::ray(lo, C64::new(0.0, -1.0), scale).reversed()];
        for w in ys.windows(2) {
            segs.push(Segment::line(C64::new(c, w[0]), C64::new(c, w[1])));
        }
        segs.push(Segment::ray(hi, C64::new(0.0, 1.0), scale));
        ContourPath {
            segments: segs,
            closed: false,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn reversed(&self) -> Self {
        ContourPath {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            closed: self.closed,
        }
    }

    /// Splits segment `index` at parameter `u` into two segments.
    pub fn split_segment(&self, index: usize, u: f64) -> Self {
        let mut segs = Vec::with_capacity(self.segments.len() + 1);
        for (i, s) in self.segments.iter().enumerate() {
            if i == index {
                segs.push(s.restricted(0.0, u));
                segs.push(s.restricted(u, 1.0));
            } else {
                segs.push(s.clone());
            }
        }
        ContourPath {
            segments: segs,
            closed: self.closed,
        }
    }

    /// Concatenation of two paths; the result is closed when requested.
    pub fn join(&self, other: &ContourPath, closed: bool) -> Result<Self, QuadError> {
        let mut segs = self.segments.clone();
        segs.extend(other.segments.iter().cloned());
        ContourPath::new(segs, closed)
    }

    /// Winding number of a closed path around `z`, by accumulated argument.
    pub fn winding_number(&self, z: C64) -> i64 {
        const SAMPLES: usize = 4096;
        let mut total = 0.0;
        let mut prev: Option<f64> = None;
        for seg in &self.segments {
            for k in 0..=SAMPLES {
                let u = k as f64 / SAMPLES as f64;
                let p = seg.point(u);
                if !p.is_finite() {
                    continue;
                }
                let a = (p - z).arg();
                if let Some(pa) = prev {
                    let mut d = a - pa;
                    while d > PI {
                        d -= 2.0 * PI;
                    }
                    while d < -PI {
                        d += 2.0 * PI;
                    }
                    total += d;
                }
                prev = Some(a);
            }
        }
        (total / (2.0 * PI)).round() as i64
    }
}

fn joins(a: C64, b: C64) -> bool {
    (a - b).norm() <= JOIN_TOL * (1.0 + a.norm().max(b.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Grade {
    None,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    seg: usize,
    a: f64,
    b: f64,
    value: C64,
    err: f64,
    abs: f64,
    grade: Grade,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seg.cmp(&self.seg))
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn eval_panel<G>(g: &G, seg: usize, a: f64, b: f64) -> Result<(C64, f64, f64), f64>
where
    G: Fn(usize, f64) -> C64,
{
    let (r16, r8) = (rule16(), rule8());
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s16 = CompensatedSum::new();
    let mut abs = 0.0;
    for (x, w) in r16.nodes.iter().zip(&r16.weights) {
        let u = m + h * x;
        let v = g(seg, u);
        if !v.is_finite() {
            return Err(u);
        }
        s16.add(v * *w);
        abs += w * v.norm();
    }
    let mut s8 = CompensatedSum::new();
    for (x, w) in r8.nodes.iter().zip(&r8.weights) {
        let u = m + h * x;
        let v = g(seg, u);
        if !v.is_finite() {
            return Err(u);
        }
        s8.add(v * *w);
    }
    let v16 = s16.value() * h;
    let v8 = s8.value() * h;
    Ok((v16, (v16 - v8).norm(), abs * h.abs()))
}

const EVALS_PER_PANEL: usize = 24;

struct Adaptive {
    panels: Vec<Panel>,
    outcome: QuadOutcome,
    converged: bool,
}

fn adaptive<G, P>(
    g: &G,
    locate: &P,
    starts: &[(usize, f64, f64, Grade)],
    tol: f64,
) -> Result<Adaptive, QuadError>
where
    G: Fn(usize, f64) -> C64,
    P: Fn(usize, f64) -> C64,
{
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(QuadError::InvalidTolerance(tol));
    }
    let non_finite = |seg: usize, u: f64| QuadError::NonFinite { at: locate(seg, u) };
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut n_evals = 0usize;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for &(seg, a, b, grade) in starts {
        let (value, err, abs) = eval_panel(g, seg, a, b).map_err(|u| non_finite(seg, u))?;
        n_evals += EVALS_PER_PANEL;
        total_err += err;
        total_abs += abs;
        heap.push(Panel {
            seg,
            a,
            b,
            value,
            err,
            abs,
            grade,
            depth: 0,
        });
    }
    let mut converged = false;
    loop {
        let floor = 64.0 * f64::EPSILON * total_abs;
        if total_err <= tol.max(floor) {
            converged = true;
            break;
        }
        if heap.len() + frozen.len() >= MAX_PANELS {
            break;
        }
        let Some(p) = heap.pop() else { break };
        let width_ok =
            (p.b - p.a).abs() > (4.0 * f64::EPSILON * p.a.abs().max(p.b.abs())).max(1e-290);
        let depth_limit = match p.grade {
            Grade::None => MAX_BISECT_DEPTH,
            _ => MAX_GRADE_DEPTH,
        };
        if p.err <= 64.0 * f64::EPSILON * p.abs || p.depth >= depth_limit || !width_ok {
            frozen.push(p);
            continue;
        }
        let (cut, left_grade, right_grade) = match p.grade {
            Grade::Left => (p.a + GRADE_RATIO * (p.b - p.a), Grade::Left, Grade::None),
            Grade::Right => (p.b - GRADE_RATIO * (p.b - p.a), Grade::None, Grade::Right),
            Grade::None => (0.5 * (p.a + p.b), Grade::None, Grade::None),
        };
        total_err -= p.err;
        total_abs -= p.abs;
        for (a, b, grade) in [(p.a, cut, left_grade), (cut, p.b, right_grade)] {
            let (value, err, abs) = eval_panel(g, p.seg, a, b).map_err(|u| non_finite(p.seg, u))?;
            n_evals += EVALS_PER_PANEL;
            total_err += err;
            total_abs += abs;
            heap.push(Panel {
                seg: p.seg,
                a,
                b,
                value,
                err,
                abs,
                grade,
                depth: p.depth + 1,
            });
        }
    }
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|x, y| x.seg.cmp(&y.seg).then(x.a.total_cmp(&y.a)));
    let mut sum = CompensatedSum::new();
    let mut err = 0.0;
    for p in &panels {
        sum.add(p.value);
        err += p.err;
    }
    let outcome = QuadOutcome {
        value: sum.value(),
        abs_err_est: err,
        n_evals,
    };
    Ok(Adaptive {
        panels,
        outcome,
        converged,
    })
}

fn finish(run: Adaptive, tol: f64) -> Result<QuadOutcome, QuadError> {
    if run.converged {
        Ok(run.outcome)
    } else {
        Err(QuadError::ToleranceNotMet {
            best: run.outcome,
            tol,
        })
    }
}

/// `∫_path f(z) dz`.
pub fn integrate_contour<F>(f: F, path: &ContourPath, tol: f64) -> Result<QuadOutcome, QuadError>
where
    F: Fn(C64) -> C64,
{
    let segs = path.segments();
    let g = |i: usize, u: f64| {
        let s = &segs[i];
        f(s.point(u)) * s.velocity(u)
    };
    let locate = |i: usize, u: f64| segs[i].point(u);
    let starts: Vec<_> = (0..segs.len())
        .map(|i| (i, 0.0, 1.0, Grade::None))
        .collect();
    finish(adaptive(&g, &locate, &starts, tol)?, tol)
}

/// `∫_a^b f(u) du` with geometric grading towards both endpoints.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadOutcome, QuadError>
where
    F: Fn(f64) -> C64,
{
    if !(a < b) {
        return Err(QuadError::InvalidPath(format!("empty interval [{a}, {b}]")));
    }
    let g = |_: usize, u: f64| f(u);
    let locate = |_: usize, u: f64| C64::new(u, 0.0);
    let m = 0.5 * (a + b);
    let starts = [(0, a, m, Grade::Left), (0, m, b, Grade::Right)];
    finish(adaptive(&g, &locate, &starts, tol)?, tol)
}

/// `∫_{c−i∞}^{c+i∞} f(s) ds`, truncated by height doubling.
pub fn integrate_vertical<F>(
    f: F,
    spec: &VerticalLineSpec,
    tol: f64,
) -> Result<QuadOutcome, QuadError>
where
    F: Fn(C64) -> C64,
{
    let c = spec.c;
    let g = |_: usize, y: f64| f(C64::new(c, y)) * C64::i();
    let locate = |_: usize, y: f64| C64::new(c, y);
    let mut t = spec.initial_height;
    let core = adaptive(
        &g,
        &locate,
        &[(0, -t, 0.0, Grade::None), (0, 0.0, t, Grade::None)],
        0.5 * tol,
    )?;
    let mut converged = core.converged;
    let mut total = CompensatedSum::new();
    total.add(core.outcome.value);
    let mut err = core.outcome.abs_err_est;
    let mut n_evals = core.outcome.n_evals;
    loop {
        let ring = adaptive(
            &g,
            &locate,
            &[(0, -2.0 * t, -t, Grade::None), (0, t, 2.0 * t, Grade::None)],
            0.125 * tol,
        )?;
        converged &= ring.converged;
        total.add(ring.outcome.value);
        err += ring.outcome.abs_err_est;
        n_evals += ring.outcome.n_evals;
        t *= 2.0;
        let contrib = ring.outcome.value.norm();
        if contrib <= 0.125 * tol * total.value().norm().max(1.0) {
            err += contrib;
            break;
        }
        if t >= spec.max_height {
            return Err(QuadError::SlowDecay {
                height: t,
                best: QuadOutcome {
                    value: total.value(),
                    abs_err_est: err + contrib,
                    n_evals,
                },
            });
        }
    }
    let outcome = QuadOutcome {
        value: total.value(),
        abs_err_est: err,
        n_evals,
    };
    if converged {
        Ok(outcome)
    } else {
        Err(QuadError::ToleranceNotMet { best: outcome, tol })
    }
}

/// Fixed nodes and weights on a path, read off an adaptive run so that
/// many integrands sharing the path can reuse the same discretisation.
#[derive(Debug, Clone)]
pub struct NodeRule {
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
    /// Error estimate of the integral used to build the rule.
    pub build_err: f64,
}

impl NodeRule {
    /// Builds the rule from an adaptive integration of `f` along `path`,
    /// then bisects panels until each is no longer than `max_len` times its
    /// distance to the nearest of `keep_away` (a resolution guard for
    /// Cauchy-type integrands `f(z)/(z − t)`).
    pub fn from_adaptive<F>(
        f: F,
        path: &ContourPath,
        tol: f64,
        keep_away: &[C64],
        max_len: f64,
    ) -> Result<(Self, QuadOutcome), QuadError>
    where
        F: Fn(C64) -> C64,
    {
        let segs = path.segments();
        let g = |i: usize, u: f64| {
            let s = &segs[i];
            f(s.point(u)) * s.velocity(u)
        };
        let locate = |i: usize, u: f64| segs[i].point(u);
        let starts: Vec<_> = (0..segs.len())
            .map(|i| (i, 0.0, 1.0, Grade::None))
            .collect();
        let run = adaptive(&g, &locate, &starts, tol)?;
        let outcome = run.outcome;
        let converged = run.converged;
        let mut work: Vec<(usize, f64, f64)> =
            run.panels.iter().map(|p| (p.seg, p.a, p.b)).collect();
        let mut done: Vec<(usize, f64, f64)> = Vec::new();
        while let Some((seg, a, b)) = work.pop() {
            let za = segs[seg].point(a);
            let zb = segs[seg].point(b);
            let len = if za.is_finite() && zb.is_finite() {
                (zb - za).norm()
            } else {
                f64::INFINITY
            };
            let zm = segs[seg].point(0.5 * (a + b));
            let dist = keep_away
                .iter()
                .map(|t| (zm - t).norm() - 0.5 * len)
                .fold(f64::INFINITY, f64::min);
            if !keep_away.is_empty()
                && len > max_len * dist.max(0.0)
                && (b - a) > 1e-12
                && done.len() + work.len() < MAX_PANELS
            {
                let m = 0.5 * (a + b);
                work.push((seg, a, m));
                work.push((seg, m, b));
            } else {
                done.push((seg, a, b));
            }
        }
        done.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let r16 = rule16();
        let mut nodes = Vec::with_capacity(done.len() * 16);
        let mut weights = Vec::with_capacity(done.len() * 16);
        for (seg, a, b) in done {
            let m = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            for (x, w) in r16.nodes.iter().zip(&r16.weights) {
                let u = m + h * x;
                nodes.push(segs[seg].point(u));
                weights.push(segs[seg].velocity(u) * (h * w));
            }
        }
        let rule = NodeRule {
            nodes,
            weights,
            build_err: outcome.abs_err_est,
        };
        if converged {
            Ok((rule, outcome))
        } else {
            Err(QuadError::ToleranceNotMet { best: outcome, tol })
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply(&self, f: impl Fn(C64) -> C64) -> C64 {
        let mut sum = CompensatedSum::new();
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            sum.add(f(*z) * w);
        }
        sum.value()
    }
}
