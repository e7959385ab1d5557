use std::fmt;
use std::sync::Arc;

use super::chart::{from_u, tail_ladder, to_u, uniform_u_grid, ExtendedReal};
use crate::error::{Error, Result, Side};
use crate::numerics::golden_max;

/// A pure real function of a real variable, shareable across threads.
pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Boxes a closure as an [`Evaluator`].
pub fn evaluator<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Evaluator {
    Arc::new(f)
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_DEPTH: u32 = 40;
/// Number of cells of the uniform audit grid in the compact coordinate.
pub const AUDIT_CELLS: usize = 1024;
const EXTREMA_CELLS: usize = 4096;
const EXTREMA_CANDIDATES: usize = 48;

/// An element of `C⁰([-∞, ∞])`: an evaluator on the finite line together with
/// its two limits at infinity.
///
/// `knots` lists finite abscissae where the function is known to have kinks or
/// other features; grids used by norms and comparisons always include them.
#[derive(Clone)]
pub struct ContinuousFunctionBar {
    eval: Evaluator,
    limit_neg: f64,
    limit_pos: f64,
    knots: Arc<Vec<f64>>,
}

impl fmt::Debug for ContinuousFunctionBar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousFunctionBar")
            .field("limit_neg", &self.limit_neg)
            .field("limit_pos", &self.limit_pos)
            .field("knots", &self.knots.len())
            .finish()
    }
}

/// Location and value of the maximum and minimum over `[-∞, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub max: f64,
    pub argmax: ExtendedReal,
    pub min: f64,
    pub argmin: ExtendedReal,
}

impl ContinuousFunctionBar {
    /// Membership gate for `C⁰(ℝ̄)`: runs the tail audit at both ends and the
    /// continuity audit on the compact grid.
    pub fn build(eval: Evaluator, limit_neg: f64, limit_pos: f64, tol: f64) -> Result<Self> {
        Self::build_with_depth(eval, limit_neg, limit_pos, tol, DEFAULT_DEPTH)
    }

    pub fn build_with_depth(
        eval: Evaluator,
        limit_neg: f64,
        limit_pos: f64,
        tol: f64,
        depth: u32,
    ) -> Result<Self> {
        if !limit_neg.is_finite() {
            return Err(Error::NoLimitAtInfinity { side: Side::Negative, deviation: f64::INFINITY });
        }
        if !limit_pos.is_finite() {
            return Err(Error::NoLimitAtInfinity { side: Side::Positive, deviation: f64::INFINITY });
        }
        audit_tail(&*eval, Side::Negative, limit_neg, tol, depth)?;
        audit_tail(&*eval, Side::Positive, limit_pos, tol, depth)?;
        let f = Self::trusted(eval, limit_neg, limit_pos);
        let grid = uniform_u_grid(AUDIT_CELLS);
        audit_continuity(&|u| f.eval_u(u), &grid, tol, depth)
            .map_err(|(u, oscillation)| Error::NotContinuous { at: from_u(u), oscillation })?;
        Ok(f)
    }

    /// Wraps an evaluator that is continuous by construction; no audit runs.
    pub fn trusted(eval: Evaluator, limit_neg: f64, limit_pos: f64) -> Self {
        ContinuousFunctionBar { eval, limit_neg, limit_pos, knots: Arc::new(Vec::new()) }
    }

    pub fn constant(c: f64) -> Self {
        Self::trusted(evaluator(move |_| c), c, c)
    }

    pub fn with_knots<I: IntoIterator<Item = f64>>(mut self, knots: I) -> Self {
        let mut k: Vec<f64> = self.knots.iter().copied().chain(knots).filter(|x| x.is_finite()).collect();
        k.sort_by(f64::total_cmp);
        k.dedup();
        self.knots = Arc::new(k);
        self
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn limit_neg(&self) -> f64 {
        self.limit_neg
    }

    pub fn limit_pos(&self) -> f64 {
        self.limit_pos
    }

    /// Value at `x`; `±inf` return the stored limits.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            self.limit_pos
        } else if x == f64::NEG_INFINITY {
            self.limit_neg
        } else {
            (self.eval)(x)
        }
    }

    pub fn at(&self, x: ExtendedReal) -> f64 {
        self.eval(x.to_f64())
    }

    #[inline]
    pub(crate) fn eval_u(&self, u: f64) -> f64 {
        self.eval(from_u(u))
    }

    /// The evaluator extended to `±inf` inputs.
    pub fn evaluator(&self) -> Evaluator {
        let f = self.clone();
        evaluator(move |x| f.eval(x))
    }

    /// Pointwise `h ∘ F` for continuous `h`.
    pub fn map<H: Fn(f64) -> f64 + Send + Sync + 'static>(&self, h: H) -> Self {
        let f = self.clone();
        let h = Arc::new(h);
        let h2 = h.clone();
        ContinuousFunctionBar {
            eval: evaluator(move |x| h2(f.eval(x))),
            limit_neg: h(self.limit_neg),
            limit_pos: h(self.limit_pos),
            knots: self.knots.clone(),
        }
    }

    /// Pointwise `h(F, G)` for continuous `h`.
    pub fn zip<H: Fn(f64, f64) -> f64 + Send + Sync + 'static>(&self, other: &Self, h: H) -> Self {
        let (f, g) = (self.clone(), other.clone());
        let h = Arc::new(h);
        let h2 = h.clone();
        ContinuousFunctionBar {
            eval: evaluator(move |x| h2(f.eval(x), g.eval(x))),
            limit_neg: h(self.limit_neg, other.limit_neg),
            limit_pos: h(self.limit_pos, other.limit_pos),
            knots: Arc::new(Vec::new()),
        }
        .with_knots(self.knots.iter().chain(other.knots.iter()).copied())
    }

    /// `x ↦ F(x - t)`.
    pub fn shifted(&self, t: f64) -> Self {
        let f = self.clone();
        ContinuousFunctionBar {
            eval: evaluator(move |x| f.eval(x - t)),
            limit_neg: self.limit_neg,
            limit_pos: self.limit_pos,
            knots: Arc::new(self.knots.iter().map(|k| k + t).collect()),
        }
    }

    /// Sampling abscissae in the compact coordinate: a uniform grid with
    /// `cells` cells plus every knot, sorted.
    pub(crate) fn sample_u(&self, cells: usize) -> Vec<f64> {
        let mut pts = if cells == 0 { vec![-1.0, 1.0] } else { uniform_u_grid(cells) };
        pts.extend(self.knots.iter().map(|&k| to_u(k)));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Maximum and minimum over `[-∞, ∞]`, limits included.
    pub fn extrema(&self, _tol: f64) -> Result<Extrema> {
        let pts = self.sample_u(EXTREMA_CELLS);
        let (umax, max) = refine_max(&|u| self.eval_u(u), &pts)?;
        let (umin, negmin) = refine_max(&|u| -self.eval_u(u), &pts)?;
        Ok(Extrema {
            max,
            argmax: ExtendedReal::from_f64(from_u(umax)),
            min: -negmin,
            argmin: ExtendedReal::from_f64(from_u(umin)),
        })
    }

    /// `max_{ℝ̄} |F|`.
    pub fn sup_norm(&self, tol: f64) -> Result<f64> {
        let e = self.extrema(tol)?;
        Ok(e.max.abs().max(e.min.abs()))
    }
}

/// Constructs an element of `C⁰(ℝ̄)` after auditing continuity and limits.
pub fn build_continuous(eval: Evaluator, limit_neg: f64, limit_pos: f64, tol: f64) -> Result<ContinuousFunctionBar> {
    ContinuousFunctionBar::build(eval, limit_neg, limit_pos, tol)
}

/// `‖F‖_∞` over the extended line.
pub fn sup_norm(f: &ContinuousFunctionBar, tol: f64) -> Result<f64> {
    f.sup_norm(tol)
}

/// Maximises `f` given sorted sample points: every local maximum among the
/// samples (the best few) is polished by golden-section search between its
/// neighbours.
pub(crate) fn refine_max(f: &dyn Fn(f64) -> f64, pts: &[f64]) -> Result<(f64, f64)> {
    let vals: Vec<f64> = pts.iter().map(|&p| f(p)).collect();
    if let Some(i) = vals.iter().position(|v| v.is_nan()) {
        return Err(Error::Eval(from_u(pts[i])));
    }
    let n = pts.len();
    let mut cands: Vec<usize> = (0..n)
        .filter(|&i| (i == 0 || vals[i] >= vals[i - 1]) && (i + 1 == n || vals[i] >= vals[i + 1]))
        .collect();
    cands.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    cands.truncate(EXTREMA_CANDIDATES);
    let mut best = (pts[cands[0]], vals[cands[0]]);
    for &i in &cands {
        let lo = pts[i.saturating_sub(1)];
        let hi = pts[(i + 1).min(n - 1)];
        if hi > lo {
            let (x, v) = golden_max(f, lo, hi, 200);
            if v > best.1 {
                best = (x, v);
            }
        }
    }
    Ok(best)
}

/// Maximum and minimum of `f` on the finite interval `[a, b]`.
pub(crate) fn extrema_on_interval(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64)> {
    if a == b {
        let v = f(a);
        return Ok((v, v));
    }
    let pts: Vec<f64> = (0..=1024).map(|i| a + (b - a) * i as f64 / 1024.0).collect();
    let (_, max) = refine_max(f, &pts)?;
    let (_, negmin) = refine_max(&|x| -f(x), &pts)?;
    Ok((max, -negmin))
}

/// Tail audit: along the ladder `±(2^k - 1)`, the final four points must lie
/// within `tol` of the claimed limit.
pub(crate) fn audit_tail(f: &dyn Fn(f64) -> f64, side: Side, limit: f64, tol: f64, depth: u32) -> Result<()> {
    let sign = if side == Side::Positive { 1.0 } else { -1.0 };
    let ladder: Vec<f64> = tail_ladder(depth).collect();
    let tail = &ladder[ladder.len().saturating_sub(4)..];
    let mut worst: f64 = 0.0;
    for &x in tail {
        let v = f(sign * x);
        let dev = (v - limit).abs();
        if !dev.is_finite() {
            return Err(Error::NoLimitAtInfinity { side, deviation: f64::INFINITY });
        }
        worst = worst.max(dev);
    }
    if worst < tol {
        Ok(())
    } else {
        Err(Error::NoLimitAtInfinity { side, deviation: worst })
    }
}

/// Estimates `lim F` at one end from the same ladder: the last four steps must
/// be Cauchy within `tol`.
pub(crate) fn detect_limit(f: &dyn Fn(f64) -> f64, side: Side, tol: f64, depth: u32) -> Result<f64> {
    let sign = if side == Side::Positive { 1.0 } else { -1.0 };
    let vals: Vec<f64> = tail_ladder(depth).map(|x| f(sign * x)).collect();
    let n = vals.len();
    if n < 5 {
        return Err(Error::NoLimitAtInfinity { side, deviation: f64::INFINITY });
    }
    let mut worst: f64 = 0.0;
    for w in vals[n - 5..].windows(2) {
        let d = (w[1] - w[0]).abs();
        if !d.is_finite() {
            return Err(Error::NoLimitAtInfinity { side, deviation: f64::INFINITY });
        }
        worst = worst.max(d);
    }
    if worst < tol {
        Ok(vals[n - 1])
    } else {
        Err(Error::NoLimitAtInfinity { side, deviation: worst })
    }
}

/// Oscillation audit on a sorted grid in some coordinate `s`. Each cell is
/// bisected along the child with the larger oscillation until the oscillation
/// drops below `tol`; if the depth cap is reached while the oscillation has
/// not halved over the last eight refinements the cell holds a jump.
pub(crate) fn audit_continuity(
    f: &dyn Fn(f64) -> f64,
    grid: &[f64],
    tol: f64,
    depth: u32,
) -> std::result::Result<(), (f64, f64)> {
    let vals: Vec<f64> = grid.iter().map(|&s| f(s)).collect();
    for (i, v) in vals.iter().enumerate() {
        if !v.is_finite() {
            return Err((grid[i], f64::INFINITY));
        }
    }
    for i in 0..grid.len().saturating_sub(1) {
        let (mut l, mut r, mut fl, mut fr) = (grid[i], grid[i + 1], vals[i], vals[i + 1]);
        let mut history: Vec<f64> = Vec::with_capacity(depth as usize + 1);
        for level in 0..=depth {
            let m = 0.5 * (l + r);
            let degenerate = m <= l || m >= r;
            let fm = if degenerate { fl } else { f(m) };
            if !fm.is_finite() {
                return Err((m, f64::INFINITY));
            }
            let osc_l = (fl - fm).abs();
            let osc_r = (fm - fr).abs();
            let osc = osc_l.max(osc_r).max((fl - fr).abs());
            if osc <= tol {
                break;
            }
            history.push(osc);
            if level == depth || degenerate {
                let k = history.len();
                let halving = k > 8 && osc <= 0.5 * history[k - 9];
                if !halving {
                    return Err((m, osc));
                }
                break;
            }
            if osc_l >= osc_r {
                r = m;
                fr = fm;
            } else {
                l = m;
                fl = fm;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn atan_bar() -> Result<ContinuousFunctionBar> {
        build_continuous(evaluator(f64::atan), -FRAC_PI_2, FRAC_PI_2, DEFAULT_TOL)
    }

    #[test]
    fn arctan_is_accepted() {
        assert!(atan_bar().is_ok());
    }

    #[test]
    fn exponential_has_no_limit() {
        for (ln, lp) in [(0.0, 0.0), (0.0, 1e300), (0.0, 5.0)] {
            let e = build_continuous(evaluator(f64::exp), ln, lp, DEFAULT_TOL).unwrap_err();
            assert!(matches!(e, Error::NoLimitAtInfinity { side: Side::Positive, .. }), "{e:?}");
        }
    }

    #[test]
    fn sine_has_no_limit() {
        let e = build_continuous(evaluator(f64::sin), 0.0, 0.0, DEFAULT_TOL).unwrap_err();
        assert!(matches!(e, Error::NoLimitAtInfinity { .. }));
    }

    #[test]
    fn heaviside_is_not_continuous() {
        let h = evaluator(|x| if x >= 0.0 { 1.0 } else { 0.0 });
        let e = build_continuous(h, 0.0, 1.0, DEFAULT_TOL).unwrap_err();
        match e {
            Error::NotContinuous { at, oscillation } => {
                assert!(at.abs() < 1e-9);
                assert!(oscillation >= 0.99);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn jump_off_grid_is_detected() {
        let h = evaluator(|x| if x >= 0.123_456_7 { 0.5 } else { 0.0 });
        assert!(matches!(build_continuous(h, 0.0, 0.5, DEFAULT_TOL), Err(Error::NotContinuous { .. })));
    }

    #[test]
    fn steep_and_rough_functions_pass() {
        let cantor = evaluator(crate::numerics::cantor);
        assert!(build_continuous(cantor, 0.0, 1.0, DEFAULT_TOL).is_ok());
        let osc = evaluator(|x: f64| {
            if x <= 0.0 {
                0.0
            } else if x >= 1.0 {
                1f64.cos()
            } else {
                x * x * (x.powi(-2)).cos()
            }
        });
        assert!(build_continuous(osc, 0.0, 1f64.cos(), DEFAULT_TOL).is_ok());
    }

    #[test]
    fn sup_norm_examples() {
        let f = atan_bar().unwrap().map(|v| v + FRAC_PI_2);
        assert!((f.sup_norm(DEFAULT_TOL).unwrap() - PI).abs() < 1e-12);
        let si = ContinuousFunctionBar::trusted(
            evaluator(|x| if x <= 0.0 { 0.0 } else { crate::numerics::sine_integral(x) }),
            0.0,
            FRAC_PI_2,
        )
        .with_knots([0.0]);
        let s = si.sup_norm(DEFAULT_TOL).unwrap();
        assert!((s - 1.851_937_05).abs() < 1e-8, "{s}");
    }

    #[test]
    fn sup_norm_bounds_samples() {
        let f = ContinuousFunctionBar::trusted(evaluator(|x: f64| (3.0 * x).sin() * (-x * x / 10.0).exp()), 0.0, 0.0);
        let s = f.sup_norm(DEFAULT_TOL).unwrap();
        for i in -500..500 {
            let x = i as f64 * 0.0137;
            assert!(f.eval(x).abs() <= s + 1e-15);
        }
    }
}
