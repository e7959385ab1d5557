use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result, Side};
use crate::function_core::chart::{from_u, to_u};
use crate::function_core::continuous::{detect_limit, evaluator, Evaluator};
use crate::function_core::{ExtendedReal, TestFunction};
use crate::numerics::golden_max;

const MONOTONE_SAMPLES: usize = 256;

/// One monotone piece of a BV function on the closed interval `[lo, hi]` of
/// the extended line. The evaluator is used on the open interval; the two
/// one-sided limits at the ends are stored.
#[derive(Clone)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    eval: Evaluator,
    deriv: Option<Evaluator>,
    pub left_limit: f64,
    pub right_limit: f64,
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Piece[{}, {}]: {} -> {}{}",
            self.lo,
            self.hi,
            self.left_limit,
            self.right_limit,
            if self.deriv.is_some() { " (d)" } else { "" }
        )
    }
}

impl Piece {
    /// A piece with explicit end limits.
    pub fn with_limits(lo: f64, hi: f64, eval: Evaluator, deriv: Option<Evaluator>, left_limit: f64, right_limit: f64) -> Self {
        Piece { lo, hi, eval, deriv, left_limit, right_limit }
    }

    /// A piece whose evaluator is continuous up to its finite ends; limits at
    /// infinite ends are read off the tail ladder.
    pub fn new(lo: f64, hi: f64, eval: Evaluator, deriv: Option<Evaluator>) -> Result<Self> {
        let end = |x: f64, side: Side| -> Result<f64> {
            if x.is_finite() {
                Ok(eval(x))
            } else {
                detect_limit(&*eval, side, 1e-9, 60)
                    .map_err(|_| Error::MalformedPieces(format!("piece has no limit at {x}")))
            }
        };
        let left_limit = end(lo, Side::Negative)?;
        let right_limit = end(hi, Side::Positive)?;
        Ok(Piece { lo, hi, eval, deriv, left_limit, right_limit })
    }

    pub fn constant(lo: f64, hi: f64, c: f64) -> Self {
        Piece::with_limits(lo, hi, evaluator(move |_| c), Some(evaluator(|_| 0.0)), c, c)
    }

    /// Value on `[lo, hi]` with the stored limits at the two ends.
    #[inline]
    pub fn eval_closed(&self, x: f64) -> f64 {
        if x <= self.lo {
            self.left_limit
        } else if x >= self.hi {
            self.right_limit
        } else {
            (self.eval)(x)
        }
    }

    pub fn deriv(&self) -> Option<&Evaluator> {
        self.deriv.as_ref()
    }

    pub fn variation(&self) -> f64 {
        (self.right_limit - self.left_limit).abs()
    }

    /// `+1`, `-1` or `0` for increasing, decreasing, constant.
    pub fn direction(&self) -> f64 {
        let d = self.right_limit - self.left_limit;
        if d > 0.0 {
            1.0
        } else if d < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    /// The same function on a sub-interval.
    pub fn restrict(&self, lo: f64, hi: f64) -> Piece {
        Piece {
            lo,
            hi,
            eval: self.eval.clone(),
            deriv: self.deriv.clone(),
            left_limit: self.eval_closed(lo),
            right_limit: self.eval_closed(hi),
        }
    }

    pub(crate) fn samples(&self) -> Vec<(f64, f64)> {
        let (ul, ur) = (to_u(self.lo), to_u(self.hi));
        (0..=MONOTONE_SAMPLES)
            .map(|i| {
                let x = from_u(ul + (ur - ul) * i as f64 / MONOTONE_SAMPLES as f64);
                (x, self.eval_closed(x))
            })
            .collect()
    }

    fn audit_monotone(&self) -> Result<()> {
        let s = self.samples();
        let scale = s.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
        let slack = 1e-12 * (1.0 + scale);
        if s.iter().any(|p| !p.1.is_finite()) {
            return Err(Error::MalformedPieces(format!("non-finite value on [{}, {}]", self.lo, self.hi)));
        }
        let up = s.windows(2).all(|w| w[1].1 >= w[0].1 - slack);
        let down = s.windows(2).all(|w| w[1].1 <= w[0].1 + slack);
        if up || down {
            Ok(())
        } else {
            Err(Error::MalformedPieces(format!("piece on [{}, {}] is not monotone", self.lo, self.hi)))
        }
    }
}

/// A function of bounded variation on `[-∞, ∞]`: monotone pieces covering the
/// line, a point value at every interior piece boundary and the two values at
/// infinity. Jumps live only at boundaries and at `±∞`.
#[derive(Clone, Debug)]
pub struct BvFunction {
    pieces: Arc<Vec<Piece>>,
    points: Arc<Vec<f64>>,
    value_neg_inf: f64,
    value_pos_inf: f64,
}

/// A BV function normalised to be right continuous on `[-∞, ∞)` and left
/// continuous at `∞`.
pub type NbvFunction = BvFunction;

/// One row of the jump table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub at: ExtendedReal,
    pub left: f64,
    pub point: f64,
    pub right: f64,
}

impl Jump {
    pub fn magnitude(&self) -> f64 {
        (self.point - self.left).abs() + (self.right - self.point).abs()
    }
}

impl BvFunction {
    /// Validates the piece layout and audits every piece for monotonicity.
    pub fn new(pieces: Vec<Piece>, points: Vec<f64>, value_neg_inf: f64, value_pos_inf: f64) -> Result<Self> {
        let g = Self::trusted(pieces, points, value_neg_inf, value_pos_inf)?;
        for p in g.pieces.iter() {
            p.audit_monotone()?;
        }
        Ok(g)
    }

    /// Layout checks only; pieces are taken as monotone.
    pub fn trusted(pieces: Vec<Piece>, points: Vec<f64>, value_neg_inf: f64, value_pos_inf: f64) -> Result<Self> {
        let bad = |m: &str| Err(Error::MalformedPieces(m.to_string()));
        if pieces.is_empty() {
            return bad("no pieces");
        }
        if pieces[0].lo != f64::NEG_INFINITY || pieces[pieces.len() - 1].hi != f64::INFINITY {
            return bad("pieces must cover the extended line");
        }
        if points.len() + 1 != pieces.len() {
            return bad("one point value per interior boundary");
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return bad("pieces must abut");
            }
        }
        for p in &pieces {
            if !(p.lo < p.hi) {
                return bad("empty piece");
            }
            if !p.left_limit.is_finite() || !p.right_limit.is_finite() {
                return bad("non-finite piece limit");
            }
        }
        if !value_neg_inf.is_finite() || !value_pos_inf.is_finite() || points.iter().any(|v| !v.is_finite()) {
            return bad("non-finite point value");
        }
        Ok(BvFunction { pieces: Arc::new(pieces), points: Arc::new(points), value_neg_inf, value_pos_inf })
    }

    pub fn constant(c: f64) -> Self {
        Self::trusted(vec![Piece::constant(f64::NEG_INFINITY, f64::INFINITY, c)], vec![], c, c).unwrap()
    }

    /// Right-continuous step function: `values[0]` left of `locations[0]`,
    /// `values[i]` on `[locations[i-1], locations[i])`.
    pub fn step(locations: &[f64], values: &[f64]) -> Result<Self> {
        if values.len() != locations.len() + 1 {
            return Err(Error::MalformedPieces("step needs one more value than locations".into()));
        }
        if locations.windows(2).any(|w| !(w[0] < w[1])) || locations.iter().any(|x| !x.is_finite()) {
            return Err(Error::MalformedPieces("step locations must be finite and increasing".into()));
        }
        let mut bounds = vec![f64::NEG_INFINITY];
        bounds.extend_from_slice(locations);
        bounds.push(f64::INFINITY);
        let pieces = values.iter().enumerate().map(|(i, &v)| Piece::constant(bounds[i], bounds[i + 1], v)).collect();
        Self::trusted(pieces, values[1..].to_vec(), values[0], values[values.len() - 1])
    }

    /// `H(x) = 1` for `x ≥ 0`, `0` otherwise.
    pub fn heaviside() -> Self {
        Self::step(&[0.0], &[0.0, 1.0]).unwrap()
    }

    /// One monotone piece on the whole line with the given limits, which are
    /// also the values at `±∞`.
    pub fn monotone(eval: Evaluator, deriv: Option<Evaluator>, limit_neg: f64, limit_pos: f64) -> Result<Self> {
        let p = Piece::with_limits(f64::NEG_INFINITY, f64::INFINITY, eval, deriv, limit_neg, limit_pos);
        Self::new(vec![p], vec![], limit_neg, limit_pos)
    }

    /// A test function as a four-piece BV function: zero, rising, falling, zero.
    pub fn from_test_function(phi: &TestFunction) -> Self {
        let (lo, hi) = phi.support();
        let c = phi.center;
        let (e, d) = (phi.evaluator(), phi.derivative_evaluator());
        let top = phi.eval(c);
        let pieces = vec![
            Piece::constant(f64::NEG_INFINITY, lo, 0.0),
            Piece::with_limits(lo, c, e.clone(), Some(d.clone()), 0.0, top),
            Piece::with_limits(c, hi, e, Some(d), top, 0.0),
            Piece::constant(hi, f64::INFINITY, 0.0),
        ];
        Self::trusted(pieces, vec![0.0, top, 0.0], 0.0, 0.0).expect("bump layout")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn value_neg_inf(&self) -> f64 {
        self.value_neg_inf
    }

    pub fn value_pos_inf(&self) -> f64 {
        self.value_pos_inf
    }

    /// Interior piece boundaries.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces[1..].iter().map(|p| p.lo).collect()
    }

    fn piece_index(&self, x: f64) -> usize {
        // first piece with hi > x
        self.pieces.partition_point(|p| p.hi <= x).min(self.pieces.len() - 1)
    }

    fn boundary_index(&self, x: f64) -> Option<usize> {
        let i = self.pieces.partition_point(|p| p.hi < x);
        (i + 1 < self.pieces.len() && self.pieces[i].hi == x).then_some(i)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return self.value_neg_inf;
        }
        if x == f64::INFINITY {
            return self.value_pos_inf;
        }
        if let Some(i) = self.boundary_index(x) {
            return self.points[i];
        }
        self.pieces[self.piece_index(x)].eval_closed(x)
    }

    pub fn at(&self, x: ExtendedReal) -> f64 {
        self.eval(x.to_f64())
    }

    /// `g(x-)`; at `-∞` this is `g(-∞)`.
    pub fn left_limit(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return self.value_neg_inf;
        }
        if x == f64::INFINITY {
            return self.pieces[self.pieces.len() - 1].right_limit;
        }
        if let Some(i) = self.boundary_index(x) {
            return self.pieces[i].right_limit;
        }
        self.pieces[self.piece_index(x)].eval_closed(x)
    }

    /// `g(x+)`; at `∞` this is `g(∞)`.
    pub fn right_limit(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return self.value_pos_inf;
        }
        if x == f64::NEG_INFINITY {
            return self.pieces[0].left_limit;
        }
        if let Some(i) = self.boundary_index(x) {
            return self.pieces[i + 1].left_limit;
        }
        self.pieces[self.piece_index(x)].eval_closed(x)
    }

    /// Every point where the function is not continuous, including `±∞`.
    pub fn jumps(&self) -> Vec<Jump> {
        let mut out = Vec::new();
        let first = self.pieces[0].left_limit;
        if first != self.value_neg_inf {
            out.push(Jump { at: ExtendedReal::NegInf, left: self.value_neg_inf, point: self.value_neg_inf, right: first });
        }
        for (i, &v) in self.points.iter().enumerate() {
            let (l, r) = (self.pieces[i].right_limit, self.pieces[i + 1].left_limit);
            if l != v || r != v {
                out.push(Jump { at: ExtendedReal::Finite(self.pieces[i].hi), left: l, point: v, right: r });
            }
        }
        let last = self.pieces[self.pieces.len() - 1].right_limit;
        if last != self.value_pos_inf {
            out.push(Jump { at: ExtendedReal::PosInf, left: last, point: self.value_pos_inf, right: self.value_pos_inf });
        }
        out
    }

    pub fn is_continuous(&self) -> bool {
        self.jumps().is_empty()
    }

    /// Exact variation over `[-∞, ∞]` from the representation.
    pub fn variation(&self) -> f64 {
        self.pieces.iter().map(Piece::variation).sum::<f64>() + self.jumps().iter().map(Jump::magnitude).sum::<f64>()
    }

    /// Variation restricted to `[a, b]`.
    pub fn variation_on(&self, a: f64, b: f64) -> f64 {
        if !(a < b) {
            return 0.0;
        }
        let mut v = (self.right_limit(a) - self.eval(a)).abs() + (self.eval(b) - self.left_limit(b)).abs();
        for p in self.pieces.iter() {
            let (l, r) = (p.lo.max(a), p.hi.min(b));
            if l < r {
                v += (p.eval_closed(r) - p.eval_closed(l)).abs();
            }
        }
        for (i, &pt) in self.points.iter().enumerate() {
            let x = self.pieces[i].hi;
            if a < x && x < b {
                v += (pt - self.pieces[i].right_limit).abs() + (self.pieces[i + 1].left_limit - pt).abs();
            }
        }
        v
    }

    /// `inf |g|` over the extended line.
    pub fn inf_abs(&self) -> f64 {
        let mut m = self.value_neg_inf.abs().min(self.value_pos_inf.abs());
        m = self.points.iter().fold(m, |m, v| m.min(v.abs()));
        for p in self.pieces.iter() {
            let (l, r) = (p.left_limit, p.right_limit);
            if l.signum() != r.signum() || l == 0.0 || r == 0.0 {
                return 0.0;
            }
            m = m.min(l.abs()).min(r.abs());
        }
        m
    }

    /// `sup |g|` over the extended line.
    pub fn sup_abs(&self) -> f64 {
        let mut m = self.value_neg_inf.abs().max(self.value_pos_inf.abs());
        m = self.points.iter().fold(m, |m, v| m.max(v.abs()));
        self.pieces.iter().fold(m, |m, p| m.max(p.left_limit.abs()).max(p.right_limit.abs()))
    }

    /// `‖g‖_BV = |g(-∞)| + Vg`.
    pub fn bv_norm(&self) -> f64 {
        self.value_neg_inf.abs() + self.variation()
    }

    /// True when the function is monotone over the whole extended line.
    pub fn is_monotone(&self) -> bool {
        let mut seq = vec![self.value_neg_inf];
        for (i, p) in self.pieces.iter().enumerate() {
            seq.push(p.left_limit);
            seq.push(p.right_limit);
            if i < self.points.len() {
                seq.push(self.points[i]);
            }
        }
        seq.push(self.value_pos_inf);
        let up = seq.windows(2).all(|w| w[1] >= w[0]);
        let down = seq.windows(2).all(|w| w[1] <= w[0]);
        let dirs_ok = self.pieces.iter().all(|p| {
            let d = p.direction();
            d == 0.0 || (up && d > 0.0) || (down && d < 0.0)
        });
        (up || down) && dirs_ok
    }

    /// `c · g`.
    pub fn scale(&self, c: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let e = p.eval.clone();
                let d = p.deriv.clone();
                Piece::with_limits(
                    p.lo,
                    p.hi,
                    evaluator(move |x| c * e(x)),
                    d.map(|d| evaluator(move |x| c * d(x))),
                    c * p.left_limit,
                    c * p.right_limit,
                )
            })
            .collect();
        let points = self.points.iter().map(|v| c * v).collect();
        Self::trusted(pieces, points, c * self.value_neg_inf, c * self.value_pos_inf).unwrap()
    }

    /// `g + h`, re-segmented so that every piece of the sum is monotone.
    pub fn add(&self, other: &Self) -> Self {
        let mut bounds = self.breakpoints();
        bounds.extend(other.breakpoints());
        bounds.sort_by(f64::total_cmp);
        bounds.dedup();
        let mut edges = vec![f64::NEG_INFINITY];
        edges.extend(&bounds);
        edges.push(f64::INFINITY);
        let mut pieces = Vec::new();
        let mut points = Vec::new();
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = if lo.is_finite() && hi.is_finite() { 0.5 * (lo + hi) } else { from_u(0.5 * (to_u(lo) + to_u(hi))) };
            let a = self.pieces[self.piece_index(mid)].restrict(lo, hi);
            let b = other.pieces[other.piece_index(mid)].restrict(lo, hi);
            let summed = sum_piece(&a, &b);
            if a.direction() * b.direction() >= 0.0 {
                pieces.push(summed);
            } else {
                pieces.extend(split_monotone(&summed));
            }
            if hi.is_finite() {
                points.push(self.eval(hi) + other.eval(hi));
            }
        }
        // interior splits from split_monotone carry continuous point values
        let mut pts = Vec::new();
        for w in pieces.windows(2) {
            let x = w[0].hi;
            match bounds.binary_search_by(|b| b.total_cmp(&x)) {
                Ok(k) => pts.push(points[k]),
                Err(_) => pts.push(w[0].right_limit),
            }
        }
        Self::trusted(pieces, pts, self.value_neg_inf + other.value_neg_inf, self.value_pos_inf + other.value_pos_inf)
            .expect("sum of well-formed BV functions")
    }

    /// The NBV representative: every point value becomes the right limit,
    /// `g(-∞)` becomes `g(-∞+)` and `g(∞)` becomes `g(∞-)`.
    pub fn normalize_nbv(&self) -> NbvFunction {
        let points = (0..self.points.len()).map(|i| self.pieces[i + 1].left_limit).collect();
        BvFunction {
            pieces: self.pieces.clone(),
            points: Arc::new(points),
            value_neg_inf: self.pieces[0].left_limit,
            value_pos_inf: self.pieces[self.pieces.len() - 1].right_limit,
        }
    }

    /// Replaces the point value at an interior boundary.
    pub fn with_point_value(&self, x: f64, v: f64) -> Result<Self> {
        let i = self
            .boundary_index(x)
            .ok_or_else(|| Error::MalformedPieces(format!("{x} is not a piece boundary")))?;
        let mut pts = (*self.points).clone();
        pts[i] = v;
        Ok(BvFunction { points: Arc::new(pts), ..self.clone() })
    }

    /// Splits the piece containing `x` so that `x` becomes a boundary with the
    /// point value `v`.
    pub fn with_point_change(&self, x: f64, v: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::MalformedPieces("point change must be finite".into()));
        }
        if self.boundary_index(x).is_some() {
            return self.with_point_value(x, v);
        }
        let i = self.piece_index(x);
        let p = &self.pieces[i];
        let mut pieces = (*self.pieces).clone();
        pieces.splice(i..=i, [p.restrict(p.lo, x), p.restrict(x, p.hi)]);
        let mut pts = (*self.points).clone();
        pts.insert(i, v);
        Self::trusted(pieces, pts, self.value_neg_inf, self.value_pos_inf)
    }

    /// Structural equality of the normalised representation on sample points.
    pub fn same_representation(&self, other: &Self) -> bool {
        self.points == other.points
            && self.value_neg_inf == other.value_neg_inf
            && self.value_pos_inf == other.value_pos_inf
            && self.pieces.len() == other.pieces.len()
            && self.pieces.iter().zip(other.pieces.iter()).all(|(a, b)| {
                a.lo == b.lo && a.hi == b.hi && a.left_limit == b.left_limit && a.right_limit == b.right_limit
            })
    }
}

fn sum_piece(a: &Piece, b: &Piece) -> Piece {
    let (ea, eb) = (a.eval.clone(), b.eval.clone());
    let deriv = match (&a.deriv, &b.deriv) {
        (Some(da), Some(db)) => {
            let (da, db) = (da.clone(), db.clone());
            Some(evaluator(move |x| da(x) + db(x)))
        }
        _ => None,
    };
    Piece::with_limits(a.lo, a.hi, evaluator(move |x| ea(x) + eb(x)), deriv, a.left_limit + b.left_limit, a.right_limit + b.right_limit)
}

/// Cuts a piece at the sampled turning points of its evaluator, each polished
/// by golden-section search.
fn split_monotone(p: &Piece) -> Vec<Piece> {
    let s = p.samples();
    let mut cuts = Vec::new();
    for i in 1..s.len() - 1 {
        let (l, m, r) = (s[i - 1].1, s[i].1, s[i + 1].1);
        let is_max = m > l && m >= r;
        let is_min = m < l && m <= r;
        if is_max || is_min {
            let sign = if is_max { 1.0 } else { -1.0 };
            let f = |u: f64| sign * p.eval_closed(from_u(u));
            let (u, _) = golden_max(&f, to_u(s[i - 1].0), to_u(s[i + 1].0), 200);
            let x = from_u(u);
            if x > p.lo && x < p.hi && cuts.last().is_none_or(|&c| x > c) {
                cuts.push(x);
            }
        }
    }
    let mut edges = vec![p.lo];
    edges.extend(cuts);
    edges.push(p.hi);
    edges.windows(2).map(|w| p.restrict(w[0], w[1])).collect()
}

/// The characteristic function of an interval with endpoints `a ≤ b` in the
/// extended line; `closed_lo`/`closed_hi` select whether each end belongs.
pub fn indicator(a: ExtendedReal, b: ExtendedReal, closed_lo: bool, closed_hi: bool) -> Result<BvFunction> {
    let (a, b) = (a.to_f64(), b.to_f64());
    if a > b || a.is_nan() || b.is_nan() {
        return Err(Error::IntervalEmpty { lo: a, hi: b });
    }
    let one = |x: bool| if x { 1.0 } else { 0.0 };
    if a == b {
        if !a.is_finite() {
            return Ok(BvFunction::trusted(vec![Piece::constant(f64::NEG_INFINITY, f64::INFINITY, 0.0)], vec![], one(a < 0.0 && closed_lo), one(a > 0.0 && closed_hi)).unwrap());
        }
        let pieces = vec![Piece::constant(f64::NEG_INFINITY, a, 0.0), Piece::constant(a, f64::INFINITY, 0.0)];
        return BvFunction::trusted(pieces, vec![one(closed_lo && closed_hi)], 0.0, 0.0);
    }
    let mut pieces = Vec::new();
    let mut points = Vec::new();
    // an infinite end includes the ideal point, so it carries no jump
    let neg = if a == f64::NEG_INFINITY {
        1.0
    } else {
        pieces.push(Piece::constant(f64::NEG_INFINITY, a, 0.0));
        points.push(one(closed_lo));
        0.0
    };
    let pos = if b == f64::INFINITY { 1.0 } else { 0.0 };
    pieces.push(Piece::constant(pieces.last().map_or(f64::NEG_INFINITY, |p: &Piece| p.hi), b, 1.0));
    if b.is_finite() {
        points.push(one(closed_hi));
        pieces.push(Piece::constant(b, f64::INFINITY, 0.0));
    }
    BvFunction::trusted(pieces, points, neg, pos)
}

/// Free-function form of [`BvFunction::variation`].
pub fn variation(g: &BvFunction) -> f64 {
    g.variation()
}

/// Free-function form of [`BvFunction::normalize_nbv`].
pub fn normalize_nbv(g: &BvFunction) -> NbvFunction {
    g.normalize_nbv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv_stieltjes::rs_integral;
    use crate::function_core::{ContinuousFunctionBar, ExtendedReal as E};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn block_sum_variation() {
        let b = [1.0, 0.25, 1.0 / 9.0, 1.0 / 16.0, 0.04];
        let mut locs = Vec::new();
        let mut vals = vec![0.0];
        for (k, bn) in b.iter().enumerate() {
            let n = (k + 1) as f64;
            locs.extend([2.0 * n - 1.0, 2.0 * n]);
            vals.extend([*bn, 0.0]);
        }
        // closed blocks: value b_n on [2n-1, 2n]
        let mut g = BvFunction::step(&locs, &vals).unwrap();
        for (k, bn) in b.iter().enumerate() {
            g = g.with_point_value(2.0 * (k + 1) as f64, *bn).unwrap();
        }
        let expected: f64 = 2.0 * b.iter().sum::<f64>();
        assert!((g.variation() - expected).abs() < 1e-15);
    }

    #[test]
    fn heaviside_and_indicators() {
        assert_eq!(BvFunction::heaviside().variation(), 1.0);
        assert_eq!(indicator(E::Finite(0.0), E::Finite(1.0), true, true).unwrap().variation(), 2.0);
        assert_eq!(indicator(E::NegInf, E::Finite(3.0), false, true).unwrap().variation(), 1.0);
        assert_eq!(indicator(E::Finite(3.0), E::PosInf, true, false).unwrap().variation(), 1.0);
    }

    #[test]
    fn poisson_kernel_variation() {
        let (x0, y) = (0.3, 0.7);
        let k = move |t: f64| y / (PI * ((x0 - t).powi(2) + y * y));
        let up = Piece::with_limits(f64::NEG_INFINITY, x0, evaluator(k), None, 0.0, k(x0));
        let down = Piece::with_limits(x0, f64::INFINITY, evaluator(k), None, k(x0), 0.0);
        let g = BvFunction::new(vec![up, down], vec![k(x0)], 0.0, 0.0).unwrap();
        assert!((g.variation() - 2.0 / (PI * y)).abs() < 1e-15);
        // brute-force partition oracle on 1e5 points
        let n = 100_000;
        let xs: Vec<f64> = (0..=n).map(|i| -500.0 + 1000.0 * i as f64 / n as f64).collect();
        let brute: f64 = xs.windows(2).map(|w| (k(w[1]) - k(w[0])).abs()).sum();
        assert!((brute - g.variation()).abs() < 2e-3, "{brute}");
    }

    #[test]
    fn nbv_examples() {
        let g = BvFunction::step(&[0.0], &[0.0, 1.0]).unwrap().with_point_value(0.0, 5.0).unwrap();
        assert_eq!(g.eval(0.0), 5.0);
        assert_eq!(g.normalize_nbv().eval(0.0), 1.0);
        let open = indicator(E::Finite(0.0), E::Finite(1.0), false, false).unwrap();
        let n = open.normalize_nbv();
        assert_eq!((n.eval(0.0), n.eval(1.0), n.eval(0.5)), (1.0, 0.0, 1.0));
        let c = BvFunction::monotone(evaluator(f64::atan), None, -PI / 2.0, PI / 2.0).unwrap();
        assert!(c.normalize_nbv().same_representation(&c));
        assert!(n.variation() <= open.variation());
    }

    #[test]
    fn nbv_preserves_smooth_pairings() {
        // ∫ f g with smooth f = F' is insensitive to the normalisation
        let f = ContinuousFunctionBar::trusted(evaluator(|x: f64| x.atan()), -PI / 2.0, PI / 2.0);
        let open = indicator(E::Finite(0.0), E::Finite(1.0), false, false).unwrap();
        let pair = |g: &BvFunction| {
            f.limit_pos() * g.value_pos_inf() - rs_integral(&f, g, E::NegInf, E::PosInf, 1e-12).unwrap()
        };
        let want = 1f64.atan();
        assert!((pair(&open) - want).abs() < 1e-12);
        assert!((pair(&open.normalize_nbv()) - want).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_monotone_piece() {
        let p = Piece::with_limits(f64::NEG_INFINITY, f64::INFINITY, evaluator(|x: f64| x.sin() / (1.0 + x * x)), None, 0.0, 0.0);
        assert!(matches!(BvFunction::new(vec![p], vec![], 0.0, 0.0), Err(Error::MalformedPieces(_))));
    }

    #[test]
    fn monotone_detection() {
        assert!(BvFunction::heaviside().is_monotone());
        assert!(!indicator(E::Finite(0.0), E::Finite(1.0), true, true).unwrap().is_monotone());
        assert!(BvFunction::constant(2.0).is_monotone());
    }

    fn arb_step() -> impl Strategy<Value = BvFunction> {
        (prop::collection::vec(-10.0f64..10.0, 1..5), prop::collection::vec(-3.0f64..3.0, 6)).prop_map(|(mut locs, vals)| {
            locs.sort_by(f64::total_cmp);
            locs.dedup();
            let v = vals[..locs.len() + 1].to_vec();
            BvFunction::step(&locs, &v).unwrap()
        })
    }

    fn arb_smooth() -> impl Strategy<Value = BvFunction> {
        (-3.0f64..3.0, 0.2f64..3.0, -2.0f64..2.0).prop_map(|(c, s, a)| {
            let e = evaluator(move |x: f64| a * ((x - c) / s).atan());
            let d = evaluator(move |x: f64| a / (s * (1.0 + ((x - c) / s).powi(2))));
            BvFunction::monotone(e, Some(d), -a * PI / 2.0, a * PI / 2.0).unwrap()
        })
    }

    fn arb_bv() -> impl Strategy<Value = BvFunction> {
        prop_oneof![arb_step(), arb_smooth(), (arb_step(), arb_smooth()).prop_map(|(a, b)| a.add(&b))]
    }

    fn gauss() -> ContinuousFunctionBar {
        ContinuousFunctionBar::trusted(evaluator(|x: f64| (-x * x / 4.0).exp() * (x + 1.0)), 0.0, 0.0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn subadditive_variation(g in arb_bv(), h in arb_bv()) {
            let s = g.add(&h);
            prop_assert!(s.variation() <= g.variation() + h.variation() + 1e-9);
        }

        #[test]
        fn nbv_is_idempotent(g in arb_bv(), x in -5.0f64..5.0, v in -4.0f64..4.0) {
            let g = g.with_point_change(x, v).unwrap();
            let n = g.normalize_nbv();
            prop_assert!(n.normalize_nbv().same_representation(&n));
            prop_assert!(n.variation() <= g.variation() + 1e-12);
        }

        #[test]
        fn rs_is_additive(g in arb_bv(), a in -8.0f64..0.0, b in 0.0f64..1.0, c in 1.0f64..8.0) {
            let f = gauss();
            let tol = 1e-10;
            let ab = rs_integral(&f, &g, E::Finite(a), E::Finite(b), tol).unwrap();
            let bc = rs_integral(&f, &g, E::Finite(b), E::Finite(c), tol).unwrap();
            let ac = rs_integral(&f, &g, E::Finite(a), E::Finite(c), tol).unwrap();
            prop_assert!((ab + bc - ac).abs() < 2.0 * tol + 1e-12, "{} vs {}", ab + bc, ac);
        }

        #[test]
        fn integral_of_dg(g in arb_bv(), x in -6.0f64..0.0, y in 0.0f64..6.0) {
            let one = ContinuousFunctionBar::constant(1.0);
            let v = rs_integral(&one, &g, E::Finite(x), E::Finite(y), 1e-11).unwrap();
            prop_assert!((v - (g.eval(y) - g.eval(x))).abs() < 1e-10);
        }

        #[test]
        fn single_jump(p in -5.0f64..5.0, j in -3.0f64..3.0, c in -2.0f64..2.0) {
            let g = BvFunction::step(&[p], &[c, c + j]).unwrap();
            let f = gauss();
            let v = rs_integral(&f, &g, E::Finite(-10.0), E::Finite(10.0), 1e-12).unwrap();
            prop_assert!((v - f.eval(p) * j).abs() < 1e-12);
        }
    }
}
