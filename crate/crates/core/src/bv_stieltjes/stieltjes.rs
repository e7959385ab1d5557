use std::sync::Arc;

use super::bv::{BvFunction, Piece};
use crate::error::{Error, Result};
use crate::function_core::chart::{from_u, jacobian, to_u};
use crate::function_core::{ContinuousFunctionBar, ExtendedReal};
use crate::numerics::{adaptive_cells, gk15, Budget};

/// Quadrature rule for `∫ F dg` over a chart cell `[u1, u2]` inside one
/// monotone piece. Returns `(estimate, error)`.
fn piece_rule<'a>(f: &'a ContinuousFunctionBar, p: &'a Piece) -> Box<dyn Fn(f64, f64) -> (f64, f64) + 'a> {
    match p.deriv() {
        Some(d) => {
            let d = d.clone();
            Box::new(move |u1, u2| {
                let h = |u: f64| {
                    let x = from_u(u);
                    let v = f.eval(x) * d(x) * jacobian(u);
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                };
                gk15(&h, u1, u2)
            })
        }
        None => Box::new(move |u1, u2| {
            let s = |l: f64, r: f64| simpson_stieltjes(f, p, l, r);
            let m = 0.5 * (u1 + u2);
            let whole = s(u1, u2);
            let halves = s(u1, m) + s(m, u2);
            (halves, (halves - whole).abs())
        }),
    }
}

/// Trapezoid–Stieltjes on one and on two subcells, Richardson-combined.
fn simpson_stieltjes(f: &ContinuousFunctionBar, p: &Piece, ul: f64, ur: f64) -> f64 {
    let (xl, xr) = (from_u(ul), from_u(ur));
    let xm = from_u(0.5 * (ul + ur));
    let (gl, gm, gr) = (p.eval_closed(xl), p.eval_closed(xm), p.eval_closed(xr));
    if gl == gr && gl == gm {
        return 0.0;
    }
    let (fl, fm, fr) = (f.eval(xl), f.eval(xm), f.eval(xr));
    let t1 = 0.5 * (fl + fr) * (gr - gl);
    let t2 = 0.5 * (fl + fm) * (gm - gl) + 0.5 * (fm + fr) * (gr - gm);
    t2 + (t2 - t1) / 3.0
}

fn piece_cells(f: &ContinuousFunctionBar, p: &Piece, l: f64, r: f64, tol: f64, budget: Budget) -> Result<Vec<crate::numerics::Cell>> {
    if p.left_limit == p.right_limit || !(l < r) {
        let (ul, ur) = (to_u(l), to_u(r));
        return Ok(vec![crate::numerics::Cell { a: ul, b: ur, value: 0.0, error: 0.0 }]);
    }
    let rule = piece_rule(f, p);
    let run = |ul: f64, ur: f64, tol: f64| {
        adaptive_cells(&rule, ul, ur, tol, budget).map_err(|e| match e {
            Error::BudgetExceeded(_) => Error::BudgetExceeded("Riemann-Stieltjes refinement"),
            other => other,
        })
    };
    let (ul, ur) = (to_u(l), to_u(r));
    // the chart is not smooth at the origin
    if ul < 0.0 && ur > 0.0 {
        let mut cells = run(ul, 0.0, 0.5 * tol)?;
        cells.extend(run(0.0, ur, 0.5 * tol)?);
        Ok(cells)
    } else {
        run(ul, ur, tol)
    }
}

/// `∫_a^b F dg` over a closed interval of the extended line, including the
/// endpoint terms `F(a)(g(a+) - g(a))` and `F(b)(g(b) - g(b-))` and every
/// interior jump `F(p)(g(p+) - g(p-))`.
pub fn rs_integral(f: &ContinuousFunctionBar, g: &BvFunction, a: ExtendedReal, b: ExtendedReal, tol: f64) -> Result<f64> {
    rs_integral_with(f, g, a, b, tol, Budget::default())
}

pub fn rs_integral_with(
    f: &ContinuousFunctionBar,
    g: &BvFunction,
    a: ExtendedReal,
    b: ExtendedReal,
    tol: f64,
    budget: Budget,
) -> Result<f64> {
    let (a, b) = (a.to_f64(), b.to_f64());
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) {
        return Err(Error::IntervalEmpty { lo: a, hi: b });
    }
    let mut total = f.eval(a) * (g.right_limit(a) - g.eval(a)) + f.eval(b) * (g.eval(b) - g.left_limit(b));
    for x in g.breakpoints() {
        if a < x && x < b {
            total += f.eval(x) * (g.right_limit(x) - g.left_limit(x));
        }
    }
    let active: Vec<&Piece> = g.pieces().iter().filter(|p| p.lo.max(a) < p.hi.min(b) && p.left_limit != p.right_limit).collect();
    let share = tol / active.len().max(1) as f64;
    for p in active {
        let cells = piece_cells(f, p, p.lo.max(a), p.hi.min(b), share, budget)?;
        total += cells.iter().map(|c| c.value).sum::<f64>();
    }
    Ok(total)
}

struct PieceTable {
    edges: Vec<f64>,
    prefix: Vec<f64>,
}

/// The cumulative integral `x ↦ ∫_{[-∞, x]} F dg`, tabulated once on the
/// adaptive cells of every piece and interpolated inside a cell by one more
/// application of the cell rule.
#[derive(Clone)]
pub struct StieltjesTable {
    f: ContinuousFunctionBar,
    g: BvFunction,
    tables: Arc<Vec<PieceTable>>,
    /// `∫_{[-∞, lo_i]}` with the full jump at `lo_i` included.
    base: Arc<Vec<f64>>,
    total: f64,
}

impl StieltjesTable {
    pub fn build(f: &ContinuousFunctionBar, g: &BvFunction, tol: f64) -> Result<Self> {
        Self::build_with(f, g, tol, Budget::default())
    }

    pub fn build_with(f: &ContinuousFunctionBar, g: &BvFunction, tol: f64, budget: Budget) -> Result<Self> {
        let pieces = g.pieces();
        let share = tol / pieces.len() as f64;
        let mut tables = Vec::with_capacity(pieces.len());
        let mut base = Vec::with_capacity(pieces.len());
        let mut acc = f.limit_neg() * (pieces[0].left_limit - g.value_neg_inf());
        for (i, p) in pieces.iter().enumerate() {
            base.push(acc);
            let cells = piece_cells(f, p, p.lo, p.hi, share, budget)?;
            let mut edges = Vec::with_capacity(cells.len() + 1);
            let mut prefix = Vec::with_capacity(cells.len() + 1);
            let mut s = 0.0;
            for c in &cells {
                edges.push(c.a);
                prefix.push(s);
                s += c.value;
            }
            edges.push(cells.last().map_or(to_u(p.hi), |c| c.b));
            prefix.push(s);
            acc += s;
            if i + 1 < pieces.len() {
                acc += f.eval(p.hi) * (pieces[i + 1].left_limit - p.right_limit);
            }
            tables.push(PieceTable { edges, prefix });
        }
        let last = &pieces[pieces.len() - 1];
        let total = acc + f.limit_pos() * (g.value_pos_inf() - last.right_limit);
        Ok(StieltjesTable { f: f.clone(), g: g.clone(), tables: Arc::new(tables), base: Arc::new(base), total })
    }

    /// `∫_{[-∞, ∞]} F dg`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// `∫_{[-∞, x]} F dg`.
    pub fn cumulative(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return self.total;
        }
        let pieces = self.g.pieces();
        let i = pieces.partition_point(|p| p.hi < x);
        let p = &pieces[i];
        let t = &self.tables[i];
        if x == p.hi {
            let inner = t.prefix[t.prefix.len() - 1];
            return self.base[i] + inner + self.f.eval(x) * (self.g.eval(x) - p.right_limit);
        }
        let u = to_u(x);
        let k = t.edges.partition_point(|&e| e <= u).saturating_sub(1).min(t.edges.len() - 2);
        let partial = if p.left_limit == p.right_limit || u <= t.edges[k] {
            0.0
        } else {
            piece_rule(&self.f, p)(t.edges[k], u).0
        };
        self.base[i] + t.prefix[k] + partial
    }
}
