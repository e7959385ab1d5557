//! Quadrature rules, sequence acceleration and the few special functions the
//! fixtures need. Everything here works on plain `f64` closures.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Gauss–Kronrod application. Returns `(kronrod, |kronrod - gauss|)`.
pub fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = kron.abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        kron += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let err = ((kron - gauss) * h).abs();
    let floor = 50.0 * f64::EPSILON * (abs * h).abs();
    (kron * h, err.max(floor))
}

/// An accepted cell of an adaptive partition.
#[derive(Debug, Clone, Copy)]
pub struct Cell {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
}

struct Queued {
    cell: Cell,
    depth: u32,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cell.error == other.cell.error
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cell.error.total_cmp(&other.cell.error)
    }
}

/// Refinement limits shared by the adaptive drivers.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_depth: u32,
    pub max_cells: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_depth: 40, max_cells: 40_000 }
    }
}

/// Globally adaptive bisection driven by an arbitrary cell rule returning
/// `(estimate, error)`. The worst cell is split until the summed error drops
/// below `tol`. Cells come back ordered by position.
pub fn adaptive_cells<R>(rule: R, a: f64, b: f64, tol: f64, budget: Budget) -> Result<Vec<Cell>>
where
    R: Fn(f64, f64) -> (f64, f64),
{
    if a == b {
        return Ok(vec![Cell { a, b, value: 0.0, error: 0.0 }]);
    }
    let (v, e) = rule(a, b);
    let mut heap = BinaryHeap::new();
    let mut total_err = e;
    let mut total_abs = v.abs();
    heap.push(Queued { cell: Cell { a, b, value: v, error: e }, depth: 0 });
    let mut done: Vec<Cell> = Vec::new();
    // roundoff makes errors below a few ulps of the integrand's scale unreachable
    while total_err > tol.max(1e3 * f64::EPSILON * total_abs) {
        let Some(worst) = heap.pop() else { break };
        let c = worst.cell;
        let m = 0.5 * (c.a + c.b);
        if worst.depth >= budget.max_depth || m <= c.a || m >= c.b {
            // cannot split further; park it
            done.push(c);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1) = rule(c.a, m);
        let (v2, e2) = rule(m, c.b);
        total_err += e1 + e2 - c.error;
        total_abs += v1.abs() + v2.abs() - c.value.abs();
        heap.push(Queued { cell: Cell { a: c.a, b: m, value: v1, error: e1 }, depth: worst.depth + 1 });
        heap.push(Queued { cell: Cell { a: m, b: c.b, value: v2, error: e2 }, depth: worst.depth + 1 });
        if heap.len() + done.len() > budget.max_cells {
            return Err(Error::BudgetExceeded("adaptive quadrature"));
        }
    }
    done.extend(heap.into_iter().map(|q| q.cell));
    let err: f64 = done.iter().map(|c| c.error).sum();
    let floor = tol.max(1e3 * f64::EPSILON * total_abs);
    if err > 1e3 * floor {
        return Err(Error::BudgetExceeded("adaptive quadrature"));
    }
    if err.is_nan() {
        return Err(Error::Eval(a));
    }
    done.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(done)
}

/// Adaptive Gauss–Kronrod integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let cells = adaptive_cells(|l, r| gk15(&f, l, r), a, b, tol, Budget::default())?;
    Ok(cells.iter().map(|c| c.value).sum())
}

/// Integral of `f` over `[a, ∞)` through the substitution `t = a + s/(1-s)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<f64> {
    let g = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - s;
        let v = f(a + s / d) / (d * d);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

/// Golden-section search for a maximum of `f` on `[a, b]`. Returns the best
/// sampled abscissa and value (endpoints included).
pub fn golden_max<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 > best.1 {
            best = (x1, f1);
        }
        if f2 > best.1 {
            best = (x2, f2);
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        if !(hi - lo > 4.0 * f64::EPSILON * (lo.abs() + hi.abs()).max(f64::MIN_POSITIVE)) {
            break;
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Bisection for a sign change of `f` in `[lo, hi]`; assumes `f(lo)` and
/// `f(hi)` differ in sign (or one is zero).
pub fn bisect<F: Fn(f64) -> f64 + ?Sized>(f: &F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    // leftmost point of the final bracket
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Wynn's epsilon algorithm on a sequence of partial sums. Returns the
/// accelerated estimate and the gap between the last two even columns.
pub fn wynn_epsilon(seq: &[f64]) -> Option<(f64, f64)> {
    if seq.len() < 3 {
        return seq.last().map(|&v| (v, f64::INFINITY));
    }
    let mut prev: Vec<f64> = vec![0.0; seq.len() + 1];
    let mut cur: Vec<f64> = seq.to_vec();
    let mut estimates = vec![*seq.last().unwrap()];
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 || !d.is_finite() {
                // exact convergence in this column
                if k % 2 == 0 {
                    return Some((cur[i + 1], 0.0));
                }
                return estimates.last().map(|&e| (e, 0.0));
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    estimates.push(v);
                }
            }
        }
    }
    let n = estimates.len();
    let est = estimates[n - 1];
    let err = if n >= 2 { (estimates[n - 1] - estimates[n - 2]).abs() } else { f64::INFINITY };
    Some((est, err))
}

/// Sine integral `Si(x) = ∫_0^x sin(t)/t dt`.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == f64::INFINITY {
        return std::f64::consts::FRAC_PI_2;
    }
    if x <= 4.0 {
        // power series
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    // continued fraction for E1(ix), modified Lentz
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..200 {
        let a = -((i - 1) as f64).powi(2);
        b += Complex64::new(2.0, 0.0);
        d = Complex64::new(1.0, 0.0) / (d * a + b);
        c = b + Complex64::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    h *= Complex64::new(x.cos(), -x.sin());
    std::f64::consts::FRAC_PI_2 + h.im
}

/// Cantor–Lebesgue function, extended by 0 on `(-∞, 0]` and 1 on `[1, ∞)`.
pub fn cantor(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let mut x = x;
    let mut result = 0.0;
    let mut scale = 0.5;
    for _ in 0..64 {
        x *= 3.0;
        if x < 1.0 {
        } else if x < 2.0 {
            return result + scale;
        } else {
            result += scale;
            x -= 2.0;
        }
        scale *= 0.5;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_polynomials_exactly() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-13).unwrap();
        assert!((v - 0.0).abs() < 1e-13);
        let v = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn semi_infinite() {
        let v = integrate_to_infinity(|t: f64| (-t).exp(), 0.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
    }

    #[test]
    fn sine_integral_matches_quadrature() {
        for &x in &[0.5, 3.0, std::f64::consts::PI, 4.5, 10.0, 37.0] {
            let q = integrate(|t: f64| if t == 0.0 { 1.0 } else { t.sin() / t }, 0.0, x, 1e-14).unwrap();
            assert!((sine_integral(x) - q).abs() < 1e-12, "x={x}");
        }
        assert!((sine_integral(std::f64::consts::PI) - 1.851_937_051_982_466).abs() < 1e-14);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut s = 0.0;
        let seq: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let (est, _) = wynn_epsilon(&seq).unwrap();
        assert!((est - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn cantor_values() {
        assert_eq!(cantor(0.5), 0.5);
        assert_eq!(cantor(1.0 / 3.0), 0.5);
        assert!((cantor(0.25) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(cantor(-3.0), 0.0);
        assert_eq!(cantor(7.0), 1.0);
    }

    #[test]
    fn golden_finds_kinked_peak() {
        let f = |x: f64| 3.0 - (x - 0.3).abs() * 7.0;
        let (x, v) = golden_max(&f, 0.0, 1.0, 200);
        assert!((x - 0.3).abs() < 1e-12);
        assert!((v - 3.0).abs() < 1e-11);
    }
}
