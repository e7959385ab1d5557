use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::bv_stieltjes::{BvFunction, Piece};
use crate::error::{Error, Result};
use crate::function_core::chart::{from_u, jacobian, to_u};
use crate::function_core::{evaluator, ExtendedReal};
use crate::integral_core::Distribution;
use crate::numerics::integrate;
use crate::product_calculus::integral_product;

/// A point `(x, y)` with `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!("half-plane point needs finite x and y > 0, got ({x}, {y})")));
        }
        Ok(HalfPlanePoint { x, y })
    }
}

/// `t ↦ K(x - t, y) = y / (π ((x - t)² + y²))` as two monotone pieces meeting
/// at the peak `t = x`; its variation is `2/(πy)`.
pub fn poisson_kernel(p: HalfPlanePoint) -> BvFunction {
    let HalfPlanePoint { x, y } = p;
    let k = evaluator(move |t: f64| {
        let s = x - t;
        y / (PI * (s * s + y * y))
    });
    let dk = evaluator(move |t: f64| {
        let s = x - t;
        let q = s * s + y * y;
        2.0 * y * s / (PI * q * q)
    });
    let top = 1.0 / (PI * y);
    let pieces = vec![
        Piece::with_limits(f64::NEG_INFINITY, x, k.clone(), Some(dk.clone()), 0.0, top),
        Piece::with_limits(x, f64::INFINITY, k, Some(dk), top, 0.0),
    ];
    BvFunction::trusted(pieces, vec![top], 0.0, 0.0).expect("kernel layout")
}

/// `u(x, y) = ∫ f(t) K(x - t, y) dt`.
pub fn poisson(f: &Distribution, p: HalfPlanePoint, tol: f64) -> Result<f64> {
    integral_product(f, &poisson_kernel(p), tol)
}

/// `-∫ F k'` over the line for a kernel vanishing at `±∞`, in the chart,
/// split at `u = 0`, at the given points and at the knots of `F`.
fn pair_kernel_derivative(f: &Distribution, dk: &dyn Fn(f64) -> f64, splits: &[f64], tol: f64) -> Result<f64> {
    let mut us: Vec<f64> = vec![-1.0, 0.0, 1.0];
    us.extend(splits.iter().map(|&s| to_u(s)));
    us.extend(f.primitive().knots().iter().map(|&s| to_u(s)));
    us.retain(|u| (-1.0..=1.0).contains(u));
    us.sort_by(f64::total_cmp);
    us.dedup();
    let big_f = f.primitive();
    let g = |u: f64| {
        let t = from_u(u);
        if !t.is_finite() {
            return 0.0;
        }
        let v = big_f.eval(t) * dk(t) * jacobian(u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let share = tol / us.len() as f64;
    let mut total = 0.0;
    for w in us.windows(2) {
        total += integrate(g, w[0], w[1], share)?;
    }
    Ok(-total)
}

/// The five-point Laplacian of `u` at `p` with step `h`,
/// `[u(x±h, y) + u(x, y±h) - 4u(x, y)] / h²`, evaluated as one integral
/// against the stencil applied to the kernel. With `K = Im(1/ζ)/π`,
/// `ζ = (x - t) - iy`, the stencil sums to `Im(4h² / (ζ(ζ⁴ - h⁴)))/π`, which
/// is free of cancellation.
pub fn laplacian_probe(f: &Distribution, p: HalfPlanePoint, h: f64, tol: f64) -> Result<f64> {
    if !(h > 0.0) || h >= p.y {
        return Err(Error::Domain(format!("laplacian step must satisfy 0 < h < y, got {h}")));
    }
    let HalfPlanePoint { x, y } = p;
    let h4 = h.powi(4);
    // d/dt of the stencil kernel; ds/dt = -1 and d/dζ (ζ⁵ - h⁴ζ)⁻¹ = -(5ζ⁴ - h⁴)/(ζ⁵ - h⁴ζ)²
    let dk = move |t: f64| {
        let z = Complex64::new(x - t, -y);
        let z4 = z * z * z * z;
        let q = z * (z4 - h4);
        (4.0 * h * h * (5.0 * z4 - h4) / (q * q)).im / PI
    };
    pair_kernel_derivative(f, &dk, &[x - h, x, x + h], tol)
}

/// `sup_x |∫_{-∞}^x (u(·, y) - f)|` over a probe grid. The primitive of
/// `u(·, y)` is the convolution `K_y * F`, computed as
/// `(1/π) ∫_{-π/2}^{π/2} F(x - y tan θ) dθ`.
pub fn boundary_norm_gap(f: &Distribution, y: f64, tol: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("boundary gap needs y > 0, got {y}")));
    }
    let big_f = f.primitive();
    let knots = big_f.knots().to_vec();
    let mut xs: Vec<f64> = (1..256).map(|i| from_u(-1.0 + 2.0 * i as f64 / 256.0)).collect();
    xs.extend(knots.iter().copied());
    let mut worst: f64 = 0.0;
    for x in xs {
        let mut th: Vec<f64> = vec![-FRAC_PI_2, FRAC_PI_2];
        th.extend(knots.iter().map(|&k| ((x - k) / y).atan()));
        th.sort_by(f64::total_cmp);
        th.dedup();
        let g = |t: f64| big_f.at(ExtendedReal::from_f64(x - y * t.tan()));
        let mut conv = 0.0;
        for w in th.windows(2) {
            conv += integrate(g, w[0], w[1], tol / th.len() as f64)?;
        }
        worst = worst.max((conv / PI - big_f.eval(x)).abs());
    }
    Ok(worst)
}
