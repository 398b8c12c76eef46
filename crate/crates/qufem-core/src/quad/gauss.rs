//! Gauss-Legendre rules on [-1, 1] and their per-element images.

use alloc::vec::Vec;

use crate::num::abs;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub order_g: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// (P_G(x), P_G'(x)) by the three-term recurrence.
pub fn legendre(g: usize, x: f64) -> (f64, f64) {
    if g == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=g {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let gf = g as f64;
    let dp = gf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// G-point rule, points ascending, weights 2 / ((1 - x^2) P_G'(x)^2).
pub fn gauss_legendre(g: usize) -> QuadratureRule {
    assert!(g >= 1, "at least one point");
    let mut points = Vec::with_capacity(g);
    let mut weights = Vec::with_capacity(g);
    for k in 0..g {
        let mut x = -libm::cos(core::f64::consts::PI * (k as f64 + 0.75) / (g as f64 + 0.5));
        for _ in 0..100 {
            let (p, dp) = legendre(g, x);
            let dx = p / dp;
            x -= dx;
            if abs(dx) < 1e-16 {
                break;
            }
        }
        if g % 2 == 1 && k == g / 2 {
            x = 0.0;
        }
        let (_, dp) = legendre(g, x);
        points.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    // symmetrize against rounding
    for k in 0..g / 2 {
        let (a, b) = (points[k], points[g - 1 - k]);
        let s = (b - a) / 2.0;
        points[k] = -s;
        points[g - 1 - k] = s;
        let w = (weights[k] + weights[g - 1 - k]) / 2.0;
        weights[k] = w;
        weights[g - 1 - k] = w;
    }
    QuadratureRule { order_g: g, points, weights }
}

impl QuadratureRule {
    /// Point on the reference element [0, 1].
    pub fn ref_point(&self, l: usize) -> f64 {
        (self.points[l] + 1.0) / 2.0
    }

    /// Weight on the reference element [0, 1].
    pub fn ref_weight(&self, l: usize) -> f64 {
        self.weights[l] / 2.0
    }

    /// x_l^e = h((x_l + 1)/2 + e).
    pub fn element_point(&self, l: usize, e: usize, h: f64) -> f64 {
        h * (self.ref_point(l) + e as f64)
    }

    /// w_l^e = (h/2) w_l.
    pub fn element_weight(&self, l: usize, h: f64) -> f64 {
        h * self.ref_weight(l)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}
