//! Shared helpers for integration tests: closed-form round-sphere geometry
//! used as an independent oracle for the Newton-based solvers.

#![allow(dead_code)]

use std::f64::consts::PI;

pub fn embed(p: &[f64]) -> [f64; 3] {
    [
        p[0].sin() * p[1].cos(),
        p[0].sin() * p[1].sin(),
        p[0].cos(),
    ]
}

pub fn unembed(v: [f64; 3]) -> [f64; 2] {
    let phi = v[1].atan2(v[0]).rem_euclid(2.0 * PI);
    [v[2].clamp(-1.0, 1.0).acos(), phi]
}

pub fn sphere_dist(a: &[f64], b: &[f64]) -> f64 {
    let (x, y) = (embed(a), embed(b));
    let dot: f64 = x.iter().zip(&y).map(|(u, v)| u * v).sum();
    dot.clamp(-1.0, 1.0).acos()
}

/// Chordal distance of the embedded points; resolves coincidence to machine
/// precision where the arc distance (through acos) cannot.
pub fn chordal_dist(a: &[f64], b: &[f64]) -> f64 {
    let (x, y) = (embed(a), embed(b));
    x.iter()
        .zip(&y)
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        .sqrt()
}

/// Coordinate tangent basis pushed to the ambient space.
pub fn frame(p: &[f64]) -> ([f64; 3], [f64; 3]) {
    let (th, ph) = (p[0], p[1]);
    (
        [th.cos() * ph.cos(), th.cos() * ph.sin(), -th.sin()],
        [-th.sin() * ph.sin(), th.sin() * ph.cos(), 0.0],
    )
}

/// Great-circle exponential in chart coordinates; `p` holds coordinate
/// components (∂θ, ∂φ).
pub fn great_circle_exp(x: &[f64], p: &[f64]) -> [f64; 2] {
    let xx = embed(x);
    let (e_th, e_ph) = frame(x);
    let pv: Vec<f64> = (0..3).map(|i| p[0] * e_th[i] + p[1] * e_ph[i]).collect();
    let norm = pv.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-15 {
        return [x[0], x[1]];
    }
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = xx[i] * norm.cos() + pv[i] / norm * norm.sin();
    }
    unembed(out)
}

/// Inverse of the great-circle exponential: coordinate components of the
/// tangent at `x` pointing to `y` with length d(x, y).
pub fn great_circle_log(x: &[f64], y: &[f64]) -> [f64; 2] {
    let (xx, yy) = (embed(x), embed(y));
    let dot: f64 = xx.iter().zip(&yy).map(|(a, b)| a * b).sum();
    let d = dot.clamp(-1.0, 1.0).acos();
    if d < 1e-14 {
        return [0.0, 0.0];
    }
    // ambient tangent component of y orthogonal to x, rescaled to length d
    let mut t = [0.0; 3];
    for i in 0..3 {
        t[i] = yy[i] - dot * xx[i];
    }
    let tn = t.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut t {
        *v *= d / tn;
    }
    let (e_th, e_ph) = frame(x);
    // e_θ is unit; e_φ has length sinθ
    let comp_th: f64 = t.iter().zip(&e_th).map(|(a, b)| a * b).sum();
    let sin_th = x[0].sin();
    let comp_ph: f64 = t.iter().zip(&e_ph).map(|(a, b)| a * b).sum::<f64>() / (sin_th * sin_th);
    [comp_th, comp_ph]
}

/// Euclidean distance of chart coordinate tuples.
pub fn coord_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
