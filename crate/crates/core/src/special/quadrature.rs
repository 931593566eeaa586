//! Gauss-Legendre and tanh-sinh rules on the reference interval `(-1, 1)`.
//!
//! Tanh-sinh nodes cluster doubly exponentially at the endpoints, far closer
//! than `f64` can resolve next to `±1`. Every rule therefore keeps, next to
//! each node `x`, its exact distance `1 - |x|` to the nearest endpoint, and
//! mapped nodes ([`QuadNode`]) carry their distances to both ends of the
//! target interval. Integrands with endpoint singularities should read those
//! distances instead of recomputing `x - a` or `b - x`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadFamily {
    GaussLegendre,
    TanhSinh,
}

impl QuadFamily {
    pub fn name(self) -> &'static str {
        match self {
            QuadFamily::GaussLegendre => "legendre",
            QuadFamily::TanhSinh => "tanhsinh",
        }
    }
}

/// Tanh-sinh generation stops once the weight drops below this value.
pub const TANH_SINH_WEIGHT_FLOOR: f64 = 1e-300;

const NEWTON_TOL: f64 = 1e-14;

/// A quadrature node mapped onto a target interval `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadNode {
    pub x: f64,
    /// `x - a`, accurate even when `x` rounds to `a`.
    pub from_lo: f64,
    /// `b - x`, accurate even when `x` rounds to `b`.
    pub from_hi: f64,
    pub weight: f64,
}

impl QuadNode {
    /// Node at `x` on `(a, b)` with zero weight, for pointwise kernel evaluation.
    pub fn at(x: f64, a: f64, b: f64) -> Self {
        QuadNode {
            x,
            from_lo: x - a,
            from_hi: b - x,
            weight: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    family: QuadFamily,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `1 - |x_i|` for every node.
    complements: Vec<f64>,
}

impl QuadratureRule {
    /// `m`-point Gauss-Legendre rule; nodes are the roots of `P_m`, found by
    /// Newton iteration from Tricomi's initial guesses.
    pub fn gauss_legendre(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(invalid("Gauss-Legendre rule needs at least one node"));
        }
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let half = m.div_ceil(2);
        for i in 0..half {
            // Root i counted from the right end.
            let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < NEWTON_TOL {
                    let (_, d) = legendre_with_derivative(m, x);
                    dp = d;
                    break;
                }
            }
            if m % 2 == 1 && i == half - 1 {
                x = 0.0;
                dp = legendre_with_derivative(m, 0.0).1;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[m - 1 - i] = x;
            nodes[i] = -x;
            weights[m - 1 - i] = w;
            weights[i] = w;
        }
        let complements = nodes.iter().map(|x: &f64| 1.0 - x.abs()).collect();
        Ok(QuadratureRule {
            family: QuadFamily::GaussLegendre,
            nodes,
            weights,
            complements,
        })
    }

    /// Tanh-sinh rule with step `2^-level`; the node count roughly doubles
    /// with each level.
    pub fn tanh_sinh(level: u32) -> Result<Self> {
        if level == 0 || level > 20 {
            return Err(invalid(format!("tanh-sinh level {level} outside 1..=20")));
        }
        let h = 0.5f64.powi(level as i32);
        // (t, weight, complement) for t >= 0
        let mut half = Vec::new();
        let mut k = 0u64;
        loop {
            let t = k as f64 * h;
            let u = 0.5 * PI * t.sinh();
            let e = (-2.0 * u).exp();
            let complement = 2.0 * e / (1.0 + e);
            let weight = h * 0.5 * PI * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
            if weight < TANH_SINH_WEIGHT_FLOOR || complement <= 0.0 {
                break;
            }
            half.push((weight, complement));
            k += 1;
        }
        let len = 2 * half.len() - 1;
        let mut nodes = Vec::with_capacity(len);
        let mut weights = Vec::with_capacity(len);
        let mut complements = Vec::with_capacity(len);
        for &(w, c) in half.iter().rev() {
            nodes.push(-(1.0 - c));
            weights.push(w);
            complements.push(c);
        }
        for &(w, c) in half.iter().skip(1) {
            nodes.push(1.0 - c);
            weights.push(w);
            complements.push(c);
        }
        nodes[half.len() - 1] = 0.0;
        Ok(QuadratureRule {
            family: QuadFamily::TanhSinh,
            nodes,
            weights,
            complements,
        })
    }

    /// Rule of the given family at a resolution parameter: node count for
    /// Gauss-Legendre, level for tanh-sinh.
    pub fn of_family(family: QuadFamily, resolution: usize) -> Result<Self> {
        match family {
            QuadFamily::GaussLegendre => Self::gauss_legendre(resolution),
            QuadFamily::TanhSinh => Self::tanh_sinh(resolution as u32),
        }
    }

    pub fn family(&self) -> QuadFamily {
        self.family
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn complements(&self) -> &[f64] {
        &self.complements
    }

    /// Affine image of the rule on `(a, b)`.
    pub fn mapped(&self, a: f64, b: f64) -> Vec<QuadNode> {
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.complements)
            .map(|((&t, &w), &c)| {
                // 1 + t and 1 - t without cancellation
                let (plus, minus) = if t < 0.0 { (c, 2.0 - c) } else { (2.0 - c, c) };
                let from_lo = half * plus;
                let from_hi = half * minus;
                let x = if t < 0.0 { a + from_lo } else { b - from_hi };
                QuadNode {
                    x,
                    from_lo,
                    from_hi,
                    weight: w * half,
                }
            })
            .collect()
    }

    /// Image on `(0, ∞)` under `x = (1 + u) / (1 - u)`. `from_hi` is infinite;
    /// nodes whose image overflows are dropped.
    pub fn mapped_half_line(&self) -> Vec<QuadNode> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.complements)
            .map(|((&t, &w), &c)| {
                let (plus, minus) = if t < 0.0 { (c, 2.0 - c) } else { (2.0 - c, c) };
                let x = plus / minus;
                QuadNode {
                    x,
                    from_lo: x,
                    from_hi: f64::INFINITY,
                    weight: w * 2.0 / (minus * minus),
                }
            })
            .filter(|n| n.x.is_finite() && n.weight.is_finite())
            .collect()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `∫_a^b f`, where `f` receives the mapped node with endpoint distances.
    pub fn integrate_on(&self, a: f64, b: f64, f: impl Fn(&QuadNode) -> f64) -> f64 {
        self.mapped(a, b).iter().map(|n| n.weight * f(n)).sum()
    }

    pub fn integrate_complex_on(&self, a: f64, b: f64, f: impl Fn(&QuadNode) -> C64) -> C64 {
        self.mapped(a, b)
            .iter()
            .map(|n| f(n) * n.weight)
            .sum()
    }
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let mf = m as f64;
    let d = mf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_nodes_rejected() {
        assert!(QuadratureRule::gauss_legendre(0).is_err());
        assert!(QuadratureRule::tanh_sinh(0).is_err());
    }

    #[test]
    fn one_and_two_point_rules() {
        let r1 = QuadratureRule::gauss_legendre(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert_relative_eq!(r1.weights()[0], 2.0, epsilon = 1e-15);

        let r2 = QuadratureRule::gauss_legendre(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_relative_eq!(r2.nodes()[0], -s, epsilon = 1e-15);
        assert_relative_eq!(r2.nodes()[1], s, epsilon = 1e-15);
        assert_relative_eq!(r2.weights()[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(r2.weights()[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn three_point_rule_x4() {
        let r = QuadratureRule::gauss_legendre(3).unwrap();
        assert!((r.integrate(|x| x.powi(4)) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn legendre_exactness_up_to_64() {
        for m in 1..=64 {
            let r = QuadratureRule::gauss_legendre(m).unwrap();
            assert!((r.weights().iter().sum::<f64>() - 2.0).abs() < 1e-12, "m={m}");
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(r.nodes().iter().all(|x| x.abs() < 1.0));
            for k in 0..=(2 * m - 1) {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(k as i32));
                // odd moments vanish; compare to the scale of |x|^k
                let scale = 2.0 / (k as f64 + 1.0);
                assert!((got - exact).abs() <= 1e-10 * scale, "m={m} k={k} got={got}");
            }
        }
    }

    #[test]
    fn large_legendre_rule_sums_to_two() {
        let r = QuadratureRule::gauss_legendre(2048).unwrap();
        assert!((r.weights().iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert!(r.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn tanh_sinh_structure() {
        let mut prev = 0;
        for level in 1..=8 {
            let r = QuadratureRule::tanh_sinh(level).unwrap();
            assert_eq!(r.len() % 2, 1);
            assert!(r.weights().iter().all(|&w| w > 0.0));
            assert!(r.complements().iter().all(|&c| c > 0.0 && c <= 1.0));
            // strictly increasing in exact arithmetic: (sign, complement) ordering
            let n = r.len();
            let mid = n / 2;
            assert!(r.complements()[..=mid].windows(2).all(|w| w[0] < w[1]));
            assert!(r.complements()[mid..].windows(2).all(|w| w[0] > w[1]));
            if level > 1 {
                let ratio = n as f64 / prev as f64;
                assert!((1.8..2.2).contains(&ratio), "level {level}: {ratio}");
            }
            prev = n;
        }
    }

    #[test]
    fn tanh_sinh_closed_forms() {
        let r = QuadratureRule::tanh_sinh(7).unwrap();
        let inv_sqrt = r.integrate_on(0.0, 1.0, |n| n.from_lo.powf(-0.5));
        assert!((inv_sqrt - 2.0).abs() < 1e-10, "{inv_sqrt}");
        let edge = r.integrate_on(-1.0, 1.0, |n| n.from_hi.powf(-0.4));
        let exact = 2f64.powf(0.6) / 0.6;
        assert!((edge - exact).abs() < 1e-8, "{edge} vs {exact}");
        let constant = r.integrate_on(-3.0, 2.0, |_| 1.0);
        assert!((constant - 5.0).abs() < 1e-12);
    }

    #[test]
    fn half_line_map() {
        let r = QuadratureRule::tanh_sinh(6).unwrap();
        let v: f64 = r
            .mapped_half_line()
            .iter()
            .map(|n| n.weight * (-n.x).exp())
            .sum();
        assert!((v - 1.0).abs() < 1e-12);
    }
}
