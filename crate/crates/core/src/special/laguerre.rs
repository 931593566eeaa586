/// Standard Laguerre polynomial `L_j(x)` by the three-term recurrence
/// `(j + 1) L_{j+1} = (2j + 1 - x) L_j - j L_{j-1}`.
pub fn laguerre_eval(j: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if j == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..j {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `[L_0(x), …, L_{count-1}(x)]`.
pub fn laguerre_sequence(count: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(1.0);
    if count == 1 {
        return out;
    }
    out.push(1.0 - x);
    for k in 1..count - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::QuadratureRule;

    #[test]
    fn low_orders() {
        for x in [0.0, 0.3, 2.5, 11.0] {
            assert_eq!(laguerre_eval(0, x), 1.0);
            assert!((laguerre_eval(1, x) - (1.0 - x)).abs() < 1e-15);
            let l2 = 0.5 * (x * x - 4.0 * x + 2.0);
            assert!((laguerre_eval(2, x) - l2).abs() < 1e-13);
        }
    }

    #[test]
    fn recurrence_residual() {
        for j in 1..50 {
            for step in 0..=40 {
                let x = 0.5 * step as f64;
                let seq = laguerre_sequence(j + 2, x);
                let (lm, l, lp) = (seq[j - 1], seq[j], seq[j + 1]);
                let jf = j as f64;
                let res = (jf + 1.0) * lp - (2.0 * jf + 1.0 - x) * l + jf * lm;
                let scale = ((jf + 1.0) * lp.abs())
                    .max((2.0 * jf + 1.0 + x) * l.abs())
                    .max(jf * lm.abs())
                    .max(f64::MIN_POSITIVE);
                assert!(res.abs() / scale < 1e-10, "j={j} x={x}");
                assert_eq!(laguerre_eval(j, x), l);
            }
        }
    }

    #[test]
    fn basis_is_orthonormal() {
        // f_j(x) = √2 e^{-x} L_j(2x) on (0, ∞)
        let rule = QuadratureRule::tanh_sinh(7).unwrap();
        let nodes = rule.mapped_half_line();
        for j in 0..=6 {
            for k in 0..=6 {
                let v: f64 = nodes
                    .iter()
                    .map(|n| {
                        let e = (-2.0 * n.x).exp();
                        if e == 0.0 {
                            return 0.0;
                        }
                        n.weight * 2.0 * e * laguerre_eval(j, 2.0 * n.x) * laguerre_eval(k, 2.0 * n.x)
                    })
                    .sum();
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-8, "j={j} k={k} v={v}");
            }
        }
    }
}
