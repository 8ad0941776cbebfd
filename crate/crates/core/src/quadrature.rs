//! Adaptive Gauss-Kronrod (7/15) quadrature.

use alloc::vec::Vec;

use crate::error::{GaugeError, Result};

/// Default absolute tolerance for phase integrals.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
const MAX_INTERVALS: usize = 20_000;

// Nodes and weights of the 15-point Kronrod rule on [-1, 1] (positive half,
// center last) and the embedded 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the center.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One application of the 15-point rule. Returns `(kronrod, |kronrod - gauss|, integral of |f|)`.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * libm::fabs(fc);
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let (f1, f2) = (f(center - dx), f(center + dx));
        kronrod += w * (f1 + f2);
        abs += w * (libm::fabs(f1) + libm::fabs(f2));
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let hl = libm::fabs(half);
    (kronrod * half, libm::fabs((kronrod - gauss) * half), abs * hl)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error: f64,
    /// Sorted endpoints of the final subintervals.
    pub partition: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive integration of `f` over `[a, b]` to absolute tolerance
/// `abs_tol`: the panel with the largest error estimate is bisected until the
/// summed estimate meets the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(GaugeError::invalid("quadrature bounds", "must be finite"));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error: 0.0,
            partition: alloc::vec![a, b],
        });
    }
    let panel = |a: f64, b: f64| {
        let (value, error, _) = gauss_kronrod_15(&f, a, b);
        Panel { a, b, value, error }
    };
    let mut panels = alloc::vec![panel(a, b)];
    loop {
        let (total, err): (f64, f64) = panels.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !total.is_finite() {
            return Err(GaugeError::NonFinite {
                quantity: "integrand",
                r: crate::Vec3::ZERO,
                t: a,
            });
        }
        let (worst, wp) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, p)| (i, *p))
            .unwrap();
        let mid = 0.5 * (wp.a + wp.b);
        let unresolvable = mid <= wp.a.min(wp.b) || mid >= wp.a.max(wp.b);
        if err <= abs_tol || unresolvable || panels.len() >= MAX_INTERVALS {
            if err > abs_tol && !unresolvable {
                return Err(GaugeError::QuadratureFailed {
                    a,
                    b,
                    tolerance: abs_tol,
                    estimate: err,
                });
            }
            let mut partition: Vec<f64> = panels.iter().map(|p| p.a).collect();
            partition.push(b);
            partition.sort_by(|x, y| if a < b { x.total_cmp(y) } else { y.total_cmp(x) });
            return Ok(QuadratureResult {
                value: total,
                abs_error: err,
                partition,
            });
        }
        panels[worst] = panel(wp.a, mid);
        panels.push(panel(mid, wp.b));
    }
}

/// Fixed composite 15-point rule over the given partition.
pub fn integrate_on_partition<F: Fn(f64) -> f64>(f: F, partition: &[f64]) -> f64 {
    partition.windows(2).map(|w| gauss_kronrod_15(&f, w[0], w[1]).0).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_to_tolerance() {
        let r = integrate(|x| libm::sin(10.0 * x), 0.0, PI, 1e-10).unwrap();
        assert!((r.value - 0.0).abs() < 1e-10, "{}", r.value);
        assert!(r.abs_error <= 1e-10);
        let r = integrate(|x| libm::exp(-x * x), -6.0, 6.0, 1e-12).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reversed_bounds_negate() {
        let f = |x: f64| libm::cos(x) + x;
        let ab = integrate(f, 0.0, 1.5, 1e-12).unwrap().value;
        let ba = integrate(f, 1.5, 0.0, 1e-12).unwrap().value;
        assert!((ab + ba).abs() < 1e-14);
    }

    #[test]
    fn kink_is_resolved() {
        let r = integrate(|x: f64| x.abs(), -1.0, 2.0, 1e-10).unwrap();
        assert!((r.value - 2.5).abs() < 1e-10);
    }

    #[test]
    fn doubling_nodes_stays_within_estimate() {
        let f = |x: f64| libm::sin(x) * libm::exp(0.1 * x) + 1.0 / (1.0 + x * x);
        let r = integrate(f, 0.0, 20.0, 1e-10).unwrap();
        let mut doubled = alloc::vec::Vec::new();
        for w in r.partition.windows(2) {
            doubled.push(w[0]);
            doubled.push(0.5 * (w[0] + w[1]));
        }
        doubled.push(*r.partition.last().unwrap());
        let refined = integrate_on_partition(f, &doubled);
        assert!((refined - r.value).abs() <= r.abs_error.max(1e-15));
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-10).unwrap().value, 0.0);
    }
}
