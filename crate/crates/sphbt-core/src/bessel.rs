//! Spherical Bessel functions j_ℓ and the Riccati form χ_ℓ(x) = x·j_ℓ(x).
//!
//! Evaluation uses the upward recurrence j_{n+1} = (2n+1)/x · j_n − j_{n−1}
//! where it is stable (x ≳ ℓ) and Miller's downward recurrence normalized
//! against j_0 below the turning point, with a power-series branch for very
//! small arguments. Intended range: ℓ ≤ 128, x ≥ 0.

use crate::error::{Error, Result};
use crate::real::Real;

pub const MAX_ORDER: usize = 128;

fn check_args<S: Real>(order: usize, x: S) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::Domain(format!(
            "spherical Bessel order {order} exceeds supported maximum {MAX_ORDER}"
        )));
    }
    if x < S::zero() || !x.is_finite() {
        return Err(Error::Domain("argument must be finite and nonnegative".into()));
    }
    Ok(())
}

/// j_0..j_l by upward recurrence; valid for x not far below l.
fn upward<S: Real>(l: usize, x: S) -> Vec<S> {
    let mut out = Vec::with_capacity(l + 1);
    let j0 = x.sin() / x;
    out.push(j0);
    if l == 0 {
        return out;
    }
    let j1 = x.sin() / (x * x) - x.cos() / x;
    out.push(j1);
    for n in 1..l {
        let next = S::of_usize(2 * n + 1) / x * out[n] - out[n - 1];
        out.push(next);
    }
    out
}

/// j_0..j_l by downward (Miller) recurrence normalized against j_0.
fn downward<S: Real>(l: usize, x: S) -> Vec<S> {
    // start above both the requested order and the turning point n ≈ x, so
    // the trial solution is dominated by the recessive component by the time
    // it reaches l
    let x_ceil = x.ceil().to_usize().unwrap_or(0);
    let start = l.max(x_ceil) + 24 + (S::of(1.5) * x).sqrt().to_usize().unwrap_or(0);
    let mut jp = S::zero();
    let mut j = S::of(1e-300).max(S::min_positive_value());
    let mut out = vec![S::zero(); l + 1];
    for n in (0..start).rev() {
        let prev = S::of_usize(2 * n + 3) / x * j - jp;
        jp = j;
        j = prev;
        if n <= l {
            out[n] = j;
        }
        // rescale to dodge overflow long before it happens
        if j.fabs() > S::of(1e250) {
            let s = S::one() / j.fabs();
            j = j * s;
            jp = jp * s;
            for v in out[n..].iter_mut() {
                *v = *v * s;
            }
        }
    }
    let scale = (x.sin() / x) / out[0];
    for v in out.iter_mut() {
        *v = *v * scale;
    }
    out
}

/// Power series j_l(x) = x^l/(2l+1)!! · Σ_k (−x²/2)^k / [k! (2l+3)(2l+5)…],
/// iterated to machine convergence. Fast for x ≲ 1.
fn series<S: Real>(l: usize, x: S) -> S {
    let mut lead = S::one();
    for n in 0..l {
        // x/(2n+3) factors keep intermediates from under/overflowing
        lead = lead * x / S::of_usize(2 * n + 3);
    }
    let x2 = x * x;
    let mut term = S::one();
    let mut sum = S::one();
    for k in 1..200usize {
        term = -term * x2 / (S::of_usize(2 * k) * S::of_usize(2 * (l + k) + 1));
        sum = sum + term;
        if term.fabs() <= S::epsilon() * sum.fabs() {
            break;
        }
    }
    lead * sum
}

/// Values j_0(x)..j_l(x).
pub fn sph_j_all<S: Real>(order: usize, x: S) -> Result<Vec<S>> {
    check_args(order, x)?;
    if x.is_zero() {
        let mut out = vec![S::zero(); order + 1];
        out[0] = S::one();
        return Ok(out);
    }
    if x < S::of(0.1) {
        // all orders from the (rapidly converging) series, so consecutive
        // orders stay mutually consistent
        return Ok((0..=order).map(|l| series(l, x)).collect());
    }
    if x > S::of_usize(order.max(1)) {
        return Ok(upward(order, x));
    }
    Ok(downward(order, x))
}

/// j_l(x).
pub fn sph_j<S: Real>(order: usize, x: S) -> Result<S> {
    Ok(*sph_j_all(order, x)?.last().unwrap())
}

/// (χ_l(x), χ'_l(x)) with χ_l = x·j_l; χ'_l = j_l + x·j'_l and
/// j'_l = j_{l−1} − (l+1)/x · j_l.
pub fn chi_pair<S: Real>(order: usize, x: S) -> Result<(S, S)> {
    check_args(order, x)?;
    if x.is_zero() {
        // χ_l ~ x^{l+1}/(2l+1)!!
        let dchi = if order == 0 { S::one() } else { S::zero() };
        return Ok((S::zero(), dchi));
    }
    let j = sph_j_all(order, x)?;
    let jl = j[order];
    let chi = x * jl;
    let dj = if order == 0 {
        // j_0' = −j_1
        -(x.sin() / (x * x) - x.cos() / x)
    } else {
        j[order - 1] - S::of_usize(order + 1) / x * jl
    };
    Ok((chi, jl + x * dj))
}

/// χ''_l from the defining equation χ'' = [l(l+1)/x² − 1]·χ.
pub fn chi_second<S: Real>(order: usize, x: S, chi: S) -> S {
    (S::of_usize(order * (order + 1)) / (x * x) - S::one()) * chi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_closed_forms() {
        for &x in &[0.3f64, 1.0, 2.5, 7.0, 40.0] {
            assert!((sph_j(0, x).unwrap() - x.sin() / x).abs() < 1e-15);
            let j1 = x.sin() / (x * x) - x.cos() / x;
            assert!((sph_j(1, x).unwrap() - j1).abs() < 1e-15 + 1e-14 * j1.abs());
        }
        assert!(sph_j(0, std::f64::consts::PI).unwrap().abs() < 1e-15);
        assert!((sph_j(1, 1.0f64).unwrap() - 0.30116867893975674).abs() < 1e-15);
    }

    #[test]
    fn at_zero() {
        let v = sph_j_all(6, 0.0).unwrap();
        assert_eq!(v[0], 1.0);
        assert!(v[1..].iter().all(|x| *x == 0.0));
        let (c, dc) = chi_pair(0, 0.0).unwrap();
        assert_eq!((c, dc), (0.0, 1.0));
        let (c, dc) = chi_pair(2, 0.0).unwrap();
        assert_eq!((c, dc), (0.0, 0.0));
    }

    #[test]
    fn recurrence_residual_across_orders() {
        // j_{n+1} + j_{n−1} − (2n+1)/x·j_n = 0, including across the
        // upward/downward switch
        for &x in &[0.5f64, 3.0, 10.0, 35.0, 90.0] {
            let j = sph_j_all(128, x).unwrap();
            let scale = j.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for n in 1..127 {
                let res = j[n + 1] + j[n - 1] - (2 * n + 1) as f64 / x * j[n];
                assert!(res.abs() < 1e-12 * scale, "x={x} n={n}: {res}");
            }
        }
    }

    #[test]
    fn integral_representation() {
        // j_l(z) = (−i)^l/2 ∫_{−1}^{1} e^{izt} P_l(t) dt, evaluated with
        // composite Simpson
        fn legendre(l: usize, t: f64) -> f64 {
            let (mut p0, mut p1) = (1.0, t);
            if l == 0 {
                return p0;
            }
            for n in 1..l {
                let p2 = ((2 * n + 1) as f64 * t * p1 - n as f64 * p0) / (n + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
        for l in 0..=6usize {
            for &z in &[0.7f64, 5.0, 17.0, 50.0] {
                let m = 20000usize; // Simpson panels
                let h = 2.0 / m as f64;
                let mut acc_re = 0.0;
                let mut acc_im = 0.0;
                for i in 0..=m {
                    let t = -1.0 + i as f64 * h;
                    let w = if i == 0 || i == m {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    let p = legendre(l, t);
                    acc_re += w * p * (z * t).cos();
                    acc_im += w * p * (z * t).sin();
                }
                acc_re *= h / 3.0;
                acc_im *= h / 3.0;
                // multiply by (−i)^l/2
                let (re, im) = match l % 4 {
                    0 => (acc_re, acc_im),
                    1 => (acc_im, -acc_re),
                    2 => (-acc_re, -acc_im),
                    _ => (-acc_im, acc_re),
                };
                let integral = re / 2.0;
                assert!(im.abs() / 2.0 < 1e-10, "imaginary residue l={l} z={z}");
                let direct = sph_j(l, z).unwrap();
                assert!(
                    (integral - direct).abs() < 1e-10,
                    "l={l} z={z}: {integral} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn relative_accuracy_above_half_order() {
        // spot check against series-extended downward values at x > l/2
        // where both branches are usable; they must agree tightly
        for l in [8usize, 32, 64, 128] {
            for frac in [0.6, 0.9, 1.2, 3.0] {
                let x = frac * l as f64;
                let up = upward::<f64>(l, x)[l];
                let down = downward::<f64>(l, x)[l];
                let scale = up.abs().max(down.abs());
                if x > l as f64 {
                    assert!((up - down).abs() < 1e-11 * scale, "l={l} x={x}");
                }
            }
        }
    }

    #[test]
    fn chi_derivative_consistency() {
        // centered difference on χ matches χ' to O(h²)
        for l in [0usize, 1, 3, 8] {
            for &x in &[0.8f64, 4.0, 21.0] {
                let h = 1e-6;
                let (cp, _) = chi_pair(l, x + h).unwrap();
                let (cm, _) = chi_pair(l, x - h).unwrap();
                let (_, dc) = chi_pair(l, x).unwrap();
                let fd = (cp - cm) / (2.0 * h);
                assert!((fd - dc).abs() < 1e-8, "l={l} x={x}: {fd} vs {dc}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(sph_j(129, 1.0f64).is_err());
        assert!(sph_j(0, -1.0f64).is_err());
    }
}
