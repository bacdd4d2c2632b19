// forward and inverse fast-vs-dense across degrees (exact-entry reference)
use num_complex::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sphbt_core::dlop::{ddlop_eval, dlop_eval, EvalStrategy};
use rustdct::DctPlanner;
use sphbt_core::radial::{RadialGrid, RadialTransformPlan, RadialVector, Representation};

fn exact_row(l: usize, logical: usize, p: usize, count: usize) -> Vec<f64> {
    let v: f64 = dlop_eval(l, -1, 2 * logical - 1, EvalStrategy::ExactCoefficient).unwrap();
    let alpha = (1.0 + v) / (2.0 * v.sqrt());
    let mut row = vec![0.0; count];
    for m in p..=logical.min(count + p - 1) {
        let d: f64 =
            ddlop_eval(l, (logical - m) as i64, 2 * logical, EvalStrategy::ExactCoefficient)
                .unwrap();
        let theta = if m == logical { 0.5 } else { 1.0 };
        let w = if m == 0 { 0.5f64.sqrt() } else { 1.0 };
        let mut t = theta * d * w;
        if m == logical {
            t += 1.0;
        }
        row[m - p] = alpha * t;
    }
    row
}

fn main() {
    let mut rng = StdRng::seed_from_u64(23);
    let mut planner = DctPlanner::new();
    for (l, n) in [(16usize, 256usize), (32, 256), (48, 256), (64, 256), (64, 1024)] {
        let t0 = std::time::Instant::now();
        let pl = RadialTransformPlan::<f64>::with_max_degree(
            l,
            RadialGrid::new(0.1, n).unwrap(),
            64,
            &mut planner,
        )
        .unwrap();
        let build = t0.elapsed();
        let p = pl.momentum().parity_offset();
        let n0 = pl.momentum().first_regular();
        let values: Vec<Complex<f64>> = (0..n)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let scale = values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let logical = j + p;
                if logical < n0 {
                    pl.ftb_dense_row(logical).unwrap()
                } else {
                    exact_row(l, logical, p, n)
                }
            })
            .collect();

        let x = RadialVector::new(Representation::Fourier, values.clone());
        let fast = pl.ftb_forward(&x).unwrap();
        let mut worst_f = 0.0f64;
        for j in 0..n {
            let mut acc = Complex::new(0.0, 0.0);
            for m in 0..n {
                acc += values[m] * rows[j][m];
            }
            worst_f = worst_f.max((fast.values()[j] - acc).norm());
        }
        let xb = RadialVector::new(Representation::Bessel, values.clone());
        let fasti = pl.ftb_inverse(&xb).unwrap();
        let mut worst_i = 0.0f64;
        for m in 0..n {
            let mut acc = Complex::new(0.0, 0.0);
            for j in 0..n {
                acc += values[j] * rows[j][m];
            }
            worst_i = worst_i.max((fasti.values()[m] - acc).norm());
        }
        println!(
            "l={l:2} n={n:4} build={build:9.3?}  fwd rel {:.3e}  inv rel {:.3e}",
            worst_f / scale,
            worst_i / scale
        );
    }
}
