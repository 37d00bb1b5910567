//! Adaptive Gauss–Kronrod (7, 15) quadrature, nested for several dimensions.

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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

/// `∫_a^b f` to relative tolerance `rel` (absolute floor `abs`).
pub fn integrate(mut f: impl FnMut(f64) -> Result<f64>, a: f64, b: f64, rel: f64, abs: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut intervals = vec![(a, b, gk15(&mut f, a, b)?)];
    for _ in 0..2000 {
        let total: f64 = intervals.iter().map(|(_, _, (v, _))| v).sum();
        let err: f64 = intervals.iter().map(|(_, _, (_, e))| e).sum();
        if err <= (rel * total.abs()).max(abs) {
            return Ok(total);
        }
        let (i, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| (x.1).2 .1.total_cmp(&(y.1).2 .1))
            .unwrap();
        let (lo, hi, _) = intervals.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        intervals.push((lo, mid, gk15(&mut f, lo, mid)?));
        intervals.push((mid, hi, gk15(&mut f, mid, hi)?));
    }
    Err(Error::QuadratureFailure(format!("no convergence on [{a}, {b}]")))
}

/// Nested integral over a box.
pub fn integrate_box(f: &dyn Fn(&[f64]) -> Result<f64>, lo: &[f64], hi: &[f64], rel: f64) -> Result<f64> {
    fn rec(f: &dyn Fn(&[f64]) -> Result<f64>, lo: &[f64], hi: &[f64], rel: f64, x: &mut Vec<f64>) -> Result<f64> {
        let d = x.len();
        if d == lo.len() {
            return f(x);
        }
        integrate(
            |t| {
                x.push(t);
                let v = rec(f, lo, hi, rel, x);
                x.pop();
                v
            },
            lo[d],
            hi[d],
            rel,
            1e-300,
        )
    }
    rec(f, lo, hi, rel, &mut Vec::with_capacity(lo.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| Ok(x.powi(7) - 3.0 * x), 0.0, 2.0, 1e-12, 0.0).unwrap();
        assert!((v - (32.0 - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn kink_converges() {
        let v = integrate(|x: f64| Ok(x.abs().sqrt()), -1.0, 1.0, 1e-9, 0.0).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn two_dimensional() {
        let v = integrate_box(&|x| Ok(x[0] * x[1].exp()), &[0.0, 0.0], &[1.0, 1.0], 1e-10).unwrap();
        assert!((v - 0.5 * (1f64.exp() - 1.0)).abs() < 1e-9);
    }
}
