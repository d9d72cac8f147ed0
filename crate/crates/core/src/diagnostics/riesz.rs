use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::fields::{Bc, ScalarField};

pub const DEFAULT_PADDING: usize = 4;

fn fft2(data: &mut [Complex<f64>], nx: usize, ny: usize, inverse: bool, planner: &mut FftPlanner<f64>) {
    let (px, py) = if inverse {
        (planner.plan_fft_inverse(nx), planner.plan_fft_inverse(ny))
    } else {
        (planner.plan_fft_forward(nx), planner.plan_fft_forward(ny))
    };
    for row in data.chunks_exact_mut(nx) {
        px.process(row);
    }
    let mut col = vec![Complex::default(); ny];
    for i in 0..nx {
        for j in 0..ny {
            col[j] = data[j * nx + i];
        }
        py.process(&mut col);
        for j in 0..ny {
            data[j * nx + i] = col[j];
        }
    }
}

fn angular(m: usize, n: usize, len: f64) -> f64 {
    let k = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
    2.0 * PI * k / len
}

/// `A_j f` with symbol `-i xi_j / |xi|^2`, evaluated on a periodic box
/// `padding` times larger than the domain with `f` extended by zero.
/// `axis` is 0 for `x` and 1 for `y`. The mean mode is dropped.
pub fn riesz_a(f: &ScalarField, axis: usize, padding: usize) -> Result<ScalarField> {
    if axis > 1 {
        return Err(Error::Parameter(format!("axis must be 0 or 1, got {axis}")));
    }
    if padding < 1 {
        return Err(Error::Parameter("padding factor must be at least 1".into()));
    }
    let d = *f.domain();
    let (nx, ny) = (d.nx * padding, d.ny * padding);
    let (bx, by) = (d.lx * padding as f64, d.ly * padding as f64);
    let mut buf = vec![Complex::default(); nx * ny];
    for j in 0..d.ny {
        for i in 0..d.nx {
            buf[j * nx + i] = Complex::new(f.at(i, j), 0.0);
        }
    }
    let mut planner = FftPlanner::new();
    fft2(&mut buf, nx, ny, false, &mut planner);
    for my in 0..ny {
        let ky = angular(my, ny, by);
        for mx in 0..nx {
            let kx = angular(mx, nx, bx);
            let k2 = kx * kx + ky * ky;
            let p = my * nx + mx;
            buf[p] = if k2 == 0.0 {
                Complex::default()
            } else {
                let xi = if axis == 0 { kx } else { ky };
                buf[p] * Complex::new(0.0, -xi / k2)
            };
        }
    }
    fft2(&mut buf, nx, ny, true, &mut planner);
    let scale = 1.0 / (nx * ny) as f64;
    let data = (0..d.len()).map(|p| buf[(p / d.nx) * nx + p % d.nx].re * scale).collect();
    ScalarField::new(d, Bc::Free, data)
}
