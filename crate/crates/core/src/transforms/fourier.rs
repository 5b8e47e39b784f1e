use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::{FeatureVector, Layout, Segment};
use crate::grid::QuantizedMeasure;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }
}

/// Unnormalized 2-D DFT with negative exponent:
/// `F[l1][l2] = sum_{i,j} m[i][j] exp(-2 pi i (l1 i / r + l2 j / s))`.
///
/// Rows then columns are transformed with `rustfft`, which picks radix kernels for smooth
/// sizes and Bluestein's algorithm for large prime factors.
pub fn dft2d(m: &QuantizedMeasure) -> ComplexMatrix {
    let (rows, cols) = (m.rows(), m.cols());
    let mut data: Vec<Complex64> = m.as_slice().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    if rows == 0 || cols == 0 {
        return ComplexMatrix { rows, cols, data };
    }
    let mut planner = FftPlanner::<f64>::new();

    let row_fft = planner.plan_fft_forward(cols);
    let mut scratch = vec![Complex64::default(); row_fft.get_inplace_scratch_len()];
    row_fft.process_with_scratch(&mut data, &mut scratch);

    let col_fft = planner.plan_fft_forward(rows);
    let mut column = vec![Complex64::default(); rows];
    scratch.resize(col_fft.get_inplace_scratch_len(), Complex64::default());
    for j in 0..cols {
        for i in 0..rows {
            column[i] = data[i * cols + j];
        }
        col_fft.process_with_scratch(&mut column, &mut scratch);
        for i in 0..rows {
            data[i * cols + j] = column[i];
        }
    }
    ComplexMatrix { rows, cols, data }
}

/// Phase in `(-pi, pi]`, with the phase of zero defined as 0.
fn phase(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Magnitudes followed by phases of the 2-D DFT, each flattened row-major.
pub fn transform_fourier(m: &QuantizedMeasure) -> FeatureVector {
    let f = dft2d(m);
    let mut values: Vec<f64> = f.data.iter().map(|z| z.norm()).collect();
    values.extend(f.data.iter().map(|&z| phase(z)));
    let layout = Layout {
        segments: vec![
            Segment::new("mag", f.rows, f.cols),
            Segment::new("phase", f.rows, f.cols),
        ],
    };
    FeatureVector::new(values, layout).expect("DFT of finite input is finite")
}
