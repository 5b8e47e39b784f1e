use std::f64::consts::FRAC_1_SQRT_2;

use super::{FeatureVector, Layout, Segment, TransformKind};
use crate::error::{Error, Result};
use crate::grid::QuantizedMeasure;

// Scaling filters (lowpass decomposition taps) of the orthogonal Daubechies and Coiflet
// families, from Daubechies (1992).
const DB1: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
const DB2: [f64; 4] = [
    0.48296291314453416,
    0.8365163037378079,
    0.2241438680420134,
    -0.12940952255126037,
];
const DB3: [f64; 6] = [
    0.33267055295008263,
    0.8068915093110925,
    0.45987750211849154,
    -0.13501102001025458,
    -0.08544127388202666,
    0.03522629188570953,
];
const COIF1: [f64; 6] = [
    -0.07273261951252645,
    0.3378976624574818,
    0.8525720202116004,
    0.3848648468648578,
    -0.07273261951252645,
    -0.015655728135791993,
];
const COIF2: [f64; 12] = [
    0.01638733646320364,
    -0.04146493678687178,
    -0.0673725547237256,
    0.3861100668227629,
    0.8127236354494135,
    0.4170051844232391,
    -0.07648859907828076,
    -0.05943441864643109,
    0.02368017194684777,
    0.005611434819368834,
    -0.0018232088709110323,
    -0.000720549445520347,
];
const COIF3: [f64; 18] = [
    -0.003793512864380802,
    0.007782596425672746,
    0.023452696142077168,
    -0.06577191128146936,
    -0.06112339000297255,
    0.40517690240911824,
    0.7937772226260872,
    0.42848347637737,
    -0.07179982161915484,
    -0.08230192710629983,
    0.03455502757329774,
    0.015880544863669452,
    -0.009007976136730624,
    -0.0025745176881367972,
    0.0011175187708306303,
    0.0004662169598204029,
    -7.0983302506379e-05,
    -3.459977319727278e-05,
];

const FILTER_TOL: f64 = 1e-9;

/// Orthogonal two-channel filter bank: scaling filter `h` and wavelet filter `g`,
/// related by `g[k] = (-1)^k h[L-1-k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    pub lowpass: Vec<f64>,
    pub highpass: Vec<f64>,
}

impl FilterPair {
    /// Builds the pair from a scaling filter via the quadrature-mirror relation and checks
    /// normalization, unit energy and orthogonality to even shifts.
    pub fn from_lowpass(name: &str, lowpass: &[f64]) -> Result<Self> {
        let bad = |reason: String| Error::BadFilter {
            name: name.to_string(),
            reason,
        };
        let len = lowpass.len();
        if len < 2 || !len.is_multiple_of(2) {
            return Err(bad(format!("length {len} must be even and >= 2")));
        }
        let sum: f64 = lowpass.iter().sum();
        if (sum - std::f64::consts::SQRT_2).abs() > FILTER_TOL {
            return Err(bad(format!("sum {sum} != sqrt(2)")));
        }
        for shift in (0..len).step_by(2) {
            let dot: f64 = (0..len - shift).map(|k| lowpass[k] * lowpass[k + shift]).sum();
            let want = if shift == 0 { 1.0 } else { 0.0 };
            if (dot - want).abs() > FILTER_TOL {
                return Err(bad(format!("shift {shift}: <h, h(.+{shift})> = {dot}")));
            }
        }
        let highpass = (0..len)
            .map(|k| {
                let v = lowpass[len - 1 - k];
                if k % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        Ok(Self {
            lowpass: lowpass.to_vec(),
            highpass,
        })
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }
}

/// Filter bank for a wavelet transform kind. Daubechies(1) is the Haar pair.
pub fn wavelet_filters(kind: TransformKind) -> Result<FilterPair> {
    let (name, table): (&str, &[f64]) = match kind {
        TransformKind::Daubechies(1) => ("db1", &DB1),
        TransformKind::Daubechies(2) => ("db2", &DB2),
        TransformKind::Daubechies(3) => ("db3", &DB3),
        TransformKind::Coiflet(1) => ("coif1", &COIF1),
        TransformKind::Coiflet(2) => ("coif2", &COIF2),
        TransformKind::Coiflet(3) => ("coif3", &COIF3),
        TransformKind::Daubechies(order) => {
            return Err(Error::UnsupportedOrder {
                family: "daubechies",
                order,
            })
        }
        TransformKind::Coiflet(order) => {
            return Err(Error::UnsupportedOrder {
                family: "coiflet",
                order,
            })
        }
        other => return Err(Error::NotAWavelet(other.name())),
    };
    FilterPair::from_lowpass(name, table)
}

/// Single-level analysis along one axis: `out[l] = sum_k filter[k] x[2l + k]`,
/// with `x` extended by zeros; produces `ceil(n / 2)` coefficients.
fn analyze(x: &[f64], filter: &[f64], out: &mut [f64]) {
    let n = x.len();
    for (l, o) in out.iter_mut().enumerate() {
        let start = 2 * l;
        let end = (start + filter.len()).min(n);
        *o = x[start..end]
            .iter()
            .zip(filter)
            .map(|(a, b)| a * b)
            .sum();
    }
}

/// Adjoint of [`analyze`]: accumulates `x[2l + k] += filter[k] c[l]` for indices inside `x`.
fn synthesize(coeffs: &[f64], filter: &[f64], x: &mut [f64]) {
    let n = x.len();
    for (l, &c) in coeffs.iter().enumerate() {
        for (k, &f) in filter.iter().enumerate() {
            let idx = 2 * l + k;
            if idx < n {
                x[idx] += f * c;
            }
        }
    }
}

/// Approximation and detail coefficients of a single-level 2-D transform.
///
/// Axis 0 (rows) indexes birth bins and axis 1 (columns) persistence bins. `ch` is highpass
/// along rows and lowpass along columns, `cv` the reverse, `cd` highpass on both.
#[derive(Debug, Clone, PartialEq)]
pub struct Subbands {
    pub rows: usize,
    pub cols: usize,
    pub ca: Vec<f64>,
    pub ch: Vec<f64>,
    pub cv: Vec<f64>,
    pub cd: Vec<f64>,
}

/// Filters every row of a `rows x cols` row-major matrix, returning `(low, high)` of shape
/// `rows x ceil(cols / 2)`.
fn analyze_rows(data: &[f64], rows: usize, cols: usize, f: &FilterPair) -> (Vec<f64>, Vec<f64>) {
    let half = cols.div_ceil(2);
    let mut low = vec![0.0; rows * half];
    let mut high = vec![0.0; rows * half];
    for i in 0..rows {
        let row = &data[i * cols..(i + 1) * cols];
        analyze(row, &f.lowpass, &mut low[i * half..(i + 1) * half]);
        analyze(row, &f.highpass, &mut high[i * half..(i + 1) * half]);
    }
    (low, high)
}

fn transpose(data: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = data[i * cols + j];
        }
    }
    out
}

/// Separable single-level 2-D filter bank with downsampling by two on each axis and zero
/// extension outside the grid. Each subband is `ceil(r/2) x ceil(s/2)`.
pub fn dwt2_single_level(m: &QuantizedMeasure, f: &FilterPair) -> Subbands {
    let (r, s) = (m.rows(), m.cols());
    let (hr, hs) = (r.div_ceil(2), s.div_ceil(2));
    // Along columns (axis 1) first.
    let (lo_c, hi_c) = analyze_rows(m.as_slice(), r, s, f);
    // Then along rows (axis 0), working on transposes.
    let (ll, hl) = analyze_rows(&transpose(&lo_c, r, hs), hs, r, f);
    let (lh, hh) = analyze_rows(&transpose(&hi_c, r, hs), hs, r, f);
    Subbands {
        rows: hr,
        cols: hs,
        ca: transpose(&ll, hs, hr),
        ch: transpose(&hl, hs, hr),
        cv: transpose(&lh, hs, hr),
        cd: transpose(&hh, hs, hr),
    }
}

/// Inverse of [`dwt2_single_level`] onto an `rows x cols` grid.
///
/// Exact away from the grid boundary; near the boundary the coefficients lost to
/// downsampling with zero extension are not recovered.
pub fn idwt2_single_level(sb: &Subbands, f: &FilterPair, rows: usize, cols: usize) -> Vec<f64> {
    let (hr, hs) = (sb.rows, sb.cols);
    // Undo the row-axis step: columns of each subband back to length `rows`.
    let merge_axis0 = |low: &[f64], high: &[f64]| -> Vec<f64> {
        let low_t = transpose(low, hr, hs);
        let high_t = transpose(high, hr, hs);
        let mut out_t = vec![0.0; hs * rows];
        for j in 0..hs {
            let dst = &mut out_t[j * rows..(j + 1) * rows];
            synthesize(&low_t[j * hr..(j + 1) * hr], &f.lowpass, dst);
            synthesize(&high_t[j * hr..(j + 1) * hr], &f.highpass, dst);
        }
        transpose(&out_t, hs, rows)
    };
    let lo_c = merge_axis0(&sb.ca, &sb.ch);
    let hi_c = merge_axis0(&sb.cv, &sb.cd);
    let mut out = vec![0.0; rows * cols];
    for i in 0..rows {
        let dst = &mut out[i * cols..(i + 1) * cols];
        synthesize(&lo_c[i * hs..(i + 1) * hs], &f.lowpass, dst);
        synthesize(&hi_c[i * hs..(i + 1) * hs], &f.highpass, dst);
    }
    out
}

/// Concatenates `[cH, cV, cD, cA]` of the single-level 2-D transform.
pub fn transform_wavelet(m: &QuantizedMeasure, kind: TransformKind) -> Result<FeatureVector> {
    let filters = wavelet_filters(kind)?;
    let sb = dwt2_single_level(m, &filters);
    let mut values = Vec::with_capacity(4 * sb.ca.len());
    let mut segments = Vec::with_capacity(4);
    for (name, band) in [("cH", &sb.ch), ("cV", &sb.cv), ("cD", &sb.cd), ("cA", &sb.ca)] {
        values.extend_from_slice(band);
        segments.push(Segment::new(name, sb.rows, sb.cols));
    }
    FeatureVector::new(values, Layout { segments })
}
