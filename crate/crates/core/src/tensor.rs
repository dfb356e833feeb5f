//! Two-dimensional grid functions and tensor-product means.
//!
//! Samples are row-major: entry `(i, j)` sits at `i * 2^K + j` and is the value
//! at `(i/2^K, j/2^K)`. Axis 0 is the first variable, so operating along axis 0
//! transforms every column and operating along axis 1 transforms every row.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::GridSpec;
use crate::error::{Error, Result};
use crate::maximal::{llogl_values, quantiles, weak_quasinorm_values, IndexSubsequence};
use crate::sampling::random_nonnegative_2d;
use crate::summability::{kernel_v, TransformationMatrix};
use crate::walsh::{hadamard_in_place, same_spec, GridFunction1D};

/// Piecewise-constant function on the `2^K × 2^K` dyadic cells of the unit square.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction2D {
    spec: GridSpec,
    samples: Vec<f64>,
}

impl GridFunction2D {
    pub fn new(spec: GridSpec, samples: Vec<f64>) -> Result<Self> {
        let expected = spec.size() * spec.size();
        if samples.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: samples.len(),
            });
        }
        Ok(Self { spec, samples })
    }

    pub fn constant(spec: GridSpec, value: f64) -> Self {
        Self {
            spec,
            samples: vec![value; spec.size() * spec.size()],
        }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::constant(spec, 0.0)
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(usize, usize) -> f64) -> Self {
        let n = spec.size();
        Self {
            spec,
            samples: (0..n * n).map(|p| f(p / n, p % n)).collect(),
        }
    }

    /// `f(x⁰) g(x¹)`.
    pub fn separable(f: &GridFunction1D, g: &GridFunction1D) -> Result<Self> {
        same_spec(f.spec(), g.spec())?;
        let (a, b) = (f.samples(), g.samples());
        Ok(Self::from_fn(f.spec(), |i, j| a[i] * b[j]))
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    /// Cells per axis.
    pub fn side(&self) -> usize {
        self.spec.size()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.samples[i * self.side() + j]
    }

    pub fn value(&self, i: usize, j: usize) -> Result<f64> {
        self.spec.check_index(i)?;
        self.spec.check_index(j)?;
        Ok(self.at(i, j))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            spec: self.spec,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        same_spec(self.spec, other.spec)?;
        Ok(Self {
            spec: self.spec,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    fn cell_area(&self) -> f64 {
        1.0 / self.samples.len() as f64
    }

    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.cell_area()
    }

    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).sum::<f64>() * self.cell_area()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        same_spec(self.spec, other.spec)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn transpose(&self) -> Self {
        let n = self.side();
        Self::from_fn(self.spec, |i, j| self.samples[j * n + i])
    }
}

/// Multiplies every row's natural-order Hadamard spectrum by `multiplier` and transforms back.
fn filter_rows(samples: &mut [f64], side: usize, multiplier: &[f64]) {
    samples.par_chunks_mut(side).for_each(|row| {
        hadamard_in_place(row);
        for (v, m) in row.iter_mut().zip(multiplier) {
            *v *= m;
        }
        hadamard_in_place(row);
    });
}

/// Applies a Paley-indexed spectral weight along one axis.
fn weight_axis(f: &GridFunction2D, weights: &[f64], axis: usize) -> Result<GridFunction2D> {
    let spec = f.spec;
    let side = spec.size();
    let inv = 1.0 / side as f64;
    let multiplier: Vec<f64> = (0..side).map(|i| weights[spec.bit_reverse(i)] * inv).collect();
    match axis {
        0 => {
            let mut t = f.transpose();
            filter_rows(&mut t.samples, side, &multiplier);
            Ok(t.transpose())
        }
        1 => {
            let mut out = f.clone();
            filter_rows(&mut out.samples, side, &multiplier);
            Ok(out)
        }
        other => Err(Error::InvalidParameter(format!("axis must be 0 or 1, got {other}"))),
    }
}

/// One-dimensional mean of order `n` along `axis`, the other variable frozen.
pub fn apply_axis(matrix: &TransformationMatrix, n: u64, f: &GridFunction2D, axis: usize) -> Result<GridFunction2D> {
    f.spec.check_order(n)?;
    let weights = matrix.mean_weights(n, f.side())?;
    weight_axis(f, &weights, axis)
}

/// Dyadic convolution of every slice along `axis` with a one-dimensional kernel.
pub fn convolve_axis(f: &GridFunction2D, kernel: &GridFunction1D, axis: usize) -> Result<GridFunction2D> {
    same_spec(f.spec, kernel.spec())?;
    let spectrum = crate::walsh::fwht(kernel);
    weight_axis(f, spectrum.coefficients(), axis)
}

/// `T¹_{n¹}(T⁰_{n⁰} f)`: axis 0 first.
pub fn tensor_mean(
    t0: &TransformationMatrix,
    n0: u64,
    t1: &TransformationMatrix,
    n1: u64,
    f: &GridFunction2D,
) -> Result<GridFunction2D> {
    let first = apply_axis(t0, n0, f, 0)?;
    apply_axis(t1, n1, &first, 1)
}

/// `T⁰_{n⁰}(T¹_{n¹} f)`: axis 1 first.
pub fn tensor_mean_reversed(
    t0: &TransformationMatrix,
    n0: u64,
    t1: &TransformationMatrix,
    n1: u64,
    f: &GridFunction2D,
) -> Result<GridFunction2D> {
    let first = apply_axis(t1, n1, f, 1)?;
    apply_axis(t0, n0, &first, 0)
}

fn pointwise_max_into(acc: &mut [f64], g: &GridFunction2D) {
    for (a, v) in acc.iter_mut().zip(&g.samples) {
        *a = a.max(v.abs());
    }
}

/// `sup_{a,b} |(T⁰_{n_a} ⊗ T¹_{n_b}) f|`.
pub fn tensor_maximal(
    t0: &TransformationMatrix,
    sub0: &IndexSubsequence,
    t1: &TransformationMatrix,
    sub1: &IndexSubsequence,
    f: &GridFunction2D,
) -> Result<GridFunction2D> {
    sub0.check_fits(f.spec)?;
    sub1.check_fits(f.spec)?;
    let mut best = vec![0.0; f.samples.len()];
    for &a in sub0.indices() {
        let first = apply_axis(t0, a, f, 0)?;
        for &b in sub1.indices() {
            pointwise_max_into(&mut best, &apply_axis(t1, b, &first, 1)?);
        }
    }
    GridFunction2D::new(f.spec, best)
}

/// `sup_a (sup_b |T¹_{n_b} f|) ∗₀ |V⁰_{n_a}|`, a pointwise majorant of [`tensor_maximal`].
pub fn iterated_majorant(
    t0: &TransformationMatrix,
    sub0: &IndexSubsequence,
    t1: &TransformationMatrix,
    sub1: &IndexSubsequence,
    f: &GridFunction2D,
) -> Result<GridFunction2D> {
    sub0.check_fits(f.spec)?;
    sub1.check_fits(f.spec)?;
    let mut inner = vec![0.0; f.samples.len()];
    for &b in sub1.indices() {
        pointwise_max_into(&mut inner, &apply_axis(t1, b, f, 1)?);
    }
    let inner = GridFunction2D::new(f.spec, inner)?;
    let mut best = vec![0.0; f.samples.len()];
    for &a in sub0.indices() {
        let kernel = kernel_v(t0, a, f.spec)?.abs();
        pointwise_max_into(&mut best, &convolve_axis(&inner, &kernel, 0)?);
    }
    GridFunction2D::new(f.spec, best)
}

/// Exact `sup_{t>0} t μ(|g| > t)` on the square.
pub fn weak_quasinorm_2d(g: &GridFunction2D) -> f64 {
    weak_quasinorm_values(&g.samples)
}

/// `∫ |f| ln⁺|f|` on the square.
pub fn llogl_2d(f: &GridFunction2D) -> f64 {
    llogl_values(&f.samples)
}

/// `f^♮(x,y) = sup_n |average of f(·,y) over I_n(x)|`, `0 ≤ n ≤ K`.
pub fn hybrid_maximal(f: &GridFunction2D) -> GridFunction2D {
    let t = f.transpose();
    let side = f.side();
    let mut out = vec![0.0; t.samples.len()];
    out.par_chunks_mut(side)
        .zip(t.samples.par_chunks(side))
        .for_each(|(dst, column)| {
            let g = GridFunction1D::new(f.spec, column.to_vec()).expect("column length");
            dst.copy_from_slice(crate::maximal::dyadic_maximal(&g).samples());
        });
    GridFunction2D {
        spec: f.spec,
        samples: out,
    }
    .transpose()
}

/// Distribution of `‖𝔗 F‖_{1,∞} / (1 + ∫|F| ln⁺|F|)` over random nonnegative `F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LloglReport {
    pub families: [String; 2],
    pub subsequences: [String; 2],
    #[serde(rename = "K")]
    pub resolution: u32,
    pub trials: usize,
    pub seed: u64,
    pub max_ratio: f64,
    pub quantiles: Vec<(f64, f64)>,
}

pub fn llogl_weak_type_experiment(
    t0: &TransformationMatrix,
    sub0: &IndexSubsequence,
    t1: &TransformationMatrix,
    sub1: &IndexSubsequence,
    trials: usize,
    spec: GridSpec,
    seed: u64,
) -> Result<LloglReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    sub0.check_fits(spec)?;
    sub1.check_fits(spec)?;
    let ratios = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let f = random_nonnegative_2d(spec, seed, t);
            let m = tensor_maximal(t0, sub0, t1, sub1, &f)?;
            Ok(weak_quasinorm_2d(&m) / (1.0 + llogl_2d(&f)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LloglReport {
        families: [t0.name().to_string(), t1.name().to_string()],
        subsequences: [sub0.label().to_string(), sub1.label().to_string()],
        resolution: spec.resolution(),
        trials,
        seed,
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        quantiles: quantiles(&ratios),
    })
}
