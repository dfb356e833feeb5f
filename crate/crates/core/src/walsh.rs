//! Walsh-Paley functions, the fast Walsh-Hadamard transform and dyadic convolution.
//!
//! The natural-order Hadamard transform indexes characters by the grid bit
//! pattern of `rev_K(n)`, so the Paley coefficient `f̂(n)` sits at position
//! `rev_K(n)` of the natural-order output.

use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicInterval, GridSpec};
use crate::error::{Error, Result};

/// Piecewise-constant function on the `2^K` dyadic cells of `[0,1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction1D {
    spec: GridSpec,
    samples: Vec<f64>,
}

impl GridFunction1D {
    pub fn new(spec: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != spec.size() {
            return Err(Error::LengthMismatch {
                expected: spec.size(),
                got: samples.len(),
            });
        }
        Ok(Self { spec, samples })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::constant(spec, 0.0)
    }

    pub fn constant(spec: GridSpec, value: f64) -> Self {
        Self {
            spec,
            samples: vec![value; spec.size()],
        }
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(usize) -> f64) -> Self {
        Self {
            spec,
            samples: (0..spec.size()).map(f).collect(),
        }
    }

    /// Indicator of a dyadic interval no finer than the grid.
    pub fn indicator(spec: GridSpec, interval: &DyadicInterval) -> Result<Self> {
        let cells = interval.cell_range(spec)?;
        Ok(Self::from_fn(spec, |l| if cells.contains(&l) { 1.0 } else { 0.0 }))
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn value(&self, index: usize) -> Result<f64> {
        self.spec.check_index(index)?;
        Ok(self.samples[index])
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

    /// `∫ f`.
    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.spec.cell_width()
    }

    /// `‖f‖₁`.
    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).sum::<f64>() * self.spec.cell_width()
    }

    /// `‖f‖₂²`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() * self.spec.cell_width()
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

    /// `x ↦ f(x ∔ y)` for a grid point `y`.
    pub fn translate(&self, y: usize) -> Result<Self> {
        self.spec.check_index(y)?;
        Ok(Self::from_fn(self.spec, |l| self.samples[l ^ y]))
    }
}

pub(crate) fn same_spec(a: GridSpec, b: GridSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ResolutionMismatch {
            left: a.resolution(),
            right: b.resolution(),
        })
    }
}

/// Walsh-Paley coefficients `f̂(0), …, f̂(2^K − 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalshSpectrum {
    spec: GridSpec,
    coefficients: Vec<f64>,
}

impl WalshSpectrum {
    pub fn new(spec: GridSpec, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != spec.size() {
            return Err(Error::LengthMismatch {
                expected: spec.size(),
                got: coefficients.len(),
            });
        }
        Ok(Self { spec, coefficients })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coefficients
    }

    /// `Σ f̂(i)²`.
    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }
}

/// Unnormalized natural-order Hadamard transform in place.
pub fn hadamard_in_place(data: &mut [f64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Paley coefficients from samples, in place: `data[n] ← f̂(n)`.
pub fn forward_in_place(data: &mut [f64], spec: GridSpec) {
    hadamard_in_place(data);
    bit_reverse_permute(data, spec);
    let scale = spec.cell_width();
    data.iter_mut().for_each(|v| *v *= scale);
}

/// Samples from Paley coefficients, in place.
pub fn inverse_in_place(data: &mut [f64], spec: GridSpec) {
    bit_reverse_permute(data, spec);
    hadamard_in_place(data);
}

fn bit_reverse_permute(data: &mut [f64], spec: GridSpec) {
    for i in 0..data.len() {
        let j = spec.bit_reverse(i);
        if i < j {
            data.swap(i, j);
        }
    }
}

/// `w_n` sampled on the grid: `(−1)^{Σ ε_k(n) x_k}`.
pub fn walsh_sample(n: u64, spec: GridSpec) -> Result<GridFunction1D> {
    if n >= spec.size() as u64 {
        return Err(Error::OrderTooLarge {
            n,
            resolution: spec.resolution(),
        });
    }
    let pattern = spec.bit_reverse(n as usize);
    Ok(GridFunction1D::from_fn(spec, |l| {
        if (pattern & l).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }))
}

pub fn fwht(f: &GridFunction1D) -> WalshSpectrum {
    let mut data = f.samples.clone();
    forward_in_place(&mut data, f.spec);
    WalshSpectrum {
        spec: f.spec,
        coefficients: data,
    }
}

pub fn inverse_fwht(spectrum: &WalshSpectrum) -> GridFunction1D {
    let mut data = spectrum.coefficients.clone();
    inverse_in_place(&mut data, spectrum.spec);
    GridFunction1D {
        spec: spectrum.spec,
        samples: data,
    }
}

/// Multiplies each coefficient `f̂(j)` by `weights(j)` and transforms back.
pub fn spectral_multiply(f: &GridFunction1D, weights: impl Fn(usize) -> f64) -> GridFunction1D {
    let mut spectrum = fwht(f);
    for (j, c) in spectrum.coefficients.iter_mut().enumerate() {
        *c *= weights(j);
    }
    inverse_fwht(&spectrum)
}

/// Grid function whose Paley coefficients are `weights(j)`.
pub fn from_coefficients(spec: GridSpec, weights: impl Fn(usize) -> f64) -> GridFunction1D {
    let mut data: Vec<f64> = (0..spec.size()).map(weights).collect();
    inverse_in_place(&mut data, spec);
    GridFunction1D { spec, samples: data }
}

/// `S_m f = Σ_{i<m} f̂(i) w_i`.
pub fn partial_sum(f: &GridFunction1D, m: u64) -> Result<GridFunction1D> {
    f.spec.check_order(m)?;
    Ok(spectral_multiply(f, |j| if (j as u64) < m { 1.0 } else { 0.0 }))
}

/// `D_n = Σ_{k<n} w_k`.
pub fn dirichlet_kernel(n: u64, spec: GridSpec) -> Result<GridFunction1D> {
    spec.check_order(n)?;
    Ok(from_coefficients(spec, |j| if (j as u64) < n { 1.0 } else { 0.0 }))
}

/// `K_n = (1/n) Σ_{k=1}^{n} D_k`, with `K_0 = 0`.
pub fn fejer_kernel(n: u64, spec: GridSpec) -> Result<GridFunction1D> {
    spec.check_order(n)?;
    if n == 0 {
        return Ok(GridFunction1D::zeros(spec));
    }
    let n_f = n as f64;
    Ok(from_coefficients(spec, |j| {
        let j = j as u64;
        if j < n {
            (n - j) as f64 / n_f
        } else {
            0.0
        }
    }))
}

/// Plateau form of `K_{2^m}`:
/// `½((2^m+1) 1_{I_m}(x) + Σ_{j<m} 2^j 1_{I_m(x ∔ 2^{−j−1})})`.
pub fn fejer_power_closed_form(m: u32, spec: GridSpec) -> Result<GridFunction1D> {
    spec.check_depth(m)?;
    let k = spec.resolution();
    let block = |l: usize| l >> (k - m);
    Ok(GridFunction1D::from_fn(spec, |l| {
        let b = block(l);
        if b == 0 {
            return 0.5 * ((1u64 << m) + 1) as f64;
        }
        // x ∔ 2^{-j-1} lies in I_m exactly when the depth-m block of x is the single bit for digit j
        if b.is_power_of_two() {
            let j = m - 1 - b.trailing_zeros();
            0.5 * (1u64 << j) as f64
        } else {
            0.0
        }
    }))
}

/// `(f ∗ g)(x) = ∫ f(t) g(x ∔ t) dt` via the convolution theorem.
pub fn dyadic_convolve(f: &GridFunction1D, g: &GridFunction1D) -> Result<GridFunction1D> {
    same_spec(f.spec, g.spec)?;
    let mut a = f.samples.clone();
    let mut b = g.samples.clone();
    hadamard_in_place(&mut a);
    hadamard_in_place(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    hadamard_in_place(&mut a);
    let n = f.spec.size() as f64;
    let scale = 1.0 / (n * n);
    a.iter_mut().for_each(|v| *v *= scale);
    Ok(GridFunction1D {
        spec: f.spec,
        samples: a,
    })
}

/// Direct `O(4^K)` evaluation of the dyadic convolution.
pub fn dyadic_convolve_naive(f: &GridFunction1D, g: &GridFunction1D) -> Result<GridFunction1D> {
    same_spec(f.spec, g.spec)?;
    let w = f.spec.cell_width();
    Ok(GridFunction1D::from_fn(f.spec, |l| {
        f.samples
            .iter()
            .enumerate()
            .map(|(j, fj)| fj * g.samples[l ^ j])
            .sum::<f64>()
            * w
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicInterval;
    use crate::sampling::random_signed;

    fn spec(k: u32) -> GridSpec {
        GridSpec::new(k).unwrap()
    }

    /// Rademacher products straight from the digit definition.
    fn walsh_by_digits(n: u64, k: u32, l: usize) -> f64 {
        let mut sign = 1.0;
        for bit in 0..k.min(64) {
            let eps = (n >> bit) & 1;
            let digit = (l >> (k - 1 - bit)) & 1;
            if eps == 1 && digit == 1 {
                sign = -sign;
            }
        }
        sign
    }

    fn naive_coefficients(f: &GridFunction1D) -> Vec<f64> {
        let k = f.spec().resolution();
        let n = f.len();
        (0..n)
            .map(|i| {
                f.samples()
                    .iter()
                    .enumerate()
                    .map(|(l, v)| v * walsh_by_digits(i as u64, k, l))
                    .sum::<f64>()
                    / n as f64
            })
            .collect()
    }

    #[test]
    fn walsh_examples() {
        assert_eq!(walsh_sample(0, spec(2)).unwrap().samples(), &[1.0; 4]);
        assert_eq!(walsh_sample(1, spec(2)).unwrap().samples(), &[1.0, 1.0, -1.0, -1.0]);
        assert_eq!(walsh_sample(3, spec(2)).unwrap().samples(), &[1.0, -1.0, -1.0, 1.0]);
        assert!(walsh_sample(4, spec(2)).is_err());
    }

    #[test]
    fn walsh_matches_digit_definition() {
        for n in 0..64u64 {
            let w = walsh_sample(n, spec(6)).unwrap();
            for l in 0..64 {
                assert_eq!(w.samples()[l], walsh_by_digits(n, 6, l));
            }
        }
    }

    #[test]
    fn fwht_of_character_is_unit_vector() {
        let c = fwht(&walsh_sample(5, spec(3)).unwrap());
        for (i, &v) in c.coefficients().iter().enumerate() {
            assert_eq!(v, if i == 5 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn fwht_of_half_indicator() {
        for k in 1..6 {
            let f = GridFunction1D::indicator(spec(k), &DyadicInterval::origin(1)).unwrap();
            let c = fwht(&f);
            for (i, &v) in c.coefficients().iter().enumerate() {
                let expected = if i < 2 { 0.5 } else { 0.0 };
                assert!((v - expected).abs() < 1e-15);
            }
            assert_eq!(partial_sum(&f, 2).unwrap(), f);
        }
    }

    #[test]
    fn fwht_matches_naive_transform() {
        let f = random_signed(spec(6), 11);
        let fast = fwht(&f);
        for (a, b) in fast.coefficients().iter().zip(naive_coefficients(&f)) {
            assert!((a - b).abs() < 1e-12);
        }
        let back = inverse_fwht(&fast);
        assert!(back.max_abs_diff(&f).unwrap() < 1e-12);
    }

    #[test]
    fn partial_sum_edges() {
        let f = random_signed(spec(5), 3);
        assert!(partial_sum(&f, 32).unwrap().max_abs_diff(&f).unwrap() < 1e-12);
        let mean = f.integral();
        let s1 = partial_sum(&f, 1).unwrap();
        assert!(s1.samples().iter().all(|v| (v - mean).abs() < 1e-12));
        assert!(partial_sum(&f, 0).unwrap().sup_norm() < 1e-15);
        assert!(partial_sum(&f, 33).is_err());
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_kernel(0, spec(3)).unwrap().sup_norm(), 0.0);
        assert_eq!(dirichlet_kernel(3, spec(2)).unwrap().samples(), &[3.0, 1.0, 1.0, -1.0]);
        let d4 = dirichlet_kernel(4, spec(4)).unwrap();
        for (l, &v) in d4.samples().iter().enumerate() {
            assert_eq!(v, if l < 4 { 4.0 } else { 0.0 });
        }
        // oracle: direct sum of characters
        for n in 0..=16u64 {
            let mut direct = [0.0; 16];
            for k in 0..n {
                for (l, d) in direct.iter_mut().enumerate() {
                    *d += walsh_by_digits(k, 4, l);
                }
            }
            assert_eq!(dirichlet_kernel(n, spec(4)).unwrap().samples(), &direct[..]);
        }
    }

    #[test]
    fn fejer_examples() {
        let k1 = fejer_kernel(1, spec(3)).unwrap();
        assert!(k1.samples().iter().all(|v| (v - 1.0).abs() < 1e-15));
        let k2 = fejer_kernel(2, spec(2)).unwrap();
        for (l, &v) in k2.samples().iter().enumerate() {
            assert!((v - if l < 2 { 1.5 } else { 0.5 }).abs() < 1e-15);
        }
        // oracle: average of Dirichlet kernels
        for n in 1..=32u64 {
            let mut avg = vec![0.0; 32];
            for k in 1..=n {
                let d = dirichlet_kernel(k, spec(5)).unwrap();
                for (a, v) in avg.iter_mut().zip(d.samples()) {
                    *a += v / n as f64;
                }
            }
            let kn = fejer_kernel(n, spec(5)).unwrap();
            for (a, b) in kn.samples().iter().zip(&avg) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fejer_closed_form_at_powers() {
        let s = spec(8);
        for m in 0..=8 {
            let direct = fejer_kernel(1 << m, s).unwrap();
            let closed = fejer_power_closed_form(m, s).unwrap();
            assert!(direct.max_abs_diff(&closed).unwrap() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn fejer_l1_norm_bounded_by_two() {
        let s = spec(9);
        for n in 1..=512u64 {
            assert!(fejer_kernel(n, s).unwrap().l1_norm() <= 2.0);
        }
    }

    #[test]
    fn convolution_examples() {
        let s = spec(6);
        let f = random_signed(s, 5);
        let g = random_signed(s, 6);
        let fast = dyadic_convolve(&f, &g).unwrap();
        let naive = dyadic_convolve_naive(&f, &g).unwrap();
        assert!(fast.max_abs_diff(&naive).unwrap() < 1e-10);
        for n in 0..=6 {
            let d = dirichlet_kernel(1 << n, s).unwrap();
            let conv = dyadic_convolve(&f, &d).unwrap();
            let sum = partial_sum(&f, 1 << n).unwrap();
            assert!(conv.max_abs_diff(&sum).unwrap() < 1e-12);
        }
        let coeffs = fwht(&f);
        for n in [0u64, 3, 17, 63] {
            let w = walsh_sample(n, s).unwrap();
            let conv = dyadic_convolve(&f, &w).unwrap();
            let expected = w.scale(coeffs.coefficients()[n as usize]);
            assert!(conv.max_abs_diff(&expected).unwrap() < 1e-12);
        }
        assert!(dyadic_convolve(&f, &random_signed(spec(5), 1)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn parseval_and_round_trip(k in 1u32..10, seed in any::<u64>()) {
                let f = random_signed(spec(k), seed);
                let c = fwht(&f);
                prop_assert!((f.energy() - c.energy()).abs() < 1e-12 * (1.0 + f.energy()));
                prop_assert!(inverse_fwht(&c).max_abs_diff(&f).unwrap() < 1e-12);
            }

            #[test]
            fn characters_multiply(k in 1u32..9, a in any::<u64>(), b in any::<u64>()) {
                let s = spec(k);
                let (a, b) = (a % s.size() as u64, b % s.size() as u64);
                let prod = walsh_sample(a, s).unwrap()
                    .zip_with(&walsh_sample(b, s).unwrap(), |x, y| x * y).unwrap();
                prop_assert_eq!(prod, walsh_sample(a ^ b, s).unwrap());
            }

            #[test]
            fn convolution_is_translation_covariant(k in 1u32..8, seed in any::<u64>(), y in any::<usize>()) {
                let s = spec(k);
                let y = y % s.size();
                let f = random_signed(s, seed);
                let g = random_signed(s, seed.wrapping_add(1));
                let lhs = dyadic_convolve(&f.translate(y).unwrap(), &g).unwrap();
                let rhs = dyadic_convolve(&f, &g).unwrap().translate(y).unwrap();
                prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
            }
        }
    }
}
