//! Maximal operators over index subsequences and the weak-type functionals used to probe them.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::GridSpec;
use crate::error::{Error, Result};
use crate::sampling::random_nonnegative;
use crate::summability::{apply_mean, kernel_v, TransformationMatrix};
use crate::walsh::{hadamard_in_place, GridFunction1D};

/// Strictly increasing, nonempty list of indices `{n_a}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSubsequence {
    indices: Vec<u64>,
    label: String,
}

impl IndexSubsequence {
    pub fn new(indices: Vec<u64>) -> Result<Self> {
        let label = format!(
            "list:{}",
            indices.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        );
        Self::labelled(indices, label)
    }

    fn labelled(indices: Vec<u64>, label: String) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySubsequence);
        }
        if let Some(pos) = indices.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NotIncreasing(pos + 1));
        }
        Ok(Self { indices, label })
    }

    /// `{2^a, …, 2^b}`.
    pub fn powers(a: u32, b: u32) -> Result<Self> {
        if b >= 63 {
            return Err(Error::InvalidParameter(format!("exponent {b} too large")));
        }
        Self::labelled((a..=b).map(|e| 1u64 << e).collect(), format!("powers:{a}..{b}"))
    }

    /// `{Σ_{j≤c} 4^j : a ≤ c ≤ b}`, whose binary digits alternate.
    pub fn alternating(a: u32, b: u32) -> Result<Self> {
        if b >= 31 {
            return Err(Error::InvalidParameter(format!("length {b} too large")));
        }
        Self::labelled(
            (a..=b).map(alternating_index).collect(),
            format!("alternating:{a}..{b}"),
        )
    }

    /// `{a, a+1, …, b}`.
    pub fn range(a: u64, b: u64) -> Result<Self> {
        Self::labelled((a..=b).collect(), format!("all:{a}..{b}"))
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn max(&self) -> u64 {
        *self.indices.last().expect("nonempty")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn check_fits(&self, spec: GridSpec) -> Result<()> {
        spec.check_order(self.max())
    }
}

/// `Σ_{j=0}^{c} 4^j`.
pub fn alternating_index(c: u32) -> u64 {
    (0..=c).map(|j| 1u64 << (2 * j)).sum()
}

impl fmt::Display for IndexSubsequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn parse_range(body: &str) -> Result<(u64, u64)> {
    let (a, b) = body
        .split_once("..")
        .ok_or_else(|| Error::Parse(format!("expected a..b, got '{body}'")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("'{t}' is not an index")))
    };
    Ok((parse(a)?, parse(b)?))
}

impl FromStr for IndexSubsequence {
    type Err = Error;

    /// `powers:a..b`, `alternating:a..b`, `list:1,3,7` or `all:1..N`; ranges are inclusive.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("subsequence '{s}' lacks a kind prefix")))?;
        let small = |v: u64| u32::try_from(v).map_err(|_| Error::Parse(format!("{v} too large")));
        match kind {
            "powers" => {
                let (a, b) = parse_range(body)?;
                Self::powers(small(a)?, small(b)?)
            }
            "alternating" => {
                let (a, b) = parse_range(body)?;
                Self::alternating(small(a)?, small(b)?)
            }
            "all" => {
                let (a, b) = parse_range(body)?;
                Self::range(a, b)
            }
            "list" => {
                let indices = body
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u64>()
                            .map_err(|_| Error::Parse(format!("'{t}' is not an index")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::new(indices)
            }
            other => Err(Error::Parse(format!("unknown subsequence kind '{other}'"))),
        }
    }
}

fn pointwise_max(mut acc: Vec<f64>, other: Vec<f64>) -> Vec<f64> {
    for (a, b) in acc.iter_mut().zip(other) {
        *a = a.max(b);
    }
    acc
}

/// `sup_a |T_{n_a} f|`.
pub fn maximal_mean(
    matrix: &TransformationMatrix,
    subseq: &IndexSubsequence,
    f: &GridFunction1D,
) -> Result<GridFunction1D> {
    subseq.check_fits(f.spec())?;
    let size = f.len();
    let best = subseq
        .indices()
        .par_iter()
        .map(|&n| apply_mean(matrix, n, f).map(|g| g.abs().into_samples()))
        .try_reduce(|| vec![0.0; size], |a, b| Ok(pointwise_max(a, b)))?;
    GridFunction1D::new(f.spec(), best)
}

/// `sup_a f ∗ |V_{n_a}|`.
pub fn maximal_abs_mean(
    matrix: &TransformationMatrix,
    subseq: &IndexSubsequence,
    f: &GridFunction1D,
) -> Result<GridFunction1D> {
    let out = abs_kernel_maximal_batch(matrix, subseq, std::slice::from_ref(f))?;
    Ok(out.into_iter().next().expect("one input"))
}

/// `sup_a f ∗ |V_{n_a}|` for several inputs sharing one resolution.
/// Each kernel is transformed once and reused across the batch.
pub fn abs_kernel_maximal_batch(
    matrix: &TransformationMatrix,
    subseq: &IndexSubsequence,
    inputs: &[GridFunction1D],
) -> Result<Vec<GridFunction1D>> {
    let Some(first) = inputs.first() else {
        return Ok(Vec::new());
    };
    let spec = first.spec();
    for f in inputs {
        crate::walsh::same_spec(spec, f.spec())?;
    }
    subseq.check_fits(spec)?;
    let size = spec.size();
    let scale = 1.0 / (size as f64 * size as f64);
    let transformed: Vec<Vec<f64>> = inputs
        .par_iter()
        .map(|f| {
            let mut h = f.samples().to_vec();
            hadamard_in_place(&mut h);
            h
        })
        .collect();
    let mut best: Vec<Vec<f64>> = vec![vec![0.0; size]; inputs.len()];
    for &n in subseq.indices() {
        let mut kernel = kernel_v(matrix, n, spec)?.abs().into_samples();
        hadamard_in_place(&mut kernel);
        best.par_iter_mut().zip(&transformed).for_each(|(acc, h)| {
            let mut product: Vec<f64> = h.iter().zip(&kernel).map(|(a, b)| a * b).collect();
            hadamard_in_place(&mut product);
            for (a, p) in acc.iter_mut().zip(product) {
                *a = a.max(p * scale);
            }
        });
    }
    best.into_iter()
        .map(|samples| GridFunction1D::new(spec, samples))
        .collect()
}

/// Averages of `f` over the dyadic intervals of depth `0..=K` containing each cell,
/// returned finest first: entry `K − d` holds the depth-`d` averages.
pub fn dyadic_averages(f: &GridFunction1D) -> Vec<Vec<f64>> {
    let k = f.spec().resolution();
    let mut levels = vec![f.samples().to_vec()];
    let mut current = f.samples().to_vec();
    for _ in 0..k {
        current = current.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        levels.push(current.clone());
    }
    levels
        .into_iter()
        .map(|coarse| {
            let width = f.len() / coarse.len();
            (0..f.len()).map(|l| coarse[l / width]).collect()
        })
        .collect()
}

/// `E* f = sup_{0≤n≤K} |E_n f|`, with `E_n f = S_{2^n} f` the depth-`n` block average.
pub fn dyadic_maximal(f: &GridFunction1D) -> GridFunction1D {
    let mut best = vec![0.0f64; f.len()];
    let mut current = f.samples().to_vec();
    let mut width = 1;
    loop {
        for (l, b) in best.iter_mut().enumerate() {
            *b = b.max(current[l / width].abs());
        }
        if current.len() == 1 {
            break;
        }
        current = current.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        width *= 2;
    }
    GridFunction1D::new(f.spec(), best).expect("length preserved")
}

/// `sup_{t>0} t μ(|g| > t)`, exact for step functions: `max_v v μ(|g| ≥ v)`.
pub fn weak_quasinorm(g: &GridFunction1D) -> f64 {
    weak_quasinorm_values(g.samples())
}

pub(crate) fn weak_quasinorm_values(values: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let cell = 1.0 / values.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| v * (i + 1) as f64 * cell)
        .fold(0.0, f64::max)
}

pub(crate) fn llogl_values(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|v| {
            let a = v.abs();
            if a > 1.0 {
                a * a.ln()
            } else {
                0.0
            }
        })
        .sum::<f64>()
        / values.len() as f64
}

/// `∫ |f| ln⁺|f|`.
pub fn llogl_norm(f: &GridFunction1D) -> f64 {
    llogl_values(f.samples())
}

/// `‖f‖_{H₁} = ‖E* f‖₁`.
pub fn h1_norm(f: &GridFunction1D) -> f64 {
    dyadic_maximal(f).l1_norm()
}

/// Which maximal operator a weak-type experiment probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaximalKind {
    /// `sup_a |T_{n_a} f|`.
    Mean,
    /// `sup_a f ∗ |V_{n_a}|`.
    AbsKernel,
    /// `E* f`.
    Dyadic,
}

impl FromStr for MaximalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Self::Mean),
            "abs-kernel" | "tilde" => Ok(Self::AbsKernel),
            "dyadic" => Ok(Self::Dyadic),
            other => Err(Error::Parse(format!("unknown maximal operator '{other}'"))),
        }
    }
}

/// Empirical distribution of a ratio over random trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeReport {
    pub family: String,
    pub operator: MaximalKind,
    pub subsequence: String,
    #[serde(rename = "K")]
    pub resolution: u32,
    pub trials: usize,
    pub seed: u64,
    pub max_ratio: f64,
    /// `(q, value)` pairs by nearest rank.
    pub quantiles: Vec<(f64, f64)>,
}

pub const REPORT_QUANTILES: [f64; 4] = [0.5, 0.9, 0.99, 1.0];

pub(crate) fn quantiles(ratios: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = ratios.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    REPORT_QUANTILES
        .iter()
        .map(|&q| {
            let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
            (q, sorted[rank - 1])
        })
        .collect()
}

/// Ratios `‖M f‖_{1,∞} / ‖f‖₁` over seeded nonnegative spikes-plus-blocks inputs.
pub fn weak_type_experiment(
    matrix: &TransformationMatrix,
    subseq: &IndexSubsequence,
    operator: MaximalKind,
    trials: usize,
    spec: GridSpec,
    seed: u64,
) -> Result<WeakTypeReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if operator != MaximalKind::Dyadic {
        subseq.check_fits(spec)?;
    }
    let inputs: Vec<GridFunction1D> = (0..trials as u64).map(|t| random_nonnegative(spec, seed, t)).collect();
    let outputs = match operator {
        MaximalKind::AbsKernel => abs_kernel_maximal_batch(matrix, subseq, &inputs)?,
        MaximalKind::Mean => inputs
            .iter()
            .map(|f| maximal_mean(matrix, subseq, f))
            .collect::<Result<_>>()?,
        MaximalKind::Dyadic => inputs.par_iter().map(dyadic_maximal).collect(),
    };
    let ratios: Vec<f64> = inputs
        .iter()
        .zip(&outputs)
        .map(|(f, g)| weak_quasinorm(g) / f.l1_norm())
        .collect();
    Ok(WeakTypeReport {
        family: match operator {
            MaximalKind::Dyadic => "dyadic".to_string(),
            _ => matrix.name().to_string(),
        },
        operator,
        subsequence: subseq.label().to_string(),
        resolution: spec.resolution(),
        trials,
        seed,
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        quantiles: quantiles(&ratios),
    })
}
