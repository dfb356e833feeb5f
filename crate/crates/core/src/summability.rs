//! Matrices of transformation and the means, kernels and functionals they define.
//!
//! A matrix supplies rows `(t_{0,n}, …, t_{n,n})` that are nonnegative,
//! nonincreasing and sum to one. The mean of order `n` is
//! `Σ_{k=0}^{n} t_{n−k,n} S_k f`; on the spectral side coefficient `j` is
//! weighted by `λ_j = Σ_{k=j+1}^{n} t_{n−k,n} = τ_{n−1−j,n}`.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::dyadic::{BinaryIndex, GridSpec};
use crate::error::{Error, Result};
use crate::walsh::{dyadic_convolve, from_coefficients, spectral_multiply, GridFunction1D};

/// Absolute tolerance for row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

const ROW_CACHE_LIMIT: usize = 256;

/// Weight families with closed forms, plus user-supplied rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MatrixFamily {
    /// `t_{0,n} = 1`: the means are the partial sums `S_n`.
    Identity,
    /// `t_{k,n} = 1/n` for `k < n`, `t_{n,n} = 0`: Fejér means.
    Fejer,
    /// Stationary Cesàro `(C, α)`, `t_{k,n} = A_k^{α−1} / A_n^{α}`.
    Cesaro { alpha: f64 },
    /// Cesàro weights with order `α_n` varying by row.
    CesaroSeq { alphas: Vec<f64> },
    /// Nörlund logarithmic means, `t_{k,n} = 1 / (ℓ_n (k+1))`.
    NorlundLog,
    /// Explicit rows, row `n` holding `n + 1` entries.
    Custom { rows: Vec<Vec<f64>> },
}

/// Lazily grown table of a sequence defined by a first-order recurrence.
#[derive(Debug)]
struct Recurrence {
    kind: RecurrenceKind,
    values: Mutex<Vec<f64>>,
}

#[derive(Clone, Copy, Debug)]
enum RecurrenceKind {
    /// `A_k^β`.
    Cesaro(f64),
    /// `H_k = Σ_{j=1}^{k} 1/j`, starting at `H_0 = 0`.
    Harmonic,
}

impl Recurrence {
    fn new(kind: RecurrenceKind) -> Self {
        let first = match kind {
            RecurrenceKind::Cesaro(_) => 1.0,
            RecurrenceKind::Harmonic => 0.0,
        };
        Self {
            kind,
            values: Mutex::new(vec![first]),
        }
    }

    fn get(&self, k: u64) -> f64 {
        let k = k as usize;
        let mut values = self.values.lock().unwrap_or_else(|e| e.into_inner());
        while values.len() <= k {
            let j = values.len();
            let prev = values[j - 1];
            let next = match self.kind {
                RecurrenceKind::Cesaro(beta) => prev * (j as f64 + beta) / j as f64,
                RecurrenceKind::Harmonic => prev + 1.0 / j as f64,
            };
            values.push(next);
        }
        values[k]
    }
}

/// A validated weight matrix with memoized rows.
pub struct TransformationMatrix {
    family: MatrixFamily,
    label: String,
    upper: Option<Recurrence>,
    lower: Option<Recurrence>,
    rows: Mutex<HashMap<u64, Arc<[f64]>>>,
}

impl fmt::Debug for TransformationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformationMatrix")
            .field("label", &self.label)
            .field("family", &self.family)
            .finish()
    }
}

impl Clone for TransformationMatrix {
    fn clone(&self) -> Self {
        Self::build(self.family.clone(), self.label.clone())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "Cesàro order must lie in (0, 1], got {alpha}"
        )))
    }
}

/// `A_k^α` from `A_0^α = 1`, `A_k^α = A_{k−1}^α (k+α)/k`.
pub fn cesaro_a(alpha: f64, k: u64) -> Result<f64> {
    if alpha <= -1.0 || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("A_k^α needs α > −1, got {alpha}")));
    }
    let mut value = 1.0;
    for j in 1..=k {
        value *= (j as f64 + alpha) / j as f64;
    }
    Ok(value)
}

fn cesaro_row(alpha: f64, n: u64) -> Vec<f64> {
    let mut lower = Vec::with_capacity(n as usize + 1);
    let mut a = 1.0;
    lower.push(a);
    for j in 1..=n {
        a *= (j as f64 + alpha - 1.0) / j as f64;
        lower.push(a);
    }
    let top = cesaro_a(alpha, n).expect("alpha validated");
    lower.iter().map(|v| v / top).collect()
}

/// Compensated summation.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Checks conditions (a) nonnegativity, (b) monotonicity, (c) unit sum for row `n`.
pub fn validate_row(n: u64, row: &[f64]) -> Result<()> {
    if row.len() as u64 != n + 1 {
        return Err(Error::InvalidRow {
            n,
            condition: 'c',
            detail: format!("expected {} entries, got {}", n + 1, row.len()),
        });
    }
    if let Some(k) = row.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidRow {
            n,
            condition: 'a',
            detail: format!("t_{{{k},{n}}} = {}", row[k]),
        });
    }
    if let Some(k) = row.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::InvalidRow {
            n,
            condition: 'b',
            detail: format!("t_{{{},{n}}} = {} > t_{{{k},{n}}} = {}", k + 1, row[k + 1], row[k]),
        });
    }
    let total = neumaier_sum(row.iter().copied());
    if (total - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(Error::InvalidRow {
            n,
            condition: 'c',
            detail: format!("row sums to {total}"),
        });
    }
    Ok(())
}

impl TransformationMatrix {
    fn build(family: MatrixFamily, label: String) -> Self {
        let (upper, lower) = match &family {
            MatrixFamily::Cesaro { alpha } => (
                Some(Recurrence::new(RecurrenceKind::Cesaro(*alpha))),
                Some(Recurrence::new(RecurrenceKind::Cesaro(*alpha - 1.0))),
            ),
            MatrixFamily::NorlundLog => (Some(Recurrence::new(RecurrenceKind::Harmonic)), None),
            _ => (None, None),
        };
        Self {
            family,
            label,
            upper,
            lower,
            rows: Mutex::new(HashMap::new()),
        }
    }

    /// Builds a matrix, validating parameters and any explicit rows.
    pub fn new(family: MatrixFamily) -> Result<Self> {
        let label = match &family {
            MatrixFamily::Identity => "identity".to_string(),
            MatrixFamily::Fejer => "fejer".to_string(),
            MatrixFamily::Cesaro { alpha } => {
                check_alpha(*alpha)?;
                format!("cesaro:{alpha}")
            }
            MatrixFamily::CesaroSeq { alphas } => {
                if alphas.is_empty() {
                    return Err(Error::InvalidParameter("empty α sequence".into()));
                }
                for &alpha in alphas {
                    check_alpha(alpha)?;
                }
                "cesaro-seq".to_string()
            }
            MatrixFamily::NorlundLog => "nlog".to_string(),
            MatrixFamily::Custom { rows } => {
                if rows.is_empty() {
                    return Err(Error::InvalidParameter("no rows supplied".into()));
                }
                for (n, row) in rows.iter().enumerate() {
                    validate_row(n as u64, row)?;
                }
                "custom".to_string()
            }
        };
        Ok(Self::build(family, label))
    }

    pub fn family(&self) -> &MatrixFamily {
        &self.family
    }

    pub fn name(&self) -> &str {
        &self.label
    }

    /// Largest row index this matrix defines, if finite.
    pub fn max_row(&self) -> Option<u64> {
        match &self.family {
            MatrixFamily::CesaroSeq { alphas } => Some(alphas.len() as u64 - 1),
            MatrixFamily::Custom { rows } => Some(rows.len() as u64 - 1),
            _ => None,
        }
    }

    fn check_row(&self, n: u64) -> Result<()> {
        match self.max_row() {
            Some(max) if n > max => Err(Error::RowUnavailable(n)),
            _ => Ok(()),
        }
    }

    fn compute_row(&self, n: u64) -> Vec<f64> {
        let len = n as usize + 1;
        match &self.family {
            MatrixFamily::Identity => {
                let mut row = vec![0.0; len];
                row[0] = 1.0;
                row
            }
            MatrixFamily::Fejer => {
                if n == 0 {
                    vec![1.0]
                } else {
                    let mut row = vec![1.0 / n as f64; len];
                    row[n as usize] = 0.0;
                    row
                }
            }
            MatrixFamily::Cesaro { .. } | MatrixFamily::NorlundLog => {
                (0..=n).map(|k| self.closed_entry(k, n)).collect()
            }
            MatrixFamily::CesaroSeq { alphas } => cesaro_row(alphas[n as usize], n),
            MatrixFamily::Custom { rows } => rows[n as usize].clone(),
        }
    }

    /// Entry for the families with closed forms.
    fn closed_entry(&self, k: u64, n: u64) -> f64 {
        match &self.family {
            MatrixFamily::Identity => (k == 0) as u8 as f64,
            MatrixFamily::Fejer => {
                if n == 0 {
                    1.0
                } else if k < n {
                    1.0 / n as f64
                } else {
                    0.0
                }
            }
            MatrixFamily::Cesaro { .. } => {
                let lower = self.lower.as_ref().expect("cesaro tables");
                let upper = self.upper.as_ref().expect("cesaro tables");
                lower.get(k) / upper.get(n)
            }
            MatrixFamily::NorlundLog => {
                let h = self.upper.as_ref().expect("harmonic table");
                1.0 / (h.get(n + 1) * (k + 1) as f64)
            }
            MatrixFamily::CesaroSeq { .. } | MatrixFamily::Custom { .. } => {
                unreachable!("row-based families have no closed entry")
            }
        }
    }

    fn has_closed_form(&self) -> bool {
        !matches!(
            self.family,
            MatrixFamily::CesaroSeq { .. } | MatrixFamily::Custom { .. }
        )
    }

    /// `(t_{0,n}, …, t_{n,n})`.
    pub fn row(&self, n: u64) -> Result<Arc<[f64]>> {
        self.check_row(n)?;
        let mut cache = self.rows.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(row) = cache.get(&n) {
            return Ok(Arc::clone(row));
        }
        let row: Arc<[f64]> = self.compute_row(n).into();
        if cache.len() >= ROW_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(n, Arc::clone(&row));
        Ok(row)
    }

    /// `t_{k,n}`.
    pub fn entry(&self, k: u64, n: u64) -> Result<f64> {
        if k > n {
            return Err(Error::TauOutOfRange { s: k, n });
        }
        self.check_row(n)?;
        if self.has_closed_form() {
            Ok(self.closed_entry(k, n))
        } else {
            Ok(self.row(n)?[k as usize])
        }
    }

    /// Conditions (a)-(c) for row `n`.
    pub fn validate(&self, n: u64) -> Result<()> {
        validate_row(n, &self.row(n)?)
    }

    /// `τ_{s,n} = Σ_{l=0}^{s} t_{l,n}`.
    pub fn tau(&self, s: u64, n: u64) -> Result<f64> {
        if s > n {
            return Err(Error::TauOutOfRange { s, n });
        }
        self.check_row(n)?;
        Ok(match &self.family {
            MatrixFamily::Identity => 1.0,
            MatrixFamily::Fejer => {
                if n == 0 {
                    1.0
                } else {
                    (s + 1).min(n) as f64 / n as f64
                }
            }
            MatrixFamily::Cesaro { .. } => {
                let upper = self.upper.as_ref().expect("cesaro tables");
                upper.get(s) / upper.get(n)
            }
            MatrixFamily::NorlundLog => {
                let h = self.upper.as_ref().expect("harmonic table");
                h.get(s + 1) / h.get(n + 1)
            }
            _ => neumaier_sum(self.row(n)?[..=s as usize].iter().copied()),
        })
    }

    /// `τ_{0,n}, …, τ_{n,n}`.
    pub fn tau_row(&self, n: u64) -> Result<Vec<f64>> {
        self.check_row(n)?;
        if self.has_closed_form() {
            (0..=n).map(|s| self.tau(s, n)).collect()
        } else {
            let row = self.row(n)?;
            let mut acc = 0.0;
            Ok(row
                .iter()
                .map(|t| {
                    acc += t;
                    acc
                })
                .collect())
        }
    }

    /// Spectral weights `λ_j = τ_{n−1−j,n}` for `j < n`, zero beyond, over `len` coefficients.
    pub fn mean_weights(&self, n: u64, len: usize) -> Result<Vec<f64>> {
        let tau = self.tau_row(n)?;
        Ok((0..len as u64)
            .map(|j| if j < n { tau[(n - 1 - j) as usize] } else { 0.0 })
            .collect())
    }
}

/// Named families with closed forms.
pub fn builtin_matrix(family: MatrixFamily) -> Result<TransformationMatrix> {
    TransformationMatrix::new(family)
}

/// Parses `fejer`, `cesaro:<α>`, `cesaro-seq:<file>`, `nlog`, `identity` or `custom:<rows.csv>`.
pub fn parse_matrix(spec: &str) -> Result<TransformationMatrix> {
    let spec = spec.trim();
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    let family = match (head, arg) {
        ("fejer", None) => MatrixFamily::Fejer,
        ("identity", None) => MatrixFamily::Identity,
        ("nlog", None) => MatrixFamily::NorlundLog,
        ("cesaro", Some(a)) => MatrixFamily::Cesaro {
            alpha: a.parse().map_err(|_| Error::Parse(format!("bad Cesàro order '{a}'")))?,
        },
        ("cesaro-seq", Some(path)) => MatrixFamily::CesaroSeq {
            alphas: read_alpha_file(Path::new(path))?,
        },
        ("custom", Some(path)) => MatrixFamily::Custom {
            rows: read_rows_file(Path::new(path))?,
        },
        _ => return Err(Error::Parse(format!("unknown matrix spec '{spec}'"))),
    };
    TransformationMatrix::new(family)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(token: &str, line: usize) -> Result<f64> {
    token
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: '{token}' is not a number")))
}

/// One `α_n` per line, row `n` on the `n`-th data line.
pub fn read_alpha_file(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    data_lines(&text).map(|(i, l)| parse_f64(l, i)).collect()
}

/// Comma-separated rows, row `n` holding `n + 1` entries.
pub fn read_rows_file(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    data_lines(&text)
        .map(|(i, l)| l.split(',').map(|t| parse_f64(t, i)).collect())
        .collect()
}

/// `υ(n,T) = Σ_{k=0}^{|n|} |ε_k(n) − ε_{k+1}(n)| τ_{2^k,n}`.
pub fn upsilon(matrix: &TransformationMatrix, n: u64) -> Result<f64> {
    let index = BinaryIndex::new(n);
    let top = index.order().ok_or(Error::ZeroIndex)?;
    let mut total = 0.0;
    for k in 0..=top {
        if index.alternates_at(k) {
            total += matrix.tau(1u64 << k, n)?;
        }
    }
    Ok(total)
}

/// `2^{−|n|α} Σ_{k=0}^{|n|} |ε_k(n) − ε_{k+1}(n)| 2^{kα}`.
pub fn c2_quantity(alpha: f64, n: u64) -> Result<f64> {
    check_alpha(alpha)?;
    let index = BinaryIndex::new(n);
    let top = index.order().ok_or(Error::ZeroIndex)?;
    Ok((0..=top)
        .filter(|&k| index.alternates_at(k))
        .map(|k| 2f64.powf((k as f64 - top as f64) * alpha))
        .sum())
}

/// `V_n = Σ_{k=1}^{n} t_{n−k,n} D_k`, synthesized from its Walsh coefficients.
pub fn kernel_v(matrix: &TransformationMatrix, n: u64, spec: GridSpec) -> Result<GridFunction1D> {
    spec.check_order(n)?;
    let weights = matrix.mean_weights(n, spec.size())?;
    Ok(from_coefficients(spec, |j| weights[j]))
}

fn walsh_row(j: usize, spec: GridSpec, out: &mut [f64]) {
    let pattern = spec.bit_reverse(j);
    for (l, v) in out.iter_mut().enumerate() {
        *v = if (pattern & l).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
    }
}

/// `V_n` by literal accumulation of Dirichlet kernels, `O(n 2^K)`.
pub fn kernel_v_direct(matrix: &TransformationMatrix, n: u64, spec: GridSpec) -> Result<GridFunction1D> {
    spec.check_order(n)?;
    let row = matrix.row(n)?;
    let size = spec.size();
    let mut dirichlet = vec![0.0; size];
    let mut walsh = vec![0.0; size];
    let mut kernel = vec![0.0; size];
    for k in 1..=n {
        walsh_row((k - 1) as usize, spec, &mut walsh);
        for (d, w) in dirichlet.iter_mut().zip(&walsh) {
            *d += w;
        }
        let t = row[(n - k) as usize];
        if t != 0.0 {
            for (v, d) in kernel.iter_mut().zip(&dirichlet) {
                *v += t * d;
            }
        }
    }
    GridFunction1D::new(spec, kernel)
}

/// Which factor multiplies `w_{n ∔ 2^s} D_{2^s}` in the first kernel part.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FirstPartFactor {
    /// `τ_{n(s)−1,n}`, which makes `V₁ + V₂ = V` hold.
    Corrected,
    /// `τ_{n(s),n}`.
    Shifted,
}

/// Splits `V_n` into the Dirichlet part `V₁` and the Fejér part `V₂`.
pub fn kernel_decomposition(
    matrix: &TransformationMatrix,
    n: u64,
    spec: GridSpec,
) -> Result<(GridFunction1D, GridFunction1D)> {
    kernel_decomposition_with(matrix, n, spec, FirstPartFactor::Corrected)
}

pub fn kernel_decomposition_with(
    matrix: &TransformationMatrix,
    n: u64,
    spec: GridSpec,
    factor: FirstPartFactor,
) -> Result<(GridFunction1D, GridFunction1D)> {
    spec.check_order(n)?;
    let index = BinaryIndex::new(n);
    let top = index.order().ok_or(Error::ZeroIndex)?;
    let row = matrix.row(n)?;
    let size = spec.size();
    let mut walsh = vec![0.0; size];
    let active: Vec<u32> = (0..=top).filter(|&s| index.bit(s) == 1).collect();

    // V₁: τ · w_{n ∔ 2^s} · 2^s 1_{I_s}
    let mut v1 = vec![0.0; size];
    for &s in &active {
        let prefix = index.prefix(s);
        let tau = match factor {
            FirstPartFactor::Corrected => matrix.tau(prefix - 1, n)?,
            FirstPartFactor::Shifted => matrix.tau(prefix, n)?,
        };
        walsh_row((n ^ (1u64 << s)) as usize, spec, &mut walsh);
        let width = size >> s;
        let height = (1u64 << s) as f64;
        for l in 0..width {
            v1[l] += tau * walsh[l] * height;
        }
    }

    // V₂: per active s, the Abel-summed Fejér sum with modulation w_{n − n(s)} w_{2^s − 1}
    let mut modulation = Vec::with_capacity(active.len());
    let mut other = vec![0.0; size];
    for &s in &active {
        if s == 0 {
            continue;
        }
        walsh_row((n ^ index.prefix(s)) as usize, spec, &mut walsh);
        walsh_row(((1u64 << s) - 1) as usize, spec, &mut other);
        let m: Vec<f64> = walsh.iter().zip(&other).map(|(a, b)| a * b).collect();
        let base = index.prefix(s - 1) as usize;
        modulation.push((s, base, m));
    }
    let longest = modulation.iter().map(|(s, _, _)| (1u64 << s) - 1).max().unwrap_or(0);
    let mut v2 = vec![0.0; size];
    let mut dirichlet = vec![0.0; size];
    let mut cumulative = vec![0.0; size];
    for l in 1..=longest {
        walsh_row((l - 1) as usize, spec, &mut walsh);
        for ((d, c), w) in dirichlet.iter_mut().zip(cumulative.iter_mut()).zip(&walsh) {
            *d += w;
            *c += *d;
        }
        // cumulative now holds l K_l
        for (s, base, m) in &modulation {
            let span = (1u64 << s) - 1;
            let coefficient = if l < span {
                row[base + l as usize] - row[base + l as usize + 1]
            } else if l == span {
                row[base + span as usize]
            } else {
                continue;
            };
            if coefficient == 0.0 {
                continue;
            }
            for ((v, c), mm) in v2.iter_mut().zip(&cumulative).zip(m) {
                *v -= coefficient * mm * c;
            }
        }
    }
    Ok((GridFunction1D::new(spec, v1)?, GridFunction1D::new(spec, v2)?))
}

/// `Σ_{k=0}^{n} t_{n−k,n} S_k f`, weighting coefficients spectrally.
pub fn apply_mean(matrix: &TransformationMatrix, n: u64, f: &GridFunction1D) -> Result<GridFunction1D> {
    f.spec().check_order(n)?;
    let weights = matrix.mean_weights(n, f.len())?;
    Ok(spectral_multiply(f, |j| weights[j]))
}

/// `f ∗ V_n` with the kernel accumulated from Dirichlet kernels.
pub fn apply_mean_via_kernel(matrix: &TransformationMatrix, n: u64, f: &GridFunction1D) -> Result<GridFunction1D> {
    let kernel = kernel_v_direct(matrix, n, f.spec())?;
    dyadic_convolve(f, &kernel)
}

/// Per-index summary used by experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanReport {
    pub n: u64,
    pub upsilon: f64,
    /// `‖V_n‖₁`, exact on the grid of resolution `|n| + 1`; omitted for very large `n`.
    pub l1_kernel_norm: Option<f64>,
    pub t0: f64,
}

const NORM_RESOLUTION_LIMIT: u32 = 21;

pub fn mean_report(matrix: &TransformationMatrix, n: u64) -> Result<MeanReport> {
    let upsilon = upsilon(matrix, n)?;
    let depth = BinaryIndex::new(n).order().ok_or(Error::ZeroIndex)? + 1;
    let l1_kernel_norm = if depth <= NORM_RESOLUTION_LIMIT {
        Some(kernel_v(matrix, n, GridSpec::new(depth)?)?.l1_norm())
    } else {
        None
    };
    Ok(MeanReport {
        n,
        upsilon,
        l1_kernel_norm,
        t0: matrix.entry(0, n)?,
    })
}
