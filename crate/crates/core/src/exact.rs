//! Exact dyadic-rational evaluation of a Fejér-divergent function with a classical Lebesgue point at 0.
//!
//! For an increasing sequence `n_1 < n_2 < …` the function is
//! `f = Σ_k 2^{−k} f_k` with `f_k = Σ_{a=n_{k−1}+1}^{n_k} 2^{n_k−a} 1_{[2^{−a}, 2^{−a}+2^{−n_k})}`.
//! Its scales reach `2^{−n_k}`, far below any grid, so everything here is
//! computed on sparse dyadic pieces with arbitrary-precision integers.

use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicInterval, DyadicRational, GridSpec};
use crate::error::{Error, Result};
use crate::walsh::GridFunction1D;

/// Disjoint dyadic intervals carrying exact values; zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseStepFunction {
    pieces: Vec<(DyadicInterval, DyadicRational)>,
}

impl SparseStepFunction {
    pub fn new(pieces: Vec<(DyadicInterval, DyadicRational)>) -> Result<Self> {
        let mut order: Vec<usize> = (0..pieces.len()).collect();
        order.sort_by(|&a, &b| pieces[a].0.start().cmp(&pieces[b].0.start()));
        for w in order.windows(2) {
            let (left, right) = (&pieces[w[0]].0, &pieces[w[1]].0);
            if left.end() > right.start() {
                return Err(Error::InvalidParameter(format!("pieces {left} and {right} overlap")));
            }
        }
        Ok(Self { pieces })
    }

    pub fn pieces(&self) -> &[(DyadicInterval, DyadicRational)] {
        &self.pieces
    }

    /// `∫ f`.
    pub fn integral(&self) -> DyadicRational {
        self.pieces.iter().map(|(i, v)| v * &i.length()).sum()
    }

    pub fn value_at(&self, x: &DyadicRational) -> DyadicRational {
        self.pieces
            .iter()
            .find(|(i, _)| i.contains(x))
            .map(|(_, v)| v.clone())
            .unwrap_or_default()
    }

    /// `∫_J |f|` for a dyadic interval `J`.
    pub fn abs_integral_over(&self, window: &DyadicInterval) -> DyadicRational {
        self.pieces.iter().map(|(i, v)| &v.abs() * &i.overlap(window)).sum()
    }

    /// `∫ f · g` where `g` is itself a list of disjoint weighted dyadic intervals.
    pub fn pair_with(&self, plateaus: &[(DyadicInterval, DyadicRational)]) -> DyadicRational {
        let mut total = DyadicRational::zero();
        for (piece, value) in &self.pieces {
            for (plateau, height) in plateaus {
                let overlap = piece.overlap(plateau);
                if !overlap.is_zero() {
                    total = &total + &(&(value * height) * &overlap);
                }
            }
        }
        total
    }

    /// Cell values on a grid fine enough to resolve every piece.
    pub fn rasterize(&self, spec: GridSpec) -> Result<GridFunction1D> {
        let mut samples = vec![0.0; spec.size()];
        for (interval, value) in &self.pieces {
            let v = value.to_f64();
            for cell in interval.cell_range(spec)? {
                samples[cell] = v;
            }
        }
        GridFunction1D::new(spec, samples)
    }
}

/// Increasing sequence `n_1 < … < n_m` that should satisfy
/// `n_k > 3 n_{k−1}` and `n_k > 2^{2k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NSeq {
    values: Vec<u32>,
}

impl NSeq {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSequence("empty".into()));
        }
        if let Some(pos) = values.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NotIncreasing(pos + 1));
        }
        if values[0] == 0 {
            return Err(Error::InvalidSequence("n_1 must be positive".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// `n_k` for `k ≥ 1`, with `n_0 = 0`.
    pub fn get(&self, k: usize) -> u32 {
        if k == 0 {
            0
        } else {
            self.values[k - 1]
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl std::str::FromStr for NSeq {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("'{t}' is not a natural number")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqViolation {
    pub k: usize,
    /// `"n1"` for `n_k > 3 n_{k−1}`, `"n2"` for `n_k > 2^{2k}`.
    pub condition: String,
    pub detail: String,
}

/// Every violated growth condition, in order of `k`.
pub fn validate_nseq(seq: &NSeq) -> Vec<SeqViolation> {
    let mut out = Vec::new();
    for k in 1..=seq.len() {
        let (n, prev) = (seq.get(k) as u128, seq.get(k - 1) as u128);
        if n <= 3 * prev {
            out.push(SeqViolation {
                k,
                condition: "n1".into(),
                detail: format!("n_{k} = {n} must exceed 3·{prev} = {}", 3 * prev),
            });
        }
        let floor = if 2 * k < 128 { 1u128 << (2 * k) } else { u128::MAX };
        if n <= floor {
            out.push(SeqViolation {
                k,
                condition: "n2".into(),
                detail: format!("n_{k} = {n} must exceed 2^{} = {floor}", 2 * k),
            });
        }
    }
    out
}

fn piece(depth: u32, start_exponent: u32, value: DyadicRational) -> (DyadicInterval, DyadicRational) {
    // [2^{-a}, 2^{-a} + 2^{-depth}) is the depth-`depth` interval with offset 2^{depth-a}
    let offset = num_bigint::BigUint::from(1u32) << (depth - start_exponent);
    (DyadicInterval::new(depth, offset).expect("offset below 2^depth"), value)
}

/// `f_k` scaled by `2^{−k}`.
pub fn example1_term(seq: &NSeq, k: usize) -> Vec<(DyadicInterval, DyadicRational)> {
    let (nk, prev) = (seq.get(k), seq.get(k - 1));
    (prev + 1..=nk)
        .map(|a| {
            let exponent = nk as i64 - a as i64 - k as i64;
            piece(nk, a, DyadicRational::pow2(exponent))
        })
        .collect()
}

/// The truncation `Σ_{k≤m} f_k / 2^k`. Rejects sequences violating either growth condition.
pub fn build_example1(seq: &NSeq) -> Result<SparseStepFunction> {
    if let Some(v) = validate_nseq(seq).first() {
        return Err(Error::InvalidSequence(v.detail.clone()));
    }
    build_example1_unchecked(seq)
}

/// Same construction without the growth conditions, for small experiments.
pub fn build_example1_unchecked(seq: &NSeq) -> Result<SparseStepFunction> {
    let pieces = (1..=seq.len()).flat_map(|k| example1_term(seq, k)).collect();
    SparseStepFunction::new(pieces)
}

/// Plateaus of `K_{2^m}`: `(2^m+1)/2` on `I_m` and `2^{j−1}` on `I_m(2^{−j−1})` for `j < m`.
pub fn fejer_power_plateaus(m: u32) -> Vec<(DyadicInterval, DyadicRational)> {
    let one = num_bigint::BigInt::from(1);
    let top = DyadicRational::new((one << m) + 1, 1);
    let mut out = vec![(DyadicInterval::origin(m), top)];
    for j in 0..m {
        out.push(piece(m, j + 1, DyadicRational::pow2(j as i64 - 1)));
    }
    out
}

/// `σ_{2^m}(f, 0) = ∫ f K_{2^m}`, exactly.
pub fn exact_fejer_at_zero(f: &SparseStepFunction, m: u32) -> DyadicRational {
    f.pair_with(&fejer_power_plateaus(m))
}

/// `(1/ε) ∫_{[0,ε)} |f(t) − f(0)| dt` with `ε = 2^{−depth}`.
pub fn exact_avg_at_zero(f: &SparseStepFunction, depth: u32) -> DyadicRational {
    let window = DyadicInterval::origin(depth);
    let f0 = f.value_at(&DyadicRational::zero());
    let shifted: DyadicRational = if f0.is_zero() {
        f.abs_integral_over(&window)
    } else {
        // |f − f(0)| is |v − f(0)| on pieces and |f(0)| off them
        let mut covered = DyadicRational::zero();
        let mut total = DyadicRational::zero();
        for (interval, value) in f.pieces() {
            let overlap = interval.overlap(&window);
            total = &total + &(&(value - &f0).abs() * &overlap);
            covered = &covered + &overlap;
        }
        &total + &(&f0.abs() * &(&window.length() - &covered))
    };
    shifted.mul_pow2(depth as i64)
}

/// Exact rational rendered for reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactValue {
    pub numerator: String,
    pub scale: u32,
    pub decimal: f64,
}

impl From<&DyadicRational> for ExactValue {
    fn from(x: &DyadicRational) -> Self {
        Self {
            numerator: x.numerator().to_string(),
            scale: x.scale(),
            decimal: x.to_f64(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub k: usize,
    pub n_k: u32,
    /// `σ_{2^{n_k}}(f, 0)` for the truncated series.
    pub sigma_exact: ExactValue,
    /// `(n_k − n_{k−1}) / 2^{k+1}`.
    pub lower_bound: ExactValue,
    /// `(n_k − n_{k−1}) / 2^{k+2}`, the sum of the `f_k` plateau contributions.
    pub plateau_bound: ExactValue,
    pub ratio: f64,
    pub meets_lower_bound: bool,
    pub meets_plateau_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageRow {
    pub k: usize,
    pub depth: u32,
    pub average: ExactValue,
    /// `2^k` times the average.
    pub scaled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub nseq: Vec<u32>,
    pub violations: Vec<SeqViolation>,
    pub integral: ExactValue,
    /// Upper bound on `∫` of the omitted terms `k > m`.
    pub tail_mass_bound: ExactValue,
    pub rows: Vec<DivergenceRow>,
    pub averages: Vec<AverageRow>,
    /// `max 2^k · average` over the sweep.
    pub average_constant: f64,
    /// Each `∫ f_k` lies strictly below `2^{−n_{k−1}}`.
    pub term_mass_checks: Vec<bool>,
}

/// Divergence table and Lebesgue-average sweep at 0.
///
/// Every piece and every plateau of `K_{2^m}` is nonnegative, so the omitted
/// terms can only raise `σ`; the truncated values are lower bounds for the series.
pub fn divergence_report(seq: &NSeq) -> Result<DivergenceReport> {
    let violations = validate_nseq(seq);
    let f = build_example1_unchecked(seq)?;
    let mut rows = Vec::new();
    for k in 1..=seq.len() {
        let nk = seq.get(k);
        let gap = (nk - seq.get(k - 1)) as i64;
        let sigma = exact_fejer_at_zero(&f, nk);
        let lower = DyadicRational::new(gap, k as u32 + 1);
        let plateau = DyadicRational::new(gap, k as u32 + 2);
        rows.push(DivergenceRow {
            k,
            n_k: nk,
            ratio: sigma.to_f64() / lower.to_f64(),
            meets_lower_bound: sigma >= lower,
            meets_plateau_bound: sigma >= plateau,
            sigma_exact: (&sigma).into(),
            lower_bound: (&lower).into(),
            plateau_bound: (&plateau).into(),
        });
    }
    let mut averages = Vec::new();
    for k in 1..=seq.len() {
        for depth in seq.get(k - 1) + 1..=seq.get(k) {
            let avg = exact_avg_at_zero(&f, depth);
            averages.push(AverageRow {
                k,
                depth,
                scaled: avg.to_f64() * (1u64 << k) as f64,
                average: (&avg).into(),
            });
        }
    }
    let term_mass_checks = (1..=seq.len())
        .map(|k| {
            let mass: DyadicRational = example1_term(seq, k)
                .iter()
                .map(|(i, v)| (v * &i.length()).mul_pow2(k as i64))
                .sum();
            mass < DyadicRational::pow2(-(seq.get(k - 1) as i64))
        })
        .collect();
    let m = seq.len();
    Ok(DivergenceReport {
        nseq: seq.values().to_vec(),
        violations,
        integral: (&f.integral()).into(),
        tail_mass_bound: (&DyadicRational::pow2(-(seq.get(m) as i64) - m as i64)).into(),
        average_constant: averages.iter().map(|r| r.scaled).fold(0.0, f64::max),
        rows,
        averages,
        term_mass_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summability::{apply_mean, builtin_matrix, MatrixFamily};

    fn seq(values: &[u32]) -> NSeq {
        NSeq::new(values.to_vec()).unwrap()
    }

    #[test]
    fn sequence_validation() {
        assert!(validate_nseq(&seq(&[5, 17, 65])).is_empty());
        let v = validate_nseq(&seq(&[4, 17, 65]));
        assert_eq!((v[0].k, v[0].condition.as_str()), (1, "n2"));
        let v = validate_nseq(&seq(&[5, 14, 65]));
        assert!(v.iter().any(|x| x.k == 2 && x.condition == "n1"));
        assert!(NSeq::new(vec![5, 5]).is_err());
        assert!("5, 17,65".parse::<NSeq>().is_ok());
        assert!(build_example1(&seq(&[4, 17])).is_err());
    }

    #[test]
    fn first_term_pieces() {
        let f = build_example1(&seq(&[5])).unwrap();
        assert_eq!(f.pieces().len(), 5);
        for (a, (interval, value)) in (1u32..=5).zip(f.pieces()) {
            assert_eq!(interval.start(), DyadicRational::pow2(-(a as i64)));
            assert_eq!(interval.length(), DyadicRational::pow2(-5));
            assert_eq!(value, &DyadicRational::pow2(5 - a as i64 - 1));
        }
        assert!(f.value_at(&DyadicRational::zero()).is_zero());
    }

    #[test]
    fn integral_is_exact_and_below_one() {
        let s = seq(&[5, 17, 65]);
        let f = build_example1(&s).unwrap();
        assert_eq!(f.pieces().len(), 65);
        // oracle: Σ_k 2^{-k} Σ_a 2^{-a}
        let mut expected = DyadicRational::zero();
        for k in 1..=3usize {
            for a in s.get(k - 1) + 1..=s.get(k) {
                expected = &expected + &DyadicRational::pow2(-(a as i64) - k as i64);
            }
        }
        assert_eq!(f.integral(), expected);
        assert!(f.integral() < DyadicRational::one());
    }

    #[test]
    fn unit_function_has_unit_means() {
        let one = SparseStepFunction::new(vec![(DyadicInterval::origin(0), DyadicRational::one())]).unwrap();
        for m in [0u32, 1, 5, 40, 100] {
            assert_eq!(exact_fejer_at_zero(&one, m), DyadicRational::one());
        }
    }

    #[test]
    fn exact_means_match_grid_means() {
        let s = seq(&[5, 17]);
        let f = build_example1(&s).unwrap();
        let spec = GridSpec::new(17).unwrap();
        let grid = f.rasterize(spec).unwrap();
        let fejer = builtin_matrix(MatrixFamily::Fejer).unwrap();
        for m in [0u32, 3, 5, 9, 17] {
            let exact = exact_fejer_at_zero(&f, m).to_f64();
            let floating = apply_mean(&fejer, 1 << m, &grid).unwrap().samples()[0];
            assert!((exact - floating).abs() < 1e-10 * (1.0 + exact), "m={m}");
        }
    }

    #[test]
    fn averages_at_zero() {
        let empty = SparseStepFunction::new(Vec::new()).unwrap();
        assert!(exact_avg_at_zero(&empty, 7).is_zero());
        let f = build_example1(&seq(&[5, 17, 65])).unwrap();
        // the window [0,1) holds the whole mass
        assert_eq!(exact_avg_at_zero(&f, 0), f.integral());
        let shifted = SparseStepFunction::new(vec![(DyadicInterval::origin(0), DyadicRational::new(3, 1))]).unwrap();
        assert!(exact_avg_at_zero(&shifted, 4).is_zero());
    }

    #[test]
    fn permuting_pieces_changes_nothing() {
        let f = build_example1(&seq(&[5, 17, 65])).unwrap();
        let mut pieces = f.pieces().to_vec();
        pieces.reverse();
        pieces.swap(3, 40);
        let g = SparseStepFunction::new(pieces).unwrap();
        for m in [5u32, 17, 65] {
            assert_eq!(exact_fejer_at_zero(&f, m), exact_fejer_at_zero(&g, m));
        }
        for d in [3u32, 18, 60] {
            assert_eq!(exact_avg_at_zero(&f, d), exact_avg_at_zero(&g, d));
        }
    }

    #[test]
    fn overlapping_pieces_are_rejected() {
        let a = (DyadicInterval::new(2, 1u32).unwrap(), DyadicRational::one());
        let b = (DyadicInterval::new(3, 3u32).unwrap(), DyadicRational::one());
        assert!(SparseStepFunction::new(vec![a, b]).is_err());
    }

    #[test]
    fn report_rows() {
        let r = divergence_report(&seq(&[5, 17, 65])).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(r.violations.is_empty());
        assert!(r.rows.iter().all(|row| row.meets_plateau_bound));
        assert!(r.term_mass_checks.iter().all(|&ok| ok));
        assert_eq!(r.rows[1].lower_bound.decimal, 1.5);
        assert_eq!(r.rows[2].lower_bound.decimal, 3.0);
        assert_eq!(r.averages.len(), 65);
    }
}
