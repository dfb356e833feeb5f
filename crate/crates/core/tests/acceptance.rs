//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails the
//! test if any criterion failed. Run with `cargo test --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use rand::Rng;
use walsh_summability::exact::{divergence_report, validate_nseq, NSeq};
use walsh_summability::lebesgue::{fejer_estimate_sides, mt2_convergence_experiment, PointFunctionals, WlpVerdict};
use walsh_summability::maximal::{alternating_index, weak_type_experiment, IndexSubsequence, MaximalKind};
use walsh_summability::sampling::{random_nonnegative_2d, random_signed, random_signed_2d, rng_for};
use walsh_summability::summability::{
    apply_mean, apply_mean_via_kernel, builtin_matrix, c2_quantity, kernel_decomposition, kernel_v, upsilon,
    MatrixFamily, TransformationMatrix,
};
use walsh_summability::tensor::{llogl_weak_type_experiment, tensor_mean, tensor_mean_reversed};
use walsh_summability::walsh::{dirichlet_kernel, fejer_kernel, fejer_power_closed_form, fwht, inverse_fwht};
use walsh_summability::{DyadicInterval, GridFunction1D, GridFunction2D, GridSpec};

const TRANSFORM_TOL: f64 = 1e-12;
const TRANSFORM_BUDGET: Duration = Duration::from_secs(1);
const FEJER_TOL: f64 = 1e-12;
const DECOMPOSITION_TOL: f64 = 1e-9;
const PATH_TOL: f64 = 1e-10;
const FEJER_UPSILON_CAP: f64 = 3.0;
/// Relative change allowed between the Cesàro υ sups over `n < 2^12` and `n < 2^14`.
const CESARO_STABILITY: f64 = 0.05;
const NLOG_GROWTH: f64 = 2.0;
const NLOG_POWER_CAP: f64 = 3.0;
const ITERATION_TOL: f64 = 1e-10;
const STABLE_GROWTH: f64 = 0.20;
const UNSTABLE_GROWTH: f64 = 0.50;
const WEAK_TRIALS_1D: usize = 200;
const WEAK_TRIALS_2D: usize = 40;
const EXAMPLE_BUDGET: Duration = Duration::from_secs(10);
/// Single constant bounding `2^k` times the Lebesgue averages at 0.
const AVERAGE_CONSTANT: f64 = 2.0;
const LEBESGUE_TOL: f64 = 1e-12;
const MT2_ERROR_CAP: f64 = 0.05;
const C2_TOL: f64 = 1e-15;
const SEED: u64 = 20240601;

fn spec(k: u32) -> GridSpec {
    GridSpec::new(k).unwrap()
}

fn matrix(family: MatrixFamily) -> TransformationMatrix {
    builtin_matrix(family).unwrap()
}

fn three_families() -> Vec<TransformationMatrix> {
    vec![
        matrix(MatrixFamily::Fejer),
        matrix(MatrixFamily::Cesaro { alpha: 0.5 }),
        matrix(MatrixFamily::NorlundLog),
    ]
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn transform_correctness() -> Outcome {
    let s = spec(10);
    let start = Instant::now();
    let mut round_trip = 0.0f64;
    let mut parseval = 0.0f64;
    for seed in 0..100 {
        let f = random_signed(s, SEED + seed);
        let spectrum = fwht(&f);
        round_trip = round_trip.max(inverse_fwht(&spectrum).max_abs_diff(&f).unwrap());
        parseval = parseval.max((spectrum.energy() - f.energy()).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        round_trip <= TRANSFORM_TOL && parseval <= TRANSFORM_TOL && elapsed < TRANSFORM_BUDGET,
        format!("round trip {round_trip:.2e}, Parseval {parseval:.2e}, {elapsed:?}"),
    )
}

fn dirichlet_identity() -> Outcome {
    let s = spec(12);
    let mut mismatches = 0;
    for n in 0..=12 {
        let kernel = dirichlet_kernel(1 << n, s).unwrap();
        let expected = GridFunction1D::indicator(s, &DyadicInterval::origin(n))
            .unwrap()
            .scale((1u64 << n) as f64);
        if kernel != expected {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} of 13 depths differ"))
}

fn fejer_closed_form() -> Outcome {
    let s = spec(10);
    let mut worst = 0.0f64;
    for m in 0..=10 {
        let kernel = fejer_kernel(1 << m, s).unwrap();
        let closed = fejer_power_closed_form(m, s).unwrap();
        worst = worst.max(kernel.max_abs_diff(&closed).unwrap());
    }
    outcome(worst <= FEJER_TOL, format!("max deviation {worst:.2e}"))
}

fn kernel_decomposition_identity() -> Outcome {
    let s = spec(10);
    let mut rng = rng_for(SEED, 4);
    let mut parts = Vec::new();
    let mut pass = true;
    for m in three_families() {
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let n = rng.random_range(1..1024u64);
            let (v1, v2) = kernel_decomposition(&m, n, s).unwrap();
            let v = kernel_v(&m, n, s).unwrap();
            let sum = v1.zip_with(&v2, |a, b| a + b).unwrap();
            worst = worst.max(sum.max_abs_diff(&v).unwrap());
        }
        pass &= worst <= DECOMPOSITION_TOL;
        parts.push(format!("{} {worst:.2e}", m.name()));
    }
    outcome(pass, parts.join(", "))
}

fn mean_path_equality() -> Outcome {
    let s = spec(10);
    let families = three_families();
    let mut rng = rng_for(SEED, 5);
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let m = &families[trial as usize % families.len()];
        let n = rng.random_range(0..=1024u64);
        let f = random_signed(s, SEED + 1000 + trial);
        let a = apply_mean(m, n, &f).unwrap();
        let b = apply_mean_via_kernel(m, n, &f).unwrap();
        worst = worst.max(a.max_abs_diff(&b).unwrap());
    }
    outcome(worst <= PATH_TOL, format!("max deviation {worst:.2e}"))
}

fn sup_upsilon(m: &TransformationMatrix, range: std::ops::Range<u64>) -> f64 {
    range.map(|n| upsilon(m, n).unwrap()).fold(0.0, f64::max)
}

fn upsilon_dichotomy() -> Outcome {
    let fejer = matrix(MatrixFamily::Fejer);
    let cesaro = matrix(MatrixFamily::Cesaro { alpha: 0.5 });
    let nlog = matrix(MatrixFamily::NorlundLog);
    let fejer_sup = sup_upsilon(&fejer, 1..1 << 16);
    let c12 = sup_upsilon(&cesaro, 1..1 << 12);
    let c14 = sup_upsilon(&cesaro, 1..1 << 14);
    let cesaro_change = (c14 - c12).abs() / c12;
    let short = upsilon(&nlog, alternating_index(4)).unwrap();
    let long = upsilon(&nlog, alternating_index(8)).unwrap();
    let powers_sup = (0..=16).map(|a| upsilon(&nlog, 1 << a).unwrap()).fold(0.0, f64::max);
    let checks = [
        fejer_sup <= FEJER_UPSILON_CAP,
        c14.is_finite() && cesaro_change <= CESARO_STABILITY,
        long >= NLOG_GROWTH * short,
        powers_sup <= NLOG_POWER_CAP,
    ];
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "fejer sup {fejer_sup:.4} [{}]; cesaro:0.5 sup {c12:.4} -> {c14:.4} [{}]; \
             nlog alternating {short:.4} -> {long:.4}, ratio {:.4} [{}]; nlog powers sup {powers_sup:.4} [{}]",
            verdict(checks[0]),
            verdict(checks[1]),
            long / short,
            verdict(checks[2]),
            verdict(checks[3]),
        ),
    )
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "violated"
    }
}

fn tensor_iteration() -> Outcome {
    let s = spec(6);
    let fejer = matrix(MatrixFamily::Fejer);
    let nlog = matrix(MatrixFamily::NorlundLog);
    let cesaro = matrix(MatrixFamily::Cesaro { alpha: 0.5 });
    let pairs = [(&fejer, &fejer), (&fejer, &nlog), (&cesaro, &fejer)];
    let mut rng = rng_for(SEED, 7);
    let mut worst = 0.0f64;
    for (t0, t1) in pairs {
        for trial in 0..20 {
            let f = random_signed_2d(s, SEED + trial);
            let n0 = rng.random_range(0..=64u64);
            let n1 = rng.random_range(0..=64u64);
            let a = tensor_mean(t0, n0, t1, n1, &f).unwrap();
            let b = tensor_mean_reversed(t0, n0, t1, n1, &f).unwrap();
            worst = worst.max(a.max_abs_diff(&b).unwrap());
        }
    }
    outcome(worst <= ITERATION_TOL, format!("max deviation {worst:.2e}"))
}

fn weak_type_stability() -> Outcome {
    let fejer = matrix(MatrixFamily::Fejer);
    let identity = matrix(MatrixFamily::Identity);
    let ratio_1d = |m: &TransformationMatrix, kind: MaximalKind, k: u32, seq: &str| {
        let subseq: IndexSubsequence = seq.parse().unwrap();
        weak_type_experiment(m, &subseq, kind, WEAK_TRIALS_1D, spec(k), SEED)
            .unwrap()
            .max_ratio
    };
    let f7 = ratio_1d(&fejer, MaximalKind::AbsKernel, 7, "powers:0..7");
    let f9 = ratio_1d(&fejer, MaximalKind::AbsKernel, 9, "powers:0..9");
    let fejer_growth = f9 / f7 - 1.0;

    let ratio_2d = |k: u32| {
        let subseq: IndexSubsequence = format!("powers:0..{k}").parse().unwrap();
        llogl_weak_type_experiment(&fejer, &subseq, &fejer, &subseq, WEAK_TRIALS_2D, spec(k), SEED)
            .unwrap()
            .max_ratio
    };
    let l5 = ratio_2d(5);
    let l7 = ratio_2d(7);
    let llogl_growth = l7 / l5 - 1.0;

    let i7 = ratio_1d(&identity, MaximalKind::AbsKernel, 7, "all:1..128");
    let i9 = ratio_1d(&identity, MaximalKind::AbsKernel, 9, "all:1..512");
    let identity_growth = i9 / i7 - 1.0;

    let checks = [
        fejer_growth <= STABLE_GROWTH,
        llogl_growth <= STABLE_GROWTH,
        identity_growth >= UNSTABLE_GROWTH,
    ];
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "fejer tilde powers {f7:.4} -> {f9:.4} ({:+.1}%) [{}]; fejer⊗fejer L ln L {l5:.4} -> {l7:.4} ({:+.1}%) [{}]; \
             identity tilde all {i7:.4} -> {i9:.4} ({:+.1}%) [{}]",
            100.0 * fejer_growth,
            verdict(checks[0]),
            100.0 * llogl_growth,
            verdict(checks[1]),
            100.0 * identity_growth,
            verdict(checks[2]),
        ),
    )
}

fn example_divergence() -> Outcome {
    let start = Instant::now();
    let seq: NSeq = "5,17,65".parse().unwrap();
    let valid = validate_nseq(&seq).is_empty();
    let report = divergence_report(&seq).unwrap();
    let elapsed = start.elapsed();
    let bound_rows: Vec<_> = report.rows.iter().filter(|r| r.k >= 2).collect();
    let meets_bound = bound_rows.iter().all(|r| r.meets_lower_bound);
    let averages_bounded = report.average_constant <= AVERAGE_CONSTANT;
    let rows: Vec<String> = bound_rows
        .iter()
        .map(|r| {
            format!(
                "k={} sigma {:.6} vs bound {} [{}] (half bound {} [{}])",
                r.k,
                r.sigma_exact.decimal,
                r.lower_bound.decimal,
                verdict(r.meets_lower_bound),
                r.plateau_bound.decimal,
                verdict(r.meets_plateau_bound)
            )
        })
        .collect();
    outcome(
        valid && meets_bound && averages_bounded && elapsed < EXAMPLE_BUDGET,
        format!(
            "sequence valid [{}]; {}; sup 2^k·average {:.4} [{}]; {elapsed:?}",
            verdict(valid),
            rows.join("; "),
            report.average_constant,
            verdict(averages_bounded),
        ),
    )
}

/// `(|Δ| ∗ (D_{2^{s⁰}} ⊗ D_{2^{s¹}}))(x)` by direct summation.
fn dirichlet_local(f: &GridFunction2D, x: (usize, usize), s0: u32, s1: u32) -> f64 {
    let s = f.spec();
    let side = s.size();
    let d0 = dirichlet_kernel(1 << s0, s).unwrap();
    let d1 = dirichlet_kernel(1 << s1, s).unwrap();
    let fx = f.at(x.0, x.1);
    let mut total = 0.0;
    for a in 0..side {
        let k0 = d0.samples()[x.0 ^ a];
        if k0 == 0.0 {
            continue;
        }
        for b in 0..side {
            total += (f.at(a, b) - fx).abs() * k0 * d1.samples()[x.1 ^ b];
        }
    }
    total / (side * side) as f64
}

fn lebesgue_inequalities() -> Outcome {
    let k = 6;
    let s = spec(k);
    let side = s.size();
    let mut rng = rng_for(SEED, 10);
    let mut wl1 = 0.0f64;
    let mut wl23 = 0.0f64;
    let mut zz_violations = 0usize;
    let mut zz_checked = 0usize;
    let mut zz_worst = 0.0f64;
    for trial in 0..10 {
        let f = random_nonnegative_2d(s, SEED, trial);
        for _ in 0..20 {
            let x = (rng.random_range(0..side), rng.random_range(0..side));
            // F(x) = 0 as the first estimate requires
            let mut samples = f.samples().to_vec();
            samples[x.0 * side + x.1] = 0.0;
            let g = GridFunction2D::new(s, samples).unwrap();
            let pf = PointFunctionals::new(&g, x.0, x.1).unwrap();
            for s0 in 0..=k {
                let h0 = pf.h0(s0).unwrap();
                for s1 in 0..=k {
                    let w = pf.w(s0, s1).unwrap();
                    wl1 = wl1.max(dirichlet_local(&g, x, s0, s1) - w);
                    wl23 = wl23.max(w - (1u64 << s0) as f64 * pf.h1(s1).unwrap());
                    wl23 = wl23.max(w - (1u64 << s1) as f64 * h0);
                }
            }
            for l0 in 1..=side as u64 {
                for l1 in 1..=side as u64 {
                    let (lhs, rhs) = fejer_estimate_sides(&g, x.0, x.1, l0, l1).unwrap();
                    zz_checked += 1;
                    if lhs > rhs + LEBESGUE_TOL {
                        zz_violations += 1;
                    }
                    if rhs > 0.0 {
                        zz_worst = zz_worst.max(lhs / rhs);
                    }
                }
            }
        }
    }
    let checks = [wl1 <= LEBESGUE_TOL, wl23 <= LEBESGUE_TOL, zz_violations == 0];
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "first estimate excess {wl1:.2e} [{}]; dominations excess {wl23:.2e} [{}]; \
             Fejér estimate {zz_violations} of {zz_checked} violated, worst lhs/rhs {zz_worst:.4} [{}]",
            verdict(checks[0]),
            verdict(checks[1]),
            verdict(checks[2]),
        ),
    )
}

fn convergence_shadow() -> Outcome {
    let k = 8;
    let s = spec(k);
    let half = s.size() / 2;
    let quarter = s.size() / 4;
    let f = GridFunction2D::from_fn(s, |i, j| if i < half && j < half { 1.0 } else { 0.0 });
    let fejer = matrix(MatrixFamily::Fejer);
    let seq: IndexSubsequence = format!("powers:0..{k}").parse().unwrap();
    let depths: Vec<u32> = (1..=k).collect();
    let report = mt2_convergence_experiment(&fejer, &fejer, &seq, &seq, &f, &[(quarter, quarter)], &depths).unwrap();
    let point = &report.points[0];
    let error_at = |m: u32| {
        point
            .rows
            .iter()
            .find(|r| r.n0 == 1 << m && r.n1 == 1 << m)
            .unwrap()
            .error
    };
    let (e4, e8) = (error_at(4), error_at(8));
    let hypothesis = point
        .rows
        .iter()
        .all(|r| r.t0.0 == 1.0 / r.n0 as f64 && r.t0.1 == 1.0 / r.n1 as f64);
    let passes = point.verdict == WlpVerdict::Passes;
    outcome(
        passes && e8 <= MT2_ERROR_CAP && e8 <= e4 / 2.0 && hypothesis,
        format!(
            "verdict {:?}; err(2^4) {e4:.3e}, err(2^8) {e8:.3e}; t_0 = 2^-m [{}]",
            point.verdict,
            verdict(hypothesis)
        ),
    )
}

fn c2_condition() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [0.1, 0.5, 1.0] {
        for m in 1..=20 {
            let value = c2_quantity(alpha, 1 << m).unwrap();
            worst = worst.max((value - (2f64.powf(-alpha) + 1.0)).abs());
        }
    }
    let series: Vec<f64> = (0..=15)
        .map(|c| c2_quantity(0.1, alternating_index(c)).unwrap())
        .collect();
    let monotone = series.windows(2).all(|w| w[1] > w[0]);
    outcome(
        worst <= C2_TOL && monotone,
        format!(
            "powers deviation {worst:.2e}; alternating α=0.1 {:.4} -> {:.4} monotone [{}]",
            series[0],
            series[series.len() - 1],
            verdict(monotone)
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("transform correctness", transform_correctness),
        ("Dirichlet identity", dirichlet_identity),
        ("Fejér closed form", fejer_closed_form),
        ("kernel decomposition", kernel_decomposition_identity),
        ("mean path equality", mean_path_equality),
        ("υ dichotomy", upsilon_dichotomy),
        ("tensor iteration", tensor_iteration),
        ("weak-type stability", weak_type_stability),
        ("divergence example", example_divergence),
        ("Walsh-Lebesgue inequalities", lebesgue_inequalities),
        ("convergence at a Lebesgue point", convergence_shadow),
        ("c2 condition", c2_condition),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {}", i + 1, result.detail);
        if !result.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
