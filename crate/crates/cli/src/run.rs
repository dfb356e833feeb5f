//! Subcommand dispatch.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use walsh_summability::exact::{divergence_report, validate_nseq, DivergenceReport, NSeq};
use walsh_summability::io::{write_grid_1d, write_grid_2d};
use walsh_summability::lebesgue::{classify_wlp, mt2_convergence_experiment, WlpThresholds};
use walsh_summability::maximal::{
    abs_kernel_maximal_batch, dyadic_maximal, maximal_mean, weak_type_experiment, IndexSubsequence, MaximalKind,
};
use walsh_summability::summability::{
    apply_mean, apply_mean_via_kernel, c2_quantity, kernel_decomposition, kernel_v, kernel_v_direct, mean_report,
    parse_matrix, upsilon,
};
use walsh_summability::tensor::{llogl_weak_type_experiment, tensor_mean, tensor_mean_reversed};
use walsh_summability::{GridFunction1D, GridFunction2D, MatrixFamily, TransformationMatrix};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::inputs::{guard_1d, guard_2d, load_1d, load_2d, parse_depths, parse_point, parse_points};

const KERNEL_CHECK_TOL: f64 = 1e-9;
const MEAN_CHECK_TOL: f64 = 1e-10;
const TENSOR_CHECK_TOL: f64 = 1e-10;
const C2_CHECK_TOL: f64 = 1e-15;
/// Largest index for families whose weights come from tables grown up to `n`.
const MAX_TABLE_INDEX: u64 = 1 << 22;

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Kernel(a) => kernel(a),
        Command::Mean(a) => mean(a),
        Command::Upsilon(a) => upsilon_table(a),
        Command::Maximal(a) => maximal(a),
        Command::Tensor(a) => tensor(a),
        Command::LloglExperiment(a) => llogl(a),
        Command::Wlp(a) => wlp(a),
        Command::Mt2Experiment(a) => mt2(a),
        Command::Example1(a) => example1(a),
        Command::C2Check(a) => c2_check(a),
    }
}

fn matrix(text: &str) -> CliResult<TransformationMatrix> {
    Ok(parse_matrix(text)?)
}

fn subsequence(text: &str) -> CliResult<IndexSubsequence> {
    Ok(text.parse()?)
}

fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            write(&mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> CliResult<()> {
    emit(out, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn emit_csv<T: Serialize>(out: Option<&Path>, rows: &[T]) -> CliResult<()> {
    emit(out, |w| {
        let mut writer = csv::Writer::from_writer(w);
        for row in rows {
            writer.serialize(row)?;
        }
        writer.flush()?;
        Ok(())
    })
}

fn emit_grid_1d(out: Option<&Path>, f: &GridFunction1D) -> CliResult<()> {
    emit(out, |w| Ok(write_grid_1d(f, w)?))
}

fn emit_grid_2d(out: Option<&Path>, f: &GridFunction2D) -> CliResult<()> {
    emit(out, |w| Ok(write_grid_2d(f, w)?))
}

fn check(deviation: f64, tolerance: f64, what: &str) -> CliResult<()> {
    if deviation <= tolerance {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "{what}: deviation {deviation:e} exceeds {tolerance:e}"
        )))
    }
}

fn kernel(a: KernelArgs) -> CliResult<()> {
    let m = matrix(&a.matrix)?;
    let spec = guard_1d(a.resolution)?;
    let full = kernel_v(&m, a.n, spec)?;
    let needs_parts = a.check || a.part != KernelPart::Full;
    let parts = if needs_parts && a.n > 0 {
        Some(kernel_decomposition(&m, a.n, spec)?)
    } else {
        None
    };
    let result = match (a.part, &parts) {
        (KernelPart::Full, _) => full.clone(),
        (KernelPart::V1, Some((v1, _))) => v1.clone(),
        (KernelPart::V2, Some((_, v2))) => v2.clone(),
        _ => GridFunction1D::zeros(spec),
    };
    emit_grid_1d(a.out.as_deref(), &result)?;
    if a.check {
        let direct = kernel_v_direct(&m, a.n, spec)?;
        check(
            full.max_abs_diff(&direct)?,
            KERNEL_CHECK_TOL,
            "spectral against direct kernel",
        )?;
        if let Some((v1, v2)) = &parts {
            let sum = v1.zip_with(v2, |x, y| x + y)?;
            check(sum.max_abs_diff(&full)?, KERNEL_CHECK_TOL, "V1 + V2 against V")?;
        }
    }
    Ok(())
}

fn mean(a: MeanArgs) -> CliResult<()> {
    let m = matrix(&a.matrix)?;
    let f = load_1d(&a.input)?;
    let out = apply_mean(&m, a.n, &f)?;
    if a.report {
        emit_json(a.out.as_deref(), &mean_report(&m, a.n)?)?;
    } else {
        emit_grid_1d(a.out.as_deref(), &out)?;
    }
    if a.check {
        let via_kernel = apply_mean_via_kernel(&m, a.n, &f)?;
        check(
            out.max_abs_diff(&via_kernel)?,
            MEAN_CHECK_TOL,
            "coefficient against kernel path",
        )?;
    }
    Ok(())
}

fn uses_tables(m: &TransformationMatrix) -> bool {
    matches!(m.family(), MatrixFamily::Cesaro { .. } | MatrixFamily::NorlundLog)
}

#[derive(Serialize)]
struct UpsilonRow {
    n: u64,
    upsilon: f64,
}

#[derive(Serialize)]
struct UpsilonReport<'a> {
    family: &'a str,
    subsequence: &'a str,
    rows: Vec<UpsilonRow>,
}

fn upsilon_table(a: UpsilonArgs) -> CliResult<()> {
    let m = matrix(&a.matrix)?;
    let seq = subsequence(&a.seq)?;
    if uses_tables(&m) && seq.max() > MAX_TABLE_INDEX {
        return Err(CliError::GuardRail(format!(
            "index {} exceeds {MAX_TABLE_INDEX} for {}",
            seq.max(),
            m.name()
        )));
    }
    let rows = seq
        .indices()
        .iter()
        .filter(|&&n| n > 0)
        .map(|&n| {
            Ok(UpsilonRow {
                n,
                upsilon: upsilon(&m, n)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    match a.output.format_or(Format::Csv) {
        Format::Csv => emit_csv(a.output.out.as_deref(), &rows),
        Format::Json => emit_json(
            a.output.out.as_deref(),
            &UpsilonReport {
                family: m.name(),
                subsequence: seq.label(),
                rows,
            },
        ),
    }
}

fn maximal(a: MaximalArgs) -> CliResult<()> {
    let m = matrix(&a.matrix)?;
    let seq = subsequence(&a.seq)?;
    let operator: MaximalKind = a.operator.parse()?;
    if a.input.input.is_none() && a.input.function.is_none() {
        let k = a
            .input
            .resolution
            .ok_or_else(|| CliError::Config("the experiment needs --resolution".into()))?;
        let spec = guard_1d(k)?;
        let report = weak_type_experiment(&m, &seq, operator, a.trials, spec, a.seed)?;
        return emit_json(a.out.as_deref(), &report);
    }
    let f = load_1d(&a.input)?;
    let result = match operator {
        MaximalKind::Mean => maximal_mean(&m, &seq, &f)?,
        MaximalKind::AbsKernel => abs_kernel_maximal_batch(&m, &seq, std::slice::from_ref(&f))?.remove(0),
        MaximalKind::Dyadic => dyadic_maximal(&f),
    };
    emit_grid_1d(a.out.as_deref(), &result)
}

fn tensor(a: TensorArgs) -> CliResult<()> {
    let t0 = matrix(&a.matrix0)?;
    let t1 = matrix(&a.matrix1)?;
    let f = load_2d(&a.input)?;
    let out = tensor_mean(&t0, a.n0, &t1, a.n1, &f)?;
    emit_grid_2d(a.out.as_deref(), &out)?;
    if a.check {
        let reversed = tensor_mean_reversed(&t0, a.n0, &t1, a.n1, &f)?;
        check(out.max_abs_diff(&reversed)?, TENSOR_CHECK_TOL, "iteration orders")?;
    }
    Ok(())
}

fn llogl(a: LloglArgs) -> CliResult<()> {
    let spec = guard_2d(a.resolution)?;
    let report = llogl_weak_type_experiment(
        &matrix(&a.matrix0)?,
        &subsequence(&a.seq0)?,
        &matrix(&a.matrix1)?,
        &subsequence(&a.seq1)?,
        a.trials,
        spec,
        a.seed,
    )?;
    emit_json(a.out.as_deref(), &report)
}

fn wlp(a: WlpArgs) -> CliResult<()> {
    let f = load_2d(&a.input)?;
    let point = parse_point(&a.point, f.spec())?;
    let depths = parse_depths(a.depths.as_deref(), f.spec())?;
    let diagnostic = classify_wlp(&f, point, &depths, WlpThresholds::default())?;
    emit_json(a.out.as_deref(), &diagnostic)
}

fn mt2(a: Mt2Args) -> CliResult<()> {
    let f = load_2d(&a.input)?;
    let points = parse_points(&a.points, f.spec())?;
    let depths = parse_depths(a.depths.as_deref(), f.spec())?;
    let report = mt2_convergence_experiment(
        &matrix(&a.matrix0)?,
        &matrix(&a.matrix1)?,
        &subsequence(&a.seq0)?,
        &subsequence(&a.seq1)?,
        &f,
        &points,
        &depths,
    )?;
    emit_json(a.out.as_deref(), &report)
}

#[derive(Serialize)]
struct Example1CsvRow {
    kind: &'static str,
    k: usize,
    /// `n_k` for divergence rows, the depth for average rows.
    m: u32,
    numerator: String,
    scale: u32,
    decimal: f64,
    lower_bound: Option<f64>,
    plateau_bound: Option<f64>,
}

fn example1_csv(report: &DivergenceReport) -> Vec<Example1CsvRow> {
    let sigma = report.rows.iter().map(|r| Example1CsvRow {
        kind: "sigma",
        k: r.k,
        m: r.n_k,
        numerator: r.sigma_exact.numerator.clone(),
        scale: r.sigma_exact.scale,
        decimal: r.sigma_exact.decimal,
        lower_bound: Some(r.lower_bound.decimal),
        plateau_bound: Some(r.plateau_bound.decimal),
    });
    let averages = report.averages.iter().map(|r| Example1CsvRow {
        kind: "average",
        k: r.k,
        m: r.depth,
        numerator: r.average.numerator.clone(),
        scale: r.average.scale,
        decimal: r.average.decimal,
        lower_bound: None,
        plateau_bound: None,
    });
    sigma.chain(averages).collect()
}

fn example1(a: Example1Args) -> CliResult<()> {
    let seq: NSeq = a.nseq.parse()?;
    let violations = validate_nseq(&seq);
    if !violations.is_empty() {
        let list: Vec<String> = violations
            .iter()
            .map(|v| format!("k={} ({}): {}", v.k, v.condition, v.detail))
            .collect();
        return Err(CliError::Config(format!("invalid sequence: {}", list.join("; "))));
    }
    let report = divergence_report(&seq)?;
    match a.output.format_or(Format::Json) {
        Format::Json => emit_json(a.output.out.as_deref(), &report)?,
        Format::Csv => emit_csv(a.output.out.as_deref(), &example1_csv(&report))?,
    }
    if let Some(row) = report.rows.iter().find(|r| !r.meets_plateau_bound) {
        return Err(CliError::Check(format!(
            "sigma at k={} is {} below (n_k - n_(k-1))/2^(k+2) = {}",
            row.k, row.sigma_exact.decimal, row.plateau_bound.decimal
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct C2Row {
    n: u64,
    c2: f64,
}

#[derive(Serialize)]
struct C2Report<'a> {
    alpha: f64,
    subsequence: &'a str,
    rows: &'a [C2Row],
}

fn c2_check(a: C2Args) -> CliResult<()> {
    let seq = subsequence(&a.seq)?;
    let rows = seq
        .indices()
        .iter()
        .filter(|&&n| n > 0)
        .map(|&n| {
            Ok(C2Row {
                n,
                c2: c2_quantity(a.alpha, n)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    match a.output.format_or(Format::Csv) {
        Format::Csv => emit_csv(a.output.out.as_deref(), &rows)?,
        Format::Json => emit_json(
            a.output.out.as_deref(),
            &C2Report {
                alpha: a.alpha,
                subsequence: seq.label(),
                rows: &rows,
            },
        )?,
    }
    // powers n = 2^m with m ≥ 1 have the closed value 2^{−α} + 1
    let expected = 2f64.powf(-a.alpha) + 1.0;
    for row in rows.iter().filter(|r| r.n >= 2 && r.n.is_power_of_two()) {
        check((row.c2 - expected).abs(), C2_CHECK_TOL, &format!("c2 at n={}", row.n))?;
    }
    Ok(())
}
