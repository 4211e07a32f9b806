use std::borrow::Cow;
use std::fmt;
use std::fs;
use std::io::{self, Write};

use lincode::bench::{baselines, gaussian_targets, uniform_targets, BenchCell};
use lincode::codebook::{auxiliary_target, gaussian_build, self_design_build, Codebook, CodebookKind};
use lincode::io::{read_matrix, read_vector, write_matrix, write_matrix_csv, write_vector_csv};
use lincode::{analysis, engine, rng, DecompositionPlan, Dyadic, Error, Matrix64, StageSchedule};
use serde::Serialize;

use crate::table::render_cells;
use crate::{
    AnalyzeArgs, ApplyArgs, AuxArg, BenchArgs, CodebookArg, DecomposeArgs, Figure, Format, QuantMode, QuantizeArgs,
    ReconstructArgs, TargetArg,
};

pub enum CliError {
    Usage(String),
    Lib(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(e) => match e {
                Error::Dimension(_) | Error::Domain(_) => 2,
                Error::Io(_) | Error::Malformed(_) | Error::Version { .. } => 3,
                Error::Infeasible(_) | Error::AccuracyUnreachable(_) | Error::NotShiftAdd(_) => 4,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => e.fmt(f),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Lib(Error::Io(e))
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn kind(c: CodebookArg) -> CodebookKind {
    match c {
        CodebookArg::Mailman => CodebookKind::Mailman,
        CodebookArg::TwoSparse => CodebookKind::TwoSparse,
        CodebookArg::SelfDesigning => CodebookKind::SelfDesigning,
        CodebookArg::Gaussian => CodebookKind::Gaussian,
    }
}

fn build_codebook(a: &DecomposeArgs, target: &Matrix64) -> Result<Codebook> {
    let (n, k) = target.shape();
    let codebook_seed = rng::derive_seed(a.seed, 1);
    Ok(match a.codebook {
        CodebookArg::Mailman => {
            if n >= 32 || k != 1 << n {
                return Err(CliError::Usage(format!("mailman codebook needs K = 2^N columns, target is {n}x{k}")));
            }
            Codebook::mailman(n)?
        }
        CodebookArg::TwoSparse => Codebook::two_sparse(n, k)?,
        CodebookArg::SelfDesigning => {
            let aux = match a.aux {
                AuxArg::Auto => auxiliary_target(target, codebook_seed),
                AuxArg::Target => Cow::Borrowed(target),
                AuxArg::Gaussian => Cow::Owned(gaussian_build(n, k, codebook_seed)),
            };
            self_design_build(&aux, a.stage_sparsity)?
        }
        CodebookArg::Gaussian => Codebook::gaussian(n, k, codebook_seed),
    })
}

#[derive(Serialize)]
struct Summary {
    n: usize,
    k: usize,
    rate: f64,
    stages: usize,
    additions: u64,
    executed_additions: Option<u64>,
    shifts: u64,
    sign_changes: u64,
    adds_per_entry: f64,
    analytic_only: bool,
    d_rel: f64,
    d_rel_db: f64,
    achieved_bits: f64,
}

pub fn decompose(a: DecomposeArgs) -> Result<()> {
    let target = read_matrix(&a.matrix)?;
    let schedule = match (a.stages, a.bits) {
        (Some(l), None) => StageSchedule::fixed(vec![a.stage_sparsity; l]),
        (None, Some(q)) if a.adaptive => StageSchedule::adaptive(q, a.max_stages),
        (None, Some(q)) => StageSchedule::until_bits(a.stage_sparsity, q, a.max_stages),
        _ => return Err(CliError::Usage("exactly one of --stages or --bits is required".into())),
    };
    let codebook = build_codebook(&a, &target)?;
    let mut plan = lincode::decompose(&target, codebook, &schedule)?;
    plan.meta.seed = Some(a.seed);
    plan.meta.params.insert("codebook".into(), plan.codebook().kind().to_string());
    plan.meta.params.insert("stage_sparsity".into(), a.stage_sparsity.to_string());
    fs::write(&a.output, plan.to_bytes())?;

    let cost = plan.cost();
    let dist = plan.distortion(&target)?;
    let (n, k) = target.shape();
    let s = Summary {
        n,
        k,
        rate: (k as f64).log2() / n as f64,
        stages: plan.stages().len(),
        additions: cost.additions,
        executed_additions: cost.executed_additions,
        shifts: cost.shifts,
        sign_changes: cost.sign_changes,
        adds_per_entry: cost.adds_per_entry,
        analytic_only: cost.analytic_only,
        d_rel: dist.d_rel,
        d_rel_db: dist.db,
        achieved_bits: dist.achieved_bits,
    };
    let mut out = io::stdout().lock();
    if a.format == Format::Json {
        writeln!(out, "{}", serde_json::to_string_pretty(&s).expect("summary serializes"))?;
    } else {
        writeln!(out, "N {}  K {}  R {:.4}  stages {}", s.n, s.k, s.rate, s.stages)?;
        writeln!(
            out,
            "adds/entry {:.4}  additions {}{}",
            s.adds_per_entry,
            s.additions,
            if s.analytic_only { " (codebook not counted)" } else { "" }
        )?;
        if let Some(e) = s.executed_additions {
            writeln!(out, "executed additions {e}  shifts {}  sign changes {}", s.shifts, s.sign_changes)?;
        }
        writeln!(out, "D_rel {:.4e} ({:.2} dB)  achieved bits {}", s.d_rel, s.d_rel_db, s.achieved_bits)?;
    }
    Ok(())
}

fn read_plan(path: &std::path::Path) -> Result<DecompositionPlan> {
    Ok(DecompositionPlan::from_bytes(&fs::read(path)?)?)
}

pub fn apply(a: ApplyArgs) -> Result<()> {
    let plan = read_plan(&a.plan)?;
    let x = read_vector(&a.vector)?;
    let (y, cost) = engine::apply::<Dyadic>(&plan, &x)?;
    match &a.output {
        Some(p) => {
            let mut buf = Vec::new();
            write_vector_csv(&mut buf, &y)?;
            fs::write(p, buf)?;
        }
        None => write_vector_csv(io::stdout().lock(), &y)?,
    }
    eprintln!(
        "additions {}  executed additions {}  shifts {}  sign changes {}",
        cost.additions,
        cost.executed_additions.unwrap_or(0),
        cost.shifts,
        cost.sign_changes
    );
    Ok(())
}

pub fn reconstruct(a: ReconstructArgs) -> Result<()> {
    let m = read_plan(&a.plan)?.reconstruct::<f64>();
    match &a.output {
        Some(p) => write_matrix(p, &m)?,
        None => write_matrix_csv(io::stdout().lock(), &m)?,
    }
    Ok(())
}

fn parse_shape(s: &str) -> Result<(usize, usize)> {
    let bad = || CliError::Usage(format!("shape must look like 16x1024, got {s:?}"));
    let (n, k) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, k.trim().parse().map_err(|_| bad())?))
}

pub fn bench(a: BenchArgs) -> Result<()> {
    let mut cells: Vec<BenchCell> = Vec::new();
    for (i, shape) in a.shapes.iter().enumerate() {
        let (n, k) = parse_shape(shape)?;
        let seed = rng::derive_seed(a.seed, i as u64);
        cells.extend(match a.targets {
            TargetArg::Gaussian => gaussian_targets(n, k, &a.bits, a.samples, seed, a.max_stages)?,
            TargetArg::Uniform => uniform_targets(n, k, &a.bits, a.samples, seed, a.max_stages)?,
        });
        if !a.no_baseline && a.bits.contains(&16) {
            cells.extend(baselines(n, k, 16, seed)?);
        }
    }
    render_cells(io::stdout().lock(), &cells, a.format)?;
    Ok(())
}

pub fn analyze(a: AnalyzeArgs) -> Result<()> {
    let mut out = io::stdout().lock();
    if a.asymptote {
        for &r in &a.rate {
            writeln!(out, "{}", analysis::asymptotic_threshold(r)?)?;
        }
    }
    let first_k = || -> Result<u64> { a.k.first().copied().ok_or_else(|| CliError::Usage("--K needs a value".into())) };
    match a.fig {
        None => {}
        Some(Figure::Cdf) => analysis::write_cdf_csv(&mut out, a.rate[0], &a.k, a.points)?,
        Some(Figure::Total) => analysis::write_total_error_csv(&mut out, &a.rate, &a.k)?,
        Some(Figure::Lb) => {
            let curve = analysis::simulate_decomposition(a.n, first_k()? as usize, a.stages, kind(a.codebook), a.seed, a.samples)?;
            curve.write_csv(&mut out)?;
        }
        Some(Figure::Ks) => {
            let k = first_k()?;
            let samples = analysis::simulate_angle_error(a.n, k as usize, a.samples, a.seed)?;
            let model = analysis::AngleErrorModel::new(a.n, k)?;
            let d = analysis::ks_distance(&samples, |r| model.angle_error_cdf(r));
            writeln!(out, "N,K,trials,ks_distance,dkw95")?;
            writeln!(out, "{},{},{},{},{}", a.n, k, a.samples, d, analysis::dkw_band(a.samples))?;
        }
    }
    Ok(())
}

pub fn quantize(a: QuantizeArgs) -> Result<()> {
    let exact = match Dyadic::parse_decimal(&a.value) {
        Ok(d) => d,
        Err(_) => {
            let v: f64 = a.value.trim().parse().map_err(|_| CliError::Lib(Error::Malformed(format!("not a number: {:?}", a.value))))?;
            Dyadic::from_f64(v).ok_or_else(|| CliError::Lib(Error::Malformed(format!("not finite: {:?}", a.value))))?
        }
    };
    let t = exact.to_f64();
    let form = match a.mode {
        QuantMode::Binary => lincode::binary_encode(t, a.budget)?,
        QuantMode::Csd => lincode::csd_encode(t, a.budget as usize),
    };
    let error = &exact - &lincode::csd_decode(&form);
    let mut out = io::stdout().lock();
    writeln!(out, "{form}")?;
    writeln!(out, "error {error}")?;
    Ok(())
}
