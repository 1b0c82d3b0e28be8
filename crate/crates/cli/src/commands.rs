use std::io::Write;
use std::path::{Path, PathBuf};

use lsg_core::geometry::SymPosDef3;
use lsg_core::planewave::{self, PlaneWave, PlaneWaveState, StabilityVerdict};
use lsg_core::qg::{regime_report, scan_regimes, witness_reports, Quadrant, RegimeReport};
use lsg_core::spectral::{
    self, curl_norm, gaussian, gradient_field, max_relative_delta, scalar_fourier, Family,
};
use lsg_core::{
    Error, Evolver, GridField, GridSpec, Interpolation, LinearModel, ModelKind, RegimeLabel, Rep, SteadyState,
    SymbolEvaluator, Vec3,
};
use num_complex::Complex;
use serde::Serialize;

use crate::config::{Format, Init, RunConfig};
use crate::output::{sink, write_json};

/// Successful runs either finish cleanly or report a degenerate flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Degenerate,
}

fn build_model(cfg: &RunConfig, a: &SymPosDef3<f64>) -> Result<LinearModel<f64>, Error> {
    Ok(match ModelKind::from(cfg.model) {
        ModelKind::Sg => LinearModel::sg(&SteadyState::new(*a)),
        ModelKind::Qg => LinearModel::qg(a, &cfg.qg_params()?),
    })
}

fn report_csv_row(r: &RegimeReport<f64>) -> String {
    let q = r.quadrant.map_or_else(|| "degenerate".to_string(), |q| q.to_string());
    format!(
        "{},{},{},{q},{},{}",
        lsg_core::io::matrix_to_csv_row(&r.matrix),
        lsg_core::io::format_real(r.mu_sg),
        lsg_core::io::format_real(r.mu_qg),
        r.degenerate_sg,
        r.degenerate_qg
    )
}

const REPORT_CSV_HEADER: &str = "a,b,c,d,e,f,mu_sg,mu_qg,quadrant,degenerate_sg,degenerate_qg";

pub fn classify(cfg: &RunConfig) -> Result<Status, Error> {
    let report = regime_report(&cfg.matrix()?, &cfg.qg_params()?);
    let mut w = sink(cfg.out.as_deref())?;
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(&report, &mut w)?,
        Format::Csv => {
            writeln!(w, "{REPORT_CSV_HEADER}")?;
            writeln!(w, "{}", report_csv_row(&report))?;
        }
    }
    w.flush()?;
    Ok(if report.degenerate_sg || report.degenerate_qg { Status::Degenerate } else { Status::Ok })
}

#[derive(Serialize)]
struct ModelVerdict {
    model: ModelKind,
    mu: f64,
    label: RegimeLabel,
    lambda_sq: f64,
    /// `null` for a degenerate flow.
    stability: Option<StabilityVerdict<f64>>,
}

fn model_verdict(model: &LinearModel<f64>, cfg: &RunConfig) -> Result<ModelVerdict, Error> {
    let stability = match planewave::classify_stability(&SymbolEvaluator::new(model, cfg.quadrature())) {
        Ok(v) => Some(v),
        Err(Error::DegenerateFlow { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ModelVerdict {
        model: model.kind(),
        mu: model.mu(),
        label: model.label(),
        lambda_sq: model.flow().lambda_sq(),
        stability,
    })
}

#[derive(Serialize)]
struct Comparison {
    report: RegimeReport<f64>,
    bv_frequency: f64,
    sg: ModelVerdict,
    qg: ModelVerdict,
    /// Whether both models reach the same plane-wave verdict; `null` if either is degenerate.
    same_verdict: Option<bool>,
}

pub fn qg_compare(cfg: &RunConfig) -> Result<Status, Error> {
    let a = cfg.matrix()?;
    let params = cfg.qg_params()?;
    let sg = model_verdict(&LinearModel::sg(&SteadyState::new(a)), cfg)?;
    let qg = model_verdict(&LinearModel::qg(&a, &params), cfg)?;
    let same_verdict = match (&sg.stability, &qg.stability) {
        (Some(x), Some(y)) => Some(x.verdict == y.verdict),
        _ => None,
    };
    let cmp = Comparison { report: regime_report(&a, &params), bv_frequency: params.n, sg, qg, same_verdict };
    let mut w = sink(cfg.out.as_deref())?;
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(&cmp, &mut w)?,
        Format::Csv => {
            writeln!(w, "model,mu,label,lambda_sq,verdict,growth_rate,bound")?;
            for m in [&cmp.sg, &cmp.qg] {
                let (verdict, rate, bound) = match &m.stability {
                    Some(v) => (format!("{:?}", v.verdict), fmt(v.growth_rate), fmt(v.bound)),
                    None => ("degenerate".into(), String::new(), String::new()),
                };
                let kind = if m.model == ModelKind::Sg { "sg" } else { "qg" };
                writeln!(w, "{kind},{},{:?},{},{verdict},{rate},{bound}", fmt(m.mu), m.label, fmt(m.lambda_sq))?;
            }
        }
    }
    w.flush()?;
    let degenerate = cmp.report.degenerate_sg || cmp.report.degenerate_qg;
    Ok(if degenerate { Status::Degenerate } else { Status::Ok })
}

fn fmt(x: f64) -> String {
    lsg_core::io::format_real(x)
}

#[derive(Serialize)]
struct PlaneWaveReport {
    model: ModelKind,
    label: RegimeLabel,
    mu: f64,
    lambda_sq: f64,
    stability: StabilityVerdict<f64>,
    a0: f64,
    k0: Vec3<f64>,
    trajectory: Vec<PlaneWaveState<f64>>,
}

pub fn planewave(cfg: &RunConfig) -> Result<Status, Error> {
    if cfg.times.is_empty() && cfg.periods.is_none() {
        return Err(Error::InvalidArgument("no time points given (use --times or --periods)".into()));
    }
    let a = cfg.matrix()?;
    let model = build_model(cfg, &a)?;
    let ev = SymbolEvaluator::new(&model, cfg.quadrature());
    let stability = planewave::classify_stability(&ev)?;
    let k0 = cfg.k0().or(stability.witness.map(|w| w.k0())).unwrap_or(Vec3::new(1.0, 0.0, 0.0));
    let pw = PlaneWave::new(cfg.a0, k0)?;
    let times = if cfg.times.is_empty() {
        let tau = model.flow().period().ok_or_else(|| {
            Error::InvalidArgument("--periods needs an elliptic flow; give --times instead".into())
        })?;
        let horizon = cfg.periods.unwrap_or(1.0) * tau;
        (0..cfg.samples).map(|i| horizon * i as f64 / (cfg.samples - 1) as f64).collect()
    } else {
        cfg.times.clone()
    };
    let trajectory = planewave::evolve_trajectory(&ev, &pw, &times)?;
    let mut w = sink(cfg.out.as_deref())?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            planewave::write_trajectory_csv(&mut w, &trajectory)?;
            let kind = if model.kind() == ModelKind::Sg { "sg" } else { "qg" };
            writeln!(w, "# model={kind} label={:?} mu={}", model.label(), fmt(model.mu()))?;
            writeln!(w, "# verdict={:?}", stability.verdict)?;
            writeln!(w, "# growth_rate={}", fmt(stability.growth_rate))?;
            writeln!(w, "# bound={}", fmt(stability.bound))?;
            writeln!(w, "# a0={} k0={}", fmt(pw.a0()), k0.0.map(fmt).join(","))?;
        }
        Format::Json => {
            let report = PlaneWaveReport {
                model: model.kind(),
                label: model.label(),
                mu: model.mu(),
                lambda_sq: model.flow().lambda_sq(),
                stability,
                a0: pw.a0(),
                k0,
                trajectory,
            };
            write_json(&report, &mut w)?;
        }
    }
    w.flush()?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct FieldStats {
    norm: f64,
    max_magnitude: f64,
    curl_norm: f64,
    /// Share of the L² mass within a tenth of the box length of the faces;
    /// large values mean the field has wrapped around the periodic box.
    boundary_fraction: f64,
}

impl FieldStats {
    fn of(field: &GridField<f64>) -> Result<Self, Error> {
        Ok(Self {
            norm: field.norm(),
            max_magnitude: field.max_magnitude(),
            curl_norm: curl_norm(field)?,
            boundary_fraction: field.boundary_fraction(0.1 * field.spec().box_length)?,
        })
    }
}

#[derive(Serialize)]
struct StepReport {
    t: f64,
    #[serde(flatten)]
    stats: FieldStats,
    /// `curl_norm / norm`.
    curl_ratio: f64,
    /// A-priori bound `‖G(t)‖·‖φ‖`.
    norm_bound: f64,
    /// Largest mode-wise relative difference between the RK4 and quadrature
    /// multiplier tables.
    oracle_table_delta: Option<f64>,
    /// Relative L² difference of the oracle-driven and quadrature-driven fields.
    oracle_field_delta: Option<f64>,
    field_file: Option<PathBuf>,
    slice_file: Option<PathBuf>,
}

#[derive(Serialize)]
struct EvolveReport {
    model: ModelKind,
    matrix: SymPosDef3<f64>,
    label: RegimeLabel,
    grid: GridSpec<f64>,
    interpolation: Interpolation,
    initial: FieldStats,
    steps: Vec<StepReport>,
}

fn initial_field(cfg: &RunConfig) -> Result<GridField<f64>, Error> {
    if let Some(path) = &cfg.input {
        let field: GridField<f64> = spectral::load_field(path)?;
        return match field.rep() {
            Rep::Physical => Ok(field),
            Rep::Fourier => field.to_physical(),
        };
    }
    let spec = cfg.grid()?;
    let sigma = cfg.sigma;
    Ok(match cfg.init {
        Init::Gaussian => GridField::from_real_fn(spec, |x| {
            let g = gaussian(x, Vec3::zero(), sigma);
            Vec3::new(g, -0.5 * g, 0.25 * g)
        }),
        Init::Gradient => gradient_field(spec, &scalar_fourier(spec, |x| gaussian(x, Vec3::zero(), sigma)))?,
        Init::PlaneWave => {
            let k0 = cfg.k0().ok_or_else(|| Error::InvalidArgument("--init plane-wave needs --k0".into()))?;
            let l = spec.box_length;
            let k = Vec3::new((k0[0] * l).round() / l, (k0[1] * l).round() / l, (k0[2] * l).round() / l);
            if k.is_zero() || k.max_abs() >= spec.nyquist() {
                return Err(Error::InvalidArgument(format!(
                    "k0 snaps to lattice frequency {:?}, which must be nonzero and below the Nyquist frequency {}",
                    k.0,
                    spec.nyquist()
                )));
            }
            let a0 = cfg.a0;
            GridField::from_fn(spec, |x| {
                let phase = Complex::from_polar(a0, std::f64::consts::TAU * k.dot(x));
                [phase * k[0], phase * k[1], phase * k[2]]
            })
        }
    })
}

fn numbered(prefix: &Path, i: usize, ext: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(format!("-{i}.{ext}"));
    PathBuf::from(name)
}

pub fn evolve(cfg: &RunConfig) -> Result<Status, Error> {
    if cfg.times.is_empty() {
        return Err(Error::InvalidArgument("no time points given (use --times)".into()));
    }
    if cfg.slice.is_some() && cfg.field_out.is_none() {
        return Err(Error::InvalidArgument("--slice needs --field-out".into()));
    }
    let a = cfg.matrix()?;
    let model = build_model(cfg, &a)?;
    let phi = initial_field(cfg)?;
    let spec = *phi.spec();
    if let Some(l) = cfg.slice {
        if l >= spec.n {
            return Err(Error::InvalidArgument(format!("slice index {l} outside 0..{}", spec.n)));
        }
    }
    let ev = Evolver::new(&model, spec, cfg.evolver()?)?;
    let initial = FieldStats::of(&phi)?;
    let mut steps = Vec::with_capacity(cfg.times.len());
    for (i, &t) in cfg.times.iter().enumerate() {
        let out = ev.apply_g(t, &phi)?;
        let stats = FieldStats::of(&out)?;
        let (oracle_table_delta, oracle_field_delta) = if cfg.oracle {
            let table = max_relative_delta(
                &ev.oracle_multiplier_table(t, cfg.oracle_step, Family::Tilde)?,
                &ev.multiplier_table(t, Family::Tilde)?,
            );
            let other = ev.oracle_evolve(t, &phi, cfg.oracle_step)?;
            (Some(table), Some(other.sub(&out)?.norm() / out.norm().max(f64::MIN_POSITIVE)))
        } else {
            (None, None)
        };
        let (mut field_file, mut slice_file) = (None, None);
        if let Some(prefix) = &cfg.field_out {
            let path = numbered(prefix, i, "gfld");
            spectral::save_field(&out, &path)?;
            field_file = Some(path);
            if let Some(l) = cfg.slice {
                let path = numbered(prefix, i, "csv");
                let f = std::fs::File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                spectral::write_slice_csv(&out, l, std::io::BufWriter::new(f))?;
                slice_file = Some(path);
            }
        }
        steps.push(StepReport {
            t,
            curl_ratio: stats.curl_norm / stats.norm.max(f64::MIN_POSITIVE),
            norm_bound: ev.norm_bound(t) * initial.norm,
            stats,
            oracle_table_delta,
            oracle_field_delta,
            field_file,
            slice_file,
        });
    }
    let report = EvolveReport {
        model: model.kind(),
        matrix: a,
        label: model.label(),
        grid: spec,
        interpolation: cfg.interpolation,
        initial,
        steps,
    };
    let mut w = sink(cfg.out.as_deref())?;
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(&report, &mut w)?,
        Format::Csv => {
            writeln!(
                w,
                "t,norm,max_magnitude,curl_norm,boundary_fraction,curl_ratio,norm_bound,oracle_table_delta,oracle_field_delta"
            )?;
            for s in &report.steps {
                let opt = |x: Option<f64>| x.map(fmt).unwrap_or_default();
                let st = &s.stats;
                let cols =
                    [s.t, st.norm, st.max_magnitude, st.curl_norm, st.boundary_fraction, s.curl_ratio, s.norm_bound];
                writeln!(
                    w,
                    "{},{},{}",
                    cols.map(fmt).join(","),
                    opt(s.oracle_table_delta),
                    opt(s.oracle_field_delta)
                )?;
            }
        }
    }
    w.flush()?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct QuadrantCount {
    quadrant: Quadrant,
    count: usize,
}

#[derive(Serialize)]
struct NamedReport {
    name: String,
    report: RegimeReport<f64>,
}

#[derive(Serialize)]
struct ScanReport {
    seed: u64,
    count: usize,
    bv_frequency: f64,
    histogram: Vec<QuadrantCount>,
    degenerate: usize,
    /// First sampled matrix in each quadrant (absent quadrants omitted).
    sampled_witnesses: Vec<NamedReport>,
    pinned_witnesses: Vec<NamedReport>,
}

pub fn scan(cfg: &RunConfig) -> Result<Status, Error> {
    let params = cfg.qg_params()?;
    let summary = scan_regimes(cfg.seed, cfg.count, &params);
    let report = ScanReport {
        seed: cfg.seed,
        count: cfg.count,
        bv_frequency: params.n,
        histogram: Quadrant::ALL.iter().map(|&q| QuadrantCount { quadrant: q, count: summary.count_of(q) }).collect(),
        degenerate: summary.degenerate,
        sampled_witnesses: Quadrant::ALL
            .iter()
            .filter_map(|&q| summary.witness(q).map(|r| NamedReport { name: format!("sample-{q}"), report: *r }))
            .collect(),
        pinned_witnesses: witness_reports(&params)
            .iter()
            .enumerate()
            .map(|(i, r)| NamedReport { name: format!("A{}", i + 1), report: *r })
            .collect(),
    };
    let mut w = sink(cfg.out.as_deref())?;
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(&report, &mut w)?,
        Format::Csv => {
            summary.write_histogram_csv(&mut w)?;
            writeln!(w)?;
            writeln!(w, "name,{REPORT_CSV_HEADER}")?;
            for r in report.sampled_witnesses.iter().chain(&report.pinned_witnesses) {
                writeln!(w, "{},{}", r.name, report_csv_row(&r.report))?;
            }
        }
    }
    w.flush()?;
    Ok(Status::Ok)
}
