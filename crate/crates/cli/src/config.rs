//! Run configuration: a flat TOML file whose keys match the long flag names,
//! overridden field by field by flags given on the command line.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use lsg_core::geometry::SymPosDef3;
use lsg_core::io::read_matrix_file;
use lsg_core::qg::{QgParams, DEFAULT_SCAN_SEED};
use lsg_core::{Error, EvolverConfig, GridSpec, Interpolation, ModelKind, QuadratureConfig, Vec3};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Sg,
    Qg,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Sg => ModelKind::Sg,
            Model::Qg => ModelKind::Qg,
        }
    }
}

/// Built-in initial fields for `evolve`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    /// `(1, −1/2, 1/4)·g(x)` with `g` a centred Gaussian.
    Gaussian,
    /// `∇g` of a centred Gaussian (a conservative field).
    Gradient,
    /// `a0·k·e^{2πik·x}` with `k` the lattice frequency nearest to `k0`.
    PlaneWave,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct RunConfig {
    pub matrix: Option<[f64; 6]>,
    pub matrix_file: Option<PathBuf>,
    pub bv_frequency: f64,
    pub model: Model,
    pub grid_n: usize,
    pub box_length: f64,
    pub times: Vec<f64>,
    pub periods: Option<f64>,
    pub samples: usize,
    pub k0: Option<[f64; 3]>,
    pub a0: f64,
    pub seed: u64,
    pub count: usize,
    pub format: Option<Format>,
    pub oracle: bool,
    pub oracle_step: f64,
    pub out: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub init: Init,
    pub sigma: f64,
    pub field_out: Option<PathBuf>,
    pub slice: Option<usize>,
    pub interpolation: Interpolation,
    pub clamp_time: f64,
    pub max_substep: f64,
    pub significance: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let grid = GridSpec::<f64>::default();
        let evolver = EvolverConfig::<f64>::default();
        Self {
            matrix: None,
            matrix_file: None,
            bv_frequency: 1.0,
            model: Model::Sg,
            grid_n: grid.n,
            box_length: grid.box_length,
            times: Vec::new(),
            periods: None,
            samples: 201,
            k0: None,
            a0: 1.0,
            seed: DEFAULT_SCAN_SEED,
            count: 10_000,
            format: None,
            oracle: false,
            oracle_step: 1e-3,
            out: None,
            input: None,
            init: Init::Gradient,
            sigma: 2.8,
            field_out: None,
            slice: None,
            interpolation: evolver.interpolation,
            clamp_time: evolver.clamp_time,
            max_substep: evolver.max_substep,
            significance: evolver.significance,
            abs_tol: evolver.quadrature.abs_tol,
            rel_tol: evolver.quadrature.rel_tol,
            max_subdivisions: evolver.quadrature.max_subdivisions,
        }
    }
}

/// Command-line overrides; every field is optional so that only the flags
/// actually given replace file values.
#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Matrix coefficients a,b,c,d,e,f of [[a,b,c],[b,d,e],[c,e,f]].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub matrix: Option<Vec<f64>>,
    /// JSON object {"a":..,"f":..} or a six-field CSV row.
    #[arg(long)]
    pub matrix_file: Option<PathBuf>,
    /// Brunt-Vaisala frequency N of the QG model.
    #[arg(long)]
    pub bv_frequency: Option<f64>,
    /// Dynamics used by planewave and evolve.
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Grid points per axis.
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Side length of the periodic box.
    #[arg(long)]
    pub box_length: Option<f64>,
    /// Comma-separated time points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub times: Option<Vec<f64>>,
    /// Plane-wave horizon in periods of an elliptic flow (used when no times are given).
    #[arg(long)]
    pub periods: Option<f64>,
    /// Number of time samples over the --periods horizon.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Initial frequency k1,k2,k3.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub k0: Option<Vec<f64>>,
    /// Initial plane-wave amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub a0: Option<f64>,
    /// RNG seed for scan.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sampled matrices for scan.
    #[arg(long)]
    pub count: Option<usize>,
    /// Report format (json unless a command defaults otherwise).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Compare against the per-mode RK4 oracle.
    #[arg(long)]
    pub oracle: bool,
    /// RK4 step of the oracle.
    #[arg(long)]
    pub oracle_step: Option<f64>,
    /// Report destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Initial field file (GFLD).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in initial field when no --input is given.
    #[arg(long, value_enum)]
    pub init: Option<Init>,
    /// Width of the built-in Gaussian.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Prefix for evolved field files, written as PREFIX-<i>.gfld.
    #[arg(long)]
    pub field_out: Option<PathBuf>,
    /// Also write the x3-plane with this index as PREFIX-<i>.csv.
    #[arg(long)]
    pub slice: Option<usize>,
    /// trilinear, spectral-resample or direct-spectral.
    #[arg(long, value_parser = parse_interpolation)]
    pub interpolation: Option<Interpolation>,
    /// Largest |t| accepted by the grid evolution.
    #[arg(long)]
    pub clamp_time: Option<f64>,
    /// Largest `|t|·‖F‖_F` handled by one warp factor.
    #[arg(long)]
    pub max_substep: Option<f64>,
    /// Modes below this fraction of the peak are ignored by the Nyquist check.
    #[arg(long)]
    pub significance: Option<f64>,
    /// Absolute tolerance of the symbol quadrature.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Relative tolerance of the symbol quadrature.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Subdivision limit of the symbol quadrature.
    #[arg(long)]
    pub max_subdivisions: Option<usize>,
}

fn parse_interpolation(s: &str) -> Result<Interpolation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn fixed<const N: usize>(v: Vec<f64>, what: &str) -> Result<[f64; N], Error> {
    let len = v.len();
    v.try_into().map_err(|_| Error::Parse(format!("{what} needs {N} comma-separated values, found {len}")))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serialises")
    }

    pub fn apply(&mut self, f: Flags) -> Result<(), Error> {
        // A matrix source given on the command line replaces either file source.
        if let Some(m) = f.matrix {
            self.matrix = Some(fixed(m, "--matrix")?);
            self.matrix_file = None;
        }
        if let Some(p) = f.matrix_file {
            self.matrix_file = Some(p);
            self.matrix = None;
        }
        if let Some(k) = f.k0 {
            self.k0 = Some(fixed(k, "--k0")?);
        }
        macro_rules! take {
            ($($field:ident),*) => { $( if let Some(v) = f.$field { self.$field = v; } )* };
        }
        take!(bv_frequency, model, grid_n, box_length, times, samples, a0, seed, count, oracle_step, init, sigma);
        take!(interpolation, clamp_time, max_substep, significance, abs_tol, rel_tol, max_subdivisions);
        macro_rules! take_opt {
            ($($field:ident),*) => { $( if f.$field.is_some() { self.$field = f.$field; } )* };
        }
        take_opt!(periods, format, out, input, field_out, slice);
        self.oracle |= f.oracle;
        Ok(())
    }

    /// Checks every numeric setting; run before any computation.
    pub fn validate(&self) -> Result<(), Error> {
        let positive = |x: f64, name: &str| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {x}")))
            }
        };
        if self.matrix.is_some() && self.matrix_file.is_some() {
            return Err(Error::InvalidArgument("give either matrix or matrix-file, not both".into()));
        }
        positive(self.bv_frequency, "bv-frequency")?;
        positive(self.oracle_step, "oracle-step")?;
        positive(self.sigma, "sigma")?;
        if let Some(p) = self.periods {
            positive(p, "periods")?;
        }
        if self.samples < 2 {
            return Err(Error::InvalidArgument("samples must be at least 2".into()));
        }
        if let Some(t) = self.times.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite time {t}")));
        }
        if !self.a0.is_finite() {
            return Err(Error::InvalidArgument("a0 must be finite".into()));
        }
        self.grid()?;
        self.evolver()?;
        Ok(())
    }

    pub fn matrix(&self) -> Result<SymPosDef3<f64>, Error> {
        match (&self.matrix, &self.matrix_file) {
            (Some(m), None) => SymPosDef3::from_array(*m),
            (None, Some(p)) => read_matrix_file(p),
            (None, None) => Err(Error::InvalidArgument("no matrix given (use --matrix or --matrix-file)".into())),
            (Some(_), Some(_)) => Err(Error::InvalidArgument("give either matrix or matrix-file, not both".into())),
        }
    }

    pub fn qg_params(&self) -> Result<QgParams<f64>, Error> {
        QgParams::new(self.bv_frequency)
    }

    pub fn grid(&self) -> Result<GridSpec<f64>, Error> {
        GridSpec::new(self.grid_n, self.box_length)
    }

    pub fn quadrature(&self) -> QuadratureConfig<f64> {
        QuadratureConfig { abs_tol: self.abs_tol, rel_tol: self.rel_tol, max_subdivisions: self.max_subdivisions }
    }

    pub fn evolver(&self) -> Result<EvolverConfig<f64>, Error> {
        let cfg = EvolverConfig {
            interpolation: self.interpolation,
            quadrature: self.quadrature(),
            clamp_time: self.clamp_time,
            max_substep: self.max_substep,
            significance: self.significance,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn k0(&self) -> Option<Vec3<f64>> {
        self.k0.map(Vec3::from_f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn populated_config_round_trips() {
        let cfg = RunConfig {
            matrix: Some([0.5, -1.0, -1.0, 4.0, 1.0, 3.0]),
            times: vec![0.0, 0.1, 1.0 / 3.0],
            k0: Some([0.1, -0.2, 0.3]),
            format: Some(Format::Csv),
            out: Some("report.json".into()),
            interpolation: Interpolation::Trilinear,
            init: Init::PlaneWave,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("grid-n = 32\nbogus = 1\n").is_err());
        assert_eq!(RunConfig::from_toml("grid-n = 32\n").unwrap().grid_n, 32);
    }

    #[test]
    fn flags_override_file_values() {
        let mut cfg = RunConfig::from_toml("matrix-file = \"a.json\"\ngrid-n = 32\nseed = 5\n").unwrap();
        cfg.apply(Flags { matrix: Some(vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0]), seed: Some(9), ..Flags::default() })
            .unwrap();
        assert_eq!(cfg.matrix_file, None);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.grid_n, 32);
        assert!(cfg.apply(Flags { k0: Some(vec![1.0]), ..Flags::default() }).is_err());
    }

    #[test]
    fn validation_catches_bad_settings() {
        let bad = [
            RunConfig { bv_frequency: 0.0, ..RunConfig::default() },
            RunConfig { grid_n: 7, ..RunConfig::default() },
            RunConfig { abs_tol: -1.0, ..RunConfig::default() },
            RunConfig { times: vec![f64::NAN], ..RunConfig::default() },
            RunConfig { samples: 1, ..RunConfig::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        assert!(RunConfig::default().validate().is_ok());
    }
}
