//! `strongfield` command line: analyze | dirac | trace | quantize | verify.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use crate::constraints::{dirac_bracket_table, ConstraintError};
use crate::fock::{
    build_space_with, commutator_matrix, lowering_matrix, raising_matrix, semiclassical_check, spin_operators,
    su2_report, to_json_17, BuildOptions, FockError, KahlerWeight,
};
use crate::foliation::{
    eom_residual, leaf_space_summary, rank_map, trace_leaf_with_direction, FoliationError, GridAxis, GridSpec,
};
use crate::geometry::{
    Chart, ChartPoint, GeometryError, PolynomialPotential, PotentialSpec, RhoProfile, DEFAULT_RANK_TOL,
};
use crate::quadrature::QuadratureOptions;
use crate::verify::{format_table, run_verify, VerifyOptions, GROUPS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CHART: i32 = 3;
pub const EXIT_RANK: i32 = 4;
pub const EXIT_CROSS_CHECK: i32 = 5;
pub const EXIT_DIVERGENT: i32 = 6;

#[derive(Debug, Parser)]
#[command(
    name = "strongfield",
    version,
    about = "Strong-field charged particle: foliations, Dirac brackets, Fock quantization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank map, connected regions and leaf-space summary on a grid.
    Analyze(CommonArgs),
    /// Dirac bracket table at a point.
    Dirac(CommonArgs),
    /// Trace a leaf of the null foliation from a point.
    Trace(CommonArgs),
    /// Weighted Fock space, ladder operators and (monopole) su(2) report.
    Quantize(CommonArgs),
    /// Run the verification suite.
    Verify(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CommonArgs {
    /// JSON file with any of these options (keys as the long flag names).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// disc | stack | monopole | darboux | custom | plane (quantize only)
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// What to echo on stdout.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long = "tol-rank")]
    pub tol_rank: Option<f64>,
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long = "tol-quad")]
    pub tol_quad: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Disc radius.
    #[arg(long)]
    pub r0: Option<f64>,
    /// ρ(r) = coeff·r^exp for the disc.
    #[arg(long = "rho-coeff")]
    pub rho_coeff: Option<f64>,
    #[arg(long = "rho-exp")]
    pub rho_exp: Option<f64>,
    /// Monopole charge.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub charge: Option<i64>,
    /// Monopole weight exponent N/ħ.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Fock truncation index.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<usize>,
    /// Darboux pairs.
    #[arg(long)]
    pub p: Option<usize>,
    /// Darboux dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Custom polynomial potential JSON.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// `min:max:cells`, once for all axes or once per axis.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<Vec<String>>,
    /// Radius of the excluded ball around the origin.
    #[arg(long)]
    pub exclude: Option<f64>,
    #[arg(long)]
    pub chart: Option<String>,
    /// Comma-separated coordinates; `pi`, `pi/2`, `3*pi/4` are accepted.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Initial direction for leaves with a null space of dimension > 1.
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Option<String>,
    /// Leaf step size.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Comma-separated verify groups.
    #[arg(long)]
    pub only: Option<String>,
    /// Test hook: relative perturbation of c_1.
    #[arg(long = "inject-cn-perturbation", allow_hyphen_values = true)]
    pub inject_cn_perturbation: Option<f64>,
}

impl CommonArgs {
    /// Flags override the config file.
    fn merged(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let base: CommonArgs =
            serde_json::from_str(&text).map_err(|e| CliError::config(format!("config {}: {e}", path.display())))?;
        macro_rules! pick {
            ($($f:ident),*) => { CommonArgs { config: None, $($f: self.$f.or(base.$f)),* } };
        }
        Ok(pick!(
            preset,
            out,
            format,
            tol_rank,
            tol_quad,
            seed,
            r0,
            rho_coeff,
            rho_exp,
            charge,
            m,
            hbar,
            k,
            p,
            n,
            file,
            grid,
            exclude,
            chart,
            point,
            direction,
            h,
            steps,
            only,
            inject_cn_perturbation
        ))
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    fn tol_rank(&self) -> Result<f64, CliError> {
        let t = self.tol_rank.unwrap_or(DEFAULT_RANK_TOL);
        positive("tol-rank", t)
    }

    fn quadrature(&self) -> Result<QuadratureOptions, CliError> {
        let mut q = QuadratureOptions::default();
        if let Some(t) = self.tol_quad {
            q.rel_tol = positive("tol-quad", t)?;
        }
        Ok(q)
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(format!(
            "--{name} must be positive and finite, got {v}"
        )))
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        let code = match e {
            GeometryError::ExcludedPoint { .. }
            | GeometryError::UnsupportedChart { .. }
            | GeometryError::StencilOutsideChart { .. } => EXIT_CHART,
            _ => EXIT_CONFIG,
        };
        Self::new(code, e.to_string())
    }
}

impl From<FoliationError> for CliError {
    fn from(e: FoliationError) -> Self {
        match e {
            FoliationError::Geometry(g) => g.into(),
            FoliationError::InvalidGrid(_)
            | FoliationError::InvalidStep(_)
            | FoliationError::DirectionOutsideNullSpace => Self::config(e.to_string()),
            _ => Self::new(EXIT_RANK, e.to_string()),
        }
    }
}

impl From<ConstraintError> for CliError {
    fn from(e: ConstraintError) -> Self {
        match e {
            ConstraintError::Geometry(g) => g.into(),
            ConstraintError::InvalidDarboux(_) => Self::config(e.to_string()),
            _ => Self::new(EXIT_RANK, e.to_string()),
        }
    }
}

impl From<FockError> for CliError {
    fn from(e: FockError) -> Self {
        let code = match e {
            FockError::Divergent { .. } | FockError::DivergentMoment { .. } | FockError::TruncationTooLarge { .. } => {
                EXIT_DIVERGENT
            }
            FockError::CrossCheck { .. } | FockError::NonPositive { .. } | FockError::Quadrature(_) => EXIT_CROSS_CHECK,
            FockError::NoLambda { .. } => EXIT_VERIFY,
            _ => EXIT_CONFIG,
        };
        Self::new(code, e.to_string())
    }
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Analyze(a) => cmd_analyze(&a.merged()?),
        Command::Dirac(a) => cmd_dirac(&a.merged()?),
        Command::Trace(a) => cmd_trace(&a.merged()?),
        Command::Quantize(a) => cmd_quantize(&a.merged()?),
        Command::Verify(a) => cmd_verify(&a.merged()?),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

fn read_custom(args: &CommonArgs) -> Result<PotentialSpec, CliError> {
    let path = args
        .file
        .as_ref()
        .ok_or_else(|| CliError::config("--preset custom needs --file"))?;
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    Ok(PotentialSpec::custom(PolynomialPotential::from_json(&text)?)?)
}

/// Potential for the geometric commands.
pub fn potential_from_args(args: &CommonArgs) -> Result<PotentialSpec, CliError> {
    let preset = args
        .preset
        .as_deref()
        .ok_or_else(|| CliError::config("--preset is required"))?;
    let spec = match preset {
        "disc" => {
            let mut rho = RhoProfile::default();
            if let Some(c) = args.rho_coeff {
                rho.coeff = c;
            }
            if let Some(e) = args.rho_exp {
                rho.exponent = e;
            }
            PotentialSpec::disc(args.r0.unwrap_or(1.0), rho)?
        }
        "stack" => PotentialSpec::Stack,
        "monopole" => PotentialSpec::monopole(args.charge.unwrap_or(1))?,
        "darboux" => {
            let p = args.p.unwrap_or(1);
            PotentialSpec::darboux(p, args.n.unwrap_or(2 * p))?
        }
        "custom" => read_custom(args)?,
        other => return Err(GeometryError::UnknownPreset(other.to_string()).into()),
    };
    Ok(spec)
}

fn chart_from_args(args: &CommonArgs, spec: &PotentialSpec) -> Result<Chart, CliError> {
    match &args.chart {
        Some(name) => name.parse::<Chart>().map_err(CliError::from),
        None => Ok(spec.default_chart()),
    }
}

fn parse_number(token: &str) -> Result<f64, CliError> {
    let t = token.trim();
    let bad = || CliError::config(format!("cannot parse number `{t}`"));
    if !t.contains("pi") {
        return t.parse::<f64>().map_err(|_| bad());
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    let factor = match num.trim().strip_suffix("pi") {
        Some("") => 1.0,
        Some(f) => f
            .trim()
            .trim_end_matches('*')
            .trim()
            .parse::<f64>()
            .map_err(|_| bad())?,
        None => return Err(bad()),
    };
    Ok(sign * factor * std::f64::consts::PI / den)
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',').map(parse_number).collect()
}

fn point_from_args(args: &CommonArgs, spec: &PotentialSpec) -> Result<ChartPoint, CliError> {
    let text = args
        .point
        .as_deref()
        .ok_or_else(|| CliError::config("--point is required"))?;
    let coords = parse_vector(text)?;
    if coords.len() != spec.dimension() {
        return Err(CliError::config(format!(
            "--point has {} coordinates, the {} potential has dimension {}",
            coords.len(),
            spec.name(),
            spec.dimension()
        )));
    }
    let point = ChartPoint::new(chart_from_args(args, spec)?, coords)?;
    spec.check_point(&point)?;
    Ok(point)
}

fn default_axis(spec: &PotentialSpec) -> GridAxis {
    match spec {
        PotentialSpec::Disc { r0, .. } => GridAxis {
            min: -2.0 * r0,
            max: 2.0 * r0,
            cells: 50,
        },
        PotentialSpec::Monopole { .. } => GridAxis {
            min: -1.0,
            max: 1.0,
            cells: 20,
        },
        _ => GridAxis {
            min: -1.0,
            max: 1.0,
            cells: 10,
        },
    }
}

fn grid_from_args(args: &CommonArgs, spec: &PotentialSpec) -> Result<GridSpec, CliError> {
    let dim = spec.dimension();
    let axes: Vec<GridAxis> = match &args.grid {
        None => vec![default_axis(spec); dim],
        Some(list) if list.len() == 1 => vec![list[0].parse::<GridAxis>()?; dim],
        Some(list) if list.len() == dim => list.iter().map(|s| s.parse::<GridAxis>()).collect::<Result<_, _>>()?,
        Some(list) => {
            return Err(CliError::config(format!(
                "--grid given {} times; expected once or {dim} times",
                list.len()
            )))
        }
    };
    let chart = chart_from_args(args, spec)?;
    if !spec.charts().contains(&chart) {
        return Err(GeometryError::UnsupportedChart {
            preset: spec.name(),
            chart,
        }
        .into());
    }
    let grid = GridSpec::new(axes, args.exclude.unwrap_or(0.0), chart)?;
    Ok(grid)
}

fn cmd_analyze(args: &CommonArgs) -> Result<i32, CliError> {
    let spec = potential_from_args(args)?;
    let grid = grid_from_args(args, &spec)?;
    let map = rank_map(&spec, &grid, args.tol_rank()?)?;
    let report = leaf_space_summary(&map);
    let out = args.out_dir();
    let csv = map.to_csv();
    let summary = map.summary_json();
    write_file(&out, "rank_map.csv", &csv)?;
    write_file(&out, "regions.json", &summary)?;
    write_file(&out, "leaf_space.json", &report.to_json())?;
    match args.format {
        Some(Format::Json) => println!("{summary}"),
        Some(Format::Csv) => print!("{csv}"),
        None => {
            println!(
                "{} region(s), {} excluded cell(s)",
                map.regions().len(),
                map.excluded_cells()
            );
            for r in &report.regions {
                println!("  region {}: rank {}, {} cells, {}", r.label, r.rank, r.cells, r.note);
            }
            println!("{}", report.summary);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_dirac(args: &CommonArgs) -> Result<i32, CliError> {
    let spec = potential_from_args(args)?;
    let point = point_from_args(args, &spec)?;
    let table = dirac_bracket_table(&spec, &point, args.tol_rank()?)?;
    let text = table.to_json();
    write_file(&args.out_dir(), "dirac.json", &text)?;
    if table.degenerate {
        eprintln!(
            "error: F has rank 0 at {:?}: θ vanishes and no Dirac bracket is defined (degenerate rank)",
            point.coords()
        );
        return Ok(EXIT_RANK);
    }
    match args.format {
        Some(Format::Json) | None => println!("{text}"),
        Some(Format::Csv) => {
            let n = point.dim();
            let mut csv = String::from("block,i,j,value\n");
            for (name, m) in [("xx", &table.theta.entries), ("xp", &table.xp), ("pp", &table.pp)] {
                for i in 0..n {
                    for j in 0..n {
                        let _ = writeln!(csv, "{name},{i},{j},{:?}", m[(i, j)]);
                    }
                }
            }
            print!("{csv}");
        }
    }
    Ok(EXIT_OK)
}

fn cmd_trace(args: &CommonArgs) -> Result<i32, CliError> {
    let spec = potential_from_args(args)?;
    let start = point_from_args(args, &spec)?;
    let direction = args.direction.as_deref().map(parse_vector).transpose()?;
    let h = args.h.unwrap_or(1e-2);
    let steps = args.steps.unwrap_or(100);
    let path = trace_leaf_with_direction(&spec, &start, h, steps, args.tol_rank()?, direction.as_deref())?;
    let residual = if path.len() >= 3 {
        Some(eom_residual(&spec, &path)?)
    } else {
        None
    };
    let mut csv = String::from("step");
    for k in 0..start.dim() {
        let _ = write!(csv, ",x{k}");
    }
    csv.push('\n');
    for (i, p) in path.points.iter().enumerate() {
        let _ = write!(csv, "{i}");
        for c in p.coords() {
            let _ = write!(csv, ",{c:?}");
        }
        csv.push('\n');
    }
    let value = json!({
        "chart": start.chart().name(),
        "step": h,
        "termination": path.termination,
        "points": path.points.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>(),
        "eom_residual": residual,
    });
    let text = serde_json::to_string_pretty(&value).expect("leaf serializes");
    write_file(&args.out_dir(), "leaf.csv", &csv)?;
    write_file(&args.out_dir(), "leaf.json", &text)?;
    match args.format {
        Some(Format::Json) => println!("{text}"),
        Some(Format::Csv) => print!("{csv}"),
        None => println!(
            "{} points, termination {:?}, eom_residual {}",
            path.len(),
            path.termination,
            residual.map_or("n/a".to_string(), |r| format!("{r:e}"))
        ),
    }
    Ok(EXIT_OK)
}

fn weight_from_args(args: &CommonArgs) -> Result<KahlerWeight, CliError> {
    let preset = args
        .preset
        .as_deref()
        .ok_or_else(|| CliError::config("--preset is required"))?;
    let hbar = args.hbar.unwrap_or(1.0);
    let weight = match preset {
        "plane" => KahlerWeight::plane(hbar)?,
        "disc" => KahlerWeight::disc(args.r0.unwrap_or(1.0), hbar)?,
        "monopole" => {
            let m = match (args.m, args.charge) {
                (Some(m), _) => m,
                (None, Some(n)) => n as f64 / hbar,
                (None, None) => return Err(CliError::config("--preset monopole needs --M or --N")),
            };
            KahlerWeight::monopole(m, hbar)?
        }
        other => {
            return Err(CliError::config(format!(
                "quantize supports plane, disc and monopole, got `{other}`"
            )))
        }
    };
    Ok(weight)
}

fn cmd_quantize(args: &CommonArgs) -> Result<i32, CliError> {
    let weight = weight_from_args(args)?;
    let opts = BuildOptions {
        quadrature: args.quadrature()?,
        perturb_closed_form: args.inject_cn_perturbation.map(|eps| (1, eps)),
        ..BuildOptions::default()
    };
    let space = build_space_with(weight, args.k, &opts)?;
    let out = args.out_dir();
    let csv = space.to_csv();
    write_file(&out, "cn.csv", &csv)?;
    write_file(&out, "raising.json", &raising_matrix(&space).to_json())?;
    write_file(&out, "lowering.json", &lowering_matrix(&space).to_json())?;
    write_file(&out, "commutator.json", &commutator_matrix(&space).to_json())?;
    let mut summary = json!({
        "weight": weight.name(),
        "hbar": weight.hbar,
        "dimension": space.dim(),
        "c": space.c(),
        "commutator_diagonal": space.commutator_diagonal(),
        "cross_check_error": space.cross_check_error(),
    });
    if matches!(weight.name(), "plane" | "monopole") && space.dim() >= 2 {
        let check = semiclassical_check(&space)?;
        write_file(
            &out,
            "semiclassical.json",
            &to_json_17(&serde_json::to_value(&check).expect("serializes")),
        )?;
    }
    if weight.name() == "monopole" {
        let report = su2_report(&space)?;
        write_file(&out, "su2_report.json", &report.to_json())?;
        for op in spin_operators(&space, report.lambda_fit)? {
            write_file(&out, &format!("{}.json", op.label), &op.to_json())?;
        }
        summary["su2"] = serde_json::to_value(&report).expect("serializes");
    }
    let text = to_json_17(&summary);
    write_file(&out, "quantize.json", &text)?;
    match args.format {
        Some(Format::Json) => println!("{text}"),
        Some(Format::Csv) => print!("{csv}"),
        None => {
            println!(
                "{} space: {} states, cross-check {:e}",
                weight.name(),
                space.dim(),
                space.cross_check_error()
            );
            print!("{csv}");
            if let Some(r) = summary.get("su2") {
                println!(
                    "su(2): J = {}, λ* = {}, residual(λ*) = {}, residual(λ = M) = {}",
                    r["spin"], r["lambda_fit"], r["residuals_fit"]["plus_minus"], r["residuals_nominal"]["plus_minus"]
                );
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: &CommonArgs) -> Result<i32, CliError> {
    let only: Vec<String> = args
        .only
        .as_deref()
        .map(|s| {
            s.split(',')
                .map(|g| g.trim().to_string())
                .filter(|g| !g.is_empty())
                .collect()
        })
        .unwrap_or_default();
    if let Some(bad) = only.iter().find(|g| !GROUPS.contains(&g.as_str())) {
        return Err(CliError::config(format!(
            "unknown verify group `{bad}`; known: {}",
            GROUPS.join(", ")
        )));
    }
    let opts = VerifyOptions {
        seed: args.seed.unwrap_or(VerifyOptions::default().seed),
        tol_rank: args.tol_rank()?,
        only,
        cn_perturbation: args.inject_cn_perturbation,
    };
    let results = run_verify(&opts);
    if let Some(out) = &args.out {
        let text = serde_json::to_string_pretty(&results).expect("results serialize");
        write_file(out, "verify.json", &text)?;
    }
    match args.format {
        Some(Format::Json) => println!("{}", serde_json::to_string_pretty(&results).expect("results serialize")),
        _ => print!("{}", format_table(&results)),
    }
    Ok(if results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_VERIFY
    })
}
