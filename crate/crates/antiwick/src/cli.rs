//! Command-line interface.

use std::path::{Path, PathBuf};

use antiwick_core::heat::{
    desmooth_complex, desmooth_fourier, smooth, DesmoothMethod, DesmoothParams, DesmoothReport,
    DEFAULT_REL_THRESHOLD, DEFAULT_STRIP_HALFWIDTH, DEFAULT_Y_NODES,
};
use antiwick_core::pairing::{antiwick_pair, PairingParams, PairingResult};
use antiwick_core::quantize::{
    assemble_antiwick, kernel_from_weyl, kernel_grid_for_phase, weyl_from_kernel, OperatorRep,
};
use antiwick_core::{Error, Grid, SampledField};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::checks::{self, CheckOptions, CheckReport, SUITES};
use crate::error::{CliError, CliResult, EXIT_FLAGGED};
use crate::format::{read_field, read_kernel, with_suffix, write_csv, write_field, write_json, write_kernel};
use crate::manifest::Recorder;
use crate::spec::{build_operator, load, GaussianSumSpec, OperatorSpec};

#[derive(Debug, Parser)]
#[command(name = "antiwick", version, about = "Anti-Wick quantization and heat-flow pairings")]
pub struct Cli {
    /// Directory for outputs.
    #[arg(long, global = true, env = "ANTIWICK_OUT", default_value = ".")]
    pub out_dir: PathBuf,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write fields as CSV (dim ≤ 2).
    #[arg(long, global = true)]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Fourier,
    Complex,
}

impl From<Method> for DesmoothMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Fourier => DesmoothMethod::FourierRegularized,
            Method::Complex => DesmoothMethod::ComplexShift,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Points per axis.
    #[arg(long = "n", default_value_t = 256)]
    pub n: usize,
    /// Half-extent of the box.
    #[arg(long = "l", default_value_t = 8.0)]
    pub l: f64,
}

impl GridArgs {
    fn grid(&self, dim: usize) -> CliResult<Grid> {
        Ok(Grid::new(dim, self.n, self.l)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct DesmoothArgs {
    #[arg(long, value_enum, default_value = "complex")]
    pub method: Method,
    /// Relative cutoff of the regularized Fourier inversion.
    #[arg(long, default_value_t = DEFAULT_REL_THRESHOLD)]
    pub threshold: f64,
    /// Strip half-width `Y` of the complex shift.
    #[arg(long, default_value_t = DEFAULT_STRIP_HALFWIDTH)]
    pub strip: f64,
    /// Quadrature intervals across the strip.
    #[arg(long, default_value_t = DEFAULT_Y_NODES)]
    pub ynodes: usize,
}

impl DesmoothArgs {
    fn pairing(&self) -> PairingParams {
        PairingParams {
            rel_threshold: self.threshold,
            strip_halfwidth: self.strip,
            y_nodes: self.ynodes,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a Gaussian-sum spec on a grid.
    Sample {
        #[arg(long)]
        function: String,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply e^{Δ/8π} to a stored field.
    Smooth {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Invert e^{Δ/8π}, from a stored field or an analytic spec.
    Desmooth {
        #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
        input: Option<PathBuf>,
        /// Gaussian-sum spec, sampled on the grid given by `--n`, `--l`.
        #[arg(long)]
        spec: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        method: DesmoothArgs,
        /// Field to compare the result against.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weyl symbol of a stored kernel.
    WeylFromKernel {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Kernel of a stored Weyl symbol.
    KernelFromWeyl {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Kernel of the anti-Wick operator of a symbol.
    AntiwickAssemble {
        /// Operator spec of kind `antiwick`.
        #[arg(long)]
        operator: String,
        /// Phase grid for analytic symbols.
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate ⟨T(A), u⟩.
    Pair {
        #[arg(long)]
        operator: String,
        #[arg(long)]
        test_function: String,
        /// Phase grid.
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        method: DesmoothArgs,
        #[arg(long, default_value = "pair")]
        out: PathBuf,
    },
    /// Run a verification suite, or `all`.
    Check {
        suite: String,
        /// Largest Hermite order for `hermite-bound`.
        #[arg(long = "mmax", default_value_t = 200)]
        m_max: usize,
        /// Also pair against a Gaussian of this width (`pairing-consistency`).
        #[arg(long)]
        wide: Option<f64>,
    },
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Flagged,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Self::Pass => 0,
            Self::Flagged => EXIT_FLAGGED,
        }
    }
}

struct Ctx {
    out_dir: PathBuf,
    csv: bool,
}

impl Ctx {
    fn stem(&self, out: &Path) -> PathBuf {
        self.out_dir.join(out)
    }

    fn field(&self, rec: &mut Recorder, stem: &Path, f: &SampledField) -> CliResult<()> {
        rec.outputs(write_field(stem, f)?);
        if self.csv {
            let path = with_suffix(stem, ".csv");
            write_csv(&path, f)?;
            rec.outputs([path]);
        }
        Ok(())
    }

    fn report<T: serde::Serialize>(&self, rec: &mut Recorder, path: PathBuf, value: &T) -> CliResult<()> {
        write_json(&path, value)?;
        rec.outputs([path]);
        Ok(())
    }
}

fn complex(v: antiwick_core::Complex64) -> Value {
    json!([v.re, v.im])
}

pub fn desmooth_json(r: &DesmoothReport) -> Value {
    let params = match r.params {
        DesmoothParams::FourierRegularized {
            rel_threshold,
            cutoff_frequency,
            kept_modes,
        } => json!({"rel_threshold": rel_threshold, "cutoff_frequency": cutoff_frequency, "kept_modes": kept_modes}),
        DesmoothParams::ComplexShift {
            strip_halfwidth,
            y_nodes,
        } => json!({"strip_halfwidth": strip_halfwidth, "y_nodes": y_nodes}),
    };
    json!({
        "method": r.method.name(),
        "params": params,
        "residual": r.residual,
        "spectral_tail": r.spectral_tail,
        "ill_posed": r.ill_posed(),
    })
}

pub fn pairing_json(r: &PairingResult) -> Value {
    json!({
        "value": complex(r.value),
        "method": r.method.name(),
        "residual": r.residual,
        "spectral_tail": r.spectral_tail,
        "quadrature_error_estimate": r.quadrature_error_estimate,
        "flagged": r.flagged,
    })
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn divergent_report(path: &Path, method: &str, why: &str) -> CliResult<()> {
    write_json(path, &json!({"method": method, "divergent": why, "ill_posed": true}))
}

/// Runs one command; usage and IO problems come back as errors.
pub fn run(cli: Cli) -> CliResult<Status> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let ctx = Ctx {
        out_dir: cli.out_dir,
        csv: cli.csv,
    };
    match cli.command {
        Command::Sample { function, grid, out } => {
            let spec = load::<GaussianSumSpec>(&function)?;
            let u = spec.value.build()?;
            let g = grid.grid(u.dim())?;
            let mut rec = Recorder::new("sample", json!({"function": spec.value, "N": grid.n, "L": grid.l}));
            rec_inputs(&mut rec, spec.source.iter());
            let stem = ctx.stem(&out);
            ctx.field(&mut rec, &stem, &u.sample(&g, &vec![0.0; g.dim()])?)?;
            rec.finish(&stem)?;
            Ok(Status::Pass)
        }
        Command::Smooth { input, out } => {
            let f = read_field(&input)?;
            let mut rec = Recorder::new("smooth", json!({}));
            rec.input(&input);
            let stem = ctx.stem(&out);
            ctx.field(&mut rec, &stem, &smooth(&f))?;
            rec.finish(&stem)?;
            Ok(Status::Pass)
        }
        Command::Desmooth {
            input,
            spec,
            grid,
            method,
            compare,
            out,
        } => cmd_desmooth(&ctx, input, spec, grid, method, compare, out),
        Command::WeylFromKernel { input, out } => {
            let k = read_kernel(&input)?;
            let mut rec = Recorder::new("weyl-from-kernel", json!({}));
            rec.input(&input);
            let stem = ctx.stem(&out);
            ctx.field(&mut rec, &stem, &weyl_from_kernel(&k)?)?;
            rec.finish(&stem)?;
            Ok(Status::Pass)
        }
        Command::KernelFromWeyl { input, out } => {
            let s = read_field(&input)?;
            let mut rec = Recorder::new("kernel-from-weyl", json!({}));
            rec.input(&input);
            let stem = ctx.stem(&out);
            rec.outputs(write_kernel(&stem, &kernel_from_weyl(&s)?)?);
            rec.finish(&stem)?;
            Ok(Status::Pass)
        }
        Command::AntiwickAssemble { operator, grid, out } => {
            let spec = load::<OperatorSpec>(&operator)?;
            let dim = match &spec.value {
                OperatorSpec::Antiwick(crate::spec::SymbolSource::Analytic(s)) => s.dim,
                OperatorSpec::Antiwick(_) => 0,
                _ => return Err(CliError::Usage("antiwick-assemble needs an `antiwick` operator".into())),
            };
            // Field symbols carry their own grid.
            let phase = if dim == 0 { None } else { Some(grid.grid(dim)?) };
            let (op, inputs) = match phase {
                Some(p) => build_operator(&spec, &p)?,
                None => build_field_symbol(&spec)?,
            };
            let OperatorRep::AntiWick(a) = op else { unreachable!() };
            let kgrid = kernel_grid_for_phase(a.symbol().grid())?;
            let mut rec = Recorder::new("antiwick-assemble", json!({"operator": spec.value, "N": grid.n, "L": grid.l}));
            rec_inputs(&mut rec, inputs.iter());
            let stem = ctx.stem(&out);
            rec.outputs(write_kernel(&stem, &assemble_antiwick(&a, &kgrid)?)?);
            rec.finish(&stem)?;
            Ok(Status::Pass)
        }
        Command::Pair {
            operator,
            test_function,
            grid,
            method,
            out,
        } => {
            let u_spec = load::<GaussianSumSpec>(&test_function)?;
            let u = u_spec.value.build()?;
            let phase = grid.grid(u.dim())?;
            let op_spec = load::<OperatorSpec>(&operator)?;
            let (op, inputs) = build_operator(&op_spec, &phase)?;
            let mut rec = Recorder::new(
                "pair",
                json!({
                    "operator": op_spec.value,
                    "test_function": u_spec.value,
                    "N": grid.n,
                    "L": grid.l,
                    "method": DesmoothMethod::from(method.method).name(),
                    "threshold": method.threshold,
                    "strip": method.strip,
                    "ynodes": method.ynodes,
                }),
            );
            rec_inputs(&mut rec, inputs.iter().chain(u_spec.source.iter()));
            let stem = ctx.stem(&out);
            let path = with_suffix(&stem, ".json");
            let status = match antiwick_pair(&op, &u, &phase, method.method.into(), &method.pairing()) {
                Ok(r) => {
                    let v = pairing_json(&r);
                    print(&v);
                    ctx.report(&mut rec, path, &v)?;
                    if r.flagged {
                        Status::Flagged
                    } else {
                        Status::Pass
                    }
                }
                Err(Error::Divergent(why)) => {
                    divergent_report(&path, DesmoothMethod::from(method.method).name(), why)?;
                    rec.outputs([path]);
                    eprintln!("antiwick: divergent: {why}");
                    Status::Flagged
                }
                Err(e) => return Err(e.into()),
            };
            rec.finish(&stem)?;
            Ok(status)
        }
        Command::Check { suite, m_max, wide } => {
            let opts = CheckOptions { m_max, wide };
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut status = Status::Pass;
            for name in names {
                let report = checks::run(name, &opts)?;
                status = status.max(check_status(&report));
                let stem = ctx.stem(Path::new(&format!("check-{name}")));
                let mut rec = Recorder::new(
                    "check",
                    json!({"suite": name, "mmax": m_max, "wide": wide}),
                );
                ctx.report(&mut rec, with_suffix(&stem, ".json"), &report)?;
                rec.finish(&stem)?;
                println!(
                    "{} {}{}",
                    if report.pass { "PASS" } else { "FAIL" },
                    name,
                    if report.flagged { " (flagged)" } else { "" }
                );
            }
            Ok(status)
        }
    }
}

impl PartialOrd for Status {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Status {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.code().cmp(&other.code())
    }
}

fn check_status(r: &CheckReport) -> Status {
    if r.pass && !r.flagged {
        Status::Pass
    } else {
        Status::Flagged
    }
}

fn rec_inputs<'a>(rec: &mut Recorder, paths: impl Iterator<Item = &'a PathBuf>) {
    for p in paths {
        rec.input(p.clone());
    }
}

fn build_field_symbol(
    spec: &crate::spec::Loaded<OperatorSpec>,
) -> CliResult<(OperatorRep, Vec<PathBuf>)> {
    let OperatorSpec::Antiwick(crate::spec::SymbolSource::Field { field }) = &spec.value else {
        unreachable!()
    };
    let path = spec.base.join(field);
    let f = read_field(&path)?;
    build_operator(spec, f.grid())
}

fn cmd_desmooth(
    ctx: &Ctx,
    input: Option<PathBuf>,
    spec: Option<String>,
    grid: GridArgs,
    args: DesmoothArgs,
    compare: Option<PathBuf>,
    out: PathBuf,
) -> CliResult<Status> {
    let method: DesmoothMethod = args.method.into();
    let mut params = json!({
        "method": method.name(),
        "threshold": args.threshold,
        "strip": args.strip,
        "ynodes": args.ynodes,
    });
    let mut rec;
    let result = match (input, spec) {
        (Some(path), None) => {
            if method == DesmoothMethod::ComplexShift {
                return Err(CliError::Usage(
                    "the complex shift needs an analytic --spec; use --method fourier for stored fields".into(),
                ));
            }
            let u = read_field(&path)?;
            params["input"] = json!(path);
            rec = Recorder::new("desmooth", params);
            rec.input(&path);
            desmooth_fourier(&u, args.threshold)
        }
        (None, Some(s)) => {
            let loaded = load::<GaussianSumSpec>(&s)?;
            let u = loaded.value.build()?;
            let g = grid.grid(u.dim())?;
            params["spec"] = serde_json::to_value(&loaded.value).expect("serializable");
            params["N"] = json!(grid.n);
            params["L"] = json!(grid.l);
            rec = Recorder::new("desmooth", params);
            rec_inputs(&mut rec, loaded.source.iter());
            match method {
                DesmoothMethod::ComplexShift => desmooth_complex(&u, &g, args.strip, args.ynodes),
                DesmoothMethod::FourierRegularized => {
                    desmooth_fourier(&u.sample(&g, &vec![0.0; g.dim()])?, args.threshold)
                }
            }
        }
        _ => return Err(CliError::Usage("give exactly one of --input and --spec".into())),
    };
    let stem = ctx.stem(&out);
    let report_path = with_suffix(&stem, ".report.json");
    let status = match result {
        Ok(r) => {
            let mut v = desmooth_json(&r);
            if let Some(c) = &compare {
                let reference = read_field(c)?;
                rec.input(c);
                v["compare"] = json!({"path": c, "sup_error": r.result.sup_distance(&reference)?});
            }
            print(&v);
            ctx.field(&mut rec, &stem, &r.result)?;
            ctx.report(&mut rec, report_path, &v)?;
            if r.ill_posed() {
                Status::Flagged
            } else {
                Status::Pass
            }
        }
        Err(Error::Divergent(why)) => {
            divergent_report(&report_path, method.name(), why)?;
            rec.outputs([report_path]);
            eprintln!("antiwick: divergent: {why}");
            Status::Flagged
        }
        Err(e) => return Err(e.into()),
    };
    rec.finish(&stem)?;
    Ok(status)
}
