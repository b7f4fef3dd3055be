use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use predprey_core::convergence::ensure_complete;
use predprey_core::equilibria::Jacobian2;
use predprey_core::params::NONDIM_NAMES;
use predprey_core::pde::micro_from_limit;
use predprey_core::turing::{
    boundary_curves, classify_pair, cross_linearization, holling_linearizations, unstable_modes_1d, Boundary,
    DiffusionModel, DiffusionVariant, Interval, Linearization, RegionComparison,
};
use predprey_core::{
    classify_equilibria, classify_holling, compare_regions, epsilon_sweep, nondimensionalize, parameter_scan,
    simulate, Error as CoreError, LimitKinetics, ScanAxis, ScanBase, ScanLabel, SimState, SweepSetup, System,
};
use thiserror::Error;

use crate::cli::{AnalysisArgs, Cli, Command, ConvergeArgs, RenderArgs, ScanArgs, SimSystem, SimulateArgs, TuringArgs, Variant};
use crate::config::{load_config, ConfigError, RunConfig};
use crate::csvio::{self, fmt, EquilibriumRow, ScanRow};
use crate::manifest::RunManifest;
use crate::svg::{region_map, SvgError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Svg(#[from] SvgError),
}

impl CliError {
    /// 2 configuration, 3 numerical failure, 4 failed precondition, 1 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                CoreError::InvalidParameter { .. } | CoreError::Domain { .. } | CoreError::ShapeMismatch { .. } => 2,
                CoreError::NoCoexistence { .. } | CoreError::Precondition(_) | CoreError::Undefined(_) => 4,
                _ => 3,
            },
            CliError::Svg(SvgError::Empty) => 4,
            CliError::Io { .. } | CliError::Csv(_) | CliError::Svg(_) => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write_manifest(m: &RunManifest, dir: &Path) -> Result<()> {
    m.write(dir).map_err(io_err(dir))
}

pub fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Simulate(a) => simulate_cmd(a, seed),
        Command::Equilibrium(a) => equilibrium_cmd(a, seed),
        Command::Turing(a) => turing_cmd(a, seed),
        Command::Scan(a) => scan_cmd(a, seed),
        Command::Converge(a) => converge_cmd(a, seed),
        Command::CompareRegions(a) => compare_cmd(a, seed),
        Command::Render(a) => render_cmd(a),
    }
}

fn require_variant(cfg: &RunConfig, holling: bool, what: &str) -> Result<()> {
    let ok = (cfg.model.xi == 0.0) == holling;
    if ok {
        return Ok(());
    }
    let need = if holling { "xi = 0" } else { "xi > 0" };
    Err(ConfigError::Invalid {
        key: "model.xi".into(),
        message: format!("{what} needs {need}, found {}", cfg.model.xi),
    }
    .into())
}

fn simulate_cmd(a: SimulateArgs, seed: u64) -> Result<()> {
    let mut cfg = load_config(&a.config)?;
    let (micro, holling, name) = match a.system {
        SimSystem::MicroHolling => (true, true, "micro-holling"),
        SimSystem::MicroBda => (true, false, "micro-bda"),
        SimSystem::LimitHolling => (false, true, "limit-holling"),
        SimSystem::LimitBda => (false, false, "limit-bda"),
    };
    require_variant(&cfg, holling, name)?;
    if let Some(e) = a.epsilon {
        cfg.model = cfg.model.with("epsilon", e)?;
    }
    if micro {
        cfg.epsilon()?;
    }
    if let Some(g) = &a.grid {
        cfg.grid.n = g[0];
        cfg.grid.ny = g.get(1).copied();
    }
    if let Some(l) = &a.length {
        cfg.grid.length = l[0];
        cfg.grid.ly = l.get(1).copied();
    }
    if let Some(t) = a.tend {
        cfg.solver.t_end = t;
    }
    if a.snapshots.is_some() {
        cfg.solver.snapshot_stride = a.snapshots;
    }
    let grid = cfg.grid.build()?;
    cfg.solver
        .validate()
        .map_err(|e| ConfigError::Invalid { key: "solver".into(), message: e.to_string() })?;
    let limit0 = cfg.initial.build(&cfg.model, &grid, seed)?;
    let (initial, system) = if micro {
        let m = micro_from_limit(&limit0, &cfg.model, cfg.initial.split);
        (SimState::Micro(m), System::Micro(cfg.model))
    } else {
        (SimState::Limit(limit0), System::Limit(LimitKinetics::dimensional(&cfg.model)))
    };
    let sim = simulate(&initial, &system, &grid, &cfg.solver)?;

    out_dir(&a.out)?;
    let series_path = a.out.join("series.csv");
    csvio::write_series(create(&series_path)?, &csvio::series_rows(&sim.series))?;
    for snap in &sim.series.snapshots {
        let path = a.out.join(format!("snap_{}.csv", snap.index));
        csvio::write_snapshot(create(&path)?, &grid, &sim.series.fields, &snap.fields)?;
    }
    let manifest = RunManifest::new("simulate", &cfg, seed)
        .option("system", name)
        .option("dt", sim.time_grid.dt)
        .option("steps", sim.time_grid.steps);
    write_manifest(&manifest, &a.out)?;

    println!("{name}: {} steps of dt = {}, {} samples", sim.time_grid.steps, fmt(sim.time_grid.dt), sim.series.times.len());
    if let Some(last) = sim.series.norms.last() {
        for (f, n) in sim.series.fields.iter().zip(last) {
            println!("  t = {}  {f:>3}  L1 {}  L2 {}  Linf {}", fmt(sim.final_state.t()), fmt(n.l1), fmt(n.l2), fmt(n.linf));
        }
    }
    if let Some((l2, l1)) = sim.residual_integrals {
        println!("  integrated exchange residual: L2^2 {}  L1 {}", fmt(l2), fmt(l1));
    }
    Ok(())
}

fn equilibrium_cmd(a: AnalysisArgs, seed: u64) -> Result<()> {
    let cfg = load_config(&a.config)?;
    let (reports, units) = if cfg.model.xi == 0.0 {
        (classify_holling(&cfg.model)?, "dimensional Holling limit")
    } else {
        let (nd, _) = nondimensionalize(&cfg.model)?;
        (classify_equilibria(&nd), "dimensionless interference limit")
    };
    let rows: Vec<EquilibriumRow> = reports.iter().map(EquilibriumRow::from).collect();
    println!("# equilibria of the {units}");
    for r in &rows {
        println!(
            "# {}: (N, P) = ({}, {}), trace {}, det {}, {}",
            r.kind, r.n, r.p, r.trace, r.det, r.classification
        );
    }
    csvio::write_equilibria(std::io::stdout().lock(), &rows)?;
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        csvio::write_equilibria(create(&dir.join("equilibria.csv"))?, &rows)?;
        write_manifest(&RunManifest::new("equilibrium", &cfg, seed), dir)?;
    }
    Ok(())
}

/// Linear analysis at E* shared by `turing` and `compare-regions`.
struct Analysis {
    units: &'static str,
    jacobian: Jacobian2,
    estar: (f64, f64),
    variants: Vec<(&'static str, Linearization)>,
    cmp: RegionComparison,
}

fn analyse(cfg: &RunConfig) -> Result<Analysis> {
    cfg.require_comparison()?;
    if cfg.model.xi == 0.0 {
        let (lin, cross, cl) = holling_linearizations(&cfg.model)?;
        let e = predprey_core::coexistence_dimensional(&cfg.model)?;
        let d2 = Linearization { jd21: 0.0, jd22: cfg.model.d2, ..lin };
        return Ok(Analysis {
            units: "dimensional Holling limit",
            jacobian: lin.jacobian,
            estar: (e.n, e.p),
            variants: vec![("linear-d2", d2), ("linear-f", lin), ("cross", cross)],
            cmp: classify_pair(&lin, &cross, cl)?,
        });
    }
    let (nd, _) = nondimensionalize(&cfg.model)?;
    let cmp = compare_regions(&nd)?;
    let cl = cross_linearization(&nd)?;
    let e = predprey_core::equilibria::coexistence_equilibrium(&nd)?;
    let lin = |v| DiffusionModel::from_nondim(v, &nd).linearization(cmp.jacobian, &cl);
    Ok(Analysis {
        units: "dimensionless interference limit",
        jacobian: cmp.jacobian,
        estar: e_pair(e),
        variants: vec![
            ("linear-d2", lin(DiffusionVariant::LinearD2)),
            ("linear-dp", lin(DiffusionVariant::LinearDP)),
            ("cross", lin(DiffusionVariant::Cross)),
        ],
        cmp,
    })
}

fn e_pair(e: predprey_core::Equilibrium) -> (f64, f64) {
    (e.n, e.p)
}

fn ends(i: Option<Interval>) -> (f64, f64) {
    i.map_or((f64::NAN, f64::NAN), |i| (i.lo, i.hi))
}

fn print_header(an: &Analysis) {
    let j = an.jacobian;
    println!("{}", an.units);
    println!("E* = ({}, {})", fmt(an.estar.0), fmt(an.estar.1));
    println!("J* = [[{}, {}], [{}, {}]]", fmt(j.j11), fmt(j.j12), fmt(j.j21), fmt(j.j22));
    println!("trace {}  det {}", fmt(j.trace()), fmt(j.det()));
    if !(j.trace() < 0.0) {
        println!("note: E* is unstable without diffusion; intervals below are not Turing regions");
    }
}

fn turing_cmd(a: TuringArgs, seed: u64) -> Result<()> {
    let cfg = load_config(&a.config)?;
    let an = analyse(&cfg)?;
    print_header(&an);
    let lambda_max = an
        .variants
        .iter()
        .filter_map(|(_, l)| l.turing_interval().map(|i| i.hi))
        .fold(an.jacobian.j11.abs() / cfg.model.d1, f64::max)
        .max(1.0)
        * 4.0;
    let mut table = Vec::new();
    for (name, lin) in &an.variants {
        let d = lin.dispersion();
        let interval = lin.turing_interval();
        let (lam, growth) = lin.fastest_growth(lambda_max);
        let (lo, hi) = ends(interval);
        println!("{name}: det M = {} l^2 - ({}) l + {}", fmt(d.a), fmt(d.b), fmt(d.c));
        println!("  unstable interval ({}, {}), fastest growth {} at lambda {}", fmt(lo), fmt(hi), fmt(growth), fmt(lam));
        if let (Some(len), Some(i)) = (a.length, interval) {
            let k_max = (i.hi.sqrt() * len / std::f64::consts::PI).ceil() as usize + 1;
            println!("  unstable modes on [0, {len}]: {:?}", unstable_modes_1d(&i, len, k_max));
        }
        table.push((name, d, lo, hi, lam, growth));
    }
    println!("case: {}", an.cmp.case.name());
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        let mut w = csv::Writer::from_writer(create(&dir.join("turing.csv"))?);
        w.write_record(["variant", "a", "b", "c", "lo", "hi", "lambda_fastest", "growth_fastest"])?;
        for (name, d, lo, hi, lam, g) in &table {
            w.write_record([name.to_string(), fmt(d.a), fmt(d.b), fmt(d.c), fmt(*lo), fmt(*hi), fmt(*lam), fmt(*g)])?;
        }
        w.flush().map_err(io_err(dir))?;
        let mut w = csv::Writer::from_writer(create(&dir.join("dispersion.csv"))?);
        let mut header = vec!["lambda".to_string()];
        for (name, _) in &an.variants {
            header.push(format!("det_{name}"));
            header.push(format!("growth_{name}"));
        }
        w.write_record(&header)?;
        for k in 0..=200 {
            let lambda = lambda_max * k as f64 / 200.0;
            let mut rec = vec![fmt(lambda)];
            for (_, lin) in &an.variants {
                rec.push(fmt(lin.det_m(lambda)));
                rec.push(fmt(lin.growth_rate(lambda)));
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(io_err(dir))?;
        let m = RunManifest::new("turing", &cfg, seed).option("length", a.length);
        write_manifest(&m, dir)?;
    }
    Ok(())
}

fn compare_cmd(a: AnalysisArgs, seed: u64) -> Result<()> {
    let cfg = load_config(&a.config)?;
    let an = analyse(&cfg)?;
    print_header(&an);
    let c = &an.cmp;
    println!("A_L {}  A_C {}", fmt(c.al), fmt(c.ac));
    println!("B_L {}  B_C {}", fmt(c.bl), fmt(c.bc));
    println!("JD21 {}  JD22 {}  D_P {}", fmt(c.cl.jd21), fmt(c.cl.jd22), fmt(c.cl.dp));
    let (llo, lhi) = ends(c.linear);
    let (clo, chi) = ends(c.cross);
    println!("linear interval ({}, {})", fmt(llo), fmt(lhi));
    println!("cross interval  ({}, {})", fmt(clo), fmt(chi));
    println!("case: {}", c.case.name());
    let d1 = an.variants[0].1.d1;
    let boundary = boundary_curves(&an.jacobian, d1, &[]);
    let curves = match &boundary {
        Boundary::NoRegion => {
            println!("J11 <= 0: no constant rate destabilizes E*");
            None
        }
        Boundary::Region(b) => {
            println!("D-hat {}  D-hat1 {}  D-hat2 {}", fmt(b.dhat), fmt(b.dhat1), fmt(b.dhat2));
            let ds: Vec<f64> = (1..=64).map(|k| b.dhat2 * 100f64.powf(k as f64 / 64.0)).collect();
            Some((b.dhat2, boundary_curves(&an.jacobian, d1, &ds)))
        }
    };
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        let mut w = csv::Writer::from_writer(create(&dir.join("comparison.csv"))?);
        w.write_record([
            "al", "ac", "bl", "bc", "det", "jd21", "jd22", "dp", "lin_lo", "lin_hi", "cross_lo", "cross_hi", "case",
        ])?;
        let mut rec: Vec<String> = [c.al, c.ac, c.bl, c.bc, c.det, c.cl.jd21, c.cl.jd22, c.cl.dp, llo, lhi, clo, chi]
            .into_iter()
            .map(fmt)
            .collect();
        rec.push(c.case.name().to_string());
        w.write_record(&rec)?;
        w.flush().map_err(io_err(dir))?;
        if let Some((_, Boundary::Region(b))) = &curves {
            let mut w = csv::Writer::from_writer(create(&dir.join("boundary.csv"))?);
            w.write_record(["D", "lower", "upper"])?;
            for s in &b.samples {
                w.write_record([fmt(s.d), fmt(s.lower), fmt(s.upper)])?;
            }
            w.flush().map_err(io_err(dir))?;
        }
        write_manifest(&RunManifest::new("compare-regions", &cfg, seed), dir)?;
    }
    Ok(())
}

/// `name=lo:hi:count[:log]`.
pub fn parse_axis(spec: &str) -> Result<ScanAxis> {
    let bad = |why: &str| CliError::Usage(format!("axis {spec:?}: {why} (expected name=lo:hi:count[:log])"));
    let (name, range) = spec.split_once('=').ok_or_else(|| bad("missing '='"))?;
    let parts: Vec<&str> = range.split(':').collect();
    let log = match parts.len() {
        3 => false,
        4 if parts[3] == "log" => true,
        _ => return Err(bad("wrong number of fields")),
    };
    let lo: f64 = parts[0].parse().map_err(|_| bad("lo is not a number"))?;
    let hi: f64 = parts[1].parse().map_err(|_| bad("hi is not a number"))?;
    let count: usize = parts[2].parse().map_err(|_| bad("count is not an integer"))?;
    if count == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad("need finite bounds and count >= 1"));
    }
    if log {
        if !(lo > 0.0 && hi > 0.0) {
            return Err(bad("log axes need positive bounds"));
        }
        return Ok(ScanAxis::logspace(name, lo, hi, count));
    }
    Ok(ScanAxis::linspace(name, lo, hi, count))
}

fn scan_cmd(a: ScanArgs, seed: u64) -> Result<()> {
    let cfg = load_config(&a.config)?;
    let (ax1, ax2) = (parse_axis(&a.p1)?, parse_axis(&a.p2)?);
    let base = if cfg.model.xi == 0.0 {
        const NAMES: [&str; 9] = ["r0", "eta", "alpha", "gamma_tilde", "Gamma", "mu", "d1", "d2", "d3"];
        for ax in [&ax1, &ax2] {
            if !NAMES.contains(&ax.name.as_str()) {
                return Err(CliError::Usage(format!("Holling scans vary one of {NAMES:?}, not {:?}", ax.name)));
            }
        }
        ScanBase::Holling(cfg.model)
    } else {
        for ax in [&ax1, &ax2] {
            if !NONDIM_NAMES.contains(&ax.name.as_str()) {
                return Err(CliError::Usage(format!(
                    "interference scans vary one of the dimensionless {NONDIM_NAMES:?}, not {:?}",
                    ax.name
                )));
            }
        }
        ScanBase::Bda(nondimensionalize(&cfg.model)?.0)
    };
    let cells = parameter_scan(&base, &ax1, &ax2);
    let rows: Vec<ScanRow> = cells.iter().map(ScanRow::from).collect();
    out_dir(&a.out)?;
    csvio::write_scan(create(&a.out.join("scan.csv"))?, &rows)?;
    if a.svg {
        let svg = region_map(&rows, &ax1.name, &ax2.name)?;
        let path = a.out.join("scan.svg");
        std::fs::write(&path, svg).map_err(io_err(&path))?;
    }
    let m = RunManifest::new("scan", &cfg, seed)
        .option("p1", &ax1)
        .option("p2", &ax2);
    write_manifest(&m, &a.out)?;
    println!("{} x {} cells over ({}, {})", ax1.values.len(), ax2.values.len(), ax1.name, ax2.name);
    for label in ScanLabel::ALL {
        let n = cells.iter().filter(|c| c.label == label).count();
        if n > 0 {
            println!("  {:<22} {n}", label.name());
        }
    }
    if let Some(c) = cells.iter().find(|c| c.error.is_some()) {
        println!("  first error at ({}, {}): {}", c.p1, c.p2, c.error.as_deref().unwrap_or(""));
    }
    Ok(())
}

fn converge_cmd(a: ConvergeArgs, seed: u64) -> Result<()> {
    let cfg = load_config(&a.config)?;
    let holling = a.system == Variant::Holling;
    require_variant(&cfg, holling, if holling { "holling" } else { "bda" })?;
    let grid = cfg.grid.build()?;
    let setup = SweepSetup {
        params: cfg.model,
        grid,
        initial: cfg.initial.build(&cfg.model, &grid, seed)?,
        split: cfg.initial.split,
        solver: cfg.solver,
    };
    let report = epsilon_sweep(&setup, &a.ladder)?;
    out_dir(&a.out)?;
    csvio::write_convergence(create(&a.out.join("convergence.csv"))?, &csvio::convergence_rows(&report))?;
    csvio::write_slopes(create(&a.out.join("slopes.csv"))?, &csvio::slope_rows(&report))?;
    let m = RunManifest::new("converge", &cfg, seed)
        .option("system", if holling { "holling" } else { "bda" })
        .option("ladder", &a.ladder)
        .option("failure", &report.failure);
    write_manifest(&m, &a.out)?;

    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "epsilon                  residual_l2sq            residual_l1              dist_l2");
    for r in csvio::convergence_rows(&report) {
        let _ = writeln!(out, "{} {} {} {}", fmt(r.epsilon), fmt(r.residual_l2sq), fmt(r.residual_l1), fmt(r.dist_l2));
    }
    let _ = writeln!(out, "fitted slopes in log10 epsilon (+- two standard errors):");
    for s in csvio::slope_rows(&report) {
        let _ = writeln!(out, "  {:<14} {:.4} +- {:.4}", s.metric, s.slope, s.half_width);
    }
    let _ = writeln!(out, "  dist_l2 decreasing along the ladder: {}", report.dist_decreasing());
    ensure_complete(&report)?;
    Ok(())
}

fn render_cmd(a: RenderArgs) -> Result<()> {
    let file = File::open(&a.scan).map_err(io_err(&a.scan))?;
    let rows = csvio::read_scan(std::io::BufReader::new(file))?;
    let svg = region_map(&rows, &a.x_name, &a.y_name)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        out_dir(parent)?;
    }
    std::fs::write(&a.out, svg).map_err(io_err(&a.out))
}
