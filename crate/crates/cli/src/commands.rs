use std::f64::consts::PI;

use serde_json::{json, Value};

use rotating_trap::bifurcation::critical_omega;
use rotating_trap::large_omega;
use rotating_trap::monte_carlo::*;
use rotating_trap::optimizer::{branch_exchanges, MassModel, Regime};
use rotating_trap::reference::{circle_exact, interval_exact, TrapConfig};
use rotating_trap::series::{SeriesField, SeriesTruncation};
use rotating_trap::transition::{geometric_grid, FluxTable, InnerSolverParams};

use crate::error::CliError;
use crate::output::{col, Column, Payload, Report};
use crate::resolve::Resolver;
use crate::{Command, Simulate, TrapArgs, WalkArgs};

pub fn execute(cmd: &Command, res: &mut Resolver) -> Result<Report, CliError> {
    let (name, payload) = match cmd {
        Command::Simulate(Simulate::Interval(a)) => ("simulate interval", interval(a, res)?),
        Command::Simulate(Simulate::Circle(a)) => ("simulate circle", circle(a, res)?),
        Command::Simulate(Simulate::Disk(a)) => ("simulate disk", disk(a, res)?),
        Command::Field(a) => ("field", field(a, res)?),
        Command::MassCurve(a) => ("mass-curve", mass_curve(a, res)?),
        Command::Optimum(a) => ("optimum", optimum(a, res)?),
        Command::Bifurcation(a) => ("bifurcation", bifurcation(a, res)?),
        Command::U0Table(a) => ("u0-table", u0_table(a, res)?),
        Command::SpeedCurve(a) => ("speed-curve", speed_curve(a, res)?),
    };
    let params = res.echo_pairs().into_iter().filter(|(k, _)| k != "threads").collect();
    Ok(Report {
        command: name.to_string(),
        params,
        payload,
    })
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {v}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<usize, CliError> {
    if v >= min {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{name} must be at least {min}, got {v}")))
    }
}

fn walk_params(a: &WalkArgs, res: &mut Resolver, step: f64, d_default: f64, dim: u32) -> Result<WalkParams, CliError> {
    let agents = at_least("agents", res.get("agents", a.agents, 1000)?, 1)?;
    let seed = res.get("seed", a.seed, 1u64)?;
    let max_steps = res.get("max-steps", a.max_steps, 100_000_000u64)?;
    let d = positive("d", res.get("d", a.d, d_default)?)?;
    let p = if dim == 1 {
        WalkParams::for_diffusivity_1d(step, d, agents, seed)
    } else {
        WalkParams::for_diffusivity_2d(step, d, agents, seed)
    };
    let p = WalkParams { max_steps, ..p };
    p.validate()?;
    Ok(p)
}

fn stats_columns(first: Column) -> Vec<Column> {
    vec![
        first,
        col("mean_fpt", "time"),
        col("std_error", "time"),
        col("n_captured", "count"),
        col("n_censored", "count"),
        col("exact", "time"),
    ]
}

fn stats_row(pos: f64, s: &WalkStats, exact: f64) -> Vec<Value> {
    vec![
        json!(pos),
        json!(s.mean_fpt),
        json!(s.std_error),
        json!(s.n_captured),
        json!(s.n_censored),
        json!(exact),
    ]
}

fn stats_scalar(pos: Column, at: f64, s: &WalkStats, exact: f64) -> Payload {
    let cols = stats_columns(pos);
    Payload::Scalar(cols.into_iter().zip(stats_row(at, s, exact)).collect())
}

fn warn_censored(s: &WalkStats) {
    if s.n_censored > 0 {
        log::warn!("{} walkers censored; raise --max-steps", s.n_censored);
    }
}

fn interval(a: &crate::IntervalArgs, res: &mut Resolver) -> Result<Payload, CliError> {
    let dx = positive("dx", res.get("dx", a.dx, 2f64.sqrt() / 100.0)?)?;
    let trap = res.get("trap", a.trap, 0.5)?;
    let x = res.get_opt("x", a.x)?;
    let points = if x.is_none() { at_least("points", res.get("points", a.points, 21)?, 2)? } else { 1 };
    let p = walk_params(&a.walk, res, dx, 1.0, 1)?;
    let d = p.diffusivity_1d();
    if let Some(x) = x {
        let s = mfpt_interval(x, trap, &p)?;
        warn_censored(&s);
        return Ok(stats_scalar(col("x", "length"), x, &s, interval_exact(x, trap, d)));
    }
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let x = k as f64 / (points - 1) as f64;
        // distinct streams per start point
        let s = mfpt_interval(x, trap, &WalkParams { seed: p.seed.wrapping_add(k as u64), ..p })?;
        warn_censored(&s);
        rows.push(stats_row(x, &s, interval_exact(x, trap, d)));
    }
    Ok(Payload::Table { columns: stats_columns(col("x", "length")), rows })
}

fn circle(a: &crate::CircleArgs, res: &mut Resolver) -> Result<Payload, CliError> {
    let dth = positive("dtheta", res.get("dtheta", a.dtheta, 0.01)?)?;
    let omega = res.get("omega", a.omega, 2.0)?;
    let theta = res.get_opt("theta", a.theta)?;
    let points = if theta.is_none() { at_least("points", res.get("points", a.points, 8)?, 1)? } else { 1 };
    let p = walk_params(&a.walk, res, dth, 0.5, 1)?;
    let d = p.diffusivity_1d();
    if let Some(th) = theta {
        let s = mfpt_circle(th, omega, &p)?;
        warn_censored(&s);
        return Ok(stats_scalar(col("theta", "rad"), th, &s, circle_exact(th.rem_euclid(2.0 * PI), omega, d)));
    }
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let th = (2 * k + 1) as f64 * PI / points as f64;
        let s = mfpt_circle(th, omega, &WalkParams { seed: p.seed.wrapping_add(k as u64), ..p })?;
        warn_censored(&s);
        rows.push(stats_row(th, &s, circle_exact(th, omega, d)));
    }
    Ok(Payload::Table { columns: stats_columns(col("theta", "rad")), rows })
}

fn trap_config(t: &TrapArgs, res: &mut Resolver, defaults: (f64, f64, f64)) -> Result<TrapConfig, CliError> {
    let r0 = res.get("r0", t.r0, defaults.0)?;
    let eps = res.get("eps", t.eps, defaults.1)?;
    let omega = res.get("omega", t.omega, defaults.2)?;
    Ok(TrapConfig::new(r0, eps, omega)?)
}

fn disk(a: &crate::DiskArgs, res: &mut Resolver) -> Result<Payload, CliError> {
    let cfg = trap_config(&a.trap, res, (0.6, 0.1, 200.0))?;
    let dl = positive("dl", res.get("dl", a.dl, 0.01)?)?;
    let x = res.get_opt("x", a.x)?;
    let y = res.get_opt("y", a.y)?;
    let start = match (x, y) {
        (Some(x), Some(y)) => Some([x, y]),
        (None, None) => None,
        _ => return Err(CliError::Usage("--x and --y must be given together".into())),
    };
    let grid = if start.is_none() { at_least("grid", res.get("grid", a.grid, 12)?, 1)? } else { 0 };
    let p = walk_params(&a.walk, res, dl, 1.0, 2)?;
    let columns = vec![
        col("x", "length"),
        col("y", "length"),
        col("mean_fpt", "time"),
        col("std_error", "time"),
        col("n_captured", "count"),
    ];
    let row = |s: &FieldSample| {
        warn_censored(&s.stats);
        vec![
            json!(s.x),
            json!(s.y),
            json!(s.stats.mean_fpt),
            json!(s.stats.std_error),
            json!(s.stats.n_captured),
        ]
    };
    if let Some(pt) = start {
        let s = FieldSample { x: pt[0], y: pt[1], stats: mfpt_disk(pt, &cfg, &p)? };
        let mut cells: Vec<(Column, Value)> = columns.into_iter().zip(row(&s)).collect();
        cells.push((col("n_censored", "count"), json!(s.stats.n_censored)));
        return Ok(Payload::Scalar(cells));
    }
    let scan = disk_field_scan(&square_grid_in_disk(grid), &cfg, &p)?;
    Ok(Payload::Table { columns, rows: scan.iter().map(row).collect() })
}

fn field(a: &crate::FieldArgs, res: &mut Resolver) -> Result<Payload, CliError> {
    let cfg = trap_config(&a.trap, res, (0.6, 0.05, 10.0))?;
    let method = res.get("method", a.method.clone(), "series".to_string())?;
    let nr = at_least("nr", res.get("nr", a.nr, 21)?, 2)?;
    let nt = at_least("ntheta", res.get("ntheta", a.ntheta, 36)?, 1)?;
    let radii: Vec<f64> = (0..nr).map(|i| i as f64 / (nr - 1) as f64).collect();
    let thetas: Vec<f64> = (0..nt).map(|j| 2.0 * PI * j as f64 / nt as f64).collect();
    let values: Vec<Vec<Option<f64>>> = match method.as_str() {
        "series" => SeriesField::new(&cfg, &SeriesTruncation::default())?.u_polar_grid(&radii, &thetas)?,
        "large-omega" => {
            let mut out = Vec::with_capacity(nr);
            for &r in &radii {
                let mut row = Vec::with_capacity(nt);
                for &th in &thetas {
                    let dist = (r * th.cos() - cfg.r0).hypot(r * th.sin());
                    row.push(if dist < cfg.eps { None } else { Some(large_omega::field_u(r, th, &cfg)?) });
                }
                out.push(row);
            }
            out
        }
        other => return Err(CliError::Usage(format!("unknown method `{other}` (series, large-omega)"))),
    };
    let mut rows = Vec::with_capacity(nr * nt);
    for (i, r) in radii.iter().enumerate() {
        for (j, th) in thetas.iter().enumerate() {
            rows.push(vec![json!(r), json!(th), json!(values[i][j].unwrap_or(f64::NAN))]);
        }
    }
    Ok(Payload::Table {
        columns: vec![col("r", "length"), col("theta", "rad"), col("u", "time")],
        rows,
    })
}

fn largest_radius(eps: f64) -> f64 {
    1.0 - (2.0 * eps).max(1e-3)
}

fn grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if !(lo < hi) {
        return Err(CliError::Usage(format!("empty range [{lo}, {hi}]")));
    }
    let n = at_least("points", n, 2)?;
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn mass_curve(a: &crate::MassCurveArgs, res: &mut Resolver) -> Result<Payload, CliError> {
    let omega = res.get("omega", a.omega, 10.0)?;
    let eps = positive("eps", res.get("eps", a.eps, 1e-3)?)?;
    let model = MassModel::with_defaults()?;
    let window = model.window(omega, eps)?;
    // the fast-regime mass has a logarithmic singularity at the centre
    let lo_default = if window == Regime::Fast { 1e-3 } else { 0.0 };
    let lo = res.get("r0-min", a.r0_min, lo_default)?;
    let hi = res.get("r0-max", a.r0_max, largest_radius(eps))?;
    let n = res.get("points", a.points, 101)?;
    let curve = model.mass_curve(&grid(lo, hi, n)?, omega, eps)?;
    for (r, m) in &curve.local_minima {
        log::info!("local minimum near r0 = {r}, mass {m}");
    }
    let rows = curve
        .r0_samples
        .iter()
        .zip(&curve.mass_values)
        .zip(&curve.point_regimes)
        .map(|((r, m), g)| vec![json!(r), json!(m), json!(g.to_string())])
        .collect();
    Ok(Payload::Table {
        columns: vec![col("r0", "length"), col("mass", "time*area"), col("regime", "-")],
        rows,
    })
}

fn optimum(a: &crate::OptimumArgs, res: &mut Resolver) -> Result<Payload, CliError> {
    let omega = res.get("omega", a.omega, 10.0)?;
    let eps = positive("eps", res.get("eps", a.eps, 1e-3)?)?;
    let o = MassModel::with_defaults()?.optimal_radius(omega, eps)?;
    Ok(Payload::Scalar(vec![
        (col("omega", "1/time"), json!(o.omega)),
        (col("eps", "length"), json!(o.eps)),
        (col("r0_opt", "length"), json!(o.r0_opt)),
        (col("mass_at_opt", "time*area"), json!(o.mass_at_opt)),
        (col("regime", "-"), json!(o.regime_tag.to_string())),
        (col("competing_minima", "[length, time*area]"), json!(o.competing_minima)),
    ]))
}

fn bifurcation(a: &crate::BifurcationArgs, res: &mut Resolver) -> Result<Payload, CliError> {
    let (lo, hi) = res.get_pair("bracket", a.bracket.clone(), (2.0, 4.0))?;
    let tol = positive("tol", res.get("tol", a.tol, 1e-6)?)?;
    if !(lo > 0.0 && lo < hi) {
        return Err(CliError::Usage(format!("bracket must satisfy 0 < lo < hi, got {lo} {hi}")));
    }
    let c = critical_omega((lo, hi), tol)?;
    Ok(Payload::Scalar(vec![
        (col("omega_c", "1/time"), json!(c.omega_c)),
        (col("bracket", "1/time"), json!([c.bracket.0, c.bracket.1])),
        (col("tol", "1/time"), json!(c.tol)),
    ]))
}

fn u0_table(a: &crate::U0Args, res: &mut Resolver) -> Result<Payload, CliError> {
    let defaults = InnerSolverParams::default();
    let nodes = res.get("nodes", a.nodes, defaults.n_nodes)?;
    let lo = positive("s0-min", res.get("s0-min", a.s0_min, 0.05)?)?;
    let hi = positive("s0-max", res.get("s0-max", a.s0_max, 60.0)?)?;
    let count = at_least("s0-count", res.get("s0-count", a.s0_count, 49)?, 5)?;
    if !(lo < hi) {
        return Err(CliError::Usage(format!("need s0-min < s0-max, got {lo} {hi}")));
    }
    let params = InnerSolverParams {
        n_nodes: nodes,
        s0_grid: geometric_grid(lo, hi, count),
        ..defaults
    };
    params.validate()?;
    let t = FluxTable::build(&params)?;
    let rows = (0..t.s0.len())
        .map(|i| vec![json!(t.s0[i]), json!(t.u0[i]), json!(t.u0_prime[i])])
        .collect();
    Ok(Payload::Table {
        columns: vec![col("s0", "1"), col("u0", "1"), col("u0_prime", "1")],
        rows,
    })
}

fn speed_curve(a: &crate::SpeedArgs, res: &mut Resolver) -> Result<Payload, CliError> {
    let eps = positive("eps", res.get("eps", a.eps, 1e-3)?)?;
    let lo = positive("s-min", res.get("s-min", a.s_min, 1.0)?)?;
    let hi = res.get("s-max", a.s_max, 60.0)?;
    let n = res.get("points", a.points, 60)?;
    let speeds = grid(lo, hi, n)?;
    let results = MassModel::with_defaults()?.optimal_radius_vs_speed(&speeds, eps)?;
    for (x0, x1) in branch_exchanges(&speeds, &results, 0.05) {
        log::info!("optimal radius jumps between s = {x0} and s = {x1}");
    }
    let rows = speeds
        .iter()
        .zip(&results)
        .map(|(s, o)| {
            vec![
                json!(s),
                json!(o.r0_opt),
                json!(o.omega),
                json!(o.mass_at_opt),
                json!(o.regime_tag.to_string()),
            ]
        })
        .collect();
    Ok(Payload::Table {
        columns: vec![
            col("speed", "length/time"),
            col("r0_opt", "length"),
            col("omega", "1/time"),
            col("mass", "time*area"),
            col("regime", "-"),
        ],
        rows,
    })
}
