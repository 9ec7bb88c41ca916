use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use sublorentz::causal::{classify, lorentz_norm2};
use sublorentz::export::{path_rows, write_json, write_path_csv, write_rows, HEIS_PATH_HEADER};
use sublorentz::heisenberg::{self, classify_target, connect, mu, shoot, solve_mu, HeisIvp, TargetClass};
use sublorentz::integrator::{conservation_report, integrate, CovectorState, GeodesicPath, IntegrationConfig, Method};
use sublorentz::quaternion::{
    appendix_suite, closed_form, norm_identity_x, norm_identity_z_corrected, random_ivp, solve, z_discrepancy_sweep,
    IdentityReport, QuatIvp, ZDiscrepancyLog, IDENTITY_TOL, NORM_X_TOL,
};
use sublorentz::reachable::{
    control_sample, eta, geodesic_sample, in_closure, in_region, verify_inclusion, CurveKind, EtaParams,
    InclusionReport, RegionId, SampledCurve, Slice,
};
use sublorentz::{GroupId, GroupPoint, HorizontalVector, Orientation};

use crate::args::*;

/// Successful run, or a verification suite that found failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

pub type CmdResult = Result<Status, String>;

/// Resolved global options.
pub struct Ctx<'a> {
    pub output: Option<&'a Path>,
    pub format: Option<Format>,
    pub seed: u64,
}

impl Ctx<'_> {
    fn emit(&self, bytes: Vec<u8>) -> Result<(), String> {
        match self.output {
            Some(p) => fs::write(p, bytes).map_err(|e| format!("cannot write {}: {e}", p.display())),
            None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string()),
        }
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> Result<(), String> {
        let mut buf = Vec::new();
        write_json(&mut buf, value).map_err(|e| e.to_string())?;
        self.emit(buf)
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn point(group: Group, c: &[f64]) -> Result<GroupPoint, String> {
    GroupPoint::from_slice(group_id(group), c).map_err(err)
}

fn group_id(g: Group) -> GroupId {
    match g {
        Group::Heis => GroupId::HeisenbergL,
        Group::Quat => GroupId::QuaternionH,
    }
}

pub fn run(cmd: &Command, ctx: &Ctx) -> CmdResult {
    match cmd {
        Command::Classify(a) => cmd_classify(a, ctx),
        Command::Geodesic(GeodesicCommand::Shoot(a)) => cmd_shoot(a, ctx),
        Command::Geodesic(GeodesicCommand::Connect(a)) => cmd_connect(a, ctx),
        Command::Verify(v) => cmd_verify(v, ctx),
        Command::Plotdata(p) => cmd_plotdata(p, ctx),
        Command::ReachableSample(a) => cmd_reachable_sample(a, ctx),
        Command::Run { .. } => Err("job files cannot run other job files".into()),
    }
}

fn target_label(c: TargetClass) -> String {
    match c {
        TargetClass::TimelikeConnectable(Orientation::FutureDirected) => "TimelikeConnectable(future)".into(),
        TargetClass::TimelikeConnectable(Orientation::PastDirected) => "TimelikeConnectable(past)".into(),
        other => format!("{other:?}"),
    }
}

#[derive(Serialize)]
struct VectorClassification {
    group: Group,
    vector: Vec<f64>,
    at: Vec<f64>,
    q: f64,
    kind: sublorentz::CausalKind,
    orientation: Orientation,
    class: String,
}

#[derive(Serialize)]
struct TargetClassification {
    group: Group,
    target: Vec<f64>,
    class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta0: Option<f64>,
}

fn cmd_classify(a: &ClassifyArgs, ctx: &Ctx) -> CmdResult {
    let gid = group_id(a.group);
    if let Some(v) = &a.vector {
        let base = match &a.at {
            Some(c) => point(a.group, c)?,
            None => GroupPoint::identity(gid),
        };
        let hv = HorizontalVector::new(base, v).map_err(err)?;
        let c = classify(&hv);
        ctx.emit_json(&VectorClassification {
            group: a.group,
            vector: v.clone(),
            at: base.as_slice().to_vec(),
            q: lorentz_norm2(v),
            kind: c.kind,
            orientation: c.orientation,
            class: c.to_string(),
        })?;
        return Ok(Status::Ok);
    }
    let t = a.target.as_ref().ok_or("classify needs --vector or --target")?;
    let p = point(a.group, t)?;
    let out = match a.group {
        Group::Heis => TargetClassification {
            group: a.group,
            target: t.clone(),
            class: target_label(classify_target(&p).map_err(err)?),
            eta0: None,
        },
        Group::Quat => {
            let g0 = RegionId::Gamma(EtaParams::new(0.0).map_err(err)?);
            let class = if in_region(&g0, &p).map_err(err)? {
                "InGamma0"
            } else if in_closure(&g0, &p, 0.0).map_err(err)? {
                "OnGamma0Boundary"
            } else {
                "OutsideGamma0"
            };
            TargetClassification {
                group: a.group,
                target: t.clone(),
                class: class.into(),
                eta0: Some(eta(0.0, &p).map_err(err)?),
            }
        }
    };
    ctx.emit_json(&out)?;
    Ok(Status::Ok)
}

fn emit_path(path: &GeodesicPath, ctx: &Ctx) -> Result<(), String> {
    match ctx.format_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_path_csv(&mut buf, path).map_err(err)?;
            ctx.emit(buf)
        }
        Format::Json => ctx.emit_json(path),
    }
}

fn load_config(path: Option<&Path>) -> Result<IntegrationConfig, String> {
    match path {
        None => Ok(IntegrationConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", p.display()))
        }
    }
}

fn cmd_shoot(a: &ShootArgs, ctx: &Ctx) -> CmdResult {
    let gid = group_id(a.group);
    let (h, c) = (gid.horizontal_dim(), gid.center_dim());
    if a.v0.len() != h || a.theta.len() != c {
        return Err(format!("{gid:?} needs {h} values for --v0 and {c} for --theta"));
    }
    let path = match a.integrator {
        Integrator::Closed => match a.group {
            Group::Heis => heisenberg::sample_path(&HeisIvp::new([a.v0[0], a.v0[1]], a.theta[0]), a.t1, a.samples),
            Group::Quat => {
                let ivp = QuatIvp::new(a.v0[..].try_into().unwrap(), a.theta[..].try_into().unwrap());
                solve(&ivp).sample_path(a.t1, a.samples)
            }
        }
        .map_err(err)?,
        Integrator::Rk4 | Integrator::Rk45 => {
            let base = load_config(a.config.as_deref())?;
            let cfg = IntegrationConfig {
                method: if a.integrator == Integrator::Rk4 { Method::Rk4 } else { Method::Rk45 },
                t0: 0.0,
                t1: a.t1,
                samples: a.samples,
                steps: if a.config.is_some() { base.steps } else { (1000.0 * a.t1).ceil().max(1.0) as usize },
                ..base
            };
            let init = CovectorState::from_velocity(gid, &a.v0, &a.theta).map_err(err)?;
            integrate(&init, &cfg).map_err(err)?
        }
    };
    emit_path(&path, ctx)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct ConnectionOut<'a> {
    target: Vec<f64>,
    class: String,
    theta: f64,
    v0: [f64; 2],
    length: f64,
    endpoint_error: f64,
    path: &'a GeodesicPath,
}

fn cmd_connect(a: &ConnectArgs, ctx: &Ctx) -> CmdResult {
    let target = point(Group::Heis, &a.target)?;
    let conn = connect(&target).map_err(err)?;
    let path = conn.path(a.samples).map_err(err)?;
    match ctx.format_or(Format::Csv) {
        Format::Csv => emit_path(&path, ctx)?,
        Format::Json => ctx.emit_json(&ConnectionOut {
            target: a.target.clone(),
            class: target_label(conn.class),
            theta: conn.theta(),
            v0: conn.ivp.v0,
            length: conn.length(),
            endpoint_error: conn.endpoint_error(),
            path: &path,
        })?,
    }
    Ok(Status::Ok)
}

fn stream_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index as u64);
    r
}

fn status(passed: bool) -> Status {
    if passed {
        Status::Ok
    } else {
        Status::Failed
    }
}

#[derive(Serialize)]
struct MuReport {
    suite: &'static str,
    seed: u64,
    n: usize,
    max_round_trip: f64,
    round_trip_tol: f64,
    solver_failures: usize,
    tau_max: f64,
    grid: usize,
    strictly_decreasing: bool,
    mu_at_minus_tau_max: f64,
    mu_at_tau_max: f64,
    passed: bool,
}

#[derive(Serialize)]
struct IdentityStat {
    name: String,
    asserted: bool,
    max_relative: f64,
}

#[derive(Serialize)]
struct AppendixReport {
    suite: &'static str,
    seed: u64,
    n: usize,
    tol: f64,
    identities: Vec<IdentityStat>,
    worst: Option<IdentityReport>,
    passed: bool,
}

#[derive(Serialize)]
struct IdentitiesReport {
    suite: &'static str,
    seed: u64,
    n: usize,
    norm_x_max: f64,
    norm_z_corrected_max: f64,
    tol: f64,
    /// Non-fatal apart from the slice check.
    z_discrepancy: ZDiscrepancyLog,
    slice_tol: f64,
    passed: bool,
}

#[derive(Serialize)]
struct InclusionOut {
    suite: &'static str,
    seed: u64,
    sampler: SamplerArg,
    kind: KindArg,
    report: InclusionReport,
    passed: bool,
}

#[derive(Serialize, Default)]
struct GroupCrosscheck {
    max_deviation: f64,
    max_h_drift: f64,
    max_theta_drift: f64,
}

#[derive(Serialize)]
struct CrosscheckReport {
    suite: &'static str,
    seed: u64,
    n: usize,
    steps: usize,
    deviation_tol: f64,
    drift_tol: f64,
    heisenberg: GroupCrosscheck,
    quaternion: GroupCrosscheck,
    passed: bool,
}

fn cmd_verify(v: &VerifyCommand, ctx: &Ctx) -> CmdResult {
    let seed = ctx.seed;
    match v {
        VerifyCommand::Mu(a) => {
            if a.grid < 2 || !(a.tau_max > 0.0) {
                return Err("mu needs --grid >= 2 and --tau-max > 0".into());
            }
            let results: Vec<Option<f64>> = (0..a.n)
                .into_par_iter()
                .map(|i| {
                    let r = stream_rng(seed, i).random_range(-0.999..0.999);
                    solve_mu(r).ok().map(|tau| (mu(tau) - r).abs())
                })
                .collect();
            let failures = results.iter().filter(|r| r.is_none()).count();
            let max_rt = results.iter().flatten().fold(0.0f64, |m, &e| m.max(e));
            let grid: Vec<f64> =
                (0..a.grid).map(|i| -a.tau_max + 2.0 * a.tau_max * i as f64 / (a.grid - 1) as f64).collect();
            let decreasing = grid.windows(2).all(|w| mu(w[1]) < mu(w[0]));
            let passed = failures == 0 && max_rt <= 1e-12 && decreasing;
            ctx.emit_json(&MuReport {
                suite: "mu",
                seed,
                n: a.n,
                max_round_trip: max_rt,
                round_trip_tol: 1e-12,
                solver_failures: failures,
                tau_max: a.tau_max,
                grid: a.grid,
                strictly_decreasing: decreasing,
                mu_at_minus_tau_max: mu(-a.tau_max),
                mu_at_tau_max: mu(a.tau_max),
                passed,
            })?;
            Ok(status(passed))
        }
        VerifyCommand::Appendix(a) => {
            let runs: Vec<Vec<IdentityReport>> = (0..a.n)
                .into_par_iter()
                .map(|i| appendix_suite(&random_ivp(&mut stream_rng(seed, i))).map_err(err))
                .collect::<Result<_, _>>()?;
            let mut stats: Vec<IdentityStat> = Vec::new();
            let mut worst: Option<IdentityReport> = None;
            for reps in runs {
                if stats.is_empty() {
                    stats = reps
                        .iter()
                        .map(|r| IdentityStat { name: r.name.clone(), asserted: r.asserted, max_relative: 0.0 })
                        .collect();
                }
                for (s, r) in stats.iter_mut().zip(reps) {
                    s.max_relative = s.max_relative.max(r.relative);
                    if r.asserted && worst.as_ref().is_none_or(|w| r.relative > w.relative) {
                        worst = Some(r);
                    }
                }
            }
            let passed = stats.iter().filter(|s| s.asserted).all(|s| s.max_relative <= IDENTITY_TOL);
            ctx.emit_json(&AppendixReport {
                suite: "appendix",
                seed,
                n: a.n,
                tol: IDENTITY_TOL,
                identities: stats,
                worst,
                passed,
            })?;
            Ok(status(passed))
        }
        VerifyCommand::Identities(a) => {
            let maxima: Vec<(f64, f64)> = (0..a.n)
                .into_par_iter()
                .map(|i| {
                    let mut r = stream_rng(seed, i);
                    let ivp = random_ivp(&mut r);
                    let t = r.random_range(0.0..1.0);
                    let cf = closed_form(&ivp).map_err(err)?;
                    Ok((norm_identity_x(&cf, t).relative, norm_identity_z_corrected(&cf, t).relative))
                })
                .collect::<Result<_, String>>()?;
            let nx = maxima.iter().fold(0.0f64, |m, p| m.max(p.0));
            let nz = maxima.iter().fold(0.0f64, |m, p| m.max(p.1));
            let log = z_discrepancy_sweep(a.n, seed);
            let passed = nx <= NORM_X_TOL && nz <= NORM_X_TOL && log.slice_vs_heisenberg <= 1e-9;
            ctx.emit_json(&IdentitiesReport {
                suite: "identities",
                seed,
                n: a.n,
                norm_x_max: nx,
                norm_z_corrected_max: nz,
                tol: NORM_X_TOL,
                z_discrepancy: log,
                slice_tol: 1e-9,
                passed,
            })?;
            Ok(status(passed))
        }
        VerifyCommand::Inclusion(a) => {
            let region = match a.region {
                RegionKind::Gamma => RegionId::Gamma(EtaParams::new(a.alpha).map_err(err)?),
                RegionKind::A => RegionId::A(EtaParams::new(a.alpha).map_err(err)?),
                RegionKind::Bslice => {
                    RegionId::BSlice(slice(a.slice.ok_or("the bslice region needs --slice")?))
                }
            };
            let sampler = make_sampler(seed, &a.curves, a.slice.map(slice))?;
            let report = verify_inclusion(sampler, region, a.n).map_err(err)?;
            let passed = report.violations.is_empty();
            ctx.emit_json(&InclusionOut {
                suite: "inclusion",
                seed,
                sampler: a.curves.sampler,
                kind: a.curves.kind,
                report,
                passed,
            })?;
            Ok(status(passed))
        }
        VerifyCommand::Crosscheck(a) => {
            let cfg = IntegrationConfig::default();
            let runs: Vec<(bool, f64, f64, f64)> = (0..2 * a.n)
                .into_par_iter()
                .map(|i| {
                    let mut r = stream_rng(seed, i);
                    let heis = i < a.n;
                    let (init, exact) = if heis {
                        let ivp = HeisIvp::new(
                            [r.random_range(-1.5..1.5), r.random_range(-1.5..1.5)],
                            r.random_range(-2.0..2.0),
                        );
                        let init = CovectorState::from_velocity(GroupId::HeisenbergL, &ivp.v0, &[ivp.theta]);
                        (init, heisenberg::sample_path(&ivp, 1.0, cfg.samples))
                    } else {
                        let ivp = random_ivp(&mut r);
                        (Ok(ivp.covector_state()), solve(&ivp).sample_path(1.0, cfg.samples))
                    };
                    let path = integrate(&init.map_err(err)?, &cfg).map_err(err)?;
                    let dev = path.max_deviation(&exact.map_err(err)?).map_err(err)?;
                    let rep = conservation_report(&path);
                    Ok((heis, dev, rep.h_relative_drift, rep.theta_drift))
                })
                .collect::<Result<_, String>>()?;
            let mut h = GroupCrosscheck::default();
            let mut q = GroupCrosscheck::default();
            for (heis, dev, drift, th) in runs {
                let g = if heis { &mut h } else { &mut q };
                g.max_deviation = g.max_deviation.max(dev);
                g.max_h_drift = g.max_h_drift.max(drift);
                g.max_theta_drift = g.max_theta_drift.max(th);
            }
            let ok = |g: &GroupCrosscheck| g.max_deviation <= 1e-6 && g.max_h_drift <= 1e-8 && g.max_theta_drift == 0.0;
            let passed = ok(&h) && ok(&q);
            ctx.emit_json(&CrosscheckReport {
                suite: "crosscheck",
                seed,
                n: a.n,
                steps: cfg.steps,
                deviation_tol: 1e-6,
                drift_tol: 1e-8,
                heisenberg: h,
                quaternion: q,
                passed,
            })?;
            Ok(status(passed))
        }
    }
}

fn slice(s: SliceArg) -> Slice {
    match s {
        SliceArg::X3x4 => Slice::X3X4,
        SliceArg::X2x3 => Slice::X2X3,
        SliceArg::X2x4 => Slice::X2X4,
    }
}

type Sampler = Box<dyn Fn(usize) -> sublorentz::Result<SampledCurve> + Sync>;

fn make_sampler(seed: u64, c: &CurveArgs, slice: Option<Slice>) -> Result<Sampler, String> {
    if c.curve_samples < 3 {
        return Err("--curve-samples must be at least 3".into());
    }
    let samples = c.curve_samples;
    let kind = match c.kind {
        KindArg::Timelike => CurveKind::Timelike,
        KindArg::Nonspacelike => CurveKind::Nonspacelike,
    };
    Ok(match c.sampler {
        SamplerArg::Controls => Box::new(move |i| control_sample(seed, i, kind, slice, samples)),
        SamplerArg::Geodesics => {
            if slice.is_some() || kind != CurveKind::Timelike {
                return Err("the geodesic sampler draws timelike curves off any slice; use --kind timelike".into());
            }
            Box::new(move |i| geodesic_sample(seed, i, samples))
        }
    })
}

/// Header of `reachable-sample` CSVs.
pub const SAMPLE_HEADER: [&str; 10] = ["index", "x1", "x2", "x3", "x4", "z1", "z2", "z3", "eta0", "in_gamma0"];

#[derive(Serialize)]
struct Endpoint {
    index: usize,
    point: GroupPoint,
    eta0: f64,
    in_gamma0: bool,
}

fn cmd_reachable_sample(a: &SampleArgs, ctx: &Ctx) -> CmdResult {
    let sampler = make_sampler(ctx.seed, &a.curves, a.slice.map(slice))?;
    let g0 = RegionId::Gamma(EtaParams::new(0.0).map_err(err)?);
    let ends: Vec<Endpoint> = (0..a.n)
        .into_par_iter()
        .map(|i| {
            let p = *sampler(i)?.curve.last();
            Ok(Endpoint { index: i, point: p, eta0: eta(0.0, &p)?, in_gamma0: in_region(&g0, &p)? })
        })
        .collect::<sublorentz::Result<_>>()
        .map_err(err)?;
    match ctx.format_or(Format::Csv) {
        Format::Json => ctx.emit_json(&ends)?,
        Format::Csv => {
            let rows = ends.iter().map(|e| {
                let mut r = vec![e.index as f64];
                r.extend_from_slice(e.point.as_slice());
                r.push(e.eta0);
                r.push(e.in_gamma0 as u8 as f64);
                r
            });
            let mut buf = Vec::new();
            write_rows(&mut buf, &SAMPLE_HEADER, rows).map_err(err)?;
            ctx.emit(buf)?;
        }
    }
    Ok(Status::Ok)
}

/// Header of `plotdata mu-curve`.
pub const MU_HEADER: [&str; 2] = ["tau", "mu"];

/// Header of `plotdata reachable-region`; `sheet` is `1` for
/// `z = (x² - y²)/4`, `-1` for `z = -(x² - y²)/4` and `0` for the cone
/// `|y| = x`, `z = 0`.
pub const REGION_HEADER: [&str; 4] = ["x", "y", "z", "sheet"];

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

fn cmd_plotdata(p: &PlotCommand, ctx: &Ctx) -> CmdResult {
    if ctx.format_or(Format::Csv) != Format::Csv {
        return Err("plot data is only written as csv".into());
    }
    let mut buf = Vec::new();
    match p {
        PlotCommand::TimelikeGeodesic(a) => {
            if a.samples < 2 || !(a.t1 > 0.0) {
                return Err("need --samples >= 2 and --t1 > 0".into());
            }
            let ivp = HeisIvp::new([a.v0[0], a.v0[1]], a.theta);
            let path = GeodesicPath::from_samples(
                GroupId::HeisenbergL,
                grid(-a.t1, a.t1, a.samples).map(|t| {
                    let s = shoot(&ivp, t);
                    (t, s.point, s.velocity.to_vec(), vec![ivp.theta])
                }),
            )
            .map_err(err)?;
            write_rows(&mut buf, &HEIS_PATH_HEADER, path_rows(&path)).map_err(err)?;
        }
        PlotCommand::MuCurve(a) => {
            if a.samples < 2 || !(a.tau_max > a.tau_min) {
                return Err("need --samples >= 2 and --tau-max > --tau-min".into());
            }
            write_rows(&mut buf, &MU_HEADER, grid(a.tau_min, a.tau_max, a.samples).map(|t| [t, mu(t)])).map_err(err)?;
        }
        PlotCommand::ReachableRegion(a) => {
            if a.samples < 2 || !(a.x_max > 0.0) {
                return Err("need --samples >= 2 and --x-max > 0".into());
            }
            let mut rows = Vec::new();
            for x in grid(0.0, a.x_max, a.samples).skip(1) {
                for y in grid(-x, x, a.samples) {
                    let z = 0.25 * (x * x - y * y);
                    rows.push([x, y, z, 1.0]);
                    rows.push([x, y, -z, -1.0]);
                }
                rows.push([x, x, 0.0, 0.0]);
                rows.push([x, -x, 0.0, 0.0]);
            }
            write_rows(&mut buf, &REGION_HEADER, rows).map_err(err)?;
        }
    }
    ctx.emit(buf)?;
    Ok(Status::Ok)
}
