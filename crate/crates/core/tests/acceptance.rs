//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sublorentz::causal::{lorentz_norm2, CausalKind};
use sublorentz::heisenberg::{self, connect, mu, shoot, solve_mu, HeisIvp, TargetClass};
use sublorentz::integrator::{conservation_report, integrate, CovectorState, GeodesicPath, IntegrationConfig};
use sublorentz::quaternion::{
    appendix_suite, closed_form, norm_identity_x, random_ivp, solve, z_discrepancy_sweep, QuatIvp, IDENTITY_TOL,
    NORM_X_TOL,
};
use sublorentz::reachable::{bslice_reduce, control_sample, verify_inclusion, CurveKind, EtaParams, RegionId, Slice};
use sublorentz::{GroupId, GroupPoint};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(20_240_601);
    r.set_stream(stream);
    r
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let target = r.random_range(-0.999..0.999);
        let tau = match solve_mu(target) {
            Ok(t) => t,
            Err(e) => return outcome(false, format!("solve_mu({target}) failed: {e}")),
        };
        worst = worst.max((mu(tau) - target).abs());
    }
    let grid: Vec<f64> = (0..10_000).map(|i| -20.0 + 40.0 * i as f64 / 9_999.0).collect();
    let decreasing = grid.windows(2).all(|w| mu(w[1]) < mu(w[0]));
    let increases = grid.windows(2).filter(|w| mu(w[1]) > mu(w[0])).count();
    let ties: Vec<f64> = grid.windows(2).filter(|w| mu(w[1]) == mu(w[0])).map(|w| w[0].abs().min(w[1].abs())).collect();
    let first_tie = ties.iter().cloned().fold(f64::INFINITY, f64::min);
    let (lo, hi) = (mu(-20.0), mu(20.0));
    let elapsed = start.elapsed();
    let pass = worst <= 1e-12
        && decreasing
        && (lo - 1.0).abs() <= 1e-6
        && (hi + 1.0).abs() <= 1e-6
        && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "max round-trip {worst:.2e}, strictly decreasing {decreasing} ({} equal neighbours for |tau| >= {first_tie:.3}, \
             {increases} increases), mu(-20)={lo}, mu(20)={hi}, {elapsed:.2?}",
            ties.len()
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    let mut class_mismatch = 0;
    let mut failures = Vec::new();
    for i in 0..2000 {
        let timelike = i < 1000;
        let a: f64 = r.random_range(0.05..3.0);
        let b = r.random_range(-0.98..0.98) * a;
        let ratio: f64 = r.random_range(-0.999..0.999);
        let (x, y) = if timelike { (a, b) } else { (b, a * if r.random_bool(0.5) { 1.0 } else { -1.0 }) };
        let z = ratio * (x * x - y * y).abs() / 4.0;
        let target = GroupPoint::heisenberg(x, y, z);
        let conn = match connect(&target) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("{target:?}: {e}"));
                continue;
            }
        };
        worst = worst.max(conn.endpoint_error());
        let want = if timelike { CausalKind::Timelike } else { CausalKind::Spacelike };
        let path = conn.path(51).expect("path");
        if path.samples().iter().any(|s| s.class.kind != want) {
            class_mismatch += 1;
        }
        let expected = if timelike {
            matches!(conn.class, TargetClass::TimelikeConnectable(_))
        } else {
            conn.class == TargetClass::SpacelikeConnectable
        };
        if !expected {
            class_mismatch += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && worst <= 1e-9 && class_mismatch == 0 && elapsed < Duration::from_secs(5);
    outcome(
        pass,
        format!(
            "max endpoint error {worst:.2e}, class mismatches {class_mismatch}, failures {}, {elapsed:.2?}",
            failures.len()
        ),
    )
}

fn integrated(group: GroupId, v0: &[f64], theta: &[f64], steps: usize) -> GeodesicPath {
    let init = CovectorState::from_velocity(group, v0, theta).expect("state");
    let cfg = IntegrationConfig {
        steps,
        samples: 101,
        ..Default::default()
    };
    integrate(&init, &cfg).expect("integration")
}

type Ivp = (GroupId, Vec<f64>, Vec<f64>, GeodesicPath);

fn random_ivps() -> Vec<Ivp> {
    let mut r = rng(3);
    let mut out = Vec::new();
    for _ in 0..100 {
        let v0 = [r.random_range(-1.5..1.5), r.random_range(-1.5..1.5)];
        let theta = r.random_range(-2.0..2.0);
        let ivp = HeisIvp::new(v0, theta);
        out.push((GroupId::HeisenbergL, v0.to_vec(), vec![theta], heisenberg::sample_path(&ivp, 1.0, 101).unwrap()));
    }
    for _ in 0..100 {
        let ivp = random_ivp(&mut r);
        out.push((GroupId::QuaternionH, ivp.v0.to_vec(), ivp.theta.to_vec(), solve(&ivp).sample_path(1.0, 101).unwrap()));
    }
    out
}

fn criterion_3(ivps: &[Ivp]) -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_half = 0.0f64;
    let mut min_ratio = f64::INFINITY;
    for (g, v0, theta, exact) in ivps {
        worst = worst.max(integrated(*g, v0, theta, 1000).max_deviation(exact).unwrap());
        worst_half = worst_half.max(integrated(*g, v0, theta, 2000).max_deviation(exact).unwrap());
        // per trajectory at 100 vs 200 steps, where truncation dominates rounding
        let coarse = integrated(*g, v0, theta, 100).max_deviation(exact).unwrap();
        let fine = integrated(*g, v0, theta, 200).max_deviation(exact).unwrap();
        if coarse > 1e-11 {
            min_ratio = min_ratio.min(coarse / fine);
        }
    }
    let ratio = worst / worst_half;
    let pass = worst <= 1e-6 && ratio >= 8.0 && min_ratio >= 8.0;
    outcome(
        pass,
        format!(
            "max deviation {worst:.2e} at 1000 steps, {worst_half:.2e} at 2000 (ratio {ratio:.2}), \
             min per-trajectory ratio 100->200 steps {min_ratio:.2}"
        ),
    )
}

fn criterion_4(ivps: &[Ivp]) -> Outcome {
    let mut h = 0.0f64;
    let mut th = 0.0f64;
    for (g, v0, theta, _) in ivps {
        for steps in [1000, 200] {
            let rep = conservation_report(&integrated(*g, v0, theta, steps));
            h = h.max(rep.h_relative_drift);
            th = th.max(rep.theta_drift);
        }
        let rk45 = IntegrationConfig {
            method: sublorentz::integrator::Method::Rk45,
            ..Default::default()
        };
        let init = CovectorState::from_velocity(*g, v0, theta).unwrap();
        let rep = conservation_report(&integrate(&init, &rk45).unwrap());
        h = h.max(rep.h_relative_drift);
        th = th.max(rep.theta_drift);
    }
    outcome(h <= 1e-8 && th == 0.0, format!("max relative H drift {h:.2e}, max theta drift {th:e}"))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut asserted = 0;
    let mut worst = 0.0f64;
    let mut worst_name = String::new();
    let mut worst_x = 0.0f64;
    for _ in 0..1000 {
        let ivp = random_ivp(&mut r);
        let reps = appendix_suite(&ivp).expect("suite");
        asserted = reps.iter().filter(|r| r.asserted).count();
        for rep in reps.iter().filter(|r| r.asserted) {
            if rep.relative > worst {
                worst = rep.relative;
                worst_name = rep.name.clone();
            }
        }
        let t = r.random_range(0.0..1.0);
        worst_x = worst_x.max(norm_identity_x(&closed_form(&ivp).unwrap(), t).relative);
    }
    let log = z_discrepancy_sweep(1000, 5);
    let pass = asserted >= 40
        && worst <= IDENTITY_TOL
        && worst_x <= NORM_X_TOL
        && log.samples == 1000
        && log.slice_vs_heisenberg <= 1e-9;
    outcome(
        pass,
        format!(
            "{asserted} identities, max residual {worst:.2e} ({worst_name}), |x|^2 residual {worst_x:.2e}, \
             |z|^2 stated-form residual {:.2e} (reported), slice vs Heisenberg {:.2e}",
            log.stated_vs_true, log.slice_vs_heisenberg
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut violations = 0;
    for i in 0..1000 {
        let kind = i % 3;
        let a = r.random_range(0.1..1.5);
        let b = r.random_range(-0.95..0.95) * a;
        let s = if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let v0 = match kind {
            0 => [s * a, b],
            1 => [b, s * a],
            _ => [s * a, if r.random_bool(0.5) { a } else { -a }],
        };
        let ivp = HeisIvp::new(v0, r.random_range(-3.0..3.0));
        let q = lorentz_norm2(&v0);
        for j in 1..=100 {
            let p = shoot(&ivp, j as f64 / 100.0).point;
            let (x, y, z) = (p.x()[0], p.x()[1], p.z()[0]);
            let e = -x * x + y * y + 4.0 * z.abs();
            let ok = match kind {
                0 => e < 0.0 && q < 0.0,
                1 => e > 0.0 && q > 0.0,
                _ => e.abs() <= 1e-12 && q == 0.0,
            };
            violations += (!ok) as usize;
        }
    }
    outcome(violations == 0, format!("{violations} sign violations over 100000 samples"))
}

fn criterion_7() -> Outcome {
    let g0 = RegionId::Gamma(EtaParams::new(0.0).unwrap());
    let nspc = verify_inclusion(|i| control_sample(7, i, CurveKind::Nonspacelike, None, 257), g0, 1000).unwrap();
    let tfd = verify_inclusion(|i| control_sample(8, i, CurveKind::Timelike, None, 257), g0, 1000).unwrap();
    let pass = nspc.violations.is_empty() && tfd.violations.is_empty() && tfd.max_eta0_increase <= 1e-6;
    outcome(
        pass,
        format!(
            "nspc violations {}, tfd violations {}, max eta0 increase {:.2e}, max cone excess {:.2e}",
            nspc.violations.len(),
            tfd.violations.len(),
            tfd.max_eta0_increase,
            nspc.max_cone_excess.max(tfd.max_cone_excess)
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let (mut off, mut dev, mut off_rk, mut dev_rk) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for slice in Slice::ALL {
        for _ in 0..100 {
            let h = HeisIvp::new([r.random_range(-1.5..1.5), r.random_range(-1.5..1.5)], r.random_range(-2.0..2.0));
            let q: QuatIvp = slice.embed_ivp(&h);
            let sol = solve(&q);
            for j in 0..=20 {
                let t = j as f64 / 20.0;
                let p = sol.point(t);
                off = off.max(slice.off_slice(&p));
                let red = bslice_reduce(slice, &p, 1e-10).map(|p| p.max_abs_diff(&shoot(&h, t).point));
                dev = dev.max(red.unwrap_or(f64::INFINITY));
            }
            let path = integrated(GroupId::QuaternionH, &q.v0, &q.theta, 1000);
            for s in path.samples() {
                off_rk = off_rk.max(slice.off_slice(&s.point));
                let red = bslice_reduce(slice, &s.point, 1e-10).map(|p| p.max_abs_diff(&shoot(&h, s.t).point));
                dev_rk = dev_rk.max(red.unwrap_or(f64::INFINITY));
            }
        }
    }
    let pass = off <= 1e-10 && dev <= 1e-9 && off_rk <= 1e-10 && dev_rk <= 1e-9;
    outcome(
        pass,
        format!("closed form: off-slice {off:.2e}, deviation {dev:.2e}; RK4: off-slice {off_rk:.2e}, deviation {dev_rk:.2e}"),
    )
}

fn main() {
    let ivps = random_ivps();
    let results = [
        ("1 mu solver", criterion_1()),
        ("2 two-point connection", criterion_2()),
        ("3 closed form vs integrator", criterion_3(&ivps)),
        ("4 conservation", criterion_4(&ivps)),
        ("5 appendix identities", criterion_5()),
        ("6 causal trichotomy", criterion_6()),
        ("7 reachability", criterion_7()),
        ("8 slice reduction", criterion_8()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += (!o.pass) as usize;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
