//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gcr_core::construct::{build_surface, flat_profile_case1, Cone, GCRSurface, ProfileU};
use gcr_core::curves::builtin;
use gcr_core::geometry::{jet, JetConfig};
use gcr_core::io::Perturbed;
use gcr_core::minkowski::det3;
use gcr_core::verifier::{check_flatness, full_report, CheckName, Grid, Outcome, VerificationReport};
use gcr_core::{lorentz_cross, lorentz_inner, FnMap, Interval, MinkVector3, SurfaceMap, VerifyOptions};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

const S: Interval = Interval::new(0.5, 2.0);
const T: Interval = Interval::new(-1.0, 1.0);

type Criterion = (&'static str, fn() -> Outcome1, Duration);

struct Outcome1 {
    pass: bool,
    detail: String,
}

fn case1() -> GCRSurface {
    build_surface(Cone::TimeLikeCone, ProfileU::PowerLog { a: 2.0, b: 0.0 }, builtin::hyperbola(), S, T).unwrap()
}

fn case2() -> GCRSurface {
    build_surface(Cone::SpaceLikeCone, ProfileU::PowerLog { a: 0.5, b: 0.0 }, builtin::circle(), S, T).unwrap()
}

fn fd(step: f64) -> VerifyOptions {
    VerifyOptions { jet: JetConfig::fd(step), ..VerifyOptions::default() }
}

fn cross_identity() -> Outcome1 {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut v3 =
        || MinkVector3::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (v, w, z) = (v3(), v3(), v3());
        // determinant written out here rather than taken from the library
        let [a, b, c] = [v.to_array(), w.to_array(), z.to_array()];
        let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]);
        let lhs = lorentz_inner(lorentz_cross(v, w), z);
        worst = worst.max((lhs - det).abs()).max((det3(v, w, z) - det).abs());
    }
    Outcome1 { pass: worst < 1e-12, detail: format!("max |<v^w,z> - det| = {worst:.3e} (tol 1e-12)") }
}

fn classification_case1() -> Outcome1 {
    let surf = case1();
    let (mut pos, mut gss, mut gtt) = (0.0f64, 0.0f64, 0.0f64);
    // θ = arccoth 2 so 1/sinh²θ = coth²θ − 1 = 3
    let inv_sinh2 = 3.0;
    for (s, t) in Grid::new(S, T, 41, 41).points() {
        let u = 2.0 * s.ln();
        let x = MinkVector3::new(s * u.cosh() * t.cosh(), s * u.cosh() * t.sinh(), s * u.sinh());
        let j = surf.analytic_jet(s, t).unwrap();
        pos = pos.max((x.quad() + s * s).abs()).max((j.x - x).euclid_norm());
        let g = j.metric();
        gss = gss.max((g.0[0][0] - inv_sinh2).abs());
        gtt = gtt.max((g.0[1][1] - s * s * u.cosh().powi(2)).abs());
    }
    Outcome1 {
        pass: pos < 1e-12 && gss < 1e-8 && gtt < 1e-8,
        detail: format!("|<x,x>+s^2| {pos:.3e} (1e-12), g_ss {gss:.3e}, g_tt {gtt:.3e} (1e-8)"),
    }
}

fn principal_direction() -> Outcome1 {
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, surf) in [("I", case1()), ("II", case2())] {
        let grid = Grid::for_surface(&surf, 41, 41);
        let a = full_report(&surf, &grid, &VerifyOptions::default()).max_residual(CheckName::PrincipalDirection);
        let f = full_report(&surf, &grid, &fd(1e-4)).max_residual(CheckName::PrincipalDirection);
        pass &= a < 1e-8 && f < 1e-4;
        parts.push(format!("{label}: analytic {a:.3e} fd {f:.3e}"));
    }
    Outcome1 { pass, detail: format!("{} (tol 1e-8 / 1e-4)", parts.join(", ")) }
}

fn angle_law() -> Outcome1 {
    // s u′ = a for u = a ln s
    let expect1 = ((2.0f64 + 1.0) / (2.0 - 1.0)).ln() / 2.0;
    let expect2 = ((1.0f64 + 0.5) / (1.0 - 0.5)).ln() / 2.0;
    let known = (0.5 * 3f64.ln() - 0.549_306_144_334_054_8).abs();
    let mut worst = 0.0f64;
    for (surf, expect) in [(case1(), expect1), (case2(), expect2)] {
        let r = full_report(&surf, &Grid::for_surface(&surf, 41, 41), &VerifyOptions::default());
        for p in &r.points {
            let theta = p.theta.unwrap() * f64::from(p.theta_sign.unwrap());
            worst = worst.max((theta - expect).abs());
        }
    }
    Outcome1 {
        pass: worst < 1e-8 && known < 1e-15,
        detail: format!("max |theta - theta(s u')| = {worst:.3e} (tol 1e-8), case I value {expect1:.6}"),
    }
}

fn frame_relations() -> Outcome1 {
    let checks = [CheckName::K1Relation, CheckName::ConnectionGeodesic, CheckName::ConnectionE2, CheckName::Codazzi];
    let mut worst = 0.0f64;
    for surf in [case1(), case2()] {
        let grid = Grid::for_surface(&surf, 41, 41);
        for opts in [VerifyOptions::default(), fd(1e-4)] {
            assert_eq!(opts.field_step, 1e-3);
            let r = full_report(&surf, &grid, &opts);
            for c in checks {
                worst = worst.max(r.max_residual(c));
            }
        }
    }
    Outcome1 { pass: worst < 1e-3, detail: format!("max k1/connection/codazzi residual {worst:.3e} (tol 1e-3)") }
}

fn flat_family() -> Outcome1 {
    let surf = build_surface(
        Cone::TimeLikeCone,
        flat_profile_case1(0.3, 2.0).unwrap(),
        builtin::hyperbola(),
        Interval::new(0.5, 1.8),
        T,
    )
    .unwrap();
    let f = check_flatness(&surf, &Grid::for_surface(&surf, 41, 41), &VerifyOptions::default());
    let tpu = f.theta_plus_u.unwrap_or(f64::NAN);
    Outcome1 {
        pass: tpu < 1e-10 && f.max_abs_k_e1 < 1e-6 && f.max_abs_k_ext < 1e-6,
        detail: format!(
            "|theta+u-c1| {tpu:.3e} (1e-10), |k_e1| {:.3e}, |K_ext| {:.3e} (1e-6)",
            f.max_abs_k_e1, f.max_abs_k_ext
        ),
    }
}

fn gauss_consistency() -> Outcome1 {
    let mut maps: Vec<(String, Box<dyn SurfaceMap>, Grid)> = Vec::new();
    let families = [
        (Cone::TimeLikeCone, ProfileU::PowerLog { a: 2.0, b: 0.0 }, builtin::hyperbola()),
        (Cone::SpaceLikeCone, ProfileU::PowerLog { a: 0.5, b: 0.0 }, builtin::circle()),
        (Cone::TimeLikeCone, ProfileU::PowerLog { a: 1.5, b: 0.2 }, builtin::hyperbolic_circle(2.0)),
        (Cone::SpaceLikeCone, ProfileU::PowerLog { a: -0.3, b: 0.1 }, builtin::de_sitter_parallel(0.4)),
    ];
    for (cone, profile, curve) in families {
        let surf = build_surface(cone, profile, curve, S, T).unwrap();
        let grid = Grid::for_surface(&surf, 41, 41);
        maps.push((surf.curve().label().to_string(), Box::new(surf), grid));
    }
    let sheet = FnMap::new("sheet", |s: f64, t: f64| MinkVector3::new((1.0 + s * s + t * t).sqrt(), s, t));
    maps.push(("sheet".into(), Box::new(sheet), Grid::new(T, T, 41, 41)));
    let mut worst = 0.0f64;
    let mut counted = 0;
    for (_, map, grid) in &maps {
        let r: VerificationReport = full_report(map.as_ref(), grid, &fd(1e-4));
        let g = r.check(CheckName::Gauss).unwrap();
        counted += g.count;
        worst = worst.max(g.max);
    }
    Outcome1 {
        pass: worst < 1e-3 && counted == maps.len() * 41 * 41,
        detail: format!("max |K_int + det S| {worst:.3e} over {counted} points on {} surfaces (tol 1e-3)", maps.len()),
    }
}

fn negative_control() -> Outcome1 {
    let p = Perturbed { base: case1(), epsilon: 0.01 };
    let r = full_report(&p, &Grid::new(S, T, 41, 41), &VerifyOptions::default());
    let pd = r.check(CheckName::PrincipalDirection).unwrap();
    Outcome1 {
        pass: r.outcome == Outcome::Fail && r.exit_code() == 1 && pd.max > 10.0 * pd.tolerance,
        detail: format!("principal residual {:.3e} vs tol {:.1e}, exit code {}", pd.max, pd.tolerance, r.exit_code()),
    }
}

fn fd_convergence() -> Outcome1 {
    let steps = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
    let mut ratios = Vec::new();
    for surf in [case1(), case2()] {
        let grid = Grid::new(Interval::new(0.6, 1.9), Interval::new(-0.9, 0.9), 9, 9);
        let err = |h: f64| {
            grid.points()
                .iter()
                .map(|&(s, t)| {
                    let exact = surf.analytic_jet(s, t).unwrap();
                    jet(&surf, s, t, JetConfig::fd(h)).unwrap().max_diff(&exact)
                })
                .fold(0.0, f64::max)
        };
        let e: Vec<f64> = steps.iter().map(|&h| err(h)).collect();
        ratios.extend(e.windows(2).map(|w| w[0] / w[1]));
    }
    let pass = ratios.iter().all(|r| (3.5..=4.5).contains(r));
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Outcome1 { pass, detail: format!("error ratios per halving [{}] (want 3.5..4.5)", shown.join(", ")) }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("cross product identity", cross_identity, Duration::from_secs(1)),
        ("time-like cone classification", classification_case1, Duration::from_secs(2)),
        ("principal direction, both cones", principal_direction, Duration::from_secs(10)),
        ("angle law", angle_law, Duration::from_secs(10)),
        ("k1, connection and codazzi relations", frame_relations, Duration::from_secs(10)),
        ("flat family", flat_family, Duration::from_secs(2)),
        ("gauss equation consistency", gauss_consistency, Duration::from_secs(30)),
        ("negative control", negative_control, Duration::from_secs(10)),
        ("finite-difference convergence", fd_convergence, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took < *budget;
        failed += usize::from(!pass);
        println!(
            "{} {}. {name}: {} [{:.3} s, budget {} s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
