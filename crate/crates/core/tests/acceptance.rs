//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use darkgas::fitting::{fit_t_over_m, ObservedCurve, ObservedPoint};
use darkgas::gas::{self, GasParameters};
use darkgas::numerics::cumulative_trapezoid;
use darkgas::optics::{self, BeamConfig, FarField, GridSpec, WireSpec};
use darkgas::units;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn milky_way() -> GasParameters<f64> {
    GasParameters::milky_way()
}

fn wave_speed() -> Outcome {
    let v = gas::isentropic_wave_speed(&milky_way());
    outcome(rel(v, 370.0) <= 0.01, format!("v_s = {v:.2} km/s, target 370 +/- 1%"))
}

fn mass_units() -> Outcome {
    let m: f64 = units::neutrino_mass_ev_to_kg(0.5).unwrap();
    outcome(rel(m, 0.89e-36) <= 0.005, format!("0.5 eV/c^2 = {m:.4e} kg, target 0.89e-36 +/- 0.5%"))
}

fn bright_dark() -> (f64, f64) {
    let c = BeamConfig::afshar();
    let w = optics::DEFAULT_WIRE_WIDTH_M;
    let bright = optics::detector_fraction(&c, &WireSpec::absorber(w, 0.0)).unwrap();
    let dark = optics::detector_fraction(&c, &WireSpec::absorber(w, c.fringe_spacing / 2.0)).unwrap();
    (bright, dark)
}

fn wire_dark_fringe() -> Outcome {
    let (_, dark) = bright_dark();
    outcome(dark >= 0.98, format!("f(dark) = {dark:.4}, need >= 0.98"))
}

fn wire_bright_fringe() -> Outcome {
    let (bright, _) = bright_dark();
    outcome(
        (bright - 0.88).abs() <= 0.04,
        format!("f(bright) = {bright:.4}, need 0.88 +/- 0.04"),
    )
}

fn complementarity_table() -> Outcome {
    let a = optics::complementarity_check(1.0, 0.0).unwrap();
    let b = optics::complementarity_check(1.0, 1.0).unwrap();
    let pass = a.sum_sq == 1.0 && a.satisfied && b.sum_sq == 2.0 && !b.satisfied;
    outcome(
        pass,
        format!(
            "(V=1,K=0) -> {} {}; (V=1,K=1) -> {} {}",
            a.sum_sq,
            if a.satisfied { "satisfied" } else { "violated" },
            b.sum_sq,
            if b.satisfied { "satisfied" } else { "violated" }
        ),
    )
}

fn isothermal_asymptotics() -> Outcome {
    let p = milky_way();
    let r = 100.0 * p.r0;
    let prof = gas::solve_density_profile(&p, 1000.0, 1e-10).unwrap();
    let slope = prof.log_slope(r).unwrap();
    let curve = gas::rotation_curve(&prof, &p).unwrap();
    let v = curve.interpolate(r).unwrap();
    let v_inf = (2.0 * p.kt_over_m).sqrt();
    let pass = rel(slope, -2.0) <= 0.05 && rel(v, v_inf) <= 0.10;
    outcome(
        pass,
        format!("dlnrho/dlnr = {slope:.4} (-2 +/- 5%), v = {v:.1} vs {v_inf:.1} km/s (+/- 10%) at r = {r:.0} kpc"),
    )
}

fn euler_residual() -> Outcome {
    let p = milky_way();
    let prof = gas::solve_density_profile(&p, gas::DEFAULT_R_MAX, 1e-10).unwrap();
    let mut rng = StdRng::seed_from_u64(20_231_015);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let r = rng.random_range(prof.r_min()..prof.r_max());
        if r <= prof.r_min() {
            continue;
        }
        worst = worst.max(gas::euler_residual(&prof, &p, r).unwrap());
    }
    outcome(worst < 1e-3, format!("max residual = {worst:.3e} at 10 random radii, need < 1e-3"))
}

fn enclosed_mass() -> Outcome {
    let p = milky_way();
    let prof = gas::solve_density_profile(&p, gas::DEFAULT_R_MAX, 1e-10).unwrap();
    let f: Vec<f64> = prof.r().iter().zip(prof.rho()).map(|(r, rho)| 4.0 * PI * rho * r * r).collect();
    let trap = *cumulative_trapezoid(prof.r(), &f).unwrap().last().unwrap();
    let solver = *prof.m_dm().last().unwrap();
    let err = rel(trap, solver);
    outcome(err < 1e-4, format!("M_dm = {solver:.6e}, trapezoid = {trap:.6e}, rel diff {err:.2e} (< 1e-4)"))
}

/// Observations sampled from an independent solve landing exactly on the radii.
fn synthetic(radii: &[f64], t_over_m: f64) -> Vec<f64> {
    let p = milky_way().with_kt_over_m(units::t_over_m_to_velocity_sq(t_over_m).unwrap());
    let mut grid = vec![p.r0];
    grid.extend_from_slice(radii);
    let prof = gas::solve_density_profile_on(&p, &grid, 1e-11).unwrap();
    let curve = gas::rotation_curve(&prof, &p).unwrap();
    curve.v()[1..].to_vec()
}

fn fit_recovery() -> Outcome {
    let template = milky_way();
    let radii: Vec<f64> = (0..30).map(|i| 10.0 + 240.0 * i as f64 / 29.0).collect();
    let clean = synthetic(&radii, 6.0);

    let obs = ObservedCurve::new(
        radii.iter().zip(&clean).map(|(&r, &v)| ObservedPoint { r, v, sigma: 1.0 }).collect(),
    )
    .unwrap();
    let exact = fit_t_over_m(&obs, &template, (1.0, 20.0), 1e-4).unwrap();
    let mut pass = rel(exact.t_over_m_best, 6.0) <= 0.01;
    let mut detail = format!("noiseless T/m = {:.5}", exact.t_over_m_best);

    let noise = Normal::new(0.0, 5.0).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let obs = ObservedCurve::new(
            radii
                .iter()
                .zip(&clean)
                .map(|(&r, &v)| ObservedPoint { r, v: v + noise.sample(&mut rng), sigma: 5.0 })
                .collect(),
        )
        .unwrap();
        let fit = fit_t_over_m(&obs, &template, (1.0, 20.0), 1e-4).unwrap();
        worst = worst.max(rel(fit.t_over_m_best, 6.0));
    }
    pass &= worst <= 0.10;
    detail.push_str(&format!(" (1%), noisy worst rel error {worst:.4} over 10 seeds (10%)"));
    outcome(pass, detail)
}

fn keplerian_limit() -> Outcome {
    let p = GasParameters { rho0: 0.0, ..milky_way() };
    let prof = gas::solve_density_profile(&p, gas::DEFAULT_R_MAX, 1e-9).unwrap();
    let curve = gas::rotation_curve(&prof, &p).unwrap();
    let g = units::g_gal::<f64>();
    let worst = curve
        .r()
        .iter()
        .zip(curve.v())
        .map(|(&r, &v)| rel(v, (g * p.m0 / r).sqrt()))
        .fold(0.0, f64::max);
    outcome(worst <= 1e-10, format!("max rel deviation from sqrt(G M0 / r) = {worst:.2e} (1e-10)"))
}

fn optics_unitarity() -> Outcome {
    let c = BeamConfig::afshar();
    let w = optics::DEFAULT_WIRE_WIDTH_M;
    let coarse = FarField::new(c, GridSpec::default()).unwrap();
    let fine = FarField::new(c, GridSpec { log2_samples: optics::DEFAULT_LOG2_SAMPLES + 1, ..GridSpec::default() }).unwrap();
    let mut parseval: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for center in [0.0, c.fringe_spacing / 2.0, 0.3 * c.fringe_spacing] {
        let wire = WireSpec::absorber(w, center);
        let (near, far) = coarse.parseval(&wire).unwrap();
        parseval = parseval.max(rel(far, near));
        let a = coarse.fractions(&wire).unwrap().total;
        let b = fine.fractions(&wire).unwrap().total;
        drift = drift.max((a - b).abs());
    }
    outcome(
        parseval <= 1e-9 && drift <= 0.005,
        format!("Parseval rel error {parseval:.2e} (1e-9), |f_N - f_2N| = {drift:.2e} (0.005)"),
    )
}

fn run_twice(bin: &str, dir: &Path, name: &str, args: &[&str], outputs: &[&str]) -> Result<(), String> {
    let mut seen: Vec<Vec<Vec<u8>>> = Vec::new();
    for round in 0..2 {
        for o in outputs {
            let _ = std::fs::remove_file(dir.join(o));
        }
        let res = Command::new(bin)
            .args(args)
            .current_dir(dir)
            .env("DARKGAS_THREADS", if round == 0 { "1" } else { "0" })
            .output()
            .map_err(|e| e.to_string())?;
        if !res.status.success() {
            return Err(format!("{name}: exit {:?}: {}", res.status.code(), String::from_utf8_lossy(&res.stderr)));
        }
        let mut bytes = vec![res.stdout];
        for o in outputs {
            bytes.push(std::fs::read(dir.join(o)).map_err(|e| format!("{name}: {o}: {e}"))?);
        }
        seen.push(bytes);
    }
    if seen[0] == seen[1] {
        Ok(())
    } else {
        Err(format!("{name}: outputs differ between runs"))
    }
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_darkgas");
    let dir = tempfile::tempdir().unwrap();
    let radii: Vec<f64> = (0..12).map(|i| 10.0 + 15.0 * i as f64).collect();
    let v = synthetic(&radii, 6.0);
    let mut csv = String::from("r_kpc,v_kms,sigma_kms\n");
    for (r, v) in radii.iter().zip(&v) {
        csv.push_str(&format!("{r},{v},5\n"));
    }
    std::fs::write(dir.path().join("obs.csv"), csv).unwrap();

    let cases: [(&str, Vec<&str>, Vec<&str>); 8] = [
        ("rotcurve csv", vec!["rotcurve", "--m0", "9e10", "--rho0", "0.01", "--r0", "8.34", "--t-over-m", "6", "--out", "curve.csv", "--plot", "curve.svg"], vec!["curve.csv", "curve.svg"]),
        ("rotcurve json", vec!["rotcurve", "--format", "json", "--out", "curve.json"], vec!["curve.json"]),
        ("fit", vec!["fit", "--data", "obs.csv", "--format", "json", "--out", "fit.json", "--plot", "fit.svg"], vec!["fit.json", "fit.svg"]),
        ("wavespeed", vec!["wavespeed", "--t-over-m", "6"], vec![]),
        ("scanwire", vec!["scanwire", "--count", "21", "--out", "scan.csv", "--plot", "scan.svg"], vec!["scan.csv", "scan.svg"]),
        ("scanwire json", vec!["scanwire", "--count", "9", "--format", "json", "--out", "scan.json"], vec!["scan.json"]),
        ("interference", vec!["interference", "--out", "fringes.csv", "--plot", "fringes.svg"], vec!["fringes.csv", "fringes.svg"]),
        ("check", vec!["check", "--format", "json", "--out", "metrics.json"], vec!["metrics.json"]),
    ];
    let mut failures = Vec::new();
    for (name, args, outputs) in &cases {
        if let Err(e) = run_twice(bin, dir.path(), name, args, outputs) {
            failures.push(e);
        }
    }
    if failures.is_empty() {
        outcome(true, format!("{} CLI invocations byte-identical across two runs", cases.len()))
    } else {
        outcome(false, failures.join("; "))
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("1 wave speed", wave_speed),
        ("2 neutrino mass units", mass_units),
        ("3 wire at dark fringe", wire_dark_fringe),
        ("4 wire at bright fringe", wire_bright_fringe),
        ("5 complementarity table", complementarity_table),
        ("6 isothermal asymptotics", isothermal_asymptotics),
        ("7 hydrostatic residual", euler_residual),
        ("8 enclosed-mass consistency", enclosed_mass),
        ("9 fit recovery", fit_recovery),
        ("10 Keplerian limit", keplerian_limit),
        ("11 optics unitarity and convergence", optics_unitarity),
        ("12 CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} [{:>7.2?}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed(),
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
