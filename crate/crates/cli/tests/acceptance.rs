//! Acceptance criteria. Each check prints one PASS/FAIL line; the process exits
//! non-zero when any check fails.

use std::cell::Cell;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestCaseError, TestRunner};
use rayon::prelude::*;

use kickfid_cli::manifest::BandEntry;
use kickfid_cli::runner::{self, PeriodAnalysis, TwinRun};
use kickfid_cli::{ConfigOverrides, ExperimentConfig};
use kickfid_core::analytic::{expanded_series, fidelity_free, s_terms_exact, wigner_correlation_analytic};
use kickfid_core::classical::{iterate, rotation_frequency};
use kickfid_core::grid::{make_coherent_state, make_grid};
use kickfid_core::observables::{fidelity, wigner, wigner_overlap, TwinSnapshotRecorder};
use kickfid_core::propagator::{apply_free_flight, apply_kick, evolve, evolve_twins};
use kickfid_core::spectral::{find_band_peak, periodogram_values, width_frequency};
use kickfid_core::{
    Band, Complex64, MomentumForm, Observer, OscModelParams, PhasePoint, SpectralOptions, TwinObserver,
    WaveFunction,
};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn base(dir: &Path) -> ExperimentConfig {
    let o = ConfigOverrides {
        output: Some(dir.to_path_buf()),
        ..Default::default()
    };
    ExperimentConfig::resolve("acceptance", &[&o]).unwrap()
}

fn analyse(cfg: &ExperimentConfig) -> (TwinRun, PeriodAnalysis) {
    let run = runner::twin_run(cfg, false).unwrap();
    let analysis = runner::analyse_periods(&run.fidelity, cfg).unwrap();
    (run, analysis)
}

fn period(entry: &BandEntry) -> Option<f64> {
    entry.peak().map(|p| p.period)
}

fn band_max(analysis: &PeriodAnalysis, band: &Band) -> f64 {
    let s = &analysis.spectrum;
    s.frequencies
        .iter()
        .zip(&s.magnitudes)
        .filter(|(nu, _)| band.contains(**nu))
        .map(|(_, m)| *m)
        .fold(0.0, f64::max)
}

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Check {
    let w1 = rotation_frequency(1.0).unwrap();
    let w2 = rotation_frequency(1.01).unwrap();
    let dw = (w2 - w1).abs();
    let ok = (w1 - 1.047).abs() <= 1e-3 && (w2 - 1.053).abs() <= 1e-3 && (dw - 0.0057747).abs() <= 1e-6;
    verdict(ok, format!("omega(1) = {w1:.6}, omega(1.01) = {w2:.6}, |d omega| = {dw:.8} (target 0.0057747 +- 1e-6)"))
}

fn criterion_2(dir: &Path) -> Check {
    let x0s = [0.14, 0.18, 0.22, 0.26];
    let betas = [0.0, 3e-5, 6e-5];
    let cfg = base(dir);
    let points: Vec<_> = betas
        .iter()
        .flat_map(|&b| x0s.iter().map(move |&x| (b, x, 0.0)))
        .collect();
    let results = runner::run_points(&cfg, &points, &dir.join("c2"));
    let mut ok = true;
    let mut rows = Vec::new();
    for (bi, beta) in betas.iter().enumerate() {
        let t1: Vec<Option<f64>> = (0..x0s.len()).map(|xi| results[bi * x0s.len() + xi].t1).collect();
        let in_range = t1.iter().all(|t| t.is_some_and(|t| (3.0..=3.06).contains(&t)));
        let monotone = t1.windows(2).all(|w| matches!(w, [Some(a), Some(b)] if b >= a));
        ok &= in_range && monotone;
        let shown: Vec<String> = t1.iter().map(|t| t.map_or("none".into(), |t| format!("{t:.4}"))).collect();
        rows.push(format!("beta {beta:e}: [{}]", shown.join(", ")));
    }
    verdict(ok, format!("T1 over x0 = {x0s:?}: {}", rows.join("; ")))
}

fn criterion_3(dir: &Path) -> Check {
    let cfg = base(dir);
    let dw = (rotation_frequency(1.01).unwrap() - rotation_frequency(1.0).unwrap()).abs();
    let half = PI / dw;
    let points = [(6e-5, 0.18, 0.0), (6e-5, 0.02, 0.0), (6e-5, 0.05, 0.0)];
    let r = runner::run_points(&cfg, &points, &dir.join("c3"));
    let main_ok = r[0].t3.is_some_and(|t| (1035.0..=1155.0).contains(&t));
    let small_ok = r[1..]
        .iter()
        .all(|p| p.t3.is_some_and(|t| (t - half).abs() <= 0.1 * half));
    let show = |t: Option<f64>| t.map_or("none".into(), |t| format!("{t:.1}"));
    verdict(
        main_ok && small_ok,
        format!(
            "T3(x0=0.18) = {} in [1035, 1155]; T3(x0=0.02) = {}, T3(x0=0.05) = {} vs pi/d omega = {half:.1} +- 10%",
            show(r[0].t3),
            show(r[1].t3),
            show(r[2].t3)
        ),
    )
}

fn criterion_4(dir: &Path) -> Check {
    let cfg = base(dir);
    let (int, free) = rayon::join(|| analyse(&cfg), || analyse(&cfg.with_point(0.0, cfg.x0, cfg.p0)));
    let t2 = period(&int.1.t2);
    let mid = Band::mid();
    let (a_int, a_free) = (band_max(&int.1, &mid), band_max(&free.1, &mid));
    let ok = t2.is_some_and(|t| (34.0..=48.0).contains(&t)) && a_free * 10.0 <= a_int;
    verdict(
        ok,
        format!(
            "T2 = {} (target [34, 48]); mid-band amplitude beta=6e-5 {a_int:.4e} vs beta=0 {a_free:.4e} (ratio {:.2}, need >= 10)",
            t2.map_or("none".into(), |t| format!("{t:.2}")),
            a_int / a_free
        ),
    )
}

fn criterion_5(dir: &Path) -> Check {
    let mut cfg = base(dir);
    let (run, _) = analyse(&cfg);
    let wf = width_frequency(&run.width, &cfg.spectral).unwrap();
    let width_ok = (1.84..=2.04).contains(&wf.omega_width);
    cfg.betas = (2..=6).map(|i| i as f64 * 1e-5).collect();
    let points: Vec<_> = cfg.betas.iter().map(|&b| (b, cfg.x0, cfg.p0)).collect();
    let r = runner::run_points(&cfg, &points, &dir.join("c5"));
    let diffs: Vec<Option<f64>> = r.iter().map(|p| p.t2_rel_diff()).collect();
    let diff_ok = diffs.iter().all(|d| d.is_some_and(|d| d <= 0.25));
    let shown: Vec<String> = diffs.iter().map(|d| d.map_or("none".into(), |d| format!("{d:.3}"))).collect();
    verdict(
        width_ok && diff_ok,
        format!(
            "Omega_width = {:.4} (target [1.84, 2.04]); |T2p - T2| / T2 over beta 2..6e-5 = [{}] (need <= 0.25)",
            wf.omega_width,
            shown.join(", ")
        ),
    )
}

fn criterion_6(dir: &Path) -> Check {
    let cfg = base(&dir.join("c6"));
    let out = runner::run_g_correlation(&cfg).unwrap();
    let m = &out.manifest;
    let (g, f) = (m.value("nu2_g"), m.value("nu2_fidelity"));
    let rel = m.value("nu2_rel_diff");
    let show = |v: Option<f64>| v.map_or("none".into(), |v| format!("{v:.5}"));
    verdict(
        rel.is_some_and(|r| r <= 0.15),
        format!("nu2 from G = {}, from fidelity = {}, relative difference {} (need <= 0.15)", show(g), show(f), show(rel)),
    )
}

fn cases(n: u32) -> PropConfig {
    PropConfig {
        failure_persistence: None,
        ..PropConfig::with_cases(n)
    }
}

fn gaussian_state() -> impl Strategy<Value = (f64, f64, f64)> {
    (-1.0f64..1.0, -1.0f64..1.0, 0.5f64..2.0)
}

fn criterion_7(dir: &Path) -> Check {
    let tau = 0.01;
    let grid = make_grid(2048, 8.0).unwrap();
    let mut runner = TestRunner::new(cases(20));
    let worst = Cell::new([0.0f64; 3]);
    let result = runner.run(&(gaussian_state(), gaussian_state()), |((x1, p1, w1), (x2, p2, w2))| {
        let a = make_coherent_state(&grid, tau, w1, x1, p1).unwrap();
        let b = make_coherent_state(&grid, tau, w2, x2, p2).unwrap();
        let (wa, wb) = (wigner(&a, tau).unwrap(), wigner(&b, tau).unwrap());
        let purity = (wigner_overlap(&wa, &wa).unwrap() - 1.0).abs();
        let path = (wigner_overlap(&wa, &wb).unwrap() - fidelity(&a, &b).unwrap()).abs();
        let xm = wa
            .x_marginal()
            .iter()
            .zip(a.density())
            .map(|(m, d)| (m - d).abs())
            .fold(0.0, f64::max);
        let probs = a.momentum_distribution();
        let n = grid.n_points();
        let pm = wa
            .p_marginal()
            .iter()
            .enumerate()
            .map(|(l, m)| (m - probs[(l + n / 2) % n] / wa.dp()).abs())
            .fold(0.0, f64::max);
        let w = worst.get();
        worst.set([w[0].max(purity), w[1].max(path), w[2].max(xm.max(pm))]);
        prop_assert!(purity < 1e-6, "purity residual {purity}");
        prop_assert!(path < 1e-6, "fidelity paths differ by {path}");
        prop_assert!(xm < 1e-6 && pm < 1e-6, "marginal residuals {xm}, {pm}");
        Ok(())
    });
    let random = match result {
        Ok(()) => Ok(()),
        Err(e) => Err(e.to_string()),
    };

    let cfg = base(dir);
    let psi0 = cfg.initial_state().unwrap();
    let kicks = [10, 100, 1000];
    let mut snaps = TwinSnapshotRecorder::new(&kicks);
    let params = |k| kickfid_core::SimParams { n_kicks: 1000, ..cfg.params_for(k, cfg.beta) };
    evolve_twins(&psi0, &params(cfg.k1), &params(cfg.k2), &mut [&mut snaps as &mut dyn TwinObserver]).unwrap();
    let twin: Vec<String> = snaps
        .finish()
        .par_iter()
        .map(|(k, a, b)| match (wigner(a, cfg.tau), wigner(b, cfg.tau)) {
            (Ok(wa), Ok(wb)) => {
                let d = (wigner_overlap(&wa, &wb).unwrap() - fidelity(a, b).unwrap()).abs();
                if d < 1e-6 {
                    format!("kick {k}: ok ({d:.1e})")
                } else {
                    format!("kick {k}: paths differ by {d:.2e}")
                }
            }
            (Err(e), _) | (_, Err(e)) => format!("kick {k}: {e}"),
        })
        .collect();
    let twin_ok = twin.iter().all(|s| s.contains(": ok"));
    let detail = format!(
        "20 random Gaussian pairs: {} (worst purity {:.1e}, path {:.1e}, marginal {:.1e}); twin states: {}",
        random.as_ref().map_or_else(|e| format!("failed ({e})"), |_| "ok".to_string()),
        worst.get()[0],
        worst.get()[1],
        worst.get()[2],
        twin.join(", ")
    );
    verdict(random.is_ok() && twin_ok, detail)
}

/// Phase-space trajectory of a coherent state in a harmonic well.
fn orbit(rho: f64, omega: f64, t: f64) -> (f64, f64) {
    (rho * (omega * t).cos(), -rho * omega * (omega * t).sin())
}

/// Trapezoid integral of the product of two normalized Gaussians.
fn gauss_product(c1: f64, v1: f64, c2: f64, v2: f64) -> f64 {
    let sd = v1.max(v2).sqrt();
    let (lo, hi) = (c1.min(c2) - 14.0 * sd, c1.max(c2) + 14.0 * sd);
    let n = 8000;
    let h = (hi - lo) / n as f64;
    let g = |x: f64, c: f64, v: f64| (-(x - c).powi(2) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
    (0..=n)
        .map(|i| {
            let x = lo + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * g(x, c1, v1) * g(x, c2, v2)
        })
        .sum::<f64>()
        * h
}

fn sup_remainder(p: &OscModelParams) -> f64 {
    let series = expanded_series(p, MomentumForm::Difference);
    (0..=4000)
        .map(|i| {
            let t = 0.5 * i as f64;
            let (sx, sp) = s_terms_exact(t, p, MomentumForm::Difference);
            (series.eval(t) - sx - sp).abs()
        })
        .fold(0.0, f64::max)
}

fn criterion_8() -> Check {
    let tau = 0.01;
    let (w1, w2) = (rotation_frequency(1.0).unwrap(), rotation_frequency(1.01).unwrap());
    let p = OscModelParams::coherent(w1, w2, 0.18, tau);
    let mut runner = TestRunner::new(cases(200));
    let worst = Cell::new(0.0f64);
    let quad = runner.run(&(0.0f64..4000.0), |t| {
        let (x1, p1) = orbit(0.18, w1, t);
        let (x2, p2) = orbit(0.18, w2, t);
        let oracle = 2.0
            * PI
            * tau
            * gauss_product(x1, tau / (2.0 * w1), x2, tau / (2.0 * w2))
            * gauss_product(p1, w1 * tau / 2.0, p2, w2 * tau / 2.0);
        let d = (fidelity_free(t, &p) - oracle).abs();
        worst.set(worst.get().max(d));
        prop_assert!(d < 1e-10, "t = {t}: deviation {d}");
        Ok(())
    });

    let breathing = p.with_width_frequency(1.94).with_phases(0.4, 1.3);
    let ratio = sup_remainder(&breathing.with_relative_gammas(0.04, 0.04))
        / sup_remainder(&breathing.with_relative_gammas(0.02, 0.02));
    let ratio_ok = (3.2..=4.8).contains(&ratio);

    let g_params = breathing.with_relative_gammas(0.04, 0.04);
    let n = 8192;
    let g: Vec<f64> = (0..n)
        .map(|k| wigner_correlation_analytic(k as f64, 1.0, &g_params))
        .collect();
    let spec = periodogram_values(&g, &SpectralOptions::default()).unwrap();
    let expected = (2.0 * g_params.omega1 - g_params.width_omega1) / (2.0 * PI);
    let peak = find_band_peak(&spec, &Band::mid()).map(|r| r.nu);
    let peak_ok = peak.as_ref().is_ok_and(|nu| (nu - expected).abs() <= 1.0 / n as f64);

    verdict(
        quad.is_ok() && ratio_ok && peak_ok,
        format!(
            "quadrature: {} (worst {:.1e}); remainder ratio {ratio:.3} (need [3.2, 4.8]); G peak {} vs 2 omega - Omega = {expected:.6} cycles/kick",
            quad.map_or_else(|e| format!("failed ({e})"), |_| "200 times ok".into()),
            worst.get(),
            peak.map_or_else(|e| e.to_string(), |nu| format!("{nu:.6}"))
        ),
    )
}

fn linear_combination(a: &WaveFunction, b: &WaveFunction, ca: Complex64, cb: Complex64) -> WaveFunction {
    let amps = a.amps().iter().zip(b.amps()).map(|(x, y)| ca * x + cb * y).collect();
    WaveFunction::from_amplitudes(*a.grid(), amps).unwrap()
}

fn criterion_9(dir: &Path) -> Check {
    let cfg = base(dir);
    let mut parts = Vec::new();
    let mut ok = true;

    let norm_params = kickfid_core::SimParams { n_kicks: 10_000, ..cfg.first() };
    let mut drift = 0.0f64;
    let mut watch = |_k: usize, s: &WaveFunction| drift = drift.max((s.norm_sqr() - 1.0).abs());
    evolve(&cfg.initial_state().unwrap(), &norm_params, &mut [&mut watch as &mut dyn Observer]).unwrap();
    ok &= drift < 1e-8;
    parts.push(format!("norm drift {drift:.1e} over 10000 kicks"));

    let grid = cfg.grid.build().unwrap();
    let mut runner = TestRunner::new(cases(32));
    let worst = Cell::new(0.0f64);
    let linear = runner.run(
        &(gaussian_state(), gaussian_state(), (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0)),
        |((x1, p1, w1), (x2, p2, w2), (ar, ai, br, bi))| {
            let a = make_coherent_state(&grid, cfg.tau, w1, x1, p1).unwrap();
            let b = make_coherent_state(&grid, cfg.tau, w2, x2, p2).unwrap();
            let (ca, cb) = (Complex64::new(ar, ai), Complex64::new(br, bi));
            let step = |psi: &WaveFunction| apply_free_flight(&apply_kick(psi, cfg.k1, 0.0, cfg.tau), cfg.tau);
            let lhs = step(&linear_combination(&a, &b, ca, cb));
            let rhs = linear_combination(&step(&a), &step(&b), ca, cb);
            let d = lhs
                .amps()
                .iter()
                .zip(rhs.amps())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            worst.set(worst.get().max(d));
            if d < 1e-10 {
                Ok(())
            } else {
                Err(TestCaseError::fail(format!("deviation {d}")))
            }
        },
    );
    ok &= linear.is_ok();
    parts.push(format!(
        "one-kick linearity {} (worst {:.1e})",
        if linear.is_ok() { "ok" } else { "failed" },
        worst.get()
    ));

    let free = cfg.with_point(0.0, cfg.x0, cfg.p0);
    let classical = iterate(PhasePoint::new(free.x0, free.p0), free.k1, 50);
    let mut centroid = Vec::new();
    let mut track = |_k: usize, s: &WaveFunction| centroid.push((s.mean_x(), s.mean_p(free.tau)));
    let short = kickfid_core::SimParams { n_kicks: 50, ..free.first() };
    evolve(&free.initial_state().unwrap(), &short, &mut [&mut track as &mut dyn Observer]).unwrap();
    let ehrenfest = centroid
        .iter()
        .zip(&classical.points[1..])
        .map(|((x, p), c)| (x - c.x).abs().max((p - c.p).abs()))
        .fold(0.0, f64::max);
    ok &= ehrenfest < 5e-3;
    parts.push(format!("Ehrenfest deviation {ehrenfest:.2e} over 50 kicks (need < 5e-3)"));

    let fine = ExperimentConfig {
        grid: kickfid_core::GridSpec { n_points: 2 * cfg.grid.n_points, ..cfg.grid },
        ..cfg.clone()
    };
    let (coarse_run, fine_run) = rayon::join(|| runner::twin_run(&cfg, false).unwrap(), || runner::twin_run(&fine, false).unwrap());
    let sup = coarse_run
        .fidelity
        .values
        .iter()
        .zip(&fine_run.fidelity.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ok &= sup < 1e-4;
    parts.push(format!("grid doubling changes fidelity by {sup:.1e} (need < 1e-4)"));
    verdict(ok, parts.join("; "))
}

fn criterion_10(dir: &Path) -> Check {
    let exe = env!("CARGO_BIN_EXE_kickfid");
    let outs = [dir.join("c10a"), dir.join("c10b")];
    for out in &outs {
        let status = Command::new(exe)
            .args(["reproduce", "fig2", "--out"])
            .arg(out)
            .output()
            .map_err(|e| e.to_string())?;
        if !matches!(status.status.code(), Some(0) | Some(3)) {
            return Err(format!("reproduce fig2 exited with {:?}", status.status.code()));
        }
    }
    let mut same = Vec::new();
    for name in ["fidelity.csv", "spectrum.csv"] {
        let a = std::fs::read(outs[0].join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(outs[1].join(name)).map_err(|e| e.to_string())?;
        same.push((name, a == b, a.len()));
    }
    let ok = same.iter().all(|(_, eq, _)| *eq);
    let detail: Vec<String> = same
        .iter()
        .map(|(n, eq, len)| format!("{n} {} ({len} bytes)", if *eq { "identical" } else { "differs" }))
        .collect();
    verdict(ok, detail.join(", "))
}

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let checks: Vec<Criterion> = vec![
        ("tangent-map frequencies", Box::new(criterion_1)),
        ("fast period T1", Box::new(|| criterion_2(d))),
        ("slow period T3", Box::new(|| criterion_3(d))),
        ("intermediate period T2", Box::new(|| criterion_4(d))),
        ("width-frequency mechanism", Box::new(|| criterion_5(d))),
        ("G(n) cross-check", Box::new(|| criterion_6(d))),
        ("Wigner consistency", Box::new(|| criterion_7(d))),
        ("analytic oracles", Box::new(criterion_8)),
        ("dynamics invariants", Box::new(|| criterion_9(d))),
        ("determinism", Box::new(|| criterion_10(d))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
