//! End-to-end acceptance checks, one line per criterion.
//!
//! `cargo test -p cqfi-cli --test acceptance -- --nocapture`

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use cqfi_core::altqfi::{
    alt_qfi_direct_oracle, alt_qfi_thermal, alt_qfi_unitary, gamma_series, gamma_thermal_closed, GAMMA_N_MAX,
};
use cqfi_core::audit::{full_audit, thermal_oracle};
use cqfi_core::charop::{char_closed, char_longtime, FD_STEP};
use cqfi_core::models::optomech::Optomech;
use cqfi_core::models::scan::{optimal_state_scan, random_state_scan, AmplitudeFamily, ScanGrid};
use cqfi_core::models::{h1, h2, h3, ModelBundle};
use cqfi_core::operator::{commutator, evolve, relative_distance};
use cqfi_core::qfi::{
    density_derivative, qfi_fd_oracle_mixed, qfi_fd_oracle_pure, qfi_mixed, qfi_pure, qfim_pure, sld_residual,
};
use cqfi_core::random::{random_pure, random_spectral, rng};
use cqfi_core::thermal::{qfi_thermal, sld_bernoulli_series, sld_thermal_closed, thermal_state, BERNOULLI_N_MAX};
use cqfi_core::{HermitianOperator, PureState, SpectralState};
use num_complex::Complex64;
use rand::Rng;

const SEED: u64 = 20_240_601;

/// Sub-checks of one criterion.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn within_time(&mut self, start: Instant, limit: Duration) {
        let spent = start.elapsed();
        self.check(spent < limit, || format!("runtime {spent:.2?} exceeds {limit:?}"));
    }
}

type Run = fn(&mut Tally) -> cqfi_core::Result<()>;

fn closed(bundle: &ModelBundle, which: &str, t: f64) -> cqfi_core::Result<HermitianOperator> {
    let s = bundle.structure(which)?;
    let dh = bundle.dh(which)?;
    if s.commuting {
        return Ok(dh.scaled(-t));
    }
    char_closed(&bundle.hamiltonian(), &dh, &s, t)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn random_model(name: &str, r: &mut impl Rng) -> cqfi_core::Result<(ModelBundle, &'static str)> {
    Ok(match name {
        "h1" => (ModelBundle::H1(h1::H1 { b: r.gen_range(0.1..3.0) }), "B"),
        "h2" => {
            let p = h2::H2 {
                gamma: r.gen_range(-2.0..2.0),
                bp: r.gen_range(0.1..3.0),
                bm: r.gen_range(0.1..3.0),
            };
            (ModelBundle::H2(p), if r.gen_bool(0.5) { "Bp" } else { "Bm" })
        }
        "h3" => (ModelBundle::H3(h3::H3::new(r.gen_range(0.2..3.0), r.gen_range(0.1..3.0))?), "B"),
        _ => {
            let which: &'static str = if r.gen_bool(0.5) { "m" } else { "l" };
            let p = Optomech {
                wa: r.gen_range(0.5..2.0),
                wb: r.gen_range(0.5..2.0),
                m: r.gen_range(0.5..2.0),
                l: r.gen_range(5.0..15.0),
                ncut: 64,
                ..Optomech::default()
            }
            .with_param(which)?;
            (ModelBundle::Optomech(p), which)
        }
    })
}

fn conservation(t: &mut Tally) -> cqfi_core::Result<()> {
    let start = Instant::now();
    let mut r = rng(SEED);
    let mut cases: Vec<(ModelBundle, &str)> = Vec::new();
    for b in linspace(0.1, 3.0, 31) {
        cases.push((ModelBundle::H1(h1::H1 { b }), "B"));
    }
    for _ in 0..8 {
        let (m, _) = random_model("h2", &mut r)?;
        cases.push((m.clone(), "Bp"));
        cases.push((m, "Bm"));
        cases.push((random_model("h3", &mut r)?.0, "B"));
    }
    for (param, wa, wb) in [("m", 1.0, 1.0), ("l", 1.0, 1.0), ("m", 1.5, 0.7), ("l", 0.6, 1.8)] {
        let p = Optomech { wa, wb, ..Optomech::default() }.with_param(param)?;
        cases.push((ModelBundle::Optomech(p), param));
    }
    for (bundle, which) in &cases {
        let s = bundle.structure(which)?;
        t.check(s.conservation_residual <= 1e-10, || {
            format!("{bundle:?} {which}: conservation {:.2e}", s.conservation_residual)
        });
        t.check(s.eigenop_residual <= 1e-10, || {
            format!("{bundle:?} {which}: eigenoperator {:.2e}", s.eigenop_residual)
        });
    }
    t.within_time(start, Duration::from_secs(1));
    t.note(format!("{} structures in {:.2?}", cases.len(), start.elapsed()));
    Ok(())
}

fn three_routes(t: &mut Tally) -> cqfi_core::Result<()> {
    let start = Instant::now();
    let mut r = rng(SEED + 1);
    let mut worst = [0.0f64; 3];
    for name in ["h1", "h2", "h3", "optomech"] {
        for _ in 0..20 {
            let (bundle, which) = random_model(name, &mut r)?;
            let omega = bundle.analytic_omega(which)?;
            let time = r.gen_range(0.0..25.0) / omega;
            let b = bundle.char_routes(which, time)?;
            let d = &b.deviations;
            let devs = [d.series_closed, d.series_exact, d.closed_exact].map(|x| x.map(|v| v.rel));
            for (k, (dev, tol)) in devs.iter().zip([1e-9, 1e-6, 1e-6]).enumerate() {
                let label = ["series/closed", "series/oracle", "closed/oracle"][k];
                t.check(dev.is_some_and(|v| v <= tol), || {
                    format!("{bundle:?} {which} t={time:.4}: {label} {dev:?}")
                });
                if let Some(v) = dev {
                    worst[k] = worst[k].max(*v);
                }
            }
        }
    }
    t.within_time(start, Duration::from_secs(5));
    t.note(format!(
        "worst series/closed {:.1e}, series/oracle {:.1e}, closed/oracle {:.1e} in {:.2?}",
        worst[0], worst[1], worst[2],
        start.elapsed()
    ));
    Ok(())
}

fn long_time(t: &mut Tally) -> cqfi_core::Result<()> {
    for b in [0.4, 0.8, 1.0, 10.0] {
        let bundle = ModelBundle::H1(h1::H1 { b });
        let s = bundle.structure("B")?;
        let omega = s.omega()?;
        for wt in [1e2, 1e3, 1e4] {
            let time = wt / omega;
            let h = closed(&bundle, "B", time)?;
            let lt = char_longtime(&s.v, omega, time)?;
            let dev = relative_distance(h.matrix(), lt.matrix());
            t.check(dev <= 3.0 / wt, || format!("B={b} Ωt={wt:e}: {dev:.3e} > {:.1e}", 3.0 / wt));
        }
    }
    // The envelope of the relative gap is 1/(BΩt), below 3/(Ωt) only for B ≥ 1/3.
    for b in [0.1, 0.3, 1.0, 10.0] {
        let bundle = ModelBundle::H1(h1::H1 { b });
        let s = bundle.structure("B")?;
        let omega = s.omega()?;
        for wt in [1e3, 1e4] {
            let peak = linspace(0.0, 2.0 * PI, 721)
                .into_iter()
                .map(|phase| {
                    let time = (wt + phase) / omega;
                    let h = closed(&bundle, "B", time)?;
                    let lt = char_longtime(&s.v, omega, time)?;
                    Ok(relative_distance(h.matrix(), lt.matrix()) * (wt + phase))
                })
                .collect::<cqfi_core::Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let expect = 1.0 / b;
            t.check((peak - expect).abs() <= 1e-2 * expect, || {
                format!("B={b} Ωt≈{wt:e}: Ωt·gap peaks at {peak:.6}, expected {expect:.6}")
            });
        }
    }
    t.note("Ωt·gap envelope equals 1/B");
    Ok(())
}

fn random_state_for(bundle: &ModelBundle, r: &mut impl Rng) -> PureState {
    match bundle {
        ModelBundle::Optomech(p) => p.coherent(Complex64::from_polar(r.gen_range(0.0..1.0), r.gen_range(0.0..2.0 * PI))),
        _ => random_pure(bundle.dim(), r),
    }
}

fn pure_qfi(t: &mut Tally) -> cqfi_core::Result<()> {
    let mut r = rng(SEED + 2);
    let names = ["h1", "h2", "h3", "optomech"];
    let mut worst = 0.0f64;
    for k in 0..50 {
        let (mut bundle, which) = random_model(names[k % 4], &mut r)?;
        if let ModelBundle::Optomech(p) = &bundle {
            bundle = ModelBundle::Optomech(p.with_ncut(24));
        }
        let time = r.gen_range(0.0..10.0);
        let psi = random_state_for(&bundle, &mut r);
        let f = qfi_pure(&psi, &closed(&bundle, which, time)?)?;
        let oracle = qfi_fd_oracle_pure(&bundle.provider(which)?, bundle.get(which)?, time, &psi, FD_STEP)?;
        let d = (f - oracle).abs();
        worst = worst.max(d / (1.0 + f));
        t.check(d <= 1e-5 * (1.0 + f), || format!("{} {which} t={time:.3}: {f} vs {oracle}", bundle.name()));
    }
    t.note(format!("50 draws, worst |ΔF|/(1+F) {worst:.1e}"));
    Ok(())
}

fn mixed_qfi(t: &mut Tally) -> cqfi_core::Result<()> {
    let bundles = [
        (ModelBundle::H1(h1::H1 { b: 0.7 }), "B"),
        (ModelBundle::H2(h2::H2 { gamma: 0.5, bp: 0.3, bm: 0.7 }), "Bp"),
        (ModelBundle::H2(h2::H2 { gamma: 0.5, bp: 0.3, bm: 0.7 }), "Bm"),
    ];
    for (bundle, which) in &bundles {
        for beta in [0.5, 1.0, 2.0] {
            let rho0 = thermal_state(&bundle.hamiltonian(), beta)?;
            for time in [0.6, 2.9] {
                let f = qfi_mixed(&rho0, &closed(bundle, which, time)?)?;
                let oracle = qfi_fd_oracle_mixed(&bundle.provider(which)?, bundle.get(which)?, time, &rho0, FD_STEP)?;
                t.check(rel(f, oracle) <= 1e-7, || {
                    format!("{} {which} β={beta} t={time}: {f} vs {oracle}", bundle.name())
                });
            }
        }
    }
    let mut r = rng(SEED + 3);
    for _ in 0..10 {
        let psi = random_pure(4, &mut r);
        let h = closed(&bundles[0].0, "B", r.gen_range(0.0..5.0))?;
        let (a, b) = (qfi_pure(&psi, &h)?, qfi_mixed(&psi.to_spectral(), &h)?);
        t.check((a - b).abs() <= 1e-12 * (1.0 + a), || format!("rank-1 reduction: {a} vs {b}"));
    }
    Ok(())
}

fn factor_audit(t: &mut Tally) -> cqfi_core::Result<()> {
    let out = scratch("audit.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_cqfi"))
        .args(["audit", "--out"])
        .arg(&out)
        .status()
        .expect("cqfi runs");
    t.check(status.success(), || format!("cqfi audit exited with {status}"));
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let required = ["h1_F_max", "h1_qfi_16_3", "h3_F_max", "optomech_peak", "optomech_F_m_max", "optomech_F_l_max"];
    for id in required {
        t.check(text.lines().any(|l| l.starts_with(id)), || format!("{id} missing from the audit artifact"));
    }
    for e in full_audit()?.iter().filter(|e| required.contains(&e.id)) {
        t.check(e.rows.len() == 10 && e.matches_expected(), || {
            format!(
                "{}: ratio {:.6} spread {:.1e} (expected 4, stable to 1e-6)",
                e.id,
                e.mean_ratio(),
                e.ratio_spread()
            )
        });
    }
    Ok(())
}

fn optimality(t: &mut Tally) -> cqfi_core::Result<()> {
    for b in [0.4, 0.8, 1.0, 10.0] {
        let h = char_longtime(&h1::analytic_v(b), h1::omega(b), 1.0)?;
        let scan = optimal_state_scan(&AmplitudeFamily::PSI, &h, &ScanGrid::default(), |r, p| {
            h1::longtime_residual(b, r, p)
        })?;
        t.check(scan.residual.abs() <= 1e-6, || format!("B={b}: residual {:.2e}", scan.residual));
        let random = random_state_scan(&h, 10_000, SEED + 4);
        let excess = (random.best - scan.qfi) / scan.qfi;
        t.check(excess <= 1e-6, || format!("B={b}: random state exceeds family max by {excess:.2e}"));
    }
    Ok(())
}

fn phi_opt(t: &mut Tally) -> cqfi_core::Result<()> {
    for b in [0.5, 1.0, 2.0] {
        let time = 1e4 / h1::omega(b);
        let phi = h1::phi_opt(b, time);
        t.check((phi - PI / 2.0).abs() <= 1e-3, || format!("B={b} Ωt=1e4: φ_opt {phi}"));
        for wt in [1e-3, 1e-4] {
            let time = wt / h1::omega(b);
            let slope = h1::phi_opt(b, time) / (b * time);
            t.check((slope - 4.0 / 3.0).abs() <= 1e-3, || format!("B={b} Ωt={wt:e}: φ_opt/(Bt) {slope}"));
        }
    }
    Ok(())
}

fn thermal_h1(t: &mut Tally) -> cqfi_core::Result<()> {
    let mut worst = 0.0f64;
    for temp in [0.5, 1.0, 1.5] {
        let beta = 1.0 / temp;
        for b in linspace(0.0, 3.0, 13) {
            let bundle = ModelBundle::H1(h1::H1 { b });
            let oracle = thermal_oracle(&bundle, "B", beta)?;
            let stated = h1::f_t_stated(b, beta);
            worst = worst.max(rel(stated, oracle));
            t.check(rel(stated, oracle) <= 1e-6, || format!("F_T B={b} T={temp}: stated {stated:.6e} oracle {oracle:.6e}"));
            let rho = thermal_state(&bundle.hamiltonian(), beta)?;
            let dense = h1::zz_expectation(&rho);
            let formula = h1::correlation_zz(b, beta);
            t.check((dense - formula).abs() <= 1e-10, || format!("⟨σzσz⟩ B={b} T={temp}: {formula} vs {dense}"));
        }
    }
    let low = thermal_oracle(&ModelBundle::H1(h1::H1 { b: 1.0 }), "B", 1.0 / 0.05)?;
    let stated = h1::f_t_lowt_stated(1.0, 0.05);
    t.check(rel(stated, low) <= 1e-3, || format!("low-T B=1 T=0.05: stated {stated:.6e} oracle {low:.6e}"));
    t.note(format!("worst F_T relative deviation {worst:.2e}"));
    Ok(())
}

fn thermal_h2_regimes(t: &mut Tally) -> cqfi_core::Result<()> {
    let temp = 0.05;
    let beta = 1.0 / temp;
    let cases: [(&str, f64, f64, f64); 3] =
        [("v+ < v-", 0.5, 0.2, 0.9), ("v+ > v-", 0.5, 0.9, 0.4), ("v+ = v-", 0.6, 0.8, 0.0)];
    for (label, gamma, bp, bm) in cases {
        let bm = if label == "v+ = v-" { ((gamma * gamma + 4.0 * bp * bp - 1.0) / 4.0).sqrt() } else { bm };
        let p = h2::H2 { gamma, bp, bm };
        let bundle = ModelBundle::H2(p);
        let (vp, vm) = (h2::v_plus(gamma, bp), h2::v_minus(bm));
        let rho = thermal_state(&bundle.hamiltonian(), beta)?;
        let mut f = [0.0; 2];
        for (k, which) in ["Bp", "Bm"].into_iter().enumerate() {
            let s = bundle.structure(which)?;
            f[k] = qfi_thermal(&bundle.dh(which)?, &s, beta, &rho)?;
        }
        let (sp, sm) = h2::f_t_lowt_stated(gamma, bp, bm, temp);
        if (vp - vm).abs() <= 1e-12 {
            t.check(rel(f[0], sp) <= 1e-3 && rel(f[1], sm) <= 1e-3, || {
                format!("{label}: F+ {:.6e} vs {sp:.6e}, F- {:.6e} vs {sm:.6e}", f[0], f[1])
            });
            continue;
        }
        let (small, large, stated) = if vp < vm { (f[0], f[1], sm) } else { (f[1], f[0], sp) };
        t.check(small / large <= 1e-6, || format!("{label}: suppressed ratio {:.2e}", small / large));
        t.check(rel(large, stated) <= 1e-3, || format!("{label}: dominant {large:.6e} vs stated {stated:.6e}"));
    }
    Ok(())
}

fn bernoulli(t: &mut Tally) -> cqfi_core::Result<()> {
    let bundles = [
        (ModelBundle::H1(h1::H1 { b: 1.0 }), "B"),
        (ModelBundle::H2(h2::H2 { gamma: 0.5, bp: 0.3, bm: 0.7 }), "Bp"),
        (ModelBundle::H3(h3::H3::new(1.2, 0.7)?), "B"),
    ];
    for (bundle, which) in &bundles {
        let h = bundle.hamiltonian();
        let dh = bundle.dh(which)?;
        let s = bundle.structure(which)?;
        let spread = cqfi_core::operator::spectral(&h)?.spread();
        for frac in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let beta = frac * 1.8 * PI / spread;
            let rho = thermal_state(&h, beta)?;
            let l = sld_thermal_closed(&dh, &s, beta, &rho)?;
            let label = format!("{} {which} β·spread={:.3}π", bundle.name(), beta * spread / PI);
            match sld_bernoulli_series(&h, &dh, beta, BERNOULLI_N_MAX) {
                Ok(series) => {
                    let d = relative_distance(series.l.matrix(), l.matrix());
                    t.check(d <= 1e-7, || format!("{label}: series vs closed {d:.2e}"));
                }
                Err(e) => t.check(false, || format!("{label}: {e}")),
            }
            let theta = bundle.get(which)?;
            let family = |th: f64| -> cqfi_core::Result<SpectralState> { thermal_state(&bundle.with(which, th)?.hamiltonian(), beta) };
            let drho = density_derivative(&family, theta, FD_STEP)?;
            let res = sld_residual(&rho.density(), &drho, &l);
            t.check(res <= 1e-7, || format!("{label}: SLD residual {res:.2e}"));
        }
    }
    Ok(())
}

fn optomech(t: &mut Tally) -> cqfi_core::Result<()> {
    for (param, wb) in [("m", 1.0), ("l", 1.7)] {
        let p = Optomech { wb, ..Optomech::default() }.with_param(param)?;
        let bundle = ModelBundle::Optomech(p);
        let vac = p.vacuum();
        let f = |time: f64| -> cqfi_core::Result<f64> { qfi_pure(&vac, &closed(&bundle, param, time)?) };
        let period = 2.0 * PI / wb;
        for k in 1..=3 {
            let peak_t = (k as f64 - 0.5) * period;
            let peak = f(peak_t)?;
            let zero = f(k as f64 * period)?;
            t.check(zero <= 1e-10 * peak, || format!("{param} k={k}: F(2kπ/ω_b) = {zero:.2e}, peak {peak:.3e}"));
            let grid = linspace((k - 1) as f64 * period, k as f64 * period, 201);
            let mut best = (f64::NEG_INFINITY, 0.0);
            for &time in &grid {
                let v = f(time)?;
                if v > best.0 {
                    best = (v, time);
                }
            }
            let step = period / 200.0;
            t.check((best.1 - peak_t).abs() <= step * 0.5 + 1e-12, || {
                format!("{param} k={k}: maximum at t={:.4}, expected {peak_t:.4}", best.1)
            });
        }
        let theta = p.theta();
        for na in 0..=3 {
            let q = Optomech { ncut: 12, na: na as f64, ..p };
            let na_cut = 4;
            let full = |th: f64| Ok(q.at(th).full_hamiltonian(na_cut));
            let psi = q.full_state(na_cut)?;
            let sector = ModelBundle::Optomech(q);
            for time in [0.9, 2.4] {
                let a = qfi_fd_oracle_pure(&full, theta, time, &psi, FD_STEP)?;
                let b = qfi_fd_oracle_pure(&sector.provider(param)?, theta, time, &q.vacuum(), FD_STEP)?;
                t.check((a - b).abs() <= 1e-8 * (1.0 + a), || format!("{param} n_a={na} t={time}: {a} vs {b}"));
            }
        }
        for time in [1.0, 3.0, 7.5] {
            let small = ModelBundle::Optomech(p.with_ncut(12));
            let large = ModelBundle::Optomech(p.with_ncut(16));
            let fs = qfi_pure(&p.with_ncut(12).vacuum(), &closed(&small, param, time)?)?;
            let fl = qfi_pure(&p.with_ncut(16).vacuum(), &closed(&large, param, time)?)?;
            t.check(rel(fs, fl) <= 1e-6, || format!("{param} t={time}: n_cut 12 vs 16: {fs} vs {fl}"));
        }
    }
    Ok(())
}

fn alternative_qfi(t: &mut Tally) -> cqfi_core::Result<()> {
    let mut r = rng(SEED + 5);
    for name in ["h1", "h2", "h3"] {
        for _ in 0..4 {
            let (bundle, which) = random_model(name, &mut r)?;
            let time = r.gen_range(0.1..5.0);
            let h = closed(&bundle, which, time)?;
            let rho0 = random_spectral(bundle.dim(), &mut r);
            let a = alt_qfi_unitary(&rho0, &h)?;
            t.check(a.discrepancy() <= 1e-9 * (1.0 + a.value()), || {
                format!("{name} forms: {} vs {}", a.trace_form, a.spectral_form)
            });
            let provider = bundle.provider(which)?;
            let family = |th: f64| -> cqfi_core::Result<SpectralState> { rho0.transformed(&evolve(&provider(th)?, time)?) };
            let oracle = alt_qfi_direct_oracle(&family, bundle.get(which)?, FD_STEP)?;
            t.check((a.value() - oracle.value).abs() <= 1e-5 * (1.0 + a.value()), || {
                format!("{name} unitary: {} vs oracle {}", a.value(), oracle.value)
            });
            let psi = random_pure(bundle.dim(), &mut r);
            let i = alt_qfi_unitary(&psi.to_spectral(), &h)?.value();
            let f = qfi_pure(&psi, &h)?;
            t.check((i - 2.0 * f).abs() <= 1e-9 * (1.0 + f), || format!("{name} pure: I {i} vs 2F {}", 2.0 * f));
        }
    }
    let thermal = [
        (ModelBundle::H1(h1::H1 { b: 0.5 }), "B"),
        (ModelBundle::H1(h1::H1 { b: 1.3 }), "B"),
        (ModelBundle::H2(h2::H2 { gamma: 0.5, bp: 0.3, bm: 0.7 }), "Bm"),
    ];
    for (bundle, which) in &thermal {
        let h = bundle.hamiltonian();
        let dh = bundle.dh(which)?;
        let s = bundle.structure(which)?;
        for beta in [0.5, 1.0, 2.0] {
            let value = alt_qfi_thermal(&h, &dh, &s, beta)?.value();
            let family = |th: f64| -> cqfi_core::Result<SpectralState> { thermal_state(&bundle.with(which, th)?.hamiltonian(), beta) };
            let oracle = alt_qfi_direct_oracle(&family, bundle.get(which)?, FD_STEP)?;
            t.check((value - oracle.value).abs() <= 1e-5 * (1.0 + value), || {
                format!("{} {which} β={beta}: thermal {value} vs oracle {}", bundle.name(), oracle.value)
            });
            if bundle.name() == "h1" {
                let closed = gamma_thermal_closed(&h, &dh, &s, beta)?;
                let series = gamma_series(&h.scaled(-beta), &dh.scaled(-beta), GAMMA_N_MAX)?;
                let d = series.distance(&closed) / closed.norm();
                t.check(d <= 1e-8, || format!("Γ series vs closed, {bundle:?} β={beta}: {d:.2e}"));
            }
        }
    }
    Ok(())
}

fn multiparameter(t: &mut Tally) -> cqfi_core::Result<()> {
    let mut r = rng(SEED + 6);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (gamma, bp, bm) = (r.gen_range(-2.0..2.0), r.gen_range(0.1..3.0), r.gen_range(0.1..3.0));
        let bundle = ModelBundle::H2(h2::H2 { gamma, bp, bm });
        let time = r.gen_range(0.1..10.0);
        let hp = closed(&bundle, "Bp", time)?;
        let hm = closed(&bundle, "Bm", time)?;
        let comm = commutator(&hp, &hm)?.norm() / (hp.norm() * hm.norm()).max(1e-300);
        t.check(comm <= 1e-10, || format!("[ℋ+, ℋ-] relative {comm:.2e}"));
        let psi = random_pure(4, &mut r);
        let m = qfim_pure(&psi, &[hp.clone(), hm.clone()])?;
        let stated = h2::offdiag_stated(&psi, &hp, &hm);
        let d = (m.get(0, 1) - 4.0 * stated).abs();
        worst = worst.max(d);
        t.check(d <= 1e-10 * (1.0 + m.get(0, 1).abs()), || {
            format!("F+- {} vs -4⟨ℋ+⟩⟨ℋ-⟩ {}", m.get(0, 1), 4.0 * stated)
        });
        let (a1, a2, phi) = (r.gen_range(0.1..2.0), r.gen_range(0.1..2.0), r.gen_range(0.0..2.0 * PI));
        let (b1, b2, chi) = (r.gen_range(0.1..2.0), r.gen_range(0.1..2.0), r.gen_range(0.0..2.0 * PI));
        let psi_opt = h1::psi_opt(a1, a2, phi);
        let phi_opt = h2::phi_opt_state(b1, b2, chi);
        for (label, state) in [("ψ_opt", &psi_opt), ("Φ_opt", &phi_opt)] {
            let off = qfim_pure(state, &[hp.clone(), hm.clone()])?.get(0, 1);
            t.check(off.abs() <= 1e-12 * (1.0 + hp.norm() * hm.norm()), || format!("F+- on {label}: {off:.2e}"));
        }
        let overlap = psi_opt.inner(&phi_opt).norm();
        t.check(overlap == 0.0, || format!("⟨ψ_opt|Φ_opt⟩ = {overlap:.2e}"));
    }
    let audit = full_audit()?;
    let entry = audit.iter().find(|e| e.id == "h2_offdiag");
    t.check(entry.is_some_and(|e| e.matches_expected()), || {
        format!("off-diagonal prefactor audit: {:?}", entry.map(|e| e.mean_ratio()))
    });
    t.note(format!("prefactor 4, worst |ΔF+-| {worst:.1e}"));
    Ok(())
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).expect("scratch directory");
    dir.join(name)
}

fn run_cli(args: &[&str], workers: &str, out: &PathBuf) -> bool {
    Command::new(env!("CARGO_BIN_EXE_cqfi"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("CQFI_WORKERS", workers)
        .status()
        .is_ok_and(|s| s.success())
}

fn determinism(t: &mut Tally) -> cqfi_core::Result<()> {
    let commands: [&[&str]; 3] = [
        &["sweep", "h1", "--optimal-points", "--B", "0.4,0.8,1.0,10", "--seed", "11"],
        &["qfi", "h2", "--random", "6", "--seed", "11", "--t", "0.5,1.5"],
        &["thermal", "h1", "--B", "0:3:16", "--T", "0.5,1.0"],
    ];
    for (k, args) in commands.iter().enumerate() {
        let paths: Vec<PathBuf> = ["a", "b", "c"].iter().map(|s| scratch(&format!("det{k}{s}.csv"))).collect();
        let ran = run_cli(args, "1", &paths[0]) && run_cli(args, "1", &paths[1]) && run_cli(args, "4", &paths[2]);
        t.check(ran, || format!("cqfi {} failed to run", args.join(" ")));
        let bytes: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap_or_default()).collect();
        t.check(!bytes[0].is_empty() && bytes[0] == bytes[1], || format!("cqfi {}: reruns differ", args.join(" ")));
        t.check(bytes[0] == bytes[2], || format!("cqfi {}: serial and parallel differ", args.join(" ")));
    }
    Ok(())
}

const CRITERIA: [(&str, Run); 15] = [
    ("conservation", conservation),
    ("three-way characteristic operator", three_routes),
    ("long-time limit", long_time),
    ("pure-state QFI vs oracle", pure_qfi),
    ("mixed-state QFI vs SLD oracle", mixed_qfi),
    ("factor audit", factor_audit),
    ("optimality loci", optimality),
    ("phi_opt limits", phi_opt),
    ("thermal H1", thermal_h1),
    ("thermal H2 regimes", thermal_h2_regimes),
    ("SLD series vs closed form", bernoulli),
    ("optomechanics", optomech),
    ("alternative QFI", alternative_qfi),
    ("multiparameter H2", multiparameter),
    ("determinism", determinism),
];

#[test]
fn acceptance() {
    let start = Instant::now();
    let mut failed = Vec::new();
    for (k, (name, run)) in CRITERIA.iter().enumerate() {
        let id = k + 1;
        let mut tally = Tally::default();
        if let Err(e) = run(&mut tally) {
            tally.failures.push(format!("error: {e}"));
        }
        let verdict = if tally.failures.is_empty() { "PASS" } else { "FAIL" };
        let detail = if tally.failures.is_empty() {
            tally.notes.join("; ")
        } else {
            let shown: Vec<&str> = tally.failures.iter().take(3).map(String::as_str).collect();
            format!("{}/{} sub-checks failed: {}", tally.failures.len(), tally.checks, shown.join(" | "))
        };
        println!("{verdict} {id:>2} {name}: {} checks{}{detail}", tally.checks, if detail.is_empty() { "" } else { "; " });
        if verdict == "FAIL" {
            failed.push(id);
        }
    }
    println!("total {:.2?}", start.elapsed());
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
