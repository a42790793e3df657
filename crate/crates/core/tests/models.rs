use cqfi_core::charop::{char_exact, char_closed, FD_STEP};
use cqfi_core::models::optomech::Optomech;
use cqfi_core::models::{h2, MODEL_NAMES};
use cqfi_core::qfi::{qfi_fd_oracle_pure, qfi_pure};
use cqfi_core::window::ExactWindow;
use cqfi_core::{ModelBundle, Params};

fn defaults() -> Vec<ModelBundle> {
    MODEL_NAMES
        .iter()
        .map(|n| ModelBundle::from_params(n, &Params::new()).unwrap())
        .collect()
}

#[test]
fn every_model_has_a_verified_structure() {
    for bundle in defaults() {
        for which in bundle.estimable() {
            let s = bundle.structure(which).unwrap();
            assert!(s.passes(), "{} {which}: {s:?}", bundle.name());
            let w = bundle.analytic_omega(which).unwrap();
            assert!((s.omega_sq - w * w).abs() <= 1e-10 * w * w, "{} {which}", bundle.name());
            let v = bundle.analytic_v(which).unwrap();
            assert!(s.window.relative_distance(s.v.matrix(), v.matrix()) <= 1e-10, "{}", bundle.name());
        }
    }
}

#[test]
fn three_routes_agree_on_defaults() {
    for bundle in defaults() {
        let which = bundle.default_param();
        let t = 2.3 / bundle.analytic_omega(which).unwrap();
        let b = bundle.char_routes(which, t).unwrap();
        let d = &b.deviations;
        assert!(d.series_closed.unwrap().rel <= 1e-9, "{}: {d:?}", bundle.name());
        assert!(d.series_exact.unwrap().rel <= 1e-6, "{}: {d:?}", bundle.name());
        assert!(d.closed_exact.unwrap().rel <= 1e-6, "{}: {d:?}", bundle.name());
    }
}

#[test]
fn reference_state_qfi_matches_fidelity_oracle() {
    for bundle in defaults().into_iter().filter(|b| b.name() != "optomech") {
        let which = bundle.default_param();
        let provider = bundle.provider(which).unwrap();
        let theta = bundle.get(which).unwrap();
        let t = 1.7;
        let h = char_exact(&provider, theta, t, FD_STEP).unwrap().op;
        let s = bundle.structure(which).unwrap();
        let closed = char_closed(&bundle.hamiltonian(), &bundle.dh(which).unwrap(), &s, t).unwrap();
        for (name, psi) in bundle.reference_states() {
            let f = qfi_pure(&psi, &closed).unwrap();
            let oracle = qfi_fd_oracle_pure(&provider, theta, t, &psi, FD_STEP).unwrap();
            assert!((f - oracle).abs() <= 1e-5 * (1.0 + f), "{} {name}: {f} vs {oracle}", bundle.name());
            assert!((f - qfi_pure(&psi, &h).unwrap()).abs() <= 1e-5 * (1.0 + f));
        }
    }
}

#[test]
fn h2_joint_estimation_is_compatible() {
    let (gamma, bp, bm, t) = (0.5, 0.3, 0.7, 4.0);
    let hp = h2::charop_plus(gamma, bp, t);
    let hm = h2::charop_minus(bm, t);
    let bundle = ModelBundle::from_params("h2", &Params::new()).unwrap();
    for (which, analytic) in [("Bp", &hp), ("Bm", &hm)] {
        let provider = bundle.provider(which).unwrap();
        let theta = bundle.get(which).unwrap();
        let exact = char_exact(&provider, theta, t, FD_STEP).unwrap().op;
        let w = ExactWindow::full(4);
        assert!(w.relative_distance(exact.matrix(), analytic.matrix()) <= 1e-6, "{which}");
    }
}

#[test]
fn optomech_sector_matches_two_mode_oracle() {
    for param in ["m", "l"] {
        let p = Optomech { ncut: 12, na: 2.0, ..Optomech::default() }.with_param(param).unwrap();
        let theta = p.theta();
        let na_cut = 4;
        let provider = |th: f64| Ok(p.at(th).full_hamiltonian(na_cut));
        let psi = p.full_state(na_cut).unwrap();
        let sector = ModelBundle::Optomech(p);
        let sp = sector.provider(param).unwrap();
        for t in [0.7, 2.0, 3.1] {
            let full = qfi_fd_oracle_pure(&provider, theta, t, &psi, FD_STEP).unwrap();
            let reduced = qfi_fd_oracle_pure(&sp, theta, t, &p.vacuum(), FD_STEP).unwrap();
            assert!((full - reduced).abs() <= 1e-8 * (1.0 + full), "{param} t={t}: {full} vs {reduced}");
        }
    }
}

#[test]
fn unknown_names_are_rejected() {
    assert!(ModelBundle::from_params("h9", &Params::new()).is_err());
    let mut p = Params::new();
    p.insert("Q".into(), 1.0);
    assert!(ModelBundle::from_params("h1", &p).is_err());
    assert!(ModelBundle::from_params("h3", &[("chi".to_string(), 0.0), ("B".to_string(), 0.0)].into()).is_err());
}
