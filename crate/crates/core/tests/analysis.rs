mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use gasflex::analysis::{
    compare_runs, default_flow_tolerance, linepack_profile, ramp_percent, verify_directions,
    AnalysisError,
};
use gasflex::formulation::{derive_big_m, FlowModel, FormulationConfig, Symbol};
use gasflex::horizon::solve_once;
use gasflex::solver::{HighsBackend, ScheduleSolution, SolveOptions, SolveStats, SolveStatus};

use common::shipped;

fn schedule(
    mode: FlowModel,
    hours: usize,
    values: Vec<(Symbol, Vec<Vec<f64>>)>,
) -> ScheduleSolution {
    ScheduleSolution {
        mode,
        status: SolveStatus::Optimal,
        objective: 0.0,
        hours,
        stats: SolveStats {
            backend: "test".into(),
            wall_seconds: 0.0,
            gap: None,
        },
        values: values.into_iter().collect::<BTreeMap<_, _>>(),
    }
}

fn linepack_only(h: Vec<f64>) -> ScheduleSolution {
    let hours = h.len();
    schedule(FlowModel::Unidirectional, hours, vec![(Symbol::H, vec![h])])
}

#[test]
fn constant_linepack_has_no_charge_or_discharge() {
    let sys = shipped("minimal.toml");
    let h0 = sys.gas.pipelines[0].initial_linepack;
    let p = linepack_profile(&linepack_only(vec![h0; 3]), &sys);
    assert_eq!((p.total_charge, p.total_discharge), (0.0, 0.0));
    assert!(p.pipelines[0].terminal_ok);
}

#[test]
fn charge_and_discharge_by_hand() {
    let sys = shipped("minimal.toml");
    let h0 = sys.gas.pipelines[0].initial_linepack;
    let p = linepack_profile(&linepack_only(vec![h0, h0 + 2.0, h0 + 1.0]), &sys);
    assert_eq!(p.pipelines[0].charge, vec![0.0, 2.0, 0.0]);
    assert_eq!(p.pipelines[0].discharge, vec![0.0, 0.0, 1.0]);
    assert_eq!((p.total_charge, p.total_discharge), (2.0, 1.0));
    assert!(p.pipelines[0].terminal_ok);
    let p = linepack_profile(&linepack_only(vec![h0, h0, h0 - 0.5]), &sys);
    assert!(!p.pipelines[0].terminal_ok);
}

proptest! {
    #[test]
    fn net_charge_telescopes(steps in prop::collection::vec(-10.0..10.0_f64, 3)) {
        let sys = shipped("minimal.toml");
        let h0 = sys.gas.pipelines[0].initial_linepack;
        let mut h = Vec::new();
        let mut level = h0;
        for s in steps {
            level += s;
            h.push(level);
        }
        let p = linepack_profile(&linepack_only(h.clone()), &sys);
        let net: f64 = p.pipelines[0].charge.iter().zip(&p.pipelines[0].discharge).map(|(c, d)| c - d).sum();
        prop_assert!((net - (h[2] - h0)).abs() <= 1e-12 * h0.max(1.0));
    }
}

#[test]
fn ramp_as_share_of_capacity() {
    let r = ramp_percent(&[31.0, 62.0], 100.0);
    assert_eq!(r, vec![31.0]);
}

fn opts() -> SolveOptions {
    SolveOptions {
        mip_gap: 1e-9,
        ..SolveOptions::default()
    }
}

#[test]
fn identical_schedules_save_nothing() {
    let sys = shipped("minimal.toml");
    let s = solve_once(
        &sys,
        FlowModel::Unidirectional,
        &FormulationConfig::default(),
        &opts(),
        &HighsBackend,
    )
    .unwrap();
    let r = compare_runs(&s, &s, &sys).unwrap();
    assert_eq!(r.savings_percent, 0.0);
    assert_eq!(r.uni.gfpp_share_percent, r.bi.gfpp_share_percent);
}

#[test]
fn schedules_of_another_system_are_rejected() {
    let sys = shipped("minimal.toml");
    let other = shipped("toy_reversal.toml");
    let s = solve_once(
        &other,
        FlowModel::Unidirectional,
        &FormulationConfig::default(),
        &opts(),
        &HighsBackend,
    )
    .unwrap();
    assert!(matches!(
        compare_runs(&s, &s, &sys),
        Err(AnalysisError::Mismatch(_))
    ));
}

#[test]
fn reversal_instance_compares_as_expected() {
    let sys = shipped("toy_reversal.toml");
    let cfg = FormulationConfig::default();
    let uni = solve_once(
        &sys,
        FlowModel::Unidirectional,
        &cfg,
        &opts(),
        &HighsBackend,
    )
    .unwrap();
    let bi = solve_once(&sys, FlowModel::Bidirectional, &cfg, &opts(), &HighsBackend).unwrap();
    let r = compare_runs(&uni, &bi, &sys).unwrap();
    assert!(r.savings_percent > 0.0);
    assert!(r.bi.gfpp_share_percent >= r.uni.gfpp_share_percent - 1e-9);
    let tol = default_flow_tolerance(&derive_big_m(&sys, cfg.pressure_resolution, cfg.big_m));
    assert!(verify_directions(&uni, &sys, &tol).changes.is_empty());
    assert!(!verify_directions(&bi, &sys, &tol).changes.is_empty());
}

#[test]
fn constant_direction_has_no_change_events() {
    let sys = shipped("toy_reversal.toml");
    let n = sys.hours;
    let s = schedule(
        FlowModel::Bidirectional,
        n,
        vec![
            (Symbol::Y, vec![vec![1.0; n]]),
            (Symbol::Q, vec![vec![0.0; n]]),
            (Symbol::Pr, vec![vec![50.0; n], vec![50.0; n]]),
        ],
    );
    let r = verify_directions(&s, &sys, &[1e-6]);
    assert!(r.changes.is_empty());
    assert!(r.all_consistent());
}

#[test]
fn tightened_day_schedules_are_consistent() {
    let sys = shipped("toy_day.toml");
    let cfg = FormulationConfig::default();
    let tol = default_flow_tolerance(&derive_big_m(&sys, cfg.pressure_resolution, cfg.big_m));
    for mode in [FlowModel::Unidirectional, FlowModel::Bidirectional] {
        let s = solve_once(&sys, mode, &cfg, &opts(), &HighsBackend).unwrap();
        let r = verify_directions(&s, &sys, &tol);
        assert_eq!(r.consistency_percent(), 100.0, "{mode}");
    }
}
