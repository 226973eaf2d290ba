use dacqo::counterdiabatic::Schedule;
use dacqo::hardware::*;
use dacqo::problem::*;
use dacqo::synthesis::{synthesize_digital_baseline, synthesize_homogeneous, DepthReport, LayerModel};

#[test]
fn spec_json_uses_microseconds() {
    let s = HardwareSpec::default();
    let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
    assert_eq!(v["t_M_us"], 930.0);
    assert_eq!(v["t_S_us"], 130.0);
    assert_eq!(v["coherence_s"], 1.0);
    assert_eq!(v["max_block"], 4);
    let back = HardwareSpec::from_json(&s.to_json()).unwrap();
    assert!((back.t_multi - s.t_multi).abs() < 1e-18);
    assert!(HardwareSpec::from_json(r#"{"t_M_us": -1, "t_S_us": 1, "coherence_s": 1, "max_block": 4}"#).is_err());
    assert!(HardwareSpec::from_json(r#"{"t_M_us": 1, "t_S_us": 1, "coherence_s": 1, "max_block": 1}"#).is_err());
    assert!(HardwareSpec::new(1e-3, 0.0, 1.0, 4).is_err());
}

#[test]
fn runtime_arithmetic() {
    let s = HardwareSpec::default();
    assert!((s.runtime(2.0, 3.0) - (2.0 * 930e-6 + 3.0 * 130e-6)).abs() < 1e-15);
    let r = circuit_runtime(&DepthReport::new(1000, 1000, 0.0), &s);
    assert!((r.runtime_seconds - 1.06).abs() < 1e-12);
    assert!(!r.within_coherence);
    let d = circuit_runtime(&DepthReport::new(10, 10, 0.0), &s);
    assert!(d.within_coherence);
    let ratio = d.against(&r).enhancement_factor.unwrap();
    assert!((ratio - 100.0).abs() < 1e-9);
    let m = LayerModel { multiqubit: 3.0, single_qubit: 5.0 };
    assert!((s.model_runtime(&m, 4) - 4.0 * s.runtime(3.0, 5.0)).abs() < 1e-15);
}

#[test]
fn synthesized_runtime_matches_model_for_large_n() {
    let s = HardwareSpec::default();
    let sched = Schedule::standard(1.0, 2).unwrap();
    for n in [8, 12, 16] {
        let p = IsingProblem::homogeneous(n, -1.0, 0.5).unwrap();
        let c = synthesize_digital_baseline(&p, &sched).unwrap();
        let got = circuit_runtime(&c.depth_report(), &s).runtime_seconds;
        assert!((got - s.model_runtime(&LayerModel::digital(n), 2)).abs() < 1e-12);
        // The model is fractional; a circuit can only round its layer count up.
        let c = synthesize_homogeneous(&p, &sched, 4).unwrap();
        let m = LayerModel::homogeneous(n, 4);
        let per_step = c.step_depth(0);
        assert!(per_step.multiqubit_layers as f64 <= m.multiqubit.ceil());
        assert!(per_step.single_qubit_layers as f64 <= m.single_qubit);
    }
}

#[test]
fn daqc_beats_digital_for_homogeneous_problems() {
    let s = HardwareSpec::default();
    for n in (8..=100).step_by(4) {
        let digital = s.model_runtime(&LayerModel::digital(n), 2);
        let daqc = s.model_runtime(&LayerModel::homogeneous(n, 4), 2);
        assert!(daqc < digital, "N = {n}");
    }
}

#[test]
fn runtime_at_one_hundred_qubits_with_ten_steps() {
    // The reported 1.8 s and 2.8 s figures are reached at ten Trotter steps.
    let s = HardwareSpec::default();
    let digital = s.model_runtime(&LayerModel::digital(100), 10);
    let daqc = s.model_runtime(&LayerModel::homogeneous(100, 4), 10);
    assert!((digital / 2.8 - 1.0).abs() < 0.15, "digital {digital}");
    assert!((daqc / 1.8 - 1.0).abs() < 0.15, "daqc {daqc}");
}

#[test]
fn enhancement_for_unweighted_mis() {
    let g = Graph::random(16, 0.3, 7, InstanceClass::Homogeneous).unwrap();
    let p = mis_to_ising(&g, g.default_penalty()).unwrap();
    let sched = Schedule::standard(1.0, 2).unwrap();
    let e = enhancement_factor(&p, &sched, &HardwareSpec::default(), &[2, 4]).unwrap();
    assert_eq!(e.len(), 2);
    assert!(e[0].ratio >= 1.5, "k = 2 ratio {}", e[0].ratio);
    assert_eq!(e[0].digital, e[1].digital);
    assert!(enhancement_factor(&p, &sched, &HardwareSpec::default(), &[7]).is_err());
}

#[test]
fn large_blocks_hurt_nonuniform_instances() {
    let p = random_spin_glass(12, 5, InstanceClass::FullyNonuniform).unwrap();
    let sched = Schedule::standard(1.0, 2).unwrap();
    let e = enhancement_factor(&p, &sched, &HardwareSpec::default(), &[4, 6]).unwrap();
    assert!(e[1].ratio < e[0].ratio, "k=6 {} vs k=4 {}", e[1].ratio, e[0].ratio);
}
