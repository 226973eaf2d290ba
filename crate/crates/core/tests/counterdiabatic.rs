use dacqo::counterdiabatic::*;
use dacqo::linalg::{self, DenseOperator};
use dacqo::pauli::{Pauli, PauliString};
use dacqo::problem::*;
use dacqo::Error;
use num_complex::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn schedule_boundaries_and_monotonicity() {
    for profile in [ScheduleProfile::Sin2Sin2, ScheduleProfile::LinearSmoothstep] {
        let s = Schedule::new(2.5, 4, profile).unwrap();
        assert_eq!(s.lambda(0.0), 0.0);
        assert_eq!(s.lambda(2.5), 1.0);
        assert_eq!(s.lambda_dot(0.0), 0.0);
        assert!(s.lambda_dot(2.5).abs() < 1e-12);
        let mut prev = 0.0;
        for i in 0..=2000 {
            let l = s.lambda(2.5 * f64::from(i) / 2000.0);
            assert!(l >= prev - 1e-15 && (0.0..=1.0).contains(&l));
            prev = l;
        }
    }
}

#[test]
fn lambda_dot_matches_finite_difference() {
    for profile in [ScheduleProfile::Sin2Sin2, ScheduleProfile::LinearSmoothstep] {
        let s = Schedule::new(1.7, 3, profile).unwrap();
        let eps = 1e-6;
        for i in 1..20 {
            let t = 1.7 * f64::from(i) / 20.0;
            let fd = (s.lambda(t + eps) - s.lambda(t - eps)) / (2.0 * eps);
            assert!((fd - s.lambda_dot(t)).abs() < 1e-7, "{profile:?} t={t}");
        }
    }
}

#[test]
fn schedule_midpoints_and_validation() {
    let s = Schedule::standard(1.0, 10).unwrap();
    assert!((s.step_duration() - 0.1).abs() < 1e-15);
    assert!((s.midpoint(1).unwrap() - 0.05).abs() < 1e-15);
    assert!((s.midpoint(10).unwrap() - 0.95).abs() < 1e-15);
    assert!(s.midpoint(0).is_err());
    assert!(s.midpoint(11).is_err());
    assert!(Schedule::standard(0.0, 1).is_err());
    assert!(Schedule::standard(1.0, 0).is_err());
    let doc: Schedule = serde_json::from_str(r#"{"T": 2, "steps": 3, "profile": "linear-smoothstep"}"#).unwrap();
    assert_eq!(doc, Schedule::new(2.0, 3, ScheduleProfile::LinearSmoothstep).unwrap());
    let doc: Schedule = serde_json::from_str(r#"{"T": 2, "steps": 3}"#).unwrap();
    assert_eq!(doc.profile(), ScheduleProfile::Sin2Sin2);
}

#[test]
fn adiabatic_hamiltonian_examples() {
    let p = random_spin_glass(3, 2, InstanceClass::FullyNonuniform).unwrap();
    let h0 = adiabatic_hamiltonian(&p, 0.0).unwrap();
    let mut sx = DenseOperator::zeros(8, 8);
    for q in 0..3 {
        sx += PauliString::single(3, q, Pauli::X).dense();
    }
    assert!(linalg::max_abs(&(h0 - sx)) < 1e-15);

    let h1 = adiabatic_hamiltonian(&p, 1.0).unwrap();
    for x in 0..8 {
        for y in 0..8 {
            let want = if x == y { p.energy_of_index(x) } else { 0.0 };
            assert!((h1[(x, y)] - c(want)).norm() < 1e-14);
        }
    }

    let p = IsingProblem::new(1, [], vec![1.0]).unwrap();
    let h = adiabatic_hamiltonian(&p, 0.5).unwrap();
    let ev = h.map(|z| z.re).symmetric_eigenvalues();
    let mut ev: Vec<f64> = ev.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    assert!((ev[0] + 0.5f64.sqrt()).abs() < 1e-14);
    assert!((ev[1] - 0.5f64.sqrt()).abs() < 1e-14);
    assert!(adiabatic_hamiltonian(&p, 1.5).is_err());
}

#[test]
fn alpha1_single_spin_examples() {
    let p = IsingProblem::new(1, [], vec![1.0]).unwrap();
    assert!((alpha1_analytic(&p, 0.5).unwrap() + 0.5).abs() < 1e-15);
    assert!((alpha1_analytic(&p, 0.0).unwrap() + 0.25).abs() < 1e-15);
    assert!((alpha1_oracle(&p, 0.5).unwrap() + 0.5).abs() < 1e-12);
}

#[test]
fn alpha1_homogeneous_pair() {
    let p = IsingProblem::homogeneous(2, 1.0, 1.0).unwrap();
    let a = alpha1_analytic(&p, 0.0).unwrap();
    let o = alpha1_oracle(&p, 0.0).unwrap();
    assert!((a - o).abs() < 1e-10, "{a} vs {o}");
}

#[test]
fn alpha1_matches_oracle_on_random_instances() {
    let mut count = 0;
    for seed in 0..50u64 {
        let n = 1 + (seed as usize % 6);
        let class = InstanceClass::ALL[seed as usize % 3];
        let p = random_spin_glass(n, seed, class).unwrap();
        for i in 0..=10 {
            let l = f64::from(i) / 10.0;
            let a = alpha1_analytic(&p, l).unwrap();
            let o = alpha1_oracle(&p, l).unwrap();
            assert!((a - o).abs() < 1e-9, "seed {seed} λ {l}: {a} vs {o}");
            assert!(a < 0.0);
            count += 1;
        }
    }
    assert_eq!(count, 550);
}

#[test]
fn alpha1_handles_sparse_couplings() {
    // Partially connected graphs exercise the vertex-sharing edge products.
    for seed in 0..10 {
        let g = Graph::random(6, 0.5, seed, InstanceClass::FullyNonuniform).unwrap();
        let p = mis_to_ising(&g, g.default_penalty()).unwrap();
        for l in [0.2, 0.7] {
            let a = alpha1_analytic(&p, l).unwrap();
            let o = alpha1_oracle(&p, l).unwrap();
            assert!((a - o).abs() < 1e-9 * a.abs().max(1.0));
        }
    }
}

#[test]
fn gamma_closed_forms_match_traces() {
    for seed in 0..20u64 {
        let n = 1 + (seed as usize % 6);
        let p = random_spin_glass(n, seed, InstanceClass::FullyNonuniform).unwrap();
        for l in [0.0, 0.35, 1.0] {
            let norms = commutator_norms(&p, l).unwrap();
            let g1 = gamma1_closed_form(&p);
            let g2 = gamma2_closed_form(&p, l);
            assert!((norms.gamma1 - g1).abs() < 1e-9 * g1.max(1.0));
            assert!((norms.gamma2 - g2).abs() < 1e-9 * g2.max(1.0));
        }
    }
}

#[test]
fn zero_problem_is_singular() {
    let p = IsingProblem::new(3, [], vec![0.0; 3]).unwrap();
    assert!(matches!(alpha1_analytic(&p, 0.5), Err(Error::Singularity(_))));
    // The CD operator itself vanishes, so the generator is zero without evaluating α₁.
    let g = cd_generator(&p, 0.5).unwrap();
    assert_eq!(linalg::max_abs(&g), 0.0);
    let s = Schedule::standard(1.0, 2).unwrap();
    assert_eq!(InstantCoefficients::at(&p, &s, 0.3).unwrap().alpha1, 0.0);
}

#[test]
fn cd_generator_structure() {
    let p = IsingProblem::new(2, [((0, 1), 1.0)], vec![0.0, 0.0]).unwrap();
    let g = cd_generator(&p, 0.4).unwrap();
    let yz = PauliString::parse("YZ").unwrap().dense() + PauliString::parse("ZY").unwrap().dense();
    let alpha = alpha1_analytic(&p, 0.4).unwrap();
    assert!(linalg::max_abs(&(g - yz * c(2.0 * alpha))) < 1e-14);
}

#[test]
fn first_commutator_is_proportional_to_cd_operator() {
    for seed in 0..6 {
        let p = random_spin_glass(4, seed, InstanceClass::FullyNonuniform).unwrap();
        let o1 = first_commutator(&p, 0.6).unwrap();
        let expected = cd_operator(&p).dense(4) * Complex64::new(0.0, -2.0);
        let rel = (&o1 - &expected).norm() / expected.norm();
        assert!(rel < 1e-9, "relative deviation {rel}");
        let g = cd_generator(&p, 0.6).unwrap();
        let alpha = alpha1_analytic(&p, 0.6).unwrap();
        // A⁽¹⁾ = α₁·i·O₁.
        let rel = (&g - &o1 * Complex64::new(0.0, alpha)).norm() / g.norm();
        assert!(rel < 1e-9);
    }
}

#[test]
fn rotated_frame_is_hadamard_conjugate() {
    for (n, seed) in [(1, 0), (2, 1), (3, 2), (4, 3), (6, 4)] {
        let p = random_spin_glass(n, seed, InstanceClass::FullyNonuniform).unwrap();
        let s = Schedule::standard(1.3, 5).unwrap();
        let had = hadamard_all(n);
        for t in [0.0, 0.2, 0.65, 1.1, 1.3] {
            let rotated = rotated_full_hamiltonian(&p, &s, t).unwrap();
            let original = full_hamiltonian(&p, &s, t).unwrap();
            let conj = &had * original * &had;
            assert!(linalg::max_abs(&(rotated.clone() - conj)) < 1e-10);
            assert!(linalg::hermiticity_error(&rotated) < 1e-12);
        }
    }
}

#[test]
fn rotated_hamiltonian_boundaries() {
    let p = random_spin_glass(3, 5, InstanceClass::Mixed).unwrap();
    let s = Schedule::standard(2.0, 4).unwrap();
    let mut sz = DenseOperator::zeros(8, 8);
    for q in 0..3 {
        sz += PauliString::single(3, q, Pauli::Z).dense();
    }
    assert!(linalg::max_abs(&(rotated_full_hamiltonian(&p, &s, 0.0).unwrap() - sz)) < 1e-14);
    let end = rotated_full_hamiltonian(&p, &s, 2.0).unwrap();
    let had = hadamard_all(3);
    let diag = &had * end * &had;
    for x in 0..8 {
        for y in 0..8 {
            let want = if x == y { p.energy_of_index(x) } else { 0.0 };
            assert!((diag[(x, y)] - c(want)).norm() < 1e-10);
        }
    }
}

#[test]
fn exact_evolution_properties() {
    let p = IsingProblem::homogeneous(2, 1.0, 0.5).unwrap();
    let s = Schedule::standard(1.0, 1).unwrap();
    let mut prev: Option<DenseOperator> = None;
    let mut prev_gap = f64::INFINITY;
    for steps in [50, 100, 200, 400] {
        let u = exact_evolution(&p, &s, steps).unwrap();
        assert!(linalg::unitarity_error(&u) < 1e-9);
        if let Some(v) = &prev {
            let gap = linalg::phase_invariant_distance(&u, v).unwrap();
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        prev = Some(u);
    }
    let a = exact_evolution(&p, &s, 2000).unwrap();
    let b = exact_evolution(&p, &s, 4000).unwrap();
    assert!(linalg::phase_invariant_distance(&a, &b).unwrap() < 1e-5);

    let zero = IsingProblem::new(2, [], vec![0.0; 2]).unwrap();
    let u = exact_evolution(&zero, &s, 7).unwrap();
    for x in 0..4 {
        for y in 0..4 {
            if x != y {
                assert!(u[(x, y)].norm() < 1e-14);
            }
        }
    }
    assert!(matches!(exact_evolution(&IsingProblem::new(11, [], vec![0.0; 11]).unwrap(), &s, 1), Err(Error::Capability(_))));
}

#[test]
fn oracle_cap() {
    let p = IsingProblem::new(9, [], vec![1.0; 9]).unwrap();
    assert!(matches!(alpha1_oracle(&p, 0.5), Err(Error::Capability(_))));
}
