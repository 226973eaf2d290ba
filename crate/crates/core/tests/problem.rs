use dacqo::counterdiabatic::problem_hamiltonian;
use dacqo::problem::*;
use dacqo::{Error, Execution};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn classical_energy_examples() {
    let p = IsingProblem::new(2, [((0, 1), 1.0)], vec![0.0, 0.0]).unwrap();
    assert_eq!(p.classical_energy(&[1, 1]).unwrap(), 1.0);

    let p = IsingProblem::new(1, [], vec![-2.0]).unwrap();
    assert_eq!(p.classical_energy(&[1]).unwrap(), -2.0);

    let p = IsingProblem::homogeneous(3, 1.0, 1.0).unwrap();
    assert_eq!(p.classical_energy(&[-1, -1, 1]).unwrap(), -2.0);
}

#[test]
fn classical_energy_rejects_bad_spins() {
    let p = IsingProblem::homogeneous(3, 1.0, 1.0).unwrap();
    assert!(matches!(p.classical_energy(&[1, 1]), Err(Error::Argument(_))));
    assert!(matches!(p.classical_energy(&[1, 0, 1]), Err(Error::Argument(_))));
}

#[test]
fn construction_validates_indices() {
    assert!(IsingProblem::new(2, [((0, 0), 1.0)], vec![0.0; 2]).is_err());
    assert!(IsingProblem::new(2, [((0, 2), 1.0)], vec![0.0; 2]).is_err());
    assert!(IsingProblem::new(2, [((0, 1), 1.0), ((1, 0), 2.0)], vec![0.0; 2]).is_err());
    assert!(IsingProblem::new(2, [], vec![0.0]).is_err());
    assert!(IsingProblem::new(0, [], vec![]).is_err());
    // Reversed pairs are normalized.
    let p = IsingProblem::new(3, [((2, 0), 0.5)], vec![0.0; 3]).unwrap();
    assert_eq!(p.coupling(0, 2), 0.5);
    assert_eq!(p.coupling(2, 0), 0.5);
    assert!(p.couplings().contains_key(&(0, 2)));
}

#[test]
fn homogeneity_flag() {
    assert!(IsingProblem::homogeneous(4, 0.3, -0.2).unwrap().is_homogeneous());
    let p = IsingProblem::new(3, [((0, 1), 1.0), ((1, 2), 1.0)], vec![0.5; 3]).unwrap();
    assert!(p.is_homogeneous());
    assert!(!p.is_complete());
    let p = IsingProblem::new(3, [((0, 1), 1.0), ((1, 2), 2.0)], vec![0.5; 3]).unwrap();
    assert!(!p.is_homogeneous());
    let p = IsingProblem::new(2, [((0, 1), 1.0)], vec![0.5, 0.4]).unwrap();
    assert!(!p.is_homogeneous());
}

#[test]
fn energies_match_dense_diagonal() {
    for seed in 0..5 {
        for n in 1..=6 {
            let p = random_spin_glass(n, seed, InstanceClass::FullyNonuniform).unwrap();
            let h = problem_hamiltonian(&p).unwrap();
            for x in 0..1usize << n {
                let e = p.classical_energy(&spins_of_index(x, n)).unwrap();
                assert!(close(h[(x, x)].re, e, 1e-12), "n={n} x={x}");
                assert!(close(p.energy_of_index(x), e, 1e-12));
            }
        }
    }
}

#[test]
fn index_and_spin_round_trip() {
    for x in 0..32 {
        assert_eq!(index_of_spins(&spins_of_index(x, 5)), x);
    }
    // Qubit 0 is the most significant bit; bit 0 is spin +1.
    assert_eq!(spins_of_index(0b100, 3), vec![-1, 1, 1]);
    assert_eq!(spin_label(&[1, -1, -1]), "+--");
}

#[test]
fn brute_force_examples() {
    let p = IsingProblem::new(2, [((0, 1), 1.0)], vec![0.0, 0.0]).unwrap();
    let g = brute_force_ground_state(&p).unwrap();
    assert_eq!(g.energy, -1.0);
    assert_eq!(g.bitstrings, vec![vec![1, -1], vec![-1, 1]]);

    let p = IsingProblem::new(1, [], vec![-2.0]).unwrap();
    let g = brute_force_ground_state(&p).unwrap();
    assert_eq!(g.energy, -2.0);
    assert_eq!(g.bitstrings, vec![vec![1]]);
    assert_eq!(g.degeneracy(), 1);
}

#[test]
fn brute_force_matches_minimum_eigenvalue() {
    for seed in 0..4 {
        for n in [2, 4, 6, 8] {
            let p = random_spin_glass(n, seed, InstanceClass::Mixed).unwrap();
            let g = brute_force_ground_state(&p).unwrap();
            let h = problem_hamiltonian(&p).unwrap();
            let min = (0..h.nrows()).map(|i| h[(i, i)].re).fold(f64::INFINITY, f64::min);
            let eig = h.map(|z| z.re).symmetric_eigenvalues().min();
            assert!(close(g.energy, min, 1e-10));
            assert!(close(g.energy, eig, 1e-10));
        }
    }
}

#[test]
fn brute_force_lists_every_optimum_and_nothing_lower() {
    for seed in 0..10 {
        let p = random_spin_glass(5, seed, InstanceClass::Mixed).unwrap();
        let g = brute_force_ground_state(&p).unwrap();
        let indices = g.indices();
        for x in 0..32 {
            let e = p.energy_of_index(x);
            assert!(e >= g.energy - 1e-9);
            assert_eq!(indices.contains(&x), close(e, g.energy, 1e-9));
        }
    }
}

#[test]
fn brute_force_independent_of_execution_mode() {
    for seed in 0..3 {
        let p = random_spin_glass(14, seed, InstanceClass::Mixed).unwrap();
        let a = brute_force_ground_state_with(&p, Execution::Sequential).unwrap();
        let b = brute_force_ground_state_with(&p, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn brute_force_cap() {
    let p = IsingProblem::new(25, [], vec![1.0; 25]).unwrap();
    assert!(matches!(brute_force_ground_state(&p), Err(Error::Capability(_))));
}

fn exhaustive_mis(g: &Graph) -> f64 {
    let n = g.n_nodes();
    (0..1usize << n)
        .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| g.is_independent(s))
        .map(|s| g.set_weight(&s))
        .fold(0.0, f64::max)
}

#[test]
fn mis_examples() {
    let g = Graph::new(2, [(0, 1)], vec![1.0, 1.0]).unwrap();
    let p = mis_to_ising(&g, 2.0).unwrap();
    let t = brute_force_ground_state(&p).unwrap();
    for s in &t.bitstrings {
        assert_eq!(selection_of_spins(s).iter().filter(|&&x| x).count(), 1);
    }

    let g = Graph::new(3, [], vec![1.0; 3]).unwrap();
    let t = brute_force_ground_state(&mis_to_ising(&g, 2.0).unwrap()).unwrap();
    assert_eq!(t.bitstrings, vec![vec![-1, -1, -1]]);

    let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)], vec![1.0; 3]).unwrap();
    let p = mis_to_ising(&g, 2.0).unwrap();
    let t = brute_force_ground_state(&p).unwrap();
    assert_eq!(t.degeneracy(), 3);
    for s in &t.bitstrings {
        let sel = selection_of_spins(s);
        assert_eq!(sel.iter().filter(|&&x| x).count(), 1);
        // The stored offset makes the objective equal to minus the set weight.
        assert!(close(p.objective(s).unwrap(), -1.0, 1e-12));
    }
}

#[test]
fn mis_penalty_must_exceed_weights() {
    let g = Graph::new(2, [(0, 1)], vec![1.0, 3.0]).unwrap();
    assert!(matches!(mis_to_ising(&g, 2.0), Err(Error::Argument(_))));
    assert!(mis_to_ising(&g, g.default_penalty()).is_ok());
    assert_eq!(g.default_penalty(), 6.0);
}

#[test]
fn mis_ground_truth_matches_exhaustive_search() {
    for seed in 0..12 {
        for class in InstanceClass::ALL {
            let n = 4 + (seed as usize % 9);
            let g = Graph::random(n, 0.35, seed, class).unwrap();
            let p = mis_to_ising(&g, g.default_penalty()).unwrap();
            let t = brute_force_ground_state(&p).unwrap();
            let best = exhaustive_mis(&g);
            for s in &t.bitstrings {
                let sel = selection_of_spins(s);
                assert!(g.is_independent(&sel));
                assert!(close(g.set_weight(&sel), best, 1e-9));
                assert!(close(p.objective(s).unwrap(), -best, 1e-9));
            }
        }
    }
}

#[test]
fn graph_validation() {
    assert!(Graph::new(2, [(0, 0)], vec![1.0; 2]).is_err());
    assert!(Graph::new(2, [(0, 1)], vec![1.0]).is_err());
    assert!(Graph::new(2, [(0, 1)], vec![1.0, -1.0]).is_err());
    assert!(Graph::new(2, [(0, 3)], vec![1.0; 2]).is_err());
}

#[test]
fn spin_glass_classes() {
    assert!(random_spin_glass(4, 9, InstanceClass::Homogeneous).unwrap().is_homogeneous());
    let a = random_spin_glass(4, 3, InstanceClass::FullyNonuniform).unwrap();
    let b = random_spin_glass(4, 3, InstanceClass::FullyNonuniform).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, random_spin_glass(4, 4, InstanceClass::FullyNonuniform).unwrap());
    assert!(a.is_complete());
    for v in a.couplings().values().chain(a.fields()) {
        assert!((0.1..1.0).contains(&v.abs()));
    }
    let m = random_spin_glass(3, 5, InstanceClass::Mixed).unwrap();
    for v in m.couplings().values().chain(m.fields()) {
        assert!(v.abs() == 0.5 || v.abs() == 1.0);
    }
}

#[test]
fn json_round_trip() {
    let p = random_spin_glass(4, 1, InstanceClass::FullyNonuniform).unwrap().with_offset(0.25);
    let q = IsingProblem::from_json(&p.to_json()).unwrap();
    assert_eq!(p, q);
    let doc = r#"{"n": 2, "J": [[1, 0, 0.5]], "h": [1, -1]}"#;
    let p = IsingProblem::from_json(doc).unwrap();
    assert_eq!(p.coupling(0, 1), 0.5);
    assert_eq!(p.offset(), 0.0);
    match IsingProblem::from_json(r#"{"n": 2, "J": [[0, 0, 1]]}"#) {
        Err(Error::Config(msg)) => assert!(msg.contains("self coupling"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(IsingProblem::from_json("{"), Err(Error::Config(_))));

    let g = Graph::random(6, 0.5, 2, InstanceClass::Mixed).unwrap();
    assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
}
