use std::path::Path;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ferl::agent::{argmax_random_tie, td0_update_quantum, Estimate, Transition};
use ferl::free_energy::{exact_classical_free_energy, rbm_free_energy, ObservableEstimate};
use ferl::gridworld::{
    policy_fidelity, value_iteration, Action, GridWorld, OptimalSets, PolicyTable,
};
use ferl::ising::{
    classical_energy, replica_coupling, spin_energy, tfim_matrix, BinaryConfiguration,
    ClampedModel, Coupling, NodeId, SpinConfiguration, TfimParameters,
};
use ferl::sampler::{parse_pool, write_pool};
use ferl::topology::{one_hot, NetworkTopology};

fn model_strategy(max_nodes: usize) -> impl Strategy<Value = ClampedModel> {
    (1..=max_nodes).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let m = pairs.len();
        (
            prop::collection::vec(-2.0..2.0f64, n),
            prop::collection::vec((any::<bool>(), -2.0..2.0f64), m),
        )
            .prop_map(move |(biases, picks)| {
                let couplings = pairs
                    .iter()
                    .zip(picks)
                    .filter(|(_, (keep, _))| *keep)
                    .map(|(&(a, b), (_, weight))| Coupling { a, b, weight })
                    .collect();
                ClampedModel::new(biases, couplings).unwrap()
            })
    })
}

fn bits(x: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| (x >> i & 1) as u8).collect()
}

fn canonical_optimal() -> OptimalSets {
    value_iteration(&GridWorld::canonical(), 1e-10).unwrap().optimal
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_is_invariant_under_relabeling(model in model_strategy(6), seed in any::<u64>()) {
        let n = model.hidden_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let mut biases = vec![0.0; n];
        for i in 0..n {
            biases[perm[i]] = model.biases()[i];
        }
        let couplings = model
            .couplings()
            .iter()
            .map(|c| Coupling { a: perm[c.a], b: perm[c.b], weight: c.weight })
            .collect();
        let relabeled = ClampedModel::new(biases, couplings).unwrap();
        for x in 0..1usize << n {
            let h = bits(x, n);
            let mut moved = vec![0; n];
            for i in 0..n {
                moved[perm[i]] = h[i];
            }
            let e1 = classical_energy(&model, &BinaryConfiguration::new(h).unwrap()).unwrap();
            let e2 = classical_energy(&relabeled, &BinaryConfiguration::new(moved).unwrap()).unwrap();
            prop_assert!((e1 - e2).abs() < 1e-12);
        }
    }

    #[test]
    fn replica_coupling_decreases_in_gamma_and_beta(
        gamma in 0.01..4.0f64,
        beta in 0.1..5.0f64,
        r in 1usize..64,
        bump in 1.01..2.0f64,
    ) {
        let w = |g: f64, b: f64| replica_coupling(&TfimParameters::new(g, b, r).unwrap()).unwrap();
        let base = w(gamma, beta);
        prop_assert!(w(gamma * bump, beta) < base);
        prop_assert!(w(gamma, beta * bump) < base);
    }

    #[test]
    fn zero_field_tfim_spectrum_is_the_classical_spectrum(model in model_strategy(6)) {
        let n = model.hidden_count();
        let h = tfim_matrix(&model, 0.0).unwrap();
        let mut eig: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        let mut classical: Vec<f64> = (0..1usize << n)
            .map(|x| {
                let s = bits(x, n).iter().map(|&b| if b == 1 { -1 } else { 1 }).collect();
                spin_energy(&model, &SpinConfiguration::new(s).unwrap()).unwrap()
            })
            .collect();
        eig.sort_by(f64::total_cmp);
        classical.sort_by(f64::total_cmp);
        for (a, b) in eig.iter().zip(&classical) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn rbm_closed_form_matches_enumeration(
        biases in prop::collection::vec(-3.0..3.0f64, 1..=8),
        beta in 0.1..4.0f64,
    ) {
        let m = ClampedModel::uncoupled(biases).unwrap();
        let closed = rbm_free_energy(&m, beta).unwrap();
        let exact = exact_classical_free_energy(&m, beta).unwrap();
        prop_assert!((closed - exact).abs() <= 1e-12 * exact.abs().max(1.0));
    }

    #[test]
    fn clamping_is_linear_in_the_encodings(
        seed in any::<u64>(),
        s1 in prop::collection::vec(-1.0..1.0f64, 14),
        s2 in prop::collection::vec(-1.0..1.0f64, 14),
        a1 in prop::collection::vec(-1.0..1.0f64, 5),
        a2 in prop::collection::vec(-1.0..1.0f64, 5),
    ) {
        let net = NetworkTopology::chimera_two_cell()
            .init_weights(&mut ChaCha8Rng::seed_from_u64(seed), 0.5)
            .unwrap();
        let sum = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a + b).collect::<Vec<_>>();
        let together = net.fold_biases(&sum(&s1, &s2), &sum(&a1, &a2)).unwrap();
        let first = net.fold_biases(&s1, &a1).unwrap();
        let second = net.fold_biases(&s2, &a2).unwrap();
        for i in 0..together.len() {
            prop_assert!((together[i] - first[i] - second[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn updates_leave_inactive_visible_weights_alone(
        seed in any::<u64>(),
        state in 0usize..14,
        action in 0usize..5,
        td in -5.0..5.0f64,
        dbm in any::<bool>(),
    ) {
        let base = if dbm {
            NetworkTopology::dbm(14, 5, &[8, 8]).unwrap()
        } else {
            NetworkTopology::chimera_two_cell()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = base.init_weights(&mut rng, 0.3).unwrap();
        let before = net.clone();
        let model = net.clamp_indices(state, action).unwrap();
        let pairs: Vec<(usize, usize)> = model.couplings().iter().map(|c| (c.a, c.b)).collect();
        let current = Estimate {
            free_energy: 0.0,
            observables: ObservableEstimate {
                sigma_z: vec![0.5; net.hidden_count()],
                sigma_zz: vec![0.25; pairs.len()],
                pairs,
            },
        };
        let next = Estimate { free_energy: 0.0, observables: current.observables.clone() };
        let action = Action::from_index(action).unwrap();
        let t = Transition { state, action, reward: td, next_state: state, next_action: action };
        net.apply(&td0_update_quantum(&net, &t, &current, &next, 0.1, 0.8));
        for (e, &(v, _)) in net.visible_hidden_edges().iter().enumerate() {
            let active = v == NodeId::state(state) || v == NodeId::action(action.index());
            if !active {
                prop_assert_eq!(net.visible_hidden_weights()[e], before.visible_hidden_weights()[e]);
            }
        }
    }

    #[test]
    fn greedy_choice_ignores_constant_shifts(
        q in prop::collection::vec(-100.0..100.0f64, 5),
        shift in -1e3..1e3f64,
        seed in any::<u64>(),
    ) {
        // integers keep the shift exact so ties stay ties
        let q: Vec<f64> = q.iter().map(|v| v.round()).collect();
        let shifted: Vec<f64> = q.iter().map(|v| v + shift.round()).collect();
        let a = argmax_random_tie(&q, &mut ChaCha8Rng::seed_from_u64(seed));
        let b = argmax_random_tie(&shifted, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn fidelity_is_bounded_and_monotone(picks in prop::collection::vec(0usize..5, 14), fix in 0usize..14) {
        let optimal = canonical_optimal();
        let mut actions: Vec<Action> = picks.iter().map(|&i| Action::ALL[i]).collect();
        let before = policy_fidelity(&PolicyTable::new(actions.clone()), &optimal);
        prop_assert!((0.0..=1.0).contains(&before));
        actions[fix] = optimal.of(fix)[0];
        let after = policy_fidelity(&PolicyTable::new(actions), &optimal);
        prop_assert!(after >= before);
        prop_assert!(after <= 1.0);
    }

    #[test]
    fn step_is_deterministic(state in 0usize..14, action in 0usize..5) {
        let env = GridWorld::canonical();
        let a = Action::ALL[action];
        prop_assert_eq!(env.step(state, a).unwrap(), env.step(state, a).unwrap());
    }

    #[test]
    fn pool_files_round_trip(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 6), 1..40)) {
        let rows: Vec<Vec<i8>> = rows
            .iter()
            .map(|r| r.iter().map(|&b| if b { 1 } else { -1 }).collect())
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pool.txt");
        write_pool(&path, rows.iter().map(Vec::as_slice)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        prop_assert!(text.lines().all(|l| l.split(' ').all(|t| t == "1" || t == "-1")));
        let back = parse_pool(&text, &path).unwrap();
        let got: Vec<Vec<i8>> = back.configs().iter().map(|c| c.values().to_vec()).collect();
        prop_assert_eq!(got, rows);
    }

    #[test]
    fn checkpoints_round_trip(seed in any::<u64>(), which in 0usize..3) {
        let base = match which {
            0 => NetworkTopology::chimera_two_cell(),
            1 => NetworkTopology::dbm(14, 5, &[8, 8]).unwrap(),
            _ => NetworkTopology::rbm(14, 5, 16).unwrap(),
        };
        let net = base.init_weights(&mut ChaCha8Rng::seed_from_u64(seed), 0.7).unwrap();
        let text = net.to_text();
        prop_assert!(text.lines().skip(3).all(|l| l.starts_with("edge ")));
        let back = NetworkTopology::parse(&text, Path::new("mem")).unwrap();
        prop_assert_eq!(back, net);
    }
}

#[test]
fn value_iteration_satisfies_bellman() {
    let env = GridWorld::canonical();
    let vi = value_iteration(&env, 1e-10).unwrap();
    for s in 0..env.state_count() {
        for a in Action::ALL {
            let (next, reward) = env.step(s, a).unwrap();
            let target = reward + env.discount() * vi.q[next].iter().copied().fold(f64::MIN, f64::max);
            assert!((vi.q[s][a.index()] - target).abs() < 1e-8, "residual at ({s}, {a})");
        }
    }
}

#[test]
fn every_state_reaches_the_reward_within_eight_steps() {
    let env = GridWorld::canonical();
    let vi = value_iteration(&env, 1e-10).unwrap();
    let goal = env.state_at(0, 0).unwrap();
    for start in 0..env.state_count() {
        let mut s = start;
        let mut steps = 0;
        while s != goal {
            s = env.step(s, vi.optimal.of(s)[0]).unwrap().0;
            steps += 1;
            assert!(steps <= 8, "state {start} does not reach the reward");
        }
    }
}

#[test]
fn random_policy_fidelity_matches_optimal_set_sizes() {
    let optimal = canonical_optimal();
    let expected: f64 = (0..14).map(|s| optimal.of(s).len() as f64 / 5.0).sum::<f64>() / 14.0;
    assert!((optimal.random_policy_fidelity() - expected).abs() < 1e-15);
    assert!((expected - 4.0 / 14.0).abs() < 1e-12);
}

#[test]
fn one_hot_visibles_touch_each_bias_once() {
    let net = NetworkTopology::dbm(14, 5, &[8, 8]).unwrap();
    for s in 0..14 {
        let enc = one_hot(s, 14);
        assert_eq!(enc.iter().filter(|&&b| b == 1).count(), 1);
        let contributions = net
            .visible_hidden_edges()
            .iter()
            .filter(|(v, h)| *h == 0 && *v == NodeId::state(s))
            .count();
        assert_eq!(contributions, 1);
    }
}
