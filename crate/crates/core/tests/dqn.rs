use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ferl::dqn::{train_dqn, DqnConfig, Mlp, DQN_WIDTHS};
use ferl::gridworld::GridWorld;

/// `‖g_bp - g_fd‖ / max(‖g_bp‖, ‖g_fd‖)` with central differences.
fn gradient_error(net: &Mlp, input: &[f64], output: usize, target: f64) -> f64 {
    let analytic = net.loss_gradient(input, output, target).unwrap();
    let h = 1e-5;
    let mut probe = net.clone();
    let mut diff = 0.0;
    let mut norm_a = 0.0;
    let mut norm_n = 0.0;
    for k in 0..analytic.len() {
        let saved = probe.params()[k];
        probe.params_mut()[k] = saved + h;
        let up = probe.loss(input, output, target).unwrap();
        probe.params_mut()[k] = saved - h;
        let down = probe.loss(input, output, target).unwrap();
        probe.params_mut()[k] = saved;
        let numeric = (up - down) / (2.0 * h);
        diff += (analytic[k] - numeric).powi(2);
        norm_a += analytic[k].powi(2);
        norm_n += numeric.powi(2);
    }
    diff.sqrt() / norm_a.sqrt().max(norm_n.sqrt()).max(1e-12)
}

#[test]
fn backprop_agrees_with_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for fixture in 0..100 {
        let scale = rng.random_range(0.05..1.5);
        let net = Mlp::random(&DQN_WIDTHS, scale, &mut rng).unwrap();
        let input: Vec<f64> = if fixture % 2 == 0 {
            // one-hot states as in training
            let mut x = vec![0.0; 14];
            x[rng.random_range(0..14)] = 1.0;
            x
        } else {
            (0..14).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        let output = rng.random_range(0..5);
        let target = rng.random_range(-5.0..5.0);
        let err = gradient_error(&net, &input, output, target);
        assert!(err <= 1e-5, "fixture {fixture}: relative error {err:e}");
        worst = worst.max(err);
    }
    eprintln!("worst relative gradient error {worst:e}");
}

#[test]
fn training_is_reproducible_and_snapshots_every_sample() {
    let env = GridWorld::canonical();
    let config = DqnConfig { training_samples: 40, ..DqnConfig::default() };
    let a = train_dqn(&env, &config, 9).unwrap();
    let b = train_dqn(&env, &config, 9).unwrap();
    assert_eq!(a.snapshots().len(), 40);
    assert_eq!(a.snapshots(), b.snapshots());
    assert_eq!(a.td_errors, b.td_errors);
}
