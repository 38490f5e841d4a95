use tamed_euler::estimators::{strong_error_curve, MonteCarloPlan};
use tamed_euler::{
    simulate, BrownianFabric, PowerLaw, SchemeConfig, SchemeSettings, SmoothKind, SmoothSanity,
};

// Euler for dX = -lambda X dt + dW has E[X_n] = x0 (1 - lambda h)^n exactly.
#[test]
fn ou_euler_mean_matches_closed_form() {
    let (lambda, x0, steps, paths) = (1.5, 2.0, 32usize, 20_000u64);
    let ou = SmoothSanity::new(SmoothKind::OrnsteinUhlenbeck { lambda }, 1, vec![x0]).unwrap();
    let config = SchemeConfig {
        horizon: 1.0,
        steps,
        delta: 1.0,
        w_exp: 0.0,
        taming: false,
    };
    let finals: Vec<f64> = (0..paths)
        .map(|m| {
            let fabric = BrownianFabric::sample(3, m, 1.0, steps, 1).unwrap();
            simulate(&ou, &config, &fabric).unwrap().point(steps)[0]
        })
        .collect();
    let mean = finals.iter().sum::<f64>() / paths as f64;
    let var = finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (paths - 1) as f64;
    let se = (var / paths as f64).sqrt();

    let h = 1.0 / steps as f64;
    let expected = x0 * (1.0 - lambda * h).powi(steps as i32);
    // Var[X_n] = h sum_{k<n} (1 - lambda h)^(2k).
    let a = (1.0 - lambda * h).powi(2);
    let expected_var = h * (1.0 - a.powi(steps as i32)) / (1.0 - a);
    assert!(
        (mean - expected).abs() < 4.0 * se,
        "mean {mean} vs {expected} (se {se})"
    );
    assert!(
        (var / expected_var - 1.0).abs() < 0.05,
        "var {var} vs {expected_var}"
    );
}

// With the threshold far below every visited distance, the scheme is plain
// additive-noise Euler and the coupled error decays at least at rate 1/2.
#[test]
fn power_law_error_decays_once_taming_is_inactive() {
    let problem = PowerLaw::new(3.0).unwrap();
    let settings = SchemeSettings {
        horizon: 1.0,
        delta: 0.01,
        w_exp: 1.0 / 12.0,
        taming: true,
    };
    let plan = MonteCarloPlan {
        levels: vec![16, 32, 64, 128, 256],
        samples: 400,
        master_seed: 5,
        n_ref_multiplier: 16,
    };
    let curve = strong_error_curve(&problem, &settings, &plan, 2.0).unwrap();
    let fit = curve.rate_fit().unwrap();
    assert!(fit.slope <= -0.5, "slope {}", fit.slope);
    assert!(fit.r_squared >= 0.95, "r^2 {}", fit.r_squared);
    assert!(curve.audit.is_clean() && curve.audit.checked > 0);
}
