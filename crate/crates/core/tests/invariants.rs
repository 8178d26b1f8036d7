//! Structural invariants of the scheme over randomly drawn initial data.

use chis::grid::GridSpec;
use chis::profile::Profile;
use chis::stepper::{run, InitialData, ModelParams, RunOptions, StepConfig};
use chis::verifier;
use proptest::prelude::*;

fn profile() -> impl Strategy<Value = Profile> {
    prop_oneof![
        (0.0..2.0f64).prop_map(Profile::constant),
        (1u32..4, 0.0..1.0f64, 0.0..1.0f64).prop_map(|(k, a, b)| Profile::cosine(k, a.min(b), b)),
        (0.0..1.0f64, 0.03..0.3f64, 0.0..2.0f64, 0.0..0.5f64).prop_map(
            |(c, width, amplitude, baseline)| {
                Profile::Gaussian {
                    center: vec![c],
                    width,
                    amplitude,
                    baseline,
                }
            }
        ),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn short_runs_keep_every_structural_bound(
        u in profile(),
        v in profile(),
        w in profile(),
        delta in 0.2..3.0f64,
        nx in 8usize..40,
    ) {
        let grid = GridSpec::line(1.0, nx).unwrap();
        let params = ModelParams::new(delta, grid, InitialData { u, v, w }).unwrap();
        prop_assume!(params.initial_state().is_ok());
        let cfg = StepConfig { dt: 2e-3, ..Default::default() };
        let opts = RunOptions { diagnostic_stride: 10, ..Default::default() };
        let traj = run(&params, &cfg, 0.2, &opts, &mut []).unwrap();

        for r in [
            verifier::check_mass(&traj),
            verifier::check_comparison_principles(&traj),
            verifier::check_explicit_w_bounds(&traj),
            verifier::check_dissipation(&traj),
            verifier::check_shifted_w(&traj),
        ] {
            prop_assert!(r.passed, "{:?}", r);
        }
        prop_assert!(traj.extremes.min_u >= 0.0);
        let cum: Vec<f64> = traj.samples.iter().map(|r| r.cumulative.cross_vw).collect();
        prop_assert!(cum.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn below_threshold_the_exponential_functional_decays(
        a in 0.0..(1.0f64 / 6.0),
        amp in 0.0..0.9f64,
        k in 1u32..3,
    ) {
        let grid = GridSpec::line(1.0, 32).unwrap();
        let init = InitialData {
            u: Profile::cosine(k, amp, 1.0),
            v: Profile::cosine(1, 0.5 * a, 0.5 * a),
            w: Profile::constant(0.1),
        };
        let params = ModelParams::new(1.0, grid, init).unwrap();
        let cfg = StepConfig { dt: 1e-3, ..Default::default() };
        let opts = RunOptions { diagnostic_stride: 20, ..Default::default() };
        let traj = run(&params, &cfg, 0.5, &opts, &mut []).unwrap();
        let r = verifier::check_lyapunov(&traj, verifier::Slack::default());
        prop_assert!(r.applicable && r.passed, "{:?}", r);
        prop_assert!(verifier::check_lyapunov_g_sign(&traj).passed);
    }
}
