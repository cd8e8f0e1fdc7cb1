//! Round-trip property: the canonical writer and the parser are exact
//! inverses over randomly generated valid configs.

use std::path::Path;

use proptest::prelude::*;

use circumnav_cli::config::{parse_config, render};
use circumnav_core::controller::{ControlParams, LimitMode};
use circumnav_core::geometry::Vec2;
use circumnav_core::network::{FaultSchedule, FaultWindow};
use circumnav_core::sim::{ReportOverrides, SimConfig};
use circumnav_core::target::{BoundaryPerturbation, TargetTrajectory, Waypoint};

fn mode_strategy() -> impl Strategy<Value = LimitMode> {
    prop_oneof![
        Just(LimitMode::GainScaled),
        Just(LimitMode::NormSaturated),
        Just(LimitMode::ComponentClamped),
    ]
}

fn base_circle() -> impl Strategy<Value = (f64, f64, f64)> + Clone {
    (-20.0..20.0f64, -20.0..20.0f64, 5.0..30.0f64)
}

fn trajectory_strategy(horizon: f64) -> impl Strategy<Value = TargetTrajectory> {
    prop_oneof![
        base_circle().prop_map(move |(x, y, r)| {
            TargetTrajectory::constant(Vec2::new(x, y), r, horizon).unwrap()
        }),
        (base_circle(), -0.01..0.01f64, -0.001..0.001f64).prop_map(
            move |((x, y, r), vx, rr)| {
                TargetTrajectory::linear_drift(
                    Vec2::new(x, y),
                    r,
                    Vec2::new(vx, 0.5 * vx),
                    rr,
                    horizon,
                )
                .unwrap()
            }
        ),
        (base_circle(), 0.1..2.0f64, 0.01..0.3f64, 0.1..2.0f64).prop_map(
            move |((x, y, r), amp, omega, ramp)| {
                TargetTrajectory::sinusoidal(
                    Vec2::new(x, y),
                    r,
                    Vec2::new(amp, -amp),
                    omega,
                    ramp,
                    omega * 0.7,
                    horizon,
                )
                .unwrap()
            }
        ),
        (base_circle(), 1.0..10.0f64, 1.0..10.0f64).prop_map(move |((x, y, r), dr1, dr2)| {
            TargetTrajectory::from_waypoints(vec![
                Waypoint { t: 0.0, c: Vec2::new(x, y), r },
                Waypoint { t: horizon / 2.0, c: Vec2::new(x + dr1, y), r: r + 1.0 },
                Waypoint { t: horizon, c: Vec2::new(x + dr1, y + dr2), r },
            ])
            .unwrap()
        }),
    ]
}

prop_compose! {
    fn config_strategy()(
        n in 3usize..7,
        dt in 0.05..2.0f64,
        est_every in 1usize..4,
        duration in 10usize..60,
        seed in 0u64..u64::MAX / 2,
        margin in 1.0..2.0f64,
        noise_c in 0.0..1.0f64,
        noise_r in 0.0..1.0f64,
        tail in 0.1..1.0f64,
        use_angles in proptest::bool::ANY,
        delta in 0.01..2.0f64,
        u_max in 0.5..20.0f64,
        mode in mode_strategy(),
        kind_seed in proptest::bits::u8::ANY,
        eta in 0.0..0.3f64,
        pert_modes in 0u32..5,
        phase in 0.0..6.0f64,
        noise_amplitude in 0.0..0.2f64,
        fault_agent in 0usize..3,
        fault_span in 0.1..0.9f64,
        center_bound in proptest::option::of(0.01..10.0f64),
        beta_bound in proptest::option::of(0.01..1.0f64),
    )(
        trajectory in trajectory_strategy(((duration as f64) * dt).max(0.1)),
        n in Just(n), dt in Just(dt), est_every in Just(est_every),
        duration in Just(duration), seed in Just(seed), margin in Just(margin),
        noise_c in Just(noise_c), noise_r in Just(noise_r), tail in Just(tail),
        use_angles in Just(use_angles), delta in Just(delta), u_max in Just(u_max),
        mode in Just(mode), _kind_seed in Just(kind_seed), eta in Just(eta),
        pert_modes in Just(pert_modes), phase in Just(phase),
        noise_amplitude in Just(noise_amplitude), fault_agent in Just(fault_agent),
        fault_span in Just(fault_span), center_bound in Just(center_bound),
        beta_bound in Just(beta_bound),
    ) -> SimConfig {
        let horizon = duration as f64 * dt;
        let initial_angles = use_angles.then(|| {
            (0..n)
                .map(|i| i as f64 * std::f64::consts::TAU / n as f64 + 0.01)
                .collect::<Vec<_>>()
        });
        // a fault window needs a fourth agent to keep 3 valid
        let windows = if n >= 4 {
            vec![FaultWindow {
                agent_id: fault_agent.min(n - 1),
                t_start: 0.1 * horizon,
                t_end: (0.1 + 0.8 * fault_span) * horizon,
            }]
        } else {
            Vec::new()
        };
        SimConfig {
            n,
            dt,
            est_every,
            duration,
            seed,
            placement_margin: margin,
            noise_c,
            noise_r,
            initial_angles,
            control: ControlParams::new(delta, u_max, mode).unwrap(),
            trajectory,
            perturbation: BoundaryPerturbation::new(eta, pert_modes, phase).unwrap(),
            faults: FaultSchedule::new(windows, noise_amplitude, seed).unwrap(),
            tail_fraction: tail,
            report: ReportOverrides {
                center_bound,
                radius_bound: None,
                db_bound: None,
                beta_bound,
            },
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_render_is_identity(config in config_strategy()) {
        prop_assume!(config.validate().is_ok());
        let canonical = render(&config);
        let reparsed = parse_config(&canonical, Path::new(".")).map_err(|e| {
            TestCaseError::fail(format!("canonical form failed to parse: {e}\n{canonical}"))
        })?;
        prop_assert_eq!(&reparsed, &config);
        // and rendering is a fixed point
        prop_assert_eq!(render(&reparsed), canonical);
    }
}
