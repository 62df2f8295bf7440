use proptest::prelude::*;
use pursuit::export::{read_trajectory, trajectory_rows, write_outputs};
use pursuit::run::{predict_scenario, predictions_for};
use pursuit::scenario::{parse_scenario, ScenarioDocument};
use pursuit::{presets, run_scenario, MethodChoice, Overrides, Tolerances};
use pursuit_core::{ControlInput, Schedule};
use tempfile::TempDir;

fn gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn autonomous_gathering_passes_its_checks() {
    let s = presets::load("example1");
    let run = run_scenario(&s, &Tolerances::default()).unwrap();
    assert!(run.report.pass);
    assert_eq!(run.report.regime, "gather");
    let c = pursuit::run::final_centroid(run.primary());
    // no leaders: the centroid does not move
    assert!((c[0] - 3.8).abs() < 1e-9 && (c[1] - 4.4).abs() < 1e-9);
    assert!(run.primary().final_state().diameter() < 1e-6);
}

#[test]
fn critical_orbit_is_centred_on_the_start_centroid() {
    let mut s = presets::load("case-2.1");
    s.schedule = Schedule::single(ControlInput::autonomous(5), 0.0, 60.0).unwrap();
    let run = run_scenario(&s, &Tolerances::default()).unwrap();
    assert!(run.report.pass, "{}", run.report.to_json());
    let p = run.predictions[0].outcome.as_ref().unwrap();
    assert_eq!(p.p_c, [4.4, 4.6]);
    assert!(p.drift == [0.0, 0.0]);
}

#[test]
fn split_run_matches_scheduled_run() {
    let whole = presets::load("case-m1");
    let run = run_scenario(&whole, &Tolerances::default()).unwrap();
    let traj = run.primary();

    let mut first = whole.clone();
    first.schedule =
        Schedule::single(whole.schedule.intervals()[0].input.clone(), 0.0, 45.0).unwrap();
    first.t_max = 45.0;
    let a = run_scenario(&first, &Tolerances::default()).unwrap();

    let mut second = whole.clone();
    second.initial = a.primary().final_state().clone();
    second.schedule =
        Schedule::single(whole.schedule.intervals()[1].input.clone(), 45.0, 60.0).unwrap();
    let b = run_scenario(&second, &Tolerances::default()).unwrap();

    let boundary = &traj.samples()[traj.boundaries()[1]];
    assert!(gap(&boundary.stacked(), &a.primary().final_state().stacked()) < 1e-12);
    assert!(
        gap(
            &traj.final_state().stacked(),
            &b.primary().final_state().stacked()
        ) < 1e-12
    );
}

#[test]
fn interval_predictions_start_from_boundary_states() {
    let s = presets::load("case-m2");
    let run = run_scenario(&s, &Tolerances::default()).unwrap();
    let from_samples = predictions_for(&s, run.primary());
    let closed_form = predict_scenario(&s).unwrap();
    for (a, b) in from_samples.iter().zip(&closed_form) {
        let a = a.outcome.as_ref().unwrap();
        // the sampled start carries the integrator's truncation error
        assert!(gap(&a.p_c, &b.p_c) < 1e-9);
        assert_eq!(a.sigma, b.sigma);
    }
}

#[test]
fn refused_intervals_are_reported_not_fatal() {
    let s = presets::load("example2")
        .with_overrides(&Overrides {
            theta_deg: Some(50.0),
            t_max: Some(5.0),
            ..Overrides::default()
        })
        .unwrap();
    let run = run_scenario(&s, &Tolerances::default()).unwrap();
    assert_eq!(run.report.regime, "unstable");
    assert_eq!(run.report.intervals[0].status, "refused");
    assert!(predict_scenario(&s).is_err());
}

#[test]
fn written_trajectories_read_back_exactly() {
    let s = presets::load("case-1.2")
        .with_overrides(&Overrides {
            t_max: Some(2.0),
            method: Some(MethodChoice::Both),
            ..Overrides::default()
        })
        .unwrap();
    let run = run_scenario(&s, &Tolerances::default()).unwrap();
    let dir = TempDir::new().unwrap();
    write_outputs(&run, dir.path()).unwrap();
    for traj in &run.trajectories {
        let path = dir
            .path()
            .join(format!("trajectory_{}.csv", traj.source.as_str()));
        let rows = read_trajectory(std::fs::File::open(path).unwrap()).unwrap();
        assert_eq!(rows, trajectory_rows(traj));
    }
}

fn arb_document() -> impl Strategy<Value = ScenarioDocument> {
    (2usize..7, -30.0f64..30.0, 1usize..4).prop_flat_map(|(n, theta, k)| {
        (
            prop::collection::vec([-10.0f64..10.0, -10.0f64..10.0], n),
            prop::collection::vec(
                (
                    [-3.0f64..3.0, -3.0f64..3.0],
                    prop::collection::vec(0u8..2, n),
                ),
                k,
            ),
        )
            .prop_map(move |(pos, ivs)| ScenarioDocument {
                name: "generated".into(),
                n,
                theta_deg: theta,
                initial_positions: pos,
                dt: 0.01,
                t_max: 10.0,
                method: MethodChoice::Integrator,
                schedule: ivs
                    .into_iter()
                    .enumerate()
                    .map(|(i, (u_c, leaders))| pursuit::scenario::IntervalDocument {
                        t_start: i as f64 * 2.5,
                        u_c,
                        leaders,
                    })
                    .collect(),
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scenario_json_round_trips(doc in arb_document()) {
        let text = serde_json::to_string(&doc).unwrap();
        let s = parse_scenario(&text).unwrap();
        prop_assert_eq!(s.to_document(), doc);
        prop_assert_eq!(parse_scenario(&s.to_json()).unwrap(), s);
    }
}
