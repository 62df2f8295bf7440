mod common;

use common::{five_agents, max_gap, random_leaders, random_state, rng};
use proptest::prelude::*;
use pursuit_core::fit::tail_velocity;
use pursuit_core::predictor::centroid;
use pursuit_core::{
    critical_angle, exact_interval_solution, simulate_schedule, step_rk4, ControlInput,
    ControlInterval, LeaderSet, Method, PursuitError, Schedule, ScheduleError, SwarmState,
};
use rand::Rng;

fn case12_input() -> ControlInput {
    ControlInput::new(
        [2.0, 3.0],
        LeaderSet::from_indicator(&[0, 1, 0, 0, 1]).unwrap(),
    )
    .unwrap()
}

#[test]
fn step_doubling_is_fifth_order() {
    let mut r = rng(21);
    let theta = 20f64.to_radians();
    let input = case12_input();
    for _ in 0..5 {
        let s = random_state(&mut r, 5);
        let dt = 1e-2;
        let full = step_rk4(&s, theta, &input, dt).unwrap();
        let half = step_rk4(
            &step_rk4(&s, theta, &input, dt / 2.0).unwrap(),
            theta,
            &input,
            dt / 2.0,
        )
        .unwrap();
        assert!(max_gap(&full.stacked(), &half.stacked()) < 1e-9);
    }
}

#[test]
fn exact_solution_at_zero_is_identity() {
    let p0 = five_agents();
    let p = exact_interval_solution(&p0, 0.3, &case12_input(), 0.0).unwrap();
    assert!(max_gap(&p.stacked(), &p0.stacked()) < 1e-12);
}

#[test]
fn exact_rigid_drift() {
    let p0 = SwarmState::new(0.0, vec![[1.0, -1.0]; 4]).unwrap();
    let input = ControlInput::new([2.0, 3.0], LeaderSet::all(4)).unwrap();
    let p = exact_interval_solution(&p0, 0.0, &input, 5.0).unwrap();
    for q in p.positions() {
        assert!((q[0] - 11.0).abs() < 1e-12 && (q[1] - 14.0).abs() < 1e-12);
    }
}

#[test]
fn integrator_matches_exact_solution_at_ten_seconds() {
    let p0 = five_agents();
    let theta = 20f64.to_radians();
    let input = case12_input();
    let sched = Schedule::single(input.clone(), 0.0, 10.0).unwrap();
    let traj = simulate_schedule(&p0, theta, &sched, 1e-3, Method::Integrator).unwrap();
    let exact = exact_interval_solution(&p0, theta, &input, 10.0).unwrap();
    assert!(max_gap(&traj.final_state().stacked(), &exact.stacked()) < 1e-8);
}

#[test]
fn single_interval_exact_run_samples_the_closed_form() {
    let p0 = five_agents();
    let theta = 0.3;
    let input = case12_input();
    let sched = Schedule::single(input.clone(), 0.0, 2.0).unwrap();
    let traj = simulate_schedule(&p0, theta, &sched, 0.25, Method::ExactPropagator).unwrap();
    for s in traj.samples() {
        let e = exact_interval_solution(&p0, theta, &input, s.t()).unwrap();
        assert!(max_gap(&s.stacked(), &e.stacked()) < 1e-13);
    }
}

fn two_interval_schedule() -> (Schedule, ControlInput, ControlInput) {
    let a = case12_input();
    let b = ControlInput::new([-2.0, 1.0], LeaderSet::all(5)).unwrap();
    let s = Schedule::new(
        vec![
            ControlInterval {
                t_start: 0.0,
                input: a.clone(),
            },
            ControlInterval {
                t_start: 3.0,
                input: b.clone(),
            },
        ],
        5.0,
    )
    .unwrap();
    (s, a, b)
}

#[test]
fn scheduled_run_equals_manual_chaining() {
    let p0 = five_agents();
    let theta = 20f64.to_radians();
    let (sched, a, b) = two_interval_schedule();
    for method in [Method::Integrator, Method::ExactPropagator] {
        let whole = simulate_schedule(&p0, theta, &sched, 1e-3, method).unwrap();
        let first = simulate_schedule(
            &p0,
            theta,
            &Schedule::single(a.clone(), 0.0, 3.0).unwrap(),
            1e-3,
            method,
        )
        .unwrap();
        let second = simulate_schedule(
            first.final_state(),
            theta,
            &Schedule::single(b.clone(), 3.0, 5.0).unwrap(),
            1e-3,
            method,
        )
        .unwrap();
        let boundary = &whole.samples()[whole.boundaries()[1]];
        assert_eq!(boundary.t(), 3.0);
        assert!(max_gap(&boundary.stacked(), &first.final_state().stacked()) < 1e-12);
        assert!(
            max_gap(
                &whole.final_state().stacked(),
                &second.final_state().stacked()
            ) < 1e-12
        );
    }
}

#[test]
fn schedule_must_start_at_state_time_and_align_with_dt() {
    let p0 = five_agents();
    let sched = Schedule::single(case12_input(), 1.0, 2.0).unwrap();
    assert!(matches!(
        simulate_schedule(&p0, 0.1, &sched, 1e-3, Method::Integrator),
        Err(PursuitError::Schedule(ScheduleError::StartMismatch { .. }))
    ));
    let sched = Schedule::single(case12_input(), 0.0, 1.0).unwrap();
    assert!(matches!(
        simulate_schedule(&p0, 0.1, &sched, 0.3, Method::Integrator),
        Err(PursuitError::Schedule(ScheduleError::Misaligned { .. }))
    ));
    let short = ControlInput::new([1.0, 0.0], LeaderSet::all(3)).unwrap();
    let sched = Schedule::single(short, 0.0, 1.0).unwrap();
    assert!(simulate_schedule(&p0, 0.1, &sched, 0.1, Method::Integrator).is_err());
}

#[test]
fn velocity_settles_per_segment() {
    let p0 = five_agents();
    let theta = 20f64.to_radians();
    let a = case12_input();
    let b = ControlInput::new([2.0, 3.0], LeaderSet::all(5)).unwrap();
    let sched = Schedule::new(
        vec![
            ControlInterval {
                t_start: 0.0,
                input: a,
            },
            ControlInterval {
                t_start: 45.0,
                input: b,
            },
        ],
        60.0,
    )
    .unwrap();
    let traj = simulate_schedule(&p0, theta, &sched, 1e-3, Method::Integrator).unwrap();
    // 15 s after the switch the slowest mode (rate ≈ 0.32/s) still leaves a
    // velocity transient of a few 1e-3, so the second segment gets a looser bound
    let expected = [([0.8, 1.2], 1e-3), ([2.0, 3.0], 1e-2)];
    for (k, (want, tol)) in expected.iter().enumerate() {
        let range = traj.interval_samples(k).unwrap();
        let slice = &traj.samples()[range];
        let ts: Vec<f64> = slice.iter().map(SwarmState::t).collect();
        for agent in 0..5 {
            let pts: Vec<_> = slice.iter().map(|s| s.position(agent)).collect();
            let v = tail_velocity(&ts, &pts, 0.1).unwrap();
            assert!(
                (v[0] - want[0]).abs() < *tol && (v[1] - want[1]).abs() < *tol,
                "seg {k} agent {agent}: {v:?}"
            );
        }
    }
}

#[test]
fn centroid_law_over_full_run() {
    let p0 = five_agents();
    let (_, a, b) = two_interval_schedule();
    let sched = Schedule::new(
        vec![
            ControlInterval {
                t_start: 0.0,
                input: a,
            },
            ControlInterval {
                t_start: 30.0,
                input: b,
            },
        ],
        60.0,
    )
    .unwrap();
    let traj = simulate_schedule(&p0, 0.3, &sched, 1e-3, Method::Integrator).unwrap();
    let c0 = centroid(&p0);
    let c1 = centroid(traj.final_state());
    let want = [c0[0] + 30.0 * (0.8 - 2.0), c0[1] + 30.0 * (1.2 + 1.0)];
    assert!((c1[0] - want[0]).abs() < 1e-9 && (c1[1] - want[1]).abs() < 1e-9);
}

#[test]
fn gathering_contracts_the_swarm() {
    let mut r = rng(31);
    for _ in 0..3 {
        let p0 = random_state(&mut r, 5);
        let sched = Schedule::single(ControlInput::autonomous(5), 0.0, 60.0).unwrap();
        let traj =
            simulate_schedule(&p0, 20f64.to_radians(), &sched, 1e-3, Method::Integrator).unwrap();
        let d: Vec<f64> = traj
            .samples()
            .iter()
            .step_by(1000)
            .map(SwarmState::diameter)
            .collect();
        assert!(d[10..].windows(2).all(|w| w[1] <= w[0]));
        assert!(traj.final_state().diameter() < 1e-6);
    }
}

#[test]
fn unstable_swarm_grows() {
    let p0 = five_agents();
    let sched = Schedule::single(ControlInput::autonomous(5), 0.0, 30.0).unwrap();
    let theta = 1.5 * critical_angle(5);
    let traj = simulate_schedule(&p0, theta, &sched, 1e-3, Method::Integrator).unwrap();
    assert!(traj.truncated.is_none());
    assert!(traj.final_state().diameter() >= 10.0 * p0.diameter());
}

#[test]
fn methods_agree_on_a_small_grid() {
    let mut r = rng(41);
    for n in [2, 3, 6] {
        for frac in [0.0, 0.5, 1.0] {
            let p0 = random_state(&mut r, n);
            let input = ControlInput::new(
                [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)],
                random_leaders(&mut r, n),
            )
            .unwrap();
            let theta = frac * critical_angle(n);
            let sched = Schedule::single(input, 0.0, 10.0).unwrap();
            let a = simulate_schedule(&p0, theta, &sched, 1e-3, Method::Integrator).unwrap();
            let b = simulate_schedule(&p0, theta, &sched, 1e-3, Method::ExactPropagator).unwrap();
            let gap = a
                .samples()
                .iter()
                .zip(b.samples())
                .map(|(x, y)| max_gap(&x.stacked(), &y.stacked()))
                .fold(0.0, f64::max);
            assert!(gap < 1e-8, "n={n} frac={frac} gap={gap}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_centroid_is_leader_fraction(
        seed in any::<u64>(),
        n in 2usize..10,
        theta in -1.0f64..1.0,
        ux in -5.0f64..5.0,
        uy in -5.0f64..5.0,
    ) {
        let mut r = rng(seed);
        let s = random_state(&mut r, n);
        let b = random_leaders(&mut r, n);
        let frac = b.count() as f64 / n as f64;
        let input = ControlInput::new([ux, uy], b).unwrap();
        let d = pursuit_core::derivative(&s, theta, &input).unwrap();
        let cx: f64 = d.iter().step_by(2).sum::<f64>() / n as f64;
        let cy: f64 = d.iter().skip(1).step_by(2).sum::<f64>() / n as f64;
        prop_assert!((cx - frac * ux).abs() < 1e-12);
        prop_assert!((cy - frac * uy).abs() < 1e-12);
    }

    #[test]
    fn trajectory_times_strictly_increase(seed in any::<u64>(), steps in 1usize..40, k in 1usize..4) {
        let mut r = rng(seed);
        let p0 = random_state(&mut r, 4);
        let dt = 0.05;
        let intervals = (0..k)
            .map(|i| ControlInterval {
                t_start: (i * steps) as f64 * dt,
                input: ControlInput::new([1.0, -1.0], random_leaders(&mut r, 4)).unwrap(),
            })
            .collect();
        let sched = Schedule::new(intervals, (k * steps) as f64 * dt).unwrap();
        let traj = simulate_schedule(&p0, 0.2, &sched, dt, Method::Integrator).unwrap();
        prop_assert_eq!(traj.samples().len(), k * steps + 1);
        prop_assert!(traj.samples().windows(2).all(|w| w[1].t() > w[0].t()));
    }
}
