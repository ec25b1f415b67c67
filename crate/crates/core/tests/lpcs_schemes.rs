use approx::assert_relative_eq;
use proptest::prelude::*;

use velopt::linalg::{dist, norm, DenseMatrix};
use velopt::lpcs::{
    alg4_step, alg4_step_stats, alg5_step, alg5_step_stats, gen_compressed_sensing, power_approx, CountingOperator,
    CsProblem, CsState, LpBall,
};
use velopt::rng::SplitMix64;
use velopt::schedule::SolverParams;
use velopt::problem::Problem;
use velopt::solvers::{step_report, Method};
use velopt::state::IterateState;
use velopt::wsimplex::project_l1_ball;

fn small_problem(rng: &mut SplitMix64, m: usize, n: usize) -> CsProblem {
    let a = DenseMatrix::from_row_major(m, n, rng.normal_vec(m * n)).unwrap();
    CsProblem::new(a, rng.normal_vec(m)).unwrap()
}

fn random_state(rng: &mut SplitMix64, n: usize) -> CsState {
    let mut st = CsState::new(rng.normal_vec(n));
    for v in st.xbar.iter_mut() {
        *v += rng.uniform_range(-0.3, 0.3);
    }
    st.u = rng.normal_vec(n);
    st.ubar = rng.normal_vec(n);
    st
}

#[test]
fn single_steps_match_the_generic_projection() {
    let mut rng = SplitMix64::new(2024);
    let mut compared = [0usize; 2];
    for trial in 0..400 {
        let n = 1 + rng.below(5) as usize;
        let m = 1 + rng.below(4) as usize;
        let cs = small_problem(&mut rng, m, n);
        let p = if trial % 2 == 0 { 1.0 } else { rng.uniform_range(0.3, 1.0) };
        let ball = LpBall::new(p, rng.uniform_range(0.2, 2.0), 10f64.powf(rng.uniform_range(-3.0, -0.5))).unwrap();
        let st = random_state(&mut rng, n);
        let t = rng.uniform_range(0.2, 1.5);
        let params = SolverParams::manual(rng.uniform_range(0.1, 0.6), rng.uniform_range(0.0, 0.5), rng.uniform_range(0.0, 0.8), t);
        let slack = cs.slack_problem(ball);
        let state = IterateState { x: st.position(), u: st.velocity(), k: 0, step: t };
        for (idx, method) in [Method::AgdLocal, Method::AgdGlobal].into_iter().enumerate() {
            let fast = if idx == 0 { alg4_step(&cs, &st, &ball, &params) } else { alg5_step(&cs, &st, &ball, &params) };
            let generic = step_report(&slack, method, &state, &params);
            match (fast, generic) {
                (Ok(f), Ok(g)) => {
                    assert!(dist(&f.velocity(), &g.after.u) <= 1e-9 * (1.0 + norm(&g.after.u)), "trial {trial} {method}");
                    assert!(dist(&f.position(), &g.after.x) <= 1e-9 * (1.0 + norm(&g.after.x)), "trial {trial} {method}");
                    compared[idx] += 1;
                }
                (Err(_), Err(_)) => {}
                (f, g) => panic!("trial {trial} {method}: specialized ok {}, generic ok {}", f.is_ok(), g.is_ok()),
            }
        }
    }
    assert!(compared[0] == 400 && compared[1] >= 200, "compared {compared:?}");
}

#[test]
fn every_step_of_a_trajectory_matches_the_generic_scheme() {
    let mut rng = SplitMix64::new(77);
    let cs = small_problem(&mut rng, 6, 4);
    let params = SolverParams::manual(0.5, 0.3, 0.4, 0.8);
    for p in [1.0, 0.8] {
        let ball = LpBall::new(p, 0.8, 1e-3).unwrap();
        let slack = cs.slack_problem(ball);
        for method in [Method::AgdLocal, Method::AgdGlobal] {
            let mut st = CsState::new(vec![0.0; 4]);
            let mut tight = 0;
            for k in 0..300 {
                let state = IterateState { x: st.position(), u: st.velocity(), k, step: 0.8 };
                let fast = if method == Method::AgdLocal { alg4_step(&cs, &st, &ball, &params) } else { alg5_step(&cs, &st, &ball, &params) };
                let generic = step_report(&slack, method, &state, &params);
                let (Ok(next), Ok(rep)) = (fast, generic) else {
                    assert!(p < 1.0 && method == Method::AgdGlobal, "p = {p} {method} k = {k}");
                    break;
                };
                assert!(dist(&next.velocity(), &rep.after.u) <= 1e-9 * (1.0 + norm(&rep.after.u)), "p = {p} {method} k = {k}");
                tight += slack.constraint_values(&state.x).iter().filter(|g| g.abs() < 1e-12).count();
                st = next;
            }
            assert!(p < 1.0 || tight > 0, "trajectory never touched the boundary");
        }
    }
}

#[test]
fn one_forward_and_one_adjoint_product_per_step() {
    let inst = gen_compressed_sensing(20, 60, 4, 0.5, 3).unwrap();
    let cs = CsProblem::new(CountingOperator::new(inst.a), inst.b).unwrap();
    let params = SolverParams::manual(0.5, 0.2, 0.3, 1.0);
    for p in [1.0, 0.7] {
        let ball = LpBall::new(p, 2.0, 1e-3).unwrap();
        let mut st = CsState::new(vec![0.0; 60]);
        for k in 0..30 {
            cs.op.reset();
            let (next, stats) = alg4_step_stats(&cs, &st, &ball, &params).unwrap();
            assert_eq!(cs.op.counts(), (1, 1), "p = {p}, k = {k}");
            assert!(stats.sorted <= 120);
            st = next;
        }
    }
    let ball = LpBall::new(1.0, 2.0, 1e-6).unwrap();
    let mut st = CsState::new(vec![0.0; 60]);
    for k in 0..30 {
        cs.op.reset();
        let (next, stats) = alg5_step_stats(&cs, &st, &ball, &params).unwrap();
        assert_eq!(cs.op.counts(), (1, 1), "k = {k}");
        assert!(stats.sorted <= 120);
        st = next;
    }
}

#[test]
fn l1_global_step_is_a_sign_split_l1_projection() {
    let mut rng = SplitMix64::new(31);
    for _ in 0..200 {
        let n = 1 + rng.below(6) as usize;
        let cs = small_problem(&mut rng, 3, n);
        let ball = LpBall::new(1.0, rng.uniform_range(2.0, 6.0), 1e-6).unwrap();
        let mut st = random_state(&mut rng, n);
        for i in 0..n {
            st.xbar[i] = st.x[i].abs() + rng.uniform_range(0.0, 0.2);
        }
        let (alpha, delta, beta, t) = (0.4, 0.2, 0.3, 0.9);
        let params = SolverParams::manual(alpha, delta, beta, t);
        let Ok(next) = alg5_step(&cs, &st, &ball, &params) else { continue };

        let y: Vec<f64> = st.x.iter().zip(&st.u).map(|(x, u)| x + beta * u).collect();
        let mut grad = vec![0.0; n];
        cs.scaled_gradient(&y, &mut grad);
        let r: Vec<f64> = (0..n).map(|i| st.u[i] * (1.0 - 2.0 * delta * t) - t * grad[i]).collect();
        let rbar: Vec<f64> = st.ubar.iter().map(|u| u * (1.0 - 2.0 * delta * t)).collect();
        // a = vbar + v >= la, b = vbar - v >= lb, sum (a + b) / 2 <= alpha * slack
        let la: Vec<f64> = (0..n).map(|i| -alpha * (st.x[i] + st.xbar[i])).collect();
        let lb: Vec<f64> = (0..n).map(|i| -alpha * (st.xbar[i] - st.x[i])).collect();
        let budget = 2.0 * alpha * ball.slack(&st.xbar) - la.iter().chain(&lb).sum::<f64>();
        if budget < 0.0 {
            continue;
        }
        let mut q: Vec<f64> = (0..n).map(|i| (rbar[i] + r[i] - la[i]).max(0.0)).collect();
        q.extend((0..n).map(|i| (rbar[i] - r[i] - lb[i]).max(0.0)));
        let xi = project_l1_ball(&q, budget).unwrap();
        for i in 0..n {
            let (a, b) = (xi[i] + la[i], xi[n + i] + lb[i]);
            assert_relative_eq!(next.u[i], 0.5 * (a - b), epsilon = 1e-10, max_relative = 1e-10);
            assert_relative_eq!(next.ubar[i], 0.5 * (a + b), epsilon = 1e-10, max_relative = 1e-10);
        }
    }
}

#[test]
fn huge_budget_gives_unconstrained_momentum() {
    let inst = gen_compressed_sensing(15, 10, 3, 0.2, 12).unwrap();
    let cs = CsProblem::new(inst.a, inst.b).unwrap();
    let ball = LpBall::new(0.8, 1e12, 1e-3).unwrap();
    let params = SolverParams::manual(0.5, 0.25, 0.4, 1.0);
    for alg5 in [false, true] {
        let mut st = CsState::new(vec![0.0; 10]);
        st.xbar = vec![1e6; 10];
        let (mut x, mut u) = (vec![0.0; 10], vec![0.0; 10]);
        for k in 0..200 {
            st = if alg5 { alg5_step(&cs, &st, &ball, &params) } else { alg4_step(&cs, &st, &ball, &params) }.unwrap();
            let y: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + 0.4 * b).collect();
            let mut g = vec![0.0; 10];
            cs.scaled_gradient(&y, &mut g);
            for i in 0..10 {
                u[i] = u[i] * (1.0 - 2.0 * 0.25) - g[i];
                x[i] += u[i];
            }
            assert!(dist(&st.x, &x) <= 1e-10 * (1.0 + norm(&x)), "alg5 = {alg5}, k = {k}");
            assert!(st.ubar.iter().all(|v| *v == 0.0));
        }
    }
}

#[test]
fn smoothed_power_example() {
    let ball = LpBall::new(0.5, 1.0, 0.25).unwrap();
    assert_relative_eq!(power_approx(1.0, &ball), 0.75, max_relative = 1e-15);
}

proptest! {
    #[test]
    fn smoothed_power_stays_close_to_the_power(p in 0.05..1.0f64, log_delta in -4.0..0.0f64, x in 0.0..10.0f64) {
        let delta = 10f64.powf(log_delta);
        let ball = LpBall::new(p, 1.0, delta).unwrap();
        let x = x.max(delta);
        let gap = (power_approx(x, &ball) - x.powf(p)).abs();
        prop_assert!(gap <= delta.powf(p) * (1.0 - p) * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn smoothed_power_is_increasing_and_concave(p in 0.05..1.0f64, log_delta in -4.0..0.0f64, a in -1.0..3.0f64, h in 1e-3..1.0f64) {
        let ball = LpBall::new(p, 1.0, 10f64.powf(log_delta)).unwrap();
        let (f0, f1, f2) = (power_approx(a, &ball), power_approx(a + h, &ball), power_approx(a + 2.0 * h, &ball));
        prop_assert!(f1 >= f0);
        prop_assert!(f1 - f0 >= f2 - f1 - 1e-12 * (1.0 + f2.abs()));
    }
}

#[test]
fn fig1_curve_tracks_the_power() {
    let ball = LpBall::new(0.6, 1.0, 0.01).unwrap();
    let bound = 0.01f64.powf(0.6) * 0.4;
    for i in 0..=10_000 {
        let x = 0.01 + 2.0 * i as f64 / 10_000.0;
        assert!((power_approx(x, &ball) - x.powf(0.6)).abs() <= bound * (1.0 + 1e-12));
    }
}
