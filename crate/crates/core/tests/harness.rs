mod common;

use approx::assert_abs_diff_eq;

use velopt::bench::baselines::QuadraticObjective;
use velopt::bench::csv::{numeric_columns, read_trace_csv};
use velopt::bench::illustrative::{default_grid, region_boundaries};
use velopt::bench::{
    apgd_step, pgd_step, run_compressed_sensing, run_illustrative, solve, write_trace_csv, ApgdState, CsvRecord,
    Experiment, ExperimentConfig, MethodName, Objective, ProjectableSet,
};
use velopt::linalg::{dist, norm, norm1, DenseMatrix};
use velopt::lpcs::gen_compressed_sensing;
use velopt::rng::SplitMix64;
use velopt::solvers::Status;

use common::enumerate_projection;

fn quadratic(rng: &mut SplitMix64, n: usize, lo: f64, hi: f64) -> (QuadraticObjective, f64, f64) {
    // Q = B diag(eig) B^T with B from Gram-Schmidt
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while basis.len() < n {
        let mut v = rng.normal_vec(n);
        for b in &basis {
            let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        basis.push(v);
    }
    let eig: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).collect();
    let mut q = DenseMatrix::zeros(n, n);
    for (d, b) in eig.iter().zip(&basis) {
        for i in 0..n {
            for j in 0..n {
                q[(i, j)] += d * b[i] * b[j];
            }
        }
    }
    (QuadraticObjective { q, c: rng.normal_vec(n) }, lo, hi)
}

fn grad(obj: &dyn Objective, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    obj.gradient(x, &mut g);
    g
}

#[test]
fn pgd_matches_a_brute_force_projection() {
    let mut rng = SplitMix64::new(4);
    for _ in 0..50 {
        let (obj, _, l) = quadratic(&mut rng, 3, 0.5, 4.0);
        let x = rng.normal_vec(3);
        let nu = rng.uniform_range(0.2, 2.0);
        let mut z = x.clone();
        let g = grad(&obj, &x);
        z.iter_mut().zip(&g).for_each(|(zi, gi)| *zi -= gi / l);
        // |x|_1 <= nu as the 8 facets s^T x <= nu
        let rows: Vec<Vec<f64>> = (0..8u32).map(|m| (0..3).map(|i| if m >> i & 1 == 1 { 1.0 } else { -1.0 }).collect()).collect();
        let oracle = enumerate_projection(&z, &rows, &vec![-nu; 8]).unwrap();
        let step = pgd_step(&obj, &ProjectableSet::L1Ball { nu }, &x, 1.0 / l).unwrap();
        assert!(dist(&step, &oracle) <= 1e-10);

        let (lo, hi) = (vec![-0.3, -1.0, 0.0], vec![0.2, 1.0, 0.5]);
        let boxed = pgd_step(&obj, &ProjectableSet::Box { lo: lo.clone(), hi: hi.clone() }, &x, 1.0 / l).unwrap();
        for i in 0..3 {
            assert_eq!(boxed[i], z[i].clamp(lo[i], hi[i]));
        }
    }
}

#[test]
fn pgd_on_an_unconstrained_quadratic_contracts() {
    let mut rng = SplitMix64::new(9);
    let (obj, mu, l) = quadratic(&mut rng, 5, 1.0, 8.0);
    let mut x = rng.normal_vec(5);
    let mut prev_gap = f64::INFINITY;
    for _ in 0..50 {
        let g = grad(&obj, &x);
        let gap = norm(&g) / mu;
        assert!(gap <= (1.0 - mu / l) * prev_gap + 1e-12);
        prev_gap = gap;
        x = pgd_step(&obj, &ProjectableSet::Whole, &x, 1.0 / l).unwrap();
    }
}

/// The same method in its two-sequence form: `x_{k+1} = y_k - grad f(y_k) / L`,
/// `a_{k+1}^2 = (1 - a_{k+1}) a_k^2 + q a_{k+1}`,
/// `y_{k+1} = x_{k+1} + a_k (1 - a_k) / (a_k^2 + a_{k+1}) (x_{k+1} - x_k)`.
fn two_sequence(obj: &dyn Objective, x0: &[f64], mu: f64, l: f64, iters: usize) -> Vec<Vec<f64>> {
    let q = mu / l;
    let root = |b: f64, c: f64| (-b + (b * b - 4.0 * c).sqrt()) / 2.0;
    // gamma_0 = L corresponds to a_0^2 + (1 - q) a_0 - 1 = 0
    let mut a = root(1.0 - q, -1.0);
    let mut x = x0.to_vec();
    let mut y = x0.to_vec();
    let mut out = Vec::new();
    for _ in 0..iters {
        let g = grad(obj, &y);
        let x_next: Vec<f64> = y.iter().zip(&g).map(|(yi, gi)| yi - gi / l).collect();
        let a_next = root(a * a - q, -a * a);
        let b = a * (1.0 - a) / (a * a + a_next);
        y = x_next.iter().zip(&x).map(|(xn, xo)| xn + b * (xn - xo)).collect();
        x = x_next;
        a = a_next;
        out.push(x.clone());
    }
    out
}

#[test]
fn apgd_without_constraints_is_the_accelerated_recursion() {
    let mut rng = SplitMix64::new(12);
    for mu_scale in [0.0, 1.0] {
        let (obj, mu, l) = quadratic(&mut rng, 6, 0.5, 20.0);
        let mu = mu * mu_scale;
        let x0 = rng.normal_vec(6);
        let oracle = two_sequence(&obj, &x0, mu, l, 100);
        let mut st = ApgdState::new(x0, l);
        for (k, x) in oracle.iter().enumerate() {
            st = apgd_step(&obj, &ProjectableSet::Whole, &st, mu, l).unwrap();
            assert!(dist(&st.x, x) <= 1e-12 * (1.0 + norm(x)), "mu = {mu}, k = {k}: {}", dist(&st.x, x));
        }
    }
}

/// `L |x - Proj(x - grad f(x) / L)|`.
fn mapping_norm(obj: &dyn Objective, set: &ProjectableSet, x: &[f64], l: f64) -> f64 {
    let g = grad(obj, x);
    let z: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - b / l).collect();
    l * dist(x, &set.project(&z).unwrap())
}

fn run_to_tolerance(obj: &dyn Objective, set: &ProjectableSet, mu: f64, l: f64, accelerated: bool) -> (Vec<f64>, usize) {
    let n = match set {
        ProjectableSet::Box { lo, .. } => lo.len(),
        _ => unreachable!(),
    };
    let mut st = ApgdState::new(vec![0.0; n], l);
    let mut iters = 0;
    while mapping_norm(obj, set, &st.x, l) > 1e-9 {
        if accelerated {
            st = apgd_step(obj, set, &st, mu, l).unwrap();
        } else {
            st.x = pgd_step(obj, set, &st.x, 1.0 / l).unwrap();
        }
        iters += 1;
        assert!(iters < 1_000_000);
    }
    (st.x, iters)
}

#[test]
fn apgd_needs_fewer_iterations_than_pgd_on_a_box() {
    let mut rng = SplitMix64::new(15);
    let (obj, mu, l) = quadratic(&mut rng, 10, 0.01, 10.0);
    for (w, must_be_faster) in [(2.0, true), (5.0, true), (0.5, false)] {
        let set = ProjectableSet::Box { lo: vec![-w; 10], hi: vec![w; 10] };
        let (xp, pgd_iters) = run_to_tolerance(&obj, &set, mu, l, false);
        let (xa, apgd_iters) = run_to_tolerance(&obj, &set, mu, l, true);
        assert!(xp.iter().any(|v| v.abs() == w), "w = {w}: no bound active");
        assert!(dist(&xa, &xp) <= 1e-6, "w = {w}");
        if must_be_faster {
            assert!(apgd_iters < pgd_iters, "w = {w}: apgd {apgd_iters} vs pgd {pgd_iters}");
        }
    }
}

fn small_cs(method: MethodName, iters: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(Experiment::CompressedSensing);
    for (k, v) in [("m", "30"), ("n", "80"), ("spikes", "4"), ("nu", "4"), ("seed", "5")] {
        cfg.set(k, v).unwrap();
    }
    cfg.method = method;
    cfg.iters = iters;
    cfg
}

#[test]
fn baselines_stay_feasible_while_velocity_schemes_may_not() {
    for method in [MethodName::Pgd, MethodName::Apgd] {
        let cfg = small_cs(method, 300);
        let run = run_compressed_sensing(&cfg).unwrap();
        let nu = cfg.instance.nu;
        assert!(run.records.iter().all(|r| r.violation <= 1e-10), "{}", method.name());
        assert!(norm1(&run.x) <= nu + 1e-10);
    }
    let run = run_compressed_sensing(&ExperimentConfig::new(Experiment::CompressedSensing)).unwrap();
    assert_eq!(run.method, MethodName::Alg4);
    assert!(run.records.iter().any(|r| r.violation > 1e-6), "alg4 never left the ball");
}

#[test]
fn apgd_objective_decreases_after_burn_in_on_the_paper_instance() {
    let mut cfg = ExperimentConfig::new(Experiment::CompressedSensing);
    cfg.method = MethodName::Apgd;
    let run = run_compressed_sensing(&cfg).unwrap();
    let f = |k: usize| run.records[k].fx;
    assert!(f(50) > f(100) && f(100) > f(200) && f(200) > f(400));
}

#[test]
fn paper_instance_has_thirteen_unit_spikes() {
    let inst = gen_compressed_sensing(100, 1000, 13, 0.5, 1).unwrap();
    assert_eq!(inst.x_true.iter().filter(|v| **v == 1.0).count(), 13);
    assert_eq!(inst.x_true.iter().filter(|v| **v != 0.0).count(), 13);
    assert_eq!((inst.a.rows(), inst.a.cols(), inst.b.len()), (100, 1000, 100));
}

#[test]
fn trace_csv_reruns_are_byte_identical() {
    let cfg = small_cs(MethodName::Alg5, 150);
    let render = || {
        let run = run_compressed_sensing(&cfg).unwrap();
        let recs: Vec<CsvRecord> = run.records.iter().map(CsvRecord::from).collect();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &cfg.hash(), cfg.instance.seed, &recs, 1).unwrap();
        String::from_utf8(buf).unwrap()
    };
    let (a, b) = (render(), render());
    assert_eq!(numeric_columns(&a), numeric_columns(&b));
    let (hash, seed, recs) = read_trace_csv(&a).unwrap();
    assert_eq!((hash.as_str(), seed), (cfg.hash().as_str(), 5));
    assert_eq!(recs.len(), 151);
    assert_eq!(hash.len(), 16);

    let mut other = cfg.clone();
    other.set("seed", "6").unwrap();
    assert_ne!(other.hash(), cfg.hash());
}

#[test]
fn custom_qp_default_converges() {
    let cfg = ExperimentConfig::new(Experiment::CustomQp);
    for method in ["cgd", "agd_local", "agd_global"] {
        let mut c = cfg.clone();
        c.set("method", method).unwrap();
        let trace = solve(&c).unwrap();
        assert_eq!(trace.status, Status::Converged, "{method}");
    }
}

#[test]
fn illustrative_grid_trajectories() {
    let mut cfg = ExperimentConfig::new(Experiment::Illustrative);
    cfg.iters = 2000;
    let grid = default_grid();
    let trajectories = run_illustrative(&cfg, &grid).unwrap();
    assert_eq!(trajectories.len(), 25);
    for tr in &trajectories {
        assert_eq!(tr.status, Status::Converged, "from ({}, {})", tr.x0, tr.u0);
        assert!(tr.points.len() <= 2001);
        assert!(tr.final_x().abs() <= 1e-6, "from ({}, {}): {}", tr.x0, tr.u0, tr.final_x());
    }
    let pts = region_boundaries(0.5, -2.0, 4.0, -2.0, 2.0);
    assert_abs_diff_eq!(pts[0].2, 1.0);
    assert_eq!(pts.iter().filter(|p| p.0 == 2).count(), 3);
}

