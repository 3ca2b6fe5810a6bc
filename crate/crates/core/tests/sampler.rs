mod common;

use common::{MomentAccumulator, MvnSimulator};
use proptest::prelude::*;
use roughvol::kernels::{cross_cov_yc_dv, r_y, variance_y};
use roughvol::rng::{ReplicationKey, StreamRole};
use roughvol::sampler::*;
use roughvol::{Error, ModelParams};

fn default_params() -> ModelParams {
    ModelParams::default()
}

#[test]
fn one_step_layout() {
    let p = default_params();
    let g = Grid::new(1, 1.0).unwrap();
    let c = build_covariance(&p, &g).unwrap();
    assert_eq!(c.dim(), 3);
    assert_eq!(c.c22(0, 0), 1.0);
    assert_eq!(c.c12(0, 0), 0.0);
    assert_eq!(c.c12(1, 0), cross_cov_yc_dv(&p, 1.0, 0.0, 1.0).unwrap());
}

#[test]
fn block_structure_is_exact() {
    let p = default_params().with_t_final(2.0).unwrap();
    let g = Grid::new(16, 2.0).unwrap();
    let c = build_covariance(&p, &g).unwrap();
    let n = g.n();
    for i in 0..=n {
        assert_eq!(c.c11(i, i), variance_y(&p));
        for j in 0..n {
            if i <= j {
                assert_eq!(c.c12(i, j), 0.0);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            assert_eq!(c.c22(i, j), if i == j { g.step() } else { 0.0 });
        }
    }
    for i in 0..c.dim() {
        for j in 0..c.dim() {
            assert_eq!(c.full(i, j), c.full(j, i));
        }
    }
}

#[test]
fn covariance_matches_brute_force_moving_average() {
    let p = default_params();
    let g = Grid::new(4, 1.0).unwrap();
    let c = build_covariance(&p, &g).unwrap();
    let times = g.times();
    let sim = MvnSimulator::new(p.hurst, p.lambda, p.theta, &times, 60.0, 0.05);
    let inc: Vec<(usize, usize)> = (0..4)
        .map(|j| (sim.edge_index(times[j]), sim.edge_index(times[j + 1])))
        .collect();
    let mut rng = MvnSimulator::rng(4);
    let mut z = vec![0.0; sim.cells()];
    let mut out = Vec::new();
    let mut acc = MomentAccumulator::new(9);
    for _ in 0..100_000 {
        sim.sample_into(&mut rng, &mut z, &inc, &mut out);
        acc.push(&out);
    }
    let est = acc.finish();
    for i in 0..9 {
        for j in 0..=i {
            let (m, se) = est.get(i, j);
            let want = c.full(i, j);
            assert!((m - want).abs() <= 3.0 * se, "({i},{j}): {m} +- {se} vs {want}");
        }
    }
}

#[test]
fn cholesky_reconstructs_the_covariance() {
    let p = default_params();
    for n in [64, 128, 256] {
        let c = build_covariance(&p, &Grid::new(n, 1.0).unwrap()).unwrap();
        let l = cholesky_factor(&c).unwrap();
        assert_eq!(l.dim(), 2 * n + 1);
        let err = l.max_reconstruction_error(c.full_matrix());
        assert!(err <= 1e-10, "n = {n}: {err}");
        for i in 0..l.dim() {
            for j in i + 1..l.dim() {
                assert_eq!(l.get(i, j), 0.0);
            }
        }
    }
}

#[test]
fn zero_normals_give_the_mean_path() {
    let p = default_params().with_mu(1.25).unwrap();
    let g = Grid::new(5, 1.0).unwrap();
    let l = cholesky_factor(&build_covariance(&p, &g).unwrap()).unwrap();
    let path = sample_joint_from_normals(&l, &g, &p, &[0.0; 11], &[0.0; 5], None).unwrap();
    assert!(path.y.iter().all(|&y| y == 1.25));
    assert!(path.dv.iter().chain(&path.dw).all(|&v| v == 0.0));
}

/// Square root of the circulant embedding restricted to the grid: the
/// would-be cross block of the shortcut that reuses the `Y` normals for `dV`.
fn shortcut_cross_block(p: &ModelParams, g: &Grid) -> Vec<Vec<f64>> {
    let e = CirculantEmbedding::new(p, g).unwrap();
    let m = e.size();
    let s = |lag: usize| -> f64 {
        e.eigenvalues()
            .iter()
            .enumerate()
            .map(|(l, ev)| ev.sqrt() * (2.0 * std::f64::consts::PI * (l * lag) as f64 / m as f64).cos())
            .sum::<f64>()
            / m as f64
    };
    let sd = g.step().sqrt();
    (0..=g.n())
        .map(|i| (0..g.n()).map(|j| sd * s((i + m - j) % m)).collect())
        .collect()
}

#[test]
fn joint_samples_reproduce_the_covariance_and_not_the_shortcut() {
    let p = default_params();
    let g = Grid::new(8, 1.0).unwrap();
    let c = build_covariance(&p, &g).unwrap();
    let l = cholesky_factor(&c).unwrap();
    let dim = c.dim();
    let mut acc = MomentAccumulator::new(dim + g.n());
    let mut x = vec![0.0; dim + g.n()];
    for rep in 0..100_000 {
        let path = sample_joint(&l, &g, &p, ReplicationKey::new(11, rep)).unwrap();
        x[..=g.n()].copy_from_slice(&path.y);
        x[g.n() + 1..dim].copy_from_slice(&path.dv);
        x[dim..].copy_from_slice(&path.dw);
        acc.push(&x);
    }
    let est = acc.finish();
    for i in 0..dim {
        for j in 0..=i {
            let (m, se) = est.get(i, j);
            assert!((m - c.full(i, j)).abs() <= 4.0 * se, "({i},{j})");
        }
    }
    for a in 0..g.n() {
        for b in 0..g.n() {
            let (m, se) = est.get(g.n() + 1 + a, dim + b);
            assert!(m.abs() <= 4.0 * se, "dv {a} dw {b}");
            let (m, se) = est.get(dim + a, dim + b);
            let want = if a == b { g.step() } else { 0.0 };
            assert!((m - want).abs() <= 4.0 * se);
        }
    }
    let shortcut = shortcut_cross_block(&p, &g);
    let mut rejected = 0;
    for i in 0..=g.n() {
        for j in 0..g.n() {
            let (m, se) = est.get(i, g.n() + 1 + j);
            if (m - shortcut[i][j]).abs() > 10.0 * se {
                rejected += 1;
            }
        }
    }
    assert!(rejected > g.n(), "only {rejected} entries separate the shortcut");
}

#[test]
fn davis_harte_marginals() {
    let p = default_params();
    let g = Grid::new(64, 1.0).unwrap();
    let e = CirculantEmbedding::new(&p, &g).unwrap();
    assert_eq!(e.size(), 256);
    let mut acc = MomentAccumulator::new(g.n() + 1);
    for rep in 0..100_000 {
        acc.push(&e.sample(&p, ReplicationKey::new(3, rep)));
    }
    let est = acc.finish();
    let v = variance_y(&p);
    for i in 0..=g.n() {
        let (m, se) = est.get(i, i);
        assert!((m - v).abs() <= 4.0 * se, "variance at {i}");
        for k in [1, 2, 4] {
            if i + k <= g.n() {
                let (m, se) = est.get(i, i + k);
                let want = r_y(&p, k as f64 * g.step()).unwrap();
                assert!((m - want).abs() <= 4.0 * se, "lag {k} at {i}");
            }
        }
    }
}

/// Per-path lag averages `(1/(n+1-k)) sum_i y_i y_{i+k}` for every lag.
fn lag_profile(y: &[f64], mu: f64) -> Vec<f64> {
    let n = y.len() - 1;
    (0..=n)
        .map(|k| (0..=n - k).map(|i| (y[i] - mu) * (y[i + k] - mu)).sum::<f64>() / (n + 1 - k) as f64)
        .collect()
}

fn mean_and_se(rows: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let n = rows.len() as f64;
    (0..rows[0].len())
        .map(|k| {
            let m = rows.iter().map(|r| r[k]).sum::<f64>() / n;
            let v = rows.iter().map(|r| (r[k] - m).powi(2)).sum::<f64>() / (n - 1.0);
            (m, (v / n).sqrt())
        })
        .collect()
}

#[test]
fn davis_harte_and_cholesky_agree_in_law() {
    let p = default_params().with_mu(-0.3).unwrap();
    let g = Grid::new(64, 1.0).unwrap();
    let e = CirculantEmbedding::new(&p, &g).unwrap();
    let l = cholesky_factor(&build_covariance(&p, &g).unwrap()).unwrap();
    let reps = 100_000;
    let dh: Vec<Vec<f64>> = (0..reps)
        .map(|r| lag_profile(&e.sample(&p, ReplicationKey::new(5, r)), p.mu))
        .collect();
    let chol: Vec<Vec<f64>> = (0..reps)
        .map(|r| lag_profile(&sample_joint(&l, &g, &p, ReplicationKey::new(6, r)).unwrap().y, p.mu))
        .collect();
    for (k, ((a, sa), (b, sb))) in mean_and_se(&dh).into_iter().zip(mean_and_se(&chol)).enumerate() {
        assert!((a - b).abs() <= 4.0 * sa.hypot(sb), "lag {k}: {a} vs {b}");
    }
}

#[test]
fn coarsened_paths_have_the_coarse_law() {
    let p = default_params();
    let fine = Grid::new(8, 1.0).unwrap();
    let coarse = Grid::new(4, 1.0).unwrap();
    let l = cholesky_factor(&build_covariance(&p, &fine).unwrap()).unwrap();
    let c = build_covariance(&p, &coarse).unwrap();
    let mut acc = MomentAccumulator::new(c.dim());
    let mut x = vec![0.0; c.dim()];
    for rep in 0..100_000 {
        let path = coarsen(&sample_joint(&l, &fine, &p, ReplicationKey::new(8, rep)).unwrap(), 2).unwrap();
        assert_eq!(path.grid, coarse);
        x[..5].copy_from_slice(&path.y);
        x[5..].copy_from_slice(&path.dv);
        acc.push(&x);
    }
    let est = acc.finish();
    for i in 0..c.dim() {
        for j in 0..=i {
            let (m, se) = est.get(i, j);
            assert!((m - c.full(i, j)).abs() <= 4.0 * se, "({i},{j})");
        }
    }
}

#[test]
fn sampling_is_deterministic_per_key() {
    let p = default_params();
    let g = Grid::new(32, 1.0).unwrap();
    let l = cholesky_factor(&build_covariance(&p, &g).unwrap()).unwrap();
    let k = ReplicationKey::new(42, 17);
    let a = sample_joint(&l, &g, &p, k).unwrap();
    let b = sample_joint(&l, &g, &p, k).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.seed_info, Some(k));
    assert_ne!(a, sample_joint(&l, &g, &p, ReplicationKey::new(42, 18)).unwrap());
    let y1 = sample_fou_davis_harte(&p, &g, k).unwrap();
    let y2 = sample_fou_davis_harte(&p, &g, k).unwrap();
    assert_eq!(y1, y2);
    assert_eq!(y1.len(), 33);
    let mut dh = k.stream(StreamRole::DavisHarte);
    let e = CirculantEmbedding::new(&p, &g).unwrap();
    assert_eq!(e.sample_from_normals(p.mu, &dh.standard_normals(e.size())), y1);
}

#[test]
fn incompatible_inputs_are_rejected() {
    let p = default_params();
    let g = Grid::new(4, 1.0).unwrap();
    let l = cholesky_factor(&build_covariance(&p, &g).unwrap()).unwrap();
    let path = sample_joint(&l, &g, &p, ReplicationKey::new(1, 1)).unwrap();
    assert!(matches!(coarsen(&path, 3), Err(Error::IncompatibleGrids(_))));
    assert!(matches!(
        sample_joint(&l, &Grid::new(5, 1.0).unwrap(), &p, ReplicationKey::new(1, 1)),
        Err(Error::IncompatibleGrids(_))
    ));
    assert!(matches!(
        CholeskyFactor::factor(2, &[1.0, 2.0, 2.0, 1.0]),
        Err(Error::NotPositiveDefinite { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coarsening_composes_and_telescopes(
        k1 in 0usize..4, k2 in 0usize..4, base in 1usize..4, seed in any::<u64>()
    ) {
        let (f1, f2) = (1usize << k1, 1usize << k2);
        let n = base * f1 * f2;
        let g = Grid::new(n, 1.5).unwrap();
        let mut s = ReplicationKey::new(seed, 0).stream(StreamRole::Joint);
        let path = JointPath::new(g, s.standard_normals(n + 1), s.standard_normals(n), s.standard_normals(n), None).unwrap();
        let once = coarsen(&path, f1 * f2).unwrap();
        let twice = coarsen(&coarsen(&path, f1).unwrap(), f2).unwrap();
        prop_assert_eq!(&once.y, &twice.y);
        prop_assert_eq!(once.grid, twice.grid);
        prop_assert!(once.grid.t_final() == 1.5 && g.is_refinement_of(&once.grid));
        for (a, b) in once.dv.iter().zip(&twice.dv) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let total: f64 = path.dw.iter().sum();
        let coarse_total: f64 = once.dw.iter().sum();
        prop_assert!((total - coarse_total).abs() <= 1e-10);
        prop_assert_eq!(once.y[once.grid.n()], path.y[n]);
    }

    #[test]
    fn grid_times_are_ordered(n in 1usize..500, t in 0.01f64..10.0) {
        let g = Grid::new(n, t).unwrap();
        let times = g.times();
        prop_assert_eq!(times.len(), n + 1);
        prop_assert_eq!(times[0], 0.0);
        prop_assert_eq!(times[n], t);
        prop_assert!(times.windows(2).all(|w| w[0] < w[1]));
    }
}
