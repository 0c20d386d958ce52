//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured quantity and its pinned tolerance.
//!
//! Exact identities (ultrametricity, tilings, the constant-kernel closed
//! form) are checked in rational arithmetic with no tolerance; numeric
//! identities use 1e-12 for exact-path comparisons and 1e-10 for dense
//! comparisons, matching the library defaults.

use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use ultrawave::changevar::{self, PiecewiseConstantFn};
use ultrawave::wavelet::{self, GridFunction};
use ultrawave::{
    BranchingSpec, Error, ExplicitNode, RadialKernel, TreeAddress, TreeHandle, UltrametricTree,
};

const TOL_EXACT: f64 = 1e-12;
const TOL_DENSE: f64 = 1e-10;

fn handle(spec: BranchingSpec) -> TreeHandle {
    Arc::new(UltrametricTree::build(&spec, None, BigRational::one()).unwrap())
}

fn handle_rooted(spec: BranchingSpec, root: &str) -> TreeHandle {
    let root = TreeAddress::parse(root).unwrap();
    Arc::new(UltrametricTree::build(&spec, Some(&root), BigRational::one()).unwrap())
}

fn random_grid(tree: &TreeHandle, rng: &mut Pcg64) -> GridFunction {
    let values: Vec<Complex64> = (0..tree.leaf_count())
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    GridFunction::new(tree, values).unwrap()
}

fn random_kernel(tree: &TreeHandle, rng: &mut Pcg64) -> RadialKernel {
    let entries: Vec<(TreeAddress, f64)> = tree
        .internal_vertices()
        .into_iter()
        .map(|v| (v, rng.gen::<f64>() * 4.0))
        .collect();
    RadialKernel::explicit(tree, &entries).unwrap()
}

/// The shape battery for the orthonormality and Parseval criteria:
/// homogeneous p ∈ {2,3,5}, the named mixed shapes, a ragged tree, N up
/// to 1024.
fn basis_tree_battery() -> Vec<(String, TreeHandle)> {
    let ragged = BranchingSpec::Explicit(ExplicitNode(vec![
        ExplicitNode(vec![
            ExplicitNode(vec![]),
            ExplicitNode(vec![]),
            ExplicitNode(vec![]),
        ]),
        ExplicitNode(vec![ExplicitNode(vec![]), ExplicitNode(vec![])]),
    ]));
    vec![
        (
            "p=2 depth=2".into(),
            handle(BranchingSpec::homogeneous(2, 2)),
        ),
        (
            "p=2 depth=6".into(),
            handle(BranchingSpec::homogeneous(2, 6)),
        ),
        (
            "p=2 depth=10".into(),
            handle(BranchingSpec::homogeneous(2, 10)),
        ),
        (
            "p=3 depth=2".into(),
            handle(BranchingSpec::homogeneous(3, 2)),
        ),
        (
            "p=3 depth=6".into(),
            handle(BranchingSpec::homogeneous(3, 6)),
        ),
        (
            "p=5 depth=2".into(),
            handle(BranchingSpec::homogeneous(5, 2)),
        ),
        (
            "p=5 depth=4".into(),
            handle(BranchingSpec::homogeneous(5, 4)),
        ),
        (
            "per-level [2,3,2]".into(),
            handle(BranchingSpec::per_level(&[2, 3, 2])),
        ),
        (
            "per-level [5,2]".into(),
            handle(BranchingSpec::per_level(&[5, 2])),
        ),
        (
            "per-level [3,4,4]".into(),
            handle(BranchingSpec::per_level(&[3, 4, 4])),
        ),
        (
            "per-level [2,2,3,4]".into(),
            handle(BranchingSpec::per_level(&[2, 2, 3, 4])),
        ),
        (
            "ragged [3|2]".into(),
            Arc::new(UltrametricTree::build(&ragged, None, BigRational::one()).unwrap()),
        ),
    ]
}

#[test]
fn criterion_01_orthonormality() {
    let start = Instant::now();
    let battery = basis_tree_battery();
    assert!(battery.len() >= 10, "need at least 10 tree shapes");
    let mut worst = 0.0f64;
    let mut largest = 0usize;
    for (label, tree) in &battery {
        let n = tree.leaf_count();
        largest = largest.max(n);
        let gram = wavelet::gram_matrix(tree).unwrap();
        for a in 0..n {
            for b in 0..n {
                let expected = if a == b { 1.0 } else { 0.0 };
                let dev = (gram[(a, b)] - Complex64::new(expected, 0.0)).norm();
                assert!(
                    dev < TOL_EXACT,
                    "gram deviation {dev:.3e} at ({a},{b}) on {label}"
                );
                worst = worst.max(dev);
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(largest == 1024, "battery must reach N = 1024");
    assert!(elapsed < 30.0, "orthonormality suite took {elapsed:.1}s");
    println!(
        "ACCEPTANCE PASS criterion 1 (orthonormality): {} trees, N up to {largest}, \
         max |gram − id| = {worst:.3e} < 1e-12, {elapsed:.1}s < 30s",
        battery.len()
    );
}

#[test]
fn criterion_02_parseval_ball_indicators() {
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for (label, tree) in &basis_tree_battery() {
        for addr in tree.vertices() {
            let mut f = GridFunction::indicator(tree, &addr).unwrap();
            let mu = tree.ball_measure(&addr).unwrap().to_f64().unwrap();
            let scale = 1.0 / mu.sqrt();
            for value in f.values_mut() {
                *value *= scale;
            }
            let energy = wavelet::forward(&f).norm_sq();
            let dev = (energy - 1.0).abs();
            assert!(
                dev < TOL_EXACT,
                "Parseval gap {dev:.3e} at {addr} on {label}"
            );
            worst = worst.max(dev);
            count += 1;
        }
    }
    println!(
        "ACCEPTANCE PASS criterion 2 (Parseval): {count} ball indicators, \
         max |energy − 1| = {worst:.3e} < 1e-12"
    );
}

#[test]
fn criterion_03_diagonalization() {
    let mut rng = Pcg64::seed_from_u64(301);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    let configs: Vec<(TreeHandle, Vec<RadialKernel>)> = vec![
        {
            let t = handle(BranchingSpec::homogeneous(2, 8));
            let kernels = vec![
                RadialKernel::constant(&t, 1.0).unwrap(),
                RadialKernel::power_law(&t, 1.0),
            ];
            (t, kernels)
        },
        {
            let t = handle(BranchingSpec::per_level(&[3, 4, 4]));
            let kernels = vec![
                RadialKernel::constant(&t, 1.0).unwrap(),
                RadialKernel::power_law(&t, 0.5),
                RadialKernel::power_law(&t, 1.0),
                random_kernel(&t, &mut rng),
            ];
            (t, kernels)
        },
        {
            let t = handle(BranchingSpec::per_level(&[2, 3, 2]));
            let kernels = vec![
                RadialKernel::power_law(&t, 0.5),
                random_kernel(&t, &mut rng),
            ];
            (t, kernels)
        },
    ];
    for (tree, kernels) in &configs {
        assert!(tree.leaf_count() <= 256);
        for kernel in kernels {
            for idx in wavelet::indices(tree) {
                let psi = wavelet::synthesize(tree, &idx).unwrap();
                let applied = kernel.apply_dense(&psi).unwrap();
                let lambda = kernel.eigenvalue_series(&idx.vertex).unwrap();
                let mut scaled = psi.clone();
                for value in scaled.values_mut() {
                    *value *= lambda;
                }
                let dev = applied.max_abs_diff(&scaled).unwrap();
                assert!(dev < TOL_DENSE, "Tψ ≠ λψ by {dev:.3e} at {idx:?}");
                worst = worst.max(dev);
                checked += 1;
            }
        }
    }
    println!(
        "ACCEPTANCE PASS criterion 3 (diagonalization): {checked} wavelet×kernel pairs, \
         N up to 256, max |Tψ − λψ| = {worst:.3e} < 1e-10"
    );
}

#[test]
fn criterion_04_eigenvalue_formula_agreement() {
    let mut rng = Pcg64::seed_from_u64(404);
    let trees = [
        handle(BranchingSpec::per_level(&[2, 3, 2])),
        handle(BranchingSpec::homogeneous(2, 5)),
    ];
    let mut worst = 0.0f64;
    let mut kernels = 0usize;
    for tree in &trees {
        for _ in 0..500 {
            let kernel = random_kernel(tree, &mut rng);
            for vertex in tree.internal_vertices() {
                let series = kernel.eigenvalue_series(&vertex).unwrap();
                let integral = kernel.eigenvalue_integral(&vertex).unwrap();
                let scale = series.abs().max(integral.abs()).max(1e-300);
                let rel = (series - integral).abs() / scale;
                assert!(
                    rel < TOL_EXACT,
                    "formulas disagree by {rel:.3e} at {vertex}"
                );
                worst = worst.max(rel);
            }
            kernels += 1;
        }
    }
    assert_eq!(kernels, 1000);
    println!(
        "ACCEPTANCE PASS criterion 4 (eigenvalue formulas): 10^3 random kernels, \
         all vertices, max relative diff = {worst:.3e} < 1e-12"
    );
}

#[test]
fn criterion_05_dense_spectral_equivalence() {
    let mut rng = Pcg64::seed_from_u64(505);
    let sizes = [
        (handle(BranchingSpec::per_level(&[3, 4, 4])), 34usize),
        (handle(BranchingSpec::homogeneous(2, 6)), 33usize),
        (handle(BranchingSpec::homogeneous(2, 8)), 33usize),
    ];
    assert_eq!(sizes[0].0.leaf_count(), 48);
    assert_eq!(sizes[1].0.leaf_count(), 64);
    assert_eq!(sizes[2].0.leaf_count(), 256);
    let mut worst = 0.0f64;
    let mut functions = 0usize;
    for (tree, reps) in &sizes {
        let kernels = [
            random_kernel(tree, &mut rng),
            RadialKernel::power_law(tree, 0.5),
        ];
        for i in 0..*reps {
            let kernel = &kernels[i % kernels.len()];
            let f = random_grid(tree, &mut rng);
            let dense = kernel.apply_dense(&f).unwrap();
            let spectral = kernel.apply_spectral(&f).unwrap();
            let dev = dense.max_abs_diff(&spectral).unwrap();
            assert!(dev < TOL_DENSE, "dense vs spectral gap {dev:.3e}");
            worst = worst.max(dev);
            functions += 1;
        }
    }
    assert_eq!(functions, 100);
    println!(
        "ACCEPTANCE PASS criterion 5 (dense = spectral): 100 random functions, \
         N ∈ {{48, 64, 256}}, max gap = {worst:.3e} < 1e-10"
    );
}

#[test]
fn criterion_06_matrix_self_adjointness_positivity() {
    let mut rng = Pcg64::seed_from_u64(606);
    let mut herm_gap = 0.0f64;
    let mut min_eig = f64::INFINITY;
    for tree in [
        handle(BranchingSpec::homogeneous(2, 7)),
        handle(BranchingSpec::per_level(&[2, 3, 2])),
    ] {
        assert!(tree.leaf_count() <= 128);
        let kernels = [
            RadialKernel::constant(&tree, 1.0).unwrap(),
            RadialKernel::power_law(&tree, 0.5),
            random_kernel(&tree, &mut rng),
        ];
        for kernel in &kernels {
            let m = kernel.dense_matrix().unwrap();
            let n = tree.leaf_count();
            for a in 0..n {
                for b in 0..n {
                    herm_gap = herm_gap.max((m[(a, b)] - m[(b, a)]).abs());
                }
            }
            let eigen = nalgebra::SymmetricEigen::new(m);
            for &e in eigen.eigenvalues.iter() {
                min_eig = min_eig.min(e);
            }
        }
    }
    assert!(herm_gap < TOL_EXACT);
    assert!(min_eig >= -TOL_DENSE);
    println!(
        "ACCEPTANCE PASS criterion 6 (self-adjoint, positive): hermitian gap = \
         {herm_gap:.3e} < 1e-12, min eigenvalue = {min_eig:.3e} ≥ −1e-10"
    );
}

#[test]
fn criterion_07_ultrametricity() {
    // Exhaustive on N ≤ 64 with the root at the top and at depth ≥ 1 so all
    // three distance cases execute.
    let exhaustive = [
        handle(BranchingSpec::homogeneous(2, 6)),
        handle_rooted(BranchingSpec::homogeneous(2, 6), "01"),
        handle_rooted(BranchingSpec::per_level(&[2, 3, 2]), "10"),
        handle_rooted(BranchingSpec::per_level(&[5, 2]), "3"),
    ];
    let mut triples = 0usize;
    for tree in &exhaustive {
        let leaves = tree.enumerate_leaves();
        let n = leaves.len();
        assert!(n <= 64);
        let mut d = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                d[i][j] = tree.distance(&leaves[i], &leaves[j]).unwrap();
            }
        }
        for i in 0..n {
            assert!(d[i][i].is_zero());
            for j in 0..n {
                assert_eq!(d[i][j], d[j][i]);
                for k in 0..n {
                    let max = d[i][k].clone().max(d[j][k].clone());
                    assert!(d[i][j] <= max, "strong triangle violated");
                    triples += 1;
                }
            }
        }
    }

    // Random triples on a larger tree with an interior root.
    let tree = handle_rooted(BranchingSpec::homogeneous(3, 5), "102");
    let leaves = tree.enumerate_leaves();
    let n = leaves.len();
    let mut rng = Pcg64::seed_from_u64(707);
    for _ in 0..10_000 {
        let (i, j, k) = (
            rng.gen_range(0..n),
            rng.gen_range(0..n),
            rng.gen_range(0..n),
        );
        let dij = tree.distance(&leaves[i], &leaves[j]).unwrap();
        let dik = tree.distance(&leaves[i], &leaves[k]).unwrap();
        let djk = tree.distance(&leaves[j], &leaves[k]).unwrap();
        assert!(dij <= dik.clone().max(djk.clone()));
    }
    println!(
        "ACCEPTANCE PASS criterion 7 (ultrametricity): exact rational strong triangle, \
         {triples} exhaustive triples (roots at depth 0 and ≥ 1) + 10^4 random triples at N=243"
    );
}

#[test]
fn criterion_08_change_of_variable_suite() {
    let mut rng = Pcg64::seed_from_u64(808);

    // Hölder inequality, exact, 10^4 random pairs across two trees.
    for tree in [
        handle(BranchingSpec::per_level(&[2, 3, 2])),
        handle(BranchingSpec::homogeneous(3, 4)),
    ] {
        let leaves = tree.enumerate_leaves();
        let n = leaves.len();
        for _ in 0..5_000 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let (gap, ultra) = changevar::holder_gap(&tree, &leaves[i], &leaves[j]).unwrap();
            assert!(gap <= ultra, "Hölder violated at ({i},{j})");
        }
    }

    // Ball intervals tile exactly with length == measure.
    for tree in [
        handle(BranchingSpec::per_level(&[2, 3, 2])),
        handle(BranchingSpec::per_level(&[5, 2])),
        handle(BranchingSpec::homogeneous(2, 5)),
    ] {
        for vertex in tree.vertices() {
            let (left, right) = changevar::ball_interval(&tree, &vertex).unwrap();
            assert_eq!(&right - &left, tree.ball_measure(&vertex).unwrap());
            let p = tree.branching_at(&vertex).unwrap();
            if p > 0 {
                let mut cursor = left;
                for k in 0..p {
                    let (a, b) = changevar::ball_interval(&tree, &vertex.child(k)).unwrap();
                    assert_eq!(a, cursor, "child intervals must tile");
                    cursor = b;
                }
                assert_eq!(cursor, right);
            }
        }
    }

    // Exported basis orthonormal in L²(ℝ₊).
    let mut worst = 0.0f64;
    for tree in [
        handle(BranchingSpec::per_level(&[2, 3, 2])),
        handle(BranchingSpec::homogeneous(3, 3)),
    ] {
        let exported: Vec<PiecewiseConstantFn> = wavelet::indices(&tree)
            .iter()
            .map(|idx| changevar::export_wavelet(&tree, idx).unwrap())
            .collect();
        for (a, fa) in exported.iter().enumerate() {
            for (b, fb) in exported.iter().enumerate() {
                let expected = if a == b { 1.0 } else { 0.0 };
                let dev = (fa.inner_product(fb) - Complex64::new(expected, 0.0)).norm();
                assert!(dev < TOL_EXACT, "export orthonormality gap {dev:.3e}");
                worst = worst.max(dev);
            }
        }
    }

    // Haar reduction: homogeneous p=2 exports match the Haar system up to a
    // unimodular scalar per function, piece by piece with exact breakpoints.
    let tree = handle(BranchingSpec::homogeneous(2, 4));
    let mut haar_checked = 0usize;
    for idx in wavelet::indices(&tree) {
        assert_eq!(idx.j, 1);
        let exported = changevar::export_wavelet(&tree, &idx).unwrap();
        let d = idx.vertex.len() as u32;
        let width = BigRational::new(BigInt::one(), BigInt::from(1u64 << d));
        let left = changevar::rho(&tree, &idx.vertex).unwrap();
        // The support starts at an integer multiple of 2^{-d}.
        let n = (&left / &width).to_integer();
        assert_eq!(BigRational::from_integer(n) * &width, left);
        let half = &width / BigInt::from(2);
        let amplitude = (1u64 << d) as f64;
        let amplitude = amplitude.sqrt();
        let reference = PiecewiseConstantFn::new(
            vec![left.clone(), &left + &half, &left + &width],
            vec![
                Complex64::new(amplitude, 0.0),
                Complex64::new(-amplitude, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(exported.breakpoints(), reference.breakpoints());
        let scalar = exported.values()[0] / reference.values()[0];
        assert!(
            (scalar.norm() - 1.0).abs() < TOL_EXACT,
            "scalar not unimodular"
        );
        for (ev, rv) in exported.values().iter().zip(reference.values()) {
            assert!((ev - scalar * rv).norm() < TOL_EXACT);
        }
        haar_checked += 1;
    }
    assert_eq!(haar_checked, 15);
    println!(
        "ACCEPTANCE PASS criterion 8 (change of variable): Hölder exact on 10^4 pairs, \
         exact interval tiling, exported orthonormality gap = {worst:.3e} < 1e-12, \
         Haar reduction on {haar_checked} wavelets"
    );
}

#[test]
fn criterion_09_constant_kernel_closed_form() {
    // λ_I == c·μ(D_top) for every vertex: rational arithmetic, no tolerance.
    let c = BigRational::new(BigInt::from(7), BigInt::from(3));
    let specs = [
        (BranchingSpec::homogeneous(2, 6), "1"),
        (BranchingSpec::per_level(&[2, 3, 2]), "3/2"),
        (BranchingSpec::homogeneous(5, 3), "2/7"),
    ];
    let mut vertices = 0usize;
    for (spec, top_measure) in &specs {
        let tree =
            Arc::new(UltrametricTree::build(spec, None, top_measure.parse().unwrap()).unwrap());
        let expected = &c * tree.top_measure();
        for vertex in tree.internal_vertices() {
            // Rational evaluation of the eigenvalue series.
            let mut lambda = &c * tree.ball_measure(&vertex).unwrap();
            let mut walk = vertex.clone();
            while let Some(up) = walk.parent() {
                let p = BigRational::from_integer(BigInt::from(tree.branching_at(&up).unwrap()));
                lambda += &c * tree.ball_measure(&up).unwrap() * (BigRational::one() - p.recip());
                walk = up;
            }
            assert_eq!(lambda, expected, "telescoping failed at {vertex}");
            vertices += 1;
        }

        // The floating-point implementation lands on the same closed form.
        let kernel = RadialKernel::constant(&tree, c.to_f64().unwrap()).unwrap();
        let closed = (&c * tree.top_measure()).to_f64().unwrap();
        for vertex in tree.internal_vertices() {
            let lambda = kernel.eigenvalue_series(&vertex).unwrap();
            assert!((lambda - closed).abs() <= 1e-12 * closed.abs());
        }
    }
    println!(
        "ACCEPTANCE PASS criterion 9 (constant kernel): λ_I == c·μ(D_top) exactly \
         (rational identity) at {vertices} vertices across {} trees",
        specs.len()
    );
}

#[test]
fn criterion_10_performance_and_size_guard() {
    let tree = handle(BranchingSpec::homogeneous(2, 16));
    assert_eq!(tree.leaf_count(), 65536);
    let mut rng = Pcg64::seed_from_u64(1010);
    let f = random_grid(&tree, &mut rng);

    let start = Instant::now();
    let coeffs = wavelet::forward(&f);
    let back = wavelet::inverse(&coeffs);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 1.0,
        "forward+inverse at N=65536 took {elapsed:.3}s"
    );
    assert!(back.max_abs_diff(&f).unwrap() < TOL_EXACT);

    // Dense verification paths are excluded at this size by the guards.
    assert!(matches!(
        wavelet::gram_matrix(&tree),
        Err(Error::SizeGuard { .. })
    ));
    let kernel = RadialKernel::constant(&tree, 1.0).unwrap();
    assert!(matches!(
        kernel.dense_matrix(),
        Err(Error::SizeGuard { .. })
    ));
    println!(
        "ACCEPTANCE PASS criterion 10 (performance): forward+inverse at N=65536 in \
         {:.0} ms < 1000 ms; dense paths refused by the size guard",
        elapsed * 1e3
    );
}
