//! End-to-end acceptance checks; prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{piece_union, random_graph, random_orthogonal, rng, with_spectrum, GAPPED_PIECES};
use nalgebra::{Complex, DMatrix};
use qspectral::classical::{eigen_decompose, Partition};
use qspectral::cluster_opt::{
    binary_search_threshold, build_indicator, hill_climb, objective, quantum_count_probe, ClimbConfig,
};
use qspectral::data_graph::{
    build_knn_graph, build_laplacian, connected_components, generate_dataset, DatasetKind, GeneratorParams, Laplacian,
    SimilarityGraph,
};
use qspectral::harness::{run_count, run_pipeline, RunConfig};
use qspectral::qsim::{
    apply_qpe, dense_index, grover_angle, grover_iteration_count, grover_run, marked_probability,
    prepare_entangled_state, quantum_counting, reduced_density, Backend, CountingOptions, DensityMatrix,
    QuantumState, RegisterLayout, ThresholdOracle,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Circuit stages up to the phase-estimated state.
fn estimated(lap: &DMatrix<f64>, n: u32, t: Option<u32>, backend: Backend) -> Result<(RegisterLayout, QuantumState), String> {
    let mut layout = RegisterLayout::for_qubits(n).map_err(err)?;
    if let Some(t) = t {
        layout = layout.with_t(t).map_err(err)?;
    }
    let psi0 = prepare_entangled_state(&layout, backend).map_err(err)?;
    let psi = apply_qpe(&psi0, lap, &layout).map_err(err)?;
    Ok((layout, psi))
}

fn moons_run() -> Result<qspectral::harness::RunReport, String> {
    run_pipeline(&RunConfig { seed: 7, ..RunConfig::generated(DatasetKind::Moons, 256, 7) }).map_err(err)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let report = moons_run()?;
    let secs = start.elapsed().as_secs_f64();
    let ari = report.agreement.vs_components;
    check(
        report.k == 2 && ari >= 0.95 && secs < 60.0,
        format!("k={} ARI vs components {ari:.4} in {secs:.2}s", report.k),
    )
}

fn criterion_2() -> Outcome {
    let blobs = run_pipeline(&RunConfig { seed: 7, ..RunConfig::generated(DatasetKind::Blobs, 256, 7) }).map_err(err)?;
    let ari = blobs.agreement.vs_classical_spectral;
    let moons = moons_run()?;
    let (raw, quantum) = (moons.agreement.kmeans_raw_vs_components, moons.agreement.vs_components);
    check(
        blobs.k == 3 && ari >= 0.95 && raw < quantum,
        format!(
            "blobs k={} ARI vs classical spectral {ari:.4}; moons ARI vs components k-means raw {raw:.4} < quantum {quantum:.4}",
            blobs.k
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut instances = 0;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut seed = 0u64;
    while instances < 24 {
        seed += 1;
        let n = 2 + (instances % 3) as u32;
        let big_n = 1usize << n;
        let (graph, _) = piece_union(big_n, big_n, &[0, 1, 2, 3, 4, 5, 6, 7], 300 + seed);
        let lap = build_laplacian(&graph);
        let lambda = if seed.is_multiple_of(2) { 0.125 } else { 0.25 };
        let k = eigen_decompose(&lap.rescaled).map_err(err)?.count_below(lambda - 1e-9);
        if 2 * k >= big_n {
            continue;
        }
        instances += 1;
        let mut rhos = Vec::new();
        let mut counts = Vec::new();
        for backend in [Backend::Dense, Backend::Ideal] {
            let (layout, psi) = estimated(&lap.rescaled, n, Some(3), backend)?;
            let oracle = ThresholdOracle::new(lambda, layout.t).map_err(err)?;
            let r = grover_iteration_count(k, big_n).map_err(err)?;
            rhos.push(reduced_density(&grover_run(&psi, &oracle, r).map_err(err)?).map_err(err)?);
            let est = quantum_counting(&psi, &oracle, &CountingOptions::from_layout(&layout, seed)).map_err(err)?;
            counts.push(est.k);
        }
        let dist = rhos[0].trace_distance(&rhos[1]).map_err(err)?;
        worst = worst.max(dist);
        if dist > 1e-8 || counts[0] != counts[1] || counts[1] != k {
            failures.push(format!("N={big_n} seed {seed}: distance {dist:e}, counts {counts:?} vs {k}"));
        }
    }
    check(
        failures.is_empty(),
        format!("{instances} instances, max trace distance {worst:.1e}{}", summarize(&failures)),
    )
}

fn summarize(failures: &[String]) -> String {
    if failures.is_empty() {
        String::new()
    } else {
        format!("; {} failing: {}", failures.len(), failures.join(" | "))
    }
}

fn criterion_4() -> Outcome {
    let mut worst_law = 0.0f64;
    let mut low = Vec::new();
    let mut checked = 0;
    for (n, big_n) in [(4u32, 16usize), (5, 32), (6, 64)] {
        for k in 1..=3usize {
            let mut r = rng(40 + big_n as u64 + k as u64);
            let mut values: Vec<f64> = (0..big_n).map(|i| if i < k { 0.0 } else { r.random_range(0.25..0.95) }).collect();
            values.sort_by(f64::total_cmp);
            let m = with_spectrum(&values, big_n as u64 * 10 + k as u64);
            let (layout, psi) = estimated(&m, n, None, Backend::Ideal)?;
            let oracle = ThresholdOracle::new(0.0625, layout.t).map_err(err)?;
            let rounds = grover_iteration_count(k, big_n).map_err(err)?;
            let theta = grover_angle(k, big_n).map_err(err)?;
            let p = marked_probability(&grover_run(&psi, &oracle, rounds).map_err(err)?, &oracle).map_err(err)?;
            let law = (((2 * rounds + 1) as f64) * theta / 2.0).sin().powi(2);
            worst_law = worst_law.max((p - law).abs());
            // k ≪ N taken as k/N ≤ 1/16
            if 16 * k <= big_n {
                checked += 1;
                if p <= 0.9 {
                    low.push(format!("(N={big_n}, k={k}, r={rounds}) p={p:.4}"));
                }
            }
        }
    }
    check(
        worst_law <= 1e-9 && low.is_empty(),
        format!(
            "max |p - sin²((2r+1)θ/2)| = {worst_law:.1e}; {} of {checked} cases with k/N ≤ 1/16 at or below 0.9{}",
            low.len(),
            if low.is_empty() { String::new() } else { format!(": {}", low.join(", ")) }
        ),
    )
}

fn random_unitary(n: usize, seed: u64) -> DMatrix<Complex<f64>> {
    let mut r = rng(seed);
    let g = DMatrix::<Complex<f64>>::from_fn(n, n, |_, _| Complex::new(r.sample(StandardNormal), r.sample(StandardNormal)));
    g.qr().q()
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 1..=4u32 {
        let big_n = 1usize << n;
        let layout = RegisterLayout::for_qubits(n).map_err(err)?.with_t(1).map_err(err)?;
        let psi = prepare_entangled_state(&layout, Backend::Dense).map_err(err)?;
        let amps = psi.amplitudes().expect("dense");
        for b in 0..50u64 {
            // half real orthogonal, half complex unitary bases
            let v = if b % 2 == 0 {
                random_orthogonal(big_n, 500 + b).map(|x| Complex::new(x, 0.0))
            } else {
                random_unitary(big_n, 500 + b)
            };
            let norm = 1.0 / (big_n as f64).sqrt();
            let mut overlap = Complex::new(0.0, 0.0);
            for e in 0..big_n {
                for a in 0..big_n {
                    let target: Complex<f64> = (0..big_n).map(|j| v[(e, j)] * v[(a, j)].conj()).sum::<Complex<f64>>() * norm;
                    overlap += amps[dense_index(0, e, a, n)].conj() * target;
                }
            }
            worst = worst.max((overlap - Complex::new(1.0, 0.0)).norm());
            cases += 1;
        }
    }
    check(worst <= 1e-10, format!("{cases} bases, max |overlap - 1| = {worst:.1e}"))
}

fn laplacian_violations(lap: &Laplacian, d: usize, components: usize) -> Result<Vec<String>, String> {
    let mut v = Vec::new();
    let n = lap.size();
    let row_sum = (0..n).map(|i| lap.raw.row(i).sum().abs()).fold(0.0, f64::max);
    if row_sum > 1e-12 {
        v.push(format!("row sum {row_sum:e}"));
    }
    if lap.max_row_nonzeros() > d {
        v.push(format!("row sparsity {}", lap.max_row_nonzeros()));
    }
    let raw = eigen_decompose(&lap.raw).map_err(err)?;
    if raw.values[0] < -1e-10 {
        v.push(format!("min eigenvalue {:e}", raw.values[0]));
    }
    let scaled = eigen_decompose(&lap.rescaled).map_err(err)?;
    if *scaled.values.last().unwrap() >= 1.0 {
        v.push("rescaled eigenvalue ≥ 1".into());
    }
    let zeros = raw.count_below(1e-8);
    if zeros != components {
        v.push(format!("{zeros} zero eigenvalues vs {components} components"));
    }
    Ok(v)
}

fn criterion_6() -> Outcome {
    let mut graphs = 0;
    let mut failures = Vec::new();
    for kind in [DatasetKind::Moons, DatasetKind::Blobs, DatasetKind::Rings] {
        for n_points in [16usize, 64, 256] {
            for d in [2usize, 4, 8] {
                for seed in 0..3u64 {
                    let data = generate_dataset(kind, n_points, seed, &GeneratorParams::default()).map_err(err)?;
                    let graph = build_knn_graph(&data, d).map_err(err)?;
                    let (components, _) = connected_components(&graph);
                    let v = laplacian_violations(&build_laplacian(&graph), d, components)?;
                    graphs += 1;
                    if !v.is_empty() {
                        failures.push(format!("{kind:?} N={n_points} d={d} seed {seed}: {}", v.join(", ")));
                    }
                }
            }
        }
    }
    for seed in 0..20u64 {
        let g = random_graph(16 + (seed as usize % 3) * 8, 5, 20, 900 + seed);
        let (components, _) = connected_components(&g);
        let v = laplacian_violations(&build_laplacian(&g), 5, components)?;
        graphs += 1;
        if !v.is_empty() {
            failures.push(format!("random graph {seed}: {}", v.join(", ")));
        }
    }
    check(failures.is_empty(), format!("{graphs} graphs checked{}", summarize(&failures)))
}

fn leading_rho(lap: &DMatrix<f64>, k: usize) -> Result<(DMatrix<f64>, DMatrix<f64>), String> {
    let spectrum = eigen_decompose(lap).map_err(err)?;
    let u = spectrum.leading_vectors(k);
    let rho = &u * u.transpose() / k as f64;
    Ok((u, rho))
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..40u64 {
        let mut r = rng(700 + seed);
        let n = r.random_range(4..=32usize);
        let k = r.random_range(1..=4usize.min(n));
        let g = random_graph(n, 4, n, 700 + seed);
        let (u, rho) = leading_rho(&build_laplacian(&g).raw, k)?;
        let labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { r.random_range(0..k) }).collect();
        let x = build_indicator(&Partition::new(labels, k).map_err(err)?).map_err(err)?;
        let got = objective(&DensityMatrix::from_real(&rho).map_err(err)?, &x).map_err(err)?;
        let xxt = x.matrix() * x.matrix().transpose();
        let direct: f64 = (0..k).map(|i| (u.column(i).transpose() * &xxt * u.column(i))[(0, 0)]).sum::<f64>() / k as f64;
        worst = worst.max((got - direct).abs());
    }
    let mut worst_one = 0.0f64;
    for seed in 0..20u64 {
        let n = 8 << (seed % 3);
        let (g, components) = piece_union(n, n / 2, &GAPPED_PIECES, 800 + seed);
        let (_, rho) = leading_rho(&build_laplacian(&g).raw, components)?;
        let (_, labels) = connected_components(&g);
        let x = build_indicator(&Partition::from_labels(&labels)).map_err(err)?;
        let got = objective(&DensityMatrix::from_real(&rho).map_err(err)?, &x).map_err(err)?;
        worst_one = worst_one.max((got - 1.0).abs());
    }
    check(
        worst <= 1e-12 && worst_one <= 1e-12,
        format!("max identity error {worst:.1e} over 40 instances; max |objective - 1| on components {worst_one:.1e}"),
    )
}

/// Largest objective over every labeling with all `k` clusters occupied.
fn brute_force(rho: &DMatrix<f64>, k: usize) -> f64 {
    let n = rho.nrows();
    let mut labels = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    loop {
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        if sizes.iter().all(|&s| s > 0) {
            let mut value = 0.0;
            for a in 0..n {
                for b in 0..n {
                    if labels[a] == labels[b] {
                        value += rho[(a, b)] / sizes[labels[a]] as f64;
                    }
                }
            }
            best = best.max(value);
        }
        let mut i = 0;
        while i < n && labels[i] == k - 1 {
            labels[i] = 0;
            i += 1;
        }
        if i == n {
            return best;
        }
        labels[i] += 1;
    }
}

fn criterion_8() -> Outcome {
    let mut hits = 0;
    let trials = 50;
    for seed in 0..trials as u64 {
        let mut r = rng(1000 + seed);
        let n = r.random_range(4..=10usize);
        let k = r.random_range(1..=3usize);
        let g = random_graph(n, 4, n + 2, 1000 + seed);
        let (_, rho) = leading_rho(&build_laplacian(&g).raw, k)?;
        let best = brute_force(&rho, k);
        let density = DensityMatrix::from_real(&rho).map_err(err)?;
        let res = hill_climb(&density, k, &ClimbConfig { restarts: 10, seed, ..ClimbConfig::default() }).map_err(err)?;
        if (res.exact_value - best).abs() <= 1e-9 {
            hits += 1;
        }
    }
    check(100 * hits >= 90 * trials, format!("{hits}/{trials} trials reach the brute-force maximum"))
}

fn criterion_9() -> Outcome {
    let mut failures = Vec::new();
    let mut instances = 0;
    for n in 2..=8u32 {
        let big_n = 1usize << n;
        for seed in 0..6u64 {
            let (g, components) = piece_union(big_n, (big_n / 2 - 1).max(1), &[0, 1, 2, 3, 4, 5, 6, 7], 1100 + 10 * n as u64 + seed);
            let lap = build_laplacian(&g);
            let mut backends = vec![(Backend::Ideal, None)];
            if n <= 4 {
                backends.push((Backend::Dense, Some(4)));
            }
            for (backend, t) in backends {
                let (layout, psi) = estimated(&lap.rescaled, n, t, backend)?;
                let oracle = ThresholdOracle::new(0.0625, layout.t).map_err(err)?;
                let est = quantum_counting(&psi, &oracle, &CountingOptions::from_layout(&layout, seed)).map_err(err)?;
                instances += 1;
                if est.k != components {
                    failures.push(format!("{backend} N={big_n} seed {seed}: {} vs {components}", est.k));
                }
            }
        }
    }
    for (kind, expect) in [(DatasetKind::Moons, 2), (DatasetKind::Blobs, 3)] {
        let s = run_count(&RunConfig::generated(kind, 256, 7)).map_err(err)?;
        instances += 1;
        if s.k != expect || s.components != expect {
            failures.push(format!("{kind:?}: k={} components={}", s.k, s.components));
        }
    }
    check(failures.is_empty(), format!("{instances} counting runs exact{}", summarize(&failures)))
}

fn criterion_10() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let data = generate_dataset(DatasetKind::Blobs, 256, 7, &GeneratorParams::default()).map_err(err)?;
    let blobs = build_laplacian(&build_knn_graph(&data, 8).map_err(err)?);
    let paths = build_laplacian(&three_paths());
    for (name, lap, n) in [("blobs N=256", blobs.rescaled, 8u32), ("three paths N=64", paths.rescaled, 6)] {
        let spectrum = eigen_decompose(&lap).map_err(err)?;
        let (layout, psi) = estimated(&lap, n, None, Backend::Ideal)?;
        let t = layout.t;
        let delta = 2f64.powi(-(t as i32));
        let limit = (1.0 / delta).log2().ceil() as usize;
        let opts = CountingOptions::from_layout(&layout, 0);
        let quantum = binary_search_threshold(quantum_count_probe(&psi, &opts), 3, delta, 1.0, delta).map_err(err)?;
        let classical = binary_search_threshold(
            |x| Ok::<_, std::convert::Infallible>(spectrum.count_below(x)),
            3,
            delta,
            1.0,
            delta,
        )
        .map_err(err)?;
        for (label, s) in [("quantum", &quantum), ("classical", &classical)] {
            let below = spectrum.count_below(s.lambda);
            let good = s.history.len() <= limit && s.budget <= limit && below == 3;
            ok &= good;
            lines.push(format!(
                "{name} {label}: λ̃={:.3e} after {} probes (limit {limit}), {below} eigenvalues below",
                s.lambda,
                s.history.len()
            ));
        }
    }
    check(ok, lines.join("; "))
}

/// Paths of 21, 21 and 22 nodes on a shuffled 64-node set.
fn three_paths() -> SimilarityGraph {
    let mut order: Vec<usize> = (0..64).collect();
    order.shuffle(&mut rng(1301));
    let mut edges = Vec::new();
    for piece in [&order[..21], &order[21..42], &order[42..]] {
        for w in piece.windows(2) {
            edges.push((w[0], w[1]));
        }
    }
    SimilarityGraph::from_edges(64, 3, edges).expect("paths have degree 2")
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "moons reproduction", criterion_1),
        (2, "blobs reproduction and k-means comparison", criterion_2),
        (3, "dense and ideal backends agree", criterion_3),
        (4, "Grover amplitude law", criterion_4),
        (5, "entangled state overlap", criterion_5),
        (6, "Laplacian invariants", criterion_6),
        (7, "objective identity", criterion_7),
        (8, "hill climbing matches brute force", criterion_8),
        (9, "counting precision", criterion_9),
        (10, "threshold binary search", criterion_10),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {id} ({name}): {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}): {detail} [{secs:.1}s]");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
