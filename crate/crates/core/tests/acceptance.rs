//! End-to-end acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line
//! for its criterion; run with `--nocapture` to see them.
//!
//! Reference values are written out here rather than taken from the
//! library's own reference module.

use std::fs;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng as _;

use sector_snake::dynamics::ScheduleConfig;
use sector_snake::experiments::banding::{run_banding, BandingRow};
use sector_snake::experiments::controls::{run_controls, ControlSummaryRow};
use sector_snake::experiments::diagonal_qa::run_diagonal_qa;
use sector_snake::experiments::scan::{run_fine_scan, ScanGrid, TargetClass, TargetScan};
use sector_snake::experiments::sensor::{run_sensor, SensorRow};
use sector_snake::experiments::tables::{run_ablation, run_convergence, run_gaps, AnnealRow, GapProfileRow, GapRow};
use sector_snake::experiments::Setup;
use sector_snake::graphs::{hypercube_graph, laplacian, path_window_graph, sector_graph};
use sector_snake::hamiltonian::{BarrierTargetConfig, SensorModelConfig};
use sector_snake::linalg::{eigh, evolve_step, HermitianOperator, StateVector};
use sector_snake::ordering::{
    strict_generate, v2_generate, GeneratorBudget, Ordering, StrictOutcome, ValidationMode,
};
use sector_snake::rng::seeded_rng;

fn report(criterion: u32, name: &str, passed: bool, detail: &str) {
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {criterion:>2} {name}: {detail}");
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol + 1e-12
}

fn setup() -> &'static Setup {
    static SETUP: OnceLock<Setup> = OnceLock::new();
    SETUP.get_or_init(|| Setup::new(8, ScheduleConfig::default(), BarrierTargetConfig::default()).unwrap())
}

fn ablation() -> &'static [AnnealRow] {
    static ROWS: OnceLock<Vec<AnnealRow>> = OnceLock::new();
    ROWS.get_or_init(|| run_ablation(setup()).unwrap())
}

fn fidelity_of<'a>(rows: &'a [AnnealRow], driver: &str, slices: usize) -> f64 {
    rows.iter().find(|r| r.driver == driver && r.slices == slices).map_or(f64::NAN, |r| r.fidelity)
}

fn strict(n: u32) -> Ordering {
    match strict_generate(n, &GeneratorBudget::unbounded()).unwrap() {
        StrictOutcome::Complete(o) => o,
        StrictOutcome::Incomplete(log) => panic!("strict n = {n} incomplete: {log:?}"),
    }
}

#[test]
fn criterion_01_strict_encodings_match_appendix() {
    let start = Instant::now();
    let orderings: Vec<Ordering> = (5..=8).map(strict).collect();
    let seconds = start.elapsed().as_secs_f64();
    let mut mismatches = Vec::new();
    for o in &orderings {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/data/strict_n{}.txt", o.n()));
        let table: Vec<String> = fs::read_to_string(path).unwrap().lines().map(str::to_string).collect();
        let ours: Vec<String> = (0..o.len()).map(|t| o.state(t).to_string()).collect();
        if table != ours {
            let first = table.iter().zip(&ours).position(|(a, b)| a != b);
            mismatches.push(format!("n={} first difference at {first:?}", o.n()));
        }
    }
    let passed = mismatches.is_empty() && seconds < 10.0;
    report(1, "strict encodings n=5..8", passed, &format!("mismatches {mismatches:?}, {seconds:.3} s"));
    assert!(passed);
}

#[test]
fn criterion_02_generator_diagnostics() {
    let expected = [(5, "1.452", "0.774"), (6, "1.603", "0.698"), (7, "1.740", "0.630"), (8, "1.839", "0.580")];
    let mut bad = Vec::new();
    for (n, mean, frac) in expected {
        let s = strict(n).diagnostics();
        if (format!("{:.3}", s.mean_adjacent_dh), s.max_adjacent_dh, format!("{:.3}", s.fraction_dh1))
            != ("1.000".into(), 1, "1.000".into())
        {
            bad.push(format!("strict n={n}"));
        }
        let v = v2_generate(n).unwrap().diagnostics();
        let got = (format!("{:.3}", v.mean_adjacent_dh), v.max_adjacent_dh, format!("{:.3}", v.fraction_dh1));
        if got != (mean.to_string(), 3, frac.to_string()) {
            bad.push(format!("v2 n={n} {got:?}"));
        }
    }
    report(2, "generator diagnostics", bad.is_empty(), &format!("mismatches {bad:?}"));
    assert!(bad.is_empty());
}

#[test]
fn criterion_03_n8_validates_and_n9_attempt_is_logged() {
    let o = strict(8);
    let validation = o.validate(ValidationMode::Strict);
    let n8 = validation.passed() && o.len() == 256;
    let attempt = strict_generate(9, &GeneratorBudget::nodes(1_000_000)).unwrap();
    let logged = match &attempt {
        StrictOutcome::Incomplete(log) => log.n == 9 && log.nodes == 1_000_000,
        StrictOutcome::Complete(_) => false,
    };
    let passed = n8 && logged;
    report(
        3,
        "strict validation and attempt log",
        passed,
        &format!("n=8 checks {:?}, n=9 budgeted attempt logged: {logged}", validation.checks.iter().map(|c| (&c.name, c.passed)).collect::<Vec<_>>()),
    );
    assert!(passed);
}

fn band_of<'a>(rows: &'a [BandingRow], family: &str, ordering: &str) -> &'a BandingRow {
    rows.iter().find(|r| r.family == family && r.ordering == ordering).unwrap()
}

#[test]
fn criterion_04_banding() {
    let (rows, _) = run_banding(8, 50, 20_240_818).unwrap();
    let columns = ["strict", "v2", "binary", "gray", "weight_block"];
    let determined: [(&str, [f64; 5]); 3] = [
        ("sector_dense", [50.55, 50.55, 72.34, 81.52, 42.65]),
        ("path_original_w4", [2.48, 39.90, 56.11, 66.46, 34.02]),
        ("path_v2_w4", [43.78, 2.48, 44.92, 51.42, 28.79]),
    ];
    let invented: [(&str, [f64; 5]); 5] = [
        ("same_sector_swap", [34.83, 31.92, 46.11, 54.93, 12.24]),
        ("mix_sector_original_path", [26.51, 45.22, 64.23, 73.99, 38.33]),
        ("mix_sector_v2_path", [47.16, 26.51, 58.63, 66.47, 35.72]),
        ("local_hopping_1d", [33.51, 22.22, 18.14, 36.29, 4.67]),
        ("local_pair_creation_1d", [92.44, 89.28, 54.43, 36.29, 98.51]),
    ];
    let mut failures = Vec::new();
    let matched = band_of(&rows, "path_original_w4", "strict");
    if !close(matched.mean_band, 2.48, 0.01) || matched.off_band_w4 != 0.0 {
        failures.push(format!("matched {:.4} / {}", matched.mean_band, matched.off_band_w4));
    }
    for (family, values) in determined {
        for (col, want) in columns.iter().zip(values) {
            let got = band_of(&rows, family, col).mean_band;
            if !close(got, want, 0.05) {
                failures.push(format!("{family}/{col} {got:.3} vs {want}"));
            }
        }
    }
    let mut mismatches = Vec::new();
    for (family, values) in invented {
        for (col, want) in columns.iter().zip(values) {
            let got = band_of(&rows, family, col).mean_band;
            if !close(got, want, 0.5) {
                mismatches.push(format!("{family}/{col} {got:.2} vs {want}"));
            }
        }
    }
    let passed = failures.is_empty();
    report(
        4,
        "banding",
        passed,
        &format!("matched MeanBand {:.4}, OffBand(4) {}; failures {failures:?}; definition mismatches {mismatches:?}", matched.mean_band, matched.off_band_w4),
    );
    assert!(passed);
}

/// `exp(-i H dt) psi` by truncated Taylor series, for small `|H dt|`.
fn taylor_step(h: &HermitianOperator, dt: f64, psi: &[Complex64]) -> Vec<Complex64> {
    let mut term = psi.to_vec();
    let mut sum = psi.to_vec();
    for k in 1..=30 {
        let applied = h.apply(&term).unwrap();
        let factor = Complex64::new(0.0, -dt / k as f64);
        term = applied.iter().map(|z| z * factor).collect();
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
    }
    sum
}

#[test]
fn criterion_05_operator_properties() {
    let mut checks: Vec<(&str, bool)> = Vec::new();

    let cube = eigh(&laplacian(&hypercube_graph(3).unwrap(), false).unwrap().operator).unwrap();
    let expected = [0.0, 2.0, 2.0, 2.0, 4.0, 4.0, 4.0, 6.0];
    checks.push(("hypercube spectrum {2k}", cube.eigenvalues().iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-10)));

    let strict8 = strict(8);
    let graphs = [sector_graph(8).unwrap(), hypercube_graph(8).unwrap(), path_window_graph(&strict8, 4).unwrap()];
    let mut psd = true;
    let mut kernel = true;
    for g in &graphs {
        let lap = laplacian(g, true).unwrap();
        let values = eigh(&lap.operator).unwrap().eigenvalues().to_vec();
        psd &= values[0] >= -1e-10;
        kernel &= values[1] > 1e-8;
        let ones = StateVector::uniform(lap.operator.dim());
        kernel &= lap.operator.apply(ones.amplitudes()).unwrap().iter().all(|z| z.norm() < 1e-12);
    }
    checks.push(("Laplacians PSD", psd));
    checks.push(("one-dimensional kernel", kernel));

    let mut rng = seeded_rng(5);
    let mut unitary = true;
    let mut taylor = true;
    for trial in 0..200 {
        let dim = 16;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..dim {
                let z = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
                data[i * dim + j] = z;
                data[j * dim + i] = z.conj();
            }
        }
        let h = HermitianOperator::from_complex(dim, data).unwrap();
        let amps = (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let psi = StateVector::normalized(amps).unwrap();
        let dt = if trial % 2 == 0 { 0.1 } else { 2.5 };
        let out = evolve_step(&h, dt, &psi).unwrap();
        unitary &= (out.norm() - 1.0).abs() <= 1e-10;
        if dt < 1.0 {
            let oracle = taylor_step(&h, dt, psi.amplitudes());
            taylor &= out.amplitudes().iter().zip(&oracle).all(|(a, b)| (a - b).norm() <= 1e-10);
        }
    }
    checks.push(("unitarity", unitary));
    checks.push(("Taylor oracle 1e-10", taylor));

    let passed = checks.iter().all(|c| c.1);
    report(5, "Laplacian and propagator properties", passed, &format!("{checks:?}"));
    assert!(passed);
}

const ABLATION: [(&str, f64); 7] = [
    ("sector+path+tf", 0.9799),
    ("sector+path", 0.9697),
    ("sector+tf", 0.9585),
    ("sector", 0.9455),
    ("tf", 0.8902),
    ("path+tf", 0.4614),
    ("path", 0.2490),
];

fn check_scans(scans: &[TargetScan], bad: &mut Vec<String>, notes: &mut Vec<String>) {
    // (target, [tf, sector, original path, v2 path], best, source, alpha, epsilon)
    let table: [(&str, [f64; 4], f64, &str, f64, f64); 5] = [
        ("original_barrier", [0.8902, 0.9455, 0.1739, 0.7647], 0.9704, "original", 0.30, 0.10),
        ("v2_barrier", [0.8553, 0.9455, 0.7353, 0.1739], 0.9688, "v2", 0.25, 0.10),
        ("sector_well", [0.9985, 0.9855, 0.9107, 0.9107], 0.9904, "original", 0.20, 0.10),
        ("original_mix", [0.9975, 0.9881, 0.7275, 0.9015], 0.9918, "v2", 0.20, 0.10),
        ("v2_mix", [0.9979, 0.9881, 0.9029, 0.7275], 0.9919, "original", 0.20, 0.10),
    ];
    for (target, baselines, best, source, alpha, epsilon) in table {
        let scan = scans.iter().find(|s| s.target.name() == target).unwrap();
        for (got, want) in scan.baselines.iter().zip(baselines) {
            if !close(*got, want, 0.005) {
                bad.push(format!("{target} baseline {got:.4} vs {want}"));
            }
        }
        let top = scan.cells.iter().map(|c| c.fidelity).fold(f64::NEG_INFINITY, f64::max);
        if !close(top, best, 0.005) {
            bad.push(format!("{target} best {top:.4} vs {best}"));
        }
        let cell = scan
            .cells
            .iter()
            .find(|c| c.path_source == source && close(c.alpha, alpha, 1e-9) && close(c.epsilon, epsilon, 1e-9))
            .unwrap();
        // The printed argmax must be indistinguishable from the maximum at
        // four printed decimals.
        if top - cell.fidelity > 5e-5 {
            bad.push(format!("{target} printed argmax at {:.5}, maximum {top:.5}", cell.fidelity));
        } else if cell.fidelity < top {
            notes.push(format!("{target} printed argmax {:.5} ties maximum {top:.5}", cell.fidelity));
        }
    }
}

fn check_gaps(rows: &[GapRow], profiles: &[GapProfileRow], bad: &mut Vec<String>) -> (bool, String) {
    let table = [("tf", 0.0690), ("sector", 0.0376), ("original_w4", 0.00118), ("original_hybrid_w8", 0.0691)];
    for (driver, want) in table {
        let got = rows.iter().find(|r| r.driver == driver).unwrap().min_gap;
        if !close(got, want, 0.002) {
            bad.push(format!("gap {driver} {got:.5} vs {want}"));
        }
    }
    let tf = rows.iter().find(|r| r.driver == "tf").unwrap();
    if !close(tf.argmin_s, 13.0 / 14.0, 1e-12) {
        bad.push(format!("tf gap argmin s = {}", tf.argmin_s));
    }

    // The printed w=4 hybrid row (0.0208 at s = 0) sits below a lower bound:
    // at s = 0 every driver term is PSD with the uniform kernel, so
    // lambda_2(H_D) >= 0.9 * 0.7 * lambda_2(L_sec).
    let lambda2_sec = eigh(&laplacian(&sector_graph(8).unwrap(), true).unwrap().operator).unwrap().eigenvalues()[1];
    let bound = 0.9 * 0.7 * lambda2_sec;
    let at_zero = profiles.iter().find(|p| p.driver == "original_hybrid_w4" && p.s == 0.0).unwrap().gap;
    let hybrid = rows.iter().find(|r| r.driver == "original_hybrid_w4").unwrap();
    if bound <= 0.0208 || at_zero < bound - 1e-12 {
        bad.push(format!("w=4 hybrid lower bound {bound:.5} vs gap at s=0 {at_zero:.5}"));
    }
    let reproduced = close(hybrid.min_gap, 0.0208, 0.002);
    let note = format!(
        "original_hybrid_w4 gap {:.5} at s={:.4} vs printed 0.0208 at s=0; printed value is below the bound 0.63*lambda2(L_sec) = {bound:.5}",
        hybrid.min_gap, hybrid.argmin_s
    );
    (reproduced, note)
}

#[test]
fn criterion_06_calibrated_tables() {
    let setup = setup();
    let rows = ablation();
    let tf = fidelity_of(rows, "tf", 35);
    let sector = fidelity_of(rows, "sector", 35);
    let gate = close(tf, 0.8902, 0.003) && close(sector, 0.9455, 0.003);
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    if !gate {
        bad.push(format!("calibration gate tf {tf:.4} sector {sector:.4}"));
    }
    for (driver, want) in ABLATION {
        let got = fidelity_of(rows, driver, 35);
        if !close(got, want, 0.003) {
            bad.push(format!("ablation {driver} {got:.4} vs {want}"));
        }
    }
    let full = fidelity_of(rows, "sector+path+tf", 35);
    if !close(full, 0.9799, 0.003) {
        bad.push(format!("headline {full:.4}"));
    }

    let convergence = run_convergence(setup, &[70, 140]).unwrap();
    let table: [(&str, [f64; 3]); 5] = [
        ("tf", [0.8902, 0.8901, 0.8901]),
        ("sector", [0.9455, 0.9453, 0.9453]),
        ("sector+path", [0.9697, 0.9695, 0.9694]),
        ("sector+path+tf", [0.9799, 0.9797, 0.9797]),
        ("path", [0.2490, 0.2489, 0.2488]),
    ];
    for (driver, values) in table {
        let got = [fidelity_of(rows, driver, 35), fidelity_of(&convergence, driver, 70), fidelity_of(&convergence, driver, 140)];
        for ((m, g), want) in [35, 70, 140].iter().zip(got).zip(values) {
            if !close(g, want, 0.001) {
                bad.push(format!("convergence {driver} M={m} {g:.4} vs {want}"));
            }
        }
    }

    let scans = run_fine_scan(setup, &TargetClass::ALL, &ScanGrid::reproduction()).unwrap();
    check_scans(&scans, &mut bad, &mut notes);

    let (gap_rows, profiles) = run_gaps(setup, 15).unwrap();
    let (hybrid_w4_reproduced, gap_note) = check_gaps(&gap_rows, &profiles, &mut bad);

    let passed = bad.is_empty() && hybrid_w4_reproduced;
    report(6, "calibrated tables", passed, &format!("failures {bad:?}; {gap_note}; ties {notes:?}"));
    // The printed w=4 hybrid gap row is unattainable (see the bound above);
    // every other row must hold.
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn criterion_07_ablation_properties() {
    let rows = ablation();
    let chain: Vec<f64> = ABLATION.iter().map(|(d, _)| fidelity_of(rows, d, 35)).collect();
    let ordered = chain.windows(2).all(|w| w[0] > w[1]);
    let path = fidelity_of(rows, "path", 35);
    let gain = fidelity_of(rows, "sector+path+tf", 35) - fidelity_of(rows, "sector", 35);
    let passed = ordered && path < 0.5 && gain >= 0.02;
    report(7, "ablation ordering properties", passed, &format!("chain {chain:.4?}, path {path:.4}, gain {gain:.4}"));
    assert!(passed);
}

fn summary<'a>(rows: &'a [ControlSummaryRow], mode: &str, source: &str) -> &'a ControlSummaryRow {
    rows.iter().find(|r| r.mode == mode && r.source == source).unwrap()
}

#[test]
fn criterion_08_control_ensembles() {
    let (_, rows) = run_controls(setup(), 64, 20_240_817).unwrap();
    let sp = summary(&rows, "matched", "sector_preserving_random");
    let se = (sp.fidelity_std.powi(2) / 64.0 + 0.0010f64.powi(2) / 64.0).sqrt();
    let sp_ok = (sp.fidelity_mean - 0.9773).abs() <= 3.0 * se && sp.fidelity_std <= 0.005;
    let rp = summary(&rows, "matched", "random_perm");
    let rp_ok = (0.1..=0.6).contains(&rp.fidelity_mean) && rp.fidelity_std >= 0.15;
    let sector = summary(&rows, "strict_target", "sector").fidelity_mean;
    let st_ok = ["random_perm", "sector_preserving_random"]
        .iter()
        .all(|k| summary(&rows, "strict_target", k).fidelity_mean > sector);
    let passed = sp_ok && rp_ok && st_ok;
    report(
        8,
        "control ensembles",
        passed,
        &format!(
            "sector-preserving {:.5}+-{:.5} (3 SE {:.5}), random {:.4}+-{:.4}, strict-target {:.4}/{:.4} vs sector {sector:.4}",
            sp.fidelity_mean,
            sp.fidelity_std,
            3.0 * se,
            rp.fidelity_mean,
            rp.fidelity_std,
            summary(&rows, "strict_target", "random_perm").fidelity_mean,
            summary(&rows, "strict_target", "sector_preserving_random").fidelity_mean
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_09_diagonal_qa() {
    let (runs, rows) = run_diagonal_qa(8, &ScheduleConfig::default()).unwrap();
    let table: [(&str, [f64; 4]); 4] = [
        ("index_well", [0.0252, 0.0247, 0.0176, 0.0211]),
        ("sector_well", [0.0135, 0.0120, 0.0106, 0.0107]),
        ("mix", [0.0233, 0.0216, 0.0163, 0.0185]),
        ("barrier_path", [0.0325, 0.0254, 0.0253, 0.0311]),
    ];
    let get = |f: &str, e: &str| rows.iter().find(|r| r.family == f && r.encoding == e).unwrap().mean_success;
    let mut bad = Vec::new();
    for (family, values) in table {
        for (e, want) in ["strict", "v2"].iter().zip(&values[2..]) {
            if !close(get(family, e), *want, 0.005) {
                bad.push(format!("{family}/{e} {:.4} vs {want}", get(family, e)));
            }
        }
    }
    let probabilities_ok = runs.iter().all(|r| (r.probability_sum - 1.0).abs() <= 1e-9 && (0.0..=1.0).contains(&r.success_probability));
    let never_beats_binary = ["gray", "strict", "v2"]
        .iter()
        .all(|e| !table.iter().all(|(f, _)| get(f, e) > get(f, "binary")));
    let passed = probabilities_ok && (bad.is_empty() || never_beats_binary);
    report(9, "diagonal QA", passed, &format!("cells outside tolerance {bad:?}; no encoding beats binary everywhere: {never_beats_binary}"));
    assert!(passed);
}

#[test]
fn criterion_10_sensor_benchmark() {
    let rows: Vec<SensorRow> = run_sensor(setup(), &SensorModelConfig::default(), 12).unwrap();
    let get = |d: &str| rows.iter().find(|r| r.driver == d).unwrap().fidelity;
    let table = [
        ("tf", 0.6655),
        ("sector", 0.7599),
        ("path", 0.2577),
        ("sector+path", 0.7554),
        ("hybrid_0.30_0.10", 0.8019),
        ("hybrid_0.50_0.20", 0.8269),
    ];
    let bad: Vec<String> = table
        .iter()
        .filter(|(d, want)| !close(get(d), *want, 0.01))
        .map(|(d, want)| format!("{d} {:.4} vs {want}", get(d)))
        .collect();
    let best = get("hybrid_0.50_0.20").max(get("hybrid_0.30_0.10"));
    let property = best > get("sector") && get("sector") > get("tf") && get("tf") > get("path") && best - get("sector") >= 0.03;
    let passed = bad.is_empty() || property;
    report(10, "sensor benchmark", passed, &format!("cells outside tolerance {bad:?}; ordering property {property}"));
    assert!(passed);
}
