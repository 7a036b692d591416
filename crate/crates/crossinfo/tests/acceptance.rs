//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! A FAIL line is reported but does not fail the process; panics and solver
//! errors do.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use crossinfo::config::load_config;
use crossinfo::{run_pipeline, RunConfig, RunResult};
use crossinfo_core::billiard::{assemble_dirichlet_laplacian, build_grid, BilliardGeometry};
use crossinfo_core::linalg::{shift_invert_eig, svd, sym_eigenvalues, Matrix, ShiftInvertOptions};
use crossinfo_core::qinfo::{
    coefficient_matrix, coherence_relative_entropy, diagnose, entropy_sign_rule, linearized_entropy_contribution,
    purity_channels, schmidt_spectrum, svd_perturbation_predict, Bipartition, SignClass,
    CRITICAL_WEIGHT,
};
use crossinfo_core::spinchain::{
    bit_reversal_sector, build_hamiltonian, sector_dimension, sector_eigenset, Parity, SpinChainModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const J01: f64 = 2.404825557695773;
const J11: f64 = 3.831705970207512;
const J21: f64 = 5.135622301840683;

struct Tally {
    passed: usize,
    failed: usize,
}

impl Tally {
    fn record(&mut self, id: &str, name: &str, pass: bool, detail: String) {
        if pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        println!("{} [{id}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn lowest_levels(geom: &BilliardGeometry, res: f64, count: usize) -> Vec<f64> {
    let grid = build_grid(geom, res).unwrap();
    let op = assemble_dirichlet_laplacian(&grid).unwrap();
    let mut v: Vec<f64> = shift_invert_eig(&op, 0.0, count, ShiftInvertOptions::default())
        .unwrap()
        .iter()
        .map(|p| p.value)
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

fn config(text: &str, dir: &Path) -> RunConfig {
    let out = toml::Value::String(dir.display().to_string()).to_string();
    load_config(text, &[("output_dir".into(), out)]).unwrap()
}

fn unit_square(t: &mut Tally) {
    let exact = 2.0 * PI * PI;
    let geom = BilliardGeometry::unit_square();
    let (e100, elapsed) = timed(|| (lowest_levels(&geom, 100.0, 1)[0] - exact).abs());
    let e50 = (lowest_levels(&geom, 50.0, 1)[0] - exact).abs();
    let e200 = (lowest_levels(&geom, 200.0, 1)[0] - exact).abs();
    let (r1, r2) = (e50 / e100, e100 / e200);
    let rel = e100 / exact;
    let pass = rel < 0.01
        && (3.5..=4.5).contains(&r1)
        && (3.5..=4.5).contains(&r2)
        && elapsed < Duration::from_secs(30);
    t.record(
        "1",
        "unit-square Dirichlet ground level",
        pass,
        format!(
            "rel err {rel:.3e} at res 100 (< 1e-2), error ratio per halving {r1:.3}, {r2:.3} (in [3.5, 4.5]), {:.2} s (< 30 s)",
            elapsed.as_secs_f64()
        ),
    );
}

fn circle(t: &mut Tally) {
    let geom = BilliardGeometry::quadrupole(0.0).unwrap();
    let (v, elapsed) = timed(|| lowest_levels(&geom, 150.0, 5));
    let want = [J01 * J01, J11 * J11, J11 * J11, J21 * J21, J21 * J21];
    let errs: Vec<f64> = v.iter().zip(want).map(|(g, w)| (g / w - 1.0).abs()).collect();
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    let pass = v.len() == 5 && worst < 0.01 && elapsed < Duration::from_secs(120);
    t.record(
        "2",
        "circle billiard Bessel levels",
        pass,
        format!(
            "levels {:.4?} vs j01², j11² (x2), j21² (x2); worst rel err {worst:.3e} (< 1e-2), {:.2} s (< 120 s)",
            v,
            elapsed.as_secs_f64()
        ),
    );
}

fn two_level(t: &mut Tally) {
    let dir = tempfile::tempdir().unwrap();
    let r = run_pipeline(&config("backend = \"two_level_test\"\ng = 0.01", dir.path())).unwrap();
    let mut worst = 0.0f64;
    for (b, sign) in r.branches.iter().zip([-1.0, 1.0]) {
        for p in &b.points {
            let exact = sign * (p.parameter * p.parameter + 1e-4).sqrt();
            worst = worst.max((p.value - exact).abs());
        }
    }
    let (loc, gap) = r.crossings.first().map_or((f64::NAN, f64::NAN), |x| (x.location, x.min_gap));
    let pass = r.crossings.len() == 1 && loc.abs() <= 1e-6 && (gap - 0.02).abs() <= 1e-6 && worst <= 1e-10;
    t.record(
        "3",
        "two-level crossing",
        pass,
        format!(
            "{} crossing(s), location {loc:.3e} (|·| ≤ 1e-6), min gap {gap:.12} (0.02 ± 1e-6), branch deviation from ±√(ε²+g²) {worst:.2e} (≤ 1e-10)",
            r.crossings.len()
        ),
    );
}

fn ising_sectors(t: &mut Tally) {
    let dim = sector_dimension(8, Parity::Even);
    let mut worst = 0.0f64;
    let mut sizes_ok = true;
    for sites in 2..=10 {
        for tilt in [0.45, 1.1] {
            let model = SpinChainModel::new(sites, 1.0, 1.0, tilt).unwrap();
            let full = sym_eigenvalues(&build_hamiltonian(&model).unwrap().to_dense()).unwrap();
            let mut union = Vec::new();
            for parity in [Parity::Even, Parity::Odd] {
                let basis = bit_reversal_sector(sites, parity).unwrap();
                union.extend(sector_eigenset(&model, &basis).unwrap().values);
            }
            union.sort_by(f64::total_cmp);
            sizes_ok &= union.len() == full.len();
            for (a, b) in union.iter().zip(&full) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    t.record(
        "4",
        "Ising bit-reversal sectors",
        dim == 136 && sizes_ok && worst < 1e-8,
        format!("even sector dimension {dim} at L=8 (= 136); max |union − full| over L=2..10 {worst:.2e} (< 1e-8)"),
    );
}

fn interior_extrema(values: &[f64], params: &[f64], window: (f64, f64), peak: bool) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&t| params[t] >= window.0 && params[t] <= window.1)
        .filter(|&t| {
            let (a, b, c) = (values[t - 1], values[t], values[t + 1]);
            if peak {
                b > a && b > c
            } else {
                (b > a && b > c) || (b < a && b < c)
            }
        })
        .collect()
}

fn pair_branches(r: &RunResult, lower: usize, upper: usize) -> [&Vec<crossinfo_core::qinfo::DiagnosticsRecord>; 2] {
    [&r.diagnostics[lower], &r.diagnostics[upper]]
}

fn ising_soft_window(t: &mut Tally) {
    let dir = tempfile::tempdir().unwrap();
    let c = config("backend = \"ising\"", dir.path());
    let (r, elapsed) = timed(|| run_pipeline(&c).unwrap());
    let params = c.parameters();
    let containing: Vec<_> = r.crossings.iter().filter(|x| x.window.0 <= 0.45 && 0.45 <= x.window.1).collect();
    let mut example = None;
    for x in &containing {
        for recs in pair_branches(&r, x.lower_branch, x.upper_branch) {
            let s: Vec<f64> = recs.iter().map(|d| d.s_config).collect();
            for k in interior_extrema(&s, &params, x.window, true) {
                let candidate = (x.lower_branch, x.upper_branch, x.window, params[k], s[k]);
                if example.is_none_or(|e: (usize, usize, (f64, f64), f64, f64)| (params[k] - 0.45).abs() < (e.3 - 0.45).abs()) {
                    example = Some(candidate);
                }
            }
        }
    }
    let pass = example.is_some() && elapsed < Duration::from_secs(60);
    let detail = match example {
        Some((lo, hi, w, p, s)) => format!(
            "{} crossings, {} with window ∋ 0.45; pair ({lo}, {hi}) window [{:.4}, {:.4}] has S_config peak {s:.4} at θ = {p:.4}; {:.2} s (< 60 s)",
            r.crossings.len(),
            containing.len(),
            w.0,
            w.1,
            elapsed.as_secs_f64()
        ),
        None => format!(
            "{} crossings, {} with window ∋ 0.45, no interior S_config peak; {:.2} s",
            r.crossings.len(),
            containing.len(),
            elapsed.as_secs_f64()
        ),
    };
    t.record("5", "Ising soft-chaos window near θ = 0.45", pass, detail);
}

fn ising_strong_window(t: &mut Tally) {
    let dir = tempfile::tempdir().unwrap();
    let c = config("backend = \"ising\"\nstart = 1.4\nstop = 1.7", dir.path());
    let r = run_pipeline(&c).unwrap();
    let params = c.parameters();
    let mut hits = 0;
    let mut best: Option<(usize, usize, f64, f64)> = None;
    for x in &r.crossings {
        let mut hit = false;
        for recs in pair_branches(&r, x.lower_branch, x.upper_branch) {
            let s: Vec<f64> = recs.iter().map(|d| d.s_vn).collect();
            for k in interior_extrema(&s, &params, x.window, false) {
                if s[k] >= 0.5 {
                    hit = true;
                    if best.is_none_or(|b| s[k] < b.3) {
                        best = Some((x.lower_branch, x.upper_branch, params[k], s[k]));
                    }
                }
            }
        }
        hits += hit as usize;
    }
    let detail = match best {
        Some((lo, hi, p, s)) => format!(
            "{} crossings, {hits} with an interior S_vN extremum ≥ 0.5 nats; smallest such: pair ({lo}, {hi}) S_vN {s:.4} at θ = {p:.4}",
            r.crossings.len()
        ),
        None => format!("{} crossings, none with an S_vN extremum ≥ 0.5 nats in the window", r.crossings.len()),
    };
    t.record("6", "Ising strong-chaos window θ ∈ [1.4, 1.7]", best.is_some(), detail);
}

/// Random states on `l × r` of three kinds: dense, product, and states whose
/// left reduced density is diagonal.
fn random_state(rng: &mut ChaCha8Rng, kind: usize) -> (usize, usize, Vec<f64>) {
    let l = rng.gen_range(1..=16);
    let r = rng.gen_range(1..=16);
    let state = match kind {
        0 => (0..l * r).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        1 => {
            let u: Vec<f64> = (0..l).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..r).map(|_| rng.gen_range(-1.0..1.0)).collect();
            (0..l * r).map(|k| u[k / r] * v[k % r]).collect()
        }
        _ => {
            let mut s = vec![0.0; l * r];
            for j in 0..r {
                s[rng.gen_range(0..l) * r + j] = rng.gen_range(0.1..1.0);
            }
            s
        }
    };
    (l, r, state)
}

fn max_off_diagonal(m: &Matrix) -> f64 {
    let n = m.rows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for (j, &x) in m.row(i).iter().enumerate() {
            if i != j {
                worst = worst.max(x.abs());
            }
        }
    }
    worst
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn property_suites(t: &mut Tally) {
    const STATES: usize = 1200;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut entropy_gap, mut spectrum_gap) = (0.0f64, 0.0f64);
    let (mut cd_min, mut cd_iff_violations) = (f64::INFINITY, 0usize);
    let (mut split_exact, mut purity_range, mut purity_iff_violations, mut trace_gap) = (true, true, 0usize, 0.0f64);
    let mut kinds = BTreeMap::new();
    for n in 0..STATES {
        let (l, r, state) = random_state(&mut rng, n % 3);
        *kinds.entry(n % 3).or_insert(0) += 1;
        let bip = Bipartition::generic(l, r);
        let c = coefficient_matrix(&state, &bip).unwrap();
        let rho_x = c.rho_left(&bip.left_labels);
        let rho_y = c.rho_right(&bip.right_labels);

        let schmidt = schmidt_spectrum(&c, 5).unwrap();
        entropy_gap = entropy_gap.max((schmidt.entropy() - rho_x.entropy().unwrap()).abs());
        let (ex, ey) = (sorted_desc(rho_x.eigenvalues().unwrap()), sorted_desc(rho_y.eigenvalues().unwrap()));
        let m = l.min(r);
        for k in 0..l.max(r) {
            let a = ex.get(k).copied().unwrap_or(0.0);
            let b = ey.get(k).copied().unwrap_or(0.0);
            spectrum_gap = spectrum_gap.max(if k < m { (a - b).abs() } else { a.abs().max(b.abs()) });
        }

        let record = diagnose(0.0, 0, &state, &bip, 5).unwrap();
        for rho in [&rho_x, &rho_y] {
            let cd = coherence_relative_entropy(rho).unwrap();
            cd_min = cd_min.min(cd);
            let diagonal = max_off_diagonal(rho.matrix()) <= 1e-10;
            if diagonal != (cd <= 1e-10) {
                cd_iff_violations += 1;
            }
        }
        cd_min = cd_min.min(record.c_d_x).min(record.c_d_y);

        let p = purity_channels(&rho_x);
        split_exact &= p.purity == p.diagonal + p.off_diagonal && record.purity == record.p_diag + record.p_off;
        trace_gap = trace_gap.max((p.purity - p.purity_trace).abs());
        purity_range &= p.purity >= 1.0 / l as f64 - 1e-12 && p.purity <= 1.0 + 1e-12;
        let sv = svd(c.matrix()).unwrap().singular_values;
        let product = sv.get(1).is_none_or(|s| s * s <= 1e-10);
        if product != ((1.0 - p.purity).abs() <= 1e-10) {
            purity_iff_violations += 1;
        }
    }
    let kinds = format!("{STATES} states up to 16×16 ({} dense, {} product, {} dephased-left)", kinds[&0], kinds[&1], kinds[&2]);
    t.record(
        "7",
        "Schmidt vs reduced-density entropy and spectra",
        entropy_gap <= 1e-10 && spectrum_gap <= 1e-10,
        format!("{kinds}: max |S_Schmidt − S(ρx)| {entropy_gap:.2e}, max spectrum mismatch ρx vs ρy {spectrum_gap:.2e} (≤ 1e-10)"),
    );
    t.record(
        "8",
        "relative-entropy coherence",
        cd_min >= 0.0 && cd_iff_violations == 0,
        format!("{kinds}: min C_d {cd_min:.2e} (≥ 0), {cd_iff_violations} violations of C_d = 0 ⇔ ρ diagonal (1e-10)"),
    );
    t.record(
        "9",
        "purity channels",
        split_exact && purity_range && purity_iff_violations == 0 && trace_gap <= 1e-12,
        format!(
            "{kinds}: P = P_diag + P_off exact: {split_exact}, 1/d ≤ P ≤ 1: {purity_range}, max |P − Tr ρ²| {trace_gap:.2e}, {purity_iff_violations} violations of P = 1 ⇔ product (1e-10)"
        ),
    );
}

fn perturbation(t: &mut Tally) {
    const TRIALS: usize = 300;
    const SIZES: [f64; 3] = [1e-3, 5e-4, 2.5e-4];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut components, mut in_range, mut ratio_lo, mut ratio_hi) = (0usize, 0usize, f64::INFINITY, 0.0f64);
    let mut outliers = Vec::new();
    let (mut classified, mut agree) = (0usize, 0usize);
    let mut mismatches = Vec::new();
    for _ in 0..TRIALS {
        let (l, r) = (rng.gen_range(2..=16), rng.gen_range(2..=16));
        let c = Matrix::from_fn(l, r, |_, _| rng.gen_range(-1.0..1.0));
        let c = c.scaled(1.0 / c.frobenius_norm());
        let e = Matrix::from_fn(l, r, |_, _| rng.gen_range(-1.0..1.0));
        let e = e.scaled(1.0 / e.frobenius_norm());
        let runs: Vec<_> = SIZES
            .iter()
            .map(|&s| svd_perturbation_predict(&c, &c.add(&e.scaled(s)).unwrap()).unwrap())
            .collect();
        for k in 0..runs[0].len() {
            if runs[0][k].skipped {
                continue;
            }
            components += 1;
            let err: Vec<f64> = runs.iter().map(|run| (run[k].predicted - run[k].actual).abs()).collect();
            let ratios = [err[0] / err[1], err[1] / err[2]];
            ratio_lo = ratio_lo.min(ratios[0]).min(ratios[1]);
            ratio_hi = ratio_hi.max(ratios[0]).max(ratios[1]);
            if ratios.iter().all(|q| (3.0..=5.0).contains(q)) {
                in_range += 1;
            } else {
                outliers.push(format!("{:.2}/{:.2}", ratios[0], ratios[1]));
            }
            for run in &runs {
                let p = &run[k];
                if (p.lambda - CRITICAL_WEIGHT).abs() <= 0.02 {
                    continue;
                }
                classified += 1;
                let rule = entropy_sign_rule(p.lambda, p.predicted).unwrap();
                let actual = SignClass::of(linearized_entropy_contribution(p.sigma, p.actual));
                if rule == actual {
                    agree += 1;
                } else {
                    mismatches.push(format!("|r| {:.1e} vs error {:.1e}", p.predicted.abs(), (p.actual - p.predicted).abs()));
                }
            }
        }
    }
    t.record(
        "10",
        "SVD perturbation order and sign rule",
        in_range == components && agree == classified,
        format!(
            "{TRIALS} random C, E up to 16×16, ‖E‖ ∈ {{1e-3, 5e-4, 2.5e-4}}: {in_range}/{components} simple components with error ratio in [3, 5] per halving (observed range [{ratio_lo:.2}, {ratio_hi:.2}], outliers {}); sign rule agrees on {agree}/{classified} components with |λ − 1/e| > 0.02 (mismatches: {})",
            outliers.join(", "),
            mismatches.join(", ")
        ),
    );
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let key = p.strip_prefix(root).unwrap().display().to_string();
                out.insert(key, fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism(t: &mut Tally) {
    let dir = tempfile::tempdir().unwrap();
    let c = config("backend = \"ising\"\ndump_params = [0.45]", dir.path());
    run_pipeline(&c).unwrap();
    let first = read_tree(dir.path());
    run_pipeline(&c).unwrap();
    let second = read_tree(dir.path());
    let differing: Vec<&String> = first.keys().filter(|k| second.get(*k) != first.get(*k)).collect();
    let bytes: usize = first.values().map(Vec::len).sum();
    t.record(
        "D",
        "identical reruns",
        first.len() == second.len() && differing.is_empty(),
        format!("Ising defaults, 1 worker: {} files, {bytes} bytes, {} differing", first.len(), differing.len()),
    );
}

fn main() {
    let mut t = Tally { passed: 0, failed: 0 };
    unit_square(&mut t);
    circle(&mut t);
    two_level(&mut t);
    ising_sectors(&mut t);
    ising_soft_window(&mut t);
    ising_strong_window(&mut t);
    property_suites(&mut t);
    perturbation(&mut t);
    determinism(&mut t);
    println!("acceptance: {} passed, {} failed", t.passed, t.failed);
}
