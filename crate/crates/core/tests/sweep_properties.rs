use crossinfo_core::spinchain::{bit_reversal_sector, sweep_spectrum, Parity, SpinChainModel};
use crossinfo_core::sweep::{detect_avoided_crossings, track_branches, EigenBranch, EigenSet, TrackOptions};

fn ising_sets(lo: f64, hi: f64, steps: usize) -> Vec<EigenSet> {
    let basis = bit_reversal_sector(8, Parity::Even).unwrap();
    let tilts: Vec<f64> = (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect();
    sweep_spectrum(&SpinChainModel::standard(0.0), &basis, &tilts)
        .unwrap()
        .into_iter()
        .map(|s| EigenSet {
            parameter: s.tilt,
            values: s.values,
            vectors: s.vectors,
        })
        .collect()
}

fn gap_at(branches: &[EigenBranch], a: usize, b: usize, step: usize) -> f64 {
    (branches[a].points[step].value - branches[b].points[step].value).abs()
}

#[test]
fn tracking_relabels_without_reweighting() {
    let sets = ising_sets(0.3, 0.6, 61);
    let window = 10..40;
    let branches = track_branches(&sets, &TrackOptions::window(window.clone())).unwrap();
    for (t, set) in sets.iter().enumerate() {
        let tracked: f64 = branches.iter().map(|b| b.points[t].value).sum();
        let sorted: f64 = set.values[window.clone()].iter().sum();
        assert!((tracked - sorted).abs() < 1e-12 * sorted.abs().max(1.0));
        let mut used: Vec<usize> = branches.iter().map(|b| b.points[t].source_index).collect();
        used.sort();
        assert_eq!(used, window.clone().collect::<Vec<_>>());
    }
    for b in &branches {
        for p in &b.points {
            assert!(p.overlap >= 0.5 || p.tracking_break);
            assert!(p.sign == 1.0 || p.sign == -1.0);
        }
        // aligned consecutive states overlap nonnegatively
        for t in 1..sets.len() {
            let (u, v) = (b.state(&sets, t - 1), b.state(&sets, t));
            assert!(u.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>() >= 0.0);
        }
    }
}

#[test]
fn ising_soft_window_has_crossing_near_045() {
    let sets = ising_sets(0.3, 0.6, 61);
    let branches = track_branches(&sets, &TrackOptions::window(0..136)).unwrap();
    let crossings = detect_avoided_crossings(&branches, 2.0).unwrap();
    assert!(crossings.iter().any(|x| x.window.0 <= 0.45 && 0.45 <= x.window.1));
    for x in &crossings {
        assert!(x.window.0 <= x.location && x.location <= x.window.1);
        let lo = sets.iter().position(|s| s.parameter == x.window.0).unwrap();
        let hi = sets.iter().position(|s| s.parameter == x.window.1).unwrap();
        let g = |t| gap_at(&branches, x.lower_branch, x.upper_branch, t);
        assert!(x.min_gap <= g(lo) && x.min_gap <= g(hi));
        assert!((lo..=hi).all(|t| g(t) <= 2.0 * x.min_gap));
    }
}
