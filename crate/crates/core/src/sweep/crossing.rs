use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::EigenBranch;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineStatus {
    /// Straight from the parameter grid.
    Coarse,
    /// Gap minimum converged within the refinement tolerance.
    Refined,
    /// Refinement ran out of levels before the gap converged.
    BudgetExhausted,
    /// The gap was not unimodal in the bracket; coarse values kept.
    NotUnimodal,
}

/// A local minimum of the gap between two tracked branches.
#[derive(Debug, Clone, PartialEq)]
pub struct AvoidedCrossing {
    /// Branch below at the minimum.
    pub lower_branch: usize,
    /// Branch above at the minimum.
    pub upper_branch: usize,
    pub location: f64,
    pub min_gap: f64,
    /// Contiguous region around the minimum where the gap stays within
    /// `factor · min_gap`.
    pub window: (f64, f64),
    /// Grid step of the coarse minimum.
    pub step: usize,
    /// Position of the lower branch in the ascending spectrum at the minimum.
    pub lower_index: usize,
    /// Neighbouring grid parameters enclosing the coarse minimum.
    pub bracket: (f64, f64),
    pub status: RefineStatus,
}

/// Interior local minima of the gap between branches that are neighbours in
/// energy at the minimum.
pub fn detect_avoided_crossings(branches: &[EigenBranch], gap_factor: f64) -> Result<Vec<AvoidedCrossing>> {
    if !(gap_factor >= 1.0) {
        return Err(Error::InvalidArgument(alloc::format!("gap factor must be ≥ 1, got {gap_factor}")));
    }
    let steps = branches.first().map_or(0, |b| b.points.len());
    if branches.iter().any(|b| b.points.len() != steps) {
        return Err(Error::InvalidArgument("branches have different lengths".into()));
    }
    if steps < 3 {
        return Err(Error::ParameterGrid("crossing detection needs at least three parameter points".into()));
    }

    // energy-ordered neighbours at each step: (lower, upper) branch positions
    let mut neighbours: Vec<BTreeSet<(usize, usize)>> = Vec::with_capacity(steps);
    let mut candidates = BTreeSet::new();
    for t in 0..steps {
        let mut order: Vec<usize> = (0..branches.len()).collect();
        order.sort_by(|&a, &b| {
            branches[a].points[t]
                .value
                .total_cmp(&branches[b].points[t].value)
                .then(a.cmp(&b))
        });
        let pairs: BTreeSet<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
        for &(a, b) in &pairs {
            candidates.insert((a.min(b), a.max(b)));
        }
        neighbours.push(pairs);
    }

    let mut out = Vec::new();
    for (a, b) in candidates {
        let gap: Vec<f64> = (0..steps)
            .map(|t| (branches[a].points[t].value - branches[b].points[t].value).abs())
            .collect();
        for t in 1..steps - 1 {
            if !(gap[t] < gap[t - 1] && gap[t] <= gap[t + 1]) {
                continue;
            }
            let (lower, upper) = if neighbours[t].contains(&(a, b)) {
                (a, b)
            } else if neighbours[t].contains(&(b, a)) {
                (b, a)
            } else {
                continue;
            };
            let limit = gap_factor * gap[t];
            let mut lo = t;
            while lo > 0 && gap[lo - 1] <= limit {
                lo -= 1;
            }
            let mut hi = t;
            while hi + 1 < steps && gap[hi + 1] <= limit {
                hi += 1;
            }
            // a deeper minimum inside the window owns it
            if gap[lo..=hi].iter().any(|g| *g < gap[t]) {
                continue;
            }
            let p = |s: usize| branches[a].points[s].parameter;
            out.push(AvoidedCrossing {
                lower_branch: branches[lower].id,
                upper_branch: branches[upper].id,
                location: p(t),
                min_gap: gap[t],
                window: (p(lo), p(hi)),
                step: t,
                lower_index: branches[lower].points[t].source_index,
                bracket: (p(t - 1), p(t + 1)),
                status: RefineStatus::Coarse,
            });
        }
    }
    out.sort_by(|x, y| {
        x.location
            .total_cmp(&y.location)
            .then(x.lower_branch.cmp(&y.lower_branch))
    });
    Ok(out)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const GAP_RTOL: f64 = 1e-8;

/// Golden-section refinement of the gap minimum inside the crossing's
/// bracket. `solve(p)` returns the ascending spectrum at parameter `p`;
/// the gap is `λ[lower_index + 1] − λ[lower_index]`.
pub fn refine_crossing<F>(mut solve: F, crossing: &AvoidedCrossing, levels: usize) -> Result<AvoidedCrossing>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let k = crossing.lower_index;
    let mut gap_at = |p: f64| -> Result<f64> {
        let values = solve(p)?;
        if values.len() < k + 2 {
            return Err(Error::DimensionMismatch {
                expected: k + 2,
                found: values.len(),
            });
        }
        Ok(values[k + 1] - values[k])
    };

    let (mut a, mut c) = crossing.bracket;
    let fa = gap_at(a)?;
    let fc = gap_at(c)?;
    let fb = gap_at(crossing.location)?;
    let mut coarse = crossing.clone();
    if !(fb <= fa && fb <= fc) {
        coarse.status = RefineStatus::NotUnimodal;
        return Ok(coarse);
    }
    let ceiling = fa.max(fc);

    let mut x1 = c - INV_PHI * (c - a);
    let mut x2 = a + INV_PHI * (c - a);
    let mut f1 = gap_at(x1)?;
    let mut f2 = gap_at(x2)?;
    let (mut best_x, mut best_f) = (crossing.location, fb);
    let mut status = RefineStatus::BudgetExhausted;
    for _ in 0..levels {
        if f1.max(f2) > ceiling {
            coarse.status = RefineStatus::NotUnimodal;
            return Ok(coarse);
        }
        let previous = best_f;
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f < best_f {
                best_x = x;
                best_f = f;
            }
        }
        let width = c - a;
        if (previous - best_f).abs() <= GAP_RTOL * best_f.abs() && width <= 1e-10 * (1.0 + best_x.abs()) {
            status = RefineStatus::Refined;
            break;
        }
        if f1 <= f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - INV_PHI * (c - a);
            f1 = gap_at(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (c - a);
            f2 = gap_at(x2)?;
        }
    }
    // one last look at the final probes
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f < best_f {
            best_x = x;
            best_f = f;
        }
    }
    Ok(AvoidedCrossing {
        location: best_x,
        min_gap: best_f,
        status,
        ..crossing.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{track_branches, EigenSet, TrackOptions};
    use crate::twolevel::TwoLevelModel;
    use alloc::vec;

    fn two_level_branches(n: usize, lo: f64, hi: f64) -> Vec<EigenBranch> {
        let model = TwoLevelModel::new(0.01).unwrap();
        let sets: Vec<EigenSet> = (0..n)
            .map(|i| model.eigenset(lo + (hi - lo) * i as f64 / (n - 1) as f64).unwrap())
            .collect();
        track_branches(&sets, &TrackOptions::window(0..2)).unwrap()
    }

    #[test]
    fn two_level_single_crossing() {
        let branches = two_level_branches(201, -0.1, 0.1);
        let found = detect_avoided_crossings(&branches, 2.0).unwrap();
        assert_eq!(found.len(), 1);
        let x = &found[0];
        assert!(x.location.abs() < 1e-12);
        assert!((x.min_gap - 0.02).abs() < 1e-12);
        assert!(x.window.0 <= x.location && x.location <= x.window.1);
        // gap 2√(ε²+g²) ≤ 0.04 ⇔ |ε| ≤ √3·g
        assert!((x.window.1 - 0.017).abs() < 1e-9, "{:?}", x.window);
        assert_eq!((x.lower_branch, x.upper_branch), (0, 1));
    }

    #[test]
    fn parallel_lines_have_no_crossing() {
        let sets: Vec<EigenSet> = (0..10)
            .map(|i| {
                let p = i as f64;
                EigenSet {
                    parameter: p,
                    values: vec![p, p + 1.0],
                    vectors: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                }
            })
            .collect();
        let b = track_branches(&sets, &TrackOptions::window(0..2)).unwrap();
        assert!(detect_avoided_crossings(&b, 2.0).unwrap().is_empty());
    }

    #[test]
    fn refinement_off_grid() {
        // even point count: ε = 0 is not on the grid
        let branches = two_level_branches(40, -0.1, 0.1);
        let coarse = detect_avoided_crossings(&branches, 2.0).unwrap();
        assert_eq!(coarse.len(), 1);
        assert!(coarse[0].location.abs() > 1e-3);
        let model = TwoLevelModel::new(0.01).unwrap();
        let refined = refine_crossing(|p| Ok(model.eigenset(p)?.values), &coarse[0], 100).unwrap();
        assert_eq!(refined.status, RefineStatus::Refined);
        assert!(refined.location.abs() <= 1e-6);
        assert!((refined.min_gap - 0.02).abs() <= 1e-10);
    }

    #[test]
    fn refinement_fixed_point() {
        let branches = two_level_branches(201, -0.1, 0.1);
        let coarse = detect_avoided_crossings(&branches, 2.0).unwrap();
        let model = TwoLevelModel::new(0.01).unwrap();
        let refined = refine_crossing(|p| Ok(model.eigenset(p)?.values), &coarse[0], 100).unwrap();
        assert!((refined.location - coarse[0].location).abs() < 1e-9);
        assert!((refined.min_gap - coarse[0].min_gap).abs() < 1e-12);
    }

    #[test]
    fn cubic_gap_profile() {
        // gap(x) = x³ − 3x + 3 has its minimum 1 at x = 1
        let gap = |x: f64| x * x * x - 3.0 * x + 3.0;
        let crossing = AvoidedCrossing {
            lower_branch: 0,
            upper_branch: 1,
            location: 1.1,
            min_gap: gap(1.1),
            window: (0.8, 1.4),
            step: 1,
            lower_index: 0,
            bracket: (0.6, 1.6),
            status: RefineStatus::Coarse,
        };
        let r = refine_crossing(|x| Ok(vec![0.0, gap(x)]), &crossing, 200).unwrap();
        assert_eq!(r.status, RefineStatus::Refined);
        assert!((r.location - 1.0).abs() < 1e-6);
        assert!((r.min_gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_unimodal_keeps_coarse() {
        // two dips inside the bracket, centre probe higher than one end
        let gap = |x: f64| 1.0 + (20.0 * x).cos() * 0.5 + x;
        let crossing = AvoidedCrossing {
            lower_branch: 0,
            upper_branch: 1,
            location: 0.0,
            min_gap: gap(0.0),
            window: (-0.5, 0.5),
            step: 1,
            lower_index: 0,
            bracket: (-0.5, 0.5),
            status: RefineStatus::Coarse,
        };
        let r = refine_crossing(|x| Ok(vec![0.0, gap(x)]), &crossing, 50).unwrap();
        assert_eq!(r.status, RefineStatus::NotUnimodal);
        assert_eq!(r.location, 0.0);
    }
}
