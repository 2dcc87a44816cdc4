//! Quantitative tightness and uniform-integrability moduli over sliding unit
//! windows, plus the convergence-in-measure defect and the equivalence report
//! relating it to Stepanov-norm convergence.
//!
//! Everything here is exact for piecewise-constant functions: excursion
//! measures are cell counts divided by m, and the inner supremum over
//! measurable subsets of a window is attained by the largest cells with one
//! fractionally weighted boundary cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numeric::{exact_sum, pow_p};

/// Excursion measure outside closed norm-balls, per radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TightnessReport {
    pub radii: Vec<f64>,
    /// sup over grid shifts t of meas{s in (t,t+1) : |u(s)| > R}.
    pub excursions: Vec<f64>,
    /// Breakdown over the integer windows of the domain, one row per radius.
    pub per_window: Vec<Vec<f64>>,
}

/// Table of the uniform-integrability modulus M(delta).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UIModulusReport {
    pub p: f64,
    pub deltas: Vec<f64>,
    /// M(delta) = sup over grid shifts t of the largest integral of |u|^p
    /// over a measurable subset of (t,t+1) of measure <= delta.
    pub table: Vec<f64>,
}

/// Worst-window measure of a pointwise deviation of size >= epsilon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureDefect {
    pub epsilon: f64,
    pub value: f64,
}

/// Number of unit-window start positions (every grid shift).
fn window_starts(u: &GridFunction) -> Result<usize> {
    let spec = u.spec();
    if spec.units() < 1 {
        return Err(Error::InsufficientWindow {
            n_lo: spec.n_lo,
            n_hi: spec.n_hi,
            needed: "need at least one unit interval".into(),
        });
    }
    Ok((spec.units() - 1) * spec.m + 1)
}

/// Sliding-window maximum of a cell count, as a measure (count / m).
/// Integer prefix sums keep this exact.
fn sup_window_measure(flags: &[bool], m: usize, starts: usize) -> f64 {
    let mut prefix = vec![0u32; flags.len() + 1];
    for (i, &f) in flags.iter().enumerate() {
        prefix[i + 1] = prefix[i] + f as u32;
    }
    let mut worst = 0u32;
    for j in 0..starts {
        worst = worst.max(prefix[j + m] - prefix[j]);
    }
    worst as f64 / m as f64
}

/// Stepanov tightness against closed norm-balls of the given radii.
pub fn tightness(u: &GridFunction, radii: &[f64]) -> Result<TightnessReport> {
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidArgument("radii must be positive".into()));
    }
    let m = u.spec().m;
    let starts = window_starts(u)?;
    let norms: Vec<f64> = (0..u.spec().total_cells()).map(|c| u.cell_norm(c)).collect();
    let mut excursions = Vec::with_capacity(radii.len());
    let mut per_window = Vec::with_capacity(radii.len());
    for &r in radii {
        let flags: Vec<bool> = norms.iter().map(|&n| n > r).collect();
        excursions.push(sup_window_measure(&flags, m, starts));
        let rows: Vec<f64> = (0..u.spec().units())
            .map(|w| {
                let count = flags[w * m..(w + 1) * m].iter().filter(|&&f| f).count();
                count as f64 / m as f64
            })
            .collect();
        per_window.push(rows);
    }
    Ok(TightnessReport { radii: radii.to_vec(), excursions, per_window })
}

/// Exact integral of |u|^p over the best measurable subset of measure
/// `delta` within a window of `m` cells whose p-powers are `powers`. The
/// optimum takes the largest cells whole and weights the boundary cell
/// fractionally so the subset has measure exactly delta.
pub(crate) fn best_subset_integral(powers: &[f64], m: usize, delta: f64) -> f64 {
    let mut sorted = powers.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let h = 1.0 / m as f64;
    let k = ((delta * m as f64).ceil() as usize).clamp(1, m);
    let full_meas = (k - 1) as f64 / m as f64;
    let width = (delta - full_meas).min(h).max(0.0);
    let terms = sorted[..k - 1]
        .iter()
        .map(|&c| h * c)
        .chain(std::iter::once(width * sorted[k - 1]));
    exact_sum(terms)
}

/// Uniform-integrability modulus table for one function.
pub fn ui_modulus(u: &GridFunction, p: f64, deltas: &[f64]) -> Result<UIModulusReport> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent { p });
    }
    if deltas.iter().any(|d| !(*d > 0.0 && *d <= 1.0)) {
        return Err(Error::InvalidArgument("deltas must lie in (0, 1]".into()));
    }
    let m = u.spec().m;
    let starts = window_starts(u)?;
    let powers: Vec<f64> = (0..u.spec().total_cells())
        .map(|c| pow_p(u.cell_norm(c), p))
        .collect();
    let mut table = vec![0.0f64; deltas.len()];
    for j in 0..starts {
        let window = &powers[j..j + m];
        for (di, &delta) in deltas.iter().enumerate() {
            let v = best_subset_integral(window, m, delta);
            if v > table[di] {
                table[di] = v;
            }
        }
    }
    Ok(UIModulusReport { p, deltas: deltas.to_vec(), table })
}

/// Family modulus: max over members of the per-function modulus.
pub fn family_ui_modulus(family: &[&GridFunction], p: f64, deltas: &[f64]) -> Result<UIModulusReport> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    let mut table = vec![0.0f64; deltas.len()];
    for u in family {
        let r = ui_modulus(u, p, deltas)?;
        for (t, v) in table.iter_mut().zip(r.table) {
            if v > *t {
                *t = v;
            }
        }
    }
    Ok(UIModulusReport { p, deltas: deltas.to_vec(), table })
}

/// Worst-window measure of {s : |u_k(s) - u(s)| >= epsilon}.
pub fn measure_defect(u_k: &GridFunction, u: &GridFunction, epsilon: f64) -> Result<MeasureDefect> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let diff = u_k.sub(u)?;
    let m = diff.spec().m;
    let starts = window_starts(&diff)?;
    let flags: Vec<bool> = (0..diff.spec().total_cells())
        .map(|c| diff.cell_norm(c) >= epsilon)
        .collect();
    Ok(MeasureDefect { epsilon, value: sup_window_measure(&flags, m, starts) })
}

/// Verdicts relating Stepanov-norm convergence, convergence in measure and
/// the family uniform-integrability modulus on a finite family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub p: f64,
    pub sp_distances: Vec<f64>,
    pub eps_grid: Vec<f64>,
    /// defect_table[e][k] = measure defect of member k at eps_grid[e].
    pub defect_table: Vec<Vec<f64>>,
    pub delta_grid: Vec<f64>,
    pub family_ui: Vec<f64>,
    pub sp_converges: bool,
    pub measure_converges: bool,
    pub family_ui_small: bool,
    /// Forward-direction (Tchebychev) margin: min over members and eps of
    /// bound - defect; nonnegative means the inequality held everywhere.
    pub tchebychev_margin: f64,
    /// False only when measure convergence plus a small family modulus failed
    /// to produce norm convergence, or the forward direction failed.
    pub consistent: bool,
}

/// Decay heuristic for finite sequences: the tail reached (near) zero or
/// dropped well below the head.
fn decays(seq: &[f64]) -> bool {
    match (seq.first(), seq.last()) {
        (Some(&first), Some(&last)) => last <= 1e-9 || last <= 0.2 * first,
        _ => false,
    }
}

/// Evaluate both sides of the norm-vs-measure convergence equivalence on a
/// finite family, together with the family UI modulus that gates the backward
/// direction.
pub fn convergence_equivalence_check(
    family: &[GridFunction],
    u: &GridFunction,
    p: f64,
    eps_grid: &[f64],
    delta_grid: &[f64],
) -> Result<ConvergenceReport> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    let mut sp_distances = Vec::with_capacity(family.len());
    for uk in family {
        sp_distances.push(crate::grid::difference_norm(uk, u, p)?.grid_sup);
    }
    let mut defect_table = Vec::with_capacity(eps_grid.len());
    let mut tchebychev_margin = f64::INFINITY;
    for &eps in eps_grid {
        let mut row = Vec::with_capacity(family.len());
        for (k, uk) in family.iter().enumerate() {
            let d = measure_defect(uk, u, eps)?.value;
            let bound = pow_p(sp_distances[k], p) / pow_p(eps, p);
            tchebychev_margin = tchebychev_margin.min(bound - d);
            row.push(d);
        }
        defect_table.push(row);
    }
    let refs: Vec<&GridFunction> = family.iter().collect();
    let family_ui = family_ui_modulus(&refs, p, delta_grid)?.table;
    let sp_converges = decays(&sp_distances);
    let measure_converges = defect_table.iter().all(|row| decays(row));
    let i_min = delta_grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let i_max = delta_grid
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let family_ui_small = family_ui[i_min] <= 1e-9 || family_ui[i_min] <= 0.2 * family_ui[i_max];
    let backward_ok = !(measure_converges && family_ui_small) || sp_converges;
    let consistent = backward_ok && tchebychev_margin >= 0.0;
    Ok(ConvergenceReport {
        p,
        sp_distances,
        eps_grid: eps_grid.to_vec(),
        defect_table,
        delta_grid: delta_grid.to_vec(),
        family_ui,
        sp_converges,
        measure_converges,
        family_ui_small,
        tchebychev_margin,
        consistent,
    })
}

/// Root-form Stepanov distance, shared by convergence tests so the
/// defect/bound pair uses one power convention.
pub fn sp_distance(u: &GridFunction, v: &GridFunction, p: f64) -> Result<f64> {
    Ok(crate::grid::difference_norm(u, v, p)?.grid_sup)
}
