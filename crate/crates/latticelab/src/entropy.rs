//! Finite-scale estimators for directional and topological entropy, via the
//! complexity counts over thickened segments, squares, and convex regions.
//!
//! Nothing here extrapolates: every estimator returns the finite profile it
//! measured (counts, fitted slopes, tail difference quotients) and leaves
//! the limit to the reader. All logarithms are natural.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::complexity;
use crate::config::{Configuration, SearchBox};
use crate::error::{LatticeError, Result};
use crate::extension;
use crate::geometry::{
    ratio_string, thickness, ConvexLatticeSet, Direction, Rational, SegmentNeighborhood,
};

fn ser_rationals<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| ratio_string(*r)))
}

/// Log-complexity of thickened segments in one direction, over a grid of
/// thicknesses and scales, with per-thickness slope estimates.
///
/// A scale `s` counts primitive steps: the core segment runs from the
/// origin to `s` times the direction's primitive vector, so its Euclidean
/// length is `s * sqrt(p^2 + q^2)`. Slopes are per scale unit; divide by
/// the primitive vector length to normalize per unit of Euclidean length
/// (the two agree on axis directions).
#[derive(Debug, Clone, Serialize)]
pub struct EntropyProfile {
    pub direction: Direction,
    #[serde(serialize_with = "ser_rationals")]
    pub thickness_values: Vec<Rational>,
    pub scales: Vec<i64>,
    /// `log_counts[i][j]` is the natural log of the pattern count over the
    /// neighborhood with thickness `thickness_values[i]` at `scales[j]`.
    pub log_counts: Vec<Vec<f64>>,
    /// Least-squares slope of log count against scale, per thickness.
    pub slope_fit: Vec<f64>,
    /// Difference quotient over the last two scales, per thickness.
    pub slope_diff: Vec<f64>,
    /// Largest difference quotient across thicknesses: the finite-scale
    /// stand-in for the supremum over thickness in the entropy formula.
    pub sup_slope: f64,
}

impl EntropyProfile {
    /// Plot-ready rows, one per (thickness, scale) cell. The direction
    /// field is quoted because it contains a comma.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("direction,t,s,log_count,slope_fit,slope_diff\n");
        for (i, t) in self.thickness_values.iter().enumerate() {
            for (j, s) in self.scales.iter().enumerate() {
                out.push_str(&format!(
                    "\"{}\",{},{},{},{},{}\n",
                    self.direction,
                    ratio_string(*t),
                    s,
                    self.log_counts[i][j],
                    self.slope_fit[i],
                    self.slope_diff[i],
                ));
            }
        }
        out
    }
}

fn check_scales(s_list: &[i64]) -> Result<()> {
    if s_list.len() < 2 || s_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LatticeError::DegenerateScales);
    }
    Ok(())
}

fn least_squares_slope(xs: &[i64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean_x = xs.iter().map(|&x| x as f64).sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x as f64 - mean_x;
        num += dx * (y - mean_y);
        den += dx * dx;
    }
    // Scales are strictly increasing, so den > 0.
    num / den
}

fn diff_quotient(xs: &[i64], ys: &[f64]) -> f64 {
    let n = xs.len();
    (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]) as f64
}

/// Measures `log P` over the `(thickness, scale)` grid for one direction
/// and fits per-thickness slopes. Thickness values are sorted and
/// deduplicated so the count matrix is monotone along both axes.
pub fn directional_entropy_profile(
    config: &Configuration,
    dir: Direction,
    t_list: &[Rational],
    s_list: &[i64],
    b: &SearchBox,
) -> Result<EntropyProfile> {
    check_scales(s_list)?;
    if t_list.is_empty() {
        return Err(LatticeError::EmptySet);
    }
    let mut ts = t_list.to_vec();
    ts.sort();
    ts.dedup();
    for &s in s_list {
        if s < 0 {
            return Err(LatticeError::Negative {
                what: "segment scale",
                got: s.to_string(),
            });
        }
    }
    let cells: Vec<(usize, usize)> = (0..ts.len())
        .flat_map(|i| (0..s_list.len()).map(move |j| (i, j)))
        .collect();
    let logs: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| -> Result<f64> {
            let nb = SegmentNeighborhood::new(dir, Rational::from_integer(s_list[j]), ts[i])?;
            let count = complexity::count_points(config, &nb.points(), b)?;
            Ok((count as f64).ln())
        })
        .collect::<Result<Vec<f64>>>()?;
    let log_counts: Vec<Vec<f64>> = logs.chunks(s_list.len()).map(|row| row.to_vec()).collect();
    let slope_fit: Vec<f64> = log_counts
        .iter()
        .map(|row| least_squares_slope(s_list, row))
        .collect();
    let slope_diff: Vec<f64> = log_counts
        .iter()
        .map(|row| diff_quotient(s_list, row))
        .collect();
    let sup_slope = slope_diff.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(EntropyProfile {
        direction: dir,
        thickness_values: ts,
        scales: s_list.to_vec(),
        log_counts,
        slope_fit,
        slope_diff,
        sup_slope,
    })
}

/// `log P(n, n) / n^2` for each requested square side, the normalized
/// quantity whose limit is the topological entropy.
pub fn topological_entropy_estimate(
    config: &Configuration,
    n_list: &[i64],
    b: &SearchBox,
) -> Result<Vec<(i64, f64)>> {
    let counts: Vec<u64> = n_list
        .par_iter()
        .map(|&n| complexity::count_points(config, ConvexLatticeSet::grid_rect(n, n)?.points(), b))
        .collect::<Result<Vec<u64>>>()?;
    Ok(n_list
        .iter()
        .zip(counts)
        .map(|(&n, c)| (n, (c as f64).ln() / (n as f64 * n as f64)))
        .collect())
}

/// `log P(K_i) / tau_u(K_i)` for a sequence of convex regions: the ratio
/// whose decay along a suitable region sequence certifies zero entropy in
/// the direction `u`. Every region must have positive thickness across
/// that direction.
pub fn convex_criterion_check(
    config: &Configuration,
    regions: &[ConvexLatticeSet],
    dir: Direction,
    b: &SearchBox,
) -> Result<Vec<(usize, f64)>> {
    let taus: Vec<f64> = regions
        .iter()
        .enumerate()
        .map(|(i, region)| {
            let tau = thickness(region, dir);
            if tau.is_zero() {
                return Err(LatticeError::ZeroThickness {
                    p: dir.p(),
                    q: dir.q(),
                    index: i,
                });
            }
            Ok(tau.euclidean())
        })
        .collect::<Result<Vec<f64>>>()?;
    let counts: Vec<u64> = regions
        .par_iter()
        .map(|region| complexity::count_points(config, region.points(), b))
        .collect::<Result<Vec<u64>>>()?;
    Ok(counts
        .iter()
        .zip(taus)
        .enumerate()
        .map(|(i, (&c, tau))| (i, (c as f64).ln() / tau))
        .collect())
}

/// One verified step of the generating-set growth bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GrowthStep {
    pub s_from: i64,
    pub s_to: i64,
    pub log_count_from: f64,
    pub log_count_to: f64,
    /// `log_count_from + 2 d (s_to - s_from) log |A|` with `d` the template
    /// diameter: what the growth bound allows at `s_to`.
    pub log_bound: f64,
    pub satisfied: bool,
}

fn diameter_sq(set: &ConvexLatticeSet) -> i128 {
    let hull = set.hull();
    let mut best = 0;
    for (i, &a) in hull.iter().enumerate() {
        for &c in &hull[i..] {
            best = best.max((a - c).norm_sq());
        }
    }
    best
}

/// Checks the step inequality `P([0,(s+1)u]^(t)) <= |A|^{2d} P([0,su]^(t))`
/// between consecutive listed scales (iterated across gaps), where `S` is
/// a generating set of diameter `d` and the thickness `t` exceeds `d`.
pub fn generating_bound_check(
    config: &Configuration,
    template: &ConvexLatticeSet,
    dir: Direction,
    t: Rational,
    s_list: &[i64],
    b: &SearchBox,
) -> Result<Vec<GrowthStep>> {
    check_scales(s_list)?;
    if !extension::is_generating_set(config, template, b)? {
        return Err(LatticeError::NotGeneratingSet);
    }
    let diam_sq = diameter_sq(template);
    if t <= Rational::zero() || widen_sq(t) <= diam_sq.into() {
        return Err(LatticeError::ThicknessTooSmall {
            t: ratio_string(t),
            diam: format!("sqrt({diam_sq})"),
        });
    }
    let profile = directional_entropy_profile(config, dir, &[t], s_list, b)?;
    let logs = &profile.log_counts[0];
    let d = (diam_sq as f64).sqrt();
    let log_alpha = (config.alphabet().size() as f64).ln();
    let mut steps = Vec::with_capacity(s_list.len() - 1);
    for w in 0..s_list.len() - 1 {
        let gap = (s_list[w + 1] - s_list[w]) as f64;
        let log_bound = logs[w] + 2.0 * d * gap * log_alpha;
        steps.push(GrowthStep {
            s_from: s_list[w],
            s_to: s_list[w + 1],
            log_count_from: logs[w],
            log_count_to: logs[w + 1],
            log_bound,
            satisfied: logs[w + 1] <= log_bound,
        });
    }
    Ok(steps)
}

/// Exact squared value of a rational, widened so the comparison with a
/// squared lattice diameter cannot overflow.
fn widen_sq(t: Rational) -> num_rational::Ratio<i128> {
    let w = num_rational::Ratio::new(*t.numer() as i128, *t.denom() as i128);
    w * w
}
