//! Finite-radius probe of expansive versus nonexpansive lines.
//!
//! A line is expansive when agreement on a radius-r strip around it forces
//! agreement everywhere. The probe checks the finite shadow of that
//! implication: among window colorings observed over a search box, does
//! agreement on the strip cells force agreement on the whole window? A
//! witness pair refutes it at this scale; an all-clear is evidence, never
//! proof, since expansiveness quantifies over the full orbit closure.

use std::collections::HashMap;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::complexity::{self, Pattern};
use crate::config::{Configuration, SearchBox};
use crate::error::{LatticeError, Result};
use crate::geometry::{ratio_string, Direction, LatticePoint, PointSet, Rational};

const WINDOW_GUARD: u128 = 4_000_000;

fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(*r))
}

/// A pair of observed window colorings that agree on every strip cell yet
/// differ somewhere in the window.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansivityWitness {
    /// The two colorings in grid file format.
    pub first: String,
    pub second: String,
    #[serde(skip)]
    pub patterns: (Pattern, Pattern),
}

/// Outcome of probing one line at one radius, window, and search box.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansivityReport {
    pub direction: Direction,
    #[serde(serialize_with = "ser_rational")]
    pub radius: Rational,
    pub window: SearchBox,
    pub search_box: SearchBox,
    /// Window cells strictly within `radius` of the line through the
    /// origin along `direction`.
    pub strip_cells: u64,
    pub determined: bool,
    pub witness: Option<ExpansivityWitness>,
}

/// Strict test of Euclidean distance to the line through the origin:
/// `cross(p, v)^2 / |v|^2 < r^2`, exactly in rationals.
fn in_strip(p: LatticePoint, dir: Direction, r_sq: Ratio<i128>) -> bool {
    let v = dir.vector();
    let c = p.cross(v);
    Ratio::new(c * c, dir.norm_sq() as i128) < r_sq
}

/// Probes whether the strip of radius `r` around the line through the
/// origin along `dir` determines the window, judged over the colorings
/// observed while sweeping the search box.
///
/// The line is anchored at the origin of the window's own coordinates, so
/// a window centered on the origin puts the strip through its middle.
/// When two observed window colorings share every strip cell but differ
/// in the window, the lexicographically first such pair is returned as the
/// witness and `determined` is false.
pub fn probe_expansive(
    config: &Configuration,
    dir: Direction,
    r: Rational,
    window: &SearchBox,
    b: &SearchBox,
) -> Result<ExpansivityReport> {
    if r <= Rational::from_integer(0) {
        return Err(LatticeError::NonPositive {
            what: "expansivity radius",
            got: r.to_string(),
        });
    }
    if window.count() > WINDOW_GUARD {
        return Err(LatticeError::RegionTooLarge {
            cells: window.count(),
            limit: WINDOW_GUARD,
        });
    }
    let window_pts = PointSet::new(window.iter());
    let r_wide = Ratio::new(*r.numer() as i128, *r.denom() as i128);
    let r_sq = r_wide * r_wide;
    // Strip membership is judged in window coordinates, but patterns are
    // anchored at the window's min corner, so record anchored indices.
    let (wmin, _) = window_pts.bbox().expect("window is nonempty");
    let patterns = complexity::patterns_of_points(config, &window_pts, b)?;
    let support = patterns.support();
    let strip_idx: Vec<usize> = window_pts
        .iter()
        .filter(|&p| in_strip(p, dir, r_sq))
        .map(|p| {
            support
                .index_of(pt_anchor(p, wmin))
                .expect("strip cell inside window")
        })
        .collect();

    let values = patterns.values_sorted();
    let keyed: Vec<Vec<u8>> = values
        .par_iter()
        .map(|vals| strip_idx.iter().map(|&i| vals[i]).collect())
        .collect();
    let mut first_of: HashMap<&[u8], usize> = HashMap::new();
    let mut witness = None;
    for (i, key) in keyed.iter().enumerate() {
        match first_of.get(key.as_slice()) {
            None => {
                first_of.insert(key, i);
            }
            Some(&j) => {
                let make =
                    |vals: &[u8]| -> Result<Pattern> { Pattern::new(support, vals.to_vec()) };
                let pair = (make(values[j])?, make(values[i])?);
                let alphabet = config.alphabet();
                witness = Some(ExpansivityWitness {
                    first: pair
                        .0
                        .to_grid_text(alphabet)
                        .expect("window pattern is rectangular"),
                    second: pair
                        .1
                        .to_grid_text(alphabet)
                        .expect("window pattern is rectangular"),
                    patterns: pair,
                });
                break;
            }
        }
    }
    Ok(ExpansivityReport {
        direction: dir,
        radius: r,
        window: *window,
        search_box: *b,
        strip_cells: strip_idx.len() as u64,
        determined: witness.is_none(),
        witness,
    })
}

fn pt_anchor(p: LatticePoint, min: LatticePoint) -> LatticePoint {
    p - min
}
