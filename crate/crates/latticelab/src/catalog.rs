//! Registry of named example configurations, the `name:key=value` spec
//! grammar that builds them, and the counting helpers for the sparse-set
//! construction behind `section2`.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::config::{sparse_set_contains, Configuration, Word};
use crate::error::{LatticeError, Result};

/// A fact about a catalog configuration together with the test that
/// checks it, so the catalog never claims more than the suite verifies.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KnownFact {
    pub fact: &'static str,
    pub checked_by: &'static str,
}

/// One buildable configuration family.
#[derive(Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Accepted `key=value` parameters, with defaults.
    pub parameters: &'static str,
    pub known_facts: &'static [KnownFact],
    #[serde(skip)]
    build: fn(Params) -> Result<Configuration>,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("parameters", &self.parameters)
            .finish()
    }
}

/// Parsed `key=value` parameters for one entry. Reads remove entries so
/// that leftovers can be rejected as unknown keys.
pub struct Params {
    entry: &'static str,
    values: BTreeMap<String, String>,
}

impl Params {
    fn parse(entry: &'static str, text: &str) -> Result<Params> {
        let mut values = BTreeMap::new();
        if !text.is_empty() {
            for piece in text.split(',') {
                let (key, value) = piece.split_once('=').ok_or_else(|| {
                    LatticeError::SpecParse(format!(
                        "parameter '{piece}' of '{entry}' is not key=value"
                    ))
                })?;
                if key.is_empty() || value.is_empty() {
                    return Err(LatticeError::SpecParse(format!(
                        "parameter '{piece}' of '{entry}' is not key=value"
                    )));
                }
                if values.insert(key.to_string(), value.to_string()).is_some() {
                    return Err(LatticeError::SpecParse(format!(
                        "duplicate parameter '{key}' for '{entry}'"
                    )));
                }
            }
        }
        Ok(Params { entry, values })
    }

    fn int<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.values.remove(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|_| {
                LatticeError::SpecParse(format!(
                    "parameter '{key}={raw}' of '{}' is not a valid integer",
                    self.entry
                ))
            }),
        }
    }

    fn finish(self) -> Result<()> {
        if let Some(key) = self.values.keys().next() {
            return Err(LatticeError::SpecParse(format!(
                "unknown parameter '{key}' for '{}'",
                self.entry
            )));
        }
        Ok(())
    }
}

fn build_constant(params: Params) -> Result<Configuration> {
    params.finish()?;
    use crate::config::{Alphabet, Grid};
    use crate::geometry::pt;
    Configuration::make_periodic(
        Alphabet::lowercase(1)?,
        Grid::new(1, 1, vec![0])?,
        pt(1, 0),
        pt(0, 1),
    )
}

fn build_stripes(mut params: Params) -> Result<Configuration> {
    let p: usize = params.int("p", 2)?;
    params.finish()?;
    use crate::config::{Alphabet, Grid};
    use crate::geometry::pt;
    if p < 1 {
        return Err(LatticeError::TooSmall {
            what: "stripe period",
            min: 1,
            got: p as i64,
        });
    }
    Configuration::make_periodic(
        Alphabet::lowercase(p)?,
        Grid::new(p, 1, (0..p as u8).collect())?,
        pt(p as i64, 0),
        pt(0, 1),
    )
}

fn build_checkerboard(params: Params) -> Result<Configuration> {
    params.finish()?;
    use crate::config::{Alphabet, Grid};
    use crate::geometry::pt;
    Configuration::make_periodic(
        Alphabet::lowercase(2)?,
        Grid::from_rows_top_down(&[vec![1, 0], vec![0, 1]])?,
        pt(2, 0),
        pt(0, 2),
    )
}

fn build_debruijn_lift(mut params: Params) -> Result<Configuration> {
    let order: u32 = params.int("L", 8)?;
    params.finish()?;
    Configuration::make_word_lift(Word::debruijn(order)?)
}

fn build_section2(mut params: Params) -> Result<Configuration> {
    let base: i64 = params.int("base", 10)?;
    let order: u32 = params.int("L", 16)?;
    let max_n: u32 = params.int("max_n", 4)?;
    params.finish()?;
    Configuration::make_section2_example(Word::debruijn(order)?, base, max_n)
}

fn build_section5(mut params: Params) -> Result<Configuration> {
    let order: u32 = params.int("L", 8)?;
    params.finish()?;
    Configuration::make_section5_example(Word::debruijn(order)?)
}

fn build_grid(params: Params) -> Result<Configuration> {
    // Never reached: build_config special-cases grid file paths so that
    // commas and equals signs in paths survive.
    params.finish()?;
    Err(LatticeError::SpecParse(
        "grid needs file=PATH, e.g. grid:file=pattern.txt".into(),
    ))
}

static CATALOG: [CatalogEntry; 7] = [
    CatalogEntry {
        name: "constant",
        summary: "single letter everywhere",
        parameters: "(none)",
        known_facts: &[
            KnownFact {
                fact: "every nonempty region shows exactly one pattern",
                checked_by: "entropy::tests::constant_profile_is_flat_zero",
            },
            KnownFact {
                fact: "every line is determined at every radius",
                checked_by: "expansivity::tests::constant_config_is_determined_everywhere",
            },
        ],
        build: build_constant,
    },
    CatalogEntry {
        name: "stripes",
        summary: "vertical stripes cycling through p letters",
        parameters: "p=2 (number of letters, 1..=26)",
        known_facts: &[
            KnownFact {
                fact: "every square window count is p",
                checked_by: "tests/acceptance.rs::c09_complexity_properties",
            },
            KnownFact {
                fact: "balanced sets exist along all four axis directions",
                checked_by: "tests/acceptance.rs::c05_balanced_sets",
            },
        ],
        build: build_stripes,
    },
    CatalogEntry {
        name: "checkerboard",
        summary: "two letters alternating by parity of x+y",
        parameters: "(none)",
        known_facts: &[
            KnownFact {
                fact: "window counts are 2 and the trapezoid dichotomy is violation-free",
                checked_by: "tests/acceptance.rs::c07_trapezoid_dichotomy",
            },
            KnownFact {
                fact: "the 2x2 square is a generating set",
                checked_by: "extension::tests::generating_sets_match_expectations",
            },
        ],
        build: build_checkerboard,
    },
    CatalogEntry {
        name: "debruijn_lift",
        summary: "vertically constant rows carrying a binary de Bruijn cycle",
        parameters: "L=8 (de Bruijn order, 1..=26)",
        known_facts: &[
            KnownFact {
                fact: "n x k window counts equal 2^n for n <= L",
                checked_by: "catalog::tests::lift_window_counts_are_powers_of_two",
            },
            KnownFact {
                fact: "the vertical line keeps a witness pair at small radius",
                checked_by: "expansivity::tests::lift_columns_leave_a_witness_on_the_vertical_line",
            },
        ],
        build: build_debruijn_lift,
    },
    CatalogEntry {
        name: "section2",
        summary: "rows shifted on the sparse set {base^m + i^2}, elsewhere the base word",
        parameters: "base=10, L=16 (de Bruijn order), max_n=4 (largest exponent)",
        known_facts: &[
            KnownFact {
                fact: "sparse-row windows near base^n hold floor(sqrt(k)) members",
                checked_by: "tests/acceptance.rs::c03_sparse_counts",
            },
            KnownFact {
                fact: "unmarked rows reproduce the base word",
                checked_by: "catalog::tests::section2_unmarked_rows_carry_the_word",
            },
        ],
        build: build_section2,
    },
    CatalogEntry {
        name: "section5",
        summary: "word lift with row zero shifted into the marked letters",
        parameters: "L=8 (de Bruijn order)",
        known_facts: &[
            KnownFact {
                fact: "rectangle counts over a straddling box equal (k+1)*2^n",
                checked_by: "catalog::tests::section5_counts_match_the_closed_form",
            },
            KnownFact {
                fact: "the vertical-direction entropy slope decays with scale",
                checked_by: "tests/acceptance.rs::c02_entropy_slopes",
            },
        ],
        build: build_section5,
    },
    CatalogEntry {
        name: "grid",
        summary: "configuration loaded from a grid text file",
        parameters: "file=PATH (required)",
        known_facts: &[KnownFact {
            fact: "text round-trips through the grid format parser",
            checked_by: "config::tests::grid_text_round_trip",
        }],
        build: build_grid,
    },
];

/// The built-in configuration families, in stable order.
pub fn catalog_list() -> &'static [CatalogEntry] {
    &CATALOG
}

/// Builds a configuration from a spec string: a catalog name, optionally
/// followed by `:key=value,...` parameters. Unknown names, unknown keys,
/// and malformed values are all rejected. The `grid` entry takes the rest
/// of the spec after `grid:file=` verbatim as a path, so paths may contain
/// commas or equals signs.
pub fn build_config(spec: &str) -> Result<Configuration> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(LatticeError::SpecParse("empty configuration spec".into()));
    }
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, r),
        None => (spec, ""),
    };
    if name == "grid" {
        let path = rest.strip_prefix("file=").ok_or_else(|| {
            LatticeError::SpecParse("grid needs file=PATH, e.g. grid:file=pattern.txt".into())
        })?;
        if path.is_empty() {
            return Err(LatticeError::SpecParse("grid file path is empty".into()));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| LatticeError::SpecParse(format!("cannot read grid file '{path}': {e}")))?;
        return Configuration::load_grid(&text);
    }
    let entry = CATALOG.iter().find(|e| e.name == name).ok_or_else(|| {
        LatticeError::SpecParse(format!(
            "unknown configuration '{name}'; the catalog command lists the choices"
        ))
    })?;
    let params = Params::parse(entry.name, rest)?;
    (entry.build)(params)
}

fn checked_pow(base: i64, exp: u32) -> Result<i64> {
    base.checked_pow(exp)
        .ok_or(LatticeError::Overflow("sparse-set power"))
}

/// Number of sparse-set members in the window `base^n + [1, k]`, by
/// direct enumeration of the defining terms `base^m + i^2`, `1 <= i <= m`.
pub fn sparse_set_count(base: i64, n: u32, k: i64) -> Result<u64> {
    if base < 2 {
        return Err(LatticeError::TooSmall {
            what: "sparse-set base",
            min: 2,
            got: base,
        });
    }
    if n < 1 {
        return Err(LatticeError::TooSmall {
            what: "sparse-set exponent",
            min: 1,
            got: n as i64,
        });
    }
    if k < 1 {
        return Err(LatticeError::TooSmall {
            what: "sparse-set window length",
            min: 1,
            got: k,
        });
    }
    let lo = checked_pow(base, n)?
        .checked_add(1)
        .ok_or(LatticeError::Overflow("sparse-set window"))?;
    let hi = checked_pow(base, n)?
        .checked_add(k)
        .ok_or(LatticeError::Overflow("sparse-set window"))?;
    let mut count = 0;
    let mut m = 1u32;
    loop {
        let p = match base.checked_pow(m) {
            Some(p) if p <= hi => p,
            _ => break,
        };
        for i in 1..=m as i64 {
            match i.checked_mul(i).and_then(|sq| p.checked_add(sq)) {
                Some(v) if v > hi => break,
                Some(v) if v >= lo => count += 1,
                _ => {}
            }
        }
        m += 1;
    }
    Ok(count)
}

/// Number of distinct length-k windows of the sparse-set indicator word
/// whose left endpoints lie in `[lo, hi]`. The whole window of every
/// endpoint must stay below `base^(max_n+1)`, where the truncated member
/// list is complete.
pub fn beta_complexity(base: i64, max_n: u32, k: u32, lo: i64, hi: i64) -> Result<u64> {
    if k < 1 {
        return Err(LatticeError::TooSmall {
            what: "indicator window length",
            min: 1,
            got: k as i64,
        });
    }
    if k > 63 {
        return Err(LatticeError::Overflow("indicator window encoding"));
    }
    if lo < 0 || hi < lo {
        return Err(LatticeError::SpecParse(format!(
            "indicator endpoint interval [{lo},{hi}] is not a nonnegative range"
        )));
    }
    let bound = checked_pow(base, max_n + 1)?;
    let need = hi
        .checked_add(k as i64)
        .ok_or(LatticeError::Overflow("indicator window"))?;
    if need > bound {
        return Err(LatticeError::TooSmall {
            what: "sparse indicator exactness bound base^(max_n+1)",
            min: need,
            got: bound,
        });
    }
    let bit = |j: i64| -> u64 { u64::from(sparse_set_contains(base, max_n, j)) };
    let mut code: u64 = 0;
    for d in 0..k as i64 {
        code |= bit(lo + d) << d;
    }
    let mut seen = HashSet::new();
    seen.insert(code);
    for x in lo + 1..=hi {
        code = (code >> 1) | (bit(x + k as i64 - 1) << (k - 1));
        seen.insert(code);
    }
    Ok(seen.len() as u64)
}
