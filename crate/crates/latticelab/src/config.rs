//! Configurations: total, lazily evaluable colorings of the plane.
//!
//! A `Configuration` couples an alphabet with an evaluation rule and an
//! exactness region. Rules are pure, so evaluation is deterministic and
//! safe to share across threads. Cells outside the exactness region are
//! errors, never silently extrapolated values.

use crate::error::{LatticeError, Result};
use crate::geometry::{pt, LatticePoint};
use num_integer::Integer;
use serde::Serialize;
use std::fmt::Write as _;

/// An ordered finite alphabet. Cell values are indices into it; the chars
/// exist for parsing and display.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: Vec<char>) -> Result<Alphabet> {
        if symbols.is_empty() {
            return Err(LatticeError::Alphabet("alphabet is empty".into()));
        }
        if symbols.len() > 255 {
            return Err(LatticeError::Alphabet(format!(
                "alphabet has {} symbols, limit 255",
                symbols.len()
            )));
        }
        for (i, c) in symbols.iter().enumerate() {
            if c.is_whitespace() || *c == ',' {
                return Err(LatticeError::Alphabet(format!(
                    "symbol {:?} is not allowed (whitespace and ',' are reserved)",
                    c
                )));
            }
            if symbols[..i].contains(c) {
                return Err(LatticeError::Alphabet(format!("duplicate symbol {:?}", c)));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn binary() -> Alphabet {
        Alphabet {
            symbols: vec!['0', '1'],
        }
    }

    /// {0,1,2,3} as digit symbols.
    pub fn quaternary() -> Alphabet {
        Alphabet {
            symbols: vec!['0', '1', '2', '3'],
        }
    }

    pub fn lowercase(n: usize) -> Result<Alphabet> {
        if n == 0 || n > 26 {
            return Err(LatticeError::Alphabet(format!(
                "lowercase alphabet size must be 1..=26, got {}",
                n
            )));
        }
        Alphabet::new(('a'..).take(n).collect())
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn index_of(&self, c: char) -> Option<u8> {
        self.symbols.iter().position(|s| *s == c).map(|i| i as u8)
    }

    pub fn symbol(&self, idx: u8) -> char {
        self.symbols[idx as usize]
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }
}

/// A finite binary word read cyclically, i.e. a periodic point of the full
/// shift. `at` indexes into the periodic extension over all of the line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Word {
    bits: Vec<u8>,
    debruijn_order: Option<u32>,
}

impl Word {
    pub fn from_bits(bits: Vec<u8>) -> Result<Word> {
        if bits.is_empty() {
            return Err(LatticeError::EmptySet);
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(LatticeError::Alphabet("word bits must be 0 or 1".into()));
        }
        Ok(Word {
            bits,
            debruijn_order: None,
        })
    }

    /// The lexicographically least binary de Bruijn sequence B(2, order):
    /// every binary word of length n <= order occurs in the cyclic word,
    /// so its factor complexity is exactly 2^n on that range.
    ///
    /// Built by concatenating, in lexicographic order, the Lyndon words
    /// whose length divides the order.
    pub fn debruijn(order: u32) -> Result<Word> {
        if order < 1 {
            return Err(LatticeError::TooSmall {
                what: "de Bruijn order",
                min: 1,
                got: order as i64,
            });
        }
        if order > 26 {
            return Err(LatticeError::Overflow("de Bruijn order above 26"));
        }
        let n = order as usize;
        let mut seq = Vec::with_capacity(1usize << n);
        let mut a = vec![0u8; n + 1];
        // Iterative depth-first traversal of the FKM recursion (t, p).
        fn db(t: usize, p: usize, n: usize, a: &mut Vec<u8>, seq: &mut Vec<u8>) {
            if t > n {
                if n.is_multiple_of(p) {
                    seq.extend_from_slice(&a[1..=p]);
                }
            } else {
                a[t] = a[t - p];
                db(t + 1, p, n, a, seq);
                for j in (a[t - p] + 1)..=1 {
                    a[t] = j;
                    db(t + 1, t, n, a, seq);
                }
            }
        }
        db(1, 1, n, &mut a, &mut seq);
        debug_assert_eq!(seq.len(), 1usize << n);
        Ok(Word {
            bits: seq,
            debruijn_order: Some(order),
        })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn debruijn_order(&self) -> Option<u32> {
        self.debruijn_order
    }

    /// Value of the periodic extension at any integer index.
    pub fn at(&self, i: i64) -> u8 {
        let m = self.bits.len() as i64;
        self.bits[i.rem_euclid(m) as usize]
    }

    /// Number of distinct length-n factors of the cyclic word.
    pub fn factor_count(&self, n: usize) -> u64 {
        if n == 0 {
            return 1;
        }
        let mut seen = std::collections::HashSet::new();
        let mut buf = vec![0u8; n];
        for s in 0..self.bits.len() {
            for (i, slot) in buf.iter_mut().enumerate() {
                *slot = self.bits[(s + i) % self.bits.len()];
            }
            if !seen.contains(buf.as_slice()) {
                seen.insert(buf.clone().into_boxed_slice());
            }
        }
        seen.len() as u64
    }
}

/// A dense rectangular block of cell values. Row 0 is the bottom row
/// (lowest y); the text format lists rows top-down.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Grid {
    width: usize,
    height: usize,
    cells: Vec<u8>,
}

impl Grid {
    pub fn new(width: usize, height: usize, cells: Vec<u8>) -> Result<Grid> {
        if width == 0 || height == 0 {
            return Err(LatticeError::NonPositive {
                what: "grid dimension",
                got: format!("{}x{}", width, height),
            });
        }
        if cells.len() != width * height {
            return Err(LatticeError::Internal(format!(
                "grid cell count {} does not match {}x{}",
                cells.len(),
                width,
                height
            )));
        }
        Ok(Grid {
            width,
            height,
            cells,
        })
    }

    /// Builds from rows listed top-down (as in the text format).
    pub fn from_rows_top_down(rows: &[Vec<u8>]) -> Result<Grid> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(LatticeError::NonPositive {
                what: "grid dimension",
                got: "empty row list".into(),
            });
        }
        let width = rows[0].len();
        let mut cells = Vec::with_capacity(width * rows.len());
        for row in rows.iter().rev() {
            if row.len() != width {
                return Err(LatticeError::Internal("ragged grid rows".into()));
            }
            cells.extend_from_slice(row);
        }
        Grid::new(width, rows.len(), cells)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Cell at (x, y) with y = 0 the bottom row.
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.cells[y * self.width + x]
    }

    pub fn max_value(&self) -> u8 {
        *self.cells.iter().max().expect("grids are nonempty")
    }

    /// Rows as symbol strings, top row first.
    pub fn rows_top_down(&self, alphabet: &Alphabet) -> Vec<String> {
        (0..self.height)
            .rev()
            .map(|y| {
                (0..self.width)
                    .map(|x| alphabet.symbol(self.get(x, y)))
                    .collect()
            })
            .collect()
    }

    /// Serializes in the grid file format.
    pub fn to_text(&self, alphabet: &Alphabet, background: Option<u8>) -> String {
        let mut out = String::new();
        let syms: Vec<String> = alphabet.symbols().iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "alphabet: {}", syms.join(","));
        if let Some(b) = background {
            let _ = writeln!(out, "background: {}", alphabet.symbol(b));
        }
        for row in self.rows_top_down(alphabet) {
            let _ = writeln!(out, "{}", row);
        }
        out
    }
}

/// Parses the grid file format:
///
/// ```text
/// alphabet: a,b
/// background: a        (optional)
/// ab                   (rows, top row = highest y)
/// ba
/// ```
pub fn parse_grid_text(text: &str) -> Result<(Alphabet, Grid, Option<u8>)> {
    let mut lines = text.lines().enumerate();
    let (first_no, first) = lines.next().ok_or_else(|| LatticeError::GridParse {
        line: 1,
        col: 1,
        msg: "empty input".into(),
    })?;
    let header = first
        .strip_prefix("alphabet:")
        .ok_or_else(|| LatticeError::GridParse {
            line: first_no + 1,
            col: 1,
            msg: "expected 'alphabet: <comma-separated symbols>'".into(),
        })?;
    let mut symbols = Vec::new();
    for part in header.split(',') {
        let part = part.trim();
        let mut chars = part.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => symbols.push(c),
            _ => {
                return Err(LatticeError::GridParse {
                    line: first_no + 1,
                    col: 1,
                    msg: format!("alphabet symbols must be single characters, got {:?}", part),
                })
            }
        }
    }
    let alphabet = Alphabet::new(symbols).map_err(|e| LatticeError::GridParse {
        line: first_no + 1,
        col: 1,
        msg: e.to_string(),
    })?;

    let mut background = None;
    let mut rows: Vec<Vec<u8>> = Vec::new();
    let mut width: Option<usize> = None;
    for (no, line) in lines {
        if rows.is_empty() && background.is_none() {
            if let Some(rest) = line.strip_prefix("background:") {
                let rest = rest.trim();
                let mut chars = rest.chars();
                let (c, extra) = (chars.next(), chars.next());
                match (c, extra) {
                    (Some(c), None) => {
                        background =
                            Some(
                                alphabet
                                    .index_of(c)
                                    .ok_or_else(|| LatticeError::GridParse {
                                        line: no + 1,
                                        col: 1,
                                        msg: format!("background symbol {:?} not in alphabet", c),
                                    })?,
                            );
                        continue;
                    }
                    _ => {
                        return Err(LatticeError::GridParse {
                            line: no + 1,
                            col: 1,
                            msg: "background must be a single symbol".into(),
                        })
                    }
                }
            }
        }
        if line.is_empty() {
            return Err(LatticeError::GridParse {
                line: no + 1,
                col: 1,
                msg: "empty row line".into(),
            });
        }
        let mut row = Vec::new();
        for (col, c) in line.chars().enumerate() {
            match alphabet.index_of(c) {
                Some(i) => row.push(i),
                None => {
                    return Err(LatticeError::GridParse {
                        line: no + 1,
                        col: col + 1,
                        msg: format!("symbol {:?} not in alphabet", c),
                    })
                }
            }
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(LatticeError::GridParse {
                    line: no + 1,
                    col: row.len().min(w) + 1,
                    msg: format!("ragged row: expected width {}, got {}", w, row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(LatticeError::GridParse {
            line: 1,
            col: 1,
            msg: "grid has no rows".into(),
        });
    }
    let grid = Grid::from_rows_top_down(&rows)?;
    Ok((alphabet, grid, background))
}

/// The rectangle (possibly unbounded on any side) where a configuration's
/// rule is defined. Bounds are inclusive; `None` means unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExactRegion {
    pub x_min: Option<i64>,
    pub x_max: Option<i64>,
    pub y_min: Option<i64>,
    pub y_max: Option<i64>,
}

impl ExactRegion {
    pub const ALL: ExactRegion = ExactRegion {
        x_min: None,
        x_max: None,
        y_min: None,
        y_max: None,
    };

    pub fn is_total(&self) -> bool {
        self.x_min.is_none() && self.x_max.is_none() && self.y_min.is_none() && self.y_max.is_none()
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.violated_bound(p).is_none()
    }

    /// Human-readable description of the first bound `p` violates.
    pub fn violated_bound(&self, p: LatticePoint) -> Option<String> {
        if let Some(m) = self.x_min {
            if p.x < m {
                return Some(format!("x >= {}", m));
            }
        }
        if let Some(m) = self.x_max {
            if p.x > m {
                return Some(format!("x <= {}", m));
            }
        }
        if let Some(m) = self.y_min {
            if p.y < m {
                return Some(format!("y >= {}", m));
            }
        }
        if let Some(m) = self.y_max {
            if p.y > m {
                return Some(format!("y <= {}", m));
            }
        }
        None
    }
}

/// The finite set of translates enumerated in place of all lattice shifts:
/// an inclusive integer box of translation vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SearchBox {
    pub x0: i64,
    pub x1: i64,
    pub y0: i64,
    pub y1: i64,
}

impl SearchBox {
    pub fn new(x0: i64, x1: i64, y0: i64, y1: i64) -> Result<SearchBox> {
        if x0 > x1 || y0 > y1 {
            return Err(LatticeError::EmptyBox { x0, x1, y0, y1 });
        }
        Ok(SearchBox { x0, x1, y0, y1 })
    }

    /// [0, w-1] x [0, h-1].
    pub fn origin(w: i64, h: i64) -> Result<SearchBox> {
        if w < 1 || h < 1 {
            return Err(LatticeError::NonPositive {
                what: "search box side",
                got: format!("{}x{}", w, h),
            });
        }
        SearchBox::new(0, w - 1, 0, h - 1)
    }

    pub fn width(&self) -> i64 {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> i64 {
        self.y1 - self.y0 + 1
    }

    pub fn count(&self) -> u128 {
        self.width() as u128 * self.height() as u128
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn iter(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        let b = *self;
        (b.y0..=b.y1).flat_map(move |y| (b.x0..=b.x1).map(move |x| pt(x, y)))
    }
}

impl std::fmt::Display for SearchBox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{},{}:{}", self.x0, self.x1, self.y0, self.y1)
    }
}

/// Provenance record: which generator produced a configuration, with its
/// parameters. Serialized into every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum Descriptor {
    Periodic {
        patch_rows: Vec<String>,
        period_u: (i64, i64),
        period_v: (i64, i64),
        #[serde(skip_serializing_if = "Option::is_none")]
        debruijn_order: Option<u32>,
    },
    /// Sparse-row construction: a marked set of rows carries the shifted
    /// word, all other rows carry the word itself.
    SparseRows {
        base: i64,
        max_n: u32,
        alpha_len: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        debruijn_order: Option<u32>,
    },
    /// One marked row over a vertically constant word lift.
    MarkedRow {
        alpha_len: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        debruijn_order: Option<u32>,
    },
    Grid {
        width: usize,
        height: usize,
        background: Option<char>,
    },
}

#[derive(Debug)]
enum Rule {
    /// Doubly periodic, stored against the Hermite basis (g, y1), (0, y2)
    /// of the period lattice; the patch is the g x y2 fundamental domain.
    Periodic {
        patch: Grid,
        g: i64,
        y1: i64,
        y2: i64,
    },
    /// eta(i, j) = alpha(i + j) if j is in the sparse set, else alpha(i).
    SparseRows {
        alpha: Word,
        max_n: u32,
        pows: Vec<i64>,
    },
    /// eta(i, 0) = alpha(i) + 2, eta(i, j) = alpha(i) for j != 0.
    MarkedRow {
        alpha: Word,
    },
    Grid {
        grid: Grid,
        background: Option<u8>,
    },
}

/// A total coloring rule with an alphabet, an exactness region, and a
/// provenance descriptor. Immutable and freely shareable across threads.
#[derive(Debug)]
pub struct Configuration {
    alphabet: Alphabet,
    rule: Rule,
    exact: ExactRegion,
    descriptor: Descriptor,
}

fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut s = (n as f64).sqrt() as i64;
    while s > 0 && s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

/// Membership in A = {base^m + i^2 : 1 <= i <= m <= max_n}.
pub fn sparse_set_contains(base: i64, max_n: u32, j: i64) -> bool {
    let mut p = 1i64;
    for m in 1..=max_n as i64 {
        match p.checked_mul(base) {
            Some(v) => p = v,
            None => return false,
        }
        let r = j - p;
        if r >= 1 {
            let s = isqrt(r);
            if s * s == r && s >= 1 && s <= m {
                return true;
            }
        }
    }
    false
}

impl Configuration {
    /// Doubly periodic configuration from a fundamental-domain patch.
    ///
    /// The period lattice spanned by `period_u`, `period_v` is reduced to
    /// its Hermite basis (g, y1), (0, y2); the patch must be exactly the
    /// canonical g x y2 fundamental domain.
    pub fn make_periodic(
        alphabet: Alphabet,
        patch: Grid,
        period_u: LatticePoint,
        period_v: LatticePoint,
    ) -> Result<Configuration> {
        let det = period_u.cross(period_v);
        if det == 0 {
            return Err(LatticeError::DependentPeriods {
                u: period_u,
                v: period_v,
            });
        }
        if patch.max_value() as usize >= alphabet.size() {
            return Err(LatticeError::Alphabet(format!(
                "patch value {} outside alphabet of size {}",
                patch.max_value(),
                alphabet.size()
            )));
        }
        let egcd = period_u.x.extended_gcd(&period_v.x);
        let g = egcd.gcd;
        debug_assert!(g > 0, "g = 0 implies dependent periods");
        let y2_i128 = (det.unsigned_abs() / g as u128) as i128;
        let y1_raw = egcd.x as i128 * period_u.y as i128 + egcd.y as i128 * period_v.y as i128;
        let y1 = y1_raw.rem_euclid(y2_i128) as i64;
        let y2 = y2_i128 as i64;
        if patch.width() as i64 != g || patch.height() as i64 != y2 {
            return Err(LatticeError::PatchMismatch {
                w: patch.width(),
                h: patch.height(),
                g,
                d: y2,
            });
        }
        let descriptor = Descriptor::Periodic {
            patch_rows: patch.rows_top_down(&alphabet),
            period_u: (period_u.x, period_u.y),
            period_v: (period_v.x, period_v.y),
            debruijn_order: None,
        };
        Ok(Configuration {
            alphabet,
            rule: Rule::Periodic { patch, g, y1, y2 },
            exact: ExactRegion::ALL,
            descriptor,
        })
    }

    /// Vertically constant lift of a cyclic word: eta(i, j) = w(i).
    pub fn make_word_lift(alpha: Word) -> Result<Configuration> {
        let order = alpha.debruijn_order();
        let len = alpha.len() as i64;
        let patch = Grid::new(alpha.len(), 1, alpha.bits().to_vec())?;
        let mut cfg =
            Configuration::make_periodic(Alphabet::binary(), patch, pt(len, 0), pt(0, 1))?;
        if let Descriptor::Periodic { debruijn_order, .. } = &mut cfg.descriptor {
            *debruijn_order = order;
        }
        Ok(cfg)
    }

    /// Sparse-row construction over the set A = {base^m + i^2 : 1 <= i <=
    /// m <= max_n}: eta(i, j) = alpha(i + j) when j is in A, else alpha(i).
    /// Exact for rows j < base^(max_n + 1); rows at or beyond that bound
    /// would need sparse-set members outside the enumerated range.
    pub fn make_section2_example(alpha: Word, base: i64, max_n: u32) -> Result<Configuration> {
        if base < 2 {
            return Err(LatticeError::TooSmall {
                what: "sparse-set base",
                min: 2,
                got: base,
            });
        }
        if max_n < 1 {
            return Err(LatticeError::TooSmall {
                what: "sparse-set max exponent",
                min: 1,
                got: max_n as i64,
            });
        }
        let mut pows = Vec::with_capacity(max_n as usize);
        let mut p = 1i64;
        for _ in 0..=max_n {
            p = p
                .checked_mul(base)
                .ok_or(LatticeError::Overflow("base^(max_n+1)"))?;
            pows.push(p);
        }
        let y_max = pows.pop().expect("max_n >= 1") - 1;
        let descriptor = Descriptor::SparseRows {
            base,
            max_n,
            alpha_len: alpha.len(),
            debruijn_order: alpha.debruijn_order(),
        };
        Ok(Configuration {
            alphabet: Alphabet::binary(),
            rule: Rule::SparseRows { alpha, max_n, pows },
            exact: ExactRegion {
                y_max: Some(y_max),
                ..ExactRegion::ALL
            },
            descriptor,
        })
    }

    /// Marked-row construction over {0,1,2,3}: row 0 carries the word
    /// shifted into {2,3}, every other row carries the word itself.
    pub fn make_section5_example(alpha: Word) -> Result<Configuration> {
        let descriptor = Descriptor::MarkedRow {
            alpha_len: alpha.len(),
            debruijn_order: alpha.debruijn_order(),
        };
        Ok(Configuration {
            alphabet: Alphabet::quaternary(),
            rule: Rule::MarkedRow { alpha },
            exact: ExactRegion::ALL,
            descriptor,
        })
    }

    /// Configuration from a parsed grid. With a background symbol the rule
    /// is total; without one, the exactness region is the grid footprint
    /// [0, w-1] x [0, h-1].
    pub fn from_grid(
        alphabet: Alphabet,
        grid: Grid,
        background: Option<u8>,
    ) -> Result<Configuration> {
        if grid.max_value() as usize >= alphabet.size() {
            return Err(LatticeError::Alphabet(format!(
                "grid value {} outside alphabet of size {}",
                grid.max_value(),
                alphabet.size()
            )));
        }
        if let Some(b) = background {
            if b as usize >= alphabet.size() {
                return Err(LatticeError::Alphabet(format!(
                    "background value {} outside alphabet of size {}",
                    b,
                    alphabet.size()
                )));
            }
        }
        let exact = if background.is_some() {
            ExactRegion::ALL
        } else {
            ExactRegion {
                x_min: Some(0),
                x_max: Some(grid.width() as i64 - 1),
                y_min: Some(0),
                y_max: Some(grid.height() as i64 - 1),
            }
        };
        let descriptor = Descriptor::Grid {
            width: grid.width(),
            height: grid.height(),
            background: background.map(|b| alphabet.symbol(b)),
        };
        Ok(Configuration {
            alphabet,
            rule: Rule::Grid { grid, background },
            exact,
            descriptor,
        })
    }

    /// Parses the grid file format and wraps it as a configuration.
    pub fn load_grid(text: &str) -> Result<Configuration> {
        let (alphabet, grid, background) = parse_grid_text(text)?;
        Configuration::from_grid(alphabet, grid, background)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn exact_region(&self) -> &ExactRegion {
        &self.exact
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    /// Cell value, checking the exactness region.
    pub fn get(&self, p: LatticePoint) -> Result<u8> {
        match self.exact.violated_bound(p) {
            Some(bound) => Err(LatticeError::CellNotExact { cell: p, bound }),
            None => Ok(self.eval_unchecked(p)),
        }
    }

    /// Cell value without the exactness check. Callers must have validated
    /// the sweep (see `complexity::validate_sweep`); outside the exact
    /// region the value is unspecified for sparse rules and panics for
    /// grid rules without background.
    pub fn eval_unchecked(&self, p: LatticePoint) -> u8 {
        debug_assert!(self.exact.contains(p), "cell {} outside exact region", p);
        match &self.rule {
            Rule::Periodic { patch, g, y1, y2 } => {
                let q = p.x.div_euclid(*g);
                let r = (p.x - q * *g) as usize;
                let row = (p.y as i128 - q as i128 * *y1 as i128).rem_euclid(*y2 as i128) as usize;
                patch.get(r, row)
            }
            Rule::SparseRows { alpha, max_n, pows } => {
                let j = p.y;
                let mut member = false;
                for (mi, pw) in pows.iter().enumerate() {
                    let m = mi as i64 + 1;
                    debug_assert!(m <= *max_n as i64);
                    let r = j - pw;
                    if r >= 1 {
                        let s = isqrt(r);
                        if s * s == r && s >= 1 && s <= m {
                            member = true;
                            break;
                        }
                    }
                }
                if member {
                    alpha.at(p.x + p.y)
                } else {
                    alpha.at(p.x)
                }
            }
            Rule::MarkedRow { alpha } => {
                let b = alpha.at(p.x);
                if p.y == 0 {
                    b + 2
                } else {
                    b
                }
            }
            Rule::Grid { grid, background } => {
                if p.x >= 0
                    && p.y >= 0
                    && (p.x as usize) < grid.width()
                    && (p.y as usize) < grid.height()
                {
                    grid.get(p.x as usize, p.y as usize)
                } else {
                    background.expect("cell outside grid footprint with no background")
                }
            }
        }
    }

    /// Hermite data (g, y1, y2) of the period lattice for doubly periodic
    /// rules: periods (g, y1) and (0, y2).
    pub fn double_periods(&self) -> Option<(i64, i64, i64)> {
        match &self.rule {
            Rule::Periodic { g, y1, y2, .. } => Some((*g, *y1, *y2)),
            _ => None,
        }
    }

    /// A horizontal period (smallest h > 0 with eta(x + (h,0)) = eta(x)
    /// guaranteed by the rule's structure), when one is known.
    pub fn horizontal_period(&self) -> Option<i64> {
        match &self.rule {
            Rule::Periodic { g, y1, y2, .. } => {
                let d = num_integer::gcd(*y1, *y2);
                Some(g * (y2 / d))
            }
            Rule::SparseRows { alpha, .. } => Some(alpha.len() as i64),
            Rule::MarkedRow { alpha } => Some(alpha.len() as i64),
            Rule::Grid { .. } => None,
        }
    }

    /// A vertical period guaranteed by the rule's structure, if any.
    pub fn vertical_period(&self) -> Option<i64> {
        match &self.rule {
            Rule::Periodic { y2, .. } => Some(*y2),
            _ => None,
        }
    }

    /// True when the search box provably covers every distinct translate:
    /// the rule is doubly periodic and the box spans a full fundamental
    /// domain of the period lattice in both Hermite axes.
    pub fn box_covers_translates(&self, b: &SearchBox) -> bool {
        match self.double_periods() {
            Some((g, _, y2)) => b.width() >= g && b.height() >= y2,
            None => false,
        }
    }
}
