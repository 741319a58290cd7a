//! Command-line surface: argument grammar, output assembly, and exit
//! codes. Everything analytical lives in the library modules; this module
//! only parses, dispatches, and serializes.
//!
//! Exit codes: 0 on success, 1 on any parse error (flags, spec strings,
//! grid files), 2 on domain errors, whose messages name the violated
//! bound. Output for a given invocation is byte-identical across runs and
//! thread counts and always ends in a newline.

use std::ffi::OsString;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::catalog;
use crate::complexity;
use crate::config::{Configuration, SearchBox};
use crate::entropy;
use crate::error::{LatticeError, Result};
use crate::expansivity;
use crate::extension;
use crate::geometry::{pt, ConvexLatticeSet, Direction, LatticePoint, Rational};

#[derive(Parser)]
#[command(
    name = "latticelab",
    version,
    about = "Pattern complexity of two-dimensional configurations over convex lattice regions"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for parallel sweeps; defaults to the machine
    /// parallelism, or the LATTICELAB_THREADS variable when set.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

const BOX_HELP: &str = "Search box of translates: WxH for [0,W-1]x[0,H-1], or x0:x1,y0:y1. \
                        Defaults to one fundamental domain for doubly periodic configurations.";
const RECT_HELP: &str = "Rectangle: WxH for [0,W-1]x[0,H-1], or x0:x1,y0:y1";

#[derive(Subcommand)]
enum Command {
    /// Count the distinct colorings of one rectangular region.
    Complexity {
        /// Configuration spec: a catalog name plus parameters, e.g.
        /// stripes:p=2 or grid:file=pattern.txt.
        #[arg(long)]
        config: String,
        #[arg(long, help = RECT_HELP, allow_hyphen_values = true)]
        region: String,
        #[arg(long = "box", value_name = "BOX", help = BOX_HELP, allow_hyphen_values = true)]
        box_spec: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Tabulate rectangle complexities up to given side lengths.
    Table {
        #[arg(long)]
        config: String,
        #[arg(long = "n-max")]
        n_max: i64,
        #[arg(long = "k-max")]
        k_max: i64,
        #[arg(long = "box", value_name = "BOX", help = BOX_HELP, allow_hyphen_values = true)]
        box_spec: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// List rectangles whose complexity is at most their area.
    Nivat {
        #[arg(long)]
        config: String,
        #[arg(long = "n-max")]
        n_max: i64,
        #[arg(long = "k-max")]
        k_max: i64,
        #[arg(long = "box", value_name = "BOX", help = BOX_HELP, allow_hyphen_values = true)]
        box_spec: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Log-complexity profile over thickened segments in one direction.
    Entropy {
        #[arg(long)]
        config: String,
        /// Direction as a primitive integer vector p,q.
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        /// Comma-separated thicknesses, each an integer or num/den.
        #[arg(long, default_value = "1,2,4")]
        t: String,
        /// Comma-separated strictly increasing integer scales.
        #[arg(long, default_value = "8,16,32")]
        s: String,
        /// Search box; the default covers one horizontal period and, for
        /// configurations without a vertical period, rows straddling the
        /// largest neighborhood.
        #[arg(long = "box", value_name = "BOX", allow_hyphen_values = true)]
        box_spec: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Search for a balanced set along an axis direction.
    Balanced {
        #[arg(long)]
        config: String,
        #[arg(long)]
        n1: i64,
        #[arg(long)]
        k1: i64,
        /// Axis direction as p,q: one of 1,0 / -1,0 / 0,1 / 0,-1.
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        #[arg(long = "box", value_name = "BOX", help = BOX_HELP, allow_hyphen_values = true)]
        box_spec: Option<String>,
    },
    /// Test whether a point is generated, or a region is a generating set.
    Generated {
        #[arg(long)]
        config: String,
        #[arg(long, help = RECT_HELP, allow_hyphen_values = true)]
        region: String,
        /// Point x,y inside the region; when absent, every boundary point
        /// is tested instead.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long = "box", value_name = "BOX", help = BOX_HELP, allow_hyphen_values = true)]
        box_spec: Option<String>,
    },
    /// Apply rounds of the directed template extension to a region.
    Extend {
        #[arg(long, help = RECT_HELP, allow_hyphen_values = true)]
        region: String,
        /// Template rectangle to slide along the directional edge.
        #[arg(long, help = RECT_HELP, allow_hyphen_values = true)]
        template: String,
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        /// Candidate offsets to drop from each end of the segment.
        #[arg(long, default_value_t = 0)]
        trim: usize,
        /// Extension rounds to apply.
        #[arg(long, default_value_t = 1)]
        steps: u32,
    },
    /// Classify seed colorings by their extensions across a trapezoid.
    Dichotomy {
        #[arg(long)]
        config: String,
        #[arg(long)]
        n1: i64,
        #[arg(long)]
        k1: i64,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        k: i64,
        #[arg(long = "box", value_name = "BOX", help = BOX_HELP, allow_hyphen_values = true)]
        box_spec: Option<String>,
    },
    /// Probe whether a strip around a line determines a window.
    Expansive {
        #[arg(long)]
        config: String,
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        /// Strip radius, an integer or num/den rational.
        #[arg(long, allow_hyphen_values = true)]
        radius: String,
        /// Window to compare colorings over, in box syntax; center it on
        /// the origin to put the strip through its middle.
        #[arg(long, value_name = "BOX", allow_hyphen_values = true)]
        window: String,
        #[arg(long = "box", value_name = "BOX", help = BOX_HELP, allow_hyphen_values = true)]
        box_spec: Option<String>,
    },
    /// List the built-in configuration families.
    Catalog,
}

fn parse_i64(what: &str, text: &str) -> Result<i64> {
    text.trim()
        .parse()
        .map_err(|_| LatticeError::SpecParse(format!("{what} '{text}' is not an integer")))
}

/// Box syntax: `WxH` anchored at the origin, or explicit `x0:x1,y0:y1`.
fn parse_box(text: &str) -> Result<SearchBox> {
    if let Some((w, h)) = text.split_once('x') {
        return SearchBox::origin(parse_i64("box width", w)?, parse_i64("box height", h)?);
    }
    let (xs, ys) = text.split_once(',').ok_or_else(|| {
        LatticeError::SpecParse(format!("box '{text}' is neither WxH nor x0:x1,y0:y1"))
    })?;
    let parse_range = |part: &str| -> Result<(i64, i64)> {
        let (a, b) = part
            .split_once(':')
            .ok_or_else(|| LatticeError::SpecParse(format!("box range '{part}' is not lo:hi")))?;
        Ok((parse_i64("box bound", a)?, parse_i64("box bound", b)?))
    };
    let (x0, x1) = parse_range(xs)?;
    let (y0, y1) = parse_range(ys)?;
    SearchBox::new(x0, x1, y0, y1)
}

fn parse_rect(text: &str) -> Result<ConvexLatticeSet> {
    let b = parse_box(text)?;
    ConvexLatticeSet::rect(pt(b.x0, b.y0), pt(b.x1, b.y1))
}

fn parse_dir(text: &str) -> Result<Direction> {
    let (p, q) = text
        .split_once(',')
        .ok_or_else(|| LatticeError::SpecParse(format!("direction '{text}' is not p,q")))?;
    Direction::new(
        parse_i64("direction component", p)?,
        parse_i64("direction component", q)?,
    )
}

fn parse_point(text: &str) -> Result<LatticePoint> {
    let (x, y) = text
        .split_once(',')
        .ok_or_else(|| LatticeError::SpecParse(format!("point '{text}' is not x,y")))?;
    Ok(pt(parse_i64("coordinate", x)?, parse_i64("coordinate", y)?))
}

fn parse_rational(what: &str, text: &str) -> Result<Rational> {
    let make = |n: i64, d: i64| -> Result<Rational> {
        if d == 0 {
            return Err(LatticeError::SpecParse(format!(
                "{what} '{text}' divides by zero"
            )));
        }
        Ok(Rational::new(n, d))
    };
    match text.split_once('/') {
        Some((n, d)) => make(parse_i64(what, n)?, parse_i64(what, d)?),
        None => make(parse_i64(what, text)?, 1),
    }
}

fn parse_rational_list(what: &str, text: &str) -> Result<Vec<Rational>> {
    text.split(',').map(|p| parse_rational(what, p)).collect()
}

fn parse_i64_list(what: &str, text: &str) -> Result<Vec<i64>> {
    text.split(',').map(|p| parse_i64(what, p)).collect()
}

/// The default search box: one fundamental domain when the configuration
/// is doubly periodic, otherwise the caller must supply one.
fn resolve_box(config: &Configuration, spec: Option<&str>) -> Result<SearchBox> {
    if let Some(text) = spec {
        return parse_box(text);
    }
    match (config.horizontal_period(), config.vertical_period()) {
        (Some(h), Some(v)) => SearchBox::new(0, h - 1, 0, v - 1),
        _ => Err(LatticeError::SpecParse(
            "this configuration has no finite fundamental domain; pass an explicit --box".into(),
        )),
    }
}

/// Entropy default: one horizontal period wide (64 columns when no period
/// is known) and, without a vertical period, rows placed so that every
/// neighborhood translate can straddle the distinguished rows near zero.
fn resolve_entropy_box(
    config: &Configuration,
    spec: Option<&str>,
    dir: Direction,
    ts: &[Rational],
    ss: &[i64],
) -> Result<SearchBox> {
    if let Some(text) = spec {
        return parse_box(text);
    }
    let width = config.horizontal_period().unwrap_or(64);
    if let Some(v) = config.vertical_period() {
        return SearchBox::new(0, width - 1, 0, v - 1);
    }
    let t_max = ts.iter().max().copied().ok_or(LatticeError::EmptySet)?;
    let s_max = ss.iter().max().copied().unwrap_or(1);
    let nb = crate::geometry::SegmentNeighborhood::new(
        dir,
        Rational::from_integer(s_max.max(0)),
        t_max,
    )?;
    let (min, max) = nb.points().bbox().ok_or(LatticeError::EmptySet)?;
    let height = max.y - min.y + 1;
    SearchBox::new(0, width - 1, -(height + 1), 1)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

fn json_only(format: Format) -> Result<()> {
    if format == Format::Csv {
        return Err(LatticeError::SpecParse(
            "csv output is not available for this command; use --format json".into(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct GeneratedOutcome {
    region: ConvexLatticeSet,
    search_box: SearchBox,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<LatticePoint>,
    generated: bool,
}

fn nivat_csv(pairs: &[complexity::NivatPair]) -> String {
    let mut out = String::from("n,k,count\n");
    for p in pairs {
        out.push_str(&format!("{},{},{}\n", p.n, p.k, p.count));
    }
    out
}

fn run(command: Command) -> Result<String> {
    match command {
        Command::Complexity {
            config,
            region,
            box_spec,
            format,
        } => {
            json_only(format)?;
            let config = catalog::build_config(&config)?;
            let region = parse_rect(&region)?;
            let b = resolve_box(&config, box_spec.as_deref())?;
            let result = complexity::complexity(&config, &region, &b)?;
            Ok(to_json(&result))
        }
        Command::Table {
            config,
            n_max,
            k_max,
            box_spec,
            format,
        } => {
            let config = catalog::build_config(&config)?;
            let b = resolve_box(&config, box_spec.as_deref())?;
            let rows = complexity::rectangle_table(&config, n_max, k_max, &b)?;
            Ok(match format {
                Format::Csv => complexity::table_to_csv(&rows),
                Format::Json => to_json(&rows),
            })
        }
        Command::Nivat {
            config,
            n_max,
            k_max,
            box_spec,
            format,
        } => {
            let config = catalog::build_config(&config)?;
            let b = resolve_box(&config, box_spec.as_deref())?;
            let pairs = complexity::nivat_scan(&config, n_max, k_max, &b)?;
            Ok(match format {
                Format::Csv => nivat_csv(&pairs),
                Format::Json => to_json(&pairs),
            })
        }
        Command::Entropy {
            config,
            dir,
            t,
            s,
            box_spec,
            format,
        } => {
            let config = catalog::build_config(&config)?;
            let dir = parse_dir(&dir)?;
            let ts = parse_rational_list("thickness", &t)?;
            let ss = parse_i64_list("scale", &s)?;
            let b = resolve_entropy_box(&config, box_spec.as_deref(), dir, &ts, &ss)?;
            let profile = entropy::directional_entropy_profile(&config, dir, &ts, &ss, &b)?;
            Ok(match format {
                Format::Csv => profile.to_csv(),
                Format::Json => to_json(&profile),
            })
        }
        Command::Balanced {
            config,
            n1,
            k1,
            dir,
            box_spec,
        } => {
            let config = catalog::build_config(&config)?;
            let dir = parse_dir(&dir)?;
            let b = resolve_box(&config, box_spec.as_deref())?;
            let report = extension::find_balanced_set(&config, n1, k1, dir, &b)?;
            Ok(to_json(&report))
        }
        Command::Generated {
            config,
            region,
            point,
            box_spec,
        } => {
            let config = catalog::build_config(&config)?;
            let region = parse_rect(&region)?;
            let b = resolve_box(&config, box_spec.as_deref())?;
            let (point, generated) = match point {
                Some(text) => {
                    let x = parse_point(&text)?;
                    (Some(x), extension::is_generated(&config, &region, x, &b)?)
                }
                None => (None, extension::is_generating_set(&config, &region, &b)?),
            };
            Ok(to_json(&GeneratedOutcome {
                region,
                search_box: b,
                point,
                generated,
            }))
        }
        Command::Extend {
            region,
            template,
            dir,
            trim,
            steps,
        } => {
            let t = parse_rect(&region)?;
            let s = parse_rect(&template)?;
            let dir = parse_dir(&dir)?;
            let result = extension::extend_region(&t, &s, dir, trim, steps)?;
            Ok(to_json(&result))
        }
        Command::Dichotomy {
            config,
            n1,
            k1,
            m,
            k,
            box_spec,
        } => {
            let config = catalog::build_config(&config)?;
            let b = resolve_box(&config, box_spec.as_deref())?;
            let report = extension::trapezoid_dichotomy(&config, n1, k1, m, k, &b)?;
            Ok(to_json(&report))
        }
        Command::Expansive {
            config,
            dir,
            radius,
            window,
            box_spec,
        } => {
            let config = catalog::build_config(&config)?;
            let dir = parse_dir(&dir)?;
            let r = parse_rational("radius", &radius)?;
            let window = parse_box(&window)?;
            let b = resolve_box(&config, box_spec.as_deref())?;
            let report = expansivity::probe_expansive(&config, dir, r, &window, &b)?;
            Ok(to_json(&report))
        }
        Command::Catalog => Ok(to_json(&catalog::catalog_list())),
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(n) = flag {
        if n == 0 {
            return Err(LatticeError::SpecParse(
                "--threads must be a positive integer".into(),
            ));
        }
        return Ok(Some(n));
    }
    match std::env::var("LATTICELAB_THREADS") {
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(LatticeError::SpecParse(format!(
                "LATTICELAB_THREADS='{text}' must be a positive integer"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn finish(result: Result<String>, output: Option<&std::path::Path>) -> ExitCode {
    match result {
        Ok(text) => {
            if let Some(path) = output {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write '{}': {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_parse_error() { 1 } else { 2 })
        }
    }
}

/// Full CLI entry point: parses arguments, configures the worker pool,
/// runs the command, and maps outcomes to exit codes (0 success, 1 parse
/// error, 2 domain error).
pub fn try_main<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprintln!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    let threads = match resolve_threads(cli.threads) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(n) = threads {
        // Ignore failure: the global pool can only be set once, which is
        // fine when a host process drives try_main repeatedly.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    finish(run(cli.command), cli.output.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_syntax_accepts_both_forms() {
        assert_eq!(
            parse_box("16x4").unwrap(),
            SearchBox::new(0, 15, 0, 3).unwrap()
        );
        assert_eq!(
            parse_box("-2:5,3:9").unwrap(),
            SearchBox::new(-2, 5, 3, 9).unwrap()
        );
        for bad in ["", "16", "ax4", "1:2", "1:2,3", "1:2,3:b"] {
            assert!(parse_box(bad).is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn rational_syntax_accepts_fractions() {
        assert_eq!(parse_rational("t", "3").unwrap(), Rational::new(3, 1));
        assert_eq!(parse_rational("t", "3/2").unwrap(), Rational::new(3, 2));
        assert!(parse_rational("t", "3/0").is_err());
        assert!(parse_rational("t", "x").is_err());
    }

    #[test]
    fn default_box_is_the_fundamental_domain() {
        let config = catalog::build_config("checkerboard").unwrap();
        let b = resolve_box(&config, None).unwrap();
        assert_eq!(b, SearchBox::new(0, 1, 0, 1).unwrap());
        let sparse = catalog::build_config("section2").unwrap();
        assert!(resolve_box(&sparse, None).is_err());
        assert!(resolve_box(&sparse, Some("4x4")).is_ok());
    }

    #[test]
    fn entropy_default_box_straddles_the_marked_row() {
        let config = catalog::build_config("section5:L=3").unwrap();
        let b = resolve_entropy_box(
            &config,
            None,
            Direction::E2,
            &[Rational::from_integer(1)],
            &[4, 8],
        )
        .unwrap();
        // Word period 8 wide; neighborhood [0,8] tall, so rows -10..=1.
        assert_eq!(b, SearchBox::new(0, 7, -10, 1).unwrap());
    }
}
