//! File formats.
//!
//! Configurations: a JSON array of coordinate arrays (`[[0,0],[1,0]]`), or
//! plain text with one site per line as space-separated integers. Functions:
//! one line per site, the coordinates followed by the value. In both text
//! formats blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::function::LatticeFunction;
use crate::lattice::{Config, Site};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfigFormat {
    Json,
    Text,
}

impl ConfigFormat {
    /// `.json` selects JSON, anything else plain text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ConfigFormat::Json,
            _ => ConfigFormat::Text,
        }
    }
}

pub fn parse_config(input: &str, format: ConfigFormat) -> Result<Config> {
    match format {
        ConfigFormat::Json => parse_config_json(input),
        ConfigFormat::Text => parse_config_text(input),
    }
}

pub fn parse_config_json(input: &str) -> Result<Config> {
    if input.trim().is_empty() {
        return Err(Error::EmptyConfig);
    }
    let raw: Vec<Vec<i32>> = serde_json::from_str(input).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Config::new(raw.into_iter().map(Site::from).collect())
}

/// Meaningful lines as `(line number, text)`, 1-based.
fn content_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let base = line.as_ptr() as usize;
    line.split_whitespace().map(move |t| (t.as_ptr() as usize - base + 1, t))
}

pub fn parse_config_text(input: &str) -> Result<Config> {
    let mut sites = Vec::new();
    let mut dim = None;
    for (line, text) in content_lines(input) {
        let mut coords = Vec::new();
        for (column, tok) in tokens(text) {
            let c: i32 = tok.parse().map_err(|_| Error::Parse {
                line,
                column,
                message: format!("expected an integer coordinate, found `{tok}`"),
            })?;
            coords.push(c);
        }
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(Error::Parse {
                    line,
                    column: 1,
                    message: format!("expected {d} coordinates, found {}", coords.len()),
                })
            }
            _ => {}
        }
        sites.push(Site::from(coords));
    }
    Config::new(sites)
}

pub fn read_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path)?;
    parse_config(&text, ConfigFormat::from_path(path))
}

pub fn config_to_json(x: &Config) -> String {
    serde_json::to_string(x).expect("integer arrays serialize")
}

pub fn config_to_text(x: &Config) -> String {
    let mut out = String::new();
    for s in x.iter() {
        let line: Vec<String> = s.coords().iter().map(i32::to_string).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn format_config(x: &Config, format: ConfigFormat) -> String {
    match format {
        ConfigFormat::Json => config_to_json(x),
        ConfigFormat::Text => config_to_text(x),
    }
}

/// Writes a function with 17 significant digits per value.
pub fn function_to_text(u: &LatticeFunction) -> String {
    let mut out = String::new();
    for (s, v) in u.iter() {
        for c in s.coords() {
            let _ = write!(out, "{c} ");
        }
        let _ = writeln!(out, "{v:.16e}");
    }
    out
}

pub fn parse_function_text(input: &str, dim: Option<usize>) -> Result<LatticeFunction> {
    let mut pairs = Vec::new();
    let mut dim = dim;
    for (line, text) in content_lines(input) {
        let toks: Vec<(usize, &str)> = tokens(text).collect();
        let d = *dim.get_or_insert(toks.len().saturating_sub(1));
        if d == 0 || toks.len() != d + 1 {
            return Err(Error::Parse {
                line,
                column: 1,
                message: format!("expected {} coordinates and a value", d.max(1)),
            });
        }
        let mut coords = Vec::with_capacity(d);
        for &(column, tok) in &toks[..d] {
            coords.push(tok.parse::<i32>().map_err(|_| Error::Parse {
                line,
                column,
                message: format!("expected an integer coordinate, found `{tok}`"),
            })?);
        }
        let (column, tok) = toks[d];
        let v: f64 = tok.parse().map_err(|_| Error::Parse {
            line,
            column,
            message: format!("expected a real value, found `{tok}`"),
        })?;
        pairs.push((Site::from(coords), v));
    }
    let d = dim.ok_or(Error::EmptyConfig)?;
    LatticeFunction::from_pairs(d, pairs)
}

/// Writes `contents` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn json_round_trip() {
        let x = parse_config_json("[[0,0],[1,0]]").unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(config_to_json(&x), "[[0,0],[1,0]]");
    }

    #[test]
    fn text_parse_errors_have_positions() {
        match parse_config_text("0 0\n1 x\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_config_text("0 0\n1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_config_text(""), Err(Error::EmptyConfig)));
        assert!(matches!(parse_config_json("  "), Err(Error::EmptyConfig)));
        assert!(matches!(parse_config_json("[[0,0],"), Err(Error::Parse { .. })));
    }

    #[test]
    fn comments_and_blank_lines() {
        let x = parse_config_text("# domino\n\n0 0\n  1 0\n").unwrap();
        assert_eq!(x, Config::from_coords([[0, 0], [1, 0]]).unwrap());
    }

    #[test]
    fn function_round_trip_is_exact() {
        let u = LatticeFunction::from_pairs(
            2,
            [(Site::new(&[0, 1]), 0.1 + 0.2), (Site::new(&[-3, 2]), 1.0 / 3.0)],
        )
        .unwrap();
        let back = parse_function_text(&function_to_text(&u), None).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    proptest! {
        #[test]
        fn config_round_trips(pts in prop::collection::btree_set((-50i32..50, -50i32..50, -5i32..5), 1..40)) {
            let x = Config::from_coords(pts.iter().map(|&(a, b, c)| [a, b, c])).unwrap();
            prop_assert_eq!(parse_config_json(&config_to_json(&x)).unwrap(), x.clone());
            prop_assert_eq!(parse_config_text(&config_to_text(&x)).unwrap(), x);
        }
    }
}
