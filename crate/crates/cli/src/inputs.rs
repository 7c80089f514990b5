//! Loading graphs, colorings and sequences from flags and files.

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use spinnet::graph::Graph;
use spinnet::{Error, Result};

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::NotFound(format!("{}", path.display())),
        _ => Error::Parse(format!("{}: {e}", path.display())),
    })
}

pub fn load_graph(builtin: &Option<String>, file: &Option<PathBuf>) -> Result<Graph> {
    match (builtin, file) {
        (Some(name), None) => Graph::builtin(name),
        (None, Some(path)) => Graph::parse(&read(path)?),
        _ => Err(Error::Parse(
            "give exactly one of --builtin or --graph".into(),
        )),
    }
}

pub fn load_coloring(
    g: &Graph,
    colors: &Option<Vec<u32>>,
    file: &Option<PathBuf>,
) -> Result<Vec<u32>> {
    match (colors, file) {
        (Some(list), None) => {
            if list.len() != g.ncolors() {
                return Err(Error::Parse(format!(
                    "coloring has {} entries, the graph needs {}",
                    list.len(),
                    g.ncolors()
                )));
            }
            Ok(list.clone())
        }
        (None, Some(path)) => g.parse_coloring(&read(path)?),
        _ => Err(Error::Parse(
            "give exactly one of --colors or --coloring".into(),
        )),
    }
}

pub fn tet_colors(colors: &[u32]) -> Result<[u32; 6]> {
    colors
        .try_into()
        .map_err(|_| Error::Parse(format!("need 6 colors, got {}", colors.len())))
}

/// One rational per line, `num` or `num/den`; blank lines and `#`
/// comments skipped.
pub fn load_sequence(path: &Path) -> Result<Vec<BigRational>> {
    let text = read(path)?;
    let mut seq = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: BigRational = line
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        seq.push(v);
    }
    if seq.is_empty() {
        return Err(Error::Parse(format!(
            "{}: no sequence terms",
            path.display()
        )));
    }
    Ok(seq)
}
