use std::fs;
use std::io::Write;
use std::path::Path;

use crate::diffusion::SeedMask;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// One original node ID per line, ascending by dense index.
pub fn write_seed_file(path: impl AsRef<Path>, g: &Graph, mask: &SeedMask) -> Result<()> {
    let mut out = Vec::new();
    for i in mask.nodes() {
        writeln!(out, "{}", g.original_id(i))?;
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_seed_file(path: impl AsRef<Path>, g: &Graph) -> Result<SeedMask> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut mask = SeedMask::empty(g.node_count());
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let id: u64 = line.parse().map_err(|e| parse_err(format!("bad node id `{line}`: {e}")))?;
        let idx = g.index_of(id).ok_or_else(|| parse_err(format!("node {id} is not in the graph")))?;
        mask.insert(idx);
    }
    Ok(mask)
}
