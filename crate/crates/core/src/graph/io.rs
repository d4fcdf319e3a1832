//! SNAP-style edge-list loading and the binary graph cache.
//!
//! Cache layout (all integers little-endian):
//!
//! ```text
//! b"RSTG1" | n: u64 | m: u64 | offsets: (n + 1) x u64 | targets: 2m x u32 | original ids: n x u64
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{Graph, GraphError};

pub const CACHE_MAGIC: &[u8; 5] = b"RSTG1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// Keep only the largest connected component (ties go to the component
    /// holding the smallest raw id).
    pub largest_component: bool,
    /// Keep repeated undirected edges as parallel edges instead of collapsing them.
    pub keep_multi: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            largest_component: true,
            keep_multi: false,
        }
    }
}

/// Parses a whitespace-separated edge list. Lines starting with `#` are
/// comments; blank lines are skipped. Vertex ids are remapped to `0..n` in
/// increasing raw-id order.
pub fn load_edge_list<R: BufRead>(reader: R, options: &LoadOptions) -> Result<Graph, GraphError> {
    let mut raw = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(GraphError::Parse {
                line: index + 1,
                message: format!("expected two vertex ids, got {trimmed:?}"),
            });
        };
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|e| GraphError::Parse {
                line: index + 1,
                message: format!("bad vertex id {tok:?}: {e}"),
            })
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u != v {
            raw.push((u.min(v), u.max(v)));
        }
    }
    if !options.keep_multi {
        raw.sort_unstable();
        raw.dedup();
    }
    if raw.is_empty() {
        return Err(GraphError::Empty);
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index_of = |id: u64| ids.binary_search(&id).expect("id collected above");
    let edges: Vec<(usize, usize)> = raw.iter().map(|&(u, v)| (index_of(u), index_of(v))).collect();
    let graph = Graph::from_parts(ids.len(), &edges, ids.clone())?;
    if !options.largest_component || graph.is_connected() {
        return Ok(graph);
    }

    let (labels, count) = graph.component_labels();
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    // Labels are assigned in order of each component's lowest vertex, which is
    // also its lowest raw id, so the first maximum wins ties.
    let best = (0..count).fold(0, |best, l| if sizes[l] > sizes[best] { l } else { best });
    let mut new_index = vec![usize::MAX; ids.len()];
    let mut kept_ids = Vec::with_capacity(sizes[best]);
    for (v, &l) in labels.iter().enumerate() {
        if l == best {
            new_index[v] = kept_ids.len();
            kept_ids.push(ids[v]);
        }
    }
    let kept_edges: Vec<(usize, usize)> = edges
        .iter()
        .filter(|&&(u, _)| labels[u] == best)
        .map(|&(u, v)| (new_index[u], new_index[v]))
        .collect();
    Graph::from_parts(kept_ids.len(), &kept_edges, kept_ids)
}

/// Loads either a binary cache (detected by its magic bytes) or a text edge list.
pub fn load_path(path: &Path, options: &LoadOptions) -> Result<Graph, GraphError> {
    let mut reader = BufReader::new(File::open(path)?);
    let head = reader.fill_buf()?;
    if head.starts_with(CACHE_MAGIC) {
        read_binary(reader)
    } else {
        load_edge_list(reader, options)
    }
}

pub fn write_binary<W: Write>(graph: &Graph, mut out: W) -> Result<(), GraphError> {
    out.write_all(CACHE_MAGIC)?;
    out.write_all(&(graph.vertex_count() as u64).to_le_bytes())?;
    out.write_all(&(graph.edge_count() as u64).to_le_bytes())?;
    for &o in graph.offsets() {
        out.write_all(&(o as u64).to_le_bytes())?;
    }
    for &t in graph.targets() {
        out.write_all(&t.to_le_bytes())?;
    }
    for &id in graph.original_ids() {
        out.write_all(&id.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<Graph, GraphError> {
    let mut magic = [0u8; 5];
    input.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(GraphError::Cache("bad magic".into()));
    }
    let mut word = [0u8; 8];
    let mut read_u64 = |input: &mut R| -> Result<u64, GraphError> {
        input.read_exact(&mut word)?;
        Ok(u64::from_le_bytes(word))
    };
    let n = read_u64(&mut input)? as usize;
    let m = read_u64(&mut input)? as usize;
    let mut offsets = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        offsets.push(read_u64(&mut input)? as usize);
    }
    if offsets.first() != Some(&0) || offsets.last() != Some(&(2 * m)) || offsets.windows(2).any(|w| w[0] > w[1]) {
        return Err(GraphError::Cache("inconsistent offsets".into()));
    }
    let mut targets = vec![0u8; 8 * m];
    input.read_exact(&mut targets)?;
    let targets: Vec<u32> = targets
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let mut ids = Vec::with_capacity(n);
    for _ in 0..n {
        ids.push(read_u64(&mut input)?);
    }
    let mut edges = Vec::with_capacity(m);
    for u in 0..n {
        for &v in &targets[offsets[u]..offsets[u + 1]] {
            let v = v as usize;
            if v >= n {
                return Err(GraphError::Cache(format!("target {v} out of range")));
            }
            if u < v {
                edges.push((u, v));
            }
        }
    }
    let graph = Graph::from_parts(n, &edges, ids)?;
    if graph.targets() != targets.as_slice() {
        return Err(GraphError::Cache("adjacency is not symmetric".into()));
    }
    Ok(graph)
}
