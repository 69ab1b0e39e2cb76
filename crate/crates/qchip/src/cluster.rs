//! Cluster decomposition: an edge's wire blocks grouped into 4-connected
//! components. An edge with a single cluster is "unified".

use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::netlist::{BlockId, CompId, EdgeId};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    pub edge: EdgeId,
    /// Each cluster sorted by block id; clusters ordered by smallest member.
    pub clusters: Vec<Vec<BlockId>>,
}

impl ClusterPartition {
    pub fn count(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_unified(&self) -> bool {
        self.clusters.len() == 1
    }
}

/// Connected components of the edge's blocks under 4-adjacency of their
/// occupied cells.
pub fn compute_clusters(layout: &Layout, edge: EdgeId) -> Result<ClusterPartition> {
    let blocks = &layout.net.edge(edge).blocks;
    let mut cell_of = HashMap::with_capacity(blocks.len());
    for &b in blocks {
        let Some(p) = layout.pos(CompId::Block(b)) else {
            return Err(Error::InvalidInput(format!(
                "block b{} of edge {} is not placed",
                b.0, edge.0
            )));
        };
        cell_of.insert(p, b);
    }
    let mut visited = vec![false; blocks.len()];
    let index_of: HashMap<BlockId, usize> =
        blocks.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut clusters = Vec::new();
    for (start_idx, &start) in blocks.iter().enumerate() {
        if visited[start_idx] {
            continue;
        }
        visited[start_idx] = true;
        let mut stack = vec![start];
        let mut members = vec![start];
        while let Some(b) = stack.pop() {
            let p = layout.pos(CompId::Block(b)).unwrap();
            for nb in p.neighbors4() {
                if let Some(&other) = cell_of.get(&nb) {
                    let oi = index_of[&other];
                    if !visited[oi] {
                        visited[oi] = true;
                        stack.push(other);
                        members.push(other);
                    }
                }
            }
        }
        members.sort();
        clusters.push(members);
    }
    clusters.sort_by_key(|c| c[0]);
    Ok(ClusterPartition { edge, clusters })
}

/// Sum of cluster counts over all edges (the integration objective).
pub fn total_clusters(layout: &Layout) -> Result<usize> {
    let mut sum = 0;
    for e in &layout.net.edges {
        sum += compute_clusters(layout, e.id)?.count();
    }
    Ok(sum)
}

/// (unified edges, total edges).
pub fn unified_fraction(layout: &Layout) -> Result<(usize, usize)> {
    let mut unified = 0;
    for e in &layout.net.edges {
        if compute_clusters(layout, e.id)?.is_unified() {
            unified += 1;
        }
    }
    Ok((unified, layout.net.edges.len()))
}
