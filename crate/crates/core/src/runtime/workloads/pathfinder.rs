//! Single-source shortest path tree by Bellman-Ford.
//!
//! Input: a header line `V E src`, then `E` lines `u v w` with `w: i64`.
//! Output: `V` lines `node parent dist`. The source and unreachable nodes have
//! parent `-1`; unreachable nodes have dist `inf`.

use super::WorkloadError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub nodes: usize,
    pub source: usize,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestPathTree {
    pub dist: Vec<Option<i64>>,
    pub parent: Vec<Option<usize>>,
}

fn parse_err(msg: impl Into<String>) -> WorkloadError {
    WorkloadError::parse("pathfinder", msg)
}

fn fields<'a>(line: &'a str, n: usize, what: &str) -> Result<Vec<&'a str>, WorkloadError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != n {
        return Err(parse_err(format!(
            "{what}: expected {n} fields, found {}",
            parts.len()
        )));
    }
    Ok(parts)
}

pub fn parse(input: &[u8]) -> Result<Graph, WorkloadError> {
    let text = std::str::from_utf8(input).map_err(|_| parse_err("input is not UTF-8"))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| parse_err("missing header line"))?;
    let h = fields(header, 3, "header")?;
    let num = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|e| parse_err(format!("{what}: {e}")))
    };
    let nodes = num(h[0], "node count")?;
    let edge_count = num(h[1], "edge count")?;
    let source = num(h[2], "source")?;
    if source >= nodes {
        return Err(parse_err(format!(
            "source {source} out of range for {nodes} nodes"
        )));
    }
    let mut edges = Vec::with_capacity(edge_count.min(1 << 20));
    for i in 0..edge_count {
        let line = lines
            .next()
            .ok_or_else(|| parse_err(format!("expected {edge_count} edges, found {i}")))?;
        let f = fields(line, 3, "edge")?;
        let from = num(f[0], "edge source")?;
        let to = num(f[1], "edge target")?;
        let weight = f[2]
            .parse::<i64>()
            .map_err(|e| parse_err(format!("edge weight: {e}")))?;
        if from >= nodes || to >= nodes {
            return Err(parse_err(format!(
                "edge {from}->{to} references a missing node"
            )));
        }
        edges.push(Edge { from, to, weight });
    }
    if lines.next().is_some() {
        return Err(parse_err("trailing data after the declared edges"));
    }
    Ok(Graph {
        nodes,
        source,
        edges,
    })
}

/// V−1 relaxation rounds (stopping early once nothing changes), then one
/// detection round. Parents are chosen after convergence: among the tight
/// predecessors on a minimum-hop shortest path, the lowest node id wins.
pub fn shortest_path_tree(graph: &Graph) -> Result<ShortestPathTree, WorkloadError> {
    let n = graph.nodes;
    let mut dist: Vec<Option<i64>> = vec![None; n];
    dist[graph.source] = Some(0);
    let relax = |du: i64, w: i64| {
        du.checked_add(w)
            .ok_or_else(|| WorkloadError::Execution("pathfinder: distance overflow".into()))
    };

    for _ in 1..n.max(1) {
        let mut changed = false;
        for e in &graph.edges {
            if let Some(du) = dist[e.from] {
                let cand = relax(du, e.weight)?;
                if dist[e.to].is_none_or(|dv| cand < dv) {
                    dist[e.to] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for e in &graph.edges {
        if let (Some(du), Some(dv)) = (dist[e.from], dist[e.to]) {
            if relax(du, e.weight)? < dv {
                return Err(WorkloadError::Execution(
                    "pathfinder: negative cycle reachable from source".into(),
                ));
            }
        }
    }

    // Breadth-first layering over tight edges gives each node its minimum hop
    // count among shortest paths; this keeps the parent graph acyclic even
    // with zero-weight cycles.
    let mut tight_out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &graph.edges {
        if let (Some(du), Some(dv)) = (dist[e.from], dist[e.to]) {
            if du.checked_add(e.weight) == Some(dv) {
                tight_out[e.from].push(e.to);
            }
        }
    }
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut hops = vec![usize::MAX; n];
    hops[graph.source] = 0;
    let mut frontier = vec![graph.source];
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in &tight_out[u] {
                if hops[v] == usize::MAX {
                    hops[v] = depth + 1;
                    parent[v] = Some(u);
                    next.push(v);
                } else if hops[v] == depth + 1 && parent[v].is_some_and(|p| u < p) {
                    parent[v] = Some(u);
                }
            }
        }
        frontier = next;
        depth += 1;
    }
    Ok(ShortestPathTree { dist, parent })
}

pub fn format(tree: &ShortestPathTree) -> Vec<u8> {
    let mut out = String::with_capacity(tree.dist.len() * 16);
    for (node, (d, p)) in tree.dist.iter().zip(&tree.parent).enumerate() {
        let parent = p.map_or_else(|| "-1".to_string(), |p| p.to_string());
        let dist = d.map_or_else(|| "inf".to_string(), |d| d.to_string());
        out.push_str(&format!("{node} {parent} {dist}\n"));
    }
    out.into_bytes()
}

pub fn run(input: &[u8]) -> Result<Vec<u8>, WorkloadError> {
    let graph = parse(input)?;
    Ok(format(&shortest_path_tree(&graph)?))
}

/// Node count from the header, when it parses.
pub fn declared_nodes(input: &[u8]) -> Option<u64> {
    let text = std::str::from_utf8(input.get(..input.len().min(256))?).ok()?;
    text.lines()
        .find(|l| !l.trim().is_empty())?
        .split_whitespace()
        .next()?
        .parse()
        .ok()
}
