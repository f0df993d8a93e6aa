//! Rooted trees, caterpillars and starlike trees.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A rooted tree on vertices `0..n` with a bottom-up processing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    degree: Vec<usize>,
    order: Vec<usize>,
    root: usize,
}

impl Tree {
    /// The single-vertex tree.
    pub fn single_vertex() -> Tree {
        Tree {
            parent: vec![None],
            children: vec![Vec::new()],
            degree: vec![0],
            order: vec![0],
            root: 0,
        }
    }

    /// Builds a tree from an undirected edge list. The order is reverse
    /// breadth-first from `root`, so every vertex follows its children.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Tree> {
        if n == 0 {
            return Err(Error::Domain("a tree needs at least one vertex".into()));
        }
        if root >= n {
            return Err(Error::Domain(format!("root {root} out of range for {n} vertices")));
        }
        if edges.len() != n - 1 {
            return Err(Error::Domain(format!(
                "a tree on {n} vertices has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Domain(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::Domain(format!("self-loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        let mut bfs = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            bfs.push(u);
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    children[u].push(v);
                    queue.push_back(v);
                }
            }
        }
        if bfs.len() != n {
            return Err(Error::Domain("edge list is not connected".into()));
        }
        let degree = adj.iter().map(Vec::len).collect();
        bfs.reverse();
        Ok(Tree {
            parent,
            children,
            degree,
            order: bfs,
            root,
        })
    }

    /// Builds a tree from a parent array; exactly one entry is `None`.
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Tree> {
        let roots: Vec<usize> = (0..parents.len()).filter(|&v| parents[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::Domain(format!("expected one root, found {}", roots.len())));
        }
        let edges: Vec<(usize, usize)> = parents
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p)))
            .collect();
        Tree::from_edges(parents.len(), &edges, roots[0])
    }

    /// Replaces the processing order. Every vertex must appear once, after
    /// all of its children.
    pub fn with_order(mut self, order: Vec<usize>) -> Result<Tree> {
        let n = self.vertex_count();
        if order.len() != n {
            return Err(Error::Domain(format!("order has {} entries for {n} vertices", order.len())));
        }
        let mut position = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(Error::Domain(format!("vertex {v} repeated or out of range in order")));
            }
            position[v] = i;
        }
        for v in 0..n {
            if let Some(p) = self.parent[v] {
                if position[v] > position[p] {
                    return Err(Error::Domain(format!(
                        "vertex {v} appears after its parent {p}"
                    )));
                }
            }
        }
        self.order = order;
        Ok(self)
    }

    pub fn path(n: usize) -> Result<Tree> {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Tree::from_edges(n, &edges, n.saturating_sub(1))
    }

    /// The star `K_{1,m}` rooted at its center, vertex 0.
    pub fn star(leaves: usize) -> Tree {
        let edges: Vec<(usize, usize)> = (1..=leaves).map(|i| (0, i)).collect();
        Tree::from_edges(leaves + 1, &edges, 0).expect("star edges are valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    /// Edges as `(child, parent)` pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.vertex_count())
            .filter_map(|v| self.parent[v].map(|p| (v, p)))
            .collect()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.parent[v].into_iter().chain(self.children[v].iter().copied())
    }

    /// Vertices of degree one.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.degree[v] == 1).collect()
    }

    pub fn is_star(&self) -> bool {
        let n = self.vertex_count();
        n >= 2 && self.max_degree() == n - 1
    }

    pub fn is_path(&self) -> bool {
        self.max_degree() <= 2
    }

    /// A leaf attached to a vertex of degree two, i.e. a pendant path on two
    /// vertices.
    pub fn has_pendant_p2(&self) -> bool {
        self.leaves()
            .into_iter()
            .any(|v| self.neighbors(v).any(|u| self.degree[u] == 2))
    }

    /// The tree with leaf `v` removed, vertices relabelled to stay contiguous.
    pub fn remove_leaf(&self, v: usize) -> Result<Tree> {
        let n = self.vertex_count();
        if n < 2 || self.degree[v] != 1 {
            return Err(Error::Domain(format!("vertex {v} is not a removable leaf")));
        }
        let relabel = |u: usize| if u > v { u - 1 } else { u };
        let edges: Vec<(usize, usize)> = self
            .edges()
            .into_iter()
            .filter(|&(a, b)| a != v && b != v)
            .map(|(a, b)| (relabel(a), relabel(b)))
            .collect();
        let root = if self.root == v {
            self.neighbors(v).next().map(relabel).unwrap_or(0)
        } else {
            relabel(self.root)
        };
        Tree::from_edges(n - 1, &edges, root)
    }

    /// Length, in vertices, of the longest downward path from `start` when
    /// the edge to `from` is ignored.
    pub fn branch_depth(&self, from: usize, start: usize) -> usize {
        let mut best = 0;
        let mut stack = vec![(start, from, 1usize)];
        while let Some((u, prev, depth)) = stack.pop() {
            best = best.max(depth);
            for w in self.neighbors(u) {
                if w != prev {
                    stack.push((w, u, depth + 1));
                }
            }
        }
        best
    }

    /// Whether the tree contains `T_{1,n,n}` (a vertex with three arms of
    /// lengths 1, n, n) as a subgraph.
    pub fn contains_t1nn(&self, n: usize) -> bool {
        (0..self.vertex_count()).any(|v| {
            if self.degree[v] < 3 {
                return false;
            }
            let depths: Vec<usize> = self.neighbors(v).map(|u| self.branch_depth(v, u)).collect();
            depths.iter().filter(|&&d| d >= n).count() >= 2
        })
    }

    /// Number of arms when the tree is starlike (exactly one vertex of degree
    /// at least three).
    pub fn starlike_arms(&self) -> Option<usize> {
        let hubs: Vec<usize> = (0..self.vertex_count()).filter(|&v| self.degree[v] >= 3).collect();
        match hubs.as_slice() {
            [hub] => Some(self.degree[*hub]),
            _ => None,
        }
    }

    /// Parses the `edge u v` text format. Labels are positive integers; the
    /// root is the highest label unless a `root=<label>` line is present.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Tree> {
        let mut root_label = None;
        let mut raw_edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("root=") {
                root_label = Some(parse_label(rest, lineno)?);
                continue;
            }
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some("edge"), Some(u), Some(v), None) => {
                    raw_edges.push((parse_label(u, lineno)?, parse_label(v, lineno)?));
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected `edge u v` or `root=r`, got {line:?}",
                        lineno + 1
                    )))
                }
            }
        }
        let mut index = BTreeMap::new();
        for &(u, v) in &raw_edges {
            index.insert(u, 0);
            index.insert(v, 0);
        }
        if let Some(r) = root_label {
            index.insert(r, 0);
        }
        if index.is_empty() {
            return Err(Error::Parse("tree file has no vertices".into()));
        }
        for (i, slot) in index.values_mut().enumerate() {
            *slot = i;
        }
        let root = match root_label {
            Some(r) => index[&r],
            None => index.len() - 1,
        };
        let edges: Vec<(usize, usize)> = raw_edges.iter().map(|(u, v)| (index[u], index[v])).collect();
        Tree::from_edges(index.len(), &edges, root)
    }

    /// Writes the tree in the format read by [`Tree::parse`], labels `i + 1`.
    pub fn to_text(&self) -> String {
        let mut out = format!("root={}\n", self.root + 1);
        for (u, v) in self.edges() {
            out.push_str(&format!("edge {} {}\n", v + 1, u + 1));
        }
        out
    }
}

fn parse_label(text: &str, lineno: usize) -> Result<u64> {
    match text.trim().parse::<u64>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::Parse(format!(
            "line {}: vertex label {text:?} is not a positive integer",
            lineno + 1
        ))),
    }
}

/// Compact caterpillar `[r1, ..., rk]`: back node `v_j` carries `r_j` leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caterpillar {
    counts: Vec<u64>,
}

impl Caterpillar {
    pub fn new(counts: Vec<u64>) -> Result<Caterpillar> {
        if counts.len() < 2 {
            return Err(Error::Domain(format!(
                "a caterpillar needs at least two back nodes, got {}",
                counts.len()
            )));
        }
        Ok(Caterpillar { counts })
    }

    /// Parses `[r1,r2,...]`; brackets are optional and entries may be
    /// separated by commas or whitespace.
    pub fn parse(text: &str) -> Result<Caterpillar> {
        let body = text.trim();
        let body = body.strip_prefix('[').unwrap_or(body);
        let body = body.strip_suffix(']').unwrap_or(body);
        let mut counts = Vec::new();
        for token in body.split(|c: char| c == ',' || c.is_whitespace()) {
            if token.is_empty() {
                continue;
            }
            let value: i64 = token
                .parse()
                .map_err(|_| Error::Parse(format!("caterpillar entry {token:?} is not an integer")))?;
            if value < 0 {
                return Err(Error::Domain(format!("caterpillar entry {value} is negative")));
            }
            counts.push(value as u64);
        }
        Caterpillar::new(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of back nodes.
    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn vertex_count(&self) -> u64 {
        self.counts.len() as u64 + self.counts.iter().sum::<u64>()
    }

    /// Degree of back node `j` (0-based).
    pub fn back_degree(&self, j: usize) -> u64 {
        let k = self.k();
        let backbone = u64::from(j > 0) + u64::from(j + 1 < k);
        self.counts[j] + backbone
    }

    pub fn max_degree(&self) -> u64 {
        (0..self.k()).map(|j| self.back_degree(j)).max().unwrap_or(0)
    }
}

impl fmt::Display for Caterpillar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, r) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

/// Materializes a caterpillar. Back nodes are vertices `0..k` with `v_k`
/// as root; leaves follow in back-node order. The processing order lists all
/// leaves, then the backbone from `v_1` to `v_k`.
pub fn caterpillar_to_tree(c: &Caterpillar) -> Result<Tree> {
    let k = c.k();
    let n = usize::try_from(c.vertex_count())
        .map_err(|_| Error::Domain("caterpillar too large to materialize".into()))?;
    let mut edges = Vec::with_capacity(n - 1);
    for j in 1..k {
        edges.push((j - 1, j));
    }
    let mut next = k;
    for (j, &r) in c.counts().iter().enumerate() {
        for _ in 0..r {
            edges.push((j, next));
            next += 1;
        }
    }
    let tree = Tree::from_edges(n, &edges, k - 1)?;
    let order: Vec<usize> = (k..n).chain(0..k).collect();
    tree.with_order(order)
}

/// Starlike tree with the given arm lengths, rooted at the center, vertex 0.
pub fn starlike(arms: &[usize]) -> Result<Tree> {
    if arms.is_empty() || arms.contains(&0) {
        return Err(Error::Domain("starlike arms must be nonempty with positive lengths".into()));
    }
    let n = 1 + arms.iter().sum::<usize>();
    let mut edges = Vec::with_capacity(n - 1);
    let mut next = 1;
    for &len in arms {
        let mut prev = 0;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    Tree::from_edges(n, &edges, 0)
}

/// `T_{1,n,n}`: a vertex `u` carrying one pendant vertex and two paths of
/// length `n`, rooted at `u`.
pub fn starlike_t1nn(n: usize) -> Result<Tree> {
    if n < 1 {
        return Err(Error::Domain("T_{1,n,n} needs n >= 1".into()));
    }
    starlike(&[1, n, n])
}
