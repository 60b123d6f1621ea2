//! Cayley graphs, exact chromatic numbers of graphs and hypergraphs,
//! component classification, and the two constructions linking proper
//! partitions of `[1, N]` with subgroups avoiding `{e_F : F in family}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpgroup::{check_prime, DualVec, FpMatrix, FpVec, Subgroup};
use crate::setops::VecSet;

/// A simple undirected graph on `0..n` with sorted neighbor lists. A set
/// self-loop flag marks every vertex as adjacent to itself, which is how a
/// connection set containing zero shows up.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    self_loop: bool,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            self_loop: false,
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::input(format!("edge ({u},{v}) outside 0..{n}")));
            }
            if u == v {
                g.self_loop = true;
                continue;
            }
            g.adj[u].push(v);
            g.adj[v].push(u);
        }
        g.normalize();
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        Graph {
            adj: (0..n).map(|v| (0..n).filter(|&u| u != v).collect()).collect(),
            self_loop: false,
        }
    }

    fn normalize(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
            list.dedup();
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn has_self_loop(&self) -> bool {
        self.self_loop
    }

    pub fn set_self_loop(&mut self, on: bool) {
        self.self_loop = on;
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v {
            return self.self_loop;
        }
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                for &u in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced on `verts` (relabelled to `0..verts.len()`).
    pub fn induced(&self, verts: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in verts.iter().enumerate() {
            local[v] = i;
        }
        Graph {
            adj: verts
                .iter()
                .map(|&v| {
                    let mut l: Vec<usize> = self.adj[v]
                        .iter()
                        .filter(|&&u| local[u] != usize::MAX)
                        .map(|&u| local[u])
                        .collect();
                    l.sort_unstable();
                    l
                })
                .collect(),
            self_loop: self.self_loop,
        }
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut adj = vec![Vec::new(); self.n()];
        for (v, list) in self.adj.iter().enumerate() {
            adj[perm[v]] = list.iter().map(|&u| perm[u]).collect();
        }
        let mut g = Graph {
            adj,
            self_loop: self.self_loop,
        };
        g.normalize();
        g
    }
}

/// `Cay(V, S)`: vertices `V`, with `g ~ g'` iff `g - g'` or `g' - g` lies in `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyGraph {
    pub vertices: VecSet,
    pub connection: VecSet,
    pub graph: Graph,
}

impl CayleyGraph {
    pub fn has_self_loop(&self) -> bool {
        self.graph.has_self_loop()
    }
}

pub fn build_cayley(v: &VecSet, s: &VecSet) -> Result<CayleyGraph> {
    v.ensure_same_group(s)?;
    let verts = v.elements();
    let mut g = Graph::empty(verts.len());
    for (i, x) in verts.iter().enumerate() {
        for t in s {
            if t.is_zero() {
                continue;
            }
            // g' = g + t gives g' - g = t; the reverse direction is found from g'
            if let Ok(j) = verts.binary_search(&(x + t)) {
                g.adj[i].push(j);
                g.adj[j].push(i);
            }
        }
    }
    g.normalize();
    g.self_loop = s.contains_zero();
    Ok(CayleyGraph {
        vertices: v.clone(),
        connection: s.clone(),
        graph: g,
    })
}

/// A proper coloring with colors `1..=r`, indexed by vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
}

impl Coloring {
    pub fn num_colors(&self) -> usize {
        self.colors.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Chromatic {
    /// The graph has a self-loop, so no proper coloring exists.
    Infinite,
    Finite { chi: usize, coloring: Coloring },
}

impl Chromatic {
    pub fn value(&self) -> Option<usize> {
        match self {
            Chromatic::Infinite => None,
            Chromatic::Finite { chi, .. } => Some(*chi),
        }
    }
}

impl fmt::Display for Chromatic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chromatic::Infinite => write!(f, "infinite"),
            Chromatic::Finite { chi, .. } => write!(f, "{chi}"),
        }
    }
}

/// Outcome of a search capped at `r_max` colors and a node budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundedChromatic {
    Infinite,
    Exact { chi: usize, coloring: Coloring },
    /// No proper coloring with at most `r_max` colors exists.
    Exceeds { r_max: usize },
    /// The budget ran out with `lower <= chi <= upper` (`upper` may be `None` when above `r_max`).
    Unresolved { lower: usize, upper: Option<usize> },
}

/// Exact chromatic number by DSATUR branch and bound.
pub fn chromatic_number_exact(g: &Graph) -> Chromatic {
    match chromatic_number_bounded(g, usize::MAX, u64::MAX) {
        BoundedChromatic::Infinite => Chromatic::Infinite,
        BoundedChromatic::Exact { chi, coloring } => Chromatic::Finite { chi, coloring },
        other => unreachable!("unbounded search ended with {other:?}"),
    }
}

/// Exact chromatic number when it is at most `r_max` and the search fits in
/// `node_budget` branch nodes (shared across components).
pub fn chromatic_number_bounded(g: &Graph, r_max: usize, node_budget: u64) -> BoundedChromatic {
    if g.has_self_loop() && g.n() > 0 {
        return BoundedChromatic::Infinite;
    }
    let mut colors = vec![0usize; g.n()];
    let mut chi = 0;
    let mut lower = 0;
    let mut unresolved = false;
    let mut budget = node_budget;
    for comp in g.components() {
        let local = g.induced(&comp);
        let mut solver = Solver::new(&local, r_max, budget);
        let res = solver.run();
        budget = solver.budget;
        lower = lower.max(res.lower);
        match res.best {
            Some((k, col)) if res.complete => {
                chi = chi.max(k);
                for (i, &v) in comp.iter().enumerate() {
                    colors[v] = col[i] + 1;
                }
            }
            None if res.complete => return BoundedChromatic::Exceeds { r_max },
            Some((k, col)) => {
                unresolved = true;
                chi = chi.max(k);
                for (i, &v) in comp.iter().enumerate() {
                    colors[v] = col[i] + 1;
                }
            }
            None => {
                return BoundedChromatic::Unresolved {
                    lower,
                    upper: None,
                };
            }
        }
    }
    if unresolved {
        BoundedChromatic::Unresolved {
            lower,
            upper: Some(chi),
        }
    } else {
        BoundedChromatic::Exact {
            chi,
            coloring: Coloring { colors },
        }
    }
}

struct SolveResult {
    lower: usize,
    /// Best coloring found (color count, zero-based colors).
    best: Option<(usize, Vec<usize>)>,
    complete: bool,
}

const UNCOLORED: usize = usize::MAX;

struct Solver<'g> {
    g: &'g Graph,
    n: usize,
    width: usize,
    color: Vec<usize>,
    // neighbor color counts, row-major n x width
    nb: Vec<u32>,
    sat: Vec<usize>,
    best: usize,
    best_coloring: Option<Vec<usize>>,
    lower: usize,
    budget: u64,
    exhausted: bool,
}

impl<'g> Solver<'g> {
    fn new(g: &'g Graph, r_max: usize, budget: u64) -> Self {
        let n = g.n();
        Solver {
            g,
            n,
            width: 0,
            color: vec![UNCOLORED; n],
            nb: Vec::new(),
            sat: vec![0; n],
            best: r_max.saturating_add(1),
            best_coloring: None,
            lower: 0,
            budget,
            exhausted: false,
        }
    }

    fn run(&mut self) -> SolveResult {
        if self.n == 0 {
            return SolveResult {
                lower: 0,
                best: Some((0, Vec::new())),
                complete: true,
            };
        }
        let clique = greedy_clique(self.g);
        self.lower = clique.len();
        let greedy = dsatur_greedy(self.g);
        let ub = greedy.iter().max().map_or(0, |&c| c + 1);
        if ub < self.best {
            self.best = ub;
            self.best_coloring = Some(greedy);
        }
        if self.best > self.lower {
            self.width = self.best.min(self.n);
            self.nb = vec![0; self.n * self.width];
            // clique members get distinct colors up front
            let mut used = 0;
            let mut ok = true;
            for &v in &clique {
                if used >= self.width {
                    ok = false;
                    break;
                }
                self.assign(v, used);
                used += 1;
            }
            if ok && used < self.best {
                self.search(clique.len(), used);
            }
        }
        let complete = !self.exhausted;
        SolveResult {
            lower: if complete { self.best } else { self.lower },
            best: self.best_coloring.take().map(|c| (self.best, c)),
            complete,
        }
    }

    fn assign(&mut self, v: usize, c: usize) {
        self.color[v] = c;
        for &u in self.g.neighbors(v) {
            let slot = &mut self.nb[u * self.width + c];
            if *slot == 0 {
                self.sat[u] += 1;
            }
            *slot += 1;
        }
    }

    fn unassign(&mut self, v: usize) {
        let c = self.color[v];
        self.color[v] = UNCOLORED;
        for &u in self.g.neighbors(v) {
            let slot = &mut self.nb[u * self.width + c];
            *slot -= 1;
            if *slot == 0 {
                self.sat[u] -= 1;
            }
        }
    }

    fn search(&mut self, colored: usize, used: usize) {
        if self.exhausted || self.best <= self.lower || used >= self.best {
            return;
        }
        if self.budget == 0 {
            self.exhausted = true;
            return;
        }
        self.budget -= 1;
        if colored == self.n {
            self.best = used;
            self.best_coloring = Some(self.color.clone());
            return;
        }
        // most saturated uncolored vertex, lowest index on ties
        let mut v = UNCOLORED;
        for u in 0..self.n {
            if self.color[u] == UNCOLORED && (v == UNCOLORED || self.sat[u] > self.sat[v]) {
                v = u;
            }
        }
        let mut c = 0;
        while c <= used && c + 1 < self.best {
            if self.nb[v * self.width + c] == 0 {
                self.assign(v, c);
                self.search(colored + 1, used.max(c + 1));
                self.unassign(v);
                if self.exhausted || self.best <= self.lower {
                    return;
                }
            }
            c += 1;
        }
    }
}

/// Greedy clique: for each start vertex (by descending degree), extend with
/// neighbors in descending degree order. Returns the largest found.
fn greedy_clique(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut best: Vec<usize> = Vec::new();
    for &start in &order {
        if g.degree(start) < best.len() {
            continue;
        }
        let mut clique = vec![start];
        for &u in &order {
            if u != start && clique.iter().all(|&w| g.has_edge(u, w)) {
                clique.push(u);
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

/// DSATUR greedy coloring with zero-based colors; ties go to the lowest index.
pub fn dsatur_greedy(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut color = vec![UNCOLORED; n];
    let mut seen: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut sat = vec![0usize; n];
    for _ in 0..n {
        let mut v = UNCOLORED;
        for u in 0..n {
            if color[u] != UNCOLORED {
                continue;
            }
            if v == UNCOLORED
                || sat[u] > sat[v]
                || (sat[u] == sat[v] && g.degree(u) > g.degree(v))
            {
                v = u;
            }
        }
        let c = (0..).find(|&c| !seen[v].get(c).copied().unwrap_or(false)).unwrap();
        color[v] = c;
        for &u in g.neighbors(v) {
            if seen[u].len() <= c {
                seen[u].resize(c + 1, false);
            }
            if !seen[u][c] {
                seen[u][c] = true;
                sat[u] += 1;
            }
        }
    }
    color
}

/// Shape of one connected component.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Singleton,
    SingleEdge,
    Path,
    Other(String),
}

impl ComponentKind {
    pub fn label(&self) -> String {
        match self {
            ComponentKind::Singleton => "singleton".into(),
            ComponentKind::SingleEdge => "single_edge".into(),
            ComponentKind::Path => "path".into(),
            ComponentKind::Other(d) => format!("other:{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentInfo {
    pub vertices: Vec<usize>,
    pub edges: usize,
    pub kind: ComponentKind,
}

/// Tags every component as a singleton, a single edge, a path (three or more
/// vertices, acyclic, maximum degree two), or something else.
pub fn components_classify(g: &Graph) -> Vec<ComponentInfo> {
    g.components()
        .into_iter()
        .map(|vertices| {
            let size = vertices.len();
            let edges = vertices.iter().map(|&v| g.degree(v)).sum::<usize>() / 2;
            let max_deg = vertices.iter().map(|&v| g.degree(v)).max().unwrap_or(0);
            let acyclic = edges + 1 == size;
            let kind = if g.has_self_loop() {
                ComponentKind::Other("self-loop".into())
            } else if size == 1 {
                ComponentKind::Singleton
            } else if size == 2 {
                ComponentKind::SingleEdge
            } else if acyclic && max_deg <= 2 {
                ComponentKind::Path
            } else if acyclic {
                ComponentKind::Other("tree".into())
            } else if max_deg == 2 && edges == size {
                ComponentKind::Other("cycle".into())
            } else {
                ComponentKind::Other("cyclic".into())
            };
            ComponentInfo {
                vertices,
                edges,
                kind,
            }
        })
        .collect()
}

/// Count of components per kind label.
pub fn component_histogram(info: &[ComponentInfo]) -> BTreeMap<String, usize> {
    let mut h = BTreeMap::new();
    for c in info {
        *h.entry(c.kind.label()).or_insert(0) += 1;
    }
    h
}

/// A hypergraph on vertices `1..=n`. Edges are stored sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut out = Vec::new();
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if let Some(&bad) = e.iter().find(|&&v| v == 0 || v > n) {
                return Err(Error::input(format!("hyperedge vertex {bad} outside 1..={n}")));
            }
            if e.is_empty() {
                return Err(Error::input("empty hyperedge"));
            }
            out.push(e);
        }
        out.sort();
        out.dedup();
        Ok(Hypergraph { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    /// Common edge size, if uniform and nonempty.
    pub fn uniform_size(&self) -> Option<usize> {
        let first = self.edges.first()?.len();
        self.edges.iter().all(|e| e.len() == first).then_some(first)
    }
}

/// A partition of `1..=n` into nonempty labelled cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellPartition {
    n: usize,
    cells: Vec<Vec<usize>>,
}

impl CellPartition {
    pub fn new(n: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut cells = cells;
        for cell in &mut cells {
            if cell.is_empty() {
                return Err(Error::input("empty cell"));
            }
            cell.sort_unstable();
            for &v in cell.iter() {
                if v == 0 || v > n {
                    return Err(Error::input(format!("cell vertex {v} outside 1..={n}")));
                }
                if seen[v] {
                    return Err(Error::input(format!("vertex {v} in two cells")));
                }
                seen[v] = true;
            }
        }
        if let Some(v) = (1..=n).find(|&v| !seen[v]) {
            return Err(Error::input(format!("vertex {v} in no cell")));
        }
        Ok(CellPartition { n, cells })
    }

    /// Groups vertex `i + 1` by `labels[i]`; cells are ordered by their smallest member.
    pub fn from_labels<L: Eq + Clone>(labels: &[L]) -> Self {
        let mut keys: Vec<L> = Vec::new();
        let mut cells: Vec<Vec<usize>> = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            match keys.iter().position(|k| k == l) {
                Some(j) => cells[j].push(i + 1),
                None => {
                    keys.push(l.clone());
                    cells.push(vec![i + 1]);
                }
            }
        }
        CellPartition {
            n: labels.len(),
            cells,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Zero-based cell index of each vertex `1..=n` (position `v - 1`).
    pub fn labels(&self) -> Vec<usize> {
        let mut l = vec![0; self.n];
        for (j, cell) in self.cells.iter().enumerate() {
            for &v in cell {
                l[v - 1] = j;
            }
        }
        l
    }
}

/// Exact hypergraph chromatic number by backtracking over `r = 1, 2, ...`,
/// with one optimal partition.
pub fn hypergraph_chromatic(hg: &Hypergraph) -> Result<(usize, CellPartition)> {
    if let Some(e) = hg.edges.iter().find(|e| e.len() < 2) {
        return Err(Error::input(format!(
            "singleton hyperedge {e:?} cannot be properly colored"
        )));
    }
    let n = hg.n;
    if n == 0 {
        return Ok((0, CellPartition { n: 0, cells: Vec::new() }));
    }
    // edges indexed by their largest vertex, checked once that vertex is colored
    let mut closing: Vec<Vec<&[usize]>> = vec![Vec::new(); n + 1];
    for e in &hg.edges {
        closing[*e.last().unwrap()].push(e);
    }
    let start = if hg.edges.is_empty() { 1 } else { 2 };
    for r in start..=n {
        let mut color = vec![0usize; n + 1];
        if color_hyper(1, 0, r, &mut color, &closing) {
            let labels: Vec<usize> = color[1..].to_vec();
            return Ok((r, CellPartition::from_labels(&labels)));
        }
    }
    unreachable!("n colors always suffice when every edge has two vertices")
}

fn color_hyper(v: usize, used: usize, r: usize, color: &mut [usize], closing: &[Vec<&[usize]>]) -> bool {
    if v == color.len() {
        return true;
    }
    for c in 1..=(used + 1).min(r) {
        color[v] = c;
        let mono = closing[v]
            .iter()
            .any(|e| e.iter().all(|&u| color[u] == c));
        if !mono && color_hyper(v + 1, used.max(c), r, color, closing) {
            return true;
        }
    }
    color[v] = 0;
    false
}

/// Builds `psi_j(x) = sum_{n in C_j} x_n` for each cell and returns
/// `∩ ker psi_j`, a subgroup of `F_p^N` of codimension equal to the cell count.
///
/// Every edge must meet some cell in a count not divisible by `p` (for
/// `p`-element edges this just says no edge lies inside one cell). Then
/// `psi_j(e_F) = |F ∩ C_j| mod p` is nonzero for that cell, so the subgroup
/// misses every `e_F`.
pub fn coloring_to_avoiding_subgroup(part: &CellPartition, fam: &Hypergraph, p: u8) -> Result<Subgroup> {
    check_prime(p as u32)?;
    if part.n != fam.n {
        return Err(Error::DimensionMismatch {
            expected: fam.n,
            found: part.n,
        });
    }
    let labels = part.labels();
    for e in &fam.edges {
        let mut counts = vec![0usize; part.num_cells()];
        for &v in e {
            counts[labels[v - 1]] += 1;
        }
        if counts.contains(&e.len()) {
            return Err(Error::Precondition(format!("edge {e:?} lies inside one cell")));
        }
        if counts.iter().all(|&c| c % p as usize == 0) {
            return Err(Error::Precondition(format!(
                "edge {e:?} meets every cell in a multiple of p={p}"
            )));
        }
    }
    let rows: Vec<FpVec> = part
        .cells
        .iter()
        .map(|cell| {
            let mut v = FpVec::zero(p, part.n);
            for &i in cell {
                v = &v + &FpVec::basis(p, part.n, i - 1);
            }
            v
        })
        .collect();
    Ok(Subgroup::kernel_of(&FpMatrix::from_rows(p, part.n, &rows)?))
}

/// Partitions `1..=n` by the tuple `(xi_1[v], ..., xi_k[v])`, i.e. by the
/// values of the characters on `e_v`.
pub fn characters_to_coloring(xis: &[DualVec], n: usize) -> Result<CellPartition> {
    if let Some(x) = xis.iter().find(|x| x.dim() < n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.dim(),
        });
    }
    let labels: Vec<Vec<u8>> = (0..n)
        .map(|v| xis.iter().map(|x| x.as_vec().coords()[v]).collect())
        .collect();
    Ok(CellPartition::from_labels(&labels))
}

/// What a witness is checked against.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Graph(&'a Graph),
    Hypergraph(&'a Hypergraph),
    Set(&'a VecSet),
}

#[derive(Clone, Copy, Debug)]
pub enum Witness<'a> {
    /// Colors for vertices `0..n` of a graph, or `1..=n` of a hypergraph.
    Coloring(&'a Coloring),
    Partition(&'a CellPartition),
    /// Claimed to avoid a set.
    Subgroup(&'a Subgroup),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    /// A monochromatic graph edge (zero-based endpoints).
    GraphEdge(usize, usize),
    HyperEdge(Vec<usize>),
    /// An element of the set lying in the subgroup.
    Member(FpVec),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Checks a proper coloring or an avoidance claim, returning the first violation.
pub fn verify(witness: Witness<'_>, against: Target<'_>) -> Result<Verdict> {
    match (witness, against) {
        (Witness::Coloring(c), Target::Graph(g)) => {
            expect_len(c.colors.len(), g.n())?;
            if g.has_self_loop() && g.n() > 0 {
                return Ok(Verdict::GraphEdge(0, 0));
            }
            Ok(first_mono_edge(g, &c.colors))
        }
        (Witness::Partition(p), Target::Graph(g)) => {
            expect_len(p.n, g.n())?;
            if g.has_self_loop() && g.n() > 0 {
                return Ok(Verdict::GraphEdge(0, 0));
            }
            Ok(first_mono_edge(g, &p.labels()))
        }
        (Witness::Coloring(c), Target::Hypergraph(h)) => {
            expect_len(c.colors.len(), h.n)?;
            Ok(first_mono_hyperedge(h, |v| c.colors[v - 1]))
        }
        (Witness::Partition(p), Target::Hypergraph(h)) => {
            expect_len(p.n, h.n)?;
            let labels = p.labels();
            Ok(first_mono_hyperedge(h, |v| labels[v - 1]))
        }
        (Witness::Subgroup(sub), Target::Set(s)) => {
            if sub.p() != s.p() || sub.ambient_dim() != s.dim() {
                return Err(Error::DimensionMismatch {
                    expected: s.dim(),
                    found: sub.ambient_dim(),
                });
            }
            Ok(match s.first_in(sub) {
                Some(x) => Verdict::Member(x.clone()),
                None => Verdict::Valid,
            })
        }
        (w, t) => Err(Error::input(format!(
            "cannot verify {} against {}",
            witness_name(&w),
            target_name(&t)
        ))),
    }
}

fn witness_name(w: &Witness<'_>) -> &'static str {
    match w {
        Witness::Coloring(_) => "a coloring",
        Witness::Partition(_) => "a partition",
        Witness::Subgroup(_) => "a subgroup",
    }
}

fn target_name(t: &Target<'_>) -> &'static str {
    match t {
        Target::Graph(_) => "a graph",
        Target::Hypergraph(_) => "a hypergraph",
        Target::Set(_) => "a vector set",
    }
}

fn expect_len(got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: want,
            found: got,
        })
    }
}

fn first_mono_edge(g: &Graph, colors: &[usize]) -> Verdict {
    g.edges()
        .into_iter()
        .find(|&(u, v)| colors[u] == colors[v])
        .map_or(Verdict::Valid, |(u, v)| Verdict::GraphEdge(u, v))
}

fn first_mono_hyperedge(h: &Hypergraph, color: impl Fn(usize) -> usize) -> Verdict {
    h.edges
        .iter()
        .find(|e| e.iter().all(|&v| color(v) == color(e[0])))
        .map_or(Verdict::Valid, |e| Verdict::HyperEdge(e.clone()))
}
