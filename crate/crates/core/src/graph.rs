//! Undirected multigraphs, seed sets and the index maps between global vertex
//! ids and the coordinates of the non-seed subspace.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::BufRead;

use crate::error::{HitmixError, Result};

/// Immutable undirected multigraph in compressed sparse row form.
///
/// Each undirected edge `{u, v}` with `u != v` appears in both rows with the
/// same multiplicity. A self-loop at `v` appears once in row `v` and adds
/// twice its multiplicity to `degree(v)`, so that row sums of the adjacency
/// matrix equal the degrees and `D^{-1} A` is row-stochastic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    multiplicities: Vec<u32>,
    degrees: Vec<u64>,
}

impl Graph {
    /// Builds a graph from unordered vertex pairs. `(u, v)` and `(v, u)` name
    /// the same edge; repeated pairs accumulate multiplicity.
    pub fn from_edges<I>(n_vertices: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut canonical: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for (u, v) in edges {
            if u >= n_vertices || v >= n_vertices {
                return Err(HitmixError::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for {n_vertices} vertices"
                )));
            }
            *canonical.entry((u.min(v), u.max(v))).or_insert(0) += 1;
        }
        Ok(Self::from_canonical(n_vertices, &canonical))
    }

    fn from_canonical(n_vertices: usize, canonical: &BTreeMap<(usize, usize), u32>) -> Self {
        let mut rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n_vertices];
        for (&(u, v), &mult) in canonical {
            rows[u].push((v, mult));
            if u != v {
                rows[v].push((u, mult));
            }
        }
        let mut offsets = Vec::with_capacity(n_vertices + 1);
        let mut neighbors = Vec::new();
        let mut multiplicities = Vec::new();
        let mut degrees = Vec::with_capacity(n_vertices);
        offsets.push(0);
        for (v, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            let mut degree = 0u64;
            for &(u, mult) in row.iter() {
                degree += if u == v { 2 * mult as u64 } else { mult as u64 };
                neighbors.push(u);
                multiplicities.push(mult);
            }
            degrees.push(degree);
            offsets.push(neighbors.len());
        }
        Graph {
            offsets,
            neighbors,
            multiplicities,
            degrees,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// Sorted `(neighbor, multiplicity)` pairs of `v`.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.neighbors[range.clone()]
            .iter()
            .copied()
            .zip(self.multiplicities[range].iter().copied())
    }

    /// Adjacency-matrix row of `v`: like [`Graph::neighbors`] but a self-loop
    /// carries weight `2 * multiplicity`.
    pub fn adjacency_row(&self, v: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.neighbors(v)
            .map(move |(u, m)| (u, if u == v { 2 * m as u64 } else { m as u64 }))
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        let range = self.offsets[u]..self.offsets[u + 1];
        match self.neighbors[range.clone()].binary_search(&v) {
            Ok(pos) => self.multiplicities[range.start + pos],
            Err(_) => 0,
        }
    }

    /// Total edge multiplicity, each undirected edge or self-loop counted once.
    pub fn n_edges(&self) -> u64 {
        let mut total = 0u64;
        for v in 0..self.n_vertices() {
            for (u, m) in self.neighbors(v) {
                if u >= v {
                    total += m as u64;
                }
            }
        }
        total
    }

    /// Number of stored adjacency entries (both directions of every edge).
    pub fn n_entries(&self) -> usize {
        self.neighbors.len()
    }
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(e.into())),
            Ok(line) => {
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, trimmed.to_owned())))
                }
            }
        })
}

fn parse_id(token: &str, line: usize) -> Result<usize> {
    token.parse::<usize>().map_err(|_| HitmixError::Parse {
        line,
        message: format!("expected a non-negative integer vertex id, found {token:?}"),
    })
}

/// Reads a SNAP-style edge list: `#` comments, one whitespace-separated
/// `u v` pair per line.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut canonical: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut max_id = None;
    for item in data_lines(reader) {
        let (line, text) = item?;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(HitmixError::Parse {
                line,
                message: format!("expected 2 vertex ids, found {}", tokens.len()),
            });
        }
        let u = parse_id(tokens[0], line)?;
        let v = parse_id(tokens[1], line)?;
        max_id = max_id.max(Some(u.max(v)));
        *canonical.entry((u.min(v), u.max(v))).or_insert(0) += 1;
    }
    match max_id {
        None => Err(HitmixError::EmptyGraph),
        Some(max_id) => Ok(Graph::from_canonical(max_id + 1, &canonical)),
    }
}

/// Reads a seed file: one vertex id per line, `#` comments allowed.
pub fn load_seed_list<R: BufRead>(reader: R) -> Result<Vec<usize>> {
    let mut seeds = Vec::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let mut tokens = text.split_whitespace();
        let first = tokens.next().unwrap_or_default();
        if tokens.next().is_some() {
            return Err(HitmixError::Parse {
                line,
                message: "expected a single vertex id".into(),
            });
        }
        seeds.push(parse_id(first, line)?);
    }
    Ok(seeds)
}

/// The seed set `Ω` together with its ascending complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    members: Vec<usize>,
    complement: Vec<usize>,
    n_vertices: usize,
}

impl SeedSet {
    pub fn new<I>(members: I, n_vertices: usize) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if members.is_empty() {
            return Err(HitmixError::InvalidSeeds("seed set is empty".into()));
        }
        if let Some(&bad) = members.iter().find(|&&v| v >= n_vertices) {
            return Err(HitmixError::InvalidSeeds(format!(
                "seed {bad} out of range for {n_vertices} vertices"
            )));
        }
        if members.len() == n_vertices {
            return Err(HitmixError::InvalidSeeds(
                "seed set covers every vertex".into(),
            ));
        }
        let complement = (0..n_vertices).filter(|v| !members.contains(v)).collect();
        Ok(SeedSet {
            members: members.into_iter().collect(),
            complement,
            n_vertices,
        })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Bijection between a subset of vertices and `0..len`, in ascending global
/// order. Plays the role of the restriction/prolongation pair for `Ω^c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonSeedIndex {
    global_to_local: Vec<Option<usize>>,
    local_to_global: Vec<usize>,
}

impl NonSeedIndex {
    fn from_sorted(n_vertices: usize, vertices: Vec<usize>) -> Self {
        let mut global_to_local = vec![None; n_vertices];
        for (i, &v) in vertices.iter().enumerate() {
            global_to_local[v] = Some(i);
        }
        NonSeedIndex {
            global_to_local,
            local_to_global: vertices,
        }
    }

    pub fn len(&self) -> usize {
        self.local_to_global.len()
    }

    pub fn is_empty(&self) -> bool {
        self.local_to_global.is_empty()
    }

    pub fn local(&self, global: usize) -> Option<usize> {
        self.global_to_local.get(global).copied().flatten()
    }

    pub fn global(&self, local: usize) -> usize {
        self.local_to_global[local]
    }

    pub fn vertices(&self) -> &[usize] {
        &self.local_to_global
    }

    pub fn n_vertices(&self) -> usize {
        self.global_to_local.len()
    }

    /// Sub-index over the local coordinates for which `keep` is true.
    pub fn restrict(&self, keep: &[bool]) -> Result<Self> {
        if keep.len() != self.len() {
            return Err(HitmixError::DimensionMismatch {
                expected: self.len(),
                actual: keep.len(),
            });
        }
        let vertices = self
            .local_to_global
            .iter()
            .zip(keep)
            .filter_map(|(&v, &k)| k.then_some(v))
            .collect();
        Ok(Self::from_sorted(self.n_vertices(), vertices))
    }

    /// Restriction: pick the local coordinates out of a full-length vector.
    pub fn restrict_vector<T: Copy>(&self, full: &[T]) -> Vec<T> {
        self.local_to_global.iter().map(|&v| full[v]).collect()
    }

    /// Prolongation: embed a local vector into the full space, `fill` elsewhere.
    pub fn prolong_vector<T: Copy>(&self, local: &[T], fill: T) -> Vec<T> {
        let mut full = vec![fill; self.n_vertices()];
        for (&v, &x) in self.local_to_global.iter().zip(local) {
            full[v] = x;
        }
        full
    }
}

pub fn build_nonseed_index(graph: &Graph, seeds: &SeedSet) -> Result<NonSeedIndex> {
    check_seeds(graph, seeds)?;
    Ok(NonSeedIndex::from_sorted(
        graph.n_vertices(),
        seeds.complement().to_vec(),
    ))
}

fn check_seeds(graph: &Graph, seeds: &SeedSet) -> Result<()> {
    if seeds.n_vertices() != graph.n_vertices() {
        return Err(HitmixError::InvalidSeeds(format!(
            "seed set built for {} vertices, graph has {}",
            seeds.n_vertices(),
            graph.n_vertices()
        )));
    }
    Ok(())
}

/// Which non-seed vertices have a path to the seed set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityReport {
    /// One flag per entry of `SeedSet::complement`, same order.
    pub reachable: Vec<bool>,
    pub unreachable_count: usize,
}

impl ReachabilityReport {
    pub fn all_reachable(&self) -> bool {
        self.unreachable_count == 0
    }
}

/// Breadth-first search from every seed.
pub fn reachable_from(graph: &Graph, seeds: &SeedSet) -> ReachabilityReport {
    let n = graph.n_vertices().min(seeds.n_vertices());
    let mut visited = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in seeds.members() {
        if s < n && !visited[s] {
            visited[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for (u, _) in graph.neighbors(v) {
            if !visited[u] {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    let reachable: Vec<bool> = seeds
        .complement()
        .iter()
        .map(|&v| v < n && visited[v])
        .collect();
    let unreachable_count = reachable.iter().filter(|&&r| !r).count();
    ReachabilityReport {
        reachable,
        unreachable_count,
    }
}

/// Maps arbitrary vertex names to dense ids in order of first appearance.
#[derive(Debug, Default, Clone)]
pub struct Relabeler {
    ids: std::collections::HashMap<String, usize>,
    names: Vec<String>,
}

impl Relabeler {
    pub fn id(&mut self, name: &str) -> usize {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len();
        self.ids.insert(name.to_owned(), id);
        self.names.push(name.to_owned());
        id
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.ids.get(name).copied()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Reads an edge list with string vertex names and returns dense id pairs.
    pub fn relabel_edges<R: BufRead>(&mut self, reader: R) -> Result<Vec<(usize, usize)>> {
        let mut edges = Vec::new();
        for item in data_lines(reader) {
            let (line, text) = item?;
            let tokens: Vec<&str> = text.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(HitmixError::Parse {
                    line,
                    message: format!("expected 2 vertex names, found {}", tokens.len()),
                });
            }
            edges.push((self.id(tokens[0]), self.id(tokens[1])));
        }
        if edges.is_empty() {
            return Err(HitmixError::EmptyGraph);
        }
        Ok(edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<Graph> {
        load_edge_list(text.as_bytes())
    }

    #[test]
    fn path_graph_degrees() {
        let g = load("0 1\n1 2").unwrap();
        assert_eq!(g.n_vertices(), 3);
        assert_eq!(g.degrees(), &[1, 2, 1]);
        assert_eq!(g.n_edges(), 2);
    }

    #[test]
    fn repeated_lines_accumulate_multiplicity() {
        let g = load("# comment\n0 1\n0 1").unwrap();
        assert_eq!(g.degrees(), &[2, 2]);
        assert_eq!(g.multiplicity(0, 1), 2);
        assert_eq!(g.multiplicity(1, 0), 2);
    }

    #[test]
    fn reversed_pair_is_same_edge() {
        let g = load("0 1\n1 0\n").unwrap();
        assert_eq!(g.multiplicity(0, 1), 2);
        assert_eq!(g.neighbors(0).count(), 1);
    }

    #[test]
    fn self_loop_counts_twice() {
        let g = load("0 0").unwrap();
        assert_eq!(g.n_vertices(), 1);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.adjacency_row(0).collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match load("0 1\n# ok\n1 x\n") {
            Err(HitmixError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match load("0 1 2\n") {
            Err(HitmixError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("0 -1"), Err(HitmixError::Parse { .. })));
        assert!(matches!(load(""), Err(HitmixError::EmptyGraph)));
        assert!(matches!(load("# only\n\n"), Err(HitmixError::EmptyGraph)));
    }

    #[test]
    fn seed_file_parsing() {
        let seeds = load_seed_list("# seeds\n3\n\n1\n".as_bytes()).unwrap();
        assert_eq!(seeds, vec![3, 1]);
        assert!(load_seed_list("1 2\n".as_bytes()).is_err());
    }

    #[test]
    fn nonseed_index_maps() {
        let g = load("0 1\n1 2\n2 3").unwrap();
        let seeds = SeedSet::new([1], 4).unwrap();
        let idx = build_nonseed_index(&g, &seeds).unwrap();
        assert_eq!(idx.vertices(), &[0, 2, 3]);
        assert_eq!(idx.local(0), Some(0));
        assert_eq!(idx.local(2), Some(1));
        assert_eq!(idx.local(3), Some(2));
        assert_eq!(idx.local(1), None);

        let g3 = load("0 1\n1 2").unwrap();
        let idx = build_nonseed_index(&g3, &SeedSet::new([0, 2], 3).unwrap()).unwrap();
        assert_eq!(idx.vertices(), &[1]);
    }

    #[test]
    fn invalid_seed_sets() {
        assert!(SeedSet::new(Vec::<usize>::new(), 3).is_err());
        assert!(SeedSet::new([3], 3).is_err());
        assert!(SeedSet::new([0, 1, 2], 3).is_err());
        let g = load("0 1\n1 2").unwrap();
        let seeds = SeedSet::new([0], 5).unwrap();
        assert!(build_nonseed_index(&g, &seeds).is_err());
    }

    #[test]
    fn reachability() {
        let path = load("0 1\n1 2").unwrap();
        let r = reachable_from(&path, &SeedSet::new([2], 3).unwrap());
        assert!(r.all_reachable());

        let two = load("0 1\n2 3").unwrap();
        let seeds = SeedSet::new([0], 4).unwrap();
        let r = reachable_from(&two, &seeds);
        assert_eq!(seeds.complement(), &[1, 2, 3]);
        assert_eq!(r.reachable, vec![true, false, false]);
        assert_eq!(r.unreachable_count, 2);

        let seeds = SeedSet::new([0, 1], 4).unwrap();
        let r = reachable_from(&two, &seeds);
        assert_eq!(seeds.complement(), &[2, 3]);
        assert_eq!(r.reachable, vec![false, false]);
    }

    #[test]
    fn restrict_and_prolong() {
        let g = load("0 1\n1 2\n2 3").unwrap();
        let idx = build_nonseed_index(&g, &SeedSet::new([1], 4).unwrap()).unwrap();
        let sub = idx.restrict(&[true, false, true]).unwrap();
        assert_eq!(sub.vertices(), &[0, 3]);
        assert_eq!(sub.local(3), Some(1));
        assert_eq!(sub.local(2), None);
        assert_eq!(sub.prolong_vector(&[5, 7], 0), vec![5, 0, 0, 7]);
        assert_eq!(sub.restrict_vector(&[5, 6, 8, 7]), vec![5, 7]);
    }

    #[test]
    fn relabel_names() {
        let mut r = Relabeler::default();
        let edges = r.relabel_edges("a b\n# x\nb c\nc a\n".as_bytes()).unwrap();
        assert_eq!(edges, vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(r.names(), &["a", "b", "c"]);
    }
}
