//! Rooted growing trees with birth-ordered vertices.
//!
//! Vertices are numbered `0..n` in birth order; index `i` is vertex
//! `v_{i+1}`, so index 0 is the root. Every parent has a smaller index
//! than its children, which lets most algorithms here run as a single forward
//! or backward sweep over the index range instead of a graph traversal.

use std::cmp::Ordering;
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GrowingTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    birth_time: Option<Vec<f64>>,
}

impl Default for GrowingTree {
    fn default() -> Self {
        Self::new()
    }
}

impl GrowingTree {
    /// A single root vertex.
    pub fn new() -> Self {
        Self { parent: vec![None], children: vec![Vec::new()], birth_time: None }
    }

    /// A single root vertex born at time 0, for continuous-time growth.
    pub fn new_timed() -> Self {
        Self { birth_time: Some(vec![0.0]), ..Self::new() }
    }

    /// Builds a tree from a parent array (`parents[0]` must be `None`).
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Self> {
        let mut tree = match parents.first() {
            Some(None) => Self::new(),
            Some(Some(_)) => return invalid("the root must have no parent"),
            None => return invalid("a tree needs at least one vertex"),
        };
        for (v, p) in parents.iter().enumerate().skip(1) {
            match *p {
                Some(p) if p < v => {
                    tree.attach(p);
                }
                _ => return invalid(format!("vertex {v} needs a parent with a smaller index")),
            }
        }
        Ok(tree)
    }

    /// The line `v_1 - v_2 - ... - v_r`, rooted at `v_1`.
    pub fn line(r: usize) -> Result<Self> {
        if r == 0 {
            return invalid("line tree needs r >= 1");
        }
        let parents: Vec<_> = (0..r).map(|v| v.checked_sub(1)).collect();
        Self::from_parents(&parents)
    }

    /// The star with centre `v_1` and `r - 1` leaves.
    pub fn star(r: usize) -> Result<Self> {
        if r == 0 {
            return invalid("star tree needs r >= 1");
        }
        let parents: Vec<_> = (0..r).map(|v| (v > 0).then_some(0)).collect();
        Self::from_parents(&parents)
    }

    /// Appends a new vertex as a child of `parent` and returns its index.
    pub fn attach(&mut self, parent: usize) -> usize {
        let v = self.parent.len();
        assert!(parent < v, "parent {parent} is not in a tree of {v} vertices");
        self.parent.push(Some(parent));
        self.children.push(Vec::new());
        self.children[parent].push(v);
        if let Some(times) = &mut self.birth_time {
            // Untimed attachment to a timed tree inherits the last birth time.
            let last = *times.last().unwrap_or(&0.0);
            times.push(last);
        }
        v
    }

    /// Appends a child born at time `t`, which must exceed every earlier birth.
    pub fn attach_at(&mut self, parent: usize, t: f64) -> usize {
        let times = self.birth_time.get_or_insert_with(|| vec![0.0; self.parent.len()]);
        debug_assert!(times.last().is_none_or(|&last| t >= last));
        times.push(t);
        let v = self.parent.len();
        assert!(parent < v, "parent {parent} is not in a tree of {v} vertices");
        self.parent.push(Some(parent));
        self.children.push(Vec::new());
        self.children[parent].push(v);
        v
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    /// Always false: a tree has at least its root.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.children[v].len()
    }

    /// Total degree: out-degree plus one for every non-root vertex.
    pub fn degree(&self, v: usize) -> usize {
        self.out_degree(v) + usize::from(self.parent[v].is_some())
    }

    pub fn max_degree(&self) -> usize {
        (0..self.len()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn birth_times(&self) -> Option<&[f64]> {
        self.birth_time.as_deref()
    }

    pub(crate) fn set_birth_times(&mut self, times: Vec<f64>) {
        debug_assert_eq!(times.len(), self.len());
        self.birth_time = Some(times);
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            invalid(format!("vertex {v} out of range for a tree of {} vertices", self.len()))
        }
    }

    /// Sizes of the subtrees hanging below each vertex when rooted at `v_1`.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1usize; self.len()];
        for v in (1..self.len()).rev() {
            if let Some(p) = self.parent[v] {
                size[p] += size[v];
            }
        }
        size
    }

    /// `|(T, u)_{v↓}|`: the number of vertices whose path from `u` passes
    /// through `v` (including `v`).
    pub fn subtree_size(&self, u: usize, v: usize) -> Result<usize> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return invalid("subtree_size needs two distinct vertices");
        }
        Ok(directed_subtree_size(self, &self.subtree_sizes(), u, v))
    }

    /// `psi(u)`, the size of the largest subtree of `(T, u)`, for every `u`.
    /// By convention `psi = 0` on the one-vertex tree.
    pub fn psi_all(&self) -> Vec<usize> {
        psi_from_sizes(self, &self.subtree_sizes())
    }

    /// All minimisers of `psi`; with two centroids the younger one is selected.
    pub fn centroids(&self) -> CentroidReport {
        CentroidReport::from_psi(&self.psi_all())
    }

    /// Decides which of `u`, `v` has the smaller `psi` from two subtree sizes,
    /// using `psi(u) <= psi(v)  <=>  |(T,v)_{u↓}| >= |(T,u)_{v↓}|`.
    pub fn compare_centrality(&self, u: usize, v: usize) -> Result<Centrality> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return invalid("compare_centrality needs two distinct vertices");
        }
        let sizes = self.subtree_sizes();
        let toward_u = directed_subtree_size(self, &sizes, v, u);
        let toward_v = directed_subtree_size(self, &sizes, u, v);
        Ok(match toward_u.cmp(&toward_v) {
            Ordering::Greater => Centrality::FirstMoreCentral,
            Ordering::Less => Centrality::SecondMoreCentral,
            Ordering::Equal => Centrality::Equal,
        })
    }

    /// Component sizes `|T_{j,K}|`, `j = 1..K`, after deleting every edge whose
    /// endpoints both lie among the first `k` vertices.
    pub fn forest_sizes(&self, k: usize) -> Result<Vec<usize>> {
        if k == 0 || k > self.len() {
            return invalid(format!("K = {k} must lie in [1, {}]", self.len()));
        }
        let mut label = vec![0usize; self.len()];
        let mut sizes = vec![0usize; k];
        for v in 0..self.len() {
            label[v] = if v < k { v } else { label[self.parent[v].expect("non-root")] };
            sizes[label[v]] += 1;
        }
        Ok(sizes)
    }

    /// Writes the tree as `vertex,parent,birth_time` rows after a header.
    /// Vertices are 1-based; the root has an empty parent field, and
    /// `birth_time` is empty for untimed trees.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["vertex", "parent", "birth_time"]).map_err(io)?;
        for v in 0..self.len() {
            let parent = self.parent[v].map(|p| (p + 1).to_string()).unwrap_or_default();
            let time = self.birth_time.as_ref().map(|t| t[v].to_string()).unwrap_or_default();
            w.write_record([(v + 1).to_string(), parent, time]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }

    /// Reads the format produced by [`GrowingTree::write_csv`]. Rows must be
    /// in vertex order; birth times must be all present or all absent.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(input);
        let header = r.headers().map_err(|e| Error::TreeFormat { line: 1, msg: e.to_string() })?;
        if header.len() < 2 || &header[0] != "vertex" || &header[1] != "parent" {
            return Err(Error::TreeFormat { line: 1, msg: "expected header vertex,parent[,birth_time]".into() });
        }
        let mut parents = Vec::new();
        let mut times: Vec<Option<f64>> = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let bad = |msg: String| Error::TreeFormat { line, msg };
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let vertex: usize = rec.get(0).unwrap_or("").parse().map_err(|_| bad("bad vertex index".into()))?;
            if vertex != i + 1 {
                return Err(bad(format!("expected vertex {}, found {vertex}", i + 1)));
            }
            let parent = match rec.get(1).unwrap_or("") {
                "" => None,
                s => {
                    let p: usize = s.parse().map_err(|_| bad(format!("bad parent '{s}'")))?;
                    if p == 0 || p >= vertex {
                        return Err(bad(format!("parent {p} must be in [1, {})", vertex)));
                    }
                    Some(p - 1)
                }
            };
            if (vertex == 1) != parent.is_none() {
                return Err(bad("exactly the first vertex must have no parent".into()));
            }
            parents.push(parent);
            times.push(match rec.get(2).unwrap_or("") {
                "" => None,
                s => Some(s.parse().map_err(|_| bad(format!("bad birth time '{s}'")))?),
            });
        }
        let mut tree = Self::from_parents(&parents).map_err(|e| Error::TreeFormat { line: 0, msg: e.to_string() })?;
        if times.iter().all(Option::is_some) {
            let times: Vec<f64> = times.into_iter().flatten().collect();
            if times.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::TreeFormat { line: 0, msg: "birth times must increase with vertex index".into() });
            }
            tree.set_birth_times(times);
        } else if times.iter().any(Option::is_some) {
            return Err(Error::TreeFormat { line: 0, msg: "birth times must be given for all vertices or none".into() });
        }
        Ok(tree)
    }
}

/// `|(T, u)_{v↓}|` given root-oriented subtree sizes. The tree is taken to be
/// the first `sizes.len()` vertices of `tree`, so sizes from an earlier
/// snapshot of a growing tree remain usable.
pub(crate) fn directed_subtree_size(tree: &GrowingTree, sizes: &[usize], u: usize, v: usize) -> usize {
    // Is v a proper ancestor of u? Parents have smaller indices, so walk up
    // from u until we pass below v.
    let mut child_on_path = None;
    let mut w = u;
    while w > v {
        let p = tree.parent[w].expect("non-root");
        if p == v {
            child_on_path = Some(w);
            break;
        }
        w = p;
    }
    match child_on_path {
        Some(c) => sizes.len() - sizes[c],
        None => sizes[v],
    }
}

pub(crate) fn psi_from_sizes(tree: &GrowingTree, sizes: &[usize]) -> Vec<usize> {
    let n = tree.len();
    (0..n)
        .map(|u| {
            let below = tree.children[u].iter().map(|&c| sizes[c]).max().unwrap_or(0);
            below.max(n - sizes[u])
        })
        .collect()
}

/// Result of [`Centrality`] comparison between a first and second vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Centrality {
    FirstMoreCentral,
    SecondMoreCentral,
    Equal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentroidReport {
    /// One or two vertices, in increasing index order.
    pub centroid_ids: Vec<usize>,
    pub psi_values: Vec<usize>,
    /// The younger (higher-index) centroid when there are two.
    pub selected: usize,
}

impl CentroidReport {
    pub fn from_psi(psi: &[usize]) -> Self {
        let min = *psi.iter().min().expect("nonempty tree");
        let centroid_ids: Vec<usize> = (0..psi.len()).filter(|&v| psi[v] == min).collect();
        debug_assert!(centroid_ids.len() <= 2);
        let psi_values = centroid_ids.iter().map(|&v| psi[v]).collect();
        let selected = *centroid_ids.last().expect("at least one centroid");
        Self { centroid_ids, psi_values, selected }
    }

    pub fn psi(&self) -> usize {
        self.psi_values[0]
    }
}
