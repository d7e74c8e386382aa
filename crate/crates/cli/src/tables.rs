use cmjtree::experiments::CsvTable;
use cmjtree::{CmjTrajectory, GrowingTree, MalthusEstimate};

/// Prefixes each trial's rows with its trial index.
pub struct PerTrial<'a, T>(pub &'a [T]);

impl<T: CsvTable> CsvTable for PerTrial<'_, T> {
    fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["trial"];
        h.extend(self.0.first().map(|t| t.header()).unwrap_or_default());
        h
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, t)| {
                t.rows().into_iter().map(move |mut r| {
                    r.insert(0, i.to_string());
                    r
                })
            })
            .collect()
    }
}

pub struct MalthusRow(pub MalthusEstimate);

impl CsvTable for MalthusRow {
    fn header(&self) -> Vec<&'static str> {
        vec!["theta", "residual", "bracket_lo", "bracket_hi", "iterations", "truncation_bound"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let e = &self.0;
        vec![vec![
            e.theta.to_string(),
            e.residual.to_string(),
            e.bracket.0.to_string(),
            e.bracket.1.to_string(),
            e.iterations.to_string(),
            e.truncation_bound.to_string(),
        ]]
    }
}

pub struct Trajectories<'a>(pub &'a [CmjTrajectory]);

impl CsvTable for Trajectories<'_> {
    fn header(&self) -> Vec<&'static str> {
        vec!["trial", "t", "population", "normalized"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for (i, tr) in self.0.iter().enumerate() {
            for (j, (t, z)) in tr.times.iter().zip(&tr.populations).enumerate() {
                let norm = tr.normalized.as_ref().map(|v| v[j].to_string()).unwrap_or_default();
                rows.push(vec![i.to_string(), t.to_string(), z.to_string(), norm]);
            }
        }
        rows
    }
}

/// Per-vertex structure of a tree, 1-based like tree files.
pub struct Analysis<'a> {
    pub tree: &'a GrowingTree,
    pub sizes: Vec<usize>,
    pub psi: Vec<usize>,
    pub centroids: Vec<usize>,
    pub selected: usize,
}

impl<'a> Analysis<'a> {
    pub fn new(tree: &'a GrowingTree) -> Self {
        let report = tree.centroids();
        Self {
            tree,
            sizes: tree.subtree_sizes(),
            psi: tree.psi_all(),
            centroids: report.centroid_ids,
            selected: report.selected,
        }
    }
}

impl CsvTable for Analysis<'_> {
    fn header(&self) -> Vec<&'static str> {
        vec!["vertex", "parent", "out_degree", "degree", "subtree_size", "psi", "centroid", "selected"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (0..self.tree.len())
            .map(|v| {
                vec![
                    (v + 1).to_string(),
                    self.tree.parent(v).map(|p| (p + 1).to_string()).unwrap_or_default(),
                    self.tree.out_degree(v).to_string(),
                    self.tree.degree(v).to_string(),
                    self.sizes[v].to_string(),
                    self.psi[v].to_string(),
                    u8::from(self.centroids.contains(&v)).to_string(),
                    u8::from(self.selected == v).to_string(),
                ]
            })
            .collect()
    }
}
