//! Vietoris–Rips persistent homology over Z/2.
//!
//! H0 comes from Kruskal's algorithm on the complete graph. Higher dimensions
//! use the standard boundary-matrix reduction with clearing, over all
//! simplices whose edges are no longer than the threshold.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub birth: f64,
    /// `f64::INFINITY` for essential classes.
    pub death: f64,
}

impl Pair {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_finite(&self) -> bool {
        self.death.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub homology_dim: usize,
    pub pairs: Vec<Pair>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PersistenceConfig {
    /// Highest homology dimension computed (0, 1 or 2).
    pub max_dim: usize,
    /// Required for `max_dim == 2`.
    pub allow_h2: bool,
    /// Edge length cap; `None` means the enclosing radius.
    pub threshold: Option<f64>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Edges `(length, i, j)` with `i < j`, sorted by length then index.
pub fn sorted_edges(d: &[Vec<f64>]) -> Vec<(f64, usize, usize)> {
    let n = d.len();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((d[i][j], i, j));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    edges
}

/// H0 diagram: one bar per point, finite deaths are the MST edge lengths.
pub fn h0_diagram(d: &[Vec<f64>]) -> PersistenceDiagram {
    let n = d.len();
    let mut uf = UnionFind::new(n);
    let mut pairs = Vec::with_capacity(n);
    for (w, i, j) in sorted_edges(d) {
        if uf.union(i, j) {
            pairs.push(Pair {
                birth: 0.0,
                death: w,
            });
            if pairs.len() + 1 == n {
                break;
            }
        }
    }
    if n > 0 {
        pairs.push(Pair {
            birth: 0.0,
            death: f64::INFINITY,
        });
    }
    PersistenceDiagram {
        homology_dim: 0,
        pairs,
    }
}

/// Smallest over points of the largest distance to any other point. Above
/// this radius the Rips complex is a cone, so no homology in positive
/// dimension survives.
pub fn enclosing_radius(d: &[Vec<f64>]) -> f64 {
    d.iter()
        .map(|row| row.iter().copied().fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone)]
struct Simplex {
    verts: Vec<usize>,
    value: f64,
}

fn key(verts: &[usize], n: usize) -> u64 {
    verts.iter().fold(0u64, |acc, &v| acc * n as u64 + v as u64)
}

/// All simplices of dimension `0..=top` with every edge `<= threshold`,
/// ordered by (filtration value, dimension, vertices).
fn rips_simplices(d: &[Vec<f64>], top: usize, threshold: f64) -> Vec<Simplex> {
    let n = d.len();
    let mut out: Vec<Simplex> = (0..n)
        .map(|i| Simplex {
            verts: vec![i],
            value: 0.0,
        })
        .collect();
    let mut frontier: Vec<Simplex> = out.clone();
    for _ in 1..=top {
        let mut next = Vec::new();
        for s in &frontier {
            let last = *s.verts.last().expect("non-empty simplex");
            for v in last + 1..n {
                let mut value = s.value;
                let mut ok = true;
                for &u in &s.verts {
                    let w = d[u][v];
                    if w > threshold {
                        ok = false;
                        break;
                    }
                    value = value.max(w);
                }
                if ok {
                    let mut verts = s.verts.clone();
                    verts.push(v);
                    next.push(Simplex { verts, value });
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then(a.verts.len().cmp(&b.verts.len()))
            .then_with(|| a.verts.cmp(&b.verts))
    });
    out
}

/// Symmetric difference of two sorted index lists.
fn xor_into(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Diagrams for dimensions `0..=cfg.max_dim`.
pub fn vr_persistence(d: &[Vec<f64>], cfg: &PersistenceConfig) -> Result<Vec<PersistenceDiagram>> {
    if cfg.max_dim > 2 {
        return Err(Error::Unsupported(format!("homology dimension {} not supported", cfg.max_dim)));
    }
    if cfg.max_dim == 2 && !cfg.allow_h2 {
        return Err(Error::Unsupported(
            "H2 needs the Rips 3-skeleton, which grows as n^4; enable it explicitly with an edge threshold cap".into(),
        ));
    }
    let n = d.len();
    if d.iter().any(|r| r.len() != n) {
        return Err(Error::Usage("distance matrix is not square".into()));
    }
    let mut diagrams = vec![h0_diagram(d)];
    if cfg.max_dim == 0 || n < 3 {
        for k in 1..=cfg.max_dim {
            diagrams.push(PersistenceDiagram {
                homology_dim: k,
                pairs: Vec::new(),
            });
        }
        return Ok(diagrams);
    }

    let threshold = cfg.threshold.unwrap_or_else(|| enclosing_radius(d));
    let simplices = rips_simplices(d, cfg.max_dim + 1, threshold);
    let index: HashMap<(usize, u64), usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| ((s.verts.len(), key(&s.verts, n)), i))
        .collect();
    let boundary = |s: &Simplex| -> Vec<usize> {
        if s.verts.len() < 2 {
            return Vec::new();
        }
        let mut b: Vec<usize> = (0..s.verts.len())
            .map(|skip| {
                let face: Vec<usize> = s
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &v)| v)
                    .collect();
                index[&(face.len(), key(&face, n))]
            })
            .collect();
        b.sort_unstable();
        b
    };

    // pivot row -> reduced column owning it
    let mut pivot_of: HashMap<usize, usize> = HashMap::new();
    // `killed`: positive simplex paired with a later one.
    // `negative`: simplex whose reduced column is non-zero.
    let mut killed = vec![false; simplices.len()];
    let mut negative = vec![false; simplices.len()];
    let mut pairs_by_dim: Vec<Vec<Pair>> = vec![Vec::new(); cfg.max_dim + 1];
    // Reduce from the top dimension down so positive columns can be cleared.
    for dim in (1..=cfg.max_dim + 1).rev() {
        let mut reduced: HashMap<usize, Vec<usize>> = HashMap::new();
        for (j, s) in simplices.iter().enumerate() {
            if s.verts.len() != dim + 1 || killed[j] {
                continue;
            }
            let mut col = boundary(s);
            while let Some(&low) = col.last() {
                match pivot_of.get(&low) {
                    Some(&other) => col = xor_into(&col, &reduced[&other]),
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                pivot_of.insert(low, j);
                killed[low] = true;
                negative[j] = true;
                let birth = simplices[low].value;
                if dim >= 2 && s.value > birth {
                    pairs_by_dim[dim - 1].push(Pair {
                        birth,
                        death: s.value,
                    });
                }
                reduced.insert(j, col);
            }
        }
    }
    for (j, s) in simplices.iter().enumerate() {
        let k = s.verts.len() - 1;
        if (1..=cfg.max_dim).contains(&k) && !killed[j] && !negative[j] {
            pairs_by_dim[k].push(Pair {
                birth: s.value,
                death: f64::INFINITY,
            });
        }
    }
    for (k, mut pairs) in pairs_by_dim.into_iter().enumerate().skip(1) {
        pairs.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
        diagrams.push(PersistenceDiagram {
            homology_dim: k,
            pairs,
        });
    }
    Ok(diagrams)
}
