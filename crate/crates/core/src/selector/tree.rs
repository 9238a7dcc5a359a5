//! A single multi-output regression tree grown on the squared-error criterion.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        n_samples: usize,
    },
    Leaf {
        value: Vec<f64>,
        n_samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TreeParams {
    pub max_features: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub min_impurity_decrease: f64,
    pub max_depth: Option<usize>,
}

/// Training data: `cols[f][row]` and row-major targets `y[row * t + k]`.
pub(crate) struct Data<'a> {
    pub cols: &'a [Vec<f64>],
    pub y: &'a [f64],
    pub t: usize,
}

impl Data<'_> {
    fn target(&self, row: usize) -> &[f64] {
        &self.y[row * self.t..(row + 1) * self.t]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

struct Best {
    feature: usize,
    threshold: f64,
    /// Position in the sorted node slice: rows `..=pos` go left.
    pos: usize,
    proxy: f64,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[*feature] <= *threshold { *left } else { *right },
                Node::Leaf { value, .. } => return value,
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
                Node::Leaf { .. } => 0,
            }
        }
        go(&self.nodes, 0)
    }

    /// Grow on the multiset `sample` of row indices. Returns the tree and the
    /// total squared-error decrease credited to each feature.
    pub(crate) fn grow(data: &Data<'_>, mut sample: Vec<usize>, p: &TreeParams, rng: &mut Rng) -> (Tree, Vec<f64>) {
        let n_features = data.cols.len();
        let n_root = sample.len() as f64;
        let mut importance = vec![0.0; n_features];
        let mut nodes: Vec<Node> = Vec::new();
        let mut features: Vec<usize> = (0..n_features).collect();
        let mut scratch: Vec<(f64, usize)> = Vec::with_capacity(sample.len());

        // (node slot, start, end, depth)
        let mut stack = vec![(0usize, 0usize, sample.len(), 0usize)];
        nodes.push(Node::Leaf { value: Vec::new(), n_samples: 0 });
        while let Some((slot, lo, hi, depth)) = stack.pop() {
            let rows = &sample[lo..hi];
            let n = rows.len();
            let mut sum = vec![0.0; data.t];
            for &r in rows {
                for (s, v) in sum.iter_mut().zip(data.target(r)) {
                    *s += v;
                }
            }
            let mean: Vec<f64> = sum.iter().map(|s| s / n as f64).collect();
            let first = data.target(rows[0]);
            let pure = rows.iter().all(|&r| data.target(r) == first);
            let leaf = Node::Leaf { value: mean, n_samples: n };
            if pure
                || n < p.min_samples_split
                || n < 2 * p.min_samples_leaf
                || p.max_depth.is_some_and(|d| depth >= d)
            {
                nodes[slot] = leaf;
                continue;
            }
            let parent_proxy = sum.iter().map(|s| s * s).sum::<f64>() / n as f64;

            let mut best: Option<Best> = None;
            let mut drawn = 0;
            let mut visited = 0;
            let mut sum_l = vec![0.0; data.t];
            while visited < p.max_features && drawn < n_features {
                let j = rng.random_range(drawn..n_features);
                features.swap(drawn, j);
                let f = features[drawn];
                drawn += 1;
                let col = &data.cols[f];
                scratch.clear();
                scratch.extend(rows.iter().map(|&r| (col[r], r)));
                scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
                if scratch[0].0 == scratch[n - 1].0 {
                    continue;
                }
                visited += 1;
                sum_l.iter_mut().for_each(|s| *s = 0.0);
                for k in 0..n - 1 {
                    for (s, v) in sum_l.iter_mut().zip(data.target(scratch[k].1)) {
                        *s += v;
                    }
                    let n_l = k + 1;
                    let n_r = n - n_l;
                    if n_l < p.min_samples_leaf {
                        continue;
                    }
                    if n_r < p.min_samples_leaf {
                        break;
                    }
                    if scratch[k].0 == scratch[k + 1].0 {
                        continue;
                    }
                    let mut proxy = 0.0;
                    for (sl, s) in sum_l.iter().zip(&sum) {
                        let sr = s - sl;
                        proxy += sl * sl / n_l as f64 + sr * sr / n_r as f64;
                    }
                    if best.as_ref().is_none_or(|b| proxy > b.proxy) {
                        let (a, b) = (scratch[k].0, scratch[k + 1].0);
                        let mut threshold = a + (b - a) / 2.0;
                        if threshold >= b || !threshold.is_finite() {
                            threshold = a;
                        }
                        best = Some(Best {
                            feature: f,
                            threshold,
                            pos: k,
                            proxy,
                        });
                    }
                }
            }
            let Some(best) = best else {
                nodes[slot] = leaf;
                continue;
            };
            let decrease = (best.proxy - parent_proxy).max(0.0);
            if decrease / (n_root * data.t as f64) < p.min_impurity_decrease {
                nodes[slot] = leaf;
                continue;
            }
            // partition the node slice: rows with x <= threshold first, in
            // their current relative order
            let col = &data.cols[best.feature];
            let (mut left, mut right): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&r| col[r] <= best.threshold);
            debug_assert_eq!(left.len(), best.pos + 1);
            let mid = lo + left.len();
            left.append(&mut right);
            sample[lo..hi].copy_from_slice(&left);

            importance[best.feature] += decrease;
            let l = nodes.len();
            nodes.push(Node::Leaf { value: Vec::new(), n_samples: 0 });
            nodes.push(Node::Leaf { value: Vec::new(), n_samples: 0 });
            nodes[slot] = Node::Split {
                feature: best.feature,
                threshold: best.threshold,
                left: l,
                right: l + 1,
                n_samples: n,
            };
            stack.push((l + 1, mid, hi, depth + 1));
            stack.push((l, lo, mid, depth + 1));
        }
        (Tree { nodes }, importance)
    }
}
