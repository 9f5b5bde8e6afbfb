//! Diagrams of isomorphisms and the holonomy of Haar measures around cycles.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::lca::GroupExpr;
use crate::morphism::Morphism;
use crate::scalar::PositiveReal;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub morphism: Morphism,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagram {
    vertices: Vec<GroupExpr>,
    edges: Vec<Edge>,
}

/// One step of a walk: an edge, traversed along (`true`) or against its arrow.
pub type Step = (usize, bool);

impl Diagram {
    pub fn new(vertices: Vec<GroupExpr>, edges: Vec<Edge>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            let (Some(from), Some(to)) = (vertices.get(e.from), vertices.get(e.to)) else {
                bail!(Domain, "edge {i} refers to a missing vertex");
            };
            if e.morphism.source() != from || e.morphism.target() != to {
                bail!(
                    Type,
                    "edge {i}: morphism {} -> {} does not match {from} -> {to}",
                    e.morphism.source(),
                    e.morphism.target()
                );
            }
            if let Err(v) = e.morphism.validate_automorphism() {
                bail!(Domain, "edge {i} is not an isomorphism: {v}");
            }
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> &[GroupExpr] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_vector_free(&self) -> bool {
        self.vertices.iter().all(GroupExpr::is_vector_free)
    }

    fn endpoints(&self, (edge, forward): Step) -> Result<(usize, usize)> {
        let Some(e) = self.edges.get(edge) else {
            bail!(Domain, "no edge {edge}");
        };
        Ok(if forward {
            (e.from, e.to)
        } else {
            (e.to, e.from)
        })
    }

    /// A basis of the cycle space: one cycle per edge outside a spanning forest.
    pub fn cycle_basis(&self) -> Vec<Vec<Step>> {
        let n = self.vertices.len();
        // parent edge of every vertex in a BFS forest, with the step leading to it
        let mut parent: Vec<Option<Step>> = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        let mut tree = vec![false; self.edges.len()];
        let mut adjacency: Vec<Vec<(usize, usize, bool)>> = vec![vec![]; n];
        for (i, e) in self.edges.iter().enumerate() {
            adjacency[e.from].push((i, e.to, true));
            adjacency[e.to].push((i, e.from, false));
        }
        for root in 0..n {
            if depth[root] != usize::MAX {
                continue;
            }
            depth[root] = 0;
            let mut queue = alloc::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &(edge, w, forward) in &adjacency[v] {
                    if depth[w] == usize::MAX {
                        depth[w] = depth[v] + 1;
                        parent[w] = Some((edge, forward));
                        tree[edge] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let path_to_root = |mut v: usize| {
            let mut steps = vec![];
            while let Some((edge, forward)) = parent[v] {
                steps.push((edge, !forward));
                v = if forward {
                    self.edges[edge].from
                } else {
                    self.edges[edge].to
                };
            }
            steps
        };
        let mut out = vec![];
        for (i, e) in self.edges.iter().enumerate() {
            if tree[i] {
                continue;
            }
            if e.from == e.to {
                out.push(vec![(i, true)]);
                continue;
            }
            // root -> to through the tree, back along the edge, from -> root;
            // shared prefixes cancel in the product
            let mut cycle: Vec<Step> = path_to_root(e.to)
                .into_iter()
                .rev()
                .map(|(k, f)| (k, !f))
                .collect();
            cycle.push((i, false));
            cycle.extend(path_to_root(e.from));
            out.push(cycle);
        }
        out
    }
}

/// Net factor picked up by a Haar measure transported around a closed walk.
pub fn holonomy(diagram: &Diagram, cycle: &[Step]) -> Result<PositiveReal> {
    let Some(first) = cycle.first() else {
        return Ok(PositiveReal::one());
    };
    let start = diagram.endpoints(*first)?.0;
    let mut at = start;
    let mut out = PositiveReal::one();
    for (i, step) in cycle.iter().enumerate() {
        let (from, to) = diagram.endpoints(*step)?;
        if from != at {
            bail!(
                Domain,
                "walk breaks at step {i}: at vertex {at}, edge starts at {from}"
            );
        }
        let m = diagram.edges[step.0].morphism.module()?;
        out = if step.1 { out.mul(&m) } else { out.div(&m) };
        at = to;
    }
    if at != start {
        bail!(Domain, "walk ends at vertex {at}, not at its start {start}");
    }
    Ok(out)
}
