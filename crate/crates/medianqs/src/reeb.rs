//! Contour tree of a piecewise linear field, rooted at the global minimum.
//!
//! On the sphere the Reeb graph of a PL field is a tree, computed here by the
//! classic join-tree/split-tree sweep with a disjoint-set structure followed
//! by the leaf-plucking merge. All vertices are kept as nodes; regular ones
//! appear with degree 2 and can be collapsed away for inspection. Ties are
//! broken by vertex index, so no numeric perturbation is applied anywhere.

use std::collections::VecDeque;

use crate::field::ScalarField;
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

/// Rooted contour tree with one node per triangulation vertex.
#[derive(Clone, Debug)]
pub struct ReebTree {
    root: u32,
    parent: Vec<u32>,
    child_offsets: Vec<u32>,
    child_list: Vec<u32>,
    depth: Vec<u32>,
    values: Vec<f64>,
}

/// Collapsed view: degree-2 nodes removed, original node ids kept.
#[derive(Clone, Debug)]
pub struct CollapsedReeb {
    /// Kept node ids, ascending.
    pub nodes: Vec<u32>,
    /// Field value per kept node, parallel to `nodes`.
    pub values: Vec<f64>,
    /// Degree per kept node in the collapsed tree, parallel to `nodes`.
    pub degrees: Vec<u32>,
    /// Edges between kept node ids.
    pub edges: Vec<(u32, u32)>,
}

impl ReebTree {
    /// Builds a tree from per-node parents (exactly one `None` root) and values.
    pub fn from_parents(parents: &[Option<u32>], values: Vec<f64>) -> Result<ReebTree> {
        let n = parents.len();
        if n == 0 {
            return Err(Error::Parameter("a tree needs at least one node".into()));
        }
        if values.len() != n {
            return Err(Error::Parameter(format!(
                "{} values for {} nodes",
                values.len(),
                n
            )));
        }
        let mut root = NONE;
        let mut counts = vec![0u32; n];
        for (v, p) in parents.iter().enumerate() {
            match p {
                None => {
                    if root != NONE {
                        return Err(Error::Invariant("more than one root".into()));
                    }
                    root = v as u32;
                }
                Some(p) => {
                    if *p as usize >= n || *p as usize == v {
                        return Err(Error::Invariant(format!("bad parent {p} of node {v}")));
                    }
                    counts[*p as usize] += 1;
                }
            }
        }
        if root == NONE {
            return Err(Error::Invariant("no root".into()));
        }
        let mut child_offsets = vec![0u32; n + 1];
        for v in 0..n {
            child_offsets[v + 1] = child_offsets[v] + counts[v];
        }
        let mut cursor: Vec<u32> = child_offsets[..n].to_vec();
        let mut child_list = vec![0u32; n - 1];
        let mut parent = vec![NONE; n];
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = p {
                parent[v] = *p;
                child_list[cursor[*p as usize] as usize] = v as u32;
                cursor[*p as usize] += 1;
            }
        }
        let tree = ReebTree {
            root,
            parent,
            child_offsets,
            child_list,
            depth: vec![0; n],
            values,
        };
        tree.with_depths()
    }

    fn with_depths(mut self) -> Result<ReebTree> {
        let n = self.parent.len();
        let mut depth = vec![NONE; n];
        depth[self.root as usize] = 0;
        let mut stack = vec![self.root];
        let mut seen = 1usize;
        while let Some(v) = stack.pop() {
            let d = depth[v as usize] + 1;
            for &c in self.children(v as usize) {
                depth[c as usize] = d;
                seen += 1;
                stack.push(c);
            }
        }
        if seen != n {
            return Err(Error::Invariant(format!(
                "tree is not connected: reached {seen} of {n} nodes"
            )));
        }
        self.depth = depth;
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root as usize
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            NONE => None,
            p => Some(p as usize),
        }
    }

    pub fn children(&self, v: usize) -> &[u32] {
        &self.child_list[self.child_offsets[v] as usize..self.child_offsets[v + 1] as usize]
    }

    pub fn depth(&self, v: usize) -> u32 {
        self.depth[v]
    }

    pub fn value(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Undirected degree of a node.
    pub fn degree(&self, v: usize) -> usize {
        self.children(v).len() + usize::from(v != self.root as usize)
    }

    /// Node order in which every node appears after all of its descendants.
    pub fn descendants_first(&self) -> Vec<u32> {
        let mut pre = Vec::with_capacity(self.node_count());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            pre.push(v);
            stack.extend_from_slice(self.children(v as usize));
        }
        pre.reverse();
        pre
    }

    /// Removes degree-2 nodes; the root is always kept as the basepoint.
    pub fn collapsed(&self) -> CollapsedReeb {
        let n = self.node_count();
        let keep = |v: usize| v == self.root as usize || self.degree(v) != 2;
        let mut nodes: Vec<u32> = (0..n as u32).filter(|&v| keep(v as usize)).collect();
        nodes.sort_unstable();
        let mut edges = Vec::new();
        for &u in &nodes {
            for &c in self.children(u as usize) {
                let mut w = c;
                while !keep(w as usize) {
                    w = self.children(w as usize)[0];
                }
                edges.push((u, w));
            }
        }
        let mut degrees = vec![0u32; nodes.len()];
        let index_of = |id: u32| nodes.binary_search(&id).unwrap();
        for &(a, b) in &edges {
            degrees[index_of(a)] += 1;
            degrees[index_of(b)] += 1;
        }
        CollapsedReeb {
            values: nodes.iter().map(|&v| self.values[v as usize]).collect(),
            degrees,
            nodes,
            edges,
        }
    }
}

/// Builds the contour tree of the field, rooted at the global minimum.
pub fn build_reeb(field: &ScalarField) -> Result<ReebTree> {
    let tri = field.triangulation();
    let order = field.order();
    let n = order.len();
    let neighbors = |v: usize| tri.neighbors(v);

    let jp = sweep_tree(&order, n, &neighbors);
    let rev: Vec<u32> = order.iter().rev().copied().collect();
    let sp = sweep_tree(&rev, n, &neighbors);

    let edges = contour_merge(jp, sp)?;

    // Orient from the global minimum.
    let mut adj_counts = vec![0u32; n];
    for &(a, b) in &edges {
        adj_counts[a as usize] += 1;
        adj_counts[b as usize] += 1;
    }
    let mut offsets = vec![0u32; n + 1];
    for v in 0..n {
        offsets[v + 1] = offsets[v] + adj_counts[v];
    }
    let mut cursor: Vec<u32> = offsets[..n].to_vec();
    let mut adj = vec![0u32; 2 * edges.len()];
    for &(a, b) in &edges {
        adj[cursor[a as usize] as usize] = b;
        cursor[a as usize] += 1;
        adj[cursor[b as usize] as usize] = a;
        cursor[b as usize] += 1;
    }
    let root = order[0];
    let mut parents: Vec<Option<u32>> = vec![Some(NONE); n];
    parents[root as usize] = None;
    let mut queue = VecDeque::from([root]);
    let mut visited = vec![false; n];
    visited[root as usize] = true;
    while let Some(v) = queue.pop_front() {
        for &u in &adj[offsets[v as usize] as usize..offsets[v as usize + 1] as usize] {
            if !visited[u as usize] {
                visited[u as usize] = true;
                parents[u as usize] = Some(v);
                queue.push_back(u);
            }
        }
    }
    ReebTree::from_parents(&parents, field.values().to_vec())
}

/// Superlevel-set membership of the median's component: 1 iff `value(median) >= s`.
pub fn superlevel_component_indicator(tree: &ReebTree, s: f64, median_node: usize) -> f64 {
    if tree.value(median_node) >= s {
        1.0
    } else {
        0.0
    }
}

/// One sweep in the given order; returns for each vertex the vertex at which
/// its swept component merges into a later one (`NONE` for the last vertex).
fn sweep_tree<'a, F>(order: &[u32], n: usize, neighbors: &F) -> Vec<u32>
where
    F: Fn(usize) -> &'a [u32],
{
    let mut pos = vec![0u32; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v as usize] = i as u32;
    }
    let mut uf: Vec<u32> = (0..n as u32).collect();
    let mut top: Vec<u32> = (0..n as u32).collect();
    let mut tparent = vec![NONE; n];
    fn find(uf: &mut [u32], mut x: u32) -> u32 {
        while uf[x as usize] != x {
            uf[x as usize] = uf[uf[x as usize] as usize];
            x = uf[x as usize];
        }
        x
    }
    for (i, &v) in order.iter().enumerate() {
        for &u in neighbors(v as usize) {
            if (pos[u as usize] as usize) < i {
                let ru = find(&mut uf, u);
                let rv = find(&mut uf, v);
                if ru != rv {
                    tparent[top[ru as usize] as usize] = v;
                    uf[ru as usize] = rv;
                    top[rv as usize] = v;
                }
            }
        }
    }
    tparent
}

/// Carr-Snoeyink-Axen leaf plucking: merges the join and split trees into the
/// undirected contour tree edge set.
fn contour_merge(jp: Vec<u32>, sp: Vec<u32>) -> Result<Vec<(u32, u32)>> {
    let n = jp.len();
    let mut jp = jp;
    let mut sp = sp;
    let mut jchildren: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut schildren: Vec<Vec<u32>> = vec![Vec::new(); n];
    for v in 0..n {
        if jp[v] != NONE {
            jchildren[jp[v] as usize].push(v as u32);
        }
        if sp[v] != NONE {
            schildren[sp[v] as usize].push(v as u32);
        }
    }
    let is_lower = |jc: &[Vec<u32>], sc: &[Vec<u32>], v: usize| {
        jc[v].is_empty() && sc[v].len() <= 1
    };
    let is_upper = |jc: &[Vec<u32>], sc: &[Vec<u32>], v: usize| {
        sc[v].is_empty() && jc[v].len() <= 1
    };

    let mut queue: VecDeque<u32> = (0..n as u32)
        .filter(|&v| {
            is_lower(&jchildren, &schildren, v as usize)
                || is_upper(&jchildren, &schildren, v as usize)
        })
        .collect();
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n.saturating_sub(1));

    while remaining > 1 {
        let v = match queue.pop_front() {
            Some(v) => v as usize,
            None => {
                return Err(Error::Invariant(
                    "contour merge stalled: no leaf available".into(),
                ))
            }
        };
        if !alive[v] {
            continue;
        }
        let (this_p, this_c, other_p, other_c);
        if is_lower(&jchildren, &schildren, v) && jp[v] != NONE {
            (this_p, this_c) = (&mut jp, &mut jchildren);
            (other_p, other_c) = (&mut sp, &mut schildren);
        } else if is_upper(&jchildren, &schildren, v) && sp[v] != NONE {
            (this_p, this_c) = (&mut sp, &mut schildren);
            (other_p, other_c) = (&mut jp, &mut jchildren);
        } else if is_lower(&jchildren, &schildren, v) || is_upper(&jchildren, &schildren, v) {
            return Err(Error::Invariant(
                "contour merge stalled: leaf with no attachment".into(),
            ));
        } else {
            // Stale queue entry.
            continue;
        }

        // v is a leaf of `this` tree and has at most one child in `other`.
        let w = this_p[v];
        edges.push((v as u32, w));
        let wc = &mut this_c[w as usize];
        let at = wc.iter().position(|&x| x == v as u32).unwrap();
        wc.swap_remove(at);

        let spliced = other_c[v].first().copied();
        let op = other_p[v];
        match spliced {
            Some(c) => {
                other_p[c as usize] = op;
                if op != NONE {
                    let oc = &mut other_c[op as usize];
                    let at = oc.iter().position(|&x| x == v as u32).unwrap();
                    oc[at] = c;
                }
            }
            None => {
                if op != NONE {
                    let oc = &mut other_c[op as usize];
                    let at = oc.iter().position(|&x| x == v as u32).unwrap();
                    oc.swap_remove(at);
                }
            }
        }
        alive[v] = false;
        remaining -= 1;

        for cand in [Some(w), spliced, if op == NONE { None } else { Some(op) }]
            .into_iter()
            .flatten()
        {
            let c = cand as usize;
            if alive[c]
                && (is_lower(&jchildren, &schildren, c) || is_upper(&jchildren, &schildren, c))
            {
                queue.push_back(cand);
            }
        }
    }
    if edges.len() != n - 1 {
        return Err(Error::Invariant(format!(
            "contour merge produced {} edges for {} nodes",
            edges.len(),
            n
        )));
    }
    Ok(edges)
}
