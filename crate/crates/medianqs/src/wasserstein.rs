//! W1 and W-infinity distances between finitely supported measures on the
//! sphere, with the Euclidean chordal ground metric.
//!
//! `w_one` is an exact transportation simplex; `w_infinity` binary-searches
//! the sorted pairwise distances for the smallest feasible coupling
//! threshold, testing feasibility by max flow. Both canonicalize argument
//! order first, so distances are exactly symmetric. `verify_theorem2` checks
//! the 1-Lipschitz continuity of node-supported median quasi-states against
//! `pl_lip_bound * w_infinity`.

use rand::Rng;

use crate::field::ScalarField;
use crate::median::weighted_median;
use crate::reeb::ReebTree;
use crate::sphere::{euclidean_dist, UnitPoint};
use crate::triangulation::IcosaTriangulation;
use crate::{Error, Result};

/// Finitely supported probability measure.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    atoms: Vec<(UnitPoint, f64)>,
}

impl DiscreteMeasure {
    /// Validates positive weights summing to 1 and distinct atom points.
    pub fn new(atoms: Vec<(UnitPoint, f64)>) -> Result<DiscreteMeasure> {
        if atoms.is_empty() {
            return Err(Error::Parameter("a measure needs at least one atom".into()));
        }
        let mut sum = 0.0;
        for (_, w) in &atoms {
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::Parameter(format!("atom weight {w} must be positive")));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("weights sum to {sum}, not 1")));
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if atoms[i].0.as_array() == atoms[j].0.as_array() {
                    return Err(Error::Parameter(format!("atoms {i} and {j} coincide")));
                }
            }
        }
        Ok(DiscreteMeasure { atoms })
    }

    pub fn dirac(p: UnitPoint) -> DiscreteMeasure {
        DiscreteMeasure { atoms: vec![(p, 1.0)] }
    }

    pub fn atoms(&self) -> &[(UnitPoint, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total order used to canonicalize argument pairs.
    fn canonical_key(&self) -> Vec<(u64, u64, u64, u64)> {
        self.atoms
            .iter()
            .map(|(p, w)| {
                let a = p.as_array();
                (a[0].to_bits(), a[1].to_bits(), a[2].to_bits(), w.to_bits())
            })
            .collect()
    }
}

fn canonical_pair<'a>(
    mu: &'a DiscreteMeasure,
    nu: &'a DiscreteMeasure,
) -> (&'a DiscreteMeasure, &'a DiscreteMeasure) {
    if mu.canonical_key() <= nu.canonical_key() {
        (mu, nu)
    } else {
        (nu, mu)
    }
}

/// Sparse measure supported on triangulation vertices.
#[derive(Clone, Debug)]
pub struct NodeMeasure {
    entries: Vec<(u32, f64)>,
}

impl NodeMeasure {
    /// Validates distinct vertices and positive weights summing to 1.
    pub fn new(mut entries: Vec<(u32, f64)>) -> Result<NodeMeasure> {
        if entries.is_empty() {
            return Err(Error::Parameter("a measure needs at least one atom".into()));
        }
        entries.sort_unstable_by_key(|&(v, _)| v);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Parameter("duplicate vertex in node measure".into()));
        }
        let sum: f64 = entries.iter().map(|&(_, w)| w).sum();
        if entries.iter().any(|&(_, w)| !w.is_finite() || w <= 0.0) {
            return Err(Error::Parameter("node weights must be positive".into()));
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("node weights sum to {sum}, not 1")));
        }
        Ok(NodeMeasure { entries })
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    /// Dense weight vector over `n` nodes.
    pub fn dense(&self, n: usize) -> Result<Vec<f64>> {
        let mut w = vec![0.0; n];
        for &(v, x) in &self.entries {
            if v as usize >= n {
                return Err(Error::Parameter(format!("vertex {v} beyond {n} nodes")));
            }
            w[v as usize] = x;
        }
        Ok(w)
    }

    /// The same measure with atoms at the vertex positions.
    pub fn to_discrete(&self, tri: &IcosaTriangulation) -> Result<DiscreteMeasure> {
        let atoms = self
            .entries
            .iter()
            .map(|&(v, w)| {
                if (v as usize) < tri.vertex_count() {
                    Ok((*tri.point(v as usize), w))
                } else {
                    Err(Error::Parameter(format!("vertex {v} not in the triangulation")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteMeasure::new(atoms)
    }
}

/// Random node-supported measure whose weights are integers over an odd
/// total, keeping 1/2 out of every subset-sum spectrum.
pub fn random_node_measure<R: Rng>(
    rng: &mut R,
    n_vertices: usize,
    max_support: usize,
) -> NodeMeasure {
    let s = rng.gen_range(1..=max_support.min(n_vertices));
    let mut ids = std::collections::BTreeSet::new();
    while ids.len() < s {
        ids.insert(rng.gen_range(0..n_vertices) as u32);
    }
    let mut ints: Vec<u64> = (0..s).map(|_| rng.gen_range(1..=20)).collect();
    if ints.iter().sum::<u64>() % 2 == 0 {
        ints[0] += 1;
    }
    let total = ints.iter().sum::<u64>() as f64;
    let entries = ids
        .into_iter()
        .zip(ints)
        .map(|(v, i)| (v, i as f64 / total))
        .collect();
    NodeMeasure::new(entries).expect("construction keeps the invariants")
}

/// Largest closed-region diameter; the W-infinity discretization bound.
pub fn partition_w_infinity_bound(diameters: &[f64]) -> Result<f64> {
    if diameters.is_empty() {
        return Err(Error::Parameter("no diameters given".into()));
    }
    Ok(diameters.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
}

/// Exact bottleneck distance: the smallest pairwise distance threshold that
/// admits a feasible coupling.
pub fn w_infinity(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let (mu, nu) = canonical_pair(mu, nu);
    let (m, n) = (mu.len(), nu.len());
    let mut dist = vec![0.0f64; m * n];
    for (i, (p, _)) in mu.atoms().iter().enumerate() {
        for (j, (q, _)) in nu.atoms().iter().enumerate() {
            dist[i * n + j] = euclidean_dist(p, q);
        }
    }
    let mut thresholds = dist.clone();
    thresholds.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();

    let feasible = |t: f64| -> bool {
        let mut flow = MaxFlow::new(m + n + 2);
        let (source, sink) = (m + n, m + n + 1);
        for (i, (_, w)) in mu.atoms().iter().enumerate() {
            flow.add_edge(source, i, *w);
        }
        for (j, (_, w)) in nu.atoms().iter().enumerate() {
            flow.add_edge(m + j, sink, *w);
        }
        for i in 0..m {
            for j in 0..n {
                if dist[i * n + j] <= t {
                    flow.add_edge(i, m + j, f64::INFINITY);
                }
            }
        }
        flow.max_flow(source, sink) >= 1.0 - 1e-9
    };

    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    if !feasible(thresholds[hi]) {
        // The complete bipartite graph always admits the product coupling.
        return thresholds[hi];
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(thresholds[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    thresholds[lo]
}

/// Exact optimal transport cost by the transportation simplex.
pub fn w_one(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    let (mu, nu) = canonical_pair(mu, nu);
    let (m, n) = (mu.len(), nu.len());
    if m + n > 10_000 {
        return Err(Error::Resource(format!(
            "transport instance with {m} + {n} atoms exceeds the desk-scale cap 10000"
        )));
    }
    let a: Vec<f64> = mu.atoms().iter().map(|&(_, w)| w).collect();
    let b: Vec<f64> = nu.atoms().iter().map(|&(_, w)| w).collect();
    let mut cost = vec![0.0f64; m * n];
    for (i, (p, _)) in mu.atoms().iter().enumerate() {
        for (j, (q, _)) in nu.atoms().iter().enumerate() {
            cost[i * n + j] = euclidean_dist(p, q);
        }
    }
    transport_simplex(&a, &b, &cost)
}

/// Theorem-2 check for node-supported measures: returns
/// `(|zeta_mu(F) - zeta_nu(F)|, pl_lip_bound * w_infinity(mu, nu))`.
pub fn verify_theorem2(
    field: &ScalarField,
    tree: &ReebTree,
    mu: &NodeMeasure,
    nu: &NodeMeasure,
) -> Result<(f64, f64)> {
    let n = tree.node_count();
    let zeta_mu = field.value(weighted_median(tree, &mu.dense(n)?)?);
    let zeta_nu = field.value(weighted_median(tree, &nu.dense(n)?)?);
    let tri = field.triangulation();
    let w = w_infinity(&mu.to_discrete(tri)?, &nu.to_discrete(tri)?);
    Ok(((zeta_mu - zeta_nu).abs(), field.pl_lip_bound() * w))
}

struct FlowEdge {
    to: u32,
    rev: u32,
    cap: f64,
}

/// Dinic maximum flow on f64 capacities; residuals below 1e-15 count as dead.
struct MaxFlow {
    graph: Vec<Vec<FlowEdge>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

const FLOW_EPS: f64 = 1e-15;

impl MaxFlow {
    fn new(n: usize) -> MaxFlow {
        MaxFlow {
            graph: (0..n).map(|_| Vec::new()).collect(),
            level: vec![-1; n],
            iter: vec![0; n],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: f64) {
        let rev = self.graph[to].len() as u32;
        self.graph[from].push(FlowEdge { to: to as u32, rev, cap });
        let rev_back = self.graph[from].len() as u32 - 1;
        self.graph[to].push(FlowEdge { to: from as u32, rev: rev_back, cap: 0.0 });
    }

    fn bfs(&mut self, source: usize, sink: usize) -> bool {
        self.level.fill(-1);
        self.level[source] = 0;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for e in &self.graph[v] {
                if e.cap > FLOW_EPS && self.level[e.to as usize] < 0 {
                    self.level[e.to as usize] = self.level[v] + 1;
                    queue.push_back(e.to as usize);
                }
            }
        }
        self.level[sink] >= 0
    }

    fn dfs(&mut self, v: usize, sink: usize, limit: f64) -> f64 {
        if v == sink {
            return limit;
        }
        while self.iter[v] < self.graph[v].len() {
            let (to, cap) = {
                let e = &self.graph[v][self.iter[v]];
                (e.to as usize, e.cap)
            };
            if cap > FLOW_EPS && self.level[v] < self.level[to] {
                let pushed = self.dfs(to, sink, limit.min(cap));
                if pushed > FLOW_EPS {
                    let rev = {
                        let e = &mut self.graph[v][self.iter[v]];
                        e.cap -= pushed;
                        e.rev as usize
                    };
                    self.graph[to][rev].cap += pushed;
                    return pushed;
                }
            }
            self.iter[v] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, source: usize, sink: usize) -> f64 {
        let mut total = 0.0;
        while self.bfs(source, sink) {
            self.iter.fill(0);
            loop {
                let pushed = self.dfs(source, sink, f64::INFINITY);
                if pushed <= FLOW_EPS {
                    break;
                }
                total += pushed;
            }
        }
        total
    }
}

/// Primal transportation simplex with a northwest-corner start, first
/// improving entering cell, and first minimal leaving cell.
fn transport_simplex(a: &[f64], b: &[f64], cost: &[f64]) -> Result<f64> {
    let (m, n) = (a.len(), b.len());
    let at = |i: usize, j: usize| cost[i * n + j];

    // Northwest corner: m + n - 1 basic cells including degenerate zeros.
    let mut flow: Vec<f64> = vec![0.0; m * n];
    let mut basic = vec![false; m * n];
    let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); m];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); n];
    {
        let mut ra = a.to_vec();
        let mut rb = b.to_vec();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let x = ra[i].min(rb[j]);
            flow[i * n + j] = x;
            basic[i * n + j] = true;
            row_cols[i].push(j as u32);
            col_rows[j].push(i as u32);
            ra[i] -= x;
            rb[j] -= x;
            if i == m - 1 && j == n - 1 {
                break;
            }
            // The subtraction is exact for the smaller side, so a spent row
            // is exactly zero; ties advance the row and leave a degenerate
            // zero cell at the head of the next one.
            if j == n - 1 || (i < m - 1 && ra[i] == 0.0) {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    let max_iter = 10_000 + 100 * (m + n);
    for _ in 0..max_iter {
        // Duals from the basis spanning tree, u[0] = 0.
        let mut u = vec![f64::NAN; m];
        let mut v = vec![f64::NAN; n];
        u[0] = 0.0;
        let mut stack: Vec<(bool, usize)> = vec![(true, 0)];
        while let Some((is_row, x)) = stack.pop() {
            if is_row {
                for &c in &row_cols[x] {
                    if v[c as usize].is_nan() {
                        v[c as usize] = at(x, c as usize) - u[x];
                        stack.push((false, c as usize));
                    }
                }
            } else {
                for &r in &col_rows[x] {
                    if u[r as usize].is_nan() {
                        u[r as usize] = at(r as usize, x) - v[x];
                        stack.push((true, r as usize));
                    }
                }
            }
        }
        if u.iter().any(|x| x.is_nan()) || v.iter().any(|x| x.is_nan()) {
            return Err(Error::Invariant("transport basis is not spanning".into()));
        }

        // First improving entering cell in row-major order.
        let mut entering = None;
        'scan: for i in 0..m {
            for j in 0..n {
                if !basic[i * n + j] && at(i, j) - u[i] - v[j] < -1e-12 {
                    entering = Some((i, j));
                    break 'scan;
                }
            }
        }
        let (ei, ej) = match entering {
            Some(c) => c,
            None => {
                let total = (0..m * n).map(|x| flow[x] * cost[x]).sum();
                return Ok(total);
            }
        };

        // Unique basis path from row ei to column ej; the entering cell
        // closes it into a cycle with alternating signs.
        let path = basis_path(ei, ej, &row_cols, &col_rows)
            .ok_or_else(|| Error::Invariant("no basis path for entering cell".into()))?;
        // path = [cells] alternating (row-shared, col-shared, ...) relative
        // to the entering cell; odd positions gain flow, even positions lose.
        let mut theta = f64::INFINITY;
        let mut leave = usize::MAX;
        for (pos, &(r, c)) in path.iter().enumerate() {
            if pos % 2 == 0 && flow[r as usize * n + c as usize] < theta {
                theta = flow[r as usize * n + c as usize];
                leave = pos;
            }
        }
        flow[ei * n + ej] += theta;
        for (pos, &(r, c)) in path.iter().enumerate() {
            let idx = r as usize * n + c as usize;
            if pos % 2 == 0 {
                flow[idx] -= theta;
            } else {
                flow[idx] += theta;
            }
        }
        // Swap leaving and entering cells in the basis structures.
        let (lr, lc) = path[leave];
        basic[lr as usize * n + lc as usize] = false;
        flow[lr as usize * n + lc as usize] = 0.0;
        row_cols[lr as usize].retain(|&c| c != lc);
        col_rows[lc as usize].retain(|&r| r != lr);
        basic[ei * n + ej] = true;
        row_cols[ei].push(ej as u32);
        col_rows[ej].push(ei as u32);
    }
    Err(Error::Invariant(format!(
        "transportation simplex did not converge in {max_iter} pivots"
    )))
}

/// Alternating path of basic cells from row `start_row` to column `end_col`,
/// beginning with a cell in `start_row`.
fn basis_path(
    start_row: usize,
    end_col: usize,
    row_cols: &[Vec<u32>],
    col_rows: &[Vec<u32>],
) -> Option<Vec<(u32, u32)>> {
    // DFS over the bipartite basis tree; nodes are rows and columns.
    let mut stack: Vec<(bool, usize, usize)> = vec![(true, start_row, usize::MAX)];
    let mut prev: std::collections::HashMap<(bool, usize), (bool, usize)> = Default::default();
    while let Some((is_row, x, from)) = stack.pop() {
        if !is_row && x == end_col {
            // Rebuild the cell path walking back to the start row.
            let mut cells = Vec::new();
            let mut cur = (false, x);
            while let Some(&p) = prev.get(&cur) {
                let (r, c) = if cur.0 { (cur.1, p.1) } else { (p.1, cur.1) };
                cells.push((r as u32, c as u32));
                cur = p;
            }
            cells.reverse();
            return Some(cells);
        }
        if is_row {
            for &c in &row_cols[x] {
                if from == usize::MAX || c as usize != from {
                    prev.insert((false, c as usize), (true, x));
                    stack.push((false, c as usize, x));
                }
            }
        } else {
            for &r in &col_rows[x] {
                if r as usize != from {
                    prev.insert((true, r as usize), (false, x));
                    stack.push((true, r as usize, x));
                }
            }
        }
    }
    None
}
