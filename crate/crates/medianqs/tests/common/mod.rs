//! Brute-force oracles shared by the integration suites. Everything here is
//! deliberately naive: independent constructions to check the fast paths
//! against, with no code shared with the library internals.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use medianqs::sphere::euclidean_dist;
use medianqs::triangulation::IcosaTriangulation;
use medianqs::wasserstein::DiscreteMeasure;

/// Collapsed contour tree by level-set flood fill, one gap at a time.
///
/// For each gap between consecutive vertices of the total order, the level
/// set is a union of closed curves; each curve is recovered as a connected
/// set of crossing mesh edges (two per crossing face). Curves in consecutive
/// gaps that share a crossing edge one-to-one continue the same tree edge;
/// every other event pins the curve to the transition vertex, which becomes
/// a tree node. Returns sorted node ids and sorted `(min, max)` edges.
pub fn contour_tree_oracle(
    tri: &IcosaTriangulation,
    order: &[u32],
) -> (Vec<u32>, Vec<(u32, u32)>) {
    let n = order.len();
    assert!(n >= 2, "a field needs at least two vertices");
    let mut pos = vec![0u32; n];
    for (r, &v) in order.iter().enumerate() {
        pos[v as usize] = r as u32;
    }

    let mut mesh_edges: Vec<(u32, u32)> = Vec::new();
    for v in 0..n {
        for &u in tri.neighbors(v) {
            if (v as u32) < u {
                mesh_edges.push((v as u32, u));
            }
        }
    }
    let edge_id: HashMap<(u32, u32), u32> = mesh_edges
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i as u32))
        .collect();

    // comp[g - 1]: crossing edge id -> curve representative at gap g, where
    // gap g separates ranks < g from ranks >= g.
    let mut comp: Vec<HashMap<u32, u32>> = Vec::with_capacity(n - 1);
    for g in 1..n {
        let low = |v: u32| pos[v as usize] < g as u32;
        let crossing = |&(a, b): &(u32, u32)| low(a) != low(b);
        let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
        for f in tri.faces() {
            let mut ids: Vec<u32> = Vec::with_capacity(2);
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                let key = (a.min(b), a.max(b));
                if crossing(&key) {
                    ids.push(edge_id[&key]);
                }
            }
            assert!(ids.len() == 0 || ids.len() == 2, "a face crosses a level 0 or 2 times");
            if ids.len() == 2 {
                adj.entry(ids[0]).or_default().push(ids[1]);
                adj.entry(ids[1]).or_default().push(ids[0]);
            }
        }
        let mut labels: HashMap<u32, u32> = HashMap::new();
        let mut ids: Vec<u32> = adj.keys().copied().collect();
        ids.sort_unstable();
        for &start in &ids {
            if labels.contains_key(&start) {
                continue;
            }
            let mut stack = vec![start];
            labels.insert(start, start);
            while let Some(e) = stack.pop() {
                for &f in &adj[&e] {
                    if !labels.contains_key(&f) {
                        labels.insert(f, start);
                        stack.push(f);
                    }
                }
            }
        }
        comp.push(labels);
    }

    // Curve instances, indexed by (gap, representative).
    let mut instance: HashMap<(usize, u32), usize> = HashMap::new();
    let mut parent: Vec<usize> = Vec::new();
    let mut bottom: Vec<Option<u32>> = Vec::new();
    let mut top: Vec<Option<u32>> = Vec::new();
    for (gi, labels) in comp.iter().enumerate() {
        for &rep in labels.values() {
            instance.entry((gi + 1, rep)).or_insert_with(|| {
                parent.push(parent.len());
                bottom.push(None);
                top.push(None);
                parent.len() - 1
            });
        }
    }
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    // Transitions between gap g and gap g + 1 happen at vertex order[g].
    for g in 1..n - 1 {
        let w = order[g];
        let below = &comp[g - 1];
        let above = &comp[g];
        let mut up_partners: HashMap<u32, BTreeSet<u32>> = HashMap::new();
        let mut down_partners: HashMap<u32, BTreeSet<u32>> = HashMap::new();
        for (&e, &rb) in below {
            if let Some(&ra) = above.get(&e) {
                up_partners.entry(rb).or_default().insert(ra);
                down_partners.entry(ra).or_default().insert(rb);
            }
        }
        let reps_below: BTreeSet<u32> = below.values().copied().collect();
        let reps_above: BTreeSet<u32> = above.values().copied().collect();
        for &rb in &reps_below {
            let glue = match up_partners.get(&rb) {
                Some(ups) if ups.len() == 1 => {
                    let ra = *ups.iter().next().unwrap();
                    down_partners[&ra].len() == 1
                }
                _ => false,
            };
            let ib = instance[&(g, rb)];
            if glue {
                let ra = *up_partners[&rb].iter().next().unwrap();
                let ia = instance[&(g + 1, ra)];
                let (x, y) = (find(&mut parent, ib), find(&mut parent, ia));
                parent[x] = y;
            } else {
                top[find(&mut parent, ib)] = Some(w);
            }
        }
        for &ra in &reps_above {
            let glued = match down_partners.get(&ra) {
                Some(downs) if downs.len() == 1 => {
                    let rb = *downs.iter().next().unwrap();
                    up_partners[&rb].len() == 1
                }
                _ => false,
            };
            if !glued {
                let ia = instance[&(g + 1, ra)];
                bottom[find(&mut parent, ia)] = Some(w);
            }
        }
    }
    let first: BTreeSet<u32> = comp[0].values().copied().collect();
    for &rep in &first {
        let i = instance[&(1, rep)];
        bottom[find(&mut parent, i)] = Some(order[0]);
    }
    let last: BTreeSet<u32> = comp[n - 2].values().copied().collect();
    for &rep in &last {
        let i = instance[&(n - 1, rep)];
        top[find(&mut parent, i)] = Some(order[n - 1]);
    }

    // Attachments were always written onto the current chain root, so after
    // full compression each chain root carries exactly one of each.
    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut nodes: BTreeSet<u32> = BTreeSet::new();
    let mut chain_ends: BTreeMap<usize, (Option<u32>, Option<u32>)> = BTreeMap::new();
    for i in 0..parent.len() {
        let r = find(&mut parent, i);
        let entry = chain_ends.entry(r).or_insert((None, None));
        if let Some(b) = bottom[i] {
            assert!(entry.0.is_none(), "two lower attachments on one chain");
            entry.0 = Some(b);
        }
        if let Some(t) = top[i] {
            assert!(entry.1.is_none(), "two upper attachments on one chain");
            entry.1 = Some(t);
        }
    }
    for (_, (b, t)) in chain_ends {
        let (b, t) = (b.expect("chain without a lower end"), t.expect("chain without an upper end"));
        nodes.insert(b);
        nodes.insert(t);
        edges.insert((b.min(t), b.max(t)));
    }
    (nodes.into_iter().collect(), edges.into_iter().collect())
}

/// Exact W1 by enumerating every basic solution of the transportation LP.
pub fn w_one_oracle(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let (m, n) = (mu.len(), nu.len());
    let a: Vec<f64> = mu.atoms().iter().map(|&(_, w)| w).collect();
    let b: Vec<f64> = nu.atoms().iter().map(|&(_, w)| w).collect();
    let cost: Vec<f64> = (0..m * n)
        .map(|x| euclidean_dist(&mu.atoms()[x / n].0, &nu.atoms()[x % n].0))
        .collect();
    let edges: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let need = m + n - 1;
    let mut pick: Vec<usize> = (0..need).collect();
    let mut best = f64::INFINITY;
    loop {
        if let Some(c) = tree_flow_cost(&pick, &edges, &a, &b, &cost, n) {
            best = best.min(c);
        }
        let mut idx = need;
        loop {
            if idx == 0 {
                return best;
            }
            idx -= 1;
            if pick[idx] != edges.len() - need + idx {
                break;
            }
        }
        pick[idx] += 1;
        for t in idx + 1..need {
            pick[t] = pick[t - 1] + 1;
        }
    }
}

/// Cost of the basic solution on the chosen edges, if they span feasibly.
fn tree_flow_cost(
    pick: &[usize],
    edges: &[(usize, usize)],
    a: &[f64],
    b: &[f64],
    cost: &[f64],
    n: usize,
) -> Option<f64> {
    let m = a.len();
    let mut uf: Vec<usize> = (0..m + n).collect();
    fn find(uf: &mut Vec<usize>, mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let mut deg = vec![0usize; m + n];
    for &e in pick {
        let (i, j) = edges[e];
        let (ri, rj) = (find(&mut uf, i), find(&mut uf, m + j));
        if ri == rj {
            return None;
        }
        uf[ri] = rj;
        deg[i] += 1;
        deg[m + j] += 1;
    }
    let mut remaining: Vec<f64> = a.iter().chain(b.iter()).cloned().collect();
    let mut alive: Vec<bool> = vec![true; pick.len()];
    let cells: Vec<(usize, usize)> = pick.iter().map(|&e| edges[e]).collect();
    let mut total = 0.0;
    for _ in 0..pick.len() {
        for (t, &(i, j)) in cells.iter().enumerate() {
            if !alive[t] {
                continue;
            }
            let (leaf, supply) = if deg[i] == 1 {
                (i, remaining[i])
            } else if deg[m + j] == 1 {
                (m + j, remaining[m + j])
            } else {
                continue;
            };
            if supply < -1e-12 {
                return None;
            }
            total += supply * cost[i * n + j];
            remaining[i] -= supply;
            remaining[m + j] -= supply;
            remaining[leaf] = 0.0;
            deg[i] -= 1;
            deg[m + j] -= 1;
            alive[t] = false;
            break;
        }
    }
    Some(total)
}

/// Exact bottleneck distance by checking Hall's condition on every subset.
pub fn w_infinity_oracle(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let (m, n) = (mu.len(), nu.len());
    assert!(m <= 12, "subset enumeration is exponential in the left support");
    let mut dists: Vec<f64> = Vec::new();
    for (p, _) in mu.atoms() {
        for (q, _) in nu.atoms() {
            dists.push(euclidean_dist(p, q));
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dists.dedup();
    'outer: for &t in &dists {
        for mask in 0..(1u32 << m) {
            let mut mass = 0.0;
            let mut covered = vec![false; n];
            for i in 0..m {
                if mask >> i & 1 == 1 {
                    mass += mu.atoms()[i].1;
                    for j in 0..n {
                        if euclidean_dist(&mu.atoms()[i].0, &nu.atoms()[j].0) <= t {
                            covered[j] = true;
                        }
                    }
                }
            }
            let reach: f64 = (0..n).filter(|&j| covered[j]).map(|j| nu.atoms()[j].1).sum();
            if mass > reach + 1e-12 {
                continue 'outer;
            }
        }
        return t;
    }
    unreachable!("the largest threshold admits the independent coupling");
}

/// Weighted tree median by deleting each node in turn: the unique node whose
/// removal leaves every component with at most `(k - 1) / 2` marks.
pub fn median_by_component_masses(parents: &[Option<u32>], marks: &[bool]) -> usize {
    let n = parents.len();
    let k: usize = marks.iter().filter(|&&m| m).count();
    assert!(k % 2 == 1, "the mark count must be odd");
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, p) in parents.iter().enumerate() {
        if let Some(p) = p {
            adj[v].push(*p as usize);
            adj[*p as usize].push(v);
        }
    }
    let mut winners = Vec::new();
    for v in 0..n {
        let mut seen = vec![false; n];
        seen[v] = true;
        let mut ok = true;
        for &start in &adj[v] {
            if seen[start] {
                continue;
            }
            let mut mass = 0usize;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(x) = stack.pop() {
                mass += usize::from(marks[x]);
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            if mass > (k - 1) / 2 {
                ok = false;
                break;
            }
        }
        if ok {
            winners.push(v);
        }
    }
    assert_eq!(winners.len(), 1, "the weighted median of a tree is unique for odd mass");
    winners[0]
}
