//! Marking, subtree counting, median selection, and the full pipeline.
//!
//! One vertex is marked in the open interior of each partition region; the
//! median node of the contour tree is the deepest node whose subtree holds at
//! least `(k + 1) / 2` marks. The field value there approximates the median
//! quasi-state with the certified bound
//! `lip * (sqrt(3)(3 - sqrt(5))/N + 7 pi (13 + 6 sqrt(5))/11 / sqrt(k))`.

use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::function::InputFunction;
use crate::partition::EqualAreaPartition;
use crate::reeb::{build_reeb, ReebTree};
use crate::triangulation::IcosaTriangulation;
use crate::{Error, Result, K_DENSITY_COEFF, MAX_N, MIN_N};

/// One marked vertex per partition region.
#[derive(Clone, Debug)]
pub struct MarkedVertexSet {
    marks: Vec<bool>,
    marked: Vec<u32>,
}

impl MarkedVertexSet {
    /// Wraps explicit flags; used by tree-level tests and tools.
    pub fn from_flags(marks: Vec<bool>) -> MarkedVertexSet {
        let marked = marks
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b)
            .map(|(i, _)| i as u32)
            .collect();
        MarkedVertexSet { marks, marked }
    }

    /// Per-vertex mark flags.
    pub fn marks(&self) -> &[bool] {
        &self.marks
    }

    /// Marked vertex ids ascending.
    pub fn marked_vertices(&self) -> &[u32] {
        &self.marked
    }

    pub fn marked_count(&self) -> usize {
        self.marked.len()
    }

    pub fn is_marked(&self, v: usize) -> bool {
        self.marks[v]
    }
}

/// Result of a full pipeline run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuasiStateResult {
    pub value: f64,
    pub error_bound: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub k: u32,
    pub lip_bound: f64,
    pub median_node: u32,
}

/// Certified bound on `|zeta(f) - value|` for Lipschitz constant `lip_bound`.
pub fn certified_error_bound(lip_bound: f64, n: u32, k: u32) -> f64 {
    lip_bound * (crate::tri_diameter_coeff() / n as f64 + crate::partition_term_coeff() / (k as f64).sqrt())
}

/// Largest odd region count admissible at depth `n`.
pub fn largest_odd_k(n: u32) -> u32 {
    let mut k = (K_DENSITY_COEFF * n as f64 * n as f64).floor() as u32;
    if k % 2 == 0 {
        k -= 1;
    }
    k
}

/// Smallest `(N, k)` whose certified bound is at most `epsilon`.
pub fn select_parameters(epsilon: f64, lip_bound: f64) -> Result<(u32, u32)> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::Parameter(format!("epsilon = {epsilon} must be positive")));
    }
    if !lip_bound.is_finite() || lip_bound < 0.0 {
        return Err(Error::Parameter(format!(
            "lip_bound = {lip_bound} must be finite and >= 0"
        )));
    }
    for n in MIN_N..=MAX_N {
        let k = largest_odd_k(n);
        if certified_error_bound(lip_bound, n, k) <= epsilon {
            return Ok((n, k));
        }
    }
    // At full region density both bound terms scale like 1/N.
    let per_n = crate::tri_diameter_coeff() + crate::partition_term_coeff() / K_DENSITY_COEFF.sqrt();
    let required = (lip_bound * per_n / epsilon).ceil();
    Err(Error::Resource(format!(
        "epsilon = {epsilon} needs subdivision depth N of about {required:.0}, beyond the cap {MAX_N}"
    )))
}

/// Marks the first vertex interior to each region, in vertex index order.
pub fn mark_vertices(
    tri: &IcosaTriangulation,
    partition: &EqualAreaPartition,
) -> Result<MarkedVertexSet> {
    let n = tri.n();
    let k = partition.k();
    if n < MIN_N {
        return Err(Error::Parameter(format!("N = {n} is below the minimum {MIN_N}")));
    }
    if k as f64 > K_DENSITY_COEFF * n as f64 * n as f64 {
        return Err(Error::Parameter(format!(
            "k = {k} exceeds the density cap {K_DENSITY_COEFF} * N^2 at N = {n}"
        )));
    }
    // Flat region index, band-major.
    let bands = partition.interior_bands() + 2;
    let mut offsets = vec![0u32; bands as usize + 1];
    for b in 0..bands {
        offsets[b as usize + 1] = offsets[b as usize] + partition.sectors_in_band(b);
    }
    debug_assert_eq!(offsets[bands as usize], k);

    let mut flags = vec![false; k as usize];
    let mut marks = vec![false; tri.vertex_count()];
    let mut marked = Vec::with_capacity(k as usize);
    for v in 0..tri.vertex_count() {
        let p = tri.point(v);
        let id = partition.locate(p);
        let idx = (offsets[id.band as usize] + id.sector - 1) as usize;
        if flags[idx] || !partition.strictly_inside(id, p) {
            continue;
        }
        flags[idx] = true;
        marks[v] = true;
        marked.push(v as u32);
    }
    if marked.len() != k as usize {
        return Err(Error::Invariant(format!(
            "{} of {} regions have no interior vertex",
            k as usize - marked.len(),
            k
        )));
    }
    Ok(MarkedVertexSet { marks, marked })
}

/// Subtree mark counts `t_v` by a descendants-first traversal.
pub fn count_pass(tree: &ReebTree, marks: &MarkedVertexSet) -> Result<Vec<u32>> {
    if marks.marks().len() != tree.node_count() {
        return Err(Error::Parameter(format!(
            "{} marks for {} tree nodes",
            marks.marks().len(),
            tree.node_count()
        )));
    }
    let mut counts = vec![0u32; tree.node_count()];
    for &v in &tree.descendants_first() {
        let mut t = u32::from(marks.is_marked(v as usize));
        for &c in tree.children(v as usize) {
            t += counts[c as usize];
        }
        counts[v as usize] = t;
    }
    Ok(counts)
}

/// Deepest node whose subtree count reaches `(k + 1) / 2`.
pub fn find_median(tree: &ReebTree, counts: &[u32], k: u32) -> Result<usize> {
    if k % 2 == 0 {
        return Err(Error::Parameter(format!("k = {k} must be odd")));
    }
    if counts.len() != tree.node_count() {
        return Err(Error::Parameter(format!(
            "{} counts for {} tree nodes",
            counts.len(),
            tree.node_count()
        )));
    }
    if counts[tree.root()] != k {
        return Err(Error::Invariant(format!(
            "root count {} does not equal k = {k}",
            counts[tree.root()]
        )));
    }
    let threshold = (k + 1) / 2;
    let mut best: Option<(u32, usize)> = None;
    let mut tied = false;
    for v in 0..tree.node_count() {
        if counts[v] < threshold {
            continue;
        }
        let d = tree.depth(v);
        match best {
            Some((bd, _)) if d < bd => {}
            Some((bd, _)) if d == bd => tied = true,
            _ => {
                best = Some((d, v));
                tied = false;
            }
        }
    }
    match best {
        Some((_, v)) if !tied => Ok(v),
        Some(_) => Err(Error::Invariant(
            "two median candidates at equal depth".into(),
        )),
        None => Err(Error::Invariant("no node reaches the median count".into())),
    }
}

/// Median for real node weights: the unique node all of whose complement
/// components carry mass at most 1/2. Errors if any complement mass is within
/// 1e-9 of 1/2 (the measure's spectrum contains 1/2).
pub fn weighted_median(tree: &ReebTree, weights: &[f64]) -> Result<usize> {
    const HALF_TOL: f64 = 1e-9;
    let n = tree.node_count();
    if weights.len() != n {
        return Err(Error::Parameter(format!("{} weights for {n} nodes", weights.len())));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::Parameter("weights must be finite and >= 0".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter(format!("weights sum to {total}, not 1")));
    }
    let mut subtree = vec![0.0f64; n];
    for &v in &tree.descendants_first() {
        let mut t = weights[v as usize];
        for &c in tree.children(v as usize) {
            t += subtree[c as usize];
        }
        subtree[v as usize] = t;
    }
    // Complement components of any node are child subtrees and the co-subtree,
    // so the achievable component masses are exactly {t_v, 1 - t_v}.
    for v in 0..n {
        if v != tree.root() && (subtree[v] - 0.5).abs() <= HALF_TOL {
            return Err(Error::Parameter(format!(
                "mass 1/2 in the spectrum: subtree of node {v} weighs {}",
                subtree[v]
            )));
        }
    }
    let mut found: Option<usize> = None;
    for v in 0..n {
        let mut worst: f64 = if v == tree.root() { 0.0 } else { 1.0 - subtree[v] };
        for &c in tree.children(v) {
            worst = worst.max(subtree[c as usize]);
        }
        if worst <= 0.5 {
            if found.is_some() {
                return Err(Error::Invariant("two weighted median nodes".into()));
            }
            found = Some(v);
        }
    }
    found.ok_or_else(|| Error::Invariant("no weighted median node".into()))
}

/// Runs the full pipeline and returns the certified result.
pub fn compute(f: &InputFunction, n: u32, k: u32) -> Result<QuasiStateResult> {
    if n > MAX_N {
        return Err(Error::Resource(format!("N = {n} exceeds the cap {MAX_N}")));
    }
    let partition = crate::partition::build_partition(k)?;
    let tri = crate::triangulation::build_triangulation(n)?;
    let field = ScalarField::sample(&tri, f)?;
    let tree = build_reeb(&field)?;
    let marks = mark_vertices(&tri, &partition)?;
    let counts = count_pass(&tree, &marks)?;
    let median = find_median(&tree, &counts, k)?;
    Ok(QuasiStateResult {
        value: field.value(median),
        error_bound: certified_error_bound(field.lip_bound(), n, k),
        n,
        k,
        lip_bound: field.lip_bound(),
        median_node: median as u32,
    })
}

/// Aarnes integral formula evaluated on the step indicator; must reproduce
/// the median value up to summation rounding.
pub fn integral_oracle(field: &ScalarField, tree: &ReebTree, median_node: usize) -> f64 {
    let mut levels: Vec<f64> = field.values().to_vec();
    levels.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();
    let min = levels[0];
    let mut integral = 0.0;
    for w in levels.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        integral += crate::reeb::superlevel_component_indicator(tree, mid, median_node) * (w[1] - w[0]);
    }
    min + integral
}
