//! Tree constants: one positive number per vertex, computed two independent
//! ways and tied together by the Matrix-Tree theorem.
//!
//! For a strongly connected linkage class, the constant of vertex `i` is the
//! sum, over all spanning trees oriented toward `i` (every non-root vertex
//! keeps exactly one outgoing edge and every path leads to the root), of the
//! product of the edge rates. The same number is `(-1)^(m_c - 1)` times the
//! determinant of the Laplacian-type block with row and column `i` removed,
//! and the assembled vector spans the kernel of `A_k` class by class.

use crate::error::{Error, Result};
use crate::mass_action::MassActionSystem;
use crate::network::ReactionNetwork;

/// Hard cap on the class size accepted by explicit tree enumeration.
pub const MAX_ENUMERATION_CLASS: usize = 12;

/// One strictly positive Matrix-Tree constant per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeConstants(Vec<f64>);

impl TreeConstants {
    /// Wrap an externally supplied constants vector, e.g. to drive the
    /// log-linear system with hand-picked values.
    #[cfg(test)]
    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        TreeConstants(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl serde::Serialize for TreeConstants {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

/// Vertices of `class` reachable from `start` following edges forward
/// (`forward = true`) or backward.
fn reachable_within(
    net: &ReactionNetwork,
    class: &[usize],
    start: usize,
    forward: bool,
) -> Vec<usize> {
    let in_class = |v: usize| class.contains(&v);
    let mut seen = vec![start];
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(src, dst) in net.edges() {
            let (from, to) = if forward { (src, dst) } else { (dst, src) };
            if from == v && in_class(to) && !seen.contains(&to) {
                seen.push(to);
                stack.push(to);
            }
        }
    }
    seen
}

/// Determinant of the Laplacian-block minor of a class with `removed`
/// deleted, normalized so the result is the tree constant itself
/// (no sign factor: the elimination runs on the negated block).
///
/// The minor is a column-diagonally-dominant M-matrix whose columns sum to
/// the rate flowing from each kept vertex to the removed one, so its LU
/// pivots can be accumulated from strictly positive additions: each step
/// eliminates one vertex, redistributes its outflow onto the survivors, and
/// recomputes the pivot from the column-sum defect instead of subtracting.
/// This keeps the determinant accurate to a few ulps even when the rates
/// span many orders of magnitude; a pivoted LU would lose exactly the
/// digits the tree-constant identities are tested to.
#[allow(clippy::needless_range_loop)]
fn minor_determinant(net: &ReactionNetwork, rates: &[f64], class: &[usize], removed: usize) -> f64 {
    let kept: Vec<usize> = class.iter().copied().filter(|&v| v != removed).collect();
    let p = kept.len();
    let local = |v: usize| kept.iter().position(|&w| w == v);
    // flow[i][j]: accumulated rate from kept[j] to kept[i];
    // defect[j]: accumulated rate from kept[j] to the removed vertex.
    let mut flow = vec![vec![0.0; p]; p];
    let mut defect = vec![0.0; p];
    for (e, &(src, dst)) in net.edges().iter().enumerate() {
        let Some(j) = local(src) else { continue };
        if dst == removed {
            defect[j] += rates[e];
        } else if let Some(i) = local(dst) {
            flow[i][j] += rates[e];
        }
    }
    let mut det = 1.0;
    for s in 0..p {
        let pivot = defect[s] + (s + 1..p).map(|i| flow[i][s]).sum::<f64>();
        if pivot <= 0.0 {
            return 0.0;
        }
        det *= pivot;
        for j in s + 1..p {
            let scale = flow[s][j] / pivot;
            if scale == 0.0 {
                continue;
            }
            defect[j] += scale * defect[s];
            for i in s + 1..p {
                if i != j {
                    flow[i][j] += scale * flow[i][s];
                }
            }
        }
    }
    det
}

/// Tree constants from determinants of the per-class Laplacian minors.
///
/// Each linkage class must be strongly connected; a class that is not has a
/// structurally zero minor determinant for some vertex and is rejected.
pub fn tree_constants_minor(sys: &MassActionSystem) -> Result<TreeConstants> {
    let net = sys.net();
    let rates = sys.rates().as_slice();
    let mut constants = vec![0.0; net.complex_count()];
    for class in net.linkage_classes().classes() {
        let m_c = class.len();
        if m_c == 1 {
            constants[class[0]] = 1.0;
            continue;
        }
        if reachable_within(net, &class, class[0], true).len() != m_c
            || reachable_within(net, &class, class[0], false).len() != m_c
        {
            return Err(Error::NotStronglyConnected { vertex: class[0] });
        }
        for &vertex in &class {
            let k = minor_determinant(net, rates, &class, vertex);
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::NotStronglyConnected { vertex });
            }
            constants[vertex] = k;
        }
    }
    Ok(TreeConstants(constants))
}

/// All spanning trees of the root's linkage class oriented toward the root,
/// as lists of global edge indices. Every non-root vertex of the class keeps
/// exactly one outgoing edge and every vertex reaches the root.
pub fn enumerate_in_trees(net: &ReactionNetwork, root: usize) -> Result<Vec<Vec<usize>>> {
    let decomposition = net.linkage_classes();
    let class_id = decomposition.component_id()[root];
    let class: Vec<usize> = decomposition.classes().swap_remove(class_id);
    let m_c = class.len();
    if m_c > MAX_ENUMERATION_CLASS {
        return Err(Error::ClassTooLarge {
            vertex: root,
            size: m_c,
            limit: MAX_ENUMERATION_CLASS,
        });
    }
    let reaching = reachable_within(net, &class, root, false);
    if let Some(&stranded) = class.iter().find(|v| !reaching.contains(v)) {
        return Err(Error::UnreachableRoot {
            vertex: stranded,
            root,
        });
    }
    if m_c == 1 {
        return Ok(vec![Vec::new()]);
    }

    // Local vertex ids; the root is excluded from the assignment order.
    let local_of = |v: usize| class.iter().position(|&w| w == v).expect("vertex in class");
    let root_local = local_of(root);
    let mut out_edges = vec![Vec::new(); m_c];
    for (e, &(src, dst)) in net.edges().iter().enumerate() {
        if class.contains(&src) && class.contains(&dst) {
            out_edges[local_of(src)].push((e, local_of(dst)));
        }
    }
    let order: Vec<usize> = (0..m_c).filter(|&v| v != root_local).collect();

    let mut trees = Vec::new();
    let mut parent = vec![usize::MAX; m_c];
    let mut chosen = Vec::with_capacity(m_c - 1);
    backtrack(
        &order,
        0,
        root_local,
        &out_edges,
        &mut parent,
        &mut chosen,
        &mut trees,
    );
    Ok(trees)
}

fn backtrack(
    order: &[usize],
    depth: usize,
    root: usize,
    out_edges: &[Vec<(usize, usize)>],
    parent: &mut Vec<usize>,
    chosen: &mut Vec<usize>,
    trees: &mut Vec<Vec<usize>>,
) {
    if depth == order.len() {
        trees.push(chosen.clone());
        return;
    }
    let v = order[depth];
    for &(edge, target) in &out_edges[v] {
        // Following parents from the new target must not loop back to v.
        let mut cursor = target;
        let mut cyclic = false;
        while cursor != root && parent[cursor] != usize::MAX {
            if cursor == v {
                cyclic = true;
                break;
            }
            cursor = parent[cursor];
        }
        if cyclic || cursor == v {
            continue;
        }
        parent[v] = target;
        chosen.push(edge);
        backtrack(order, depth + 1, root, out_edges, parent, chosen, trees);
        chosen.pop();
        parent[v] = usize::MAX;
    }
}

/// Tree constants by explicit enumeration: the sum over in-trees of the
/// product of edge rates. Independent of the determinant route.
pub fn tree_constants_enum(sys: &MassActionSystem) -> Result<TreeConstants> {
    let net = sys.net();
    let rates = sys.rates().as_slice();
    let mut constants = vec![0.0; net.complex_count()];
    for (root, constant) in constants.iter_mut().enumerate() {
        let trees = enumerate_in_trees(net, root)?;
        *constant = trees
            .iter()
            .map(|tree| tree.iter().map(|&e| rates[e]).product::<f64>())
            .sum();
    }
    Ok(TreeConstants(constants))
}
