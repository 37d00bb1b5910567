//! Farey-tree trace recursion.
//!
//! Around a Farey edge with end traces `a`, `b`, the two opposite vertices have
//! traces `s`, `d` with `s + d = ab` and `s·d = a² + b² − κ`. The larger of the
//! two is computed from the sum, the smaller from the product, so no step ever
//! subtracts two nearly equal numbers.
//!
//! Every slope other than `0/1` and `1/0` is the mediant node of exactly one of
//! two trees: the positive quadrant (between `0/1` and `1/0`) and the negative
//! quadrant (between `1/0` and `0/-1`).

use crate::error::{Error, Result};
use crate::exec::Exec;

use super::holonomy::TraceTriple;
use super::slope::Slope;

pub(crate) type V = (i128, i128);

fn add(a: V, b: V) -> V {
    (a.0 + b.0, a.1 + b.1)
}

fn cross(a: V, b: V) -> i128 {
    a.0 * b.1 - a.1 * b.0
}

/// Trace of the vertex across the edge `(a, b)` from the vertex with trace `d`.
#[inline]
pub(crate) fn other_root(a: f64, b: f64, d: f64, kappa: f64) -> f64 {
    let s = a * b - d;
    if s >= d {
        s
    } else {
        (a * a + b * b - kappa) / d
    }
}

/// A Farey edge `(l, r)` with the trace `td` of the vertex `l − r` beneath it.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Node {
    pub l: V,
    pub r: V,
    pub tl: f64,
    pub tr: f64,
    pub td: f64,
    pub depth: u32,
}

impl Node {
    pub fn mediant(&self, kappa: f64) -> (V, f64) {
        (add(self.l, self.r), other_root(self.tl, self.tr, self.td, kappa))
    }

    pub fn children(&self, m: V, tm: f64) -> [Node; 2] {
        [
            Node { l: self.l, r: m, tl: self.tl, tr: tm, td: self.tr, depth: self.depth + 1 },
            Node { l: m, r: self.r, tl: tm, tr: self.tr, td: self.tl, depth: self.depth + 1 },
        ]
    }
}

/// Roots of the two quadrant trees, at depth 1.
pub(crate) fn roots(t: &TraceTriple, kappa: f64) -> [Node; 2] {
    let w = other_root(t.x, t.y, t.z, kappa);
    [
        Node { l: (0, 1), r: (1, 0), tl: t.x, tr: t.y, td: w, depth: 1 },
        Node { l: (1, 0), r: (0, -1), tl: t.y, tr: t.x, td: t.z, depth: 1 },
    ]
}

/// Trace of an arbitrary primitive vector by descent through the tree.
pub(crate) fn trace_of(t: &TraceTriple, kappa: f64, v: V) -> f64 {
    let (mut p, mut q) = v;
    if q < 0 || (q == 0 && p < 0) {
        (p, q) = (-p, -q);
    }
    if p == 0 {
        return t.x;
    }
    if q == 0 {
        return t.y;
    }
    let [pos, neg] = roots(t, kappa);
    let (mut node, target) = if p > 0 { (pos, (p, q)) } else { (neg, (-p, -q)) };
    loop {
        let (m, tm) = node.mediant(kappa);
        let c = cross(m, target);
        if c == 0 {
            return tm;
        }
        let [left, right] = node.children(m, tm);
        node = if c > 0 { left } else { right };
    }
}

/// `ln` of the vertex across `(a, b)` from `d`, all arguments as logarithms.
fn other_root_log(la: f64, lb: f64, ld: f64, kappa: f64) -> f64 {
    if la.max(lb).max(ld) < 300.0 {
        return other_root(la.exp(), lb.exp(), ld.exp(), kappa).ln();
    }
    let r = (ld - la - lb).exp();
    if r <= 0.5 {
        la + lb + (-r).ln_1p()
    } else {
        let hi = la.max(lb);
        let lo = la.min(lb);
        let sq = 2.0 * hi + (-2.0 * (hi - lo)).exp().ln_1p() + (-kappa * (-2.0 * hi).exp()).ln_1p();
        sq - ld
    }
}

/// `ln` of the trace of a primitive vector; never overflows.
pub(crate) fn log_trace_of(t: &TraceTriple, kappa: f64, v: V) -> f64 {
    let (mut p, mut q) = v;
    if q < 0 || (q == 0 && p < 0) {
        (p, q) = (-p, -q);
    }
    if p == 0 {
        return t.x.ln();
    }
    if q == 0 {
        return t.y.ln();
    }
    let [pos, neg] = roots(t, kappa);
    let (node, target) = if p > 0 { (pos, (p, q)) } else { (neg, (-p, -q)) };
    let (mut l, mut r) = (node.l, node.r);
    let (mut tl, mut tr, mut td) = (node.tl.ln(), node.tr.ln(), node.td.ln());
    loop {
        let m = add(l, r);
        let tm = other_root_log(tl, tr, td, kappa);
        let c = cross(m, target);
        if c == 0 {
            return tm;
        }
        if c > 0 {
            (td, r, tr) = (tr, m, tm);
        } else {
            (td, l, tl) = (tl, m, tm);
        }
    }
}

/// Length `2 arccosh(t/2)` from `ln t`, accurate for huge traces.
pub(crate) fn length_from_log_trace(lt: f64) -> f64 {
    if lt < 20.0 {
        return 2.0 * (lt.exp() / 2.0).acosh();
    }
    let e = (-2.0 * lt).exp();
    2.0 * (lt + ((1.0 + (1.0 - 4.0 * e).sqrt()) / 2.0).ln())
}

/// Trace of a slope; `0/1` returns `x` exactly.
pub fn slope_trace(t: &TraceTriple, kappa: f64, s: Slope) -> f64 {
    trace_of(t, kappa, s.vec())
}

/// All slopes with trace at most `bound`, in no particular order.
///
/// A branch is cut when its mediant is at least the vertex beneath it (the
/// traces then only grow along the branch) and already exceeds the bound.
pub(crate) fn collect_below(
    t: &TraceTriple,
    kappa: f64,
    bound: f64,
    cap: usize,
    exec: Exec,
) -> Result<Vec<(Slope, f64)>> {
    let mut out = Vec::new();
    for (v, tv) in [((0, 1), t.x), ((1, 0), t.y)] {
        if tv <= bound {
            out.push((Slope::from_vec_unchecked(v.0, v.1), tv));
        }
    }
    // Breadth-first until there are enough independent subtrees to spread.
    let mut frontier: Vec<Node> = roots(t, kappa).to_vec();
    while !frontier.is_empty() && frontier.len() < 64 {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for node in frontier {
            expand(&node, kappa, bound, &mut out, &mut next);
        }
        if out.len() > cap {
            return Err(Error::BudgetExceeded { cap });
        }
        frontier = next;
    }
    let parts = exec.map_slice(&frontier, |root| {
        let mut found = Vec::new();
        let mut stack = vec![*root];
        while let Some(node) = stack.pop() {
            expand(&node, kappa, bound, &mut found, &mut stack);
            if found.len() > cap {
                return Err(Error::BudgetExceeded { cap });
            }
        }
        Ok(found)
    });
    for part in parts {
        out.extend(part?);
        if out.len() > cap {
            return Err(Error::BudgetExceeded { cap });
        }
    }
    Ok(out)
}

#[inline]
fn expand(node: &Node, kappa: f64, bound: f64, found: &mut Vec<(Slope, f64)>, next: &mut Vec<Node>) {
    let (m, tm) = node.mediant(kappa);
    if tm <= bound {
        found.push((Slope::from_vec_unchecked(m.0, m.1), tm));
    } else if tm >= node.td {
        return;
    }
    next.extend(node.children(m, tm));
}

/// Visits every slope of Farey depth at most `depth` for several trace
/// triples in lockstep; `f` receives the slope and one trace per triple.
pub(crate) fn visit_depth(triples: &[(TraceTriple, f64)], depth: u32, mut f: impl FnMut(Slope, &[f64])) {
    let mut buf: Vec<f64> = triples.iter().map(|(t, _)| t.x).collect();
    f(Slope::FN, &buf);
    buf = triples.iter().map(|(t, _)| t.y).collect();
    f(Slope::DUAL, &buf);
    if depth == 0 {
        return;
    }
    for which in 0..2 {
        let mut stack: Vec<Vec<Node>> = vec![triples.iter().map(|(t, k)| roots(t, *k)[which]).collect()];
        while let Some(nodes) = stack.pop() {
            let mut m = (0, 0);
            let mut children: [Vec<Node>; 2] = [Vec::new(), Vec::new()];
            for (node, (_, kappa)) in nodes.iter().zip(triples) {
                let (mv, tm) = node.mediant(*kappa);
                m = mv;
                let [a, b] = node.children(mv, tm);
                children[0].push(a);
                children[1].push(b);
            }
            let traces: Vec<f64> = children[0].iter().map(|c| c.tr).collect();
            f(Slope::from_vec_unchecked(m.0, m.1), &traces);
            if nodes[0].depth < depth {
                let [a, b] = children;
                stack.push(b);
                stack.push(a);
            }
        }
    }
}
