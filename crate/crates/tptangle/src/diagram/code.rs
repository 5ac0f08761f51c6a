//! Canonical codes for torus diagrams.
//!
//! Vertex offsets `o(v)` are fixed by the traversal itself: the first time a vertex is
//! reached, its offset is chosen so that the arc just walked gets wrap zero. Every other
//! arc is reported with its normalized wrap `w + o(head) - o(tail)`. Minimizing over all
//! roots gives a string independent of labels, roots, and vertex slides across the edges.

use super::{Event, TorusDiagram};
use std::collections::VecDeque;

/// Empty diagrams all share this code.
pub const EMPTY_CODE: &str = "EMPTY";

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
enum Vertex {
    C(usize),
    N(usize),
}

fn vertex(e: Event) -> Vertex {
    match e {
        Event::Pass { c, .. } => Vertex::C(c),
        Event::N { n } => Vertex::N(n),
    }
}

/// Components grouped into connected pieces of the crossing graph.
fn pieces(d: &TorusDiagram) -> Vec<Vec<usize>> {
    let n = d.components.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for c in &d.crossings {
        let a = find(&mut parent, c.passes[0].0);
        let b = find(&mut parent, c.passes[1].0);
        parent[a.max(b)] = a.min(b);
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

fn traverse(d: &TorusDiagram, comp: usize, start: usize) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut label: std::collections::HashMap<usize, usize> = Default::default();
    let mut offset: std::collections::HashMap<Vertex, [i64; 2]> = Default::default();
    let mut seen = vec![false; d.components.len()];
    let mut queue = VecDeque::from([(comp, start)]);
    seen[comp] = true;
    offset.insert(vertex(d.components[comp].events[start]), [0, 0]);
    while let Some((ci, entry)) = queue.pop_front() {
        let c = &d.components[ci];
        let len = c.events.len();
        tokens.push("(".to_string());
        for i in 0..len {
            let j = (entry + i) % len;
            let ev = c.events[j];
            match ev {
                Event::Pass { c: x, slot } => {
                    let cr = &d.crossings[x];
                    let ou = if cr.over == slot { 'o' } else { 'u' };
                    if let Some(l) = label.get(&x) {
                        tokens.push(format!("X{l}{ou}"));
                    } else {
                        let l = label.len();
                        label.insert(x, l);
                        // handedness relative to the pass seen first
                        let rel = if slot == 0 { cr.ccw } else { !cr.ccw };
                        tokens.push(format!("X{l}{ou}{}", if rel { '+' } else { '-' }));
                        let other = cr.passes[1 - slot as usize];
                        if !seen[other.0] {
                            seen[other.0] = true;
                            queue.push_back(other);
                        }
                    }
                }
                Event::N { n } => {
                    tokens.push(if d.npoints[n].ascending { "N+".into() } else { "N-".into() });
                }
            }
            let tail = offset[&vertex(ev)];
            let w = c.wraps[j];
            let head_v = vertex(c.events[(j + 1) % len]);
            let head = *offset.entry(head_v).or_insert([tail[0] - w[0], tail[1] - w[1]]);
            tokens.push(format!("{},{}", w[0] + head[0] - tail[0], w[1] + head[1] - tail[1]));
        }
        tokens.push(")".to_string());
    }
    tokens
}

/// Canonical string of the combinatorial diagram (layout ignored).
pub fn canonical_code(d: &TorusDiagram) -> String {
    if d.components.is_empty() && d.free_loops.is_empty() {
        return EMPTY_CODE.to_string();
    }
    let mut parts: Vec<String> = pieces(d)
        .into_iter()
        .map(|group| {
            let mut best: Option<Vec<String>> = None;
            for &ci in &group {
                for e in 0..d.components[ci].events.len() {
                    let t = traverse(d, ci, e);
                    if best.as_ref().map_or(true, |b| t < *b) {
                        best = Some(t);
                    }
                }
            }
            best.unwrap().join(" ")
        })
        .collect();
    parts.sort();
    let mut loops: Vec<[i64; 2]> = d.free_loops.iter().map(|f| f.homology).collect();
    loops.sort();
    parts.extend(loops.iter().map(|h| format!("L{},{}", h[0], h[1])));
    parts.join(" | ")
}
