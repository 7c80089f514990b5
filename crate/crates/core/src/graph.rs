//! Cubic ribbon graphs.
//!
//! A graph here is a trivalent multigraph with a cyclic (counterclockwise)
//! order of half-edges at every vertex, plus a number of free loops
//! (circles with no vertex). Self-loops and parallel edges are allowed.
//!
//! The text format has one item per line, `#` starts a comment:
//!
//! ```text
//! vertex u: a1 b1 c1      # three half-edge labels in ccw order
//! edge a: a1 a2           # the two half-edge labels of edge a
//! freeloop L
//! ```
//!
//! Every half-edge label must occur exactly once in a vertex line and
//! exactly once in an edge line. Edge order of declaration fixes the
//! coloring order; free loops are colored after all edges.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};

/// Dense half-edge index; half-edge `3v + k` sits at vertex `v`, slot `k`.
pub type HalfEdge = usize;

#[derive(Clone, Debug)]
pub struct Graph {
    verts: Vec<[HalfEdge; 3]>,
    edges: Vec<[HalfEdge; 2]>,
    /// half-edge -> (edge index, end 0 or 1)
    on: Vec<(usize, u8)>,
    pub vert_names: Vec<String>,
    pub edge_names: Vec<String>,
    pub loop_names: Vec<String>,
}

impl Graph {
    // ==================== construction ====================

    /// Build from labeled pieces. Vertex slots are half-edge labels in ccw
    /// order; each edge names its first and second half-edge.
    pub fn build(
        verts: &[(&str, [&str; 3])],
        edges: &[(&str, &str, &str)],
        loops: &[&str],
    ) -> Result<Graph> {
        let mut half_ids: HashMap<String, HalfEdge> = HashMap::new();
        let mut vert_names = Vec::new();
        let mut vslots = Vec::new();
        for (name, slots) in verts {
            vert_names.push(name.to_string());
            vslots.push(*slots);
        }
        // half-edge ids are positional: slot k of vertex v gets id 3v+k
        let mut vert_arrays = Vec::with_capacity(vslots.len());
        for (v, slots) in vslots.iter().enumerate() {
            let mut arr = [0usize; 3];
            for (k, lbl) in slots.iter().enumerate() {
                let h = 3 * v + k;
                if half_ids.insert(lbl.to_string(), h).is_some() {
                    return Err(Error::Parse(format!(
                        "half-edge {lbl} occurs twice in vertex lines"
                    )));
                }
                arr[k] = h;
            }
            vert_arrays.push(arr);
        }
        let mut on = vec![(usize::MAX, 0u8); 3 * vert_arrays.len()];
        let mut edge_names = Vec::new();
        let mut edge_arrays = Vec::new();
        for (name, l1, l2) in edges {
            let h1 = *half_ids
                .get(*l1)
                .ok_or_else(|| Error::Parse(format!("edge {name}: unknown half-edge {l1}")))?;
            let h2 = *half_ids
                .get(*l2)
                .ok_or_else(|| Error::Parse(format!("edge {name}: unknown half-edge {l2}")))?;
            if h1 == h2 {
                return Err(Error::Parse(format!(
                    "edge {name} uses the same half-edge twice"
                )));
            }
            for (end, h) in [(0u8, h1), (1u8, h2)] {
                if on[h].0 != usize::MAX {
                    return Err(Error::Parse(format!(
                        "half-edge of edge {name} already used by another edge"
                    )));
                }
                on[h] = (edge_arrays.len(), end);
            }
            edge_names.push(name.to_string());
            edge_arrays.push([h1, h2]);
        }
        if let Some(h) = on.iter().position(|&(e, _)| e == usize::MAX) {
            let (v, k) = (h / 3, h % 3);
            return Err(Error::Parse(format!(
                "half-edge at vertex {} slot {k} belongs to no edge",
                vert_names[v]
            )));
        }
        let mut loop_names_v = Vec::new();
        for l in loops {
            loop_names_v.push(l.to_string());
        }
        Ok(Graph {
            verts: vert_arrays,
            edges: edge_arrays,
            on,
            vert_names,
            edge_names,
            loop_names: loop_names_v,
        })
    }

    /// Parse the line-based text format.
    pub fn parse(text: &str) -> Result<Graph> {
        let mut verts: Vec<(String, [String; 3])> = Vec::new();
        let mut edges: Vec<(String, String, String)> = Vec::new();
        let mut loops: Vec<String> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let name = |t: &str| t.trim_end_matches(':').to_string();
            match toks[0] {
                "vertex" => {
                    if toks.len() != 5 {
                        return Err(Error::Parse(format!(
                            "line {}: vertex needs a name and 3 half-edges",
                            ln + 1
                        )));
                    }
                    verts.push((
                        name(toks[1]),
                        [toks[2].into(), toks[3].into(), toks[4].into()],
                    ));
                }
                "edge" => {
                    if toks.len() != 4 {
                        return Err(Error::Parse(format!(
                            "line {}: edge needs a name and 2 half-edges",
                            ln + 1
                        )));
                    }
                    edges.push((name(toks[1]), toks[2].into(), toks[3].into()));
                }
                "freeloop" => {
                    if toks.len() != 2 {
                        return Err(Error::Parse(format!(
                            "line {}: freeloop needs a name",
                            ln + 1
                        )));
                    }
                    loops.push(name(toks[1]));
                }
                kw => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown keyword {kw}",
                        ln + 1
                    )));
                }
            }
        }
        let vr: Vec<(&str, [&str; 3])> = verts
            .iter()
            .map(|(n, s)| (n.as_str(), [s[0].as_str(), s[1].as_str(), s[2].as_str()]))
            .collect();
        let er: Vec<(&str, &str, &str)> = edges
            .iter()
            .map(|(n, a, b)| (n.as_str(), a.as_str(), b.as_str()))
            .collect();
        let lr: Vec<&str> = loops.iter().map(|s| s.as_str()).collect();
        Graph::build(&vr, &er, &lr)
    }

    /// Parse a coloring for this graph: one `<edge-or-loop-name> <color>`
    /// per line. Every edge and free loop must be colored exactly once.
    pub fn parse_coloring(&self, text: &str) -> Result<Vec<u32>> {
        let mut idx: HashMap<&str, usize> = HashMap::new();
        for (i, n) in self.edge_names.iter().enumerate() {
            idx.insert(n.as_str(), i);
        }
        for (i, n) in self.loop_names.iter().enumerate() {
            idx.insert(n.as_str(), self.ne() + i);
        }
        let mut colors: Vec<Option<u32>> = vec![None; self.ncolors()];
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::Parse(format!(
                    "coloring line {}: expected `<name> <color>`",
                    ln + 1
                )));
            }
            let &i = idx.get(toks[0]).ok_or_else(|| {
                Error::Parse(format!(
                    "coloring line {}: unknown edge {}",
                    ln + 1,
                    toks[0]
                ))
            })?;
            let c: u32 = toks[1]
                .parse()
                .map_err(|_| Error::Parse(format!("coloring line {}: bad color", ln + 1)))?;
            if colors[i].replace(c).is_some() {
                return Err(Error::Parse(format!("edge {} colored twice", toks[0])));
            }
        }
        colors
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    let n = if i < self.ne() {
                        &self.edge_names[i]
                    } else {
                        &self.loop_names[i - self.ne()]
                    };
                    Error::Parse(format!("edge {n} has no color"))
                })
            })
            .collect()
    }

    // ==================== builtins ====================

    pub fn theta() -> Graph {
        Graph::build(
            &[("u", ["a1", "b1", "c1"]), ("v", ["c2", "b2", "a2"])],
            &[("a", "a1", "a2"), ("b", "b1", "b2"), ("c", "c1", "c2")],
            &[],
        )
        .unwrap()
    }

    /// Tetrahedron with edge order (a,b,c,d,e,f); vertex triples are
    /// (a,b,e), (c,f,a), (e,d,c), (b,f,d).
    pub fn tet() -> Graph {
        Graph::build(
            &[
                ("w1", ["a1", "b1", "e1"]),
                ("w2", ["c1", "f1", "a2"]),
                ("w3", ["e2", "d1", "c2"]),
                ("w4", ["b2", "f2", "d2"]),
            ],
            &[
                ("a", "a1", "a2"),
                ("b", "b1", "b2"),
                ("c", "c1", "c2"),
                ("d", "d1", "d2"),
                ("e", "e1", "e2"),
                ("f", "f1", "f2"),
            ],
            &[],
        )
        .unwrap()
    }

    /// Drum with s radial edges: two s-cycles (edges c0.. on top, b0.. on
    /// bottom) joined by radials r0... drum(3) is the triangular prism;
    /// drum(1) has a self-loop at each of its two vertices.
    pub fn drum(s: usize) -> Result<Graph> {
        if s == 0 {
            return Err(Error::Parse("drum needs at least 1 radial".into()));
        }
        let mut verts: Vec<(String, [String; 3])> = Vec::new();
        let mut edges: Vec<(String, String, String)> = Vec::new();
        for i in 0..s {
            let prev = (i + s - 1) % s;
            verts.push((
                format!("u{i}"),
                [format!("c{i}+"), format!("r{i}t"), format!("c{prev}-")],
            ));
        }
        for i in 0..s {
            let prev = (i + s - 1) % s;
            verts.push((
                format!("w{i}"),
                [format!("r{i}b"), format!("b{i}+"), format!("b{prev}-")],
            ));
        }
        for i in 0..s {
            edges.push((format!("c{i}"), format!("c{i}+"), format!("c{i}-")));
        }
        for i in 0..s {
            edges.push((format!("b{i}"), format!("b{i}+"), format!("b{i}-")));
        }
        for i in 0..s {
            edges.push((format!("r{i}"), format!("r{i}t"), format!("r{i}b")));
        }
        let vr: Vec<(&str, [&str; 3])> = verts
            .iter()
            .map(|(n, s)| (n.as_str(), [s[0].as_str(), s[1].as_str(), s[2].as_str()]))
            .collect();
        let er: Vec<(&str, &str, &str)> = edges
            .iter()
            .map(|(n, a, b)| (n.as_str(), a.as_str(), b.as_str()))
            .collect();
        Graph::build(&vr, &er, &[])
    }

    /// Complete bipartite graph on 3+3 vertices, drawn as a hexagon
    /// 1..6 with long diagonals 14, 25, 36; ccw order at vertex i is
    /// (next, diagonal, previous). Genus 1.
    pub fn k33() -> Graph {
        let hex = ["12", "23", "34", "45", "56", "61"];
        let diag = ["14", "25", "36"];
        let mut verts: Vec<(String, [String; 3])> = Vec::new();
        for i in 1..=6usize {
            let nxt = hex[i - 1];
            let prv = hex[(i + 4) % 6];
            let dg = diag[(i - 1) % 3];
            let dend = if i <= 3 { "a" } else { "b" };
            verts.push((
                format!("{i}"),
                [format!("{nxt}a"), format!("{dg}{dend}"), format!("{prv}b")],
            ));
        }
        let mut edges: Vec<(String, String, String)> = Vec::new();
        for e in hex.iter().chain(diag.iter()) {
            edges.push((e.to_string(), format!("{e}a"), format!("{e}b")));
        }
        let vr: Vec<(&str, [&str; 3])> = verts
            .iter()
            .map(|(n, s)| (n.as_str(), [s[0].as_str(), s[1].as_str(), s[2].as_str()]))
            .collect();
        let er: Vec<(&str, &str, &str)> = edges
            .iter()
            .map(|(n, a, b)| (n.as_str(), a.as_str(), b.as_str()))
            .collect();
        Graph::build(&vr, &er, &[]).unwrap()
    }

    /// A single free loop.
    pub fn circle() -> Graph {
        Graph::build(&[], &[], &["l0"]).unwrap()
    }

    /// Builtin by name: theta, tet, k33, circle, drumN (N >= 1).
    pub fn builtin(name: &str) -> Result<Graph> {
        match name {
            "theta" => Ok(Graph::theta()),
            "tet" => Ok(Graph::tet()),
            "k33" => Ok(Graph::k33()),
            "circle" => Ok(Graph::circle()),
            _ => {
                if let Some(n) = name.strip_prefix("drum") {
                    let s: usize = n
                        .parse()
                        .map_err(|_| Error::NotFound(format!("unknown builtin {name}")))?;
                    Graph::drum(s)
                } else {
                    Err(Error::NotFound(format!("unknown builtin {name}")))
                }
            }
        }
    }

    // ==================== accessors ====================

    pub fn nv(&self) -> usize {
        self.verts.len()
    }

    pub fn ne(&self) -> usize {
        self.edges.len()
    }

    pub fn nloops(&self) -> usize {
        self.loop_names.len()
    }

    /// Length of a coloring vector: edges first, then free loops.
    pub fn ncolors(&self) -> usize {
        self.ne() + self.nloops()
    }

    pub fn vertex(&self, v: usize) -> [HalfEdge; 3] {
        self.verts[v]
    }

    pub fn edge(&self, e: usize) -> [HalfEdge; 2] {
        self.edges[e]
    }

    /// (vertex, slot) of a half-edge.
    pub fn at(&self, h: HalfEdge) -> (usize, u8) {
        (h / 3, (h % 3) as u8)
    }

    pub fn edge_of(&self, h: HalfEdge) -> usize {
        self.on[h].0
    }

    /// True if `h` is the first half-edge of its edge record.
    pub fn is_first_half(&self, h: HalfEdge) -> bool {
        self.on[h].1 == 0
    }

    pub fn other_half(&self, h: HalfEdge) -> HalfEdge {
        let (e, end) = self.on[h];
        self.edges[e][1 - end as usize]
    }

    /// Colors of the three edges around vertex v, in slot order.
    pub fn vertex_colors(&self, v: usize, coloring: &[u32]) -> (u32, u32, u32) {
        let [h0, h1, h2] = self.verts[v];
        (
            coloring[self.edge_of(h0)],
            coloring[self.edge_of(h1)],
            coloring[self.edge_of(h2)],
        )
    }

    // ==================== topology ====================

    /// Component index per vertex plus component count (free loops not
    /// included).
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.nv()];
        let mut n = 0;
        for start in 0..self.nv() {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = n;
            while let Some(v) = stack.pop() {
                for h in self.verts[v] {
                    let (u, _) = self.at(self.other_half(h));
                    if comp[u] == usize::MAX {
                        comp[u] = n;
                        stack.push(u);
                    }
                }
            }
            n += 1;
        }
        (comp, n)
    }

    /// Count faces of the ribbon structure: orbits of the walk that
    /// arrives at (v, k) and departs from slot (k+1) mod 3.
    pub fn face_count(&self) -> usize {
        let mut seen = vec![false; 3 * self.nv()];
        let mut faces = 0;
        for h0 in 0..3 * self.nv() {
            if seen[h0] {
                continue;
            }
            faces += 1;
            let mut h = h0;
            loop {
                seen[h] = true;
                let (v, k) = self.at(h);
                h = self.other_half(self.verts[v][(k as usize + 1) % 3]);
                if h == h0 {
                    break;
                }
            }
        }
        faces
    }

    /// Genus of each connected component, from V - E + F = 2 - 2g.
    pub fn genus_per_component(&self) -> Vec<u32> {
        let (comp, n) = self.components();
        let mut vc = vec![0i64; n];
        let mut ec = vec![0i64; n];
        let mut fc = vec![0i64; n];
        for v in 0..self.nv() {
            vc[comp[v]] += 1;
        }
        for e in 0..self.ne() {
            ec[comp[self.at(self.edges[e][0]).0]] += 1;
        }
        let mut seen = vec![false; 3 * self.nv()];
        for h0 in 0..3 * self.nv() {
            if seen[h0] {
                continue;
            }
            fc[comp[self.at(h0).0]] += 1;
            let mut h = h0;
            loop {
                seen[h] = true;
                let (v, k) = self.at(h);
                h = self.other_half(self.verts[v][(k as usize + 1) % 3]);
                if h == h0 {
                    break;
                }
            }
        }
        (0..n)
            .map(|c| {
                let chi = vc[c] - ec[c] + fc[c];
                debug_assert!(chi <= 2 && chi % 2 == 0);
                ((2 - chi) / 2) as u32
            })
            .collect()
    }

    pub fn is_planar(&self) -> bool {
        self.genus_per_component().iter().all(|&g| g == 0)
    }

    // ==================== cycle space ====================

    /// Fundamental cycles of a spanning forest, as edge bitmasks.
    /// The cycle space is all xor combinations of these.
    pub fn fundamental_cycles(&self) -> Result<Vec<u64>> {
        if self.ne() > 64 {
            return Err(Error::Capacity(format!(
                "{} edges exceed the 64-edge limit for cycle enumeration",
                self.ne()
            )));
        }
        // BFS forest; path_mask[v] = xor of tree edges from v to its root
        let mut path = vec![u64::MAX; self.nv()];
        let mut tree = vec![false; self.ne()];
        for start in 0..self.nv() {
            if path[start] != u64::MAX {
                continue;
            }
            path[start] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for h in self.verts[v] {
                    let e = self.edge_of(h);
                    let (u, _) = self.at(self.other_half(h));
                    if path[u] == u64::MAX {
                        tree[e] = true;
                        path[u] = path[v] ^ (1 << e);
                        queue.push_back(u);
                    }
                }
            }
        }
        let mut cycles = Vec::new();
        for e in 0..self.ne() {
            if tree[e] {
                continue;
            }
            let u = self.at(self.edges[e][0]).0;
            let v = self.at(self.edges[e][1]).0;
            cycles.push(path[u] ^ path[v] ^ (1 << e));
        }
        Ok(cycles)
    }

    /// All nonempty elements of the cycle space (even subgraphs), sorted.
    /// In a cubic graph these are exactly the disjoint unions of cycles.
    pub fn curves(&self) -> Result<Vec<u64>> {
        let basis = self.fundamental_cycles()?;
        if basis.len() > 20 {
            return Err(Error::Capacity(format!(
                "cycle space has dimension {} (limit 20)",
                basis.len()
            )));
        }
        let mut out = Vec::with_capacity((1usize << basis.len()) - 1);
        let mut cur = 0u64;
        for g in 1usize..1 << basis.len() {
            // gray code: flip one basis element per step
            cur ^= basis[g.trailing_zeros() as usize];
            out.push(cur);
        }
        out.sort_unstable();
        out.iter()
            .zip(out.iter().skip(1))
            .for_each(|(a, b)| debug_assert!(a != b));
        Ok(out)
    }

    /// 0/1 coloring vector of a curve mask (free loops get 0).
    pub fn curve_coloring(&self, mask: u64) -> Vec<u32> {
        (0..self.ncolors())
            .map(|e| {
                if e < self.ne() {
                    ((mask >> e) & 1) as u32
                } else {
                    0
                }
            })
            .collect()
    }

    // ==================== crossing parity ====================

    /// Parity of the geometric crossing number of two distinct curves,
    /// with each edge drawn as a flat band and each vertex as a disk.
    /// On a shared edge, curve 1 takes strand line 1 and curve 2 line 2;
    /// the strand in line s at an edge's first half sits at reading
    /// position m+1-s at the second half. At a vertex disk each curve is
    /// a chord; two chords cross iff their endpoints interleave in the
    /// cyclic order of (slot, reading) positions.
    pub fn crossing_parity(&self, c1: u64, c2: u64) -> u8 {
        if c1 == c2 {
            return 0;
        }
        let mut total = 0u8;
        for v in 0..self.nv() {
            let slots = |c: u64| -> Vec<usize> {
                (0..3)
                    .filter(|&k| (c >> self.edge_of(self.verts[v][k])) & 1 == 1)
                    .collect()
            };
            let s1 = slots(c1);
            let s2 = slots(c2);
            if s1.len() != 2 || s2.len() != 2 {
                debug_assert!(s1.len() != 1 && s1.len() != 3);
                debug_assert!(s2.len() != 1 && s2.len() != 3);
                continue;
            }
            let pt = |k: usize, line: u8| -> (usize, u8) {
                let h = self.verts[v][k];
                let e = self.edge_of(h);
                let m = ((c1 >> e) & 1) as u8 + ((c2 >> e) & 1) as u8;
                let s = if m == 2 { line } else { 1 };
                let r = if self.is_first_half(h) { s } else { m + 1 - s };
                (k, r)
            };
            let mut pts = [
                (pt(s1[0], 1), 0u8),
                (pt(s1[1], 1), 0u8),
                (pt(s2[0], 2), 1u8),
                (pt(s2[1], 2), 1u8),
            ];
            pts.sort_unstable();
            let lab: Vec<u8> = pts.iter().map(|p| p.1).collect();
            if lab[0] != lab[1] && lab[1] != lab[2] && lab[2] != lab[3] {
                total ^= 1;
            }
        }
        total
    }

    // ==================== local moves ====================

    /// Reverse the cyclic order at one vertex (slots 1 and 2 swap).
    /// Half-edge ids are positional, so the edge records pointing at the
    /// two swapped slots are patched rather than the slots themselves.
    pub fn flip(&self, v: usize) -> Graph {
        let mut g = self.clone();
        let a = 3 * v + 1;
        let b = 3 * v + 2;
        let on_a = g.on[a];
        let on_b = g.on[b];
        g.on[a] = on_b;
        g.on[b] = on_a;
        g.edges[on_a.0][on_a.1 as usize] = b;
        g.edges[on_b.0][on_b.1 as usize] = a;
        g
    }

    /// Replace edge e (color a) by a path of three a-colored edges with a
    /// 0-colored rung between the two new vertices, embedded in a disk:
    ///
    /// ```text
    ///   u --e1-- w1 ==(e2 over, rung under)== w2 --e3-- v
    /// ```
    ///
    /// Returns the new graph and the indices of the three path edges and
    /// the rung in the new edge order.
    pub fn subdivide(&self, e: usize) -> (Graph, [usize; 4]) {
        let base = &self.edge_names[e];
        let mk = |s: &str| format!("{base}.{s}");
        let mut verts: Vec<(String, [String; 3])> = Vec::new();
        let mut edges: Vec<(String, String, String)> = Vec::new();
        // existing vertices keep their half-edge labels "h<id>"
        for v in 0..self.nv() {
            let arr = self.verts[v];
            verts.push((
                self.vert_names[v].clone(),
                [
                    format!("h{}", arr[0]),
                    format!("h{}", arr[1]),
                    format!("h{}", arr[2]),
                ],
            ));
        }
        for f in 0..self.ne() {
            if f == e {
                continue;
            }
            let [h1, h2] = self.edges[f];
            edges.push((
                self.edge_names[f].clone(),
                format!("h{h1}"),
                format!("h{h2}"),
            ));
        }
        let [h1, h2] = self.edges[e];
        // w1 ccw: (toward u, rung, toward w2); w2 ccw: (toward v, e2, rung)
        verts.push((mk("w1"), [mk("e1b"), mk("gb1"), mk("e2a")]));
        verts.push((mk("w2"), [mk("e3a"), mk("e2b"), mk("gb2")]));
        edges.push((mk("e1"), format!("h{h1}"), mk("e1b")));
        edges.push((mk("e2"), mk("e2a"), mk("e2b")));
        edges.push((mk("e3"), mk("e3a"), format!("h{h2}")));
        edges.push((mk("g"), mk("gb1"), mk("gb2")));
        let loops: Vec<&str> = self.loop_names.iter().map(|s| s.as_str()).collect();
        let vr: Vec<(&str, [&str; 3])> = verts
            .iter()
            .map(|(n, s)| (n.as_str(), [s[0].as_str(), s[1].as_str(), s[2].as_str()]))
            .collect();
        let er: Vec<(&str, &str, &str)> = edges
            .iter()
            .map(|(n, a, b)| (n.as_str(), a.as_str(), b.as_str()))
            .collect();
        let g = Graph::build(&vr, &er, &loops).unwrap();
        let ne = g.ne();
        (g, [ne - 4, ne - 3, ne - 2, ne - 1])
    }

    // ==================== random generation ====================

    /// Random cubic ribbon graph on nv vertices (nv even), by a uniform
    /// pairing of the 3 nv half-edges. May be disconnected and will often
    /// have self-loops or parallel edges.
    pub fn random_cubic<R: Rng>(nv: usize, rng: &mut R) -> Graph {
        assert!(
            nv >= 2 && nv.is_multiple_of(2),
            "need a positive even vertex count"
        );
        let mut halves: Vec<usize> = (0..3 * nv).collect();
        // Fisher-Yates
        for i in (1..halves.len()).rev() {
            let j = rng.gen_range(0..=i);
            halves.swap(i, j);
        }
        let verts: Vec<(String, [String; 3])> = (0..nv)
            .map(|v| {
                (
                    format!("v{v}"),
                    [
                        format!("h{}", 3 * v),
                        format!("h{}", 3 * v + 1),
                        format!("h{}", 3 * v + 2),
                    ],
                )
            })
            .collect();
        let edges: Vec<(String, String, String)> = (0..3 * nv / 2)
            .map(|e| {
                (
                    format!("e{e}"),
                    format!("h{}", halves[2 * e]),
                    format!("h{}", halves[2 * e + 1]),
                )
            })
            .collect();
        let vr: Vec<(&str, [&str; 3])> = verts
            .iter()
            .map(|(n, s)| (n.as_str(), [s[0].as_str(), s[1].as_str(), s[2].as_str()]))
            .collect();
        let er: Vec<(&str, &str, &str)> = edges
            .iter()
            .map(|(n, a, b)| (n.as_str(), a.as_str(), b.as_str()))
            .collect();
        Graph::build(&vr, &er, &[]).unwrap()
    }

    /// Random admissible coloring: a sum of random cycle-space elements
    /// with small multiplicities (plus random colors on free loops).
    /// Even-subgraph sums always satisfy the vertex conditions.
    pub fn random_even_coloring<R: Rng>(&self, rng: &mut R, max_mult: u32) -> Result<Vec<u32>> {
        let basis = self.fundamental_cycles()?;
        let mut colors = vec![0u32; self.ncolors()];
        if !basis.is_empty() {
            let picks = rng.gen_range(1..=3);
            for _ in 0..picks {
                let mut mask = 0u64;
                while mask == 0 {
                    for b in &basis {
                        if rng.gen_bool(0.5) {
                            mask ^= b;
                        }
                    }
                }
                let mult = rng.gen_range(1..=max_mult);
                for (e, c) in colors.iter_mut().enumerate().take(self.ne()) {
                    *c += mult * ((mask >> e) & 1) as u32;
                }
            }
        }
        for l in 0..self.nloops() {
            colors[self.ne() + l] = rng.gen_range(0..=2);
        }
        Ok(colors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn builtin_shapes() {
        let th = Graph::theta();
        assert_eq!((th.nv(), th.ne()), (2, 3));
        let tet = Graph::tet();
        assert_eq!((tet.nv(), tet.ne()), (4, 6));
        let k = Graph::k33();
        assert_eq!((k.nv(), k.ne()), (6, 9));
        let d3 = Graph::drum(3).unwrap();
        assert_eq!((d3.nv(), d3.ne()), (6, 9));
        let d1 = Graph::drum(1).unwrap();
        assert_eq!((d1.nv(), d1.ne()), (2, 3));
        let c = Graph::circle();
        assert_eq!((c.nv(), c.ne(), c.nloops()), (0, 0, 1));
    }

    #[test]
    fn faces_and_genus() {
        assert_eq!(Graph::theta().face_count(), 3);
        assert_eq!(Graph::tet().face_count(), 4);
        assert_eq!(Graph::drum(1).unwrap().face_count(), 3);
        assert_eq!(Graph::drum(3).unwrap().face_count(), 5);
        assert_eq!(Graph::drum(6).unwrap().face_count(), 8);
        assert!(Graph::theta().is_planar());
        assert!(Graph::tet().is_planar());
        assert!(Graph::drum(1).unwrap().is_planar());
        assert!(Graph::drum(5).unwrap().is_planar());
        assert_eq!(Graph::k33().genus_per_component(), vec![1]);
    }

    #[test]
    fn parse_matches_builtin() {
        let text = "
            # theta graph
            vertex u: a1 b1 c1
            vertex v: c2 b2 a2
            edge a: a1 a2
            edge b: b1 b2
            edge c: c1 c2
        ";
        let g = Graph::parse(text).unwrap();
        let th = Graph::theta();
        assert_eq!(g.verts, th.verts);
        assert_eq!(g.edges, th.edges);
        assert_eq!(g.edge_names, th.edge_names);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(Graph::parse("vertex u: a b").is_err());
        assert!(Graph::parse("wedge u: a b c").is_err());
        // half-edge in no edge
        assert!(Graph::parse(
            "vertex u: a1 b1 c1\nvertex v: a2 b2 c2\nedge a: a1 a2\nedge b: b1 b2"
        )
        .is_err());
        // half-edge used twice
        assert!(Graph::parse(
            "vertex u: a1 b1 c1\nvertex v: c2 b2 a2\n\
             edge a: a1 a2\nedge b: b1 b2\nedge c: c1 b2"
        )
        .is_err());
    }

    #[test]
    fn coloring_parse() {
        let th = Graph::theta();
        let c = th.parse_coloring("a 1\nb 1\nc 2\n").unwrap();
        assert_eq!(c, vec![1, 1, 2]);
        assert!(th.parse_coloring("a 1\nb 1\n").is_err());
        assert!(th.parse_coloring("a 1\nb 1\nc 2\nd 0\n").is_err());
        assert!(th.parse_coloring("a 1\na 1\nb 1\nc 2\n").is_err());
    }

    #[test]
    fn curve_counts() {
        assert_eq!(Graph::theta().curves().unwrap().len(), 3);
        assert_eq!(Graph::tet().curves().unwrap().len(), 7);
        assert_eq!(Graph::k33().curves().unwrap().len(), 15);
        assert_eq!(Graph::drum(3).unwrap().curves().unwrap().len(), 15);
        assert_eq!(Graph::drum(1).unwrap().curves().unwrap().len(), 3);
    }

    #[test]
    fn curves_are_exactly_even_subgraphs() {
        for g in [
            Graph::theta(),
            Graph::tet(),
            Graph::drum(1).unwrap(),
            Graph::drum(2).unwrap(),
            Graph::k33(),
        ] {
            let curves = g.curves().unwrap();
            let mut expect = Vec::new();
            for mask in 1u64..1 << g.ne() {
                let even = (0..g.nv()).all(|v| {
                    let deg: u32 = g
                        .vertex(v)
                        .iter()
                        .map(|&h| ((mask >> g.edge_of(h)) & 1) as u32)
                        .sum();
                    deg.is_multiple_of(2)
                });
                if even {
                    expect.push(mask);
                }
            }
            assert_eq!(curves, expect);
        }
    }

    #[test]
    fn planar_graphs_have_even_parity() {
        for g in [
            Graph::theta(),
            Graph::tet(),
            Graph::drum(1).unwrap(),
            Graph::drum(3).unwrap(),
            Graph::drum(4).unwrap(),
        ] {
            let curves = g.curves().unwrap();
            for (i, &a) in curves.iter().enumerate() {
                for &b in curves.iter().skip(i + 1) {
                    assert_eq!(g.crossing_parity(a, b), 0, "curves {a:b} {b:b}");
                }
            }
        }
    }

    #[test]
    fn k33_has_an_odd_pair() {
        let g = Graph::k33();
        let curves = g.curves().unwrap();
        let mut odd = 0;
        for (i, &a) in curves.iter().enumerate() {
            for &b in curves.iter().skip(i + 1) {
                let p = g.crossing_parity(a, b);
                assert_eq!(p, g.crossing_parity(b, a));
                odd += p as usize;
            }
        }
        assert!(odd > 0, "a genus-1 graph must have crossing curve pairs");
    }

    #[test]
    fn subdivision_preserves_planarity_and_flip_is_cubic() {
        let tet = Graph::tet();
        let (g, new_edges) = tet.subdivide(2);
        assert_eq!(g.nv(), 6);
        assert_eq!(g.ne(), 9);
        assert!(g.is_planar());
        assert_eq!(new_edges, [5, 6, 7, 8]);
        let f = tet.flip(1);
        assert_eq!(f.nv(), 4);
        // edge sets agree as unordered structures: every half-edge maps
        // to a well-formed record
        for h in 0..3 * f.nv() {
            assert_eq!(f.other_half(f.other_half(h)), h);
        }
        assert_eq!(f.face_count() % 2, tet.face_count() % 2);
    }

    #[test]
    fn random_graphs_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let g = Graph::random_cubic(6, &mut rng);
            assert_eq!(g.ne(), 9);
            for h in 0..3 * g.nv() {
                assert_eq!(g.other_half(g.other_half(h)), h);
                let (v, k) = g.at(h);
                assert_eq!(g.vertex(v)[k as usize], h);
            }
            let colors = g.random_even_coloring(&mut rng, 3).unwrap();
            for v in 0..g.nv() {
                let (a, b, c) = g.vertex_colors(v, &colors);
                let s = a + b + c;
                assert_eq!(s % 2, 0);
                assert!(a + b >= c && b + c >= a && a + c >= b);
            }
        }
    }

    #[test]
    fn curve_parity_symmetry_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let g = Graph::random_cubic(6, &mut rng);
            let curves = g.curves().unwrap();
            if curves.len() < 2 {
                continue;
            }
            for _ in 0..30 {
                let i = rng.gen_range(0..curves.len());
                let j = rng.gen_range(0..curves.len());
                assert_eq!(
                    g.crossing_parity(curves[i], curves[j]),
                    g.crossing_parity(curves[j], curves[i])
                );
            }
        }
    }
}
