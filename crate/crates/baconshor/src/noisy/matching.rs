//! Exact minimum-weight perfect matching of spacetime defects.
//!
//! The core is a maximum-weight general matching solver using Edmonds'
//! blossom method with the primal-dual scheme of Galil's survey, following
//! the well-known van Rantwijk implementation. Duals are kept doubled so all
//! arithmetic stays in integers. `mwpm` reduces minimum-weight perfect
//! matching to it by negating weights against a constant and requesting
//! maximum cardinality.

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// A defect location on the decoding cylinder: check column and measurement
/// round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpacetimeCoord {
    pub col: u64,
    pub t: u64,
}

/// Graph distance on the cylinder: shortest arc between the columns plus the
/// round difference, both with unit edge weights.
pub fn cylinder_distance(a: SpacetimeCoord, b: SpacetimeCoord, m: u64) -> u64 {
    let dc = a.col.abs_diff(b.col);
    dc.min(m - dc) + a.t.abs_diff(b.t)
}

/// Minimum-weight perfect matching of an even defect set under the cylinder
/// metric. Returns index pairs `(i, j)` with `i < j`, sorted by `i`.
pub fn mwpm(defects: &[SpacetimeCoord], m: u64) -> Result<Vec<(usize, usize)>> {
    if defects.len() % 2 != 0 {
        return Err(Error::Internal(format!(
            "defect count {} is odd; syndrome differencing must produce an even set",
            defects.len()
        )));
    }
    if defects.is_empty() {
        return Ok(Vec::new());
    }
    let n = defects.len();
    let mut max_dist = 0i64;
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = cylinder_distance(defects[i], defects[j], m) as i64;
            max_dist = max_dist.max(d);
            edges.push((i, j, d));
        }
    }
    // Maximum-cardinality maximum-weight matching on (max_dist + 1 - d)
    // minimizes total distance over perfect matchings.
    for e in edges.iter_mut() {
        e.2 = max_dist + 1 - e.2;
    }
    let mate = max_weight_matching(n, &edges, true);
    let mut pairs = Vec::with_capacity(n / 2);
    for (v, &w) in mate.iter().enumerate() {
        if w == NONE {
            return Err(Error::Internal(format!(
                "matching left defect {v} unpaired"
            )));
        }
        if v < w {
            pairs.push((v, w));
        }
    }
    Ok(pairs)
}

/// Total cylinder distance of a pairing.
pub(crate) fn pairing_weight(pairs: &[(usize, usize)], defects: &[SpacetimeCoord], m: u64) -> u64 {
    pairs
        .iter()
        .map(|&(i, j)| cylinder_distance(defects[i], defects[j], m))
        .sum()
}

/// Maximum-weight matching in a general graph; with `max_cardinality` only
/// maximum-cardinality matchings are considered. Returns `mate[v]` as a
/// vertex index or `usize::MAX` when `v` is unmatched. O(n^3).
pub(crate) fn max_weight_matching(
    nvertex: usize,
    edges: &[(usize, usize, i64)],
    max_cardinality: bool,
) -> Vec<usize> {
    if nvertex == 0 || edges.is_empty() {
        return vec![NONE; nvertex];
    }
    let mut m = Matcher::new(nvertex, edges, max_cardinality);
    m.solve();
    m.mate
        .iter()
        .map(|&p| if p == NONE { NONE } else { m.endpoint[p] })
        .collect()
}

struct Matcher<'a> {
    nvertex: usize,
    nedge: usize,
    edges: &'a [(usize, usize, i64)],
    max_cardinality: bool,
    /// endpoint[p]: vertex to which edge endpoint p (= 2k or 2k+1) attaches.
    endpoint: Vec<usize>,
    /// neighbend[v]: remote endpoints of edges incident to v.
    neighbend: Vec<Vec<usize>>,
    /// mate[v]: remote endpoint of the matched edge at v, or NONE.
    mate: Vec<usize>,
    /// label[b]: 0 free, 1 S, 2 T, 5 breadcrumb (b: vertex or blossom).
    label: Vec<u8>,
    /// labelend[b]: endpoint through which b got its label, or NONE.
    labelend: Vec<usize>,
    /// inblossom[v]: top-level blossom containing vertex v.
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    /// bestedge[b]: least-slack candidate edge index, or NONE.
    bestedge: Vec<usize>,
    blossombestedges: Vec<Vec<usize>>,
    unusedblossoms: Vec<usize>,
    /// Doubled dual variables: vertex duals then blossom duals.
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl<'a> Matcher<'a> {
    fn new(nvertex: usize, edges: &'a [(usize, usize, i64)], max_cardinality: bool) -> Self {
        let nedge = edges.len();
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let mut endpoint = Vec::with_capacity(2 * nedge);
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            debug_assert!(i != j && i < nvertex && j < nvertex);
            endpoint.push(i);
            endpoint.push(j);
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(std::iter::repeat(0).take(nvertex));
        Matcher {
            nvertex,
            nedge,
            edges,
            max_cardinality,
            endpoint,
            neighbend,
            mate: vec![NONE; nvertex],
            label: vec![0; 2 * nvertex],
            labelend: vec![NONE; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![NONE; 2 * nvertex],
            blossomchilds: vec![Vec::new(); 2 * nvertex],
            blossombase: (0..nvertex).chain(std::iter::repeat(NONE).take(nvertex)).collect(),
            blossomendps: vec![Vec::new(); 2 * nvertex],
            bestedge: vec![NONE; 2 * nvertex],
            blossombestedges: vec![Vec::new(); 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    fn slack(&self, k: usize) -> i64 {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * wt
    }

    fn blossom_leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.nvertex {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                self.blossom_leaves(t, out);
            }
        }
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let mut leaves = Vec::new();
            self.blossom_leaves(b, &mut leaves);
            self.queue.extend(leaves);
        } else {
            let base = self.blossombase[b];
            debug_assert!(self.mate[base] != NONE);
            let mate_ep = self.mate[base];
            self.assign_label(self.endpoint[mate_ep], 1, mate_ep ^ 1);
        }
    }

    /// Traces back from both ends of a tight S-S edge; returns the common
    /// ancestor base vertex, or NONE when the paths reach different roots
    /// (an augmenting path).
    fn scan_blossom(&mut self, mut v: usize, mut w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            debug_assert_eq!(self.labelend[b], self.mate[self.blossombase[b]]);
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                debug_assert!(self.labelend[b] != NONE);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    /// Folds the cycle through edge `k` and `base` into a new blossom.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom pool exhausted");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;

        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            debug_assert!(self.labelend[bv] != NONE);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            debug_assert!(self.labelend[bw] != NONE);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }

        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;

        // blossomchilds[b] is assigned below; collect leaves via the path.
        let mut leaves = Vec::new();
        for &child in &path {
            self.blossom_leaves(child, &mut leaves);
        }
        for &leaf in &leaves {
            if self.label[self.inblossom[leaf]] == 2 {
                self.queue.push(leaf);
            }
            self.inblossom[leaf] = b;
        }

        // Merge least-slack edge lists of the children.
        let mut bestedgeto = vec![NONE; 2 * self.nvertex];
        for &bv in &path {
            let nblists: Vec<Vec<usize>> = if self.blossombestedges[bv].is_empty() {
                let mut ls = Vec::new();
                self.blossom_leaves(bv, &mut ls);
                ls.iter()
                    .map(|&leaf| self.neighbend[leaf].iter().map(|&p| p / 2).collect())
                    .collect()
            } else {
                vec![self.blossombestedges[bv].clone()]
            };
            for list in nblists {
                for k in list {
                    let (i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        j = i;
                    }
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.blossombestedges[bv].clear();
            self.bestedge[bv] = NONE;
        }
        self.blossombestedges[b] = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        self.bestedge[b] = NONE;
        for idx in 0..self.blossombestedges[b].len() {
            let k = self.blossombestedges[b][idx];
            if self.bestedge[b] == NONE || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
        self.blossomchilds[b] = path;
        self.blossomendps[b] = endps;
    }

    /// Expands blossom `b`, relabeling its children if it is a T-blossom
    /// mid-stage.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                let mut leaves = Vec::new();
                self.blossom_leaves(s, &mut leaves);
                for leaf in leaves {
                    self.inblossom[leaf] = s;
                }
            }
        }

        if !endstage && self.label[b] == 2 {
            debug_assert!(self.labelend[b] != NONE);
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let nchilds = childs.len() as isize;
            let start = childs.iter().position(|&c| c == entrychild).unwrap() as isize;
            let (mut j, jstep, endptrick): (isize, isize, usize) = if start & 1 != 0 {
                (start - nchilds, 1, 0)
            } else {
                (start, -1, 1)
            };
            let endps = self.blossomendps[b].clone();
            let at = |j: isize| -> usize {
                let idx = j.rem_euclid(nchilds) as usize;
                idx
            };
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[p ^ 1]] = 0;
                let q = endps[at(j - endptrick as isize)] ^ endptrick ^ 1;
                self.label[self.endpoint[q]] = 0;
                self.assign_label(self.endpoint[p ^ 1], 2, p);
                self.allowedge[endps[at(j - endptrick as isize)] / 2] = true;
                j += jstep;
                p = endps[at(j - endptrick as isize)] ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = childs[at(j)];
            let ep = self.endpoint[p ^ 1];
            self.label[ep] = 2;
            self.label[bv] = 2;
            self.labelend[ep] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[at(j)] != entrychild {
                let bv = childs[at(j)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let mut leaves = Vec::new();
                self.blossom_leaves(bv, &mut leaves);
                let reached = leaves.iter().copied().find(|&v| self.label[v] != 0);
                if let Some(v) = reached {
                    debug_assert_eq!(self.label[v], 2);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = 0;
                    let base_mate = self.mate[self.blossombase[bv]];
                    self.label[self.endpoint[base_mate]] = 0;
                    let le = self.labelend[v];
                    self.assign_label(v, 2, le);
                }
                j += jstep;
            }
        }

        self.label[b] = 0;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b].clear();
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    /// Swaps matched and unmatched edges along the path from vertex `v` to
    /// the base of blossom `b` (recursively through sub-blossoms).
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let nchilds = self.blossomchilds[b].len() as isize;
        let start = self.blossomchilds[b].iter().position(|&c| c == t).unwrap() as isize;
        let (mut j, jstep, endptrick): (isize, isize, usize) = if start & 1 != 0 {
            (start - nchilds, 1, 0)
        } else {
            (start, -1, 1)
        };
        let at = |j: isize| j.rem_euclid(nchilds) as usize;
        while j != 0 {
            j += jstep;
            let t = self.blossomchilds[b][at(j)];
            let p = self.blossomendps[b][at(j - endptrick as isize)] ^ endptrick;
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = self.blossomchilds[b][at(j)];
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        let start = start as usize;
        self.blossomchilds[b].rotate_left(start);
        self.blossomendps[b].rotate_left(start);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    /// Augments the matching along the alternating trees joined by tight
    /// edge `k`.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                debug_assert_eq!(self.labelend[bs], self.mate[self.blossombase[bs]]);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                debug_assert!(self.labelend[bt] != NONE);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                debug_assert_eq!(self.blossombase[bt], t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn solve(&mut self) {
        for _stage in 0..self.nvertex {
            self.label.iter_mut().for_each(|l| *l = 0);
            self.bestedge.iter_mut().for_each(|e| *e = NONE);
            for lst in self.blossombestedges[self.nvertex..].iter_mut() {
                lst.clear();
            }
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();

            for v in 0..self.nvertex {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }

            let mut augmented = false;
            loop {
                while let Some(v) = self.queue.pop() {
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    let nb = self.neighbend[v].clone();
                    for p in nb {
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                debug_assert_eq!(self.label[self.inblossom[w]], 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                    if augmented {
                        break;
                    }
                }
                if augmented {
                    break;
                }

                // No augmenting path under the current duals: compute the
                // least delta over the four constraint families.
                let mut deltatype = -1i32;
                let mut delta = 0i64;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;

                if !self.max_cardinality {
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex].iter().copied().min().unwrap();
                }
                for v in 0..self.nvertex {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * self.nvertex {
                    if self.blossomparent[b] == NONE
                        && self.label[b] == 1
                        && self.bestedge[b] != NONE
                    {
                        let kslack = self.slack(self.bestedge[b]);
                        debug_assert_eq!(kslack % 2, 0);
                        let d = kslack / 2;
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == -1 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == -1 {
                    // Max-cardinality optimum reached; make duals verifiable.
                    debug_assert!(self.max_cardinality);
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex]
                        .iter()
                        .copied()
                        .min()
                        .unwrap()
                        .max(0);
                }

                for v in 0..self.nvertex {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }

                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }

            if !augmented {
                break;
            }
            for b in self.nvertex..2 * self.nvertex {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
        let _ = self.nedge;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Minimum pairing weight over all (k-1)!! pairings.
    fn brute_force_min_pairing(defects: &[SpacetimeCoord], m: u64) -> u64 {
        fn go(remaining: &mut Vec<usize>, defects: &[SpacetimeCoord], m: u64) -> u64 {
            if remaining.is_empty() {
                return 0;
            }
            let first = remaining[0];
            let mut best = u64::MAX;
            for idx in 1..remaining.len() {
                let second = remaining[idx];
                let mut rest: Vec<usize> = remaining
                    .iter()
                    .copied()
                    .filter(|&x| x != first && x != second)
                    .collect();
                let d = cylinder_distance(defects[first], defects[second], m);
                best = best.min(d + go(&mut rest, defects, m));
            }
            best
        }
        let mut all: Vec<usize> = (0..defects.len()).collect();
        go(&mut all, defects, m)
    }

    #[test]
    fn empty_defect_set() {
        assert!(mwpm(&[], 5).unwrap().is_empty());
    }

    #[test]
    fn two_defects_pair_up() {
        let defects = [
            SpacetimeCoord { col: 0, t: 0 },
            SpacetimeCoord { col: 3, t: 7 },
        ];
        assert_eq!(mwpm(&defects, 5).unwrap(), vec![(0, 1)]);
    }

    #[test]
    fn odd_defect_count_is_internal_error() {
        let defects = [SpacetimeCoord { col: 0, t: 0 }];
        assert!(matches!(mwpm(&defects, 5), Err(Error::Internal(_))));
    }

    #[test]
    fn cylinder_metric_wraps() {
        let a = SpacetimeCoord { col: 0, t: 2 };
        let b = SpacetimeCoord { col: 4, t: 0 };
        assert_eq!(cylinder_distance(a, b, 5), 1 + 2);
    }

    #[test]
    fn matches_brute_force_on_seeded_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for case in 0..1000 {
            let m = *[3u64, 5, 9, 13].iter().nth(case % 4).unwrap();
            let t_extent = 12u64;
            let count = 2 * rng.gen_range(1..=5);
            let mut defects = Vec::new();
            while defects.len() < count {
                let d = SpacetimeCoord {
                    col: rng.gen_range(0..m),
                    t: rng.gen_range(0..t_extent),
                };
                if !defects.contains(&d) {
                    defects.push(d);
                }
            }
            let pairs = mwpm(&defects, m).unwrap();
            assert_eq!(pairs.len(), defects.len() / 2);
            let got = pairing_weight(&pairs, &defects, m);
            let want = brute_force_min_pairing(&defects, m);
            assert_eq!(got, want, "case {case}: defects {defects:?}");
        }
    }

    #[test]
    fn max_weight_matching_small_known_cases() {
        // Triangle with a pendant: picks the two disjoint edges.
        let edges = [(0usize, 1usize, 6i64), (1, 2, 10), (2, 3, 6)];
        let mate = max_weight_matching(4, &edges, false);
        assert_eq!(mate, vec![1, 0, 3, 2]);
        // Same graph, forced maximum weight without cardinality constraint:
        // single heavy edge loses to the pair (12 > 10).
        let edges = [(0usize, 1usize, 2i64), (1, 2, 10), (2, 3, 2)];
        let mate = max_weight_matching(4, &edges, false);
        assert_eq!(mate, vec![NONE, 2, 1, NONE]);
        let mate = max_weight_matching(4, &edges, true);
        assert_eq!(mate, vec![1, 0, 3, 2]);
    }

    #[test]
    fn max_weight_matching_creates_and_uses_blossoms() {
        // Classic blossom test from the reference implementation.
        let edges = [
            (1usize, 2usize, 8i64),
            (1, 3, 8),
            (2, 3, 10),
            (2, 4, 12),
            (3, 5, 12),
            (4, 5, 14),
            (4, 6, 12),
            (5, 7, 12),
            (6, 7, 14),
            (7, 8, 12),
        ];
        let mate = max_weight_matching(9, &edges, false);
        assert_eq!(mate, vec![NONE, 2, 1, 5, 6, 3, 4, 8, 7]);
    }

    #[test]
    fn max_weight_matching_nested_blossom_expansion() {
        // Create nested S-blossom, augment, expand recursively.
        let edges = [
            (1usize, 2usize, 40i64),
            (1, 3, 40),
            (2, 3, 60),
            (2, 4, 55),
            (3, 5, 55),
            (4, 5, 50),
            (1, 8, 15),
            (5, 7, 30),
            (7, 6, 10),
            (8, 10, 10),
            (4, 9, 30),
        ];
        let mate = max_weight_matching(11, &edges, false);
        assert_eq!(mate, vec![NONE, 2, 1, 5, 9, 3, 7, 6, 10, 4, 8]);
    }
}
