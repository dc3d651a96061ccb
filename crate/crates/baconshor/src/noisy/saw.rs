//! Exhaustive enumeration of self-avoiding walks on the square lattice and of
//! wrapping self-avoiding cycles on the spacetime cylinder.
//!
//! Walk counts grow like mu^r, so both enumerations carry hard length caps.

use crate::error::{Error, Result};
use std::collections::HashSet;

/// Longest open-walk length the exhaustive count accepts.
pub const SAW_MAX_LEN: u64 = 15;
/// Longest cycle length the cylinder enumeration accepts.
pub const SAC_MAX_LEN: u64 = 16;

/// Number of self-avoiding walks of exactly `r` steps on the infinite square
/// lattice from a fixed origin, by depth-first enumeration.
pub fn saw_count(r: u64) -> Result<u64> {
    if r == 0 {
        return Err(Error::TooSmall {
            name: "r",
            value: 0,
            min: 1,
        });
    }
    if r > SAW_MAX_LEN {
        return Err(Error::ExceedsCap {
            name: "r",
            value: r,
            cap: SAW_MAX_LEN,
        });
    }
    let r = r as usize;
    let side = 2 * r + 1;
    let mut visited = vec![false; side * side];
    let origin = r * side + r;
    visited[origin] = true;
    let mut count = 0u64;
    dfs_open(&mut visited, side, origin, r, &mut count);
    Ok(count)
}

fn dfs_open(visited: &mut [bool], side: usize, pos: usize, remaining: usize, count: &mut u64) {
    if remaining == 0 {
        *count += 1;
        return;
    }
    // Interior coordinates are guaranteed: the arena has `r` cells of margin.
    for next in [pos - 1, pos + 1, pos - side, pos + side] {
        if !visited[next] {
            visited[next] = true;
            dfs_open(visited, side, next, remaining - 1, count);
            visited[next] = false;
        }
    }
}

/// A cycle stored as its sorted edge list. Horizontal edge `(c, t)` joins
/// checks `c` and `c+1 mod m` at time `t`; vertical edge joins times `t` and
/// `t+1` at check `c`.
type EdgeKey = (u8, u32, i32);

/// Number of distinct self-avoiding cycles of length `r` wrapping once around
/// a cylinder of circumference `m`, counted up to space and time translation.
///
/// Cycles are enumerated as closed walks through a fixed anchor vertex and
/// deduplicated by a canonical key: for each of the `m` spatial shifts the
/// edge list is time-normalized so its earliest crossing of a fixed vertical
/// cut lands at time zero, and the lexicographically least of the `m`
/// normalized lists names the orbit.
pub fn sac_count(r: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::TooSmall {
            name: "m",
            value: m,
            min: 2,
        });
    }
    if r > SAC_MAX_LEN {
        return Err(Error::ExceedsCap {
            name: "r",
            value: r,
            cap: SAC_MAX_LEN,
        });
    }
    if r < m || (r - m) % 2 != 0 {
        // A wrapping cycle needs m signed horizontal steps and evenly many
        // vertical ones.
        return Ok(0);
    }
    let mut seen: HashSet<Vec<EdgeKey>> = HashSet::new();
    let mut walk = CycleWalk::new(m as i64, r as usize);
    walk.run(&mut seen);
    Ok(seen.len() as u64)
}

struct CycleWalk {
    m: i64,
    len: usize,
    /// Signed horizontal displacement of each step: +1 east, -1 west, 0 vertical.
    path: Vec<(i64, i64)>, // visited vertices as (raw displacement, time)
    visited: HashSet<(i64, i64)>,
}

impl CycleWalk {
    fn new(m: i64, len: usize) -> Self {
        CycleWalk {
            m,
            len,
            path: vec![(0, 0)],
            visited: HashSet::from([(0, 0)]),
        }
    }

    fn run(&mut self, seen: &mut HashSet<Vec<EdgeKey>>) {
        self.step(0, 0, self.len, seen);
    }

    /// `d` is the raw signed horizontal displacement, `t` the time; columns
    /// are `d mod m`, so the walk wraps exactly when it returns to the anchor
    /// with `|d| = m`.
    fn step(&mut self, d: i64, t: i64, remaining: usize, seen: &mut HashSet<Vec<EdgeKey>>) {
        if remaining == 0 {
            if d.abs() == self.m && t == 0 {
                let key = canonical_key(&self.path, self.m);
                seen.insert(key);
            }
            return;
        }
        for (dd, dt) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
            let (nd, nt) = (d + dd, t + dt);
            let vertex = (nd.rem_euclid(self.m), nt);
            let closes = remaining == 1 && vertex == (0, 0) && nd.abs() == self.m;
            if !closes && self.visited.contains(&vertex) {
                continue;
            }
            if !reachable(nd, nt, remaining - 1, self.m) {
                continue;
            }
            self.path.push((nd, nt));
            if closes {
                // Do not mark: the anchor is already in `visited`.
                self.step(nd, nt, 0, seen);
            } else {
                self.visited.insert(vertex);
                self.step(nd, nt, remaining - 1, seen);
                self.visited.remove(&vertex);
            }
            self.path.pop();
        }
    }
}

/// Can a walk at displacement `d`, time `t` still close into a once-wrapping
/// cycle with `remaining` steps?
fn reachable(d: i64, t: i64, remaining: usize, m: i64) -> bool {
    let rem = remaining as i64;
    for target in [m, -m] {
        let need = (target - d).abs() + t.abs();
        if need <= rem && (rem - need) % 2 == 0 {
            return true;
        }
    }
    false
}

/// Converts the closed vertex path to edges, then canonicalizes over the
/// translation group.
fn canonical_key(path: &[(i64, i64)], m: i64) -> Vec<EdgeKey> {
    let mut edges: Vec<(i64, i64, bool)> = Vec::with_capacity(path.len());
    for pair in path.windows(2) {
        let ((d0, t0), (d1, t1)) = (pair[0], pair[1]);
        if t1 != t0 {
            // Vertical edge at the lower endpoint.
            edges.push((d0.rem_euclid(m), t0.min(t1), false));
        } else {
            // Horizontal edge keyed by its western check.
            let west = d0.min(d1);
            edges.push((west.rem_euclid(m), t0, true));
        }
    }

    let mut best: Option<Vec<EdgeKey>> = None;
    for shift in 0..m {
        // Earliest crossing of the cut between checks m-1 and 0.
        let t0 = edges
            .iter()
            .filter(|&&(c, _, horizontal)| horizontal && (c + shift).rem_euclid(m) == m - 1)
            .map(|&(_, t, _)| t)
            .min()
            .expect("a wrapping cycle crosses every cut");
        let mut candidate: Vec<EdgeKey> = edges
            .iter()
            .map(|&(c, t, horizontal)| {
                (
                    horizontal as u8,
                    (c + shift).rem_euclid(m) as u32,
                    (t - t0) as i32,
                )
            })
            .collect();
        candidate.sort_unstable();
        if best.as_ref().map_or(true, |b| candidate < *b) {
            best = Some(candidate);
        }
    }
    best.expect("m >= 2")
}
