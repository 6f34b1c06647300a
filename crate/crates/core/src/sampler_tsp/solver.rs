//! Open-path TSP heuristics: nearest-neighbour construction and 2-opt with
//! neighbour lists and don't-look bits.

use serde::{Deserialize, Serialize};

use super::PointCloud;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Effort {
    NearestNeighbor,
    TwoOpt { max_passes: usize },
}

impl Default for Effort {
    fn default() -> Self {
        Effort::TwoOpt { max_passes: 50 }
    }
}

/// Candidate neighbours per city for 2-opt.
const NEIGHBOURS: usize = 10;

/// Uniform bucket grid over `[0,1]^d`.
struct Buckets {
    d: usize,
    side: usize,
    cells: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(cloud: &PointCloud) -> Self {
        let n = cloud.len();
        let d = cloud.d;
        let side = ((n as f64 / 2.0).powf(1.0 / d as f64).ceil() as usize).max(1);
        let mut cells = vec![Vec::new(); side.pow(d as u32)];
        let mut out = Self {
            d,
            side,
            cells: Vec::new(),
        };
        for i in 0..n {
            cells[out.cell_of(cloud.point(i))].push(i);
        }
        out.cells = cells;
        out
    }

    fn coord(&self, x: f64) -> usize {
        ((x * self.side as f64) as usize).min(self.side - 1)
    }

    fn cell_of(&self, x: &[f64]) -> usize {
        x.iter().fold(0, |acc, &v| acc * self.side + self.coord(v))
    }

    /// Visits every bucket at Chebyshev distance exactly `r` from `centre`.
    fn ring(&self, centre: &[usize], r: usize, mut f: impl FnMut(usize)) {
        let r = r as i64;
        let side = self.side as i64;
        let mut offset = vec![-r; self.d];
        loop {
            if offset.iter().any(|o| o.abs() == r) {
                let mut idx = 0i64;
                let mut inside = true;
                for (a, &o) in offset.iter().enumerate() {
                    let c = centre[a] as i64 + o;
                    if c < 0 || c >= side {
                        inside = false;
                        break;
                    }
                    idx = idx * side + c;
                }
                if inside {
                    f(idx as usize);
                }
            }
            let mut a = 0;
            loop {
                if a == self.d {
                    return;
                }
                if offset[a] < r {
                    offset[a] += 1;
                    break;
                }
                offset[a] = -r;
                a += 1;
            }
        }
    }

    /// Scans buckets ring by ring around `x`. `visit` gets `Bucket(b)` for each
    /// bucket and `Covered(r)` after each ring, meaning every unscanned point is
    /// at least `r` away; returning `true` there stops the search.
    fn search(&self, x: &[f64], mut visit: impl FnMut(Visit) -> bool) {
        let centre: Vec<usize> = x.iter().map(|&v| self.coord(v)).collect();
        let cell = 1.0 / self.side as f64;
        for r in 0..=self.side {
            self.ring(&centre, r, |b| {
                visit(Visit::Bucket(b));
            });
            if visit(Visit::Covered(r as f64 * cell)) {
                return;
            }
        }
    }
}

enum Visit {
    Bucket(usize),
    Covered(f64),
}

fn dist(cloud: &PointCloud, a: usize, b: usize) -> f64 {
    let (p, q) = (cloud.point(a), cloud.point(b));
    p.iter()
        .zip(q)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Greedy open path from city 0.
pub(super) fn nearest_neighbor(cloud: &PointCloud) -> Vec<usize> {
    let n = cloud.len();
    let mut buckets = Buckets::new(cloud);
    let remove = |buckets: &mut Buckets, i: usize| {
        let c = buckets.cell_of(cloud.point(i));
        let cell = &mut buckets.cells[c];
        let pos = cell.iter().position(|&j| j == i).unwrap();
        cell.swap_remove(pos);
    };
    let mut order = Vec::with_capacity(n);
    let mut current = 0;
    remove(&mut buckets, current);
    order.push(current);
    for _ in 1..n {
        let mut best = (f64::INFINITY, usize::MAX);
        let b = &buckets;
        b.search(cloud.point(current), |v| match v {
            Visit::Bucket(cell) => {
                for &j in &b.cells[cell] {
                    let dj = dist(cloud, current, j);
                    if dj < best.0 || (dj == best.0 && j < best.1) {
                        best = (dj, j);
                    }
                }
                false
            }
            Visit::Covered(radius) => best.0 < radius,
        });
        current = best.1;
        remove(&mut buckets, current);
        order.push(current);
    }
    order
}

/// `k` nearest other cities of every city, sorted by distance.
fn neighbour_lists(cloud: &PointCloud, k: usize) -> Vec<Vec<usize>> {
    let n = cloud.len();
    let k = k.min(n - 1);
    let buckets = Buckets::new(cloud);
    (0..n)
        .map(|i| {
            let mut found: Vec<(f64, usize)> = Vec::new();
            buckets.search(cloud.point(i), |v| match v {
                Visit::Bucket(cell) => {
                    for &j in &buckets.cells[cell] {
                        if j != i {
                            found.push((dist(cloud, i, j), j));
                        }
                    }
                    false
                }
                Visit::Covered(radius) => {
                    if found.len() < k {
                        return false;
                    }
                    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                    found.truncate(k);
                    found[k - 1].0 < radius
                }
            });
            found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            found.truncate(k);
            found.into_iter().map(|e| e.1).collect()
        })
        .collect()
}

/// Alternates 2-opt and Or-opt sweeps on the open path `order` until neither
/// improves or `max_passes` rounds have run. Every accepted move strictly
/// shortens the path.
/// Path lengths after each stage go to `trace`.
pub(super) fn two_opt(
    cloud: &PointCloud,
    order: Vec<usize>,
    max_passes: usize,
    mut trace: Option<&mut Vec<f64>>,
) -> Vec<usize> {
    if cloud.len() < 4 {
        return brute_force_small(cloud, order);
    }
    let neighbours = neighbour_lists(cloud, NEIGHBOURS);
    let mut order = order;
    let mut record = |order: &[usize]| {
        if let Some(t) = trace.as_mut() {
            t.push(path_length(cloud, order));
        }
    };
    record(&order);
    for _ in 0..max_passes {
        order = two_opt_sweeps(cloud, order, &neighbours, max_passes);
        record(&order);
        let moved = or_opt(cloud, &mut order, &neighbours);
        record(&order);
        if !moved {
            break;
        }
    }
    order
}

/// Moves segments of 1 to 3 consecutive cities, possibly reversed, next to a
/// neighbour of one of their ends. Returns whether anything moved.
fn or_opt(cloud: &PointCloud, order: &mut Vec<usize>, neighbours: &[Vec<usize>]) -> bool {
    let n = order.len();
    let mut pos = vec![0; n];
    let index = |order: &[usize], pos: &mut Vec<usize>| {
        for (k, &c) in order.iter().enumerate() {
            pos[c] = k;
        }
    };
    index(order, &mut pos);
    let mut improved = false;
    let mut i = 0;
    while i < n {
        for len in 1..=3usize {
            if i + len > n || len == n {
                break;
            }
            let (s1, se) = (order[i], order[i + len - 1]);
            let prev = i.checked_sub(1).map(|k| order[k]);
            let next = order.get(i + len).copied();
            let removed = prev.map_or(0.0, |p| dist(cloud, p, s1))
                + next.map_or(0.0, |q| dist(cloud, se, q))
                - match (prev, next) {
                    (Some(p), Some(q)) => dist(cloud, p, q),
                    _ => 0.0,
                };
            // Best insertion: (gain, edge start position or None for the ends, reversed).
            let mut best: Option<(f64, isize, bool)> = None;
            let in_segment = |k: usize| k >= i && k < i + len;
            let mut consider = |k: isize, gain: f64, reversed: bool| {
                if gain > 1e-12 && best.is_none_or(|b| gain > b.0) {
                    best = Some((gain, k, reversed));
                }
            };
            for &end in &[s1, se] {
                for &c in &neighbours[end] {
                    let kc = pos[c];
                    if in_segment(kc) {
                        continue;
                    }
                    // Edges (kc-1, kc) and (kc, kc+1), skipping those touching the segment.
                    for ka in [kc.wrapping_sub(1), kc] {
                        let kb = ka.wrapping_add(1);
                        if ka >= n || kb >= n || in_segment(ka) || in_segment(kb) {
                            continue;
                        }
                        if ka + 1 == i && i + len == kb {
                            continue;
                        }
                        // Bridging prev and next leaves an edge that is not in the path yet.
                        if Some(order[ka]) == prev && Some(order[kb]) == next {
                            continue;
                        }
                        let (a, b) = (order[ka], order[kb]);
                        let base = dist(cloud, a, b);
                        consider(
                            ka as isize,
                            removed - (dist(cloud, a, s1) + dist(cloud, se, b) - base),
                            false,
                        );
                        consider(
                            ka as isize,
                            removed - (dist(cloud, a, se) + dist(cloud, s1, b) - base),
                            true,
                        );
                    }
                    // Path ends.
                    if kc == 0 {
                        consider(-1, removed - dist(cloud, se, c), false);
                    }
                    if kc == n - 1 {
                        consider(n as isize, removed - dist(cloud, c, s1), false);
                    }
                }
            }
            if let Some((_, k, reversed)) = best {
                let mut seg: Vec<usize> = order.drain(i..i + len).collect();
                if reversed {
                    seg.reverse();
                }
                let at = if k < 0 {
                    0
                } else if k as usize >= n {
                    order.len()
                } else {
                    let a = if (k as usize) < i {
                        k as usize
                    } else {
                        k as usize - len
                    };
                    a + 1
                };
                order.splice(at..at, seg);
                index(order, &mut pos);
                improved = true;
            }
        }
        i += 1;
    }
    improved
}

fn two_opt_sweeps(
    cloud: &PointCloud,
    order: Vec<usize>,
    neighbours: &[Vec<usize>],
    max_passes: usize,
) -> Vec<usize> {
    let n = cloud.len();
    let dummy = n;
    let cost = |a: usize, b: usize| {
        if a == dummy || b == dummy {
            0.0
        } else {
            dist(cloud, a, b)
        }
    };

    let size = n + 1;
    let mut tour = order;
    tour.push(dummy);
    let mut pos = vec![0; size];
    for (i, &c) in tour.iter().enumerate() {
        pos[c] = i;
    }
    let mut active = vec![true; n];

    let reverse = |tour: &mut Vec<usize>, pos: &mut Vec<usize>, from: usize, to: usize| {
        let len = (to + size - from) % size + 1;
        let (mut i, mut j) = (from, to);
        for _ in 0..len / 2 {
            tour.swap(i, j);
            pos[tour[i]] = i;
            pos[tour[j]] = j;
            i = (i + 1) % size;
            j = (j + size - 1) % size;
        }
    };

    for _ in 0..max_passes {
        let mut improved = false;
        for a in 0..n {
            if !active[a] {
                continue;
            }
            let mut moved = false;
            'dirs: for forward in [true, false] {
                let next = |pos: &Vec<usize>, tour: &Vec<usize>, x: usize| {
                    if forward {
                        tour[(pos[x] + 1) % size]
                    } else {
                        tour[(pos[x] + size - 1) % size]
                    }
                };
                let b = next(&pos, &tour, a);
                let dab = cost(a, b);
                for &c in &neighbours[a] {
                    let g = dist(cloud, a, c);
                    if g >= dab {
                        break;
                    }
                    let d = next(&pos, &tour, c);
                    if c == b || d == a {
                        continue;
                    }
                    let delta = g + cost(b, d) - dab - cost(c, d);
                    if delta < -1e-12 {
                        // Forward: a b .. c d -> a c .. b d. Backward is the mirror image.
                        let (from, to, cfrom, cto) =
                            if forward { (b, c, d, a) } else { (a, d, c, b) };
                        let len = (pos[to] + size - pos[from]) % size + 1;
                        let (i, j) = if 2 * len <= size {
                            (pos[from], pos[to])
                        } else {
                            (pos[cfrom], pos[cto])
                        };
                        reverse(&mut tour, &mut pos, i, j);
                        for x in [a, b, c, d] {
                            if x != dummy {
                                active[x] = true;
                            }
                        }
                        moved = true;
                        break 'dirs;
                    }
                }
            }
            if moved {
                improved = true;
            } else {
                active[a] = false;
            }
        }
        if !improved {
            break;
        }
    }

    let start = (pos[dummy] + 1) % size;
    (0..n).map(|k| tour[(start + k) % size]).collect()
}

/// Exhaustive search for fewer than 4 cities.
fn brute_force_small(cloud: &PointCloud, order: Vec<usize>) -> Vec<usize> {
    if order.len() < 3 {
        return order;
    }
    let (a, b, c) = (order[0], order[1], order[2]);
    [[a, b, c], [b, a, c], [a, c, b]]
        .into_iter()
        .min_by(|x, y| path_length(cloud, x).total_cmp(&path_length(cloud, y)))
        .unwrap()
        .to_vec()
}

pub(super) fn path_length(cloud: &PointCloud, order: &[usize]) -> f64 {
    order.windows(2).map(|w| dist(cloud, w[0], w[1])).sum()
}
