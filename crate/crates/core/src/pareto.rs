//! Pareto dominance utilities shared by front sampling, archives and selection.

use std::cmp::Ordering;

/// `true` when `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Indices of the points not dominated by any other point, in lexicographic
/// order of the points. Exact duplicates are kept once.
pub fn nondominated_indices(points: &[Vec<f64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| lex(&points[i], &points[j]).then(i.cmp(&j)));
    // after a lexicographic sort a point can only be dominated by an earlier one
    let mut front: Vec<usize> = Vec::new();
    if points.first().is_some_and(|p| p.len() == 2) {
        let mut best = f64::INFINITY;
        let mut last: Option<usize> = None;
        for i in order {
            let p = &points[i];
            if let Some(l) = last {
                if points[l] == *p {
                    continue;
                }
            }
            if p[1] < best {
                best = p[1];
                front.push(i);
                last = Some(i);
            }
        }
        return front;
    }
    for i in order {
        let p = &points[i];
        if front.iter().any(|&j| dominates(&points[j], p) || points[j] == *p) {
            continue;
        }
        front.push(i);
    }
    front
}

/// Nondominated subset of `points` (see [`nondominated_indices`]).
pub fn nondominated(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    nondominated_indices(points)
        .into_iter()
        .map(|i| points[i].clone())
        .collect()
}

/// Fast nondominated sorting. Returns the rank (0 = first front) of each point.
pub fn nondominated_ranks(points: &[Vec<f64>]) -> Vec<usize> {
    let n = points.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominating: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&points[i], &points[j]) {
                dominating[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominating[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut rank = vec![usize::MAX; n];
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    let mut r = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            rank[i] = r;
            for &j in &dominating[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        current = next;
        r += 1;
    }
    rank
}

/// Crowding distance of each point within the set `members` (indices into `points`).
/// Boundary points get infinity.
pub fn crowding_distance(points: &[Vec<f64>], members: &[usize]) -> Vec<f64> {
    let n = members.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = points[members[0]].len();
    let mut order: Vec<usize> = (0..n).collect();
    #[allow(clippy::needless_range_loop)]
    for k in 0..m {
        order.sort_by(|&a, &b| points[members[a]][k].total_cmp(&points[members[b]][k]).then(a.cmp(&b)));
        let lo = points[members[order[0]]][k];
        let hi = points[members[order[n - 1]]][k];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            let prev = points[members[order[w - 1]]][k];
            let next = points[members[order[w + 1]]][k];
            dist[order[w]] += (next - prev) / span;
        }
    }
    dist
}

/// Reduces `points` to at most `cap` members by repeatedly dropping the most
/// crowded one. Deterministic; ties break towards the higher index.
pub fn truncate_by_crowding(points: &mut Vec<Vec<f64>>, cap: usize) {
    while points.len() > cap {
        let all: Vec<usize> = (0..points.len()).collect();
        let d = crowding_distance(points, &all);
        let excess = points.len() - cap;
        // drop in batches for large excesses, one at a time near the cap
        let batch = (excess / 2).max(1);
        let mut order: Vec<usize> = all;
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(b.cmp(&a)));
        let mut drop: Vec<usize> = order.into_iter().take(batch).collect();
        drop.sort_unstable_by(|a, b| b.cmp(a));
        for i in drop {
            points.remove(i);
        }
    }
}
