use alloc::vec;
use alloc::vec::Vec;

/// Anything that can be ranked by constrained dominance.
pub trait Candidate {
    fn num_objectives(&self) -> usize;
    fn objective(&self, m: usize) -> f64;
    /// Total violation; 0 means feasible.
    fn violation(&self) -> f64;
}

/// Feasibility first, then smaller violation, then Pareto dominance (minimization).
pub fn constrained_dominates<T: Candidate + ?Sized>(a: &T, b: &T) -> bool {
    let (va, vb) = (a.violation(), b.violation());
    match (va == 0.0, vb == 0.0) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => va < vb,
        (true, true) => {
            let mut strictly = false;
            for m in 0..a.num_objectives() {
                let (x, y) = (a.objective(m), b.objective(m));
                if x > y {
                    return false;
                }
                if x < y {
                    strictly = true;
                }
            }
            strictly
        }
    }
}

/// Fast non-dominated sorting; fronts hold indices in ascending order.
pub fn non_dominated_sort<T: Candidate>(items: &[T]) -> Vec<Vec<usize>> {
    let n = items.len();
    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for p in 0..n {
        for q in p + 1..n {
            if constrained_dominates(&items[p], &items[q]) {
                dominated[p].push(q);
                count[q] += 1;
            } else if constrained_dominates(&items[q], &items[p]) {
                dominated[q].push(p);
                count[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated[p] {
                count[q] -= 1;
                if count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Cuboid crowding distance of the members `front` of `items`, in `front` order.
///
/// Exact duplicates of an earlier member's objective vector get 0; the
/// cuboid is computed over the remaining distinct vectors.
pub fn crowding_distance<T: Candidate>(items: &[T], front: &[usize]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    let m_count = items[front[0]].num_objectives();
    let same = |a: usize, b: usize| (0..m_count).all(|m| items[front[a]].objective(m) == items[front[b]].objective(m));
    let unique: Vec<usize> = (0..n).filter(|&k| !(0..k).any(|j| same(j, k))).collect();
    let u = unique.len();
    if u <= 2 {
        for &k in &unique {
            dist[k] = f64::INFINITY;
        }
        return dist;
    }
    let mut order = unique;
    for m in 0..m_count {
        let value = |k: usize| items[front[k]].objective(m);
        order.sort_by(|&x, &y| value(x).total_cmp(&value(y)).then(x.cmp(&y)));
        let (lo, hi) = (value(order[0]), value(order[u - 1]));
        dist[order[0]] = f64::INFINITY;
        dist[order[u - 1]] = f64::INFINITY;
        let span = hi - lo;
        if !(span > 0.0) || !span.is_finite() {
            continue;
        }
        for w in 1..u - 1 {
            let k = order[w];
            if dist[k].is_finite() {
                dist[k] += (value(order[w + 1]) - value(order[w - 1])) / span;
            }
        }
    }
    dist
}
