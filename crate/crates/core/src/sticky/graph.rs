use super::ContactGraph;

/// Σ_v deg(v)(deg(v) − 1)/2: the number of paths of length two.
pub fn path2_count(g: &ContactGraph) -> usize {
    g.degrees().iter().map(|d| d * d.saturating_sub(1) / 2).sum()
}

/// Above this many candidate orderings the certificate search gives up on
/// exhaustiveness and keeps the refined color order.
const MAX_ORDERINGS: usize = 2_000_000;

/// Canonical form of a contact graph with vertex labels (e.g. radius ranks):
/// equal strings iff the labelled graphs are isomorphic.
///
/// Vertices are first split by iterated color refinement starting from
/// (label, degree); the lexicographically smallest adjacency matrix over all
/// orderings that respect the refined classes is then taken.
pub fn graph_certificate(g: &ContactGraph, labels: &[u64]) -> String {
    let n = g.n;
    let mut adj = vec![vec![false; n]; n];
    for &(i, j) in &g.edges {
        adj[i][j] = true;
        adj[j][i] = true;
    }
    let deg = g.degrees();
    let mut color: Vec<u64> = rank(&(0..n).map(|v| (labels[v], deg[v] as u64, Vec::<u64>::new())).collect::<Vec<_>>());
    loop {
        let keyed: Vec<(u64, u64, Vec<u64>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u64> = (0..n).filter(|&w| adj[v][w]).map(|w| color[w]).collect();
                nb.sort_unstable();
                (color[v], 0, nb)
            })
            .collect();
        let next = rank(&keyed);
        let classes = |c: &[u64]| {
            let mut v = c.to_vec();
            v.sort_unstable();
            v.dedup();
            v.len()
        };
        if classes(&next) == classes(&color) {
            break;
        }
        color = next;
    }

    // classes in color order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| color[v]);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match groups.last_mut() {
            Some(gr) if color[gr[0]] == color[v] => gr.push(v),
            _ => groups.push(vec![v]),
        }
    }
    let count: usize = groups
        .iter()
        .map(|gr| (1..=gr.len()).product::<usize>())
        .fold(1usize, |a, b| a.saturating_mul(b));

    let mut best: Option<Vec<bool>> = None;
    let bits = |perm: &[usize]| -> Vec<bool> {
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                out.push(adj[perm[a]][perm[b]]);
            }
        }
        out
    };
    if count <= MAX_ORDERINGS {
        let mut groups = groups.clone();
        permute_groups(&mut groups, 0, &mut |gs| {
            let perm: Vec<usize> = gs.iter().flatten().copied().collect();
            let b = bits(&perm);
            if best.as_ref().map_or(true, |cur| b < *cur) {
                best = Some(b);
            }
        });
    } else {
        best = Some(bits(&order));
    }
    let sorted_labels: Vec<String> = order.iter().map(|&v| labels[v].to_string()).collect();
    let body: String = best
        .unwrap_or_default()
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect();
    format!("{n}|{}|{body}", sorted_labels.join(","))
}

fn rank<T: Ord + Clone>(keys: &[T]) -> Vec<u64> {
    let mut sorted: Vec<T> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("present") as u64)
        .collect()
}

/// Calls `f` with every combination of permutations of the groups.
fn permute_groups(groups: &mut [Vec<usize>], idx: usize, f: &mut impl FnMut(&[Vec<usize>])) {
    if idx == groups.len() {
        f(groups);
        return;
    }
    let len = groups[idx].len();
    heap_permute(groups, idx, len, f);
}

fn heap_permute(groups: &mut [Vec<usize>], idx: usize, k: usize, f: &mut impl FnMut(&[Vec<usize>])) {
    if k <= 1 {
        permute_groups(groups, idx + 1, f);
        return;
    }
    for i in 0..k - 1 {
        heap_permute(groups, idx, k - 1, f);
        if k % 2 == 0 {
            groups[idx].swap(i, k - 1);
        } else {
            groups[idx].swap(0, k - 1);
        }
    }
    heap_permute(groups, idx, k - 1, f);
}
