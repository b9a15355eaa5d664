use super::Graph;

/// Labels connected components by breadth-first search. Component ids are
/// assigned in order of each component's smallest node id.
pub fn connected_components(graph: &Graph) -> (usize, Vec<usize>) {
    let n = graph.node_count();
    let mut assignment = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if assignment[start] != usize::MAX {
            continue;
        }
        assignment[start] = count;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in graph.neighbors(u) {
                if assignment[v] == usize::MAX {
                    assignment[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (count, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(connected_components(&Graph::unweighted(3, &[(0, 1), (1, 2), (2, 0)])).0, 1);
        assert_eq!(connected_components(&Graph::unweighted(4, &[(0, 1), (2, 3)])).0, 2);
        assert_eq!(connected_components(&Graph::unweighted(5, &[])).0, 5);
    }

    /// Transitive closure of the adjacency relation (Warshall).
    fn closure_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(u, v) in edges {
            reach[u][v] = true;
            reach[v][u] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    let via = reach[k].clone();
                    for (cell, r) in reach[i].iter_mut().zip(via) {
                        *cell |= r;
                    }
                }
            }
        }
        reach
    }

    proptest! {
        #[test]
        fn agrees_with_transitive_closure(
            n in 1usize..50,
            raw in prop::collection::vec((0usize..50, 0usize..50), 0..80),
        ) {
            let edges: Vec<(usize, usize)> =
                raw.into_iter().map(|(u, v)| (u % n, v % n)).collect();
            let g = Graph::unweighted(n, &edges);
            let (count, comp) = connected_components(&g);
            let reach = closure_oracle(n, &edges);
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(comp[i] == comp[j], reach[i][j]);
                }
            }
            let mut reps: Vec<usize> = comp.clone();
            reps.sort();
            reps.dedup();
            prop_assert_eq!(reps.len(), count);
        }
    }
}
