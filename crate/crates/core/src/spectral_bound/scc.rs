use crate::stochastic_core::StochasticMatrix;

/// Strongly connected components of the graph `i -> j` iff
/// `p_ij > zero_threshold`, via an iterative Tarjan traversal.
///
/// Returns the component id of every node; ids are in reverse topological
/// order of the condensation (sinks first).
pub(crate) fn strongly_connected(p: &StochasticMatrix, zero_threshold: f64) -> (Vec<usize>, usize) {
    let n = p.n();
    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNVISITED; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut n_comp = 0;

    // (node, position in its successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let row = p.row(v);
            while *pos < row.len() && row.weights[*pos] <= zero_threshold {
                *pos += 1;
            }
            if *pos < row.len() {
                let w = row.cols[*pos];
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }

            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = n_comp;
                    if w == v {
                        break;
                    }
                }
                n_comp += 1;
            }
        }
    }
    (comp, n_comp)
}
