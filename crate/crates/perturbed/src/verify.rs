//! Independent checkers. These re-derive every fact from the union graph
//! itself instead of trusting whatever the constructors claim, and they are
//! total: malformed inputs return false, never an error.

use crate::graph::EdgeView;
use crate::random::{DPart, PerturbedGraph};
use crate::span::{Cycle, Matching, TreeEmbedding};
use crate::tree::Tree;
use crate::{Error, Result};

/// True iff the cycle visits every vertex of the host exactly once and each
/// consecutive pair, wrap-around included, is a host edge.
pub fn is_hamilton_cycle<E: EdgeView>(union: &E, c: &Cycle) -> bool {
    let n = union.n_vertices();
    let verts = c.vertices();
    if verts.len() != n || n < 3 {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in verts {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    (0..n).all(|i| union.connects(verts[i], verts[(i + 1) % n]))
}

/// True iff the edges are pairwise disjoint host edges covering every
/// vertex. Odd orders fail by counting.
pub fn is_perfect_matching<E: EdgeView>(union: &E, m: &Matching) -> bool {
    let n = union.n_vertices();
    if n % 2 != 0 || m.len() * 2 != n {
        return false;
    }
    let mut covered = vec![false; n];
    for &(x, y) in m.edges() {
        if x >= n || y >= n || x == y || covered[x] || covered[y] {
            return false;
        }
        if !union.connects(x, y) {
            return false;
        }
        covered[x] = true;
        covered[y] = true;
    }
    covered.iter().all(|&c| c)
}

/// True iff the embedding maps exactly the vertices of `t`, injectively,
/// and every tree edge lands on a host edge.
pub fn is_valid_tree_embedding<E: EdgeView>(union: &E, t: &Tree, e: &TreeEmbedding) -> bool {
    let n = union.n_vertices();
    let mut used = vec![false; n];
    let images = e.images();
    if images.len() < t.universe() {
        return false;
    }
    for (v, img) in images.iter().enumerate() {
        match (t.contains(v), img) {
            (true, Some(h)) => {
                if *h >= n || used[*h] {
                    return false;
                }
                used[*h] = true;
            }
            (true, None) => return false,
            (false, Some(_)) => return false,
            (false, None) => {}
        }
    }
    for v in t.vertices() {
        let hv = e.image(v).expect("checked above");
        for &w in t.neighbors(v) {
            let w = w as usize;
            if w > v {
                match e.image(w) {
                    Some(hw) if union.connects(hv, hw) => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

/// Pigeonhole witness that no perfect matching exists: more big-side
/// vertices are isolated in both random rounds than the small side can
/// absorb, and the dense part gives them no other partners.
#[derive(Debug, Clone)]
pub struct NoPmCertificate {
    pub small_side: usize,
    pub isolated: Vec<usize>,
}

/// Looks for the isolated-vertex obstruction on a complete-bipartite dense
/// part. Errs on other dense-part kinds, where the argument does not apply.
pub fn certify_no_pm_bipartite(pg: &PerturbedGraph) -> Result<Option<NoPmCertificate>> {
    let DPart::CompleteBipartite { small, n } = *pg.dpart() else {
        return Err(Error::NotBipartiteKind);
    };
    let isolated: Vec<usize> = (small..n).filter(|&v| pg.random_isolated(v)).collect();
    if isolated.len() > small {
        Ok(Some(NoPmCertificate {
            small_side: small,
            isolated,
        }))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::random::{GAlphaKind, Seed};
    use crate::span::Path;

    #[test]
    fn hamilton_checker_on_cycles() {
        let n = 8;
        let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.push((n - 1, 0));
        let g = Graph::build(n, &edges).unwrap();
        let good = Cycle::new((0..n).collect());
        assert!(is_hamilton_cycle(&g, &good));
        // Missing a vertex.
        let short = Cycle::new((0..n - 1).collect());
        assert!(!is_hamilton_cycle(&g, &short));
        // A repeated vertex.
        let mut rep: Vec<usize> = (0..n - 1).collect();
        rep.push(0);
        assert!(!is_hamilton_cycle(&g, &Cycle::new(rep)));
        // One non-edge hop: swapping two non-adjacent vertices breaks it.
        let mut swapped: Vec<usize> = (0..n).collect();
        swapped.swap(2, 5);
        assert!(!is_hamilton_cycle(&g, &Cycle::new(swapped)));
    }

    #[test]
    fn matching_checker() {
        let g = Graph::build(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(is_perfect_matching(&g, &Matching::new(vec![(0, 1), (2, 3)])));
        // Dropping an edge leaves vertices uncovered.
        assert!(!is_perfect_matching(&g, &Matching::new(vec![(0, 1)])));
        // A non-edge pair.
        assert!(!is_perfect_matching(&g, &Matching::new(vec![(0, 2), (1, 3)])));
        // Odd order never has one.
        let odd = Graph::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(!is_perfect_matching(&odd, &Matching::new(vec![(0, 1)])));
    }

    #[test]
    fn tree_embedding_checker() {
        let t = Tree::new(3, &[(0, 1), (1, 2)]).unwrap();
        let g = Graph::build(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let place = |imgs: Vec<Option<usize>>| TreeEmbedding::from_parts(t.clone(), imgs);
        assert!(is_valid_tree_embedding(
            &g,
            &t,
            &place(vec![Some(0), Some(1), Some(2)])
        ));
        // Swapping images of the endpoints of a path breaks adjacency.
        assert!(!is_valid_tree_embedding(
            &g,
            &t,
            &place(vec![Some(1), Some(0), Some(2)])
        ));
        // Non-injective.
        assert!(!is_valid_tree_embedding(
            &g,
            &t,
            &place(vec![Some(0), Some(1), Some(1)])
        ));
        // Unplaced alive vertex.
        assert!(!is_valid_tree_embedding(
            &g,
            &t,
            &place(vec![Some(0), Some(1), None])
        ));
    }

    #[test]
    fn checkers_accept_union_views() {
        // The perturbed model is queried through its implicit union.
        let pg = PerturbedGraph::sample(
            60,
            0.2,
            3.0,
            GAlphaKind::CliqueBlowup,
            Seed::new(9, 0),
        )
        .unwrap();
        let p = Path::new(vec![0, 1]);
        assert!(p.is_valid_in(&pg) || !pg.union_has_edge(0, 1));
    }

    #[test]
    fn bipartite_certificate_cases() {
        let n = 10;
        let empty = Graph::empty(n);
        let pg = PerturbedGraph::from_parts(
            0.3,
            1.0,
            GAlphaKind::CompleteBipartite,
            DPart::CompleteBipartite { small: 3, n },
            empty.clone(),
            empty.clone(),
        )
        .unwrap();
        let cert = certify_no_pm_bipartite(&pg).unwrap().unwrap();
        assert_eq!(cert.small_side, 3);
        assert_eq!(cert.isolated, (3..10).collect::<Vec<_>>());

        // A complete first round leaves nobody isolated.
        let mut all = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                all.push((u, v));
            }
        }
        let full = Graph::build(n, &all).unwrap();
        let pg = PerturbedGraph::from_parts(
            0.3,
            1.0,
            GAlphaKind::CompleteBipartite,
            DPart::CompleteBipartite { small: 3, n },
            full,
            empty,
        )
        .unwrap();
        assert!(certify_no_pm_bipartite(&pg).unwrap().is_none());

        // Wrong dense-part kind.
        let pg = PerturbedGraph::sample(20, 0.2, 1.0, GAlphaKind::CliqueBlowup, Seed::new(1, 0))
            .unwrap();
        assert!(matches!(
            certify_no_pm_bipartite(&pg),
            Err(Error::NotBipartiteKind)
        ));
    }

    #[test]
    fn sparse_rounds_leave_a_certificate_often() {
        // At beta = 1 roughly exp(-1) of the big side stays isolated, far
        // more than the small side can hold.
        let n = 2000;
        let mut certs = 0;
        for s in 0..5 {
            let pg = PerturbedGraph::sample(
                n,
                0.05,
                1.0,
                GAlphaKind::CompleteBipartite,
                Seed::new(77, s),
            )
            .unwrap();
            if certify_no_pm_bipartite(&pg).unwrap().is_some() {
                certs += 1;
            }
        }
        assert_eq!(certs, 5);
    }
}
