//! An independent discretized model of labeled configuration spaces, used
//! as a cross-checking oracle at small particle counts.
//!
//! Subdivide every edge of the graph into `k + 1` segments; a `d`-cell of
//! the model assigns each of the `k` labels a closed cell of the subdivided
//! graph — a vertex or a whole edge — such that the closures are pairwise
//! disjoint, with exactly `d` labels on edges.  The boundary contracts each
//! edge-label to its two endpoints with alternating signs by label order.
//! At this subdivision depth the model is a faithful combinatorial stand-in
//! for the configuration space, so its Betti numbers are an oracle for the
//! release-complex pipeline, computed here by direct elimination with no
//! shared machinery.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::Graph;
use crate::homology::Field;
use crate::linalg::{rank, PrimeField, Rationals, SparseMatrix};

/// Largest particle count the oracle accepts; the cell complex grows too
/// fast beyond it to be useful as a desk-scale cross-check.
pub const ORACLE_MAX_WEIGHT: u64 = 3;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("the discretized oracle supports at most {ORACLE_MAX_WEIGHT} particles, got {0}")]
    WeightTooLarge(u64),
}

/// One labeled cell: per label, the id of the closed cell it occupies
/// (vertex `v` of the subdivided graph is `v`, edge `e` is `V + e`).
type Cell = Vec<u16>;

struct CubeModel {
    /// Bases per dimension, in enumeration order.
    bases: Vec<Vec<Cell>>,
    /// Boundary matrices; `boundaries[d]` maps dimension `d` to `d - 1`.
    boundaries: Vec<SparseMatrix<i64>>,
}

fn build_model(g: &Graph, k: u64) -> CubeModel {
    let sub = g.subdivided(k as usize + 1);
    let v_count = sub.vertex_count();
    let e_count = sub.edge_count();
    let max_dim = (k as usize).min(3);

    // Closure of each cell id as the set of vertices it touches.
    let closure: Vec<Vec<usize>> = (0..v_count + e_count)
        .map(|id| {
            if id < v_count {
                vec![id]
            } else {
                let (a, b) = sub.endpoints(id - v_count);
                vec![a, b]
            }
        })
        .collect();

    // Enumerate all disjoint-closure assignments, label by label, cells in
    // ascending id order — deterministic.
    let mut bases: Vec<Vec<Cell>> = vec![Vec::new(); max_dim + 1];
    let mut chosen: Cell = Vec::with_capacity(k as usize);
    let mut occupied: Vec<bool> = vec![false; v_count];
    fn rec(
        k: usize,
        v_count: usize,
        total_cells: usize,
        closure: &[Vec<usize>],
        chosen: &mut Cell,
        occupied: &mut Vec<bool>,
        bases: &mut [Vec<Cell>],
    ) {
        if chosen.len() == k {
            let dim = chosen.iter().filter(|&&id| id as usize >= v_count).count();
            if dim < bases.len() {
                bases[dim].push(chosen.clone());
            }
            return;
        }
        for id in 0..total_cells {
            let verts = &closure[id];
            if verts.iter().any(|&v| occupied[v]) {
                continue;
            }
            for &v in verts {
                occupied[v] = true;
            }
            chosen.push(id as u16);
            rec(k, v_count, total_cells, closure, chosen, occupied, bases);
            chosen.pop();
            for &v in verts {
                occupied[v] = false;
            }
        }
    }
    rec(
        k as usize,
        v_count,
        v_count + e_count,
        &closure,
        &mut chosen,
        &mut occupied,
        &mut bases,
    );

    let indexes: Vec<HashMap<Cell, u32>> = bases
        .iter()
        .map(|basis| {
            basis
                .iter()
                .enumerate()
                .map(|(j, c)| (c.clone(), j as u32))
                .collect()
        })
        .collect();

    let mut boundaries = Vec::with_capacity(max_dim + 1);
    for d in 0..=max_dim {
        if d == 0 {
            boundaries.push(SparseMatrix::new(0, bases[0].len()));
            continue;
        }
        let mut acc: HashMap<(u32, u32), i64> = HashMap::new();
        for (c, cell) in bases[d].iter().enumerate() {
            // Edge labels in increasing label order give the 0-indexed
            // position that alternates the sign.
            let mut pos = 0i64;
            for (slot, &id) in cell.iter().enumerate() {
                if (id as usize) < v_count {
                    continue;
                }
                let sign = if pos % 2 == 0 { 1i64 } else { -1 };
                pos += 1;
                let (a, b) = sub.endpoints(id as usize - v_count);
                for (endpoint, end_sign) in [(b, 1i64), (a, -1i64)] {
                    let mut target = cell.clone();
                    target[slot] = endpoint as u16;
                    let row = indexes[d - 1][&target];
                    *acc.entry((row, c as u32)).or_default() += sign * end_sign;
                }
            }
        }
        let triples: Vec<(u32, u32, i64)> = acc
            .into_iter()
            .filter(|&(_, v)| v != 0)
            .map(|((r, c), v)| (r, c, v))
            .collect();
        boundaries.push(SparseMatrix::from_triples(
            bases[d - 1].len(),
            bases[d].len(),
            triples,
        ));
    }

    CubeModel { bases, boundaries }
}

fn model_rank(m: &SparseMatrix<i64>, field: Field) -> u64 {
    match field {
        Field::Rationals => rank(&Rationals, &m.into_field(&Rationals)) as u64,
        Field::Prime(p) => {
            let ctx = PrimeField::new(p);
            rank(&ctx, &m.into_field(&ctx)) as u64
        }
    }
}

/// Betti number of the discretized model of `k` labeled particles on `g`
/// in degree `i` over `field`.  Supports `k ≤ 3`.
pub fn oracle_betti(g: &Graph, k: u64, i: usize, field: Field) -> Result<u64, OracleError> {
    if k > ORACLE_MAX_WEIGHT {
        return Err(OracleError::WeightTooLarge(k));
    }
    let model = build_model(g, k);
    if i >= model.bases.len() || model.bases[i].is_empty() {
        return Ok(0);
    }
    let n = model.bases[i].len() as u64;
    let rank_out = if i == 0 {
        0
    } else {
        model_rank(&model.boundaries[i], field)
    };
    let rank_in = if i + 1 < model.boundaries.len() {
        model_rank(&model.boundaries[i + 1], field)
    } else {
        0
    };
    Ok(n - rank_out - rank_in)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::homology::Engine;
    use crate::samples;

    #[test]
    fn model_boundaries_compose_to_zero() {
        for (name, g) in samples::test_graphs() {
            for k in 0..=3u64 {
                let model = build_model(&g, k);
                for d in 2..model.boundaries.len() {
                    let inner = &model.boundaries[d];
                    let outer = &model.boundaries[d - 1];
                    let mut outer_cols: HashMap<u32, Vec<(u32, i64)>> = HashMap::new();
                    for &(r, c, v) in outer.triples() {
                        outer_cols.entry(c).or_default().push((r, v));
                    }
                    let mut acc: BTreeMap<(u32, u32), i64> = BTreeMap::new();
                    for &(r, c, v) in inner.triples() {
                        if let Some(next) = outer_cols.get(&r) {
                            for &(rr, vv) in next {
                                *acc.entry((rr, c)).or_default() += v * vv;
                            }
                        }
                    }
                    assert!(
                        acc.values().all(|&v| v == 0),
                        "graph {name}, weight {k}, dimension {d}"
                    );
                }
            }
        }
    }

    #[test]
    fn small_oracle_values() {
        let g = samples::star(3);
        assert_eq!(oracle_betti(&g, 2, 1, Field::Rationals).unwrap(), 1);
        assert_eq!(oracle_betti(&g, 2, 0, Field::Rationals).unwrap(), 1);
        let interval = samples::interval();
        assert_eq!(oracle_betti(&interval, 2, 0, Field::Rationals).unwrap(), 2);
        let circle = samples::loop_graph();
        assert_eq!(oracle_betti(&circle, 2, 0, Field::Rationals).unwrap(), 1);
        assert_eq!(oracle_betti(&circle, 2, 1, Field::Rationals).unwrap(), 1);
    }

    #[test]
    fn oracle_matches_release_complex_on_small_graphs() {
        let engine = Engine::with_defaults();
        for (name, g) in [
            ("interval", samples::interval()),
            ("3-star", samples::star(3)),
            ("loop", samples::loop_graph()),
            ("doubled-edge", samples::doubled_edge()),
        ] {
            for k in 0..=2u64 {
                for i in 0..=2usize {
                    for field in [Field::Rationals, Field::Prime(2)] {
                        let expected = engine.betti(&g, k, i, field).unwrap().betti;
                        let got = oracle_betti(&g, k, i, field).unwrap();
                        assert_eq!(
                            got, expected,
                            "graph {name}, weight {k}, degree {i}, {field}"
                        );
                    }
                }
            }
        }
        // One deeper spot-check.
        assert_eq!(
            oracle_betti(&samples::star(3), 3, 1, Field::Rationals).unwrap(),
            engine
                .betti(&samples::star(3), 3, 1, Field::Rationals)
                .unwrap()
                .betti
        );
    }

    #[test]
    fn oversized_weight_is_refused() {
        let err = oracle_betti(&samples::interval(), 4, 0, Field::Rationals);
        assert!(matches!(err, Err(OracleError::WeightTooLarge(4))));
    }
}
