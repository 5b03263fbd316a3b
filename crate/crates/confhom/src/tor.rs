//! Derived-functor columns for the homology of a graph with distinguished
//! bivalent vertices.
//!
//! Exploding a set `B` of bivalent vertices caps the two half-edges at each
//! `b ∈ B` with fresh leaves.  Homology of the exploded graph then carries
//! one degree-raising operator per `b` — the difference of the two leaf
//! stabilizations, pushed through the quotient bases — and these operators
//! pairwise commute up to the label bookkeeping of weighted chain modules.
//! The associated Koszul complex has `p`-th term
//!
//! ```text
//!   X_p = ⊕_{T ⊆ B, |T| = p} ⊕_{ℓ: T ↪ {1..k}} H_q(exploded graph; k − p particles)
//! ```
//!
//! and differential removing one marked vertex at a time, applying its
//! operator with the removed label spliced back into the particle set.  The
//! homology of this complex in column `p` is the `p`-th left derived functor
//! of "tensor with the ground field" applied to the homology module — the
//! quantity [`tor_column`] returns, one weight at a time.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::Rat;
use crate::graph::Graph;
use crate::homology::{Engine, HomologyBasis, HomologyError};
use crate::linalg::{rank, Rationals, SparseMatrix};
use crate::swiatkowski::stabilization_matrix;

/// One Koszul layer: the marked subsets `T` (as indices into the sorted
/// vertex set) paired with the label injections, in enumeration order.
struct Layer {
    blocks: Vec<(Vec<usize>, Vec<u8>)>,
    offset: HashMap<(Vec<usize>, Vec<u8>), usize>,
    module_dim: usize,
}

impl Layer {
    fn new(set_size: usize, p: usize, k: u64, module_dim: usize) -> Self {
        let mut blocks = Vec::new();
        for t_set in subsets(set_size, p) {
            for ell in injections(k, p) {
                blocks.push((t_set.clone(), ell));
            }
        }
        let offset = blocks
            .iter()
            .enumerate()
            .map(|(j, b)| (b.clone(), j))
            .collect();
        Layer {
            blocks,
            offset,
            module_dim,
        }
    }

    fn dim(&self) -> usize {
        self.blocks.len() * self.module_dim
    }
}

/// All `p`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p);
    fn rec(n: usize, p: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        let need = p - cur.len();
        for j in start..=(n.saturating_sub(need)) {
            cur.push(j);
            rec(n, p, j + 1, cur, out);
            cur.pop();
        }
    }
    if p <= n {
        rec(n, p, 0, &mut cur, &mut out);
    }
    out
}

/// All ordered `p`-tuples of distinct labels from `1..=k`, lexicographically.
fn injections(k: u64, p: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if (p as u64) > k {
        return out;
    }
    let mut cur = Vec::with_capacity(p);
    let mut used = vec![false; k as usize + 1];
    fn rec(k: u8, p: usize, cur: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for t in 1..=k {
            if used[t as usize] {
                continue;
            }
            used[t as usize] = true;
            cur.push(t);
            rec(k, p, cur, used, out);
            cur.pop();
            used[t as usize] = false;
        }
    }
    rec(k as u8, p, &mut cur, &mut used, &mut out);
    out
}

/// Apply an integer matrix to a sparse rational vector.
fn apply(m: &SparseMatrix<i64>, v: &BTreeMap<u32, Rat>) -> BTreeMap<u32, Rat> {
    let mut out: BTreeMap<u32, Rat> = BTreeMap::new();
    for &(r, c, val) in m.triples() {
        if let Some(x) = v.get(&c) {
            let term = x * Rat::from_integer(BigInt::from(val));
            let entry = out
                .entry(r)
                .or_insert_with(|| Rat::from_integer(BigInt::from(0)));
            *entry += term;
        }
    }
    out.retain(|_, x| !x.is_zero());
    out
}

fn sub(a: BTreeMap<u32, Rat>, b: BTreeMap<u32, Rat>) -> BTreeMap<u32, Rat> {
    let mut out = a;
    for (r, x) in b {
        let entry = out
            .entry(r)
            .or_insert_with(|| Rat::from_integer(BigInt::from(0)));
        *entry -= x;
    }
    out.retain(|_, x| !x.is_zero());
    out
}

/// The degree-raising operators in homology at source weight `w`:
/// `maps[b][j - 1][h]` is the image, in the weight-`w + 1` quotient basis,
/// of the `h`-th homology class, acted on by marked vertex `b` with the new
/// particle spliced in at position `j ∈ 1..=w+1`.
#[allow(clippy::type_complexity)]
fn operator_columns(
    engine: &Engine,
    exploded: &Graph,
    leaf_pairs: &[(usize, usize)],
    q: usize,
    w: u64,
) -> Result<Vec<Vec<Vec<Vec<Rat>>>>, HomologyError> {
    let src: std::sync::Arc<HomologyBasis> = engine.rational_bases(exploded, w, q)?;
    let dst = engine.rational_bases(exploded, w + 1, q)?;
    let from = engine.complex(exploded, w)?;
    let to = engine.complex(exploded, w + 1)?;
    let reps: Vec<&BTreeMap<u32, Rat>> = src
        .free
        .iter()
        .map(|&f| &src.kernel.vectors[f as usize])
        .collect();
    let mut maps = Vec::with_capacity(leaf_pairs.len());
    for &(leaf_a, leaf_b) in leaf_pairs {
        let stab_a = stabilization_matrix(&from, &to, q, leaf_a)?;
        let stab_b = stabilization_matrix(&from, &to, q, leaf_b)?;
        let base: Vec<BTreeMap<u32, Rat>> = reps
            .iter()
            .map(|rep| sub(apply(&stab_a, rep), apply(&stab_b, rep)))
            .collect();
        let mut per_j = Vec::with_capacity(w as usize + 1);
        for j in 1..=(w + 1) {
            // Relabel so the fresh particle (label w+1) lands at position j,
            // shifting the labels j..=w up by one.
            let perm: Vec<u8> = (1..=w + 1)
                .map(|t| {
                    if t == w + 1 {
                        j as u8
                    } else if t < j {
                        t as u8
                    } else {
                        (t + 1) as u8
                    }
                })
                .collect();
            let act = to.action_matrix(q, &perm);
            let mut cols = Vec::with_capacity(base.len());
            for chain in &base {
                let moved = apply(&act, chain);
                cols.push(dst.homology_coords(&moved)?);
            }
            per_j.push(cols);
        }
        maps.push(per_j);
    }
    Ok(maps)
}

/// The Koszul differential out of column `p ≥ 1` in weight `k`, as a sparse
/// rational matrix from the `(T, ℓ)`-block decomposition.
fn koszul_differential(
    engine: &Engine,
    exploded: &Graph,
    leaf_pairs: &[(usize, usize)],
    q: usize,
    k: u64,
    p: usize,
) -> Result<SparseMatrix<Rat>, HomologyError> {
    debug_assert!(p >= 1 && p <= leaf_pairs.len() && (p as u64) <= k);
    let src_module = engine.rational_bases(exploded, k - p as u64, q)?;
    let dst_module = engine.rational_bases(exploded, k - p as u64 + 1, q)?;
    let src = Layer::new(leaf_pairs.len(), p, k, src_module.dim());
    let dst = Layer::new(leaf_pairs.len(), p - 1, k, dst_module.dim());
    let ops = operator_columns(engine, exploded, leaf_pairs, q, k - p as u64)?;
    let mut triples: Vec<(u32, u32, Rat)> = Vec::new();
    for (block, (t_set, ell)) in src.blocks.iter().enumerate() {
        let col0 = block * src.module_dim;
        for pos in 0..t_set.len() {
            let removed = t_set[pos];
            let label = ell[pos];
            let mut t_rest = t_set.clone();
            t_rest.remove(pos);
            let mut ell_rest = ell.clone();
            ell_rest.remove(pos);
            // Position of the removed label among the particles not claimed
            // by the remaining injection.
            let j = (1..label).filter(|t| !ell_rest.contains(t)).count() + 1;
            let negate = pos % 2 == 1;
            let row0 = dst.offset[&(t_rest, ell_rest)] * dst.module_dim;
            let cols = &ops[removed][j - 1];
            for (h, col) in cols.iter().enumerate() {
                for (r, val) in col.iter().enumerate() {
                    if val.is_zero() {
                        continue;
                    }
                    let signed = if negate { -val.clone() } else { val.clone() };
                    triples.push(((row0 + r) as u32, (col0 + h) as u32, signed));
                }
            }
        }
    }
    Ok(SparseMatrix::from_triples(dst.dim(), src.dim(), triples))
}

/// Dimension of the `p`-th Koszul homology of the weight-`k` part of
/// `H_q(exploded graph)` over the operators attached to the bivalent
/// vertices in `twists`.  `twists = ∅` returns the plain Betti number;
/// columns beyond `|twists|` (or beyond `k`) vanish identically.
pub fn tor_column(
    engine: &Engine,
    g: &Graph,
    twists: &std::collections::BTreeSet<String>,
    q: usize,
    p: usize,
    k: u64,
) -> Result<u64, HomologyError> {
    let mut leaf_pairs = Vec::with_capacity(twists.len());
    for name in twists {
        let v = g.vertex_index(name)?;
        if g.degree(v) != 2 {
            return Err(HomologyError::NotBivalent(name.clone()));
        }
    }
    if p > twists.len() || (p as u64) > k {
        return Ok(0);
    }
    let exploded = g.explode(twists)?;
    for name in twists {
        let v = g.vertex_index(name)?;
        let halves = g.half_edges_at(v);
        let leaf_a = exploded.vertex_index(&format!("{name}#{}", halves[0]))?;
        let leaf_b = exploded.vertex_index(&format!("{name}#{}", halves[1]))?;
        leaf_pairs.push((leaf_a, leaf_b));
    }
    let module_dim = engine.rational_bases(&exploded, k - p as u64, q)?.dim();
    let x_dim = Layer::new(twists.len(), p, k, module_dim).dim() as u64;
    let rank_out = if p >= 1 {
        let d = koszul_differential(engine, &exploded, &leaf_pairs, q, k, p)?;
        rank(&Rationals, &d) as u64
    } else {
        0
    };
    let rank_in = if p + 1 <= twists.len() && (p as u64) < k {
        let d = koszul_differential(engine, &exploded, &leaf_pairs, q, k, p + 1)?;
        rank(&Rationals, &d) as u64
    } else {
        0
    };
    let dim = x_dim as i64 - rank_out as i64 - rank_in as i64;
    assert!(
        dim >= 0,
        "Koszul ranks exceed the column dimension — differential wiring bug"
    );
    Ok(dim as u64)
}
