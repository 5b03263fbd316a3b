//! Sparse exact linear algebra over prime fields and the rationals: rank,
//! kernel bases, column-space bases, and traces of equivariant operators on
//! homology subquotients.
//!
//! Everything is deterministic: pivot choice breaks ties by lowest column
//! then lowest row, and all iteration runs over ordered containers. The only
//! randomness in the crate — the choice of certification primes — happens in
//! [`certification_primes`] from a caller-supplied generator.

use crate::arith::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Debug;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("operator does not preserve the subspace spanned by the basis")]
    NotInvariant,
}

/// Exact field arithmetic for the elimination routines.
pub trait FieldCtx {
    type Elem: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    /// Rescale a row by a nonzero scalar of the implementation's choice to
    /// control entry growth. Must not introduce or delete zeros.
    fn normalize_row(&self, _row: &mut BTreeMap<u32, Self::Elem>) {}
    /// Short for reports, e.g. "Q" or "F_65537".
    fn describe(&self) -> String;
}

/// The field ℚ with `BigRational` elements. Rows are rescaled to primitive
/// integer vectors between elimination steps, which keeps entry growth close
/// to fraction-free elimination.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rationals;

impl FieldCtx for Rationals {
    type Elem = Rat;
    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn from_int(&self, n: i64) -> Rat {
        Rat::from_integer(BigInt::from(n))
    }
    fn is_zero(&self, a: &Rat) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a.clone()
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn inv(&self, a: &Rat) -> Rat {
        Rat::one() / a
    }
    fn normalize_row(&self, row: &mut BTreeMap<u32, Rat>) {
        if row.is_empty() {
            return;
        }
        let mut denom_lcm = BigInt::one();
        for v in row.values() {
            denom_lcm = denom_lcm.lcm(v.denom());
        }
        let mut content = BigInt::zero();
        for v in row.values() {
            content = content.gcd(&(v.numer() * &denom_lcm / v.denom()));
        }
        if content.is_zero() || content.is_one() && denom_lcm.is_one() {
            return;
        }
        let scale = Rat::new(denom_lcm, content);
        for v in row.values_mut() {
            *v *= &scale;
        }
    }
    fn describe(&self) -> String {
        "Q".to_string()
    }
}

/// The field 𝔽_p for an odd prime p < 2^63, with elements reduced to
/// [0, p) and products taken through u128.
#[derive(Debug, Clone, Copy)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        assert!(is_prime(p), "{p} is not prime");
        PrimeField { p }
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = ((acc as u128 * base as u128) % self.p as u128) as u64;
            }
            base = ((base as u128 * base as u128) % self.p as u128) as u64;
            exp >>= 1;
        }
        acc
    }
}

impl FieldCtx for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "division by zero in F_{}", self.p);
        self.pow(*a, self.p - 2)
    }
    fn describe(&self) -> String {
        format!("F_{}", self.p)
    }
}

/// Sparse matrix with entries in a coefficient domain: no duplicate
/// positions, no stored zeros, triples sorted by (row, col).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix<E> {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<(u32, u32, E)>,
}

impl<E: Clone + PartialEq> SparseMatrix<E> {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    /// Build from (row, col, value) triples. Panics on out-of-range indices
    /// or duplicate positions; zero values are the caller's to omit.
    pub fn from_triples(
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (u32, u32, E)>,
    ) -> Self {
        let mut entries: Vec<(u32, u32, E)> = triples.into_iter().collect();
        entries.sort_by_key(|&(r, c, _)| (r, c));
        for window in entries.windows(2) {
            assert!(
                (window[0].0, window[0].1) != (window[1].0, window[1].1),
                "duplicate entry at ({}, {})",
                window[0].0,
                window[0].1
            );
        }
        for &(r, c, _) in &entries {
            assert!(
                (r as usize) < rows && (c as usize) < cols,
                "entry out of range"
            );
        }
        SparseMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn triples(&self) -> &[(u32, u32, E)] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<(u32, u32, E)> = self
            .entries
            .iter()
            .map(|(r, c, v)| (*c, *r, v.clone()))
            .collect();
        entries.sort_by_key(|&(r, c, _)| (r, c));
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Rows as sparse maps, indexable by row number.
    pub fn row_maps(&self) -> Vec<BTreeMap<u32, E>> {
        let mut rows = vec![BTreeMap::new(); self.rows];
        for (r, c, v) in &self.entries {
            rows[*r as usize].insert(*c, v.clone());
        }
        rows
    }

    /// Columns as (row, value) lists, indexable by column number.
    pub fn col_lists(&self) -> Vec<Vec<(u32, E)>> {
        let mut cols = vec![Vec::new(); self.cols];
        for (r, c, v) in &self.entries {
            cols[*c as usize].push((*r, v.clone()));
        }
        cols
    }
}

impl SparseMatrix<i64> {
    /// Reinterpret integer entries in a field, dropping anything that
    /// reduces to zero there.
    pub fn into_field<C: FieldCtx>(&self, ctx: &C) -> SparseMatrix<C::Elem> {
        let entries = self
            .entries
            .iter()
            .filter_map(|(r, c, v)| {
                let e = ctx.from_int(*v);
                if ctx.is_zero(&e) {
                    None
                } else {
                    Some((*r, *c, e))
                }
            })
            .collect();
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }
}

/// A basis of a subspace in coordinate-anchored form: `vectors[j]` has
/// coefficient 1 at `anchors[j]` and coefficient 0 at every other anchor, so
/// the coordinates of a member of the span can be read off at the anchors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedBasis<E> {
    pub anchors: Vec<u32>,
    pub vectors: Vec<BTreeMap<u32, E>>,
}

impl<E> IndexedBasis<E> {
    pub fn empty() -> Self {
        IndexedBasis {
            anchors: Vec::new(),
            vectors: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }
}

impl IndexedBasis<i64> {
    pub fn into_field<C: FieldCtx>(&self, ctx: &C) -> IndexedBasis<C::Elem> {
        IndexedBasis {
            anchors: self.anchors.clone(),
            vectors: self
                .vectors
                .iter()
                .map(|v| {
                    v.iter()
                        .filter_map(|(&c, &x)| {
                            let e = ctx.from_int(x);
                            if ctx.is_zero(&e) {
                                None
                            } else {
                                Some((c, e))
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// Result of a full row reduction: pivot columns and the reduced rows, each
/// scaled to a unit pivot, fully reduced against one another (RREF).
struct Reduced<E> {
    pivot_cols: Vec<u32>,
    rows: Vec<BTreeMap<u32, E>>,
}

/// Row-reduce to RREF with Markowitz-flavoured pivoting: pick the sparsest
/// active column (ties: lowest column index), then within it the sparsest
/// row (ties: lowest row index).
fn reduce<C: FieldCtx>(ctx: &C, row_maps: Vec<BTreeMap<u32, C::Elem>>) -> Reduced<C::Elem> {
    let mut active: Vec<Option<BTreeMap<u32, C::Elem>>> = row_maps
        .into_iter()
        .map(|r| if r.is_empty() { None } else { Some(r) })
        .collect();

    // Column occupancy among active rows, and a (count, col) ordering of it.
    let mut col_rows: HashMap<u32, BTreeSet<usize>> = HashMap::new();
    for (idx, row) in active.iter().enumerate() {
        if let Some(row) = row {
            for &c in row.keys() {
                col_rows.entry(c).or_default().insert(idx);
            }
        }
    }
    let mut by_count: BTreeSet<(u32, u32)> = col_rows
        .iter()
        .map(|(&c, rows)| (rows.len() as u32, c))
        .collect();

    let detach = |col_rows: &mut HashMap<u32, BTreeSet<usize>>,
                  by_count: &mut BTreeSet<(u32, u32)>,
                  c: u32,
                  idx: usize| {
        let rows = col_rows.get_mut(&c).expect("column is occupied");
        by_count.remove(&(rows.len() as u32, c));
        rows.remove(&idx);
        if rows.is_empty() {
            col_rows.remove(&c);
        } else {
            by_count.insert((rows.len() as u32, c));
        }
    };
    let attach = |col_rows: &mut HashMap<u32, BTreeSet<usize>>,
                  by_count: &mut BTreeSet<(u32, u32)>,
                  c: u32,
                  idx: usize| {
        let rows = col_rows.entry(c).or_default();
        if !rows.is_empty() {
            by_count.remove(&(rows.len() as u32, c));
        }
        rows.insert(idx);
        by_count.insert((rows.len() as u32, c));
    };

    let mut finished: Vec<(u32, BTreeMap<u32, C::Elem>)> = Vec::new();
    while let Some(&(_, pivot_col)) = by_count.iter().next() {
        let candidates = &col_rows[&pivot_col];
        let &pivot_idx = candidates
            .iter()
            .min_by_key(|&&idx| {
                (
                    active[idx].as_ref().map(|r| r.len()).unwrap_or(usize::MAX),
                    idx,
                )
            })
            .expect("occupied column has a row");
        let pivot_row = active[pivot_idx].take().expect("pivot row is active");
        for (&c, _) in &pivot_row {
            detach(&mut col_rows, &mut by_count, c, pivot_idx);
        }
        let pivot_val = pivot_row[&pivot_col].clone();

        let eliminate_from = |row: &mut BTreeMap<u32, C::Elem>| -> Vec<(u32, bool)> {
            // Returns (column, added) support changes; `added` means the
            // column appeared, otherwise it vanished.
            let Some(coeff) = row.get(&pivot_col).cloned() else {
                return Vec::new();
            };
            let scale = ctx.neg(&ctx.mul(&coeff, &ctx.inv(&pivot_val)));
            let mut changes = Vec::new();
            for (&c, pv) in &pivot_row {
                let delta = ctx.mul(&scale, pv);
                match row.entry(c) {
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let next = ctx.add(o.get(), &delta);
                        if ctx.is_zero(&next) {
                            o.remove();
                            changes.push((c, false));
                        } else {
                            *o.get_mut() = next;
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(vac) => {
                        if !ctx.is_zero(&delta) {
                            vac.insert(delta);
                            changes.push((c, true));
                        }
                    }
                }
            }
            ctx.normalize_row(row);
            changes
        };

        let touched: Vec<usize> = col_rows
            .get(&pivot_col)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        for idx in touched {
            let mut row = active[idx].take().expect("row in occupancy is active");
            for (c, added) in eliminate_from(&mut row) {
                if added {
                    attach(&mut col_rows, &mut by_count, c, idx);
                } else {
                    detach(&mut col_rows, &mut by_count, c, idx);
                }
            }
            if row.is_empty() {
                // Fully cancelled; its columns were already detached above.
            } else {
                active[idx] = Some(row);
            }
        }
        // Reduce previously finished rows for the RREF property.
        for (_, row) in finished.iter_mut() {
            eliminate_from(row);
        }
        finished.push((pivot_col, pivot_row));
    }

    // Unit pivots, rows ordered by pivot column.
    finished.sort_by_key(|&(c, _)| c);
    let mut pivot_cols = Vec::with_capacity(finished.len());
    let mut rows = Vec::with_capacity(finished.len());
    for (c, mut row) in finished {
        let inv = ctx.inv(&row[&c]);
        for v in row.values_mut() {
            *v = ctx.mul(v, &inv);
        }
        pivot_cols.push(c);
        rows.push(row);
    }
    Reduced { pivot_cols, rows }
}

/// Exact rank over the context's field.
pub fn rank<C: FieldCtx>(ctx: &C, m: &SparseMatrix<C::Elem>) -> usize {
    reduce(ctx, m.row_maps()).pivot_cols.len()
}

/// Basis of the right kernel, anchored at the non-pivot columns.
pub fn kernel_basis<C: FieldCtx>(ctx: &C, m: &SparseMatrix<C::Elem>) -> IndexedBasis<C::Elem> {
    let reduced = reduce(ctx, m.row_maps());
    let pivot_set: BTreeSet<u32> = reduced.pivot_cols.iter().copied().collect();
    let mut anchors = Vec::new();
    let mut vectors = Vec::new();
    for f in 0..m.cols as u32 {
        if pivot_set.contains(&f) {
            continue;
        }
        let mut v = BTreeMap::new();
        v.insert(f, ctx.one());
        for (row, &c) in reduced.rows.iter().zip(&reduced.pivot_cols) {
            if let Some(x) = row.get(&f) {
                v.insert(c, ctx.neg(x));
            }
        }
        anchors.push(f);
        vectors.push(v);
    }
    IndexedBasis { anchors, vectors }
}

/// Basis of the column space, anchored at pivot coordinates, obtained by
/// reducing the transpose.
pub fn column_space_basis<C: FieldCtx>(
    ctx: &C,
    m: &SparseMatrix<C::Elem>,
) -> IndexedBasis<C::Elem> {
    let reduced = reduce(ctx, m.transpose().row_maps());
    IndexedBasis {
        anchors: reduced.pivot_cols,
        vectors: reduced.rows,
    }
}

/// Apply a square operator (given by its column lists) to a sparse vector.
pub fn apply_columns<C: FieldCtx>(
    ctx: &C,
    cols: &[Vec<(u32, C::Elem)>],
    v: &BTreeMap<u32, C::Elem>,
) -> BTreeMap<u32, C::Elem> {
    let mut out: BTreeMap<u32, C::Elem> = BTreeMap::new();
    for (&c, x) in v {
        for (r, a) in &cols[c as usize] {
            let delta = ctx.mul(a, x);
            match out.entry(*r) {
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let next = ctx.add(o.get(), &delta);
                    if ctx.is_zero(&next) {
                        o.remove();
                    } else {
                        *o.get_mut() = next;
                    }
                }
                std::collections::btree_map::Entry::Vacant(vac) => {
                    if !ctx.is_zero(&delta) {
                        vac.insert(delta);
                    }
                }
            }
        }
    }
    out
}

/// Trace of the operator `g` restricted to the span of `basis`, which must
/// be g-invariant. Coordinates are read off at the anchors; the residual
/// check catches any escape from the span.
pub fn trace_on_span<C: FieldCtx>(
    ctx: &C,
    g: &SparseMatrix<C::Elem>,
    basis: &IndexedBasis<C::Elem>,
) -> Result<C::Elem, LinalgError> {
    let cols = g.col_lists();
    let anchor_pos: HashMap<u32, usize> = basis
        .anchors
        .iter()
        .enumerate()
        .map(|(j, &a)| (a, j))
        .collect();
    let mut trace = ctx.zero();
    for (j, v) in basis.vectors.iter().enumerate() {
        let w = apply_columns(ctx, &cols, v);
        // Read coordinates at anchors, then check the residual vanishes.
        let mut residual = w;
        let coords: Vec<(usize, C::Elem)> = residual
            .iter()
            .filter_map(|(&c, x)| anchor_pos.get(&c).map(|&l| (l, x.clone())))
            .collect();
        for (l, coeff) in &coords {
            if *l == j {
                trace = ctx.add(&trace, coeff);
            }
            for (&c, x) in &basis.vectors[*l] {
                let delta = ctx.neg(&ctx.mul(coeff, x));
                match residual.entry(c) {
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let next = ctx.add(o.get(), &delta);
                        if ctx.is_zero(&next) {
                            o.remove();
                        } else {
                            *o.get_mut() = next;
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(vac) => {
                        if !ctx.is_zero(&delta) {
                            vac.insert(delta);
                        }
                    }
                }
            }
        }
        if !residual.is_empty() {
            return Err(LinalgError::NotInvariant);
        }
    }
    Ok(trace)
}

/// Trace of the operator induced by `g` on ker/im: trace on the kernel basis
/// minus trace on the image basis. Both spans must be g-invariant.
pub fn trace_on_subquotient<C: FieldCtx>(
    ctx: &C,
    g: &SparseMatrix<C::Elem>,
    kernel: &IndexedBasis<C::Elem>,
    image: &IndexedBasis<C::Elem>,
) -> Result<C::Elem, LinalgError> {
    let on_kernel = trace_on_span(ctx, g, kernel)?;
    let on_image = trace_on_span(ctx, g, image)?;
    Ok(ctx.sub(&on_kernel, &on_image))
}

/// Union-find with path compression and union by size.
struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn size_of(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            false
        } else {
            let (small, large) = if self.size[ra] < self.size[rb] {
                (ra, rb)
            } else {
                (rb, ra)
            };
            self.parent[small] = large;
            self.size[large] += self.size[small];
            true
        }
    }
}

/// Shape test for the fast path: every column has at most two entries, all
/// entries are ±1, and two-entry columns have opposite signs.
fn incidence_columns(m: &SparseMatrix<i64>) -> Option<Vec<Vec<(u32, i64)>>> {
    let cols = m.col_lists();
    for col in &cols {
        if col.len() > 2 || col.iter().any(|(_, v)| v.abs() != 1) {
            return None;
        }
        if col.len() == 2 && col[0].1 + col[1].1 != 0 {
            return None;
        }
    }
    Some(cols)
}

/// Rank of a signed-incidence-shaped integer matrix, valid over every field:
/// each two-entry column is an edge between its rows, each one-entry column
/// ties its row to a common ground node, and the rank is (#nodes touched) −
/// (#connected components among them).
pub fn incidence_rank(m: &SparseMatrix<i64>) -> Option<usize> {
    let cols = incidence_columns(m)?;
    let ground = m.rows; // virtual node
    let mut uf = UnionFind::new(m.rows + 1);
    let mut touched: BTreeSet<usize> = BTreeSet::new();
    for col in &cols {
        match col.as_slice() {
            [] => {}
            [(r, _)] => {
                touched.insert(*r as usize);
                touched.insert(ground);
                uf.union(*r as usize, ground);
            }
            [(r1, _), (r2, _)] => {
                touched.insert(*r1 as usize);
                touched.insert(*r2 as usize);
                uf.union(*r1 as usize, *r2 as usize);
            }
            _ => unreachable!(),
        }
    }
    let touched_list: Vec<usize> = touched.iter().copied().collect();
    let mut roots = BTreeSet::new();
    for &t in &touched_list {
        roots.insert(uf.find(t));
    }
    Some(touched_list.len() - roots.len())
}

/// Kernel basis of a signed-incidence-shaped integer matrix via fundamental
/// cycles of a spanning forest: each non-forest column anchors one kernel
/// vector supported on itself and the forest path closing its cycle. The
/// coefficients are ±1, so the basis is valid over every field.
pub fn incidence_kernel(m: &SparseMatrix<i64>) -> Option<IndexedBasis<i64>> {
    let cols = incidence_columns(m)?;
    let ground = m.rows;
    let mut uf = UnionFind::new(m.rows + 1);
    // Forest structure: parent node and the (column, flow sign) linking a
    // node to its parent. Flow sign +1 means the column's unit flow runs
    // from the node toward the parent.
    let mut parent: Vec<Option<(usize, u32, i64)>> = vec![None; m.rows + 1];
    let mut anchors = Vec::new();
    let mut vectors = Vec::new();

    // Walk up the forest accumulating ±1 flows per column into `path`.
    let path_to_root = |parent: &Vec<Option<(usize, u32, i64)>>,
                        mut node: usize,
                        sign: i64,
                        path: &mut BTreeMap<u32, i64>| {
        while let Some((up, col, s)) = parent[node] {
            let entry = path.entry(col).or_insert(0);
            *entry += sign * s;
            if *entry == 0 {
                path.remove(&col);
            }
            node = up;
        }
        node
    };

    for (ci, col) in cols.iter().enumerate() {
        let ci = ci as u32;
        // Interpret the column as a flow edge from `neg` to `pos` (with the
        // virtual ground standing in for a missing entry), so that unit
        // flow on the edge produces the column itself.
        let (pos, neg) = match col.as_slice() {
            [] => {
                // Zero column: e_ci alone is a kernel vector.
                anchors.push(ci);
                vectors.push(BTreeMap::from([(ci, 1)]));
                continue;
            }
            [(r, v)] => {
                if *v > 0 {
                    (*r as usize, ground)
                } else {
                    (ground, *r as usize)
                }
            }
            [(r1, v1), (r2, _)] => {
                if *v1 > 0 {
                    (*r1 as usize, *r2 as usize)
                } else {
                    (*r2 as usize, *r1 as usize)
                }
            }
            _ => unreachable!(),
        };
        let (rp, rn) = (uf.size_of(pos), uf.size_of(neg));
        if uf.union(pos, neg) {
            // Forest edge: re-root the smaller tree at its endpoint and hang
            // it under the other endpoint, keeping total re-rooting work
            // near-linear.
            if rn <= rp {
                reroot(&mut parent, neg);
                parent[neg] = Some((pos, ci, 1));
            } else {
                reroot(&mut parent, pos);
                parent[pos] = Some((neg, ci, -1));
            }
        } else {
            // Chord: unit flow on ci plus the signed forest path from pos
            // back to neg closes the cycle.
            let mut v = BTreeMap::from([(ci, 1)]);
            let mut path = BTreeMap::new();
            let root_a = path_to_root(&parent, pos, 1, &mut path);
            let root_b = path_to_root(&parent, neg, -1, &mut path);
            debug_assert_eq!(root_a, root_b, "chord endpoints share a tree");
            for (c, s) in path {
                debug_assert!(s.abs() == 1);
                v.insert(c, s);
            }
            anchors.push(ci);
            vectors.push(v);
        }
    }
    Some(IndexedBasis { anchors, vectors })
}

/// Reverse every parent pointer on the path from `node` to its root, making
/// `node` the root of its tree.
fn reroot(parent: &mut [Option<(usize, u32, i64)>], node: usize) {
    let mut chain = Vec::new();
    let mut cur = node;
    while let Some(link) = parent[cur] {
        chain.push((cur, link));
        cur = link.0;
    }
    for (child, (up, col, sign)) in chain.into_iter().rev() {
        parent[up] = Some((child, col, -sign));
        parent[child] = None;
    }
    parent[node] = None;
}

/// Deterministic Miller–Rabin, exact for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        base %= n;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod(acc, base);
            }
            base = mulmod(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Lower (exclusive) and upper (exclusive) bounds for certification primes.
pub const PRIME_LOWER: u64 = 1 << 21;
pub const PRIME_UPPER: u64 = 1 << 23;

/// `count` distinct random primes in (2^21, 2^23).
pub fn certification_primes(rng: &mut impl Rng, count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    while primes.len() < count {
        let candidate = rng.gen_range(PRIME_LOWER + 1..PRIME_UPPER) | 1;
        if is_prime(candidate) && !primes.contains(&candidate) {
            primes.push(candidate);
        }
    }
    primes
}

/// The representative of `residue` mod `modulus` in (−modulus/2, modulus/2].
pub fn symmetric_lift(residue: u64, modulus: u64) -> i64 {
    let r = residue % modulus;
    if r * 2 > modulus {
        -((modulus - r) as i64)
    } else {
        r as i64
    }
}

/// Combine residues mod pairwise-coprime moduli and lift symmetrically to
/// the representative of smallest absolute value.
pub fn crt_lift(residues: &[(u64, u64)]) -> BigInt {
    let mut value = BigInt::zero();
    let mut modulus = BigInt::one();
    for &(r, p) in residues {
        let p_big = BigInt::from(p);
        // value' ≡ value (mod modulus), value' ≡ r (mod p).
        let diff = (BigInt::from(r) - &value).mod_floor(&p_big);
        let inv = mod_inverse(&modulus, &p_big);
        let step = (diff * inv).mod_floor(&p_big);
        value += step * &modulus;
        modulus *= p_big;
    }
    let half = &modulus / 2;
    if value > half {
        value -= &modulus;
    }
    value
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "moduli must be coprime");
    e.x.mod_floor(m)
}
