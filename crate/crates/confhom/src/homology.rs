//! Homology of the configuration chain complexes: certified Betti numbers
//! over the rationals and prime fields, symmetric-group characters on
//! homology, Specht-module multiplicities, and a torsion probe that compares
//! Betti numbers across coefficient fields.
//!
//! Rank certification: boundary matrices whose columns have the signed
//! incidence shape are ranked combinatorially (exact over every field).
//! Other ranks over the rationals run exact fraction-free elimination when
//! the matrix is small, and otherwise are computed modulo two independently
//! chosen large primes — agreement is accepted and labeled, disagreement
//! falls back to exact elimination below a configurable size and is an error
//! above it.  Characters are traced on the kernel/image subquotient in exact
//! rational arithmetic when sizes permit, else modulo several primes and
//! reassembled by the Chinese remainder theorem under the a-priori bound
//! |trace| ≤ dim C_i.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::SeedableRng;
use thiserror::Error;

use crate::arith::Rat;
use crate::graph::{Graph, GraphError};
use crate::linalg::{
    certification_primes, column_space_basis, incidence_kernel, incidence_rank, kernel_basis, rank,
    trace_on_subquotient, IndexedBasis, LinalgError, PrimeField, Rationals, SparseMatrix,
};
use crate::partitions::{
    centralizer_order, character, class_representative, partitions_of, Partition, PartitionError,
};
use crate::swiatkowski::{build_complex, ChainComplex, ComplexError, DEFAULT_BASIS_CAP};

/// Coefficient field descriptor.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Field {
    Rationals,
    Prime(u64),
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

/// How a rank (and hence a Betti number) was established.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Certification {
    Exact,
    MultiPrimeAgreement,
}

impl Certification {
    pub fn as_str(self) -> &'static str {
        match self {
            Certification::Exact => "exact",
            Certification::MultiPrimeAgreement => "multi-prime-agreement",
        }
    }

    /// A quantity derived from several ranks is only as certified as its
    /// weakest ingredient.
    pub fn combine(self, other: Certification) -> Certification {
        if self == Certification::Exact && other == Certification::Exact {
            Certification::Exact
        } else {
            Certification::MultiPrimeAgreement
        }
    }
}

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("modular ranks disagree on a {rows}x{cols} matrix too large for exact fallback")]
    CertificationFailed { rows: usize, cols: usize },
    #[error(
        "trace came out {0}, which is not an integer; this signals an equivariance or basis bug"
    )]
    NonIntegralTrace(String),
    #[error("multiplicity came out {0}, which is not a nonnegative integer; this signals a character or trace bug")]
    IllFormedMultiplicity(String),
    #[error("vertex `{0}` is not bivalent")]
    NotBivalent(String),
}

/// A certified Betti number.
#[derive(Clone, Debug)]
pub struct HomologyResult {
    /// Canonical form of the graph the complex was built on.
    pub graph: String,
    pub k: u64,
    pub i: usize,
    pub field: Field,
    /// Dimension of the degree-`i` chain group.
    pub dim: usize,
    pub betti: u64,
    pub certification: Certification,
}

#[derive(Clone, Debug)]
pub struct MultiplicityResult {
    pub graph: String,
    pub k: u64,
    pub i: usize,
    pub lambda: Partition,
    pub multiplicity: u64,
}

/// Betti comparison against one prime field.
#[derive(Clone, Debug)]
pub struct TorsionRow {
    pub prime: u64,
    pub betti_current: u64,
    /// Betti one degree down (absent at degree 0).
    pub betti_below: Option<u64>,
    /// Whether this prime exceeds the rational Betti number in either
    /// degree — the universal-coefficient signature of p-torsion.
    pub evidence: bool,
}

#[derive(Clone, Debug)]
pub struct TorsionReport {
    pub k: u64,
    pub i: usize,
    pub rational_current: u64,
    pub rational_below: Option<u64>,
    pub rows: Vec<TorsionRow>,
    pub torsion_evidence: bool,
}

/// Tunables for the engine; the defaults match the documented pipeline.
#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Total basis-size cap passed to complex construction.
    pub basis_cap: u64,
    /// At or below this many columns, rational ranks skip the modular route
    /// and eliminate exactly.
    pub exact_columns: usize,
    /// On modular disagreement, exact elimination is attempted at or below
    /// this many columns; above it the disagreement is an error.
    pub fallback_columns: usize,
    /// At or below this chain-group dimension, characters are traced in
    /// exact rational arithmetic; above it, modulo primes with CRT.
    pub trace_exact_columns: usize,
    /// Primes to use (in order) before sampling fresh ones — lets a run be
    /// replayed.
    pub primes: Option<Vec<u64>>,
    /// Seed for prime sampling; `None` draws from entropy.
    pub seed: Option<u64>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            basis_cap: DEFAULT_BASIS_CAP,
            exact_columns: 2_000,
            fallback_columns: 20_000,
            trace_exact_columns: 5_000,
            primes: None,
            seed: None,
        }
    }
}

/// Rational kernel/image data for one homology group, with coordinates.
///
/// `kernel` is anchored (each vector reads its own coefficient off a
/// dedicated coordinate), `image` spans the boundaries inside it, and
/// `image_rows` re-expresses the image in kernel coordinates as an anchored
/// row basis, so `free` — the kernel coordinates that are nobody's anchor —
/// index an honest basis of the quotient.
pub struct HomologyBasis {
    pub kernel: IndexedBasis<Rat>,
    pub image: IndexedBasis<Rat>,
    pub image_rows: IndexedBasis<Rat>,
    pub free: Vec<u32>,
}

impl HomologyBasis {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Coordinates of a cycle (a chain vector annihilated by the boundary)
    /// in the quotient basis: read kernel coordinates off the anchors,
    /// verify the expansion, reduce by the image rows, keep the free slots.
    pub fn homology_coords(&self, chain: &BTreeMap<u32, Rat>) -> Result<Vec<Rat>, LinalgError> {
        let coords = coords_in_span(&self.kernel, chain)?;
        let mut reduced: BTreeMap<u32, Rat> = coords
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j as u32, c))
            .collect();
        for (a, row) in self.image_rows.anchors.iter().zip(&self.image_rows.vectors) {
            if let Some(c) = reduced.get(a).cloned() {
                for (pos, val) in row {
                    let slot = reduced.entry(*pos).or_insert_with(Rat::zero);
                    *slot -= &c * val;
                    if slot.is_zero() {
                        reduced.remove(pos);
                    }
                }
            }
        }
        debug_assert!(self
            .image_rows
            .anchors
            .iter()
            .all(|a| !reduced.contains_key(a)));
        Ok(self
            .free
            .iter()
            .map(|f| reduced.get(f).cloned().unwrap_or_else(Rat::zero))
            .collect())
    }
}

/// Express `v` in an anchored basis: coefficients are read off the anchors;
/// a nonzero residual after subtracting the expansion means `v` is outside
/// the span and is reported as non-invariance.
fn coords_in_span(
    basis: &IndexedBasis<Rat>,
    v: &BTreeMap<u32, Rat>,
) -> Result<Vec<Rat>, LinalgError> {
    let coords: Vec<Rat> = basis
        .anchors
        .iter()
        .map(|a| v.get(a).cloned().unwrap_or_else(Rat::zero))
        .collect();
    let mut residual = v.clone();
    for (c, vec) in coords.iter().zip(&basis.vectors) {
        if c.is_zero() {
            continue;
        }
        for (pos, val) in vec {
            let slot = residual.entry(*pos).or_insert_with(Rat::zero);
            *slot -= c * val;
            if slot.is_zero() {
                residual.remove(pos);
            }
        }
    }
    if residual.values().any(|x| !x.is_zero()) {
        return Err(LinalgError::NotInvariant);
    }
    Ok(coords)
}

fn identity_basis(n: usize) -> IndexedBasis<Rat> {
    IndexedBasis {
        anchors: (0..n as u32).collect(),
        vectors: (0..n as u32)
            .map(|j| {
                let mut v = BTreeMap::new();
                v.insert(j, Rat::from_integer(BigInt::from(1)));
                v
            })
            .collect(),
    }
}

type ComplexKey = (String, u64);
type RankKey = (String, u64, usize, Field);
type BasisKey = (String, u64, usize);

/// Shared computation engine with per-graph caches for complexes, boundary
/// ranks, and rational homology bases.  All caches are behind mutexes so
/// independent jobs may share one engine across threads; duplicate inserts
/// are last-writer-wins on identical keys.
pub struct Engine {
    config: EngineConfig,
    rng: Mutex<StdRng>,
    complexes: Mutex<HashMap<ComplexKey, Arc<ChainComplex>>>,
    ranks: Mutex<HashMap<RankKey, (u64, Certification)>>,
    bases: Mutex<HashMap<BasisKey, Arc<HomologyBasis>>>,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Engine {
        let rng = match config.seed {
            Some(s) => StdRng::seed_from_u64(s),
            None => StdRng::from_entropy(),
        };
        Engine {
            config,
            rng: Mutex::new(rng),
            complexes: Mutex::new(HashMap::new()),
            ranks: Mutex::new(HashMap::new()),
            bases: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_defaults() -> Engine {
        Engine::new(EngineConfig::default())
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// The chain complex of `g` at weight `k`, built once and shared.
    pub fn complex(&self, g: &Graph, k: u64) -> Result<Arc<ChainComplex>, HomologyError> {
        let key = (g.canonical_json(), k);
        if let Some(cx) = self.complexes.lock().unwrap().get(&key) {
            return Ok(cx.clone());
        }
        let built = Arc::new(build_complex(g, k, self.config.basis_cap)?);
        self.complexes.lock().unwrap().insert(key, built.clone());
        Ok(built)
    }

    /// Exact rank of an integer matrix over `field`, with the certification
    /// route taken: combinatorial for signed-incidence shapes, direct
    /// elimination over prime fields and small rational matrices, and the
    /// two-prime agreement scheme for large rational ones.
    pub fn matrix_rank(
        &self,
        m: &SparseMatrix<i64>,
        field: Field,
    ) -> Result<(u64, Certification), HomologyError> {
        if m.nnz() == 0 {
            return Ok((0, Certification::Exact));
        }
        if let Some(r) = incidence_rank(m) {
            return Ok((r as u64, Certification::Exact));
        }
        match field {
            Field::Prime(p) => {
                let ctx = PrimeField::new(p);
                Ok((rank(&ctx, &m.into_field(&ctx)) as u64, Certification::Exact))
            }
            Field::Rationals => {
                if m.cols <= self.config.exact_columns {
                    return Ok((rational_rank(m), Certification::Exact));
                }
                let primes = self.pick_primes(2);
                let ranks: Vec<usize> = primes
                    .iter()
                    .map(|&p| {
                        let ctx = PrimeField::new(p);
                        rank(&ctx, &m.into_field(&ctx))
                    })
                    .collect();
                if ranks[0] == ranks[1] {
                    Ok((ranks[0] as u64, Certification::MultiPrimeAgreement))
                } else if m.cols <= self.config.fallback_columns {
                    Ok((rational_rank(m), Certification::Exact))
                } else {
                    Err(HomologyError::CertificationFailed {
                        rows: m.rows,
                        cols: m.cols,
                    })
                }
            }
        }
    }

    fn pick_primes(&self, n: usize) -> Vec<u64> {
        let mut primes: Vec<u64> = self
            .config
            .primes
            .as_deref()
            .unwrap_or(&[])
            .iter()
            .take(n)
            .copied()
            .collect();
        if primes.len() < n {
            let mut rng = self.rng.lock().unwrap();
            let extra = certification_primes(&mut *rng, n - primes.len());
            primes.extend(extra);
        }
        primes
    }

    /// Cached rank of the boundary out of degree `i`.
    fn boundary_rank(
        &self,
        graph_key: &str,
        cx: &ChainComplex,
        i: usize,
        field: Field,
    ) -> Result<(u64, Certification), HomologyError> {
        if i == 0 || cx.dim(i) == 0 {
            return Ok((0, Certification::Exact));
        }
        let key = (graph_key.to_string(), cx.weight(), i, field);
        if let Some(&hit) = self.ranks.lock().unwrap().get(&key) {
            return Ok(hit);
        }
        let m = cx.boundary(i).expect("degree with nonzero dim is stored");
        let computed = self.matrix_rank(m, field)?;
        self.ranks.lock().unwrap().insert(key, computed);
        Ok(computed)
    }

    /// The Betti number `dim ker boundary_i − rank boundary_{i+1}` of `g`
    /// at weight `k` over `field`.
    pub fn betti(
        &self,
        g: &Graph,
        k: u64,
        i: usize,
        field: Field,
    ) -> Result<HomologyResult, HomologyError> {
        let graph_key = g.canonical_json();
        let cx = self.complex(g, k)?;
        let n = cx.dim(i);
        if n == 0 {
            return Ok(HomologyResult {
                graph: graph_key,
                k,
                i,
                field,
                dim: 0,
                betti: 0,
                certification: Certification::Exact,
            });
        }
        let (rank_out, cert_out) = self.boundary_rank(&graph_key, &cx, i, field)?;
        let (rank_in, cert_in) = self.boundary_rank(&graph_key, &cx, i + 1, field)?;
        let betti = n as u64 - rank_out - rank_in;
        Ok(HomologyResult {
            graph: graph_key,
            k,
            i,
            field,
            dim: n,
            betti,
            certification: cert_out.combine(cert_in),
        })
    }

    /// Cached rational kernel/image bases (and quotient coordinates) for
    /// the degree-`i` homology of `g` at weight `k`.
    pub fn rational_bases(
        &self,
        g: &Graph,
        k: u64,
        i: usize,
    ) -> Result<Arc<HomologyBasis>, HomologyError> {
        let key = (g.canonical_json(), k, i);
        if let Some(b) = self.bases.lock().unwrap().get(&key) {
            return Ok(b.clone());
        }
        let cx = self.complex(g, k)?;
        let ctx = Rationals;
        let kernel: IndexedBasis<Rat> = if i == 0 {
            identity_basis(cx.dim(0))
        } else {
            match cx.boundary(i) {
                None => IndexedBasis::empty(),
                Some(m) => match incidence_kernel(m) {
                    Some(kb) => kb.into_field(&ctx),
                    None => kernel_basis(&ctx, &m.into_field(&ctx)),
                },
            }
        };
        let image: IndexedBasis<Rat> = match cx.boundary(i + 1) {
            Some(m) if m.nnz() > 0 => column_space_basis(&ctx, &m.into_field(&ctx)),
            _ => IndexedBasis::empty(),
        };
        // Image vectors are cycles, so they expand in the kernel basis;
        // their coordinate rows, row-reduced, mark the quotient's pivots.
        let mut coord_triples: Vec<(u32, u32, Rat)> = Vec::new();
        for (r, v) in image.vectors.iter().enumerate() {
            for (j, c) in coords_in_span(&kernel, v)?.into_iter().enumerate() {
                if !c.is_zero() {
                    coord_triples.push((r as u32, j as u32, c));
                }
            }
        }
        let coord_matrix = SparseMatrix::from_triples(image.len(), kernel.len(), coord_triples);
        let image_rows = column_space_basis(&ctx, &coord_matrix.transpose());
        let free: Vec<u32> = (0..kernel.len() as u32)
            .filter(|j| !image_rows.anchors.contains(j))
            .collect();
        let built = Arc::new(HomologyBasis {
            kernel,
            image,
            image_rows,
            free,
        });
        self.bases.lock().unwrap().insert(key, built.clone());
        Ok(built)
    }

    /// Trace of the permutation `perm` (an explicit relabeling, given as
    /// images of `1..=k`) on the degree-`i` rational homology.
    pub fn character_of_permutation(
        &self,
        g: &Graph,
        k: u64,
        i: usize,
        perm: &[u8],
    ) -> Result<i64, HomologyError> {
        let cx = self.complex(g, k)?;
        if cx.dim(i) == 0 {
            return Ok(0);
        }
        let size_driver = cx.dim(i).max(cx.dim(i + 1));
        if size_driver <= self.config.trace_exact_columns {
            let bases = self.rational_bases(g, k, i)?;
            let op = cx.action_matrix(i, perm).into_field(&Rationals);
            let t = trace_on_subquotient(&Rationals, &op, &bases.kernel, &bases.image)?;
            rat_to_i64(&t)
        } else {
            self.character_via_crt(g, &cx, i, perm)
        }
    }

    /// Modular trace route: per prime, rebuild kernel/image over F_p, check
    /// the dimensions match the certified rational Betti number (rejecting
    /// primes of bad reduction), trace there, and reassemble the integer
    /// through the symmetric CRT lift under |trace| ≤ dim C_i.
    fn character_via_crt(
        &self,
        g: &Graph,
        cx: &ChainComplex,
        i: usize,
        perm: &[u8],
    ) -> Result<i64, HomologyError> {
        let bound = cx.dim(i) as u64;
        let betti = self.betti(g, cx.weight(), i, Field::Rationals)?.betti;
        let mut needed_product = BigUint::from(2 * bound + 1);
        let mut residues: Vec<(u64, u64)> = Vec::new();
        let mut product = BigUint::from(1u32);
        let mut attempts = 0;
        while product < needed_product || residues.len() < 2 {
            attempts += 1;
            if attempts > 16 {
                return Err(HomologyError::CertificationFailed {
                    rows: cx.dim(i.saturating_sub(1)),
                    cols: cx.dim(i),
                });
            }
            let p = self.pick_primes(residues.len() + 1)[residues.len()];
            if residues.iter().any(|&(_, q)| q == p) {
                continue;
            }
            let ctx = PrimeField::new(p);
            let kernel: IndexedBasis<u64> = if i == 0 {
                let n = cx.dim(0);
                IndexedBasis {
                    anchors: (0..n as u32).collect(),
                    vectors: (0..n as u32).map(|j| BTreeMap::from([(j, 1u64)])).collect(),
                }
            } else {
                match cx.boundary(i) {
                    None => IndexedBasis::empty(),
                    Some(m) => match incidence_kernel(m) {
                        Some(kb) => kb.into_field(&ctx),
                        None => kernel_basis(&ctx, &m.into_field(&ctx)),
                    },
                }
            };
            let image: IndexedBasis<u64> = match cx.boundary(i + 1) {
                Some(m) if m.nnz() > 0 => column_space_basis(&ctx, &m.into_field(&ctx)),
                _ => IndexedBasis::empty(),
            };
            if (kernel.len() - image.len()) as u64 != betti {
                continue; // bad reduction at p; resample
            }
            let op = cx.action_matrix(i, perm).into_field(&ctx);
            let t = trace_on_subquotient(&ctx, &op, &kernel, &image)?;
            residues.push((t, p));
            product *= BigUint::from(p);
            needed_product = BigUint::from(2 * bound + 1);
        }
        let lifted = crate::linalg::crt_lift(&residues);
        if lifted.magnitude() > &BigUint::from(bound) {
            return Err(HomologyError::NonIntegralTrace(lifted.to_string()));
        }
        Ok(lifted.to_i64().expect("bounded trace fits i64"))
    }

    /// Trace of any permutation with cycle type `class_type` on the
    /// degree-`i` rational homology (a class function, so the choice of
    /// representative is immaterial).
    pub fn homology_character(
        &self,
        g: &Graph,
        k: u64,
        i: usize,
        class_type: &Partition,
    ) -> Result<i64, HomologyError> {
        assert_eq!(class_type.size() as u64, k, "class type must have size k");
        if class_type.parts().iter().all(|&p| p == 1) {
            // Identity class: the trace is the Betti number itself.
            return Ok(self.betti(g, k, i, Field::Rationals)?.betti as i64);
        }
        let rep = class_representative(class_type, k as u32);
        let perm: Vec<u8> = rep.iter().map(|&x| (x + 1) as u8).collect();
        self.character_of_permutation(g, k, i, &perm)
    }

    /// Multiplicity of the Specht module of `lambda` padded to size `k`
    /// inside the degree-`i` rational homology, by character inner product:
    /// `(1/k!) Σ_μ |class μ| χ_{λ[k]}(μ) trace(μ)`.
    pub fn multiplicity(
        &self,
        g: &Graph,
        k: u64,
        i: usize,
        lambda: &Partition,
    ) -> Result<MultiplicityResult, HomologyError> {
        let padded = lambda.pad(k as u32)?;
        let mut sum = Rat::zero();
        for mu in partitions_of(k as u32) {
            let chi = character(&padded, &mu);
            if chi == 0 {
                continue;
            }
            let tr = self.homology_character(g, k, i, &mu)?;
            if tr == 0 {
                continue;
            }
            let z = BigInt::from(centralizer_order(&mu));
            sum += Rat::new(BigInt::from(chi) * BigInt::from(tr), z);
        }
        if !sum.is_integer() || sum.is_negative() {
            return Err(HomologyError::IllFormedMultiplicity(sum.to_string()));
        }
        let multiplicity = sum
            .to_integer()
            .to_u64()
            .ok_or_else(|| HomologyError::IllFormedMultiplicity(sum.to_string()))?;
        Ok(MultiplicityResult {
            graph: g.canonical_json(),
            k,
            i,
            lambda: lambda.clone(),
            multiplicity,
        })
    }

    /// Compare Betti numbers over the rationals and over each `F_p` in
    /// degrees `i` and `i-1`; a modular excess in either degree is flagged
    /// as evidence of p-torsion.
    pub fn torsion_probe(
        &self,
        g: &Graph,
        k: u64,
        i: usize,
        primes: &[u64],
    ) -> Result<TorsionReport, HomologyError> {
        let rational_current = self.betti(g, k, i, Field::Rationals)?.betti;
        let rational_below = if i > 0 {
            Some(self.betti(g, k, i - 1, Field::Rationals)?.betti)
        } else {
            None
        };
        let mut rows = Vec::with_capacity(primes.len());
        let mut any = false;
        for &p in primes {
            let betti_current = self.betti(g, k, i, Field::Prime(p))?.betti;
            let betti_below = if i > 0 {
                Some(self.betti(g, k, i - 1, Field::Prime(p))?.betti)
            } else {
                None
            };
            let evidence = betti_current > rational_current
                || matches!((betti_below, rational_below), (Some(bp), Some(bq)) if bp > bq);
            any |= evidence;
            rows.push(TorsionRow {
                prime: p,
                betti_current,
                betti_below,
                evidence,
            });
        }
        Ok(TorsionReport {
            k,
            i,
            rational_current,
            rational_below,
            rows,
            torsion_evidence: any,
        })
    }
}

fn rational_rank(m: &SparseMatrix<i64>) -> u64 {
    rank(&Rationals, &m.into_field(&Rationals)) as u64
}

fn rat_to_i64(x: &Rat) -> Result<i64, HomologyError> {
    if !x.is_integer() {
        return Err(HomologyError::NonIntegralTrace(x.to_string()));
    }
    x.to_integer()
        .to_i64()
        .ok_or_else(|| HomologyError::NonIntegralTrace(x.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorial;
    use crate::asymptotics::star_first_betti_closed_form;
    use crate::functions::dim_free;
    use crate::samples;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn engine() -> Engine {
        Engine::new(EngineConfig {
            seed: Some(17),
            ..EngineConfig::default()
        })
    }

    #[test]
    fn three_star_small_betti_numbers() {
        let e = engine();
        let g = samples::star(3);
        let b1 = e.betti(&g, 2, 1, Field::Rationals).unwrap();
        assert_eq!(b1.betti, 1);
        assert_eq!(b1.certification, Certification::Exact);
        let b0 = e.betti(&g, 2, 0, Field::Rationals).unwrap();
        assert_eq!(b0.betti, 1);
    }

    #[test]
    fn four_star_weight_three_first_betti() {
        let e = engine();
        assert_eq!(
            e.betti(&samples::star(4), 3, 1, Field::Rationals)
                .unwrap()
                .betti,
            61
        );
    }

    #[test]
    fn first_boundary_of_three_star_weight_two_has_rank_eleven() {
        let e = engine();
        let cx = e.complex(&samples::star(3), 2).unwrap();
        let m = cx.boundary(1).unwrap();
        assert_eq!(e.matrix_rank(m, Field::Rationals).unwrap().0, 11);
        let kernel = incidence_kernel(m).expect("release boundaries have incidence shape");
        assert_eq!(kernel.len(), 1);
    }

    #[test]
    fn disjoint_union_with_interval_counts_components() {
        let e = engine();
        let g = samples::s3_disjoint_interval();
        for field in [Field::Rationals, Field::Prime(2), Field::Prime(3)] {
            assert_eq!(e.betti(&g, 2, 0, field).unwrap().betti, 5, "{field}");
        }
    }

    #[test]
    fn loop_graph_has_factorial_circle_count() {
        let e = engine();
        let g = samples::loop_graph();
        for k in 1..=4u64 {
            let expected = factorial(k - 1).to_u64().unwrap();
            assert_eq!(e.betti(&g, k, 0, Field::Rationals).unwrap().betti, expected);
            assert_eq!(e.betti(&g, k, 1, Field::Rationals).unwrap().betti, expected);
        }
    }

    #[test]
    fn star_first_betti_matches_closed_form() {
        let e = engine();
        for n in 3..=5u64 {
            let g = samples::star(n as usize);
            for k in 2..=4u64 {
                let b = e.betti(&g, k, 1, Field::Rationals).unwrap().betti;
                assert_eq!(
                    BigInt::from(b),
                    star_first_betti_closed_form(n, k),
                    "star {n}, weight {k}"
                );
            }
        }
    }

    #[test]
    fn degree_zero_homology_counts_free_module_dimensions() {
        let e = engine();
        for (name, g) in samples::tree_test_graphs() {
            let inv = g.classify_components();
            let f = dim_free(inv.epsilon as u64, inv.lambda as u64);
            for k in 0..=3u64 {
                let b = e.betti(&g, k, 0, Field::Rationals).unwrap().betti;
                assert_eq!(
                    Rat::from_integer(BigInt::from(b)),
                    f.eval(k),
                    "graph {name}, weight {k}"
                );
            }
        }
    }

    #[test]
    fn euler_characteristic_is_field_independent() {
        let e = engine();
        for (name, g) in samples::test_graphs() {
            for k in 0..=3u64 {
                let cx = e.complex(&g, k).unwrap();
                let chi_chain: i64 = (0..=cx.max_degree())
                    .map(|i| {
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        sign * cx.dim(i) as i64
                    })
                    .sum();
                for field in [Field::Rationals, Field::Prime(2), Field::Prime(5)] {
                    let chi_homology: i64 = (0..=cx.max_degree())
                        .map(|i| {
                            let sign = if i % 2 == 0 { 1 } else { -1 };
                            sign * e.betti(&g, k, i, field).unwrap().betti as i64
                        })
                        .sum();
                    assert_eq!(chi_homology, chi_chain, "graph {name}, weight {k}, {field}");
                }
            }
        }
    }

    #[test]
    fn identity_class_traces_to_betti() {
        let e = engine();
        let g = samples::h_graph();
        for k in 1..=3u64 {
            for i in 0..=2usize {
                let tr = e
                    .homology_character(&g, k, i, &p(&vec![1; k as usize]))
                    .unwrap();
                let b = e.betti(&g, k, i, Field::Rationals).unwrap().betti;
                assert_eq!(tr, b as i64, "weight {k}, degree {i}");
            }
        }
    }

    #[test]
    fn trace_on_missing_homology_is_zero() {
        let e = engine();
        // The interval has no degree-1 chains at all.
        let tr = e
            .homology_character(&samples::interval(), 2, 1, &p(&[2]))
            .unwrap();
        assert_eq!(tr, 0);
    }

    #[test]
    fn transposition_acts_trivially_on_the_three_star_circle() {
        // H_1 of two particles on the 3-star is the circle class swapped
        // particles flow around; the relabeling action has no Koszul sign,
        // so the transposition fixes the fundamental class.  This is
        // cross-checked by the multiplicity sum rule below: mult(∅) = 1 and
        // Σ mult·dim = betti = 1 force the trivial representation.
        let e = engine();
        let tr = e
            .homology_character(&samples::star(3), 2, 1, &p(&[2]))
            .unwrap();
        assert_eq!(tr, 1);
    }

    #[test]
    fn characters_are_class_functions() {
        let e = engine();
        let g = samples::star(3);
        // Two different permutations with cycle type (2,1) on three labels.
        let a: Vec<u8> = vec![2, 1, 3];
        let b: Vec<u8> = vec![1, 3, 2];
        for i in 0..=1usize {
            let ta = e.character_of_permutation(&g, 3, i, &a).unwrap();
            let tb = e.character_of_permutation(&g, 3, i, &b).unwrap();
            assert_eq!(ta, tb, "degree {i}");
            let via_class = e.homology_character(&g, 3, i, &p(&[2, 1])).unwrap();
            assert_eq!(ta, via_class, "degree {i}");
        }
    }

    #[test]
    fn crt_trace_route_agrees_with_exact_route() {
        let exact = engine();
        let modular = Engine::new(EngineConfig {
            trace_exact_columns: 0,
            seed: Some(23),
            ..EngineConfig::default()
        });
        let g = samples::star(3);
        for class in [p(&[2, 1]), p(&[3]), p(&[1, 1, 1])] {
            for i in 0..=1usize {
                assert_eq!(
                    exact.homology_character(&g, 3, i, &class).unwrap(),
                    modular.homology_character(&g, 3, i, &class).unwrap(),
                    "class {class:?}, degree {i}"
                );
            }
        }
    }

    #[test]
    fn trivial_multiplicity_counts_unordered_cycles() {
        // The trivial-isotypic dimension of H_1 is the first Betti number of
        // the unordered configuration space (transfer isomorphism).  For the
        // 3-star that number is 2·C(k+1,2) − C(k+2,2) + 1 = 1 + (k−2)(k+1)/2,
        // from the one-label release complex: 1 at k=2, then 3, 6, 10, …
        let e = engine();
        let g = samples::star(3);
        for k in 2..=4u64 {
            let m = e.multiplicity(&g, k, 1, &p(&[])).unwrap();
            let expected = 1 + (k - 2) * (k + 1) / 2;
            assert_eq!(m.multiplicity, expected, "weight {k}");
        }
    }

    #[test]
    fn interval_components_carry_the_regular_representation() {
        let e = engine();
        let g = samples::interval();
        for k in 1..=4u64 {
            // H_0 is the regular representation: the trivial summand
            // appears once, and every lambda appears with its dimension.
            let m = e.multiplicity(&g, k, 0, &p(&[])).unwrap();
            assert_eq!(m.multiplicity, 1, "weight {k}");
        }
        let hook = e.multiplicity(&g, 3, 0, &p(&[1])).unwrap();
        assert_eq!(
            hook.multiplicity, 2,
            "standard rep in the regular rep of S_3"
        );
    }

    #[test]
    fn multiplicities_decompose_betti_numbers() {
        let e = engine();
        for (name, g) in [
            ("3-star", samples::star(3)),
            ("theta", samples::theta()),
            ("h-graph", samples::h_graph()),
        ] {
            let k = 3u64;
            for i in 0..=2usize {
                let betti = e.betti(&g, k, i, Field::Rationals).unwrap().betti;
                let mut total = 0u64;
                for mu in partitions_of(k as u32) {
                    // lambda runs over partitions padded to mu: strip the
                    // first row.
                    let lambda = p(&mu.parts()[1..]);
                    if lambda.pad(k as u32).map(|p| p == mu).unwrap_or(false) {
                        let m = e.multiplicity(&g, k, i, &lambda).unwrap();
                        total += m.multiplicity * mu.specht_dim().to_u64().unwrap();
                    }
                }
                assert_eq!(total, betti, "graph {name}, degree {i}");
            }
        }
    }

    #[test]
    fn multiplicity_requires_enough_padding_room() {
        let e = engine();
        let err = e.multiplicity(&samples::star(3), 1, 0, &p(&[1]));
        assert!(matches!(err, Err(HomologyError::Partition(_))));
    }

    #[test]
    fn torsion_probe_sees_no_torsion_on_small_cases() {
        let e = engine();
        for k in 1..=3u64 {
            for i in 0..=1usize {
                let report = e
                    .torsion_probe(&samples::star(3), k, i, &[2, 3, 5])
                    .unwrap();
                assert!(!report.torsion_evidence, "weight {k}, degree {i}");
                for row in &report.rows {
                    assert_eq!(row.betti_current, report.rational_current);
                    assert_eq!(row.betti_below, report.rational_below);
                }
            }
        }
        let interval = e.torsion_probe(&samples::interval(), 3, 0, &[2]).unwrap();
        assert_eq!(interval.rational_current, 6);
        assert_eq!(interval.rows[0].betti_current, 6);
        assert!(!interval.torsion_evidence);
    }

    #[test]
    fn forced_modular_route_matches_exact_ranks() {
        let exact = engine();
        let modular = Engine::new(EngineConfig {
            exact_columns: 10,
            seed: Some(5),
            ..EngineConfig::default()
        });
        let g = samples::h_graph();
        let a = exact.betti(&g, 3, 1, Field::Rationals).unwrap();
        let b = modular.betti(&g, 3, 1, Field::Rationals).unwrap();
        assert_eq!(a.betti, b.betti);
        assert_eq!(b.certification, Certification::MultiPrimeAgreement);
    }

    #[test]
    fn resource_cap_propagates() {
        let tiny = Engine::new(EngineConfig {
            basis_cap: 3,
            ..EngineConfig::default()
        });
        let err = tiny.betti(&samples::star(3), 3, 0, Field::Rationals);
        assert!(matches!(
            err,
            Err(HomologyError::Complex(ComplexError::ResourceCap { .. }))
        ));
    }

    #[test]
    fn quotient_coordinates_see_exactly_the_homology() {
        let e = engine();
        let g = samples::star(3);
        let bases = e.rational_bases(&g, 2, 1).unwrap();
        assert_eq!(bases.dim(), 1);
        // The kernel basis vector itself must have nonzero quotient image.
        let cycle = &bases.kernel.vectors[0];
        let coords = bases.homology_coords(cycle).unwrap();
        assert!(coords.iter().any(|c| !c.is_zero()));
        // A boundary must map to zero.
        if let Some(b) = bases.image.vectors.first() {
            let coords = bases.homology_coords(b).unwrap();
            assert!(coords.iter().all(|c| c.is_zero()));
        }
    }
}
