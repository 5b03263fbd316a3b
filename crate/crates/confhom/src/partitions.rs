//! Integer partitions and symmetric-group representation combinatorics:
//! Specht dimensions (hook lengths), irreducible characters (Murnaghan–Nakayama),
//! Littlewood–Richardson coefficients (lattice-word enumeration), semistandard
//! tableau counts (hook content) and conjugacy-class bookkeeping.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use thiserror::Error;

use crate::arith::factorial;

/// A partition: weakly decreasing positive parts. The empty partition is `[]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<u32>);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("parts must be weakly decreasing and positive: {0:?}")]
    Malformed(Vec<u32>),
    #[error("cannot parse partition from {0:?}")]
    Parse(String),
    #[error("cannot pad {0} to weight {1}: need k >= |lambda| + lambda_1")]
    PadTooSmall(Partition, u32),
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, PartitionError> {
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.iter().any(|&p| p == 0) {
            return Err(PartitionError::Malformed(parts));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn rows(&self) -> usize {
        self.0.len()
    }

    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.part(0) as usize;
        let parts = (0..cols)
            .map(|j| self.0.iter().filter(|&&p| p as usize > j).count() as u32)
            .collect();
        Partition(parts)
    }

    /// Containment of Young diagrams: `self_i <= other_i` for every row.
    pub fn contained_in(&self, other: &Partition) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| p <= other.part(i))
    }

    /// The padded partition `λ[k] = (k − |λ|, λ_1, …)`; defined when
    /// `k ≥ |λ| + λ_1`.
    pub fn pad(&self, k: u32) -> Result<Partition, PartitionError> {
        let first = k
            .checked_sub(self.size())
            .filter(|&f| f >= self.part(0) && (f > 0 || self.is_empty()))
            .ok_or_else(|| PartitionError::PadTooSmall(self.clone(), k))?;
        if first == 0 {
            return Ok(Partition::empty());
        }
        let mut parts = vec![first];
        parts.extend_from_slice(&self.0);
        Ok(Partition(parts))
    }

    /// Hook length of the cell in (1-indexed) row `i`, column `j`.
    fn hook(&self, conj: &Partition, i: usize, j: usize) -> u64 {
        (self.part(i - 1) as u64 - j as u64) + (conj.part(j - 1) as u64 - i as u64) + 1
    }

    /// Dimension of the Specht module `V_λ` by the hook length formula.
    pub fn specht_dim(&self) -> BigUint {
        let conj = self.conjugate();
        let mut num = factorial(self.size() as u64);
        for i in 1..=self.rows() {
            for j in 1..=self.part(i - 1) as usize {
                num /= BigUint::from(self.hook(&conj, i, j));
            }
        }
        num
    }

    /// Number of semistandard Young tableaux of this shape with entries in
    /// `{1, …, m}`, by the hook content formula `∏ (m + j − i)/h(i,j)`.
    pub fn ssyt_count(&self, m: u32) -> BigUint {
        if self.rows() > m as usize {
            return BigUint::zero();
        }
        let conj = self.conjugate();
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for i in 1..=self.rows() {
            for j in 1..=self.part(i - 1) as usize {
                num *= BigUint::from((m as u64 + j as u64) - i as u64);
                den *= BigUint::from(self.hook(&conj, i, j));
            }
        }
        num / den
    }

    /// Partitions obtained by removing a horizontal strip (no two cells in the
    /// same column) of exactly `r` boxes, or of at most `r` boxes.
    pub fn strip_removals(&self, r: u32, mode: StripMode) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut current: Vec<u32> = Vec::new();
        fn rec(
            lam: &Partition,
            row: usize,
            removed: u32,
            r: u32,
            mode: StripMode,
            current: &mut Vec<u32>,
            out: &mut Vec<Partition>,
        ) {
            if row == lam.rows() {
                if mode == StripMode::AtMost || removed == r {
                    let mut parts = current.clone();
                    while parts.last() == Some(&0) {
                        parts.pop();
                    }
                    out.push(Partition(parts));
                }
                return;
            }
            // Interlacing keeps the removal a horizontal strip: the new row
            // length stays between the next original row and this one.
            let lo = lam.part(row + 1);
            let hi = lam.part(row);
            for new_len in (lo..=hi).rev() {
                let take = hi - new_len;
                if removed + take > r {
                    continue;
                }
                current.push(new_len);
                rec(lam, row + 1, removed + take, r, mode, current, out);
                current.pop();
            }
        }
        rec(self, 0, 0, r, mode, &mut current, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// All sub-diagrams `μ ⊆ λ`.
    pub fn sub_partitions(&self) -> Vec<Partition> {
        fn rec(
            lam: &Partition,
            row: usize,
            max: u32,
            current: &mut Vec<u32>,
            out: &mut Vec<Partition>,
        ) {
            out.push(Partition(current.clone()));
            if row == lam.rows() {
                return;
            }
            let hi = lam.part(row).min(max);
            for len in 1..=hi {
                current.push(len);
                rec(lam, row + 1, len, current, out);
                current.pop();
            }
        }
        let mut out = Vec::new();
        rec(self, 0, u32::MAX, &mut Vec::new(), &mut out);
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl FromStr for Partition {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Ok(Partition::empty());
        }
        let parts: Result<Vec<u32>, _> = t.split(',').map(|p| p.trim().parse::<u32>()).collect();
        let parts = parts.map_err(|_| PartitionError::Parse(s.to_string()))?;
        Partition::new(parts).map_err(|_| PartitionError::Parse(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripMode {
    Exactly,
    AtMost,
}

/// All partitions of `k` in ascending lexicographic order.
pub fn partitions_of(k: u32) -> Vec<Partition> {
    fn rec(remaining: u32, min: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            let mut parts = current.clone();
            parts.reverse();
            out.push(Partition(parts));
            return;
        }
        for part in min..=remaining {
            // Parts are chosen in ascending order; prune dead ends where the
            // remainder is too small to continue.
            if remaining - part != 0 && remaining - part < part {
                continue;
            }
            current.push(part);
            rec(remaining - part, part, current, out);
            current.pop();
        }
    }
    if k == 0 {
        return vec![Partition::empty()];
    }
    let mut out = Vec::new();
    rec(k, 1, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// `z_μ = ∏ j^{m_j} · m_j!`, the centralizer order of the class `μ`.
pub fn centralizer_order(mu: &Partition) -> BigUint {
    let mut mult: HashMap<u32, u64> = HashMap::new();
    for &p in mu.parts() {
        *mult.entry(p).or_insert(0) += 1;
    }
    let mut z = BigUint::one();
    for (part, m) in mult {
        z *= BigUint::from(part as u64).pow(m as u32) * factorial(m);
    }
    z
}

/// Size of the conjugacy class of cycle type `μ` in `Σ_{|μ|}`.
pub fn class_size(mu: &Partition) -> BigUint {
    factorial(mu.size() as u64) / centralizer_order(mu)
}

/// Canonical representative of the class `μ` in `Σ_k` (`|μ| = k`): cycles on
/// consecutive integers in decreasing length order. Zero-indexed image vector.
pub fn class_representative(mu: &Partition, k: u32) -> Vec<u32> {
    assert_eq!(mu.size(), k, "class type must have size k");
    let mut perm: Vec<u32> = (0..k).collect();
    let mut start = 0u32;
    for &len in mu.parts() {
        for j in 0..len {
            perm[(start + j) as usize] = start + (j + 1) % len;
        }
        start += len;
    }
    perm
}

/// Cycle type of a zero-indexed permutation, as a partition.
pub fn cycle_type(perm: &[u32]) -> Partition {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut lens = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut len = 0u32;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = perm[i] as usize;
            len += 1;
        }
        lens.push(len);
    }
    lens.sort_unstable_by(|a, b| b.cmp(a));
    Partition(lens)
}

fn beta_numbers(lam: &Partition, slots: usize) -> Vec<u64> {
    // β_i = λ_i + (slots − i), for i = 1..slots with λ padded by zeros.
    (0..slots)
        .map(|i| lam.part(i) as u64 + (slots - 1 - i) as u64)
        .collect()
}

fn partition_from_betas(mut betas: Vec<u64>) -> Partition {
    betas.sort_unstable_by(|a, b| b.cmp(a));
    let slots = betas.len();
    let mut parts: Vec<u32> = betas
        .iter()
        .enumerate()
        .map(|(i, &b)| (b - (slots - 1 - i) as u64) as u32)
        .collect();
    while parts.last() == Some(&0) {
        parts.pop();
    }
    Partition(parts)
}

/// All ways of removing a border strip of `t` cells: `(resulting partition, sign)`
/// with sign `(−1)^height`.
fn border_strip_removals(lam: &Partition, t: u64) -> Vec<(Partition, i64)> {
    let slots = lam.rows() + t as usize + 1;
    let betas = beta_numbers(lam, slots);
    let mut out = Vec::new();
    for (idx, &b) in betas.iter().enumerate() {
        if b < t {
            continue;
        }
        let target = b - t;
        if betas.contains(&target) {
            continue;
        }
        let height = betas.iter().filter(|&&x| x < b && x > target).count();
        let mut next = betas.clone();
        next[idx] = target;
        let sign = if height % 2 == 0 { 1 } else { -1 };
        out.push((partition_from_betas(next), sign));
    }
    out
}

static CHARACTER_MEMO: Mutex<Option<HashMap<(Partition, Vec<u32>), i64>>> = Mutex::new(None);

/// Irreducible character `χ_λ(μ)` of `Σ_{|λ|}` by the Murnaghan–Nakayama rule.
pub fn character(lam: &Partition, mu: &Partition) -> i64 {
    assert_eq!(lam.size(), mu.size(), "character requires |mu| = |lambda|");
    fn go(lam: &Partition, mu: &[u32]) -> i64 {
        if mu.is_empty() {
            return 1;
        }
        let key = (lam.clone(), mu.to_vec());
        if let Some(v) = CHARACTER_MEMO
            .lock()
            .unwrap()
            .as_ref()
            .and_then(|m| m.get(&key).copied())
        {
            return v;
        }
        let t = mu[0] as u64;
        let rest = &mu[1..];
        let mut acc = 0i64;
        for (stripped, sign) in border_strip_removals(lam, t) {
            acc += sign * go(&stripped, rest);
        }
        let mut guard = CHARACTER_MEMO.lock().unwrap();
        guard.get_or_insert_with(HashMap::new).insert(key, acc);
        acc
    }
    go(lam, mu.parts())
}

static LR_MEMO: Mutex<Option<HashMap<(Partition, Partition, Partition), u64>>> = Mutex::new(None);

/// Littlewood–Richardson coefficient `c^λ_{μν}`: the number of lattice-word
/// semistandard skew tableaux of shape `λ/μ` and content `ν`.
pub fn lr_coefficient(lam: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    if !mu.contained_in(lam) || mu.size() + nu.size() != lam.size() {
        return 0;
    }
    if nu.is_empty() {
        return 1; // λ == μ at this point
    }
    let key = (lam.clone(), mu.clone(), nu.clone());
    if let Some(v) = LR_MEMO
        .lock()
        .unwrap()
        .as_ref()
        .and_then(|m| m.get(&key).copied())
    {
        return v;
    }

    // Cells of λ/μ in reading order: rows top to bottom, right to left.
    let mut cells = Vec::new();
    for row in 0..lam.rows() {
        for col in (mu.part(row)..lam.part(row)).rev() {
            cells.push((row, col));
        }
    }
    let nrows = lam.rows();
    let mut grid = vec![vec![0u32; lam.part(0) as usize]; nrows];
    let mut counts = vec![0u32; nu.rows()];

    fn rec(
        cells: &[(usize, u32)],
        pos: usize,
        lam: &Partition,
        mu: &Partition,
        nu: &Partition,
        grid: &mut Vec<Vec<u32>>,
        counts: &mut Vec<u32>,
        found: &mut u64,
    ) {
        if pos == cells.len() {
            *found += 1;
            return;
        }
        let (row, col) = cells[pos];
        // Row-weak bound from the right neighbor (within the skew shape).
        let right = if col + 1 < lam.part(row) {
            grid[row][(col + 1) as usize]
        } else {
            u32::MAX
        };
        // Column-strict bound from the cell above.
        let above = if row > 0 && col >= mu.part(row - 1) && col < lam.part(row - 1) {
            grid[row - 1][col as usize]
        } else {
            0
        };
        for entry in (above + 1)..=(nu.rows() as u32) {
            if entry > right {
                break;
            }
            let e = (entry - 1) as usize;
            if counts[e] + 1 > nu.part(e) {
                continue;
            }
            // Lattice condition on the reverse reading word prefix.
            if entry > 1 && counts[e] + 1 > counts[e - 1] {
                continue;
            }
            counts[e] += 1;
            grid[row][col as usize] = entry;
            rec(cells, pos + 1, lam, mu, nu, grid, counts, found);
            grid[row][col as usize] = 0;
            counts[e] -= 1;
        }
    }

    let mut found = 0u64;
    rec(&cells, 0, lam, mu, nu, &mut grid, &mut counts, &mut found);
    LR_MEMO
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert(key, found);
    found
}
