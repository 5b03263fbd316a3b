//! Leading-term asymptotics for the homology of graph configuration spaces:
//! hypothesis checks, leading coefficients of Betti numbers and of Specht
//! multiplicities, the two finite-k right-hand sides (conceptual and
//! inclusion–exclusion refined), and convergence reports.
//!
//! A leading term has the shape (Σ_m q_m e^m)·k^degree, optionally times k!,
//! with exact rational q_m. Numeric evaluation substitutes a high-precision
//! rational approximation of e.

use crate::arith::{binomial, euler_number, factorial, Rat};
use crate::functions::dim_free;
use crate::graph::{Graph, GraphError};
use crate::partitions::Partition;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error("asymptotic hypotheses not satisfied: {0}")]
    HypothesisFailed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// (Σ_m q_m e^m)·k^degree, times k! when `factorial` is set. The coefficient
/// map sends the exponent of e to its exact rational weight and stores no
/// zero values; an empty map is the zero term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticTerm {
    pub factorial: bool,
    pub degree: u32,
    pub coefficient: BTreeMap<u32, Rat>,
}

impl AsymptoticTerm {
    /// The exact weight of e^m (zero if absent).
    pub fn coefficient_at(&self, m: u32) -> Rat {
        self.coefficient.get(&m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Numeric value of the coefficient, with e replaced by a rational
    /// approximation good to well over 30 decimal digits.
    pub fn coefficient_value(&self) -> Rat {
        let e = euler_number(40);
        let mut total = Rat::zero();
        for (&m, q) in &self.coefficient {
            let mut power = Rat::one();
            for _ in 0..m {
                power *= &e;
            }
            total += q * power;
        }
        total
    }

    /// Numeric prediction at k: coefficient · k^degree · (k! if factorial).
    pub fn predicted(&self, k: u64) -> Rat {
        let mut value = self.coefficient_value();
        value *= Rat::from_integer(num_traits::pow(BigInt::from(k), self.degree as usize));
        if self.factorial {
            value *= Rat::from_integer(factorial(k).into());
        }
        value
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_empty()
    }
}

impl fmt::Display for AsymptoticTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficient.is_empty() {
            return write!(f, "0");
        }
        let body = self
            .coefficient
            .iter()
            .map(|(&m, q)| match m {
                0 => format!("{q}"),
                1 => format!("{q}·e"),
                _ => format!("{q}·e^{m}"),
            })
            .collect::<Vec<_>>()
            .join(" + ");
        write!(f, "({body})")?;
        match self.degree {
            0 => {}
            1 => write!(f, "·k")?,
            d => write!(f, "·k^{d}")?,
        }
        if self.factorial {
            write!(f, "·k!")?;
        }
        Ok(())
    }
}

/// Which side condition admits the multiplicity leading-term formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultBranch {
    /// λ = ∅: all Δ-maximal explosions contribute.
    EmptyPartition,
    /// Every Δ-maximal explosion has Λ^S > 0: all of them contribute.
    LambdaPositive,
    /// |λ| ≥ ℰ^i: only Δ-maximal explosions with Λ^S > 0 contribute.
    LargePartition,
}

impl MultBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            MultBranch::EmptyPartition => "empty-partition",
            MultBranch::LambdaPositive => "lambda-positive",
            MultBranch::LargePartition => "large-partition",
        }
    }
}

/// Outcome of checking the leading-term hypotheses for a graph and degree.
#[derive(Debug, Clone)]
pub struct HypothesisVerdict {
    pub applicable: bool,
    /// Human-readable failure reasons; empty iff applicable.
    pub reasons: Vec<String>,
    /// The admitting side condition, for multiplicity checks that pass.
    pub branch: Option<MultBranch>,
}

fn connectivity_failures(g: &Graph) -> Vec<String> {
    let mut reasons = Vec::new();
    if !g.is_connected() {
        reasons.push("the graph is not connected".to_string());
    } else if g.vertex_count() > 0 && (0..g.vertex_count()).all(|v| g.degree(v) == 2) {
        reasons.push(
            "the graph is a circle, for which the explosion invariants are undefined".to_string(),
        );
    }
    reasons
}

/// Check the hypotheses of the leading-term statements: for `lam = None` the
/// Betti-number form (connected, not a circle, Λ^i > 0); for `lam = Some` the
/// character-level form (connected, not a circle, Δ^i > 1, plus one of the
/// three side conditions selecting the branch).
pub fn check_hypotheses(
    g: &Graph,
    i: usize,
    lam: Option<&Partition>,
    cap: u64,
) -> Result<HypothesisVerdict, GraphError> {
    let mut reasons = connectivity_failures(g);
    if !reasons.is_empty() {
        return Ok(HypothesisVerdict {
            applicable: false,
            reasons,
            branch: None,
        });
    }
    let best = match g.best_invariants(i, cap) {
        Ok(best) => best,
        Err(GraphError::NotEnoughEssential { have, need }) => {
            reasons.push(format!(
                "no essential vertex sets of size {need}: the graph has only {have} essential vertices"
            ));
            return Ok(HypothesisVerdict {
                applicable: false,
                reasons,
                branch: None,
            });
        }
        Err(e) => return Err(e),
    };
    let mut branch = None;
    match lam {
        None => {
            if best.lambda == 0 {
                reasons.push(format!(
                    "Λ^{i} = 0; the Betti leading term requires Λ^{i} > 0"
                ));
            }
        }
        Some(lam) => {
            if best.delta <= 1 {
                reasons.push(format!(
                    "Δ^{i} = {}; the multiplicity leading term requires Δ^{i} > 1",
                    best.delta
                ));
            } else if lam.size() == 0 {
                branch = Some(MultBranch::EmptyPartition);
            } else if best.delta_argmax.iter().all(|(_, inv)| inv.lambda > 0) {
                branch = Some(MultBranch::LambdaPositive);
            } else if lam.size() as usize >= best.epsilon {
                branch = Some(MultBranch::LargePartition);
            } else {
                reasons.push(format!(
                    "no side condition holds: λ is nonempty, some Δ-maximal explosion has Λ = 0, and |λ| = {} < ℰ^{i} = {}",
                    lam.size(),
                    best.epsilon
                ));
            }
        }
    }
    Ok(HypothesisVerdict {
        applicable: reasons.is_empty(),
        reasons,
        branch,
    })
}

fn require_applicable(verdict: &HypothesisVerdict) -> Result<(), AsymptoticsError> {
    if verdict.applicable {
        Ok(())
    } else {
        Err(AsymptoticsError::HypothesisFailed(
            verdict.reasons.join("; "),
        ))
    }
}

fn degree_product(g: &Graph, set: &[String]) -> Result<BigInt, GraphError> {
    let mut prod = BigInt::one();
    for name in set {
        let v = g.vertex_index(name)?;
        prod *= BigInt::from(g.degree(v) as u64 - 2);
    }
    Ok(prod)
}

/// Leading term of k ↦ dim ℋ_i(k): (Σ_S e^{ℰ^S} ∏_{w∈S}(d(w)−2))/(Λ^i−1)!
/// times k^{Λ^i−1}·k!, summed over the Λ-maximizing essential i-sets.
pub fn leading_betti(g: &Graph, i: usize, cap: u64) -> Result<AsymptoticTerm, AsymptoticsError> {
    let verdict = check_hypotheses(g, i, None, cap)?;
    require_applicable(&verdict)?;
    let best = g.best_invariants(i, cap)?;
    let den = Rat::from_integer(factorial(best.lambda as u64 - 1).into());
    let mut coefficient: BTreeMap<u32, Rat> = BTreeMap::new();
    for (set, inv) in &best.lambda_argmax {
        let q = Rat::from_integer(degree_product(g, set)?) / &den;
        *coefficient
            .entry(inv.epsilon as u32)
            .or_insert_with(Rat::zero) += q;
    }
    coefficient.retain(|_, q| !q.is_zero());
    Ok(AsymptoticTerm {
        factorial: true,
        degree: (best.lambda - 1) as u32,
        coefficient,
    })
}

/// Leading term of k ↦ mul_{λ[k]} ℋ_i(k): Σ_S dim V_λ·C(|λ|+Λ^S−1, Λ^S−1)·
/// ∏_{w∈S}(d(w)−2) / (|λ|+Δ^i−1)! times k^{|λ|+Δ^i−1}, summed over the
/// Δ-maximizing essential i-sets admitted by the branch.
pub fn leading_mult(
    g: &Graph,
    i: usize,
    lam: &Partition,
    cap: u64,
) -> Result<AsymptoticTerm, AsymptoticsError> {
    let verdict = check_hypotheses(g, i, Some(lam), cap)?;
    require_applicable(&verdict)?;
    let branch = verdict
        .branch
        .expect("applicable multiplicity verdict has a branch");
    let best = g.best_invariants(i, cap)?;
    let degree = lam.size() as u64 + best.delta as u64 - 1;
    let den = Rat::from_integer(factorial(degree).into());
    let dim_lam = Rat::from_integer(lam.specht_dim().into());
    let mut total = Rat::zero();
    for (set, inv) in &best.delta_argmax {
        if branch == MultBranch::LargePartition && inv.lambda == 0 {
            continue;
        }
        let copies = binomial(
            lam.size() as i64 + inv.lambda as i64 - 1,
            inv.lambda as i64 - 1,
        );
        total += &dim_lam * Rat::from_integer(copies) * Rat::from_integer(degree_product(g, set)?)
            / &den;
    }
    let mut coefficient = BTreeMap::new();
    if !total.is_zero() {
        coefficient.insert(0, total);
    }
    Ok(AsymptoticTerm {
        factorial: false,
        degree: degree as u32,
        coefficient,
    })
}

fn require_connected_non_circle(g: &Graph) -> Result<(), AsymptoticsError> {
    let reasons = connectivity_failures(g);
    if reasons.is_empty() {
        Ok(())
    } else {
        Err(AsymptoticsError::HypothesisFailed(reasons.join("; ")))
    }
}

fn rat_to_int(value: Rat, what: &str) -> BigInt {
    assert!(
        value.denom().is_one(),
        "{what} must be an integer, got {value}"
    );
    value.numer().clone()
}

/// Finite-k conceptual right-hand side: Σ over all essential i-sets S of
/// ∏_{w∈S}(d(w)−2) · dim(𝒮_{ℰ^S}⊗𝒜_{Λ^S})(k).
pub fn conceptual_rhs(g: &Graph, i: usize, k: u64, cap: u64) -> Result<BigInt, AsymptoticsError> {
    require_connected_non_circle(g)?;
    let mut total = Rat::zero();
    for (set, inv) in g.essential_subsets_with_invariants(i, cap)? {
        let h = dim_free(inv.epsilon as u64, inv.lambda as u64);
        total += Rat::from_integer(degree_product(g, &set)?) * h.eval(k);
    }
    Ok(rat_to_int(total, "conceptual right-hand side"))
}

/// Finite-k refined right-hand side: Σ over essential i-sets S of
/// [∏_{w∈S}((d(w)−1)σ̂ − 1)] applied to dim(𝒮_{ℰ^S}⊗𝒜_{Λ^S}), evaluated at
/// k, expanded multilinearly over subsets R ⊆ S.
pub fn refined_rhs(g: &Graph, i: usize, k: u64, cap: u64) -> Result<BigInt, AsymptoticsError> {
    require_connected_non_circle(g)?;
    let mut total = Rat::zero();
    for (set, inv) in g.essential_subsets_with_invariants(i, cap)? {
        assert!(set.len() < 64, "explosion sets stay far below 64 vertices");
        let h = dim_free(inv.epsilon as u64, inv.lambda as u64);
        let weights: Vec<i64> = set
            .iter()
            .map(|name| Ok(g.degree(g.vertex_index(name)?) as i64 - 1))
            .collect::<Result<_, GraphError>>()?;
        for mask in 0u64..(1u64 << set.len()) {
            let r = mask.count_ones() as u64;
            let mut term = Rat::from_integer(BigInt::from(
                if (set.len() as u32 - mask.count_ones()) % 2 == 0 {
                    1
                } else {
                    -1
                },
            ));
            for (pos, &w) in weights.iter().enumerate() {
                if mask & (1 << pos) != 0 {
                    term *= Rat::from_integer(BigInt::from(w));
                }
            }
            total += term * h.shift_hat_by(r).eval(k);
        }
    }
    Ok(rat_to_int(total, "refined right-hand side"))
}

/// Exact first Betti number of the ordered configuration space of k points
/// on the star with n edges (n ≥ 3, k ≥ 0):
/// (n−1)·k!·C(k+n−2, n−1) − k!·C(k+n−1, n−1) + 1.
pub fn star_first_betti_closed_form(n: u64, k: u64) -> BigInt {
    let kf = BigInt::from(factorial(k));
    BigInt::from(n - 1) * &kf * binomial((k + n - 2) as i64, (n - 1) as i64)
        - &kf * binomial((k + n - 1) as i64, (n - 1) as i64)
        + BigInt::one()
}

/// One row of a convergence table comparing computed values against a
/// leading-term prediction.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub k: u64,
    pub computed: Rat,
    pub predicted: Rat,
    /// computed/predicted, absent when the prediction vanishes.
    pub ratio: Option<Rat>,
    /// First difference of the ratio against the previous row.
    pub delta_ratio: Option<Rat>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Whether |ratio − 1| is non-increasing across the rows that have one.
    pub deviations_monotone: bool,
}

/// Tabulate computed values against `term`'s prediction for k in
/// [k_min, k_max]. `computed` may decline a k (returning None) to skip it.
pub fn convergence_report(
    term: &AsymptoticTerm,
    k_min: u64,
    k_max: u64,
    mut computed: impl FnMut(u64) -> Option<Rat>,
) -> ConvergenceReport {
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    let mut prev_ratio: Option<Rat> = None;
    let mut prev_deviation: Option<Rat> = None;
    let mut monotone = true;
    for k in k_min..=k_max {
        let Some(value) = computed(k) else { continue };
        let predicted = term.predicted(k);
        let ratio = if predicted.is_zero() {
            None
        } else {
            Some(&value / &predicted)
        };
        let delta_ratio = match (&prev_ratio, &ratio) {
            (Some(prev), Some(cur)) => Some(cur - prev),
            _ => None,
        };
        if let Some(r) = &ratio {
            let deviation = (r - Rat::one()).abs();
            if let Some(prev) = &prev_deviation {
                if deviation > *prev {
                    monotone = false;
                }
            }
            prev_deviation = Some(deviation);
        }
        prev_ratio = ratio.clone();
        rows.push(ConvergenceRow {
            k,
            computed: value,
            predicted,
            ratio,
            delta_ratio,
        });
    }
    ConvergenceReport {
        rows,
        deviations_monotone: monotone,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{interpolate, rat, rat_frac};
    use crate::graph::DEFAULT_SUBSET_CAP;
    use crate::samples;

    const CAP: u64 = DEFAULT_SUBSET_CAP;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn star_betti_leading_terms() {
        for n in 3..=6u64 {
            let term = leading_betti(&samples::star(n as usize), 1, CAP).unwrap();
            assert!(term.factorial);
            assert_eq!(term.degree, n as u32 - 1);
            assert_eq!(term.coefficient.len(), 1);
            assert_eq!(
                term.coefficient_at(0),
                Rat::new(BigInt::from(n - 2), factorial(n - 1).into()),
                "n={n}"
            );
        }
    }

    #[test]
    fn star_leading_coefficient_matches_closed_form_symbolically() {
        // (closed form − 1)/k! is a polynomial in k of degree n−1 whose
        // leading coefficient is the predicted (n−2)/(n−1)!.
        for n in 3..=6u64 {
            let pts: Vec<(Rat, Rat)> = (0..=(n + 1))
                .map(|k| {
                    let poly_part = Rat::new(
                        star_first_betti_closed_form(n, k) - BigInt::one(),
                        factorial(k).into(),
                    );
                    (rat(k as i64), poly_part)
                })
                .collect();
            let poly = interpolate(&pts);
            assert_eq!(poly.degree(), Some(n as usize - 1));
            let term = leading_betti(&samples::star(n as usize), 1, CAP).unwrap();
            assert_eq!(*poly.leading().unwrap(), term.coefficient_at(0), "n={n}");
            // And the interpolated polynomial extrapolates the closed form.
            for k in (n + 2)..(n + 5) {
                assert_eq!(
                    poly.eval(&rat(k as i64)) * Rat::from_integer(factorial(k).into()) + Rat::one(),
                    Rat::from_integer(star_first_betti_closed_form(n, k)),
                );
            }
        }
    }

    #[test]
    fn star_closed_form_small_values() {
        // b₁(F₂(S₃)) = 1 and the quartic S₄ family in its product form.
        assert_eq!(star_first_betti_closed_form(3, 2), BigInt::from(1));
        for k in 2..=12u64 {
            let lhs = (star_first_betti_closed_form(4, k) - BigInt::one()) * BigInt::from(6u8);
            let rhs = BigInt::from(factorial(k))
                * BigInt::from(k + 1)
                * BigInt::from(k + 2)
                * (BigInt::from(2 * k) - BigInt::from(3u8));
            assert_eq!(lhs, rhs, "k={k}");
        }
    }

    #[test]
    fn h_graph_leading_terms() {
        let h = samples::h_graph();
        let t1 = leading_betti(&h, 1, CAP).unwrap();
        assert!(t1.factorial);
        assert_eq!(t1.degree, 1);
        assert_eq!(t1.coefficient.len(), 1);
        assert_eq!(t1.coefficient_at(1), rat(2));
        assert_eq!(t1.to_string(), "(2·e)·k·k!");

        let t2 = leading_betti(&h, 2, CAP).unwrap();
        assert_eq!(t2.degree, 4);
        assert_eq!(t2.coefficient_at(0), rat_frac(1, 24));

        let m2 = leading_mult(&h, 2, &Partition::empty(), CAP).unwrap();
        assert!(!m2.factorial);
        assert_eq!(m2.degree, 4);
        assert_eq!(m2.coefficient_at(0), rat_frac(1, 24));
    }

    #[test]
    fn star_multiplicity_leading_term() {
        let term = leading_mult(&samples::star(3), 1, &p(&[1]), CAP).unwrap();
        assert!(!term.factorial);
        assert_eq!(term.degree, 3);
        assert_eq!(term.coefficient_at(0), rat_frac(1, 2));
    }

    #[test]
    fn hypothesis_checks_and_branches() {
        let circle = samples::loop_graph();
        let v = check_hypotheses(&circle, 0, None, CAP).unwrap();
        assert!(!v.applicable);
        assert!(v.reasons[0].contains("circle"));

        let doubled = samples::doubled_edge();
        assert!(!check_hypotheses(&doubled, 0, None, CAP).unwrap().applicable);

        let forest = samples::two_interval_forest();
        let v = check_hypotheses(&forest, 0, None, CAP).unwrap();
        assert!(!v.applicable);
        assert!(v.reasons[0].contains("connected"));

        let star = samples::star(3);
        let v = check_hypotheses(&star, 3, None, CAP).unwrap();
        assert!(!v.applicable);
        assert!(v.reasons[0].contains("essential"));

        let v = check_hypotheses(&star, 1, Some(&Partition::empty()), CAP).unwrap();
        assert_eq!(v.branch, Some(MultBranch::EmptyPartition));

        let v = check_hypotheses(&samples::h_graph(), 1, Some(&p(&[1])), CAP).unwrap();
        assert!(v.applicable);
        assert_eq!(v.branch, Some(MultBranch::LambdaPositive));

        // Degree 0 of a single essential vertex: Λ⁰ = 0 (one essential
        // component), so the Betti form is refused, and Δ⁰ = 1 refuses the
        // multiplicity form.
        let v = check_hypotheses(&star, 0, None, CAP).unwrap();
        assert!(!v.applicable);
        let v = check_hypotheses(&star, 0, Some(&Partition::empty()), CAP).unwrap();
        assert!(!v.applicable);
    }

    /// Three stars joined at a fresh center: exploding the center leaves no
    /// intervals (Λ = 0), while exploding a star center leaves two.
    fn spider_of_stars() -> Graph {
        let mut vertices: Vec<String> =
            ["v", "a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let mut edges = vec![
            ("v".to_string(), "a".to_string()),
            ("v".to_string(), "b".to_string()),
            ("v".to_string(), "c".to_string()),
        ];
        for arm in ["a", "b", "c"] {
            for leaf in 1..=2 {
                let name = format!("{arm}{leaf}");
                vertices.push(name.clone());
                edges.push((arm.to_string(), name));
            }
        }
        Graph::from_named_edges(vertices, edges).unwrap()
    }

    #[test]
    fn large_partition_branch() {
        let g = spider_of_stars();
        let best = g.best_invariants(1, CAP).unwrap();
        assert_eq!((best.lambda, best.delta, best.epsilon), (2, 3, 3));
        assert_eq!(best.delta_argmax.len(), 4);

        // |λ| = 1 < ℰ¹ = 3 and the center explosion has Λ = 0: no branch.
        let v = check_hypotheses(&g, 1, Some(&p(&[1])), CAP).unwrap();
        assert!(!v.applicable);
        assert!(v.reasons[0].contains("no side condition"));

        // |λ| = 3 ≥ ℰ¹: the restricted sum runs over the three arm centers.
        let v = check_hypotheses(&g, 1, Some(&p(&[3])), CAP).unwrap();
        assert_eq!(v.branch, Some(MultBranch::LargePartition));
        let term = leading_mult(&g, 1, &p(&[3]), CAP).unwrap();
        assert_eq!(term.degree, 5);
        // 3 sets · dim V_{(3)} · C(4,1) · 1 / 5! = 12/120.
        assert_eq!(term.coefficient_at(0), rat_frac(1, 10));

        // λ = ∅ admits every Δ-maximal set; the center one contributes
        // C(−1,−1) = 1 copy.
        let term = leading_mult(&g, 1, &Partition::empty(), CAP).unwrap();
        assert_eq!(term.degree, 2);
        // center: 1·1·1; arms: 3·C(1,1)·1 → total 4, over 2!.
        assert_eq!(term.coefficient_at(0), rat(2));
    }

    #[test]
    fn conceptual_rhs_examples() {
        let star = samples::star(3);
        assert_eq!(conceptual_rhs(&star, 1, 2, CAP).unwrap(), BigInt::from(12));
        let h = samples::h_graph();
        for k in 0..=6u64 {
            let expected = rat(2) * dim_free(1, 2).eval(k);
            assert_eq!(
                Rat::from_integer(conceptual_rhs(&h, 1, k, CAP).unwrap()),
                expected,
                "k={k}"
            );
        }
    }

    #[test]
    fn refined_rhs_examples() {
        // Degree 0: the refinement is the bare dimension, matching the
        // conceptual sum exactly.
        for g in [samples::star(3), samples::h_graph(), samples::path(3)] {
            for k in 0..=6u64 {
                assert_eq!(
                    refined_rhs(&g, 0, k, CAP).unwrap(),
                    conceptual_rhs(&g, 0, k, CAP).unwrap()
                );
            }
        }
        // Degree 1 on the 3-star: (d−1)σ̂ − 1 applied to dim 𝒜₃ at k = 2:
        // 2·2·dim(1) − dim(2) = 4·3 − 12 = 0.
        let star = samples::star(3);
        assert_eq!(refined_rhs(&star, 1, 2, CAP).unwrap(), BigInt::zero());
        // The refined value can go negative at tiny k; it must stay an
        // integer either way.
        assert_eq!(refined_rhs(&star, 1, 1, CAP).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn star4_convergence_is_monotone() {
        let term = leading_betti(&samples::star(4), 1, CAP).unwrap();
        assert_eq!(term.coefficient_at(0), rat_frac(1, 3));
        let report = convergence_report(&term, 5, 30, |k| {
            Some(Rat::from_integer(star_first_betti_closed_form(4, k)))
        });
        assert_eq!(report.rows.len(), 26);
        assert!(report.deviations_monotone);
        let last = report.rows.last().unwrap();
        let ratio = last.ratio.clone().unwrap();
        assert!((ratio - Rat::one()).abs() < rat_frac(1, 5));
        // At k = 10 the computed/predicted ratio is within 15% of 1.
        let at10 = report.rows.iter().find(|r| r.k == 10).unwrap();
        let dev = (at10.ratio.clone().unwrap() - Rat::one()).abs();
        assert!(dev < rat_frac(3, 20), "deviation {dev}");
    }

    #[test]
    fn display_formats() {
        let term = AsymptoticTerm {
            factorial: false,
            degree: 0,
            coefficient: BTreeMap::new(),
        };
        assert_eq!(term.to_string(), "0");
        let mut coefficient = BTreeMap::new();
        coefficient.insert(0, rat_frac(1, 24));
        coefficient.insert(2, rat(3));
        let term = AsymptoticTerm {
            factorial: true,
            degree: 4,
            coefficient,
        };
        assert_eq!(term.to_string(), "(1/24 + 3·e^2)·k^4·k!");
        assert!(term.predicted(2) > rat(0));
    }
}
