//! End-to-end acceptance checks for the whole pipeline: closed forms,
//! oracle equivalence, asymptotic trends, representation-theoretic sum
//! rules, derived-column properties and structural invariants.  Each test
//! prints one `ACCEPTANCE n: PASS` line (visible with `--nocapture`).

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use confhom::abrams::oracle_betti;
use confhom::arith::{factorial, rat, rat_frac, Rat};
use confhom::asymptotics::star_first_betti_closed_form;
use confhom::functions::{dim_free, mult_free, ArithmeticFunction, PartitionFunction};
use confhom::homology::{Engine, Field};
use confhom::partitions::{partitions_of, StripMode};
use confhom::samples;
use confhom::swiatkowski::{build_complex, stabilization_matrix, DEFAULT_BASIS_CAP};
use confhom::tor::tor_column;
use confhom::{Graph, Partition};

/// One engine across all acceptance tests so complexes, ranks and homology
/// bases computed by one criterion are reused by the others.
fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(Engine::with_defaults)
}

fn p(parts: &[u32]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

fn betti_q(g: &Graph, k: u64, i: usize) -> u64 {
    engine().betti(g, k, i, Field::Rationals).unwrap().betti
}

/// Criterion 1 — first Betti numbers of star graphs match the closed form
/// (n−1)·k·(k−1)!·C(k+n−2,n−1) − k!·C(k+n−1,n−1) + 1 exactly.
#[test]
fn acceptance_01_star_first_betti_closed_form() {
    for n in 3..=5u64 {
        let g = samples::star(n as usize);
        let k_max = if n == 3 { 7 } else { 6 };
        for k in 2..=k_max {
            let computed = BigInt::from(betti_q(&g, k, 1));
            let predicted = star_first_betti_closed_form(n, k);
            assert_eq!(computed, predicted, "star {n}, weight {k}");
        }
    }
    println!("ACCEPTANCE 1: PASS — star first Betti numbers equal the closed form, n ∈ {{3,4,5}}, k ≤ 6 (7 for n=3), exactly");
}

/// Criterion 2 — zeroth Betti numbers of the cycle-free test graphs equal
/// the free-algebra dimension function in the component invariants, over ℚ
/// and over a prime field.
#[test]
fn acceptance_02_zeroth_homology_closed_form() {
    for (name, g) in samples::tree_test_graphs() {
        let inv = g.classify_components();
        let expected_fn = dim_free(inv.epsilon as u64, inv.lambda as u64);
        for k in 0..=6u64 {
            let expected = expected_fn.eval(k);
            for field in [Field::Rationals, Field::Prime(2)] {
                let b = engine().betti(&g, k, 0, field).unwrap().betti;
                assert_eq!(rat(b as i64), expected, "graph {name}, weight {k}, {field}");
            }
        }
    }
    println!("ACCEPTANCE 2: PASS — H₀ dimensions equal dim_free(ε⁰, Λ⁰) on all cycle-free test graphs, k ≤ 6, over ℚ and 𝔽₂, exactly");
}

/// Criterion 3 — the release-complex Betti numbers agree with the
/// independent discretized-model oracle on every test graph, every degree,
/// k ≤ 3, over ℚ and 𝔽₂.
#[test]
fn acceptance_03_oracle_equivalence() {
    for (name, g) in samples::test_graphs() {
        for k in 0..=3u64 {
            for i in 0..=3usize {
                for field in [Field::Rationals, Field::Prime(2)] {
                    let ours = engine().betti(&g, k, i, field).unwrap().betti;
                    let oracle = oracle_betti(&g, k, i, field).unwrap();
                    assert_eq!(
                        ours, oracle,
                        "graph {name}, weight {k}, degree {i}, {field}"
                    );
                }
            }
        }
    }
    println!("ACCEPTANCE 3: PASS — Betti numbers match the discretized-model oracle on all test graphs, all degrees, k ≤ 3, over ℚ and 𝔽₂");
}

/// Criterion 4 — growth of first Betti numbers toward the predicted leading
/// terms: exact polynomial identity for the 4-star (so its ratio tends to
/// 1/3 with monotone deviation on 5 ≤ k ≤ 30, within 15% at k = 10), and a
/// decreasing-deviation trend toward 2e for the H graph over 3 ≤ k ≤ 5.
#[test]
fn acceptance_04_leading_term_convergence() {
    // 4-star: closed form (verified against matrices by criterion 1), as an
    // exact identity 6·(betti − 1) = k!·(k+1)(k+2)(2k−3).
    for k in 5..=30u64 {
        let b = star_first_betti_closed_form(4, k);
        let lhs = (b - BigInt::one()) * BigInt::from(6);
        let rhs = BigInt::from(factorial(k))
            * BigInt::from(k + 1)
            * BigInt::from(k + 2)
            * BigInt::from(2 * k - 3);
        assert_eq!(lhs, rhs, "weight {k}");
    }
    let third = rat_frac(1, 3);
    let deviation = |k: u64| -> Rat {
        let b = Rat::from_integer(star_first_betti_closed_form(4, k));
        let scale = Rat::from_integer(BigInt::from(factorial(k)) * BigInt::from(k * k * k));
        (b / scale - &third).abs()
    };
    let mut previous = deviation(5);
    for k in 6..=30u64 {
        let current = deviation(k);
        assert!(current < previous, "deviation must shrink at weight {k}");
        previous = current;
    }
    assert!(
        deviation(10) <= third.clone() * rat_frac(15, 100),
        "within 15% of 1/3 at weight 10"
    );

    // H graph: matrix-computed ratios b₁/(k·k!) approach 2e from below.
    let two_e = 2.0 * std::f64::consts::E;
    let mut prev_dev = f64::INFINITY;
    let mut at_5 = f64::NAN;
    for k in 3..=5u64 {
        let b = betti_q(&samples::h_graph(), k, 1) as f64;
        let scale = (k as f64) * factorial(k).to_f64().unwrap();
        let dev = (b / scale - two_e).abs();
        assert!(
            dev < prev_dev,
            "H-graph deviation must shrink at weight {k}"
        );
        prev_dev = dev;
        if k == 5 {
            at_5 = (b / scale) / two_e;
        }
    }
    assert!(
        (at_5 - 1.0).abs() <= 0.5,
        "H-graph ratio within 50% of 2e at weight 5, got {at_5}"
    );
    println!("ACCEPTANCE 4: PASS — 4-star ratio equals (k+1)(k+2)(2k−3)/(6k³)+1/(k³k!) exactly with monotone convergence to 1/3 (12.2% off at k=10 ≤ 15%); H-graph ratio within 50% of 2e at k=5 with decreasing deviation");
}

/// Criterion 5 — Specht-module multiplicities decompose every Betti number:
/// Σ_λ mult·dim V_{λ[k]} = betti for each test graph, k ≤ 4, every degree
/// with nonzero homology.
#[test]
fn acceptance_05_multiplicity_sum_rule() {
    for (name, g) in samples::test_graphs() {
        for k in 1..=4u64 {
            let complex = engine().complex(&g, k).unwrap();
            for i in 0..=complex.max_degree() {
                let betti = betti_q(&g, k, i);
                if betti == 0 {
                    continue;
                }
                let mut total = 0u64;
                for nu in partitions_of(k as u32) {
                    let lam = Partition::new(nu.parts()[1..].to_vec()).unwrap();
                    let mult = engine().multiplicity(&g, k, i, &lam).unwrap().multiplicity;
                    total += mult * nu.specht_dim().to_u64().unwrap();
                }
                assert_eq!(total, betti, "graph {name}, weight {k}, degree {i}");
            }
        }
    }
    println!("ACCEPTANCE 5: PASS — Σ_λ multiplicity·dim V_λ[k] = betti on all test graphs, k ≤ 4, all degrees with homology, exactly");
}

/// Criterion 6 — trivial-isotypic multiplicity of the 3-star's first
/// homology counts unordered cycles: 1 + (k−2)(k+1)/2 for 2 ≤ k ≤ 5 (so 1
/// at k = 2, the anchoring hand value).  The multiplicity is recovered via
/// the averaging projector, i.e. λ = ∅ in the character sum.
#[test]
fn acceptance_06_trivial_isotypic_multiplicity() {
    let g = samples::star(3);
    for k in 2..=5u64 {
        let mult = engine()
            .multiplicity(&g, k, 1, &Partition::empty())
            .unwrap()
            .multiplicity;
        let expected = 1 + (k - 2) * (k + 1) / 2;
        assert_eq!(mult, expected, "weight {k}");
    }
    println!("ACCEPTANCE 6: PASS — trivial-isotypic multiplicity of H₁(3-star) equals the unordered cycle count 1+(k−2)(k+1)/2 for 2 ≤ k ≤ 5 (1, 3, 6, 10), exactly");
}

/// Criterion 7 — multiplicity functions of free twisted algebras: the
/// regular-representation formula mult(0,n,λ)(k) = C(k+n−1,n−1)·dim V_{λ[k]}
/// for n ≤ 3, |λ| ≤ 3, k ≤ 8, and the sum rule Σ mult·dim = dim_free for
/// m + n ≤ 3, k ≤ 6.
#[test]
fn acceptance_07_free_algebra_multiplicities() {
    for n in 1..=3u64 {
        for size in 0..=3u32 {
            for lam in partitions_of(size) {
                let f = mult_free(0, n, &lam);
                let start = (lam.size() + lam.part(0)) as u64;
                for k in start..=8 {
                    let padded = lam.pad(k as u32).unwrap();
                    let expected = Rat::from_integer(
                        confhom::arith::binomial((k + n - 1) as i64, (n - 1) as i64)
                            * BigInt::from(padded.specht_dim()),
                    );
                    assert_eq!(f.eval(k), expected, "n={n}, λ={lam}, k={k}");
                }
            }
        }
    }
    for m in 0..=3u64 {
        for n in 0..=(3 - m) {
            let dim = dim_free(m, n);
            for k in 0..=6u64 {
                let total: Rat = partitions_of(k as u32)
                    .into_iter()
                    .map(|nu| {
                        let rest = nu.parts().get(1..).unwrap_or(&[]).to_vec();
                        let lam = Partition::new(rest).unwrap();
                        mult_free(m, n, &lam).eval(k)
                            * Rat::from_integer(BigInt::from(nu.specht_dim()))
                    })
                    .sum();
                assert_eq!(total, dim.eval(k), "m={m}, n={n}, k={k}");
            }
        }
    }
    println!("ACCEPTANCE 7: PASS — free-algebra multiplicities equal C(k+n−1,n−1)·dim V_λ[k] (n ≤ 3, |λ| ≤ 3, k ≤ 8) and satisfy Σ mult·dim = dim_free (m+n ≤ 3, k ≤ 6), exactly");
}

/// Criterion 8 — derived columns: tor vanishes beyond the marked set on
/// randomized small configurations, and the empty marked set reproduces the
/// Betti numbers.
#[test]
fn acceptance_08_tor_column_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(20260819);
    let pool: Vec<(Graph, Vec<&str>)> = vec![
        (samples::loop_graph(), vec!["v"]),
        (samples::doubled_edge(), vec!["a", "b"]),
        (samples::path(2), vec!["p1"]),
        (samples::path(3), vec!["p1", "p2"]),
        (samples::theta().subdivided(2), vec![]),
    ];
    let mut checked = 0;
    while checked < 5 {
        let (g, bivalent) = pool.choose(&mut rng).unwrap();
        let candidates: Vec<String> = if bivalent.is_empty() {
            (0..g.vertex_count())
                .filter(|&v| g.degree(v) == 2)
                .map(|v| g.vertex_name(v).to_string())
                .collect()
        } else {
            bivalent.iter().map(|s| s.to_string()).collect()
        };
        let take = rng.gen_range(0..=candidates.len().min(2));
        let mut shuffled = candidates.clone();
        shuffled.shuffle(&mut rng);
        let twists: BTreeSet<String> = shuffled.into_iter().take(take).collect();
        let q = rng.gen_range(0..=1usize);
        let k = rng.gen_range(1..=3u64);
        let p_over = twists.len() + 1 + rng.gen_range(0..=1usize);
        let dim = tor_column(engine(), g, &twists, q, p_over, k).unwrap();
        assert_eq!(
            dim,
            0,
            "column {p_over} beyond {} marked vertices",
            twists.len()
        );
        checked += 1;
    }
    for (g, k, q) in [
        (samples::star(3), 3u64, 1usize),
        (samples::theta(), 2, 1),
        (samples::h_graph(), 2, 0),
    ] {
        let betti = betti_q(&g, k, q);
        let tor0 = tor_column(engine(), &g, &BTreeSet::new(), q, 0, k).unwrap();
        assert_eq!(tor0, betti);
    }
    println!("ACCEPTANCE 8: PASS — tor columns vanish beyond the marked vertex set on 5 randomized configurations and reproduce Betti numbers when the set is empty");
}

/// Criterion 9 — characteristic independence on trees: Betti numbers over
/// ℚ, 𝔽₂ and 𝔽₃ agree for every tree test graph, k ≤ 5, all degrees; for
/// the cyclic test graphs the comparison is reported (and also agrees at
/// the probed sizes) without being required.
#[test]
fn acceptance_09_characteristic_independence() {
    for (name, g) in samples::tree_test_graphs() {
        for k in 0..=5u64 {
            let complex = engine().complex(&g, k).unwrap();
            for i in 0..=complex.max_degree() {
                let over_q = betti_q(&g, k, i);
                for prime in [2, 3] {
                    let over_p = engine().betti(&g, k, i, Field::Prime(prime)).unwrap().betti;
                    assert_eq!(
                        over_p, over_q,
                        "graph {name}, weight {k}, degree {i}, prime {prime}"
                    );
                }
            }
        }
    }
    let mut reports = Vec::new();
    for (name, g) in [("loop", samples::loop_graph()), ("theta", samples::theta())] {
        for k in 1..=3u64 {
            let report = engine().torsion_probe(&g, k, 1, &[2, 3]).unwrap();
            reports.push(format!(
                "{name} k={k}: evidence={}",
                report.torsion_evidence
            ));
        }
    }
    println!("ACCEPTANCE 9: PASS — Betti numbers over ℚ, 𝔽₂, 𝔽₃ agree on all tree test graphs, k ≤ 5, all degrees; cyclic probes reported: [{}]", reports.join(", "));
}

/// Criterion 10 — structural suites: chain-level axioms (∂² = 0, the group
/// action, equivariance, stabilization commutation), generating-function
/// identities (exp of a convolution, the horizontal-strip rule) and the
/// explosion/monotonicity inequalities on 20 random connected graphs.
#[test]
fn acceptance_10_structural_suites() {
    // ∂² = 0 on every test graph complex, k ≤ 3.
    for (name, g) in samples::test_graphs() {
        for k in 0..=3u64 {
            let complex = build_complex(&g, k, DEFAULT_BASIS_CAP).unwrap();
            assert!(complex.verify_d_squared(), "∂² ≠ 0 on {name}, weight {k}");
        }
    }

    // Group-action axioms and ∂-equivariance on two representative graphs.
    let compose = |a: &confhom::linalg::SparseMatrix<i64>,
                   b: &confhom::linalg::SparseMatrix<i64>|
     -> Vec<(u32, u32, i64)> {
        use std::collections::{BTreeMap, HashMap};
        // (a·b)[r][c] = Σ_m a[r][m]·b[m][c], accumulated sparsely.
        let mut a_by_col: HashMap<u32, Vec<(u32, i64)>> = HashMap::new();
        for &(r, m, v) in a.triples() {
            a_by_col.entry(m).or_default().push((r, v));
        }
        let mut acc: BTreeMap<(u32, u32), i64> = BTreeMap::new();
        for &(m, c, bv) in b.triples() {
            if let Some(avs) = a_by_col.get(&m) {
                for &(r, av) in avs {
                    *acc.entry((r, c)).or_default() += av * bv;
                }
            }
        }
        acc.into_iter()
            .filter(|&(_, v)| v != 0)
            .map(|((r, c), v)| (r, c, v))
            .collect()
    };
    let sorted_triples = |m: &confhom::linalg::SparseMatrix<i64>| -> Vec<(u32, u32, i64)> {
        let mut t = m.triples().to_vec();
        t.sort_unstable();
        t
    };
    for g in [samples::star(4), samples::theta()] {
        let k = 3u64;
        let complex = build_complex(&g, k, DEFAULT_BASIS_CAP).unwrap();
        let sigma = [2u8, 3, 1];
        let tau = [2u8, 1, 3];
        let composite: Vec<u8> = (0..3).map(|t| sigma[(tau[t] - 1) as usize]).collect();
        for i in 0..=complex.max_degree() {
            let identity = complex.action_matrix(i, &[1, 2, 3]);
            let expected: Vec<(u32, u32, i64)> =
                (0..complex.dim(i) as u32).map(|j| (j, j, 1)).collect();
            assert_eq!(
                sorted_triples(&identity),
                expected,
                "identity acts as identity"
            );
            let a_sigma = complex.action_matrix(i, &sigma);
            let a_tau = complex.action_matrix(i, &tau);
            let a_composite = complex.action_matrix(i, &composite);
            assert_eq!(
                compose(&a_sigma, &a_tau),
                sorted_triples(&a_composite),
                "action is multiplicative in degree {i}"
            );
            if i > 0 {
                let boundary = complex.boundary(i).unwrap();
                let below = complex.action_matrix(i - 1, &sigma);
                assert_eq!(
                    compose(&below, boundary),
                    compose(boundary, &a_sigma),
                    "action commutes with the boundary in degree {i}"
                );
            }
        }
    }

    // Leaf stabilizations at two different leaves commute up to the
    // transposition of the two new labels.
    {
        let g = samples::h_graph();
        let leaf_u = g.vertex_index("a1").unwrap();
        let leaf_w = g.vertex_index("b2").unwrap();
        for k in 0..=2u64 {
            let c0 = build_complex(&g, k, DEFAULT_BASIS_CAP).unwrap();
            let c1 = build_complex(&g, k + 1, DEFAULT_BASIS_CAP).unwrap();
            let c2 = build_complex(&g, k + 2, DEFAULT_BASIS_CAP).unwrap();
            let mut swap_last: Vec<u8> = (1..=(k + 2) as u8).collect();
            swap_last.swap(k as usize, k as usize + 1);
            for i in 0..=c0.max_degree() {
                let u_then_w = compose(
                    &stabilization_matrix(&c1, &c2, i, leaf_w).unwrap(),
                    &stabilization_matrix(&c0, &c1, i, leaf_u).unwrap(),
                );
                let w_then_u = compose(
                    &stabilization_matrix(&c1, &c2, i, leaf_u).unwrap(),
                    &stabilization_matrix(&c0, &c1, i, leaf_w).unwrap(),
                );
                let twisted = compose(
                    &c2.action_matrix(i, &swap_last),
                    &confhom::linalg::SparseMatrix::from_triples(
                        c2.dim(i),
                        c0.dim(i),
                        w_then_u.clone(),
                    ),
                );
                assert_eq!(
                    u_then_w, twisted,
                    "stabilizations commute up to the swap, weight {k}, degree {i}"
                );
            }
        }
    }

    // exp turns the binomial convolution into the pointwise (Cauchy) product.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let f = ArithmeticFunction::from_values(
                (0..6).map(|_| rat(rng.gen_range(-4..=4))).collect(),
            );
            let g = ArithmeticFunction::from_values(
                (0..6).map(|_| rat(rng.gen_range(-4..=4))).collect(),
            );
            let lhs = f.binom_conv(&g).exp_transform();
            let rhs = f.exp_transform().conv(&g.exp_transform());
            for k in 0..=12u64 {
                assert_eq!(lhs.eval(k), rhs.eval(k), "exp identity at weight {k}");
            }
        }
    }

    // Horizontal-strip rule: convolving with a one-row indicator sums the
    // shifted restrictions over strip removals.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let support: Vec<(Partition, Rat)> = (0..=4u32)
            .flat_map(partitions_of)
            .map(|lam| (lam, rat(rng.gen_range(-3..=3))))
            .collect();
        let f = PartitionFunction::from_support(support);
        for lam in [Partition::empty(), p(&[2]), p(&[2, 1])] {
            for r in 1..=2u32 {
                let lhs = f.conv(&PartitionFunction::indicator(p(&[r]))).padded(&lam);
                let start = (lam.size() + lam.part(0) + r) as u64;
                for k in start..start + 5 {
                    let rhs: Rat = lam
                        .strip_removals(r, StripMode::AtMost)
                        .iter()
                        .map(|nu| f.padded(nu).eval(k - r as u64))
                        .sum();
                    assert_eq!(lhs.eval(k), rhs, "strip rule λ={lam} r={r} k={k}");
                }
            }
        }
    }

    // Explosion and monotonicity inequalities on 20 random connected graphs
    // with at most 6 essential vertices.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let cap = 1_000_000;
        let mut done = 0;
        while done < 20 {
            let vertices = rng.gen_range(4..=8);
            let extra = rng.gen_range(0..=3);
            let g = samples::random_connected(&mut rng, vertices, extra);
            let essential: Vec<usize> = (0..g.vertex_count())
                .filter(|&v| g.degree(v) >= 3)
                .collect();
            if essential.len() > 6 {
                continue;
            }
            // Explosion inequality: invariants of the once-exploded graph at
            // size i−1 are bounded by the original graph's at size i.  The
            // exploded graph keeps every other essential vertex, so size i
            // makes sense precisely when the original has ≥ i of them.
            for &w in &essential {
                let mut single = BTreeSet::new();
                single.insert(g.vertex_name(w).to_string());
                let exploded = g.explode(&single).unwrap();
                for i in 1..=essential.len().min(2) {
                    let outer = g.best_invariants(i, cap).unwrap();
                    let inner = exploded.best_invariants(i - 1, cap).unwrap();
                    assert!(inner.lambda <= outer.lambda, "Λ explosion inequality");
                    assert!(inner.delta <= outer.delta, "Δ explosion inequality");
                }
            }
            // Strict growth for connected graphs with enough essential
            // vertices.
            for i in 2..=essential.len().min(3) {
                let smaller = g.best_invariants(i - 1, cap).unwrap();
                let larger = g.best_invariants(i, cap).unwrap();
                assert!(smaller.lambda < larger.lambda, "Λ strict monotonicity");
                assert!(smaller.delta < larger.delta, "Δ strict monotonicity");
            }
            done += 1;
        }
    }
    println!("ACCEPTANCE 10: PASS — ∂²=0, action axioms, ∂-equivariance, stabilization commutation, exp/convolution identity, horizontal-strip rule, and explosion/monotonicity inequalities on 20 random graphs");
}
