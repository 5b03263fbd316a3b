//! Exact-rational function calculus on ℤ≥0 and on partitions: the two
//! convolutions, the exponential transform, shift and summation operators,
//! and the dimension/multiplicity functions of the free twisted algebras.
//!
//! An `ArithmeticFunction` is a memoized rule k ↦ ℚ; a `PartitionFunction`
//! is a memoized rule on partitions. Both are cheap to clone (shared memo).

use crate::arith::{binomial, factorial, falling, rat, Rat};
use crate::asymptotics::AsymptoticTerm;
use crate::partitions::{Partition, StripMode};
use num_bigint::BigInt;
use num_traits::Zero;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FunctionError {
    #[error("the sequence grows like {base}^k, not like a polynomial times a factorial")]
    ExponentialGrowth { base: u64 },
    #[error("the sequence is eventually zero; it has no leading term")]
    EventuallyZero,
}

/// A function ℤ≥0 → ℚ given by an evaluation rule with a memo table.
#[derive(Clone)]
pub struct ArithmeticFunction {
    rule: Rc<dyn Fn(u64) -> Rat>,
    memo: Rc<RefCell<HashMap<u64, Rat>>>,
}

impl ArithmeticFunction {
    pub fn from_rule(rule: impl Fn(u64) -> Rat + 'static) -> Self {
        ArithmeticFunction {
            rule: Rc::new(rule),
            memo: Rc::new(RefCell::new(HashMap::new())),
        }
    }

    /// Finitely supported function: `values[k]` for `k < values.len()`, 0 after.
    pub fn from_values(values: Vec<Rat>) -> Self {
        Self::from_rule(move |k| values.get(k as usize).cloned().unwrap_or_else(Rat::zero))
    }

    /// The indicator 𝟙_m.
    pub fn indicator(m: u64) -> Self {
        Self::from_rule(move |k| if k == m { rat(1) } else { rat(0) })
    }

    pub fn constant(value: i64) -> Self {
        Self::from_rule(move |_| rat(value))
    }

    pub fn eval(&self, k: u64) -> Rat {
        if let Some(v) = self.memo.borrow().get(&k) {
            return v.clone();
        }
        let v = (self.rule)(k);
        self.memo.borrow_mut().insert(k, v.clone());
        v
    }

    /// Plain convolution: (f·g)(k) = Σ_{ℓ≤k} f(ℓ)g(k−ℓ).
    pub fn conv(&self, other: &Self) -> Self {
        let (f, g) = (self.clone(), other.clone());
        Self::from_rule(move |k| (0..=k).map(|l| f.eval(l) * g.eval(k - l)).sum())
    }

    /// Binomial convolution: (f⋆g)(k) = Σ_{ℓ≤k} C(k,ℓ) f(ℓ)g(k−ℓ).
    pub fn binom_conv(&self, other: &Self) -> Self {
        let (f, g) = (self.clone(), other.clone());
        Self::from_rule(move |k| {
            (0..=k)
                .map(|l| {
                    Rat::from_integer(binomial(k as i64, l as i64)) * f.eval(l) * g.eval(k - l)
                })
                .sum()
        })
    }

    /// Exponential transform: exp(f)(k) = f(k)/k!.
    pub fn exp_transform(&self) -> Self {
        let f = self.clone();
        Self::from_rule(move |k| f.eval(k) / Rat::from_integer(factorial(k).into()))
    }

    /// Shift σ(f)(k) = f(k−1), with σ(f)(0) = 0.
    pub fn shift(&self) -> Self {
        self.shift_by(1)
    }

    /// Iterated shift σ^r.
    pub fn shift_by(&self, r: u64) -> Self {
        let f = self.clone();
        Self::from_rule(move |k| if k < r { rat(0) } else { f.eval(k - r) })
    }

    /// Weighted shift σ̂(f)(k) = k·f(k−1) = (f⋆𝟙₁)(k).
    pub fn shift_hat(&self) -> Self {
        self.shift_hat_by(1)
    }

    /// Iterated weighted shift σ̂^r(f)(k) = k(k−1)⋯(k−r+1)·f(k−r).
    pub fn shift_hat_by(&self, r: u64) -> Self {
        let f = self.clone();
        Self::from_rule(move |k| {
            if k < r {
                rat(0)
            } else {
                Rat::from_integer(falling(k, r).into()) * f.eval(k - r)
            }
        })
    }

    /// Partial sums Σ(f)(k) = Σ_{ℓ≤k} f(ℓ) = Σ_{r≥0} σ^r(f)(k).
    pub fn summation(&self) -> Self {
        let f = self.clone();
        Self::from_rule(move |k| (0..=k).map(|l| f.eval(l)).sum())
    }

    pub fn add(&self, other: &Self) -> Self {
        let (f, g) = (self.clone(), other.clone());
        Self::from_rule(move |k| f.eval(k) + g.eval(k))
    }

    pub fn scale(&self, c: Rat) -> Self {
        let f = self.clone();
        Self::from_rule(move |k| f.eval(k) * &c)
    }
}

/// A function Π → ℚ given by an evaluation rule with a memo table.
#[derive(Clone)]
pub struct PartitionFunction {
    rule: Rc<dyn Fn(&Partition) -> Rat>,
    memo: Rc<RefCell<HashMap<Partition, Rat>>>,
}

impl PartitionFunction {
    pub fn from_rule(rule: impl Fn(&Partition) -> Rat + 'static) -> Self {
        PartitionFunction {
            rule: Rc::new(rule),
            memo: Rc::new(RefCell::new(HashMap::new())),
        }
    }

    /// Finitely supported partition function.
    pub fn from_support(pairs: Vec<(Partition, Rat)>) -> Self {
        let table: HashMap<Partition, Rat> = pairs.into_iter().collect();
        Self::from_rule(move |lam| table.get(lam).cloned().unwrap_or_else(Rat::zero))
    }

    pub fn indicator(lam: Partition) -> Self {
        Self::from_rule(move |mu| if *mu == lam { rat(1) } else { rat(0) })
    }

    /// e = Σ_{r≥0} 𝟙_{(r)}: the indicator of partitions with at most one row.
    pub fn trivial_rows() -> Self {
        Self::from_rule(|lam| if lam.rows() <= 1 { rat(1) } else { rat(0) })
    }

    pub fn eval(&self, lam: &Partition) -> Rat {
        if let Some(v) = self.memo.borrow().get(lam) {
            return v.clone();
        }
        let v = (self.rule)(lam);
        self.memo.borrow_mut().insert(lam.clone(), v.clone());
        v
    }

    /// Littlewood–Richardson convolution:
    /// (f⋆g)(λ) = Σ_{μ,ν ⊆ λ, |μ|+|ν|=|λ|} c^λ_{μν} f(μ)g(ν).
    pub fn conv(&self, other: &Self) -> Self {
        let (f, g) = (self.clone(), other.clone());
        Self::from_rule(move |lam| {
            let subs = lam.sub_partitions();
            let mut acc = Rat::zero();
            for mu in &subs {
                let fv = f.eval(mu);
                if fv.is_zero() {
                    continue;
                }
                for nu in &subs {
                    if mu.size() + nu.size() != lam.size() {
                        continue;
                    }
                    let c = crate::partitions::lr_coefficient(lam, mu, nu);
                    if c == 0 {
                        continue;
                    }
                    acc += &fv * g.eval(nu) * rat(c as i64);
                }
            }
            acc
        })
    }

    /// Convolution with e = Σ_r 𝟙_{(r)}. By the Pieri rule this is the sum of
    /// `f` over all horizontal-strip removals of the argument.
    pub fn conv_trivial_rows(&self) -> Self {
        let f = self.clone();
        Self::from_rule(move |lam| {
            lam.strip_removals(lam.part(0), StripMode::AtMost)
                .iter()
                .map(|mu| f.eval(mu))
                .sum()
        })
    }

    /// σ̂(f) = f⋆𝟙_{(1)}: by the Pieri rule, the sum of `f` over single-box
    /// removals.
    pub fn shift_hat(&self) -> Self {
        let f = self.clone();
        Self::from_rule(move |lam| {
            lam.strip_removals(1, StripMode::Exactly)
                .iter()
                .map(|mu| f.eval(mu))
                .sum()
        })
    }

    /// The padded restriction f_λ: k ↦ f(λ[k]), zero for k < |λ|+λ₁.
    pub fn padded(&self, lam: &Partition) -> ArithmeticFunction {
        let f = self.clone();
        let lam = lam.clone();
        ArithmeticFunction::from_rule(move |k| match lam.pad(k as u32) {
            Ok(padded) => f.eval(&padded),
            Err(_) => rat(0),
        })
    }
}

/// Dimension of the weight-k part of the free twisted algebra on `m`
/// commuting and `n` non-autocommuting weight-1 generators:
/// k!·Σ_{ℓ≤k} C(k−ℓ+n−1, n−1)·m^ℓ/ℓ! for n > 0, and m^k for n = 0.
pub fn dim_free(m: u64, n: u64) -> ArithmeticFunction {
    if n == 0 {
        ArithmeticFunction::from_rule(move |k| {
            Rat::from_integer(num_traits::pow(BigInt::from(m), k as usize))
        })
    } else {
        ArithmeticFunction::from_rule(move |k| {
            let sum: Rat = (0..=k)
                .map(|l| {
                    Rat::from_integer(binomial((k - l + n - 1) as i64, (n - 1) as i64))
                        * Rat::new(
                            num_traits::pow(BigInt::from(m), l as usize),
                            factorial(l).into(),
                        )
                })
                .sum();
            sum * Rat::from_integer(factorial(k).into())
        })
    }
}

/// Specht-module multiplicity function of the same free twisted algebra:
/// μ ↦ mul_μ. The base case is C(|μ|+n−1, n−1) copies of the regular
/// representation (each irreducible appearing dim V_μ times); every commuting
/// generator convolves with e.
pub fn mult_function(m: u64, n: u64) -> PartitionFunction {
    let mut f = PartitionFunction::from_rule(move |mu| {
        let copies = binomial(mu.size() as i64 + n as i64 - 1, n as i64 - 1);
        Rat::from_integer(copies) * Rat::from_integer(mu.specht_dim().into())
    });
    for _ in 0..m {
        f = f.conv_trivial_rows();
    }
    f
}

/// k ↦ mul_{λ[k]} of the free twisted algebra on (m, n) generators.
pub fn mult_free(m: u64, n: u64, lam: &Partition) -> ArithmeticFunction {
    mult_function(m, n).padded(lam)
}

/// The leading asymptotic term of `dim_free(m,n)` (λ = None) or of
/// `mult_free(m,n,λ)` (λ = Some).
pub fn leading_free(
    m: u64,
    n: u64,
    lam: Option<&Partition>,
) -> Result<AsymptoticTerm, FunctionError> {
    match lam {
        None => {
            if n == 0 {
                if m == 0 {
                    Err(FunctionError::EventuallyZero)
                } else {
                    Err(FunctionError::ExponentialGrowth { base: m })
                }
            } else {
                // k! k^{n−1} · e^m/(n−1)!
                let mut coefficient = BTreeMap::new();
                coefficient.insert(m as u32, Rat::new(1.into(), factorial(n - 1).into()));
                Ok(AsymptoticTerm {
                    factorial: true,
                    degree: (n - 1) as u32,
                    coefficient,
                })
            }
        }
        Some(lam) => {
            if n == 0 {
                if m == 0 {
                    return Err(FunctionError::EventuallyZero);
                }
                // The multiplicity of V_{λ[k]} in weight k counts semistandard
                // tableaux of shape λ[k] on m letters; removing the long first
                // row (forced to start with 1s) leaves shape λ on the letters
                // 2..m, so the growth is k^{m−1}·ssyt(λ, m−1)/(m−1)!.
                let c = lam.ssyt_count((m - 1) as u32);
                if c.is_zero() {
                    return Err(FunctionError::EventuallyZero);
                }
                let mut coefficient = BTreeMap::new();
                coefficient.insert(0, Rat::new(BigInt::from(c), factorial(m - 1).into()));
                Ok(AsymptoticTerm {
                    factorial: false,
                    degree: (m - 1) as u32,
                    coefficient,
                })
            } else {
                let degree = lam.size() as u64 + m + n - 1;
                let num = Rat::from_integer(lam.specht_dim().into())
                    * Rat::from_integer(binomial(lam.size() as i64 + n as i64 - 1, n as i64 - 1));
                let mut coefficient = BTreeMap::new();
                coefficient.insert(0, num / Rat::from_integer(factorial(degree).into()));
                Ok(AsymptoticTerm {
                    factorial: false,
                    degree: degree as u32,
                    coefficient,
                })
            }
        }
    }
}
