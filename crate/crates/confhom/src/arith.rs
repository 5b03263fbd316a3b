//! Exact integer/rational helpers shared across the crate: factorials, the
//! binomial-coefficient convention used by the closed forms, dense polynomials
//! over `ℚ`, Lagrange interpolation and a high-precision rational `e`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for j in 2..=n {
        acc *= BigUint::from(j);
    }
    acc
}

/// Binomial coefficient with the conventions the closed forms rely on:
/// `C(n, n) = 1` even for negative `n`, and every other combination with a
/// negative argument (or `r > n`) is `0`.
pub fn binomial(n: i64, r: i64) -> BigInt {
    if n == r {
        return BigInt::one();
    }
    if r < 0 || n < 0 || r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for j in 0..r {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Falling factorial `n · (n−1) ⋯ (n−r+1)`; the number of injections of an
/// `r`-set into an `n`-set. Zero when `r > n`.
pub fn falling(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for j in 0..r {
        acc *= BigUint::from(n - j);
    }
    acc
}

/// `e` as an exact rational partial sum `Σ_{j≤terms} 1/j!`, accurate to well
/// beyond 30 decimal digits at the default used by the asymptotics reports.
pub fn euler_number(terms: u64) -> Rat {
    let mut acc = Rat::zero();
    let mut fact = BigInt::one();
    for j in 0..=terms {
        if j > 0 {
            fact *= BigInt::from(j);
        }
        acc += Rat::new(BigInt::one(), fact.clone());
    }
    acc
}

/// Render an exact rational as a decimal string with `digits` fractional digits
/// (round-to-nearest, ties away from zero). Deterministic, used for CSV output.
pub fn decimal_string(x: &Rat, digits: u32) -> String {
    let sign = if x.is_negative() { "-" } else { "" };
    let a = x.abs();
    let scale = BigInt::from(10u32).pow(digits);
    let scaled: BigInt = (a.numer() * &scale * 2 + a.denom()) / (a.denom() * 2);
    let (int_part, frac_part) = (scaled.clone() / &scale, scaled % &scale);
    let mut frac = frac_part.to_string();
    while (frac.len() as u32) < digits {
        frac.insert(0, '0');
    }
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

/// Dense polynomial over `ℚ`, coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Rat>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly(vec![c])
        }
    }

    /// The monic linear polynomial `k + c`.
    pub fn linear(c: Rat) -> Self {
        Poly(vec![c, Rat::one()])
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.degree().map(|d| &self.0[d])
    }

    pub fn coeff(&self, d: usize) -> Rat {
        self.0.get(d).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![Rat::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] += c;
        }
        Poly(out).trimmed()
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        Poly(self.0.iter().map(|a| a * c).collect()).trimmed()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    fn trimmed(mut self) -> Poly {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    /// `n! · C(k+n, n) = (k+1)(k+2)⋯(k+n)` as a polynomial in `k`.
    pub fn rising_binomial(n: u64) -> Poly {
        let mut acc = Poly::constant(Rat::one());
        for m in 1..=n {
            acc = acc.mul(&Poly::linear(rat(m as i64)));
        }
        acc
    }
}

/// Exact Lagrange interpolation through `(x, y)` pairs with distinct `x`.
pub fn interpolate(points: &[(Rat, Rat)]) -> Poly {
    let mut acc = Poly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut term = Poly::constant(Rat::one());
        let mut denom = Rat::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                term = term.mul(&Poly::linear(-xj.clone()));
                denom *= xi - xj;
            }
        }
        acc = acc.add(&term.scale(&(yi / denom)));
    }
    acc
}
