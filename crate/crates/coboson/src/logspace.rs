//! Log-domain accumulation helpers.
//!
//! Normalization factors underflow `f64` catastrophically (`χ_150` at
//! `z = 0.1` is far below the subnormal range), so every production sum of
//! products runs on logarithms with `-∞` as the exact zero.

use crate::scalar::Real;

/// `ln(exp(a) + exp(b))` without overflow; `-∞` is the additive identity.
pub fn ln_add_exp<R: Real>(a: R, b: R) -> R {
    if a == R::neg_infinity() {
        return b;
    }
    if b == R::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(Σ exp(v))` accumulated in slice order (deterministic).
pub fn ln_sum_exp<R: Real>(values: &[R]) -> R {
    values
        .iter()
        .fold(R::neg_infinity(), |acc, &v| ln_add_exp(acc, v))
}

/// `ln(n!)` by direct summation.
pub fn ln_factorial<R: Real>(n: usize) -> R {
    let mut acc = R::zero();
    for k in 2..=n {
        acc = acc + R::of_usize(k).ln();
    }
    acc
}

/// `ln C(n, k)`; `-∞` when `k > n`.
pub fn ln_binomial<R: Real>(n: usize, k: usize) -> R {
    if k > n {
        return R::neg_infinity();
    }
    ln_factorial::<R>(n) - ln_factorial::<R>(k) - ln_factorial::<R>(n - k)
}

/// Neumaier-compensated sum, deterministic in iteration order.
pub fn compensated_sum<R: Real, I: IntoIterator<Item = R>>(values: I) -> R {
    let mut sum = R::zero();
    let mut comp = R::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}
