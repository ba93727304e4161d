//! Exact Bernoulli numbers and the coefficients of the SLD expansion for
//! exponential-form states.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `B_0 ..= B_n` from `Σ_{k=0}^{m} C(m+1, k) B_k = 0`, so `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        // C(m+1, k) built incrementally
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Coefficients `g_0 ..= g_order` of `L = Σ g_n G^{×n}(∂G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SldCoefficients {
    pub g: Vec<f64>,
    /// `B_2 ..= B_{order+2}`.
    pub bernoulli: Vec<BigRational>,
}

/// Exact rational `g_n = 4(2^{n+2} - 1) B_{n+2} / (n+2)!` (zero for odd `n`).
pub fn sld_coefficient_exact(n: usize, bernoulli: &[BigRational]) -> BigRational {
    if n % 2 == 1 {
        return BigRational::zero();
    }
    let factorial: BigInt = (1..=n + 2).map(BigInt::from).product();
    let pow = (BigInt::one() << (n + 2)) - BigInt::one();
    BigRational::from_integer(BigInt::from(4) * pow) * &bernoulli[n + 2]
        / BigRational::from_integer(factorial)
}

pub fn sld_coefficients(order: usize) -> SldCoefficients {
    let b = bernoulli_numbers(order + 2);
    let g = (0..=order)
        .map(|n| sld_coefficient_exact(n, &b).to_f64().unwrap_or(f64::NAN))
        .collect();
    SldCoefficients {
        g,
        bernoulli: b[2..].to_vec(),
    }
}
