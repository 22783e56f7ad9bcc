//! Exact rational arithmetic used for oracle checks and table emission.
//!
//! Every finite `f64` is a dyadic rational, so moments of a signal with
//! `f64` parameters can be computed without any rounding. The results are
//! rounded once when converted back with [`to_f64`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::signal::SpikeSignal;

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("non-finite value {x}")))
}

/// Rational value of the shortest decimal that round-trips to `x`.
///
/// `0.1` becomes exactly `1/10` rather than the nearest dyadic. Used where
/// parameters are given as decimals and an identity should hold exactly.
pub fn from_decimal(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite value {x}")));
    }
    let text = format!("{x:e}");
    let (mantissa, exponent) = text.split_once('e').expect("`{:e}` always has an exponent");
    let mut exponent: i64 = exponent.parse().expect("exponent is an integer");
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let digits: String = match mantissa.split_once('.') {
        Some((int, frac)) => {
            exponent -= frac.len() as i64;
            format!("{int}{frac}")
        }
        None => mantissa.to_string(),
    };
    let mut numer: BigInt = digits.parse().expect("mantissa digits");
    if negative {
        numer = -numer;
    }
    let ten = BigInt::from(10);
    let scale = num_traits::pow(ten, exponent.unsigned_abs() as usize);
    Ok(if exponent >= 0 {
        BigRational::from_integer(numer * scale)
    } else {
        BigRational::new(numer, scale)
    })
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Moments `m_k = sum_j a_j x_j^k`, `k < count`, from exact rational parameters.
pub fn moments_of(amplitudes: &[BigRational], nodes: &[BigRational], count: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); count];
    for (a, x) in amplitudes.iter().zip(nodes) {
        let mut term = a.clone();
        for m in out.iter_mut() {
            *m += &term;
            term *= x;
        }
    }
    out
}

/// Exact moments of a signal.
pub fn moments_exact(signal: &SpikeSignal, count: usize) -> Vec<BigRational> {
    let amps: Vec<_> = signal.amplitudes().iter().map(|&a| exact(a)).collect();
    let nodes: Vec<_> = signal.nodes().iter().map(|&x| exact(x)).collect();
    moments_of(&amps, &nodes, count)
}

/// Exact moments rounded once to double precision.
pub fn moments_rounded(signal: &SpikeSignal, count: usize) -> Vec<f64> {
    moments_exact(signal, count).iter().map(to_f64).collect()
}

/// Exact `m_k(f0) - m_k(f1)` for `k < count`.
pub fn moment_differences(f0: &SpikeSignal, f1: &SpikeSignal, count: usize) -> Vec<BigRational> {
    moments_exact(f0, count)
        .into_iter()
        .zip(moments_exact(f1, count))
        .map(|(a, b)| a - b)
        .collect()
}

pub fn abs_max(values: &[BigRational]) -> BigRational {
    values
        .iter()
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}

pub fn binomial(n: usize, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k {
        acc = acc * BigRational::from_integer(BigInt::from(n - i)) / BigRational::from_integer(BigInt::from(i + 1));
    }
    acc
}

// Signals are validated finite at construction.
fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("signal parameters are finite")
}
