//! Channel quantities in bits.

use crate::error::{Error, Result};

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// `x log2 x` with `0 log 0 = 0`.
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Binary entropy in bits.
pub fn entropy(p: f64) -> f64 {
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// Capacity of the Z-channel whose 1-input is read as 0 with probability `q`:
/// `log2(1 + (1 - q) q^(q / (1 - q)))`.
pub fn z_capacity(q: f64) -> Result<f64> {
    check_prob("q", q)?;
    if q == 0.0 {
        return Ok(1.0);
    }
    if q == 1.0 {
        return Ok(0.0);
    }
    Ok((1.0 + (1.0 - q) * q.powf(q / (1.0 - q))).log2())
}

/// Capacity of the binary channel with `P(1 | 0) = q0` and `P(0 | 1) = q1`.
///
/// Uses the closed form for `q0 + q1 < 1`; above 1 the outputs are relabelled,
/// and `q0 + q1 = 1` (output independent of input) gives 0.
pub fn binary_channel_capacity(q0: f64, q1: f64) -> Result<f64> {
    check_prob("q0", q0)?;
    check_prob("q1", q1)?;
    let (a, b) = if q0 + q1 > 1.0 { (1.0 - q0, 1.0 - q1) } else { (q0, q1) };
    let d = 1.0 - a - b;
    if d < 1e-12 {
        return Ok(0.0);
    }
    let (ha, hb) = (entropy(a), entropy(b));
    let c = (a * hb - (1.0 - b) * ha) / d + (1.0 + ((ha - hb) / d).exp2()).log2();
    Ok(c.max(0.0))
}

/// Mutual information of the binary channel under input prior `P(X = 1) = p`.
pub fn binary_channel_mi(p: f64, q0: f64, q1: f64) -> Result<f64> {
    check_prob("p", p)?;
    check_prob("q0", q0)?;
    check_prob("q1", q1)?;
    let y1 = (1.0 - p) * q0 + p * (1.0 - q1);
    Ok(entropy(y1) - (1.0 - p) * entropy(q0) - p * entropy(q1))
}

/// Fano-type upper bound on the number of bits storable with error `eps`:
/// `(I + h(eps)) / (1 - eps)`.
pub fn fano_upper(mi: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")));
    }
    if mi.is_nan() || mi < 0.0 {
        return Err(Error::InvalidArgument(format!("mutual information must be >= 0, got {mi}")));
    }
    Ok((mi + entropy(eps)) / (1.0 - eps))
}
