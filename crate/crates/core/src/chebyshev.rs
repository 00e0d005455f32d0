//! Chebyshev polynomials `T_nu`, `U_nu` at arguments `x >= 1` and real order.
//!
//! Writing `x = (r + 1/r) / 2 = cosh(theta)` with `r = e^theta >= 1`,
//!
//! ```text
//! T_nu(x) = (r^nu + r^-nu) / 2               = cosh(nu theta)
//! U_nu(x) = (r^(nu+1) - r^-(nu+1)) / (r - 1/r) = sinh((nu+1) theta) / sinh(theta)
//! ```
//!
//! which continues both families to any real `nu`. Integer orders use
//! square-and-multiply on `r^n - 1`, so they cost `O(log n)` multiplications
//! and never subtract nearly equal numbers. [`Scaled`] values and
//! [`t_over_u`] keep huge orders representable.

use crate::error::{Error, Result};

/// `(alpha, r, theta)` with `2(1 + alpha) = r + 1/r`, `r = e^theta >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    pub alpha: f64,
    pub r: f64,
    pub theta: f64,
}

impl SpectralParameter {
    /// `r - 1`, exact for small alpha.
    fn r_minus_one(&self) -> f64 {
        self.alpha + (self.alpha * (2.0 + self.alpha)).sqrt()
    }

    pub fn x(&self) -> f64 {
        1.0 + self.alpha
    }
}

pub fn param_from_alpha(alpha: f64) -> Result<SpectralParameter> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::Domain(format!(
            "alpha = {alpha} is outside the real branch alpha >= 0"
        )));
    }
    let delta = alpha + (alpha * (2.0 + alpha)).sqrt();
    Ok(SpectralParameter {
        alpha,
        r: 1.0 + delta,
        theta: delta.ln_1p(),
    })
}

fn param_from_x(x: f64) -> Result<SpectralParameter> {
    if x.is_nan() || x < 1.0 {
        return Err(Error::Domain(format!("Chebyshev argument x = {x} < 1")));
    }
    param_from_alpha(x - 1.0)
}

/// `T_nu(x)` for real order `nu` and `x >= 1`.
pub fn cheb_t(order: f64, x: f64) -> Result<f64> {
    match as_integer(order) {
        Some(n) => cheb_t_integer(n, x),
        None => cheb_t_hyperbolic(order, x),
    }
}

/// `U_nu(x)` for real order `nu` and `x >= 1`.
pub fn cheb_u(order: f64, x: f64) -> Result<f64> {
    match as_integer(order) {
        Some(n) => cheb_u_integer(n, x),
        None => cheb_u_hyperbolic(order, x),
    }
}

fn as_integer(order: f64) -> Option<i64> {
    (order.fract() == 0.0 && order.abs() < 9.0e15).then_some(order as i64)
}

/// `(1 + delta)^n - 1` by square-and-multiply.
///
/// Uses `(1+a)(1+b) - 1 = a + b + ab`; with `delta >= 0` every step adds
/// non-negative terms.
fn pow_minus_one(delta: f64, n: u64) -> f64 {
    let mut acc = 0.0;
    let mut base = delta;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc + base + acc * base;
        }
        e >>= 1;
        if e > 0 {
            base *= 2.0 + base;
        }
    }
    acc
}

/// Integer-order `T_n`, `O(log |n|)`.
pub fn cheb_t_integer(n: i64, x: f64) -> Result<f64> {
    let p = param_from_x(x)?;
    let rn = 1.0 + pow_minus_one(p.r_minus_one(), n.unsigned_abs());
    Ok(0.5 * (rn + 1.0 / rn))
}

/// Integer-order `U_n`, `O(log |n|)`.
pub fn cheb_u_integer(n: i64, x: f64) -> Result<f64> {
    let p = param_from_x(x)?;
    let k = n + 1;
    if k == 0 {
        return Ok(0.0);
    }
    let delta = p.r_minus_one();
    let value = if delta == 0.0 {
        k.unsigned_abs() as f64
    } else {
        // (r^k - r^-k) / (r - 1/r) with r^k - r^-k = q(2+q)/(1+q), q = r^k - 1
        let q = pow_minus_one(delta, k.unsigned_abs());
        let num = (2.0 + q) * (q / (1.0 + q));
        let den = delta * (2.0 + delta) / (1.0 + delta);
        num / den
    };
    Ok(if k < 0 { -value } else { value })
}

/// `cosh(nu theta)`, any real order.
pub fn cheb_t_hyperbolic(order: f64, x: f64) -> Result<f64> {
    let p = param_from_x(x)?;
    Ok((order * p.theta).cosh())
}

/// `sinh((nu+1) theta) / sinh(theta)`, any real order; `nu + 1` at `x = 1`.
pub fn cheb_u_hyperbolic(order: f64, x: f64) -> Result<f64> {
    let p = param_from_x(x)?;
    if p.theta == 0.0 {
        return Ok(order + 1.0);
    }
    Ok(((order + 1.0) * p.theta).sinh() / p.theta.sinh())
}

/// `mantissa * exp(log_scale)`, for values beyond `f64` range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn value(&self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }

    /// `self / other` with the exponents combined before exponentiating.
    pub fn ratio(&self, other: &Scaled) -> f64 {
        self.mantissa / other.mantissa * (self.log_scale - other.log_scale).exp()
    }
}

fn t_scaled_at(order: f64, p: &SpectralParameter) -> Scaled {
    let e = order.abs() * p.theta;
    Scaled {
        mantissa: 0.5 * (1.0 + (-2.0 * e).exp()),
        log_scale: e,
    }
}

fn u_scaled_at(order: f64, p: &SpectralParameter) -> Scaled {
    let k = order + 1.0;
    if p.theta == 0.0 || k == 0.0 {
        return Scaled {
            mantissa: k,
            log_scale: 0.0,
        };
    }
    let e = k.abs() * p.theta;
    Scaled {
        mantissa: k.signum() * -(-2.0 * e).exp_m1() / (2.0 * p.theta.sinh()),
        log_scale: e,
    }
}

pub fn cheb_t_scaled(order: f64, x: f64) -> Result<Scaled> {
    Ok(t_scaled_at(order, &param_from_x(x)?))
}

pub fn cheb_u_scaled(order: f64, x: f64) -> Result<Scaled> {
    Ok(u_scaled_at(order, &param_from_x(x)?))
}

/// `T_{t_order}(x) / U_{u_order}(x)` at `x = 1 + p.alpha`, overflow-free.
pub fn t_over_u(t_order: f64, u_order: f64, p: &SpectralParameter) -> Result<f64> {
    let den = u_scaled_at(u_order, p);
    if den.mantissa == 0.0 {
        return Err(Error::Domain(format!("U_{u_order} vanishes")));
    }
    Ok(t_scaled_at(t_order, p).ratio(&den))
}
