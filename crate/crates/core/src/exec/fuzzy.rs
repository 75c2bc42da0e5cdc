//! Łukasiewicz connectives.

use crate::error::{Error, Result};

const TOL: f64 = 1e-12;

fn check(p: f64) -> Result<f64> {
    if !(-TOL..=1.0 + TOL).contains(&p) {
        return Err(Error::Domain(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

pub fn luk_and(p1: f64, p2: f64) -> Result<f64> {
    Ok(and(check(p1)?, check(p2)?))
}

pub fn luk_or(p1: f64, p2: f64) -> Result<f64> {
    Ok(or(check(p1)?, check(p2)?))
}

pub fn luk_not(p: f64) -> Result<f64> {
    Ok(not(check(p)?))
}

// Unchecked forms for the executor, whose values are in range by construction.

#[inline]
pub(crate) fn and(p1: f64, p2: f64) -> f64 {
    (p1 + p2 - 1.0).max(0.0)
}

#[inline]
pub(crate) fn or(p1: f64, p2: f64) -> f64 {
    (p1 + p2).min(1.0)
}

#[inline]
pub(crate) fn not(p: f64) -> f64 {
    1.0 - p
}
