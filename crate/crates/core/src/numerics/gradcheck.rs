use alloc::format;

use super::tensor::Tensor;
use crate::error::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-6;

/// Compares an analytic gradient against central finite differences.
///
/// `f` maps a point to `(output, analytic gradient at that point)`; the
/// output must be a single value. Returns the maximum over coordinates of
/// `|analytic - numeric| / max(1, |analytic|)`.
pub fn grad_check<F>(mut f: F, point: &Tensor, step: f64) -> Result<f64>
where
    F: FnMut(&Tensor) -> Result<(Tensor, Tensor)>,
{
    if !(step > 0.0) {
        return Err(Error::Contract(format!("finite-difference step must be positive, got {}", step)));
    }
    let (out, analytic) = f(point)?;
    if out.len() != 1 {
        return Err(Error::Contract(format!(
            "grad_check needs a scalar-valued function, got output shape {:?}",
            out.shape()
        )));
    }
    if analytic.len() != point.len() {
        return Err(Error::Shape {
            op: "grad_check",
            detail: format!("gradient {:?} for point {:?}", analytic.shape(), point.shape()),
        });
    }
    let mut probe = point.clone();
    let mut worst: f64 = 0.0;
    for i in 0..point.len() {
        let x0 = point.data()[i];
        probe.data_mut()[i] = x0 + step;
        let up = f(&probe)?.0.data()[0];
        probe.data_mut()[i] = x0 - step;
        let down = f(&probe)?.0.data()[0];
        probe.data_mut()[i] = x0;
        let numeric = (up - down) / (2.0 * step);
        let a = analytic.data()[i];
        let err = libm::fabs(a - numeric) / libm::fabs(a).max(1.0);
        if !err.is_finite() {
            return Err(Error::NonFinite(format!("grad_check coordinate {}", i)));
        }
        worst = worst.max(err);
    }
    Ok(worst)
}
