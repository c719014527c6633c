//! Composite Simpson quadrature, on closures and on tabulated samples.

use crate::error::{Error, Result};

/// Composite Simpson integral of `f` over `[a, b]` with `n_panels` even
/// subintervals. Exact on cubics; error `O(panel^4)` otherwise.
pub fn simpson_integral<F>(f: F, a: f64, b: f64, n_panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if n_panels < 2 || n_panels % 2 != 0 {
        return Err(Error::InvalidArgument(
            "simpson_integral requires an even panel count >= 2".into(),
        ));
    }
    if a == b {
        return Ok(0.0);
    }
    let h = (b - a) / n_panels as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n_panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    let value = acc * h / 3.0;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::EvaluationFailure {
            point: vec![a, b],
            reason: "non-finite quadrature value".into(),
        })
    }
}

/// Integral of uniformly spaced samples `values` with spacing `h`.
///
/// Uses composite Simpson; an odd interval count is closed with a Simpson 3/8
/// tail so the order-4 accuracy is kept without resampling.
pub fn simpson_samples(values: &[f64], h: f64) -> Result<f64> {
    if values.len() < 2 {
        return Ok(0.0);
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("sample spacing must be positive".into()));
    }
    let intervals = values.len() - 1;
    if intervals == 1 {
        // Trapezoid is all two samples support.
        return Ok(0.5 * h * (values[0] + values[1]));
    }
    if intervals == 3 {
        return Ok(3.0 * h / 8.0 * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]));
    }
    let (simpson_part, tail) = if intervals % 2 == 0 {
        (intervals, 0.0)
    } else {
        // 3/8 rule on the last three intervals.
        let n = values.len();
        let tail = 3.0 * h / 8.0
            * (values[n - 4] + 3.0 * values[n - 3] + 3.0 * values[n - 2] + values[n - 1]);
        (intervals - 3, tail)
    };
    let mut acc = values[0] + values[simpson_part];
    for k in 1..simpson_part {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * values[k];
    }
    Ok(acc * h / 3.0 + tail)
}

/// Cumulative integral of uniformly spaced samples: output `c` has the same
/// length, `c[0] = 0`, and `c[k]` approximates the integral up to sample `k`
/// at 4th order (Simpson pairs, with a quadratic half-panel rule at odd
/// indices).
pub fn cumulative_simpson(values: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("sample spacing must be positive".into()));
    }
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return Ok(out);
    }
    // The even-index chain is a long running sum; compensated accumulation
    // keeps its roundoff flat over 1e4+ samples.
    let mut even_sum = 0.0f64;
    let mut even_comp = 0.0f64;
    for k in 1..n {
        if k % 2 == 0 {
            let increment = h / 3.0 * (values[k - 2] + 4.0 * values[k - 1] + values[k]);
            let y = increment - even_comp;
            let t = even_sum + y;
            even_comp = (t - even_sum) - y;
            even_sum = t;
            out[k] = even_sum;
        } else if k + 1 < n {
            // Integral over the first half of the panel [k-1, k+1] from the
            // quadratic through the three surrounding samples.
            out[k] = out[k - 1]
                + h / 12.0 * (5.0 * values[k - 1] + 8.0 * values[k] - values[k + 1]);
        } else {
            // Final odd sample: use the quadratic through the last three.
            out[k] = out[k - 1]
                + h / 12.0 * (-values[k - 2] + 8.0 * values[k - 1] + 5.0 * values[k]);
        }
    }
    Ok(out)
}
