//! The Chebyshev filter `p*` that certifies the KQD bound, its Fourier
//! coefficients, and the explicit Krylov-space state built from them.

use std::f64::consts::PI;

use crate::{Error, Result, StateVector, C64};

fn check_window(a: f64, d_poly: usize) -> Result<()> {
    if !(a > 0.0 && a < PI) {
        return Err(Error::InvalidParameter(format!(
            "filter window a = {a} outside (0, π)"
        )));
    }
    if d_poly == 0 {
        return Err(Error::InvalidParameter("filter degree 0".into()));
    }
    Ok(())
}

fn chebyshev_argument(theta: f64, a: f64) -> f64 {
    let ca = a.cos();
    1.0 + 2.0 * (theta.cos() - ca) / (ca + 1.0)
}

/// `T_k(x) / T_k(x0)` for `x0 ≥ 1`, evaluated in log space so neither side
/// overflows.
fn chebyshev_ratio(x: f64, x0: f64, k: usize) -> f64 {
    let kf = k as f64;
    let a0 = x0.acosh();
    let q0 = (-2.0 * kf * a0).exp();
    let outer = |y: f64| {
        let a = y.acosh();
        (kf * (a - a0)).exp() * (1.0 + (-2.0 * kf * a).exp()) / (1.0 + q0)
    };
    if x >= 1.0 {
        outer(x)
    } else if x <= -1.0 {
        let s = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        s * outer(-x)
    } else {
        (kf * x.acos()).cos() * 2.0 * (-kf * a0).exp() / (1.0 + q0)
    }
}

/// `p*(θ) = T_k(1 + 2(cos θ - cos a)/(cos a + 1)) / T_k(1 + 2(1 - cos a)/(cos a + 1))`
/// with `k = d_poly`. Equals 1 at `θ = 0` and is small outside `(-a, a)`.
pub fn chebyshev_filter(theta: f64, a: f64, d_poly: usize) -> Result<f64> {
    check_window(a, d_poly)?;
    let x0 = chebyshev_argument(0.0, a);
    Ok(chebyshev_ratio(chebyshev_argument(theta, a), x0, d_poly))
}

/// `2 (1 + a)^{-d_poly}`, the out-of-band bound on `|p*|`.
pub fn filter_bound(a: f64, d_poly: usize) -> f64 {
    2.0 * (1.0 + a).powi(-(d_poly as i32))
}

/// Coefficients `a_m`, `m = -d_poly..=d_poly` (index `m + d_poly`), with
/// `p*(θ) = Σ_m a_m e^{imθ}`. Real and symmetric because `p*` is even.
pub fn filter_fourier(a: f64, d_poly: usize) -> Result<Vec<f64>> {
    check_window(a, d_poly)?;
    let n = 2 * d_poly + 2;
    let samples: Vec<f64> = (0..n)
        .map(|j| chebyshev_filter(2.0 * PI * j as f64 / n as f64, a, d_poly))
        .collect::<Result<_>>()?;
    let half: Vec<f64> = (0..=d_poly)
        .map(|m| {
            samples
                .iter()
                .enumerate()
                .map(|(j, s)| s * (2.0 * PI * (m * j) as f64 / n as f64).cos())
                .sum::<f64>()
                / n as f64
        })
        .collect();
    Ok((0..=2 * d_poly).map(|i| half[i.abs_diff(d_poly)]).collect())
}

/// The filtered state `Σ_j d_j |ψ_j⟩` in the span of the Krylov states.
#[derive(Clone, Debug)]
pub struct FilterCertificate {
    /// Coefficient of `|ψ_j⟩`, `j = 0..d`, normalized so the state has unit norm.
    pub coeffs: Vec<C64>,
    /// Norm of the state before normalization (at least `|γ0|`).
    pub raw_norm: f64,
    pub state: StateVector,
}

/// Build the filtered state from Krylov states `|ψ_j⟩ = e^{-ijHΔt}|ψ0⟩`,
/// `j = 0..d` (odd `d`). `a = (E1 - E0)Δt` is the filter window.
///
/// The filter is centered on `|ψ_{(d-1)/2}⟩`; the result is the shifted-basis
/// filter state evolved by `e^{-i d_poly H Δt}`, so it has the same distance to
/// the ground state up to a global phase.
pub fn filter_certificate(
    states: &[StateVector],
    e0: f64,
    dt: f64,
    a: f64,
) -> Result<FilterCertificate> {
    let d = states.len();
    if d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "filter certificate needs odd d, got {d}"
        )));
    }
    let dp = (d - 1) / 2;
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidParameter("no Krylov states".into()))?;
    if dp == 0 {
        let mut state = first.clone();
        let raw_norm = state.norm();
        state.normalize()?;
        return Ok(FilterCertificate {
            coeffs: vec![C64::new(1.0 / raw_norm, 0.0)],
            raw_norm,
            state,
        });
    }
    let am = filter_fourier(a, dp)?;
    let c: Vec<C64> = (0..d)
        .map(|j| {
            let k = j as f64 - dp as f64;
            am[j] * C64::from_polar(1.0, k * e0 * dt)
        })
        .collect();
    let mut amps = vec![C64::new(0.0, 0.0); first.dim()];
    for (cj, s) in c.iter().zip(states) {
        first.check_same_space(s)?;
        crate::linalg::axpy(*cj, s.amplitudes(), &mut amps);
    }
    let raw_norm = crate::linalg::norm(&amps);
    if raw_norm == 0.0 {
        return Err(Error::UndefinedBound("filtered state vanishes".into()));
    }
    let inv = C64::new(1.0 / raw_norm, 0.0);
    amps.iter_mut().for_each(|x| *x *= inv);
    Ok(FilterCertificate {
        coeffs: c.iter().map(|x| x * inv).collect(),
        raw_norm,
        state: first.with_amplitudes(amps)?,
    })
}
