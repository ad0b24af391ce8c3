//! Series solution for scattering of a plane wave by a perfectly conducting
//! sphere. Implemented independently of the boundary-element pipeline and
//! used as its physics oracle: bistatic RCS curves and the induced surface
//! current.
//!
//! Conventions match the rest of the crate: time factor e^{-iωt}, radiating
//! fields carry e^{+ikr}, incident field E = p e^{ik d·x} with unit
//! amplitude and unit impedance.

use crate::bem::WaveContext;
use crate::geom::{vec3, Vec3};
use crate::C64;

/// Riccati-Bessel functions ψ_n(x) = x j_n(x) and χ_n(x) = -x y_n(x) with
/// derivatives, n = 0..=n_max. ψ is generated by downward recurrence
/// (normalized against ψ_0), χ upward; both are stable in those directions.
fn riccati(x: f64, n_max: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let start = n_max + 16 + (x as usize);
    let mut j = vec![0.0f64; start + 2];
    j[start + 1] = 0.0;
    j[start] = 1e-280;
    for n in (1..=start).rev() {
        j[n - 1] = (2.0 * n as f64 + 1.0) / x * j[n] - j[n + 1];
    }
    let scale = (x.sin() / x) / j[0];
    let mut psi = vec![0.0; n_max + 1];
    for n in 0..=n_max {
        psi[n] = x * j[n] * scale;
    }

    // χ_n = -x y_n: χ₀ = cos x, χ₁ = cos x / x + sin x
    let mut chi = vec![0.0; n_max + 1];
    chi[0] = x.cos();
    if n_max >= 1 {
        chi[1] = x.cos() / x + x.sin();
        for n in 1..n_max {
            chi[n + 1] = (2.0 * n as f64 + 1.0) / x * chi[n] - chi[n - 1];
        }
    }

    // z_n' = z_{n-1} - (n/x) z_n holds for every Riccati-Bessel solution
    let mut dpsi = vec![0.0; n_max + 1];
    let mut dchi = vec![0.0; n_max + 1];
    dpsi[0] = x.cos();
    dchi[0] = -x.sin();
    for n in 1..=n_max {
        dpsi[n] = psi[n - 1] - n as f64 / x * psi[n];
        dchi[n] = chi[n - 1] - n as f64 / x * chi[n];
    }
    (psi, dpsi, chi, dchi)
}

/// Conducting-sphere coefficients a_n = ψ_n'/ξ_n', b_n = ψ_n/ξ_n with
/// ξ_n = ψ_n - iχ_n, for n = 1..=n_max.
pub fn pec_coefficients(size_parameter: f64, n_max: usize) -> (Vec<C64>, Vec<C64>) {
    let (psi, dpsi, chi, dchi) = riccati(size_parameter, n_max);
    let mut a = Vec::with_capacity(n_max);
    let mut b = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let xi = C64::new(psi[n], -chi[n]);
        let dxi = C64::new(dpsi[n], -dchi[n]);
        a.push(C64::new(dpsi[n], 0.0) / dxi);
        b.push(C64::new(psi[n], 0.0) / xi);
    }
    (a, b)
}

/// Series length: at least ⌈x⌉ + 10 terms, extended until the coefficient
/// magnitude falls below 1e-12.
pub fn term_count(size_parameter: f64) -> usize {
    let floor = size_parameter.ceil() as usize + 10;
    let probe = floor + 40;
    let (a, b) = pec_coefficients(size_parameter, probe);
    for n in floor..probe {
        if a[n - 1].norm() + b[n - 1].norm() < 1e-12 {
            return n;
        }
    }
    probe
}

/// Angular functions π_n = P_n¹/sinθ and τ_n = dP_n¹/dθ, n = 1..=n_max.
fn angular_functions(cos_theta: f64, n_max: usize) -> (Vec<f64>, Vec<f64>) {
    let mut pi = vec![0.0f64; n_max + 1];
    let mut tau = vec![0.0f64; n_max + 1];
    if n_max >= 1 {
        pi[1] = 1.0;
        tau[1] = cos_theta;
    }
    for n in 2..=n_max {
        let nf = n as f64;
        pi[n] = ((2.0 * nf - 1.0) * cos_theta * pi[n - 1] - nf * pi[n - 2]) / (nf - 1.0);
        tau[n] = nf * cos_theta * pi[n] - (nf + 1.0) * pi[n - 1];
    }
    (pi, tau)
}

/// Amplitude functions S₁ (perpendicular) and S₂ (parallel) at scattering
/// angle θ.
pub fn amplitude_functions(size_parameter: f64, cos_theta: f64) -> (C64, C64) {
    let n_max = term_count(size_parameter);
    let (a, b) = pec_coefficients(size_parameter, n_max);
    let (pi, tau) = angular_functions(cos_theta, n_max);
    let mut s1 = C64::new(0.0, 0.0);
    let mut s2 = C64::new(0.0, 0.0);
    for n in 1..=n_max {
        let nf = n as f64;
        let w = (2.0 * nf + 1.0) / (nf * (nf + 1.0));
        s1 += (a[n - 1] * pi[n] + b[n - 1] * tau[n]) * w;
        s2 += (a[n - 1] * tau[n] + b[n - 1] * pi[n]) * w;
    }
    (s1, s2)
}

/// Bistatic radar cross section (m²) of a conducting sphere for incidence
/// direction `d`, polarization `p` and scattering direction `r̂`:
/// the incident polarization is split across the scattering plane,
/// σ = (4π/k²) (|S₂|² |p·ê∥|² + |S₁|² |p·ê⊥|²).
pub fn bistatic_rcs(radius: f64, ctx: &WaveContext, d: Vec3, p: Vec3, r_hat: Vec3) -> f64 {
    let k = ctx.wavenumber;
    let x = k * radius;
    let cos_theta = d.dot(r_hat).clamp(-1.0, 1.0);
    let (s1, s2) = amplitude_functions(x, cos_theta);
    let cross = d.cross(r_hat);
    let (p_par, p_perp) = if cross.norm() < 1e-12 {
        // forward/backward degeneracy: |S1| = |S2| there, split arbitrary
        (1.0, 0.0)
    } else {
        let e_perp = cross.normalized();
        let e_par = e_perp.cross(d);
        (p.dot(e_par), p.dot(e_perp))
    };
    4.0 * std::f64::consts::PI / (k * k)
        * (s2.norm_sqr() * p_par * p_par + s1.norm_sqr() * p_perp * p_perp)
}

/// RCS curve over a direction list, in dB relative to 1 m².
pub fn mie_reference(
    radius: f64,
    ctx: &WaveContext,
    d: Vec3,
    p: Vec3,
    directions: &[Vec3],
) -> Vec<f64> {
    directions
        .iter()
        .map(|&r| 10.0 * bistatic_rcs(radius, ctx, d, p, r).log10())
        .collect()
}

/// Total scattering cross section from the series, σ = (2π/k²) Σ (2n+1)
/// (|a_n|² + |b_n|²).
pub fn scattering_cross_section(radius: f64, ctx: &WaveContext) -> f64 {
    let x = ctx.wavenumber * radius;
    let n_max = term_count(x);
    let (a, b) = pec_coefficients(x, n_max);
    let mut acc = 0.0;
    for n in 1..=n_max {
        acc += (2.0 * n as f64 + 1.0) * (a[n - 1].norm_sqr() + b[n - 1].norm_sqr());
    }
    2.0 * std::f64::consts::PI / (ctx.wavenumber * ctx.wavenumber) * acc
}

/// Extinction cross section by the forward-scattering identity,
/// σ_ext = (4π/k²) Re S(0).
pub fn extinction_cross_section(radius: f64, ctx: &WaveContext) -> f64 {
    let x = ctx.wavenumber * radius;
    let (s1, _) = amplitude_functions(x, 1.0);
    4.0 * std::f64::consts::PI / (ctx.wavenumber * ctx.wavenumber) * s1.re
}

/// Induced surface current J = n×H_total at a point of the sphere surface,
/// for incidence `d` with polarization `p` (sphere centered at the origin).
///
/// In the wave frame (ẑ = d, x̂ = p), with x = ka and c_n = iⁿ(2n+1)/(n(n+1)):
///
/// ```text
///     J_θ = (cosφ/x) Σ c_n [ π_n/ξ_n - i τ_n/ξ_n' ]
///     J_φ = (sinφ/x) Σ c_n [ i π_n/ξ_n' - τ_n/ξ_n ]
/// ```
///
/// which follows from the total tangential magnetic field after the
/// Wronskian ψ_n ξ_n' - ψ_n' ξ_n = i collapses the incident+scattered sums.
pub fn surface_current(radius: f64, ctx: &WaveContext, d: Vec3, p: Vec3, point: Vec3) -> [C64; 3] {
    let x = ctx.wavenumber * radius;
    let n_max = term_count(x);
    let (psi, dpsi, chi, dchi) = riccati(x, n_max);

    // wave frame
    let ex = p;
    let ez = d;
    let ey = ez.cross(ex);
    let q = vec3(point.dot(ex), point.dot(ey), point.dot(ez)) * (1.0 / point.norm());
    let cos_theta = q.z.clamp(-1.0, 1.0);
    let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
    let (cos_phi, sin_phi) = if sin_theta < 1e-14 {
        (1.0, 0.0)
    } else {
        (q.x / sin_theta, q.y / sin_theta)
    };

    let (pi, tau) = angular_functions(cos_theta, n_max);
    let mut sum_theta = C64::new(0.0, 0.0);
    let mut sum_phi = C64::new(0.0, 0.0);
    let mut i_pow = C64::new(0.0, 1.0); // i^1
    for n in 1..=n_max {
        let nf = n as f64;
        let cn = i_pow * ((2.0 * nf + 1.0) / (nf * (nf + 1.0)));
        let xi = C64::new(psi[n], -chi[n]);
        let dxi = C64::new(dpsi[n], -dchi[n]);
        sum_theta += cn * (pi[n] / xi - C64::new(0.0, 1.0) * tau[n] / dxi);
        sum_phi += cn * (C64::new(0.0, 1.0) * pi[n] / dxi - tau[n] / xi);
        i_pow *= C64::new(0.0, 1.0);
    }
    let j_theta = sum_theta * (cos_phi / x);
    let j_phi = sum_phi * (sin_phi / x);

    // spherical unit vectors in the wave frame, then back to lab frame
    let theta_hat = vec3(
        cos_theta * cos_phi,
        cos_theta * sin_phi,
        -sin_theta,
    );
    let phi_hat = vec3(-sin_phi, cos_phi, 0.0);
    let to_lab = |v: Vec3| ex * v.x + ey * v.y + ez * v.z;
    let th = to_lab(theta_hat);
    let ph = to_lab(phi_hat);
    [
        j_theta * th.x + j_phi * ph.x,
        j_theta * th.y + j_phi * ph.y,
        j_theta * th.z + j_phi * ph.z,
    ]
}
