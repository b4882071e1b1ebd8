//! Elastic energy, its L²(ds) gradient, the quasilinear operator realizing
//! it in a fixed parametrization, and the length-preserving Lagrange
//! multiplier via two independent formulas.

use crate::curve::{
    self, curvature, derivative, ds_perp, endpoint_derivatives, integrate_ds, normal_projection,
    DiscreteCurve, NodeField,
};
use crate::vecn;
use crate::{Error, Result};

/// Default energy floor, relative to the flat-case minimum π²/L.
pub const ENERGY_FLOOR_REL: f64 = 1e-8;

/// Energy floor for a curve of length `len`.
pub fn energy_floor(len: f64) -> f64 {
    ENERGY_FLOOR_REL * std::f64::consts::PI.powi(2) / len
}

/// Elastic energy ∫ |κ|² ds.
pub fn energy(c: &DiscreteCurve) -> Result<f64> {
    let k = curvature(c)?;
    let k2: Vec<f64> = (0..c.n_nodes()).map(|i| vecn::dot(k.at(i), k.at(i))).collect();
    integrate_ds(&k2, c)
}

/// L²(ds) gradient of the elastic energy: 2 (∂ₛ⊥)²κ + |κ|²κ.
pub fn gradient_e(c: &DiscreteCurve) -> Result<NodeField> {
    let k = curvature(c)?;
    let dsk = ds_perp(&k, c)?;
    let ds2k = ds_perp(&dsk, c)?;
    let k2 = k.dots(&k);
    Ok(ds2k.scaled(2.0).axpy(1.0, &k.scaled_per_node(&k2)))
}

/// The fourth-order quasilinear operator whose normal projection is the
/// energy gradient:
///
/// 2 γ⁗/v⁴ − 12 ⟨γ″,γ′⟩γ‴/v⁶ − 8 ⟨γ‴,γ′⟩γ″/v⁶ − 5 |γ″|²γ″/v⁶
///   + 35 ⟨γ″,γ′⟩²γ″/v⁸        with v = |γ′|.
pub fn operator_a(c: &DiscreteCurve) -> Result<NodeField> {
    c.check_immersion(None)?;
    let d1 = derivative(c, 1)?;
    let d2 = derivative(c, 2)?;
    let d3 = derivative(c, 3)?;
    let d4 = derivative(c, 4)?;
    let n = c.n_nodes();
    let dim = c.dim();
    let mut values = vec![0.0; n * dim];
    for i in 0..n {
        let g1 = d1.at(i);
        let g2 = d2.at(i);
        let g3 = d3.at(i);
        let g4 = d4.at(i);
        let v2 = vecn::dot(g1, g1);
        let v4 = v2 * v2;
        let v6 = v4 * v2;
        let v8 = v4 * v4;
        let p21 = vecn::dot(g2, g1);
        let p31 = vecn::dot(g3, g1);
        let q22 = vecn::dot(g2, g2);
        let out = &mut values[i * dim..(i + 1) * dim];
        for c2 in 0..dim {
            out[c2] = 2.0 * g4[c2] / v4 - 12.0 * p21 * g3[c2] / v6 - 8.0 * p31 * g2[c2] / v6
                - 5.0 * q22 * g2[c2] / v6
                + 35.0 * p21 * p21 * g2[c2] / v8;
        }
    }
    Ok(NodeField::new(dim, values))
}

/// The Lagrange multiplier from its defining formula
/// λ = ∫⟨∇E, κ⟩ ds / ∫|κ|² ds.
pub fn lambda_integral(c: &DiscreteCurve) -> Result<f64> {
    let e = energy(c)?;
    if e < energy_floor(c.length()) {
        return Err(Error::EnergyTooSmall(e));
    }
    let grad = gradient_e(c)?;
    let k = curvature(c)?;
    let integrand = grad.dots(&k);
    Ok(integrate_ds(&integrand, c)? / e)
}

/// The Lagrange multiplier after integration by parts:
/// λ = E⁻¹ ( ∫ (−2|∂ₛ⊥κ|² + |κ|⁴) ds + 2[⟨∂ₛ⊥κ, κ⟩]₋₁¹ ),
/// with the boundary values of ∂ₛ⊥κ evaluated from the one-sided
/// third-derivative expression.
pub fn lambda_ibp(c: &DiscreteCurve) -> Result<f64> {
    let e = energy(c)?;
    if e < energy_floor(c.length()) {
        return Err(Error::EnergyTooSmall(e));
    }
    let k = curvature(c)?;
    let dsk = ds_perp(&k, c)?;
    let n = c.n_nodes();
    let integrand: Vec<f64> = (0..n)
        .map(|i| {
            let k2 = vecn::dot(k.at(i), k.at(i));
            -2.0 * vecn::dot(dsk.at(i), dsk.at(i)) + k2 * k2
        })
        .collect();
    let bulk = integrate_ds(&integrand, c)?;
    let (minus, plus) = endpoint_derivatives(c);
    let bdry = vecn::dot(&plus.ds_perp_kappa(), &plus.kappa())
        - vecn::dot(&minus.ds_perp_kappa(), &minus.kappa());
    Ok((bulk + 2.0 * bdry) / e)
}

/// Velocity of the flow at a curve.
#[derive(Debug, Clone)]
pub struct Velocity {
    /// Full velocity of the fixed-parametrization evolution, −(𝒜 − λκ).
    pub analytic: NodeField,
    /// Purely normal velocity −(∇E − λκ).
    pub normal: NodeField,
    pub lambda: f64,
}

/// Flow velocity with λ from the defining integral formula.
pub fn velocity(c: &DiscreteCurve) -> Result<Velocity> {
    let lambda = lambda_integral(c)?;
    let k = curvature(c)?;
    let a = operator_a(c)?;
    let grad = gradient_e(c)?;
    let analytic = a.axpy(-lambda, &k).scaled(-1.0);
    let normal = grad.axpy(-lambda, &k).scaled(-1.0);
    Ok(Velocity {
        analytic,
        normal,
        lambda,
    })
}

/// Summary of the energetic state of a curve.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub energy: f64,
    pub length: f64,
    pub lambda_integral: f64,
    pub lambda_ibp: f64,
    /// ‖∇E − λκ‖ in L²(ds) with λ from the integral formula.
    pub grad_norm: f64,
}

pub fn energy_report(c: &DiscreteCurve) -> Result<EnergyReport> {
    let e = energy(c)?;
    let len = c.length();
    if e < energy_floor(len) {
        return Err(Error::EnergyTooSmall(e));
    }
    let li = lambda_integral(c)?;
    let lb = lambda_ibp(c)?;
    let grad = gradient_e(c)?;
    let k = curvature(c)?;
    let residual = grad.axpy(-li, &k);
    let grad_norm = curve::l2_ds_norm(&residual, c)?;
    Ok(EnergyReport {
        energy: e,
        length: len,
        lambda_integral: li,
        lambda_ibp: lb,
        grad_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::length;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn sampled(dim: usize, n: usize, f: impl Fn(f64) -> Vec<f64>) -> DiscreteCurve {
        let mut nodes = Vec::with_capacity(n * dim);
        for i in 0..n {
            let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            nodes.extend(f(x));
        }
        DiscreteCurve::new(dim, nodes).unwrap()
    }

    fn half_circle(n: usize, r: f64) -> DiscreteCurve {
        sampled(2, n, |x| {
            let th = PI * (1.0 - x) / 2.0;
            vec![r * th.cos(), r * th.sin()]
        })
    }

    fn segment(n: usize) -> DiscreteCurve {
        sampled(2, n, |x| vec![x, 0.0])
    }

    #[test]
    fn energy_of_segment_is_zero() {
        assert!(energy(&segment(51)).unwrap().abs() < 1e-10);
    }

    #[test]
    fn energy_of_half_circle_is_pi_squared_over_length() {
        // Flat-case minimum: E = π²/L₀ for the half circle of length L₀.
        let c = half_circle(201, 1.0);
        let l0 = length(&c);
        assert_relative_eq!(energy(&c).unwrap(), PI * PI / l0, max_relative = 1e-4);
    }

    #[test]
    fn energy_of_full_circle_trace() {
        let r = 0.8;
        let c = sampled(2, 201, |x| {
            let th = PI * x;
            vec![r * th.cos(), r * th.sin()]
        });
        assert_relative_eq!(energy(&c).unwrap(), 2.0 * PI / r, max_relative = 1e-4);
    }

    #[test]
    fn gradient_on_circle_is_curvature_over_r_squared() {
        // ∂ₛ⊥κ = 0 on circles, so ∇E = |κ|²κ = κ/r².
        let r = 1.3;
        let c = half_circle(201, r);
        let g = gradient_e(&c).unwrap();
        let k = curvature(&c).unwrap();
        for i in 0..c.n_nodes() {
            let expect = vecn::scale(k.at(i), 1.0 / (r * r));
            let err = vecn::norm(&vecn::sub(g.at(i), &expect));
            assert!(err < 2e-2 / r.powi(3), "node {i}: {err}");
        }
        assert!(gradient_e(&segment(51)).unwrap().max_norm() < 1e-9);
    }

    #[test]
    fn gradient_directional_derivative_check() {
        // Central difference of the discrete energy against ∫⟨∇E, δ⟩ ds for
        // interior-supported normal perturbations.
        let n = 201;
        let c = half_circle(n, 1.0);
        let grad = gradient_e(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let eps = 1e-6;
        for trial in 0..5 {
            let a1: f64 = rng.gen_range(-1.0..1.0);
            let a2: f64 = rng.gen_range(-1.0..1.0);
            let raw: Vec<f64> = (0..n)
                .flat_map(|i| {
                    let x = c.param(i);
                    let bump = (1.0 - x * x).powi(4) * (a1 + a2 * (2.0 * x).sin());
                    vec![bump * x.cos(), bump * (1.0 + x).cos()]
                })
                .collect();
            let delta = normal_projection(&NodeField::new(2, raw), &c).unwrap();
            let ep = energy(&c.translated_by(&delta, eps).unwrap()).unwrap();
            let em = energy(&c.translated_by(&delta, -eps).unwrap()).unwrap();
            let fd = (ep - em) / (2.0 * eps);
            let pairing = integrate_ds(&grad.dots(&delta), &c).unwrap();
            assert_relative_eq!(fd, pairing, max_relative = 1e-5, epsilon = 1e-9);
            let _ = trial;
        }
    }

    #[test]
    fn operator_a_projects_to_gradient_in_interior() {
        // ∇E = (𝒜)⊥ holds at interior nodes at second order.
        let worst_interior = |n: usize| {
            let c = sampled(2, n, |x| vec![x, 0.25 * (2.0 * x).sin() + 0.1 * x * x]);
            let a = operator_a(&c).unwrap();
            let ap = normal_projection(&a, &c).unwrap();
            let g = gradient_e(&c).unwrap();
            let lo = 6;
            let hi = n - 6;
            (lo..hi)
                .map(|i| vecn::norm(&vecn::sub(ap.at(i), g.at(i))))
                .fold(0.0, f64::max)
        };
        let e1 = worst_interior(101);
        let e2 = worst_interior(201);
        assert!(e2 < 1e-2, "absolute: {e2}");
        let ratio = e1 / e2;
        assert!((2.5..6.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn operator_a_vanishes_on_segment() {
        assert!(operator_a(&segment(51)).unwrap().max_norm() < 1e-9);
    }

    #[test]
    fn operator_a_on_circle_matches_lambda_kappa() {
        // Constant-speed circle: 𝒜 = κ/r² exactly in the continuum.
        let r = 1.0;
        let c = half_circle(201, r);
        let a = operator_a(&c).unwrap();
        let k = curvature(&c).unwrap();
        for i in 0..c.n_nodes() {
            let expect = vecn::scale(k.at(i), 1.0 / (r * r));
            assert!(vecn::norm(&vecn::sub(a.at(i), &expect)) < 2e-2);
        }
    }

    #[test]
    fn lambda_integral_on_circles() {
        for &r in &[0.8, 1.0, 2.0] {
            let c = half_circle(201, r);
            assert_relative_eq!(
                lambda_integral(&c).unwrap(),
                1.0 / (r * r),
                max_relative = 2e-3
            );
        }
    }

    #[test]
    fn lambda_rejects_segment() {
        assert!(matches!(
            lambda_integral(&segment(51)),
            Err(Error::EnergyTooSmall(_))
        ));
        assert!(matches!(lambda_ibp(&segment(51)), Err(Error::EnergyTooSmall(_))));
    }

    #[test]
    fn lambda_ibp_on_circle() {
        let c = half_circle(201, 1.0);
        assert_relative_eq!(lambda_ibp(&c).unwrap(), 1.0, max_relative = 2e-3);
    }

    #[test]
    fn lambda_formulas_converge_together() {
        // The central consistency check: the two λ routes agree at O(h²).
        let gap = |n: usize| {
            let c = half_circle(n, 1.0);
            (lambda_integral(&c).unwrap() - lambda_ibp(&c).unwrap()).abs()
        };
        let g1 = gap(101);
        let g2 = gap(201);
        let ratio = g1 / g2;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio} ({g1:e} vs {g2:e})");
    }

    #[test]
    fn velocity_balances_length_derivative() {
        // ∫⟨∇E − λκ, κ⟩ ds = 0 by the definition of λ.
        let c = sampled(2, 201, |x| {
            let th = PI * (1.0 - x) / 2.0;
            vec![th.cos() + 0.05 * (2.0 * PI * x).sin(), th.sin()]
        });
        let v = velocity(&c).unwrap();
        let k = curvature(&c).unwrap();
        let pairing = integrate_ds(&v.normal.dots(&k), &c).unwrap();
        let e = energy(&c).unwrap();
        assert!(pairing.abs() <= 1e-10 * e, "{pairing:e} vs energy {e:e}");
    }

    #[test]
    fn stationary_half_circle_has_small_velocity() {
        // Circle arcs are critical points; the discrete velocity is pure
        // truncation error and shrinks at second order.
        let vmax = |n: usize| velocity(&half_circle(n, 1.0)).unwrap().analytic.max_norm();
        let v1 = vmax(101);
        let v2 = vmax(201);
        assert!(v2 < 2e-2, "velocity {v2}");
        assert!(v1 / v2 > 2.5, "ratio {}", v1 / v2);
    }

    #[test]
    fn energy_report_is_coherent() {
        let c = half_circle(201, 1.0);
        let r = energy_report(&c).unwrap();
        assert!(r.energy > 0.0 && r.length > 0.0);
        assert_relative_eq!(r.lambda_integral, r.lambda_ibp, max_relative = 1e-2);
        assert!(r.grad_norm < 5e-3);
    }
}
