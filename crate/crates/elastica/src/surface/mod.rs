//! The free-boundary hypersurface M.
//!
//! Catalog surfaces (plane, sphere, torus) use closed forms for the unit
//! normal, signed distance, nearest-point projection, and shape operator.
//! Generic level sets F = 0 get the same interface through the expression
//! parser and second-order forward autodiff, with a Newton iteration for the
//! nearest-point projection.

mod expr;
mod jet;

pub use expr::{parse_levelset, ExprAst, Func};
pub use jet::{eval_jet2, eval_value, Jet2};

use crate::solve::solve_dense;
use crate::vecn;
use crate::{exec, Error, Result};

/// Declarative description of the hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceSpec {
    /// Hyperplane through `point` with unit normal `normal`.
    Plane { point: Vec<f64>, normal: Vec<f64> },
    /// Sphere; `orientation` +1 selects the outward normal.
    Sphere {
        center: Vec<f64>,
        radius: f64,
        orientation: f64,
    },
    /// Torus in R³ around `axis`; `orientation` +1 points away from the tube
    /// center circle.
    Torus {
        center: Vec<f64>,
        axis: Vec<f64>,
        major_radius: f64,
        minor_radius: f64,
        orientation: f64,
    },
    /// Level set F(x1..xn) = 0 with normal `orientation * ∇F/|∇F|` and tube
    /// half-width estimate `delta`.
    LevelSet {
        expr: String,
        orientation: f64,
        delta: f64,
    },
}

/// A compiled surface ready for evaluation.
#[derive(Debug, Clone)]
pub struct Surface {
    spec: SurfaceSpec,
    dim: usize,
    ast: Option<ExprAst>,
}

/// Newton parameters for the level-set projection.
const PROJECT_TOL: f64 = 1e-12;
const PROJECT_MAX_ITERS: usize = 50;

impl Surface {
    pub fn new(spec: SurfaceSpec, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        let ast = match &spec {
            SurfaceSpec::Plane { point, normal } => {
                if point.len() != dim || normal.len() != dim {
                    return Err(Error::IncompatibleParams(
                        "plane point/normal dimension mismatch".into(),
                    ));
                }
                if vecn::norm(normal) < 1e-12 {
                    return Err(Error::IncompatibleParams("plane normal is zero".into()));
                }
                None
            }
            SurfaceSpec::Sphere { center, radius, orientation } => {
                if center.len() != dim {
                    return Err(Error::IncompatibleParams("sphere center dimension mismatch".into()));
                }
                if !(*radius > 0.0) {
                    return Err(Error::IncompatibleParams("sphere radius must be positive".into()));
                }
                if orientation.abs() != 1.0 {
                    return Err(Error::IncompatibleParams("orientation must be +1 or -1".into()));
                }
                None
            }
            SurfaceSpec::Torus {
                center,
                axis,
                major_radius,
                minor_radius,
                orientation,
            } => {
                if dim != 3 {
                    return Err(Error::UnsupportedDimension(dim));
                }
                if center.len() != 3 || axis.len() != 3 {
                    return Err(Error::IncompatibleParams("torus center/axis dimension mismatch".into()));
                }
                if vecn::norm(axis) < 1e-12 {
                    return Err(Error::IncompatibleParams("torus axis is zero".into()));
                }
                if !(*major_radius > *minor_radius && *minor_radius > 0.0) {
                    return Err(Error::IncompatibleParams(
                        "torus needs major radius > minor radius > 0".into(),
                    ));
                }
                if orientation.abs() != 1.0 {
                    return Err(Error::IncompatibleParams("orientation must be +1 or -1".into()));
                }
                None
            }
            SurfaceSpec::LevelSet { expr, orientation, delta } => {
                if orientation.abs() != 1.0 {
                    return Err(Error::IncompatibleParams("orientation must be +1 or -1".into()));
                }
                if !(*delta > 0.0) {
                    return Err(Error::IncompatibleParams("tube half-width must be positive".into()));
                }
                Some(parse_levelset(expr, dim)?)
            }
        };
        Ok(Self { spec, dim, ast })
    }

    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether M is a hyperplane.
    pub fn is_flat(&self) -> bool {
        matches!(self.spec, SurfaceSpec::Plane { .. })
    }

    /// True when M is the axis-aligned plane {x2 = 0} in R² (the setting of
    /// the planar classification).
    pub fn is_planar_axis(&self) -> bool {
        match &self.spec {
            SurfaceSpec::Plane { point, normal } if self.dim == 2 => {
                point[1].abs() < 1e-12 && normal[0].abs() < 1e-12
            }
            _ => false,
        }
    }

    /// Characteristic length used to scale tolerances.
    pub fn length_scale(&self) -> f64 {
        match &self.spec {
            SurfaceSpec::Plane { .. } => 1.0,
            SurfaceSpec::Sphere { radius, .. } => *radius,
            SurfaceSpec::Torus { major_radius, minor_radius, .. } => major_radius + minor_radius,
            SurfaceSpec::LevelSet { delta, .. } => delta.max(1.0),
        }
    }

    /// Tube half-width within which off-surface evaluation is trusted.
    pub fn tube_halfwidth(&self) -> f64 {
        match &self.spec {
            SurfaceSpec::Plane { .. } => f64::INFINITY,
            SurfaceSpec::Sphere { radius, .. } => *radius,
            SurfaceSpec::Torus { minor_radius, .. } => *minor_radius,
            SurfaceSpec::LevelSet { delta, .. } => *delta,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::UnsupportedDimension(x.len()));
        }
        Ok(())
    }

    /// Unit normal ξ at a point on M (checked to 1e-6 * scale).
    pub fn normal(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(p)?;
        let d = self.signed_distance(p)?;
        if d.abs() > 1e-6 * self.length_scale() {
            return Err(Error::PointNotOnSurface(d.abs()));
        }
        self.normal_unchecked(p)
    }

    /// Unit normal field extended off M (catalog closed forms; level sets
    /// use σ∇F/|∇F| at the given point).
    pub fn normal_unchecked(&self, p: &[f64]) -> Result<Vec<f64>> {
        match &self.spec {
            SurfaceSpec::Plane { normal, .. } => Ok(vecn::normalized(normal).unwrap()),
            SurfaceSpec::Sphere { center, orientation, .. } => {
                let radial = vecn::sub(p, center);
                let n = vecn::norm(&radial);
                if n < 1e-14 {
                    return Err(Error::DegenerateGradient(n));
                }
                Ok(vecn::scale(&radial, *orientation / n))
            }
            SurfaceSpec::Torus { orientation, .. } => {
                let q = self.torus_ring_point(p)?;
                let off = vecn::sub(p, &q);
                let n = vecn::norm(&off);
                if n < 1e-14 {
                    return Err(Error::DegenerateGradient(n));
                }
                Ok(vecn::scale(&off, *orientation / n))
            }
            SurfaceSpec::LevelSet { orientation, .. } => {
                let jet = eval_jet2(self.ast.as_ref().unwrap(), p)?;
                let g = vecn::norm(&jet.grad);
                if g < 1e-10 {
                    return Err(Error::DegenerateGradient(g));
                }
                Ok(vecn::scale(&jet.grad, *orientation / g))
            }
        }
    }

    /// Signed distance to M; positive on the side ξ points into.
    pub fn signed_distance(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        match &self.spec {
            SurfaceSpec::Plane { point, normal } => {
                let nu = vecn::normalized(normal).unwrap();
                Ok(vecn::dot(&vecn::sub(x, point), &nu))
            }
            SurfaceSpec::Sphere { center, radius, orientation } => {
                Ok(orientation * (vecn::norm(&vecn::sub(x, center)) - radius))
            }
            SurfaceSpec::Torus {
                minor_radius, orientation, ..
            } => {
                let q = self.torus_ring_point(x)?;
                Ok(orientation * (vecn::norm(&vecn::sub(x, &q)) - minor_radius))
            }
            SurfaceSpec::LevelSet { .. } => {
                let p = self.project(x)?;
                let xi = self.normal_unchecked(&p)?;
                Ok(vecn::dot(&vecn::sub(x, &p), &xi))
            }
        }
    }

    /// Nearest-point projection onto M.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        match &self.spec {
            SurfaceSpec::Plane { point, normal } => {
                let nu = vecn::normalized(normal).unwrap();
                let d = vecn::dot(&vecn::sub(x, point), &nu);
                let mut p = x.to_vec();
                vecn::axpy(&mut p, -d, &nu);
                Ok(p)
            }
            SurfaceSpec::Sphere { center, radius, .. } => {
                let radial = vecn::sub(x, center);
                let n = vecn::norm(&radial);
                if n < 1e-14 {
                    return Err(Error::ProjectionDiverged { residual: n, iters: 0 });
                }
                let mut p = center.clone();
                vecn::axpy(&mut p, radius / n, &radial);
                Ok(p)
            }
            SurfaceSpec::Torus { minor_radius, .. } => {
                let q = self.torus_ring_point(x)?;
                let off = vecn::sub(x, &q);
                let n = vecn::norm(&off);
                if n < 1e-14 {
                    return Err(Error::ProjectionDiverged { residual: n, iters: 0 });
                }
                let mut p = q;
                vecn::axpy(&mut p, minor_radius / n, &off);
                Ok(p)
            }
            SurfaceSpec::LevelSet { .. } => self.project_levelset(x),
        }
    }

    /// Shape operator S_p applied to a tangent vector X: S_p X = -D_X ξ(p).
    pub fn shape_operator(&self, p: &[f64], x_tan: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(p)?;
        self.check_dim(x_tan)?;
        let d = self.signed_distance(p)?;
        if d.abs() > 1e-6 * self.length_scale() {
            return Err(Error::PointNotOnSurface(d.abs()));
        }
        let xi = self.normal_unchecked(p)?;
        let normal_part = vecn::dot(x_tan, &xi).abs();
        let scale = vecn::norm(x_tan).max(1e-300);
        if normal_part > 1e-8 * scale.max(1.0) {
            return Err(Error::NotTangent(normal_part));
        }
        let x_tan = vecn::reject_unit(x_tan, &xi);
        match &self.spec {
            SurfaceSpec::Plane { .. } => Ok(vec![0.0; self.dim]),
            SurfaceSpec::Sphere { radius, orientation, .. } => {
                Ok(vecn::scale(&x_tan, -orientation / radius))
            }
            SurfaceSpec::Torus {
                center,
                axis,
                major_radius,
                minor_radius,
                orientation,
            } => {
                let a = vecn::normalized(axis).unwrap();
                let w = vecn::sub(p, center);
                let z = vecn::dot(&w, &a);
                let mut rho_vec = w.clone();
                vecn::axpy(&mut rho_vec, -z, &a);
                let rho = vecn::norm(&rho_vec);
                let u = vecn::scale(&rho_vec, 1.0 / rho);
                // Tube angle: cosθ = (ρ - R)/r, sinθ = z/r.
                let cos_t = (rho - major_radius) / minor_radius;
                let sin_t = z / minor_radius;
                // Principal directions: tube direction and ring direction.
                let mut tube = vecn::scale(&u, -sin_t);
                vecn::axpy(&mut tube, cos_t, &a);
                let ring = vecn::cross3(&a, &u);
                let ct = vecn::dot(&x_tan, &tube);
                let cr = vecn::dot(&x_tan, &ring);
                let k_tube = -orientation / minor_radius;
                let k_ring = -orientation * cos_t / (major_radius + minor_radius * cos_t);
                let mut out = vecn::scale(&tube, k_tube * ct);
                vecn::axpy(&mut out, k_ring * cr, &ring);
                Ok(out)
            }
            SurfaceSpec::LevelSet { orientation, .. } => {
                let jet = eval_jet2(self.ast.as_ref().unwrap(), p)?;
                let g = vecn::norm(&jet.grad);
                if g < 1e-10 {
                    return Err(Error::DegenerateGradient(g));
                }
                let nu = vecn::scale(&jet.grad, 1.0 / g);
                let n = self.dim;
                let mut hx = vec![0.0; n];
                for i in 0..n {
                    for j in 0..n {
                        hx[i] += jet.hess[i * n + j] * x_tan[j];
                    }
                }
                let tang = vecn::reject_unit(&hx, &nu);
                Ok(vecn::scale(&tang, -orientation / g))
            }
        }
    }

    /// Orthonormal basis of the tangent space at p.
    pub fn tangent_basis(&self, p: &[f64]) -> Result<Vec<Vec<f64>>> {
        let xi = self.normal_unchecked(p)?;
        Ok(vecn::orthonormal_complement(&xi))
    }

    /// Foot point on the torus center circle.
    fn torus_ring_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        let SurfaceSpec::Torus { center, axis, major_radius, .. } = &self.spec else {
            unreachable!()
        };
        let a = vecn::normalized(axis).unwrap();
        let w = vecn::sub(x, center);
        let z = vecn::dot(&w, &a);
        let mut rho_vec = w.clone();
        vecn::axpy(&mut rho_vec, -z, &a);
        let rho = vecn::norm(&rho_vec);
        if rho < 1e-14 {
            return Err(Error::ProjectionDiverged { residual: rho, iters: 0 });
        }
        let mut q = center.clone();
        vecn::axpy(&mut q, major_radius / rho, &rho_vec);
        Ok(q)
    }

    /// Newton iteration on {F(p) = 0, x - p parallel to ∇F(p)} seeded by one
    /// first-order step.
    fn project_levelset(&self, x: &[f64]) -> Result<Vec<f64>> {
        let ast = self.ast.as_ref().unwrap();
        let n = self.dim;
        let scale = 1.0 + vecn::norm(x);
        let jet0 = eval_jet2(ast, x)?;
        let g0 = vecn::dot(&jet0.grad, &jet0.grad);
        if g0.sqrt() < 1e-10 {
            return Err(Error::DegenerateGradient(g0.sqrt()));
        }
        let mut mu = jet0.value / g0;
        let mut p = x.to_vec();
        vecn::axpy(&mut p, -mu, &jet0.grad);
        let mut residual = f64::INFINITY;
        for iter in 0..PROJECT_MAX_ITERS {
            let jet = eval_jet2(ast, &p)?;
            let gnorm = vecn::norm(&jet.grad);
            if gnorm < 1e-10 {
                return Err(Error::DegenerateGradient(gnorm));
            }
            // G = [p - x + mu ∇F(p); F(p)]
            let mut g_vec = vecn::sub(&p, x);
            vecn::axpy(&mut g_vec, mu, &jet.grad);
            residual = (vecn::dot(&g_vec, &g_vec) + jet.value * jet.value).sqrt();
            if residual < PROJECT_TOL * scale {
                return Ok(p);
            }
            // J = [[I + mu HessF, ∇F], [∇F^T, 0]]
            let mut jac = vec![vec![0.0; n + 1]; n + 1];
            for i in 0..n {
                for j in 0..n {
                    jac[i][j] = mu * jet.hess[i * n + j] + if i == j { 1.0 } else { 0.0 };
                }
                jac[i][n] = jet.grad[i];
                jac[n][i] = jet.grad[i];
            }
            let mut rhs = vec![0.0; n + 1];
            for i in 0..n {
                rhs[i] = -g_vec[i];
            }
            rhs[n] = -jet.value;
            let step = solve_dense(jac, rhs).map_err(|_| Error::ProjectionDiverged {
                residual,
                iters: iter,
            })?;
            for i in 0..n {
                p[i] += step[i];
            }
            mu += step[n];
        }
        Err(Error::ProjectionDiverged {
            residual,
            iters: PROJECT_MAX_ITERS,
        })
    }

    /// Project many points (fans out over the rayon pool when enabled).
    pub fn project_batch(&self, points: &[Vec<f64>]) -> Vec<Result<Vec<f64>>> {
        exec::map(points.len(), |i| self.project(&points[i]))
    }

    /// Tubular-neighborhood sanity check at an on-surface point: walking
    /// r along ξ and projecting back must return to p, and the signed
    /// distance out there must be r.
    pub fn tubular_consistency(&self, p: &[f64], r: f64, tol: f64) -> Result<()> {
        let xi = self.normal(p)?;
        let mut q = p.to_vec();
        vecn::axpy(&mut q, r, &xi);
        let back = self.project(&q)?;
        let drift = vecn::norm(&vecn::sub(&back, p));
        if drift > tol {
            return Err(Error::ProjectionDiverged { residual: drift, iters: 0 });
        }
        let d = self.signed_distance(&q)?;
        if (d - r).abs() > tol {
            return Err(Error::ProjectionDiverged {
                residual: (d - r).abs(),
                iters: 0,
            });
        }
        Ok(())
    }
}
