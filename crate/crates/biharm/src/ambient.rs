//! Coordinate models of the ambient space `(N^{m+1}, h)`.
//!
//! Space forms of any curvature sign share one conformal chart,
//! `h_{αβ}(y) = δ_{αβ} / (1 + (C/4)|y|²)²`, so the sphere chart omits a
//! neighbourhood of the antipode and the hyperbolic chart stays inside the
//! ball `1 + (C/4)|y|² > ε`. Products of equal-dimension round spheres give a
//! non-space-form Einstein ambient. Arbitrary metrics can be plugged in as
//! jet-evaluable closures.
//!
//! Curvature conventions, fixed once and used everywhere:
//!
//! ```text
//! R(Z, W)Y        = ∇_Z ∇_W Y − ∇_W ∇_Z Y − ∇_{[Z,W]} Y
//! R(X, Y, Z, W)   = ⟨R(Z, W)Y, X⟩
//! Ric(X, Y)       = Σ_i R(X, e_i, Y, e_i)
//! ```
//!
//! With these, the unit sphere has `Ric = m·h` (positive) and a space form
//! of curvature `C` satisfies `R(X,Y,Z,W) = C(h(X,Z)h(Y,W) − h(X,W)h(Y,Z))`.

use crate::jets::{Jet, JetError};
use crate::linalg::{jet_mat_inverse, JetMatrix, LinalgError};
use crate::tensors::{Tensor3, Tensor4};
use nalgebra::{DMatrix, SymmetricEigen};
use std::sync::Arc;
use thiserror::Error;

/// Margin for the hyperbolic boundary guard `1 + (C/4)|y|² > ε`.
pub const EPS_DOM: f64 = 1e-3;
/// Sampling radius bound for the sphere chart (keeps clear of the antipode).
pub const R_MAX: f64 = 10.0;
/// Metric condition number beyond which the chart is declared degenerate.
pub const COND_MAX: f64 = 1e8;

#[derive(Debug, Error)]
pub enum AmbientError {
    #[error("ambient dimension must be at least 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("product of spheres is Einstein only for equal factor dimensions, got {0} and {1}")]
    UnequalFactors(usize, usize),
    #[error("factor spheres must have dimension at least 2, got {0}")]
    FactorTooSmall(usize),
    #[error("sphere radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("point is outside the chart domain")]
    OutsideDomain,
    #[error("metric is singular or ill-conditioned at the point (cond {cond:.3e})")]
    SingularMetric { cond: f64 },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// What is known a priori about the ambient curvature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AmbientKind {
    /// Constant sectional curvature `C`; Einstein with `Ric = mC·h`.
    SpaceForm { curvature: f64 },
    /// `Ric = λ·h` for a constant `λ`.
    Einstein { lambda: f64 },
    /// No structural assumption.
    Generic,
}

impl AmbientKind {
    /// Einstein constant `λ` with `Ric = λ·h`, when one is declared.
    /// For a space form in dimension `n`, `λ = (n−1)C`.
    pub fn einstein_constant(&self, dim: usize) -> Option<f64> {
        match *self {
            AmbientKind::SpaceForm { curvature } => Some((dim as f64 - 1.0) * curvature),
            AmbientKind::Einstein { lambda } => Some(lambda),
            AmbientKind::Generic => None,
        }
    }
}

type MetricFn = dyn Fn(&[Jet]) -> Vec<Vec<Jet>> + Send + Sync;
type GuardFn = dyn Fn(&[f64]) -> bool + Send + Sync;

enum MetricModel {
    /// `δ/(1 + (C/4)|y|²)²`
    Conformal { curvature: f64 },
    /// Block-diagonal product of two equal conformal sphere factors.
    ProductSphere { half_dim: usize, radius: f64 },
    Custom {
        metric: Arc<MetricFn>,
        guard: Option<Arc<GuardFn>>,
    },
}

/// A coordinate model of the ambient manifold: dimension, jet-evaluable
/// metric, chart-domain guard, and declared curvature kind.
pub struct AmbientChart {
    dim: usize,
    kind: AmbientKind,
    model: MetricModel,
}

impl AmbientChart {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> AmbientKind {
        self.kind
    }

    /// Conformal model of the space form of sectional curvature `c`.
    pub fn space_form(c: f64, n: usize) -> Result<AmbientChart, AmbientError> {
        if n < 3 {
            return Err(AmbientError::DimensionTooSmall(n));
        }
        Ok(AmbientChart {
            dim: n,
            kind: AmbientKind::SpaceForm { curvature: c },
            model: MetricModel::Conformal { curvature: c },
        })
    }

    /// Flat Euclidean chart (space form with `C = 0`).
    pub fn euclidean(n: usize) -> Result<AmbientChart, AmbientError> {
        AmbientChart::space_form(0.0, n)
    }

    /// `S^p(r) × S^q(r)` as a block-diagonal conformal chart. Requires
    /// `p == q ≥ 2` so that the product is Einstein, with `λ = (p−1)/r²`.
    pub fn product_spheres(p: usize, q: usize, r: f64) -> Result<AmbientChart, AmbientError> {
        if p != q {
            return Err(AmbientError::UnequalFactors(p, q));
        }
        if p < 2 {
            return Err(AmbientError::FactorTooSmall(p));
        }
        if r <= 0.0 {
            return Err(AmbientError::InvalidRadius(r));
        }
        Ok(AmbientChart {
            dim: p + q,
            kind: AmbientKind::Einstein {
                lambda: (p as f64 - 1.0) / (r * r),
            },
            model: MetricModel::ProductSphere {
                half_dim: p,
                radius: r,
            },
        })
    }

    /// A user-supplied jet-evaluable metric with an optional domain guard.
    pub fn custom(
        dim: usize,
        kind: AmbientKind,
        metric: Arc<MetricFn>,
        guard: Option<Arc<GuardFn>>,
    ) -> Result<AmbientChart, AmbientError> {
        if dim < 3 {
            return Err(AmbientError::DimensionTooSmall(dim));
        }
        Ok(AmbientChart {
            dim,
            kind,
            model: MetricModel::Custom { metric, guard },
        })
    }

    /// Whether `y` lies inside the valid chart region.
    pub fn contains(&self, y: &[f64]) -> bool {
        match &self.model {
            MetricModel::Conformal { curvature } => {
                let r2: f64 = y.iter().map(|v| v * v).sum();
                1.0 + 0.25 * curvature * r2 > EPS_DOM && r2.sqrt() <= R_MAX
            }
            MetricModel::ProductSphere { half_dim, .. } => {
                let r2a: f64 = y[..*half_dim].iter().map(|v| v * v).sum();
                let r2b: f64 = y[*half_dim..].iter().map(|v| v * v).sum();
                r2a.sqrt() <= R_MAX && r2b.sqrt() <= R_MAX
            }
            MetricModel::Custom { guard, .. } => guard.as_ref().map_or(true, |g| g(y)),
        }
    }

    /// Metric matrix `h_{αβ}` evaluated through jets; the chain rule with
    /// whatever the caller seeded into `y` is automatic.
    pub fn metric_jets(&self, y: &[Jet]) -> Result<Vec<Vec<Jet>>, AmbientError> {
        assert_eq!(y.len(), self.dim, "point dimension mismatch");
        match &self.model {
            MetricModel::Conformal { curvature } => conformal_block(y, *curvature / 4.0),
            MetricModel::ProductSphere { half_dim, radius } => {
                let scale = 1.0 / (4.0 * radius * radius);
                let a = conformal_block(&y[..*half_dim], scale)?;
                let b = conformal_block(&y[*half_dim..], scale)?;
                let zero = y[0].constant_like(0.0);
                let n = self.dim;
                let mut h = vec![vec![zero; n]; n];
                for i in 0..*half_dim {
                    for j in 0..*half_dim {
                        h[i][j] = a[i][j].clone();
                    }
                }
                for i in 0..(n - half_dim) {
                    for j in 0..(n - half_dim) {
                        h[half_dim + i][half_dim + j] = b[i][j].clone();
                    }
                }
                Ok(h)
            }
            MetricModel::Custom { metric, .. } => Ok(metric(y)),
        }
    }

    /// Positive-definiteness and conditioning check of the metric values.
    pub(crate) fn check_metric_values(&self, h: &DMatrix<f64>) -> Result<(), AmbientError> {
        let eig = SymmetricEigen::new(h.clone());
        let mut min = f64::INFINITY;
        let mut max: f64 = 0.0;
        for &e in eig.eigenvalues.iter() {
            min = min.min(e);
            max = max.max(e.abs());
        }
        if min <= 0.0 || max / min > COND_MAX {
            return Err(AmbientError::SingularMetric {
                cond: if min <= 0.0 { f64::INFINITY } else { max / min },
            });
        }
        Ok(())
    }

    /// Christoffel symbols `Γ^α_{βγ} = ½ h^{αδ}(∂_β h_{δγ} + ∂_γ h_{δβ} −
    /// ∂_δ h_{βγ})` as jets at `point`, one order below the requested metric
    /// order (enough to differentiate once more for the curvature tensor).
    pub fn connection(
        &self,
        point: &[f64],
        order: usize,
    ) -> Result<Vec<Vec<Vec<Jet>>>, AmbientError> {
        if !self.contains(point) {
            return Err(AmbientError::OutsideDomain);
        }
        assert!(order >= 1, "connection needs metric order >= 1");
        let n = self.dim;
        let y: Vec<Jet> = (0..n)
            .map(|a| Jet::variable(a, point[a], n, order))
            .collect::<Result<_, _>>()?;
        let h = self.metric_jets(&y)?;
        self.check_metric_values(&values_of(&h))?;
        christoffel_from_metric(&h)
    }

    /// Riemann, Ricci and scalar curvature values at `point`, computed from
    /// second derivatives of the metric.
    pub fn curvature(&self, point: &[f64]) -> Result<AmbientCurvature, AmbientError> {
        if !self.contains(point) {
            return Err(AmbientError::OutsideDomain);
        }
        let n = self.dim;
        let y: Vec<Jet> = (0..n)
            .map(|a| Jet::variable(a, point[a], n, 2))
            .collect::<Result<_, _>>()?;
        let h = self.metric_jets(&y)?;
        let h_values = values_of(&h);
        self.check_metric_values(&h_values)?;
        let gamma = christoffel_from_metric(&h)?;
        let h_inv_values = h_values
            .clone()
            .try_inverse()
            .ok_or(AmbientError::SingularMetric { cond: f64::INFINITY })?;
        let (riemann, ricci, scal) = curvature_from_christoffels(&gamma, &h_values, &h_inv_values)?;
        let ricci_operator = &h_inv_values * &ricci;
        let christoffels = {
            let mut t = Tensor3::zeros(n);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        t.set(a, b, c, gamma[a][b][c].value());
                    }
                }
            }
            t
        };
        Ok(AmbientCurvature {
            christoffels,
            riemann,
            ricci,
            ricci_operator,
            scal,
        })
    }
}

/// Curvature data of the ambient space at one point, in chart components.
/// `riemann` uses the ordering `R(X,Y,Z,W) = ⟨R(Z,W)Y, X⟩`, all indices down.
pub struct AmbientCurvature {
    pub christoffels: Tensor3,
    pub riemann: Tensor4,
    pub ricci: DMatrix<f64>,
    /// Mixed Ricci operator `(Ric)^α_β = h^{αγ} Ric_{γβ}`.
    pub ricci_operator: DMatrix<f64>,
    pub scal: f64,
}

/// Conformally flat block `δ_{ab} / (1 + s|u|²)²` over the given coordinates.
fn conformal_block(u: &[Jet], s: f64) -> Result<Vec<Vec<Jet>>, AmbientError> {
    let d = u.len();
    let mut r2 = u[0].constant_like(0.0);
    for c in u {
        r2.add_prod(c, c);
    }
    let factor = (&r2.scale(s) + 1.0).recip()?; // 1/F
    let entry = &factor * &factor;
    let zero = u[0].constant_like(0.0);
    let mut h = vec![vec![zero; d]; d];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = entry.clone();
    }
    Ok(h)
}

/// Constant-term matrix of a jet matrix.
pub(crate) fn values_of(m: &JetMatrix) -> DMatrix<f64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j].value())
}

/// Christoffel jets from a metric jet matrix (output one order lower).
pub(crate) fn christoffel_from_metric(h: &JetMatrix) -> Result<Vec<Vec<Vec<Jet>>>, AmbientError> {
    let n = h.len();
    let lower = h[0][0].order() - 1;
    let mut dh = vec![vec![Vec::with_capacity(n); n]; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                dh[a][b].push(h[a][b].partial(c)?);
            }
        }
    }
    let h_low: JetMatrix = h
        .iter()
        .map(|row| row.iter().map(|e| e.truncated(lower)).collect())
        .collect();
    let h_inv = jet_mat_inverse(&h_low)?;
    let zero = h_inv[0][0].constant_like(0.0);
    let mut gamma = vec![vec![vec![zero; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..=b {
                let mut acc = h_inv[0][0].constant_like(0.0);
                for d in 0..n {
                    let sum = &(&dh[d][c][b] + &dh[d][b][c]) - &dh[b][c][d];
                    acc.add_prod(&h_inv[a][d], &sum);
                }
                let half = acc.scale(0.5);
                gamma[a][b][c] = half.clone();
                gamma[a][c][b] = half;
            }
        }
    }
    Ok(gamma)
}

/// Riemann (lowered), Ricci and scalar curvature values from Christoffel
/// jets of order ≥ 1. The mixed tensor follows
/// `R(∂_c, ∂_d)∂_b = Rm[a][b][c][d] ∂_a` with
/// `Rm[a][b][c][d] = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{ce}Γ^e_{db} − Γ^a_{de}Γ^e_{cb}`.
pub(crate) fn curvature_from_christoffels(
    gamma: &[Vec<Vec<Jet>>],
    h: &DMatrix<f64>,
    h_inv: &DMatrix<f64>,
) -> Result<(Tensor4, DMatrix<f64>, f64), AmbientError> {
    let n = gamma.len();
    let mut gamma_val = Tensor3::zeros(n);
    let mut dgamma = Tensor4::zeros(n); // ∂_d Γ^a_{bc} stored as (a,b,c,d)
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                gamma_val.set(a, b, c, gamma[a][b][c].value());
                for d in 0..n {
                    dgamma.set(a, b, c, d, gamma[a][b][c].partial(d)?.value());
                }
            }
        }
    }

    let mut mixed = Tensor4::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = dgamma.get(a, d, b, c) - dgamma.get(a, c, b, d);
                    for e in 0..n {
                        v += gamma_val.get(a, c, e) * gamma_val.get(e, d, b)
                            - gamma_val.get(a, d, e) * gamma_val.get(e, c, b);
                    }
                    mixed.set(a, b, c, d, v);
                }
            }
        }
    }

    let mut riemann = Tensor4::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = 0.0;
                    for e in 0..n {
                        v += h[(a, e)] * mixed.get(e, b, c, d);
                    }
                    riemann.set(a, b, c, d, v);
                }
            }
        }
    }

    // Ric(X, Y) = Σ_i R(X, e_i, Y, e_i): contract the 2nd and 4th slots.
    let mut ricci = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let mut v = 0.0;
            for c in 0..n {
                for d in 0..n {
                    v += h_inv[(c, d)] * riemann.get(a, c, b, d);
                }
            }
            ricci[(a, b)] = v;
        }
    }

    let mut scal = 0.0;
    for a in 0..n {
        for b in 0..n {
            scal += h_inv[(a, b)] * ricci[(a, b)];
        }
    }
    Ok((riemann, ricci, scal))
}
