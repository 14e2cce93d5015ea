//! Plane waves, the physical-optics far field of a meshed conductor, and the
//! generalized backscatter combination with its closed-form counterpart.
//!
//! Far fields follow the normalization `E^s ~ exp(ik|x|) / (4 pi |x|) E_inf`.
//! Under physical optics the surface current is `2 nu x H^i` on the lit side
//! (`nu . d < 0`) and zero in shadow, which gives
//!
//! ```text
//! E_inf(xhat, d, p, k) = 2ik xhat x sum_{T lit} [nu_T x (d x p)] x xhat \int_T exp(ik (d - xhat) . y) ds
//! ```
//!
//! Adding the conjugated field for the reversed pair `(-xhat, -d)` completes
//! the integral to the whole boundary, and the divergence theorem turns it into
//! `-2k^2 A(xhat, d, p) chi_hat(k (d - xhat))`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{fourier_characteristic, CVec3, Shape, TriangleMesh, UnitVec, Vec3};

/// Tolerance on `|d . p|` for a valid incidence.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Quadrature panels per wavelength demanded of PO meshes.
pub const PANELS_PER_WAVELENGTH: f64 = 8.0;

/// Incident plane wave: propagation `d`, polarization `p`, wave number `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidenceConfig {
    pub d: UnitVec,
    pub p: UnitVec,
    pub k: f64,
}

impl IncidenceConfig {
    pub fn new(d: UnitVec, p: UnitVec, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid(format!("wave number must be positive, got {k}")));
        }
        let dp = d.dot(*p);
        if dp.abs() >= ORTHOGONALITY_TOL {
            return Err(Error::invalid(format!(
                "polarization {p} not orthogonal to direction {d} (d.p = {dp:.3e})"
            )));
        }
        Ok(IncidenceConfig { d, p, k })
    }

    /// The same wave with reversed propagation and unchanged polarization.
    pub fn reversed(&self) -> Self {
        IncidenceConfig {
            d: -self.d,
            ..*self
        }
    }

    pub fn with_k(&self, k: f64) -> Self {
        IncidenceConfig { k, ..*self }
    }
}

/// `E = p exp(ik x.d)`, `H = (d x p) exp(ik x.d)`.
pub fn plane_wave(x: Vec3, cfg: &IncidenceConfig) -> (CVec3, CVec3) {
    let phase = Complex64::cis(cfg.k * x.dot(*cfg.d));
    (
        CVec3::from_real(*cfg.p, phase),
        CVec3::from_real(cfg.d.cross(*cfg.p), phase),
    )
}

/// `A(xhat, d, p) = xhat x ([(d - xhat) x (d x p)] x xhat)`.
pub fn a_vector(xhat: UnitVec, d: UnitVec, p: UnitVec) -> Vec3 {
    let inner = (*d - *xhat).cross(d.cross(*p));
    xhat.cross(inner.cross(*xhat))
}

/// `e_fwd + conj(e_bwd)`, where `e_bwd` is the far field for `(-xhat, -d)`
/// with the same polarization.
pub fn u_infty_combine(e_fwd: CVec3, e_bwd: CVec3) -> CVec3 {
    e_fwd + e_bwd.conj()
}

/// Closed form of the generalized backscatter combination,
/// `-2k^2 A(xhat, d, p) chi_hat(k (d - xhat))`.
pub fn u_infty_analytic(shape: &Shape, xhat: UnitVec, cfg: &IncidenceConfig) -> CVec3 {
    let a = a_vector(xhat, cfg.d, cfg.p);
    let chi = fourier_characteristic(shape, (*cfg.d - *xhat) * cfg.k);
    CVec3::from_real(a, chi * (-2.0 * cfg.k * cfg.k))
}

// Symmetric 3-point Gauss rule on triangles (degree 2), barycentric nodes.
const GAUSS3: [[f64; 3]; 3] = [
    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
];

/// A mesh prepared for repeated PO far-field evaluation.
#[derive(Debug, Clone)]
pub struct PoSurface {
    normals: Vec<Vec3>,
    /// Facet area times the per-node weight (1/3).
    weights: Vec<f64>,
    nodes: Vec<[Vec3; 3]>,
    max_edge: f64,
}

impl PoSurface {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let nodes = mesh
            .triangles
            .iter()
            .map(|t| {
                let v = t.map(|i| mesh.vertices[i]);
                GAUSS3.map(|b| v[0] * b[0] + v[1] * b[1] + v[2] * b[2])
            })
            .collect();
        PoSurface {
            normals: mesh.normals.iter().map(|n| n.vec()).collect(),
            weights: mesh.areas.iter().map(|a| a / 3.0).collect(),
            nodes,
            max_edge: mesh.max_edge(),
        }
    }

    pub fn max_edge(&self) -> f64 {
        self.max_edge
    }

    /// Fails when the mesh has fewer than eight panels per wavelength at `k`.
    pub fn check_refinement(&self, k: f64) -> Result<()> {
        let allowed = 2.0 * std::f64::consts::PI / (PANELS_PER_WAVELENGTH * k);
        if self.max_edge > allowed {
            return Err(Error::UnderRefined {
                k,
                max_edge: self.max_edge,
                allowed,
                ratio: self.max_edge / allowed,
            });
        }
        Ok(())
    }

    /// Triangles with `nu . d < 0`, ascending.
    pub fn lit_set(&self, d: UnitVec) -> Vec<usize> {
        (0..self.normals.len())
            .filter(|&i| self.normals[i].dot(*d) < 0.0)
            .collect()
    }

    /// PO far field after the refinement check.
    pub fn far_field(&self, xhat: UnitVec, cfg: &IncidenceConfig) -> Result<CVec3> {
        self.check_refinement(cfg.k)?;
        Ok(self.far_field_on(&self.lit_set(cfg.d), xhat, cfg))
    }

    /// PO far field over a precomputed lit set (see [`PoSurface::lit_set`]);
    /// the lit set depends on `d` only, so sweeps over `k` can share it.
    /// Accumulation runs in ascending triangle order.
    pub fn far_field_on(&self, lit: &[usize], xhat: UnitVec, cfg: &IncidenceConfig) -> CVec3 {
        let xi = (*cfg.d - *xhat) * cfg.k;
        let h = cfg.d.cross(*cfg.p);
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        for &t in lit {
            let s: Complex64 = self.nodes[t]
                .iter()
                .map(|q| Complex64::cis(xi.dot(*q)))
                .sum::<Complex64>()
                * self.weights[t];
            let j = self.normals[t].cross(h);
            acc[0] += s * j.x;
            acc[1] += s * j.y;
            acc[2] += s * j.z;
        }
        let v = CVec3(acc);
        let x = xhat.vec();
        // 2ik xhat x (V x xhat)
        let tangential = cross_real_left(x, &v.cross_real(x));
        tangential.scale(Complex64::new(0.0, 2.0 * cfg.k))
    }
}

/// `a x w` for real `a`, complex `w`.
fn cross_real_left(a: Vec3, w: &CVec3) -> CVec3 {
    -w.cross_real(a)
}

/// One-off PO far field; builds the quadrature nodes on every call.
pub fn po_far_field(mesh: &TriangleMesh, xhat: UnitVec, cfg: &IncidenceConfig) -> Result<CVec3> {
    PoSurface::new(mesh).far_field(xhat, cfg)
}

/// PO generalized backscatter combination for `(xhat, d)` and `(-xhat, -d)`.
pub fn u_infty_po(surface: &PoSurface, xhat: UnitVec, cfg: &IncidenceConfig) -> Result<CVec3> {
    let fwd = surface.far_field(xhat, cfg)?;
    let bwd = surface.far_field(-xhat, &cfg.reversed())?;
    Ok(u_infty_combine(fwd, bwd))
}
