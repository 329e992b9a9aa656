use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::gauss_legendre;
use crate::weights::WeightProfile;

/// Closure of the truncated domain at r = R.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBoundary {
    /// u(R) = u'(R) = 0.
    Clamped,
    /// u(r) = u(R) (R/r)^2 for r > R, joined C^1 through u'(R) = -2 u(R)/R.
    /// r^{-2} is harmonic in R^4, so the tail adds nothing to the seminorm.
    #[default]
    HarmonicTail,
}

/// Mesh parameters: uniform on [0, 1], geometric on [1, R].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSpec {
    pub radius: f64,
    pub inner_elements: usize,
    pub outer_ratio: f64,
    pub gauss_points: usize,
    pub outer: OuterBoundary,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self { radius: 20.0, inner_elements: 32, outer_ratio: 1.1, gauss_points: 8, outer: OuterBoundary::HarmonicTail }
    }
}

impl MeshSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 1.0 && self.radius.is_finite()) {
            return invalid(format!("domain radius must exceed 1, got {}", self.radius));
        }
        if self.inner_elements < 2 {
            return invalid("need at least two elements on [0, 1]");
        }
        if !(self.outer_ratio > 1.0 && self.outer_ratio <= 2.0) {
            return invalid(format!("outer ratio must lie in (1, 2], got {}", self.outer_ratio));
        }
        if self.gauss_points < 6 {
            return invalid(format!("need at least 6 Gauss points per element, got {}", self.gauss_points));
        }
        Ok(())
    }

    /// Twice as many elements.
    pub fn refined(&self) -> Self {
        Self { inner_elements: 2 * self.inner_elements, outer_ratio: self.outer_ratio.sqrt(), ..*self }
    }

    pub fn nodes(&self) -> Vec<f64> {
        let n = self.inner_elements;
        let mut v: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let mut r = 1.0;
        loop {
            r *= self.outer_ratio;
            if r >= self.radius * (1.0 - 1e-9) {
                break;
            }
            v.push(r);
        }
        let last = v[v.len() - 1];
        // Avoid a sliver element next to R.
        if last > 1.0 && (self.radius - last) < 0.3 * (last - last / self.outer_ratio) {
            v.pop();
        }
        v.push(self.radius);
        v
    }
}

/// Hermite shape functions on [0, 1] for (u_a, h u'_a, u_b, h u'_b) and
/// their first two t-derivatives.
fn hermite(t: f64) -> [[f64; 4]; 3] {
    let (t2, t3) = (t * t, t * t * t);
    [
        [1.0 - 3.0 * t2 + 2.0 * t3, t - 2.0 * t2 + t3, 3.0 * t2 - 2.0 * t3, -t2 + t3],
        [-6.0 * t + 6.0 * t2, 1.0 - 4.0 * t + 3.0 * t2, 6.0 * t - 6.0 * t2, -2.0 * t + 3.0 * t2],
        [-6.0 + 12.0 * t, -4.0 + 6.0 * t, 6.0 - 12.0 * t, -2.0 + 6.0 * t],
    ]
}

/// Basis data at one quadrature point.
#[derive(Clone, Debug)]
pub(crate) struct QuadPoint {
    /// 2 pi^2 r^3 times the Gauss weight.
    pub w: f64,
    pub omega: f64,
    pub dofs: [Option<usize>; 4],
    pub phi: [f64; 4],
    pub lap: [f64; 4],
}

/// C^1 cubic Hermite space on [0, R] with u'(0) = 0 and the configured
/// closure at R.
#[derive(Clone, Debug)]
pub struct FemSpace {
    spec: MeshSpec,
    nodes: Vec<f64>,
    points: Vec<QuadPoint>,
    ndof: usize,
    tail: bool,
}

impl FemSpace {
    pub fn new(spec: &MeshSpec, profile: &WeightProfile) -> Result<Self> {
        spec.validate()?;
        let nodes = spec.nodes();
        let n = nodes.len() - 1;
        let tail = spec.outer == OuterBoundary::HarmonicTail;
        let ndof = 2 * n - 1 + usize::from(tail);
        let mut space = Self { spec: *spec, nodes, points: Vec::new(), ndof, tail };
        let (gx, gw) = gauss_legendre(spec.gauss_points);
        let mut points = Vec::with_capacity(n * gx.len());
        for e in 0..n {
            let (a, b) = (space.nodes[e], space.nodes[e + 1]);
            let h = b - a;
            for (x, wq) in gx.iter().zip(&gw) {
                let r = a + h * 0.5 * (x + 1.0);
                let (dofs, [phi, d1, d2]) = space.shapes(e, r);
                let lap = std::array::from_fn(|k| d2[k] + 3.0 * d1[k] / r);
                points.push(QuadPoint { w: 2.0 * PI * PI * r.powi(3) * 0.5 * h * wq, omega: profile.omega(r), dofs, phi, lap });
            }
        }
        if tail {
            // r = R/t on t in (0, 1): the tail value is u(R) t^2 and its Laplacian vanishes.
            let big = spec.radius;
            let (tx, tw) = gauss_legendre(2 * spec.gauss_points);
            for (x, wq) in tx.iter().zip(&tw) {
                let t = 0.5 * (x + 1.0);
                let r = big / t;
                points.push(QuadPoint {
                    w: 2.0 * PI * PI * r.powi(3) * big / (t * t) * 0.5 * wq,
                    omega: 0.0,
                    dofs: [Self::value_dof(n, n, true), None, None, None],
                    phi: [t * t, 0.0, 0.0, 0.0],
                    lap: [0.0; 4],
                });
            }
        }
        space.points = points;
        Ok(space)
    }

    fn value_dof(i: usize, n: usize, tail: bool) -> Option<usize> {
        match i {
            0 => Some(0),
            i if i == n => tail.then_some(2 * n - 1),
            i => Some(2 * i - 1),
        }
    }

    fn slope_dof(i: usize, n: usize) -> Option<usize> {
        if i == 0 || i == n {
            None
        } else {
            Some(2 * i)
        }
    }

    /// Global dofs of element e and the values, first and second derivatives
    /// of its four local basis functions at r. On the last element with a
    /// harmonic tail the end slope is tied to the end value.
    fn shapes(&self, e: usize, r: f64) -> ([Option<usize>; 4], [[f64; 4]; 3]) {
        let n = self.elements();
        let (a, b) = (self.nodes[e], self.nodes[e + 1]);
        let h = b - a;
        let hb = hermite((r - a) / h);
        let dofs = [Self::value_dof(e, n, self.tail), Self::slope_dof(e, n), Self::value_dof(e + 1, n, self.tail), Self::slope_dof(e + 1, n)];
        let mut out = [[0.0; 4]; 3];
        for (j, row) in out.iter_mut().enumerate() {
            let scale = h.powi(j as i32);
            for k in 0..4 {
                let m = if k % 2 == 1 { h } else { 1.0 };
                row[k] = m * hb[j][k] / scale;
            }
            if self.tail && e + 1 == n {
                row[2] += -2.0 / b * row[3];
                row[3] = 0.0;
            }
        }
        (dofs, out)
    }

    pub fn spec(&self) -> &MeshSpec {
        &self.spec
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn ndof(&self) -> usize {
        self.ndof
    }

    pub fn elements(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Nodal values, including the end at R.
    pub fn nodal_values(&self, c: &DVector<f64>) -> Vec<f64> {
        let n = self.elements();
        (0..=n).map(|i| Self::value_dof(i, n, self.tail).map_or(0.0, |k| c[k])).collect()
    }

    /// Nodal slopes, including the constrained ends.
    pub fn nodal_slopes(&self, c: &DVector<f64>) -> Vec<f64> {
        let n = self.elements();
        let mut d: Vec<f64> = (0..=n).map(|i| Self::slope_dof(i, n).map_or(0.0, |k| c[k])).collect();
        if self.tail {
            d[n] = -2.0 * c[self.ndof - 1] / self.spec.radius;
        }
        d
    }

    /// Coefficients from nodal values and slopes (constrained slopes are dropped).
    pub fn from_nodal(&self, u: &[f64], du: &[f64]) -> DVector<f64> {
        let n = self.elements();
        let mut c = DVector::zeros(self.ndof);
        for i in 0..=n {
            if let Some(k) = Self::value_dof(i, n, self.tail) {
                c[k] = u[i];
            }
            if let Some(k) = Self::slope_dof(i, n) {
                c[k] = du[i];
            }
        }
        c
    }

    /// Hermite interpolant of a function given with its derivative.
    pub fn interpolate(&self, f: impl Fn(f64) -> (f64, f64)) -> DVector<f64> {
        let (u, du): (Vec<f64>, Vec<f64>) = self.nodes.iter().map(|&r| f(r)).unzip();
        self.from_nodal(&u, &du)
    }

    fn locate(&self, r: f64) -> usize {
        let n = self.elements();
        self.nodes.partition_point(|&x| x <= r).clamp(1, n) - 1
    }

    /// (u, u', u'', Delta u) at r >= 0, including the tail beyond R.
    pub fn evaluate(&self, c: &DVector<f64>, r: f64) -> [f64; 4] {
        let big = self.spec.radius;
        if r >= big {
            let ur = if self.tail { c[self.ndof - 1] } else { 0.0 };
            let k = ur * big * big;
            return [k / (r * r), -2.0 * k / r.powi(3), 6.0 * k / r.powi(4), 0.0];
        }
        let (dofs, shapes) = self.shapes(self.locate(r), r);
        let mut out = [0.0; 3];
        for k in 0..4 {
            if let Some(d) = dofs[k] {
                for (j, o) in out.iter_mut().enumerate() {
                    *o += c[d] * shapes[j][k];
                }
            }
        }
        let lap = if r > 0.0 { out[2] + 3.0 * out[1] / r } else { 4.0 * out[2] };
        [out[0], out[1], out[2], lap]
    }

    /// Gram matrix of the weighted seminorm, 2 pi^2 int omega Delta phi_i Delta phi_j r^3 dr.
    pub fn assemble_operator(&self) -> Result<DMatrix<f64>> {
        let mut a = DMatrix::zeros(self.ndof, self.ndof);
        for q in &self.points {
            for i in 0..4 {
                let Some(gi) = q.dofs[i] else { continue };
                for j in 0..4 {
                    let Some(gj) = q.dofs[j] else { continue };
                    a[(gi, gj)] += q.w * q.omega * q.lap[i] * q.lap[j];
                }
            }
        }
        let asym = (&a - a.transpose()).amax();
        if asym > 1e-10 * a.amax() {
            return Err(Error::LinearAlgebra(format!("operator asymmetric by {asym:e}")));
        }
        Ok(a)
    }

    /// sum_g w_g g(u(r_g), r_g) phi_i(r_g) for every dof i.
    pub(crate) fn load(&self, c: &DVector<f64>, g: impl Fn(f64) -> f64) -> DVector<f64> {
        let mut b = DVector::zeros(self.ndof);
        for q in &self.points {
            let u = self.value_at(c, q);
            let gv = g(u);
            if gv == 0.0 {
                continue;
            }
            for k in 0..4 {
                if let Some(d) = q.dofs[k] {
                    b[d] += q.w * gv * q.phi[k];
                }
            }
        }
        b
    }

    /// sum_g w_g g(u(r_g)) phi_i phi_j.
    pub(crate) fn mass(&self, c: &DVector<f64>, g: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.ndof, self.ndof);
        for q in &self.points {
            let gv = g(self.value_at(c, q));
            if gv == 0.0 {
                continue;
            }
            for i in 0..4 {
                let Some(gi) = q.dofs[i] else { continue };
                for j in 0..4 {
                    let Some(gj) = q.dofs[j] else { continue };
                    m[(gi, gj)] += q.w * gv * q.phi[i] * q.phi[j];
                }
            }
        }
        m
    }

    /// sum_g w_g g(u(r_g)).
    pub(crate) fn integrate_of(&self, c: &DVector<f64>, g: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().map(|q| q.w * g(self.value_at(c, q))).sum()
    }

    pub(crate) fn value_at(&self, c: &DVector<f64>, q: &QuadPoint) -> f64 {
        let mut u = 0.0;
        for k in 0..4 {
            if let Some(d) = q.dofs[k] {
                u += c[d] * q.phi[k];
            }
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mesh_contains_one_and_radius() {
        let s = MeshSpec::default();
        let n = s.nodes();
        assert!(n.contains(&1.0));
        assert_eq!(*n.last().unwrap(), 20.0);
        assert!(n.windows(2).all(|w| w[1] > w[0]));
        assert!(s.refined().nodes().len() > 2 * n.len() - 10);
    }

    #[test]
    fn operator_reproduces_seminorm_of_smooth_function() {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        let space = FemSpace::new(&MeshSpec::default(), &w).unwrap();
        let a = space.assemble_operator().unwrap();
        let c = space.interpolate(|r| {
            let e = (-r * r).exp();
            (e, -2.0 * r * e)
        });
        let q = (c.transpose() * &a * &c)[(0, 0)];
        let u = crate::radial::RadialFunction::smooth(
            std::sync::Arc::new(|r: f64| {
                let e = (-r * r).exp();
                crate::radial::Jet::new(e, -2.0 * r * e, (4.0 * r * r - 2.0) * e)
            }),
            f64::INFINITY,
            "g",
        )
        .unwrap();
        let exact = crate::radial::weighted_seminorm_sq(&u, &w, &Default::default()).unwrap().value;
        assert_relative_eq!(q, exact, max_relative = 1e-3);
    }
}
