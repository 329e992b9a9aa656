use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::nonlinearity::{antiderivative, f_model, f_model_derivative, GrowthParams};
use crate::weights::WeightProfile;

use super::fem::{FemSpace, MeshSpec};

/// Discrete energy I(c) = c^T A c / 2 - int F(u_c) on a Hermite space.
pub struct Problem {
    space: FemSpace,
    a: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    growth: GrowthParams,
}

impl Problem {
    pub fn new(mesh: &MeshSpec, profile: &WeightProfile, growth: &GrowthParams) -> Result<Self> {
        growth.validate()?;
        let space = FemSpace::new(mesh, profile)?;
        let a = space.assemble_operator()?;
        let chol = Cholesky::new(a.clone())
            .ok_or_else(|| Error::LinearAlgebra("operator is not positive definite: boundary constraints misapplied".into()))?;
        Ok(Self { space, a, chol, growth: *growth })
    }

    pub fn space(&self) -> &FemSpace {
        &self.space
    }

    pub fn operator(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn growth(&self) -> &GrowthParams {
        &self.growth
    }

    pub fn ndof(&self) -> usize {
        self.space.ndof()
    }

    /// <v, w>_beta = v^T A w.
    pub fn inner(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        v.dot(&(&self.a * w))
    }

    /// ||v||_beta; NaN propagates so that overflowed states never look converged.
    pub fn norm(&self, v: &DVector<f64>) -> f64 {
        let q = self.inner(v, v);
        if q.is_nan() {
            return f64::NAN;
        }
        q.max(0.0).sqrt()
    }

    /// int F(u); +inf once the exponent overflows.
    pub fn potential(&self, c: &DVector<f64>) -> f64 {
        let g = self.growth;
        self.space.integrate_of(c, |u| antiderivative(u, &g))
    }

    /// I(c); -inf when int F(u) overflows.
    pub fn energy(&self, c: &DVector<f64>) -> f64 {
        let p = self.potential(c);
        if p.is_infinite() {
            return f64::NEG_INFINITY;
        }
        0.5 * self.inner(c, c) - p
    }

    /// b_i = int f(u) phi_i.
    pub fn load(&self, c: &DVector<f64>) -> DVector<f64> {
        let g = self.growth;
        self.space.load(c, |u| f_model(u, &g))
    }

    /// Euclidean residual A c - b(c).
    pub fn residual(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.a * c - self.load(c)
    }

    /// Riesz representative of I'(c) in the beta inner product: c - A^{-1} b(c).
    pub fn gradient(&self, c: &DVector<f64>) -> DVector<f64> {
        c - self.chol.solve(&self.load(c))
    }

    /// Solves A x = y.
    pub fn riesz(&self, y: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(y)
    }

    /// A - int f'(u) phi_i phi_j.
    pub fn jacobian(&self, c: &DVector<f64>) -> DMatrix<f64> {
        let g = self.growth;
        &self.a - self.space.mass(c, |u| f_model_derivative(u, &g))
    }

    /// int f(u) u.
    pub fn nehari_integral(&self, c: &DVector<f64>) -> f64 {
        let g = self.growth;
        self.space.integrate_of(c, |u| f_model(u, &g) * u)
    }

    /// | ||u||^2 - int f(u) u | / ||u||^2.
    pub fn nehari_defect(&self, c: &DVector<f64>) -> f64 {
        let n2 = self.inner(c, c);
        (n2 - self.nehari_integral(c)).abs() / n2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_state() {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        let p = Problem::new(&MeshSpec::default(), &w, &GrowthParams::default()).unwrap();
        let z = DVector::zeros(p.ndof());
        assert_eq!(p.energy(&z), 0.0);
        assert_eq!(p.gradient(&z).amax(), 0.0);
    }

    #[test]
    fn small_states_have_positive_energy() {
        let w = WeightProfile::power(0.5, 3.0).unwrap();
        let p = Problem::new(&MeshSpec::default(), &w, &GrowthParams::default()).unwrap();
        let c = p.space().interpolate(|r| {
            let e = (-r * r).exp();
            (1e-2 * e, -2e-2 * r * e)
        });
        let e = p.energy(&c);
        assert!(e > 0.0);
        assert_relative_eq!(e, 0.5 * p.inner(&c, &c), max_relative = 1e-8);
    }
}
