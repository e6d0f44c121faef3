use std::sync::Arc;

use super::{GeometryError, Metric, VectorField};
use crate::graded::{Chart, Parity, SuperScalar};

/// Christoffel data `∇_{∂_I} ∂_J` for the frame of a metric.
///
/// Built once by [`ConnectionTable::levi_civita`] and then shared read-only.
#[derive(Clone, Debug)]
pub struct ConnectionTable {
    metric: Metric,
    inverse: Vec<Vec<SuperScalar>>,
    gamma: Vec<Vec<VectorField>>,
}

impl ConnectionTable {
    /// The Levi-Civita connection from the Koszul formula on frames:
    ///
    /// `Γ_IJK = ½[∂_I g_JK + (-1)^{|I|(|J|+|K|)} ∂_J g_KI - (-1)^{|K|(|I|+|J|)} ∂_K g_IJ]`,
    /// then `∇_{∂_I} ∂_J = Σ_{K,L} Γ_IJK g^{KL} ∂_L`.
    pub fn levi_civita(metric: &Metric) -> Result<Self, GeometryError> {
        let inverse = metric.inverse()?;
        let chart = metric.chart().clone();
        let frame = metric.frame().to_vec();
        let n = frame.len();
        let g = metric.entries();
        let p: Vec<Parity> = (0..n).map(|k| metric.frame_parity(k)).collect();
        let d = |k: usize, e: &SuperScalar| e.partial(frame[k]);
        let half = crate::graded::EvenScalar::from_int(1)
            .div(&crate::graded::EvenScalar::from_int(2))
            .expect("2 is invertible");
        let mut gamma = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let lower: Vec<SuperScalar> = (0..n)
                    .map(|k| {
                        let a = d(i, &g[j][k]);
                        let b = d(j, &g[k][i]);
                        let c = d(k, &g[i][j]);
                        let b = if p[i].koszul(p[j] + p[k]) { -&b } else { b };
                        let c = if p[k].koszul(p[i] + p[j]) { -&c } else { c };
                        (&(&a + &b) - &c).scale(&half)
                    })
                    .collect();
                let mut field = VectorField::zero(&chart);
                for (l, &idx) in frame.iter().enumerate() {
                    let mut coeff = SuperScalar::zero(&chart);
                    for (k, lk) in lower.iter().enumerate() {
                        if !lk.is_zero() && !inverse[k][l].is_zero() {
                            coeff = &coeff + &(lk * &inverse[k][l]);
                        }
                    }
                    field = field.with(idx, coeff);
                }
                row.push(field);
            }
            gamma.push(row);
        }
        Ok(ConnectionTable {
            metric: metric.clone(),
            inverse,
            gamma,
        })
    }

    /// A connection with caller-supplied Christoffel data, indexed by frame
    /// position. Useful for exercising torsion on non-Levi-Civita tables.
    pub fn from_table(
        metric: &Metric,
        gamma: Vec<Vec<VectorField>>,
    ) -> Result<Self, GeometryError> {
        let n = metric.frame().len();
        if gamma.len() != n || gamma.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Shape(format!("expected a {n}x{n} table")));
        }
        Ok(ConnectionTable {
            inverse: metric.inverse()?,
            metric: metric.clone(),
            gamma,
        })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.metric.chart()
    }

    pub fn inverse_metric(&self) -> &[Vec<SuperScalar>] {
        &self.inverse
    }

    /// `∇_{∂_i} ∂_j` by chart indices.
    pub fn christoffel(&self, i: usize, j: usize) -> Result<&VectorField, GeometryError> {
        let a = self.metric.require(i)?;
        let b = self.metric.require(j)?;
        Ok(&self.gamma[a][b])
    }

    fn frame_field(&self, k: usize) -> VectorField {
        VectorField::frame(self.chart(), self.metric.frame()[k])
    }

    /// `∇_X Y = Σ X^I [∂_I(Y^J) ∂_J + (-1)^{|I||Y^J|} Y^J ∇_{∂_I} ∂_J]`.
    pub fn covariant_derivative(
        &self,
        x: &VectorField,
        y: &VectorField,
    ) -> Result<VectorField, GeometryError> {
        let chart = self.chart();
        let mut out = VectorField::zero(chart);
        for (&i, xi) in x.components() {
            let a = self.metric.require(i)?;
            let pi = chart.parity(i);
            let mut inner = VectorField::zero(chart);
            for (&j, yj) in y.components() {
                let b = self.metric.require(j)?;
                inner = inner.with(j, yj.partial(i));
                let gamma = &self.gamma[a][b];
                if !gamma.is_zero() {
                    inner = &inner + &gamma.scale_left(&yj.twist(pi));
                }
            }
            out = &out + &inner.scale_left(xi);
        }
        Ok(out)
    }

    /// `T(X,Y) = ∇_X Y - (-1)^{|X||Y|} ∇_Y X - [X,Y]`.
    pub fn torsion(&self, x: &VectorField, y: &VectorField) -> Result<VectorField, GeometryError> {
        let mut out = VectorField::zero(self.chart());
        for (px, x) in x.homogeneous_parts() {
            for (py, y) in y.homogeneous_parts() {
                let xy = self.covariant_derivative(&x, &y)?;
                let yx = self.covariant_derivative(&y, &x)?;
                let yx = if px.koszul(py) { -&yx } else { yx };
                out = &out + &(&(&xy - &yx) - &x.lie_bracket(&y));
            }
        }
        Ok(out)
    }

    /// `R(X,Y)Z = ∇_X ∇_Y Z - (-1)^{|X||Y|} ∇_Y ∇_X Z - ∇_{[X,Y]} Z`.
    pub fn curvature(
        &self,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
    ) -> Result<VectorField, GeometryError> {
        let mut out = VectorField::zero(self.chart());
        for (px, x) in x.homogeneous_parts() {
            for (py, y) in y.homogeneous_parts() {
                let a = self.covariant_derivative(&x, &self.covariant_derivative(&y, z)?)?;
                let b = self.covariant_derivative(&y, &self.covariant_derivative(&x, z)?)?;
                let b = if px.koszul(py) { -&b } else { b };
                let c = self.covariant_derivative(&x.lie_bracket(&y), z)?;
                out = &out + &(&(&a - &b) - &c);
            }
        }
        Ok(out)
    }

    /// `Ric(X,Y) = Σ_I (-1)^{|I|(|I|+|X|+|Y|)} ½[R(∂_I,X)Y + (-1)^{|X||Y|} R(∂_I,Y)X]^I`,
    /// summed over the metric's frame.
    pub fn ricci(&self, x: &VectorField, y: &VectorField) -> Result<SuperScalar, GeometryError> {
        let chart = self.chart();
        let half = crate::graded::EvenScalar::from_int(1)
            .div(&crate::graded::EvenScalar::from_int(2))
            .expect("2 is invertible");
        let mut acc = SuperScalar::zero(chart);
        for (px, x) in x.homogeneous_parts() {
            for (py, y) in y.homogeneous_parts() {
                for (k, &idx) in self.metric.frame().iter().enumerate() {
                    let pi = chart.parity(idx);
                    let di = self.frame_field(k);
                    let r1 = self.curvature(&di, &x, &y)?.coefficient(idx);
                    let r2 = self.curvature(&di, &y, &x)?.coefficient(idx);
                    let r2 = if px.koszul(py) { -&r2 } else { r2 };
                    let term = (&r1 + &r2).scale(&half);
                    let sign = pi.koszul(pi + px + py);
                    acc = if sign { &acc - &term } else { &acc + &term };
                }
            }
        }
        Ok(acc)
    }

    /// `Div(X) = Σ_I (-1)^{|I|(|I|+|X|)} (∇_{∂_I} X)^I`.
    pub fn divergence(&self, x: &VectorField) -> Result<SuperScalar, GeometryError> {
        let chart = self.chart();
        let mut acc = SuperScalar::zero(chart);
        for (px, x) in x.homogeneous_parts() {
            for (k, &idx) in self.metric.frame().iter().enumerate() {
                let pi = chart.parity(idx);
                let term = self
                    .covariant_derivative(&self.frame_field(k), &x)?
                    .coefficient(idx);
                acc = if pi.koszul(pi + px) {
                    &acc - &term
                } else {
                    &acc + &term
                };
            }
        }
        Ok(acc)
    }

    /// The field with `X(f) = (-1)^{|f||g|} <X, grad f>` for every frame `X`;
    /// `|g| = 0` here. Components solve `Σ_J G^J g_JI = (-1)^{|I||f|} ∂_I f`.
    pub fn gradient(&self, f: &SuperScalar) -> Result<VectorField, GeometryError> {
        let pf = f
            .parity()
            .ok_or_else(|| GeometryError::Inhomogeneous("gradient argument".into()))?;
        let chart = self.chart();
        let frame = self.metric.frame();
        let rhs: Vec<SuperScalar> = frame
            .iter()
            .map(|&i| {
                let d = f.partial(i);
                if chart.parity(i).koszul(pf) {
                    -&d
                } else {
                    d
                }
            })
            .collect();
        let mut out = VectorField::zero(chart);
        for (l, &idx) in frame.iter().enumerate() {
            let mut coeff = SuperScalar::zero(chart);
            for (k, r) in rhs.iter().enumerate() {
                if !r.is_zero() && !self.inverse[k][l].is_zero() {
                    coeff = &coeff + &(r * &self.inverse[k][l]);
                }
            }
            out = out.with(idx, coeff);
        }
        Ok(out)
    }

    /// `Δf = Div(grad f)`.
    pub fn laplacian(&self, f: &SuperScalar) -> Result<SuperScalar, GeometryError> {
        self.divergence(&self.gradient(f)?)
    }

    /// `H^h(X,Y) = X(Y(h)) - (∇_X Y)(h)`.
    pub fn hessian(
        &self,
        h: &SuperScalar,
        x: &VectorField,
        y: &VectorField,
    ) -> Result<SuperScalar, GeometryError> {
        let xy = x.apply(&y.apply(h));
        let nabla = self.covariant_derivative(x, y)?;
        Ok(&xy - &nabla.apply(h))
    }

    /// `K(X,Y)T = R(X,Y)T - 1/(m-n-1) [X·Ric(Y,T) - (-1)^{|Y||T|} Ric(X,T) Y]`
    /// with `m - n` the graded dimension of the metric's frame.
    pub fn k_tensor(
        &self,
        x: &VectorField,
        y: &VectorField,
        t: &VectorField,
    ) -> Result<VectorField, GeometryError> {
        let denom = self.metric.graded_dimension() - 1;
        if denom == 0 {
            return Err(GeometryError::UndefinedDenominator("m-n-1".into()));
        }
        let inv = crate::graded::EvenScalar::from_int(1)
            .div(&crate::graded::EvenScalar::from_int(denom))
            .expect("nonzero");
        let mut bracket = VectorField::zero(self.chart());
        for (py, y) in y.homogeneous_parts() {
            for (pt, t) in t.homogeneous_parts() {
                let first = x.scale_right(&self.ricci(&y, &t)?);
                let second = y.scale_left(&self.ricci(x, &t)?);
                let second = if py.koszul(pt) { -&second } else { second };
                bracket = &bracket + &(&first - &second);
            }
        }
        let r = self.curvature(x, y, t)?;
        let scaled = bracket.scale_left(&SuperScalar::from_even(self.chart(), inv));
        Ok(&r - &scaled)
    }

    /// `W₂(X,Y,Z,T) = <K(X,Y)T, Z>`.
    pub fn w2(
        &self,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
        t: &VectorField,
    ) -> Result<SuperScalar, GeometryError> {
        let k = self.k_tensor(x, y, t)?;
        self.metric.apply(&k, z)
    }
}
