use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Grid2;
use crate::geom::{self, Vec2};

/// Real values at every node of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid2,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid2, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::FieldLength {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: Grid2) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid2, value: f64) -> Self {
        ScalarField {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f(x, y)` at every node.
    ///
    /// Panics if `f` returns a non-finite value.
    pub fn from_fn(grid: Grid2, f: impl Fn(f64, f64) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.len())
            .map(|k| {
                let p = grid.node_point(k);
                f(p[0], p[1])
            })
            .collect();
        assert!(
            values.iter().all(|v| v.is_finite()),
            "field sampler returned a non-finite value"
        );
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, k: usize) -> f64 {
        self.values[k]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    /// Bilinear interpolation; `None` outside the box.
    pub fn sample(&self, p: Vec2) -> Option<f64> {
        let (i, j, fx, fy) = self.grid.locate(p)?;
        let v00 = self.get(i, j);
        let v10 = self.get(i + 1, j);
        let v01 = self.get(i, j + 1);
        let v11 = self.get(i + 1, j + 1);
        Some(
            (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11),
        )
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> ScalarField {
        self.map(|v| v * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Maximum absolute nodewise difference.
    pub fn max_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Same values on a translated copy of the grid.
    pub fn with_grid(&self, grid: Grid2) -> Result<ScalarField> {
        ScalarField::new(grid, self.values.clone())
    }
}

/// Which side of the zero set of a level set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Positive,
    Negative,
}

impl Phase {
    /// Strict membership: zero nodes belong to neither phase.
    #[inline]
    pub fn contains(self, phi: f64) -> bool {
        match self {
            Phase::Positive => phi > 0.0,
            Phase::Negative => phi < 0.0,
        }
    }

    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Phase::Positive => 1.0,
            Phase::Negative => -1.0,
        }
    }

    pub fn opposite(self) -> Phase {
        match self {
            Phase::Positive => Phase::Negative,
            Phase::Negative => Phase::Positive,
        }
    }
}

/// Implicit interface representation: `{phi > 0}` is the positive phase,
/// `{phi < 0}` the negative one.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSet {
    field: ScalarField,
}

impl LevelSet {
    pub fn new(field: ScalarField) -> Self {
        LevelSet { field }
    }

    pub fn from_fn(grid: Grid2, f: impl Fn(f64, f64) -> f64) -> Self {
        LevelSet::new(ScalarField::from_fn(grid, f))
    }

    /// Straight interface through `point` with unit normal `normal` pointing into the positive phase.
    pub fn plane(grid: Grid2, point: Vec2, normal: Vec2) -> Self {
        LevelSet::from_fn(grid, |x, y| geom::dot(geom::sub([x, y], point), normal))
    }

    /// Circle of radius `radius`; the positive phase is outside.
    pub fn circle(grid: Grid2, center: Vec2, radius: f64) -> Self {
        LevelSet::from_fn(grid, |x, y| geom::dist([x, y], center) - radius)
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn into_field(self) -> ScalarField {
        self.field
    }

    pub fn grid(&self) -> &Grid2 {
        self.field.grid()
    }

    #[inline]
    pub fn phi(&self, k: usize) -> f64 {
        self.field.at(k)
    }

    #[inline]
    pub fn phi_at(&self, i: usize, j: usize) -> f64 {
        self.field.get(i, j)
    }

    pub fn values(&self) -> &[f64] {
        self.field.values()
    }

    pub fn has_both_signs(&self) -> bool {
        let v = self.values();
        v.iter().any(|&p| p > 0.0) && v.iter().any(|&p| p <= 0.0)
    }

    pub fn count(&self, phase: Phase) -> usize {
        self.values().iter().filter(|&&p| phase.contains(p)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_reproduces_bilinear_functions() {
        let g = Grid2::new(9, 9, [0.0, 0.0, 1.0, 1.0]).unwrap();
        let f = ScalarField::from_fn(g, |x, y| 2.0 * x - y + 3.0 * x * y);
        let v = f.sample([0.33, 0.71]).unwrap();
        assert!((v - (0.66 - 0.71 + 3.0 * 0.33 * 0.71)).abs() < 1e-14);
        assert!(f.sample([1.5, 0.0]).is_none());
    }

    #[test]
    fn rejects_non_finite_values() {
        let g = Grid2::new(8, 8, [0.0, 0.0, 1.0, 1.0]).unwrap();
        let mut v = vec![0.0; 64];
        v[5] = f64::NAN;
        assert!(matches!(ScalarField::new(g, v), Err(Error::NonFinite(5))));
        assert!(ScalarField::new(g, vec![0.0; 3]).is_err());
    }
}
