//! Uniform grids on `[0,1]`, sampled profiles and the weighted norms.

use thiserror::Error;

use crate::expr::{Expr, ExprError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error("grid needs at least 4 intervals, got {0}")]
    TooFewIntervals(usize),
    #[error("grid mismatch: {0} vs {1} intervals")]
    GridMismatch(usize, usize),
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("non-finite value at node {0}")]
    NonFinite(usize),
    #[error("weight must be positive, node {index} has {value}")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("weight must be nonnegative, node {index} has {value}")]
    NegativeWeight { index: usize, value: f64 },
}

/// Uniform grid `z_i = i/N`, `i = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    intervals: usize,
}

impl Grid {
    pub fn new(intervals: usize) -> Result<Grid, NormError> {
        if intervals < 4 {
            return Err(NormError::TooFewIntervals(intervals));
        }
        Ok(Grid { intervals })
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of nodes `N + 1`.
    pub fn nodes(&self) -> usize {
        self.intervals + 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    pub fn z(&self, i: usize) -> f64 {
        i as f64 / self.intervals as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.intervals).map(|i| self.z(i))
    }

    /// Composite trapezoid rule for node values `f`.
    pub fn trapezoid(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.nodes());
        let n = self.intervals;
        let inner: f64 = f[1..n].iter().sum();
        self.h() * (inner + 0.5 * (f[0] + f[n]))
    }
}

/// Function values on the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: Grid,
    values: Vec<f64>,
}

impl Profile {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Profile, NormError> {
        if values.len() != grid.nodes() {
            return Err(NormError::Length { expected: grid.nodes(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(NormError::NonFinite(i));
        }
        Ok(Profile { grid, values })
    }

    pub fn zeros(grid: Grid) -> Profile {
        Profile { grid, values: vec![0.0; grid.nodes()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Profile, NormError> {
        Profile::new(grid, grid.points().map(f).collect())
    }

    /// Sample an expression in `z` at every node.
    pub fn from_expr(grid: Grid, e: &Expr) -> Result<Profile, ExprError> {
        let values = grid.points().map(|z| e.eval_z(z)).collect::<Result<Vec<_>, _>>()?;
        Ok(Profile { grid, values })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Profile {
        Profile { grid: self.grid, values: self.values.iter().map(|v| c * v).collect() }
    }
}

fn same_grid(x: &Profile, w: &Profile) -> Result<(), NormError> {
    if x.grid != w.grid {
        return Err(NormError::GridMismatch(x.grid.intervals, w.grid.intervals));
    }
    Ok(())
}

fn check_nonnegative(w: &Profile) -> Result<(), NormError> {
    match w.values.iter().position(|v| *v < 0.0) {
        Some(index) => Err(NormError::NegativeWeight { index, value: w.values[index] }),
        None => Ok(()),
    }
}

/// `max_i |x_i| / eta_i`.
pub fn norm_inf_weighted(x: &Profile, eta: &Profile) -> Result<f64, NormError> {
    same_grid(x, eta)?;
    let mut m = 0.0f64;
    for (i, (xi, ei)) in x.values.iter().zip(&eta.values).enumerate() {
        if *ei <= 0.0 {
            return Err(NormError::NonPositiveWeight { index: i, value: *ei });
        }
        m = m.max(xi.abs() / ei);
    }
    Ok(m)
}

/// `(∫ r x²)^{1/2}` by the trapezoid rule.
pub fn norm_l2_weighted(x: &Profile, rw: &Profile) -> Result<f64, NormError> {
    same_grid(x, rw)?;
    check_nonnegative(rw)?;
    let f: Vec<f64> = x.values.iter().zip(&rw.values).map(|(a, r)| r * a * a).collect();
    Ok(x.grid.trapezoid(&f).sqrt())
}

/// `∫ w |x|` by the trapezoid rule.
pub fn norm_l1_weighted(x: &Profile, w: &Profile) -> Result<f64, NormError> {
    same_grid(x, w)?;
    check_nonnegative(w)?;
    let f: Vec<f64> = x.values.iter().zip(&w.values).map(|(a, w)| w * a.abs()).collect();
    Ok(x.grid.trapezoid(&f))
}

/// Unweighted `L²`.
pub fn norm_l2(x: &Profile) -> f64 {
    let f: Vec<f64> = x.values.iter().map(|a| a * a).collect();
    x.grid.trapezoid(&f).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_basics() {
        assert!(Grid::new(3).is_err());
        let g = Grid::new(1000).unwrap();
        assert!((g.h() * 1000.0 - 1.0).abs() <= 1e-15);
        assert_eq!(g.z(1000), 1.0);
    }

    #[test]
    fn reference_values() {
        let g = Grid::new(1000).unwrap();
        let one = Profile::from_fn(g, |_| 1.0).unwrap();
        let lin = Profile::from_fn(g, |z| 1.0 - z).unwrap();
        let s = Profile::from_fn(g, |z| (PI * z).sin()).unwrap();
        assert!((norm_l2_weighted(&lin, &one).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-6);
        let m = Profile::from_fn(g, |z| 2f64.sqrt() * (PI * z).sin()).unwrap();
        assert!((norm_l2_weighted(&m, &one).unwrap() - 1.0).abs() < 1e-6);
        assert!((norm_l1_weighted(&lin, &s).unwrap() - 1.0 / PI).abs() < 1e-6);
        assert!((norm_l1_weighted(&one, &s).unwrap() - 2.0 / PI).abs() < 1e-6);
        let zero = Profile::zeros(g);
        assert_eq!(norm_inf_weighted(&zero, &one).unwrap(), 0.0);
        assert!(norm_inf_weighted(&s, &s).is_err());
        assert_eq!(norm_inf_weighted(&one.scaled(2.0), &one.scaled(2.0)).unwrap(), 1.0);
    }

    #[test]
    fn weighted_sup_against_dense_search() {
        let g = Grid::new(1000).unwrap();
        let x = Profile::from_fn(g, |z| (PI * z).sin()).unwrap();
        let eta = Profile::from_fn(g, |z| (PI / 4.0 + PI * z / 2.0).sin()).unwrap();
        let f = |z: f64| (PI * z).sin() / (PI / 4.0 + PI * z / 2.0).sin();
        let dense = (0..=1_000_000).map(|i| f(i as f64 * 1e-6)).fold(0.0, f64::max);
        let got = norm_inf_weighted(&x, &eta).unwrap();
        assert!((got - dense).abs() < 1e-6, "{got} vs {dense}");
    }

    #[test]
    fn mismatch_and_bad_weights() {
        let a = Profile::zeros(Grid::new(10).unwrap());
        let b = Profile::zeros(Grid::new(20).unwrap());
        assert!(matches!(norm_l2_weighted(&a, &b), Err(NormError::GridMismatch(10, 20))));
        let neg = Profile::from_fn(Grid::new(10).unwrap(), |z| z - 0.5).unwrap();
        assert!(norm_l1_weighted(&a, &neg).is_err());
        assert!(Profile::new(Grid::new(4).unwrap(), vec![0.0, 1.0, f64::NAN, 0.0, 0.0]).is_err());
    }
}
