use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the arm space `[0,1]^D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArmPoint(Vec<f64>);

impl ArmPoint {
    /// Builds a point, checking that every coordinate lies in `[0, 1]`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("coords", "an arm needs at least one coordinate"));
        }
        if let Some(c) = coords.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::invalid("coords", format!("coordinate {c} outside [0, 1]")));
        }
        Ok(Self(coords))
    }

    pub fn scalar(x: f64) -> Result<Self> {
        Self::new(vec![x])
    }

    /// Skips the range check. Callers guarantee the coordinates are in the unit cube.
    pub(crate) fn from_unchecked(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ArmPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_cube() {
        assert!(ArmPoint::new(vec![0.5, 1.5]).is_err());
        assert!(ArmPoint::new(vec![-0.1]).is_err());
        assert!(ArmPoint::new(vec![]).is_err());
        assert!(ArmPoint::new(vec![f64::NAN]).is_err());
        assert_eq!(ArmPoint::new(vec![0.0, 1.0]).unwrap().dim(), 2);
    }
}
