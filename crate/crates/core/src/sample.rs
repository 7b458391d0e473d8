use ndarray::{Array2, ArrayView2, Axis};
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};

/// Paired response vector and covariate matrix (`n` rows, `p` columns).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    y: Vec<f64>,
    #[serde(skip)]
    x: Array2<f64>,
    columns: Vec<String>,
}

impl Sample {
    /// Columns are named `x1..xp` by default.
    pub fn new(y: Vec<f64>, x: Array2<f64>) -> Result<Self> {
        let columns = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
        Self::with_columns(y, x, columns)
    }

    pub fn with_columns(y: Vec<f64>, x: Array2<f64>, columns: Vec<String>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::Input(format!(
                "response has {} rows but covariates have {}",
                y.len(),
                x.nrows()
            )));
        }
        if columns.len() != x.ncols() {
            return Err(Error::Input(format!(
                "{} column names for {} covariates",
                columns.len(),
                x.ncols()
            )));
        }
        ensure_finite(&y, "response")?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("covariates contain a non-finite value".into()));
        }
        // Standard layout lets neighbour searches borrow rows as slices.
        let x = x.as_standard_layout().into_owned();
        Ok(Self { y, x, columns })
    }

    /// One-dimensional covariate.
    pub fn univariate(y: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        let n = x.len();
        let x = Array2::from_shape_vec((n, 1), x)
            .map_err(|e| Error::Input(format!("covariate shape: {e}")))?;
        Self::new(y, x)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    /// Column `j` as an owned vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.x.column(j).to_vec()
    }

    /// Sub-sample keeping covariate columns in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.p()) {
            return Err(Error::Input(format!(
                "column index {bad} out of range for p = {}",
                self.p()
            )));
        }
        let x = self.x.select(Axis(1), cols);
        let names = cols.iter().map(|&c| self.columns[c].clone()).collect();
        Ok(Self {
            y: self.y.clone(),
            x: x.as_standard_layout().into_owned(),
            columns: names,
        })
    }

    /// Z-scores every covariate column (sample standard deviation).
    /// Constant columns become all zeros.
    pub fn standardized(&self) -> Self {
        let mut x = self.x.clone();
        standardize_columns(&mut x);
        Self {
            y: self.y.clone(),
            x,
            columns: self.columns.clone(),
        }
    }
}

pub(crate) fn standardize_columns(x: &mut Array2<f64>) {
    let n = x.nrows();
    if n < 2 {
        return;
    }
    for mut col in x.columns_mut() {
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        if sd > 0.0 {
            col.mapv_inplace(|v| (v - mean) / sd);
        } else {
            col.fill(0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn standardizes_columns() {
        let s = Sample::new(
            vec![1.0, 2.0, 3.0],
            array![[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]],
        )
        .unwrap()
        .standardized();
        let c0 = s.column(0);
        assert!((c0[0] + 1.0).abs() < 1e-12 && c0[1].abs() < 1e-12);
        assert_eq!(s.column(1), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn validates_shapes_and_values() {
        assert!(Sample::new(vec![1.0, 2.0], array![[1.0], [2.0], [3.0]]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN], array![[1.0], [2.0]]).is_err());
        assert!(Sample::new(vec![1.0, 2.0], array![[1.0], [f64::INFINITY]]).is_err());
    }

    #[test]
    fn selects_columns_in_order() {
        let s = Sample::new(vec![0.0; 2], array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let sub = s.select_columns(&[2, 0]).unwrap();
        assert_eq!(sub.x(), array![[3.0, 1.0], [6.0, 4.0]]);
        assert_eq!(sub.columns(), &["x3".to_string(), "x1".to_string()]);
        assert!(s.select_columns(&[3]).is_err());
    }
}
