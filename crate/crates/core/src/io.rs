//! Matrix JSON: `{"rows": R, "cols": C, "data": [[re, im], ...]}`, row-major.
//! Floats are written in shortest round-trip form, so reading a written
//! matrix reproduces every entry bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMat};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Result<Self> {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::Format(format!("non-finite entry at ({i},{j})")));
                }
                data.push([z.re, z.im]);
            }
        }
        Ok(MatrixJson { rows: m.nrows(), cols: m.ncols(), data })
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Format(format!(
                "{} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            c(re, im)
        }))
    }
}

pub fn matrix_to_json(m: &CMat) -> Result<String> {
    serde_json::to_string(&MatrixJson::from_matrix(m)?).map_err(|e| Error::Format(e.to_string()))
}

pub fn matrix_from_json(s: &str) -> Result<CMat> {
    let mj: MatrixJson = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
    mj.to_matrix()
}

pub fn write_matrix(path: &Path, m: &CMat) -> Result<()> {
    std::fs::write(path, matrix_to_json(m)?)?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<CMat> {
    matrix_from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;
    use crate::seed;
    use proptest::prelude::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let m = gaussian_matrix(&mut seed::stream(1, "io", 0), 3, 5, 1.0) * c(1e-7, 3e5);
        let back = matrix_from_json(&matrix_to_json(&m).unwrap()).unwrap();
        for (x, y) in m.iter().zip(back.iter()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn layout_is_row_major() {
        let m = CMat::from_row_slice(1, 2, &[c(1.0, 2.0), c(3.0, -4.0)]);
        assert_eq!(matrix_to_json(&m).unwrap(), r#"{"rows":1,"cols":2,"data":[[1.0,2.0],[3.0,-4.0]]}"#);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matrix_from_json(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
        assert!(matrix_from_json("[1,2]").is_err());
        let mut m = CMat::zeros(1, 1);
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert!(matrix_to_json(&m).is_err());
    }

    proptest! {
        #[test]
        fn any_finite_entries_round_trip(re in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO,
                                         im in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
            let m = CMat::from_element(2, 1, c(re, im));
            let back = matrix_from_json(&matrix_to_json(&m).unwrap()).unwrap();
            prop_assert_eq!(back[(1, 0)].re.to_bits(), re.to_bits());
            prop_assert_eq!(back[(1, 0)].im.to_bits(), im.to_bits());
        }
    }
}
