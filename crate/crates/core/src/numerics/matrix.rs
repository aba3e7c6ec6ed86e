use crate::error::{Error, Result};

/// Dense real symmetric matrix stored row-major.
///
/// The upper triangle is authoritative: constructors mirror it into the
/// lower triangle, so `get(i, j) == get(j, i)` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(order: usize) -> Self {
        Self { order, data: vec![0.0; order * order] }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.data[i * order + i] = 1.0;
        }
        m
    }

    /// Builds the matrix from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite("symmetric matrix"));
                }
                m.data[i * order + j] = v;
                m.data[j * order + i] = v;
            }
        }
        Ok(m)
    }

    /// Builds the matrix from row-major data, keeping the upper triangle.
    pub fn from_row_major(order: usize, data: &[f64]) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::Shape(format!(
                "expected {} entries for order {order}, got {}",
                order * order,
                data.len()
            )));
        }
        Self::from_fn(order, |i, j| data[i * order + j])
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("matrix rows must all have length equal to the row count".into()));
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    /// Sets entry `(i, j)` and its mirror.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.order + j] = value;
        self.data[j * self.order + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Row sums.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.order).map(|i| self.row(i).iter().sum()).collect()
    }
}
