use crate::error::{Error, Result};

use super::ode::AxisSolution;

/// `Ψ(x) = Π_α ψ_α(x_α)` on the tensor grid of the axis solutions.
#[derive(Debug, Clone)]
pub struct ProductEigenfunction {
    axes: Vec<AxisSolution>,
}

/// Checks that `axes[i]` belongs to axis `i`.
pub fn assemble_product(axes: Vec<AxisSolution>) -> Result<ProductEigenfunction> {
    if axes.is_empty() {
        return Err(Error::GridMismatch("no axis solutions".into()));
    }
    for (i, a) in axes.iter().enumerate() {
        if a.axis != i {
            return Err(Error::GridMismatch(format!(
                "slot {} holds the solution for axis {}",
                i + 1,
                a.axis + 1
            )));
        }
        if a.psi.len() != a.dpsi.len() || a.psi.len() < 2 {
            return Err(Error::GridMismatch(format!(
                "axis {} has a malformed grid",
                i + 1
            )));
        }
    }
    Ok(ProductEigenfunction { axes })
}

impl ProductEigenfunction {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[AxisSolution] {
        &self.axes
    }

    fn check_index(&self, idx: &[usize]) -> Result<()> {
        if idx.len() != self.dim() {
            return Err(Error::GridMismatch(format!(
                "expected {} indices, got {}",
                self.dim(),
                idx.len()
            )));
        }
        for (a, &k) in self.axes.iter().zip(idx) {
            if k >= a.psi.len() {
                return Err(Error::GridMismatch(format!(
                    "node {k} outside axis {}",
                    a.axis + 1
                )));
            }
        }
        Ok(())
    }

    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        self.axes.iter().zip(idx).map(|(a, &k)| a.node(k)).collect()
    }

    pub fn value(&self, idx: &[usize]) -> Result<f64> {
        self.check_index(idx)?;
        Ok(self.axes.iter().zip(idx).map(|(a, &k)| a.psi[k]).product())
    }

    /// `∂^m Ψ` for `m_i ≤ 2`: stored values for orders 0 and 1, the 5-point
    /// difference of `ψ_i` for order 2.
    pub fn derivative(&self, m: &[u8], idx: &[usize]) -> Result<f64> {
        self.check_index(idx)?;
        let mut out = 1.0;
        for ((a, &k), &order) in self.axes.iter().zip(idx).zip(m) {
            out *= match order {
                0 => a.psi[k],
                1 => a.dpsi[k],
                2 => a.second_difference(k)?,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "derivative order {order} along one axis is not available"
                    )))
                }
            };
        }
        Ok(out)
    }

    pub fn first(&self, i: usize, idx: &[usize]) -> Result<f64> {
        let mut m = vec![0; self.dim()];
        m[i] = 1;
        self.derivative(&m, idx)
    }

    pub fn second(&self, i: usize, idx: &[usize]) -> Result<f64> {
        let mut m = vec![0; self.dim()];
        m[i] = 2;
        self.derivative(&m, idx)
    }
}
