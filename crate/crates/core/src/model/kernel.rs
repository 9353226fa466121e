use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-state kernel given by the probabilities of moving to state 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    /// K(0)(1)
    pub k0_to_1: f64,
    /// K(1)(1)
    pub k1_to_1: f64,
}

/// K(y) = rho * delta_y + (1 - rho) * q. `q` is `None` when rho = 1, where any
/// q reproduces the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelDecomposition {
    pub rho: f64,
    pub q: Option<f64>,
}

impl KernelDecomposition {
    /// q with the undetermined case resolved to 1/2.
    pub fn q_or_half(&self) -> f64 {
        self.q.unwrap_or(0.5)
    }
}

/// Tolerance for kernel entries built from ratios of integers.
const KERNEL_TOL: f64 = 1e-12;

pub fn kernel_decompose(kernel: KernelSpec) -> Result<KernelDecomposition> {
    let KernelSpec { k0_to_1, k1_to_1 } = kernel;
    for (name, v) in [("K(0)(1)", k0_to_1), ("K(1)(1)", k1_to_1)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidKernel(format!("{name} = {v} is not a probability")));
        }
    }
    let rho = k1_to_1 - k0_to_1;
    if rho < -KERNEL_TOL {
        return Err(Error::KernelNotRepresentable { k0_to_1, k1_to_1 });
    }
    let rho = rho.max(0.0);
    if rho >= 1.0 - KERNEL_TOL {
        return Ok(KernelDecomposition { rho: 1.0, q: None });
    }
    let q = k0_to_1 / (1.0 - rho);
    if !(-KERNEL_TOL..=1.0 + KERNEL_TOL).contains(&q) {
        return Err(Error::InvalidKernel(format!("q = {q} outside [0, 1]")));
    }
    Ok(KernelDecomposition {
        rho,
        q: Some(q.clamp(0.0, 1.0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polya_kernel_is_flagged() {
        let d = kernel_decompose(KernelSpec { k0_to_1: 0.0, k1_to_1: 1.0 }).unwrap();
        assert_eq!(d.rho, 1.0);
        assert_eq!(d.q, None);
    }

    #[test]
    fn constant_kernel() {
        let d = kernel_decompose(KernelSpec { k0_to_1: 0.5, k1_to_1: 0.5 }).unwrap();
        assert_eq!(d.rho, 0.0);
        assert_eq!(d.q, Some(0.5));
    }

    #[test]
    fn friedman_kernel() {
        // rho + (1-rho) q = 3/4 and (1-rho) q = 1/4 give rho = 1/2, q = 1/2.
        let d = kernel_decompose(KernelSpec { k0_to_1: 0.25, k1_to_1: 0.75 }).unwrap();
        assert_relative_eq!(d.rho, 0.5);
        assert_relative_eq!(d.q.unwrap(), 0.5);
    }

    #[test]
    fn reversed_kernel_is_not_representable() {
        assert!(matches!(
            kernel_decompose(KernelSpec { k0_to_1: 0.8, k1_to_1: 0.2 }),
            Err(Error::KernelNotRepresentable { .. })
        ));
        assert!(matches!(
            kernel_decompose(KernelSpec { k0_to_1: 1.2, k1_to_1: 0.2 }),
            Err(Error::InvalidKernel(_))
        ));
    }
}
