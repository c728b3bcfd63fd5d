//! Closed-form critical points and the Monte Carlo experiments that
//! locate them on finite graphs.

mod experiments;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::scalar::Scalar;

pub use experiments::{
    estimate_threshold, largest_component, scaling_study, survival_from_single_source, Classifier, GraphModel,
    Probe, ProbeClass, SampledGraph, ScalingRow, ThresholdEstimate,
};

/// Root of `p c (1+p)/(1-p) = 1`, i.e. `(sqrt(c^2+6c+1) - c - 1) / (2c)`,
/// evaluated as `2 / (sqrt(c^2+6c+1) + c + 1)` to avoid cancellation.
pub fn critical_p_swg<T: Scalar>(c: T) -> Result<T> {
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::Parameter(format!("c = {c:?} must be positive")));
    }
    let one = T::one();
    let disc = c * c + T::lit(6.0) * c + one;
    Ok(T::lit(2.0) / (disc.sqrt() + c + one))
}

/// `p c (1+p)/(1-p) - 1`.
pub fn swg_residual<T: Scalar>(p: T, c: T) -> T {
    let one = T::one();
    p * c * (one + p) / (one - p) - one
}

pub fn critical_p_matching<T: Scalar>() -> T {
    T::lit(0.5)
}

/// `p ((1+p)/(1-p) - 1) - 1`.
pub fn matching_residual<T: Scalar>(p: T) -> T {
    let one = T::one();
    p * ((one + p) / (one - p) - one) - one
}

/// `1 / (d - 1)`: below it percolation on graphs of maximum degree `d`
/// leaves only logarithmic components.
pub fn critical_p_bounded_degree<T: Scalar>(d: u32) -> Result<T> {
    if d < 2 {
        return Err(Error::Parameter(format!("degree bound d = {d} must be >= 2")));
    }
    Ok(T::one() / T::from_u32(d - 1).unwrap())
}

/// `p1 + c p1 p2 + c p2 - 1`; positive above the threshold when ring
/// edges survive with `p1` and bridges with `p2`.
pub fn nonhomogeneous_criterion<T: Scalar>(p1: T, p2: T, c: T) -> Result<T> {
    check_probability("p1", p1.as_f64())?;
    check_probability("p2", p2.as_f64())?;
    if !(c > T::zero()) {
        return Err(Error::Parameter(format!("c = {c:?} must be positive")));
    }
    Ok(p1 + c * p1 * p2 + c * p2 - T::one())
}

/// Root in `p2` of the non-homogeneous criterion for fixed `p1`:
/// `(1 - p1) / (c (1 + p1))`.
pub fn nonhomogeneous_root<T: Scalar>(p1: T, c: T) -> Result<T> {
    nonhomogeneous_criterion(p1, T::zero(), c)?;
    let one = T::one();
    Ok((one - p1) / (c * (one + p1)))
}

/// Graph families with a known critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Criticality<T> {
    Cycle,
    Swg { c: T },
    Matching,
}

impl<T: Scalar> Criticality<T> {
    pub fn critical_p(&self) -> Result<T> {
        match *self {
            Criticality::Cycle => critical_p_bounded_degree(2),
            Criticality::Swg { c } => critical_p_swg(c),
            Criticality::Matching => Ok(critical_p_matching()),
        }
    }

    /// Average degree of G times the critical `p`.
    pub fn critical_r0(&self) -> Result<T> {
        let degree = match *self {
            Criticality::Cycle => T::lit(2.0),
            Criticality::Swg { c } => T::lit(2.0) + c,
            Criticality::Matching => T::lit(3.0),
        };
        Ok(degree * self.critical_p()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swg_threshold_at_one() {
        let p: f64 = critical_p_swg(1.0).unwrap();
        assert!((p - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!(swg_residual(p, 1.0).abs() < 1e-12);
        let pf: f32 = critical_p_swg(1.0f32).unwrap();
        assert!((pf - (2f32.sqrt() - 1.0)).abs() < 1e-6);
    }

    #[test]
    fn swg_threshold_matches_textbook_form() {
        for &c in &[0.01f64, 0.5, 0.7, 1.0, 3.0, 100.0] {
            let textbook = ((c * c + 6.0 * c + 1.0).sqrt() - c - 1.0) / (2.0 * c);
            let p = critical_p_swg(c).unwrap();
            assert!((p - textbook).abs() < 1e-12, "c={c}");
            assert!(swg_residual(p, c).abs() < 1e-12, "c={c}");
        }
        let p07: f64 = critical_p_swg(0.7).unwrap();
        assert!(p07 < 0.5 && (p07 - 0.4896).abs() < 1e-4);
    }

    #[test]
    fn swg_threshold_monotone_and_limits() {
        let grid: Vec<f64> = (1..200).map(|i| 0.05 * i as f64).collect();
        let ps: Vec<f64> = grid.iter().map(|&c| critical_p_swg(c).unwrap()).collect();
        assert!(ps.windows(2).all(|w| w[1] < w[0]));
        assert!(critical_p_swg(1e-9f64).unwrap() > 0.999);
        assert!(critical_p_swg(1e9f64).unwrap() < 1e-8);
        for &c in &[0.5f64, 1.0, 2.0, 4.0] {
            assert!(critical_p_swg(c).unwrap() < 1.0 / (c + 1.0));
        }
        assert!(critical_p_swg(0.0f64).is_err());
        assert!(critical_p_swg(-1.0f64).is_err());
    }

    #[test]
    fn matching_and_bounded_degree() {
        assert_eq!(critical_p_matching::<f64>(), 0.5);
        assert_eq!(matching_residual(0.5f64), 0.0);
        assert_eq!(critical_p_bounded_degree::<f64>(3).unwrap(), 0.5);
        assert_eq!(critical_p_bounded_degree::<f64>(2).unwrap(), 1.0);
        assert!((critical_p_bounded_degree::<f64>(11).unwrap() - 0.1).abs() < 1e-15);
        assert!(critical_p_bounded_degree::<f64>(1).is_err());
    }

    #[test]
    fn nonhomogeneous_examples() {
        for &c in &[0.3f64, 1.0, 2.5] {
            let p = critical_p_swg(c).unwrap();
            assert!(nonhomogeneous_criterion(p, p, c).unwrap().abs() < 1e-12);
        }
        assert_eq!(nonhomogeneous_criterion(0.0f64, 0.0, 1.0).unwrap(), -1.0);
        let root: f64 = nonhomogeneous_root(0.5, 1.0).unwrap();
        assert!((root - 1.0 / 3.0).abs() < 1e-15);
        assert!(nonhomogeneous_criterion(0.5, root, 1.0).unwrap().abs() < 1e-12);
        assert!(nonhomogeneous_criterion(1.5f64, 0.1, 1.0).is_err());
    }

    #[test]
    fn critical_r0_values() {
        assert_eq!(Criticality::<f64>::Cycle.critical_r0().unwrap(), 2.0);
        assert_eq!(Criticality::<f64>::Matching.critical_r0().unwrap(), 1.5);
        let r = Criticality::Swg { c: 1.0f64 }.critical_r0().unwrap();
        assert!((r - 3.0 * (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((r - 1.2426).abs() < 1e-4);
    }
}
