//! Step-size and averaging schedules.

use crate::error::{Error, Result};

pub const DEFAULT_SHIFT: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Schedule {
    /// Averaging weight `2 / (k + s)^{2/3}`.
    RhoVr { shift: f64 },
    /// Convex Frank-Wolfe step `1 / (k + s)`.
    EtaConvex { shift: f64 },
    /// Constant submodular step `1 / K`.
    EtaSubmodular,
    /// Projected gradient step `c / √k`, capped at 1.
    EtaProjectedGradient { scale: f64 },
    /// `ρ ≡ 1`: the averager keeps only the latest sample.
    Unit,
}

impl Schedule {
    pub const fn rho_vr() -> Self {
        Schedule::RhoVr {
            shift: DEFAULT_SHIFT,
        }
    }

    pub const fn eta_convex() -> Self {
        Schedule::EtaConvex {
            shift: DEFAULT_SHIFT,
        }
    }

    /// Value at step `k` (1-based) for a run of `horizon` steps.
    pub fn value(&self, k: usize, horizon: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::invalid("schedule index must be positive"));
        }
        let kf = k as f64;
        let v = match *self {
            Schedule::RhoVr { shift } => 2.0 / (kf + shift).powf(2.0 / 3.0),
            Schedule::EtaConvex { shift } => 1.0 / (kf + shift),
            Schedule::EtaSubmodular => {
                if horizon == 0 {
                    return Err(Error::invalid("horizon must be positive"));
                }
                1.0 / horizon as f64
            }
            Schedule::EtaProjectedGradient { scale } => {
                if !(scale > 0.0) {
                    return Err(Error::invalid("projected gradient scale must be positive"));
                }
                (scale / kf.sqrt()).min(1.0)
            }
            Schedule::Unit => 1.0,
        };
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_at_one() {
        let v = Schedule::rho_vr().value(1, 1).unwrap();
        // 2 / 4^{2/3} = 2^{-1/3}
        assert!((v - 0.793_700_525_984_099_7).abs() < 1e-12);
    }

    #[test]
    fn constant_and_convex_steps() {
        assert_eq!(Schedule::EtaSubmodular.value(7, 10).unwrap(), 0.1);
        assert_eq!(Schedule::eta_convex().value(1, 1).unwrap(), 0.25);
        assert_eq!(Schedule::Unit.value(9, 1).unwrap(), 1.0);
    }

    #[test]
    fn projected_gradient_step() {
        let s = Schedule::EtaProjectedGradient { scale: 0.5 };
        assert!((s.value(4, 1).unwrap() - 0.25).abs() < 1e-15);
        let big = Schedule::EtaProjectedGradient { scale: 3.0 };
        assert_eq!(big.value(1, 1).unwrap(), 1.0);
    }

    #[test]
    fn rejects_zero_index_and_horizon() {
        assert!(Schedule::rho_vr().value(0, 5).is_err());
        assert!(Schedule::EtaSubmodular.value(1, 0).is_err());
    }

    #[test]
    fn positive_and_nonincreasing() {
        for s in [Schedule::rho_vr(), Schedule::eta_convex()] {
            let mut prev = f64::INFINITY;
            for k in (1..=1_000_000).step_by(997) {
                let v = s.value(k, 1).unwrap();
                assert!(v > 0.0 && v <= 1.0);
                assert!(v <= prev);
                prev = v;
            }
        }
    }
}
