//! Automatic truncation escalation.
//!
//! Builders report [`Error::TruncationInsufficient`] when the tail of the
//! state they produced is too heavy; [`escalate`] retries on a larger
//! space until the build succeeds or the cap is reached.

use crate::error::{Error, Result};
use crate::fock::{PureState, TruncationDim};

/// Tail population tolerated in a finished state.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Largest single-mode truncation tried by escalation.
pub const SINGLE_MODE_CAP: usize = 1024;

/// Largest per-mode truncation tried by escalation in two-mode spaces.
pub const TWO_MODE_CAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    /// n → 2n.
    Double,
    /// n → ⌈1.5n⌉; used for two-mode spaces where cost grows as n⁴.
    ThreeHalves,
}

impl Growth {
    fn next(self, n: usize) -> usize {
        match self {
            Growth::Double => 2 * n,
            Growth::ThreeHalves => (3 * n).div_ceil(2),
        }
    }
}

/// Growth policy plus hard cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Escalation {
    pub growth: Growth,
    pub cap: usize,
}

impl Escalation {
    pub const SINGLE: Escalation = Escalation {
        growth: Growth::Double,
        cap: SINGLE_MODE_CAP,
    };
    pub const TWO_MODE: Escalation = Escalation {
        growth: Growth::ThreeHalves,
        cap: TWO_MODE_CAP,
    };

    /// Only the starting truncation.
    pub const FIXED: Escalation = Escalation {
        growth: Growth::Double,
        cap: 0,
    };
}

/// Runs `build` at `start`, then at larger truncations while it reports an
/// insufficient truncation. Other errors are returned immediately.
pub fn escalate<T>(
    start: TruncationDim,
    policy: Escalation,
    mut build: impl FnMut(TruncationDim) -> Result<T>,
) -> Result<(T, TruncationDim)> {
    let mut dim = start;
    loop {
        match build(dim) {
            Ok(v) => return Ok((v, dim)),
            Err(e @ Error::TruncationInsufficient { .. }) => {
                let next = policy.growth.next(dim.get()).min(policy.cap);
                if next <= dim.get() {
                    return Err(e);
                }
                dim = TruncationDim::new(next)?;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Fails with [`Error::TruncationInsufficient`] when the top levels of
/// `state` hold more than `tolerance`.
pub fn check_tail<S: PureState>(state: &S, tolerance: f64) -> Result<()> {
    let tail = state.tail_mass() / state.norm_sqr().max(f64::MIN_POSITIVE);
    if tail > tolerance {
        return Err(Error::TruncationInsufficient {
            n_max: state.n_max(),
            tail_mass: tail,
        });
    }
    Ok(())
}
