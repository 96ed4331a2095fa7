use crate::error::{Error, Result};

/// `floor_p(n)`, `ceil_p(n)` on the grid of prefix sums of `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridGap {
    pub floor: u64,
    pub ceil: u64,
    /// `ceil - floor`, either 0 or the length `p_l` of the straddling step.
    pub gap: u64,
}

/// Locates `n` on the grid `0 = pbar_0 < pbar_1 < ...` with
/// `pbar_k = p_0 + ... + p_{k-1}`.
pub fn grid_gap(p: &[u64], n: u64) -> Result<GridGap> {
    if p.contains(&0) {
        return Err(Error::usage("grid steps must be at least 1"));
    }
    let mut lo = 0u64;
    for &step in p {
        if lo == n {
            return Ok(GridGap {
                floor: n,
                ceil: n,
                gap: 0,
            });
        }
        let hi = lo + step;
        if hi > n {
            return Ok(GridGap {
                floor: lo,
                ceil: hi,
                gap: step,
            });
        }
        lo = hi;
    }
    if lo == n {
        return Ok(GridGap {
            floor: n,
            ceil: n,
            gap: 0,
        });
    }
    Err(Error::range(format!(
        "steps sum to {lo}, which does not reach {n}"
    )))
}
