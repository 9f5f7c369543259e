use crate::error::{Error, Result};

/// `n = (k - 1) N + j` with `1 <= j <= N`, `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexDecomposition {
    pub n: usize,
    /// Block number `k(n)`; the power applied at step `n`.
    pub k: usize,
    /// Family member `j(n)`.
    pub j: usize,
    pub family_size: usize,
}

pub fn index_decompose(n: usize, family_size: usize) -> Result<IndexDecomposition> {
    if n == 0 || family_size == 0 {
        return Err(Error::InvalidArgument(format!(
            "index decomposition needs n >= 1 and N >= 1, got n = {n}, N = {family_size}"
        )));
    }
    Ok(IndexDecomposition {
        n,
        k: (n - 1) / family_size + 1,
        j: (n - 1) % family_size + 1,
        family_size,
    })
}
