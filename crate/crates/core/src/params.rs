use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of hash functions `k` and window size `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelParams {
    k: u32,
    ell: u32,
}

impl ModelParams {
    /// Both `k` and `ℓ` must be at least 2. `ℓ = 1` is plain k-ary cuckoo
    /// hashing: the helper edges of `Ŵ` would carry weight 0 and the message
    /// system degenerates, so it is rejected here.
    pub fn new(k: u32, ell: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!("k must be at least 2, got {k}")));
        }
        if ell == 1 {
            return Err(Error::InvalidParams(
                "window size ℓ = 1 (plain k-ary cuckoo hashing) is not supported".into(),
            ));
        }
        if ell < 2 {
            return Err(Error::InvalidParams(format!("ℓ must be at least 2, got {ell}")));
        }
        if k > 64 || ell > 64 {
            return Err(Error::InvalidParams(format!("k = {k}, ℓ = {ell} out of range (max 64)")));
        }
        Ok(ModelParams { k, ell })
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn ell(&self) -> u32 {
        self.ell
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, ℓ={})", self.k, self.ell)
    }
}
