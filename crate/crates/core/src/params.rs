use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Node counts and dimension shared by one simulation.
///
/// `n` nodes, at most `t` Byzantine, `f` actually Byzantine, `d` coordinates.
/// Construction enforces `f <= t` and `3t < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemParams {
    pub n: usize,
    pub t: usize,
    pub f: usize,
    pub d: usize,
}

impl SystemParams {
    pub fn new(n: usize, t: usize, f: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        if f > t {
            return Err(Error::InvalidParams(format!("f = {f} exceeds t = {t}")));
        }
        if 3 * t >= n {
            return Err(Error::InvalidParams(format!("resilience requires 3t < n (n = {n}, t = {t})")));
        }
        Ok(SystemParams { n, t, f, d })
    }

    /// Number of honest nodes, `n − f`.
    pub fn honest(&self) -> usize {
        self.n - self.f
    }

    /// Size of every trusted subset, `n − t`.
    pub fn quorum(&self) -> usize {
        self.n - self.t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_resilience() {
        assert!(SystemParams::new(10, 3, 3, 2).is_ok());
        assert!(SystemParams::new(9, 3, 0, 2).is_err());
        assert!(SystemParams::new(10, 1, 2, 2).is_err());
        assert!(SystemParams::new(10, 1, 1, 0).is_err());
        assert!(SystemParams::new(1, 0, 0, 1).is_ok());
        let p = SystemParams::new(10, 2, 1, 3).unwrap();
        assert_eq!((p.honest(), p.quorum()), (9, 8));
    }
}
