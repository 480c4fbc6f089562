use crate::error::{Error, Result};

/// Largest level count for which dense 2^n tables are representable.
pub const MAX_DENSE_N: usize = 30;

/// A point of the cube `{-1,+1}^n`, stored as a bit index.
///
/// Bit `j` (0-based, least significant first) encodes coordinate `j`:
/// a clear bit means `+1`, a set bit means `-1`. This convention is shared
/// by every module in the crate so that tables, spectra, tree prefixes and
/// coupling histories can be compared bit-exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CubePoint {
    n: usize,
    index: u32,
}

impl CubePoint {
    pub fn new(n: usize, index: u32) -> Result<Self> {
        check_n(n)?;
        if (index as u64) >= (1u64 << n) {
            return Err(Error::invalid(format!(
                "index {index} out of range for n = {n}"
            )));
        }
        Ok(CubePoint { n, index })
    }

    /// Builds a point from explicit signs, coordinate 0 first.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        check_n(signs.len())?;
        let mut index = 0u32;
        for (j, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => index |= 1 << j,
                _ => return Err(Error::invalid(format!("sign must be ±1, got {s}"))),
            }
        }
        Ok(CubePoint {
            n: signs.len(),
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    /// Sign of coordinate `j` (0-based).
    pub fn sign(&self, j: usize) -> i8 {
        debug_assert!(j < self.n);
        if self.index >> j & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.n).map(|j| self.sign(j)).collect()
    }

    /// Value of the character χ_S at this point, `S` given as a bitmask.
    pub fn character(&self, subset: u32) -> f64 {
        if (self.index & subset).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("level count n must be at least 1"));
    }
    if n > MAX_DENSE_N {
        return Err(Error::ResourceLimit(format!(
            "n = {n} exceeds the dense-table cap {MAX_DENSE_N}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_inputs() {
        assert!(CubePoint::new(0, 0).is_err());
        assert!(CubePoint::new(3, 8).is_err());
        assert!(CubePoint::new(31, 0).is_err());
        assert!(CubePoint::from_signs(&[1, 0, -1]).is_err());
    }

    #[test]
    fn sign_convention() {
        // index 0 is the all-plus corner
        let p = CubePoint::new(3, 0).unwrap();
        assert_eq!(p.signs(), vec![1, 1, 1]);
        // bit 1 set means coordinate 1 is -1
        let q = CubePoint::new(3, 0b010).unwrap();
        assert_eq!(q.signs(), vec![1, -1, 1]);
    }

    proptest! {
        #[test]
        fn encode_decode_roundtrip(n in 1usize..=12, seed in any::<u64>()) {
            let index = (seed % (1u64 << n)) as u32;
            let p = CubePoint::new(n, index).unwrap();
            let back = CubePoint::from_signs(&p.signs()).unwrap();
            prop_assert_eq!(p, back);
        }
    }
}
