//! Realizing a divisor chain as the identity procreation behavior of a
//! nilpotent endomorphism of an abelian group.
//!
//! Given `a_1, ..., a_n` with each term dividing the previous one, take
//! `G = Z/a_1 x ... x Z/a_n` with generators `x_i` and set `phi(x_1) = 0`,
//! `phi(x_{i+1}) = (a_i / a_{i+1}) x_i`. Then `ker^(k)` is spanned by
//! `x_1, ..., x_k`, so the identity behaves exactly like the chain.

use crate::dynamics::Fdg;
use crate::error::{Error, Result};
use crate::group::{AbelianGroup, MatrixEndomorphism};

/// A sequence in which every term divides its predecessor, with trailing 1s
/// removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DivisorChain(Vec<u64>);

impl DivisorChain {
    pub fn new(seq: Vec<u64>) -> Result<Self> {
        if seq.iter().any(|&a| a == 0) {
            return Err(Error::Zero);
        }
        if let Some(i) = seq.windows(2).position(|w| w[0] % w[1] != 0) {
            return Err(Error::DivisibilityViolation(i + 1));
        }
        let mut seq = seq;
        while seq.last() == Some(&1) {
            seq.pop();
        }
        Ok(DivisorChain(seq))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn validate_divisor_chain(seq: Vec<u64>) -> Result<DivisorChain> {
    DivisorChain::new(seq)
}

/// The endomorphism matrix realizing `chain`: `a_i / a_{i+1}` in row `i`,
/// column `i + 1`, zeros elsewhere.
pub fn realizing_endomorphism(chain: &DivisorChain) -> Result<MatrixEndomorphism> {
    let a = chain.as_slice();
    if a.is_empty() {
        return MatrixEndomorphism::new(AbelianGroup::new(vec![1])?, vec![vec![0]]);
    }
    let r = a.len();
    let mut entries = vec![vec![0i64; r]; r];
    for i in 0..r - 1 {
        entries[i][i + 1] = (a[i] / a[i + 1]) as i64;
    }
    MatrixEndomorphism::new(AbelianGroup::new(a.to_vec())?, entries)
}

pub fn realize(chain: &DivisorChain) -> Result<Fdg> {
    Ok(Fdg::from_matrix(realizing_endomorphism(chain)?))
}
