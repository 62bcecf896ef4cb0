//! Matching certificates: per-target witnesses that a sum of one element per
//! set hits the target.

use num_bigint::BigUint;
use thiserror::Error;

use crate::sets::SetFamily;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("set index {0} is out of range")]
    SetOutOfRange(usize),
    #[error("set {0} is assigned more than once")]
    DuplicateSet(usize),
    #[error("block {0} is assigned more than once")]
    DuplicateBlock(usize),
    #[error("digit {digit} is not below the radix {radix}")]
    DigitOutOfRange { digit: u64, radix: u64 },
    #[error("set {set_index} does not contain {value}")]
    NotAMember { set_index: usize, value: BigUint },
    #[error("unassigned set {0} lacks its zero element")]
    ZeroMissing(usize),
    #[error("certificate offset {certificate} differs from the family offset {family}")]
    OffsetMismatch {
        certificate: BigUint,
        family: BigUint,
    },
    #[error("assigned elements sum to {actual}, target is {expected}")]
    SumMismatch { expected: BigUint, actual: BigUint },
}

/// Block `block` contributes `digit · radix^block`, drawn from set
/// `set_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment {
    pub block: usize,
    pub digit: u64,
    pub set_index: usize,
}

/// Nonzero block digits assigned injectively to family sets. Sets without an
/// assignment contribute their (shifted) zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingCertificate {
    pub target: BigUint,
    pub offset: BigUint,
    pub radix: u64,
    pub assignments: Vec<Assignment>,
}

impl MatchingCertificate {
    /// Recomputes injectivity, membership of every contributed element, and
    /// the exact sum.
    pub fn verify(&self, family: &SetFamily) -> Result<(), CertificateError> {
        if self.offset != *family.offset() {
            return Err(CertificateError::OffsetMismatch {
                certificate: self.offset.clone(),
                family: family.offset().clone(),
            });
        }
        let n = family.n();
        let shift = family.per_set_shift();
        let radix = BigUint::from(self.radix);
        let mut set_used = vec![false; n];
        let mut blocks_seen = std::collections::HashSet::new();
        let mut total = self.offset.clone();
        for a in &self.assignments {
            if a.set_index >= n {
                return Err(CertificateError::SetOutOfRange(a.set_index));
            }
            if std::mem::replace(&mut set_used[a.set_index], true) {
                return Err(CertificateError::DuplicateSet(a.set_index));
            }
            if !blocks_seen.insert(a.block) {
                return Err(CertificateError::DuplicateBlock(a.block));
            }
            if a.digit >= self.radix {
                return Err(CertificateError::DigitOutOfRange {
                    digit: a.digit,
                    radix: self.radix,
                });
            }
            let value = BigUint::from(a.digit) * num_traits::pow(radix.clone(), a.block);
            let element = &value + &shift;
            if !family.sets()[a.set_index].contains(&element) {
                return Err(CertificateError::NotAMember {
                    set_index: a.set_index,
                    value: element,
                });
            }
            total += value;
        }
        for (j, set) in family.sets().iter().enumerate() {
            if !set_used[j] && !set.contains(&shift) {
                return Err(CertificateError::ZeroMissing(j));
            }
        }
        if total != self.target {
            return Err(CertificateError::SumMismatch {
                expected: self.target.clone(),
                actual: total,
            });
        }
        Ok(())
    }

    pub fn is_trivial(&self) -> bool {
        self.assignments.is_empty() && self.target == self.offset
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{LogSparseSet, Provenance};
    use num_traits::Zero;

    fn fam() -> SetFamily {
        let s = |xs: &[u64]| {
            LogSparseSet::new_pre_shift(xs.iter().map(|&x| BigUint::from(x)).collect(), 2).unwrap()
        };
        SetFamily::new(vec![s(&[0, 1, 8]), s(&[0, 3, 4])], Provenance::Manual).unwrap()
    }

    fn cert(target: u64, assignments: Vec<Assignment>) -> MatchingCertificate {
        MatchingCertificate {
            target: BigUint::from(target),
            offset: BigUint::zero(),
            radix: 4,
            assignments,
        }
    }

    #[test]
    fn valid_certificate() {
        let c = cert(
            11,
            vec![
                Assignment {
                    block: 0,
                    digit: 3,
                    set_index: 1,
                },
                Assignment {
                    block: 1,
                    digit: 2,
                    set_index: 0,
                },
            ],
        );
        c.verify(&fam()).unwrap();
        assert!(cert(0, vec![]).is_trivial());
        cert(0, vec![]).verify(&fam()).unwrap();
    }

    #[test]
    fn shifted_family_certificate() {
        let shifted = fam().shifted(&BigUint::from(1u32)).unwrap();
        let mut c = cert(
            13,
            vec![
                Assignment {
                    block: 1,
                    digit: 2,
                    set_index: 0,
                },
                Assignment {
                    block: 0,
                    digit: 3,
                    set_index: 1,
                },
            ],
        );
        c.offset = BigUint::from(2u32);
        c.verify(&shifted).unwrap();
    }

    #[test]
    fn rejects_bad_certificates() {
        let f = fam();
        let dup = cert(
            4,
            vec![
                Assignment {
                    block: 0,
                    digit: 1,
                    set_index: 0,
                },
                Assignment {
                    block: 0,
                    digit: 3,
                    set_index: 0,
                },
            ],
        );
        assert_eq!(dup.verify(&f), Err(CertificateError::DuplicateSet(0)));
        let missing = cert(
            2,
            vec![Assignment {
                block: 0,
                digit: 2,
                set_index: 0,
            }],
        );
        assert!(matches!(
            missing.verify(&f),
            Err(CertificateError::NotAMember { .. })
        ));
        let wrong_sum = cert(
            5,
            vec![Assignment {
                block: 0,
                digit: 1,
                set_index: 0,
            }],
        );
        assert!(matches!(
            wrong_sum.verify(&f),
            Err(CertificateError::SumMismatch { .. })
        ));
        let big_digit = cert(
            5,
            vec![Assignment {
                block: 0,
                digit: 5,
                set_index: 0,
            }],
        );
        assert!(matches!(
            big_digit.verify(&f),
            Err(CertificateError::DigitOutOfRange { .. })
        ));
    }
}
