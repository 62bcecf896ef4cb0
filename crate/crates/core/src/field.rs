//! Arithmetic in GF(p) and GF(2^k).
//!
//! Elements are identified with indices in `[0, q)`: the residue itself for
//! prime fields, the coefficient bitmask of the polynomial representative for
//! binary fields.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 20;
pub const MAX_BINARY_DEGREE: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field order {0} exceeds the supported maximum 2^20")]
    TooLarge(u64),
    #[error("binary field degree must be in 1..=20, got {0}")]
    BadDegree(u32),
    #[error("modulus {modulus:#x} does not have degree {degree}")]
    ModulusDegree { degree: u32, modulus: u32 },
    #[error("modulus {0:#x} is reducible")]
    Reducible(u32),
    #[error("no supported field has order {0}")]
    UnsupportedOrder(u32),
    #[error("index {index} out of range for a field of order {q}")]
    OutOfRange { index: u32, q: u32 },
    #[error("operands belong to different fields ({0} vs {1})")]
    Mismatch(FieldDescriptor, FieldDescriptor),
    #[error(
        "invalid field descriptor {0:?}; expected \"p:<prime>\" or \"b:<degree>:<hex modulus>\""
    )]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Prime { p: u32 },
    Binary { degree: u32, modulus: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    kind: FieldKind,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    (2..)
        .take_while(|d| d * d <= n)
        .all(|d| !n.is_multiple_of(d))
}

fn poly_degree(p: u64) -> u32 {
    63 - p.leading_zeros()
}

/// Remainder of polynomial `a` modulo `m` over GF(2).
fn poly_rem(mut a: u64, m: u64) -> u64 {
    let dm = poly_degree(m);
    while a != 0 && poly_degree(a) >= dm {
        a ^= m << (poly_degree(a) - dm);
    }
    a
}

/// Irreducible iff no polynomial of degree `1..=degree/2` divides it.
fn is_irreducible(modulus: u32, degree: u32) -> bool {
    (2u64..1 << (degree / 2 + 1)).all(|f| poly_rem(modulus as u64, f) != 0)
}

impl FieldDescriptor {
    pub fn prime(p: u32) -> Result<Self, FieldError> {
        if p > MAX_ORDER {
            return Err(FieldError::TooLarge(p as u64));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self {
            kind: FieldKind::Prime { p },
        })
    }

    /// GF(2^degree) reduced by the lexicographically smallest irreducible
    /// polynomial of that degree.
    pub fn binary(degree: u32) -> Result<Self, FieldError> {
        if degree == 0 || degree > MAX_BINARY_DEGREE {
            return Err(FieldError::BadDegree(degree));
        }
        let modulus = (1u32 << degree..1u32 << (degree + 1))
            .find(|&m| is_irreducible(m, degree))
            .expect("irreducible polynomials exist in every degree");
        Ok(Self {
            kind: FieldKind::Binary { degree, modulus },
        })
    }

    pub fn binary_with_modulus(degree: u32, modulus: u32) -> Result<Self, FieldError> {
        if degree == 0 || degree > MAX_BINARY_DEGREE {
            return Err(FieldError::BadDegree(degree));
        }
        if modulus == 0 || poly_degree(modulus as u64) != degree {
            return Err(FieldError::ModulusDegree { degree, modulus });
        }
        if !is_irreducible(modulus, degree) {
            return Err(FieldError::Reducible(modulus));
        }
        Ok(Self {
            kind: FieldKind::Binary { degree, modulus },
        })
    }

    /// Prime field for prime `q`, default binary field for `q = 2^k`.
    pub fn for_order(q: u32) -> Result<Self, FieldError> {
        if q > MAX_ORDER {
            return Err(FieldError::TooLarge(q as u64));
        }
        if is_prime(q) {
            Self::prime(q)
        } else if q.is_power_of_two() && q > 1 {
            Self::binary(q.trailing_zeros())
        } else {
            Err(FieldError::UnsupportedOrder(q))
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn order(&self) -> u32 {
        match self.kind {
            FieldKind::Prime { p } => p,
            FieldKind::Binary { degree, .. } => 1 << degree,
        }
    }

    pub fn element(&self, index: u32) -> Result<FieldElement<'_>, FieldError> {
        let q = self.order();
        if index >= q {
            return Err(FieldError::OutOfRange { index, q });
        }
        Ok(FieldElement { field: self, index })
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement<'_>> + '_ {
        (0..self.order()).map(move |index| FieldElement { field: self, index })
    }

    pub fn zero(&self) -> FieldElement<'_> {
        FieldElement {
            field: self,
            index: 0,
        }
    }

    pub fn one(&self) -> FieldElement<'_> {
        FieldElement {
            field: self,
            index: 1,
        }
    }

    // Index-level arithmetic. Callers guarantee operands are below `order()`.

    pub fn add_index(&self, u: u32, v: u32) -> u32 {
        match self.kind {
            FieldKind::Prime { p } => ((u as u64 + v as u64) % p as u64) as u32,
            FieldKind::Binary { .. } => u ^ v,
        }
    }

    pub fn neg_index(&self, u: u32) -> u32 {
        match self.kind {
            FieldKind::Prime { p } => (p - u) % p,
            FieldKind::Binary { .. } => u,
        }
    }

    pub fn sub_index(&self, u: u32, v: u32) -> u32 {
        self.add_index(u, self.neg_index(v))
    }

    pub fn mul_index(&self, u: u32, v: u32) -> u32 {
        match self.kind {
            FieldKind::Prime { p } => ((u as u64 * v as u64) % p as u64) as u32,
            FieldKind::Binary { modulus, .. } => {
                let (a, b) = (u as u64, v as u64);
                let mut product = 0u64;
                for bit in 0..32 {
                    if b >> bit & 1 == 1 {
                        product ^= a << bit;
                    }
                }
                poly_rem(product, modulus as u64) as u32
            }
        }
    }

    /// `a·x² + b·x + c` on indices.
    pub fn eval_quadratic_index(&self, a: u32, b: u32, c: u32, x: u32) -> u32 {
        let ax = self.mul_index(a, x);
        let axx_bx = self.mul_index(self.add_index(ax, b), x);
        self.add_index(axx_bx, c)
    }

    pub fn inverse_index(&self, u: u32) -> Option<u32> {
        if u == 0 {
            return None;
        }
        // u^(q-2) by square-and-multiply.
        let mut exp = self.order() - 2;
        let (mut base, mut acc) = (u, 1);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_index(acc, base);
            }
            base = self.mul_index(base, base);
            exp >>= 1;
        }
        Some(acc)
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Prime { p } => write!(f, "p:{p}"),
            FieldKind::Binary { degree, modulus } => write!(f, "b:{degree}:{modulus:#X}"),
        }
    }
}

impl FromStr for FieldDescriptor {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::Parse(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["p", p] => Self::prime(p.parse().map_err(|_| bad())?),
            ["b", degree] => Self::binary(degree.parse().map_err(|_| bad())?),
            ["b", degree, modulus] => {
                let hex = modulus
                    .strip_prefix("0x")
                    .or_else(|| modulus.strip_prefix("0X"))
                    .ok_or_else(bad)?;
                let modulus = u32::from_str_radix(hex, 16).map_err(|_| bad())?;
                Self::binary_with_modulus(degree.parse().map_err(|_| bad())?, modulus)
            }
            _ => Err(bad()),
        }
    }
}

/// An element of a particular field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement<'f> {
    field: &'f FieldDescriptor,
    index: u32,
}

impl<'f> FieldElement<'f> {
    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn field(&self) -> &'f FieldDescriptor {
        self.field
    }

    fn same_field(&self, other: &FieldElement<'_>) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::Mismatch(*self.field, *other.field))
        }
    }

    fn with(&self, index: u32) -> Self {
        FieldElement {
            field: self.field,
            index,
        }
    }

    pub fn add(&self, rhs: &FieldElement<'_>) -> Result<Self, FieldError> {
        self.same_field(rhs)?;
        Ok(self.with(self.field.add_index(self.index, rhs.index)))
    }

    pub fn sub(&self, rhs: &FieldElement<'_>) -> Result<Self, FieldError> {
        self.same_field(rhs)?;
        Ok(self.with(self.field.sub_index(self.index, rhs.index)))
    }

    pub fn mul(&self, rhs: &FieldElement<'_>) -> Result<Self, FieldError> {
        self.same_field(rhs)?;
        Ok(self.with(self.field.mul_index(self.index, rhs.index)))
    }

    pub fn neg(&self) -> Self {
        self.with(self.field.neg_index(self.index))
    }

    pub fn inverse(&self) -> Option<Self> {
        self.field.inverse_index(self.index).map(|i| self.with(i))
    }

    pub fn is_zero(&self) -> bool {
        self.index == 0
    }
}

impl fmt::Display for FieldElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.field.kind {
            FieldKind::Prime { .. } => write!(f, "{}", self.index),
            FieldKind::Binary { .. } => {
                if self.index == 0 {
                    return write!(f, "0");
                }
                let terms: Vec<String> = (0..32)
                    .rev()
                    .filter(|bit| self.index >> bit & 1 == 1)
                    .map(|bit| match bit {
                        0 => "1".to_string(),
                        1 => "x".to_string(),
                        _ => format!("x^{bit}"),
                    })
                    .collect();
                write!(f, "{}", terms.join("+"))
            }
        }
    }
}

pub fn ff_add<'f>(
    u: &FieldElement<'f>,
    v: &FieldElement<'_>,
) -> Result<FieldElement<'f>, FieldError> {
    u.add(v)
}

pub fn ff_mul<'f>(
    u: &FieldElement<'f>,
    v: &FieldElement<'_>,
) -> Result<FieldElement<'f>, FieldError> {
    u.mul(v)
}

/// `a·x² + b·x + c`.
pub fn eval_quadratic<'f>(
    a: &FieldElement<'f>,
    b: &FieldElement<'_>,
    c: &FieldElement<'_>,
    x: &FieldElement<'_>,
) -> Result<FieldElement<'f>, FieldError> {
    a.same_field(b)?;
    a.same_field(c)?;
    a.same_field(x)?;
    Ok(a.with(
        a.field
            .eval_quadratic_index(a.index, b.index, c.index, x.index),
    ))
}
