//! Exact integers that stay in machine words until they overflow.

use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

#[derive(Clone)]
pub enum Coeff {
    Small(i64),
    Big(Box<BigInt>),
}

impl Coeff {
    pub const ZERO: Coeff = Coeff::Small(0);

    pub fn from_big(b: BigInt) -> Coeff {
        match b.to_i64() {
            Some(v) => Coeff::Small(v),
            None => Coeff::Big(Box::new(b)),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Coeff::Small(v) => BigInt::from(*v),
            Coeff::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coeff::Small(0))
    }

    pub fn add_assign(&mut self, other: &Coeff) {
        if let (Coeff::Small(a), Coeff::Small(b)) = (&*self, other) {
            if let Some(s) = a.checked_add(*b) {
                *self = Coeff::Small(s);
                return;
            }
        }
        *self = Coeff::from_big(self.to_big() + other.to_big());
    }

    pub fn sub_assign(&mut self, other: &Coeff) {
        self.add_assign(&other.neg());
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Small(v) => match v.checked_neg() {
                Some(n) => Coeff::Small(n),
                None => Coeff::from_big(-BigInt::from(*v)),
            },
            Coeff::Big(b) => Coeff::from_big(-(**b).clone()),
        }
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        if let (Coeff::Small(a), Coeff::Small(b)) = (self, other) {
            if let Some(p) = a.checked_mul(*b) {
                return Coeff::Small(p);
            }
        }
        Coeff::from_big(self.to_big() * other.to_big())
    }

    /// `self += a * b`
    pub fn add_product(&mut self, a: &Coeff, b: &Coeff) {
        if let (Coeff::Small(x), Coeff::Small(y), Coeff::Small(z)) = (&*self, a, b) {
            if let Some(s) = y.checked_mul(*z).and_then(|p| x.checked_add(p)) {
                *self = Coeff::Small(s);
                return;
            }
        }
        let p = a.mul(b);
        self.add_assign(&p);
    }
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Coeff) -> bool {
        match (self, other) {
            (Coeff::Small(a), Coeff::Small(b)) => a == b,
            (Coeff::Big(a), Coeff::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Coeff {}

impl Hash for Coeff {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Coeff::Small(v) => v.hash(state),
            Coeff::Big(b) => b.hash(state),
        }
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Small(v) => write!(f, "{v}"),
            Coeff::Big(b) => write!(f, "{b}"),
        }
    }
}

impl From<i64> for Coeff {
    fn from(v: i64) -> Coeff {
        Coeff::Small(v)
    }
}

impl Default for Coeff {
    fn default() -> Coeff {
        Coeff::ZERO
    }
}
