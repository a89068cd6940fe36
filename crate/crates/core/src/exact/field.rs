//! Abstract field interface shared by the cyclotomic field K and the
//! residue fields kappa_p, so that series and subspace code runs over
//! either coefficient field unchanged.

use std::fmt::Debug;

/// A field of coefficients. Elements do not carry their field; every
/// operation goes through the field object (which is cheap to clone).
pub trait Field: Clone + Send + Sync + Debug + PartialEq {
    type Elem: Clone + PartialEq + Send + Sync + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// None exactly when a = 0.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// Residue characteristic (0 for characteristic zero).
    fn characteristic(&self) -> u64;

    /// Canonical enumeration of field elements, used to derandomize
    /// polynomial splitting. Finite fields enumerate coefficient vectors;
    /// the default covers prime fields and characteristic 0.
    fn nth_element(&self, n: u64) -> Self::Elem {
        self.from_i64(n as i64)
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let bi = self.inv(b).expect("division by zero");
        self.mul(a, &bi)
    }

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }

    fn sum<'a, I: Iterator<Item = &'a Self::Elem>>(&self, xs: I) -> Self::Elem
    where
        Self::Elem: 'a,
    {
        let mut acc = self.zero();
        for x in xs {
            acc = self.add(&acc, x);
        }
        acc
    }

    fn pow(&self, a: &Self::Elem, e: u64) -> Self::Elem {
        let mut result = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        result
    }
}
