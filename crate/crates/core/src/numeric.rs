//! Small numeric helpers shared by the verification drivers.

use crate::scalar::Scalar;

/// Euclidean norm of a coefficient slice.
pub(crate) fn euclid_norm<T: Scalar>(v: &[T]) -> T {
    let mut acc = T::zero();
    for &c in v {
        acc = acc + c * c;
    }
    acc.sqrt()
}
