//! Operators on the matrix space `M_m`, realized on column-stacked
//! matrices: `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{c, eye, trace_product, unvec, vec_of, zeros, CMat, C64};

pub use crate::linalg::kron;

#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp {
    /// Side dimension: the operator acts on `m × m` matrices.
    pub m: usize,
    /// `m² × m²` matrix acting on `vec(T)`.
    pub rep: CMat,
}

fn square(k: &CMat) -> Result<usize> {
    if k.nrows() != k.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            k.nrows(),
            k.ncols()
        )));
    }
    Ok(k.nrows())
}

impl SuperOp {
    pub fn from_rep(m: usize, rep: CMat) -> Result<Self> {
        if rep.nrows() != m * m || rep.ncols() != m * m {
            return Err(Error::DimensionMismatch(format!(
                "rep of size {}x{} for side dimension {m}",
                rep.nrows(),
                rep.ncols()
            )));
        }
        Ok(SuperOp { m, rep })
    }

    pub fn identity(m: usize) -> Self {
        SuperOp { m, rep: eye(m * m) }
    }

    pub fn zero(m: usize) -> Self {
        SuperOp { m, rep: zeros(m * m) }
    }

    /// `T ↦ K T`
    pub fn left(k: &CMat) -> Result<Self> {
        let m = square(k)?;
        Ok(SuperOp { m, rep: kron(&eye(m), k) })
    }

    /// `T ↦ T K`
    pub fn right(k: &CMat) -> Result<Self> {
        let m = square(k)?;
        Ok(SuperOp { m, rep: kron(&k.transpose(), &eye(m)) })
    }

    /// `{K, ·}_e = Left(K) + e·Right(K)`: the commutator for `e = −1`,
    /// the anticommutator for `e = +1`.
    pub fn gen_comm(k: &CMat, e: i32) -> Result<Self> {
        let m = square(k)?;
        let rep = kron(&eye(m), k) + kron(&k.transpose(), &eye(m)) * c(e as f64, 0.0);
        Ok(SuperOp { m, rep })
    }

    fn same(&self, other: &SuperOp) -> Result<()> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch(format!(
                "superoperators on M_{} and M_{}",
                self.m, other.m
            )));
        }
        Ok(())
    }

    pub fn checked_compose(&self, other: &SuperOp) -> Result<Self> {
        self.same(other)?;
        Ok(SuperOp { m: self.m, rep: &self.rep * &other.rep })
    }

    pub fn checked_add(&self, other: &SuperOp) -> Result<Self> {
        self.same(other)?;
        Ok(SuperOp { m: self.m, rep: &self.rep + &other.rep })
    }

    pub fn checked_sub(&self, other: &SuperOp) -> Result<Self> {
        self.same(other)?;
        Ok(SuperOp { m: self.m, rep: &self.rep - &other.rep })
    }

    pub fn scale(&self, z: C64) -> Self {
        SuperOp { m: self.m, rep: &self.rep * z }
    }

    pub fn power(&self, k: u32) -> Self {
        let mut out = SuperOp::identity(self.m);
        for _ in 0..k {
            out.rep = &out.rep * &self.rep;
        }
        out
    }

    /// Adjoint under the Hilbert-Schmidt product `⟨T, W⟩ = Tr(T* W)`.
    /// Column stacking is an isometry, so this is the conjugate transpose of `rep`.
    pub fn adjoint(&self) -> Self {
        SuperOp { m: self.m, rep: self.rep.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.rep.trace()
    }

    pub fn apply(&self, t: &CMat) -> Result<CMat> {
        if t.nrows() != self.m || t.ncols() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "applying a superoperator on M_{} to a {}x{} matrix",
                self.m,
                t.nrows(),
                t.ncols()
            )));
        }
        Ok(unvec(&(&self.rep * vec_of(t)), self.m))
    }

    /// `[S, T]_∘ = S∘T − T∘S`
    pub fn commutator(&self, other: &SuperOp) -> Self {
        self * other - other * self
    }

    /// `{S, T}_∘ = S∘T + T∘S`
    pub fn anticommutator(&self, other: &SuperOp) -> Self {
        self * other + other * self
    }

    /// `Tr(S∘T)` without forming the composition.
    pub fn trace_of_product(&self, other: &SuperOp) -> C64 {
        assert_eq!(self.m, other.m, "trace_of_product: side dimension mismatch");
        trace_product(&self.rep, &other.rep)
    }
}

// Operator sugar panics on mismatched side dimensions, like nalgebra's own
// arithmetic; the `checked_*` methods return errors instead.

impl<'a> Add<&'a SuperOp> for &'a SuperOp {
    type Output = SuperOp;
    fn add(self, rhs: &SuperOp) -> SuperOp {
        self.checked_add(rhs).expect("SuperOp + SuperOp")
    }
}

impl<'a> Sub<&'a SuperOp> for &'a SuperOp {
    type Output = SuperOp;
    fn sub(self, rhs: &SuperOp) -> SuperOp {
        self.checked_sub(rhs).expect("SuperOp - SuperOp")
    }
}

impl<'a> Mul<&'a SuperOp> for &'a SuperOp {
    type Output = SuperOp;
    fn mul(self, rhs: &SuperOp) -> SuperOp {
        self.checked_compose(rhs).expect("SuperOp * SuperOp")
    }
}

impl Add for SuperOp {
    type Output = SuperOp;
    fn add(self, rhs: SuperOp) -> SuperOp {
        &self + &rhs
    }
}

impl Sub for SuperOp {
    type Output = SuperOp;
    fn sub(self, rhs: SuperOp) -> SuperOp {
        &self - &rhs
    }
}

impl Mul<f64> for &SuperOp {
    type Output = SuperOp;
    fn mul(self, rhs: f64) -> SuperOp {
        self.scale(c(rhs, 0.0))
    }
}

impl Neg for &SuperOp {
    type Output = SuperOp;
    fn neg(self) -> SuperOp {
        self.scale(c(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{anti_hermitian_part, gaussian_matrix, max_abs, max_abs_diff, random_hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(s: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(s)
    }

    #[test]
    fn identity_from_unit() {
        assert_eq!(SuperOp::left(&eye(3)).unwrap(), SuperOp::identity(3));
        assert_eq!(SuperOp::right(&eye(3)).unwrap(), SuperOp::identity(3));
    }

    #[test]
    fn left_right_sandwich() {
        let mut r = rng(1);
        let k = gaussian_matrix(&mut r, 3, 3, 1.0);
        let t = gaussian_matrix(&mut r, 3, 3, 1.0);
        let s = &SuperOp::left(&k).unwrap() * &SuperOp::right(&k).unwrap();
        assert!(max_abs_diff(&s.apply(&t).unwrap(), &(&k * &t * &k)) < 1e-12);
    }

    #[test]
    fn left_trace() {
        let mut r = rng(2);
        let k = gaussian_matrix(&mut r, 3, 3, 1.0);
        let l = SuperOp::left(&k).unwrap();
        assert!((l.trace() - k.trace() * c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_square() {
        let k = CMat::zeros(2, 3);
        assert!(matches!(SuperOp::left(&k), Err(Error::DimensionMismatch(_))));
        assert!(matches!(SuperOp::gen_comm(&k, 1), Err(Error::DimensionMismatch(_))));
        let a = SuperOp::identity(2);
        let b = SuperOp::identity(3);
        assert!(a.checked_compose(&b).is_err());
        assert!(a.apply(&eye(3)).is_err());
    }

    #[test]
    fn gen_comm_of_unit() {
        assert_eq!(SuperOp::gen_comm(&eye(3), -1).unwrap(), SuperOp::zero(3));
        assert_eq!(SuperOp::gen_comm(&eye(3), 1).unwrap(), SuperOp::identity(3).scale(c(2.0, 0.0)));
    }

    #[test]
    fn adjoint_rule_for_gen_comm() {
        // adjoint({K,·}_e) = {K*,·}_e; an anti-Hermitian K with e = −1 gives an
        // anti-self-adjoint operator, a Hermitian K with e = +1 a self-adjoint one.
        let mut r = rng(3);
        let h = random_hermitian(&mut r, 3, 1.0);
        let l = anti_hermitian_part(&gaussian_matrix(&mut r, 3, 3, 1.0));
        let sl = SuperOp::gen_comm(&l, -1).unwrap();
        assert!(max_abs(&(sl.adjoint().rep + &sl.rep)) < 1e-12);
        let sh = SuperOp::gen_comm(&h, 1).unwrap();
        assert!(max_abs_diff(&sh.adjoint().rep, &sh.rep) < 1e-12);
        let k = gaussian_matrix(&mut r, 3, 3, 1.0);
        for e in [-1, 1] {
            let lhs = SuperOp::gen_comm(&k, e).unwrap().adjoint();
            let rhs = SuperOp::gen_comm(&k.adjoint(), e).unwrap();
            assert!(max_abs_diff(&lhs.rep, &rhs.rep) < 1e-12);
        }
    }

    #[test]
    fn power_and_trace_of_products() {
        assert_eq!(SuperOp::identity(2).power(5), SuperOp::identity(2));
        let mut r = rng(4);
        let a = gaussian_matrix(&mut r, 3, 3, 1.0);
        let b = gaussian_matrix(&mut r, 3, 3, 1.0);
        let la = SuperOp::left(&a).unwrap();
        let lb = SuperOp::left(&b).unwrap();
        let expected = (&a * &b).trace() * c(3.0, 0.0);
        assert!(((&la * &lb).trace() - expected).norm() < 1e-11);
        assert!((la.trace_of_product(&lb) - expected).norm() < 1e-11);
        let p = la.power(3);
        assert!(max_abs_diff(&p.rep, &SuperOp::left(&(&a * &a * &a)).unwrap().rep) < 1e-10);
    }

    #[test]
    fn kron_mixed_product() {
        let mut r = rng(5);
        let a = gaussian_matrix(&mut r, 2, 2, 1.0);
        let b = gaussian_matrix(&mut r, 3, 3, 1.0);
        let cc = gaussian_matrix(&mut r, 2, 2, 1.0);
        let d = gaussian_matrix(&mut r, 3, 3, 1.0);
        let lhs = kron(&a, &b) * kron(&cc, &d);
        let rhs = kron(&(&a * &cc), &(&b * &d));
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        assert_eq!(kron(&eye(2), &eye(3)), eye(6));
        assert!((kron(&a, &b).trace() - a.trace() * b.trace()).norm() < 1e-12);
    }
}
