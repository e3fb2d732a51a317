//! Small dense complex linear-algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

/// Kronecker product with the first factor as the slow (block) index.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint()
}

/// Entrywise complex conjugate.
pub fn conj(a: &CMat) -> CMat {
    a.map(|z| z.conj())
}

pub fn frob(a: &CMat) -> f64 {
    a.norm()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// `‖a − b‖_F / ‖b‖_F`, falling back to the absolute error when `b` vanishes.
pub fn rel_frob(a: &CMat, b: &CMat) -> f64 {
    let d = frob(&(a - b));
    let s = frob(b);
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

pub fn rel_scalar(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if b.abs() > 0.0 {
        d / b.abs()
    } else {
        d
    }
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// `Tr(AB)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    assert_eq!(a.ncols(), b.nrows());
    assert_eq!(a.nrows(), b.ncols());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * c(0.5, 0.0)
}

pub fn anti_hermitian_part(a: &CMat) -> CMat {
    (a - a.adjoint()) * c(0.5, 0.0)
}

/// `‖a − a*‖ / ‖a‖` (absolute when `a` vanishes).
pub fn self_adjoint_defect(a: &CMat) -> f64 {
    let d = frob(&(a - a.adjoint()));
    let s = frob(a);
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

pub fn remove_trace(a: &CMat) -> CMat {
    let n = a.nrows();
    let t = a.trace() / c(n as f64, 0.0);
    a - eye(n) * t
}

/// Column-major vectorization.
pub fn vec_of(a: &CMat) -> DVector<C64> {
    DVector::from_column_slice(a.as_slice())
}

pub fn unvec(v: &DVector<C64>, m: usize) -> CMat {
    assert_eq!(v.len(), m * m);
    CMat::from_column_slice(m, m, v.as_slice())
}

/// Permutation `P` with `P vec(T) = vec(Tᵀ)` on `m × m` matrices.
pub fn transpose_permutation(m: usize) -> CMat {
    let mut p = zeros(m * m);
    for i in 0..m {
        for j in 0..m {
            // vec index of (i,j) is i + j m; of the transposed entry j + i m
            p[(j + i * m, i + j * m)] = ONE;
        }
    }
    p
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, std: f64) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(std * re, std * im)
    })
}

/// Gaussian entries of the given standard deviation, Hermitized as `(M + M*)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, std: f64) -> CMat {
    hermitian_part(&gaussian_matrix(rng, n, n, std))
}

/// Haar unitary from the QR factorization of a complex Ginibre matrix,
/// with the phases of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = gaussian_matrix(rng, n, n, std::f64::consts::FRAC_1_SQRT_2);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let h = hermitian_part(a);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

pub fn pauli() -> [CMat; 4] {
    let s0 = eye(2);
    let s1 = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let s2 = CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
    let s3 = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    [s0, s1, s2, s3]
}

/// `Tr_V` of an operator on `V ⊗ W` with `dim V = v` (spinor index slow).
pub fn partial_trace_first(a: &CMat, v: usize) -> CMat {
    let w = a.nrows() / v;
    let mut out = zeros(w);
    for k in 0..v {
        out += a.view((k * w, k * w), (w, w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn transpose_permutation_transposes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = gaussian_matrix(&mut rng, 3, 3, 1.0);
        let p = transpose_permutation(3);
        let lhs = unvec(&(&p * vec_of(&t)), 3);
        assert_eq!(lhs, t.transpose());
        assert_eq!(&p * &p, eye(9));
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = haar_unitary(&mut rng, 5);
        assert!(max_abs_diff(&(u.adjoint() * &u), &eye(5)) < 1e-12);
    }

    #[test]
    fn trace_product_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = gaussian_matrix(&mut rng, 4, 4, 1.0);
        let b = gaussian_matrix(&mut rng, 4, 4, 1.0);
        assert!((trace_product(&a, &b) - (&a * &b).trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = gaussian_matrix(&mut rng, 2, 2, 1.0);
        let b = gaussian_matrix(&mut rng, 3, 3, 1.0);
        let pt = partial_trace_first(&kron(&a, &b), 2);
        assert!(max_abs_diff(&pt, &(&b * a.trace())) < 1e-12);
    }

    #[test]
    fn hermitian_eigenvalues_of_diagonal() {
        let d = CMat::from_diagonal(&DVector::from_vec(vec![c(2.0, 0.0), c(-1.0, 0.0), c(0.5, 0.0)]));
        assert_eq!(hermitian_eigenvalues(&d), vec![-1.0, 0.5, 2.0]);
    }
}
