//! The floating-point abstraction every numeric module is written against.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign};

/// Real scalar type of the simulator: `f32` or `f64`.
///
/// Besides the usual `num-traits` arithmetic this carries the two dense
/// kernels the statevector hot path needs (a strided matrix product and a
/// real symmetric eigensolver), dispatched to precision-specific backends.
pub trait Scalar:
    Float + FloatConst + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Tolerance used when validating preconditions such as unitarity or
    /// Hermiticity of caller-supplied matrices.
    fn validation_tol() -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("f64 is representable")
    }

    #[inline]
    fn of_usize(x: usize) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("usize is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// `c = alpha * a * b + beta * c` on strided row/column layouts, with `a`
    /// of shape `m x k` and `b` of shape `k x n`.
    #[allow(clippy::too_many_arguments)]
    fn gemm(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: &[Self],
        a_strides: (isize, isize),
        b: &[Self],
        b_strides: (isize, isize),
        beta: Self,
        c: &mut [Self],
        c_strides: (isize, isize),
    );

    /// Eigendecomposition of a real symmetric `n x n` matrix stored row-major.
    ///
    /// Returns ascending eigenvalues and the eigenvector matrix, row-major,
    /// with eigenvector `j` stored in column `j`.
    fn symmetric_eigen(n: usize, a: &[Self]) -> Option<(Vec<Self>, Vec<Self>)>;
}

fn check_extent(len: usize, rows: usize, cols: usize, (rs, cs): (isize, isize)) {
    if rows == 0 || cols == 0 {
        return;
    }
    assert!(rs >= 0 && cs >= 0, "negative strides are not supported");
    let last = (rows - 1) * rs as usize + (cols - 1) * cs as usize;
    assert!(last < len, "matrix view exceeds its buffer");
}

/// Products with at most this many output columns (a handful of
/// statevectors) go to faer, which skips packing; wider ones to
/// matrixmultiply.
const THIN_COLS: usize = 32;

macro_rules! impl_scalar {
    ($t:ty, $tol:expr, $gemm:path) => {
        impl Scalar for $t {
            #[inline]
            fn validation_tol() -> Self {
                $tol
            }

            fn gemm(
                m: usize,
                k: usize,
                n: usize,
                alpha: Self,
                a: &[Self],
                a_strides: (isize, isize),
                b: &[Self],
                b_strides: (isize, isize),
                beta: Self,
                c: &mut [Self],
                c_strides: (isize, isize),
            ) {
                check_extent(a.len(), m, k, a_strides);
                check_extent(b.len(), k, n, b_strides);
                check_extent(c.len(), m, n, c_strides);
                if m == 0 || n == 0 {
                    return;
                }
                if n <= THIN_COLS && k > 0 {
                    if beta != 0.0 && beta != 1.0 {
                        for i in 0..m {
                            for j in 0..n {
                                c[i * c_strides.0 as usize + j * c_strides.1 as usize] *= beta;
                            }
                        }
                    }
                    // SAFETY: as below; faer reads and writes the same
                    // bounds-checked strided views.
                    unsafe {
                        let a = faer::MatRef::from_raw_parts(a.as_ptr(), m, k, a_strides.0, a_strides.1);
                        let b = faer::MatRef::from_raw_parts(b.as_ptr(), k, n, b_strides.0, b_strides.1);
                        let out = faer::MatMut::from_raw_parts_mut(c.as_mut_ptr(), m, n, c_strides.0, c_strides.1);
                        let accum = if beta == 0.0 { faer::Accum::Replace } else { faer::Accum::Add };
                        faer::linalg::matmul::matmul(out, accum, a, b, alpha, faer::Par::Seq);
                    }
                    return;
                }
                // SAFETY: every index reachable through the given shapes and
                // strides was bounds-checked against the slices above.
                unsafe {
                    $gemm(
                        m,
                        k,
                        n,
                        alpha,
                        a.as_ptr(),
                        a_strides.0,
                        a_strides.1,
                        b.as_ptr(),
                        b_strides.0,
                        b_strides.1,
                        beta,
                        c.as_mut_ptr(),
                        c_strides.0,
                        c_strides.1,
                    );
                }
            }

            fn symmetric_eigen(n: usize, a: &[Self]) -> Option<(Vec<Self>, Vec<Self>)> {
                assert_eq!(a.len(), n * n);
                if n == 0 {
                    return Some((Vec::new(), Vec::new()));
                }
                let mat = faer::Mat::<$t>::from_fn(n, n, |i, j| a[i * n + j]);
                let evd = mat.self_adjoint_eigen(faer::Side::Lower).ok()?;
                let s = evd.S();
                let u = evd.U();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
                let vals = order.iter().map(|&i| s[i]).collect();
                let mut vecs = vec![0.0; n * n];
                for (col, &src) in order.iter().enumerate() {
                    for row in 0..n {
                        vecs[row * n + col] = u[(row, src)];
                    }
                }
                Some((vals, vecs))
            }
        }
    };
}

impl_scalar!(f64, 1e-10, matrixmultiply::dgemm);
impl_scalar!(f32, 1e-4, matrixmultiply::sgemm);

/// `e^{i theta}`.
#[inline]
pub fn cis<T: Scalar>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}
