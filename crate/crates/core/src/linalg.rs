//! Scalar abstraction over `f32`/`f64` and row-major matrix products backed by
//! `matrixmultiply`.

use core::fmt::Debug;

use num_traits::{Float, NumAssign};

use crate::par;

/// Floating-point type the attention network is generic over.
pub trait Real: Float + NumAssign + Default + Debug + Send + Sync + 'static {
    fn of(x: f64) -> Self;
    fn as_f64(self) -> f64;

    /// `c = a·b + beta·c` with arbitrary strides on `a` and `b` and a
    /// row-major `c` whose row stride is `n`.
    ///
    /// # Safety
    /// The strides must keep every access of `a` and `b` inside the pointed-to
    /// allocations, and `c` must hold `m * n` elements.
    #[allow(clippy::too_many_arguments)]
    unsafe fn raw_gemm(
        m: usize,
        k: usize,
        n: usize,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
    );
}

impl Real for f32 {
    fn of(x: f64) -> Self {
        x as f32
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
    unsafe fn raw_gemm(
        m: usize,
        k: usize,
        n: usize,
        a: *const f32,
        rsa: isize,
        csa: isize,
        b: *const f32,
        rsb: isize,
        csb: isize,
        beta: f32,
        c: *mut f32,
    ) {
        matrixmultiply::sgemm(m, k, n, 1.0, a, rsa, csa, b, rsb, csb, beta, c, n as isize, 1);
    }
}

impl Real for f64 {
    fn of(x: f64) -> Self {
        x
    }
    fn as_f64(self) -> f64 {
        self
    }
    unsafe fn raw_gemm(
        m: usize,
        k: usize,
        n: usize,
        a: *const f64,
        rsa: isize,
        csa: isize,
        b: *const f64,
        rsb: isize,
        csb: isize,
        beta: f64,
        c: *mut f64,
    ) {
        matrixmultiply::dgemm(m, k, n, 1.0, a, rsa, csa, b, rsb, csb, beta, c, n as isize, 1);
    }
}

const ROW_CHUNK: usize = 128;

/// Which operand is read transposed.
#[derive(Clone, Copy)]
pub(crate) enum Layout {
    /// `c (m×n) = a (m×k) · b (k×n)`
    AB,
    /// `c (m×n) = a (m×k) · bᵀ` where `b` is stored `n×k`
    ABt,
    /// `c (m×n) = aᵀ · b (k×n)` where `a` is stored `k×m`
    AtB,
}

/// Row-major product, accumulated into `c` when `accumulate` is set.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm<T: Real>(
    layout: Layout,
    m: usize,
    k: usize,
    n: usize,
    a: &[T],
    b: &[T],
    c: &mut [T],
    accumulate: bool,
) {
    assert_eq!(a.len(), m * k, "lhs size");
    assert_eq!(b.len(), k * n, "rhs size");
    assert_eq!(c.len(), m * n, "output size");
    if m == 0 || n == 0 {
        return;
    }
    let beta = if accumulate { T::one() } else { T::zero() };
    let (rsa, csa) = match layout {
        Layout::AB | Layout::ABt => (k as isize, 1),
        Layout::AtB => (1, m as isize),
    };
    let (rsb, csb) = match layout {
        Layout::AB | Layout::AtB => (n as isize, 1),
        Layout::ABt => (1, k as isize),
    };
    // Row blocks of the output are independent; a fixed block size keeps
    // results identical for any worker count.
    let a_addr = a.as_ptr() as usize;
    let b_addr = b.as_ptr() as usize;
    par::for_each_chunk_mut(c, ROW_CHUNK * n, |block, out| {
        let row0 = block * ROW_CHUNK;
        let rows = out.len() / n;
        let a_ptr = a_addr as *const T;
        // SAFETY: rows row0..row0+rows of `a` exist (asserted sizes above), the
        // strides match the asserted layout, and `out` holds rows*n elements.
        unsafe {
            let a_block = a_ptr.offset(row0 as isize * rsa);
            T::raw_gemm(rows, k, n, a_block, rsa, csa, b_addr as *const T, rsb, csb, beta, out.as_mut_ptr());
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn naive(layout: Layout, m: usize, k: usize, n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut c = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                for p in 0..k {
                    let av = match layout {
                        Layout::AtB => a[p * m + i],
                        _ => a[i * k + p],
                    };
                    let bv = match layout {
                        Layout::ABt => b[j * k + p],
                        _ => b[p * n + j],
                    };
                    c[i * n + j] += av * bv;
                }
            }
        }
        c
    }

    #[test]
    fn matches_naive_product() {
        let (m, k, n) = (300, 7, 5);
        let a: Vec<f64> = (0..m * k).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
        let b: Vec<f64> = (0..k * n).map(|i| ((i * 13 % 7) as f64) * 0.5).collect();
        for layout in [Layout::AB, Layout::ABt, Layout::AtB] {
            let mut c = vec![1.0; m * n];
            gemm(layout, m, k, n, &a, &b, &mut c, false);
            assert_eq!(c, naive(layout, m, k, n, &a, &b));
            gemm(layout, m, k, n, &a, &b, &mut c, true);
            let twice: Vec<f64> = naive(layout, m, k, n, &a, &b).iter().map(|x| 2.0 * x).collect();
            assert_eq!(c, twice);
        }
    }
}
