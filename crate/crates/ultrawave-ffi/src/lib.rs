//! C ABI for the ultrawave library.
//!
//! Trees and kernels live behind opaque handles created and released by this
//! crate; function data crosses the boundary as plain `double` arrays split
//! into real and imaginary parts. Every fallible call returns a [`UwStatus`];
//! on any non-OK status a thread-local message is available through
//! [`uw_last_error_message`]. The generated header is written to
//! `include/ultrawave.h` at build time.
//!
//! Wavelet coefficients are laid out in canonical order: internal vertices in
//! depth-first preorder, frequencies `j = 1..p_I-1` ascending; the mean
//! coefficient travels separately. [`uw_tree_coefficient_address`] maps a
//! slot back to its (vertex, frequency) pair.
//!
//! Pointer contracts are the usual C ones, stated per function in the
//! generated header: handles must come from this library and not be freed
//! twice, strings must be NUL-terminated, and array arguments must provide
//! the advertised number of elements.

// Safety requirements live in the function docs and the generated header.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use ultrawave::wavelet::{self, GridFunction, WaveletCoefficients};
use ultrawave::{
    changevar, rational_to_f64, Complex64, RadialKernel, TreeHandle, UltrametricTree, WaveletIndex,
};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UwStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The operation rejected its input; see `uw_last_error_message`.
    InvalidArgument = 3,
    /// An output buffer was too small; the reported length is required.
    BufferTooSmall = 4,
    /// An internal panic was caught at the boundary.
    Panic = 5,
}

/// Opaque tree handle.
pub struct UwTree {
    inner: TreeHandle,
}

/// Opaque kernel handle; retains the tree it was built on.
pub struct UwKernel {
    inner: RadialKernel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(msg: &str) -> UwStatus {
    set_error(msg);
    UwStatus::InvalidArgument
}

fn guard(body: impl FnOnce() -> UwStatus) -> UwStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic caught at the FFI boundary");
            UwStatus::Panic
        }
    }
}

unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Result<&'a str, UwStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(UwStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        UwStatus::InvalidUtf8
    })
}

unsafe fn tree_arg<'a>(ptr: *const UwTree) -> Result<&'a TreeHandle, UwStatus> {
    if ptr.is_null() {
        set_error("null tree handle");
        return Err(UwStatus::NullArgument);
    }
    Ok(&(*ptr).inner)
}

unsafe fn kernel_arg<'a>(ptr: *const UwKernel) -> Result<&'a RadialKernel, UwStatus> {
    if ptr.is_null() {
        set_error("null kernel handle");
        return Err(UwStatus::NullArgument);
    }
    Ok(&(*ptr).inner)
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Result<&'a [f64], UwStatus> {
    if ptr.is_null() {
        set_error("null array argument");
        return Err(UwStatus::NullArgument);
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_out<'a>(ptr: *mut f64, len: usize) -> Result<&'a mut [f64], UwStatus> {
    if ptr.is_null() {
        set_error("null output array");
        return Err(UwStatus::NullArgument);
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

/// Copy `text` (plus NUL) into `buf`. `written` always receives the required
/// byte count including the terminator.
unsafe fn write_text(text: &str, buf: *mut c_char, cap: usize, written: *mut usize) -> UwStatus {
    let needed = text.len() + 1;
    if !written.is_null() {
        *written = needed;
    }
    if buf.is_null() || cap < needed {
        set_error("output buffer too small for address string");
        return UwStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, text.len());
    *buf.add(text.len()) = 0;
    UwStatus::Ok
}

fn grid_from_parts(tree: &TreeHandle, re: &[f64], im: &[f64]) -> Result<GridFunction, UwStatus> {
    let values = re
        .iter()
        .zip(im)
        .map(|(&r, &i)| Complex64::new(r, i))
        .collect();
    GridFunction::new(tree, values).map_err(|e| fail(&e.to_string()))
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn uw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copy the last error message of this thread into `buf`; returns the number
/// of bytes required including the NUL terminator. Call with a null `buf` to
/// query the length first.
#[no_mangle]
pub unsafe extern "C" fn uw_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap >= bytes.len() {
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, bytes.len());
        }
        bytes.len()
    })
}

/// Build a tree from the spec JSON accepted by the CLI, e.g.
/// `{"homogeneous":{"p":2,"depth":3},"top_measure":"3/2"}`.
#[no_mangle]
pub unsafe extern "C" fn uw_tree_from_spec_json(
    spec_json: *const c_char,
    out_tree: *mut *mut UwTree,
) -> UwStatus {
    guard(|| {
        if out_tree.is_null() {
            set_error("null output handle");
            return UwStatus::NullArgument;
        }
        let text = match utf8_arg(spec_json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match UltrametricTree::from_spec_json(text) {
            Ok(tree) => {
                *out_tree = Box::into_raw(Box::new(UwTree {
                    inner: Arc::new(tree),
                }));
                UwStatus::Ok
            }
            Err(e) => fail(&e.to_string()),
        }
    })
}

/// Release a tree handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn uw_tree_free(tree: *mut UwTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Number of leaves `N`; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn uw_tree_leaf_count(tree: *const UwTree) -> u64 {
    tree_arg(tree).map_or(0, |t| t.leaf_count() as u64)
}

#[no_mangle]
pub unsafe extern "C" fn uw_tree_vertex_count(tree: *const UwTree) -> u64 {
    tree_arg(tree).map_or(0, |t| t.vertex_count() as u64)
}

#[no_mangle]
pub unsafe extern "C" fn uw_tree_internal_count(tree: *const UwTree) -> u64 {
    tree_arg(tree).map_or(0, |t| t.internal_count() as u64)
}

#[no_mangle]
pub unsafe extern "C" fn uw_tree_depth(tree: *const UwTree) -> u32 {
    tree_arg(tree).map_or(0, |t| t.depth())
}

/// Number of wavelet coefficients, `N - 1`.
#[no_mangle]
pub unsafe extern "C" fn uw_tree_coefficient_count(tree: *const UwTree) -> u64 {
    tree_arg(tree).map_or(0, |t| t.wavelet_count() as u64)
}

/// Address string of the `leaf_index`-th leaf in lexicographic order.
#[no_mangle]
pub unsafe extern "C" fn uw_tree_leaf_address(
    tree: *const UwTree,
    leaf_index: u64,
    buf: *mut c_char,
    cap: usize,
    written: *mut usize,
) -> UwStatus {
    guard(|| {
        let tree = match tree_arg(tree) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let leaves = tree.enumerate_leaves();
        let Some(addr) = leaves.get(leaf_index as usize) else {
            return fail(&format!("leaf index {leaf_index} out of range"));
        };
        write_text(&tree.format_address(addr), buf, cap, written)
    })
}

/// Address string of the `index`-th internal vertex in canonical order (the
/// vertex order of spectrum arrays).
#[no_mangle]
pub unsafe extern "C" fn uw_tree_internal_address(
    tree: *const UwTree,
    index: u64,
    buf: *mut c_char,
    cap: usize,
    written: *mut usize,
) -> UwStatus {
    guard(|| {
        let tree = match tree_arg(tree) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let vertices = tree.internal_vertices();
        let Some(addr) = vertices.get(index as usize) else {
            return fail(&format!("internal vertex index {index} out of range"));
        };
        write_text(&tree.format_address(addr), buf, cap, written)
    })
}

/// Vertex address and frequency of coefficient slot `slot`.
#[no_mangle]
pub unsafe extern "C" fn uw_tree_coefficient_address(
    tree: *const UwTree,
    slot: u64,
    buf: *mut c_char,
    cap: usize,
    written: *mut usize,
    frequency: *mut u32,
) -> UwStatus {
    guard(|| {
        let tree = match tree_arg(tree) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let indices = wavelet::indices(tree);
        let Some(idx) = indices.get(slot as usize) else {
            return fail(&format!("coefficient slot {slot} out of range"));
        };
        if !frequency.is_null() {
            *frequency = idx.j;
        }
        write_text(&tree.format_address(&idx.vertex), buf, cap, written)
    })
}

/// Fill `out` (length `len == leaf count`) with the leaf ball measures.
#[no_mangle]
pub unsafe extern "C" fn uw_tree_leaf_measures(
    tree: *const UwTree,
    out: *mut f64,
    len: usize,
) -> UwStatus {
    guard(|| {
        let tree = match tree_arg(tree) {
            Ok(t) => t,
            Err(s) => return s,
        };
        if len != tree.leaf_count() {
            return fail(&format!("expected length {}, got {len}", tree.leaf_count()));
        }
        let out = match slice_out(out, len) {
            Ok(s) => s,
            Err(s) => return s,
        };
        for (slot, leaf) in tree.enumerate_leaves().iter().enumerate() {
            out[slot] = rational_to_f64(&tree.ball_measure(leaf).unwrap());
        }
        UwStatus::Ok
    })
}

/// Ultrametric distance between the points addressed by `x` and `y`
/// (as a double; the library computes it exactly in rationals).
#[no_mangle]
pub unsafe extern "C" fn uw_tree_distance(
    tree: *const UwTree,
    x: *const c_char,
    y: *const c_char,
    out: *mut f64,
) -> UwStatus {
    guard(|| {
        let tree = match tree_arg(tree) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let (x, y) = match (utf8_arg(x), utf8_arg(y)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        if out.is_null() {
            set_error("null output pointer");
            return UwStatus::NullArgument;
        }
        let ax = match tree.parse_address(x) {
            Ok(a) => a,
            Err(e) => return fail(&e.to_string()),
        };
        let ay = match tree.parse_address(y) {
            Ok(a) => a,
            Err(e) => return fail(&e.to_string()),
        };
        match tree.distance(&ax, &ay) {
            Ok(d) => {
                *out = rational_to_f64(&d);
                UwStatus::Ok
            }
            Err(e) => fail(&e.to_string()),
        }
    })
}

/// Measure of the ball at `vertex` (as a double).
#[no_mangle]
pub unsafe extern "C" fn uw_tree_ball_measure(
    tree: *const UwTree,
    vertex: *const c_char,
    out: *mut f64,
) -> UwStatus {
    guard(|| {
        let tree = match tree_arg(tree) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let vertex = match utf8_arg(vertex) {
            Ok(v) => v,
            Err(s) => return s,
        };
        if out.is_null() {
            set_error("null output pointer");
            return UwStatus::NullArgument;
        }
        match tree
            .parse_address(vertex)
            .and_then(|a| tree.ball_measure(&a))
        {
            Ok(m) => {
                *out = rational_to_f64(&m);
                UwStatus::Ok
            }
            Err(e) => fail(&e.to_string()),
        }
    })
}

/// Fill `out` (length `len == leaf count`) with the change-of-variable images
/// of the leaves, in leaf order.
#[no_mangle]
pub unsafe extern "C" fn uw_tree_rho_values(
    tree: *const UwTree,
    out: *mut f64,
    len: usize,
) -> UwStatus {
    guard(|| {
        let tree = match tree_arg(tree) {
            Ok(t) => t,
            Err(s) => return s,
        };
        if len != tree.leaf_count() {
            return fail(&format!("expected length {}, got {len}", tree.leaf_count()));
        }
        let out = match slice_out(out, len) {
            Ok(s) => s,
            Err(s) => return s,
        };
        for (slot, leaf) in tree.enumerate_leaves().iter().enumerate() {
            out[slot] = rational_to_f64(&changevar::rho(tree, leaf).unwrap());
        }
        UwStatus::Ok
    })
}

/// Forward wavelet transform. `in_re`/`in_im` hold `n == leaf count` values
/// in leaf order; `coeff_re`/`coeff_im` receive `coeff_len == n - 1` values
/// in canonical order; the mean coefficient lands in `mean_re`/`mean_im`.
#[no_mangle]
pub unsafe extern "C" fn uw_forward(
    tree: *const UwTree,
    in_re: *const f64,
    in_im: *const f64,
    n: usize,
    coeff_re: *mut f64,
    coeff_im: *mut f64,
    coeff_len: usize,
    mean_re: *mut f64,
    mean_im: *mut f64,
) -> UwStatus {
    guard(|| {
        let tree = match tree_arg(tree) {
            Ok(t) => t,
            Err(s) => return s,
        };
        if coeff_len != tree.wavelet_count() {
            return fail(&format!(
                "coefficient buffer must hold {} values, got {coeff_len}",
                tree.wavelet_count()
            ));
        }
        if mean_re.is_null() || mean_im.is_null() {
            set_error("null mean output");
            return UwStatus::NullArgument;
        }
        let (re, im) = match (slice_arg(in_re, n), slice_arg(in_im, n)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let (out_re, out_im) = match (
            slice_out(coeff_re, coeff_len),
            slice_out(coeff_im, coeff_len),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let f = match grid_from_parts(tree, re, im) {
            Ok(f) => f,
            Err(s) => return s,
        };
        let coeffs = wavelet::forward(&f);
        for (slot, (_, value)) in coeffs.entries().enumerate() {
            out_re[slot] = value.re;
            out_im[slot] = value.im;
        }
        *mean_re = coeffs.mean().re;
        *mean_im = coeffs.mean().im;
        UwStatus::Ok
    })
}

/// Inverse wavelet transform from a full canonical coefficient vector plus
/// the mean coefficient.
#[no_mangle]
pub unsafe extern "C" fn uw_inverse(
    tree: *const UwTree,
    coeff_re: *const f64,
    coeff_im: *const f64,
    coeff_len: usize,
    mean_re: f64,
    mean_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    n: usize,
) -> UwStatus {
    guard(|| {
        let tree = match tree_arg(tree) {
            Ok(t) => t,
            Err(s) => return s,
        };
        if n != tree.leaf_count() {
            return fail(&format!(
                "output buffer must hold {} values, got {n}",
                tree.leaf_count()
            ));
        }
        let (re, im) = match (
            slice_arg(coeff_re, coeff_len),
            slice_arg(coeff_im, coeff_len),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let data = re
            .iter()
            .zip(im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        let coeffs = match WaveletCoefficients::new(tree, data, Complex64::new(mean_re, mean_im)) {
            Ok(c) => c,
            Err(e) => return fail(&e.to_string()),
        };
        let g = wavelet::inverse(&coeffs);
        let (out_re, out_im) = match (slice_out(out_re, n), slice_out(out_im, n)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        for (slot, value) in g.values().iter().enumerate() {
            out_re[slot] = value.re;
            out_im[slot] = value.im;
        }
        UwStatus::Ok
    })
}

/// Constant kernel `T = c` (c must be nonnegative).
#[no_mangle]
pub unsafe extern "C" fn uw_kernel_constant(
    tree: *const UwTree,
    c: f64,
    out_kernel: *mut *mut UwKernel,
) -> UwStatus {
    guard(|| {
        let tree = match tree_arg(tree) {
            Ok(t) => t,
            Err(s) => return s,
        };
        if out_kernel.is_null() {
            set_error("null output handle");
            return UwStatus::NullArgument;
        }
        match RadialKernel::constant(tree, c) {
            Ok(kernel) => {
                *out_kernel = Box::into_raw(Box::new(UwKernel { inner: kernel }));
                UwStatus::Ok
            }
            Err(e) => fail(&e.to_string()),
        }
    })
}

/// Power-law kernel `T(I) = μ(D_I)^{-(1+alpha)}`.
#[no_mangle]
pub unsafe extern "C" fn uw_kernel_power_law(
    tree: *const UwTree,
    alpha: f64,
    out_kernel: *mut *mut UwKernel,
) -> UwStatus {
    guard(|| {
        let tree = match tree_arg(tree) {
            Ok(t) => t,
            Err(s) => return s,
        };
        if out_kernel.is_null() {
            set_error("null output handle");
            return UwStatus::NullArgument;
        }
        let kernel = RadialKernel::power_law(tree, alpha);
        *out_kernel = Box::into_raw(Box::new(UwKernel { inner: kernel }));
        UwStatus::Ok
    })
}

/// Release a kernel handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn uw_kernel_free(kernel: *mut UwKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

unsafe fn apply_kernel(
    kernel: *const UwKernel,
    in_re: *const f64,
    in_im: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
    n: usize,
    dense: bool,
) -> UwStatus {
    let kernel = match kernel_arg(kernel) {
        Ok(k) => k,
        Err(s) => return s,
    };
    let tree = kernel.tree();
    if n != tree.leaf_count() {
        return fail(&format!("expected length {}, got {n}", tree.leaf_count()));
    }
    let (re, im) = match (slice_arg(in_re, n), slice_arg(in_im, n)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let f = match grid_from_parts(tree, re, im) {
        Ok(f) => f,
        Err(s) => return s,
    };
    let result = if dense {
        kernel.apply_dense(&f)
    } else {
        kernel.apply_spectral(&f)
    };
    let g = match result {
        Ok(g) => g,
        Err(e) => return fail(&e.to_string()),
    };
    let (out_re, out_im) = match (slice_out(out_re, n), slice_out(out_im, n)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    for (slot, value) in g.values().iter().enumerate() {
        out_re[slot] = value.re;
        out_im[slot] = value.im;
    }
    UwStatus::Ok
}

/// Apply the operator by direct `O(N²)` quadrature.
#[no_mangle]
pub unsafe extern "C" fn uw_kernel_apply_dense(
    kernel: *const UwKernel,
    in_re: *const f64,
    in_im: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
    n: usize,
) -> UwStatus {
    guard(|| apply_kernel(kernel, in_re, in_im, out_re, out_im, n, true))
}

/// Apply the operator spectrally through the wavelet transform.
#[no_mangle]
pub unsafe extern "C" fn uw_kernel_apply_spectral(
    kernel: *const UwKernel,
    in_re: *const f64,
    in_im: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
    n: usize,
) -> UwStatus {
    guard(|| apply_kernel(kernel, in_re, in_im, out_re, out_im, n, false))
}

/// Fill `out` (length `len == internal vertex count`) with the eigenvalues
/// λ_I in canonical vertex order (see [`uw_tree_internal_address`]).
#[no_mangle]
pub unsafe extern "C" fn uw_kernel_spectrum(
    kernel: *const UwKernel,
    out: *mut f64,
    len: usize,
) -> UwStatus {
    guard(|| {
        let kernel = match kernel_arg(kernel) {
            Ok(k) => k,
            Err(s) => return s,
        };
        let tree = kernel.tree();
        if len != tree.internal_count() {
            return fail(&format!(
                "expected length {}, got {len}",
                tree.internal_count()
            ));
        }
        let out = match slice_out(out, len) {
            Ok(s) => s,
            Err(s) => return s,
        };
        for (slot, (_, lambda)) in kernel.spectrum().entries().iter().enumerate() {
            out[slot] = *lambda;
        }
        UwStatus::Ok
    })
}

unsafe fn eigenvalue(
    kernel: *const UwKernel,
    vertex: *const c_char,
    out: *mut f64,
    integral: bool,
) -> UwStatus {
    let kernel = match kernel_arg(kernel) {
        Ok(k) => k,
        Err(s) => return s,
    };
    let vertex = match utf8_arg(vertex) {
        Ok(v) => v,
        Err(s) => return s,
    };
    if out.is_null() {
        set_error("null output pointer");
        return UwStatus::NullArgument;
    }
    let addr = match kernel.tree().parse_address(vertex) {
        Ok(a) => a,
        Err(e) => return fail(&e.to_string()),
    };
    let result = if integral {
        kernel.eigenvalue_integral(&addr)
    } else {
        kernel.eigenvalue_series(&addr)
    };
    match result {
        Ok(lambda) => {
            *out = lambda;
            UwStatus::Ok
        }
        Err(e) => fail(&e.to_string()),
    }
}

/// Eigenvalue at `vertex` by the ancestor-sum formula.
#[no_mangle]
pub unsafe extern "C" fn uw_kernel_eigenvalue_series(
    kernel: *const UwKernel,
    vertex: *const c_char,
    out: *mut f64,
) -> UwStatus {
    guard(|| eigenvalue(kernel, vertex, out, false))
}

/// Eigenvalue at `vertex` by the integral formula; agrees with the series
/// form up to roundoff.
#[no_mangle]
pub unsafe extern "C" fn uw_kernel_eigenvalue_integral(
    kernel: *const UwKernel,
    vertex: *const c_char,
    out: *mut f64,
) -> UwStatus {
    guard(|| eigenvalue(kernel, vertex, out, true))
}

/// Evaluate the wavelet at (`vertex`, `j`) on the point addressed by `x`.
#[no_mangle]
pub unsafe extern "C" fn uw_wavelet_evaluate(
    tree: *const UwTree,
    vertex: *const c_char,
    j: u32,
    x: *const c_char,
    out_re: *mut f64,
    out_im: *mut f64,
) -> UwStatus {
    guard(|| {
        let tree = match tree_arg(tree) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let (vertex, x) = match (utf8_arg(vertex), utf8_arg(x)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        if out_re.is_null() || out_im.is_null() {
            set_error("null output pointer");
            return UwStatus::NullArgument;
        }
        let result = tree.parse_address(vertex).and_then(|v| {
            let point = tree.parse_address(x)?;
            wavelet::evaluate(tree, &WaveletIndex::new(v, j), &point)
        });
        match result {
            Ok(value) => {
                *out_re = value.re;
                *out_im = value.im;
                UwStatus::Ok
            }
            Err(e) => fail(&e.to_string()),
        }
    })
}
