//! Radial kernels and the pseudodifferential operator they generate.
//!
//! A radial kernel assigns a nonnegative coefficient `T⁽ᴵ⁾` to every internal
//! vertex; the two-point kernel value is the coefficient of the merge vertex
//! of its arguments. The generated operator
//! `Tf(x) = ∫ T(x,y)(f(x) − f(y)) dμ(y)` annihilates constants and is
//! diagonal in the wavelet basis with one eigenvalue per vertex, computable
//! two independent ways: as a sum over the vertices above `I` (the series
//! form) and as an integral over the complement of `D_I` plus a boundary
//! term (the integral form). Kernels vanish above the top ball, so on the
//! truncation both forms are finite sums and agree up to roundoff.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tree::{same_tree, TreeAddress, TreeHandle};
use crate::wavelet::{forward, inverse, GridFunction};

/// Size guard for the dense self-adjoint matrix oracle.
pub const DENSE_MATRIX_LIMIT: usize = 2048;

/// Kernel constructors accepted by [`make_kernel`].
#[derive(Clone, Debug)]
pub enum KernelKind {
    /// `T⁽ᴵ⁾ = c` at every internal vertex.
    Constant(f64),
    /// `T⁽ᴵ⁾ = μ(D_I)^{-(1+α)}`, the hierarchical power law.
    PowerLaw(f64),
    /// Explicit nonnegative coefficient per internal vertex.
    Explicit(Vec<(TreeAddress, f64)>),
}

/// Nonnegative coefficient `T⁽ᴵ⁾` per internal vertex.
#[derive(Clone, Debug)]
pub struct RadialKernel {
    tree: TreeHandle,
    /// Indexed by vertex id; leaf slots are unused and stay zero.
    values: Vec<f64>,
}

/// Build a kernel of the given kind on the tree.
pub fn make_kernel(tree: &TreeHandle, kind: &KernelKind) -> Result<RadialKernel> {
    match kind {
        KernelKind::Constant(c) => RadialKernel::constant(tree, *c),
        KernelKind::PowerLaw(alpha) => Ok(RadialKernel::power_law(tree, *alpha)),
        KernelKind::Explicit(entries) => RadialKernel::explicit(tree, entries),
    }
}

impl RadialKernel {
    pub fn constant(tree: &TreeHandle, c: f64) -> Result<Self> {
        if c < 0.0 || !c.is_finite() {
            return Err(Error::NegativeKernel {
                vertex: "(all)".into(),
                value: c,
            });
        }
        let mut values = vec![0.0; tree.vertex_count()];
        for &v in tree.internal_ids() {
            values[v as usize] = c;
        }
        Ok(RadialKernel {
            tree: tree.clone(),
            values,
        })
    }

    pub fn power_law(tree: &TreeHandle, alpha: f64) -> Self {
        let mut values = vec![0.0; tree.vertex_count()];
        for &v in tree.internal_ids() {
            values[v as usize] = tree.measure_f64_of(v).powf(-(1.0 + alpha));
        }
        RadialKernel {
            tree: tree.clone(),
            values,
        }
    }

    /// Explicit coefficients; every internal vertex must appear exactly once
    /// and carry a nonnegative value.
    pub fn explicit(tree: &TreeHandle, entries: &[(TreeAddress, f64)]) -> Result<Self> {
        let mut values = vec![0.0; tree.vertex_count()];
        let mut seen = vec![false; tree.vertex_count()];
        for (addr, value) in entries {
            let v = tree.resolve(addr)?;
            if tree.is_leaf_id(v) {
                return Err(Error::NotInternal(addr.to_string()));
            }
            if seen[v as usize] {
                return Err(Error::Spec(format!(
                    "duplicate kernel entry for vertex `{addr}`"
                )));
            }
            if *value < 0.0 || !value.is_finite() {
                return Err(Error::NegativeKernel {
                    vertex: addr.to_string(),
                    value: *value,
                });
            }
            seen[v as usize] = true;
            values[v as usize] = *value;
        }
        for &v in tree.internal_ids() {
            if !seen[v as usize] {
                return Err(Error::Spec(format!(
                    "kernel is missing vertex `{}`",
                    tree.format_address(&tree.address_of(v))
                )));
            }
        }
        Ok(RadialKernel {
            tree: tree.clone(),
            values,
        })
    }

    pub fn tree(&self) -> &TreeHandle {
        &self.tree
    }

    /// Coefficient at one internal vertex.
    pub fn value_at(&self, vertex: &TreeAddress) -> Result<f64> {
        let v = self.tree.resolve(vertex)?;
        if self.tree.is_leaf_id(v) {
            return Err(Error::NotInternal(vertex.to_string()));
        }
        Ok(self.values[v as usize])
    }

    /// Coefficients in canonical vertex order.
    pub fn entries(&self) -> Vec<(TreeAddress, f64)> {
        self.tree
            .internal_ids()
            .iter()
            .map(|&v| (self.tree.address_of(v), self.values[v as usize]))
            .collect()
    }

    /// Two-point kernel value `T(x, y) = T⁽ᵐᵉᵉᵗ⁾`. The diagonal is never
    /// evaluated: the generator integrand vanishes at `y = x`.
    pub fn eval(&self, x: &TreeAddress, y: &TreeAddress) -> Result<f64> {
        let px = self.tree.resolve_point(x)?;
        let py = self.tree.resolve_point(y)?;
        if px == py {
            return Err(Error::KernelDiagonal);
        }
        Ok(self.values[self.tree.meet_id(px, py) as usize])
    }

    /// Apply the operator by direct quadrature:
    /// `Tf(x) = Σ_{y≠x} T(x,y)·(f(x) − f(y))·μ(leaf y)`. Exact at leaf
    /// resolution since both the kernel and `f` are locally constant; cost
    /// `O(N²)`. This is the slow reference path.
    pub fn apply_dense(&self, f: &GridFunction) -> Result<GridFunction> {
        if !same_tree(&self.tree, f.tree()) {
            return Err(Error::TreeMismatch);
        }
        let tree = &self.tree;
        let leaves = tree.leaf_ids();
        let weights: Vec<f64> = leaves.iter().map(|&l| tree.measure_f64_of(l)).collect();
        let values = f.values();

        let out: Vec<Complex64> = (0..leaves.len())
            .into_par_iter()
            .map(|xi| {
                let x = leaves[xi];
                let mut acc = Complex64::new(0.0, 0.0);
                for (yi, &y) in leaves.iter().enumerate() {
                    if yi == xi {
                        continue;
                    }
                    let t = self.values[tree.meet_id(x, y) as usize];
                    acc += (values[xi] - values[yi]) * (t * weights[yi]);
                }
                acc
            })
            .collect();
        GridFunction::new(tree, out)
    }

    /// Eigenvalue at vertex `I` by the series form:
    /// `λ_I = T⁽ᴵ⁾μ(D_I) + Σ_{J>I} T⁽ᴶ⁾μ(D_J)(1 − p_J⁻¹)`, the sum running
    /// over the vertices strictly above `I` up to the top ball.
    pub fn eigenvalue_series(&self, vertex: &TreeAddress) -> Result<f64> {
        let v = self.tree.resolve(vertex)?;
        if self.tree.is_leaf_id(v) {
            return Err(Error::NotInternal(vertex.to_string()));
        }
        Ok(self.eigenvalue_series_id(v))
    }

    pub(crate) fn eigenvalue_series_id(&self, v: u32) -> f64 {
        let tree = &self.tree;
        let mut lambda = self.values[v as usize] * tree.measure_f64_of(v);
        let mut j = v;
        while let Some(up) = tree.parent_id(j) {
            let p = tree.branching_of(up) as f64;
            lambda += self.values[up as usize] * tree.measure_f64_of(up) * (1.0 - 1.0 / p);
            j = up;
        }
        lambda
    }

    /// Eigenvalue at vertex `I` by the integral form:
    /// `λ_I = ∫_{|Iy|>|I|} T(I,y) dμ(y) + T(I, I1)·μ(D_I)`, where `I` stands
    /// for the point continuing from the vertex with zero digits and `I1` for
    /// the point below child 1. Realized as a finite sum over the leaves
    /// outside `D_I`; agrees with the series form up to roundoff.
    pub fn eigenvalue_integral(&self, vertex: &TreeAddress) -> Result<f64> {
        let tree = &self.tree;
        let v = tree.resolve(vertex)?;
        if tree.is_leaf_id(v) {
            return Err(Error::NotInternal(vertex.to_string()));
        }
        let point = tree.zero_extend(v);

        // The boundary term is representative-independent: any child c ≥ 1
        // merges with the zero point exactly at `I`.
        for c in 1..tree.branching_of(v) {
            let rep = tree.zero_extend(tree.child_id(v, c));
            debug_assert_eq!(tree.meet_id(point, rep), v);
        }
        let rep = tree.zero_extend(tree.child_id(v, 1));
        let boundary = self.values[tree.meet_id(point, rep) as usize] * tree.measure_f64_of(v);

        let (start, end) = tree.leaf_span_of(v);
        let mut integral = 0.0;
        for (yi, &y) in tree.leaf_ids().iter().enumerate() {
            if (yi as u32) >= start && (yi as u32) < end {
                continue;
            }
            integral += self.values[tree.meet_id(point, y) as usize] * tree.measure_f64_of(y);
        }
        Ok(integral + boundary)
    }

    /// The full spectrum, one eigenvalue per internal vertex (series form).
    pub fn spectrum(&self) -> Spectrum {
        let mut lambda = vec![0.0; self.tree.vertex_count()];
        for &v in self.tree.internal_ids() {
            lambda[v as usize] = self.eigenvalue_series_id(v);
        }
        Spectrum {
            tree: self.tree.clone(),
            lambda,
        }
    }

    /// Apply the operator spectrally: forward transform, scale coefficient
    /// `(I, j)` by `λ_I`, zero the mean slot, inverse transform.
    pub fn apply_spectral(&self, f: &GridFunction) -> Result<GridFunction> {
        if !same_tree(&self.tree, f.tree()) {
            return Err(Error::TreeMismatch);
        }
        let spectrum = self.spectrum();
        let mut coeffs = forward(f);
        let tree = &self.tree;
        for &v in tree.internal_ids() {
            let offset = tree.wavelet_offset_of(v) as usize;
            let lambda = spectrum.lambda[v as usize];
            for slot in &mut coeffs.data_mut()[offset..offset + (tree.branching_of(v) - 1) as usize]
            {
                *slot *= lambda;
            }
        }
        coeffs.set_mean(Complex64::new(0.0, 0.0));
        Ok(inverse(&coeffs))
    }

    /// Dense matrix of the operator in the measure-weighted leaf coordinates
    /// `g = √μ ⊙ f`, in which the operator is manifestly symmetric:
    /// diagonal `Σ_z T(x,z)μ_z`, off-diagonal `−T(x,y)·√(μ_x μ_y)`.
    /// Brute-force oracle; guarded by [`DENSE_MATRIX_LIMIT`].
    pub fn dense_matrix(&self) -> Result<DMatrix<f64>> {
        let tree = &self.tree;
        let n = tree.leaf_count();
        if n > DENSE_MATRIX_LIMIT {
            return Err(Error::SizeGuard {
                n,
                limit: DENSE_MATRIX_LIMIT,
            });
        }
        let leaves = tree.leaf_ids();
        let weights: Vec<f64> = leaves.iter().map(|&l| tree.measure_f64_of(l)).collect();
        let sqrt_weights: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
        let mut m = DMatrix::zeros(n, n);
        for xi in 0..n {
            let mut diag = 0.0;
            for yi in 0..n {
                if yi == xi {
                    continue;
                }
                let t = self.values[tree.meet_id(leaves[xi], leaves[yi]) as usize];
                diag += t * weights[yi];
                m[(xi, yi)] = -t * (sqrt_weights[xi] * sqrt_weights[yi]);
            }
            m[(xi, xi)] = diag;
        }
        Ok(m)
    }
}

/// Operator spectrum: `λ_I` per internal vertex; the eigenvalue on the mean
/// slot (the constant direction) is identically zero.
#[derive(Clone, Debug)]
pub struct Spectrum {
    tree: TreeHandle,
    lambda: Vec<f64>,
}

impl Spectrum {
    pub fn tree(&self) -> &TreeHandle {
        &self.tree
    }

    pub fn get(&self, vertex: &TreeAddress) -> Result<f64> {
        let v = self.tree.resolve(vertex)?;
        if self.tree.is_leaf_id(v) {
            return Err(Error::NotInternal(vertex.to_string()));
        }
        Ok(self.lambda[v as usize])
    }

    /// Eigenvalue of the constant direction.
    pub fn mean_eigenvalue(&self) -> f64 {
        0.0
    }

    /// `(vertex, λ)` pairs in canonical vertex order.
    pub fn entries(&self) -> Vec<(TreeAddress, f64)> {
        self.tree
            .internal_ids()
            .iter()
            .map(|&v| (self.tree.address_of(v), self.lambda[v as usize]))
            .collect()
    }
}
