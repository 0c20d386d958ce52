//! The ultrametric wavelet basis and fast transforms.
//!
//! A wavelet is attached to an internal vertex `I` and a frequency
//! `j ∈ 1..p_I−1`: it is supported on the ball `D_I`, takes the constant
//! value `exp(2πi·j·k/p_I)/√μ(D_I)` on the k-th child ball, and has zero
//! mean. The family over all internal vertices has `N − 1` members; together
//! with the normalized indicator of the top ball (the "mean" slot) it is an
//! orthonormal basis of the `N`-dimensional space of leaf-resolution
//! functions, so the transform below is unitary.
//!
//! The forward transform accumulates ball integrals bottom-up and applies a
//! direct `p × p` Fourier sum at each internal vertex; the inverse pushes
//! accumulated constants top-down. Both cost `O(Σ_I p_I²)`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tree::{same_tree, TreeAddress, TreeHandle, UltrametricTree};

/// Size guard for the dense Gram-matrix verification path.
pub const GRAM_SIZE_LIMIT: usize = 1024;

/// A complex-valued function locally constant at leaf resolution: one value
/// per leaf ball, in lexicographic leaf order.
#[derive(Clone, Debug)]
pub struct GridFunction {
    tree: TreeHandle,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(tree: &TreeHandle, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != tree.leaf_count() {
            return Err(Error::DimensionMismatch {
                got: values.len(),
                expected: tree.leaf_count(),
            });
        }
        Ok(GridFunction {
            tree: tree.clone(),
            values,
        })
    }

    pub fn zeros(tree: &TreeHandle) -> Self {
        GridFunction {
            tree: tree.clone(),
            values: vec![Complex64::new(0.0, 0.0); tree.leaf_count()],
        }
    }

    /// The constant function `c` on the top ball.
    pub fn constant(tree: &TreeHandle, c: Complex64) -> Self {
        GridFunction {
            tree: tree.clone(),
            values: vec![c; tree.leaf_count()],
        }
    }

    /// The characteristic function of the ball at `vertex`.
    pub fn indicator(tree: &TreeHandle, vertex: &TreeAddress) -> Result<Self> {
        let v = tree.resolve(vertex)?;
        let (start, end) = tree.leaf_span_of(v);
        let mut values = vec![Complex64::new(0.0, 0.0); tree.leaf_count()];
        for value in &mut values[start as usize..end as usize] {
            *value = Complex64::new(1.0, 0.0);
        }
        Ok(GridFunction {
            tree: tree.clone(),
            values,
        })
    }

    pub fn tree(&self) -> &TreeHandle {
        &self.tree
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Measure-weighted inner product `⟨f, g⟩ = Σ conj(f)·g·μ(leaf)`,
    /// conjugate-linear in `self`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        if !same_tree(&self.tree, &other.tree) {
            return Err(Error::TreeMismatch);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &leaf) in self.tree.leaf_ids().iter().enumerate() {
            acc += self.values[i].conj() * other.values[i] * self.tree.measure_f64_of(leaf);
        }
        Ok(acc)
    }

    /// Squared L² norm with respect to the tree measure.
    pub fn norm_sq(&self) -> f64 {
        self.tree
            .leaf_ids()
            .iter()
            .enumerate()
            .map(|(i, &leaf)| self.values[i].norm_sqr() * self.tree.measure_f64_of(leaf))
            .sum()
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        if !same_tree(&self.tree, &other.tree) {
            return Err(Error::TreeMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Index of one wavelet: internal vertex `I` and frequency `j ∈ 1..=p_I−1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WaveletIndex {
    pub vertex: TreeAddress,
    pub j: u32,
}

impl WaveletIndex {
    pub fn new(vertex: TreeAddress, j: u32) -> Self {
        WaveletIndex { vertex, j }
    }
}

/// All wavelet indices of the tree in canonical order: internal vertices in
/// depth-first preorder, frequencies ascending. The canonical order is the
/// layout of [`WaveletCoefficients`] and of the coefficient CSV rows.
pub fn indices(tree: &UltrametricTree) -> Vec<WaveletIndex> {
    let mut out = Vec::with_capacity(tree.wavelet_count());
    for &v in tree.internal_ids() {
        let vertex = tree.address_of(v);
        for j in 1..tree.branching_of(v) {
            out.push(WaveletIndex::new(vertex.clone(), j));
        }
    }
    out
}

/// Spectral representation of a grid function: one complex coefficient per
/// wavelet index plus the coefficient of the normalized top-ball indicator.
#[derive(Clone, Debug)]
pub struct WaveletCoefficients {
    tree: TreeHandle,
    data: Vec<Complex64>,
    mean: Complex64,
}

impl WaveletCoefficients {
    /// Assemble from a full coefficient vector in canonical order. The vector
    /// must cover every wavelet index.
    pub fn new(tree: &TreeHandle, data: Vec<Complex64>, mean: Complex64) -> Result<Self> {
        if data.len() != tree.wavelet_count() {
            return Err(Error::DimensionMismatch {
                got: data.len(),
                expected: tree.wavelet_count(),
            });
        }
        Ok(WaveletCoefficients {
            tree: tree.clone(),
            data,
            mean,
        })
    }

    pub fn zeros(tree: &TreeHandle) -> Self {
        WaveletCoefficients {
            tree: tree.clone(),
            data: vec![Complex64::new(0.0, 0.0); tree.wavelet_count()],
            mean: Complex64::new(0.0, 0.0),
        }
    }

    pub fn tree(&self) -> &TreeHandle {
        &self.tree
    }

    pub fn get(&self, idx: &WaveletIndex) -> Result<Complex64> {
        let slot = self.slot(idx)?;
        Ok(self.data[slot])
    }

    pub fn set(&mut self, idx: &WaveletIndex, value: Complex64) -> Result<()> {
        let slot = self.slot(idx)?;
        self.data[slot] = value;
        Ok(())
    }

    /// Coefficient of the normalized top-ball indicator `Ω_top/√μ(D_top)`.
    pub fn mean(&self) -> Complex64 {
        self.mean
    }

    pub fn set_mean(&mut self, value: Complex64) {
        self.mean = value;
    }

    /// Entries in canonical order, mean slot excluded.
    pub fn entries(&self) -> impl Iterator<Item = (WaveletIndex, Complex64)> + '_ {
        indices(&self.tree)
            .into_iter()
            .zip(self.data.iter().copied())
    }

    /// Total coefficient energy `Σ|c|² + |mean|²`.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>() + self.mean.norm_sqr()
    }

    fn slot(&self, idx: &WaveletIndex) -> Result<usize> {
        let (_, p, offset) = check_index(&self.tree, idx)?;
        debug_assert!(idx.j >= 1 && idx.j < p);
        Ok(offset + (idx.j - 1) as usize)
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }
}

/// Validate a wavelet index; returns (vertex id, branching, coefficient offset).
pub(crate) fn check_index(tree: &UltrametricTree, idx: &WaveletIndex) -> Result<(u32, u32, usize)> {
    let v = tree.resolve(&idx.vertex)?;
    let p = tree.branching_of(v);
    if p == 0 {
        return Err(Error::NotInternal(idx.vertex.to_string()));
    }
    if idx.j < 1 || idx.j >= p {
        return Err(Error::InvalidFrequency {
            j: idx.j,
            max: p - 1,
            vertex: idx.vertex.to_string(),
        });
    }
    Ok((v, p, tree.wavelet_offset_of(v) as usize))
}

pub(crate) fn phase(j: u32, k: u32, p: u32) -> Complex64 {
    // exp(2πi·j·k/p) with the angle reduced mod p before the trigonometry;
    // quarter turns are returned exactly.
    let r = (j as u64 * k as u64) % p as u64;
    if (4 * r).is_multiple_of(p as u64) {
        return match (4 * r / p as u64) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * r as f64 / p as f64)
}

/// Evaluate the wavelet `ψ_idx` at the point addressed by `x`: zero outside
/// `D_I`, otherwise `exp(2πi·j·d/p_I)/√μ(D_I)` where `d` is the digit of `x`
/// immediately below `I`.
pub fn evaluate(tree: &UltrametricTree, idx: &WaveletIndex, x: &TreeAddress) -> Result<Complex64> {
    let (v, p, _) = check_index(tree, idx)?;
    let point = tree.resolve_point(x)?;
    let leaf_pos = tree.leaf_span_of(point).0;
    let (start, end) = tree.leaf_span_of(v);
    if leaf_pos < start || leaf_pos >= end {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut w = point;
    while tree.depth_of(w) > tree.depth_of(v) + 1 {
        w = tree.parent_id(w).expect("point is below the vertex");
    }
    let digit = tree.digit_of(w);
    Ok(phase(idx.j, digit, p) / tree.measure_f64_of(v).sqrt())
}

/// Materialize a single wavelet as a grid function.
pub fn synthesize(tree: &TreeHandle, idx: &WaveletIndex) -> Result<GridFunction> {
    let (v, p, _) = check_index(tree, idx)?;
    let mut out = GridFunction::zeros(tree);
    let scale = 1.0 / tree.measure_f64_of(v).sqrt();
    for k in 0..p {
        let value = phase(idx.j, k, p) * scale;
        let (start, end) = tree.leaf_span_of(tree.child_id(v, k));
        for slot in &mut out.values_mut()[start as usize..end as usize] {
            *slot = value;
        }
    }
    Ok(out)
}

/// Forward wavelet transform: `c_idx = ⟨ψ_idx, f⟩` for every index, plus the
/// mean coefficient `⟨Ω_top/√μ, f⟩`. Hierarchical, `O(Σ p_I²)`.
pub fn forward(f: &GridFunction) -> WaveletCoefficients {
    let tree = f.tree();
    let n_vertices = tree.vertex_count();

    // Ball integrals bottom-up. Children have larger ids than their parent,
    // so a reverse id sweep visits children first.
    let mut integral = vec![Complex64::new(0.0, 0.0); n_vertices];
    for v in (0..n_vertices as u32).rev() {
        if tree.is_leaf_id(v) {
            let leaf_pos = tree.leaf_span_of(v).0 as usize;
            integral[v as usize] = f.values()[leaf_pos] * tree.measure_f64_of(v);
        } else {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..tree.branching_of(v) {
                acc += integral[tree.child_id(v, k) as usize];
            }
            integral[v as usize] = acc;
        }
    }

    let mut data = vec![Complex64::new(0.0, 0.0); tree.wavelet_count()];
    for &v in tree.internal_ids() {
        let p = tree.branching_of(v);
        let offset = tree.wavelet_offset_of(v) as usize;
        let scale = 1.0 / tree.measure_f64_of(v).sqrt();
        for j in 1..p {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..p {
                acc += phase(j, k, p).conj() * integral[tree.child_id(v, k) as usize];
            }
            data[offset + (j - 1) as usize] = acc * scale;
        }
    }

    let mean = integral[0] / tree.measure_f64_of(0).sqrt();
    WaveletCoefficients {
        tree: tree.clone(),
        data,
        mean,
    }
}

/// Inverse wavelet transform; `inverse(&forward(f))` reproduces `f` up to
/// roundoff. Same cost order as [`forward`].
pub fn inverse(coeffs: &WaveletCoefficients) -> GridFunction {
    let tree = &coeffs.tree;
    let n_vertices = tree.vertex_count();

    // Accumulated constant contribution on each ball, pushed top-down.
    // Parents have smaller ids, so a forward id sweep works.
    let mut acc = vec![Complex64::new(0.0, 0.0); n_vertices];
    acc[0] = coeffs.mean / tree.measure_f64_of(0).sqrt();

    let mut out = GridFunction::zeros(tree);
    for v in 0..n_vertices as u32 {
        if tree.is_leaf_id(v) {
            let leaf_pos = tree.leaf_span_of(v).0 as usize;
            out.values_mut()[leaf_pos] = acc[v as usize];
            continue;
        }
        let p = tree.branching_of(v);
        let offset = tree.wavelet_offset_of(v) as usize;
        let scale = 1.0 / tree.measure_f64_of(v).sqrt();
        for k in 0..p {
            let mut delta = Complex64::new(0.0, 0.0);
            for j in 1..p {
                delta += coeffs.data[offset + (j - 1) as usize] * phase(j, k, p);
            }
            acc[tree.child_id(v, k) as usize] = acc[v as usize] + delta * scale;
        }
    }
    out
}

/// Dense Gram matrix of the `N` basis vectors (mean slot first, wavelets in
/// canonical order), computed by direct leaf-by-leaf summation. This is the
/// slow verification path; it refuses trees with more than
/// [`GRAM_SIZE_LIMIT`] leaves.
pub fn gram_matrix(tree: &UltrametricTree) -> Result<DMatrix<Complex64>> {
    let n = tree.leaf_count();
    if n > GRAM_SIZE_LIMIT {
        return Err(Error::SizeGuard {
            n,
            limit: GRAM_SIZE_LIMIT,
        });
    }
    let columns = basis_columns(tree);
    let weights: Vec<f64> = tree
        .leaf_ids()
        .iter()
        .map(|&leaf| tree.measure_f64_of(leaf))
        .collect();

    use rayon::prelude::*;
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let col_a = &columns[a];
            let mut row = vec![Complex64::new(0.0, 0.0); n];
            for (b, col_b) in columns.iter().enumerate().skip(a) {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in 0..n {
                    acc += col_a[x].conj() * col_b[x] * weights[x];
                }
                row[b] = acc;
            }
            row
        })
        .collect();

    let mut gram = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for a in 0..n {
        for b in a..n {
            gram[(a, b)] = rows[a][b];
            gram[(b, a)] = rows[a][b].conj();
        }
    }
    Ok(gram)
}

/// All basis vectors as leaf-value columns: mean first, then wavelets in
/// canonical order.
pub(crate) fn basis_columns(tree: &UltrametricTree) -> Vec<Vec<Complex64>> {
    let n = tree.leaf_count();
    let mut columns = Vec::with_capacity(n);
    let top = Complex64::new(1.0 / tree.measure_f64_of(0).sqrt(), 0.0);
    columns.push(vec![top; n]);
    for &v in tree.internal_ids() {
        let p = tree.branching_of(v);
        let scale = 1.0 / tree.measure_f64_of(v).sqrt();
        for j in 1..p {
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for k in 0..p {
                let value = phase(j, k, p) * scale;
                let (start, end) = tree.leaf_span_of(tree.child_id(v, k));
                for slot in &mut col[start as usize..end as usize] {
                    *slot = value;
                }
            }
            columns.push(col);
        }
    }
    columns
}
