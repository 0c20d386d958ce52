//! The change of variable `ρ` from the leaf space onto an interval of the
//! positive half-line, and the export of wavelets as stepwise functions.
//!
//! `ρ` sends the point with digits `d_0 d_1 …` to `Σ_k d_k · μ(B_{k+1})`,
//! where `B_{k+1}` is the ball entered after digit `d_k`. Balls map onto
//! intervals whose length is exactly the ball measure, sibling intervals tile
//! their parent, and `|ρ(x) − ρ(y)|` never exceeds the diameter of the
//! smallest ball containing both points (the Hölder bound; for a top root and
//! unit top measure that diameter is the ultrametric distance itself).
//! Transporting a wavelet through `ρ` yields a compactly supported stepwise
//! function with `p_I` equal-width pieces valued at scaled roots of unity;
//! the family is orthonormal in L²(ℝ₊) with exact rational breakpoints.
//!
//! One formula covers the whole image: points beyond a unit ball are modeled
//! by enlarging the top ball (`top_measure > 1`, optionally with the root
//! placed below the top), which shifts vertex images further up the
//! half-line instead of requiring a second digit-expansion branch.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::tree::{TreeAddress, UltrametricTree};
use crate::wavelet::WaveletIndex;

/// A complex stepwise function with exact rational breakpoints: value `k`
/// holds on `[breakpoints[k], breakpoints[k+1])`, zero outside the support.
#[derive(Clone, Debug)]
pub struct PiecewiseConstantFn {
    breakpoints: Vec<BigRational>,
    values: Vec<Complex64>,
}

impl PiecewiseConstantFn {
    pub fn new(breakpoints: Vec<BigRational>, values: Vec<Complex64>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::DimensionMismatch {
                got: values.len(),
                expected: breakpoints.len().saturating_sub(1),
            });
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Spec(
                "piecewise breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(PiecewiseConstantFn {
            breakpoints,
            values,
        })
    }

    pub fn breakpoints(&self) -> &[BigRational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Support interval `[first breakpoint, last breakpoint]`.
    pub fn support(&self) -> (&BigRational, &BigRational) {
        (
            self.breakpoints.first().expect("at least two breakpoints"),
            self.breakpoints.last().expect("at least two breakpoints"),
        )
    }

    /// `(left, right, value)` triples in order.
    pub fn pieces(&self) -> impl Iterator<Item = (&BigRational, &BigRational, Complex64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(self.values.iter())
            .map(|(w, &v)| (&w[0], &w[1], v))
    }

    /// Point evaluation with half-open pieces; zero outside the support.
    pub fn eval(&self, t: &BigRational) -> Complex64 {
        let k = self.breakpoints.partition_point(|b| b <= t);
        if k == 0 || k == self.breakpoints.len() {
            return Complex64::new(0.0, 0.0);
        }
        self.values[k - 1]
    }

    /// L²(ℝ₊) inner product `∫ conj(self)·other dt`, conjugate-linear in
    /// `self`. Segment lengths are exact rationals; values are doubles.
    pub fn inner_product(&self, other: &PiecewiseConstantFn) -> Complex64 {
        let mut events: Vec<&BigRational> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .collect();
        events.sort();
        events.dedup();
        let mut acc = Complex64::new(0.0, 0.0);
        for pair in events.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let mid = (a + b) / BigInt::from(2);
            let va = self.eval(&mid);
            if va.norm_sqr() == 0.0 {
                continue;
            }
            let vb = other.eval(&mid);
            if vb.norm_sqr() == 0.0 {
                continue;
            }
            let len = (b - a).to_f64().unwrap_or(f64::NAN);
            acc += va.conj() * vb * len;
        }
        acc
    }

    /// `∫ |self|² dt`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.pieces()
            .map(|(a, b, v)| v.norm_sqr() * (b - a).to_f64().unwrap_or(f64::NAN))
            .sum()
    }
}

/// Image of the point addressed by `x` (non-leaf addresses stand for their
/// zero-digit continuation). Lexicographically ordered leaves map to
/// nondecreasing values; the image of the top ball is `[0, μ(D_top)]`.
pub fn rho(tree: &UltrametricTree, x: &TreeAddress) -> Result<BigRational> {
    let mut v = 0u32;
    let mut acc = BigRational::zero();
    for (k, &d) in x.digits().iter().enumerate() {
        let b = tree.branching_of(v);
        if d >= b {
            return Err(Error::AddressOutOfRange {
                address: x.to_string(),
                reason: format!("digit {d} at depth {k} exceeds branching {b}"),
            });
        }
        v = tree.child_id(v, d);
        acc += BigRational::from_integer(BigInt::from(d)) * tree.measure_of(v);
    }
    Ok(acc)
}

pub(crate) fn rho_id(tree: &UltrametricTree, vertex: u32) -> BigRational {
    let mut acc = BigRational::zero();
    let mut w = vertex;
    while let Some(up) = tree.parent_id(w) {
        acc += BigRational::from_integer(BigInt::from(tree.digit_of(w))) * tree.measure_of(w);
        w = up;
    }
    acc
}

/// The interval `[ρ(I), ρ(I) + μ(D_I)]` that the ball `D_I` maps onto.
pub fn ball_interval(
    tree: &UltrametricTree,
    vertex: &TreeAddress,
) -> Result<(BigRational, BigRational)> {
    let v = tree.resolve(vertex)?;
    let left = rho_id(tree, v);
    let right = &left + tree.measure_of(v);
    Ok((left, right))
}

/// Leaf address of the point whose image interval contains `t`. Intervals
/// are taken half-open, so a boundary value maps to the address whose image
/// starts exactly at `t` (the terminating digit expansion); the right edge of
/// the top interval maps to the last leaf.
pub fn rho_preimage(tree: &UltrametricTree, t: &BigRational) -> Result<TreeAddress> {
    if t.is_negative() || t > tree.top_measure() {
        return Err(Error::OutOfImage(
            t.to_string(),
            tree.top_measure().to_string(),
        ));
    }
    let mut v = 0u32;
    let mut left = BigRational::zero();
    let mut digits = Vec::new();
    while !tree.is_leaf_id(v) {
        let p = tree.branching_of(v);
        // Children of one vertex share the measure μ(D_v)/p.
        let child_measure = tree.measure_of(tree.child_id(v, 0)).clone();
        let offset = (t - &left) / &child_measure;
        let mut k = offset.floor().to_integer().to_u32().unwrap_or(p - 1);
        if k >= p {
            k = p - 1;
        }
        left += BigRational::from_integer(BigInt::from(k)) * &child_measure;
        digits.push(k);
        v = tree.child_id(v, k);
    }
    Ok(TreeAddress::from_digits(digits))
}

/// Both sides of the Hölder bound for the pair of points: the real gap
/// `|ρ(x) − ρ(y)|` and the diameter of the smallest ball containing both,
/// which dominates it. With the root at the top vertex and unit top measure
/// that diameter equals the ultrametric distance `|xy|`.
pub fn holder_gap(
    tree: &UltrametricTree,
    x: &TreeAddress,
    y: &TreeAddress,
) -> Result<(BigRational, BigRational)> {
    let px = tree.resolve_point(x)?;
    let py = tree.resolve_point(y)?;
    if px == py {
        return Ok((BigRational::zero(), BigRational::zero()));
    }
    let gap = (rho_id(tree, px) - rho_id(tree, py)).abs();
    let diameter = tree.measure_of(tree.meet_id(px, py)).clone();
    Ok((gap, diameter))
}

/// Transport the wavelet `ψ_idx` through `ρ`: a stepwise function on
/// `[ρ(I), ρ(I) + μ(D_I)]` with `p_I` equal-width pieces, the k-th valued
/// `exp(2πi·j·k/p_I)/√μ(D_I)`.
pub fn export_wavelet(tree: &UltrametricTree, idx: &WaveletIndex) -> Result<PiecewiseConstantFn> {
    let (v, p, _) = crate::wavelet::check_index(tree, idx)?;
    let base = rho_id(tree, v);
    let width = tree.measure_of(tree.child_id(v, 0)).clone();
    let scale = 1.0 / tree.measure_f64_of(v).sqrt();
    let breakpoints: Vec<BigRational> = (0..=p)
        .map(|k| &base + BigRational::from_integer(BigInt::from(k)) * &width)
        .collect();
    let values: Vec<Complex64> = (0..p)
        .map(|k| crate::wavelet::phase(idx.j, k, p) * scale)
        .collect();
    PiecewiseConstantFn::new(breakpoints, values)
}
