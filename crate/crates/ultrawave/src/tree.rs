//! Finite truncated directed trees with arbitrary branching indices.
//!
//! The working space is a single top ball subdivided to finite depth. Every
//! vertex is addressed by the digit sequence of the path from the top vertex;
//! leaves play the role of points at working resolution. A designated root
//! vertex `R` (the top vertex by default) anchors the partial order used by
//! the metric; moving `R` inside the tree exercises every distance case.
//!
//! Child order is frozen at construction and digits index children by that
//! order, so every quantity derived from the tree (wavelet phases included)
//! is reproducible from the spec alone.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Deserialize;

use crate::error::{Error, Result};

/// Hard cap on the vertex count of a constructed tree.
pub const MAX_VERTICES: u64 = 1 << 26;

/// Sentinel for "no vertex" in the arena.
const NONE: u32 = u32::MAX;

/// A vertex or point identifier: the digit sequence of the path from the top
/// vertex. The empty sequence addresses the top vertex; a digit sequence
/// reaching a childless vertex addresses a leaf ball (a point at working
/// resolution).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeAddress(Vec<u32>);

impl TreeAddress {
    /// The address of the top vertex.
    pub fn top() -> Self {
        TreeAddress(Vec::new())
    }

    pub fn from_digits(digits: Vec<u32>) -> Self {
        TreeAddress(digits)
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.0.is_empty()
    }

    /// The address one level down, through child `digit`.
    pub fn child(&self, digit: u32) -> Self {
        let mut d = self.0.clone();
        d.push(digit);
        TreeAddress(d)
    }

    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(TreeAddress(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// True iff `self` is a (non-strict) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Self) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Longest common prefix of the two addresses.
    pub fn common_prefix(&self, other: &Self) -> Self {
        let n = self
            .0
            .iter()
            .zip(other.0.iter())
            .take_while(|(a, b)| a == b)
            .count();
        TreeAddress(self.0[..n].to_vec())
    }

    /// Parse an address string: digits concatenated (`"011"`) or separated by
    /// dots (`"0.2.11"`). The empty string is the top vertex. Syntax only;
    /// range checks against a tree happen in [`UltrametricTree::parse_address`].
    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(TreeAddress::top());
        }
        let digits: Vec<u32> = if s.contains('.') {
            s.split('.')
                .map(|part| {
                    part.parse::<u32>().map_err(|_| {
                        Error::AddressParse(s.to_string(), format!("bad digit `{part}`"))
                    })
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10).ok_or_else(|| {
                        Error::AddressParse(s.to_string(), format!("bad digit `{c}`"))
                    })
                })
                .collect::<Result<_>>()?
        };
        Ok(TreeAddress(digits))
    }
}

impl std::fmt::Display for TreeAddress {
    /// Compact form: digits concatenated when all are single-digit, dotted
    /// otherwise. [`UltrametricTree::format_address`] applies the tree-wide
    /// rule instead.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.iter().all(|&d| d < 10) {
            for d in &self.0 {
                write!(f, "{d}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl std::fmt::Debug for TreeAddress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TreeAddress(\"{self}\")")
    }
}

/// Branching description of a tree to construct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BranchingSpec {
    /// Constant branching index `p` down to `depth`.
    Homogeneous { p: u32, depth: u32 },
    /// One branching index per level, top to bottom; all leaves share the
    /// same depth.
    PerLevel(Vec<u32>),
    /// Recursive description assigning each vertex its children. An empty
    /// child list is a leaf, so leaves may sit at different depths.
    Explicit(ExplicitNode),
}

/// One vertex of an [`BranchingSpec::Explicit`] description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitNode(pub Vec<ExplicitNode>);

impl BranchingSpec {
    pub fn homogeneous(p: u32, depth: u32) -> Self {
        BranchingSpec::Homogeneous { p, depth }
    }

    pub fn per_level(levels: &[u32]) -> Self {
        BranchingSpec::PerLevel(levels.to_vec())
    }

    fn validate(&self) -> Result<()> {
        match self {
            BranchingSpec::Homogeneous { p, depth } => {
                if *p < 2 {
                    return Err(Error::InvalidBranching {
                        p: *p as u64,
                        vertex: "(all)".into(),
                    });
                }
                if *depth < 1 {
                    return Err(Error::InvalidDepth);
                }
            }
            BranchingSpec::PerLevel(levels) => {
                if levels.is_empty() {
                    return Err(Error::InvalidDepth);
                }
                if let Some(&p) = levels.iter().find(|&&p| p < 2) {
                    return Err(Error::InvalidBranching {
                        p: p as u64,
                        vertex: "(level)".into(),
                    });
                }
            }
            BranchingSpec::Explicit(top) => {
                if top.0.is_empty() {
                    return Err(Error::InvalidDepth);
                }
                validate_explicit(top, &mut Vec::new())?;
            }
        }
        Ok(())
    }

    /// Total vertex count, checked against [`MAX_VERTICES`].
    fn vertex_count(&self) -> Result<u64> {
        let count = match self {
            BranchingSpec::Homogeneous { p, depth } => count_uniform(&vec![*p; *depth as usize])?,
            BranchingSpec::PerLevel(levels) => count_uniform(levels)?,
            BranchingSpec::Explicit(top) => count_explicit(top),
        };
        if count > MAX_VERTICES {
            return Err(Error::TreeTooLarge {
                vertices: count,
                limit: MAX_VERTICES,
            });
        }
        Ok(count)
    }
}

fn validate_explicit(node: &ExplicitNode, path: &mut Vec<u32>) -> Result<()> {
    if node.0.len() == 1 {
        return Err(Error::InvalidBranching {
            p: 1,
            vertex: TreeAddress(path.clone()).to_string(),
        });
    }
    for (k, child) in node.0.iter().enumerate() {
        path.push(k as u32);
        validate_explicit(child, path)?;
        path.pop();
    }
    Ok(())
}

fn count_uniform(levels: &[u32]) -> Result<u64> {
    let mut total: u64 = 1;
    let mut width: u64 = 1;
    for &p in levels {
        width = width
            .checked_mul(p as u64)
            .filter(|&w| w <= MAX_VERTICES)
            .ok_or(Error::TreeTooLarge {
                vertices: u64::MAX,
                limit: MAX_VERTICES,
            })?;
        total += width;
        if total > MAX_VERTICES {
            return Err(Error::TreeTooLarge {
                vertices: total,
                limit: MAX_VERTICES,
            });
        }
    }
    Ok(total)
}

fn count_explicit(node: &ExplicitNode) -> u64 {
    1 + node.0.iter().map(count_explicit).sum::<u64>()
}

/// A finite truncated directed tree: per-vertex branching indices, frozen
/// child order, exact rational ball measures, and a designated root `R`.
///
/// Immutable after construction; all methods take `&self` and the structure
/// is safe to share across threads.
pub struct UltrametricTree {
    parent: Vec<u32>,
    digit: Vec<u32>,
    depth: Vec<u32>,
    first_child: Vec<u32>,
    branching: Vec<u32>,
    measure: Vec<BigRational>,
    measure_f64: Vec<f64>,
    /// Half-open range of lexicographic leaf indices covered by each subtree.
    leaf_span: Vec<(u32, u32)>,
    /// Leaf vertex ids in lexicographic (digit) order.
    leaves: Vec<u32>,
    /// Internal vertex ids in depth-first preorder (lexicographic address order).
    internal_preorder: Vec<u32>,
    /// Offset of each internal vertex's block in the flat wavelet
    /// coefficient layout; `NONE` for leaves.
    wavelet_offset: Vec<u32>,
    root: u32,
    top_measure: BigRational,
    max_branching: u32,
    max_depth: u32,
}

impl UltrametricTree {
    /// Construct the tree described by `spec`, with designated root `root`
    /// (top vertex when `None`) and the given top-ball measure.
    pub fn build(
        spec: &BranchingSpec,
        root: Option<&TreeAddress>,
        top_measure: BigRational,
    ) -> Result<Self> {
        spec.validate()?;
        let total = spec.vertex_count()? as usize;
        if !top_measure.is_positive() {
            return Err(Error::InvalidTopMeasure(top_measure.to_string()));
        }

        let mut parent = Vec::with_capacity(total);
        let mut digit = Vec::with_capacity(total);
        let mut depth = Vec::with_capacity(total);
        let mut first_child = vec![NONE; total];
        let mut branching = vec![0u32; total];
        let mut measure = Vec::with_capacity(total);

        // Breadth-first layout: each vertex's children occupy a contiguous
        // id range, in digit order.
        enum Children<'a> {
            Uniform(&'a [u32]),
            Node(&'a ExplicitNode),
        }
        let levels_storage;
        let top_children = match spec {
            BranchingSpec::Homogeneous { p, depth } => {
                levels_storage = vec![*p; *depth as usize];
                Children::Uniform(&levels_storage)
            }
            BranchingSpec::PerLevel(levels) => {
                levels_storage = levels.clone();
                Children::Uniform(&levels_storage)
            }
            BranchingSpec::Explicit(node) => Children::Node(node),
        };

        parent.push(NONE);
        digit.push(0);
        depth.push(0);
        measure.push(top_measure.clone());

        let mut queue: std::collections::VecDeque<(u32, Children)> =
            std::collections::VecDeque::new();
        queue.push_back((0, top_children));
        while let Some((v, children)) = queue.pop_front() {
            let d = depth[v as usize];
            let count = match &children {
                Children::Uniform(levels) => {
                    if (d as usize) < levels.len() {
                        levels[d as usize]
                    } else {
                        0
                    }
                }
                Children::Node(node) => node.0.len() as u32,
            };
            if count == 0 {
                continue;
            }
            branching[v as usize] = count;
            first_child[v as usize] = parent.len() as u32;
            let child_measure = &measure[v as usize] / BigInt::from(count);
            for k in 0..count {
                let id = parent.len() as u32;
                parent.push(v);
                digit.push(k);
                depth.push(d + 1);
                measure.push(child_measure.clone());
                let sub = match &children {
                    Children::Uniform(levels) => Children::Uniform(levels),
                    Children::Node(node) => Children::Node(&node.0[k as usize]),
                };
                queue.push_back((id, sub));
            }
        }
        debug_assert_eq!(parent.len(), total);

        // Depth-first pass: lexicographic leaf order, subtree leaf spans, and
        // the wavelet coefficient layout.
        let mut leaves = Vec::new();
        let mut leaf_span = vec![(0u32, 0u32); total];
        let mut internal_preorder = Vec::new();
        let mut wavelet_offset = vec![NONE; total];
        let mut next_offset = 0u32;
        let mut stack: Vec<(u32, bool)> = vec![(0, false)];
        while let Some((v, done)) = stack.pop() {
            let vu = v as usize;
            if done {
                let fc = first_child[vu];
                let last = fc + branching[vu] - 1;
                leaf_span[vu] = (leaf_span[fc as usize].0, leaf_span[last as usize].1);
                continue;
            }
            if branching[vu] == 0 {
                let idx = leaves.len() as u32;
                leaves.push(v);
                leaf_span[vu] = (idx, idx + 1);
            } else {
                internal_preorder.push(v);
                wavelet_offset[vu] = next_offset;
                next_offset += branching[vu] - 1;
                stack.push((v, true));
                let fc = first_child[vu];
                for k in (0..branching[vu]).rev() {
                    stack.push((fc + k, false));
                }
            }
        }
        debug_assert_eq!(next_offset as usize, leaves.len() - 1);

        let measure_f64: Vec<f64> = measure
            .iter()
            .map(|m| m.to_f64().unwrap_or(f64::NAN))
            .collect();
        let max_branching = branching.iter().copied().max().unwrap_or(0);
        let max_depth = depth.iter().copied().max().unwrap_or(0);

        let mut tree = UltrametricTree {
            parent,
            digit,
            depth,
            first_child,
            branching,
            measure,
            measure_f64,
            leaf_span,
            leaves,
            internal_preorder,
            wavelet_offset,
            root: 0,
            top_measure,
            max_branching,
            max_depth,
        };
        if let Some(r) = root {
            tree.root = tree.resolve(r)?;
        }
        Ok(tree)
    }

    /// Parse the tree-spec file format and build the tree.
    ///
    /// ```json
    /// {"homogeneous": {"p": 2, "depth": 3}, "root": "01", "top_measure": "3/2"}
    /// {"per_level": [2, 3, 2]}
    /// {"explicit": [[[],[]], [[],[],[]]]}
    /// ```
    pub fn from_spec_json(text: &str) -> Result<Self> {
        let file: TreeSpecFile = serde_json::from_str(text)?;
        let spec = match file.shape {
            ShapeField::Homogeneous { p, depth } => BranchingSpec::Homogeneous { p, depth },
            ShapeField::PerLevel(levels) => BranchingSpec::PerLevel(levels),
            ShapeField::Explicit(node) => BranchingSpec::Explicit(convert_nested(&node)),
        };
        let top_measure = match &file.top_measure {
            None => BigRational::one(),
            Some(s) => parse_rational(s)?,
        };
        let root = file.root.as_deref().map(TreeAddress::parse).transpose()?;
        UltrametricTree::build(&spec, root.as_ref(), top_measure)
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn internal_count(&self) -> usize {
        self.internal_preorder.len()
    }

    /// Number of wavelet indices, `Σ (p_I − 1) = N − 1`.
    pub fn wavelet_count(&self) -> usize {
        self.leaf_count() - 1
    }

    pub fn depth(&self) -> u32 {
        self.max_depth
    }

    pub fn top_measure(&self) -> &BigRational {
        &self.top_measure
    }

    pub fn max_branching(&self) -> u32 {
        self.max_branching
    }

    /// The designated root vertex `R`.
    pub fn root_address(&self) -> TreeAddress {
        self.address_of(self.root)
    }

    /// Deterministic lexicographic enumeration of the leaf balls. This order
    /// defines the index layout of grid functions.
    pub fn enumerate_leaves(&self) -> Vec<TreeAddress> {
        self.leaves.iter().map(|&v| self.address_of(v)).collect()
    }

    /// Internal vertices in depth-first preorder (lexicographic address order).
    pub fn internal_vertices(&self) -> Vec<TreeAddress> {
        self.internal_preorder
            .iter()
            .map(|&v| self.address_of(v))
            .collect()
    }

    /// Every vertex of the tree in depth-first preorder.
    pub fn vertices(&self) -> Vec<TreeAddress> {
        let mut out = Vec::with_capacity(self.vertex_count());
        let mut stack = vec![0u32];
        while let Some(v) = stack.pop() {
            out.push(self.address_of(v));
            for k in (0..self.branching[v as usize]).rev() {
                stack.push(self.first_child[v as usize] + k);
            }
        }
        out
    }

    /// The merge vertex: deepest vertex whose subtree contains both `x` and
    /// `y`, i.e. the longest common prefix.
    pub fn meet(&self, x: &TreeAddress, y: &TreeAddress) -> Result<TreeAddress> {
        self.resolve(x)?;
        self.resolve(y)?;
        Ok(x.common_prefix(y))
    }

    /// Partial order toward infinity: `u ≤ v` iff `v`'s address is a prefix
    /// of `u`'s (`v` lies on the path from `u` to infinity).
    pub fn leq(&self, u: &TreeAddress, v: &TreeAddress) -> Result<bool> {
        self.resolve(u)?;
        self.resolve(v)?;
        Ok(v.is_prefix_of(u))
    }

    /// True iff `x` addresses a leaf (a point at working resolution).
    pub fn is_leaf(&self, x: &TreeAddress) -> Result<bool> {
        let v = self.resolve(x)?;
        Ok(self.branching[v as usize] == 0)
    }

    /// Branching index of the vertex at `x` (0 for leaves).
    pub fn branching_at(&self, x: &TreeAddress) -> Result<u32> {
        let v = self.resolve(x)?;
        Ok(self.branching[v as usize])
    }

    /// Render an address using the tree-wide rule: digits concatenated when
    /// every branching index is ≤ 10, dot-separated otherwise.
    pub fn format_address(&self, addr: &TreeAddress) -> String {
        if self.max_branching <= 10 {
            addr.digits()
                .iter()
                .map(|d| d.to_string())
                .collect::<String>()
        } else {
            addr.digits()
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Parse an address string and range-check it against this tree. Follows
    /// the tree-wide rule: on trees with a branching index above 10 the
    /// string is read as dot-separated components (a bare `"10"` is the
    /// single digit ten there, not two digits).
    pub fn parse_address(&self, s: &str) -> Result<TreeAddress> {
        let addr = if self.max_branching <= 10 || s.is_empty() {
            TreeAddress::parse(s)?
        } else {
            let digits = s
                .split('.')
                .map(|part| {
                    part.parse::<u32>().map_err(|_| {
                        Error::AddressParse(s.to_string(), format!("bad digit `{part}`"))
                    })
                })
                .collect::<Result<_>>()?;
            TreeAddress::from_digits(digits)
        };
        self.resolve(&addr)?;
        Ok(addr)
    }

    // ---- id-level accessors used by the numeric modules ----

    pub(crate) fn resolve(&self, addr: &TreeAddress) -> Result<u32> {
        let mut v = 0u32;
        for (k, &d) in addr.digits().iter().enumerate() {
            let b = self.branching[v as usize];
            if d >= b {
                let reason = if b == 0 {
                    format!("digit {} descends below a leaf at depth {}", d, k)
                } else {
                    format!("digit {} at depth {} exceeds branching {}", d, k, b)
                };
                return Err(Error::AddressOutOfRange {
                    address: addr.to_string(),
                    reason,
                });
            }
            v = self.first_child[v as usize] + d;
        }
        Ok(v)
    }

    pub(crate) fn address_of(&self, mut v: u32) -> TreeAddress {
        let mut digits = Vec::with_capacity(self.depth[v as usize] as usize);
        while v != 0 {
            digits.push(self.digit[v as usize]);
            v = self.parent[v as usize];
        }
        digits.reverse();
        TreeAddress(digits)
    }

    pub(crate) fn root_id(&self) -> u32 {
        self.root
    }

    pub(crate) fn parent_id(&self, v: u32) -> Option<u32> {
        let p = self.parent[v as usize];
        (p != NONE).then_some(p)
    }

    pub(crate) fn child_id(&self, v: u32, digit: u32) -> u32 {
        debug_assert!(digit < self.branching[v as usize]);
        self.first_child[v as usize] + digit
    }

    pub(crate) fn digit_of(&self, v: u32) -> u32 {
        self.digit[v as usize]
    }

    pub(crate) fn depth_of(&self, v: u32) -> u32 {
        self.depth[v as usize]
    }

    pub(crate) fn branching_of(&self, v: u32) -> u32 {
        self.branching[v as usize]
    }

    pub(crate) fn is_leaf_id(&self, v: u32) -> bool {
        self.branching[v as usize] == 0
    }

    pub(crate) fn measure_of(&self, v: u32) -> &BigRational {
        &self.measure[v as usize]
    }

    pub(crate) fn measure_f64_of(&self, v: u32) -> f64 {
        self.measure_f64[v as usize]
    }

    pub(crate) fn leaf_ids(&self) -> &[u32] {
        &self.leaves
    }

    pub(crate) fn leaf_span_of(&self, v: u32) -> (u32, u32) {
        self.leaf_span[v as usize]
    }

    pub(crate) fn internal_ids(&self) -> &[u32] {
        &self.internal_preorder
    }

    pub(crate) fn wavelet_offset_of(&self, v: u32) -> u32 {
        self.wavelet_offset[v as usize]
    }

    /// Merge vertex of two vertices given by id.
    pub(crate) fn meet_id(&self, mut a: u32, mut b: u32) -> u32 {
        while self.depth[a as usize] > self.depth[b as usize] {
            a = self.parent[a as usize];
        }
        while self.depth[b as usize] > self.depth[a as usize] {
            b = self.parent[b as usize];
        }
        while a != b {
            a = self.parent[a as usize];
            b = self.parent[b as usize];
        }
        a
    }

    /// The point of the absolute carried by a vertex: descend through child 0
    /// until a leaf is reached.
    pub(crate) fn zero_extend(&self, mut v: u32) -> u32 {
        while self.branching[v as usize] != 0 {
            v = self.first_child[v as usize];
        }
        v
    }

    /// Resolve an address and zero-extend it to its leaf point.
    pub(crate) fn resolve_point(&self, addr: &TreeAddress) -> Result<u32> {
        Ok(self.zero_extend(self.resolve(addr)?))
    }
}

impl std::fmt::Debug for UltrametricTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UltrametricTree")
            .field("vertices", &self.vertex_count())
            .field("leaves", &self.leaf_count())
            .field("depth", &self.max_depth)
            .field("root", &self.root_address().to_string())
            .field("top_measure", &self.top_measure.to_string())
            .finish()
    }
}

/// Shared handle used by grid functions, coefficients and kernels.
pub type TreeHandle = Arc<UltrametricTree>;

pub(crate) fn same_tree(a: &TreeHandle, b: &TreeHandle) -> bool {
    Arc::ptr_eq(a, b)
}

/// Parse a rational given as `"p/q"` or a plain integer string.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim()).map_err(|e| Error::Spec(format!("bad rational `{s}`: {e}")))
}

/// Render a rational as `p/q` (or just `p` when the denominator is 1).
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

/// Nearest double of an exact rational.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Deserialize)]
struct TreeSpecFile {
    #[serde(flatten)]
    shape: ShapeField,
    #[serde(default)]
    root: Option<String>,
    #[serde(default)]
    top_measure: Option<String>,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum ShapeField {
    Homogeneous { p: u32, depth: u32 },
    PerLevel(Vec<u32>),
    Explicit(NestedSpec),
}

#[derive(Deserialize)]
#[serde(transparent)]
struct NestedSpec(Vec<NestedSpec>);

fn convert_nested(node: &NestedSpec) -> ExplicitNode {
    ExplicitNode(node.0.iter().map(convert_nested).collect())
}
