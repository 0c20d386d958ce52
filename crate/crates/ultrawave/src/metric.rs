//! Exact ultrametric distance, ball measures and membership.
//!
//! The distance between two points is the product of branching indices of the
//! edges along the directed path from the designated root `R` to the merge
//! vertex of the two points, with rising edges (toward infinity) contributing
//! `p` and falling edges contributing `p⁻¹`; each edge carries the branching
//! index of its upper vertex. This edge-labelled form covers all three
//! relative positions of the merge vertex and `R` with one formula and
//! resolves the endpoint-indexing ambiguity of the level-indexed products.
//! When the merge vertex is `R` itself the product is empty and the distance
//! is 1.
//!
//! Measures are independent of `R`; the identity
//! `distance(x, y) · μ(D_R) = μ(D_meet(x,y))` holds exactly, so for `R` at the
//! top vertex and top measure 1 the distance equals the meet-ball diameter.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::tree::{TreeAddress, UltrametricTree};

/// A ball `D_I`: all points descending from vertex `I`. Its diameter equals
/// its measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub vertex: TreeAddress,
    pub measure: BigRational,
}

impl Ball {
    /// The diameter of the ball equals its measure.
    pub fn diameter(&self) -> &BigRational {
        &self.measure
    }
}

impl UltrametricTree {
    /// Ultrametric distance between the points addressed by `x` and `y`.
    ///
    /// Non-leaf addresses stand for the point reached by continuing with zero
    /// digits. Returns 0 iff both addresses reach the same point.
    pub fn distance(&self, x: &TreeAddress, y: &TreeAddress) -> Result<BigRational> {
        let px = self.resolve_point(x)?;
        let py = self.resolve_point(y)?;
        if px == py {
            return Ok(BigRational::zero());
        }
        let meet = self.meet_id(px, py);
        let junction = self.meet_id(meet, self.root_id());

        let mut product = BigRational::one();
        // Rising edges from R up to the junction: each contributes the
        // branching index of its upper vertex.
        let mut v = self.root_id();
        while v != junction {
            v = self.parent_id(v).expect("junction is an ancestor of R");
            product *= BigRational::from_integer(self.branching_of(v).into());
        }
        // Falling edges from the junction down to the merge vertex.
        let mut v = meet;
        while v != junction {
            let up = self.parent_id(v).expect("junction is an ancestor of meet");
            product /= BigRational::from_integer(self.branching_of(up).into());
            v = up;
        }
        Ok(product)
    }

    /// Exact measure of the ball `D_I`; equals the ball diameter.
    pub fn ball_measure(&self, vertex: &TreeAddress) -> Result<BigRational> {
        let v = self.resolve(vertex)?;
        Ok(self.measure_of(v).clone())
    }

    /// The ball at `vertex` with its exact measure.
    pub fn ball(&self, vertex: &TreeAddress) -> Result<Ball> {
        Ok(Ball {
            vertex: vertex.clone(),
            measure: self.ball_measure(vertex)?,
        })
    }

    /// Characteristic-function test: true iff `x` lies in the ball `D_I`.
    pub fn ball_contains(&self, vertex: &TreeAddress, x: &TreeAddress) -> Result<bool> {
        self.resolve(vertex)?;
        self.resolve(x)?;
        Ok(vertex.is_prefix_of(x))
    }
}
