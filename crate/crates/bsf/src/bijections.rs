//! The three-way correspondence between plane trees on k+1 nodes, Dyck paths
//! of length 2k, and fixed-point-free non-crossing involutions of [2k] —
//! plus the identity expressing a covariance-induced tree functional as a
//! product over involution crossings.

use serde_json::json;

use crate::bare::bare_value;
use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::report::{Mismatch, VerificationReport};
use crate::trees::{plane_trees, PlaneTree, TreeLike};
use crate::wigner::CovarianceSpec;
use num::One;

/// A Dyck path stored by its heights c_0..c_(2k); step n is the pair
/// (c_(n−1), c_n), indexed 1..2k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyckPath {
    heights: Vec<u32>,
}

impl DyckPath {
    pub fn new(heights: Vec<u32>) -> Result<Self> {
        if heights.is_empty() {
            return Err(Error::InvalidDyckPath("no heights given".into()));
        }
        if heights.len().is_multiple_of(2) {
            return Err(Error::InvalidDyckPath(format!(
                "a path of length 2k has 2k+1 heights, found {}",
                heights.len()
            )));
        }
        if heights[0] != 0 || *heights.last().unwrap() != 0 {
            return Err(Error::InvalidDyckPath(
                "path must start and end at height 0".into(),
            ));
        }
        for w in heights.windows(2) {
            if w[1] != w[0] + 1 && (w[0] == 0 || w[1] != w[0] - 1) {
                return Err(Error::InvalidDyckPath(format!(
                    "step from {} to {} is not ±1 or dips below 0",
                    w[0], w[1]
                )));
            }
        }
        Ok(DyckPath { heights })
    }

    /// The empty path (k = 0).
    pub fn empty() -> Self {
        DyckPath { heights: vec![0] }
    }

    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    /// k, the number of ascending steps.
    pub fn half_length(&self) -> usize {
        (self.heights.len() - 1) / 2
    }

    /// Number of steps, 2k.
    pub fn len(&self) -> usize {
        self.heights.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether step n (1-based) ascends.
    pub fn is_ascent(&self, n: usize) -> bool {
        self.heights[n] > self.heights[n - 1]
    }

    /// Indices of ascending steps, 1-based.
    pub fn asc(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&n| self.is_ascent(n)).collect()
    }

    /// Indices of descending steps, 1-based.
    pub fn desc(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&n| !self.is_ascent(n)).collect()
    }

    pub fn to_updown(&self) -> String {
        (1..=self.len())
            .map(|n| if self.is_ascent(n) { 'U' } else { 'D' })
            .collect()
    }

    pub fn from_updown(s: &str) -> Result<Self> {
        let mut heights = vec![0u32];
        for (i, ch) in s.chars().enumerate() {
            let h = *heights.last().unwrap();
            match ch {
                'U' | 'u' => heights.push(h + 1),
                'D' | 'd' => {
                    if h == 0 {
                        return Err(Error::InvalidDyckPath(format!(
                            "step {} dips below 0",
                            i + 1
                        )));
                    }
                    heights.push(h - 1);
                }
                other => {
                    return Err(Error::InvalidDyckPath(format!(
                        "unexpected character {other:?} (want U or D)"
                    )));
                }
            }
        }
        DyckPath::new(heights)
    }
}

/// All Dyck paths of half-length k, ascending step chosen first (so the
/// staircase U^k D^k comes first); deterministic order.
pub fn enumerate_dyck_paths(k: usize) -> Vec<DyckPath> {
    let mut out = Vec::new();
    let mut heights = vec![0u32];
    fn go(heights: &mut Vec<u32>, steps_left: usize, out: &mut Vec<DyckPath>) {
        let h = *heights.last().unwrap();
        if steps_left == 0 {
            if h == 0 {
                out.push(DyckPath {
                    heights: heights.clone(),
                });
            }
            return;
        }
        if (h as usize) < steps_left {
            heights.push(h + 1);
            go(heights, steps_left - 1, out);
            heights.pop();
        }
        if h > 0 {
            heights.push(h - 1);
            go(heights, steps_left - 1, out);
            heights.pop();
        }
    }
    go(&mut heights, 2 * k, &mut out);
    out
}

/// A fixed-point-free involution of [2k] with no crossing
/// i < j < σ(i) < σ(j), stored as 1-based images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonCrossingInvolution {
    images: Vec<usize>,
}

impl NonCrossingInvolution {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let m = images.len();
        if !m.is_multiple_of(2) {
            return Err(Error::InvalidInvolution(format!(
                "domain size must be even, found {m}"
            )));
        }
        for (idx, &img) in images.iter().enumerate() {
            let i = idx + 1;
            if img == 0 || img > m {
                return Err(Error::InvalidInvolution(format!(
                    "image {img} of {i} is outside 1..={m}"
                )));
            }
            if img == i {
                return Err(Error::InvalidInvolution(format!("{i} is a fixed point")));
            }
            if images[img - 1] != i {
                return Err(Error::InvalidInvolution(format!(
                    "not an involution at {i}: maps to {img} which maps to {}",
                    images[img - 1]
                )));
            }
        }
        let inv = NonCrossingInvolution { images };
        let openers = inv.crossings();
        for (a, (i, si)) in openers.iter().enumerate() {
            for (j, sj) in openers.iter().skip(a + 1) {
                if j < si && si < sj {
                    return Err(Error::InvalidInvolution(format!(
                        "crossing pattern {i} < {j} < {si} < {sj}"
                    )));
                }
            }
        }
        Ok(inv)
    }

    /// σ(i), 1-based.
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    /// Domain size 2k.
    pub fn size(&self) -> usize {
        self.images.len()
    }

    /// The pairs (i, σ(i)) with i < σ(i), in increasing i.
    pub fn crossings(&self) -> Vec<(usize, usize)> {
        (1..=self.size())
            .filter(|&i| i < self.image(i))
            .map(|i| (i, self.image(i)))
            .collect()
    }

    /// 1-based image array, e.g. [2,1] for the transposition of [2].
    pub fn to_json(&self) -> serde_json::Value {
        json!(self.images)
    }
}

/// One edge crossing record from the tree walk: the child-subtree size and
/// the step indices at which the edge is crossed downward (s_v) and upward
/// (s_w).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeCrossing {
    pub subtree_size: usize,
    pub s_v: usize,
    pub s_w: usize,
}

fn walk(
    node: &PlaneTree,
    h: u32,
    heights: &mut Vec<u32>,
    crossings: &mut Vec<EdgeCrossing>,
) {
    // rightmost child first: the walk runs around the tree right to left
    for child in node.children().iter().rev() {
        let s_v = heights.len();
        heights.push(h + 1);
        walk(child, h + 1, heights, crossings);
        let s_w = heights.len();
        heights.push(h);
        let size = child.size();
        assert_eq!(
            s_w,
            s_v + 2 * (size - 1) + 1,
            "edge-time relation violated at step {s_v}"
        );
        crossings.push(EdgeCrossing {
            subtree_size: size,
            s_v,
            s_w,
        });
    }
}

/// The contour walk around a plane tree on k+1 nodes, rightmost child
/// first, yielding a Dyck path of length 2k. Each edge to a child subtree
/// of size s is crossed downward at some step s_v and upward at
/// s_w = s_v + 2(s−1) + 1; the relation is asserted during the walk.
pub fn plane_tree_to_dyck(t: &PlaneTree) -> DyckPath {
    let mut heights = vec![0u32];
    let mut crossings = Vec::new();
    walk(t, 0, &mut heights, &mut crossings);
    DyckPath { heights }
}

/// The per-edge crossing times of the same walk, in the order edges are
/// completed (deepest first).
pub fn edge_crossing_times(t: &PlaneTree) -> Vec<EdgeCrossing> {
    let mut heights = vec![0u32];
    let mut crossings = Vec::new();
    walk(t, 0, &mut heights, &mut crossings);
    crossings
}

/// Inverse of the walk: rebuilds the tree whose right-to-left contour is the
/// given path.
pub fn dyck_to_plane_tree(c: &DyckPath) -> PlaneTree {
    fn build(c: &DyckPath, pos: &mut usize) -> PlaneTree {
        let mut children_right_to_left = Vec::new();
        while *pos < c.len() && c.is_ascent(*pos + 1) {
            *pos += 1; // descend the edge
            let child = build(c, pos);
            debug_assert!(!c.is_ascent(*pos + 1), "expected the matching up-crossing");
            *pos += 1; // climb back
            children_right_to_left.push(child);
        }
        children_right_to_left.reverse();
        PlaneTree::new(children_right_to_left)
    }
    let mut pos = 0;
    let tree = build(c, &mut pos);
    debug_assert_eq!(pos, c.len());
    tree
}

/// Pairs each descending step n with the ascending step that crosses the
/// same edge of the contour — equivalently, the greatest m ≤ n with
/// (c_(m−1), c_m) = (c_n, c_(n−1)).
pub fn dyck_to_involution(c: &DyckPath) -> NonCrossingInvolution {
    let mut images = vec![0usize; c.len()];
    let mut stack: Vec<usize> = Vec::new();
    for n in 1..=c.len() {
        if c.is_ascent(n) {
            stack.push(n);
        } else {
            let m = stack.pop().expect("a valid path never dips below 0");
            images[n - 1] = m;
            images[m - 1] = n;
        }
    }
    NonCrossingInvolution { images }
}

/// Rebuilds the path whose ascent set is {i : i < σ(i)}.
pub fn involution_to_dyck(sigma: &NonCrossingInvolution) -> Result<DyckPath> {
    let mut heights = Vec::with_capacity(sigma.size() + 1);
    heights.push(0u32);
    for i in 1..=sigma.size() {
        let h = *heights.last().unwrap();
        if i < sigma.image(i) {
            heights.push(h + 1);
        } else {
            if h == 0 {
                return Err(Error::InvalidDyckPath(format!(
                    "closing step {i} dips below 0"
                )));
            }
            heights.push(h - 1);
        }
    }
    DyckPath::new(heights)
}

/// The crossing-weight product ∏_(i∈cr(σ)) β²·r(σ(i)−i). A lag beyond the
/// covariance table is a range error.
pub fn involution_pair_weight(
    sigma: &NonCrossingInvolution,
    cov: &CovarianceSpec,
) -> Result<Rat> {
    let mut acc = Rat::one();
    for (i, si) in sigma.crossings() {
        acc *= cov.beta_sq() * cov.r(si - i)?;
    }
    Ok(acc)
}

/// Checks B^r(t)/B^r_(|t|) = ∏_(i∈cr(σ_t)) β²·r(σ_t(i)−i) exactly for every
/// plane tree with at most `n_cap` nodes, where B^r_k = β²·r(2k−1) and σ_t
/// comes from the contour walk. The left side is computed as a product over
/// non-root subtrees so no division is needed.
pub fn verify_special_bare(
    n_cap: usize,
    cov: &CovarianceSpec,
    max_n: usize,
) -> Result<VerificationReport> {
    let weights = cov.bare_weights(n_cap.saturating_sub(1))?;
    let params = json!({
        "cov": cov.describe(),
        "n_cap": n_cap,
    });
    let statement = "B^r(t)/B^r_{|t|} = prod_{i in cr(sigma_t)} beta^2 r(sigma_t(i)-i)";
    for n in 1..=n_cap {
        for t in plane_trees(n, max_n)? {
            let mut lhs = Rat::one();
            for child in t.children() {
                lhs *= bare_value(child, &weights)?;
            }
            let sigma = dyck_to_involution(&plane_tree_to_dyck(&t));
            let rhs = involution_pair_weight(&sigma, cov)?;
            if lhs != rhs {
                return Ok(VerificationReport::fail(
                    statement,
                    params,
                    n_cap,
                    Mismatch::new(n, &lhs, &rhs),
                ));
            }
        }
    }
    Ok(VerificationReport::exact(statement, params, n_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{exact_int_div, factorial, rat, rat_int};
    use crate::trees::enumerate_plane_trees;
    use crate::wigner::{limit_trace_combinatorial, DiagonalLaw};
    use num::Zero;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn catalan(n: usize) -> usize {
        let c = exact_int_div(&factorial(2 * n), &(factorial(n) * factorial(n + 1))).unwrap();
        let digits = c.to_string();
        digits.parse().unwrap()
    }

    fn plane(s: &str) -> PlaneTree {
        PlaneTree::decode(s).unwrap()
    }

    #[test]
    fn walk_examples() {
        assert_eq!(plane_tree_to_dyck(&plane("()")), DyckPath::empty());
        assert_eq!(
            plane_tree_to_dyck(&plane("(())")).heights(),
            &[0, 1, 0]
        );
        // the two size-3 trees give the two paths of length 4
        let paths: BTreeSet<String> = enumerate_plane_trees(3, 14)
            .unwrap()
            .iter()
            .map(|t| plane_tree_to_dyck(t).to_updown())
            .collect();
        assert_eq!(
            paths,
            ["UUDD", "UDUD"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn walk_round_trips_exhaustively() {
        for k in 0..=7 {
            let mut seen = BTreeSet::new();
            for t in plane_trees(k + 1, 14).unwrap() {
                let path = plane_tree_to_dyck(&t);
                assert_eq!(path.half_length(), k);
                assert_eq!(dyck_to_plane_tree(&path), t, "tree {}", t);
                seen.insert(path.to_updown());
            }
            assert_eq!(seen.len(), catalan(k), "bijectivity at k = {k}");
            // and the other direction
            for path in enumerate_dyck_paths(k) {
                let t = dyck_to_plane_tree(&path);
                assert_eq!(plane_tree_to_dyck(&t), path);
            }
        }
    }

    #[test]
    fn dyck_counts_are_catalan() {
        for k in 0..=7 {
            assert_eq!(enumerate_dyck_paths(k).len(), catalan(k), "k = {k}");
        }
    }

    #[test]
    fn path_validation() {
        assert!(DyckPath::new(vec![0, 1, 2, 1, 0]).is_ok());
        assert!(DyckPath::new(vec![0, 1]).is_err()); // even height count
        assert!(DyckPath::new(vec![0, 1, 1, 1, 0]).is_err()); // flat step
        assert!(DyckPath::new(vec![1, 0, 1]).is_err()); // starts high
        assert!(DyckPath::from_updown("UDD").is_err()); // dips below 0
        assert!(DyckPath::from_updown("UDX").is_err());
        assert_eq!(
            DyckPath::from_updown("UUDD").unwrap().heights(),
            &[0, 1, 2, 1, 0]
        );
        assert_eq!(DyckPath::from_updown("").unwrap(), DyckPath::empty());
    }

    #[test]
    fn ascent_and_descent_sets_partition_steps() {
        let path = DyckPath::from_updown("UUDUDD").unwrap();
        assert_eq!(path.asc(), vec![1, 2, 4]);
        assert_eq!(path.desc(), vec![3, 5, 6]);
    }

    #[test]
    fn edge_times_satisfy_the_walk_relation() {
        for n in 1..=8 {
            for t in plane_trees(n, 14).unwrap() {
                for e in edge_crossing_times(&t) {
                    assert_eq!(e.s_w, e.s_v + 2 * (e.subtree_size - 1) + 1);
                }
            }
        }
    }

    #[test]
    fn figure_instance_path_on_four_nodes() {
        // the 4-node path: its middle edge is crossed down at step 2 and up
        // at step 5, and the induced involution sends 2 to 5
        let t = PlaneTree::path(4);
        let times = edge_crossing_times(&t);
        assert!(times.iter().any(|e| e.s_v == 2 && e.s_w == 5));
        let sigma = dyck_to_involution(&plane_tree_to_dyck(&t));
        assert_eq!(sigma.image(2), 5);
    }

    #[test]
    fn involution_examples() {
        let swap = dyck_to_involution(&DyckPath::from_updown("UD").unwrap());
        assert_eq!(swap, NonCrossingInvolution::new(vec![2, 1]).unwrap());
        // (0,1,2,1,0): pairs {2,3} and {1,4}
        let nested = dyck_to_involution(&DyckPath::from_updown("UUDD").unwrap());
        assert_eq!(nested.image(2), 3);
        assert_eq!(nested.image(1), 4);
        assert_eq!(nested.crossings(), vec![(1, 4), (2, 3)]);
    }

    /// Literal restatement of the pairing rule: σ(n) for a descending step n
    /// is the greatest m ≤ n with (c_(m−1), c_m) = (c_n, c_(n−1)).
    fn greatest_m_rule(c: &DyckPath) -> Vec<usize> {
        let h = c.heights();
        let mut images = vec![0usize; c.len()];
        for n in 1..=c.len() {
            if c.is_ascent(n) {
                continue;
            }
            let m = (1..=n)
                .rev()
                .find(|&m| h[m - 1] == h[n] && h[m] == h[n - 1])
                .expect("every descent has a matching ascent");
            images[n - 1] = m;
            images[m - 1] = n;
        }
        images
    }

    #[test]
    fn stack_pairing_matches_the_greatest_m_rule() {
        for k in 0..=6 {
            for path in enumerate_dyck_paths(k) {
                let sigma = dyck_to_involution(&path);
                let literal = greatest_m_rule(&path);
                assert_eq!(
                    (1..=path.len()).map(|i| sigma.image(i)).collect::<Vec<_>>(),
                    literal,
                    "path {}",
                    path.to_updown()
                );
            }
        }
    }

    #[test]
    fn induced_involutions_are_valid_and_cover_all() {
        for k in 0..=6 {
            let mut seen = BTreeSet::new();
            for path in enumerate_dyck_paths(k) {
                let sigma = dyck_to_involution(&path);
                // re-validate through the public constructor
                let images: Vec<usize> = (1..=path.len()).map(|i| sigma.image(i)).collect();
                let checked = NonCrossingInvolution::new(images.clone()).unwrap();
                // crossings are exactly the ascent set
                let asc: Vec<usize> = checked.crossings().iter().map(|&(i, _)| i).collect();
                assert_eq!(asc, path.asc());
                assert_eq!(checked.crossings().len(), k);
                // the path is recoverable
                assert_eq!(involution_to_dyck(&checked).unwrap(), path);
                seen.insert(images);
            }
            assert_eq!(seen.len(), catalan(k), "k = {k}");
        }
    }

    #[test]
    fn involution_count_matches_brute_force() {
        // generate every fixed-point-free involution of [2k], filter the
        // non-crossing ones, and compare against the Dyck-path image
        fn involutions(m: usize) -> Vec<Vec<usize>> {
            fn go(free: &[usize], images: &mut [usize], out: &mut Vec<Vec<usize>>) {
                if free.is_empty() {
                    out.push(images.to_vec());
                    return;
                }
                let i = free[0];
                for &j in &free[1..] {
                    images[i - 1] = j;
                    images[j - 1] = i;
                    let rest: Vec<usize> =
                        free.iter().copied().filter(|&x| x != i && x != j).collect();
                    go(&rest, images, out);
                }
            }
            let free: Vec<usize> = (1..=m).collect();
            let mut images = vec![0usize; m];
            let mut out = Vec::new();
            go(&free, &mut images, &mut out);
            out
        }
        for k in 1..=5 {
            let noncrossing = involutions(2 * k)
                .into_iter()
                .filter(|imgs| NonCrossingInvolution::new(imgs.clone()).is_ok())
                .count();
            assert_eq!(noncrossing, catalan(k), "k = {k}");
        }
    }

    #[test]
    fn involution_validation_rejects_bad_input() {
        assert!(NonCrossingInvolution::new(vec![1, 2]).is_err()); // fixed points
        assert!(NonCrossingInvolution::new(vec![2, 1, 3, 4]).is_err()); // fixed points
        assert!(NonCrossingInvolution::new(vec![2, 3, 1, 4]).is_err()); // not involutive
        assert!(NonCrossingInvolution::new(vec![3, 4, 1, 2]).is_err()); // crossing
        assert!(NonCrossingInvolution::new(vec![2, 1, 3]).is_err()); // odd size
        assert!(NonCrossingInvolution::new(vec![2, 1, 4, 3]).is_ok());
    }

    #[test]
    fn pair_weight_examples() {
        let constant = CovarianceSpec::constant_one(rat_int(1)).unwrap();
        let invlin = CovarianceSpec::inverse_linear(rat_int(2)).unwrap();
        for k in 0..=4 {
            for path in enumerate_dyck_paths(k) {
                let sigma = dyck_to_involution(&path);
                assert_eq!(
                    involution_pair_weight(&sigma, &constant).unwrap(),
                    rat_int(1)
                );
            }
        }
        // path-2 tree: single crossing at lag 1 → β²r(1) = 2/2 = 1
        let sigma = dyck_to_involution(&plane_tree_to_dyck(&plane("(())")));
        assert_eq!(involution_pair_weight(&sigma, &invlin).unwrap(), rat_int(1));
        // cherry: two crossings at lag 1 → 1·1
        let sigma = dyck_to_involution(&plane_tree_to_dyck(&plane("(()())")));
        assert_eq!(
            sigma
                .crossings()
                .iter()
                .map(|&(i, s)| s - i)
                .collect::<Vec<_>>(),
            vec![1, 1]
        );
        assert_eq!(involution_pair_weight(&sigma, &invlin).unwrap(), rat_int(1));
        // short table: a lag past the end errors
        let short = CovarianceSpec::table(rat_int(1), vec![rat_int(1), rat(1, 2)]).unwrap();
        let nested = dyck_to_involution(&DyckPath::from_updown("UUDD").unwrap());
        assert!(matches!(
            involution_pair_weight(&nested, &short),
            Err(Error::CovarianceLag { lag: 3, max: 1 })
        ));
    }

    #[test]
    fn special_bare_holds_for_named_families() {
        for cov in [
            CovarianceSpec::inverse_linear(rat_int(2)).unwrap(),
            CovarianceSpec::constant_one(rat_int(1)).unwrap(),
            CovarianceSpec::geometric(rat(1, 2), rat(-2, 3)).unwrap(),
        ] {
            let report = verify_special_bare(8, &cov, 14).unwrap();
            assert!(report.is_exact(), "{}", cov.describe());
        }
    }

    #[test]
    fn tree_sum_limit_equals_involution_sum() {
        // with a trivial diagonal the limit is Σ_σ ∏ β²r over 𝒥(2k)
        let law = DiagonalLaw::delta_one();
        for cov in [
            CovarianceSpec::inverse_linear(rat_int(2)).unwrap(),
            CovarianceSpec::geometric(rat_int(1), rat(1, 3)).unwrap(),
        ] {
            for k in 0..=6 {
                let by_trees = limit_trace_combinatorial(k, &cov, &law, 14).unwrap();
                let mut by_involutions = Rat::zero();
                for path in enumerate_dyck_paths(k) {
                    by_involutions +=
                        involution_pair_weight(&dyck_to_involution(&path), &cov).unwrap();
                }
                assert_eq!(by_trees, by_involutions, "{} k = {k}", cov.describe());
            }
        }
    }

    proptest! {
        /// Random rational covariance tables satisfy the crossing-product
        /// identity on every tree with up to 6 nodes.
        #[test]
        fn special_bare_holds_for_random_tables(
            nums in proptest::collection::vec(-6i64..=6, 11),
            dens in proptest::collection::vec(6i64..=9, 11),
        ) {
            let mut values = vec![rat_int(1)];
            for (n, d) in nums.iter().zip(&dens) {
                values.push(rat(*n, *d)); // |n/d| ≤ 1 by construction
            }
            let cov = CovarianceSpec::table(rat_int(1), values).unwrap();
            let report = verify_special_bare(6, &cov, 14).unwrap();
            prop_assert!(report.is_exact());
        }
    }

    #[test]
    fn to_json_uses_one_based_images() {
        let sigma = NonCrossingInvolution::new(vec![2, 1, 4, 3]).unwrap();
        assert_eq!(sigma.to_json(), serde_json::json!([2, 1, 4, 3]));
    }
}
