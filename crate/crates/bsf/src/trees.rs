//! Rooted plane trees, rooted unordered shapes, exhaustive enumeration, and
//! the combinatorial statistics attached to them (tree factorial, symmetry
//! factor, increasing-labelling count, plane-embedding count, multiplicative
//! node weights).
//!
//! Trees travel as balanced-parenthesis strings: a node is written as `(`,
//! followed by the encodings of its children, followed by `)`. Plane trees
//! keep child order; shapes store children sorted by their encodings, which
//! makes the encoding a canonical form. All enumerations emit trees in
//! lexicographic order of encoding, so output order is reproducible.

use std::fmt;

use num::{BigInt, One};

use crate::error::{Error, Result};
use crate::rational::{exact_int_div, factorial, Rat};
use crate::series::SeriesSpec;

/// Default cap on tree sizes accepted by the enumeration entry points.
pub const DEFAULT_MAX_N: usize = 14;

fn check_size(n: usize, max_n: usize) -> Result<()> {
    if n == 0 || n > max_n {
        Err(Error::SizeRange { n, max: max_n })
    } else {
        Ok(())
    }
}

/// Access to rooted-tree structure shared by plane trees and shapes.
pub trait TreeLike: Sized {
    fn children(&self) -> &[Self];

    fn outdegree(&self) -> usize {
        self.children().len()
    }

    /// Number of nodes.
    fn size(&self) -> usize {
        1 + self.children().iter().map(Self::size).sum::<usize>()
    }

    /// Calls `f` on every node, parent before children.
    fn visit(&self, f: &mut impl FnMut(&Self)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }
}

/// A rooted tree with ordered children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlaneTree {
    children: Vec<PlaneTree>,
}

impl TreeLike for PlaneTree {
    fn children(&self) -> &[Self] {
        &self.children
    }
}

impl PlaneTree {
    pub fn leaf() -> Self {
        PlaneTree { children: vec![] }
    }

    pub fn new(children: Vec<PlaneTree>) -> Self {
        PlaneTree { children }
    }

    /// The path on n nodes (each node has one child except the last).
    pub fn path(n: usize) -> Self {
        assert!(n >= 1);
        let mut t = PlaneTree::leaf();
        for _ in 1..n {
            t = PlaneTree::new(vec![t]);
        }
        t
    }

    pub fn encode(&self) -> String {
        let mut out = String::with_capacity(2 * self.size());
        self.write_encoding(&mut out);
        out
    }

    fn write_encoding(&self, out: &mut String) {
        out.push('(');
        for c in &self.children {
            c.write_encoding(out);
        }
        out.push(')');
    }

    pub fn decode(s: &str) -> Result<PlaneTree> {
        let bytes = s.as_bytes();
        let (tree, used) = parse_node(bytes, 0)?;
        if used != bytes.len() {
            return Err(Error::Parse(format!(
                "trailing input after position {used} in tree encoding {s:?}"
            )));
        }
        Ok(tree)
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

fn parse_node(bytes: &[u8], pos: usize) -> Result<(PlaneTree, usize)> {
    if bytes.get(pos) != Some(&b'(') {
        return Err(Error::Parse(format!(
            "expected '(' at position {pos} in tree encoding"
        )));
    }
    let mut at = pos + 1;
    let mut children = Vec::new();
    while bytes.get(at) == Some(&b'(') {
        let (child, next) = parse_node(bytes, at)?;
        children.push(child);
        at = next;
    }
    if bytes.get(at) != Some(&b')') {
        return Err(Error::Parse(format!(
            "expected ')' at position {at} in tree encoding"
        )));
    }
    Ok((PlaneTree { children }, at + 1))
}

/// Iterator over all plane trees with `n` nodes in lexicographic encoding
/// order. Trees are produced one at a time from a balanced-parenthesis
/// successor walk, so the full family is never materialized.
///
/// An n-node tree encodes as `(w)` where `w` ranges over the balanced
/// strings of length 2(n-1), so the walk advances the inner slice.
pub struct PlaneTreeIter {
    buf: Option<Vec<u8>>,
}

impl PlaneTreeIter {
    fn new(n: usize) -> Self {
        // Lexicographically smallest inner string: all opens, then all closes.
        let mut buf = Vec::with_capacity(2 * n);
        buf.push(b'(');
        buf.extend(std::iter::repeat_n(b'(', n - 1));
        buf.extend(std::iter::repeat_n(b')', n - 1));
        buf.push(b')');
        PlaneTreeIter { buf: Some(buf) }
    }
}

impl Iterator for PlaneTreeIter {
    type Item = PlaneTree;

    fn next(&mut self) -> Option<PlaneTree> {
        let buf = self.buf.as_mut()?;
        let (tree, used) = parse_node(buf, 0).expect("successor walk preserves balance");
        debug_assert_eq!(used, buf.len());
        let len = buf.len();
        if len == 2 || !advance_balanced(&mut buf[1..len - 1]) {
            self.buf = None;
        }
        Some(tree)
    }
}

/// Rewrites `s` to the next balanced string in lexicographic order
/// ('(' < ')'); returns false when `s` is already the last one.
fn advance_balanced(s: &mut [u8]) -> bool {
    let len = s.len();
    let n = len / 2;
    let mut opens = vec![0usize; len + 1];
    for i in 0..len {
        opens[i + 1] = opens[i] + usize::from(s[i] == b'(');
    }
    // Find the rightmost '(' that can become ')' while the prefix stays
    // completable, then fill the tail with the smallest completion:
    // remaining opens first, remaining closes after.
    for i in (0..len).rev() {
        if s[i] != b'(' {
            continue;
        }
        let o = opens[i];
        let c = i - o;
        if c < o && c < n {
            s[i] = b')';
            let rem_opens = n - o;
            for (offset, slot) in s[i + 1..].iter_mut().enumerate() {
                *slot = if offset < rem_opens { b'(' } else { b')' };
            }
            return true;
        }
    }
    false
}

/// Streaming enumeration of plane trees with `n` nodes.
pub fn plane_trees(n: usize, max_n: usize) -> Result<PlaneTreeIter> {
    check_size(n, max_n)?;
    Ok(PlaneTreeIter::new(n))
}

/// All plane trees with `n` nodes, in lexicographic encoding order.
pub fn enumerate_plane_trees(n: usize, max_n: usize) -> Result<Vec<PlaneTree>> {
    Ok(plane_trees(n, max_n)?.collect())
}

/// A rooted tree with unordered children, stored canonically: children are
/// sorted by encoding, so structural equality is isomorphism of rooted trees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootedTreeShape {
    children: Vec<RootedTreeShape>,
}

impl TreeLike for RootedTreeShape {
    fn children(&self) -> &[Self] {
        &self.children
    }
}

impl RootedTreeShape {
    pub fn leaf() -> Self {
        RootedTreeShape { children: vec![] }
    }

    /// Builds a shape from children in any order; they are sorted into
    /// canonical position.
    pub fn from_children(mut children: Vec<RootedTreeShape>) -> Self {
        children.sort_by_cached_key(RootedTreeShape::encode);
        RootedTreeShape { children }
    }

    pub fn encode(&self) -> String {
        let mut out = String::with_capacity(2 * self.size());
        self.write_encoding(&mut out);
        out
    }

    fn write_encoding(&self, out: &mut String) {
        out.push('(');
        for c in &self.children {
            c.write_encoding(out);
        }
        out.push(')');
    }

    /// The canonical plane embedding (children in sorted order).
    pub fn to_plane(&self) -> PlaneTree {
        PlaneTree::new(self.children.iter().map(Self::to_plane).collect())
    }

    /// Runs of equal children with their multiplicities.
    fn child_multiplicities(&self) -> Vec<(&RootedTreeShape, usize)> {
        let mut runs = Vec::new();
        let mut i = 0;
        while i < self.children.len() {
            let mut j = i;
            while j < self.children.len() && self.children[j] == self.children[i] {
                j += 1;
            }
            runs.push((&self.children[i], j - i));
            i = j;
        }
        runs
    }
}

impl fmt::Display for RootedTreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Forgets child order: the shape of a plane tree, independent of the order
/// in which children are listed at every node.
pub fn shape_of(t: &PlaneTree) -> RootedTreeShape {
    RootedTreeShape::from_children(t.children().iter().map(shape_of).collect())
}

/// All shapes with `n` nodes, enumerated directly over child multisets
/// (never via plane-tree deduplication), in lexicographic encoding order.
pub fn enumerate_rooted_shapes(n: usize, max_n: usize) -> Result<Vec<RootedTreeShape>> {
    check_size(n, max_n)?;
    // by_size[s] lists every shape with s nodes together with its encoding,
    // sorted by encoding.
    let mut by_size: Vec<Vec<(RootedTreeShape, String)>> = vec![Vec::new(); n + 1];
    if n >= 1 {
        by_size[1] = vec![(RootedTreeShape::leaf(), "()".to_string())];
    }
    for s in 2..=n {
        let mut acc = Vec::new();
        let mut current = Vec::new();
        collect_child_multisets(&by_size, s - 1, "", &mut current, &mut acc);
        acc.sort_by(|a, b| a.1.cmp(&b.1));
        by_size[s] = acc;
    }
    Ok(by_size
        .swap_remove(n)
        .into_iter()
        .map(|(shape, _)| shape)
        .collect())
}

/// Extends `current` (a weakly increasing child list, every encoding
/// ≥ `min_enc`) by shapes totalling `remaining` nodes and records each
/// completed root.
fn collect_child_multisets(
    by_size: &[Vec<(RootedTreeShape, String)>],
    remaining: usize,
    min_enc: &str,
    current: &mut Vec<RootedTreeShape>,
    acc: &mut Vec<(RootedTreeShape, String)>,
) {
    if remaining == 0 {
        // current is already sorted, so the children are canonical as-is.
        let shape = RootedTreeShape {
            children: current.clone(),
        };
        let enc = shape.encode();
        acc.push((shape, enc));
        return;
    }
    for size in 1..=remaining {
        for (cand, enc) in &by_size[size] {
            if enc.as_str() >= min_enc {
                current.push(cand.clone());
                collect_child_multisets(by_size, remaining - size, enc, current, acc);
                current.pop();
            }
        }
    }
}

/// Tree factorial: |t| times the product over children's tree factorials.
pub fn tree_factorial<T: TreeLike>(t: &T) -> BigInt {
    let mut acc = BigInt::from(t.size());
    for c in t.children() {
        acc *= tree_factorial(c);
    }
    acc
}

fn int_pow(base: &BigInt, exp: usize) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Order of the symmetry group of a shape: for each node, the product of
/// m! over child multiplicities m times each child's own factor.
pub fn symmetry_factor(t: &RootedTreeShape) -> BigInt {
    let mut acc = BigInt::one();
    for (child, mult) in t.child_multiplicities() {
        acc *= factorial(mult) * int_pow(&symmetry_factor(child), mult);
    }
    acc
}

/// Number of increasing labellings of the shape up to symmetry,
/// n!/(t!·σ(t)); errors if that quotient were ever fractional.
pub fn alpha_count(t: &RootedTreeShape) -> Result<BigInt> {
    let n = t.size();
    let denom = tree_factorial(t) * symmetry_factor(t);
    exact_int_div(&factorial(n), &denom).map_err(|_| {
        Error::Internal(format!(
            "labelling count is not an integer for shape {}",
            t.encode()
        ))
    })
}

/// Number of distinct plane embeddings of a shape: the multinomial of child
/// multiplicities at each node, taken recursively.
pub fn kappa_count(t: &RootedTreeShape) -> BigInt {
    let runs = t.child_multiplicities();
    let total: usize = runs.iter().map(|(_, m)| m).sum();
    let mut acc = factorial(total);
    for (child, mult) in runs {
        acc = exact_int_div(&acc, &factorial(mult))
            .expect("multinomial coefficients are integers");
        acc *= int_pow(&kappa_count(child), mult);
    }
    acc
}

/// Multiplicative node weight: the product over nodes of ψ_{outdegree}.
pub fn omega_weight<T: TreeLike>(t: &T, psi: &SeriesSpec) -> Rat {
    let mut acc = Rat::one();
    t.visit(&mut |node| {
        acc *= psi.coeff(node.outdegree());
    });
    acc
}

/// Elementary-differential weight: the product over nodes of
/// ψ_{outdegree} · outdegree!.
pub fn elementary_differential<T: TreeLike>(t: &T, psi: &SeriesSpec) -> Rat {
    let mut acc = Rat::one();
    t.visit(&mut |node| {
        let d = node.outdegree();
        acc *= psi.coeff(d) * Rat::from_integer(factorial(d));
    });
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use std::collections::BTreeSet;

    fn catalan(n: usize) -> BigInt {
        // (2n)! / (n! (n+1)!), written without the library's own helpers
        exact_int_div(&factorial(2 * n), &(factorial(n) * factorial(n + 1))).unwrap()
    }

    fn plane(s: &str) -> PlaneTree {
        PlaneTree::decode(s).unwrap()
    }

    fn shape(s: &str) -> RootedTreeShape {
        shape_of(&plane(s))
    }

    #[test]
    fn plane_tree_counts_are_catalan() {
        for n in 1..=9 {
            let trees = enumerate_plane_trees(n, DEFAULT_MAX_N).unwrap();
            assert_eq!(BigInt::from(trees.len()), catalan(n - 1), "n = {n}");
        }
        assert_eq!(enumerate_plane_trees(1, 14).unwrap().len(), 1);
        assert_eq!(enumerate_plane_trees(4, 14).unwrap().len(), 5);
        assert_eq!(enumerate_plane_trees(8, 14).unwrap().len(), 429);
    }

    #[test]
    fn plane_tree_enumeration_is_sorted_and_complete() {
        // the successor walk agrees with brute-force generation
        for n in 1..=7 {
            let walked: Vec<String> = plane_trees(n, DEFAULT_MAX_N)
                .unwrap()
                .map(|t| t.encode())
                .collect();
            let mut sorted = walked.clone();
            sorted.sort();
            assert_eq!(walked, sorted, "lexicographic order at n = {n}");
            let brute: BTreeSet<String> = brute_force_plane(n)
                .into_iter()
                .map(|t| t.encode())
                .collect();
            assert_eq!(walked.iter().cloned().collect::<BTreeSet<_>>(), brute);
        }
    }

    /// Independent generator: all ordered child compositions, recursively.
    fn brute_force_plane(n: usize) -> Vec<PlaneTree> {
        if n == 1 {
            return vec![PlaneTree::leaf()];
        }
        let mut out = Vec::new();
        // compositions of n-1 into ordered parts
        fn go(remaining: usize, parts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if remaining == 0 {
                out.push(parts.clone());
                return;
            }
            for p in 1..=remaining {
                parts.push(p);
                go(remaining - p, parts, out);
                parts.pop();
            }
        }
        let mut comps = Vec::new();
        go(n - 1, &mut Vec::new(), &mut comps);
        for comp in comps {
            let choices: Vec<Vec<PlaneTree>> =
                comp.iter().map(|&p| brute_force_plane(p)).collect();
            let mut stack: Vec<Vec<PlaneTree>> = vec![Vec::new()];
            for options in &choices {
                let mut next = Vec::new();
                for partial in &stack {
                    for opt in options {
                        let mut extended = partial.clone();
                        extended.push(opt.clone());
                        next.push(extended);
                    }
                }
                stack = next;
            }
            out.extend(stack.into_iter().map(PlaneTree::new));
        }
        out
    }

    #[test]
    fn first_tree_is_the_path() {
        let first = plane_trees(5, 14).unwrap().next().unwrap();
        assert_eq!(first, PlaneTree::path(5));
        assert_eq!(first.encode(), "((((()))))");
    }

    #[test]
    fn encode_decode_round_trip() {
        for n in 1..=6 {
            for t in plane_trees(n, 14).unwrap() {
                assert_eq!(PlaneTree::decode(&t.encode()).unwrap(), t);
            }
        }
        assert!(PlaneTree::decode("(()").is_err());
        assert!(PlaneTree::decode("()()").is_err());
        assert!(PlaneTree::decode("").is_err());
        assert!(PlaneTree::decode(")(").is_err());
    }

    #[test]
    fn size_range_is_enforced() {
        assert!(matches!(
            enumerate_plane_trees(15, 14),
            Err(Error::SizeRange { n: 15, max: 14 })
        ));
        assert!(matches!(
            enumerate_plane_trees(0, 14),
            Err(Error::SizeRange { n: 0, max: 14 })
        ));
        assert!(enumerate_plane_trees(15, 15).is_ok());
    }

    #[test]
    fn shape_counts_match_known_values() {
        let expected = [1usize, 1, 2, 4, 9, 20, 48, 115];
        for (i, &want) in expected.iter().enumerate() {
            let n = i + 1;
            assert_eq!(
                enumerate_rooted_shapes(n, DEFAULT_MAX_N).unwrap().len(),
                want,
                "n = {n}"
            );
        }
    }

    #[test]
    fn shape_enumeration_matches_plane_tree_deduplication() {
        for n in 1..=8 {
            let direct: BTreeSet<String> = enumerate_rooted_shapes(n, 14)
                .unwrap()
                .iter()
                .map(|s| s.encode())
                .collect();
            let deduped: BTreeSet<String> = plane_trees(n, 14)
                .unwrap()
                .map(|t| shape_of(&t).encode())
                .collect();
            assert_eq!(direct, deduped, "n = {n}");
            assert_eq!(direct.len(), enumerate_rooted_shapes(n, 14).unwrap().len());
        }
    }

    #[test]
    fn shape_of_is_order_invariant() {
        let a = plane("((())())");
        let b = plane("(()(()))");
        assert_ne!(a, b);
        assert_eq!(shape_of(&a), shape_of(&b));
        assert_eq!(shape_of(&a).encode(), "((())())");
    }

    #[test]
    fn tree_factorial_examples() {
        assert_eq!(tree_factorial(&plane("()")), BigInt::from(1));
        assert_eq!(tree_factorial(&PlaneTree::path(3)), BigInt::from(6));
        // cherry: root with two leaf children
        assert_eq!(tree_factorial(&plane("(()())")), BigInt::from(3));
        // root → {leaf, path-2}: 4 · 1 · 2
        assert_eq!(tree_factorial(&plane("(()(()))")), BigInt::from(8));
        // 5-node: root → {cherry, leaf}: 5 · 3 · 1 = 15
        assert_eq!(tree_factorial(&plane("((()())())")), BigInt::from(15));
        // path factorials are ordinary factorials
        for n in 1..=8 {
            assert_eq!(tree_factorial(&PlaneTree::path(n)), factorial(n));
        }
    }

    #[test]
    fn symmetry_factor_examples() {
        assert_eq!(symmetry_factor(&shape("()")), BigInt::from(1));
        assert_eq!(symmetry_factor(&shape("(()())")), BigInt::from(2));
        // star with three leaves: 3!
        assert_eq!(symmetry_factor(&shape("(()()())")), BigInt::from(6));
        // two cherry children: 2! · (2!)² = 8
        assert_eq!(symmetry_factor(&shape("((()())(()()))")), BigInt::from(8));
        // asymmetric children leave σ = 1
        assert_eq!(symmetry_factor(&shape("(()(()))")), BigInt::from(1));
    }

    #[test]
    fn alpha_count_examples() {
        assert_eq!(alpha_count(&shape("()")).unwrap(), BigInt::from(1));
        assert_eq!(alpha_count(&shape("(()())")).unwrap(), BigInt::from(1));
        // root → {leaf, path-2} on 4 nodes: α = 3
        assert_eq!(alpha_count(&shape("(()(()))")).unwrap(), BigInt::from(3));
        for n in 1..=8 {
            assert_eq!(
                alpha_count(&shape_of(&PlaneTree::path(n))).unwrap(),
                BigInt::from(1)
            );
        }
    }

    /// Oracle: α(t) counts increasing labellings of the *unordered* tree, so
    /// count labellings of a fixed plane embedding and divide out the
    /// symmetry orbit by deduplicating labelled canonical forms.
    #[test]
    fn alpha_count_matches_labelling_enumeration() {
        for n in 1..=7 {
            for s in enumerate_rooted_shapes(n, 14).unwrap() {
                let plane = s.to_plane();
                let labellings = increasing_labellings(&plane);
                // labellings of the embedding = n!/t! = α·σ
                let nf_over_tf =
                    exact_int_div(&factorial(n), &tree_factorial(&s)).unwrap();
                assert_eq!(BigInt::from(labellings.len()), nf_over_tf, "{}", s);
                let distinct: BTreeSet<String> = labellings
                    .iter()
                    .map(|l| canonical_labelled(&plane, l))
                    .collect();
                assert_eq!(
                    BigInt::from(distinct.len()),
                    alpha_count(&s).unwrap(),
                    "{}",
                    s
                );
            }
        }
    }

    /// All bijective labellings of the nodes (preorder positions) with 1..n
    /// that increase along every root-to-leaf edge.
    fn increasing_labellings(t: &PlaneTree) -> Vec<Vec<usize>> {
        let n = t.size();
        // parent[i] = preorder index of the parent of preorder node i
        let mut parent = vec![usize::MAX; n];
        fn walk(t: &PlaneTree, parent: &mut Vec<usize>, next: &mut usize, p: usize) {
            let me = *next;
            *next += 1;
            parent[me] = p;
            for c in t.children() {
                walk(c, parent, next, me);
            }
        }
        let mut next = 0usize;
        walk(t, &mut parent, &mut next, usize::MAX);
        let mut label = vec![0usize; n];
        let mut used = vec![false; n + 1];
        let mut out = Vec::new();
        fn assign(
            node: usize,
            n: usize,
            parent: &[usize],
            label: &mut Vec<usize>,
            used: &mut Vec<bool>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if node == n {
                out.push(label.clone());
                return;
            }
            for v in 1..=n {
                if used[v] {
                    continue;
                }
                if parent[node] != usize::MAX && label[parent[node]] > v {
                    continue;
                }
                used[v] = true;
                label[node] = v;
                assign(node + 1, n, parent, label, used, out);
                used[v] = false;
            }
        }
        assign(0, n, &parent, &mut label, &mut used, &mut out);
        out
    }

    /// Canonical encoding of a labelled tree: children sorted by their own
    /// canonical encodings, labels embedded.
    fn canonical_labelled(t: &PlaneTree, labels: &[usize]) -> String {
        fn go(t: &PlaneTree, labels: &[usize], next: &mut usize) -> String {
            let me = *next;
            *next += 1;
            let mut parts: Vec<String> =
                t.children().iter().map(|c| go(c, labels, next)).collect();
            parts.sort();
            format!("{}[{}]", labels[me], parts.join(""))
        }
        let mut next = 0;
        go(t, labels, &mut next)
    }

    #[test]
    fn kappa_count_examples() {
        assert_eq!(kappa_count(&shape("()")), BigInt::from(1));
        assert_eq!(kappa_count(&shape("(()(()))")), BigInt::from(2));
        assert_eq!(kappa_count(&shape("(()())")), BigInt::from(1));
        // κ sums to the plane-tree count
        for n in 1..=10 {
            let total: BigInt = enumerate_rooted_shapes(n, 14)
                .unwrap()
                .iter()
                .map(kappa_count)
                .sum();
            assert_eq!(total, catalan(n - 1), "n = {n}");
        }
    }

    #[test]
    fn kappa_matches_plane_embedding_frequencies() {
        use std::collections::BTreeMap;
        for n in 1..=8 {
            let mut freq: BTreeMap<String, BigInt> = BTreeMap::new();
            for t in plane_trees(n, 14).unwrap() {
                *freq.entry(shape_of(&t).encode()).or_default() += 1;
            }
            for s in enumerate_rooted_shapes(n, 14).unwrap() {
                assert_eq!(freq[&s.encode()], kappa_count(&s), "{}", s);
            }
        }
    }

    #[test]
    fn symmetry_identities_hold_exactly() {
        // α·σ = n!/t!  and  α·t! = n!·ω_exp·κ for every shape, n ≤ 8
        let exp = SeriesSpec::Exponential;
        for n in 1..=8 {
            let nf = Rat::from_integer(factorial(n));
            for s in enumerate_rooted_shapes(n, 14).unwrap() {
                let alpha = Rat::from_integer(alpha_count(&s).unwrap());
                let sigma = Rat::from_integer(symmetry_factor(&s));
                let tf = Rat::from_integer(tree_factorial(&s));
                let kappa = Rat::from_integer(kappa_count(&s));
                assert_eq!(&alpha * &sigma, &nf / &tf, "sigma identity, {}", s);
                assert_eq!(
                    &alpha * &tf,
                    &nf * omega_weight(&s, &exp) * &kappa,
                    "labelled-weight identity, {}",
                    s
                );
            }
        }
    }

    #[test]
    fn omega_weight_examples() {
        let geo = SeriesSpec::Geometric;
        let exp = SeriesSpec::Exponential;
        // geometric weights are identically 1
        assert_eq!(omega_weight(&plane("((())())"), &geo), rat_int(1));
        // exponential: product of 1/d(v)! over nodes
        assert_eq!(omega_weight(&plane("(()())"), &exp), rat(1, 2));
        assert_eq!(omega_weight(&plane("(()()())"), &exp), rat(1, 6));
        assert_eq!(omega_weight(&PlaneTree::path(4), &exp), rat_int(1));
        // finite support: outdegree beyond the list kills the weight
        let psi = SeriesSpec::polynomial(vec![rat_int(1), rat_int(1)]).unwrap();
        assert_eq!(omega_weight(&plane("(()())"), &psi), rat_int(0));
        assert_eq!(omega_weight(&PlaneTree::path(3), &psi), rat_int(1));
    }

    #[test]
    fn elementary_differential_examples() {
        // for exponential ψ every factor is 1
        let exp = SeriesSpec::Exponential;
        for t in enumerate_plane_trees(5, 14).unwrap() {
            assert_eq!(elementary_differential(&t, &exp), rat_int(1));
        }
        // geometric ψ: product of d(v)! over nodes
        let geo = SeriesSpec::Geometric;
        assert_eq!(elementary_differential(&plane("(()())"), &geo), rat_int(2));
        assert_eq!(
            elementary_differential(&plane("(()()())"), &geo),
            rat_int(6)
        );
        // ω and δ are related by the product of outdegree factorials
        let psi = SeriesSpec::polynomial(vec![rat_int(1), rat(3, 2), rat(1, 3)]).unwrap();
        for t in enumerate_plane_trees(6, 14).unwrap() {
            let mut dfac = Rat::one();
            t.visit(&mut |node| {
                dfac *= Rat::from_integer(factorial(node.outdegree()));
            });
            assert_eq!(
                elementary_differential(&t, &psi),
                omega_weight(&t, &psi) * dfac
            );
        }
    }

    #[test]
    fn statistics_are_embedding_invariant() {
        // every plane embedding of a shape reports the same statistics
        let psi = SeriesSpec::polynomial(vec![rat_int(1), rat(1, 2), rat(2, 3), rat(1, 5)])
            .unwrap();
        for n in 1..=7 {
            for t in plane_trees(n, 14).unwrap() {
                let s = shape_of(&t);
                assert_eq!(tree_factorial(&t), tree_factorial(&s));
                assert_eq!(omega_weight(&t, &psi), omega_weight(&s, &psi));
                assert_eq!(
                    elementary_differential(&t, &psi),
                    elementary_differential(&s, &psi)
                );
            }
        }
    }
}
