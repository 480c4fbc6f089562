//! Automorphisms of the n-level binary tree, acting on cube points and
//! functions.
//!
//! An automorphism is a prefix-respecting sign flip: it carries one sign
//! label `a(σ)` per internal node σ (a prefix of length m-1 < n), and maps
//! `(τ_1, …, τ_n)` to `(a()τ_1, a(τ_1)τ_2, …, a(τ_1,…,τ_{n-1})τ_n)`.
//!
//! Dense label tables store all 2^n - 1 signs and are exact; a seeded
//! procedural variant derives labels from a chained PRF so that sampling
//! paths can use automorphisms far beyond the dense cap.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cube::{BooleanFunction, CubePoint};
use crate::error::{Error, Result};

/// Dense cap: 2^n - 1 labels must stay allocatable.
pub const MAX_DENSE_TREE_N: usize = 25;

/// Position reached while descending the label tree. `code` is the packed
/// prefix for dense tables and the PRF chain state for seeded labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelCursor {
    pub depth: usize,
    pub code: u64,
}

/// Source of per-node sign labels, consumed one tree level at a time.
pub trait NodeLabels: Send + Sync {
    fn n(&self) -> usize;
    /// Cursor at the root (empty prefix).
    fn root(&self) -> LabelCursor;
    /// The sign label at the node under the cursor.
    fn sign_at(&self, cursor: &LabelCursor) -> i8;
    /// Descends one level along coordinate sign `s`.
    fn child(&self, cursor: &LabelCursor, s: i8) -> LabelCursor;
}

/// A tree automorphism with an explicit label table.
///
/// Node (m, prefix) lives at offset `(2^{m-1} - 1) + prefixIndex`, with
/// prefixes packed in the shared cube bit-encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeAutomorphism {
    n: usize,
    labels: Vec<i8>,
}

impl TreeAutomorphism {
    pub fn new(n: usize, labels: Vec<i8>) -> Result<Self> {
        check_tree_n(n)?;
        if labels.len() != (1usize << n) - 1 {
            return Err(Error::invalid(format!(
                "label table length {} does not match 2^{n} - 1",
                labels.len()
            )));
        }
        if labels.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::invalid("labels must be ±1"));
        }
        Ok(TreeAutomorphism { n, labels })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_tree_n(n)?;
        Ok(TreeAutomorphism {
            n,
            labels: vec![1; (1 << n) - 1],
        })
    }

    /// The automorphism `(τ_1, …, τ_n) ↦ (τ_1, τ_1τ_2, …, τ_1⋯τ_n)`:
    /// label at (m, σ) is the product of the prefix signs.
    pub fn cumulative_product(n: usize) -> Result<Self> {
        check_tree_n(n)?;
        let mut labels = Vec::with_capacity((1 << n) - 1);
        for depth in 0..n {
            for prefix in 0..1u32 << depth {
                labels.push(if prefix.count_ones() % 2 == 0 { 1 } else { -1 });
            }
        }
        Ok(TreeAutomorphism { n, labels })
    }

    /// Uniformly random automorphism: labels are i.i.d. fair signs, which is
    /// the uniform distribution over all 2^{2^n - 1} automorphisms.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_tree_n(n)?;
        let labels = (0..(1usize << n) - 1)
            .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
            .collect();
        Ok(TreeAutomorphism { n, labels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    /// Label at tree depth `depth` (0-based) over the packed `prefix`.
    #[inline]
    pub fn label(&self, depth: usize, prefix: u32) -> i8 {
        debug_assert!(depth < self.n);
        self.labels[(1usize << depth) - 1 + prefix as usize]
    }

    /// Applies the automorphism to a point: output coordinate m is
    /// `a(τ_1,…,τ_{m-1})·τ_m`, so the first m outputs depend only on the
    /// first m inputs.
    pub fn apply(&self, p: CubePoint) -> Result<CubePoint> {
        if p.n() != self.n {
            return Err(Error::dim(format!(
                "point has n = {}, automorphism has n = {}",
                p.n(),
                self.n
            )));
        }
        Ok(CubePoint::new(self.n, self.map_index(p.index()))?)
    }

    #[inline]
    pub(crate) fn map_index(&self, index: u32) -> u32 {
        let mut out = 0u32;
        let mut prefix = 0u32;
        for depth in 0..self.n {
            let in_bit = index >> depth & 1;
            let flip = self.label(depth, prefix) < 0;
            let out_bit = in_bit ^ flip as u32;
            out |= out_bit << depth;
            prefix |= in_bit << depth;
        }
        out
    }

    /// Image of a packed `depth`-bit prefix (well-defined by the prefix
    /// property).
    pub fn map_prefix(&self, depth: usize, prefix: u32) -> u32 {
        debug_assert!(depth <= self.n);
        let mut out = 0u32;
        let mut seen = 0u32;
        for d in 0..depth {
            let in_bit = prefix >> d & 1;
            let flip = self.label(d, seen) < 0;
            out |= (in_bit ^ flip as u32) << d;
            seen |= in_bit << d;
        }
        out
    }

    /// Composition acting as `apply(A.compose(B), p) = apply(A, apply(B, p))`.
    pub fn compose(&self, other: &TreeAutomorphism) -> Result<TreeAutomorphism> {
        if self.n != other.n {
            return Err(Error::dim(format!(
                "cannot compose automorphisms with n = {} and n = {}",
                self.n, other.n
            )));
        }
        // label_{A∘B}(σ) = a_A(B(σ)) · a_B(σ); walk levels carrying B-images.
        let mut labels = Vec::with_capacity(self.labels.len());
        let mut images: Vec<u32> = vec![0];
        for depth in 0..self.n {
            let mut next = vec![0u32; 1 << (depth + 1)];
            for prefix in 0..1u32 << depth {
                let img = images[prefix as usize];
                let a = self.label(depth, img);
                let b = other.label(depth, prefix);
                labels.push(a * b);
                for bit in 0..2u32 {
                    let flip = (b < 0) as u32;
                    next[(prefix | bit << depth) as usize] = img | (bit ^ flip) << depth;
                }
            }
            images = next;
        }
        Ok(TreeAutomorphism { n: self.n, labels })
    }

    /// Two-sided inverse: `label_{A⁻¹}(σ) = label_A(A⁻¹(σ))`, built by
    /// walking preimage prefixes level by level.
    pub fn invert(&self) -> TreeAutomorphism {
        let mut labels = vec![0i8; self.labels.len()];
        let mut preimages: Vec<u32> = vec![0];
        for depth in 0..self.n {
            let mut next = vec![0u32; 1 << (depth + 1)];
            for sigma in 0..1u32 << depth {
                let pre = preimages[sigma as usize];
                let a = self.label(depth, pre);
                labels[(1usize << depth) - 1 + sigma as usize] = a;
                for bit in 0..2u32 {
                    // input bit that produces output `bit` under label a
                    let in_bit = bit ^ (a < 0) as u32;
                    next[(sigma | bit << depth) as usize] = pre | in_bit << depth;
                }
            }
            preimages = next;
        }
        TreeAutomorphism { n: self.n, labels }
    }

    /// `f ∘ A`: the value at p is `f(A(p))`.
    pub fn pushforward(&self, f: &BooleanFunction) -> Result<BooleanFunction> {
        if f.n() != self.n {
            return Err(Error::dim(format!(
                "function has n = {}, automorphism has n = {}",
                f.n(),
                self.n
            )));
        }
        let values = (0..1u32 << self.n)
            .map(|i| f.value_at(self.map_index(i)))
            .collect();
        BooleanFunction::new(self.n, values)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&AutomorphismJson {
            n: self.n,
            labels: self.labels.clone(),
        })
        .expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: AutomorphismJson = serde_json::from_str(s)
            .map_err(|e| Error::invalid(format!("bad automorphism JSON: {e}")))?;
        TreeAutomorphism::new(raw.n, raw.labels)
    }
}

#[derive(Serialize, Deserialize)]
struct AutomorphismJson {
    n: usize,
    labels: Vec<i8>,
}

impl NodeLabels for TreeAutomorphism {
    fn n(&self) -> usize {
        self.n
    }

    fn root(&self) -> LabelCursor {
        LabelCursor { depth: 0, code: 0 }
    }

    fn sign_at(&self, cursor: &LabelCursor) -> i8 {
        self.label(cursor.depth, cursor.code as u32)
    }

    fn child(&self, cursor: &LabelCursor, s: i8) -> LabelCursor {
        let bit = (s < 0) as u64;
        LabelCursor {
            depth: cursor.depth + 1,
            code: cursor.code | bit << cursor.depth,
        }
    }
}

/// Labels derived from a chained PRF over the prefix. Each node gets a
/// deterministic pseudo-random sign, so a seed selects one fixed
/// automorphism of arbitrary depth with O(1) work per step.
#[derive(Debug, Clone, Copy)]
pub struct SeededLabels {
    n: usize,
    seed: u64,
}

const CHAIN_PLUS: u64 = 0x9E37_79B9_7F4A_7C15;
const CHAIN_MINUS: u64 = 0xD1B5_4A32_D192_ED03;
const SIGN_SALT: u64 = 0xA24B_AED4_963E_E407;

fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl SeededLabels {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("level count n must be at least 1"));
        }
        Ok(SeededLabels { n, seed })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Materializes the dense table; only valid below the dense cap. Used to
    /// cross-check the procedural path against exact computations.
    pub fn materialize(&self) -> Result<TreeAutomorphism> {
        check_tree_n(self.n)?;
        let mut labels = vec![0i8; (1 << self.n) - 1];
        let mut stack = vec![(self.root(), 0u32)];
        while let Some((cursor, prefix)) = stack.pop() {
            labels[(1usize << cursor.depth) - 1 + prefix as usize] = self.sign_at(&cursor);
            if cursor.depth + 1 < self.n {
                for (s, bit) in [(1i8, 0u32), (-1, 1)] {
                    stack.push((self.child(&cursor, s), prefix | bit << cursor.depth));
                }
            }
        }
        TreeAutomorphism::new(self.n, labels)
    }
}

impl NodeLabels for SeededLabels {
    fn n(&self) -> usize {
        self.n
    }

    fn root(&self) -> LabelCursor {
        LabelCursor {
            depth: 0,
            code: mix64(self.seed ^ CHAIN_PLUS),
        }
    }

    fn sign_at(&self, cursor: &LabelCursor) -> i8 {
        if mix64(cursor.code ^ SIGN_SALT) >> 63 == 0 {
            1
        } else {
            -1
        }
    }

    fn child(&self, cursor: &LabelCursor, s: i8) -> LabelCursor {
        let salt = if s > 0 { CHAIN_PLUS } else { CHAIN_MINUS };
        LabelCursor {
            depth: cursor.depth + 1,
            code: mix64(cursor.code.rotate_left(1) ^ salt),
        }
    }
}

fn check_tree_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("level count n must be at least 1"));
    }
    if n > MAX_DENSE_TREE_N {
        return Err(Error::ResourceLimit(format!(
            "n = {n} exceeds the dense automorphism cap {MAX_DENSE_TREE_N}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{builtin_family, FamilyKind};
    use crate::testutil::{assert_close, max_abs_diff, test_rng};
    use std::collections::HashSet;

    #[test]
    fn identity_is_identity() {
        let id = TreeAutomorphism::identity(5).unwrap();
        for i in 0..32u32 {
            assert_eq!(id.map_index(i), i);
        }
    }

    #[test]
    fn cumulative_product_hand_value() {
        // (τ_1, τ_2) = (-1, +1) maps to (τ_1, τ_1τ_2) = (-1, -1)
        let a = TreeAutomorphism::cumulative_product(2).unwrap();
        let p = CubePoint::from_signs(&[-1, 1]).unwrap();
        let q = a.apply(p).unwrap();
        assert_eq!(q.signs(), vec![-1, -1]);
    }

    #[test]
    fn bijectivity_and_inverse() {
        let mut rng = test_rng(42);
        for n in 1..=8 {
            let a = TreeAutomorphism::random(n, &mut rng).unwrap();
            let inv = a.invert();
            let mut seen = HashSet::new();
            for i in 0..1u32 << n {
                let img = a.map_index(i);
                assert!(seen.insert(img), "not a bijection at n = {n}");
                assert_eq!(inv.map_index(img), i);
                assert_eq!(a.map_index(inv.map_index(i)), i);
            }
        }
    }

    #[test]
    fn group_laws() {
        let mut rng = test_rng(7);
        let n = 6;
        let id = TreeAutomorphism::identity(n).unwrap();
        for _ in 0..10 {
            let a = TreeAutomorphism::random(n, &mut rng).unwrap();
            let b = TreeAutomorphism::random(n, &mut rng).unwrap();
            let c = TreeAutomorphism::random(n, &mut rng).unwrap();
            assert_eq!(a.compose(&id).unwrap(), a);
            assert_eq!(id.compose(&a).unwrap(), a);
            assert_eq!(id.invert(), id);
            let ab_c = a.compose(&b).unwrap().compose(&c).unwrap();
            let a_bc = a.compose(&b.compose(&c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc);
            let ainv = a.invert();
            assert_eq!(a.compose(&ainv).unwrap(), id);
            assert_eq!(ainv.compose(&a).unwrap(), id);
            // composition agrees with pointwise application
            for i in 0..1u32 << n {
                assert_eq!(
                    a.compose(&b).unwrap().map_index(i),
                    a.map_index(b.map_index(i))
                );
            }
        }
    }

    #[test]
    fn group_size_at_n2() {
        // 2^{2^2 - 1} = 8 distinct automorphisms
        let mut signatures = HashSet::new();
        for bits in 0..8u8 {
            let labels: Vec<i8> = (0..3)
                .map(|k| if bits >> k & 1 == 0 { 1 } else { -1 })
                .collect();
            let a = TreeAutomorphism::new(2, labels).unwrap();
            let sig: Vec<u32> = (0..4).map(|i| a.map_index(i)).collect();
            signatures.insert(sig);
        }
        assert_eq!(signatures.len(), 8);
    }

    #[test]
    fn prefix_property() {
        let mut rng = test_rng(3);
        let n = 7;
        let a = TreeAutomorphism::random(n, &mut rng).unwrap();
        for _ in 0..200 {
            let i: u32 = rng.gen_range(0..1 << n);
            let m = rng.gen_range(1..=n);
            let mask = (1u32 << m) - 1;
            // flip an arbitrary suffix; first m output bits must not move
            let suffix_flip = rng.gen_range(0..1u32 << n) & !mask;
            assert_eq!(
                a.map_index(i) & mask,
                a.map_index(i ^ suffix_flip) & mask,
                "prefix property violated"
            );
        }
    }

    #[test]
    fn pushforward_twists_simple_walk() {
        for n in 1..=10 {
            let a = TreeAutomorphism::cumulative_product(n).unwrap();
            let f = builtin_family(FamilyKind::SimpleWalk, n).unwrap();
            let g = builtin_family(FamilyKind::TwistedWalk, n).unwrap();
            let fa = a.pushforward(&f).unwrap();
            assert!(
                max_abs_diff(fa.values(), g.values()) < 1e-12,
                "f ∘ A ≠ g at n = {n}"
            );
        }
    }

    #[test]
    fn pushforward_preserves_norm_but_not_levels() {
        let mut rng = test_rng(9);
        let n = 8;
        let f = crate::testutil::random_function(n, 12);
        let a = TreeAutomorphism::random(n, &mut rng).unwrap();
        let fa = a.pushforward(&f).unwrap();
        assert_close(fa.norm_sq(), f.norm_sq(), 1e-12);
        assert_eq!(
            TreeAutomorphism::identity(n).unwrap().pushforward(&f).unwrap(),
            f
        );

        // level weights are not preserved: simple walk vs its twist
        let walk = builtin_family(FamilyKind::SimpleWalk, n).unwrap();
        let tw = TreeAutomorphism::cumulative_product(n)
            .unwrap()
            .pushforward(&walk)
            .unwrap();
        let w_walk = crate::cube::wht_forward(&walk).level_weights()[1];
        let w_tw = crate::cube::wht_forward(&tw).level_weights()[1];
        assert_close(w_walk, 1.0, 1e-12);
        assert_close(w_tw, 1.0 / n as f64, 1e-12);
    }

    #[test]
    fn random_automorphism_uniform_at_n1() {
        let mut rng = test_rng(5);
        let draws = 100_000;
        let mut plus = 0usize;
        for _ in 0..draws {
            let a = TreeAutomorphism::random(1, &mut rng).unwrap();
            if a.labels()[0] == 1 {
                plus += 1;
            }
        }
        let freq = plus as f64 / draws as f64;
        let sigma = (0.25 / draws as f64).sqrt();
        assert!((freq - 0.5).abs() < 4.0 * sigma, "frequency {freq}");
    }

    #[test]
    fn random_automorphism_uniform_at_n2() {
        let mut rng = test_rng(6);
        let draws = 100_000usize;
        let mut counts = [0usize; 8];
        for _ in 0..draws {
            let a = TreeAutomorphism::random(2, &mut rng).unwrap();
            let key = a
                .labels()
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &s)| acc | ((s < 0) as usize) << k);
            counts[key] += 1;
        }
        let expected = draws as f64 / 8.0;
        let chi_sq: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // df = 7; 35 is far beyond any reasonable quantile
        assert!(chi_sq < 35.0, "chi-square statistic {chi_sq}");
    }

    #[test]
    fn seeded_labels_match_materialized_table() {
        let n = 10;
        let seeded = SeededLabels::new(n, 0xFEED).unwrap();
        let dense = seeded.materialize().unwrap();
        // walk a few random branches comparing cursor signs
        let mut rng = test_rng(8);
        for _ in 0..100 {
            let mut cs = seeded.root();
            let mut cd = NodeLabels::root(&dense);
            for _ in 0..n {
                assert_eq!(seeded.sign_at(&cs), dense.sign_at(&cd));
                let s: i8 = if rng.gen::<bool>() { 1 } else { -1 };
                cs = seeded.child(&cs, s);
                cd = NodeLabels::child(&dense, &cd, s);
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let mut rng = test_rng(10);
        let a = TreeAutomorphism::random(4, &mut rng).unwrap();
        let back = TreeAutomorphism::from_json(&a.to_json()).unwrap();
        assert_eq!(a, back);
    }
}
