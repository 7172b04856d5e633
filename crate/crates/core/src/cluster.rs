//! Seeds, matrix and cluster mutation, and mutation-tree exploration.
//!
//! Mutation indices in the public API are 1-based, matching the usual
//! notation `mu_1, ..., mu_N`; storage is 0-based.

use std::collections::HashSet;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::DegreeProfile;
use crate::scalar::Real;
use crate::LaurentPoly;

/// Largest symmetrizer entry accepted for user matrices.
pub const MAX_SYMMETRIZER: i64 = 720;

/// Square integer exchange matrix `B`, skew-symmetrizable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExchangeMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl ExchangeMatrix {
    /// Validates skew-symmetrizability (symmetrizer entries at most
    /// [`MAX_SYMMETRIZER`]).
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("matrix must be square and nonempty".into()));
        }
        let m = Self { n, entries: rows.into_iter().flatten().collect() };
        m.symmetrizer()?;
        Ok(m)
    }

    pub fn from_row_major(n: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        Self::new(entries.chunks(n.max(1)).map(<[i64]>::to_vec).collect())
    }

    pub fn rank2(r: i64) -> Self {
        Self { n: 2, entries: vec![0, r, -r, 0] }
    }

    /// Type `A_2`, generating the Lyness 5-cycle.
    pub fn a2() -> Self {
        Self::rank2(1)
    }

    pub fn markoff() -> Self {
        Self { n: 3, entries: vec![0, 2, -2, -2, 0, 2, 2, -2, 0] }
    }

    pub fn somos4() -> Self {
        Self { n: 4, entries: vec![0, 1, -2, 1, -1, 0, 3, -2, 2, -3, 0, 1, -1, 2, -1, 0] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `b_{ij}` with 0-based indices.
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    /// Positive integer diagonal `D` with `DB` skew-symmetric, normalized per
    /// connected component to coprime entries.
    pub fn symmetrizer(&self) -> Result<Vec<i64>> {
        let n = self.n;
        for i in 0..n {
            if self.get(i, i) != 0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal entry at {}", i + 1)));
            }
            for j in 0..n {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if (a == 0) != (b == 0) || (a != 0 && a.signum() == b.signum()) {
                    return Err(Error::InvalidMatrix(format!(
                        "entries ({},{}) and ({},{}) violate the sign pattern",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        // d_j / d_i = -b_ij / b_ji along each edge, as reduced fractions
        let mut d: Vec<Option<(i64, i64)>> = vec![None; n];
        let mut out = vec![0i64; n];
        for root in 0..n {
            if d[root].is_some() {
                continue;
            }
            d[root] = Some((1, 1));
            let mut stack = vec![root];
            let mut comp = vec![root];
            while let Some(i) = stack.pop() {
                let (pi, qi) = d[i].expect("visited");
                for j in 0..n {
                    let bij = self.get(i, j);
                    if bij == 0 {
                        continue;
                    }
                    let bji = self.get(j, i);
                    let (mut p, mut q) = (pi * bij.abs(), qi * bji.abs());
                    let g = p.gcd(&q);
                    p /= g;
                    q /= g;
                    match d[j] {
                        None => {
                            d[j] = Some((p, q));
                            comp.push(j);
                            stack.push(j);
                        }
                        Some(existing) if existing != (p, q) => {
                            return Err(Error::InvalidMatrix("not skew-symmetrizable".into()));
                        }
                        Some(_) => {}
                    }
                }
            }
            let l = comp.iter().fold(1i64, |acc, &i| acc.lcm(&d[i].expect("visited").1));
            let vals: Vec<i64> = comp.iter().map(|&i| d[i].map(|(p, q)| p * (l / q)).expect("visited")).collect();
            let g = vals.iter().fold(0i64, |acc, v| acc.gcd(v));
            for (&i, v) in comp.iter().zip(vals) {
                let v = v / g;
                if v > MAX_SYMMETRIZER {
                    return Err(Error::InvalidMatrix(format!("symmetrizer entry {v} exceeds {MAX_SYMMETRIZER}")));
                }
                out[i] = v;
            }
        }
        Ok(out)
    }

    fn check_index(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.n {
            return Err(Error::IndexOutOfRange { index: k, n: self.n });
        }
        Ok(k - 1)
    }

    /// Matrix mutation at the 1-based index `k`.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        let k = self.check_index(k)?;
        let n = self.n;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let b = self.get(i, j);
                entries[i * n + j] = if i == k || j == k {
                    -b
                } else {
                    let bik = self.get(i, k);
                    b + bik.signum() * (bik * self.get(k, j)).max(0)
                };
            }
        }
        Ok(Self { n, entries })
    }

    /// Relabels so that new index `i` is old index `perm[i]` (0-based).
    pub fn permute(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Self { n, entries }
    }

    pub fn neg(&self) -> Self {
        Self { n: self.n, entries: self.entries.iter().map(|b| -b).collect() }
    }
}

impl fmt::Debug for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

/// Mutation word `mu_{k_m} o ... o mu_{k_1}` (applied left to right as
/// listed) followed by an optional relabeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutationSequence {
    indices: Vec<usize>,
    permutation: Option<Vec<usize>>,
}

impl MutationSequence {
    /// `indices` are 1-based; `permutation` is 1-based with new position `i`
    /// taking the old entry `permutation[i]`.
    pub fn new(n: usize, indices: Vec<usize>, permutation: Option<Vec<usize>>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&k| k == 0 || k > n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        if let Some(p) = &permutation {
            let mut seen = vec![false; n];
            if p.len() != n {
                return Err(Error::InvalidParameter(format!("permutation must have {n} entries")));
            }
            for &v in p {
                if v == 0 || v > n || seen[v - 1] {
                    return Err(Error::InvalidParameter("permutation is not a bijection of 1..=n".into()));
                }
                seen[v - 1] = true;
            }
        }
        Ok(Self { indices, permutation: permutation.map(|p| p.into_iter().map(|v| v - 1).collect()) })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Zero-based permutation, if any.
    pub fn permutation(&self) -> Option<&[usize]> {
        self.permutation.as_deref()
    }
}

/// Cluster of Laurent polynomials in the initial variables plus its exchange
/// matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Seed {
    cluster: Vec<LaurentPoly>,
    matrix: ExchangeMatrix,
}

impl Seed {
    /// Initial seed: the cluster is `(x_1, ..., x_N)`.
    pub fn initial(matrix: ExchangeMatrix) -> Self {
        let n = matrix.n();
        Self { cluster: (0..n).map(|i| LaurentPoly::var(n, i)).collect(), matrix }
    }

    pub fn new(cluster: Vec<LaurentPoly>, matrix: ExchangeMatrix) -> Result<Self> {
        if cluster.len() != matrix.n() {
            return Err(Error::DimensionMismatch { left: matrix.n(), right: cluster.len() });
        }
        if let Some(first) = cluster.first() {
            let m = first.nvars();
            if let Some(bad) = cluster.iter().find(|x| x.nvars() != m) {
                return Err(Error::DimensionMismatch { left: m, right: bad.nvars() });
            }
        }
        if cluster.iter().any(LaurentPoly::is_zero) {
            return Err(Error::ZeroPolynomial("cluster variable"));
        }
        Ok(Self { cluster, matrix })
    }

    pub fn cluster(&self) -> &[LaurentPoly] {
        &self.cluster
    }

    pub fn matrix(&self) -> &ExchangeMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// Cluster mutation at the 1-based index `k`.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        let matrix = self.matrix.mutate(k)?;
        let k0 = k - 1;
        let m = self.cluster[0].nvars();
        let mut plus = LaurentPoly::one(m);
        let mut minus = LaurentPoly::one(m);
        for (j, &b) in self.matrix.row(k0).iter().enumerate() {
            if b > 0 {
                plus = plus.try_mul(&self.cluster[j].pow(b)?)?;
            } else if b < 0 {
                minus = minus.try_mul(&self.cluster[j].pow(-b)?)?;
            }
        }
        let new_var = plus.try_add(&minus)?.div_exact(&self.cluster[k0])?;
        let mut cluster = self.cluster.clone();
        cluster[k0] = new_var;
        Ok(Self { cluster, matrix })
    }

    /// Relabels with a 0-based permutation (new `i` = old `perm[i]`).
    pub fn permute(&self, perm: &[usize]) -> Self {
        Self { cluster: perm.iter().map(|&p| self.cluster[p].clone()).collect(), matrix: self.matrix.permute(perm) }
    }

    pub fn apply(&self, seq: &MutationSequence) -> Result<Self> {
        let mut s = self.clone();
        for &k in seq.indices() {
            s = s.mutate(k)?;
        }
        if let Some(p) = seq.permutation() {
            s = s.permute(p);
        }
        Ok(s)
    }

    /// A 0-based permutation `p` with `self.permute(p) == *other`, if one exists.
    pub fn relabeling_to(&self, other: &Seed) -> Option<Vec<usize>> {
        if self.n() != other.n() {
            return None;
        }
        let mut perm = Vec::with_capacity(self.n());
        for x in &other.cluster {
            perm.push(self.cluster.iter().position(|y| y == x)?);
        }
        (self.permute(&perm) == *other).then_some(perm)
    }

    /// Largest degree profile (by rational degree) over the cluster.
    pub fn max_degree(&self) -> DegreeProfile<BigInt> {
        self.cluster
            .iter()
            .map(|x| x.degree_profile().expect("cluster variables are nonzero"))
            .max_by_key(|d| d.rational_degree)
            .expect("nonempty cluster")
    }

    fn canonical(&self) -> (Self, Vec<usize>, String) {
        let texts: Vec<String> = self.cluster.iter().map(ToString::to_string).collect();
        let mut perm: Vec<usize> = (0..self.n()).collect();
        perm.sort_by(|&a, &b| texts[a].cmp(&texts[b]));
        let s = self.permute(&perm);
        let key = format!(
            "{}|{:?}",
            perm.iter().map(|&i| texts[i].as_str()).collect::<Vec<_>>().join(";"),
            s.matrix.entries
        );
        (s, perm, key)
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Seed").field("cluster", &self.cluster).field("matrix", &self.matrix).finish()
    }
}

/// JSON seed file: `{"n": 2, "matrix": [0, 1, -1, 0], "cluster": ["x1", "x2"]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedFile {
    pub n: usize,
    /// Row-major entries.
    pub matrix: Vec<i64>,
    /// Cluster entries in the text form; defaults to the initial variables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<Vec<String>>,
}

impl SeedFile {
    pub fn into_seed(self) -> Result<Seed> {
        let matrix = ExchangeMatrix::from_row_major(self.n, self.matrix)?;
        match self.cluster {
            None => Ok(Seed::initial(matrix)),
            Some(texts) => {
                let cluster = texts.iter().map(|t| LaurentPoly::parse(t, self.n)).collect::<Result<Vec<_>>>()?;
                Seed::new(cluster, matrix)
            }
        }
    }

    pub fn from_seed(seed: &Seed) -> Self {
        Self {
            n: seed.n(),
            matrix: seed.matrix.entries.clone(),
            cluster: Some(seed.cluster.iter().map(ToString::to_string).collect()),
        }
    }
}

/// Bounds on [`explore_mutation_tree`].
#[derive(Debug, Clone, Copy)]
pub struct ExploreLimits {
    /// Maximum number of distinct seeds kept across all depths.
    pub max_seeds: usize,
    /// Maximum number of terms in any single cluster variable.
    pub max_terms: usize,
}

impl Default for ExploreLimits {
    fn default() -> Self {
        Self { max_seeds: 200_000, max_terms: 200_000 }
    }
}

#[derive(Debug, Clone)]
pub struct DepthDegree {
    pub depth: usize,
    /// Supremum over all mutation words of this exact length.
    pub max_degree: DegreeProfile<BigInt>,
    /// Seeds first reached at this depth (with this parity).
    pub new_seeds: usize,
}

#[derive(Debug, Clone)]
pub struct TreeExploration {
    pub levels: Vec<DepthDegree>,
    pub truncated: bool,
}

/// Per-depth maximum cluster degree over all mutation words of each length.
///
/// Seeds are identified up to relabeling. A seed reached by a word of length
/// `n` is also reached at `n + 2` (any `mu_k` is an involution), so states
/// are memoized per parity and the supremum at depth `n` is the maximum of
/// the new seeds at `n` and the supremum at `n - 2`. This is exact for
/// words that revisit seeds. Words never repeat the immediately preceding
/// index.
pub fn explore_mutation_tree(seed: &Seed, depth: usize, limits: ExploreLimits) -> Result<TreeExploration> {
    let visited: Mutex<HashSet<(String, bool)>> = Mutex::new(HashSet::new());
    let (root, _, key) = seed.canonical();
    visited.lock().expect("memo lock").insert((key, false));
    let mut frontier: Vec<(Seed, Option<usize>)> = vec![(root.clone(), None)];
    let mut levels: Vec<DepthDegree> =
        vec![DepthDegree { depth: 0, max_degree: root.max_degree(), new_seeds: 1 }];
    let mut total = 1usize;
    let mut truncated = false;
    let n = seed.n();
    for d in 1..=depth {
        let parity = d % 2 == 1;
        let expanded: Vec<Result<Vec<(Seed, Option<usize>)>>> = frontier
            .par_iter()
            .map(|(s, last)| {
                let mut out = Vec::new();
                for k in 0..n {
                    if Some(k) == *last {
                        continue;
                    }
                    let child = s.mutate(k + 1)?;
                    let (canon, perm, key) = child.canonical();
                    // atomic insert-if-absent
                    if visited.lock().expect("memo lock").insert((key, parity)) {
                        let pos = perm.iter().position(|&p| p == k);
                        out.push((canon, pos));
                    }
                }
                Ok(out)
            })
            .collect();
        let mut next = Vec::new();
        for r in expanded {
            next.extend(r?);
        }
        // deterministic order regardless of scheduling
        next.sort_by_cached_key(|(s, _)| s.canonical().2);
        total += next.len();
        let too_big = next.iter().any(|(s, _)| s.cluster.iter().any(|x| x.num_terms() > limits.max_terms));
        let best_new = next.iter().map(|(s, _)| s.max_degree()).max_by_key(|p| p.rational_degree);
        let carried = if d >= 2 { Some(levels[d - 2].max_degree.clone()) } else { None };
        let max_degree = match (best_new, carried) {
            (Some(a), Some(b)) => {
                if a.rational_degree >= b.rational_degree {
                    a
                } else {
                    b
                }
            }
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => levels[d - 1].max_degree.clone(),
        };
        levels.push(DepthDegree { depth: d, max_degree, new_seeds: next.len() });
        frontier = next;
        if total > limits.max_seeds || too_big {
            truncated = d < depth;
            break;
        }
    }
    Ok(TreeExploration { levels, truncated })
}

/// One mutation applied to numeric cluster values.
pub fn mutate_values<T: Real>(values: &[T], matrix: &ExchangeMatrix, k: usize) -> Result<Vec<T>> {
    let k0 = matrix.check_index(k)?;
    let mut plus = T::one();
    let mut minus = T::one();
    for (j, &b) in matrix.row(k0).iter().enumerate() {
        if b > 0 {
            plus = plus * values[j].powi(b as i32);
        } else if b < 0 {
            minus = minus * values[j].powi((-b) as i32);
        }
    }
    let mut out = values.to_vec();
    out[k0] = (plus + minus) / values[k0];
    Ok(out)
}
