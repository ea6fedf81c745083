//! Exact root-system arithmetic for the finite families A–G.
//!
//! Roots are stored as integer coefficient vectors over the simple roots, so
//! every operation here is exact integer arithmetic. Node numbering follows
//! the Bourbaki convention throughout (this is a hard interface contract:
//! every table and every classifier in the crate addresses nodes this way).
//!
//! The generalized Cartan matrix convention is `a[i][j] = ⟨α_j, α_i∨⟩`, so
//! `s_i(α_j) = α_j - a[i][j]·α_i`.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// The seven finite families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

/// An irreducible finite Cartan type, e.g. `E7` or `B5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(CartanType { family, rank })
        } else {
            Err(Error::InvalidRank {
                family: family.letter(),
                rank,
            })
        }
    }

    /// Parse strings like `"E7"`, `"B5"`, `"g2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let fam = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(Error::Invalid(format!("cannot parse Cartan type {s:?}"))),
        };
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Invalid(format!("cannot parse Cartan type {s:?}")))?;
        CartanType::new(fam, rank)
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

/// Finite Cartan matrix in Bourbaki numbering, 0-based (index i ↔ node i+1).
pub fn finite_cartan_matrix(ct: CartanType) -> Vec<Vec<i64>> {
    let n = ct.rank;
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut bond = |i: usize, j: usize, aij: i64, aji: i64| {
        a[i - 1][j - 1] = aij;
        a[j - 1][i - 1] = aji;
    };
    match ct.family {
        Family::A => {
            for i in 1..n {
                bond(i, i + 1, -1, -1);
            }
        }
        Family::B => {
            for i in 1..n - 1 {
                bond(i, i + 1, -1, -1);
            }
            // α_n is short: ⟨α_{n-1}, α_n∨⟩ = -2
            bond(n - 1, n, -1, -2);
        }
        Family::C => {
            for i in 1..n - 1 {
                bond(i, i + 1, -1, -1);
            }
            // α_n is long: ⟨α_n, α_{n-1}∨⟩ = -2
            bond(n - 1, n, -2, -1);
        }
        Family::D => {
            for i in 1..n - 1 {
                bond(i, i + 1, -1, -1);
            }
            bond(n - 2, n, -1, -1);
        }
        Family::E => {
            bond(1, 3, -1, -1);
            bond(2, 4, -1, -1);
            for i in 3..n {
                bond(i, i + 1, -1, -1);
            }
        }
        Family::F => {
            bond(1, 2, -1, -1);
            // α_1, α_2 long, α_3, α_4 short
            bond(2, 3, -1, -2);
            bond(3, 4, -1, -1);
        }
        Family::G => {
            // α_1 short, α_2 long
            bond(1, 2, -3, -1);
        }
    }
    a
}

/// A complete positive system for an irreducible finite type.
#[derive(Debug, Clone)]
pub struct RootSystem {
    pub ctype: CartanType,
    /// Cartan matrix, `cartan[i][j] = ⟨α_j, α_i∨⟩`, 0-based.
    pub cartan: Vec<Vec<i64>>,
    /// Positive roots as coefficient vectors over the simple roots.
    pub positive_roots: Vec<Vec<i64>>,
    /// Coefficients of the highest root.
    pub highest_root: Vec<i64>,
}

/// `⟨β, α_i∨⟩` for a root `β` in simple-root coordinates.
pub fn pair_with_simple_coroot(cartan: &[Vec<i64>], beta: &[i64], i: usize) -> i64 {
    beta.iter().zip(&cartan[i]).map(|(b, a)| b * a).sum()
}

/// Close the simple roots under simple reflections, collecting `Φ⁺`.
pub fn positive_roots(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = cartan.len();
    let mut seen: Vec<Vec<i64>> = Vec::new();
    let mut queue: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut v = vec![0i64; n];
            v[i] = 1;
            v
        })
        .collect();
    while let Some(beta) = queue.pop() {
        if seen.contains(&beta) {
            continue;
        }
        seen.push(beta.clone());
        for i in 0..n {
            let c = pair_with_simple_coroot(cartan, &beta, i);
            let mut img = beta.clone();
            img[i] -= c;
            if img.iter().all(|&x| x >= 0) && !seen.contains(&img) {
                queue.push(img);
            }
        }
    }
    seen.sort();
    seen
}

/// Build the root system of an irreducible finite type.
pub fn build_root_system(ct: CartanType) -> RootSystem {
    let cartan = finite_cartan_matrix(ct);
    let positive = positive_roots(&cartan);
    let highest = positive
        .iter()
        .max_by_key(|r| r.iter().sum::<i64>())
        .expect("nonempty positive system")
        .clone();
    RootSystem {
        ctype: ct,
        cartan,
        positive_roots: positive,
        highest_root: highest,
    }
}

/// Marks `d_i`: the coefficients of the simple roots in the highest root.
pub fn marks(ct: CartanType) -> Vec<i64> {
    build_root_system(ct).highest_root
}

/// A bijection between two node sets induced by a group element mapping
/// simple reflections to simple reflections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodePerm {
    pub map: BTreeMap<usize, usize>,
}

impl NodePerm {
    pub fn identity(domain: impl IntoIterator<Item = usize>) -> Self {
        NodePerm {
            map: domain.into_iter().map(|i| (i, i)).collect(),
        }
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[&i]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(a, b)| a == b)
    }

    /// π ∘ π.
    pub fn square(&self) -> NodePerm {
        NodePerm {
            map: self.map.iter().map(|(&i, &j)| (i, self.map[&j])).collect(),
        }
    }
}

/// The permutation of `J` induced by conjugation with the longest element of
/// the finite parabolic on `J`: `w₀(J)·s_i·w₀(J) = s_{π(i)}`.
///
/// Computed by the greedy descent: starting from the identity, repeatedly
/// multiply by a simple reflection whose root is still sent to a positive
/// root. The resulting element sends every positive root of `J` to a negative
/// one, and `π` is read off from `w₀(α_i) = -α_{π(i)}`.
///
/// `cartan` is the Cartan matrix of the induced diagram on `labels` (local
/// indices); it must be of finite type.
pub fn longest_conjugation(cartan: &[Vec<i64>], labels: &[usize]) -> Result<NodePerm> {
    let n = cartan.len();
    debug_assert_eq!(labels.len(), n);
    // images[j] = w(α_j) in simple-root coordinates
    let mut images: Vec<Vec<i64>> = (0..n)
        .map(|j| {
            let mut v = vec![0i64; n];
            v[j] = 1;
            v
        })
        .collect();
    // At most |Φ⁺| ≤ 120 steps for rank ≤ 8; anything past that means the
    // diagram was not of finite type.
    let mut steps = 0usize;
    while let Some(i) = (0..n).find(|&i| images[i].iter().all(|&x| x >= 0)) {
        // w ← w·s_i : new w(α_j) = w(α_j) - a[i][j]·w(α_i)
        let wi = images[i].clone();
        for j in 0..n {
            let c = cartan[i][j];
            if c != 0 {
                for (x, y) in images[j].iter_mut().zip(&wi) {
                    *x -= c * y;
                }
            }
        }
        steps += 1;
        if steps > 10_000 {
            return Err(Error::NotFiniteType(format!("{labels:?}")));
        }
    }
    let mut map = BTreeMap::new();
    for (j, img) in images.iter().enumerate() {
        let mut neg_simple = None;
        for (k, &x) in img.iter().enumerate() {
            if x != 0 {
                if x == -1 && img.iter().enumerate().all(|(m, &y)| m == k || y == 0) {
                    neg_simple = Some(k);
                } else {
                    neg_simple = None;
                    break;
                }
            }
        }
        let k = neg_simple.ok_or_else(|| {
            Error::Invalid("longest element does not permute the simple roots".into())
        })?;
        map.insert(labels[j], labels[k]);
    }
    Ok(NodePerm { map })
}
