//! Extended Dynkin diagrams, node subsets, and the isogeny groups
//! `K ≅ N∨/Q∨` realized as diagram automorphisms.
//!
//! Nodes of an extended diagram are `0..=n` with `0` the affine node and
//! `1..=n` the Bourbaki labels of the finite diagram. The vertex `x_i` of the
//! closed fundamental alcove corresponds to node `N_i` (with `x_0 = 0` and
//! `x_i = ω_i∨/d_i`), so everything about faces of the alcove is phrased in
//! terms of subsets of nodes: the face with wall set `S` has vertex set the
//! complement of `S`.

use crate::rootsys::{
    build_root_system, finite_cartan_matrix, longest_conjugation, CartanType, Family, NodePerm,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

// ---------------------------------------------------------------------------
// Node sets

/// A subset of diagram nodes, stored as a bitset over indices `0..=15`.
///
/// `Ord` is lexicographic on the sorted index sequence (`{0,3} < {1,2}`),
/// which is the order used to pick canonical class representatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NodeSet(pub u16);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn from_nodes(nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut s = 0u16;
        for n in nodes {
            debug_assert!(n < 16);
            s |= 1 << n;
        }
        NodeSet(s)
    }

    pub fn contains(self, node: usize) -> bool {
        self.0 >> node & 1 == 1
    }

    pub fn insert(self, node: usize) -> Self {
        NodeSet(self.0 | 1 << node)
    }

    pub fn remove(self, node: usize) -> Self {
        NodeSet(self.0 & !(1 << node))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..16).filter(move |&i| self.contains(i))
    }

    pub fn is_subset_of(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersect(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    /// Complement within the first `n_nodes` indices.
    pub fn complement(self, n_nodes: usize) -> NodeSet {
        NodeSet(!self.0 & ((1u16 << n_nodes) - 1))
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl Ord for NodeSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for NodeSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for NodeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NodeSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<usize> = Vec::deserialize(d)?;
        Ok(NodeSet::from_nodes(v))
    }
}

// ---------------------------------------------------------------------------
// Extended diagrams and induced subdiagrams

/// The extended (affine) Dynkin diagram of an irreducible finite type.
#[derive(Debug, Clone)]
pub struct ExtendedDiagram {
    pub base: CartanType,
    /// Generalized Cartan matrix over nodes `0..=rank`; `gcm[i][j] = ⟨α_j, α_i∨⟩`.
    pub gcm: Vec<Vec<i64>>,
    /// Marks `d_i` (coefficients of the highest root, `d_0 = 1`).
    pub marks: Vec<i64>,
    /// Comarks: coefficients of the simple coroots in `θ∨` (index 0 gets 1).
    pub comarks: Vec<i64>,
    /// Squared root lengths per node, normalized so the short length is
    /// minimal; simply-laced diagrams have all entries equal.
    pub len2: Vec<i64>,
}

/// Build the extended diagram of a finite irreducible type.
pub fn extended_diagram(base: CartanType) -> ExtendedDiagram {
    let rs = build_root_system(base);
    let n = base.rank;
    let af = &rs.cartan;

    // Squared lengths, propagated from node 1 (scaled so values stay integer).
    let mut len2 = vec![0i64; n + 1];
    len2[1] = 2;
    let mut queue = vec![1usize];
    while let Some(i) = queue.pop() {
        for j in 1..=n {
            if j != i && af[i - 1][j - 1] != 0 && len2[j] == 0 {
                // (α_j,α_j)/(α_i,α_i) = a[i][j]/a[j][i]
                len2[j] = len2[i] * af[i - 1][j - 1] / af[j - 1][i - 1];
                queue.push(j);
            }
        }
    }
    let max_len2 = (1..=n).map(|i| len2[i]).max().unwrap();
    len2[0] = max_len2; // α_0 = -θ is long

    // θ∨ in the coroot basis: coefficients θ_k · len2_k / len2_max.
    let theta = &rs.highest_root;
    let theta_covec: Vec<i64> = (1..=n)
        .map(|k| {
            let num = theta[k - 1] * len2[k];
            debug_assert_eq!(num % max_len2, 0);
            num / max_len2
        })
        .collect();

    let mut gcm = vec![vec![0i64; n + 1]; n + 1];
    gcm[0][0] = 2;
    for i in 1..=n {
        gcm[i][i] = 2;
        for j in 1..=n {
            if i != j {
                gcm[i][j] = af[i - 1][j - 1];
            }
        }
        // a[0][j] = -⟨α_j, θ∨⟩, a[j][0] = -⟨θ, α_j∨⟩
        gcm[0][i] = -(1..=n).map(|k| theta_covec[k - 1] * af[k - 1][i - 1]).sum::<i64>();
        gcm[i][0] = -(1..=n).map(|k| theta[k - 1] * af[i - 1][k - 1]).sum::<i64>();
    }

    let mut marks = vec![1i64];
    marks.extend_from_slice(theta);
    let mut comarks = vec![1i64];
    comarks.extend_from_slice(&theta_covec);

    ExtendedDiagram {
        base,
        gcm,
        marks,
        comarks,
        len2,
    }
}

impl ExtendedDiagram {
    pub fn n_nodes(&self) -> usize {
        self.base.rank + 1
    }

    pub fn all_nodes(&self) -> NodeSet {
        NodeSet::from_nodes(0..self.n_nodes())
    }

    /// `W_J` is finite iff `J` omits at least one node of every affine
    /// component; the diagram here is connected affine, so any proper subset
    /// qualifies.
    pub fn parabolic_is_finite(&self, j: NodeSet) -> bool {
        j.is_subset_of(self.all_nodes()) && j != self.all_nodes()
    }

    /// Induced subdiagram on a node subset.
    pub fn subdiagram(&self, nodes: NodeSet) -> Subdiagram {
        let labels = nodes.to_vec();
        let gcm = labels
            .iter()
            .map(|&i| labels.iter().map(|&j| self.gcm[i][j]).collect())
            .collect();
        let len2 = labels.iter().map(|&i| self.len2[i]).collect();
        Subdiagram {
            labels,
            gcm,
            len2,
            ambient_max_len2: self.len2.iter().copied().max().unwrap(),
        }
    }

    /// The finite diagram obtained by deleting one node.
    pub fn delete_node(&self, j: usize) -> Subdiagram {
        self.subdiagram(self.all_nodes().remove(j))
    }

    /// Multiset of component types of the induced subdiagram, e.g. "D4+2A1".
    pub fn type_string(&self, nodes: NodeSet) -> String {
        self.subdiagram(nodes).type_string()
    }

    /// Edges `(i, j, coxeter_label)` with `i < j`; the label is 3, 4 or 6,
    /// with 0 standing for the infinite bond of the rank-one extension.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n_nodes() {
            for j in i + 1..self.n_nodes() {
                let p = self.gcm[i][j] * self.gcm[j][i];
                let m = match p {
                    0 => continue,
                    1 => 3,
                    2 => 4,
                    3 => 6,
                    _ => 0,
                };
                out.push((i, j, m));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "type": self.base.to_string(),
            "nodes": (0..self.n_nodes()).collect::<Vec<_>>(),
            "edges": self.edges().iter().map(|&(i, j, m)| {
                serde_json::json!({"i": i, "j": j, "m": m})
            }).collect::<Vec<_>>(),
            "marks": self.marks,
        })
    }
}

/// An induced subdiagram of an extended diagram (always of finite type when
/// obtained from a proper subset), with its original node labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdiagram {
    /// Original node ids, sorted ascending; local index i ↔ `labels[i]`.
    pub labels: Vec<usize>,
    pub gcm: Vec<Vec<i64>>,
    pub len2: Vec<i64>,
    pub ambient_max_len2: i64,
}

impl Subdiagram {
    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn node_set(&self) -> NodeSet {
        NodeSet::from_nodes(self.labels.iter().copied())
    }

    pub fn local_index(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Restrict to a subset of labels.
    pub fn restrict(&self, nodes: NodeSet) -> Subdiagram {
        let idx: Vec<usize> = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| nodes.contains(l))
            .map(|(i, _)| i)
            .collect();
        Subdiagram {
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            gcm: idx
                .iter()
                .map(|&i| idx.iter().map(|&j| self.gcm[i][j]).collect())
                .collect(),
            len2: idx.iter().map(|&i| self.len2[i]).collect(),
            ambient_max_len2: self.ambient_max_len2,
        }
    }

    /// Connected components, each as a subdiagram.
    pub fn components(&self) -> Vec<Subdiagram> {
        let n = self.rank();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                if comp[i] != usize::MAX {
                    continue;
                }
                comp[i] = count;
                for j in 0..n {
                    if j != i && self.gcm[i][j] != 0 && comp[j] == usize::MAX {
                        stack.push(j);
                    }
                }
            }
            count += 1;
        }
        (0..count)
            .map(|c| {
                let nodes = NodeSet::from_nodes(
                    (0..n).filter(|&i| comp[i] == c).map(|i| self.labels[i]),
                );
                self.restrict(nodes)
            })
            .collect()
    }

    /// The permutation of this diagram's labels induced by conjugation with
    /// the longest element of its (finite) Weyl group.
    pub fn longest_conjugation(&self) -> Result<NodePerm> {
        longest_conjugation(&self.gcm, &self.labels)
    }

    /// Recognize the isomorphism type of a connected finite diagram.
    pub fn component_type(&self) -> Result<ComponentType> {
        let n = self.rank();
        if n == 0 {
            return Err(Error::Invalid("empty component".into()));
        }
        let min_len = self.len2.iter().copied().min().unwrap();
        let max_len = self.len2.iter().copied().max().unwrap();
        let short = self.ambient_max_len2 > min_len
            && self.len2.iter().all(|&l| l < self.ambient_max_len2);
        if n == 1 {
            return Ok(ComponentType {
                family: Family::A,
                rank: 1,
                short,
            });
        }
        let mut bonds = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let p = self.gcm[i][j] * self.gcm[j][i];
                if p != 0 {
                    bonds.push(p);
                }
            }
        }
        if bonds.iter().any(|&p| p >= 4) {
            return Err(Error::NotFiniteType(format!("{:?}", self.labels)));
        }
        if bonds.contains(&3) {
            if n == 2 {
                return Ok(ComponentType {
                    family: Family::G,
                    rank: 2,
                    short: false,
                });
            }
            return Err(Error::NotFiniteType(format!("{:?}", self.labels)));
        }
        if bonds.contains(&2) {
            let degrees: Vec<usize> = (0..n)
                .map(|i| (0..n).filter(|&j| j != i && self.gcm[i][j] != 0).count())
                .collect();
            if degrees.iter().any(|&d| d > 2) || bonds.iter().filter(|&&p| p == 2).count() > 1 {
                return Err(Error::NotFiniteType(format!("{:?}", self.labels)));
            }
            if n == 2 {
                return Ok(ComponentType {
                    family: Family::B,
                    rank: 2,
                    short: false,
                });
            }
            let shorts = self.len2.iter().filter(|&&l| l == min_len).count();
            let longs = self.len2.iter().filter(|&&l| l == max_len).count();
            if shorts == 2 && longs == 2 && n == 4 {
                // double bond in the middle of a chain of four: F4
                let mid_double = (0..n).all(|i| {
                    (0..n).all(|j| {
                        let p = self.gcm[i][j] * self.gcm[j][i];
                        p != 2 || (degrees[i] == 2 && degrees[j] == 2)
                    })
                });
                if mid_double {
                    return Ok(ComponentType {
                        family: Family::F,
                        rank: 4,
                        short: false,
                    });
                }
            }
            if shorts == 1 {
                return Ok(ComponentType {
                    family: Family::B,
                    rank: n,
                    short: false,
                });
            }
            if longs == 1 {
                return Ok(ComponentType {
                    family: Family::C,
                    rank: n,
                    short: false,
                });
            }
            return Err(Error::NotFiniteType(format!("{:?}", self.labels)));
        }
        // simply laced
        let degrees: Vec<usize> = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && self.gcm[i][j] != 0).count())
            .collect();
        let branch: Vec<usize> = (0..n).filter(|&i| degrees[i] >= 3).collect();
        match branch.len() {
            0 => Ok(ComponentType {
                family: Family::A,
                rank: n,
                short,
            }),
            1 => {
                let b = branch[0];
                if degrees[b] != 3 {
                    return Err(Error::NotFiniteType(format!("{:?}", self.labels)));
                }
                // arm lengths from the branch node
                let mut arms = Vec::new();
                for j in 0..n {
                    if j != b && self.gcm[b][j] != 0 {
                        let mut len = 1;
                        let mut prev = b;
                        let mut cur = j;
                        loop {
                            let next = (0..n)
                                .find(|&k| k != prev && k != cur && self.gcm[cur][k] != 0);
                            match next {
                                Some(k) => {
                                    len += 1;
                                    prev = cur;
                                    cur = k;
                                }
                                None => break,
                            }
                        }
                        arms.push(len);
                    }
                }
                arms.sort_unstable();
                match arms.as_slice() {
                    [1, 1, m] => Ok(ComponentType {
                        family: Family::D,
                        rank: m + 3,
                        short,
                    }),
                    [1, 2, 2] => Ok(ComponentType {
                        family: Family::E,
                        rank: 6,
                        short,
                    }),
                    [1, 2, 3] => Ok(ComponentType {
                        family: Family::E,
                        rank: 7,
                        short,
                    }),
                    [1, 2, 4] => Ok(ComponentType {
                        family: Family::E,
                        rank: 8,
                        short,
                    }),
                    _ => Err(Error::NotFiniteType(format!("{:?}", self.labels))),
                }
            }
            _ => Err(Error::NotFiniteType(format!("{:?}", self.labels))),
        }
    }

    /// Type string of a (possibly reducible) finite subdiagram, e.g.
    /// `"D4+2A1"`; short A-components in a two-length ambient diagram are
    /// written with a `t` prefix (`tA1` is the short root A1).
    pub fn type_string(&self) -> String {
        if self.rank() == 0 {
            return "empty".to_string();
        }
        let mut types: Vec<ComponentType> = self
            .components()
            .iter()
            .map(|c| c.component_type().expect("finite component"))
            .collect();
        types.sort_by(|a, b| {
            b.rank
                .cmp(&a.rank)
                .then(a.family.cmp(&b.family))
                .then(a.short.cmp(&b.short))
        });
        let mut pieces: Vec<(ComponentType, usize)> = Vec::new();
        for t in types {
            match pieces.last_mut() {
                Some((u, c)) if *u == t => *c += 1,
                _ => pieces.push((t, 1)),
            }
        }
        pieces
            .iter()
            .map(|(t, c)| {
                let base = t.name();
                if *c > 1 {
                    format!("{c}{base}")
                } else {
                    base
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    /// All label bijections onto the Bourbaki reference diagram of the
    /// component's type (used for canonical table keys).
    pub fn isomorphisms_to_reference(&self) -> Result<Vec<Vec<usize>>> {
        let t = self.component_type()?;
        let reference = finite_cartan_matrix(CartanType::new(t.family, t.rank)?);
        let n = self.rank();
        let mut out = Vec::new();
        let mut assign = vec![0usize; n]; // local index -> reference node (1-based)
        fn backtrack(
            n: usize,
            gcm: &[Vec<i64>],
            reference: &[Vec<i64>],
            assign: &mut Vec<usize>,
            used: &mut Vec<bool>,
            pos: usize,
            out: &mut Vec<Vec<usize>>,
        ) {
            if pos == n {
                out.push(assign.clone());
                return;
            }
            for r in 0..n {
                if used[r] {
                    continue;
                }
                let mut ok = true;
                for p in 0..pos {
                    let q = assign[p] - 1;
                    if gcm[pos][p] != reference[r][q] || gcm[p][pos] != reference[q][r] {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    used[r] = true;
                    assign[pos] = r + 1;
                    backtrack(n, gcm, reference, assign, used, pos + 1, out);
                    used[r] = false;
                }
            }
        }
        let mut used = vec![false; n];
        backtrack(n, &self.gcm, &reference, &mut assign, &mut used, 0, &mut out);
        if out.is_empty() {
            return Err(Error::Invalid(format!(
                "no isomorphism onto reference {t:?} for {:?}",
                self.labels
            )));
        }
        Ok(out)
    }
}

/// Normalize a user-written type pattern like `"A1+D4"`, `"2A1+tildeA1"` or
/// `"~A2"` into the canonical component-type string used by
/// [`Subdiagram::type_string`]. Returns `None` for unparsable patterns.
pub fn normalize_pattern(pattern: &str) -> Option<String> {
    let mut types: Vec<ComponentType> = Vec::new();
    for piece in pattern.split('+') {
        let p = piece.trim();
        if p.is_empty() {
            return None;
        }
        let (count, rest) = {
            let digits: String = p.chars().take_while(|c| c.is_ascii_digit()).collect();
            let rest = &p[digits.len()..];
            (digits.parse::<usize>().unwrap_or(1).max(1), rest)
        };
        let rest = rest
            .strip_prefix("tilde")
            .or_else(|| rest.strip_prefix('~'))
            .map(|r| format!("t{r}"))
            .unwrap_or_else(|| rest.to_string());
        let (short, rest) = match rest.strip_prefix('t') {
            Some(r) => (true, r.to_string()),
            None => (false, rest),
        };
        let mut chars = rest.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return None,
        };
        let rank: usize = chars.as_str().parse().ok()?;
        // rank-two B and C coincide; emitted type strings say B2
        let family = if family == Family::C && rank == 2 {
            Family::B
        } else {
            family
        };
        for _ in 0..count {
            types.push(ComponentType {
                family,
                rank,
                short,
            });
        }
    }
    types.sort_by(|a, b| {
        b.rank
            .cmp(&a.rank)
            .then(a.family.cmp(&b.family))
            .then(a.short.cmp(&b.short))
    });
    let mut pieces: Vec<(ComponentType, usize)> = Vec::new();
    for t in types {
        match pieces.last_mut() {
            Some((u, c)) if *u == t => *c += 1,
            _ => pieces.push((t, 1)),
        }
    }
    Some(
        pieces
            .iter()
            .map(|(t, c)| {
                if *c > 1 {
                    format!("{c}{}", t.name())
                } else {
                    t.name()
                }
            })
            .collect::<Vec<_>>()
            .join("+"),
    )
}

/// Isomorphism type of a connected finite diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComponentType {
    pub family: Family,
    pub rank: usize,
    /// All roots short relative to the ambient diagram (only meaningful when
    /// the ambient has two root lengths).
    pub short: bool,
}

impl ComponentType {
    pub fn name(&self) -> String {
        let prefix = if self.short { "t" } else { "" };
        format!("{prefix}{}{}", self.family.letter(), self.rank)
    }
}

// ---------------------------------------------------------------------------
// Fundamental groups and isogeny actions

/// Abstract isomorphism type of `P∨/Q∨`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FundamentalGroup {
    Trivial,
    Cyclic(usize),
    /// ℤ/2 × ℤ/2 (type D with even rank).
    Klein,
}

impl FundamentalGroup {
    pub fn order(self) -> usize {
        match self {
            FundamentalGroup::Trivial => 1,
            FundamentalGroup::Cyclic(m) => m,
            FundamentalGroup::Klein => 4,
        }
    }
}

/// `P∨/Q∨` for each irreducible type.
pub fn fundamental_group(ct: CartanType) -> FundamentalGroup {
    match (ct.family, ct.rank) {
        (Family::A, n) => FundamentalGroup::Cyclic(n + 1),
        (Family::B, _) | (Family::C, _) => FundamentalGroup::Cyclic(2),
        (Family::D, n) if n % 2 == 1 => FundamentalGroup::Cyclic(4),
        (Family::D, _) => FundamentalGroup::Klein,
        (Family::E, 6) => FundamentalGroup::Cyclic(3),
        (Family::E, 7) => FundamentalGroup::Cyclic(2),
        _ => FundamentalGroup::Trivial,
    }
}

/// A permutation of the nodes `0..=n` of an extended diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n_nodes: usize) -> Self {
        Perm((0..n_nodes).collect())
    }

    pub fn apply(&self, node: usize) -> usize {
        self.0[node]
    }

    pub fn apply_set(&self, s: NodeSet) -> NodeSet {
        NodeSet::from_nodes(s.iter().map(|i| self.0[i]))
    }

    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// Named isogeny selectors (subgroups of the fundamental group).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Isogeny {
    /// K = 1.
    SimplyConnected,
    /// K = P∨/Q∨.
    Adjoint,
    /// Order-d cyclic subgroup for type A (d divides n+1).
    Cyclic(usize),
    /// B_n: the full group (odd orthogonal); D_n: ⟨ξ⟩ (even orthogonal).
    SO,
    /// C_n: the full group.
    PSp,
    /// D_n, n even: ⟨τ₂⟩.
    HSpin,
    /// D_n, n even: ⟨τ₁τ₂⟩ (the other half-spin quotient).
    HSpinPrime,
    /// D_n: the full group.
    PSO,
}

impl Isogeny {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        Ok(match lower.as_str() {
            "sc" | "simply-connected" | "trivial" | "1" => Isogeny::SimplyConnected,
            "adjoint" | "ad" | "full" => Isogeny::Adjoint,
            "so" => Isogeny::SO,
            "psp" => Isogeny::PSp,
            "hspin" => Isogeny::HSpin,
            "hspin2" | "hspin'" | "hspinprime" => Isogeny::HSpinPrime,
            "pso" => Isogeny::PSO,
            _ => {
                if let Some(d) = lower
                    .strip_prefix("cyclic:")
                    .or_else(|| lower.strip_prefix("cyclic-"))
                {
                    let d: usize = d
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad isogeny selector {s:?}")))?;
                    Isogeny::Cyclic(d)
                } else {
                    return Err(Error::Invalid(format!("bad isogeny selector {s:?}")));
                }
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            Isogeny::SimplyConnected => "sc".into(),
            Isogeny::Adjoint => "adjoint".into(),
            Isogeny::Cyclic(d) => format!("cyclic:{d}"),
            Isogeny::SO => "SO".into(),
            Isogeny::PSp => "PSp".into(),
            Isogeny::HSpin => "HSpin".into(),
            Isogeny::HSpinPrime => "HSpin2".into(),
            Isogeny::PSO => "PSO".into(),
        }
    }
}

/// A finite group of diagram automorphisms of an extended diagram, acting on
/// alcove vertices through the node dictionary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsogenyAction {
    pub n_nodes: usize,
    /// Sorted, closed under composition and inverse.
    pub elements: Vec<Perm>,
}

impl IsogenyAction {
    pub fn trivial(n_nodes: usize) -> Self {
        IsogenyAction {
            n_nodes,
            elements: vec![Perm::identity(n_nodes)],
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    fn from_generators(n_nodes: usize, gens: &[Perm]) -> Self {
        let mut set: BTreeSet<Perm> = BTreeSet::new();
        set.insert(Perm::identity(n_nodes));
        let mut queue: Vec<Perm> = set.iter().cloned().collect();
        while let Some(p) = queue.pop() {
            for g in gens {
                let q = g.compose(&p);
                if set.insert(q.clone()) {
                    queue.push(q);
                }
            }
        }
        IsogenyAction {
            n_nodes,
            elements: set.into_iter().collect(),
        }
    }

    /// Subgroup fixing node `j`.
    pub fn node_stabilizer(&self, j: usize) -> IsogenyAction {
        IsogenyAction {
            n_nodes: self.n_nodes,
            elements: self
                .elements
                .iter()
                .filter(|p| p.apply(j) == j)
                .cloned()
                .collect(),
        }
    }

    /// Subgroup fixing every node of `vertices` (the pointwise stabilizer of
    /// the face spanned by those alcove vertices; the action is affine, so
    /// fixing all vertices fixes the face pointwise).
    pub fn face_stabilizer(&self, vertices: NodeSet) -> IsogenyAction {
        IsogenyAction {
            n_nodes: self.n_nodes,
            elements: self
                .elements
                .iter()
                .filter(|p| vertices.iter().all(|j| p.apply(j) == j))
                .cloned()
                .collect(),
        }
    }

    /// Orbit of a node subset.
    pub fn orbit(&self, s: NodeSet) -> BTreeSet<NodeSet> {
        self.elements.iter().map(|p| p.apply_set(s)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.order(),
            "elements": self.elements.iter().map(|p| p.0.clone()).collect::<Vec<_>>(),
        })
    }
}

/// The generator(s) of the full fundamental-group action on alcove vertices.
fn full_action_generators(ed: &ExtendedDiagram) -> Vec<Perm> {
    let n = ed.base.rank;
    let nn = ed.n_nodes();
    match (ed.base.family, n) {
        (Family::A, _) => {
            // cyclic rotation of the (n+1)-cycle
            vec![Perm((0..nn).map(|i| (i + 1) % nn).collect())]
        }
        (Family::B, _) => {
            let mut v: Vec<usize> = (0..nn).collect();
            v.swap(0, 1);
            vec![Perm(v)]
        }
        (Family::C, _) => vec![Perm((0..nn).map(|i| n - i).collect())],
        (Family::D, _) if n % 2 == 1 => {
            // σ: x0 ↦ xn ↦ x1 ↦ x_{n-1} ↦ x0, x_j ↦ x_{n-j} otherwise
            let mut v: Vec<usize> = (0..nn).map(|j| n - j).collect();
            v[0] = n;
            v[n] = 1;
            v[1] = n - 1;
            v[n - 1] = 0;
            vec![Perm(v)]
        }
        (Family::D, _) => {
            let mut tau1: Vec<usize> = (0..nn).collect();
            tau1.swap(0, 1);
            tau1.swap(n - 1, n);
            let tau2: Vec<usize> = (0..nn).map(|j| n - j).collect();
            vec![Perm(tau1), Perm(tau2)]
        }
        (Family::E, 6) => {
            // θ: x1 ↦ x6 ↦ x0 ↦ x1 and x3 ↦ x5 ↦ x2 ↦ x3
            let mut v: Vec<usize> = (0..nn).collect();
            v[1] = 6;
            v[6] = 0;
            v[0] = 1;
            v[3] = 5;
            v[5] = 2;
            v[2] = 3;
            vec![Perm(v)]
        }
        (Family::E, 7) => {
            let mut v: Vec<usize> = (0..nn).collect();
            v.swap(0, 7);
            v.swap(1, 6);
            v.swap(3, 5);
            vec![Perm(v)]
        }
        _ => vec![],
    }
}

/// ξ for type D: τ₁ when the rank is even, σ² when it is odd.
fn xi_generator(ed: &ExtendedDiagram) -> Perm {
    let n = ed.base.rank;
    let nn = ed.n_nodes();
    let mut v: Vec<usize> = (0..nn).collect();
    v.swap(0, 1);
    v.swap(n - 1, n);
    Perm(v)
}

/// Realize an isogeny selector as node permutations of the extended diagram,
/// validating every element as a mark-preserving diagram automorphism.
pub fn isogeny_action(ed: &ExtendedDiagram, iso: Isogeny) -> Result<IsogenyAction> {
    let n = ed.base.rank;
    let nn = ed.n_nodes();
    let fam = ed.base.family;
    let unsupported = || Error::UnsupportedIsogeny {
        selector: iso.label(),
        cartan: ed.base.to_string(),
    };
    let action = match iso {
        Isogeny::SimplyConnected => IsogenyAction::trivial(nn),
        Isogeny::Adjoint => IsogenyAction::from_generators(nn, &full_action_generators(ed)),
        Isogeny::Cyclic(d) => {
            if fam != Family::A || d == 0 || (n + 1) % d != 0 {
                return Err(unsupported());
            }
            let rho = &full_action_generators(ed)[0];
            let mut gen = Perm::identity(nn);
            for _ in 0..(n + 1) / d {
                gen = rho.compose(&gen);
            }
            IsogenyAction::from_generators(nn, &[gen])
        }
        Isogeny::SO => match fam {
            Family::B => IsogenyAction::from_generators(nn, &full_action_generators(ed)),
            Family::D => IsogenyAction::from_generators(nn, &[xi_generator(ed)]),
            _ => return Err(unsupported()),
        },
        Isogeny::PSp => {
            if fam != Family::C {
                return Err(unsupported());
            }
            IsogenyAction::from_generators(nn, &full_action_generators(ed))
        }
        Isogeny::HSpin | Isogeny::HSpinPrime => {
            if fam != Family::D || n % 2 != 0 {
                return Err(unsupported());
            }
            let tau2 = Perm((0..nn).map(|j| n - j).collect());
            let gen = if iso == Isogeny::HSpin {
                tau2
            } else {
                xi_generator(ed).compose(&tau2)
            };
            IsogenyAction::from_generators(nn, &[gen])
        }
        Isogeny::PSO => {
            if fam != Family::D {
                return Err(unsupported());
            }
            IsogenyAction::from_generators(nn, &full_action_generators(ed))
        }
    };
    for p in &action.elements {
        validate_diagram_automorphism(ed, p)?;
    }
    let full = fundamental_group(ed.base).order();
    if full % action.order() != 0 {
        return Err(Error::Invalid(format!(
            "action order {} does not divide |P∨/Q∨| = {full}",
            action.order()
        )));
    }
    Ok(action)
}

fn validate_diagram_automorphism(ed: &ExtendedDiagram, p: &Perm) -> Result<()> {
    let nn = ed.n_nodes();
    let mut seen = vec![false; nn];
    for i in 0..nn {
        let pi = p.apply(i);
        if pi >= nn || seen[pi] {
            return Err(Error::Invalid("not a bijection on nodes".into()));
        }
        seen[pi] = true;
        if ed.marks[pi] != ed.marks[i] {
            return Err(Error::Invalid(format!(
                "marks not preserved: d_{pi} ≠ d_{i}"
            )));
        }
    }
    for i in 0..nn {
        for j in 0..nn {
            if ed.gcm[p.apply(i)][p.apply(j)] != ed.gcm[i][j] {
                return Err(Error::Invalid(format!(
                    "not a diagram automorphism at ({i},{j})"
                )));
            }
        }
    }
    Ok(())
}

/// The isogeny selectors meaningful for a type, in presentation order.
pub fn isogenies_for(ct: CartanType) -> Vec<Isogeny> {
    let mut v = vec![Isogeny::SimplyConnected];
    match (ct.family, ct.rank) {
        (Family::A, n) => {
            for d in 2..=n {
                if (n + 1) % d == 0 {
                    v.push(Isogeny::Cyclic(d));
                }
            }
            if n >= 1 {
                v.push(Isogeny::Adjoint);
            }
        }
        (Family::B, _) | (Family::C, _) | (Family::E, 6) | (Family::E, 7) => {
            v.push(Isogeny::Adjoint);
        }
        (Family::D, n) => {
            v.push(Isogeny::SO);
            if n % 2 == 0 {
                v.push(Isogeny::HSpin);
                v.push(Isogeny::HSpinPrime);
            }
            v.push(Isogeny::PSO);
        }
        _ => {}
    }
    v
}
