//! Brute-force geometric model: the fundamental alcove in coweight
//! coordinates, word-ball enumeration of the affine Weyl group, flats as
//! affine subspaces, and the geometric computation of Σ and of Ω-sets.
//!
//! Points are written in the basis of fundamental coweights, so `α_i(x)` is
//! just the i-th coordinate and every wall-membership test is an exact
//! rational comparison; no tolerances exist in this module. Group elements
//! (including the isogeny action) have integer linear part and translation
//! in these coordinates, so the ball is deduplicated by exact equality.

use crate::diagram::{ExtendedDiagram, IsogenyAction, NodeSet, Perm};
use crate::linalg;
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// Exact scalar for the geometric model. Coordinates stay tiny (denominators
/// divide the marks), so machine-word rationals are plenty.
pub type R64 = num_rational::Rational64;

fn r(n: i64) -> R64 {
    R64::from_integer(n)
}

/// An element of the extended affine Weyl group: `x ↦ m·x + t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub m: Vec<Vec<i64>>,
    pub t: Vec<i64>,
    /// Generator word (indices of simple affine reflections), empty for the
    /// isogeny part.
    pub word: Vec<u8>,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        AffineMap {
            m: (0..n)
                .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
                .collect(),
            t: vec![0; n],
            word: Vec::new(),
        }
    }

    pub fn word_len(&self) -> usize {
        self.word.len()
    }

    /// self ∘ other.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let n = self.t.len();
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| self.m[i][k] * other.m[k][j]).sum())
                    .collect()
            })
            .collect();
        let t = (0..n)
            .map(|i| (0..n).map(|k| self.m[i][k] * other.t[k]).sum::<i64>() + self.t[i])
            .collect();
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        AffineMap { m, t, word }
    }

    pub fn apply_point(&self, p: &[R64]) -> Vec<R64> {
        let n = self.t.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| r(self.m[i][k]) * p[k])
                    .sum::<R64>()
                    + r(self.t[i])
            })
            .collect()
    }

    pub fn apply_vector(&self, v: &[R64]) -> Vec<R64> {
        let n = self.t.len();
        (0..n)
            .map(|i| (0..n).map(|k| r(self.m[i][k]) * v[k]).sum::<R64>())
            .collect()
    }

    fn key(&self) -> (Vec<i64>, Vec<i64>) {
        (self.m.iter().flatten().copied().collect(), self.t.clone())
    }
}

/// A flat: an affine subspace in canonical form (reduced direction basis,
/// base point with zero entries in the pivot columns).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flat {
    pub base: Vec<R64>,
    pub dirs: Vec<Vec<R64>>,
}

impl Flat {
    fn canonicalize(mut base: Vec<R64>, mut dirs: Vec<Vec<R64>>) -> Flat {
        let pivots = linalg::rref(&mut dirs);
        for (row, &c) in pivots.iter().enumerate() {
            let f = base[c];
            if f != r(0) {
                for j in 0..base.len() {
                    base[j] -= f * dirs[row][j];
                }
            }
        }
        Flat { base, dirs }
    }

    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    pub fn contains(&self, p: &[R64]) -> bool {
        let diff: Vec<R64> = p.iter().zip(&self.base).map(|(a, b)| *a - *b).collect();
        if self.dirs.is_empty() {
            return diff.iter().all(|x| *x == r(0));
        }
        linalg::in_span(&self.dirs, &diff)
    }

    pub fn transform(&self, g: &AffineMap) -> Flat {
        Flat::canonicalize(
            g.apply_point(&self.base),
            self.dirs.iter().map(|d| g.apply_vector(d)).collect(),
        )
    }
}

/// Exact model of the alcove and arrangement for one extended diagram.
#[derive(Debug, Clone)]
pub struct EuclideanModel {
    pub ed: ExtendedDiagram,
    pub dim: usize,
    /// Affine wall forms: wall i is `{x : form_i · x = rhs_i}`; wall 0 is the
    /// affine wall `θ = 1`, wall i ≥ 1 is `α_i = 0`.
    pub wall_forms: Vec<Vec<i64>>,
    pub wall_rhs: Vec<i64>,
    /// Simple affine reflections s_0, …, s_n.
    pub generators: Vec<AffineMap>,
}

/// Build the exact Euclidean model of the fundamental alcove.
pub fn build_euclidean_model(ed: &ExtendedDiagram) -> EuclideanModel {
    let n = ed.base.rank;
    let mut wall_forms = Vec::with_capacity(n + 1);
    let mut wall_rhs = Vec::with_capacity(n + 1);
    // wall 0: θ(x) = 1 with θ = Σ d_i α_i
    wall_forms.push((1..=n).map(|i| ed.marks[i]).collect::<Vec<i64>>());
    wall_rhs.push(1);
    for i in 1..=n {
        let mut f = vec![0i64; n];
        f[i - 1] = 1;
        wall_forms.push(f);
        wall_rhs.push(0);
    }

    let mut generators = Vec::with_capacity(n + 1);
    // s_0: x ↦ x - (θ(x) - 1)·θ∨; θ∨ has coweight coordinates -gcm[0][j].
    let theta_cov: Vec<i64> = (1..=n).map(|j| -ed.gcm[0][j]).collect();
    let mut m0 = AffineMap::identity(n);
    for j in 0..n {
        for k in 0..n {
            m0.m[j][k] -= theta_cov[j] * ed.marks[k + 1];
        }
        m0.t[j] = theta_cov[j];
    }
    m0.word = vec![0];
    generators.push(m0);
    // s_i: x ↦ x - α_i(x)·α_i∨; α_i∨ has coweight coordinates gcm[i][·].
    for i in 1..=n {
        let mut g = AffineMap::identity(n);
        for j in 0..n {
            g.m[j][i - 1] -= ed.gcm[i][j + 1];
        }
        g.word = vec![i as u8];
        generators.push(g);
    }

    EuclideanModel {
        ed: ed.clone(),
        dim: n,
        wall_forms,
        wall_rhs,
        generators,
    }
}

impl EuclideanModel {
    /// Alcove vertex `x_i` (`x_0 = 0`, `x_i = ω_i∨ / d_i`).
    pub fn vertex(&self, i: usize) -> Vec<R64> {
        let mut v = vec![r(0); self.dim];
        if i > 0 {
            v[i - 1] = R64::new(1, self.ed.marks[i]);
        }
        v
    }

    fn form_value(&self, wall: usize, p: &[R64]) -> R64 {
        self.wall_forms[wall]
            .iter()
            .zip(p)
            .map(|(&a, x)| r(a) * *x)
            .sum()
    }

    fn form_on_vector(&self, wall: usize, v: &[R64]) -> R64 {
        self.wall_forms[wall]
            .iter()
            .zip(v)
            .map(|(&a, x)| r(a) * *x)
            .sum()
    }

    /// Walls of the closed alcove containing the flat.
    pub fn walls_containing(&self, flat: &Flat) -> NodeSet {
        NodeSet::from_nodes((0..=self.dim).filter(|&i| {
            self.form_value(i, &flat.base) == r(self.wall_rhs[i])
                && flat.dirs.iter().all(|d| self.form_on_vector(i, d) == r(0))
        }))
    }

    /// The flat cut out by a finite-type wall set.
    pub fn flat_of(&self, walls: NodeSet) -> Result<Flat> {
        if !self.ed.parabolic_is_finite(walls) {
            return Err(Error::NotFiniteType(walls.to_string()));
        }
        let rows: Vec<Vec<R64>> = walls
            .iter()
            .map(|i| self.wall_forms[i].iter().map(|&a| r(a)).collect())
            .collect();
        let rhs: Vec<R64> = walls.iter().map(|i| r(self.wall_rhs[i])).collect();
        if walls.is_empty() {
            let dirs = (0..self.dim)
                .map(|i| {
                    let mut v = vec![r(0); self.dim];
                    v[i] = r(1);
                    v
                })
                .collect();
            return Ok(Flat::canonicalize(vec![r(0); self.dim], dirs));
        }
        let base =
            linalg::solve(&rows, &rhs).ok_or_else(|| Error::Invalid("inconsistent walls".into()))?;
        let dirs = linalg::nullspace(&rows, self.dim);
        Ok(Flat::canonicalize(base, dirs))
    }

    /// Does the flat lie over the closed alcove, i.e. is it the intersection
    /// of the alcove walls containing it? Returns the wall set when so.
    pub fn lies_over(&self, flat: &Flat) -> Option<NodeSet> {
        let walls = self.walls_containing(flat);
        if walls.len() == self.dim + 1 {
            return None; // would force the whole affine system
        }
        let rows: Vec<Vec<R64>> = walls
            .iter()
            .map(|i| self.wall_forms[i].iter().map(|&a| r(a)).collect())
            .collect();
        let codim = if rows.is_empty() { 0 } else { linalg::rank(&rows) };
        if codim + flat.dim() == self.dim {
            Some(walls)
        } else {
            None
        }
    }

    /// The isogeny action as affine maps (determined by the images of the
    /// alcove vertices, which span affinely).
    pub fn isogeny_maps(&self, k: &IsogenyAction) -> Vec<AffineMap> {
        k.elements.iter().map(|p| self.perm_to_map(p)).collect()
    }

    fn perm_to_map(&self, p: &Perm) -> AffineMap {
        let n = self.dim;
        let c = p.apply(0);
        let t: Vec<i64> = if c == 0 {
            vec![0; n]
        } else {
            (0..n)
                .map(|j| i64::from(j == c - 1))
                .collect()
        };
        let mut m = vec![vec![0i64; n]; n];
        for i in 1..=n {
            // column i-1 = d_i · (x_{p(i)} - x_{p(0)})
            let pi = p.apply(i);
            for (j, row) in m.iter_mut().enumerate() {
                let mut val = 0i64;
                if pi > 0 && j == pi - 1 {
                    // d_i / d_{p(i)} = 1 since marks are preserved
                    val += 1;
                }
                if c > 0 && j == c - 1 {
                    val -= self.ed.marks[i];
                }
                row[i - 1] = val;
            }
        }
        let map = AffineMap {
            m,
            t,
            word: Vec::new(),
        };
        debug_assert!((0..=n).all(|i| {
            map.apply_point(&self.vertex(i)) == self.vertex(p.apply(i))
        }));
        map
    }
}

/// The ball of all group elements of word length ≤ `max_len`, deduplicated by
/// (matrix, translation). Breadth-first, so stored words are geodesic.
pub fn group_ball(model: &EuclideanModel, max_len: usize) -> Result<Vec<AffineMap>> {
    const BUDGET: usize = 4_000_000;
    let mut seen: HashSet<(Vec<i64>, Vec<i64>)> = HashSet::new();
    let id = AffineMap::identity(model.dim);
    seen.insert(id.key());
    let mut ball = vec![id];
    let mut frontier: Vec<usize> = vec![0];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for &idx in &frontier {
            for g in &model.generators {
                let h = g.compose(&ball[idx]);
                let mut h = h;
                h.word = {
                    let mut w = g.word.clone();
                    w.extend_from_slice(&ball[idx].word);
                    w
                };
                if seen.insert(h.key()) {
                    ball.push(h);
                    next.push(ball.len() - 1);
                    if ball.len() > BUDGET {
                        return Err(Error::BudgetExceeded(format!(
                            "group ball exceeds {BUDGET} elements"
                        )));
                    }
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(ball)
}

/// Result of the geometric Σ computation.
#[derive(Debug, Clone)]
pub struct SigmaGeometric {
    pub members: BTreeSet<NodeSet>,
    /// Members are unchanged when the ball bound is lowered by two; a cleared
    /// flag is evidence, not proof, that the ball was large enough.
    pub stable: bool,
}

/// Σ computed geometrically: collect the wall sets of `w·L` for every ball
/// element `w` such that `w·L` lies over the closed alcove.
pub fn sigma_geometric(
    model: &EuclideanModel,
    walls: NodeSet,
    max_len: usize,
) -> Result<SigmaGeometric> {
    let flat = model.flat_of(walls)?;
    let ball = group_ball(model, max_len)?;
    let mut members = BTreeSet::new();
    let mut members_lower = BTreeSet::new();
    let mut seen_flats: HashSet<Flat> = HashSet::new();
    for g in &ball {
        let img = flat.transform(g);
        let fresh = seen_flats.insert(img.clone());
        if !fresh {
            continue;
        }
        if let Some(s) = model.lies_over(&img) {
            members.insert(s);
            if g.word_len() + 2 <= max_len {
                members_lower.insert(s);
            }
        }
    }
    let stable = members == members_lower;
    Ok(SigmaGeometric { members, stable })
}

/// Result of the geometric Ω computation at an alcove vertex.
#[derive(Debug, Clone)]
pub struct OmegaAtVertex {
    /// Flats through the vertex in the `W_{𝓗,K}`-orbit of `L`.
    pub omega: BTreeSet<Flat>,
    /// Orbit of `L` under the vertex stabilizer.
    pub stabilizer_orbit: BTreeSet<Flat>,
    pub unibranch: bool,
    pub stable: bool,
}

/// Ω at the vertex `x_j`, over the truncated group ball, together with the
/// unibranch verdict (Ω equals the orbit of the flat under the vertex
/// stabilizer). Real flats suffice: a real flat determines its
/// complexification.
pub fn omega_at_vertex(
    model: &EuclideanModel,
    k: &IsogenyAction,
    walls: NodeSet,
    j: usize,
    max_len: usize,
) -> Result<OmegaAtVertex> {
    if walls.contains(j) {
        return Err(Error::VacuousVertex { node: j });
    }
    let flat = model.flat_of(walls)?;
    let xj = model.vertex(j);
    debug_assert!(flat.contains(&xj));
    let ball = group_ball(model, max_len)?;
    let kmaps = model.isogeny_maps(k);

    let mut omega = BTreeSet::new();
    let mut omega_lower = BTreeSet::new();
    let mut orbit = BTreeSet::new();
    let mut orbit_lower = BTreeSet::new();
    let mut flat_cache: HashMap<(Vec<i64>, Vec<i64>), Flat> = HashMap::new();
    for w in &ball {
        for km in &kmaps {
            let g = km.compose(w);
            let img = flat_cache
                .entry(g.key())
                .or_insert_with(|| flat.transform(&g))
                .clone();
            let in_lower = w.word_len() + 2 <= max_len;
            if img.contains(&xj) {
                omega.insert(img.clone());
                if in_lower {
                    omega_lower.insert(img.clone());
                }
            }
            if g.apply_point(&xj) == xj {
                orbit.insert(img.clone());
                if in_lower {
                    orbit_lower.insert(img);
                }
            }
        }
    }
    let stable = omega == omega_lower && orbit == orbit_lower;
    let unibranch = omega == orbit;
    Ok(OmegaAtVertex {
        omega,
        stabilizer_orbit: orbit,
        unibranch,
        stable,
    })
}

/// Count geometrically distinct strata: group all finite-type wall sets by
/// the K-saturated face set their flats generate.
pub fn count_geometric_strata(
    model: &EuclideanModel,
    k: &IsogenyAction,
    max_len: usize,
) -> Result<usize> {
    let nn = model.dim + 1;
    let mut signatures: BTreeMap<Vec<NodeSet>, Vec<NodeSet>> = BTreeMap::new();
    for bits in 0..(1u16 << nn) {
        let s = NodeSet(bits);
        if !model.ed.parabolic_is_finite(s) {
            continue;
        }
        let geo = sigma_geometric(model, s, max_len)?;
        if !geo.stable {
            return Err(Error::BudgetExceeded(format!(
                "sigma not stable at max_len {max_len} for {s}"
            )));
        }
        let mut sat: BTreeSet<NodeSet> = BTreeSet::new();
        for p in &k.elements {
            for &m in &geo.members {
                sat.insert(p.apply_set(m));
            }
        }
        signatures
            .entry(sat.into_iter().collect())
            .or_default()
            .push(s);
    }
    Ok(signatures.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{extended_diagram, isogeny_action, Isogeny};
    use crate::rootsys::CartanType;

    fn model(s: &str) -> EuclideanModel {
        build_euclidean_model(&extended_diagram(CartanType::parse(s).unwrap()))
    }

    fn ns(v: &[usize]) -> NodeSet {
        NodeSet::from_nodes(v.iter().copied())
    }

    #[test]
    fn vertices_lie_on_the_right_walls() {
        for s in ["A1", "A2", "A3", "B3", "C2", "C3", "G2"] {
            let m = model(s);
            for i in 0..=m.dim {
                let v = m.vertex(i);
                for w in 0..=m.dim {
                    let on = m.form_value(w, &v) == R64::from_integer(m.wall_rhs[w]);
                    assert_eq!(on, w != i, "{s}: vertex {i}, wall {w}");
                }
            }
        }
    }

    #[test]
    fn generators_are_involutions() {
        for s in ["A2", "C2", "G2", "B3"] {
            let m = model(s);
            for g in &m.generators {
                let gg = g.compose(g);
                assert_eq!(gg.key(), AffineMap::identity(m.dim).key());
            }
        }
    }

    #[test]
    fn ball_sizes_infinite_dihedral() {
        let m = model("A1");
        assert_eq!(group_ball(&m, 0).unwrap().len(), 1);
        // lengths 0..=3 give 1 + 2 + 2 + 2 = 7 distinct elements
        assert_eq!(group_ball(&m, 3).unwrap().len(), 7);
        let mut last = 0;
        for l in 0..6 {
            let b = group_ball(&m, l).unwrap().len();
            assert!(b >= last);
            last = b;
        }
    }

    #[test]
    fn ball_recovers_finite_weyl_group_at_a_vertex() {
        // elements fixing the origin form W; for C2, |W| = 8
        let m = model("C2");
        let ball = group_ball(&m, 8).unwrap();
        let origin = m.vertex(0);
        let fixing = ball
            .iter()
            .filter(|g| g.apply_point(&origin) == origin)
            .count();
        assert_eq!(fixing, 8);
    }

    #[test]
    fn flats_match_vertices() {
        let m = model("A2");
        // all walls but one cut out a single vertex
        for j in 0..=2 {
            let s = NodeSet::from_nodes((0..=2).filter(|&i| i != j));
            let f = m.flat_of(s).unwrap();
            assert_eq!(f.dim(), 0);
            assert!(f.contains(&m.vertex(j)));
        }
        // one wall: the line through the two other vertices
        let f = m.flat_of(ns(&[1])).unwrap();
        assert_eq!(f.dim(), 1);
        assert!(f.contains(&m.vertex(0)));
        assert!(f.contains(&m.vertex(2)));
        // empty set: the whole plane
        assert_eq!(m.flat_of(NodeSet::EMPTY).unwrap().dim(), 2);
    }

    #[test]
    fn face_dimension_law() {
        for s in ["A3", "B3", "C3", "G2"] {
            let m = model(s);
            for bits in 0..(1u16 << (m.dim + 1)) {
                let set = NodeSet(bits);
                if !m.ed.parabolic_is_finite(set) {
                    continue;
                }
                let f = m.flat_of(set).unwrap();
                assert_eq!(f.dim(), m.dim - set.len(), "{s}: {set}");
                for j in 0..=m.dim {
                    if !set.contains(j) {
                        assert!(f.contains(&m.vertex(j)));
                    }
                }
                assert_eq!(m.lies_over(&f), Some(set));
            }
        }
    }

    #[test]
    fn ball_elements_preserve_the_arrangement() {
        // the image of every alcove wall under every ball element is again a
        // hyperplane of the arrangement: some root is constant at an integer
        // on it
        use crate::rootsys::build_root_system;
        for name in ["A2", "C2", "G2"] {
            let m = model(name);
            let roots = build_root_system(m.ed.base).positive_roots;
            let ball = group_ball(&m, 6).unwrap();
            for wall in 0..=m.dim {
                let f = m.flat_of(ns(&[wall])).unwrap();
                for g in &ball {
                    let img = f.transform(g);
                    let carried = roots.iter().any(|beta| {
                        let on_dirs = img.dirs.iter().all(|d| {
                            beta.iter()
                                .zip(d)
                                .map(|(&b, x)| r(b) * *x)
                                .sum::<R64>()
                                == r(0)
                        });
                        let val: R64 = beta
                            .iter()
                            .zip(&img.base)
                            .map(|(&b, x)| r(b) * *x)
                            .sum();
                        on_dirs && val.is_integer()
                    });
                    assert!(carried, "{name}: wall {wall} leaves the arrangement");
                }
            }
        }
    }

    #[test]
    fn truncated_sigma_is_contained_in_the_class() {
        // ball truncation can only under-approximate Σ; equality is the
        // stability criterion checked in the acceptance suite
        use crate::coxclass::coxeter_class;
        for name in ["A2", "C2", "B3", "G2"] {
            let m = model(name);
            for bits in 0..(1u16 << (m.dim + 1)) {
                let s = NodeSet(bits);
                if !m.ed.parabolic_is_finite(s) {
                    continue;
                }
                let cls = coxeter_class(&m.ed, s).unwrap();
                for len in [2, 5, 9] {
                    let geo = sigma_geometric(&m, s, len).unwrap();
                    assert!(
                        geo.members.is_subset(&cls.members),
                        "{name} {s} at length {len}"
                    );
                }
            }
        }
    }

    #[test]
    fn sigma_geometric_matches_hand_cases() {
        let m = model("A2");
        let geo = sigma_geometric(&m, ns(&[1]), 8).unwrap();
        assert!(geo.stable);
        let expect: BTreeSet<NodeSet> = [ns(&[0]), ns(&[1]), ns(&[2])].into_iter().collect();
        assert_eq!(geo.members, expect);
        let empty = sigma_geometric(&m, NodeSet::EMPTY, 4).unwrap();
        assert_eq!(empty.members.len(), 1);
    }

    #[test]
    fn g2_short_a1_is_geometrically_rigid() {
        let m = model("G2");
        let geo = sigma_geometric(&m, ns(&[1]), 10).unwrap();
        assert!(geo.stable);
        assert_eq!(geo.members.len(), 1);
    }

    #[test]
    fn omega_empty_set_is_unibranch() {
        let m = model("A2");
        let k = IsogenyAction::trivial(3);
        let o = omega_at_vertex(&m, &k, NodeSet::EMPTY, 0, 6).unwrap();
        assert!(o.unibranch);
        assert_eq!(o.omega.len(), 1);
    }

    #[test]
    fn omega_a2_line_at_origin() {
        let m = model("A2");
        let k = IsogenyAction::trivial(3);
        let o = omega_at_vertex(&m, &k, ns(&[1]), 0, 10).unwrap();
        assert!(o.stable);
        // three lines of the finite A2 arrangement pass through the origin in
        // the orbit of L, and the stabilizer W(A2) reaches them all
        assert!(o.unibranch);
    }

    #[test]
    fn isogeny_maps_act_on_vertices() {
        let d = extended_diagram(CartanType::parse("C2").unwrap());
        let m = build_euclidean_model(&d);
        let k = isogeny_action(&d, Isogeny::PSp).unwrap();
        for (p, map) in k.elements.iter().zip(m.isogeny_maps(&k)) {
            for i in 0..=2 {
                assert_eq!(map.apply_point(&m.vertex(i)), m.vertex(p.apply(i)));
            }
        }
    }
}
