//! Coxeter classes of node subsets and the enumeration of strata.
//!
//! The class of a wall set `S` is its closure under one step: for each node
//! `j` outside `S` such that `S ∪ {j}` still generates a finite parabolic,
//! conjugate `S` by the longest element of that parabolic (a permutation of
//! `S ∪ {j}` computed in [`crate::rootsys`]) and keep the image. Subsets that
//! would swallow a whole affine component are skipped; in particular a wall
//! set of full rank (a point face) has a singleton class.

use crate::diagram::{ExtendedDiagram, IsogenyAction, NodeSet};
use crate::{Error, Result};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// A Coxeter class: a set of wall sets of equal cardinality, closed under the
/// longest-element conjugation step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoxeterClass {
    pub members: BTreeSet<NodeSet>,
}

impl CoxeterClass {
    /// Canonical representative: the lexicographically least member.
    pub fn rep(&self) -> NodeSet {
        *self.members.iter().next().expect("class is never empty")
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: NodeSet) -> bool {
        self.members.contains(&s)
    }
}

/// Compute the Coxeter class of a finite-type wall set.
pub fn coxeter_class(ed: &ExtendedDiagram, seed: NodeSet) -> Result<CoxeterClass> {
    if !ed.parabolic_is_finite(seed) {
        return Err(Error::NotFiniteType(seed.to_string()));
    }
    let mut members: BTreeSet<NodeSet> = BTreeSet::new();
    members.insert(seed);
    let mut queue: VecDeque<NodeSet> = VecDeque::new();
    queue.push_back(seed);
    while let Some(s) = queue.pop_front() {
        // ascending node order: a determinism convention, the closure is
        // order independent
        for j in 0..ed.n_nodes() {
            if s.contains(j) {
                continue;
            }
            let joined = s.insert(j);
            if !ed.parabolic_is_finite(joined) {
                continue;
            }
            let view = ed.subdiagram(joined);
            let pi = view.longest_conjugation()?;
            let image = NodeSet::from_nodes(s.iter().map(|i| pi.apply(i)));
            if members.insert(image) {
                queue.push_back(image);
            }
        }
    }
    Ok(CoxeterClass { members })
}

/// `Σ(𝓗,K,L) = K·Σ(𝓗,L)`: the K-saturation of a class, as a set of wall sets.
pub fn sigma_with_k(cls: &CoxeterClass, k: &IsogenyAction) -> BTreeSet<NodeSet> {
    let mut out = BTreeSet::new();
    for p in &k.elements {
        for &m in &cls.members {
            out.insert(p.apply_set(m));
        }
    }
    out
}

/// A K-orbit of Coxeter classes (one stratum of the quotient).
#[derive(Debug, Clone, Serialize)]
pub struct StratumOrbit {
    /// Lexicographically least class representative across the orbit.
    pub rep: NodeSet,
    /// Representatives of the classes in the orbit.
    pub class_reps: Vec<NodeSet>,
    /// All wall sets of the orbit (`Σ(𝓗,K,L)` for the canonical member).
    pub sigma: BTreeSet<NodeSet>,
}

/// Enumeration of all strata for one (diagram, K) pair.
#[derive(Debug, Clone, Serialize)]
pub struct StrataEnumeration {
    pub orbits: Vec<StratumOrbit>,
}

impl StrataEnumeration {
    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbit_of(&self, s: NodeSet) -> Option<&StratumOrbit> {
        self.orbits.iter().find(|o| o.sigma.contains(&s))
    }
}

/// Enumerate every finite-type wall set, grouped into Coxeter classes and
/// then into K-orbits of classes. Classes are memoized per canonical member,
/// so each subset is touched once.
pub fn enumerate_strata(ed: &ExtendedDiagram, k: &IsogenyAction) -> Result<StrataEnumeration> {
    let nn = ed.n_nodes();
    let mut class_of: BTreeMap<NodeSet, NodeSet> = BTreeMap::new(); // subset -> class rep
    let mut classes: BTreeMap<NodeSet, CoxeterClass> = BTreeMap::new(); // class rep -> class
    for bits in 0..(1u16 << nn) {
        let s = NodeSet(bits);
        if !ed.parabolic_is_finite(s) || class_of.contains_key(&s) {
            continue;
        }
        let cls = coxeter_class(ed, s)?;
        let rep = cls.rep();
        for &m in &cls.members {
            class_of.insert(m, rep);
        }
        classes.insert(rep, cls);
    }

    // group class reps into K-orbits via k·[S] = [k·S]
    let mut orbit_of: BTreeMap<NodeSet, usize> = BTreeMap::new();
    let mut orbits: Vec<Vec<NodeSet>> = Vec::new();
    for &rep in classes.keys() {
        if orbit_of.contains_key(&rep) {
            continue;
        }
        let idx = orbits.len();
        let mut members = BTreeSet::new();
        let mut queue = vec![rep];
        while let Some(r) = queue.pop() {
            if !members.insert(r) {
                continue;
            }
            orbit_of.insert(r, idx);
            for p in &k.elements {
                let img = class_of[&p.apply_set(r)];
                if !members.contains(&img) {
                    queue.push(img);
                }
            }
        }
        orbits.push(members.into_iter().collect());
    }

    let orbits = orbits
        .into_iter()
        .map(|class_reps| {
            let rep = class_reps[0];
            let sigma = sigma_with_k(&classes[&rep], k);
            StratumOrbit {
                rep,
                class_reps,
                sigma,
            }
        })
        .collect();
    Ok(StrataEnumeration { orbits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{extended_diagram, isogeny_action, Isogeny, IsogenyAction};
    use crate::rootsys::CartanType;

    fn ed(s: &str) -> ExtendedDiagram {
        extended_diagram(CartanType::parse(s).unwrap())
    }

    fn ns(v: &[usize]) -> NodeSet {
        NodeSet::from_nodes(v.iter().copied())
    }

    #[test]
    fn empty_set_is_a_singleton_class() {
        for s in ["A1", "A3", "G2", "E6"] {
            let d = ed(s);
            let c = coxeter_class(&d, NodeSet::EMPTY).unwrap();
            assert_eq!(c.members.len(), 1);
        }
    }

    #[test]
    fn affine_a2_single_nodes_form_one_class() {
        let d = ed("A2");
        let c = coxeter_class(&d, ns(&[1])).unwrap();
        let expect: BTreeSet<NodeSet> = [ns(&[0]), ns(&[1]), ns(&[2])].into_iter().collect();
        assert_eq!(c.members, expect);
        assert_eq!(c.rep(), ns(&[0]));
    }

    #[test]
    fn g2_short_a1_class_is_singleton() {
        let d = ed("G2");
        // node 1 carries the short root
        let c = coxeter_class(&d, ns(&[1])).unwrap();
        assert_eq!(c.members.len(), 1);
        // the long A1 is movable
        let c = coxeter_class(&d, ns(&[2])).unwrap();
        assert!(c.members.len() > 1);
    }

    #[test]
    fn affine_a3_alternating_pair() {
        let d = ed("A3");
        let c = coxeter_class(&d, ns(&[1, 3])).unwrap();
        assert_eq!(c.members.len(), 1);
        let k = isogeny_action(&d, Isogeny::Adjoint).unwrap();
        let sig = sigma_with_k(&c, &k);
        let expect: BTreeSet<NodeSet> = [ns(&[1, 3]), ns(&[0, 2])].into_iter().collect();
        assert_eq!(sig, expect);
    }

    #[test]
    fn c2_vertex_classes_under_k() {
        let d = ed("C2");
        let c = coxeter_class(&d, ns(&[0])).unwrap();
        assert_eq!(c.members.len(), 1);
        let k = isogeny_action(&d, Isogeny::PSp).unwrap();
        let sig = sigma_with_k(&c, &k);
        assert_eq!(sig, [ns(&[0]), ns(&[2])].into_iter().collect());
    }

    #[test]
    fn point_case_guard() {
        // expanding a rank-size subset would swallow the whole diagram
        let d = ed("A2");
        let c = coxeter_class(&d, ns(&[0, 1])).unwrap();
        assert_eq!(c.members.len(), 1);
        assert!(coxeter_class(&d, d.all_nodes()).is_err());
    }

    #[test]
    fn idempotence_and_partition() {
        for s in ["A3", "B3", "C3", "G2"] {
            let d = ed(s);
            let k = IsogenyAction::trivial(d.n_nodes());
            let en = enumerate_strata(&d, &k).unwrap();
            let mut seen = BTreeSet::new();
            for orbit in &en.orbits {
                for &m in &orbit.sigma {
                    assert!(seen.insert(m), "{s}: subset {m} in two strata");
                    // idempotence: the class from any member is the class itself
                    let again = coxeter_class(&d, m).unwrap();
                    assert_eq!(again.rep(), orbit.class_reps[0]);
                }
            }
            let total = (0..1u16 << d.n_nodes())
                .filter(|&b| d.parabolic_is_finite(NodeSet(b)))
                .count();
            assert_eq!(seen.len(), total, "{s}: partition misses subsets");
        }
    }

    #[test]
    fn members_have_isomorphic_subdiagrams() {
        for s in ["B3", "C3", "F4", "E6"] {
            let d = ed(s);
            let k = IsogenyAction::trivial(d.n_nodes());
            for orbit in enumerate_strata(&d, &k).unwrap().orbits {
                let t = d.type_string(orbit.rep);
                for &m in &orbit.sigma {
                    assert_eq!(d.type_string(m), t, "{s}: class mixes types");
                }
            }
        }
    }

    #[test]
    fn k_equivariance() {
        for (s, iso) in [("A4", Isogeny::Adjoint), ("D5", Isogeny::PSO), ("E6", Isogeny::Adjoint)] {
            let d = ed(s);
            let k = isogeny_action(&d, iso).unwrap();
            for bits in 0..(1u16 << d.n_nodes()) {
                let s0 = NodeSet(bits);
                if !d.parabolic_is_finite(s0) {
                    continue;
                }
                let c = coxeter_class(&d, s0).unwrap();
                for p in &k.elements {
                    let mapped: BTreeSet<NodeSet> =
                        c.members.iter().map(|&m| p.apply_set(m)).collect();
                    let c2 = coxeter_class(&d, p.apply_set(s0)).unwrap();
                    assert_eq!(mapped, c2.members);
                }
            }
        }
    }

    #[test]
    fn a1_extension_strata_counts() {
        let d = ed("A1");
        let k = IsogenyAction::trivial(2);
        assert_eq!(enumerate_strata(&d, &k).unwrap().count(), 3);
        let kf = isogeny_action(&d, Isogeny::Adjoint).unwrap();
        assert_eq!(enumerate_strata(&d, &kf).unwrap().count(), 2);
    }
}
