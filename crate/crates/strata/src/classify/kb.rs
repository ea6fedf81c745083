//! Finite-normality knowledge base.
//!
//! Verdicts for strata of *finite* reflection arrangements (the counterparts
//! of an affine stratum at the alcove vertices), with an optional diagram
//! automorphism group `K'`. The decision procedure layers exact rules:
//!
//! * point and empty flats are always normal;
//! * one-dimensional flats are decided exactly by whether some element of
//!   `W ⋊ K'` reverses the line;
//! * a Coxeter class with more than one member is never normal (failure of
//!   normality in codimension one);
//! * classical components are normal precisely when their class is a
//!   singleton;
//! * exceptional components fall back to an embedded verdict table;
//! * for `K' ≠ 1`, reduction rules mirror the quotient arguments: components
//!   whose flat is fixed pointwise split off, orbits of components swapped by
//!   `K'` reduce to the stabilizer acting on the one non-full component, and
//!   a fork swap on a D-component is traded for the same-index B-type lookup.
//!
//! Rules return `Unknown` instead of guessing when nothing applies.

use crate::diagram::{ComponentType, IsogenyAction, NodeSet, Perm, Subdiagram};
use crate::rootsys::{finite_cartan_matrix, CartanType, Family};
use std::collections::BTreeSet;

/// Three-valued normality verdict for a finite counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Normal,
    NotNormal,
    Unknown,
}

/// A verdict together with the identifier of the rule that produced it.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RuleVerdict {
    pub verdict: Verdict,
    pub rule: String,
}

fn rv(verdict: Verdict, rule: &str) -> RuleVerdict {
    RuleVerdict {
        verdict,
        rule: rule.to_string(),
    }
}

/// One entry of the exceptional verdict table, in Bourbaki labels of the
/// reference diagram of `ambient`.
struct TableEntry {
    ambient: (Family, usize),
    subset: &'static [usize],
    verdict: Verdict,
    /// How the entry was pinned down. Entries are derived by inverting the
    /// embedded affine classification tables over all vertex deletions; the
    /// acceptance suite re-derives those tables from this data, closing the
    /// loop.
    #[allow(dead_code)]
    provenance: &'static str,
}

const EXCEPTIONAL_TABLE: &[TableEntry] = &[
    TableEntry {
        ambient: (Family::E, 6),
        subset: &[1, 3, 5, 6], // 2A2
        verdict: Verdict::Normal,
        provenance: "every retained affine 2A2 stratum deletes onto it",
    },
    TableEntry {
        ambient: (Family::E, 6),
        subset: &[2, 3, 4, 5], // D4
        verdict: Verdict::NotNormal,
        provenance: "the affine D4 stratum fails exactly at this counterpart",
    },
    TableEntry {
        ambient: (Family::E, 7),
        subset: &[2, 4, 5, 6, 7], // A5 containing node 2
        verdict: Verdict::Normal,
        provenance: "retained affine A5 strata delete onto it",
    },
    TableEntry {
        ambient: (Family::E, 7),
        subset: &[2, 5, 7], // the rigid 3A1
        verdict: Verdict::Normal,
        provenance: "retained affine 3A1 strata delete onto it",
    },
    TableEntry {
        ambient: (Family::E, 7),
        subset: &[1, 2, 3, 5, 7], // A2+3A1
        verdict: Verdict::Normal,
        provenance: "a retained rank-eight stratum deletes onto it",
    },
    TableEntry {
        ambient: (Family::E, 7),
        subset: &[2, 3, 4, 5], // D4
        verdict: Verdict::NotNormal,
        provenance: "all other deletions of the affine D4 are normal",
    },
    TableEntry {
        ambient: (Family::E, 7),
        subset: &[2, 3, 4, 5, 7], // D4+A1
        verdict: Verdict::NotNormal,
        provenance: "all other deletions of the affine D4+A1 are normal",
    },
    TableEntry {
        ambient: (Family::E, 8),
        subset: &[2, 3, 4, 5, 6, 7], // D6
        verdict: Verdict::NotNormal,
        provenance: "all other deletions of the affine D6 are normal",
    },
    TableEntry {
        ambient: (Family::E, 8),
        subset: &[1, 2, 3, 4, 5, 6], // E6
        verdict: Verdict::NotNormal,
        provenance: "all other deletions of the affine E6 are normal",
    },
    TableEntry {
        ambient: (Family::F, 4),
        subset: &[3, 4], // short A2
        verdict: Verdict::Normal,
        provenance: "the retained affine short-A2 deletes onto it",
    },
    TableEntry {
        ambient: (Family::F, 4),
        subset: &[2, 3], // B2
        verdict: Verdict::NotNormal,
        provenance: "all other deletions of the affine B2 are normal",
    },
];

/// The Coxeter class of a subset inside a *finite* diagram: closure under
/// longest-element conjugation over all one-node extensions.
pub fn finite_class(sub: &Subdiagram, seed: NodeSet) -> BTreeSet<NodeSet> {
    let all = sub.node_set();
    debug_assert!(seed.is_subset_of(all));
    let mut members = BTreeSet::new();
    members.insert(seed);
    let mut queue = vec![seed];
    while let Some(s) = queue.pop() {
        for j in all.iter() {
            if s.contains(j) {
                continue;
            }
            let view = sub.restrict(s.insert(j));
            let pi = view
                .longest_conjugation()
                .expect("parabolics of a finite diagram are finite");
            let image = NodeSet::from_nodes(s.iter().map(|i| pi.apply(i)));
            if members.insert(image) {
                queue.push(image);
            }
        }
    }
    members
}

/// Is the class of `seed` a singleton? Normality in codimension one for a
/// finite stratum is exactly this, and for the classical families normality
/// is equivalent to it.
pub fn finite_class_is_singleton(sub: &Subdiagram, seed: NodeSet) -> bool {
    finite_class(sub, seed).len() == 1
}

/// Greedy dominance: apply simple reflections while some simple-root value is
/// negative. Coordinates are in the coweight basis of `sub`.
fn dominant_representative(sub: &Subdiagram, v: &[i64]) -> Vec<i64> {
    let n = sub.rank();
    let mut x = v.to_vec();
    loop {
        let Some(i) = (0..n).find(|&i| x[i] < 0) else {
            return x;
        };
        // s_i(x) = x - x_i · α_i∨, with α_i∨ = row i of the Cartan matrix
        let c = x[i];
        for j in 0..n {
            x[j] -= c * sub.gcm[i][j];
        }
    }
}

/// Exact rule for one-dimensional flats: the stratum is normal iff some
/// element of `W ⋊ K'` reverses the line, i.e. the direction vector and its
/// negative (twisted by K') share a dominant representative.
pub fn line_reversal(sub: &Subdiagram, subset: NodeSet, k: &IsogenyAction) -> bool {
    let n = sub.rank();
    debug_assert_eq!(subset.len() + 1, n);
    let c = (0..n)
        .find(|&i| !subset.contains(sub.labels[i]))
        .expect("one free node");
    let mut v = vec![0i64; n];
    v[c] = 1;
    let dom = dominant_representative(sub, &v);
    for p in &k.elements {
        // -p⁻¹(e_c) = -e_{p⁻¹(c)}
        let Some(pre) = sub.labels.iter().position(|&l| p.apply(l) == sub.labels[c]) else {
            continue;
        };
        let mut w = vec![0i64; n];
        w[pre] = -1;
        if dominant_representative(sub, &w) == dom {
            return true;
        }
    }
    false
}

/// The exact one-dimensional criterion as a standalone operation: the stratum
/// of a dimension-one flat is normal iff the stabilizer of the line acts on
/// it as the sign flip.
pub fn dim1_shortcut(sub: &Subdiagram, subset: NodeSet, k: &IsogenyAction) -> crate::Result<bool> {
    if subset.len() + 1 != sub.rank() {
        return Err(crate::Error::Invalid(format!(
            "flat has dimension {} ≠ 1",
            sub.rank() - subset.len()
        )));
    }
    Ok(line_reversal(sub, subset, k))
}

fn reference_subdiagram(family: Family, rank: usize) -> Subdiagram {
    let ct = CartanType::new(family, rank).expect("valid reference type");
    let gcm = finite_cartan_matrix(ct);
    Subdiagram {
        labels: (1..=rank).collect(),
        gcm,
        len2: vec![2; rank],
        ambient_max_len2: 2,
    }
}

fn table_lookup(comp: &Subdiagram, subset: NodeSet, t: ComponentType) -> RuleVerdict {
    let Ok(isos) = comp.isomorphisms_to_reference() else {
        return rv(Verdict::Unknown, "table-miss");
    };
    let reference = reference_subdiagram(t.family, t.rank);
    for entry in EXCEPTIONAL_TABLE {
        if entry.ambient != (t.family, t.rank) {
            continue;
        }
        let seed = NodeSet::from_nodes(entry.subset.iter().copied());
        let entry_class = finite_class(&reference, seed);
        for iso in &isos {
            let image = NodeSet::from_nodes(
                subset
                    .iter()
                    .map(|l| iso[comp.local_index(l).expect("label in component")]),
            );
            if entry_class.contains(&image) {
                let rule = format!(
                    "table.{}{}",
                    t.family.letter().to_ascii_lowercase(),
                    t.rank
                );
                return rv(entry.verdict, &rule);
            }
        }
    }
    rv(Verdict::Unknown, "table-miss")
}

/// Verdict for a single connected component with trivial `K'`.
fn component_verdict(comp: &Subdiagram, subset: NodeSet) -> RuleVerdict {
    let all = comp.node_set();
    if subset == all {
        return rv(Verdict::Normal, "component-point");
    }
    if subset.is_empty() {
        return rv(Verdict::Normal, "component-empty");
    }
    if subset.len() + 1 == comp.rank() {
        let k = IsogenyAction::trivial(16);
        return if line_reversal(comp, subset, &k) {
            rv(Verdict::Normal, "dim1-line-reversal")
        } else {
            rv(Verdict::NotNormal, "dim1-line-fixed")
        };
    }
    let t = comp.component_type().expect("finite component");
    match t.family {
        Family::A | Family::B | Family::C | Family::D => {
            if finite_class_is_singleton(comp, subset) {
                rv(Verdict::Normal, "classical-singleton")
            } else {
                rv(Verdict::NotNormal, "classical-nonsingleton")
            }
        }
        Family::E | Family::F | Family::G => {
            if !finite_class_is_singleton(comp, subset) {
                rv(Verdict::NotNormal, "codim1-obstruction")
            } else {
                table_lookup(comp, subset, t)
            }
        }
    }
}

fn combine(parts: Vec<RuleVerdict>) -> RuleVerdict {
    if let Some(bad) = parts.iter().find(|p| p.verdict == Verdict::NotNormal) {
        return bad.clone();
    }
    if let Some(unknown) = parts.iter().find(|p| p.verdict == Verdict::Unknown) {
        return unknown.clone();
    }
    parts
        .into_iter()
        .reduce(|a, b| if a.rule >= b.rule { a } else { b })
        .unwrap_or_else(|| rv(Verdict::Normal, "empty-product"))
}

/// Restrict a node permutation to the labels of a subdiagram, acting as the
/// identity elsewhere.
fn restrict_perm(p: &Perm, domain: &Subdiagram, n_nodes: usize) -> Perm {
    let mut v: Vec<usize> = (0..n_nodes).collect();
    for &l in &domain.labels {
        v[l] = p.apply(l);
    }
    Perm(v)
}

fn image_action(k: &IsogenyAction, domain: &Subdiagram) -> IsogenyAction {
    let set: BTreeSet<Perm> = k
        .elements
        .iter()
        .map(|p| restrict_perm(p, domain, k.n_nodes))
        .collect();
    IsogenyAction {
        n_nodes: k.n_nodes,
        elements: set.into_iter().collect(),
    }
}

/// Quotient of a D-type (or A3) component by its fork swap: the stratum is
/// the one of the B-type diagram on the same indices, so the verdict is the
/// singleton test there. The two fork nodes become the doubled short end.
fn fork_swap_to_b(comp: &Subdiagram, subset: NodeSet, swap: &Perm) -> Option<RuleVerdict> {
    let n = comp.rank();
    if n < 3 {
        return None;
    }
    let t = comp.component_type().ok()?;
    if !(t.family == Family::D || (t.family == Family::A && t.rank == 3)) {
        return None;
    }
    let moved: Vec<usize> = comp
        .labels
        .iter()
        .copied()
        .filter(|&l| swap.apply(l) != l)
        .collect();
    if moved.len() != 2 || swap.apply(moved[0]) != moved[1] {
        return None;
    }
    let (mut u, mut v) = (moved[0], moved[1]);
    // canonicalize: a lone fork node in the subset is labelled n-1, not n
    if subset.contains(v) && !subset.contains(u) {
        std::mem::swap(&mut u, &mut v);
    }
    let (ui, vi) = (comp.local_index(u)?, comp.local_index(v)?);
    let deg = |i: usize| (0..n).filter(|&j| j != i && comp.gcm[i][j] != 0).count();
    if deg(ui) != 1 || deg(vi) != 1 {
        return None;
    }
    let w = (0..n).find(|&j| j != ui && comp.gcm[ui][j] != 0)?;
    if comp.gcm[vi][w] == 0 {
        return None;
    }
    // chain from the far end towards the fork: Bourbaki positions 1..n-2
    let mut chain = vec![w];
    let mut prev = ui;
    let mut cur = w;
    while let Some(next) =
        (0..n).find(|&j| j != prev && j != cur && j != vi && comp.gcm[cur][j] != 0)
    {
        chain.push(next);
        prev = cur;
        cur = next;
    }
    chain.reverse();
    let mut image = NodeSet::EMPTY;
    for (pos, &loc) in chain.iter().enumerate() {
        if subset.contains(comp.labels[loc]) {
            image = image.insert(pos + 1);
        }
    }
    if subset.contains(u) {
        image = image.insert(n - 1);
    }
    if subset.contains(v) {
        image = image.insert(n);
    }
    let b = reference_subdiagram(Family::B, n);
    let verdict = if image == b.node_set() || finite_class_is_singleton(&b, image) {
        Verdict::Normal
    } else {
        Verdict::NotNormal
    };
    Some(rv(verdict, "fork-swap-b"))
}

/// Normality verdict for a finite counterpart `(diagram, subset, K')`.
pub fn finite_normality(sub: &Subdiagram, subset: NodeSet, k: &IsogenyAction) -> RuleVerdict {
    let all = sub.node_set();
    debug_assert!(subset.is_subset_of(all));
    if subset == all {
        return rv(Verdict::Normal, "point");
    }
    if subset.is_empty() {
        return rv(Verdict::Normal, "whole-quotient");
    }
    if subset.len() + 1 == sub.rank() {
        return if line_reversal(sub, subset, k) {
            rv(Verdict::Normal, "dim1-line-reversal")
        } else {
            rv(Verdict::NotNormal, "dim1-line-fixed")
        };
    }

    let comps = sub.components();
    let acts_nontrivially = k
        .elements
        .iter()
        .any(|p| sub.labels.iter().any(|&l| p.apply(l) != l));
    if !acts_nontrivially {
        let parts = comps
            .iter()
            .map(|c| component_verdict(c, subset.intersect(c.node_set())))
            .collect();
        return combine(parts);
    }

    // K' ≠ 1. Split off components on whose flat every element of K' acts as
    // the identity (it maps the component to itself fixing all of its
    // non-subset nodes); those behave as factors with trivial group.
    let mut parts: Vec<RuleVerdict> = Vec::new();
    let mut active: Vec<Subdiagram> = Vec::new();
    for c in comps {
        let nodes = c.node_set();
        let s_c = subset.intersect(nodes);
        let inert = k.elements.iter().all(|p| {
            nodes.iter().all(|l| nodes.contains(p.apply(l)))
                && nodes
                    .iter()
                    .filter(|&l| !s_c.contains(l))
                    .all(|l| p.apply(l) == l)
        });
        if inert {
            parts.push(component_verdict(&c, s_c));
        } else {
            active.push(c);
        }
    }

    // group the remaining components into K'-orbits
    let mut blocks: Vec<Vec<Subdiagram>> = Vec::new();
    let mut assigned = vec![false; active.len()];
    for i in 0..active.len() {
        if assigned[i] {
            continue;
        }
        let mut block = vec![i];
        assigned[i] = true;
        loop {
            let mut grew = false;
            for j in 0..active.len() {
                if assigned[j] {
                    continue;
                }
                let reaches = k.elements.iter().any(|p| {
                    block.iter().any(|&b| {
                        active[b]
                            .labels
                            .iter()
                            .any(|&l| active[j].node_set().contains(p.apply(l)))
                    })
                });
                if reaches {
                    block.push(j);
                    assigned[j] = true;
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        blocks.push(block.iter().map(|&i| active[i].clone()).collect());
    }

    // treating blocks as independent factors is only valid when the action
    // on the active part is the direct product of its block restrictions
    if blocks.len() > 1 {
        let union = active
            .iter()
            .fold(NodeSet::EMPTY, |acc, c| acc.union(c.node_set()));
        let total = image_action(k, &sub.restrict(union)).order();
        let product: usize = blocks
            .iter()
            .map(|b| {
                let nodes = b
                    .iter()
                    .fold(NodeSet::EMPTY, |acc, c| acc.union(c.node_set()));
                image_action(k, &sub.restrict(nodes)).order()
            })
            .product();
        if total != product {
            return rv(Verdict::Unknown, "no-rule-coupled-blocks");
        }
    }

    for block in blocks {
        if block.len() == 1 {
            let comp = &block[0];
            let img = image_action(k, comp);
            let s_c = subset.intersect(comp.node_set());
            if img.is_trivial() {
                parts.push(component_verdict(comp, s_c));
            } else if img.order() == 2 {
                let swap = img
                    .elements
                    .iter()
                    .find(|p| !p.is_identity())
                    .expect("nontrivial");
                match fork_swap_to_b(comp, s_c, swap) {
                    Some(vd) => parts.push(vd),
                    None => parts.push(rv(Verdict::Unknown, "no-rule-component-twist")),
                }
            } else {
                parts.push(rv(Verdict::Unknown, "no-rule-component-twist"));
            }
        } else {
            // orbit of components: when the subset is full on all but one,
            // the stratum reduces to that component with the induced action
            // of its setwise stabilizer
            let non_full: Vec<usize> = block
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.node_set().is_subset_of(subset))
                .map(|(i, _)| i)
                .collect();
            match non_full.len() {
                0 => parts.push(rv(Verdict::Normal, "component-point")),
                1 => {
                    let target = &block[non_full[0]];
                    let nodes = target.node_set();
                    let stab_set: BTreeSet<Perm> = k
                        .elements
                        .iter()
                        .filter(|p| nodes.iter().all(|l| nodes.contains(p.apply(l))))
                        .map(|p| restrict_perm(p, target, k.n_nodes))
                        .collect();
                    let stab_action = IsogenyAction {
                        n_nodes: k.n_nodes,
                        elements: stab_set.into_iter().collect(),
                    };
                    let mut inner =
                        finite_normality(target, subset.intersect(nodes), &stab_action);
                    inner.rule = format!("swap-components>{}", inner.rule);
                    parts.push(inner);
                }
                _ => parts.push(rv(Verdict::Unknown, "no-rule-orbit")),
            }
        }
    }
    combine(parts)
}
