//! Embedded classification tables for the exceptional types and machinery to
//! materialize and diff them.
//!
//! The lists live in a versioned data file; each row selects wall sets by
//! component type (optionally constrained to contain a node or to be stable
//! under the diagram automorphism group), by explicit node sets, or as the
//! complement of an explicit node set. Row ids name the violated row in
//! diffs. Counts are transcription checks: materialization fails loudly if a
//! row does not match the recorded number of subsets.

use crate::diagram::{isogeny_action, ExtendedDiagram, Isogeny, NodeSet};
use crate::rootsys::Family;
use crate::{Error, Result};
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

const DATA: &str = include_str!("../data/exceptional_lists.json");

#[derive(Debug, Deserialize)]
struct RawTables {
    codim1: BTreeMap<String, Vec<Row>>,
    normal: BTreeMap<String, Vec<Row>>,
}

/// One row of an embedded list.
#[derive(Debug, Clone, Deserialize)]
pub struct Row {
    #[serde(default)]
    pub r#type: Option<String>,
    #[serde(default)]
    pub require_node: Option<usize>,
    #[serde(default)]
    pub stable: Option<bool>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub explicit: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub complement: Option<Vec<usize>>,
    pub id: String,
}

fn raw() -> &'static RawTables {
    static CELL: OnceLock<RawTables> = OnceLock::new();
    CELL.get_or_init(|| serde_json::from_str(DATA).expect("embedded table data parses"))
}

/// Which list a query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListKind {
    Codim1,
    Normal,
}

fn rows_for(kind: ListKind, ed: &ExtendedDiagram) -> Option<&'static [Row]> {
    let map = match kind {
        ListKind::Codim1 => &raw().codim1,
        ListKind::Normal => &raw().normal,
    };
    map.get(&ed.base.to_string()).map(Vec::as_slice)
}

/// Wall sets selected by one row.
pub fn materialize_row(ed: &ExtendedDiagram, row: &Row) -> Result<BTreeSet<NodeSet>> {
    let mut out = BTreeSet::new();
    if let Some(sets) = &row.explicit {
        for s in sets {
            out.insert(NodeSet::from_nodes(s.iter().copied()));
        }
        return Ok(out);
    }
    if let Some(c) = &row.complement {
        let mut s = ed.all_nodes();
        for &i in c {
            s = s.remove(i);
        }
        out.insert(s);
        return Ok(out);
    }
    let pattern = row
        .r#type
        .as_deref()
        .ok_or_else(|| Error::Invalid(format!("row {} selects nothing", row.id)))?;
    let full_action = isogeny_action(ed, Isogeny::Adjoint)?;
    for bits in 0..(1u16 << ed.n_nodes()) {
        let s = NodeSet(bits);
        if !ed.parabolic_is_finite(s) || s.is_empty() || s.len() == ed.base.rank {
            continue;
        }
        if ed.type_string(s) != pattern {
            continue;
        }
        if let Some(node) = row.require_node {
            if !s.contains(node) {
                continue;
            }
        }
        if row.stable == Some(true) && full_action.elements.iter().any(|p| p.apply_set(s) != s) {
            continue;
        }
        out.insert(s);
    }
    if let Some(expected) = row.count {
        if out.len() != expected {
            return Err(Error::Invalid(format!(
                "row {} matches {} subsets, expected {expected}",
                row.id,
                out.len()
            )));
        }
    }
    Ok(out)
}

/// Materialize a whole list for an exceptional diagram, including the empty
/// set and all full-rank (point) wall sets.
pub fn expected_set(kind: ListKind, ed: &ExtendedDiagram) -> Result<BTreeSet<NodeSet>> {
    let rows = rows_for(kind, ed).ok_or_else(|| {
        Error::UnsupportedCase(format!("no embedded list for {}", ed.base))
    })?;
    let mut out = BTreeSet::new();
    out.insert(NodeSet::EMPTY);
    for bits in 0..(1u16 << ed.n_nodes()) {
        let s = NodeSet(bits);
        if ed.parabolic_is_finite(s) && s.len() == ed.base.rank {
            out.insert(s);
        }
    }
    for row in rows {
        out.extend(materialize_row(ed, row)?);
    }
    Ok(out)
}

/// Does the embedded normal list contain this wall set? Only meaningful for
/// the exceptional families E, F, G.
pub fn normal_list_contains(ed: &ExtendedDiagram, s: NodeSet) -> Result<bool> {
    Ok(expected_set(ListKind::Normal, ed)?.contains(&s))
}

pub fn is_exceptional(ed: &ExtendedDiagram) -> bool {
    matches!(ed.base.family, Family::E | Family::F | Family::G)
}

/// Name the row(s) selecting a wall set, for diff messages.
pub fn row_ids_for(kind: ListKind, ed: &ExtendedDiagram, s: NodeSet) -> Vec<String> {
    let Some(rows) = rows_for(kind, ed) else {
        return Vec::new();
    };
    rows.iter()
        .filter(|row| {
            materialize_row(ed, row)
                .map(|m| m.contains(&s))
                .unwrap_or(false)
        })
        .map(|row| row.id.clone())
        .collect()
}

/// A difference between a regenerated list and the embedded expectation.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TableDiff {
    /// Wall sets the pipeline produced that the table does not contain.
    pub unexpected: Vec<NodeSet>,
    /// Wall sets the table contains that the pipeline missed, with row ids.
    pub missing: Vec<(NodeSet, Vec<String>)>,
}

impl TableDiff {
    pub fn is_empty(&self) -> bool {
        self.unexpected.is_empty() && self.missing.is_empty()
    }
}

/// Compare a computed set against an embedded list.
pub fn diff_against(
    kind: ListKind,
    ed: &ExtendedDiagram,
    computed: &BTreeSet<NodeSet>,
) -> Result<TableDiff> {
    let expected = expected_set(kind, ed)?;
    let unexpected = computed.difference(&expected).copied().collect();
    let missing = expected
        .difference(computed)
        .map(|&s| (s, row_ids_for(kind, ed, s)))
        .collect();
    Ok(TableDiff {
        unexpected,
        missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::extended_diagram;
    use crate::rootsys::CartanType;

    #[test]
    fn counts_validate() {
        for t in ["E6", "E7", "E8", "F4", "G2"] {
            let ed = extended_diagram(CartanType::parse(t).unwrap());
            for kind in [ListKind::Codim1, ListKind::Normal] {
                let set = expected_set(kind, &ed).unwrap();
                assert!(!set.is_empty(), "{t}");
            }
        }
    }

    #[test]
    fn normal_is_subset_of_codim1() {
        for t in ["E6", "E7", "E8", "F4", "G2"] {
            let ed = extended_diagram(CartanType::parse(t).unwrap());
            let c1 = expected_set(ListKind::Codim1, &ed).unwrap();
            let nm = expected_set(ListKind::Normal, &ed).unwrap();
            assert!(nm.is_subset(&c1), "{t}: normal list outside codim1 list");
        }
    }

    #[test]
    fn g2_lists() {
        let ed = extended_diagram(CartanType::parse("G2").unwrap());
        let c1 = expected_set(ListKind::Codim1, &ed).unwrap();
        // ∅, the two point strata of full rank that are finite, and tA1
        assert!(c1.contains(&NodeSet::EMPTY));
        assert!(c1.contains(&NodeSet::from_nodes([1])));
        assert!(!c1.contains(&NodeSet::from_nodes([2])));
    }
}
