//! Invariant-theoretic falsifier for small finite counterparts.
//!
//! For a finite reflection group `W ⋊ K'` (rank ≤ 4) and a flat `L`, the
//! stratum is normal iff restriction of invariants `ℂ[E]^{W⋊K'} → ℂ[L]^Γ` is
//! surjective, where `Γ` is the stabilizer of `L`. This module compares, per
//! degree, the dimension of the restricted image (computed by Reynolds
//! averaging of monomials, exact rational row reduction) with the dimension
//! of the target (computed from the Molien series of the restricted
//! stabilizer action). A deficiency refutes normality; agreement up to a
//! degree bound is evidence, never proof.

use crate::diagram::{IsogenyAction, NodeSet, Subdiagram};
use crate::linalg;
use crate::{Error, Rat, Result};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashSet};

fn q(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// A finite group of exact integer matrices (coweight coordinates).
#[derive(Debug, Clone)]
pub struct MatrixGroup {
    pub dim: usize,
    pub elements: Vec<Vec<Vec<i64>>>,
}

impl MatrixGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

/// The full finite group `W ⋊ K'` of a finite diagram, as matrices in its
/// coweight basis.
pub fn reflection_group(sub: &Subdiagram, k: &IsogenyAction) -> Result<MatrixGroup> {
    const BUDGET: usize = 100_000;
    let n = sub.rank();
    let mut gens: Vec<Vec<Vec<i64>>> = Vec::new();
    for i in 0..n {
        // s_i in coweight coordinates: column i loses the coroot row
        let mut m = identity(n);
        for j in 0..n {
            m[j][i] -= sub.gcm[i][j];
        }
        gens.push(m);
    }
    for p in &k.elements {
        if p.is_identity() {
            continue;
        }
        let mut m = vec![vec![0i64; n]; n];
        for (i, &l) in sub.labels.iter().enumerate() {
            let img = p.apply(l);
            let Some(ii) = sub.local_index(img) else {
                return Err(Error::Invalid(
                    "automorphism does not preserve the diagram".into(),
                ));
            };
            m[ii][i] = 1;
        }
        gens.push(m);
    }
    let mut seen: HashSet<Vec<Vec<i64>>> = HashSet::new();
    seen.insert(identity(n));
    let mut queue = vec![identity(n)];
    while let Some(g) = queue.pop() {
        for gen in &gens {
            let h = mat_mul(gen, &g);
            if seen.insert(h.clone()) {
                if seen.len() > BUDGET {
                    return Err(Error::BudgetExceeded(format!(
                        "group order exceeds {BUDGET}"
                    )));
                }
                queue.push(h);
            }
        }
    }
    let mut elements: Vec<_> = seen.into_iter().collect();
    elements.sort();
    Ok(MatrixGroup { dim: n, elements })
}

/// Elements of `W ⋊ K'` stabilizing the flat of `subset` setwise, together
/// with their restrictions to the flat. In coweight coordinates the flat is
/// the span of the coordinates not in the subset, so stabilizing it means
/// the subset-rows of those columns vanish, and the restriction is just the
/// corresponding submatrix.
pub fn stabilizer_group(
    sub: &Subdiagram,
    subset: NodeSet,
    k: &IsogenyAction,
) -> Result<(MatrixGroup, MatrixGroup)> {
    let group = reflection_group(sub, k)?;
    let n = sub.rank();
    let free: Vec<usize> = (0..n)
        .filter(|&i| !subset.contains(sub.labels[i]))
        .collect();
    let mut stab = Vec::new();
    let mut restricted = Vec::new();
    for g in &group.elements {
        let keeps = free
            .iter()
            .all(|&c| (0..n).all(|r| free.contains(&r) || g[r][c] == 0));
        if keeps {
            stab.push(g.clone());
            restricted.push(
                free.iter()
                    .map(|&r| free.iter().map(|&c| g[r][c]).collect())
                    .collect(),
            );
        }
    }
    let mut dedup: Vec<Vec<Vec<i64>>> = Vec::new();
    for m in restricted {
        if !dedup.contains(&m) {
            dedup.push(m);
        }
    }
    Ok((
        MatrixGroup {
            dim: n,
            elements: stab,
        },
        MatrixGroup {
            dim: free.len(),
            elements: dedup,
        },
    ))
}

// -- dense polynomials over Rat in `nvars` variables, exponent-keyed --------

type Poly = BTreeMap<Vec<u32>, Rat>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out: Poly = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let c = ca.clone() * cb.clone();
            let slot = out.entry(e).or_insert_with(Rat::zero);
            *slot += c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn linear_form(coeffs: &[Rat]) -> Poly {
    let nv = coeffs.len();
    let mut p = BTreeMap::new();
    for (i, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            let mut e = vec![0u32; nv];
            e[i] = 1;
            p.insert(e, c.clone());
        }
    }
    p
}

fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, left: u32) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(out, cur, pos + 1, left - v);
        }
    }
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(&mut out, &mut cur, 0, d as u32);
    out
}

/// Graded dimensions of the invariant ring of a matrix group acting on its
/// space, from the Molien series, degrees `0..=max_degree`.
pub fn molien(group: &MatrixGroup, max_degree: usize) -> Result<Vec<usize>> {
    if max_degree > 30 {
        return Err(Error::BudgetExceeded("molien degree bound is 30".into()));
    }
    let m = group.dim;
    let nd = max_degree + 1;
    let mut sum = vec![Rat::zero(); nd];
    for g in &group.elements {
        // det(I - t·g) by cofactor expansion over polynomials in t
        let poly_mat: Vec<Vec<Vec<Rat>>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        // entry δ_ij - t·g[i][j]
                        vec![
                            if i == j { Rat::one() } else { Rat::zero() },
                            -q(g[i][j]),
                        ]
                    })
                    .collect()
            })
            .collect();
        let det = poly_det(&poly_mat);
        // invert the power series det(I - t g)⁻¹ up to t^max_degree
        let mut inv = vec![Rat::zero(); nd];
        inv[0] = Rat::one() / det[0].clone();
        for d in 1..nd {
            let mut acc = Rat::zero();
            for k in 1..=d.min(det.len() - 1) {
                acc += det[k].clone() * inv[d - k].clone();
            }
            inv[d] = -acc / det[0].clone();
        }
        for d in 0..nd {
            sum[d] += inv[d].clone();
        }
    }
    let order = q(group.order() as i64);
    let mut out = Vec::with_capacity(nd);
    for c in sum {
        let avg = c / order.clone();
        if !avg.is_integer() {
            return Err(Error::Invalid("molien coefficient not integral".into()));
        }
        let v: num_bigint::BigInt = avg.to_integer();
        let d: usize = String::from(v.to_string().as_str())
            .parse()
            .map_err(|_| Error::Invalid("molien coefficient out of range".into()))?;
        out.push(d);
    }
    if out[0] != 1 {
        return Err(Error::Invalid("molien degree-zero dimension is not 1".into()));
    }
    Ok(out)
}

fn poly_det(mat: &[Vec<Vec<Rat>>]) -> Vec<Rat> {
    let n = mat.len();
    if n == 0 {
        return vec![Rat::one()];
    }
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut det: Vec<Rat> = vec![Rat::zero()];
    for (j, entry) in mat[0].iter().enumerate() {
        if entry.iter().all(|c| c.is_zero()) {
            continue;
        }
        let minor: Vec<Vec<Vec<Rat>>> = (1..n)
            .map(|i| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| mat[i][c].clone())
                    .collect()
            })
            .collect();
        let sub = poly_det(&minor);
        let term = conv(entry, &sub);
        let sign = if j % 2 == 0 { 1 } else { -1 };
        det = add_scaled(&det, &term, sign);
    }
    det
}

fn conv(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x.clone() * y.clone();
        }
    }
    out
}

fn add_scaled(a: &[Rat], b: &[Rat], sign: i64) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, slot) in out.iter_mut().enumerate() {
        if i < a.len() {
            *slot += a[i].clone();
        }
        if i < b.len() {
            *slot += q(sign) * b[i].clone();
        }
    }
    out
}

/// Per-degree comparison of the restricted invariant image against the
/// stabilizer invariants on the flat.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DegreeVerdict {
    pub degree: usize,
    pub image_dim: usize,
    pub invariant_dim: usize,
    pub surjective: bool,
}

/// For each degree `d ≤ max_degree`: the dimension of the image of
/// `ℂ[E]^{W⋊K'}_d` restricted to the flat of `subset`, against the Molien
/// dimension of `ℂ[L]^Γ_d`. A strict deficiency at any degree refutes
/// normality of the counterpart; full agreement up to the bound is evidence
/// only.
pub fn restriction_surjective_up_to(
    sub: &Subdiagram,
    subset: NodeSet,
    k: &IsogenyAction,
    max_degree: usize,
) -> Result<Vec<DegreeVerdict>> {
    if sub.rank() > 4 {
        return Err(Error::BudgetExceeded(format!(
            "rank {} exceeds the invariant-oracle cap of 4",
            sub.rank()
        )));
    }
    if max_degree > 12 {
        return Err(Error::BudgetExceeded("degree bound is 12".into()));
    }
    let group = reflection_group(sub, k)?;
    let (_, restricted) = stabilizer_group(sub, subset, k)?;
    let target_dims = molien(&restricted, max_degree)?;

    let n = sub.rank();
    let free: Vec<usize> = (0..n)
        .filter(|&i| !subset.contains(sub.labels[i]))
        .collect();
    let nv = free.len();
    // inverses by lookup
    let index: BTreeMap<&Vec<Vec<i64>>, usize> =
        group.elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut inverse = vec![0usize; group.order()];
    for (i, g) in group.elements.iter().enumerate() {
        let inv = group
            .elements
            .iter()
            .find(|h| mat_mul(g, h) == identity(n))
            .expect("group closed under inverse");
        inverse[i] = index[inv];
    }
    // per element: the n linear forms (g⁻¹ B u)_i where B embeds the flat
    let forms: Vec<Vec<Poly>> = group
        .elements
        .iter()
        .enumerate()
        .map(|(gi, _)| {
            let ginv = &group.elements[inverse[gi]];
            (0..n)
                .map(|i| {
                    let coeffs: Vec<Rat> = free.iter().map(|&c| q(ginv[i][c])).collect();
                    linear_form(&coeffs)
                })
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    for d in 0..=max_degree {
        if d == 0 {
            out.push(DegreeVerdict {
                degree: 0,
                image_dim: 1,
                invariant_dim: 1,
                surjective: true,
            });
            continue;
        }
        let exps = monomials_of_degree(n, d);
        let basis = monomials_of_degree(nv, d);
        let col_of: BTreeMap<Vec<u32>, usize> = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for a in &exps {
            let mut avg: Poly = BTreeMap::new();
            for fg in &forms {
                let mut prod: Poly =
                    BTreeMap::from([(vec![0u32; nv], Rat::one())]);
                for (i, &e) in a.iter().enumerate() {
                    for _ in 0..e {
                        prod = poly_mul(&prod, &fg[i]);
                        if prod.is_empty() {
                            break;
                        }
                    }
                    if prod.is_empty() {
                        break;
                    }
                }
                for (e, c) in prod {
                    let slot = avg.entry(e).or_insert_with(Rat::zero);
                    *slot += c;
                }
            }
            avg.retain(|_, c| !c.is_zero());
            if avg.is_empty() {
                continue;
            }
            let mut row = vec![Rat::zero(); basis.len()];
            for (e, c) in avg {
                row[col_of[&e]] = c;
            }
            rows.push(row);
        }
        let image_dim = if rows.is_empty() {
            0
        } else {
            linalg::rank(&rows)
        };
        let invariant_dim = target_dims[d];
        if image_dim > invariant_dim {
            return Err(Error::Invalid(format!(
                "image dimension {image_dim} exceeds invariant dimension {invariant_dim} at degree {d}"
            )));
        }
        out.push(DegreeVerdict {
            degree: d,
            image_dim,
            invariant_dim,
            surjective: image_dim == invariant_dim,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::extended_diagram;
    use crate::rootsys::CartanType;

    fn sub(s: &str) -> Subdiagram {
        extended_diagram(CartanType::parse(s).unwrap()).delete_node(0)
    }

    fn ns(v: &[usize]) -> NodeSet {
        NodeSet::from_nodes(v.iter().copied())
    }

    fn triv() -> IsogenyAction {
        IsogenyAction::trivial(16)
    }

    #[test]
    fn group_orders() {
        assert_eq!(reflection_group(&sub("A2"), &triv()).unwrap().order(), 6);
        assert_eq!(reflection_group(&sub("B2"), &triv()).unwrap().order(), 8);
        assert_eq!(reflection_group(&sub("G2"), &triv()).unwrap().order(), 12);
        assert_eq!(reflection_group(&sub("B3"), &triv()).unwrap().order(), 48);
    }

    #[test]
    fn stabilizer_extremes() {
        let d = sub("B2");
        // subset = all nodes: flat is the origin, whole group stabilizes
        let (stab, _) = stabilizer_group(&d, d.node_set(), &triv()).unwrap();
        assert_eq!(stab.order(), 8);
        // empty subset: flat is everything
        let (stab, _) = stabilizer_group(&d, NodeSet::EMPTY, &triv()).unwrap();
        assert_eq!(stab.order(), 8);
    }

    #[test]
    fn molien_trivial_and_sign_groups() {
        let line_triv = MatrixGroup {
            dim: 1,
            elements: vec![vec![vec![1]]],
        };
        assert_eq!(molien(&line_triv, 5).unwrap(), vec![1, 1, 1, 1, 1, 1]);
        let line_pm = MatrixGroup {
            dim: 1,
            elements: vec![vec![vec![1]], vec![vec![-1]]],
        };
        assert_eq!(molien(&line_pm, 5).unwrap(), vec![1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn molien_matches_brute_force_for_a2() {
        // invariants of W(A2) on the plane have dimensions of ℂ[f2, f3]
        let g = reflection_group(&sub("A2"), &triv()).unwrap();
        let dims = molien(&g, 8).unwrap();
        assert_eq!(dims, vec![1, 0, 1, 1, 1, 1, 2, 1, 2]);
    }

    #[test]
    fn molien_agrees_with_reynolds_averaging() {
        // brute force: the degree-d invariant dimension is the rank of the
        // Reynolds projections of all degree-d monomials
        fn brute_dims(g: &MatrixGroup, max_d: usize) -> Vec<usize> {
            let m = g.dim;
            let inverse: Vec<&Vec<Vec<i64>>> = g
                .elements
                .iter()
                .map(|a| {
                    g.elements
                        .iter()
                        .find(|b| mat_mul(a, b) == identity(m))
                        .unwrap()
                })
                .collect();
            (0..=max_d)
                .map(|d| {
                    let monos = monomials_of_degree(m, d);
                    let col: BTreeMap<Vec<u32>, usize> = monos
                        .iter()
                        .cloned()
                        .enumerate()
                        .map(|(i, e)| (e, i))
                        .collect();
                    let mut rows = Vec::new();
                    for a in &monos {
                        let mut avg: Poly = BTreeMap::new();
                        for ginv in &inverse {
                            let mut prod: Poly =
                                BTreeMap::from([(vec![0u32; m], Rat::one())]);
                            for (i, &e) in a.iter().enumerate() {
                                let form =
                                    linear_form(&(0..m).map(|j| q(ginv[i][j])).collect::<Vec<_>>());
                                for _ in 0..e {
                                    prod = poly_mul(&prod, &form);
                                }
                            }
                            for (e, c) in prod {
                                *avg.entry(e).or_insert_with(Rat::zero) += c;
                            }
                        }
                        avg.retain(|_, c| !c.is_zero());
                        if avg.is_empty() {
                            continue;
                        }
                        let mut row = vec![Rat::zero(); monos.len()];
                        for (e, c) in avg {
                            row[col[&e]] = c;
                        }
                        rows.push(row);
                    }
                    if rows.is_empty() {
                        0
                    } else {
                        linalg::rank(&rows)
                    }
                })
                .collect()
        }
        for name in ["A2", "B2", "G2"] {
            let g = reflection_group(&sub(name), &triv()).unwrap();
            assert_eq!(molien(&g, 6).unwrap(), brute_dims(&g, 6), "{name}");
        }
        // a restricted stabilizer action, not a reflection group
        let d = sub("B3");
        let (_, restricted) = stabilizer_group(&d, ns(&[2]), &triv()).unwrap();
        assert_eq!(
            molien(&restricted, 6).unwrap(),
            brute_dims(&restricted, 6)
        );
    }

    #[test]
    fn a2_wall_line_deficient_at_degree_one() {
        // the stabilizer of a wall line in W(A2) acts trivially: the target
        // has a degree-one invariant that no symmetric function restricts to
        let d = sub("A2");
        let verdicts = restriction_surjective_up_to(&d, ns(&[1]), &triv(), 4).unwrap();
        assert!(!verdicts[1].surjective);
        assert_eq!(verdicts[1].invariant_dim, 1);
        assert_eq!(verdicts[1].image_dim, 0);
    }

    #[test]
    fn rank_four_singleton_classes_show_no_deficiency() {
        // rank-4 spot checks of the classical rule: rigid classes must not
        // be refuted by the restriction comparison
        for (amb, subset) in [
            ("D4", vec![1, 3]),
            ("D4", vec![1, 3, 4]),
            ("B4", vec![2, 3, 4]),
            ("B4", vec![1, 3, 4]),
        ] {
            let d = sub(amb);
            let s = NodeSet::from_nodes(subset.iter().copied());
            assert!(crate::classify::kb::finite_class_is_singleton(&d, s));
            let verdicts = restriction_surjective_up_to(&d, s, &triv(), 6).unwrap();
            assert!(
                verdicts.iter().all(|v| v.surjective),
                "{amb} {s}: deficiency refutes the classical rule"
            );
        }
    }

    #[test]
    fn b2_wall_line_surjective_up_to_bound() {
        // W(B2) contains -1, the line is reversed: normal, no deficiency
        let d = sub("B2");
        for subset in [ns(&[1]), ns(&[2])] {
            let verdicts = restriction_surjective_up_to(&d, subset, &triv(), 8).unwrap();
            assert!(verdicts.iter().all(|v| v.surjective));
        }
    }
}
