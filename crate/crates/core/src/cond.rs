//! Enumeration of candidate prefix conditions: comparisons of the current
//! element against constants drawn from the program, plus conjunctions of
//! those atoms, pruned by their truth table over the verification domain.

use std::collections::HashSet;

use crate::expr::{eval_bool, BoolExpr, Expr};
use crate::scalar::Scalar;
use crate::synth::CandidateSpace;

fn truth_table(pred: &BoolExpr, domain: &[Scalar]) -> Option<Vec<bool>> {
    let mut t = Vec::with_capacity(domain.len());
    for &x in domain {
        match eval_bool(pred, &[], Some(x)) {
            Ok(b) => t.push(b),
            Err(_) => return None,
        }
    }
    Some(t)
}

fn useful(t: &[bool]) -> bool {
    t.iter().any(|&b| b) && t.iter().any(|&b| !b)
}

/// Candidate predicates over `elem`, in trial order: single atoms first,
/// then conjunctions of increasing width; atoms ordered by comparison op
/// (space order), then by constant (space order); conjunctions by the
/// index tuple of their atoms.
///
/// A predicate is dropped when it cannot act as a prefix marker over
/// `domain`: it fails to evaluate on some domain value, it never or always
/// holds (an always-true marker degenerates to a constant prefix of one,
/// a never-true one to the whole segment), or an earlier candidate already
/// has the same truth table.
pub fn enumerate_conditions(space: &CandidateSpace, domain: &[Scalar]) -> Vec<BoolExpr> {
    let mut kept: Vec<BoolExpr> = Vec::new();
    let mut seen: HashSet<Vec<bool>> = HashSet::new();

    // Surviving atoms, with tables, feed the conjunction layers. Atoms
    // pruned here contribute nothing there either: an always-true or
    // duplicate conjunct leaves the conjunction's table unchanged, a
    // never-true or failing one makes it prunable itself.
    let mut units: Vec<(BoolExpr, Vec<bool>)> = Vec::new();
    for &op in &space.atom_ops {
        for &c in &space.cond_constants {
            let atom =
                BoolExpr::Cmp(op, Box::new(Expr::CurrentInput), Box::new(Expr::Const(c)));
            let Some(t) = truth_table(&atom, domain) else { continue };
            if !useful(&t) || !seen.insert(t.clone()) {
                continue;
            }
            kept.push(atom.clone());
            units.push((atom, t));
        }
    }

    for width in 2..=space.max_conjuncts {
        let mut pick = Vec::with_capacity(width);
        conjunctions(&units, width, 0, &mut pick, &mut seen, &mut kept);
    }
    kept
}

/// Emits every `width`-subset of `units` (indices ascending, tuples in
/// lexicographic order) as a left-nested conjunction, subject to the same
/// pruning as atoms.
fn conjunctions(
    units: &[(BoolExpr, Vec<bool>)],
    width: usize,
    start: usize,
    pick: &mut Vec<usize>,
    seen: &mut HashSet<Vec<bool>>,
    kept: &mut Vec<BoolExpr>,
) {
    if pick.len() == width {
        let mut table = units[pick[0]].1.clone();
        for &i in &pick[1..] {
            for (cell, &b) in table.iter_mut().zip(&units[i].1) {
                *cell &= b;
            }
        }
        if useful(&table) && seen.insert(table) {
            let mut expr = units[pick[0]].0.clone();
            for &i in &pick[1..] {
                expr = BoolExpr::And(Box::new(expr), Box::new(units[i].0.clone()));
            }
            kept.push(expr);
        }
        return;
    }
    for i in start..units.len() {
        pick.push(i);
        conjunctions(units, width, i + 1, pick, seen, kept);
        pick.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::MergeOp;
    use crate::expr::CmpOp;
    use Scalar::{Eof, Int};

    fn space(constants: &[Scalar], ops: &[CmpOp], max_conjuncts: usize) -> CandidateSpace {
        CandidateSpace {
            merge_ops: MergeOp::MENU.to_vec(),
            max_const_prefix: 2,
            cond_constants: constants.to_vec(),
            max_conjuncts,
            atom_ops: ops.to_vec(),
        }
    }

    fn ints(vals: &[i64]) -> Vec<Scalar> {
        vals.iter().copied().map(Int).collect()
    }

    fn rendered(conds: &[BoolExpr]) -> Vec<String> {
        conds.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn equality_atoms_in_constant_order() {
        let s = space(&ints(&[1, 2]), &[CmpOp::Eq], 1);
        assert_eq!(rendered(&enumerate_conditions(&s, &ints(&[0, 1, 2, 3]))),
                   vec!["(= elem 1)", "(= elem 2)"]);
    }

    #[test]
    fn unsatisfiable_conjunctions_are_pruned() {
        // (= elem 1) and (= elem 2) cannot hold together.
        let s = space(&ints(&[1, 2]), &[CmpOp::Eq], 2);
        assert_eq!(enumerate_conditions(&s, &ints(&[0, 1, 2, 3])).len(), 2);
    }

    #[test]
    fn never_false_predicates_are_pruned() {
        let s = space(&ints(&[3]), &[CmpOp::Le], 1);
        assert!(enumerate_conditions(&s, &ints(&[0, 1, 2, 3])).is_empty());
    }

    #[test]
    fn never_true_predicates_are_pruned() {
        let s = space(&[Scalar::NegInf], &[CmpOp::Eq, CmpOp::Le, CmpOp::Ge], 2);
        assert!(enumerate_conditions(&s, &ints(&[0, 1, 2])).is_empty());
    }

    #[test]
    fn full_trial_order_for_a_three_constant_space() {
        // Constants in program-occurrence order 0, 2, 1 over {0,1,2,3}:
        // (<= elem 0) duplicates (= elem 0), (>= elem 0) is always true,
        // and exactly one conjunction survives the table dedup.
        let s = space(&ints(&[0, 2, 1]), &[CmpOp::Eq, CmpOp::Le, CmpOp::Ge], 2);
        assert_eq!(
            rendered(&enumerate_conditions(&s, &ints(&[0, 1, 2, 3]))),
            vec![
                "(= elem 0)",
                "(= elem 2)",
                "(= elem 1)",
                "(<= elem 2)",
                "(<= elem 1)",
                "(>= elem 2)",
                "(>= elem 1)",
                "(and (<= elem 2) (>= elem 1))",
            ]
        );
    }

    #[test]
    fn ordered_atoms_drop_out_of_eof_domains() {
        let s = space(
            &[Eof, Int(0), Int(1), Int(2), Int(-1), Int(3)],
            &[CmpOp::Eq, CmpOp::Le, CmpOp::Ge],
            2,
        );
        let domain = [Int(0), Int(1), Int(2), Int(3), Eof];
        assert_eq!(
            rendered(&enumerate_conditions(&s, &domain)),
            vec!["(= elem eof)", "(= elem 0)", "(= elem 1)", "(= elem 2)", "(= elem 3)"]
        );
    }

    #[test]
    fn empty_constant_pool_means_no_conditions() {
        let s = space(&[], &[CmpOp::Eq, CmpOp::Le, CmpOp::Ge], 2);
        assert!(enumerate_conditions(&s, &ints(&[0, 1, 2, 3])).is_empty());
    }
}
