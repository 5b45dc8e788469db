//! The synthesis cascade: try merge operators with no prefix, then with
//! constant prefixes of increasing length, then with conditional prefixes,
//! and return the first candidate that survives bounded verification.

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cond::enumerate_conditions;
use crate::decomp::{Decomposition, MergeOp, PrefixSpec};
use crate::expr::CmpOp;
use crate::program::{collect_constants, Program};
use crate::scalar::Scalar;
use crate::verify::{verify_counted, Verdict, VerifBounds};

/// The candidate grammar the cascade searches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSpace {
    /// Merge operators, in trial order.
    pub merge_ops: Vec<MergeOp>,
    /// Largest constant prefix length tried.
    pub max_const_prefix: usize,
    /// Constants available to condition atoms, in trial order.
    pub cond_constants: Vec<Scalar>,
    /// Cap on conjunction width for conditions.
    pub max_conjuncts: usize,
    /// Comparison operators available to condition atoms, in trial order.
    pub atom_ops: Vec<CmpOp>,
}

impl CandidateSpace {
    /// The default space for a program: the full merge menu, prefixes up
    /// to length 2, and condition atoms built from the program's own
    /// constants in order of first appearance.
    pub fn default_for(p: &Program) -> CandidateSpace {
        CandidateSpace {
            merge_ops: MergeOp::MENU.to_vec(),
            max_const_prefix: 2,
            cond_constants: collect_constants(p),
            max_conjuncts: 2,
            atom_ops: vec![CmpOp::Eq, CmpOp::Le, CmpOp::Ge],
        }
    }
}

/// Which stage of the cascade produced a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    NoPrefix,
    ConstPrefix,
    CondPrefix,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::NoPrefix => "SyntNoPrefix",
            Hypothesis::ConstPrefix => "SyntConstPrefix",
            Hypothesis::CondPrefix => "SyntCondPrefix",
        })
    }
}

/// Search accounting.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SynthStats {
    /// Candidates submitted to the verifier.
    pub candidates_tried: u64,
    /// Total (array, split) pairs the verifier examined.
    pub arrays_checked: u128,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthOutcome {
    Found { hypothesis: Hypothesis, decomposition: Decomposition },
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisResult {
    pub outcome: SynthOutcome,
    pub stats: SynthStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("infeasible bounds: {0}")]
    InfeasibleBounds(String),
    #[error("synthesis timed out")]
    TimedOut,
    #[error("merge menu is empty")]
    EmptyMenu,
}

/// Builds one VerifBounds per requested segment count.
///
/// Synthesis raises the minimum segment length to `max_const_prefix + 1`:
/// a constant prefix must never swallow a whole enumerated segment, or
/// truncation would make over-long prefixes indistinguishable from
/// shorter ones inside the bounded search.
pub fn synthesis_bounds(
    segment_counts: &[usize],
    max_total_len: usize,
    user_min_seg_len: usize,
    max_const_prefix: usize,
    domain: &[Scalar],
) -> Result<Vec<VerifBounds>, SynthError> {
    if segment_counts.is_empty() {
        return Err(SynthError::InfeasibleBounds("no segment counts configured".to_string()));
    }
    let min_seg_len = user_min_seg_len.max(max_const_prefix + 1);
    let mut out = Vec::with_capacity(segment_counts.len());
    for &m in segment_counts {
        let b = VerifBounds { m, max_total_len, min_seg_len, domain: domain.to_vec() };
        b.validate().map_err(|e| {
            SynthError::InfeasibleBounds(if min_seg_len > user_min_seg_len {
                format!(
                    "{e}; synthesis keeps segments longer than --max-const-prefix \
                     ({max_const_prefix}), so the minimum segment length here is {min_seg_len}"
                )
            } else {
                e
            })
        })?;
        out.push(b);
    }
    Ok(out)
}

fn expired(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

/// Verifies one candidate against every bound. A counterexample or an
/// evaluation error both disqualify it: an error just means the candidate
/// cannot even be computed on some in-bounds input (indeterminate
/// arithmetic, unordered Eof comparison), which is as disqualifying as a
/// wrong answer.
fn try_candidate(
    p: &Program,
    bounds: &[VerifBounds],
    d: &Decomposition,
    deadline: Option<Instant>,
    stats: &mut SynthStats,
) -> Result<bool, SynthError> {
    if expired(deadline) {
        return Err(SynthError::TimedOut);
    }
    stats.candidates_tried += 1;
    for b in bounds {
        let (verdict, examined) = verify_counted(p, d, b);
        stats.arrays_checked += examined;
        match verdict {
            Verdict::Valid => {}
            Verdict::Counterexample { .. } | Verdict::Error(_) => return Ok(false),
        }
    }
    Ok(true)
}

/// First merge operator (menu order) that is correct with no prefix at
/// every bound.
pub fn synt_no_prefix(
    p: &Program,
    bounds: &[VerifBounds],
    space: &CandidateSpace,
    deadline: Option<Instant>,
    stats: &mut SynthStats,
) -> Result<Option<Decomposition>, SynthError> {
    for &merge in &space.merge_ops {
        let d = Decomposition { merge, prefix: PrefixSpec::None };
        if try_candidate(p, bounds, &d, deadline, stats)? {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// First (merge, constant prefix) pair that verifies, trying prefix
/// lengths ascending so the witness uses the shortest workable prefix.
///
/// Programs whose meaning hinges on the end marker get no constant
/// candidates at all: the information such a program needs can sit
/// arbitrarily far ahead (wherever the marker is), so a fixed window that
/// happens to cover every discrepancy expressible inside the bounds is an
/// accident of the bounds, not a property of the program. The conditional
/// stage, whose prefixes track markers by value, owns that territory.
pub fn synt_constant_prefix(
    p: &Program,
    bounds: &[VerifBounds],
    space: &CandidateSpace,
    deadline: Option<Instant>,
    stats: &mut SynthStats,
) -> Result<Option<Decomposition>, SynthError> {
    if p.mentions_eof() {
        return Ok(None);
    }
    for c in 1..=space.max_const_prefix {
        for &merge in &space.merge_ops {
            let d = Decomposition { merge, prefix: PrefixSpec::Const(c) };
            if try_candidate(p, bounds, &d, deadline, stats)? {
                return Ok(Some(d));
            }
        }
    }
    Ok(None)
}

/// First (merge, conditional prefix) pair that verifies, trying
/// conditions in enumeration order, merges within each condition.
pub fn synt_conditional_prefix(
    p: &Program,
    bounds: &[VerifBounds],
    space: &CandidateSpace,
    deadline: Option<Instant>,
    stats: &mut SynthStats,
) -> Result<Option<Decomposition>, SynthError> {
    let domain = &bounds[0].domain;
    for cond in enumerate_conditions(space, domain) {
        for &merge in &space.merge_ops {
            let d = Decomposition { merge, prefix: PrefixSpec::Cond(cond.clone()) };
            if try_candidate(p, bounds, &d, deadline, stats)? {
                return Ok(Some(d));
            }
        }
    }
    Ok(None)
}

/// Runs the three-stage cascade and returns the first witness, or Unknown
/// once every stage exhausts its candidates. Identical inputs always yield
/// identical outcomes and identical `candidates_tried`.
pub fn grassp(
    p: &Program,
    bounds: &[VerifBounds],
    space: &CandidateSpace,
    deadline: Option<Instant>,
) -> Result<SynthesisResult, SynthError> {
    let start = Instant::now();
    if space.merge_ops.is_empty() {
        return Err(SynthError::EmptyMenu);
    }
    if bounds.is_empty() {
        return Err(SynthError::InfeasibleBounds("no segment counts configured".to_string()));
    }
    for b in bounds {
        b.validate().map_err(SynthError::InfeasibleBounds)?;
    }

    let mut stats = SynthStats::default();
    let mut found = synt_no_prefix(p, bounds, space, deadline, &mut stats)?
        .map(|d| (Hypothesis::NoPrefix, d));
    if found.is_none() {
        found = synt_constant_prefix(p, bounds, space, deadline, &mut stats)?
            .map(|d| (Hypothesis::ConstPrefix, d));
    }
    if found.is_none() {
        found = synt_conditional_prefix(p, bounds, space, deadline, &mut stats)?
            .map(|d| (Hypothesis::CondPrefix, d));
    }

    stats.elapsed = start.elapsed();
    let outcome = match found {
        Some((hypothesis, decomposition)) => SynthOutcome::Found { hypothesis, decomposition },
        None => SynthOutcome::Unknown,
    };
    Ok(SynthesisResult { outcome, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_program;
    use Scalar::Int;

    fn default_domain() -> Vec<Scalar> {
        vec![Int(0), Int(1), Int(2), Int(3)]
    }

    fn default_bounds(domain: &[Scalar]) -> Vec<VerifBounds> {
        synthesis_bounds(&[2], 6, 1, 2, domain).unwrap()
    }

    fn synth(text: &str, domain: &[Scalar]) -> SynthesisResult {
        let p = parse_program(text).unwrap();
        let space = CandidateSpace::default_for(&p);
        grassp(&p, &default_bounds(domain), &space, None).unwrap()
    }

    fn expect_found(r: &SynthesisResult) -> (Hypothesis, Decomposition) {
        match &r.outcome {
            SynthOutcome::Found { hypothesis, decomposition } => {
                (*hypothesis, decomposition.clone())
            }
            SynthOutcome::Unknown => panic!("expected a witness, got unknown"),
        }
    }

    const SECOND_MAX: &str = "(program \
        (state (best -inf) (second -inf)) \
        (step (best (max elem best)) \
              (second (if (> elem best) best (if (and (< elem best) (> elem second)) elem second)))) \
        (output second))";

    #[test]
    fn default_space_shape() {
        let p = parse_program(
            "(program (state (found 0) (seen1 0)) \
             (step (found (if (and (= elem 2) (= seen1 1)) 1 found)) \
                   (seen1 (if (= elem 1) 1 seen1))) \
             (output found))",
        )
        .unwrap();
        let s = CandidateSpace::default_for(&p);
        assert_eq!(s.merge_ops, MergeOp::MENU.to_vec());
        assert_eq!(s.max_const_prefix, 2);
        assert_eq!(s.cond_constants, vec![Int(0), Int(2), Int(1)]);
        assert_eq!(s.max_conjuncts, 2);
        assert_eq!(s.atom_ops, vec![CmpOp::Eq, CmpOp::Le, CmpOp::Ge]);
    }

    #[test]
    fn bounds_derive_the_synthesis_segment_floor() {
        let b = synthesis_bounds(&[2], 6, 1, 2, &default_domain()).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].min_seg_len, 3);
        // A stricter user floor wins.
        let b = synthesis_bounds(&[2], 8, 4, 2, &default_domain()).unwrap();
        assert_eq!(b[0].min_seg_len, 4);
    }

    #[test]
    fn three_segments_do_not_fit_the_default_length_budget() {
        let err = synthesis_bounds(&[3], 6, 1, 2, &default_domain()).unwrap_err();
        match err {
            SynthError::InfeasibleBounds(msg) => {
                assert!(msg.contains("total length 9"), "{msg}");
                assert!(msg.contains("max-const-prefix"), "{msg}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn counting_folds_merge_with_add_and_nothing_else_is_tried() {
        let r = synth("(program (state (n 0)) (step (n (+ n 1))) (output n))", &default_domain());
        let (h, d) = expect_found(&r);
        assert_eq!(h, Hypothesis::NoPrefix);
        assert_eq!(d, Decomposition { merge: MergeOp::Add, prefix: PrefixSpec::None });
        assert_eq!(r.stats.candidates_tried, 1);
    }

    #[test]
    fn max_folds_need_two_rejections_first() {
        let r = synth(
            "(program (state (m -inf)) (step (m (max elem m))) (output m))",
            &default_domain(),
        );
        let (h, d) = expect_found(&r);
        assert_eq!(h, Hypothesis::NoPrefix);
        assert_eq!(d, Decomposition { merge: MergeOp::Max, prefix: PrefixSpec::None });
        assert_eq!(r.stats.candidates_tried, 3);
    }

    #[test]
    fn sortedness_takes_a_one_element_prefix() {
        let r = synth(
            "(program (state (prev -inf) (ok 1)) \
             (step (prev elem) (ok (if (<= prev elem) ok 0))) \
             (output ok))",
            &default_domain(),
        );
        let (h, d) = expect_found(&r);
        assert_eq!(h, Hypothesis::ConstPrefix);
        assert_eq!(d, Decomposition { merge: MergeOp::Min, prefix: PrefixSpec::Const(1) });
        // Six no-prefix rejections, then (add, 1) rejected, then (min, 1).
        assert_eq!(r.stats.candidates_tried, 8);
    }

    #[test]
    fn pattern_search_lands_on_the_marker_condition() {
        let r = synth(
            "(program (state (found 0) (seen1 0)) \
             (step (found (if (and (= elem 2) (= seen1 1)) 1 found)) \
                   (seen1 (if (= elem 1) 1 seen1))) \
             (output found))",
            &default_domain(),
        );
        let (h, d) = expect_found(&r);
        assert_eq!(h, Hypothesis::CondPrefix);
        assert_eq!(d.merge, MergeOp::Max);
        assert_eq!(d.prefix.to_string(), "(= elem 2)");
        // 6 no-prefix + 12 constant + 6 for (= elem 0) + add/min/max on
        // (= elem 2).
        assert_eq!(r.stats.candidates_tried, 27);
    }

    #[test]
    fn second_distinct_maximum_is_unknown() {
        let r = synth(SECOND_MAX, &default_domain());
        assert_eq!(r.outcome, SynthOutcome::Unknown);
        // 6 no-prefix + 12 constant; the condition pool is empty because
        // the program's only constant is -inf.
        assert_eq!(r.stats.candidates_tried, 18);
        assert!(r.stats.arrays_checked > 0);
    }

    #[test]
    fn unknown_and_found_are_reproducible() {
        let a = synth(SECOND_MAX, &default_domain());
        let b = synth(SECOND_MAX, &default_domain());
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.stats.candidates_tried, b.stats.candidates_tried);
        assert_eq!(a.stats.arrays_checked, b.stats.arrays_checked);
    }

    #[test]
    fn empty_menu_is_a_configuration_error() {
        let p = parse_program("(program (state (n 0)) (step (n (+ n 1))) (output n))").unwrap();
        let mut space = CandidateSpace::default_for(&p);
        space.merge_ops.clear();
        let err = grassp(&p, &default_bounds(&default_domain()), &space, None).unwrap_err();
        assert_eq!(err, SynthError::EmptyMenu);
    }

    #[test]
    fn an_expired_deadline_times_out() {
        let p = parse_program("(program (state (n 0)) (step (n (+ n 1))) (output n))").unwrap();
        let space = CandidateSpace::default_for(&p);
        let past = Instant::now() - Duration::from_secs(1);
        let err = grassp(&p, &default_bounds(&default_domain()), &space, Some(past)).unwrap_err();
        assert_eq!(err, SynthError::TimedOut);
    }

    #[test]
    fn restricted_menus_lose_witnesses() {
        let p = parse_program("(program (state (m -inf)) (step (m (max elem m))) (output m))")
            .unwrap();
        let mut space = CandidateSpace::default_for(&p);
        space.merge_ops = vec![MergeOp::First, MergeOp::Last];
        let r = grassp(&p, &default_bounds(&default_domain()), &space, None).unwrap();
        assert_eq!(r.outcome, SynthOutcome::Unknown);
    }
}
