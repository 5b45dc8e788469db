//! Bounded exhaustive checking of a candidate decomposition against the
//! sequential program: every array over a finite value domain up to a
//! length cap, split every possible way into the requested number of
//! segments.

use rayon::prelude::*;

use crate::decomp::{apply_merge, compute_prefix, Decomposition};
use crate::interp::{fold_run, output, sequential_run, InputArray};
use crate::program::Program;
use crate::scalar::{EvalError, Scalar};

/// Enumeration bounds for [`verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifBounds {
    /// Number of segments; at least 2.
    pub m: usize,
    /// Cap on the total array length.
    pub max_total_len: usize,
    /// Minimum length of each segment; at least 1.
    pub min_seg_len: usize,
    /// Values the array elements range over.
    pub domain: Vec<Scalar>,
}

impl VerifBounds {
    pub fn validate(&self) -> Result<(), String> {
        if self.m < 2 {
            return Err(format!("need at least 2 segments, got {}", self.m));
        }
        if self.min_seg_len < 1 {
            return Err("minimum segment length must be at least 1".to_string());
        }
        if self.domain.is_empty() {
            return Err("value domain is empty".to_string());
        }
        if self.m * self.min_seg_len > self.max_total_len {
            return Err(format!(
                "{} segments of at least {} element(s) need total length {}, \
                 but the cap is {} (raise --max-len or lower --segments/--min-seg-len)",
                self.m,
                self.min_seg_len,
                self.m * self.min_seg_len,
                self.max_total_len
            ));
        }
        Ok(())
    }
}

/// Outcome of a verification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Counterexample { segments: Vec<InputArray>, expected: Scalar, actual: Scalar },
    Error(String),
}

/// Renders segments as `[1 0] [5]`.
pub fn format_segments(segments: &[InputArray]) -> String {
    let mut out = String::new();
    for (i, seg) in segments.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push('[');
        for (j, x) in seg.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            out.push_str(&x.to_string());
        }
        out.push(']');
    }
    out
}

/// Combined result of one simulated parallel execution: every worker i
/// except the last folds its own segment plus the prefix of segment i+1;
/// the last folds only its own segment; the merge operator left-folds the
/// worker outputs.
pub fn parallel_outputs(
    p: &Program,
    d: &Decomposition,
    segments: &[InputArray],
) -> Result<Scalar, EvalError> {
    let m = segments.len();
    let mut outs = Vec::with_capacity(m);
    for i in 0..m {
        let task = if i + 1 < m {
            let mut t = segments[i].clone();
            t.extend(compute_prefix(&d.prefix, &segments[i + 1])?);
            t
        } else {
            segments[i].clone()
        };
        let trace = fold_run(p, &p.init, &task)?;
        outs.push(output(p, &trace.final_state)?);
    }
    apply_merge(d.merge, &outs)
}

/// All ways to write `total` as an ordered sum of `parts` terms, each at
/// least `min_part`, in lexicographic order.
fn compositions(total: usize, parts: usize, min_part: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, min_part: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            if total >= min_part {
                cur.push(total);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let reserve = (parts - 1) * min_part;
        if total < min_part + reserve {
            return;
        }
        for first in min_part..=total - reserve {
            cur.push(first);
            go(total - first, parts - 1, min_part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        go(total, parts, min_part, &mut Vec::new(), &mut out);
    }
    out
}

/// The array with the given rank in lexicographic order (index into the
/// domain, leftmost element most significant).
fn unrank_array(rank: u64, len: usize, domain: &[Scalar]) -> Vec<Scalar> {
    let n = domain.len() as u64;
    let mut a = vec![domain[0]; len];
    let mut r = rank;
    for i in (0..len).rev() {
        a[i] = domain[(r % n) as usize];
        r /= n;
    }
    a
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Exact number of (array, split) pairs [`verify`] enumerates under these
/// bounds. Zero when the bounds admit no array at all.
pub fn count_search_space(b: &VerifBounds) -> u128 {
    if b.m == 0 || b.domain.is_empty() {
        return 0;
    }
    let n = b.domain.len() as u128;
    let lo = b.m * b.min_seg_len;
    let mut total = 0u128;
    for len in lo..=b.max_total_len {
        total += n.pow(len as u32) * binomial(len - lo + b.m - 1, b.m - 1);
    }
    total
}

enum Bad {
    Mismatch { segments: Vec<InputArray>, expected: Scalar, actual: Scalar },
    Failed(String),
}

fn check_split(p: &Program, d: &Decomposition, arr: &[Scalar], split: &[usize]) -> Option<Bad> {
    let mut segments = Vec::with_capacity(split.len());
    let mut start = 0;
    for &l in split {
        segments.push(arr[start..start + l].to_vec());
        start += l;
    }
    let expected = match sequential_run(p, arr) {
        Ok((v, _)) => v,
        Err(e) => return Some(Bad::Failed(format!("{e} on {}", format_segments(&segments)))),
    };
    match parallel_outputs(p, d, &segments) {
        Ok(actual) if actual == expected => None,
        Ok(actual) => Some(Bad::Mismatch { segments, expected, actual }),
        Err(e) => Some(Bad::Failed(format!("{e} on {}", format_segments(&segments)))),
    }
}

/// Like [`verify`], also reporting how many (array, split) pairs were
/// examined: the full space when valid, or the canonical position of the
/// first failure. Enumeration order is total length ascending, then the
/// array lexicographically, then the split lexicographically, so the
/// result is deterministic regardless of worker count.
pub fn verify_counted(p: &Program, d: &Decomposition, b: &VerifBounds) -> (Verdict, u128) {
    if let Err(e) = b.validate() {
        return (Verdict::Error(e), 0);
    }
    let n = b.domain.len() as u64;
    let mut examined: u128 = 0;
    for len in (b.m * b.min_seg_len)..=b.max_total_len {
        let splits = compositions(len, b.m, b.min_seg_len);
        if splits.is_empty() {
            continue;
        }
        let arrays = match n.checked_pow(len as u32) {
            Some(c) => c,
            None => return (Verdict::Error("search space too large to enumerate".to_string()), examined),
        };
        let hit = (0..arrays).into_par_iter().find_map_first(|rank| {
            let arr = unrank_array(rank, len, &b.domain);
            splits
                .iter()
                .enumerate()
                .find_map(|(si, split)| check_split(p, d, &arr, split).map(|bad| (rank, si, bad)))
        });
        if let Some((rank, si, bad)) = hit {
            let pos = examined + rank as u128 * splits.len() as u128 + si as u128 + 1;
            let verdict = match bad {
                Bad::Mismatch { segments, expected, actual } => {
                    Verdict::Counterexample { segments, expected, actual }
                }
                Bad::Failed(msg) => Verdict::Error(msg),
            };
            return (verdict, pos);
        }
        examined += arrays as u128 * splits.len() as u128;
    }
    (Verdict::Valid, examined)
}

/// Checks the decomposition against the program on every in-bounds
/// (array, split) pair. Returns the smallest-total-length, then
/// lexicographically first, counterexample on failure.
pub fn verify(p: &Program, d: &Decomposition, b: &VerifBounds) -> Verdict {
    verify_counted(p, d, b).0
}
