//! Executes a decomposition on real threads in three phases (prefix
//! scans, segment folds, merge) and accounts for the speedup in fold
//! iterations.
//!
//! Unlike verification, the runtime prefix scan does not stop at the next
//! segment boundary: the scan continues over the rest of the array until
//! it is satisfied (or consumes it all), so a worker always gets the full
//! window its prefix rule asks for no matter how the array was cut.

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::decomp::{apply_merge, compute_prefix, Decomposition};
use crate::interp::{append, fold_run, output, sequential_run, InputArray};
use crate::program::Program;
use crate::scalar::{EvalError, Scalar};

/// An exact reduced fraction; the speedup figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Ratio {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Ratio { num: num / g, den: den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Cost accounting for one parallel run, in fold-iteration units.
///
/// `s[i]` is segment i's length; `p[i]` is the length of the prefix scan
/// that starts at segment i (consumed by worker i-1), so `p[0]` is always
/// 0. The totals follow from those: `t_s` sums the segment lengths,
/// `t_p` is the longest prefix scan, `t_f` the longest worker fold
/// (own segment plus the next scan), `t_c` one merge step per segment,
/// and `x` the exact ratio `t_s / (t_p + t_f + t_c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    pub s: Vec<usize>,
    pub p: Vec<usize>,
    pub t_s: usize,
    pub t_p: usize,
    pub t_f: usize,
    pub t_c: usize,
    pub x: Ratio,
    pub wall_sequential: Duration,
    pub wall_parallel: Duration,
}

/// Computes the cost fields from segment and prefix-scan lengths alone
/// (wall times zero). `s` and `p` must both have `m` entries and `p[0]`
/// must be 0.
pub fn speedup_model(s: &[usize], p: &[usize], m: usize) -> Result<CostReport, String> {
    if m == 0 {
        return Err("need at least one segment".to_string());
    }
    if s.len() != m || p.len() != m {
        return Err(format!(
            "dimension mismatch: {} segment lengths and {} prefix lengths for {} segments",
            s.len(),
            p.len(),
            m
        ));
    }
    if p[0] != 0 {
        return Err("the first segment is not prefixed by anyone: p[0] must be 0".to_string());
    }
    let t_s: usize = s.iter().sum();
    let t_p = p[1..].iter().copied().max().unwrap_or(0);
    let t_f = (0..m)
        .map(|i| s[i] + if i + 1 < m { p[i + 1] } else { 0 })
        .max()
        .expect("m >= 1");
    let t_c = m;
    let x = Ratio::new(t_s as u64, (t_p + t_f + t_c) as u64);
    Ok(CostReport {
        s: s.to_vec(),
        p: p.to_vec(),
        t_s,
        t_p,
        t_f,
        t_c,
        x,
        wall_sequential: Duration::ZERO,
        wall_parallel: Duration::ZERO,
    })
}

/// Splits `a` into `m` contiguous near-equal segments (lengths differ by
/// at most one, longer ones first).
pub fn partition(a: &[Scalar], m: usize) -> Result<Vec<InputArray>, String> {
    if m == 0 {
        return Err("need at least one segment".to_string());
    }
    if a.len() < m {
        return Err(format!("cannot split {} element(s) into {} segments", a.len(), m));
    }
    let base = a.len() / m;
    let extra = a.len() % m;
    let mut out = Vec::with_capacity(m);
    let mut start = 0;
    for i in 0..m {
        let len = base + usize::from(i < extra);
        out.push(a[start..start + len].to_vec());
        start += len;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("sequential reference run: {0}")]
    SequentialRef(EvalError),
    #[error("prefix scan starting at segment {segment}: {source}")]
    PrefixScan { segment: usize, source: EvalError },
    #[error("worker for segment {segment}: {source}")]
    Fold { segment: usize, source: EvalError },
    #[error("merge: {0}")]
    Merge(#[from] EvalError),
}

/// Runs tasks 0..n across at most `workers` scoped threads, writing each
/// task's result into its slot.
fn run_tasks<T, F>(n: usize, workers: usize, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    if n > 0 {
        let chunk = n.div_ceil(workers.min(n));
        std::thread::scope(|sc| {
            for (j, chunk_slots) in slots.chunks_mut(chunk).enumerate() {
                let task = &task;
                sc.spawn(move || {
                    for (t, slot) in chunk_slots.iter_mut().enumerate() {
                        *slot = Some(task(j * chunk + t));
                    }
                });
            }
        });
    }
    slots.into_iter().map(|s| s.expect("task completed")).collect()
}

/// Executes the decomposition over the given segments on up to `workers`
/// threads. Phase 1 runs all prefix scans, phase 2 all worker folds
/// (each scope join is the barrier between phases), phase 3 merges on the
/// calling thread. Returns the merged output and the cost report; the
/// sequential reference run is also executed (single-threaded) to fill in
/// `wall_sequential`.
pub fn run_parallel(
    prog: &Program,
    d: &Decomposition,
    segments: &[InputArray],
    workers: usize,
) -> Result<(Scalar, CostReport), RunError> {
    if segments.is_empty() {
        return Err(RunError::Config("need at least one segment".to_string()));
    }
    if workers == 0 {
        return Err(RunError::Config("worker count must be positive".to_string()));
    }
    let m = segments.len();
    let flat = append(segments);

    let seq_start = Instant::now();
    sequential_run(prog, &flat).map_err(RunError::SequentialRef)?;
    let wall_sequential = seq_start.elapsed();

    // Element offset of each segment within the flattened array; scans
    // start at a segment boundary but may run past the next one.
    let mut offsets = Vec::with_capacity(m);
    let mut acc = 0;
    for seg in segments {
        offsets.push(acc);
        acc += seg.len();
    }

    let par_start = Instant::now();

    // Phase 1: the scan starting at segment k (1-based k in 1..m) feeds
    // worker k-1.
    let scans = run_tasks(m - 1, workers, |t| {
        compute_prefix(&d.prefix, &flat[offsets[t + 1]..])
    });
    let mut p = vec![0usize; m];
    let mut prefixes: Vec<Vec<Scalar>> = vec![Vec::new(); m];
    for (t, scan) in scans.into_iter().enumerate() {
        match scan {
            Ok(v) => {
                p[t + 1] = v.len();
                prefixes[t + 1] = v;
            }
            Err(source) => return Err(RunError::PrefixScan { segment: t + 2, source }),
        }
    }

    // Phase 2: worker k folds its segment plus the scan starting at k+1.
    let prefixes = &prefixes;
    let folds = run_tasks(m, workers, |k| {
        let mut task = segments[k].clone();
        if k + 1 < m {
            task.extend_from_slice(&prefixes[k + 1]);
        }
        fold_run(prog, &prog.init, &task).and_then(|tr| output(prog, &tr.final_state))
    });
    let mut w = Vec::with_capacity(m);
    for (k, fold) in folds.into_iter().enumerate() {
        match fold {
            Ok(v) => w.push(v),
            Err(source) => return Err(RunError::Fold { segment: k + 1, source }),
        }
    }

    // Phase 3.
    let out = apply_merge(d.merge, &w)?;
    let wall_parallel = par_start.elapsed();

    let s: Vec<usize> = segments.iter().map(Vec::len).collect();
    let mut report = speedup_model(&s, &p, m).map_err(RunError::Config)?;
    report.wall_sequential = wall_sequential;
    report.wall_parallel = wall_parallel;
    Ok((out, report))
}
