use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};

/// Minimum prominence for a recurrence to count as detected.
pub const PROMINENCE_THRESHOLD: f64 = 0.1;

/// Predicted times used to place the search windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceHints {
    pub t_cl: f64,
    pub t_rev: Option<f64>,
    pub t_spr: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceEstimate {
    pub time: f64,
    pub prominence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Recurrences {
    pub t_cl: Option<RecurrenceEstimate>,
    pub t_rev: Option<RecurrenceEstimate>,
    pub t_spr: Option<RecurrenceEstimate>,
}

/// Relative width of the windows searched around the revival hints.
const WINDOW: f64 = 0.5;

/// Estimate recurrence times from a uniformly sampled survival probability
/// `s(τ) = |C(τ)|²` starting at `τ = 0`.
///
/// `T_cl` is the first prominent peak of the normalized autocorrelation of `s`.
/// Revivals are maxima of the envelope (running maximum over one `T_cl`, then
/// a running mean over the same width) inside `[½, 3/2]` of each hint.
/// Estimates whose prominence falls below [`PROMINENCE_THRESHOLD`] are dropped.
pub fn detect_recurrences(
    survival: &[f64],
    dt: f64,
    hints: &RecurrenceHints,
) -> Result<Recurrences> {
    if !(dt > 0.0) {
        return domain(format!("sample step must be positive, got {dt}"));
    }
    if !(hints.t_cl > 0.0) {
        return domain("classical-period hint must be positive");
    }
    if survival.len() < 8 {
        return domain("survival signal is too short");
    }
    let t_cl = classical_period(survival, dt, hints.t_cl);
    let width_time = t_cl.map_or(hints.t_cl, |e| e.time);
    let width = ((width_time / dt).round() as usize).max(1);
    let env = running_mean(&running_max(survival, width), width);
    let search = |hint: Option<f64>| hint.and_then(|h| envelope_peak(&env, dt, h));
    Ok(Recurrences {
        t_cl,
        t_rev: search(hints.t_rev),
        t_spr: search(hints.t_spr),
    })
}

fn classical_period(s: &[f64], dt: f64, hint: f64) -> Option<RecurrenceEstimate> {
    // a stretch of ten hinted periods, lags up to three
    let span = ((10.0 * hint / dt) as usize).min(s.len());
    let max_lag = ((3.0 * hint / dt) as usize).min(span / 2);
    if max_lag < 3 {
        return None;
    }
    let seg = &s[..span];
    let mean = seg.iter().sum::<f64>() / span as f64;
    let x: Vec<f64> = seg.iter().map(|v| v - mean).collect();
    let acf_at = |lag: usize| -> f64 {
        (0..span - lag).map(|i| x[i] * x[i + lag]).sum::<f64>() / (span - lag) as f64
    };
    let c0 = acf_at(0);
    if !(c0 > 0.0) {
        return None;
    }
    let acf: Vec<f64> = (0..=max_lag).map(|l| acf_at(l) / c0).collect();
    let mut running_min = acf[0];
    for lag in 1..max_lag {
        running_min = running_min.min(acf[lag]);
        if acf[lag] > acf[lag - 1] && acf[lag] >= acf[lag + 1] {
            let prominence = acf[lag] - running_min;
            if prominence >= PROMINENCE_THRESHOLD {
                let time = (lag as f64 + vertex_offset(acf[lag - 1], acf[lag], acf[lag + 1])) * dt;
                return Some(RecurrenceEstimate { time, prominence });
            }
        }
    }
    None
}

fn envelope_peak(env: &[f64], dt: f64, hint: f64) -> Option<RecurrenceEstimate> {
    let lo = (((1.0 - WINDOW) * hint / dt) as usize).max(1);
    let hi = (((1.0 + WINDOW) * hint / dt) as usize).min(env.len() - 1);
    if lo + 2 > hi {
        return None;
    }
    let mut best = lo;
    for i in lo..=hi {
        if env[i] > env[best] {
            best = i;
        }
    }
    // an edge maximum means the envelope keeps rising outside the window
    if best == lo || best == hi {
        return None;
    }
    let peak = env[best];
    let mut left_base = peak;
    for v in env[..best].iter().rev() {
        if *v > peak {
            break;
        }
        left_base = left_base.min(*v);
    }
    let mut right_base = peak;
    for v in &env[best + 1..] {
        if *v > peak {
            break;
        }
        right_base = right_base.min(*v);
    }
    let prominence = peak - left_base.max(right_base);
    if prominence < PROMINENCE_THRESHOLD {
        return None;
    }
    let time = (best as f64 + vertex_offset(env[best - 1], env[best], env[best + 1])) * dt;
    Some(RecurrenceEstimate { time, prominence })
}

/// Offset of the parabola vertex through three equally spaced samples.
fn vertex_offset(a: f64, b: f64, c: f64) -> f64 {
    let denom = a - 2.0 * b + c;
    if denom.abs() < 1e-300 {
        0.0
    } else {
        (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
    }
}

/// Centred running maximum over `width` samples.
fn running_max(s: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    let n = s.len();
    let mut out = Vec::with_capacity(n);
    let mut deque: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    let mut next = 0;
    for i in 0..n {
        let hi = (i + half).min(n - 1);
        while next <= hi {
            while deque.back().is_some_and(|&j| s[j] <= s[next]) {
                deque.pop_back();
            }
            deque.push_back(next);
            next += 1;
        }
        let lo = i.saturating_sub(half);
        while deque.front().is_some_and(|&j| j < lo) {
            deque.pop_front();
        }
        out.push(s[*deque.front().expect("window is never empty")]);
    }
    out
}

/// Centred running mean over `width` samples, shrinking at the ends.
fn running_mean(s: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    let n = s.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in s {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_max_matches_naive() {
        let s: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64).collect();
        let fast = running_max(&s, 7);
        for i in 0..s.len() {
            let lo = i.saturating_sub(3);
            let hi = (i + 3).min(s.len() - 1);
            let naive = s[lo..=hi].iter().cloned().fold(f64::MIN, f64::max);
            assert_eq!(fast[i], naive);
        }
    }

    #[test]
    fn vertex_of_parabola() {
        // y = −(x − 0.3)² sampled at −1, 0, 1
        let f = |x: f64| -(x - 0.3f64).powi(2);
        assert!((vertex_offset(f(-1.0), f(0.0), f(1.0)) - 0.3).abs() < 1e-12);
    }
}
