//! Integer sequences whose generating function is `P(x) / (1 - x)²`.
//!
//! `Σ t_r x^r` has this form with integer `P` exactly when `t_r = r·a + d`
//! for all large `r`, and then `P(1) = a`. Writing the finite deviation as
//! `q(x) = Σ_{r < s} (t_r − r·a − d) x^r` gives
//!
//! ```text
//! P(x) = a·x + d·(1 − x) + (1 − x)² · q(x).
//! ```
//!
//! Everything here only speaks about the finite window that was supplied.

use thiserror::Error;

/// Default number of trailing terms that must lie on one arithmetic progression.
pub const DEFAULT_MIN_RUN: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("t_{index} = {got} deviates from the tail formula {expected}")]
    Inconsistent { index: usize, got: i64, expected: i64 },
    #[error("integer overflow in series arithmetic")]
    Overflow,
    #[error("min_run must be at least 2, got {0}")]
    MinRun(usize),
}

/// Values `t_offset, t_{offset+1}, …`; coefficients below `offset` are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSequence {
    pub offset: usize,
    pub values: Vec<i64>,
}

impl IntSequence {
    pub fn new(offset: usize, values: Vec<i64>) -> Self {
        IntSequence { offset, values }
    }

    /// Coefficient of `x^r`.
    pub fn get(&self, r: usize) -> i64 {
        r.checked_sub(self.offset)
            .and_then(|i| self.values.get(i).copied())
            .unwrap_or(0)
    }

    pub fn end(&self) -> usize {
        self.offset + self.values.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    RationalFormDetected,
    Inconclusive,
    NotArithmeticInWindow,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::RationalFormDetected => "rational_form_detected",
            Verdict::Inconclusive => "inconclusive",
            Verdict::NotArithmeticInWindow => "not_arithmetic_in_window",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalityReport {
    pub verdict: Verdict,
    /// Common difference of the tail; equals `P(1)`.
    pub a: i64,
    /// `t_r = r·a + d` on the tail.
    pub d: i64,
    /// First `r` from which the tail formula holds within the window.
    pub stabilization_index: usize,
    pub p_coeffs: Vec<i64>,
    pub window_used: usize,
}

impl RationalityReport {
    fn without_detection(verdict: Verdict, window_used: usize) -> Self {
        RationalityReport {
            verdict,
            a: 0,
            d: 0,
            stabilization_index: 0,
            p_coeffs: Vec::new(),
            window_used,
        }
    }

    pub fn p_at_one(&self) -> i64 {
        self.p_coeffs.iter().sum()
    }

    pub fn summary(&self) -> String {
        match self.verdict {
            Verdict::RationalFormDetected => format!(
                "eventually-arithmetic within window (from r = {}): P(x) = {}, P(1) = {}",
                self.stabilization_index,
                format_poly(&self.p_coeffs),
                self.p_at_one()
            ),
            Verdict::Inconclusive => format!("inconclusive: window of {} terms is too short", self.window_used),
            Verdict::NotArithmeticInWindow => "not eventually-arithmetic within window".to_string(),
        }
    }
}

/// Finds the longest arithmetic tail; a tail of at least `min_run` terms counts
/// as detection.
pub fn analyze_sequence(t: &IntSequence, min_run: usize) -> Result<RationalityReport, SeriesError> {
    if min_run < 2 {
        return Err(SeriesError::MinRun(min_run));
    }
    let n = t.values.len();
    if n < min_run {
        return Ok(RationalityReport::without_detection(Verdict::Inconclusive, n));
    }
    let diff = |i: usize| t.values[i + 1].checked_sub(t.values[i]).ok_or(SeriesError::Overflow);
    let a = diff(n - 2)?;
    let mut start = n - 2;
    while start > 0 && diff(start - 1)? == a {
        start -= 1;
    }
    if n - start < min_run {
        return Ok(RationalityReport::without_detection(Verdict::NotArithmeticInWindow, n));
    }
    let stab = t.offset + start;
    let d = (stab as i64)
        .checked_mul(a)
        .and_then(|ra| t.values[start].checked_sub(ra))
        .ok_or(SeriesError::Overflow)?;
    let p_coeffs = polynomial_from_series(t, a, d, stab)?;
    Ok(RationalityReport {
        verdict: Verdict::RationalFormDetected,
        a,
        d,
        stabilization_index: stab,
        p_coeffs,
        window_used: n,
    })
}

/// Numerator `P` with `Σ t_r x^r = P(x)/(1−x)²`, assuming `t_r = r·a + d` for
/// every `r ≥ stab` (checked inside the window). Trailing zeros are trimmed.
pub fn polynomial_from_series(t: &IntSequence, a: i64, d: i64, stab: usize) -> Result<Vec<i64>, SeriesError> {
    let tail = |r: usize| -> Result<i64, SeriesError> {
        (r as i64)
            .checked_mul(a)
            .and_then(|v| v.checked_add(d))
            .ok_or(SeriesError::Overflow)
    };
    for r in stab.max(t.offset)..t.end() {
        let expected = tail(r)?;
        if t.get(r) != expected {
            return Err(SeriesError::Inconsistent {
                index: r,
                got: t.get(r),
                expected,
            });
        }
    }
    // q(x) = Σ_{r<stab} (t_r − tail(r)) x^r
    let q = (0..stab)
        .map(|r| t.get(r).checked_sub(tail(r)?).ok_or(SeriesError::Overflow))
        .collect::<Result<Vec<i64>, _>>()?;
    let mut p = vec![0i64; stab + 2];
    // (1 − x)² q(x)
    for (r, &c) in q.iter().enumerate() {
        for (shift, m) in [(0usize, 1i64), (1, -2), (2, 1)] {
            let term = c.checked_mul(m).ok_or(SeriesError::Overflow)?;
            p[r + shift] = p[r + shift].checked_add(term).ok_or(SeriesError::Overflow)?;
        }
    }
    // a·x + d·(1 − x)
    p[0] = p[0].checked_add(d).ok_or(SeriesError::Overflow)?;
    p[1] = p[1]
        .checked_add(a.checked_sub(d).ok_or(SeriesError::Overflow)?)
        .ok_or(SeriesError::Overflow)?;
    while p.last() == Some(&0) {
        p.pop();
    }
    Ok(p)
}

/// `t_{r−1} + a ≤ t_r ≤ r·a + c` throughout the window.
pub fn sandwich_check(t: &IntSequence, a: i64, c: i64) -> bool {
    let upper_ok = t.values.iter().enumerate().all(|(i, &v)| {
        let r = (t.offset + i) as i128;
        (v as i128) <= r * a as i128 + c as i128
    });
    let lower_ok = t.values.windows(2).all(|w| w[0] as i128 + a as i128 <= w[1] as i128);
    upper_ok && lower_ok
}

/// First `n` coefficients of `P(x) · Σ (r+1) x^r`.
pub fn reconstruct_series(p_coeffs: &[i64], n: usize) -> Result<IntSequence, SeriesError> {
    let values = (0..n)
        .map(|r| {
            p_coeffs
                .iter()
                .enumerate()
                .take(r + 1)
                .try_fold(0i64, |acc, (k, &c)| {
                    c.checked_mul((r - k + 1) as i64).and_then(|v| acc.checked_add(v))
                })
                .ok_or(SeriesError::Overflow)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntSequence::new(0, values))
}

/// Human form such as `2x − x²`; `0` for the zero polynomial.
pub fn format_poly(p: &[i64]) -> String {
    let mut out = String::new();
    for (k, &c) in p.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "−" } else { "+" };
        if out.is_empty() {
            if c < 0 {
                out.push('−');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let mag = c.unsigned_abs();
        let mono = match k {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x{}", superscript(k)),
        };
        if mag != 1 || k == 0 {
            out.push_str(&mag.to_string());
        }
        out.push_str(&mono);
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().bytes().map(|b| DIGITS[(b - b'0') as usize]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Multiplies a truncated series by (1 − x)² term by term; used as an
    // independent oracle for the numerator.
    fn times_one_minus_x_squared(coeffs: &[i64]) -> Vec<i64> {
        (0..coeffs.len())
            .map(|r| {
                let at = |k: isize| if k < 0 { 0 } else { coeffs[k as usize] };
                at(r as isize) - 2 * at(r as isize - 1) + at(r as isize - 2)
            })
            .collect()
    }

    #[test]
    fn counterexample_sequence() {
        let t = IntSequence::new(1, vec![2, 3, 4, 5]);
        let rep = analyze_sequence(&t, DEFAULT_MIN_RUN).unwrap();
        assert_eq!(rep.verdict, Verdict::RationalFormDetected);
        assert_eq!(rep.a, 1);
        // oracle: (1 − x)² Σ_{r≥1} (r+1) x^r, truncated well past the degree
        let dense: Vec<i64> = (0..12).map(|r| if r == 0 { 0 } else { r + 1 }).collect();
        let oracle = times_one_minus_x_squared(&dense);
        assert_eq!(&oracle[..3], &[0, 2, -1]);
        assert!(oracle[3..].iter().all(|&c| c == 0));
        assert_eq!(rep.p_coeffs, vec![0, 2, -1]);
        assert_eq!(rep.p_at_one(), 1);
        assert_eq!(format_poly(&rep.p_coeffs), "2x − x²");
        assert!(rep.summary().contains("eventually-arithmetic within window"));
    }

    #[test]
    fn constant_and_alternating() {
        let rep = analyze_sequence(&IntSequence::new(0, vec![5, 5, 5, 5]), 3).unwrap();
        assert_eq!(rep.verdict, Verdict::RationalFormDetected);
        assert_eq!((rep.a, rep.p_at_one()), (0, 0));
        let rep = analyze_sequence(&IntSequence::new(0, vec![0, 1, 0, 1, 0]), 3).unwrap();
        assert_eq!(rep.verdict, Verdict::NotArithmeticInWindow);
        let rep = analyze_sequence(&IntSequence::new(0, vec![0, 1]), 3).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
        assert_eq!(
            analyze_sequence(&IntSequence::new(0, vec![0, 1]), 1),
            Err(SeriesError::MinRun(1))
        );
    }

    #[test]
    fn late_stabilization() {
        let t = IntSequence::new(1, vec![7, 3, 4, 5, 6]);
        let rep = analyze_sequence(&t, 3).unwrap();
        assert_eq!(rep.stabilization_index, 2);
        assert_eq!((rep.a, rep.d), (1, 1));
        let back = reconstruct_series(&rep.p_coeffs, 6).unwrap();
        assert_eq!(back.values, vec![0, 7, 3, 4, 5, 6]);
    }

    #[test]
    fn polynomial_examples() {
        let t = IntSequence::new(1, vec![2, 3, 4, 5]);
        assert_eq!(polynomial_from_series(&t, 1, 1, 1).unwrap(), vec![0, 2, -1]);
        let t = IntSequence::new(1, vec![1, 2, 3, 4]);
        assert_eq!(polynomial_from_series(&t, 1, 0, 1).unwrap(), vec![0, 1]);
        let t = IntSequence::new(0, vec![0, 0, 0]);
        assert_eq!(polynomial_from_series(&t, 0, 0, 0).unwrap(), Vec::<i64>::new());
        assert!(matches!(
            polynomial_from_series(&IntSequence::new(0, vec![0, 1, 5]), 1, 0, 0),
            Err(SeriesError::Inconsistent { index: 2, .. })
        ));
    }

    #[test]
    fn sandwich_examples() {
        assert!(sandwich_check(&IntSequence::new(0, (0..6).collect()), 1, 0));
        assert!(sandwich_check(&IntSequence::new(2, vec![2, 3, 4, 5]), 1, 0));
        assert!(!sandwich_check(&IntSequence::new(0, vec![0, 5]), 1, 0));
    }

    #[test]
    fn reconstruction_examples() {
        // convolution with 1, 2, 3, 4, 5 by hand
        assert_eq!(reconstruct_series(&[0, 1], 5).unwrap().values, vec![0, 1, 2, 3, 4]);
        assert_eq!(reconstruct_series(&[1], 3).unwrap().values, vec![1, 2, 3]);
        assert_eq!(reconstruct_series(&[0, 2, -1], 5).unwrap().values, vec![0, 2, 3, 4, 5]);
    }

    #[test]
    fn poly_formatting() {
        assert_eq!(format_poly(&[]), "0");
        assert_eq!(format_poly(&[0, 1]), "x");
        assert_eq!(format_poly(&[-3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2]), "−3 + 2x¹¹");
    }

    proptest! {
        #[test]
        fn detected_tails_round_trip(p in proptest::collection::vec(-20i64..20, 0..6), extra in 3usize..8) {
            let n = p.len() + extra;
            let t = reconstruct_series(&p, n).unwrap();
            let rep = analyze_sequence(&t, DEFAULT_MIN_RUN).unwrap();
            prop_assert_eq!(rep.verdict, Verdict::RationalFormDetected);
            prop_assert_eq!(rep.a, p.iter().sum::<i64>());
            prop_assert_eq!(rep.p_at_one(), rep.a);
            prop_assert_eq!(reconstruct_series(&rep.p_coeffs, n).unwrap(), t.clone());
            // the detected tail satisfies the sandwich with c = max(t_r − r·a)
            let tail = IntSequence::new(rep.stabilization_index, t.values[rep.stabilization_index..].to_vec());
            let c = tail.values.iter().enumerate().map(|(i, v)| v - (rep.stabilization_index + i) as i64 * rep.a).max().unwrap();
            prop_assert!(sandwich_check(&tail, rep.a, c));
        }
    }
}
