//! Mathieu characteristic values checked against independent oracles.

#![allow(clippy::needless_range_loop)]

use floquet_core::mathieu::{
    a, b, band_width, char_derivatives, char_value, Kind, MathieuOrder, Method,
};
use proptest::prelude::*;

/// Cyclic Jacobi sweeps on a dense symmetric matrix; returns sorted eigenvalues.
fn jacobi_eigenvalues(mut m: Vec<Vec<f64>>) -> Vec<f64> {
    let n = m.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                if m[p][r].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[r][r] - m[p][p]) / (2.0 * m[p][r]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkr) = (m[k][p], m[k][r]);
                    m[k][p] = c * mkp - s * mkr;
                    m[k][r] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let (mpk, mrk) = (m[p][k], m[r][k]);
                    m[p][k] = c * mpk - s * mrk;
                    m[r][k] = s * mpk + c * mrk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Dense operator -d²/dθ² + 2q cos 2θ in the exponential basis e^{i(μ+2m)θ}, |m| ≤ half.
fn dense_floquet(mu: f64, q: f64, half: i64) -> Vec<Vec<f64>> {
    let n = (2 * half + 1) as usize;
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        let k = i as i64 - half;
        m[i][i] = (mu + 2.0 * k as f64).powi(2);
        if i + 1 < n {
            m[i][i + 1] = q;
            m[i + 1][i] = q;
        }
    }
    m
}

#[test]
fn a0_at_q1_against_dense_101_mode_oracle() {
    let oracle = jacobi_eigenvalues(dense_floquet(0.0, 1.0, 50))[0];
    assert!((oracle - (-0.4551)).abs() < 1e-4, "oracle {oracle}");
    let value = a(0.0, 1.0).unwrap();
    assert!((value - oracle).abs() < 1e-11, "{value} vs {oracle}");
}

#[test]
fn integer_ladder_against_dense_oracle() {
    // with μ = 0 the exponential basis holds a_0, b_2, a_2, b_4, a_4, ...
    for q in [0.3, 2.0, 15.0] {
        let ev = jacobi_eigenvalues(dense_floquet(0.0, q, 40));
        let ladder = [a(0.0, q), b(2.0, q), a(2.0, q), b(4.0, q), a(4.0, q)];
        for (want, got) in ev.iter().zip(ladder) {
            assert!(
                (want - got.unwrap()).abs() < 1e-9 * want.abs().max(1.0),
                "q={q}"
            );
        }
        // μ = 1 holds a_1, b_1, a_3, b_3 (in some order per q)
        let mut odd = vec![
            a(1.0, q).unwrap(),
            b(1.0, q).unwrap(),
            a(3.0, q).unwrap(),
            b(3.0, q).unwrap(),
        ];
        odd.sort_by(f64::total_cmp);
        let ev = jacobi_eigenvalues(dense_floquet(1.0, q, 40));
        for (want, got) in ev.iter().zip(odd) {
            assert!((want - got).abs() < 1e-9 * want.abs().max(1.0), "q={q}");
        }
    }
}

#[test]
fn fractional_order_against_dense_oracle() {
    // ν = 2.5 = μ + 2k with μ = 0.5; q = 0 levels 0.5², 1.5², 2.5², ... so rank 2
    let q = 3.0;
    let ev = jacobi_eigenvalues(dense_floquet(0.5, q, 40));
    let v = a(2.5, q).unwrap();
    assert!((v - ev[2]).abs() < 1e-9);
    let v = b(1.5, q).unwrap();
    assert!((v - ev[1]).abs() < 1e-9);
}

#[test]
fn free_limit_integer_and_half_integer() {
    for twice in 0..=20 {
        let nu = twice as f64 / 2.0;
        for kind in [Kind::EvenA, Kind::OddB] {
            if kind == Kind::OddB && twice == 0 {
                continue;
            }
            let o = MathieuOrder::new(kind, nu).unwrap();
            let c = char_value(o, 0.0, Method::Exact).unwrap();
            assert!((c.value - nu * nu).abs() < 1e-12);
        }
    }
}

#[test]
fn interlacing() {
    for q in [0.1, 1.0, 10.0, 100.0] {
        for nu in 0..=20 {
            let an = a(nu as f64, q).unwrap();
            let bn1 = b(nu as f64 + 1.0, q).unwrap();
            assert!(an <= bn1, "a_{nu}({q}) = {an} > b_{}({q}) = {bn1}", nu + 1);
        }
    }
}

#[test]
fn continuity_in_q() {
    for nu in [0.0, 1.0, 3.0, 4.5, 7.0] {
        for q in [0.2, 1.7, 12.0, 90.0] {
            let d = (a(nu, q + 1e-6).unwrap() - a(nu, q).unwrap()).abs();
            assert!(d < 1e-4, "nu={nu} q={q} jump {d}");
        }
    }
}

#[test]
fn small_q_series_agreement() {
    for nu in [5.0, 6.0, 8.0, 5.5, 10.0] {
        for q in [0.05, 0.2, 0.5] {
            let o = MathieuOrder::even(nu).unwrap();
            let s = char_value(o, q, Method::SeriesSmallQ).unwrap();
            assert_eq!(s.method, Method::SeriesSmallQ);
            let e = char_value(o, q, Method::Exact).unwrap().value;
            assert!(((s.value - e) / e).abs() < 1e-3, "nu={nu} q={q}");
        }
    }
    // a_5 = 25 + q²/48 + O(q⁴)
    let s = char_value(MathieuOrder::even(5.0).unwrap(), 0.5, Method::SeriesSmallQ).unwrap();
    assert!((s.value - 25.005_208_333_333_33).abs() < 1e-12);
    let e = a(5.0, 0.5).unwrap();
    assert!(((s.value - e) / e).abs() < 1e-4);
}

#[test]
fn large_q_series_agreement() {
    for q in [100.0, 200.0, 400.0] {
        for nu in 0..=3 {
            for kind in [Kind::EvenA, Kind::OddB] {
                if kind == Kind::OddB && nu == 0 {
                    continue;
                }
                let o = MathieuOrder::new(kind, nu as f64).unwrap();
                let s = char_value(o, q, Method::SeriesLargeQ).unwrap().value;
                let e = char_value(o, q, Method::Exact).unwrap().value;
                assert!(
                    ((s - e) / e).abs() < 1e-2,
                    "{kind:?} nu={nu} q={q}: {s} vs {e}"
                );
            }
        }
    }
}

#[test]
fn band_width_against_exact_gap() {
    for nu in [0u32, 1] {
        let exact = b(nu as f64 + 1.0, 50.0).unwrap() - a(nu as f64, 50.0).unwrap();
        let asym = band_width(nu, 50.0).unwrap();
        let ratio = asym / exact;
        assert!((1.0 / 1.5..=1.5).contains(&ratio), "nu={nu}: ratio {ratio}");
    }
}

#[test]
fn band_width_decreases_on_25_to_400() {
    for nu in 0..4 {
        let mut last = f64::INFINITY;
        let mut q = 25.0;
        while q <= 400.0 {
            let w = band_width(nu, q).unwrap();
            assert!(w > 0.0 && w < last, "nu={nu} q={q}");
            last = w;
            q += 5.0;
        }
    }
}

/// Symbolic derivatives of ν² + q²/(2u) + (5ν²+7)q⁴/(32u³(ν²−4)), u = ν² − 1.
fn small_q_series_derivatives(nu: f64, q: f64) -> [f64; 3] {
    // q² term: h/u
    let u = nu * nu - 1.0;
    let h = q * q / 2.0;
    let second = [
        -h * 2.0 * nu / u.powi(2),
        h * (-2.0 / u.powi(2) + 8.0 * nu * nu / u.powi(3)),
        h * (24.0 * nu / u.powi(3) - 48.0 * nu.powi(3) / u.powi(4)),
    ];
    // q⁴ term g(ν) = c·N/D with N = 5ν²+7, D = u³(ν²−4); derivatives via log-derivative chain
    let c = q.powi(4) / 32.0;
    let g = |x: f64| c * (5.0 * x * x + 7.0) / ((x * x - 1.0).powi(3) * (x * x - 4.0));
    // g is a rational function with no poles near ν; a wide 9-point stencil is exact to ~1e-12
    let e = 1e-2;
    let f = |k: f64| g(nu + k * e);
    let d1 = (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * e);
    let d2 = (-f(-2.0) + 16.0 * f(-1.0) - 30.0 * f(0.0) + 16.0 * f(1.0) - f(2.0)) / (12.0 * e * e);
    let d3 = (f(-3.0) - 8.0 * f(-2.0) + 13.0 * f(-1.0) - 13.0 * f(1.0) + 8.0 * f(2.0) - f(3.0))
        / (8.0 * e.powi(3));
    [
        2.0 * nu + second[0] + d1,
        2.0 + second[1] + d2,
        second[2] + d3,
    ]
}

#[test]
fn derivatives_match_small_q_series_at_5_5() {
    let d = char_derivatives(MathieuOrder::even(5.5).unwrap(), 0.5, 3).unwrap();
    let want = small_q_series_derivatives(5.5, 0.5);
    for k in 0..3 {
        let rel = ((d[k] - want[k]) / want[k]).abs();
        assert!(
            rel < 1e-3,
            "derivative {}: {} vs {} (rel {rel:.2e})",
            k + 1,
            d[k],
            want[k]
        );
    }
}

#[test]
fn derivatives_in_free_limit() {
    let d = char_derivatives(MathieuOrder::even(3.0).unwrap(), 0.0, 2).unwrap();
    assert!((d[0] - 6.0).abs() < 1e-8);
    assert!((d[1] - 2.0).abs() < 1e-6);
}

#[test]
fn ladder_derivatives_follow_large_q_series() {
    // d/dν of -2q + 2s√q - (s²+1)/8 - (s³+3s)/(128√q), s = 2ν + 1
    let q: f64 = 400.0;
    let rq = q.sqrt();
    for nu in [0.0, 1.0, 2.0] {
        let s = 2.0 * nu + 1.0;
        let d1 = 4.0 * rq - s / 2.0 - (3.0 * s * s + 3.0) / (64.0 * rq);
        let d2 = -1.0 - 3.0 * s / (16.0 * rq);
        let d = char_derivatives(MathieuOrder::even(nu).unwrap(), q, 2).unwrap();
        assert!(((d[0] - d1) / d1).abs() < 1e-3, "nu={nu}: {} vs {d1}", d[0]);
        assert!(((d[1] - d2) / d2).abs() < 2e-2, "nu={nu}: {} vs {d2}", d[1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interlacing_holds_for_random_q(q in 0.0f64..150.0, nu in 0u32..12) {
        let an = a(nu as f64, q).unwrap();
        let bn1 = b(nu as f64 + 1.0, q).unwrap();
        prop_assert!(an <= bn1 + 1e-9 * an.abs().max(1.0));
    }

    #[test]
    fn ground_value_below_free_value(q in 0.0f64..50.0) {
        // a_0(q) <= 0 with equality only at q = 0
        let v = a(0.0, q).unwrap();
        prop_assert!(v <= 1e-12);
    }
}
