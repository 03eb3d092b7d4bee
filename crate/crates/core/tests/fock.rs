use strongfield::fock::*;
use strongfield::quadrature::QuadratureOptions;

fn max_diff(a: &nalgebra::DMatrix<C64>, b: &nalgebra::DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn opts() -> QuadratureOptions {
    QuadratureOptions::default()
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// B(a, b) for positive integers via (a−1)!(b−1)!/(a+b−1)!.
fn beta_int(a: u64, b: u64) -> f64 {
    factorial(a - 1) * factorial(b - 1) / factorial(a + b - 1)
}

/// γ(n+1, x) = n! e^{−x} Σ_{k>n} x^k/k!.
fn lower_gamma_int(n: u64, x: f64) -> f64 {
    let mut term: f64 = (1..=n + 1).map(|k| x / k as f64).product();
    let mut tail = 0.0;
    let mut k = n + 1;
    while term > 1e-18 * tail || tail == 0.0 {
        tail += term;
        k += 1;
        term *= x / k as f64;
    }
    factorial(n) * (-x).exp() * tail
}

#[test]
fn plane_cn() {
    let w = KahlerWeight::plane(1.0).unwrap();
    assert!((cn_quadrature(&w, 3, &opts()).unwrap() - 6.0).abs() < 1e-12);
    assert!((cn_quadrature(&w, 0, &opts()).unwrap() - 1.0).abs() < 1e-13);
    let s = build_space(w, Some(5)).unwrap();
    assert_eq!(s.c(), &[1.0, 1.0, 2.0, 6.0, 24.0, 120.0]);
    let w = KahlerWeight::plane(0.5).unwrap();
    for n in 0..10u32 {
        let oracle = factorial(n as u64) * 0.5f64.powi(n as i32 + 1);
        assert!((cn_closed_form(&w, n).unwrap() / oracle - 1.0).abs() < 1e-14);
    }
}

#[test]
fn monopole_cn() {
    let w = KahlerWeight::monopole(4.0, 1.0).unwrap();
    let expected = [1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0];
    for (n, e) in expected.iter().enumerate() {
        assert!((cn_quadrature(&w, n as u32, &opts()).unwrap() - e).abs() < 1e-12);
        assert!((cn_closed_form(&w, n as u32).unwrap() - e).abs() < 1e-14);
    }
    assert!(matches!(cn_closed_form(&w, 3), Err(FockError::Divergent { .. })));
    assert!(matches!(
        cn_quadrature(&w, 3, &opts()),
        Err(FockError::Divergent { .. })
    ));
    for m in 3..=16u64 {
        let w = KahlerWeight::monopole(m as f64, 1.0).unwrap();
        for n in 0..=(m - 2) {
            let oracle = beta_int(n + 1, m - n - 1);
            assert!(
                (cn_closed_form(&w, n as u32).unwrap() / oracle - 1.0).abs() < 1e-12,
                "M={m} n={n}"
            );
        }
    }
}

#[test]
fn disc_cn() {
    let w = KahlerWeight::disc(700f64.sqrt(), 1.0).unwrap();
    assert!((cn_closed_form(&w, 2).unwrap() - 2.0).abs() < 1e-12);
    let w = KahlerWeight::disc(1.0, 1.0).unwrap();
    assert!((cn_closed_form(&w, 0).unwrap() - 0.632_120_558_828_557_7).abs() < 1e-15);
    let w = KahlerWeight::disc(1.3, 0.2).unwrap();
    let x = 1.69 / 0.2;
    for n in 0..20u32 {
        let oracle = 0.2f64.powi(n as i32 + 1) * lower_gamma_int(n as u64, x);
        assert!((cn_closed_form(&w, n).unwrap() / oracle - 1.0).abs() < 1e-10, "n={n}");
        assert!(
            (cn_quadrature(&w, n, &opts()).unwrap() / oracle - 1.0).abs() < 1e-8,
            "n={n}"
        );
    }
}

#[test]
fn monopole_dimensions() {
    for m in 3..=16usize {
        let s = build_space(KahlerWeight::monopole(m as f64, 1.0).unwrap(), None).unwrap();
        assert_eq!(s.dim(), m - 1);
    }
    assert!(matches!(
        KahlerWeight::monopole(2.0, 1.0),
        Err(FockError::Divergent { .. })
    ));
    assert!(matches!(
        build_space(KahlerWeight::monopole(4.0, 1.0).unwrap(), Some(3)),
        Err(FockError::TruncationTooLarge { k: 3, k_max: 2 })
    ));
    assert!(matches!(
        build_space(KahlerWeight::monopole(4.5, 1.0).unwrap(), None),
        Err(FockError::NonIntegerExponent(_))
    ));
}

#[test]
fn default_truncation() {
    let s = build_space(KahlerWeight::plane(1.0).unwrap(), None).unwrap();
    assert_eq!(s.truncation(), DEFAULT_TRUNCATION);
    assert!(s.cross_check_error() < CROSS_CHECK_TOL);
}

#[test]
fn cross_check_failure_reports_both_values() {
    let opts = BuildOptions {
        perturb_closed_form: Some((1, 1e-4)),
        ..BuildOptions::default()
    };
    let r = build_space_with(KahlerWeight::plane(1.0).unwrap(), Some(4), &opts);
    match r {
        Err(FockError::CrossCheck {
            n,
            closed_form,
            quadrature,
            ..
        }) => {
            assert_eq!(n, 1);
            assert!((closed_form - 1.0001).abs() < 1e-12);
            assert!((quadrature - 1.0).abs() < 1e-10);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn raising_entries() {
    let s = build_space(KahlerWeight::plane(1.0).unwrap(), Some(6)).unwrap();
    let a = raising_matrix(&s);
    for n in 0..6 {
        assert!((a.entries[(n + 1, n)].re - ((n + 1) as f64).sqrt()).abs() < 1e-14);
    }
    let s = build_space(KahlerWeight::monopole(4.0, 1.0).unwrap(), None).unwrap();
    let a = raising_matrix(&s);
    assert!((a.entries[(1, 0)].re - 0.5f64.sqrt()).abs() < 1e-14);
    assert!((a.entries[(2, 1)].re - 2f64.sqrt()).abs() < 1e-14);
    let s = build_space(KahlerWeight::plane(1.0).unwrap(), Some(0)).unwrap();
    assert_eq!(raising_matrix(&s).max_norm(), 0.0);
}

#[test]
fn lowering_is_adjoint_of_raising() {
    let s = build_space(KahlerWeight::disc(1.0, 0.3).unwrap(), Some(8)).unwrap();
    let up = raising_matrix(&s);
    let down = lowering_matrix(&s);
    assert_eq!(down.entries, up.entries.adjoint());
}

#[test]
fn commutator_diagonal_values() {
    for hbar in [1.0, 0.5, 0.1] {
        let s = build_space(KahlerWeight::plane(hbar).unwrap(), Some(30)).unwrap();
        for d in s.commutator_diagonal() {
            assert!((d + hbar).abs() < 1e-10);
        }
    }
    let mut last = f64::INFINITY;
    for hbar in [0.2, 0.1, 0.05] {
        let s = build_space(KahlerWeight::disc(1.0, hbar).unwrap(), Some(3)).unwrap();
        let delta = s.commutator_diagonal()[0] + hbar;
        assert!(delta > 0.0 && delta < last);
        last = delta;
        if hbar == 0.1 {
            assert!(delta <= 1e-3);
        }
    }
}

#[test]
fn commutator_matrix_matches_ratios_away_from_edge() {
    let s = build_space(KahlerWeight::monopole(10.0, 1.0).unwrap(), None).unwrap();
    let m = commutator_matrix(&s);
    let c = s.c();
    for n in 1..s.truncation() {
        let expected = c[n] / c[n - 1] - c[n + 1] / c[n];
        assert!((m.entries[(n, n)].re - expected).abs() < 1e-12);
    }
}

#[test]
fn toeplitz_basics() {
    let s = build_space(KahlerWeight::plane(1.0).unwrap(), Some(6)).unwrap();
    let id = toeplitz_matrix(&s, &Symbol::constant(1.0), &opts()).unwrap();
    assert!(max_diff(&id.entries, &nalgebra::DMatrix::identity(7, 7)) < 1e-9);
    let qa = toeplitz_monomial(&s, 1, 0).unwrap();
    assert!(max_diff(&qa.entries, &raising_matrix(&s).entries) < 1e-9);
    let qabar = toeplitz_monomial(&s, 0, 1).unwrap();
    assert!(max_diff(&qabar.entries, &lowering_matrix(&s).entries) < 1e-9);
    let qn = toeplitz_monomial(&s, 1, 1).unwrap();
    for n in 0..7 {
        assert!((qn.entries[(n, n)].re - (n + 1) as f64).abs() < 1e-9);
    }
}

#[test]
fn toeplitz_divergent_band() {
    let s = build_space(KahlerWeight::monopole(4.0, 1.0).unwrap(), None).unwrap();
    // |a|² on the top state needs ∫ x³ (1+x)^{−4} dx
    assert!(matches!(
        toeplitz_monomial(&s, 1, 1),
        Err(FockError::DivergentMoment { .. })
    ));
    assert!(toeplitz_monomial(&s, 2, 0).is_ok());
}

#[test]
fn su2_spin_one() {
    let s = build_space(KahlerWeight::monopole(4.0, 1.0).unwrap(), None).unwrap();
    let r = su2_report(&s).unwrap();
    assert_eq!(r.dimension, 3);
    assert_eq!(r.spin, 1.0);
    assert!((r.lambda_fit - 3.0).abs() < 1e-12);
    assert_eq!(r.one_plus_aadag.len(), 3);
    assert!((r.one_plus_aadag[1] - 1.5).abs() < 1e-14 && (r.one_plus_aadag[2] - 3.0).abs() < 1e-14);
    assert!(r.residuals_fit.max() < 1e-10);
    assert!(r.residuals_nominal.max() > 1e-3);
    assert!(r.passed);
    let [jp, jm, _] = spin_operators(&s, r.lambda_fit).unwrap();
    assert!((jp.entries[(0, 1)].re - 2f64.sqrt()).abs() < 1e-12);
    assert!((jp.entries[(1, 2)].re - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(jm.entries, jp.entries.adjoint());
}

#[test]
fn su2_spin_half_and_refusal() {
    let s = build_space(KahlerWeight::monopole(3.0, 1.0).unwrap(), None).unwrap();
    let r = su2_report(&s).unwrap();
    let [jp, _, _] = spin_operators(&s, r.lambda_fit).unwrap();
    assert!((jp.entries[(0, 1)].re - 1.0).abs() < 1e-12);
    let s = build_space(KahlerWeight::monopole(3.0, 1.0).unwrap(), Some(0)).unwrap();
    assert!(matches!(su2_report(&s), Err(FockError::NoLadder)));
    let s = build_space(KahlerWeight::plane(1.0).unwrap(), Some(4)).unwrap();
    assert!(su2_report(&s).is_err());
}

#[test]
fn su2_report_json_digits() {
    let s = build_space(KahlerWeight::monopole(5.0, 1.0).unwrap(), None).unwrap();
    let text = su2_report(&s).unwrap().to_json();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["dimension"], 4);
    assert!(text.contains("\"lambda_nominal\": 5.0000000000000000e0"));
}

#[test]
fn perturbed_cn_breaks_su2() {
    let s = build_space(KahlerWeight::monopole(8.0, 1.0).unwrap(), None).unwrap();
    assert!(su2_report(&s.perturb_cn(1, 1e-4)).is_err());
}

#[test]
fn semiclassical_reports() {
    let s = build_space(KahlerWeight::plane(0.5).unwrap(), Some(10)).unwrap();
    let r = semiclassical_check(&s).unwrap();
    assert!(r.passed);
    assert!(r.plane.unwrap().max_ratio_deviation < 1e-12);
    let s = build_space(KahlerWeight::monopole(8.0, 1.0).unwrap(), None).unwrap();
    let m = semiclassical_check(&s).unwrap().monopole.unwrap();
    assert!((m.closure_deviation - 0.25).abs() < 1e-9);
    let t = semiclassical_trend(8.0, 16.0).unwrap();
    assert!(t.passed && (t.ratio - 0.5).abs() < 1e-6);
    assert!(toeplitz_commutator_norm(&s, &Symbol::constant(3.0), &Symbol::sphere_z()).unwrap() < 1e-12);
}

#[test]
fn csv_and_operator_json() {
    let s = build_space(KahlerWeight::plane(1.0).unwrap(), Some(3)).unwrap();
    let csv = s.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,c_n,method,commutator_entry"));
    assert_eq!(lines.next(), Some("0,1.0,closed_form,-1.0"));
    let v: serde_json::Value = serde_json::from_str(&raising_matrix(&s).to_json()).unwrap();
    assert_eq!(v["label"], "raising");
    assert_eq!(v["dim"], 4);
    assert_eq!(v["re"][1][0], 1.0);
    assert_eq!(v["im"][1][0], 0.0);
}
