//! Desk-scale verification suite behind `strongfield verify`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constraints::{classify_constraints, darboux_bracket_table, dirac_bracket_table};
use crate::fock::{
    build_space, cn_quadrature, semiclassical_trend, spin_operators, su2_report, KahlerWeight, LADDER_TOL,
};
use crate::foliation::{eom_residual, leaf_space_summary, rank_map, trace_leaf, GridSpec};
use crate::geometry::{
    field_strength, Chart, ChartPoint, FieldMethod, Monomial, PolynomialPotential, PotentialSpec, RhoProfile,
};
use crate::quadrature::{integrate, integrate_semi_infinite, QuadratureOptions};
use crate::special::{beta, gamma, lower_incomplete_gamma};

pub const GROUPS: [&str; 9] = [
    "dirac",
    "constraints",
    "plane",
    "disc",
    "su2",
    "foliation",
    "regions",
    "semiclassical",
    "oracles",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub group: &'static str,
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub tolerance: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub tol_rank: f64,
    /// Restrict to these groups; empty means all.
    pub only: Vec<String>,
    /// Test hook: scale c_1 of every monopole space by (1 + ε).
    pub cn_perturbation: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            tol_rank: crate::geometry::DEFAULT_RANK_TOL,
            only: Vec::new(),
            cn_perturbation: None,
        }
    }
}

struct Suite {
    results: Vec<CheckResult>,
}

impl Suite {
    fn push(
        &mut self,
        group: &'static str,
        name: impl Into<String>,
        expected: impl Into<String>,
        actual: impl Into<String>,
        tolerance: impl Into<String>,
        passed: bool,
    ) {
        self.results.push(CheckResult {
            group,
            name: name.into(),
            expected: expected.into(),
            actual: actual.into(),
            tolerance: tolerance.into(),
            passed,
        });
    }

    fn fail(
        &mut self,
        group: &'static str,
        name: impl Into<String>,
        expected: impl Into<String>,
        err: impl std::fmt::Display,
    ) {
        self.push(group, name, expected, format!("error: {err}"), "-", false);
    }
}

fn e(v: f64) -> String {
    format!("{v:.3e}")
}

pub fn run_verify(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut suite = Suite { results: Vec::new() };
    let wanted = |g: &str| opts.only.is_empty() || opts.only.iter().any(|o| o == g);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    if wanted("dirac") {
        dirac_checks(&mut suite, &mut rng, opts.tol_rank);
    }
    if wanted("constraints") {
        constraint_checks(&mut suite, opts.tol_rank);
    }
    if wanted("plane") {
        plane_checks(&mut suite);
    }
    if wanted("disc") {
        disc_checks(&mut suite);
    }
    if wanted("su2") {
        su2_checks(&mut suite, opts.cn_perturbation);
    }
    if wanted("foliation") {
        foliation_checks(&mut suite, &mut rng, opts.tol_rank);
    }
    if wanted("regions") {
        region_checks(&mut suite, opts.tol_rank);
    }
    if wanted("semiclassical") {
        semiclassical_checks(&mut suite);
    }
    if wanted("oracles") {
        oracle_checks(&mut suite, &mut rng);
    }
    suite.results
}

fn dirac_checks(suite: &mut Suite, rng: &mut ChaCha8Rng, tol: f64) {
    let mut worst: f64 = 0.0;
    let mut error = None;
    for k in 0..100 {
        let charge = [1, 2, 4][k % 3];
        let theta = rng.gen_range(0.1..PI - 0.1);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let r = rng.gen_range(0.5..2.0);
        let spec = PotentialSpec::monopole(charge).expect("valid charge");
        let point = ChartPoint::new(Chart::SphericalNorth, vec![r, theta, phi]).expect("valid point");
        match dirac_bracket_table(&spec, &point, tol) {
            Ok(t) => {
                let expected = 2.0 / (charge as f64 * theta.sin());
                worst = worst.max(((t.xx(2, 1) - expected) / expected).abs());
            }
            Err(err) => error = Some(err),
        }
    }
    match error {
        Some(err) => suite.fail("dirac", "monopole {φ,ϑ} = 2/(N sinϑ)", "rel ≤ 1e-9", err),
        None => suite.push(
            "dirac",
            "monopole {φ,ϑ} = 2/(N sinϑ), 100 points",
            "0",
            e(worst),
            "1e-9 rel",
            worst <= 1e-9,
        ),
    }

    let point = ChartPoint::cartesian(vec![0.0, 0.0, 0.0]).expect("valid point");
    match dirac_bracket_table(&PotentialSpec::Stack, &point, tol) {
        Ok(t) => {
            let v = t.xx(0, 1);
            suite.push(
                "dirac",
                "stack {x,y}",
                "1",
                format!("{v}"),
                "1e-12",
                (v - 1.0).abs() <= 1e-12,
            );
        }
        Err(err) => suite.fail("dirac", "stack {x,y}", "1", err),
    }

    let disc = PotentialSpec::disc(1.0, RhoProfile::default()).expect("valid disc");
    let mut worst: f64 = 0.0;
    let mut sample = 0.0;
    for k in 0..20 {
        let r = 0.05 + 0.9 * k as f64 / 19.0;
        let point = ChartPoint::new(Chart::Polar, vec![r, 0.3]).expect("valid point");
        match dirac_bracket_table(&disc, &point, tol) {
            Ok(t) => {
                let expected = 1.0 / RhoProfile::default().derivative(r);
                if k == 9 {
                    sample = t.xx(0, 1) / expected;
                }
                worst = worst.max(((t.xx(0, 1) - expected) / expected).abs());
            }
            Err(err) => {
                suite.fail("dirac", "disc {r,φ} = 1/ρ′", "rel ≤ 1e-9", err);
                return;
            }
        }
    }
    suite.push(
        "dirac",
        "disc {r,φ} = 1/ρ′, 20 radii",
        "0",
        format!("{} ({{r,φ}}·ρ′ = {sample})", e(worst)),
        "1e-9 rel",
        worst <= 1e-9,
    );

    let spec = PotentialSpec::darboux(2, 5).expect("valid darboux");
    let x = [0.3, -0.2, 1.1, 0.5, -0.7];
    match (
        dirac_bracket_table(&spec, &ChartPoint::cartesian(x.to_vec()).expect("valid point"), tol),
        darboux_bracket_table(2, 5, &x),
    ) {
        (Ok(a), Ok(b)) => {
            let d = (a.theta.entries - b.theta.entries)
                .amax()
                .max((a.xp - b.xp).amax())
                .max((a.pp - b.pp).amax());
            suite.push("dirac", "darboux table = general route", "0", e(d), "1e-10", d <= 1e-10);
        }
        (Err(err), _) | (_, Err(err)) => suite.fail("dirac", "darboux table = general route", "0", err),
    }
}

fn constraint_checks(suite: &mut Suite, tol: f64) {
    let disc = PotentialSpec::disc(1.0, RhoProfile::default()).expect("valid disc");
    let cases: [(&str, PotentialSpec, ChartPoint, (usize, usize)); 4] = [
        (
            "monopole",
            PotentialSpec::monopole(1).expect("valid"),
            ChartPoint::new(Chart::North, vec![0.3, -0.4, 0.8]).expect("valid"),
            (2, 1),
        ),
        (
            "stack",
            PotentialSpec::Stack,
            ChartPoint::cartesian(vec![1.0, 2.0, 3.0]).expect("valid"),
            (2, 1),
        ),
        (
            "disc interior",
            disc.clone(),
            ChartPoint::cartesian(vec![0.2, 0.3]).expect("valid"),
            (2, 0),
        ),
        (
            "disc exterior",
            disc,
            ChartPoint::cartesian(vec![1.2, -0.9]).expect("valid"),
            (0, 2),
        ),
    ];
    for (name, spec, point, expected) in cases {
        let label = format!("{name} (second, first)");
        match classify_constraints(&spec, &point, tol) {
            Ok(c) => suite.push(
                "constraints",
                label,
                format!("{expected:?}"),
                format!("{:?}", (c.second_class, c.first_class)),
                "exact",
                (c.second_class, c.first_class) == expected,
            ),
            Err(err) => suite.fail("constraints", label, format!("{expected:?}"), err),
        }
    }
}

fn plane_checks(suite: &mut Suite) {
    for hbar in [1.0, 0.5, 0.1] {
        let name = format!("[â,â†] = −ħ, n ≤ 30, ħ = {hbar}");
        match build_space(KahlerWeight::plane(hbar).expect("valid weight"), Some(30)) {
            Ok(space) => {
                let worst = space
                    .commutator_diagonal()
                    .iter()
                    .map(|d| (d + hbar).abs())
                    .fold(0.0, f64::max);
                suite.push("plane", name, "0", e(worst), "1e-10", worst <= 1e-10);
                let cc = space.cross_check_error();
                suite.push(
                    "plane",
                    format!("c_n quadrature vs Γ, ħ = {hbar}"),
                    "0",
                    e(cc),
                    "1e-8 rel",
                    cc <= 1e-8,
                );
            }
            Err(err) => suite.fail("plane", name, "0", err),
        }
    }
}

fn disc_offset(hbar: f64) -> Result<f64, crate::fock::FockError> {
    let space = build_space(KahlerWeight::disc(1.0, hbar)?, Some(4))?;
    Ok(space.commutator_diagonal()[0] + hbar)
}

fn disc_checks(suite: &mut Suite) {
    let mut deltas = Vec::new();
    for hbar in [0.2, 0.1, 0.05] {
        match disc_offset(hbar) {
            Ok(d) => deltas.push((hbar, d)),
            Err(err) => {
                suite.fail("disc", format!("δ at ħ = {hbar}"), "> 0", err);
                return;
            }
        }
    }
    let d01 = deltas[1].1;
    suite.push(
        "disc",
        "0 < δ ≤ 1e-3 at ħ = 0.1, n = 0",
        "(0, 1e-3]",
        e(d01),
        "1e-3",
        d01 > 0.0 && d01 <= 1e-3,
    );
    let monotone = deltas.windows(2).all(|w| w[1].1 < w[0].1);
    suite.push(
        "disc",
        "δ decreases over ħ = 0.2, 0.1, 0.05",
        "decreasing",
        deltas.iter().map(|(_, d)| e(*d)).collect::<Vec<_>>().join(" > "),
        "strict",
        monotone,
    );
    let worst = deltas
        .iter()
        .map(|&(hbar, d)| {
            // ħ − ħγ(2,X)/γ(1,X) = r0²/(e^X − 1), X = r0²/ħ
            let oracle = 1.0 / (1.0 / hbar).exp_m1();
            ((d - oracle) / oracle).abs()
        })
        .fold(0.0, f64::max);
    suite.push(
        "disc",
        "δ vs incomplete-gamma oracle",
        "0",
        e(worst),
        "1e-6 rel",
        worst <= 1e-6,
    );
}

fn su2_checks(suite: &mut Suite, perturbation: Option<f64>) {
    for m in [3.0, 4.0, 5.0, 8.0, 16.0] {
        let name = format!("su(2) residuals at λ*, M = {m}");
        let space = match build_space(KahlerWeight::monopole(m, 1.0).expect("valid weight"), None) {
            Ok(s) => s,
            Err(err) => {
                suite.fail("su2", name, "< 1e-10", err);
                continue;
            }
        };
        let space = match perturbation {
            Some(eps) => space.perturb_cn(1, eps),
            None => space,
        };
        suite.push(
            "su2",
            format!("D = M − 1, M = {m}"),
            format!("{}", m - 1.0),
            format!("{}", space.dim()),
            "exact",
            space.dim() as f64 == m - 1.0,
        );
        match su2_report(&space) {
            Ok(r) => {
                let worst = r.residuals_fit.max().max(r.ladder_element_error);
                suite.push(
                    "su2",
                    name,
                    "0",
                    format!(
                        "{} (λ* = {:.12}, nominal λ = {m} gives {})",
                        e(worst),
                        r.lambda_fit,
                        e(r.residuals_nominal.max())
                    ),
                    "1e-10",
                    worst < LADDER_TOL,
                );
                if m == 4.0 {
                    let ops = spin_operators(&space, r.lambda_fit);
                    match ops {
                        Ok([jp, _, _]) => {
                            let s2 = 2f64.sqrt();
                            let dev = (jp.entries[(0, 1)].re - s2)
                                .abs()
                                .max((jp.entries[(1, 2)].re - s2).abs());
                            suite.push("su2", "spin-1 elements at M = 4", "√2", e(dev), "1e-12", dev <= 1e-12);
                        }
                        Err(err) => suite.fail("su2", "spin-1 elements at M = 4", "√2", err),
                    }
                }
            }
            Err(err) => suite.fail("su2", name, "< 1e-10", err),
        }
    }
}

fn foliation_checks(suite: &mut Suite, rng: &mut ChaCha8Rng, tol: f64) {
    let monopole = PotentialSpec::monopole(1).expect("valid");
    let mut worst_eom: f64 = 0.0;
    let mut worst_radial: f64 = 0.0;
    for _ in 0..10 {
        let theta: f64 = rng.gen_range(0.2..PI - 0.2);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let dir = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let chart = if dir[2] >= 0.0 { Chart::North } else { Chart::South };
        let start = ChartPoint::new(chart, dir.to_vec()).expect("valid");
        match trace_leaf(&monopole, &start, 1e-2, 100, tol) {
            Ok(path) => {
                for p in &path.points {
                    let c = p.coords();
                    let along: f64 = c.iter().zip(dir).map(|(a, b)| a * b).sum();
                    let perp = c
                        .iter()
                        .zip(dir)
                        .map(|(a, b)| (a - along * b).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    worst_radial = worst_radial.max(perp);
                }
                match eom_residual(&monopole, &path) {
                    Ok(r) => worst_eom = worst_eom.max(r),
                    Err(err) => return suite.fail("foliation", "monopole leaf EOM", "< 1e-8", err),
                }
            }
            Err(err) => return suite.fail("foliation", "monopole leaf", "radial", err),
        }
    }
    suite.push(
        "foliation",
        "monopole leaves radial",
        "0",
        e(worst_radial),
        "1e-8",
        worst_radial <= 1e-8,
    );
    suite.push(
        "foliation",
        "monopole leaf eom_residual",
        "0",
        e(worst_eom),
        "1e-8",
        worst_eom < 1e-8,
    );

    let start = ChartPoint::cartesian(vec![0.3, -0.2, 0.0]).expect("valid");
    match trace_leaf(&PotentialSpec::Stack, &start, 1e-2, 100, tol) {
        Ok(path) => {
            let drift = path
                .points
                .iter()
                .map(|p| (p.coords()[0] - 0.3).abs().max((p.coords()[1] + 0.2).abs()))
                .fold(0.0, f64::max);
            let r = eom_residual(&PotentialSpec::Stack, &path).unwrap_or(f64::INFINITY);
            suite.push(
                "foliation",
                "stack leaf is a z-line",
                "0",
                e(drift),
                "1e-12",
                drift <= 1e-12,
            );
            suite.push("foliation", "stack leaf eom_residual", "0", e(r), "1e-12", r < 1e-12);
        }
        Err(err) => suite.fail("foliation", "stack leaf", "z-line", err),
    }

    let monopole2 = PotentialSpec::monopole(2).expect("valid");
    let start = ChartPoint::new(Chart::SphericalNorth, vec![1.0, 1.1, 0.4]).expect("valid");
    match trace_leaf(&monopole2, &start, 1e-2, 100, tol) {
        Ok(path) => {
            let f0 = field_strength(&monopole2, &path.points[0], FieldMethod::Exact).map(|f| f.entries()[(1, 2)]);
            let mut worst: f64 = 0.0;
            for p in &path.points {
                if let (Ok(a), Ok(f)) = (&f0, field_strength(&monopole2, p, FieldMethod::Exact)) {
                    worst = worst.max((f.entries()[(1, 2)] - a).abs());
                } else {
                    worst = f64::INFINITY;
                }
            }
            suite.push(
                "foliation",
                "F_ϑφ constant along a leaf",
                "0",
                e(worst),
                "1e-9",
                worst <= 1e-9,
            );
        }
        Err(err) => suite.fail("foliation", "F_ϑφ constant along a leaf", "0", err),
    }
}

fn region_checks(suite: &mut Suite, tol: f64) {
    let disc = PotentialSpec::disc(1.0, RhoProfile::default()).expect("valid disc");
    for cells in [50, 100] {
        let name = format!("disc {cells}×{cells}: regions of rank {{2, 0}}");
        let grid = GridSpec::uniform(2, -2.0, 2.0, cells, Chart::Cartesian).expect("valid grid");
        match rank_map(&disc, &grid, tol) {
            Ok(map) => {
                let mut ranks: Vec<usize> = map.regions().iter().map(|r| r.rank).collect();
                ranks.sort_unstable();
                let report = leaf_space_summary(&map);
                let collapses = report
                    .regions
                    .iter()
                    .any(|r| r.rank == 0 && r.note == "collapses to a point");
                suite.push(
                    "regions",
                    name,
                    "[0, 2]",
                    format!("{ranks:?}"),
                    "exact",
                    ranks == vec![0, 2],
                );
                suite.push(
                    "regions",
                    format!("disc {cells}×{cells}: rank-0 region collapses"),
                    "collapses to a point",
                    report.summary.clone(),
                    "exact",
                    collapses,
                );
            }
            Err(err) => suite.fail("regions", name, "[0, 2]", err),
        }
    }
}

fn semiclassical_checks(suite: &mut Suite) {
    match semiclassical_trend(8.0, 16.0) {
        Ok(t) => suite.push(
            "semiclassical",
            "closure deviation ratio M = 8 → 16",
            "[0.3, 0.7]",
            format!("{:.6} ({} → {})", t.ratio, e(t.deviation_small), e(t.deviation_large)),
            "range",
            t.passed,
        ),
        Err(err) => suite.fail("semiclassical", "closure deviation ratio M = 8 → 16", "[0.3, 0.7]", err),
    }
}

/// Points where every chart of the preset is well away from its excluded set
/// and from the disc edge, where A itself jumps.
fn fd_sample(spec: &PotentialSpec, rng: &mut ChaCha8Rng) -> ChartPoint {
    loop {
        let p = match spec {
            PotentialSpec::Disc { .. } => {
                if rng.gen_bool(0.5) {
                    ChartPoint::cartesian(vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)])
                } else {
                    ChartPoint::new(Chart::Polar, vec![rng.gen_range(0.01..2.0), rng.gen_range(-PI..PI)])
                }
            }
            PotentialSpec::Monopole { .. } => {
                if rng.gen_bool(0.5) {
                    let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.5..1.5)).collect();
                    let chart = if x[2] >= 0.0 { Chart::North } else { Chart::South };
                    ChartPoint::new(chart, x)
                } else {
                    let chart = if rng.gen_bool(0.5) {
                        Chart::SphericalNorth
                    } else {
                        Chart::SphericalSouth
                    };
                    ChartPoint::new(
                        chart,
                        vec![
                            rng.gen_range(0.3..2.0),
                            rng.gen_range(0.1..PI - 0.1),
                            rng.gen_range(-PI..PI),
                        ],
                    )
                }
            }
            _ => ChartPoint::cartesian((0..spec.dimension()).map(|_| rng.gen_range(-2.0..2.0)).collect()),
        }
        .expect("sampled coordinates are finite");
        let r = match (spec, p.chart()) {
            (PotentialSpec::Disc { .. }, Chart::Polar) => p.coords()[0],
            (PotentialSpec::Disc { .. }, _) => p.norm(),
            _ => f64::NAN,
        };
        if let PotentialSpec::Disc { r0, .. } = spec {
            if (r - r0).abs() < 1e-3 {
                continue;
            }
        }
        if matches!(spec, PotentialSpec::Monopole { .. }) && !p.chart().is_spherical() {
            let planar = p.coords()[0].hypot(p.coords()[1]);
            if p.norm() < 0.3 || planar < 0.1 {
                continue;
            }
        }
        return p;
    }
}

pub fn fd_presets() -> Vec<PotentialSpec> {
    let cubic = PolynomialPotential {
        dimension: 3,
        components: vec![
            vec![Monomial {
                exponents: vec![0, 2, 1],
                coeff: 0.7,
            }],
            vec![
                Monomial {
                    exponents: vec![3, 0, 0],
                    coeff: -0.2,
                },
                Monomial {
                    exponents: vec![0, 0, 1],
                    coeff: 1.5,
                },
            ],
            vec![Monomial {
                exponents: vec![1, 1, 0],
                coeff: 0.4,
            }],
        ],
    };
    vec![
        PotentialSpec::disc(1.0, RhoProfile::default()).expect("valid"),
        PotentialSpec::Stack,
        PotentialSpec::monopole(1).expect("valid"),
        PotentialSpec::darboux(2, 5).expect("valid"),
        PotentialSpec::custom(cubic).expect("valid"),
    ]
}

/// max relative error ‖F_fd − F‖_max / ‖F‖_max over `count` sampled points
/// (absolute where F vanishes).
pub fn fd_agreement(
    spec: &PotentialSpec,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64, crate::geometry::GeometryError> {
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let p = fd_sample(spec, rng);
        let exact = field_strength(spec, &p, FieldMethod::Exact)?;
        let fd = field_strength(spec, &p, FieldMethod::finite_difference_at(&p))?;
        let scale = exact.entries().amax();
        let diff = (fd.entries() - exact.entries()).amax();
        worst = worst.max(if scale > 0.0 { diff / scale } else { diff });
    }
    Ok(worst)
}

fn oracle_checks(suite: &mut Suite, rng: &mut ChaCha8Rng) {
    let opts = QuadratureOptions::default();
    let mut worst: f64 = 0.0;
    for n in 0..=30u32 {
        let q = integrate_semi_infinite(
            |x| {
                if x == 0.0 && n > 0 {
                    0.0
                } else {
                    (-x + n as f64 * x.ln()).exp()
                }
            },
            0.0,
            &opts,
        )
        .map(|r| r.value);
        match q {
            Ok(v) => worst = worst.max(((v - gamma(n as f64 + 1.0)) / gamma(n as f64 + 1.0)).abs()),
            Err(err) => return suite.fail("oracles", "Γ(n+1) vs quadrature", "rel ≤ 1e-8", err),
        }
    }
    suite.push(
        "oracles",
        "Γ(n+1) vs quadrature, n ≤ 30",
        "0",
        e(worst),
        "1e-8 rel",
        worst <= 1e-8,
    );

    let mut worst: f64 = 0.0;
    for m in 3..=16u32 {
        let weight = KahlerWeight::monopole(m as f64, 1.0).expect("valid");
        for n in 0..=m - 2 {
            match cn_quadrature(&weight, n, &opts) {
                Ok(v) => {
                    let b = beta(n as f64 + 1.0, (m - n - 1) as f64);
                    worst = worst.max(((v - b) / b).abs());
                }
                Err(err) => return suite.fail("oracles", "B vs quadrature", "rel ≤ 1e-8", err),
            }
        }
    }
    suite.push(
        "oracles",
        "B(n+1, M−n−1) vs quadrature, M ≤ 16",
        "0",
        e(worst),
        "1e-8 rel",
        worst <= 1e-8,
    );

    let mut worst: f64 = 0.0;
    for x in [0.5, 1.0, 5.0, 10.0, 20.0] {
        for n in 0..=32u32 {
            let a = n as f64 + 1.0;
            let q = integrate(
                |t| {
                    if t == 0.0 && n > 0 {
                        0.0
                    } else {
                        (-t + n as f64 * t.ln()).exp()
                    }
                },
                0.0,
                x,
                &opts,
            );
            match q {
                Ok(r) => {
                    let g = lower_incomplete_gamma(a, x);
                    worst = worst.max(((r.value - g) / g).abs());
                }
                Err(err) => return suite.fail("oracles", "γ vs quadrature", "rel ≤ 1e-8", err),
            }
        }
    }
    suite.push(
        "oracles",
        "γ(n+1, x) vs quadrature, n ≤ 32",
        "0",
        e(worst),
        "1e-8 rel",
        worst <= 1e-8,
    );

    for spec in fd_presets() {
        let name = format!("finite-difference F vs exact, {} (1000 points)", spec.name());
        match fd_agreement(&spec, 1000, rng) {
            Ok(w) => suite.push("oracles", name, "0", e(w), "1e-6 rel", w <= 1e-6),
            Err(err) => suite.fail("oracles", name, "0", err),
        }
    }
}

/// Fixed-width table: group, check, expected, actual, tolerance, status.
pub fn format_table(results: &[CheckResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:<48} {:<22} {:<40} {:<10} STATUS",
        "GROUP", "CHECK", "EXPECTED", "ACTUAL", "TOL"
    );
    for r in results {
        let _ = writeln!(
            out,
            "{:<14} {:<48} {:<22} {:<40} {:<10} {}",
            r.group,
            r.name,
            r.expected,
            r.actual,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let _ = writeln!(out, "{passed}/{} checks passed", results.len());
    out
}
