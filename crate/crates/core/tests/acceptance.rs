//! Acceptance run: one line per criterion, nonzero exit status if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rigidity_core::bump::{ProductBump, RadialBump, TestFunction};
use rigidity_core::elliptic_lab::{
    assemble_and_solve_system, caccioppoli_ratio, corpus_entry, empirical_order,
    finite_difference_gradient, inclusion_distance, mean_value_check, mollify,
    weak_laplace_residual, GridField, Mollifier, SolverOptions,
};
use rigidity_core::gauge_integral::{
    boundary_flux, divergence_integral_2d, fields_2d, hk_integrate_1d, integrand_1d,
    verify_vanishing, Cell, GaugeOptions, Scheme,
};
use rigidity_core::matrix_space::{outer, MatrixSubspace, SphereSearch};

type Verdict = (bool, String);
type Criterion = (&'static str, fn() -> Verdict);

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| sci(*x)).collect::<Vec<_>>().join(", ")
}

/// Conformal, trivial, diagonal and 20 seeded random subspaces each of
/// 2×2 and 3×2 matrices.
fn subspace_family() -> Vec<(String, MatrixSubspace)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut family = vec![
        ("conformal".to_string(), MatrixSubspace::conformal()),
        ("zero".to_string(), MatrixSubspace::zero(2, 2).unwrap()),
        ("diagonal".to_string(), MatrixSubspace::diagonal(2).unwrap()),
    ];
    for (m, n) in [(2, 2), (3, 2)] {
        for k in 0..20 {
            family.push((
                format!("random{m}x{n}#{k}"),
                common::random_subspace(m, n, &mut rng),
            ));
        }
    }
    family
}

fn conformal_gap() -> Verdict {
    let space = MatrixSubspace::conformal();
    let start = Instant::now();
    let cert = space.rank1_gap(&SphereSearch::default());
    let elapsed = start.elapsed();

    let steps = 720;
    let mut oracle = f64::INFINITY;
    for i in 0..steps {
        let t = std::f64::consts::PI * i as f64 / steps as f64;
        let a = DVector::from_vec(vec![t.cos(), t.sin()]);
        for j in 0..steps {
            let s = std::f64::consts::PI * j as f64 / steps as f64;
            let b = DVector::from_vec(vec![s.cos(), s.sin()]);
            oracle = oracle.min(space.distance(&outer(&a, &b)).unwrap());
        }
    }
    let diff = (cert.gap - oracle).abs();
    let pass = diff < 1e-6 && elapsed < Duration::from_secs(5);
    (
        pass,
        format!(
            "λ = {:.10}, grid oracle {:.10}, 1/√2 = {:.10}, |Δ| = {} < 1e-6, optimizer {:?} < 5 s",
            cert.gap,
            oracle,
            std::f64::consts::FRAC_1_SQRT_2,
            sci(diff),
            elapsed
        ),
    )
}

fn mu_equals_gap_squared() -> Verdict {
    let start = Instant::now();
    let search = SphereSearch::default();
    let mut worst: f64 = 0.0;
    let mut worst_name = String::new();
    let family = subspace_family();
    for (name, space) in &family {
        let mu = space.coefficient_tensor(&search).mu();
        let gap = space.rank1_gap(&search).gap;
        let diff = (mu - gap * gap).abs();
        if diff >= worst {
            worst = diff;
            worst_name.clone_from(name);
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-6 && elapsed < Duration::from_secs(30);
    (
        pass,
        format!(
            "{} subspaces, max |μ − λ²| = {} ({worst_name}) < 1e-6, {elapsed:?} < 30 s",
            family.len(),
            sci(worst)
        ),
    )
}

fn quadratic_form_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let search = SphereSearch::default();
    let mut worst: f64 = 0.0;
    let family = subspace_family();
    for (_, space) in &family {
        let tensor = space.coefficient_tensor(&search);
        for _ in 0..1000 {
            let a = common::unit_vector(space.rows(), &mut rng);
            let b = common::unit_vector(space.cols(), &mut rng);
            let direct = tensor.quadratic_form(a.as_slice(), b.as_slice());
            let d = space.distance(&outer(&a, &b)).unwrap();
            worst = worst.max((direct - d * d).abs());
        }
    }
    (
        worst < 1e-10,
        format!(
            "{} subspaces × 1000 unit pairs, max deviation {} < 1e-10",
            family.len(),
            sci(worst)
        ),
    )
}

fn gauge_ftc() -> Verdict {
    let w = integrand_1d("x2sin_inv_x2").unwrap();
    let start = Instant::now();
    let r = hk_integrate_1d(w.f, w.a, w.b, &w.singular, 1e-6, &w.options).unwrap();
    let elapsed = start.elapsed();
    let err = (r.value - 1f64.sin()).abs();
    let sums = r.absolute_sum_history();
    let last = &sums[sums.len().saturating_sub(5)..];
    let growth: Vec<f64> = last.windows(2).map(|p| p[1] / p[0] - 1.0).collect();
    let diverging = last.len() == 5 && growth.iter().all(|g| *g > 0.10);
    let pass = r.converged && err < 1e-6 && diverging && elapsed < Duration::from_secs(10);
    (
        pass,
        format!(
            "value {:.12}, |value − sin 1| = {} < 1e-6, absolute sums over the last 5 levels [{}] grow by [{}] (> 10% each), {elapsed:?} < 10 s",
            r.value,
            sci(err),
            last.iter().map(|s| format!("{s:.4}")).collect::<Vec<_>>().join(", "),
            growth.iter().map(|g| format!("{:.1}%", 100.0 * g)).collect::<Vec<_>>().join(", "),
        ),
    )
}

fn divergence_theorem() -> Verdict {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for f in fields_2d() {
        let integral = divergence_integral_2d(
            f.div,
            &f.figure,
            &f.thin,
            1e-6,
            &f.options,
            Scheme::Iterated,
        )
        .unwrap();
        let flux = boundary_flux(f.v, &f.figure, 1e-10).unwrap();
        let diff = (integral.value - flux).abs();
        pass &= diff < 1e-5;
        parts.push(format!("{} |∫div − flux| = {}", f.name, sci(diff)));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    (
        pass,
        format!("{} (< 1e-5), {elapsed:?} < 60 s", parts.join(", ")),
    )
}

fn vanishing() -> Verdict {
    let enclosing = Cell::new([-2.0, -2.0], [2.0, 2.0]).unwrap();
    let opts = GaugeOptions::default();
    let radial_a = RadialBump::new([0.3, -0.2], 1.0);
    let product = ProductBump::new([-0.4, 0.25], 0.9);
    let radial_b = RadialBump::new([0.55, 0.5], 0.7);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for axis in 0..2 {
        let values = [
            verify_vanishing(&radial_a, axis, &enclosing, 1e-8, &opts)
                .unwrap()
                .value,
            verify_vanishing(&product, axis, &enclosing, 1e-8, &opts)
                .unwrap()
                .value,
            verify_vanishing(&radial_b, axis, &enclosing, 1e-8, &opts)
                .unwrap()
                .value,
        ];
        count += values.len();
        worst = values.iter().fold(worst, |w, v| w.max(v.abs()));
    }
    (
        worst < 1e-8,
        format!(
            "{count} integrals of ∂φ/∂x_i, max |value| = {} < 1e-8",
            sci(worst)
        ),
    )
}

fn mollified_inclusion() -> Verdict {
    let l = MatrixSubspace::conformal();
    let distances = |name: &str| -> (Vec<f64>, Vec<f64>) {
        let e = corpus_entry(name).unwrap();
        [65, 129, 257]
            .iter()
            .map(|&n| {
                let u = e.sample(n).unwrap();
                let rho = Mollifier::new(0.25, u.h()).unwrap();
                let du = finite_difference_gradient(&mollify(&u, &rho).unwrap()).unwrap();
                (u.h(), inclusion_distance(&du, &l).unwrap())
            })
            .unzip()
    };
    let (hs, quadratic) = distances("z2");
    let (_, cubic) = distances("z3");
    let order = empirical_order(&hs, &cubic).unwrap_or(f64::NAN);
    let fine = quadratic[2];
    let exact = quadratic.iter().all(|d| *d < 1e-10);
    let pass = fine < 1e-3 && exact && order >= 1.8;
    (
        pass,
        format!(
            "ε = 0.25; z² on 257²: {} < 1e-3, z² on 65²/129²/257²: [{}] (round-off, < 1e-10); z³: [{}], order {order:.3} ≥ 1.8",
            sci(fine),
            list(&quadratic),
            list(&cubic)
        ),
    )
}

fn weak_harmonicity() -> Verdict {
    let bumps = [
        RadialBump::new([0.1, -0.2], 0.5),
        RadialBump::new([-0.25, 0.15], 0.6),
    ];
    let product = ProductBump::new([0.2, 0.1], 0.5);
    let tests: Vec<&dyn TestFunction> = vec![&bumps[0], &bumps[1], &product];
    let grids = [65, 129, 257];
    let series = |u: &dyn Fn(usize) -> GridField| -> (Vec<f64>, Vec<f64>) {
        grids
            .iter()
            .map(|&n| {
                let field = u(n);
                (
                    field.h(),
                    weak_laplace_residual(&field, &tests).unwrap().max_abs,
                )
            })
            .unzip()
    };

    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["z2", "z3", "expz"] {
        let e = corpus_entry(name).unwrap();
        for (c, label) in [(0, "u"), (1, "v")] {
            let (hs, res) = series(&|n| e.sample(n).unwrap().component(c).unwrap());
            let order = empirical_order(&hs, &res).unwrap_or(f64::NAN);
            pass &= order >= 1.8;
            parts.push(format!("{name}.{label} order {order:.2}"));
        }
    }
    let (_, control) = series(&|n| GridField::square(n, 1, |p, out| out[0] = p[0] * p[0]).unwrap());
    let bounded = control.iter().all(|r| *r > 0.5 * control[0]);
    pass &= bounded;
    (
        pass,
        format!(
            "{} (each ≥ 1.8 over 65²/129²/257²); control x²: [{}] (> 0.5 × coarse)",
            parts.join(", "),
            list(&control)
        ),
    )
}

fn caccioppoli() -> Verdict {
    let bound = 0.75;
    let mut maxima = Vec::new();
    let mut pass = true;
    for n in [65, 129, 257] {
        let ratios: Vec<f64> = (1..=6)
            .map(|k| {
                let v = corpus_entry(&format!("zpow{k}"))
                    .unwrap()
                    .sample(n)
                    .unwrap();
                caccioppoli_ratio(&v, 0.5).unwrap()
            })
            .collect();
        pass &= ratios.iter().all(|r| *r <= bound * 1.05);
        maxima.push(ratios.iter().copied().fold(f64::MIN, f64::max));
    }
    let spread = maxima.iter().copied().fold(f64::MIN, f64::max)
        - maxima.iter().copied().fold(f64::MAX, f64::min);
    pass &= spread <= 1e-3;
    (
        pass,
        format!(
            "margin 0.5, z^k for k = 1..6: empirical c(U) on 65²/129²/257² = [{}] ≤ 0.75 (+5%), spread {} ≤ 1e-3",
            maxima.iter().map(|m| format!("{m:.6}")).collect::<Vec<_>>().join(", "),
            sci(spread)
        ),
    )
}

fn mean_value() -> Verdict {
    let center = [0.1, -0.05];
    let radii = [0.25, 0.5, 0.8];
    let mut pass = true;
    let mut worst_fraction: f64 = 0.0;
    for name in ["z2", "z3", "expz", "sinz"] {
        let e = corpus_entry(name).unwrap();
        for n in [65, 129, 257] {
            let u = e.sample(n).unwrap();
            let limit = 5.0 * u.h() * u.h() * e.max_second_derivative(&u).unwrap();
            for c in 0..2 {
                let devs = mean_value_check(&u.component(c).unwrap(), center, &radii).unwrap();
                for d in devs {
                    pass &= d < limit;
                    worst_fraction = worst_fraction.max(d / limit);
                }
            }
        }
    }
    let x2 = GridField::square(257, 1, |p, out| out[0] = p[0] * p[0]).unwrap();
    let dev = mean_value_check(&x2, [0.0, 0.0], &[0.25]).unwrap()[0];
    let rel = (dev - 0.03125).abs() / 0.03125;
    pass &= rel < 0.02;
    (
        pass,
        format!(
            "harmonic corpus: max deviation / (5h²·max|f″|) = {worst_fraction:.3e} < 1; x² at r = 0.25 on 257²: {dev:.8} vs r²/2 = 0.03125 (rel {} < 2%)",
            sci(rel)
        ),
    )
}

/// Dense LU solve of the 5-point Laplace Dirichlet problem for one scalar component.
fn five_point_oracle(data: &GridField, c: usize) -> Vec<f64> {
    let n = data.nx();
    let inner = n - 2;
    let index = |i: usize, j: usize| (j - 1) * inner + (i - 1);
    let mut a = DMatrix::<f64>::zeros(inner * inner, inner * inner);
    let mut rhs = DVector::<f64>::zeros(inner * inner);
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let row = index(i, j);
            a[(row, row)] = 4.0;
            for (ni, nj) in [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)] {
                if ni == 0 || nj == 0 || ni == n - 1 || nj == n - 1 {
                    rhs[row] += data.get(ni, nj, c);
                } else {
                    a[(row, index(ni, nj))] = -1.0;
                }
            }
        }
    }
    a.lu().solve(&rhs).expect("nonsingular").as_slice().to_vec()
}

fn elliptic_solve() -> Verdict {
    let search = SphereSearch::default();
    let conformal = MatrixSubspace::conformal().coefficient_tensor(&search);
    let opts = SolverOptions::default();
    let mut pass = true;

    let solve_errors = |name: &str, pass: &mut bool| -> (Vec<f64>, Vec<f64>) {
        let e = corpus_entry(name).unwrap();
        [33, 65, 129]
            .iter()
            .map(|&n| {
                let exact = e.sample(n).unwrap();
                let report = assemble_and_solve_system(&conformal, &exact, &opts).unwrap();
                *pass &= report.residual < opts.tol;
                (exact.h(), report.field.max_abs_diff(&exact).unwrap())
            })
            .unzip()
    };
    let (_, quadratic) = solve_errors("z2", &mut pass);
    let (hs, exponential) = solve_errors("expz", &mut pass);
    let order = empirical_order(&hs, &exponential).unwrap_or(f64::NAN);
    pass &= quadratic.iter().all(|e| *e < 1e-8) && order >= 1.8;

    let identity = MatrixSubspace::zero(2, 2)
        .unwrap()
        .coefficient_tensor(&search);
    let data = corpus_entry("expz").unwrap().sample(33).unwrap();
    let report = assemble_and_solve_system(&identity, &data, &opts).unwrap();
    let mut oracle_diff: f64 = 0.0;
    for c in 0..2 {
        let oracle = five_point_oracle(&data, c);
        for j in 1..32 {
            for i in 1..32 {
                let d = report.field.get(i, j, c) - oracle[(j - 1) * 31 + (i - 1)];
                oracle_diff = oracle_diff.max(d.abs());
            }
        }
    }
    pass &= oracle_diff < 1e-8 && report.residual < opts.tol;
    (
        pass,
        format!(
            "conformal tensor: z² errors on 33²/65²/129² [{}] (exact to solver tolerance, < 1e-8), exp z errors [{}], order {order:.3} ≥ 1.8; identity tensor vs dense 5-point oracle on 33²: {} < 1e-8; residuals < {}",
            list(&quadratic),
            list(&exponential),
            sci(oracle_diff),
            sci(opts.tol)
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("rank-1 gap of the conformal subspace", conformal_gap),
        (
            "ellipticity constant equals squared gap",
            mu_equals_gap_squared,
        ),
        ("quadratic form identity", quadratic_form_identity),
        ("gauge integral of an unbounded derivative", gauge_ftc),
        (
            "divergence theorem with a thin exceptional set",
            divergence_theorem,
        ),
        ("vanishing integrals of bump derivatives", vanishing),
        ("mollification preserves the inclusion", mollified_inclusion),
        ("weak harmonicity of holomorphic data", weak_harmonicity),
        ("Caccioppoli ratio bound", caccioppoli),
        ("mean value property", mean_value),
        ("constant coefficient elliptic solve", elliptic_solve),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(v) => v,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} {name}: {detail} [{:.2} s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
