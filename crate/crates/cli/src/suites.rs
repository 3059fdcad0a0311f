//! The checks behind each command.

use anyhow::{bail, Context, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use rigidity_core::bump::{ProductBump, RadialBump, TestFunction};
use rigidity_core::elliptic_lab::{
    assemble_and_solve_system, caccioppoli_ratio, cauchy_riemann_residual, corpus_entry,
    empirical_order, finite_difference_gradient, inclusion_distance, mean_value_check, mollify,
    weak_laplace_residual, CorpusEntry, GridField, Mollifier, SolverOptions,
};
use rigidity_core::gauge_integral::{
    boundary_flux, divergence_integral_2d, field_2d, fields_2d, hk_integrate_1d, integrand_1d,
    integrands_1d, Field2d, IntegralResult, Integrand1d, Scheme,
};
use rigidity_core::matrix_space::{
    outer, Component, MatrixSubspace, SphereSearch, DEFAULT_RANK1_TOL,
};

use crate::config::{Command, RunConfig};
use crate::report::{Check, Provenance, Series};

/// Exponent every convergence check must reach.
const MIN_ORDER: f64 = 1.8;
/// Errors below this are round-off; a rate cannot be read from them.
const ROUND_OFF: f64 = 1e-10;

pub type TaskFn<'a> = Box<dyn Fn() -> Result<Vec<Check>> + Send + Sync + 'a>;

/// A named unit of work producing one or more checks.
pub struct Task<'a> {
    pub name: String,
    pub run: TaskFn<'a>,
}

impl<'a> Task<'a> {
    fn new(
        name: impl Into<String>,
        run: impl Fn() -> Result<Vec<Check>> + Send + Sync + 'a,
    ) -> Self {
        Self {
            name: name.into(),
            run: Box::new(run),
        }
    }
}

pub fn tasks(cfg: &RunConfig) -> Vec<Task<'_>> {
    match cfg.command {
        Command::AnalyzeSpace => vec![Task::new("analyze-space", move || analyze_space(cfg))],
        Command::Integrate => integrate_tasks(cfg),
        Command::Divergence => divergence_tasks(cfg),
        Command::Regularity => regularity_tasks(cfg),
        Command::Caccioppoli => vec![Task::new("caccioppoli", move || caccioppoli(cfg))],
        Command::Weyl => weyl_tasks(cfg),
        Command::FullSuite => {
            let mut all = vec![Task::new("analyze-space", move || analyze_space(cfg))];
            all.extend(integrate_tasks(cfg));
            all.extend(divergence_tasks(cfg));
            all.extend(regularity_tasks(cfg));
            all.push(Task::new("caccioppoli", move || caccioppoli(cfg)));
            all.extend(weyl_tasks(cfg));
            all
        }
    }
}

/// Runs every task, on separate threads if asked, keeping declaration order.
pub fn run_tasks(tasks: &[Task<'_>], parallel: bool) -> Result<Vec<Check>> {
    let results: Vec<Result<Vec<Check>>> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = tasks.iter().map(|t| scope.spawn(|| (t.run)())).collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| bail!("worker thread panicked")))
                .collect()
        })
    } else {
        tasks.iter().map(|t| (t.run)()).collect()
    };
    let mut checks = Vec::new();
    for (task, result) in tasks.iter().zip(results) {
        checks.extend(result.with_context(|| format!("check `{}` failed", task.name))?);
    }
    Ok(checks)
}

/// An exactness check when every error is round-off, else an order check.
fn order_or_exact(name: String, hs: &[f64], errors: &[f64], series: Series) -> Check {
    let worst = errors.iter().copied().fold(0.0, f64::max);
    let check = if worst < ROUND_OFF {
        Check::within(
            format!("{name}/exact"),
            worst,
            0.0,
            Provenance::Derived,
            ROUND_OFF,
        )
    } else {
        let order = empirical_order(hs, errors).unwrap_or(f64::NAN);
        Check::at_least(
            format!("{name}/order"),
            order,
            MIN_ORDER,
            Provenance::Stated,
        )
    };
    check.with_series(series)
}

fn gaussian(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

fn unit(rng: &mut ChaCha8Rng, len: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_vec(gaussian(rng, len));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Unit vectors in `ℝ^d` up to sign, with the covering radius of the set
/// (`None` when the points are random and no radius is known).
fn sphere_points(d: usize, rng: &mut ChaCha8Rng) -> (Vec<DVector<f64>>, Option<f64>) {
    use std::f64::consts::PI;
    match d {
        1 => (vec![DVector::from_element(1, 1.0)], Some(0.0)),
        2 => {
            let n = 4000;
            let pts = (0..n)
                .map(|i| {
                    let t = PI * i as f64 / n as f64;
                    DVector::from_vec(vec![t.cos(), t.sin()])
                })
                .collect();
            (pts, Some(PI / (2.0 * n as f64)))
        }
        3 => {
            let (nt, np) = (300, 600);
            let mut pts = Vec::with_capacity(nt * np);
            for i in 0..nt {
                let theta = 0.5 * PI * i as f64 / (nt - 1) as f64;
                for j in 0..np {
                    let phi = 2.0 * PI * j as f64 / np as f64;
                    pts.push(DVector::from_vec(vec![
                        theta.cos(),
                        theta.sin() * phi.cos(),
                        theta.sin() * phi.sin(),
                    ]));
                }
            }
            let dt = 0.5 * PI / (nt - 1) as f64;
            let dp = 2.0 * PI / np as f64;
            (pts, Some(0.5 * (dt + dp)))
        }
        _ => ((0..50_000).map(|_| unit(rng, d)).collect(), None),
    }
}

/// `min_b |A(a ⊗ b)|²` for fixed unit `a`, from the smallest eigenvalue of
/// `|a|² I − Σ_k B_kᵀ a aᵀ B_k` (or its transpose when `a` lives on columns).
fn profile(space: &MatrixSubspace, a: &DVector<f64>, a_on_rows: bool) -> f64 {
    let dim = if a_on_rows {
        space.cols()
    } else {
        space.rows()
    };
    let mut k = DMatrix::identity(dim, dim);
    for basis in space.basis() {
        let c = if a_on_rows {
            basis.transpose() * a
        } else {
            basis * a
        };
        k -= &c * c.transpose();
    }
    SymmetricEigen::new(k).eigenvalues.min().max(0.0)
}

fn analyze_space(cfg: &RunConfig) -> Result<Vec<Check>> {
    let space = cfg.subspace();
    let search = SphereSearch::default().with_seed(cfg.seed);
    let cert = space.rank1_gap(&search);
    let lambda = cert.gap;
    let tensor = space.coefficient_tensor(&search);
    let mu = tensor.mu();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    let a_on_rows = space.rows() <= space.cols();
    let d = space.rows().min(space.cols());
    let (points, radius) = sphere_points(d, &mut rng);
    let oracle = points
        .iter()
        .map(|a| profile(&space, a, a_on_rows))
        .fold(f64::INFINITY, f64::min);
    checks.push(match radius {
        Some(r) => Check::within(
            "analyze-space/gap_squared_vs_sphere_grid",
            lambda * lambda,
            oracle,
            Provenance::Derived,
            2.0 * r + 1e-12,
        ),
        None => Check::at_most(
            "analyze-space/gap_squared_vs_sphere_samples",
            lambda * lambda,
            oracle,
            Provenance::Derived,
            1e-12,
        ),
    });

    checks.push(Check::within(
        "analyze-space/mu_equals_gap_squared",
        mu,
        lambda * lambda,
        Provenance::Stated,
        1e-6,
    ));

    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = unit(&mut rng, space.rows());
        let b = unit(&mut rng, space.cols());
        let dist = space.distance(&outer(&a, &b))?;
        worst = worst.max((tensor.quadratic_form(a.as_slice(), b.as_slice()) - dist * dist).abs());
    }
    checks.push(Check::within(
        "analyze-space/quadratic_form_identity",
        worst,
        0.0,
        Provenance::Derived,
        1e-10,
    ));

    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let x = DMatrix::from_vec(
            space.rows(),
            space.cols(),
            gaussian(&mut rng, space.rows() * space.cols()),
        );
        let on = space.project(&x, Component::L)?;
        let off = space.project(&x, Component::LPerp)?;
        let split = on.norm_squared() + off.norm_squared() - x.norm_squared();
        worst = worst.max(split.abs() / x.norm_squared());
    }
    checks.push(Check::within(
        "analyze-space/pythagoras",
        worst,
        0.0,
        Provenance::Trivial,
        1e-12,
    ));

    let projection = if tensor.is_projection(1e-12) {
        1.0
    } else {
        0.0
    };
    checks.push(Check::within(
        "analyze-space/tensor_is_projection",
        projection,
        1.0,
        Provenance::Trivial,
        0.0,
    ));

    let threshold = cfg.tol.unwrap_or(DEFAULT_RANK1_TOL);
    let (connected, _) = space.has_rank1_connection(threshold, &search);
    let connected = if connected { 1.0 } else { 0.0 };
    if cfg.space.is_none() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        checks.push(Check::within(
            "analyze-space/rank1_gap",
            lambda,
            r,
            Provenance::Derived,
            1e-6,
        ));
        checks.push(Check::within(
            "analyze-space/legendre_hadamard_constant",
            mu,
            0.5,
            Provenance::Derived,
            1e-6,
        ));
        checks.push(Check::within(
            "analyze-space/has_rank1_connection",
            connected,
            0.0,
            Provenance::Derived,
            0.0,
        ));
    } else {
        let decided = if lambda < threshold { 1.0 } else { 0.0 };
        checks.push(Check::within(
            "analyze-space/rank1_gap",
            lambda,
            lambda,
            Provenance::Trivial,
            0.0,
        ));
        checks.push(Check::within(
            "analyze-space/has_rank1_connection",
            connected,
            decided,
            Provenance::Trivial,
            0.0,
        ));
    }
    Ok(checks)
}

fn levels_series(r: &IntegralResult, reference: f64) -> Series {
    let hs = r.history.iter().map(|l| l.h).collect();
    Series::log_log("h", hs)
        .with(
            "|sum - reference|",
            r.value_history()
                .iter()
                .map(|v| (v - reference).abs())
                .collect(),
        )
        .with("absolute sum", r.absolute_sum_history())
}

fn integrate_one(cfg: &RunConfig, w: &Integrand1d) -> Result<Vec<Check>> {
    let tol = cfg.tol.unwrap_or(1e-6);
    let mut opts = w.options.clone();
    opts.initial_h = cfg.h;
    let r = hk_integrate_1d(w.f, w.a, w.b, &w.singular, tol, &opts)?;
    let name = format!("integrate/{}", w.name);
    let mut checks = vec![
        Check::within(name.clone(), r.value, w.exact, Provenance::Derived, tol)
            .with_series(levels_series(&r, w.exact)),
        Check::within(
            format!("{name}/converged"),
            f64::from(u8::from(r.converged)),
            1.0,
            Provenance::Trivial,
            0.0,
        ),
    ];
    if !w.singular.is_empty() {
        let sums = r.absolute_sum_history();
        let last = &sums[sums.len().saturating_sub(5)..];
        let growth = last
            .windows(2)
            .map(|p| p[1] / p[0] - 1.0)
            .fold(f64::INFINITY, f64::min);
        let growth = if last.len() == 5 { growth } else { f64::NAN };
        checks.push(Check::at_least(
            format!("{name}/absolute_sum_growth"),
            growth,
            0.10,
            Provenance::Derived,
        ));
    }
    Ok(checks)
}

fn integrate_tasks(cfg: &RunConfig) -> Vec<Task<'_>> {
    let selected: Vec<Integrand1d> = match (&cfg.command, &cfg.corpus) {
        (Command::Integrate, Some(name)) => integrand_1d(name).into_iter().collect(),
        _ => integrands_1d(),
    };
    selected
        .into_iter()
        .map(|w| {
            Task::new(format!("integrate/{}", w.name), move || {
                integrate_one(cfg, &w)
            })
        })
        .collect()
}

fn divergence_one(cfg: &RunConfig, f: &Field2d) -> Result<Vec<Check>> {
    let tol = cfg.tol.unwrap_or(1e-6);
    let mut opts = f.options.clone();
    opts.initial_h = cfg.h;
    let integral = divergence_integral_2d(f.div, &f.figure, &f.thin, tol, &opts, Scheme::Iterated)?;
    let flux = boundary_flux(f.v, &f.figure, 1e-10)?;
    let name = format!("divergence/{}", f.name);
    Ok(vec![
        Check::within(name.clone(), integral.value, flux, Provenance::Stated, 1e-5)
            .with_series(levels_series(&integral, flux)),
        Check::within(
            format!("{name}/flux"),
            flux,
            f.exact,
            Provenance::Derived,
            1e-8,
        ),
    ])
}

fn divergence_tasks(cfg: &RunConfig) -> Vec<Task<'_>> {
    let selected: Vec<Field2d> = match (&cfg.command, &cfg.corpus) {
        (Command::Divergence, Some(name)) => field_2d(name).into_iter().collect(),
        _ => fields_2d(),
    };
    selected
        .into_iter()
        .map(|f| {
            Task::new(format!("divergence/{}", f.name), move || {
                divergence_one(cfg, &f)
            })
        })
        .collect()
}

fn entries(cfg: &RunConfig, command: Command, defaults: &[&str]) -> Vec<CorpusEntry> {
    match (&cfg.corpus, cfg.command == command) {
        (Some(name), true) => corpus_entry(name).into_iter().collect(),
        _ => defaults.iter().filter_map(|n| corpus_entry(n)).collect(),
    }
}

fn test_functions() -> (Vec<RadialBump>, ProductBump) {
    (
        vec![
            RadialBump::new([0.1, -0.2], 0.5),
            RadialBump::new([-0.25, 0.15], 0.6),
        ],
        ProductBump::new([0.2, 0.1], 0.5),
    )
}

fn weak_residuals(u: &GridField) -> Result<f64> {
    let (radial, product) = test_functions();
    let tests: Vec<&dyn TestFunction> = vec![&radial[0], &radial[1], &product];
    Ok(weak_laplace_residual(u, &tests)?.max_abs)
}

fn regularity_one(cfg: &RunConfig, e: &CorpusEntry) -> Result<Vec<Check>> {
    let l = MatrixSubspace::conformal();
    let name = format!("regularity/{}", e.name());
    let mut hs = Vec::new();
    let (mut raw, mut smooth, mut cr) = (Vec::new(), Vec::new(), Vec::new());
    let (mut weak_u, mut weak_v, mut solve) = (Vec::new(), Vec::new(), Vec::new());
    let tensor = l.coefficient_tensor(&SphereSearch::default().with_seed(cfg.seed));
    for &n in &cfg.grids {
        let u = e.sample(n)?;
        let rho = Mollifier::new(cfg.epsilon, u.h())?;
        hs.push(u.h());
        raw.push(inclusion_distance(&finite_difference_gradient(&u)?, &l)?);
        smooth.push(inclusion_distance(
            &finite_difference_gradient(&mollify(&u, &rho)?)?,
            &l,
        )?);
        let (re, im) = (u.component(0)?, u.component(1)?);
        cr.push(cauchy_riemann_residual(&re, &im)?);
        if e.is_holomorphic() {
            weak_u.push(weak_residuals(&re)?);
            weak_v.push(weak_residuals(&im)?);
            let report = assemble_and_solve_system(&tensor, &u, &SolverOptions::default())?;
            solve.push(report.field.max_abs_diff(&u)?);
        }
    }
    let inclusion_series = Series::log_log("h", hs.clone())
        .with("mollified distance", smooth.clone())
        .with("raw distance", raw.clone());
    let cr_series = Series::log_log("h", hs.clone()).with("Cauchy-Riemann residual", cr.clone());
    let last = hs.len() - 1;

    if !e.is_holomorphic() {
        return Ok(vec![
            Check::at_most(
                format!("{name}/mollified_inclusion_nonincrease"),
                smooth[last],
                raw[last],
                Provenance::Derived,
                ROUND_OFF,
            )
            .with_series(inclusion_series),
            Check::at_least(
                format!("{name}/cauchy_riemann_violation"),
                cr[last],
                0.5 * cr[0],
                Provenance::Derived,
            )
            .with_series(cr_series),
        ]);
    }
    Ok(vec![
        order_or_exact(
            format!("{name}/mollified_inclusion"),
            &hs,
            &smooth,
            inclusion_series,
        ),
        Check::at_most(
            format!("{name}/mollified_inclusion_fine"),
            smooth[last],
            0.0,
            Provenance::Stated,
            1e-3,
        ),
        order_or_exact(format!("{name}/cauchy_riemann"), &hs, &cr, cr_series),
        order_or_exact(
            format!("{name}/weak_laplace_u"),
            &hs,
            &weak_u,
            Series::log_log("h", hs.clone()).with("max |h^2 sum lap(phi) u|", weak_u.clone()),
        ),
        order_or_exact(
            format!("{name}/weak_laplace_v"),
            &hs,
            &weak_v,
            Series::log_log("h", hs.clone()).with("max |h^2 sum lap(phi) v|", weak_v.clone()),
        ),
        order_or_exact(
            format!("{name}/elliptic_solve"),
            &hs,
            &solve,
            Series::log_log("h", hs.clone()).with("max error", solve.clone()),
        ),
    ])
}

fn weak_control(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut hs = Vec::new();
    let mut res = Vec::new();
    for &n in &cfg.grids {
        let u = GridField::square(n, 1, |p, out| out[0] = p[0] * p[0])?;
        hs.push(u.h());
        res.push(weak_residuals(&u)?);
    }
    let last = res[res.len() - 1];
    Ok(vec![Check::at_least(
        "regularity/control_x2/weak_laplace",
        last,
        0.5 * res[0],
        Provenance::Derived,
    )
    .with_series(
        Series::log_log("h", hs).with("max |h^2 sum lap(phi) x^2|", res),
    )])
}

fn field_inclusion(cfg: &RunConfig, field: &GridField) -> Result<Vec<Check>> {
    let space = cfg.subspace();
    if space.cols() != 2 || space.rows() != field.components() {
        bail!(
            "field has {} components but the subspace holds {}×{} matrices",
            field.components(),
            space.rows(),
            space.cols()
        );
    }
    let d = inclusion_distance(&finite_difference_gradient(field)?, &space)?;
    Ok(vec![Check::within(
        "regularity/field/inclusion",
        d,
        0.0,
        Provenance::Derived,
        cfg.tol.unwrap_or(1e-6),
    )])
}

fn regularity_tasks(cfg: &RunConfig) -> Vec<Task<'_>> {
    let mut tasks: Vec<Task<'_>> = entries(
        cfg,
        Command::Regularity,
        &["z2", "z3", "expz", "sinz", "nonholo1"],
    )
    .into_iter()
    .map(|e| {
        Task::new(format!("regularity/{}", e.name()), move || {
            regularity_one(cfg, &e)
        })
    })
    .collect();
    if cfg.corpus.is_none() || cfg.command != Command::Regularity {
        tasks.push(Task::new("regularity/control_x2", move || {
            weak_control(cfg)
        }));
    }
    if let Some(field) = &cfg.field {
        tasks.push(Task::new("regularity/field", move || {
            field_inclusion(cfg, field)
        }));
    }
    tasks
}

fn caccioppoli(cfg: &RunConfig) -> Result<Vec<Check>> {
    let m = cfg.margin;
    let bound = 3.0 * (1.0 - m) * (1.0 - m);
    let ks: Vec<f64> = (1..=6).map(f64::from).collect();
    let mut per_grid = Vec::new();
    for &n in &cfg.grids {
        let mut ratios = Vec::new();
        for k in 1..=6 {
            let v = corpus_entry(&format!("zpow{k}"))
                .context("zpow corpus entry")?
                .sample(n)?;
            ratios.push(caccioppoli_ratio(&v, m)?);
        }
        per_grid.push((n, ratios));
    }
    let mut checks = Vec::new();
    let mut series = Series::linear("k", ks);
    for (n, ratios) in &per_grid {
        series = series.with(&format!("ratio on {n}x{n}"), ratios.clone());
    }
    let maxima: Vec<f64> = per_grid
        .iter()
        .map(|(_, r)| r.iter().copied().fold(f64::MIN, f64::max))
        .collect();
    let overall = maxima.iter().copied().fold(f64::MIN, f64::max);
    checks.push(
        Check::at_most(
            "caccioppoli/zpow_bound",
            overall,
            bound,
            Provenance::Derived,
            0.05 * bound,
        )
        .with_series(series),
    );
    let spread = overall - maxima.iter().copied().fold(f64::MAX, f64::min);
    checks.push(Check::at_most(
        "caccioppoli/empirical_constant_spread",
        spread,
        0.0,
        Provenance::Derived,
        1e-3,
    ));
    let (n, fine) = per_grid.last().expect("three grids");
    let h = 2.0 / (*n - 1) as f64;
    checks.push(Check::within(
        "caccioppoli/affine_closed_form",
        fine[0],
        bound,
        Provenance::Derived,
        4.0 * h,
    ));
    Ok(checks)
}

const MEAN_VALUE_CENTER: [f64; 2] = [0.1, -0.05];
const MEAN_VALUE_RADII: [f64; 3] = [0.25, 0.5, 0.8];

fn weyl_one(cfg: &RunConfig, e: &CorpusEntry) -> Result<Vec<Check>> {
    let (mut hs, mut devs, mut limits) = (Vec::new(), Vec::new(), Vec::new());
    let mut worst_fraction: f64 = 0.0;
    for &n in &cfg.grids {
        let u = e.sample(n)?;
        let second = e
            .max_second_derivative(&u)
            .with_context(|| format!("{} is not harmonic", e.name()))?;
        let limit = 5.0 * u.h() * u.h() * second;
        let mut worst: f64 = 0.0;
        for c in 0..2 {
            for d in mean_value_check(&u.component(c)?, MEAN_VALUE_CENTER, &MEAN_VALUE_RADII)? {
                worst = worst.max(d);
            }
        }
        hs.push(u.h());
        devs.push(worst);
        limits.push(limit);
        worst_fraction = worst_fraction.max(if limit > 0.0 {
            worst / limit
        } else {
            worst / f64::MIN_POSITIVE
        });
    }
    let series = Series::log_log("h", hs)
        .with("max deviation", devs)
        .with("5 h^2 max|f''|", limits);
    Ok(vec![Check::at_most(
        format!("weyl/{}", e.name()),
        worst_fraction,
        1.0,
        Provenance::Stated,
        0.0,
    )
    .with_series(series)])
}

fn weyl_closed_form(cfg: &RunConfig) -> Result<Vec<Check>> {
    let n = cfg.grids[2];
    let u = GridField::square(n, 1, |p, out| out[0] = p[0] * p[0])?;
    let dev = mean_value_check(&u, [0.0, 0.0], &[0.25])?[0];
    Ok(vec![Check::within(
        "weyl/x2_closed_form",
        dev,
        0.03125,
        Provenance::Derived,
        0.02 * 0.03125,
    )])
}

fn weyl_tasks(cfg: &RunConfig) -> Vec<Task<'_>> {
    let mut tasks: Vec<Task<'_>> = entries(cfg, Command::Weyl, &["z2", "z3", "expz", "sinz"])
        .into_iter()
        .map(|e| Task::new(format!("weyl/{}", e.name()), move || weyl_one(cfg, &e)))
        .collect();
    tasks.push(Task::new("weyl/x2_closed_form", move || {
        weyl_closed_form(cfg)
    }));
    tasks
}
