//! Acceptance checks: one PASS/FAIL line per criterion, nonzero exit when any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dlap::cli::{
    within_relative, ERROR_REL_TOL, LAM1_5_HALF_K10_PREFIX, LAM1_5_HALF_RHO5, LAM2025_FIRST_SIX,
    LAM2025_VERTICES, TAU0_ABS_TOL, TAU0_TABLE,
};
use dlap::dense::{classify_eigenvalues, dense_deformed_laplacian};
use dlap::diagonalize::{caterpillar_outputs, count_caterpillar_eigenvalues, count_eigenvalues};
use dlap::limits::{laplacian_closed_form, margin_f, s_star, tau0};
use dlap::properties::{default_tolerance, sweep_shared, PropertyId, TreeSource};
use dlap::shearer::{
    beta_explicit, beta_sequence, convergence_report, epsilon_k, generate_auto, report_row, ReportRow,
    RunSpec, SChoice,
};
use dlap::tree::Tree;
use dlap::{PrecisionContext, Scalar};

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn ctx(digits: u32) -> PrecisionContext {
    PrecisionContext::new(digits).expect("valid precision")
}

fn sci(x: &Scalar) -> String {
    x.to_sig_string(6)
}

/// Collects failures within one criterion.
#[derive(Default)]
struct Failures(Vec<String>);

impl Failures {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.0.push(what.into());
        }
    }

    fn into_outcome(self, summary: String) -> Outcome {
        if self.0.is_empty() {
            pass(summary)
        } else {
            Outcome {
                ok: false,
                detail: format!("{summary}; failed: {}", self.0.join("; ")),
            }
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn tau0_table() -> Outcome {
    let c = ctx(50);
    let tol = c.parse(TAU0_ABS_TOL).unwrap();
    let rows: Vec<_> = TAU0_TABLE.iter().filter(|(s, _)| s.parse::<f64>().unwrap() <= 1.0).collect();
    let mut f = Failures::default();
    let (worst, elapsed) = timed(|| {
        let mut worst = c.zero();
        for (s, want) in &rows {
            let got = tau0(&c.parse(s).unwrap()).unwrap();
            let diff = (&got - c.parse(want).unwrap()).abs();
            f.check(diff <= tol, format!("s={s}: {} vs {want}", got.to_sig_string(12)));
            worst = worst.max(&diff).clone();
        }
        worst
    });
    f.check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"));
    f.into_outcome(format!("{} values, max |diff| {}, {elapsed:.2?}", rows.len(), sci(&worst)))
}

/// `printed <= value < printed + 10^-decimals`: every printed digit matches.
fn digits_match(value: &Scalar, printed: &str, c: &PrecisionContext) -> bool {
    let decimals = printed.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
    let p = c.parse(printed).unwrap();
    *value >= p && *value < p + c.pow10(-decimals)
}

fn s_star_values() -> Outcome {
    let c = ctx(50);
    let mut f = Failures::default();
    let mut shown = Vec::new();
    for (lambda, printed) in [("1.5", "0.17869088"), ("5.4", "0.6718978"), ("2025", "0.9990125897")] {
        let l = c.parse(lambda).unwrap();
        let s = s_star(&l).unwrap();
        let residual = margin_f(&s, &l).unwrap().abs();
        f.check(digits_match(&s, printed, &c), format!("s*({lambda}) = {}", s.to_sig_string(15)));
        f.check(residual < c.pow10(-30), format!("|F| = {} at lambda={lambda}", sci(&residual)));
        shown.push(format!("s*({lambda})={}", s.to_sig_string(12)));
    }
    f.into_outcome(shown.join(", "))
}

fn guo_consistency() -> Outcome {
    let c = ctx(50);
    let diff = (laplacian_closed_form(&c.one()) - tau0(&c.one()).unwrap()).abs();
    let mut f = Failures::default();
    f.check(diff < c.pow10(-9), "difference too large");
    f.into_outcome(format!("|diff| = {}", sci(&diff)))
}

fn error_rows(f: &mut Failures, rows: &[ReportRow], expected: &[(usize, &str)], c: &PrecisionContext) -> String {
    let rel = c.parse(ERROR_REL_TOL).unwrap();
    let mut shown = Vec::new();
    for (row, (k, want)) in rows.iter().zip(expected) {
        let want_v = c.parse(want).unwrap();
        f.check(
            within_relative(&row.error, &want_v, &rel),
            format!("k={k} error {} vs {want}", sci(&row.error)),
        );
        shown.push(format!("k={k}:{}", sci(&row.error)));
    }
    shown.join(" ")
}

fn shearer_table(lambda: &str, s: SChoice, counts: [u64; 5], expected: &[(usize, &str)], extra: bool) -> Outcome {
    let c = ctx(50);
    let spec = RunSpec::new(lambda, s);
    let ks: Vec<usize> = expected.iter().map(|r| r.0).collect();
    let (rows, elapsed) = timed(|| convergence_report(&spec, &ks, 15, &c));
    let rows = match rows {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                ok: false,
                detail: e.to_string(),
            }
        }
    };
    let mut f = Failures::default();
    f.check(rows[0].counts == counts, format!("k=5 counts {:?}", rows[0].counts));
    if extra {
        f.check(rows[1].counts[..] == LAM1_5_HALF_K10_PREFIX, format!("k=10 counts {:?}", rows[1].counts));
        let rho5 = c.parse(LAM1_5_HALF_RHO5).unwrap();
        f.check(
            (&rows[0].rho - rho5).abs() <= c.pow10(-12),
            format!("rho(T_5) = {}", rows[0].rho.to_sig_string(16)),
        );
        f.check(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"));
    }
    let shown = error_rows(&mut f, &rows, expected, &c);
    f.into_outcome(format!("{shown}, {elapsed:.2?}"))
}

fn lam2025() -> Outcome {
    let c = ctx(250);
    let spec = RunSpec::new("2025", SChoice::StarOver(2));
    let (row, elapsed) = timed(|| report_row(&spec, 150, 15, &c));
    let row = match row {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                ok: false,
                detail: e.to_string(),
            }
        }
    };
    let mut f = Failures::default();
    f.check(
        row.vertex_count == LAM2025_VERTICES,
        format!("vertex count {} vs {LAM2025_VERTICES}", row.vertex_count),
    );
    f.check(row.counts[..6] == LAM2025_FIRST_SIX, format!("first six {:?}", &row.counts[..6]));
    f.check(
        row.error > c.pow10(-195) && row.error < c.pow10(-190),
        format!("error {} outside (1e-195, 1e-190)", sci(&row.error)),
    );
    f.check(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"));
    f.into_outcome(format!(
        "vertices {}, error {}, digits {}, {elapsed:.2?}",
        row.vertex_count,
        sci(&row.error),
        row.digits
    ))
}

const ORACLE_S: [&str; 7] = ["-1.5", "-1", "-0.3", "0", "0.3", "1", "1.5"];

/// Probe points for one spectrum: fixed values, points between eigenvalues
/// and points just off each eigenvalue.
fn probe_points(c: &PrecisionContext, s: &Scalar, eigs: &[Scalar], rng: &mut ChaCha8Rng) -> Vec<Scalar> {
    let mut pts = vec![c.zero(), c.one(), s.square() + 1i64];
    let off = c.pow10(-20);
    for w in eigs.windows(2) {
        if &w[1] - &w[0] > c.pow10(-10) {
            pts.push(Scalar::midpoint(&w[0], &w[1]));
        }
    }
    let e = &eigs[rng.gen_range(0..eigs.len())];
    pts.push(e + &off);
    pts.push(e - &off);
    pts.push(c.from_f64(rng.gen_range(-3.0..8.0)));
    pts
}

fn oracle_case(c: &PrecisionContext, t: &Tree, s: &Scalar, rng: &mut ChaCha8Rng, f: &mut Failures) -> usize {
    let cluster = c.pow10(-30);
    let eigs = dense_deformed_laplacian(t, s).unwrap().eigenvalues();
    let pts = probe_points(c, s, &eigs, rng);
    for p in &pts {
        let fast = count_eigenvalues(t, s, p);
        let dense = classify_eigenvalues(&eigs, p, &cluster);
        let fast = (fast.greater as usize, fast.smaller as usize, fast.equal as usize);
        f.check(
            fast == dense,
            format!("n={} s={} c={}: {fast:?} vs {dense:?}", t.vertex_count(), s.to_sig_string(4), sci(p)),
        );
    }
    pts.len()
}

fn oracle_inertia() -> Outcome {
    let c = ctx(50);
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    let mut f = Failures::default();
    let grid: Vec<Scalar> = ORACLE_S.iter().map(|s| c.parse(s).unwrap()).collect();
    let mut random_cases = 0;
    let mut probes = 0;
    for _ in 0..240 {
        let n = rng.gen_range(2..=12);
        let t = dlap::properties::random_tree(n, &mut rng).unwrap();
        let s = grid[rng.gen_range(0..grid.len())].clone();
        probes += oracle_case(&c, &t, &s, &mut rng, &mut f);
        random_cases += 1;
    }
    let trees = TreeSource::Exhaustive { max_n: 8 }.generate().unwrap();
    for t in &trees {
        for s in &grid {
            probes += oracle_case(&c, t, s, &mut rng, &mut f);
        }
    }
    f.into_outcome(format!(
        "{random_cases} random trees, {} exhaustive trees x {} s values, {probes} probes",
        trees.len(),
        grid.len()
    ))
}

fn property_sweep() -> Outcome {
    let c = ctx(50);
    let tol = default_tolerance(&c);
    let trees = TreeSource::Exhaustive { max_n: 8 }.generate().unwrap();
    let grid: Vec<Scalar> = ["-1.5", "-1", "-0.9", "-0.3", "0.3", "0.9", "1", "1.5"]
        .iter()
        .map(|s| c.parse(s).unwrap())
        .collect();
    let ids = PropertyId::ALL;
    let reports = match sweep_shared(&ids, &trees, &grid, &tol) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                ok: false,
                detail: e.to_string(),
            }
        }
    };
    let mut f = Failures::default();
    let mut checked = 0;
    for r in &reports {
        match r.holds() {
            Some(true) => checked += 1,
            Some(false) => f.check(false, format!("{} on {} at s={}", r.property, r.tree, r.s)),
            None => {}
        }
    }
    f.into_outcome(format!(
        "{checked} applicable checks over {} trees, tol {}",
        trees.len(),
        sci(&tol)
    ))
}

/// Central difference of `b_j(eps)` at `eps = 0`, divided by `-b_j(0)`.
fn fd_betas(run: &dlap::shearer::ShearerRun, c: &PrecisionContext) -> Vec<Scalar> {
    let h = c.pow10(-60);
    let cat = run.caterpillar();
    let plus = caterpillar_outputs(&cat, &run.s, &(&run.lambda - &h)).unwrap();
    let minus = caterpillar_outputs(&cat, &run.s, &(&run.lambda + &h)).unwrap();
    plus.iter()
        .zip(&minus)
        .zip(&run.b_trace)
        .map(|((p, m), b)| (p - m) / (&h * 2i64) / -b)
        .collect()
}

fn diagnostics_chain() -> Outcome {
    let spec = RunSpec::new("5.4", SChoice::StarOver(2));
    let c = ctx(120);
    let fd_ctx = ctx(200);
    let mut f = Failures::default();
    let mut worst_fd = 0.0f64;
    let mut worst_sum = fd_ctx.zero();
    for k in 2..=20 {
        let (run, _) = generate_auto(&spec, k, &c).unwrap();
        let row = report_row(&spec, k, 20, &c).unwrap();
        let bound = epsilon_k(&run, 25).unwrap();
        let cat = run.caterpillar();
        let below = &run.lambda - &bound.epsilon;
        f.check(
            count_caterpillar_eigenvalues(&cat, &run.s, &below).greater >= 1,
            format!("k={k}: lambda - epsilon_k not below rho"),
        );
        f.check(bound.certified, format!("k={k}: bracket ended on an exact zero"));
        // the radius bracket puts lambda - rho in [lambda - high, lambda - low)
        let gap_low = &run.lambda - &row.radius.high;
        f.check(gap_low < bound.epsilon, format!("k={k}: gap {} >= epsilon {}", sci(&gap_low), sci(&bound.epsilon)));
        let agreement = ((&row.error - &bound.epsilon) / &bound.epsilon).abs();
        f.check(agreement < c.pow10(-18), format!("k={k}: gap and epsilon differ by {}", sci(&agreement)));
        let inv_beta = run.beta_trace[k - 1].recip();
        f.check(bound.epsilon <= inv_beta, format!("k={k}: epsilon {} > 1/beta {}", sci(&bound.epsilon), sci(&inv_beta)));

        let (fine, _) = generate_auto(&spec, k, &fd_ctx).unwrap();
        f.check(fine.counts == run.counts, format!("k={k}: counts depend on precision"));
        let rec = beta_sequence(&fine).unwrap();
        let exp = beta_explicit(&fine).unwrap();
        for (a, b) in rec.iter().zip(&exp) {
            let d = (a - b).abs();
            f.check(d < fd_ctx.pow10(-30), format!("k={k}: recurrence and sum differ by {}", sci(&d)));
            worst_sum = worst_sum.max(&d).clone();
        }
        for (j, (fd, beta)) in fd_betas(&fine, &fd_ctx).iter().zip(&rec).enumerate() {
            let rel = ((fd - beta) / beta).abs();
            worst_fd = worst_fd.max(rel.to_f64());
            f.check(rel < fd_ctx.pow10(-10), format!("k={k} j={}: finite difference off by {}", j + 1, sci(&rel)));
        }
    }
    f.into_outcome(format!(
        "k=2..20; max |recurrence - sum| {}, max finite-difference rel {worst_fd:.2e}",
        sci(&worst_sum)
    ))
}

fn near_laplacian() -> Outcome {
    let c = ctx(50);
    let spec = RunSpec::new("5.4", SChoice::Value("0.999".into()));
    let row = report_row(&spec, 150, 15, &c).unwrap();
    let want = c.parse("3.43e-2").unwrap();
    let mut f = Failures::default();
    f.check(row.error > c.pow10(-2), "error not above 1e-2");
    f.check(within_relative(&row.error, &want, &c.parse("0.1").unwrap()), "error not within 10% of 3.43e-2");
    f.into_outcome(format!("error {} (rho {})", sci(&row.error), row.rho.to_sig_string(11)))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("tau0 table", tau0_table),
        ("s* values and margin residuals", s_star_values),
        ("Laplacian closed form equals tau0(1)", guo_consistency),
        ("lambda=1.5 s=s*/2 table", || {
            shearer_table(
                "1.5",
                SChoice::StarOver(2),
                [20, 4, 0, 2, 9],
                &[(5, "1.72831041e-7"), (10, "7.65e-13"), (20, "2.68e-23"), (30, "2.33e-34"), (50, "7.26e-55")],
                true,
            )
        }),
        ("lambda=1.5 s=s* table", || {
            shearer_table(
                "1.5",
                SChoice::StarOver(1),
                [4, 1, 0, 1, 2],
                &[(5, "1.459e-3"), (10, "1.332e-4"), (20, "4.035e-7"), (50, "7.013e-17"), (80, "1.704e-26")],
                false,
            )
        }),
        ("lambda=5.4 s=s*/2 table", || {
            shearer_table(
                "5.4",
                SChoice::StarOver(2),
                [31, 23, 9, 17, 23],
                &[(5, "2.18e-7"), (10, "5.05e-14"), (20, "4.10e-24"), (50, "2.18e-57"), (80, "2.43e-75")],
                false,
            )
        }),
        ("lambda=2025 run", lam2025),
        ("inertia counts match the dense eigensolver", oracle_inertia),
        ("property sweep", property_sweep),
        ("diagnostics chain at lambda=5.4", diagnostics_chain),
        ("near-Laplacian stall at s=0.999", near_laplacian),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (outcome, elapsed) = timed(check);
        let status = if outcome.ok { "PASS" } else { "FAIL" };
        if !outcome.ok {
            failed += 1;
        }
        println!("{status} criterion {}: {name} ({}) [{elapsed:.2?}]", i + 1, outcome.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
