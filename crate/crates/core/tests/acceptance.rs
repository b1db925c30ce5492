//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use ervl::densities::{
    coeff_sequence, coeff_sequence_x, density_measure, riesz_measure, telescoping_alpha0, CircleMeasure, Variant,
};
use ervl::energies::{
    energy, partial_energy_bound, rotated_partial_energy, AtomicMeasure, Cube, Rotation, RotationSet,
};
use ervl::exact::{format_rational, int, rat};
use ervl::fields::{
    embed_and_project, lifted_profile, parallelism_det, remark_gradient, span_rank, z_field_fourier,
    z_field_quadrature, KernelSymbol, Route, SampledKernel, SphereSymbol,
};
use ervl::linalg::{det_bareiss, leading_minors, solve_exact, ExactMatrix};
use ervl::reversal::{apply_transform, sweep, PlanarMeasure, ReversalSetup};
use ervl::toeplitz::{
    build_gram, compute_v, border_vectors, default_residue_samples, leading_minors_positive, residue_lhs,
    residue_rhs, residue_samples_required, verify_complement_identity, verify_inverse_identity, verify_recursion,
    verify_residue_identity,
};
use ervl::ExactRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn x_grid() -> Vec<ExactRational> {
    vec![rat(1, 10), rat(1, 2), int(1), rat(3, 2), int(2), rat(5, 2), int(3)]
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: ervl::Error) -> String {
    err.to_string()
}

fn recursion() -> Outcome {
    let start = Instant::now();
    for x in x_grid() {
        let cert = verify_recursion(13, &x).map_err(e)?;
        ensure(cert.witness.len() == 12, || format!("x = {}: {} ratios", format_rational(&x), cert.witness.len()))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("n <= 12 on 7 x values in {secs:.2} s"))
}

fn hand_cases() -> Outcome {
    for x in x_grid().into_iter().chain([rat(7, 3), rat(1, 1000)]) {
        let det = det_bareiss(&build_gram(2, &x).map_err(e)?.matrix()).map_err(e)?;
        let oracle = int(4) * &x / ((int(1) + &x) * (int(1) + &x));
        ensure(det == oracle, || format!("det B_2({}) = {}", format_rational(&x), format_rational(&det)))?;
    }
    for n in 1..=12 {
        let m = build_gram(n, &int(1)).map_err(e)?.matrix();
        ensure(m == ExactMatrix::identity(n), || format!("B_{n}(1) is not the identity"))?;
        ensure(leading_minors(&m).map_err(e)?.iter().all(One::is_one), || format!("B_{n}(1) minor != 1"))?;
    }
    Ok("det B_2 = 4x/(1+x)^2 on 9 x values; B_n(1) = I for n <= 12".into())
}

fn vector_identities() -> Outcome {
    let mut count = 0;
    for x in x_grid() {
        for n in 1..=10 {
            verify_inverse_identity(n, &x).map_err(e)?;
            verify_complement_identity(n, &x).map_err(e)?;
            let gram = build_gram(n, &x).map_err(e)?.matrix();
            let solved = solve_exact(&gram, &border_vectors(n, &x).map_err(e)?.c).map_err(e)?;
            ensure(solved == compute_v(n, &x).map_err(e)?, || {
                format!("n = {n}, x = {}: linear solve disagrees with v", format_rational(&x))
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} (n, x) pairs, inverse column and complement, solve cross-check"))
}

fn residue_identities() -> Outcome {
    for n in 1..=10 {
        let pointwise = verify_residue_identity(n, &default_residue_samples(n + 2)).map_err(e)?;
        ensure(pointwise.passed(), || format!("n = {n} pointwise"))?;
        let certified = verify_residue_identity(n, &default_residue_samples(residue_samples_required(n))).map_err(e)?;
        ensure(certified.notes.iter().any(|s| s.starts_with("certified")), || format!("n = {n} not certified"))?;
    }
    for z in [rat(7, 3), rat(-5, 2), rat(1, 2), int(4)] {
        let oracle = (int(2) * &z - int(1)) / (&z * (&z - int(1)));
        let lhs = residue_lhs(1, &z).map_err(e)?;
        let rhs = residue_rhs(1, &z).map_err(e)?;
        ensure(lhs == oracle && rhs == oracle, || format!("n = 1 at z = {}", format_rational(&z)))?;
    }
    Ok("n <= 10 at n+2 samples; also certified at 2n+1 samples; n = 1 hand case".into())
}

fn positivity() -> Outcome {
    for x in [rat(1, 10), rat(1, 2), int(1), rat(3, 2), int(2)] {
        leading_minors_positive(12, &x).map_err(e)?;
    }
    let xs = [rat(1, 10), rat(1, 4), rat(1, 2), rat(3, 4), int(1), rat(5, 4), rat(3, 2), rat(7, 4), int(2)];
    let mut notes = Vec::new();
    for x in &xs {
        let seq = coeff_sequence_x(x, Variant::Absolute, 50).map_err(e)?;
        let cert = ervl::densities::check_convexity(&seq).map_err(e)?;
        if !cert.notes.is_empty() {
            notes.push(format!("x = {}: {}", format_rational(x), cert.notes.join(", ")));
        }
    }
    let mut msg = "minors positive to n = 12 on 5 x; convexity to N = 50 on 9 x in (0, 2]".to_string();
    if !notes.is_empty() {
        msg.push_str(&format!(" [{}]", notes.join("; ")));
    }
    Ok(msg)
}

fn telescoping() -> Outcome {
    const N: usize = 10_000;
    let seq = coeff_sequence(&int(0), Variant::Signed, N).map_err(e)?;
    let mut partial = ExactRational::zero();
    for n in 1..=N {
        partial += seq.term(n).abs();
        let closed = (int(1) - int(1) / int(2 * n as i64 + 1)) / int(2);
        ensure(partial == closed, || format!("N = {n}: {} != {}", format_rational(&partial), format_rational(&closed)))?;
    }
    telescoping_alpha0(N).map_err(e)?;
    Ok(format!("every N <= {N}"))
}

fn remark_gradients() -> Outcome {
    let alphas = [int(0), rat(1, 4), rat(1, 2), rat(3, 4), rat(5, 4), rat(3, 2), rat(7, 4)];
    let mut worst: f64 = 0.0;
    for alpha in &alphas {
        let a = ervl::exact::to_f64(alpha);
        for t in [0.0, FRAC_PI_6, FRAC_PI_2] {
            let closed = remark_gradient(alpha, t, Route::Closed, 0).map_err(e)?;
            let quad = remark_gradient(alpha, t, Route::Quadrature, 4096).map_err(e)?;
            let gap = closed.distance(&quad);
            worst = worst.max(gap);
            ensure(gap <= 1e-10, || format!("alpha = {}, t = {t}: gap {gap:e}", format_rational(alpha)))?;
            let branch = if a < 1.0 { ((a - 1.0) * t.cos(), 0.0) } else { (0.0, (a - 1.0) * t.sin()) };
            ensure((closed.re, closed.im) == branch, || format!("alpha = {}, t = {t}: branch value", format_rational(alpha)))?;
        }
    }
    Ok(format!("7 alpha x 3 t, max route gap {worst:.1e}"))
}

fn parallelism() -> Outcome {
    let alphas = [int(0), rat(1, 4), rat(1, 2), rat(3, 4), int(1), rat(5, 4), rat(3, 2), rat(7, 4)];
    for alpha in &alphas {
        let p = parallelism_det(1, alpha, &riesz_measure(alpha).map_err(e)?).map_err(e)?;
        let exact = p.exact_det.ok_or("riesz measure has no exact route")?;
        ensure(exact.is_zero() && p.det.abs() <= 1e-14, || format!("alpha = {}: det {}", format_rational(alpha), p.det))?;
    }
    for alpha in [rat(1, 2), rat(3, 2)] {
        let measure = density_measure(&coeff_sequence(&alpha, Variant::Signed, 64).map_err(e)?);
        for k in 1..=16 {
            let p = parallelism_det(k, &alpha, &measure).map_err(e)?;
            let exact = p.exact_det.ok_or("density has no exact route")?;
            ensure(exact.is_zero(), || format!("signed alpha = {}, k = {k}: det {}", format_rational(&alpha), p.det))?;
        }
        let fields: Vec<_> =
            KernelSymbol::trig_family(16).iter().map(|k| z_field_fourier(k, &alpha, &measure)).collect::<Result<_, _>>().map_err(e)?;
        let rank = span_rank(&fields, 1e-9).map_err(e)?;
        ensure(fields.len() == 32 && rank == 1, || format!("signed alpha = {}: rank {rank}", format_rational(&alpha)))?;
    }
    Ok("riesz k = 1 exact zero on 8 alpha; signed density k <= 16 exact zero, rank 1 of 32 at alpha = 1/2, 3/2".into())
}

fn random_trig_kernel(rng: &mut ChaCha8Rng, name: &str) -> Result<SampledKernel, String> {
    let coeffs: Vec<(f64, f64)> = (1..=6).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let d = coeffs.clone();
    SampledKernel::new(
        name,
        move |t| coeffs.iter().enumerate().map(|(i, (a, b))| a * ((i + 1) as f64 * t).cos() + b * ((i + 1) as f64 * t).sin()).sum(),
        move |t| {
            d.iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    let k = (i + 1) as f64;
                    k * (b * (k * t).cos() - a * (k * t).sin())
                })
                .sum()
        },
    )
    .map_err(e)
}

fn alpha_one_degeneracies() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_261_016);
    let uniform = CircleMeasure::uniform(int(1)).map_err(e)?;
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        let omega = KernelSymbol::Sampled(random_trig_kernel(&mut rng, &format!("random{i}"))?);
        let (z, _) = z_field_quadrature(&omega, 1.0, &uniform, 1024).map_err(e)?;
        worst = worst.max(z.norm());
        ensure(z.norm() <= 1e-10, || format!("random kernel {i}: |Z| = {:e}", z.norm()))?;
    }
    let circle = PlanarMeasure::new(1.0, [0.0, 0.0], uniform).map_err(e)?;
    let mut worst_t: f64 = 0.0;
    for _ in 0..20 {
        let r = 0.7 * rng.gen_range(0.0f64..1.0).sqrt();
        let phi = rng.gen_range(0.0..2.0 * PI);
        let x = [r * phi.cos(), r * phi.sin()];
        for k in KernelSymbol::riesz_pair() {
            let (v, _) = apply_transform(&k, 1.0, &circle, &x, 4096).map_err(e)?;
            worst_t = worst_t.max(v.abs());
            ensure(v.abs() <= 1e-10, || format!("T mu({x:?}) = {v:e}"))?;
        }
    }
    Ok(format!("max |Z| {worst:.1e} over 5 kernels; max |T mu| {worst_t:.1e} at 20 points"))
}

fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> Result<Rotation, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while rows.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for r in &rows {
            let d: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(r).for_each(|(a, b)| *a -= d * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-3 {
            rows.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    let det = nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant();
    if det < 0.0 {
        rows[0].iter_mut().for_each(|a| *a = -*a);
    }
    Rotation::new(rows).map_err(e)
}

fn energy_identity_and_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut worst: f64 = 0.0;
    let mut singular = 0;
    for case in 0..1000 {
        let n = rng.gen_range(2..=4);
        let center: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let cube = Cube::new(center, rng.gen_range(0.1..3.0)).map_err(e)?;
        let atoms = rng.gen_range(2..=12);
        let points = (0..atoms).map(|_| cube.center.iter().map(|c| c + cube.side * rng.gen_range(-0.5..0.5)).collect()).collect();
        let masses = (0..atoms).map(|_| rng.gen_range(0.1..2.0)).collect();
        let w = AtomicMeasure::new(points, masses).map_err(e)?;
        let r = random_rotation(&mut rng, n)?;
        let total = energy(&cube, &w).map_err(e)?.powi(2);
        let parts: f64 =
            (0..n).map(|j| rotated_partial_energy(&r, j, &cube, &w).map(|v| v * v)).sum::<Result<f64, _>>().map_err(e)?;
        let gap = (parts - total).abs() / total.max(1.0);
        worst = worst.max(gap);
        ensure(gap <= 1e-12, || format!("case {case}: sum {parts} vs {total}"))?;
        let count = rng.gen_range(1..=n + 2);
        let set = RotationSet::new((0..count).map(|_| random_rotation(&mut rng, n)).collect::<Result<_, _>>()?).map_err(e)?;
        let bound = partial_energy_bound(&set, &cube, &w).map_err(e)?;
        ensure(bound.holds(), || format!("case {case}: {} > {}", bound.lhs, bound.rhs))?;
        singular += bound.singular as usize;
    }
    Ok(format!("1000 instances, max relative gap {worst:.1e}, {singular} with singular M"))
}

fn reversal_failure() -> Outcome {
    let start = Instant::now();
    let gammas = [8.0, 16.0, 32.0, 64.0];
    let mut lines = Vec::new();
    for alpha in [int(0), rat(1, 2), rat(3, 2)] {
        let setup = ReversalSetup::riesz(&alpha).map_err(e)?;
        let s = sweep(&setup, &gammas, 1.0, 4096).map_err(e)?;
        let label = format_rational(&alpha);
        ensure(s.decreasing, || format!("alpha = {label}: ratio not decreasing"))?;
        let last = s.reports.last().ok_or("empty sweep")?;
        ensure(last.ratio < 0.1, || format!("alpha = {label}: ratio(64) = {:e}", last.ratio))?;
        ensure(last.fails && last.below_tenth, || format!("alpha = {label}: inequality not violated"))?;
        let delta = s.delta_hat.ok_or_else(|| format!("alpha = {label}: no decay exponent"))?;
        ensure(delta >= 1.0, || format!("alpha = {label}: delta {delta:.3}"))?;
        let err = s.reports.iter().map(|r| r.lhs_error / r.lhs).fold(0.0, f64::max);
        lines.push(format!("alpha {label}: ratio(64) {:.2e}, delta {delta:.3}, lhs rel err {err:.0e}", last.ratio));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 300.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{} ({secs:.1} s)", lines.join("; ")))
}

fn embedding() -> Outcome {
    let profile = lifted_profile(3, &int(1), 64).map_err(e)?;
    let r = embed_and_project(3, &int(1), &SphereSymbol::coordinate(0), &profile, 4096).map_err(e)?;
    ensure(!r.degenerate, || "embedded field vanishes".into())?;
    ensure(r.e2_ratio <= 1e-6, || format!("e2 ratio {:e}", r.e2_ratio))?;
    Ok(format!("field ({:.6}, {:.1e}, {:.1e}), e2 ratio {:.1e}", r.field[0], r.field[1], r.field[2], r.e2_ratio))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("exact recursion", recursion),
        ("hand-derived determinants", hand_cases),
        ("vector identities", vector_identities),
        ("residue identity", residue_identities),
        ("positivity and convexity", positivity),
        ("alpha = 0 telescoping", telescoping),
        ("gradient closed form vs quadrature", remark_gradients),
        ("parallelism", parallelism),
        ("alpha = 1 degeneracies", alpha_one_degeneracies),
        ("energy identity and bound", energy_identity_and_bound),
        ("reversal failure", reversal_failure),
        ("sphere embedding", embedding),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
