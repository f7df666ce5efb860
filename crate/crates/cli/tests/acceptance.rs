//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use nacy_cli::sampling::{bounds_family, cost_samples};
use nacy_cost::{abelian_cost, mumford_theta_family, tabulated_cost, verify_cost_bounds, MumfordData, TabulatedKernel};
use nacy_diagnostics::{
    duality_check, hybrid_potential_curve, ma_residual, ma_residual_1d, ma_residual_2d, HybridConfig,
};
use nacy_families::{
    lattice_count_asymptote, p3_two_quadrics, section_count, weighted_count, intermediate_theta_family, Discretization,
    FamilySpec,
};
use nacy_polyhedral::{qi, segment_complex, DiscreteMeasure, Face, IntegralPolyhedralComplex, Q};
use nacy_transport::{
    c_transform_values, lp_oracle, ma_energy, minimize_kontorovich, relative_volume_sum, Direction, LpConfig,
    PotentialField, SolverConfig, TransportProblem, TransportResult,
};
use nacy_tropical::{check_valuative_independence, SectionFamilySpec, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn solve(problem: &TransportProblem) -> Result<TransportResult, String> {
    minimize_kontorovich(problem, &SolverConfig::default()).map_err(e)
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn aligned_gap(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let (lo, hi) = d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    0.5 * (hi - lo)
}

/// Random dyadic cost table and potentials, so every transform is computed without rounding.
fn dyadic_problem(rng: &mut ChaCha8Rng, n: usize, m: usize) -> TransportProblem {
    let dy = |rng: &mut ChaCha8Rng| f64::from(rng.gen_range(-1024i32..=1024)) / 1024.0;
    let grid = |k: usize| -> Vec<Vec<Q>> { (0..k).map(|i| vec![Q::new(i as i64, (k - 1).max(1) as i64)]).collect() };
    let as_f64 = |g: &[Vec<Q>]| g.iter().map(|p| vec![*p[0].numer() as f64 / *p[0].denom() as f64]).collect();
    let (xq, pq) = (grid(n), grid(m));
    let table = TabulatedKernel { xs: as_f64(&xq), ps: as_f64(&pq), values: (0..n * m).map(|_| dy(rng)).collect() };
    let c = Arc::new(segment_complex(qi(0), qi(1), false).unwrap());
    let cost = tabulated_cost(c.clone(), c, table);
    let mu0 = DiscreteMeasure::new(xq, vec![0; n], vec![1.0 / n as f64; n]).unwrap();
    let nu0 = DiscreteMeasure::new(pq, vec![0; m], vec![1.0 / m as f64; m]).unwrap();
    TransportProblem::new(cost, Arc::new(mu0), Arc::new(nu0), None, 1.0).unwrap()
}

fn c1_c_transforms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut largest = (0, 0);
    for k in 0..20 {
        let (n, m) = if k == 0 { (128, 128) } else { (rng.gen_range(2..=128), rng.gen_range(2..=128)) };
        largest = largest.max((n, m));
        let problem = dyadic_problem(&mut rng, n, m);
        let f1: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(-512i32..=512)) / 512.0).collect();
        let f2: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(-512i32..=512)) / 512.0).collect();
        let (fc, _) = c_transform_values(&problem, &f1, Direction::SourceToTarget);
        let (fcc, _) = c_transform_values(&problem, &fc, Direction::TargetToSource);
        let (fccc, _) = c_transform_values(&problem, &fcc, Direction::SourceToTarget);
        ensure(fccc == fc, || format!("problem {k}: triple transform differs"))?;
        ensure(fcc.iter().zip(&f1).all(|(a, b)| a <= b), || format!("problem {k}: (f^c)^c > f"))?;
        let (gc, _) = c_transform_values(&problem, &f2, Direction::SourceToTarget);
        ensure(sup_diff(&fc, &gc) <= sup_diff(&f1, &f2), || format!("problem {k}: transform expands sup distance"))?;
    }
    Ok(format!("20 dyadic problems up to {}x{}", largest.0, largest.1))
}

fn toric(vertices: &[[i64; 2]]) -> FamilySpec {
    FamilySpec::Toric { vertices: vertices.iter().map(|v| v.to_vec()).collect(), ln_norm: None }
}

const P2: [[i64; 2]; 3] = [[-1, -1], [2, -1], [-1, 2]];
const P1P1: [[i64; 2]; 4] = [[-1, -1], [1, -1], [1, 1], [-1, 1]];

fn c2_strong_duality() -> Outcome {
    let intermediate = FamilySpec::Intermediate {
        n: 2,
        m: 1,
        d: vec![2, 2],
        hilbert_m: nacy_families::HilbertSpec::Projective { projective: 3, depth: 9 },
        ln_norm: 4.0,
    };
    let instances: Vec<(&str, FamilySpec, Discretization)> = vec![
        ("toric P2", toric(&P2), Discretization::new(20, 20).unwrap()),
        ("toric P1xP1", toric(&P1P1), Discretization::new(24, 24).unwrap()),
        ("intermediate P3 (2,2)", intermediate, Discretization::new(64, 64).unwrap()),
        ("abelian circle", FamilySpec::Abelian { factors: MumfordData::triangular(1).factors, levels: vec![1] }, Discretization::new(128, 192).unwrap()),
        ("abelian rank 2", FamilySpec::Abelian { factors: MumfordData::triangular(2).factors, levels: vec![1] }, Discretization::new(12, 14).unwrap()),
        ("zero", FamilySpec::Zero {}, Discretization::new(64, 64).unwrap()),
    ];
    let mut worst = (0.0f64, 0.0f64);
    let mut slowest = Duration::ZERO;
    for (name, spec, disc) in instances {
        let start = Instant::now();
        let inst = spec.build(&disc).map_err(e)?;
        let p = &inst.problem;
        ensure(p.n_source() <= 200 && p.n_target() <= 200, || format!("{name}: grid {}x{} too large", p.n_source(), p.n_target()))?;
        let res = solve(p)?;
        let lp = lp_oracle(p, LpConfig::default()).map_err(e)?;
        let gap = (res.value - lp.primal_value).abs() / (1.0 + res.value.abs());
        let pot = aligned_gap(&res.phi.values, &lp.phi);
        ensure(gap <= 1e-6, || format!("{name}: value gap {gap:e}"))?;
        ensure(pot <= 1e-4, || format!("{name}: potential gap {pot:e}"))?;
        let t = start.elapsed();
        ensure(t < Duration::from_secs(60), || format!("{name}: {t:?}"))?;
        worst = (worst.0.max(gap), worst.1.max(pot));
        slowest = slowest.max(t);
    }
    Ok(format!("6 instances, value gap <= {:.1e}, potential gap <= {:.1e}, slowest {:.2} s", worst.0, worst.1, slowest.as_secs_f64()))
}

fn c3_independence() -> Outcome {
    let data = MumfordData::triangular(1);
    let fam = mumford_theta_family(&data, &[1, 2, 3]).map_err(e)?;
    let source = data.source_complex().map_err(e)?;
    for l in 1..=3 {
        for cell in source.cells() {
            let v = check_valuative_independence(fam.sections(l).map_err(e)?, cell, fam.coeffs()).map_err(e)?;
            ensure(v.is_independent(), || format!("level {l}: {v:?}"))?;
        }
    }
    // Two sections whose dominant terms share a class, with coefficient vectors (1, 2) and (2, 4).
    let spec: SectionFamilySpec = serde_json::from_str(
        r#"{"level":1,"multiplicities":[1,1],"sections":[
            {"terms":[{"alpha":[1,2],"t_order":0,"coeff":["1","2"]}]},
            {"terms":[{"alpha":[0,1],"t_order":1,"coeff":["2","4"]}]}]}"#,
    )
    .map_err(e)?;
    let dep = spec.build().map_err(e)?;
    let w = match check_valuative_independence(&dep.sections, &dep.face, &dep.coeffs).map_err(e)? {
        Verdict::Dependent(w) => w,
        v => return Err(format!("dependent family reported {v:?}")),
    };
    let vectors = [[1i64, 2], [2, 4]];
    let combo: Vec<i64> = (0..2).map(|c| w.sections.iter().zip(&w.kernel).map(|(&s, &k)| k * vectors[s][c]).sum()).collect();
    ensure(combo == vec![0, 0] && w.kernel.iter().any(|&k| k != 0), || format!("bad witness {w:?}"))?;
    Ok(format!("rank-1 theta independent at l = 1..3; witness kernel {:?}", w.kernel))
}

/// `C(k + 3, 3)`.
fn p3(k: i64) -> i64 {
    if k < 0 {
        0
    } else {
        (k + 1) * (k + 2) * (k + 3) / 6
    }
}

fn c4_section_counts() -> Outcome {
    let data = p3_two_quadrics(9);
    let mut got = Vec::new();
    for l in 0..=8u32 {
        let c = section_count(&data, l).map_err(e)?;
        let oracle = (p3(i64::from(l)) - p3(i64::from(l) - 4)) as u64;
        ensure(c.enumerated == c.series && c.series == oracle, || format!("l = {l}: {c:?} vs {oracle}"))?;
        got.push(c.series);
    }
    ensure(got[..3] == [1, 4, 10], || format!("{got:?}"))?;
    Ok(format!("l = 0..8: {got:?}"))
}

fn c5_cost_bounds() -> Outcome {
    let mut total = 0;
    let mut pairs = 0;
    for (rank, seed) in [(1, 5), (2, 6)] {
        let data = MumfordData::triangular(rank);
        let fam = bounds_family(&data, 3).map_err(e)?;
        let samples = cost_samples(&fam, &data, 1000, 3, seed).map_err(e)?;
        let report = verify_cost_bounds(&fam, &abelian_cost(&data).map_err(e)?, &samples, 1e-9).map_err(e)?;
        ensure(report.passed(), || format!("rank {rank}: {} violations", report.violations.len()))?;
        total += report.lower_bound_checks;
        pairs += report.subadditivity_checks;
    }
    ensure(total >= 1000, || format!("only {total} samples"))?;
    Ok(format!("{total} lower-bound and {pairs} subadditivity checks, no violations"))
}

fn c6_energy() -> Outcome {
    let data = MumfordData::triangular(1);
    let levels = [4, 8, 16, 32];
    let fam = mumford_theta_family(&data, &levels).map_err(e)?;
    let (_, problem) = nacy_families::mumford_family(&data, &[1], &Discretization::new(64, 256).unwrap()).map_err(e)?;
    let phi = solve(&problem)?.phi;
    let zero = PotentialField::on_source(&problem, vec![0.0; problem.n_source()]).map_err(e)?;
    let de = ma_energy(&problem, &phi).map_err(e)? - ma_energy(&problem, &zero).map_err(e)?;
    let mut errors = Vec::new();
    for l in levels {
        errors.push((relative_volume_sum(&phi, &zero, &fam, l).map_err(e)?.scaled - de).abs());
    }
    ensure(errors.windows(2).all(|w| w[1] < w[0]), || format!("errors {errors:?}"))?;
    let a = 0.25;
    let shift = relative_volume_sum(&phi.shifted(a), &phi, &fam, 32).map_err(e)?.scaled;
    let expected = problem.ln_norm * a;
    let rel = (shift - expected).abs() / expected;
    ensure(rel <= 0.05, || format!("shift {shift} vs {expected}"))?;
    Ok(format!("errors {:.2e} -> {:.2e}, shift relative error {rel:.1e} at l = 32", errors[0], errors[3]))
}

fn c7_lattice_counts() -> Outcome {
    let levels = [8, 16, 32, 64];
    let non_increasing = |rows: &[nacy_families::LatticeCount]| rows.windows(2).all(|w| w[1].rel_error <= w[0].rel_error);
    let mut checked = Vec::new();
    for (name, spec, ln) in [("P2", toric(&P2), 9.0), ("P1xP1", toric(&P1P1), 8.0)] {
        let pair = match spec {
            FamilySpec::Toric { vertices, .. } => nacy_families::toric_pair(&vertices).map_err(e)?,
            _ => unreachable!(),
        };
        let rows = lattice_count_asymptote(&pair.boundary, ln, &levels);
        ensure(non_increasing(&rows) && rows[3].rel_error < 1e-12, || format!("{name}: {rows:?}"))?;
        checked.push(name);
    }
    for rank in [1, 2] {
        let data = MumfordData::triangular(rank);
        let target = data.target_complex().map_err(e)?;
        let rows = lattice_count_asymptote(&target, data.ln_norm(), &levels);
        ensure(non_increasing(&rows) && rows[3].rel_error < 1e-12, || format!("abelian rank {rank}: {rows:?}"))?;
        checked.push(if rank == 1 { "abelian rank 1" } else { "abelian rank 2" });
    }
    // Solid P² polytope: (3l+1)(3l+2)/2 points, error (9l + 2)/(9l²).
    let verts: Vec<Vec<Q>> = P2.iter().map(|v| v.iter().map(|&c| qi(c)).collect()).collect();
    let solid = IntegralPolyhedralComplex::new(vec![Face::new(verts, None, 1.0).map_err(e)?], Vec::new()).map_err(e)?;
    let rows = lattice_count_asymptote(&solid, 9.0, &levels);
    for r in &rows {
        let l = r.level as usize;
        ensure(r.count == (3 * l + 1) * (3 * l + 2) / 2, || format!("solid P2 count {r:?}"))?;
    }
    ensure(rows.windows(2).all(|w| w[1].rel_error < w[0].rel_error), || format!("solid P2: {rows:?}"))?;
    let data = p3_two_quadrics(65);
    let fam = intermediate_theta_family(&data, &levels).map_err(e)?;
    let weighted: Vec<f64> = levels
        .iter()
        .map(|&l| fam.multiplicities(l).map(|m| weighted_count(&m, l, data.n, data.ln_norm).rel_error))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    ensure(weighted.windows(2).all(|w| w[1] < w[0]), || format!("intermediate weighted: {weighted:?}"))?;
    Ok(format!(
        "exact on {}; strictly decreasing on solid P2 ({:.1e}) and weighted intermediate ({:.1e}) at l = 64",
        checked.join(", "),
        rows[3].rel_error,
        weighted[3]
    ))
}

fn circle(ls: u32, lt: u32) -> Result<TransportProblem, String> {
    let data = MumfordData::triangular(1);
    Ok(nacy_families::mumford_family(&data, &[1], &Discretization::new(ls, lt).unwrap()).map_err(e)?.1)
}

fn c8_ma_residual() -> Outcome {
    let mut r = Vec::new();
    for l in [32, 64, 128] {
        let problem = circle(l, 3 * l / 2)?;
        let res = solve(&problem)?;
        r.push(ma_residual(&res.phi, &problem.cost.source, 0, Q::new(1, i64::from(l))).map_err(e)?.max_residual);
    }
    ensure(r[0] > 0.0 && r[1] < 0.75 * r[0] && r[2] < 0.75 * r[1], || format!("residuals {r:?}"))?;
    let line: Vec<f64> = (0..17).map(|k| 0.5 * k as f64 - 1.0).collect();
    let flat = ma_residual_1d(&line, 1.0 / 16.0).map_err(e)?;
    let plane: Vec<Vec<f64>> = (0..9).map(|i| (0..9).map(|j| i as f64 - 2.0 * j as f64).collect()).collect();
    let flat2 = ma_residual_2d(&plane, 1.0 / 8.0).map_err(e)?;
    ensure(flat.degenerate_count == flat.cells.len() && flat.degenerate_count > 0, || format!("1D affine {flat:?}"))?;
    ensure(flat2.degenerate_count == flat2.cells.len() && flat2.degenerate_count > 0, || "2D affine not flagged".into())?;
    Ok(format!("residuals {:.3e}, {:.3e}, {:.3e} (ratios {:.2}, {:.2}); affine inputs flagged", r[0], r[1], r[2], r[1] / r[0], r[2] / r[1]))
}

fn c9_duality() -> Outcome {
    let problem = circle(128, 128)?;
    let dual = problem.dual().map_err(e)?;
    let r = duality_check(&problem, &dual, &solve(&problem)?, &solve(&dual)?).map_err(e)?;
    ensure(r.functional_gap <= 1e-6 && r.potential_gap <= 1e-4, || format!("abelian {r:?}"))?;
    let mut toric_gap: f64 = 0.0;
    for (v, level) in [(&P2[..], 16), (&P1P1[..], 16)] {
        let inst = toric(v).build(&Discretization::new(level, level).unwrap()).map_err(e)?;
        let p = &inst.problem;
        let d = p.dual().map_err(e)?;
        let t = duality_check(p, &d, &solve(p)?, &solve(&d)?).map_err(e)?;
        ensure(t.precondition_residual == 0.0 && t.functional_gap <= 1e-9, || format!("toric {t:?}"))?;
        toric_gap = toric_gap.max(t.functional_gap);
    }
    Ok(format!(
        "abelian 128: functional {:.1e}, potential {:.1e}; toric functional identity {toric_gap:.1e}",
        r.functional_gap, r.potential_gap
    ))
}

fn c10_hybrid() -> Outcome {
    let data = MumfordData::triangular(1);
    let grid: Vec<Vec<f64>> = (0..200).map(|k| vec![k as f64 / 200.0]).collect();
    let mut tail: f64 = 0.0;
    let mut last = Vec::new();
    for level in [1, 2] {
        let cfg = |window| HybridConfig { level, t_schedule: vec![1e-2, 1e-4, 1e-8], window, constants: None };
        let a = hybrid_potential_curve(&data, &cfg(8), &grid).map_err(e)?;
        let b = hybrid_potential_curve(&data, &cfg(16), &grid).map_err(e)?;
        ensure(a.errors.windows(2).all(|w| w[1] < w[0]), || format!("level {level}: {:?}", a.errors))?;
        tail = tail.max(sup_diff(&a.errors, &b.errors));
        last.push(a.errors[2]);
    }
    ensure(tail < 1e-10, || format!("window doubling moved errors by {tail:e}"))?;
    Ok(format!("strictly decreasing at l = 1, 2 (final {:.2e}, {:.2e}); window doubling {tail:.1e}", last[0], last[1]))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("c-transform suite", 10, c1_c_transforms),
        ("strong-duality oracle", 360, c2_strong_duality),
        ("valuative independence", 1, c3_independence),
        ("section counting", 1, c4_section_counts),
        ("cost bounds", 10, c5_cost_bounds),
        ("MA energy via relative volume", 30, c6_energy),
        ("lattice-count asymptote", 5, c7_lattice_counts),
        ("real MA diagnostic", 30, c8_ma_residual),
        ("mirror duality", 60, c9_duality),
        ("hybrid convergence", 30, c10_hybrid),
    ];
    let mut failed = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(msg) if secs > *budget as f64 => Err(format!("{msg}; over the {budget} s budget")),
            o => o,
        };
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} ({secs:.2} s)", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} ({secs:.2} s)", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
