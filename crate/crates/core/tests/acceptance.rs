//! Acceptance run: one line per criterion, exact arithmetic throughout.
//! Exits nonzero if any criterion fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use modinv::exact_algebra::ExactScalar;
use modinv::interface::{decode_context, decode_modular_data, encode_modular_data, encode_report, DataFile};
use modinv::invariant_search::{
    enumerate_invariants, enumerate_invariants_with, is_modular_invariant, EnumerationConfig, Mode,
    ZMatrix,
};
use modinv::modular_data::{catalog, CatalogId, ModularData};
use modinv::morita_context::{exponents_check, trivial_context, verify_context};
use modinv::obstruction::{
    check_obstruction, check_series, double_z, lhs_multi, scan_bounded, trace_identities,
    IdentityVariant, ScanReport,
};
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn md(id: CatalogId) -> ModularData {
    catalog(&id).expect("catalog entry")
}

fn physical(m: &ModularData) -> Result<Vec<ZMatrix>, String> {
    enumerate_invariants(m, Mode::Physical).map_err(|e| format!("{}: {e}", m.name()))
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn sweep() -> Vec<CatalogId> {
    let mut ids: Vec<CatalogId> = (1..=28).map(CatalogId::Su2).collect();
    ids.extend([CatalogId::Ising, CatalogId::Fibonacci]);
    for n in 1..=8u32 {
        for q in 0..2 * n {
            let id = CatalogId::PointedCyclic(n, q);
            if catalog(&id).is_ok() {
                ids.push(id);
            }
        }
    }
    ids.extend((1..=5).map(CatalogId::DoubleCyclic));
    ids
}

fn c1_catalog_soundness() -> Outcome {
    let start = Instant::now();
    let ids = sweep();
    for id in &ids {
        let m = md(*id);
        let report = m.validate();
        ensure(report.passed(), || format!("{id} fails validation: {report:?}"))?;
        let fr = m.verlinde_fusion().map_err(|e| format!("{id}: {e}"))?;
        ensure(fr.associativity_violation().is_none(), || format!("{id}: Verlinde ring not associative"))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(30), || format!("took {t:?}"))?;
    Ok(format!("{} catalog entries valid, fusion integral and associative", ids.len()))
}

/// Sets `{j, k}` with `z_jk ≠ 0` for a block-diagonal invariant.
fn blocks(z: &ZMatrix) -> Vec<Vec<usize>> {
    let r = z.rank();
    let mut seen = vec![false; r];
    let mut out = Vec::new();
    for j in 0..r {
        if seen[j] || z.get(j, j) == 0 {
            continue;
        }
        let b: Vec<usize> = (0..r).filter(|k| z.get(j, *k) != 0).collect();
        b.iter().for_each(|k| seen[*k] = true);
        out.push(b);
    }
    out
}

fn c2_ade() -> Outcome {
    let mut notes = Vec::new();
    for (k, count) in [(4u32, 2usize), (10, 3), (16, 3), (28, 3)] {
        let m = md(CatalogId::Su2(k));
        let start = Instant::now();
        let zs = physical(&m)?;
        let t = start.elapsed();
        ensure(t < Duration::from_secs(60), || format!("su2({k}) took {t:?}"))?;
        ensure(zs.len() == count, || format!("su2({k}): {} invariants, expected {count}", zs.len()))?;
        let dims = m.dims_unchecked();
        for z in &zs {
            ensure(z.dimension_pairing(&dims) == m.global_dim_unchecked(), || format!("su2({k}): not physical"))?;
            let chk = is_modular_invariant(&m, &z.to_i64_rows()).map_err(|e| e.to_string())?;
            ensure(chk.is_invariant, || format!("su2({k}): {:?}", chk.witness))?;
        }
        let want: Option<Vec<Vec<usize>>> = match k {
            10 => Some(vec![vec![0, 6], vec![3, 7], vec![4, 10]]),
            28 => Some(vec![vec![0, 10, 18, 28], vec![6, 12, 16, 22]]),
            _ => None,
        };
        if let Some(want) = want {
            ensure(zs.iter().any(|z| blocks(z) == want), || format!("su2({k}): exceptional block support missing"))?;
        }
        notes.push(format!("su2({k})={} in {:.2}s", zs.len(), t.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

fn c3_vacuum_identity() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for id in [CatalogId::Ising, CatalogId::Fibonacci, CatalogId::Su2(4), CatalogId::Su2(10)] {
        let m = md(id);
        let zs = physical(&m)?;
        let n_max = if m.rank() >= 11 { 2 } else { 3 };
        let report = check_obstruction(&m, &zs, n_max).map_err(|e| format!("{id}: {e}"))?;
        for r in report.records.iter().filter(|r| r.variant == IdentityVariant::Full) {
            total += 1;
            ensure(r.lhs_is_nonneg_integer && r.equal == Some(true), || {
                format!("{id} tuple {:?}: lhs {} rhs {:?}", r.tuple, r.lhs, r.rhs)
            })?;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(120), || format!("took {t:?}"))?;
    Ok(format!("{total} tuples, lhs = rhs exactly, {:.2}s", t.as_secs_f64()))
}

fn c4_specializations() -> Outcome {
    let mut pairs = 0;
    let mut points = 0;
    for id in [
        CatalogId::Ising,
        CatalogId::Fibonacci,
        CatalogId::Su2(4),
        CatalogId::Su2(10),
        CatalogId::Su2(16),
        CatalogId::Su2(28),
    ] {
        let m = md(id);
        let zs = physical(&m)?;
        let dims = m.dims_unchecked();
        for z in &zs {
            points += 1;
            ensure(z.dimension_pairing(&dims) == m.global_dim_unchecked(), || format!("{id}: Σzdd ≠ μ"))?;
        }
        for a in &zs {
            for b in &zs {
                pairs += 1;
                let lhs = lhs_multi(&m, &[a, b], IdentityVariant::Full).map_err(|e| e.to_string())?;
                let tr: u64 = (0..m.rank())
                    .flat_map(|j| (0..m.rank()).map(move |k| (j, k)))
                    .map(|(j, k)| a.get(j, k) * b.get(j, k))
                    .sum();
                ensure(lhs == ExactScalar::from_int(tr as i64, m.conductor()), || {
                    format!("{id}: n=2 value {lhs} vs Tr(Z1 Z2t) = {tr}")
                })?;
            }
        }
    }
    Ok(format!("Σzdd = μ on {points} invariants, n=2 trace on {pairs} ordered pairs"))
}

fn c5_series() -> Outcome {
    let mut n_checks = 0;
    for id in [CatalogId::Ising, CatalogId::Fibonacci] {
        let m = md(id);
        let c = ZMatrix::permutation(&m.derived().map_err(|e| e.to_string())?.conj_perm);
        for z in [ZMatrix::identity(m.rank()), c] {
            for s in check_series(&m, &z, 4).map_err(|e| e.to_string())? {
                n_checks += 1;
                // the empty tuple has no lhs; its coefficient is the empty vacuum, 1
                let lhs_ok = match &s.lhs {
                    Some(l) => *l == s.coefficient,
                    None => s.n == 0 && s.coefficient.is_one(),
                };
                ensure(s.equal && lhs_ok, || format!("{id} n={}: {s:?}", s.n))?;
            }
        }
    }
    Ok(format!("{n_checks} coefficients equal lhs and rhs"))
}

fn c6_traces() -> Outcome {
    for (file, want) in [("d4", (4u64, 8u64)), ("e6", (6, 12))] {
        let path = fixtures().join(format!("contexts/{file}.json"));
        let ctx = decode_context(&DataFile::read(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let z = ctx.z_matrix().map_err(|e| e.to_string())?;
        let t = trace_identities(&z);
        ensure((t.tr_z, t.tr_zzt) == want, || format!("{file}: {t:?}"))?;
        ensure(
            (ctx.module_rank as u64, ctx.dual_rank as u64) == want,
            || format!("{file}: declared ranks ({}, {})", ctx.module_rank, ctx.dual_rank),
        )?;
        let rep = verify_context(&ctx).map_err(|e| e.to_string())?;
        ensure(rep.passed, || format!("{file}: {rep:?}"))?;
    }
    Ok("D4 (4, 8), E6 (6, 12) match declared ranks".into())
}

fn c7_exponents() -> Outcome {
    let mut names = Vec::new();
    for k in 1..=10 {
        let ctx = trivial_context(&md(CatalogId::Su2(k))).map_err(|e| e.to_string())?;
        let rep = exponents_check(&ctx).map_err(|e| e.to_string())?;
        ensure(rep.passed, || format!("A_{}: {rep:?}", k + 1))?;
    }
    names.push("A-series k ≤ 10".to_string());
    for file in ["d4", "e6"] {
        let path = fixtures().join(format!("contexts/{file}.json"));
        let ctx = decode_context(&DataFile::read(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let rep = exponents_check(&ctx).map_err(|e| e.to_string())?;
        ensure(rep.passed, || format!("{file}: {rep:?}"))?;
        names.push(file.to_uppercase());
    }
    Ok(names.join(", "))
}

fn c8_double_z() -> Outcome {
    let mut n = 0;
    for k in [4, 10] {
        let m = md(CatalogId::Su2(k));
        let zs = physical(&m)?;
        for a in &zs {
            for b in &zs {
                n += 1;
                let d = double_z(&m, a, b).map_err(|e| e.to_string())?;
                ensure(d.passed(), || format!("su2({k}): {d:?}"))?;
            }
        }
    }
    Ok(format!("{n} ordered pairs commute with s̃ and τ, μ·Tr integral"))
}

fn scalar_in(n: u32) -> impl Strategy<Value = ExactScalar> {
    prop::collection::vec((0..n as i64, -6i64..=6, 1i64..=4), 0..6).prop_map(move |terms| {
        terms.into_iter().fold(ExactScalar::zero(n), |acc, (e, p, q)| {
            &acc + &ExactScalar::zeta(n, e).mul_rational(&BigRational::new(p.into(), q.into()))
        })
    })
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config::with_cases(cases), TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn c9_properties() -> Outcome {
    let triples = (1u32..=60).prop_flat_map(|n| (scalar_in(n), scalar_in(n), scalar_in(n)));
    runner(10_000)
        .run(&triples, |(a, b, c)| {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a + &(-&a)).is_zero());
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
            Ok(())
        })
        .map_err(|e| format!("field axioms: {e}"))?;
    runner(16)
        .run(&(1u32..=10, 1u64..=2, 2usize..=4), |(k, bound, workers)| {
            let m = md(CatalogId::Su2(k));
            let mut one = EnumerationConfig::new(Mode::Bounded(bound));
            one.workers = Some(1);
            let mut many = one.clone();
            many.workers = Some(workers);
            prop_assert_eq!(
                enumerate_invariants_with(&m, &one).unwrap(),
                enumerate_invariants_with(&m, &many).unwrap()
            );
            Ok(())
        })
        .map_err(|e| format!("enumeration determinism: {e}"))?;
    let ids = sweep();
    for id in &ids {
        let m = md(*id);
        let text = encode_modular_data(&m).to_text();
        let back = decode_modular_data(&DataFile::from_text(&text).map_err(|e| e.to_string())?)
            .map_err(|e| format!("{id}: {e}"))?;
        ensure(back == m && encode_modular_data(&back).to_text() == text, || format!("{id}: round trip differs"))?;
    }
    Ok(format!(
        "10000 field-axiom cases, 16 worker-count cases, {} catalog round trips",
        ids.len()
    ))
}

/// Report only: the scan result is recorded whatever it contains.
fn c10_scan() -> Outcome {
    let start = Instant::now();
    let mut reports: Vec<ScanReport> = Vec::new();
    for k in 1..=10 {
        let r = scan_bounded(&md(CatalogId::Su2(k)), 3, 3, 64).map_err(|e| format!("su2({k}): {e}"))?;
        reports.push(r);
    }
    let points: usize = reports.iter().map(|r| r.points).sum();
    let tuples: usize = reports.iter().map(|r| r.tuples_checked).sum();
    let found: usize = reports.iter().map(|r| r.counterexamples.len()).sum();
    let artifact = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("obstruction_scan.json");
    encode_report(&reports).write(&artifact).map_err(|e| e.to_string())?;
    Ok(format!(
        "{points} commutant points, {tuples} tuples, {found} counterexamples, {:.2}s; artifact {}",
        start.elapsed().as_secs_f64(),
        artifact.display()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 catalog soundness", c1_catalog_soundness),
        ("2 ADE reproduction", c2_ade),
        ("3 vacuum identity", c3_vacuum_identity),
        ("4 specializations", c4_specializations),
        ("5 series", c5_series),
        ("6 trace identities", c6_traces),
        ("7 exponents", c7_exponents),
        ("8 double Z", c8_double_z),
        ("9 property suites", c9_properties),
        ("10 obstruction scan (report)", c10_scan),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {name} [{secs:.2}s]: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} [{secs:.2}s]: {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
