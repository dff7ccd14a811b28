//! Golden files under `fixtures/` are produced by this test and never edited
//! by hand. Run with `MODINV_BLESS=1` to rewrite them.

use std::collections::BTreeMap;
use std::path::PathBuf;

use modinv::characters::{
    calibrate_trivial, AnsatzFamily, ChiTable, Chirality, DoubleCharTable,
};
use modinv::exact_algebra::ExactScalar;
use modinv::interface::{
    encode_chi_tables, encode_context, encode_report, encode_z_matrix, CharacterTables,
};
use modinv::invariant_search::{enumerate_invariants, Mode, ZMatrix};
use modinv::modular_data::{catalog, CatalogId, ModularData};
use modinv::morita_context::{graph_context, trivial_context, GraphFixture};
use num_rational::BigRational;

fn label(md: &ModularData, z: &ZMatrix) -> String {
    if *z == ZMatrix::identity(md.rank()) {
        return "a".into();
    }
    for f in GraphFixture::ALL {
        if f.level() + 1 == md.rank() as u32 {
            if let Ok(ctx) = graph_context(md, f) {
                if ctx.z_matrix().ok().as_ref() == Some(z) {
                    return f.name().into();
                }
            }
        }
    }
    let r = md.rank();
    let is_perm = (0..r).all(|j| (0..r).map(|k| z.get(j, k)).sum::<u64>() == 1)
        && (0..r).all(|k| (0..r).map(|j| z.get(j, k)).sum::<u64>() == 1);
    match (is_perm, r) {
        (true, _) => "perm".into(),
        // the only level-16 invariant that is neither a permutation nor D10
        (false, 17) => "e7".into(),
        _ => "block".into(),
    }
}

fn unit_supported(md: &ModularData) -> ChiTable {
    let d = md.dims_unchecked();
    let n = md.conductor();
    ChiTable {
        chirality: Chirality::Plus,
        values: (0..md.rank())
            .map(|j| {
                (0..md.rank())
                    .map(|y| if j == md.unit() { d[y].clone() } else { ExactScalar::zero(n) })
                    .collect()
            })
            .collect(),
        claims_conjugation_symmetry: true,
    }
}

/// `Ξ_{ℓk}(Y) = δ_{ℓk} conj(s̃_{ℓY}) / (8 d_ℓ)`; `8 = μ^{3/2}` for Ising.
fn ising_xi(md: &ModularData) -> DoubleCharTable {
    let d = md.dims_unchecked();
    let n = md.conductor();
    let r = md.rank();
    let eighth = BigRational::new(1.into(), 8.into());
    let plus_minus = (0..r)
        .map(|l| {
            (0..r)
                .map(|k| {
                    (0..r)
                        .map(|y| {
                            if l != k {
                                ExactScalar::zero(n)
                            } else {
                                (&md.s(l, y).conj() * &d[l].inv().unwrap()).mul_rational(&eighth)
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    DoubleCharTable { plus_minus, minus_plus: None }
}

fn generate() -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for k in [4, 10, 16, 28] {
        let md = catalog(&CatalogId::Su2(k)).unwrap();
        for z in enumerate_invariants(&md, Mode::Physical).unwrap() {
            let name = format!("zmat/{}.{}.json", md.name(), label(&md, &z));
            out.insert(name, encode_z_matrix(&z, Some(md.name())).to_text());
        }
    }
    for f in GraphFixture::ALL {
        let md = catalog(&CatalogId::Su2(f.level())).unwrap();
        let ctx = graph_context(&md, f).unwrap();
        out.insert(format!("contexts/{}.json", f.name()), encode_context(&ctx).to_text());
    }
    let mut calib = Vec::new();
    for id in [CatalogId::Ising, CatalogId::Fibonacci] {
        let md = catalog(&id).unwrap();
        let ctx = trivial_context(&md).unwrap();
        out.insert(format!("contexts/trivial_{}.json", md.name()), encode_context(&ctx).to_text());
        for fam in [AnsatzFamily::SMatrix, AnsatzFamily::Dimensions] {
            calib.push(calibrate_trivial(&md, fam).unwrap());
        }
    }
    out.insert("calibration.json".into(), encode_report(&calib).to_text());
    let fib = catalog(&CatalogId::Fibonacci).unwrap();
    out.insert(
        "chi/fibonacci_unit_supported.json".into(),
        encode_chi_tables(&CharacterTables { single: Some(unit_supported(&fib)), double: None }).to_text(),
    );
    let ising = catalog(&CatalogId::Ising).unwrap();
    out.insert(
        "chi/ising_trace_toy.json".into(),
        encode_chi_tables(&CharacterTables { single: None, double: Some(ising_xi(&ising)) }).to_text(),
    );
    out
}

#[test]
fn golden_fixtures_match_regeneration() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let bless = std::env::var_os("MODINV_BLESS").is_some();
    let mut stale = Vec::new();
    for (rel, text) in generate() {
        let path = root.join(&rel);
        if bless {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &text).unwrap();
        } else if std::fs::read_to_string(&path).ok().as_deref() != Some(text.as_str()) {
            stale.push(rel);
        }
    }
    assert!(stale.is_empty(), "stale fixtures (rerun with MODINV_BLESS=1): {stale:?}");
}
