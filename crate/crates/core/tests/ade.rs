use modinv::invariant_search::{enumerate_invariants, Mode, ZMatrix};
use modinv::modular_data::{catalog, CatalogId};

fn physical(k: u32) -> Vec<ZMatrix> {
    enumerate_invariants(&catalog(&CatalogId::Su2(k)).unwrap(), Mode::Physical).unwrap()
}

/// Sets `{j, k}` with `z_jk = 1` for an exceptional block-diagonal invariant.
fn blocks(z: &ZMatrix) -> Vec<Vec<usize>> {
    let r = z.rank();
    let mut seen = vec![false; r];
    let mut out = Vec::new();
    for j in 0..r {
        if seen[j] || z.get(j, j) == 0 {
            continue;
        }
        let b: Vec<usize> = (0..r).filter(|k| z.get(j, *k) != 0).collect();
        for k in &b {
            seen[*k] = true;
        }
        out.push(b);
    }
    out
}

fn is_permutation(z: &ZMatrix) -> bool {
    (0..z.rank()).all(|j| (0..z.rank()).map(|k| z.get(j, k)).sum::<u64>() == 1)
}

#[test]
fn level_ten_has_e6() {
    let zs = physical(10);
    assert_eq!(zs.len(), 3);
    let e6: Vec<&ZMatrix> = zs
        .iter()
        .filter(|z| !is_permutation(z) && z.entries().iter().all(|x| *x <= 1) && z.get(0, 6) == 1)
        .collect();
    assert_eq!(e6.len(), 1);
    assert_eq!(blocks(e6[0]), vec![vec![0, 6], vec![3, 7], vec![4, 10]]);
    assert_eq!((e6[0].trace(), e6[0].trace_zzt()), (6, 12));
}

#[test]
fn level_sixteen_has_three() {
    assert_eq!(physical(16).len(), 3);
}

#[test]
fn level_twenty_eight_has_e8() {
    let zs = physical(28);
    assert_eq!(zs.len(), 3);
    let e8 = zs.iter().find(|z| z.get(0, 10) == 1).expect("E8 invariant");
    assert_eq!(
        blocks(e8),
        vec![vec![0, 10, 18, 28], vec![6, 12, 16, 22]]
    );
}
