mod common;

use circulant_canon::graph::{cayley, relabel};
use circulant_canon::spectral::distinct_eigenvalue_count;
use circulant_canon::walk::{bareiss_rank, walk_matrix, walk_rank, walk_row_classes};
use common::{random_perm, random_set, rng};
use num_bigint::BigInt;

#[test]
fn rank_bridge_on_random_sets() {
    let mut r = rng(5);
    for n in 9..=24 {
        for directed in [true, false] {
            for _ in 0..20 {
                let s = random_set(n, directed, &mut r);
                let w = walk_matrix(&cayley(&s), &[0]).unwrap();
                assert_eq!(walk_rank(&w), distinct_eigenvalue_count(&s), "{s}");
            }
        }
    }
}

#[test]
fn walk_matrices_follow_relabelings() {
    let mut r = rng(6);
    for n in [5, 12, 20] {
        let x = cayley(&random_set(n, true, &mut r));
        let p = random_perm(n, &mut r);
        let y = relabel(&x, &p).unwrap();
        let wx = walk_matrix(&x, &[0, 1]).unwrap();
        let wy = walk_matrix(&y, &[p.apply(0), p.apply(1)]).unwrap();
        for v in 0..n {
            assert_eq!(wx.row(v), wy.row(p.apply(v)));
        }
        assert_eq!(walk_row_classes(&x, &[0]).unwrap().len(), n);
    }
}

#[test]
fn bareiss_small_matrices() {
    let m = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    };
    assert_eq!(bareiss_rank(m(&[&[1, 2], &[2, 4]])), 1);
    assert_eq!(bareiss_rank(m(&[&[0, 1], &[1, 0]])), 2);
    assert_eq!(bareiss_rank(m(&[&[0, 0], &[0, 0]])), 0);
    assert_eq!(bareiss_rank(m(&[&[2, 4, 6], &[1, 3, 5], &[3, 7, 11]])), 2);
    assert_eq!(bareiss_rank(Vec::new()), 0);
}
