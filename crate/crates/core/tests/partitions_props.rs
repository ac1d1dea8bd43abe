use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use qv_core::partitions::{mn_character, partition_count, partitions_of, Partition};

fn p(parts: &[u32]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

/// Partition numbers from Euler's pentagonal recurrence.
fn pentagonal(n: usize) -> Vec<i64> {
    let mut out = vec![1i64];
    for k in 1..=n {
        let mut acc = 0i64;
        for j in 1i64.. {
            let g1 = (j * (3 * j - 1) / 2) as usize;
            if g1 > k {
                break;
            }
            let sign = if j % 2 == 1 { 1 } else { -1 };
            acc += sign * out[k - g1];
            let g2 = (j * (3 * j + 1) / 2) as usize;
            if g2 <= k {
                acc += sign * out[k - g2];
            }
        }
        out.push(acc);
    }
    out
}

fn partition_strategy() -> impl Strategy<Value = Partition> {
    prop::collection::vec(1u32..=6, 0..6).prop_map(Partition::from_unsorted)
}

#[test]
fn kappa_examples() {
    assert_eq!(Partition::empty().kappa(), 0);
    assert_eq!(p(&[1]).kappa(), 0);
    assert_eq!(p(&[2]).kappa(), 2);
    assert_eq!(p(&[1, 1]).kappa(), -2);
    assert_eq!(p(&[3]).kappa(), 6);
    assert_eq!(p(&[1, 1, 1]).kappa(), -6);
}

#[test]
fn transpose_examples() {
    assert_eq!(p(&[2, 1]).transpose(), p(&[2, 1]));
    assert_eq!(p(&[3]).transpose(), p(&[1, 1, 1]));
}

#[test]
fn rejects_unsorted_parts() {
    assert!(Partition::new(vec![1, 2]).is_err());
    assert!(Partition::new(vec![2, 0]).is_err());
}

#[test]
fn z_aut_examples() {
    assert_eq!(Partition::empty().z_aut(), 1);
    assert_eq!(p(&[1, 1]).z_aut(), 2);
}

#[test]
fn mass_formula() {
    for n in 0..=8 {
        let total: BigRational = partitions_of(n)
            .iter()
            .map(|nu| BigRational::new(1.into(), nu.z_aut().into()))
            .sum();
        assert!(total.is_one(), "n = {n}");
    }
}

#[test]
fn partition_counts() {
    assert_eq!(partitions_of(0), vec![Partition::empty()]);
    assert_eq!(partitions_of(4).len(), 5);
    let euler = pentagonal(12);
    for n in 0..=12u32 {
        assert_eq!(partitions_of(n).len() as i64, euler[n as usize]);
        assert_eq!(partition_count(n) as i64, euler[n as usize]);
    }
    assert_eq!(partitions_of(10).len(), 42);
}

#[test]
fn trivial_and_sign_characters() {
    for n in 1..=6 {
        for nu in partitions_of(n) {
            assert_eq!(mn_character(&p(&[n]), &nu).unwrap(), 1);
        }
    }
    // S_2: the transposition acts by -1 in the sign representation.
    assert_eq!(mn_character(&p(&[1, 1]), &p(&[2])).unwrap(), -1);
    assert_eq!(mn_character(&p(&[1, 1]), &p(&[1, 1])).unwrap(), 1);
}

#[test]
fn character_orthogonality() {
    for n in 0..=6 {
        let parts = partitions_of(n);
        for l1 in &parts {
            for l2 in &parts {
                let s: BigRational = parts
                    .iter()
                    .map(|nu| {
                        let c = mn_character(l1, nu).unwrap() * mn_character(l2, nu).unwrap();
                        BigRational::new(c.into(), nu.z_aut().into())
                    })
                    .sum();
                if l1 == l2 {
                    assert!(s.is_one(), "{l1:?}");
                } else {
                    assert!(s.is_zero(), "{l1:?} {l2:?}");
                }
            }
        }
    }
}

#[test]
fn character_size_mismatch_is_an_error() {
    assert!(mn_character(&p(&[2]), &p(&[1])).is_err());
}

proptest! {
    #[test]
    fn transpose_is_an_involution(mu in partition_strategy()) {
        let t = mu.transpose();
        prop_assert_eq!(t.transpose(), mu.clone());
        prop_assert_eq!(t.size(), mu.size());
        prop_assert!(mu.parts().windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(mu.parts().iter().sum::<u32>(), mu.size());
    }

    #[test]
    fn kappa_is_antisymmetric(mu in partition_strategy()) {
        prop_assert_eq!(mu.transpose().kappa(), -mu.kappa());
    }

    #[test]
    fn hook_length_formula_gives_dimension(mu in partition_strategy()) {
        prop_assume!(mu.size() <= 12);
        let n = mu.size();
        let factorial: u128 = (1..=n as u128).product();
        let hooks: u128 = mu.hooks().iter().map(|&h| h as u128).product();
        let ones = Partition::new(vec![1; n as usize]).unwrap();
        prop_assert_eq!(mn_character(&mu, &ones).unwrap() as u128, factorial / hooks);
    }
}
