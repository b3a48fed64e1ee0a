use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use uwoi::linalg::{to_f64, QMatrix};
use uwoi::localfield::{random_rational_matrix, random_unipotent, solve_in_n};
use uwoi::orbits::{induce_orbit, richardson_orbit, NilpotentOrbit, Partition};
use uwoi::richardson::{epsilon_count_formula, OrbitData};
use uwoi::roots::Levi;
use uwoi::verify::{gm_trial, weight_identities};
use uwoi::zeta::{padic_z_exact, z_value, ZetaBackend};

/// Partitions of 1..=max_n, as non-increasing part lists.
fn partition(max_n: usize) -> impl Strategy<Value = Partition> {
    (1..=max_n).prop_flat_map(|n| {
        let all = Partition::all(n);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

fn composition(max_n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=max_n).prop_filter("size", move |c| c.iter().sum::<usize>() <= max_n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partition_text_round_trip(p in partition(9)) {
        let text = p.parts().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        prop_assert_eq!(Partition::parse(&text).unwrap(), p.clone());
        prop_assert_eq!(p.transpose().transpose(), p);
    }

    #[test]
    fn richardson_count_matches_formula(p in partition(6)) {
        let o = NilpotentOrbit::new(p);
        let data = OrbitData::new(&o).unwrap();
        prop_assert_eq!(data.richardson.len() as u128, epsilon_count_formula(&o));
    }

    #[test]
    fn richardson_orbit_is_induced_from_zero(c in composition(7)) {
        let zeros: Vec<Partition> = c.iter().map(|&k| Partition::zero_orbit(k)).collect();
        prop_assert_eq!(richardson_orbit(&c).unwrap(), induce_orbit(&c, &zeros).unwrap());
        // Reordering the blocks does not change the induced orbit.
        let mut rev = c.clone();
        rev.reverse();
        prop_assert_eq!(richardson_orbit(&c).unwrap(), richardson_orbit(&rev).unwrap());
    }

    #[test]
    fn matrix_text_round_trip(n in 1usize..5, p in prop::sample::select(vec![2u64, 3, 5]), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_rational_matrix(n, p, &mut rng);
        prop_assert_eq!(QMatrix::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn conjugator_round_trip(p in partition(5), seed in any::<u64>()) {
        let data = OrbitData::new(&NilpotentOrbit::new(p)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n0 = random_unipotent(&data, &mut rng);
        let y = n0.inverse().unwrap().mul(&data.x).mul(&n0);
        let n = solve_in_n(&data, &y).unwrap();
        prop_assert_eq!(n.inverse().unwrap().mul(&data.x).mul(&n), y);
    }

    #[test]
    fn random_families_satisfy_polytope_identities(c in composition(5), seed in any::<u64>()) {
        prop_assume!(c.iter().sum::<usize>() >= 2);
        let m = Levi::standard(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = gm_trial(&m, &mut rng).unwrap();
        prop_assert!(t.ok, "{:?}", t);
    }

    #[test]
    fn weight_identities_hold(p in partition(4), prime in prop::sample::select(vec![2u64, 3, 5]), seed in any::<u64>()) {
        let o = NilpotentOrbit::new(p);
        prop_assume!(o.r >= 2);
        let data = OrbitData::new(&o).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_rational_matrix(data.n(), prime, &mut rng);
        let rep = weight_identities(&data, &g, prime, &mut rng).unwrap();
        prop_assert!(rep.ok, "{:?}", rep);
    }

    #[test]
    fn padic_zeta_exact_matches_float(p in prop::sample::select(vec![2u64, 3, 5, 7]), s in 1i64..6) {
        let exact = to_f64(&padic_z_exact(p, s).unwrap());
        let float = z_value(&ZetaBackend::Padic(p), 1, s as f64).unwrap();
        prop_assert!((exact - float).abs() <= 1e-12 * exact.abs());
    }
}
