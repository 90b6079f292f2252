use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use regev_core::codes::{rs_code, LinearCode, Side};
use regev_core::config::Budget;
use regev_core::decode::{berlekamp_welch, brute_force_list, unique_radius};
use regev_core::galois::fourier::fourier_transform;
use regev_core::galois::{character, poly, ComplexFunction, Direction, FieldVector, Fq};
use regev_core::noise::{center_probability, fourth_power_bound, kv_bound, tail_mass, ConstraintSet, ErrorProfile};
use regev_core::opi::{brute_force_icc, brute_force_opi, icc_to_opi, opi_to_icc, OpiInstance};
use regev_core::qsim::{DecoderUnitary, QuantumState};
use regev_core::thresholds::{tau_max, Criterion, ThresholdQuery};

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5, 7, 11, 13])
}

fn vector(q: u32, n: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..q, n)
}

fn b() -> Budget {
    Budget::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn characters_are_homomorphic_and_symmetric(
        (q, x, x2, y) in (prime(), 1usize..6).prop_flat_map(|(q, n)| (Just(q), vector(q, n), vector(q, n), vector(q, n)))
    ) {
        let f = Fq::new(q).unwrap();
        let (x, x2, y) = (FieldVector::new(f, x), FieldVector::new(f, x2), FieldVector::new(f, y));
        let lhs = character(&y, &x.add(&x2).unwrap()).unwrap();
        let rhs = character(&y, &x).unwrap() * character(&y, &x2).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert_eq!(character(&y, &x).unwrap(), character(&x, &y).unwrap());
    }

    #[test]
    fn character_transpose_identity(q in prime(), n in 2usize..7, seed in any::<u64>()) {
        let f = Fq::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = 1 + (seed as usize) % (n - 1);
        let code = LinearCode::random(f, n, k, &mut rng).unwrap();
        let g = code.generator();
        let x: Vec<u32> = (0..k).map(|i| ((seed >> i) as u32) % q).collect();
        let y: Vec<u32> = (0..n).map(|i| ((seed >> (i + 7)) as u32) % q).collect();
        let lhs = character(&FieldVector::new(f, y.clone()), &FieldVector::new(f, g.vec_mul(&x))).unwrap();
        let rhs = character(&FieldVector::new(f, g.mul_vec(&y)), &FieldVector::new(f, x)).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn fourier_round_trip(
        (q, n, re, im) in (prop::sample::select(vec![2u32, 3, 5]), 1usize..4)
            .prop_flat_map(|(q, n)| {
                let size = (q as usize).pow(n as u32);
                (Just(q), Just(n), prop::collection::vec(-1.0f64..1.0, size), prop::collection::vec(-1.0f64..1.0, size))
            })
    ) {
        let amps = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let f = ComplexFunction::from_amplitudes(Fq::new(q).unwrap(), n, amps).unwrap();
        let hat = fourier_transform(&f, Direction::Forward, &b()).unwrap();
        prop_assert!((hat.norm() - f.norm()).abs() < 1e-10);
        let back = fourier_transform(&hat, Direction::Inverse, &b()).unwrap();
        for (a, c) in back.amps.iter().zip(&f.amps) {
            prop_assert!((a - c).norm() < 1e-10);
        }
    }

    #[test]
    fn codes_are_consistent_and_cosets_partition(q in prop::sample::select(vec![2u32, 3, 5]), n in 2usize..6, seed in any::<u64>()) {
        let f = Fq::new(q).unwrap();
        let k = 1 + (seed as usize) % (n - 1);
        let code = LinearCode::random(f, n, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(code.generator().mul(&code.parity_check().transpose()).unwrap().is_zero());
        let cosets = (q as usize).pow((n - k) as u32);
        let mut counts = vec![0usize; cosets];
        for i in 0..(q as usize).pow(n as u32) {
            let s = code.syndrome(&FieldVector::from_index(f, n, i), Side::Primal).unwrap();
            counts[s.index()] += 1;
        }
        // Every primal coset has exactly q^k words, the code itself included.
        prop_assert!(counts.iter().all(|&c| c == (q as usize).pow(k as u32)));
    }

    #[test]
    fn profiles_satisfy_parseval_and_product_structure(
        q in prop::sample::select(vec![2u32, 3, 5, 7]), n in 1usize..5, tau in 0.5f64..1.0, seed in any::<u64>()
    ) {
        let size = 1 + (seed as usize) % (q as usize - 1);
        let profile = ErrorProfile::random(q, n, size, tau, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        for i in 0..n {
            let hat: f64 = profile.u_hat(i).iter().map(|v| v * v).sum();
            let u: f64 = profile.u(i).iter().map(|a| a.norm_sqr()).sum();
            prop_assert!((hat - 1.0).abs() < 1e-12 && (u - 1.0).abs() < 1e-12);
        }
        let hat = fourier_transform(&profile.materialize(&b()).unwrap(), Direction::Forward, &b()).unwrap();
        let product = profile.materialize_hat(&b()).unwrap();
        for (a, c) in hat.amps.iter().zip(&product.amps) {
            prop_assert!((a - c).norm() < 1e-10);
        }
        for ttilde in [0.0, 0.3, 0.5] {
            if ttilde > tau {
                continue;
            }
            let t = ConstraintSet::from_profile(&profile, ttilde).unwrap();
            let inside: f64 = hat.points().filter(|(y, _)| t.contains(y)).map(|(_, a)| a.norm_sqr()).sum();
            prop_assert!((inside - (1.0 - tail_mass(&profile, ttilde).unwrap().exact)).abs() < 1e-10);
        }
    }

    #[test]
    fn berlekamp_welch_matches_nearest_within_radius(
        (q, k, y) in prop::sample::select(vec![5u32, 7])
            .prop_flat_map(|q| (Just(q), 1usize..5))
            .prop_flat_map(|(q, k)| (Just(q), Just(k), vector(q, q as usize)))
    ) {
        let code = rs_code(q, k).unwrap();
        let radius = unique_radius(code.n(), k);
        let nearest = brute_force_list(&code, &y, radius, &b()).unwrap();
        prop_assert_eq!(berlekamp_welch(&code, &y).unwrap(), nearest.first().cloned());
    }

    #[test]
    fn threshold_saturates(
        kind in prop::sample::select(vec![Criterion::Bw, Criterion::Gs, Criterion::Kv]),
        rate in 0.05f64..0.95,
        rho in 0.05f64..0.95,
    ) {
        let tau = tau_max(kind, rate, rho).unwrap();
        let query = ThresholdQuery::new(kind, rate, rho);
        prop_assert!(query.holds(tau));
        if tau < 1.0 - 1e-6 {
            prop_assert!(!query.holds(tau + 1e-6));
        }
        let c = center_probability(tau, rho);
        let expected = match kind {
            Criterion::Bw => c,
            Criterion::Gs => c * c,
            _ => kv_bound(tau, rho),
        };
        prop_assert!((query.rhs(tau) - expected).abs() < 1e-12);
    }

    #[test]
    fn interval_kv_matches_density_form(q in prop::sample::select(vec![11u32, 13, 17, 101, 251]), zf in 0.0f64..1.0, tau in 0.3f64..1.0) {
        let z = ((q - 3) as f64 / 2.0 * zf) as u32;
        let rho = (2 * z + 1) as f64 / q as f64;
        prop_assume!(tau >= rho);
        let explicit = fourth_power_bound(q, z, tau).unwrap();
        prop_assert!((explicit - kv_bound(tau, rho)).abs() < 1e-10);
        let q_rhs = ThresholdQuery::kv_interval(0.5, q, z).rhs(tau);
        prop_assert!((q_rhs - explicit).abs() < 1e-15);
    }

    #[test]
    fn interpolation_inverts_evaluation(q in prop::sample::select(vec![3u32, 5, 7, 11]), seed in any::<u64>()) {
        let f = Fq::new(q).unwrap();
        let k = 1 + (seed as usize) % (q as usize - 1);
        let coeffs: Vec<u32> = (0..k).map(|i| ((seed >> (3 * i)) as u32) % q).collect();
        let xs: Vec<u32> = (0..q).collect();
        let ys = poly::eval_all(f, &coeffs);
        let mut back = poly::interpolate(f, &xs, &ys).unwrap();
        back.resize(k, 0);
        prop_assert_eq!(&back, &coeffs);
        prop_assert_eq!(rs_code(q, k).unwrap().encode(&coeffs), ys);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn opi_and_coset_routes_agree(
        q in prop::sample::select(vec![2u32, 3, 5, 7]), k in 1usize..4, size in 1usize..7, tau in 0.1f64..1.0, seed in any::<u64>()
    ) {
        prop_assume!(k < q as usize && size <= q as usize);
        let inst = OpiInstance::generate(q, k, size, tau, seed).unwrap();
        let direct = brute_force_opi(&inst, &b()).unwrap();
        let form = opi_to_icc(&inst).unwrap();
        let (y, count) = brute_force_icc(&form, &b()).unwrap();
        prop_assert_eq!(direct.count, count);
        prop_assert_eq!(icc_to_opi(&inst, &y).unwrap().count, count);
    }

    #[test]
    fn decoder_unitary_preserves_norm(q in prop::sample::select(vec![2u32, 3]), seed in any::<u64>(), symmetrize in any::<bool>()) {
        use rand::Rng;
        let n = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = LinearCode::random(Fq::new(q).unwrap(), n, 1, &mut rng).unwrap();
        let table: Vec<usize> = (0..(q as usize).pow(n as u32)).map(|_| rng.gen_range(0..q as usize)).collect();
        let mut u = DecoderUnitary::from_table(&code, table).unwrap();
        if symmetrize {
            u = u.symmetrized();
        }
        let dims = u.dims();
        let mut state = QuantumState::zeros(q, &dims, &b()).unwrap();
        for a in state.amps_mut() {
            *a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let original = state.clone();
        u.apply(&mut state, u.default_map());
        prop_assert!((state.norm() - original.norm()).abs() < 1e-9);
        u.apply_adjoint(&mut state, u.default_map());
        for (a, c) in state.amps().iter().zip(original.amps()) {
            prop_assert!((a - c).norm() < 1e-9);
        }
    }
}
