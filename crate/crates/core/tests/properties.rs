use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use riccati_kyp::cli::SystemDocument;
use riccati_kyp::fixtures::{random_complex, random_hermitian, random_pd, random_psd_of_rank, random_system, similarity};
use riccati_kyp::linalg::{c, identity, quadratic_form, spectral_norm, CVector};
use riccati_kyp::opcore::{loewner_compare, psd_pseudo_inverse, psd_sqrt, HermitianOperator, LoewnerOrder};
use riccati_kyp::riccati::{equality_gap, kyp_form, kyp_lmi, membership, transported_surplus};
use riccati_kyp::solver::{fixed_point_step, solve_re, solve_re_scalar, SolverConfig};
use riccati_kyp::sysmodel::{adjoint, dissipation_check, simulate, stack_state_input, transfer_eval};
use riccati_kyp::{StorageOperator, Tolerances};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psd_sqrt_squares_back(seed in any::<u64>(), n in 1usize..6, rank in 0usize..6) {
        let mut r = rng(seed);
        let a = random_psd_of_rank(&mut r, n, rank.min(n));
        let s = psd_sqrt(&a, 1e-12).unwrap();
        prop_assert!(spectral_norm(&(s.matrix() * s.matrix() - a.matrix())) <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn pseudo_inverse_is_moore_penrose(seed in any::<u64>(), n in 1usize..6, rank in 0usize..6) {
        let mut r = rng(seed);
        let a = random_psd_of_rank(&mut r, n, rank.min(n));
        let p = psd_pseudo_inverse(&a, 1e-12).unwrap();
        let (am, pm) = (a.matrix(), p.matrix());
        prop_assert!(spectral_norm(&(am * pm * am - am)) <= 1e-9);
        prop_assert!(spectral_norm(&(pm * am * pm - pm)) <= 1e-9);
    }

    #[test]
    fn loewner_order_reverses(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let a = random_hermitian(&mut r, n, 1.0);
        let b = random_hermitian(&mut r, n, 1.0);
        let ab = loewner_compare(&a, &b, 1e-12).unwrap();
        let ba = loewner_compare(&b, &a, 1e-12).unwrap();
        prop_assert_eq!(ab, ba.reversed());
        let shifted = HermitianOperator::new(a.matrix() + identity(n) * c(0.5, 0.0)).unwrap();
        prop_assert_eq!(loewner_compare(&a, &shifted, 1e-12).unwrap(), LoewnerOrder::LessEq);
    }

    #[test]
    fn kyp_form_is_lmi_quadratic_form(seed in any::<u64>(), n in 1usize..4, m in 1usize..4, p in 1usize..4) {
        let mut r = rng(seed);
        let sigma = random_system(&mut r, n, m, p, 1.0);
        let h = StorageOperator::new(random_pd(&mut r, n, 0.2, 5.0)).unwrap();
        let (x, u) = (random_vector(&mut r, n), random_vector(&mut r, m));
        let direct = kyp_form(&sigma, &h, &x, &u).unwrap();
        let lmi = kyp_lmi(&sigma, &h).unwrap();
        let via_lmi = quadratic_form(lmi.matrix(), &stack_state_input(&x, &u));
        prop_assert!((direct - via_lmi).abs() <= 1e-10 * (1.0 + direct.abs()));
    }

    #[test]
    fn membership_is_similarity_invariant(seed in any::<u64>(), n in 1usize..4, m in 1usize..3, p in 1usize..3) {
        let mut r = rng(seed);
        let norm = r.gen_range(0.5..1.1);
        let sigma = random_system(&mut r, n, m, p, norm);
        let h = StorageOperator::new(random_pd(&mut r, n, 0.5, 2.0)).unwrap();
        let t = identity(n) + random_complex(&mut r, n, n) * c(0.3, 0.0);
        prop_assume!(spectral_norm(&t.clone().try_inverse().unwrap_or(identity(n) * c(1e9, 0.0))) < 1e3);
        let t_inv = t.clone().try_inverse().unwrap();
        let moved = similarity(&sigma, &t);
        let h_moved = StorageOperator::from_matrix(t_inv.adjoint() * h.matrix() * &t_inv).unwrap();
        let tols = Tolerances::default();
        let a = membership(&sigma, &h, &tols).unwrap();
        let b = membership(&moved, &h_moved, &tols).unwrap();
        // Skip draws that sit in the boundary band of either verdict.
        prop_assume!(a.diagnostics.lmi_min_eig.abs() > 1e-6 && b.diagnostics.lmi_min_eig.abs() > 1e-6);
        prop_assert_eq!(a.in_ri, b.in_ri);
    }

    #[test]
    fn inversion_maps_ri_circ_to_adjoint(seed in any::<u64>(), n in 1usize..4, m in 1usize..3, p in 1usize..3) {
        let mut r = rng(seed);
        let norm = r.gen_range(0.3..0.95);
        let sigma = random_system(&mut r, n, m, p, norm);
        let h = StorageOperator::from_matrix(identity(n) + random_hermitian(&mut r, n, 0.05).matrix()).unwrap();
        let tols = Tolerances::default();
        let v = membership(&sigma, &h, &tols).unwrap();
        prop_assume!(v.in_ri_circ);
        let w = membership(&adjoint(&sigma), &h.inverse(), &tols).unwrap();
        prop_assert!(w.in_ri_circ);
    }

    #[test]
    fn adjoint_transfer_is_reflected(seed in any::<u64>(), n in 1usize..4, m in 1usize..3, p in 1usize..3) {
        let mut r = rng(seed);
        let sigma = random_system(&mut r, n, m, p, 0.9);
        let lambda = c(r.gen_range(-0.6..0.6), r.gen_range(-0.6..0.6));
        let direct = transfer_eval(&sigma, lambda.conj()).unwrap().value.adjoint();
        let via_adjoint = transfer_eval(&adjoint(&sigma), lambda).unwrap().value;
        prop_assert!(spectral_norm(&(direct - via_adjoint)) <= 1e-12);
    }

    #[test]
    fn equality_gap_is_transported_surplus(seed in any::<u64>(), n in 1usize..4, m in 1usize..3, p in 1usize..3) {
        let mut r = rng(seed);
        let norm = r.gen_range(0.3..0.95);
        let sigma = random_system(&mut r, n, m, p, norm);
        let h = StorageOperator::from_matrix(identity(n) + random_hermitian(&mut r, n, 0.1).matrix()).unwrap();
        let tols = Tolerances::default();
        prop_assume!(membership(&sigma, &h, &tols).unwrap().in_ri);
        let gap = equality_gap(&sigma, &h, &tols).unwrap();
        let transported = transported_surplus(&sigma, &h, &tols).unwrap().norm();
        prop_assert!((gap - transported).abs() <= 1e-8 * (1.0 + transported), "{} vs {}", gap, transported);
    }

    #[test]
    fn storage_margins_match_kyp_form(seed in any::<u64>(), n in 1usize..4, m in 1usize..3, p in 1usize..3) {
        let mut r = rng(seed);
        let sigma = random_system(&mut r, n, m, p, 1.0);
        let h = StorageOperator::new(random_pd(&mut r, n, 0.5, 2.0)).unwrap();
        let x0 = random_vector(&mut r, n);
        let inputs: Vec<CVector> = (0..10).map(|_| random_vector(&mut r, m)).collect();
        let traj = simulate(&sigma, &x0, &inputs).unwrap();
        let report = dissipation_check(&traj, h.operator(), 0.0).unwrap();
        for (k, u) in inputs.iter().enumerate() {
            let f = kyp_form(&sigma, &h, &traj.states[k], u).unwrap();
            prop_assert!((report.margins[k] - f).abs() <= 1e-10 * (1.0 + f.abs()));
        }
    }

    #[test]
    fn fixed_point_iterates_increase(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let norm = r.gen_range(0.3..0.9);
        let sigma = random_system(&mut r, n, 1, 1, norm);
        let tols = Tolerances::default();
        let mut prev = riccati_kyp::CMatrix::zeros(n, n);
        for _ in 0..8 {
            let next = fixed_point_step(&sigma, &prev, &tols).unwrap();
            let diff = HermitianOperator::new(&next - &prev).unwrap();
            prop_assert!(diff.min_eigenvalue() >= -1e-10 * (1.0 + next.norm()));
            prev = next;
        }
    }

    #[test]
    fn scalar_closed_form_agrees_with_search(seed in any::<u64>()) {
        let mut r = rng(seed);
        let norm = r.gen_range(0.3..0.95);
        let sigma = random_system(&mut r, 1, 1, 1, norm);
        let closed = solve_re_scalar(&sigma).unwrap();
        for h in &closed.members {
            let v = membership(&sigma, h, &Tolerances::default()).unwrap();
            prop_assert!(v.in_re);
        }
        if let Ok(search) = solve_re(&sigma, &SolverConfig::default()) {
            for h in &search.members {
                prop_assert!(closed.members.iter().any(|g| (g.matrix() - h.matrix()).norm() <= 1e-7 * (1.0 + g.matrix().norm())));
            }
        }
    }

    #[test]
    fn document_round_trip_is_bit_exact(seed in any::<u64>(), n in 1usize..4, m in 1usize..3, p in 1usize..3) {
        let mut r = rng(seed);
        let norm = r.gen_range(1e-3..1e3);
        let sigma = random_system(&mut r, n, m, p, norm);
        let doc = SystemDocument::from_system("random", &sigma);
        let back = SystemDocument::from_json(&doc.to_json()).unwrap();
        let s2 = back.realization().unwrap();
        for (x, y) in [(sigma.a(), s2.a()), (sigma.b(), s2.b()), (sigma.c(), s2.c()), (sigma.d(), s2.d())] {
            for (u, v) in x.iter().zip(y.iter()) {
                prop_assert_eq!(u.re.to_bits(), v.re.to_bits());
                prop_assert_eq!(u.im.to_bits(), v.im.to_bits());
            }
        }
    }
}
