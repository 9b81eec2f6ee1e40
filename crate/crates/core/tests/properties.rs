use std::sync::Arc;

use proptest::prelude::*;

use twistlab::analytic;
use twistlab::ansatz::{self, f_scalar, AnsatzParams};
use twistlab::corrmeas::{self, max_order, purity_upper_bound, twisted_purity, Method};
use twistlab::fock::{apply_monomial, omega_power_apply, sign_concat, single_particle_rotate};
use twistlab::models;
use twistlab::pluecker::{self, support_diameter};
use twistlab::rng;
use twistlab::samples;
use twistlab::wick;
use twistlab::{Complex64, FockBasis, ModeSet, StateVector};

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

/// `(l, n)` with `1 ≤ n < l ≤ lmax`.
fn sector(lmax: usize) -> impl Strategy<Value = (usize, usize)> {
    (3..=lmax).prop_flat_map(|l| (Just(l), 1..l))
}

/// Three pairwise disjoint subsets of `[l]`.
fn disjoint_triple(l: usize) -> impl Strategy<Value = (ModeSet, ModeSet, ModeSet)> {
    prop::collection::vec(0u8..4, l).prop_map(|labels| {
        let mut sets = [0u32; 3];
        for (i, &lab) in labels.iter().enumerate() {
            if lab < 3 {
                sets[lab as usize] |= 1 << i;
            }
        }
        (ModeSet::from_bits(sets[0]), ModeSet::from_bits(sets[1]), ModeSet::from_bits(sets[2]))
    })
}

fn parity(x: usize) -> i32 {
    if x % 2 == 0 {
        1
    } else {
        -1
    }
}

fn random_params(l: usize, g: ModeSet, k: usize, scale: f64, seed: u64) -> AnsatzParams {
    let mut r = rng::seeded(seed);
    let mut p = AnsatzParams::reference(l, g, k, Complex64::new(0.7, -0.2)).unwrap();
    for key in wick::excitations(l, g, 1..=k) {
        p.theta.insert(key, rng::complex_normal(&mut r, scale * scale));
    }
    p
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn rank_unrank_round_trip((l, n) in sector(16), pick in any::<prop::sample::Index>()) {
        let basis = FockBasis::new(l, n).unwrap();
        let i = pick.index(basis.dim());
        let s = basis.unrank(i);
        prop_assert_eq!(s.len(), n);
        prop_assert_eq!(basis.rank(s), Some(i));
    }

    #[test]
    fn sign_concat_identities((a, b, c) in disjoint_triple(8)) {
        let s = |x, y| sign_concat(x, y).unwrap();
        prop_assert_eq!(s(a, b) * s(b, a), parity(a.len() * b.len()));
        prop_assert_eq!(s(a.union(b), c), s(a, c) * s(b, c));
        prop_assert_eq!(s(a, b.union(c)), s(a, b) * s(a, c));
        prop_assert_eq!(s(ModeSet::EMPTY, a), 1);
        prop_assert_eq!(s(a, ModeSet::EMPTY), 1);
    }

    #[test]
    fn hop_and_back_is_identity(labels in prop::collection::vec(0u8..3, 8), extra in 0usize..3) {
        // label 0: in S \ P, 1: in P, 2: in Q; modes past the vector stay empty
        let mut s = ModeSet::EMPTY;
        let mut p = ModeSet::EMPTY;
        let mut q = ModeSet::EMPTY;
        for (i, &lab) in labels.iter().enumerate() {
            let m = ModeSet::single(i + 1);
            match lab {
                0 => s = s.union(m),
                1 => { s = s.union(m); p = p.union(m); }
                _ => q = q.union(m),
            }
        }
        let l = 8 + extra;
        // balance |P| and |Q| by trimming the larger one
        while p.len() > q.len() { p = p.difference(ModeSet::single(p.max_mode().unwrap())); }
        while q.len() > p.len() { q = q.difference(ModeSet::single(q.max_mode().unwrap())); }
        prop_assume!(!s.is_empty());
        let v = StateVector::basis_state(l, &s.to_vec()).unwrap();
        let there = apply_monomial(&v, q, p).unwrap();
        let back = apply_monomial(&there, p, q).unwrap();
        prop_assert_eq!(back.amplitude(s), Complex64::new(1.0, 0.0));
        prop_assert!(back.max_abs_diff(&v).unwrap() == 0.0);
    }

    #[test]
    fn rotations_compose_along_a_line(seed in any::<u64>(), t in -1.0f64..1.0, u in -1.0f64..1.0) {
        let v = samples::random_state(6, 3, seed).unwrap();
        let theta = rng::random_hermitian(&mut rng::seeded(seed ^ 1), 6, 1.0);
        let scaled = |x: f64| &theta * Complex64::new(x, 0.0);
        let two_step = single_particle_rotate(&single_particle_rotate(&v, &scaled(t)).unwrap(), &scaled(u)).unwrap();
        let one_step = single_particle_rotate(&v, &scaled(t + u)).unwrap();
        prop_assert!(two_step.max_abs_diff(&one_step).unwrap() < 1e-10);
    }
}

proptest! {
    #![proptest_config(cfg(32))]

    #[test]
    fn omega_power_vanishes_beyond_max_order((l, n) in sector(8), seed in any::<u64>()) {
        let v = samples::random_state(l, n, seed).unwrap();
        let top = max_order(l, n);
        for k in top + 1..=n {
            prop_assert_eq!(omega_power_apply(&v, k).norm_sqr(), 0.0);
        }
    }

    #[test]
    fn methods_agree_and_respect_bound((l, n) in sector(8), seed in any::<u64>()) {
        let v = samples::random_state(l, n, seed).unwrap();
        for k in 0..=max_order(l, n) {
            let w: Vec<f64> = Method::ALL.iter().map(|&m| twisted_purity(&v, k, m).unwrap()).collect();
            let scale = w[0].abs().max(1.0);
            prop_assert!((w[0] - w[1]).abs() < 1e-10 * scale && (w[0] - w[2]).abs() < 1e-10 * scale, "k={k}: {w:?}");
            prop_assert!(w[0] <= purity_upper_bound(l, n, k) + 1e-9);
            prop_assert!(w[0] >= -1e-12);
        }
    }

    #[test]
    fn single_particle_invariance((l, n) in sector(8), seed in any::<u64>()) {
        let v = samples::random_state(l, n, seed).unwrap();
        let u = samples::randomly_rotated(&v, 2.0, seed.wrapping_add(17)).unwrap();
        for k in 0..=max_order(l, n) {
            let a = twisted_purity(&v, k, Method::auto(k)).unwrap();
            let b = twisted_purity(&u, k, Method::auto(k)).unwrap();
            prop_assert!((a - b).abs() < 1e-9, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn twisted_rdm_reconstruction((l, n) in sector(7), seed in any::<u64>()) {
        let v = samples::random_state(l, n, seed).unwrap();
        let mut rdms = Vec::new();
        for k in 1..=n.min(3) {
            rdms.push(corrmeas::rdm(&v, k).unwrap());
            let direct = corrmeas::twisted_rdm_direct(&v, k).unwrap();
            let rebuilt = corrmeas::twisted_rdm_from_rdms(&rdms).unwrap();
            let dev = (&direct.matrix - &rebuilt.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(dev < 1e-10, "k={k}: {dev:e}");
        }
    }

    #[test]
    fn nesting_and_radius_membership(k0 in 1usize..=4, seed in any::<u64>()) {
        let (l, n) = (9, 4);
        let s0 = ModeSet::range(1, n);
        let v = samples::ci_state(l, n, s0, k0, seed).unwrap();
        prop_assert!(pluecker::support_radius(&v, s0, 0.0).unwrap() < k0);
        let rotated = samples::randomly_rotated(&v, 1.0, seed ^ 0xabc).unwrap();
        prop_assert!(twisted_purity(&rotated, k0, Method::auto(k0)).unwrap() < 1e-12);
        for k in k0..=max_order(l, n) {
            prop_assert!(pluecker::is_in_gk(&rotated, k, 1e-10).unwrap().member, "k={k}");
        }
    }

    #[test]
    fn small_diameter_implies_membership(seed in any::<u64>(), k in 2usize..=4) {
        // two configurations at half-distance d < k
        let mut r = rng::seeded(seed);
        let a = ModeSet::range(1, 4);
        let d = (seed as usize) % k;
        let b = a.difference(ModeSet::range(1, d)).union(ModeSet::range(5, 4 + d));
        let basis = Arc::new(FockBasis::new(9, 4).unwrap());
        let v = StateVector::from_fn(basis, |s| if s == a || s == b { rng::complex_normal(&mut r, 1.0) } else { Complex64::new(0.0, 0.0) })
            .normalized()
            .unwrap();
        prop_assert!(support_diameter(&v, 1e-12).unwrap() < k);
        prop_assert!(pluecker::is_in_gk(&v, k, 1e-10).unwrap().member);
    }

    #[test]
    fn residual_norm_matches_tensor_norm((l, n) in sector(7), seed in any::<u64>()) {
        let v = samples::random_state(l, n, seed).unwrap();
        for k in 1..=max_order(l, n) {
            let a = pluecker::residual_norm_sq(&v, k).unwrap();
            let b = omega_power_apply(&v, k).norm_sqr();
            prop_assert!((a - b).abs() < 1e-10 * b.max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn cumulant_reproduces_built_states(k in 1usize..=3, seed in any::<u64>(), scale in 0.05f64..0.6) {
        let g = ModeSet::from_modes(&[1, 3, 4, 7]).unwrap();
        let p = random_params(8, g, k, scale, seed);
        let v = ansatz::build_state(&p).unwrap();
        let ca = wick::connected_amplitudes(&v, g, k).unwrap();
        for key in wick::excitations(8, g, 1..=4) {
            let truth = wick::excitation_ratio(&v, g, key.p, key.q).unwrap();
            let rec = wick::cumulant_reconstruct(&ca, key.p, key.q).unwrap();
            prop_assert!((truth - rec).norm() < 1e-10 * truth.norm().max(1.0), "{key:?}");
        }
    }

    #[test]
    fn fit_inverts_build(k in 1usize..=4, seed in any::<u64>(), scale in 0.05f64..0.8) {
        let g = ModeSet::from_modes(&[2, 3, 6, 8, 9]).unwrap();
        let p = random_params(10, g, k, scale, seed);
        let v = ansatz::build_state(&p).unwrap();
        let back = ansatz::fit(&v, g, k).unwrap();
        prop_assert!(back.max_theta_diff(&p) < 1e-9);
        prop_assert!((back.v_g - p.v_g).norm() < 1e-12);
    }

    #[test]
    fn nilpotent_tail_vanishes(k in 1usize..=3, seed in any::<u64>()) {
        let g = ModeSet::range(1, 4);
        let p = random_params(8, g, k, 0.5, seed);
        let exact = ansatz::build_state(&p).unwrap();
        let longer = ansatz::build_state_truncated(&p, 12).unwrap();
        prop_assert!(exact.max_abs_diff(&longer).unwrap() < 1e-12);
    }

    #[test]
    fn generating_function_equation(x in prop::collection::vec(-0.15f64..0.15, 1..=4)) {
        let f = |y: &[f64]| f_scalar(y).unwrap();
        let h = 1e-5;
        let mut lhs = 0.0;
        let mut weighted = 0.0;
        for j in 0..x.len() {
            let kj = (j + 1) as f64;
            lhs += kj * x[j];
            let mut up = x.clone();
            let mut dn = x.clone();
            up[j] += h;
            dn[j] -= h;
            weighted += kj * x[j] * (f(&up) - f(&dn)) / (2.0 * h);
        }
        let flipped: Vec<f64> = x.iter().enumerate().map(|(j, &v)| if j % 2 == 0 { -v } else { v }).collect();
        let rhs = weighted * f(&flipped);
        prop_assert!((lhs - rhs).abs() < 1e-7, "{lhs} vs {rhs}");
    }

    #[test]
    fn wedge_products_multiply_generating_functions(sa in any::<u64>(), sb in any::<u64>(), beta in 0.2f64..1.5) {
        let a = samples::random_state(4, 2, sa).unwrap();
        let b = samples::random_state(5, 2, sb).unwrap();
        let ab = analytic::embed_product(&[a.clone(), b.clone()]).unwrap();
        let z = |v: &StateVector| corrmeas::generating_function(&corrmeas::purity_spectrum(v, v.n()).unwrap(), beta);
        let (za, zb, zab) = (z(&a), z(&b), z(&ab));
        prop_assert!((zab - za * zb).abs() < 1e-10 * zab.abs().max(1.0), "{zab} vs {}", za * zb);
    }

    #[test]
    fn model_hamiltonians_are_hermitian_with_small_residuals(seed in any::<u64>(), u in 0.0f64..8.0) {
        let syk = models::syk_in_sector(8, 3, seed).unwrap();
        prop_assert!(syk.hermiticity_defect() < 1e-12);
        for (e, v) in models::eigenstates(&syk, 3).unwrap() {
            prop_assert!(syk.residual(e, &v) < 1e-9 * syk.norm_bound().max(1.0));
        }
        let hub = models::hubbard(4, 1.0, u).unwrap();
        prop_assert!(hub.hermiticity_defect() < 1e-12);
        for (e, v) in models::eigenstates(&hub, 2).unwrap() {
            prop_assert!(hub.residual(e, &v) < 1e-9 * hub.norm_bound().max(1.0));
        }
    }
}

/// As stated for the ansatz: every built state lies in `G_k`. It does not:
/// with `G = {1,2}` on four modes, a lone `θ_{12,34}` builds `|1,2⟩ + θ|3,4⟩`,
/// a Bell-like state with `ω_2 > 0`. The ansatz covers `G_k` but its image is larger.
#[test]
#[ignore = "built states need not lie in G_k; see counterexample in the doc comment"]
fn built_states_lie_in_gk() {
    for seed in 0..16u64 {
        for k in 1..=3usize {
            let g = ModeSet::range(1, 4);
            let p = random_params(8, g, k, 0.4, seed);
            let v = ansatz::build_state(&p).unwrap().normalized().unwrap();
            for kk in k..=4 {
                assert!(twisted_purity(&v, kk, Method::auto(kk)).unwrap() < 1e-9, "seed {seed}, k {k}, k' {kk}");
            }
        }
    }
}

#[test]
fn built_state_outside_gk_counterexample() {
    let g = ModeSet::range(1, 2);
    let mut p = AnsatzParams::reference(4, g, 2, Complex64::new(1.0, 0.0)).unwrap();
    p.set(g, ModeSet::range(3, 4), Complex64::new(0.8, 0.0)).unwrap();
    let v = ansatz::build_state(&p).unwrap().normalized().unwrap();
    assert_eq!(v.iter().filter(|(_, a)| a.norm() > 0.0).count(), 2);
    assert!(twisted_purity(&v, 2, Method::RdmTrace).unwrap() > 0.5);
}
