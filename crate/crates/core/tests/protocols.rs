mod common;

use common::{within, Lcg};
use latsmooth_core::decision::{Evidence, Verdict};
use latsmooth_core::enumerate::{ball_enum, EnumRequest};
use latsmooth_core::estimate::Mc;
use latsmooth_core::gauss::{rho_sum_nonzero, smoothing_parameter};
use latsmooth_core::geometry::{overlap_fraction, voronoi_gaussian_measure};
use latsmooth_core::protocols::amplify::*;
use latsmooth_core::protocols::coam::*;
use latsmooth_core::protocols::ggg::*;
use latsmooth_core::protocols::gs::{encode_coefs, gs_lower_bound};
use latsmooth_core::protocols::spcom::*;
use latsmooth_core::protocols::{Outcome, Payload, Transcript};
use latsmooth_core::samplers::Bits;
use latsmooth_core::{lattice_scale, Basis, Rng};

/// `Λ* = c·Zⁿ`.
fn dual_spacing(n: usize, c: f64) -> Basis {
    Basis::scaled_identity(n, 1.0 / c).unwrap()
}

fn point(t: &Transcript, i: usize) -> &[f64] {
    match &t.messages[i].payload {
        Payload::Point(p) => p,
        other => panic!("expected a point, got {other:?}"),
    }
}

#[test]
fn acceptance_is_the_dual_voronoi_measure() {
    let mut rng = Lcg(31);
    for i in 0..20u64 {
        let n = 1 + (i % 4) as usize;
        let scale = 0.6 + rng.next_f64();
        let b = rng.basis(n, scale);
        let mc = Mc::new(20_000, i);
        let acc = ggg_accept_prob(&b, &mc).unwrap();
        // Same seed: same Gaussian draws, so the events coincide exactly.
        let same = voronoi_gaussian_measure(&b.dual().unwrap(), 1.0, &mc).unwrap();
        assert_eq!(acc.mean, same.mean, "case {i}");
        let indep = voronoi_gaussian_measure(&b.dual().unwrap(), 1.0, &Mc::new(20_000, 1000 + i)).unwrap();
        assert!((acc.mean - indep.mean).abs() <= acc.halfwidth + indep.halfwidth, "case {i}");
    }
}

#[test]
fn one_dimensional_acceptance() {
    for (c, exact) in [
        (1.0, common::gamma_interval(0.5, 1.0)),
        (0.25, common::gamma_interval(2.0, 1.0)),
        (2.0, common::gamma_interval(0.25, 1.0)),
    ] {
        let b = Basis::scaled_identity(1, c).unwrap();
        let est = ggg_accept_prob(&b, &Mc::new(100_000, 17)).unwrap();
        assert!(within(&est, exact) || (est.mean - exact).abs() < 2e-5, "c={c}: {est:?} vs {exact}");
    }
    let g = Ggg::new(&Basis::scaled_identity(1, 0.25).unwrap()).unwrap();
    assert_eq!(g.accept_prob(Prover::Sabotage, &Mc::new(10_000, 1)).unwrap().mean, 0.0);
}

#[test]
fn no_prover_beats_optimal() {
    let mut rng = Lcg(8);
    for i in 0..6u64 {
        let n = 1 + (i % 3) as usize;
        let b = rng.basis(n, 1.0);
        let g = Ggg::new(&b).unwrap();
        let mc = Mc::new(20_000, 50 + i);
        let best = g.accept_prob(Prover::Optimal, &mc).unwrap();
        let provers =
            [Prover::bdd(&b, 0.9, 0.01).unwrap(), Prover::Bdd { radius: 0.1 }, Prover::Sabotage, Prover::RandomCoset];
        for p in provers {
            let other = g.accept_prob(p, &mc).unwrap();
            assert!(other.mean <= best.mean + other.halfwidth + best.halfwidth, "{p:?}: {other:?} vs {best:?}");
        }
    }
}

#[test]
fn transcripts_replay_and_reduce() {
    let b = Basis::from_columns(&[vec![1.0, 0.2], vec![-0.3, 0.8]]).unwrap();
    let d = b.dual().unwrap();
    for seed in 0..50 {
        let t1 = ggg_round(&b, Prover::Optimal, &mut Rng::new(seed)).unwrap();
        let t2 = ggg_round(&b, Prover::Optimal, &mut Rng::new(seed)).unwrap();
        assert_eq!(t1, t2);
        let coefs = d.coefficients(point(&t1, 0));
        assert!(coefs.iter().all(|c| (-0.5..0.5).contains(c)), "{coefs:?}");
        let s = ggg_simulate_szk(&b, &mut Rng::new(seed)).unwrap();
        assert_eq!(point(&s, 0), point(&t1, 0));
        assert_eq!(s, ggg_simulate_szk(&b, &mut Rng::new(seed)).unwrap());
    }
}

#[test]
fn simulator_is_statistically_close() {
    // Λ = (1/4)Z: the optimal prover fails with probability ≈ 5e-6.
    let b = Basis::scaled_identity(1, 0.25).unwrap();
    let g = Ggg::new(&b).unwrap();
    let bins = |t: &Transcript| {
        let f = |v: f64| ((v + 4.0) * 2.0).floor().clamp(0.0, 15.0) as usize;
        f(point(t, 0)[0]) * 16 + f(point(t, 1)[0])
    };
    let trials = 100_000;
    let (mut real, mut sim) = (vec![0u64; 256], vec![0u64; 256]);
    let mut coupled_diffs = 0;
    let (mut r1, mut r2) = (Rng::new(1), Rng::new(2));
    for i in 0..trials {
        let t = g.round(Prover::Optimal, &mut r1).unwrap();
        real[bins(&t)] += 1;
        sim[bins(&ggg_simulate_szk(&b, &mut r2).unwrap())] += 1;
        let (a, c) =
            (g.round(Prover::Optimal, &mut Rng::new(i)).unwrap(), ggg_simulate_szk(&b, &mut Rng::new(i)).unwrap());
        coupled_diffs += (point(&a, 1) != point(&c, 1)) as u64;
    }
    let tv: f64 =
        real.iter().zip(&sim).map(|(a, c)| (*a as f64 - *c as f64).abs()).sum::<f64>() / (2.0 * trials as f64);
    let eps = 1.0 - common::gamma_interval(2.0, 1.0);
    // Sampling noise of a 256-bin histogram distance at 1e5 draws is ≈ 0.005.
    assert!(tv <= eps + 0.02, "tv = {tv}");
    assert!(coupled_diffs as f64 / trials as f64 <= eps + 5e-5, "coupled diffs = {coupled_diffs}");
}

#[test]
fn bdd_decider_separates_dense_and_sparse() {
    let mc = Mc::new(100_000, 3);
    let yes = decide_gapspp_bdd(&Basis::scaled_identity(1, 0.25).unwrap(), 1e-5, 0.3, 0.9, &mc).unwrap();
    let no = decide_gapspp_bdd(&Basis::scaled_identity(1, 2.0).unwrap(), 1e-5, 0.3, 0.9, &mc).unwrap();
    assert_eq!(yes.verdict, Verdict::Yes);
    assert_eq!(no.verdict, Verdict::No);
    let Evidence::Bdd(ev) = &no.evidence else { unreachable!() };
    assert!(ev.rejection.mean >= 0.3 / 1.3);
    assert!(decide_gapspp_bdd(&Basis::identity(1), 0.01, 0.3, 0.9, &mc).is_err());
}

#[test]
fn commitments_open_to_their_bit() {
    let b = dual_spacing(3, 0.7);
    let sc = SpCom::new(&b).unwrap();
    let two = lattice_scale(sc.dual(), 2.0).unwrap();
    let mut rng = Rng::new(4);
    for i in 0..200 {
        let bit = i % 2 == 1;
        let c = sc.commit(bit, &mut rng).unwrap();
        assert_eq!(c.h.eval(&c.opening.z), bit);
        assert!(c.opening.e.iter().map(|v| v * v).sum::<f64>() <= sc.radius().powi(2) * (1.0 + 1e-12));
        let coefs = two.coefficients(&c.w);
        assert!(coefs.iter().all(|x| (-0.5 - 1e-12..0.5).contains(x)));
        assert!(two.is_lattice_vector(&c.w.iter().zip(&c.opening.lift).map(|(a, l)| a - l).collect::<Vec<_>>(), 1e-9));
    }
}

#[test]
fn binding_and_hiding_respect_overlap() {
    for (i, c) in [1.0, 0.6, 0.3].into_iter().enumerate() {
        let b = dual_spacing(4, c);
        let sc = SpCom::new(&b).unwrap();
        let ov = overlap_fraction(sc.dual(), sc.radius(), &Mc::new(20_000, 10 + i as u64)).unwrap();
        let bind = spcom_binding_estimate(&b, &Mc::new(20_000, 20 + i as u64)).unwrap();
        let hide = spcom_hiding_sd(&b, &Mc::new(20_000, 30 + i as u64)).unwrap();
        assert!(bind.mean <= ov.mean + bind.halfwidth + ov.halfwidth, "c={c}");
        assert!(hide.mean <= 1.0 - ov.mean / 2.0 + hide.halfwidth + ov.halfwidth / 2.0, "c={c}");
    }
    assert_eq!(spcom_binding_estimate(&dual_spacing(2, 1.0), &Mc::new(5_000, 1)).unwrap().mean, 0.0);
}

#[test]
fn discrepancy_of_pairwise_independent_signs() {
    let bits = |v: &[bool]| Bits::from_bools(v);
    assert_eq!(hash_discrepancy(&[bits(&[true, false, false])]).unwrap(), 1.0);
    assert_eq!(hash_discrepancy(&[bits(&[false, false]), bits(&[true, false])]).unwrap(), 1.0);
    assert_eq!(hash_discrepancy(&[bits(&[false, false]), bits(&[true, false]), bits(&[false, true])]).unwrap(), 1.5);

    let mut rng = Rng::new(3);
    for n in 3..=6usize {
        for t in 2..=8usize.min(1 << n) {
            for _ in 0..20 {
                let mut zs: Vec<u64> = Vec::new();
                while zs.len() < t {
                    let z = rng.below(1 << n);
                    if !zs.contains(&z) {
                        zs.push(z);
                    }
                }
                let e = discrepancy_total(&zs, n) as f64 / (1u64 << n) as f64;
                assert!(e <= t as f64 / 2.0 + 1e-12, "n={n} t={t} {zs:?}: {e}");
                if t == 2 {
                    assert_eq!(e, 1.0);
                }
                if t == 3 {
                    assert_eq!(e, 1.5);
                }
            }
        }
    }
}

#[test]
fn opening_sets_from_commitments() {
    // Dense dual: |T′_w| ≥ 2 whenever |T_w| ≥ 2, and the discrepancy bound holds.
    for c in [0.45, 0.3] {
        let b = dual_spacing(4, c);
        let sc = SpCom::new(&b).unwrap();
        let mut e = latsmooth_core::enumerate::BallEnum::new(sc.dual());
        let mut rng = Rng::new(9);
        let mut multi = 0;
        for _ in 0..10_000 {
            let cm = sc.commit(false, &mut rng).unwrap();
            let req = EnumRequest::new(sc.dual(), cm.opening.lift.clone(), sc.radius());
            let all = ball_enum(&req).unwrap().count();
            let opens = sc.openings(&mut e, &cm.opening.lift).unwrap();
            assert!(all >= 1 && opens.len() <= all);
            if all >= 2 {
                multi += 1;
                assert!(opens.len() >= 2);
            }
            if (2..=8).contains(&opens.len()) {
                assert!(hash_discrepancy(&opens).unwrap() <= opens.len() as f64 / 2.0 + 1e-12);
            }
        }
        assert!(multi > 1000);
    }
}

#[test]
fn repetition_binding_follows_the_power_rule() {
    let b = dual_spacing(4, 0.6);
    let sc = SpCom::new(&b).unwrap();
    let ov = overlap_fraction(sc.dual(), sc.radius(), &Mc::new(50_000, 2)).unwrap();
    let leaf = SchemeParams::leaf(0.8, ov.mean).unwrap();
    for k in [2u32, 3] {
        let params = amplify(&leaf, Op::Repetition(k)).unwrap();
        let est = Amplified::new(&b, params).unwrap().binding_estimate(&Mc::new(20_000, k as u64)).unwrap();
        let q_hi = (ov.mean + ov.halfwidth).powi(k as i32);
        assert!(est.mean <= q_hi + est.halfwidth, "k={k}: {est:?} vs {q_hi}");
    }
    let shared = amplify(&leaf, Op::Sharing(2)).unwrap();
    let est = Amplified::new(&b, shared).unwrap().binding_estimate(&Mc::new(20_000, 9)).unwrap();
    let q_hi = 1.0 - (1.0 - ov.mean - ov.halfwidth).powi(2);
    assert!(est.mean <= q_hi + est.halfwidth);
}

#[test]
fn szk_protocol_completeness_and_soundness() {
    // Sparse dual: commitments are binding, the prover recovers b.
    let yes = dual_spacing(4, 1.0);
    let q = spcom_binding_estimate(&yes, &Mc::new(20_000, 1)).unwrap();
    let acc = Amplified::new(&yes, SchemeParams::leaf(1.0, q.mean).unwrap())
        .unwrap()
        .accept_prob(&Mc::new(5_000, 2))
        .unwrap();
    assert!(acc.mean >= 1.0 - q.upper() - acc.halfwidth, "{acc:?}");

    // Dense dual: commitments hide b.
    let no = dual_spacing(4, 0.3);
    let p = spcom_hiding_sd(&no, &Mc::new(10_000, 3)).unwrap();
    let acc = Amplified::new(&no, SchemeParams::leaf(p.mean, 1.0).unwrap())
        .unwrap()
        .accept_prob(&Mc::new(10_000, 4))
        .unwrap();
    assert!(acc.mean <= 0.5 + p.upper() / 2.0 + acc.halfwidth, "{acc:?} vs {p:?}");
    assert!(acc.mean >= 0.5 - acc.halfwidth);

    let params = apply_plan(&SchemeParams::leaf(p.mean, 1.0).unwrap(), &[Op::Sharing(2)]).unwrap();
    let t1 = szk_protocol_run(&no, &params, &mut Rng::new(5)).unwrap();
    let t2 = szk_protocol_run(&no, &params, &mut Rng::new(5)).unwrap();
    assert_eq!(t1, t2);
    assert_eq!(t1.messages.len(), 2 * 2 + 1);
}

#[test]
fn plans_meet_their_targets() {
    let ops = amplification_plan(0.3, 0.3, 0.01).unwrap();
    let out = apply_plan(&SchemeParams::leaf(0.3, 0.3).unwrap(), &ops).unwrap();
    assert!(out.p <= 0.01 && out.q <= 0.01);
    let eps = 0.02;
    let ops = amplification_plan(2.0 * eps, 1.0 - 3.0 * eps, 0.01).unwrap();
    let out = apply_plan(&SchemeParams::leaf(2.0 * eps, 1.0 - 3.0 * eps).unwrap(), &ops).unwrap();
    assert!(out.p <= 0.01 && out.q <= 0.01);
    assert!(amplification_plan(0.5, 0.5, 0.01).is_err());
}

/// `Zⁿ` scaled so that `η_ε(Λ) = target`.
fn scaled_to_eta(b: &Basis, eps: f64, target: f64) -> Basis {
    let eta = smoothing_parameter(b, eps, 1e-9).unwrap().eta;
    lattice_scale(b, target / eta).unwrap()
}

#[test]
fn coam_honest_claims() {
    let (alpha, ey, en) = (0.1, 0.05, 0.13);
    let mut rng = Lcg(404);
    for i in 0..6 {
        let n = 2 + i % 3;
        let base = if i < 3 { Basis::identity(n) } else { rng.basis(n, 1.0) };
        // YES: η_{εY}(Λ) ≤ 1.
        let yes = scaled_to_eta(&base, ey, 0.9);
        let claims = coam_shell_counts(&yes, alpha, ey, en).unwrap();
        assert_eq!(coam_verdict(&claims), Outcome::Reject, "YES case {i}");
        assert!(claims.max_uninflated_sum() < claims.threshold());
        // NO: η_{εN}(Λ) well above 1+α.
        let no = scaled_to_eta(&base, en, (1.0 + alpha) * 1.1);
        let claims = coam_shell_counts(&no, alpha, ey, en).unwrap();
        assert_eq!(coam_verdict(&claims), Outcome::Accept, "NO case {i}");
        let total = rho_sum_nonzero(&no.dual().unwrap(), 1.0, 1e-12).unwrap();
        assert!(total.value >= en);
    }
}

#[test]
fn coam_short_vector_undercount_in_one_dimension() {
    // A NO instance whose honest claims are rejected: dual points inside
    // the unit ball get weight e^{−π} although they contribute
    // e^{−π(1+α)²‖v‖²} > e^{−π} to the sum the promise bounds.
    let (alpha, ey, en) = (0.1, 0.05, 0.13);
    let no = scaled_to_eta(&Basis::identity(1), en, (1.0 + alpha) * 1.1);
    assert!(smoothing_parameter(&no, en, 1e-9).unwrap().eta >= 1.0 + alpha);
    let claims = coam_shell_counts(&no, alpha, ey, en).unwrap();
    assert_eq!(claims.counts[0], 2);
    assert!(claims.weighted_sum() < claims.threshold());
    assert_eq!(coam_verdict(&claims), Outcome::Reject);
}

#[test]
fn coam_shell_bookkeeping() {
    let (big_r, t) = coam_parameters(4, 0.1, 0.05).unwrap();
    assert!((big_r - 4.0 * (1.0 + 20f64.ln())).abs() < 1e-12);
    assert_eq!(t, 15);
    let z2 = Basis::identity(2);
    let shells = coam_shells(&z2, 0.1, 0.05).unwrap();
    assert_eq!(shells[0].len(), 4);
    let outer = 1.1f64.powi(shells.len() as i32 - 1);
    let total: usize = shells.iter().map(Vec::len).sum();
    let req = EnumRequest::new(&z2, vec![0.0, 0.0], outer);
    assert_eq!(total, ball_enum(&req).unwrap().count() - 1);
    for (i, s) in shells.iter().enumerate().skip(1) {
        for p in s {
            let r = p.point.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(r > 1.1f64.powi(i as i32 - 1) && r <= 1.1f64.powi(i as i32) * (1.0 + 1e-12));
        }
    }
    let claims = coam_shell_counts(&z2, 0.1, 0.05, 0.13).unwrap();
    let empty = claims.with_counts(vec![0; claims.counts.len()]).unwrap();
    assert_eq!(coam_verdict(&empty), Outcome::Reject);
}

#[test]
fn set_size_protocol_calibration() {
    let z3 = Basis::identity(3);
    let shells = coam_shells(&z3, 0.1, 0.05).unwrap();
    let members: Vec<Bits> = shells.iter().flatten().map(|p| encode_coefs(&p.coefs).unwrap()).collect();
    let k = members.len() as u64;
    assert!(k > 20);
    let mut rng = Rng::new(6);
    let honest = (0..100).filter(|_| gs_lower_bound(&members, k, 0.5, &mut rng).unwrap().outcome.is_accept()).count();
    let inflated =
        (0..100).filter(|_| gs_lower_bound(&members, 4 * k, 0.5, &mut rng).unwrap().outcome.is_accept()).count();
    assert!(honest >= 90, "honest accepted {honest}/100");
    assert!(inflated <= 10, "inflated accepted {inflated}/100");
    assert!(gs_lower_bound(&[], 0, 0.5, &mut rng).unwrap().outcome.is_accept());
}
