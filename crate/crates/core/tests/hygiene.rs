use ioncav::dynamics::{evolve_static, evolve_timedep};
use ioncav::fockalg::{coherent_state, number, SpaceSignature, StateVector, C64};
use ioncav::model::{
    build_dressed_corotating, build_dressed_hamiltonian, build_effective_corotating,
    build_engineered, build_full_hamiltonian, EffectiveParams, Engineered, Frame, SinSquared,
    SystemParams,
};

fn params() -> SystemParams {
    SystemParams {
        omega: 40.0,
        nu: 20.0,
        delta: 0.3,
        big_delta: 6.0,
        lambda1: C64::new(0.5, 0.2),
        lambda2: C64::new(-0.3, 0.4),
        omega_abs: 0.8,
        phi_drive: 1.1,
        eta: 0.1,
        eta_l: 0.05,
        varphi: 0.0,
    }
}

fn eff() -> EffectiveParams {
    EffectiveParams::manual(3.0, 0.4, C64::new(0.1, -0.2))
}

#[test]
fn every_builder_is_hermitian() {
    let p = params();
    let full = SpaceSignature::cavity_motion_atom(4, 5).unwrap();
    let pair = SpaceSignature::cavity_motion(6, 5).unwrap();
    let mut hs = Vec::new();
    for t in [0.0, 0.37, 2.9] {
        hs.push(build_full_hamiltonian(&p, &full, t, Frame::Lab).unwrap());
        hs.push(build_full_hamiltonian(&p, &full, t, Frame::Interaction).unwrap());
        hs.push(build_dressed_hamiltonian(&p, &full, t).unwrap());
        hs.push(build_engineered(&p, &eff(), Engineered::H4, &pair, t).unwrap());
        hs.push(build_engineered(&p, &eff(), Engineered::Sidebands, &pair, t).unwrap());
    }
    hs.push(build_dressed_corotating(&p, &full).unwrap());
    hs.push(build_effective_corotating(&p, &eff(), &pair, SinSquared::Exact).unwrap());
    hs.push(build_engineered(&p, &eff(), Engineered::Parametric, &pair, 0.0).unwrap());
    let phi = eff().phi_shift(&p);
    for (which, delta) in [(Engineered::H2, phi), (Engineered::H3, -phi)] {
        let q = SystemParams { delta, ..p };
        hs.push(build_engineered(&q, &eff(), which, &pair, 0.0).unwrap());
    }
    for h in &hs {
        assert!(
            h.hermiticity_defect() <= 1e-12 * h.max_abs(),
            "{}",
            h.hermiticity_defect()
        );
    }
}

#[test]
fn time_dependent_frame_map() {
    // H4(t) maps onto the static parametric form after rotating by exp(-iδ t a†a)
    let p = params();
    let e = eff();
    let pair = SpaceSignature::cavity_motion(10, 8).unwrap();
    let psi0 = coherent_state(&pair, 1, C64::new(0.6, 0.0)).unwrap();
    let t_max = 3.0;
    let h_par = build_engineered(&p, &e, Engineered::Parametric, &pair, 0.0).unwrap();
    let reference = evolve_static(&h_par, &psi0, &[t_max]).unwrap();
    let rot = ioncav::fockalg::hermitian_function(
        &number(&pair, 0).unwrap(),
        ioncav::fockalg::MatrixFunction::ExpI(-p.delta * t_max),
    )
    .unwrap();
    let expected =
        StateVector::new(pair.clone(), rot.apply(reference.states[0].amplitudes())).unwrap();
    let h4 = |t: f64| build_engineered(&p, &e, Engineered::H4, &pair, t);
    let stepped = evolve_timedep(h4, &psi0, t_max, 2e-3).unwrap();
    let fid = stepped.last().fidelity(&expected).unwrap();
    assert!(1.0 - fid < 1e-6, "{fid}");
    for s in &stepped.states {
        assert!((s.norm() - 1.0).abs() < 1e-9);
    }
}
