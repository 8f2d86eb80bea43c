mod common;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polaritonic::gauge::{
    build, build_coulomb_analytic, build_coulomb_corrected, build_coulomb_naive_pa, build_coulomb_naive_projected,
    build_dipole, build_dipole_quadrature, build_dipole_with, build_pzw_subspace_unitary, decoupled_spectrum,
    large_basis_shift, lowest_eigenvalues, max_abs_difference, pauli, residual_momentum, residual_momentum_numeric,
    residual_momentum_series, spectrum, Gauge, GaugeInputs, LargeBasisPoint, MinimalCoupling, DEFAULT_N_LARGE,
};
use polaritonic::linalg::{hermiticity_deviation, max_abs, CMatrix, RMatrix};
use polaritonic::matter::{mulliken_hush, Mat2, MatterPoint, MatterSubspace};
use polaritonic::photon::PhotonSpace;

const A0_LIST: [f64; 4] = [0.05, 0.1, 0.2, 0.4];

fn photon(n_fock: usize, a0: f64) -> PhotonSpace {
    PhotonSpace::new(n_fock, common::omega_3ev(), a0).unwrap()
}

fn sym(a: f64, b: f64, c: f64) -> Mat2 {
    Mat2::new(a, b, b, c)
}

fn inputs() -> GaugeInputs<'static> {
    GaugeInputs::new(common::strict_diabatic()).with_large(common::shin_metiu(), DEFAULT_N_LARGE)
}

/// `f(m Â)` for real symmetric `Â`, via nalgebra's real symmetric solver.
fn real_function(a: &RMatrix, f: impl Fn(f64) -> f64) -> RMatrix {
    let e = SymmetricEigen::new(a.clone());
    let d = RMatrix::from_diagonal(&e.eigenvalues.map(f));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

fn real_a(p: &PhotonSpace) -> RMatrix {
    p.vector_potential_matrix().map(|z| z.re)
}

fn complexify(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

#[test]
fn decoupled_limit_for_every_gauge() {
    let inputs = inputs();
    let p = photon(20, 0.0);
    let sol = common::shin_metiu();
    for r in [-2.0, -0.25, 0.0, 1.3] {
        let k = sol.nearest_index(r);
        let r = sol.r_values[k];
        let expected = decoupled_spectrum(&sol.energies[k][..2], &p, 10);
        for g in Gauge::ALL {
            let e = spectrum(g, &inputs, &p, r, 10).unwrap();
            assert!(max_abs_difference(&e, &expected) < 1e-10, "{g} at R={r}");
        }
    }
}

#[test]
fn dipole_quadrature_form_matches() {
    let sub = common::strict_diabatic();
    for r in [-1.74, 0.0, 2.1] {
        for a0 in A0_LIST {
            let p = photon(40, a0);
            let point = sub.point(r).unwrap();
            let d = build_dipole(&point, &p).unwrap();
            let q = build_dipole_quadrature(&point, &p).unwrap();
            assert!(d.max_abs_diff(&q) < 1e-12, "R={r} A0={a0}: {}", d.max_abs_diff(&q));
        }
    }
}

#[test]
fn dipole_and_corrected_coulomb_spectra_agree() {
    let sub = common::strict_diabatic();
    for r in [-2.5, -1.74, -0.25, 0.0, 0.8, 2.9] {
        for a0 in A0_LIST {
            let p = photon(40, a0);
            let point = sub.point(r).unwrap();
            let d = lowest_eigenvalues(&build_dipole(&point, &p).unwrap(), 10).unwrap();
            let c = lowest_eigenvalues(&build_coulomb_corrected(&point, &p).unwrap(), 10).unwrap();
            assert!(common::agree(&d, &c, 1e-8, 1e-10), "R={r} A0={a0}");
        }
    }
}

#[test]
fn pzw_unitary_is_identity_without_dipole() {
    let point = MatterPoint::constant(sym(0.1, 0.02, -0.1), Mat2::zeros());
    let u = build_pzw_subspace_unitary(&point, &photon(12, 0.3)).unwrap();
    assert!(max_abs(&(u.matrix() - CMatrix::identity(24, 24))) < 1e-15);
}

#[test]
fn pzw_unitary_with_diagonal_dipole_is_block_displacement() {
    let (m0, m1) = (0.7, -1.3);
    let point = MatterPoint::constant(Mat2::zeros(), sym(m0, 0.0, m1));
    let p = photon(30, 0.4);
    let u = build_pzw_subspace_unitary(&point, &p).unwrap();
    assert!(u.unitarity_deviation() < 1e-12);
    let a = p.vector_potential_matrix();
    let n = p.n_fock;
    for (block, m) in [(0, m0), (1, m1)] {
        // exp(−i m Â) summed as a Taylor series
        let x = &a * Complex64::new(0.0, -m);
        let mut term = CMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..200 {
            term = &term * &x * Complex64::new(1.0 / k as f64, 0.0);
            sum += &term;
        }
        let got = u.matrix().view((block * n, block * n), (n, n));
        assert!(max_abs(&(got - &sum)) < 1e-12);
        let off = u.matrix().view((block * n, (1 - block) * n), (n, n));
        assert!(max_abs(&off.into_owned()) == 0.0);
    }
}

#[test]
fn pzw_unitary_is_unitary_on_default_model() {
    let sub = common::strict_diabatic();
    for r in [-3.0, 0.0, 1.5] {
        let u = build_pzw_subspace_unitary(&sub.point(r).unwrap(), &photon(40, 0.4)).unwrap();
        assert!(u.unitarity_deviation() < 1e-12);
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> MatterPoint {
    let eps = rng.gen_range(-0.1..0.1);
    let v10 = rng.gen_range(-0.1..0.1);
    let vbar = rng.gen_range(-0.5..0.5);
    let mu = sym(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    MatterPoint::constant(sym(vbar + eps, v10, vbar - eps), mu)
}

#[test]
fn analytic_form_matches_matrix_exponential_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..100 {
        let point = random_point(&mut rng);
        let p = photon(30, rng.gen_range(0.0..0.4));
        let a = build_coulomb_analytic(&point, &p).unwrap();
        let c = build_coulomb_corrected(&point, &p).unwrap();
        assert!(a.max_abs_diff(&c) <= 1e-10, "trial {trial}: {}", a.max_abs_diff(&c));
    }
}

#[test]
fn analytic_form_with_scalar_dipole_is_decoupled() {
    let v = sym(0.05, 0.01, -0.04);
    let point = MatterPoint::constant(v, Mat2::identity() * 1.7);
    let p = photon(30, 0.3);
    let a = build_coulomb_analytic(&point, &p).unwrap();
    let ev = polaritonic::matter::subspace::symmetric_eigenvalues(&v);
    let expected = decoupled_spectrum(&ev, &p, 10);
    assert!(max_abs_difference(&lowest_eigenvalues(&a, 10).unwrap(), &expected) < 1e-12);
    let d = lowest_eigenvalues(&build_dipole(&point, &p).unwrap(), 10).unwrap();
    assert!(max_abs_difference(&d, &expected) < 1e-10);
}

#[test]
fn rabi_limit() {
    let (vbar, eps, mu10) = (-0.3, 0.04, 1.1);
    let point = MatterPoint::constant(sym(vbar + eps, 0.0, vbar - eps), sym(0.0, mu10, 0.0));
    for a0 in [0.05, 0.2, 0.4] {
        let p = photon(30, a0);
        let n = p.n_fock;
        let a = real_a(&p);
        let sin = complexify(&real_function(&a, |x| (2.0 * mu10 * x).sin()));
        let cos = complexify(&real_function(&a, |x| (2.0 * mu10 * x).cos()));
        let (_, sy, sz) = pauli();
        let eye2 = CMatrix::identity(2, 2);
        let number = CMatrix::from_fn(n, n, |i, j| Complex64::new(if i == j { i as f64 + 0.5 } else { 0.0 }, 0.0));
        let expected = eye2.kronecker(&CMatrix::identity(n, n)) * Complex64::new(vbar, 0.0)
            + sy.kronecker(&sin) * Complex64::new(eps, 0.0)
            + sz.kronecker(&cos) * Complex64::new(eps, 0.0)
            + eye2.kronecker(&number) * Complex64::new(p.omega_c, 0.0);
        for h in [build_coulomb_corrected(&point, &p).unwrap(), build_coulomb_analytic(&point, &p).unwrap()] {
            assert!(max_abs(&(h.matrix() - &expected)) < 1e-12, "A0={a0}");
        }
    }
}

#[test]
fn residual_momentum_vanishes_in_mulliken_hush_states() {
    let mh = mulliken_hush(common::strict_diabatic()).subspace;
    let p = photon(40, 0.4);
    for k in (0..mh.n_r()).step_by(10) {
        let point = mh.node(k);
        assert!(max_abs(residual_momentum(&point, &p).unwrap().matrix()) < 1e-12);
        assert!(max_abs(residual_momentum_numeric(&point, &p).unwrap().matrix()) < 1e-12);
    }
}

#[test]
fn residual_momentum_vanishes_for_fixed_dipole_direction() {
    let r: Vec<f64> = (0..11).map(|k| -1.0 + 0.2 * k as f64).collect();
    let base = sym(0.9, -0.6, -0.4);
    let dipole: Vec<Mat2> = r.iter().map(|x| base * (1.5 + 0.4 * x + 0.1 * x * x)).collect();
    let potential: Vec<Mat2> = r.iter().map(|x| sym(0.1 * x, 0.02, -0.1 * x)).collect();
    let sub = MatterSubspace::literal(r, potential, dipole, None).unwrap();
    let p = photon(30, 0.3);
    for k in 0..sub.n_r() {
        let point = sub.node(k);
        assert!(point.theta_derivative().abs() < 1e-14);
        assert!(max_abs(residual_momentum(&point, &p).unwrap().matrix()) < 1e-12);
        assert!(max_abs(residual_momentum_numeric(&point, &p).unwrap().matrix()) < 1e-12);
    }
}

#[test]
fn residual_momentum_routes_agree_on_default_model() {
    let sub = common::strict_diabatic();
    let p = photon(40, 0.1);
    let mut any_nonzero = false;
    for k in (0..sub.n_r()).step_by(12).take(10) {
        let point = sub.node(k);
        let closed = residual_momentum(&point, &p).unwrap();
        let numeric = residual_momentum_numeric(&point, &p).unwrap();
        let series = residual_momentum_series(&point, &p, 80).unwrap();
        assert!(closed.max_abs_diff(&numeric) < 1e-10, "R={}", point.r);
        assert!(closed.max_abs_diff(&series) < 1e-8, "R={}: {}", point.r, closed.max_abs_diff(&series));
        any_nonzero |= max_abs(closed.matrix()) > 1e-6;
    }
    assert!(any_nonzero);
}

#[test]
fn residual_momentum_is_quadratic_at_weak_field() {
    let point = common::strict_diabatic().point(-0.25).unwrap();
    let norm = |a0: f64| max_abs(residual_momentum(&point, &photon(30, a0)).unwrap().matrix());
    let (small, smaller) = (norm(2e-3), norm(1e-3));
    assert!(small > 0.0);
    let ratio = small / smaller;
    assert!((ratio - 4.0).abs() < 0.01, "ratio {ratio}");
    // the leading (double-commutator) BCH term carries almost all of it
    let p = photon(30, 1e-3);
    let closed = residual_momentum(&point, &p).unwrap();
    let second = residual_momentum_series(&point, &p, 2).unwrap();
    let fourth = residual_momentum_series(&point, &p, 4).unwrap();
    assert!(second.max_abs_diff(&closed) < 0.1 * smaller);
    assert!(fourth.max_abs_diff(&closed) < 1e-3 * smaller);
}

#[test]
fn naive_routes_break_gauge_invariance() {
    let inputs = inputs();
    let sub = common::strict_diabatic();
    let point = sub.point(0.0).unwrap();
    let mut previous_level1 = 0.0;
    let mut max_by_a0 = Vec::new();
    for a0 in A0_LIST {
        let p = photon(40, a0);
        let d = spectrum(Gauge::Dipole, &inputs, &p, 0.0, 5).unwrap();
        let pa = lowest_eigenvalues(&build_coulomb_naive_pa(&point, &p, &MinimalCoupling::default()).unwrap(), 5).unwrap();
        let proj = spectrum(Gauge::CoulombNaiveProjected, &inputs, &p, 0.0, 5).unwrap();
        let (dpa, dproj) = (max_abs_difference(&d, &pa), max_abs_difference(&d, &proj));
        if a0 >= 0.1 {
            assert!(dpa > 1e-6 && dproj > 1e-6, "A0={a0}");
        }
        if a0 == 0.2 {
            assert!(dpa > 1e-3 && dproj > 1e-3);
        }
        let level1 = (d[1] - pa[1]).abs();
        assert!(level1 >= previous_level1, "A0={a0}");
        previous_level1 = level1;
        max_by_a0.push(dpa.max(dproj));
    }
    assert!(max_by_a0[3] > max_by_a0[1]);
}

#[test]
fn projected_route_large_basis_convergence_is_measured() {
    let inputs = inputs();
    let shift = large_basis_shift(&inputs, &photon(40, 0.2), 0.0, 5).unwrap();
    assert!(shift <= 1e-4, "{shift}");
    // twelve states are not enough at A0 = 0.4: the check must say so
    let shift = large_basis_shift(&inputs, &photon(40, 0.4), 0.0, 5).unwrap();
    assert!(shift > 1e-4, "{shift}");
}

#[test]
fn projected_route_with_two_states_is_the_corrected_gauge() {
    let energies = [-0.31, -0.2];
    let dipole = RMatrix::from_row_slice(2, 2, &[0.4, 1.9, 1.9, -0.7]);
    let point = MatterPoint::constant(sym(energies[0], 0.0, energies[1]), sym(0.4, 1.9, -0.7));
    let p = photon(30, 0.3);
    let large = LargeBasisPoint::new(&energies, &dipole, &Mat2::identity()).unwrap();
    let proj = build_coulomb_naive_projected(&large, &p).unwrap();
    let corr = build_coulomb_corrected(&point, &p).unwrap();
    assert!(proj.max_abs_diff(&corr) < 1e-12);

    // same through a rotated target basis
    let w = polaritonic::matter::subspace::rotation(0.37);
    let rotated = LargeBasisPoint::new(&energies, &dipole, &w).unwrap();
    let v = w.transpose() * sym(energies[0], 0.0, energies[1]) * w;
    let m = w.transpose() * sym(0.4, 1.9, -0.7) * w;
    let corr = build_coulomb_corrected(&MatterPoint::constant(v, m), &p).unwrap();
    assert!(build_coulomb_naive_projected(&rotated, &p).unwrap().max_abs_diff(&corr) < 1e-12);
}

#[test]
fn naive_pa_without_proton_terms_still_deviates() {
    let point = common::strict_diabatic().point(0.0).unwrap();
    let p = photon(40, 0.2);
    let mc = MinimalCoupling { include_proton: false, ..MinimalCoupling::default() };
    let pa = lowest_eigenvalues(&build_coulomb_naive_pa(&point, &p, &mc).unwrap(), 5).unwrap();
    let full = lowest_eigenvalues(&build_coulomb_naive_pa(&point, &p, &MinimalCoupling::default()).unwrap(), 5).unwrap();
    let d = lowest_eigenvalues(&build_dipole(&point, &p).unwrap(), 5).unwrap();
    assert!(max_abs_difference(&pa, &d) > 1e-3);
    // proton terms are suppressed by the mass ratio
    assert!(max_abs_difference(&pa, &full) < 1e-2 * max_abs_difference(&pa, &d));
}

#[test]
fn representation_independence() {
    let adiabatic = GaugeInputs::new(common::adiabatic());
    let diabatic = GaugeInputs::new(common::strict_diabatic());
    let sol = common::shin_metiu();
    for k in [0, 30, 55, 60, 90, 120] {
        let r = sol.r_values[k];
        for a0 in [0.1, 0.4] {
            let p = photon(60, a0);
            for g in [Gauge::Dipole, Gauge::CoulombCorrected] {
                let a = spectrum(g, &adiabatic, &p, r, 10).unwrap();
                let b = spectrum(g, &diabatic, &p, r, 10).unwrap();
                assert!(common::agree(&a, &b, 1e-8, 1e-10), "{g} R={r} A0={a0}");
            }
        }
    }
}

#[test]
fn every_built_operator_is_hermitian() {
    let inputs = inputs();
    for r in [-2.0, 0.0, 0.33] {
        for a0 in [0.0, 0.2, 0.4] {
            let p = photon(30, a0);
            for g in Gauge::ALL {
                let b = build(g, &inputs, &p, r).unwrap();
                assert_eq!(b.gauge, g);
                assert!(hermiticity_deviation(b.operator.matrix()) <= 1e-12);
                assert_eq!(b.operator.dim(), 60);
            }
            let point = common::strict_diabatic().point(r).unwrap();
            for h in [
                residual_momentum(&point, &p).unwrap(),
                residual_momentum_numeric(&point, &p).unwrap(),
                build_dipole_with(&point, &p, false).unwrap(),
            ] {
                assert!(hermiticity_deviation(h.matrix()) <= 1e-12);
            }
        }
    }
}

#[test]
fn skipping_the_self_energy_breaks_equivalence() {
    let point = common::strict_diabatic().point(0.0).unwrap();
    let p = photon(40, 0.2);
    let broken = lowest_eigenvalues(&build_dipole_with(&point, &p, false).unwrap(), 10).unwrap();
    let c = lowest_eigenvalues(&build_coulomb_corrected(&point, &p).unwrap(), 10).unwrap();
    assert!(max_abs_difference(&broken, &c) > 1e-3);
}

#[test]
fn gauge_tags_round_trip() {
    for g in Gauge::ALL {
        assert_eq!(g.as_str().parse::<Gauge>().unwrap(), g);
        assert_eq!(serde_json::to_string(&g).unwrap(), format!("\"{}\"", g.as_str()));
    }
    assert!("coulomb".parse::<Gauge>().is_err());
}

#[test]
fn projected_route_requires_large_basis() {
    let inputs = GaugeInputs::new(common::strict_diabatic());
    assert!(spectrum(Gauge::CoulombNaiveProjected, &inputs, &photon(10, 0.1), 0.0, 4).is_err());
    let too_big = GaugeInputs::new(common::strict_diabatic()).with_large(common::shin_metiu(), 14);
    assert!(large_basis_shift(&too_big, &photon(10, 0.1), 0.0, 4).is_err());
    assert!(common::strict_diabatic().point(3.5).is_err());
}
