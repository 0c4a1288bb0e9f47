mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rescat::analysis::{find_features, fwhm, FeatureKind};
use rescat::necklace_chain::{
    collective_modes, s_necklace_chain_collective, s_necklace_chain_n2, s_necklace_chain_site, spectrum_necklace_chain,
};
use rescat::single::{s_necklace, spectrum_single};
use rescat::{Boundary, Channel, Error, FrequencyGrid, Method, NecklaceChain, SingleResonator};

fn lab_chain(n: usize) -> NecklaceChain {
    NecklaceChain::homogeneous(
        n,
        HANGER_OMEGA,
        NECKLACE_G,
        NECKLACE_GAMMA,
        NECKLACE_GAMMA,
        HANGER_GAMMA_A,
        Boundary::HardWall,
    )
    .unwrap()
}

/// Covers every hard-wall mode of the lab chain with a step well below the narrowest mode width.
fn band_grid(points: usize) -> FrequencyGrid {
    FrequencyGrid::centered(HANGER_OMEGA, 2.2 * NECKLACE_G, points).unwrap()
}

#[test]
fn site_solver_matches_independent_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let n = rng.random_range(1..9);
        let omega0: Vec<f64> = (0..n).map(|_| uniform(&mut rng, 9.0, 11.0)).collect();
        let g: Vec<f64> = (1..n).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
        let gamma_a: Vec<f64> = (0..n).map(|_| uniform(&mut rng, 0.0, 0.2)).collect();
        let (g1, g2) = (uniform(&mut rng, 0.0, 0.5), uniform(&mut rng, 0.0, 0.5));
        let chain = NecklaceChain::new(omega0.clone(), g.clone(), g1, g2, gamma_a.clone(), Boundary::HardWall).unwrap();
        let w = uniform(&mut rng, 9.0, 11.0);
        let delta: Vec<f64> = omega0.iter().map(|o| o - w).collect();
        let s = s_necklace_chain_site(&chain, w).unwrap();
        assert!(max_dev(&s, &necklace_chain(&delta, &g, g1, g2, &gamma_a, None)) < 1e-11);
    }
}

#[test]
fn one_site_reduces_to_single_necklace() {
    let chain = NecklaceChain::new(vec![10.0], vec![], 0.3, 0.1, vec![0.02], Boundary::HardWall).unwrap();
    for w in [9.0, 9.9, 10.0, 10.05, 12.0] {
        let single = s_necklace(10.0 - w, 0.3, 0.1, 0.02).unwrap();
        assert!(max_dev(&s_necklace_chain_site(&chain, w).unwrap(), &single) < 1e-12);
        let collective = s_necklace_chain_collective(1, 10.0 - w, 0.7, 0.3, 0.1, 0.02, Boundary::HardWall).unwrap();
        assert!(max_dev(&collective, &single) < 1e-12);
    }
}

#[test]
fn two_site_closed_form_matches_site_solver_over_a_sweep() {
    let chain = NecklaceChain::new(
        vec![HANGER_OMEGA, HANGER_OMEGA + 0.5 * NECKLACE_GAMMA],
        vec![0.8 * NECKLACE_GAMMA],
        NECKLACE_GAMMA,
        0.6 * NECKLACE_GAMMA,
        vec![HANGER_GAMMA_A, 0.5 * HANGER_GAMMA_A],
        Boundary::HardWall,
    )
    .unwrap();
    let grid = FrequencyGrid::centered(HANGER_OMEGA, 10.0 * NECKLACE_GAMMA, 401).unwrap();
    let site = spectrum_necklace_chain(&chain, &grid, Method::Site).unwrap();
    let n2 = spectrum_necklace_chain(&chain, &grid, Method::ClosedFormN2).unwrap();
    assert!(site.max_abs_diff(&n2).unwrap() < 1e-10);
}

#[test]
fn broken_two_site_chain_reflects_like_a_single_site() {
    for d in [-1.0, 0.0, 0.3] {
        let s = s_necklace_chain_n2(d, 0.2, 0.0, 0.4, 0.3, 0.05, 0.05).unwrap();
        assert_eq!(s.s21, rescat::C64::from(0.0));
        // Port 1 sees one resonator with γ1 only, its far side open.
        let single = s_necklace(d, 0.4, 0.0, 0.05).unwrap();
        assert!((s.s11 - single.s11).norm() < 1e-12);
    }
}

#[test]
fn impedance_matched_pair_transmits_fully() {
    let gamma = 0.4;
    let s = s_necklace_chain_n2(0.0, 0.0, gamma / 2.0, gamma, gamma, 0.0, 0.0).unwrap();
    assert!((s.s21.norm() - 1.0).abs() < 1e-12);
    let chain = NecklaceChain::homogeneous(2, 5.0, gamma / 2.0, gamma, gamma, 0.0, Boundary::HardWall).unwrap();
    assert!(max_dev(&s, &s_necklace_chain_site(&chain, 5.0).unwrap()) < 1e-12);
}

#[test]
fn two_site_closed_form_at_lab_rates_on_resonance() {
    let s = s_necklace_chain_n2(0.0, 0.0, NECKLACE_G, NECKLACE_GAMMA, NECKLACE_GAMMA, HANGER_GAMMA_A, HANGER_GAMMA_A)
        .unwrap();
    assert!(max_dev(&s, &s_necklace_chain_site(&lab_chain(2), HANGER_OMEGA).unwrap()) < 1e-12);
}

#[test]
fn hard_wall_single_mode_sits_at_the_bare_detuning() {
    let modes = collective_modes(1, 0.37, 2.0, 0.1, 0.1, Boundary::HardWall);
    assert!((modes.delta_k[0] - 0.37).abs() < 1e-15);
    assert_eq!(modes.parity, Some(vec![-1.0]));
}

#[test]
fn hard_wall_band_approaches_four_hoppings() {
    let g = 1.3;
    let spread = collective_modes(50, 0.0, g, 0.1, 0.1, Boundary::HardWall).spread();
    assert!(spread > 3.98 * g && spread < 4.0 * g);
}

#[test]
fn periodic_four_site_dispersion() {
    let (d, g) = (0.25, 1.0);
    let modes = collective_modes(4, d, g, 0.1, 0.1, Boundary::Periodic);
    let expected = [d, d + 2.0 * g, d, d - 2.0 * g];
    for (a, b) in modes.delta_k.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(modes.parity.is_none());
}

#[test]
fn collective_matches_site_solver_at_lab_rates() {
    let grid = band_grid(401);
    for n in 2..=6 {
        let chain = lab_chain(n);
        let site = spectrum_necklace_chain(&chain, &grid, Method::Site).unwrap();
        let collective = spectrum_necklace_chain(&chain, &grid, Method::Collective).unwrap();
        let dev = site.max_abs_diff(&collective).unwrap();
        assert!(dev < 1e-9, "n={n} dev={dev}");
    }
}

#[test]
fn periodic_three_site_ring_is_reciprocal_and_passive() {
    for d in [-3.0, -1.0, -0.2, 0.0, 0.5, 2.0] {
        let s = s_necklace_chain_collective(3, d, 1.0, 0.3, 0.3, 0.05, Boundary::Periodic).unwrap();
        assert!((s.s21 - s.s12).norm() < 1e-12);
        assert!(s.power_from_port1() <= 1.0 + 1e-12 && s.power_from_port2() <= 1.0 + 1e-12);
    }
}

#[test]
fn periodic_closed_form_matches_a_ring_of_sites() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let n = rng.random_range(3..9);
        let (d, g) = (uniform(&mut rng, -3.0, 3.0), uniform(&mut rng, 0.2, 1.5));
        let (g1, g2, ga) = (uniform(&mut rng, 0.01, 0.5), uniform(&mut rng, 0.01, 0.5), uniform(&mut rng, 0.001, 0.1));
        let s = s_necklace_chain_collective(n, d, g, g1, g2, ga, Boundary::Periodic).unwrap();
        let ring = necklace_chain(&vec![d; n], &[], g1, g2, &vec![ga; n], Some(g));
        assert!(max_dev(&s, &ring) < 1e-10);
    }
}

#[test]
fn five_site_transmission_peaks_sit_on_the_mode_detunings() {
    let chain = lab_chain(5);
    let spec = spectrum_necklace_chain(&chain, &band_grid(40001), Method::Site).unwrap();
    let peaks = find_features(&spec, Channel::S21, FeatureKind::Peak, 1e-2);
    assert_eq!(peaks.len(), 5);
    // Δ_k = 0 at ω_d = ω0 - 2g cos(kπ/6).
    let mut expected: Vec<f64> =
        (1..=5).map(|k| HANGER_OMEGA - 2.0 * NECKLACE_G * (k as f64 * std::f64::consts::PI / 6.0).cos()).collect();
    expected.sort_by(f64::total_cmp);
    for (p, w) in peaks.iter().zip(expected) {
        let width = fwhm(&spec, p).unwrap();
        assert!((p.center - w).abs() < 0.5 * width, "peak {} vs {w}", p.center);
    }
}

#[test]
fn mode_count_equals_site_count() {
    let grid = FrequencyGrid::centered(10.0, 3.0, 20001).unwrap();
    for n in 1..=6 {
        let chain = NecklaceChain::homogeneous(n, 10.0, 1.0, 0.05, 0.05, 0.005, Boundary::HardWall).unwrap();
        let spec = spectrum_necklace_chain(&chain, &grid, Method::Site).unwrap();
        assert_eq!(find_features(&spec, Channel::S21, FeatureKind::Peak, 1e-2).len(), n, "n={n}");
    }
}

#[test]
fn even_chains_reflect_at_the_center() {
    for n in [2, 4] {
        let s = s_necklace_chain_site(&lab_chain(n), HANGER_OMEGA).unwrap();
        assert!(s.s21.norm() < 0.1, "n={n} |S21|={}", s.s21.norm());
    }
}

#[test]
fn central_odd_peak_narrows_with_length() {
    let grid = FrequencyGrid::centered(HANGER_OMEGA, 50.0 * NECKLACE_GAMMA, 20001).unwrap();
    let widths: Vec<f64> = [1, 3, 5]
        .iter()
        .map(|&n| {
            let spec = spectrum_necklace_chain(&lab_chain(n), &grid, Method::Site).unwrap();
            let peaks = find_features(&spec, Channel::S21, FeatureKind::Peak, 1e-2);
            let central = peaks
                .iter()
                .min_by(|a, b| (a.center - HANGER_OMEGA).abs().total_cmp(&(b.center - HANGER_OMEGA).abs()))
                .unwrap();
            fwhm(&spec, central).unwrap()
        })
        .collect();
    assert!(widths.windows(2).all(|w| w[1] < w[0]), "{widths:?}");
}

#[test]
fn methods_agree_for_two_sites_and_reject_inapplicable_requests() {
    let chain = lab_chain(2);
    let grid = band_grid(401);
    let spectra: Vec<_> = [Method::Site, Method::ClosedFormN2, Method::Collective]
        .iter()
        .map(|&m| spectrum_necklace_chain(&chain, &grid, m).unwrap())
        .collect();
    for a in &spectra {
        for b in &spectra {
            assert!(a.max_abs_diff(b).unwrap() < 1e-9);
        }
    }
    let uneven =
        NecklaceChain::new(vec![1.0, 1.1, 1.0], vec![0.3, 0.3], 0.1, 0.1, vec![0.0; 3], Boundary::HardWall).unwrap();
    assert!(matches!(spectrum_necklace_chain(&uneven, &grid, Method::Collective), Err(Error::Usage(_))));
    assert!(matches!(spectrum_necklace_chain(&uneven, &grid, Method::ClosedFormN2), Err(Error::Usage(_))));
    let ring = NecklaceChain::homogeneous(3, 1.0, 0.3, 0.1, 0.1, 0.0, Boundary::Periodic).unwrap();
    assert!(matches!(spectrum_necklace_chain(&ring, &grid, Method::Site), Err(Error::Usage(_))));
    assert!(matches!(spectrum_necklace_chain(&chain, &grid, Method::Thomas), Err(Error::Usage(_))));
}

#[test]
fn one_site_spectrum_equals_the_single_sweep() {
    let chain = lab_chain(1);
    let grid = FrequencyGrid::centered(HANGER_OMEGA, 10.0 * NECKLACE_GAMMA, 101).unwrap();
    let single = spectrum_single(
        &SingleResonator::necklace(HANGER_OMEGA, NECKLACE_GAMMA, NECKLACE_GAMMA, HANGER_GAMMA_A).unwrap(),
        &grid,
    )
    .unwrap();
    for m in [Method::Site, Method::Collective] {
        assert!(spectrum_necklace_chain(&chain, &grid, m).unwrap().max_abs_diff(&single).unwrap() < 1e-12);
    }
}

fn random_chain(n: usize, lossless: bool) -> impl Strategy<Value = (NecklaceChain, f64)> {
    (
        prop::collection::vec(9.5..10.5f64, n),
        prop::collection::vec(-1.0..1.0f64, n - 1),
        0.0..0.5f64,
        0.0..0.5f64,
        prop::collection::vec(0.0..0.2f64, n),
        9.0..11.0f64,
    )
        .prop_map(move |(w0, g, g1, g2, ga, w)| {
            let ga = if lossless { vec![0.0; ga.len()] } else { ga };
            (NecklaceChain::new(w0, g, g1, g2, ga, Boundary::HardWall).unwrap(), w)
        })
}

proptest! {
    #[test]
    fn reciprocity_across_methods(
        n in 1usize..=8, d in -3.0..3.0f64, g in 0.1..1.0f64, g1 in 0.01..0.5f64, g2 in 0.01..0.5f64, ga in 0.001..0.1f64,
    ) {
        for b in [Boundary::HardWall, Boundary::Periodic] {
            let s = s_necklace_chain_collective(n, d, g, g1, g2, ga, b).unwrap();
            prop_assert!((s.s21 - s.s12).norm() < 1e-12);
        }
        let chain = NecklaceChain::homogeneous(n, 10.0, g, g1, g2, ga, Boundary::HardWall).unwrap();
        let s = s_necklace_chain_site(&chain, 10.0 - d).unwrap();
        prop_assert!((s.s21 - s.s12).norm() < 1e-12);
    }

    #[test]
    fn site_reciprocity((chain, w) in (1usize..=8).prop_flat_map(|n| random_chain(n, false))) {
        if let Ok(s) = s_necklace_chain_site(&chain, w) {
            prop_assert!((s.s21 - s.s12).norm() < 1e-12);
        }
    }

    #[test]
    fn lossless_flux_conservation((chain, w) in (1usize..=8).prop_flat_map(|n| random_chain(n, true))) {
        match s_necklace_chain_site(&chain, w) {
            Ok(s) => {
                prop_assert!((s.power_from_port1() - 1.0).abs() < 1e-10);
                prop_assert!((s.power_from_port2() - 1.0).abs() < 1e-10);
            }
            Err(Error::Solver { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn collective_equals_site_on_homogeneous_chains(
        n in 1usize..=8, d in -3.0..3.0f64, g in 0.1..1.0f64, g1 in 0.01..0.5f64, g2 in 0.01..0.5f64, ga in 0.001..0.1f64,
    ) {
        let chain = NecklaceChain::homogeneous(n, 10.0, g, g1, g2, ga, Boundary::HardWall).unwrap();
        let site = s_necklace_chain_site(&chain, 10.0 - d).unwrap();
        let collective = s_necklace_chain_collective(n, d, g, g1, g2, ga, Boundary::HardWall).unwrap();
        prop_assert!(max_dev(&site, &collective) < 1e-10);
    }
}
