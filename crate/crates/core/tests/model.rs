mod common;

use common::*;
use proptest::prelude::*;
use rescat::{
    q_from_rates, rates_from_q, Boundary, Coupling, Error, FrequencyGrid, Geometry, HangerChain, NecklaceChain,
    QualityFactorSet, SingleResonator,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn lab_hanger_quality_factors_give_lab_rates() {
    let q = QualityFactorSet { omega_a: HANGER_OMEGA, q_i: 3.1410e4, q_c1: 3.5878e3, q_c2: None };
    let r = rates_from_q(&q, Geometry::Hanger).unwrap();
    let Coupling::Hanger { gamma } = r.coupling else { panic!("{:?}", r.coupling) };
    assert!(rel(gamma, HANGER_GAMMA) < 1e-4);
    assert!(rel(r.gamma_a, HANGER_GAMMA_A) < 1e-4);
    assert_eq!(r.omega0, HANGER_OMEGA);
}

#[test]
fn lab_hanger_rates_give_lab_quality_factors() {
    let r = SingleResonator::hanger(HANGER_OMEGA, HANGER_GAMMA, HANGER_GAMMA_A).unwrap();
    let q = q_from_rates(&r).unwrap();
    // 6.659e9/(2·928e3) and 6.659e9/212e3.
    assert!(rel(q.q_c1, 3587.823275862069) < 1e-12);
    assert!(rel(q.q_i, 31410.37735849057) < 1e-12);
    assert_eq!(q.q_c2, None);
}

#[test]
fn divergent_internal_q_means_no_loss() {
    let q = QualityFactorSet { omega_a: HANGER_OMEGA, q_i: 1e300, q_c1: 3.5878e3, q_c2: None };
    assert!(rates_from_q(&q, Geometry::Hanger).unwrap().gamma_a < 1e-280);
}

#[test]
fn necklace_substitution() {
    let q = QualityFactorSet { omega_a: 1.0, q_i: 4.0, q_c1: 2.0, q_c2: Some(2.0) };
    let r = rates_from_q(&q, Geometry::Necklace).unwrap();
    assert_eq!(r.coupling, Coupling::Necklace { gamma1: 0.5, gamma2: 0.5 });
    assert_eq!(r.gamma_a, 0.25);
    let b = rates_from_q(&q, Geometry::Bridge).unwrap();
    assert_eq!(b.coupling, Coupling::Bridge { gamma1: 0.5, gamma2: 0.5 });
}

#[test]
fn lossless_resonator_has_no_finite_internal_q() {
    let r = SingleResonator::hanger(1.0, 0.1, 0.0).unwrap();
    assert!(matches!(q_from_rates(&r), Err(Error::Domain(_))));
}

#[test]
fn mismatched_coupling_q_count_is_rejected() {
    let hanger_with_two = QualityFactorSet { omega_a: 1.0, q_i: 4.0, q_c1: 2.0, q_c2: Some(2.0) };
    assert!(rates_from_q(&hanger_with_two, Geometry::Hanger).is_err());
    let necklace_with_one = QualityFactorSet { q_c2: None, ..hanger_with_two };
    assert!(rates_from_q(&necklace_with_one, Geometry::Necklace).is_err());
}

#[test]
fn chain_shapes_are_validated() {
    assert!(HangerChain::new(vec![], vec![], vec![], 0.0).is_err());
    assert!(HangerChain::new(vec![1.0, 1.0], vec![0.1], vec![0.0, 0.0], 0.0).is_err());
    assert!(HangerChain::new(vec![1.0], vec![0.1], vec![0.0], f64::NAN).is_err());
    assert!(NecklaceChain::new(vec![1.0, 1.0], vec![], 0.1, 0.1, vec![0.0; 2], Boundary::HardWall).is_err());
    assert!(NecklaceChain::new(vec![1.0], vec![], 0.1, 0.1, vec![0.0], Boundary::HardWall).is_ok());
}

fn geometry() -> impl Strategy<Value = Geometry> {
    prop_oneof![Just(Geometry::Hanger), Just(Geometry::Necklace), Just(Geometry::Bridge)]
}

fn positive() -> impl Strategy<Value = f64> {
    (-6.0..12.0f64).prop_map(|e| 10f64.powf(e))
}

fn invalid() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..-1e-12f64, Just(f64::NAN), Just(f64::NEG_INFINITY)]
}

proptest! {
    #[test]
    fn quality_factor_round_trip(g in geometry(), w in positive(), qi in positive(), q1 in positive(), q2 in positive()) {
        let q = QualityFactorSet { omega_a: w, q_i: qi, q_c1: q1, q_c2: (g != Geometry::Hanger).then_some(q2) };
        let back = q_from_rates(&rates_from_q(&q, g).unwrap()).unwrap();
        prop_assert!(rel(back.q_i, qi) < 1e-12);
        prop_assert!(rel(back.q_c1, q1) < 1e-12);
        if let (Some(a), Some(b)) = (back.q_c2, q.q_c2) {
            prop_assert!(rel(a, b) < 1e-12);
        }
    }

    #[test]
    fn rate_round_trip(w in positive(), ga in positive(), g1 in positive(), g2 in positive()) {
        for r in [
            SingleResonator::hanger(w, g1, ga).unwrap(),
            SingleResonator::necklace(w, g1, g2, ga).unwrap(),
            SingleResonator::bridge(w, g1, g2, ga).unwrap(),
        ] {
            let back = rates_from_q(&q_from_rates(&r).unwrap(), r.geometry()).unwrap();
            prop_assert!(rel(back.gamma_a, r.gamma_a) < 1e-12);
            let pairs = match (back.coupling, r.coupling) {
                (Coupling::Hanger { gamma: a }, Coupling::Hanger { gamma: b }) => vec![(a, b)],
                (Coupling::Necklace { gamma1: a1, gamma2: a2 }, Coupling::Necklace { gamma1: b1, gamma2: b2 })
                | (Coupling::Bridge { gamma1: a1, gamma2: a2 }, Coupling::Bridge { gamma1: b1, gamma2: b2 }) => {
                    vec![(a1, b1), (a2, b2)]
                }
                other => return Err(TestCaseError::fail(format!("geometry changed: {other:?}"))),
            };
            for (a, b) in pairs {
                prop_assert!(rel(a, b) < 1e-12);
            }
        }
    }

    #[test]
    fn negative_or_nonfinite_rates_are_rejected(bad in invalid(), ok in 0.0..1.0f64) {
        prop_assert!(SingleResonator::hanger(1.0, bad, ok).is_err());
        prop_assert!(SingleResonator::hanger(1.0, ok, bad).is_err());
        prop_assert!(SingleResonator::necklace(1.0, ok, bad, ok).is_err());
        prop_assert!(SingleResonator::bridge(1.0, bad, ok, ok).is_err());
        prop_assert!(HangerChain::new(vec![1.0, 1.0], vec![ok, bad], vec![ok, ok], 0.0).is_err());
        prop_assert!(HangerChain::new(vec![1.0, 1.0], vec![ok, ok], vec![bad, ok], 0.0).is_err());
        prop_assert!(NecklaceChain::new(vec![1.0, 1.0], vec![ok], bad, ok, vec![ok, ok], Boundary::HardWall).is_err());
        prop_assert!(NecklaceChain::new(vec![1.0, 1.0], vec![ok], ok, ok, vec![ok, bad], Boundary::HardWall).is_err());
        let q = QualityFactorSet { omega_a: 1.0, q_i: bad, q_c1: 1.0, q_c2: None };
        prop_assert!(rates_from_q(&q, Geometry::Hanger).is_err());
        let q = QualityFactorSet { omega_a: 1.0, q_i: 1.0, q_c1: -ok.abs(), q_c2: None };
        prop_assert!(rates_from_q(&q, Geometry::Hanger).is_err());
    }

    #[test]
    fn unsorted_grids_are_rejected(mut xs in prop::collection::vec(-1e3..1e3f64, 2..50), i in any::<prop::sample::Index>()) {
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        prop_assume!(xs.len() >= 2);
        prop_assert!(FrequencyGrid::new(xs.clone()).is_ok());
        let k = i.index(xs.len() - 1);
        let mut swapped = xs.clone();
        swapped.swap(k, k + 1);
        prop_assert!(FrequencyGrid::new(swapped).is_err());
        let mut repeated = xs.clone();
        repeated[k + 1] = repeated[k];
        prop_assert!(FrequencyGrid::new(repeated).is_err());
    }
}

#[test]
fn empty_and_nonfinite_grids_are_rejected() {
    assert!(FrequencyGrid::new(vec![]).is_err());
    assert!(FrequencyGrid::new(vec![1.0, f64::INFINITY]).is_err());
    assert!(FrequencyGrid::new(vec![1.0]).is_ok());
}
