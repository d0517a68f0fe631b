use conetensor::ballcones::{lorentz_max_membership_centered, lorentz_min_decomposition, lorentz_min_membership_centered, reconstruct, CenteredTensor};
use conetensor::dim3lab::{build_omega, chsh_combination};
use conetensor::exactnum::mat::{FMat, QMat};
use conetensor::exactnum::rational::{int, rat, Rational};
use conetensor::gptnorms::{injective_norm, projective_norm, NormedSpace};
use conetensor::retractlab::{descend_to_3d, dualize_retract, facet_retract, verify_retract};
use conetensor::samples;
use proptest::prelude::*;

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..=40, -39i64..=39).prop_map(|(q, p)| rat(p.clamp(-q + 1, q - 1), q))
}

fn space(i: usize) -> NormedSpace {
    [NormedSpace::square(), NormedSpace::diamond(), NormedSpace::hexagon()][i].clone()
}

fn centered(entries: &[f64], apex: f64, n: usize) -> CenteredTensor {
    let mut block = FMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            block[(i, j)] = entries[i * n + j];
        }
    }
    CenteredTensor::new(block, apex).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn omega_chsh_identity(a1 in unit_rational(), b1 in unit_rational(), a2 in unit_rational(), b2 in unit_rational()) {
        let o = build_omega(&a1, &b1, &a2, &b2).unwrap();
        prop_assert_eq!(chsh_combination(&o), int(2) * &o[(2, 2)]);
    }

    #[test]
    fn injective_below_projective(x in 0usize..3, y in 0usize..3, entries in prop::collection::vec(-8i64..=8, 4)) {
        prop_assume!(entries.iter().any(|e| *e != 0));
        let z = QMat::from_vec(2, 2, entries.iter().map(|e| int(*e)).collect()).unwrap();
        let (x, y) = (space(x), space(y));
        let eps = injective_norm(&x, &y, &z).unwrap();
        let pi = projective_norm(&x, &y, &z).unwrap().value;
        prop_assert!(eps.exact().unwrap() <= pi.exact().unwrap());
        // The same ordering holds on the dual spaces.
        let dual_pi = projective_norm(&x.dual().unwrap(), &y.dual().unwrap(), &z).unwrap().value;
        prop_assert!(injective_norm(&x.dual().unwrap(), &y.dual().unwrap(), &z).unwrap().exact().unwrap() <= dual_pi.exact().unwrap());
    }

    #[test]
    fn min_criterion_implies_max_and_is_monotone(
        n in 2usize..=4,
        entries in prop::collection::vec(-2.0f64..2.0, 16),
        apex in 0.0f64..4.0,
        r in 0.5f64..3.0,
    ) {
        let z = centered(&entries, apex, n);
        let tol = 1e-9;
        if lorentz_min_membership_centered(&z, 1.0, tol).unwrap() {
            prop_assert!(lorentz_max_membership_centered(&z, tol).unwrap());
        }
        if lorentz_min_membership_centered(&z, r, tol).unwrap() {
            prop_assert!(lorentz_min_membership_centered(&z, r + 0.5, tol).unwrap());
        }
    }

    #[test]
    fn min_decomposition_reconstructs(n in 2usize..=4, entries in prop::collection::vec(-1.0f64..1.0, 16), r in 1.0f64..3.0) {
        let z = centered(&entries, 5.0, n);
        if let Some(terms) = lorentz_min_decomposition(&z, r, 1e-9).unwrap() {
            prop_assert!(reconstruct(&terms, n + 1).max_abs_diff(&z.to_matrix()) < 1e-9);
        }
    }

    #[test]
    fn facet_retracts_verify(seed in 0u64..1000) {
        let mut rng = samples::rng(seed);
        let c = samples::random_cone(&mut rng, 4, 7);
        for i in 0..c.facets().unwrap().len() {
            if let Ok(f) = facet_retract(&c, i) {
                prop_assert!(verify_retract(&f.retract).unwrap());
                prop_assert!(verify_retract(&dualize_retract(&f.retract).unwrap()).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn descent_lands_in_dimension_three(seed in 0u64..1000) {
        let mut rng = samples::rng(seed);
        let c = samples::random_cone(&mut rng, 4, 8);
        prop_assume!(c.extreme_rays().unwrap().len() > 4);
        let trace = descend_to_3d(&c).unwrap();
        prop_assert_eq!(trace.retract.target.ambient_dim(), 3);
        prop_assert!(verify_retract(&trace.retract).unwrap());
    }
}
