use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rispace::numeric::golden_section_max;
use rispace::{SpaceSpec, StepFn, WeightFn};

fn spaces() -> Vec<SpaceSpec> {
    vec![
        SpaceSpec::lp(1.0),
        SpaceSpec::lp(2.5),
        SpaceSpec::Linf,
        SpaceSpec::xp(1.3),
        SpaceSpec::xp(1.8),
        SpaceSpec::Lorentz {
            p: 2.0,
            weight: WeightFn::Power { beta: 0.5 },
        },
        SpaceSpec::Marcinkiewicz {
            weight: WeightFn::PhiP { p: 1.5 },
        },
        SpaceSpec::Marcinkiewicz {
            weight: WeightFn::Power { beta: 0.7 },
        },
        SpaceSpec::exp_l(1.0),
        SpaceSpec::exp_l(2.0),
    ]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-300
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..24)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_only_see_the_distribution(v in values(), seed in any::<u64>()) {
        let f = StepFn::uniform(&v).unwrap();
        let mut w = v.clone();
        w.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        for x in w.iter_mut().step_by(2) {
            *x = -*x;
        }
        let g = StepFn::uniform(&w).unwrap();
        for s in spaces() {
            let (a, b) = (s.norm(&f).unwrap(), s.norm(&g).unwrap());
            prop_assert!(close(a, b, 1e-12), "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn ideal_property(v in values(), shrink in prop::collection::vec(0.0f64..=1.0, 24)) {
        let f = StepFn::uniform(&v).unwrap();
        let smaller: Vec<f64> = v.iter().zip(&shrink).map(|(x, s)| x * s).collect();
        let g = StepFn::uniform(&smaller).unwrap();
        for s in spaces() {
            let (a, b) = (s.norm(&g).unwrap(), s.norm(&f).unwrap());
            prop_assert!(a <= b * (1.0 + 1e-12), "{s}: {a} > {b}");
        }
    }

    #[test]
    fn homogeneity(v in values(), c in -20.0f64..20.0) {
        let f = StepFn::uniform(&v).unwrap();
        let g = f.scale(c);
        for s in spaces() {
            let (a, b) = (s.norm(&g).unwrap(), c.abs() * s.norm(&f).unwrap());
            prop_assert!(close(a, b, 1e-12), "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn fundamental_functions(t in 1e-6f64..=1.0) {
        let chi = StepFn::indicator(0.0, t).unwrap();
        let w = WeightFn::W { p: 1.5 };
        prop_assert!(close(SpaceSpec::xp(1.5).norm(&chi).unwrap(), w.eval(t).powf(1.0 / 1.5), 1e-13));
        let phi = WeightFn::PhiP { p: 1.5 };
        let m = SpaceSpec::Marcinkiewicz { weight: phi };
        prop_assert!(close(m.norm(&chi).unwrap(), phi.eval(t), 1e-12));
        prop_assert!(close(SpaceSpec::exp_l(2.0).norm(&chi).unwrap(), (1.0 + 1.0 / t).ln().powf(-0.5), 1e-12));
        prop_assert!(close(SpaceSpec::lp(3.0).norm(&chi).unwrap(), t.powf(1.0 / 3.0), 1e-13));
    }

    /// `‖f‖_p <= C_p ‖f‖_{X_p}` with `C_p^p = sup_t 1/W'(t) = sup_t t ln^p(e/t)/(p-1)`.
    #[test]
    fn xp_embeds_in_lp(v in values(), p in 1.1f64..1.95) {
        let (_, peak) = golden_section_max(|t| t * (1.0 - t.ln()).powf(p), 1e-12, 1.0, 200, 1e-14);
        let closed = (1.0 - p).exp() * p.powf(p);
        prop_assert!(close(peak, closed, 1e-10));
        let c = (peak / (p - 1.0)).powf(1.0 / p);
        let f = StepFn::uniform(&v).unwrap();
        let (lp, xp) = (SpaceSpec::lp(p).norm(&f).unwrap(), SpaceSpec::xp(p).norm(&f).unwrap());
        prop_assert!(lp <= c * xp * (1.0 + 1e-12), "{lp} > {c} * {xp}");
    }

    /// `Exp L^q` and `M_{φ_p}`, `q = p/(p-1)`, carry equivalent norms; the
    /// window is the one observed on random families, with margin.
    #[test]
    fn exp_and_marcinkiewicz_are_comparable(v in values(), p in 1.2f64..1.8) {
        let f = StepFn::uniform(&v).unwrap();
        prop_assume!(!f.is_zero());
        let e = SpaceSpec::exp_l(p / (p - 1.0)).norm(&f).unwrap();
        let m = SpaceSpec::Marcinkiewicz { weight: WeightFn::PhiP { p } }.norm(&f).unwrap();
        let r = e / m;
        prop_assert!((0.5..=2.0).contains(&r), "ratio {r}");
    }

    #[test]
    fn rearrangement_is_equimeasurable(v in values(), levels in prop::collection::vec(0.0f64..6.0, 8)) {
        let f = StepFn::uniform(&v).unwrap();
        let r = f.rearrange();
        prop_assert!(r.is_nonincreasing());
        prop_assert_eq!(r.rearrange(), r.clone());
        for l in levels {
            prop_assert!((f.distribution(l).unwrap() - r.distribution(l).unwrap()).abs() <= 1e-15);
        }
        prop_assert!(close(f.l1_norm(), r.l1_norm(), 1e-14));
    }
}
