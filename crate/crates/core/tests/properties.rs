use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tierroots::corpus::{random_sparse, separated_corpus};
use tierroots::covering::{build_covering, build_ladder, default_epsilon_f};
use tierroots::factorization::rough_factor_normalized;
use tierroots::heights::{estimate_heights, newton_polygon_heights};
use tierroots::io::{parse_document, to_json, InputDocument, Options};
use tierroots::oracle::{find_roots, RootFindConfig};
use tierroots::oscillatory::{windowed_integral_default, PolyPhase};
use tierroots::poly::{RootMultiset, SparsePolynomial};
use tierroots::tiers::{assign_roots, decompose};

fn sparse() -> impl Strategy<Value = SparsePolynomial> {
    any::<u64>().prop_map(|seed| random_sparse(&mut ChaCha8Rng::seed_from_u64(seed), 8, 30, 8.0))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_heights_match_newton_polygon(p in sparse()) {
        let g = estimate_heights(&p).unwrap();
        let n = newton_polygon_heights(&p).unwrap();
        prop_assert_eq!(&g.alphas, &n.alphas);
        prop_assert_eq!(&g.gaps, &n.gaps);
        for (a, b) in g.etas.iter().zip(&n.etas) {
            prop_assert!(close(*a, *b, 1e-12), "{} vs {}", a, b);
        }
    }

    #[test]
    fn heights_scale_with_the_variable(p in sparse(), e in -20i32..20) {
        let sigma = 2f64.powi(e);
        let g = estimate_heights(&p).unwrap();
        let s = estimate_heights(&p.rescaled(sigma)).unwrap();
        prop_assert_eq!(&g.gaps, &s.gaps);
        for (a, b) in g.etas.iter().zip(&s.etas) {
            prop_assert!(close(a / sigma, *b, 1e-12), "{} vs {}", a / sigma, b);
        }
    }

    #[test]
    fn heights_account_for_every_root(p in sparse()) {
        let g = estimate_heights(&p).unwrap();
        prop_assert_eq!(g.gaps.iter().sum::<usize>(), p.degree());
        prop_assert!(g.etas.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn tiers_partition_the_degree(p in sparse(), sep in 2.0f64..1e4) {
        let (_, dec) = decompose(&p, sep).unwrap();
        prop_assert_eq!(dec.root_counts().iter().sum::<usize>(), p.degree());
        prop_assert_eq!(dec.tiers.iter().map(|t| t.l).sum::<usize>(), p.l());
        prop_assert!(dec.gap_ratios.iter().all(|&r| r >= sep));
        for t in &dec.tiers {
            prop_assert_eq!(t.cluster_bound, t.l);
            prop_assert_eq!(t.local_k.last().copied(), Some(t.root_count));
        }
    }

    #[test]
    fn input_documents_round_trip(p in sparse(), sep in 2.0f64..1e6, eps in 1e-6f64..0.5) {
        let opts = Options { separation: sep, epsilon: eps, ..Options::default() };
        let doc = InputDocument::new(&p, opts);
        let text = to_json(&doc).unwrap();
        let back = parse_document(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.polynomial().unwrap(), p);
    }

    #[test]
    fn odd_phases_have_real_integrals(
        x in -2.0f64..2.0,
        ys in proptest::collection::vec(-1.0f64..1.0, 1..4),
        base in 1usize..3,
    ) {
        // Even derivative exponents make the phase odd.
        let ks: Vec<usize> = (0..ys.len()).map(|i| 2 * (base + i)).collect();
        let mut ys = ys;
        if *ys.last().unwrap() == 0.0 {
            *ys.last_mut().unwrap() = 1.0;
        }
        let v = windowed_integral_default(&PolyPhase::new(x, ys, ks).unwrap(), 1.5).unwrap();
        prop_assert!(v.im.abs() <= 1e-8, "imaginary part {}", v.im);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rough_factors_keep_tier_degrees(seed in any::<u64>()) {
        let case = separated_corpus(seed, 1, 1e3).pop().unwrap();
        let (_, dec) = decompose(&case.poly, 10.0).unwrap();
        let rf = rough_factor_normalized(&case.poly, &dec).unwrap();
        prop_assert_eq!(rf.degree(), case.poly.degree());
        let degs: Vec<usize> = rf.factors.iter().map(|f| f.degree()).collect();
        prop_assert_eq!(degs, dec.root_counts());
        prop_assert!(rf.factors.iter().all(|f| f.is_monic()));
    }

    #[test]
    fn covering_ignores_root_order(seed in any::<u64>(), shuffle_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let case = separated_corpus(seed, 1, 1e3).pop().unwrap();
        let (_, dec) = decompose(&case.poly, 10.0).unwrap();
        let roots = find_roots(&case.poly, &RootFindConfig::default()).unwrap();
        let asg = assign_roots(&dec, &roots).unwrap();
        let ladder = build_ladder(case.poly.l(), default_epsilon_f(dec.min_gap())).unwrap();
        let base = build_covering(&asg.tiers, &dec.heights(), &ladder).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed);
        let shuffled: Vec<RootMultiset> = asg
            .tiers
            .iter()
            .map(|t| {
                let mut u: Vec<Complex64> = t.units();
                u.shuffle(&mut rng);
                RootMultiset::from_units(&u)
            })
            .collect();
        let other = build_covering(&shuffled, &dec.heights(), &ladder).unwrap();
        prop_assert_eq!(base.cells.len(), other.cells.len());
        for (a, b) in base.cells.iter().zip(&other.cells) {
            prop_assert_eq!(a.b, b.b);
            prop_assert!((a.center - b.center).norm() <= 1e-12 * a.center.norm());
        }
    }
}
