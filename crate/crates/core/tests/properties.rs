//! Randomized invariants over the symbolic, spectral, and measure layers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use proptest::prelude::*;

use gibbs_fourier::continuants::{
    check_determinant, continuant_quad, interval_length, mirror_identities,
    quasi_multiplicativity,
};
use gibbs_fourier::fourier::{
    dyadic_decompose, dyadic_reconstruct, fourier_transform, mult_convolution,
};
use gibbs_fourier::markov::{MapKind, MarkovSystem};
use gibbs_fourier::measure::DiscreteMeasure;
use gibbs_fourier::word::Word;

fn word_strategy(max_digit: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=max_digit, 1..=max_len)
        .prop_map(|d| Word::new(d).expect("positive digits"))
}

fn gauss() -> MarkovSystem {
    MarkovSystem::new(MapKind::Gauss, 12).unwrap()
}

fn lueroth() -> MarkovSystem {
    MarkovSystem::new(MapKind::Lueroth, 12).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// The determinant alternates sign and the mirror shares continuants.
    #[test]
    fn determinant_and_mirror(w in word_strategy(50, 25)) {
        let det = check_determinant(&w).unwrap();
        prop_assert_eq!(det.abs(), BigInt::one());
        prop_assert!(mirror_identities(&w).unwrap().ok);
    }

    /// Exact interval length vs the continuant formula, plus the 1/q^2 bounds.
    #[test]
    fn interval_length_formula(w in word_strategy(30, 20)) {
        let quad = continuant_quad(&w);
        let len = interval_length(&w).unwrap();
        let expect = BigRational::new(BigInt::one(), &quad.q * (&quad.q + &quad.q_prev));
        prop_assert_eq!(&len, &expect);
        let qq = BigRational::new(BigInt::one(), &quad.q * &quad.q);
        prop_assert!(len <= qq.clone());
        prop_assert!(len >= qq / BigRational::from(BigInt::from(2)));
    }

    /// Splitting a word anywhere keeps the continuant within [1/2, 4] of the
    /// product of the parts' continuants.
    #[test]
    fn quasi_multiplicative_everywhere(w in word_strategy(20, 16), split in 1usize..15) {
        prop_assume!(w.len() >= 2);
        let k = 1 + split % (w.len() - 1);
        let ratio = quasi_multiplicativity(&w, k).unwrap();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let four = BigRational::from(BigInt::from(4));
        prop_assert!(ratio >= half && ratio <= four);
    }

    /// Composite derivative equals the product of branch slopes along the
    /// orbit (chain rule), and its log agrees with the stable evaluation.
    #[test]
    fn chain_rule_consistency(w in word_strategy(12, 10), xr in 0.0f64..1.0) {
        for sys in [gauss(), lueroth()] {
            let mut x = xr;
            let mut log_prod = 0.0;
            // walk backward through the inverse branches accumulating slopes
            for &a in w.digits().iter().rev() {
                let (y, dy, _) = sys.branch(a, x).unwrap();
                log_prod += dy.abs().ln();
                x = y;
            }
            let log_direct = sys.log_branch_derivative_abs(&w, xr).unwrap();
            prop_assert!((log_direct - log_prod).abs() < 1e-10,
                "chain rule mismatch: {log_direct} vs {log_prod}");
            let d = sys.branch_derivative(&w, xr).unwrap();
            if w.len() <= 10 {
                prop_assert!((d.abs().ln() - log_direct).abs() < 1e-9);
            }
        }
    }

    /// The distortion stays within the uniform bound; affine branches have
    /// exactly zero distortion.
    #[test]
    fn distortion_bounded(w in word_strategy(12, 10), x in 0.0f64..1.0) {
        let g = gauss();
        let d = g.distortion(&w, x).unwrap();
        prop_assert!(d.abs() <= g.distortion_bound() + 1e-12);
        let l = lueroth();
        prop_assert_eq!(l.distortion(&w, x).unwrap(), 0.0);
    }

    /// Uniform distortion controls the slope ratio across a cylinder:
    /// |T_w'(x)| / |T_w'(y)| <= e^{B |x - y|}.
    #[test]
    fn slope_ratio_bound(w in word_strategy(12, 10), x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let g = gauss();
        let lx = g.log_branch_derivative_abs(&w, x).unwrap();
        let ly = g.log_branch_derivative_abs(&w, y).unwrap();
        prop_assert!((lx - ly).abs() <= g.distortion_bound() * (x - y).abs() + 1e-12);
    }

    /// A cylinder nests inside its parent's, and sibling cylinders at the
    /// same depth are disjoint up to shared endpoints.
    #[test]
    fn cylinder_nesting_and_disjointness(w in word_strategy(8, 8), a in 1u32..=8, b in 1u32..=8) {
        for sys in [gauss(), lueroth()] {
            let parent = w.parent();
            if !parent.is_empty() {
                let (lo, hi) = sys.cylinder(&w).unwrap();
                let (plo, phi) = sys.cylinder(&parent).unwrap();
                prop_assert!(plo <= lo + 1e-12 && hi <= phi + 1e-12);
            }
            if a != b {
                let wa = w.concat(&Word::new(vec![a]).unwrap());
                let wb = w.concat(&Word::new(vec![b]).unwrap());
                let (alo, ahi) = sys.cylinder(&wa).unwrap();
                let (blo, bhi) = sys.cylinder(&wb).unwrap();
                prop_assert!(ahi <= blo + 1e-12 || bhi <= alo + 1e-12,
                    "siblings overlap: [{alo},{ahi}] vs [{blo},{bhi}]");
            }
        }
    }

    /// Fourier transform of a real measure has conjugate symmetry and is
    /// bounded by the total mass.
    #[test]
    fn fourier_symmetry(pairs in prop::collection::vec((0.0f64..1.0, 0.01f64..1.0), 1..20),
                        xi in -50.0f64..50.0) {
        let m = DiscreteMeasure::from_pairs(pairs).unwrap();
        let plus = fourier_transform(&m, xi);
        let minus = fourier_transform(&m, -xi);
        prop_assert!((plus - minus.conj()).norm() < 1e-12);
        prop_assert!(plus.norm() <= m.total_mass() + 1e-12);
    }

    /// Multiplicative convolution preserves mass and stays in the product
    /// support.
    #[test]
    fn convolution_mass_and_support(
        p1 in prop::collection::vec((0.1f64..1.0, 0.01f64..1.0), 1..12),
        p2 in prop::collection::vec((0.1f64..1.0, 0.01f64..1.0), 1..12),
    ) {
        let m1 = DiscreteMeasure::from_pairs(p1).unwrap();
        let m2 = DiscreteMeasure::from_pairs(p2).unwrap();
        let conv = mult_convolution(&m1, &m2, 1 << 20).unwrap();
        prop_assert!((conv.total_mass() - m1.total_mass() * m2.total_mass()).abs() < 1e-9);
        for (x, _) in conv.iter() {
            prop_assert!(x > 0.0 && x <= 1.0 + 1e-12);
        }
    }

    /// Dyadic decomposition reassembles to the original measure.
    #[test]
    fn dyadic_round_trip(pairs in prop::collection::vec((0.26f64..3.9, 0.01f64..1.0), 1..20)) {
        let m = DiscreteMeasure::from_pairs(pairs).unwrap();
        let pieces = dyadic_decompose(&m, 4.0).unwrap();
        let back = dyadic_reconstruct(&pieces).unwrap();
        prop_assert!((back.total_mass() - m.total_mass()).abs() < 1e-12);
        prop_assert_eq!(back.len(), m.len());
        for ((x, w), (y, v)) in back.iter().zip(m.iter()) {
            prop_assert!((x - y).abs() < 1e-12 && (w - v).abs() < 1e-12);
        }
    }

    /// Mirroring is an involution and preserves the continuant denominator.
    #[test]
    fn mirror_involution(w in word_strategy(40, 20)) {
        prop_assert_eq!(w.mirror().mirror(), w.clone());
        let q1 = continuant_quad(&w).q;
        let q2 = continuant_quad(&w.mirror()).q;
        prop_assert_eq!(q1, q2);
    }
}
