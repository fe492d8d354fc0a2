//! Property tests for activations, losses and metrics.

use mlc_loss::activations::{sigmoid, sigmoid_scalar, sparsemax};
use mlc_loss::losses::{
    build_loss, cel_gradient, cel_value, fl_gradient, fl_value, hl_value, sml_value, wcel_gradient,
    wcel_value, FocalConfig, LossKind, LossParams, WeightVector,
};
use mlc_loss::metrics::{
    confusion, hamming_metric, precision_recall_f1, predict, Averaging, PredictionRule,
};
use mlc_loss::LabelVector;
use proptest::prelude::*;

fn logits(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20.0..20.0f64, 1..=max_len)
}

fn logits_and_labels(max_len: usize) -> impl Strategy<Value = (Vec<f64>, LabelVector)> {
    (1..=max_len).prop_flat_map(|c| {
        (
            prop::collection::vec(-20.0..20.0f64, c),
            prop::collection::vec(prop::bool::ANY, c).prop_map(LabelVector::from_bools),
        )
    })
}

fn label_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<LabelVector>> {
    prop::collection::vec(
        prop::collection::vec(prop::bool::ANY, cols).prop_map(LabelVector::from_bools),
        rows,
    )
}

fn all_params(c: usize) -> LossParams {
    LossParams {
        gamma: None,
        alpha: None,
        weights: Some(WeightVector::ones(c)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sparsemax_lies_on_simplex(z in logits(64)) {
        let r = sparsemax(&z);
        let sum: f64 = r.probs.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        prop_assert!(r.probs.iter().all(|&p| p >= 0.0));
        prop_assert!(!r.support.is_empty());
        for (j, &p) in r.probs.iter().enumerate() {
            prop_assert_eq!(p > 0.0, r.in_support(j));
            if p > 0.0 {
                prop_assert!((p - (z[j] - r.tau)).abs() <= 1e-12);
            } else {
                prop_assert!(z[j] <= r.tau + 1e-12);
            }
        }
    }

    #[test]
    fn sparsemax_is_shift_invariant(z in logits(16), shift in -50.0..50.0f64) {
        let a = sparsemax(&z);
        let shifted: Vec<f64> = z.iter().map(|v| v + shift).collect();
        let b = sparsemax(&shifted);
        for (p, q) in a.probs.iter().zip(b.probs.iter()) {
            prop_assert!((p - q).abs() <= 1e-9);
        }
    }

    #[test]
    fn sparsemax_commutes_with_permutation(z in logits(16), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..z.len()).collect();
        mlc_loss::Rng::new(seed).shuffle(&mut perm);
        let permuted: Vec<f64> = perm.iter().map(|&i| z[i]).collect();
        let a = sparsemax(&z);
        let b = sparsemax(&permuted);
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((b.probs[k] - a.probs[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn sigmoid_in_unit_interval_and_symmetric(z in logits(32)) {
        let p = sigmoid(&z);
        for (&v, &pv) in z.iter().zip(p.iter()) {
            prop_assert!((0.0..=1.0).contains(&pv));
            prop_assert!((pv + sigmoid_scalar(-v) - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn losses_are_finite_and_gradients_match_length((z, y) in logits_and_labels(12)) {
        let params = all_params(z.len());
        for kind in LossKind::ALL {
            let loss = build_loss(kind, &params).unwrap();
            let v = loss.value(&z, &y);
            let g = loss.gradient(&z, &y);
            prop_assert!(v.is_finite(), "{} value {}", kind, v);
            prop_assert_eq!(g.len(), z.len());
            prop_assert!(g.iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn nonnegative_losses((z, y) in logits_and_labels(12)) {
        let params = all_params(z.len());
        for kind in [LossKind::Cel, LossKind::Fl, LossKind::Wcel, LossKind::Hal, LossKind::Hl, LossKind::Rl] {
            let v = build_loss(kind, &params).unwrap().value(&z, &y);
            prop_assert!(v >= 0.0, "{} gave {}", kind, v);
        }
    }

    #[test]
    fn sparsemax_loss_nonnegative_for_single_positive(z in logits(12), pick in any::<prop::sample::Index>()) {
        let k = pick.index(z.len());
        let y = LabelVector::from_bools((0..z.len()).map(|j| j == k));
        prop_assert!(sml_value(&z, &y) >= -1e-12);
    }

    #[test]
    fn focal_with_zero_gamma_is_cross_entropy((z, y) in logits_and_labels(12)) {
        let cfg = FocalConfig::new(0.0).unwrap();
        prop_assert!((fl_value(&z, &y, &cfg) - cel_value(&z, &y)).abs() <= 1e-12);
        for (a, b) in fl_gradient(&z, &y, &cfg).iter().zip(cel_gradient(&z, &y)) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn unit_weights_give_cross_entropy((z, y) in logits_and_labels(12)) {
        let w = WeightVector::ones(z.len());
        prop_assert!((wcel_value(&z, &y, &w).unwrap() - cel_value(&z, &y)).abs() <= 1e-12);
        for (a, b) in wcel_gradient(&z, &y, &w).unwrap().iter().zip(cel_gradient(&z, &y)) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn focal_never_exceeds_cross_entropy((z, y) in logits_and_labels(12), gamma in 0.0..5.0f64) {
        let cfg = FocalConfig::new(gamma).unwrap();
        prop_assert!(fl_value(&z, &y, &cfg) <= cel_value(&z, &y) + 1e-12);
    }

    #[test]
    fn huber_matches_piecewise_definition((z, y) in logits_and_labels(12)) {
        let s = y.to_signed();
        let expected: f64 = z.iter().zip(s.iter()).map(|(&zc, &sc)| {
            let m = sc as f64 * zc;
            if m >= 1.0 { 0.0 } else if m >= -1.0 { (1.0 - m).powi(2) } else { -4.0 * m }
        }).sum();
        prop_assert!((hl_value(&z, &s) - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    #[test]
    fn midpoint_convexity_of_asserted_losses(
        (z1, y) in logits_and_labels(10),
        z2_seed in any::<u64>(),
    ) {
        let mut rng = mlc_loss::Rng::new(z2_seed);
        let z2: Vec<f64> = (0..z1.len()).map(|_| rng.uniform_range(-20.0, 20.0)).collect();
        let mid: Vec<f64> = z1.iter().zip(&z2).map(|(a, b)| 0.5 * (a + b)).collect();
        let params = all_params(z1.len());
        for kind in [LossKind::Cel, LossKind::Wcel, LossKind::Hl, LossKind::Sml] {
            let loss = build_loss(kind, &params).unwrap();
            let lhs = loss.value(&mid, &y);
            let rhs = 0.5 * (loss.value(&z1, &y) + loss.value(&z2, &y));
            prop_assert!(lhs <= rhs + 1e-10 * rhs.abs().max(1.0), "{}: {} > {}", kind, lhs, rhs);
        }
    }

    #[test]
    fn signed_labels_round_trip(bits in prop::collection::vec(prop::bool::ANY, 0..32)) {
        let y = LabelVector::from_bools(bits);
        prop_assert_eq!(y.to_signed().to_binary(), y.clone());
        prop_assert_eq!(y.complement().complement(), y);
    }

    #[test]
    fn metrics_bounded_and_perfect_on_identity(refs in label_matrix(6, 5), preds in label_matrix(6, 5)) {
        let c = confusion(&preds, &refs).unwrap();
        for avg in [Averaging::Micro, Averaging::Macro] {
            let s = precision_recall_f1(&c, avg);
            for v in [s.precision, s.recall, s.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
        let h = hamming_metric(&preds, &refs).unwrap();
        prop_assert!((0.0..=1.0).contains(&h));
        prop_assert_eq!(hamming_metric(&refs, &refs).unwrap(), 0.0);

        let pooled = c.pooled();
        prop_assert_eq!(pooled.total(), 30);
        let micro = precision_recall_f1(&c, Averaging::Micro);
        let expected = if pooled.tp == 0 { 0.0 } else {
            2.0 * pooled.tp as f64 / (2 * pooled.tp + pooled.fp + pooled.fn_) as f64
        };
        prop_assert!((micro.f1 - expected).abs() <= 1e-15);
    }

    #[test]
    fn sigmoid_threshold_agrees_with_probability(z in logits(16), t in 0.05..0.95f64) {
        let rule = PredictionRule::sigmoid_threshold(t).unwrap();
        let pred = predict(&z, rule);
        for (c, &v) in z.iter().enumerate() {
            let p = sigmoid_scalar(v);
            if (p - t).abs() > 1e-9 {
                prop_assert_eq!(pred.is_positive(c), p >= t);
            }
        }
    }
}
