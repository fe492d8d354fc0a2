//! End-to-end gradients through the models and basic training behaviour.

use mlc_loss::data::{generate, split, GeneratorSpec};
use mlc_loss::harness::gradcheck::{central_difference, relative_error};
use mlc_loss::losses::{build_loss, LossKind, LossParams, WeightVector};
use mlc_loss::trainer::{train, Model, ModelSpec, RmspropConfig, TrainConfig};
use mlc_loss::{LabelVector, Rng};

fn params(c: usize) -> LossParams {
    LossParams {
        gamma: None,
        alpha: None,
        weights: Some(WeightVector::new((0..c).map(|k| 0.5 + k as f64 * 0.25).collect()).unwrap()),
    }
}

fn check_model(spec: ModelSpec, seed: u64) {
    let (d, c) = (spec.input_dim, spec.output_dim);
    let mut rng = Rng::new(seed);
    let model = Model::init(spec.clone(), &mut rng).unwrap();
    for kind in LossKind::ALL {
        let loss = build_loss(kind, &params(c)).unwrap();
        let mut checked = 0;
        for _ in 0..20 {
            let x: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
            let y = LabelVector::from_bools((0..c).map(|_| rng.bernoulli(0.4)));
            let (z, cache) = model.forward_cached(&x);
            if loss.kink_distance(&z, &y) < 1e-3 {
                continue;
            }
            let analytic = model.backward(&x, &cache, &loss.gradient(&z, &y));
            let numeric = central_difference(
                |p| {
                    let m = Model::from_params(spec.clone(), p.to_vec()).unwrap();
                    loss.value(&m.forward_cached(&x).0, &y)
                },
                &model.params,
                1e-6,
            );
            let err = relative_error(&analytic, &numeric);
            assert!(err < 1e-5, "{kind}: relative error {err}");
            checked += 1;
        }
        assert!(checked >= 10, "{kind}: only {checked} smooth points");
    }
}

#[test]
fn linear_model_gradients_match_finite_differences() {
    check_model(ModelSpec::linear(5, 4), 7);
}

#[test]
fn mlp_gradients_match_finite_differences() {
    check_model(ModelSpec::mlp(5, 6, 4), 11);
}

#[test]
fn full_batch_cross_entropy_descends_monotonically() {
    let spec = GeneratorSpec {
        sample_count: 400,
        ..Default::default()
    };
    let data = generate(&spec).unwrap().dataset;
    let splits = split(&data, 0.75, 0.25, 3).unwrap();
    let cfg = TrainConfig {
        epochs: 40,
        batch_size: splits.train.sample_count(),
        shuffle: false,
        optimizer: RmspropConfig {
            learning_rate: 1e-3,
            ..Default::default()
        },
        ..TrainConfig::new(LossKind::Cel)
    };
    let model = ModelSpec::linear(data.dim(), data.class_count());
    let out = train(&model, &cfg, &splits.train, &splits.validation).unwrap();
    assert_eq!(out.records.len(), 40);
    for pair in out.records.windows(2) {
        assert!(
            pair[1].train_loss < pair[0].train_loss,
            "epoch {}: {} -> {}",
            pair[1].epoch,
            pair[0].train_loss,
            pair[1].train_loss
        );
    }
}

#[test]
fn every_loss_trains_on_the_mlp() {
    let spec = GeneratorSpec {
        sample_count: 300,
        ..Default::default()
    };
    let data = generate(&spec).unwrap().dataset;
    let splits = split(&data, 0.8, 0.2, 5).unwrap();
    let model = ModelSpec::mlp(data.dim(), 16, data.class_count());
    for kind in LossKind::ALL {
        let cfg = TrainConfig {
            epochs: 3,
            ..TrainConfig::new(kind)
        };
        let out = train(&model, &cfg, &splits.train, &splits.validation).unwrap();
        assert_eq!(out.records.len(), 3, "{kind}");
        assert!(out.records.iter().all(|r| r.train_loss.is_finite()));
    }
}
