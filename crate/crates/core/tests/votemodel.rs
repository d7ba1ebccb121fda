mod common;

use common::{memorization_fixture, small, VARIANTS};
use rollcall::corpus::{Bill, Vocab, PAD};
use rollcall::ndcore::{GradCheckOptions, Tensor};
use rollcall::votemodel::{
    check_gradients, micro_instance, project_bill, score, Dataset, Example, ModelConfig, VoteModel,
};

#[test]
fn project_bill_examples() {
    let zeros = Tensor::zeros(&[25, 2]);
    let c = Tensor::filled(&[25], 0.3);
    for v in [[1.0, -4.0], [0.0, 7.5]] {
        let out = project_bill(&Tensor::vector(v.to_vec()).unwrap(), &zeros, &c).unwrap();
        assert_eq!(out, c);
    }
    let mut w = vec![0.0; 50];
    w[0] = 1.0; // row 0 picks x0
    w[3] = 1.0; // row 1 picks x1
    let w = Tensor::matrix(25, 2, w).unwrap();
    let out = project_bill(
        &Tensor::vector(vec![1.0, 1.0]).unwrap(),
        &w,
        &Tensor::zeros(&[25]),
    )
    .unwrap();
    let mut expected = [0.0; 25];
    expected[0] = 1.0;
    expected[1] = 1.0;
    assert_eq!(out.data(), &expected[..]);
}

#[test]
fn score_examples() {
    let mut v_bl = vec![0.0; 25];
    let mut v_l = vec![0.0; 25];
    assert_eq!(score(&v_bl, &v_l, &[1.0; 25], 0.7).unwrap(), 0.7);
    v_bl[0] = 1.0;
    v_bl[1] = 2.0;
    v_l[0] = 3.0;
    v_l[1] = -1.0;
    assert_eq!(score(&v_bl, &v_l, &[1.0; 25], 0.0).unwrap(), 1.0);
    assert_eq!(score(&v_l, &v_bl, &[1.0; 25], 0.0).unwrap(), 1.0);
    assert!(score(&v_bl[..24], &v_l, &[1.0; 25], 0.0).is_err());
}

#[test]
fn zero_scorer_predicts_one_half() {
    let (mut model, data) = micro_instance(&small("cnn_meta")).unwrap();
    model
        .params_mut()
        .get_mut("score.w")
        .unwrap()
        .data_mut()
        .fill(0.0);
    for p in model.predict_dataset(&data).unwrap() {
        assert_eq!(p, 0.5);
    }
}

#[test]
fn pipeline_matches_hand_evaluation() {
    // Text-only MWE with word dim 2 and legislator dim 2.
    let mut cfg = ModelConfig::preset("mwe").unwrap();
    cfg.dims.word = 2;
    cfg.dims.legislator = 2;
    let vocab = Vocab::from_tokens(["a", "b"]);
    let mut model = VoteModel::init(cfg, vocab, vec!["L0".into()]).unwrap();
    let p = model.params_mut();
    *p.get_mut("enc.emb").unwrap() =
        Tensor::matrix(4, 2, vec![0.0, 0.0, 0.0, 0.0, 1.0, 3.0, 3.0, 1.0]).unwrap();
    *p.get_mut("proj.w").unwrap() = Tensor::matrix(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    *p.get_mut("proj.b").unwrap() = Tensor::vector(vec![0.0, 0.0]).unwrap();
    *p.get_mut("legislators").unwrap() = Tensor::matrix(1, 2, vec![0.5, -1.0]).unwrap();
    *p.get_mut("score.w").unwrap() = Tensor::vector(vec![1.0, 1.0]).unwrap();
    *p.get_mut("score.b").unwrap() = Tensor::vector(vec![0.25]).unwrap();
    let bill = Bill {
        bill_id: "B".into(),
        session: "s".into(),
        summary_tokens: vec![2, 3],
        fulltext_tokens: None,
        p_r: 1.0,
        p_d: 0.0,
    };
    // v_B = [2, 2], v_BL = [2, 2], logit = 2*0.5 + 2*(-1) + 0.25 = -0.75
    let expected = 1.0 / (1.0 + 0.75f64.exp());
    assert!((model.predict(&bill, 0).unwrap() - expected).abs() < 1e-15);
    assert!(model.predict(&bill, 1).is_err());
}

#[test]
fn fulltext_required_when_configured() {
    let (model, mut data) = micro_instance(&small("mwe_ft")).unwrap();
    data.bills[0].fulltext_tokens = None;
    assert!(model.predict_dataset(&data).is_err());
}

#[test]
fn gradients_match_finite_differences_every_coordinate() {
    for key in VARIANTS {
        let (model, data) = micro_instance(&small(key)).unwrap();
        let report = check_gradients(&model, &data, &GradCheckOptions::default(), |_| {}).unwrap();
        assert!(report.passed(), "{key}: {:?}", report.worst);
        assert!(
            report.checked > 100,
            "{key}: only {} coordinates",
            report.checked
        );
    }
}

#[test]
fn tampered_gradient_is_caught() {
    let (model, data) = micro_instance(&small("mwe_meta")).unwrap();
    let report = check_gradients(&model, &data, &GradCheckOptions::default(), |g| {
        g.scale(1.5)
    })
    .unwrap();
    assert!(!report.passed());
}

#[test]
fn memorizes_twenty_votes() {
    for key in VARIANTS {
        let mut cfg = ModelConfig::preset(key).unwrap();
        cfg.training.epochs = 200;
        let (mut model, data) = memorization_fixture(cfg);
        let history = model.train(&data).unwrap();
        let acc = history.final_train_accuracy.unwrap();
        assert_eq!(acc, 1.0, "{key} reached {acc}");
    }
}

#[test]
fn single_vote_is_memorized() {
    let mut cfg = ModelConfig::preset("mwe_meta").unwrap();
    cfg.training.epochs = 200;
    let (mut model, mut data) = micro_instance(&cfg).unwrap();
    data.examples.truncate(1);
    let history = model.train(&data).unwrap();
    assert!(
        history.epochs.last().unwrap().mean_loss < 0.01,
        "{:?}",
        history.epochs.last()
    );
    let batch = [0];
    assert!(model.batch_loss(model.params(), &data, &batch).unwrap() < 0.01);
}

#[test]
fn zero_epochs_leave_parameters_untouched() {
    let mut cfg = small("cnn_meta");
    cfg.training.epochs = 0;
    let (mut model, data) = micro_instance(&cfg).unwrap();
    let before = model.params().clone();
    let history = model.train(&data).unwrap();
    assert!(history.epochs.is_empty());
    assert_eq!(model.params(), &before);
}

#[test]
fn training_is_deterministic() {
    let run = || {
        let mut cfg = small("cnn_meta");
        cfg.training.epochs = 5;
        cfg.training.batch_size = 2;
        let (mut model, data) = micro_instance(&cfg).unwrap();
        let h = model.train(&data).unwrap();
        (model.to_bytes().unwrap(), h)
    };
    let (a, ha) = run();
    let (b, hb) = run();
    assert_eq!(a, b);
    assert_eq!(ha, hb);
}

#[test]
fn padding_rows_stay_zero_through_training() {
    let mut cfg = small("cnn_meta");
    cfg.training.epochs = 30;
    let (mut model, data) = micro_instance(&cfg).unwrap();
    model.train(&data).unwrap();
    for name in ["enc.r.emb", "enc.d.emb"] {
        assert!(model
            .params()
            .get(name)
            .unwrap()
            .row(PAD as usize)
            .iter()
            .all(|&x| x == 0.0));
    }
}

#[test]
fn batch_loss_ignores_vote_order() {
    let (model, data) = micro_instance(&small("cnn_meta")).unwrap();
    let forward = model.batch_loss(model.params(), &data, &[0, 1, 2]).unwrap();
    let backward = model.batch_loss(model.params(), &data, &[2, 0, 1]).unwrap();
    assert!((forward - backward).abs() < 1e-15);
}

#[test]
fn checkpoint_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.ckpt");
    let (model, data) = micro_instance(&small("meta_only")).unwrap();
    model.save(&path).unwrap();
    let back = VoteModel::load(&path).unwrap();
    assert_eq!(back.params(), model.params());
    assert_eq!(back.config(), model.config());
    assert_eq!(back.dummy_tokens(), model.dummy_tokens());
    assert_eq!(
        back.predict_dataset(&data).unwrap(),
        model.predict_dataset(&data).unwrap()
    );
    assert_eq!(back.to_bytes().unwrap(), model.to_bytes().unwrap());
}

#[test]
fn empty_training_set_rejected() {
    let (mut model, data) = micro_instance(&small("mwe")).unwrap();
    let empty = Dataset {
        bills: data.bills,
        examples: Vec::<Example>::new(),
    };
    assert!(model.train(&empty).is_err());
}
